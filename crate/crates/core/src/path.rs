//! Occupation configurations and lattice paths.
//!
//! Configurations of `N` sites are also addressed by an integer index in
//! `0..2^N` where bit `j-1` holds `tau_j` (site 1 is the least significant
//! bit). Every table in the crate uses this ordering.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Occupation {
    bits: Vec<u8>,
}

impl Occupation {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::domain("tau", "at least one site is required"));
        }
        if let Some(&x) = bits.iter().find(|&&x| x > 1) {
            return Err(Error::domain("tau", format!("occupation values must be 0 or 1, got {x}")));
        }
        Ok(Self { bits })
    }

    /// Decodes a table index into an `n`-site configuration.
    pub fn from_index(index: usize, n: usize) -> Self {
        Self { bits: (0..n).map(|j| ((index >> j) & 1) as u8).collect() }
    }

    pub fn index(&self) -> usize {
        self.bits.iter().enumerate().fold(0, |acc, (j, &t)| acc | ((t as usize) << j))
    }

    pub fn n_sites(&self) -> usize {
        self.bits.len()
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn particles(&self) -> usize {
        self.bits.iter().map(|&t| t as usize).sum()
    }
}

impl fmt::Display for Occupation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &t in &self.bits {
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

/// `s_0 = 0` with increments in `{0, 1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LatticePath {
    values: Vec<u32>,
}

impl LatticePath {
    pub fn new(values: Vec<u32>) -> Result<Self> {
        match values.first() {
            Some(0) => {}
            Some(&s0) => return Err(Error::domain("s", format!("path must start at 0, got {s0}"))),
            None => return Err(Error::domain("s", "path must contain s_0")),
        }
        if let Some(w) = values.windows(2).find(|w| !(w[1] == w[0] || w[1] == w[0] + 1)) {
            return Err(Error::domain("s", format!("increment {} -> {} is not 0 or 1", w[0], w[1])));
        }
        Ok(Self { values })
    }

    /// Partial sums of increments, which must be 0/1.
    pub fn from_increments(incs: &[u8]) -> Self {
        let mut values = Vec::with_capacity(incs.len() + 1);
        let mut s = 0u32;
        values.push(0);
        for &x in incs {
            debug_assert!(x <= 1);
            s += x as u32;
            values.push(s);
        }
        Self { values }
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    /// Number of steps `N`.
    pub fn len_steps(&self) -> usize {
        self.values.len() - 1
    }

    pub fn end(&self) -> u32 {
        *self.values.last().unwrap()
    }

    pub fn increments(&self) -> impl Iterator<Item = u8> + '_ {
        self.values.windows(2).map(|w| (w[1] - w[0]) as u8)
    }
}

/// `s_k = tau_1 + ... + tau_k`.
pub fn height_from_occupation(tau: &Occupation) -> LatticePath {
    LatticePath::from_increments(tau.bits())
}

pub fn occupation_from_height(s: &LatticePath) -> Occupation {
    Occupation { bits: s.increments().collect() }
}
