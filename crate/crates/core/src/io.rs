//! File formats: CSV with a header row and LF endings, JSON summaries, and
//! the packed binary sample stream.
//!
//! Floats are written with Rust's shortest round-trip `Display`.
//!
//! Binary samples: `N` as a little-endian `u32`, then per sample two bitmaps
//! of `ceil(N/8)` bytes (top line, then bottom line). Bit `j % 8` of byte
//! `j / 8` holds increment `j + 1`.

use std::io::{self, Write};

use crate::exact::{TwoLineTable, WeightTable};
use crate::path::Occupation;
use crate::scalar::Weight;

pub fn bits_string(bits: &[u8]) -> String {
    bits.iter().map(|&b| if b == 1 { '1' } else { '0' }).collect()
}

pub fn write_csv_header<W: Write>(w: &mut W, cols: &[&str]) -> io::Result<()> {
    writeln!(w, "{}", cols.join(","))
}

/// `config,weight,probability` with `config` as the string `tau_1..tau_N`.
pub fn write_weight_table_csv<W: Write, T: Weight>(w: &mut W, table: &WeightTable<T>) -> io::Result<()> {
    write_csv_header(w, &["config", "weight", "probability"])?;
    let probs = table.probabilities_f64();
    for (idx, (wt, p)) in table.weights.iter().zip(probs).enumerate() {
        let occ = Occupation::from_index(idx, table.n_sites);
        writeln!(w, "{},{},{}", occ, wt.approx_f64(), p)?;
    }
    Ok(())
}

/// `top,bottom,weight,probability` with both lines as increment strings.
pub fn write_two_line_table_csv<W: Write, T: Weight>(w: &mut W, table: &TwoLineTable<T>) -> io::Result<()> {
    write_csv_header(w, &["top", "bottom", "weight", "probability"])?;
    let n = table.n_sites;
    let z = table.total.approx_f64();
    for tau in 0..1usize << n {
        for xi in 0..1usize << n {
            let g = table.get(tau, xi).approx_f64();
            let top = Occupation::from_index(tau, n);
            let bottom = Occupation::from_index(xi, n);
            writeln!(w, "{top},{bottom},{g},{}", g / z)?;
        }
    }
    Ok(())
}

/// Top and bottom increments of one sample.
pub type SamplePair = (Vec<u8>, Vec<u8>);

/// Appends one packed sample to `out`.
pub fn pack_sample(top: &[u8], bottom: &[u8], out: &mut Vec<u8>) {
    for line in [top, bottom] {
        let start = out.len();
        out.resize(start + line.len().div_ceil(8), 0);
        for (j, &bit) in line.iter().enumerate() {
            out[start + j / 8] |= (bit & 1) << (j % 8);
        }
    }
}

/// Inverse of the binary format: `(N, samples)`.
pub fn unpack_samples(bytes: &[u8]) -> io::Result<(usize, Vec<SamplePair>)> {
    let bad = |m: &str| io::Error::new(io::ErrorKind::InvalidData, m.to_string());
    if bytes.len() < 4 {
        return Err(bad("missing header"));
    }
    let n = u32::from_le_bytes(bytes[..4].try_into().unwrap()) as usize;
    let width = n.div_ceil(8);
    let body = &bytes[4..];
    if width == 0 || !body.len().is_multiple_of(2 * width) {
        return Err(bad("truncated sample stream"));
    }
    let unpack = |chunk: &[u8]| (0..n).map(|j| (chunk[j / 8] >> (j % 8)) & 1).collect::<Vec<u8>>();
    let samples = body.chunks(2 * width).map(|c| (unpack(&c[..width]), unpack(&c[width..]))).collect();
    Ok((n, samples))
}
