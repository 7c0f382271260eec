use super::{check_ab, check_n, WeightTable, ENUMERATION_CAP, HARD_CAP};
use crate::error::Result;
use crate::scalar::Weight;

/// One reduction of a size-`N` weight to size-`N-1` weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    /// `p_N(0, tau') = (1+a) p_{N-1}(tau')`.
    LeadingZero,
    /// `p_N(tau', 1) = (1+b) p_{N-1}(tau')`.
    TrailingOne,
    /// `p_N(.., 1, 0, ..)` with the `1` at this 1-based site equals the sum of
    /// the two `N-1` configurations where the pair collapses to `1` or `0`.
    TenAt(usize),
}

#[inline]
fn bit(index: usize, site: usize) -> usize {
    (index >> (site - 1)) & 1
}

/// Every rule that applies to configuration `index` of size `n >= 2`.
pub fn applicable_rules(index: usize, n: usize) -> Vec<Rule> {
    let mut rules = Vec::new();
    if bit(index, 1) == 0 {
        rules.push(Rule::LeadingZero);
    }
    if bit(index, n) == 1 {
        rules.push(Rule::TrailingOne);
    }
    rules.extend((1..n).filter(|&p| bit(index, p) == 1 && bit(index, p + 1) == 0).map(Rule::TenAt));
    rules
}

/// Leading zero, else trailing one, else the leftmost `10` factor. A string that
/// starts with 1 and ends with 0 always contains `10`, so this is total.
pub fn canonical_rule(index: usize, n: usize) -> Rule {
    if bit(index, 1) == 0 {
        Rule::LeadingZero
    } else if bit(index, n) == 1 {
        Rule::TrailingOne
    } else {
        let p = (1..n)
            .find(|&p| bit(index, p) == 1 && bit(index, p + 1) == 0)
            .expect("configuration starting with 1 and ending with 0 contains 10");
        Rule::TenAt(p)
    }
}

/// Applies `rule` to configuration `index` (size `n`) against the size `n-1` table.
pub fn reduce_with_rule<T: Weight>(prev: &[T], index: usize, n: usize, rule: Rule, a: &T, b: &T) -> T {
    debug_assert_eq!(prev.len(), 1 << (n - 1));
    let one = T::one();
    match rule {
        Rule::LeadingZero => (one + a.clone()) * prev[index >> 1].clone(),
        Rule::TrailingOne => (one + b.clone()) * prev[index & !(1 << (n - 1))].clone(),
        Rule::TenAt(p) => {
            let low = index & ((1 << (p - 1)) - 1);
            let high = index >> (p + 1);
            let collapse = |x: usize| low | (x << (p - 1)) | (high << p);
            prev[collapse(1)].clone() + prev[collapse(0)].clone()
        }
    }
}

/// Weights from the size recursion starting at `p_1 = (1+a, 1+b)`.
pub fn stationary_weights_recursive<T: Weight>(n: usize, a: T, b: T) -> Result<WeightTable<T>> {
    stationary_weights_recursive_capped(n, a, b, ENUMERATION_CAP)
}

/// As [`stationary_weights_recursive`] with an explicit cap (at most [`HARD_CAP`]).
pub fn stationary_weights_recursive_capped<T: Weight>(n: usize, a: T, b: T, cap: usize) -> Result<WeightTable<T>> {
    check_n(n, cap.min(HARD_CAP))?;
    check_ab(&a, &b)?;
    let one = T::one();
    let mut table = vec![one.clone() + a.clone(), one + b.clone()];
    for size in 2..=n {
        table = (0..1usize << size)
            .map(|idx| reduce_with_rule(&table, idx, size, canonical_rule(idx, size), &a, &b))
            .collect();
    }
    Ok(WeightTable::from_weights(n, a, b, table))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    #[test]
    fn single_site() {
        let t = stationary_weights_recursive(1, 2.0, 0.5).unwrap();
        assert_eq!(t.weights, vec![3.0, 1.5]);
    }

    #[test]
    fn two_sites_symmetric_point() {
        let t = stationary_weights_recursive(2, 1.0, 1.0).unwrap();
        assert_eq!(t.weights, vec![4.0; 4]);
        assert_eq!(t.z, 16.0);
    }

    #[test]
    fn positivity_three_sites() {
        for &(a, b) in &[(0.1, 5.0), (2.0, 2.0), (0.3, 0.2)] {
            let t = stationary_weights_recursive(3, a, b).unwrap();
            assert!(t.weights.iter().all(|&w| w > 0.0));
        }
    }

    #[test]
    fn canonical_rule_dispatch() {
        // tau = (1,1,0): index 0b011
        assert_eq!(canonical_rule(0b011, 3), Rule::TenAt(2));
        assert_eq!(canonical_rule(0b010, 3), Rule::LeadingZero);
        assert_eq!(canonical_rule(0b101, 3), Rule::TrailingOne);
        assert_eq!(applicable_rules(0b0110, 4), vec![Rule::LeadingZero, Rule::TenAt(3)]);
    }

    #[test]
    fn all_rules_agree_exactly_in_rationals() {
        let q = |p: i64, r: i64| BigRational::new(p.into(), r.into());
        for (a, b) in [(q(1, 2), q(3, 1)), (q(2, 1), q(2, 1)), (q(1, 3), q(1, 5))] {
            let mut prev = stationary_weights_recursive(1, a.clone(), b.clone()).unwrap().weights;
            for n in 2..=7 {
                let cur = stationary_weights_recursive(n, a.clone(), b.clone()).unwrap().weights;
                for idx in 0..1usize << n {
                    for rule in applicable_rules(idx, n) {
                        assert_eq!(reduce_with_rule(&prev, idx, n, rule, &a, &b), cur[idx], "n={n} idx={idx} {rule:?}");
                    }
                }
                prev = cur;
            }
        }
    }

    #[test]
    fn caps_are_enforced() {
        assert!(matches!(
            stationary_weights_recursive(17, 1.0, 1.0),
            Err(crate::Error::Resource { .. })
        ));
        assert!(stationary_weights_recursive_capped(25, 1.0, 1.0, 30).is_err());
        assert!(stationary_weights_recursive(0, 1.0, 1.0).is_err());
        assert!(stationary_weights_recursive(3, 0.0, 1.0).is_err());
    }
}
