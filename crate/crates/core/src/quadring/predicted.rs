use serde::Serialize;

use super::ext::QuadExt;
use crate::arith::{factorize, pow_mod};
use crate::error::{Error, Result};

/// Which closed-form rule produced a predicted structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StructureRule {
    UnramifiedOdd,
    UnramifiedTwo,
    RamifiedOdd,
    Q3SqrtMinus3,
    Q2SqrtMinus1,
    Q2Sqrt3,
    Q2Sqrt2d,
    /// The listed small cases for ramified `p = 2` at levels 2, 3, 4.
    SmallRamifiedTwo,
    /// Level 1: the multiplicative group of the residue field.
    ResidueField,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PredictedStructure {
    /// Cyclic components as listed by the rule (not necessarily a divisor chain).
    pub components: Vec<u64>,
    pub invariant_factors: Vec<u64>,
    pub rule: StructureRule,
}

/// `(a, b)` with `a + b = n - 1`, `a = b` for odd `n`, `a = b + 1` for even `n`.
pub fn split_ab(n: u32) -> (u32, u32) {
    let b = (n - 1) / 2;
    (n - 1 - b, b)
}

/// Invariant factors `d_1 | d_2 | ... ` (ascending, no 1s) of a product of
/// cyclic groups.
pub fn invariant_factors(components: &[u64]) -> Vec<u64> {
    let mut by_prime: std::collections::BTreeMap<u64, Vec<u64>> = Default::default();
    for &c in components {
        if c <= 1 {
            continue;
        }
        for (q, e) in factorize(c).expect("nonzero") {
            by_prime.entry(q).or_default().push(q.pow(e));
        }
    }
    let len = by_prime.values().map(Vec::len).max().unwrap_or(0);
    let mut out = vec![1u64; len];
    for powers in by_prime.values_mut() {
        powers.sort_unstable_by(|a, b| b.cmp(a));
        for (i, pp) in powers.iter().enumerate() {
            out[len - 1 - i] *= pp;
        }
    }
    out
}

/// Closed-form structure of `(O_E / p_E^n)^×`.
pub fn predicted_structure(ext: &QuadExt, n: u32) -> Result<PredictedStructure> {
    if n == 0 {
        return Err(Error::invalid("level must be at least 1"));
    }
    let p = ext.p;
    let pw = |k: u32| p.pow(k);
    let (a, b) = split_ab(n);
    use StructureRule::*;
    let (components, rule) = if !ext.is_ramified() {
        if p != 2 {
            (vec![p * p - 1, pw(n - 1), pw(n - 1)], UnramifiedOdd)
        } else if n >= 2 {
            (vec![3, 2, pw(n - 2), pw(n - 1)], UnramifiedTwo)
        } else {
            (vec![3], ResidueField)
        }
    } else if p != 2 {
        if !ext.is_q3_sqrt_minus3() {
            (vec![p - 1, pw(a), pw(b)], RamifiedOdd)
        } else if n >= 2 {
            (vec![2, 3, pw(a - 1), pw(b)], Q3SqrtMinus3)
        } else {
            (vec![2], ResidueField)
        }
    } else {
        match (ext.d, n) {
            (_, 1) => (vec![], ResidueField),
            (_, 2) => (vec![2], SmallRamifiedTwo),
            (-1, _) => (vec![4, pw(b - 1), pw(a - 1)], Q2SqrtMinus1),
            (_, 3) => (vec![4], SmallRamifiedTwo),
            (_, 4) => (vec![4, 2], SmallRamifiedTwo),
            (3, _) => (vec![2, pw(a - 1), pw(b)], Q2Sqrt3),
            (_, _) => (vec![2, pw(b - 1), pw(a)], Q2Sqrt2d),
        }
    };
    let invariant_factors = invariant_factors(&components);
    Ok(PredictedStructure { components, invariant_factors, rule })
}

/// A square root of the unit `a` modulo `p^k` (`a` must be a square unit;
/// for `p = 2` we need `a ≡ 1 mod 8` and return a root valid mod `2^k`).
pub fn sqrt_mod_prime_power(a: i64, p: u64, k: u32) -> Result<u64> {
    // Digit-by-digit lifting over all candidate roots; the candidate set stays
    // small (at most 4 residues per step for p = 2, 2 for odd p).
    let target = |m: u64| a.rem_euclid(m as i64) as u64;
    let mut roots: Vec<u64> = (0..p).filter(|&x| (x * x) % p == target(p)).collect();
    let mut m = p;
    for _ in 1..k.max(1) {
        let next = m * p;
        let t = target(next);
        let mut lifted = Vec::new();
        for &r in &roots {
            for j in 0..p {
                let x = r + j * m;
                if (x as u128 * x as u128 % next as u128) as u64 == t {
                    lifted.push(x);
                }
            }
        }
        lifted.sort_unstable();
        lifted.dedup();
        roots = lifted;
        m = next;
    }
    roots
        .into_iter()
        .find(|&r| r % p != 0)
        .ok_or_else(|| Error::invalid(format!("{a} is not a unit square mod {p}^{k}")))
}

/// Inverse of a unit modulo `m`.
pub(crate) fn inv_mod(a: i64, m: u64) -> Option<u64> {
    let a = a.rem_euclid(m as i64) as u64;
    if m == 1 {
        return Some(0);
    }
    let phi = crate::arith::euler_phi(m);
    let inv = pow_mod(a, phi - 1, m);
    (a * inv % m == 1).then_some(inv)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ab_split() {
        assert_eq!(split_ab(1), (0, 0));
        assert_eq!(split_ab(4), (2, 1));
        assert_eq!(split_ab(5), (2, 2));
    }

    #[test]
    fn invariant_factor_examples() {
        assert_eq!(invariant_factors(&[24, 5, 5]), vec![5, 120]);
        assert_eq!(invariant_factors(&[3, 2, 4, 8]), vec![2, 4, 24]);
        assert_eq!(invariant_factors(&[2, 3, 3, 3]), vec![3, 3, 6]);
        assert_eq!(invariant_factors(&[1, 1]), Vec::<u64>::new());
    }

    #[test]
    fn table_examples() {
        let unr2 = QuadExt::unramified(2).unwrap();
        assert_eq!(predicted_structure(&unr2, 4).unwrap().components, vec![3, 2, 4, 8]);
        let s3 = QuadExt::new(2, 3).unwrap();
        assert_eq!(predicted_structure(&s3, 4).unwrap().invariant_factors, vec![2, 4]);
        let s6 = QuadExt::new(2, 6).unwrap();
        assert_eq!(predicted_structure(&s6, 5).unwrap().invariant_factors, vec![2, 2, 4]);
        let m3 = QuadExt::new(3, -3).unwrap();
        assert_eq!(predicted_structure(&m3, 4).unwrap().invariant_factors, vec![3, 3, 6]);
        let i = QuadExt::new(2, -1).unwrap();
        assert_eq!(predicted_structure(&i, 5).unwrap().invariant_factors, vec![2, 2, 4]);
        let u5 = QuadExt::unramified(5).unwrap();
        assert_eq!(predicted_structure(&u5, 2).unwrap().invariant_factors, vec![5, 120]);
    }

    #[test]
    fn square_roots() {
        for (a, p, k) in [(-5 * 3, 2u64, 12u32), (2, 7, 6), (-2, 3, 8), (17, 2, 3)] {
            let r = sqrt_mod_prime_power(a, p, k).unwrap() as i128;
            let m = (p as i128).pow(k);
            assert_eq!((r * r - a as i128).rem_euclid(m), 0, "{a} {p} {k}");
        }
        assert!(sqrt_mod_prime_power(3, 2, 5).is_err());
        assert!(sqrt_mod_prime_power(3, 7, 2).is_err());
    }
}
