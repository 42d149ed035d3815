use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::{hilbert_symbol, is_prime, is_unit_square, least_nonresidue, split_valuation, Sign};
use crate::error::{Error, Result};

/// A quadratic extension `E = Q_p(sqrt(d))`, with `d` normalized to a fixed
/// representative of its square class.
///
/// Representatives: for odd `p`, `u` (unramified), `p` and `p*u` (ramified),
/// where `u` is the least positive non-residue. For `p = 2`: `-3`
/// (unramified), `-1` and `3` (discriminant valuation 2), `2, -2, 6, -6`
/// (discriminant valuation 3).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuadExt {
    pub p: u64,
    pub d: i64,
    /// Ramification index.
    pub e: u32,
    /// Residue degree.
    pub f: u32,
    /// Valuation of the discriminant.
    pub delta: u32,
    /// Conductor exponent of the quadratic character of `E/Q_p`.
    pub cond_eps: u32,
}

impl QuadExt {
    /// Classifies `Q_p(sqrt(d))` and returns it with its canonical `d`.
    pub fn new(p: u64, d: i64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if d == 0 {
            return Err(Error::invalid("d must be nonzero"));
        }
        let (v, u) = split_valuation(d, p);
        let odd_val = v % 2 == 1;
        let square_unit = is_unit_square(u, p);
        if !odd_val && square_unit {
            return Err(Error::invalid(format!("{d} is a square in Q_{p}")));
        }
        let canonical = if p == 2 {
            let r = u.rem_euclid(8);
            match (odd_val, r) {
                (false, 3) => 3,
                (false, 5) => -3,
                (false, 7) => -1,
                (true, 1) => 2,
                (true, 3) => 6,
                (true, 5) => -6,
                (true, 7) => -2,
                _ => unreachable!("odd unit classes mod 8"),
            }
        } else {
            let nr = least_nonresidue(p) as i64;
            match (odd_val, square_unit) {
                (false, false) => nr,
                (true, true) => p as i64,
                (true, false) => p as i64 * nr,
                (false, true) => unreachable!(),
            }
        };
        Ok(Self::from_canonical(p, canonical))
    }

    fn from_canonical(p: u64, d: i64) -> Self {
        let ramified = d.unsigned_abs().is_multiple_of(p) || (p == 2 && d != -3);
        let (e, f) = if ramified { (2, 1) } else { (1, 2) };
        let delta = match (p, ramified) {
            (_, false) => 0,
            (2, true) if d % 2 == 0 => 3,
            (2, true) => 2,
            _ => 1,
        };
        let cond_eps = match (p, ramified) {
            (_, false) => 0,
            (2, true) => delta,
            _ => 1,
        };
        QuadExt { p, d, e, f, delta, cond_eps }
    }

    /// All quadratic extensions of `Q_p`, unramified first.
    pub fn all(p: u64) -> Result<Vec<Self>> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let ds: Vec<i64> = if p == 2 {
            vec![-3, -1, 3, 2, -2, 6, -6]
        } else {
            let u = least_nonresidue(p) as i64;
            vec![u, p as i64, p as i64 * u]
        };
        Ok(ds.into_iter().map(|d| Self::from_canonical(p, d)).collect())
    }

    pub fn unramified(p: u64) -> Result<Self> {
        Ok(Self::all(p)?.remove(0))
    }

    pub fn is_ramified(&self) -> bool {
        self.e == 2
    }

    /// `Q_3(sqrt(-3))`, the one ramified field over an odd prime that contains
    /// extra roots of unity.
    pub fn is_q3_sqrt_minus3(&self) -> bool {
        self.p == 3 && self.d == 6
    }

    /// Order of the residue field.
    pub fn residue_size(&self) -> u64 {
        self.p.pow(self.f)
    }

    /// The quadratic character of `E/Q_p` at `x`, where `x` is a `p`-adic
    /// unit or `p` itself.
    pub fn eps(&self, x: i64) -> Result<Sign> {
        if x == 0 || (x.unsigned_abs().is_multiple_of(self.p) && x != self.p as i64) {
            return Err(Error::invalid(format!("{x} is neither a unit nor p at p = {}", self.p)));
        }
        hilbert_symbol(x, self.d, self.p)
    }

    /// A short human label, e.g. `Q2(sqrt(-1))`.
    pub fn label(&self) -> String {
        if self.is_q3_sqrt_minus3() {
            return "Q3(sqrt(-3))".into();
        }
        if self.is_ramified() {
            format!("Q{}(sqrt({}))", self.p, self.d)
        } else {
            format!("Q{}(sqrt({})) unramified", self.p, self.d)
        }
    }
}

impl fmt::Display for QuadExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}
