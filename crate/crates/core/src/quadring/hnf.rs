use serde::Serialize;

use crate::error::{Error, Result};

/// A full-rank sublattice of `Z^2` in Hermite normal form.
///
/// Columns of `[[ma, s], [0, mb]]` form a basis: `(ma, 0)` and `(s, mb)`, with
/// `0 <= s < ma`. Every coset of `Z^2 / L` has a unique representative
/// `(a, b)` with `0 <= a < ma` and `0 <= b < mb`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Hnf2 {
    pub ma: i64,
    pub s: i64,
    pub mb: i64,
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        if a < 0 {
            (-a, -1, 0)
        } else {
            (a, 1, 0)
        }
    } else {
        let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
        (g, y, x - a.div_euclid(b) * y)
    }
}

impl Hnf2 {
    /// The lattice spanned by `gens`. Fails if they do not span a full-rank
    /// lattice.
    pub fn from_generators(gens: &[(i64, i64)]) -> Result<Self> {
        // Pivot row (s, mb) plus the first-axis modulus ma, updated one
        // generator at a time by unimodular row operations.
        let (mut ma, mut s, mut mb) = (0i128, 0i128, 0i128);
        for &(x, y) in gens {
            let (x, y) = (x as i128, y as i128);
            if y == 0 {
                ma = gcd_i128(ma, x);
            } else if mb == 0 {
                (s, mb) = if y < 0 { (-x, -y) } else { (x, y) };
            } else {
                let (g, u, v) = ext_gcd(mb, y);
                let rest = (y / g) * s - (mb / g) * x;
                s = u * s + v * x;
                mb = g;
                ma = gcd_i128(ma, rest);
            }
            if ma != 0 {
                s = s.rem_euclid(ma);
            }
        }
        if ma == 0 || mb == 0 {
            return Err(Error::invalid("generators do not span a full-rank lattice"));
        }
        let narrow = |v: i128| i64::try_from(v).map_err(|_| Error::invalid("lattice entries overflow"));
        Ok(Hnf2 { ma: narrow(ma)?, s: narrow(s)?, mb: narrow(mb)? })
    }

    /// Canonical representative of `(a, b) + L`.
    #[inline]
    pub fn reduce(&self, a: i64, b: i64) -> (i64, i64) {
        let q = b.div_euclid(self.mb);
        let b = b - q * self.mb;
        let a = (a - q * self.s).rem_euclid(self.ma);
        (a, b)
    }

    pub fn contains(&self, a: i64, b: i64) -> bool {
        self.reduce(a, b) == (0, 0)
    }

    /// Index of `L` in `Z^2`.
    pub fn index(&self) -> u64 {
        (self.ma * self.mb) as u64
    }
}

fn gcd_i128(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn simple_lattices() {
        let h = Hnf2::from_generators(&[(9, 0), (0, 9), (3, 1)]).unwrap();
        assert_eq!(h.index(), 9);
        assert_eq!(h.mb, 1);
        assert!(h.contains(3, 1));
        assert!(h.contains(9, 0));
        assert!(!h.contains(1, 0));
        assert!(Hnf2::from_generators(&[(1, 1), (2, 2)]).is_err());
    }

    fn brute_contains(gens: &[(i64, i64)], a: i64, b: i64, box_: i64) -> bool {
        // Search small integer combinations; only used on tiny inputs.
        let n = gens.len();
        let mut idx = vec![-box_; n];
        loop {
            let (mut x, mut y) = (0, 0);
            for (c, g) in idx.iter().zip(gens) {
                x += c * g.0;
                y += c * g.1;
            }
            if x == a && y == b {
                return true;
            }
            let mut i = 0;
            loop {
                if i == n {
                    return false;
                }
                idx[i] += 1;
                if idx[i] <= box_ {
                    break;
                }
                idx[i] = -box_;
                i += 1;
            }
        }
    }

    proptest! {
        #[test]
        fn reduction_is_canonical(
            g1 in (1i64..8, -5i64..6), g2 in (-5i64..6, 1i64..8), a in -30i64..30, b in -30i64..30
        ) {
            let gens = [g1, g2];
            prop_assume!(g1.0 * g2.1 - g1.1 * g2.0 != 0);
            let h = Hnf2::from_generators(&gens).unwrap();
            let det = (g1.0 * g2.1 - g1.1 * g2.0).unsigned_abs();
            prop_assert_eq!(h.index(), det);
            let (ra, rb) = h.reduce(a, b);
            prop_assert!(0 <= ra && ra < h.ma && 0 <= rb && rb < h.mb);
            prop_assert!(h.contains(a - ra, b - rb));
            // Generators and basis vectors lie in the lattice.
            prop_assert!(h.contains(g1.0, g1.1) && h.contains(g2.0, g2.1));
        }

        #[test]
        fn membership_matches_search(a in -6i64..7, b in -6i64..7) {
            let gens = [(4, 2), (2, 3)];
            let h = Hnf2::from_generators(&gens).unwrap();
            prop_assert_eq!(h.contains(a, b), brute_contains(&gens, a, b, 8));
        }
    }
}
