use std::sync::atomic::{AtomicU64, Ordering};

use serde::Serialize;

use super::ext::QuadExt;
use super::hnf::Hnf2;
use crate::error::{Error, Result};

/// Default cap on the number of ring elements a single enumeration may touch.
pub const DEFAULT_BUDGET: u64 = 2_000_000;

static NEXT_KEY: AtomicU64 = AtomicU64::new(1);

/// `O_E / p_E^n`, with `O_E = Z_p[beta]` and `beta^2 = t*beta + c`.
///
/// Elements are `a + b*beta` with `(a, b)` reduced against the ideal lattice.
/// Each element has a canonical index `a * mb + b`, so index order is
/// lexicographic order on `(a, b)`.
#[derive(Debug, Clone)]
pub struct QuotientRing {
    ext: QuadExt,
    n: u32,
    t: i64,
    c: i64,
    lattice: Hnf2,
    /// Lattices of `p_E^m` for `m = 0..=n`.
    levels: Vec<Hnf2>,
    /// `p^ceil(n/e)`, the modulus of `p_E^n ∩ Z`.
    rational_modulus: i64,
    key: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct RingElement {
    pub a: i64,
    pub b: i64,
    #[serde(skip)]
    key: u64,
}

/// Serializable summary of a quotient ring.
#[derive(Debug, Clone, Serialize)]
pub struct RingSummary {
    pub field: QuadExt,
    pub level: u32,
    pub beta_trace: i64,
    pub beta_norm_neg: i64,
    pub lattice: [[i64; 2]; 2],
    pub moduli: (i64, i64),
    pub size: u64,
}

fn checked_pow(p: u64, k: u32) -> Result<u64> {
    p.checked_pow(k).ok_or_else(|| Error::invalid(format!("{p}^{k} overflows")))
}

impl QuotientRing {
    /// The default presentation: `beta = sqrt(d)` except for unramified `p = 2`,
    /// where `beta` is a primitive cube root of unity.
    pub fn new(ext: &QuadExt, n: u32, budget: u64) -> Result<Self> {
        let (t, c) = if ext.p == 2 && !ext.is_ramified() { (-1, -1) } else { (0, ext.d) };
        Self::with_beta(ext, n, t, c, budget)
    }

    /// A presentation with `beta^2 = t*beta + c`. For ramified fields only the
    /// default generator is accepted; for unramified fields any `beta` whose
    /// minimal polynomial is irreducible mod `p` and which generates `E` works.
    pub fn with_beta(ext: &QuadExt, n: u32, t: i64, c: i64, budget: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("level must be at least 1"));
        }
        let p = ext.p;
        let size = ext.residue_size().checked_pow(n).ok_or(Error::Capacity { required: u64::MAX, budget })?;
        if size > budget {
            return Err(Error::Capacity { required: size, budget });
        }
        if size > u32::MAX as u64 {
            return Err(Error::Capacity { required: size, budget: u32::MAX as u64 });
        }
        if ext.is_ramified() {
            if (t, c) != (0, ext.d) {
                return Err(Error::Unsupported(
                    "ramified fields use beta = sqrt(d)".into(),
                ));
            }
        } else {
            // x^2 - t x - c must be irreducible mod p and generate E.
            let pi = p as i64;
            let irreducible = (0..pi).all(|x| (x * x - t * x - c).rem_euclid(pi) != 0);
            let disc = t * t + 4 * c;
            let same_field = disc != 0 && QuadExt::new(p, disc).map(|e| e == *ext).unwrap_or(false);
            if !irreducible || !same_field {
                return Err(Error::invalid(format!(
                    "x^2 - {t}x - {c} does not present the unramified extension of Q_{p}"
                )));
            }
        }
        let mut ring = QuotientRing {
            ext: *ext,
            n,
            t,
            c,
            lattice: Hnf2 { ma: 1, s: 0, mb: 1 },
            levels: Vec::with_capacity(n as usize + 1),
            rational_modulus: 0,
            key: NEXT_KEY.fetch_add(1, Ordering::Relaxed),
        };
        for m in 0..=n {
            let h = ring.ideal_lattice(m)?;
            ring.levels.push(h);
        }
        ring.lattice = ring.levels[n as usize];
        ring.rational_modulus = checked_pow(p, n.div_ceil(ext.e))? as i64;
        if ring.lattice.index() != size {
            return Err(Error::internal(format!(
                "ideal lattice has index {} but |O/p^{n}| = {size}",
                ring.lattice.index()
            )));
        }
        Ok(ring)
    }

    /// A uniformizer of `E` in `(a, b)` coordinates.
    pub fn uniformizer(&self) -> (i64, i64) {
        let p = self.ext.p as i64;
        if !self.ext.is_ramified() {
            (p, 0)
        } else if self.ext.d.rem_euclid(p) == 0 {
            (0, 1)
        } else {
            // Q2(sqrt(-1)) and Q2(sqrt(3)): 1 + sqrt(d) has norm 1 - d = 2 or -2.
            (1, 1)
        }
    }

    /// Lattice of `p_E^m` inside `Z + Z*beta`.
    fn ideal_lattice(&self, m: u32) -> Result<Hnf2> {
        let p = self.ext.p;
        let q = checked_pow(p, m.div_ceil(self.ext.e))? as i64;
        let (mut a, mut b) = (1i64, 0i64);
        let pi = self.uniformizer();
        for _ in 0..m {
            let (x, y) = self.raw_mul((a, b), pi);
            a = x.rem_euclid(q as i128) as i64;
            b = y.rem_euclid(q as i128) as i64;
        }
        let (ba, bb) = self.raw_mul((a, b), (0, 1));
        let (ba, bb) = (ba as i64, bb as i64);
        Hnf2::from_generators(&[(q, 0), (0, q), (a, b), (ba.rem_euclid(q), bb.rem_euclid(q))])
    }

    #[inline]
    fn raw_mul(&self, (a1, b1): (i64, i64), (a2, b2): (i64, i64)) -> (i128, i128) {
        let (a1, b1, a2, b2) = (a1 as i128, b1 as i128, a2 as i128, b2 as i128);
        let bb = b1 * b2;
        (a1 * a2 + self.c as i128 * bb, a1 * b2 + a2 * b1 + self.t as i128 * bb)
    }

    /// Brings an `i128` pair back into `i64` range without leaving its coset;
    /// `|R| * Z^2` lies inside the ideal lattice.
    #[inline]
    fn shrink(&self, (a, b): (i128, i128)) -> (i64, i64) {
        let m = self.lattice.index() as i128;
        (a.rem_euclid(m) as i64, b.rem_euclid(m) as i64)
    }

    pub fn ext(&self) -> &QuadExt {
        &self.ext
    }

    pub fn level(&self) -> u32 {
        self.n
    }

    pub fn beta(&self) -> (i64, i64) {
        (self.t, self.c)
    }

    pub fn lattice(&self) -> Hnf2 {
        self.lattice
    }

    pub fn level_lattice(&self, m: u32) -> Option<Hnf2> {
        self.levels.get(m as usize).copied()
    }

    /// Coefficient bounds `(ma, mb)` of canonical representatives.
    pub fn moduli(&self) -> (i64, i64) {
        (self.lattice.ma, self.lattice.mb)
    }

    pub fn size(&self) -> u64 {
        self.lattice.index()
    }

    pub fn rational_modulus(&self) -> u64 {
        self.rational_modulus as u64
    }

    pub fn summary(&self) -> RingSummary {
        let h = self.lattice;
        RingSummary {
            field: self.ext,
            level: self.n,
            beta_trace: self.t,
            beta_norm_neg: self.c,
            lattice: [[h.ma, h.s], [0, h.mb]],
            moduli: (h.ma, h.mb),
            size: self.size(),
        }
    }

    pub fn element(&self, a: i64, b: i64) -> RingElement {
        let (a, b) = self.lattice.reduce(a, b);
        RingElement { a, b, key: self.key }
    }

    pub fn zero(&self) -> RingElement {
        self.element(0, 0)
    }

    pub fn one(&self) -> RingElement {
        self.element(1, 0)
    }

    fn check(&self, x: &RingElement) -> Result<()> {
        if x.key == self.key {
            Ok(())
        } else {
            Err(Error::RingMismatch)
        }
    }

    pub fn add(&self, x: &RingElement, y: &RingElement) -> Result<RingElement> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.element(x.a + y.a, x.b + y.b))
    }

    pub fn neg(&self, x: &RingElement) -> Result<RingElement> {
        self.check(x)?;
        Ok(self.element(-x.a, -x.b))
    }

    pub fn sub(&self, x: &RingElement, y: &RingElement) -> Result<RingElement> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.element(x.a - y.a, x.b - y.b))
    }

    pub fn mul(&self, x: &RingElement, y: &RingElement) -> Result<RingElement> {
        self.check(x)?;
        self.check(y)?;
        let (a, b) = self.shrink(self.raw_mul((x.a, x.b), (y.a, y.b)));
        Ok(self.element(a, b))
    }

    /// Galois conjugate: `beta -> t - beta`.
    pub fn conj(&self, x: &RingElement) -> Result<RingElement> {
        self.check(x)?;
        Ok(self.element(x.a + x.b * self.t, -x.b))
    }

    /// `N(x) mod p^ceil(n/e)`, which is well defined on the quotient.
    pub fn norm(&self, x: &RingElement) -> Result<u64> {
        self.check(x)?;
        Ok(self.norm_ab(x.a, x.b))
    }

    #[inline]
    fn norm_ab(&self, a: i64, b: i64) -> u64 {
        let (a, b) = (a as i128, b as i128);
        let v = a * a + self.t as i128 * a * b - self.c as i128 * b * b;
        v.rem_euclid(self.rational_modulus as i128) as u64
    }

    pub fn is_unit(&self, x: &RingElement) -> Result<bool> {
        self.check(x)?;
        Ok(!self.norm_ab(x.a, x.b).is_multiple_of(self.ext.p))
    }

    /// The same field and presentation at a lower level.
    pub fn at_level(&self, m: u32) -> Result<QuotientRing> {
        if m == 0 || m > self.n {
            return Err(Error::invalid(format!("level {m} not in 1..={}", self.n)));
        }
        Self::with_beta(&self.ext, m, self.t, self.c, u64::MAX)
    }

    /// Image of `x` in a lower-level quotient of the same presentation.
    pub fn reduce_to(&self, x: &RingElement, target: &QuotientRing) -> Result<RingElement> {
        self.check(x)?;
        if target.ext != self.ext || (target.t, target.c) != (self.t, self.c) || target.n > self.n {
            return Err(Error::RingMismatch);
        }
        Ok(target.element(x.a, x.b))
    }

    /// Whether `x ≡ 1 mod p_E^m`.
    pub fn is_one_mod(&self, x: &RingElement, m: u32) -> Result<bool> {
        self.check(x)?;
        let h = self.level_lattice(m).ok_or_else(|| Error::invalid("level out of range"))?;
        Ok(h.contains(x.a - 1, x.b))
    }

    // Index-level primitives used by the unit-group enumeration.

    #[inline]
    pub fn index_of(&self, x: &RingElement) -> usize {
        (x.a * self.lattice.mb + x.b) as usize
    }

    #[inline]
    pub fn from_index(&self, i: usize) -> RingElement {
        let mb = self.lattice.mb as usize;
        RingElement {
            a: (i / mb) as i64,
            b: (i % mb) as i64,
            key: self.key,
        }
    }

    #[inline]
    pub(crate) fn ab(&self, i: usize) -> (i64, i64) {
        let mb = self.lattice.mb as usize;
        ((i / mb) as i64, (i % mb) as i64)
    }

    #[inline]
    pub(crate) fn idx(&self, a: i64, b: i64) -> usize {
        let (a, b) = self.lattice.reduce(a, b);
        (a * self.lattice.mb + b) as usize
    }

    #[inline]
    pub(crate) fn mul_idx(&self, x: usize, y: usize) -> usize {
        let (a, b) = self.shrink(self.raw_mul(self.ab(x), self.ab(y)));
        self.idx(a, b)
    }

    #[inline]
    pub(crate) fn conj_idx(&self, x: usize) -> usize {
        let (a, b) = self.ab(x);
        self.idx(a + b * self.t, -b)
    }

    #[inline]
    pub(crate) fn is_unit_idx(&self, x: usize) -> bool {
        let (a, b) = self.ab(x);
        !self.norm_ab(a, b).is_multiple_of(self.ext.p)
    }

    #[inline]
    pub(crate) fn is_one_mod_idx(&self, x: usize, m: u32) -> bool {
        let (a, b) = self.ab(x);
        self.levels[m as usize].contains(a - 1, b)
    }
}
