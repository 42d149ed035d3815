//! Brute-force structure of the unit group of a finite local ring, with a
//! full discrete-log table.

use rayon::prelude::*;
use serde::Serialize;

use crate::arith::factorize;
use crate::error::{Error, Result};
use crate::quadring::QuotientRing;

/// A finite commutative local ring whose elements are indexed `0..size`.
pub trait FiniteRing: Sync {
    fn size(&self) -> usize;
    fn one(&self) -> usize;
    fn mul(&self, x: usize, y: usize) -> usize;
    fn is_unit(&self, x: usize) -> bool;
    /// Residue characteristic.
    fn prime(&self) -> u64;
    /// Level of the filtration `1 + m^k`; `is_one_mod(x, level())` holds only for 1.
    fn level(&self) -> u32;
    fn is_one_mod(&self, x: usize, m: u32) -> bool;

    fn pow(&self, x: usize, mut e: u64) -> usize {
        let mut acc = self.one();
        let mut base = x;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(base, base);
            }
        }
        acc
    }
}

impl FiniteRing for QuotientRing {
    fn size(&self) -> usize {
        QuotientRing::size(self) as usize
    }
    fn one(&self) -> usize {
        self.idx(1, 0)
    }
    fn mul(&self, x: usize, y: usize) -> usize {
        self.mul_idx(x, y)
    }
    fn is_unit(&self, x: usize) -> bool {
        self.is_unit_idx(x)
    }
    fn prime(&self) -> u64 {
        self.ext().p
    }
    fn level(&self) -> u32 {
        QuotientRing::level(self)
    }
    fn is_one_mod(&self, x: usize, m: u32) -> bool {
        self.is_one_mod_idx(x, m)
    }
}

/// `Z / p^k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct IntegerResidueRing {
    pub p: u64,
    pub k: u32,
    modulus: u64,
}

impl IntegerResidueRing {
    pub fn new(p: u64, k: u32, budget: u64) -> Result<Self> {
        if !crate::arith::is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let modulus = p.checked_pow(k).ok_or_else(|| Error::invalid("modulus overflows"))?;
        if modulus > budget {
            return Err(Error::Capacity { required: modulus, budget });
        }
        if modulus > u32::MAX as u64 {
            return Err(Error::Capacity { required: modulus, budget: u32::MAX as u64 });
        }
        Ok(IntegerResidueRing { p, k, modulus })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }
}

impl FiniteRing for IntegerResidueRing {
    fn size(&self) -> usize {
        self.modulus as usize
    }
    fn one(&self) -> usize {
        (1 % self.modulus) as usize
    }
    fn mul(&self, x: usize, y: usize) -> usize {
        ((x as u64 * y as u64) % self.modulus) as usize
    }
    fn is_unit(&self, x: usize) -> bool {
        !(x as u64).is_multiple_of(self.p)
    }
    fn prime(&self) -> u64 {
        self.p
    }
    fn level(&self) -> u32 {
        self.k
    }
    fn is_one_mod(&self, x: usize, m: u32) -> bool {
        let q = self.p.pow(m);
        (x as u64 + q - 1).is_multiple_of(q)
    }
}

const NONE: u32 = u32::MAX;

/// `R^×` as `Z/d_1 × ... × Z/d_k` with `d_1 | d_2 | ... | d_k`, together with
/// the coordinates of every unit.
#[derive(Debug, Clone)]
pub struct UnitGroup {
    factors: Vec<u64>,
    generators: Vec<usize>,
    /// Ring index -> packed coordinates (mixed radix, first coordinate most
    /// significant), or `NONE` for non-units.
    packed: Vec<u32>,
    /// Packed coordinates -> ring index.
    elements: Vec<u32>,
    /// `t_k = #{x : x^(p^k) = 1}` for `k = 0, 1, ...` until it stabilizes.
    torsion_counts: Vec<u64>,
}

/// Exponents of a finite abelian `p`-group from its torsion counts.
pub fn p_group_from_torsion(p: u64, counts: &[u64]) -> Result<Vec<u32>> {
    // r_k = log_p(t_k / t_{k-1}) is the number of cyclic factors of order >= p^k.
    let mut ranks = Vec::new();
    for w in counts.windows(2) {
        if w[1] % w[0] != 0 {
            return Err(Error::internal("torsion counts do not divide"));
        }
        let mut q = w[1] / w[0];
        let mut r = 0u32;
        while q > 1 {
            if q % p != 0 {
                return Err(Error::internal("torsion ratio is not a power of p"));
            }
            q /= p;
            r += 1;
        }
        ranks.push(r);
    }
    let r1 = ranks.first().copied().unwrap_or(0);
    let mut exps = Vec::new();
    for i in 0..r1 {
        exps.push(ranks.iter().filter(|&&r| r > i).count() as u32);
    }
    exps.sort_unstable();
    Ok(exps)
}

impl UnitGroup {
    pub fn compute<R: FiniteRing>(ring: &R) -> Result<Self> {
        let size = ring.size();
        let p = ring.prime();
        let one = ring.one();
        let units: Vec<u32> = (0..size).into_par_iter().filter(|&x| ring.is_unit(x)).map(|x| x as u32).collect();
        let order = units.len() as u64;

        // p-power level of each unit: least j with x^(p^j) = 1.
        let mut kmax = 0u32;
        while p.pow(kmax) < order {
            kmax += 1;
        }
        let levels: Vec<u8> = units
            .par_iter()
            .map(|&x| {
                let mut y = x as usize;
                for j in 0..=kmax {
                    if y == one {
                        return j as u8;
                    }
                    y = ring.pow(y, p);
                }
                u8::MAX
            })
            .collect();
        let mut torsion_counts = Vec::new();
        for k in 0..=kmax {
            let t = levels.iter().filter(|&&l| (l as u32) <= k).count() as u64;
            torsion_counts.push(t);
            if k > 0 && t == torsion_counts[k as usize - 1] {
                break;
            }
        }
        let p_order = *torsion_counts.last().unwrap();
        let p_exps = p_group_from_torsion(p, &torsion_counts)?;
        if !order.is_multiple_of(p_order) || (order / p_order).is_multiple_of(p) {
            return Err(Error::internal("p-part does not split off"));
        }
        let tame = order / p_order;

        // Generator of the prime-to-p part.
        let tame_primes: Vec<u64> = if tame > 1 { factorize(tame)?.iter().map(|f| f.0).collect() } else { vec![] };
        let zeta = units
            .iter()
            .map(|&x| ring.pow(x as usize, p_order))
            .find(|&y| tame_primes.iter().all(|&l| ring.pow(y, tame / l) != one))
            .ok_or_else(|| Error::internal("prime-to-p part is not cyclic"))?;

        // Greedy basis of the p-part: repeatedly adjoin an element of largest
        // order modulo the subgroup built so far, corrected to have exactly
        // that order.
        let p_elems: Vec<usize> = units
            .iter()
            .zip(&levels)
            .filter(|(_, &l)| l != u8::MAX)
            .map(|(&x, _)| x as usize)
            .collect();
        let mut h_packed = vec![NONE; size];
        h_packed[one] = 0;
        let mut h_list = vec![one];
        let mut basis: Vec<(usize, u64)> = Vec::new();
        while (h_list.len() as u64) < p_order {
            let quotient_level = |x: usize| {
                let mut y = x;
                let mut j = 0u32;
                while h_packed[y] == NONE {
                    y = ring.pow(y, p);
                    j += 1;
                }
                (j, y)
            };
            let (best, (j, y)) = p_elems
                .par_iter()
                .map(|&x| (x, quotient_level(x)))
                .reduce_with(|a, b| if b.1 .0 > a.1 .0 || (b.1 .0 == a.1 .0 && b.0 < a.0) { b } else { a })
                .expect("nonempty");
            let m = p.pow(j);
            let coords = unpack(h_packed[y], &basis.iter().map(|b| b.1).collect::<Vec<_>>());
            let mut g = best;
            for (&(gi, oi), &ci) in basis.iter().zip(&coords) {
                if ci % m != 0 {
                    return Err(Error::internal("greedy p-basis: coordinates not divisible"));
                }
                let back = (oi - (ci / m) % oi) % oi;
                g = ring.mul(g, ring.pow(gi, back));
            }
            if ring.pow(g, m) != one || (m > 1 && ring.pow(g, m / p) == one) {
                return Err(Error::internal("greedy p-basis: corrected element has wrong order"));
            }
            let mut next = Vec::with_capacity(h_list.len() * m as usize);
            let mut gk = one;
            for k in 0..m {
                for &h in &h_list {
                    let e = ring.mul(h, gk);
                    if k > 0 {
                        if h_packed[e] != NONE {
                            return Err(Error::internal("greedy p-basis: collision"));
                        }
                        h_packed[e] = h_packed[h] * m as u32 + k as u32;
                    }
                    next.push(e);
                }
                gk = ring.mul(gk, g);
            }
            for &h in &h_list {
                h_packed[h] *= m as u32;
            }
            h_list = next;
            basis.push((g, m));
        }
        let mut orders: Vec<u64> = basis.iter().map(|b| b.1).collect();
        {
            let mut got: Vec<u32> = orders.iter().map(|&o| log_p(o, p)).collect();
            got.sort_unstable();
            if got != p_exps {
                return Err(Error::internal(format!(
                    "greedy basis orders {orders:?} disagree with torsion counts {torsion_counts:?}"
                )));
            }
        }

        // Invariant-factor form: smallest p-factors first, tame part merged
        // into the largest.
        basis.reverse();
        orders.reverse();
        let r = basis.len();
        let mut factors: Vec<u64> = orders.clone();
        let mut generators: Vec<usize> = basis.iter().map(|b| b.0).collect();
        if r == 0 {
            if tame > 1 {
                factors.push(tame);
                generators.push(zeta);
            }
        } else {
            factors[r - 1] *= tame;
            generators[r - 1] = ring.mul(generators[r - 1], zeta);
        }
        let group_order: u64 = factors.iter().product();
        if group_order != order {
            return Err(Error::internal("factor product differs from unit count"));
        }

        // Coordinates. h_packed holds p-coordinates with the first greedy
        // generator (now last) most significant.
        let p_orders_greedy: Vec<u64> = orders.iter().rev().copied().collect();
        let mut packed = vec![NONE; size];
        let mut elements = vec![NONE; order as usize];
        let o_top = *p_orders_greedy.first().unwrap_or(&1);
        let crt_a = if tame > 1 && o_top > 1 {
            // t ≡ a mod tame, t ≡ c mod o_top
            let inv = crate::quadring::inv_mod(o_top as i64, tame).expect("coprime");
            (o_top * inv) % (tame * o_top)
        } else {
            1
        };
        let crt_c = if tame > 1 && o_top > 1 {
            let inv = crate::quadring::inv_mod(tame as i64, o_top).expect("coprime");
            (tame * inv) % (tame * o_top)
        } else {
            1
        };
        let top = o_top * tame;
        let mut z = one;
        for a in 0..tame {
            for &h in &h_list {
                let c = unpack(h_packed[h], &p_orders_greedy);
                let t = if r == 0 {
                    a
                } else if tame == 1 {
                    c[0]
                } else {
                    (a * crt_a + c[0] * crt_c) % top
                };
                // Invariant-factor coordinates: (c_r, ..., c_2, t).
                let mut code: u64 = 0;
                for i in (1..r).rev() {
                    code = code * p_orders_greedy[i] + c[i];
                }
                code = code * top.max(1) + t;
                let x = ring.mul(h, z);
                if packed[x] != NONE {
                    return Err(Error::internal("coordinate collision"));
                }
                packed[x] = code as u32;
                elements[code as usize] = x as u32;
            }
            z = ring.mul(z, zeta);
        }
        if elements.contains(&NONE) {
            return Err(Error::internal("coordinates do not cover the group"));
        }
        Ok(UnitGroup { factors, generators, packed, elements, torsion_counts })
    }

    pub fn invariant_factors(&self) -> &[u64] {
        &self.factors
    }

    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn order(&self) -> u64 {
        self.elements.len() as u64
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    /// Least common multiple of the factors (the largest one).
    pub fn exponent(&self) -> u64 {
        self.factors.last().copied().unwrap_or(1)
    }

    pub fn torsion_counts(&self) -> &[u64] {
        &self.torsion_counts
    }

    /// Packed coordinates of a unit, or `None` for non-units.
    #[inline]
    pub fn packed_of(&self, x: usize) -> Option<u32> {
        self.packed.get(x).copied().filter(|&c| c != NONE)
    }

    #[inline]
    pub fn element_at(&self, packed: u32) -> usize {
        self.elements[packed as usize] as usize
    }

    /// Units in canonical ring order.
    pub fn units(&self) -> impl Iterator<Item = usize> + '_ {
        self.packed.iter().enumerate().filter(|(_, &c)| c != NONE).map(|(i, _)| i)
    }

    pub fn coords_of(&self, x: usize) -> Option<Vec<u64>> {
        self.packed_of(x).map(|c| unpack(c, &self.factors))
    }

    pub fn pack(&self, coords: &[u64]) -> u32 {
        pack(coords, &self.factors)
    }

    pub fn unpack(&self, packed: u32) -> Vec<u64> {
        unpack(packed, &self.factors)
    }
}

fn log_p(mut o: u64, p: u64) -> u32 {
    let mut k = 0;
    while o > 1 {
        o /= p;
        k += 1;
    }
    k
}

pub fn unpack(mut code: u32, radices: &[u64]) -> Vec<u64> {
    let mut out = vec![0u64; radices.len()];
    for i in (0..radices.len()).rev() {
        out[i] = code as u64 % radices[i];
        code = (code as u64 / radices[i]) as u32;
    }
    out
}

pub fn pack(coords: &[u64], radices: &[u64]) -> u32 {
    let mut code = 0u64;
    for (c, r) in coords.iter().zip(radices) {
        code = code * r + c % r;
    }
    code as u32
}

/// Sum of two packed coordinate vectors.
#[inline]
pub fn add_packed(mut x: u32, mut y: u32, radices: &[u64]) -> u32 {
    let mut out = 0u64;
    let mut scale = 1u64;
    for &r in radices.iter().rev() {
        let (xr, yr) = (x as u64 % r, y as u64 % r);
        out += ((xr + yr) % r) * scale;
        scale *= r;
        x = (x as u64 / r) as u32;
        y = (y as u64 / r) as u32;
    }
    out as u32
}

/// Order of `x` in `Z/d_1 × ... × Z/d_k`.
pub fn vector_order(coords: &[u64], factors: &[u64]) -> u64 {
    use num_integer::Integer;
    coords
        .iter()
        .zip(factors)
        .fold(1u64, |acc, (&c, &d)| acc.lcm(&(d / c.gcd(&d))))
}

/// A greedily chosen generating set of a subgroup.
#[derive(Debug, Clone)]
pub struct SubgroupSpan {
    /// Positions (in the input sequence) of the chosen generators.
    pub chosen: Vec<usize>,
    pub generators: Vec<Vec<u64>>,
    pub size: u64,
}

/// Greedy generating set of the subgroup spanned by `members` (given by
/// packed coordinates), stopping once `target_size` elements are covered.
pub fn subgroup_generators(
    factors: &[u64],
    members: impl IntoIterator<Item = u32>,
    target_size: u64,
) -> SubgroupSpan {
    let total: u64 = factors.iter().product();
    let mut in_h = vec![false; total as usize];
    in_h[0] = true;
    let mut h: Vec<u32> = vec![0];
    let mut span = SubgroupSpan { chosen: Vec::new(), generators: Vec::new(), size: 1 };
    for (pos, v) in members.into_iter().enumerate() {
        if h.len() as u64 >= target_size {
            break;
        }
        if in_h[v as usize] {
            continue;
        }
        span.chosen.push(pos);
        span.generators.push(unpack(v, factors));
        let base = h.clone();
        let mut shift = v;
        while !in_h[shift as usize] {
            for &x in &base {
                let y = add_packed(x, shift, factors);
                in_h[y as usize] = true;
                h.push(y);
            }
            shift = add_packed(shift, v, factors);
        }
    }
    span.size = h.len() as u64;
    span
}

/// Order of `x` in the ring's unit group by repeated multiplication.
pub fn element_order<R: FiniteRing>(ring: &R, x: usize, group_order: u64) -> Option<u64> {
    if !ring.is_unit(x) {
        return None;
    }
    let mut ord = group_order;
    for (q, _) in factorize(group_order).ok()? {
        while ord.is_multiple_of(q) && ring.pow(x, ord / q) == ring.one() {
            ord /= q;
        }
    }
    Some(ord)
}
