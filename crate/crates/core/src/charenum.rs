//! Characters of finite unit groups: conductors, restriction to rational
//! units, factoring through the norm, and Galois orbits.

use std::fmt;

use num_integer::Integer;
use serde::{Serialize, Serializer};

use crate::arith::Sign;
use crate::error::{Error, Result};
use crate::group::{pack, subgroup_generators, unpack, vector_order, FiniteRing, IntegerResidueRing, UnitGroup};
use crate::quadring::{QuadExt, QuotientRing};

/// An element of `Q/Z`, kept as a reduced fraction in `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Qz {
    num: u64,
    den: u64,
}

impl Qz {
    pub fn new(num: u64, den: u64) -> Self {
        assert!(den > 0);
        let num = num % den;
        let g = num.gcd(&den);
        Qz { num: num / g, den: den / g }
    }

    pub fn zero() -> Self {
        Qz { num: 0, den: 1 }
    }

    pub fn half() -> Self {
        Qz { num: 1, den: 2 }
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn from_sign(s: Sign) -> Self {
        if s.is_minus() {
            Self::half()
        } else {
            Self::zero()
        }
    }
}

impl fmt::Display for Qz {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl Serialize for Qz {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A character of `Z/d_1 × ... × Z/d_k`, sending the i-th basis vector to
/// `exps[i] / d_i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Character {
    factors: Vec<u64>,
    exps: Vec<u64>,
}

impl Character {
    pub fn new(factors: &[u64], exps: &[u64]) -> Result<Self> {
        if factors.len() != exps.len() {
            return Err(Error::invalid("exponent vector has the wrong length"));
        }
        if factors.contains(&0) {
            return Err(Error::invalid("zero invariant factor"));
        }
        Ok(Character {
            factors: factors.to_vec(),
            exps: exps.iter().zip(factors).map(|(c, d)| c % d).collect(),
        })
    }

    pub fn trivial(factors: &[u64]) -> Self {
        Character { factors: factors.to_vec(), exps: vec![0; factors.len()] }
    }

    pub fn factors(&self) -> &[u64] {
        &self.factors
    }

    pub fn exps(&self) -> &[u64] {
        &self.exps
    }

    pub fn order(&self) -> u64 {
        vector_order(&self.exps, &self.factors)
    }

    pub fn is_trivial(&self) -> bool {
        self.exps.iter().all(|&c| c == 0)
    }

    /// Value at the group element with the given coordinates.
    pub fn eval(&self, coords: &[u64]) -> Qz {
        let exponent = self.factors.iter().fold(1u64, |a, d| a.lcm(d));
        let mut acc: u128 = 0;
        for ((&c, &x), &d) in self.exps.iter().zip(coords).zip(&self.factors) {
            acc += c as u128 * (x % d) as u128 * (exponent / d) as u128;
        }
        Qz::new((acc % exponent as u128) as u64, exponent)
    }

    pub fn pow(&self, k: u64) -> Self {
        Character {
            factors: self.factors.clone(),
            exps: self.exps.iter().zip(&self.factors).map(|(&c, &d)| ((c as u128 * k as u128) % d as u128) as u64).collect(),
        }
    }
}

/// Which identifications were used to form an orbit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ClosureFlags {
    pub power_maps: bool,
    pub conjugation: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CharOrbit {
    pub representative: Character,
    pub size: u64,
    pub order: u64,
    pub conductor: u32,
    /// `None` when there is no quadratic extension in play.
    pub restriction_matches: Option<bool>,
    pub factors_through_norm: Option<bool>,
    pub closure: ClosureFlags,
}

/// Which definition of "factors through the norm" to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NormTest {
    /// Trivial on the elements `x / σ(x)` of `E^×` (units and a uniformizer).
    Hilbert90,
    /// Trivial on the kernel of the finite-level norm `R^× → (Z/p^⌈n/e⌉)^×`.
    LevelKernel,
}

/// The character group of a unit group together with the test data needed
/// to classify characters.
#[derive(Debug, Clone)]
pub struct CharacterSpace {
    factors: Vec<u64>,
    exponent: u64,
    weights: Vec<u64>,
    level: u32,
    /// `kernel_gens[m]` generates `ker(R^× → (R / m^m)^×)`.
    kernel_gens: Vec<Vec<Vec<u64>>>,
    eps: Option<EpsData>,
}

#[derive(Debug, Clone)]
struct EpsData {
    /// False when `ε_E` on `Z_p^×` does not factor through the rational units
    /// of the ring; then no character restricts to it.
    realizable: bool,
    tests: Vec<(Vec<u64>, Sign)>,
    hilbert90: Vec<Vec<u64>>,
    norm_kernel: Vec<Vec<u64>>,
    /// Coordinates of `σ(g_i)` for each group generator.
    conj: Vec<Vec<u64>>,
    rational_image_size: u64,
}

fn level_kernels<R: FiniteRing>(ring: &R, group: &UnitGroup) -> Vec<Vec<Vec<u64>>> {
    let factors = group.invariant_factors();
    let mut out = Vec::new();
    for m in 0..=ring.level() {
        let members: Vec<u32> = group
            .units()
            .filter(|&x| ring.is_one_mod(x, m))
            .map(|x| group.packed_of(x).expect("unit"))
            .collect();
        let size = members.len() as u64;
        let span = subgroup_generators(factors, members, size);
        debug_assert_eq!(span.size, size);
        out.push(span.generators);
    }
    out
}

impl CharacterSpace {
    fn base<R: FiniteRing>(ring: &R, group: &UnitGroup) -> Self {
        let factors = group.invariant_factors().to_vec();
        let exponent = group.exponent();
        let weights = factors.iter().map(|d| exponent / d).collect();
        CharacterSpace {
            factors,
            exponent,
            weights,
            level: ring.level(),
            kernel_gens: level_kernels(ring, group),
            eps: None,
        }
    }

    /// Characters of `(Z/p^k)^×`.
    pub fn for_integers(ring: &IntegerResidueRing, group: &UnitGroup) -> Self {
        Self::base(ring, group)
    }

    /// Characters of `(O_E / p_E^n)^×`, with the data for the ε-restriction
    /// and norm tests.
    pub fn for_quadratic(ring: &QuotientRing, group: &UnitGroup) -> Result<Self> {
        let mut space = Self::base(ring, group);
        let ext = *ring.ext();
        let p = ext.p;
        let m = ring.rational_modulus();
        let coords = |x: usize| group.coords_of(x).ok_or_else(|| Error::internal("expected a unit"));

        // Generators of the rational unit image, with ε values.
        let rational: Vec<u64> = (1..m.max(2)).filter(|a| a % p != 0).collect();
        let packed: Vec<u32> = rational
            .iter()
            .map(|&a| group.packed_of(ring.idx(a as i64, 0)).expect("rational unit"))
            .collect();
        let span = subgroup_generators(&space.factors, packed, rational.len() as u64);
        let mut tests = Vec::new();
        for (&pos, gen) in span.chosen.iter().zip(&span.generators) {
            tests.push((gen.clone(), ext.eps(rational[pos] as i64)?));
        }
        let m_exp = ring.level().div_ceil(ext.e);
        let realizable = ext.cond_eps <= m_exp;

        // x / σ(x) for generators x of R^×, and π / σ(π).
        let mut hilbert90 = Vec::new();
        let mut conj = Vec::new();
        for &g in group.generators() {
            let s = ring.conj_idx(g);
            let cs = coords(s)?;
            let cg = coords(g)?;
            hilbert90.push(
                cg.iter().zip(&cs).zip(&space.factors).map(|((a, b), d)| (a + d - b) % d).collect::<Vec<_>>(),
            );
            conj.push(cs);
        }
        if ext.is_ramified() {
            let (a, b) = uniformizer_ratio(ring)?;
            hilbert90.push(coords(ring.idx(a, b))?);
        }

        // Literal kernel of the level-n norm.
        let members: Vec<u32> = group
            .units()
            .filter(|&x| {
                let e = ring.from_index(x);
                ring.norm(&e).map(|v| v % m == 1 % m).unwrap_or(false)
            })
            .map(|x| group.packed_of(x).expect("unit"))
            .collect();
        let target = members.len() as u64;
        let norm_kernel = subgroup_generators(&space.factors, members, target).generators;

        space.eps = Some(EpsData {
            realizable,
            tests,
            hilbert90,
            norm_kernel,
            conj,
            rational_image_size: span.size,
        });
        Ok(space)
    }

    pub fn factors(&self) -> &[u64] {
        &self.factors
    }

    pub fn size(&self) -> u64 {
        self.factors.iter().product()
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn has_extension_data(&self) -> bool {
        self.eps.is_some()
    }

    /// Order of the image of the rational units, if this is a quadratic ring.
    pub fn rational_image_size(&self) -> Option<u64> {
        self.eps.as_ref().map(|e| e.rational_image_size)
    }

    pub fn character(&self, packed: u32) -> Character {
        Character { factors: self.factors.clone(), exps: unpack(packed, &self.factors) }
    }

    pub fn pack(&self, chi: &Character) -> u32 {
        pack(chi.exps(), &self.factors)
    }

    #[inline]
    fn value(&self, exps: &[u64], v: &[u64]) -> u64 {
        let mut acc: u128 = 0;
        for i in 0..exps.len() {
            acc += exps[i] as u128 * v[i] as u128 * self.weights[i] as u128;
        }
        (acc % self.exponent as u128) as u64
    }

    fn trivial_on(&self, exps: &[u64], gens: &[Vec<u64>]) -> bool {
        gens.iter().all(|v| self.value(exps, v) == 0)
    }

    fn check(&self, chi: &Character) -> Result<()> {
        if chi.factors() == self.factors.as_slice() {
            Ok(())
        } else {
            Err(Error::invalid("character belongs to a different group"))
        }
    }

    /// Least `m` with the character trivial on `ker(R^× → (R/m^m)^×)`.
    pub fn conductor(&self, chi: &Character) -> Result<u32> {
        self.check(chi)?;
        Ok(self.conductor_exps(chi.exps()))
    }

    fn conductor_exps(&self, exps: &[u64]) -> u32 {
        (0..=self.level)
            .find(|&m| self.trivial_on(exps, &self.kernel_gens[m as usize]))
            .unwrap_or(self.level)
    }

    /// Whether the character agrees with `ε_E` on rational units.
    pub fn restriction_matches_eps(&self, chi: &Character) -> Result<bool> {
        self.check(chi)?;
        let eps = self.eps.as_ref().ok_or_else(|| Error::Unsupported("no quadratic extension".into()))?;
        Ok(self.restriction_exps(eps, chi.exps()))
    }

    fn restriction_exps(&self, eps: &EpsData, exps: &[u64]) -> bool {
        let half = self.exponent / 2;
        eps.realizable
            && eps.tests.iter().all(|(v, s)| {
                let want = if s.is_minus() { half } else { 0 };
                // A nontrivial sign needs an even exponent to be representable.
                (!s.is_minus() || self.exponent.is_multiple_of(2)) && self.value(exps, v) == want
            })
    }

    pub fn factors_through_norm(&self, chi: &Character, test: NormTest) -> Result<bool> {
        self.check(chi)?;
        let eps = self.eps.as_ref().ok_or_else(|| Error::Unsupported("no quadratic extension".into()))?;
        Ok(self.norm_exps(eps, chi.exps(), test))
    }

    fn norm_exps(&self, eps: &EpsData, exps: &[u64], test: NormTest) -> bool {
        match test {
            NormTest::Hilbert90 => self.trivial_on(exps, &eps.hilbert90),
            NormTest::LevelKernel => self.trivial_on(exps, &eps.norm_kernel),
        }
    }

    /// `θ ∘ σ`.
    pub fn conjugate(&self, chi: &Character) -> Result<Character> {
        self.check(chi)?;
        let eps = self.eps.as_ref().ok_or_else(|| Error::Unsupported("no quadratic extension".into()))?;
        Ok(Character { factors: self.factors.clone(), exps: self.conjugate_exps(eps, chi.exps()) })
    }

    fn conjugate_exps(&self, eps: &EpsData, exps: &[u64]) -> Vec<u64> {
        eps.conj
            .iter()
            .zip(&self.weights)
            .map(|(v, &w)| self.value(exps, v) / w)
            .collect()
    }

    /// All members of the orbit of `chi`.
    pub fn orbit_members(&self, chi: &Character, identify_conjugate: bool) -> Result<Vec<Character>> {
        self.check(chi)?;
        let mut seen = std::collections::BTreeSet::new();
        self.for_each_orbit_member(chi.exps(), identify_conjugate, |code| {
            seen.insert(code);
        })?;
        Ok(seen.into_iter().map(|c| self.character(c)).collect())
    }

    fn for_each_orbit_member(&self, exps: &[u64], identify_conjugate: bool, mut visit: impl FnMut(u32)) -> Result<()> {
        let ord = vector_order(exps, &self.factors);
        let mut seeds = vec![exps.to_vec()];
        if identify_conjugate {
            let eps = self.eps.as_ref().ok_or_else(|| Error::Unsupported("no quadratic extension".into()))?;
            seeds.push(self.conjugate_exps(eps, exps));
        }
        for seed in &seeds {
            for k in (1..=ord.max(1)).filter(|k| k.gcd(&ord) == 1) {
                let v: Vec<u64> = seed.iter().zip(&self.factors).map(|(&c, &d)| (c * k) % d).collect();
                visit(pack(&v, &self.factors));
            }
        }
        Ok(())
    }

    /// Partitions the characters accepted by `filter` into orbits. The filter
    /// sees `(exps, conductor)` and must be constant on orbits.
    pub fn orbits(
        &self,
        identify_conjugate: bool,
        mut filter: impl FnMut(&[u64], u32) -> bool,
    ) -> Result<Vec<CharOrbit>> {
        let total = self.size() as usize;
        let mut visited = vec![false; total];
        let mut out = Vec::new();
        let mut exps = vec![0u64; self.factors.len()];
        for code in 0..total {
            if code > 0 {
                // odometer increment, last coordinate fastest
                for i in (0..exps.len()).rev() {
                    exps[i] += 1;
                    if exps[i] < self.factors[i] {
                        break;
                    }
                    exps[i] = 0;
                }
            }
            if visited[code] {
                continue;
            }
            let cond = self.conductor_exps(&exps);
            if !filter(&exps, cond) {
                continue;
            }
            let mut size = 0u64;
            self.for_each_orbit_member(&exps, identify_conjugate, |c| {
                if !visited[c as usize] {
                    visited[c as usize] = true;
                    size += 1;
                }
            })?;
            out.push(self.describe(&exps, cond, size, identify_conjugate));
        }
        Ok(out)
    }

    fn describe(&self, exps: &[u64], conductor: u32, size: u64, identify_conjugate: bool) -> CharOrbit {
        let (restriction_matches, factors_through_norm) = match &self.eps {
            Some(eps) => (
                Some(self.restriction_exps(eps, exps)),
                Some(self.norm_exps(eps, exps, NormTest::Hilbert90)),
            ),
            None => (None, None),
        };
        CharOrbit {
            representative: Character { factors: self.factors.clone(), exps: exps.to_vec() },
            size,
            order: vector_order(exps, &self.factors),
            conductor,
            restriction_matches,
            factors_through_norm,
            closure: ClosureFlags { power_maps: true, conjugation: identify_conjugate },
        }
    }

    /// Orbits of characters with conductor exactly `n` restricting to `ε_E`.
    pub fn primitive_eps_orbits(&self, n: u32, identify_conjugate: bool) -> Result<Vec<CharOrbit>> {
        let eps = self.eps.as_ref().ok_or_else(|| Error::Unsupported("no quadratic extension".into()))?;
        self.orbits(identify_conjugate, |exps, cond| cond == n && self.restriction_exps(eps, exps))
    }

    /// Primitive orbits whose members also satisfy `norm_test` (or fail it,
    /// when `factors` is false).
    pub fn primitive_eps_norm_orbits(
        &self,
        n: u32,
        identify_conjugate: bool,
        norm_test: NormTest,
        factors: bool,
    ) -> Result<Vec<CharOrbit>> {
        let eps = self.eps.as_ref().ok_or_else(|| Error::Unsupported("no quadratic extension".into()))?;
        self.orbits(identify_conjugate, |exps, cond| {
            cond == n && self.restriction_exps(eps, exps) && self.norm_exps(eps, exps, norm_test) == factors
        })
    }
}

/// `π / σ(π)` for the ring's uniformizer, in `(a, b)` coordinates.
fn uniformizer_ratio(ring: &QuotientRing) -> Result<(i64, i64)> {
    let d = ring.ext().d;
    match ring.uniformizer() {
        (0, 1) => Ok((-1, 0)),
        // (1 + √d) / (1 - √d) = (1 + d + 2√d) / (1 - d), with 1 - d = ±2.
        (1, 1) if (1 - d).abs() == 2 => Ok(((1 + d) / (1 - d), 2 / (1 - d))),
        other => Err(Error::internal(format!("no ratio formula for uniformizer {other:?}"))),
    }
}

/// A quotient ring with its unit group and character space.
#[derive(Debug, Clone)]
pub struct LocalCharacters {
    pub ring: QuotientRing,
    pub group: UnitGroup,
    pub space: CharacterSpace,
}

impl LocalCharacters {
    pub fn new(ext: &QuadExt, n: u32, budget: u64) -> Result<Self> {
        let ring = QuotientRing::new(ext, n, budget)?;
        let group = UnitGroup::compute(&ring)?;
        let space = CharacterSpace::for_quadratic(&ring, &group)?;
        Ok(LocalCharacters { ring, group, space })
    }
}

/// `(Z/p^k)^×` with its character space.
#[derive(Debug, Clone)]
pub struct IntegerCharacters {
    pub ring: IntegerResidueRing,
    pub group: UnitGroup,
    pub space: CharacterSpace,
}

impl IntegerCharacters {
    pub fn new(p: u64, k: u32, budget: u64) -> Result<Self> {
        let ring = IntegerResidueRing::new(p, k, budget)?;
        let group = UnitGroup::compute(&ring)?;
        let space = CharacterSpace::for_integers(&ring, &group);
        Ok(IntegerCharacters { ring, group, space })
    }

    /// Orbits of primitive characters (conductor exactly `k`).
    pub fn primitive_orbits(&self) -> Result<Vec<CharOrbit>> {
        let k = self.ring.k;
        self.space.orbits(false, |_, cond| cond == k)
    }
}

/// Number of Galois orbits of characters of conductor exactly `n` whose
/// restriction to rational units is `ε_E`. Level 0 counts the trivial
/// character when `ε_E` is unramified.
pub fn count_primitive_orbits(ext: &QuadExt, n: u32, identify_conjugate: bool, budget: u64) -> Result<usize> {
    if n == 0 {
        return Ok(usize::from(!ext.is_ramified()));
    }
    let lc = LocalCharacters::new(ext, n, budget)?;
    Ok(lc.space.primitive_eps_orbits(n, identify_conjugate)?.len())
}

/// A closed-form count of primitive ε-restricted orbits and the row it
/// comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PrimitiveRow {
    pub row: &'static str,
    pub count: u64,
}

/// Closed-form primitive orbit count for `E` at conductor `n`, or `None`
/// when no row covers `(E, n)`.
pub fn predicted_primitive_orbits(ext: &QuadExt, n: u32) -> Result<Option<PrimitiveRow>> {
    let row = |row, count| Ok(Some(PrimitiveRow { row, count }));
    let even = n.is_multiple_of(2);
    if n == 0 {
        return Ok(None);
    }
    if !ext.is_ramified() {
        return if ext.p != 2 {
            row("unramified-odd", crate::arith::sigma0(ext.p + 1)?)
        } else {
            match n {
                1 => row("unramified-two-low", 1),
                2 => row("unramified-two-low", 2),
                _ => row("unramified-two", 4),
            }
        };
    }
    if ext.p != 2 {
        return match n {
            1 => row("ramified-odd-n1", 1),
            _ if ext.is_q3_sqrt_minus3() && n == 2 => row("q3-sqrt-3-n2", 1),
            _ if ext.is_q3_sqrt_minus3() => row("q3-sqrt-3", if even { 3 } else { 0 }),
            _ => row("ramified-odd", u64::from(even)),
        };
    }
    match (ext.delta, n) {
        (2, 3 | 4) => row("delta2-n34", 1),
        (2, 6..) => row("delta2", if even { 2 } else { 0 }),
        (3, 5) => row("delta3-n5", 3),
        (3, 6..) => row("delta3", u64::from(even)),
        _ => Ok(None),
    }
}

/// A norm-factoring orbit predicted in closed form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct NormOrbitSpec {
    pub conductor: u32,
    /// Required character order, when the prediction pins it.
    pub order: Option<u64>,
    pub item: &'static str,
}

/// All ε-restricted orbits of characters of `E^×` that factor through the
/// norm, listed by conductor. The trivial character restricts to `ε_E` only
/// when `E` is unramified, so that entry applies to unramified `E` alone.
pub fn predicted_norm_factoring(ext: &QuadExt) -> Vec<NormOrbitSpec> {
    let spec = |conductor, order, item| NormOrbitSpec { conductor, order, item };
    let mut out = Vec::new();
    if !ext.is_ramified() {
        out.push(spec(0, Some(1), "trivial"));
        if ext.p != 2 {
            out.push(spec(1, None, "unramified-odd"));
        } else {
            out.push(spec(2, None, "unramified-two"));
            out.push(spec(3, None, "unramified-two"));
            out.push(spec(3, None, "unramified-two"));
        }
    } else if ext.p != 2 {
        if ext.p % 4 == 1 {
            out.push(spec(1, None, "ramified-1-mod-4"));
        }
    } else if ext.delta == 3 && (ext.d == 2 || ext.d == -6) {
        out.push(spec(5, Some(2), "delta3-quadratic"));
        out.push(spec(5, Some(2), "delta3-quadratic"));
    }
    out
}

/// Norm-factoring ε-restricted orbits of `E` with conductor at most `nmax`.
pub fn norm_factoring_orbits(
    ext: &QuadExt,
    nmax: u32,
    identify_conjugate: bool,
    test: NormTest,
    budget: u64,
) -> Result<Vec<CharOrbit>> {
    let mut out = Vec::new();
    for c in 1..=nmax {
        let lc = LocalCharacters::new(ext, c, budget)?;
        out.extend(lc.space.primitive_eps_norm_orbits(c, identify_conjugate, test, true)?);
    }
    Ok(out)
}

/// Compares observed `(conductor, order)` pairs against a prediction,
/// including the conductor-0 trivial character when `E` is unramified.
pub fn norm_lists_match(ext: &QuadExt, predicted: &[NormOrbitSpec], observed: &[CharOrbit], nmax: u32) -> bool {
    let mut seen: Vec<(u32, u64)> = observed.iter().map(|o| (o.conductor, o.order)).collect();
    if !ext.is_ramified() {
        seen.push((0, 1));
    }
    seen.sort_unstable();
    let mut want: Vec<&NormOrbitSpec> = predicted.iter().filter(|s| s.conductor <= nmax).collect();
    want.sort_by_key(|s| s.conductor);
    if want.len() != seen.len() {
        return false;
    }
    let mut used = vec![false; seen.len()];
    want.iter().all(|w| {
        let hit = seen.iter().enumerate().position(|(i, &(c, o))| !used[i] && c == w.conductor && w.order.is_none_or(|x| x == o));
        match hit {
            Some(i) => {
                used[i] = true;
                true
            }
            None => false,
        }
    })
}
