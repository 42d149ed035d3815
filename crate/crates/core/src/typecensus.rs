//! Galois orbits of inertial types of conductor `p^n` with trivial
//! nebentypus: closed forms and brute-force enumeration.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::arith::{is_prime, sigma0};
use crate::discrepancy::{lookup, Quantity};
use crate::charenum::{CharOrbit, IntegerCharacters, LocalCharacters};
use crate::error::{Error, Result};
use crate::quadring::QuadExt;

/// Curve tag of a sporadic (projectively `S_4`) type at `p = 2`: family 1 is
/// `r y^2 = x^3 + 3x + 2`, family 2 is `r y^2 = x^3 - 3x + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SporadicTag {
    pub family: u8,
    pub r: i8,
}

impl fmt::Display for SporadicTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "E{}({:+})", self.family, self.r)
    }
}

impl Serialize for SporadicTag {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Levels of the sporadic types. The level-6 pair is tagged `E2(±2)`: the
/// source assigns "E2 with r = ±1" there although those two curves already sit
/// at levels 3 and 4.
pub const SPORADIC_TABLE: [(u32, SporadicTag); 8] = [
    (3, SporadicTag { family: 2, r: -1 }),
    (4, SporadicTag { family: 2, r: 1 }),
    (6, SporadicTag { family: 2, r: 2 }),
    (6, SporadicTag { family: 2, r: -2 }),
    (7, SporadicTag { family: 1, r: 1 }),
    (7, SporadicTag { family: 1, r: -1 }),
    (7, SporadicTag { family: 1, r: 2 }),
    (7, SporadicTag { family: 1, r: -2 }),
];

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TypeKind {
    /// Level 0: the unramified type.
    Unramified,
    /// `π(χ, χ^{-1})` on inertia, from a primitive `χ` of `(Z/p^{n/2})^×`.
    PrincipalSeries { chi: CharOrbit },
    /// `St ⊗ χ`; `chi = None` is the untwisted Steinberg type.
    SteinbergTwist { chi: Option<CharOrbit> },
    /// Induced from `θ` on a quadratic extension.
    Supercuspidal { field: QuadExt, theta: CharOrbit },
    Sporadic { tag: SporadicTag },
}

impl TypeKind {
    pub fn label(&self) -> &'static str {
        match self {
            TypeKind::Unramified => "unramified",
            TypeKind::PrincipalSeries { .. } => "principal_series",
            TypeKind::SteinbergTwist { .. } => "steinberg",
            TypeKind::Supercuspidal { field, .. } if field.is_ramified() => "supercuspidal_ramified",
            TypeKind::Supercuspidal { .. } => "supercuspidal_unramified",
            TypeKind::Sporadic { .. } => "sporadic",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TypeOrbit {
    pub p: u64,
    pub level: u32,
    #[serde(flatten)]
    pub kind: TypeKind,
    /// Whether the type is its own minimal quadratic twist.
    pub minimal: bool,
    #[serde(serialize_with = "serialize_parent")]
    pub minimal_parent: Option<Box<TypeOrbit>>,
}

#[derive(Serialize)]
struct ParentRef<'a> {
    level: u32,
    kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    field: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    tag: Option<&'a SporadicTag>,
}

fn serialize_parent<S: Serializer>(parent: &Option<Box<TypeOrbit>>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match parent {
        None => s.serialize_none(),
        Some(t) => {
            let (field, tag) = match &t.kind {
                TypeKind::Supercuspidal { field, .. } => (Some(field.label()), None),
                TypeKind::Sporadic { tag } => (None, Some(tag)),
                _ => (None, None),
            };
            ParentRef { level: t.level, kind: t.kind.label(), field, tag }.serialize(s)
        }
    }
}

impl TypeOrbit {
    fn new(p: u64, level: u32, kind: TypeKind) -> Self {
        TypeOrbit { p, level, kind, minimal: true, minimal_parent: None }
    }

    fn with_parent(mut self, parent: TypeOrbit) -> Self {
        self.minimal = false;
        self.minimal_parent = Some(Box::new(parent));
        self
    }
}

/// Which data a type level is computed from.
#[derive(Debug, Clone, Copy)]
pub enum LevelData<'a> {
    PrincipalSeries { cond_chi: u32 },
    SteinbergTwist { cond_chi: u32 },
    Supercuspidal { field: &'a QuadExt, cond_theta: u32 },
}

/// Conductor exponent of a type.
pub fn level_of(data: LevelData<'_>) -> Result<u32> {
    match data {
        LevelData::PrincipalSeries { cond_chi } => Ok(2 * cond_chi),
        LevelData::SteinbergTwist { cond_chi: 0 } => Ok(1),
        LevelData::SteinbergTwist { cond_chi } => Ok(2 * cond_chi),
        LevelData::Supercuspidal { field, cond_theta } => {
            if field.is_ramified() {
                Ok(cond_theta + field.cond_eps)
            } else {
                Ok(2 * cond_theta)
            }
        }
    }
}

/// Per-kind counts of type orbits. `scr` counts all ramified supercuspidals;
/// for `p = 2` it splits into `scr_delta2 + scr_delta3` by discriminant.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct LtBreakdown {
    pub unramified: u64,
    pub ps: u64,
    pub st: u64,
    pub scu: u64,
    pub scr: u64,
    pub scr_delta2: u64,
    pub scr_delta3: u64,
    pub sporadic: u64,
}

impl LtBreakdown {
    pub fn total(&self) -> u64 {
        self.unramified + self.ps + self.st + self.scu + self.scr + self.sporadic
    }

    pub fn of_types(types: &[TypeOrbit]) -> Self {
        let mut b = LtBreakdown::default();
        for t in types {
            match &t.kind {
                TypeKind::Unramified => b.unramified += 1,
                TypeKind::PrincipalSeries { .. } => b.ps += 1,
                TypeKind::SteinbergTwist { .. } => b.st += 1,
                TypeKind::Supercuspidal { field, .. } if !field.is_ramified() => b.scu += 1,
                TypeKind::Supercuspidal { field, .. } => {
                    b.scr += 1;
                    if field.p == 2 {
                        if field.delta == 2 {
                            b.scr_delta2 += 1;
                        } else {
                            b.scr_delta3 += 1;
                        }
                    }
                }
                TypeKind::Sporadic { .. } => b.sporadic += 1,
            }
        }
        b
    }
}

/// Closed-form type counts for conductor `p^n`.
pub fn lt_closed_form(p: u64, n: u32) -> Result<LtBreakdown> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let mut b = LtBreakdown::default();
    if n == 0 {
        b.unramified = 1;
        return Ok(b);
    }
    if p != 2 {
        let (sm, sp) = (sigma0(p - 1)?, sigma0(p + 1)?);
        match n {
            1 => b.st = 1,
            2 => {
                b.ps = sm - 1;
                b.st = 1;
                b.scu = sp - 2;
            }
            _ if n % 2 == 1 => b.scr = if p == 3 { 4 } else { 2 },
            _ => {
                b.ps = sm;
                b.scu = sp;
            }
        }
        return Ok(b);
    }
    // (ps, st, scu, scr δ=2, scr δ=3, sporadic)
    let row: [u64; 6] = match n {
        1 => [0, 1, 0, 0, 0, 0],
        2 => [0, 0, 1, 0, 0, 0],
        3 => [0, 0, 0, 0, 0, 1],
        4 => [1, 1, 1, 0, 0, 1],
        5 => [0, 0, 0, 2, 0, 0],
        6 => [2, 2, 2, 2, 0, 2],
        7 => [0, 0, 0, 0, 0, 4],
        8 => [2, 0, 4, 4, 0, 0],
        _ if n % 2 == 1 => [0, 0, 0, 0, 4, 0],
        _ => [2, 0, 4, 4, 0, 0],
    };
    b.ps = row[0];
    b.st = row[1];
    b.scu = row[2];
    b.scr_delta2 = row[3];
    b.scr_delta3 = row[4];
    b.scr = row[3] + row[4];
    b.sporadic = row[5];
    Ok(b)
}

/// Why a supercuspidal orbit was left out of the census.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExclusionRule {
    /// `p ≡ 3 mod 4`, ramified `E`, `cond(θ) = 1`: same type as an unramified
    /// supercuspidal.
    RamifiedConductorOneMatchesUnramified,
    /// `p = 2`, discriminant valuation 3, `cond(θ) = 5`, `θ` quadratic: matches
    /// an unramified supercuspidal type.
    Delta3QuadraticMatchesUnramified,
    /// `p = 2`, discriminant valuation 3, `cond(θ) = 5`, `θ` of order 4:
    /// matches a type induced from `Q2(sqrt(3))`.
    Delta3OrderFourMatchesSqrt3,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExcludedOrbit {
    pub field: QuadExt,
    pub theta: CharOrbit,
    pub rule: ExclusionRule,
}

#[derive(Debug, Clone, Serialize)]
pub struct Census {
    pub p: u64,
    pub n: u32,
    pub types: Vec<TypeOrbit>,
    pub excluded: Vec<ExcludedOrbit>,
    /// Supercuspidal orbits that fail to be excluded by any rule but whose
    /// shape the rules expect to be excluded (should stay empty).
    pub unmatched: Vec<ExcludedOrbit>,
}

impl Census {
    pub fn breakdown(&self) -> LtBreakdown {
        LtBreakdown::of_types(&self.types)
    }
}

fn exclusion(field: &QuadExt, cond_theta: u32, order: u64) -> Option<ExclusionRule> {
    let p = field.p;
    if p != 2 && field.is_ramified() && p % 4 == 3 && cond_theta == 1 {
        return Some(ExclusionRule::RamifiedConductorOneMatchesUnramified);
    }
    if p == 2 && field.delta == 3 && cond_theta == 5 {
        return match order {
            2 => Some(ExclusionRule::Delta3QuadraticMatchesUnramified),
            4 => Some(ExclusionRule::Delta3OrderFourMatchesSqrt3),
            _ => None,
        };
    }
    None
}

/// Supercuspidal θ-orbits of `E` at conductor `c`: primitive, restricting to
/// `ε_E` on rational units, not factoring through the norm.
pub fn supercuspidal_orbits(field: &QuadExt, c: u32, budget: u64) -> Result<Vec<CharOrbit>> {
    let lc = LocalCharacters::new(field, c, budget)?;
    lc.space
        .primitive_eps_norm_orbits(c, true, crate::charenum::NormTest::Hilbert90, false)
}

fn steinberg(p: u64) -> TypeOrbit {
    TypeOrbit::new(p, 1, TypeKind::SteinbergTwist { chi: None })
}

fn unramified(p: u64) -> TypeOrbit {
    TypeOrbit::new(p, 0, TypeKind::Unramified)
}

fn sporadic(level: u32, tag: SporadicTag) -> TypeOrbit {
    let t = TypeOrbit::new(2, level, TypeKind::Sporadic { tag });
    if level == 3 {
        t
    } else if level == 4 || level == 6 {
        t.with_parent(sporadic(3, SPORADIC_TABLE[0].1))
    } else {
        t
    }
}

/// Complete type census at conductor `p^n`, with the orbits removed by the
/// matching rules.
pub fn census(p: u64, n: u32, budget: u64) -> Result<Census> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let mut types = Vec::new();
    let mut excluded = Vec::new();
    let mut unmatched = Vec::new();
    if n == 0 {
        types.push(unramified(p));
        return Ok(Census { p, n, types, excluded, unmatched });
    }

    if n.is_multiple_of(2) {
        let d = n / 2;
        let ic = IntegerCharacters::new(p, d, budget)?;
        for chi in ic.primitive_orbits()? {
            let t = TypeOrbit::new(p, level_of(LevelData::PrincipalSeries { cond_chi: chi.conductor })?, TypeKind::PrincipalSeries { chi: chi.clone() });
            // A quadratic χ makes π(χ, χ) a twist of the unramified type.
            types.push(if chi.order == 2 { t.with_parent(unramified(p)) } else { t });
        }
    }

    if n == 1 {
        types.push(steinberg(p));
    } else if n.is_multiple_of(2) {
        let d = n / 2;
        let ic = IntegerCharacters::new(p, d, budget)?;
        for chi in ic.space.orbits(false, |_, cond| cond == d)? {
            if chi.order != 2 {
                continue;
            }
            let level = level_of(LevelData::SteinbergTwist { cond_chi: chi.conductor })?;
            types.push(TypeOrbit::new(p, level, TypeKind::SteinbergTwist { chi: Some(chi) }).with_parent(steinberg(p)));
        }
    }

    for field in QuadExt::all(p)? {
        let c = if field.is_ramified() {
            match n.checked_sub(field.cond_eps) {
                Some(c) if c >= 1 => c,
                _ => continue,
            }
        } else if n.is_multiple_of(2) {
            n / 2
        } else {
            continue;
        };
        let parent = if p == 2 && field.delta == 2 && c == 4 {
            let parents = supercuspidal_orbits(&field, 3, budget)?;
            if parents.len() != 1 {
                return Err(Error::internal(format!(
                    "{field}: expected one conductor-3 orbit, found {}",
                    parents.len()
                )));
            }
            let theta = parents.into_iter().next().unwrap();
            Some(TypeOrbit::new(p, level_of(LevelData::Supercuspidal { field: &field, cond_theta: 3 })?, TypeKind::Supercuspidal { field, theta }))
        } else {
            None
        };
        for theta in supercuspidal_orbits(&field, c, budget)? {
            if let Some(rule) = exclusion(&field, c, theta.order) {
                excluded.push(ExcludedOrbit { field, theta, rule });
                continue;
            }
            if p == 2 && field.delta == 3 && c == 5 {
                // Neither quadratic nor of order 4: no rule covers it.
                unmatched.push(ExcludedOrbit { field, theta: theta.clone(), rule: ExclusionRule::Delta3OrderFourMatchesSqrt3 });
            }
            let level = level_of(LevelData::Supercuspidal { field: &field, cond_theta: c })?;
            let t = TypeOrbit::new(p, level, TypeKind::Supercuspidal { field, theta });
            types.push(match &parent {
                Some(par) => t.with_parent(par.clone()),
                None => t,
            });
        }
    }

    if p == 2 {
        for (level, tag) in SPORADIC_TABLE {
            if level == n {
                types.push(sporadic(level, tag));
            }
        }
    }
    Ok(Census { p, n, types, excluded, unmatched })
}

/// The duplicate-free list of type orbits at conductor `p^n`.
pub fn enumerate_types(p: u64, n: u32, budget: u64) -> Result<Vec<TypeOrbit>> {
    Ok(census(p, n, budget)?.types)
}

/// Per-kind comparison of brute-force counts against the closed form.
#[derive(Debug, Clone, Serialize)]
pub struct LtAudit {
    pub p: u64,
    pub n: u32,
    pub closed: LtBreakdown,
    pub brute: LtBreakdown,
    pub matches: bool,
    pub mismatched_kinds: Vec<&'static str>,
    /// Registry id when the mismatch is a documented one.
    pub known_discrepancy: Option<&'static str>,
    pub census: Census,
}

pub fn census_audit_lt(p: u64, n: u32, budget: u64) -> Result<LtAudit> {
    lt_audit_of(census(p, n, budget)?)
}

/// The type-count audit of an already computed census.
pub fn lt_audit_of(census: Census) -> Result<LtAudit> {
    let (p, n) = (census.p, census.n);
    let closed = lt_closed_form(p, n)?;
    let brute = census.breakdown();
    let pairs = [
        ("unramified", closed.unramified, brute.unramified),
        ("ps", closed.ps, brute.ps),
        ("st", closed.st, brute.st),
        ("scu", closed.scu, brute.scu),
        ("scr", closed.scr, brute.scr),
        ("scr_delta2", closed.scr_delta2, brute.scr_delta2),
        ("scr_delta3", closed.scr_delta3, brute.scr_delta3),
        ("sporadic", closed.sporadic, brute.sporadic),
    ];
    let mismatched_kinds: Vec<&'static str> = pairs.iter().filter(|(_, a, b)| a != b).map(|(k, _, _)| *k).collect();
    let matches = mismatched_kinds.is_empty();
    let known_discrepancy = if matches { None } else { lookup(Quantity::Lt, p, n).map(|d| d.id) };
    Ok(LtAudit { p, n, closed, brute, matches, mismatched_kinds, known_discrepancy, census })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_examples() {
        let b = lt_closed_form(7, 4).unwrap();
        assert_eq!((b.ps, b.scu, b.total()), (4, 4, 8));
        assert_eq!(lt_closed_form(2, 7).unwrap().sporadic, 4);
        let b = lt_closed_form(3, 2).unwrap();
        assert_eq!((b.ps, b.st, b.scu, b.total()), (1, 1, 1, 3));
        let b = lt_closed_form(13, 2).unwrap();
        assert_eq!((b.ps, b.scu, b.st, b.total()), (5, 2, 1, 8));
        assert_eq!(lt_closed_form(5, 0).unwrap().total(), 1);
        assert!(lt_closed_form(4, 2).is_err());
    }

    #[test]
    fn levels() {
        assert_eq!(level_of(LevelData::SteinbergTwist { cond_chi: 1 }).unwrap(), 2);
        let u7 = QuadExt::unramified(7).unwrap();
        assert_eq!(level_of(LevelData::Supercuspidal { field: &u7, cond_theta: 2 }).unwrap(), 4);
        let r5 = QuadExt::new(5, 5).unwrap();
        assert_eq!(level_of(LevelData::Supercuspidal { field: &r5, cond_theta: 2 }).unwrap(), 3);
    }

    #[test]
    fn enumeration_examples() {
        assert_eq!(enumerate_types(5, 2, 2_000_000).unwrap().len(), 5);
        let two = census(2, 6, 2_000_000).unwrap().breakdown();
        assert_eq!((two.ps, two.st, two.scu, two.scr_delta2, two.sporadic), (2, 2, 2, 2, 2));
        assert_eq!(census(3, 5, 2_000_000).unwrap().breakdown().scr, 4);
    }
}
