//! Minimal Atkin-Lehner sign multiplicities of type orbits and the count
//! `LO(p^n)` of (type, sign) pairs.

use serde::Serialize;

use crate::arith::{is_prime, sigma0, Sign};
use crate::discrepancy::{lookup, Quantity};
use crate::error::{Error, Result};
use crate::typecensus::{census, Census, LtBreakdown, TypeKind, TypeOrbit};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SignRule {
    /// Quadratic twist of a lower-level minimal type: the parent's signs.
    Inherited,
    Steinberg,
    PrincipalSeries,
    UnramifiedSupercuspidal,
    RamifiedOddEvenConductor,
    Delta2ConductorThree,
    Delta2EvenConductor,
    Delta3EvenConductor,
    Sporadic,
    /// The level-0 type, sign `+1` by convention.
    Unramified,
}

/// The compatible minimal signs of a type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SignSet {
    /// Both `+1` and `-1` occur.
    Both,
    /// One sign, the same for every form with this type, value not pinned.
    Unique,
    Fixed(Sign),
}

impl SignSet {
    pub fn len(&self) -> u8 {
        match self {
            SignSet::Both => 2,
            SignSet::Unique | SignSet::Fixed(_) => 1,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SignedType {
    #[serde(rename = "type")]
    pub type_orbit: TypeOrbit,
    pub sign_multiplicity: u8,
    pub signs: SignSet,
    pub rule: SignRule,
    pub minimality_note: String,
}

fn own_rule(t: &TypeOrbit) -> Result<(SignSet, SignRule)> {
    use SignSet::*;
    Ok(match &t.kind {
        TypeKind::Unramified => (Fixed(Sign::Plus), SignRule::Unramified),
        TypeKind::SteinbergTwist { .. } => (Both, SignRule::Steinberg),
        TypeKind::PrincipalSeries { .. } => (Unique, SignRule::PrincipalSeries),
        TypeKind::Sporadic { .. } if t.level == 3 || t.level == 7 => (Both, SignRule::Sporadic),
        TypeKind::Supercuspidal { field, .. } if !field.is_ramified() => (Unique, SignRule::UnramifiedSupercuspidal),
        TypeKind::Supercuspidal { field, theta } => {
            let c = theta.conductor;
            match (field.p, field.delta) {
                (2, 2) if c == 3 => (Both, SignRule::Delta2ConductorThree),
                (2, 2) if c % 2 == 0 && c >= 6 => (Unique, SignRule::Delta2EvenConductor),
                (2, 3) if c % 2 == 0 => (Both, SignRule::Delta3EvenConductor),
                (p, _) if p != 2 && c % 2 == 0 => (Both, SignRule::RamifiedOddEvenConductor),
                _ => {
                    return Err(Error::Unsupported(format!(
                        "no sign rule for {} with cond(theta) = {c}",
                        field.label()
                    )))
                }
            }
        }
        TypeKind::Sporadic { tag } => {
            return Err(Error::Unsupported(format!("sporadic {tag} at level {} has no own rule", t.level)))
        }
    })
}

/// Sign multiplicity of a type orbit with the rule that decides it.
pub fn sign_multiplicity(t: &TypeOrbit) -> Result<SignedType> {
    let (signs, rule, minimality_note) = match &t.minimal_parent {
        Some(parent) => {
            let inherited = sign_multiplicity(parent)?;
            let note = format!(
                "quadratic twist of the level-{} {} type; minimal signs taken from it ({:?})",
                parent.level,
                parent.kind.label(),
                inherited.rule
            );
            // The literal sign of a twist can differ; the minimal one cannot.
            (inherited.signs, SignRule::Inherited, note)
        }
        None => {
            let (signs, rule) = own_rule(t)?;
            (signs, rule, format!("own minimal type ({rule:?})"))
        }
    };
    Ok(SignedType { type_orbit: t.clone(), sign_multiplicity: signs.len(), signs, rule, minimality_note })
}

/// Closed-form `LO(p^n)`.
pub fn lo_closed_form(p: u64, n: u32) -> Result<u64> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    Ok(match (p, n) {
        (_, 0) => 1,
        (_, 1) => 2,
        (2, _) => match n {
            2 => 1,
            3 => 2,
            4 => 6,
            5 => 4,
            6 => 16,
            _ if n % 2 == 1 => 8,
            _ => 10,
        },
        (3, _) => match n {
            2 => 9,
            _ if n % 2 == 1 => 8,
            _ => 10,
        },
        _ => {
            let s = sigma0(p + 1)? + sigma0(p - 1)?;
            match n {
                2 => s - 1,
                _ if n % 2 == 1 => 4,
                _ => s,
            }
        }
    })
}

/// `LO(p^n)` as the sum of sign multiplicities over the type census.
pub fn lo_derived(p: u64, n: u32, budget: u64) -> Result<(u64, Vec<SignedType>)> {
    lo_of(&census(p, n, budget)?)
}

fn lo_of(c: &Census) -> Result<(u64, Vec<SignedType>)> {
    let signed = c.types.iter().map(sign_multiplicity).collect::<Result<Vec<_>>>()?;
    let total = signed.iter().map(|s| u64::from(s.sign_multiplicity)).sum();
    Ok((total, signed))
}

#[derive(Debug, Clone, Serialize)]
pub struct LoAudit {
    pub p: u64,
    pub n: u32,
    pub lt_breakdown: LtBreakdown,
    pub lo_closed: u64,
    pub lo_derived: u64,
    pub signed_types: Vec<SignedType>,
    pub mismatches: Vec<String>,
    pub mismatch: bool,
    pub known_discrepancy: Option<&'static str>,
}

pub fn census_audit_lo(p: u64, n: u32, budget: u64) -> Result<LoAudit> {
    lo_audit_of(&census(p, n, budget)?)
}

/// The sign-pair audit of an already computed census.
pub fn lo_audit_of(c: &Census) -> Result<LoAudit> {
    let (p, n) = (c.p, c.n);
    let lo_closed = lo_closed_form(p, n)?;
    let (lo_derived, signed_types) = lo_of(c)?;
    let types: Vec<TypeOrbit> = signed_types.iter().map(|s| s.type_orbit.clone()).collect();
    let mismatch = lo_closed != lo_derived;
    let mut mismatches = Vec::new();
    if mismatch {
        mismatches.push(format!("closed form {lo_closed}, derived {lo_derived}"));
    }
    Ok(LoAudit {
        p,
        n,
        lt_breakdown: LtBreakdown::of_types(&types),
        lo_closed,
        lo_derived,
        signed_types,
        mismatches,
        mismatch,
        known_discrepancy: if mismatch { lookup(Quantity::Lo, p, n).map(|d| d.id) } else { None },
    })
}
