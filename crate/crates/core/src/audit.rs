//! Grid audit: every closed form checked against brute force over a range
//! of primes and levels.

use rayon::prelude::*;
use serde::Serialize;

use crate::charenum::{
    norm_lists_match, predicted_norm_factoring, predicted_primitive_orbits, CharOrbit, LocalCharacters, NormOrbitSpec,
    NormTest, PrimitiveRow,
};
use crate::discrepancy::{lookup, Quantity};
use crate::error::{Error, Result};
use crate::group::UnitGroup;
use crate::quadring::{check_listed_generators, predicted_structure, GeneratorCheck, QuadExt, QuotientRing, StructureRule};
use crate::signcensus::{lo_audit_of, lo_closed_form};
use crate::typecensus::{census, lt_audit_of, lt_closed_form, LtBreakdown};

#[derive(Debug, Clone, Serialize)]
pub struct AuditConfig {
    pub primes: Vec<u64>,
    pub nmax_odd: u32,
    pub nmax_two: u32,
    /// Ring-size cap for the unit-group structure rows.
    pub structure_budget: u64,
    /// Ring-size cap for character and type enumeration.
    pub census_budget: u64,
}

impl Default for AuditConfig {
    fn default() -> Self {
        AuditConfig {
            primes: vec![2, 3, 5, 7, 13],
            nmax_odd: 6,
            nmax_two: 9,
            structure_budget: 2_000_000,
            census_budget: 5_000_000,
        }
    }
}

impl AuditConfig {
    pub fn nmax(&self, p: u64) -> u32 {
        if p == 2 {
            self.nmax_two
        } else {
            self.nmax_odd
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StructureRow {
    pub field: String,
    pub n: u32,
    pub ring_size: u64,
    pub brute: Vec<u64>,
    pub predicted: Vec<u64>,
    pub rule: StructureRule,
    pub matches: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct GeneratorRow {
    pub field: String,
    pub n: u32,
    pub check: GeneratorCheck,
}

#[derive(Debug, Clone, Serialize)]
pub struct PrimitiveAuditRow {
    pub field: String,
    pub n: u32,
    pub predicted: Option<PrimitiveRow>,
    /// Orbits under power maps.
    pub brute_power_maps: Option<u64>,
    /// Orbits under power maps and Galois conjugation.
    pub brute_with_conjugation: Option<u64>,
    /// `identify_conjugate` settings that reproduce the prediction.
    pub matching_settings: Vec<bool>,
    pub skipped: Option<String>,
    pub known_discrepancy: Option<&'static str>,
}

#[derive(Debug, Clone, Serialize)]
pub struct NormAuditRow {
    pub field: String,
    /// Largest conductor enumerated.
    pub conductor_max: u32,
    pub predicted: Vec<NormOrbitSpec>,
    /// `(conductor, order)` of orbits found with the Hilbert 90 test.
    pub observed: Vec<(u32, u64)>,
    pub matches: bool,
    /// Same list with the literal kernel-of-norm test.
    pub observed_level_kernel: Vec<(u32, u64)>,
    pub level_kernel_matches: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct LtRow {
    pub p: u64,
    pub n: u32,
    pub closed: LtBreakdown,
    pub brute: LtBreakdown,
    pub matches: bool,
    pub mismatched_kinds: Vec<&'static str>,
    pub excluded: usize,
    pub known_discrepancy: Option<&'static str>,
    pub skipped: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct LoRow {
    pub p: u64,
    pub n: u32,
    pub lo_closed: u64,
    pub lo_derived: Option<u64>,
    pub mismatch: bool,
    pub known_discrepancy: Option<&'static str>,
    pub skipped: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct GridAudit {
    pub config: AuditConfig,
    pub structure: Vec<StructureRow>,
    pub generators: Vec<GeneratorRow>,
    pub primitive: Vec<PrimitiveAuditRow>,
    pub norm: Vec<NormAuditRow>,
    pub lt: Vec<LtRow>,
    pub lo: Vec<LoRow>,
    /// Mismatches not covered by the known-discrepancy registry.
    pub unexpected: Vec<String>,
    /// Mismatches covered by the registry.
    pub known: Vec<String>,
}

impl GridAudit {
    pub fn clean(&self) -> bool {
        self.unexpected.is_empty()
    }
}

fn fields(primes: &[u64]) -> Result<Vec<QuadExt>> {
    let mut out = Vec::new();
    for &p in primes {
        out.extend(QuadExt::all(p)?);
    }
    Ok(out)
}

fn capacity(e: &Error) -> bool {
    matches!(e, Error::Capacity { .. })
}

/// Unit-group structure and listed generators for every field and level
/// whose ring fits `budget`.
pub fn structure_rows(primes: &[u64], budget: u64) -> Result<(Vec<StructureRow>, Vec<GeneratorRow>)> {
    let mut cells = Vec::new();
    for e in fields(primes)? {
        let mut n = 1;
        // |O/p_E^n| = (residue field size)^n
        while e.residue_size().checked_pow(n).is_some_and(|s| s <= budget) {
            cells.push((e, n));
            n += 1;
        }
    }
    let rows: Vec<Result<Option<(StructureRow, Option<GeneratorRow>)>>> = cells
        .par_iter()
        .map(|&(e, n)| {
            let ring = match QuotientRing::new(&e, n, budget) {
                Ok(r) => r,
                Err(err) if capacity(&err) => return Ok(None),
                Err(err) => return Err(err),
            };
            let group = UnitGroup::compute(&ring)?;
            let pred = predicted_structure(&e, n)?;
            let brute = group.invariant_factors().to_vec();
            let gens = check_listed_generators(&ring, &group)?.map(|check| GeneratorRow { field: e.label(), n, check });
            Ok(Some((
                StructureRow {
                    field: e.label(),
                    n,
                    ring_size: ring.size(),
                    matches: brute == pred.invariant_factors,
                    brute,
                    predicted: pred.invariant_factors,
                    rule: pred.rule,
                },
                gens,
            )))
        })
        .collect();
    let mut structure = Vec::new();
    let mut generators = Vec::new();
    for r in rows {
        if let Some((s, g)) = r? {
            structure.push(s);
            generators.extend(g);
        }
    }
    Ok((structure, generators))
}

struct CellOut {
    row: PrimitiveAuditRow,
    /// Norm-factoring orbits at exactly this conductor: (Hilbert 90, level kernel).
    norm: Option<(Vec<CharOrbit>, Vec<CharOrbit>)>,
}

fn primitive_cells(config: &AuditConfig) -> Result<Vec<(QuadExt, CellOut)>> {
    let mut cells = Vec::new();
    for e in fields(&config.primes)? {
        for n in 1..=config.nmax(e.p) {
            cells.push((e, n));
        }
    }
    cells
        .par_iter()
        .map(|&(e, n)| {
            let predicted = predicted_primitive_orbits(&e, n)?;
            let mut row = PrimitiveAuditRow {
                field: e.label(),
                n,
                predicted,
                brute_power_maps: None,
                brute_with_conjugation: None,
                matching_settings: Vec::new(),
                skipped: None,
                known_discrepancy: None,
            };
            let lc = match LocalCharacters::new(&e, n, config.census_budget) {
                Ok(lc) => lc,
                Err(err) if capacity(&err) => {
                    row.skipped = Some(err.to_string());
                    return Ok((e, CellOut { row, norm: None }));
                }
                Err(err) => return Err(err),
            };
            let plain = lc.space.primitive_eps_orbits(n, false)?.len() as u64;
            let conj = lc.space.primitive_eps_orbits(n, true)?.len() as u64;
            if let Some(pr) = predicted {
                row.matching_settings = [(false, plain), (true, conj)].iter().filter(|(_, c)| *c == pr.count).map(|(s, _)| *s).collect();
                if row.matching_settings.is_empty() && !e.is_ramified() {
                    row.known_discrepancy = lookup(Quantity::PrimitiveOrbits, e.p, n).map(|d| d.id);
                }
            }
            row.brute_power_maps = Some(plain);
            row.brute_with_conjugation = Some(conj);
            let h90 = lc.space.primitive_eps_norm_orbits(n, true, NormTest::Hilbert90, true)?;
            let lk = lc.space.primitive_eps_norm_orbits(n, true, NormTest::LevelKernel, true)?;
            Ok((e, CellOut { row, norm: Some((h90, lk)) }))
        })
        .collect()
}

/// Primitive-orbit rows and norm-factoring rows, sharing one character
/// space per `(E, n)`.
pub fn character_rows(config: &AuditConfig) -> Result<(Vec<PrimitiveAuditRow>, Vec<NormAuditRow>)> {
    let cells = primitive_cells(config)?;
    let mut primitive = Vec::with_capacity(cells.len());
    let mut norm: Vec<NormAuditRow> = Vec::new();
    let mut current: Option<(QuadExt, u32, Vec<CharOrbit>, Vec<CharOrbit>, bool)> = None;
    let flush = |cur: Option<(QuadExt, u32, Vec<CharOrbit>, Vec<CharOrbit>, bool)>, norm: &mut Vec<NormAuditRow>| {
        if let Some((e, cmax, h90, lk, _)) = cur {
            let predicted = predicted_norm_factoring(&e);
            let list = |os: &[CharOrbit]| {
                let mut v: Vec<(u32, u64)> = os.iter().map(|o| (o.conductor, o.order)).collect();
                if !e.is_ramified() {
                    v.insert(0, (0, 1));
                }
                v
            };
            norm.push(NormAuditRow {
                field: e.label(),
                conductor_max: cmax,
                matches: norm_lists_match(&e, &predicted, &h90, cmax),
                level_kernel_matches: norm_lists_match(&e, &predicted, &lk, cmax),
                observed: list(&h90),
                observed_level_kernel: list(&lk),
                predicted,
            });
        }
    };
    for (e, cell) in cells {
        if current.as_ref().is_none_or(|c| c.0 != e) {
            flush(current.take(), &mut norm);
            current = Some((e, 0, Vec::new(), Vec::new(), true));
        }
        let cur = current.as_mut().expect("set above");
        // Conductors are enumerated contiguously from 1 until the first skip.
        match cell.norm {
            Some((h90, lk)) if cur.4 => {
                cur.1 = cell.row.n;
                cur.2.extend(h90);
                cur.3.extend(lk);
            }
            _ => cur.4 = false,
        }
        primitive.push(cell.row);
    }
    flush(current.take(), &mut norm);
    Ok((primitive, norm))
}

fn levels(config: &AuditConfig) -> Vec<(u64, u32)> {
    config.primes.iter().flat_map(|&p| (0..=config.nmax(p)).map(move |n| (p, n))).collect()
}

/// Type-count and sign-pair rows from one census per level.
pub fn level_rows(config: &AuditConfig) -> Result<(Vec<LtRow>, Vec<LoRow>)> {
    let rows: Vec<Result<(LtRow, LoRow)>> = levels(config)
        .par_iter()
        .map(|&(p, n)| {
            let c = match census(p, n, config.census_budget) {
                Ok(c) => c,
                Err(err) if capacity(&err) => {
                    let skipped = Some(err.to_string());
                    return Ok((
                        LtRow {
                            p,
                            n,
                            closed: lt_closed_form(p, n)?,
                            brute: LtBreakdown::default(),
                            matches: false,
                            mismatched_kinds: Vec::new(),
                            excluded: 0,
                            known_discrepancy: None,
                            skipped: skipped.clone(),
                        },
                        LoRow { p, n, lo_closed: lo_closed_form(p, n)?, lo_derived: None, mismatch: false, known_discrepancy: None, skipped },
                    ));
                }
                Err(err) => return Err(err),
            };
            let lo = lo_audit_of(&c)?;
            let lt = lt_audit_of(c)?;
            Ok((
                LtRow {
                    p,
                    n,
                    closed: lt.closed,
                    brute: lt.brute,
                    matches: lt.matches,
                    mismatched_kinds: lt.mismatched_kinds,
                    excluded: lt.census.excluded.len(),
                    known_discrepancy: lt.known_discrepancy,
                    skipped: None,
                },
                LoRow {
                    p,
                    n,
                    lo_closed: lo.lo_closed,
                    lo_derived: Some(lo.lo_derived),
                    mismatch: lo.mismatch,
                    known_discrepancy: lo.known_discrepancy,
                    skipped: None,
                },
            ))
        })
        .collect();
    let mut lt = Vec::new();
    let mut lo = Vec::new();
    for r in rows {
        let (a, b) = r?;
        lt.push(a);
        lo.push(b);
    }
    Ok((lt, lo))
}

pub fn run(config: AuditConfig) -> Result<GridAudit> {
    let (structure, generators) = structure_rows(&config.primes, config.structure_budget)?;
    let (primitive, norm) = character_rows(&config)?;
    let (lt, lo) = level_rows(&config)?;

    let mut unexpected = Vec::new();
    let mut known = Vec::new();
    for r in structure.iter().filter(|r| !r.matches) {
        unexpected.push(format!("unit group {} n={}: brute {:?}, predicted {:?}", r.field, r.n, r.brute, r.predicted));
    }
    for r in primitive.iter().filter(|r| r.predicted.is_some() && r.skipped.is_none() && r.matching_settings.is_empty()) {
        let msg = format!(
            "primitive orbits {} n={}: predicted {}, brute {:?}/{:?}",
            r.field,
            r.n,
            r.predicted.map_or(0, |x| x.count),
            r.brute_power_maps,
            r.brute_with_conjugation
        );
        match r.known_discrepancy {
            Some(id) => known.push(format!("[{id}] {msg}")),
            None => unexpected.push(msg),
        }
    }
    for r in norm.iter().filter(|r| !r.matches) {
        unexpected.push(format!("norm-factoring {}: predicted {:?}, observed {:?}", r.field, r.predicted, r.observed));
    }
    for r in lt.iter().filter(|r| r.skipped.is_none() && !r.matches) {
        let msg = format!("type counts p={} n={}: kinds {:?} differ", r.p, r.n, r.mismatched_kinds);
        match r.known_discrepancy {
            Some(id) => known.push(format!("[{id}] {msg}")),
            None => unexpected.push(msg),
        }
    }
    for r in lo.iter().filter(|r| r.mismatch) {
        let msg = format!("LO p={} n={}: closed {}, derived {:?}", r.p, r.n, r.lo_closed, r.lo_derived);
        match r.known_discrepancy {
            Some(id) => known.push(format!("[{id}] {msg}")),
            None => unexpected.push(msg),
        }
    }
    Ok(GridAudit { config, structure, generators, primitive, norm, lt, lo, unexpected, known })
}
