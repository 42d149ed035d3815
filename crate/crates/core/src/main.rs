use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use galorb::audit::{self, AuditConfig};
use galorb::bound::bound;
use galorb::group::UnitGroup;
use galorb::lmfdb::{compare, Anomaly, Client, Source};
use galorb::quadring::{predicted_structure, QuadExt, QuotientRing, DEFAULT_BUDGET};
use galorb::signcensus::{census_audit_lo, lo_closed_form};
use galorb::typecensus::{census, census_audit_lt, lt_closed_form, LtBreakdown, TypeKind, TypeOrbit};
use galorb::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Csv,
    Json,
}

#[derive(Parser)]
#[command(name = "galorb", version, about = "Local type and Atkin-Lehner sign counts for newforms on Gamma_0(N)")]
struct Cli {
    #[arg(long, value_enum, default_value = "table", global = true)]
    format: Format,
    /// Largest ring enumerated, in elements.
    #[arg(long, default_value_t = DEFAULT_BUDGET, global = true)]
    budget: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Type-orbit counts LT(p^n) by kind.
    Lt {
        p: u64,
        n: u32,
        /// Also enumerate the types and compare.
        #[arg(long)]
        brute: bool,
    },
    /// Count LO(p^n) of (type, minimal sign) pairs.
    Lo {
        p: u64,
        n: u32,
        /// Also derive the count from the type census.
        #[arg(long)]
        derived: bool,
    },
    /// All type orbits at conductor p^n.
    Types {
        p: u64,
        n: u32,
        /// Same as --format json.
        #[arg(long)]
        json: bool,
    },
    /// Closed forms against brute force over a grid of primes and levels.
    Audit {
        /// Largest prime audited.
        #[arg(long, default_value_t = 13)]
        pmax: u64,
        /// Largest level for odd primes.
        #[arg(long, default_value_t = 6)]
        nmax: u32,
        /// Largest level for p = 2.
        #[arg(long, default_value_t = 9)]
        nmax2: u32,
        /// Ring-size cap for character and type enumeration.
        #[arg(long, default_value_t = 5_000_000)]
        census_budget: u64,
    },
    /// Lower bound on non-CM Galois orbits at level N.
    Bound { n: u64 },
    /// Compare the bound with newform data for (N, k).
    Compare {
        n: u64,
        k: u32,
        /// Use the bundled fixtures instead of the network.
        #[arg(long)]
        offline: bool,
        /// Cache directory for live responses.
        #[arg(long)]
        cache_dir: Option<PathBuf>,
    },
    /// Unit group of O_E / p_E^n for E = Q_p(sqrt(d)).
    Unitgroup {
        p: u64,
        #[arg(allow_hyphen_values = true)]
        d: i64,
        n: u32,
    },
}

/// Rows rendered as an aligned table or as CSV.
struct Table {
    headers: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn new(headers: &[&'static str]) -> Self {
        Table { headers: headers.to_vec(), rows: Vec::new() }
    }

    fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    fn render(&self, format: Format) -> Result<String, Error> {
        match format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
                w.write_record(&self.headers).map_err(csv_err)?;
                for r in &self.rows {
                    w.write_record(r).map_err(csv_err)?;
                }
                let bytes = w.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
                Ok(String::from_utf8(bytes).expect("csv of utf-8 fields"))
            }
            _ => {
                let mut widths: Vec<usize> = self.headers.iter().map(|h| h.len()).collect();
                for r in &self.rows {
                    for (w, c) in widths.iter_mut().zip(r) {
                        *w = (*w).max(c.chars().count());
                    }
                }
                let line = |cells: Vec<&str>| {
                    let mut s = cells
                        .iter()
                        .zip(&widths)
                        .map(|(c, w)| format!("{c:<w$}"))
                        .collect::<Vec<_>>()
                        .join("  ");
                    s.truncate(s.trim_end().len());
                    s.push('\n');
                    s
                };
                let mut out = line(self.headers.clone());
                for r in &self.rows {
                    out.push_str(&line(r.iter().map(String::as_str).collect()));
                }
                Ok(out)
            }
        }
    }
}

fn json<T: Serialize>(value: &T) -> Result<String, Error> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Internal(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn list<T: ToString>(xs: &[T]) -> String {
    format!("[{}]", xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(","))
}

fn breakdown_cells(b: &LtBreakdown) -> Vec<String> {
    [b.unramified, b.ps, b.st, b.scu, b.scr, b.scr_delta2, b.scr_delta3, b.sporadic, b.total()].iter().map(u64::to_string).collect()
}

const BREAKDOWN_HEADERS: [&str; 10] =
    ["source", "unramified", "ps", "st", "scu", "scr", "scr_delta2", "scr_delta3", "sporadic", "total"];

fn type_row(i: usize, t: &TypeOrbit) -> Vec<String> {
    let (field, chi) = match &t.kind {
        TypeKind::Unramified => (String::new(), None),
        TypeKind::PrincipalSeries { chi } => (format!("Q{}", t.p), Some(chi)),
        TypeKind::SteinbergTwist { chi } => (format!("Q{}", t.p), chi.as_ref()),
        TypeKind::Supercuspidal { field, theta } => (field.label(), Some(theta)),
        TypeKind::Sporadic { tag } => (tag.to_string(), None),
    };
    let parent = t.minimal_parent.as_ref().map_or(String::new(), |p| format!("{}@{}", p.kind.label(), p.level));
    let (order, cond, size, exps) = match chi {
        Some(o) => (
            o.order.to_string(),
            o.conductor.to_string(),
            o.size.to_string(),
            list(o.representative.exps()),
        ),
        None => Default::default(),
    };
    vec![i.to_string(), t.level.to_string(), t.kind.label().to_string(), field, order, cond, size, exps, parent]
}

fn run(cli: Cli) -> Result<(String, ExitCode), Error> {
    let fmt = cli.format;
    let budget = cli.budget;
    let ok = ExitCode::SUCCESS;
    match cli.command {
        Command::Lt { p, n, brute } => {
            let closed = lt_closed_form(p, n)?;
            if !brute {
                if fmt == Format::Json {
                    return Ok((json(&closed)?, ok));
                }
                let mut t = Table::new(&BREAKDOWN_HEADERS);
                t.push([vec!["closed".into()], breakdown_cells(&closed)].concat());
                return Ok((t.render(fmt)?, ok));
            }
            let a = census_audit_lt(p, n, budget)?;
            if fmt == Format::Json {
                return Ok((json(&a)?, ok));
            }
            let mut t = Table::new(&BREAKDOWN_HEADERS);
            t.push([vec!["closed".into()], breakdown_cells(&a.closed)].concat());
            t.push([vec!["brute".into()], breakdown_cells(&a.brute)].concat());
            let mut out = t.render(fmt)?;
            if fmt == Format::Table {
                out.push_str(&format!("matches: {}", a.matches));
                if let Some(id) = a.known_discrepancy {
                    out.push_str(&format!(" (known discrepancy {id})"));
                }
                out.push('\n');
            }
            Ok((out, ok))
        }
        Command::Lo { p, n, derived } => {
            if !derived {
                let v = lo_closed_form(p, n)?;
                return Ok(match fmt {
                    Format::Json => (json(&serde_json::json!({ "p": p, "n": n, "lo_closed": v }))?, ok),
                    Format::Csv => (format!("p,n,lo_closed\n{p},{n},{v}\n"), ok),
                    Format::Table => (format!("{v}\n"), ok),
                });
            }
            let a = census_audit_lo(p, n, budget)?;
            if fmt == Format::Json {
                return Ok((json(&a)?, ok));
            }
            let mut t = Table::new(&["p", "n", "lo_closed", "lo_derived", "mismatch", "known_discrepancy"]);
            t.push(vec![
                p.to_string(),
                n.to_string(),
                a.lo_closed.to_string(),
                a.lo_derived.to_string(),
                a.mismatch.to_string(),
                a.known_discrepancy.unwrap_or("").to_string(),
            ]);
            Ok((t.render(fmt)?, ok))
        }
        Command::Types { p, n, json: as_json } => {
            let c = census(p, n, budget)?;
            if as_json || fmt == Format::Json {
                return Ok((json(&c)?, ok));
            }
            let mut t = Table::new(&["#", "level", "kind", "field", "order", "conductor", "orbit_size", "exponents", "parent"]);
            for (i, ty) in c.types.iter().enumerate() {
                t.push(type_row(i, ty));
            }
            Ok((t.render(fmt)?, ok))
        }
        Command::Audit { pmax, nmax, nmax2, census_budget } => {
            let primes: Vec<u64> = (2..=pmax).filter(|&q| galorb::arith::is_prime(q)).collect();
            let config = AuditConfig { primes, nmax_odd: nmax, nmax_two: nmax2, structure_budget: budget, census_budget };
            let a = audit::run(config)?;
            let code = if a.clean() { ok } else { ExitCode::from(1) };
            if fmt == Format::Json {
                return Ok((json(&a)?, code));
            }
            let mut t = Table::new(&["section", "rows", "matching", "skipped", "known_discrepancies"]);
            let count = |total: usize, good: usize, skipped: usize, known: usize| {
                vec![total.to_string(), good.to_string(), skipped.to_string(), known.to_string()]
            };
            t.push([vec!["unit_groups".into()], count(a.structure.len(), a.structure.iter().filter(|r| r.matches).count(), 0, 0)].concat());
            t.push(
                [
                    vec!["listed_generators".into()],
                    count(a.generators.len(), a.generators.iter().filter(|g| g.check.generates && g.check.orders_match).count(), 0, 0),
                ]
                .concat(),
            );
            let prim_applicable: Vec<_> = a.primitive.iter().filter(|r| r.predicted.is_some()).collect();
            t.push(
                [
                    vec!["primitive_orbits".into()],
                    count(
                        prim_applicable.len(),
                        prim_applicable.iter().filter(|r| !r.matching_settings.is_empty()).count(),
                        prim_applicable.iter().filter(|r| r.skipped.is_some()).count(),
                        prim_applicable.iter().filter(|r| r.known_discrepancy.is_some()).count(),
                    ),
                ]
                .concat(),
            );
            t.push([vec!["norm_factoring".into()], count(a.norm.len(), a.norm.iter().filter(|r| r.matches).count(), 0, 0)].concat());
            t.push(
                [
                    vec!["type_counts".into()],
                    count(
                        a.lt.len(),
                        a.lt.iter().filter(|r| r.matches).count(),
                        a.lt.iter().filter(|r| r.skipped.is_some()).count(),
                        a.lt.iter().filter(|r| r.known_discrepancy.is_some()).count(),
                    ),
                ]
                .concat(),
            );
            t.push(
                [
                    vec!["sign_pairs".into()],
                    count(
                        a.lo.len(),
                        a.lo.iter().filter(|r| r.skipped.is_none() && !r.mismatch).count(),
                        a.lo.iter().filter(|r| r.skipped.is_some()).count(),
                        a.lo.iter().filter(|r| r.known_discrepancy.is_some()).count(),
                    ),
                ]
                .concat(),
            );
            let mut out = t.render(fmt)?;
            if fmt == Format::Table {
                for k in &a.known {
                    out.push_str(&format!("known: {k}\n"));
                }
                for u in &a.unexpected {
                    out.push_str(&format!("UNEXPECTED: {u}\n"));
                }
                for g in a.generators.iter().filter(|g| !(g.check.generates && g.check.orders_match)) {
                    out.push_str(&format!(
                        "generators {} n={}: {} stated orders {} actual {} span {}/{}\n",
                        g.field,
                        g.n,
                        list(&g.check.labels),
                        list(&g.check.stated_orders),
                        list(&g.check.actual_orders),
                        g.check.span_order,
                        g.check.group_order
                    ));
                }
            }
            Ok((out, code))
        }
        Command::Bound { n } => {
            let b = bound(n)?;
            if fmt == Format::Json {
                return Ok((json(&b)?, ok));
            }
            let mut t = Table::new(&["N", "factorization", "per_prime_lo", "bound", "rigorous"]);
            let fac = b.factorization.iter().map(|(q, v)| format!("{q}^{v}")).collect::<Vec<_>>().join("*");
            t.push(vec![n.to_string(), fac, list(&b.per_prime_lo), b.bound.to_string(), b.rigorous.to_string()]);
            let mut out = t.render(fmt)?;
            if fmt == Format::Table {
                out.push_str(&format!("note: {}\n", b.notes));
            }
            Ok((out, ok))
        }
        Command::Compare { n, k, offline, cache_dir } => {
            let source = if offline { Source::Fixture } else { Source::Live { cache_dir } };
            let r = compare(&Client::default(), n, k, &source, budget)?;
            if fmt == Format::Json {
                return Ok((json(&r)?, ok));
            }
            let mut t = Table::new(&["N", "k", "orbits", "cm", "ncm", "bound", "rigorous", "satisfied", "source"]);
            t.push(vec![
                n.to_string(),
                k.to_string(),
                r.orbit_count.to_string(),
                r.cm_count.to_string(),
                r.ncm.to_string(),
                r.bound.bound.to_string(),
                r.bound.rigorous.to_string(),
                r.satisfied.to_string(),
                format!("{:?}", r.source).to_lowercase(),
            ]);
            let mut out = t.render(fmt)?;
            if fmt == Format::Table {
                out.push_str(&format!("non-CM dimensions: {}\n", list(&r.dims)));
                for a in &r.anomalies {
                    match a {
                        Anomaly::NcmExceedsBound { gap } => out.push_str(&format!("anomaly: NCM exceeds the bound by {gap}\n")),
                        Anomaly::BoundExceedsNcm { bound, ncm, known_discrepancies, derived_bound, .. } => {
                            out.push_str(&format!("anomaly: bound {bound} exceeds NCM {ncm}"));
                            if !known_discrepancies.is_empty() {
                                out.push_str(&format!("; known discrepancies {}", known_discrepancies.join(",")));
                            }
                            if let Some(d) = derived_bound {
                                out.push_str(&format!("; derived bound {d}"));
                            }
                            out.push('\n');
                        }
                    }
                }
            }
            Ok((out, ok))
        }
        Command::Unitgroup { p, d, n } => {
            let e = QuadExt::new(p, d)?;
            let ring = QuotientRing::new(&e, n, budget)?;
            let g = UnitGroup::compute(&ring)?;
            let pred = predicted_structure(&e, n)?;
            #[derive(Serialize)]
            struct Report {
                field: QuadExt,
                n: u32,
                ring_size: u64,
                order: u64,
                invariant_factors: Vec<u64>,
                predicted: Vec<u64>,
                rule: galorb::quadring::StructureRule,
                matches: bool,
            }
            let rep = Report {
                field: e,
                n,
                ring_size: ring.size(),
                order: g.order(),
                invariant_factors: g.invariant_factors().to_vec(),
                matches: g.invariant_factors() == pred.invariant_factors.as_slice(),
                predicted: pred.invariant_factors,
                rule: pred.rule,
            };
            if fmt == Format::Json {
                return Ok((json(&rep)?, ok));
            }
            let mut t = Table::new(&["field", "n", "ring_size", "order", "invariant_factors", "predicted", "matches"]);
            t.push(vec![
                e.label(),
                n.to_string(),
                rep.ring_size.to_string(),
                rep.order.to_string(),
                list(&rep.invariant_factors),
                list(&rep.predicted),
                rep.matches.to_string(),
            ]);
            Ok((t.render(fmt)?, ok))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((out, code)) => {
            let mut stdout = std::io::stdout().lock();
            // A closed pipe is not worth a panic.
            let _ = stdout.write_all(out.as_bytes());
            code
        }
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Capacity { .. } => ExitCode::from(3),
                Error::InvalidArgument(_) | Error::NotPrime(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
