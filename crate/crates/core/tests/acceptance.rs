//! One line per acceptance criterion. Exits nonzero only on failures that
//! are not recorded in the discrepancy registry.

use std::time::Instant;

use galorb::arith::{hilbert_symbol, is_prime, sigma0};
use galorb::audit::{run, AuditConfig, GridAudit};
use galorb::bound::bound;
use galorb::charenum::{count_primitive_orbits, LocalCharacters, NormTest};
use galorb::discrepancy::{lookup, Quantity};
use galorb::lmfdb::{compare, Anomaly, Client, Source};
use galorb::quadring::QuadExt;
use galorb::signcensus::lo_closed_form;
use num_integer::Integer;
use proptest::strategy::Strategy;
use proptest::test_runner::{Config, TestRunner};

const BUDGET: u64 = 2_000_000;

struct Outcome {
    pass: bool,
    detail: String,
    /// Failures that match a registered discrepancy.
    documented: bool,
}

impl Outcome {
    fn pass(detail: impl Into<String>) -> Self {
        Outcome { pass: true, detail: detail.into(), documented: false }
    }

    fn fail(detail: impl Into<String>, documented: bool) -> Self {
        Outcome { pass: false, detail: detail.into(), documented }
    }
}

fn unit_groups(a: &GridAudit, secs: f64) -> Outcome {
    let bad: Vec<_> = a.structure.iter().filter(|r| !r.matches).map(|r| format!("{} n={}", r.field, r.n)).collect();
    if bad.is_empty() && secs < 180.0 {
        Outcome::pass(format!("{} (field, n) cells agree, audit took {secs:.0}s", a.structure.len()))
    } else {
        Outcome::fail(format!("mismatches {bad:?}, audit took {secs:.0}s"), false)
    }
}

fn primitive_orbits(a: &GridAudit) -> Outcome {
    let mut matched = 0;
    let mut conventional = Vec::new();
    let mut bad = Vec::new();
    let mut settings = std::collections::BTreeMap::<String, usize>::new();
    for r in a.primitive.iter().filter(|r| r.predicted.is_some() && r.skipped.is_none()) {
        let want = r.predicted.unwrap().count;
        if !r.matching_settings.is_empty() {
            matched += 1;
            *settings.entry(format!("{:?}", r.matching_settings)).or_default() += 1;
            continue;
        }
        // Level-one rows for unramified E count the trivial character too.
        let ext = a_field(&r.field);
        let with_trivial = r.brute_power_maps.map(|b| b + count_primitive_orbits(&ext, 0, false, BUDGET).unwrap() as u64);
        if r.n == 1 && r.known_discrepancy.is_some() && with_trivial == Some(want) {
            conventional.push(r.field.clone());
        } else {
            bad.push(format!("{} n={}", r.field, r.n));
        }
    }
    let skipped = a.primitive.iter().filter(|r| r.skipped.is_some()).count();
    let detail = format!(
        "{matched} rows match, identify_conjugate settings {settings:?}; {} level-one unramified rows match once the trivial character is counted; {skipped} cells beyond the budget",
        conventional.len()
    );
    if bad.is_empty() {
        Outcome::pass(detail)
    } else {
        Outcome::fail(format!("{detail}; failing {bad:?}"), false)
    }
}

fn a_field(label: &str) -> QuadExt {
    for p in [2u64, 3, 5, 7, 13] {
        for e in QuadExt::all(p).unwrap() {
            if e.label() == label {
                return e;
            }
        }
    }
    panic!("unknown field {label}")
}

fn norm_lemma(a: &GridAudit) -> Outcome {
    let bad: Vec<_> = a.norm.iter().filter(|r| !r.matches).map(|r| r.field.clone()).collect();
    if bad.is_empty() {
        Outcome::pass(format!("{} fields, conductors up to the enumerated level", a.norm.len()))
    } else {
        Outcome::fail(format!("fields {bad:?}"), false)
    }
}

fn type_counts(a: &GridAudit) -> Outcome {
    let checked = a.lt.iter().filter(|r| r.skipped.is_none()).count();
    let skipped: Vec<_> = a.lt.iter().filter(|r| r.skipped.is_some()).map(|r| (r.p, r.n)).collect();
    let failing: Vec<_> = a.lt.iter().filter(|r| r.skipped.is_none() && !r.matches).collect();
    if failing.is_empty() && skipped.is_empty() {
        return Outcome::pass(format!("{checked} levels"));
    }
    let documented = failing.iter().all(|r| r.known_discrepancy.is_some()) && skipped.is_empty();
    let list: Vec<_> = failing
        .iter()
        .map(|r| {
            format!(
                "p={} n={} {:?}: closed {} vs enumerated {} [{}]",
                r.p,
                r.n,
                r.mismatched_kinds,
                r.closed.total(),
                r.brute.total(),
                r.known_discrepancy.unwrap_or("unregistered")
            )
        })
        .collect();
    Outcome::fail(format!("{checked} levels, {} differ: {}; skipped {skipped:?}", failing.len(), list.join("; ")), documented)
}

/// Published values, transcribed independently of the library.
fn lo_published(p: u64, n: u32) -> u64 {
    let generic = |p: u64| sigma0(p + 1).unwrap() + sigma0(p - 1).unwrap();
    match (p, n) {
        (_, 0) => 1,
        (_, 1) => 2,
        (2, 2..=6) => [1, 2, 6, 4, 16][n as usize - 2],
        (2, _) => if n % 2 == 1 { 8 } else { 10 },
        (3, 2) => 9,
        (3, _) => if n % 2 == 1 { 8 } else { 10 },
        (_, 2) => generic(p) - 1,
        _ => if n % 2 == 1 { 4 } else { generic(p) },
    }
}

fn lo_table(a: &GridAudit) -> Outcome {
    let mut bad = Vec::new();
    for p in (2..=113u64).filter(|&p| is_prime(p)) {
        for n in 0..=10 {
            if lo_closed_form(p, n).unwrap() != lo_published(p, n) {
                bad.push(format!("closed form p={p} n={n}"));
            }
        }
    }
    let mut flagged = Vec::new();
    for r in &a.lo {
        if r.skipped.is_some() {
            if r.p != 3 {
                bad.push(format!("derived p={} n={} skipped", r.p, r.n));
            }
            continue;
        }
        match (r.p, r.mismatch) {
            (3, true) if r.known_discrepancy.is_some() => flagged.push(format!("n={}: {:?} vs {}", r.n, r.lo_derived, r.lo_closed)),
            (_, true) => bad.push(format!("derived p={} n={}: {:?} vs {}", r.p, r.n, r.lo_derived, r.lo_closed)),
            _ => {}
        }
    }
    let even_flagged = [2u32, 4, 6].iter().all(|n| lookup(Quantity::Lo, 3, *n).is_some());
    if bad.is_empty() && even_flagged {
        Outcome::pass(format!("table verbatim for n <= 10; derived = closed off p = 3; p = 3 flagged at {}", flagged.join(", ")))
    } else {
        Outcome::fail(format!("{bad:?}"), false)
    }
}

fn worked_example() -> Outcome {
    let b = bound(256).unwrap();
    let r = compare(&Client::default(), 256, 12, &Source::Fixture, BUDGET).unwrap();
    let ok = b.bound == 10
        && r.ncm == 12
        && r.dims == [2, 2, 4, 4, 6, 6, 8, 8, 8, 10, 10, 12]
        && r.satisfied
        && matches!(r.anomalies[..], [Anomaly::NcmExceedsBound { gap: 2 }]);
    let detail = format!("bound {} ncm {} dims {:?} anomalies {:?}", b.bound, r.ncm, r.dims, r.anomalies);
    if ok {
        Outcome::pass(detail)
    } else {
        Outcome::fail(detail, false)
    }
}

fn properties() -> Outcome {
    let vals: Vec<i64> = (-50..=50).filter(|&x| x != 0).collect();
    let primes = [2u64, 3, 5, 7, 11, 13];
    let h = |a: i64, b: i64, p: u64| hilbert_symbol(a, b, p).unwrap().as_i8();
    let mut failures = Vec::new();
    for &p in &primes {
        for &a in &vals {
            if h(a, -a, p) != 1 {
                failures.push(format!("({a},-{a})_{p}"));
            }
            for &b in &vals {
                if h(a, b, p) != h(b, a, p) {
                    failures.push(format!("symmetry ({a},{b})_{p}"));
                }
                for &c in vals.iter().step_by(7) {
                    if h(a * c, b, p) != h(a, b, p) * h(c, b, p) {
                        failures.push(format!("bilinearity ({a}*{c},{b})_{p}"));
                    }
                }
            }
        }
    }

    let mut orbits = 0usize;
    for p in [2u64, 3, 5, 7, 13] {
        for e in QuadExt::all(p).unwrap() {
            for n in (1..=9u32).take_while(|&n| e.residue_size().checked_pow(n).is_some_and(|s| s <= 20_000)) {
                let lc = LocalCharacters::new(&e, n, BUDGET).unwrap();
                let sp = &lc.space;
                for ic in [false, true] {
                    for o in sp.orbits(ic, |_, _| true).unwrap() {
                        orbits += 1;
                        for m in sp.orbit_members(&o.representative, ic).unwrap() {
                            let same = sp.conductor(&m).unwrap() == o.conductor
                                && m.order() == o.order
                                && Some(sp.factors_through_norm(&m, NormTest::Hilbert90).unwrap()) == o.factors_through_norm
                                && Some(sp.restriction_matches_eps(&m).unwrap()) == o.restriction_matches;
                            if !same {
                                failures.push(format!("orbit of {:?} on {} n={n}", o.representative.exps(), e.label()));
                            }
                        }
                    }
                }
            }
        }
    }

    let mut runner = TestRunner::new(Config { cases: 100, failure_persistence: None, ..Config::default() });
    let pairs = (1u64..100_000, 1u64..100_000).prop_filter("coprime", |(a, b)| a.gcd(b) == 1);
    let mult = runner.run(&pairs, |(a, b)| {
        assert_eq!(bound(a * b).unwrap().bound, bound(a).unwrap().bound * bound(b).unwrap().bound);
        Ok(())
    });
    if let Err(e) = mult {
        failures.push(format!("multiplicativity: {e}"));
    }

    if failures.is_empty() {
        Outcome::pass(format!("Hilbert identities on |a|,|b| <= 50, p <= 13; {orbits} orbits invariant; 100 coprime pairs multiplicative"))
    } else {
        Outcome::fail(format!("{} failures, first {:?}", failures.len(), &failures[..failures.len().min(5)]), false)
    }
}

fn fixture_inequalities() -> Outcome {
    let client = Client::default();
    let mut cells = Vec::new();
    let mut bad = Vec::new();
    for n in [1u64, 9, 11, 30, 256] {
        for k in [12u32, 16] {
            let r = compare(&client, n, k, &Source::Fixture, BUDGET).unwrap();
            cells.push(format!("(N={n}, k={k}: ncm {}, bound {})", r.ncm, r.bound.bound));
            if k >= 16 && r.bound.rigorous && !r.satisfied {
                let attributed = matches!(&r.anomalies[..],
                    [Anomaly::BoundExceedsNcm { known_discrepancies, derived_satisfied: Some(true), .. }] if !known_discrepancies.is_empty());
                if !attributed {
                    bad.push(format!("N={n} k={k}"));
                } else {
                    cells.last_mut().unwrap().push_str("[published p=3 entry; enumerated bound holds]");
                }
            }
        }
    }
    let detail = format!("asymptotic threshold not reproducible here; k >= 16 rigorous cells checked; fixtures {}", cells.join(" "));
    if bad.is_empty() {
        Outcome::pass(detail)
    } else {
        Outcome::fail(format!("{detail}; unexplained {bad:?}"), false)
    }
}

fn main() {
    let start = Instant::now();
    let audit = run(AuditConfig::default()).expect("grid audit");
    let secs = start.elapsed().as_secs_f64();

    let results = [
        ("unit groups", unit_groups(&audit, secs)),
        ("primitive character orbits", primitive_orbits(&audit)),
        ("norm-factoring orbits", norm_lemma(&audit)),
        ("type-orbit counts", type_counts(&audit)),
        ("LO table", lo_table(&audit)),
        ("level 256 example", worked_example()),
        ("property suites", properties()),
        ("fixture inequalities", fixture_inequalities()),
    ];

    let mut unexplained = 0;
    for (i, (name, o)) in results.iter().enumerate() {
        let tag = match (o.pass, o.documented) {
            (true, _) => "PASS",
            (false, true) => "FAIL (documented discrepancy)",
            (false, false) => "FAIL",
        };
        println!("criterion {}: {tag}: {name}: {}", i + 1, o.detail);
        if !o.pass && !o.documented {
            unexplained += 1;
        }
    }
    for k in &audit.known {
        println!("  registered: {k}");
    }
    if !audit.unexpected.is_empty() {
        for u in &audit.unexpected {
            println!("  unexpected: {u}");
        }
        unexplained += 1;
    }
    if unexplained > 0 {
        std::process::exit(1);
    }
}
