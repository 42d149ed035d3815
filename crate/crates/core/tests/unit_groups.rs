use galorb::group::{FiniteRing, UnitGroup};
use galorb::quadring::{check_listed_generators, predicted_structure, QuadExt, QuotientRing, DEFAULT_BUDGET};
use num_integer::Integer;

/// Independent oracle: for each k dividing the exponent, the number of units
/// with x^k = 1 must equal prod gcd(k, d_i) for the claimed factors d_i.
/// Uses only the public element API, not the group tables.
fn kernel_profile_matches(ring: &QuotientRing, factors: &[u64]) -> bool {
    let exponent = factors.iter().fold(1u64, |a, &d| a.lcm(&d));
    let units: Vec<_> = (0..ring.size() as usize)
        .map(|i| ring.from_index(i))
        .filter(|x| ring.is_unit(x).unwrap())
        .collect();
    let one = ring.one();
    for k in (1..=exponent).filter(|k| exponent % k == 0) {
        let count = units
            .iter()
            .filter(|x| {
                let mut acc = one;
                for _ in 0..k {
                    acc = ring.mul(&acc, x).unwrap();
                }
                acc == one
            })
            .count() as u64;
        let expected: u64 = factors.iter().map(|&d| k.gcd(&d)).product();
        if count != expected {
            return false;
        }
    }
    let total: u64 = factors.iter().product();
    units.len() as u64 == total
}

#[test]
fn documented_examples() {
    let cases: [(u64, i64, u32, &[u64]); 3] = [(5, 2, 2, &[5, 120]), (2, -1, 5, &[2, 2, 4]), (3, -3, 4, &[3, 3, 6])];
    for (p, d, n, want) in cases {
        let e = QuadExt::new(p, d).unwrap();
        let r = QuotientRing::new(&e, n, DEFAULT_BUDGET).unwrap();
        let g = UnitGroup::compute(&r).unwrap();
        assert_eq!(g.invariant_factors(), want, "{e} n={n}");
    }
}

#[test]
fn brute_force_matches_closed_form_small_grid() {
    for p in [2u64, 3, 5, 7] {
        for e in QuadExt::all(p).unwrap() {
            for n in 1..=9u32 {
                let Ok(r) = QuotientRing::new(&e, n, 200_000) else { break };
                let g = UnitGroup::compute(&r).unwrap();
                let pred = predicted_structure(&e, n).unwrap();
                assert_eq!(g.invariant_factors(), pred.invariant_factors.as_slice(), "{e} n={n}");
                let m = r.size();
                let pf = e.residue_size();
                assert_eq!(g.order(), m - m / pf, "{e} n={n}");
                if r.size() <= 4096 {
                    assert!(kernel_profile_matches(&r, g.invariant_factors()), "{e} n={n}");
                }
            }
        }
    }
}

#[test]
fn generators_have_their_factor_orders() {
    for (p, d, n) in [(5u64, 2i64, 3u32), (2, 3, 7), (3, 6, 5), (2, -3, 4), (7, 7, 4)] {
        let e = QuadExt::new(p, d).unwrap();
        let r = QuotientRing::new(&e, n, DEFAULT_BUDGET).unwrap();
        let g = UnitGroup::compute(&r).unwrap();
        for (&x, &d) in g.generators().iter().zip(g.invariant_factors()) {
            assert_eq!(galorb::group::element_order(&r, x, g.order()), Some(d));
        }
        // Coordinates are a homomorphism: coords(xy) = coords(x) + coords(y).
        let units: Vec<usize> = g.units().take(200).collect();
        for &x in &units {
            for &y in units.iter().step_by(7) {
                let xy = FiniteRing::mul(&r, x, y);
                let cx = g.coords_of(x).unwrap();
                let cy = g.coords_of(y).unwrap();
                let sum: Vec<u64> = cx.iter().zip(&cy).zip(g.invariant_factors()).map(|((a, b), d)| (a + b) % d).collect();
                assert_eq!(g.coords_of(xy).unwrap(), sum);
            }
        }
    }
}

#[test]
fn unit_count_independent_of_beta() {
    let e = QuadExt::unramified(5).unwrap();
    let r1 = QuotientRing::new(&e, 3, DEFAULT_BUDGET).unwrap();
    let r2 = QuotientRing::with_beta(&e, 3, 1, 4, DEFAULT_BUDGET).unwrap();
    let g1 = UnitGroup::compute(&r1).unwrap();
    let g2 = UnitGroup::compute(&r2).unwrap();
    assert_eq!(g1.order(), g2.order());
    assert_eq!(g1.invariant_factors(), g2.invariant_factors());
}

#[test]
fn listed_generators_report() {
    for p in [2u64, 3, 5] {
        for e in QuadExt::all(p).unwrap() {
            for n in 2..=7u32 {
                let Ok(r) = QuotientRing::new(&e, n, 200_000) else { break };
                let g = UnitGroup::compute(&r).unwrap();
                if let Some(c) = check_listed_generators(&r, &g).unwrap() {
                    println!("{e} n={n} {:?} stated {:?} actual {:?} span {}/{}", c.labels, c.stated_orders, c.actual_orders, c.span_order, c.group_order);
                }
            }
        }
    }
}
