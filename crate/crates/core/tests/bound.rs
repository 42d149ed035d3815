use galorb::arith::{factorize, is_prime};
use galorb::bound::bound;
use num_integer::Integer;
use proptest::prelude::*;

#[test]
fn primes_give_two() {
    for p in (2..=97u64).filter(|&p| is_prime(p)) {
        assert_eq!(bound(p).unwrap().bound, 2, "{p}");
    }
}

#[test]
fn rigorous_flag_scan() {
    for n in 1..=10_000u64 {
        let f = factorize(n).unwrap();
        let prime_power = f.len() == 1;
        let squarefree = f.iter().all(|&(_, v)| v == 1);
        assert_eq!(bound(n).unwrap().rigorous, n == 1 || prime_power || squarefree, "{n}");
    }
}

#[test]
fn worked_levels() {
    assert_eq!(bound(256).unwrap().bound, 10);
    assert_eq!(bound(1).unwrap().bound, 1);
    let r = bound(11 * 11 * 31 * 31).unwrap();
    assert!(!r.rigorous);
    assert!(!r.notes.is_empty());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]
    #[test]
    fn multiplicative(a in 1u64..5_000, b in 1u64..5_000) {
        prop_assume!(a.gcd(&b) == 1);
        prop_assert_eq!(bound(a * b).unwrap().bound, bound(a).unwrap().bound * bound(b).unwrap().bound);
    }
}
