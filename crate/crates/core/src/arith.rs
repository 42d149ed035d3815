//! Elementary exact number theory: divisor counts, primality, factorization,
//! valuations, Legendre and Hilbert symbols.

use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A sign in {+1, -1}. Serializes as the integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn from_parity(odd: bool) -> Self {
        if odd {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    pub fn from_i64(v: i64) -> Option<Self> {
        match v {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn is_minus(self) -> bool {
        self == Sign::Minus
    }
}

impl std::ops::Mul for Sign {
    type Output = Sign;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: Sign) -> Sign {
        Sign::from_parity(self.is_minus() ^ rhs.is_minus())
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+1",
            Sign::Minus => "-1",
        })
    }
}

impl Serialize for Sign {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_i8(self.as_i8())
    }
}

impl<'de> Deserialize<'de> for Sign {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = i64::deserialize(d)?;
        Sign::from_i64(v).ok_or_else(|| serde::de::Error::custom(format!("sign must be +1 or -1, got {v}")))
    }
}

/// A prime power `p^n` with `p` verified prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrimePower {
    pub p: u64,
    pub n: u32,
}

impl PrimePower {
    pub fn new(p: u64, n: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(PrimePower { p, n })
    }

    /// `p^n`, or `None` on overflow.
    pub fn value(&self) -> Option<u64> {
        self.p.checked_pow(self.n)
    }
}

impl fmt::Display for PrimePower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}", self.p, self.n)
    }
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

const SMALL_PRIMES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Deterministic primality test for all `u64`: trial division by small primes,
/// then Miller-Rabin with the first twelve prime bases.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &q in &SMALL_PRIMES {
        if n.is_multiple_of(q) {
            return n == q;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &SMALL_PRIMES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_rho(n: u64) -> u64 {
    if n.is_multiple_of(2) {
        return 2;
    }
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut d) = (2u64, 2u64, 1u64);
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = x.abs_diff(y).gcd(&n);
        }
        if d != n {
            return d;
        }
        c += 1;
    }
}

fn factor_into(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let d = pollard_rho(n);
    factor_into(d, out);
    factor_into(n / d, out);
}

/// Prime factorization as `(prime, exponent)` pairs in increasing prime order.
/// `factorize(1)` is empty.
pub fn factorize(mut n: u64) -> Result<Vec<(u64, u32)>> {
    if n == 0 {
        return Err(Error::invalid("cannot factor 0"));
    }
    let mut primes = Vec::new();
    for q in 2..1000u64 {
        if q * q > n {
            break;
        }
        while n.is_multiple_of(q) {
            primes.push(q);
            n /= q;
        }
    }
    factor_into(n, &mut primes);
    primes.sort_unstable();
    let mut out: Vec<(u64, u32)> = Vec::new();
    for q in primes {
        match out.last_mut() {
            Some((last, e)) if *last == q => *e += 1,
            _ => out.push((q, 1)),
        }
    }
    Ok(out)
}

/// Number of positive divisors.
pub fn sigma0(a: u64) -> Result<u64> {
    if a == 0 {
        return Err(Error::invalid("sigma0 is undefined at 0"));
    }
    Ok(factorize(a)?.iter().map(|&(_, e)| e as u64 + 1).product())
}

/// `p`-adic valuation of a nonzero integer.
pub fn valuation(n: i64, p: u64) -> u32 {
    debug_assert!(n != 0 && p >= 2);
    let mut m = n.unsigned_abs();
    let mut v = 0;
    while m.is_multiple_of(p) {
        m /= p;
        v += 1;
    }
    v
}

/// Splits a nonzero integer as `p^v * u` with `p ∤ u`.
pub fn split_valuation(n: i64, p: u64) -> (u32, i64) {
    let v = valuation(n, p);
    (v, n / (p as i64).pow(v))
}

/// Legendre symbol `(a | p)` for an odd prime `p`; zero when `p | a`.
pub fn legendre(a: i64, p: u64) -> i8 {
    let r = a.rem_euclid(p as i64) as u64;
    if r == 0 {
        return 0;
    }
    if pow_mod(r, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// Whether the `p`-adic unit `u` is a square in `Z_p`.
pub fn is_unit_square(u: i64, p: u64) -> bool {
    if p == 2 {
        u.rem_euclid(8) == 1
    } else {
        legendre(u, p) == 1
    }
}

/// Hilbert symbol `(a, b)_p`: `+1` iff `z^2 = a x^2 + b y^2` has a nontrivial
/// solution over `Q_p`.
pub fn hilbert_symbol(a: i64, b: i64, p: u64) -> Result<Sign> {
    if a == 0 || b == 0 {
        return Err(Error::invalid("Hilbert symbol arguments must be nonzero"));
    }
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let (alpha, u) = split_valuation(a, p);
    let (beta, v) = split_valuation(b, p);
    let (alpha, beta) = (alpha & 1, beta & 1);
    if p == 2 {
        let eps = |x: i64| ((x.rem_euclid(8) - 1) / 2) & 1;
        let omega = |x: i64| {
            let r = x.rem_euclid(8);
            ((r * r - 1) / 8) & 1
        };
        let e = eps(u) * eps(v) + alpha as i64 * omega(v) + beta as i64 * omega(u);
        Ok(Sign::from_parity(e & 1 == 1))
    } else {
        let mut s = if alpha * beta == 1 && (p - 1) / 2 % 2 == 1 { -1 } else { 1 };
        if beta == 1 {
            s *= legendre(u, p);
        }
        if alpha == 1 {
            s *= legendre(v, p);
        }
        Ok(Sign::from_parity(s < 0))
    }
}

/// Smallest positive quadratic non-residue modulo an odd prime.
pub fn least_nonresidue(p: u64) -> u64 {
    (2..p).find(|&u| legendre(u as i64, p) == -1).expect("odd prime has a non-residue")
}

pub fn euler_phi(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    factorize(n)
        .expect("nonzero")
        .iter()
        .fold(n, |acc, &(q, _)| acc / q * (q - 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigma0_examples() {
        assert_eq!(sigma0(1).unwrap(), 1);
        assert_eq!(sigma0(12).unwrap(), 6);
        assert_eq!(sigma0(6).unwrap(), 4);
        assert!(sigma0(0).is_err());
    }

    #[test]
    fn sigma0_multiplicative_on_coprime() {
        for a in 1..=200u64 {
            for b in 1..=200u64 {
                if a.gcd(&b) == 1 {
                    assert_eq!(sigma0(a * b).unwrap(), sigma0(a).unwrap() * sigma0(b).unwrap());
                }
            }
        }
    }

    #[test]
    fn primality_matches_sieve() {
        let mut sieve = vec![true; 10_000];
        sieve[0] = false;
        sieve[1] = false;
        for i in 2..100 {
            if sieve[i] {
                for j in (i * i..10_000).step_by(i) {
                    sieve[j] = false;
                }
            }
        }
        for (i, &s) in sieve.iter().enumerate() {
            assert_eq!(is_prime(i as u64), s, "{i}");
        }
        assert!(is_prime(18_446_744_073_709_551_557));
        assert!(!is_prime(3_215_031_751)); // strong pseudoprime to bases 2, 3, 5, 7
    }

    #[test]
    fn factorization_reassembles() {
        for n in [1u64, 2, 256, 9_801, 116_281, 600_851_475_143, 18_446_744_073_709_551_615] {
            let f = factorize(n).unwrap();
            let back: u64 = f.iter().map(|&(q, e)| q.pow(e)).product();
            assert_eq!(back, n);
            assert!(f.iter().all(|&(q, _)| is_prime(q)));
        }
    }

    #[test]
    fn hilbert_examples() {
        assert_eq!(hilbert_symbol(1, 7, 3).unwrap(), Sign::Plus);
        assert_eq!(hilbert_symbol(-1, -1, 2).unwrap(), Sign::Minus);
        assert_eq!(hilbert_symbol(5, 2, 2).unwrap(), Sign::Minus);
        assert!(hilbert_symbol(0, 3, 5).is_err());
        assert!(hilbert_symbol(3, 3, 9).is_err());
    }

    #[test]
    fn prime_power_rejects_composites() {
        assert!(PrimePower::new(9, 2).is_err());
        assert_eq!(PrimePower::new(2, 8).unwrap().value(), Some(256));
    }
}
