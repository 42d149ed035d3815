//! The global lower bound `prod_{q | N} LO(q^{v_q(N)}) <= NCM(N, k)`.

use serde::Serialize;

use crate::arith::factorize;
use crate::error::{Error, Result};
use crate::signcensus::lo_closed_form;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundReport {
    #[serde(rename = "N")]
    pub n: u64,
    pub factorization: Vec<(u64, u32)>,
    pub per_prime_lo: Vec<u64>,
    pub bound: u64,
    pub rigorous: bool,
    pub notes: String,
}

/// Whether the inequality is proved for level `n`: `n` is 1, a prime power
/// or squarefree.
pub fn is_rigorous_level(factorization: &[(u64, u32)]) -> bool {
    factorization.len() <= 1 || factorization.iter().all(|&(_, v)| v == 1)
}

pub fn bound(n: u64) -> Result<BoundReport> {
    if n == 0 {
        return Err(Error::invalid("N must be positive"));
    }
    let factorization = factorize(n)?;
    let per_prime_lo = factorization.iter().map(|&(q, v)| lo_closed_form(q, v)).collect::<Result<Vec<_>>>()?;
    let bound = per_prime_lo.iter().try_fold(1u64, |acc, &x| acc.checked_mul(x)).ok_or_else(|| Error::internal("bound overflows u64"))?;
    let rigorous = is_rigorous_level(&factorization);
    let notes = if rigorous {
        "N is 1, a prime power or squarefree: the inequality holds for k large enough".to_string()
    } else {
        "N is neither a prime power nor squarefree: types at different primes can force the same \
         coefficient field and merge orbits (N = 11^2 * 31^2 has product 2 but only 1 is guaranteed); \
         the product is heuristic here"
            .to_string()
    };
    Ok(BoundReport { n, factorization, per_prime_lo, bound, rigorous, notes })
}
