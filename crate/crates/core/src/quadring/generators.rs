use serde::Serialize;

use super::predicted::{inv_mod, predicted_structure, sqrt_mod_prime_power, StructureRule};
use super::ring::QuotientRing;
use crate::error::Result;
use crate::group::{element_order, subgroup_generators, FiniteRing, UnitGroup};

/// Outcome of testing a listed generator set against the brute-force group.
#[derive(Debug, Clone, Serialize)]
pub struct GeneratorCheck {
    pub rule: StructureRule,
    pub labels: Vec<String>,
    /// `(a, b)` coordinates of each listed element in the ring's presentation.
    pub elements: Vec<(i64, i64)>,
    pub stated_orders: Vec<u64>,
    pub actual_orders: Vec<u64>,
    pub span_order: u64,
    pub group_order: u64,
    pub orders_match: bool,
    pub generates: bool,
}

/// Checks the closed-form generator list for `ring`, if its rule lists one.
pub fn check_listed_generators(ring: &QuotientRing, group: &UnitGroup) -> Result<Option<GeneratorCheck>> {
    let ext = *ring.ext();
    let n = ring.level();
    let pred = predicted_structure(&ext, n)?;
    let p = ext.p as i64;
    let order = group.order();
    // Teichmüller-type root of unity: a unit raised to the p-part order.
    let p_part = {
        let mut x = order;
        while x.is_multiple_of(ext.p) {
            x /= ext.p;
        }
        order / x
    };
    let root_of_unity = |target: u64| -> Option<usize> {
        group
            .units()
            .map(|x| ring.pow(x, p_part))
            .find(|&y| element_order(ring, y, order) == Some(target))
    };
    let as_ab = |i: usize| ring.from_index(i);
    let ab = |x: usize| {
        let e = as_ab(x);
        (e.a, e.b)
    };

    let (labels, elems): (Vec<&str>, Vec<(i64, i64)>) = match pred.rule {
        StructureRule::UnramifiedOdd | StructureRule::RamifiedOdd => {
            let xi_order = pred.components[0];
            let Some(xi) = root_of_unity(xi_order) else { return Ok(None) };
            (vec!["xi", "1+p", "1+p*sqrt(d)"], vec![ab(xi), (1 + p, 0), (1, p)])
        }
        StructureRule::UnramifiedTwo => {
            // beta = zeta_3 and sqrt(-3) = 1 + 2*beta; sqrt(5) = s*sqrt(-3)
            // with s^2 = -5/3.
            let k = n + 3;
            let m = 1i64 << k;
            let third = inv_mod(3, m as u64).expect("odd") as i64;
            let s = sqrt_mod_prime_power((-5 * third).rem_euclid(m), 2, k)? as i64;
            (
                vec!["xi_3", "-1", "5+4*sqrt(5)", "sqrt(5)"],
                vec![(0, 1), (-1, 0), (5 + 4 * s, 8 * s), (s, 2 * s)],
            )
        }
        StructureRule::Q3SqrtMinus3 => {
            // beta = sqrt(6); sqrt(-3) = x*sqrt(6) with x^2 = -1/2.
            let k = n + 2;
            let m = 3u64.pow(k);
            let half = inv_mod(2, m).expect("odd") as i64;
            let x = sqrt_mod_prime_power((-half).rem_euclid(m as i64), 3, k)? as i64;
            // xi_3 = (-1 + sqrt(-3)) / 2
            (
                vec!["-1", "xi_3", "4", "1+3*sqrt(-3)"],
                vec![(-1, 0), (-half, half * x), (4, 0), (1, 3 * x)],
            )
        }
        StructureRule::Q2SqrtMinus1 => (vec!["sqrt(-1)", "5", "1+2*sqrt(-1)"], vec![(0, 1), (5, 0), (1, 2)]),
        StructureRule::Q2Sqrt3 => (vec!["-1", "sqrt(3)", "1+2*sqrt(3)"], vec![(-1, 0), (0, 1), (1, 2)]),
        StructureRule::Q2Sqrt2d => (vec!["-1", "5", "1+sqrt(2d)"], vec![(-1, 0), (5, 0), (1, 1)]),
        StructureRule::SmallRamifiedTwo | StructureRule::ResidueField => return Ok(None),
    };
    let idxs: Vec<usize> = elems.iter().map(|&(a, b)| ring.index_of(&ring.element(a, b))).collect();
    let elements: Vec<(i64, i64)> = idxs.iter().map(|&i| ab(i)).collect();
    let actual_orders: Vec<u64> = idxs.iter().map(|&i| element_order(ring, i, order).unwrap_or(0)).collect();
    let packed: Vec<u32> = idxs.iter().filter_map(|&i| group.packed_of(i)).collect();
    let span_order = if packed.len() == idxs.len() {
        subgroup_generators(group.invariant_factors(), packed, order).size
    } else {
        0
    };
    let stated_orders = pred.components.clone();
    Ok(Some(GeneratorCheck {
        rule: pred.rule,
        labels: labels.into_iter().map(String::from).collect(),
        elements,
        orders_match: stated_orders == actual_orders,
        generates: span_order == order,
        stated_orders,
        actual_orders,
        span_order,
        group_order: order,
    }))
}
