//! Seeded random polynomials for the property suites.

use std::sync::Arc;

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::scalar::{real, Scalar, Series};
use crate::algebra::{GenId, GeneratorTable, Monomial, SuperPoly};

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Nonzero rational `p/q` with `|p| ≤ 5`, `q ∈ 1..=3`.
pub fn rational(rng: &mut TestRng) -> BigRational {
    let mut p: i64 = rng.gen_range(1..=5);
    if rng.gen_bool(0.5) {
        p = -p;
    }
    let q: i64 = rng.gen_range(1..=3);
    BigRational::new(p.into(), q.into())
}

pub fn scalar(rng: &mut TestRng, complex: bool) -> Scalar {
    if complex && rng.gen_bool(0.3) {
        Scalar::new(rational(rng), rational(rng))
    } else {
        real(rational(rng))
    }
}

/// Shape constraints for [`poly`].
#[derive(Clone, Debug)]
pub struct PolyShape {
    pub max_degree: u32,
    pub terms: usize,
    pub parity: Option<u8>,
    pub ghost: Option<i32>,
    pub max_hbar: i32,
    pub complex: bool,
    pub constant: bool,
}

impl Default for PolyShape {
    fn default() -> Self {
        PolyShape { max_degree: 3, terms: 4, parity: None, ghost: None, max_hbar: 0, complex: false, constant: true }
    }
}

/// Random monomial of total degree `1..=max_degree` in `gens` (or the unit when `max_degree = 0`).
pub fn monomial(rng: &mut TestRng, table: &Arc<GeneratorTable>, gens: &[GenId], max_degree: u32) -> Option<SuperPoly> {
    if gens.is_empty() || max_degree == 0 {
        return Some(SuperPoly::one(table));
    }
    let deg = rng.gen_range(1..=max_degree);
    let mut ids = Vec::with_capacity(deg as usize);
    for _ in 0..deg {
        ids.push(gens[rng.gen_range(0..gens.len())]);
    }
    let p = SuperPoly::from_product(table, real(BigRational::from_integer(1.into())), 0, &ids);
    (!p.is_zero()).then_some(p)
}

/// Random polynomial in `gens` subject to `shape`, found by rejection
/// sampling of monomials (gives up on a monomial after a bounded number of tries).
pub fn poly(rng: &mut TestRng, table: &Arc<GeneratorTable>, gens: &[GenId], shape: &PolyShape) -> SuperPoly {
    let order = shape.max_hbar.max(crate::algebra::DEFAULT_HBAR_ORDER);
    let mut out = SuperPoly::zero(table).with_order(order);
    for _ in 0..shape.terms {
        for _attempt in 0..40 {
            let max_deg = if shape.constant && rng.gen_bool(0.15) { 0 } else { shape.max_degree };
            let Some(m) = monomial(rng, table, gens, max_deg) else { continue };
            let (mono, _) = m.terms().next().map(|(k, v)| (k.clone(), v.clone())).unwrap_or((Monomial::one(), Series::one()));
            if shape.parity.is_some_and(|p| mono.parity(table) != p) {
                continue;
            }
            if shape.ghost.is_some_and(|g| mono.ghost(table) != g) {
                continue;
            }
            let k = if shape.max_hbar > 0 { rng.gen_range(0..=shape.max_hbar) } else { 0 };
            let c = scalar(rng, shape.complex);
            out.add_series(mono, &Series::monomial(k, c));
            break;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bv::BvSpaceJson;

    #[test]
    fn seeded_generation_is_deterministic() {
        let s = BvSpaceJson::from_fields(&[("x", 0), ("c", 1)]).build().unwrap();
        let gens: Vec<GenId> = s.generators().into_iter().collect();
        let shape = PolyShape { parity: Some(0), ..Default::default() };
        let a = poly(&mut rng(7), s.table(), &gens, &shape);
        let b = poly(&mut rng(7), s.table(), &gens, &shape);
        assert_eq!(a, b);
        assert_eq!(a.parity(), Some(0));
    }
}
