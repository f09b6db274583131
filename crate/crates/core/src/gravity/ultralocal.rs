//! One-site BV pushforward of the quadratic v-action along `{v† = 0}`.

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use super::kernel::{KernelBasis, StandardFrame};
use super::quadform::{build_quadratic_matrix, QuadForm};
use crate::algebra::json::{to_terms, TermJson};
use crate::algebra::scalar::{format_rational, imag_unit, real, rat};
use crate::algebra::{Scalar, SuperPoly};
use crate::bv::{BvSpace, BvSpaceJson, HalfDensity, NormalizationJson};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::pushforward::{bv_pushforward, LagrangianSpec, SplitSpec};

/// Base fields: an even `y` and a ghost `c`; fiber: one even `v_k` per kernel coordinate.
#[derive(Clone, Debug)]
pub struct UltralocalModel {
    pub kernel: KernelBasis,
    pub quad: QuadForm,
    pub lambda: BigRational,
    pub space: BvSpace,
    pub split: SplitSpec,
    pub base_action: SuperPoly,
    pub action: SuperPoly,
}

const BASE_FIELDS: usize = 2;

pub fn ultralocal_model(n: usize, lambda: BigRational, with_base_action: bool, order: i32) -> Result<UltralocalModel> {
    if lambda.is_zero() {
        return Err(Error::Invalid("λ must be nonzero".into()));
    }
    let kernel = KernelBasis::solve(&StandardFrame::new(n)?)?;
    let quad = build_quadratic_matrix(&kernel);
    let mut fields: Vec<(String, i32)> = vec![("y".into(), 0), ("c".into(), 1)];
    fields.extend(kernel.labels.iter().map(|l| (l.ident(), 0)));
    let refs: Vec<(&str, i32)> = fields.iter().map(|(s, g)| (s.as_str(), *g)).collect();
    let space = BvSpaceJson::from_fields(&refs).build()?;
    let t = space.table().clone();
    let base_action = if with_base_action {
        // antifield-free, so it solves the QME on its own
        space.field(0).pow(2).scale_rational(&rat(1, 2)).add(&space.field(0).pow(3).scale_rational(&rat(1, 3)))
    } else {
        SuperPoly::zero(&t)
    };
    let dim = kernel.dim();
    let half_lambda = &lambda * rat(1, 2);
    let mut action = base_action.clone();
    for i in 0..dim {
        for j in 0..dim {
            let m = quad.m.get(i, j);
            if !m.is_zero() {
                let term = space.field(BASE_FIELDS + i).mul(&space.field(BASE_FIELDS + j));
                action = action.add(&term.scale_rational(&(m * &half_lambda)));
            }
        }
    }
    let split = SplitSpec::new((BASE_FIELDS..BASE_FIELDS + dim).collect());
    Ok(UltralocalModel {
        kernel,
        quad,
        lambda,
        space,
        split,
        base_action: base_action.with_order(order),
        action: action.with_order(order),
    })
}

/// Sum over perfect matchings of `idx` of `∏ C[i][j]`.
pub fn pairing_sum(idx: &[usize], c: &Matrix) -> BigRational {
    if idx.is_empty() {
        return BigRational::one();
    }
    if idx.len() % 2 == 1 {
        return BigRational::zero();
    }
    let first = idx[0];
    let mut total = BigRational::zero();
    for k in 1..idx.len() {
        let w = c.get(first, idx[k]);
        if w.is_zero() {
            continue;
        }
        let rest: Vec<usize> = idx[1..].iter().enumerate().filter(|(j, _)| *j + 1 != k).map(|(_, &x)| x).collect();
        total += w * pairing_sum(&rest, c);
    }
    total
}

/// `λ⁻¹M⁻¹`, column by column through a linear solve.
pub fn propagator(quad: &QuadForm, lambda: &BigRational) -> Result<Matrix> {
    let d = quad.m.rows();
    let mut c = Matrix::zeros(d, d);
    for j in 0..d {
        let mut e = vec![BigRational::zero(); d];
        e[j] = BigRational::one();
        let x = quad.m.solve(&e).ok_or_else(|| Error::Structure("quadratic form is singular".into()))?;
        for (i, xi) in x.into_iter().enumerate() {
            c.set(i, j, xi / lambda);
        }
    }
    Ok(c)
}

#[derive(Clone, Debug, Serialize)]
pub struct PropagatorCheck {
    pub observable: Vec<String>,
    pub pushed: Vec<TermJson>,
    pub oracle: Vec<TermJson>,
    pub agree: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct UltralocalReport {
    pub n: usize,
    pub lambda: String,
    pub fiber_dimension: usize,
    pub base_action: Vec<TermJson>,
    pub effective_action: Vec<TermJson>,
    pub action_matches_base: bool,
    pub fiber_independent: bool,
    pub prefactor_is_one: bool,
    pub normalization: NormalizationJson,
    /// `det(λM)`.
    pub expected_det: String,
    pub det_matches: bool,
    pub qme_in: bool,
    pub qme_out: bool,
    pub propagators: Vec<PropagatorCheck>,
    pub propagators_agree: usize,
    pub passed: bool,
}

/// Which observables to insert.
#[derive(Clone, Debug)]
pub enum Insertions {
    None,
    /// Every `v_i v_j` with `i ≤ j`.
    AllPairs,
    /// Explicit index lists.
    List(Vec<Vec<usize>>),
}

impl Insertions {
    fn lists(&self, dim: usize) -> Vec<Vec<usize>> {
        match self {
            Insertions::None => Vec::new(),
            Insertions::AllPairs => (0..dim).flat_map(|i| (i..dim).map(move |j| vec![i, j])).collect(),
            Insertions::List(l) => l.clone(),
        }
    }
}

pub fn ultralocal_pushforward(model: &UltralocalModel, insertions: &Insertions) -> Result<UltralocalReport> {
    let space = &model.space;
    let t = space.table().clone();
    let dim = model.kernel.dim();
    let l = LagrangianSpec::antifields_zero(dim);
    let dens = HalfDensity::exponential(space, &model.action);
    let pushed = bv_pushforward(&dens, &model.split, &l)?;
    let fiber = model.split.fiber(space).generators();
    let fiber_independent = pushed.log_weight.generators().is_disjoint(&fiber) && pushed.prefactor.generators().is_disjoint(&fiber);
    let action_matches_base = pushed.log_weight.sub(&model.base_action).is_zero();
    let prefactor_is_one = pushed.prefactor.sub(&SuperPoly::one(&t)).is_zero();
    let expected_det = model.quad.m.scale(&model.lambda).determinant()?;
    let det_matches = pushed.normalization.det == expected_det && pushed.normalization.det_half_exponent == -1;
    let qme_in = space.check_qme(&model.action)?.holds;
    let qme_out = pushed.space.check_qme(&pushed.log_weight)?.holds;

    let c = propagator(&model.quad, &model.lambda)?;
    let mut propagators = Vec::new();
    for idx in insertions.lists(dim) {
        if idx.iter().any(|&i| i >= dim) {
            return Err(Error::Invalid(format!("observable index out of range: {idx:?}")));
        }
        let o = idx.iter().fold(SuperPoly::one(&t), |acc, &i| acc.mul(&space.field(BASE_FIELDS + i)));
        let with_o = HalfDensity::new(space, &model.action, &o.with_order(model.action.order()));
        let out = bv_pushforward(&with_o, &model.split, &l)?;
        let k = (idx.len() / 2) as i32;
        let phase = (0..k).fold(Scalar::one(), |acc, _| acc * imag_unit());
        let value = if idx.len() % 2 == 0 { pairing_sum(&idx, &c) } else { BigRational::zero() };
        let oracle = SuperPoly::from_product(&t, phase * real(value), k, &[]).with_order(model.action.order());
        let agree = out.prefactor.sub(&oracle).is_zero() && out.normalization == pushed.normalization;
        propagators.push(PropagatorCheck {
            observable: idx.iter().map(|&i| model.kernel.labels[i].to_string()).collect(),
            pushed: to_terms(&out.prefactor),
            oracle: to_terms(&oracle),
            agree,
        });
    }
    let propagators_agree = propagators.iter().filter(|p| p.agree).count();
    let passed = fiber_independent && action_matches_base && prefactor_is_one && det_matches && qme_in && qme_out && propagators_agree == propagators.len();
    Ok(UltralocalReport {
        n: model.kernel.n(),
        lambda: format_rational(&model.lambda),
        fiber_dimension: dim,
        base_action: to_terms(&model.base_action),
        effective_action: to_terms(&pushed.log_weight),
        action_matches_base,
        fiber_independent,
        prefactor_is_one,
        normalization: pushed.normalization.to_json(),
        expected_det: format_rational(&expected_det),
        det_matches,
        qme_in,
        qme_out,
        propagators,
        propagators_agree,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::scalar::int;

    #[test]
    fn pairings() {
        let c = Matrix::from_i64(&[&[1, 2], &[2, 5]]);
        assert_eq!(pairing_sum(&[0, 1], &c), int(2));
        // ⟨x⁴⟩ = 3C₀₀²
        assert_eq!(pairing_sum(&[0, 0, 0, 0], &c), int(3));
        // ⟨x₀²x₁²⟩ = C₀₀C₁₁ + 2C₀₁²
        assert_eq!(pairing_sum(&[0, 0, 1, 1], &c), int(13));
    }

    #[test]
    fn four_dimensional_fiber() {
        let m = ultralocal_model(4, int(1), false, 2).unwrap();
        let r = ultralocal_pushforward(&m, &Insertions::AllPairs).unwrap();
        assert!(r.passed, "{}", serde_json::to_string_pretty(&r).unwrap());
        assert!(r.effective_action.is_empty());
        assert_eq!(r.propagators.len(), 21);
    }

    #[test]
    fn base_action_survives_and_four_point_matches() {
        let m = ultralocal_model(4, rat(3, 2), true, 2).unwrap();
        let r = ultralocal_pushforward(&m, &Insertions::List(vec![vec![0, 1, 2, 3], vec![3, 3, 4, 5], vec![0, 1, 2]])).unwrap();
        assert!(r.passed, "{}", serde_json::to_string_pretty(&r).unwrap());
        assert!(!r.effective_action.is_empty());
    }
}
