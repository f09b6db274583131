//! Odd symplectic spaces in Darboux form: antibracket, BV Laplacian,
//! master equations, the observable differential and half-densities.
//!
//! Conventions. For a pair `(x, x†)` with `|x†| = |x| + 1`:
//!
//! * `Δ = Σ (-1)^{|x|} ∂_l/∂x ∂_l/∂x†`, so `Δ(x x†) = 1` for even `x`;
//! * the bracket is defined through the BV relation
//!   `Δ(fg) = Δf·g + (-1)^{|f|} f·Δg + (-1)^{|f|} (f, g)`, which gives `(x, x†) = 1`;
//! * `ϖ = Σ δx δx†` and the hamiltonian vector field of `S` has
//!   `Q(x) = ∂_l S/∂x†`, `Q(x†) = ∂_l S/∂x`, so that `ι_Q ϖ = δS`.

use std::collections::BTreeSet;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::algebra::json::{from_terms, to_terms, CoeffJson, TermJson};
use crate::algebra::scalar::{format_rational, real, Scalar, Series};
use crate::algebra::{Derivation, GenId, GeneratorTable, SuperPoly, EXACT};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BvPair {
    pub field: GenId,
    pub antifield: GenId,
}

/// A list of conjugate pairs over a shared generator table.
#[derive(Clone, Debug)]
pub struct BvSpace {
    table: Arc<GeneratorTable>,
    pairs: Vec<BvPair>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct GeneratorJson {
    pub name: String,
    pub ghost: i32,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct PairJson {
    pub field: GeneratorJson,
    pub antifield: GeneratorJson,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
pub struct BvSpaceJson {
    pub pairs: Vec<PairJson>,
}

impl BvSpaceJson {
    /// Pairs `(name, ghost)` with antifield `name†` of ghost `-1 - ghost`.
    pub fn from_fields(fields: &[(&str, i32)]) -> Self {
        BvSpaceJson {
            pairs: fields
                .iter()
                .map(|&(n, g)| PairJson {
                    field: GeneratorJson { name: n.to_string(), ghost: g },
                    antifield: GeneratorJson { name: format!("{n}†"), ghost: -1 - g },
                })
                .collect(),
        }
    }

    /// Builds a fresh table with every generator and its differential.
    pub fn build(&self) -> Result<BvSpace> {
        let mut b = GeneratorTable::builder();
        let mut ids = Vec::with_capacity(self.pairs.len());
        for p in &self.pairs {
            let x = b.coordinate(&p.field.name, p.field.ghost)?;
            let xd = b.coordinate(&p.antifield.name, p.antifield.ghost)?;
            ids.push(BvPair { field: x, antifield: xd });
        }
        BvSpace::new(&b.build(), ids)
    }
}

/// A BV space together with an action, as read by `qme-check`:
/// `{"pairs": [...], "action": [terms]}`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct QmeModelJson {
    #[serde(flatten)]
    pub space: BvSpaceJson,
    pub action: Vec<TermJson>,
}

#[derive(Clone, Debug, Serialize)]
pub struct QmeCheckReport {
    pub pairs: usize,
    pub classical: MasterEquationReport,
    pub quantum: MasterEquationReport,
}

impl QmeModelJson {
    /// Both master equations, with the action truncated at ħ^`order`.
    pub fn check(&self, order: i32) -> Result<QmeCheckReport> {
        let space = self.space.build()?;
        let s = from_terms(space.table(), &self.action, order)?;
        Ok(QmeCheckReport { pairs: space.len(), classical: space.check_cme(&s)?, quantum: space.check_qme(&s)? })
    }
}

impl BvSpace {
    pub fn new(table: &Arc<GeneratorTable>, pairs: Vec<BvPair>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for p in &pairs {
            let (f, a) = (table.get(p.field), table.get(p.antifield));
            if f.form_degree != 0 || a.form_degree != 0 {
                return Err(Error::FormDegree);
            }
            if a.ghost != -1 - f.ghost {
                return Err(Error::Invalid(format!(
                    "antifield `{}` has ghost {}, expected {}",
                    a.name,
                    a.ghost,
                    -1 - f.ghost
                )));
            }
            if !seen.insert(p.field) || !seen.insert(p.antifield) {
                return Err(Error::Invalid(format!("generator `{}` appears in two pairs", f.name)));
            }
        }
        Ok(BvSpace { table: table.clone(), pairs })
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str::<BvSpaceJson>(s)?.build()
    }

    pub fn to_json(&self) -> BvSpaceJson {
        let g = |id: GenId| GeneratorJson { name: self.table.name(id).to_string(), ghost: self.table.get(id).ghost };
        BvSpaceJson { pairs: self.pairs.iter().map(|p| PairJson { field: g(p.field), antifield: g(p.antifield) }).collect() }
    }

    pub fn table(&self) -> &Arc<GeneratorTable> {
        &self.table
    }

    pub fn pairs(&self) -> &[BvPair] {
        &self.pairs
    }

    pub fn pair(&self, i: usize) -> BvPair {
        self.pairs[i]
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// The space spanned by the listed pairs, over the same table.
    pub fn subspace(&self, indices: &[usize]) -> BvSpace {
        BvSpace { table: self.table.clone(), pairs: indices.iter().map(|&i| self.pairs[i]).collect() }
    }

    pub fn pair_index_of(&self, g: GenId) -> Option<usize> {
        self.pairs.iter().position(|p| p.field == g || p.antifield == g)
    }

    pub fn generators(&self) -> BTreeSet<GenId> {
        self.pairs.iter().flat_map(|p| [p.field, p.antifield]).collect()
    }

    pub fn field(&self, i: usize) -> SuperPoly {
        SuperPoly::generator(&self.table, self.pairs[i].field)
    }

    pub fn antifield(&self, i: usize) -> SuperPoly {
        SuperPoly::generator(&self.table, self.pairs[i].antifield)
    }

    fn check(&self, f: &SuperPoly) -> Result<()> {
        if !Arc::ptr_eq(f.table(), &self.table) {
            return Err(Error::TableMismatch);
        }
        if f.terms().any(|(m, _)| m.form_degree(&self.table) != 0) {
            return Err(Error::FormDegree);
        }
        Ok(())
    }

    /// The symplectic form `Σ δx δx†`.
    pub fn symplectic_form(&self) -> Result<SuperPoly> {
        let mut w = SuperPoly::zero(&self.table);
        for p in &self.pairs {
            let dx = self.table.differential(p.field)?;
            let dxd = self.table.differential(p.antifield)?;
            w = w.add(&SuperPoly::from_product(&self.table, Scalar::one(), 0, &[dx, dxd]));
        }
        Ok(w)
    }

    /// `Δf`.
    pub fn laplacian(&self, f: &SuperPoly) -> Result<SuperPoly> {
        self.check(f)?;
        Ok(self.laplacian_unchecked(f))
    }

    pub(crate) fn laplacian_unchecked(&self, f: &SuperPoly) -> SuperPoly {
        let mut out = SuperPoly::zero(&self.table).with_order(f.order());
        for p in &self.pairs {
            let inner = f.left_derivative(p.antifield);
            if inner.is_zero() {
                continue;
            }
            let term = inner.left_derivative(p.field);
            out = if self.table.get(p.field).is_odd() { out.sub(&term) } else { out.add(&term) };
        }
        out
    }

    /// The antibracket `(f, g)`, bilinear in inhomogeneous arguments.
    pub fn bracket(&self, f: &SuperPoly, g: &SuperPoly) -> Result<SuperPoly> {
        self.check(f)?;
        self.check(g)?;
        Ok(self.bracket_unchecked(f, g))
    }

    pub(crate) fn bracket_unchecked(&self, f: &SuperPoly, g: &SuperPoly) -> SuperPoly {
        let (f0, f1) = f.split_parity();
        let mut out = SuperPoly::zero(&self.table).with_order(f.order().min(g.order()));
        for (fp, pf) in [(f0, 0u8), (f1, 1u8)] {
            if fp.is_zero() {
                continue;
            }
            for p in &self.pairs {
                let px = self.table.parity(p.field);
                let a = fp.left_derivative(p.antifield).mul(&g.left_derivative(p.field));
                let b = fp.left_derivative(p.field).mul(&g.left_derivative(p.antifield));
                let sa = ((pf + px + 1) * px) % 2 == 1;
                let sb = (pf * (px + 1)) % 2 == 1;
                let mut t = if sa { a.neg() } else { a };
                t = if sb { t.sub(&b) } else { t.add(&b) };
                if (px + pf) % 2 == 1 {
                    t = t.neg();
                }
                out = out.add(&t);
            }
        }
        out
    }

    /// The bracket recovered from the BV relation; an independent route used in tests.
    pub fn bracket_via_relation(&self, f: &SuperPoly, g: &SuperPoly) -> Result<SuperPoly> {
        self.check(f)?;
        self.check(g)?;
        let (f0, f1) = f.split_parity();
        let mut out = SuperPoly::zero(&self.table).with_order(f.order().min(g.order()));
        for (fp, odd) in [(f0, false), (f1, true)] {
            let lhs = self.laplacian_unchecked(&fp.mul(g));
            let mut r = lhs.sub(&self.laplacian_unchecked(&fp).mul(g));
            let fdg = fp.mul(&self.laplacian_unchecked(g));
            r = if odd { r.add(&fdg).neg() } else { r.sub(&fdg) };
            out = out.add(&r);
        }
        Ok(out)
    }

    /// Quantum master equation residual `½(S,S) − iħΔS`.
    pub fn qme_residual(&self, s: &SuperPoly) -> Result<SuperPoly> {
        self.check(s)?;
        let half = real(BigRational::new(1.into(), 2.into()));
        let ss = self.bracket_unchecked(s, s).scale(&half);
        let ds = self.laplacian_unchecked(s).mul_i().shift_hbar(1);
        Ok(ss.sub(&ds))
    }

    pub fn check_qme(&self, s: &SuperPoly) -> Result<MasterEquationReport> {
        let residual = self.qme_residual(s)?;
        Ok(MasterEquationReport::new("quantum", s, residual))
    }

    /// Classical master equation `(S₀, S₀) = 0` on the ħ⁰ part.
    pub fn check_cme(&self, s: &SuperPoly) -> Result<MasterEquationReport> {
        self.check(s)?;
        let s0 = s.hbar_component(0);
        let residual = self.bracket_unchecked(&s0, &s0);
        Ok(MasterEquationReport::new("classical", s, residual))
    }

    /// `Ω(O) = (S, O) − iħΔO`.
    pub fn omega(&self, s: &SuperPoly, o: &SuperPoly) -> Result<SuperPoly> {
        self.check(s)?;
        self.check(o)?;
        Ok(self.bracket_unchecked(s, o).sub(&self.laplacian_unchecked(o).mul_i().shift_hbar(1)))
    }

    /// Hamiltonian vector field of `S`: `ι_Q ϖ = δS` on this space.
    pub fn hamiltonian_vector_field(&self, s: &SuperPoly) -> Result<Derivation> {
        self.check(s)?;
        let parity = s.parity().ok_or_else(|| Error::Structure("action is not parity-homogeneous".into()))?;
        let mut q = Derivation::new(&self.table, parity + 1);
        for p in &self.pairs {
            q.set(p.field, s.left_derivative(p.antifield))?;
            q.set(p.antifield, s.left_derivative(p.field))?;
        }
        Ok(q)
    }

    /// `e^{-iS/ħ} Δ(f e^{iS/ħ})` for even `S`:
    /// `Δf + (i/ħ)((S,f) + ΔS·f) − (1/2ħ²)(S,S)·f`.
    pub fn density_laplacian(&self, s: &SuperPoly, f: &SuperPoly) -> Result<SuperPoly> {
        self.check(s)?;
        self.check(f)?;
        let order = f.order().min(s.order());
        let raised = order.saturating_add(2);
        let (s, f) = (&s.clone().with_order(raised), &f.clone().with_order(raised));
        let mut out = self.laplacian_unchecked(f);
        let first = self.bracket_unchecked(s, f).add(&self.laplacian_unchecked(s).mul(f));
        out = out.add(&first.mul_i().shift_hbar(-1));
        let half = real(BigRational::new(1.into(), 2.into()));
        let second = self.bracket_unchecked(s, s).mul(f).scale(&half).shift_hbar(-2);
        Ok(out.sub(&second).with_order(order))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct HbarComponent {
    pub hbar: i32,
    pub terms: Vec<TermJson>,
}

/// Residual of a master equation, sorted by ħ power.
#[derive(Clone, Debug, Serialize)]
pub struct MasterEquationReport {
    pub kind: String,
    pub holds: bool,
    pub truncation_order: Option<i32>,
    pub truncated: bool,
    pub action_even: bool,
    pub action_ghost_zero: bool,
    pub residual: Vec<HbarComponent>,
    #[serde(skip)]
    pub residual_poly: SuperPoly,
}

impl MasterEquationReport {
    fn new(kind: &str, s: &SuperPoly, residual: SuperPoly) -> Self {
        MasterEquationReport {
            kind: kind.to_string(),
            holds: residual.is_zero(),
            truncation_order: (s.order() != EXACT).then_some(s.order()),
            truncated: residual.is_truncated(),
            action_even: s.parity() == Some(0),
            action_ghost_zero: s.ghost_degree() == Some(0),
            residual: by_hbar(&residual),
            residual_poly: residual,
        }
    }
}

pub fn by_hbar(p: &SuperPoly) -> Vec<HbarComponent> {
    let powers: BTreeSet<i32> = p.terms().flat_map(|(_, s)| s.iter().map(|(k, _)| k).collect::<Vec<_>>()).collect();
    powers.into_iter().map(|k| HbarComponent { hbar: k, terms: to_terms(&p.hbar_component(k)) }).collect()
}

/// Symbolic Gaussian constants multiplying a half-density:
/// `rational · |det|^{det_half_exponent/2} · (2πiħ)^{pi_hbar_half_exponent/2} · ħ^{hbar_exponent} · e^{(i/ħ)·phase}`.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalizationFactor {
    pub rational: Scalar,
    pub det: BigRational,
    pub det_half_exponent: i32,
    pub pi_hbar_half_exponent: i32,
    pub hbar_exponent: i32,
    pub phase: Series,
}

impl Default for NormalizationFactor {
    fn default() -> Self {
        NormalizationFactor {
            rational: Scalar::one(),
            det: BigRational::one(),
            det_half_exponent: 0,
            pi_hbar_half_exponent: 0,
            hbar_exponent: 0,
            phase: Series::zero(),
        }
    }
}

impl NormalizationFactor {
    pub fn is_trivial(&self) -> bool {
        *self == Self::default()
    }

    /// Product of two records; determinant parts combine when their half
    /// exponents agree or one of them is trivial.
    pub fn combine(&self, other: &NormalizationFactor) -> Result<NormalizationFactor> {
        let (det, det_half_exponent) = if other.det_half_exponent == 0 {
            (self.det.clone(), self.det_half_exponent)
        } else if self.det_half_exponent == 0 {
            (other.det.clone(), other.det_half_exponent)
        } else if self.det_half_exponent == other.det_half_exponent {
            (&self.det * &other.det, self.det_half_exponent)
        } else {
            return Err(Error::Invalid("cannot combine determinant records with different exponents".into()));
        };
        let mut phase = self.phase.clone();
        phase.add_assign(&other.phase);
        Ok(NormalizationFactor {
            rational: &self.rational * &other.rational,
            det,
            det_half_exponent,
            pi_hbar_half_exponent: self.pi_hbar_half_exponent + other.pi_hbar_half_exponent,
            hbar_exponent: self.hbar_exponent + other.hbar_exponent,
            phase,
        })
    }

    pub fn to_json(&self) -> NormalizationJson {
        NormalizationJson {
            rational: CoeffJson::from_scalar(&self.rational),
            det: format_rational(&self.det),
            det_half_exponent: self.det_half_exponent,
            pi_hbar_half_exponent: self.pi_hbar_half_exponent,
            hbar_exponent: self.hbar_exponent,
            phase: self.phase.iter().map(|(k, c)| (k, CoeffJson::from_scalar(c))).collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct NormalizationJson {
    pub rational: CoeffJson,
    pub det: String,
    pub det_half_exponent: i32,
    pub pi_hbar_half_exponent: i32,
    pub hbar_exponent: i32,
    pub phase: Vec<(i32, CoeffJson)>,
}

/// `μ^{1/2} · prefactor · e^{(i/ħ) log_weight}` times a normalization record,
/// relative to the Darboux Berezinian of `space`.
#[derive(Clone, Debug)]
pub struct HalfDensity {
    pub space: BvSpace,
    pub log_weight: SuperPoly,
    pub prefactor: SuperPoly,
    pub normalization: NormalizationFactor,
}

impl HalfDensity {
    /// `e^{(i/ħ)S}`; the constant term of `S` moves into the phase.
    pub fn exponential(space: &BvSpace, s: &SuperPoly) -> Self {
        let mut d = HalfDensity {
            space: space.clone(),
            log_weight: s.clone(),
            prefactor: SuperPoly::one(space.table()).with_order(s.order()),
            normalization: NormalizationFactor::default(),
        };
        d.normalize_constant();
        d
    }

    pub fn new(space: &BvSpace, s: &SuperPoly, prefactor: &SuperPoly) -> Self {
        let mut d = HalfDensity {
            space: space.clone(),
            log_weight: s.clone(),
            prefactor: prefactor.clone(),
            normalization: NormalizationFactor::default(),
        };
        d.normalize_constant();
        d
    }

    pub(crate) fn normalize_constant(&mut self) {
        let c = self.log_weight.constant_term();
        if !c.is_zero() {
            self.normalization.phase.add_assign(&c);
            let t = self.log_weight.table().clone();
            self.log_weight = self.log_weight.sub(&SuperPoly::from_term(&t, crate::algebra::Monomial::one(), c));
        }
    }

    /// Δ on the density, returned as a density with the same weight.
    pub fn laplacian(&self) -> Result<HalfDensity> {
        let prefactor = self.space.density_laplacian(&self.log_weight, &self.prefactor)?;
        Ok(HalfDensity { prefactor, ..self.clone() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::scalar::{imag_unit, real_int};

    fn space(fields: &[(&str, i32)]) -> BvSpace {
        BvSpaceJson::from_fields(fields).build().unwrap()
    }

    fn g(s: &BvSpace, n: &str) -> SuperPoly {
        SuperPoly::named(s.table(), n).unwrap()
    }

    #[test]
    fn darboux_normalization() {
        for ghost in [0, 1, -1, 2] {
            let s = space(&[("x", ghost)]);
            let (x, xd) = (g(&s, "x"), g(&s, "x†"));
            let one = SuperPoly::one(s.table());
            assert_eq!(s.bracket(&x, &xd).unwrap(), one, "ghost {ghost}");
            assert!(s.bracket(&x, &x).unwrap().is_zero());
            assert!(s.bracket(&xd, &xd).unwrap().is_zero());
            let expected = if ghost % 2 == 0 { one.clone() } else { one.neg() };
            assert_eq!(s.laplacian(&x.mul(&xd)).unwrap(), expected);
            assert!(s.laplacian(&one).unwrap().is_zero());
        }
    }

    #[test]
    fn bracket_routes_agree_on_x_xdag_squared() {
        for ghost in [0, 1] {
            let s = space(&[("x", ghost)]);
            let f = g(&s, "x").mul(&g(&s, "x†"));
            assert_eq!(s.bracket(&f, &f).unwrap(), s.bracket_via_relation(&f, &f).unwrap());
        }
        // even x: (x x†, x x†) = x x† - x x† = 0
        let s = space(&[("x", 0)]);
        let f = g(&s, "x").mul(&g(&s, "x†"));
        assert!(s.bracket(&f, &f).unwrap().is_zero());
    }

    #[test]
    fn two_pair_laplacian_by_double_derivative() {
        let s = space(&[("x", 0), ("y", 0)]);
        let f = g(&s, "x").mul(&g(&s, "x†")).mul(&g(&s, "y")).mul(&g(&s, "y†"));
        // Δ(x x† y y†) = y y† + x x† Δ(y y†) with signs from moving ∂ past x†
        let lap = s.laplacian(&f).unwrap();
        let direct = f
            .left_derivative(s.pair(0).antifield)
            .left_derivative(s.pair(0).field)
            .add(&f.left_derivative(s.pair(1).antifield).left_derivative(s.pair(1).field));
        assert_eq!(lap, direct);
        let expected = g(&s, "y").mul(&g(&s, "y†")).sub(&g(&s, "x").mul(&g(&s, "x†")));
        assert_eq!(lap, expected);
    }

    #[test]
    fn form_degree_inputs_rejected() {
        let s = space(&[("x", 0)]);
        let dx = g(&s, "δx");
        assert!(matches!(s.bracket(&dx, &dx), Err(Error::FormDegree)));
    }

    #[test]
    fn qme_examples() {
        let s = space(&[("x", 0), ("c", 1)]);
        assert!(s.check_qme(&SuperPoly::zero(s.table())).unwrap().holds);
        let lin = g(&s, "x").scale(&real_int(3));
        assert!(s.check_qme(&lin).unwrap().holds);
        // S = x† x c: (S,S) = 2 x† x c · ... ; residual equals the explicit bracket
        let act = g(&s, "x†").mul(&g(&s, "x")).mul(&g(&s, "c"));
        let rep = s.check_qme(&act).unwrap();
        let half = real(BigRational::new(1.into(), 2.into()));
        let expected = s.bracket_via_relation(&act, &act).unwrap().scale(&half)
            .sub(&s.laplacian(&act).unwrap().mul_i().shift_hbar(1));
        assert_eq!(rep.residual_poly, expected);
        assert!(!rep.holds);
    }

    #[test]
    fn omega_examples() {
        let s = space(&[("x", 0)]);
        let act = g(&s, "x").pow(2);
        let one = SuperPoly::one(s.table());
        assert!(s.omega(&act, &one).unwrap().is_zero());
        let o = g(&s, "x").mul(&g(&s, "x†"));
        let zero = SuperPoly::zero(s.table());
        let expected = s.laplacian(&o).unwrap().scale(&(-imag_unit())).shift_hbar(1);
        assert_eq!(s.omega(&zero, &o).unwrap(), expected);
    }

    #[test]
    fn hamiltonian_vector_field_contracts_to_delta_s() {
        let s = space(&[("x", 0), ("c", 1)]);
        let act = g(&s, "x†").mul(&g(&s, "c")).add(&g(&s, "x").pow(3));
        let q = s.hamiltonian_vector_field(&act).unwrap();
        let w = s.symplectic_form().unwrap();
        let lhs = crate::algebra::contract(&q, &w).unwrap();
        assert_eq!(lhs, crate::algebra::variational_differential(&act).unwrap());
    }

    #[test]
    fn ghost_mismatch_rejected() {
        let json = r#"{"pairs":[{"field":{"name":"x","ghost":0},"antifield":{"name":"x†","ghost":0}}]}"#;
        assert!(BvSpace::from_json(json).is_err());
        let ok = r#"{"pairs":[{"field":{"name":"x","ghost":0},"antifield":{"name":"x†","ghost":-1}}]}"#;
        let s = BvSpace::from_json(ok).unwrap();
        assert_eq!(s.to_json(), serde_json::from_str::<BvSpaceJson>(ok).unwrap());
    }

    #[test]
    fn density_laplacian_matches_series_expansion() {
        // Δ(e^{iS/ħ}) for S = x x† c† ... check the (S,S) and ΔS structure directly
        let s = space(&[("x", 0), ("c", 1)]);
        let act = g(&s, "x†").mul(&g(&s, "x")).mul(&g(&s, "c"));
        let one = SuperPoly::one(s.table());
        let lap = s.density_laplacian(&act, &one).unwrap();
        // (i/ħ)² · R with R the QME residual
        let r = s.qme_residual(&act).unwrap();
        assert_eq!(lap, r.neg().shift_hbar(-2));
    }
}
