//! BV pushforward along a Lagrangian in a fiber factor.
//!
//! Odd fiber coordinates are integrated by Berezin integration (iterated left
//! derivatives in listed order, `∫dθ θ = 1`); even fiber coordinates by formal
//! Gaussian integration against `e^{(i/ħ)·½ xᵀKx}` with propagator
//! `⟨x_i x_j⟩ = iħ (K⁻¹)_{ij}`.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::json::{from_terms, to_terms, TermJson};
use crate::algebra::scalar::{format_rational, imag_unit, real, Scalar, Series};
use crate::algebra::{GenId, GeneratorTable, Monomial, SuperPoly, DEFAULT_HBAR_ORDER, EXACT};
use crate::bv::{BvSpace, HalfDensity, NormalizationFactor};
use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// `F = F₁ × F₂`: the listed pairs form the fiber, the rest the base.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub fiber_pairs: Vec<usize>,
}

impl SplitSpec {
    pub fn new(fiber_pairs: Vec<usize>) -> Self {
        SplitSpec { fiber_pairs }
    }

    /// Every pair is in the fiber.
    pub fn all(space: &BvSpace) -> Self {
        SplitSpec { fiber_pairs: (0..space.len()).collect() }
    }

    pub fn validate(&self, space: &BvSpace) -> Result<()> {
        let mut seen = BTreeSet::new();
        for &i in &self.fiber_pairs {
            if i >= space.len() || !seen.insert(i) {
                return Err(Error::Invalid(format!("bad fiber pair index {i}")));
            }
        }
        Ok(())
    }

    pub fn base_pairs(&self, space: &BvSpace) -> Vec<usize> {
        (0..space.len()).filter(|i| !self.fiber_pairs.contains(i)).collect()
    }

    pub fn base(&self, space: &BvSpace) -> BvSpace {
        space.subspace(&self.base_pairs(space))
    }

    pub fn fiber(&self, space: &BvSpace) -> BvSpace {
        space.subspace(&self.fiber_pairs)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Integrate {
    Field,
    Antifield,
}

/// A Lagrangian in the fiber: per fiber pair the integrated member, the
/// other member being fixed to the gradient of the gauge fermion.
///
/// For an integrated coordinate `q` with partner `p` (`ϖ = δq δp`), the
/// constraint is `p = (-1)^{|q|} ∂_l Ψ/∂q`. `Ψ` must be odd and depend only
/// on integrated coordinates.
#[derive(Clone, Debug)]
pub struct LagrangianSpec {
    pub choices: Vec<Integrate>,
    pub gauge_fermion: Option<SuperPoly>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LagrangianJson {
    pub choices: Vec<Integrate>,
    #[serde(default)]
    pub gauge_fermion: Option<Vec<TermJson>>,
}

/// Resolved gauge fixing: integrated coordinates in fiber order and the
/// images of the constrained ones.
#[derive(Clone, Debug)]
pub struct GaugeFixing {
    pub integrated: Vec<GenId>,
    pub constrained: Vec<GenId>,
    pub images: HashMap<GenId, SuperPoly>,
}

impl LagrangianSpec {
    /// `{antifields = 0}` on `n` fiber pairs.
    pub fn antifields_zero(n: usize) -> Self {
        LagrangianSpec { choices: vec![Integrate::Field; n], gauge_fermion: None }
    }

    pub fn with_gauge_fermion(mut self, psi: SuperPoly) -> Self {
        self.gauge_fermion = Some(psi);
        self
    }

    pub fn from_json(table: &Arc<GeneratorTable>, j: &LagrangianJson) -> Result<Self> {
        let gauge_fermion = match &j.gauge_fermion {
            Some(t) => Some(from_terms(table, t, EXACT)?),
            None => None,
        };
        Ok(LagrangianSpec { choices: j.choices.clone(), gauge_fermion })
    }

    pub fn to_json(&self) -> LagrangianJson {
        LagrangianJson { choices: self.choices.clone(), gauge_fermion: self.gauge_fermion.as_ref().map(to_terms) }
    }

    pub fn resolve(&self, space: &BvSpace, split: &SplitSpec) -> Result<GaugeFixing> {
        split.validate(space)?;
        if self.choices.len() != split.fiber_pairs.len() {
            return Err(Error::Invalid(format!(
                "{} Lagrangian choices for {} fiber pairs",
                self.choices.len(),
                split.fiber_pairs.len()
            )));
        }
        let table = space.table();
        let mut integrated = Vec::new();
        let mut constrained = Vec::new();
        for (&i, &c) in split.fiber_pairs.iter().zip(&self.choices) {
            let p = space.pair(i);
            let (q, r) = match c {
                Integrate::Field => (p.field, p.antifield),
                Integrate::Antifield => (p.antifield, p.field),
            };
            integrated.push(q);
            constrained.push(r);
        }
        let mut images = HashMap::new();
        match &self.gauge_fermion {
            None => {
                for &r in &constrained {
                    images.insert(r, SuperPoly::zero(table));
                }
            }
            Some(psi) => {
                if !Arc::ptr_eq(psi.table(), table) {
                    return Err(Error::TableMismatch);
                }
                if psi.parity() != Some(1) && !psi.is_zero() {
                    return Err(Error::Invalid("gauge fermion must be odd".into()));
                }
                if let Some(g) = psi.generators().into_iter().find(|g| !integrated.contains(g)) {
                    return Err(Error::Invalid(format!(
                        "gauge fermion depends on `{}`, which is not an integrated fiber coordinate",
                        table.name(g)
                    )));
                }
                for (&q, &r) in integrated.iter().zip(&constrained) {
                    let d = psi.left_derivative(q);
                    images.insert(r, if table.get(q).is_odd() { d.neg() } else { d });
                }
            }
        }
        Ok(GaugeFixing { integrated, constrained, images })
    }
}

/// Even integrated coordinates with their quadratic core, linear sources and
/// the remaining (perturbative) part of the fiber action.
#[derive(Clone, Debug)]
pub struct GaussianData {
    pub coords: Vec<GenId>,
    pub quad_form: Matrix,
    pub sources: Vec<SuperPoly>,
    pub remainder: SuperPoly,
}

impl GaussianData {
    /// Gaussian data with no sources or remainder.
    pub fn pure(table: &Arc<GeneratorTable>, coords: Vec<GenId>, quad_form: Matrix) -> Self {
        let n = coords.len();
        GaussianData { coords, quad_form, sources: vec![SuperPoly::zero(table); n], remainder: SuperPoly::zero(table) }
    }

    fn check_nondegenerate(&self, table: &GeneratorTable) -> Result<BigRational> {
        if !self.quad_form.is_symmetric() || self.quad_form.rows() != self.coords.len() {
            return Err(Error::Invalid("quadratic form must be symmetric and match the coordinates".into()));
        }
        let det = self.quad_form.determinant()?;
        if det.is_zero() {
            let kernel = self.quad_form.kernel().into_iter().next().unwrap_or_default();
            return Err(Error::DegenerateQuadraticCore {
                coords: self.coords.iter().map(|g| table.name(*g).to_string()).collect(),
                kernel: kernel.iter().map(format_rational).collect(),
            });
        }
        Ok(det)
    }
}

/// `∫ dθ_1 … dθ_k f`: left derivatives applied in listed order, `∂_{θ_1}` first.
pub fn berezin_integrate(f: &SuperPoly, odd: &[GenId]) -> Result<SuperPoly> {
    let table = f.table();
    for &g in odd {
        if g >= table.len() {
            return Err(Error::UnknownGenerator(format!("#{g}")));
        }
        let gen = table.get(g);
        if !gen.is_odd() || gen.form_degree != 0 {
            return Err(Error::EvenCoordinate(gen.name.clone()));
        }
    }
    let mut out = f.clone();
    for &g in odd {
        out = out.left_derivative(g);
    }
    Ok(out)
}

/// Rational parts of Gaussian moments: `⟨x^β⟩ = (iħ)^{|β|/2} · m(β)` for the
/// propagator matrix `C = K⁻¹`.
pub struct Moments {
    c: Matrix,
    memo: HashMap<Vec<u32>, BigRational>,
}

impl Moments {
    pub fn new(c: Matrix) -> Self {
        Moments { c, memo: HashMap::new() }
    }

    /// Recursion `⟨x_i x^γ⟩ = Σ_j C_ij γ_j ⟨x^{γ − e_j}⟩`.
    pub fn get(&mut self, beta: &[u32]) -> BigRational {
        let total: u32 = beta.iter().sum();
        if total == 0 {
            return BigRational::one();
        }
        if total % 2 == 1 {
            return BigRational::zero();
        }
        if let Some(v) = self.memo.get(beta) {
            return v.clone();
        }
        let i = beta.iter().position(|&b| b > 0).unwrap();
        let mut gamma = beta.to_vec();
        gamma[i] -= 1;
        let mut acc = BigRational::zero();
        for j in 0..gamma.len() {
            if gamma[j] == 0 || self.c.get(i, j).is_zero() {
                continue;
            }
            let mut rest = gamma.clone();
            rest[j] -= 1;
            let m = self.get(&rest);
            acc += self.c.get(i, j) * BigRational::from_integer(gamma[j].into()) * m;
        }
        self.memo.insert(beta.to_vec(), acc.clone());
        acc
    }
}

/// Formal Gaussian integral of `prefactor` over `gd.coords`; sources and
/// remainder in `gd` are ignored here (see [`bv_pushforward`]).
pub fn wick_integrate(prefactor: &SuperPoly, gd: &GaussianData) -> Result<(SuperPoly, NormalizationFactor)> {
    let table = prefactor.table();
    let det = gd.check_nondegenerate(table)?;
    let inv = gd.quad_form.inverse()?;
    let mut moments = Moments::new(inv);
    let out = wick_with(prefactor, &gd.coords, &mut moments);
    let norm = NormalizationFactor {
        det,
        det_half_exponent: -1,
        pi_hbar_half_exponent: gd.coords.len() as i32,
        ..NormalizationFactor::default()
    };
    Ok((out, norm))
}

fn wick_with(f: &SuperPoly, coords: &[GenId], moments: &mut Moments) -> SuperPoly {
    let table = f.table();
    let index: HashMap<GenId, usize> = coords.iter().enumerate().map(|(i, g)| (*g, i)).collect();
    let mut out = SuperPoly::zero(table).with_order(f.order());
    for (m, s) in f.terms() {
        let (gauss, rest) = m.partition(|g| index.contains_key(&g));
        let mut beta = vec![0u32; coords.len()];
        for &(g, e) in gauss.factors() {
            beta[index[&g]] = e;
        }
        let total: u32 = beta.iter().sum();
        if total % 2 == 1 {
            continue;
        }
        let r = moments.get(&beta);
        if r.is_zero() {
            continue;
        }
        let half = (total / 2) as i32;
        let phase = imag_unit_pow(half);
        let c = real(r) * phase;
        out.add_series(rest, &s.scale(&c).shift(half));
    }
    let o = out.order();
    out.with_order(o)
}

fn imag_unit_pow(n: i32) -> Scalar {
    match n.rem_euclid(4) {
        0 => Scalar::one(),
        1 => imag_unit(),
        2 => -Scalar::one(),
        _ => -imag_unit(),
    }
}

/// Result of splitting a gauge-fixed fiber action.
struct FiberAction {
    base: SuperPoly,
    gaussian: GaussianData,
}

fn split_fiber_action(s: &SuperPoly, even: &[GenId], odd: &[GenId]) -> Result<FiberAction> {
    let table = s.table().clone();
    let idx: HashMap<GenId, usize> = even.iter().enumerate().map(|(i, g)| (*g, i)).collect();
    let odd_set: BTreeSet<GenId> = odd.iter().copied().collect();
    let n = even.len();
    let mut base = SuperPoly::zero(&table).with_order(s.order());
    let mut remainder = SuperPoly::zero(&table).with_order(s.order());
    let mut k = Matrix::zeros(n, n);
    let mut sources = vec![SuperPoly::zero(&table).with_order(s.order()); n];
    for (m, series) in s.terms() {
        let (gauss, rest) = m.partition(|g| idx.contains_key(&g));
        let has_odd = m.factors().iter().any(|(g, _)| odd_set.contains(g));
        if gauss.is_one() && !has_odd {
            base.add_series(m.clone(), series);
            continue;
        }
        if let Some(p) = series.min_power() {
            if p < 0 {
                return Err(Error::NonPolynomial(format!("action term with ħ^{p}")));
            }
        }
        let d = gauss.degree();
        let mut higher = series.clone();
        let c0 = series.coeff(0);
        if !has_odd && !c0.is_zero() {
            if d == 2 && rest.is_one() && c0.im.is_zero() {
                let f = gauss.factors();
                let (i, j) = if f.len() == 1 { (idx[&f[0].0], idx[&f[0].0]) } else { (idx[&f[0].0], idx[&f[1].0]) };
                if i == j {
                    k.add_at(i, i, &(c0.re.clone() * BigRational::from_integer(2.into())));
                } else {
                    k.add_at(i, j, &c0.re);
                    k.add_at(j, i, &c0.re);
                }
                higher.add_term(0, -c0);
            } else if d == 1 {
                let i = idx[&gauss.factors()[0].0];
                sources[i].add_series(rest.clone(), &Series::constant(c0.clone()));
                higher.add_term(0, -c0);
            }
        }
        if !higher.is_zero() {
            remainder.add_series(m.clone(), &higher);
        }
    }
    check_perturbative(&remainder, &idx.keys().copied().collect(), "after gauge fixing")?;
    Ok(FiberAction { base, gaussian: GaussianData { coords: even.to_vec(), quad_form: k, sources, remainder } })
}

/// Every perturbative term must be nilpotent or ħ-suppressed, otherwise the
/// series in `R` does not terminate.
fn check_perturbative(r: &SuperPoly, even: &BTreeSet<GenId>, when: &str) -> Result<()> {
    let table = r.table();
    for (m, series) in r.terms() {
        let d = m.partition(|g| even.contains(&g)).0.degree() as i64;
        let nilpotent = m.factors().iter().any(|(g, _)| table.get(*g).is_odd());
        for (p, _) in series.iter() {
            if !nilpotent && 2 * p as i64 - 2 + d <= 0 {
                let mono = SuperPoly::from_term(table, m.clone(), Series::monomial(p, Scalar::one()));
                return Err(Error::NonPolynomial(format!("term {mono} is neither nilpotent nor suppressed in ħ {when}")));
            }
        }
    }
    Ok(())
}

/// Drops terms whose Gaussian ħ-weight `k + d/2` exceeds `max_twice / 2`.
fn prune(p: &SuperPoly, even: &BTreeSet<GenId>, max_twice: i64) -> SuperPoly {
    let mut out = SuperPoly::zero(p.table()).with_order(p.order());
    for (m, s) in p.terms() {
        let d: i64 = m.factors().iter().filter(|(g, _)| even.contains(g)).map(|(_, e)| *e as i64).sum();
        let mut kept = Series::zero();
        for (k, c) in s.iter() {
            if 2 * k as i64 + d <= max_twice {
                kept.add_term(k, c.clone());
            }
        }
        if !kept.is_zero() {
            out.add_series(m.clone(), &kept);
        }
    }
    out
}

impl HalfDensity {
    /// The truncation order carried by the density (default when exact).
    pub fn order(&self) -> i32 {
        let o = self.prefactor.order().min(self.log_weight.order());
        if o == EXACT {
            DEFAULT_HBAR_ORDER
        } else {
            o
        }
    }

    pub fn with_order(&self, order: i32) -> HalfDensity {
        HalfDensity {
            log_weight: self.log_weight.clone().with_order(order),
            prefactor: self.prefactor.clone().with_order(order),
            ..self.clone()
        }
    }
}

/// `P_L`: integrates the fiber of `split` along `l`, truncated at the
/// density's ħ order.
pub fn bv_pushforward(dens: &HalfDensity, split: &SplitSpec, l: &LagrangianSpec) -> Result<HalfDensity> {
    bv_pushforward_to_order(dens, split, l, dens.order())
}

pub fn bv_pushforward_to_order(dens: &HalfDensity, split: &SplitSpec, l: &LagrangianSpec, order: i32) -> Result<HalfDensity> {
    let space = &dens.space;
    let table = space.table().clone();
    let gf = l.resolve(space, split)?;
    if dens.log_weight.parity() != Some(0) {
        return Err(Error::Structure("log weight must be even".into()));
    }
    let even: Vec<GenId> = gf.integrated.iter().copied().filter(|g| !table.get(*g).is_odd()).collect();
    let odd: Vec<GenId> = gf.integrated.iter().copied().filter(|g| table.get(*g).is_odd()).collect();

    let mut images = gf.images.clone();
    let s = dens.log_weight.substitute(&images);
    let fa = split_fiber_action(&s, &even, &odd)?;
    let gd = fa.gaussian;
    let n_odd = gd.remainder.generators().iter().filter(|g| table.get(**g).is_odd()).count() as i32;
    let internal = order.saturating_add(n_odd + 1);

    let mut norm = dens.normalization.clone();
    let (inv, s_tree) = if even.is_empty() {
        (Matrix::zeros(0, 0), SuperPoly::zero(&table))
    } else {
        let det = gd.check_nondegenerate(&table)?;
        norm = norm.combine(&NormalizationFactor {
            det,
            det_half_exponent: -1,
            pi_hbar_half_exponent: even.len() as i32,
            ..NormalizationFactor::default()
        })?;
        let inv = gd.quad_form.inverse()?;
        // x ↦ x − K⁻¹J completes the square, leaving −½ JᵀK⁻¹J
        let mut tree = SuperPoly::zero(&table).with_order(internal);
        for i in 0..even.len() {
            let mut shift = SuperPoly::zero(&table).with_order(internal);
            for j in 0..even.len() {
                if !inv.get(i, j).is_zero() && !gd.sources[j].is_zero() {
                    shift = shift.add(&gd.sources[j].scale_rational(inv.get(i, j)));
                }
            }
            if !shift.is_zero() {
                tree = tree.sub(&gd.sources[i].mul(&shift).scale_rational(&BigRational::new(1.into(), 2.into())));
                images.insert(even[i], SuperPoly::generator(&table, even[i]).sub(&shift).with_order(internal));
            }
        }
        (inv, tree)
    };
    let even_set: BTreeSet<GenId> = even.iter().copied().collect();
    let shift_images: HashMap<GenId, SuperPoly> = even.iter().filter_map(|g| images.get(g).map(|p| (*g, p.clone()))).collect();

    let f = dens.prefactor.clone().with_order(internal).substitute(&gf.images);
    let f = if shift_images.is_empty() { f } else { f.substitute(&shift_images) };
    let r = gd.remainder.clone().with_order(internal);
    let r = if shift_images.is_empty() { r } else { r.substitute(&shift_images) };
    // the shift can feed base coordinates into cubic and higher vertices
    check_perturbative(&r, &even_set, "after completing the square")?;
    let ir = r.mul_i().shift_hbar(-1);

    let cap = 2 * internal as i64;
    let mut term = prune(&f, &even_set, cap);
    let mut acc = term.clone();
    let mut n = 1i64;
    while !term.is_zero() {
        term = prune(&term.mul(&ir), &even_set, cap).scale_rational(&BigRational::new(1.into(), n.into()));
        acc = acc.add(&term);
        n += 1;
        if n > 10_000 {
            return Err(Error::Internal("perturbative series failed to terminate".into()));
        }
    }

    let integrated = berezin_integrate(&acc, &odd)?;
    let result = if even.is_empty() { integrated } else { wick_with(&integrated, &even, &mut Moments::new(inv)) };
    let prefactor = result.with_order(order);
    let fiber: BTreeSet<GenId> = split.fiber(space).generators();
    if let Some(g) = prefactor.generators().into_iter().find(|g| fiber.contains(g)) {
        return Err(Error::Internal(format!("fiber generator `{}` survived integration", table.name(g))));
    }
    let log_weight = fa.base.add(&s_tree).with_order(order);
    if let Some(g) = log_weight.generators().into_iter().find(|g| fiber.contains(g)) {
        return Err(Error::Internal(format!("fiber generator `{}` survived in the action", table.name(g))));
    }
    let mut out = HalfDensity { space: split.base(space), log_weight, prefactor, normalization: norm };
    out.normalize_constant();
    Ok(out)
}

/// `S₁` with `prefactor · e^{(i/ħ)S} = c₀ħ^m e^{(i/ħ)S₁}`.
#[derive(Clone, Debug)]
pub struct EffectiveAction {
    pub action: SuperPoly,
    pub normalization: NormalizationFactor,
    /// Highest ħ power of `action` fixed by the available prefactor data.
    pub valid_order: i32,
}

pub fn effective_action(dens: &HalfDensity) -> Result<EffectiveAction> {
    let table = dens.prefactor.table().clone();
    let target = dens.order();
    let p = dens.prefactor.clone().with_order(target);
    let lead = p.constant_term();
    let m = lead.min_power().ok_or_else(|| Error::LogDomain("prefactor has no constant term".into()))?;
    let c0 = lead.coeff(m);
    let inv = Scalar::one() / &c0;
    let known = target - m;
    let one = SuperPoly::one(&table).with_order(known);
    let x = p.scale(&inv).shift_hbar(-m).with_order(known).sub(&one);
    let mut nu = 0i32;
    let mut neg_odd = BTreeSet::new();
    for (mono, s) in x.terms() {
        let odd: Vec<GenId> = mono.factors().iter().map(|(g, _)| *g).filter(|g| table.get(*g).is_odd()).collect();
        for (k, _) in s.iter() {
            if k <= 0 && odd.is_empty() {
                let t = SuperPoly::from_term(&table, mono.clone(), Series::monomial(k, Scalar::one()));
                return Err(Error::LogDomain(format!("non-nilpotent term {t} at order ħ^{k} relative to the leading constant")));
            }
            if k < 0 {
                nu = nu.max(-k);
                neg_odd.extend(odd.iter().copied());
            }
        }
    }
    let valid = known - nu * neg_odd.len() as i32;
    let mut log = SuperPoly::zero(&table).with_order(known);
    let mut pow = x.clone();
    let mut n = 1i64;
    while !pow.is_zero() {
        let t = pow.scale_rational(&BigRational::new(1.into(), n.into()));
        log = if n % 2 == 1 { log.add(&t) } else { log.sub(&t) };
        pow = pow.mul(&x);
        n += 1;
        if n > 10_000 {
            return Err(Error::Internal("logarithm series failed to terminate".into()));
        }
    }
    let out_order = target.min(valid + 1);
    let s1 = dens.log_weight.clone().with_order(EXACT).sub(&log.mul_i().shift_hbar(1)).with_order(out_order);
    if let Some(k) = s1.min_hbar_power() {
        if k < 0 {
            return Err(Error::LogDomain(format!("effective action has a ħ^{k} term")));
        }
    }
    let mut normalization = dens.normalization.combine(&NormalizationFactor {
        rational: c0,
        hbar_exponent: m,
        ..NormalizationFactor::default()
    })?;
    let c = s1.constant_term();
    let action = s1.sub(&SuperPoly::from_term(&table, Monomial::one(), c.clone()));
    normalization.phase.add_assign(&c);
    Ok(EffectiveAction { action, normalization, valid_order: valid + 1 })
}

/// Pushforward followed by [`effective_action`], raising the internal order
/// until the effective action is determined through the density's order.
pub fn pushforward_effective_action(dens: &HalfDensity, split: &SplitSpec, l: &LagrangianSpec) -> Result<(HalfDensity, EffectiveAction)> {
    let target = dens.order();
    let mut extra = 0;
    loop {
        let raised = bv_pushforward_to_order(dens, split, l, target + extra)?;
        let mut ea = effective_action(&raised)?;
        if ea.valid_order >= target || extra > 16 {
            ea.action = ea.action.with_order(target.min(ea.valid_order));
            return Ok((raised.with_order(target), ea));
        }
        extra += (target - ea.valid_order).max(1);
    }
}

/// `⟨O⟩_L = ∫_L O e^{(i/ħ)S} / ∫_L e^{(i/ħ)S}` with every pair in the fiber.
pub fn expectation_value(o: &SuperPoly, dens: &HalfDensity, l: &LagrangianSpec) -> Result<Series> {
    let split = SplitSpec::all(&dens.space);
    let target = dens.order();
    let den0 = bv_pushforward_to_order(dens, &split, l, target)?;
    let lead = den0.prefactor.constant_term().min_power().ok_or(Error::DegenerateGauge)?;
    let order = target + (-lead).max(0);
    let den = if order == target { den0 } else { bv_pushforward_to_order(dens, &split, l, order)? };
    let num_dens = HalfDensity { prefactor: dens.prefactor.mul(o), ..dens.clone() };
    let num = bv_pushforward_to_order(&num_dens, &split, l, order)?;
    let d = den.prefactor.constant_term();
    if d.is_zero() {
        return Err(Error::DegenerateGauge);
    }
    let (q, _) = num.prefactor.constant_term().div_truncated(&d, target)?.truncate(target);
    Ok(q)
}

/// Number of odd integrated coordinates; `P_L` has that parity.
pub fn integration_parity(space: &BvSpace, split: &SplitSpec, l: &LagrangianSpec) -> Result<usize> {
    let gf = l.resolve(space, split)?;
    Ok(gf.integrated.iter().filter(|g| space.table().get(**g).is_odd()).count() % 2)
}

#[derive(Clone, Debug)]
pub struct ChainMapCheck {
    pub lhs: SuperPoly,
    pub rhs: SuperPoly,
    pub holds: bool,
}

/// Compares `Δ₁ P_L φ` with `(-1)^{|P_L|} P_L Δφ` through the density's order.
pub fn chain_map_check(dens: &HalfDensity, split: &SplitSpec, l: &LagrangianSpec) -> Result<ChainMapCheck> {
    let order = dens.order();
    let pushed = bv_pushforward_to_order(dens, split, l, order + 2)?;
    let lhs = pushed.laplacian()?.prefactor.with_order(order);
    let lap = dens.laplacian()?;
    let mut rhs = bv_pushforward_to_order(&lap, split, l, order)?.prefactor.with_order(order);
    if integration_parity(&dens.space, split, l)? == 1 {
        rhs = rhs.neg();
    }
    let holds = lhs.clone().with_order(EXACT) == rhs.clone().with_order(EXACT);
    Ok(ChainMapCheck { lhs, rhs, holds })
}

/// Searches for `h` with `Δ₁h = g`, `h` a combination of monomials in the
/// generators of `space` of degree at most `deg g + 2` matching the parity
/// and ghost degree forced by `g`. Solved separately per ħ power and for
/// real and imaginary parts.
pub fn delta_exactness_test(g: &SuperPoly, space: &BvSpace) -> Result<Option<SuperPoly>> {
    let table = space.table().clone();
    if g.is_zero() {
        return Ok(Some(SuperPoly::zero(&table)));
    }
    if let Some(x) = g.generators().into_iter().find(|x| !space.generators().contains(x)) {
        return Err(Error::Invalid(format!("`{}` is not a generator of the space", table.name(x))));
    }
    let bound = g.max_degree() + 2;
    let targets: BTreeSet<(u8, i32)> = g.terms().map(|(m, _)| ((m.parity(&table) + 1) % 2, m.ghost(&table) - 1)).collect();
    let gens: Vec<GenId> = space.generators().into_iter().collect();
    let basis: Vec<Monomial> = monomials_up_to(&table, &gens, bound)
        .into_iter()
        .filter(|m| targets.contains(&(m.parity(&table), m.ghost(&table))))
        .collect();
    let images: Vec<SuperPoly> = basis
        .iter()
        .map(|m| space.laplacian_unchecked(&SuperPoly::from_term(&table, m.clone(), Series::one())))
        .collect();
    let mut rows: Vec<Monomial> = images.iter().flat_map(|p| p.terms().map(|(m, _)| m.clone()).collect::<Vec<_>>()).collect();
    rows.extend(g.terms().map(|(m, _)| m.clone()));
    rows.sort();
    rows.dedup();
    let row_index: HashMap<&Monomial, usize> = rows.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let mut a = Matrix::zeros(rows.len(), basis.len());
    for (j, img) in images.iter().enumerate() {
        for (m, s) in img.terms() {
            // Δ of an ħ-free monomial is ħ-free with real coefficients
            a.set(row_index[m], j, s.coeff(0).re.clone());
        }
    }
    let powers: BTreeSet<i32> = g.terms().flat_map(|(_, s)| s.iter().map(|(k, _)| k).collect::<Vec<_>>()).collect();
    let mut h = SuperPoly::zero(&table).with_order(g.order());
    for k in powers {
        let comp = g.hbar_component(k);
        for imaginary in [false, true] {
            let mut b = vec![BigRational::zero(); rows.len()];
            for (m, s) in comp.terms() {
                let c = s.coeff(0);
                b[row_index[m]] = if imaginary { c.im.clone() } else { c.re.clone() };
            }
            if b.iter().all(Zero::is_zero) {
                continue;
            }
            let Some(sol) = a.solve(&b) else { return Ok(None) };
            let unit = if imaginary { imag_unit() } else { Scalar::one() };
            for (j, c) in sol.iter().enumerate() {
                if !c.is_zero() {
                    h.add_series(basis[j].clone(), &Series::monomial(k, real(c.clone()) * &unit));
                }
            }
        }
    }
    Ok(Some(h))
}

/// All nonzero normal-ordered monomials of degree `1..=bound` (plus the unit).
pub fn monomials_up_to(table: &GeneratorTable, gens: &[GenId], bound: u32) -> Vec<Monomial> {
    let mut out = vec![Monomial::one()];
    let mut sorted = gens.to_vec();
    sorted.sort();
    fn rec(table: &GeneratorTable, gens: &[GenId], i: usize, left: u32, cur: &mut Vec<(GenId, u32)>, out: &mut Vec<Monomial>) {
        if i == gens.len() {
            return;
        }
        let g = gens[i];
        let max = if table.get(g).is_odd() { 1 } else { left };
        for e in 1..=max.min(left) {
            cur.push((g, e));
            out.push(Monomial::from_sorted(cur.clone()));
            rec(table, gens, i + 1, left - e, cur, out);
            cur.pop();
        }
        rec(table, gens, i + 1, left, cur, out);
    }
    rec(table, &sorted, 0, bound, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::scalar::{int, rat, real_int};
    use crate::algebra::variational_differential;
    use crate::bv::BvSpaceJson;

    fn space(fields: &[(&str, i32)]) -> BvSpace {
        BvSpaceJson::from_fields(fields).build().unwrap()
    }

    fn g(s: &BvSpace, n: &str) -> SuperPoly {
        SuperPoly::named(s.table(), n).unwrap()
    }

    fn id(s: &BvSpace, n: &str) -> GenId {
        s.table().lookup(n).unwrap()
    }

    /// Independent oracle: sum over perfect pairings of the index list.
    fn pairing_sum(idx: &[usize], c: &Matrix) -> BigRational {
        if idx.is_empty() {
            return BigRational::one();
        }
        if idx.len() % 2 == 1 {
            return BigRational::zero();
        }
        let first = idx[0];
        let mut acc = BigRational::zero();
        for k in 1..idx.len() {
            let rest: Vec<usize> = idx[1..].iter().enumerate().filter(|(j, _)| *j + 1 != k).map(|(_, v)| *v).collect();
            acc += c.get(first, idx[k]) * pairing_sum(&rest, c);
        }
        acc
    }

    #[test]
    fn berezin_conventions() {
        let s = space(&[("t1", 1), ("t2", 1)]);
        let (t1, t2) = (id(&s, "t1"), id(&s, "t2"));
        let one = SuperPoly::one(s.table());
        assert_eq!(berezin_integrate(&g(&s, "t1"), &[t1]).unwrap(), one);
        assert!(berezin_integrate(&one, &[t1]).unwrap().is_zero());
        let f = g(&s, "t2").mul(&g(&s, "t1"));
        assert_eq!(berezin_integrate(&f, &[t1, t2]).unwrap(), one.neg());
        assert!(matches!(berezin_integrate(&f, &[id(&s, "t1†")]), Err(Error::EvenCoordinate(_))));
    }

    #[test]
    fn wick_single_coordinate() {
        let s = space(&[("x", 0)]);
        let x = id(&s, "x");
        let a = int(3);
        let gd = GaussianData::pure(s.table(), vec![x], Matrix::from_rows(vec![vec![a.clone()]]));
        let one = SuperPoly::one(s.table());
        let (r, n) = wick_integrate(&one, &gd).unwrap();
        assert_eq!(r, one);
        assert_eq!(n.det, a);
        assert_eq!(n.det_half_exponent, -1);
        let (r2, _) = wick_integrate(&g(&s, "x").pow(2), &gd).unwrap();
        let expected = SuperPoly::from_term(s.table(), Monomial::one(), Series::monomial(1, imag_unit() * real(rat(1, 3))));
        assert_eq!(r2, expected);
        let (r4, _) = wick_integrate(&g(&s, "x").pow(4), &gd).unwrap();
        // 3 (iħ/a)^2 = -3ħ²/9
        let expected = SuperPoly::from_term(s.table(), Monomial::one(), Series::monomial(2, real(rat(-1, 3))));
        assert_eq!(r4, expected);
    }

    #[test]
    fn wick_matches_pairing_enumeration() {
        let c = Matrix::from_rows(vec![
            vec![int(2), rat(1, 2), int(0), int(-1)],
            vec![rat(1, 2), int(1), int(3), int(0)],
            vec![int(0), int(3), rat(-1, 3), int(1)],
            vec![int(-1), int(0), int(1), int(5)],
        ]);
        let mut m = Moments::new(c.clone());
        for beta in [[2u32, 0, 0, 0], [1, 1, 1, 1], [2, 2, 0, 0], [0, 1, 3, 2], [3, 1, 1, 1], [1, 1, 0, 0]] {
            let idx: Vec<usize> = beta.iter().enumerate().flat_map(|(i, &b)| std::iter::repeat_n(i, b as usize)).collect();
            assert_eq!(m.get(&beta), pairing_sum(&idx, &c), "{beta:?}");
        }
    }

    #[test]
    fn degenerate_core_names_kernel() {
        let s = space(&[("x", 0), ("y", 0)]);
        let gd = GaussianData::pure(s.table(), vec![id(&s, "x"), id(&s, "y")], Matrix::from_i64(&[&[1, 1], &[1, 1]]));
        match wick_integrate(&SuperPoly::one(s.table()), &gd) {
            Err(Error::DegenerateQuadraticCore { kernel, .. }) => assert_eq!(kernel, vec!["-1/1", "1/1"]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn odd_fiber_top_component() {
        // odd v (ghost -1) with even v†; L = {v† = 0}
        let s = space(&[("y", 0), ("v", -1)]);
        let split = SplitSpec::new(vec![1]);
        let l = LagrangianSpec::antifields_zero(1);
        let d = HalfDensity::new(&s, &SuperPoly::zero(s.table()), &g(&s, "v"));
        let out = bv_pushforward(&d, &split, &l).unwrap();
        assert_eq!(out.prefactor, SuperPoly::one(s.table()));
        assert_eq!(out.space.len(), 1);
        let d0 = HalfDensity::new(&s, &SuperPoly::zero(s.table()), &g(&s, "y"));
        assert!(bv_pushforward(&d0, &split, &l).unwrap().prefactor.is_zero());
    }

    #[test]
    fn gaussian_expectation_value() {
        let s = space(&[("x", 0)]);
        let a = int(5);
        let act = g(&s, "x").pow(2).scale(&real(a.clone() / int(2)));
        let d = HalfDensity::exponential(&s, &act);
        let l = LagrangianSpec::antifields_zero(1);
        let v = expectation_value(&g(&s, "x").pow(2), &d, &l).unwrap();
        assert_eq!(v, Series::monomial(1, imag_unit() * real(rat(1, 5))));
        let one = expectation_value(&SuperPoly::one(s.table()), &d, &l).unwrap();
        assert_eq!(one, Series::one());
    }

    #[test]
    fn odd_point_expectation_is_degenerate() {
        let s = space(&[("x", 1)]);
        let d = HalfDensity::exponential(&s, &SuperPoly::zero(s.table()));
        let l = LagrangianSpec::antifields_zero(1);
        assert!(matches!(expectation_value(&g(&s, "x"), &d, &l), Err(Error::DegenerateGauge)));
    }

    #[test]
    fn gauge_fixed_graph_is_lagrangian() {
        let s = space(&[("x", 0), ("c", 1), ("b", -1)]);
        let split = SplitSpec::all(&s);
        let (x, c, b, cd) = (g(&s, "x"), g(&s, "c"), g(&s, "b"), g(&s, "c†"));
        let cases = [
            (vec![Integrate::Field; 3], x.mul(&c).add(&b.scale(&real_int(3))).add(&x.pow(2).mul(&b))),
            (
                vec![Integrate::Field, Integrate::Antifield, Integrate::Field],
                cd.mul(&b).add(&x.mul(&b)).add(&x.pow(2).mul(&cd).mul(&b)),
            ),
        ];
        for (choices, psi) in cases {
            assert_eq!(psi.parity(), Some(1));
            let l = LagrangianSpec { choices, gauge_fermion: Some(psi) };
            let gf = l.resolve(&s, &split).unwrap();
            let mut images = gf.images.clone();
            for (r, img) in &gf.images {
                let dr = s.table().differential(*r).unwrap();
                images.insert(dr, variational_differential(img).unwrap());
            }
            let w = s.symplectic_form().unwrap().substitute(&images);
            assert!(w.is_zero(), "{w}");
        }
    }

    #[test]
    fn completing_the_square() {
        // S = ½x² + y x with y an even base coordinate: S₁ = −½y²
        let s = space(&[("y", 0), ("x", 0)]);
        let act = g(&s, "x").pow(2).scale(&real(rat(1, 2))).add(&g(&s, "y").mul(&g(&s, "x")));
        let d = HalfDensity::exponential(&s, &act);
        let split = SplitSpec::new(vec![1]);
        let out = bv_pushforward(&d, &split, &LagrangianSpec::antifields_zero(1)).unwrap();
        assert_eq!(out.log_weight, g(&s, "y").pow(2).scale(&real(rat(-1, 2))));
        assert_eq!(out.prefactor, SuperPoly::one(s.table()));
        // ⟨x²⟩ shifted: (x − y)² → y² + iħ
        let d2 = HalfDensity::new(&s, &act, &g(&s, "x").pow(2));
        let out2 = bv_pushforward(&d2, &split, &LagrangianSpec::antifields_zero(1)).unwrap();
        let expected = g(&s, "y").pow(2).add(&SuperPoly::constant(s.table(), imag_unit()).shift_hbar(1));
        assert_eq!(out2.prefactor, expected);
    }

    #[test]
    fn non_polynomial_action_rejected() {
        let s = space(&[("y", 0), ("x", 0)]);
        let act = g(&s, "x").pow(2).scale(&real(rat(1, 2))).add(&g(&s, "y").mul(&g(&s, "x").pow(2)));
        let d = HalfDensity::exponential(&s, &act);
        let r = bv_pushforward(&d, &SplitSpec::new(vec![1]), &LagrangianSpec::antifields_zero(1));
        assert!(matches!(r, Err(Error::NonPolynomial(_))));
    }

    #[test]
    fn shifted_cubic_vertex_rejected() {
        // x ↦ x − y turns x³ into a y-dependent quadratic form
        let s = space(&[("y", 0), ("x", 0)]);
        let x = g(&s, "x");
        let act = x.pow(2).scale(&real(rat(1, 2))).add(&g(&s, "y").mul(&x)).add(&x.pow(3));
        let d = HalfDensity::exponential(&s, &act);
        let r = bv_pushforward(&d, &SplitSpec::new(vec![1]), &LagrangianSpec::antifields_zero(1));
        assert!(matches!(r, Err(Error::NonPolynomial(_))));
    }

    #[test]
    fn effective_action_examples() {
        let s = space(&[("y", 0)]);
        let t = s.table();
        let act = g(&s, "y").mul(&g(&s, "y†"));
        let d = HalfDensity::exponential(&s, &act);
        let ea = effective_action(&d).unwrap();
        assert_eq!(ea.action, act);
        // prefactor 1 + ħc: S₁ = S − iħ(ħc − ħ²c²/2) = S − iħ²c at order 2
        let c = real(rat(3, 2));
        let pref = SuperPoly::one(t).add(&SuperPoly::constant(t, c.clone()).shift_hbar(1));
        let d = HalfDensity::new(&s, &act, &pref);
        let ea = effective_action(&d).unwrap();
        let expected = act.sub(&SuperPoly::constant(t, imag_unit() * c).shift_hbar(2)).with_order(2);
        // the constant moves into the phase
        assert_eq!(ea.action, act);
        assert_eq!(ea.normalization.phase, expected.constant_term());
        // vanishing constant term
        let d = HalfDensity::new(&s, &act, &g(&s, "y"));
        assert!(matches!(effective_action(&d), Err(Error::LogDomain(_))));
    }

    #[test]
    fn exactness_of_one() {
        let s = space(&[("x", 0)]);
        let h = delta_exactness_test(&SuperPoly::one(s.table()), &s).unwrap().unwrap();
        assert_eq!(s.laplacian(&h).unwrap(), SuperPoly::one(s.table()));
        assert_eq!(h, g(&s, "x").mul(&g(&s, "x†")));
        assert!(delta_exactness_test(&SuperPoly::zero(s.table()), &s).unwrap().unwrap().is_zero());
        // x = Δ(x²x†/2), while x† is closed but not exact
        assert!(delta_exactness_test(&g(&s, "x"), &s).unwrap().is_some());
        assert!(delta_exactness_test(&g(&s, "x†"), &s).unwrap().is_none());
    }
}
