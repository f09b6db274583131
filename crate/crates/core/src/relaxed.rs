//! Relaxed BV data `(F, S, ϖ, Q)` where `ι_Qϖ − δS` need not vanish, the
//! induced boundary-type data `(S̲, α̲, ϖ̲)`, preBV-BFV compatibility and
//! good b-conditions.
//!
//! Degree bookkeeping: `α̲` and `ϖ̲` have ghost degree 0 and `S̲` ghost
//! degree 1. "Even/odd" for forms refers to the ghost degree; the total
//! parity (ghost + form degree) of `α̲` is odd.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::algebra::json::{from_terms, to_terms, TermJson};
use crate::algebra::{contract, lie_derivative, variational_differential, Derivation, GenId, GeneratorTable, Monomial, SuperPoly, EXACT};
use crate::bv::GeneratorJson;
use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Relaxed BV data on a generator table with registered differentials.
#[derive(Clone, Debug)]
pub struct RelaxedBVData {
    table: Arc<GeneratorTable>,
    pub s: SuperPoly,
    pub varpi: SuperPoly,
    pub q: Derivation,
}

fn expect(p: &SuperPoly, what: &str, ghost: i32, form: u32) -> Result<()> {
    let t = p.table();
    if let Some((m, _)) = p.terms().find(|(m, _)| m.ghost(t) != ghost || m.form_degree(t) != form) {
        let term = SuperPoly::from_term(t, m.clone(), crate::algebra::Series::one());
        return Err(Error::Structure(format!(
            "{what} must have ghost degree {ghost} and form degree {form}; offending term {term}"
        )));
    }
    Ok(())
}

fn check_vector_field(q: &Derivation, what: &str, ghost_shift: i32) -> Result<()> {
    let t = q.table();
    for (g, img) in q.images() {
        let gen = t.get(g);
        if gen.form_degree != 0 {
            return Err(Error::Structure(format!("{what} is specified on the form generator `{}`", gen.name)));
        }
        expect(img, &format!("{what}({})", gen.name), gen.ghost + ghost_shift, 0)?;
    }
    Ok(())
}

impl RelaxedBVData {
    /// Checks degrees, `δϖ = 0` and `Q² = 0`.
    pub fn new(s: SuperPoly, varpi: SuperPoly, q: Derivation) -> Result<Self> {
        let table = s.table().clone();
        if !Arc::ptr_eq(varpi.table(), &table) || !Arc::ptr_eq(q.table(), &table) {
            return Err(Error::TableMismatch);
        }
        expect(&s, "S", 0, 0)?;
        expect(&varpi, "ϖ", -1, 2)?;
        if q.parity() != 1 {
            return Err(Error::Structure("Q must be odd".into()));
        }
        check_vector_field(&q, "Q", 1)?;
        let dw = variational_differential(&varpi)?;
        if !dw.is_zero() {
            return Err(Error::Structure(format!("ϖ is not closed: δϖ = {dw}")));
        }
        if let Some((g, qq)) = q.square_on_generators().into_iter().next() {
            return Err(Error::Structure(format!("Q is not cohomological: Q²({}) = {qq}", table.name(g))));
        }
        Ok(RelaxedBVData { table, s: s.with_order(EXACT), varpi: varpi.with_order(EXACT), q })
    }

    pub fn table(&self) -> &Arc<GeneratorTable> {
        &self.table
    }

    /// Form-degree-0 generators, in table order.
    pub fn coordinates(&self) -> Vec<GenId> {
        self.table.iter().filter(|(_, g)| g.form_degree == 0).map(|(id, _)| id).collect()
    }
}

/// `α̲ = ι_Qϖ − δS`.
pub fn underline_alpha(d: &RelaxedBVData) -> Result<SuperPoly> {
    let a = contract(&d.q, &d.varpi)?.sub(&variational_differential(&d.s)?);
    expect(&a, "α̲", 0, 1)?;
    Ok(a)
}

/// Both routes to `ϖ̲`.
#[derive(Clone, Debug)]
pub struct UnderlineOmega {
    /// `δα̲`.
    pub via_alpha: SuperPoly,
    /// `−L_Qϖ`.
    pub via_lie: SuperPoly,
}

impl UnderlineOmega {
    pub fn agree(&self) -> bool {
        self.via_alpha == self.via_lie
    }
}

pub fn underline_omega_routes(d: &RelaxedBVData) -> Result<UnderlineOmega> {
    let via_alpha = variational_differential(&underline_alpha(d)?)?;
    let via_lie = lie_derivative(&d.q, &d.varpi)?.neg();
    Ok(UnderlineOmega { via_alpha, via_lie })
}

/// `ϖ̲ = δα̲`, asserted equal to `−L_Qϖ`.
pub fn underline_omega(d: &RelaxedBVData) -> Result<SuperPoly> {
    let r = underline_omega_routes(d)?;
    if !r.agree() {
        return Err(Error::Structure(format!(
            "δα̲ and −L_Qϖ differ: δα̲ = {}, −L_Qϖ = {}",
            r.via_alpha, r.via_lie
        )));
    }
    expect(&r.via_alpha, "ϖ̲", 0, 2)?;
    Ok(r.via_alpha)
}

/// The Euler field `x ↦ x` on every coordinate of the table.
fn euler(table: &Arc<GeneratorTable>) -> Derivation {
    let mut e = Derivation::new(table, 0);
    for (id, g) in table.iter() {
        if g.form_degree == 0 {
            e.set(id, SuperPoly::generator(table, id)).expect("Euler image has the parity of its generator");
        }
    }
    e
}

/// Primitive of a closed polynomial form: `δ(h(A)) = A` with zero constant
/// term, built from the weight decomposition `L_E A_w = w A_w` of the Euler
/// field `E` (coordinates and differentials both weigh 1).
pub fn primitive(a: &SuperPoly) -> Result<SuperPoly> {
    let table = a.table().clone();
    let da = variational_differential(a)?;
    if !da.is_zero() {
        return Err(Error::Structure(format!("form is not closed: δ = {da}")));
    }
    let e = euler(&table);
    let mut by_weight: BTreeMap<u32, SuperPoly> = BTreeMap::new();
    for (m, s) in a.terms() {
        by_weight
            .entry(m.degree())
            .or_insert_with(|| SuperPoly::zero(&table).with_order(a.order()))
            .add_series(m.clone(), s);
    }
    let mut out = SuperPoly::zero(&table).with_order(a.order());
    for (w, part) in by_weight {
        if w == 0 {
            return Err(Error::Structure("a constant has no primitive of lower form degree".into()));
        }
        let h = contract(&e, &part)?.scale_rational(&num_rational::BigRational::new(1.into(), (w as i64).into()));
        out = out.add(&h);
    }
    Ok(out)
}

/// `S̲` with `ι_Qϖ̲ = δS̲` and zero constant term.
pub fn solve_underline_s(d: &RelaxedBVData) -> Result<SuperPoly> {
    let w = underline_omega(d)?;
    let a = contract(&d.q, &w)?;
    let s = primitive(&a)?;
    expect(&s, "S̲", 1, 0)?;
    Ok(s)
}

/// Hamiltonian boundary data `(S̃, α̃, Q̃)` with `ϖ̃ = δα̃`.
#[derive(Clone, Debug)]
pub struct PreBFVData {
    pub s: SuperPoly,
    pub alpha: SuperPoly,
    pub q: Derivation,
}

impl PreBFVData {
    pub fn new(s: SuperPoly, alpha: SuperPoly, q: Derivation) -> Result<Self> {
        if !Arc::ptr_eq(s.table(), alpha.table()) || !Arc::ptr_eq(s.table(), q.table()) {
            return Err(Error::TableMismatch);
        }
        expect(&s, "S̃", 1, 0)?;
        expect(&alpha, "α̃", 0, 1)?;
        check_vector_field(&q, "Q̃", 1)?;
        Ok(PreBFVData { s: s.with_order(EXACT), alpha: alpha.with_order(EXACT), q })
    }

    pub fn table(&self) -> &Arc<GeneratorTable> {
        self.s.table()
    }

    /// `ι_{Q̃}δα̃ − δS̃`.
    pub fn hamiltonian_residual(&self) -> Result<SuperPoly> {
        let w = variational_differential(&self.alpha)?;
        Ok(contract(&self.q, &w)?.sub(&variational_differential(&self.s)?))
    }
}

/// Pullback data for `π: F → F̃`: the image of each base coordinate.
#[derive(Clone, Debug)]
pub struct ProjectionSpec {
    base: Arc<GeneratorTable>,
    total: Arc<GeneratorTable>,
    images: BTreeMap<GenId, SuperPoly>,
}

impl ProjectionSpec {
    pub fn new(base: &Arc<GeneratorTable>, total: &Arc<GeneratorTable>, images: BTreeMap<GenId, SuperPoly>) -> Result<Self> {
        for (id, g) in base.iter() {
            if g.form_degree != 0 {
                continue;
            }
            let img = images.get(&id).ok_or_else(|| Error::Invalid(format!("projection gives no image for `{}`", g.name)))?;
            if !Arc::ptr_eq(img.table(), total) {
                return Err(Error::TableMismatch);
            }
            expect(img, &format!("π*{}", g.name), g.ghost, 0)?;
        }
        Ok(ProjectionSpec { base: base.clone(), total: total.clone(), images })
    }

    pub fn identity(table: &Arc<GeneratorTable>) -> Self {
        let images = table
            .iter()
            .filter(|(_, g)| g.form_degree == 0)
            .map(|(id, _)| (id, SuperPoly::generator(table, id)))
            .collect();
        ProjectionSpec { base: table.clone(), total: table.clone(), images }
    }

    /// `π*f`, with `π*δx = δ(π*x)`.
    pub fn pullback(&self, f: &SuperPoly) -> Result<SuperPoly> {
        if !Arc::ptr_eq(f.table(), &self.base) {
            return Err(Error::TableMismatch);
        }
        let mut full: HashMap<GenId, SuperPoly> = HashMap::new();
        for (&g, img) in &self.images {
            full.insert(g, img.clone());
            if let Some(dg) = self.base.get(g).differential {
                full.insert(dg, variational_differential(img)?);
            }
        }
        let mut out = SuperPoly::zero(&self.total).with_order(f.order());
        for (m, s) in f.terms() {
            let mut acc = SuperPoly::from_term(&self.total, Monomial::one(), s.clone());
            for &(g, e) in m.factors() {
                let img = full
                    .get(&g)
                    .ok_or_else(|| Error::Invalid(format!("projection gives no image for `{}`", self.base.name(g))))?;
                acc = acc.mul(&img.pow(e));
            }
            out = out.add(&acc);
        }
        Ok(out)
    }
}

/// One named identity with its residual (zero when it holds).
#[derive(Clone, Debug, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub holds: bool,
    pub residual: Vec<TermJson>,
}

impl IdentityCheck {
    fn new(name: &str, residual: &SuperPoly) -> Self {
        IdentityCheck { name: name.to_string(), holds: residual.is_zero(), residual: to_terms(residual) }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PreBVBFVReport {
    pub axioms: Vec<IdentityCheck>,
    pub axioms_hold: bool,
    /// Evaluated even when an axiom fails; only meaningful when they hold.
    pub theorem: Vec<IdentityCheck>,
    pub theorem_holds: bool,
}

impl PreBVBFVReport {
    pub fn passed(&self) -> bool {
        self.axioms_hold && self.theorem_holds
    }
}

/// Checks `Q ∘ π* = π* ∘ Q̃` on base coordinates, `ι_Qϖ = δS + π*α̃` and
/// `ι_{Q̃}ϖ̃ = δS̃`, then `½ι_Qι_Qϖ = π*S̃` and `L_QS = π*(2S̃ − ι_{Q̃}α̃)`.
pub fn verify_pre_bv_bfv(d: &RelaxedBVData, b: &PreBFVData, pi: &ProjectionSpec) -> Result<PreBVBFVReport> {
    if !Arc::ptr_eq(&pi.total, d.table()) || !Arc::ptr_eq(&pi.base, b.table()) {
        return Err(Error::TableMismatch);
    }
    let mut axioms = Vec::new();
    for (&g, img) in &pi.images {
        let lhs = d.q.apply(img);
        let rhs = pi.pullback(&b.q.image(g))?;
        axioms.push(IdentityCheck::new(&format!("Q π*{} = π* Q̃ {}", pi.base.name(g), pi.base.name(g)), &lhs.sub(&rhs)));
    }
    let iq = contract(&d.q, &d.varpi)?;
    let modified = iq.sub(&variational_differential(&d.s)?).sub(&pi.pullback(&b.alpha)?);
    axioms.push(IdentityCheck::new("ι_Qϖ = δS + π*α̃", &modified));
    axioms.push(IdentityCheck::new("ι_Q̃ϖ̃ = δS̃", &b.hamiltonian_residual()?));
    let axioms_hold = axioms.iter().all(|c| c.holds);

    let half = num_rational::BigRational::new(1.into(), 2.into());
    let first = contract(&d.q, &iq)?.scale_rational(&half).sub(&pi.pullback(&b.s)?);
    let two = num_rational::BigRational::from_integer(2.into());
    let boundary = b.s.scale_rational(&two).sub(&contract(&b.q, &b.alpha)?);
    let second = d.q.apply(&d.s).sub(&pi.pullback(&boundary)?);
    let theorem = vec![IdentityCheck::new("½ι_Qι_Qϖ = π*S̃", &first), IdentityCheck::new("L_QS = π*(2S̃ − ι_Q̃α̃)", &second)];
    let theorem_holds = theorem.iter().all(|c| c.holds);
    Ok(PreBVBFVReport { axioms, axioms_hold, theorem, theorem_holds })
}

/// The induced data `(S̲, α̲, Q)` on the same space, with `π = id`.
pub fn induced_pre_bfv(d: &RelaxedBVData) -> Result<PreBFVData> {
    PreBFVData::new(solve_underline_s(d)?, underline_alpha(d)?, d.q.clone())
}

/// A candidate b-submanifold given as the common zero set of `cut`, with an
/// optional set of base coordinates onto which `ι*S̲` should descend.
#[derive(Clone, Debug)]
pub struct GoodBSpec {
    pub cut: Vec<GenId>,
    pub base: Option<Vec<GenId>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct GoodBReport {
    /// Rank of the restricted pairing matrix at the origin vs. its size.
    pub restricted_rank: usize,
    pub restricted_size: usize,
    pub symplectic: bool,
    /// Cut generators whose `Q`-image does not vanish on `B`.
    pub q_violations: Vec<String>,
    pub q_tangent: bool,
    /// `ι*S̲ = 0` and `ι*α̲ = 0`.
    pub vanishing: bool,
    /// `ι*S̲` depends on base coordinates only.
    pub descends: Option<bool>,
    pub restricted_s: Vec<TermJson>,
    pub restricted_alpha: Vec<TermJson>,
}

impl GoodBReport {
    pub fn good(&self) -> bool {
        self.symplectic && self.q_tangent && (self.vanishing || self.descends == Some(true))
    }
}

/// Constant part of the coefficient matrix of a 2-form on the listed coordinates.
fn pairing_matrix(w: &SuperPoly, coords: &[GenId]) -> Result<Matrix> {
    let table = w.table();
    let pos: HashMap<GenId, usize> = coords
        .iter()
        .enumerate()
        .map(|(i, &g)| table.differential(g).map(|dg| (dg, i)))
        .collect::<Result<_>>()?;
    let mut m = Matrix::zeros(coords.len(), coords.len());
    for (mono, s) in w.terms() {
        let c = s.coeff(0);
        if c.re.is_zero() || mono.factors().iter().any(|(g, _)| table.get(*g).form_degree == 0) {
            continue;
        }
        let idx: Vec<(usize, GenId)> = mono
            .factors()
            .iter()
            .flat_map(|&(g, e)| std::iter::repeat_n(g, e as usize))
            .filter_map(|g| pos.get(&g).map(|&i| (i, g)))
            .collect();
        if idx.len() != 2 {
            continue;
        }
        let ((i, gi), (j, gj)) = (idx[0], idx[1]);
        if i == j {
            m.add_at(i, i, &(c.re.clone() * num_rational::BigRational::from_integer(2.into())));
        } else {
            m.add_at(i, j, &c.re);
            let sign = table.parity(gi) * table.parity(gj);
            m.add_at(j, i, &if sign == 1 { -c.re.clone() } else { c.re.clone() });
        }
    }
    Ok(m)
}

pub fn check_good_b_condition(d: &RelaxedBVData, spec: &GoodBSpec) -> Result<GoodBReport> {
    let table = d.table().clone();
    let coords: BTreeSet<GenId> = d.coordinates().into_iter().collect();
    for &g in &spec.cut {
        if !coords.contains(&g) {
            return Err(Error::Invalid(format!("`{}` is not a coordinate", table.name(g))));
        }
    }
    let mut zero: BTreeSet<GenId> = spec.cut.iter().copied().collect();
    for &g in &spec.cut {
        zero.insert(table.differential(g)?);
    }
    let rest: Vec<GenId> = coords.iter().copied().filter(|g| !spec.cut.contains(g)).collect();
    let w = d.varpi.restrict_zero(&zero);
    let m = pairing_matrix(&w, &rest)?;
    let rank = m.rank();
    let q_violations: Vec<String> =
        spec.cut.iter().filter(|&&g| !d.q.image(g).restrict_zero(&zero).is_zero()).map(|&g| table.name(g).to_string()).collect();
    let s_low = solve_underline_s(d)?.restrict_zero(&zero);
    let a_low = underline_alpha(d)?.restrict_zero(&zero);
    let descends = spec.base.as_ref().map(|base| {
        let base: BTreeSet<GenId> = base.iter().copied().collect();
        s_low.generators().iter().all(|g| base.contains(g))
    });
    Ok(GoodBReport {
        restricted_rank: rank,
        restricted_size: rest.len(),
        symplectic: rank == rest.len(),
        q_tangent: q_violations.is_empty(),
        q_violations,
        vanishing: s_low.is_zero() && a_low.is_zero(),
        descends,
        restricted_s: to_terms(&s_low),
        restricted_alpha: to_terms(&a_low),
    })
}

// ---------------------------------------------------------------- JSON model

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundaryJson {
    pub generators: Vec<GeneratorJson>,
    #[serde(rename = "S")]
    pub s: Vec<TermJson>,
    pub alpha: Vec<TermJson>,
    #[serde(rename = "Q")]
    pub q: BTreeMap<String, Vec<TermJson>>,
    /// Image of every base coordinate, as a term list on the total space.
    pub projection: BTreeMap<String, Vec<TermJson>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GoodBJson {
    pub cut: Vec<String>,
    #[serde(default)]
    pub base: Option<Vec<String>>,
}

/// Input of `relaxed-check`. Without `boundary`, the induced data
/// `(S̲, α̲, Q)` with `π = id` is checked.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RelaxedModelJson {
    pub generators: Vec<GeneratorJson>,
    #[serde(rename = "S")]
    pub s: Vec<TermJson>,
    pub varpi: Vec<TermJson>,
    #[serde(rename = "Q")]
    pub q: BTreeMap<String, Vec<TermJson>>,
    #[serde(default)]
    pub boundary: Option<BoundaryJson>,
    #[serde(default)]
    pub good_b: Option<GoodBJson>,
}

fn table_from(gens: &[GeneratorJson]) -> Result<Arc<GeneratorTable>> {
    let mut b = GeneratorTable::builder();
    for g in gens {
        b.coordinate(&g.name, g.ghost)?;
    }
    Ok(b.build())
}

fn derivation_from(table: &Arc<GeneratorTable>, images: &BTreeMap<String, Vec<TermJson>>) -> Result<Derivation> {
    let mut q = Derivation::new(table, 1);
    for (name, terms) in images {
        q.set(table.lookup(name)?, from_terms(table, terms, EXACT)?)?;
    }
    Ok(q)
}

/// Everything `relaxed-check` computes for one model.
#[derive(Clone, Debug, Serialize)]
pub struct RelaxedReport {
    pub underline_alpha: Vec<TermJson>,
    pub underline_omega: Vec<TermJson>,
    pub omega_routes_agree: bool,
    pub underline_s: Vec<TermJson>,
    pub primitive_round_trip: bool,
    pub induced: bool,
    pub pre_bv_bfv: PreBVBFVReport,
    pub good_b: Option<GoodBReport>,
}

impl RelaxedReport {
    pub fn passed(&self) -> bool {
        self.omega_routes_agree && self.primitive_round_trip && self.pre_bv_bfv.passed() && self.good_b.as_ref().is_none_or(GoodBReport::good)
    }
}

/// Runs every check on relaxed data and its induced or supplied boundary data.
pub fn relaxed_report(d: &RelaxedBVData, boundary: Option<(&PreBFVData, &ProjectionSpec)>, good_b: Option<&GoodBSpec>) -> Result<RelaxedReport> {
    let alpha = underline_alpha(d)?;
    let routes = underline_omega_routes(d)?;
    let s_low = if routes.agree() { solve_underline_s(d)? } else { SuperPoly::zero(d.table()) };
    let round_trip = routes.agree() && variational_differential(&s_low)? == contract(&d.q, &routes.via_alpha)?;
    let pre_bv_bfv = match boundary {
        Some((b, pi)) => verify_pre_bv_bfv(d, b, pi)?,
        None => verify_pre_bv_bfv(d, &induced_pre_bfv(d)?, &ProjectionSpec::identity(d.table()))?,
    };
    let good_b = good_b.map(|g| check_good_b_condition(d, g)).transpose()?;
    Ok(RelaxedReport {
        underline_alpha: to_terms(&alpha),
        underline_omega: to_terms(&routes.via_alpha),
        omega_routes_agree: routes.agree(),
        underline_s: to_terms(&s_low),
        primitive_round_trip: round_trip,
        induced: boundary.is_none(),
        pre_bv_bfv,
        good_b,
    })
}

impl RelaxedModelJson {
    pub fn build(&self) -> Result<RelaxedBVData> {
        let table = table_from(&self.generators)?;
        let s = from_terms(&table, &self.s, EXACT)?;
        let w = from_terms(&table, &self.varpi, EXACT)?;
        let q = derivation_from(&table, &self.q)?;
        RelaxedBVData::new(s, w, q)
    }

    pub fn check(&self) -> Result<RelaxedReport> {
        let d = self.build()?;
        let table = d.table().clone();
        let good_b = match &self.good_b {
            Some(g) => Some(GoodBSpec {
                cut: g.cut.iter().map(|n| table.lookup(n)).collect::<Result<_>>()?,
                base: g.base.as_ref().map(|b| b.iter().map(|n| table.lookup(n)).collect::<Result<_>>()).transpose()?,
            }),
            None => None,
        };
        match &self.boundary {
            None => relaxed_report(&d, None, good_b.as_ref()),
            Some(bj) => {
                let bt = table_from(&bj.generators)?;
                let b = PreBFVData::new(from_terms(&bt, &bj.s, EXACT)?, from_terms(&bt, &bj.alpha, EXACT)?, derivation_from(&bt, &bj.q)?)?;
                let images = bj
                    .projection
                    .iter()
                    .map(|(n, terms)| Ok((bt.lookup(n)?, from_terms(&table, terms, EXACT)?)))
                    .collect::<Result<BTreeMap<_, _>>>()?;
                let pi = ProjectionSpec::new(&bt, &table, images)?;
                relaxed_report(&d, Some((&b, &pi)), good_b.as_ref())
            }
        }
    }

    pub fn from_data(d: &RelaxedBVData) -> Self {
        let t = d.table();
        let generators = d
            .coordinates()
            .into_iter()
            .map(|g| GeneratorJson { name: t.name(g).to_string(), ghost: t.get(g).ghost })
            .collect();
        let q = d.q.images().map(|(g, p)| (t.name(g).to_string(), to_terms(p))).collect();
        RelaxedModelJson { generators, s: to_terms(&d.s), varpi: to_terms(&d.varpi), q, boundary: None, good_b: None }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::scalar::{rat, real_int};
    use crate::bv::BvSpaceJson;
    use crate::models::{chain_relaxed, one_pair_relaxed};

    fn named(t: &Arc<GeneratorTable>, n: &str) -> SuperPoly {
        SuperPoly::named(t, n).unwrap()
    }

    #[test]
    fn genuine_bv_manifold_has_no_boundary_data() {
        let space = BvSpaceJson::from_fields(&[("x", 0), ("c", 1)]).build().unwrap();
        let t = space.table().clone();
        let s = named(&t, "x†").mul(&named(&t, "c")).mul(&named(&t, "x"));
        let q = space.hamiltonian_vector_field(&s).unwrap();
        let d = RelaxedBVData::new(s, space.symplectic_form().unwrap(), q.clone()).unwrap();
        assert!(underline_alpha(&d).unwrap().is_zero());
        assert!(underline_omega(&d).unwrap().is_zero());
        assert!(solve_underline_s(&d).unwrap().is_zero());
        let zero = PreBFVData::new(SuperPoly::zero(&t), SuperPoly::zero(&t), q).unwrap();
        let rep = verify_pre_bv_bfv(&d, &zero, &ProjectionSpec::identity(&t)).unwrap();
        assert!(rep.passed(), "{rep:?}");
    }

    #[test]
    fn empty_data() {
        let space = BvSpaceJson::from_fields(&[("x", 0)]).build().unwrap();
        let t = space.table().clone();
        let d = RelaxedBVData::new(SuperPoly::zero(&t), space.symplectic_form().unwrap(), Derivation::new(&t, 1)).unwrap();
        assert!(underline_alpha(&d).unwrap().is_zero());
    }

    #[test]
    fn one_pair_by_hand() {
        // ι_Q(δc δc†) = δc·Q(c†) = k c δc c†  (δc is even)
        let d = one_pair_relaxed(3).unwrap();
        let t = d.table().clone();
        let (c, dc, ca, dca) = (named(&t, "c"), named(&t, "δc"), named(&t, "c†"), named(&t, "δc†"));
        let alpha = c.mul(&dc).mul(&ca).scale(&real_int(3));
        assert_eq!(underline_alpha(&d).unwrap(), alpha);
        // δ(δc c c†) = δc (δc c† − c δc†)
        let w = dc.mul(&dc).mul(&ca).sub(&dc.mul(&c).mul(&dca)).scale(&real_int(3));
        let routes = underline_omega_routes(&d).unwrap();
        assert_eq!(routes.via_alpha, w);
        assert_eq!(routes.via_lie, w);
        // ι_Qϖ̲ contains c² or Q(c) = 0
        assert!(solve_underline_s(&d).unwrap().is_zero());
        let rep = relaxed_report(&d, None, None).unwrap();
        assert!(rep.passed());
    }

    #[test]
    fn two_ghost_model_by_hand() {
        // Q(x) = c1 x, Q(x†) = c2 x†: ι_Qι_Qϖ = 2 c1 c2 x x†, so S̲ = c1 c2 x x†
        let space = BvSpaceJson::from_fields(&[("c1", 1), ("c2", 1), ("x", 0)]).build().unwrap();
        let t = space.table().clone();
        let (c1, c2, x, xa) = (space.field(0), space.field(1), space.field(2), space.antifield(2));
        let mut q = Derivation::new(&t, 1);
        q.set(space.pair(2).field, c1.mul(&x)).unwrap();
        q.set(space.pair(2).antifield, c2.mul(&xa)).unwrap();
        let d = RelaxedBVData::new(SuperPoly::zero(&t), space.symplectic_form().unwrap(), q).unwrap();
        assert_eq!(solve_underline_s(&d).unwrap(), c1.mul(&c2).mul(&x).mul(&xa));
        assert!(relaxed_report(&d, None, None).unwrap().passed());
    }

    #[test]
    fn primitive_of_x_dx() {
        let space = BvSpaceJson::from_fields(&[("x", 0)]).build().unwrap();
        let t = space.table().clone();
        let a = named(&t, "δx").mul(&named(&t, "x"));
        let h = primitive(&a).unwrap();
        assert_eq!(h, named(&t, "x").pow(2).scale_rational(&rat(1, 2)));
        assert_eq!(variational_differential(&h).unwrap(), a);
        assert!(primitive(&SuperPoly::zero(&t)).unwrap().is_zero());
        // x δy is not closed
        let s2 = BvSpaceJson::from_fields(&[("x", 0), ("y", 0)]).build().unwrap();
        let t2 = s2.table().clone();
        assert!(primitive(&named(&t2, "x").mul(&named(&t2, "δy"))).is_err());
    }

    #[test]
    fn corrupted_boundary_one_form_is_caught() {
        let (d, _) = chain_relaxed(2).unwrap();
        let t = d.table().clone();
        let good = induced_pre_bfv(&d).unwrap();
        let pi = ProjectionSpec::identity(&t);
        assert!(verify_pre_bv_bfv(&d, &good, &pi).unwrap().passed());
        let extra = named(&t, "c").mul(&named(&t, "δv1†"));
        let bad = PreBFVData::new(good.s.clone(), good.alpha.add(&extra), good.q.clone()).unwrap();
        let rep = verify_pre_bv_bfv(&d, &bad, &pi).unwrap();
        assert!(!rep.axioms_hold);
        let failing = rep.axioms.iter().find(|c| c.name == "ι_Qϖ = δS + π*α̃").unwrap();
        assert!(!failing.holds);
        assert_eq!(failing.residual, to_terms(&extra.neg()));
    }

    #[test]
    fn rejects_invalid_data() {
        let space = BvSpaceJson::from_fields(&[("x", 0), ("y", 0), ("c1", 1), ("c2", 1)]).build().unwrap();
        let t = space.table().clone();
        let w = space.symplectic_form().unwrap();
        // right parity, wrong ghost degree
        let mut q = Derivation::new(&t, 1);
        q.set(space.pair(0).field, named(&t, "x†")).unwrap();
        assert!(RelaxedBVData::new(SuperPoly::zero(&t), w.clone(), q).is_err());
        // Q(x) = c1 y, Q(y) = c2 gives Q²(x) = −c1 c2
        let mut q = Derivation::new(&t, 1);
        q.set(space.pair(0).field, named(&t, "c1").mul(&named(&t, "y"))).unwrap();
        q.set(space.pair(1).field, named(&t, "c2")).unwrap();
        let r = RelaxedBVData::new(SuperPoly::zero(&t), w, q);
        assert!(matches!(&r, Err(Error::Structure(m)) if m.contains("cohomological")), "{r:?}");
        // ϖ not closed
        let w = named(&t, "y").mul(&named(&t, "δx")).mul(&named(&t, "δx†"));
        assert!(RelaxedBVData::new(SuperPoly::zero(&t), w, Derivation::new(&t, 1)).is_err());
    }

    #[test]
    fn chain_mock_good_b_condition() {
        let (d, space) = chain_relaxed(3).unwrap();
        assert!(!underline_alpha(&d).unwrap().is_zero());
        let all_v: Vec<GenId> = (2..space.len()).flat_map(|i| [space.pair(i).field, space.pair(i).antifield]).collect();
        let rep = check_good_b_condition(&d, &GoodBSpec { cut: all_v, base: None }).unwrap();
        assert!(rep.symplectic && rep.q_tangent && rep.vanishing, "{rep:?}");
        assert!(rep.good());
        // cutting a field but not its antifield degenerates the restricted form
        let rep = check_good_b_condition(&d, &GoodBSpec { cut: vec![space.pair(2).field], base: None }).unwrap();
        assert!(!rep.symplectic);
        assert_eq!(rep.restricted_rank + 1, rep.restricted_size);
        // Q(v0) = c v0 + ξ v1 does not vanish on {v1 = v1† = 0}
        let rep = check_good_b_condition(&d, &GoodBSpec { cut: vec![space.pair(3).field, space.pair(3).antifield], base: None }).unwrap();
        assert!(!rep.q_tangent);
    }

    #[test]
    fn whole_space_is_good_for_genuine_data() {
        let space = BvSpaceJson::from_fields(&[("x", 0), ("c", 1)]).build().unwrap();
        let t = space.table().clone();
        let s = named(&t, "x†").mul(&named(&t, "c"));
        let q = space.hamiltonian_vector_field(&s).unwrap();
        let d = RelaxedBVData::new(s, space.symplectic_form().unwrap(), q).unwrap();
        assert!(check_good_b_condition(&d, &GoodBSpec { cut: vec![], base: None }).unwrap().good());
    }

    #[test]
    fn json_round_trip() {
        let (d, _) = chain_relaxed(1).unwrap();
        let j = RelaxedModelJson::from_data(&d);
        let text = serde_json::to_string(&j).unwrap();
        let back: RelaxedModelJson = serde_json::from_str(&text).unwrap();
        let d2 = back.build().unwrap();
        assert_eq!(underline_alpha(&d2).unwrap().to_string(), underline_alpha(&d).unwrap().to_string());
        assert!(back.check().unwrap().passed());
    }
}
