//! Seeded model families used by the property suites and examples.

use rand::Rng;
use num_traits::Signed;

use crate::algebra::scalar::{real, real_int};
use crate::algebra::{variational_differential, Derivation, GenId, SuperPoly, DEFAULT_HBAR_ORDER};
use crate::bv::{BvSpace, BvSpaceJson, HalfDensity};
use crate::error::Result;
use crate::pushforward::{Integrate, LagrangianSpec, SplitSpec};
use crate::relaxed::RelaxedBVData;
use crate::random::{poly, rational, PolyShape, TestRng};

/// A density on a split space with a Lagrangian in the fiber.
#[derive(Clone, Debug)]
pub struct SplitModel {
    pub density: HalfDensity,
    pub split: SplitSpec,
    pub lagrangian: LagrangianSpec,
}

fn ids(space: &BvSpace, pairs: &[usize]) -> Vec<GenId> {
    pairs.iter().flat_map(|&i| [space.pair(i).field, space.pair(i).antifield]).collect()
}

/// Random polynomial in `u` with rational coefficients and degree ≤ `deg`.
fn poly_in(rng: &mut TestRng, u: &SuperPoly, deg: u32) -> SuperPoly {
    let mut out = SuperPoly::zero(u.table());
    for k in 0..=deg {
        if rng.gen_bool(0.7) {
            out = out.add(&u.pow(k).scale_rational(&rational(rng)));
        }
    }
    out
}

/// Chain-map densities with purely odd fibers: `n` base and `n` fiber pairs.
pub fn odd_fiber_model(rng: &mut TestRng, n: usize) -> Result<SplitModel> {
    let mut fields = Vec::new();
    let base_ghosts = [0, 1, 0];
    for (i, g) in base_ghosts.iter().take(n).enumerate() {
        fields.push((format!("y{}", i + 1), *g));
    }
    // the second fiber pair has an even field and is integrated along its antifield
    for i in 0..n {
        let ghost = match i {
            1 => 0,
            _ if i % 2 == 0 => -1,
            _ => 1,
        };
        fields.push((format!("η{}", i + 1), ghost));
    }
    let refs: Vec<(&str, i32)> = fields.iter().map(|(s, g)| (s.as_str(), *g)).collect();
    let space = BvSpaceJson::from_fields(&refs).build()?;
    let fiber: Vec<usize> = (n..2 * n).collect();
    let choices: Vec<Integrate> = (0..n).map(|i| if i == 1 { Integrate::Antifield } else { Integrate::Field }).collect();
    let all = ids(&space, &(0..2 * n).collect::<Vec<_>>());
    let t = space.table().clone();
    let base = ids(&space, &(0..n).collect::<Vec<_>>());
    let mut s = poly(rng, &t, &all, &PolyShape { parity: Some(0), terms: 5, max_hbar: 1, ..Default::default() });
    let mut f = poly(rng, &t, &all, &PolyShape { terms: 5, max_hbar: 1, complex: true, ..Default::default() });
    // sparse random data rarely reaches the top component, so couple the
    // integrated odd coordinates to the base explicitly
    let odd: Vec<SuperPoly> = (0..n)
        .map(|i| if choices[i] == Integrate::Field { space.field(n + i) } else { space.antifield(n + i) })
        .collect();
    let coeff = |rng: &mut TestRng, parity: usize, complex: bool| {
        poly(rng, &t, &base, &PolyShape { parity: Some((parity % 2) as u8), terms: 2, max_degree: 2, max_hbar: 1, complex, ..Default::default() })
    };
    for skip in std::iter::once(None).chain((0..n).map(Some)) {
        let mono = odd.iter().enumerate().filter(|(i, _)| Some(*i) != skip).fold(SuperPoly::one(&t), |acc, (_, g)| acc.mul(g));
        let k = n - skip.is_some() as usize;
        f = f.add(&coeff(rng, 0, true).mul(&mono)).add(&coeff(rng, 1, true).mul(&mono));
        if k.is_multiple_of(2) || k == 1 {
            s = s.add(&coeff(rng, k, false).mul(&mono));
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            s = s.add(&coeff(rng, 0, false).mul(&odd[i]).mul(&odd[j]));
        }
    }
    let density = HalfDensity::new(&space, &s.with_order(DEFAULT_HBAR_ORDER), &f.with_order(DEFAULT_HBAR_ORDER));
    Ok(SplitModel { density, split: SplitSpec::new(fiber), lagrangian: LagrangianSpec { choices, gauge_fermion: None } })
}

/// Chain-map densities with Gaussian fibers: the fiber has `n − 1` even
/// coordinates with a random nondegenerate quadratic core and one odd pair.
pub fn gaussian_fiber_model(rng: &mut TestRng, n: usize) -> Result<SplitModel> {
    let mut fields = Vec::new();
    let base_ghosts = [0, 1, 0];
    for (i, g) in base_ghosts.iter().take(n).enumerate() {
        fields.push((format!("y{}", i + 1), *g));
    }
    for i in 0..n - 1 {
        fields.push((format!("x{}", i + 1), 0));
    }
    fields.push(("θ".to_string(), -1));
    let refs: Vec<(&str, i32)> = fields.iter().map(|(s, g)| (s.as_str(), *g)).collect();
    let space = BvSpaceJson::from_fields(&refs).build()?;
    let t = space.table().clone();
    let base_gens = ids(&space, &(0..n).collect::<Vec<_>>());
    let all = ids(&space, &(0..2 * n).collect::<Vec<_>>());
    let xs: Vec<SuperPoly> = (n..2 * n - 1).map(|i| space.field(i)).collect();
    let theta = space.field(2 * n - 1);

    let mut s = poly(rng, &t, &base_gens, &PolyShape { parity: Some(0), terms: 4, ..Default::default() });
    let cubic = rng.gen_bool(0.5);
    // quadratic core: diagonal dominant so it is nondegenerate
    for (i, xi) in xs.iter().enumerate() {
        let d = rational(rng).abs() + num_rational::BigRational::from_integer(3.into());
        s = s.add(&xi.pow(2).scale_rational(&(d / num_rational::BigRational::from_integer(2.into()))));
        for xj in &xs[i + 1..] {
            if rng.gen_bool(0.5) {
                s = s.add(&xi.mul(xj).scale_rational(&(rational(rng) / num_rational::BigRational::from_integer(4.into()))));
            }
        }
        // linear source: an even base coordinate, or a nilpotent one when a cubic vertex is present
        let source = if cubic { space.field(1).mul(&space.antifield(0)) } else { space.field(0) };
        s = s.add(&xi.mul(&source).scale_rational(&rational(rng)));
    }
    // perturbative part: every term nilpotent or suppressed
    let odd_part = poly(rng, &t, &all, &PolyShape { parity: Some(0), terms: 6, constant: false, ..Default::default() });
    let nilpotent = odd_part.filter_terms(|m| m.factors().iter().any(|(g, _)| t.get(*g).is_odd()));
    s = s.add(&nilpotent);
    s = s.add(&theta.mul(&space.field(1)).mul(&space.field(0)).scale_rational(&rational(rng)));
    if cubic {
        s = s.add(&xs[0].pow(3).scale_rational(&rational(rng)));
    }
    let f = poly(rng, &t, &all, &PolyShape { terms: 5, max_hbar: 1, complex: true, ..Default::default() });
    let fiber: Vec<usize> = (n..2 * n).collect();
    let density = HalfDensity::new(&space, &s.with_order(DEFAULT_HBAR_ORDER), &f.with_order(DEFAULT_HBAR_ORDER));
    Ok(SplitModel { density, split: SplitSpec::new(fiber), lagrangian: LagrangianSpec::antifields_zero(n) })
}

/// A Δ-closed polynomial density (`log weight 0`) on a 2+2-pair space with
/// odd fibers, and a gauge-fermion deformation of the Lagrangian.
#[derive(Clone, Debug)]
pub struct ExactnessModel {
    pub model: SplitModel,
    pub deformed: LagrangianSpec,
}

pub fn exactness_model(rng: &mut TestRng) -> Result<ExactnessModel> {
    let space = BvSpaceJson::from_fields(&[("y", 0), ("c", 1), ("η1", -1), ("η2", 1)]).build()?;
    let t = space.table().clone();
    let all = ids(&space, &[0, 1, 2, 3]);
    let mut g = poly(rng, &t, &all, &PolyShape { terms: 5, max_degree: 4, ..Default::default() });
    // terms that see the antifield shift made by a linear gauge fermion
    let base = ids(&space, &[0, 1]);
    let top = space.field(2).mul(&space.field(3));
    for extra in [space.antifield(2), space.antifield(3), space.antifield(2).mul(&space.antifield(3))] {
        let c = poly(rng, &t, &base, &PolyShape { terms: 2, max_degree: 2, ..Default::default() });
        g = g.add(&c.mul(&top).mul(&extra));
    }
    // a polynomial with no pair present in full is Δ-closed
    let one_per_pair: Vec<GenId> = (0..4)
        .map(|i| if rng.gen_bool(0.5) { space.pair(i).field } else { space.pair(i).antifield })
        .collect();
    let h = poly(rng, &t, &one_per_pair, &PolyShape { terms: 3, ..Default::default() });
    let phi = space.laplacian(&g)?.add(&h);
    let density = HalfDensity::new(&space, &SuperPoly::zero(&t), &phi);
    let split = SplitSpec::new(vec![2, 3]);
    let lagrangian = LagrangianSpec::antifields_zero(2);
    let psi = space.field(2).scale_rational(&rational(rng)).add(&space.field(3).scale_rational(&rational(rng)));
    let deformed = LagrangianSpec::antifields_zero(2).with_gauge_fermion(psi);
    Ok(ExactnessModel { model: SplitModel { density, split, lagrangian }, deformed })
}

/// QME-satisfying action on base `(y1, y2, c, b)` coupled to fibers
/// `(x, θ1, θ2)`; fiber couplings depend on the base only through `u = y1 − y2`,
/// `b` and `c`.
pub fn qme_transport_model(rng: &mut TestRng) -> Result<SplitModel> {
    let space = BvSpaceJson::from_fields(&[("y1", 0), ("y2", 0), ("c", 1), ("b", -1), ("x", 0), ("θ1", -1), ("θ2", 1)]).build()?;
    let t = space.table().clone();
    let f = |n: &str| SuperPoly::named(&t, n).unwrap();
    let u = f("y1").sub(&f("y2"));
    let (b, c, x, t1, t2) = (f("b"), f("c"), f("x"), f("θ1"), f("θ2"));
    let bc = b.mul(&c);
    let mut s = f("y1†").mul(&c).add(&f("y2†").mul(&c));
    s = s.add(&poly_in(rng, &u, 3)).add(&bc.mul(&poly_in(rng, &u, 2)));
    let a = rational(rng).abs() + num_rational::BigRational::from_integer(1.into());
    s = s.add(&x.pow(2).scale_rational(&(a / num_rational::BigRational::from_integer(2.into()))));
    let chain = SuperPoly::one(&t)
        .add(&x.scale_rational(&rational(rng)))
        .add(&x.pow(2).scale_rational(&rational(rng)));
    s = s.add(&t1.mul(&t2).mul(&chain));
    s = s.add(&t1.mul(&c).mul(&poly_in(rng, &u, 1)));
    s = s.add(&t2.mul(&b).mul(&poly_in(rng, &u, 1)));
    s = s.add(&bc.mul(&x).mul(&poly_in(rng, &u, 1)));
    let density = HalfDensity::exponential(&space, &s.with_order(DEFAULT_HBAR_ORDER));
    Ok(SplitModel { density, split: SplitSpec::new(vec![4, 5, 6]), lagrangian: LagrangianSpec::antifields_zero(3) })
}

/// A QME-satisfying action `S` on a space of at most three pairs.
pub fn qme_action(rng: &mut TestRng, kind: usize) -> Result<(BvSpace, SuperPoly)> {
    if kind.is_multiple_of(2) {
        // antifield-free action: the bracket and Laplacian of S vanish
        let space = BvSpaceJson::from_fields(&[("y", 0), ("c", 1), ("b", -1)]).build()?;
        let fields: Vec<GenId> = (0..3).map(|i| space.pair(i).field).collect();
        let s = poly(rng, space.table(), &fields, &PolyShape { parity: Some(0), ghost: Some(0), terms: 5, max_degree: 4, ..Default::default() });
        Ok((space, s))
    } else {
        let space = BvSpaceJson::from_fields(&[("y1", 0), ("y2", 0), ("c", 1)]).build()?;
        let u = space.field(0).sub(&space.field(1));
        let c = space.field(2);
        let s = space.antifield(0).mul(&c).add(&space.antifield(1).mul(&c)).add(&poly_in(rng, &u, 3));
        Ok((space, s))
    }
}

/// Odd toy space `(b_i, c_i)` with an antifield-free action that has a
/// nonvanishing partition function.
pub fn odd_toy_model(rng: &mut TestRng, pairs: usize) -> Result<(BvSpace, SuperPoly)> {
    let mut fields = Vec::new();
    for i in 0..pairs {
        fields.push((format!("b{}", i + 1), -1));
        fields.push((format!("c{}", i + 1), 1));
    }
    let refs: Vec<(&str, i32)> = fields.iter().map(|(s, g)| (s.as_str(), *g)).collect();
    let space = BvSpaceJson::from_fields(&refs).build()?;
    let mut s = SuperPoly::zero(space.table());
    for i in 0..pairs {
        let lam = rational(rng);
        s = s.add(&space.field(2 * i).mul(&space.field(2 * i + 1)).scale_rational(&lam));
    }
    if pairs >= 2 {
        let quartic = space.field(0).mul(&space.field(1)).mul(&space.field(2)).mul(&space.field(3));
        s = s.add(&quartic.scale_rational(&rational(rng)));
        let mix = space.field(0).mul(&space.field(3)).scale_rational(&rational(rng));
        s = s.add(&mix);
    }
    Ok((space, s))
}

/// A random odd ghost −1 gauge fermion in the fields of an odd toy space.
pub fn toy_gauge_fermion(rng: &mut TestRng, space: &BvSpace) -> SuperPoly {
    let t = space.table();
    let fields: Vec<GenId> = (0..space.len()).map(|i| space.pair(i).field).collect();
    let mut psi = poly(rng, t, &fields, &PolyShape { parity: Some(1), ghost: Some(-1), terms: 3, constant: false, ..Default::default() });
    if psi.is_zero() {
        psi = space.field(0).scale(&real(rational(rng)));
    }
    psi
}

/// Seeded relaxed BV data on three pairs `c1, c2` (ghost 1) and `x`
/// (ghost 0 or −1). `Q = c1·X + c2·Y` where `X` and `Y` are even vector
/// fields moving disjoint coordinate blocks `A`, `B` with images in
/// `A ∪ U`, `B ∪ U`; they commute and kill `c1, c2`, so `Q² = 0`.
/// `ϖ` is the Darboux form plus an exact correction, `S` is random.
pub fn relaxed_model(rng: &mut TestRng, variant: usize) -> Result<RelaxedBVData> {
    let x_ghost = if variant.is_multiple_of(2) { 0 } else { -1 };
    let space = BvSpaceJson::from_fields(&[("c1", 1), ("c2", 1), ("x", x_ghost)]).build()?;
    let t = space.table().clone();
    let (c1, c2) = (space.field(0), space.field(1));
    let coords: Vec<GenId> = space.generators().into_iter().collect();
    // x ∈ A and x† ∈ B so that ϖ pairs the two blocks; c1†, c2† land in A, B or U
    let (mut a, mut b, mut u) = (vec![space.pair(2).field], vec![space.pair(2).antifield], Vec::new());
    for i in 0..2 {
        match rng.gen_range(0..3) {
            0 => a.push(space.pair(i).antifield),
            1 => b.push(space.pair(i).antifield),
            _ => u.push(space.pair(i).antifield),
        }
    }
    let (a, b, u) = (&a[..], &b[..], &u[..]);
    let mut q = Derivation::new(&t, 1);
    for (block, c) in [(a, &c1), (b, &c2)] {
        let vars: Vec<GenId> = block.iter().chain(u).copied().collect();
        for &g in block {
            let ghost = t.get(g).ghost;
            let scale = SuperPoly::generator(&t, g).scale_rational(&rational(rng));
            let img = poly(rng, &t, &vars, &PolyShape { ghost: Some(ghost), terms: 2, max_degree: 2, ..Default::default() }).add(&scale);
            q.set(g, c.mul(&img))?;
        }
    }
    let s = poly(rng, &t, &coords, &PolyShape { ghost: Some(0), terms: 4, max_degree: 3, constant: false, ..Default::default() });
    // β: a ghost −1 one-form, one δ factor per term
    let mut beta = SuperPoly::zero(&t);
    for _ in 0..2 {
        let g = coords[rng.gen_range(0..coords.len())];
        let dg = SuperPoly::generator(&t, t.differential(g)?);
        let want = -1 - t.get(g).ghost;
        let coeff = poly(rng, &t, &coords, &PolyShape { ghost: Some(want), terms: 1, max_degree: 2, ..Default::default() });
        beta = beta.add(&dg.mul(&coeff));
    }
    let varpi = space.symplectic_form()?.add(&variational_differential(&beta)?);
    RelaxedBVData::new(s, varpi, q)
}

/// Hand-checkable relaxed model on one pair `(c, c†)`, `c` of ghost 1:
/// `Q(c) = 0`, `Q(c†) = k·c·c†`, `S = 0`, `ϖ = δc δc†`.
pub fn one_pair_relaxed(k: i64) -> Result<RelaxedBVData> {
    let space = BvSpaceJson::from_fields(&[("c", 1)]).build()?;
    let t = space.table().clone();
    let mut q = Derivation::new(&t, 1);
    q.set(space.pair(0).antifield, space.field(0).mul(&space.antifield(0)).scale(&real_int(k)))?;
    RelaxedBVData::new(SuperPoly::zero(&t), space.symplectic_form()?, q)
}

/// Finite mock of a chain `v_0 … v_k` with `Qv_j = c v_j + ξ v_{j+1}`:
/// the Hamiltonian field of `Σ v_j†(c v_j + ξ v_{j+1})`, with an extra
/// term `c·v_0†` in `S` that makes the data relaxed.
pub fn chain_relaxed(k: usize) -> Result<(RelaxedBVData, BvSpace)> {
    let mut fields = vec![("c".to_string(), 1), ("ξ".to_string(), 1)];
    for j in 0..=k {
        fields.push((format!("v{j}"), 0));
    }
    let refs: Vec<(&str, i32)> = fields.iter().map(|(s, g)| (s.as_str(), *g)).collect();
    let space = BvSpaceJson::from_fields(&refs).build()?;
    let (c, xi) = (space.field(0), space.field(1));
    let mut s = SuperPoly::zero(space.table());
    for j in 0..=k {
        let mut qv = c.mul(&space.field(2 + j));
        if j < k {
            qv = qv.add(&xi.mul(&space.field(3 + j)));
        }
        s = s.add(&space.antifield(2 + j).mul(&qv));
    }
    let q = space.hamiltonian_vector_field(&s)?;
    let s = s.add(&c.mul(&space.antifield(2)));
    Ok((RelaxedBVData::new(s, space.symplectic_form()?, q)?, space))
}
