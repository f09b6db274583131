//! Graded derivations and the Cartan calculus of variational forms.
//!
//! Conventions: `δ` is the odd derivation `x ↦ δx`, `δx ↦ 0`. For a
//! derivation `D` of parity `|D|`, the contraction `ι_D` has parity
//! `|D| + 1` and sends `δx ↦ D(x)`. The Lie derivative is the graded
//! commutator `L_D = [ι_D, δ] = ι_D δ + (-1)^{|D|} δ ι_D`.

use std::collections::BTreeMap;
use std::sync::Arc;

use super::generator::{GenId, GeneratorTable};
use super::poly::SuperPoly;
use crate::error::{Error, Result};

/// A left derivation given by its images on generators.
#[derive(Clone, Debug)]
pub struct Derivation {
    table: Arc<GeneratorTable>,
    images: BTreeMap<GenId, SuperPoly>,
    parity: u8,
}

impl Derivation {
    pub fn new(table: &Arc<GeneratorTable>, parity: u8) -> Self {
        Derivation { table: table.clone(), images: BTreeMap::new(), parity: parity % 2 }
    }

    pub fn with_images(table: &Arc<GeneratorTable>, parity: u8, images: impl IntoIterator<Item = (GenId, SuperPoly)>) -> Result<Self> {
        let mut d = Self::new(table, parity);
        for (g, img) in images {
            d.set(g, img)?;
        }
        Ok(d)
    }

    /// Sets `D(g)`; the image must have parity `|g| + |D|`.
    pub fn set(&mut self, g: GenId, image: SuperPoly) -> Result<()> {
        if !Arc::ptr_eq(image.table(), &self.table) {
            return Err(Error::TableMismatch);
        }
        let want = (self.table.parity(g) + self.parity) % 2;
        if let Some(p) = image.parity() {
            if !image.is_zero() && p != want {
                return Err(Error::Structure(format!(
                    "image of `{}` has parity {p}, derivation of parity {} needs {want}",
                    self.table.name(g),
                    self.parity
                )));
            }
        } else {
            return Err(Error::Structure(format!("image of `{}` is not parity-homogeneous", self.table.name(g))));
        }
        if image.is_zero() {
            self.images.remove(&g);
        } else {
            self.images.insert(g, image);
        }
        Ok(())
    }

    pub fn parity(&self) -> u8 {
        self.parity
    }

    pub fn table(&self) -> &Arc<GeneratorTable> {
        &self.table
    }

    pub fn image(&self, g: GenId) -> SuperPoly {
        self.images.get(&g).cloned().unwrap_or_else(|| SuperPoly::zero(&self.table))
    }

    pub fn images(&self) -> impl Iterator<Item = (GenId, &SuperPoly)> {
        self.images.iter().map(|(g, p)| (*g, p))
    }

    /// `D(f) = Σ_g D(g) · ∂_l f/∂g`.
    pub fn apply(&self, f: &SuperPoly) -> SuperPoly {
        let mut out = SuperPoly::zero(&self.table).with_order(f.order());
        for g in f.generators() {
            if let Some(img) = self.images.get(&g) {
                out = out.add(&img.mul(&f.left_derivative(g)));
            }
        }
        out
    }

    pub fn try_apply(&self, f: &SuperPoly) -> Result<SuperPoly> {
        if !Arc::ptr_eq(f.table(), &self.table) {
            return Err(Error::TableMismatch);
        }
        Ok(self.apply(f))
    }

    /// `D ∘ D` evaluated on every form-degree-0 generator of the table.
    pub fn square_on_generators(&self) -> BTreeMap<GenId, SuperPoly> {
        self.table
            .iter()
            .filter(|(_, g)| g.form_degree == 0)
            .map(|(id, _)| (id, self.apply(&self.image(id))))
            .filter(|(_, p)| !p.is_zero())
            .collect()
    }
}

/// The variational differential as a derivation.
pub fn delta_derivation(table: &Arc<GeneratorTable>, f: &SuperPoly) -> Result<Derivation> {
    let mut d = Derivation::new(table, 1);
    for g in f.generators() {
        let gen = table.get(g);
        if gen.form_degree == 0 {
            let dg = table.differential(g)?;
            d.images.insert(g, SuperPoly::generator(table, dg));
        }
    }
    Ok(d)
}

/// `δf`, with `δ(x) = δx`, `δ(δx) = 0`, graded Leibniz.
pub fn variational_differential(f: &SuperPoly) -> Result<SuperPoly> {
    Ok(delta_derivation(f.table(), f)?.apply(f))
}

/// Interior product `ι_D`, a derivation of parity `|D| + 1`.
pub fn contract(d: &Derivation, form: &SuperPoly) -> Result<SuperPoly> {
    if !Arc::ptr_eq(form.table(), d.table()) {
        return Err(Error::TableMismatch);
    }
    let table = d.table();
    let mut iota = Derivation::new(table, d.parity() + 1);
    for (g, img) in d.images() {
        if table.get(g).form_degree != 0 {
            continue;
        }
        if let Some(dg) = table.get(g).differential {
            iota.images.insert(dg, img.clone());
        }
    }
    Ok(iota.apply(form))
}

/// Lie derivative `L_D = ι_D δ + (-1)^{|D|} δ ι_D`.
pub fn lie_derivative(d: &Derivation, form: &SuperPoly) -> Result<SuperPoly> {
    let first = contract(d, &variational_differential(form)?)?;
    let second = variational_differential(&contract(d, form)?)?;
    Ok(if d.parity() == 0 { first.add(&second) } else { first.sub(&second) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::scalar::real_int;

    struct Fixture {
        t: Arc<GeneratorTable>,
        x: GenId,
        y: GenId,
        c: GenId,
    }

    fn fixture() -> Fixture {
        let mut b = GeneratorTable::builder();
        let x = b.coordinate("x", 0).unwrap();
        let y = b.coordinate("y", 0).unwrap();
        let c = b.coordinate("c", 1).unwrap();
        Fixture { t: b.build(), x, y, c }
    }

    fn g(f: &Fixture, id: GenId) -> SuperPoly {
        SuperPoly::generator(&f.t, id)
    }

    fn dg(f: &Fixture, id: GenId) -> SuperPoly {
        SuperPoly::generator(&f.t, f.t.differential(id).unwrap())
    }

    #[test]
    fn delta_basics() {
        let f = fixture();
        assert_eq!(variational_differential(&g(&f, f.x)).unwrap(), dg(&f, f.x));
        assert!(variational_differential(&dg(&f, f.x)).unwrap().is_zero());
        let xy = g(&f, f.x).mul(&g(&f, f.y));
        let expected = dg(&f, f.x).mul(&g(&f, f.y)).add(&g(&f, f.x).mul(&dg(&f, f.y)));
        assert_eq!(variational_differential(&xy).unwrap(), expected);
    }

    #[test]
    fn delta_squares_to_zero() {
        let f = fixture();
        let p = g(&f, f.x).mul(&g(&f, f.c)).mul(&g(&f, f.y)).add(&g(&f, f.x).pow(3));
        let d1 = variational_differential(&p).unwrap();
        assert!(!d1.is_zero());
        assert!(variational_differential(&d1).unwrap().is_zero());
    }

    #[test]
    fn missing_differential_is_an_error() {
        let mut b = GeneratorTable::builder();
        let z = b.bare("z", 0).unwrap();
        let t = b.build();
        assert!(matches!(
            variational_differential(&SuperPoly::generator(&t, z)),
            Err(Error::MissingDifferential(_))
        ));
    }

    #[test]
    fn contraction_of_differential_and_function() {
        let f = fixture();
        let mut d = Derivation::new(&f.t, 1);
        d.set(f.x, g(&f, f.c).mul(&g(&f, f.y))).unwrap();
        assert_eq!(contract(&d, &dg(&f, f.x)).unwrap(), g(&f, f.c).mul(&g(&f, f.y)));
        assert!(contract(&d, &g(&f, f.x)).unwrap().is_zero());
    }

    #[test]
    fn contraction_two_form_component_expansion() {
        // ι_D(δx δy) = D(x) δy + (-1)^{|ι_D||δx|} δx D(y); here D odd, so ι_D even.
        let f = fixture();
        let mut d = Derivation::new(&f.t, 1);
        d.set(f.x, g(&f, f.c)).unwrap();
        d.set(f.y, g(&f, f.c).mul(&g(&f, f.x))).unwrap();
        let form = dg(&f, f.x).mul(&dg(&f, f.y));
        let expected = g(&f, f.c).mul(&dg(&f, f.y)).add(&dg(&f, f.x).mul(&g(&f, f.c).mul(&g(&f, f.x))));
        assert_eq!(contract(&d, &form).unwrap(), expected);
    }

    #[test]
    fn lie_derivative_on_functions_and_differentials() {
        let f = fixture();
        let mut d = Derivation::new(&f.t, 1);
        d.set(f.x, g(&f, f.c).mul(&g(&f, f.y))).unwrap();
        let lx = lie_derivative(&d, &g(&f, f.x)).unwrap();
        assert_eq!(lx, d.image(f.x));
        // L_D δx = -δ(D x) for odd D with this convention
        let ldx = lie_derivative(&d, &dg(&f, f.x)).unwrap();
        assert_eq!(ldx, variational_differential(&d.image(f.x)).unwrap().neg());
    }

    #[test]
    fn image_parity_is_checked() {
        let f = fixture();
        let mut d = Derivation::new(&f.t, 1);
        assert!(d.set(f.x, g(&f, f.y)).is_err());
        assert!(d.set(f.x, g(&f, f.c).scale(&real_int(2))).is_ok());
    }
}
