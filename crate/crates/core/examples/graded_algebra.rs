//! Supercommutative polynomials, graded derivatives and the de Rham differential.

use bvkit::algebra::{variational_differential, GeneratorTable, SuperPoly};

fn main() -> bvkit::Result<()> {
    let mut b = GeneratorTable::builder();
    let x = b.coordinate("x", 0)?;
    let c = b.coordinate("c", 1)?;
    let t = b.build();
    let xp = SuperPoly::generator(&t, x);
    let cp = SuperPoly::generator(&t, c);

    // an odd generator squares to zero
    println!("c·c = {}", cp.mul(&cp));
    let f = xp.pow(2).mul(&cp);
    println!("f = {f}, parity {:?}, ghost {:?}", f.parity(), f.ghost_degree());
    println!("∂f/∂x = {}", f.left_derivative(x));
    println!("∂f/∂c = {}", f.left_derivative(c));

    let df = variational_differential(&f)?;
    println!("δf = {df}");
    println!("δδf = {}", variational_differential(&df)?);
    assert!(variational_differential(&df)?.is_zero());
    Ok(())
}
