//! Antibracket, BV Laplacian, quantum master equation and the observable differential Ω.

use bvkit::bv::BvSpaceJson;

fn main() -> bvkit::Result<()> {
    let space = BvSpaceJson::from_fields(&[("x", 0), ("c", 1)]).build()?;
    let (x, c) = (space.field(0), space.field(1));
    let (xd, cd) = (space.antifield(0), space.antifield(1));

    // the gauge shift x ↦ x + c
    let s = xd.mul(&c);
    println!("S = {s}");
    println!("(S,S) = {}", space.bracket(&s, &s)?);
    println!("ΔS = {}", space.laplacian(&s)?);
    let r = space.check_qme(&s)?;
    println!("QME holds: {}", r.holds);

    // x x† c is Δ-anomalous
    let bad = x.mul(&xd).mul(&c);
    println!("S' = {bad}, QME residual {}", space.qme_residual(&bad)?);

    let o = x.mul(&cd).add(&x.pow(2));
    let once = space.omega(&s, &o)?;
    println!("Ω(O) = {once}");
    println!("Ω²(O) = {}", space.omega(&s, &once)?);
    assert!(r.holds && space.omega(&s, &once)?.is_zero());
    Ok(())
}
