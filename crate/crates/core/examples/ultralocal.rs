//! Integrating out the quadratic fiber at one site, with two-point insertions.

use bvkit::algebra::scalar::rat;
use bvkit::gravity::{ultralocal_model, ultralocal_pushforward, Insertions};

fn main() -> bvkit::Result<()> {
    let model = ultralocal_model(4, rat(3, 2), true, 2)?;
    let r = ultralocal_pushforward(&model, &Insertions::List(vec![vec![0, 0], vec![0, 1], vec![3, 5], vec![0, 1, 2, 3]]))?;
    println!("fiber dimension {}, λ = {}", r.fiber_dimension, r.lambda);
    println!("effective action matches base action: {}", r.action_matches_base);
    println!("normalization det {} (det λM = {}), half exponent {}", r.normalization.det, r.expected_det, r.normalization.det_half_exponent);
    for p in &r.propagators {
        let show = |t| serde_json::to_string(t).expect("terms serialize");
        println!("⟨{}⟩: pushed {} oracle {} agree {}", p.observable.join(" "), show(&p.pushed), show(&p.oracle), p.agree);
    }
    assert!(r.passed);
    Ok(())
}
