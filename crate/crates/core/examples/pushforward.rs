//! BV pushforward to a smaller space: the effective action, QME transport and the chain-map property.

use bvkit::models::{gaussian_fiber_model, qme_transport_model};
use bvkit::pushforward::{chain_map_check, pushforward_effective_action};
use bvkit::random::rng;

fn main() -> bvkit::Result<()> {
    let m = qme_transport_model(&mut rng(3))?;
    let dens = &m.density;
    println!("S = {}", dens.log_weight);
    println!("QME upstairs: {}", dens.space.check_qme(&dens.log_weight)?.holds);
    let (pushed, eff) = pushforward_effective_action(dens, &m.split, &m.lagrangian)?;
    println!("effective action (through ħ^{}) = {}", eff.valid_order, eff.action);
    println!("normalization = {:?}", eff.normalization.to_json());
    let qme_out = pushed.space.check_qme(&eff.action)?.holds;
    println!("QME downstairs: {qme_out}");

    // a density with a nontrivial prefactor, integrated over a Gaussian fiber
    let g = gaussian_fiber_model(&mut rng(3), 2)?;
    println!("φ = ({}) e^(iS/ħ), S = {}", g.density.prefactor, g.density.log_weight);
    let chain = chain_map_check(&g.density, &g.split, &g.lagrangian)?;
    println!("Δ₁P_L φ = ±P_L Δφ: {}", chain.holds);
    assert!(qme_out && chain.holds);
    Ok(())
}
