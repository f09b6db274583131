//! Relaxed BV data on a chain of fields with a boundary ghost.

use bvkit::models::chain_relaxed;
use bvkit::relaxed::relaxed_report;

fn main() -> bvkit::Result<()> {
    let (d, _space) = chain_relaxed(2)?;
    let r = relaxed_report(&d, None, None)?;
    println!("{}", serde_json::to_string_pretty(&r).expect("report serializes"));
    for check in r.pre_bv_bfv.axioms.iter().chain(&r.pre_bv_bfv.theorem) {
        println!("{:?}", check);
    }
    println!("passed: {}", r.passed());
    assert!(r.passed());
    Ok(())
}
