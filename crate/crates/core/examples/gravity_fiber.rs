//! Kernel of the wedge constraint, the quadratic form on it and the ε contraction.

use bvkit::gravity::{block_structure_check, build_quadratic_matrix, epsilon_identity_check, kernel_report, KernelBasis, StandardFrame};

fn main() -> bvkit::Result<()> {
    for n in 4..=6 {
        let kb = KernelBasis::solve(&StandardFrame::new(n)?)?;
        let k = kernel_report(&kb);
        println!("N={n}: dim ker = {} (expected {}), free labels {:?}", k.dimension, k.expected_dimension, &k.free_labels[..k.free_labels.len().min(6)]);
        let q = build_quadratic_matrix(&kb);
        let b = block_structure_check(&q, n)?;
        println!(
            "  {} triple blocks, {} trace blocks of size {}, triple constant {:?}, trace dets {:?}, det M = {}",
            b.triple_blocks,
            b.trace_blocks,
            b.trace_block_size,
            b.triple_fit.constant,
            b.trace_block_dets.first(),
            b.det
        );
        let e = epsilon_identity_check(n);
        println!("  εε contraction constant {} ((N−3)! = {})", e.constant, e.factorial);
    }
    Ok(())
}
