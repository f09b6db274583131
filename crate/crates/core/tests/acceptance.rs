//! One test per acceptance criterion. Each prints a single
//! `PASS criterion k: ...` or `FAIL criterion k: ...` line (run with
//! `--nocapture` to see them) and fails when its criterion fails.

use std::time::{Duration, Instant};

use bvkit::algebra::scalar::{int, rat};
use bvkit::cli::{kernel_outcome, pushforward_outcome, quadform_outcome};
use bvkit::gravity::{
    block_structure_check, build_quadratic_matrix, epsilon_identity_check, kernel_report, spot_check, ultralocal_model,
    ultralocal_pushforward, Insertions, KernelBasis, StandardFrame,
};
use bvkit::suites::{
    chain_map_suite, exactness_suite, expectation_invariance_suite, omega_square_suite, qme_transport_suite, relaxed_suite,
    SuiteReport,
};

const SEED: u64 = 2024;

fn report(k: usize, ok: bool, detail: &str) {
    println!("{} criterion {k}: {detail}", if ok { "PASS" } else { "FAIL" });
}

fn suites_ok(reports: &[SuiteReport]) -> (bool, String) {
    let ok = reports.iter().all(|r| r.all_passed() && r.nontrivial > 0);
    let detail = reports.iter().map(|r| format!("{} {}/{} ({} nontrivial)", r.name, r.passed, r.trials, r.nontrivial)).collect::<Vec<_>>().join("; ");
    let first = reports.iter().find_map(|r| r.counterexample.clone()).map(|c| format!("; first counterexample: {c}")).unwrap_or_default();
    (ok, detail + &first)
}

#[test]
fn criterion_01_kernel_dimension() {
    let t = Instant::now();
    let kb = KernelBasis::solve(&StandardFrame::new(4).unwrap()).unwrap();
    let r = kernel_report(&kb);
    let elapsed = t.elapsed();
    let labels = ["v_1^{23}", "v_2^{13}", "v_3^{12}", "v_1^{12}", "v_1^{13}", "v_2^{21}"];
    let relations = ["v_3^{32} = -v_1^{12}", "v_2^{23} = -v_1^{13}", "v_3^{31} = -v_2^{21}"];
    let mut have = r.dependent_relations.clone();
    let mut want: Vec<String> = relations.iter().map(|s| s.to_string()).collect();
    have.sort();
    want.sort();
    let cli = kernel_outcome(4).unwrap();
    let ok = r.dimension == 6
        && r.free_labels == labels
        && have == want
        && r.passed
        && cli.passed
        && r.relation_families.normal_mixed_vanish
        && elapsed < Duration::from_secs(1);
    report(1, ok, &format!("dim {} labels {:?} relations {:?} in {elapsed:?}", r.dimension, r.free_labels, r.dependent_relations));
    assert!(ok);
}

#[test]
fn criterion_02_four_dimensional_quadratic_form() {
    let t = Instant::now();
    let kb = KernelBasis::solve(&StandardFrame::new(4).unwrap()).unwrap();
    let q = build_quadratic_matrix(&kb);
    let r = block_structure_check(&q, 4).unwrap();
    let elapsed = t.elapsed();
    let diag_ok = r.trace_fit.diagonal_constant.is_some() && r.trace_blocks == 3 && r.trace_block_size == 1;
    let ok = r.triple_fit.proportional && diag_ok && r.det_nonzero && r.symmetric && elapsed < Duration::from_secs(1);
    report(
        2,
        ok,
        &format!(
            "triple block = {} × [[0,-1,1],[-1,0,-1],[1,-1,0]], trace diagonal = {} × (-2), det M = {} in {elapsed:?}",
            r.triple_fit.constant.clone().unwrap_or("none".into()),
            r.trace_fit.diagonal_constant.clone().unwrap_or("none".into()),
            r.det
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_03_general_blocks() {
    let mut ok = true;
    let mut lines = Vec::new();
    let mut attainable = true;
    for n in 5..=8 {
        let t = Instant::now();
        let kb = KernelBasis::solve(&StandardFrame::new(n).unwrap()).unwrap();
        let q = build_quadratic_matrix(&kb);
        let r = block_structure_check(&q, n).unwrap();
        let elapsed = t.elapsed();
        attainable &= r.inventory_ok() && r.det_nonzero && r.triple_fit.proportional && elapsed < Duration::from_secs(30);
        ok &= r.inventory_ok() && r.trace_det_matches_reference && r.det_nonzero && elapsed < Duration::from_secs(30);
        // the trace blocks come out as κ·(−(Id + wwᵀ)), whose determinant is κ^{N−3}(−1)^{N−3}(N−2)
        let sign = if (n - 3) % 2 == 0 { 1 } else { -1 };
        attainable &= r.trace_det_normalized.as_deref() == Some(format!("{}/1", sign * (n as i64 - 2)).as_str());
        lines.push(format!(
            "N={n}: {} triple + {} trace blocks of size {}, trace det {} vs reference {}, det M ≠ 0: {} ({elapsed:?})",
            r.triple_blocks,
            r.trace_blocks,
            r.trace_block_size,
            r.trace_block_dets.first().cloned().unwrap_or_default(),
            r.trace_det_reference.clone().unwrap_or_default(),
            r.det_nonzero
        ));
    }
    report(3, ok, &lines.join("; "));
    // inventory, nondegeneracy and the observed trace determinant hold regardless
    assert!(attainable);
    assert!(
        ok,
        "trace blocks are κ·(−(Id + wwᵀ)), not κ·(−½)(3·Id + wwᵀ); their determinants differ from (−3/2)^(N−3)·N/3 for every N ≥ 5"
    );
}

#[test]
fn criterion_04_epsilon_identity() {
    let t = Instant::now();
    let reports: Vec<_> = (4..=7).map(epsilon_identity_check).collect();
    let elapsed = t.elapsed();
    let constants: Vec<i64> = reports.iter().map(|r| r.constant).collect();
    let ok = constants[..3] == [1, 2, 6] && reports.iter().all(|r| r.perfect_fit) && elapsed < Duration::from_secs(10);
    report(4, ok, &format!("c(4..7) = {constants:?}, perfect fit {} in {elapsed:?}", reports.iter().all(|r| r.perfect_fit)));
    assert!(ok);
}

#[test]
fn criterion_05_chain_map() {
    let reports = chain_map_suite(SEED, 50).unwrap();
    let (mut ok, detail) = suites_ok(&reports);
    ok &= reports.iter().map(|r| r.trials).sum::<usize>() == 50;
    report(5, ok, &detail);
    assert!(ok);
}

#[test]
fn criterion_06_lagrangian_deformation() {
    let r = exactness_suite(SEED + 1, 10).unwrap();
    let (ok, detail) = suites_ok(&[r]);
    report(6, ok, &detail);
    assert!(ok);
}

#[test]
fn criterion_07_qme_transport() {
    let r = qme_transport_suite(SEED + 2, 10, 2).unwrap();
    let (ok, detail) = suites_ok(&[r]);
    report(7, ok, &detail);
    assert!(ok);
}

#[test]
fn criterion_08_omega_cohomology() {
    let a = omega_square_suite(SEED + 3, 5, 100).unwrap();
    let b = expectation_invariance_suite(SEED + 4, 5).unwrap();
    let ok = a.trials == 500 && b.trials == 5;
    let (all, detail) = suites_ok(&[a, b]);
    report(8, ok && all, &detail);
    assert!(ok && all);
}

#[test]
fn criterion_09_relaxed_bv() {
    let r = relaxed_suite(SEED + 5, 20).unwrap();
    let (ok, detail) = suites_ok(&[r]);
    report(9, ok, &detail);
    assert!(ok);
}

#[test]
fn criterion_10_ultralocal_pushforward() {
    let mut ok = true;
    let mut lines = Vec::new();
    for (n, lambda) in [(4, int(1)), (5, rat(3, 2))] {
        let model = ultralocal_model(n, lambda, false, 2).unwrap();
        let r = ultralocal_pushforward(&model, &Insertions::AllPairs).unwrap();
        let four = ultralocal_pushforward(&model, &Insertions::List(vec![vec![0, 1, 2, 3], vec![0, 0, 5, 5], vec![3, 4, 4, 4]])).unwrap();
        let cli = pushforward_outcome(n, &model.lambda, true, false, 2).unwrap();
        ok &= r.passed && four.passed && cli.passed && r.normalization.det_half_exponent == -1 && r.effective_action.is_empty();
        lines.push(format!(
            "N={n}: action fiber-independent {}, det record {} = det(λM) {}, half-exponent {}, propagators {}/{}, four-point {}/{}",
            r.fiber_independent,
            r.normalization.det,
            r.det_matches,
            r.normalization.det_half_exponent,
            r.propagators_agree,
            r.propagators.len(),
            four.propagators_agree,
            four.propagators.len()
        ));
    }
    report(10, ok, &lines.join("; "));
    assert!(ok);
}

#[test]
fn quadform_reports_are_seed_stable() {
    let a = serde_json::to_string(&quadform_outcome(4, 1).unwrap()).unwrap();
    let b = serde_json::to_string(&quadform_outcome(4, 1).unwrap()).unwrap();
    assert_eq!(a, b);
    let q = {
        let kb = KernelBasis::solve(&StandardFrame::new(6).unwrap()).unwrap();
        let q = build_quadratic_matrix(&kb);
        spot_check(&q, &kb, 100, SEED)
    };
    assert_eq!(q, 100);
}
