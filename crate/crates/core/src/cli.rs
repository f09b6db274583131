//! Argument parsing and report builders for the `bvkit` binary.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use crate::algebra::scalar::{format_rational, parse_rational};
use crate::bv::QmeModelJson;
use crate::error::{Error, Result};
use crate::gravity::quadform::{trace_reference, triple_reference};
use crate::gravity::{
    block_structure_check, build_quadratic_matrix, epsilon_identity_check, kernel_report, spot_check, ultralocal_model,
    ultralocal_pushforward, Insertions, KernelBasis, StandardFrame,
};
use crate::linalg::Matrix;
use crate::relaxed::RelaxedModelJson;
use crate::suites::{self, SuiteReport};

#[derive(Parser, Debug)]
#[command(name = "bvkit", version, about = "Exact checks for finite-dimensional BV geometry")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// ħ truncation order.
    #[arg(long, global = true, default_value_t = 2)]
    pub hbar_order: i32,
    /// Seed for every randomized check.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Kernel of v ↦ e^{N−3}∧v in the standard frame.
    Kernel(DimArgs),
    /// Quadratic form on the kernel, its blocks and determinants.
    Quadform(DimArgs),
    /// Brute-force ε·ε contraction constant.
    Epsilon(DimArgs),
    /// Pushforward of the quadratic v-action along {v† = 0}.
    PushforwardDemo(PushArgs),
    /// Classical and quantum master equations of a model file.
    QmeCheck(InputArgs),
    /// Relaxed BV and preBV-BFV checks of a model file.
    RelaxedCheck(InputArgs),
    /// kernel, epsilon, quadform and pushforward-demo over a dimension range.
    Sweep(SweepArgs),
}

#[derive(Args, Debug, Clone)]
pub struct DimArgs {
    #[arg(long, conflicts_with = "dim_range")]
    pub dim: Option<usize>,
    /// Inclusive range `A..B`.
    #[arg(long, value_parser = parse_range)]
    pub dim_range: Option<(usize, usize)>,
}

#[derive(Args, Debug, Clone)]
pub struct PushArgs {
    #[command(flatten)]
    pub dims: DimArgs,
    /// Coefficient of ½vᵀMv, as `p/q`.
    #[arg(long, default_value = "1")]
    pub lambda: String,
    /// Add an antifield-free base action in an extra even field.
    #[arg(long)]
    pub base_action: bool,
    /// Insert every v_i v_j even for large fibers.
    #[arg(long)]
    pub all_pairs: bool,
}

#[derive(Args, Debug, Clone)]
pub struct InputArgs {
    #[arg(long)]
    pub input: PathBuf,
}

#[derive(Args, Debug, Clone)]
pub struct SweepArgs {
    #[arg(long, value_parser = parse_range, default_value = "4..8")]
    pub dim_range: (usize, usize),
    /// Also run the seeded property suites.
    #[arg(long)]
    pub suites: bool,
}

pub fn parse_range(s: &str) -> std::result::Result<(usize, usize), String> {
    let (a, b) = s.split_once("..").ok_or_else(|| format!("expected A..B, got `{s}`"))?;
    let a: usize = a.trim().parse().map_err(|e| format!("bad lower bound: {e}"))?;
    let b: usize = b.trim().trim_start_matches('=').parse().map_err(|e| format!("bad upper bound: {e}"))?;
    if a > b {
        return Err(format!("empty range {a}..{b}"));
    }
    Ok((a, b))
}

impl DimArgs {
    fn dims(&self) -> Result<Vec<usize>> {
        let dims: Vec<usize> = match (self.dim, self.dim_range) {
            (Some(n), None) => vec![n],
            (None, Some((a, b))) => (a..=b).collect(),
            (None, None) => return Err(Error::Invalid("one of --dim or --dim-range is required".into())),
            (Some(_), Some(_)) => return Err(Error::Invalid("--dim and --dim-range are exclusive".into())),
        };
        if let Some(n) = dims.iter().find(|&&n| n < 4) {
            return Err(Error::Invalid(format!("dimension must be at least 4, got {n}")));
        }
        if let Some(n) = dims.iter().find(|&&n| n > 12) {
            return Err(Error::Invalid(format!("dimension {n} is above the supported maximum 12")));
        }
        Ok(dims)
    }
}

/// One pass/fail line of a report, with the statement it checks.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub claim: String,
    pub passed: bool,
}

fn check(name: &str, claim: &str, passed: bool) -> Check {
    Check { name: name.to_string(), claim: claim.to_string(), passed }
}

/// Result of one subcommand on one input.
#[derive(Clone, Debug, Serialize)]
pub struct Outcome {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    pub passed: bool,
    pub checks: Vec<Check>,
    /// Flat key/value summary used by the text and CSV formats.
    pub summary: Vec<(String, String)>,
    pub details: Value,
}

impl Outcome {
    fn new(command: &str, dim: Option<usize>, checks: Vec<Check>, summary: Vec<(String, String)>, details: Value) -> Self {
        Outcome { command: command.to_string(), dim, passed: checks.iter().all(|c| c.passed), checks, summary, details }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub hbar_order: i32,
    pub seed: u64,
    pub format: Format,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub config: RunConfig,
    pub passed: bool,
    pub results: Vec<Outcome>,
}

fn kv(k: &str, v: impl ToString) -> (String, String) {
    (k.to_string(), v.to_string())
}

fn to_value<T: Serialize>(t: &T) -> Result<Value> {
    Ok(serde_json::to_value(t)?)
}

pub fn kernel_outcome(n: usize) -> Result<Outcome> {
    let kb = KernelBasis::solve(&StandardFrame::new(n)?)?;
    let r = kernel_report(&kb);
    let checks = vec![
        check("dimension", "dim ker = (N−1)(C(N−1,2) − 1)", r.dimension == r.expected_dimension),
        check("basis", "each basis vector is dual to its free label", r.basis_dual_to_labels),
        check("normal mixed", "v_i^{Nj} = 0 for i ≠ j", r.relation_families.normal_mixed_vanish),
        check("normal traces", "Σ_{i≠j} v_i^{iN} = 0", r.relation_families.normal_traces_vanish),
        check("spatial traces", "Σ_{i≠j} v_i^{ij} = 0", r.relation_families.spatial_traces_vanish),
        check("wedge", "e^{N−3}∧v = 0 by direct expansion", r.relation_families.wedge_vanishes),
        check("dependent relations", "v_m^{me} = −Σ_c v_c^{ce}", r.relations_hold),
    ];
    let summary = vec![kv("dimension", r.dimension), kv("expected_dimension", r.expected_dimension), kv("constraint_rank", r.constraint_rank)];
    Ok(Outcome::new("kernel", Some(n), checks, summary, to_value(&r)?))
}

pub fn epsilon_outcome(n: usize) -> Result<Outcome> {
    let r = epsilon_identity_check(n);
    let checks = vec![
        check("fit", "Σ εε = c(δ_c^ν δ_d^ρ − δ_d^ν δ_c^ρ) entrywise", r.perfect_fit),
        check("constant", "c = (N−3)!", r.constant == r.factorial),
    ];
    let summary = vec![kv("constant", r.constant), kv("perfect_fit", r.perfect_fit)];
    Ok(Outcome::new("epsilon", Some(n), checks, summary, to_value(&r)?))
}

/// Determinants of the 6×6 reference matrix at N = 4 and of its 3×3 block.
#[derive(Serialize)]
struct ReferenceA {
    block_det: String,
    full_det: String,
}

fn reference_a() -> Result<ReferenceA> {
    let mut a = Matrix::zeros(6, 6);
    let t = triple_reference();
    for i in 0..3 {
        for j in 0..3 {
            a.set(i, j, t.get(i, j).clone());
        }
        a.set(3 + i, 3 + i, trace_reference(4).get(0, 0).clone());
    }
    Ok(ReferenceA { block_det: format_rational(&t.determinant()?), full_det: format_rational(&a.determinant()?) })
}

pub fn quadform_outcome(n: usize, seed: u64) -> Result<Outcome> {
    let kb = KernelBasis::solve(&StandardFrame::new(n)?)?;
    let q = build_quadratic_matrix(&kb);
    let r = block_structure_check(&q, n)?;
    let samples = 100;
    let agree = spot_check(&q, &kb, samples, seed);
    let checks = vec![
        check("symmetric", "M = Mᵀ", r.symmetric),
        check("spot check", "raw ε-contraction equals vᵀMv on random kernel vectors", agree == samples),
        check("inventory", "C(N−1,3) triple blocks and N−1 trace blocks of size N−3", r.inventory_ok()),
        check("triple blocks", "each triple block is κ·[[0,−1,1],[−1,0,−1],[1,−1,0]]", r.triple_fit.proportional),
        check("trace blocks", "each trace block is κ·(−½)(3·Id + wwᵀ)", r.trace_fit.proportional),
        check("trace determinant", "det(trace block) = κ^{N−3}(−3/2)^{N−3}N/3", r.trace_det_matches_reference),
        check("nondegenerate", "det M ≠ 0", r.det_nonzero),
    ];
    let mut summary = vec![
        kv("dimension", r.dimension),
        kv("triple_blocks", r.triple_blocks),
        kv("trace_blocks", r.trace_blocks),
        kv("triple_constant", r.triple_fit.constant.clone().unwrap_or_default()),
        kv("trace_diagonal_constant", r.trace_fit.diagonal_constant.clone().unwrap_or_default()),
        kv("triple_block_det", r.triple_block_det.clone().unwrap_or_default()),
        kv("trace_block_det", r.trace_block_dets.first().cloned().unwrap_or_default()),
        kv("trace_det_reference", r.trace_det_reference.clone().unwrap_or_default()),
        kv("trace_det_normalized", r.trace_det_normalized.clone().unwrap_or_default()),
        kv("det", &r.det),
    ];
    let mut details = serde_json::json!({
        "labels": q.labels.iter().map(|l| l.to_string()).collect::<Vec<_>>(),
        "matrix": crate::gravity::quadform::matrix_strings(&q.m),
        "blocks": to_value(&r)?,
        "spot_check": { "samples": samples, "agree": agree },
    });
    if n == 4 {
        let a = reference_a()?;
        summary.push(kv("reference_block_det", &a.block_det));
        summary.push(kv("reference_full_det", &a.full_det));
        details["reference_a"] = to_value(&a)?;
    }
    Ok(Outcome::new("quadform", Some(n), checks, summary, details))
}

pub fn pushforward_outcome(n: usize, lambda: &BigRational, base_action: bool, all_pairs: bool, order: i32) -> Result<Outcome> {
    let model = ultralocal_model(n, lambda.clone(), base_action, order)?;
    let dim = model.kernel.dim();
    let insertions = if all_pairs || dim <= 20 {
        Insertions::AllPairs
    } else {
        // diagonal, neighbours and one four-point function
        let mut l: Vec<Vec<usize>> = (0..dim).map(|i| vec![i, i]).collect();
        l.extend((0..dim - 1).map(|i| vec![i, i + 1]));
        l.push(vec![0, 1, 2, 3]);
        Insertions::List(l)
    };
    let r = ultralocal_pushforward(&model, &insertions)?;
    let checks = vec![
        check("fiber independent", "effective action and prefactor involve no v or v†", r.fiber_independent),
        check("effective action", "S₁ = S_base", r.action_matches_base),
        check("prefactor", "the pushed prefactor is 1", r.prefactor_is_one),
        check("normalization", "determinant record is det(λM) with half-exponent −1", r.det_matches),
        check("qme in", "S satisfies the quantum master equation", r.qme_in),
        check("qme out", "S₁ satisfies the quantum master equation", r.qme_out),
        check("propagators", "⟨v_i v_j⟩ = iħλ⁻¹(M⁻¹)_{ij} by pairing enumeration", r.propagators_agree == r.propagators.len()),
    ];
    let summary = vec![
        kv("fiber_dimension", r.fiber_dimension),
        kv("lambda", &r.lambda),
        kv("det", &r.normalization.det),
        kv("det_half_exponent", r.normalization.det_half_exponent),
        kv("propagators", format!("{}/{}", r.propagators_agree, r.propagators.len())),
    ];
    Ok(Outcome::new("pushforward-demo", Some(n), checks, summary, to_value(&r)?))
}

pub fn qme_outcome(path: &PathBuf, order: i32) -> Result<Outcome> {
    let text = std::fs::read_to_string(path)?;
    let model: QmeModelJson = serde_json::from_str(&text)?;
    let r = model.check(order)?;
    let checks = vec![
        check("action", "S is even of ghost number 0", r.quantum.action_even && r.quantum.action_ghost_zero),
        check("cme", "(S₀, S₀) = 0", r.classical.holds),
        check("qme", "½(S,S) − iħΔS = 0", r.quantum.holds),
    ];
    let summary = vec![kv("pairs", r.pairs), kv("cme", r.classical.holds), kv("qme", r.quantum.holds)];
    Ok(Outcome::new("qme-check", None, checks, summary, to_value(&r)?))
}

pub fn relaxed_outcome(path: &PathBuf) -> Result<Outcome> {
    let text = std::fs::read_to_string(path)?;
    let model: RelaxedModelJson = serde_json::from_str(&text)?;
    let r = model.check()?;
    let mut checks = vec![
        check("ϖ̲", "δα̲ = −L_Qϖ", r.omega_routes_agree),
        check("S̲", "δS̲ = ι_Qϖ̲", r.primitive_round_trip),
    ];
    for c in &r.pre_bv_bfv.axioms {
        checks.push(check("axiom", &c.name, c.holds));
    }
    for c in &r.pre_bv_bfv.theorem {
        checks.push(check("consequence", &c.name, c.holds));
    }
    if let Some(g) = &r.good_b {
        checks.push(check("good b-condition", "B is symplectic, Q-invariant and S̲, α̲ vanish or descend", g.good()));
    }
    let summary = vec![
        kv("underline_s_terms", r.underline_s.len()),
        kv("induced_boundary", r.induced),
        kv("axioms", r.pre_bv_bfv.axioms_hold),
        kv("theorem", r.pre_bv_bfv.theorem_holds),
    ];
    Ok(Outcome::new("relaxed-check", None, checks, summary, to_value(&r)?))
}

fn suite_checks(reports: &[SuiteReport]) -> Vec<Check> {
    reports
        .iter()
        .map(|r| Check { name: r.name.clone(), claim: format!("{}/{} trials, {} nontrivial", r.passed, r.trials, r.nontrivial), passed: r.all_passed() })
        .collect()
}

/// The seeded property suites at their full sizes.
pub fn suites_outcome(seed: u64, order: i32) -> Result<Outcome> {
    let mut reports = suites::chain_map_suite(seed, 50)?;
    reports.push(suites::exactness_suite(seed + 1, 10)?);
    reports.push(suites::qme_transport_suite(seed + 2, 10, order)?);
    reports.push(suites::omega_square_suite(seed + 3, 5, 100)?);
    reports.push(suites::expectation_invariance_suite(seed + 4, 5)?);
    reports.push(suites::relaxed_suite(seed + 5, 20)?);
    reports.push(suites::fubini_suite(seed + 6, 10)?);
    let summary = reports.iter().map(|r| (r.name.clone(), format!("{}/{}", r.passed, r.trials))).collect();
    Ok(Outcome::new("suites", None, suite_checks(&reports), summary, to_value(&reports)?))
}

fn sweep(args: &SweepArgs, seed: u64, order: i32) -> Result<Vec<Outcome>> {
    let (a, b) = args.dim_range;
    DimArgs { dim: None, dim_range: Some((a, b)) }.dims()?;
    let per_dim: Vec<Result<Vec<Outcome>>> = (a..=b)
        .into_par_iter()
        .map(|n| {
            let mut v = vec![kernel_outcome(n)?, epsilon_outcome(n)?, quadform_outcome(n, seed)?];
            if n <= 5 {
                v.push(pushforward_outcome(n, &BigRational::from_integer(1.into()), false, false, order)?);
            }
            Ok(v)
        })
        .collect();
    let mut out = Vec::new();
    for r in per_dim {
        out.extend(r?);
    }
    if args.suites {
        out.push(suites_outcome(seed, order)?);
    }
    Ok(out)
}

fn per_dim(dims: &DimArgs, f: impl Fn(usize) -> Result<Outcome> + Sync + Send) -> Result<Vec<Outcome>> {
    let ns = dims.dims()?;
    let results: Vec<Result<Outcome>> = ns.into_par_iter().map(f).collect();
    results.into_iter().collect()
}

pub fn execute(cli: &Cli) -> Result<Report> {
    let order = cli.hbar_order;
    if order < 0 {
        return Err(Error::Invalid("--hbar-order must be non-negative".into()));
    }
    let (name, results) = match &cli.command {
        Command::Kernel(d) => ("kernel", per_dim(d, kernel_outcome)?),
        Command::Quadform(d) => ("quadform", per_dim(d, |n| quadform_outcome(n, cli.seed))?),
        Command::Epsilon(d) => ("epsilon", per_dim(d, epsilon_outcome)?),
        Command::PushforwardDemo(p) => {
            let lambda = parse_rational(&p.lambda)?;
            ("pushforward-demo", per_dim(&p.dims, |n| pushforward_outcome(n, &lambda, p.base_action, p.all_pairs, order))?)
        }
        Command::QmeCheck(i) => ("qme-check", vec![qme_outcome(&i.input, order)?]),
        Command::RelaxedCheck(i) => ("relaxed-check", vec![relaxed_outcome(&i.input)?]),
        Command::Sweep(s) => ("sweep", sweep(s, cli.seed, order)?),
    };
    Ok(Report {
        tool: "bvkit".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        config: RunConfig { command: name.into(), hbar_order: order, seed: cli.seed, format: cli.format },
        passed: results.iter().all(|o| o.passed),
        results,
    })
}

pub fn render(report: &Report, format: Format) -> Result<String> {
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(report)? + "\n"),
        Format::Text => {
            let mut s = String::new();
            for o in &report.results {
                match o.dim {
                    Some(n) => writeln!(s, "{} N={}", o.command, n),
                    None => writeln!(s, "{}", o.command),
                }
                .ok();
                for (k, v) in &o.summary {
                    writeln!(s, "  {k}: {v}").ok();
                }
                for c in &o.checks {
                    writeln!(s, "  {} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.claim).ok();
                }
            }
            writeln!(s, "{}", if report.passed { "all checks passed" } else { "some checks failed" }).ok();
            Ok(s)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let uniform = report.results.windows(2).all(|p| p[0].command == p[1].command && keys(&p[0]) == keys(&p[1]));
            let to_err = |e: csv::Error| Error::Invalid(format!("csv: {e}"));
            if uniform && !report.results.is_empty() {
                let mut header = vec!["command".to_string(), "dim".into(), "passed".into()];
                header.extend(keys(&report.results[0]));
                w.write_record(&header).map_err(to_err)?;
                for o in &report.results {
                    let mut row = vec![o.command.clone(), o.dim.map(|n| n.to_string()).unwrap_or_default(), o.passed.to_string()];
                    row.extend(o.summary.iter().map(|(_, v)| v.clone()));
                    w.write_record(&row).map_err(to_err)?;
                }
            } else {
                w.write_record(["command", "dim", "check", "passed", "claim"]).map_err(to_err)?;
                for o in &report.results {
                    for c in &o.checks {
                        let dim = o.dim.map(|n| n.to_string()).unwrap_or_default();
                        w.write_record([o.command.as_str(), dim.as_str(), c.name.as_str(), &c.passed.to_string(), c.claim.as_str()]).map_err(to_err)?;
                    }
                }
            }
            let bytes = w.into_inner().map_err(|e| Error::Invalid(format!("csv: {e}")))?;
            String::from_utf8(bytes).map_err(|e| Error::Invalid(e.to_string()))
        }
    }
}

fn keys(o: &Outcome) -> Vec<String> {
    o.summary.iter().map(|(k, _)| k.clone()).collect()
}

/// Runs the parsed command; returns the process exit code
/// (0 all checks pass, 1 some check failed, 2 invalid input).
pub fn run(cli: &Cli) -> i32 {
    let report = match execute(cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let text = match render(&report, cli.format) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let written = match &cli.out {
        Some(p) => std::fs::write(p, &text),
        None => std::io::stdout().write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return 2;
    }
    if report.passed {
        0
    } else {
        1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("bvkit").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("4..8"), Ok((4, 8)));
        assert_eq!(parse_range("5..=6"), Ok((5, 6)));
        assert!(parse_range("8..4").is_err());
        assert!(parse_range("4-8").is_err());
    }

    #[test]
    fn kernel_four() {
        let r = execute(&parse(&["kernel", "--dim", "4"])).unwrap();
        assert!(r.passed);
        assert_eq!(r.results[0].details["dimension"], 6);
    }

    #[test]
    fn dimension_three_is_rejected() {
        assert!(execute(&parse(&["kernel", "--dim", "3"])).is_err());
        assert_eq!(run(&parse(&["kernel", "--dim", "3"])), 2);
    }

    #[test]
    fn formats_are_deterministic() {
        for f in ["json", "csv", "text"] {
            let cli = parse(&["quadform", "--dim-range", "4..5", "--format", f, "--seed", "3"]);
            let a = render(&execute(&cli).unwrap(), cli.format).unwrap();
            let b = render(&execute(&cli).unwrap(), cli.format).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn reference_a_determinants() {
        let a = reference_a().unwrap();
        assert_eq!(a.block_det, "2/1");
        assert_eq!(a.full_det, "-16/1");
    }
}
