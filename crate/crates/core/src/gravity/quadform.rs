//! The quadratic form `(e_n) e^{N−3} [v,v] ε ε` on the kernel and its blocks.

use std::collections::BTreeMap;

use itertools::Itertools;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use super::epsilon::levi_civita;
use super::kernel::{components, locate, KernelBasis, Label, Sector, StandardFrame};
use crate::algebra::scalar::{format_rational, int, rat};
use crate::error::Result;
use crate::linalg::Matrix;

/// Integer weights `w(ν,ρ,c,d)` with
/// `Q(v) = Σ w(ν,ρ,c,d) [v,v]^{cd}_{νρ}` and `[v,v]^{cd}_{νρ} = Σ_{e} v_ν^{ce} v_ρ^{de} η_ee`.
#[derive(Clone, Debug)]
pub struct Contraction {
    pub frame: StandardFrame,
    pub weights: BTreeMap<(usize, usize, usize, usize), i64>,
}

impl Contraction {
    /// Sums `(e_n)^{a₁} e_{μ₁}^{a₂}…e_{μ_{N−3}}^{a_{N−2}} ε^{μ₁…μ_{N−1}} ε_{a₁…a_N}` over
    /// every spatial permutation and every internal assignment allowed by the frame.
    pub fn new(frame: &StandardFrame) -> Self {
        let n = frame.n;
        let mut weights = BTreeMap::new();
        for perm in (1..n).permutations(n - 1) {
            let sign_mu = levi_civita(&perm);
            let legs = &perm[..n - 3];
            let (nu, rho) = (perm[n - 3], perm[n - 2]);
            let mut partial: Vec<(Vec<usize>, i64)> = frame.en().into_iter().map(|(a, c)| (vec![a], c)).collect();
            for &mu in legs {
                let mut next = Vec::new();
                for (idx, w) in &partial {
                    for (a, c) in frame.e(mu) {
                        if !idx.contains(&a) {
                            let mut i = idx.clone();
                            i.push(a);
                            next.push((i, w * c));
                        }
                    }
                }
                partial = next;
            }
            for (idx, w) in partial {
                for c in (1..=n).filter(|c| !idx.contains(c)) {
                    for d in (1..=n).filter(|d| *d != c && !idx.contains(d)) {
                        let mut full = idx.clone();
                        full.push(c);
                        full.push(d);
                        let s = levi_civita(&full);
                        if s != 0 {
                            *weights.entry((nu, rho, c, d)).or_insert(0) += sign_mu * s * w;
                        }
                    }
                }
            }
        }
        weights.retain(|_, w| *w != 0);
        Contraction { frame: frame.clone(), weights }
    }

    /// Raw scalar on stored components.
    pub fn evaluate(&self, v: &[BigRational]) -> BigRational {
        let n = self.frame.n;
        let get = |mu, a, b| locate(n, mu, a, b).map(|(i, s)| if s > 0 { v[i].clone() } else { -v[i].clone() });
        let mut total = BigRational::zero();
        for (&(nu, rho, c, d), &w) in &self.weights {
            for e in 1..=n {
                let (Some(x), Some(y)) = (get(nu, c, e), get(rho, d, e)) else { continue };
                total += x * y * int(w * self.frame.eta(e));
            }
        }
        total
    }

    /// Symmetric Gram matrix over stored components.
    pub fn gram(&self) -> Matrix {
        let n = self.frame.n;
        let len = components(n).len();
        let mut g = Matrix::zeros(len, len);
        let half = rat(1, 2);
        for (&(nu, rho, c, d), &w) in &self.weights {
            for e in 1..=n {
                let (Some((i, si)), Some((j, sj))) = (locate(n, nu, c, e), locate(n, rho, d, e)) else { continue };
                let x = int(w * self.frame.eta(e) * si * sj) * &half;
                g.add_at(i, j, &x);
                g.add_at(j, i, &x);
            }
        }
        g
    }
}

/// `M` with `Q = xᵀMx` in the kernel coordinates.
#[derive(Clone, Debug)]
pub struct QuadForm {
    pub labels: Vec<Label>,
    pub m: Matrix,
    pub contraction: Contraction,
}

pub fn build_quadratic_matrix(kb: &KernelBasis) -> QuadForm {
    let c = Contraction::new(&kb.frame);
    let g = c.gram();
    let b = kb.matrix();
    let m = b.transpose().mul(&g).mul(&b);
    QuadForm { labels: kb.labels.clone(), m, contraction: c }
}

impl QuadForm {
    pub fn value(&self, x: &[BigRational]) -> BigRational {
        let mx = self.m.mul_vec(x);
        x.iter().zip(&mx).map(|(a, b)| a * b).fold(BigRational::zero(), |s, t| s + t)
    }
}

/// `[[0,−1,1],[−1,0,−1],[1,−1,0]]` in the order `v_p^{qr}, v_q^{pr}, v_r^{pq}`.
pub fn triple_reference() -> Matrix {
    Matrix::from_i64(&[&[0, -1, 1], &[-1, 0, -1], &[1, -1, 0]])
}

/// `−½(3·Id + wwᵀ)` of size `N−3`, `w = (1,…,1)`.
pub fn trace_reference(n: usize) -> Matrix {
    let k = n - 3;
    let mut m = Matrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            m.set(i, j, if i == j { rat(-2, 1) } else { rat(-1, 2) });
        }
    }
    m
}

/// `(−3/2)^{N−3}·N/3`.
pub fn trace_reference_det(n: usize) -> BigRational {
    let k = n as i32 - 3;
    num_traits::pow::Pow::pow(rat(-3, 2), k as u32) * rat(n as i64, 3)
}

#[derive(Clone, Debug, Serialize)]
pub struct Block {
    pub sector: Sector,
    /// Triple `p<q<r` or trace index `e`.
    pub key: Vec<usize>,
    pub labels: Vec<String>,
    pub indices: Vec<usize>,
    pub matrix: Vec<Vec<String>>,
    pub det: String,
    #[serde(skip)]
    pub det_value: BigRational,
    #[serde(skip)]
    pub sub: Matrix,
}

#[derive(Clone, Debug, Serialize)]
pub struct SectorFit {
    /// Common constant `κ` with block = κ·reference, when one exists.
    pub constant: Option<String>,
    pub proportional: bool,
    /// The diagonal alone fits one constant (used for the trace sector).
    pub diagonal_constant: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BlockReport {
    pub n: usize,
    pub dimension: usize,
    pub symmetric: bool,
    pub triple_blocks: usize,
    pub trace_blocks: usize,
    pub expected_triple_blocks: usize,
    pub expected_trace_blocks: usize,
    pub trace_block_size: usize,
    /// Every connected component of `M` is one expected block.
    pub structure_found: bool,
    pub permutation: Vec<usize>,
    pub triple_fit: SectorFit,
    pub trace_fit: SectorFit,
    pub triple_block_det: Option<String>,
    pub triple_blocks_equal: bool,
    pub trace_block_dets: Vec<String>,
    /// `κ^{N−3}(−3/2)^{N−3}N/3` with `κ` the trace diagonal constant.
    pub trace_det_reference: Option<String>,
    pub trace_det_matches_reference: bool,
    /// Trace determinant divided by `κ^{N−3}`.
    pub trace_det_normalized: Option<String>,
    pub det: String,
    pub det_nonzero: bool,
    pub det_equals_block_product: bool,
    pub blocks: Vec<Block>,
}

impl BlockReport {
    pub fn inventory_ok(&self) -> bool {
        self.structure_found
            && self.det_equals_block_product
            && self.triple_blocks == self.expected_triple_blocks
            && self.trace_blocks == self.expected_trace_blocks
    }
}

fn components_of(m: &Matrix) -> Vec<Vec<usize>> {
    let n = m.rows();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        let mut j = i;
        while p[j] != r {
            let next = p[j];
            p[j] = r;
            j = next;
        }
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            if !m.get(i, j).is_zero() {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    groups.into_values().collect()
}

fn fit(blocks: &[&Block], reference: &Matrix) -> SectorFit {
    let mut constant: Option<BigRational> = None;
    let mut proportional = !blocks.is_empty();
    let mut diag: Option<BigRational> = None;
    let mut diag_ok = !blocks.is_empty();
    for b in blocks {
        for i in 0..reference.rows() {
            for j in 0..reference.cols() {
                let (x, r) = (b.sub.get(i, j), reference.get(i, j));
                if r.is_zero() {
                    proportional &= x.is_zero();
                    continue;
                }
                let k = x / r;
                if i == j {
                    diag_ok &= *diag.get_or_insert_with(|| k.clone()) == k;
                }
                proportional &= *constant.get_or_insert_with(|| k.clone()) == k;
            }
        }
    }
    let constant = constant.filter(|c| proportional && !c.is_zero());
    let diag = diag.filter(|d| diag_ok && !d.is_zero());
    SectorFit {
        proportional: constant.is_some(),
        constant: constant.as_ref().map(format_rational),
        diagonal_constant: diag.as_ref().map(format_rational),
    }
}

/// Block inventory of `M`: one block per connected component, matched
/// against the triple and trace sectors, with determinants.
pub fn block_structure_check(q: &QuadForm, n: usize) -> Result<BlockReport> {
    let m = &q.m;
    let dim = m.rows();
    let s = n - 1;
    let mut blocks = Vec::new();
    let mut structure_found = true;
    for comp in components_of(m) {
        let labels: Vec<Label> = comp.iter().map(|&i| q.labels[i]).collect();
        let sector = labels[0].sector();
        let key: Vec<usize> = match sector {
            Sector::Triple => {
                let l = labels[0];
                let mut t = vec![l.mu, l.a, l.b];
                t.sort();
                t
            }
            Sector::Trace => vec![labels[0].b],
        };
        let want: Vec<Label> = match sector {
            Sector::Triple => {
                let (p, qq, r) = (key[0], key[1], key[2]);
                vec![Label { mu: p, a: qq, b: r }, Label { mu: qq, a: p, b: r }, Label { mu: r, a: p, b: qq }]
            }
            Sector::Trace => q.labels.iter().copied().filter(|l| l.sector() == Sector::Trace && l.b == key[0]).collect(),
        };
        // order the component as the reference expects
        let mut indices = Vec::new();
        for w in &want {
            match comp.iter().find(|&&i| q.labels[i] == *w) {
                Some(&i) => indices.push(i),
                None => structure_found = false,
            }
        }
        if indices.len() != comp.len() {
            structure_found = false;
            indices = comp.clone();
        }
        let sub = m.submatrix(&indices, &indices);
        let det = sub.determinant()?;
        blocks.push(Block {
            sector,
            key,
            labels: indices.iter().map(|&i| q.labels[i].to_string()).collect(),
            matrix: (0..sub.rows()).map(|i| sub.row(i).iter().map(format_rational).collect()).collect(),
            det: format_rational(&det),
            det_value: det,
            indices,
            sub,
        });
    }
    blocks.sort_by(|a, b| (a.sector == Sector::Trace, &a.key).cmp(&(b.sector == Sector::Trace, &b.key)));
    let triples: Vec<&Block> = blocks.iter().filter(|b| b.sector == Sector::Triple).collect();
    let traces: Vec<&Block> = blocks.iter().filter(|b| b.sector == Sector::Trace).collect();
    structure_found &= triples.iter().all(|b| b.indices.len() == 3) && traces.iter().all(|b| b.indices.len() == n - 3);
    let triple_fit = fit(&triples, &triple_reference());
    let trace_ref = trace_reference(n);
    let trace_fit = fit(&traces, &trace_ref);
    let triple_blocks_equal = triples.windows(2).all(|w| w[0].sub == w[1].sub);

    let kappa = trace_fit.diagonal_constant.as_ref().map(|_| traces[0].sub.get(0, 0) / rat(-2, 1));
    let k = (n - 3) as u32;
    let (trace_det_reference, trace_det_normalized, trace_det_matches_reference) = match &kappa {
        Some(kap) => {
            let scale = num_traits::pow::Pow::pow(kap.clone(), k);
            let reference = &scale * trace_reference_det(n);
            let ok = traces.iter().all(|b| b.det_value == reference);
            let normalized = &traces[0].det_value / &scale;
            (Some(format_rational(&reference)), Some(format_rational(&normalized)), ok)
        }
        None => (None, None, false),
    };

    let permutation: Vec<usize> = blocks.iter().flat_map(|b| b.indices.iter().copied()).collect();
    let det = m.determinant()?;
    let block_product = blocks.iter().fold(BigRational::one(), |acc, b| acc * &b.det_value);
    let binom3 = s * (s - 1) * (s - 2) / 6;
    Ok(BlockReport {
        n,
        dimension: dim,
        symmetric: m.is_symmetric(),
        triple_blocks: triples.len(),
        trace_blocks: traces.len(),
        expected_triple_blocks: binom3,
        expected_trace_blocks: s,
        trace_block_size: n - 3,
        structure_found,
        permutation,
        triple_block_det: triples.first().map(|b| b.det.clone()),
        triple_blocks_equal,
        trace_block_dets: traces.iter().map(|b| b.det.clone()).collect(),
        trace_det_reference,
        trace_det_matches_reference,
        trace_det_normalized,
        det_nonzero: !det.is_zero(),
        det_equals_block_product: det == block_product,
        det: format_rational(&det),
        triple_fit,
        trace_fit,
        blocks,
    })
}

/// Random rational kernel vectors checked against the raw contraction.
pub fn spot_check(q: &QuadForm, kb: &KernelBasis, samples: usize, seed: u64) -> usize {
    use rand::Rng;
    let mut r = crate::random::rng(seed);
    let mut agree = 0;
    for _ in 0..samples {
        let x: Vec<BigRational> = (0..kb.dim()).map(|_| rat(r.gen_range(-9..=9), r.gen_range(1..=4))).collect();
        let v = kb.combine(&x);
        agree += (q.contraction.evaluate(&v) == q.value(&x)) as usize;
    }
    agree
}

/// `M` entries as strings, row-major.
pub fn matrix_strings(m: &Matrix) -> Vec<Vec<String>> {
    (0..m.rows()).map(|i| m.row(i).iter().map(format_rational).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gravity::kernel::KernelBasis;

    fn build(n: usize) -> (KernelBasis, QuadForm) {
        let kb = KernelBasis::solve(&StandardFrame::new(n).unwrap()).unwrap();
        let q = build_quadratic_matrix(&kb);
        (kb, q)
    }

    #[test]
    fn four_dimensions() {
        let (kb, q) = build(4);
        let r = block_structure_check(&q, 4).unwrap();
        eprintln!("{}", serde_json::to_string_pretty(&r).unwrap());
        assert!(r.inventory_ok());
        assert!(r.triple_fit.proportional);
        assert!(r.trace_fit.proportional);
        assert_eq!(r.triple_block_det.as_deref(), Some("-2/1"));
        assert!(r.det_nonzero);
        assert_eq!(spot_check(&q, &kb, 20, 1), 20);
    }

    #[test]
    fn five_dimensions() {
        let (kb, q) = build(5);
        let r = block_structure_check(&q, 5).unwrap();
        eprintln!("{}", serde_json::to_string_pretty(&r.blocks).unwrap());
        assert!(r.inventory_ok());
        assert!(r.triple_fit.proportional);
        assert!(r.det_nonzero);
        assert_eq!(spot_check(&q, &kb, 20, 2), 20);
    }

    #[test]
    fn reference_determinants() {
        assert_eq!(triple_reference().determinant().unwrap(), int(2));
        assert_eq!(trace_reference(5).determinant().unwrap(), rat(15, 4));
        assert_eq!(trace_reference_det(5), rat(15, 4));
        assert_eq!(trace_reference_det(4), int(-2));
    }
}
