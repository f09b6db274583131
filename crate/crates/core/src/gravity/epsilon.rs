//! Brute-force contraction of two Levi-Civita symbols over all but two slots.

use serde::Serialize;

/// Sign of the permutation `idx` of `1..=idx.len()`, or 0 on a repeat or
/// out-of-range entry.
pub fn levi_civita(idx: &[usize]) -> i64 {
    let d = idx.len();
    let mut seen = 0u64;
    for &i in idx {
        if i == 0 || i > d || seen & (1 << i) != 0 {
            return 0;
        }
        seen |= 1 << i;
    }
    let mut inversions = 0;
    for i in 0..d {
        for j in i + 1..d {
            inversions += (idx[i] > idx[j]) as usize;
        }
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EpsilonReport {
    pub n: usize,
    /// Dimension of the index range, `N−1`.
    pub index_dimension: usize,
    pub summed_indices: usize,
    pub constant: i64,
    pub perfect_fit: bool,
    /// `(N−3)!`, the closed form the constant is compared with.
    pub factorial: i64,
}

/// `Σ ε^{a₂…a_{N−2}νρ} ε_{a₂…a_{N−2}cd}` over every index tuple in
/// dimension `N−1`, fitted to `c·(δ_c^ν δ_d^ρ − δ_d^ν δ_c^ρ)`.
pub fn epsilon_identity_check(n: usize) -> EpsilonReport {
    assert!(n >= 4, "dimension must be at least 4");
    let d = n - 1;
    let k = n - 3;
    let mut table = vec![0i64; d.pow(4)];
    let at = |nu: usize, rho: usize, c: usize, dd: usize| (((nu - 1) * d + rho - 1) * d + c - 1) * d + dd - 1;
    let mut summed = vec![1usize; k];
    let mut upper = vec![0usize; d];
    let mut lower = vec![0usize; d];
    loop {
        upper[..k].copy_from_slice(&summed);
        lower[..k].copy_from_slice(&summed);
        for nu in 1..=d {
            for rho in 1..=d {
                upper[k] = nu;
                upper[k + 1] = rho;
                let eu = levi_civita(&upper);
                if eu == 0 {
                    continue;
                }
                for c in 1..=d {
                    for dd in 1..=d {
                        lower[k] = c;
                        lower[k + 1] = dd;
                        table[at(nu, rho, c, dd)] += eu * levi_civita(&lower);
                    }
                }
            }
        }
        // odometer over the summed indices
        let mut i = 0;
        while i < k && summed[i] == d {
            summed[i] = 1;
            i += 1;
        }
        if i == k {
            break;
        }
        summed[i] += 1;
    }
    let constant = table[at(1, 2, 1, 2)];
    let mut perfect_fit = true;
    for nu in 1..=d {
        for rho in 1..=d {
            for c in 1..=d {
                for dd in 1..=d {
                    let delta = (nu == c && rho == dd) as i64 - (nu == dd && rho == c) as i64;
                    perfect_fit &= table[at(nu, rho, c, dd)] == constant * delta;
                }
            }
        }
    }
    EpsilonReport { n, index_dimension: d, summed_indices: k, constant, perfect_fit, factorial: (1..=k as i64).product() }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn levi_civita_signs() {
        assert_eq!(levi_civita(&[1, 2, 3]), 1);
        assert_eq!(levi_civita(&[2, 1, 3]), -1);
        assert_eq!(levi_civita(&[3, 1, 2]), 1);
        assert_eq!(levi_civita(&[1, 1, 3]), 0);
    }

    #[test]
    fn constants() {
        for (n, c) in [(4, 1), (5, 2), (6, 6)] {
            let r = epsilon_identity_check(n);
            assert!(r.perfect_fit);
            assert_eq!(r.constant, c);
            assert_eq!(r.constant, r.factorial);
        }
    }
}
