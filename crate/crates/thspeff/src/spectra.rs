//! Empirical eigenvalue spectra of SS^T: moments, rank, and the log-det
//! capacity of a realization.

use crate::ensembles::SpreadingMatrix;
use crate::error::{Error, Result};
use crate::linalg::{self, Mat};

/// Eigenvalues, moments, and rank of one realization's Gram spectrum.
#[derive(Debug, Clone)]
pub struct SpectralSummary {
    pub eigenvalues: Vec<f64>,
    pub moments: Vec<f64>,
    pub rank: usize,
    pub normalized_rank: f64,
}

/// Gram matrix R = S^T S (K x K).
pub fn gram(m: &SpreadingMatrix) -> Mat {
    let k = m.k();
    let mut r = Mat::zeros(k, k);
    for i in 0..k {
        r[(i, i)] = 1.0;
        for j in 0..i {
            let v = m.inner_product(i, j);
            r[(i, j)] = v;
            r[(j, i)] = v;
        }
    }
    r
}

/// Covariance matrix SS^T (N x N), built from the sparse pulse lists.
pub fn covariance(m: &SpreadingMatrix) -> Mat {
    let n = m.n();
    let nh = m.nh();
    let amp = m.amplitude();
    let mut c = Mat::zeros(n, n);
    for user in 0..m.k() {
        let pulses = &m.nonzero_positions()[user];
        for a in pulses {
            let ia = a.chip(nh);
            let va = a.sign() * amp;
            for b in pulses {
                c[(ia, b.chip(nh))] += va * b.sign() * amp;
            }
        }
    }
    c
}

/// Eigenvalues of SS^T, ascending, padded with zeros so the length is N.
///
/// For Ns = 1 the covariance is diagonal with entries v_i / 1 (the number of
/// users hopped onto chip i), so the spectrum is read off from occupancy
/// counts without any factorization. Otherwise the nonzero spectrum is taken
/// from whichever of S^T S and SS^T is smaller.
pub fn gram_eigenvalues(m: &SpreadingMatrix) -> Result<Vec<f64>> {
    let n = m.n();
    if m.ns() == 1 {
        let mut counts = vec![0usize; n];
        for user in 0..m.k() {
            counts[m.chip_of(user)] += 1;
        }
        let mut eig: Vec<f64> = counts.into_iter().map(|c| c as f64).collect();
        eig.sort_by(|a, b| a.partial_cmp(b).unwrap());
        return Ok(eig);
    }
    let k = m.k();
    let mut eig = if k < n {
        // S^T S and SS^T share nonzero eigenvalues.
        linalg::sym_eigenvalues(gram(m))?
    } else {
        linalg::sym_eigenvalues(covariance(m))?
    };
    // Eigenvalues of a Gram matrix are nonnegative; clamp rounding noise.
    for v in eig.iter_mut() {
        if *v < 0.0 {
            *v = v.max(-1e-9);
            *v = 0.0;
        }
    }
    if eig.len() < n {
        let mut padded = vec![0.0; n - eig.len()];
        padded.extend(eig);
        eig = padded;
    }
    eig.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(eig)
}

/// Empirical moment m_L = (1/N) sum lambda_i^L.
///
/// For Ns = 1 the eigenvalues are the integer chip occupancies, so the sum is
/// accumulated exactly in u128 before the single final division.
pub fn esd_moment(m: &SpreadingMatrix, order: u32) -> Result<f64> {
    if order == 0 {
        return Ok(1.0);
    }
    let n = m.n();
    if m.ns() == 1 {
        let mut counts = vec![0u32; n];
        for user in 0..m.k() {
            counts[m.chip_of(user)] += 1;
        }
        let mut acc: u128 = 0;
        for c in counts {
            acc += (c as u128).pow(order);
        }
        return Ok(acc as f64 / n as f64);
    }
    let eig = gram_eigenvalues(m)?;
    Ok(eig.iter().map(|v| v.powi(order as i32)).sum::<f64>() / n as f64)
}

/// Number of eigenvalues above the numerical-rank threshold
/// tau = N * eps * lambda_max.
pub fn rank_from_eigenvalues(eigenvalues: &[f64], n: usize) -> usize {
    let lambda_max = eigenvalues.iter().cloned().fold(0.0, f64::max);
    if lambda_max <= 0.0 {
        return 0;
    }
    let tau = n as f64 * f64::EPSILON * lambda_max;
    eigenvalues.iter().filter(|v| **v > tau).count()
}

/// Normalized rank r_N = rank(SS^T) / N.
pub fn normalized_rank(m: &SpreadingMatrix) -> Result<f64> {
    let eig = gram_eigenvalues(m)?;
    Ok(rank_from_eigenvalues(&eig, m.n()) as f64 / m.n() as f64)
}

pub fn summarize(m: &SpreadingMatrix, max_moment: u32) -> Result<SpectralSummary> {
    let eigenvalues = gram_eigenvalues(m)?;
    let n = m.n();
    let moments = (1..=max_moment)
        .map(|l| eigenvalues.iter().map(|v| v.powi(l as i32)).sum::<f64>() / n as f64)
        .collect();
    let rank = rank_from_eigenvalues(&eigenvalues, n);
    Ok(SpectralSummary {
        eigenvalues,
        moments,
        rank,
        normalized_rank: rank as f64 / n as f64,
    })
}

/// Per-realization optimum spectral efficiency
/// (1/N) log2 det(I + gamma SS^T), computed as a Cholesky log-det of
/// I + gamma G on the smaller of the two Gram forms.
pub fn logdet_capacity(m: &SpreadingMatrix, gamma: f64) -> Result<f64> {
    if !(gamma >= 0.0) {
        return Err(Error::Domain(format!("gamma must be >= 0, got {gamma}")));
    }
    let n = m.n();
    let k = m.k();
    let mut a = if k <= n { gram(m) } else { covariance(m) };
    let dim = a.rows();
    for i in 0..dim {
        for j in 0..dim {
            a[(i, j)] *= gamma;
        }
        a[(i, i)] += 1.0;
    }
    linalg::cholesky_in_place(&mut a)?;
    let ln_det = linalg::cholesky_ln_det(&a);
    Ok(ln_det / std::f64::consts::LN_2 / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::EnsembleSpec;

    #[test]
    fn ns1_spectrum_is_occupancy() {
        let spec = EnsembleSpec::th(16, 8, 1, 5).unwrap();
        let m = SpreadingMatrix::sample(&spec).unwrap();
        let eig = gram_eigenvalues(&m).unwrap();
        assert_eq!(eig.len(), 16);
        let total: f64 = eig.iter().sum();
        assert_eq!(total, 8.0); // trace = K for unit-norm columns
        for v in &eig {
            assert_eq!(v.fract(), 0.0);
        }
    }

    #[test]
    fn first_moment_is_load_exactly() {
        for seed in 0..20 {
            let spec = EnsembleSpec::th(24, 13, 4, seed).unwrap();
            let m = SpreadingMatrix::sample(&spec).unwrap();
            let m1 = esd_moment(&m, 1).unwrap();
            assert!((m1 - 13.0 / 24.0).abs() < 1e-12);
        }
    }

    #[test]
    fn moment_routes_agree() {
        // Exact-count route vs generic eigenvalue route for Ns = 1.
        let spec = EnsembleSpec::th(32, 20, 1, 11).unwrap();
        let m = SpreadingMatrix::sample(&spec).unwrap();
        for order in 1..=6 {
            let fast = esd_moment(&m, order).unwrap();
            let eig = gram_eigenvalues(&m).unwrap();
            let slow: f64 = eig.iter().map(|v| v.powi(order as i32)).sum::<f64>() / 32.0;
            assert!((fast - slow).abs() < 1e-9);
        }
    }

    #[test]
    fn gram_and_covariance_share_nonzero_spectrum() {
        let spec = EnsembleSpec::th(12, 5, 3, 7).unwrap();
        let m = SpreadingMatrix::sample(&spec).unwrap();
        let eg = crate::linalg::sym_eigenvalues(gram(&m)).unwrap();
        let ec = crate::linalg::sym_eigenvalues(covariance(&m)).unwrap();
        let nz: Vec<f64> = ec.iter().cloned().filter(|v| v.abs() > 1e-9).collect();
        let gz: Vec<f64> = eg.iter().cloned().filter(|v| v.abs() > 1e-9).collect();
        assert_eq!(nz.len(), gz.len());
        for (a, b) in nz.iter().zip(&gz) {
            assert!((a - b).abs() < 1e-8, "{a} vs {b}");
        }
    }

    #[test]
    fn logdet_matches_eigen_sum() {
        for seed in [1, 2, 3] {
            let spec = EnsembleSpec::th(16, 10, 2, seed).unwrap();
            let m = SpreadingMatrix::sample(&spec).unwrap();
            let gamma = 3.7;
            let via_chol = logdet_capacity(&m, gamma).unwrap();
            let eig = gram_eigenvalues(&m).unwrap();
            let via_eig: f64 =
                eig.iter().map(|l| (1.0 + gamma * l).log2()).sum::<f64>() / 16.0;
            assert!((via_chol - via_eig).abs() < 1e-10);
        }
    }

    #[test]
    fn single_user_rank_one() {
        let spec = EnsembleSpec::th(8, 1, 2, 4).unwrap();
        let m = SpreadingMatrix::sample(&spec).unwrap();
        let s = summarize(&m, 4).unwrap();
        assert_eq!(s.rank, 1);
        // Unit-norm column: single nonzero eigenvalue 1, so m_L = 1/N.
        for v in &s.moments {
            assert!((v - 1.0 / 8.0).abs() < 1e-12);
        }
    }

    #[test]
    fn overloaded_ds_uses_covariance_route() {
        let spec = EnsembleSpec::ds(4, 9, 21).unwrap();
        let m = SpreadingMatrix::sample(&spec).unwrap();
        let eig = gram_eigenvalues(&m).unwrap();
        assert_eq!(eig.len(), 4);
        assert!((eig.iter().sum::<f64>() - 9.0).abs() < 1e-9);
        let c = logdet_capacity(&m, 1.0).unwrap();
        let direct: f64 = eig.iter().map(|l| (1.0 + l).log2()).sum::<f64>() / 4.0;
        assert!((c - direct).abs() < 1e-9);
    }
}
