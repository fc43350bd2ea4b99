//! Linear front ends. A single family W = S^T (eta SS^T + alpha I)^{-1}
//! covers the receivers of interest: eta = 0 gives the single-user matched
//! filter (bank of correlators), eta = 1 with alpha -> 0 the decorrelator,
//! and eta = 1 with alpha = 1/gamma the MMSE receiver. For Ns = 1 signatures
//! SS^T is diagonal in the chip occupancies, which yields closed-form gains;
//! the direct dense route is kept as an independent check.

use crate::ensembles::SpreadingMatrix;
use crate::error::{Error, Result};
use crate::linalg::{self, Mat};
use crate::spectra;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFrontEnd {
    /// Weight on SS^T in the inverted matrix; 0 (matched filter) or 1.
    pub eta: f64,
    /// Ridge term; must be positive so the inverse exists for every draw.
    pub alpha: f64,
}

impl LinearFrontEnd {
    pub fn new(eta: f64, alpha: f64) -> Result<Self> {
        if eta != 0.0 && eta != 1.0 {
            return Err(Error::Domain(format!("eta must be 0 or 1, got {eta}")));
        }
        if !(alpha > 0.0) {
            return Err(Error::Domain(format!("alpha must be > 0, got {alpha}")));
        }
        Ok(LinearFrontEnd { eta, alpha })
    }

    /// Single-user matched filter: eta = 0 (alpha is a pure scale and drops
    /// out of every SINR).
    pub fn sumf() -> Self {
        LinearFrontEnd {
            eta: 0.0,
            alpha: 1.0,
        }
    }

    /// Decorrelator as the small-ridge limit of the regularized inverse.
    pub fn decorrelator() -> Self {
        LinearFrontEnd {
            eta: 1.0,
            alpha: 1e-10,
        }
    }

    /// MMSE receiver at signal-to-noise ratio gamma.
    pub fn mmse(gamma: f64) -> Result<Self> {
        if !(gamma > 0.0) {
            return Err(Error::Domain(format!("gamma must be > 0, got {gamma}")));
        }
        Ok(LinearFrontEnd {
            eta: 1.0,
            alpha: 1.0 / gamma,
        })
    }
}

/// Signature crosscorrelations rho_ij = s_i . s_j (K x K), from pulse
/// collision counts scaled by 1/Ns.
pub fn crosscorrelations(m: &SpreadingMatrix) -> Mat {
    spectra::gram(m)
}

/// For Ns = 1: occupancy of each user's chip, v_i = #{k : chip_k = chip_i}
/// (including user i itself).
pub fn user_chip_occupancy(m: &SpreadingMatrix) -> Result<Vec<usize>> {
    if m.ns() != 1 {
        return Err(Error::Domain(
            "chip occupancy is defined for Ns = 1 signatures".into(),
        ));
    }
    let mut counts = vec![0usize; m.n()];
    for user in 0..m.k() {
        counts[m.chip_of(user)] += 1;
    }
    Ok((0..m.k()).map(|u| counts[m.chip_of(u)]).collect())
}

/// Closed-form gain matrix G = W S for Ns = 1:
/// G_ij = rho_ij / (alpha + eta v_i).
pub fn gain_closed_form(m: &SpreadingMatrix, fe: &LinearFrontEnd) -> Result<Mat> {
    let v = user_chip_occupancy(m)?;
    let rho = crosscorrelations(m);
    let k = m.k();
    let mut g = Mat::zeros(k, k);
    for i in 0..k {
        let d = fe.alpha + fe.eta * v[i] as f64;
        for j in 0..k {
            g[(i, j)] = rho[(i, j)] / d;
        }
    }
    Ok(g)
}

/// Closed-form filtered-noise covariance W W^T (unit noise spectral level)
/// for Ns = 1: rho_ij / (alpha + eta v_i)^2. Nonzero entries pair users on
/// the same chip, where v_i = v_j.
pub fn noise_cov_closed_form(m: &SpreadingMatrix, fe: &LinearFrontEnd) -> Result<Mat> {
    let v = user_chip_occupancy(m)?;
    let rho = crosscorrelations(m);
    let k = m.k();
    let mut c = Mat::zeros(k, k);
    for i in 0..k {
        let d = fe.alpha + fe.eta * v[i] as f64;
        for j in 0..k {
            c[(i, j)] = rho[(i, j)] / (d * d);
        }
    }
    Ok(c)
}

/// Rows of W = S^T (eta SS^T + alpha I)^{-1} by a dense Cholesky solve,
/// valid for any Ns. Returns the K x N filter matrix.
fn filter_rows_direct(m: &SpreadingMatrix, fe: &LinearFrontEnd) -> Result<Mat> {
    let n = m.n();
    let k = m.k();
    let mut a = spectra::covariance(m);
    for i in 0..n {
        for j in 0..n {
            a[(i, j)] *= fe.eta;
        }
        a[(i, i)] += fe.alpha;
    }
    let mut chol = a.clone();
    linalg::cholesky_in_place(&mut chol)?;
    let mut w = Mat::zeros(k, n);
    for user in 0..k {
        let x = linalg::cholesky_solve_refined(&a, &chol, &m.column(user));
        for (j, v) in x.iter().enumerate() {
            w[(user, j)] = *v;
        }
    }
    Ok(w)
}

/// Gain matrix G = W S by the direct dense route.
pub fn gain_direct(m: &SpreadingMatrix, fe: &LinearFrontEnd) -> Result<Mat> {
    let w = filter_rows_direct(m, fe)?;
    let k = m.k();
    let mut g = Mat::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            let col = m.column(j);
            g[(i, j)] = (0..m.n()).map(|t| w[(i, t)] * col[t]).sum();
        }
    }
    Ok(g)
}

/// Filtered-noise covariance W W^T by the direct dense route.
pub fn noise_cov_direct(m: &SpreadingMatrix, fe: &LinearFrontEnd) -> Result<Mat> {
    let w = filter_rows_direct(m, fe)?;
    let k = m.k();
    let n = m.n();
    let mut c = Mat::zeros(k, k);
    for i in 0..k {
        for j in 0..=i {
            let v: f64 = (0..n).map(|t| w[(i, t)] * w[(j, t)]).sum();
            c[(i, j)] = v;
            c[(j, i)] = v;
        }
    }
    Ok(c)
}

/// Per-realization SINR of user 1 through the front end, equal-power users
/// at signal-to-noise ratio gamma:
/// G_11^2 gamma / (gamma sum_{j != 1} G_1j^2 + [WW^T]_11).
pub fn conditional_sinr_user1(
    gains: &Mat,
    noise_cov: &Mat,
    gamma: f64,
) -> Result<f64> {
    if !(gamma > 0.0) {
        return Err(Error::Domain(format!("gamma must be > 0, got {gamma}")));
    }
    let k = gains.rows();
    let signal = gains[(0, 0)] * gains[(0, 0)] * gamma;
    let mut mai = 0.0;
    for j in 1..k {
        mai += gains[(0, j)] * gains[(0, j)];
    }
    let denom = gamma * mai + noise_cov[(0, 0)];
    if denom <= 0.0 {
        return Err(Error::Singular("degenerate front-end output".into()));
    }
    Ok(signal / denom)
}

/// Interference power at the matched-filter output of user 1:
/// sum_{k >= 2} rho_1k^2 (any Ns).
pub fn interference_sum_user1(m: &SpreadingMatrix) -> f64 {
    (1..m.k())
        .map(|j| {
            let r = m.inner_product(0, j);
            r * r
        })
        .sum()
}
