//! Closed-form spectral-efficiency and mutual-information formulas in the
//! large-system limit, the complex Gaussian-mixture entropy engine behind
//! the unknown-signature matched-filter curve, and low/high-SNR asymptotic
//! parameters (minimum Eb/N0, wideband slope, high-SNR slope).
//!
//! Conventions: `beta` is the user load K/N, `gamma` the per-user
//! signal-to-noise ratio (linear), capacities in bits/s/Hz, differential
//! entropies in bits. Complex circular Gaussians have kurtosis
//! E|Z|^4 / (E|Z|^2)^2 = 2.

use std::f64::consts::{E, LN_2, PI};

use crate::error::{Error, Result};
use crate::laws::{MarchenkoPasturLaw, PoissonLaw};
use crate::quad;

fn check_beta(beta: f64) -> Result<()> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::Domain(format!("load beta must be > 0, got {beta}")));
    }
    Ok(())
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma >= 0.0) || !gamma.is_finite() {
        return Err(Error::Domain(format!("gamma must be >= 0, got {gamma}")));
    }
    Ok(())
}

fn check_ns(ns: usize) -> Result<()> {
    if ns == 0 {
        return Err(Error::Domain("Ns must be positive".into()));
    }
    Ok(())
}

/// Poisson weights truncated to a 1e-16 tail; mixture variances can reach
/// gamma^2 in fourth moments, so the default 1e-12 tail is not enough.
fn poisson_weights(lambda: f64) -> Result<PoissonLaw> {
    PoissonLaw::with_tail(lambda, 1e-16)
}

/// Optimum spectral efficiency of sparse hopping (Ns = 1):
/// sum_k f_k(beta) log2(1 + k gamma), f_k the Poisson(beta) pmf.
pub fn c_opt_th_ns1(beta: f64, gamma: f64) -> Result<f64> {
    check_beta(beta)?;
    check_gamma(gamma)?;
    let law = poisson_weights(beta)?;
    Ok(law.expect(|k| (1.0 + k as f64 * gamma).log2()))
}

/// Optimum spectral efficiency of direct-sequence spreading, as the
/// Marchenko-Pastur integral of log2(1 + gamma x).
pub fn c_opt_ds(beta: f64, gamma: f64) -> Result<f64> {
    check_beta(beta)?;
    check_gamma(gamma)?;
    if gamma == 0.0 {
        return Ok(0.0);
    }
    let law = MarchenkoPasturLaw::new(beta)?;
    law.expect(|x| (1.0 + gamma * x).log2(), 1e-11)
}

/// Matched-filter spectral efficiency of direct-sequence spreading:
/// beta log2(1 + gamma / (1 + beta gamma)).
pub fn sumf_ds(beta: f64, gamma: f64) -> Result<f64> {
    check_beta(beta)?;
    check_gamma(gamma)?;
    Ok(beta * (1.0 + gamma / (1.0 + beta * gamma)).log2())
}

/// Matched-filter mutual information of time-hopping with known signatures:
/// beta sum_k Pois(Ns^2 beta)(k) log2(1 + gamma / (1 + k gamma / Ns^2)).
pub fn sumf_th_known_s(beta: f64, gamma: f64, ns: usize) -> Result<f64> {
    check_beta(beta)?;
    check_gamma(gamma)?;
    check_ns(ns)?;
    let ns2 = (ns * ns) as f64;
    let law = poisson_weights(beta * ns2)?;
    Ok(beta * law.expect(|k| (1.0 + gamma / (1.0 + k as f64 * gamma / ns2)).log2()))
}

/// Dense-hopping limit (Ns growing with N): the matched-filter curve
/// collapses onto the direct-sequence formula for every hopping fraction.
pub fn sumf_th_dense_limit(beta: f64, gamma: f64) -> Result<f64> {
    sumf_ds(beta, gamma)
}

/// Decorrelator spectral efficiency of direct-sequence spreading,
/// beta log2(1 + gamma (1 - beta)); defined for beta < 1.
pub fn deco_ds(beta: f64, gamma: f64) -> Result<f64> {
    check_beta(beta)?;
    check_gamma(gamma)?;
    if beta >= 1.0 {
        return Err(Error::Domain(format!(
            "decorrelator requires beta < 1, got {beta}"
        )));
    }
    Ok(beta * (1.0 + gamma * (1.0 - beta)).log2())
}

/// The Marchenko-Pastur fluctuation term
/// F(gamma, beta) = (sqrt(1 + gamma u+) - sqrt(1 + gamma u-))^2.
fn mp_fluctuation(beta: f64, gamma: f64) -> f64 {
    let s = beta.sqrt();
    let hi = (1.0 + s) * (1.0 + s);
    let lo = (1.0 - s) * (1.0 - s);
    let d = (1.0 + gamma * hi).sqrt() - (1.0 + gamma * lo).sqrt();
    d * d
}

/// MMSE spectral efficiency of direct-sequence spreading:
/// beta log2(1 + gamma - F/4).
pub fn mmse_ds(beta: f64, gamma: f64) -> Result<f64> {
    check_beta(beta)?;
    check_gamma(gamma)?;
    Ok(beta * (1.0 + gamma - 0.25 * mp_fluctuation(beta, gamma)).log2())
}

/// Mutual information of any linear front end of the regularized-inverse
/// family for Ns = 1 signatures: the per-user SINR is
/// gamma / (1 + k gamma) given k same-chip interferers, k ~ Poisson(beta),
/// so decorrelator, MMSE, and matched filter all give
/// beta sum_k f_k(beta) log2(1 + gamma / (1 + k gamma)).
pub fn linear_th_ns1(beta: f64, gamma: f64) -> Result<f64> {
    check_beta(beta)?;
    check_gamma(gamma)?;
    let law = poisson_weights(beta)?;
    Ok(beta * law.expect(|k| (1.0 + gamma / (1.0 + k as f64 * gamma)).log2()))
}

/// Orthogonal multiple access reference: beta log2(1 + gamma), beta <= 1.
pub fn orthogonal(beta: f64, gamma: f64) -> Result<f64> {
    check_beta(beta)?;
    check_gamma(gamma)?;
    if beta > 1.0 {
        return Err(Error::Domain(format!(
            "orthogonal access requires beta <= 1, got {beta}"
        )));
    }
    Ok(beta * (1.0 + gamma).log2())
}

// ---------------------------------------------------------------------------
// Complex Gaussian mixtures.
// ---------------------------------------------------------------------------

/// Finite mixture of circularly symmetric complex Gaussians
/// p(z) = sum_k w_k exp(-|z|^2 / v_k) / (pi v_k).
#[derive(Debug, Clone)]
pub struct GaussianMixture {
    weights: Vec<f64>,
    variances: Vec<f64>,
}

/// Differential entropy of a single circular complex Gaussian, in bits.
pub fn gaussian_entropy_bits(variance: f64) -> f64 {
    (PI * E * variance).log2()
}

impl GaussianMixture {
    pub fn new(weights: Vec<f64>, variances: Vec<f64>) -> Result<Self> {
        if weights.len() != variances.len() || weights.is_empty() {
            return Err(Error::Domain(
                "mixture needs matching, nonempty weight and variance lists".into(),
            ));
        }
        let mass: f64 = weights.iter().sum();
        if (mass - 1.0).abs() > 1e-9 {
            return Err(Error::Domain(format!(
                "mixture weights sum to {mass}, expected 1"
            )));
        }
        if weights.iter().any(|w| *w < 0.0) || variances.iter().any(|v| !(*v > 0.0)) {
            return Err(Error::Domain(
                "weights must be >= 0 and variances > 0".into(),
            ));
        }
        Ok(GaussianMixture { weights, variances })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn variances(&self) -> &[f64] {
        &self.variances
    }

    pub fn density(&self, r: f64) -> f64 {
        let r2 = r * r;
        self.weights
            .iter()
            .zip(&self.variances)
            .map(|(w, v)| w * (-r2 / v).exp() / (PI * v))
            .sum()
    }

    /// E|Z|^2 = sum_k w_k v_k.
    pub fn second_moment(&self) -> f64 {
        self.weights
            .iter()
            .zip(&self.variances)
            .map(|(w, v)| w * v)
            .sum()
    }

    /// E|Z|^4 = sum_k w_k 2 v_k^2 (|Z|^2 is exponential within a component).
    pub fn fourth_moment(&self) -> f64 {
        self.weights
            .iter()
            .zip(&self.variances)
            .map(|(w, v)| w * 2.0 * v * v)
            .sum()
    }

    /// Kurtosis E|Z|^4 / (E|Z|^2)^2; 2 for a single Gaussian.
    pub fn kurtosis(&self) -> f64 {
        let m2 = self.second_moment();
        self.fourth_moment() / (m2 * m2)
    }

    /// Lower entropy bound sum_k w_k log2(pi e v_k): entropy of the mixture
    /// with the component label revealed.
    pub fn entropy_lower_bound(&self) -> f64 {
        self.weights
            .iter()
            .zip(&self.variances)
            .map(|(w, v)| if *w > 0.0 { w * gaussian_entropy_bits(*v) } else { 0.0 })
            .sum()
    }

    /// Label entropy -sum_k w_k log2 w_k; the mixture entropy lies between
    /// the lower bound and lower bound + this.
    pub fn label_entropy(&self) -> f64 {
        -self
            .weights
            .iter()
            .filter(|w| **w > 0.0)
            .map(|w| w * w.log2())
            .sum::<f64>()
    }

    /// Differential entropy in bits, by adaptive quadrature of the radial
    /// integral -int 2 pi r p(r) log2 p(r) dr.
    ///
    /// Breakpoints at fixed multiples of every component scale keep narrow
    /// components visible when scales differ by orders of magnitude (a
    /// variance-1 spike next to variance ~1e4 components integrates to
    /// garbage over a single top-level interval).
    pub fn entropy_bits(&self) -> Result<f64> {
        let mut sigmas: Vec<f64> = self.variances.iter().map(|v| v.sqrt()).collect();
        sigmas.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let r_max = 8.0 * sigmas.last().unwrap();
        let mut pts = vec![0.0];
        for s in &sigmas {
            for mult in [0.5, 1.0, 2.0, 4.0, 8.0] {
                let r = mult * s;
                if r < r_max {
                    pts.push(r);
                }
            }
        }
        pts.push(r_max);
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        pts.dedup_by(|a, b| (*a - *b).abs() < 1e-12 * r_max);
        let integrand = |r: f64| {
            let p = self.density(r);
            if p <= 1e-300 {
                0.0
            } else {
                -2.0 * PI * r * p * p.log2()
            }
        };
        quad::integrate_segmented(integrand, &pts, 1e-9)
    }
}

/// Interference-plus-noise mixture at the matched-filter output of a
/// time-hopping system with unknown signatures: Poisson(beta Ns^2) weights,
/// component variances 1 + k gamma / Ns^2.
pub fn mixture_pz(beta: f64, gamma: f64, ns: usize) -> Result<GaussianMixture> {
    check_beta(beta)?;
    check_gamma(gamma)?;
    check_ns(ns)?;
    let ns2 = (ns * ns) as f64;
    let law = poisson_weights(beta * ns2)?;
    let mut weights = law.pmf().to_vec();
    let variances: Vec<f64> = (0..weights.len())
        .map(|k| 1.0 + k as f64 * gamma / ns2)
        .collect();
    // Renormalize the truncated tail so the mixture is a proper density.
    let mass: f64 = weights.iter().sum();
    for w in weights.iter_mut() {
        *w /= mass;
    }
    GaussianMixture::new(weights, variances)
}

/// Output mixture with the desired user's signal included: same weights,
/// variances 1 + gamma + k gamma / Ns^2.
pub fn mixture_py(beta: f64, gamma: f64, ns: usize) -> Result<GaussianMixture> {
    let pz = mixture_pz(beta, gamma, ns)?;
    let variances = pz.variances().iter().map(|v| v + gamma).collect();
    GaussianMixture::new(pz.weights().to_vec(), variances)
}

/// Closed-form kurtosis of the interference-plus-noise output:
/// 2 + (2 / Ns^2) beta gamma^2 / (1 + beta gamma)^2.
pub fn kurtosis_closed_form(beta: f64, gamma: f64, ns: usize) -> Result<f64> {
    check_beta(beta)?;
    check_gamma(gamma)?;
    check_ns(ns)?;
    let bg = 1.0 + beta * gamma;
    Ok(2.0 + 2.0 / (ns * ns) as f64 * beta * gamma * gamma / (bg * bg))
}

/// Matched-filter mutual information without signature knowledge:
/// beta [h(P_Y) - h(P_Z)] with the mixtures above.
pub fn sumf_th_star(beta: f64, gamma: f64, ns: usize) -> Result<f64> {
    check_beta(beta)?;
    check_gamma(gamma)?;
    check_ns(ns)?;
    if gamma == 0.0 {
        return Ok(0.0);
    }
    let hy = mixture_py(beta, gamma, ns)?.entropy_bits()?;
    let hz = mixture_pz(beta, gamma, ns)?.entropy_bits()?;
    Ok(beta * (hy - hz))
}

// ---------------------------------------------------------------------------
// Asymptotic parameters.
// ---------------------------------------------------------------------------

/// Low- and high-SNR descriptors of a spectral-efficiency curve C(gamma):
/// minimum energy per bit (linear Eb/N0), wideband slope S0
/// (bits/s/Hz per 3 dB at the low-SNR end), and high-SNR slope S_inf
/// (bits/s/Hz per 3 dB as gamma -> infinity).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticParams {
    pub eta_min: f64,
    pub s0: f64,
    pub s_inf: f64,
}

const ETA_GAMMA: f64 = 1e-8;
const S0_GAMMA: f64 = 1e-4;
const S_INF_LO: f64 = 262_144.0; // 2^18
const S_INF_HI: f64 = 4_194_304.0; // 2^22

/// Minimum Eb/N0 (linear) extracted as beta gamma / C(gamma) at small gamma.
pub fn eta_min_numeric<F: Fn(f64) -> Result<f64>>(c: F, beta: f64) -> Result<f64> {
    check_beta(beta)?;
    let v = c(ETA_GAMMA)?;
    if v <= 0.0 {
        return Err(Error::Domain("capacity vanished at small gamma".into()));
    }
    Ok(beta * ETA_GAMMA / v)
}

/// Wideband slope from a two-point fit C(g) ~ a g + (b/2) g^2 at
/// g in {1e-4, 2e-4}: S0 = -2 ln2 a^2 / b.
pub fn s0_numeric<F: Fn(f64) -> Result<f64>>(c: F) -> Result<f64> {
    let c1 = c(S0_GAMMA)?;
    let c2 = c(2.0 * S0_GAMMA)?;
    let a = (4.0 * c1 - c2) / (2.0 * S0_GAMMA);
    let b = (c2 - 2.0 * c1) / (S0_GAMMA * S0_GAMMA);
    if b >= 0.0 {
        return Err(Error::Domain(
            "curve not concave at the low-SNR end".into(),
        ));
    }
    Ok(-2.0 * LN_2 * a * a / b)
}

/// High-SNR slope (C(2^22) - C(2^18)) / 4 in bits/s/Hz per 3 dB.
pub fn s_inf_numeric<F: Fn(f64) -> Result<f64>>(c: F) -> Result<f64> {
    Ok((c(S_INF_HI)? - c(S_INF_LO)?) / 4.0)
}

pub fn asymptotics<F: Fn(f64) -> Result<f64>>(c: F, beta: f64) -> Result<AsymptoticParams> {
    Ok(AsymptoticParams {
        eta_min: eta_min_numeric(&c, beta)?,
        s0: s0_numeric(&c)?,
        s_inf: s_inf_numeric(&c)?,
    })
}

/// Closed-form wideband slope of the optimum receiver: 2 beta / (1 + beta).
pub fn s0_opt(beta: f64) -> f64 {
    2.0 * beta / (1.0 + beta)
}

/// Closed-form wideband slope of the matched filter: 2 beta / (1 + 2 beta).
pub fn s0_sumf(beta: f64) -> f64 {
    2.0 * beta / (1.0 + 2.0 * beta)
}

/// High-SNR slope of the optimum Ns = 1 hopping receiver: 1 - e^{-beta}
/// (the asymptotic normalized rank).
pub fn s_inf_opt_th_ns1(beta: f64) -> f64 {
    1.0 - (-beta).exp()
}

/// High-SNR slope of direct sequence: min(1, beta).
pub fn s_inf_ds(beta: f64) -> f64 {
    beta.min(1.0)
}

/// High-SNR slope of the known-signature matched filter:
/// beta e^{-Ns^2 beta}.
pub fn s_inf_sumf_th(beta: f64, ns: usize) -> f64 {
    beta * (-((ns * ns) as f64) * beta).exp()
}

/// High-SNR power offset of the optimum Ns = 1 hopping receiver:
/// log2 beta - (1 - e^{-beta})^{-1} sum_{k>=2} f_k(beta) log2 k.
pub fn l_inf_opt_th_ns1(beta: f64) -> Result<f64> {
    check_beta(beta)?;
    let law = poisson_weights(beta)?;
    let mean_log = law.expect(|k| if k >= 2 { (k as f64).log2() } else { 0.0 });
    Ok(beta.log2() - mean_log / (1.0 - (-beta).exp()))
}

// ---------------------------------------------------------------------------
// Eb/N0 parametrization.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy)]
pub struct Ebn0Point {
    pub gamma: f64,
    pub ebn0_db: f64,
    pub c: f64,
}

/// Traces C against Eb/N0 parametrically in gamma: for each grid point,
/// Eb/N0 = beta gamma / C(gamma). No inversion is attempted; the curve must
/// be nondecreasing in gamma or the sweep aborts.
pub fn ebn0_curve<F: Fn(f64) -> Result<f64>>(
    c: F,
    beta: f64,
    gammas: &[f64],
) -> Result<Vec<Ebn0Point>> {
    check_beta(beta)?;
    let mut out = Vec::with_capacity(gammas.len());
    let mut last = 0.0;
    for &gamma in gammas {
        check_gamma(gamma)?;
        let v = c(gamma)?;
        if v < last - 1e-12 {
            return Err(Error::NonMonotone(gamma));
        }
        last = v;
        if v <= 0.0 {
            continue; // gamma = 0 point carries no finite Eb/N0
        }
        out.push(Ebn0Point {
            gamma,
            ebn0_db: 10.0 * (beta * gamma / v).log10(),
            c: v,
        });
    }
    Ok(out)
}

/// Solves beta gamma / C(gamma) = Eb/N0 for gamma by bisection in
/// log-gamma. Eb/N0 along these curves increases with gamma, so the root is
/// unique when it exists; targets below the curve's minimum Eb/N0 are
/// rejected.
pub fn gamma_for_ebn0<F: Fn(f64) -> Result<f64>>(
    c: F,
    beta: f64,
    ebn0_db: f64,
) -> Result<f64> {
    check_beta(beta)?;
    let target = 10f64.powf(ebn0_db / 10.0);
    let ebn0_at = |lg: f64| -> Result<f64> {
        let g = 10f64.powf(lg);
        let v = c(g)?;
        if v <= 0.0 {
            return Err(Error::Domain("capacity vanished on the bracket".into()));
        }
        Ok(beta * g / v)
    };
    let (mut lo, mut hi) = (-9.0, 9.0);
    if ebn0_at(lo)? > target {
        return Err(Error::Domain(format!(
            "Eb/N0 = {ebn0_db} dB is below the curve's minimum energy per bit"
        )));
    }
    if ebn0_at(hi)? < target {
        return Err(Error::Domain(format!(
            "Eb/N0 = {ebn0_db} dB is beyond the searchable SNR range"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if ebn0_at(mid)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(10f64.powf(0.5 * (lo + hi)))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Known closed form for the optimum direct-sequence spectral
    /// efficiency, used here purely as a cross-check on the
    /// Marchenko-Pastur quadrature route.
    fn c_opt_ds_closed(beta: f64, gamma: f64) -> f64 {
        let f = mp_fluctuation(beta, gamma);
        beta * (1.0 + gamma - 0.25 * f).log2() + (1.0 + gamma * beta - 0.25 * f).log2()
            - 0.25 * f / (gamma * LN_2)
    }

    #[test]
    fn ds_optimum_quadrature_matches_closed_form() {
        for &beta in &[0.4, 1.0, 2.0] {
            for &gamma in &[0.5, 4.0, 40.0] {
                let q = c_opt_ds(beta, gamma).unwrap();
                let c = c_opt_ds_closed(beta, gamma);
                assert!((q - c).abs() < 1e-8, "beta {beta} gamma {gamma}: {q} vs {c}");
            }
        }
    }

    #[test]
    fn th_optimum_below_ds_optimum() {
        // Sparse hopping pays for its rank deficiency: under optimum
        // decoding the hopping curve sits below dense spreading, with the
        // gap widening as SNR grows.
        for &beta in &[0.5, 1.0, 2.0] {
            let mut gap = 0.0;
            for &gamma in &[1.0, 10.0, 100.0] {
                let th = c_opt_th_ns1(beta, gamma).unwrap();
                let ds = c_opt_ds(beta, gamma).unwrap();
                assert!(th < ds, "beta {beta} gamma {gamma}: {th} >= {ds}");
                assert!(ds - th > gap);
                gap = ds - th;
            }
        }
    }

    #[test]
    fn linear_ns1_equals_known_signature_sumf() {
        for &beta in &[0.25, 1.0, 3.0] {
            for &gamma in &[0.1, 1.0, 30.0] {
                let a = linear_th_ns1(beta, gamma).unwrap();
                let b = sumf_th_known_s(beta, gamma, 1).unwrap();
                assert!((a - b).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn sumf_ds_saturates() {
        // beta log2(1 + 1/beta) as gamma -> infinity.
        let beta = 0.8;
        let lim = beta * (1.0_f64 + 1.0 / beta).log2();
        let v = sumf_ds(beta, 1e9).unwrap();
        assert!((v - lim).abs() < 1e-6);
    }

    #[test]
    fn mmse_tends_to_overloaded_limit() {
        // beta log2(beta / (beta - 1)) for beta > 1 at high SNR.
        let v = mmse_ds(2.0, 1e6).unwrap();
        assert!((v - 2.0).abs() < 1e-3);
    }

    #[test]
    fn deco_requires_underload() {
        assert!(deco_ds(1.0, 10.0).is_err());
        let v = deco_ds(0.5, 3.0).unwrap();
        assert!((v - 0.5 * 2.5_f64.log2()).abs() < 1e-15);
    }

    #[test]
    fn single_gaussian_entropy_exact() {
        for &v in &[0.3, 1.0, 250.0] {
            let m = GaussianMixture::new(vec![1.0], vec![v]).unwrap();
            let h = m.entropy_bits().unwrap();
            assert!((h - gaussian_entropy_bits(v)).abs() < 1e-8);
        }
    }

    #[test]
    fn entropy_sandwich() {
        let m = GaussianMixture::new(vec![0.6, 0.3, 0.1], vec![1.0, 9.0, 100.0]).unwrap();
        let h = m.entropy_bits().unwrap();
        let lo = m.entropy_lower_bound();
        let hi = lo + m.label_entropy();
        assert!(h >= lo - 1e-9 && h <= hi + 1e-9, "{lo} <= {h} <= {hi}");
    }

    #[test]
    fn multiscale_mixture_entropy_sane() {
        // A variance-1 spike among huge components: the integral must still
        // respect the sandwich (a single top-level interval misses the spike).
        let m = GaussianMixture::new(
            vec![0.5, 0.25, 0.25],
            vec![1.0, 1.0e4, 4.0e4],
        )
        .unwrap();
        let h = m.entropy_bits().unwrap();
        let lo = m.entropy_lower_bound();
        let hi = lo + m.label_entropy();
        assert!(h >= lo - 1e-8 && h <= hi + 1e-8, "{lo} <= {h} <= {hi}");
    }

    #[test]
    fn mixture_kurtosis_matches_closed_form() {
        for &beta in &[0.5, 1.0, 2.0] {
            for &gamma in &[1.0, 10.0, 100.0] {
                for &ns in &[1usize, 2] {
                    let mix = mixture_pz(beta, gamma, ns).unwrap();
                    let num = mix.kurtosis();
                    let cf = kurtosis_closed_form(beta, gamma, ns).unwrap();
                    assert!(
                        (num - cf).abs() < 1e-9,
                        "beta {beta} gamma {gamma} ns {ns}: {num} vs {cf}"
                    );
                }
            }
        }
    }

    #[test]
    fn star_curve_below_known_signature_curve() {
        // Not knowing the signatures cannot help the matched filter.
        for &gamma in &[1.0, 10.0] {
            let star = sumf_th_star(1.0, gamma, 1).unwrap();
            let known = sumf_th_known_s(1.0, gamma, 1).unwrap();
            assert!(star <= known + 1e-9, "{star} > {known}");
            assert!(star > 0.0);
        }
    }

    #[test]
    fn eta_min_is_ln2_for_optimum() {
        let v = eta_min_numeric(|g| c_opt_th_ns1(0.7, g), 0.7).unwrap();
        assert!((v - LN_2).abs() < 1e-4, "{v}");
    }

    #[test]
    fn wideband_slopes_match_closed_forms() {
        for &beta in &[0.5, 1.0, 2.0] {
            let s = s0_numeric(|g| c_opt_th_ns1(beta, g)).unwrap();
            assert!((s - s0_opt(beta)).abs() < 0.01 * s0_opt(beta), "{s}");
            let s = s0_numeric(|g| sumf_th_known_s(beta, g, 1)).unwrap();
            assert!((s - s0_sumf(beta)).abs() < 0.01 * s0_sumf(beta), "{s}");
        }
    }

    #[test]
    fn high_snr_slope_of_optimum_is_rank() {
        let beta = 1.0;
        let s = s_inf_numeric(|g| c_opt_th_ns1(beta, g)).unwrap();
        let target = s_inf_opt_th_ns1(beta);
        assert!((s - target).abs() < 0.01 * target, "{s} vs {target}");
    }

    #[test]
    fn power_offset_finite_and_negative_at_unit_load() {
        // At beta = 1 the offset log2(1) - E[log2 k | k >= 1]-ish is < 0.
        let l = l_inf_opt_th_ns1(1.0).unwrap();
        assert!(l < 0.0 && l.is_finite());
    }

    #[test]
    fn ebn0_parametrization_monotone_and_anchored() {
        let gammas: Vec<f64> = (0..60).map(|i| 10f64.powf(-3.0 + 0.1 * i as f64)).collect();
        let pts = ebn0_curve(|g| c_opt_th_ns1(0.5, g), 0.5, &gammas).unwrap();
        assert_eq!(pts.len(), gammas.len());
        // Eb/N0 decreases toward -1.59 dB as gamma -> 0 for the optimum.
        let first = pts.first().unwrap();
        assert!((first.ebn0_db - 10.0 * LN_2.log10()).abs() < 0.05);
        for w in pts.windows(2) {
            assert!(w[1].c >= w[0].c);
        }
    }

    #[test]
    fn gamma_for_ebn0_round_trips() {
        let beta = 0.5;
        for &target in &[-1.0, 3.0, 10.0, 20.0] {
            let g = gamma_for_ebn0(|g| c_opt_th_ns1(beta, g), beta, target).unwrap();
            let c = c_opt_th_ns1(beta, g).unwrap();
            let back = 10.0 * (beta * g / c).log10();
            assert!((back - target).abs() < 1e-9, "{back} vs {target}");
        }
        // Below -1.59 dB nothing is achievable.
        assert!(gamma_for_ebn0(|g| c_opt_th_ns1(beta, g), beta, -3.0).is_err());
    }

    #[test]
    fn ebn0_rejects_decreasing_curves() {
        let gammas = [1.0, 2.0, 3.0];
        let res = ebn0_curve(|g| Ok(1.0 / g), 1.0, &gammas);
        assert!(matches!(res, Err(Error::NonMonotone(_))));
    }
}
