//! Limit laws for the eigenvalue spectrum: the Poisson-type law of sparse
//! hopping (Ns fixed as N grows) and the Marchenko-Pastur law of
//! direct-sequence spreading, plus the combinatorial moment tables that
//! connect them.

use crate::error::{Error, Result};
use crate::quad;

/// Largest moment order with exact integer tables.
pub const L_MAX: usize = 20;

/// Stirling numbers of the second kind {L, l} for 0 <= l <= L <= L_MAX,
/// and Narayana numbers for the Marchenko-Pastur moments.
#[derive(Debug, Clone)]
pub struct MomentTable {
    stirling2: Vec<Vec<i128>>,
    narayana: Vec<Vec<i128>>,
}

impl MomentTable {
    pub fn new() -> Self {
        let mut stirling2 = vec![vec![0i128; L_MAX + 1]; L_MAX + 1];
        stirling2[0][0] = 1;
        for l in 1..=L_MAX {
            for j in 1..=l {
                stirling2[l][j] = j as i128 * stirling2[l - 1][j] + stirling2[l - 1][j - 1];
            }
        }
        // Narayana N(L, l) = (1/L) C(L, l) C(L, l-1), 1 <= l <= L.
        let mut binom = vec![vec![0i128; L_MAX + 2]; L_MAX + 2];
        for i in 0..=L_MAX + 1 {
            binom[i][0] = 1;
            for j in 1..=i {
                binom[i][j] = binom[i - 1][j - 1] + binom[i - 1][j];
            }
        }
        let mut narayana = vec![vec![0i128; L_MAX + 1]; L_MAX + 1];
        for l in 1..=L_MAX {
            for j in 1..=l {
                narayana[l][j] = binom[l][j] * binom[l][j - 1] / l as i128;
            }
        }
        MomentTable {
            stirling2,
            narayana,
        }
    }

    pub fn stirling2(&self, l: usize, j: usize) -> Result<i128> {
        if l > L_MAX || j > L_MAX {
            return Err(Error::MomentOrder {
                order: l.max(j),
                l_max: L_MAX,
            });
        }
        Ok(self.stirling2[l][j])
    }

    pub fn narayana(&self, l: usize, j: usize) -> Result<i128> {
        if l > L_MAX || j > L_MAX {
            return Err(Error::MomentOrder {
                order: l.max(j),
                l_max: L_MAX,
            });
        }
        Ok(self.narayana[l][j])
    }

    /// Asymptotic moment of the sparse-hopping spectrum: the Bell polynomial
    /// sum_l {L, l} beta^l (the L-th moment of a Poisson(beta) variable).
    pub fn poisson_moment(&self, beta: f64, order: usize) -> Result<f64> {
        if order > L_MAX {
            return Err(Error::MomentOrder {
                order,
                l_max: L_MAX,
            });
        }
        let mut acc = 0.0;
        let mut pow = 1.0;
        for l in 0..=order {
            acc += self.stirling2[order][l] as f64 * pow;
            pow *= beta;
        }
        Ok(acc)
    }

    /// Moment of the Marchenko-Pastur law with ratio beta:
    /// sum_l N(L, l) beta^l.
    pub fn mp_moment(&self, beta: f64, order: usize) -> Result<f64> {
        if order > L_MAX {
            return Err(Error::MomentOrder {
                order,
                l_max: L_MAX,
            });
        }
        if order == 0 {
            return Ok(1.0);
        }
        let mut acc = 0.0;
        let mut pow = beta;
        for l in 1..=order {
            acc += self.narayana[order][l] as f64 * pow;
            pow *= beta;
        }
        Ok(acc)
    }

    /// Exact finite-size mean E[m_L] for the Ns = 1 ensemble with N chips and
    /// K users: sum_l {L, l} K!/(K-l)! N^{-l} (falling factorial in K).
    pub fn expected_moment_finite(&self, n: usize, k: usize, order: usize) -> Result<f64> {
        if order > L_MAX {
            return Err(Error::MomentOrder {
                order,
                l_max: L_MAX,
            });
        }
        let mut acc = 0.0;
        let mut falling = 1.0;
        let mut n_pow = 1.0;
        for l in 0..=order {
            acc += self.stirling2[order][l] as f64 * falling / n_pow;
            if l < order {
                if k < l + 1 {
                    break; // falling factorial hits zero
                }
                falling *= (k - l) as f64;
                n_pow *= n as f64;
            }
        }
        Ok(acc)
    }
}

impl Default for MomentTable {
    fn default() -> Self {
        Self::new()
    }
}

/// Truncated Poisson(lambda) pmf with a tail mass below 1e-12, evaluated in
/// the log domain for stability at large lambda.
#[derive(Debug, Clone)]
pub struct PoissonLaw {
    pub lambda: f64,
    pmf: Vec<f64>,
}

/// log k! via a running sum; exact enough for the k ranges used here.
fn ln_factorials(upto: usize) -> Vec<f64> {
    let mut v = Vec::with_capacity(upto + 1);
    let mut acc = 0.0;
    v.push(0.0);
    for k in 1..=upto {
        acc += (k as f64).ln();
        v.push(acc);
    }
    v
}

impl PoissonLaw {
    pub fn new(lambda: f64) -> Result<Self> {
        Self::with_tail(lambda, 1e-12)
    }

    /// Truncation with an explicit tail-mass tolerance, for uses where the
    /// summand grows with k (mixture fourth moments, entropies).
    pub fn with_tail(lambda: f64, tail_tol: f64) -> Result<Self> {
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(Error::Domain(format!(
                "Poisson rate must be finite and >= 0, got {lambda}"
            )));
        }
        if lambda == 0.0 {
            return Ok(PoissonLaw {
                lambda,
                pmf: vec![1.0],
            });
        }
        // Generous upper bound, then trim to the smallest k with a small tail.
        let hard_max = (lambda + 14.0 * lambda.sqrt() + 40.0).ceil() as usize;
        let lnf = ln_factorials(hard_max);
        let ln_lambda = lambda.ln();
        let mut pmf = Vec::with_capacity(hard_max + 1);
        let mut cum = 0.0;
        let mut k_end = hard_max;
        for (k, &lf) in lnf.iter().enumerate() {
            let p = (k as f64 * ln_lambda - lambda - lf).exp();
            pmf.push(p);
            cum += p;
            if 1.0 - cum < tail_tol {
                k_end = k;
                break;
            }
        }
        pmf.truncate(k_end + 1);
        Ok(PoissonLaw { lambda, pmf })
    }

    /// pmf values f_0 .. f_kmax (tail below 1e-12 dropped).
    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    pub fn k_max(&self) -> usize {
        self.pmf.len() - 1
    }

    /// sum_k f_k g(k) over the retained support.
    pub fn expect<F: Fn(usize) -> f64>(&self, g: F) -> f64 {
        self.pmf
            .iter()
            .enumerate()
            .map(|(k, p)| p * g(k))
            .sum()
    }
}

/// Marchenko-Pastur law with ratio beta and unit variance: an atom of mass
/// (1 - beta)^+ at zero plus the density
/// sqrt((u+ - x)(x - u-)) / (2 pi x) on [u-, u+], u+- = (1 +- sqrt(beta))^2.
#[derive(Debug, Clone, Copy)]
pub struct MarchenkoPasturLaw {
    pub beta: f64,
}

impl MarchenkoPasturLaw {
    pub fn new(beta: f64) -> Result<Self> {
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(Error::Domain(format!(
                "Marchenko-Pastur ratio must be positive, got {beta}"
            )));
        }
        Ok(MarchenkoPasturLaw { beta })
    }

    pub fn atom_at_zero(&self) -> f64 {
        (1.0 - self.beta).max(0.0)
    }

    pub fn support(&self) -> (f64, f64) {
        let s = self.beta.sqrt();
        ((1.0 - s) * (1.0 - s), (1.0 + s) * (1.0 + s))
    }

    /// Continuous part of the density.
    pub fn density(&self, x: f64) -> f64 {
        let (lo, hi) = self.support();
        if x <= lo || x >= hi || x <= 0.0 {
            return 0.0;
        }
        ((hi - x) * (x - lo)).sqrt() / (2.0 * std::f64::consts::PI * x)
    }

    /// Integral of g against the full law (atom + continuous part).
    ///
    /// The continuous part is mapped through the smoothstep substitution
    /// x(t) = u- + (u+ - u-)(3t^2 - 2t^3), whose vanishing derivative at the
    /// endpoints cancels the square-root edge singularities (and, at
    /// beta = 1, the 1/sqrt(x) blow-up at the origin).
    pub fn expect<F: Fn(f64) -> f64>(&self, g: F, abs_tol: f64) -> Result<f64> {
        let (lo, hi) = self.support();
        let width = hi - lo;
        let integrand = |t: f64| {
            let s = t * t * (3.0 - 2.0 * t);
            let x = lo + width * s;
            let dx = width * 6.0 * t * (1.0 - t);
            self.density(x) * g(x) * dx
        };
        let cont = quad::integrate(integrand, 0.0, 1.0, abs_tol)?;
        Ok(self.atom_at_zero() * g(0.0) + cont)
    }
}
