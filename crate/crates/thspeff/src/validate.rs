//! Fast self-check suites behind `validate`: each check compares an
//! observed quantity against an independent expectation and reports a
//! machine-readable verdict.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::LN_2;

use crate::capacity;
use crate::ensembles::{derive_seed, EnsembleSpec, SpreadingMatrix};
use crate::error::{Error, Result};
use crate::laws::MomentTable;
use crate::montecarlo::{self, Axis, Experiment, Statistic};
use crate::receivers::{self, LinearFrontEnd};

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub observed: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    fn abs(name: impl Into<String>, observed: f64, expected: f64, tolerance: f64) -> Self {
        let pass = (observed - expected).abs() <= tolerance;
        Check {
            name: name.into(),
            observed,
            expected,
            tolerance,
            pass,
        }
    }

    /// Upper-bound check: observed must not exceed expected + tolerance.
    fn upper(name: impl Into<String>, observed: f64, expected: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            observed,
            expected,
            tolerance,
            pass: observed <= expected + tolerance,
        }
    }
}

pub const SUITES: [&str; 5] = ["moments", "rank", "receivers", "entropy", "slopes"];

fn moments_suite(seed: u64) -> Result<Vec<Check>> {
    let table = MomentTable::new();
    let exp = Experiment {
        n: 100,
        ns: 1,
        beta: 0.5,
        axis: Axis::Beta,
        grid: vec![0.5],
        trials: 400,
        statistics: vec![
            Statistic::EsdMoment(1),
            Statistic::EsdMoment(2),
            Statistic::EsdMoment(3),
        ],
        seed,
    };
    let res = montecarlo::run(&exp)?;
    let mut checks = Vec::new();
    for (l, sweep) in res.iter().enumerate() {
        let order = l + 1;
        let p = &sweep.points[0];
        let expected = table.expected_moment_finite(100, 50, order)?;
        let tol = if order == 1 { 0.0 } else { 3.0 * p.std_err };
        checks.push(Check::abs(
            format!("moment_m{order}_mean_vs_finite_formula"),
            p.mean,
            expected,
            tol,
        ));
    }
    checks.push(Check::abs(
        "finite_formula_n2_k2_l2",
        table.expected_moment_finite(2, 2, 2)?,
        1.5,
        0.0,
    ));
    Ok(checks)
}

fn rank_suite(seed: u64) -> Result<Vec<Check>> {
    let grid: Vec<f64> = (1..=5).map(|i| 0.4 * i as f64).collect();
    let exp = Experiment {
        n: 50,
        ns: 1,
        beta: 1.0,
        axis: Axis::Beta,
        grid: grid.clone(),
        trials: 200,
        statistics: vec![Statistic::Rank],
        seed,
    };
    let res = montecarlo::run(&exp)?;
    let mut checks = Vec::new();
    for p in &res[0].points {
        checks.push(Check::abs(
            format!("rank_ns1_beta_{}", p.x),
            p.mean,
            1.0 - (-p.x).exp(),
            0.02,
        ));
    }
    let exp2 = Experiment {
        ns: 2,
        ..exp
    };
    let res2 = montecarlo::run(&exp2)?;
    for p in &res2[0].points {
        let bound = p.x.min(1.0 - (-2.0 * p.x).exp());
        checks.push(Check::upper(
            format!("rank_ns2_upper_bound_beta_{}", p.x),
            p.mean,
            bound,
            2.0 * p.std,
        ));
    }
    Ok(checks)
}

fn receivers_suite(seed: u64) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fronts = [
        LinearFrontEnd::new(0.0, 1.0)?,
        LinearFrontEnd::new(1.0, 1e-6)?,
        LinearFrontEnd::new(1.0, 0.1)?,
        LinearFrontEnd::new(1.0, 1.0)?,
    ];
    let mut worst_gain = 0.0f64;
    let mut worst_noise = 0.0f64;
    for _ in 0..25 {
        let n = rng.random_range(2..=16);
        let k = rng.random_range(1..=2 * n);
        let spec = EnsembleSpec::th(n, k, 1, rng.random())?;
        let m = SpreadingMatrix::sample(&spec)?;
        for fe in &fronts {
            let gc = receivers::gain_closed_form(&m, fe)?;
            let gd = receivers::gain_direct(&m, fe)?;
            worst_gain = worst_gain.max(gc.max_abs_diff(&gd));
            let cc = receivers::noise_cov_closed_form(&m, fe)?;
            let cd = receivers::noise_cov_direct(&m, fe)?;
            worst_noise = worst_noise.max(cc.max_abs_diff(&cd));
        }
    }
    Ok(vec![
        Check::abs("gain_closed_vs_direct_max_abs", worst_gain, 0.0, 1e-10),
        Check::abs("noise_cov_closed_vs_direct_max_abs", worst_noise, 0.0, 1e-10),
    ])
}

fn entropy_suite(seed: u64) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for (i, &v) in [0.5, 1.0, 100.0].iter().enumerate() {
        let mix = capacity::GaussianMixture::new(vec![1.0], vec![v])?;
        checks.push(Check::abs(
            format!("single_gaussian_entropy_{i}"),
            mix.entropy_bits()?,
            capacity::gaussian_entropy_bits(v),
            1e-8,
        ));
    }
    // Sandwich h_G <= h <= h_G + h_P on random mixtures.
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, 1, 0));
    let mut worst_below = 0.0f64;
    let mut worst_above = 0.0f64;
    for _ in 0..10 {
        let parts = rng.random_range(2..=6);
        let mut w: Vec<f64> = (0..parts).map(|_| rng.random_range(0.05..1.0)).collect();
        let mass: f64 = w.iter().sum();
        for x in w.iter_mut() {
            *x /= mass;
        }
        let v: Vec<f64> = (0..parts)
            .map(|_| 10f64.powf(rng.random_range(-1.0..4.0)))
            .collect();
        let mix = capacity::GaussianMixture::new(w, v)?;
        let h = mix.entropy_bits()?;
        let lo = mix.entropy_lower_bound();
        let hi = lo + mix.label_entropy();
        worst_below = worst_below.max(lo - h);
        worst_above = worst_above.max(h - hi);
    }
    checks.push(Check::abs("sandwich_lower_violation", worst_below, 0.0, 1e-8));
    checks.push(Check::abs("sandwich_upper_violation", worst_above, 0.0, 1e-8));
    // Quadrature kurtosis of the interference mixture vs closed form.
    for &(beta, gamma, ns) in &[(0.5, 10.0, 1usize), (1.0, 100.0, 2), (2.0, 1.0, 1)] {
        let mix = capacity::mixture_pz(beta, gamma, ns)?;
        checks.push(Check::abs(
            format!("mixture_kurtosis_beta_{beta}_gamma_{gamma}_ns{ns}"),
            mix.kurtosis(),
            capacity::kurtosis_closed_form(beta, gamma, ns)?,
            1e-6,
        ));
    }
    Ok(checks)
}

fn slopes_suite(_seed: u64) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for &beta in &[0.5, 1.0, 2.0] {
        let eta = capacity::eta_min_numeric(|g| capacity::c_opt_th_ns1(beta, g), beta)?;
        checks.push(Check::abs(
            format!("eta_min_opt_beta_{beta}"),
            eta,
            LN_2,
            1e-3,
        ));
        let s0 = capacity::s0_numeric(|g| capacity::c_opt_th_ns1(beta, g))?;
        let s0_cf = capacity::s0_opt(beta);
        checks.push(Check::abs(
            format!("s0_opt_beta_{beta}"),
            s0,
            s0_cf,
            0.01 * s0_cf,
        ));
        let sinf = capacity::s_inf_numeric(|g| capacity::c_opt_th_ns1(beta, g))?;
        let sinf_cf = capacity::s_inf_opt_th_ns1(beta);
        checks.push(Check::abs(
            format!("s_inf_opt_beta_{beta}"),
            sinf,
            sinf_cf,
            0.01 * sinf_cf,
        ));
    }
    for &ns in &[1usize, 2] {
        let beta = 0.5;
        let eta = capacity::eta_min_numeric(
            |g| capacity::sumf_th_known_s(beta, g, ns),
            beta,
        )?;
        checks.push(Check::abs(
            format!("eta_min_sumf_ns{ns}"),
            eta,
            LN_2,
            1e-3,
        ));
        let sinf = capacity::s_inf_numeric(|g| capacity::sumf_th_known_s(beta, g, ns))?;
        let cf = capacity::s_inf_sumf_th(beta, ns);
        checks.push(Check::abs(
            format!("s_inf_sumf_ns{ns}"),
            sinf,
            cf,
            0.02 * cf,
        ));
    }
    Ok(checks)
}

/// Runs one suite, or all of them for `"all"`.
pub fn run_suite(suite: &str, seed: u64) -> Result<Vec<Check>> {
    match suite {
        "moments" => moments_suite(seed),
        "rank" => rank_suite(seed),
        "receivers" => receivers_suite(seed),
        "entropy" => entropy_suite(seed),
        "slopes" => slopes_suite(seed),
        "all" => {
            let mut all = Vec::new();
            for s in SUITES {
                all.extend(run_suite(s, seed)?);
            }
            Ok(all)
        }
        other => Err(Error::InvalidSpec(format!(
            "unknown suite '{other}'; expected one of moments, rank, receivers, entropy, slopes, all"
        ))),
    }
}
