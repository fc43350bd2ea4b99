//! Monte Carlo harness: sweeps over (beta, gamma, Eb/N0, N) grids with
//! per-trial derived seeds, so results are bit-identical for a given seed
//! under any thread count, and extendable grids never reshuffle earlier
//! points.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::capacity;
use crate::ensembles::{derive_seed, EnsembleSpec, SpreadingMatrix};
use crate::error::{Error, Result};
use crate::receivers;
use crate::spectra;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Beta,
    Gamma,
    EbN0Db,
    N,
}

impl std::fmt::Display for Axis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Axis::Beta => write!(f, "beta"),
            Axis::Gamma => write!(f, "gamma"),
            Axis::EbN0Db => write!(f, "ebn0_db"),
            Axis::N => write!(f, "n"),
        }
    }
}

/// Statistic computed per realization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Statistic {
    /// Empirical spectral moment m_L.
    EsdMoment(u32),
    /// Normalized rank of SS^T.
    Rank,
    /// (1/N) log2 det(I + gamma SS^T).
    Logdet { gamma: f64 },
    /// Matched-filter conditional mutual information
    /// beta log2(1 + gamma / (1 + sigma gamma)), sigma = sum_{k>=2} rho_1k^2.
    SumfMi { gamma: f64 },
}

impl Statistic {
    pub fn label(&self) -> String {
        match self {
            Statistic::EsdMoment(l) => format!("esd_moment_{l}"),
            Statistic::Rank => "rank".into(),
            Statistic::Logdet { gamma } => format!("logdet_gamma_{gamma}"),
            Statistic::SumfMi { gamma } => format!("sumf_mi_gamma_{gamma}"),
        }
    }
}

/// A sweep protocol: a template ensemble, one swept axis, the statistics to
/// collect, and a master seed.
#[derive(Debug, Clone)]
pub struct Experiment {
    /// Template chip count (overridden by an N axis).
    pub n: usize,
    /// Pulses per symbol.
    pub ns: usize,
    /// Template load (overridden by a beta axis).
    pub beta: f64,
    pub axis: Axis,
    pub grid: Vec<f64>,
    pub trials: usize,
    pub statistics: Vec<Statistic>,
    pub seed: u64,
}

impl Experiment {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidSpec("trials must be >= 1".into()));
        }
        if self.grid.is_empty() {
            return Err(Error::InvalidSpec("empty sweep grid".into()));
        }
        if !self.grid.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidSpec(
                "sweep grid must be strictly increasing".into(),
            ));
        }
        if self.statistics.is_empty() {
            return Err(Error::InvalidSpec("no statistics requested".into()));
        }
        Ok(())
    }

    /// Ensemble at grid point `i` (the swept variable substituted in).
    fn spec_at(&self, x: f64) -> Result<EnsembleSpec> {
        let (n, beta) = match self.axis {
            Axis::Beta => (self.n, x),
            Axis::N => (x.round() as usize, self.beta),
            Axis::Gamma | Axis::EbN0Db => (self.n, self.beta),
        };
        let k = (beta * n as f64).round().max(1.0) as usize;
        // Seed is irrelevant here; per-trial seeds are substituted later.
        EnsembleSpec::th(n, k, self.ns, 0)
    }

    /// Per-point gamma (the swept variable substituted into the statistic).
    fn gamma_at(&self, stat: &Statistic, x: f64) -> Result<Option<f64>> {
        match (stat, self.axis) {
            (Statistic::Logdet { .. }, Axis::Gamma)
            | (Statistic::SumfMi { .. }, Axis::Gamma) => Ok(Some(x)),
            (Statistic::Logdet { .. }, Axis::EbN0Db) => {
                // Map the target Eb/N0 through the asymptotic optimum curve.
                let beta = self.beta;
                let g = capacity::gamma_for_ebn0(
                    |g| capacity::c_opt_th_ns1(beta, g),
                    beta,
                    x,
                )?;
                Ok(Some(g))
            }
            (Statistic::Logdet { gamma }, _) => Ok(Some(*gamma)),
            (Statistic::SumfMi { gamma }, _) => Ok(Some(*gamma)),
            _ => Ok(None),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub x: f64,
    pub mean: f64,
    /// One standard deviation of the per-realization statistic.
    pub std: f64,
    /// Standard error of the mean, std / sqrt(trials).
    pub std_err: f64,
    pub trials: usize,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub label: String,
    pub axis: Axis,
    pub points: Vec<SweepPoint>,
}

fn eval_statistic(
    stat: &Statistic,
    spec: &EnsembleSpec,
    gamma: Option<f64>,
) -> Result<f64> {
    let m = SpreadingMatrix::sample(spec)?;
    match stat {
        Statistic::EsdMoment(l) => spectra::esd_moment(&m, *l),
        Statistic::Rank => spectra::normalized_rank(&m),
        Statistic::Logdet { .. } => spectra::logdet_capacity(&m, gamma.unwrap()),
        Statistic::SumfMi { .. } => {
            let g = gamma.unwrap();
            let sig = receivers::interference_sum_user1(&m);
            Ok(spec.load() * (1.0 + g / (1.0 + sig * g)).log2())
        }
    }
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Runs the experiment: one `SweepResult` per requested statistic. Trial
/// (point i, trial t) uses the derived seed hash(seed, i, t), so the output
/// is a pure function of the experiment under any parallelism.
pub fn run(exp: &Experiment) -> Result<Vec<SweepResult>> {
    exp.validate()?;
    let mut results = Vec::with_capacity(exp.statistics.len());
    for stat in &exp.statistics {
        let mut points = Vec::with_capacity(exp.grid.len());
        for (i, &x) in exp.grid.iter().enumerate() {
            let base = exp.spec_at(x)?;
            let gamma = exp.gamma_at(stat, x)?;
            let values: Vec<f64> = (0..exp.trials)
                .into_par_iter()
                .map(|t| {
                    let spec = base.with_seed(derive_seed(exp.seed, i as u64, t as u64));
                    eval_statistic(stat, &spec, gamma).map_err(|e| {
                        Error::Domain(format!("point {i} trial {t}: {e}"))
                    })
                })
                .collect::<Result<Vec<f64>>>()?;
            let (mean, std) = mean_std(&values);
            points.push(SweepPoint {
                x,
                mean,
                std,
                std_err: std / (exp.trials as f64).sqrt(),
                trials: exp.trials,
            });
        }
        results.push(SweepResult {
            label: stat.label(),
            axis: exp.axis,
            points,
        });
    }
    Ok(results)
}

/// Empirical matched-filter spectral efficiency at one (ensemble, gamma):
/// the mean over realizations of beta log2(1 + gamma / (1 + sigma gamma)).
pub fn empirical_sumf_mi(
    spec: &EnsembleSpec,
    gamma: f64,
    trials: usize,
    seed: u64,
) -> Result<SweepPoint> {
    let exp = Experiment {
        n: spec.n,
        ns: spec.ns,
        beta: spec.load(),
        axis: Axis::Gamma,
        grid: vec![gamma],
        trials,
        statistics: vec![Statistic::SumfMi { gamma }],
        seed,
    };
    Ok(run(&exp)?.remove(0).points.remove(0))
}

/// One draw of the matched-filter output for user 1 with unit noise:
/// Z = sqrt(gamma) sum_{k>=2} rho_1k b_k + n, all symbols circular complex
/// Gaussian. Returns (re, im).
fn sample_interference(
    spec: &EnsembleSpec,
    gamma: f64,
    rng: &mut ChaCha8Rng,
) -> Result<(f64, f64)> {
    let m = SpreadingMatrix::sample(&spec.with_seed(rng.random()))?;
    let root_half = std::f64::consts::FRAC_1_SQRT_2;
    let mut re = 0.0;
    let mut im = 0.0;
    for k in 1..spec.k {
        let rho = m.inner_product(0, k);
        if rho != 0.0 {
            let x: f64 = rng.sample(StandardNormal);
            let y: f64 = rng.sample(StandardNormal);
            re += rho * x * root_half;
            im += rho * y * root_half;
        }
    }
    let nx: f64 = rng.sample(StandardNormal);
    let ny: f64 = rng.sample(StandardNormal);
    let s = gamma.sqrt();
    Ok((s * re + nx * root_half, s * im + ny * root_half))
}

/// Empirical kurtosis E|Z|^4 / (E|Z|^2)^2 of the matched-filter
/// interference-plus-noise output, from `samples` independent draws.
pub fn empirical_interference_kurtosis(
    spec: &EnsembleSpec,
    gamma: f64,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    let chunks = 64usize;
    let per = samples.div_ceil(chunks);
    let sums: Vec<(f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|c| -> Result<(f64, f64)> {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, c as u64, 0));
            let mut m2 = 0.0;
            let mut m4 = 0.0;
            for _ in 0..per {
                let (re, im) = sample_interference(spec, gamma, &mut rng)?;
                let a2 = re * re + im * im;
                m2 += a2;
                m4 += a2 * a2;
            }
            Ok((m2, m4))
        })
        .collect::<Result<Vec<_>>>()?;
    let total = (chunks * per) as f64;
    let m2: f64 = sums.iter().map(|s| s.0).sum::<f64>() / total;
    let m4: f64 = sums.iter().map(|s| s.1).sum::<f64>() / total;
    Ok(m4 / (m2 * m2))
}

/// Histogram of Re(Z) with the matching Gaussian-mixture real-marginal
/// density for side-by-side plotting.
#[derive(Debug, Clone)]
pub struct InterferenceHistogram {
    pub centers: Vec<f64>,
    pub empirical_density: Vec<f64>,
    pub mixture_density: Vec<f64>,
    pub gaussian_density: Vec<f64>,
    pub samples: usize,
    pub empirical_kurtosis: f64,
}

/// Samples Re(Z) into `bins` equal bins over +-4 standard deviations of the
/// moment-matched Gaussian, and evaluates the mixture real marginal
/// sum_k w_k Normal(0, v_k / 2) on the bin centers.
pub fn interference_histogram(
    spec: &EnsembleSpec,
    gamma: f64,
    samples: usize,
    bins: usize,
    seed: u64,
) -> Result<InterferenceHistogram> {
    if bins < 2 {
        return Err(Error::InvalidSpec("need at least 2 bins".into()));
    }
    let beta = spec.load();
    // Real-part variance of the matched Gaussian is (1 + beta gamma) / 2.
    let sigma = ((1.0 + beta * gamma) / 2.0).sqrt();
    let lo = -4.0 * sigma;
    let hi = 4.0 * sigma;
    let width = (hi - lo) / bins as f64;

    let chunks = 64usize;
    let per = samples.div_ceil(chunks);
    let partials: Vec<(Vec<u64>, f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|c| -> Result<(Vec<u64>, f64, f64)> {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, c as u64, 1));
            let mut counts = vec![0u64; bins];
            let mut m2 = 0.0;
            let mut m4 = 0.0;
            for _ in 0..per {
                let (re, im) = sample_interference(spec, gamma, &mut rng)?;
                let a2 = re * re + im * im;
                m2 += a2;
                m4 += a2 * a2;
                if re >= lo && re < hi {
                    counts[((re - lo) / width) as usize] += 1;
                }
            }
            Ok((counts, m2, m4))
        })
        .collect::<Result<Vec<_>>>()?;

    let total = (chunks * per) as f64;
    let mut counts = vec![0u64; bins];
    let mut m2 = 0.0;
    let mut m4 = 0.0;
    for (c, a, b) in partials {
        for (acc, v) in counts.iter_mut().zip(c) {
            *acc += v;
        }
        m2 += a;
        m4 += b;
    }
    m2 /= total;
    m4 /= total;

    let mix = capacity::mixture_pz(beta, gamma, spec.ns)?;
    let mut centers = Vec::with_capacity(bins);
    let mut empirical = Vec::with_capacity(bins);
    let mut mixture = Vec::with_capacity(bins);
    let mut gaussian = Vec::with_capacity(bins);
    let g_var = (1.0 + beta * gamma) / 2.0;
    for (b, &count) in counts.iter().enumerate() {
        let x = lo + (b as f64 + 0.5) * width;
        centers.push(x);
        empirical.push(count as f64 / total / width);
        let mut p = 0.0;
        for (w, v) in mix.weights().iter().zip(mix.variances()) {
            let var = v / 2.0;
            p += w * (-x * x / (2.0 * var)).exp() / (2.0 * std::f64::consts::PI * var).sqrt();
        }
        mixture.push(p);
        gaussian.push(
            (-x * x / (2.0 * g_var)).exp() / (2.0 * std::f64::consts::PI * g_var).sqrt(),
        );
    }
    Ok(InterferenceHistogram {
        centers,
        empirical_density: empirical,
        mixture_density: mixture,
        gaussian_density: gaussian,
        samples: chunks * per,
        empirical_kurtosis: m4 / (m2 * m2),
    })
}

/// Sample variance of m_L at each N in `n_list` (Ns = 1, load beta), plus
/// the decay ratio Var(N) / Var(4N) where both sizes are present.
#[derive(Debug, Clone)]
pub struct VarianceDecayRow {
    pub n: usize,
    pub variance: f64,
}

pub fn moment_variance(
    n: usize,
    beta: f64,
    order: u32,
    trials: usize,
    seed: u64,
) -> Result<VarianceDecayRow> {
    let k = (beta * n as f64).round().max(1.0) as usize;
    let values: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let spec = EnsembleSpec::th(n, k, 1, derive_seed(seed, n as u64, t as u64))?;
            let m = SpreadingMatrix::sample(&spec)?;
            spectra::esd_moment(&m, order)
        })
        .collect::<Result<Vec<f64>>>()?;
    let (_, std) = mean_std(&values);
    Ok(VarianceDecayRow {
        n,
        variance: std * std,
    })
}

pub fn variance_decay_check(
    order: u32,
    beta: f64,
    n_list: &[usize],
    trials: usize,
    seed: u64,
) -> Result<Vec<VarianceDecayRow>> {
    n_list
        .iter()
        .map(|&n| moment_variance(n, beta, order, trials, seed))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn moment_experiment(trials: usize, seed: u64) -> Experiment {
        Experiment {
            n: 40,
            ns: 1,
            beta: 0.5,
            axis: Axis::Beta,
            grid: vec![0.5, 1.0],
            trials,
            statistics: vec![Statistic::EsdMoment(2), Statistic::Rank],
            seed,
        }
    }

    #[test]
    fn run_is_deterministic_across_thread_counts() {
        let exp = moment_experiment(64, 7);
        let a = run(&exp).unwrap();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let b = pool.install(|| run(&exp).unwrap());
        for (ra, rb) in a.iter().zip(&b) {
            assert_eq!(ra.points, rb.points);
        }
    }

    #[test]
    fn grid_extension_preserves_earlier_points() {
        let mut exp = moment_experiment(32, 9);
        let short = run(&exp).unwrap();
        exp.grid.push(1.5);
        let long = run(&exp).unwrap();
        for (rs, rl) in short.iter().zip(&long) {
            for (ps, pl) in rs.points.iter().zip(&rl.points) {
                assert_eq!(ps, pl);
            }
        }
    }

    #[test]
    fn first_moment_has_zero_variance() {
        let row = moment_variance(60, 0.5, 1, 200, 3).unwrap();
        assert_eq!(row.variance, 0.0);
    }

    #[test]
    fn stderr_shrinks_with_trials() {
        let exp1 = moment_experiment(100, 5);
        let mut exp4 = moment_experiment(400, 5);
        exp4.statistics = vec![Statistic::EsdMoment(2)];
        let r1 = run(&exp1).unwrap();
        let r4 = run(&exp4).unwrap();
        let e1 = r1[0].points[0].std_err;
        let e4 = r4[0].points[0].std_err;
        // Quadrupling trials should halve the standard error within 20%.
        assert!((e1 / e4 - 2.0).abs() < 0.4, "{e1} vs {e4}");
    }

    #[test]
    fn single_user_sumf_mi_is_log() {
        // K=1: no interference, so every realization gives log2(1 + gamma)
        // scaled by beta = 1/N.
        let spec = EnsembleSpec::th(8, 1, 1, 0).unwrap();
        let p = empirical_sumf_mi(&spec, 3.0, 50, 1).unwrap();
        assert!((p.mean - 4.0_f64.log2() / 8.0).abs() < 1e-12);
        assert_eq!(p.std, 0.0);
    }

    #[test]
    fn rejects_bad_experiments() {
        let mut exp = moment_experiment(0, 1);
        assert!(run(&exp).is_err());
        exp.trials = 10;
        exp.grid = vec![1.0, 0.5];
        assert!(run(&exp).is_err());
    }

    #[test]
    fn zero_gamma_interference_is_gaussian() {
        let spec = EnsembleSpec::th(20, 20, 1, 0).unwrap();
        let kappa = empirical_interference_kurtosis(&spec, 0.0, 100_000, 11).unwrap();
        assert!((kappa - 2.0).abs() < 0.05, "{kappa}");
    }

    #[test]
    fn histogram_density_integrates_to_one() {
        let spec = EnsembleSpec::th(32, 32, 1, 0).unwrap();
        let h = interference_histogram(&spec, 4.0, 50_000, 60, 2).unwrap();
        let width = h.centers[1] - h.centers[0];
        let mass: f64 = h.empirical_density.iter().sum::<f64>() * width;
        assert!(mass > 0.95 && mass <= 1.0, "{mass}");
        let mix_mass: f64 = h.mixture_density.iter().sum::<f64>() * width;
        assert!(mix_mass > 0.95 && mix_mass <= 1.0, "{mix_mass}");
    }
}
