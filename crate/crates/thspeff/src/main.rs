// `!(x > 0.0)` validation rejects NaN as well as nonpositive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use thspeff::ensembles::EnsembleSpec;
use thspeff::error::Error;
use thspeff::figures::{self, FigureOptions};
use thspeff::output;
use thspeff::{capacity, validate};

#[derive(Parser)]
#[command(
    name = "thspeff",
    version,
    about = "Spectral efficiency of random time-hopping vs direct-sequence CDMA: \
             closed-form curves, ensemble sampling, and Monte Carlo cross-checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit the CSV data behind one figure (ids 2-11), one file per curve.
    Figure(FigureArgs),
    /// Evaluate a named capacity/MI formula on a point or grid.
    Curve(CurveArgs),
    /// Sample a spreading matrix and dump it as sparse CSV.
    Ensemble(EnsembleArgs),
    /// Run a self-check suite; JSON-lines report, nonzero exit on failure.
    Validate(ValidateArgs),
}

#[derive(Args)]
struct FigureArgs {
    /// Figure id (2-11).
    id: u32,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    ns: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// X-axis grid override as lo:hi:step.
    #[arg(long)]
    grid: Option<String>,
    /// Output directory for the CSV files.
    #[arg(long, default_value = "figures")]
    out: PathBuf,
}

#[derive(Args)]
struct CurveArgs {
    /// Formula name: c_opt_th_ns1, c_opt_ds, sumf_ds, sumf_th_knownS,
    /// sumf_th_star, sumf_th_dense_limit, deco_ds, mmse_ds, linear_th_ns1,
    /// orthogonal.
    name: String,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    /// Single SNR point (linear).
    #[arg(long)]
    gamma: Option<f64>,
    /// Single Eb/N0 point in dB (solved back to gamma through the formula).
    #[arg(long)]
    ebn0_db: Option<f64>,
    /// Gamma grid as lo:hi:step (linear spacing).
    #[arg(long)]
    grid: Option<String>,
    #[arg(long, default_value_t = 1)]
    ns: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EnsembleArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    #[arg(long, default_value_t = 1)]
    ns: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    /// Suite: moments, rank, receivers, entropy, slopes, or all.
    suite: String,
    #[arg(long, default_value_t = 12345)]
    seed: u64,
    /// Also write the JSON-lines report to this file.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_grid(s: &str) -> Result<Vec<f64>, Error> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::InvalidSpec(format!(
            "grid must be lo:hi:step, got '{s}'"
        )));
    }
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| {
            p.parse::<f64>()
                .map_err(|_| Error::InvalidSpec(format!("bad grid number '{p}'")))
        })
        .collect::<Result<_, _>>()?;
    let (lo, hi, step) = (nums[0], nums[1], nums[2]);
    if !(step > 0.0) || hi < lo {
        return Err(Error::InvalidSpec(format!(
            "grid needs hi >= lo and step > 0, got '{s}'"
        )));
    }
    let count = ((hi - lo) / step).round() as usize + 1;
    Ok((0..count)
        .map(|i| lo + step * i as f64)
        .filter(|x| *x <= hi + 1e-9 * step)
        .collect())
}

type Formula = Box<dyn Fn(f64) -> Result<f64, Error>>;

fn lookup_formula(name: &str, beta: f64, ns: usize) -> Result<Formula, Error> {
    let f: Formula = match name {
        "c_opt_th_ns1" => Box::new(move |g| capacity::c_opt_th_ns1(beta, g)),
        "c_opt_ds" => Box::new(move |g| capacity::c_opt_ds(beta, g)),
        "sumf_ds" => Box::new(move |g| capacity::sumf_ds(beta, g)),
        "sumf_th_knownS" => Box::new(move |g| capacity::sumf_th_known_s(beta, g, ns)),
        "sumf_th_star" => Box::new(move |g| capacity::sumf_th_star(beta, g, ns)),
        "sumf_th_dense_limit" => Box::new(move |g| capacity::sumf_th_dense_limit(beta, g)),
        "deco_ds" => Box::new(move |g| capacity::deco_ds(beta, g)),
        "mmse_ds" => Box::new(move |g| capacity::mmse_ds(beta, g)),
        "linear_th_ns1" => Box::new(move |g| capacity::linear_th_ns1(beta, g)),
        "orthogonal" => Box::new(move |g| capacity::orthogonal(beta, g)),
        other => {
            return Err(Error::InvalidSpec(format!(
                "unknown formula '{other}'; see `thspeff curve --help` for the list"
            )))
        }
    };
    Ok(f)
}

fn run_figure(args: &FigureArgs) -> Result<(), Error> {
    let opt = FigureOptions {
        beta: args.beta,
        gamma: args.gamma,
        n: args.n,
        ns: args.ns,
        trials: args.trials,
        grid: args.grid.as_deref().map(parse_grid).transpose()?,
        seed: args.seed,
    };
    let curves = figures::figure(args.id, &opt)?;
    for c in &curves {
        let path = args.out.join(format!("fig{}_{}.csv", args.id, c.name));
        output::write_atomic(&path, &output::curve_to_csv(c))?;
        println!("{}", path.display());
    }
    Ok(())
}

fn run_curve(args: &CurveArgs) -> Result<(), Error> {
    let f = lookup_formula(&args.name, args.beta, args.ns)?;
    let beta = args.beta;
    let given = [
        args.gamma.is_some(),
        args.ebn0_db.is_some(),
        args.grid.is_some(),
    ]
    .iter()
    .filter(|b| **b)
    .count();
    if given != 1 {
        return Err(Error::InvalidSpec(
            "give exactly one of --gamma, --ebn0-db, --grid".into(),
        ));
    }
    let gammas: Vec<f64> = if let Some(g) = args.gamma {
        vec![g]
    } else if let Some(db) = args.ebn0_db {
        vec![capacity::gamma_for_ebn0(&f, beta, db)?]
    } else {
        parse_grid(args.grid.as_deref().unwrap())?
    };

    let mut rows = Vec::with_capacity(gammas.len());
    for &g in &gammas {
        let c = f(g)?;
        let ebn0 = if c > 0.0 {
            10.0 * (beta * g / c).log10()
        } else {
            f64::NAN
        };
        rows.push(vec![g, ebn0, c]);
    }
    let curve = figures::Curve {
        name: args.name.clone(),
        tag: format!("formula-{}", args.name),
        meta: vec![
            ("beta".into(), format!("{beta}")),
            ("ns".into(), format!("{}", args.ns)),
            ("seed".into(), format!("{}", args.seed)),
        ],
        columns: vec!["gamma", "ebn0_db", "c"],
        rows,
    };
    let csv = output::curve_to_csv(&curve);
    match &args.out {
        Some(path) => {
            output::write_atomic(path, &csv)?;
            println!("{}", path.display());
        }
        None => print!("{csv}"),
    }
    Ok(())
}

fn run_ensemble(args: &EnsembleArgs) -> Result<(), Error> {
    let k = (args.beta * args.n as f64).round().max(1.0) as usize;
    let spec = EnsembleSpec::th(args.n, k, args.ns, args.seed)?;
    let m = thspeff::ensembles::SpreadingMatrix::sample(&spec)?;
    let nh = m.nh();
    let mut rows = Vec::new();
    for (user, pulses) in m.nonzero_positions().iter().enumerate() {
        for p in pulses {
            rows.push(vec![
                user as f64,
                p.block as f64,
                p.chip(nh) as f64,
                p.sign(),
            ]);
        }
    }
    let curve = figures::Curve {
        name: "ensemble".into(),
        tag: "ensemble-sample".into(),
        meta: vec![
            ("n".into(), format!("{}", args.n)),
            ("k".into(), format!("{k}")),
            ("ns".into(), format!("{}", args.ns)),
            ("amplitude".into(), format!("{}", m.amplitude())),
            ("seed".into(), format!("{}", args.seed)),
        ],
        columns: vec!["user", "block", "chip", "sign"],
        rows,
    };
    let csv = output::curve_to_csv(&curve);
    match &args.out {
        Some(path) => {
            output::write_atomic(path, &csv)?;
            println!("{}", path.display());
        }
        None => print!("{csv}"),
    }
    Ok(())
}

/// Ok(true) when every check passed.
fn run_validate(args: &ValidateArgs) -> Result<bool, Error> {
    let checks = validate::run_suite(&args.suite, args.seed)?;
    let mut report = String::new();
    for c in &checks {
        let line = serde_json::to_string(c)
            .map_err(|e| Error::Domain(format!("report serialization: {e}")))?;
        println!("{line}");
        report.push_str(&line);
        report.push('\n');
    }
    if let Some(path) = &args.out {
        output::write_atomic(path, &report)?;
    }
    Ok(checks.iter().all(|c| c.pass))
}

fn configure_threads() -> Result<(), Error> {
    if let Ok(v) = std::env::var("THSPEFF_THREADS") {
        let threads: usize = v.parse().map_err(|_| {
            Error::InvalidSpec(format!("THSPEFF_THREADS must be a positive integer, got '{v}'"))
        })?;
        if threads == 0 {
            return Err(Error::InvalidSpec(
                "THSPEFF_THREADS must be a positive integer".into(),
            ));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Error::Domain(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        // Bad arguments / preconditions on user-supplied values.
        Error::InvalidSpec(_) | Error::Domain(_) => 2,
        // Everything else is a numerical or I/O failure.
        _ => 3,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let outcome = match &cli.command {
        Command::Figure(args) => run_figure(args).map(|_| true),
        Command::Curve(args) => run_curve(args).map(|_| true),
        Command::Ensemble(args) => run_ensemble(args).map(|_| true),
        Command::Validate(args) => run_validate(args),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
