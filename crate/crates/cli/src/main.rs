//! `wicksell`: section-law tabulation, simulation, tail-index estimation and
//! verification from the command line.
//!
//! Exit status: 0 on success (and, for `verify`, when every row passes),
//! 1 on failure or failing rows, 2 on usage errors.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use wicksell_core::evt::{local_tail_exponent, reciprocal_hill, TailModel, DEFAULT_S_LIST};
use wicksell_core::simulate::{sample_section_radii, simulate_planar_section_3d, SampleMode};
use wicksell_core::transform::{load_cdf_table, moment, tabulate_section_law, GridSpec};
use wicksell_core::verify::{
    render_report, run_scenario, Scenario, VerificationReport, VerifyConfig, DEFAULT_ALPHAS, DEFAULT_ETAS,
};
use wicksell_core::{LawSpec, RadiusLawF64, WicksellError};

/// Flags of the law grammar; everything else after `--law` ends the spec.
const LAW_FLAGS: [&str; 6] = ["--alpha", "--rho", "--lambda", "--eta0", "--c", "--inner"];

#[derive(Parser)]
#[command(name = "wicksell", version, about = "Wicksell section laws and their lower tails")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate the section CDF and density of a radius law.
    Transform(TransformArgs),
    /// Draw section radii by Monte Carlo.
    Simulate(SimulateArgs),
    /// Estimate the lower-tail index of a tabulated law or a sample.
    TailIndex(TailIndexArgs),
    /// Run verification scenarios and write a JSON report.
    Verify(VerifyArgs),
    /// Render a saved report.
    Report(ReportArgs),
}

#[derive(Args)]
struct TransformArgs {
    /// Radius law, e.g. `power --alpha 0.5`.
    #[arg(long)]
    law: String,
    /// Codimension r = n − k.
    #[arg(long)]
    r: u32,
    #[arg(long, default_value_t = GridSpec::default().min_fraction)]
    grid_min: f64,
    #[arg(long, default_value_t = GridSpec::default().points)]
    points: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    law: String,
    #[arg(long)]
    r: u32,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    seed: u64,
    /// `analytic` or `geometric3d` (the latter needs r = 1; n is then the expected hit count).
    #[arg(long, default_value = "analytic")]
    mode: String,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct TailIndexArgs {
    /// Table written by `transform` (local-exponent estimate).
    #[arg(long, conflicts_with_all = ["samples", "k"])]
    table: Option<PathBuf>,
    /// Sample written by `simulate` (reciprocal Hill estimate).
    #[arg(long, requires = "k")]
    samples: Option<PathBuf>,
    #[arg(long)]
    eta: f64,
    #[arg(long)]
    k: Option<usize>,
    /// Print the full estimate as JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    scenario: String,
    #[arg(long, value_delimiter = ',')]
    alphas: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    etas: Option<Vec<f64>>,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Record this timestamp in the report metadata (omitted by default so
    /// that reports are reproducible byte for byte).
    #[arg(long)]
    timestamp: Option<String>,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    format: String,
}

/// Joins the tokens of a `--law` spec into one argument so that its own
/// flags are not taken for command flags.
fn gather_law(args: Vec<String>) -> Vec<String> {
    let mut out = Vec::with_capacity(args.len());
    let mut it = args.into_iter().peekable();
    while let Some(arg) = it.next() {
        if arg != "--law" {
            out.push(arg);
            continue;
        }
        // kind, then (flag value)* pairs; `--inner` is followed by a nested kind.
        let mut spec: Vec<String> = it.next().into_iter().collect();
        while it.peek().is_some_and(|t| LAW_FLAGS.contains(&t.as_str())) {
            spec.push(it.next().unwrap());
            spec.extend(it.next());
        }
        out.push(format!("--law={}", spec.join(" ")));
    }
    out
}

fn build_law(text: &str) -> anyhow::Result<RadiusLawF64> {
    Ok(LawSpec::parse(text)?.build()?)
}

fn transform(a: TransformArgs) -> anyhow::Result<()> {
    let law = build_law(&a.law)?;
    let spec = GridSpec { min_fraction: a.grid_min, points: a.points };
    let table = tabulate_section_law(&law, a.r, spec)?;
    table.check_invariants().context("tabulated section law failed its checks")?;
    let side = table.write(&a.out)?;
    println!("wrote {} rows to {} (sidecar {})", table.grid.len(), a.out.display(), side.display());
    Ok(())
}

fn simulate(a: SimulateArgs) -> anyhow::Result<()> {
    let law = build_law(&a.law)?;
    let sample = match a.mode.parse::<SampleMode>()? {
        SampleMode::Analytic => sample_section_radii(&law, a.r, a.n, a.seed)?,
        SampleMode::Geometric3d => {
            if a.r != 1 {
                return Err(WicksellError::Usage("geometric3d mode cuts 3D spheres with a plane, so r must be 1".into()).into());
            }
            // Unit intensity in a slab that just contains every sphere hitting
            // the plane, with a window sized for about n hits.
            let half_thickness = law.upper_support();
            let window_area = a.n as f64 / (2.0 * moment(&law, 1)?);
            simulate_planar_section_3d(&law, 1.0, half_thickness, window_area, a.seed)?
        }
    };
    let side = sample.write(&a.out)?;
    println!("wrote {} values to {} (sidecar {})", sample.values.len(), a.out.display(), side.display());
    Ok(())
}

fn tail_index(a: TailIndexArgs) -> anyhow::Result<()> {
    let estimate = match (&a.table, &a.samples, a.k) {
        (Some(path), None, _) => {
            let table = load_cdf_table::<f64>(path)?;
            local_tail_exponent(|x| table.cdf(x), a.eta, &DEFAULT_S_LIST, 2.0, TailModel::LogCorrected)?
        }
        (None, Some(path), Some(k)) => {
            let xs = wicksell_core::simulate::load_samples::<f64>(path)?;
            reciprocal_hill(&xs, a.eta, k)?
        }
        _ => return Err(WicksellError::Usage("give either --table, or --samples with --k".into()).into()),
    };
    if a.json {
        println!("{}", serde_json::to_string_pretty(&estimate)?);
    } else {
        match estimate.stderr {
            Some(se) => println!("beta_hat = {:.6} (stderr {se:.6}, {})", estimate.beta_hat, estimate.method),
            None => println!("beta_hat = {:.6} ({})", estimate.beta_hat, estimate.method),
        }
        if estimate.ill_conditioned {
            println!("warning: local slopes are not monotone in s; the estimate is ill-conditioned");
        }
    }
    Ok(())
}

fn verify(a: VerifyArgs) -> anyhow::Result<bool> {
    let scenario: Scenario = a.scenario.parse()?;
    let mut config = VerifyConfig::with_seed(a.seed);
    config.timestamp = a.timestamp;
    let alphas = a.alphas.unwrap_or_else(|| DEFAULT_ALPHAS.to_vec());
    let etas = a.etas.unwrap_or_else(|| DEFAULT_ETAS.to_vec());
    let report = run_scenario(scenario, &alphas, &etas, &config);
    std::fs::write(&a.out, render_report(&report, "json")?)
        .with_context(|| format!("writing {}", a.out.display()))?;
    let passed = report.rows.iter().filter(|r| r.pass).count();
    println!("{passed}/{} rows pass; report written to {}", report.rows.len(), a.out.display());
    for row in report.rows.iter().filter(|r| !r.pass) {
        let detail = row.error.clone().unwrap_or_else(|| format!("estimate {:?}", row.estimate));
        println!("FAIL {} {} r={} {}: {detail}", row.scenario, row.law, row.r, row.quantity);
    }
    Ok(report.all_pass())
}

fn report(a: ReportArgs) -> anyhow::Result<()> {
    let text = std::fs::read_to_string(&a.input).with_context(|| format!("reading {}", a.input.display()))?;
    let report: VerificationReport = serde_json::from_str(&text).context("parsing report")?;
    print!("{}", render_report(&report, &a.format)?);
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    match cli.command {
        Command::Transform(a) => transform(a).map(|_| true),
        Command::Simulate(a) => simulate(a).map(|_| true),
        Command::TailIndex(a) => tail_index(a).map(|_| true),
        Command::Verify(a) => verify(a),
        Command::Report(a) => report(a).map(|_| true),
    }
}

fn is_usage(err: &anyhow::Error) -> bool {
    err.chain().any(|e| {
        matches!(
            e.downcast_ref::<WicksellError>(),
            Some(WicksellError::Usage(_) | WicksellError::Parse(_))
        )
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse_from(gather_law(std::env::args().collect())) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if is_usage(&e) { 2 } else { 1 })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(s: &str) -> Vec<String> {
        s.split_whitespace().map(String::from).collect()
    }

    #[test]
    fn law_tokens_are_joined() {
        assert_eq!(
            gather_law(args("w transform --law power --alpha 0.5 --r 1 --out t.csv")),
            args("w transform").into_iter().chain(["--law=power --alpha 0.5".to_string()]).chain(args("--r 1 --out t.csv")).collect::<Vec<_>>()
        );
        let nested = gather_law(args("w simulate --law shifted --eta0 0.5 --inner power --alpha 2 --n 5"));
        assert_eq!(nested[2], "--law=shifted --eta0 0.5 --inner power --alpha 2");
        assert_eq!(&nested[3..], &args("--n 5")[..]);
        assert_eq!(gather_law(args("w x --law uniform --r 2"))[2], "--law=uniform");
    }

    #[test]
    fn parsed_flags() {
        let cli = Cli::try_parse_from(gather_law(args("w verify --scenario theorem1 --alphas 0.5,1 --seed 3 --out r.json")))
            .unwrap();
        match cli.command {
            Command::Verify(v) => assert_eq!(v.alphas, Some(vec![0.5, 1.0])),
            _ => panic!("wrong command"),
        }
        assert!(Cli::try_parse_from(args("w tail-index --table a.csv --samples b.csv --eta 0 --k 3")).is_err());
    }
}
