use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rid_rvo::analysis::{self, AnalysisParams};
use rid_rvo::config::ExperimentConfig;
use rid_rvo::remoteid::MessageFormat;
use rid_rvo::report::{format_summary_table, RunReport};
use rid_rvo::separation::pairwise_unmac_from_airframes;
use rid_rvo::sim::{run_monte_carlo, Layout, ScenarioConfig};

const EXIT_USAGE: u8 = 1;
const EXIT_SAFETY: u8 = 2;

/// Remote-ID informed separation analysis and multi-UAV RVO simulation.
#[derive(Parser)]
#[command(name = "rid-rvo", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write separation-component tables (analysis_*.csv).
    Analyze(AnalyzeArgs),
    /// Run Monte Carlo simulations and write report.json and runs.csv.
    Simulate(SimulateArgs),
    /// Print the pairwise MAC / uNMAC breakdown for two UAVs.
    #[command(allow_negative_numbers = true)]
    Separation(SeparationArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Localization error standard deviations, meters.
    #[arg(long = "sigma", value_delimiter = ',', default_values_t = [1.9, 3.5, 4.85, 10.0])]
    sigmas: Vec<f64>,
    /// Broadcast intervals, seconds.
    #[arg(long = "dt", value_delimiter = ',', default_values_t = [0.01, 0.05, 0.1, 0.2, 0.5, 1.0])]
    dts: Vec<f64>,
    /// Speed categories (1-4).
    #[arg(long, value_delimiter = ',', default_values_t = [1usize, 2, 3, 4])]
    categories: Vec<usize>,
    /// Samples per cell of the uNMAC size table.
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Print the quantile and mobility tables as JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct SimulateArgs {
    /// Experiment file (TOML). Without it a default experiment on --layout is run.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Scenario used when no config file is given.
    #[arg(long, value_parser = ["circle8", "square24"], default_value = "circle8")]
    layout: String,
    /// Overrides the number of runs per policy.
    #[arg(long)]
    runs: Option<usize>,
    /// Overrides the policy list, e.g. `standard,candidate2`.
    #[arg(long = "policy", value_delimiter = ',')]
    policies: Option<Vec<MessageFormat>>,
    /// Overrides the seeds: fleet seed = N, noise seed = N + 1.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Print the policy summaries as JSON instead of a table.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct SeparationArgs {
    /// Airframe diameter of UAV i, meters.
    #[arg(long)]
    airframe_i: f64,
    #[arg(long)]
    airframe_j: f64,
    /// Localization error bound of UAV i, meters.
    #[arg(long, default_value_t = 0.0)]
    eps_i: f64,
    #[arg(long, default_value_t = 0.0)]
    eps_j: f64,
    /// Speed of UAV i, m/s.
    #[arg(long, default_value_t = 0.0)]
    speed_i: f64,
    #[arg(long, default_value_t = 0.0)]
    speed_j: f64,
    /// Broadcast interval, seconds.
    #[arg(long, default_value_t = 0.1)]
    dt: f64,
    #[arg(long)]
    json: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Analyze(a) => analyze(a),
        Command::Simulate(a) => simulate(a),
        Command::Separation(a) => separation(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn analyze(a: AnalyzeArgs) -> rid_rvo::Result<ExitCode> {
    let params = AnalysisParams {
        sigmas: a.sigmas,
        dts: a.dts,
        categories: a.categories,
        unmac_samples: a.samples,
        seed: a.seed,
        ..AnalysisParams::default()
    };
    let tables = analysis::analyze(&params)?;
    let paths = analysis::write_tables(&tables, &a.out)?;
    if a.json {
        let doc = serde_json::json!({
            "loc_quantiles": tables.loc_quantiles,
            "mobility": tables.mobility,
            "unmac": tables.unmac,
        });
        println!("{}", serde_json::to_string_pretty(&doc)?);
    } else {
        println!("{:>9} {:>9} {:>9} {:>9}", "sigma_i_m", "sigma_j_m", "mean_m", "q99.9_m");
        for r in tables.loc_quantiles.iter().filter(|r| r.sigma_i == r.sigma_j) {
            println!("{:>9.2} {:>9.2} {:>9.3} {:>9.3}", r.sigma_i, r.sigma_j, r.mean, r.q999);
        }
        println!();
        println!("{:>5} {:>5} {:>6} {:>9} {:>9}", "cat_i", "cat_j", "dt_s", "mean_m", "q99.7_m");
        for r in tables.mobility.iter().filter(|r| r.category_i == r.category_j) {
            println!("{:>5} {:>5} {:>6.2} {:>9.3} {:>9.3}", r.category_i, r.category_j, r.dt, r.mean, r.q997);
        }
        for p in paths {
            eprintln!("wrote {}", p.display());
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn simulate(a: SimulateArgs) -> rid_rvo::Result<ExitCode> {
    let mut cfg = match &a.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => {
            let layout = if a.layout == "square24" { Layout::Square24 } else { Layout::Circle8 };
            ExperimentConfig::new(ScenarioConfig::new(layout))
        }
    };
    if let Some(runs) = a.runs {
        cfg.runs = runs;
    }
    if let Some(policies) = a.policies {
        cfg.policies = policies;
    }
    if let Some(seed) = a.seed {
        cfg.scenario.fleet_seed = seed;
        cfg.scenario.noise_seed = seed.wrapping_add(1);
    }
    cfg.validate()?;

    let mut results = Vec::with_capacity(cfg.policies.len());
    for &policy in &cfg.policies {
        results.push(run_monte_carlo(&cfg.scenario_for(policy), cfg.runs)?);
    }
    let report = RunReport::new(&cfg, &results)?;
    std::fs::create_dir_all(&a.out)?;
    report.write_json(&a.out.join("report.json"))?;
    report.write_runs_csv_file(&a.out.join("runs.csv"))?;

    if a.json {
        println!("{}", serde_json::to_string_pretty(&report.summaries)?);
    } else {
        print!("{}", format_summary_table(&report.summaries));
        eprintln!("wrote {} and {}", a.out.join("report.json").display(), a.out.join("runs.csv").display());
    }
    let violations = report.safety_violations();
    if violations.is_empty() {
        Ok(ExitCode::SUCCESS)
    } else {
        let names: Vec<_> = violations.iter().map(|p| p.name()).collect();
        eprintln!("safety violation: mid-air collisions under {}", names.join(", "));
        Ok(ExitCode::from(EXIT_SAFETY))
    }
}

fn separation(a: SeparationArgs) -> rid_rvo::Result<ExitCode> {
    let b = pairwise_unmac_from_airframes(a.airframe_i, a.airframe_j, a.eps_i, a.eps_j, a.speed_i, a.speed_j, a.dt)?;
    if a.json {
        println!("{}", serde_json::to_string_pretty(&b)?);
    } else {
        println!("MAC radius          {:>10.3} m", b.mac_radius);
        println!("localization term   {:>10.3} m", b.loc_term);
        println!("mobility term       {:>10.3} m", b.mobility_term);
        println!("uNMAC radius        {:>10.3} m", b.unmac_radius);
    }
    Ok(ExitCode::SUCCESS)
}
