use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use metricreg::gop::{estimate_gop, BandwidthSchedule, Dataset, Kernel};
use metricreg::harness::compare::{compare, CompareConfig};
use metricreg::harness::generator::{generate, oracle_info, GeneratorSpec};
use metricreg::harness::io::{
    read_dataset_file, write_compare_csv, write_dataset_file, write_json, write_outcomes,
    write_phased_outcomes,
};
use metricreg::harness::regret::{evaluate_regret, fit_loglog_slope};
use metricreg::harness::validators::{
    monotonicity_trials, lipschitz_trials, packing_trials, volumetric_trials, ValidationSummary,
    VolumetricSettings,
};
use metricreg::phased::{run_phased, EstimationWindow, PhaseClock, PhasedConfig};
use metricreg::{run_sequence, LabeledExample, Metric, SymMatrix};

const OUTCOME_COLUMNS: &str = "\
Outcome CSV columns (one row per round):
  t           1-based round index
  y           observed label
  prediction  learner prediction before seeing y
  loss        (prediction - y)^2
  cum_loss    running sum of loss
  n_centers   centers in the current packing (current phase for learned runs)
  rho_t       effective rank used for the radius at round t
  epsilon_t   radius used at round t
  new_center  true when x_t opened a new center
  phase       phase index (learned runs only)";

#[derive(Parser)]
#[command(name = "metricreg", version, about = "Online nonparametric regression in a learned Mahalanobis metric")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a synthetic dataset (CSV x_1..x_d,y) and optionally its oracle description.
    GenData {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        out: PathBuf,
        /// Write the true f0 description, G and sup-norms as JSON.
        #[arg(long)]
        oracle: Option<PathBuf>,
    },
    /// Run the online regressor with a fixed metric.
    #[command(after_help = OUTCOME_COLUMNS)]
    RunFixed {
        /// Matrix JSON file ({"dim":d,"rows":[...]}) or `identity`.
        #[arg(long, default_value = "identity")]
        metric: String,
        #[command(flatten)]
        data: DataArgs,
        /// Read examples from a dataset CSV instead of sampling them.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Summary JSON (final loss, centers, regret when the generator is known).
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Run the phased learner that re-estimates the metric every phase.
    #[command(after_help = OUTCOME_COLUMNS)]
    RunLearned {
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        #[command(flatten)]
        bandwidth: BandwidthArgs,
        #[arg(long, value_enum, default_value_t = WindowArg::Cumulative)]
        window: WindowArg,
        #[arg(long, value_enum, default_value_t = ClockArg::Local)]
        clock: ClockArg,
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Per-phase diagnostics JSON.
        #[arg(long)]
        diag: Option<PathBuf>,
    },
    /// Estimate the gradient outer product of a dataset CSV.
    EstimateGop {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        bandwidth: BandwidthArgs,
        /// Matrix JSON output.
        #[arg(long)]
        out: PathBuf,
        /// Diagnostics JSON (eps_n, tau_n, mask rate, ...).
        #[arg(long)]
        diag: Option<PathBuf>,
    },
    /// Numerically check one of the packing / Lipschitz / monotonicity lemmas.
    /// Exits with status 1 if any trial fails.
    Validate {
        /// 1 volumetric packing, 2 ellipsoid packing, 3 Lipschitz, 5 monotonicity.
        #[arg(long)]
        lemma: u8,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Report JSON; printed to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Identity vs oracle vs learned metric on shared streams.
    Compare {
        /// JSON file with either a generator spec or {"generator": ..., "phased": ..., "oracle_floor": ...}.
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value_t = 1 << 14)]
        rounds: usize,
        /// Seed count N (seeds 0..N) or a comma-separated list.
        #[arg(long, default_value = "10")]
        seeds: String,
        /// Directory for compare.csv and summary.json.
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
}

#[derive(Args, Clone)]
struct DataArgs {
    /// Generator: single-index, multi-index, additive, constant, or a spec JSON path.
    #[arg(long, default_value = "single-index")]
    generator: String,
    #[arg(long, default_value_t = 3)]
    dim: usize,
    #[arg(long, default_value_t = 4096)]
    rounds: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.05)]
    noise: f64,
}

#[derive(Args, Clone)]
struct BandwidthArgs {
    #[arg(long, default_value_t = 1.0)]
    c_eps: f64,
    #[arg(long, default_value_t = 1.0)]
    c_tau: f64,
    #[arg(long, default_value_t = 1.0)]
    tau0: f64,
    /// Bandwidth decay exponent; defaults to the slowest admissible rate.
    #[arg(long)]
    rate: Option<f64>,
    #[arg(long, value_enum, default_value_t = KernelArg::Triangular)]
    kernel: KernelArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum KernelArg {
    Triangular,
    Epanechnikov,
}

#[derive(Clone, Copy, ValueEnum)]
enum WindowArg {
    Cumulative,
    PhaseOnly,
}

#[derive(Clone, Copy, ValueEnum)]
enum ClockArg {
    Local,
    Global,
}

impl BandwidthArgs {
    fn schedule(&self) -> BandwidthSchedule {
        BandwidthSchedule {
            c_eps: self.c_eps,
            c_tau: self.c_tau,
            tau0: self.tau0,
            rate: self.rate,
            kernel: match self.kernel {
                KernelArg::Triangular => Kernel::Triangular,
                KernelArg::Epanechnikov => Kernel::Epanechnikov,
            },
        }
    }
}

fn generator_spec(args: &DataArgs) -> Result<GeneratorSpec> {
    let d = args.dim;
    let spec = match args.generator.as_str() {
        "single-index" => GeneratorSpec::single_index(d, args.noise, args.seed),
        "constant" => GeneratorSpec::constant(d, args.seed),
        "multi-index" => {
            if d < 2 {
                bail!("multi-index needs --dim ≥ 2");
            }
            let mut s = GeneratorSpec::single_index(d, args.noise, args.seed);
            s.kind = metricreg::harness::generator::GeneratorKind::MultiIndex;
            let mut e1 = vec![0.0; d];
            let mut e2 = vec![0.0; d];
            e1[0] = 1.0;
            e2[1] = 1.0;
            s.projector = vec![e1, e2];
            s
        }
        "additive" => {
            let mut s = GeneratorSpec::single_index(d, args.noise, args.seed);
            s.kind = metricreg::harness::generator::GeneratorKind::Additive;
            s.projector.clear();
            s
        }
        path => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("unknown generator `{path}` and no such file"))?;
            // The file's noise level wins; the seed always comes from --seed.
            let mut s: GeneratorSpec = serde_json::from_str(&text)?;
            s.seed = args.seed;
            return s.validate().map(|_| s).map_err(Into::into);
        }
    };
    spec.validate()?;
    Ok(spec)
}

/// Stream from --input, or sampled from the generator (with its spec).
fn load_stream(data: &DataArgs, input: &Option<PathBuf>) -> Result<(Vec<LabeledExample>, Option<GeneratorSpec>)> {
    match input {
        Some(p) => Ok((read_dataset_file(p)?, None)),
        None => {
            let spec = generator_spec(data)?;
            Ok((metricreg::harness::generator::generate_stream(&spec, data.rounds), Some(spec)))
        }
    }
}

fn load_metric(arg: &str, dim: usize) -> Result<Metric> {
    if arg == "identity" {
        return Ok(Metric::identity(dim));
    }
    let text = std::fs::read_to_string(arg).with_context(|| format!("reading metric {arg}"))?;
    let m: SymMatrix = serde_json::from_str(&text)?;
    if m.dim() != dim {
        bail!("metric has dimension {} but data has {dim}", m.dim());
    }
    Ok(metricreg::spectral_normalize(&m)?)
}

fn csv_out(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?))
}

fn parse_seeds(s: &str) -> Result<Vec<u64>> {
    if s.contains(',') {
        s.split(',').map(|v| Ok(v.trim().parse()?)).collect()
    } else {
        Ok((0..s.trim().parse::<u64>()?).collect())
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::GenData { data, out, oracle } => {
            let spec = generator_spec(&data)?;
            let (examples, info) = generate(&spec, data.rounds)?;
            write_dataset_file(&out, &examples)?;
            if let Some(p) = oracle {
                write_json(&p, &info)?;
            }
        }
        Command::RunFixed { metric, data, input, out, summary } => {
            let (stream, spec) = load_stream(&data, &input)?;
            let dim = stream.first().map_or(data.dim, |e| e.x.len());
            let metric = load_metric(&metric, dim)?;
            let outcomes = run_sequence(&metric, &stream)?;
            write_outcomes(csv_out(&out)?, &stream, &outcomes)?;
            if let Some(p) = summary {
                let mut s = serde_json::json!({
                    "rounds": stream.len(),
                    "cumulative_loss": outcomes.iter().map(|o| o.loss).sum::<f64>(),
                    "n_centers": outcomes.iter().filter(|o| o.new_center_created).count(),
                    "metric_eigenvalues": metric.eigenvalues(),
                });
                if let Some(spec) = spec {
                    let oracle = oracle_info(&spec)?;
                    let trace = evaluate_regret(&outcomes, &oracle, &stream, &metric)?;
                    s["final_regret"] = trace.final_regret().into();
                    s["regret_slope"] = serde_json::to_value(fit_loglog_slope(&trace.cumulative))?;
                }
                write_json(&p, &s)?;
            }
        }
        Command::RunLearned { alpha, bandwidth, window, clock, data, input, out, diag } => {
            let (stream, _) = load_stream(&data, &input)?;
            let mut config = PhasedConfig::default();
            config.regularization.alpha = alpha;
            config.bandwidth = bandwidth.schedule();
            config.window = match window {
                WindowArg::Cumulative => EstimationWindow::Cumulative,
                WindowArg::PhaseOnly => EstimationWindow::PhaseOnly,
            };
            config.clock = match clock {
                ClockArg::Local => PhaseClock::Local,
                ClockArg::Global => PhaseClock::Global,
            };
            let run = run_phased(&stream, &config)?;
            write_phased_outcomes(csv_out(&out)?, &stream, &run.outcomes)?;
            if let Some(p) = diag {
                write_json(&p, &serde_json::json!({ "config": config, "phases": run.phases }))?;
            }
        }
        Command::EstimateGop { input, bandwidth, out, diag } => {
            let examples = read_dataset_file(&input)?;
            let data = Dataset::from_examples(&examples)?;
            let est = estimate_gop(&data, &bandwidth.schedule())?;
            write_json(&out, &est.matrix)?;
            if let Some(p) = diag {
                write_json(&p, &est.diagnostics())?;
            }
        }
        Command::Validate { lemma, trials, seed, out } => {
            let summary: ValidationSummary = match lemma {
                1 => volumetric_trials(trials, VolumetricSettings::default(), seed),
                2 => packing_trials(trials, 1 << 12, seed)?,
                3 => lipschitz_trials(trials, 10_000, seed),
                5 => monotonicity_trials(trials, 1e4, seed),
                other => bail!("no validator for lemma {other}; choose 1, 2, 3 or 5"),
            };
            match out {
                Some(p) => write_json(&p, &summary)?,
                None => println!("{}", serde_json::to_string_pretty(&summary)?),
            }
            eprintln!(
                "lemma {}: {}/{} trials passed",
                summary.lemma,
                summary.trials - summary.failures,
                summary.trials
            );
            return Ok(summary.pass);
        }
        Command::Compare { spec, rounds, seeds, out_dir } => {
            let text = std::fs::read_to_string(&spec)
                .with_context(|| format!("reading {}", spec.display()))?;
            let value: serde_json::Value = serde_json::from_str(&text)?;
            let seeds = parse_seeds(&seeds)?;
            let config = if value.get("generator").is_some() {
                let mut c: CompareConfig = serde_json::from_value(serde_json::json!({
                    "generator": value["generator"],
                    "rounds": rounds,
                    "seeds": seeds,
                    "phased": value.get("phased").cloned().unwrap_or(serde_json::json!(PhasedConfig::default())),
                    "oracle_floor": value.get("oracle_floor").cloned().unwrap_or(serde_json::Value::Null),
                }))?;
                c.rounds = rounds;
                c
            } else {
                CompareConfig {
                    generator: serde_json::from_value(value)?,
                    rounds,
                    seeds,
                    phased: PhasedConfig::default(),
                    oracle_floor: None,
                }
            };
            let report = compare(&config)?;
            std::fs::create_dir_all(&out_dir)?;
            write_compare_csv(csv_out(&out_dir.join("compare.csv"))?, &report)?;
            let summary = serde_json::json!({
                "config": report.config,
                "oracle_gop_eigenvalues": report.oracle_gop_eigenvalues,
                "oracle_metric_eigenvalues": report.oracle_metric_eigenvalues,
                "summary": report.summary,
                "rho_trajectories": report.records.iter().map(|r| serde_json::json!({
                    "seed": r.seed, "mode": r.mode, "trajectory": r.rho_trajectory,
                })).collect::<Vec<_>>(),
            });
            write_json(&out_dir.join("summary.json"), &summary)?;
            for s in &report.summary {
                println!(
                    "{:<9} median regret {:>10.4}  slope {:>7}  centers {:>8.1}  angle {:>7}",
                    s.mode.name(),
                    s.median_final_regret,
                    s.median_slope.map_or("-".into(), |v| format!("{v:.3}")),
                    s.median_centers,
                    s.median_angle_deg.map_or("-".into(), |v| format!("{v:.2}")),
                );
            }
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
