//! Identity vs oracle vs learned metric on a common set of streams.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::generator::{generate_stream, oracle_info, GeneratorSpec, OracleInfo};
use super::regret::{evaluate_regret, fit_loglog_slope};
use crate::error::Result;
use crate::linalg::{principal_angle_deg, Metric};
use crate::phased::{build_metric, run_phased, PhasedConfig};
use crate::regressor::StepOutcome;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Identity,
    Oracle,
    Learned,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::Identity, Mode::Oracle, Mode::Learned];

    pub fn name(self) -> &'static str {
        match self {
            Mode::Identity => "identity",
            Mode::Oracle => "oracle",
            Mode::Learned => "learned",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareConfig {
    pub generator: GeneratorSpec,
    pub rounds: usize,
    /// Stream seeds; each replaces `generator.seed`.
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub phased: PhasedConfig,
    /// Ridge added to G/μ₁ for the oracle metric; `None` uses γ̄_T.
    #[serde(default)]
    pub oracle_floor: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub mode: Mode,
    pub seed: u64,
    pub final_regret: f64,
    pub slope: Option<f64>,
    pub n_centers: usize,
    pub final_rho: usize,
    /// (t, ρ used at round t) for t = 1, 2, 4, …, and t = T.
    pub rho_trajectory: Vec<(usize, usize)>,
    /// Largest angle between a top-k metric eigenvector and span(B).
    pub principal_angle_deg: Option<f64>,
    pub cumulative_regret: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeSummary {
    pub mode: Mode,
    pub median_final_regret: f64,
    pub median_slope: Option<f64>,
    pub median_centers: f64,
    pub median_angle_deg: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CompareReport {
    pub config: CompareConfig,
    pub oracle_gop_eigenvalues: Vec<f64>,
    pub oracle_metric_eigenvalues: Vec<f64>,
    pub records: Vec<RunRecord>,
    pub summary: Vec<ModeSummary>,
}

impl CompareReport {
    pub fn summary_for(&self, mode: Mode) -> &ModeSummary {
        self.summary.iter().find(|s| s.mode == mode).expect("all modes summarized")
    }

    pub fn records_for(&self, mode: Mode) -> impl Iterator<Item = &RunRecord> {
        self.records.iter().filter(move |r| r.mode == mode)
    }
}

pub fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let n = values.len();
    Some(if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    })
}

/// normalize(G + floor·μ₁ I). Without an explicit floor this is γ̄_T, the
/// regularization the learned metric has reached by round T.
pub fn oracle_metric(oracle: &OracleInfo, config: &CompareConfig) -> Result<Metric> {
    let mu1 = oracle.gop_eigenvalues.first().copied().unwrap_or(0.0);
    match config.oracle_floor {
        Some(f) if mu1 > 0.0 => build_metric(&oracle.gop, f * mu1),
        Some(f) => build_metric(&oracle.gop, f),
        None => build_metric(&oracle.gop, config.phased.regularization.gamma_bar(config.rounds)),
    }
}

fn max_angle(vectors: &[Vec<f64>], k: usize, projector: &[Vec<f64>]) -> Option<f64> {
    if projector.is_empty() || k == 0 {
        return None;
    }
    vectors[..k]
        .iter()
        .map(|v| principal_angle_deg(v, projector))
        .reduce(f64::max)
}

fn rho_trajectory(outcomes: &[StepOutcome]) -> Vec<(usize, usize)> {
    let t_max = outcomes.len();
    let mut pts: Vec<usize> = std::iter::successors(Some(1usize), |t| t.checked_mul(2))
        .take_while(|&t| t <= t_max)
        .collect();
    if pts.last() != Some(&t_max) && t_max > 0 {
        pts.push(t_max);
    }
    pts.into_iter()
        .map(|t| (t, outcomes[t - 1].effective_rank_used))
        .collect()
}

fn run_one(
    mode: Mode,
    seed: u64,
    config: &CompareConfig,
    oracle: &OracleInfo,
    fixed: &Metric,
) -> Result<RunRecord> {
    let spec = config.generator.with_seed(seed);
    let stream = generate_stream(&spec, config.rounds);
    let projector = &config.generator.projector;
    let k = projector.len();
    let (outcomes, metric, n_centers, angle) = match mode {
        Mode::Identity | Mode::Oracle => {
            let metric = if mode == Mode::Identity {
                Metric::identity(spec.dim)
            } else {
                fixed.clone()
            };
            let mut learner = crate::regressor::OnlineRegressor::new(metric.clone());
            let outcomes = stream
                .iter()
                .map(|ex| learner.step(ex))
                .collect::<Result<Vec<_>>>()?;
            let angle = max_angle(&metric.spectrum().vectors, k, projector);
            (outcomes, metric, learner.centers().len(), angle)
        }
        Mode::Learned => {
            let run = run_phased(&stream, &config.phased)?;
            let n_centers = run.phases.iter().map(|p| p.n_centers).sum();
            let angle = run
                .last_estimate()
                .and_then(|e| max_angle(&e.eigenvectors, k, projector));
            let metric = match run.last_estimate() {
                Some(e) => build_metric(&e.gop.matrix, e.gamma_bar)?,
                None => Metric::identity(spec.dim),
            };
            let outcomes: Vec<StepOutcome> = run.outcomes.into_iter().map(|o| o.outcome).collect();
            (outcomes, metric, n_centers, angle)
        }
    };
    let trace = evaluate_regret(&outcomes, oracle, &stream, &metric)?;
    Ok(RunRecord {
        mode,
        seed,
        final_regret: trace.final_regret(),
        slope: fit_loglog_slope(&trace.cumulative).map(|f| f.slope),
        n_centers,
        final_rho: outcomes.last().map_or(0, |o| o.effective_rank_used),
        rho_trajectory: rho_trajectory(&outcomes),
        principal_angle_deg: angle,
        cumulative_regret: trace.cumulative,
    })
}

/// Runs every (seed, mode) pair in parallel; records are sorted by seed then mode.
pub fn compare(config: &CompareConfig) -> Result<CompareReport> {
    let oracle = oracle_info(&config.generator)?;
    let fixed = oracle_metric(&oracle, config)?;
    let jobs: Vec<(u64, Mode)> = config
        .seeds
        .iter()
        .flat_map(|&s| Mode::ALL.into_iter().map(move |m| (s, m)))
        .collect();
    let mut records = jobs
        .par_iter()
        .map(|&(seed, mode)| run_one(mode, seed, config, &oracle, &fixed))
        .collect::<Result<Vec<_>>>()?;
    records.sort_by_key(|r| (r.seed, r.mode));

    let summary = Mode::ALL
        .into_iter()
        .map(|mode| {
            let rs: Vec<&RunRecord> = records.iter().filter(|r| r.mode == mode).collect();
            let mut regret: Vec<f64> = rs.iter().map(|r| r.final_regret).collect();
            let mut slope: Vec<f64> = rs.iter().filter_map(|r| r.slope).collect();
            let mut centers: Vec<f64> = rs.iter().map(|r| r.n_centers as f64).collect();
            let mut angle: Vec<f64> = rs.iter().filter_map(|r| r.principal_angle_deg).collect();
            ModeSummary {
                mode,
                median_final_regret: median(&mut regret).unwrap_or(f64::NAN),
                median_slope: median(&mut slope),
                median_centers: median(&mut centers).unwrap_or(f64::NAN),
                median_angle_deg: median(&mut angle),
            }
        })
        .collect();

    Ok(CompareReport {
        config: config.clone(),
        oracle_gop_eigenvalues: oracle.gop_eigenvalues.clone(),
        oracle_metric_eigenvalues: fixed.eigenvalues().to_vec(),
        records,
        summary,
    })
}
