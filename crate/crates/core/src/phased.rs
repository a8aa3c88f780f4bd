//! Doubling-phase metric learning.
//!
//! Phase i has n(i) = 2^i rounds and ends at round T(i) = 2^{i+1} − 2. During a
//! phase the online regressor runs under the normalized metric built at the end
//! of the previous phase; at each boundary the gradient outer product is
//! re-estimated, regularized by γ̄_{T(i)} I, normalized and handed to a freshly
//! restarted regressor.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gop::{estimate_gop, BandwidthSchedule, Dataset, GopEstimate};
use crate::linalg::{spectral_normalize, Metric, SymMatrix};
use crate::regressor::{LabeledExample, OnlineRegressor, StepOutcome};
use crate::spectral::effective_rank;

/// n(i) = 2^i, for i ≥ 1.
pub fn phase_length(i: usize) -> usize {
    1usize << i
}

/// T(i) = 2^{i+1} − 2, the last round of phase i (T(0) = 0).
pub fn phase_end(i: usize) -> usize {
    (1usize << (i + 1)) - 2
}

/// Phase containing the 1-based round t.
pub fn phase_of_round(t: usize) -> usize {
    assert!(t >= 1);
    // T(i−1) < t ≤ T(i)  ⇔  2^i ≤ t + 1 < 2^{i+1}
    (usize::BITS - 1 - (t + 1).leading_zeros()) as usize
}

/// γ̄_0 = 1, γ̄_t = t^{−α}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegularizationSchedule {
    pub alpha: f64,
}

impl Default for RegularizationSchedule {
    fn default() -> Self {
        RegularizationSchedule { alpha: 0.5 }
    }
}

impl RegularizationSchedule {
    pub fn gamma_bar(&self, t: usize) -> f64 {
        if t == 0 {
            1.0
        } else {
            (t as f64).powf(-self.alpha)
        }
    }
}

/// Normalized M̂ = Ĝ + γ̄ I.
pub fn build_metric(gop: &SymMatrix, gamma_bar: f64) -> Result<Metric> {
    if !(gamma_bar > 0.0) {
        return Err(Error::Domain(format!("regularization {gamma_bar} must be > 0")));
    }
    spectral_normalize(&gop.shifted(gamma_bar))
}

/// Which rounds feed the phase-end estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimationWindow {
    /// Every example seen so far (Ĝ(i) = Ĝ_{T(i)}).
    #[default]
    Cumulative,
    /// Only the examples of the phase that just ended.
    PhaseOnly,
}

/// Which clock drives ε_t inside a phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseClock {
    /// Restarted learner counts t = 1..n(i).
    #[default]
    Local,
    /// ε_t uses the global round index.
    Global,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PhasedConfig {
    pub regularization: RegularizationSchedule,
    pub bandwidth: BandwidthSchedule,
    #[serde(default)]
    pub window: EstimationWindow,
    #[serde(default)]
    pub clock: PhaseClock,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseDiagnostics {
    pub phase: usize,
    /// First and last global rounds played in this phase.
    pub start: usize,
    pub end: usize,
    pub complete: bool,
    /// Eigenvalues of the metric used during the phase.
    pub metric_eigenvalues: Vec<f64>,
    /// Effective rank of that metric at the phase's final local round.
    pub rho_end: usize,
    pub n_centers: usize,
    pub cumulative_loss: f64,
    /// Present when the phase completed and a new metric was estimated.
    pub estimate: Option<PhaseEstimate>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseEstimate {
    /// γ̄(i) = γ̄_{T(i)}
    pub gamma_bar: f64,
    pub gop: GopEstimate,
    /// Eigenvalues of M̂(i) = Ĝ(i) + γ̄(i) I before normalization.
    pub raw_eigenvalues: Vec<f64>,
    /// Eigenvectors of M̂(i), aligned with `raw_eigenvalues`.
    pub eigenvectors: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhasedOutcome {
    pub phase: usize,
    pub outcome: StepOutcome,
}

/// Streaming phased learner.
#[derive(Debug, Clone)]
pub struct PhasedLearner {
    config: PhasedConfig,
    phase: usize,
    round: usize,
    phase_start: usize,
    history: Dataset,
    inner: OnlineRegressor,
    phase_loss: f64,
    diagnostics: Vec<PhaseDiagnostics>,
}

impl PhasedLearner {
    pub fn new(dim: usize, config: PhasedConfig) -> Result<Self> {
        config.bandwidth.validate(dim)?;
        if !(config.regularization.alpha > 0.0) {
            return Err(Error::Domain("alpha must be positive".into()));
        }
        // M̂(0) = γ̄_0 I normalizes to the identity.
        let metric = build_metric(&SymMatrix::zeros(dim), config.regularization.gamma_bar(0))?;
        Ok(PhasedLearner {
            config,
            phase: 1,
            round: 0,
            phase_start: 1,
            history: Dataset::new(dim),
            inner: OnlineRegressor::new(metric),
            phase_loss: 0.0,
            diagnostics: Vec::new(),
        })
    }

    pub fn phase(&self) -> usize {
        self.phase
    }

    pub fn round(&self) -> usize {
        self.round
    }

    pub fn metric(&self) -> &Metric {
        self.inner.metric()
    }

    pub fn inner(&self) -> &OnlineRegressor {
        &self.inner
    }

    pub fn diagnostics(&self) -> &[PhaseDiagnostics] {
        &self.diagnostics
    }

    pub fn step(&mut self, example: &LabeledExample) -> Result<PhasedOutcome> {
        let phase = self.phase;
        let outcome = self.inner.step(example).map_err(|e| Error::AtPhase {
            phase,
            round: self.round + 1,
            source: Box::new(e),
        })?;
        self.round += 1;
        self.phase_loss += outcome.loss;
        self.history.push(&example.x, example.y)?;
        if self.round == phase_end(phase) {
            self.close_phase(true)?;
        }
        Ok(PhasedOutcome { phase, outcome })
    }

    fn phase_record(&self, complete: bool) -> PhaseDiagnostics {
        let local = self.inner.round().max(1);
        let offset = match self.config.clock {
            PhaseClock::Local => 0,
            PhaseClock::Global => self.phase_start - 1,
        };
        PhaseDiagnostics {
            phase: self.phase,
            start: self.phase_start,
            end: self.round,
            complete,
            metric_eigenvalues: self.inner.metric().eigenvalues().to_vec(),
            rho_end: effective_rank(self.inner.profile(), (offset + local) as f64)
                .expect("valid horizon"),
            n_centers: self.inner.centers().len(),
            cumulative_loss: self.phase_loss,
            estimate: None,
        }
    }

    fn close_phase(&mut self, complete: bool) -> Result<()> {
        let mut record = self.phase_record(complete);
        if complete {
            let window;
            let data = match self.config.window {
                EstimationWindow::Cumulative => &self.history,
                EstimationWindow::PhaseOnly => {
                    window = self.history.slice(self.phase_start - 1..self.round);
                    &window
                }
            };
            let gop = estimate_gop(data, &self.config.bandwidth)?;
            let gamma_bar = self.config.regularization.gamma_bar(self.round);
            let metric = build_metric(&gop.matrix, gamma_bar)?;
            let raw = crate::linalg::eig_sym(&gop.matrix.shifted(gamma_bar))?;
            record.estimate = Some(PhaseEstimate {
                gamma_bar,
                gop,
                raw_eigenvalues: raw.values,
                eigenvectors: raw.vectors,
            });
            self.phase += 1;
            self.phase_start = self.round + 1;
            let offset = match self.config.clock {
                PhaseClock::Local => 0,
                PhaseClock::Global => self.round,
            };
            self.inner = OnlineRegressor::with_clock_offset(metric, offset);
            self.phase_loss = 0.0;
        }
        self.diagnostics.push(record);
        Ok(())
    }

    /// Ends the run; a partially played phase is recorded without re-estimation.
    pub fn finish(mut self) -> Result<Vec<PhaseDiagnostics>> {
        if self.round >= self.phase_start {
            self.close_phase(false)?;
        }
        Ok(self.diagnostics)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhasedRun {
    pub outcomes: Vec<PhasedOutcome>,
    pub phases: Vec<PhaseDiagnostics>,
}

impl PhasedRun {
    /// Normalized metric eigenvectors/eigenvalues of the last completed estimate.
    pub fn last_estimate(&self) -> Option<&PhaseEstimate> {
        self.phases.iter().rev().find_map(|p| p.estimate.as_ref())
    }
}

pub fn run_phased(stream: &[LabeledExample], config: &PhasedConfig) -> Result<PhasedRun> {
    let dim = stream.first().map_or(1, |e| e.x.len());
    let mut learner = PhasedLearner::new(dim, *config)?;
    let outcomes = stream
        .iter()
        .map(|ex| learner.step(ex))
        .collect::<Result<Vec<_>>>()?;
    Ok(PhasedRun {
        outcomes,
        phases: learner.finish()?,
    })
}

/// Checks μ_j ≤ μ̂_j + γ̄ ≤ μ_j + 2γ̄ for every j, given true eigenvalues μ
/// and the phase estimate. Returns `None` when ‖Ĝ − G‖₂ > γ̄ (premise fails).
pub fn eigenvalue_sandwich(
    truth: &SymMatrix,
    estimate: &PhaseEstimate,
) -> Result<SandwichCheck> {
    let err = estimate.gop.matrix.sub(truth)?.spectral_norm()?;
    let mu = crate::linalg::eig_sym(truth)?.values;
    let g = estimate.gamma_bar;
    let premise = err <= g;
    let holds = mu
        .iter()
        .zip(&estimate.raw_eigenvalues)
        .all(|(&m, &est)| m <= est + 1e-12 && est <= m + 2.0 * g + 1e-12);
    Ok(SandwichCheck {
        estimation_error: err,
        gamma_bar: g,
        premise,
        holds,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SandwichCheck {
    pub estimation_error: f64,
    pub gamma_bar: f64,
    pub premise: bool,
    pub holds: bool,
}

impl SandwichCheck {
    /// True unless the premise holds and the inequality does not.
    pub fn passes(&self) -> bool {
        !self.premise || self.holds
    }
}
