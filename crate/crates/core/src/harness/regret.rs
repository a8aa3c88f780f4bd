//! Regret against the true regression function and log-log slope fits.

use serde::{Deserialize, Serialize};

use super::generator::OracleInfo;
use crate::error::{Error, Result};
use crate::linalg::Metric;
use crate::regressor::{LabeledExample, StepOutcome};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegretTrace {
    /// ℓ_t(f₀(x_t)) = (f₀(x_t) − y_t)²
    pub comparator_loss: Vec<f64>,
    pub learner_loss: Vec<f64>,
    /// R_t = Σ_{s≤t} (learner − comparator)
    pub cumulative: Vec<f64>,
    /// (1 + L)·t^{ρ_t/(1+ρ_t)}, shape reference only.
    pub envelope: Vec<f64>,
    /// L = √(Σ_i ‖∇_{u_i} f₀‖²_∞ / λ_i) for the metric supplied.
    pub lipschitz: f64,
}

impl RegretTrace {
    pub fn final_regret(&self) -> f64 {
        self.cumulative.last().copied().unwrap_or(0.0)
    }

    /// Largest deviation between `cumulative` and a fresh summation.
    pub fn recomputation_error(&self) -> f64 {
        let mut acc = 0.0;
        self.learner_loss
            .iter()
            .zip(&self.comparator_loss)
            .zip(&self.cumulative)
            .map(|((l, c), r)| {
                acc += l - c;
                (acc - r).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// M-Lipschitz constant of f₀ obtained from directional sup-norms along the
/// eigenvectors of `metric`.
pub fn metric_lipschitz(oracle: &OracleInfo, metric: &Metric) -> f64 {
    let spec = metric.spectrum();
    spec.vectors
        .iter()
        .zip(&spec.values)
        .map(|(u, l)| oracle.directional_sup_norm(u).powi(2) / l)
        .sum::<f64>()
        .sqrt()
}

pub fn evaluate_regret(
    outcomes: &[StepOutcome],
    oracle: &OracleInfo,
    stream: &[LabeledExample],
    metric: &Metric,
) -> Result<RegretTrace> {
    if outcomes.len() != stream.len() {
        return Err(Error::Alignment(format!(
            "{} outcomes vs {} examples",
            outcomes.len(),
            stream.len()
        )));
    }
    let lipschitz = metric_lipschitz(oracle, metric);
    let n = outcomes.len();
    let mut trace = RegretTrace {
        comparator_loss: Vec::with_capacity(n),
        learner_loss: Vec::with_capacity(n),
        cumulative: Vec::with_capacity(n),
        envelope: Vec::with_capacity(n),
        lipschitz,
    };
    let mut acc = 0.0;
    for (t, (o, ex)) in outcomes.iter().zip(stream).enumerate() {
        let c = (oracle.f0(&ex.x) - ex.y).powi(2);
        acc += o.loss - c;
        let rho = o.effective_rank_used as f64;
        trace.comparator_loss.push(c);
        trace.learner_loss.push(o.loss);
        trace.cumulative.push(acc);
        trace
            .envelope
            .push((1.0 + lipschitz) * ((t + 1) as f64).powf(rho / (1.0 + rho)));
    }
    Ok(trace)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the fit.
    pub residual: f64,
    pub points: usize,
}

/// Least squares of ln R_t on ln t over t ∈ [T/10, T], using rounds with R_t > 0.
pub fn fit_loglog_slope(cumulative: &[f64]) -> Option<SlopeFit> {
    let total = cumulative.len();
    let start = (total / 10).max(1);
    let pts: Vec<(f64, f64)> = (start..=total)
        .filter(|&t| cumulative[t - 1] > 0.0)
        .map(|t| ((t as f64).ln(), cumulative[t - 1].ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (pts
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Some(SlopeFit {
        slope,
        intercept,
        residual,
        points: pts.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::generator::{oracle_info, GeneratorSpec, Link};

    fn outcome(prediction: f64, y: f64) -> StepOutcome {
        StepOutcome {
            prediction,
            loss: (prediction - y).powi(2),
            assigned_center: 0,
            new_center_created: false,
            radius_used: 1.0,
            effective_rank_used: 1,
        }
    }

    fn constant_one() -> OracleInfo {
        let mut spec = GeneratorSpec::constant(1, 0);
        spec.link = Link::Affine { intercept: 0.9, slope: 0.0 };
        let mut o = oracle_info(&spec).unwrap();
        // f₀ ≡ 1 for the hand example below.
        o.spec.link = Link::Affine { intercept: 1.0, slope: 0.0 };
        o
    }

    #[test]
    fn perfect_learner_has_zero_regret() {
        let spec = GeneratorSpec::single_index(2, 0.1, 3);
        let oracle = oracle_info(&spec).unwrap();
        let stream = crate::harness::generator::generate_stream(&spec, 100);
        let outs: Vec<_> = stream.iter().map(|e| outcome(oracle.f0(&e.x), e.y)).collect();
        let tr = evaluate_regret(&outs, &oracle, &stream, &Metric::identity(2)).unwrap();
        assert!(tr.final_regret().abs() < 1e-12);
        assert!(tr.recomputation_error() <= 1e-9);
    }

    #[test]
    fn single_round_arithmetic() {
        let oracle = constant_one();
        let stream = vec![LabeledExample { x: vec![0.0], y: 1.0 }];
        let tr = evaluate_regret(&[outcome(0.5, 1.0)], &oracle, &stream, &Metric::identity(1)).unwrap();
        assert_eq!(tr.cumulative, vec![0.25]);
    }

    #[test]
    fn regret_can_dip() {
        let oracle = constant_one();
        let stream = vec![LabeledExample { x: vec![0.0], y: 0.2 }];
        let tr = evaluate_regret(&[outcome(0.2, 0.2)], &oracle, &stream, &Metric::identity(1)).unwrap();
        assert!(tr.cumulative[0] < 0.0);
    }

    #[test]
    fn misaligned_inputs_error() {
        let oracle = constant_one();
        let err = evaluate_regret(&[], &oracle, &[LabeledExample { x: vec![0.0], y: 0.0 }], &Metric::identity(1));
        assert!(matches!(err, Err(Error::Alignment(_))));
    }

    #[test]
    fn slope_of_power_law() {
        let r: Vec<f64> = (1..=1000).map(|t| 3.0 * (t as f64).powf(0.6)).collect();
        let fit = fit_loglog_slope(&r).unwrap();
        assert!((fit.slope - 0.6).abs() < 1e-12);
        assert!(fit.residual < 1e-12);
        assert_eq!(fit.points, 901);
        assert!(fit_loglog_slope(&[-1.0; 50]).is_none());
    }
}
