//! Online nonparametric regression on an incrementally built packing of
//! Mahalanobis ellipsoids.
//!
//! Each round the learner finds the center closest to `x_t` in the metric,
//! predicts the running mean of the labels attached to it (or 1/2 if it has
//! none yet), then either attaches `y_t` to that center (when `x_t` lies within
//! the current radius ε_t = t^{−1/(1+ρ_t)}) or opens a new center at `x_t`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{norm, Metric};
use crate::spectral::{effective_rank, EigenvalueProfile};

/// Tolerance on ‖x‖₂ ≤ 1 so that points produced by floating-point rescaling pass.
const BALL_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledExample {
    pub x: Vec<f64>,
    pub y: f64,
}

impl LabeledExample {
    /// Checks x ∈ B(1) and y ∈ [0, 1].
    pub fn new(x: Vec<f64>, y: f64) -> Result<Self> {
        let ex = LabeledExample { x, y };
        ex.validate()?;
        Ok(ex)
    }

    pub fn validate(&self) -> Result<()> {
        if self.x.is_empty() {
            return Err(Error::InvalidExample("empty instance".into()));
        }
        if self.x.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidExample("non-finite instance coordinate".into()));
        }
        let n = norm(&self.x);
        if n > 1.0 + BALL_SLACK {
            return Err(Error::InvalidExample(format!("‖x‖ = {n} exceeds 1")));
        }
        if !(0.0..=1.0).contains(&self.y) {
            return Err(Error::InvalidExample(format!("label {} outside [0, 1]", self.y)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Center {
    pub anchor: Vec<f64>,
    pub label_sum: f64,
    pub count: usize,
    /// 1-based round that opened this center.
    pub created_at: usize,
    /// Radius in force when the center was opened.
    pub created_radius: f64,
}

impl Center {
    pub fn mean(&self) -> Option<f64> {
        (self.count > 0).then(|| self.label_sum / self.count as f64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepOutcome {
    pub prediction: f64,
    pub loss: f64,
    /// Center used for the prediction (0-based).
    pub assigned_center: usize,
    pub new_center_created: bool,
    pub radius_used: f64,
    pub effective_rank_used: usize,
}

/// ε_t = t^{−1/(1+ρ_t)} with ρ_t the effective rank of `profile` at horizon t.
pub fn radius(profile: &EigenvalueProfile, t: usize) -> f64 {
    let t = t.max(1) as f64;
    let rho = effective_rank(profile, t).expect("t ≥ 1 and r ∈ 1..=d are always valid");
    t.powf(-1.0 / (1.0 + rho as f64))
}

fn radius_and_rank(profile: &EigenvalueProfile, t: usize) -> (f64, usize) {
    let tf = t.max(1) as f64;
    let rho = effective_rank(profile, tf).expect("t ≥ 1 and r ∈ 1..=d are always valid");
    (tf.powf(-1.0 / (1.0 + rho as f64)), rho)
}

/// Learner state. Single writer: `step` mutates it.
#[derive(Debug, Clone)]
pub struct OnlineRegressor {
    metric: Metric,
    profile: EigenvalueProfile,
    centers: Vec<Center>,
    /// Anchors mapped through the metric square root, parallel to `centers`.
    embedded: Vec<Vec<f64>>,
    round: usize,
    /// Added to the local round when computing ε_t (0 for a fresh clock).
    clock_offset: usize,
}

impl OnlineRegressor {
    pub fn new(metric: Metric) -> Self {
        Self::with_clock_offset(metric, 0)
    }

    /// A learner whose radius schedule behaves as if `offset` rounds had already elapsed.
    pub fn with_clock_offset(metric: Metric, offset: usize) -> Self {
        let profile = EigenvalueProfile::new(metric.eigenvalues().to_vec())
            .expect("metric eigenvalues are descending and positive");
        OnlineRegressor {
            metric,
            profile,
            centers: Vec::new(),
            embedded: Vec::new(),
            round: 0,
            clock_offset: offset,
        }
    }

    pub fn metric(&self) -> &Metric {
        &self.metric
    }

    pub fn profile(&self) -> &EigenvalueProfile {
        &self.profile
    }

    pub fn centers(&self) -> &[Center] {
        &self.centers
    }

    pub fn round(&self) -> usize {
        self.round
    }

    /// Radius that was in force at the most recent round (1 before any round).
    pub fn current_radius(&self) -> f64 {
        radius(&self.profile, self.clock_offset + self.round.max(1))
    }

    /// Closest center in the metric, lowest index (earliest creation) on ties.
    pub fn nearest_center(&self, x: &[f64]) -> Result<(usize, f64)> {
        if x.len() != self.metric.dim() {
            return Err(Error::Dimension {
                expected: self.metric.dim(),
                got: x.len(),
            });
        }
        self.nearest_embedded(&self.metric.embed(x))
    }

    fn nearest_embedded(&self, ex: &[f64]) -> Result<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for (i, anchor) in self.embedded.iter().enumerate() {
            let d2: f64 = anchor.iter().zip(ex).map(|(a, b)| (a - b) * (a - b)).sum();
            if best.map_or(true, |(_, b)| d2 < b) {
                best = Some((i, d2));
            }
        }
        best.map(|(i, d2)| (i, d2.sqrt())).ok_or(Error::EmptyStore)
    }

    fn open_center(&mut self, x: &[f64], ex: Vec<f64>, created_at: usize, radius: f64) {
        self.centers.push(Center {
            anchor: x.to_vec(),
            label_sum: 0.0,
            count: 0,
            created_at,
            created_radius: radius,
        });
        self.embedded.push(ex);
    }

    /// Plays one round. On error the state is left untouched.
    pub fn step(&mut self, example: &LabeledExample) -> Result<StepOutcome> {
        example.validate()?;
        if example.x.len() != self.metric.dim() {
            return Err(Error::Dimension {
                expected: self.metric.dim(),
                got: example.x.len(),
            });
        }
        let t = self.round + 1;
        let (eps, rho) = radius_and_rank(&self.profile, self.clock_offset + t);
        let ex = self.metric.embed(&example.x);

        let mut created = false;
        if self.centers.is_empty() {
            self.open_center(&example.x, ex.clone(), t, eps);
            created = true;
        }
        let (s, dist) = self.nearest_embedded(&ex)?;
        let prediction = self.centers[s].mean().unwrap_or(0.5);

        // y_t is revealed only from here on.
        let y = example.y;
        if dist <= eps {
            let c = &mut self.centers[s];
            c.label_sum += y;
            c.count += 1;
        } else {
            self.open_center(&example.x, ex, t, eps);
            let c = self.centers.last_mut().unwrap();
            c.label_sum = y;
            c.count = 1;
            created = true;
        }
        self.round = t;

        Ok(StepOutcome {
            prediction,
            loss: (prediction - y) * (prediction - y),
            assigned_center: s,
            new_center_created: created,
            radius_used: eps,
            effective_rank_used: rho,
        })
    }
}

/// Runs a fresh learner over `stream`.
pub fn run_sequence(metric: &Metric, stream: &[LabeledExample]) -> Result<Vec<StepOutcome>> {
    let mut learner = OnlineRegressor::new(metric.clone());
    run_with(&mut learner, stream)
}

pub(crate) fn run_with(
    learner: &mut OnlineRegressor,
    stream: &[LabeledExample],
) -> Result<Vec<StepOutcome>> {
    stream
        .iter()
        .enumerate()
        .map(|(i, ex)| {
            learner.step(ex).map_err(|e| Error::AtRound {
                round: i + 1,
                source: Box::new(e),
            })
        })
        .collect()
}

/// Per-center regret of the running-mean forecaster, replayed from a log.
///
/// For every center: Σ_{t∈T_s}(ŷ_t − y_t)² − min_y Σ_{t∈T_s}(y − y_t)², where
/// T_s holds the rounds whose label was attached to s.
pub fn per_center_regret(
    outcomes: &[StepOutcome],
    stream: &[LabeledExample],
) -> Result<Vec<(usize, f64)>> {
    if outcomes.len() != stream.len() {
        return Err(Error::Alignment(format!(
            "{} outcomes vs {} examples",
            outcomes.len(),
            stream.len()
        )));
    }
    // (count, Σ loss, Σ y, Σ y²)
    let mut acc: Vec<(usize, f64, f64, f64)> = Vec::new();
    for (o, ex) in outcomes.iter().zip(stream) {
        // A created center always receives the round's own label; this also
        // covers round 1, which opens center 0 and attaches to it.
        let joined = if o.new_center_created {
            acc.push((0, 0.0, 0.0, 0.0));
            acc.len() - 1
        } else {
            o.assigned_center
        };
        if joined >= acc.len() {
            return Err(Error::Alignment(format!("outcome refers to unknown center {joined}")));
        }
        let a = &mut acc[joined];
        a.0 += 1;
        a.1 += o.loss;
        a.2 += ex.y;
        a.3 += ex.y * ex.y;
    }
    Ok(acc
        .into_iter()
        .map(|(n, loss, sy, syy)| {
            let best = syy - sy * sy / n as f64;
            (n, loss - best)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{spectral_normalize, SymMatrix};
    use approx::assert_abs_diff_eq;

    fn ex(x: &[f64], y: f64) -> LabeledExample {
        LabeledExample::new(x.to_vec(), y).unwrap()
    }

    #[test]
    fn radius_examples() {
        for p in [vec![1.0], vec![1.0, 0.1, 0.001]] {
            assert_eq!(radius(&EigenvalueProfile::new(p).unwrap(), 1), 1.0);
        }
        assert_eq!(radius(&EigenvalueProfile::new(vec![1.0]).unwrap(), 4), 0.5);
        assert_eq!(radius(&EigenvalueProfile::new(vec![1.0; 3]).unwrap(), 16), 0.5);
    }

    #[test]
    fn nearest_center_examples() {
        let mut r = OnlineRegressor::new(Metric::identity(2));
        assert!(matches!(r.nearest_center(&[0.0, 0.0]), Err(Error::EmptyStore)));
        r.step(&ex(&[0.0, 0.0], 0.3)).unwrap();
        let (i, d) = r.nearest_center(&[0.6, 0.0]).unwrap();
        assert_eq!((i, d), (0, 0.6));
        r.step(&ex(&[1.0, 0.0], 0.3)).unwrap();
        assert_eq!(r.centers().len(), 2);
        let (i, d) = r.nearest_center(&[0.9, 0.0]).unwrap();
        assert_eq!(i, 1);
        assert_abs_diff_eq!(d, 0.1, epsilon = 1e-15);
        let (i, _) = r.nearest_center(&[0.5, 0.0]).unwrap();
        assert_eq!(i, 0, "tie goes to the earlier center");
    }

    #[test]
    fn first_round_predicts_half_and_opens_center() {
        let mut r = OnlineRegressor::new(Metric::identity(2));
        let o = r.step(&ex(&[0.1, 0.2], 0.8)).unwrap();
        assert_eq!(o.prediction, 0.5);
        assert!(o.new_center_created);
        assert_eq!(r.centers()[0].count, 1);
        let o = r.step(&ex(&[0.1, 0.2], 0.1)).unwrap();
        assert_eq!(o.prediction, 0.8);
        assert!(!o.new_center_created);
    }

    #[test]
    fn far_point_predicts_then_opens_center() {
        let m = spectral_normalize(&SymMatrix::from_diagonal(&[1.0, 1.0])).unwrap();
        let mut r = OnlineRegressor::new(m);
        r.step(&ex(&[-1.0, 0.0], 0.2)).unwrap();
        // M-distance 2 > ε_2 = 2^{-1/3}
        let o = r.step(&ex(&[1.0, 0.0], 0.9)).unwrap();
        assert_eq!(o.prediction, 0.2);
        assert_eq!(o.assigned_center, 0);
        assert!(o.new_center_created);
        assert_eq!(r.centers().len(), 2);
        assert_eq!(r.centers()[1].mean(), Some(0.9));
        assert_eq!(r.centers()[1].created_at, 2);
    }

    #[test]
    fn invalid_examples_leave_state_untouched() {
        let mut r = OnlineRegressor::new(Metric::identity(2));
        r.step(&ex(&[0.0, 0.0], 0.5)).unwrap();
        for bad in [
            LabeledExample { x: vec![1.0, 1.0], y: 0.5 },
            LabeledExample { x: vec![0.0, f64::NAN], y: 0.5 },
            LabeledExample { x: vec![0.0, 0.0], y: 1.5 },
            LabeledExample { x: vec![0.0, 0.0], y: f64::NAN },
            LabeledExample { x: vec![0.0], y: 0.5 },
        ] {
            assert!(r.step(&bad).is_err());
        }
        assert_eq!(r.round(), 1);
        assert_eq!(r.centers().len(), 1);
        assert_eq!(r.centers()[0].count, 1);
    }

    #[test]
    fn run_sequence_examples() {
        let id = Metric::identity(2);
        assert!(run_sequence(&id, &[]).unwrap().is_empty());
        let out = run_sequence(&id, &[ex(&[0.0, 0.5], 0.3)]).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].prediction, 0.5);

        let stream: Vec<_> = (0..20).map(|_| ex(&[0.2, 0.2], 1.0)).collect();
        let out = run_sequence(&id, &stream).unwrap();
        assert_eq!(out[0].prediction, 0.5);
        assert!(out[1..].iter().all(|o| o.prediction == 1.0));
        assert_eq!(out.iter().map(|o| o.loss).sum::<f64>(), 0.25);
    }

    #[test]
    fn run_sequence_tags_round_on_error() {
        let stream = vec![ex(&[0.0, 0.0], 0.5), LabeledExample { x: vec![2.0, 0.0], y: 0.5 }];
        match run_sequence(&Metric::identity(2), &stream) {
            Err(Error::AtRound { round, .. }) => assert_eq!(round, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn clock_offset_shifts_radius() {
        let mut a = OnlineRegressor::with_clock_offset(Metric::identity(1), 3);
        let o = a.step(&ex(&[0.0], 0.5)).unwrap();
        assert_eq!(o.radius_used, 0.5);
    }
}
