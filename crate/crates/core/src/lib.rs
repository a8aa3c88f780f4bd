//! Online nonparametric regression in a learned Mahalanobis metric.
//!
//! The learner covers the unit ball with metric balls whose radius shrinks
//! with the effective rank of the metric, predicting each point by the mean
//! label of its nearest ball. The phased variant re-estimates the metric
//! from the gradient outer product of a kernel regression fit, doubling the
//! phase length each time.

pub mod error;
pub mod gop;
pub mod harness;
pub mod linalg;
pub mod phased;
pub mod regressor;
pub mod spectral;

pub use error::{Error, Result};
pub use gop::{estimate_gop, BandwidthSchedule, Dataset, GopEstimate, Kernel};
pub use linalg::{eig_sym, mahalanobis_distance, spectral_normalize, truncated_determinant, Metric, Spectrum, SymMatrix};
pub use phased::{run_phased, PhasedConfig, PhasedLearner, PhasedRun, RegularizationSchedule};
pub use regressor::{run_sequence, LabeledExample, OnlineRegressor, StepOutcome};
pub use spectral::{effective_rank, effective_rank_tilde, kappa, kappa_tilde, EigenvalueProfile};
