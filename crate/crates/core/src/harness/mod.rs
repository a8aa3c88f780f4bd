//! Experiment support: data generation, regret accounting, numerical checks
//! of the analysis lemmas, metric comparisons and file formats.

pub mod compare;
pub mod generator;
pub mod io;
pub mod regret;
pub mod rng;
pub mod validators;
