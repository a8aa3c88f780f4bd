//! Spectral-decay functionals: kappa, effective rank, their regularized
//! variants, and eigenvalue-separation diagnostics.
//!
//! Indices in the public API are 1-based where they name eigenvalue ranks
//! (`r`, `m`), matching the usual λ_1 ≥ … ≥ λ_d convention.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Descending, positive-leading eigenvalue sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenvalueProfile(Vec<f64>);

impl EigenvalueProfile {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Domain("empty eigenvalue profile".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("non-finite eigenvalue".into()));
        }
        if values.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Domain("eigenvalues must be sorted descending".into()));
        }
        if !(values[0] > 0.0) {
            return Err(Error::Domain("leading eigenvalue must be positive".into()));
        }
        Ok(EigenvalueProfile(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Profile divided by its leading value (leading value pinned to 1).
    pub fn normalized(&self) -> Self {
        let top = self.0[0];
        let mut v: Vec<f64> = self.0.iter().map(|x| x / top).collect();
        v[0] = 1.0;
        EigenvalueProfile(v)
    }
}

fn check_args(d: usize, r: usize, t: f64) -> Result<()> {
    if r == 0 || r > d {
        return Err(Error::Domain(format!("rank r = {r} outside 1..={d}")));
    }
    if !(t >= 1.0) || !t.is_finite() {
        return Err(Error::Domain(format!("horizon t = {t} must be finite and ≥ 1")));
    }
    Ok(())
}

/// t^{−2/(1+r)}
#[inline]
fn threshold(r: usize, t: f64) -> f64 {
    t.powf(-2.0 / (1.0 + r as f64))
}

/// Largest m with `score(m) ≥ thr`, 0 if none. Scores are nonincreasing in m.
fn count_at_least(values: &[f64], shift: f64, thr: f64) -> usize {
    values.iter().take_while(|&&v| v + shift >= thr).count()
}

/// κ(r, t) = max{m : λ_m ≥ t^{−2/(1+r)}} for a unit-spectral-radius profile.
pub fn kappa(profile: &EigenvalueProfile, r: usize, t: f64) -> Result<usize> {
    check_args(profile.dim(), r, t)?;
    let k = count_at_least(profile.values(), 0.0, threshold(r, t));
    debug_assert!(
        k >= 1 || profile.values()[0] < 1.0,
        "normalized profile must satisfy λ_1 ≥ threshold"
    );
    Ok(k)
}

/// ρ_t = min{r : κ(r, t) ≤ r}.
pub fn effective_rank(profile: &EigenvalueProfile, t: f64) -> Result<usize> {
    let d = profile.dim();
    for r in 1..=d {
        if kappa(profile, r, t)? <= r {
            return Ok(r);
        }
    }
    Ok(d)
}

/// κ̃(r, t) = max{m : μ_m + 2γ̄_t ≥ μ_1 t^{−2/(1+r)}} on a raw (unnormalized) profile.
pub fn kappa_tilde(mu: &EigenvalueProfile, gamma_bar: f64, r: usize, t: f64) -> Result<usize> {
    check_args(mu.dim(), r, t)?;
    if !(gamma_bar >= 0.0) {
        return Err(Error::Domain(format!("regularization {gamma_bar} must be ≥ 0")));
    }
    let thr = mu.values()[0] * threshold(r, t);
    Ok(count_at_least(mu.values(), 2.0 * gamma_bar, thr))
}

/// ρ̃_t = min{r : κ̃(r, t) ≤ r}.
pub fn effective_rank_tilde(mu: &EigenvalueProfile, gamma_bar: f64, t: f64) -> Result<usize> {
    let d = mu.dim();
    for r in 1..=d {
        if kappa_tilde(mu, gamma_bar, r, t)? <= r {
            return Ok(r);
        }
    }
    Ok(d)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparationReport {
    /// Δ_j = min_{k≠j} |μ_j − μ_k|
    pub deltas: Vec<f64>,
    pub threshold: f64,
    /// 1-based indices j with Δ_j ≥ threshold.
    pub well_separated: Vec<usize>,
    /// 1-based indices j with Δ_j < threshold.
    pub leaking: Vec<usize>,
}

pub fn separation_report(mu: &EigenvalueProfile, threshold: f64) -> Result<SeparationReport> {
    let v = mu.values();
    if v.len() < 2 {
        return Err(Error::Domain("eigenvalue separation needs d ≥ 2".into()));
    }
    if !(threshold > 0.0) {
        return Err(Error::Domain(format!("separation threshold {threshold} must be > 0")));
    }
    let deltas: Vec<f64> = (0..v.len())
        .map(|j| {
            (0..v.len())
                .filter(|&k| k != j)
                .map(|k| (v[j] - v[k]).abs())
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    let (well_separated, leaking) = (1..=v.len()).partition(|&j| deltas[j - 1] >= threshold);
    Ok(SeparationReport {
        deltas,
        threshold,
        well_separated,
        leaking,
    })
}
