//! Kernel-regression estimate of the regression function and the
//! finite-difference estimate of its expected gradient outer product.
//!
//! `kernel_regress` and `finite_diff_gradient` evaluate the estimator one
//! query at a time. `estimate_gop` produces the same numbers for every data
//! point at once, reusing ‖x_t − x_s‖² across the 2d probes of each point.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::SymMatrix;
use crate::regressor::LabeledExample;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kernel {
    /// K(u) = max(0, 1 − u)
    #[default]
    Triangular,
    /// K(u) = max(0, 1 − u²)
    Epanechnikov,
}

impl Kernel {
    pub fn eval(self, u: f64) -> f64 {
        match self {
            Kernel::Triangular => (1.0 - u).max(0.0),
            Kernel::Epanechnikov => (1.0 - u * u).max(0.0),
        }
    }

    /// K(√sq / ε) given sq = ‖·‖² and eps2 = ε².
    #[inline]
    fn eval_sq(self, sq: f64, eps: f64, eps2: f64) -> f64 {
        if sq >= eps2 {
            return 0.0;
        }
        match self {
            Kernel::Triangular => 1.0 - sq.max(0.0).sqrt() / eps,
            Kernel::Epanechnikov => 1.0 - sq.max(0.0) / eps2,
        }
    }
}

/// The default (triangular) kernel.
pub fn kernel(u: f64) -> f64 {
    Kernel::Triangular.eval(u)
}

/// Labeled points stored flat for cache-friendly scans.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    dim: usize,
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl Dataset {
    pub fn new(dim: usize) -> Self {
        Dataset {
            dim,
            xs: Vec::new(),
            ys: Vec::new(),
        }
    }

    pub fn from_examples(examples: &[LabeledExample]) -> Result<Self> {
        let dim = examples
            .first()
            .map(|e| e.x.len())
            .ok_or_else(|| Error::Domain("dataset must be nonempty".into()))?;
        let mut data = Dataset::new(dim);
        for e in examples {
            data.push(&e.x, e.y)?;
        }
        Ok(data)
    }

    pub fn push(&mut self, x: &[f64], y: f64) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                got: x.len(),
            });
        }
        self.xs.extend_from_slice(x);
        self.ys.push(y);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.ys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ys.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.xs[i * self.dim..(i + 1) * self.dim]
    }

    pub fn label(&self, i: usize) -> f64 {
        self.ys[i]
    }

    /// Rows `range` as a new dataset.
    pub fn slice(&self, range: std::ops::Range<usize>) -> Dataset {
        Dataset {
            dim: self.dim,
            xs: self.xs[range.start * self.dim..range.end * self.dim].to_vec(),
            ys: self.ys[range].to_vec(),
        }
    }

    fn sq_dist_to(&self, i: usize, x: &[f64]) -> f64 {
        self.point(i)
            .iter()
            .zip(x)
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    }

    fn mean_label(&self) -> f64 {
        self.ys.iter().sum::<f64>() / self.len() as f64
    }
}

/// Bandwidth rules ε_n and τ_n.
///
/// ε_n = c_eps · (ln(n+1))^{2/d} · n^{−p}, with p defaulting to 1/(2(d+1))
/// and restricted to [1/(2(d+1)), 1/d]. The raw expression rises for small n;
/// it is held at its peak value until it starts to decay, so ε_n is
/// nonincreasing. τ_n = min(0.99·τ0, c_tau · ε_n^{1/4}).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandwidthSchedule {
    pub c_eps: f64,
    pub c_tau: f64,
    pub tau0: f64,
    /// Decay exponent p; `None` selects 1/(2(d+1)).
    #[serde(default)]
    pub rate: Option<f64>,
    #[serde(default)]
    pub kernel: Kernel,
}

impl Default for BandwidthSchedule {
    fn default() -> Self {
        BandwidthSchedule {
            c_eps: 1.0,
            c_tau: 1.0,
            tau0: 1.0,
            rate: None,
            kernel: Kernel::Triangular,
        }
    }
}

fn log_shape(n: f64, d: usize, p: f64) -> f64 {
    (n + 1.0).ln().powf(2.0 / d as f64) * n.powf(-p)
}

impl BandwidthSchedule {
    pub fn validate(&self, d: usize) -> Result<()> {
        if !(self.c_eps > 0.0 && self.c_tau > 0.0 && self.tau0 > 0.0) {
            return Err(Error::Domain("bandwidth constants must be positive".into()));
        }
        let p = self.rate_exponent(d);
        let (lo, hi) = Self::rate_window(d);
        if !(lo - 1e-12..=hi + 1e-12).contains(&p) {
            return Err(Error::Domain(format!(
                "bandwidth exponent {p} outside [{lo}, {hi}]"
            )));
        }
        Ok(())
    }

    /// Admissible decay exponents for ε_n.
    pub fn rate_window(d: usize) -> (f64, f64) {
        (1.0 / (2.0 * (d as f64 + 1.0)), 1.0 / d as f64)
    }

    pub fn rate_exponent(&self, d: usize) -> f64 {
        self.rate.unwrap_or_else(|| Self::rate_window(d).0)
    }

    /// Sample size at which (ln(n+1))^{2/d} n^{−p} peaks.
    fn peak(d: usize, p: f64) -> f64 {
        // d/dn of the log-shape vanishes where (2/d)·n = p·(n+1)·ln(n+1).
        let g = |n: f64| p * (n + 1.0) * (n + 1.0).ln() - 2.0 / d as f64 * n;
        let (mut lo, mut hi) = (1.0f64, 2.0f64);
        if g(lo) >= 0.0 {
            return 1.0;
        }
        while g(hi) < 0.0 {
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if g(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    }

    /// c_eps · (ln(n+1))^{2/d} · n^{−1/d}, the small end of the admissible window.
    pub fn eps_floor(&self, n: usize, d: usize) -> f64 {
        let n = (n.max(1) as f64).max(Self::peak(d, 1.0 / d as f64));
        self.c_eps * log_shape(n, d, 1.0 / d as f64)
    }

    pub fn eps(&self, n: usize, d: usize) -> f64 {
        let p = self.rate_exponent(d);
        let n_eff = (n.max(1) as f64).max(Self::peak(d, p));
        (self.c_eps * log_shape(n_eff, d, p)).max(self.eps_floor(n, d))
    }

    pub fn tau(&self, n: usize, d: usize) -> f64 {
        (self.c_tau * self.eps(n, d).powf(0.25)).min(0.99 * self.tau0)
    }
}

/// f̂_n(x) = Σ_t y_t ω_t(x). Falls back to the plain label mean when no data
/// point carries positive kernel mass.
pub fn kernel_regress(data: &Dataset, x: &[f64], eps: f64) -> f64 {
    kernel_regress_with(data, x, eps, Kernel::Triangular)
}

pub fn kernel_regress_with(data: &Dataset, x: &[f64], eps: f64, kernel: Kernel) -> f64 {
    let weights = kernel_weights(data, x, eps, kernel);
    weights
        .iter()
        .enumerate()
        .map(|(i, w)| w * data.label(i))
        .sum()
}

/// The weights ω_t(x); nonnegative and summing to one.
pub fn kernel_weights(data: &Dataset, x: &[f64], eps: f64, kernel: Kernel) -> Vec<f64> {
    let n = data.len();
    let raw: Vec<f64> = (0..n)
        .map(|i| kernel.eval(data.sq_dist_to(i, x).sqrt() / eps))
        .collect();
    let total: f64 = raw.iter().sum();
    if total > 0.0 {
        raw.into_iter().map(|k| k / total).collect()
    } else {
        vec![1.0 / n as f64; n]
    }
}

/// Minimum number of points a probe ball of radius ε/2 must hold: 2d·ln(2n),
/// i.e. an empirical mass of (2d/n)·ln(2n).
fn mask_count(n: usize, d: usize) -> f64 {
    2.0 * d as f64 * (2.0 * n as f64).ln()
}

/// Masked central-difference gradient of f̂_n at x.
pub fn finite_diff_gradient(data: &Dataset, x: &[f64], eps: f64, tau: f64) -> Vec<f64> {
    finite_diff_gradient_with(data, x, eps, tau, Kernel::Triangular)
}

pub fn finite_diff_gradient_with(
    data: &Dataset,
    x: &[f64],
    eps: f64,
    tau: f64,
    kernel: Kernel,
) -> Vec<f64> {
    let d = data.dim();
    let n = data.len();
    let need = mask_count(n, d);
    let half2 = 0.25 * eps * eps;
    let mut grad = vec![0.0; d];
    let mut probe = x.to_vec();
    for i in 0..d {
        let mut vals = [0.0; 2];
        let mut dense = true;
        for (k, b) in [tau, -tau].into_iter().enumerate() {
            probe[i] = x[i] + b;
            vals[k] = kernel_regress_with(data, &probe, eps, kernel);
            let inside = (0..n)
                .filter(|&s| data.sq_dist_to(s, &probe) <= half2)
                .count();
            dense &= inside as f64 >= need;
        }
        probe[i] = x[i];
        if dense {
            grad[i] = (vals[0] - vals[1]) / (2.0 * tau);
        }
    }
    grad
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GopEstimate {
    pub matrix: SymMatrix,
    pub n: usize,
    pub eps: f64,
    pub tau: f64,
    /// ε floor of the admissible window at this n.
    pub eps_floor: f64,
    /// Fraction of gradient coordinates zeroed by the density mask.
    pub mask_rate: f64,
    /// Largest Euclidean norm among the estimated gradients.
    pub max_gradient_norm: f64,
}

impl GopEstimate {
    pub fn diagnostics(&self) -> serde_json::Value {
        serde_json::json!({
            "n": self.n,
            "eps_n": self.eps,
            "tau_n": self.tau,
            "eps_floor": self.eps_floor,
            "mask_rate": self.mask_rate,
            "max_gradient_norm": self.max_gradient_norm,
        })
    }
}

/// Per-point masked gradients, computed in a single pass over the data for
/// each point. Returns (gradients, number of masked coordinates).
fn all_gradients(data: &Dataset, eps: f64, tau: f64, kernel: Kernel) -> (Vec<Vec<f64>>, usize) {
    let d = data.dim();
    let n = data.len();
    let need = mask_count(n, d);
    let eps2 = eps * eps;
    let half2 = 0.25 * eps2;
    let tau2 = tau * tau;
    let mean = data.mean_label();
    // Points sorted by first coordinate: any point inside some probe's kernel
    // support lies within ε + τ of x_t along that axis.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| data.point(a)[0].total_cmp(&data.point(b)[0]));
    let keys: Vec<f64> = order.iter().map(|&i| data.point(i)[0]).collect();
    let reach = eps + tau;

    let per_point: Vec<(Vec<f64>, usize)> = (0..n)
        .into_par_iter()
        .map(|t| {
            let xt = data.point(t);
            // Per probe (i, ±): Σ K·y, Σ K, #points within ε/2.
            let mut num = vec![0.0; 2 * d];
            let mut den = vec![0.0; 2 * d];
            let mut cnt = vec![0u32; 2 * d];
            let mut delta = vec![0.0; d];
            let lo = keys.partition_point(|&k| k < xt[0] - reach);
            let hi = keys.partition_point(|&k| k <= xt[0] + reach);
            for &s in &order[lo..hi] {
                let xs = data.point(s);
                let mut base = tau2;
                for k in 0..d {
                    delta[k] = xt[k] - xs[k];
                    base += delta[k] * delta[k];
                }
                let mut spread: f64 = 0.0;
                for k in 0..d {
                    spread = spread.max(delta[k].abs());
                }
                if base - 2.0 * tau * spread >= eps2 {
                    continue;
                }
                let y = data.label(s);
                for k in 0..d {
                    let shift = 2.0 * tau * delta[k];
                    for (j, sq) in [(2 * k, base + shift), (2 * k + 1, base - shift)] {
                        if sq >= eps2 {
                            continue;
                        }
                        let w = kernel.eval_sq(sq, eps, eps2);
                        num[j] += w * y;
                        den[j] += w;
                        if sq <= half2 {
                            cnt[j] += 1;
                        }
                    }
                }
            }
            let mut grad = vec![0.0; d];
            let mut masked = 0;
            for k in 0..d {
                let f = |j: usize| if den[j] > 0.0 { num[j] / den[j] } else { mean };
                let dense = cnt[2 * k] as f64 >= need && cnt[2 * k + 1] as f64 >= need;
                if dense {
                    grad[k] = (f(2 * k) - f(2 * k + 1)) / (2.0 * tau);
                } else {
                    masked += 1;
                }
            }
            (grad, masked)
        })
        .collect();

    let masked = per_point.iter().map(|(_, m)| m).sum();
    (per_point.into_iter().map(|(g, _)| g).collect(), masked)
}

/// Ĝ_n = (1/n) Σ_t ∇̂f(x_t) ∇̂f(x_t)ᵀ with ε_n, τ_n taken from `schedule` at n = |data|.
pub fn estimate_gop(data: &Dataset, schedule: &BandwidthSchedule) -> Result<GopEstimate> {
    if data.is_empty() {
        return Err(Error::Domain("cannot estimate from an empty dataset".into()));
    }
    let (n, d) = (data.len(), data.dim());
    schedule.validate(d)?;
    let eps = schedule.eps(n, d);
    let tau = schedule.tau(n, d);
    let (grads, masked) = all_gradients(data, eps, tau, schedule.kernel);

    let mut matrix = SymMatrix::zeros(d);
    let w = 1.0 / n as f64;
    let mut max_gradient_norm: f64 = 0.0;
    for g in &grads {
        matrix.add_outer(w, g);
        max_gradient_norm = max_gradient_norm.max(crate::linalg::norm(g));
    }
    Ok(GopEstimate {
        matrix,
        n,
        eps,
        tau,
        eps_floor: schedule.eps_floor(n, d),
        mask_rate: masked as f64 / (n * d) as f64,
        max_gradient_norm,
    })
}
