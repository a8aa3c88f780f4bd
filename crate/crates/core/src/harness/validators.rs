//! Numerical checks of the packing, Lipschitz and monotonicity facts the
//! regret analysis relies on. Every report carries an explicit pass flag and
//! the measured slack.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::generator::{uniform_ball, Link};
use super::rng::{substream, Domain};
use crate::error::Result;
use crate::linalg::{dot, norm, spectral_normalize, Metric, SymMatrix};
use crate::regressor::{LabeledExample, OnlineRegressor};

// ---------------------------------------------------------------------------
// Ellipsoid packing bound

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PackingReport {
    pub n_centers: usize,
    pub final_radius: f64,
    /// s = max{i : √λ_i ≥ ε}
    pub s: usize,
    /// (8√2/ε)^s · Π_{i≤s} √λ_i
    pub bound: f64,
    /// Every anchor is farther than its creation radius from all earlier anchors.
    pub packing_property: bool,
    pub slack: f64,
    pub pass: bool,
}

/// (8√2/ε)^s Π_{i≤s}√λ_i with s = max{i : √λ_i ≥ ε} (s = 0 gives 1).
pub fn ellipsoid_packing_bound(eigenvalues: &[f64], eps: f64) -> (usize, f64) {
    let s = eigenvalues.iter().take_while(|l| l.sqrt() >= eps).count();
    let bound = eigenvalues[..s]
        .iter()
        .map(|l| 8.0 * std::f64::consts::SQRT_2 / eps * l.sqrt())
        .product();
    (s, bound)
}

pub fn validate_packing_bound(state: &OnlineRegressor) -> PackingReport {
    let metric = state.metric();
    let eps = state.current_radius();
    let (s, bound) = ellipsoid_packing_bound(metric.eigenvalues(), eps);
    let centers = state.centers();
    let embedded: Vec<Vec<f64>> = centers.iter().map(|c| metric.embed(&c.anchor)).collect();
    let mut packing_property = true;
    'outer: for j in 1..centers.len() {
        for i in 0..j {
            let d: Vec<f64> = embedded[i].iter().zip(&embedded[j]).map(|(a, b)| a - b).collect();
            if norm(&d) <= centers[j].created_radius {
                packing_property = false;
                break 'outer;
            }
        }
    }
    let n = centers.len();
    PackingReport {
        n_centers: n,
        final_radius: eps,
        s,
        bound,
        packing_property,
        slack: bound - n as f64,
        pass: packing_property && n as f64 <= bound,
    }
}

// ---------------------------------------------------------------------------
// Lipschitz continuity in the metric

/// Differentiable test functions whose directional sup-norms over the unit
/// ball have closed forms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum TestFunction {
    Constant { c: f64 },
    /// wᵀx + c
    Affine { w: Vec<f64>, c: f64 },
    /// ½ xᵀQx + wᵀx
    Quadratic { q: SymMatrix, w: Vec<f64> },
    /// g(bᵀx), |b| = 1
    SingleIndex { b: Vec<f64>, link: Link },
}

impl TestFunction {
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            TestFunction::Constant { c } => *c,
            TestFunction::Affine { w, c } => dot(w, x) + c,
            TestFunction::Quadratic { q, w } => 0.5 * q.quadratic_form(x) + dot(w, x),
            TestFunction::SingleIndex { b, link } => link.value(dot(b, x)),
        }
    }

    /// sup_{‖x‖≤1} |∇f(x)·u| for a unit vector u.
    pub fn directional_sup(&self, u: &[f64]) -> f64 {
        match self {
            TestFunction::Constant { .. } => 0.0,
            TestFunction::Affine { w, .. } => dot(w, u).abs(),
            TestFunction::Quadratic { q, w } => dot(w, u).abs() + norm(&q.matvec(u)),
            TestFunction::SingleIndex { b, link } => link.sup_abs_derivative() * dot(b, u).abs(),
        }
    }

    /// √(Σ_i ‖∇_{u_i} f‖²_∞ / λ_i) over the eigenbasis of `metric`.
    pub fn metric_lipschitz(&self, metric: &Metric) -> f64 {
        let spec = metric.spectrum();
        spec.vectors
            .iter()
            .zip(&spec.values)
            .map(|(u, l)| self.directional_sup(u).powi(2) / l)
            .sum::<f64>()
            .sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LipschitzReport {
    pub pairs: usize,
    pub violations: usize,
    pub constant: f64,
    /// max |f(x) − f(x′)| / (‖x − x′‖_M · constant) over sampled pairs.
    pub max_ratio: f64,
    /// Ratio on the pair aligned with M⁻¹w (affine functions only).
    pub aligned_ratio: Option<f64>,
    pub pass: bool,
}

pub const LIPSCHITZ_SLACK: f64 = 1e-9;

pub fn validate_lipschitz(
    metric: &Metric,
    f: &TestFunction,
    pairs: usize,
    seed: u64,
) -> LipschitzReport {
    let d = metric.dim();
    let constant = f.metric_lipschitz(metric);
    let ratio = |x: &[f64], z: &[f64]| -> (f64, bool) {
        let lhs = (f.eval(x) - f.eval(z)).abs();
        let dist = metric.distance(x, z).expect("dimensions match");
        let rhs = dist * constant;
        let r = if rhs > 0.0 { lhs / rhs } else { 0.0 };
        (r, lhs > rhs + LIPSCHITZ_SLACK)
    };
    let mut violations = 0;
    let mut max_ratio: f64 = 0.0;
    for i in 0..pairs as u64 {
        let mut rng = substream(seed, Domain::Lipschitz, i);
        let x = uniform_ball(&mut rng, d);
        let z = uniform_ball(&mut rng, d);
        let (r, bad) = ratio(&x, &z);
        max_ratio = max_ratio.max(r);
        violations += bad as usize;
    }
    let aligned_ratio = match f {
        TestFunction::Affine { w, .. } if norm(w) > 0.0 => {
            // direction M⁻¹w = Σ (w·u_i)/λ_i u_i
            let spec = metric.spectrum();
            let mut v = vec![0.0; d];
            for (u, l) in spec.vectors.iter().zip(&spec.values) {
                let c = dot(w, u) / l;
                v.iter_mut().zip(u).for_each(|(vi, ui)| *vi += c * ui);
            }
            let s = 0.5 / norm(&v);
            let x: Vec<f64> = v.iter().map(|c| c * s).collect();
            let z: Vec<f64> = x.iter().map(|c| -c).collect();
            let (r, bad) = ratio(&x, &z);
            violations += bad as usize;
            max_ratio = max_ratio.max(r);
            Some(r)
        }
        _ => None,
    };
    LipschitzReport {
        pairs,
        violations,
        constant,
        max_ratio,
        aligned_ratio,
        pass: violations == 0,
    }
}

// ---------------------------------------------------------------------------
// Volumetric packing bound

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VolumetricReport {
    pub dim: usize,
    pub eps: f64,
    pub packing_size: usize,
    /// vol(B + (ε/2)B_M) / vol((ε/2)B_M)
    pub bound: f64,
    pub bound_std_error: f64,
    /// "exact" (d = 1) or "monte_carlo".
    pub method: String,
    pub mc_samples: usize,
    /// Largest possible ε-packing, known exactly in one dimension.
    pub exact_max_packing: Option<usize>,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VolumetricSettings {
    pub proposals: usize,
    pub mc_samples: usize,
}

impl Default for VolumetricSettings {
    fn default() -> Self {
        VolumetricSettings {
            proposals: 100_000,
            mc_samples: 1_000_000,
        }
    }
}

/// Greedy ε-packing of the unit ball: random proposals are kept when they are
/// farther than ε (in the metric) from every point kept so far.
pub fn greedy_packing(metric: &Metric, eps: f64, proposals: usize, seed: u64) -> Vec<Vec<f64>> {
    let d = metric.dim();
    let mut rng = substream(seed, Domain::Volumetric, 0);
    let mut kept: Vec<Vec<f64>> = Vec::new();
    let mut embedded: Vec<Vec<f64>> = Vec::new();
    let eps2 = eps * eps;
    for _ in 0..proposals {
        let x = uniform_ball(&mut rng, d);
        let e = metric.embed(&x);
        let far = embedded
            .iter()
            .all(|k| k.iter().zip(&e).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() > eps2);
        if far {
            kept.push(x);
            embedded.push(e);
        }
    }
    kept
}

/// Euclidean distance from p to {z : Σ λ_i z_i² ≤ c²}, all in eigen-coordinates.
fn distance_to_ellipsoid(p: &[f64], lambdas: &[f64], c: f64) -> f64 {
    let c2 = c * c;
    let phi = |nu: f64| -> f64 {
        p.iter()
            .zip(lambdas)
            .map(|(pi, l)| l * pi * pi / (1.0 + nu * l).powi(2))
            .sum::<f64>()
            - c2
    };
    if phi(0.0) <= 0.0 {
        return 0.0;
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    while phi(hi) > 0.0 {
        hi *= 2.0;
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if phi(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    p.iter()
        .zip(lambdas)
        .map(|(pi, l)| {
            let z = pi / (1.0 + hi * l);
            (pi - z) * (pi - z)
        })
        .sum::<f64>()
        .sqrt()
}

/// Monte Carlo estimate of vol(B + (ε/2)B_M) / vol((ε/2)B_M) with a
/// delta-method standard error.
fn monte_carlo_volume_ratio(metric: &Metric, eps: f64, samples: usize, seed: u64) -> (f64, f64) {
    let lambdas = metric.eigenvalues();
    let d = lambdas.len();
    let r = eps / 2.0;
    let semi: Vec<f64> = lambdas.iter().map(|l| r / l.sqrt()).collect();

    // Small ellipsoid inside its bounding box.
    let mut rng = substream(seed, Domain::Volumetric, 1);
    let box_small: f64 = semi.iter().map(|s| 2.0 * s).product();
    let mut hits_small = 0usize;
    for _ in 0..samples {
        let q: f64 = semi
            .iter()
            .zip(lambdas)
            .map(|(s, l)| {
                let z = rng.gen_range(-s..*s);
                l * z * z
            })
            .sum();
        hits_small += (q <= r * r) as usize;
    }

    // Minkowski sum inside its bounding box. The unit ball is rotation
    // invariant, so working in the metric's eigen-coordinates is exact.
    let mut rng = substream(seed, Domain::Volumetric, 2);
    let big: Vec<f64> = semi.iter().map(|s| 1.0 + s).collect();
    let box_big: f64 = big.iter().map(|s| 2.0 * s).product();
    let mut hits_big = 0usize;
    let mut p = vec![0.0; d];
    for _ in 0..samples {
        for (pi, s) in p.iter_mut().zip(&big) {
            *pi = rng.gen_range(-s..*s);
        }
        hits_big += (norm(&p) <= 1.0 || distance_to_ellipsoid(&p, lambdas, r) <= 1.0) as usize;
    }

    let n = samples as f64;
    let (fs, fb) = (hits_small as f64 / n, hits_big as f64 / n);
    let (vs, vb) = (box_small * fs, box_big * fb);
    let se_s = box_small * (fs * (1.0 - fs) / n).sqrt();
    let se_b = box_big * (fb * (1.0 - fb) / n).sqrt();
    let ratio = vb / vs;
    let se = ratio * ((se_b / vb).powi(2) + (se_s / vs).powi(2)).sqrt();
    (ratio, se)
}

pub fn validate_volumetric_bound(
    metric: &Metric,
    eps: f64,
    settings: VolumetricSettings,
    seed: u64,
) -> VolumetricReport {
    let d = metric.dim();
    let packing = greedy_packing(metric, eps, settings.proposals, seed);
    let size = packing.len();
    if d == 1 {
        // Gap g in Euclidean units; ε-packings of [−1, 1] hold at most ⌈2/g⌉ points.
        let g = eps / metric.eigenvalues()[0].sqrt();
        let bound = (2.0 + g) / g;
        let exact_max = (2.0 / g).ceil() as usize;
        return VolumetricReport {
            dim: 1,
            eps,
            packing_size: size,
            bound,
            bound_std_error: 0.0,
            method: "exact".into(),
            mc_samples: 0,
            exact_max_packing: Some(exact_max),
            pass: size <= exact_max && exact_max as f64 <= bound,
        };
    }
    let (bound, se) = monte_carlo_volume_ratio(metric, eps, settings.mc_samples, seed);
    VolumetricReport {
        dim: d,
        eps,
        packing_size: size,
        bound,
        bound_std_error: se,
        method: "monte_carlo".into(),
        mc_samples: settings.mc_samples,
        exact_max_packing: None,
        pass: size as f64 <= bound + 3.0 * se,
    }
}

// ---------------------------------------------------------------------------
// Monotonicity of F(t) = (μ_d + 2(T₀+t)^{−α}) t^{2/(1+d)}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityReport {
    pub mu_d: f64,
    pub alpha: f64,
    pub dim: usize,
    pub t0: f64,
    pub grid_points: usize,
    pub violations: usize,
    /// Smallest F(t_{k+1}) − F(t_k) on the grid.
    pub min_increment: f64,
    pub pass: bool,
}

pub const MONOTONICITY_SLACK: f64 = 1e-12;

/// T₀ = ⌈((d+1)/(2μ_d))^{1/α}⌉
pub fn monotonicity_t0(mu_d: f64, alpha: f64, d: usize) -> f64 {
    ((d as f64 + 1.0) / (2.0 * mu_d)).powf(1.0 / alpha).ceil()
}

/// Checks F on t = 1, 1.01, …, t_max.
pub fn check_radius_monotonicity(mu_d: f64, alpha: f64, d: usize, t_max: f64) -> MonotonicityReport {
    let t0 = monotonicity_t0(mu_d, alpha, d);
    let expo = 2.0 / (1.0 + d as f64);
    let f = |t: f64| (mu_d + 2.0 * (t0 + t).powf(-alpha)) * t.powf(expo);
    let steps = ((t_max - 1.0) * 100.0).round() as usize;
    let mut prev = f(1.0);
    let mut violations = 0;
    let mut min_increment = f64::INFINITY;
    for k in 1..=steps {
        let cur = f(1.0 + k as f64 / 100.0);
        let inc = cur - prev;
        min_increment = min_increment.min(inc);
        violations += (cur < prev - MONOTONICITY_SLACK) as usize;
        prev = cur;
    }
    MonotonicityReport {
        mu_d,
        alpha,
        dim: d,
        t0,
        grid_points: steps + 1,
        violations,
        min_increment,
        pass: violations == 0,
    }
}

// ---------------------------------------------------------------------------
// Random instances

/// Unit-spectral-radius metric with random eigenbasis and log-uniform
/// eigenvalues in [1/condition, 1].
pub fn random_metric<R: Rng>(rng: &mut R, d: usize, condition: f64) -> Metric {
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(d);
    while basis.len() < d {
        let mut v: Vec<f64> = (0..d).map(|_| StandardNormal.sample(rng)).collect();
        for b in &basis {
            let c = dot(&v, b);
            v.iter_mut().zip(b).for_each(|(vi, bi)| *vi -= c * bi);
        }
        let n = norm(&v);
        if n > 1e-6 {
            basis.push(v.into_iter().map(|x| x / n).collect());
        }
    }
    let mut values = vec![1.0];
    values.extend((1..d).map(|_| condition.powf(-rng.gen::<f64>())));
    let m = SymMatrix::from_outer_products(
        d,
        values.iter().zip(&basis).map(|(&l, b)| (l, b.as_slice())),
    );
    spectral_normalize(&m).expect("eigenvalues bounded away from zero")
}

/// Grid points of spacing `h` inside the unit ball, in shuffled order.
pub fn grid_stream<R: Rng>(rng: &mut R, d: usize, h: f64, labels: impl Fn(&[f64]) -> f64) -> Vec<LabeledExample> {
    let m = (1.0 / h).floor() as i64;
    let mut pts: Vec<Vec<f64>> = vec![vec![]];
    for _ in 0..d {
        pts = pts
            .into_iter()
            .flat_map(|p| {
                (-m..=m).map(move |k| {
                    let mut q = p.clone();
                    q.push(k as f64 * h);
                    q
                })
            })
            .collect();
    }
    pts.retain(|p| norm(p) <= 1.0);
    pts.shuffle(rng);
    pts.into_iter()
        .map(|x| {
            let y = labels(&x);
            LabeledExample { x, y }
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Batch drivers

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ValidationSummary {
    pub lemma: u8,
    pub trials: usize,
    pub failures: usize,
    pub pass: bool,
    pub reports: Vec<serde_json::Value>,
}

fn summarize<T: Serialize>(lemma: u8, reports: Vec<(bool, T)>) -> ValidationSummary {
    let failures = reports.iter().filter(|(ok, _)| !ok).count();
    ValidationSummary {
        lemma,
        trials: reports.len(),
        failures,
        pass: failures == 0,
        reports: reports
            .into_iter()
            .map(|(_, r)| serde_json::to_value(r).expect("reports serialize"))
            .collect(),
    }
}

/// Packing-bound runs: d alternates 2/3, data alternates uniform-ball/grid.
pub fn packing_trials(trials: usize, rounds: usize, seed: u64) -> Result<ValidationSummary> {
    let mut out = Vec::with_capacity(trials);
    for i in 0..trials {
        let mut rng = substream(seed, Domain::PackingBound, i as u64);
        let d = 2 + i % 2;
        let metric = random_metric(&mut rng, d, 100.0);
        let stream: Vec<LabeledExample> = if (i / 2) % 2 == 0 {
            (0..rounds)
                .map(|_| {
                    let x = uniform_ball(&mut rng, d);
                    let y = rng.gen::<f64>();
                    LabeledExample { x, y }
                })
                .collect()
        } else {
            let h = if d == 2 { 0.03 } else { 0.12 };
            let mut s = grid_stream(&mut rng, d, h, |x| 0.5 + 0.4 * x[0]);
            s.truncate(rounds);
            s
        };
        let mut state = OnlineRegressor::new(metric);
        for ex in &stream {
            state.step(ex)?;
        }
        let rep = validate_packing_bound(&state);
        out.push((rep.pass, rep));
    }
    Ok(summarize(2, out))
}

/// (metric, test function) combinations, `pairs` random pairs each.
pub fn lipschitz_trials(trials: usize, pairs: usize, seed: u64) -> ValidationSummary {
    let mut out = Vec::with_capacity(trials);
    for i in 0..trials {
        let mut rng = substream(seed, Domain::Lipschitz, (1 << 32) | i as u64);
        let d = 1 + i % 4;
        let metric = random_metric(&mut rng, d, 100.0);
        let unit = |rng: &mut rand_chacha::ChaCha8Rng| {
            let v: Vec<f64> = (0..d).map(|_| StandardNormal.sample(rng)).collect();
            let n = norm(&v);
            v.into_iter().map(|x| x / n).collect::<Vec<f64>>()
        };
        let f = match i % 4 {
            0 => TestFunction::Affine { w: unit(&mut rng), c: 0.1 },
            1 => {
                let mut q = SymMatrix::zeros(d);
                for a in 0..d {
                    for b in a..d {
                        q.set(a, b, rng.gen_range(-1.0..1.0));
                    }
                }
                TestFunction::Quadratic { q, w: unit(&mut rng) }
            }
            2 => TestFunction::SingleIndex { b: unit(&mut rng), link: Link::Sine { freq: 3.0, phase: 0.3 } },
            _ => TestFunction::SingleIndex { b: unit(&mut rng), link: Link::default() },
        };
        let rep = validate_lipschitz(&metric, &f, pairs, seed ^ i as u64);
        let tight = rep.aligned_ratio.map_or(true, |r| (r - 1.0).abs() <= 0.01);
        out.push((rep.pass && tight, rep));
    }
    summarize(3, out)
}

pub fn volumetric_trials(trials: usize, settings: VolumetricSettings, seed: u64) -> ValidationSummary {
    let mut out = Vec::with_capacity(trials);
    for i in 0..trials {
        let mut rng = substream(seed, Domain::Volumetric, (1 << 32) | i as u64);
        let d = 1 + i % 3;
        let metric = random_metric(&mut rng, d, 10.0);
        let eps = rng.gen_range(0.2..1.0);
        let rep = validate_volumetric_bound(&metric, eps, settings, seed.wrapping_add(i as u64));
        out.push((rep.pass, rep));
    }
    summarize(1, out)
}

pub fn monotonicity_trials(trials: usize, t_max: f64, seed: u64) -> ValidationSummary {
    let mut out = Vec::with_capacity(trials);
    for i in 0..trials {
        let mut rng = substream(seed, Domain::Monotonicity, i as u64);
        let mu_d = 1.0 - rng.gen::<f64>();
        let alpha = [0.25, 0.5, 1.0][rng.gen_range(0..3)];
        let d = rng.gen_range(1..=10);
        let rep = check_radius_monotonicity(mu_d, alpha, d, t_max);
        out.push((rep.pass, rep));
    }
    summarize(5, out)
}

/// Replays a fixed-metric run and returns its packing report.
pub fn packing_report_for(metric: &Metric, stream: &[LabeledExample]) -> Result<PackingReport> {
    let mut state = OnlineRegressor::new(metric.clone());
    for ex in stream {
        state.step(ex)?;
    }
    Ok(validate_packing_bound(&state))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_example_packing() {
        let mut st = OnlineRegressor::new(Metric::identity(2));
        st.step(&LabeledExample { x: vec![0.1, 0.1], y: 0.5 }).unwrap();
        let rep = validate_packing_bound(&st);
        assert_eq!(rep.n_centers, 1);
        assert!(rep.bound >= 1.0 && rep.pass);
    }

    #[test]
    fn identity_uniform_ball_packing() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let stream: Vec<_> = (0..4096)
            .map(|_| LabeledExample { x: uniform_ball(&mut rng, 2), y: 0.3 })
            .collect();
        let rep = packing_report_for(&Metric::identity(2), &stream).unwrap();
        assert!(rep.pass, "{rep:?}");
        assert_eq!(rep.s, 2);
    }

    #[test]
    fn grid_packing() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let stream = grid_stream(&mut rng, 2, 0.03, |_| 0.5);
        assert!(stream.len() > 3000);
        let rep = packing_report_for(&Metric::identity(2), &stream).unwrap();
        assert!(rep.pass, "{rep:?}");
    }

    #[test]
    fn packing_bound_formula() {
        let (s, b) = ellipsoid_packing_bound(&[1.0, 0.25, 1e-4], 0.1);
        assert_eq!(s, 2);
        let c = 8.0 * std::f64::consts::SQRT_2 / 0.1;
        assert_abs_diff_eq!(b, c * c * 0.5, epsilon = 1e-9);
    }

    #[test]
    fn lipschitz_examples() {
        let id = Metric::identity(2);
        let rep = validate_lipschitz(&id, &TestFunction::Constant { c: 0.3 }, 1000, 1);
        assert_eq!((rep.constant, rep.max_ratio, rep.violations), (0.0, 0.0, 0));

        let w = vec![0.6, -0.8];
        let rep = validate_lipschitz(&id, &TestFunction::Affine { w, c: 0.0 }, 5000, 2);
        assert!(rep.pass);
        assert_abs_diff_eq!(rep.constant, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(rep.aligned_ratio.unwrap(), 1.0, epsilon = 1e-12);

        let lam = 0.2;
        let m = spectral_normalize(&SymMatrix::from_diagonal(&[1.0, lam])).unwrap();
        let f = TestFunction::Affine { w: vec![0.0, 1.0], c: 0.0 };
        let rep = validate_lipschitz(&m, &f, 5000, 3);
        assert_abs_diff_eq!(rep.constant, (1.0 / lam).sqrt(), epsilon = 1e-12);
        assert!(rep.pass);
        assert!((rep.aligned_ratio.unwrap() - 1.0).abs() < 0.01);
    }

    #[test]
    fn volumetric_diameter_case() {
        let rep = validate_volumetric_bound(
            &Metric::identity(2),
            2.5,
            VolumetricSettings { proposals: 2000, mc_samples: 20_000 },
            1,
        );
        assert_eq!(rep.packing_size, 1);
        assert!(rep.bound >= 1.0 && rep.pass);
    }

    #[test]
    fn volumetric_exact_interval() {
        let rep = validate_volumetric_bound(&Metric::identity(1), 0.5, VolumetricSettings::default(), 3);
        assert_eq!(rep.bound, 5.0);
        assert_eq!(rep.exact_max_packing, Some(4));
        assert!(rep.packing_size <= 4 && rep.pass);
    }

    #[test]
    fn volumetric_anisotropic() {
        let m = spectral_normalize(&SymMatrix::from_diagonal(&[1.0, 0.25])).unwrap();
        let rep = validate_volumetric_bound(&m, 0.25, VolumetricSettings { proposals: 100_000, mc_samples: 200_000 }, 4);
        assert!(rep.pass, "{rep:?}");
        // exact: small ellipse area π·0.125·0.25; sum area = π + perimeter·… > π
        let small = std::f64::consts::PI * 0.125 * 0.25;
        assert!(rep.bound > std::f64::consts::PI / small);
    }

    #[test]
    fn ellipsoid_distance() {
        // circle of radius 0.5
        assert_abs_diff_eq!(distance_to_ellipsoid(&[2.0, 0.0], &[1.0, 1.0], 0.5), 1.5, epsilon = 1e-9);
        assert_eq!(distance_to_ellipsoid(&[0.1, 0.1], &[1.0, 1.0], 0.5), 0.0);
        // axis-aligned ellipse, semi-axes (1, 2)
        assert_abs_diff_eq!(distance_to_ellipsoid(&[0.0, 3.0], &[1.0, 0.25], 1.0), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn monotonicity_single_case() {
        let rep = check_radius_monotonicity(0.3, 0.5, 4, 100.0);
        assert!(rep.pass);
        assert_eq!(rep.grid_points, 9901);
        assert_eq!(rep.t0, ((5.0f64 / 0.6).powi(2)).ceil());
    }

    #[test]
    fn random_metric_condition() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for d in 1..6 {
            let m = random_metric(&mut rng, d, 100.0);
            assert_eq!(m.eigenvalues()[0], 1.0);
            assert!(*m.eigenvalues().last().unwrap() >= 0.01 - 1e-12);
        }
    }
}
