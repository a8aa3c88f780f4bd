//! Synthetic regression streams Y = f₀(X) + ν with X uniform on the unit ball,
//! plus ground-truth quantities (f₀, ∇f₀, G = E[∇f₀∇f₀ᵀ], directional sup-norms).

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::rng::{substream, Domain};
use crate::error::{Error, Result};
use crate::linalg::{dot, eig_sym, norm, SymMatrix};
use crate::regressor::LabeledExample;

/// Sample counts used when G has no closed form.
pub const MC_SAMPLES: usize = 1_000_000;
const SUP_SAMPLES: usize = 20_000;

/// Scalar link g with range inside [0.1, 0.9] on [−1, 1].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Link {
    /// intercept + slope·u
    Affine { intercept: f64, slope: f64 },
    /// 0.1 + 0.8·σ(gain·u + offset)
    Sigmoid { gain: f64, offset: f64 },
    /// 0.5 + 0.4·sin(freq·u + phase)
    Sine { freq: f64, phase: f64 },
}

impl Default for Link {
    fn default() -> Self {
        Link::Sigmoid {
            gain: 4.0,
            offset: 0.0,
        }
    }
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

impl Link {
    pub fn value(&self, u: f64) -> f64 {
        match *self {
            Link::Affine { intercept, slope } => intercept + slope * u,
            Link::Sigmoid { gain, offset } => 0.1 + 0.8 * sigmoid(gain * u + offset),
            Link::Sine { freq, phase } => 0.5 + 0.4 * (freq * u + phase).sin(),
        }
    }

    pub fn derivative(&self, u: f64) -> f64 {
        match *self {
            Link::Affine { slope, .. } => slope,
            Link::Sigmoid { gain, offset } => {
                let s = sigmoid(gain * u + offset);
                0.8 * gain * s * (1.0 - s)
            }
            Link::Sine { freq, phase } => 0.4 * freq * (freq * u + phase).cos(),
        }
    }

    /// sup_{|u|≤1} |g′(u)| on a 10⁵-point grid (exact for affine links).
    pub fn sup_abs_derivative(&self) -> f64 {
        if let Link::Affine { slope, .. } = *self {
            return slope.abs();
        }
        let m = 100_000;
        (0..=m)
            .map(|i| self.derivative(-1.0 + 2.0 * i as f64 / m as f64).abs())
            .fold(0.0, f64::max)
    }

    fn validate(&self) -> Result<()> {
        if let Link::Affine { intercept, slope } = *self {
            let (lo, hi) = (intercept - slope.abs(), intercept + slope.abs());
            if lo < 0.1 - 1e-12 || hi > 0.9 + 1e-12 {
                return Err(Error::Spec(format!(
                    "affine link range [{lo}, {hi}] leaves [0.1, 0.9]"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorKind {
    /// f₀(x) = g(b·x)
    SingleIndex,
    /// f₀(x) = (1/k) Σ_j g(b_j·x)
    MultiIndex,
    /// f₀(x) = (1/d) Σ_i g(x_i)
    Additive,
    /// f₀(x) = g(0)
    Constant,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub kind: GeneratorKind,
    pub dim: usize,
    /// Row-orthonormal k×d matrix B (index kinds only).
    #[serde(default)]
    pub projector: Vec<Vec<f64>>,
    #[serde(default)]
    pub link: Link,
    #[serde(default)]
    pub noise_sd: f64,
    #[serde(default)]
    pub seed: u64,
}

impl GeneratorSpec {
    /// Single-index model along b = (1, …, 1)/√d with the default sigmoid link.
    pub fn single_index(dim: usize, noise_sd: f64, seed: u64) -> Self {
        let b = vec![1.0 / (dim as f64).sqrt(); dim];
        GeneratorSpec {
            kind: GeneratorKind::SingleIndex,
            dim,
            projector: vec![b],
            link: Link::default(),
            noise_sd,
            seed,
        }
    }

    pub fn constant(dim: usize, seed: u64) -> Self {
        GeneratorSpec {
            kind: GeneratorKind::Constant,
            dim,
            projector: Vec::new(),
            link: Link::Affine {
                intercept: 0.5,
                slope: 0.0,
            },
            noise_sd: 0.0,
            seed,
        }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        GeneratorSpec {
            seed,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::Spec("dimension must be positive".into()));
        }
        if !(self.noise_sd >= 0.0) || !self.noise_sd.is_finite() {
            return Err(Error::Spec("noise_sd must be finite and ≥ 0".into()));
        }
        self.link.validate()?;
        match self.kind {
            GeneratorKind::SingleIndex | GeneratorKind::MultiIndex => {
                let k = self.projector.len();
                if k == 0 || (self.kind == GeneratorKind::SingleIndex && k != 1) {
                    return Err(Error::Spec(format!("{:?} needs a projector, got {k} rows", self.kind)));
                }
                if k > self.dim {
                    return Err(Error::Spec("projector has more rows than dimensions".into()));
                }
                for (i, row) in self.projector.iter().enumerate() {
                    if row.len() != self.dim {
                        return Err(Error::Spec(format!("projector row {i} has wrong length")));
                    }
                    for (j, other) in self.projector.iter().enumerate() {
                        let expect = if i == j { 1.0 } else { 0.0 };
                        if (dot(row, other) - expect).abs() > 1e-8 {
                            return Err(Error::Spec("projector rows are not orthonormal".into()));
                        }
                    }
                }
            }
            GeneratorKind::Additive | GeneratorKind::Constant => {}
        }
        Ok(())
    }

    /// Regression function f₀.
    pub fn f0(&self, x: &[f64]) -> f64 {
        match self.kind {
            GeneratorKind::SingleIndex | GeneratorKind::MultiIndex => {
                let k = self.projector.len() as f64;
                self.projector
                    .iter()
                    .map(|b| self.link.value(dot(b, x)))
                    .sum::<f64>()
                    / k
            }
            GeneratorKind::Additive => {
                x.iter().map(|&v| self.link.value(v)).sum::<f64>() / self.dim as f64
            }
            GeneratorKind::Constant => self.link.value(0.0),
        }
    }

    /// ∇f₀
    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; self.dim];
        match self.kind {
            GeneratorKind::SingleIndex | GeneratorKind::MultiIndex => {
                let k = self.projector.len() as f64;
                for b in &self.projector {
                    let s = self.link.derivative(dot(b, x)) / k;
                    g.iter_mut().zip(b).for_each(|(gi, bi)| *gi += s * bi);
                }
            }
            GeneratorKind::Additive => {
                for (gi, &v) in g.iter_mut().zip(x) {
                    *gi = self.link.derivative(v) / self.dim as f64;
                }
            }
            GeneratorKind::Constant => {}
        }
        g
    }
}

/// Uniform point in the unit ball: Gaussian direction times U^{1/d}.
pub fn uniform_ball<R: Rng>(rng: &mut R, d: usize) -> Vec<f64> {
    loop {
        let z: Vec<f64> = (0..d).map(|_| StandardNormal.sample(rng)).collect();
        let n = norm(&z);
        if n == 0.0 {
            continue;
        }
        let r = rng.gen::<f64>().powf(1.0 / d as f64);
        return z.into_iter().map(|v| v * r / n).collect();
    }
}

/// Standard normal conditioned on |z| ≤ 3, by rejection.
fn truncated_normal<R: Rng>(rng: &mut R) -> f64 {
    loop {
        let z: f64 = StandardNormal.sample(rng);
        if z.abs() <= 3.0 {
            return z;
        }
    }
}

/// Draws round `index` of the stream described by `spec`.
pub fn sample_example(spec: &GeneratorSpec, index: u64) -> LabeledExample {
    let mut rng = substream(spec.seed, Domain::Data, index);
    let x = uniform_ball(&mut rng, spec.dim);
    let mut y = spec.f0(&x);
    if spec.noise_sd > 0.0 {
        y += spec.noise_sd * truncated_normal(&mut rng);
    }
    LabeledExample {
        x,
        y: y.clamp(0.0, 1.0),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleInfo {
    pub spec: GeneratorSpec,
    /// G = E[∇f₀(X)∇f₀(X)ᵀ]
    pub gop: SymMatrix,
    /// "closed_form", "quadrature" or "monte_carlo".
    pub gop_method: String,
    pub gop_samples: usize,
    /// Largest entrywise standard error (0 for deterministic methods).
    pub gop_std_error: f64,
    pub gop_eigenvalues: Vec<f64>,
    pub gop_eigenvectors: Vec<Vec<f64>>,
    /// ‖∇_{u_j} f₀‖_∞ along the eigenvectors of G.
    pub sup_norms: Vec<f64>,
    pub sup_method: String,
}

impl OracleInfo {
    pub fn f0(&self, x: &[f64]) -> f64 {
        self.spec.f0(x)
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        self.spec.gradient(x)
    }

    /// sup_x |∇f₀(x)·v| for a unit vector v.
    pub fn directional_sup_norm(&self, v: &[f64]) -> f64 {
        directional_sup(&self.spec, v)
    }
}

fn directional_sup(spec: &GeneratorSpec, v: &[f64]) -> f64 {
    match spec.kind {
        GeneratorKind::Constant => 0.0,
        GeneratorKind::SingleIndex => {
            spec.link.sup_abs_derivative() * dot(&spec.projector[0], v).abs()
        }
        GeneratorKind::MultiIndex | GeneratorKind::Additive => (0..SUP_SAMPLES as u64)
            .map(|i| {
                let mut rng = substream(spec.seed, Domain::Oracle, (1 << 32) | i);
                let x = uniform_ball(&mut rng, spec.dim);
                dot(&spec.gradient(&x), v).abs()
            })
            .fold(0.0, f64::max),
    }
}

/// E[h(b·X)] for X uniform on the unit d-ball and |b| = 1.
///
/// u = b·X has density ∝ (1 − u²)^{(d−1)/2}; with u = sin θ the integrand
/// becomes h(sin θ) cos^d θ on [−π/2, π/2], integrated by composite Simpson.
pub fn projected_expectation(d: usize, h: impl Fn(f64) -> f64) -> f64 {
    let m = 20_000;
    let a = -std::f64::consts::FRAC_PI_2;
    let step = std::f64::consts::PI / m as f64;
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..=m {
        let th = a + i as f64 * step;
        let w = if i == 0 || i == m {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        let c = th.cos().max(0.0).powi(d as i32);
        num += w * c * h(th.sin());
        den += w * c;
    }
    num / den
}

fn true_gop(spec: &GeneratorSpec) -> (SymMatrix, String, usize, f64) {
    let d = spec.dim;
    match spec.kind {
        GeneratorKind::Constant => (SymMatrix::zeros(d), "closed_form".into(), 0, 0.0),
        GeneratorKind::SingleIndex => {
            let b = &spec.projector[0];
            let (scale, method) = match spec.link {
                Link::Affine { slope, .. } => (slope * slope, "closed_form"),
                link => (
                    projected_expectation(d, |u| link.derivative(u).powi(2)),
                    "quadrature",
                ),
            };
            let mut g = SymMatrix::zeros(d);
            g.add_outer(scale, b);
            (g, method.into(), 0, 0.0)
        }
        GeneratorKind::MultiIndex | GeneratorKind::Additive => {
            let mut sum = vec![0.0; d * d];
            let mut sumsq = vec![0.0; d * d];
            for i in 0..MC_SAMPLES as u64 {
                let mut rng = substream(spec.seed, Domain::Oracle, i);
                let x = uniform_ball(&mut rng, d);
                let g = spec.gradient(&x);
                for a in 0..d {
                    for b in 0..d {
                        let v = g[a] * g[b];
                        sum[a * d + b] += v;
                        sumsq[a * d + b] += v * v;
                    }
                }
            }
            let n = MC_SAMPLES as f64;
            let mut g = SymMatrix::zeros(d);
            let mut se: f64 = 0.0;
            for a in 0..d {
                for b in a..d {
                    let mean = sum[a * d + b] / n;
                    let var = (sumsq[a * d + b] / n - mean * mean).max(0.0);
                    se = se.max((var / n).sqrt());
                    g.set(a, b, mean);
                }
            }
            (g, "monte_carlo".into(), MC_SAMPLES, se)
        }
    }
}

pub fn oracle_info(spec: &GeneratorSpec) -> Result<OracleInfo> {
    spec.validate()?;
    let (gop, gop_method, gop_samples, gop_std_error) = true_gop(spec);
    let eig = eig_sym(&gop)?;
    let sup_norms = eig.vectors.iter().map(|u| directional_sup(spec, u)).collect();
    let sup_method = match spec.kind {
        GeneratorKind::Constant => "closed_form",
        GeneratorKind::SingleIndex => "grid",
        _ => "monte_carlo",
    };
    Ok(OracleInfo {
        spec: spec.clone(),
        gop,
        gop_method,
        gop_samples,
        gop_std_error,
        gop_eigenvalues: eig.values,
        gop_eigenvectors: eig.vectors,
        sup_norms,
        sup_method: sup_method.into(),
    })
}

/// n i.i.d. examples plus the oracle description of the generating model.
pub fn generate(spec: &GeneratorSpec, n: usize) -> Result<(Vec<LabeledExample>, OracleInfo)> {
    if n == 0 {
        return Err(Error::Spec("sample size must be ≥ 1".into()));
    }
    let oracle = oracle_info(spec)?;
    Ok((generate_stream(spec, n), oracle))
}

/// The examples only, without computing the oracle.
pub fn generate_stream(spec: &GeneratorSpec, n: usize) -> Vec<LabeledExample> {
    (0..n as u64).map(|i| sample_example(spec, i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn constant_generator() {
        let spec = GeneratorSpec::constant(3, 4);
        let (data, oracle) = generate(&spec, 100).unwrap();
        assert!(data.iter().all(|e| e.y == 0.5));
        assert_eq!(oracle.gop, SymMatrix::zeros(3));
        assert_eq!(oracle.gradient(&[0.1, 0.2, 0.3]), vec![0.0; 3]);
    }

    #[test]
    fn affine_single_index_closed_form() {
        let spec = GeneratorSpec {
            kind: GeneratorKind::SingleIndex,
            dim: 2,
            projector: vec![vec![1.0, 0.0]],
            link: Link::Affine { intercept: 0.5, slope: 0.2 },
            noise_sd: 0.0,
            seed: 1,
        };
        let (data, oracle) = generate(&spec, 50).unwrap();
        for e in &data {
            assert_abs_diff_eq!(e.y, 0.5 + 0.2 * e.x[0], epsilon = 1e-15);
        }
        assert_abs_diff_eq!(oracle.gop.get(0, 0), 0.04, epsilon = 1e-15);
        assert_eq!(oracle.gop.get(0, 1), 0.0);
        assert_eq!(oracle.gop.get(1, 1), 0.0);
        assert_eq!(oracle.gop_method, "closed_form");
    }

    #[test]
    fn same_seed_same_data() {
        let spec = GeneratorSpec::single_index(4, 0.1, 99);
        let (a, _) = generate(&spec, 200).unwrap();
        let (b, _) = generate(&spec, 200).unwrap();
        assert_eq!(a, b);
        let c = generate_stream(&spec.with_seed(100), 200);
        assert_ne!(a, c);
        // prefix stability
        assert_eq!(generate_stream(&spec, 50), a[..50].to_vec());
    }

    #[test]
    fn labels_and_instances_in_range() {
        let mut spec = GeneratorSpec::single_index(3, 0.3, 5);
        spec.link = Link::Sine { freq: 3.0, phase: 0.2 };
        let (data, _) = generate(&spec, 5000).unwrap();
        for e in &data {
            e.validate().unwrap();
        }
    }

    #[test]
    fn invalid_specs_are_rejected() {
        let mut spec = GeneratorSpec::single_index(3, 0.0, 1);
        spec.projector = vec![vec![1.0, 1.0, 0.0]];
        assert!(matches!(generate(&spec, 1), Err(Error::Spec(_))));
        spec.projector = vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]];
        assert!(generate(&spec, 1).is_err());
        spec.kind = GeneratorKind::MultiIndex;
        spec.projector = vec![vec![1.0, 0.0, 0.0], vec![0.6, 0.8, 0.0]];
        assert!(generate(&spec, 1).is_err());
        let mut spec = GeneratorSpec::single_index(3, 0.0, 1);
        spec.link = Link::Affine { intercept: 0.5, slope: 0.5 };
        assert!(generate(&spec, 1).is_err());
        assert!(generate(&GeneratorSpec::single_index(3, 0.0, 1), 0).is_err());
    }

    #[test]
    fn quadrature_matches_monte_carlo() {
        let spec = GeneratorSpec::single_index(3, 0.0, 2);
        let oracle = oracle_info(&spec).unwrap();
        let mut acc = SymMatrix::zeros(3);
        let n = 200_000;
        for i in 0..n {
            let mut rng = substream(7, Domain::Oracle, i);
            let x = uniform_ball(&mut rng, 3);
            acc.add_outer(1.0 / n as f64, &spec.gradient(&x));
        }
        assert!(acc.max_abs_diff(&oracle.gop) < 2e-3);
        // G has rank one along b
        assert!(oracle.gop_eigenvalues[1].abs() < 1e-12);
    }

    #[test]
    fn projected_expectation_moments() {
        // E[u²] = 1/(d+2) for u = b·X, X uniform on the d-ball.
        for d in 1..8 {
            assert_abs_diff_eq!(projected_expectation(d, |u| u * u), 1.0 / (d as f64 + 2.0), epsilon = 1e-9);
        }
    }

    #[test]
    fn directional_sup_norms() {
        let spec = GeneratorSpec::single_index(2, 0.0, 1);
        let oracle = oracle_info(&spec).unwrap();
        // sigmoid gain 4: sup g′ = 0.8·4/4 = 0.8 at u = 0
        assert_abs_diff_eq!(oracle.sup_norms[0], 0.8, epsilon = 1e-12);
        assert!(oracle.sup_norms[1] < 1e-12);
    }
}
