//! Dense symmetric matrices, Jacobi eigendecomposition and Mahalanobis geometry.
//!
//! Everything here is small-dimensional (d up to a few hundred) and kept
//! dependency free so that results are bit-stable across platforms.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Jacobi sweeps before giving up.
pub const MAX_SWEEPS: usize = 100;

/// Eigenvalues below `PD_THRESHOLD * lambda_1` reject a matrix as a metric.
pub const PD_THRESHOLD: f64 = 1e-14;

/// Square symmetric matrix stored row-major. Writes go through [`SymMatrix::set`],
/// which mirrors the entry, so `a[i][j] == a[j][i]` holds bit for bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixJson", into = "MatrixJson")]
pub struct SymMatrix {
    dim: usize,
    data: Vec<f64>,
}

/// On-disk form: `{"dim": d, "rows": [[...], ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dim: usize,
    pub rows: Vec<Vec<f64>>,
}

impl TryFrom<MatrixJson> for SymMatrix {
    type Error = Error;

    fn try_from(json: MatrixJson) -> Result<Self> {
        if json.rows.len() != json.dim {
            return Err(Error::Format(format!(
                "dim is {} but {} rows were given",
                json.dim,
                json.rows.len()
            )));
        }
        SymMatrix::from_rows(&json.rows)
    }
}

impl From<SymMatrix> for MatrixJson {
    fn from(m: SymMatrix) -> Self {
        MatrixJson {
            dim: m.dim,
            rows: m.rows(),
        }
    }
}

impl SymMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be positive");
        SymMatrix {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = 1.0;
        }
        m
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &v) in diag.iter().enumerate() {
            m.data[i * m.dim + i] = v;
        }
        m
    }

    /// Builds a matrix from rows. Rejects ragged, non-finite or asymmetric input.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::Format("matrix has no rows".into()));
        }
        let mut data = Vec::with_capacity(dim * dim);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::Format(format!(
                    "row {i} has {} entries, expected {dim}",
                    row.len()
                )));
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::Format(format!("row {i} has non-finite entries")));
            }
            data.extend_from_slice(row);
        }
        for i in 0..dim {
            for j in (i + 1)..dim {
                if data[i * dim + j] != data[j * dim + i] {
                    return Err(Error::Format(format!("entry ({i},{j}) breaks symmetry")));
                }
            }
        }
        Ok(SymMatrix { dim, data })
    }

    /// Σ_i w_i v_i v_iᵀ from (weight, vector) pairs.
    pub fn from_outer_products<'a, I>(dim: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (f64, &'a [f64])>,
    {
        let mut m = Self::zeros(dim);
        for (w, v) in terms {
            m.add_outer(w, v);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.dim + j] = value;
        self.data[j * self.dim + i] = value;
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.dim).map(|r| r.to_vec()).collect()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    /// self += weight · v vᵀ, filling the upper triangle and mirroring.
    pub fn add_outer(&mut self, weight: f64, v: &[f64]) {
        assert_eq!(v.len(), self.dim);
        let d = self.dim;
        for i in 0..d {
            let wi = weight * v[i];
            for j in i..d {
                let value = self.data[i * d + j] + wi * v[j];
                self.data[i * d + j] = value;
                self.data[j * d + i] = value;
            }
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        SymMatrix {
            dim: self.dim,
            data: self.data.iter().map(|v| v * c).collect(),
        }
    }

    /// self + shift · I
    pub fn shifted(&self, shift: f64) -> Self {
        let mut m = self.clone();
        for i in 0..self.dim {
            m.data[i * self.dim + i] += shift;
        }
        m
    }

    pub fn sub(&self, other: &SymMatrix) -> Result<Self> {
        check_dim(self.dim, other.dim)?;
        Ok(SymMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &SymMatrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        self.data
            .chunks(self.dim)
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// vᵀ A v
    pub fn quadratic_form(&self, v: &[f64]) -> f64 {
        self.matvec(v).iter().zip(v).map(|(a, b)| a * b).sum()
    }

    /// Spectral norm, i.e. the largest absolute eigenvalue.
    pub fn spectral_norm(&self) -> Result<f64> {
        let spec = eig_sym(self)?;
        Ok(spec
            .values
            .iter()
            .map(|v| v.abs())
            .fold(0.0, f64::max))
    }
}

fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::Dimension { expected, got });
    }
    Ok(())
}

/// Eigenpairs sorted by descending eigenvalue. `vectors[i]` pairs with `values[i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// Σ_i λ_i v_i v_iᵀ
    pub fn reconstruct(&self) -> SymMatrix {
        SymMatrix::from_outer_products(
            self.dim(),
            self.values
                .iter()
                .zip(&self.vectors)
                .map(|(&l, v)| (l, v.as_slice())),
        )
    }
}

/// Symmetric eigendecomposition by cyclic Jacobi rotations.
///
/// Rotations are applied in row-major (p, q) order, eigenpairs are sorted
/// descending (stable on ties) and every eigenvector is flipped so that its
/// first non-negligible coordinate is positive. Identical input gives
/// identical output.
pub fn eig_sym(a: &SymMatrix) -> Result<Spectrum> {
    let n = a.dim;
    if a.data.iter().any(|v| !v.is_finite()) {
        return Err(Error::Format("matrix has non-finite entries".into()));
    }
    let mut m = a.data.clone();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }

    let scale = a.frobenius_norm();
    let mut converged = scale == 0.0;
    let mut sweep = 0;
    while !converged {
        let off: f64 = (0..n)
            .flat_map(|p| ((p + 1)..n).map(move |q| (p, q)))
            .map(|(p, q)| m[p * n + q] * m[p * n + q])
            .sum();
        if off.sqrt() <= f64::EPSILON * 1e-2 * scale || off == 0.0 {
            converged = true;
            break;
        }
        if sweep == MAX_SWEEPS {
            break;
        }
        sweep += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k * n + p];
                    let mkq = m[k * n + q];
                    m[k * n + p] = c * mkp - s * mkq;
                    m[k * n + q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p * n + k];
                    let mqk = m[q * n + k];
                    m[p * n + k] = c * mpk - s * mqk;
                    m[q * n + k] = s * mpk + c * mqk;
                }
                m[p * n + q] = 0.0;
                m[q * n + p] = 0.0;
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    if !converged {
        return Err(Error::NumericalFailure { sweeps: MAX_SWEEPS });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[j * n + j].total_cmp(&m[i * n + i]));
    let values = order.iter().map(|&i| m[i * n + i]).collect();
    let vectors = order
        .iter()
        .map(|&col| {
            let mut vec: Vec<f64> = (0..n).map(|k| v[k * n + col]).collect();
            let lead = vec.iter().find(|c| c.abs() > 1e-12).copied().unwrap_or(1.0);
            if lead < 0.0 {
                vec.iter_mut().for_each(|c| *c = -*c);
            }
            vec
        })
        .collect();
    Ok(Spectrum { values, vectors })
}

/// A positive-definite matrix with unit spectral radius and its cached spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct Metric {
    matrix: SymMatrix,
    spectrum: Spectrum,
    /// Rows √λ_i u_iᵀ, so that ‖x − z‖_M = ‖root·x − root·z‖₂.
    root: Vec<f64>,
}

impl Metric {
    pub fn identity(dim: usize) -> Self {
        let spectrum = Spectrum {
            values: vec![1.0; dim],
            vectors: (0..dim)
                .map(|i| (0..dim).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
                .collect(),
        };
        Self::assemble(SymMatrix::identity(dim), spectrum)
    }

    fn assemble(matrix: SymMatrix, spectrum: Spectrum) -> Self {
        let d = matrix.dim();
        let mut root = Vec::with_capacity(d * d);
        for (l, u) in spectrum.values.iter().zip(&spectrum.vectors) {
            let s = l.sqrt();
            root.extend(u.iter().map(|c| s * c));
        }
        Metric {
            matrix,
            spectrum,
            root,
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &SymMatrix {
        &self.matrix
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.spectrum.values
    }

    /// √((x−z)ᵀ M (x−z))
    pub fn distance(&self, x: &[f64], z: &[f64]) -> Result<f64> {
        check_dim(self.dim(), x.len())?;
        check_dim(self.dim(), z.len())?;
        let diff: Vec<f64> = x.iter().zip(z).map(|(a, b)| a - b).collect();
        Ok(self.matrix.quadratic_form(&diff).max(0.0).sqrt())
    }

    /// Maps x to coordinates in which the metric is Euclidean.
    pub fn embed(&self, x: &[f64]) -> Vec<f64> {
        let d = self.dim();
        self.root
            .chunks(d)
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }
}

pub fn mahalanobis_distance(metric: &Metric, x: &[f64], z: &[f64]) -> Result<f64> {
    metric.distance(x, z)
}

/// Rescales a positive-definite matrix to unit spectral radius.
///
/// The eigenvalues become λ_i/λ_1 with the top one pinned to exactly 1.
pub fn spectral_normalize(a: &SymMatrix) -> Result<Metric> {
    let spec = eig_sym(a)?;
    let top = spec.values[0];
    let smallest = *spec.values.last().unwrap();
    if !(top > 0.0) || smallest < PD_THRESHOLD * top {
        return Err(Error::NotPositiveDefinite {
            smallest,
            largest: top,
        });
    }
    let mut values: Vec<f64> = spec.values.iter().map(|l| l / top).collect();
    values[0] = 1.0;
    let spectrum = Spectrum {
        values,
        vectors: spec.vectors,
    };
    Ok(Metric::assemble(a.scaled(1.0 / top), spectrum))
}

/// det_k = λ_1 ⋯ λ_k.
pub fn truncated_determinant(spec: &Spectrum, k: usize) -> Result<f64> {
    if k == 0 || k > spec.dim() {
        return Err(Error::Index {
            index: k,
            max: spec.dim(),
        });
    }
    Ok(spec.values[..k].iter().product())
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Angle in degrees between `v` and the span of the orthonormal `basis`.
pub fn principal_angle_deg(v: &[f64], basis: &[Vec<f64>]) -> f64 {
    let nv = norm(v);
    let proj: f64 = basis.iter().map(|b| dot(v, b).powi(2)).sum::<f64>().sqrt();
    (proj / nv).clamp(0.0, 1.0).acos().to_degrees()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_sym(rng: &mut ChaCha8Rng, d: usize) -> SymMatrix {
        let mut m = SymMatrix::zeros(d);
        for i in 0..d {
            for j in i..d {
                m.set(i, j, rng.gen_range(-1.0..1.0));
            }
        }
        m
    }

    fn check_spectrum(a: &SymMatrix, spec: &Spectrum) {
        let d = a.dim();
        for w in spec.values.windows(2) {
            assert!(w[0] >= w[1]);
        }
        for i in 0..d {
            for j in 0..d {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((dot(&spec.vectors[i], &spec.vectors[j]) - expect).abs() <= 1e-10);
            }
        }
        let err = spec.reconstruct().sub(a).unwrap().frobenius_norm();
        assert!(err <= 1e-8 * a.frobenius_norm().max(1.0), "reconstruction {err}");
    }

    #[test]
    fn diagonal_matrix_sorts_eigenpairs() {
        let a = SymMatrix::from_diagonal(&[3.0, 1.0, 2.0]);
        let spec = eig_sym(&a).unwrap();
        assert_eq!(spec.values, vec![3.0, 2.0, 1.0]);
        assert_eq!(spec.vectors[0], vec![1.0, 0.0, 0.0]);
        assert_eq!(spec.vectors[1], vec![0.0, 0.0, 1.0]);
        assert_eq!(spec.vectors[2], vec![0.0, 1.0, 0.0]);
    }

    #[test]
    fn two_by_two_matches_characteristic_roots() {
        // λ² − 4λ + 3 = 0 → λ ∈ {3, 1}
        let a = SymMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let spec = eig_sym(&a).unwrap();
        assert_abs_diff_eq!(spec.values[0], 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(spec.values[1], 1.0, epsilon = 1e-14);
        let h = 1.0 / 2f64.sqrt();
        assert_abs_diff_eq!(spec.vectors[0][0], h, epsilon = 1e-14);
        assert_abs_diff_eq!(spec.vectors[0][1], h, epsilon = 1e-14);
        assert_abs_diff_eq!(spec.vectors[1][0], h, epsilon = 1e-14);
        assert_abs_diff_eq!(spec.vectors[1][1], -h, epsilon = 1e-14);
    }

    #[test]
    fn identity_has_unit_spectrum() {
        let spec = eig_sym(&SymMatrix::identity(4)).unwrap();
        assert_eq!(spec.values, vec![1.0; 4]);
    }

    #[test]
    fn zero_matrix_is_handled() {
        let spec = eig_sym(&SymMatrix::zeros(3)).unwrap();
        assert_eq!(spec.values, vec![0.0; 3]);
        check_spectrum(&SymMatrix::zeros(3), &spec);
    }

    #[test]
    fn random_matrices_satisfy_spectrum_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for d in 1..=10 {
            for _ in 0..20 {
                let a = random_sym(&mut rng, d);
                let spec = eig_sym(&a).unwrap();
                check_spectrum(&a, &spec);
                assert_eq!(spec, eig_sym(&a).unwrap());
            }
        }
    }

    #[test]
    fn repeated_eigenvalues_give_matching_subspace() {
        // diag(2,2,1) rotated: the λ=2 eigenspace must be span(q1, q2)
        let h = 1.0 / 2f64.sqrt();
        let q = [vec![h, h, 0.0], vec![h, -h, 0.0], vec![0.0, 0.0, 1.0]];
        let a = SymMatrix::from_outer_products(
            3,
            [(2.0, q[0].as_slice()), (2.0, q[1].as_slice()), (1.0, q[2].as_slice())],
        );
        let spec = eig_sym(&a).unwrap();
        assert_abs_diff_eq!(spec.values[0], 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(spec.values[1], 2.0, epsilon = 1e-12);
        for v in &spec.vectors[..2] {
            assert!(principal_angle_deg(v, &q[..2]) < 1e-6);
        }
    }

    #[test]
    fn mahalanobis_examples() {
        let id = Metric::identity(2);
        assert_eq!(mahalanobis_distance(&id, &[1.0, 0.0], &[0.0, 0.0]).unwrap(), 1.0);
        let m = spectral_normalize(&SymMatrix::from_diagonal(&[1.0, 0.25])).unwrap();
        assert_abs_diff_eq!(m.distance(&[0.0, 2.0], &[0.0, 0.0]).unwrap(), 1.0, epsilon = 1e-15);
        assert_eq!(m.distance(&[0.3, -0.2], &[0.3, -0.2]).unwrap(), 0.0);
        assert!(matches!(
            m.distance(&[0.0], &[0.0, 0.0]),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn embedding_agrees_with_quadratic_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_sym(&mut rng, 4);
        let m = spectral_normalize(&a.shifted(5.0)).unwrap();
        for _ in 0..100 {
            let x: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let z: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let e: Vec<f64> = m.embed(&x).iter().zip(m.embed(&z)).map(|(a, b)| a - b).collect();
            assert_abs_diff_eq!(norm(&e), m.distance(&x, &z).unwrap(), epsilon = 1e-12);
        }
    }

    #[test]
    fn normalization_examples() {
        let m = spectral_normalize(&SymMatrix::from_diagonal(&[2.0, 1.0])).unwrap();
        assert_eq!(m.eigenvalues(), &[1.0, 0.5]);
        let m = spectral_normalize(&SymMatrix::identity(3)).unwrap();
        assert_eq!(m.matrix(), &SymMatrix::identity(3));
        let m = spectral_normalize(&SymMatrix::from_diagonal(&[4.0, 2.0, 1.0])).unwrap();
        assert_eq!(m.eigenvalues(), &[1.0, 0.5, 0.25]);
    }

    #[test]
    fn normalization_rejects_indefinite() {
        let err = spectral_normalize(&SymMatrix::from_diagonal(&[1.0, 0.0])).unwrap_err();
        assert!(matches!(err, Error::NotPositiveDefinite { .. }));
        let err = spectral_normalize(&SymMatrix::from_diagonal(&[1.0, 1e-15])).unwrap_err();
        assert!(matches!(err, Error::NotPositiveDefinite { .. }));
        assert!(spectral_normalize(&SymMatrix::from_diagonal(&[-1.0, -2.0])).is_err());
    }

    #[test]
    fn truncated_determinant_examples() {
        let spec = eig_sym(&SymMatrix::from_diagonal(&[1.0, 0.5, 0.25])).unwrap();
        assert_eq!(truncated_determinant(&spec, 2).unwrap(), 0.5);
        assert_eq!(truncated_determinant(&spec, 1).unwrap(), 1.0);
        let id = eig_sym(&SymMatrix::identity(3)).unwrap();
        assert_eq!(truncated_determinant(&id, 3).unwrap(), 1.0);
        assert!(matches!(truncated_determinant(&spec, 0), Err(Error::Index { .. })));
        assert!(matches!(truncated_determinant(&spec, 4), Err(Error::Index { .. })));
    }

    #[test]
    fn json_round_trip_and_rejection() {
        let m = SymMatrix::from_rows(&[vec![2.0, 0.5], vec![0.5, 1.0]]).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"{"dim":2,"rows":[[2.0,0.5],[0.5,1.0]]}"#);
        assert_eq!(serde_json::from_str::<SymMatrix>(&s).unwrap(), m);
        assert!(serde_json::from_str::<SymMatrix>(r#"{"dim":2,"rows":[[1,2],[3,4]]}"#).is_err());
        assert!(serde_json::from_str::<SymMatrix>(r#"{"dim":3,"rows":[[1,0],[0,1]]}"#).is_err());
    }

    proptest! {
        #[test]
        fn triangle_inequality_holds(seed in any::<u64>(), d in 1usize..6) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_sym(&mut rng, d);
            let m = spectral_normalize(&a.shifted(d as f64 + 0.5)).unwrap();
            let pt = |rng: &mut ChaCha8Rng| -> Vec<f64> { (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect() };
            for _ in 0..10_000 {
                let (x, y, z) = (pt(&mut rng), pt(&mut rng), pt(&mut rng));
                let xz = m.distance(&x, &z).unwrap();
                let xy = m.distance(&x, &y).unwrap();
                let yz = m.distance(&y, &z).unwrap();
                prop_assert!(xz <= xy + yz + 1e-10);
                prop_assert!((xy - m.distance(&y, &x).unwrap()).abs() <= 1e-15);
            }
        }

        #[test]
        fn normalization_is_scale_invariant(seed in any::<u64>(), d in 1usize..8, c in 1e-3f64..1e3) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_sym(&mut rng, d).shifted(d as f64 + 0.5);
            let m1 = spectral_normalize(&a).unwrap();
            let m2 = spectral_normalize(&a.scaled(c)).unwrap();
            prop_assert!(m1.matrix().max_abs_diff(m2.matrix()) <= 1e-10);
            prop_assert_eq!(m1.eigenvalues()[0], 1.0);
        }

        #[test]
        fn truncated_determinant_nonincreasing(vals in proptest::collection::vec(1e-6f64..1.0, 1..10)) {
            let mut vals = vals;
            vals.sort_by(|a, b| b.total_cmp(a));
            let spec = Spectrum { vectors: vec![vec![]; vals.len()], values: vals };
            for k in 1..spec.dim() {
                prop_assert!(truncated_determinant(&spec, k + 1).unwrap() <= truncated_determinant(&spec, k).unwrap());
            }
        }
    }
}
