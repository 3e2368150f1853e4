//! Distance metrics and full pairwise distance computation.
//!
//! Every metric is evaluated by one of three coordinate kernels. Mahalanobis
//! distances go through a whitening transform `x -> Lᵀx`, where `M = L Lᵀ` is
//! the Cholesky factorization of the (inverse covariance) matrix, and then
//! through the Euclidean kernel. Search code transforms each point once and
//! then pays `O(d)` per pair.

use std::borrow::Cow;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::points::PointSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MetricKind {
    Euclidean,
    Manhattan,
    Chebyshev,
    Mahalanobis,
}

impl MetricKind {
    pub fn name(self) -> &'static str {
        match self {
            MetricKind::Euclidean => "euclidean",
            MetricKind::Manhattan => "manhattan",
            MetricKind::Chebyshev => "chebyshev",
            MetricKind::Mahalanobis => "mahalanobis",
        }
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MetricKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "euclidean" | "l2" => Ok(MetricKind::Euclidean),
            "manhattan" | "l1" | "cityblock" => Ok(MetricKind::Manhattan),
            "chebyshev" | "linf" | "infinity" => Ok(MetricKind::Chebyshev),
            "mahalanobis" => Ok(MetricKind::Mahalanobis),
            other => Err(Error::UnsupportedMetric(other.to_string())),
        }
    }
}

/// Symmetric positive-definite matrix with its cached Cholesky factor.
#[derive(Debug, Clone, PartialEq)]
pub struct Mahalanobis {
    dim: usize,
    matrix: Vec<f64>,
    // lower-triangular, row-major
    factor: Vec<f64>,
}

impl Mahalanobis {
    const SYMMETRY_RTOL: f64 = 1e-12;

    /// `matrix` is row-major `dim × dim` and is interpreted as the inverse
    /// covariance.
    pub fn new(matrix: Vec<f64>, dim: usize) -> Result<Self> {
        if dim == 0 || matrix.len() != dim * dim {
            return Err(Error::InvalidMatrix(format!(
                "expected {dim}x{dim} = {} entries, got {}",
                dim * dim,
                matrix.len()
            )));
        }
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidMatrix("non-finite entry".into()));
        }
        for i in 0..dim {
            for j in 0..i {
                let a = matrix[i * dim + j];
                let b = matrix[j * dim + i];
                let scale = a.abs().max(b.abs());
                if (a - b).abs() > Self::SYMMETRY_RTOL * scale {
                    return Err(Error::InvalidMatrix(format!(
                        "not symmetric at ({i}, {j}): {a} vs {b}"
                    )));
                }
            }
        }
        let factor = cholesky(&matrix, dim)?;
        Ok(Self {
            dim,
            matrix,
            factor,
        })
    }

    pub fn identity(dim: usize) -> Self {
        let mut matrix = vec![0.0; dim * dim];
        for i in 0..dim {
            matrix[i * dim + i] = 1.0;
        }
        Self::new(matrix, dim).expect("identity is SPD")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &[f64] {
        &self.matrix
    }

    /// Writes `Lᵀ x` into `out`.
    pub fn transform_into(&self, x: &[f64], out: &mut [f64]) {
        let d = self.dim;
        for (j, o) in out.iter_mut().enumerate().take(d) {
            let mut acc = 0.0;
            for (i, xi) in x.iter().enumerate().skip(j) {
                acc += self.factor[i * d + j] * xi;
            }
            *o = acc;
        }
    }

    pub fn transform(&self, points: &PointSet) -> Result<PointSet> {
        let d = self.dim;
        let mut data = vec![0.0; points.len() * d];
        data.par_chunks_mut(d)
            .zip(points.as_slice().par_chunks(d))
            .for_each(|(out, x)| self.transform_into(x, out));
        // finite input can still overflow through a large factor
        PointSet::from_flat(data, d)
    }
}

fn cholesky(a: &[f64], n: usize) -> Result<Vec<f64>> {
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut sum = a[i * n + j];
            for p in 0..j {
                sum -= l[i * n + p] * l[j * n + p];
            }
            if i == j {
                if sum <= 0.0 || !sum.is_finite() {
                    return Err(Error::InvalidMatrix(format!(
                        "not positive definite (pivot {i} = {sum})"
                    )));
                }
                l[i * n + i] = sum.sqrt();
            } else {
                l[i * n + j] = sum / l[j * n + j];
            }
        }
    }
    Ok(l)
}

/// Coordinate-level distance kernel. Accumulation runs sequentially over
/// coordinates so results are bitwise reproducible and symmetric.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kernel {
    Euclidean,
    Manhattan,
    Chebyshev,
}

impl Kernel {
    #[inline]
    pub fn eval(self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Kernel::Euclidean => {
                let mut acc = 0.0;
                for (x, y) in a.iter().zip(b) {
                    let t = x - y;
                    acc += t * t;
                }
                acc.sqrt()
            }
            Kernel::Manhattan => {
                let mut acc = 0.0;
                for (x, y) in a.iter().zip(b) {
                    acc += (x - y).abs();
                }
                acc
            }
            Kernel::Chebyshev => {
                let mut acc: f64 = 0.0;
                for (x, y) in a.iter().zip(b) {
                    acc = acc.max((x - y).abs());
                }
                acc
            }
        }
    }

    /// Lower bound of the distance from `q` to any point inside the box
    /// `[lo, hi]`. Uses the same accumulation order as [`Kernel::eval`], so
    /// the bound never exceeds a computed point distance.
    #[inline]
    pub fn box_bound(self, q: &[f64], lo: &[f64], hi: &[f64]) -> f64 {
        let gap = |i: usize| {
            let x = q[i];
            if x < lo[i] {
                lo[i] - x
            } else if x > hi[i] {
                x - hi[i]
            } else {
                0.0
            }
        };
        match self {
            Kernel::Euclidean => {
                let mut acc = 0.0;
                for i in 0..q.len() {
                    let g = gap(i);
                    acc += g * g;
                }
                acc.sqrt()
            }
            Kernel::Manhattan => (0..q.len()).fold(0.0, |acc, i| acc + gap(i)),
            Kernel::Chebyshev => (0..q.len()).fold(0.0_f64, |acc, i| acc.max(gap(i))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Metric {
    Euclidean,
    Manhattan,
    Chebyshev,
    Mahalanobis(Mahalanobis),
}

impl Metric {
    pub fn mahalanobis(matrix: Vec<f64>, dim: usize) -> Result<Self> {
        Mahalanobis::new(matrix, dim).map(Metric::Mahalanobis)
    }

    pub fn kind(&self) -> MetricKind {
        match self {
            Metric::Euclidean => MetricKind::Euclidean,
            Metric::Manhattan => MetricKind::Manhattan,
            Metric::Chebyshev => MetricKind::Chebyshev,
            Metric::Mahalanobis(_) => MetricKind::Mahalanobis,
        }
    }

    pub fn kernel(&self) -> Kernel {
        match self {
            Metric::Euclidean | Metric::Mahalanobis(_) => Kernel::Euclidean,
            Metric::Manhattan => Kernel::Manhattan,
            Metric::Chebyshev => Kernel::Chebyshev,
        }
    }

    /// Checks that the metric can be applied to points of dimension `d`.
    pub fn check_dim(&self, d: usize) -> Result<()> {
        match self {
            Metric::Mahalanobis(m) if m.dim() != d => Err(Error::DimensionMismatch {
                left: m.dim(),
                right: d,
            }),
            _ => Ok(()),
        }
    }

    /// Coordinates on which [`Metric::kernel`] yields this metric's distance.
    pub fn prepare<'a>(&self, points: &'a PointSet) -> Result<Cow<'a, PointSet>> {
        self.check_dim(points.dim())?;
        Ok(match self {
            Metric::Mahalanobis(m) => Cow::Owned(m.transform(points)?),
            _ => Cow::Borrowed(points),
        })
    }

    pub fn distance(&self, a: &[f64], b: &[f64]) -> Result<f64> {
        distance(a, b, self)
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.kind().name())
    }
}

pub fn distance(a: &[f64], b: &[f64], metric: &Metric) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    if a.is_empty() {
        return Err(Error::EmptyPointSet { n: 1, d: 0 });
    }
    for (v, row) in [(a, 0), (b, 1)] {
        if let Some(col) = v.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite { row, col });
        }
    }
    metric.check_dim(a.len())?;
    match metric {
        Metric::Mahalanobis(m) => {
            let mut ta = vec![0.0; a.len()];
            let mut tb = vec![0.0; b.len()];
            m.transform_into(a, &mut ta);
            m.transform_into(b, &mut tb);
            Ok(Kernel::Euclidean.eval(&ta, &tb))
        }
        _ => Ok(metric.kernel().eval(a, b)),
    }
}

/// Row-major `rows × cols` matrix of distances.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl DistanceMatrix {
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }
}

/// Largest matrix `pairwise_distances` will allocate (2^27 entries, 1 GiB).
pub const DEFAULT_PAIRWISE_BUDGET: usize = 1 << 27;

pub fn pairwise_distances(q: &PointSet, r: &PointSet, metric: &Metric) -> Result<DistanceMatrix> {
    pairwise_distances_with_budget(q, r, metric, DEFAULT_PAIRWISE_BUDGET)
}

pub fn pairwise_distances_with_budget(
    q: &PointSet,
    r: &PointSet,
    metric: &Metric,
    max_entries: usize,
) -> Result<DistanceMatrix> {
    q.check_same_dim(r)?;
    metric.check_dim(q.dim())?;
    let entries = q.len() as u128 * r.len() as u128;
    if entries > max_entries as u128 {
        return Err(Error::MemoryBudget {
            entries,
            budget: max_entries as u128,
        });
    }
    let qp = metric.prepare(q)?;
    let rp = metric.prepare(r)?;
    let kernel = metric.kernel();
    let cols = r.len();
    let mut data = vec![0.0; q.len() * cols];
    data.par_chunks_mut(cols).enumerate().for_each(|(i, out)| {
        let qi = qp.row(i);
        for (j, o) in out.iter_mut().enumerate() {
            *o = kernel.eval(qi, rp.row(j));
        }
    });
    Ok(DistanceMatrix {
        rows: q.len(),
        cols,
        data,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(a: &[f64], b: &[f64], m: &Metric) -> f64 {
        distance(a, b, m).unwrap()
    }

    #[test]
    fn basic_values() {
        let (a, b) = ([0.0, 0.0], [3.0, 4.0]);
        assert_eq!(d(&a, &b, &Metric::Euclidean), 5.0);
        assert_eq!(d(&a, &b, &Metric::Manhattan), 7.0);
        assert_eq!(d(&a, &b, &Metric::Chebyshev), 4.0);
        let id = Metric::Mahalanobis(Mahalanobis::identity(2));
        assert_eq!(d(&[1.0, 2.0], &[4.0, 6.0], &id), 5.0);
    }

    #[test]
    fn mahalanobis_diagonal_scales_axes() {
        // M = diag(4, 1): sqrt(4*1^2 + 1*2^2) = sqrt(8)
        let m = Metric::mahalanobis(vec![4.0, 0.0, 0.0, 1.0], 2).unwrap();
        assert!((d(&[0.0, 0.0], &[1.0, 2.0], &m) - 8f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn mahalanobis_matches_quadratic_form() {
        let mat = vec![2.0, 0.5, 0.1, 0.5, 1.5, -0.3, 0.1, -0.3, 1.0];
        let m = Metric::mahalanobis(mat.clone(), 3).unwrap();
        let a = [0.3, -1.2, 2.0];
        let b = [1.1, 0.4, -0.5];
        let diff: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x - y).collect();
        let mut quad = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                quad += diff[i] * mat[i * 3 + j] * diff[j];
            }
        }
        assert!((d(&a, &b, &m) - quad.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_matrices() {
        assert!(Metric::mahalanobis(vec![1.0, 0.5, 0.4, 1.0], 2).is_err());
        assert!(Metric::mahalanobis(vec![1.0, 2.0, 2.0, 1.0], 2).is_err());
        assert!(Metric::mahalanobis(vec![1.0, 0.0, 0.0], 2).is_err());
    }

    #[test]
    fn distance_errors() {
        let err = distance(&[1.0, 2.0], &[1.0], &Metric::Euclidean).unwrap_err();
        assert_eq!(err.to_string(), "dimension mismatch: 2 vs 1");
        assert!(distance(&[f64::NAN], &[1.0], &Metric::Euclidean).is_err());
        let m = Metric::Mahalanobis(Mahalanobis::identity(3));
        assert!(distance(&[1.0, 2.0], &[1.0, 2.0], &m).is_err());
    }

    #[test]
    fn pairwise_small() {
        let q = PointSet::from_rows(&[[0.0, 0.0]]).unwrap();
        let same = pairwise_distances(&q, &q, &Metric::Euclidean).unwrap();
        assert_eq!(same.data, vec![0.0]);
        let r = PointSet::from_rows(&[[1.0, 0.0], [0.0, 2.0], [2.0, 2.0]]).unwrap();
        let m = pairwise_distances(&q, &r, &Metric::Manhattan).unwrap();
        assert_eq!(m.data, vec![1.0, 2.0, 4.0]);
    }

    #[test]
    fn pairwise_budget() {
        let p = PointSet::from_flat(vec![0.0; 20], 1).unwrap();
        let err = pairwise_distances_with_budget(&p, &p, &Metric::Euclidean, 399).unwrap_err();
        assert!(err.to_string().contains("bf_knn"));
        assert!(pairwise_distances_with_budget(&p, &p, &Metric::Euclidean, 400).is_ok());
    }

    #[test]
    fn metric_names_parse() {
        for kind in [
            MetricKind::Euclidean,
            MetricKind::Manhattan,
            MetricKind::Chebyshev,
            MetricKind::Mahalanobis,
        ] {
            assert_eq!(kind.name().parse::<MetricKind>().unwrap(), kind);
        }
        assert!("cosine".parse::<MetricKind>().is_err());
    }
}
