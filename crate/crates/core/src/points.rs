use crate::error::{Error, Result};

/// Dense row-major `n × d` matrix of finite coordinates.
///
/// Used for reference sets, query sets, entropy samples and descriptors.
/// Non-finite values are rejected at construction so search code never has
/// to check them.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    data: Vec<f64>,
    n: usize,
    d: usize,
}

impl PointSet {
    pub fn from_flat(data: Vec<f64>, d: usize) -> Result<Self> {
        if d == 0 || data.is_empty() {
            return Err(Error::EmptyPointSet {
                n: if d == 0 { 0 } else { data.len() / d },
                d,
            });
        }
        if data.len() % d != 0 {
            return Err(Error::InvalidArgument(format!(
                "flat buffer of length {} is not a multiple of dimension {d}",
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: pos / d,
                col: pos % d,
            });
        }
        let n = data.len() / d;
        Ok(Self { data, n, d })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let d = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * d);
        for row in rows {
            let row = row.as_ref();
            if row.len() != d {
                return Err(Error::DimensionMismatch {
                    left: d,
                    right: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Self::from_flat(data, d)
    }

    /// Number of points.
    #[inline]
    pub fn len(&self) -> usize {
        self.n
    }

    /// Always false; kept for API symmetry with `len`.
    #[inline]
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.d..(i + 1) * self.d]
    }

    pub fn rows(&self) -> std::slice::ChunksExact<'_, f64> {
        self.data.chunks_exact(self.d)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_flat(self) -> Vec<f64> {
        self.data
    }

    /// New set made of the given rows, in the given order.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        let mut data = Vec::with_capacity(indices.len() * self.d);
        for &i in indices {
            if i >= self.n {
                return Err(Error::InvalidArgument(format!(
                    "row index {i} out of range for {} points",
                    self.n
                )));
            }
            data.extend_from_slice(self.row(i));
        }
        Self::from_flat(data, self.d)
    }

    /// Applies `f` to every coordinate; the result is re-validated.
    pub fn map(&self, mut f: impl FnMut(usize, f64) -> f64) -> Result<Self> {
        let d = self.d;
        let data = self
            .data
            .iter()
            .enumerate()
            .map(|(pos, &v)| f(pos % d, v))
            .collect();
        Self::from_flat(data, d)
    }

    pub(crate) fn check_same_dim(&self, other: &PointSet) -> Result<()> {
        if self.d != other.d {
            return Err(Error::DimensionMismatch {
                left: self.d,
                right: other.d,
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_nan_and_inf() {
        let err = PointSet::from_flat(vec![0.0, 1.0, f64::NAN, 2.0], 2).unwrap_err();
        assert!(matches!(err, Error::NonFinite { row: 1, col: 0 }));
        assert!(PointSet::from_flat(vec![f64::INFINITY], 1).is_err());
    }

    #[test]
    fn rejects_empty_and_ragged() {
        assert!(matches!(
            PointSet::from_flat(vec![], 3),
            Err(Error::EmptyPointSet { .. })
        ));
        assert!(PointSet::from_flat(vec![1.0, 2.0, 3.0], 2).is_err());
        let rows: Vec<Vec<f64>> = vec![vec![1.0, 2.0], vec![3.0]];
        assert!(matches!(
            PointSet::from_rows(&rows),
            Err(Error::DimensionMismatch { left: 2, right: 1 })
        ));
    }

    #[test]
    fn row_access() {
        let p = PointSet::from_rows(&[[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]]).unwrap();
        assert_eq!(p.len(), 3);
        assert_eq!(p.dim(), 2);
        assert_eq!(p.row(1), &[3.0, 4.0]);
        assert_eq!(p.rows().count(), 3);
        let s = p.select(&[2, 0]).unwrap();
        assert_eq!(s.as_slice(), &[5.0, 6.0, 1.0, 2.0]);
    }
}
