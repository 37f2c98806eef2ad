//! Labelled feature matrices with dense or sparse row storage.

use crate::error::{Error, Result};

/// A borrowed feature row.
#[derive(Debug, Clone, Copy)]
pub enum Row<'a> {
    Dense(&'a [f64]),
    /// Sorted, 0-based `(index, value)` pairs.
    Sparse(&'a [(u32, f64)]),
}

impl<'a> Row<'a> {
    /// `<row, w>` over the first `d` entries of `w`.
    #[inline]
    pub fn dot(&self, w: &[f64]) -> f64 {
        match *self {
            Row::Dense(x) => x.iter().zip(w).map(|(a, b)| a * b).sum(),
            Row::Sparse(x) => x.iter().map(|&(j, v)| v * w[j as usize]).sum(),
        }
    }

    /// `out += alpha * row`.
    #[inline]
    pub fn axpy(&self, alpha: f64, out: &mut [f64]) {
        match *self {
            Row::Dense(x) => {
                for (o, v) in out.iter_mut().zip(x) {
                    *o += alpha * v;
                }
            }
            Row::Sparse(x) => {
                for &(j, v) in x {
                    out[j as usize] += alpha * v;
                }
            }
        }
    }

    pub fn to_dense(&self, dim: usize) -> Vec<f64> {
        let mut out = vec![0.0; dim];
        self.axpy(1.0, &mut out);
        out
    }

    pub fn norm_sq(&self) -> f64 {
        match *self {
            Row::Dense(x) => x.iter().map(|v| v * v).sum(),
            Row::Sparse(x) => x.iter().map(|&(_, v)| v * v).sum(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Features {
    /// Row-major `n x d` values.
    Dense { values: Vec<f64>, dim: usize },
    Sparse { rows: Vec<Vec<(u32, f64)>>, dim: usize },
}

impl Features {
    pub fn len(&self) -> usize {
        match self {
            Features::Dense { values, dim } => values.len().checked_div(*dim).unwrap_or(0),
            Features::Sparse { rows, .. } => rows.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dim(&self) -> usize {
        match self {
            Features::Dense { dim, .. } | Features::Sparse { dim, .. } => *dim,
        }
    }

    #[inline]
    pub fn row(&self, i: usize) -> Row<'_> {
        match self {
            Features::Dense { values, dim } => Row::Dense(&values[i * dim..(i + 1) * dim]),
            Features::Sparse { rows, .. } => Row::Sparse(&rows[i]),
        }
    }

    pub fn select(&self, indices: &[usize]) -> Features {
        match self {
            Features::Dense { values, dim } => {
                let mut out = Vec::with_capacity(indices.len() * dim);
                for &i in indices {
                    out.extend_from_slice(&values[i * dim..(i + 1) * dim]);
                }
                Features::Dense {
                    values: out,
                    dim: *dim,
                }
            }
            Features::Sparse { rows, dim } => Features::Sparse {
                rows: indices.iter().map(|&i| rows[i].clone()).collect(),
                dim: *dim,
            },
        }
    }
}

/// Feature matrix plus 1-based labels in `1..=num_classes`.
///
/// `label_values[k]` is the raw value that label `k + 1` was remapped from,
/// so predictions can be reported in the source label space.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: Features,
    labels: Vec<usize>,
    num_classes: usize,
    label_values: Vec<f64>,
}

impl Dataset {
    /// Builds a dataset with the identity label map `k -> k`.
    pub fn new(features: Features, labels: Vec<usize>, num_classes: usize) -> Result<Self> {
        let label_values = (1..=num_classes).map(|k| k as f64).collect();
        Self::with_label_values(features, labels, num_classes, label_values)
    }

    pub fn with_label_values(
        features: Features,
        labels: Vec<usize>,
        num_classes: usize,
        label_values: Vec<f64>,
    ) -> Result<Self> {
        let n = features.len();
        if n == 0 || labels.is_empty() {
            return Err(Error::Size("dataset must contain at least one sample".into()));
        }
        if features.dim() == 0 {
            return Err(Error::Size("feature dimension must be at least 1".into()));
        }
        if labels.len() != n {
            return Err(Error::Shape(format!(
                "{} labels for {} feature rows",
                labels.len(),
                n
            )));
        }
        if num_classes == 0 || label_values.len() != num_classes {
            return Err(Error::Shape("label table does not match class count".into()));
        }
        if let Some(bad) = labels.iter().find(|&&y| y == 0 || y > num_classes) {
            return Err(Error::Domain(format!(
                "label {bad} outside 1..={num_classes}"
            )));
        }
        let finite = match &features {
            Features::Dense { values, .. } => values.iter().all(|v| v.is_finite()),
            Features::Sparse { rows, dim } => rows.iter().all(|r| {
                r.iter().all(|&(j, v)| v.is_finite() && (j as usize) < *dim)
                    && r.windows(2).all(|w| w[0].0 < w[1].0)
            }),
        };
        if !finite {
            return Err(Error::Domain(
                "feature values must be finite and sparse indices sorted and in range".into(),
            ));
        }
        Ok(Self {
            features,
            labels,
            num_classes,
            label_values,
        })
    }

    /// Dense dataset from row vectors.
    pub fn from_rows(rows: &[Vec<f64>], labels: Vec<usize>, num_classes: usize) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::Shape("ragged rows".into()));
        }
        let values = rows.iter().flatten().copied().collect();
        Self::new(Features::Dense { values, dim }, labels, num_classes)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.features.dim()
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn features(&self) -> &Features {
        &self.features
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn label_values(&self) -> &[f64] {
        &self.label_values
    }

    #[inline]
    pub fn row(&self, i: usize) -> Row<'_> {
        self.features.row(i)
    }

    /// Raw value for each sample's label.
    pub fn raw_targets(&self) -> Vec<f64> {
        self.labels.iter().map(|&y| self.label_values[y - 1]).collect()
    }

    /// Sub-dataset of the given rows; the label space is kept.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            features: self.features.select(indices),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            num_classes: self.num_classes,
            label_values: self.label_values.clone(),
        }
    }

    /// Same features with new labels (e.g. after ordinal binning).
    pub fn relabel(&self, labels: Vec<usize>, num_classes: usize) -> Result<Dataset> {
        Dataset::new(self.features.clone(), labels, num_classes)
    }

    pub fn with_features(&self, features: Features) -> Result<Dataset> {
        Dataset::with_label_values(
            features,
            self.labels.clone(),
            self.num_classes,
            self.label_values.clone(),
        )
    }

    /// Number of distinct labels actually present.
    pub fn classes_present(&self) -> usize {
        let mut seen = vec![false; self.num_classes];
        for &y in &self.labels {
            seen[y - 1] = true;
        }
        seen.into_iter().filter(|&s| s).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dense_and_sparse_rows_agree() {
        let dense = Features::Dense {
            values: vec![1.0, 0.0, 2.0],
            dim: 3,
        };
        let sparse = Features::Sparse {
            rows: vec![vec![(0, 1.0), (2, 2.0)]],
            dim: 3,
        };
        let w = [0.5, 7.0, -1.0];
        assert_eq!(dense.row(0).dot(&w), sparse.row(0).dot(&w));
        let mut a = vec![0.0; 3];
        let mut b = vec![0.0; 3];
        dense.row(0).axpy(2.0, &mut a);
        sparse.row(0).axpy(2.0, &mut b);
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_out_of_range_labels() {
        let err = Dataset::from_rows(&[vec![1.0]], vec![3], 2).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
        let err = Dataset::from_rows(&[vec![1.0]], vec![0], 2).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
    }

    #[test]
    fn rejects_non_finite_and_empty() {
        assert!(Dataset::from_rows(&[vec![f64::NAN]], vec![1], 1).is_err());
        assert!(Dataset::from_rows(&[], vec![], 1).is_err());
        assert!(Dataset::from_rows(&[vec![]], vec![1], 1).is_err());
    }

    #[test]
    fn subset_keeps_label_space() {
        let d = Dataset::from_rows(&[vec![1.0], vec![2.0], vec![3.0]], vec![1, 2, 3], 3).unwrap();
        let s = d.subset(&[2, 0]);
        assert_eq!(s.labels(), &[3, 1]);
        assert_eq!(s.num_classes(), 3);
        assert_eq!(s.row(0).dot(&[1.0]), 3.0);
    }
}
