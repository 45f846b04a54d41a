//! Relational data: the dissimilarity matrix shared by the median-style
//! fitters, plus prototype sets (clusters represented by actual objects).
//!
//! Dissimilarities must be nonnegative and finite; symmetry and the triangle
//! inequality are deliberately not required.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum DissimilarityError {
    #[error("dissimilarity matrix must be square: row {row} has {got} entries, expected {want}")]
    NotSquare { row: usize, got: usize, want: usize },
    #[error("entry ({i},{j}) = {value} must be nonnegative and finite")]
    BadEntry { i: usize, j: usize, value: f64 },
    #[error("empty matrix")]
    Empty,
    #[error("flat buffer length {got} is not {n}×{n}")]
    BadLength { got: usize, n: usize },
}

#[derive(Debug, Error, PartialEq)]
pub enum PrototypeError {
    #[error("prototype index {0} out of range for {1} objects")]
    OutOfRange(usize, usize),
    #[error("prototype index {0} appears more than once")]
    Duplicate(usize),
    #[error("{c} prototypes requested but only {n} objects exist")]
    TooMany { c: usize, n: usize },
}

/// An n×n matrix of pairwise dissimilarities, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DissimilarityMatrix {
    n: usize,
    d: Vec<f64>,
}

impl DissimilarityMatrix {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<DissimilarityMatrix, DissimilarityError> {
        let n = rows.len();
        if n == 0 {
            return Err(DissimilarityError::Empty);
        }
        let mut d = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(DissimilarityError::NotSquare { row: i, got: row.len(), want: n });
            }
            d.extend_from_slice(row);
        }
        Self::from_flat(n, d)
    }

    pub fn from_flat(n: usize, d: Vec<f64>) -> Result<DissimilarityMatrix, DissimilarityError> {
        if n == 0 {
            return Err(DissimilarityError::Empty);
        }
        if d.len() != n * n {
            return Err(DissimilarityError::BadLength { got: d.len(), n });
        }
        for (idx, &v) in d.iter().enumerate() {
            if !v.is_finite() || v < 0.0 {
                return Err(DissimilarityError::BadEntry { i: idx / n, j: idx % n, value: v });
            }
        }
        Ok(DissimilarityMatrix { n, d })
    }

    /// Pairwise Euclidean distances between feature vectors.
    pub fn euclidean(points: &[Vec<f64>]) -> Result<DissimilarityMatrix, DissimilarityError> {
        let n = points.len();
        if n == 0 {
            return Err(DissimilarityError::Empty);
        }
        let mut d = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let dist = points[i]
                    .iter()
                    .zip(&points[j])
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                d[i * n + j] = dist;
                d[j * n + i] = dist;
            }
        }
        Self::from_flat(n, d)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.d[i * self.n..(i + 1) * self.n]
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.d
    }

    pub fn max_entry(&self) -> f64 {
        self.d.iter().fold(0.0f64, |m, &v| m.max(v))
    }

    /// Mean of the off-diagonal entries; 0 for a 1×1 matrix.
    pub fn mean_off_diagonal(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        let mut total = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    total += self.get(i, j);
                }
            }
        }
        total / (self.n * (self.n - 1)) as f64
    }

    /// Every entry multiplied by `factor` (used to normalize for seeding).
    pub fn scaled(&self, factor: f64) -> Result<DissimilarityMatrix, DissimilarityError> {
        Self::from_flat(self.n, self.d.iter().map(|&v| v * factor).collect())
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        (0..self.n)
            .all(|i| (i + 1..self.n).all(|j| (self.get(i, j) - self.get(j, i)).abs() <= tol))
    }
}

/// An ordered set of `c` pairwise-distinct object indices acting as cluster
/// prototypes. Indices are 0-based internally.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrototypeSet {
    indices: Vec<usize>,
}

impl PrototypeSet {
    pub fn new(indices: Vec<usize>, n: usize) -> Result<PrototypeSet, PrototypeError> {
        if indices.len() > n {
            return Err(PrototypeError::TooMany { c: indices.len(), n });
        }
        let mut seen = vec![false; n];
        for &v in &indices {
            if v >= n {
                return Err(PrototypeError::OutOfRange(v, n));
            }
            if seen[v] {
                return Err(PrototypeError::Duplicate(v));
            }
            seen[v] = true;
        }
        Ok(PrototypeSet { indices })
    }

    pub fn c(&self) -> usize {
        self.indices.len()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn get(&self, k: usize) -> usize {
        self.indices[k]
    }

    pub fn contains(&self, object: usize) -> bool {
        self.indices.contains(&object)
    }
}
