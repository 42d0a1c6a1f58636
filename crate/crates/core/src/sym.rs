//! Real symmetric matrices stored either as a packed lower triangle or as a
//! sparse coordinate list of lower-triangle entries.
//!
//! Symmetry is structural: only the lower triangle is ever stored, so every
//! materialization writes the same value to `(i, j)` and `(j, i)`.

use nalgebra::DMatrix;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Storage {
    /// Packed lower triangle, row-major: entry `(i, j)` with `i >= j` at `i * (i + 1) / 2 + j`.
    Dense(Vec<f64>),
    /// Lower-triangle coordinates `(row, col, value)` with `row >= col`, sorted and unique.
    Sparse(Vec<(usize, usize, f64)>),
}

/// Serialized as `{"n": .., "triplets": [[row, col, value], ...]}` with nonzero
/// lower-triangle entries sorted by `(row, col)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix {
    n: usize,
    storage: Storage,
}

#[inline]
fn packed(i: usize, j: usize) -> usize {
    i * (i + 1) / 2 + j
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            storage: Storage::Sparse(Vec::new()),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![1.0; n])
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let triplets = diag
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(i, v)| (i, i, *v))
            .collect();
        Self {
            n: diag.len(),
            storage: Storage::Sparse(triplets),
        }
    }

    /// Builds a sparse matrix from lower-triangle coordinates.
    ///
    /// Entries must satisfy `row >= col` and `row < n`; each unordered pair may
    /// appear only once. Explicit zeros are kept.
    pub fn from_triplets(n: usize, mut triplets: Vec<(usize, usize, f64)>) -> Result<Self> {
        for &(r, c, v) in &triplets {
            if r >= n {
                return Err(Error::InvalidMatrix(format!(
                    "row index {r} out of range for n = {n}"
                )));
            }
            if r < c {
                return Err(Error::InvalidMatrix(format!(
                    "entry ({r}, {c}) is above the diagonal; store row >= col"
                )));
            }
            if !v.is_finite() {
                return Err(Error::InvalidMatrix(format!(
                    "entry ({r}, {c}) is not finite"
                )));
            }
        }
        triplets.sort_by_key(|a| (a.0, a.1));
        if let Some(w) = triplets.windows(2).find(|w| (w[0].0, w[0].1) == (w[1].0, w[1].1)) {
            return Err(Error::InvalidMatrix(format!(
                "duplicate coordinate ({}, {})",
                w[0].0, w[0].1
            )));
        }
        Ok(Self {
            n,
            storage: Storage::Sparse(triplets),
        })
    }

    /// Dense storage from the lower triangle of `m`; the strict upper triangle is ignored.
    pub fn from_lower(m: &DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch {
                what: "square matrix columns",
                expected: m.nrows(),
                got: m.ncols(),
            });
        }
        let n = m.nrows();
        let mut data = Vec::with_capacity(n * (n + 1) / 2);
        for i in 0..n {
            for j in 0..=i {
                data.push(m[(i, j)]);
            }
        }
        Ok(Self {
            n,
            storage: Storage::Dense(data),
        })
    }

    /// Dense storage from an exactly symmetric matrix.
    pub fn from_dense(m: &DMatrix<f64>) -> Result<Self> {
        let n = m.nrows();
        if m.ncols() == n {
            for i in 0..n {
                for j in 0..i {
                    if m[(i, j)] != m[(j, i)] {
                        return Err(Error::InvalidMatrix(format!(
                            "not symmetric at ({i}, {j})"
                        )));
                    }
                }
            }
        }
        Self::from_lower(m)
    }

    /// Symmetric part `(m + mᵀ)/2` in dense storage.
    pub fn symmetrize(m: &DMatrix<f64>) -> Result<Self> {
        Self::from_lower(&((m + m.transpose()) * 0.5))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self.storage, Storage::Sparse(_))
    }

    /// Number of stored lower-triangle entries.
    pub fn nnz(&self) -> usize {
        match &self.storage {
            Storage::Dense(d) => d.len(),
            Storage::Sparse(t) => t.len(),
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (r, c) = if i >= j { (i, j) } else { (j, i) };
        match &self.storage {
            Storage::Dense(d) => d[packed(r, c)],
            Storage::Sparse(t) => t
                .binary_search_by(|e| (e.0, e.1).cmp(&(r, c)))
                .map(|k| t[k].2)
                .unwrap_or(0.0),
        }
    }

    /// Calls `f(row, col, value)` for every stored lower-triangle entry (`row >= col`).
    pub fn for_each_lower(&self, mut f: impl FnMut(usize, usize, f64)) {
        match &self.storage {
            Storage::Dense(d) => {
                for i in 0..self.n {
                    for j in 0..=i {
                        f(i, j, d[packed(i, j)]);
                    }
                }
            }
            Storage::Sparse(t) => {
                for &(i, j, v) in t {
                    f(i, j, v);
                }
            }
        }
    }

    /// Nonzero lower-triangle entries sorted by `(row, col)`.
    pub fn triplets(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        self.for_each_lower(|i, j, v| {
            if v != 0.0 {
                out.push((i, j, v));
            }
        });
        out
    }

    /// Sparse copy holding only nonzero entries.
    pub fn to_sparse(&self) -> Self {
        Self {
            n: self.n,
            storage: Storage::Sparse(self.triplets()),
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        self.for_each_lower(|i, j, v| {
            m[(i, j)] = v;
            m[(j, i)] = v;
        });
        m
    }

    /// Adds `alpha * self` to the square matrix `out`.
    pub fn add_scaled_into(&self, alpha: f64, out: &mut DMatrix<f64>) {
        self.for_each_lower(|i, j, v| {
            out[(i, j)] += alpha * v;
            if i != j {
                out[(j, i)] += alpha * v;
            }
        });
    }

    /// Frobenius inner product `<self, m>` with an arbitrary square matrix.
    pub fn inner(&self, m: &DMatrix<f64>) -> f64 {
        let mut acc = 0.0;
        self.for_each_lower(|i, j, v| {
            if i == j {
                acc += v * m[(i, i)];
            } else {
                acc += v * (m[(i, j)] + m[(j, i)]);
            }
        });
        acc
    }

    pub fn inner_sym(&self, other: &SymMatrix) -> f64 {
        let mut acc = 0.0;
        self.for_each_lower(|i, j, v| {
            if v != 0.0 {
                let w = other.get(i, j);
                acc += if i == j { v * w } else { 2.0 * v * w };
            }
        });
        acc
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.inner_sym(self).sqrt()
    }

    pub fn trace(&self) -> f64 {
        let mut t = 0.0;
        self.for_each_lower(|i, j, v| {
            if i == j {
                t += v;
            }
        });
        t
    }

    /// Sorted indices of rows holding at least one nonzero.
    pub fn support_rows(&self) -> Vec<usize> {
        let mut rows = Vec::new();
        self.for_each_lower(|i, j, v| {
            if v != 0.0 {
                rows.push(i);
                rows.push(j);
            }
        });
        rows.sort_unstable();
        rows.dedup();
        rows
    }

    /// Dense product `self * y`.
    pub fn mul(&self, y: &DMatrix<f64>) -> DMatrix<f64> {
        let p = y.ncols();
        let mut out = DMatrix::zeros(self.n, p);
        self.for_each_lower(|i, j, v| {
            if v == 0.0 {
                return;
            }
            for k in 0..p {
                out[(i, k)] += v * y[(j, k)];
            }
            if i != j {
                for k in 0..p {
                    out[(j, k)] += v * y[(i, k)];
                }
            }
        });
        out
    }

    /// Product `self * y` restricted to the rows in `support` (as returned by [`support_rows`](Self::support_rows)).
    pub fn mul_rows(&self, y: &DMatrix<f64>, support: &[usize]) -> RowBlock {
        let p = y.ncols();
        let mut vals = DMatrix::zeros(support.len(), p);
        let pos = |r: usize| support.binary_search(&r).expect("row outside support");
        self.for_each_lower(|i, j, v| {
            if v == 0.0 {
                return;
            }
            let pi = pos(i);
            for k in 0..p {
                vals[(pi, k)] += v * y[(j, k)];
            }
            if i != j {
                let pj = pos(j);
                for k in 0..p {
                    vals[(pj, k)] += v * y[(i, k)];
                }
            }
        });
        RowBlock {
            rows: support.to_vec(),
            vals,
        }
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        let storage = match &self.storage {
            Storage::Dense(d) => Storage::Dense(d.iter().map(|v| alpha * v).collect()),
            Storage::Sparse(t) => Storage::Sparse(t.iter().map(|&(i, j, v)| (i, j, alpha * v)).collect()),
        };
        Self { n: self.n, storage }
    }
}

/// An `n × p` matrix whose nonzero rows are confined to a known row set.
///
/// Used for the products `A_i Y`, which for Max-Cut style constraints touch
/// only a handful of rows.
#[derive(Clone, Debug, PartialEq)]
pub struct RowBlock {
    rows: Vec<usize>,
    vals: DMatrix<f64>,
}

impl RowBlock {
    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.vals
    }

    /// Frobenius inner product with a dense `n × p` matrix.
    pub fn dot(&self, z: &DMatrix<f64>) -> f64 {
        let mut acc = 0.0;
        for (local, &r) in self.rows.iter().enumerate() {
            for k in 0..self.vals.ncols() {
                acc += self.vals[(local, k)] * z[(r, k)];
            }
        }
        acc
    }

    pub fn dot_block(&self, other: &RowBlock) -> f64 {
        let (mut a, mut b) = (0, 0);
        let mut acc = 0.0;
        while a < self.rows.len() && b < other.rows.len() {
            match self.rows[a].cmp(&other.rows[b]) {
                std::cmp::Ordering::Less => a += 1,
                std::cmp::Ordering::Greater => b += 1,
                std::cmp::Ordering::Equal => {
                    for k in 0..self.vals.ncols() {
                        acc += self.vals[(a, k)] * other.vals[(b, k)];
                    }
                    a += 1;
                    b += 1;
                }
            }
        }
        acc
    }

    pub fn norm_squared(&self) -> f64 {
        self.vals.norm_squared()
    }

    /// `out += alpha * self`.
    pub fn add_to(&self, alpha: f64, out: &mut DMatrix<f64>) {
        if alpha == 0.0 {
            return;
        }
        for (local, &r) in self.rows.iter().enumerate() {
            for k in 0..self.vals.ncols() {
                out[(r, k)] += alpha * self.vals[(local, k)];
            }
        }
    }

    pub fn to_dense(&self, n: usize) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(n, self.vals.ncols());
        self.add_to(1.0, &mut out);
        out
    }
}

/// Frobenius inner product of two equally shaped matrices.
pub fn frob(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.dot(b)
}

#[derive(Serialize, Deserialize)]
struct TripletForm {
    n: usize,
    triplets: Vec<(usize, usize, f64)>,
}

impl Serialize for SymMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        TripletForm {
            n: self.n,
            triplets: self.triplets(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SymMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let form = TripletForm::deserialize(deserializer)?;
        SymMatrix::from_triplets(form.n, form.triplets).map_err(serde::de::Error::custom)
    }
}
