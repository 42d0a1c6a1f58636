//! Small dense helpers shared across modules.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Seeded generator used everywhere randomness is needed.
pub type SeededRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SeededRng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

/// Pseudo-rank cutoff `max_dim * eps * largest`: values at or below it count as zero.
pub fn rank_cutoff(max_dim: usize, largest: f64) -> f64 {
    max_dim.max(1) as f64 * f64::EPSILON * largest
}

/// Number of values strictly above the pseudo-rank cutoff. `scale` overrides
/// the relative factor `max_dim * eps` when given.
pub fn numerical_rank(values: &[f64], max_dim: usize, scale: Option<f64>) -> usize {
    let largest = values.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    if largest == 0.0 {
        return 0;
    }
    let cut = match scale {
        Some(s) => s * largest,
        None => rank_cutoff(max_dim, largest),
    };
    values.iter().filter(|v| v.abs() > cut).count()
}

/// Eigen-decomposition with eigenvalues sorted ascending (columns of the
/// returned matrix match).
pub fn sym_eigen_sorted(m: DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let n = m.nrows();
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = DVector::from_iterator(n, order.iter().map(|&k| eig.eigenvalues[k]));
    let mut vecs = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vecs.set_column(dst, &eig.eigenvectors.column(src));
    }
    (vals, vecs)
}

/// Smallest eigenpair of a dense symmetric matrix.
pub fn sym_min_eig(m: &DMatrix<f64>) -> (f64, DVector<f64>) {
    let (vals, vecs) = sym_eigen_sorted(m.clone());
    (vals[0], vecs.column(0).into_owned())
}

/// Moore-Penrose pseudo-inverse of a symmetric positive semidefinite matrix,
/// kept in factored form.
#[derive(Clone, Debug)]
pub struct PsdPinv {
    /// Eigenvectors spanning the numerical range.
    basis: DMatrix<f64>,
    /// Reciprocal eigenvalues on that range.
    inv_vals: DVector<f64>,
    /// Ascending eigenvalues of the original matrix.
    pub eigenvalues: DVector<f64>,
    vectors: DMatrix<f64>,
}

impl PsdPinv {
    /// `cutoff` is absolute: eigenvalues at or below it are treated as zero.
    pub fn new(m: DMatrix<f64>, cutoff: f64) -> Self {
        let (vals, vecs) = sym_eigen_sorted(m);
        Self::from_eigen(vals, vecs, cutoff)
    }

    /// Same as [`new`](Self::new) from an ascending eigendecomposition.
    pub fn from_eigen(vals: DVector<f64>, vecs: DMatrix<f64>, cutoff: f64) -> Self {
        let keep: Vec<usize> = (0..vals.len()).filter(|&k| vals[k] > cutoff).collect();
        let mut basis = DMatrix::zeros(vals.len(), keep.len());
        let mut inv_vals = DVector::zeros(keep.len());
        for (dst, &k) in keep.iter().enumerate() {
            basis.set_column(dst, &vecs.column(k));
            inv_vals[dst] = 1.0 / vals[k];
        }
        Self {
            basis,
            inv_vals,
            eigenvalues: vals,
            vectors: vecs,
        }
    }

    pub fn rank(&self) -> usize {
        self.inv_vals.len()
    }

    /// Rebuilds the pseudo-inverse with another cutoff without refactoring.
    pub fn with_cutoff(&self, cutoff: f64) -> Self {
        Self::from_eigen(self.eigenvalues.clone(), self.vectors.clone(), cutoff)
    }

    /// Eigenvector of the smallest eigenvalue when it is at or below `cutoff`.
    pub fn null_vector(&self, cutoff: f64) -> Option<DVector<f64>> {
        (!self.eigenvalues.is_empty() && self.eigenvalues[0] <= cutoff).then(|| self.vectors.column(0).into_owned())
    }

    pub fn apply(&self, v: &DVector<f64>) -> DVector<f64> {
        let coeffs = self.basis.tr_mul(v).component_mul(&self.inv_vals);
        &self.basis * coeffs
    }

    pub fn largest_eigenvalue(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0_f64, |a, v| a.max(*v))
    }
}

pub fn gaussian_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.sample::<f64, _>(StandardNormal))
}

pub fn gaussian_vector(rng: &mut impl Rng, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal))
}

/// Haar-distributed orthogonal matrix (QR of a Gaussian matrix with sign fix).
pub fn random_orthogonal(rng: &mut impl Rng, p: usize) -> DMatrix<f64> {
    let g = gaussian_matrix(rng, p, p);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..p {
        if r[(j, j)] < 0.0 {
            let mut col = q.column_mut(j);
            col.neg_mut();
        }
    }
    q
}

/// Polar factor `U Vᵀ = (W Wᵀ)^{-1/2} W` of a matrix with full row rank
/// (rows of the result are orthonormal).
pub fn polar_factor_rows(w: &DMatrix<f64>) -> DMatrix<f64> {
    let (vals, vecs) = sym_eigen_sorted(w * w.transpose());
    let inv_sqrt = &vecs * DMatrix::from_diagonal(&vals.map(|v| 1.0 / v.sqrt())) * vecs.transpose();
    inv_sqrt * w
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pinv_of_rank_deficient_gram() {
        // Duplicated direction: G = [[1, 1], [1, 1]]
        let g = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        let pinv = PsdPinv::new(g.clone(), rank_cutoff(2, 2.0));
        assert_eq!(pinv.rank(), 1);
        let v = DVector::from_vec(vec![1.0, 1.0]);
        let x = pinv.apply(&v);
        // minimum-norm solution of G x = v
        assert!((x[0] - 0.5).abs() < 1e-15 && (x[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn random_orthogonal_is_orthogonal() {
        let mut rng = rng_from_seed(3);
        let q = random_orthogonal(&mut rng, 5);
        let e = q.tr_mul(&q) - DMatrix::identity(5, 5);
        assert!(e.norm() < 1e-13);
    }

    #[test]
    fn polar_factor_has_orthonormal_rows() {
        let mut rng = rng_from_seed(9);
        let w = gaussian_matrix(&mut rng, 2, 5);
        let u = polar_factor_rows(&w);
        assert!((&u * u.transpose() - DMatrix::identity(2, 2)).norm() < 1e-13);
    }

    #[test]
    fn rank_counts_above_cutoff() {
        assert_eq!(numerical_rank(&[1.0, 1e-20, 0.5], 3, None), 2);
        assert_eq!(numerical_rank(&[0.0, 0.0], 3, None), 0);
        assert_eq!(numerical_rank(&[1.0, 1e-9], 3, Some(1e-8)), 1);
    }
}
