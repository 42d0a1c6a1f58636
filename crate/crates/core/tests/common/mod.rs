//! Reference computations shared by the integration tests. Nothing here calls
//! into the solver's geometry; only dense products, `to_dense` and nalgebra's
//! factorizations are used.
#![allow(dead_code)]

use std::f64::consts::PI;

use bmsdp::linalg::{self, SeededRng};
use bmsdp::{instances, SdpProblem};
use nalgebra::{DMatrix, DVector};
use rand::Rng;

/// `Σ_jk (A)_jk X_jk` with explicit loops.
pub fn naive_inner(a: &DMatrix<f64>, x: &DMatrix<f64>) -> f64 {
    let mut s = 0.0;
    for j in 0..a.nrows() {
        for k in 0..a.ncols() {
            s += a[(j, k)] * x[(j, k)];
        }
    }
    s
}

pub fn dense_constraints(problem: &SdpProblem) -> Vec<DMatrix<f64>> {
    problem.constraints().iter().map(|a| a.to_dense()).collect()
}

/// Orthogonal projector onto the tangent space at `y`, built from an SVD of
/// the stacked normal vectors `vec(A_i Y)`.
pub struct SvdProjector {
    n: usize,
    p: usize,
    normal: DMatrix<f64>,
}

impl SvdProjector {
    pub fn new(problem: &SdpProblem, y: &DMatrix<f64>) -> Self {
        let (n, p) = y.shape();
        let a = dense_constraints(problem);
        let mut cols = DMatrix::zeros(n * p, a.len());
        for (i, ai) in a.iter().enumerate() {
            let ay = ai * y;
            cols.set_column(i, &DVector::from_column_slice(ay.as_slice()));
        }
        let svd = cols.svd(true, false);
        let u = svd.u.unwrap();
        let top = svd.singular_values.amax();
        let cut = (n * p).max(a.len()) as f64 * f64::EPSILON * top;
        let keep: Vec<usize> = (0..svd.singular_values.len())
            .filter(|&k| svd.singular_values[k] > cut)
            .collect();
        let mut normal = DMatrix::zeros(n * p, keep.len());
        for (dst, &k) in keep.iter().enumerate() {
            normal.set_column(dst, &u.column(k));
        }
        Self { n, p, normal }
    }

    pub fn normal_rank(&self) -> usize {
        self.normal.ncols()
    }

    pub fn project(&self, z: &DMatrix<f64>) -> DMatrix<f64> {
        let v = DVector::from_column_slice(z.as_slice());
        let out = &v - &self.normal * (self.normal.transpose() * &v);
        DMatrix::from_column_slice(self.n, self.p, out.as_slice())
    }

    /// Orthonormal basis of the tangent space, one `n × p` matrix per element.
    pub fn tangent_basis(&self) -> Vec<DMatrix<f64>> {
        let dim = self.n * self.p;
        let proj = DMatrix::identity(dim, dim) - &self.normal * self.normal.transpose();
        let eig = proj.symmetric_eigen();
        (0..dim)
            .filter(|&k| eig.eigenvalues[k] > 0.5)
            .map(|k| DMatrix::from_column_slice(self.n, self.p, eig.eigenvectors.column(k).as_slice()))
            .collect()
    }
}

/// Least-squares `μ` and `S = C - Σ μ_i A_i` from dense normal equations.
pub fn reference_s(problem: &SdpProblem, y: &DMatrix<f64>) -> DMatrix<f64> {
    let a = dense_constraints(problem);
    let c = problem.cost_matrix().to_dense();
    let ay: Vec<DMatrix<f64>> = a.iter().map(|ai| ai * y).collect();
    let m = a.len();
    let g = DMatrix::from_fn(m, m, |i, j| naive_inner(&ay[i], &ay[j]));
    let cy = &c * y;
    let rhs = DVector::from_fn(m, |i, _| naive_inner(&ay[i], &cy));
    let svd = g.svd(true, true);
    let cut = m as f64 * f64::EPSILON * svd.singular_values.amax() * 1e3;
    let mu = svd.solve(&rhs, cut).unwrap();
    let mut s = c;
    for (ai, mi) in a.iter().zip(mu.iter()) {
        s -= ai * *mi;
    }
    s
}

/// Random point of each built-in family with `n ≤ 20`, `p ≤ 6`, cycling
/// through the four families by `k`.
pub fn family_point(rng: &mut SeededRng, k: usize) -> (String, SdpProblem, DMatrix<f64>) {
    let (name, problem, p) = match k % 4 {
        0 => {
            let d = rng.random_range(1..=3usize);
            let q = rng.random_range(2..=6usize);
            let p = rng.random_range(d..=6usize);
            (format!("orthocut q={q} d={d}"), instances::orthocut_gaussian(rng, q, d), p)
        }
        1 => {
            let n = rng.random_range(2..=10usize);
            (format!("trs n={n}"), instances::trs_random(rng, n), rng.random_range(1..=6usize))
        }
        2 => {
            let n = rng.random_range(2..=12usize);
            (format!("geneig n={n}"), instances::geneig_random(rng, n), rng.random_range(1..=6usize))
        }
        _ => {
            let blocks = rng.random_range(1..=3usize);
            let sizes: Vec<usize> = (0..blocks).map(|_| rng.random_range(1..=5usize)).collect();
            let homogeneous = rng.random_bool(0.5);
            (
                format!("spheres {sizes:?} homogeneous={homogeneous}"),
                instances::spheres_random(rng, &sizes, homogeneous),
                rng.random_range(1..=6usize),
            )
        }
    };
    let y = problem.feasible_point(p, rng).unwrap();
    (name, problem, y)
}

/// Unit tangent vector drawn through the SVD projector.
pub fn random_tangent(rng: &mut SeededRng, proj: &SvdProjector, n: usize, p: usize) -> DMatrix<f64> {
    let z = linalg::gaussian_matrix(rng, n, p);
    let v = proj.project(&z);
    let nrm = v.norm();
    v / nrm
}

/// `(g(Y + tV) - g(Y - tV)) / 2t` for the ambient quadratic `g(Y) = <CY, Y>`.
pub fn fd_directional(c: &DMatrix<f64>, y: &DMatrix<f64>, v: &DMatrix<f64>, t: f64) -> f64 {
    let g = |m: &DMatrix<f64>| naive_inner(&(c * m), m);
    (g(&(y + v * t)) - g(&(y - v * t))) / (2.0 * t)
}

/// `(f(t) - 2 f(0) + f(-t)) / t²` for `f` a scalar function of the step.
pub fn second_difference(f: impl Fn(f64) -> f64, t: f64) -> f64 {
    (f(t) - 2.0 * f(0.0) + f(-t)) / (t * t)
}

/// `‖C‖_F ‖Y‖_F²`, the size of `g` near `Y`; difference quotients carry
/// rounding error proportional to it.
pub fn rounding_scale(problem: &SdpProblem, y: &DMatrix<f64>) -> f64 {
    problem.cost_matrix().frobenius_norm() * y.norm_squared()
}

pub fn rel_err(a: f64, b: f64, floor: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(floor)
}

fn trs_value(a: &DMatrix<f64>, b: &DVector<f64>, c: f64, x: &DVector<f64>) -> f64 {
    (a * x).dot(x) + 2.0 * b.dot(x) + c
}

/// Global TRS minimum on the unit sphere by sampling `samples` random unit
/// vectors, then polishing the best few by projected gradient descent.
pub fn trs_brute_force(a: &DMatrix<f64>, b: &DVector<f64>, c: f64, samples: usize, seed: u64) -> (f64, DVector<f64>) {
    let n = b.len();
    let mut rng = linalg::rng_from_seed(seed);
    let keep = 16;
    let mut best: Vec<(f64, DVector<f64>)> = Vec::with_capacity(keep + 1);
    let mut x = vec![0.0; n];
    for _ in 0..samples {
        let mut nrm = 0.0;
        for xi in x.iter_mut() {
            *xi = rng.sample::<f64, _>(rand_distr::StandardNormal);
            nrm += *xi * *xi;
        }
        let nrm = nrm.sqrt();
        let mut val = c;
        for i in 0..n {
            let xi = x[i] / nrm;
            val += 2.0 * b[i] * xi + a[(i, i)] * xi * xi;
            for j in 0..i {
                val += 2.0 * a[(i, j)] * xi * x[j] / nrm;
            }
        }
        if best.len() < keep || val < best[best.len() - 1].0 {
            let v = DVector::from_iterator(n, x.iter().map(|xi| xi / nrm));
            let pos = best.partition_point(|(w, _)| *w <= val);
            best.insert(pos, (val, v));
            best.truncate(keep);
        }
    }
    let step = 1.0 / (2.0 * (a.norm() + b.norm()) + 1.0);
    best.into_iter()
        .map(|(_, mut x)| {
            for _ in 0..20_000 {
                let grad = (a * &x + b) * 2.0;
                let mut next = &x - grad * step;
                next /= next.norm();
                let moved = (&next - &x).norm();
                x = next;
                if moved < 1e-15 {
                    break;
                }
            }
            (trs_value(a, b, c, &x), x)
        })
        .min_by(|l, r| l.0.total_cmp(&r.0))
        .unwrap()
}

/// Minimum of `<C, X>` over `n = 3` Max-Cut feasible matrices of rank ≤ 2,
/// parametrized by the angles of rows 2 and 3 relative to row 1, via a grid
/// followed by successive local refinement.
pub fn maxcut3_grid(c: &DMatrix<f64>) -> f64 {
    let value = |a: f64, b: f64| {
        let x = DMatrix::from_row_slice(3, 3, &[1.0, a.cos(), b.cos(), a.cos(), 1.0, (a - b).cos(), b.cos(), (a - b).cos(), 1.0]);
        naive_inner(c, &x)
    };
    let steps = 400;
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for i in 0..steps {
        for j in 0..steps {
            let a = 2.0 * PI * i as f64 / steps as f64;
            let b = 2.0 * PI * j as f64 / steps as f64;
            let v = value(a, b);
            if v < best.0 {
                best = (v, a, b);
            }
        }
    }
    let mut width = 2.0 * PI / steps as f64;
    for _ in 0..30 {
        let (_, a0, b0) = best;
        for i in -10..=10 {
            for j in -10..=10 {
                let a = a0 + width * i as f64 / 10.0;
                let b = b0 + width * j as f64 / 10.0;
                let v = value(a, b);
                if v < best.0 {
                    best = (v, a, b);
                }
            }
        }
        width *= 0.3;
    }
    best.0
}

/// Orthogonal-Cut point whose face attains the upper dimension bound: the
/// first `d` rows of `I_p` repeated `q` times, with the first `p` rows
/// replaced by `I_p`. Needs `d | p` and `p ≤ qd`.
pub fn orthocut_stacked_point(q: usize, d: usize, p: usize) -> DMatrix<f64> {
    let n = q * d;
    DMatrix::from_fn(n, p, |i, j| {
        let source = if i < p { i } else { i % d };
        if source == j {
            1.0
        } else {
            0.0
        }
    })
}
