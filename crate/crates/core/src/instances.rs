//! Instance generators for the built-in families, plus planted critical points.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::linalg::{self, SeededRng};
use crate::model::{build_family, ProblemFamily, SdpProblem};
use crate::sym::SymMatrix;

/// Graph Laplacian of the `n`-cycle.
pub fn cycle_laplacian(n: usize) -> SymMatrix {
    let mut t = Vec::new();
    for i in 0..n {
        t.push((i, i, if n > 2 { 2.0 } else { n as f64 - 1.0 }));
    }
    if n == 2 {
        t.push((1, 0, -1.0));
    } else if n > 2 {
        for i in 1..n {
            t.push((i, i - 1, -1.0));
        }
        t.push((n - 1, 0, -1.0));
    }
    SymMatrix::from_triplets(n, t).expect("valid cycle")
}

/// Graph Laplacian of the complete graph on `n` vertices.
pub fn complete_laplacian(n: usize) -> SymMatrix {
    let mut t = Vec::new();
    for i in 0..n {
        t.push((i, i, n as f64 - 1.0));
        for j in 0..i {
            t.push((i, j, -1.0));
        }
    }
    SymMatrix::from_triplets(n, t).expect("valid complete graph")
}

/// Symmetric matrix with independent standard normal entries on and below the diagonal.
pub fn gaussian_symmetric(rng: &mut SeededRng, n: usize) -> SymMatrix {
    let g = linalg::gaussian_matrix(rng, n, n);
    SymMatrix::from_lower(&g).expect("finite")
}

/// Max-Cut relaxation with cost `-L/4`, so the optimum is minus the cut value.
pub fn maxcut_from_laplacian(laplacian: &SymMatrix) -> SdpProblem {
    build_family(ProblemFamily::OrthoCut {
        d: 1,
        cost: laplacian.scaled(-0.25),
    })
    .expect("valid Max-Cut")
}

pub fn maxcut_cycle(n: usize) -> SdpProblem {
    maxcut_from_laplacian(&cycle_laplacian(n))
}

pub fn maxcut_gaussian(rng: &mut SeededRng, n: usize) -> SdpProblem {
    build_family(ProblemFamily::OrthoCut {
        d: 1,
        cost: gaussian_symmetric(rng, n),
    })
    .expect("valid Max-Cut")
}

/// Orthogonal-Cut with `q` slices of size `d` and a Gaussian cost.
pub fn orthocut_gaussian(rng: &mut SeededRng, q: usize, d: usize) -> SdpProblem {
    build_family(ProblemFamily::OrthoCut {
        d,
        cost: gaussian_symmetric(rng, q * d),
    })
    .expect("valid Orthogonal-Cut")
}

pub fn random_spd(rng: &mut SeededRng, n: usize) -> SymMatrix {
    let g = linalg::gaussian_matrix(rng, n, n);
    let b = &g * g.transpose() / n as f64 + DMatrix::identity(n, n) * 0.1;
    SymMatrix::from_lower(&b).expect("finite")
}

pub fn geneig_random(rng: &mut SeededRng, n: usize) -> SdpProblem {
    let c = gaussian_symmetric(rng, n);
    let b = random_spd(rng, n);
    build_family(ProblemFamily::GenEig { c, b }).expect("SPD B")
}

pub fn trs_random(rng: &mut SeededRng, n: usize) -> SdpProblem {
    let (a, b, c) = trs_random_data(rng, n);
    build_family(ProblemFamily::Trs { a, b, c }).expect("valid TRS")
}

pub fn trs_random_data(rng: &mut SeededRng, n: usize) -> (SymMatrix, DVector<f64>, f64) {
    let a = gaussian_symmetric(rng, n);
    let b = linalg::gaussian_vector(rng, n);
    let c = linalg::gaussian_vector(rng, 1)[0];
    (a, b, c)
}

/// TRS in the hard case: `b` is orthogonal to the bottom eigenspace of `A`
/// (multiplicity `mult`) and `‖(A - λ₁I)† b‖ < 1`, so optimal solutions
/// carry a component along the bottom eigenspace.
pub fn trs_hard_data(rng: &mut SeededRng, n: usize, mult: usize) -> (SymMatrix, DVector<f64>, f64) {
    let mult = mult.clamp(1, n.saturating_sub(1).max(1));
    let q = linalg::random_orthogonal(rng, n);
    let mut lam: Vec<f64> = linalg::gaussian_vector(rng, n).iter().map(|v| v.abs() + 0.5).collect();
    lam.sort_by(f64::total_cmp);
    let bottom = -1.0;
    for l in lam.iter_mut().take(mult) {
        *l = bottom;
    }
    for l in lam.iter_mut().skip(mult) {
        *l += bottom + 0.2;
    }
    let mut beta = linalg::gaussian_vector(rng, n);
    for k in 0..mult {
        beta[k] = 0.0;
    }
    let weighted: f64 = (mult..n).map(|k| (beta[k] / (lam[k] - bottom)).powi(2)).sum::<f64>().sqrt();
    if weighted > 0.0 {
        beta *= 0.6 / weighted;
    }
    let a = &q * DMatrix::from_diagonal(&DVector::from_vec(lam)) * q.transpose();
    let b = &q * beta;
    let c = linalg::gaussian_vector(rng, 1)[0];
    (SymMatrix::from_lower(&a).expect("finite"), b, c)
}

pub fn trs_hard(rng: &mut SeededRng, n: usize, mult: usize) -> SdpProblem {
    let (a, b, c) = trs_hard_data(rng, n, mult);
    build_family(ProblemFamily::Trs { a, b, c }).expect("valid TRS")
}

/// `A = diag(-1, 1)`, `b = (0.1, 0)`, `c = 0`. On the unit circle the point
/// `e₁` is a strict local minimum with cost `-0.8` while `-e₁` is the global
/// minimum with cost `-1.2`.
pub fn trs_suboptimal_data() -> (SymMatrix, DVector<f64>, f64) {
    (
        SymMatrix::from_diagonal(&[-1.0, 1.0]),
        DVector::from_vec(vec![0.1, 0.0]),
        0.0,
    )
}

pub fn trs_suboptimal() -> SdpProblem {
    let (a, b, c) = trs_suboptimal_data();
    build_family(ProblemFamily::Trs { a, b, c }).expect("valid TRS")
}

/// Rank-one factor of the lifted TRS at the spurious local minimum `x = e₁`.
pub fn trs_suboptimal_point() -> DMatrix<f64> {
    DMatrix::from_column_slice(3, 1, &[1.0, 0.0, 1.0])
}

pub fn spheres_random(rng: &mut SeededRng, sizes: &[usize], homogeneous: bool) -> SdpProblem {
    let total: usize = sizes.iter().sum::<usize>() + usize::from(!homogeneous);
    build_family(ProblemFamily::Spheres {
        sizes: sizes.to_vec(),
        homogeneous,
        cost: gaussian_symmetric(rng, total),
    })
    .expect("valid Spheres")
}

/// Unstructured problem with `m` dense random constraints, feasible at a
/// random point of rank `p`. Returns the problem and that point.
pub fn random_generic_feasible(rng: &mut SeededRng, n: usize, m: usize, p: usize) -> (SdpProblem, DMatrix<f64>) {
    let c = gaussian_symmetric(rng, n);
    let a: Vec<SymMatrix> = (0..m).map(|_| gaussian_symmetric(rng, n)).collect();
    let y = linalg::gaussian_matrix(rng, n, p);
    let x = &y * y.transpose();
    let b = DVector::from_iterator(m, a.iter().map(|ai| ai.inner(&x)));
    (SdpProblem::new(c, a, b).expect("valid generic problem"), y)
}

pub fn random_generic(rng: &mut SeededRng, n: usize, m: usize) -> SdpProblem {
    random_generic_feasible(rng, n, m, n).0
}

/// Planted critical point of Max-Cut on the `n`-cycle (cost `-L/4`): rows
/// `(cos 2πjk/n, sin 2πjk/n)`. Since `L y = (2 - 2cos θ) y` for this Fourier
/// mode, `S Y = 0`. It is suboptimal whenever `j` is below the optimal
/// frequency and has full rank `2` unless `2j ∈ {0, n}`.
pub fn cycle_planted_point(n: usize, freq: usize) -> DMatrix<f64> {
    let theta = 2.0 * PI * freq as f64 / n as f64;
    DMatrix::from_fn(n, 2, |k, c| {
        let a = theta * k as f64;
        if c == 0 {
            a.cos()
        } else {
            a.sin()
        }
    })
}

/// Cost of [`cycle_planted_point`]: `-n (1 - cos(2πj/n)) / 2`.
pub fn cycle_planted_cost(n: usize, freq: usize) -> f64 {
    let theta = 2.0 * PI * freq as f64 / n as f64;
    -(n as f64) * (1.0 - theta.cos()) / 2.0
}

/// Optimal Max-Cut relaxation value of the `n`-cycle with cost `-L/4`.
pub fn cycle_maxcut_optimum(n: usize) -> f64 {
    if n.is_multiple_of(2) {
        -(n as f64)
    } else {
        cycle_planted_cost(n, (n - 1) / 2)
    }
}

/// `(n, j)` pairs for ten planted full-rank suboptimal critical points.
pub fn planted_cycle_cases() -> Vec<(usize, usize)> {
    vec![(5, 1), (6, 1), (6, 2), (7, 1), (7, 2), (8, 1), (8, 2), (8, 3), (9, 1), (10, 3)]
}
