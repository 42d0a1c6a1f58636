//! Independent reference solvers. They are slow and simple on purpose and
//! share nothing with the solver beyond dense matrix products and
//! eigendecompositions.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::certify;
use crate::error::{Error, Result};
use crate::geometry::Factor;
use crate::linalg;
use crate::model::SdpProblem;
use crate::solver::{rtr, SolverOptions};
use crate::sym::SymMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleMethod {
    /// Cholesky reduction of the pencil `(C, B)` to a standard eigenproblem.
    GenEigCholesky,
    /// Same pencil through `B^{-1/2} C B^{-1/2}`.
    GenEigSqrt,
    /// Secular equation with safeguarded Newton steps.
    TrsSecular,
    /// Explicit hard-case construction.
    TrsHardCase,
    /// Trust-region solve at `p = n + 1`.
    Escalation,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub f_star: f64,
    /// Witness for the SDP, when one is produced.
    pub x_star: Option<SymMatrix>,
    /// Vector solution of the underlying quadratic problem, when one exists.
    pub x: Option<Vec<f64>>,
    pub method: OracleMethod,
    /// Zero for closed-form oracles. For escalation, `ε_g √R + ε_H R`, which
    /// bounds `2 (f_star - f*)`.
    pub error_bar: f64,
}

/// `min xᵀCx s.t. xᵀBx = 1` via `B = LLᵀ` and the eigenproblem of `L⁻¹ C L⁻ᵀ`.
pub fn oracle_geneig(c: &SymMatrix, b: &SymMatrix) -> Result<OracleResult> {
    let cd = c.to_dense();
    let bd = b.to_dense();
    let l = nalgebra::Cholesky::new(bd.clone()).ok_or(Error::NotPositiveDefinite)?.l();
    let linv_c = l.solve_lower_triangular(&cd).ok_or(Error::NotPositiveDefinite)?;
    let m = l
        .solve_lower_triangular(&linv_c.transpose())
        .ok_or(Error::NotPositiveDefinite)?;
    let m = (&m + m.transpose()) * 0.5;
    let (lambda, w) = linalg::sym_min_eig(&m);
    let x = l.transpose().solve_upper_triangular(&w).ok_or(Error::NotPositiveDefinite)?;
    finish_geneig(&cd, &bd, lambda, x, OracleMethod::GenEigCholesky)
}

/// Second route for the same pencil, through the symmetric square root of `B`.
pub fn oracle_geneig_sqrt(c: &SymMatrix, b: &SymMatrix) -> Result<OracleResult> {
    let cd = c.to_dense();
    let bd = b.to_dense();
    let (vals, vecs) = linalg::sym_eigen_sorted(bd.clone());
    if vals[0] <= 0.0 {
        return Err(Error::NotPositiveDefinite);
    }
    let inv_sqrt = &vecs * DMatrix::from_diagonal(&vals.map(|v| 1.0 / v.sqrt())) * vecs.transpose();
    let m = &inv_sqrt * &cd * &inv_sqrt;
    let m = (&m + m.transpose()) * 0.5;
    let (lambda, w) = linalg::sym_min_eig(&m);
    let x = &inv_sqrt * w;
    finish_geneig(&cd, &bd, lambda, x, OracleMethod::GenEigSqrt)
}

fn finish_geneig(
    cd: &DMatrix<f64>,
    bd: &DMatrix<f64>,
    lambda: f64,
    x: DVector<f64>,
    method: OracleMethod,
) -> Result<OracleResult> {
    let scale = x.dot(&(bd * &x));
    let x = x / scale.sqrt();
    let witness = &x * x.transpose();
    let value = x.dot(&(cd * &x));
    debug_assert!((value - lambda).abs() <= 1e-8 * (1.0 + lambda.abs()));
    Ok(OracleResult {
        f_star: lambda,
        x_star: Some(SymMatrix::from_lower(&witness)?),
        x: Some(x.iter().copied().collect()),
        method,
        error_bar: 0.0,
    })
}

/// Global minimum of `xᵀAx + 2bᵀx + c` on the unit sphere.
///
/// With `A = QΛQᵀ` and `β = Qᵀb`, optimal points are `x = -(A + νI)† b`
/// (plus a bottom eigenvector component in the hard case) with `ν ≥ -λ₁`
/// and `‖x‖ = 1`. The multiplier solves `1/‖x(ν)‖ = 1` on
/// `(-λ₁, -λ₁ + ‖b‖]` by Newton steps safeguarded with bisection.
pub fn oracle_trs(a: &SymMatrix, b: &DVector<f64>, c: f64) -> Result<OracleResult> {
    let n = a.n();
    if b.len() != n {
        return Err(Error::DimensionMismatch {
            what: "TRS linear term length",
            expected: n,
            got: b.len(),
        });
    }
    let (lam, q) = linalg::sym_eigen_sorted(a.to_dense());
    let beta = q.tr_mul(b);
    let l1 = lam[0];
    let bnorm = b.norm();
    let spread = (lam[n - 1] - l1).abs().max(1.0);
    let bottom_tol = 1e-10 * spread;
    let bottom: Vec<usize> = (0..n).filter(|&k| lam[k] - l1 <= bottom_tol).collect();
    let beta_bottom = bottom.iter().map(|&k| beta[k] * beta[k]).sum::<f64>().sqrt();

    let coords = if beta_bottom <= 1e-10 * (1.0 + bnorm) {
        // candidate hard case: ν = -λ₁
        let mut x = DVector::zeros(n);
        for k in 0..n {
            if !bottom.contains(&k) {
                x[k] = -beta[k] / (lam[k] - l1);
            }
        }
        let r2 = x.norm_squared();
        if r2 <= 1.0 {
            x[bottom[0]] = (1.0 - r2).sqrt();
            Some((x, OracleMethod::TrsHardCase))
        } else {
            None
        }
    } else {
        None
    };
    let (coords, method) = match coords {
        Some(found) => found,
        None => (secular_solution(&lam, &beta, bnorm), OracleMethod::TrsSecular),
    };
    let x = &q * coords;
    let x = &x / x.norm();
    let ad = a.to_dense();
    let f = x.dot(&(&ad * &x)) + 2.0 * b.dot(&x) + c;
    let lifted = DVector::from_iterator(n + 1, x.iter().copied().chain(std::iter::once(1.0)));
    Ok(OracleResult {
        f_star: f,
        x_star: Some(SymMatrix::from_lower(&(&lifted * lifted.transpose()))?),
        x: Some(x.iter().copied().collect()),
        method,
        error_bar: 0.0,
    })
}

fn secular_solution(lam: &DVector<f64>, beta: &DVector<f64>, bnorm: f64) -> DVector<f64> {
    let n = lam.len();
    let l1 = lam[0];
    if bnorm == 0.0 {
        let mut x = DVector::zeros(n);
        x[0] = 1.0;
        return x;
    }
    let coords = |nu: f64| DVector::from_fn(n, |k, _| -beta[k] / (lam[k] + nu));
    // ψ(ν) = 1/‖x(ν)‖ - 1 is increasing and nearly linear in ν
    let psi = |nu: f64| {
        let x = coords(nu);
        let r = x.norm();
        let dr = -(0..n).map(|k| x[k] * x[k] / (lam[k] + nu)).sum::<f64>() / r;
        (1.0 / r - 1.0, -dr / (r * r))
    };
    let mut lo = -l1;
    let mut hi = -l1 + bnorm;
    let mut nu = hi;
    for _ in 0..500 {
        let (val, der) = psi(nu);
        if val.abs() <= 1e-15 {
            break;
        }
        if val > 0.0 {
            hi = nu;
        } else {
            lo = nu;
        }
        let newton = nu - val / der;
        nu = if newton.is_finite() && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo <= 1e-16 * (1.0 + hi.abs()) {
            break;
        }
    }
    coords(nu)
}

/// Reference SDP value from a trust-region solve at `p = n + 1`, where every
/// second-order critical point is optimal up to tolerances. The start is
/// `y0` padded to `n + 1` columns, or a seeded feasible point.
pub fn oracle_sdp_via_escalation(problem: &SdpProblem, y0: Option<&Factor>, seed: u64) -> Result<OracleResult> {
    let r = problem
        .trace_bound()
        .ok_or_else(|| Error::InvalidProblem("the escalation oracle needs the trace bound R".into()))?;
    let p = problem.n() + 1;
    let start = match y0 {
        Some(f) => {
            let mut y = DMatrix::zeros(problem.n(), p);
            let keep = f.p().min(p);
            y.columns_mut(0, keep).copy_from(&f.y().columns(0, keep));
            Factor::new(problem, y)?
        }
        None => {
            let mut rng = linalg::rng_from_seed(seed);
            Factor::new(problem, problem.feasible_point(p, &mut rng)?)?
        }
    };
    let scale = 1.0 + problem.cost_norm();
    let opts = SolverOptions {
        eps_g: Some(1e-10 * scale),
        eps_h: Some(1e-8 * scale),
        seed,
        ..Default::default()
    };
    let (y, _) = rtr(problem, start, &opts)?;
    let cert = certify::certify(problem, &y, 0.0, 0.0);
    let error_bar = cert.eps_h * r + cert.eps_g * r.sqrt();
    let x = y.y() * y.y().transpose();
    Ok(OracleResult {
        f_star: problem.cost(y.y()),
        x_star: Some(SymMatrix::from_lower(&x)?),
        x: None,
        method: OracleMethod::Escalation,
        error_bar,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances;

    #[test]
    fn diagonal_pencil() {
        let res = oracle_geneig(&SymMatrix::from_diagonal(&[1.0, 2.0, 3.0]), &SymMatrix::identity(3)).unwrap();
        assert!((res.f_star - 1.0).abs() < 1e-14);
    }

    #[test]
    fn identity_cost_gives_reciprocal_top_eigenvalue() {
        let mut rng = linalg::rng_from_seed(1);
        let b = instances::random_spd(&mut rng, 5);
        let top = linalg::sym_eigen_sorted(b.to_dense()).0[4];
        let res = oracle_geneig(&SymMatrix::identity(5), &b).unwrap();
        assert!((res.f_star - 1.0 / top).abs() < 1e-12);
    }

    #[test]
    fn routes_agree() {
        let mut rng = linalg::rng_from_seed(2);
        for _ in 0..5 {
            let c = instances::gaussian_symmetric(&mut rng, 5);
            let b = instances::random_spd(&mut rng, 5);
            let one = oracle_geneig(&c, &b).unwrap();
            let two = oracle_geneig_sqrt(&c, &b).unwrap();
            assert!((one.f_star - two.f_star).abs() <= 1e-10 * (1.0 + one.f_star.abs()));
        }
    }

    #[test]
    fn trs_trivial_cases() {
        let r = oracle_trs(&SymMatrix::identity(3), &DVector::zeros(3), 0.0).unwrap();
        assert!((r.f_star - 1.0).abs() < 1e-15);
        let r = oracle_trs(&SymMatrix::from_diagonal(&[-1.0, 1.0]), &DVector::zeros(2), 0.0).unwrap();
        assert!((r.f_star + 1.0).abs() < 1e-15);
        let x = r.x.unwrap();
        assert!((x[0].abs() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn trs_suboptimal_instance_optimum() {
        let (a, b, c) = instances::trs_suboptimal_data();
        let r = oracle_trs(&a, &b, c).unwrap();
        assert!((r.f_star + 1.2).abs() < 1e-14);
    }

    #[test]
    fn trs_hard_case_is_detected() {
        let mut rng = linalg::rng_from_seed(3);
        let (a, b, c) = instances::trs_hard_data(&mut rng, 5, 1);
        let r = oracle_trs(&a, &b, c).unwrap();
        assert_eq!(r.method, OracleMethod::TrsHardCase);
        let x = DVector::from_vec(r.x.unwrap());
        assert!((x.norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn triangle_maxcut() {
        let prob = instances::maxcut_from_laplacian(&instances::complete_laplacian(3));
        let r = oracle_sdp_via_escalation(&prob, None, 4).unwrap();
        assert!((r.f_star + 2.25).abs() < 1e-8, "{}", r.f_star);
        assert!(r.error_bar < 1e-6);
    }
}
