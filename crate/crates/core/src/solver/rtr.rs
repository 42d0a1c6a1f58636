use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::certify::{DualCertificate, FaceReport};
use crate::error::{Error, Result};
use crate::geometry::{self, Factor, PointData, TangentVector};
use crate::lanczos;
use crate::linalg;
use crate::model::SdpProblem;

/// Ranks tried by the staircase.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum PSchedule {
    /// Start just above the Pataki bound and grow by one up to `n + 1`.
    #[default]
    Auto,
    /// Only these ranks, in increasing order.
    Ranks(Vec<usize>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Gradient tolerance; `None` means `1e-8 (1 + ‖C‖_F)`.
    pub eps_g: Option<f64>,
    /// Hessian tolerance; `None` means `1e-6 (1 + ‖C‖_F)`.
    pub eps_h: Option<f64>,
    pub max_outer: usize,
    /// `None` means `‖Y₀‖ / 8`.
    pub tr_radius_init: Option<f64>,
    /// `None` means `4 ‖Y₀‖`.
    pub tr_radius_max: Option<f64>,
    /// Inner iteration cap; `None` means the manifold dimension.
    pub tcg_max: Option<usize>,
    pub seed: u64,
    pub p_schedule: PSchedule,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            eps_g: None,
            eps_h: None,
            max_outer: 10_000,
            tr_radius_init: None,
            tr_radius_max: None,
            tcg_max: None,
            seed: 0,
            p_schedule: PSchedule::Auto,
        }
    }
}

impl SolverOptions {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_tolerances(mut self, eps_g: f64, eps_h: f64) -> Self {
        self.eps_g = Some(eps_g);
        self.eps_h = Some(eps_h);
        self
    }

    pub fn eps_g_for(&self, problem: &SdpProblem) -> f64 {
        self.eps_g.unwrap_or(1e-8 * (1.0 + problem.cost_norm()))
    }

    pub fn eps_h_for(&self, problem: &SdpProblem) -> f64 {
        self.eps_h.unwrap_or(1e-6 * (1.0 + problem.cost_norm()))
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: Option<f64>| v.is_none_or(|x| x > 0.0 && x.is_finite());
        if !positive(self.eps_g) || !positive(self.eps_h) {
            return Err(Error::InvalidOptions("eps_g and eps_h must be positive".into()));
        }
        if !positive(self.tr_radius_init) || !positive(self.tr_radius_max) {
            return Err(Error::InvalidOptions("trust-region radii must be positive".into()));
        }
        if self.max_outer == 0 {
            return Err(Error::InvalidOptions("max_outer must be at least 1".into()));
        }
        if let PSchedule::Ranks(r) = &self.p_schedule {
            if r.is_empty() || r.contains(&0) || r.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidOptions("p_schedule must list increasing positive ranks".into()));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    /// Both tolerances met.
    Converged,
    /// `max_outer` reached; the best iterate is returned.
    MaxIterations,
    /// Repeated rejections drove the radius below `1e-14`.
    RadiusUnderflow,
}

/// One rank increase of the staircase.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Escalation {
    /// New rank.
    pub p: usize,
    pub reason: String,
    pub lambda_min_s: f64,
    pub escape: Option<EscapeStep>,
}

/// First accepted step along an escape direction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EscapeStep {
    pub step: f64,
    pub decrease: f64,
    pub lambda_min_s: f64,
    pub backtracks: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolveReport {
    pub status: SolveStatus,
    pub final_cost: f64,
    /// `‖grad g(Y)‖ = 2 ‖SY‖`.
    pub grad_norm: f64,
    /// Smallest Rayleigh quotient of the Hessian found on the tangent space.
    pub hess_min_eig_estimate: f64,
    pub eps_g: f64,
    pub eps_h: f64,
    pub p_used: usize,
    pub rank_y: usize,
    pub outer_iters: usize,
    pub tcg_iters_total: usize,
    pub escalations: Vec<Escalation>,
    pub certificate: Option<DualCertificate>,
    pub face: Option<FaceReport>,
    pub wall_time: f64,
    /// Cost after every accepted step (first entry is the starting cost).
    #[serde(skip)]
    pub cost_trace: Vec<f64>,
}

impl SolveReport {
    pub fn converged(&self) -> bool {
        self.status == SolveStatus::Converged
    }
}

/// Relative threshold on singular values of `Y` for its numerical rank.
pub const RANK_TOLERANCE: f64 = 1e-8;

const KAPPA: f64 = 0.1;
const THETA: f64 = 1.0;
const RHO_ACCEPT: f64 = 0.1;
const RHO_GROW: f64 = 0.75;
const MIN_RADIUS: f64 = 1e-14;
/// Above this `np`, the Hessian check uses Lanczos instead of dense assembly.
const DENSE_HESS_LIMIT: usize = 400;

/// Riemannian trust-region method with truncated CG from a feasible start.
pub fn rtr(problem: &SdpProblem, y0: Factor, opts: &SolverOptions) -> Result<(Factor, SolveReport)> {
    opts.validate()?;
    if !y0.is_feasible(problem) {
        return Err(Error::Infeasible {
            residual: y0.residual(),
            tolerance: problem.feasibility_tolerance(),
        });
    }
    let start = Instant::now();
    let eps_g = opts.eps_g_for(problem);
    let eps_h = opts.eps_h_for(problem);
    let y_norm = y0.y().norm().max(f64::MIN_POSITIVE);
    let radius_max = opts.tr_radius_max.unwrap_or(4.0 * y_norm);
    let mut radius = opts.tr_radius_init.unwrap_or(y_norm / 8.0).min(radius_max);
    let dim = manifold_dim(problem, &y0);
    let tcg_max = opts.tcg_max.unwrap_or(dim).max(1);
    let mut rng = linalg::rng_from_seed(opts.seed);

    let mut x = PointData::new(problem, y0);
    let mut cost = x.cost;
    let mut cost_trace = vec![cost];
    let mut outer = 0;
    let mut tcg_total = 0;
    let mut hess_min = f64::NAN;
    let status = loop {
        let gnorm = x.grad.norm();
        let (eta, heta) = if gnorm <= eps_g {
            let est = hessian_min_eig(&x, &mut rng);
            hess_min = est.0;
            if est.0 >= -eps_h {
                break SolveStatus::Converged;
            }
            if outer >= opts.max_outer {
                break SolveStatus::MaxIterations;
            }
            // step to the boundary along the negative curvature direction
            let mut dir = est.1;
            if x.grad.matrix().dot(&dir) > 0.0 {
                dir = -dir;
            }
            let eta = dir * radius;
            let heta = x.hess(&eta).into_inner();
            (eta, heta)
        } else {
            if outer >= opts.max_outer {
                break SolveStatus::MaxIterations;
            }
            let (eta, heta, inner) = truncated_cg(&x, radius, tcg_max);
            tcg_total += inner;
            (eta, heta)
        };
        outer += 1;

        let model_decrease = -(x.grad.matrix().dot(&eta) + 0.5 * eta.dot(&heta));
        let on_boundary = eta.norm() >= radius * (1.0 - 1e-10);
        let candidate = geometry::retract(problem, &x.factor, &TangentVector::trusted(eta.clone()))
            .ok()
            .filter(|f| f.is_feasible(problem));
        let (rho, decrease, next) = match candidate {
            Some(f) => {
                let decrease = cost_decrease(problem, x.factor.y(), f.y());
                let reg = cost.abs().max(1.0) * f64::EPSILON * 1e3;
                let rho = (decrease + reg) / (model_decrease + reg);
                (rho, decrease, Some(f))
            }
            None => (f64::NEG_INFINITY, f64::NEG_INFINITY, None),
        };
        let accepted = rho.is_finite() && rho >= RHO_ACCEPT && model_decrease >= 0.0 && decrease >= 0.0;
        match next {
            Some(f) if accepted => {
                if rho > RHO_GROW && on_boundary {
                    radius = (2.0 * radius).min(radius_max);
                }
                x = PointData::new(problem, f);
                cost -= decrease;
                cost_trace.push(cost);
            }
            _ => radius *= 0.25,
        }
        if radius < MIN_RADIUS {
            if x.grad.norm() <= eps_g {
                hess_min = hessian_min_eig(&x, &mut rng).0;
            }
            break SolveStatus::RadiusUnderflow;
        }
    };

    let rank_y = x.factor.rank(RANK_TOLERANCE);
    let report = SolveReport {
        status,
        final_cost: x.cost,
        grad_norm: x.grad.norm(),
        hess_min_eig_estimate: hess_min,
        eps_g,
        eps_h,
        p_used: x.factor.p(),
        rank_y,
        outer_iters: outer,
        tcg_iters_total: tcg_total,
        escalations: Vec::new(),
        certificate: None,
        face: None,
        wall_time: start.elapsed().as_secs_f64(),
        cost_trace,
    };
    Ok((x.factor, report))
}

/// `g(Y) - g(Z)` evaluated as `<C(Y - Z), Y + Z>`, which keeps full relative
/// accuracy when the two points are close.
pub fn cost_decrease(problem: &SdpProblem, y: &DMatrix<f64>, z: &DMatrix<f64>) -> f64 {
    let diff = y - z;
    let sum = y + z;
    (problem.cost_dense() * diff).dot(&sum)
}

/// `np - m'` at the given point.
pub fn manifold_dim(problem: &SdpProblem, y: &Factor) -> usize {
    let g = geometry::gram(problem, y);
    (y.n() * y.p()).saturating_sub(g.m_prime())
}

/// Steihaug-Toint truncated CG on the trust-region model. Returns the step,
/// its Hessian image and the number of inner iterations.
fn truncated_cg(x: &PointData, radius: f64, max_inner: usize) -> (DMatrix<f64>, DMatrix<f64>, usize) {
    let shape = x.factor.y().shape();
    let mut eta = DMatrix::zeros(shape.0, shape.1);
    let mut heta = DMatrix::zeros(shape.0, shape.1);
    let mut r = x.grad.matrix().clone();
    let mut rr = r.norm_squared();
    let r0 = rr.sqrt();
    let mut delta = -&r;
    let mut e_pe = 0.0;
    let target = r0 * r0.powf(THETA).min(KAPPA);
    let mut iters = 0;
    for _ in 0..max_inner {
        iters += 1;
        let hd = x.hess(&delta).into_inner();
        let d_hd = delta.dot(&hd);
        let e_pd = eta.dot(&delta);
        let d_pd = delta.norm_squared();
        if d_pd == 0.0 {
            break;
        }
        let alpha = rr / d_hd;
        let e_pe_new = e_pe + 2.0 * alpha * e_pd + alpha * alpha * d_pd;
        if d_hd <= 0.0 || e_pe_new >= radius * radius {
            let tau = (-e_pd + (e_pd * e_pd + d_pd * (radius * radius - e_pe)).max(0.0).sqrt()) / d_pd;
            eta += &delta * tau;
            heta += &hd * tau;
            break;
        }
        eta += &delta * alpha;
        heta += &hd * alpha;
        e_pe = e_pe_new;
        r += &hd * alpha;
        r = x.project(&r).into_inner();
        let rr_new = r.norm_squared();
        if rr_new.sqrt() <= target {
            break;
        }
        let beta = rr_new / rr;
        rr = rr_new;
        delta = x.project(&(&delta * beta - &r)).into_inner();
    }
    (eta, heta, iters)
}

/// Smallest eigenvalue of the Riemannian Hessian on the tangent space and a
/// unit tangent eigenvector.
///
/// Small problems assemble `P H P + σ (I - P)` densely with `σ` above the
/// spectrum of `H`; larger ones run Lanczos (50 steps, 3 restarts) from a
/// random tangent start.
pub(crate) fn hessian_min_eig(x: &PointData, rng: &mut linalg::SeededRng) -> (f64, DMatrix<f64>) {
    let (n, p) = x.factor.y().shape();
    let np = n * p;
    if np <= DENSE_HESS_LIMIT {
        let shift = 2.0 * x.s.frobenius_norm() + 1.0;
        let mut h = DMatrix::zeros(np, np);
        for k in 0..np {
            let mut e = DMatrix::zeros(n, p);
            e[(k % n, k / n)] = 1.0;
            let pe = x.project(&e).into_inner();
            let hpe = x.hess(&pe).into_inner();
            let col = hpe + (e - pe) * shift;
            h.set_column(k, &DVector::from_column_slice(col.as_slice()));
        }
        let sym = (&h + h.transpose()) * 0.5;
        let (vals, vecs) = linalg::sym_eigen_sorted(sym);
        let v = DMatrix::from_column_slice(n, p, vecs.column(0).as_slice());
        let v = x.project(&v).into_inner();
        let nrm = v.norm();
        let v = if nrm > 0.0 { v / nrm } else { v };
        return (vals[0].min(shift), v);
    }
    let start = DVector::from_column_slice(linalg::gaussian_matrix(rng, n, p).as_slice());
    let est = lanczos::lanczos_min(
        |v| {
            let m = DMatrix::from_column_slice(n, p, v.as_slice());
            DVector::from_column_slice(x.hess(&m).matrix().as_slice())
        },
        |v| {
            let m = DMatrix::from_column_slice(n, p, v.as_slice());
            let pm = x.project(&m).into_inner();
            v.copy_from_slice(pm.as_slice());
        },
        start,
        50,
        3,
    );
    (est.value, DMatrix::from_column_slice(n, p, est.vector.as_slice()))
}
