use std::time::Instant;

use nalgebra::DMatrix;

use crate::certify::{self, face_dimension, DualCertificate};
use crate::error::{Error, Result};
use crate::geometry::{self, Factor, SMatrix, TangentVector};
use crate::linalg;
use crate::model::{pataki_bound, FamilyTag, SdpProblem};

use super::rtr::{cost_decrease, rtr, Escalation, EscapeStep, PSchedule, SolveReport, SolverOptions, RANK_TOLERANCE};

/// `[Y | 0]`: same `YYᵀ`, one more column.
pub fn escalate(factor: &Factor, problem: &SdpProblem) -> Result<Factor> {
    pad_to(factor, problem, factor.p() + 1)
}

fn pad_to(factor: &Factor, problem: &SdpProblem, p: usize) -> Result<Factor> {
    let mut y = DMatrix::zeros(factor.n(), p);
    let keep = factor.p().min(p);
    y.columns_mut(0, keep).copy_from(&factor.y().columns(0, keep));
    Factor::unchecked(problem, y)
}

/// Direction `x zᵀ` with `Yz = 0` and `x` a unit eigenvector of `λ_min(S)`,
/// along which `<V, Hess g(Y)[V]> = 2 λ_min(S)`.
///
/// Returns `None` unless `Y` is column-rank deficient
/// (`σ_min ≤ 1e-8 σ_max`) and `λ_min(S) < -eps_h / 2`.
pub fn escape_direction(factor: &Factor, s: &SMatrix, eps_h: f64) -> Option<TangentVector> {
    let (n, p) = factor.y().shape();
    let cols_gram = factor.y().tr_mul(factor.y());
    let (vals, vecs) = linalg::sym_eigen_sorted(cols_gram);
    let top = vals[p - 1].max(0.0);
    // eigenvalues of YᵀY are squared singular values
    let deficient = p > n || vals[0].max(0.0) <= RANK_TOLERANCE * RANK_TOLERANCE * top;
    if !deficient {
        return None;
    }
    let (est, _) = certify::s_min_eig(s);
    if est.value >= -eps_h / 2.0 {
        return None;
    }
    let z = vecs.column(0);
    let v = &est.vector * z.transpose();
    Some(TangentVector::trusted(v))
}

/// Backtracking along an escape direction until the decrease is at least
/// `0.5 |λ| t²`, starting from `t = ‖Y‖_F`.
pub fn escape_step(
    problem: &SdpProblem,
    factor: &Factor,
    direction: &TangentVector,
    lambda_min_s: f64,
) -> Result<Option<(Factor, EscapeStep)>> {
    let gram = geometry::gram(problem, factor);
    let v = geometry::project_tangent(factor, &gram, direction.matrix());
    let nrm = v.norm();
    if nrm == 0.0 || lambda_min_s >= 0.0 {
        return Ok(None);
    }
    let v = v.into_inner() / nrm;
    let mut t = factor.y().norm().max(1.0);
    for backtracks in 0..60 {
        let step = TangentVector::trusted(&v * t);
        if let Ok(next) = geometry::retract(problem, factor, &step) {
            if next.is_feasible(problem) {
                let decrease = cost_decrease(problem, factor.y(), next.y());
                if decrease >= 0.5 * lambda_min_s.abs() * t * t {
                    return Ok(Some((
                        next,
                        EscapeStep {
                            step: t,
                            decrease,
                            lambda_min_s,
                            backtracks,
                        },
                    )));
                }
            }
        }
        t *= 0.5;
    }
    Ok(None)
}

/// First rank of the automatic schedule: one above the Pataki bound, so that
/// `p(p+1)/2 > m'`, capped at `n + 1`. Orthogonal-Cut additionally needs `p ≥ d`.
pub fn auto_start_rank(problem: &SdpProblem) -> usize {
    let m_prime = problem.constraint_span_rank().max(1);
    let mut p = (pataki_bound(m_prime) + 1).min(problem.n() + 1);
    if let Some(FamilyTag::OrthoCut { d }) = problem.family() {
        p = p.max(*d);
    }
    p
}

fn first_rank(problem: &SdpProblem, opts: &SolverOptions) -> usize {
    match &opts.p_schedule {
        PSchedule::Auto => auto_start_rank(problem),
        PSchedule::Ranks(r) => r[0],
    }
}

fn next_rank(problem: &SdpProblem, opts: &SolverOptions, p: usize) -> Option<usize> {
    let cap = problem.n() + 1;
    match &opts.p_schedule {
        PSchedule::Auto => (p < cap).then_some(p + 1),
        PSchedule::Ranks(r) => r.iter().copied().find(|&q| q > p),
    }
}

/// Rank staircase from a random feasible start at the first scheduled rank.
pub fn staircase(problem: &SdpProblem, opts: &SolverOptions) -> Result<(Factor, SolveReport)> {
    opts.validate()?;
    let p0 = first_rank(problem, opts);
    let mut rng = linalg::rng_from_seed(opts.seed);
    let y0 = problem.feasible_point(p0, &mut rng)?;
    staircase_from(problem, Factor::new(problem, y0)?, opts)
}

/// Rank staircase from a given feasible factor: solve, certify, and if `S`
/// has an eigenvalue below `-eps_h/2` append a zero column, step along the
/// escape direction and solve again. Stops once certified, when the schedule
/// is exhausted, or at `p = n + 1`.
pub fn staircase_from(problem: &SdpProblem, y0: Factor, opts: &SolverOptions) -> Result<(Factor, SolveReport)> {
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
    let mut escalations = Vec::new();
    let mut outer = 0;
    let mut tcg = 0;
    let mut cost_trace = Vec::new();
    let mut current = y0;
    loop {
        let (y, mut report) = rtr(problem, current, opts)?;
        outer += report.outer_iters;
        tcg += report.tcg_iters_total;
        cost_trace.append(&mut report.cost_trace);
        let cert = stage_certificate(problem, &y, eps_g, eps_h);
        let certified = cert.verdict.is_certified();
        let next = if certified { None } else { next_rank(problem, opts, y.p()) };
        let Some(p_next) = next else {
            report.outer_iters = outer;
            report.tcg_iters_total = tcg;
            report.escalations = escalations;
            report.face = face_dimension(problem, &y).ok();
            report.certificate = Some(cert);
            report.wall_time = start.elapsed().as_secs_f64();
            report.cost_trace = cost_trace;
            return Ok((y, report));
        };
        let padded = pad_to(&y, problem, p_next)?;
        let gram = geometry::gram(problem, &padded);
        let s = geometry::s_matrix(problem, &padded, &gram);
        let mut escape = None;
        current = padded.clone();
        if let Some(dir) = escape_direction(&padded, &s, eps_h) {
            if let Some((moved, step)) = escape_step(problem, &padded, &dir, cert.lambda_min_s)? {
                current = moved;
                escape = Some(step);
            }
        }
        escalations.push(Escalation {
            p: p_next,
            reason: format!(
                "λ_min(S) = {:.3e} below -{:.3e} at p = {}",
                cert.lambda_min_lower,
                cert.tol_h,
                y.p()
            ),
            lambda_min_s: cert.lambda_min_s,
            escape,
        });
    }
}

/// Certificate with the staircase tolerances `‖SY‖ ≤ eps_g` and
/// `λ_min(S) ≥ -eps_h/2 - 10 ε_mach ‖S‖_F`.
pub fn stage_certificate(problem: &SdpProblem, y: &Factor, eps_g: f64, eps_h: f64) -> DualCertificate {
    let mut cert = certify::certify(problem, y, eps_g, eps_h / 2.0);
    let tol_h = eps_h / 2.0 + 10.0 * f64::EPSILON * cert.s_norm;
    cert.retolerance(eps_g, tol_h, None);
    cert
}
