//! A-posteriori optimality certificates, facial dimension, non-degeneracy and
//! solution extraction.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{self, Factor, SMatrix};
use crate::lanczos::{self, EigEstimate};
use crate::linalg;
use crate::model::{self, FamilyTag, SdpProblem};
use crate::sym::SymMatrix;

/// Above this size `λ_min(S)` comes from Lanczos instead of a dense solve.
pub const DENSE_EIG_LIMIT: usize = 2000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Verdict {
    /// `‖SY‖ ≤ tol_g` and `λ_min(S) ≥ -tol_h`.
    CertifiedOptimal { tol_g: f64, tol_h: f64 },
    /// Not certified, but the gap bound is within the requested tolerance.
    GapBounded { value: f64 },
    Inconclusive,
}

impl Verdict {
    pub fn is_certified(&self) -> bool {
        matches!(self, Verdict::CertifiedOptimal { .. })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EigMethod {
    Dense,
    Lanczos,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualCertificate {
    pub mu: Vec<f64>,
    pub s: SymMatrix,
    /// `‖S Y‖_F`.
    pub sy_norm: f64,
    /// `‖S‖_F`.
    pub s_norm: f64,
    /// Estimate of `λ_min(S)`.
    pub lambda_min_s: f64,
    /// Pessimistic value used for verdicts: the estimate minus its residual
    /// for Lanczos, the eigenvalue itself for the dense solver.
    pub lambda_min_lower: f64,
    pub lambda_method: EigMethod,
    /// `ε_g = 2 ‖SY‖`, the gradient norm.
    pub eps_g: f64,
    /// `ε_H = 2 max(0, -λ_min(S))`.
    pub eps_h: f64,
    /// Bound on twice the optimality gap, `2 (g(Y) - f*) ≤ ε_H R + ε_g √R`;
    /// the `√R` term is dropped when the identity is in the range of `A*`.
    /// `None` when `R` is unknown.
    pub gap_bound: Option<f64>,
    pub cost: f64,
    pub tol_g: f64,
    pub tol_h: f64,
    pub verdict: Verdict,
}

impl DualCertificate {
    /// Verdict under other tolerances.
    pub fn verdict_for(&self, tol_g: f64, tol_h: f64, gap_tol: Option<f64>) -> Verdict {
        if self.sy_norm <= tol_g && self.lambda_min_lower >= -tol_h {
            Verdict::CertifiedOptimal { tol_g, tol_h }
        } else {
            match (gap_tol, self.gap_bound) {
                (Some(t), Some(gap)) if gap <= t => Verdict::GapBounded { value: gap },
                _ => Verdict::Inconclusive,
            }
        }
    }

    /// Replaces tolerances and verdict.
    pub fn retolerance(&mut self, tol_g: f64, tol_h: f64, gap_tol: Option<f64>) {
        self.tol_g = tol_g;
        self.tol_h = tol_h;
        self.verdict = self.verdict_for(tol_g, tol_h, gap_tol);
    }
}

/// Smallest eigenpair of `S`: dense for `n ≤ 2000`, otherwise Lanczos with a
/// residual error bar. Returns the estimate and the lower value.
pub fn s_min_eig(s: &SMatrix) -> (EigEstimate, EigMethod) {
    let n = s.dense().nrows();
    if n <= DENSE_EIG_LIMIT {
        let (value, vector) = linalg::sym_min_eig(s.dense());
        (
            EigEstimate {
                value,
                vector,
                residual: 0.0,
            },
            EigMethod::Dense,
        )
    } else {
        let mut rng = linalg::rng_from_seed(0x5eed);
        let start = linalg::gaussian_vector(&mut rng, n);
        let est = lanczos::lanczos_min(|v| s.dense() * v, |_| {}, start, 100, 5);
        (est, EigMethod::Lanczos)
    }
}

pub fn certify(problem: &SdpProblem, factor: &Factor, tol_g: f64, tol_h: f64) -> DualCertificate {
    certify_with_gap(problem, factor, tol_g, tol_h, None)
}

/// [`certify`] that may return [`Verdict::GapBounded`] when the gap bound is at most `gap_tol`.
pub fn certify_with_gap(
    problem: &SdpProblem,
    factor: &Factor,
    tol_g: f64,
    tol_h: f64,
    gap_tol: Option<f64>,
) -> DualCertificate {
    let gram = geometry::gram(problem, factor);
    let s = geometry::s_matrix(problem, factor, &gram);
    let sy_norm = (s.dense() * factor.y()).norm();
    let (est, method) = s_min_eig(&s);
    let lower = est.lower();
    let eps_g = 2.0 * sy_norm;
    let eps_h = 2.0 * (-lower).max(0.0);
    let gap_bound = problem.trace_bound().map(|r| {
        if problem.identity_in_range() == Some(true) {
            eps_h * r
        } else {
            eps_h * r + eps_g * r.sqrt()
        }
    });
    let mut cert = DualCertificate {
        mu: s.mu().iter().copied().collect(),
        s_norm: s.frobenius_norm(),
        s: s.matrix().clone(),
        sy_norm,
        lambda_min_s: est.value,
        lambda_min_lower: lower,
        lambda_method: method,
        eps_g,
        eps_h,
        gap_bound,
        cost: problem.cost(factor.y()),
        tol_g,
        tol_h,
        verdict: Verdict::Inconclusive,
    };
    cert.verdict = cert.verdict_for(tol_g, tol_h, gap_tol);
    cert
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FaceReport {
    /// Numerical rank of `Y` (after trimming).
    pub p: usize,
    /// Columns of the factor as given.
    pub columns: usize,
    pub trimmed: bool,
    /// `dim ker L_X`.
    pub dim_face: usize,
    pub m_prime: usize,
    /// `p(p+1)/2 - m'`.
    pub delta: i64,
    /// `⌊(dim_face - delta)/p⌋`, the most negative eigenvalues `S` can have at
    /// a second-order critical point of full rank. `None` after trimming.
    pub neg_eig_cap: Option<usize>,
    /// `dim_face < delta + p`.
    pub deterministic_optimal: bool,
}

/// Relative threshold on singular values used to trim `Y` to its numerical rank.
pub const FACE_RANK_TOLERANCE: f64 = 1e-8;

pub fn face_dimension(problem: &SdpProblem, factor: &Factor) -> Result<FaceReport> {
    face_dimension_with(problem, factor, true)
}

/// Dimension of the face of the feasible set containing `X = YYᵀ` in its
/// relative interior, from the rank of `L_X(A) = A(Y A Yᵀ)` on symmetric
/// `p × p` matrices.
pub fn face_dimension_with(problem: &SdpProblem, factor: &Factor, allow_trim: bool) -> Result<FaceReport> {
    let columns = factor.p();
    let (trimmed_y, rank) = trim_to_rank(factor.y(), FACE_RANK_TOLERANCE);
    if rank < columns && !allow_trim {
        return Err(Error::RankDeficient { rank, p: columns });
    }
    let p = rank;
    let sym_dim = p * (p + 1) / 2;
    if p == 0 {
        return Err(Error::RankDeficient { rank: 0, p: columns });
    }
    let tf = Factor::unchecked(problem, trimmed_y.clone())?;
    let m = problem.m();
    let mut lx = DMatrix::zeros(m, sym_dim);
    let sqrt2 = std::f64::consts::SQRT_2;
    for i in 0..m {
        let ay = tf.ay(i).to_dense(problem.n());
        let small = trimmed_y.tr_mul(&ay);
        let mut col = 0;
        for a in 0..p {
            for b in a..p {
                lx[(i, col)] = if a == b {
                    small[(a, a)]
                } else {
                    sqrt2 * 0.5 * (small[(a, b)] + small[(b, a)])
                };
                col += 1;
            }
        }
    }
    let sv = lx.svd(false, false).singular_values;
    let r = linalg::numerical_rank(sv.as_slice(), m.max(sym_dim), None);
    let dim_face = sym_dim - r;
    let m_prime = geometry::gram(problem, &tf).m_prime();
    let delta = sym_dim as i64 - m_prime as i64;
    let trimmed = rank < columns;
    let neg_eig_cap = (!trimmed).then(|| ((dim_face as i64 - delta).max(0) / p as i64) as usize);
    Ok(FaceReport {
        p,
        columns,
        trimmed,
        dim_face,
        m_prime,
        delta,
        neg_eig_cap,
        deterministic_optimal: (dim_face as i64) < delta + p as i64,
    })
}

/// `Y V_r`, where `V_r` holds the right singular vectors whose singular
/// values exceed `rel · σ_max`. This equals `U_r Σ_r` but does not depend on
/// the accuracy of left singular vectors.
fn trim_to_rank(y: &DMatrix<f64>, rel: f64) -> (DMatrix<f64>, usize) {
    let sv = y.clone().svd(false, false).singular_values;
    let top = sv.amax();
    let rank = if top > 0.0 { sv.iter().filter(|&&s| s > rel * top).count() } else { 0 };
    let (_, vecs) = right_singular_basis(y);
    (y * vecs.columns(0, rank), rank)
}

/// Eigenvalues of `YᵀY` in decreasing order with matching eigenvectors.
fn right_singular_basis(y: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let (vals, vecs) = linalg::sym_eigen_sorted(y.tr_mul(y));
    let p = vals.len();
    let vals = DVector::from_fn(p, |k, _| vals[p - 1 - k].max(0.0));
    let vecs = DMatrix::from_fn(p, p, |i, k| vecs[(i, p - 1 - k)]);
    (vals, vecs)
}

/// `true` iff `{A_i Y}` are linearly independent, which for independent
/// `A_i` is primal non-degeneracy of `X = YYᵀ`. Dependent `A_i` are an error.
pub fn check_nondegeneracy(problem: &SdpProblem, factor: &Factor) -> Result<bool> {
    if let Some(combination) = problem.dependent_combination() {
        return Err(Error::DependentConstraints { combination });
    }
    Ok(model::constraint_rank(problem, factor.y(), None) == problem.m())
}

/// Singular values below this fraction of the largest are dropped before
/// TRS extraction; the cost changes by the square of what is dropped.
pub const TRS_RANK_TOLERANCE: f64 = 1e-6;

/// Recovers a TRS solution `x` (unit norm) from a factor of the lifted problem.
///
/// For rank one, `x = Y₁ z` with `y₂ᵀz = 1`. For rank two, `z` ranges over the
/// line `y₂ᵀz = 1` and must also satisfy `‖Y₁z‖² = 1`; among the two
/// intersections the one with lower TRS cost wins, ties going to the
/// lexicographically larger `x`.
pub fn extract_trs(problem: &SdpProblem, factor: &Factor) -> Result<DVector<f64>> {
    if problem.family() != Some(&FamilyTag::Trs) {
        return Err(Error::Extraction("problem is not a TRS lifting".into()));
    }
    let n = problem.n() - 1;
    let (y, r) = trim_to_rank(factor.y(), TRS_RANK_TOLERANCE);
    let y1 = y.rows(0, n).into_owned();
    let y2 = y.row(n).transpose();
    let y2n = y2.norm_squared();
    if y2n <= 1e-12 {
        return Err(Error::Extraction("last row of Y vanishes; factor is infeasible".into()));
    }
    match r {
        1 => {
            let x = y1.column(0) / y2[0];
            let nrm = x.norm();
            Ok(x / nrm)
        }
        2 => {
            let z0 = &y2 / y2n;
            let w = DVector::from_vec(vec![-y2[1], y2[0]]) / y2n.sqrt();
            let a0 = &y1 * &z0;
            let aw = &y1 * &w;
            let qa = aw.norm_squared();
            let qb = 2.0 * a0.dot(&aw);
            let qc = a0.norm_squared() - 1.0;
            let mut disc = qb * qb - 4.0 * qa * qc;
            let scale = qb * qb + (4.0 * qa * qc).abs();
            if disc < 0.0 {
                if disc >= -1e-8 * scale.max(1e-300) {
                    disc = 0.0;
                } else {
                    return Err(Error::Extraction(format!(
                        "no real intersection (discriminant {disc:.3e})"
                    )));
                }
            }
            if qa <= 1e-14 {
                return Err(Error::Extraction("degenerate ellipse".into()));
            }
            let sq = disc.sqrt();
            let roots = [(-qb - sq) / (2.0 * qa), (-qb + sq) / (2.0 * qa)];
            let candidates: Vec<DVector<f64>> = roots.iter().map(|t| &a0 + &aw * *t).collect();
            let costs: Vec<f64> = candidates.iter().map(|x| trs_cost(problem, x)).collect();
            let tie = 1e-12 * (1.0 + costs[0].abs().max(costs[1].abs()));
            let pick = if (costs[0] - costs[1]).abs() <= tie {
                if lex_greater(&candidates[1], &candidates[0]) {
                    1
                } else {
                    0
                }
            } else if costs[1] < costs[0] {
                1
            } else {
                0
            };
            Ok(candidates[pick].clone())
        }
        _ => Err(Error::Extraction(format!(
            "factor has rank {r}; TRS extraction needs rank at most 2"
        ))),
    }
}

fn lex_greater(a: &DVector<f64>, b: &DVector<f64>) -> bool {
    for (x, y) in a.iter().zip(b.iter()) {
        if x != y {
            return x > y;
        }
    }
    false
}

/// `xᵀAx + 2bᵀx + c` read off the lifted cost matrix.
pub fn trs_cost(problem: &SdpProblem, x: &DVector<f64>) -> f64 {
    let n = x.len();
    let lifted = DVector::from_iterator(n + 1, x.iter().copied().chain(std::iter::once(1.0)));
    lifted.dot(&(problem.cost_dense() * &lifted))
}

/// Dominant left singular vector scaled by its singular value, with the
/// relative residual `‖YYᵀ - xxᵀ‖_F / ‖YYᵀ‖_F`. The sign makes the entry of
/// largest magnitude positive.
pub fn extract_rank_one(factor: &Factor) -> (DVector<f64>, f64) {
    let (vals, vecs) = right_singular_basis(factor.y());
    let mut x = factor.y() * vecs.column(0);
    let big = x.iamax();
    if x[big] < 0.0 {
        x = -x;
    }
    let total: f64 = vals.iter().map(|v| v * v).sum();
    let rest = vals.iter().skip(1).fold(0.0, |acc, v| acc + v * v);
    let residual = if total > 0.0 { (rest / total).sqrt() } else { 0.0 };
    (x, residual)
}
