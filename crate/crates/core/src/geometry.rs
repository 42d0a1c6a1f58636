//! Riemannian geometry of `M_p = {Y ∈ R^{n×p} : A(YYᵀ) = b}`.
//!
//! Everything is expressed through the products `A_i Y`, cached on [`Factor`].
//! The normal space at `Y` is spanned by those products, so the tangent
//! projector, the multiplier `μ` and hence `S` all come from one Gram system.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{self, PsdPinv};
use crate::model::{FamilyTag, SdpProblem};
use crate::sym::{RowBlock, SymMatrix};

/// A point `Y` together with its constraint products.
#[derive(Clone, Debug)]
pub struct Factor {
    y: DMatrix<f64>,
    ay: Vec<RowBlock>,
    residual: f64,
}

impl Factor {
    /// Wraps `y`, rejecting it when `‖A(YYᵀ) - b‖_∞` exceeds the problem's
    /// feasibility tolerance.
    pub fn new(problem: &SdpProblem, y: DMatrix<f64>) -> Result<Self> {
        let f = Self::unchecked(problem, y)?;
        let tolerance = problem.feasibility_tolerance();
        if f.residual > tolerance {
            return Err(Error::Infeasible {
                residual: f.residual,
                tolerance,
            });
        }
        Ok(f)
    }

    /// Wraps `y` without the feasibility check (dimensions are still checked).
    pub fn unchecked(problem: &SdpProblem, y: DMatrix<f64>) -> Result<Self> {
        if y.nrows() != problem.n() {
            return Err(Error::DimensionMismatch {
                what: "factor rows",
                expected: problem.n(),
                got: y.nrows(),
            });
        }
        if y.ncols() == 0 {
            return Err(Error::InvalidProblem("factor needs at least one column".into()));
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidProblem("factor has non-finite entries".into()));
        }
        let ay: Vec<RowBlock> = problem
            .constraints()
            .iter()
            .enumerate()
            .map(|(i, a)| a.mul_rows(&y, problem.support(i)))
            .collect();
        let residual = ay
            .iter()
            .zip(problem.rhs().iter())
            .map(|(blk, bi)| (blk.dot(&y) - bi).abs())
            .fold(0.0, f64::max);
        Ok(Self { y, ay, residual })
    }

    pub fn y(&self) -> &DMatrix<f64> {
        &self.y
    }
    pub fn into_inner(self) -> DMatrix<f64> {
        self.y
    }
    pub fn n(&self) -> usize {
        self.y.nrows()
    }
    pub fn p(&self) -> usize {
        self.y.ncols()
    }
    /// `A_i Y`.
    pub fn ay(&self, i: usize) -> &RowBlock {
        &self.ay[i]
    }
    /// `‖A(YYᵀ) - b‖_∞`.
    pub fn residual(&self) -> f64 {
        self.residual
    }
    pub fn is_feasible(&self, problem: &SdpProblem) -> bool {
        self.residual <= problem.feasibility_tolerance()
    }
    /// Frobenius norm of the largest `A_i Y`.
    pub fn max_ay_norm(&self) -> f64 {
        self.ay.iter().map(|b| b.norm_squared()).fold(0.0, f64::max).sqrt()
    }
    /// `A(ZYᵀ)`, i.e. the vector of `<A_i Y, Z>`.
    pub fn normal_coords(&self, z: &DMatrix<f64>) -> DVector<f64> {
        DVector::from_iterator(self.ay.len(), self.ay.iter().map(|b| b.dot(z)))
    }
    /// `A*(λ) Y = Σ λ_i A_i Y`.
    pub fn normal_combination(&self, lambda: &DVector<f64>) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.n(), self.p());
        for (blk, &l) in self.ay.iter().zip(lambda.iter()) {
            blk.add_to(l, &mut out);
        }
        out
    }
    /// Numerical column rank of `Y` with relative threshold `rel`.
    pub fn rank(&self, rel: f64) -> usize {
        let sv = self.y.clone().svd(false, false).singular_values;
        let top = sv.amax();
        if top == 0.0 {
            return 0;
        }
        sv.iter().filter(|s| **s > rel * top).count()
    }
}

/// The Gram matrix `G_ij = <A_i Y, A_j Y>` stored block by block, with its
/// pseudo-inverse.
#[derive(Clone, Debug)]
pub struct GramSystem {
    m: usize,
    blocks: Vec<(Vec<usize>, DMatrix<f64>, PsdPinv)>,
    m_prime: usize,
    cutoff: f64,
}

impl GramSystem {
    pub fn m_prime(&self) -> usize {
        self.m_prime
    }
    /// Absolute eigenvalue cutoff used for `G†`.
    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }
    /// Dense `m × m` Gram matrix.
    pub fn matrix(&self) -> DMatrix<f64> {
        let mut g = DMatrix::zeros(self.m, self.m);
        for (idx, blk, _) in &self.blocks {
            for (a, &i) in idx.iter().enumerate() {
                for (b, &j) in idx.iter().enumerate() {
                    g[(i, j)] = blk[(a, b)];
                }
            }
        }
        g
    }
    /// `G† v`.
    pub fn apply_pinv(&self, v: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(self.m);
        for (idx, _, pinv) in &self.blocks {
            let local = DVector::from_iterator(idx.len(), idx.iter().map(|&i| v[i]));
            let sol = pinv.apply(&local);
            for (a, &i) in idx.iter().enumerate() {
                out[i] = sol[a];
            }
        }
        out
    }
    /// Eigenvalues of `G`, ascending within each block.
    pub fn eigenvalues(&self) -> Vec<f64> {
        self.blocks
            .iter()
            .flat_map(|(_, _, p)| p.eigenvalues.iter().copied())
            .collect()
    }
}

pub fn gram(problem: &SdpProblem, factor: &Factor) -> GramSystem {
    let mut eigs = Vec::with_capacity(problem.blocks().len());
    let mut top = 0.0_f64;
    for idx in problem.blocks() {
        let k = idx.len();
        let mut g = DMatrix::zeros(k, k);
        for a in 0..k {
            for b in 0..=a {
                let v = factor.ay(idx[a]).dot_block(factor.ay(idx[b]));
                g[(a, b)] = v;
                g[(b, a)] = v;
            }
        }
        let (vals, vecs) = linalg::sym_eigen_sorted(g.clone());
        top = top.max(vals.max());
        eigs.push((g, vals, vecs));
    }
    // The Gram matrix squares singular values, so the cutoff applies to its
    // eigenvalues directly, relative to the largest one.
    let max_dim = (factor.n() * factor.p()).max(problem.m());
    let cutoff = if top > 0.0 { linalg::rank_cutoff(max_dim, top) } else { 0.0 };
    let mut m_prime = 0;
    let mut blocks = Vec::with_capacity(eigs.len());
    for (idx, (g, vals, vecs)) in problem.blocks().iter().zip(eigs) {
        let pinv = PsdPinv::from_eigen(vals, vecs, cutoff);
        m_prime += pinv.rank();
        blocks.push((idx.clone(), g, pinv));
    }
    GramSystem {
        m: problem.m(),
        blocks,
        m_prime,
        cutoff,
    }
}

/// Tangent vector at a specific factor.
#[derive(Clone, Debug, PartialEq)]
pub struct TangentVector {
    v: DMatrix<f64>,
}

impl TangentVector {
    /// Accepts `v` as tangent at `factor` if `max_i |<A_i Y, V>|` is within
    /// `1e-10 ‖V‖ max_i ‖A_i Y‖`.
    pub fn new(factor: &Factor, v: DMatrix<f64>) -> Result<Self> {
        let residual = tangency_residual(factor, &v);
        let tolerance = tangency_tolerance(factor, &v);
        if residual > tolerance {
            return Err(Error::NotTangent { residual, tolerance });
        }
        Ok(Self { v })
    }

    pub(crate) fn trusted(v: DMatrix<f64>) -> Self {
        Self { v }
    }

    pub fn zeros(factor: &Factor) -> Self {
        Self {
            v: DMatrix::zeros(factor.n(), factor.p()),
        }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.v
    }
    pub fn into_inner(self) -> DMatrix<f64> {
        self.v
    }
    pub fn norm(&self) -> f64 {
        self.v.norm()
    }
    pub fn inner(&self, other: &TangentVector) -> f64 {
        self.v.dot(&other.v)
    }
}

/// `max_i |<A_i Y, V>|`.
pub fn tangency_residual(factor: &Factor, v: &DMatrix<f64>) -> f64 {
    factor.normal_coords(v).amax()
}

pub fn tangency_tolerance(factor: &Factor, v: &DMatrix<f64>) -> f64 {
    1e-10 * v.norm() * factor.max_ay_norm()
}

/// Orthogonal projection onto the tangent space:
/// `Z - A*(G† A(ZYᵀ)) Y`.
pub fn project_tangent(factor: &Factor, gram: &GramSystem, z: &DMatrix<f64>) -> TangentVector {
    let coeffs = gram.apply_pinv(&factor.normal_coords(z));
    TangentVector {
        v: z - factor.normal_combination(&coeffs),
    }
}

/// `S = C - A*(μ)` with `μ = G† A(CYYᵀ)`.
#[derive(Clone, Debug)]
pub struct SMatrix {
    s: SymMatrix,
    dense: DMatrix<f64>,
    mu: DVector<f64>,
}

impl SMatrix {
    pub fn matrix(&self) -> &SymMatrix {
        &self.s
    }
    pub fn dense(&self) -> &DMatrix<f64> {
        &self.dense
    }
    pub fn mu(&self) -> &DVector<f64> {
        &self.mu
    }
    pub fn frobenius_norm(&self) -> f64 {
        self.dense.norm()
    }
}

pub fn s_matrix(problem: &SdpProblem, factor: &Factor, gram: &GramSystem) -> SMatrix {
    let cy = problem.cost_dense() * factor.y();
    let mu = gram.apply_pinv(&factor.normal_coords(&cy));
    let dense = problem.cost_dense() - problem.adjoint_dense(&mu);
    let s = SymMatrix::from_lower(&dense).expect("finite S");
    let dense = s.to_dense();
    SMatrix { s, dense, mu }
}

/// `grad g(Y) = 2 S Y`.
pub fn riemannian_gradient(factor: &Factor, s: &SMatrix) -> TangentVector {
    TangentVector {
        v: (s.dense() * factor.y()) * 2.0,
    }
}

/// `Hess g(Y)[V] = 2 Proj_Y(S V)`.
///
/// A direction that misses the tangency tolerance by at most a factor of ten
/// is projected first; anything further off is rejected.
pub fn hessian_vec(factor: &Factor, s: &SMatrix, v: &TangentVector, gram: &GramSystem) -> Result<TangentVector> {
    let residual = tangency_residual(factor, &v.v);
    let tolerance = tangency_tolerance(factor, &v.v);
    if residual > 10.0 * tolerance {
        return Err(Error::NotTangent { residual, tolerance });
    }
    if residual > tolerance {
        let fixed = project_tangent(factor, gram, &v.v);
        return Ok(hess_apply(factor, s, gram, &fixed.v));
    }
    Ok(hess_apply(factor, s, gram, &v.v))
}

pub(crate) fn hess_apply(factor: &Factor, s: &SMatrix, gram: &GramSystem, v: &DMatrix<f64>) -> TangentVector {
    let sv = s.dense() * v * 2.0;
    project_tangent(factor, gram, &sv)
}

/// Maps `Y + V` back onto the manifold.
///
/// Sphere-type constraints renormalize blocks, Orthogonal-Cut takes the polar
/// factor of every `d × p` slice, and generalized eigenproblems correct along
/// the normal direction `B(Y+V)` in closed form. Other problems run Newton's
/// method on `λ` in `A((W + A*(λ)W)(W + A*(λ)W)ᵀ) = b` with `W = Y + V`.
pub fn retract(problem: &SdpProblem, factor: &Factor, v: &TangentVector) -> Result<Factor> {
    if v.v.shape() != factor.y.shape() {
        return Err(Error::DimensionMismatch {
            what: "tangent vector shape",
            expected: factor.n() * factor.p(),
            got: v.v.nrows() * v.v.ncols(),
        });
    }
    let w = &factor.y + &v.v;
    let y = match problem.family() {
        Some(FamilyTag::Trs) | Some(FamilyTag::Spheres { .. }) => normalize_blocks(problem, w)?,
        Some(FamilyTag::OrthoCut { d }) => polar_slices(w, *d)?,
        Some(FamilyTag::GenEig) => geneig_correct(problem, w)?,
        None => newton_correct(problem, w)?,
    };
    Factor::unchecked(problem, y)
}

fn normalize_blocks(problem: &SdpProblem, mut w: DMatrix<f64>) -> Result<DMatrix<f64>> {
    let p = w.ncols();
    for i in 0..problem.m() {
        let rows = problem.support(i);
        let norm = rows.iter().map(|&r| w.row(r).norm_squared()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::RetractionFailed {
                iterations: 0,
                residual: problem.rhs()[i],
            });
        }
        let scale = problem.rhs()[i].sqrt() / norm;
        for &r in rows {
            for k in 0..p {
                w[(r, k)] *= scale;
            }
        }
    }
    Ok(w)
}

fn polar_slices(mut w: DMatrix<f64>, d: usize) -> Result<DMatrix<f64>> {
    let p = w.ncols();
    for start in (0..w.nrows()).step_by(d) {
        let slice = w.view((start, 0), (d, p)).into_owned();
        let sv = slice.clone().svd(false, false).singular_values;
        if sv.min() <= f64::EPSILON * sv.max().max(1.0) {
            return Err(Error::RetractionFailed {
                iterations: 0,
                residual: sv.min(),
            });
        }
        let q = if d == 1 {
            &slice / slice.norm()
        } else {
            linalg::polar_factor_rows(&slice)
        };
        w.view_mut((start, 0), (d, p)).copy_from(&q);
    }
    Ok(w)
}

/// Finds the smallest `|λ|` with `<W + λBW, B(W + λBW)> = 1`; falls back to
/// radial scaling when no real root exists.
fn geneig_correct(problem: &SdpProblem, w: DMatrix<f64>) -> Result<DMatrix<f64>> {
    let b = &problem.constraints()[0];
    let bw = b.mul(&w);
    let bbw = b.mul(&bw);
    let q0 = w.dot(&bw) - problem.rhs()[0];
    let q1 = 2.0 * bw.dot(&bw);
    let q2 = bw.dot(&bbw);
    let disc = q1 * q1 - 4.0 * q2 * q0;
    if disc >= 0.0 && q2 > 0.0 {
        // numerically stable smaller root
        let sq = disc.sqrt();
        let big = -0.5 * (q1 + sq);
        let lambda = if big != 0.0 { q0 / big } else { 0.0 };
        let out = &w + &bw * lambda;
        if out.iter().all(|v| v.is_finite()) {
            return Ok(out);
        }
    }
    let nrm = w.dot(&bw);
    if nrm.is_nan() || nrm <= 0.0 {
        return Err(Error::RetractionFailed {
            iterations: 0,
            residual: q0.abs(),
        });
    }
    Ok(w * (problem.rhs()[0] / nrm).sqrt())
}

const NEWTON_MAX_ITERS: usize = 20;

/// Newton on `λ` for `A((W + A*(λ)W)(W + A*(λ)W)ᵀ) = b`. Iterates towards
/// rounding level so that small steps still get their second-order
/// correction, and accepts anything within the feasibility tolerance.
fn newton_correct(problem: &SdpProblem, w: DMatrix<f64>) -> Result<DMatrix<f64>> {
    let m = problem.m();
    let tol = problem.feasibility_tolerance();
    let b_scale = problem.rhs().amax().max(1.0);
    let aw: Vec<RowBlock> = problem
        .constraints()
        .iter()
        .enumerate()
        .map(|(i, a)| a.mul_rows(&w, problem.support(i)))
        .collect();
    let tight = 16.0 * f64::EPSILON * b_scale.max(aw.iter().map(|blk| blk.dot(&w).abs()).fold(0.0, f64::max));
    let mut lambda = DVector::zeros(m);
    let mut current = w.clone();
    let mut best: Option<(f64, DMatrix<f64>)> = None;
    for iter in 0..=NEWTON_MAX_ITERS {
        let am: Vec<RowBlock> = problem
            .constraints()
            .iter()
            .enumerate()
            .map(|(i, a)| a.mul_rows(&current, problem.support(i)))
            .collect();
        let f = DVector::from_iterator(m, am.iter().zip(problem.rhs().iter()).map(|(blk, bi)| blk.dot(&current) - bi));
        let residual = f.amax();
        if !residual.is_finite() {
            break;
        }
        if best.as_ref().is_none_or(|(r, _)| residual < *r) {
            best = Some((residual, current.clone()));
        } else if residual <= tol {
            // no further progress at rounding level
            break;
        }
        if residual <= tight || iter == NEWTON_MAX_ITERS {
            break;
        }
        let mut jac = DMatrix::zeros(m, m);
        for i in 0..m {
            for j in 0..m {
                jac[(i, j)] = 2.0 * am[i].dot_block(&aw[j]);
            }
        }
        let svd = jac.svd(true, true);
        let cut = linalg::rank_cutoff(m, svd.singular_values.amax());
        let step = match svd.solve(&(-f), cut) {
            Ok(s) => s,
            Err(_) => break,
        };
        lambda += step;
        current = w.clone();
        for (blk, &l) in aw.iter().zip(lambda.iter()) {
            blk.add_to(l, &mut current);
        }
    }
    match best {
        Some((r, y)) if r <= tol => Ok(y),
        other => Err(Error::RetractionFailed {
            iterations: NEWTON_MAX_ITERS,
            residual: other.map_or(f64::INFINITY, |(r, _)| r),
        }),
    }
}

/// Bundle of the quantities needed at one iterate.
#[derive(Clone, Debug)]
pub struct PointData {
    pub factor: Factor,
    pub gram: GramSystem,
    pub s: SMatrix,
    pub grad: TangentVector,
    pub cost: f64,
}

impl PointData {
    pub fn new(problem: &SdpProblem, factor: Factor) -> Self {
        let gram = gram(problem, &factor);
        let s = s_matrix(problem, &factor, &gram);
        let grad = riemannian_gradient(&factor, &s);
        let cost = problem.cost(factor.y());
        Self {
            factor,
            gram,
            s,
            grad,
            cost,
        }
    }

    pub fn project(&self, z: &DMatrix<f64>) -> TangentVector {
        project_tangent(&self.factor, &self.gram, z)
    }

    pub fn hess(&self, v: &DMatrix<f64>) -> TangentVector {
        hess_apply(&self.factor, &self.s, &self.gram, v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances;

    #[test]
    fn maxcut_gram_is_identity() {
        let mut rng = linalg::rng_from_seed(1);
        let prob = instances::maxcut_gaussian(&mut rng, 6);
        let f = Factor::new(&prob, prob.feasible_point(3, &mut rng).unwrap()).unwrap();
        let g = gram(&prob, &f);
        assert!((g.matrix() - DMatrix::identity(6, 6)).amax() < 1e-14);
        assert_eq!(g.m_prime(), 6);
    }

    #[test]
    fn trs_gram_is_identity() {
        let mut rng = linalg::rng_from_seed(2);
        let prob = instances::trs_random(&mut rng, 4);
        let f = Factor::new(&prob, prob.feasible_point(2, &mut rng).unwrap()).unwrap();
        let g = gram(&prob, &f).matrix();
        assert!((g - DMatrix::identity(2, 2)).amax() < 1e-14);
    }

    #[test]
    fn redundant_constraints_lower_m_prime() {
        let mut rng = linalg::rng_from_seed(3);
        let base = instances::maxcut_gaussian(&mut rng, 4);
        let mut a = base.constraints().to_vec();
        a.push(a[1].clone());
        let mut b = base.rhs().as_slice().to_vec();
        b.push(1.0);
        let prob = SdpProblem::new(base.cost_matrix().clone(), a, DVector::from_vec(b)).unwrap();
        let y = base.feasible_point(2, &mut rng).unwrap();
        let f = Factor::new(&prob, y).unwrap();
        let g = gram(&prob, &f);
        assert_eq!(g.m_prime(), 4);
        let gm = g.matrix();
        let mut ggg = DMatrix::zeros(5, 5);
        for k in 0..5 {
            let col = g.apply_pinv(&gm.column(k).into_owned());
            ggg.set_column(k, &(&gm * col));
        }
        assert!((ggg - &gm).norm() <= 1e-10 * gm.norm());
    }

    #[test]
    fn projection_fixes_tangent_and_kills_normal() {
        let mut rng = linalg::rng_from_seed(4);
        let prob = instances::orthocut_gaussian(&mut rng, 3, 2);
        let f = Factor::new(&prob, prob.feasible_point(3, &mut rng).unwrap()).unwrap();
        let g = gram(&prob, &f);
        let z = linalg::gaussian_matrix(&mut rng, 6, 3);
        let v = project_tangent(&f, &g, &z);
        let vv = project_tangent(&f, &g, v.matrix());
        assert!((vv.matrix() - v.matrix()).norm() <= 1e-12 * v.norm());
        let normal = f.ay(0).to_dense(6);
        let w = project_tangent(&f, &g, &normal);
        assert!(w.norm() <= 1e-10 * normal.norm());
        assert!(TangentVector::new(&f, v.into_inner()).is_ok());
    }

    #[test]
    fn maxcut_s_matrix_formula() {
        let mut rng = linalg::rng_from_seed(5);
        let prob = instances::maxcut_gaussian(&mut rng, 5);
        let f = Factor::new(&prob, prob.feasible_point(2, &mut rng).unwrap()).unwrap();
        let g = gram(&prob, &f);
        let s = s_matrix(&prob, &f, &g);
        let c = prob.cost_dense();
        let cx = c * f.y() * f.y().transpose();
        let mut expect = c.clone();
        for i in 0..5 {
            expect[(i, i)] -= cx[(i, i)];
        }
        assert!((s.dense() - expect).amax() < 1e-13);
    }

    #[test]
    fn cost_in_constraint_range_gives_zero_s() {
        let mut rng = linalg::rng_from_seed(6);
        let base = instances::trs_random(&mut rng, 3);
        let nu = DVector::from_vec(vec![0.7, -1.3]);
        let c = base.apply_a_adjoint(&nu).unwrap();
        let prob = crate::model::build_family(crate::model::ProblemFamily::Trs {
            a: SymMatrix::from_diagonal(&[0.7, 0.7, 0.7]),
            b: DVector::zeros(3),
            c: -1.3,
        })
        .unwrap();
        assert_eq!(prob.cost_dense(), &c.to_dense());
        let f = Factor::new(&prob, prob.feasible_point(2, &mut rng).unwrap()).unwrap();
        let g = gram(&prob, &f);
        let s = s_matrix(&prob, &f, &g);
        assert!(s.dense().amax() <= 1e-10);
        assert!(riemannian_gradient(&f, &s).norm() <= 1e-10);
    }

    #[test]
    fn retractions_land_on_manifold() {
        let mut rng = linalg::rng_from_seed(7);
        for prob in [
            instances::maxcut_gaussian(&mut rng, 6),
            instances::orthocut_gaussian(&mut rng, 3, 2),
            instances::geneig_random(&mut rng, 4),
            instances::spheres_random(&mut rng, &[2, 2], false),
        ] {
            let f = Factor::new(&prob, prob.feasible_point(3, &mut rng).unwrap()).unwrap();
            let g = gram(&prob, &f);
            let v = project_tangent(&f, &g, &(linalg::gaussian_matrix(&mut rng, prob.n(), 3) * 0.3));
            let r = retract(&prob, &f, &v).unwrap();
            assert!(r.residual() <= 1e-12, "{:?} {}", prob.family(), r.residual());
            let same = retract(&prob, &f, &TangentVector::zeros(&f)).unwrap();
            assert!((same.y() - f.y()).amax() <= 1e-15);
        }
    }

    #[test]
    fn generic_newton_retraction() {
        let mut rng = linalg::rng_from_seed(8);
        let mc = instances::orthocut_gaussian(&mut rng, 3, 2);
        let prob = SdpProblem::new(mc.cost_matrix().clone(), mc.constraints().to_vec(), mc.rhs().clone()).unwrap();
        let f = Factor::new(&prob, mc.feasible_point(3, &mut rng).unwrap()).unwrap();
        let g = gram(&prob, &f);
        let v = project_tangent(&f, &g, &(linalg::gaussian_matrix(&mut rng, 6, 3) * 0.1));
        let r = retract(&prob, &f, &v).unwrap();
        assert!(r.is_feasible(&prob));
    }

    #[test]
    fn hessian_rejects_far_from_tangent() {
        let mut rng = linalg::rng_from_seed(9);
        let prob = instances::maxcut_gaussian(&mut rng, 5);
        let f = Factor::new(&prob, prob.feasible_point(2, &mut rng).unwrap()).unwrap();
        let g = gram(&prob, &f);
        let s = s_matrix(&prob, &f, &g);
        let v = TangentVector::trusted(f.y().clone());
        assert!(matches!(hessian_vec(&f, &s, &v, &g), Err(Error::NotTangent { .. })));
    }

    #[test]
    fn infeasible_factor_rejected() {
        let mut rng = linalg::rng_from_seed(10);
        let prob = instances::maxcut_gaussian(&mut rng, 3);
        assert!(matches!(
            Factor::new(&prob, DMatrix::from_element(3, 2, 1.0)),
            Err(Error::Infeasible { .. })
        ));
        assert!(Factor::new(&prob, DMatrix::from_element(4, 2, 0.5)).is_err());
    }
}
