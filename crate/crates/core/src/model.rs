//! Problem data for `min <C, X>  s.t.  A(X) = b, X ⪰ 0`, the constraint
//! operator and its adjoint, built-in problem families and static diagnostics.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, PsdPinv, SeededRng};
use crate::sym::SymMatrix;

/// Largest constraint block handled with a dense Gram eigendecomposition.
pub const MAX_DENSE_GRAM: usize = 20_000;

/// Constraint structure of a built-in family, without the cost. This is the
/// `family` block of the problem file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FamilyTag {
    /// `<B, X> = 1`; `B` is the single constraint matrix.
    GenEig,
    /// Lifted trust-region subproblem on the unit sphere of `R^{n}` (matrix size `n + 1`).
    Trs,
    /// Products of spheres; `homogeneous = false` appends the constant coordinate.
    Spheres { sizes: Vec<usize>, homogeneous: bool },
    /// Diagonal `d × d` blocks fixed to the identity (`d = 1` is Max-Cut).
    OrthoCut { d: usize },
}

/// A built-in family with all of its data.
#[derive(Clone, Debug)]
pub enum ProblemFamily {
    /// Generalized eigenvalue problem `min xᵀCx s.t. xᵀBx = 1`.
    GenEig { c: SymMatrix, b: SymMatrix },
    /// `min xᵀAx + 2bᵀx + c s.t. ‖x‖ = 1`.
    Trs { a: SymMatrix, b: DVector<f64>, c: f64 },
    /// Quadratic over several spheres. `cost` has size `Σ sizes` (homogeneous)
    /// or `Σ sizes + 1`.
    Spheres {
        sizes: Vec<usize>,
        homogeneous: bool,
        cost: SymMatrix,
    },
    OrthoCut { d: usize, cost: SymMatrix },
}

#[derive(Clone, Debug)]
pub struct SdpProblem {
    n: usize,
    c: SymMatrix,
    a: Vec<SymMatrix>,
    b: DVector<f64>,
    trace_bound: Option<f64>,
    constant_trace: bool,
    identity_in_range: Option<bool>,
    family: Option<FamilyTag>,
    // derived
    c_dense: DMatrix<f64>,
    supports: Vec<Vec<usize>>,
    blocks: Vec<Vec<usize>>,
    /// Upper Cholesky factor `R` with `B = RᵀR` (GenEig only).
    geneig_chol: Option<DMatrix<f64>>,
}

impl SdpProblem {
    /// Generic problem. Structural flags are detected: `identity_in_range`
    /// by least squares on `A*(ν) ≈ I`, and `constant_trace` from it.
    pub fn new(c: SymMatrix, a: Vec<SymMatrix>, b: DVector<f64>) -> Result<Self> {
        let mut problem = Self::assemble(c, a, b)?;
        let detected = problem.detect_identity_in_range();
        problem.identity_in_range = Some(detected);
        problem.constant_trace = detected;
        Ok(problem)
    }

    fn assemble(c: SymMatrix, a: Vec<SymMatrix>, b: DVector<f64>) -> Result<Self> {
        let n = c.n();
        if n == 0 {
            return Err(Error::InvalidProblem("n must be at least 1".into()));
        }
        if a.is_empty() {
            return Err(Error::InvalidProblem("at least one constraint is required".into()));
        }
        if b.len() != a.len() {
            return Err(Error::DimensionMismatch {
                what: "length of b",
                expected: a.len(),
                got: b.len(),
            });
        }
        for ai in &a {
            if ai.n() != n {
                return Err(Error::DimensionMismatch {
                    what: "constraint matrix dimension",
                    expected: n,
                    got: ai.n(),
                });
            }
        }
        if b.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidProblem("b has non-finite entries".into()));
        }
        let supports: Vec<Vec<usize>> = a.iter().map(|ai| ai.support_rows()).collect();
        let blocks = constraint_blocks(n, &supports);
        if let Some(big) = blocks.iter().map(|blk| blk.len()).max() {
            if big > MAX_DENSE_GRAM {
                return Err(Error::TooManyConstraints(big));
            }
        }
        let c_dense = c.to_dense();
        Ok(Self {
            n,
            c,
            a,
            b,
            trace_bound: None,
            constant_trace: false,
            identity_in_range: None,
            family: None,
            c_dense,
            supports,
            blocks,
            geneig_chol: None,
        })
    }

    /// Sets `R = max trace(X)` over the feasible set.
    pub fn with_trace_bound(mut self, r: f64) -> Result<Self> {
        if !r.is_finite() || r < 0.0 {
            return Err(Error::InvalidProblem(format!("trace bound must be a finite nonnegative number, got {r}")));
        }
        self.trace_bound = Some(r);
        Ok(self)
    }

    /// Declares `constant_trace`; a `true` claim is checked against the constraints.
    pub fn with_constant_trace(mut self, flag: bool) -> Result<Self> {
        if flag && !self.detect_identity_in_range() {
            return Err(Error::InvalidProblem(
                "constant_trace = true but the identity is not in the span of the constraint matrices".into(),
            ));
        }
        self.constant_trace = flag;
        Ok(self)
    }

    pub fn with_identity_in_range(mut self, flag: Option<bool>) -> Self {
        self.identity_in_range = flag;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn m(&self) -> usize {
        self.a.len()
    }
    pub fn cost_matrix(&self) -> &SymMatrix {
        &self.c
    }
    pub fn cost_dense(&self) -> &DMatrix<f64> {
        &self.c_dense
    }
    pub fn constraints(&self) -> &[SymMatrix] {
        &self.a
    }
    pub fn rhs(&self) -> &DVector<f64> {
        &self.b
    }
    pub fn trace_bound(&self) -> Option<f64> {
        self.trace_bound
    }
    pub fn constant_trace(&self) -> bool {
        self.constant_trace
    }
    pub fn identity_in_range(&self) -> Option<bool> {
        self.identity_in_range
    }
    pub fn family(&self) -> Option<&FamilyTag> {
        self.family.as_ref()
    }
    /// Rows touched by constraint `i`.
    pub fn support(&self, i: usize) -> &[usize] {
        &self.supports[i]
    }
    /// Groups of constraints with pairwise disjoint row supports across groups;
    /// the Gram matrix is block diagonal along these groups.
    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// `‖C‖_F`.
    pub fn cost_norm(&self) -> f64 {
        self.c_dense.norm()
    }

    /// `g(Y) = <CY, Y>`.
    pub fn cost(&self, y: &DMatrix<f64>) -> f64 {
        (&self.c_dense * y).dot(y)
    }

    /// `A(X)_i = <A_i, X>`.
    pub fn apply_a(&self, x: &SymMatrix) -> Result<DVector<f64>> {
        if x.n() != self.n {
            return Err(Error::DimensionMismatch {
                what: "matrix dimension",
                expected: self.n,
                got: x.n(),
            });
        }
        Ok(DVector::from_iterator(self.m(), self.a.iter().map(|ai| ai.inner_sym(x))))
    }

    /// `A(M)` for an arbitrary square matrix (only its symmetric part matters).
    pub fn apply_a_dense(&self, x: &DMatrix<f64>) -> DVector<f64> {
        DVector::from_iterator(self.m(), self.a.iter().map(|ai| ai.inner(x)))
    }

    /// `A(YYᵀ) - b` computed from row products.
    pub fn constraint_residual(&self, y: &DMatrix<f64>) -> DVector<f64> {
        let vals = self.a.iter().enumerate().map(|(i, ai)| {
            let block = ai.mul_rows(y, &self.supports[i]);
            block.dot(y) - self.b[i]
        });
        DVector::from_iterator(self.m(), vals)
    }

    /// Feasibility tolerance `1e-9 (1 + ‖b‖_∞)`.
    pub fn feasibility_tolerance(&self) -> f64 {
        1e-9 * (1.0 + self.b.amax())
    }

    /// `A*(ν) = Σ ν_i A_i`.
    pub fn apply_a_adjoint(&self, nu: &DVector<f64>) -> Result<SymMatrix> {
        if nu.len() != self.m() {
            return Err(Error::DimensionMismatch {
                what: "length of ν",
                expected: self.m(),
                got: nu.len(),
            });
        }
        if self.a.iter().all(|ai| ai.is_sparse()) {
            let mut acc: BTreeMap<(usize, usize), f64> = BTreeMap::new();
            for (ai, &w) in self.a.iter().zip(nu.iter()) {
                if w == 0.0 {
                    continue;
                }
                ai.for_each_lower(|i, j, v| *acc.entry((i, j)).or_insert(0.0) += w * v);
            }
            let triplets = acc.into_iter().map(|((i, j), v)| (i, j, v)).collect();
            SymMatrix::from_triplets(self.n, triplets)
        } else {
            SymMatrix::from_lower(&self.adjoint_dense(nu))
        }
    }

    /// `A*(ν)` materialized densely.
    pub fn adjoint_dense(&self, nu: &DVector<f64>) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.n, self.n);
        for (ai, &w) in self.a.iter().zip(nu.iter()) {
            if w != 0.0 {
                ai.add_scaled_into(w, &mut out);
            }
        }
        out
    }

    /// Least-squares test of `I ∈ im(A*)`: accept when `‖A*(ν) - I‖_F ≤ 1e-10 √n`.
    pub fn detect_identity_in_range(&self) -> bool {
        let nu = self.identity_coefficients();
        let mut resid = self.adjoint_dense(&nu);
        for i in 0..self.n {
            resid[(i, i)] -= 1.0;
        }
        resid.norm() <= 1e-10 * (self.n as f64).sqrt()
    }

    /// Minimum-norm least-squares coefficients of `A*(ν) ≈ I`.
    pub(crate) fn identity_coefficients(&self) -> DVector<f64> {
        let traces = DVector::from_iterator(self.m(), self.a.iter().map(|ai| ai.trace()));
        self.constraint_inner_solve(&traces)
    }

    /// Per-block matrices `M_ij = <A_i, A_j>` and the shared absolute rank cutoff.
    fn constraint_gram(&self) -> (Vec<PsdPinv>, f64) {
        let mut mats = Vec::with_capacity(self.blocks.len());
        let mut largest = 0.0_f64;
        for blk in &self.blocks {
            let k = blk.len();
            let mut mm = DMatrix::zeros(k, k);
            for (x, &i) in blk.iter().enumerate() {
                for (y, &j) in blk.iter().enumerate().take(x + 1) {
                    let v = self.a[i].inner_sym(&self.a[j]);
                    mm[(x, y)] = v;
                    mm[(y, x)] = v;
                }
            }
            largest = largest.max(mm.diagonal().amax());
            mats.push(mm);
        }
        let mut pinvs: Vec<PsdPinv> = mats.into_iter().map(|mm| PsdPinv::new(mm, 0.0)).collect();
        let top = pinvs.iter().map(|p| p.largest_eigenvalue()).fold(largest, f64::max);
        let cut = linalg::rank_cutoff(self.m().max(self.n * (self.n + 1) / 2), top);
        for p in pinvs.iter_mut() {
            *p = p.with_cutoff(cut);
        }
        (pinvs, cut)
    }

    /// Dimension of `span{A_1, ..., A_m}`; an upper bound on `m'` at every `p`.
    pub fn constraint_span_rank(&self) -> usize {
        self.constraint_gram().0.iter().map(|p| p.rank()).sum()
    }

    /// A vanishing combination `Σ c_i A_i ≈ 0` when the constraint matrices
    /// are linearly dependent, formatted like `1·A[0] - 1·A[4]`.
    pub fn dependent_combination(&self) -> Option<String> {
        let (pinvs, cut) = self.constraint_gram();
        for (blk, pinv) in self.blocks.iter().zip(&pinvs) {
            if let Some(null) = pinv.null_vector(cut) {
                let lead = null.iter().copied().find(|v| v.abs() > 1e-8 * null.amax()).unwrap_or(1.0);
                let top = null.amax() * lead.signum();
                let mut terms = Vec::new();
                for (x, &i) in blk.iter().enumerate() {
                    let c = null[x] / top;
                    if c.abs() > 1e-8 {
                        let sign = if c < 0.0 { "-" } else { "+" };
                        terms.push(format!("{sign} {:.6}·A[{i}]", c.abs()));
                    }
                }
                let mut text = terms.join(" ");
                if let Some(rest) = text.strip_prefix("+ ") {
                    text = rest.to_string();
                }
                return Some(format!("{text} ≈ 0"));
            }
        }
        None
    }

    /// Solves `M ν = t` with `M_ij = <A_i, A_j>` by pseudo-inverse, block by block.
    fn constraint_inner_solve(&self, rhs: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(self.m());
        let (pinvs, _) = self.constraint_gram();
        for (blk, pinv) in self.blocks.iter().zip(pinvs) {
            let local = DVector::from_iterator(blk.len(), blk.iter().map(|&i| rhs[i]));
            let sol = pinv.apply(&local);
            for (x, &i) in blk.iter().enumerate() {
                out[i] = sol[x];
            }
        }
        out
    }

    /// Random feasible factor with `p` columns for built-in families.
    pub fn feasible_point(&self, p: usize, rng: &mut SeededRng) -> Result<DMatrix<f64>> {
        if p == 0 {
            return Err(Error::NoFeasiblePoint("p must be at least 1".into()));
        }
        let n = self.n;
        match &self.family {
            None => Err(Error::NoFeasiblePoint(
                "generic problems need a caller-supplied feasible factor".into(),
            )),
            Some(FamilyTag::GenEig) => {
                let r = self.geneig_chol.as_ref().expect("geneig factor");
                let w = linalg::gaussian_matrix(rng, n, p);
                let w = &w / w.norm();
                let y = r
                    .clone()
                    .solve_upper_triangular(&w)
                    .ok_or(Error::NotPositiveDefinite)?;
                Ok(y)
            }
            Some(FamilyTag::Trs) | Some(FamilyTag::Spheres { .. }) => {
                let mut y = linalg::gaussian_matrix(rng, n, p);
                for (i, rows) in self.supports.iter().enumerate() {
                    let scale = self.b[i].sqrt() / rows_norm(&y, rows);
                    for &r in rows {
                        for k in 0..p {
                            y[(r, k)] *= scale;
                        }
                    }
                }
                Ok(y)
            }
            Some(FamilyTag::OrthoCut { d }) => {
                let d = *d;
                if p < d {
                    return Err(Error::NoFeasiblePoint(format!(
                        "Orthogonal-Cut needs p >= d (p = {p}, d = {d})"
                    )));
                }
                let mut y = DMatrix::zeros(n, p);
                for slice in 0..n / d {
                    // first d rows of a random orthogonal matrix: a rotated truncated identity
                    let q = linalg::random_orthogonal(rng, p);
                    for r in 0..d {
                        for k in 0..p {
                            y[(slice * d + r, k)] = q[(r, k)];
                        }
                    }
                }
                Ok(y)
            }
        }
    }
}

fn rows_norm(y: &DMatrix<f64>, rows: &[usize]) -> f64 {
    rows.iter()
        .map(|&r| y.row(r).norm_squared())
        .sum::<f64>()
        .sqrt()
}

/// Groups constraints whose supports overlap (transitively).
fn constraint_blocks(n: usize, supports: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let m = supports.len();
    let mut parent: Vec<usize> = (0..m).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut owner: Vec<Option<usize>> = vec![None; n];
    for (i, rows) in supports.iter().enumerate() {
        for &r in rows {
            match owner[r] {
                None => owner[r] = Some(i),
                Some(j) => {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    if a != b {
                        parent[a.max(b)] = a.min(b);
                    }
                }
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..m {
        let root = find(&mut parent, i);
        groups.entry(root).or_default().push(i);
    }
    groups.into_values().collect()
}

/// Builds the SDP relaxation of a built-in family and sets its structural flags.
pub fn build_family(family: ProblemFamily) -> Result<SdpProblem> {
    match family {
        ProblemFamily::GenEig { c, b } => {
            let n = c.n();
            if b.n() != n {
                return Err(Error::DimensionMismatch {
                    what: "B dimension",
                    expected: n,
                    got: b.n(),
                });
            }
            let bd = b.to_dense();
            let chol = nalgebra::Cholesky::new(bd.clone()).ok_or(Error::NotPositiveDefinite)?;
            let r = chol.l().transpose();
            let lambda_min_b = linalg::sym_min_eig(&bd).0;
            if lambda_min_b <= 0.0 {
                return Err(Error::NotPositiveDefinite);
            }
            let scalar_b = {
                let d0 = bd[(0, 0)];
                (0..n).all(|i| (0..n).all(|j| bd[(i, j)] == if i == j { d0 } else { 0.0 }))
            };
            let mut p = SdpProblem::assemble(c, vec![b], DVector::from_element(1, 1.0))?;
            p.family = Some(FamilyTag::GenEig);
            p.geneig_chol = Some(r);
            p.trace_bound = Some(1.0 / lambda_min_b);
            p.constant_trace = scalar_b;
            p.identity_in_range = Some(scalar_b);
            Ok(p)
        }
        ProblemFamily::Trs { a, b, c } => {
            let n = a.n();
            if n < 1 {
                return Err(Error::InvalidFamily("TRS needs n >= 1".into()));
            }
            if b.len() != n {
                return Err(Error::DimensionMismatch {
                    what: "TRS linear term length",
                    expected: n,
                    got: b.len(),
                });
            }
            let mut cost = a.triplets();
            for (i, &bi) in b.iter().enumerate() {
                if bi != 0.0 {
                    cost.push((n, i, bi));
                }
            }
            if c != 0.0 {
                cost.push((n, n, c));
            }
            let cost = SymMatrix::from_triplets(n + 1, cost)?;
            let a1 = SymMatrix::from_triplets(n + 1, (0..n).map(|i| (i, i, 1.0)).collect())?;
            let a2 = SymMatrix::from_triplets(n + 1, vec![(n, n, 1.0)])?;
            let mut p = SdpProblem::assemble(cost, vec![a1, a2], DVector::from_vec(vec![1.0, 1.0]))?;
            p.family = Some(FamilyTag::Trs);
            p.trace_bound = Some(2.0);
            p.constant_trace = true;
            p.identity_in_range = Some(true);
            Ok(p)
        }
        ProblemFamily::Spheres {
            sizes,
            homogeneous,
            cost,
        } => {
            if sizes.is_empty() || sizes.contains(&0) {
                return Err(Error::InvalidFamily("sphere sizes must be positive and non-empty".into()));
            }
            let total: usize = sizes.iter().sum();
            let n = if homogeneous { total } else { total + 1 };
            if cost.n() != n {
                return Err(Error::DimensionMismatch {
                    what: "Spheres cost dimension",
                    expected: n,
                    got: cost.n(),
                });
            }
            let mut a = Vec::new();
            let mut start = 0;
            for &s in &sizes {
                a.push(SymMatrix::from_triplets(n, (start..start + s).map(|i| (i, i, 1.0)).collect())?);
                start += s;
            }
            if !homogeneous {
                a.push(SymMatrix::from_triplets(n, vec![(total, total, 1.0)])?);
            }
            let m = a.len();
            let mut p = SdpProblem::assemble(cost, a, DVector::from_element(m, 1.0))?;
            p.family = Some(FamilyTag::Spheres { sizes, homogeneous });
            p.trace_bound = Some(m as f64);
            p.constant_trace = true;
            p.identity_in_range = Some(true);
            Ok(p)
        }
        ProblemFamily::OrthoCut { d, cost } => {
            let n = cost.n();
            if d == 0 || n % d != 0 {
                return Err(Error::InvalidFamily(format!(
                    "Orthogonal-Cut needs n divisible by d (n = {n}, d = {d})"
                )));
            }
            let mut a = Vec::new();
            let mut b = Vec::new();
            for slice in 0..n / d {
                let base = slice * d;
                for i in 0..d {
                    for j in 0..=i {
                        if i == j {
                            a.push(SymMatrix::from_triplets(n, vec![(base + i, base + i, 1.0)])?);
                            b.push(1.0);
                        } else {
                            // <A, X> = X_ij
                            a.push(SymMatrix::from_triplets(n, vec![(base + i, base + j, 0.5)])?);
                            b.push(0.0);
                        }
                    }
                }
            }
            let mut p = SdpProblem::assemble(cost, a, DVector::from_vec(b))?;
            p.family = Some(FamilyTag::OrthoCut { d });
            p.trace_bound = Some(n as f64);
            p.constant_trace = true;
            p.identity_in_range = Some(true);
            Ok(p)
        }
    }
}

/// Rebuilds a family problem from its tag and cost, for file input.
pub fn family_from_tag(tag: &FamilyTag, c: SymMatrix, a: &[SymMatrix]) -> Result<ProblemFamily> {
    Ok(match tag {
        FamilyTag::GenEig => {
            let b = a
                .first()
                .cloned()
                .ok_or_else(|| Error::InvalidFamily("geneig needs one constraint matrix".into()))?;
            ProblemFamily::GenEig { c, b }
        }
        FamilyTag::Trs => {
            let n = c.n().checked_sub(1).ok_or_else(|| Error::InvalidFamily("TRS needs n >= 2".into()))?;
            let dense = c.to_dense();
            let a_blk = SymMatrix::from_lower(&dense.view((0, 0), (n, n)).into_owned())?.to_sparse();
            let b = DVector::from_iterator(n, (0..n).map(|i| dense[(n, i)]));
            ProblemFamily::Trs {
                a: a_blk,
                b,
                c: dense[(n, n)],
            }
        }
        FamilyTag::Spheres { sizes, homogeneous } => ProblemFamily::Spheres {
            sizes: sizes.clone(),
            homogeneous: *homogeneous,
            cost: c,
        },
        FamilyTag::OrthoCut { d } => ProblemFamily::OrthoCut { d: *d, cost: c },
    })
}

/// Largest `p` with `p(p+1)/2 ≤ m'`, i.e. `⌊(√(8m'+1) − 1)/2⌋`.
pub fn pataki_bound(m_prime: usize) -> usize {
    let mut p = ((((8 * m_prime + 1) as f64).sqrt() - 1.0) / 2.0).floor() as usize;
    while p * (p + 1) / 2 > m_prime {
        p -= 1;
    }
    while (p + 1) * (p + 2) / 2 <= m_prime {
        p += 1;
    }
    p
}

/// Rank observed at one sampled point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankWitness {
    pub sample: usize,
    /// `true` when the point is a small off-manifold perturbation of the sample.
    pub perturbed: bool,
    pub rank: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmoothnessReport {
    /// Common rank of `{A_i Y}`; `None` when the observed ranks differ.
    pub m_prime: Option<usize>,
    pub constant_rank: bool,
    pub observed_ranks: Vec<usize>,
    pub witnesses: Vec<RankWitness>,
}

/// Radius of the off-manifold perturbations used to probe constant rank nearby.
pub const PERTURBATION_RADIUS: f64 = 1e-6;

/// Numerical rank of `{A_1 Y, ..., A_m Y}` in `R^{n×p}`. `scale` overrides
/// the relative singular-value cutoff `max(np, m)·eps`.
pub fn constraint_rank(problem: &SdpProblem, y: &DMatrix<f64>, scale: Option<f64>) -> usize {
    let p = y.ncols();
    let n = problem.n();
    let mut singular = Vec::with_capacity(problem.m());
    for blk in problem.blocks() {
        let mut rows = DMatrix::zeros(blk.len(), n * p);
        for (x, &i) in blk.iter().enumerate() {
            let ay = problem.constraints()[i].mul_rows(y, problem.support(i));
            for (local, &r) in ay.rows().iter().enumerate() {
                for k in 0..p {
                    rows[(x, k * n + r)] = ay.values()[(local, k)];
                }
            }
        }
        let sv = if blk.len() <= n * p {
            rows.svd(false, false).singular_values
        } else {
            rows.transpose().svd(false, false).singular_values
        };
        singular.extend(sv.iter().copied());
    }
    linalg::numerical_rank(&singular, (n * p).max(problem.m()), scale)
}

/// Sampling diagnostic for the smoothness assumption: ranks of `{A_i Y}` at
/// random feasible points and at tiny perturbations of them. Not a proof.
pub fn check_smoothness(problem: &SdpProblem, p: usize, samples: usize, seed: u64) -> Result<SmoothnessReport> {
    let mut rng = linalg::rng_from_seed(seed);
    let points = (0..samples.max(1))
        .map(|_| problem.feasible_point(p, &mut rng))
        .collect::<Result<Vec<_>>>()?;
    Ok(check_smoothness_at(problem, &points, None, &mut rng))
}

/// Same as [`check_smoothness`] on caller-supplied feasible points.
pub fn check_smoothness_at(
    problem: &SdpProblem,
    points: &[DMatrix<f64>],
    scale: Option<f64>,
    rng: &mut SeededRng,
) -> SmoothnessReport {
    let mut witnesses = Vec::new();
    for (sample, y) in points.iter().enumerate() {
        witnesses.push(RankWitness {
            sample,
            perturbed: false,
            rank: constraint_rank(problem, y, scale),
        });
        let e = linalg::gaussian_matrix(rng, y.nrows(), y.ncols());
        let shrink = PERTURBATION_RADIUS / e.norm().max(f64::MIN_POSITIVE);
        let shifted = y + e * shrink;
        witnesses.push(RankWitness {
            sample,
            perturbed: true,
            rank: constraint_rank(problem, &shifted, scale),
        });
    }
    let mut observed: Vec<usize> = witnesses.iter().map(|w| w.rank).collect();
    observed.sort_unstable();
    observed.dedup();
    let constant_rank = observed.len() == 1;
    SmoothnessReport {
        m_prime: if constant_rank { observed.first().copied() } else { None },
        constant_rank,
        observed_ranks: observed,
        witnesses,
    }
}
