//! Smallest eigenpair of a symmetric operator by Lanczos with full
//! reorthogonalization and explicit restarts.

use nalgebra::{DMatrix, DVector};

use crate::linalg;

#[derive(Clone, Debug)]
pub struct EigEstimate {
    /// Ritz value.
    pub value: f64,
    /// Unit Ritz vector.
    pub vector: DVector<f64>,
    /// `‖A v - θ v‖`. For a symmetric operator some eigenvalue lies within
    /// this distance of the Ritz value.
    pub residual: f64,
}

impl EigEstimate {
    /// Ritz value minus its residual: a pessimistic estimate of the smallest eigenvalue.
    pub fn lower(&self) -> f64 {
        self.value - self.residual
    }
}

/// Runs up to `restarts + 1` Lanczos passes of `iters` steps each on the
/// subspace kept invariant by `project`, restarting from the best Ritz vector.
pub fn lanczos_min<A, P>(mut apply: A, project: P, start: DVector<f64>, iters: usize, restarts: usize) -> EigEstimate
where
    A: FnMut(&DVector<f64>) -> DVector<f64>,
    P: Fn(&mut DVector<f64>),
{
    let mut v0 = start;
    project(&mut v0);
    let mut best: Option<EigEstimate> = None;
    for _ in 0..=restarts {
        let nrm = v0.norm();
        if nrm == 0.0 {
            break;
        }
        let est = single_pass(&mut apply, &project, v0 / nrm, iters.max(1));
        let done = est.residual <= 1e-14 * est.value.abs().max(1.0);
        v0 = est.vector.clone();
        best = match best {
            Some(b) if b.value <= est.value => Some(b),
            _ => Some(est),
        };
        if done {
            break;
        }
    }
    best.unwrap_or(EigEstimate {
        value: 0.0,
        vector: v0,
        residual: 0.0,
    })
}

fn single_pass<A, P>(apply: &mut A, project: &P, q0: DVector<f64>, iters: usize) -> EigEstimate
where
    A: FnMut(&DVector<f64>) -> DVector<f64>,
    P: Fn(&mut DVector<f64>),
{
    let mut basis: Vec<DVector<f64>> = vec![q0];
    let mut alpha = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    for k in 0..iters {
        let mut w = apply(&basis[k]);
        project(&mut w);
        let a = basis[k].dot(&w);
        alpha.push(a);
        // two passes of Gram-Schmidt against the whole basis
        for _ in 0..2 {
            for q in &basis {
                let c = q.dot(&w);
                w.axpy(-c, q, 1.0);
            }
        }
        let b = w.norm();
        let scale = alpha.iter().fold(0.0_f64, |m, x| m.max(x.abs())).max(1e-300);
        if k + 1 == iters || b <= 1e-12 * scale {
            break;
        }
        beta.push(b);
        basis.push(w / b);
    }
    let k = alpha.len();
    let mut t = DMatrix::zeros(k, k);
    for i in 0..k {
        t[(i, i)] = alpha[i];
        if i + 1 < k {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    let (_, vecs) = linalg::sym_eigen_sorted(t);
    let coeffs = vecs.column(0);
    let mut x = DVector::zeros(basis[0].len());
    for (q, &c) in basis.iter().zip(coeffs.iter()) {
        x.axpy(c, q, 1.0);
    }
    project(&mut x);
    let nrm = x.norm();
    if nrm > 0.0 {
        x /= nrm;
    }
    let mut ax = apply(&x);
    project(&mut ax);
    let theta = x.dot(&ax);
    let residual = (ax - &x * theta).norm();
    EigEstimate {
        value: theta,
        vector: x,
        residual,
    }
}
