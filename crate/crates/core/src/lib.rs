//! Burer-Monteiro factorization for smooth equality-constrained semidefinite
//! programs.
//!
//! The SDP `min <C, X> s.t. A(X) = b, X ⪰ 0` is replaced by the nonconvex
//! problem `min <CY, Y>` over the manifold `{Y ∈ R^{n×p} : A(YYᵀ) = b}`, solved
//! by a Riemannian trust-region method. Any output point can then be
//! certified a posteriori through the dual matrix `S = C - A*(μ)`.
//!
//! ```
//! use bmsdp::{instances, solver::{staircase, SolverOptions}, Verdict};
//!
//! let problem = instances::maxcut_cycle(8);
//! let (y, report) = staircase(&problem, &SolverOptions::default()).unwrap();
//! assert!(matches!(report.certificate.as_ref().unwrap().verdict, Verdict::CertifiedOptimal { .. }));
//! assert!((problem.cost(y.y()) + 8.0).abs() < 1e-6);
//! ```

pub mod certify;
pub mod cli;
pub mod error;
pub mod geometry;
pub mod instances;
pub mod io;
pub mod lanczos;
pub mod linalg;
pub mod model;
pub mod oracle;
pub mod solver;
pub mod sym;

pub use certify::{certify, face_dimension, DualCertificate, FaceReport, Verdict};
pub use error::{Error, Result};
pub use geometry::{Factor, GramSystem, SMatrix, TangentVector};
pub use model::{build_family, pataki_bound, FamilyTag, ProblemFamily, SdpProblem};
pub use sym::SymMatrix;
