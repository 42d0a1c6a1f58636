//! Orthogonal-Cut relaxations: the rank staircase, then the dimension of the
//! face of the feasible set that contains the solution. A small face means
//! the solution is the unique optimum whenever it is extreme.

use bmsdp::solver::{staircase, SolverOptions};
use bmsdp::{face_dimension, instances, linalg, pataki_bound};

fn main() -> bmsdp::Result<()> {
    let mut rng = linalg::rng_from_seed(5);
    for (q, d) in [(4, 2), (6, 2), (4, 3)] {
        let problem = instances::orthocut_gaussian(&mut rng, q, d);
        let (y, report) = staircase(&problem, &SolverOptions::default().with_seed(5))?;
        let face = face_dimension(&problem, &y)?;
        println!("q = {q}, d = {d}: n = {}, m = {}", problem.n(), problem.m());
        println!(
            "  p used {} (Pataki bound {}), rank {}, cost {:.8}",
            report.p_used,
            pataki_bound(problem.m()),
            face.p,
            report.final_cost
        );
        println!(
            "  face dim {}, delta {}, neg eig cap {:?}, deterministic optimal {}",
            face.dim_face, face.delta, face.neg_eig_cap, face.deterministic_optimal
        );
    }
    Ok(())
}
