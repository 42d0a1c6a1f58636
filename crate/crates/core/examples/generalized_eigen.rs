//! Smallest generalized eigenvalue of a pencil `(C, B)` as the SDP
//! `min <C, X> s.t. <B, X> = 1`, solved at `p = 1` and compared with the
//! Cholesky and square-root oracles.

use bmsdp::certify::extract_rank_one;
use bmsdp::oracle::{oracle_geneig, oracle_geneig_sqrt};
use bmsdp::solver::{rtr, SolverOptions};
use bmsdp::{certify, instances, linalg, Factor};

fn main() -> bmsdp::Result<()> {
    let mut rng = linalg::rng_from_seed(11);
    for n in [4, 10, 40] {
        let problem = instances::geneig_random(&mut rng, n);
        let pencil = (problem.cost_matrix(), &problem.constraints()[0]);
        let chol = oracle_geneig(pencil.0, pencil.1)?;
        let sqrt = oracle_geneig_sqrt(pencil.0, pencil.1)?;

        let y0 = Factor::new(&problem, problem.feasible_point(1, &mut rng)?)?;
        let (y, report) = rtr(&problem, y0, &SolverOptions::default())?;
        let (x, residual) = extract_rank_one(&y);
        let oracle_x = nalgebra::DVector::from_vec(chol.x.clone().unwrap());
        let align = x.dot(&oracle_x).abs() / (x.norm() * oracle_x.norm());

        println!("n = {n}");
        println!("  oracles   {:.12} / {:.12}", chol.f_star, sqrt.f_star);
        println!("  solver    {:.12} in {} iterations", report.final_cost, report.outer_iters);
        println!("  verdict   {:?}", certify(&problem, &y, report.eps_g, report.eps_h).verdict);
        println!("  rank-one residual {residual:.1e}, alignment with oracle vector {align:.12}");
    }
    Ok(())
}
