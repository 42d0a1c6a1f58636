//! Max-Cut relaxation of a random weighted graph, solved by the rank
//! staircase and rounded to a cut with random hyperplanes.

use bmsdp::solver::{staircase, SolverOptions};
use bmsdp::{instances, linalg};

fn main() -> bmsdp::Result<()> {
    let mut rng = linalg::rng_from_seed(7);
    let n = 30;
    let problem = instances::maxcut_gaussian(&mut rng, n);
    let (y, report) = staircase(&problem, &SolverOptions::default().with_seed(7))?;

    println!("status {:?} at p = {} (rank {})", report.status, report.p_used, report.rank_y);
    for esc in &report.escalations {
        println!("  escalated to p = {}: {}", esc.p, esc.reason);
    }
    let cert = report.certificate.as_ref().expect("staircase certifies its output");
    println!("relaxation value {:.8}", report.final_cost);
    println!("verdict {:?}, lambda_min(S) = {:.2e}", cert.verdict, cert.lambda_min_s);

    let mut best = f64::INFINITY;
    for _ in 0..200 {
        let r = linalg::gaussian_vector(&mut rng, y.p());
        let signs = (y.y() * r).map(|v: f64| if v >= 0.0 { 1.0 } else { -1.0 });
        let value = (problem.cost_dense() * &signs).dot(&signs);
        best = best.min(value);
    }
    println!("best rounded cut value {best:.8} (ratio {:.4})", best / report.final_cost);
    Ok(())
}
