//! Escape from a planted second-order saddle of the cycle Max-Cut problem:
//! append a zero column, follow the negative curvature of `S`, and let the
//! staircase finish from there.

use bmsdp::geometry::{gram, s_matrix};
use bmsdp::solver::{escalate, escape_direction, escape_step, staircase_from, SolverOptions};
use bmsdp::{certify, instances, Factor};

fn main() -> bmsdp::Result<()> {
    let (n, freq) = (10, 2);
    let problem = instances::maxcut_cycle(n);
    let planted = Factor::new(&problem, instances::cycle_planted_point(n, freq))?;
    let cert = certify(&problem, &planted, 1e-8, 1e-8);
    println!(
        "planted point: cost {:.6}, lambda_min(S) = {:.6}, verdict {:?}",
        cert.cost, cert.lambda_min_s, cert.verdict
    );

    let padded = escalate(&planted, &problem)?;
    let s = s_matrix(&problem, &padded, &gram(&problem, &padded));
    let dir = escape_direction(&padded, &s, 1e-6).expect("negative curvature at a rank-deficient point");
    let (next, step) = escape_step(&problem, &padded, &dir, cert.lambda_min_s)?.expect("escape step");
    println!(
        "escape step t = {:.3e} after {} backtracks, decrease {:.6}",
        step.step, step.backtracks, step.decrease
    );

    let (_, report) = staircase_from(&problem, next, &SolverOptions::default())?;
    println!(
        "after staircase: cost {:.8} (optimum {:.8}), verdict {:?}",
        report.final_cost,
        instances::cycle_maxcut_optimum(n),
        report.certificate.as_ref().unwrap().verdict
    );
    Ok(())
}
