//! Trust-region subproblem `min xᵀAx + 2bᵀx + c` over the unit sphere, lifted
//! to an SDP. A rank-one factor can be a strict local minimum that is not
//! global; one more column removes it. In the hard case the certified factor
//! still yields a sphere point with the optimal value.

use bmsdp::certify::{extract_trs, trs_cost};
use bmsdp::oracle::oracle_trs;
use bmsdp::solver::{rtr, staircase, staircase_from, PSchedule, SolverOptions};
use bmsdp::{build_family, certify, instances, linalg, Factor, ProblemFamily};

fn main() -> bmsdp::Result<()> {
    let problem = instances::trs_suboptimal();
    let start = Factor::new(&problem, instances::trs_suboptimal_point())?;
    let opts = SolverOptions::default();
    let (stuck, at_one) = rtr(&problem, start.clone(), &opts)?;
    let cert = certify(&problem, &stuck, at_one.eps_g, at_one.eps_h);
    println!(
        "p = 1: cost {:.10}, lambda_min(S) = {:.4}, verdict {:?}",
        at_one.final_cost, cert.lambda_min_s, cert.verdict
    );
    let opts = SolverOptions {
        p_schedule: PSchedule::Ranks(vec![1, 2]),
        ..opts
    };
    let (_, report) = staircase_from(&problem, start, &opts)?;
    println!("staircase: p = {}, cost {:.10}", report.p_used, report.final_cost);

    let mut rng = linalg::rng_from_seed(3);
    let (a, b, c) = instances::trs_hard_data(&mut rng, 8, 2);
    let oracle = oracle_trs(&a, &b, c)?;
    let hard = build_family(ProblemFamily::Trs { a, b, c })?;
    let opts = SolverOptions {
        p_schedule: PSchedule::Ranks(vec![2]),
        ..SolverOptions::default().with_seed(3)
    };
    let (y, report) = staircase(&hard, &opts)?;
    let x = extract_trs(&hard, &y)?;
    println!(
        "hard case: oracle ({:?}) {:.10}, solver {:.10}, rank {}",
        oracle.method, oracle.f_star, report.final_cost, report.rank_y
    );
    println!(
        "extracted |x| = {:.12}, value {:.10}, error {:.1e}",
        x.norm(),
        trs_cost(&hard, &x),
        (trs_cost(&hard, &x) - oracle.f_star).abs()
    );
    Ok(())
}
