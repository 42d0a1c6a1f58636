//! Certify a factor read from disk. Writes a small problem and two factors
//! to a temporary directory, reads them back and prints both certificates.
//! Pass `problem.json factor.json` to certify your own files instead.

use std::path::PathBuf;

use bmsdp::io::{problem_to_json, read_factor, read_problem, FactorFile};
use bmsdp::solver::{staircase, SolverOptions};
use bmsdp::{certify, instances, linalg, Factor};

fn certify_paths(problem: &PathBuf, factor: &PathBuf) -> bmsdp::Result<()> {
    let problem = read_problem(problem)?;
    let factor = Factor::new(&problem, read_factor(factor)?)?;
    let opts = SolverOptions::default();
    let cert = certify(&problem, &factor, opts.eps_g_for(&problem), opts.eps_h_for(&problem));
    println!(
        "cost {:.10}  |SY| {:.2e}  lambda_min(S) {:.2e}  gap bound {:?}  {:?}",
        cert.cost, cert.sy_norm, cert.lambda_min_s, cert.gap_bound, cert.verdict
    );
    Ok(())
}

fn main() -> bmsdp::Result<()> {
    let args: Vec<PathBuf> = std::env::args_os().skip(1).map(PathBuf::from).collect();
    if let [problem, factor] = args.as_slice() {
        return certify_paths(problem, factor);
    }

    let dir = std::env::temp_dir().join(format!("bmsdp-certify-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let mut rng = linalg::rng_from_seed(2);
    let problem = instances::maxcut_gaussian(&mut rng, 15);
    let problem_path = dir.join("problem.json");
    std::fs::write(&problem_path, problem_to_json(&problem))?;

    let (solved, _) = staircase(&problem, &SolverOptions::default())?;
    let random = problem.feasible_point(4, &mut rng)?;
    for (name, y) in [("solved", solved.y().clone()), ("random", random)] {
        let path = dir.join(format!("{name}.json"));
        std::fs::write(&path, serde_json::to_string(&FactorFile::from_matrix(&y)).unwrap())?;
        print!("{name:>7}: ");
        certify_paths(&problem_path, &path)?;
    }
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}
