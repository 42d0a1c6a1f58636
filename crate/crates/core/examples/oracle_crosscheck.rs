//! Closed-form oracles against the generic escalation oracle, which solves
//! at `p = n + 1` and reports an error bar from its own certificate.

use bmsdp::oracle::{oracle_geneig, oracle_sdp_via_escalation, oracle_trs};
use bmsdp::{build_family, instances, linalg, ProblemFamily};

fn main() -> bmsdp::Result<()> {
    let mut rng = linalg::rng_from_seed(21);
    println!("{:<8} {:>3} {:>18} {:>18} {:>10} {:>10}", "family", "n", "closed form", "escalation", "diff", "bar");
    for seed in 0..5u64 {
        let n = 3 + seed as usize;
        let problem = instances::geneig_random(&mut rng, n);
        let direct = oracle_geneig(problem.cost_matrix(), &problem.constraints()[0])?;
        let esc = oracle_sdp_via_escalation(&problem, None, seed)?;
        row("geneig", n, direct.f_star, esc.f_star, esc.error_bar);

        let (a, b, c) = instances::trs_random_data(&mut rng, n);
        let direct = oracle_trs(&a, &b, c)?;
        let problem = build_family(ProblemFamily::Trs { a, b, c })?;
        let esc = oracle_sdp_via_escalation(&problem, None, seed)?;
        row("trs", n, direct.f_star, esc.f_star, esc.error_bar);
    }
    Ok(())
}

fn row(family: &str, n: usize, direct: f64, esc: f64, bar: f64) {
    println!(
        "{family:<8} {n:>3} {direct:>18.12} {esc:>18.12} {:>10.1e} {bar:>10.1e}",
        (direct - esc).abs()
    );
}
