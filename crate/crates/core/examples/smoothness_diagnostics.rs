//! Rank diagnostics before solving: span of the constraints, sampled rank of
//! `{A_i Y}`, the Pataki bound and the recommended starting rank. The last
//! problem repeats a constraint, which the diagnostics flag.

use bmsdp::cli::diagnose;
use bmsdp::{instances, linalg, SdpProblem, SymMatrix};
use nalgebra::{DMatrix, DVector};

fn main() -> bmsdp::Result<()> {
    let mut rng = linalg::rng_from_seed(4);
    let dup = SdpProblem::new(
        SymMatrix::from_triplets(3, vec![(1, 0, 1.0), (2, 1, -1.0)])?,
        vec![
            SymMatrix::from_triplets(3, vec![(0, 0, 1.0)])?,
            SymMatrix::from_triplets(3, vec![(1, 1, 1.0), (2, 2, 1.0)])?,
            SymMatrix::from_triplets(3, vec![(0, 0, 1.0)])?,
        ],
        DVector::from_element(3, 1.0),
    )?;
    let cases = [
        ("maxcut n=20", instances::maxcut_gaussian(&mut rng, 20), None),
        ("orthocut q=5 d=3", instances::orthocut_gaussian(&mut rng, 5, 3), None),
        ("spheres 2+3+4", instances::spheres_random(&mut rng, &[2, 3, 4], false), None),
        ("duplicated", dup, Some(DMatrix::from_column_slice(3, 1, &[1.0, 1.0, 0.0]))),
    ];
    for (name, problem, factor) in cases {
        let diag = diagnose(&problem, factor, 5, 4)?;
        println!("{name}: n = {}, m = {}, span rank {}", diag.n, diag.m, diag.span_rank);
        println!(
            "  m' = {:?}, constant rank {}, Pataki {}, recommended p {}",
            diag.smoothness.m_prime, diag.smoothness.constant_rank, diag.pataki_bound, diag.recommended_p
        );
        for w in &diag.warnings {
            println!("  warning: {w}");
        }
    }
    Ok(())
}
