mod common;

use bmsdp::linalg;
use bmsdp::oracle::{oracle_geneig, oracle_geneig_sqrt, oracle_sdp_via_escalation, oracle_trs, OracleMethod, OracleResult};
use bmsdp::{build_family, instances, ProblemFamily, SdpProblem, SymMatrix};
use nalgebra::{DMatrix, DVector};

fn assert_witness(problem: &SdpProblem, res: &OracleResult) {
    let x = res.x_star.as_ref().expect("witness").to_dense();
    let residual = problem.apply_a_dense(&x) - problem.rhs();
    assert!(residual.amax() <= 1e-9 * (1.0 + problem.rhs().amax()), "residual {}", residual.amax());
    let value = common::naive_inner(&problem.cost_dense().clone(), &x);
    assert!((value - res.f_star).abs() <= 1e-9 * (1.0 + res.f_star.abs()), "{value} vs {}", res.f_star);
    let eig = x.symmetric_eigen().eigenvalues.min();
    assert!(eig >= -1e-9, "witness not PSD: {eig}");
}

fn trs_problem(a: &SymMatrix, b: &DVector<f64>, c: f64) -> SdpProblem {
    build_family(ProblemFamily::Trs {
        a: a.clone(),
        b: b.clone(),
        c,
    })
    .unwrap()
}

#[test]
fn geneig_diagonal_pencil() {
    let res = oracle_geneig(&SymMatrix::from_diagonal(&[1.0, 2.0, 3.0]), &SymMatrix::identity(3)).unwrap();
    assert!((res.f_star - 1.0).abs() <= 1e-14);
    let x = res.x.unwrap();
    assert!((x[0].abs() - 1.0).abs() <= 1e-14 && x[1].abs() <= 1e-14 && x[2].abs() <= 1e-14);
}

#[test]
fn geneig_identity_cost() {
    for seed in 0..10 {
        let mut rng = linalg::rng_from_seed(seed);
        let b = instances::random_spd(&mut rng, 6);
        // largest eigenvalue of B by power iteration
        let bd = b.to_dense();
        let mut v = DVector::from_element(6, 1.0);
        let mut top = 0.0;
        for _ in 0..5000 {
            let w = &bd * &v;
            top = w.norm();
            v = w / top;
        }
        let res = oracle_geneig(&SymMatrix::identity(6), &b).unwrap();
        assert!((res.f_star - 1.0 / top).abs() <= 1e-10, "seed {seed}");
    }
}

#[test]
fn geneig_routes_agree() {
    for seed in 0..20 {
        let mut rng = linalg::rng_from_seed(seed);
        let prob = instances::geneig_random(&mut rng, 5);
        let c = prob.cost_matrix();
        let b = &prob.constraints()[0];
        let chol = oracle_geneig(c, b).unwrap();
        let sqrt = oracle_geneig_sqrt(c, b).unwrap();
        assert!((chol.f_star - sqrt.f_star).abs() <= 1e-10 * (1.0 + chol.f_star.abs()), "seed {seed}");
        assert_ne!(chol.method, sqrt.method);
        assert_witness(&prob, &chol);
        assert_witness(&prob, &sqrt);
    }
}

#[test]
fn geneig_rejects_indefinite_b() {
    assert!(oracle_geneig(&SymMatrix::identity(2), &SymMatrix::from_diagonal(&[1.0, -1.0])).is_err());
    assert!(oracle_geneig_sqrt(&SymMatrix::identity(2), &SymMatrix::from_diagonal(&[1.0, 0.0])).is_err());
}

#[test]
fn trs_trivial_cases() {
    let zero = DVector::zeros(3);
    let res = oracle_trs(&SymMatrix::identity(3), &zero, 0.0).unwrap();
    assert!((res.f_star - 1.0).abs() <= 1e-14);
    let x = DVector::from_vec(res.x.unwrap());
    assert!((x.norm() - 1.0).abs() <= 1e-14);

    let res = oracle_trs(&SymMatrix::from_diagonal(&[-1.0, 1.0]), &DVector::zeros(2), 0.0).unwrap();
    assert!((res.f_star + 1.0).abs() <= 1e-14);
    let x = res.x.unwrap();
    assert!((x[0].abs() - 1.0).abs() <= 1e-14 && x[1].abs() <= 1e-14);
}

#[test]
fn trs_matches_sampling() {
    for seed in 0..6 {
        let mut rng = linalg::rng_from_seed(seed);
        let n = 2 + seed as usize;
        let (a, b, c) = instances::trs_random_data(&mut rng, n);
        let res = oracle_trs(&a, &b, c).unwrap();
        let (brute, _) = common::trs_brute_force(&a.to_dense(), &b, c, 1_000_000, 1000 + seed);
        assert!((res.f_star - brute).abs() <= 1e-6, "n={n}: {} vs {brute}", res.f_star);
        assert_witness(&trs_problem(&a, &b, c), &res);
    }
}

#[test]
fn trs_hard_case_matches_sampling() {
    for seed in 0..4 {
        let mut rng = linalg::rng_from_seed(50 + seed);
        let (a, b, c) = instances::trs_hard_data(&mut rng, 5, 1 + seed as usize % 2);
        let res = oracle_trs(&a, &b, c).unwrap();
        assert_eq!(res.method, OracleMethod::TrsHardCase);
        let (brute, _) = common::trs_brute_force(&a.to_dense(), &b, c, 1_000_000, 2000 + seed);
        assert!((res.f_star - brute).abs() <= 1e-6, "seed {seed}: {} vs {brute}", res.f_star);
        assert_witness(&trs_problem(&a, &b, c), &res);
    }
}

#[test]
fn triangle_maxcut() {
    let prob = instances::maxcut_from_laplacian(&instances::complete_laplacian(3));
    let res = oracle_sdp_via_escalation(&prob, None, 0).unwrap();
    let grid = common::maxcut3_grid(prob.cost_dense());
    assert!((res.f_star - grid).abs() <= 1e-6, "{} vs {grid}", res.f_star);
    assert!((res.f_star + 2.25).abs() <= 1e-6);
    assert_witness(&prob, &res);

    let mut rng = linalg::rng_from_seed(3);
    for _ in 0..5 {
        let prob = instances::maxcut_gaussian(&mut rng, 3);
        let res = oracle_sdp_via_escalation(&prob, None, 1).unwrap();
        let grid = common::maxcut3_grid(prob.cost_dense());
        assert!((res.f_star - grid).abs() <= 1e-6 + res.error_bar, "{} vs {grid}", res.f_star);
    }
}

#[test]
fn cost_in_range_value() {
    let nu = DVector::from_vec(vec![0.5, -1.0, 2.0, 0.25, 1.0]);
    let prob = build_family(ProblemFamily::Spheres {
        sizes: vec![2, 3],
        homogeneous: true,
        cost: SymMatrix::from_diagonal(&[0.5, 0.5, -1.0, -1.0, -1.0]),
    })
    .unwrap();
    let res = oracle_sdp_via_escalation(&prob, None, 2).unwrap();
    assert!((res.f_star - (0.5 * 1.0 - 1.0 * 1.0)).abs() <= 1e-12);
    assert!(res.error_bar <= 1e-12);

    let ortho = build_family(ProblemFamily::OrthoCut {
        d: 1,
        cost: SymMatrix::from_diagonal(nu.as_slice()),
    })
    .unwrap();
    let res = oracle_sdp_via_escalation(&ortho, None, 3).unwrap();
    assert!((res.f_star - nu.dot(ortho.rhs())).abs() <= 1e-12);
}

#[test]
fn escalation_needs_radius() {
    let mut rng = linalg::rng_from_seed(4);
    let (prob, _) = instances::random_generic_feasible(&mut rng, 4, 2, 2);
    assert!(oracle_sdp_via_escalation(&prob, None, 0).is_err());
}

#[test]
fn geneig_agrees_with_escalation() {
    for seed in 0..30 {
        let mut rng = linalg::rng_from_seed(400 + seed);
        let n = 2 + (seed as usize % 5);
        let prob = instances::geneig_random(&mut rng, n);
        let direct = oracle_geneig(prob.cost_matrix(), &prob.constraints()[0]).unwrap();
        let esc = oracle_sdp_via_escalation(&prob, None, seed).unwrap();
        let slack = esc.error_bar + 1e-9 * (1.0 + direct.f_star.abs());
        assert!((esc.f_star - direct.f_star).abs() <= slack, "seed {seed}: {} vs {}", esc.f_star, direct.f_star);
        assert_witness(&prob, &esc);
    }
}

#[test]
fn trs_agrees_with_escalation() {
    for seed in 0..30 {
        let mut rng = linalg::rng_from_seed(500 + seed);
        let n = 2 + (seed as usize % 5);
        let (a, b, c) = if seed % 3 == 0 {
            instances::trs_hard_data(&mut rng, n.max(3), 1)
        } else {
            instances::trs_random_data(&mut rng, n)
        };
        let direct = oracle_trs(&a, &b, c).unwrap();
        let prob = trs_problem(&a, &b, c);
        let esc = oracle_sdp_via_escalation(&prob, None, seed).unwrap();
        let slack = esc.error_bar + 1e-9 * (1.0 + direct.f_star.abs());
        assert!((esc.f_star - direct.f_star).abs() <= slack, "seed {seed}: {} vs {}", esc.f_star, direct.f_star);
        assert_witness(&prob, &direct);
        assert_witness(&prob, &esc);
    }
}

#[test]
fn escalation_witness_is_feasible() {
    let mut rng = linalg::rng_from_seed(9);
    for prob in [
        instances::maxcut_gaussian(&mut rng, 7),
        instances::orthocut_gaussian(&mut rng, 3, 2),
        instances::spheres_random(&mut rng, &[2, 3], false),
    ] {
        let res = oracle_sdp_via_escalation(&prob, None, 5).unwrap();
        assert_witness(&prob, &res);
        let dense: DMatrix<f64> = res.x_star.unwrap().to_dense();
        assert_eq!(dense.nrows(), prob.n());
    }
}
