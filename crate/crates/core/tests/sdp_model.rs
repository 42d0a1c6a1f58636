mod common;

use bmsdp::io::{parse_problem, problem_to_json, ProblemFile};
use bmsdp::linalg;
use bmsdp::model::{check_smoothness, check_smoothness_at};
use bmsdp::{build_family, instances, pataki_bound, Error, FamilyTag, ProblemFamily, SdpProblem, SymMatrix};
use common::naive_inner;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

fn random_sym(rng: &mut linalg::SeededRng, n: usize) -> DMatrix<f64> {
    let g = linalg::gaussian_matrix(rng, n, n);
    &g + g.transpose()
}

#[test]
fn apply_a_on_identity_and_zero() {
    let prob = instances::maxcut_cycle(6);
    let ones = prob.apply_a(&SymMatrix::identity(6)).unwrap();
    assert_eq!(ones, DVector::from_element(6, 1.0));
    let zero = prob.apply_a(&SymMatrix::zeros(6)).unwrap();
    assert_eq!(zero, DVector::zeros(6));
}

#[test]
fn apply_a_matches_double_loop() {
    let mut rng = linalg::rng_from_seed(11);
    let prob = instances::random_generic(&mut rng, 3, 4);
    let x = random_sym(&mut rng, 3);
    let got = prob.apply_a(&SymMatrix::from_dense(&x).unwrap()).unwrap();
    for (i, a) in prob.constraints().iter().enumerate() {
        let want = naive_inner(&a.to_dense(), &x);
        assert!((got[i] - want).abs() <= 1e-14 * (1.0 + want.abs()));
    }
}

#[test]
fn apply_a_dimension_mismatch() {
    let prob = instances::maxcut_cycle(4);
    assert!(matches!(
        prob.apply_a(&SymMatrix::identity(5)),
        Err(Error::DimensionMismatch { .. })
    ));
}

#[test]
fn adjoint_examples() {
    let mut rng = linalg::rng_from_seed(2);
    let prob = instances::random_generic(&mut rng, 4, 3);
    let e1 = DVector::from_vec(vec![1.0, 0.0, 0.0]);
    assert_eq!(prob.apply_a_adjoint(&e1).unwrap().to_dense(), prob.constraints()[0].to_dense());
    assert_eq!(prob.apply_a_adjoint(&DVector::zeros(3)).unwrap().to_dense(), DMatrix::zeros(4, 4));
    assert!(prob.apply_a_adjoint(&DVector::zeros(2)).is_err());
}

#[test]
fn family_orthocut_maxcut() {
    let prob = build_family(ProblemFamily::OrthoCut {
        d: 1,
        cost: SymMatrix::zeros(4),
    })
    .unwrap();
    assert_eq!(prob.m(), 4);
    for (i, a) in prob.constraints().iter().enumerate() {
        assert_eq!(a.triplets(), vec![(i, i, 1.0)]);
    }
    assert_eq!(prob.rhs(), &DVector::from_element(4, 1.0));
    assert_eq!(prob.trace_bound(), Some(4.0));
    assert!(prob.constant_trace());
    assert_eq!(prob.identity_in_range(), Some(true));
}

#[test]
fn family_trs_lift() {
    let (a, b, c) = instances::trs_suboptimal_data();
    let prob = build_family(ProblemFamily::Trs { a, b, c }).unwrap();
    assert_eq!(prob.m(), 2);
    assert_eq!(prob.constraints()[0].to_dense(), DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 1.0, 0.0])));
    assert_eq!(prob.constraints()[1].to_dense(), DMatrix::from_diagonal(&DVector::from_vec(vec![0.0, 0.0, 1.0])));
    assert_eq!(prob.rhs(), &DVector::from_vec(vec![1.0, 1.0]));
    assert!(prob.constant_trace());
}

#[test]
fn family_geneig_identity() {
    let prob = build_family(ProblemFamily::GenEig {
        c: SymMatrix::from_diagonal(&[1.0, 2.0, 3.0]),
        b: SymMatrix::identity(3),
    })
    .unwrap();
    assert_eq!(prob.m(), 1);
    assert_eq!(prob.constraints()[0].to_dense(), DMatrix::identity(3, 3));
    assert_eq!(prob.rhs()[0], 1.0);
    assert!(prob.constant_trace());

    let mut rng = linalg::rng_from_seed(5);
    let general = instances::geneig_random(&mut rng, 4);
    assert!(!general.constant_trace());
}

#[test]
fn family_errors() {
    let not_pd = build_family(ProblemFamily::GenEig {
        c: SymMatrix::identity(2),
        b: SymMatrix::from_diagonal(&[1.0, -1.0]),
    });
    assert!(matches!(not_pd, Err(Error::NotPositiveDefinite)));
    let indivisible = build_family(ProblemFamily::OrthoCut {
        d: 2,
        cost: SymMatrix::zeros(5),
    });
    assert!(matches!(indivisible, Err(Error::InvalidFamily(_))));
}

#[test]
fn pataki_examples() {
    assert_eq!(pataki_bound(1), 1);
    assert_eq!(pataki_bound(3), 2);
    assert_eq!(pataki_bound(12), 4);
}

#[test]
fn smoothness_orthocut_and_trs() {
    let mut rng = linalg::rng_from_seed(8);
    for d in 1..=3 {
        let q = 3;
        let prob = instances::orthocut_gaussian(&mut rng, q, d);
        for p in d..=d + 2 {
            let rep = check_smoothness(&prob, p, 4, 17).unwrap();
            assert!(rep.constant_rank);
            assert_eq!(rep.m_prime, Some(q * d * (d + 1) / 2));
        }
    }
    let trs = instances::trs_random(&mut rng, 5);
    for p in 1..=4 {
        assert_eq!(check_smoothness(&trs, p, 4, 3).unwrap().m_prime, Some(2));
    }
}

fn duplicated_problem() -> (SdpProblem, DMatrix<f64>) {
    let a0 = SymMatrix::from_triplets(3, vec![(0, 0, 1.0)]).unwrap();
    let a1 = SymMatrix::from_triplets(3, vec![(1, 1, 1.0)]).unwrap();
    let c = SymMatrix::from_triplets(3, vec![(1, 0, 1.0), (2, 1, -1.0)]).unwrap();
    let prob = SdpProblem::new(c, vec![a0.clone(), a1, a0], DVector::from_element(3, 1.0)).unwrap();
    let y = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 0.3, 0.4]);
    (prob, y)
}

#[test]
fn smoothness_with_duplicate() {
    let (prob, y) = duplicated_problem();
    let mut rng = linalg::rng_from_seed(1);
    let rep = check_smoothness_at(&prob, &[y], None, &mut rng);
    assert!(rep.constant_rank);
    assert_eq!(rep.m_prime, Some(prob.m() - 1));
    assert_eq!(prob.constraint_span_rank(), 2);
    let combo = prob.dependent_combination().unwrap();
    assert!(combo.starts_with("1.000000·A[0] - 1.000000·A[2]"), "{combo}");
    assert!(matches!(
        prob.feasible_point(2, &mut rng),
        Err(Error::NoFeasiblePoint(_))
    ));
}

#[test]
fn identity_in_range_detection() {
    let mut rng = linalg::rng_from_seed(4);
    let few = instances::random_generic(&mut rng, 4, 2);
    assert_eq!(few.identity_in_range(), Some(false));
    assert!(!few.constant_trace());
    // diagonal constraints sum to the identity
    let a: Vec<SymMatrix> = (0..3)
        .map(|i| SymMatrix::from_triplets(3, vec![(i, i, 2.0)]).unwrap())
        .collect();
    let prob = SdpProblem::new(SymMatrix::identity(3), a, DVector::from_element(3, 2.0)).unwrap();
    assert_eq!(prob.identity_in_range(), Some(true));
    assert!(prob.constant_trace());
}

#[test]
fn constant_trace_claim_is_checked() {
    let mut rng = linalg::rng_from_seed(4);
    let prob = instances::random_generic(&mut rng, 4, 2);
    assert!(prob.with_constant_trace(true).is_err());
}

#[test]
fn orthocut_trace_is_n() {
    let mut rng = linalg::rng_from_seed(6);
    let prob = instances::orthocut_gaussian(&mut rng, 4, 2);
    for p in 2..=5 {
        let y = prob.feasible_point(p, &mut rng).unwrap();
        assert!(((&y * y.transpose()).trace() - 8.0).abs() <= 1e-12);
    }
}

#[test]
fn duplicate_triplets_rejected() {
    assert!(SymMatrix::from_triplets(2, vec![(1, 0, 1.0), (1, 0, 2.0)]).is_err());
    assert!(SymMatrix::from_triplets(2, vec![(0, 1, 1.0)]).is_err());
    assert!(SymMatrix::from_triplets(2, vec![(2, 0, 1.0)]).is_err());
}

#[test]
fn problem_file_round_trip_and_paths() {
    let mut rng = linalg::rng_from_seed(3);
    let (prob, _) = instances::random_generic_feasible(&mut rng, 4, 3, 2);
    let text = problem_to_json(&prob);
    let back = parse_problem(&text).unwrap();
    assert_eq!(back.constraints().len(), 3);
    for (a, b) in back.constraints().iter().zip(prob.constraints()) {
        assert_eq!(a.to_dense(), b.to_dense());
    }
    assert_eq!(back.rhs(), prob.rhs());

    let mut file: ProblemFile = serde_json::from_str(&text).unwrap();
    file.a.pop();
    let err = file.into_problem().unwrap_err().to_string();
    assert!(err.starts_with("A:"), "{err}");

    let missing = text.replacen("\"b\"", "\"bb\"", 1);
    let err = parse_problem(&missing).unwrap_err().to_string();
    assert!(err.contains("`b`"), "{err}");

    let tagged = problem_to_json(&instances::maxcut_cycle(4));
    assert!(tagged.contains("\"kind\": \"orthocut\""));
    let back = parse_problem(&tagged).unwrap();
    assert_eq!(back.family(), Some(&FamilyTag::OrthoCut { d: 1 }));
}

fn family_strategy() -> impl Strategy<Value = (u64, usize)> {
    (any::<u64>(), 0usize..4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn adjoint_identity(seed in any::<u64>(), n in 1usize..7, m in 1usize..6) {
        let mut rng = linalg::rng_from_seed(seed);
        let prob = instances::random_generic(&mut rng, n, m);
        let x = random_sym(&mut rng, n);
        let nu = linalg::gaussian_vector(&mut rng, m);
        let lhs = naive_inner(&prob.apply_a_adjoint(&nu).unwrap().to_dense(), &x);
        let rhs = nu.dot(&prob.apply_a(&SymMatrix::from_dense(&x).unwrap()).unwrap());
        let scale: f64 = prob.constraints().iter().zip(nu.iter())
            .map(|(a, v)| v.abs() * a.frobenius_norm()).sum::<f64>() * x.norm();
        prop_assert!((lhs - rhs).abs() <= 1e-14 * scale.max(1.0));
    }

    #[test]
    fn feasible_points_are_feasible((seed, k) in family_strategy()) {
        let mut rng = linalg::rng_from_seed(seed);
        let (_, prob, y) = common::family_point(&mut rng, k);
        prop_assert!(prob.constraint_residual(&y).amax() <= 1e-12);
    }

    #[test]
    fn pataki_is_unique(m in 1usize..100_000) {
        let p = pataki_bound(m);
        prop_assert!(p * (p + 1) / 2 <= m && m < (p + 1) * (p + 2) / 2);
    }

    #[test]
    fn symmetry_is_structural(seed in any::<u64>(), n in 1usize..8, sparse in any::<bool>()) {
        let mut rng = linalg::rng_from_seed(seed);
        let dense = random_sym(&mut rng, n);
        let mut s = SymMatrix::from_lower(&dense).unwrap();
        if sparse {
            s = s.to_sparse();
        }
        let full = s.to_dense();
        prop_assert_eq!(&full, &full.transpose());
    }
}
