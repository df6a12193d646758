use std::f64::consts::PI;

use approx::assert_abs_diff_eq;
use proptest::prelude::*;

use qwalk_core::disorder::{sample_coin_field, DisorderCase, DisorderSpec};
use qwalk_core::dispersion::{cos_eps_u1, dispersion, verify_bloch_vs_lattice};
use qwalk_core::eigen::eig;
use qwalk_core::linalg::{det2, multiset_distance, CMatrix, C64};
use qwalk_core::spectrum::{
    classify_eigenvalues, eigendecompose, relation_residual, spectral_pairing_defect, QuasiEnergy, SOLVER_TOL,
};
use qwalk_core::symmetry::{build_symmetry, SymmetryKind};
use qwalk_core::walk::{bloch_matrix, coin2, compose_walk, gainloss2, shift2, CoinField, LatticeSpec, WalkKind};

fn angle() -> impl Strategy<Value = f64> {
    -PI..PI
}

fn kind() -> impl Strategy<Value = WalkKind> {
    prop_oneof![Just(WalkKind::U1Pt), Just(WalkKind::U2Trs)]
}

fn field(n: usize) -> impl Strategy<Value = CoinField> {
    (prop::collection::vec(angle(), n), prop::collection::vec(angle(), n))
        .prop_map(|(a, b)| CoinField::new(a, b).unwrap())
}

proptest! {
    #[test]
    fn elemental_blocks_have_unit_determinant(t in angle(), k in angle(), g in -2.0..2.0f64) {
        for m in [coin2(t), shift2(k), gainloss2(g)] {
            assert_abs_diff_eq!(det2(&m).re, 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(det2(&m).im, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn coin_inverse_is_adjoint(t in angle()) {
        let d = coin2(-t) - coin2(t).adjoint();
        prop_assert!(d.norm() < 1e-15);
    }

    #[test]
    fn bloch_step_has_unit_determinant(kind in kind(), t1 in angle(), t2 in angle(), g in -1.5..1.5f64, k in angle()) {
        let d = bloch_matrix(kind, t1, t2, g, k).determinant();
        prop_assert!((d - C64::new(1.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn bloch_trace_matches_closed_form(kind in kind(), t1 in angle(), t2 in angle(), g in -1.5..1.5f64, k in angle()) {
        let b = bloch_matrix(kind, t1, t2, g, k);
        let closed = dispersion(kind, t1, t2, g, k).cos_eps * 2.0;
        prop_assert!((b.trace() - closed).norm() < 1e-10 * (1.0 + closed.norm()));
    }

    #[test]
    fn u1_relation_even_in_k_and_symmetric_in_coins(t1 in angle(), t2 in angle(), g in -2.0..2.0f64, k in angle()) {
        let a = cos_eps_u1(t1, t2, g, k);
        prop_assert!((a - cos_eps_u1(t1, t2, g, -k)).abs() < 1e-13);
        prop_assert!((a - cos_eps_u1(t2, t1, g, k)).abs() < 1e-13);
        prop_assert!((a - cos_eps_u1(t1, t2, -g, k)).abs() < 1e-13);
    }

    #[test]
    fn lattice_spectrum_matches_bloch_bands(kind in kind(), t1 in angle(), t2 in angle(), g in 0.0..0.5f64, n in 1usize..10) {
        let check = verify_bloch_vs_lattice(kind, t1, t2, g, n, 1e-8).unwrap();
        prop_assert!(check.passed, "mismatch {}", check.max_mismatch);
    }

    #[test]
    fn walk_determinant_is_one(kind in kind(), f in field(4), g in -0.8..0.8f64) {
        let l = LatticeSpec::new(4).unwrap();
        let s = eigendecompose(&compose_walk(kind, &f, g, l).unwrap(), SOLVER_TOL).unwrap();
        prop_assert!((s.eigenvalue_product() - C64::new(1.0, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn time_reversal_survives_any_disorder(f in field(6), g in -1.0..1.0f64) {
        let l = LatticeSpec::new(6).unwrap();
        let u = compose_walk(WalkKind::U2Trs, &f, g, l).unwrap().symmetric_frame().unwrap();
        let r = relation_residual(&u.matrix, &build_symmetry(SymmetryKind::T, l)).unwrap();
        prop_assert!(r < 1e-12, "{r}");
    }

    #[test]
    fn pt_survives_reflection_symmetric_disorder(f in field(7), g in -1.0..1.0f64) {
        let l = LatticeSpec::new(7).unwrap();
        let f = f.symmetrized(l);
        let u = compose_walk(WalkKind::U1Pt, &f, g, l).unwrap().symmetric_frame().unwrap();
        let r = relation_residual(&u.matrix, &build_symmetry(SymmetryKind::PT, l)).unwrap();
        prop_assert!(r < 1e-12, "{r}");
    }

    #[test]
    fn antiunitary_symmetry_pairs_the_spectrum(f in field(5), g in 0.0..0.6f64) {
        let l = LatticeSpec::new(5).unwrap();
        let u = compose_walk(WalkKind::U2Trs, &f, g, l).unwrap().symmetric_frame().unwrap();
        let s = eigendecompose(&u, SOLVER_TOL).unwrap();
        prop_assert!(spectral_pairing_defect(&s.eigenvalues) < 1e-6);
    }

    #[test]
    fn classification_is_monotone_in_tolerance(re in prop::collection::vec(-1.5..1.5f64, 1..20), im in prop::collection::vec(-1.5..1.5f64, 20), lo in 1e-12..1e-3f64, factor in 1.0..1e3f64) {
        let ev: Vec<C64> = re.iter().zip(&im).map(|(&a, &b)| C64::new(a, b)).collect();
        let tight = classify_eigenvalues(&ev, lo).unwrap();
        let loose = classify_eigenvalues(&ev, lo * factor).unwrap();
        prop_assert!(loose.num_complex <= tight.num_complex);
        prop_assert!((0.0..=1.0).contains(&tight.complex_fraction));
    }

    #[test]
    fn quasi_energy_round_trips(r in 0.1..3.0f64, phi in angle()) {
        let lambda = C64::from_polar(r, phi);
        let q = QuasiEnergy::from_eigenvalue(lambda).unwrap();
        prop_assert!((q.eigenvalue() - lambda).norm() < 1e-12 * r.max(1.0));
        prop_assert!(q.epsilon.re > -PI && q.epsilon.re <= PI);
        prop_assert!((q.epsilon.im - r.ln()).abs() < 1e-13);
    }

    #[test]
    fn eigensolver_residuals_on_random_matrices(n in 1usize..24, seed in any::<u64>()) {
        let mut state = seed | 1;
        let mut next = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let m = CMatrix::from_fn(n, n, |_, _| C64::new(next(), next()));
        let (vals, vecs) = eig(&m).unwrap();
        let scale = m.norm();
        for j in 0..n {
            let v = vecs.column(j).into_owned();
            let r = (&m * &v - v.map(|x| x * vals[j])).norm() / v.norm();
            prop_assert!(r < 1e-10 * scale.max(1.0), "column {j}: {r}");
        }
        let trace: C64 = (0..n).map(|i| m[(i, i)]).sum();
        let sum: C64 = vals.iter().sum();
        prop_assert!((trace - sum).norm() < 1e-10 * scale.max(1.0));
    }

    #[test]
    fn disorder_samples_stay_in_their_box(seed in any::<u64>(), mean1 in angle(), mean2 in angle(), idx in 0usize..1000) {
        let spec = DisorderSpec::new(DisorderCase::D, mean1, mean2, 1.1, 16, seed).unwrap();
        let f = sample_coin_field(&spec, idx).unwrap();
        let hw = spec.half_width;
        prop_assert!(f.theta1.iter().all(|t| (t - mean1).abs() <= hw + 1e-12));
        prop_assert!(f.theta2.iter().all(|t| (t - mean2).abs() <= hw + 1e-12));
        prop_assert_eq!(f, sample_coin_field(&spec, idx).unwrap());
    }

    #[test]
    fn multiset_distance_is_permutation_invariant(v in prop::collection::vec((-2.0..2.0f64, -2.0..2.0f64), 1..12), rot in 0usize..12) {
        let a: Vec<C64> = v.iter().map(|&(x, y)| C64::new(x, y)).collect();
        let mut b = a.clone();
        let len = b.len();
        b.rotate_left(rot % len);
        prop_assert_eq!(multiset_distance(&a, &b), 0.0);
    }
}
