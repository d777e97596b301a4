//! Cross-module properties over random couplings.

use proptest::prelude::*;
use pseudofermion::algebra::{
    build_biorthogonal, build_hamiltonian, hamiltonian_spectrum, FiniteEigensystem,
};
use pseudofermion::figure::{containment_check, hull_boundary};
use pseudofermion::fock::{
    build_fock, build_pseudo_fermions, diagonal_form_residual, physical_inner_fock,
};
use pseudofermion::make_params;
use pseudofermion::metric::{build_metric, physical_inner};
use pseudofermion::thermo::{exact_expectations, DEFAULT_TAIL_TOL};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn low_levels_follow_the_ladder(gamma in -1.2f64..1.2) {
        let p = make_params(gamma).unwrap();
        let ev = hamiltonian_spectrum(&p, 80, 5).unwrap();
        for (n, e) in ev.iter().enumerate() {
            let want = p.mode_energy(n + 1).unwrap();
            prop_assert!((e - want).abs() <= 1e-10 * want);
        }
    }

    #[test]
    fn ladder_vectors_are_metric_orthogonal(gamma in 0.05f64..0.6) {
        let p = make_params(gamma).unwrap();
        let sys = build_biorthogonal(&p, 60, 3, 1e-8).unwrap();
        let m = build_metric(&p, 60).unwrap();
        let g01 = physical_inner(&m, &sys.right_vectors[0], &sys.right_vectors[1]).unwrap();
        let g00 = physical_inner(&m, &sys.right_vectors[0], &sys.right_vectors[0]).unwrap();
        prop_assert!(g00 > 0.0);
        prop_assert!(g01.abs() <= 1e-8 * g00, "{g01} vs {g00}");
    }

    #[test]
    fn pseudo_fermions_diagonalize(gamma in -0.9f64..0.9, modes in 2usize..6) {
        let p = make_params(gamma).unwrap();
        let space = build_fock(modes).unwrap();
        let sys = FiniteEigensystem::new(&build_hamiltonian(&p, modes).unwrap().entries).unwrap();
        let pf = build_pseudo_fermions(&space, &sys, 1e-9).unwrap();
        prop_assert!(diagonal_form_residual(&space, &p, &pf).unwrap() <= 1e-9);
        let theta = sys.metric();
        let a = pf.state(0b11);
        let norm = physical_inner_fock(&space, &theta, &a, &a, 2).unwrap();
        prop_assert!((norm.re - 1.0).abs() <= 1e-8 && norm.im.abs() <= 1e-8);
    }

    #[test]
    fn exact_points_sit_above_the_hull(gamma in 0.0f64..1.5, beta in 0.01f64..2.0, mu in -10.0f64..30.0) {
        let p = make_params(gamma).unwrap();
        let t = exact_expectations(&p, beta, mu, DEFAULT_TAIL_TOL).unwrap();
        let hull = hull_boundary(&p, t.number.ceil() as usize + 1).unwrap();
        let r = containment_check(&[t], &hull, 1e-9).unwrap();
        prop_assert!(r.passed(), "{:?}", r);
    }
}
