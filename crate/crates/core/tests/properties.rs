use proptest::prelude::*;
use std::sync::OnceLock;
use zetadist_core::arith::{prime_powers_up_to, von_mangoldt, PrimePowerTable};
use zetadist_core::extremal::{selberg_interval, Kind};
use zetadist_core::lab::{disk_report, LineSampleSet};
use zetadist_core::selberg::{weight, SelbergWeightSpec};
use zetadist_core::torus::{chf_product, torus_moment_exact, TorusModel};
use zetadist_core::variance::{make_context, thresholds};
use zetadist_core::zeta::zeta;
use zetadist_core::Complex64;

fn table() -> &'static PrimePowerTable {
    static T: OnceLock<PrimePowerTable> = OnceLock::new();
    T.get_or_init(|| prime_powers_up_to(1e5).unwrap())
}

fn model() -> &'static TorusModel {
    static M: OnceLock<TorusModel> = OnceLock::new();
    M.get_or_init(|| TorusModel::new(0.6, 150.0).unwrap())
}

fn gaussian_set() -> &'static LineSampleSet {
    static S: OnceLock<LineSampleSet> = OnceLock::new();
    S.get_or_init(|| {
        let ctx = make_context(0.6, 1e6, 1.0).unwrap();
        LineSampleSet::synthetic_gaussian(ctx, 4000, 3)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn von_mangoldt_positive_exactly_on_table(n in 1u64..100_000) {
        let listed = table().entries().binary_search_by_key(&n, |e| e.value).is_ok();
        prop_assert_eq!(von_mangoldt(n) > 0.0, listed);
    }

    #[test]
    fn weight_stays_in_unit_interval(x in 10.0f64..1e3, frac in 0.0f64..1.0) {
        let spec = SelbergWeightSpec::new(x).unwrap();
        let n = 1.0 + frac * (x * x * x * 1.5);
        let w = weight(n, &spec);
        prop_assert!((0.0..=1.0).contains(&w), "{}", w);
    }

    #[test]
    fn zeta_is_conjugate_symmetric(sigma in 0.5f64..3.0, t in 1.0f64..500.0) {
        let s = Complex64::new(sigma, t);
        let a = zeta(s, 1e-10).unwrap().value;
        let b = zeta(s.conj(), 1e-10).unwrap().value;
        prop_assert!((a - b.conj()).norm() <= 2e-10);
    }

    #[test]
    fn chf_is_hermitian_and_bounded(u in -3.0f64..3.0, v in -3.0f64..3.0) {
        let a = chf_product(model(), u, v, 64).unwrap();
        let b = chf_product(model(), -u, -v, 64).unwrap();
        prop_assert!((a - b.conj()).norm() < 1e-12);
        prop_assert!(a.norm() <= 1.0 + 1e-12);
    }

    #[test]
    fn majorant_dominates_and_minorant_is_dominated(
        a in -2.0f64..0.0,
        len in 0.1f64..3.0,
        delta in 0.5f64..6.0,
        x in -10.0f64..10.0,
    ) {
        let b = a + len;
        let up = selberg_interval(a, b, delta, Kind::Majorant, 500).unwrap();
        let down = selberg_interval(a, b, delta, Kind::Minorant, 500).unwrap();
        let ind = up.indicator(x);
        prop_assert!(up.eval(x) >= ind - up.tolerance());
        prop_assert!(down.eval(x) <= ind + down.tolerance());
    }

    #[test]
    fn disk_fraction_is_monotone(r in 0.0f64..4.0, dr in 0.0f64..1.0) {
        let small = disk_report(gaussian_set(), r).unwrap();
        let big = disk_report(gaussian_set(), r + dr).unwrap();
        prop_assert!(small.empirical_fraction <= big.empirical_fraction);
        prop_assert!(small.gaussian_prediction <= big.gaussian_prediction);
    }

    #[test]
    fn thresholds_are_reproducible(sigma in 0.51f64..1.5, log_t in 6.0f64..25.0) {
        let height = log_t.exp();
        prop_assume!((2.0 * sigma - 1.0) * log_t > 1.0);
        let c = make_context(sigma, height, 1.0).unwrap();
        let th = thresholds(c.sigma, c.height, c.variance, c.k_const);
        prop_assert_eq!(th.psi.to_bits(), c.psi.to_bits());
        prop_assert_eq!(th.omega.to_bits(), c.omega.to_bits());
        prop_assert_eq!(th.b_omega.to_bits(), c.b_omega.to_bits());
        prop_assert_eq!(th.t_omega.to_bits(), c.t_omega.to_bits());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn unbalanced_moments_vanish(m in 1usize..5) {
        let zero = Complex64::new(0.0, 0.0);
        prop_assert_eq!(torus_moment_exact(model(), m, 0).unwrap(), zero);
        prop_assert_eq!(torus_moment_exact(model(), 0, m).unwrap(), zero);
    }
}
