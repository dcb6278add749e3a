use proptest::prelude::*;

use qcf_core::charfn::{cf_closed, cf_spectral, JumpConfig};
use qcf_core::numerics::{kummer_1f1_series, QuadratureConfig};
use qcf_core::resolvent::matrix_element;
use qcf_core::{Complex64, Observable};

fn observable() -> impl Strategy<Value = Observable> {
    prop::sample::select(Observable::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn closed_forms_are_characteristic(o in observable(), t in -4.0f64..4.0) {
        let a = cf_closed(o, t);
        let b = cf_closed(o, -t);
        prop_assert!((a - b.conj()).norm() < 1e-15);
        prop_assert!(a.norm() <= 1.0 + 1e-15);
    }

    #[test]
    fn spectral_matches_closed_form(t in -20.0f64..20.0) {
        let s = cf_spectral(Observable::Harmonic, t).unwrap();
        prop_assert!((s.value - cf_closed(Observable::Harmonic, t)).norm() < 1e-10);
    }

    #[test]
    fn position_element_herglotz(x in -6.0f64..6.0, eps in 1e-3f64..2.0) {
        let cfg = QuadratureConfig::default();
        let up = matrix_element(Observable::X, Complex64::new(x, eps), &cfg).unwrap();
        let down = matrix_element(Observable::X, Complex64::new(x, -eps), &cfg).unwrap();
        prop_assert!(up.value.im < 0.0);
        prop_assert!((down.value - up.value.conj()).norm() < 1e-8);
        prop_assert!(up.error_estimate >= 0.0);
    }

    #[test]
    fn dilation_element_conjugate_symmetric(x in -5.0f64..5.0, y in 0.01f64..0.95) {
        let cfg = QuadratureConfig::default();
        let up = matrix_element(Observable::XPplusPX, Complex64::new(x, y), &cfg).unwrap();
        let down = matrix_element(Observable::XPplusPX, Complex64::new(x, -y), &cfg).unwrap();
        prop_assert!((down.value - up.value.conj()).norm() < 1e-8);
        prop_assert!(up.value.im < 0.0);
    }

    #[test]
    fn kummer_polynomial_terms(n in 0usize..30, x in 0.0f64..20.0) {
        let y = Complex64::new(-(n as f64), 0.0);
        let s = kummer_1f1_series(y, Complex64::new(0.5, 0.0), x).unwrap();
        prop_assert_eq!(s.terms, n + 1);
    }

    #[test]
    fn jump_schedules_validated(a in 0.01f64..0.99, b in 0.001f64..0.99) {
        let cfg = JumpConfig::new(vec![a, b], 12.0, QuadratureConfig::default());
        prop_assert_eq!(cfg.is_ok(), b < a);
    }

    #[test]
    fn observable_tokens_parse(o in observable()) {
        prop_assert_eq!(o.token().to_uppercase().parse::<Observable>().unwrap(), o);
    }
}
