use num_complex::Complex64;
use proptest::prelude::*;
use qcbergman::symbols::{beltrami, jacobian, parse_symbol, Mobius, RadialSymbol, Symbol};

fn symbols() -> impl Strategy<Value = Box<dyn Symbol>> {
    prop_oneof![
        (-3.0..3.0f64).prop_map(|c| Box::new(RadialSymbol::twist(c).unwrap()) as Box<dyn Symbol>),
        (0.3..3.0f64, 0.1..0.9f64)
            .prop_map(|(a, r)| Box::new(RadialSymbol::stretch(a, r).unwrap()) as Box<dyn Symbol>),
        (0.0..0.8f64, 0.0..std::f64::consts::TAU).prop_map(|(m, t)| Box::new(
            Mobius::new(Complex64::from_polar(m, t)).unwrap()
        ) as Box<dyn Symbol>),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn inverse_composes_to_identity(s in symbols(), r in 0.01..0.97f64, t in 0.0..std::f64::consts::TAU) {
        let z = Complex64::from_polar(r, t);
        let w = s.eval(z);
        prop_assert!(w.norm() < 1.0);
        prop_assert!((s.inverse(w) - z).norm() < 1e-12);
        prop_assert!((s.eval(s.inverse(z)) - z).norm() < 1e-12);
    }

    #[test]
    fn sense_preserving_with_subunit_dilatation(s in symbols(), r in 0.01..0.97f64, t in 0.0..std::f64::consts::TAU) {
        let z = Complex64::from_polar(r, t);
        prop_assert!(jacobian(s.as_ref(), z) > 0.0);
        prop_assert!(beltrami(s.as_ref(), z).unwrap().norm() < 1.0);
    }

    #[test]
    fn spec_strings_round_trip(s in symbols(), r in 0.05..0.95f64) {
        let again = parse_symbol(&s.spec()).unwrap();
        let z = Complex64::from_polar(r, 0.7);
        prop_assert_eq!(again.eval(z), s.eval(z));
        prop_assert_eq!(again.family(), s.family());
    }
}
