use proptest::prelude::*;
use qcbergman::certificates::{
    build_ledger, check_conformal_core, check_dilatation, ConstantsLedger, LedgerOptions,
    MarginGrid, Verdict,
};
use qcbergman::estimate::Estimate;
use qcbergman::symbols::{parse_symbol, Identity, RadialSymbol};
use qcbergman::weights::Weight;

fn scaled(l: &ConstantsLedger, k: [f64; 4]) -> ConstantsLedger {
    let up = |e: Option<Estimate>, f: f64| {
        e.map(|e| Estimate {
            value: e.value * f,
            ..e
        })
    };
    ConstantsLedger {
        d_lp: up(l.d_lp, k[0]),
        d_m: up(l.d_m, k[1]),
        d_phi: up(l.d_phi, k[2]),
        d_psi: up(l.d_psi, k[3]),
        ..l.clone()
    }
}

fn small_opts() -> LedgerOptions {
    LedgerOptions {
        basis: 32,
        n_r: 96,
        n_theta: 256,
        ..Default::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn enlarging_constants_never_creates_a_pass(
        c in 0.0..2.0f64,
        k in prop::array::uniform4(1.0..3.0f64),
    ) {
        let w = Weight::standard(0.0).unwrap();
        let s = RadialSymbol::twist(c).unwrap();
        let base = build_ledger(&s, &w, &small_opts()).unwrap();
        let grid = MarginGrid::graded(100, 32, &[]);
        let before = check_dilatation(&s, &w, &base, &grid).unwrap();
        let after = check_dilatation(&s, &w, &scaled(&base, k), &grid).unwrap();
        for (m0, m1) in before.margins.iter().zip(&after.margins) {
            prop_assert!(m1.min_margin <= m0.min_margin + 1e-15);
        }
        prop_assert!(!(after.passed() && !before.passed()));
    }
}

#[test]
fn exponential_weight_identity_passes() {
    let w = Weight::exponential(1.0, 1.0).unwrap();
    let ledger = build_ledger(&Identity, &w, &small_opts()).unwrap();
    let rep = check_dilatation(&Identity, &w, &ledger, &MarginGrid::graded(200, 16, &[])).unwrap();
    assert_eq!(rep.verdict, Verdict::Pass);
    assert_eq!(rep.rigor, "numerical-evidence");
    assert!(rep.caveat.is_some());
}

#[test]
fn stretch_violation_is_located_inside_the_stretched_disc() {
    let w = Weight::standard(0.0).unwrap();
    let s = RadialSymbol::stretch(1.6, 0.5).unwrap();
    let ledger = build_ledger(&s, &w, &small_opts()).unwrap();
    let rep = check_dilatation(&s, &w, &ledger, &MarginGrid::for_symbol(&s)).unwrap();
    assert_eq!(rep.verdict, Verdict::Fail);
    let worst = rep
        .margins
        .iter()
        .min_by(|a, b| a.min_margin.total_cmp(&b.min_margin))
        .unwrap();
    assert!(worst.at_re.hypot(worst.at_im) <= 0.5 + 1e-12, "{worst:?}");
}

#[test]
fn symbol_moving_the_origin_fails_the_core_hypothesis() {
    let w = Weight::standard(0.0).unwrap();
    let s = parse_symbol("mobius:0.3,0").unwrap();
    let ledger = build_ledger(s.as_ref(), &w, &small_opts()).unwrap();
    let rep = check_conformal_core(s.as_ref(), &w, 2.0, &ledger).unwrap();
    assert_eq!(rep.verdict, Verdict::HypothesisFailure);
}

#[test]
fn twist_without_conformal_annulus_is_not_applicable() {
    let w = Weight::standard(0.0).unwrap();
    let s = RadialSymbol::twist(1.0).unwrap();
    let ledger = build_ledger(&s, &w, &small_opts()).unwrap();
    assert_eq!(
        check_conformal_core(&s, &w, 2.0, &ledger).unwrap().verdict,
        Verdict::NotApplicable
    );
}
