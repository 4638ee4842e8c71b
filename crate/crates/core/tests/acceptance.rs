//! Acceptance run: one PASS/FAIL line per criterion at its stated tolerance.
//!
//! Criteria listed in `KNOWN_UNATTAINABLE` still run in full and print
//! FAIL when they fail; only an unexpected failure makes this target exit
//! nonzero.

use std::time::{Duration, Instant};

use num_complex::Complex64;
use qcbergman::bergman::BasisTable;
use qcbergman::certificates::{
    build_ledger, check_dilatation, check_example_thresholds, ExampleFamily, LedgerOptions,
    MarginGrid, Verdict,
};
use qcbergman::dbar::{complement, dbar_apply, inner, m_apply, project, BiPolynomial};
use qcbergman::operators::{assemble_k, operator_rule, section_lower_bound, spectral_diagnostics};
use qcbergman::quadrature::QuadratureRule;
use qcbergman::symbols::example3::{inner_radius, step_profile_integral};
use qcbergman::symbols::{
    beltrami, fd_wirtinger, tune_example3, Identity, Mobius, RadialSymbol, Symbol, FD_STEP,
};
use qcbergman::weights::Weight;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Failures here are explained in the README.
const KNOWN_UNATTAINABLE: &[u32] = &[6, 7];

struct Line {
    id: u32,
    pass: bool,
    detail: String,
    elapsed: Duration,
}

fn timed(id: u32, budget: Option<f64>, f: impl FnOnce() -> (bool, String)) -> Line {
    let start = Instant::now();
    let (mut pass, mut detail) = f();
    let elapsed = start.elapsed();
    if let Some(limit) = budget {
        if elapsed.as_secs_f64() >= limit {
            pass = false;
            detail.push_str(&format!(
                "; runtime {:.2}s exceeds {limit}s",
                elapsed.as_secs_f64()
            ));
        }
    }
    Line {
        id,
        pass,
        detail,
        elapsed,
    }
}

fn ln_gamma(x: f64) -> f64 {
    statrs::function::gamma::ln_gamma(x)
}

fn criterion_1() -> (bool, String) {
    let mut worst: f64 = 0.0;
    for &alpha in &[0.0, 1.0, 2.5] {
        let basis = BasisTable::new(Weight::standard(alpha).unwrap(), 2.0, 201).unwrap();
        for n in 0..=200 {
            let nf = n as f64;
            // ∫_0^1 t^n (1-t)^α dt
            let oracle =
                (ln_gamma(nf + 1.0) + ln_gamma(alpha + 1.0) - ln_gamma(nf + alpha + 2.0)).exp();
            worst = worst.max((basis.h(n) - oracle).abs() / oracle);
        }
    }
    (worst <= 1e-10, format!("max relative error {worst:.3e}"))
}

fn random_field(rng: &mut ChaCha8Rng, deg: usize) -> BiPolynomial {
    BiPolynomial::from_fn(deg, deg, |_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
}

fn norm(f: &BiPolynomial, moments: &[f64]) -> f64 {
    inner(f, f, moments).unwrap().re.sqrt()
}

fn coefficients_of(f: &BiPolynomial, basis: &BasisTable) -> Vec<Complex64> {
    (0..basis.len())
        .map(|k| {
            if k <= f.deg_z() {
                f.coeff(k, 0) * basis.h(k).sqrt()
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect()
}

fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

fn criterion_2() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = [0.0f64; 4];
    for w in [
        Weight::standard(0.0).unwrap(),
        Weight::standard(2.0).unwrap(),
        Weight::exponential(1.0, 1.0).unwrap(),
    ] {
        let basis = BasisTable::new(w, 2.0, 17).unwrap();
        let moments = basis.moments();
        let rule = QuadratureRule::graded(384, 64, 12, &[]).unwrap();
        for _ in 0..100 {
            let deg = rng.gen_range(0..=8);
            let f = random_field(&mut rng, deg);
            let g = random_field(&mut rng, 8);
            let scale = norm(&f, moments).max(1e-300);
            let pf = project(&f, &basis).unwrap();
            // quadrature oracle for ⟨f, e_n⟩
            let quad = basis.project_coeffs(|z| f.eval(z), &rule).unwrap();
            worst[0] = worst[0].max(max_diff(&quad, &coefficients_of(&pf, &basis)) / scale);
            let ppf = project(&pf, &basis).unwrap();
            worst[1] = worst[1].max(ppf.max_abs_diff(&pf) / scale);
            let lhs = inner(&pf, &g, moments).unwrap();
            let rhs = inner(&f, &project(&g, &basis).unwrap(), moments).unwrap();
            worst[2] = worst[2].max((lhs - rhs).norm() / (scale * norm(&g, moments)));
            let analytic = BiPolynomial::from_fn(8, 0, |a, _| f.coeff(a, 0));
            let quad_a = basis.project_coeffs(|z| analytic.eval(z), &rule).unwrap();
            worst[3] = worst[3].max(max_diff(&quad_a, &coefficients_of(&analytic, &basis)) / scale);
        }
    }
    let pass = worst.iter().all(|&e| e <= 1e-10);
    (
        pass,
        format!(
            "quadrature-vs-coefficient {:.2e}, idempotence {:.2e}, self-adjointness {:.2e}, reproduction {:.2e}",
            worst[0], worst[1], worst[2], worst[3]
        ),
    )
}

fn criterion_3() -> (bool, String) {
    let mut worst: f64 = 0.0;
    for w in [
        Weight::standard(0.0).unwrap(),
        Weight::exponential(1.0, 1.0).unwrap(),
    ] {
        let basis = BasisTable::new(w, 2.0, 21).unwrap();
        let rule = QuadratureRule::graded(384, 64, 12, &[]).unwrap();
        for a in 0..=10 {
            for b in 0..=10 {
                let f = BiPolynomial::monomial(a, b);
                let lhs = m_apply(&dbar_apply(&f), &basis).unwrap();
                // f - P f with P f from quadrature
                let c = basis.project_coeffs(|z| f.eval(z), &rule).unwrap();
                let mut rhs = f.clone();
                for (k, ck) in c.iter().enumerate().take(a + 1) {
                    rhs.set(k, 0, rhs.coeff(k, 0) - ck / basis.h(k).sqrt());
                }
                worst = worst.max(lhs.max_abs_diff(&rhs));
                worst = worst.max(lhs.max_abs_diff(&complement(&f, &basis).unwrap()));
            }
        }
    }
    (worst <= 1e-10, format!("max coefficient error {worst:.3e}"))
}

fn criterion_4() -> (bool, String) {
    let basis = BasisTable::new(Weight::standard(0.0).unwrap(), 2.0, 513).unwrap();
    let lp = basis.d_lp().unwrap();
    let mut worst: f64 = 0.0;
    for (n, &g) in lp.g.iter().enumerate() {
        let nf = n as f64;
        worst = worst.max((g - 2.0 * nf / (nf + 2.0)).abs());
    }
    let gap = 2.0 - lp.value * lp.value;
    let pass = worst <= 1e-10 && gap > 0.0 && gap <= 4.0 / 514.0 + 1e-10;
    (
        pass,
        format!(
            "max |g_n - 2n/(n+2)| {worst:.3e}; 2 - d_LP^2 = {gap:.6e} (bound 4/514 = {:.6e})",
            4.0 / 514.0
        ),
    )
}

fn criterion_5() -> (bool, String) {
    let r = inner_radius();
    let at = step_profile_integral(r).abs();
    let mut monotone = true;
    for dir in [-1.0, 1.0] {
        let mut prev = at;
        for k in 1..=100 {
            let v = step_profile_integral(r + dir * 0.01 * k as f64 / 100.0).abs();
            monotone &= v > prev;
            prev = v;
        }
    }
    (
        at <= 1e-14 && monotone,
        format!("|integral| at R = {at:.3e}; monotone away on +-0.01: {monotone}"),
    )
}

fn sigma_min(symbol: &dyn Symbol, n: usize) -> f64 {
    let w = Weight::standard(0.0).unwrap();
    let basis = BasisTable::new(w, 2.0, n).unwrap();
    let rule = operator_rule(symbol, &w, 256, 1024).unwrap();
    spectral_diagnostics(&assemble_k(symbol, &basis, &rule, true).unwrap())
        .unwrap()
        .sigma_min
}

fn stable(sig: &[f64]) -> bool {
    sig.iter().all(|&s| s >= 0.1) && sig.windows(2).all(|p| (p[1] - p[0]).abs() / p[0] <= 0.05)
}

fn criterion_6() -> (bool, String) {
    let t = tune_example3().unwrap();
    let tuned = t.i_re.abs() <= 1e-8 && t.i_im.abs() <= 1e-8;
    let w = Weight::standard(0.0).unwrap();
    let s3 = RadialSymbol::example3(t.params).unwrap();
    let basis = BasisTable::new(w, 2.0, 32).unwrap();
    let rule = operator_rule(&s3, &w, 256, 1024).unwrap();
    let a = assemble_k(&s3, &basis, &rule, true).unwrap();
    let col = a.column_norm(1);
    let s3_min = spectral_diagnostics(&a).unwrap().sigma_min;
    let ns = [16, 32, 64];
    let id: Vec<f64> = ns.iter().map(|&n| sigma_min(&Identity, n)).collect();
    let mob = Mobius::new(Complex64::new(0.3, 0.0)).unwrap();
    let mb: Vec<f64> = ns.iter().map(|&n| sigma_min(&mob, n)).collect();
    let tall: Vec<f64> = ns
        .iter()
        .map(|&n| {
            let basis = BasisTable::new(w, 2.0, 4 * n).unwrap();
            let rule = operator_rule(&mob, &w, 256, 1024).unwrap();
            section_lower_bound(&mob, &basis, n, &rule).unwrap()
        })
        .collect();
    let pass = tuned && col <= 1e-6 && s3_min <= 1e-6 && stable(&id) && stable(&mb);
    (
        pass,
        format!(
            "|I_Re| {:.1e} |I_Im| {:.1e}; example3 col1 {col:.2e} sigma_min {s3_min:.2e}; identity sigma_min {id:.4?}; mobius(0.3) square sigma_min {}; mobius 4NxN section sigma_min {tall:.4?}",
            t.i_re.abs(),
            t.i_im.abs(),
            mb.iter().map(|s| format!("{s:.3e}")).collect::<Vec<_>>().join(", ")
        ),
    )
}

/// 64x64 Cartesian lattice on `[-0.95, 0.95]²` clipped to `|z| ≤ 0.95`,
/// minus points within `10·FD_STEP` of a derivative jump.
fn lattice(symbol: &dyn Symbol) -> Vec<Complex64> {
    let kinks = symbol.kinks();
    let mut pts = Vec::new();
    for i in 0..64 {
        for j in 0..64 {
            let z = Complex64::new(-0.95 + 1.9 * i as f64 / 63.0, -0.95 + 1.9 * j as f64 / 63.0);
            let r = z.norm();
            if r <= 0.95 && kinks.iter().all(|&k| (r - k).abs() > 10.0 * FD_STEP) {
                pts.push(z);
            }
        }
    }
    pts
}

fn criterion_7() -> (bool, String) {
    let t = tune_example3().unwrap();
    let symbols: Vec<Box<dyn Symbol>> = vec![
        Box::new(Identity),
        Box::new(Mobius::new(Complex64::new(0.3, 0.0)).unwrap()),
        Box::new(RadialSymbol::twist(2.0).unwrap()),
        Box::new(RadialSymbol::stretch(3.0, 0.5).unwrap()),
        Box::new(RadialSymbol::stretch(0.5, 0.5).unwrap()),
        Box::new(RadialSymbol::example3(t.params).unwrap()),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for s in &symbols {
        let mut worst: f64 = 0.0;
        for z in lattice(s.as_ref()) {
            let (fz, fzb) = fd_wirtinger(s.as_ref(), z, FD_STEP);
            worst = worst
                .max((fz - s.d_z(z)).norm())
                .max((fzb - s.d_zbar(z)).norm());
        }
        pass &= worst <= 1e-6;
        parts.push(format!(
            "{} {worst:.2e}",
            s.spec().split(':').next().unwrap()
        ));
    }
    let mut mu_err: f64 = 0.0;
    for &a in &[0.5, 2.0, 3.0] {
        let s = RadialSymbol::stretch(a, 0.5).unwrap();
        let expect = (a - 1.0).abs() / (a + 1.0);
        for z in lattice(&s)
            .into_iter()
            .filter(|z| z.norm() < 0.5 && z.norm() > 0.0)
        {
            mu_err = mu_err.max((beltrami(&s, z).unwrap().norm() - expect).abs());
        }
    }
    pass &= mu_err <= 1e-9;
    (
        pass,
        format!(
            "FD sup-error: {}; stretch |mu| error {mu_err:.2e}",
            parts.join(", ")
        ),
    )
}

fn criterion_8() -> (bool, String) {
    let w = Weight::standard(0.0).unwrap();
    let mut points: Vec<ExampleFamily> =
        [0.0, 0.1, 0.25, 0.4, 0.55, -0.3, 1.4, 2.0, 3.0, 5.0, -2.0]
            .iter()
            .map(|&c| ExampleFamily::Twist { c })
            .collect();
    points.extend(
        [
            (1.0, 0.5),
            (1.05, 0.5),
            (0.9, 0.5),
            (1.1, 0.3),
            (1.5, 0.5),
            (2.0, 0.5),
            (0.6, 0.5),
            (0.8, 0.8),
            (3.0, 0.5),
        ]
        .iter()
        .map(|&(exponent, radius)| ExampleFamily::Stretch { exponent, radius }),
    );
    let opts = LedgerOptions::default();
    let (mut agree, mut coherent, mut gated) = (0, true, true);
    let (mut passes, mut min_sigma) = (0, f64::INFINITY);
    for fam in &points {
        let s = fam.symbol().unwrap();
        let ledger = build_ledger(&s, &w, &opts).unwrap();
        let general = check_dilatation(&s, &w, &ledger, &MarginGrid::for_symbol(&s)).unwrap();
        let threshold = check_example_thresholds(*fam, &w, &ledger).unwrap();
        if general.passed() == threshold.passed() {
            agree += 1;
        }
        if general.passed() {
            passes += 1;
            let sig = sigma_min(&s, 32);
            min_sigma = min_sigma.min(sig);
            coherent &= sig >= 0.05;
        }
        if matches!(fam, ExampleFamily::Stretch { exponent, .. } if *exponent == 3.0) {
            gated &= general.verdict == Verdict::HypothesisFailure
                && threshold.verdict == Verdict::HypothesisFailure;
        }
    }
    let pass = agree == points.len() && coherent && gated && passes > 0 && passes < points.len();
    (
        pass,
        format!(
            "{agree}/{} verdicts agree; {passes} passes, min sigma_min at N=32 {min_sigma:.4}; stretch a=3 gated: {gated}",
            points.len()
        ),
    )
}

fn criterion_9() -> (bool, String) {
    let w = Weight::standard(0.0).unwrap();
    let basis = BasisTable::new(w, 2.0, 16).unwrap();
    let t = tune_example3().unwrap();
    let symbols: Vec<Box<dyn Symbol>> = vec![
        Box::new(RadialSymbol::twist(2.0).unwrap()),
        Box::new(RadialSymbol::stretch(1.5, 0.5).unwrap()),
        Box::new(RadialSymbol::example3(t.params).unwrap()),
    ];
    let mut worst: f64 = 0.0;
    for s in &symbols {
        let rule = operator_rule(s.as_ref(), &w, 256, 1024).unwrap();
        let fast = assemble_k(s.as_ref(), &basis, &rule, true).unwrap();
        let dense = assemble_k(s.as_ref(), &basis, &rule, false).unwrap();
        worst = worst.max(fast.max_entry_diff(&dense));
    }
    (
        worst <= 1e-9,
        format!("max entrywise difference {worst:.3e}"),
    )
}

fn main() {
    let lines = vec![
        timed(1, Some(1.0), criterion_1),
        timed(2, Some(10.0), criterion_2),
        timed(3, Some(10.0), criterion_3),
        timed(4, None, criterion_4),
        timed(5, None, criterion_5),
        timed(6, Some(60.0), criterion_6),
        timed(7, None, criterion_7),
        timed(8, None, criterion_8),
        timed(9, None, criterion_9),
    ];
    let mut unexpected = Vec::new();
    for l in &lines {
        let tag = if l.pass { "PASS" } else { "FAIL" };
        let note = if !l.pass && KNOWN_UNATTAINABLE.contains(&l.id) {
            " [known]"
        } else {
            ""
        };
        println!(
            "criterion {}: {tag}{note} ({:.2}s) {}",
            l.id,
            l.elapsed.as_secs_f64(),
            l.detail
        );
        if !l.pass && !KNOWN_UNATTAINABLE.contains(&l.id) {
            unexpected.push(l.id);
        }
    }
    let passed = lines.iter().filter(|l| l.pass).count();
    println!("acceptance: {passed}/{} criteria pass", lines.len());
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
