//! Sufficient invertibility conditions for `K_φ`, evaluated on grids with a
//! provenance-tracked ledger of constants.
//!
//! Every constant carries its [`Provenance`]. Since `d_M` is only ever a
//! lower bound, passing certificates are numerical evidence, never proofs.

use std::collections::BTreeMap;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bergman::BasisTable;
use crate::dbar::estimate_d_m;
use crate::error::{Error, Result};
use crate::estimate::Estimate;
use crate::operators::{c_phi_norm_bound, operator_rule, NORM_CAP};
use crate::symbols::{beltrami, RadialSymbol, Symbol};
use crate::weights::{Weight, WeightKind};

/// Free parameter `δ ∈ (0, 1/√2)` of the dilatation conditions.
pub const DEFAULT_DELTA: f64 = 0.7;

/// Bound on `sup|μ|` required by the dilatation conditions.
pub const MU_GATE: f64 = 0.5;

/// `sup|μ|` within this of [`MU_GATE`] counts as reaching it.
pub const GATE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ConstantsLedger {
    #[serde(rename = "d_P", default, skip_serializing_if = "Option::is_none")]
    pub d_p: Option<Estimate>,
    #[serde(rename = "d_LP", default, skip_serializing_if = "Option::is_none")]
    pub d_lp: Option<Estimate>,
    #[serde(rename = "d_M", default, skip_serializing_if = "Option::is_none")]
    pub d_m: Option<Estimate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_phi: Option<Estimate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_psi: Option<Estimate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta_infty: Option<Estimate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta_phi: Option<Estimate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_user: Option<Estimate>,
}

fn need(entry: Option<Estimate>, name: &'static str) -> Result<f64> {
    let e = entry.ok_or(Error::IncompleteLedger(name))?;
    if !(e.value > 0.0) {
        return Err(Error::Parameter(format!(
            "ledger entry {name} must be positive, got {}",
            e.value
        )));
    }
    Ok(e.value)
}

impl ConstantsLedger {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            input: "ledger".into(),
            reason: e.to_string(),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("ledger serializes")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse {
            input: path.display().to_string(),
            reason: e.to_string(),
        })?;
        Self::from_json(&text)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()).map_err(|e| Error::Parse {
            input: path.display().to_string(),
            reason: e.to_string(),
        })
    }

    /// Entries of `other` replace those of `self`.
    pub fn overlay(&mut self, other: &ConstantsLedger) {
        let pairs = [
            (&mut self.d_p, other.d_p),
            (&mut self.d_lp, other.d_lp),
            (&mut self.d_m, other.d_m),
            (&mut self.d_phi, other.d_phi),
            (&mut self.d_psi, other.d_psi),
            (&mut self.beta_infty, other.beta_infty),
            (&mut self.beta_phi, other.beta_phi),
            (&mut self.delta_user, other.delta_user),
        ];
        for (slot, v) in pairs {
            if v.is_some() {
                *slot = v;
            }
        }
    }

    fn entries(&self) -> [Option<Estimate>; 8] {
        [
            self.d_p,
            self.d_lp,
            self.d_m,
            self.d_phi,
            self.d_psi,
            self.beta_infty,
            self.beta_phi,
            self.delta_user,
        ]
    }

    /// True if any present entry is a numerical estimate.
    pub fn has_estimates(&self) -> bool {
        self.entries()
            .iter()
            .flatten()
            .any(|e| e.provenance.is_estimate())
    }

    pub fn delta(&self) -> Result<f64> {
        let d = need(self.delta_user, "delta_user")?;
        if !(d < std::f64::consts::FRAC_1_SQRT_2) {
            return Err(Error::Parameter(format!(
                "delta must lie in (0, 1/sqrt 2), got {d}"
            )));
        }
        Ok(d)
    }
}

/// Discretization used to build a ledger.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LedgerOptions {
    pub p: f64,
    pub basis: usize,
    pub n_r: usize,
    pub n_theta: usize,
    pub bidegree: usize,
    pub delta: f64,
}

impl Default for LedgerOptions {
    fn default() -> Self {
        Self {
            p: 2.0,
            basis: 64,
            n_r: 256,
            n_theta: 1024,
            bidegree: 10,
            delta: DEFAULT_DELTA,
        }
    }
}

/// Weight-only constants `d_P`, `d_LP`, `d_M`, `β_∞` and the user `δ`.
pub fn weight_constants(weight: &Weight, opts: &LedgerOptions) -> Result<ConstantsLedger> {
    let hilbert = BasisTable::new(*weight, 2.0, opts.basis)?;
    let lp = hilbert.d_lp()?;
    let dm = estimate_d_m(weight, opts.bidegree)?;
    let d_p = if opts.p == 2.0 {
        Estimate::exact(1.0)
    } else {
        BasisTable::new(*weight, opts.p, opts.basis)?.d_p(opts.p)?
    };
    Ok(ConstantsLedger {
        d_p: Some(d_p),
        // the truncated maximum only grows with the basis
        d_lp: Some(Estimate::lower(lp.value)),
        d_m: Some(dm.estimate),
        beta_infty: Some(Estimate::lower(hilbert.beta_infty()?)),
        delta_user: Some(Estimate::user(opts.delta)),
        ..Default::default()
    })
}

/// `max(1, sup |∇φ|, sup |∇ψ|)` over a polar grid of `|z| ≤ 1/2`.
pub fn beta_phi(symbol: &dyn Symbol) -> f64 {
    let mut best: f64 = 1.0;
    for i in 0..=64 {
        let r = 0.5 * (i as f64 + 0.5).min(64.0) / 64.0;
        for j in 0..128 {
            let w = Complex64::from_polar(r, std::f64::consts::PI * j as f64 / 64.0);
            let grad = symbol.d_z(w).norm() + symbol.d_zbar(w).norm();
            let z = symbol.inverse(w);
            let lower = symbol.d_z(z).norm() - symbol.d_zbar(z).norm();
            let grad_inv = if lower > 0.0 {
                1.0 / lower
            } else {
                f64::INFINITY
            };
            best = best.max(grad).max(grad_inv);
        }
    }
    best
}

/// Adds the symbol constants `d_φ`, `d_ψ` (grid change-of-variables
/// bounds) and `β_φ`.
pub fn symbol_constants(
    symbol: &dyn Symbol,
    weight: &Weight,
    opts: &LedgerOptions,
    ledger: &mut ConstantsLedger,
) -> Result<()> {
    let rule = operator_rule(symbol, weight, opts.n_r, opts.n_theta)?;
    let nb = c_phi_norm_bound(symbol, weight, opts.p, &rule)?;
    ledger.d_phi = Some(Estimate::upper(nb.norm_upper));
    ledger.d_psi = Some(Estimate::upper((1.0 / nb.b1).powf(1.0 / opts.p)));
    ledger.beta_phi = Some(Estimate::lower(beta_phi(symbol)));
    Ok(())
}

pub fn build_ledger(
    symbol: &dyn Symbol,
    weight: &Weight,
    opts: &LedgerOptions,
) -> Result<ConstantsLedger> {
    let mut l = weight_constants(weight, opts)?;
    symbol_constants(symbol, weight, opts, &mut l)?;
    Ok(l)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gammas {
    pub gamma_psi: f64,
    pub gamma_phi: f64,
}

/// `γ_ψ = δ/(d_LP d_M d_ψ)`, `γ_φ = δ/(d_LP d_M d_φ)`.
pub fn gamma_constants(ledger: &ConstantsLedger) -> Result<Gammas> {
    let delta = ledger.delta()?;
    let lp = need(ledger.d_lp, "d_LP")?;
    let m = need(ledger.d_m, "d_M")?;
    let dpsi = need(ledger.d_psi, "d_psi")?;
    let dphi = need(ledger.d_phi, "d_phi")?;
    Ok(Gammas {
        gamma_psi: delta / (lp * m * dpsi),
        gamma_phi: delta / (lp * m * dphi),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    HypothesisFailure,
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginSummary {
    pub name: String,
    /// `min (RHS - LHS)`; the condition holds iff this is positive.
    pub min_margin: f64,
    pub at_re: f64,
    pub at_im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisCheck {
    pub name: String,
    pub holds: bool,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub check: String,
    pub symbol: String,
    pub weight: String,
    pub verdict: Verdict,
    pub margins: Vec<MarginSummary>,
    pub hypotheses: Vec<HypothesisCheck>,
    pub grid: String,
    pub details: BTreeMap<String, f64>,
    pub ledger: ConstantsLedger,
    /// `proof-grade` or `numerical-evidence`.
    pub rigor: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub caveat: Option<String>,
}

impl CertificateReport {
    fn new(
        check: &str,
        symbol: &dyn Symbol,
        weight: &Weight,
        grid: String,
        ledger: &ConstantsLedger,
    ) -> Self {
        let estimated = ledger.has_estimates();
        Self {
            check: check.into(),
            symbol: symbol.spec(),
            weight: weight.to_string(),
            verdict: Verdict::NotApplicable,
            margins: Vec::new(),
            hypotheses: Vec::new(),
            grid,
            details: BTreeMap::new(),
            ledger: ledger.clone(),
            rigor: if estimated { "numerical-evidence" } else { "proof-grade" }.into(),
            caveat: estimated.then(|| {
                "ledger contains estimated constants (d_M is a lower bound; d_phi, d_psi and beta constants come from finite grids), and margins are sampled on a finite grid".into()
            }),
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    fn settle(&mut self) {
        self.verdict = if self.hypotheses.iter().any(|h| !h.holds) {
            Verdict::HypothesisFailure
        } else if self.margins.iter().all(|m| m.min_margin > 0.0) {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
    }
}

/// Polar sample grid for margin fields: radii graded toward the boundary
/// plus the symbol's breakpoints, times uniform angles.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginGrid {
    pub radii: Vec<f64>,
    pub n_angles: usize,
}

impl MarginGrid {
    pub const DEFAULT_RADII: usize = 400;
    pub const DEFAULT_ANGLES: usize = 256;

    /// `r_i = 1 - (1 - (i + 1/2)/n)²` plus `extra` radii in `(0, 1)`.
    pub fn graded(n_radii: usize, n_angles: usize, extra: &[f64]) -> Self {
        let mut radii: Vec<f64> = (0..n_radii)
            .map(|i| {
                let t = 1.0 - (i as f64 + 0.5) / n_radii as f64;
                1.0 - t * t
            })
            .collect();
        radii.extend(extra.iter().copied().filter(|&r| r > 0.0 && r < 1.0));
        radii.sort_by(f64::total_cmp);
        radii.dedup();
        Self { radii, n_angles }
    }

    pub fn for_symbol(symbol: &dyn Symbol) -> Self {
        Self::graded(
            Self::DEFAULT_RADII,
            Self::DEFAULT_ANGLES,
            &symbol.breakpoints(),
        )
    }

    pub fn points(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.radii.iter().flat_map(move |&r| {
            (0..self.n_angles).map(move |j| {
                Complex64::from_polar(
                    r,
                    2.0 * std::f64::consts::PI * (j as f64 + 0.125) / self.n_angles as f64,
                )
            })
        })
    }

    pub fn describe(&self) -> String {
        format!("{}x{} graded", self.radii.len(), self.n_angles)
    }
}

fn sup_mu(symbol: &dyn Symbol, grid: &MarginGrid) -> Result<f64> {
    let mut s: f64 = 0.0;
    for z in grid.points() {
        s = s.max(beltrami(symbol, z)?.norm());
    }
    Ok(s)
}

fn shared_hypotheses(
    symbol: &dyn Symbol,
    grid: &MarginGrid,
    ledger: &ConstantsLedger,
) -> Result<Vec<HypothesisCheck>> {
    let mu = sup_mu(symbol, grid)?;
    let dphi = need(ledger.d_phi, "d_phi")?;
    let dpsi = need(ledger.d_psi, "d_psi")?;
    let cap = NORM_CAP.sqrt();
    Ok(vec![
        HypothesisCheck {
            name: "sup_mu_below_half".into(),
            holds: mu < MU_GATE - GATE_TOLERANCE,
            value: mu,
        },
        HypothesisCheck {
            name: "composition_bounded".into(),
            holds: dphi < cap && dpsi < cap,
            value: dphi.max(dpsi),
        },
    ])
}

struct MinTracker {
    name: &'static str,
    min: f64,
    at: Complex64,
}

impl MinTracker {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            min: f64::INFINITY,
            at: Complex64::new(0.0, 0.0),
        }
    }

    fn push(&mut self, v: f64, z: Complex64) {
        let v = if v.is_nan() { f64::NEG_INFINITY } else { v };
        if v < self.min {
            self.min = v;
            self.at = z;
        }
    }

    fn summary(self) -> MarginSummary {
        MarginSummary {
            name: self.name.into(),
            min_margin: self.min,
            at_re: self.at.re,
            at_im: self.at.im,
        }
    }
}

/// Boundary-distance factor on the right of the dilatation conditions at
/// image point `u` and base point `z`.
fn dilatation_rhs(weight: &Weight, u: Complex64, z: Complex64) -> f64 {
    let (ru, rz) = (u.norm(), z.norm());
    match weight.kind() {
        WeightKind::Standard { alpha } => {
            (1.0 - ru * ru).powf(1.0 + 0.5 * alpha) / (1.0 - rz * rz).powf(0.5 * alpha)
        }
        WeightKind::Exponential { .. } => {
            let tau = weight.tau(ru).expect("exponential weight has tau");
            let ratio = (0.5 * (weight.log_omega(ru) - weight.log_omega(rz))).exp();
            tau * tau * ratio / (1.0 - ru)
        }
    }
}

/// Pointwise dilatation conditions: `γ_ψ F(φ(z), z) > |μ(z)|` and
/// `γ_φ F(ψ(z), z) > |μ_ψ(z)|`, where `|μ_ψ(z)| = |μ(ψ(z))|`.
pub fn check_dilatation(
    symbol: &dyn Symbol,
    weight: &Weight,
    ledger: &ConstantsLedger,
    grid: &MarginGrid,
) -> Result<CertificateReport> {
    let g = gamma_constants(ledger)?;
    let mut rep = CertificateReport::new("dilatation", symbol, weight, grid.describe(), ledger);
    rep.hypotheses = shared_hypotheses(symbol, grid, ledger)?;
    let mut fwd = MinTracker::new("forward");
    let mut inv = MinTracker::new("inverse");
    for z in grid.points() {
        let mu = beltrami(symbol, z)?.norm();
        fwd.push(
            g.gamma_psi * dilatation_rhs(weight, symbol.eval(z), z) - mu,
            z,
        );
        let pre = symbol.inverse(z);
        let mu_inv = beltrami(symbol, pre)?.norm();
        inv.push(g.gamma_phi * dilatation_rhs(weight, pre, z) - mu_inv, z);
    }
    rep.margins = vec![fwd.summary(), inv.summary()];
    rep.details.insert("gamma_psi".into(), g.gamma_psi);
    rep.details.insert("gamma_phi".into(), g.gamma_phi);
    rep.settle();
    Ok(rep)
}

/// `δ = min{1/(2β_φ), 1/(√π β_φ^{1+p/2} (β_∞ d_P d_M max(d_φ, d_ψ))^{p/2})}`.
pub fn conformal_core_delta(ledger: &ConstantsLedger, p: f64) -> Result<f64> {
    let bphi = need(ledger.beta_phi, "beta_phi")?;
    let binf = need(ledger.beta_infty, "beta_infty")?;
    let dp = need(ledger.d_p, "d_P")?;
    let dm = need(ledger.d_m, "d_M")?;
    let d = need(ledger.d_phi, "d_phi")?.max(need(ledger.d_psi, "d_psi")?);
    let second = 1.0
        / (std::f64::consts::PI.sqrt()
            * bphi.powf(1.0 + 0.5 * p)
            * (binf * dp * dm * d).powf(0.5 * p));
    Ok((0.5 / bphi).min(second))
}

/// Conformal-core condition: `φ(0) = 0` and `φ` conformal on
/// `R < |z| < 1` for some `R < δ`.
pub fn check_conformal_core(
    symbol: &dyn Symbol,
    weight: &Weight,
    p: f64,
    ledger: &ConstantsLedger,
) -> Result<CertificateReport> {
    let mut rep = CertificateReport::new(
        "conformal-core",
        symbol,
        weight,
        "beta_phi: 65x128 on |z|<=1/2".into(),
        ledger,
    );
    let origin = symbol.eval(Complex64::new(0.0, 0.0)).norm();
    rep.hypotheses.push(HypothesisCheck {
        name: "fixes_origin".into(),
        holds: origin <= 1e-14,
        value: origin,
    });
    let Some(radius) = symbol.conformal_radius() else {
        rep.verdict = Verdict::NotApplicable;
        return Ok(rep);
    };
    let delta = conformal_core_delta(ledger, p)?;
    rep.details.insert("delta".into(), delta);
    rep.details.insert("conformal_radius".into(), radius);
    rep.details
        .insert("beta_phi".into(), need(ledger.beta_phi, "beta_phi")?);
    rep.margins.push(MarginSummary {
        name: "delta_minus_radius".into(),
        min_margin: delta - radius,
        at_re: radius,
        at_im: 0.0,
    });
    rep.settle();
    Ok(rep)
}

/// Parameter families with closed-form sufficient conditions on `A²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum ExampleFamily {
    /// Angle `C (r - r³/3)`, so `|b'(r)| = |C| (1 - r²)`.
    Twist {
        c: f64,
    },
    Stretch {
        exponent: f64,
        radius: f64,
    },
}

impl ExampleFamily {
    pub fn symbol(&self) -> Result<RadialSymbol> {
        match *self {
            ExampleFamily::Twist { c } => RadialSymbol::twist(c),
            ExampleFamily::Stretch { exponent, radius } => RadialSymbol::stretch(exponent, radius),
        }
    }
}

/// Closed-form thresholds: `|b'(r)| < min(1, γ_ψ, γ_φ)(1 - r²)` for the
/// twist and `max(a, 1/a) < (1 + m(1-R²))/(1 - m(1-R²))`,
/// `m = min(γ_ψ, γ_φ)`, for the stretch. Both carry the same hypotheses as
/// [`check_dilatation`].
pub fn check_example_thresholds(
    family: ExampleFamily,
    weight: &Weight,
    ledger: &ConstantsLedger,
) -> Result<CertificateReport> {
    let symbol = family.symbol()?;
    let grid = MarginGrid::for_symbol(&symbol);
    let mut rep = CertificateReport::new(
        "example-threshold",
        &symbol,
        weight,
        grid.describe(),
        ledger,
    );
    if weight.kind() != (WeightKind::Standard { alpha: 0.0 }) {
        return Ok(rep);
    }
    let g = gamma_constants(ledger)?;
    rep.hypotheses = shared_hypotheses(&symbol, &grid, ledger)?;
    match family {
        ExampleFamily::Twist { c } => {
            let bound = 1.0f64.min(g.gamma_psi).min(g.gamma_phi);
            let mut t = MinTracker::new("twist_derivative");
            for &r in &grid.radii {
                let s = 1.0 - r * r;
                t.push(bound * s - c.abs() * s, Complex64::new(r, 0.0));
            }
            rep.details.insert("c_bound".into(), bound);
            rep.margins.push(t.summary());
        }
        ExampleFamily::Stretch { exponent, radius } => {
            let m = g.gamma_psi.min(g.gamma_phi) * (1.0 - radius * radius);
            let threshold = if m >= 1.0 {
                f64::INFINITY
            } else {
                (1.0 + m) / (1.0 - m)
            };
            let a = exponent.max(1.0 / exponent);
            rep.details.insert("threshold".into(), threshold);
            rep.margins.push(MarginSummary {
                name: "stretch_exponent".into(),
                min_margin: threshold - a,
                at_re: radius,
                at_im: 0.0,
            });
        }
    }
    rep.settle();
    Ok(rep)
}
