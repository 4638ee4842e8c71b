//! Gauss–Legendre rules, adaptive radial integration and tensor rules on the
//! unit disc for the normalized area measure `dA = r dr dθ / π`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Computes the rule by Newton iteration on the three-term recurrence.
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            weights[i] = w;
            nodes[n - 1 - i] = x;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    /// Shared cached rule of order `n`.
    pub fn cached(n: usize) -> Arc<GaussLegendre> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussLegendre>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().expect("quadrature cache poisoned");
        guard
            .entry(n)
            .or_insert_with(|| Arc::new(GaussLegendre::new(n)))
            .clone()
    }

    /// Integrates `f` over `[a, b]`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Panel order used by [`integrate_adaptive`].
const ADAPTIVE_ORDER: usize = 20;
const ADAPTIVE_MAX_PANELS: usize = 4000;

/// Globally adaptive Gauss–Legendre integration of `f` over `[a, b]`.
///
/// Panels are bisected (largest error first) until the summed error estimate
/// falls below `rtol * |I|`. The per-panel estimate is the difference
/// between the panel rule and the rule applied to its two halves.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rtol: f64) -> Result<f64> {
    let gl = GaussLegendre::cached(ADAPTIVE_ORDER);
    let eval = |lo: f64, hi: f64| -> (f64, f64) {
        let mid = 0.5 * (lo + hi);
        let coarse = gl.integrate(lo, hi, &f);
        let fine = gl.integrate(lo, mid, &f) + gl.integrate(mid, hi, &f);
        (fine, (fine - coarse).abs())
    };
    // (lo, hi, value, error)
    let mut panels: Vec<(f64, f64, f64, f64)> = Vec::new();
    let n0 = 8;
    for i in 0..n0 {
        let lo = a + (b - a) * i as f64 / n0 as f64;
        let hi = a + (b - a) * (i + 1) as f64 / n0 as f64;
        let (v, e) = eval(lo, hi);
        panels.push((lo, hi, v, e));
    }
    loop {
        let total: f64 = panels.iter().map(|p| p.2).sum();
        let err: f64 = panels.iter().map(|p| p.3).sum();
        if !total.is_finite() || !err.is_finite() {
            return Err(Error::Quadrature {
                estimate: f64::NAN,
                tolerance: rtol,
            });
        }
        let tol = rtol * total.abs();
        if err <= tol || err <= f64::MIN_POSITIVE {
            return Ok(total);
        }
        if panels.len() >= ADAPTIVE_MAX_PANELS {
            return Err(Error::Quadrature {
                estimate: err / total.abs().max(f64::MIN_POSITIVE),
                tolerance: rtol,
            });
        }
        let (idx, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("panel list is never empty");
        let (lo, hi, _, _) = panels.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = eval(lo, mid);
        let (v2, e2) = eval(mid, hi);
        panels.push((lo, mid, v1, e1));
        panels.push((mid, hi, v2, e2));
    }
}

/// Composite Gauss–Legendre nodes on `[a, b]` split at `edges`, `order`
/// points per panel. Returns `(node, weight)` pairs for `∫_a^b f(r) dr`.
pub fn composite_nodes(edges: &[f64], order: usize) -> Vec<(f64, f64)> {
    let gl = GaussLegendre::cached(order);
    let mut out = Vec::with_capacity(order * edges.len());
    for pair in edges.windows(2) {
        let (lo, hi) = (pair[0], pair[1]);
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        for (&x, &w) in gl.nodes.iter().zip(&gl.weights) {
            out.push((mid + half * x, w * half));
        }
    }
    out
}

/// Tensor rule on the disc: radial Gauss–Legendre nodes on `[0, 1]` times
/// `n_theta` uniform angles.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    radial: Vec<(f64, f64)>,
    n_theta: usize,
}

/// Minimum number of radial nodes given to each panel of a composite rule.
pub const MIN_PANEL_NODES: usize = 24;

impl QuadratureRule {
    /// Builds a rule from explicit radial `(r_i, w_i)` pairs with
    /// `Σ w_i g(r_i) ≈ ∫_0^1 g(r) dr`.
    pub fn from_radial(radial: Vec<(f64, f64)>, n_theta: usize) -> Result<Self> {
        if n_theta < 8 || !n_theta.is_multiple_of(2) {
            return Err(Error::Parameter(format!(
                "n_theta must be even and at least 8, got {n_theta}"
            )));
        }
        if radial.is_empty() {
            return Err(Error::Parameter("radial rule is empty".into()));
        }
        if radial
            .iter()
            .any(|&(r, w)| !(r > 0.0 && r < 1.0) || !(w > 0.0))
        {
            return Err(Error::Parameter(
                "radial nodes must lie in (0,1) with positive weights".into(),
            ));
        }
        Ok(Self { radial, n_theta })
    }

    /// Plain `n_r`-point Gauss–Legendre rule in `r`.
    pub fn gauss_legendre(n_r: usize, n_theta: usize) -> Result<Self> {
        Self::with_breakpoints(n_r, n_theta, &[])
    }

    /// Composite rule whose panels are split at the given radii. Each panel
    /// gets nodes proportional to its length, at least [`MIN_PANEL_NODES`].
    pub fn with_breakpoints(n_r: usize, n_theta: usize, breakpoints: &[f64]) -> Result<Self> {
        if n_r == 0 {
            return Err(Error::Parameter("n_r must be positive".into()));
        }
        let mut edges: Vec<f64> = vec![0.0, 1.0];
        edges.extend(
            breakpoints
                .iter()
                .copied()
                .filter(|&b| b > 1e-12 && b < 1.0 - 1e-12),
        );
        edges.sort_by(f64::total_cmp);
        edges.dedup_by(|x, y| (*x - *y).abs() < 1e-13);
        let mut radial = Vec::with_capacity(n_r + MIN_PANEL_NODES * edges.len());
        if edges.len() == 2 {
            radial = composite_nodes(&edges, n_r);
        } else {
            for pair in edges.windows(2) {
                let len = pair[1] - pair[0];
                let q = ((n_r as f64 * len).round() as usize).max(MIN_PANEL_NODES);
                radial.extend(composite_nodes(pair, q));
            }
        }
        Self::from_radial(radial, n_theta)
    }

    /// Rule geometrically graded toward `r = 1`: panel edges
    /// `0, 1/2, 3/4, …, 1 - 2^{-panels+1}, 1`, plus any extra breakpoints.
    pub fn graded(n_r: usize, n_theta: usize, panels: usize, breakpoints: &[f64]) -> Result<Self> {
        let mut pts: Vec<f64> = (1..panels).map(|k| 1.0 - 0.5f64.powi(k as i32)).collect();
        pts.extend_from_slice(breakpoints);
        let mut edges: Vec<f64> = vec![0.0, 1.0];
        edges.extend(
            pts.iter()
                .copied()
                .filter(|&b| b > 1e-12 && b < 1.0 - 1e-12),
        );
        edges.sort_by(f64::total_cmp);
        edges.dedup_by(|x, y| (*x - *y).abs() < 1e-13);
        let per = (n_r / (edges.len() - 1)).max(MIN_PANEL_NODES);
        let mut radial = Vec::new();
        for pair in edges.windows(2) {
            radial.extend(composite_nodes(pair, per));
        }
        Self::from_radial(radial, n_theta)
    }

    pub fn radial_nodes(&self) -> &[(f64, f64)] {
        &self.radial
    }

    pub fn n_r(&self) -> usize {
        self.radial.len()
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    pub fn angle(&self, j: usize) -> f64 {
        2.0 * PI * j as f64 / self.n_theta as f64
    }

    /// `∫_0^1 g(r) dr` with the radial nodes.
    pub fn integrate_radial<F: FnMut(f64) -> f64>(&self, mut g: F) -> f64 {
        self.radial.iter().map(|&(r, w)| w * g(r)).sum()
    }

    /// Tensor approximation of `∫_𝔻 f dA`.
    pub fn integrate_disc<F: Fn(Complex64) -> Complex64>(&self, f: F) -> Result<Complex64> {
        let inv_nt = 1.0 / self.n_theta as f64;
        let mut total = Complex64::new(0.0, 0.0);
        for &(r, w) in &self.radial {
            let mut ring = Complex64::new(0.0, 0.0);
            for j in 0..self.n_theta {
                let theta = self.angle(j);
                let v = f(Complex64::from_polar(r, theta));
                if !(v.re.is_finite() && v.im.is_finite()) {
                    return Err(Error::Evaluation { r, theta });
                }
                ring += v;
            }
            total += ring * (w * 2.0 * r * inv_nt);
        }
        Ok(total)
    }

    /// For every radial node, the `k`-th discrete angular Fourier coefficient
    /// `(1/n_θ) Σ_j f(r e^{iθ_j}) e^{-ikθ_j}`.
    pub fn angular_fourier_profile<F: Fn(Complex64) -> Complex64>(
        &self,
        f: F,
        k: i64,
    ) -> Result<Vec<Complex64>> {
        self.check_mode(k)?;
        let nt = self.n_theta;
        let mut out = Vec::with_capacity(self.radial.len());
        for &(r, _) in &self.radial {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..nt {
                let theta = self.angle(j);
                let v = f(Complex64::from_polar(r, theta));
                if !(v.re.is_finite() && v.im.is_finite()) {
                    return Err(Error::Evaluation { r, theta });
                }
                acc += v * Complex64::from_polar(1.0, -(k as f64) * theta);
            }
            out.push(acc / nt as f64);
        }
        Ok(out)
    }

    pub(crate) fn check_mode(&self, k: i64) -> Result<()> {
        if k.unsigned_abs() as usize >= self.n_theta / 2 {
            return Err(Error::Aliasing {
                k,
                n_theta: self.n_theta,
            });
        }
        Ok(())
    }

    /// All angular Fourier coefficients of one ring of samples, normalized by
    /// `1/n_θ` and indexed by FFT order (mode `k` at `k mod n_θ`).
    pub fn ring_spectrum(&self, planner: &mut FftPlanner<f64>, samples: &mut [Complex64]) {
        let fft = planner.plan_fft_forward(samples.len());
        fft.process(samples);
        let s = 1.0 / samples.len() as f64;
        for v in samples.iter_mut() {
            *v *= s;
        }
    }
}

/// Parses `--grid <n_r>x<n_theta>`.
pub fn parse_grid(spec: &str) -> Result<(usize, usize)> {
    let err = |reason: &str| Error::Parse {
        input: spec.to_string(),
        reason: reason.to_string(),
    };
    let (a, b) = spec
        .split_once(['x', 'X'])
        .ok_or_else(|| err("expected <n_r>x<n_theta>"))?;
    let n_r: usize = a.trim().parse().map_err(|_| err("bad radial count"))?;
    let n_t: usize = b.trim().parse().map_err(|_| err("bad angle count"))?;
    if n_r == 0 || n_t < 8 || !n_t.is_multiple_of(2) {
        return Err(err("need n_r > 0 and an even n_theta >= 8"));
    }
    Ok((n_r, n_t))
}
