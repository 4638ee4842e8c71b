//! The standard mollifier `Φ(x) = C exp(-1/(1-x²))` on `(-1, 1)` and the
//! smooth templates built from it.
//!
//! `F(x) = ∫_{-1}^x Φ` (a smooth step from 0 to 1) and `G(x) = ∫_{-∞}^x F`
//! are tabulated once and evaluated by quintic Hermite interpolation, using
//! the exact derivatives `F' = Φ`, `F'' = Φ'`, `G' = F`, `G'' = Φ`.

use std::sync::OnceLock;

use crate::quadrature::GaussLegendre;

const CELLS: usize = 4096;

struct Tables {
    norm: f64,
    f: Vec<f64>,
    g: Vec<f64>,
}

fn raw(x: f64) -> f64 {
    let s = 1.0 - x * x;
    if s <= 0.0 {
        0.0
    } else {
        (-1.0 / s).exp()
    }
}

fn raw_deriv(x: f64) -> f64 {
    let s = 1.0 - x * x;
    if s <= 0.0 {
        0.0
    } else {
        raw(x) * (-2.0 * x / (s * s))
    }
}

fn tables() -> &'static Tables {
    static T: OnceLock<Tables> = OnceLock::new();
    T.get_or_init(|| {
        let gl = GaussLegendre::new(16);
        let h = 2.0 / CELLS as f64;
        let mut mass = Vec::with_capacity(CELLS);
        let mut first = Vec::with_capacity(CELLS);
        for k in 0..CELLS {
            let lo = -1.0 + h * k as f64;
            let hi = lo + h;
            mass.push(gl.integrate(lo, hi, raw));
            first.push(gl.integrate(lo, hi, |t| (t - lo) * raw(t)));
        }
        let total: f64 = mass.iter().sum();
        let norm = 1.0 / total;
        let mut f = vec![0.0; CELLS + 1];
        let mut g = vec![0.0; CELLS + 1];
        for k in 0..CELLS {
            f[k + 1] = f[k] + mass[k] * norm;
            // ∫_{x_k}^{x_{k+1}} F = h F(x_{k+1}) - ∫ (t - x_k) Φ(t) dt
            g[k + 1] = g[k] + h * f[k + 1] - first[k] * norm;
        }
        // symmetry pins the endpoints exactly
        f[CELLS] = 1.0;
        Tables { norm, f, g }
    })
}

/// Normalization constant `C` with `∫Φ = 1`.
pub fn normalization() -> f64 {
    tables().norm
}

/// `Φ(x)`.
pub fn phi(x: f64) -> f64 {
    tables().norm * raw(x)
}

/// `Φ'(x)`.
pub fn phi_deriv(x: f64) -> f64 {
    tables().norm * raw_deriv(x)
}

/// `Φ_ε(x) = Φ(x/ε)/ε`.
pub fn phi_scaled(eps: f64, x: f64) -> f64 {
    phi(x / eps) / eps
}

fn hermite5(s: f64, h: f64, y0: [f64; 3], y1: [f64; 3]) -> f64 {
    let s2 = s * s;
    let s3 = s2 * s;
    let s4 = s3 * s;
    let s5 = s4 * s;
    let h0 = 1.0 - 10.0 * s3 + 15.0 * s4 - 6.0 * s5;
    let h1 = s - 6.0 * s3 + 8.0 * s4 - 3.0 * s5;
    let h2 = 0.5 * (s2 - 3.0 * s3 + 3.0 * s4 - s5);
    let h3 = 10.0 * s3 - 15.0 * s4 + 6.0 * s5;
    let h4 = -4.0 * s3 + 7.0 * s4 - 3.0 * s5;
    let h5 = 0.5 * (s3 - 2.0 * s4 + s5);
    y0[0] * h0
        + h * y0[1] * h1
        + h * h * y0[2] * h2
        + y1[0] * h3
        + h * y1[1] * h4
        + h * h * y1[2] * h5
}

fn cell(x: f64) -> (usize, f64, f64, f64) {
    let h = 2.0 / CELLS as f64;
    let pos = (x + 1.0) / h;
    let k = (pos.floor() as usize).min(CELLS - 1);
    let x0 = -1.0 + h * k as f64;
    (k, (x - x0) / h, x0, h)
}

/// Smooth step `F(x) = ∫_{-1}^x Φ`: 0 for `x ≤ -1`, 1 for `x ≥ 1`.
pub fn step(x: f64) -> f64 {
    if x <= -1.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let t = tables();
    let (k, s, x0, h) = cell(x);
    let x1 = x0 + h;
    hermite5(
        s,
        h,
        [t.f[k], phi(x0), phi_deriv(x0)],
        [t.f[k + 1], phi(x1), phi_deriv(x1)],
    )
}

/// `G(x) = ∫_{-∞}^x F`: 0 for `x ≤ -1`, `x` for `x ≥ 1`.
pub fn ramp(x: f64) -> f64 {
    if x <= -1.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return x;
    }
    let t = tables();
    let (k, s, x0, h) = cell(x);
    let x1 = x0 + h;
    hermite5(
        s,
        h,
        [t.g[k], t.f[k], phi(x0)],
        [t.g[k + 1], t.f[k + 1], phi(x1)],
    )
}

/// Decreasing template `â₁`: `π` for `t ≤ 0`, `0` for `t ≥ 1`.
pub fn ramp_down(t: f64) -> f64 {
    std::f64::consts::PI * (1.0 - step(2.0 * t - 1.0))
}

pub fn ramp_down_deriv(t: f64) -> f64 {
    -2.0 * std::f64::consts::PI * phi(2.0 * t - 1.0)
}

/// Negative bump template `â₂(x) = -exp(1 - 1/(1-x²))`: `-1` at `0`,
/// zero for `|x| ≥ 1`, monotone on each side of `0`.
pub fn dip(x: f64) -> f64 {
    -raw(x) * std::f64::consts::E
}

pub fn dip_deriv(x: f64) -> f64 {
    -raw_deriv(x) * std::f64::consts::E
}
