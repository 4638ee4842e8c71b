//! Radial weights on the unit disc and the fields derived from them.
//!
//! Two families are supported: standard weights `(1-|z|²)^α` and the
//! exponential weights `exp(-b/(1-|z|²)^a)`. The latter are written as
//! `e^{-2φ}` with `φ = b(1-r²)^{-a}/2`, and `τ = (Δφ)^{-1/2}` is taken
//! exactly from the closed-form Laplacian.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::integrate_adaptive;

/// Default relative tolerance for radial moments.
pub const RTOL_MOMENT: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightKind {
    Standard { alpha: f64 },
    Exponential { a: f64, b: f64 },
}

/// Which of the two weight classes the weight belongs to. Standard weights
/// are upper doubling; exponential ones are rapidly decreasing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightClass {
    Standard,
    RapidlyDecreasing,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Weight {
    kind: WeightKind,
}

/// Pointwise values of the weight and its derived fields.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeightFields {
    pub omega: f64,
    pub rho2: f64,
    pub nu_p: f64,
    pub tau: Option<f64>,
    pub big_r: Option<f64>,
}

impl Weight {
    pub fn standard(alpha: f64) -> Result<Self> {
        if !(alpha >= 0.0 && alpha.is_finite()) {
            return Err(Error::Parameter(format!(
                "standard weight needs alpha >= 0, got {alpha}"
            )));
        }
        Ok(Self {
            kind: WeightKind::Standard { alpha },
        })
    }

    pub fn exponential(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
            return Err(Error::Parameter(format!(
                "exponential weight needs a, b > 0, got a={a}, b={b}"
            )));
        }
        let w = Self {
            kind: WeightKind::Exponential { a, b },
        };
        debug_assert!(w.laplacian_potential(0.0).unwrap() > 0.0);
        Ok(w)
    }

    /// The unweighted case `ω ≡ 1`.
    pub fn unweighted() -> Self {
        Self {
            kind: WeightKind::Standard { alpha: 0.0 },
        }
    }

    pub fn kind(&self) -> WeightKind {
        self.kind
    }

    pub fn class(&self) -> WeightClass {
        match self.kind {
            WeightKind::Standard { .. } => WeightClass::Standard,
            WeightKind::Exponential { .. } => WeightClass::RapidlyDecreasing,
        }
    }

    /// `ω(r)` for `r ∈ [0, 1)`; zero at and beyond the boundary.
    pub fn omega(&self, r: f64) -> f64 {
        let s = 1.0 - r * r;
        if s <= 0.0 {
            return 0.0;
        }
        match self.kind {
            WeightKind::Standard { alpha } => {
                if alpha == 0.0 {
                    1.0
                } else {
                    s.powf(alpha)
                }
            }
            WeightKind::Exponential { a, b } => (-b / s.powf(a)).exp(),
        }
    }

    /// `ln ω(r)`, finite wherever `ω(r) > 0` in exact arithmetic even if
    /// `ω(r)` underflows; `-∞` at and beyond the boundary.
    pub fn log_omega(&self, r: f64) -> f64 {
        let s = 1.0 - r * r;
        if s <= 0.0 {
            return f64::NEG_INFINITY;
        }
        match self.kind {
            WeightKind::Standard { alpha: 0.0 } => 0.0,
            WeightKind::Standard { alpha } => alpha * s.ln(),
            WeightKind::Exponential { a, b } => -b / s.powf(a),
        }
    }

    /// `ν_p(r)`: `ω` for standard weights, `ω^{p/2}` for exponential ones.
    pub fn nu(&self, p: f64, r: f64) -> f64 {
        match self.kind {
            WeightKind::Standard { .. } => self.omega(r),
            WeightKind::Exponential { a, b } => {
                let s = 1.0 - r * r;
                if s <= 0.0 {
                    0.0
                } else {
                    (-0.5 * p * b / s.powf(a)).exp()
                }
            }
        }
    }

    /// Laplacian of the potential `φ = b(1-r²)^{-a}/2` (exponential weights only).
    pub fn laplacian_potential(&self, r: f64) -> Option<f64> {
        match self.kind {
            WeightKind::Standard { .. } => None,
            WeightKind::Exponential { a, b } => {
                let s = 1.0 - r * r;
                Some(
                    2.0 * a * b * s.powf(-a - 1.0)
                        + 2.0 * a * (a + 1.0) * b * r * r * s.powf(-a - 2.0),
                )
            }
        }
    }

    pub fn tau(&self, r: f64) -> Option<f64> {
        self.laplacian_potential(r).map(|l| l.powf(-0.5))
    }

    /// `R(r) = τ(r)²/(1-r)`.
    pub fn big_r(&self, r: f64) -> Option<f64> {
        self.tau(r).map(|t| t * t / (1.0 - r))
    }

    /// Littlewood–Paley density: `(1-r²)²` or `R(r)²`.
    pub fn rho2(&self, r: f64) -> f64 {
        match self.kind {
            WeightKind::Standard { .. } => {
                let s = 1.0 - r * r;
                s * s
            }
            WeightKind::Exponential { .. } => {
                let big_r = self.big_r(r).expect("exponential weight has R");
                big_r * big_r
            }
        }
    }

    pub fn eval_fields(&self, z: Complex64, p: f64) -> Result<WeightFields> {
        let r = z.norm();
        if !(r < 1.0) {
            return Err(Error::Domain { re: z.re, im: z.im });
        }
        Ok(WeightFields {
            omega: self.omega(r),
            rho2: self.rho2(r),
            nu_p: self.nu(p, r),
            tau: self.tau(r),
            big_r: self.big_r(r),
        })
    }

    /// `h_n = ∫_𝔻 |z|^{2n} ν_p dA`.
    pub fn moment(&self, p: f64, n: usize) -> Result<f64> {
        if !(p > 1.0 && p.is_finite()) {
            return Err(Error::Parameter(format!("p must lie in (1, inf), got {p}")));
        }
        self.radial_moment(n, |r| self.nu(p, r))
    }

    /// `2∫_0^1 r^{2n+1} g(r) dr`, integrated in `t = r²` as `∫_0^1 t^n g(√t) dt`.
    pub fn radial_moment<G: Fn(f64) -> f64>(&self, n: usize, g: G) -> Result<f64> {
        radial_moment(n, g, RTOL_MOMENT)
    }

    /// Moments `h_0, …, h_{count-1}` for `ν_p`.
    pub fn moments(&self, p: f64, count: usize) -> Result<Vec<f64>> {
        (0..count).map(|n| self.moment(p, n)).collect()
    }
}

/// `2∫_0^1 r^{2n+1} g(r) dr` by adaptive quadrature in `t = r²`.
pub fn radial_moment<G: Fn(f64) -> f64>(n: usize, g: G, rtol: f64) -> Result<f64> {
    let ni = n as i32;
    integrate_adaptive(
        |t| {
            if t >= 1.0 {
                return 0.0;
            }
            let v = g(t.sqrt());
            if v == 0.0 {
                0.0
            } else {
                t.powi(ni) * v
            }
        },
        0.0,
        1.0,
        rtol,
    )
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            WeightKind::Standard { alpha } => write!(f, "standard:{alpha}"),
            WeightKind::Exponential { a, b } => write!(f, "exp:{a}:{b}"),
        }
    }
}

impl FromStr for Weight {
    type Err = Error;

    /// `standard:<alpha>` or `exp:<a>:<b>`.
    fn from_str(s: &str) -> Result<Self> {
        let err = |reason: &str| Error::Parse {
            input: s.to_string(),
            reason: reason.to_string(),
        };
        let parts: Vec<&str> = s.trim().split(':').collect();
        let num =
            |x: &str| -> Result<f64> { x.trim().parse::<f64>().map_err(|_| err("not a number")) };
        match parts.as_slice() {
            ["standard", alpha] => Weight::standard(num(alpha)?),
            ["exp", a, b] => Weight::exponential(num(a)?, num(b)?),
            _ => Err(err("expected standard:<alpha> or exp:<a>:<b>")),
        }
    }
}
