//! Quasiconformal self-maps of the disc used as composition symbols.
//!
//! Every symbol exposes closed-form Wirtinger derivatives and an inverse.
//! Radially structured maps `z ↦ b(r) e^{i(θ + a(r))}` share one
//! implementation in [`radial`].

pub mod example3;
pub mod mollifier;
pub mod radial;

use std::f64::consts::PI;
use std::fmt::Debug;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use example3::{tune_example3, Example3Params, Example3Profile, Example3Tuning};
pub use radial::{RadialProfile, RadialSymbol, StretchProfile, TwistProfile};

/// Below this modulus `∂φ` is treated as zero and the Beltrami coefficient
/// is undefined.
pub const DERIVATIVE_FLOOR: f64 = 1e-14;

/// Step used by the finite-difference Wirtinger oracle.
pub const FD_STEP: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Identity,
    Mobius,
    RadialTwist,
    RadialStretch,
    Example3,
    Custom,
}

/// A sense-preserving homeomorphism of the disc with closed-form
/// Wirtinger derivatives.
pub trait Symbol: Debug + Send + Sync {
    fn eval(&self, z: Complex64) -> Complex64;
    /// `∂φ = (φ_x - i φ_y)/2`.
    fn d_z(&self, z: Complex64) -> Complex64;
    /// `∂̄φ = (φ_x + i φ_y)/2`.
    fn d_zbar(&self, z: Complex64) -> Complex64;
    /// `ψ = φ⁻¹`.
    fn inverse(&self, w: Complex64) -> Complex64;
    fn family(&self) -> Family;
    /// Textual form accepted by [`parse_symbol`].
    fn spec(&self) -> String;
    /// Radii where the map changes formula. Quadrature panels split here.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
    /// Radii across which the derivatives jump. Finite differences are not
    /// meaningful within `FD_STEP` of these.
    fn kinks(&self) -> Vec<f64> {
        Vec::new()
    }
    /// Smallest `ρ` with `φ` conformal on `ρ < |z| < 1`; `None` if no such
    /// annulus exists.
    fn conformal_radius(&self) -> Option<f64>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Identity;

impl Symbol for Identity {
    fn eval(&self, z: Complex64) -> Complex64 {
        z
    }
    fn d_z(&self, _: Complex64) -> Complex64 {
        Complex64::new(1.0, 0.0)
    }
    fn d_zbar(&self, _: Complex64) -> Complex64 {
        Complex64::new(0.0, 0.0)
    }
    fn inverse(&self, w: Complex64) -> Complex64 {
        w
    }
    fn family(&self) -> Family {
        Family::Identity
    }
    fn spec(&self) -> String {
        "id".into()
    }
    fn conformal_radius(&self) -> Option<f64> {
        Some(0.0)
    }
}

/// Disc automorphism `z ↦ (c - z)/(1 - c̄z)`, an involution.
#[derive(Debug, Clone, Copy)]
pub struct Mobius {
    c: Complex64,
}

impl Mobius {
    pub fn new(c: Complex64) -> Result<Self> {
        if !(c.norm() < 1.0) {
            return Err(Error::Parameter(format!(
                "Möbius center {c} must satisfy |c| < 1"
            )));
        }
        Ok(Self { c })
    }

    pub fn center(&self) -> Complex64 {
        self.c
    }
}

impl Symbol for Mobius {
    fn eval(&self, z: Complex64) -> Complex64 {
        (self.c - z) / (1.0 - self.c.conj() * z)
    }
    fn d_z(&self, z: Complex64) -> Complex64 {
        let d = 1.0 - self.c.conj() * z;
        (self.c.norm_sqr() - 1.0) / (d * d)
    }
    fn d_zbar(&self, _: Complex64) -> Complex64 {
        Complex64::new(0.0, 0.0)
    }
    fn inverse(&self, w: Complex64) -> Complex64 {
        self.eval(w)
    }
    fn family(&self) -> Family {
        Family::Mobius
    }
    fn spec(&self) -> String {
        format!("mobius:{},{}", self.c.re, self.c.im)
    }
    fn conformal_radius(&self) -> Option<f64> {
        Some(0.0)
    }
}

/// `μ = ∂̄φ/∂φ`.
pub fn beltrami(symbol: &dyn Symbol, z: Complex64) -> Result<Complex64> {
    let dz = symbol.d_z(z);
    if !(dz.norm() > DERIVATIVE_FLOOR) {
        return Err(Error::DegenerateDerivative {
            re: z.re,
            im: z.im,
            modulus: dz.norm(),
        });
    }
    Ok(symbol.d_zbar(z) / dz)
}

/// `J = |∂φ|² - |∂̄φ|²`.
pub fn jacobian(symbol: &dyn Symbol, z: Complex64) -> f64 {
    symbol.d_z(z).norm_sqr() - symbol.d_zbar(z).norm_sqr()
}

/// Centered finite-difference Wirtinger derivatives `(∂φ, ∂̄φ)`.
pub fn fd_wirtinger(symbol: &dyn Symbol, z: Complex64, h: f64) -> (Complex64, Complex64) {
    let fx = (symbol.eval(z + h) - symbol.eval(z - h)) / (2.0 * h);
    let dy = Complex64::new(0.0, h);
    let fy = (symbol.eval(z + dy) - symbol.eval(z - dy)) / (2.0 * h);
    let i = Complex64::i();
    (0.5 * (fx - i * fy), 0.5 * (fx + i * fy))
}

/// Summary of a symbol checked on a polar sample grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ValidationReport {
    pub points: usize,
    pub sup_mu: f64,
    pub min_jacobian: f64,
    pub max_modulus: f64,
    /// `max |ψ(φ(z)) - z|`.
    pub max_inverse_error: f64,
    /// `max |φ(ψ(z)) - z|`.
    pub max_forward_error: f64,
    /// Max deviation of closed-form from finite-difference derivatives.
    pub max_fd_discrepancy: f64,
}

impl ValidationReport {
    pub fn is_qc_homeomorphism(&self, tol: f64) -> bool {
        self.sup_mu < 1.0
            && self.min_jacobian > 0.0
            && self.max_modulus < 1.0
            && self.max_inverse_error <= tol
            && self.max_forward_error <= tol
    }
}

/// Polar sample grid: `density` radii `r_max (i + 1/2)/density` and
/// `density` angles, dropping points within `10 FD_STEP` of a kink.
pub fn sample_grid(symbol: &dyn Symbol, density: usize, r_max: f64) -> Vec<Complex64> {
    let kinks = symbol.kinks();
    let mut pts = Vec::with_capacity(density * density);
    for i in 0..density {
        let r = r_max * (i as f64 + 0.5) / density as f64;
        if kinks.iter().any(|&k| (r - k).abs() < 10.0 * FD_STEP) {
            continue;
        }
        for j in 0..density {
            let t = 2.0 * PI * (j as f64 + 0.25) / density as f64;
            pts.push(Complex64::from_polar(r, t));
        }
    }
    pts
}

/// Checks the map on `sample_grid(density, 0.95)`.
pub fn validate(symbol: &dyn Symbol, density: usize) -> Result<ValidationReport> {
    let pts = sample_grid(symbol, density, 0.95);
    let mut rep = ValidationReport {
        points: pts.len(),
        sup_mu: 0.0,
        min_jacobian: f64::INFINITY,
        max_modulus: 0.0,
        max_inverse_error: 0.0,
        max_forward_error: 0.0,
        max_fd_discrepancy: 0.0,
    };
    for &z in &pts {
        let mu = beltrami(symbol, z)?.norm();
        rep.sup_mu = rep.sup_mu.max(mu);
        rep.min_jacobian = rep.min_jacobian.min(jacobian(symbol, z));
        let w = symbol.eval(z);
        rep.max_modulus = rep.max_modulus.max(w.norm());
        rep.max_inverse_error = rep.max_inverse_error.max((symbol.inverse(w) - z).norm());
        rep.max_forward_error = rep
            .max_forward_error
            .max((symbol.eval(symbol.inverse(z)) - z).norm());
        let (fz, fzb) = fd_wirtinger(symbol, z, FD_STEP);
        let d = (fz - symbol.d_z(z))
            .norm()
            .max((fzb - symbol.d_zbar(z)).norm());
        rep.max_fd_discrepancy = rep.max_fd_discrepancy.max(d);
    }
    Ok(rep)
}

fn parse_f64(input: &str, field: &str) -> Result<f64> {
    field.trim().parse::<f64>().map_err(|e| Error::Parse {
        input: input.into(),
        reason: format!("`{field}`: {e}"),
    })
}

/// Parses `id`, `mobius:<re>,<im>`, `twist:poly:<C>`, `stretch:<a>:<R>`,
/// `example3:auto` or `example3:<δ_a>:<δ>:<δ_b>`.
pub fn parse_symbol(spec: &str) -> Result<Box<dyn Symbol>> {
    let bad = |reason: &str| Error::Parse {
        input: spec.into(),
        reason: reason.into(),
    };
    let parts: Vec<&str> = spec.trim().split(':').collect();
    match parts.as_slice() {
        ["id"] | ["identity"] => Ok(Box::new(Identity)),
        ["mobius", c] => {
            let (re, im) = c.split_once(',').ok_or_else(|| bad("expected mobius:<re>,<im>"))?;
            let c = Complex64::new(parse_f64(spec, re)?, parse_f64(spec, im)?);
            Ok(Box::new(Mobius::new(c)?))
        }
        ["twist", "poly", c] => Ok(Box::new(RadialSymbol::twist(parse_f64(spec, c)?)?)),
        ["stretch", a, r] => Ok(Box::new(RadialSymbol::stretch(
            parse_f64(spec, a)?,
            parse_f64(spec, r)?,
        )?)),
        ["example3", "auto"] => {
            let tuning = tune_example3()?;
            Ok(Box::new(RadialSymbol::example3(tuning.params)?))
        }
        ["example3", da, d, db] => Ok(Box::new(RadialSymbol::example3(Example3Params {
            delta_a: parse_f64(spec, da)?,
            delta: parse_f64(spec, d)?,
            delta_b: parse_f64(spec, db)?,
        })?)),
        _ => Err(bad(
            "expected id, mobius:<re>,<im>, twist:poly:<C>, stretch:<a>:<R>, example3:auto or example3:<da>:<d>:<db>",
        )),
    }
}
