//! Maps of the form `φ(r e^{iθ}) = b(r) e^{i(θ + a(r))}`.
//!
//! With `g = b e^{ia}/r`, `φ = z g(|z|)` and
//!
//! ```text
//! ∂φ = e^{ia}/2 · (b/r + b' + i a' b)
//! ∂̄φ = (z/r)² e^{ia}/2 · (b' - b/r + i a' b)
//! J  = b b'/r
//! ```

use std::fmt::Debug;
use std::sync::Arc;

use num_complex::Complex64;

use super::example3::{Example3Params, Example3Profile};
use super::{Family, Symbol};
use crate::error::{Error, Result};

/// Radial modulus `b` and angular shift `a` of a radially structured map.
pub trait RadialProfile: Debug + Send + Sync {
    fn modulus(&self, r: f64) -> f64;
    fn modulus_deriv(&self, r: f64) -> f64;
    /// `b(r)/r`, continuous at `r = 0`.
    fn modulus_ratio(&self, r: f64) -> f64 {
        if r == 0.0 {
            self.modulus_deriv(0.0)
        } else {
            self.modulus(r) / r
        }
    }
    fn angle(&self, r: f64) -> f64;
    fn angle_deriv(&self, r: f64) -> f64;
    /// `b⁻¹(s)` for `s ∈ [0, 1)`.
    fn modulus_inverse(&self, s: f64) -> f64;
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
    fn kinks(&self) -> Vec<f64> {
        Vec::new()
    }
}

/// `b(r) = r`, `a(r) = C (r - r³/3)`: area preserving and `|φ(z)| = |z|`.
#[derive(Debug, Clone, Copy)]
pub struct TwistProfile {
    pub c: f64,
}

impl RadialProfile for TwistProfile {
    fn modulus(&self, r: f64) -> f64 {
        r
    }
    fn modulus_deriv(&self, _: f64) -> f64 {
        1.0
    }
    fn modulus_ratio(&self, _: f64) -> f64 {
        1.0
    }
    fn angle(&self, r: f64) -> f64 {
        self.c * (r - r * r * r / 3.0)
    }
    fn angle_deriv(&self, r: f64) -> f64 {
        self.c * (1.0 - r * r)
    }
    fn modulus_inverse(&self, s: f64) -> f64 {
        s
    }
}

/// `b(r) = R^{1-a} r^a` on `[0, R]` and `b(r) = r` beyond, `a(r) = 0`.
#[derive(Debug, Clone, Copy)]
pub struct StretchProfile {
    pub exponent: f64,
    pub radius: f64,
}

impl StretchProfile {
    fn scale(&self) -> f64 {
        self.radius.powf(1.0 - self.exponent)
    }
}

impl RadialProfile for StretchProfile {
    fn modulus(&self, r: f64) -> f64 {
        if r <= self.radius {
            self.scale() * r.powf(self.exponent)
        } else {
            r
        }
    }
    fn modulus_deriv(&self, r: f64) -> f64 {
        if r <= self.radius {
            self.exponent * self.scale() * r.powf(self.exponent - 1.0)
        } else {
            1.0
        }
    }
    fn modulus_ratio(&self, r: f64) -> f64 {
        if r <= self.radius {
            self.scale() * r.powf(self.exponent - 1.0)
        } else {
            1.0
        }
    }
    fn angle(&self, _: f64) -> f64 {
        0.0
    }
    fn angle_deriv(&self, _: f64) -> f64 {
        0.0
    }
    fn modulus_inverse(&self, s: f64) -> f64 {
        if s <= self.radius {
            self.radius.powf(1.0 - 1.0 / self.exponent) * s.powf(1.0 / self.exponent)
        } else {
            s
        }
    }
    fn breakpoints(&self) -> Vec<f64> {
        vec![self.radius]
    }
    fn kinks(&self) -> Vec<f64> {
        if self.exponent == 1.0 {
            Vec::new()
        } else {
            vec![self.radius]
        }
    }
}

#[derive(Debug, Clone)]
pub struct RadialSymbol {
    profile: Arc<dyn RadialProfile>,
    family: Family,
    spec: String,
    conformal_radius: Option<f64>,
}

impl RadialSymbol {
    pub fn new(
        profile: Arc<dyn RadialProfile>,
        family: Family,
        spec: String,
        conformal_radius: Option<f64>,
    ) -> Self {
        Self {
            profile,
            family,
            spec,
            conformal_radius,
        }
    }

    /// Radial twist with angle `C (r - r³/3)`.
    pub fn twist(c: f64) -> Result<Self> {
        if !c.is_finite() {
            return Err(Error::Parameter(format!(
                "twist constant {c} is not finite"
            )));
        }
        Ok(Self::new(
            Arc::new(TwistProfile { c }),
            Family::RadialTwist,
            format!("twist:poly:{c}"),
            (c == 0.0).then_some(0.0),
        ))
    }

    /// Radial stretch `z ↦ R^{1-a} z |z|^{a-1}` inside `|z| ≤ R`, identity outside.
    pub fn stretch(exponent: f64, radius: f64) -> Result<Self> {
        if !(exponent > 0.0 && exponent.is_finite()) {
            return Err(Error::Parameter(format!(
                "stretch exponent {exponent} must be positive"
            )));
        }
        if !(radius > 0.0 && radius < 1.0) {
            return Err(Error::Parameter(format!(
                "stretch radius {radius} must lie in (0,1)"
            )));
        }
        let conformal = if exponent == 1.0 { 0.0 } else { radius };
        Ok(Self::new(
            Arc::new(StretchProfile { exponent, radius }),
            Family::RadialStretch,
            format!("stretch:{exponent}:{radius}"),
            Some(conformal),
        ))
    }

    /// Smoothed half-turn symbol with a vanishing first-mode image.
    pub fn example3(params: Example3Params) -> Result<Self> {
        let profile = Example3Profile::new(params)?;
        let conformal = profile.conformal_radius();
        Ok(Self::new(
            Arc::new(profile),
            Family::Example3,
            format!(
                "example3:{}:{}:{}",
                params.delta_a, params.delta, params.delta_b
            ),
            Some(conformal),
        ))
    }

    pub fn profile(&self) -> &dyn RadialProfile {
        self.profile.as_ref()
    }
}

fn unit_phase(z: Complex64) -> Complex64 {
    let r = z.norm();
    if r == 0.0 {
        Complex64::new(1.0, 0.0)
    } else {
        z / r
    }
}

impl Symbol for RadialSymbol {
    fn eval(&self, z: Complex64) -> Complex64 {
        let r = z.norm();
        if r == 0.0 {
            return z;
        }
        let p = &self.profile;
        z * p.modulus_ratio(r) * Complex64::from_polar(1.0, p.angle(r))
    }

    fn d_z(&self, z: Complex64) -> Complex64 {
        let r = z.norm();
        let p = &self.profile;
        let b = p.modulus(r);
        let inner = Complex64::new(
            p.modulus_ratio(r) + p.modulus_deriv(r),
            p.angle_deriv(r) * b,
        );
        0.5 * Complex64::from_polar(1.0, p.angle(r)) * inner
    }

    fn d_zbar(&self, z: Complex64) -> Complex64 {
        let r = z.norm();
        if r == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let p = &self.profile;
        let b = p.modulus(r);
        let inner = Complex64::new(
            p.modulus_deriv(r) - p.modulus_ratio(r),
            p.angle_deriv(r) * b,
        );
        let u = unit_phase(z);
        0.5 * u * u * Complex64::from_polar(1.0, p.angle(r)) * inner
    }

    fn inverse(&self, w: Complex64) -> Complex64 {
        let s = w.norm();
        if s == 0.0 {
            return w;
        }
        let r = self.profile.modulus_inverse(s);
        r * unit_phase(w) * Complex64::from_polar(1.0, -self.profile.angle(r))
    }

    fn family(&self) -> Family {
        self.family
    }

    fn spec(&self) -> String {
        self.spec.clone()
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.profile.breakpoints()
    }

    fn kinks(&self) -> Vec<f64> {
        self.profile.kinks()
    }

    fn conformal_radius(&self) -> Option<f64> {
        self.conformal_radius
    }
}
