//! A smooth quasiconformal symbol whose composition operator sends `z` into
//! the orthogonal complement of the Bergman space, so that `K_φ z = 0`.
//!
//! The angle is `π` on `[0, R]`, ramps down to `0` on `[R, R + δ]` and dips
//! to `-1` on `[R', R' + δ_a]`. The modulus is a mollified piecewise linear
//! profile that climbs from `r` to almost `R` on `[δ_b/2, δ_b]` and equals `r`
//! on `[R - δ_b/10, 1]`. The three widths are tuned so that
//! `∫_0^1 b(r) r² e^{i a(r)} dr = 0`.

use serde::{Deserialize, Serialize};

use super::mollifier::{dip, dip_deriv, ramp, ramp_down, ramp_down_deriv, step};
use super::radial::RadialProfile;
use crate::error::{Error, Result};
use crate::quadrature::composite_nodes;

/// Inner radius `(3/7)^{1/4}`, where the half-turn cancellation is exact.
pub fn inner_radius() -> f64 {
    (3.0f64 / 7.0).powf(0.25)
}

/// Centre of the compensating dip.
pub const DIP_START: f64 = 0.9;

pub const MAX_DELTA: f64 = 0.05;
pub const MAX_DELTA_A: f64 = 0.05;
pub const MAX_DELTA_B: f64 = 0.1;

/// Residual bound accepted by [`tune_example3`].
pub const TUNING_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Example3Params {
    pub delta_a: f64,
    pub delta: f64,
    pub delta_b: f64,
}

#[derive(Debug, Clone)]
pub struct Example3Profile {
    params: Example3Params,
    r_in: f64,
    eps: f64,
    knots: [f64; 3],
    slope_jumps: [f64; 3],
}

impl Example3Profile {
    pub fn new(params: Example3Params) -> Result<Self> {
        let Example3Params {
            delta_a,
            delta,
            delta_b,
        } = params;
        let open = |x: f64, hi: f64| x > 0.0 && x < hi;
        if !(open(delta_a, MAX_DELTA_A) && open(delta, MAX_DELTA) && open(delta_b, MAX_DELTA_B)) {
            return Err(Error::Parameter(format!(
                "example3 widths must satisfy 0 < delta_a < {MAX_DELTA_A}, 0 < delta < {MAX_DELTA}, 0 < delta_b < {MAX_DELTA_B}; got {params:?}"
            )));
        }
        let r_in = inner_radius();
        let eps = delta_b / 10.0;
        // slope 1 resumes 2ε before R so the mollified profile is exactly r on [R - ε, 1]
        let knots = [0.5 * delta_b, delta_b, r_in - 2.0 * eps];
        let s1 = (r_in - delta_b - knots[0]) / (knots[1] - knots[0]);
        let s2 = (knots[2] - (r_in - delta_b)) / (knots[2] - knots[1]);
        Ok(Self {
            params,
            r_in,
            eps,
            knots,
            slope_jumps: [s1 - 1.0, s2 - s1, 1.0 - s2],
        })
    }

    pub fn params(&self) -> Example3Params {
        self.params
    }

    pub fn conformal_radius(&self) -> f64 {
        DIP_START + self.params.delta_a
    }

    /// Unsmoothed piecewise linear modulus.
    fn hat(&self, r: f64) -> f64 {
        let [t1, t2, t3] = self.knots;
        if r < t1 || r >= t3 {
            r
        } else if r < t2 {
            t1 + (1.0 + self.slope_jumps[0]) * (r - t1)
        } else {
            self.r_in - self.params.delta_b + (1.0 - self.slope_jumps[2]) * (r - t2)
        }
    }

    fn hat_slope(&self, r: f64) -> f64 {
        let [t1, t2, t3] = self.knots;
        if r < t1 || r >= t3 {
            1.0
        } else if r < t2 {
            1.0 + self.slope_jumps[0]
        } else {
            1.0 - self.slope_jumps[2]
        }
    }

    fn linear_zone(&self, r: f64) -> bool {
        r <= self.knots[0] - self.eps || r >= self.knots[2] + self.eps
    }

    /// Panel edges splitting every region where a formula changes.
    pub fn edges(&self) -> Vec<f64> {
        let mut e = vec![0.0, 1.0];
        for &t in &self.knots {
            e.extend([t - self.eps, t + self.eps]);
        }
        e.extend([
            self.r_in,
            self.r_in + self.params.delta,
            DIP_START,
            DIP_START + self.params.delta_a,
        ]);
        e.sort_by(f64::total_cmp);
        e.dedup();
        e
    }
}

impl RadialProfile for Example3Profile {
    fn modulus(&self, r: f64) -> f64 {
        if self.linear_zone(r) {
            return r;
        }
        let mut b = self.hat(r);
        for (&t, &ds) in self.knots.iter().zip(&self.slope_jumps) {
            let x = (r - t) / self.eps;
            if x.abs() < 1.0 {
                b += ds * self.eps * (ramp(x) - x.max(0.0));
            }
        }
        b
    }

    fn modulus_deriv(&self, r: f64) -> f64 {
        if self.linear_zone(r) {
            return 1.0;
        }
        let mut d = self.hat_slope(r);
        for (&t, &ds) in self.knots.iter().zip(&self.slope_jumps) {
            let x = (r - t) / self.eps;
            if x.abs() < 1.0 {
                d += ds * (step(x) - if x > 0.0 { 1.0 } else { 0.0 });
            }
        }
        d
    }

    fn angle(&self, r: f64) -> f64 {
        let Example3Params { delta_a, delta, .. } = self.params;
        if r <= self.r_in {
            std::f64::consts::PI
        } else if r < self.r_in + delta {
            ramp_down((r - self.r_in) / delta)
        } else if r > DIP_START && r < DIP_START + delta_a {
            dip(2.0 * (r - DIP_START) / delta_a - 1.0)
        } else {
            0.0
        }
    }

    fn angle_deriv(&self, r: f64) -> f64 {
        let Example3Params { delta_a, delta, .. } = self.params;
        if r > self.r_in && r < self.r_in + delta {
            ramp_down_deriv((r - self.r_in) / delta) / delta
        } else if r > DIP_START && r < DIP_START + delta_a {
            dip_deriv(2.0 * (r - DIP_START) / delta_a - 1.0) * 2.0 / delta_a
        } else {
            0.0
        }
    }

    fn modulus_inverse(&self, s: f64) -> f64 {
        let (lo0, hi0) = (self.knots[0] - self.eps, self.knots[2] + self.eps);
        if s <= lo0 || s >= hi0 {
            return s;
        }
        // b is strictly increasing with b = id outside (lo0, hi0)
        let (mut lo, mut hi) = (lo0, hi0);
        let mut r = 0.5 * (lo + hi);
        for _ in 0..200 {
            let f = self.modulus(r) - s;
            if f.abs() <= 1e-15 {
                break;
            }
            if f > 0.0 {
                hi = r;
            } else {
                lo = r;
            }
            let newton = r - f / self.modulus_deriv(r);
            r = if newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            if hi - lo < 1e-16 {
                break;
            }
        }
        r
    }

    fn breakpoints(&self) -> Vec<f64> {
        let e = self.edges();
        e[1..e.len() - 1].to_vec()
    }
}

/// Sub-panels per region and nodes per sub-panel for the tuning integrals.
const SUBPANELS: usize = 8;
const ORDER: usize = 32;

/// `∫_lo^hi f` on a composite rule aligned with `edges`.
fn integrate_aligned<F: Fn(f64) -> f64>(edges: &[f64], lo: f64, hi: f64, f: F) -> f64 {
    let mut e: Vec<f64> = vec![lo, hi];
    e.extend(edges.iter().copied().filter(|&x| x > lo && x < hi));
    e.sort_by(f64::total_cmp);
    e.dedup();
    let mut fine = Vec::with_capacity(e.len() * SUBPANELS);
    for pair in e.windows(2) {
        for k in 0..SUBPANELS {
            fine.push(pair[0] + (pair[1] - pair[0]) * k as f64 / SUBPANELS as f64);
        }
    }
    fine.push(hi);
    composite_nodes(&fine, ORDER)
        .into_iter()
        .map(|(x, w)| w * f(x))
        .sum()
}

/// `(I_Re, I_Im) = ∫_0^1 b(r) r² (cos a(r), sin a(r)) dr`.
pub fn first_mode_integral(profile: &Example3Profile) -> (f64, f64) {
    let edges = profile.edges();
    let re = integrate_aligned(&edges, 0.0, 1.0, |r| {
        profile.modulus(r) * r * r * profile.angle(r).cos()
    });
    let im = integrate_aligned(&edges, 0.0, 1.0, |r| {
        profile.modulus(r) * r * r * profile.angle(r).sin()
    });
    (re, im)
}

/// `-R⁴/3 + (1 - R⁴)/4`, the first-mode integral of the unsmoothed
/// half-turn profile (`b = R`, `a = π` inside `R`; identity outside).
pub fn step_profile_integral(r_in: f64) -> f64 {
    let r4 = r_in.powi(4);
    -r4 / 3.0 + (1.0 - r4) / 4.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Example3Tuning {
    #[serde(flatten)]
    pub params: Example3Params,
    #[serde(rename = "I_Re")]
    pub i_re: f64,
    #[serde(rename = "I_Im")]
    pub i_im: f64,
    /// Ramp contribution `∫_R^{R+δ} r³ sin a`.
    pub ramp_term: f64,
    /// Dip contribution `∫_{R'}^{R'+δ_a} r³ sin a`.
    pub dip_term: f64,
    /// `(1 - R⁴)/4 - ∫_R^1 r³ cos a`.
    pub outer_deficit: f64,
    /// `-∫_0^R b r² dr + R⁴/3`.
    pub inner_excess: f64,
    /// Ramp widths tried before the brackets closed.
    pub deltas_tried: Vec<f64>,
}

fn bisect<F: Fn(f64) -> f64>(lo: f64, hi: f64, f: F) -> f64 {
    // f(lo) < 0 < f(hi)
    let (mut lo, mut hi) = (lo, hi);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn profile_for(delta_a: f64, delta: f64, delta_b: f64) -> Example3Profile {
    Example3Profile::new(Example3Params {
        delta_a,
        delta,
        delta_b,
    })
    .expect("widths are kept inside their open ranges")
}

/// Chooses `δ`, then `δ_a` to cancel the imaginary part, then `δ_b` to
/// cancel the real part. `δ` starts at `0.01` and halves while either
/// bracket fails.
pub fn tune_example3() -> Result<Example3Tuning> {
    let r_in = inner_radius();
    let r4 = r_in.powi(4);
    let top = |max: f64| max * (1.0 - 1e-9);
    let mut tried = Vec::new();
    let mut delta = 0.01;
    while delta > 1e-4 {
        tried.push(delta);
        let base = profile_for(0.01, delta, 0.05);
        let ramp_term = integrate_aligned(&base.edges(), r_in, r_in + delta, |r| {
            r.powi(3) * base.angle(r).sin()
        });
        let dip_term = |da: f64| {
            let p = profile_for(da, delta, 0.05);
            integrate_aligned(&p.edges(), DIP_START, DIP_START + da, |r| {
                r.powi(3) * p.angle(r).sin()
            })
        };
        if dip_term(top(MAX_DELTA_A)) + ramp_term > 0.0 {
            delta *= 0.5;
            continue;
        }
        // dip_term decreases in δ_a
        let delta_a = bisect(0.0, top(MAX_DELTA_A), |da| -(dip_term(da) + ramp_term));
        let outer = profile_for(delta_a, delta, 0.05);
        let outer_deficit = (1.0 - r4) / 4.0
            - integrate_aligned(&outer.edges(), r_in, 1.0, |r| {
                r.powi(3) * outer.angle(r).cos()
            });
        let inner_excess = |db: f64| {
            let p = profile_for(delta_a, delta, db);
            r4 / 3.0 - integrate_aligned(&p.edges(), 0.0, r_in, |r| p.modulus(r) * r * r)
        };
        if inner_excess(top(MAX_DELTA_B)) < outer_deficit {
            delta *= 0.5;
            continue;
        }
        let delta_b = bisect(0.0, top(MAX_DELTA_B), |db| inner_excess(db) - outer_deficit);
        let params = Example3Params {
            delta_a,
            delta,
            delta_b,
        };
        let profile = Example3Profile::new(params)?;
        let (i_re, i_im) = first_mode_integral(&profile);
        if i_re.abs() > TUNING_TOLERANCE || i_im.abs() > TUNING_TOLERANCE {
            return Err(Error::Tuning(format!(
                "residuals I_Re = {i_re:e}, I_Im = {i_im:e} exceed {TUNING_TOLERANCE:e} at {params:?}"
            )));
        }
        return Ok(Example3Tuning {
            params,
            i_re,
            i_im,
            ramp_term,
            dip_term: dip_term(delta_a),
            outer_deficit,
            inner_excess: inner_excess(delta_b),
            deltas_tried: tried,
        });
    }
    Err(Error::Tuning(format!(
        "no admissible (delta_a, delta_b) for ramp widths {tried:?}"
    )))
}
