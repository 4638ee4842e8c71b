//! Orthonormal monomial basis `e_n = z^n/√h_n` of the weighted Bergman
//! space, its reproducing-kernel diagonals, coefficient-space projection and
//! the constants `d_P`, `d_LP`, `β_∞`.

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimate::Estimate;
use crate::quadrature::QuadratureRule;
use crate::weights::Weight;

/// Number of radial samples of `[0, 1/2]` used for `β_∞`.
pub const BETA_INFTY_SAMPLES: usize = 2001;

#[derive(Debug, Clone)]
pub struct BasisTable {
    weight: Weight,
    p: f64,
    h: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelDiag {
    pub k_zz: f64,
    pub k1_zz: f64,
}

/// Truncated Littlewood–Paley constant with its convergence trend.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LittlewoodPaley {
    pub value: f64,
    /// `g_n = ∫|e_n'|² ρ₂ ω dA`, `n < N`.
    pub g: Vec<f64>,
    pub g_last: f64,
    pub g_half: f64,
}

impl BasisTable {
    pub fn new(weight: Weight, p: f64, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Parameter("basis size must be positive".into()));
        }
        let h = weight.moments(p, n)?;
        Ok(Self { weight, p, h })
    }

    pub fn weight(&self) -> &Weight {
        &self.weight
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn len(&self) -> usize {
        self.h.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h.is_empty()
    }

    pub fn moments(&self) -> &[f64] {
        &self.h
    }

    pub fn h(&self, n: usize) -> f64 {
        self.h[n]
    }

    fn require_hilbert(&self) -> Result<()> {
        if self.p != 2.0 {
            return Err(Error::Parameter(format!(
                "operation requires p = 2, basis has p = {}",
                self.p
            )));
        }
        Ok(())
    }

    pub fn e(&self, n: usize, z: Complex64) -> Complex64 {
        z.powu(n as u32) / self.h[n].sqrt()
    }

    pub fn e_prime(&self, n: usize, z: Complex64) -> Complex64 {
        if n == 0 {
            return Complex64::new(0.0, 0.0);
        }
        z.powu(n as u32 - 1) * (n as f64 / self.h[n].sqrt())
    }

    /// `c_n = ∫ f conj(e_n) ω dA` for `n < N`, so that `P_ω f ≈ Σ c_n e_n`.
    pub fn project_coeffs<F: Fn(Complex64) -> Complex64>(
        &self,
        f: F,
        rule: &QuadratureRule,
    ) -> Result<Vec<Complex64>> {
        self.require_hilbert()?;
        let n = self.len();
        rule.check_mode(n as i64 - 1)?;
        let nt = rule.n_theta();
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(nt);
        let mut ring = vec![Complex64::new(0.0, 0.0); nt];
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for &(r, w) in rule.radial_nodes() {
            for (j, slot) in ring.iter_mut().enumerate() {
                let theta = rule.angle(j);
                let v = f(Complex64::from_polar(r, theta));
                if !(v.re.is_finite() && v.im.is_finite()) {
                    return Err(Error::Evaluation { r, theta });
                }
                *slot = v;
            }
            fft.process(&mut ring);
            let base = w * 2.0 * r * self.weight.omega(r) / nt as f64;
            let mut rn = 1.0;
            for (k, c) in out.iter_mut().enumerate() {
                *c += ring[k] * (base * rn / self.h[k].sqrt());
                rn *= r;
            }
        }
        Ok(out)
    }

    /// Evaluates `Σ c_n e_n(z)`.
    pub fn synthesize(&self, coeffs: &[Complex64], z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut zn = Complex64::new(1.0, 0.0);
        for (n, c) in coeffs.iter().enumerate() {
            acc += c * zn / self.h[n].sqrt();
            zn *= z;
        }
        acc
    }

    pub fn kernel_diag(&self, z: Complex64) -> Result<KernelDiag> {
        let r2 = z.norm_sqr();
        if !(r2 < 1.0) {
            return Err(Error::Domain { re: z.re, im: z.im });
        }
        let mut k_zz = 0.0;
        let mut k1_zz = 0.0;
        let mut pow = 1.0; // r^{2n}
        let mut pow_prev = 0.0; // r^{2(n-1)}
        for (n, &h) in self.h.iter().enumerate() {
            k_zz += pow / h;
            if n > 0 {
                let nf = n as f64;
                k1_zz += nf * nf * pow_prev / h;
            }
            pow_prev = pow;
            pow *= r2;
        }
        Ok(KernelDiag { k_zz, k1_zz })
    }

    /// `sup_{|z|≤1/2} max(√K(z,z), √K₁(z,z))` over the truncated basis.
    pub fn beta_infty(&self) -> Result<f64> {
        self.require_hilbert()?;
        let mut best: f64 = 0.0;
        for i in 0..BETA_INFTY_SAMPLES {
            let r = 0.5 * i as f64 / (BETA_INFTY_SAMPLES - 1) as f64;
            let k = self.kernel_diag(Complex64::new(r, 0.0))?;
            best = best.max(k.k_zz.sqrt()).max(k.k1_zz.sqrt());
        }
        Ok(best)
    }

    /// Truncated Littlewood–Paley constant. The form `∫|f'|²ρ₂ω dA` is
    /// diagonal in the monomial basis, so `d_LP² = max_n g_n`.
    pub fn d_lp(&self) -> Result<LittlewoodPaley> {
        self.require_hilbert()?;
        let w = self.weight;
        let mut g = Vec::with_capacity(self.len());
        for n in 0..self.len() {
            if n == 0 {
                g.push(0.0);
                continue;
            }
            let m = w.radial_moment(n - 1, |r| w.rho2(r) * w.omega(r))?;
            g.push((n * n) as f64 * m / self.h[n]);
        }
        let max = g.iter().copied().fold(0.0, f64::max);
        let n = g.len();
        Ok(LittlewoodPaley {
            value: max.sqrt(),
            g_last: g[n - 1],
            g_half: g[n / 2],
            g,
        })
    }

    /// Norm of `P_ω` on `L^p_ν`. Exact at `p = 2`; otherwise a lower bound
    /// from a fixed family of test fields (see [`projection_ratio_family`]).
    pub fn d_p(&self, p: f64) -> Result<Estimate> {
        if !(p > 1.0 && p.is_finite()) {
            return Err(Error::Parameter(format!("p must lie in (1, inf), got {p}")));
        }
        if p == 2.0 {
            return Ok(Estimate::exact(1.0));
        }
        let best = projection_ratio_family(&self.weight, p, 6)?
            .into_iter()
            .map(|t| t.ratio)
            .fold(0.0, f64::max);
        Ok(Estimate::lower(best))
    }
}

/// One test field `f = z^k q(|z|²)` (or `z̄^{|k|} q(|z|²)`) used for `d_P`.
#[derive(Debug, Clone, Serialize)]
pub struct ProjectionTrial {
    pub mode: i64,
    /// Coefficients of `q` in powers of `|z|²`.
    pub radial: Vec<f64>,
    pub ratio: f64,
}

/// Ratios `‖P_ω f‖_{p,ν}/‖f‖_{p,ν}` over the family
/// `z^a z̄^b` (`a, b ≤ degree`) and `z^k (1 - s|z|²)` for `|k| ≤ 4`,
/// `s ∈ {1/2, 1, 3/2, 2}`.
///
/// `P_ω` acts exactly: `P_ω(z^a z̄^b) = (h_a/h_{a-b}) z^{a-b}` for `a ≥ b`,
/// zero otherwise, with `h` the `ω`-moments. Norms are radial integrals.
pub fn projection_ratio_family(
    weight: &Weight,
    p: f64,
    degree: usize,
) -> Result<Vec<ProjectionTrial>> {
    let h = weight.moments(2.0, 2 * degree + 6)?;
    let mut trials = Vec::new();
    let mut push = |mode: i64, radial: Vec<f64>| -> Result<()> {
        // f = r^{|k|} e^{ikθ} q(r²); P f = e_k-multiple when k >= 0.
        let k = mode.unsigned_abs() as usize;
        let q = |t: f64| radial.iter().rev().fold(0.0, |acc, c| acc * t + c);
        let f_norm = lp_radial_norm(weight, p, k, &q)?;
        let pf = if mode >= 0 {
            // <z^k q, z^k> / h_k = Σ c_j h_{k+j} / h_k
            let c: f64 = radial
                .iter()
                .enumerate()
                .map(|(j, c)| c * h[k + j])
                .sum::<f64>()
                / h[k];
            c.abs() * lp_radial_norm(weight, p, k, &|_| 1.0)?
        } else {
            0.0
        };
        trials.push(ProjectionTrial {
            mode,
            ratio: pf / f_norm,
            radial,
        });
        Ok(())
    };
    for a in 0..=degree {
        for b in 0..=degree {
            let mode = a as i64 - b as i64;
            let j = a.min(b);
            let mut radial = vec![0.0; j + 1];
            radial[j] = 1.0;
            push(mode, radial)?;
        }
    }
    for k in -4i64..=4 {
        for s in [0.5, 1.0, 1.5, 2.0] {
            push(k, vec![1.0, -s])?;
        }
    }
    Ok(trials)
}

/// `(∫ |r^k q(r²)|^p ν_p dA)^{1/p}`.
fn lp_radial_norm<Q: Fn(f64) -> f64>(weight: &Weight, p: f64, k: usize, q: &Q) -> Result<f64> {
    let v = crate::quadrature::integrate_adaptive(
        |t| {
            if t >= 1.0 {
                return 0.0;
            }
            let r = t.sqrt();
            let nu = weight.nu(p, r);
            if nu == 0.0 {
                return 0.0;
            }
            (r.powi(k as i32) * q(t)).abs().powf(p) * nu
        },
        0.0,
        1.0,
        1e-11,
    )?;
    Ok(v.powf(1.0 / p))
}
