//! Truncated matrices of `K_φ = P_ω C_φ` in the orthonormal basis, bounds
//! for `C_φ`, singular-value diagnostics and the pull-back Carleson ratio.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::bergman::BasisTable;
use crate::error::{Error, Result};
use crate::quadrature::QuadratureRule;
use crate::symbols::{jacobian, Symbol};
use crate::weights::{Weight, WeightClass};

/// Ratios in the change-of-variables bound beyond this are reported as
/// evidence of unboundedness.
pub const NORM_CAP: f64 = 1e12;

/// Geometric panels used for rapidly decreasing weights.
pub const GRADED_PANELS: usize = 4;

/// `A[n][m] = ⟨K_φ e_m, e_n⟩_ω`.
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    entries: DMatrix<Complex64>,
    pub symbol: String,
    pub weight: Weight,
    pub p: f64,
    pub n_r: usize,
    pub n_theta: usize,
    pub fast_path: bool,
}

impl OperatorMatrix {
    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn get(&self, n: usize, m: usize) -> Complex64 {
        self.entries[(n, m)]
    }

    pub fn column_norm(&self, m: usize) -> f64 {
        self.entries.column(m).norm()
    }

    /// Frobenius norm of the off-diagonal part.
    pub fn off_diagonal_mass(&self) -> f64 {
        let n = self.dim();
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += self.entries[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    }

    pub fn max_entry_diff(&self, other: &Self) -> f64 {
        (&self.entries - &other.entries)
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    /// Row-major dump, one matrix row per line as `re,im` pairs.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for i in 0..self.dim() {
            let row: Vec<String> = (0..self.dim())
                .map(|j| {
                    let c = self.entries[(i, j)];
                    format!("{:e},{:e}", c.re, c.im)
                })
                .collect();
            let _ = writeln!(out, "{}", row.join(","));
        }
        out
    }
}

/// Radial rule split at the symbol's breakpoints, graded toward the
/// boundary for rapidly decreasing weights.
pub fn operator_rule(
    symbol: &dyn Symbol,
    weight: &Weight,
    n_r: usize,
    n_theta: usize,
) -> Result<QuadratureRule> {
    let bps = symbol.breakpoints();
    match weight.class() {
        WeightClass::Standard => QuadratureRule::with_breakpoints(n_r, n_theta, &bps),
        WeightClass::RapidlyDecreasing => QuadratureRule::graded(n_r, n_theta, GRADED_PANELS, &bps),
    }
}

fn symbol_grid(symbol: &dyn Symbol, rule: &QuadratureRule) -> Result<Vec<Complex64>> {
    let nt = rule.n_theta();
    let mut grid = Vec::with_capacity(rule.n_r() * nt);
    for &(r, _) in rule.radial_nodes() {
        for j in 0..nt {
            let theta = rule.angle(j);
            let w = symbol.eval(Complex64::from_polar(r, theta));
            if !(w.re.is_finite() && w.im.is_finite()) {
                return Err(Error::Evaluation { r, theta });
            }
            grid.push(w);
        }
    }
    Ok(grid)
}

/// Assembles `K_φ` by angular FFT per column and ring, then radial
/// quadrature. With `fast = false` every entry is a direct 2-D sum on the
/// same nodes.
pub fn assemble_k(
    symbol: &dyn Symbol,
    basis: &BasisTable,
    rule: &QuadratureRule,
    fast: bool,
) -> Result<OperatorMatrix> {
    if basis.p() != 2.0 {
        return Err(Error::Parameter(format!(
            "matrix assembly requires p = 2, basis has p = {}",
            basis.p()
        )));
    }
    let entries = assemble_section(symbol, basis, basis.len(), rule, fast)?;
    Ok(OperatorMatrix {
        entries,
        symbol: symbol.spec(),
        weight: *basis.weight(),
        p: basis.p(),
        n_r: rule.n_r(),
        n_theta: rule.n_theta(),
        fast_path: fast,
    })
}

/// `⟨K_φ e_m, e_k⟩` for `k < basis.len()` and `m < n_in`.
fn assemble_section(
    symbol: &dyn Symbol,
    basis: &BasisTable,
    n_in: usize,
    rule: &QuadratureRule,
    fast: bool,
) -> Result<DMatrix<Complex64>> {
    if n_in > basis.len() {
        return Err(Error::Parameter(format!(
            "section needs {n_in} input modes, basis has {}",
            basis.len()
        )));
    }
    rule.check_mode(basis.len() as i64 - 1)?;
    if fast {
        assemble_fast(symbol, basis, n_in, rule)
    } else {
        assemble_dense(symbol, basis, n_in, rule)
    }
}

fn assemble_fast(
    symbol: &dyn Symbol,
    basis: &BasisTable,
    n_in: usize,
    rule: &QuadratureRule,
) -> Result<DMatrix<Complex64>> {
    let n = basis.len();
    let nt = rule.n_theta();
    let grid = symbol_grid(symbol, rule)?;
    let fft = FftPlanner::new().plan_fft_forward(nt);
    let weight = basis.weight();
    // radial factor w_i 2 r_i ω(r_i) r_i^k / (n_θ √h_k)
    let radial: Vec<Vec<f64>> = rule
        .radial_nodes()
        .iter()
        .map(|&(r, w)| {
            let base = w * 2.0 * r * weight.omega(r) / nt as f64;
            let mut rk = 1.0;
            (0..n)
                .map(|k| {
                    let v = base * rk / basis.h(k).sqrt();
                    rk *= r;
                    v
                })
                .collect()
        })
        .collect();
    let columns: Vec<Vec<Complex64>> = (0..n_in)
        .into_par_iter()
        .map(|m| {
            let norm = 1.0 / basis.h(m).sqrt();
            let mut ring = vec![Complex64::new(0.0, 0.0); nt];
            let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
            let mut col = vec![Complex64::new(0.0, 0.0); n];
            for (i, fac) in radial.iter().enumerate() {
                for (slot, w) in ring.iter_mut().zip(&grid[i * nt..(i + 1) * nt]) {
                    *slot = w.powu(m as u32) * norm;
                }
                fft.process_with_scratch(&mut ring, &mut scratch);
                for (k, c) in col.iter_mut().enumerate() {
                    *c += ring[k] * fac[k];
                }
            }
            col
        })
        .collect();
    Ok(DMatrix::from_fn(n, n_in, |i, j| columns[j][i]))
}

fn assemble_dense(
    symbol: &dyn Symbol,
    basis: &BasisTable,
    n_in: usize,
    rule: &QuadratureRule,
) -> Result<DMatrix<Complex64>> {
    let n = basis.len();
    let weight = basis.weight();
    let columns: Vec<Vec<Complex64>> = (0..n_in)
        .into_par_iter()
        .map(|m| {
            (0..n)
                .map(|k| {
                    rule.integrate_disc(|z| {
                        basis.e(m, symbol.eval(z)) * basis.e(k, z).conj() * weight.omega(z.norm())
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    Ok(DMatrix::from_fn(n, n_in, |i, j| columns[j][i]))
}

/// Grid extremes of `ω(z) / (ω(φ(z)) |J_φ(z)|)`; `‖C_φ‖ ≤ b₂^{1/p}` on `L^p_ω`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormBound {
    pub b1: f64,
    pub b2: f64,
    pub norm_upper: f64,
    /// `b₂` above [`NORM_CAP`] or `b₁` below its reciprocal.
    pub unbounded: bool,
}

pub fn c_phi_norm_bound(
    symbol: &dyn Symbol,
    weight: &Weight,
    p: f64,
    rule: &QuadratureRule,
) -> Result<NormBound> {
    let mut b1 = f64::INFINITY;
    let mut b2 = 0.0f64;
    for &(r, _) in rule.radial_nodes() {
        for j in 0..rule.n_theta() {
            let z = Complex64::from_polar(r, rule.angle(j));
            let jac = jacobian(symbol, z).abs();
            if !(jac > 0.0) {
                return Err(Error::DegenerateSymbol { re: z.re, im: z.im });
            }
            // log form survives underflow of ω near the boundary
            let log_ratio = weight.log_omega(r) - weight.log_omega(symbol.eval(z).norm());
            let ratio = log_ratio.exp() / jac;
            let ratio = if ratio.is_nan() { f64::INFINITY } else { ratio };
            b1 = b1.min(ratio);
            b2 = b2.max(ratio);
        }
    }
    Ok(NormBound {
        b1,
        b2,
        norm_upper: b2.powf(1.0 / p),
        unbounded: b2 > NORM_CAP || b1 < 1.0 / NORM_CAP,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralDiagnostics {
    pub n: usize,
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub cond: f64,
    /// `σ_min` of the leading `N/2` block.
    pub sigma_min_half: f64,
    /// `σ_min(N) / σ_min(N/2)`; values well below 1 flag drift toward 0.
    pub sigma_min_trend: f64,
}

fn singular_range(m: DMatrix<Complex64>) -> Result<(f64, f64)> {
    let sv = m
        .try_svd(false, false, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Numerical("SVD did not converge".into()))?
        .singular_values;
    let lo = sv.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = sv.iter().copied().fold(0.0, f64::max);
    Ok((lo, hi))
}

pub fn spectral_diagnostics(a: &OperatorMatrix) -> Result<SpectralDiagnostics> {
    let n = a.dim();
    let (sigma_min, sigma_max) = singular_range(a.entries.clone())?;
    let half = (n / 2).max(1);
    let (sigma_min_half, _) = singular_range(a.entries.view((0, 0), (half, half)).into_owned())?;
    Ok(SpectralDiagnostics {
        n,
        sigma_min,
        sigma_max,
        cond: sigma_max / sigma_min,
        sigma_min_half,
        sigma_min_trend: sigma_min / sigma_min_half,
    })
}

/// `min ‖K_φ f‖/‖f‖` over analytic polynomials `f` of degree `< n_in`,
/// measuring the image in all `basis.len()` output modes. Unlike the square
/// section, this stays bounded below when `K_φ` is.
pub fn section_lower_bound(
    symbol: &dyn Symbol,
    basis: &BasisTable,
    n_in: usize,
    rule: &QuadratureRule,
) -> Result<f64> {
    if basis.p() != 2.0 {
        return Err(Error::Parameter("section bound requires p = 2".into()));
    }
    let block = assemble_section(symbol, basis, n_in, rule, true)?;
    Ok(singular_range(block)?.0)
}

/// Default probes: 16 radii evenly spaced on `[0, 0.95]` times 8 angles.
pub fn default_probes() -> Vec<Complex64> {
    let mut out = Vec::with_capacity(128);
    for i in 0..16 {
        let r = 0.95 * i as f64 / 15.0;
        for j in 0..8 {
            out.push(Complex64::from_polar(
                r,
                std::f64::consts::PI * j as f64 / 4.0,
            ));
        }
    }
    out
}

/// `sup_w ∫|k_w(φ(z))|² ω dA / ‖k_w‖²_ω` over probes `w`, with `k_w` the
/// truncated reproducing kernel at `w`.
pub fn carleson_ratio(
    symbol: &dyn Symbol,
    basis: &BasisTable,
    rule: &QuadratureRule,
    probes: &[Complex64],
) -> Result<f64> {
    if basis.p() != 2.0 {
        return Err(Error::Parameter("Carleson ratio requires p = 2".into()));
    }
    let grid = symbol_grid(symbol, rule)?;
    let nt = rule.n_theta();
    let weight = basis.weight();
    let ratios: Vec<f64> = probes
        .par_iter()
        .map(|&w| {
            let coeffs: Vec<Complex64> = (0..basis.len()).map(|n| basis.e(n, w).conj()).collect();
            let norm2: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
            let mut acc = 0.0;
            for (i, &(r, wr)) in rule.radial_nodes().iter().enumerate() {
                let ring: f64 = grid[i * nt..(i + 1) * nt]
                    .iter()
                    .map(|&u| basis.synthesize(&coeffs, u).norm_sqr())
                    .sum();
                acc += ring * wr * 2.0 * r * weight.omega(r) / nt as f64;
            }
            acc / norm2
        })
        .collect();
    Ok(ratios.into_iter().fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbols::{Identity, Mobius, RadialSymbol};
    use approx::assert_abs_diff_eq;

    fn setup(n: usize) -> (BasisTable, QuadratureRule) {
        let b = BasisTable::new(Weight::standard(0.0).unwrap(), 2.0, n).unwrap();
        let rule = QuadratureRule::gauss_legendre(64, 64).unwrap();
        (b, rule)
    }

    #[test]
    fn identity_assembles_to_identity() {
        let (b, rule) = setup(12);
        let a = assemble_k(&Identity, &b, &rule, true).unwrap();
        let eye = DMatrix::<Complex64>::identity(12, 12);
        assert!((a.entries() - eye).iter().all(|c| c.norm() < 1e-12));
        let d = spectral_diagnostics(&a).unwrap();
        assert_abs_diff_eq!(d.sigma_min, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(d.sigma_max, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn twist_diagonal_matches_one_dimensional_oracle() {
        let (b, rule) = setup(10);
        let c = 2.0;
        let s = RadialSymbol::twist(c).unwrap();
        let a = assemble_k(&s, &b, &rule, true).unwrap();
        assert!(a.off_diagonal_mass() < 1e-10);
        let gl = crate::quadrature::GaussLegendre::new(80);
        for m in 0..10 {
            let mf = m as f64;
            let d = gl.integrate(0.0, 1.0, |r| {
                let phase = Complex64::from_polar(1.0, mf * c * (r - r * r * r / 3.0));
                (2.0 * r.powi(2 * m as i32 + 1) * phase).re
            });
            let di = gl.integrate(0.0, 1.0, |r| {
                let phase = Complex64::from_polar(1.0, mf * c * (r - r * r * r / 3.0));
                (2.0 * r.powi(2 * m as i32 + 1) * phase).im
            });
            let expected = Complex64::new(d, di) * (mf + 1.0);
            assert_abs_diff_eq!((a.get(m, m) - expected).norm(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn fast_and_dense_agree() {
        let (b, rule) = setup(8);
        let s = Mobius::new(Complex64::new(0.3, 0.2)).unwrap();
        let fast = assemble_k(&s, &b, &rule, true).unwrap();
        let dense = assemble_k(&s, &b, &rule, false).unwrap();
        assert!(fast.max_entry_diff(&dense) < 1e-12);
    }

    #[test]
    fn tall_section_bounds_mobius_below() {
        // square sections of a Möbius composition degenerate; tall ones do not
        let b = BasisTable::new(Weight::standard(0.0).unwrap(), 2.0, 64).unwrap();
        let rule = QuadratureRule::gauss_legendre(96, 160).unwrap();
        let s = Mobius::new(Complex64::new(0.3, 0.0)).unwrap();
        let lb = section_lower_bound(&s, &b, 16, &rule).unwrap();
        // operator lower bound of C_φ on A² is (1 - |c|)/(1 + |c|)
        assert!((0.7 / 1.3 - 1e-9..0.6).contains(&lb), "{lb}");
    }

    #[test]
    fn aliasing_is_rejected() {
        let b = BasisTable::new(Weight::standard(0.0).unwrap(), 2.0, 8).unwrap();
        let rule = QuadratureRule::gauss_legendre(16, 8).unwrap();
        assert!(matches!(
            assemble_k(&Identity, &b, &rule, true),
            Err(Error::Aliasing { .. })
        ));
    }

    #[test]
    fn norm_bound_examples() {
        let w = Weight::standard(0.0).unwrap();
        let rule = QuadratureRule::gauss_legendre(32, 32).unwrap();
        let nb = c_phi_norm_bound(&Identity, &w, 2.0, &rule).unwrap();
        assert_eq!((nb.b1, nb.b2, nb.norm_upper), (1.0, 1.0, 1.0));
        let neg = Mobius::new(Complex64::new(0.0, 0.0)).unwrap();
        let nb = c_phi_norm_bound(&neg, &w, 2.0, &rule).unwrap();
        assert_abs_diff_eq!(nb.b1, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(nb.b2, 1.0, epsilon = 1e-14);
        let stretch = RadialSymbol::stretch(3.0, 0.5).unwrap();
        assert!(c_phi_norm_bound(&stretch, &w, 2.0, &rule).unwrap().b2 > 1e3);
    }

    #[test]
    fn carleson_ratio_examples() {
        let (b, rule) = setup(16);
        let r = carleson_ratio(&Identity, &b, &rule, &default_probes()).unwrap();
        assert_abs_diff_eq!(r, 1.0, epsilon = 1e-10);
        let s = RadialSymbol::twist(1.5).unwrap();
        let at0 = carleson_ratio(&s, &b, &rule, &[Complex64::new(0.0, 0.0)]).unwrap();
        assert_abs_diff_eq!(at0, 1.0, epsilon = 1e-12);
        let nb = c_phi_norm_bound(&s, b.weight(), 2.0, &rule).unwrap();
        let probes: Vec<Complex64> = (0..10)
            .map(|i| Complex64::new(0.09 * i as f64, 0.0))
            .collect();
        assert!(carleson_ratio(&s, &b, &rule, &probes).unwrap() <= nb.b2 + 1e-10);
    }
}
