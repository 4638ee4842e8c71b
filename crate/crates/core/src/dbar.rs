//! The `∂̄` operator on polynomials in `z, z̄`, an explicit right inverse,
//! the complementary projection `Q_ω = I - P_ω` and the left inverse
//! `M = Q_ω ∘ (∂̄)^{-1}` with `M ∂̄ f = Q_ω f`.
//!
//! Everything here acts exactly on coefficients; the only numerical piece is
//! [`estimate_d_m`], the largest singular value of `M` on a bidegree-truncated
//! space.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::Serialize;

use crate::bergman::BasisTable;
use crate::error::{Error, Result};
use crate::estimate::Estimate;
use crate::quadrature::{composite_nodes, GaussLegendre};
use crate::weights::Weight;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Polynomial `Σ c_{a,b} z^a z̄^b` with `a ≤ deg_z`, `b ≤ deg_zbar`.
#[derive(Debug, Clone, PartialEq)]
pub struct BiPolynomial {
    deg_z: usize,
    deg_zbar: usize,
    // row-major in a
    coeffs: Vec<Complex64>,
}

impl BiPolynomial {
    pub fn zero(deg_z: usize, deg_zbar: usize) -> Self {
        Self {
            deg_z,
            deg_zbar,
            coeffs: vec![ZERO; (deg_z + 1) * (deg_zbar + 1)],
        }
    }

    pub fn monomial(a: usize, b: usize) -> Self {
        let mut p = Self::zero(a, b);
        p.set(a, b, Complex64::new(1.0, 0.0));
        p
    }

    pub fn from_fn<F: FnMut(usize, usize) -> Complex64>(
        deg_z: usize,
        deg_zbar: usize,
        mut f: F,
    ) -> Self {
        let mut p = Self::zero(deg_z, deg_zbar);
        for a in 0..=deg_z {
            for b in 0..=deg_zbar {
                p.set(a, b, f(a, b));
            }
        }
        p
    }

    pub fn deg_z(&self) -> usize {
        self.deg_z
    }

    pub fn deg_zbar(&self) -> usize {
        self.deg_zbar
    }

    fn idx(&self, a: usize, b: usize) -> usize {
        a * (self.deg_zbar + 1) + b
    }

    /// Coefficient of `z^a z̄^b` (zero outside the stored range).
    pub fn coeff(&self, a: usize, b: usize) -> Complex64 {
        if a > self.deg_z || b > self.deg_zbar {
            return ZERO;
        }
        self.coeffs[self.idx(a, b)]
    }

    pub fn set(&mut self, a: usize, b: usize, c: Complex64) {
        let i = self.idx(a, b);
        self.coeffs[i] = c;
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        (0..=self.deg_z)
            .flat_map(move |a| (0..=self.deg_zbar).map(move |b| (a, b, self.coeff(a, b))))
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let zb = z.conj();
        let mut acc = ZERO;
        let mut za = Complex64::new(1.0, 0.0);
        for a in 0..=self.deg_z {
            let mut zbb = Complex64::new(1.0, 0.0);
            for b in 0..=self.deg_zbar {
                acc += self.coeff(a, b) * za * zbb;
                zbb *= zb;
            }
            za *= z;
        }
        acc
    }

    pub fn add(&self, other: &Self) -> Self {
        let dz = self.deg_z.max(other.deg_z);
        let db = self.deg_zbar.max(other.deg_zbar);
        Self::from_fn(dz, db, |a, b| self.coeff(a, b) + other.coeff(a, b))
    }

    pub fn sub(&self, other: &Self) -> Self {
        let dz = self.deg_z.max(other.deg_z);
        let db = self.deg_zbar.max(other.deg_zbar);
        Self::from_fn(dz, db, |a, b| self.coeff(a, b) - other.coeff(a, b))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            deg_z: self.deg_z,
            deg_zbar: self.deg_zbar,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// Largest coefficient difference, treating missing terms as zero.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.sub(other)
            .coeffs
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    pub fn is_analytic(&self) -> bool {
        self.terms().all(|(_, b, c)| b == 0 || c == ZERO)
    }
}

/// `∂̄(z^a z̄^b) = b z^a z̄^{b-1}`.
pub fn dbar_apply(f: &BiPolynomial) -> BiPolynomial {
    let db = f.deg_zbar.saturating_sub(1);
    BiPolynomial::from_fn(f.deg_z, db, |a, b| f.coeff(a, b + 1) * (b + 1) as f64)
}

/// Antiderivative in `z̄`: `z^a z̄^b ↦ z^a z̄^{b+1}/(b+1)`.
pub fn dbar_right_inverse(g: &BiPolynomial) -> BiPolynomial {
    BiPolynomial::from_fn(g.deg_z, g.deg_zbar + 1, |a, b| {
        if b == 0 {
            ZERO
        } else {
            g.coeff(a, b - 1) / b as f64
        }
    })
}

/// `P_ω f` for a polynomial, returned as an analytic polynomial:
/// `P_ω(z^a z̄^b) = (h_a/h_{a-b}) z^{a-b}` for `a ≥ b`, zero otherwise.
pub fn project(f: &BiPolynomial, basis: &BasisTable) -> Result<BiPolynomial> {
    if basis.p() != 2.0 {
        return Err(Error::Parameter("projection needs a p = 2 basis".into()));
    }
    if f.deg_z >= basis.len() {
        return Err(Error::Parameter(format!(
            "basis of size {} cannot project degree {} in z",
            basis.len(),
            f.deg_z
        )));
    }
    let mut out = BiPolynomial::zero(f.deg_z, 0);
    for (a, b, c) in f.terms() {
        if a >= b && c != ZERO {
            let k = a - b;
            let cur = out.coeff(k, 0);
            out.set(k, 0, cur + c * (basis.h(a) / basis.h(k)));
        }
    }
    Ok(out)
}

/// `Q_ω f = f - P_ω f`.
pub fn complement(f: &BiPolynomial, basis: &BasisTable) -> Result<BiPolynomial> {
    Ok(f.sub(&project(f, basis)?))
}

/// `M g = Q_ω u` with `∂̄u = g`.
pub fn m_apply(g: &BiPolynomial, basis: &BasisTable) -> Result<BiPolynomial> {
    complement(&dbar_right_inverse(g), basis)
}

/// `⟨f, g⟩_ω` from radial moments: `⟨z^a z̄^b, z^c z̄^d⟩ = δ_{a-b,c-d} h_{a+d}`.
/// `moments` must reach index `deg_z + deg_zbar` of both arguments.
pub fn inner(f: &BiPolynomial, g: &BiPolynomial, moments: &[f64]) -> Result<Complex64> {
    let need = (f.deg_z + f.deg_zbar).max(g.deg_z + g.deg_zbar);
    if need >= moments.len() {
        return Err(Error::Parameter(format!(
            "need moments up to index {need}, have {}",
            moments.len()
        )));
    }
    let mut acc = ZERO;
    for (a, b, x) in f.terms() {
        if x == ZERO {
            continue;
        }
        for (c, d, y) in g.terms() {
            if a + d == b + c && y != ZERO {
                acc += x * y.conj() * moments[a + d];
            }
        }
    }
    Ok(acc)
}

/// Estimated norm of `M` on `span{z^a z̄^b : a, b ≤ D}`.
#[derive(Debug, Clone, Serialize)]
pub struct DmEstimate {
    pub estimate: Estimate,
    pub bidegree: usize,
    /// Largest singular value per angular mode `k = a - b`.
    pub per_mode: Vec<(i64, f64)>,
}

/// Largest singular value of `M` restricted to bidegree `≤ D`.
///
/// The space splits by angular mode `k = a - b`: its elements are
/// `z^k q(|z|²)` (or `z̄^{|k|} q(|z|²)`) with `deg q ≤ D - |k|`, and `M`
/// maps mode `k` to mode `k - 1`. In each mode `q` is expanded in shifted
/// Legendre polynomials of `t = |z|²` and the radial integrals are done
/// with a Gauss–Legendre rule graded toward `t = 1`; this keeps the Gram
/// matrices well conditioned where a raw monomial basis would not be.
pub fn estimate_d_m(weight: &Weight, bidegree: usize) -> Result<DmEstimate> {
    let d = bidegree;
    let rule = t_rule();
    let omega: Vec<f64> = rule.iter().map(|&(t, _)| weight.omega(t.sqrt())).collect();
    let integrate = |f: &dyn Fn(usize, f64) -> f64| -> f64 {
        rule.iter()
            .enumerate()
            .map(|(i, &(t, w))| w * omega[i] * f(i, t))
            .sum()
    };
    // antiderivative nodes on [0, 1]
    let inner_gl = GaussLegendre::cached(d + 3);
    let xs: Vec<(f64, f64)> = inner_gl
        .nodes
        .iter()
        .zip(&inner_gl.weights)
        .map(|(&x, &w)| (0.5 * (x + 1.0), 0.5 * w))
        .collect();

    let mut best: f64 = 0.0;
    let mut per_mode = Vec::new();
    for k in -(d as i64)..=(d as i64) {
        let m = k.unsigned_abs() as usize;
        let n = d - m + 1;
        // L_j(t) and the radial profile U_j(t) of the right inverse
        let mut l_vals = vec![vec![0.0; n]; rule.len()];
        let mut u_vals = vec![vec![0.0; n]; rule.len()];
        let mut tmp = vec![0.0; n];
        for (i, &(t, _)) in rule.iter().enumerate() {
            shifted_legendre(t, &mut l_vals[i]);
            for &(x, wx) in &xs {
                shifted_legendre(t * x, &mut tmp);
                let factor = if k >= 1 {
                    wx * t
                } else {
                    wx * x.powi(m as i32)
                };
                for j in 0..n {
                    u_vals[i][j] += factor * tmp[j];
                }
            }
        }
        let g_pow = m as i32;
        let u_pow = if k >= 1 { m as i32 - 1 } else { m as i32 + 1 };
        let mut gram = DMatrix::<f64>::zeros(n, n);
        let mut image = DMatrix::<f64>::zeros(n, n);
        for a in 0..n {
            for b in 0..=a {
                let g = integrate(&|i, t| t.powi(g_pow) * l_vals[i][a] * l_vals[i][b]);
                let u = integrate(&|i, t| t.powi(u_pow) * u_vals[i][a] * u_vals[i][b]);
                gram[(a, b)] = g;
                gram[(b, a)] = g;
                image[(a, b)] = u;
                image[(b, a)] = u;
            }
        }
        if k >= 1 {
            // remove the P_ω component along z^{k-1}
            let h = integrate(&|_, t| t.powi(u_pow));
            let v: Vec<f64> = (0..n)
                .map(|a| integrate(&|i, t| t.powi(u_pow) * u_vals[i][a]))
                .collect();
            for a in 0..n {
                for b in 0..n {
                    image[(a, b)] -= v[a] * v[b] / h;
                }
            }
        }
        let chol = gram.cholesky().ok_or(Error::Conditioning { mode: k })?;
        let l_inv = chol
            .l()
            .try_inverse()
            .ok_or(Error::Conditioning { mode: k })?;
        let c = &l_inv * image * l_inv.transpose();
        let c = (&c + c.transpose()) * 0.5;
        let lam = SymmetricEigen::new(c)
            .eigenvalues
            .iter()
            .copied()
            .fold(0.0, f64::max);
        let s = lam.max(0.0).sqrt();
        per_mode.push((k, s));
        best = best.max(s);
    }
    Ok(DmEstimate {
        estimate: Estimate::lower(best),
        bidegree,
        per_mode,
    })
}

/// Graded rule on `[0, 1]` in `t = r²`.
fn t_rule() -> Vec<(f64, f64)> {
    let mut edges: Vec<f64> = (0..12).map(|k| 1.0 - 0.5f64.powi(k)).collect();
    edges[0] = 0.0;
    edges.push(1.0);
    composite_nodes(&edges, 32)
}

/// `P_j(2t-1)` for `j < out.len()`.
fn shifted_legendre(t: f64, out: &mut [f64]) {
    let x = 2.0 * t - 1.0;
    if out.is_empty() {
        return;
    }
    out[0] = 1.0;
    if out.len() > 1 {
        out[1] = x;
    }
    for j in 2..out.len() {
        let jf = j as f64;
        out[j] = ((2.0 * jf - 1.0) * x * out[j - 1] - (jf - 1.0) * out[j - 2]) / jf;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn basis() -> BasisTable {
        BasisTable::new(Weight::unweighted(), 2.0, 24).unwrap()
    }

    #[test]
    fn dbar_examples() {
        assert!(dbar_apply(&BiPolynomial::monomial(4, 0))
            .terms()
            .all(|(_, _, c)| c == ZERO));
        let d = dbar_apply(&BiPolynomial::monomial(0, 1));
        assert_eq!(d.coeff(0, 0), c(1.0));
        let d = dbar_apply(&BiPolynomial::monomial(2, 3));
        assert_eq!(d.coeff(2, 2), c(3.0));
        assert_eq!(d.terms().filter(|t| t.2 != ZERO).count(), 1);
    }

    #[test]
    fn right_inverse_examples() {
        let u = dbar_right_inverse(&BiPolynomial::monomial(0, 0));
        assert_eq!(u.max_abs_diff(&BiPolynomial::monomial(0, 1)), 0.0);
        let u = dbar_right_inverse(&BiPolynomial::monomial(1, 0));
        assert_eq!(u.max_abs_diff(&BiPolynomial::monomial(1, 1)), 0.0);
        let u = dbar_right_inverse(&BiPolynomial::monomial(0, 2));
        assert_eq!(u.coeff(0, 3), c(1.0 / 3.0));
        let g = BiPolynomial::from_fn(3, 4, |a, b| Complex64::new(a as f64 - 0.5, b as f64 * 0.25));
        assert_eq!(dbar_apply(&dbar_right_inverse(&g)).max_abs_diff(&g), 0.0);
    }

    #[test]
    fn m_examples() {
        let b = basis();
        let zero = m_apply(&BiPolynomial::zero(2, 2), &b).unwrap();
        assert_eq!(zero.max_abs_diff(&BiPolynomial::zero(0, 0)), 0.0);
        // M(1) = z̄
        let m1 = m_apply(&BiPolynomial::monomial(0, 0), &b).unwrap();
        assert!(m1.max_abs_diff(&BiPolynomial::monomial(0, 1)) < 1e-14);
        // M ∂̄(z z̄) = z z̄ - 1/2
        let f = BiPolynomial::monomial(1, 1);
        let lhs = m_apply(&dbar_apply(&f), &b).unwrap();
        let expect = f.sub(&BiPolynomial::monomial(0, 0).scale(c(0.5)));
        assert!(lhs.max_abs_diff(&expect) < 1e-12);
    }

    #[test]
    fn choice_of_right_inverse_is_irrelevant() {
        let b = basis();
        let g = BiPolynomial::from_fn(3, 3, |a, bb| {
            Complex64::new((a * 3 + bb) as f64 * 0.1, -0.2 * a as f64)
        });
        let u = dbar_right_inverse(&g);
        let analytic =
            BiPolynomial::from_fn(5, 0, |a, _| Complex64::new(1.0 / (a + 1) as f64, 0.3));
        let m1 = complement(&u, &b).unwrap();
        let m2 = complement(&u.add(&analytic), &b).unwrap();
        assert!(m1.max_abs_diff(&m2) < 1e-12);
    }

    #[test]
    fn d_m_at_bidegree_zero() {
        let est = estimate_d_m(&Weight::unweighted(), 0).unwrap();
        assert_abs_diff_eq!(est.estimate.value, 0.5f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn d_m_is_monotone_in_bidegree() {
        let w = Weight::unweighted();
        let mut prev = 0.0;
        for d in 0..=6 {
            let v = estimate_d_m(&w, d).unwrap().estimate.value;
            assert!(v >= prev - 1e-12, "D={d}: {v} < {prev}");
            prev = v;
        }
    }

    #[test]
    fn d_m_agrees_with_monomial_gram_route() {
        // at small bidegree the exact-moment Gram matrices are well conditioned
        let w = Weight::standard(1.0).unwrap();
        let d = 3;
        let b = BasisTable::new(w, 2.0, 4 * d + 4).unwrap();
        let h = b.moments().to_vec();
        let mut best: f64 = 0.0;
        for k in -(d as i64)..=(d as i64) {
            let mons: Vec<BiPolynomial> = (0..=d)
                .flat_map(|a| (0..=d).map(move |bb| (a, bb)))
                .filter(|&(a, bb)| a as i64 - bb as i64 == k)
                .map(|(a, bb)| BiPolynomial::monomial(a, bb))
                .collect();
            let n = mons.len();
            let images: Vec<BiPolynomial> = mons.iter().map(|g| m_apply(g, &b).unwrap()).collect();
            let g = DMatrix::from_fn(n, n, |i, j| inner(&mons[i], &mons[j], &h).unwrap().re);
            let a = DMatrix::from_fn(n, n, |i, j| inner(&images[i], &images[j], &h).unwrap().re);
            let l = g.cholesky().unwrap().l().try_inverse().unwrap();
            let cm = &l * a * l.transpose();
            let lam = SymmetricEigen::new((&cm + cm.transpose()) * 0.5)
                .eigenvalues
                .iter()
                .copied()
                .fold(0.0, f64::max);
            best = best.max(lam.sqrt());
        }
        let est = estimate_d_m(&w, d).unwrap().estimate.value;
        assert_abs_diff_eq!(est, best, epsilon = 1e-10);
    }

    #[test]
    fn projection_needs_enough_moments() {
        let b = BasisTable::new(Weight::unweighted(), 2.0, 3).unwrap();
        assert!(project(&BiPolynomial::monomial(5, 1), &b).is_err());
    }
}
