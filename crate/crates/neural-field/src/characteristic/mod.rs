//! The characteristic equation of the linearized field operator.
//!
//! Linearizing around the trivial state and applying the Laplace transform
//! turns the delayed integral operator into a family `Delta(z)` acting on
//! functions over the rectangle. Exponential kernels make its point spectrum
//! algebraic: `z` is an eigenvalue exactly when the characteristic polynomial
//! `P_z(rho, nu)` below has a root pair compatible with the Robin-type
//! boundary conditions on each axis. This module holds the scalar symbols, the
//! polynomial, the resonance guard set, root equivalence classes, and the
//! boundary matrices used to certify multi-term eigenvectors.
//!
//! Sign convention: `P_z(rho, nu) = (z + alpha) * prod_i (k_i^2 - rho^2)(k_i^2
//! - nu^2) - 4 * sum_i c_i k_i^2 prod_{j != i} (k_j^2 - rho^2)(k_j^2 - nu^2)`,
//! which keeps the reduced symbol `Q_z = P_z / prod(...)` consistent with the
//! resolvent expansion used in [`crate::spectrum`].

pub mod nystrom;
pub mod square;

use crate::model::ModelParams;
use crate::numerics::polyroots::{poly_mul, poly_roots};
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Axis parity of a candidate eigenfunction factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Parity {
    /// `cosh(rho x)` family.
    Even,
    /// `sinh(rho x)` family.
    Odd,
}

impl Parity {
    pub fn label(self) -> &'static str {
        match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        }
    }
}

impl std::str::FromStr for Parity {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "even" => Ok(Parity::Even),
            "odd" => Ok(Parity::Odd),
            other => Err(format!("unknown parity `{other}` (expected even|odd)")),
        }
    }
}

/// Errors from the algebraic layer.
#[derive(Debug, thiserror::Error)]
pub enum CharError {
    #[error("degenerate root class: {0}")]
    DegenerateClass(String),
    #[error("resonant parameter: {0}")]
    ResonantParameter(String),
}

/// Exponential rate of term `i` after the Laplace shift: `k_i(z) = z + xi_i`.
pub fn k_term(params: &ModelParams, i: usize, z: Complex64) -> Complex64 {
    z + params.terms[i].xi
}

/// Effective strength of term `i`: `c_i(z) = c_hat_i S'(0) exp(-tau0 z)`.
pub fn c_term(params: &ModelParams, i: usize, z: Complex64) -> Complex64 {
    params.terms[i].c_hat * params.firing_rate_d1_at_zero() * (-params.tau0 * z).exp()
}

/// Characteristic polynomial `P_z(rho, nu)` in the canonical sign convention.
pub fn char_poly(params: &ModelParams, z: Complex64, rho: Complex64, nu: Complex64) -> Complex64 {
    let n = params.n_terms();
    let rho2 = rho * rho;
    let nu2 = nu * nu;
    let factors: Vec<(Complex64, Complex64)> = (0..n)
        .map(|i| {
            let k2 = k_term(params, i, z).powu(2);
            (k2 - rho2, k2 - nu2)
        })
        .collect();
    let prod_all: Complex64 = factors.iter().map(|(fr, fn_)| fr * fn_).product();
    let mut sum = Complex64::new(0.0, 0.0);
    for i in 0..n {
        let k = k_term(params, i, z);
        let c = c_term(params, i, z);
        let partial: Complex64 = factors
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, (fr, fn_))| fr * fn_)
            .product();
        sum += 4.0 * c * k * k * partial;
    }
    (z + params.alpha) * prod_all - sum
}

/// Magnitude scale for [`char_poly`] residual tests: the same expression with
/// every subtraction replaced by an addition of absolute values.
pub fn char_scale(params: &ModelParams, z: Complex64, rho: Complex64, nu: Complex64) -> f64 {
    let n = params.n_terms();
    let rho2 = rho.norm_sqr();
    let nu2 = nu.norm_sqr();
    let factors: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let k2 = k_term(params, i, z).norm_sqr();
            (k2 + rho2, k2 + nu2)
        })
        .collect();
    let prod_all: f64 = factors.iter().map(|(fr, fn_)| fr * fn_).product();
    let mut s = (z + params.alpha).norm() * prod_all;
    for i in 0..n {
        let k = k_term(params, i, z);
        let c = c_term(params, i, z);
        let partial: f64 = factors
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, (fr, fn_))| fr * fn_)
            .product();
        s += 4.0 * (c * k * k).norm() * partial;
    }
    s.max(f64::MIN_POSITIVE)
}

/// Reduced symbol `Q_z(rho, nu) = P_z / prod_i (k_i^2-rho^2)(k_i^2-nu^2)`,
/// computed in the cancellation-free sum form. Only valid away from the
/// product's zeros.
pub fn q_reduced(params: &ModelParams, z: Complex64, rho: Complex64, nu: Complex64) -> Complex64 {
    let rho2 = rho * rho;
    let nu2 = nu * nu;
    let mut q = z + params.alpha;
    for i in 0..params.n_terms() {
        let k = k_term(params, i, z);
        let c = c_term(params, i, z);
        let k2 = k * k;
        q -= 4.0 * c * k2 / ((k2 - rho2) * (k2 - nu2));
    }
    q
}

/// Robin-type boundary value at `x = halfwidth` for the given axis family:
/// `k cosh(rho h) + rho sinh(rho h)` (even) or `k sinh(rho h) + rho cosh(rho h)` (odd).
pub fn boundary_value(k: Complex64, rho: Complex64, halfwidth: f64, parity: Parity) -> Complex64 {
    let rh = rho * halfwidth;
    match parity {
        Parity::Even => k * rh.cosh() + rho * rh.sinh(),
        Parity::Odd => k * rh.sinh() + rho * rh.cosh(),
    }
}

/// Magnitude scale for [`boundary_value`] residual tests.
pub fn boundary_scale(k: Complex64, rho: Complex64, halfwidth: f64) -> f64 {
    let rh = rho * halfwidth;
    (k.norm() * rh.cosh().norm() + rho.norm() * rh.sinh().norm()).max(f64::MIN_POSITIVE)
}

/// Result of testing `z` against the resonance set (parameter values where
/// the exponential rates collide and the algebraic reduction breaks down).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Resonance {
    /// `z` is safely outside the resonance set.
    Clear,
    /// Some `k_i(z)` vanishes (to tolerance).
    ZeroRate { index: usize },
    /// Two rates share a square: `k_i^2 = k_j^2`.
    EqualSquares { i: usize, j: usize },
}

impl Resonance {
    pub fn is_resonant(self) -> bool {
        !matches!(self, Resonance::Clear)
    }
}

/// Checks membership of `z` in the resonance set with a relative guard band.
pub fn resonance_check(params: &ModelParams, z: Complex64) -> Resonance {
    let tol = 1e-9;
    let n = params.n_terms();
    let ks: Vec<Complex64> = (0..n).map(|i| k_term(params, i, z)).collect();
    for (i, k) in ks.iter().enumerate() {
        if k.norm() <= tol * (1.0 + z.norm()) {
            return Resonance::ZeroRate { index: i };
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let (k2i, k2j) = (ks[i] * ks[i], ks[j] * ks[j]);
            if (k2i - k2j).norm() <= tol * (1.0 + k2i.norm() + k2j.norm()) {
                return Resonance::EqualSquares { i, j };
            }
        }
    }
    Resonance::Clear
}

/// The equivalence class of axis rates linked to `nu` at a fixed `z`:
/// the `N` roots in `rho^2` of `P_z(rho, nu) = 0` together with `nu` itself.
///
/// The class relation is symmetric and transitive: every pair of members
/// satisfies the characteristic equation, which `cross_residual` certifies.
#[derive(Debug, Clone)]
pub struct RootClass {
    pub z: Complex64,
    pub nu: Complex64,
    /// One representative per `+-` pair, principal square roots of the `rho^2` roots.
    pub rhos: Vec<Complex64>,
    /// Max over class pairs of `|P_z(r_i, r_j)| / scale`.
    pub cross_residual: f64,
}

impl RootClass {
    /// All `N + 1` class members: the solved rates followed by `nu`.
    pub fn all_roots(&self) -> Vec<Complex64> {
        let mut v = self.rhos.clone();
        v.push(self.nu);
        v
    }
}

/// Solves `P_z(rho, nu) = 0` for `rho^2` at fixed `z` and `nu`, forming the
/// root equivalence class of `nu`.
///
/// Fails with `DegenerateClass` when the class has repeated squares or when a
/// root collides with some `k_i^2` (there the reduced symbol and every
/// boundary matrix denominator blow up; the limiting case `c_hat = 0` always
/// lands here).
pub fn equiv_roots(
    params: &ModelParams,
    z: Complex64,
    nu: Complex64,
) -> Result<RootClass, CharError> {
    let n = params.n_terms();
    let tol = 1e-9;
    if (z + params.alpha).norm() <= 1e-12 * (1.0 + z.norm()) {
        return Err(CharError::DegenerateClass(
            "z at the essential point -alpha: polynomial degree collapses".into(),
        ));
    }
    let nu2 = nu * nu;
    let ks: Vec<Complex64> = (0..n).map(|i| k_term(params, i, z)).collect();
    // Linear factors f_j(u) = beta_j (k_j^2 - u) with beta_j = k_j^2 - nu^2.
    let mut factors: Vec<[Complex64; 2]> = Vec::with_capacity(n);
    for k in &ks {
        let k2 = k * k;
        let beta = k2 - nu2;
        if beta.norm() <= 1e-12 * (1.0 + k2.norm() + nu2.norm()) {
            return Err(CharError::DegenerateClass(format!(
                "nu^2 coincides with k^2 = {k2} (leading coefficient vanishes)"
            )));
        }
        factors.push([beta * k2, -beta]);
    }
    // P(u) = (z+alpha) prod_j f_j(u) - 4 sum_i c_i k_i^2 prod_{j!=i} f_j(u).
    let mut poly = vec![z + params.alpha];
    for f in &factors {
        poly = poly_mul(&poly, f);
    }
    for (i, k) in ks.iter().enumerate() {
        let mut partial = vec![4.0 * c_term(params, i, z) * k * k];
        for (j, f) in factors.iter().enumerate() {
            if j != i {
                partial = poly_mul(&partial, f);
            }
        }
        for (p, q) in poly.iter_mut().zip(partial.iter()) {
            *p -= q;
        }
    }
    let us = poly_roots(&poly);
    let u_scale = 1.0 + us.iter().map(|u| u.norm()).fold(0.0f64, f64::max);
    for i in 0..us.len() {
        for j in (i + 1)..us.len() {
            if (us[i] - us[j]).norm() <= tol * u_scale {
                return Err(CharError::DegenerateClass(format!(
                    "repeated rho^2 root near {}",
                    us[i]
                )));
            }
        }
        for k in &ks {
            let k2 = k * k;
            if (us[i] - k2).norm() <= tol * (u_scale + k2.norm()) {
                return Err(CharError::DegenerateClass(format!(
                    "rho^2 root collides with k^2 = {k2}"
                )));
            }
        }
    }
    let rhos: Vec<Complex64> = us.iter().map(|u| u.sqrt()).collect();
    // Certify symmetry/transitivity: every pair of class members is a root pair.
    let mut all = rhos.clone();
    all.push(nu);
    let mut cross = 0.0f64;
    for i in 0..all.len() {
        for j in (i + 1)..all.len() {
            let r = char_poly(params, z, all[i], all[j]).norm()
                / char_scale(params, z, all[i], all[j]);
            cross = cross.max(r);
        }
    }
    Ok(RootClass {
        z,
        nu,
        rhos,
        cross_residual: cross,
    })
}

/// Boundary matrix over a root class: entry `(i, j)` is the Robin boundary
/// value of term `i` at class root `j`, divided by the pole factor,
/// `S[i][j] = (k_i cosh(r_j h) + r_j sinh(r_j h)) / (k_i^2 - r_j^2)` for the
/// even family (sinh/cosh swapped for odd).
///
/// An eigenvector assembled from the class exists exactly when the strength
/// vector `eta` annihilates every column.
pub fn s_matrix(
    params: &ModelParams,
    z: Complex64,
    roots: &[Complex64],
    halfwidth: f64,
    parity: Parity,
) -> Result<DMatrix<Complex64>, CharError> {
    let n = params.n_terms();
    let mut m = DMatrix::<Complex64>::zeros(n, roots.len());
    for i in 0..n {
        let k = k_term(params, i, z);
        let k2 = k * k;
        for (j, &r) in roots.iter().enumerate() {
            let denom = k2 - r * r;
            if denom.norm() <= 1e-12 * (1.0 + k2.norm() + (r * r).norm()) {
                return Err(CharError::ResonantParameter(format!(
                    "k_{i}^2 - r_{j}^2 vanishes (k^2 = {k2}, r = {r})"
                )));
            }
            m[(i, j)] = boundary_value(k, r, halfwidth, parity) / denom;
        }
    }
    Ok(m)
}

/// Scaled boundary-closure residual of a coefficient matrix `d` over a root
/// class: max entry of `S(a) d` and `S(b) d^T`, relative to the natural
/// magnitude `max|S| * max|d|`.
///
/// `d[(i, j)]` multiplies `phi_i(x) phi_j(y)`; both axis families use the same
/// parity. A value at rounding level certifies that the assembled function
/// satisfies the boundary conditions of every kernel term.
pub fn boundary_residual(
    params: &ModelParams,
    z: Complex64,
    roots: &[Complex64],
    d: &DMatrix<Complex64>,
    parity: Parity,
) -> Result<f64, CharError> {
    assert_eq!(d.nrows(), roots.len(), "coefficient matrix shape mismatch");
    assert_eq!(d.ncols(), roots.len(), "coefficient matrix shape mismatch");
    let sa = s_matrix(params, z, roots, params.a, parity)?;
    let sb = s_matrix(params, z, roots, params.b, parity)?;
    let smax = sa
        .iter()
        .chain(sb.iter())
        .map(|v| v.norm())
        .fold(0.0f64, f64::max);
    let dmax = d.iter().map(|v| v.norm()).fold(0.0f64, f64::max);
    let scale = (smax * dmax).max(f64::MIN_POSITIVE);
    let ra = (&sa * d).iter().map(|v| v.norm()).fold(0.0f64, f64::max);
    let rb = (&sb * &d.transpose())
        .iter()
        .map(|v| v.norm())
        .fold(0.0f64, f64::max);
    Ok(ra.max(rb) / scale)
}
