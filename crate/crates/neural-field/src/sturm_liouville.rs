//! The regular Sturm–Liouville problem on one axis of the rectangle and the
//! separable basis built from its eigenfunctions.
//!
//! For a fixed complex rate `k`, the axis operator `k^2 - d^2/dx^2` with the
//! Robin-type boundary closure has eigenfunctions `cosh(rho x)` / `sinh(rho x)`
//! whose rates solve a transcendental characteristic equation. In the scaled
//! variable `mu = 2 a rho / (i pi)` that equation reads
//! `chi(mu) = k (pi/a) cos(pi mu) + (k^2/mu - (pi/2a)^2 mu) sin(pi mu) = 0`,
//! with one root near every integer. Products of axis eigenfunctions give the
//! rank-one building blocks that diagonalize the field operator.

use crate::characteristic::{k_term, Parity};
use crate::model::ModelParams;
use crate::numerics::field::ComplexField;
use crate::numerics::gram_schmidt::orthonormalize;
use crate::numerics::quadrature::QuadGrid;
use nalgebra::DMatrix;
use num_complex::Complex64;

/// Characteristic function of the axis problem in the scaled variable `mu`.
///
/// Even in `mu`; its zeros away from the origin are exactly the axis
/// eigenrates via [`mu_to_rho`]. The origin is a removable point handled
/// separately by the solvers, hence the precondition `mu != 0`.
pub fn chi(mu: Complex64, k: Complex64, halfwidth: f64) -> Complex64 {
    assert!(mu.norm() > 0.0, "chi is defined for mu != 0");
    let a = halfwidth;
    let pi = std::f64::consts::PI;
    k * (pi / a) * (pi * mu).cos() + (k * k / mu - (pi / (2.0 * a)).powi(2) * mu) * (pi * mu).sin()
}

/// Magnitude scale for [`chi`] residuals: the sum of the three coefficient
/// magnitudes. Since `sin` and `cos` cannot vanish together this bounds the
/// attainable size of `chi` from below near a root, without itself vanishing.
pub fn chi_scale(mu: Complex64, k: Complex64, halfwidth: f64) -> f64 {
    let a = halfwidth;
    let pi = std::f64::consts::PI;
    k.norm() * (pi / a) + k.norm_sqr() / mu.norm() + (pi / (2.0 * a)).powi(2) * mu.norm()
}

/// Maps the scaled root variable back to the eigenfunction rate:
/// `rho = i pi mu / (2a)`.
pub fn mu_to_rho(mu: Complex64, halfwidth: f64) -> Complex64 {
    Complex64::new(0.0, std::f64::consts::PI / (2.0 * halfwidth)) * mu
}

/// The two boundary factors `f = cosh(rho a) + (k/rho) sinh(rho a)` and
/// `g = sinh(rho a) + (k/rho) cosh(rho a)`.
///
/// `g = 0` is the even-family eigencondition, `f = 0` the odd one, and
/// `2 rho f g = 2k cosh(2a rho) + (k^2/rho + rho) sinh(2a rho)` ties their
/// product to [`chi`].
pub fn fg_eval(rho: Complex64, k: Complex64, halfwidth: f64) -> (Complex64, Complex64) {
    assert!(rho.norm() > 0.0, "boundary factors are defined for rho != 0");
    let ra = rho * halfwidth;
    let f = ra.cosh() + (k / rho) * ra.sinh();
    let g = ra.sinh() + (k / rho) * ra.cosh();
    (f, g)
}

/// One converged axis root.
#[derive(Debug, Clone, serde::Serialize)]
pub struct SlpRoot {
    /// Scaled root variable (normalized to `Re mu >= 0`).
    pub mu: Complex64,
    /// Eigenfunction rate `rho = i pi mu / (2a)`.
    pub rho: Complex64,
    /// Nearest integer to `Re mu`; the position of the root in the lattice.
    pub index: usize,
    /// Which boundary factor vanishes at this root.
    pub parity: Parity,
    /// `|chi| / scale` at the root.
    pub residual: f64,
}

/// Root sweep outcome with bookkeeping for the seeds that were tried.
#[derive(Debug, Clone)]
pub struct SlpScan {
    /// Roots ordered by `(|Re mu|, |Im mu|)`, truncated to the request.
    pub roots: Vec<SlpRoot>,
    pub seeds_tried: usize,
    pub seeds_converged: usize,
    /// Converged iterates that collapsed onto an already-recorded root.
    pub duplicates_collapsed: usize,
}

/// Damped scalar Newton on `chi`, with an absolute step cap so iterates walk
/// between adjacent roots instead of overshooting. Returns `Some(mu)` only if
/// the residual certifies a root.
fn newton_chi(mu0: Complex64, k: Complex64, a: f64) -> Option<Complex64> {
    let mut mu = mu0;
    for _ in 0..80 {
        let c = chi(mu, k, a);
        let h = 1e-7 * (1.0 + mu.norm());
        let dc = (chi(mu + h, k, a) - chi(mu - h, k, a)) / (2.0 * h);
        if dc.norm() == 0.0 {
            return None;
        }
        let mut step = c / dc;
        if step.norm() > 0.75 {
            step *= 0.75 / step.norm();
        }
        mu -= step;
        if mu.norm() < 1e-8 {
            return None;
        }
        if step.norm() < 1e-13 * (1.0 + mu.norm()) {
            let ok = chi(mu, k, a).norm() <= 1e-9 * chi_scale(mu, k, a);
            return ok.then_some(mu);
        }
    }
    None
}

/// Finds axis roots for rate `k` on the interval of half-width `a`.
///
/// Seeds Newton at the integers (where the roots sit asymptotically) plus a
/// fine complex sweep of the box `0 < Re mu <= N0`, `|Im mu| <= M`, whose
/// dimensions come from the root-localization bound for this `k`. Failed
/// seeds are skipped; converged duplicates (including `+-mu` mirrors) are
/// collapsed and counted. `count = 0` returns everything found.
pub fn slp_roots(k: Complex64, halfwidth: f64, count: usize) -> SlpScan {
    let a = halfwidth;
    let pi = std::f64::consts::PI;
    let h = 2.0 * a * k / pi;
    let n0 = 4 + h.norm().ceil() as usize;
    let box_m = h.norm() + 2.0;
    let grid_step = 0.25;
    let mut found: Vec<Complex64> = Vec::new();
    let mut tried = 0usize;
    let mut converged = 0usize;
    let mut duplicates = 0usize;
    let mut try_add = |mu: Complex64, found: &mut Vec<Complex64>| {
        let mut mu = mu;
        if mu.re < 0.0 || (mu.re == 0.0 && mu.im < 0.0) {
            mu = -mu;
        }
        if mu.norm() < 0.05 {
            return;
        }
        for other in found.iter() {
            if (mu * mu - other * other).norm() < 1e-6 * (1.0 + mu.norm_sqr()) {
                duplicates += 1;
                return;
            }
        }
        found.push(mu);
    };
    let max_n = (count + 4).max(n0 + 2);
    for n in 1..=max_n {
        tried += 1;
        if let Some(mu) = newton_chi(Complex64::new(n as f64, 0.0), k, a) {
            converged += 1;
            try_add(mu, &mut found);
        }
    }
    let mut re = grid_step;
    while re <= n0 as f64 + grid_step / 2.0 {
        let mut im = -box_m;
        while im <= box_m + grid_step / 2.0 {
            tried += 1;
            if let Some(mu) = newton_chi(Complex64::new(re, im), k, a) {
                converged += 1;
                try_add(mu, &mut found);
            }
            im += grid_step;
        }
        re += grid_step;
    }
    // Near-axis seeds: roots can sit on the imaginary axis itself.
    let mut im = grid_step;
    while im <= box_m + grid_step / 2.0 {
        tried += 1;
        if let Some(mu) = newton_chi(Complex64::new(0.01, im), k, a) {
            converged += 1;
            try_add(mu, &mut found);
        }
        im += grid_step;
    }
    let mut roots: Vec<SlpRoot> = found
        .into_iter()
        .map(|mu| {
            let rho = mu_to_rho(mu, a);
            let (f, g) = fg_eval(rho, k, a);
            SlpRoot {
                mu,
                rho,
                index: mu.re.abs().round() as usize,
                parity: if g.norm() < f.norm() {
                    Parity::Even
                } else {
                    Parity::Odd
                },
                residual: chi(mu, k, a).norm() / chi_scale(mu, k, a),
            }
        })
        .collect();
    roots.sort_by(|p, q| {
        (p.mu.re.abs(), p.mu.im.abs())
            .partial_cmp(&(q.mu.re.abs(), q.mu.im.abs()))
            .unwrap()
    });
    if count > 0 {
        roots.truncate(count);
    }
    SlpScan {
        roots,
        seeds_tried: tried,
        seeds_converged: converged,
        duplicates_collapsed: duplicates,
    }
}

/// Axis eigenfunction value: `cosh(rho x)` or `sinh(rho x)`.
pub fn axis_value(parity: Parity, rho: Complex64, x: f64) -> Complex64 {
    match parity {
        Parity::Even => (rho * x).cosh(),
        Parity::Odd => (rho * x).sinh(),
    }
}

/// Axis eigenfunction derivative.
pub fn axis_deriv(parity: Parity, rho: Complex64, x: f64) -> Complex64 {
    match parity {
        Parity::Even => rho * (rho * x).sinh(),
        Parity::Odd => rho * (rho * x).cosh(),
    }
}

/// Errors while assembling the separable basis.
#[derive(Debug, thiserror::Error)]
pub enum BasisError {
    #[error("resonant truncation: {0}")]
    ResonantTruncation(String),
    #[error("basis products are numerically dependent (inputs {0:?} dropped)")]
    DependentBasis(Vec<usize>),
    #[error("{0}")]
    UnsupportedModel(String),
    #[error("axis root sweep returned {got} roots, needed {wanted}")]
    RootShortfall { wanted: usize, got: usize },
}

/// One separable basis entry: a normalized product of axis eigenfunctions,
/// retaining its rates for characteristic-polynomial denominators.
#[derive(Debug, Clone)]
pub struct BasisEntry {
    pub rho: Complex64,
    pub nu: Complex64,
    pub parity_x: Parity,
    pub parity_y: Parity,
    /// Product field, each axis factor normalized to unit weighted L2 norm.
    pub raw: ComplexField,
}

/// Separable eigenfunction basis at a fixed `z`: raw products plus their
/// orthonormalization and the upper-triangular change of basis between them.
#[derive(Debug, Clone)]
pub struct BasisSet {
    pub z: Complex64,
    pub k: Complex64,
    pub entries: Vec<BasisEntry>,
    pub ortho: Vec<ComplexField>,
    /// `raw_j = sum_i transform[i][j] ortho_i`.
    pub transform: DMatrix<Complex64>,
}

/// Builds the `n_x * n_y` product basis at `z` for a single-term model.
///
/// Axis roots come from [`slp_roots`] at `k = k(z)` with the two half-widths.
/// Errors with `ResonantTruncation` when `k` degenerates (`z = -xi`) or any
/// denominator `k^2 - rho^2` needed downstream is below tolerance.
pub fn basis_build(
    params: &ModelParams,
    grid: &QuadGrid,
    z: Complex64,
    n_x: usize,
    n_y: usize,
) -> Result<BasisSet, BasisError> {
    if params.n_terms() != 1 {
        return Err(BasisError::UnsupportedModel(
            "separable axis basis requires a single kernel term".into(),
        ));
    }
    let k = k_term(params, 0, z);
    if k.norm() <= 1e-9 * (1.0 + z.norm()) {
        return Err(BasisError::ResonantTruncation(format!(
            "k(z) = {k} vanishes at z = {z}"
        )));
    }
    let rx = slp_roots(k, params.a, n_x);
    if rx.roots.len() < n_x {
        return Err(BasisError::RootShortfall {
            wanted: n_x,
            got: rx.roots.len(),
        });
    }
    let ry = if (params.a - params.b).abs() < 1e-14 {
        rx.clone()
    } else {
        slp_roots(k, params.b, n_y)
    };
    if ry.roots.len() < n_y {
        return Err(BasisError::RootShortfall {
            wanted: n_y,
            got: ry.roots.len(),
        });
    }
    let k2 = k * k;
    for r in rx.roots[..n_x].iter().chain(ry.roots[..n_y].iter()) {
        let denom = k2 - r.rho * r.rho;
        if denom.norm() <= 1e-12 * (1.0 + k2.norm() + r.rho.norm_sqr()) {
            return Err(BasisError::ResonantTruncation(format!(
                "k^2 - rho^2 below tolerance at rho = {}",
                r.rho
            )));
        }
    }
    let axis_samples = |root: &SlpRoot, nodes: &[f64], weights: &[f64]| {
        let mut v: Vec<Complex64> = nodes
            .iter()
            .map(|&x| axis_value(root.parity, root.rho, x))
            .collect();
        let nrm = v
            .iter()
            .zip(weights)
            .map(|(val, w)| w * val.norm_sqr())
            .sum::<f64>()
            .sqrt();
        for val in &mut v {
            *val /= nrm;
        }
        v
    };
    let mut entries = Vec::with_capacity(n_x * n_y);
    for mx in &rx.roots[..n_x] {
        let fx = axis_samples(mx, &grid.nodes_x, &grid.weights_x);
        for my in &ry.roots[..n_y] {
            let fy = axis_samples(my, &grid.nodes_y, &grid.weights_y);
            entries.push(BasisEntry {
                rho: mx.rho,
                nu: my.rho,
                parity_x: mx.parity,
                parity_y: my.parity,
                raw: ComplexField::from_product(&fx, &fy),
            });
        }
    }
    let raws: Vec<ComplexField> = entries.iter().map(|e| e.raw.clone()).collect();
    let ob = orthonormalize(grid, &raws, 1e-10);
    if !ob.dropped.is_empty() {
        return Err(BasisError::DependentBasis(ob.dropped));
    }
    Ok(BasisSet {
        z,
        k,
        entries,
        ortho: ob.basis,
        transform: ob.transform,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::reference_params;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn neumann_limit_roots_are_integer_lattice() {
        // k = 0: roots mu_n = n exactly, rho_n = i pi n / 2, parity alternating
        // (n even -> cosh family since g = sinh(i pi n / 2) = 0).
        let scan = slp_roots(c(0.0, 0.0), 1.0, 6);
        assert_eq!(scan.roots.len(), 6);
        for (pos, r) in scan.roots.iter().enumerate() {
            let n = pos + 1;
            assert!((r.mu - c(n as f64, 0.0)).norm() < 1e-10, "mu_{n} = {}", r.mu);
            let expect_rho = c(0.0, std::f64::consts::PI * n as f64 / 2.0);
            assert!((r.rho - expect_rho).norm() < 1e-10);
            let expect_parity = if n % 2 == 0 { Parity::Even } else { Parity::Odd };
            assert_eq!(r.parity, expect_parity, "parity of mu = {n}");
            // Neumann check: phi'(a) = 0 exactly at these rates.
            assert!(axis_deriv(r.parity, expect_rho, 1.0).norm() < 1e-9);
        }
    }

    #[test]
    fn pinned_roots_for_oblique_rate() {
        // k = 1.4 - 1.4i on half-width pi; first three roots frozen from a
        // high-precision sweep, alternating parity, small residuals.
        let scan = slp_roots(c(1.4, -1.4), std::f64::consts::PI, 3);
        let pinned = [
            (c(0.88791273, -0.08869234), Parity::Even),
            (c(1.77255168, -0.16542482), Parity::Odd),
            (c(2.65579334, -0.22001175), Parity::Even),
        ];
        assert_eq!(scan.roots.len(), 3);
        for (r, (mu, parity)) in scan.roots.iter().zip(pinned.iter()) {
            assert!((r.mu - mu).norm() < 1e-7, "root {} vs pinned {}", r.mu, mu);
            assert_eq!(r.parity, *parity);
            assert!(r.residual < 1e-9);
        }
        assert!(scan.duplicates_collapsed > 0, "sweep should hit each root repeatedly");
    }

    #[test]
    fn root_at_critical_rate_is_even_despite_odd_index() {
        // The first root for k at the oscillatory onset rounds to index 1 but
        // belongs to the cosh family; parity must come from the boundary
        // factors, not from the lattice position.
        let scan = slp_roots(c(2.0, 1.3403), 1.0, 3);
        let first = &scan.roots[0];
        assert!((first.mu - c(0.72995238, 0.11032032)).norm() < 1e-7);
        assert_eq!(first.index, 1);
        assert_eq!(first.parity, Parity::Even);
        assert_eq!(scan.roots[1].parity, Parity::Odd);
        assert_eq!(scan.roots[2].parity, Parity::Even);
    }

    #[test]
    fn root_asymptotics_follow_inverse_first_order() {
        // |mu_n - n| <= C / n with C fitted on the first 10 roots.
        let k = c(1.4, -1.4);
        let a = std::f64::consts::PI;
        let scan = slp_roots(k, a, 50);
        assert!(scan.roots.len() >= 45, "expected a long root chain");
        let c_fit = scan.roots[..10]
            .iter()
            .map(|r| (r.mu - c(r.index as f64, 0.0)).norm() * r.index as f64)
            .fold(0.0f64, f64::max);
        for r in &scan.roots {
            let dev = (r.mu - c(r.index as f64, 0.0)).norm();
            assert!(
                dev <= 1.05 * c_fit / r.index as f64,
                "root {} deviates {dev:.3e} > C/n with C = {c_fit:.3}",
                r.index
            );
            assert!(r.mu.im.abs() < 1.0, "imaginary parts must stay bounded");
        }
    }

    #[test]
    fn basis_is_orthonormal_with_tight_boundary_residuals() {
        let p = reference_params(-3.27);
        let grid = QuadGrid::on_rectangle(p.a, p.b, 32, 32);
        let z = c(0.01, 1.34);
        let basis = basis_build(&p, &grid, z, 3, 3).unwrap();
        assert_eq!(basis.entries.len(), 9);
        // Gram identity.
        for i in 0..9 {
            for j in 0..9 {
                let g = grid.inner(&basis.ortho[i], &basis.ortho[j]);
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((g - c(expect, 0.0)).norm() < 1e-8);
            }
        }
        // Robin boundary residual per axis factor.
        for e in &basis.entries {
            for (rho, parity, h) in [(e.rho, e.parity_x, p.a), (e.nu, e.parity_y, p.b)] {
                let bv = basis.k * axis_value(parity, rho, h) + axis_deriv(parity, rho, h);
                let scale = basis.k.norm() * axis_value(parity, rho, h).norm()
                    + axis_deriv(parity, rho, h).norm();
                assert!(bv.norm() <= 1e-8 * scale, "Robin residual {:.2e}", bv.norm() / scale);
            }
        }
    }

    #[test]
    fn basis_rejects_vanishing_rate() {
        let p = reference_params(-3.27);
        let grid = QuadGrid::on_rectangle(p.a, p.b, 16, 16);
        let err = basis_build(&p, &grid, c(-2.0, 0.0), 1, 1).unwrap_err();
        assert!(matches!(err, BasisError::ResonantTruncation(_)));
    }

    #[test]
    fn axis_products_satisfy_separable_eigenrelation() {
        // Finite differences of (k^2 - dxx)(k^2 - dyy) applied to an axis
        // product reproduce (k^2 - rho^2)(k^2 - nu^2) times the product.
        let p = reference_params(-3.27);
        let z = c(0.01, 1.34);
        let k = k_term(&p, 0, z);
        let scan = slp_roots(k, p.a, 2);
        let (r1, r2) = (&scan.roots[0], &scan.roots[1]);
        let h = 1e-3;
        let func = |x: f64, y: f64| {
            axis_value(r1.parity, r1.rho, x) * axis_value(r2.parity, r2.rho, y)
        };
        let mut worst = 0.0f64;
        for &(x, y) in &[(0.2, -0.4), (-0.6, 0.1), (0.0, 0.55)] {
            let dxx = (func(x + h, y) - 2.0 * func(x, y) + func(x - h, y)) / (h * h);
            let dyy = (func(x, y + h) - 2.0 * func(x, y) + func(x, y - h)) / (h * h);
            let dxxyy = (func(x + h, y + h) + func(x - h, y - h) + func(x + h, y - h)
                + func(x - h, y + h)
                - 2.0 * (func(x + h, y) + func(x - h, y) + func(x, y + h) + func(x, y - h))
                + 4.0 * func(x, y))
                / (h * h * h * h);
            let lhs = k * k * k * k * func(x, y) - k * k * (dxx + dyy) + dxxyy;
            let rhs = (k * k - r1.rho * r1.rho) * (k * k - r2.rho * r2.rho) * func(x, y);
            worst = worst.max((lhs - rhs).norm() / rhs.norm().max(1e-12));
        }
        assert!(worst < 1e-3, "separable eigenrelation deviation {worst:.2e}");
    }

    proptest! {
        #[test]
        fn chi_is_even(re in 0.1f64..4.0, im in -1.5f64..1.5, kr in -2.0f64..2.0, ki in -2.0f64..2.0) {
            let mu = c(re, im);
            let k = c(kr, ki);
            let v = chi(mu, k, 1.0);
            prop_assert!((chi(-mu, k, 1.0) - v).norm() < 1e-10 * chi_scale(mu, k, 1.0));
        }

        #[test]
        fn boundary_factor_product_identity(
            re in 0.1f64..3.0, im in -1.0f64..1.0,
            kr in -2.0f64..2.0, ki in -2.0f64..2.0,
        ) {
            // 2 rho f g = 2k cosh(2a rho) + (k^2/rho + rho) sinh(2a rho), and the
            // same expression equals (2a/pi) chi(mu).
            let a = 1.3;
            let mu = c(re, im);
            let k = c(kr, ki);
            let rho = mu_to_rho(mu, a);
            let (f, g) = fg_eval(rho, k, a);
            let lhs = 2.0 * rho * f * g;
            let rhs = 2.0 * k * (2.0 * a * rho).cosh()
                + (k * k / rho + rho) * (2.0 * a * rho).sinh();
            let scale = lhs.norm().max(rhs.norm()).max(1.0);
            prop_assert!((lhs - rhs).norm() < 1e-12 * scale);
            let via_chi = (2.0 * a / std::f64::consts::PI) * chi(mu, k, a);
            prop_assert!((lhs - via_chi).norm() < 1e-10 * scale.max(chi_scale(mu, k, a)));
        }

        #[test]
        fn boundary_factor_parity_in_rho(
            rr in 0.1f64..2.0, ri in -2.0f64..2.0,
            kr in -2.0f64..2.0, ki in -2.0f64..2.0,
        ) {
            let rho = c(rr, ri);
            let k = c(kr, ki);
            let (f, g) = fg_eval(rho, k, 1.0);
            let (fm, gm) = fg_eval(-rho, k, 1.0);
            prop_assert!((fm - f).norm() < 1e-12 * f.norm().max(1.0));
            prop_assert!((gm + g).norm() < 1e-12 * g.norm().max(1.0));
        }
    }
}
