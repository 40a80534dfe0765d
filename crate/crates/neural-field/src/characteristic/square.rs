//! Eigenvector search for the two-term kernel on a square domain.
//!
//! With two exponential terms the boundary closure no longer factorizes per
//! axis: a candidate eigenvector built on the root class `{rho_1, rho_2, nu}`
//! exists when one strength vector `eta` annihilates every column of the
//! boundary matrix `S` — a rank-one condition — simultaneously with the
//! characteristic equations. On a square (`a = b`) the coefficient matrix `D`
//! of the product expansion can then be taken antisymmetric, assembled from
//! the entries of a row of `S`.
//!
//! The search solves the coupled system for `(nu, z, eta_1, eta_2, rho_1,
//! rho_2)` by damped Newton with per-row magnitude scales (recomputed each
//! iterate, frozen within it) and certifies the result afterwards: rank-one
//! minors, boundary closure, class separation, and the quadrature residual of
//! the assembled eigenfunction.

use crate::characteristic::nystrom::DeltaOperator;
use crate::characteristic::{
    boundary_residual, char_poly, char_scale, equiv_roots, k_term, resonance_check, s_matrix,
    CharError, Parity,
};
use crate::model::ModelParams;
use crate::numerics::field::ComplexField;
use crate::numerics::newton::{complex_newton, NewtonError, NewtonSettings};
use crate::numerics::quadrature::QuadGrid;
use crate::sturm_liouville::axis_value;
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum SquareSearchError {
    #[error("square search requires a = b (got a = {a}, b = {b})")]
    NotSquare { a: f64, b: f64 },
    #[error("square search requires exactly two kernel terms (got {0})")]
    NotTwoTerms(usize),
    #[error("newton iteration failed: {0}")]
    NonConvergence(NewtonError),
    #[error("converged onto a degenerate root class: {0}")]
    DegenerateClass(String),
    #[error("converged onto the resonance set at z = {0}")]
    ResonantSolution(Complex64),
    #[error(transparent)]
    Char(#[from] CharError),
    #[error("could not seed the strength vector: {0}")]
    SeedingFailed(String),
}

/// A certified two-term square-domain eigensolution.
#[derive(Debug, Clone, Serialize)]
pub struct SquareModeSolution {
    pub z: Complex64,
    pub nu: Complex64,
    pub rho1: Complex64,
    pub rho2: Complex64,
    /// Strength vector annihilating the boundary matrix columns, normalized
    /// by the bilinear form `eta_1^2 + eta_2^2 = 1` (sign is conventional).
    pub eta: [Complex64; 2],
    pub parity: Parity,
    /// Antisymmetric product coefficients over the class `{rho_1, rho_2, nu}`.
    pub d: [[Complex64; 3]; 3],
    /// Largest scaled 2x2 minor of the final boundary matrix (rank-one certificate).
    pub minor_residual: f64,
    /// Scaled boundary-closure residual of `d`.
    pub boundary_residual: f64,
    /// Smallest pairwise separation of the class squares.
    pub class_min_separation: f64,
    /// Scaled residual of the Newton system at the solution.
    pub newton_residual: f64,
    pub iterations: usize,
    /// `||Delta(z) q|| / ||q||` of the assembled eigenfunction, when a grid
    /// was supplied.
    pub delta_residual: Option<f64>,
}

/// Unguarded boundary-matrix entries for the Newton residual; near-pole
/// blowups are tamed by the row scales rather than rejected.
fn s_entries(
    params: &ModelParams,
    z: Complex64,
    roots: &[Complex64; 3],
    h: f64,
    parity: Parity,
) -> [[Complex64; 3]; 2] {
    let mut s = [[Complex64::new(0.0, 0.0); 3]; 2];
    for (i, row) in s.iter_mut().enumerate() {
        let k = k_term(params, i, z);
        for (j, &r) in roots.iter().enumerate() {
            let rh = r * h;
            let num = match parity {
                Parity::Even => k * rh.cosh() + r * rh.sinh(),
                Parity::Odd => k * rh.sinh() + r * rh.cosh(),
            };
            row[j] = num / (k * k - r * r);
        }
    }
    s
}

/// Searches for a two-term eigensolution from a `(z, nu)` seed.
///
/// The initial `rho` pair comes from the root class of the seed, and the
/// initial `eta` annihilates the dominant boundary-matrix column exactly.
/// Supplying a grid adds the end-to-end quadrature residual to the result.
pub fn square_n2_search(
    params: &ModelParams,
    seed_z: Complex64,
    seed_nu: Complex64,
    parity: Parity,
    grid: Option<&QuadGrid>,
) -> Result<SquareModeSolution, SquareSearchError> {
    if params.n_terms() != 2 {
        return Err(SquareSearchError::NotTwoTerms(params.n_terms()));
    }
    if (params.a - params.b).abs() > 1e-12 * params.a {
        return Err(SquareSearchError::NotSquare {
            a: params.a,
            b: params.b,
        });
    }
    let h = params.a;
    // Seed rho pair from the root class at the seed point.
    let class = equiv_roots(params, seed_z, seed_nu).map_err(SquareSearchError::Char)?;
    let (r1, r2) = (class.rhos[0], class.rhos[1]);
    let s0 = s_entries(params, seed_z, &[r1, r2, seed_nu], h, parity);
    // eta from the largest column: (S[1][j], -S[0][j]) kills that column exactly.
    let mut eta = None;
    let mut order: Vec<usize> = (0..3).collect();
    order.sort_by(|&p, &q| {
        let np = s0[0][p].norm() + s0[1][p].norm();
        let nq = s0[0][q].norm() + s0[1][q].norm();
        nq.partial_cmp(&np).unwrap()
    });
    for j in order {
        let cand = [s0[1][j], -s0[0][j]];
        let nn = (cand[0] * cand[0] + cand[1] * cand[1]).sqrt();
        if nn.norm() > 1e-8 * (cand[0].norm() + cand[1].norm()).max(1e-300) {
            eta = Some([cand[0] / nn, cand[1] / nn]);
            break;
        }
    }
    let eta = eta.ok_or_else(|| {
        SquareSearchError::SeedingFailed("boundary matrix columns are isotropic".into())
    })?;
    // Unknowns: [nu, z, eta1, eta2, rho1, rho2].
    let residual = |v: &[Complex64]| {
        let (nu, z, e1, e2, r1, r2) = (v[0], v[1], v[2], v[3], v[4], v[5]);
        let s = s_entries(params, z, &[r1, r2, nu], h, parity);
        vec![
            e1 * s[0][0] + e2 * s[1][0],
            e1 * s[0][1] + e2 * s[1][1],
            e1 * s[0][2] + e2 * s[1][2],
            e1 * e1 + e2 * e2 - 1.0,
            char_poly(params, z, r1, nu),
            char_poly(params, z, r2, nu),
        ]
    };
    let scales = |v: &[Complex64]| {
        let (nu, z, e1, e2, r1, r2) = (v[0], v[1], v[2], v[3], v[4], v[5]);
        let s = s_entries(params, z, &[r1, r2, nu], h, parity);
        let ae = e1.norm().max(e2.norm()).max(1e-2);
        vec![
            ae * (s[0][0].norm() + s[1][0].norm()) + 1e-12,
            ae * (s[0][1].norm() + s[1][1].norm()) + 1e-12,
            ae * (s[0][2].norm() + s[1][2].norm()) + 1e-12,
            1.0,
            char_scale(params, z, r1, nu),
            char_scale(params, z, r2, nu),
        ]
    };
    let settings = NewtonSettings {
        max_iter: 100,
        tol_residual: 1e-11,
        fd_step: 1e-7,
        step_cap: Some(0.4),
        ..NewtonSettings::default()
    };
    let sol = complex_newton(
        residual,
        Some(&scales),
        &[seed_nu, seed_z, eta[0], eta[1], r1, r2],
        &settings,
    )
    .map_err(SquareSearchError::NonConvergence)?;
    let (nu, z, e1, e2, r1, r2) = (sol.x[0], sol.x[1], sol.x[2], sol.x[3], sol.x[4], sol.x[5]);
    // Normalize root representatives to the principal half-plane (harmless:
    // every expression below is even in each root, up to an overall sign of q
    // in the odd family).
    let norm_root = |r: Complex64| {
        if r.re < 0.0 || (r.re.abs() < 1e-14 && r.im < 0.0) {
            -r
        } else {
            r
        }
    };
    let (r1, r2, nu) = (norm_root(r1), norm_root(r2), norm_root(nu));
    if resonance_check(params, z).is_resonant() {
        return Err(SquareSearchError::ResonantSolution(z));
    }
    // Class separation certificate.
    let sq = [r1 * r1, r2 * r2, nu * nu];
    let sq_scale = 1.0 + sq.iter().map(|s| s.norm()).fold(0.0f64, f64::max);
    let mut min_sep = f64::INFINITY;
    for i in 0..3 {
        for j in (i + 1)..3 {
            min_sep = min_sep.min((sq[i] - sq[j]).norm());
        }
    }
    if min_sep <= 1e-6 * sq_scale {
        return Err(SquareSearchError::DegenerateClass(format!(
            "class squares collapse (min separation {min_sep:.3e}); the antisymmetric construction degenerates"
        )));
    }
    let roots = [r1, r2, nu];
    let s = s_matrix(params, z, &roots, h, parity)?;
    // Rank-one certificate: all 2x2 minors vanish relative to their terms.
    let mut minor_res = 0.0f64;
    for p in 0..3 {
        for q in (p + 1)..3 {
            let m = s[(0, p)] * s[(1, q)] - s[(0, q)] * s[(1, p)];
            let sc = (s[(0, p)] * s[(1, q)]).norm() + (s[(0, q)] * s[(1, p)]).norm();
            minor_res = minor_res.max(m.norm() / sc.max(f64::MIN_POSITIVE));
        }
    }
    // Antisymmetric coefficients from the first row of S.
    let (s1, s2, s3) = (s[(0, 0)], s[(0, 1)], s[(0, 2)]);
    let zero = Complex64::new(0.0, 0.0);
    let d = [[zero, -s3, s2], [s3, zero, -s1], [-s2, s1, zero]];
    let d_mat = DMatrix::from_fn(3, 3, |i, j| d[i][j]);
    let b_res = boundary_residual(params, z, &roots, &d_mat, parity)?;
    let delta_residual = grid.map(|g| {
        let mut q = ComplexField::zeros(g);
        for i in 0..3 {
            let fx: Vec<Complex64> = g
                .nodes_x
                .iter()
                .map(|&x| axis_value(parity, roots[i], x))
                .collect();
            for j in 0..3 {
                if d[i][j].norm() == 0.0 {
                    continue;
                }
                let fy: Vec<Complex64> = g
                    .nodes_y
                    .iter()
                    .map(|&y| axis_value(parity, roots[j], y))
                    .collect();
                q.axpy(d[i][j], &ComplexField::from_product(&fx, &fy));
            }
        }
        let r = DeltaOperator::new(params, g, z).apply(&q);
        g.norm(&r) / g.norm(&q)
    });
    Ok(SquareModeSolution {
        z,
        nu,
        rho1: r1,
        rho2: r2,
        eta: [e1, e2],
        parity,
        d,
        minor_residual: minor_res,
        boundary_residual: b_res,
        class_min_separation: min_sep,
        newton_residual: sol.residual,
        iterations: sol.iterations,
        delta_residual,
    })
}

/// Tries a list of `(z, nu)` seeds, returning distinct certified solutions and
/// the per-seed failures.
pub fn square_n2_scan(
    params: &ModelParams,
    seeds: &[(Complex64, Complex64)],
    parity: Parity,
    grid: Option<&QuadGrid>,
) -> (Vec<SquareModeSolution>, Vec<(Complex64, Complex64, String)>) {
    let mut solutions: Vec<SquareModeSolution> = Vec::new();
    let mut failures = Vec::new();
    for &(z0, nu0) in seeds {
        match square_n2_search(params, z0, nu0, parity, grid) {
            Ok(sol) => {
                if !solutions
                    .iter()
                    .any(|s| (s.z - sol.z).norm() <= 1e-6 * (1.0 + sol.z.norm()))
                {
                    solutions.push(sol);
                }
            }
            Err(e) => failures.push((z0, nu0, e.to_string())),
        }
    }
    (solutions, failures)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{KernelTerm, ModelParams};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn two_term_params() -> ModelParams {
        ModelParams {
            alpha: 1.0,
            tau0: 1.0,
            gamma: 4.0,
            a: 1.0,
            b: 1.0,
            terms: vec![
                KernelTerm { c_hat: c(-3.27, 0.0), xi: c(2.0, 0.0) },
                KernelTerm { c_hat: c(-1.0, 0.0), xi: c(1.0, 0.0) },
            ],
        }
    }

    #[test]
    fn pinned_two_term_solution_from_direct_seed() {
        let p = two_term_params();
        let grid = QuadGrid::on_rectangle(p.a, p.b, 48, 48);
        let sol = square_n2_search(&p, c(-1.4, 0.0), c(0.0, 4.0), Parity::Even, Some(&grid))
            .unwrap();
        assert!((sol.z - c(-1.5098883991, 0.0)).norm() < 1e-6, "z = {}", sol.z);
        assert!((sol.nu - c(0.0, 4.1682384043)).norm() < 1e-6, "nu = {}", sol.nu);
        // The two solved rates, in either order.
        let want = [c(0.0, 1.3644812485), c(0.5050809444, 0.0)];
        let got = [sol.rho1, sol.rho2];
        let direct = (got[0] - want[0]).norm().max((got[1] - want[1]).norm());
        let swapped = (got[0] - want[1]).norm().max((got[1] - want[0]).norm());
        assert!(direct.min(swapped) < 1e-6, "rates {:?}", got);
        // Strength ratio is sign-free.
        let ratio = sol.eta[0] / sol.eta[1];
        assert!((ratio - c(0.75600967, 0.0) / c(-0.65456045, 0.0)).norm() < 1e-5);
        assert!(sol.minor_residual < 1e-8, "minors {:.2e}", sol.minor_residual);
        assert!(sol.boundary_residual < 1e-8, "boundary {:.2e}", sol.boundary_residual);
        assert!(sol.class_min_separation > 1.0);
        assert!(sol.delta_residual.unwrap() < 1e-3);
    }

    #[test]
    fn second_seed_converges_to_the_same_point() {
        let p = two_term_params();
        let sol = square_n2_search(&p, c(-1.6, 0.0), c(0.0, 4.3), Parity::Even, None).unwrap();
        assert!((sol.z - c(-1.5098883991, 0.0)).norm() < 1e-6);
    }

    #[test]
    fn scan_dedupes_and_reports_failures() {
        let p = two_term_params();
        let seeds = [
            (c(-1.4, 0.0), c(0.0, 4.0)),
            (c(-1.6, 0.0), c(0.0, 4.3)),
            // Deliberately hopeless seed at the essential point.
            (c(-1.0, 0.0), c(0.0, 4.0)),
        ];
        let (sols, fails) = square_n2_scan(&p, &seeds, Parity::Even, None);
        assert_eq!(sols.len(), 1, "two good seeds collapse to one solution");
        assert_eq!(fails.len(), 1);
    }

    #[test]
    fn rejects_wrong_shape_or_term_count() {
        let mut p = two_term_params();
        p.b = 1.5;
        assert!(matches!(
            square_n2_search(&p, c(-1.4, 0.0), c(0.0, 4.0), Parity::Even, None),
            Err(SquareSearchError::NotSquare { .. })
        ));
        let p1 = crate::model::reference_params(-3.27);
        assert!(matches!(
            square_n2_search(&p1, c(-1.4, 0.0), c(0.0, 4.0), Parity::Even, None),
            Err(SquareSearchError::NotTwoTerms(1))
        ));
    }
}
