//! Modified Gram–Schmidt orthonormalization of complex fields with respect to
//! the quadrature inner product, recording the change of basis.

use crate::numerics::field::ComplexField;
use crate::numerics::quadrature::QuadGrid;
use nalgebra::DMatrix;
use num_complex::Complex64;

/// Result of orthonormalizing a list of fields.
///
/// `transform` is the upper-triangular matrix `R` with `v_j = sum_i R[i][j] e_i`,
/// so expansion coefficients in the original family are recovered by back
/// substitution. `dropped` lists input indices whose residual after projection
/// fell below the drop tolerance (numerically dependent vectors); those
/// columns are absent from both `basis` and `transform`.
#[derive(Debug, Clone)]
pub struct OrthoBasis {
    pub basis: Vec<ComplexField>,
    pub transform: DMatrix<Complex64>,
    pub dropped: Vec<usize>,
}

/// Modified Gram–Schmidt with one re-orthogonalization pass per vector.
///
/// The second projection pass keeps the Gram matrix of the output within
/// machine precision of the identity even for strongly correlated inputs.
pub fn orthonormalize(
    grid: &QuadGrid,
    inputs: &[ComplexField],
    drop_tol: f64,
) -> OrthoBasis {
    let mut basis: Vec<ComplexField> = Vec::with_capacity(inputs.len());
    let mut dropped = Vec::new();
    // Column j of `coeffs` collects <e_i, v_j> for surviving e_i plus the norm.
    let mut columns: Vec<Vec<Complex64>> = Vec::with_capacity(inputs.len());
    for (j, input) in inputs.iter().enumerate() {
        let original_norm = grid.norm(input);
        let mut v = input.clone();
        let mut coeff = vec![Complex64::new(0.0, 0.0); basis.len()];
        for _pass in 0..2 {
            for (i, e) in basis.iter().enumerate() {
                let c = grid.inner(e, &v);
                v.axpy(-c, e);
                coeff[i] += c;
            }
        }
        let r = grid.norm(&v);
        if r <= drop_tol * original_norm.max(f64::MIN_POSITIVE) {
            dropped.push(j);
            continue;
        }
        let e = v.scaled(Complex64::new(1.0 / r, 0.0));
        coeff.push(Complex64::new(r, 0.0));
        basis.push(e);
        columns.push(coeff);
    }
    let m = basis.len();
    let mut transform = DMatrix::<Complex64>::zeros(m, m);
    for (j, col) in columns.iter().enumerate() {
        for (i, &c) in col.iter().enumerate() {
            transform[(i, j)] = c;
        }
    }
    OrthoBasis {
        basis,
        transform,
        dropped,
    }
}

/// Solves `R xi = c` for upper-triangular `R` by back substitution.
pub fn back_substitute(r: &DMatrix<Complex64>, c: &[Complex64]) -> Vec<Complex64> {
    let m = c.len();
    debug_assert_eq!(r.nrows(), m);
    let mut x = vec![Complex64::new(0.0, 0.0); m];
    for i in (0..m).rev() {
        let mut acc = c[i];
        for j in (i + 1)..m {
            acc -= r[(i, j)] * x[j];
        }
        x[i] = acc / r[(i, i)];
    }
    x
}
