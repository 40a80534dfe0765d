//! Complex-valued fields sampled on a tensor quadrature grid.
//!
//! A field stores its samples as an `nx x ny` matrix with entry `(i, j)`
//! holding the value at `(nodes_x[i], nodes_y[j])`. Separable integral
//! operators then act by plain matrix products from the left and right.

use crate::numerics::quadrature::QuadGrid;
use nalgebra::DMatrix;
use num_complex::Complex64;

/// Samples of a complex function on a [`QuadGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    pub values: DMatrix<Complex64>,
}

impl ComplexField {
    /// Zero field with the grid's shape.
    pub fn zeros(grid: &QuadGrid) -> Self {
        ComplexField {
            values: DMatrix::zeros(grid.nx(), grid.ny()),
        }
    }

    /// Samples `f(x, y)` at every grid node.
    pub fn from_fn<F: Fn(f64, f64) -> Complex64>(grid: &QuadGrid, f: F) -> Self {
        let values = DMatrix::from_fn(grid.nx(), grid.ny(), |i, j| {
            f(grid.nodes_x[i], grid.nodes_y[j])
        });
        ComplexField { values }
    }

    /// Outer product of two one-dimensional sample vectors.
    pub fn from_product(fx: &[Complex64], fy: &[Complex64]) -> Self {
        let values = DMatrix::from_fn(fx.len(), fy.len(), |i, j| fx[i] * fy[j]);
        ComplexField { values }
    }

    pub fn nx(&self) -> usize {
        self.values.nrows()
    }

    pub fn ny(&self) -> usize {
        self.values.ncols()
    }

    /// Returns `self * s` without mutating.
    pub fn scaled(&self, s: Complex64) -> Self {
        ComplexField {
            values: self.values.map(|v| v * s),
        }
    }

    /// In-place `self += s * other`.
    pub fn axpy(&mut self, s: Complex64, other: &ComplexField) {
        debug_assert_eq!(self.values.shape(), other.values.shape());
        self.values.zip_apply(&other.values, |a, b| *a += s * b);
    }

    /// Elementwise sum.
    pub fn add(&self, other: &ComplexField) -> Self {
        ComplexField {
            values: &self.values + &other.values,
        }
    }

    /// Elementwise difference.
    pub fn sub(&self, other: &ComplexField) -> Self {
        ComplexField {
            values: &self.values - &other.values,
        }
    }

    /// Elementwise product (used for pointwise nonlinear terms).
    pub fn hadamard(&self, other: &ComplexField) -> Self {
        ComplexField {
            values: self.values.component_mul(&other.values),
        }
    }

    /// Elementwise complex conjugate.
    pub fn conj(&self) -> Self {
        ComplexField {
            values: self.values.map(|v| v.conj()),
        }
    }

    /// Largest sample magnitude.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.norm()))
    }
}
