//! Shared numerical building blocks: quadrature, sampled complex fields,
//! Newton iteration, orthonormalization, and polynomial roots.

pub mod field;
pub mod gram_schmidt;
pub mod newton;
pub mod polyroots;
pub mod quadrature;

pub use field::ComplexField;
pub use gram_schmidt::{back_substitute, orthonormalize, OrthoBasis};
pub use newton::{complex_newton, NewtonError, NewtonSettings, NewtonSolution};
pub use polyroots::{poly_eval, poly_mul, poly_roots};
pub use quadrature::{gauss_legendre, unit_circle_phases, QuadGrid};
