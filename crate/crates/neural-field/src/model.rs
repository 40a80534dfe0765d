//! Model definition: domain, connectivity kernel, propagation delay, firing rate.
//!
//! The field lives on the rectangle `[-a, a] x [-b, b]`. Connectivity is a sum
//! of exponentials in the 1-norm distance, `J(r, r') = sum_i c_hat_i *
//! exp(-xi_i * ||r - r'||_1)`, and the transmission delay is affine in the same
//! distance, `tau(r, r') = tau0 + ||r - r'||_1`. The firing rate is a logistic
//! sigmoid shifted to vanish at the origin.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// One exponential connectivity term with strength `c_hat` and decay `xi`.
///
/// Both are complex in general; physically real kernels arise from real values
/// or conjugate pairs of terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelTerm {
    pub c_hat: Complex64,
    pub xi: Complex64,
}

/// Full parameter set for the delayed neural field model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Linear decay rate of the membrane potential (`alpha > 0`).
    pub alpha: f64,
    /// Fixed component of the transmission delay (`tau0 > 0`).
    pub tau0: f64,
    /// Slope parameter of the firing-rate sigmoid (`gamma > 0`).
    pub gamma: f64,
    /// Half-width of the domain in `x`.
    pub a: f64,
    /// Half-width of the domain in `y`.
    pub b: f64,
    /// Exponential connectivity terms.
    pub terms: Vec<KernelTerm>,
}

/// A point of the domain rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    /// 1-norm distance to another point.
    pub fn dist1(&self, other: &Point2) -> f64 {
        (self.x - other.x).abs() + (self.y - other.y).abs()
    }
}

/// Errors raised while validating model parameters.
#[derive(Debug, thiserror::Error)]
pub enum ModelError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("kernel is not real on the domain: max |Im J| = {max_imag:.3e} at sample {index}")]
    ComplexKernel { max_imag: f64, index: usize },
}

impl ModelParams {
    /// Validates positivity constraints and (on request) kernel realness.
    ///
    /// Realness is checked by sampling `J` at deterministic low-discrepancy
    /// points of the distance range; a kernel given by complex terms passes
    /// only if the imaginary parts cancel (e.g. conjugate term pairs).
    pub fn validate(&self, check_real_kernel: bool) -> Result<(), ModelError> {
        let positive = [
            ("alpha", self.alpha),
            ("tau0", self.tau0),
            ("gamma", self.gamma),
            ("a", self.a),
            ("b", self.b),
        ];
        for (name, v) in positive {
            if v <= 0.0 || !v.is_finite() {
                return Err(ModelError::InvalidParameter(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        if self.terms.is_empty() {
            return Err(ModelError::InvalidParameter(
                "at least one kernel term is required".into(),
            ));
        }
        for (i, t) in self.terms.iter().enumerate() {
            if !t.c_hat.is_finite() || !t.xi.is_finite() {
                return Err(ModelError::InvalidParameter(format!(
                    "kernel term {i} has non-finite coefficients"
                )));
            }
        }
        if check_real_kernel {
            // J depends on position only through d = ||r - r'||_1 in [0, 2a + 2b].
            let dmax = 2.0 * self.a + 2.0 * self.b;
            let mut worst = (0.0f64, 0usize);
            for i in 0..257 {
                // Golden-ratio sequence: cheap, deterministic, fills [0, 1].
                let u = (0.618_033_988_749_895 * i as f64).fract();
                let d = u * dmax;
                let j: Complex64 = self
                    .terms
                    .iter()
                    .map(|t| t.c_hat * (-t.xi * d).exp())
                    .sum();
                if j.im.abs() > worst.0 {
                    worst = (j.im.abs(), i);
                }
            }
            let scale = 1.0 + self.terms.iter().map(|t| t.c_hat.norm()).sum::<f64>();
            if worst.0 > 1e-12 * scale {
                return Err(ModelError::ComplexKernel {
                    max_imag: worst.0,
                    index: worst.1,
                });
            }
        }
        Ok(())
    }

    /// Connectivity kernel `J(r, r')`.
    pub fn kernel_eval(&self, r: Point2, rp: Point2) -> Complex64 {
        let d = r.dist1(&rp);
        self.terms.iter().map(|t| t.c_hat * (-t.xi * d).exp()).sum()
    }

    /// Transmission delay `tau(r, r') = tau0 + ||r - r'||_1`.
    pub fn delay_eval(&self, r: Point2, rp: Point2) -> f64 {
        self.tau0 + r.dist1(&rp)
    }

    /// Largest delay on the domain, `tau0 + 2a + 2b`.
    pub fn tau_max(&self) -> f64 {
        self.tau0 + 2.0 * self.a + 2.0 * self.b
    }

    /// Firing rate `S(u) = 1/(1 + exp(-gamma u)) - 1/2`, odd and bounded by 1/2.
    pub fn firing_rate(&self, u: f64) -> f64 {
        // tanh form avoids overflow for large |u| and is manifestly odd.
        0.5 * (0.5 * self.gamma * u).tanh()
    }

    /// First derivative of the firing rate at the origin: `gamma / 4`.
    pub fn firing_rate_d1_at_zero(&self) -> f64 {
        self.gamma / 4.0
    }

    /// Second derivative of the firing rate at the origin (zero by oddness).
    pub fn firing_rate_d2_at_zero(&self) -> f64 {
        0.0
    }

    /// Third derivative of the firing rate at the origin: `-gamma^3 / 8`.
    pub fn firing_rate_d3_at_zero(&self) -> f64 {
        -self.gamma.powi(3) / 8.0
    }

    /// Number of kernel terms.
    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }
}

/// Builds the single-term parameter set used throughout the examples:
/// `alpha = 1, tau0 = 1, gamma = 4, a = b = 1, xi = 2`, with strength `c_hat`.
pub fn reference_params(c_hat: f64) -> ModelParams {
    ModelParams {
        alpha: 1.0,
        tau0: 1.0,
        gamma: 4.0,
        a: 1.0,
        b: 1.0,
        terms: vec![KernelTerm {
            c_hat: Complex64::new(c_hat, 0.0),
            xi: Complex64::new(2.0, 0.0),
        }],
    }
}
