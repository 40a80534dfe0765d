//! Gauss–Legendre quadrature, tensor grids on the rectangle, and the
//! equispaced rule for integrals over a closed circular contour.

use crate::numerics::field::ComplexField;
use num_complex::Complex64;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[lo, hi]`.
///
/// Nodes are strictly increasing and weights positive; exact for polynomials
/// of degree `2n - 1`.
pub fn gauss_legendre(n: usize, lo: f64, hi: f64) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "quadrature order must be at least 1");
    assert!(hi > lo, "empty interval");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi-style initial guess, then Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre recurrence for P_n(x) and P_n'(x).
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // Roots come out in decreasing order; mirror into both halves.
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    for i in 0..n {
        nodes[i] = mid + half * nodes[i];
        weights[i] *= half;
    }
    (nodes, weights)
}

/// Tensor-product Gauss–Legendre grid on `[-a, a] x [-b, b]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadGrid {
    pub nodes_x: Vec<f64>,
    pub weights_x: Vec<f64>,
    pub nodes_y: Vec<f64>,
    pub weights_y: Vec<f64>,
}

impl QuadGrid {
    /// Grid with `nx` by `ny` Gauss–Legendre nodes on `[-a, a] x [-b, b]`.
    pub fn on_rectangle(a: f64, b: f64, nx: usize, ny: usize) -> Self {
        let (nodes_x, weights_x) = gauss_legendre(nx, -a, a);
        let (nodes_y, weights_y) = gauss_legendre(ny, -b, b);
        QuadGrid {
            nodes_x,
            weights_x,
            nodes_y,
            weights_y,
        }
    }

    pub fn nx(&self) -> usize {
        self.nodes_x.len()
    }

    pub fn ny(&self) -> usize {
        self.nodes_y.len()
    }

    /// Integral of a complex field over the rectangle.
    pub fn integrate(&self, f: &ComplexField) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, wx) in self.weights_x.iter().enumerate() {
            for (j, wy) in self.weights_y.iter().enumerate() {
                acc += f.values[(i, j)] * (wx * wy);
            }
        }
        acc
    }

    /// Unweighted L2 inner product `<f, g> = integral of conj(f) * g`.
    pub fn inner(&self, f: &ComplexField, g: &ComplexField) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, wx) in self.weights_x.iter().enumerate() {
            for (j, wy) in self.weights_y.iter().enumerate() {
                acc += f.values[(i, j)].conj() * g.values[(i, j)] * (wx * wy);
            }
        }
        acc
    }

    /// L2 norm induced by [`QuadGrid::inner`].
    pub fn norm(&self, f: &ComplexField) -> f64 {
        self.inner(f, f).re.max(0.0).sqrt()
    }
}

/// Equispaced sample points `exp(2 pi i j / n)` used to discretize integrals
/// over a circle; returns the angles' unit phases.
///
/// For integrands analytic in an annulus around the circle the rule converges
/// geometrically in `n`.
pub fn unit_circle_phases(n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|j| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / n as f64))
        .collect()
}
