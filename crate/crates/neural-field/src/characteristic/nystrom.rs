//! Discretization of the separable integral operators.
//!
//! Every operator here integrates `exp(-k |x - s|)` against functions known at
//! Gauss–Legendre nodes. The kernel has a kink at `s = x`, so plain Nyström
//! weights converge only at second order; instead each matrix entry is the
//! exact integral of the kernel against the Lagrange cardinal polynomial of a
//! node, with the integral split at the kink ("product integration"). The
//! result converges at the rate of polynomial interpolation of the smooth
//! field — near machine precision at the node counts used here.

use crate::characteristic::{c_term, k_term};
use crate::model::ModelParams;
use crate::numerics::field::ComplexField;
use crate::numerics::quadrature::{gauss_legendre, QuadGrid};
use nalgebra::DMatrix;
use num_complex::Complex64;

/// Barycentric weights of a strictly increasing node set.
pub fn bary_weights(nodes: &[f64]) -> Vec<f64> {
    let n = nodes.len();
    let mut w = vec![1.0; n];
    for j in 0..n {
        let mut prod = 1.0;
        for m in 0..n {
            if m != j {
                prod *= nodes[j] - nodes[m];
            }
        }
        w[j] = 1.0 / prod;
    }
    w
}

/// Values of all Lagrange cardinal polynomials at `t` (barycentric form).
fn cardinal_row(nodes: &[f64], bw: &[f64], t: f64, out: &mut [f64]) {
    // Exact node hit: the cardinal functions reduce to an indicator.
    for (m, &x) in nodes.iter().enumerate() {
        if (t - x).abs() < 1e-14 {
            out.fill(0.0);
            out[m] = 1.0;
            return;
        }
    }
    let mut sum = 0.0;
    for (m, &x) in nodes.iter().enumerate() {
        let c = bw[m] / (t - x);
        out[m] = c;
        sum += c;
    }
    for v in out.iter_mut() {
        *v /= sum;
    }
}

/// Matrix `E` with `E[t][m] = integral over [lo, hi] of exp(-k |x_t - s|) *
/// L_m(s) ds`, where `L_m` is the cardinal polynomial of `nodes[m]`.
///
/// `E * q` then evaluates the kernel integral of the interpolant of `q` at
/// each target point; targets need not coincide with the nodes.
pub fn kernel_matrix_at(
    targets: &[f64],
    nodes: &[f64],
    k: Complex64,
    lo: f64,
    hi: f64,
) -> DMatrix<Complex64> {
    let n = nodes.len();
    let nt = targets.len();
    let npanel = n.max(24) + 8;
    let bw = bary_weights(nodes);
    let (gx, gw) = gauss_legendre(npanel, -1.0, 1.0);
    let mut e = DMatrix::<Complex64>::zeros(nt, n);
    let mut card = vec![0.0; n];
    for (ti, &xt) in targets.iter().enumerate() {
        for (plo, phi) in [(lo, xt), (xt, hi)] {
            if phi - plo < 1e-14 {
                continue;
            }
            let mid = 0.5 * (plo + phi);
            let half = 0.5 * (phi - plo);
            for p in 0..npanel {
                let s = mid + half * gx[p];
                let ws = half * gw[p];
                let kv = (-k * (xt - s).abs()).exp() * ws;
                cardinal_row(nodes, &bw, s, &mut card);
                for m in 0..n {
                    e[(ti, m)] += kv * card[m];
                }
            }
        }
    }
    e
}

/// Square application matrix on the nodes themselves.
pub fn kernel_matrix(nodes: &[f64], k: Complex64, lo: f64, hi: f64) -> DMatrix<Complex64> {
    kernel_matrix_at(nodes, nodes, k, lo, hi)
}

/// The linearized field operator `Delta(z)` discretized on a grid:
/// `Delta(z) q = (z + alpha) q - sum_i c_i(z) * (T_x^i q T_y^i')`,
/// with per-term axis matrices built once at construction.
pub struct DeltaOperator {
    pub z: Complex64,
    alpha: f64,
    cs: Vec<Complex64>,
    tx: Vec<DMatrix<Complex64>>,
    ty: Vec<DMatrix<Complex64>>,
}

impl DeltaOperator {
    pub fn new(params: &ModelParams, grid: &QuadGrid, z: Complex64) -> Self {
        let n = params.n_terms();
        let mut cs = Vec::with_capacity(n);
        let mut tx = Vec::with_capacity(n);
        let mut ty = Vec::with_capacity(n);
        for i in 0..n {
            let k = k_term(params, i, z);
            cs.push(c_term(params, i, z));
            tx.push(kernel_matrix(&grid.nodes_x, k, -params.a, params.a));
            ty.push(kernel_matrix(&grid.nodes_y, k, -params.b, params.b));
        }
        DeltaOperator {
            z,
            alpha: params.alpha,
            cs,
            tx,
            ty,
        }
    }

    pub fn apply(&self, q: &ComplexField) -> ComplexField {
        let mut out = q.scaled(self.z + self.alpha);
        for i in 0..self.cs.len() {
            let t = &self.tx[i] * &q.values * self.ty[i].transpose();
            out.values.zip_apply(&t, |o, v| *o -= self.cs[i] * v);
        }
        out
    }
}

/// One-shot application of `Delta(z)`; build a [`DeltaOperator`] instead when
/// applying repeatedly at the same `z`.
pub fn apply_delta(
    params: &ModelParams,
    grid: &QuadGrid,
    z: Complex64,
    q: &ComplexField,
) -> ComplexField {
    DeltaOperator::new(params, grid, z).apply(q)
}

/// Cubic response term of the critical normal form: applies the third-order
/// coefficient operator of the nonlinearity to the squared eigenfunction mix
/// `q^2 conj(q)` at the critical eigenvalue `z`.
///
/// The delayed cubic interaction shifts every exponential rate by
/// `w = 2z + conj(z)`: the result is `S'''(0) * sum_i c_hat_i exp(-w tau0) *
/// T^{xi_i + w}(q^2 conj q)` with the same separable kernel structure.
pub fn cubic_response(
    params: &ModelParams,
    grid: &QuadGrid,
    z: Complex64,
    q: &ComplexField,
) -> ComplexField {
    let w = 2.0 * z + z.conj();
    let u = q.hadamard(q).hadamard(&q.conj());
    let mut out = ComplexField::zeros(grid);
    for term in &params.terms {
        let kt = term.xi + w;
        let tx = kernel_matrix(&grid.nodes_x, kt, -params.a, params.a);
        let ty = kernel_matrix(&grid.nodes_y, kt, -params.b, params.b);
        let applied = &tx * &u.values * ty.transpose();
        let pref = term.c_hat * (-w * params.tau0).exp();
        out.values.zip_apply(&applied, |o, v| *o += pref * v);
    }
    out.scaled(Complex64::new(params.firing_rate_d3_at_zero(), 0.0))
}
