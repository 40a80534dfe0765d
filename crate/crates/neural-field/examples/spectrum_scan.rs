//! Point-spectrum scan of the linearized field equation.
//!
//! Seeds a lattice over a complex window, pairs each seed with the first few
//! axis roots per axis, Newton-refines every combination onto the coupled
//! system (characteristic polynomial + two boundary conditions), dedupes, and
//! certifies each eigenpair end to end by applying the quadrature-discretized
//! operator to the assembled eigenfunction.
//!
//! At the reference strength `c_hat = -3.27` (just past the Hopf point) the
//! window holds exactly one conjugate pair on the imaginary axis; everything
//! else sits strictly to its left.
//!
//! Run with: `cargo run --release --example spectrum_scan`

use neural_field::spectrum::{spectrum_scan, ScanSettings, Window};
use neural_field::{ModelParams, QuadGrid};

fn main() {
    let params: ModelParams = neural_field::model::reference_params(-3.27);
    let grid = QuadGrid::on_rectangle(params.a, params.b, 32, 32);
    let window = Window {
        re_min: -2.0,
        re_max: 0.5,
        im_min: -4.0,
        im_max: 4.0,
    };
    let report = spectrum_scan(&params, &grid, window, &ScanSettings::default());

    println!(
        "window [{}, {}] x [{}, {}]i at c_hat = -3.27:",
        window.re_min, window.re_max, window.im_min, window.im_max
    );
    println!(
        "  {} seeds, {} refinements, {} converged, {} deduped",
        report.stats.seeds,
        report.stats.newton_attempts,
        report.stats.converged,
        report.stats.deduped
    );
    println!("  essential spectrum point: z = {}", report.essential_point);
    for sp in &report.special_points {
        println!(
            "  resonance point z = {} (eigenvalue: {})",
            sp.z, sp.is_eigenvalue
        );
    }
    println!("\n  {} distinct eigenvalues:", report.eigenpairs.len());
    println!(
        "  {:>24} {:>7} {:>10} {:>12}",
        "z", "parity", "newton", "||Dq||/||q||"
    );
    for pair in &report.eigenpairs {
        println!(
            "  {:>24} {:>3}/{:<3} {:>10.2e} {:>12.2e}",
            format!("{:.8}", pair.z),
            pair.parity_x.label(),
            pair.parity_y.label(),
            pair.residual,
            pair.residual_delta.unwrap_or(f64::NAN)
        );
    }

    let on_axis: Vec<_> = report
        .eigenpairs
        .iter()
        .filter(|p| p.z.re.abs() <= 1e-3)
        .collect();
    let max_left = report
        .eigenpairs
        .iter()
        .filter(|p| p.z.re < -1e-3)
        .map(|p| p.z.re)
        .fold(f64::NEG_INFINITY, f64::max);
    println!(
        "\n  on-axis conjugate pair: {} members; next eigenvalue at Re z = {max_left:.4}",
        on_axis.len()
    );
}
