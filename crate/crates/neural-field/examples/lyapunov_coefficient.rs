//! First Lyapunov coefficient at the Hopf point, with robustness checks.
//!
//! At the crossing, the normal-form coefficient `g21` comes from a contour
//! integral of resolvent applications to the cubic response of the
//! nonlinearity around the critical eigenvalue; `l1 = Re(g21) / omega`
//! decides the bifurcation character (negative = supercritical, a stable
//! orbit is born). The g21 field is constant over the domain interior up to
//! truncation noise, and the expected reference value is `l1 = -1.572`.
//!
//! Run with: `cargo run --release --example lyapunov_coefficient`

use neural_field::hopf::HopfSettings;
use neural_field::{g21_compute, hopf_find, LyapunovSettings, Parity, QuadGrid};
use num_complex::Complex64;

fn main() {
    let params = neural_field::model::reference_params(-3.27);
    let seed = (
        Complex64::new(0.0, 1.3),
        Complex64::new(-0.2, 1.1),
        Complex64::new(-0.2, 1.1),
    );
    let hopf = hopf_find(
        &params,
        -4.0,
        -2.5,
        seed,
        Parity::Even,
        Parity::Even,
        &HopfSettings::default(),
    )
    .expect("the branch crosses inside the range");
    let mut critical = params.clone();
    critical.terms[0].c_hat = Complex64::new(hopf.c_hat, 0.0);
    let grid = QuadGrid::on_rectangle(critical.a, critical.b, 48, 48);

    let base = LyapunovSettings::default(); // epsilon 0.01, 32 contour points, 3x3 modes
    let result = g21_compute(&critical, &grid, &hopf.pair, &base).unwrap();
    println!("at the crossing c_hat* = {:.8}:", hopf.c_hat);
    println!("  g21  = {:.8}", result.g21);
    println!("  l1   = {:.6}   (reference -1.572)", result.l1);
    println!(
        "  {} — the emerging orbit is {}",
        if result.l1 < 0.0 { "l1 < 0" } else { "l1 > 0" },
        if result.l1 < 0.0 { "stable (supercritical)" } else { "unstable (subcritical)" }
    );
    println!(
        "  constancy: rel. std {:.2e} over {} interior samples",
        result.constancy_rel_std, result.n_samples
    );

    // The answer must not depend on the contour details.
    let tight = LyapunovSettings { epsilon: 0.005, ..base };
    let dense = LyapunovSettings { n_z: 64, ..base };
    let r_tight = g21_compute(&critical, &grid, &hopf.pair, &tight).unwrap();
    let r_dense = g21_compute(&critical, &grid, &hopf.pair, &dense).unwrap();
    println!("\nrobustness of g21:");
    println!(
        "  radius 0.01 -> 0.005 : rel. change {:.2e}",
        (r_tight.g21 - result.g21).norm() / result.g21.norm()
    );
    println!(
        "  32 -> 64 contour pts : rel. change {:.2e}",
        (r_dense.g21 - result.g21).norm() / result.g21.norm()
    );
}
