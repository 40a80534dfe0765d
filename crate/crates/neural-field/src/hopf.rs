//! Hopf bifurcation location and the first Lyapunov coefficient.
//!
//! Sweeping the kernel strength moves the leading eigenvalue pair across the
//! imaginary axis; the crossing is located by continuation plus bisection on
//! `Re z`. At the crossing, the sign of the first Lyapunov coefficient decides
//! whether the born periodic orbit is stable. The coefficient reduces to the
//! normal-form quantity `g21`, computed as a contour integral of the resolvent
//! applied to the cubic response of the critical eigenfunction:
//! `g21 = mean over the domain of (1/n) sum_j eps e^{2 pi i j/n} *
//! [Delta(z + eps e^{2 pi i j/n})^{-1} h] / q`, with `h` the cubic response.
//! The integrand is constant over the domain up to truncation error, which the
//! reported spread certifies.

use crate::characteristic::nystrom::cubic_response;
use crate::characteristic::Parity;
use crate::model::ModelParams;
use crate::numerics::field::ComplexField;
use crate::numerics::quadrature::QuadGrid;
use crate::spectrum::{classify, eigen_solve, resolve, Classification, EigenPair, ResolveError};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

/// Continuation/bisection controls for [`hopf_find`].
#[derive(Debug, Clone, Copy, Serialize, serde::Deserialize)]
pub struct HopfSettings {
    /// Continuation steps across the strength range.
    pub steps: usize,
    /// Bisection stops when `|Re z|` drops below this.
    pub crossing_tol: f64,
    pub max_bisect: usize,
}

impl Default for HopfSettings {
    fn default() -> Self {
        HopfSettings {
            steps: 20,
            crossing_tol: 1e-12,
            max_bisect: 90,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum HopfError {
    #[error("no crossing of the imaginary axis in the strength range: Re z goes {re_lo:.6} -> {re_hi:.6}")]
    NoCrossing { re_lo: f64, re_hi: f64 },
    #[error("lost the eigenvalue branch near strength {c_hat}: {source}")]
    LostTracking {
        c_hat: f64,
        source: crate::spectrum::EigenError,
    },
}

/// A located Hopf point.
#[derive(Debug, Clone, Serialize)]
pub struct HopfResult {
    /// Critical kernel strength.
    pub c_hat: f64,
    /// Crossing frequency `Im z`.
    pub omega: f64,
    /// Critical eigenpair (with `Re z` at the bisection tolerance).
    pub pair: EigenPair,
    /// `Re z` of the tracked branch at the range endpoints.
    pub endpoints: (f64, f64),
}

fn with_strength(params: &ModelParams, c_hat: f64) -> ModelParams {
    let mut p = params.clone();
    p.terms[0].c_hat = Complex64::new(c_hat, 0.0);
    p
}

/// Tracks one eigenvalue branch over `c_hat in [lo, hi]` and bisects the
/// first sign change of `Re z` down to the crossing.
pub fn hopf_find(
    params: &ModelParams,
    lo: f64,
    hi: f64,
    seed: (Complex64, Complex64, Complex64),
    parity_x: Parity,
    parity_y: Parity,
    settings: &HopfSettings,
) -> Result<HopfResult, HopfError> {
    let mut branch: Vec<(f64, EigenPair)> = Vec::with_capacity(settings.steps + 1);
    let mut current = seed;
    for step in 0..=settings.steps {
        let ch = lo + (hi - lo) * step as f64 / settings.steps as f64;
        let p = with_strength(params, ch);
        let pair = eigen_solve(&p, parity_x, parity_y, current)
            .map_err(|source| HopfError::LostTracking { c_hat: ch, source })?;
        current = (pair.z, pair.rho, pair.nu);
        branch.push((ch, pair));
    }
    let endpoints = (branch[0].1.z.re, branch[branch.len() - 1].1.z.re);
    let Some(idx) = branch
        .windows(2)
        .position(|w| w[0].1.z.re.signum() != w[1].1.z.re.signum())
    else {
        return Err(HopfError::NoCrossing {
            re_lo: endpoints.0,
            re_hi: endpoints.1,
        });
    };
    let (mut c_lo, mut p_lo) = (branch[idx].0, branch[idx].1.clone());
    let (mut c_hi, mut p_hi) = (branch[idx + 1].0, branch[idx + 1].1.clone());
    let mut mid = p_lo.clone();
    for _ in 0..settings.max_bisect {
        let cm = 0.5 * (c_lo + c_hi);
        let p = with_strength(params, cm);
        let seed = (
            0.5 * (p_lo.z + p_hi.z),
            0.5 * (p_lo.rho + p_hi.rho),
            0.5 * (p_lo.nu + p_hi.nu),
        );
        mid = eigen_solve(&p, parity_x, parity_y, seed)
            .map_err(|source| HopfError::LostTracking { c_hat: cm, source })?;
        if mid.z.re.abs() <= settings.crossing_tol {
            return Ok(HopfResult {
                c_hat: cm,
                omega: mid.z.im,
                pair: mid,
                endpoints,
            });
        }
        if mid.z.re.signum() == p_lo.z.re.signum() {
            c_lo = cm;
            p_lo = mid.clone();
        } else {
            c_hi = cm;
            p_hi = mid.clone();
        }
    }
    Ok(HopfResult {
        c_hat: 0.5 * (c_lo + c_hi),
        omega: mid.z.im,
        pair: mid,
        endpoints,
    })
}

/// Contour and truncation controls for [`g21_compute`].
#[derive(Debug, Clone, Copy, Serialize, serde::Deserialize)]
pub struct LyapunovSettings {
    /// Contour radius around the critical eigenvalue.
    pub epsilon: f64,
    /// Contour sample count.
    pub n_z: usize,
    /// Resolvent truncation per axis.
    pub n_x: usize,
    pub n_y: usize,
}

impl Default for LyapunovSettings {
    fn default() -> Self {
        LyapunovSettings {
            epsilon: 0.01,
            n_z: 32,
            n_x: 3,
            n_y: 3,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum LyapunovError {
    #[error("contour point {w} is not in the resolvent set ({detail})")]
    ContourHitsEigenvalue { w: Complex64, detail: String },
    #[error("eigenfunction magnitude collapses on the interior sample set")]
    DegenerateEigenfunction,
    #[error(transparent)]
    Resolve(#[from] ResolveError),
}

/// First-Lyapunov-coefficient result.
#[derive(Debug, Clone, Serialize)]
pub struct LyapunovResult {
    pub g21: Complex64,
    /// `l1 = Re(g21) / omega`; negative means supercritical (stable orbit).
    pub l1: f64,
    pub omega: f64,
    /// Relative standard deviation of the g21 field over the interior
    /// samples; small values certify the contour/truncation choices.
    pub constancy_rel_std: f64,
    /// Interior samples used for the mean.
    pub n_samples: usize,
    pub settings: LyapunovSettings,
}

/// Computes `g21` and the first Lyapunov coefficient at a critical eigenpair.
///
/// Verifies contour isolation first (eight probe points must classify as
/// resolvent), then accumulates the contour sum of resolvent applications to
/// the cubic response, divides pointwise by the eigenfunction, and averages
/// over interior samples away from eigenfunction near-zeros.
pub fn g21_compute(
    params: &ModelParams,
    grid: &QuadGrid,
    pair: &EigenPair,
    settings: &LyapunovSettings,
) -> Result<LyapunovResult, LyapunovError> {
    let z = pair.z;
    // Contour isolation: probe a coarse sample of the circle.
    for j in 0..8 {
        let th = 2.0 * std::f64::consts::PI * j as f64 / 8.0;
        let w = z + settings.epsilon * Complex64::from_polar(1.0, th);
        match classify(params, w, settings.n_x, settings.n_y) {
            Classification::Resolvent { .. } => {}
            other => {
                return Err(LyapunovError::ContourHitsEigenvalue {
                    w,
                    detail: format!("{other:?}"),
                })
            }
        }
    }
    let q = pair.eigenfunction(grid);
    let h = cubic_response(params, grid, z, &q);
    // (1/2 pi i) contour integral of R(w) h dw around z, with dw absorbing the
    // 2 pi i: equally weighted samples times eps * phase.
    let terms: Vec<Result<ComplexField, LyapunovError>> = (0..settings.n_z)
        .into_par_iter()
        .map(|j| {
            let th = 2.0 * std::f64::consts::PI * j as f64 / settings.n_z as f64;
            let phase = Complex64::from_polar(1.0, th);
            let w = z + settings.epsilon * phase;
            let r = resolve(params, grid, w, &h, settings.n_x, settings.n_y, None)?;
            Ok(r.scaled(settings.epsilon * phase))
        })
        .collect();
    let mut acc = ComplexField::zeros(grid);
    for t in terms {
        acc.axpy(Complex64::new(1.0 / settings.n_z as f64, 0.0), &t?);
    }
    // Divide by q on interior samples clear of eigenfunction zeros.
    let qmax = q.max_abs();
    let mut samples = Vec::new();
    for (i, &x) in grid.nodes_x.iter().enumerate() {
        for (j, &y) in grid.nodes_y.iter().enumerate() {
            if x.abs() <= 0.8 * params.a
                && y.abs() <= 0.8 * params.b
                && q.values[(i, j)].norm() >= 0.1 * qmax
            {
                samples.push(acc.values[(i, j)] / q.values[(i, j)]);
            }
        }
    }
    if samples.is_empty() {
        return Err(LyapunovError::DegenerateEigenfunction);
    }
    let n = samples.len() as f64;
    let mean: Complex64 = samples.iter().sum::<Complex64>() / n;
    let var = samples.iter().map(|s| (s - mean).norm_sqr()).sum::<f64>() / n;
    let rel_std = var.sqrt() / mean.norm().max(f64::MIN_POSITIVE);
    Ok(LyapunovResult {
        g21: mean,
        l1: mean.re / pair.z.im,
        omega: pair.z.im,
        constancy_rel_std: rel_std,
        n_samples: samples.len(),
        settings: *settings,
    })
}
