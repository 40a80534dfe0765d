//! Spectral analysis and simulation of a delayed neural field equation on a
//! rectangle.
//!
//! The model is an integro-differential equation for the membrane potential
//! `V(t, r)` on `[-a, a] x [-b, b]`:
//!
//! ```text
//! dV/dt = -alpha V(t, r) + integral J(r, r') S(V(t - tau(r, r'), r')) dr'
//! ```
//!
//! with a sum-of-exponentials connectivity `J` in the 1-norm distance, a
//! distance-proportional transmission delay `tau`, and a sigmoidal firing
//! rate `S`. The crate computes, for the linearization at rest:
//!
//! - the **point spectrum** and eigenfunctions through a boundary-value
//!   reformulation: a characteristic polynomial links the spatial decay rates
//!   of candidate modes ([`characteristic`]), a complex Sturm-Liouville
//!   problem supplies the admissible axis rates ([`sturm_liouville`]), and a
//!   Newton refinement couples them ([`spectrum`]);
//! - the **resolvent**, as a truncated series over product modes, certified
//!   by quadrature round trips ([`spectrum::resolve`]);
//! - **Hopf bifurcations** in the connectivity strength and the first
//!   Lyapunov coefficient deciding super/subcriticality, via a contour
//!   integral of resolvent applications ([`hopf`]);
//! - for two-term kernels on a square, the rank-one boundary-matrix search
//!   for genuinely non-separable eigenfunctions ([`characteristic::square`]);
//! - a direct **time-domain simulation** (RK4 with delay-history
//!   interpolation) for cross-validating every spectral prediction ([`sim`]).
//!
//! Numerical cross-checks are first-class: every solver returns residuals or
//! certificates alongside its answer, and the independently computed
//! quadrature operator [`characteristic::nystrom::DeltaOperator`] closes the
//! loop between the analytic machinery and the discretized equation.
//!
//! The `examples/` directory exercises each capability end to end; the
//! `neural-field` binary exposes the same operations as subcommands driven by
//! a JSON [`config::RunConfig`].
//!
//! Parallelism (seed scans, contour sums, simulation right-hand sides) runs
//! on rayon; set `RAYON_NUM_THREADS` to bound it. All reductions are ordered,
//! so results are bit-reproducible regardless of thread count.

pub mod characteristic;
pub mod config;
pub mod hopf;
pub mod model;
pub mod numerics;
pub mod sim;
pub mod spectrum;
pub mod sturm_liouville;

pub use characteristic::{square::square_n2_search, Parity};
pub use config::RunConfig;
pub use hopf::{g21_compute, hopf_find, HopfResult, LyapunovResult, LyapunovSettings};
pub use model::{KernelTerm, ModelParams, Point2};
pub use numerics::quadrature::QuadGrid;
pub use sim::{dominant_period, simulate, SimConfig, Trajectory};
pub use spectrum::{classify, eigen_solve, resolve, spectrum_scan, Classification, EigenPair};
pub use sturm_liouville::slp_roots;
