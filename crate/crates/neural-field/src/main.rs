//! Command-line front end: each subcommand wraps one library capability and
//! serializes its result as JSON (structured data), CSV (time/series data),
//! or plain matrix text (fields).
//!
//! Exit codes: 0 on success, 1 on numerical failure (a solver or an
//! end-to-end check failed), 2 on configuration/usage errors.

use clap::{Args, Parser, Subcommand};
use neural_field::characteristic::square::square_n2_scan;
use neural_field::characteristic::Parity;
use neural_field::config::{ConfigError, RunConfig};
use neural_field::hopf::{g21_compute, hopf_find, HopfResult};
use neural_field::model::ModelParams;
use neural_field::numerics::field::ComplexField;
use neural_field::numerics::quadrature::QuadGrid;
use neural_field::sim::{dominant_period, simulate, Trajectory};
use neural_field::spectrum::{classify, resolve, spectrum_scan};
use neural_field::sturm_liouville::{basis_build, slp_roots};
use num_complex::Complex64;
use serde::Serialize;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "neural-field",
    version,
    about = "Spectral analysis and simulation of a delayed neural field equation on a rectangle",
    after_help = "Configuration comes from --config (JSON); every omitted field falls back to \
the built-in reference setup. Set RAYON_NUM_THREADS to bound the worker pool."
)]
struct Cli {
    /// JSON run configuration; defaults are used when omitted.
    #[arg(short, long, global = true)]
    config: Option<PathBuf>,
    /// Directory for output files (overrides the config's `output_dir`).
    #[arg(short, long, global = true)]
    output_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ZArg {
    /// Real part of the spectral parameter z.
    #[arg(long = "z-re", allow_hyphen_values = true)]
    z_re: f64,
    /// Imaginary part of the spectral parameter z.
    #[arg(long = "z-im", default_value_t = 0.0, allow_hyphen_values = true)]
    z_im: f64,
}

impl ZArg {
    fn value(&self) -> Complex64 {
        Complex64::new(self.z_re, self.z_im)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Roots of the axis characteristic function for a complex Robin rate k
    /// (k = 0 is the Neumann case).
    SlpRoots {
        #[arg(long = "k-re", default_value_t = 0.0, allow_hyphen_values = true)]
        k_re: f64,
        #[arg(long = "k-im", default_value_t = 0.0, allow_hyphen_values = true)]
        k_im: f64,
        /// Axis half-width (default: the model's a).
        #[arg(long)]
        halfwidth: Option<f64>,
        /// Number of roots, ordered by index.
        #[arg(long, default_value_t = 10)]
        count: usize,
        /// Also write <output_dir>/slp_roots.csv.
        #[arg(long)]
        csv: bool,
    },
    /// Scan the configured window for point spectrum; emits eigenpair records.
    Spectrum,
    /// Locate one z relative to the spectrum: essential, resonant, eigenvalue,
    /// or resolvent (with a distance certificate).
    Classify {
        #[command(flatten)]
        z: ZArg,
    },
    /// Round-trip residual of the truncated resolvent at z: in-span recovery
    /// plus a truncation sweep on a smooth off-center bump.
    ResolventCheck {
        #[command(flatten)]
        z: ZArg,
    },
    /// Track the leading eigenvalue branch over the configured strength range
    /// and bisect the imaginary-axis crossing.
    Hopf,
    /// First Lyapunov coefficient at the Hopf point (runs the Hopf search
    /// first unless --c-hat pins the critical strength).
    Lyapunov {
        /// Evaluate at this kernel strength instead of searching for it.
        #[arg(long = "c-hat", allow_hyphen_values = true)]
        c_hat: Option<f64>,
    },
    /// Integrate the field equation; probe series go to CSV, snapshots to
    /// plain matrix text.
    Simulate {
        /// Override the first kernel term's strength.
        #[arg(long = "c-hat", allow_hyphen_values = true)]
        c_hat: Option<f64>,
        #[arg(long)]
        t_end: Option<f64>,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        n_grid: Option<usize>,
        #[arg(long)]
        snapshot_stride: Option<usize>,
    },
    /// Two-term square-domain eigenvector search from a (z, nu) seed list.
    Square {
        /// Seed as "z-re,z-im,nu-re,nu-im"; repeatable.
        #[arg(long = "seed", allow_hyphen_values = true, required = true)]
        seeds: Vec<String>,
    },
    /// Full reference pipeline: Hopf search, Lyapunov coefficient, and the
    /// decay/oscillation simulations, checked against the expected values.
    ReproducePaper,
}

/// Failures mapped to exit codes: config/usage -> 2, numerical -> 1.
enum CliError {
    Config(String),
    Numerical(String),
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Numerical(format!("i/o failure: {e}"))
    }
}

fn numerical(e: impl std::fmt::Display) -> CliError {
    CliError::Numerical(e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match &cli.config {
        Some(path) => RunConfig::load(path),
        None => Ok(RunConfig::default()),
    };
    let mut config = match config {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Some(dir) = &cli.output_dir {
        config.output_dir = dir.display().to_string();
    }
    match run(cli.command, &config) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Numerical(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

/// Writes one line to stdout, exiting quietly when the reader hung up
/// (`... | head` must not look like a crash).
fn out(line: &str) {
    use std::io::Write;
    let mut stdout = std::io::stdout();
    if writeln!(stdout, "{line}").is_err() {
        std::process::exit(0);
    }
}

fn print_json<T: Serialize>(value: &T) {
    out(&serde_json::to_string_pretty(value).expect("output serialization cannot fail"));
}

/// Parses a "z-re,z-im,nu-re,nu-im" quadruple into a (z, nu) seed pair.
fn parse_seed(text: &str) -> Result<(Complex64, Complex64), CliError> {
    let parts: Vec<f64> = text
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Config(format!("invalid --seed '{text}': {e}")))?;
    if parts.len() != 4 {
        return Err(CliError::Config(format!(
            "--seed expects four comma-separated numbers (z-re,z-im,nu-re,nu-im), got {} in '{text}'",
            parts.len()
        )));
    }
    Ok((
        Complex64::new(parts[0], parts[1]),
        Complex64::new(parts[2], parts[3]),
    ))
}

fn out_path(config: &RunConfig, name: &str) -> Result<PathBuf, CliError> {
    let dir = Path::new(&config.output_dir);
    std::fs::create_dir_all(dir)?;
    Ok(dir.join(name))
}

fn write_probe_csv(path: &Path, trajectory: &Trajectory, probe: usize) -> Result<(), CliError> {
    let mut text = String::from("t,V\n");
    for (t, v) in trajectory.probe(probe) {
        writeln!(text, "{t:.6},{v:.12e}").expect("string write");
    }
    std::fs::write(path, text)?;
    Ok(())
}

/// Plain matrix text with a gnuplot-ready header (`splot "..." matrix
/// nonuniform`): first row holds the y nodes, first column the x nodes.
fn write_field_text(path: &Path, nodes_x: &[f64], nodes_y: &[f64], field: &[f64], t: f64) -> Result<(), CliError> {
    let mut text = format!("# field at t = {t:.6}; rows = x nodes, columns = y nodes\n");
    write!(text, "{}", nodes_y.len()).expect("string write");
    for y in nodes_y {
        write!(text, " {y:.12e}").expect("string write");
    }
    text.push('\n');
    for (i, x) in nodes_x.iter().enumerate() {
        write!(text, "{x:.12e}").expect("string write");
        for j in 0..nodes_y.len() {
            write!(text, " {:.12e}", field[i * nodes_y.len() + j]).expect("string write");
        }
        text.push('\n');
    }
    std::fs::write(path, text)?;
    Ok(())
}

fn with_strength(model: &ModelParams, c_hat: Option<f64>) -> ModelParams {
    let mut m = model.clone();
    if let Some(ch) = c_hat {
        m.terms[0].c_hat = Complex64::new(ch, 0.0);
    }
    m
}

fn run_hopf(config: &RunConfig) -> Result<HopfResult, CliError> {
    let h = &config.hopf;
    hopf_find(
        &config.model,
        h.c_hat_lo,
        h.c_hat_hi,
        (h.seed_z, h.seed_rho, h.seed_nu),
        h.parity_x,
        h.parity_y,
        &h.settings,
    )
    .map_err(numerical)
}

/// Off-center smooth bump used by the truncation sweep; off-center so that it
/// loads every parity sector.
fn bump(grid: &QuadGrid, a: f64, b: f64) -> ComplexField {
    ComplexField::from_fn(grid, |x, y| {
        let d = (x - 0.3 * a).powi(2) + (y + 0.2 * b).powi(2);
        Complex64::new((-d / 0.18).exp(), 0.0)
    })
}

fn run(command: Command, config: &RunConfig) -> Result<(), CliError> {
    match command {
        Command::SlpRoots {
            k_re,
            k_im,
            halfwidth,
            count,
            csv,
        } => {
            let k = Complex64::new(k_re, k_im);
            let h = halfwidth.unwrap_or(config.model.a);
            let scan = slp_roots(k, h, count);
            #[derive(Serialize)]
            struct Out<'a> {
                k: Complex64,
                halfwidth: f64,
                roots: &'a [neural_field::sturm_liouville::SlpRoot],
                seeds_tried: usize,
                seeds_converged: usize,
                duplicates_collapsed: usize,
            }
            print_json(&Out {
                k,
                halfwidth: h,
                roots: &scan.roots,
                seeds_tried: scan.seeds_tried,
                seeds_converged: scan.seeds_converged,
                duplicates_collapsed: scan.duplicates_collapsed,
            });
            if csv {
                let mut text = String::from("index,parity,mu_re,mu_im,rho_re,rho_im,residual\n");
                for r in &scan.roots {
                    writeln!(
                        text,
                        "{},{},{:.12e},{:.12e},{:.12e},{:.12e},{:.3e}",
                        r.index,
                        r.parity.label(),
                        r.mu.re,
                        r.mu.im,
                        r.rho.re,
                        r.rho.im,
                        r.residual
                    )
                    .expect("string write");
                }
                std::fs::write(out_path(config, "slp_roots.csv")?, text)?;
            }
            Ok(())
        }
        Command::Spectrum => {
            let grid = QuadGrid::on_rectangle(
                config.model.a,
                config.model.b,
                config.quadrature.n_apply,
                config.quadrature.n_apply,
            );
            let report = spectrum_scan(
                &config.model,
                &grid,
                config.spectrum.window,
                &config.spectrum.settings,
            );
            print_json(&report);
            Ok(())
        }
        Command::Classify { z } => {
            let outcome = classify(
                &config.model,
                z.value(),
                config.lyapunov.n_x.max(3),
                config.lyapunov.n_y.max(3),
            );
            #[derive(Serialize)]
            struct Out {
                z: Complex64,
                classification: neural_field::spectrum::Classification,
            }
            print_json(&Out {
                z: z.value(),
                classification: outcome,
            });
            Ok(())
        }
        Command::ResolventCheck { z } => {
            let z = z.value();
            let m = &config.model;
            let n = config.quadrature.n_check;
            let grid = QuadGrid::on_rectangle(m.a, m.b, n, n);
            // In-span round trip: a fixed combination of raw basis products
            // must be reproduced to quadrature accuracy.
            let basis = basis_build(m, &grid, z, 4, 4).map_err(numerical)?;
            let weights = [
                Complex64::new(1.0, 0.0),
                Complex64::new(-0.5, 0.25),
                Complex64::new(0.0, 1.5),
                Complex64::new(0.3, -0.7),
            ];
            let mut g = ComplexField::zeros(&grid);
            for (w, e) in weights.iter().zip(basis.entries.iter().step_by(3)) {
                g.axpy(*w, &e.raw);
            }
            let q = resolve(m, &grid, z, &g, 4, 4, Some(&basis)).map_err(numerical)?;
            let back = neural_field::characteristic::nystrom::apply_delta(m, &grid, z, &q);
            let in_span_error = grid.norm(&back.sub(&g)) / grid.norm(&g);
            // Truncation sweep on a smooth bump: the error must fall
            // monotonically as the per-axis mode count grows.
            let gb = bump(&grid, m.a, m.b);
            let mut bump_errors = Vec::new();
            for nm in 3..=8 {
                let q = resolve(m, &grid, z, &gb, nm, nm, None).map_err(numerical)?;
                let back = neural_field::characteristic::nystrom::apply_delta(m, &grid, z, &q);
                bump_errors.push(grid.norm(&back.sub(&gb)) / grid.norm(&gb));
            }
            #[derive(Serialize)]
            struct Out {
                z: Complex64,
                quadrature_nodes: usize,
                in_span_error: f64,
                bump_modes: Vec<usize>,
                bump_errors: Vec<f64>,
            }
            print_json(&Out {
                z,
                quadrature_nodes: n,
                in_span_error,
                bump_modes: (3..=8).collect(),
                bump_errors: bump_errors.clone(),
            });
            if in_span_error > 1e-6 {
                return Err(CliError::Numerical(format!(
                    "in-span round-trip error {in_span_error:.3e} exceeds 1e-6"
                )));
            }
            if bump_errors.windows(2).any(|w| w[1] >= w[0]) {
                return Err(CliError::Numerical(
                    "bump truncation errors are not monotonically decreasing".into(),
                ));
            }
            Ok(())
        }
        Command::Hopf => {
            let result = run_hopf(config)?;
            print_json(&result);
            Ok(())
        }
        Command::Lyapunov { c_hat } => {
            let (critical, pair) = match c_hat {
                Some(ch) => {
                    let m = with_strength(&config.model, Some(ch));
                    let h = &config.hopf;
                    let pair = neural_field::spectrum::eigen_solve(
                        &m,
                        h.parity_x,
                        h.parity_y,
                        (h.seed_z, h.seed_rho, h.seed_nu),
                    )
                    .map_err(numerical)?;
                    (ch, pair)
                }
                None => {
                    let found = run_hopf(config)?;
                    (found.c_hat, found.pair)
                }
            };
            let m = with_strength(&config.model, Some(critical));
            let n = config.quadrature.n_check;
            let grid = QuadGrid::on_rectangle(m.a, m.b, n, n);
            let result = g21_compute(&m, &grid, &pair, &config.lyapunov).map_err(numerical)?;
            #[derive(Serialize)]
            struct Out {
                c_hat: f64,
                z: Complex64,
                result: neural_field::hopf::LyapunovResult,
            }
            print_json(&Out {
                c_hat: critical,
                z: pair.z,
                result,
            });
            Ok(())
        }
        Command::Simulate {
            c_hat,
            t_end,
            dt,
            n_grid,
            snapshot_stride,
        } => {
            let m = with_strength(&config.model, c_hat);
            let mut sim_config = config.simulate.clone();
            if let Some(v) = t_end {
                sim_config.t_end = v;
            }
            if let Some(v) = dt {
                sim_config.dt = v;
            }
            if let Some(v) = n_grid {
                sim_config.n_grid = v;
            }
            if let Some(v) = snapshot_stride {
                sim_config.snapshot_stride = v;
            }
            let trajectory = simulate(&m, &sim_config).map_err(numerical)?;
            for probe in 0..trajectory.probe_series.len() {
                let path = out_path(config, &format!("probe_{probe}.csv"))?;
                write_probe_csv(&path, &trajectory, probe)?;
            }
            for (i, snap) in trajectory.snapshots.iter().enumerate() {
                let path = out_path(config, &format!("snapshot_{i:04}.txt"))?;
                write_field_text(&path, &trajectory.nodes_x, &trajectory.nodes_y, &snap.field, snap.t)?;
            }
            let half_start = sim_config.t_end * 0.5;
            let period = dominant_period(
                &trajectory.times,
                &trajectory.probe_series[0],
                (half_start, sim_config.t_end),
            )
            .ok();
            let final_max = trajectory.final_field.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let initial_max = trajectory.initial_field.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            #[derive(Serialize)]
            struct Out {
                steps: usize,
                initial_max: f64,
                final_max: f64,
                probe_files: usize,
                snapshot_files: usize,
                /// (mean, std) of the probe-0 oscillation period over the
                /// second half, when at least three crossings exist.
                dominant_period: Option<(f64, f64)>,
            }
            print_json(&Out {
                steps: trajectory.times.len(),
                initial_max,
                final_max,
                probe_files: trajectory.probe_series.len(),
                snapshot_files: trajectory.snapshots.len(),
                dominant_period: period,
            });
            Ok(())
        }
        Command::Square { seeds } => {
            let seed_pairs: Vec<(Complex64, Complex64)> = seeds
                .iter()
                .map(|s| parse_seed(s))
                .collect::<Result<_, _>>()?;
            let n = config.quadrature.n_apply;
            let grid = QuadGrid::on_rectangle(config.model.a, config.model.b, n, n);
            let (solutions, failures) =
                square_n2_scan(&config.model, &seed_pairs, Parity::Even, Some(&grid));
            #[derive(Serialize)]
            struct Fail {
                seed_z: Complex64,
                seed_nu: Complex64,
                reason: String,
            }
            #[derive(Serialize)]
            struct Out {
                solutions: Vec<neural_field::characteristic::square::SquareModeSolution>,
                failures: Vec<Fail>,
            }
            let any = !solutions.is_empty();
            print_json(&Out {
                solutions,
                failures: failures
                    .into_iter()
                    .map(|(z, nu, reason)| Fail {
                        seed_z: z,
                        seed_nu: nu,
                        reason,
                    })
                    .collect(),
            });
            if any {
                Ok(())
            } else {
                Err(CliError::Numerical(
                    "no seed converged to a certified solution".into(),
                ))
            }
        }
        Command::ReproducePaper => reproduce(config),
    }
}

#[derive(Serialize)]
struct Check {
    name: &'static str,
    value: f64,
    target: String,
    pass: bool,
}

impl Check {
    fn range(name: &'static str, value: f64, lo: f64, hi: f64) -> Self {
        Check {
            name,
            value,
            target: format!("[{lo}, {hi}]"),
            pass: value >= lo && value <= hi,
        }
    }

    fn at_most(name: &'static str, value: f64, bound: f64) -> Self {
        Check {
            name,
            value,
            target: format!("<= {bound}"),
            pass: value <= bound,
        }
    }
}

/// Runs the full reference pipeline and prints one PASS/FAIL line per
/// golden value (critical strength -3.27, frequency 1.34, Lyapunov
/// coefficient -1.572, decay vs. sustained oscillation).
fn reproduce(config: &RunConfig) -> Result<(), CliError> {
    let mut checks: Vec<Check> = Vec::new();
    // Stage 1: Hopf location.
    let hopf = run_hopf(config)?;
    checks.push(Check::range("hopf_c_hat", hopf.c_hat, -3.29, -3.25));
    checks.push(Check::range("hopf_omega", hopf.omega, 1.33, 1.35));
    let mode_target = Complex64::new(-0.17, 1.15);
    checks.push(Check::at_most(
        "hopf_mode_rho_offset",
        (hopf.pair.rho - mode_target).norm(),
        0.01,
    ));
    checks.push(Check::at_most(
        "hopf_mode_nu_offset",
        (hopf.pair.nu - mode_target).norm(),
        0.01,
    ));
    // Stage 2: first Lyapunov coefficient at the crossing.
    let critical = with_strength(&config.model, Some(hopf.c_hat));
    let n = config.quadrature.n_check;
    let grid = QuadGrid::on_rectangle(critical.a, critical.b, n, n);
    let lyap = g21_compute(&critical, &grid, &hopf.pair, &config.lyapunov).map_err(numerical)?;
    checks.push(Check::range("lyapunov_l1", lyap.l1, -1.651, -1.493));
    checks.push(Check::at_most(
        "lyapunov_constancy_rel_std",
        lyap.constancy_rel_std,
        0.05,
    ));
    // Stage 3: sub-critical strength decays.
    let mut decay_config = config.simulate.clone();
    decay_config.t_end = 100.0;
    decay_config.snapshot_stride = 0;
    let decay_model = with_strength(&config.model, Some(-0.5));
    let tr = simulate(&decay_model, &decay_config).map_err(numerical)?;
    let initial = tr.initial_field.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let final_max = tr.final_field.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    checks.push(Check::at_most(
        "decay_amplitude_ratio_t100",
        final_max / initial.max(f64::MIN_POSITIVE),
        1e-3,
    ));
    // Stage 4: super-critical strength sustains an oscillation.
    let mut osc_config = config.simulate.clone();
    osc_config.t_end = 150.0;
    osc_config.snapshot_stride = 0;
    let osc_model = with_strength(&config.model, Some(-4.0));
    let tr = simulate(&osc_model, &osc_config).map_err(numerical)?;
    let window = (100.0, 150.0);
    let (period, _spread) =
        dominant_period(&tr.times, &tr.probe_series[0], window).map_err(numerical)?;
    let omega_ref = 1.34;
    checks.push(Check::at_most(
        "oscillation_period_rel_error",
        (period - 2.0 * std::f64::consts::PI / omega_ref).abs()
            / (2.0 * std::f64::consts::PI / omega_ref),
        0.15,
    ));
    let in_window: Vec<(f64, f64)> = tr
        .times
        .iter()
        .zip(&tr.probe_series[0])
        .filter(|(t, _)| **t >= window.0 && **t <= window.1)
        .map(|(t, v)| (*t, *v))
        .collect();
    let mean = in_window.iter().map(|(_, v)| v).sum::<f64>() / in_window.len() as f64;
    let amp = |s: &[(f64, f64)]| s.iter().map(|(_, v)| (v - mean).abs()).fold(0.0, f64::max);
    let (a1, a2) = (
        amp(&in_window[..in_window.len() / 2]),
        amp(&in_window[in_window.len() / 2..]),
    );
    checks.push(Check::at_most(
        "oscillation_amplitude_drift",
        (a1 - a2).abs() / a1.max(a2),
        0.10,
    ));
    // Report.
    for c in &checks {
        out(&format!(
            "{}: {} (value {:.6e}, target {})",
            c.name,
            if c.pass { "PASS" } else { "FAIL" },
            c.value,
            c.target
        ));
    }
    #[derive(Serialize)]
    struct Summary<'a> {
        hopf: &'a HopfResult,
        lyapunov: &'a neural_field::hopf::LyapunovResult,
        oscillation_period: f64,
        checks: &'a [Check],
    }
    let summary = Summary {
        hopf: &hopf,
        lyapunov: &lyap,
        oscillation_period: period,
        checks: &checks,
    };
    std::fs::write(
        out_path(config, "summary.json")?,
        serde_json::to_string_pretty(&summary).expect("summary serialization cannot fail"),
    )?;
    if checks.iter().all(|c| c.pass) {
        out(&format!("all {} checks passed", checks.len()));
        Ok(())
    } else {
        let failed: Vec<&str> = checks.iter().filter(|c| !c.pass).map(|c| c.name).collect();
        Err(CliError::Numerical(format!(
            "{} of {} checks failed: {}",
            failed.len(),
            checks.len(),
            failed.join(", ")
        )))
    }
}
