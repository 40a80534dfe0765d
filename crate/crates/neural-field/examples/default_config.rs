//! Prints the complete default run configuration as JSON.
//!
//! Every field of the document can be overridden selectively — an empty
//! object `{}` is a valid configuration meaning "all defaults". The defaults
//! encode the worked single-term reference setup: `alpha = 1`, `tau0 = 1`,
//! `gamma = 4`, unit square half-widths, one kernel term with decay rate 2
//! and strength -3.27.
//!
//! Regenerate the bundled config with:
//! `cargo run --example default_config > configs/default.json`

use neural_field::RunConfig;

fn main() {
    println!("{}", RunConfig::default().to_json_pretty());
}
