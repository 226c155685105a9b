//! Basin-of-attraction estimation and cubical topology checks for a small
//! catalog of surface flows.
//!
//! The pipeline: pick a system from [`systems`], sweep a chart grid with
//! [`basin::compute_basin`] (each cell integrated by [`flow`]), turn the
//! converged set and a reference tubular neighborhood into complexes with
//! [`cubetopo`], and compare their Betti profiles. [`scenario`] wires the
//! stages together from a JSON config and writes deterministic artifacts.
//!
//! Everything downstream of a config is reproducible: fixed-step RK4,
//! seeded sampling, and order-independent parallel sweeps give byte-stable
//! CSV and JSON output.

pub mod basin;
pub mod cubetopo;
mod error;
pub mod flow;
pub mod geometry;
pub mod scenario;
pub mod systems;

pub use error::{Error, Result};

pub use basin::{compute_basin, compute_basin_sequential, BasinGrid, CellLabel};
pub use cubetopo::{betti, build_complex, compare_profiles, BettiProfile, Verdict};
pub use flow::{integrate, IntegrationParams, TerminalEvent, Trajectory};
pub use geometry::{Chart, GridSpec, TubularSpec};
pub use scenario::{run_scenario, RunReport, Scenario};
pub use systems::{SystemId, SystemSpec};

/// Cap the sweep thread pool. `n = 0` keeps the library default (one thread
/// per core). Without the `parallel` feature this is a no-op. Call at most
/// once, before the first sweep.
#[cfg(feature = "parallel")]
pub fn configure_threads(n: usize) -> Result<()> {
    if n == 0 {
        return Ok(());
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::BadConfig(format!("thread pool: {e}")))
}

#[cfg(not(feature = "parallel"))]
pub fn configure_threads(_n: usize) -> Result<()> {
    Ok(())
}
