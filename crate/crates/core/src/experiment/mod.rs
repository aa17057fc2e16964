//! Configuration-driven experiments and their on-disk artifacts.

pub mod artifacts;
pub mod commands;
pub mod config;

pub use artifacts::{GroundCache, Manifest, RunStatus};
pub use commands::{cmd_compare, cmd_ed, cmd_pool_info, cmd_run, Comparison, EdBasis, EdRow};
pub use config::{Ansatz, ExperimentConfig};

/// Environment variable fixing the worker-thread count.
pub const THREADS_ENV: &str = "VIPSA_THREADS";

/// Sizes the global rayon pool from `VIPSA_THREADS` if it is set. Must run
/// before any parallel work; later calls are no-ops.
pub fn configure_threads() -> crate::Result<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| crate::Error::Parse(format!("{THREADS_ENV} must be a thread count, got {raw:?}")))?;
    // an already-initialized pool is fine
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}
