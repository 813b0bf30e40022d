//! Scenario runner behind the `ramsey-tg` binary: configuration handling,
//! argument parsing and CSV emission.

pub mod args;
pub mod config;
pub mod error;
pub mod scenario;

pub use args::{parse_args, Invocation};
pub use config::{parse_config, RawConfig, RunConfig, Scenario};
pub use error::CliError;
pub use scenario::{run_scenario, Report};

/// Environment variable capping the worker-thread count.
pub const THREADS_ENV: &str = "RAMSEY_TG_THREADS";

/// Thread pool sized by `RAMSEY_TG_THREADS`, or rayon's default when unset.
pub fn thread_pool_from_env() -> Result<rayon::ThreadPool, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n >= 1)
            .ok_or_else(|| CliError::Usage(format!("{THREADS_ENV} must be an integer >= 1, got `{v}`")))?;
        builder = builder.num_threads(n);
    }
    builder
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start thread pool: {e}")))
}
