use std::fs::File;
use std::io::{BufWriter, Write};
use std::process::ExitCode;

use ramsey_tg_cli::{parse_args, parse_config, run_scenario, thread_pool_from_env, CliError};

fn run() -> Result<bool, CliError> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let inv = parse_args(&args)?;
    let cfg = parse_config(&inv.raw_config()?)?;
    eprint!("{}", cfg.header_block());
    if let Some(path) = &inv.dump_config {
        std::fs::write(path, cfg.to_config_text()).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?;
    }
    let mut sink: Box<dyn Write> = match &inv.out {
        Some(path) => Box::new(BufWriter::new(File::create(path).map_err(|source| {
            CliError::Io {
                path: path.clone(),
                source,
            }
        })?)),
        None => Box::new(BufWriter::new(std::io::stdout().lock())),
    };
    let pool = thread_pool_from_env()?;
    let mut buffer = Vec::new();
    let report = pool.install(|| run_scenario(&cfg, inv.scenario, &mut buffer))?;
    sink.write_all(&buffer)?;
    sink.flush()?;
    for line in &report.summary {
        eprintln!("{line}");
    }
    Ok(report.passed)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: self-check failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
