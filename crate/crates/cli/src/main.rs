use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use qonsager_cli::config::Backend;
use qonsager_cli::{report_format, run, Command, Format, RunConfig};
use qonsager_core::Exec;

#[derive(Parser)]
#[command(name = "qonsager", version, about = "Certify q-Onsager realizations, spectra and DRFs")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// JSON run configuration; flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// exact or numeric.
    #[arg(long, global = true, value_parser = parse_backend)]
    backend: Option<Backend>,
    /// Specialization point for numeric steps.
    #[arg(long, global = true)]
    q0: Option<f64>,
    /// Series order.
    #[arg(long = "T", global = true)]
    t: Option<usize>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
    /// Omit wall-clock timings (for byte-identical reports).
    #[arg(long, global = true)]
    no_timings: bool,
    /// Run every check on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Module, embedding and relation certification.
    Certify,
    /// Factorization, group-like and coproduct checks.
    Factorize,
    /// Drinfeld rational fractions of evaluation modules.
    Drf,
    /// Higher-rank type A checks.
    Rankn,
    /// One-dimensional modules.
    Onedim,
    /// Every suite.
    All,
}

fn parse_backend(s: &str) -> Result<Backend, String> {
    match s {
        "exact" => Ok(Backend::Exact),
        "numeric" => Ok(Backend::Numeric),
        _ => Err(format!("unknown backend {s:?}; expected exact or numeric")),
    }
}

fn load(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing {}", p.display()))?
        }
        None => RunConfig::default(),
    };
    if let Some(b) = cli.backend {
        cfg.backend = b;
    }
    if let Some(q0) = cli.q0 {
        cfg.q0 = q0;
    }
    if let Some(t) = cli.t {
        cfg.t = t;
    }
    if let Some(o) = &cli.out {
        cfg.out = Some(o.clone());
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main_inner(cli: &Cli) -> Result<bool> {
    let cfg = load(cli)?;
    let cmd = match cli.cmd {
        Cmd::Certify => Command::Certify,
        Cmd::Factorize => Command::Factorize,
        Cmd::Drf => Command::Drf,
        Cmd::Rankn => Command::Rankn,
        Cmd::Onedim => Command::Onedim,
        Cmd::All => Command::All,
    };
    let exec = if cli.sequential { Exec::Sequential } else { Exec::Parallel };
    let report = run(cmd, &cfg, exec)?;
    let bytes = report_format(&report, cli.format, !cli.no_timings)?;
    match &cfg.out {
        Some(p) => std::fs::write(p, bytes).with_context(|| format!("writing {}", p.display()))?,
        None => {
            use std::io::Write;
            std::io::stdout().write_all(&bytes)?;
        }
    }
    Ok(report.passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match main_inner(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
