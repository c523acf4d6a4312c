//! Command-line surface: tabulation of zw-measures, sampling (signatures,
//! boundary embeddings, Hua-Pickrell matrices) and the verification suite.
//!
//! Exit codes: 0 success, 1 verification failure, 2 invalid input.
//! Identical configurations produce byte-identical output files (no
//! timestamps are emitted). Log level comes from the `GTZW_LOG` variable
//! (`info` or `debug`; anything else is silent).

mod sample;
mod verify;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gtzw::zw_measure::{build_table, parse_complex, ZwParams};
use num_complex::Complex64;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const GIT_DESCRIBE: &str = env!("GTZW_GIT_DESCRIBE");

#[derive(Parser)]
#[command(
    name = "gtzw",
    version,
    about = "Gelfand-Tsetlin zw-measures: tabulate, sample, verify"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the truncated probability table of a zw-measure.
    Tabulate(TabulateArgs),
    /// Run the verification suite and report machine-readable results.
    Verify(verify::VerifyArgs),
    /// Draw samples: signatures, boundary embeddings or random matrices.
    #[command(subcommand)]
    Sample(sample::SampleCommand),
}

/// zw-parameters as flags; omitted primed values expand to conjugates.
#[derive(Args, Clone)]
pub struct ParamArgs {
    /// z as "re" or "re,im"
    #[arg(long)]
    z: String,
    /// z' (defaults to the conjugate of z)
    #[arg(long)]
    zp: Option<String>,
    /// w as "re" or "re,im"
    #[arg(long)]
    w: String,
    /// w' (defaults to the conjugate of w)
    #[arg(long)]
    wp: Option<String>,
}

impl ParamArgs {
    pub fn parse(&self) -> Result<ZwParams, String> {
        let read = |s: &str| parse_complex(s).map_err(|e| e.to_string());
        let z = read(&self.z)?;
        let w = read(&self.w)?;
        let z_prime = match &self.zp {
            Some(s) => read(s)?,
            None => z.conj(),
        };
        let w_prime = match &self.wp {
            Some(s) => read(s)?,
            None => w.conj(),
        };
        Ok(ZwParams::new(z, z_prime, w, w_prime))
    }
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Args)]
struct TabulateArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// level N of the table
    #[arg(long)]
    level: usize,
    /// captured-mass tolerance for the adaptive box
    #[arg(long, default_value_t = 1e-8)]
    mass_tol: f64,
    /// output path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

fn log_enabled(level: &str) -> bool {
    match std::env::var("GTZW_LOG").as_deref() {
        Ok("debug") => true,
        Ok("info") => level == "info",
        _ => false,
    }
}

pub fn log(level: &str, msg: &str) {
    if log_enabled(level) {
        eprintln!("[gtzw {level}] {msg}");
    }
}

pub fn write_output(out: &Option<PathBuf>, content: &str) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, content),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(content.as_bytes())
        }
    }
}

pub fn complex_json(v: Complex64) -> serde_json::Value {
    serde_json::json!([v.re, v.im])
}

fn run_tabulate(args: &TabulateArgs) -> Result<(), (u8, String)> {
    let params = args.params.parse().map_err(|e| (2, e))?;
    params
        .admissibility()
        .map_err(|reason| (2, format!("parameters not admissible: {reason}")))?;
    log(
        "info",
        &format!(
            "tabulating level {} with tolerance {}",
            args.level, args.mass_tol
        ),
    );
    let table = build_table(args.level, &params, args.mass_tol).map_err(|e| (2, e.to_string()))?;
    let entries: Vec<serde_json::Value> = table
        .masses
        .iter()
        .map(|(sig, &lw)| {
            serde_json::json!({
                "signature": sig,
                "log_weight": lw,
                "probability": (lw - table.log_target_total).exp(),
            })
        })
        .collect();
    let doc = serde_json::json!({
        "command": "tabulate",
        "version": VERSION,
        "git": GIT_DESCRIBE,
        "params": params,
        "level": args.level,
        "mass_tolerance": args.mass_tol,
        "log_s_n": table.log_target_total,
        "s_n": table.log_target_total.exp(),
        "captured_mass": table.captured_mass(),
        "defect": table.defect(),
        "entries": entries,
    });
    let content = format!(
        "{}\n",
        serde_json::to_string_pretty(&doc).expect("serializable")
    );
    write_output(&args.out, &content).map_err(|e| (2, e.to_string()))?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Tabulate(args) => run_tabulate(args),
        Command::Verify(args) => verify::run(args),
        Command::Sample(cmd) => sample::run(cmd),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err((code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
