//! `x4`: command-line front end to the orbit-space toolkit.
//!
//! Every command reads a JSON payload (file or stdin) and prints a report
//! `{request, status, result}`. The embedded request is normalized, so feeding a
//! report back through `x4 run` reproduces it byte for byte.
//!
//! Exit codes: 0 success, 1 invalid input, 2 rejection, 3 non-convergence or
//! numerical failure.

mod dispatch;
mod render;
mod request;

use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::Value;

use dispatch::Status;
use request::{Format, Overrides, Request};

#[derive(Parser, Debug)]
#[command(name = "x4", version, about = "Invariants, classification and metric extents of orbit spaces")]
struct Cli {
    /// Payload file, `-` for stdin.
    #[arg(long, short, global = true, default_value = "-")]
    input: String,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Seed for sampling and heuristics (overrides the payload).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Sample size (overrides the payload).
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Tolerance of the smallness checks.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Canonical form of an invariant tuple.
    Canon,
    /// Whether two tuples are equivalent.
    Equiv,
    /// Euler number and normal form of a Seifert presentation.
    Euler,
    /// Fundamental group and first homology of a genus-0 Seifert manifold.
    SeifertPi1,
    /// Recognize a Seifert boundary.
    SeifertRecognize,
    /// Weighted projective weights from an invariant triple.
    Wcp,
    /// Classify a singular graph.
    Classify,
    /// q-extents of a sampled quotient.
    Extent {
        /// Also write the distance matrix here.
        #[arg(long)]
        matrix: Option<PathBuf>,
    },
    /// Smallness conditions on a quotient and its branched covers.
    CheckQ,
    /// Re-run the request embedded in a report (or a bare request).
    Run,
}

impl Cmd {
    fn name(&self) -> &'static str {
        match self {
            Cmd::Canon => "canon",
            Cmd::Equiv => "equiv",
            Cmd::Euler => "euler",
            Cmd::SeifertPi1 => "seifert-pi1",
            Cmd::SeifertRecognize => "seifert-recognize",
            Cmd::Wcp => "wcp",
            Cmd::Classify => "classify",
            Cmd::Extent { .. } => "extent",
            Cmd::CheckQ => "check-q",
            Cmd::Run => "run",
        }
    }
}

#[derive(Serialize)]
struct Report<'a> {
    request: &'a Request,
    status: Status,
    result: &'a Value,
}

fn read_input(path: &str) -> Result<Value> {
    let mut text = String::new();
    if path == "-" {
        io::stdin().read_to_string(&mut text).context("cannot read stdin")?;
    } else {
        text = std::fs::read_to_string(path).with_context(|| format!("cannot read {path}"))?;
    }
    serde_json::from_str(&text).context("input is not valid JSON")
}

fn init_threads() -> Result<()> {
    let Ok(v) = std::env::var("X4_THREADS") else { return Ok(()) };
    let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| anyhow!("X4_THREADS={v:?} is not a positive integer"))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("cannot build thread pool")
}

/// Everything up to dispatch; errors here are invalid input.
fn prepare(cli: &Cli) -> Result<(Request, request::Job)> {
    init_threads()?;
    let input = read_input(&cli.input)?;
    let flags = Overrides { seed: cli.seed, samples: cli.samples, tol: cli.tol, format: cli.format };
    match &cli.command {
        Cmd::Run => {
            let r = request::embedded(input)?;
            let mut o = request::replay_overrides(&r);
            o.format = cli.format.or(o.format);
            let (r2, job) = request::build(&r.command, &r.payload, &o)?;
            Ok((r2, job))
        }
        cmd => request::build(cmd.name(), &input, &flags),
    }
}

fn emit(report: &Report, format: Format) -> Result<()> {
    let text = match format {
        Format::Json => serde_json::to_string_pretty(report)? + "\n",
        Format::Text => render::text(&serde_json::to_value(report)?),
    };
    let mut out = io::stdout().lock();
    out.write_all(text.as_bytes())?;
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let (req, job) = match prepare(&cli) {
        Ok(x) => x,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(1);
        }
    };
    let matrix = match &cli.command {
        Cmd::Extent { matrix } => matrix.as_deref(),
        _ => None,
    };
    let outcome = match dispatch::run(&job, matrix) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(1);
        }
    };
    match outcome.status {
        Status::Rejected => eprintln!(
            "rejected [{}]: {}",
            outcome.result["tag"].as_str().unwrap_or("?"),
            outcome.result["reason"].as_str().unwrap_or("")
        ),
        Status::NotConverged => eprintln!("cover certificates did not converge"),
        Status::Failed => eprintln!("failed: {}", outcome.result["error"].as_str().unwrap_or("")),
        Status::Ok => {}
    }
    let report = Report { request: &req, status: outcome.status, result: &outcome.result };
    if let Err(e) = emit(&report, req.options.format) {
        eprintln!("error: {e:#}");
        return ExitCode::from(1);
    }
    ExitCode::from(outcome.status.exit_code() as u8)
}
