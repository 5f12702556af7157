//! `mpf`: verify, dilate and continue moving Parseval frames, measure the
//! dimension of the Parseval set and run the worked examples.
//!
//! Exit codes: 0 success, 1 verification failure, 2 input or parse error,
//! 3 numerical failure. Errors are reported on stderr as one JSON record.

mod demo;
mod input;
mod report;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use mpf_core::bundle::{
    canonical_field, continue_with_refinement, det_normalized_field, loop_holonomy, ComplementField,
    MAX_REFINE_DEPTH,
};
use mpf_core::random::{random_parseval_frame, rng, DEFAULT_SEED};
use mpf_core::{
    det_normalized_complement, dilate, expected_parseval_dimension, parseval_tangent_dimension,
    stacked_residual, DMatrix, DilationPair, Error, Tolerances,
};
use serde::Serialize;

use crate::input::Document;
use crate::report::{DimRow, DimcheckReport};

#[derive(Parser)]
#[command(name = "mpf", version, about = "Moving Parseval frames: verification, dilation and holonomy")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the Parseval property (or the recorded checks) of any file the tool reads.
    Verify {
        /// Frame, field, complement or report JSON, or a field CSV.
        #[arg(long)]
        input: PathBuf,
        /// Write the residual table as JSON.
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_parser = positive)]
        tol: Option<f64>,
        /// Surface name recorded for CSV input.
        #[arg(long, default_value = "unknown")]
        surface: String,
    },
    /// Complete a frame to an orthonormal basis, or a field to a complement field.
    Dilate {
        #[arg(long)]
        input: PathBuf,
        /// Destination file; stdout when omitted.
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_parser = positive)]
        tol: Option<f64>,
        #[arg(long, value_enum, default_value_t = Method::Canonical)]
        method: Method,
        /// Maximum step halvings for continuation.
        #[arg(long, default_value_t = MAX_REFINE_DEPTH)]
        refine_depth: usize,
        #[arg(long, default_value = "unknown")]
        surface: String,
    },
    /// Continue a complement once around a closed path and report its holonomy.
    Holonomy {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_parser = positive)]
        tol: Option<f64>,
        /// Fiber map from the last sample to the first: `identity`, `mobius`,
        /// or rows such as `-1,0;0,1`.
        #[arg(long, default_value = "identity", allow_hyphen_values = true)]
        closure_map: String,
        #[arg(long, default_value_t = MAX_REFINE_DEPTH)]
        refine_depth: usize,
        #[arg(long, default_value = "unknown")]
        surface: String,
    },
    /// Measure the dimension of the Parseval set at seeded random frames.
    Dimcheck {
        /// Shapes as `k,n`, separated by spaces.
        #[arg(long, value_parser = parse_pair, num_args = 1.., value_delimiter = ' ',
              default_value = "3,2 4,2 5,3 4,3")]
        pairs: Vec<(usize, usize)>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Random frames per shape.
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
        trials: u32,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run a worked example end to end and write its field and report files.
    Demo {
        #[arg(value_enum)]
        name: DemoName,
        /// Output directory.
        #[arg(long)]
        output: PathBuf,
        /// Grid points per axis (path samples for loops).
        #[arg(long, default_value_t = 50, value_parser = clap::value_parser!(u64).range(2..))]
        resolution: u64,
        #[arg(long, value_parser = positive)]
        tol: Option<f64>,
        /// Also continue a complement around the twisted loop.
        #[arg(long)]
        holonomy: bool,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = MAX_REFINE_DEPTH)]
        refine_depth: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Canonical,
    Continuation,
    DetNormalized,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum DemoName {
    Sphere,
    Mobius,
    Klein,
    Obstruction,
}

/// Failure of a command, mapped onto an exit code.
#[derive(Debug)]
pub enum CliError {
    Input(String),
    Core(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

impl CliError {
    fn kind(&self) -> &'static str {
        match self {
            CliError::Input(_) => "Input",
            CliError::Core(e) => e.kind(),
        }
    }

    fn exit_code(&self) -> u8 {
        match self.kind() {
            "NotParseval" | "NotOrthonormal" | "NotIdempotent" | "NotClosed" => 1,
            "SingularSeed" | "RankDeficient" | "RankDeficientJacobian" => 3,
            _ => 2,
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Input(m) => m.clone(),
            CliError::Core(e) => e.to_string(),
        }
    }
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct ErrorRecord<'a> {
    kind: &'a str,
    message: String,
    exit_code: u8,
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("expected a positive number, got {s:?}")),
    }
}

fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    let (k, n) = s.split_once(',').ok_or_else(|| format!("expected k,n, got {s:?}"))?;
    let k = k.trim().parse::<usize>().map_err(|e| format!("{s:?}: {e}"))?;
    let n = n.trim().parse::<usize>().map_err(|e| format!("{s:?}: {e}"))?;
    if n == 0 || k < n {
        return Err(format!("{s:?}: need k ≥ n ≥ 1"));
    }
    Ok((k, n))
}

fn tolerances(tol: Option<f64>) -> Tolerances {
    let mut t = Tolerances::default();
    if let Some(p) = tol {
        t.parseval = p;
    }
    t
}

/// Parses `identity`, `mobius` or `a,b;c,d` style rows into a square matrix.
fn parse_closure(map: &str) -> Result<Option<DMatrix<f64>>, CliError> {
    match map {
        "identity" => Ok(None),
        "mobius" => Ok(Some(DMatrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, 1.0]))),
        rows => {
            let parsed: Vec<Vec<f64>> = rows
                .split(';')
                .map(|r| r.split(',').map(|x| x.trim().parse::<f64>()).collect::<Result<_, _>>())
                .collect::<Result<_, _>>()
                .map_err(|e| CliError::Input(format!("closure map {rows:?}: {e}")))?;
            let m = parsed.len();
            if parsed.iter().any(|r| r.len() != m) {
                return Err(CliError::Input(format!("closure map {rows:?} is not square")));
            }
            Ok(Some(DMatrix::from_fn(m, m, |r, c| parsed[r][c])))
        }
    }
}

pub fn write_output(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => {
            let mut out = io::stdout().lock();
            match writeln!(out, "{text}") {
                Err(e) if e.kind() != io::ErrorKind::BrokenPipe => return Err(e.into()),
                _ => {}
            }
        }
    }
    Ok(())
}

fn verify(input: &Path, output: Option<&Path>, tol: Option<f64>, surface: &str) -> Result<bool, CliError> {
    let doc = input::load(input, surface)?;
    let report = report::verify(&doc, &tolerances(tol));
    report.print();
    if let Some(p) = output {
        fs::write(p, serde_json::to_string_pretty(&report)?)?;
    }
    Ok(report.passed)
}

fn dilate_cmd(
    input: &Path,
    output: Option<&Path>,
    tol: &Tolerances,
    method: Method,
    refine_depth: usize,
    surface: &str,
) -> Result<bool, CliError> {
    match input::load(input, surface)? {
        Document::Frame(f) => {
            let pair = match method {
                Method::DetNormalized => {
                    let complement = det_normalized_complement(&f, tol)?;
                    let residual = stacked_residual(&f, &complement);
                    DilationPair { base: f, complement, residual }
                }
                Method::Canonical | Method::Continuation => dilate(&f, tol)?,
            };
            eprintln!("stacked residual {:.3e}", pair.residual);
            write_output(output, &serde_json::to_string_pretty(&pair)?)?;
            Ok(pair.residual <= tol.parseval)
        }
        Document::Field(field) => {
            let complements: ComplementField = match method {
                Method::Canonical => canonical_field(&field, tol)?,
                Method::DetNormalized => det_normalized_field(&field, tol)?,
                Method::Continuation => {
                    let first = &field
                        .samples
                        .first()
                        .ok_or_else(|| CliError::Input("field has no samples".into()))?
                        .frame;
                    let seed = dilate(first, tol)?.complement;
                    let (c, depth) = continue_with_refinement(&field, &seed, tol, refine_depth)?;
                    if depth > 0 {
                        eprintln!("path refined {depth} time(s)");
                    }
                    c
                }
            };
            eprintln!("max stacked residual {:.3e}", complements.max_stack_residual);
            write_output(output, &complements.to_json()?)?;
            Ok(complements.max_stack_residual <= tol.parseval)
        }
        other => Err(CliError::Input(format!("dilate expects a frame or a field, got {}", other.kind()))),
    }
}

fn holonomy_cmd(
    input: &Path,
    output: Option<&Path>,
    tol: &Tolerances,
    closure_map: &str,
    refine_depth: usize,
    surface: &str,
) -> Result<bool, CliError> {
    let Document::Field(path) = input::load(input, surface)? else {
        return Err(CliError::Input("holonomy expects a frame field sampled along a loop".into()));
    };
    let closure = parse_closure(closure_map)?;
    let first = &path.samples.first().ok_or_else(|| CliError::Input("empty path".into()))?.frame;
    let seed = dilate(first, tol)?.complement;
    let report = loop_holonomy(&path, &seed, closure.as_ref(), tol, refine_depth)?;
    eprintln!(
        "holonomy {:?}: ‖H − I‖ = {:.6}, det = {:.6}",
        report.classification, report.distance_from_identity, report.determinant
    );
    write_output(output, &serde_json::to_string_pretty(&report)?)?;
    Ok(report.residual <= tol.parseval)
}

fn dimcheck(pairs: &[(usize, usize)], seed: u64, trials: u32, output: Option<&Path>) -> Result<bool, CliError> {
    let tol = Tolerances::default();
    let mut r = rng(seed);
    let mut rows = Vec::new();
    for &(k, n) in pairs {
        for _ in 0..trials {
            let f = random_parseval_frame(&mut r, n, k)?;
            let measured = parseval_tangent_dimension(&f, tol.fd_step, tol.rank, &tol)?;
            rows.push(DimRow { k, n, measured, expected: expected_parseval_dimension(k, n) });
        }
    }
    let report = DimcheckReport::new(seed, rows);
    report.print();
    if let Some(p) = output {
        fs::write(p, serde_json::to_string_pretty(&report)?)?;
    }
    Ok(report.passed)
}

fn run(cli: Cli) -> Result<bool, CliError> {
    match cli.command {
        Command::Verify { input, output, tol, surface } => verify(&input, output.as_deref(), tol, &surface),
        Command::Dilate { input, output, tol, method, refine_depth, surface } => {
            dilate_cmd(&input, output.as_deref(), &tolerances(tol), method, refine_depth, &surface)
        }
        Command::Holonomy { input, output, tol, closure_map, refine_depth, surface } => {
            holonomy_cmd(&input, output.as_deref(), &tolerances(tol), &closure_map, refine_depth, &surface)
        }
        Command::Dimcheck { pairs, seed, trials, output } => dimcheck(&pairs, seed, trials, output.as_deref()),
        Command::Demo { name, output, resolution, tol, holonomy, seed, refine_depth } => {
            let config = demo::DemoConfig {
                name,
                resolution: resolution as usize,
                tol: tolerances(tol),
                holonomy,
                seed,
                refine_depth,
            };
            demo::run(&config, &output)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            let record = ErrorRecord { kind: e.kind(), message: e.message(), exit_code: e.exit_code() };
            eprintln!("{}", serde_json::to_string(&record).expect("error record serializes"));
            ExitCode::from(e.exit_code())
        }
    }
}
