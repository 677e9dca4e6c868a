//! The `gauge2d` subcommands.

use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use clap::{Parser, Subcommand};
use gauge2d_core::cartan::{curvature, pfaffian_to_cartan, CartanSystem};
use gauge2d_core::{render, Error};
use num_rational::BigRational;

use crate::exit;
use crate::pipeline::{describe_violation, run_pipeline, PipelineOptions};
use crate::report::{check_expected, to_machine, to_text};
use crate::spec::{parse_spec, render_system, Format, SystemSpec};

#[derive(Debug, Parser)]
#[command(name = "gauge2d", version, about = "Gauge symmetries and reducibility of 2D field equations")]
pub struct Cli {
    /// Progress messages on stderr.
    #[arg(short, long, global = true)]
    pub verbose: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute gauge generators, reducibility relations and the dof count.
    Analyze {
        file: PathBuf,
        /// Stabilization budget (default n + l + 2).
        #[arg(long)]
        max_k: Option<usize>,
        #[arg(long)]
        format: Option<Format>,
        /// File of `path = value` lines the machine report must match.
        #[arg(long)]
        fixture_check: Option<PathBuf>,
        /// Also substitute `param=value` into the generic result and compare
        /// with a run on the specialized system.
        #[arg(long, value_name = "PARAM=VALUE")]
        specialize: Option<String>,
    },
    /// Parse and validate a system file.
    Validate { file: PathBuf },
    /// Reduce Pfaffian data in `[theta]` to Cartan normal form.
    ReducePfaffian { file: PathBuf },
}

/// Captured result of one command.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Run {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

impl Run {
    fn fail(code: i32, message: impl Into<String>) -> Run {
        Run {
            stdout: String::new(),
            stderr: message.into() + "\n",
            code,
        }
    }
}

/// Exit code for a library error.
pub fn error_code(e: &Error) -> i32 {
    match e {
        Error::BudgetExceeded { .. } => exit::BUDGET,
        Error::DecompositionIncomplete { .. } | Error::ExpansionFailure(_) => exit::DECOMPOSITION,
        Error::DegenerateRank(_) | Error::InvalidSystem(_) => exit::VALIDATION,
        _ => exit::INTERNAL,
    }
}

/// Parses and validates a system file.
pub fn load_system(text: &str) -> Result<(SystemSpec, CartanSystem), Run> {
    let spec = parse_spec(text).map_err(|e| Run::fail(exit::PARSE, format!("parse error: {e}")))?;
    let sys = spec
        .system()
        .map_err(|e| Run::fail(exit::PARSE, format!("parse error: {e}")))?;
    let bound = spec.options.order_bound.unwrap_or_else(|| sys.default_order_bound());
    let report = sys.validate(bound);
    if !report.is_valid() {
        let lines: Vec<String> = report
            .violations
            .iter()
            .map(|v| format!("  {}", describe_violation(v, sys.layout())))
            .collect();
        return Err(Run::fail(
            exit::VALIDATION,
            format!("validation failed:\n{}", lines.join("\n")),
        ));
    }
    Ok((spec, sys))
}

pub fn validate(text: &str) -> Run {
    match load_system(text) {
        Err(r) => r,
        Ok((spec, sys)) => Run {
            stdout: format!(
                "valid: n = {}, m = {}, l = {} (order bound {})\n",
                sys.n(),
                sys.m(),
                sys.l(),
                spec.options.order_bound.unwrap_or_else(|| sys.default_order_bound())
            ),
            stderr: String::new(),
            code: exit::OK,
        },
    }
}

#[derive(Clone, Debug, Default)]
pub struct AnalyzeArgs {
    pub max_k: Option<usize>,
    pub format: Option<Format>,
    /// Contents of the expected-values file.
    pub expected: Option<String>,
    pub specialize: Option<String>,
    pub verbose: bool,
}

fn parse_specialize(s: &str, sys: &CartanSystem) -> Result<(usize, BigRational), String> {
    let Some((name, value)) = s.split_once('=') else {
        return Err(format!("--specialize expects PARAM=VALUE, got '{s}'"));
    };
    let name = name.trim();
    let index = sys
        .layout()
        .params
        .iter()
        .position(|p| p == name)
        .ok_or_else(|| format!("unknown parameter '{name}'"))?;
    let value = BigRational::from_str(value.trim()).map_err(|_| format!("'{}' is not a rational number", value.trim()))?;
    Ok((index, value))
}

pub fn analyze(text: &str, args: &AnalyzeArgs) -> Run {
    let start = Instant::now();
    let (spec, sys) = match load_system(text) {
        Ok(x) => x,
        Err(r) => return r,
    };
    let mut stderr = String::new();
    if args.verbose {
        stderr.push_str(&format!("loaded system with n = {}, m = {}, l = {}\n", sys.n(), sys.m(), sys.l()));
    }
    let specialize = match args.specialize.as_deref().map(|s| parse_specialize(s, &sys)) {
        None => None,
        Some(Ok(x)) => Some(x),
        Some(Err(e)) => return Run::fail(exit::PARSE, e),
    };
    let opts = PipelineOptions {
        max_k: args.max_k.or(spec.options.max_k),
        specialize,
    };
    let outcome = match run_pipeline(&sys, &opts) {
        Ok(o) => o,
        Err(e) => return Run::fail(error_code(&e), format!("analysis failed: {e}")),
    };
    if args.verbose {
        stderr.push_str(&format!("analysis finished in {:.3?}\n", start.elapsed()));
    }
    let format = args.format.or(spec.options.format).unwrap_or(Format::Text);
    let stdout = match format {
        Format::Text => to_text(&outcome.report),
        Format::Machine => to_machine(&outcome.report),
    };
    let mut code = if outcome.verified { exit::OK } else { exit::VERIFICATION };
    if !outcome.verified {
        stderr.push_str("verification failed\n");
    }
    if let Some(expected) = &args.expected {
        match check_expected(&outcome.report, expected) {
            Err(e) => return Run::fail(exit::PARSE, format!("fixture file: {e}")),
            Ok(mismatches) if !mismatches.is_empty() => {
                for m in mismatches {
                    stderr.push_str(&format!("fixture mismatch: {m}\n"));
                }
                code = exit::VERIFICATION;
            }
            Ok(_) => {}
        }
    }
    Run { stdout, stderr, code }
}

pub fn reduce_pfaffian(text: &str) -> Run {
    let spec = match parse_spec(text) {
        Ok(s) => s,
        Err(e) => return Run::fail(exit::PARSE, format!("parse error: {e}")),
    };
    let input = match spec.pfaffian() {
        Ok(p) => p,
        Err(e) => return Run::fail(exit::PARSE, format!("parse error: {e}")),
    };
    let omega = match curvature(&input) {
        Ok(o) => o,
        Err(e) => return Run::fail(error_code(&e), format!("reduction failed: {e}")),
    };
    let red = match pfaffian_to_cartan(&input) {
        Ok(r) => r,
        Err(e) => return Run::fail(error_code(&e), format!("reduction failed: {e}")),
    };
    let layout = red.system.layout();
    let mut out = String::new();
    out.push_str(&format!("# rank = {}, multipliers = {}\n", red.rank, red.system.l()));
    for (j, slab) in omega.0.iter().enumerate() {
        let jn = &layout.fields[layout.constrained_field(j)].name;
        for (a, row) in slab.iter().enumerate() {
            for (b, w) in row.iter().enumerate() {
                if a < b && !w.is_zero() {
                    let an = &layout.fields[layout.free_field(a)].name;
                    let bn = &layout.fields[layout.free_field(b)].name;
                    out.push_str(&format!("# curvature {jn}.{an}.{bn} = {}\n", render::field_elem(w, layout)));
                }
            }
        }
    }
    if omega.is_zero() {
        out.push_str("# curvature vanishes: completely integrable\n");
    }
    let mut stderr = String::new();
    for w in &red.warnings {
        out.push_str(&format!("# warning: {w}\n"));
        stderr.push_str(&format!("warning: {w}\n"));
    }
    out.push('\n');
    out.push_str(&render_system(&red.system));
    Run {
        stdout: out,
        stderr,
        code: exit::OK,
    }
}

fn read(path: &PathBuf) -> Result<String, Run> {
    std::fs::read_to_string(path)
        .map_err(|e| Run::fail(exit::PARSE, format!("cannot read {}: {e}", path.display())))
}

/// Runs a parsed command line.
pub fn execute(cli: &Cli) -> Run {
    let go = || -> Result<Run, Run> {
        Ok(match &cli.command {
            Command::Analyze {
                file,
                max_k,
                format,
                fixture_check,
                specialize,
            } => {
                let expected = fixture_check.as_ref().map(read).transpose()?;
                analyze(
                    &read(file)?,
                    &AnalyzeArgs {
                        max_k: *max_k,
                        format: *format,
                        expected,
                        specialize: specialize.clone(),
                        verbose: cli.verbose,
                    },
                )
            }
            Command::Validate { file } => validate(&read(file)?),
            Command::ReducePfaffian { file } => reduce_pfaffian(&read(file)?),
        })
    };
    go().unwrap_or_else(|r| r)
}
