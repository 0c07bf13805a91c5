use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use hamb_core::suites::Fault;
use hamb_core::{Graph, GraphKind};
use serde_json::Value;

use crate::commands::{self, CompareFamily, Method, Model, PolicySpec};
use crate::error::{exit, CliError};
use crate::format::{self, Format};
use crate::report::RunReport;

#[derive(Debug, Parser)]
#[command(name = "hamb", version, about = "Count, estimate and bound Hamiltonian cycles")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Graph file; stdin when absent or `-`.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Input encoding; detected from the first byte when absent.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Emit JSON instead of `key: value` lines.
    #[arg(long)]
    pub json: bool,
    /// Include wall-clock time in the report (makes output run-dependent).
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum FaultName {
    Diagonal,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact Hamiltonian cycle count, or the permanent.
    Exact {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        output: OutputArgs,
        #[arg(long, value_enum, default_value = "dp")]
        method: Method,
    },
    /// Monte Carlo estimate of the Hamiltonian cycle count.
    Estimate {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        output: OutputArgs,
        #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// ascending, follow-path:<v> or table:<path>
        #[arg(long, default_value = "ascending")]
        policy: String,
    },
    /// Upper bounds on the Hamiltonian cycle count.
    Bounds {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Tabulate bounds over a family of symmetric digraphs.
    Compare {
        #[arg(long, value_parser = parse_family)]
        family: CompareFamily,
        /// Vertex range, `a..b` inclusive.
        #[arg(long = "n", value_parser = commands::parse_range)]
        range: std::ops::RangeInclusive<usize>,
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Generate a graph file.
    Gen {
        #[arg(long, value_parser = parse_model)]
        model: Model,
        #[arg(long = "n")]
        n: usize,
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "undirected", value_parser = parse_kind)]
        kind: GraphKind,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Run the built-in verification suites.
    Selftest {
        #[arg(long)]
        json: bool,
        #[arg(long, value_enum, hide = true)]
        inject_fault: Option<FaultName>,
    },
}

fn parse_family(s: &str) -> Result<CompareFamily, String> {
    s.parse()
}

fn parse_model(s: &str) -> Result<Model, String> {
    s.parse()
}

fn parse_kind(s: &str) -> Result<GraphKind, String> {
    s.parse().map_err(|e: hamb_core::Error| e.to_string())
}

fn check_probability(p: f64) -> Result<(), CliError> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(CliError::Usage(format!("--p must lie in [0, 1], found {p}")))
    }
}

fn check_size(n: usize) -> Result<(), CliError> {
    let cap = format::max_vertices();
    if n > cap {
        return Err(CliError::SizeLimit(format!("n = {n} exceeds the vertex limit of {cap}")));
    }
    Ok(())
}

fn load(input: &InputArgs) -> Result<(Vec<u8>, Graph), CliError> {
    let bytes = commands::read_input(input.input.as_deref())?;
    let text = std::str::from_utf8(&bytes)
        .map_err(|e| CliError::Input(format!("input is not valid UTF-8: {e}")))?;
    let g = format::parse_graph(text, input.format, format::max_vertices())?;
    Ok((bytes, g))
}

fn emit(out: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        }),
        None => stdout.write_all(text.as_bytes()).map_err(|source| CliError::Io {
            path: "<stdout>".into(),
            source,
        }),
    }
}

fn finish(mut report: RunReport, output: &OutputArgs, started: Instant, stdout: &mut dyn Write) -> Result<(), CliError> {
    if output.timing {
        report.elapsed_ms = Some(started.elapsed().as_secs_f64() * 1e3);
    }
    emit(output.out.as_deref(), &report.render(output.json), stdout)
}

fn execute(cli: Cli, echo: String, stdout: &mut dyn Write) -> Result<(), CliError> {
    let started = Instant::now();
    match cli.command {
        Command::Exact { input, output, method } => {
            let (bytes, g) = load(&input)?;
            let mut report = RunReport::new(echo).digest(&bytes);
            commands::cmd_exact(&g, method, &mut report)?;
            finish(report, &output, started, stdout)
        }
        Command::Estimate {
            input,
            output,
            trials,
            seed,
            policy,
        } => {
            let spec: PolicySpec = policy.parse().map_err(CliError::Usage)?;
            let (bytes, g) = load(&input)?;
            let resolved = commands::resolve_policy(&spec, g.n())?;
            let mut report = RunReport::new(echo).digest(&bytes).seed(seed);
            commands::cmd_estimate(&g, &policy, &resolved, trials, seed, &mut report)?;
            finish(report, &output, started, stdout)
        }
        Command::Bounds { input, output } => {
            let (bytes, g) = load(&input)?;
            let mut report = RunReport::new(echo).digest(&bytes);
            commands::cmd_bounds(&g, &mut report)?;
            finish(report, &output, started, stdout)
        }
        Command::Compare {
            family,
            range,
            p,
            seed,
            output,
        } => {
            check_probability(p)?;
            if *range.start() < 3 {
                return Err(CliError::Usage("--n must start at 3 or more".into()));
            }
            check_size(*range.end())?;
            let rows = commands::compare_rows(family, range, p, seed)?;
            if output.json || output.timing {
                let mut report = RunReport::new(echo);
                if family == CompareFamily::Gnp {
                    report = report.seed(seed);
                    report.put("p", crate::report::real(p));
                }
                report.put("rows", commands::rows_to_json(&rows));
                finish(report, &output, started, stdout)
            } else {
                emit(output.out.as_deref(), &commands::rows_to_csv(&rows), stdout)
            }
        }
        Command::Gen {
            model,
            n,
            p,
            seed,
            kind,
            out,
            format,
        } => {
            check_probability(p)?;
            check_size(n)?;
            let g = commands::cmd_gen(model, n, p, seed, kind)?;
            emit(out.as_deref(), &format::write_graph(&g, format), stdout)
        }
        Command::Selftest { json, inject_fault } => {
            let fault = inject_fault.map(|FaultName::Diagonal| Fault::DiagonalEntry);
            let results = commands::cmd_selftest(fault);
            let failed = results.iter().filter(|r| !r.passed()).count();
            let text = if json {
                let mut report = RunReport::new(echo);
                report.put("suites", Value::Array(results.iter().map(commands::suite_json).collect()));
                report.put("failed", failed);
                report.to_json()
            } else {
                let mut s: String = results.iter().map(|r| format!("{r}\n")).collect();
                s.push_str(&format!("{} of {} suites passed\n", results.len() - failed, results.len()));
                s
            };
            emit(None, &text, stdout)?;
            if failed > 0 {
                return Err(CliError::SelftestFailed { failed });
            }
            Ok(())
        }
    }
}

/// Runs the tool on `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { exit::USAGE } else { exit::SUCCESS };
            let rendered = e.render().to_string();
            if code == exit::SUCCESS {
                let _ = stdout.write_all(rendered.as_bytes());
            } else {
                let _ = stderr.write_all(rendered.as_bytes());
            }
            return code;
        }
    };
    let echo = args
        .iter()
        .skip(1)
        .map(|a| a.to_string_lossy().into_owned())
        .collect::<Vec<_>>()
        .join(" ");
    match execute(cli, echo, stdout) {
        Ok(()) => exit::SUCCESS,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
