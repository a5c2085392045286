//! Command line front end for `qgamma-core`: point evaluation, identity
//! verification suites, asymptotic tables and benchmarks.

#![allow(clippy::type_complexity)]

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use qgamma_core::PrecisionSpec;

pub mod bench;
pub mod eval;
pub mod grid;
pub mod report;
pub mod suites;
pub mod table;

use report::Outcome;

/// Version of the JSON and CSV report layouts.
pub const SCHEMA_VERSION: u32 = 1;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("i/o: {0}")]
    Io(String),
    #[error(transparent)]
    Eval(#[from] qgamma_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            _ => EXIT_FAIL,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "qgamma", version, about = "q-Gamma, q-Pochhammer, theta and eta functions at arbitrary precision")]
pub struct Cli {
    /// Working precision in bits.
    #[arg(long, global = true, env = "QGAMMA_PRECISION", default_value_t = 128)]
    pub precision: u32,

    /// Evaluate on one thread.
    #[arg(long, global = true)]
    pub sequential: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate one function, e.g. `eval gamma_q z=0.5 q=0.9`.
    Eval {
        function: String,
        /// Arguments as key=value.
        args: Vec<String>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Run a verification suite, or `all` of them.
    Verify {
        suite: String,
        /// Grid file replacing the suite's preset.
        #[arg(long)]
        grid: Option<PathBuf>,
        /// Output file; a directory when the suite is `all`.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// List passing cases in text output too.
        #[arg(long)]
        verbose: bool,
    },
    /// Print an asymptotic table as CSV, e.g. `table thm24 x=0.3 k=8..16`.
    Table {
        theorem: String,
        /// Grid overrides as key=values.
        overrides: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Time the direct product against the modular route for (q;q)_inf.
    Bench {
        /// Nomes to time.
        #[arg(long, value_delimiter = ',')]
        q: Vec<String>,
        /// Largest number of direct factors attempted.
        #[arg(long, default_value_t = bench::DEFAULT_BUDGET)]
        budget: u64,
        #[arg(long, default_value_t = 3)]
        repeats: u32,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

fn write_to(out: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => stdout.write_all(text.as_bytes()).map_err(|e| CliError::Io(e.to_string())),
    }
}

fn render(report: &report::SuiteReport, format: Format, verbose: bool) -> Result<String, CliError> {
    match format {
        Format::Text => Ok(report.to_text(verbose)),
        Format::Csv => report.to_csv(),
        Format::Json => report.to_json(),
    }
}

fn verify(
    suite: &str,
    grid: Option<&Path>,
    out: Option<&Path>,
    format: Format,
    verbose: bool,
    spec: &PrecisionSpec,
    stdout: &mut dyn Write,
) -> Result<i32, CliError> {
    let names: Vec<&str> = if suite == "all" {
        if grid.is_some() {
            return Err(CliError::Usage("--grid applies to a single suite".into()));
        }
        suites::SUITES.to_vec()
    } else if suites::SUITES.contains(&suite) {
        vec![suite]
    } else {
        return Err(CliError::Usage(format!("unknown suite {suite:?}; expected all or one of {}", suites::SUITES.join(", "))));
    };
    if suite == "all" {
        if let Some(dir) = out {
            std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
        }
    }
    let mut worst = Outcome::Pass;
    for name in names {
        let g = match grid {
            Some(path) => grid::Grid::load(path)?,
            None => grid::Grid::preset(name)?,
        };
        let report = suites::run_suite(name, &g, spec)?;
        worst = worst.max(report.outcome());
        let text = render(&report, format, verbose)?;
        match (suite == "all", out) {
            (true, Some(dir)) => {
                let ext = match format {
                    Format::Text => "txt",
                    Format::Csv => "csv",
                    Format::Json => "json",
                };
                write_to(Some(&dir.join(format!("{name}.{ext}"))), &text, stdout)?;
                write_to(None, &report.to_text(false), stdout)?;
            }
            (false, Some(path)) => {
                write_to(Some(path), &text, stdout)?;
                if format != Format::Text {
                    write_to(None, &report.to_text(false), stdout)?;
                }
            }
            (_, None) => write_to(None, &text, stdout)?,
        }
    }
    Ok(worst.exit_code())
}

fn dispatch(cli: Cli, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let mut spec = PrecisionSpec::bits(cli.precision)?;
    if cli.sequential {
        spec = spec.with_execution(qgamma_core::Execution::Sequential);
    }
    match cli.command {
        Command::Eval { function, args, format } => {
            let v = eval::cmd_eval(&function, &args, &spec)?;
            let text = match format {
                Format::Json => {
                    serde_json::to_string_pretty(&v).map_err(|e| CliError::Io(e.to_string()))? + "\n"
                }
                Format::Text => v.to_text(),
                Format::Csv => return Err(CliError::Usage("eval prints text or json".into())),
            };
            write_to(None, &text, stdout)?;
            Ok(EXIT_PASS)
        }
        Command::Verify { suite, grid, out, format, verbose } => {
            verify(&suite, grid.as_deref(), out.as_deref(), format, verbose, &spec, stdout)
        }
        Command::Table { theorem, overrides, out } => {
            let t = table::cmd_table(&theorem, &overrides, &spec)?;
            write_to(out.as_deref(), &t.to_csv()?, stdout)?;
            Ok(EXIT_PASS)
        }
        Command::Bench { q, budget, repeats, out, format } => {
            let qs: Vec<String> =
                if q.is_empty() { bench::DEFAULT_QS.iter().map(|s| s.to_string()).collect() } else { q };
            let r = bench::cmd_bench(&qs, budget, repeats, &spec)?;
            let text = match format {
                Format::Json => r.to_json()?,
                Format::Text => r.to_text(),
                Format::Csv => return Err(CliError::Usage("bench prints text or json".into())),
            };
            write_to(out.as_deref(), &text, stdout)?;
            Ok(EXIT_PASS)
        }
    }
}

/// Runs the command line `args` and returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let _ = if e.use_stderr() {
                write!(stderr, "{}", e.render())
            } else {
                write!(stdout, "{}", e.render())
            };
            return code;
        }
    };
    match dispatch(cli, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "qgamma: {e}");
            e.exit_code()
        }
    }
}
