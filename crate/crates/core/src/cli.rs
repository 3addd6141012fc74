//! The `cib` command line.
//!
//! Exit status: 0 success, 1 domain failure (a dirty validation report, a
//! timespan without consistent scenarios, an invalid split, an unsound
//! aggregation), 2 usage, read, parse or cap errors. Results go to `out`,
//! diagnostics to `err`; nothing is written to disk.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::consistency::enumerate_consistent;
use crate::error::Error;
use crate::io::{
    parse_model, render_aggregation_report, render_chain_report, render_scenarios,
    write_weight_table, ModelDocument, DEFAULT_PRECISION, MAX_PRECISION,
};
use crate::multilevel::{
    aggregate_all, solve_subsystems, validate_split, verify_aggregation, AggregationReport,
};
use crate::options::{SolveOptions, DEFAULT_ENUMERATION_CAP};
use crate::succession::{basin_weights, SuccessionRule};
use crate::timechain::{build_chain, Timespan, Weighting};

#[derive(Debug, Parser)]
#[command(
    name = "cib",
    version,
    about = "Cross-impact balance scenario analysis"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a model file and print every issue found.
    Validate { model: PathBuf },
    /// List the consistent scenarios of each timespan.
    Consistent {
        model: PathBuf,
        #[arg(long)]
        timespan: Option<String>,
        /// Accept states whose balance is within this distance of the maximum.
        #[arg(long, default_value_t = 0)]
        tolerance: u32,
        #[command(flatten)]
        solve: SolveArgs,
    },
    /// Print the scenario weight table of each timespan as CSV.
    Weights {
        model: PathBuf,
        #[arg(long)]
        rule: SuccessionRule,
        #[arg(long)]
        timespan: Option<String>,
        #[command(flatten)]
        solve: SolveArgs,
        #[command(flatten)]
        format: FormatArgs,
    },
    /// Build the chain of highest-weight scenarios across timespans.
    Chain {
        model: PathBuf,
        #[arg(long)]
        rule: SuccessionRule,
        #[arg(long, default_value_t = Weighting::Scenario)]
        weighting: Weighting,
        #[command(flatten)]
        solve: SolveArgs,
        #[command(flatten)]
        format: FormatArgs,
    },
    /// Aggregate subsystem scenarios using the model's split.
    Aggregate {
        model: PathBuf,
        #[arg(long)]
        timespan: Option<String>,
        /// Compare against the consistent scenarios of the full system.
        #[arg(long)]
        verify: bool,
        #[command(flatten)]
        solve: SolveArgs,
    },
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Largest scenario space to enumerate.
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
    pub cap: u64,
}

#[derive(Debug, Args)]
pub struct FormatArgs {
    /// Decimal digits for weights.
    #[arg(long, default_value_t = DEFAULT_PRECISION as u8,
          value_parser = clap::value_parser!(u8).range(0..=MAX_PRECISION as i64))]
    pub precision: u8,
}

impl SolveArgs {
    fn options(&self) -> SolveOptions {
        SolveOptions::default().with_cap(self.cap)
    }
}

/// Outcome of a subcommand before it is turned into an exit status.
enum Failure {
    Domain(String),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Chain { .. } | Error::Subsystem(_) => Failure::Domain(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(format!("cannot write output: {e}"))
    }
}

type Outcome = Result<(), Failure>;

/// Runs one invocation; `args` includes the program name.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => 0,
        Err(Failure::Domain(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
    }
}

/// Process entry point for the binary.
pub fn main() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

fn load(path: &PathBuf) -> Result<ModelDocument, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read '{}': {e}", path.display())))?;
    parse_model(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

/// Loads a model and refuses to compute on one that fails validation.
fn load_valid(path: &PathBuf) -> Result<ModelDocument, Failure> {
    let doc = load(path)?;
    let report = doc.model.validate();
    if !report.is_clean() {
        return Err(Failure::Usage(format!(
            "{}: invalid model (run `cib validate`):\n{}",
            path.display(),
            report.to_string().trim_end()
        )));
    }
    Ok(doc)
}

fn select<'a>(doc: &'a ModelDocument, label: Option<&str>) -> Result<Vec<&'a Timespan>, Failure> {
    match label {
        None => Ok(doc.model.timespans.iter().collect()),
        Some(label) => doc
            .model
            .timespan(label)
            .map(|t| vec![t])
            .ok_or_else(|| Failure::Usage(format!("no timespan labelled '{label}'"))),
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> Outcome {
    match command {
        Command::Validate { model } => validate(&model, out),
        Command::Consistent {
            model,
            timespan,
            tolerance,
            solve,
        } => {
            let doc = load_valid(&model)?;
            let spans = select(&doc, timespan.as_deref())?;
            let mut empty = Vec::new();
            for (n, span) in spans.iter().enumerate() {
                let found = enumerate_consistent(&span.cim, tolerance, &solve.options())?;
                if n > 0 {
                    writeln!(out)?;
                }
                writeln!(out, "# {} ({} consistent)", span.label, found.len())?;
                out.write_all(render_scenarios(doc.framework(), &found).as_bytes())?;
                if found.is_empty() {
                    empty.push(span.label.as_str());
                }
            }
            if !empty.is_empty() {
                return Err(Failure::Domain(format!(
                    "no consistent scenarios in timespan(s): {}",
                    empty.join(", ")
                )));
            }
            Ok(())
        }
        Command::Weights {
            model,
            rule,
            timespan,
            solve,
            format,
        } => {
            let doc = load_valid(&model)?;
            let spans = select(&doc, timespan.as_deref())?;
            let labelled = spans.len() > 1;
            for (n, span) in spans.iter().enumerate() {
                let table = basin_weights(&span.cim, rule, &solve.options())?;
                if labelled {
                    if n > 0 {
                        writeln!(out)?;
                    }
                    writeln!(out, "# {}", span.label)?;
                }
                out.write_all(
                    write_weight_table(&table, usize::from(format.precision)).as_bytes(),
                )?;
            }
            Ok(())
        }
        Command::Chain {
            model,
            rule,
            weighting,
            solve,
            format,
        } => {
            let doc = load_valid(&model)?;
            if weighting == Weighting::Compound && doc.manual_values.is_none() {
                return Err(Failure::Usage(
                    "compound weighting needs `manual_values` in the model".into(),
                ));
            }
            let chain = build_chain(
                &doc.model,
                rule,
                weighting,
                doc.manual_values.as_ref(),
                &solve.options(),
            )?;
            out.write_all(render_chain_report(&chain, usize::from(format.precision)).as_bytes())?;
            Ok(())
        }
        Command::Aggregate {
            model,
            timespan,
            verify,
            solve,
        } => aggregate(&model, timespan.as_deref(), verify, &solve.options(), out),
    }
}

fn validate(path: &PathBuf, out: &mut dyn Write) -> Outcome {
    let doc = load(path)?;
    let mut report = doc.model.validate();
    if let Some(split) = &doc.split {
        for span in &doc.model.timespans {
            for issue in validate_split(&span.cim, split).issues {
                report.push(crate::validation::Issue::InTimespan {
                    timespan: span.label.clone(),
                    issue: Box::new(issue),
                });
            }
        }
    }
    write!(out, "{report}")?;
    if report.is_clean() {
        Ok(())
    } else {
        Err(Failure::Domain(format!(
            "{} error(s) found",
            report.errors().count()
        )))
    }
}

fn aggregate(
    path: &PathBuf,
    label: Option<&str>,
    verify: bool,
    options: &SolveOptions,
    out: &mut dyn Write,
) -> Outcome {
    let doc = load_valid(path)?;
    let split = doc
        .split
        .as_ref()
        .ok_or_else(|| Failure::Usage("the model declares no `split`".into()))?;
    let fw = doc.framework();
    let spans = select(&doc, label)?;
    let mut unsound = Vec::new();
    for (n, span) in spans.iter().enumerate() {
        let report = if verify {
            verify_aggregation(&span.cim, split, options)?
        } else {
            let issues = validate_split(&span.cim, split);
            if !issues.is_clean() {
                return Err(Failure::Domain(format!(
                    "timespan '{}': invalid split:\n{}",
                    span.label,
                    issues.to_string().trim_end()
                )));
            }
            let subsystems = solve_subsystems(&span.cim, split, options)?;
            let (aggregated, combinatorials, conflicts) =
                aggregate_all(&subsystems, split, options)?;
            AggregationReport {
                combinatorials,
                conflicts,
                aggregated,
                consistent: Vec::new(),
                unsound: Vec::new(),
                missing: Vec::new(),
                matched: 0,
            }
        };
        if n > 0 {
            writeln!(out)?;
        }
        writeln!(out, "# {}", span.label)?;
        out.write_all(render_aggregation_report(fw, &report, verify).as_bytes())?;
        if !report.is_sound() {
            unsound.push(span.label.as_str());
        }
    }
    if !unsound.is_empty() {
        return Err(Failure::Domain(format!(
            "aggregation produced inconsistent scenarios in timespan(s): {}",
            unsound.join(", ")
        )));
    }
    Ok(())
}
