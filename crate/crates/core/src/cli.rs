//! Command line front end. Summaries go to stdout; documents are written only
//! to the files named by `-o` or `--dot`.
//!
//! Exit codes: 0 success, 1 domain failure (invalid model, uncovered
//! requirements, incomplete suite), 2 usage or I/O error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::coverage::{verify_suite, AnnotatedSuite, BorderRole, CoverageCriterion};
use crate::generate::{Algorithm, CandidateOutcome, GenerationConfig};
use crate::io::{export_suite, import_suite, parse_model, render_dot, Format};
use crate::lcz::{compute_lczs, Threshold};
use crate::model::{validate, Locus, ProcessModel, Severity, ValidationReport};
use crate::pipeline::{run_generation, PipelineError};

#[derive(Debug, Parser)]
#[command(name = "lcz-mbt", version, about = "Test generation for processes with network outages")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Coverage {
    /// Each border node once
    Ebno,
    /// All combinations of border nodes
    AllPairs,
}

impl From<Coverage> for CoverageCriterion {
    fn from(c: Coverage) -> Self {
        match c {
            Coverage::Ebno => CoverageCriterion::EachBorderNodeOnce,
            Coverage::AllPairs => CoverageCriterion::AllCombinationsOfBorderNodes,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a model for structural problems
    Validate { model: PathBuf },
    /// List the limited connectivity zones at a threshold
    Lcz {
        model: PathBuf,
        #[arg(long, value_parser = parse_threshold)]
        threshold: Threshold,
        /// Write a Graphviz rendering of the zones
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Generate an annotated test suite
    Generate {
        model: PathBuf,
        #[arg(long, value_parser = parse_threshold)]
        threshold: Threshold,
        #[arg(long, value_enum)]
        coverage: Coverage,
        #[arg(long, value_parser = parse_algorithm, default_value = "portfolio")]
        algorithm: Algorithm,
        #[arg(long, env = "LCZ_MBT_SEED", default_value_t = 0)]
        seed: u64,
        /// Maximum steps per test case (default: four per model node)
        #[arg(long)]
        walk_cap: Option<usize>,
        /// Output format; defaults to the extension of the output file
        #[arg(long, value_parser = parse_format)]
        format: Option<Format>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Check a suite against a coverage criterion
    Verify {
        model: PathBuf,
        suite: PathBuf,
        /// Defaults to the threshold recorded in the suite
        #[arg(long, value_parser = parse_threshold)]
        threshold: Option<Threshold>,
        /// Defaults to the criterion recorded in the suite
        #[arg(long, value_enum)]
        coverage: Option<Coverage>,
    },
    /// Convert a JSON or XML suite into another format
    Export {
        suite: PathBuf,
        #[arg(long, value_parser = parse_format)]
        format: Option<Format>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Run the HTTP service
    Serve {
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        /// Allowed browser origin; repeat for several, omit to allow any
        #[arg(long = "cors-origin")]
        cors_origins: Vec<String>,
        /// Maximum number of stored models
        #[arg(long, default_value_t = 100)]
        capacity: usize,
    },
}

fn parse_threshold(s: &str) -> Result<Threshold, String> {
    let v: f64 = s.parse().map_err(|_| format!("'{s}' is not a number"))?;
    Threshold::new(v).map_err(|e| e.to_string())
}

fn parse_algorithm(s: &str) -> Result<Algorithm, String> {
    Algorithm::parse(s).ok_or_else(|| format!("unknown algorithm '{s}' (spc, aco, epp, portfolio)"))
}

fn parse_format(s: &str) -> Result<Format, String> {
    Format::parse(s).ok_or_else(|| format!("unknown format '{s}' (json, xml, csv)"))
}

/// A failed command: the message goes to stderr.
struct Exit {
    code: i32,
    message: String,
}

impl Exit {
    fn usage(message: impl Into<String>) -> Self {
        Exit { code: 2, message: message.into() }
    }

    fn domain(message: impl Into<String>) -> Self {
        Exit { code: 1, message: message.into() }
    }
}

type Outcome = Result<i32, Exit>;

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = err.write_all(text.as_bytes());
                2
            } else {
                let _ = out.write_all(text.as_bytes());
                0
            };
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message);
            e.code
        }
    }
}

fn execute(command: Command, out: &mut dyn Write) -> Outcome {
    match command {
        Command::Validate { model } => cmd_validate(&model, out),
        Command::Lcz { model, threshold, dot } => cmd_lcz(&model, threshold, dot.as_deref(), out),
        Command::Generate {
            model,
            threshold,
            coverage,
            algorithm,
            seed,
            walk_cap,
            format,
            output,
        } => {
            let mut config = GenerationConfig::new(threshold, coverage.into(), algorithm).with_seed(seed);
            config.walk_cap = walk_cap;
            cmd_generate(&model, &config, format, &output, out)
        }
        Command::Verify {
            model,
            suite,
            threshold,
            coverage,
        } => cmd_verify(&model, &suite, threshold, coverage.map(Into::into), out),
        Command::Export { suite, format, output } => cmd_export(&suite, format, &output, out),
        Command::Serve {
            host,
            port,
            cors_origins,
            capacity,
        } => cmd_serve(&host, port, cors_origins, capacity, out),
    }
}

fn read(path: &Path) -> Result<String, Exit> {
    fs::read_to_string(path).map_err(|e| Exit::usage(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Exit> {
    fs::write(path, text).map_err(|e| Exit::usage(format!("cannot write {}: {e}", path.display())))
}

fn input_format(path: &Path) -> Format {
    Format::from_path(path).unwrap_or(Format::Json)
}

fn output_format(requested: Option<Format>, path: &Path) -> Format {
    requested.or_else(|| Format::from_path(path)).unwrap_or(Format::Json)
}

fn load_model(path: &Path) -> Result<ProcessModel, Exit> {
    let text = read(path)?;
    parse_model(&text, input_format(path)).map_err(|e| Exit::usage(format!("{}: {e}", path.display())))
}

fn locus_text(locus: &Locus) -> String {
    match locus {
        Locus::Model => "model".into(),
        Locus::Node { id } => format!("node {id}"),
        Locus::Transition { from, to, label: None } => format!("transition {from} -> {to}"),
        Locus::Transition {
            from,
            to,
            label: Some(l),
        } => format!("transition {from} -> {to} [{l}]"),
    }
}

fn print_issues(report: &ValidationReport, out: &mut dyn Write) -> std::io::Result<()> {
    for issue in &report.issues {
        let severity = match issue.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        writeln!(
            out,
            "{severity} {} at {}: {}",
            issue.code,
            locus_text(&issue.locus),
            issue.message
        )?;
    }
    Ok(())
}

/// Loads a model and refuses to continue when validation reports errors.
fn load_valid_model(path: &Path, out: &mut dyn Write) -> Result<ProcessModel, Exit> {
    let model = load_model(path)?;
    let report = validate(&model);
    if !report.is_ok() {
        print_issues(&report, out).map_err(stdout_failed)?;
        return Err(Exit::domain(format!(
            "{} has {} validation error(s)",
            path.display(),
            report.errors().count()
        )));
    }
    Ok(model)
}

fn stdout_failed(e: std::io::Error) -> Exit {
    Exit::usage(format!("cannot write to stdout: {e}"))
}

fn cmd_validate(path: &Path, out: &mut dyn Write) -> Outcome {
    let model = load_model(path)?;
    let report = validate(&model);
    let mut body = || -> std::io::Result<()> {
        writeln!(out, "nodes: {}", model.node_count())?;
        writeln!(out, "transitions: {}", model.transitions().len())?;
        print_issues(&report, out)?;
        let errors = report.errors().count();
        let warnings = report.warnings().count();
        let verdict = if errors == 0 { "valid" } else { "invalid" };
        writeln!(out, "result: {verdict} ({errors} error(s), {warnings} warning(s))")
    };
    body().map_err(stdout_failed)?;
    Ok(if report.is_ok() { 0 } else { 1 })
}

fn join<T: std::fmt::Display>(items: impl IntoIterator<Item = T>) -> String {
    items.into_iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" ")
}

fn cmd_lcz(path: &Path, threshold: Threshold, dot: Option<&Path>, out: &mut dyn Write) -> Outcome {
    let model = load_valid_model(path, out)?;
    let report = compute_lczs(&model, threshold);
    let mut body = || -> std::io::Result<()> {
        writeln!(out, "threshold: {threshold}")?;
        writeln!(out, "zones: {}", report.zones.len())?;
        for z in &report.zones {
            writeln!(
                out,
                "Z{}: members [{}] entries [{}] exits [{}]",
                z.zone_id,
                join(&z.members),
                join(&z.entries),
                join(&z.exits)
            )?;
        }
        for w in &report.warnings {
            writeln!(out, "warning {}: {}", w.code.as_str(), w.message)?;
        }
        Ok(())
    };
    body().map_err(stdout_failed)?;
    if let Some(dot_path) = dot {
        write(dot_path, &render_dot(&model, &report, None))?;
    }
    Ok(0)
}

fn cmd_generate(
    path: &Path,
    config: &GenerationConfig,
    format: Option<Format>,
    output: &Path,
    out: &mut dyn Write,
) -> Outcome {
    let model = load_valid_model(path, out)?;
    let result = match run_generation(&model, config) {
        Ok(r) => r,
        Err(PipelineError::InvalidModel(_)) => unreachable!("model validated above"),
        Err(e) => return Err(Exit::domain(e.to_string())),
    };
    let format = output_format(format, output);
    write(output, &export_suite(&result.annotated, format).payload)?;

    let suite = &result.suite;
    let mut body = || -> std::io::Result<()> {
        writeln!(out, "threshold: {}", config.threshold)?;
        writeln!(out, "criterion: {}", config.criterion)?;
        writeln!(out, "zones: {}", result.report.zones.len())?;
        writeln!(out, "requirements: {}", result.requirements.len())?;
        writeln!(out, "algorithm: {}", config.algorithm)?;
        if let Some(portfolio) = &result.portfolio {
            for c in &portfolio.candidates {
                let line = match &c.outcome {
                    CandidateOutcome::Complete { total_steps, cases } => {
                        format!("complete, {cases} case(s), total_steps {total_steps}")
                    }
                    CandidateOutcome::Incomplete {
                        total_steps,
                        cases,
                        covered,
                    } => format!("incomplete, {cases} case(s), total_steps {total_steps}, {covered} pair(s) toured"),
                    CandidateOutcome::Failed { code, .. } => format!("failed, {code}"),
                };
                writeln!(out, "  {}: {line}", c.algorithm)?;
            }
            writeln!(out, "selected: {}", portfolio.selected)?;
        }
        writeln!(out, "cases: {}", suite.cases.len())?;
        writeln!(out, "total_steps: {}", suite.total_steps)?;
        writeln!(out, "format: {format}")
    };
    body().map_err(stdout_failed)?;
    match suite.warning_code() {
        Some(code) => Err(Exit::domain(format!("{code}: the suite does not satisfy the criterion"))),
        None => Ok(0),
    }
}

fn load_suite(path: &Path) -> Result<AnnotatedSuite, Exit> {
    let text = read(path)?;
    import_suite(&text, input_format(path)).map_err(|e| Exit::usage(format!("{}: {e}", path.display())))
}

fn cmd_verify(
    model_path: &Path,
    suite_path: &Path,
    threshold: Option<Threshold>,
    criterion: Option<CoverageCriterion>,
    out: &mut dyn Write,
) -> Outcome {
    let model = load_valid_model(model_path, out)?;
    let suite = load_suite(suite_path)?;
    let threshold = threshold.unwrap_or(suite.config_echo.threshold);
    let criterion = criterion.unwrap_or(suite.config_echo.criterion);
    let report = compute_lczs(&model, threshold);
    let verdict = verify_suite(&model, &report, criterion, &suite.walks());

    let mut body = || -> std::io::Result<()> {
        writeln!(out, "threshold: {threshold}")?;
        writeln!(out, "criterion: {criterion}")?;
        writeln!(out, "cases: {}", suite.cases.len())?;
        writeln!(out, "satisfied: {}", if verdict.satisfied { "yes" } else { "no" })?;
        for &i in &verdict.invalid_cases {
            writeln!(out, "invalid case: {}", suite.cases[i].case_id)?;
        }
        let missing = |zone: u32, n: &crate::model::NodeId| {
            verdict.uncovered_nodes.iter().any(|u| u.zone_id == zone && &u.node == n)
        };
        for p in &verdict.uncovered_pairs {
            let relevant = match criterion {
                CoverageCriterion::AllCombinationsOfBorderNodes => true,
                CoverageCriterion::EachBorderNodeOnce => {
                    missing(p.zone_id, &p.entry) || p.exit.as_ref().is_some_and(|x| missing(p.zone_id, x))
                }
            };
            if relevant {
                match &p.exit {
                    Some(x) => writeln!(out, "uncovered pair: Z{} {} -> {x}", p.zone_id, p.entry)?,
                    None => writeln!(out, "uncovered entry-only requirement: Z{} {}", p.zone_id, p.entry)?,
                }
            }
        }
        if criterion == CoverageCriterion::EachBorderNodeOnce {
            for u in &verdict.uncovered_nodes {
                let role = match u.role {
                    BorderRole::Entry => "entry",
                    BorderRole::Exit => "exit",
                };
                writeln!(out, "uncovered {role}: Z{} {}", u.zone_id, u.node)?;
            }
        }
        Ok(())
    };
    body().map_err(stdout_failed)?;
    Ok(if verdict.satisfied { 0 } else { 1 })
}

fn cmd_export(path: &Path, format: Option<Format>, output: &Path, out: &mut dyn Write) -> Outcome {
    let suite = load_suite(path)?;
    let format = output_format(format, output);
    write(output, &export_suite(&suite, format).payload)?;
    let mut body = || -> std::io::Result<()> {
        writeln!(out, "cases: {}", suite.cases.len())?;
        writeln!(out, "total_steps: {}", suite.total_steps)?;
        writeln!(out, "format: {format}")
    };
    body().map_err(stdout_failed)?;
    Ok(0)
}

fn cmd_serve(host: &str, port: u16, cors_origins: Vec<String>, capacity: usize, out: &mut dyn Write) -> Outcome {
    if capacity == 0 {
        return Err(Exit::usage("--capacity must be at least 1"));
    }
    let addr = format!("{host}:{port}");
    let config = crate::api::ServiceConfig { capacity, cors_origins };
    let runtime = tokio::runtime::Runtime::new().map_err(|e| Exit::usage(format!("cannot start runtime: {e}")))?;
    runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind(&addr)
            .await
            .map_err(|e| Exit::usage(format!("cannot bind {addr}: {e}")))?;
        let local = listener.local_addr().map_err(|e| Exit::usage(e.to_string()))?;
        writeln!(out, "listening on http://{local}").map_err(stdout_failed)?;
        out.flush().map_err(stdout_failed)?;
        crate::api::serve(listener, config)
            .await
            .map_err(|e| Exit::usage(format!("server error: {e}")))
    })?;
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(args.iter().copied(), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn usage_errors_exit_two() {
        let (code, _, err) = run_args(&["lcz-mbt", "generate"]);
        assert_eq!(code, 2);
        assert!(err.contains("required"), "{err}");
        let (code, _, err) = run_args(&["lcz-mbt", "lcz", "m.json", "--threshold", "1.5"]);
        assert_eq!(code, 2);
        assert!(!err.is_empty());
    }

    #[test]
    fn help_goes_to_stdout() {
        let (code, out, _) = run_args(&["lcz-mbt", "--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("generate"));
    }

    #[test]
    fn missing_file_is_an_io_error() {
        let (code, _, err) = run_args(&["lcz-mbt", "validate", "/nonexistent/model.json"]);
        assert_eq!(code, 2);
        assert!(err.starts_with("error: cannot read"), "{err}");
    }

    #[test]
    fn coverage_spellings() {
        assert_eq!(CoverageCriterion::from(Coverage::Ebno), CoverageCriterion::EachBorderNodeOnce);
        assert_eq!(Coverage::from_str("all-pairs", false), Ok(Coverage::AllPairs));
    }
}
