//! The `ckm` command line: analyze sources, evaluate metrics against a rule
//! base, compare versions and inspect rule files.
//!
//! Exit codes: 0 success, 1 usage error, 2 input error, 3 internal error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::time::UNIX_EPOCH;

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;
use walkdir::WalkDir;

use ckmetrics::frontend::{lower_to_model, parse_sources};
use ckmetrics::metrics::{compute_all, Metric};
use ckmetrics::model::to_document_string;
use ckmetrics::report::chart::{render_svg, ChartSpec};
use ckmetrics::report::export::{export_document, ExportDocument, FilterResult, InputRef, Results};
use ckmetrics::report::{assessment_report, filter_report, render_text, verdict_report, Locale};
use ckmetrics::rules::{
    builtin, builtin_source, evaluate_project, filter_by_ranges, load_rules, rule_counts,
    Condition, EvaluationScope, KnowledgeBase, BUILTIN_BASES,
};
use ckmetrics::table::{load_project_metrics, to_metrics_document, to_metrics_table};
use ckmetrics::versions::{compare_versions, load_versions, Direction, DirectionTable};

#[derive(Debug, Parser)]
#[command(name = "ckm", version, about = "Chidamber & Kemerer metrics, rule-based evaluation and version comparison")]
struct Cli {
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the main output to FILE instead of standard output
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Report language (en or tr)
    #[arg(long, global = true, default_value = "en")]
    locale: Locale,
    /// Treat skipped files and unmatched facts as errors
    #[arg(long, global = true)]
    strict: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Structured,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Scope {
    Class,
    Project,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum NocDirection {
    HigherIsWorse,
    HigherIsBetter,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse .java files under the given roots and print the metrics table
    Analyze {
        #[arg(required = true, value_name = "ROOT")]
        roots: Vec<PathBuf>,
        /// Also write the extracted class model to FILE
        #[arg(long, value_name = "FILE")]
        model: Option<PathBuf>,
        /// Project name recorded in the output (default: first root's name)
        #[arg(long)]
        project: Option<String>,
    },
    /// Evaluate a metrics table, metrics document or class model
    Evaluate {
        #[arg(value_name = "INPUT")]
        input: PathBuf,
        /// Rule base: `default`, `reference` or a rules file
        #[arg(long, default_value = "default", value_name = "RULES")]
        rules: String,
        #[arg(long, value_enum, default_value_t = Scope::Class)]
        scope: Scope,
        /// Manual mode: partition classes by METRIC=CONDITION, e.g. WMC=2-5 or LCOM=0,1,2
        #[arg(long = "select", value_name = "METRIC=COND")]
        select: Vec<String>,
    },
    /// Compare per-class metric means across versions
    Compare {
        #[arg(required = true, value_name = "FILE")]
        files: Vec<PathBuf>,
        /// Comma-separated metrics to compare (default: all six)
        #[arg(long, value_delimiter = ',')]
        metrics: Vec<Metric>,
        /// Comma-separated version names, one per version
        #[arg(long, value_delimiter = ',')]
        names: Vec<String>,
        /// Also write a grouped bar chart as SVG
        #[arg(long, value_name = "SVG")]
        chart: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = NocDirection::HigherIsWorse)]
        noc_direction: NocDirection,
    },
    /// Inspect rule bases
    Rules {
        #[command(subcommand)]
        action: RulesAction,
    },
}

#[derive(Debug, Subcommand)]
enum RulesAction {
    /// List the built-in rule bases
    List,
    /// Validate a rules file
    Check { file: PathBuf },
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Input(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

fn input<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Input(e.to_string())
}

/// Runs the CLI with `args` (including the program name) and returns the
/// process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(text.as_bytes());
                    0
                }
                _ => {
                    let _ = err.write_all(text.as_bytes());
                    1
                }
            };
        }
    };

    let result = catch_unwind(AssertUnwindSafe(|| dispatch(&cli, err)))
        .unwrap_or_else(|_| Err(CliError::Internal("internal error".into())));
    let result = result.and_then(|text| emit(&cli, &text, out));
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "ckm: {e}");
            e.code()
        }
    }
}

fn emit(cli: &Cli, text: &str, out: &mut dyn Write) -> Result<(), CliError> {
    match &cli.out {
        Some(path) => write_file(path, text),
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Internal(format!("cannot write output: {e}"))),
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Input(format!("cannot write `{}`: {e}", path.display())))
}

fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read `{}`: {e}", path.display())))
}

fn input_ref(path: &Path) -> InputRef {
    let modified_unix = fs::metadata(path)
        .and_then(|m| m.modified())
        .ok()
        .and_then(|t| t.duration_since(UNIX_EPOCH).ok())
        .map(|d| d.as_secs());
    InputRef {
        path: path.display().to_string(),
        modified_unix,
    }
}

fn dispatch(cli: &Cli, err: &mut dyn Write) -> Result<String, CliError> {
    match &cli.command {
        Command::Analyze { roots, model, project } => analyze(cli, roots, model.as_deref(), project.as_deref(), err),
        Command::Evaluate {
            input,
            rules,
            scope,
            select,
        } => {
            if select.is_empty() {
                evaluate(cli, input, rules, *scope)
            } else {
                filter(cli, input, select)
            }
        }
        Command::Compare {
            files,
            metrics,
            names,
            chart,
            noc_direction,
        } => compare(cli, files, metrics, names, chart.as_deref(), *noc_direction),
        Command::Rules { action } => match action {
            RulesAction::List => rules_list(cli),
            RulesAction::Check { file } => rules_check(cli, file),
        },
    }
}

fn java_files(roots: &[PathBuf]) -> Result<Vec<PathBuf>, CliError> {
    let mut files = Vec::new();
    for root in roots {
        if !root.exists() {
            return Err(CliError::Input(format!("`{}` does not exist", root.display())));
        }
        for entry in WalkDir::new(root).sort_by_file_name() {
            let entry = entry.map_err(input)?;
            let path = entry.path();
            if entry.file_type().is_file() && path.extension().is_some_and(|e| e == "java") {
                files.push(path.to_path_buf());
            }
        }
    }
    files.sort();
    files.dedup();
    Ok(files)
}

fn analyze(
    cli: &Cli,
    roots: &[PathBuf],
    model_out: Option<&Path>,
    project: Option<&str>,
    err: &mut dyn Write,
) -> Result<String, CliError> {
    let files = java_files(roots)?;
    let sources: Vec<(PathBuf, String)> = files
        .iter()
        .map(|p| read_file(p).map(|t| (p.clone(), t)))
        .collect::<Result<_, _>>()?;

    let mut units = Vec::new();
    let mut failed = 0;
    for result in parse_sources(&sources) {
        match result {
            Ok(unit) => units.push(unit),
            Err(diags) => {
                failed += 1;
                for d in diags {
                    let _ = writeln!(err, "{d}");
                }
            }
        }
    }
    if failed > 0 && cli.strict {
        return Err(CliError::Input(format!("{failed} file(s) failed to parse")));
    }

    let name = project.map(str::to_string).unwrap_or_else(|| {
        roots[0]
            .canonicalize()
            .ok()
            .and_then(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
            .unwrap_or_else(|| "project".into())
    });
    let model = lower_to_model(&units, &name).map_err(input)?;
    if let Some(path) = model_out {
        write_file(path, &to_document_string(&model))?;
    }
    let pm = compute_all(&model);
    Ok(match cli.format {
        Format::Text => to_metrics_table(&pm),
        Format::Structured => to_metrics_document(&pm),
    })
}

fn knowledge_base(spec: &str) -> Result<KnowledgeBase, CliError> {
    if builtin_source(spec).is_some() {
        return builtin(spec).map_err(|e| CliError::Internal(e.to_string()));
    }
    let text = read_file(Path::new(spec))?;
    load_rules(&text).map_err(|e| CliError::Input(format!("`{spec}`: {e}")))
}

fn load_metrics(path: &Path) -> Result<ckmetrics::metrics::ProjectMetrics, CliError> {
    let text = read_file(path)?;
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    load_project_metrics(&text, &stem)
        .map(|(pm, _)| pm)
        .map_err(|e| CliError::Input(format!("`{}`: {e}", path.display())))
}

fn evaluate(cli: &Cli, path: &Path, rules: &str, scope: Scope) -> Result<String, CliError> {
    let kb = knowledge_base(rules)?;
    let pm = load_metrics(path)?;
    let (scope, scope_name) = match scope {
        Scope::Class => (EvaluationScope::Class, "class"),
        Scope::Project => (EvaluationScope::Project, "project"),
    };
    let assessments = evaluate_project(&pm, &kb, scope);
    if cli.strict {
        let unmatched: Vec<String> = assessments
            .iter()
            .flat_map(|a| {
                a.facts
                    .iter()
                    .filter(|f| f.rule_id.is_none())
                    .map(move |f| format!("{} {}={}", a.scope, f.metric, f.value))
            })
            .collect();
        if !unmatched.is_empty() {
            return Err(CliError::Input(format!(
                "no rule in `{}` matches: {}",
                kb.name(),
                unmatched.join(", ")
            )));
        }
    }
    Ok(match cli.format {
        Format::Text => render_text(&assessment_report(&assessments, cli.locale)),
        Format::Structured => export_document(&ExportDocument::new(
            vec![input_ref(path)],
            Results::Evaluation {
                rule_base: kb.name().to_string(),
                scope: scope_name.into(),
                assessments,
            },
        )),
    })
}

fn parse_selection(items: &[String]) -> Result<Vec<(Metric, Condition)>, CliError> {
    items
        .iter()
        .map(|item| {
            let (metric, cond) = item
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("--select `{item}`: expected METRIC=CONDITION")))?;
            let metric: Metric = metric
                .trim()
                .parse()
                .map_err(|e| CliError::Usage(format!("--select `{item}`: {e}")))?;
            let cond: Condition = cond
                .parse()
                .map_err(|e| CliError::Usage(format!("--select `{item}`: {e}")))?;
            Ok((metric, cond))
        })
        .collect()
}

fn filter(cli: &Cli, path: &Path, select: &[String]) -> Result<String, CliError> {
    let selection = parse_selection(select)?;
    let pm = load_metrics(path)?;
    let filters = filter_by_ranges(&pm, &selection).map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(match cli.format {
        Format::Text => render_text(&filter_report(&filters, cli.locale)),
        Format::Structured => export_document(&ExportDocument::new(
            vec![input_ref(path)],
            Results::RangeFilter {
                filters: filters.iter().map(FilterResult::from).collect(),
            },
        )),
    })
}

fn compare(
    cli: &Cli,
    files: &[PathBuf],
    metrics: &[Metric],
    names: &[String],
    chart: Option<&Path>,
    noc: NocDirection,
) -> Result<String, CliError> {
    let names = (!names.is_empty()).then_some(names);
    let records = load_versions(files, names, &cli.locale.version_naming()).map_err(input)?;
    let metrics = if metrics.is_empty() {
        Metric::ALL.to_vec()
    } else {
        metrics.to_vec()
    };
    let directions = DirectionTable::with_noc(match noc {
        NocDirection::HigherIsWorse => Direction::HigherIsWorse,
        NocDirection::HigherIsBetter => Direction::HigherIsBetter,
    });
    let verdicts = compare_versions(&records, &metrics, directions).map_err(input)?;
    if let Some(path) = chart {
        let svg = render_svg(&ChartSpec::from_versions(&records, &metrics)).map_err(input)?;
        write_file(path, &svg)?;
    }
    Ok(match cli.format {
        Format::Text => render_text(&verdict_report(&verdicts, cli.locale)),
        Format::Structured => export_document(&ExportDocument::new(
            files.iter().map(|p| input_ref(p)).collect(),
            Results::Comparison {
                versions: records,
                verdicts,
            },
        )),
    })
}

fn completeness(kb: &KnowledgeBase) -> String {
    let gaps: Vec<String> = Metric::ALL
        .iter()
        .filter_map(|&m| kb.first_gap(m).map(|v| format!("{m}={v}")))
        .collect();
    if gaps.is_empty() {
        "complete".into()
    } else {
        format!("incomplete, first gaps {}", gaps.join(" "))
    }
}

fn rules_summary(kb: &KnowledgeBase) -> serde_json::Value {
    let counts = rule_counts(kb);
    let per_metric: serde_json::Map<String, serde_json::Value> = Metric::ALL
        .iter()
        .map(|m| (m.to_string(), counts.get(m).copied().unwrap_or(0).into()))
        .collect();
    serde_json::json!({
        "name": kb.name(),
        "rules": kb.len(),
        "perMetric": per_metric,
        "complete": kb.is_complete(),
    })
}

fn rules_list(cli: &Cli) -> Result<String, CliError> {
    let bases: Vec<KnowledgeBase> = BUILTIN_BASES
        .iter()
        .map(|name| builtin(name).map_err(|e| CliError::Internal(e.to_string())))
        .collect::<Result<_, _>>()?;
    Ok(match cli.format {
        Format::Text => bases
            .iter()
            .map(|kb| format!("{}\t{} rules\t{}\n", kb.name(), kb.len(), completeness(kb)))
            .collect(),
        Format::Structured => {
            let list: Vec<_> = bases.iter().map(rules_summary).collect();
            let mut text = serde_json::to_string_pretty(&list).map_err(|e| CliError::Internal(e.to_string()))?;
            text.push('\n');
            text
        }
    })
}

fn rules_check(cli: &Cli, file: &Path) -> Result<String, CliError> {
    let text = read_file(file)?;
    let kb = load_rules(&text).map_err(|e| CliError::Input(format!("`{}`: {e}", file.display())))?;
    if cli.strict && !kb.is_complete() {
        return Err(CliError::Input(format!("`{}`: {}", file.display(), completeness(&kb))));
    }
    Ok(match cli.format {
        Format::Text => format!("{}: {} rules, {}\n", kb.name(), kb.len(), completeness(&kb)),
        Format::Structured => {
            let mut text = serde_json::to_string_pretty(&rules_summary(&kb))
                .map_err(|e| CliError::Internal(e.to_string()))?;
            text.push('\n');
            text
        }
    })
}
