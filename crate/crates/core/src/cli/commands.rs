use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use log::info;

use super::config::{ConfigLayer, LlmSource, RunConfig, CONFIG_FILE};
use super::{AnalyzeArgs, FormatArg, ReportArgs, TranslateArgs, EXIT_INTERNAL, EXIT_OK, EXIT_USAGE};
use crate::agents::{LlmClient, ReplayClient};
use crate::corpus::{load_corpus, validate_case, ValidatedCase};
use crate::executors::{Backend, MockBackend, ProcessBackend};
use crate::liveness::analyze_function;
use crate::metrics::{emit_report, parse_machine_report, MetricsReport, ReportFormat, DEFAULT_UP_LIMIT};
use crate::orchestrator::{run_corpus, write_outcome, TaskDeps, TaskError, TaskOutcome};
use crate::rvv_front::parse_function_named;

pub const REPORT_FILE: &str = "report.json";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Internal(_) => EXIT_INTERNAL,
        }
    }
}

fn usage(e: impl ToString) -> CliError {
    CliError::Usage(e.to_string())
}

fn report_format(f: FormatArg) -> ReportFormat {
    match f {
        FormatArg::Text => ReportFormat::TextTable,
        FormatArg::Json => ReportFormat::Machine,
    }
}

fn resolve_config(a: &TranslateArgs) -> Result<RunConfig, CliError> {
    let flags = a.layer();
    let file_path = match &a.config {
        Some(p) => Some(p.clone()),
        None => {
            let corpus = flags.corpus_dir.clone().unwrap_or_else(|| PathBuf::from("corpus"));
            Some(corpus.join(CONFIG_FILE)).filter(|p| p.is_file())
        }
    };
    let file = match &file_path {
        Some(p) => ConfigLayer::from_file(p).map_err(usage)?,
        None => ConfigLayer::default(),
    };
    flags.over(file).resolve().map_err(usage)
}

fn select_cases(cfg: &RunConfig, err: &mut dyn Write) -> Result<Vec<ValidatedCase>, CliError> {
    let load = load_corpus(&cfg.corpus_dir).map_err(usage)?;
    for e in &load.errors {
        let _ = writeln!(err, "warning: skipping case: {e}");
    }
    let mut cases = Vec::new();
    for m in &load.cases {
        match validate_case(m) {
            Ok(c) => {
                for w in &c.warnings {
                    let _ = writeln!(err, "warning: {}: {w}", c.id());
                }
                cases.push(c);
            }
            Err(e) => {
                let _ = writeln!(err, "warning: skipping case: {e}");
            }
        }
    }
    let Some(wanted) = &cfg.cases else { return Ok(cases) };
    let known: BTreeSet<&str> = cases.iter().map(ValidatedCase::id).collect();
    let unknown: Vec<&str> = wanted.iter().map(String::as_str).filter(|w| !known.contains(w)).collect();
    if !unknown.is_empty() {
        return Err(CliError::Usage(format!(
            "unknown case id: {}; valid ids: {}",
            unknown.join(", "),
            known.into_iter().collect::<Vec<_>>().join(", ")
        )));
    }
    Ok(cases.into_iter().filter(|c| wanted.iter().any(|w| w == c.id())).collect())
}

fn make_llm(cfg: &RunConfig) -> Result<Box<dyn LlmClient>, CliError> {
    match &cfg.llm {
        None => Err(usage("one of --endpoint or --replay is required")),
        Some(LlmSource::Replay(p)) => Ok(Box::new(ReplayClient::from_file(p).map_err(usage)?)),
        #[cfg(feature = "remote")]
        Some(LlmSource::Endpoint(url)) => {
            use crate::agents::{RemoteClient, RemoteConfig};
            let client = RemoteClient::from_env(RemoteConfig::new(url.clone(), cfg.model.clone())).map_err(usage)?;
            Ok(Box::new(client))
        }
        #[cfg(not(feature = "remote"))]
        Some(LlmSource::Endpoint(_)) => Err(usage("this build has no remote LLM support; use --replay")),
    }
}

fn clear_outcomes(dir: &Path) -> Result<(), CliError> {
    let Ok(entries) = fs::read_dir(dir) else { return Ok(()) };
    for e in entries.flatten() {
        let p = e.path();
        if p.extension().is_some_and(|x| x == "json") {
            fs::remove_file(&p).map_err(|e| CliError::Internal(format!("removing {}: {e}", p.display())))?;
        }
    }
    Ok(())
}

pub fn translate(a: &TranslateArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let cfg = resolve_config(a)?;
    let cases = select_cases(&cfg, err)?;
    if cases.is_empty() {
        return Err(usage(format!("no valid cases in {}", cfg.corpus_dir.display())));
    }
    let backend: Box<dyn Backend> = if a.no_exec {
        Box::new(MockBackend { vlens: cfg.toolchain.vlens.clone(), runs: cfg.toolchain.perf_runs, native_cost: None })
    } else {
        Box::new(ProcessBackend::new(cfg.toolchain.clone()).map_err(usage)?)
    };
    let llm = make_llm(&cfg)?;
    info!("{} cases, backend {}, llm {}", cases.len(), backend.describe(), llm.describe());

    let mut deps = TaskDeps::new(llm.as_ref(), backend.as_ref(), cfg.work_dir());
    deps.budgets = cfg.budgets;
    deps.sampling = cfg.sampling;
    deps.mode = cfg.mode;

    let outcomes_dir = cfg.outcomes_dir();
    clear_outcomes(&outcomes_dir)?;
    let mut outcomes: Vec<TaskOutcome> = Vec::new();
    let mut code = EXIT_OK;
    for (case, result) in cases.iter().zip(run_corpus(&cases, &deps, cfg.parallelism)) {
        match result {
            Ok(o) => {
                write_outcome(&outcomes_dir, &o)
                    .map_err(|e| CliError::Internal(format!("writing outcome for {}: {e}", o.case_id)))?;
                outcomes.push(o);
            }
            Err(e @ TaskError::Config(_)) => {
                let _ = writeln!(err, "error: {}: {e}", case.id());
                code = code.max(EXIT_USAGE);
            }
            Err(e @ TaskError::Internal { .. }) => {
                let _ = writeln!(err, "error: {e}");
                code = EXIT_INTERNAL;
            }
        }
    }
    if outcomes.is_empty() {
        return Ok(code);
    }
    let report = MetricsReport::from_outcomes(&outcomes, cfg.budgets.translate_max, cfg.include_failed)
        .map_err(|e| CliError::Internal(e.to_string()))?;
    let path = cfg.out_dir.join(REPORT_FILE);
    fs::write(&path, emit_report(&report, ReportFormat::Machine))
        .map_err(|e| CliError::Internal(format!("writing {}: {e}", path.display())))?;
    let _ = out.write_all(emit_report(&report, report_format(a.format)).as_bytes());
    Ok(code)
}

pub fn analyze(a: &AnalyzeArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let src = fs::read_to_string(&a.file).map_err(|e| usage(format!("cannot read {}: {e}", a.file.display())))?;
    let ir = parse_function_named(&src, &a.function).map_err(|e| usage(format!("{}: {e}", a.file.display())))?;
    if a.dump_ir {
        let _ = writeln!(out, "{}", ir.dump());
    }
    let report = analyze_function(&ir, a.mode.into()).report;
    let text = match a.format {
        FormatArg::Text => format!("{}\n", report.to_string().trim_end()),
        FormatArg::Json => serde_json::to_string_pretty(&report).expect("report serializes") + "\n",
    };
    let _ = out.write_all(text.as_bytes());
    Ok(EXIT_OK)
}

pub fn report(a: &ReportArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let nested = a.dir.join("outcomes");
    let dir = if nested.is_dir() { nested } else { a.dir.clone() };
    let entries = fs::read_dir(&dir).map_err(|e| usage(format!("cannot read {}: {e}", dir.display())))?;
    let mut files: Vec<PathBuf> =
        entries.flatten().map(|e| e.path()).filter(|p| p.extension().is_some_and(|x| x == "json")).collect();
    files.sort();
    let mut outcomes = Vec::new();
    for f in files.iter().filter(|f| f.file_name().is_some_and(|n| n != REPORT_FILE)) {
        let parsed = fs::read_to_string(f)
            .map_err(|e| e.to_string())
            .and_then(|t| serde_json::from_str::<TaskOutcome>(&t).map_err(|e| e.to_string()));
        match parsed {
            Ok(o) => outcomes.push(o),
            Err(e) => {
                let _ = writeln!(err, "warning: skipping corrupt outcome file {}: {e}", f.display());
            }
        }
    }
    if outcomes.is_empty() {
        return Err(usage(format!("no outcomes in {}", a.dir.display())));
    }
    let saved = fs::read_to_string(a.dir.join(REPORT_FILE)).ok().and_then(|t| parse_machine_report(&t).ok());
    let up_limit = a.up_limit.or(saved.as_ref().map(|r| r.up_limit)).unwrap_or(DEFAULT_UP_LIMIT);
    let include_failed = a.include_failed.or(saved.as_ref().map(|r| r.include_failed)).unwrap_or(false);
    let report = MetricsReport::from_outcomes(&outcomes, up_limit, include_failed).map_err(usage)?;
    let _ = out.write_all(emit_report(&report, report_format(a.format)).as_bytes());
    Ok(EXIT_OK)
}
