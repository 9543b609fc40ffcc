use std::fs::{self, File};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use log::{debug, info, warn};

use super::{select_best, Attempt, CompileSummary, FsmState, Phase, TaskDeps, TaskOutcome, Variant};
use crate::agents::{
    build_optimize_prompt, build_repair_prompt, build_translate_prompt, extract_code, sha256_hex, CallContext,
    Feedback, PromptBundle, PromptError,
};
use crate::corpus::ValidatedCase;
use crate::executors::{ExecError, Harness, PerfResult, Scratch};
use crate::liveness::{analyze_function, PressureReport};
use crate::rvv_front::parse_function;

const NO_CODE: &str = "no code emitted: the reply contained no C code block";

#[derive(Debug, thiserror::Error)]
pub enum TaskError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("internal error in {case}: {message}")]
    Internal { case: String, message: String },
}

pub fn attempt_log_path(work_dir: &Path, case_id: &str) -> PathBuf {
    work_dir.join(case_id).join("log").join("attempts.jsonl")
}

/// Writes `<out_dir>/<case>.json`.
pub fn write_outcome(out_dir: &Path, outcome: &TaskOutcome) -> std::io::Result<PathBuf> {
    fs::create_dir_all(out_dir)?;
    let path = out_dir.join(format!("{}.json", outcome.case_id));
    let json = serde_json::to_string_pretty(outcome).map_err(std::io::Error::other)?;
    fs::write(&path, json + "\n")?;
    Ok(path)
}

fn now_ms() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis() as u64).unwrap_or(0)
}

struct Run<'a, 'd> {
    case: &'a ValidatedCase,
    deps: &'a TaskDeps<'d>,
    trace: Vec<FsmState>,
    attempts: Vec<Attempt>,
    variants: Vec<Variant>,
    llm_calls: u32,
    log: File,
    /// Native perf binary, built on first use.
    native: Option<Result<PathBuf, String>>,
}

enum Reply {
    Code(String),
    NoCode,
    LlmFailed,
}

impl<'a, 'd> Run<'a, 'd> {
    fn internal(&self, message: impl Into<String>) -> TaskError {
        TaskError::Internal { case: self.case.id().to_string(), message: message.into() }
    }

    fn exec_err(&self, e: ExecError) -> TaskError {
        if e.is_config() {
            TaskError::Config(e.to_string())
        } else {
            self.internal(e.to_string())
        }
    }

    fn go(&mut self, to: FsmState) -> Result<(), TaskError> {
        let from = *self.trace.last().expect("trace starts at Init");
        if !from.can_go_to(to) {
            return Err(self.internal(format!("illegal transition {from} -> {to}")));
        }
        debug!("{}: {from} -> {to}", self.case.id());
        self.trace.push(to);
        Ok(())
    }

    fn record(&mut self, mut a: Attempt) -> Result<(), TaskError> {
        a.finished_ms = now_ms();
        let line = serde_json::to_string(&a).map_err(|e| self.internal(e.to_string()))?;
        writeln!(self.log, "{line}").map_err(|e| self.internal(format!("writing attempt log: {e}")))?;
        self.attempts.push(a);
        Ok(())
    }

    fn new_attempt(&self, phase: Phase, attempt_no: u32, prompt: &PromptBundle) -> Attempt {
        Attempt {
            case_id: self.case.id().to_string(),
            attempt_no,
            phase,
            purpose: prompt.purpose,
            prompt_digest: prompt.context_digest.clone(),
            response_digest: None,
            code: None,
            compile: None,
            test: None,
            perf: None,
            error: None,
            started_ms: now_ms(),
            finished_ms: 0,
        }
    }

    fn ask(&mut self, prompt: &PromptBundle, attempt: &mut Attempt) -> Reply {
        let level = match attempt.phase {
            Phase::Translation => log::Level::Warn,
            Phase::Optimization => log::Level::Info,
        };
        let ctx = CallContext { case_id: self.case.id().to_string(), seq: self.llm_calls as usize };
        self.llm_calls += 1;
        match self.deps.llm.complete(&ctx, &prompt.messages, &self.deps.sampling) {
            Err(e) => {
                log::log!(level, "{}: LLM call failed: {e}", self.case.id());
                attempt.error = Some(format!("LLM call failed: {e}"));
                Reply::LlmFailed
            }
            Ok(text) => {
                attempt.response_digest = Some(sha256_hex(&[text.as_bytes()]));
                match extract_code(&text) {
                    Ok(code) => {
                        attempt.code = Some(code.clone());
                        Reply::Code(code)
                    }
                    Err(_) => {
                        attempt.error = Some(NO_CODE.to_string());
                        Reply::NoCode
                    }
                }
            }
        }
    }

    fn native_binary(&mut self) -> Result<Result<PathBuf, String>, TaskError> {
        if let Some(n) = &self.native {
            return Ok(n.clone());
        }
        let scratch = Scratch::new(&self.deps.work_dir, self.case.id(), "native");
        let built = match self.deps.backend.compile(&self.case.native_text, self.case, Harness::Perf, &scratch) {
            Ok(c) if c.success => c.artifact_path.ok_or_else(|| "native build produced no binary".to_string()),
            Ok(c) => Err(format!("native reference failed to compile: {}", c.diagnostics.trim_end())),
            Err(e) if e.is_config() => return Err(self.exec_err(e)),
            Err(e) => Err(format!("native reference build failed: {e}")),
        };
        self.native = Some(built.clone());
        Ok(built)
    }

    /// Builds the perf harness for a passing candidate and compares it with
    /// the native reference. Perf problems never affect correctness.
    fn measure(&mut self, code: &str, scratch: &Scratch) -> Result<Result<PerfResult, String>, TaskError> {
        let native = match self.native_binary()? {
            Ok(p) => p,
            Err(e) => return Ok(Err(e)),
        };
        let built = match self.deps.backend.compile(code, self.case, Harness::Perf, scratch) {
            Ok(c) if c.success => c.artifact_path,
            Ok(c) => return Ok(Err(format!("perf harness failed to compile: {}", c.diagnostics.trim_end()))),
            Err(e) if e.is_config() => return Err(self.exec_err(e)),
            Err(e) => return Ok(Err(e.to_string())),
        };
        let Some(bin) = built else { return Ok(Err("perf build produced no binary".into())) };
        match self.deps.backend.run_perf(&bin, &native) {
            Ok(p) => Ok(Ok(p)),
            Err(e) if e.is_config() => Err(self.exec_err(e)),
            Err(e) => Ok(Err(e.to_string())),
        }
    }

    fn analyze(&self, code: &str) -> Result<PressureReport, String> {
        parse_function(code, &self.case.manifest.function_signature)
            .map(|ir| analyze_function(&ir, self.deps.mode).report)
            .map_err(|e| e.to_string())
    }

    fn make_variant(&mut self, code: String, perf: Result<PerfResult, String>) -> Variant {
        let (pressure, analysis_error) = match self.analyze(&code) {
            Ok(r) => (Some(r), None),
            Err(e) => {
                warn!("{}: pressure analysis failed: {e}", self.case.id());
                (None, Some(e))
            }
        };
        let (perf, perf_error) = match perf {
            Ok(p) => (Some(p), None),
            Err(e) => (None, Some(e)),
        };
        Variant {
            variant_id: self.variants.len() as u32,
            code,
            pressure,
            analysis_error,
            perf,
            perf_error,
            passed_all_tests: true,
        }
    }

    fn prompt_err(&self, e: PromptError) -> TaskError {
        self.internal(format!("building prompt: {e}"))
    }

    /// Returns the first passing code and the attempt number that produced it.
    fn translate(&mut self) -> Result<Option<(String, u32)>, TaskError> {
        let budget = self.deps.budgets.translate_max;
        let mut previous: Option<(String, Feedback)> = None;
        for k in 1..=budget {
            self.go(FsmState::Translate)?;
            let prompt = match &previous {
                None => build_translate_prompt(self.case),
                Some((code, fb)) => build_repair_prompt(self.case, code, fb, self.deps.feedback_budget),
            }
            .map_err(|e| self.prompt_err(e))?;
            let mut attempt = self.new_attempt(Phase::Translation, k, &prompt);
            let code = match self.ask(&prompt, &mut attempt) {
                Reply::LlmFailed => {
                    self.record(attempt)?;
                    return Ok(None);
                }
                Reply::NoCode => {
                    self.record(attempt)?;
                    previous = Some((String::new(), Feedback::compile(NO_CODE)));
                    continue;
                }
                Reply::Code(c) => c,
            };

            self.go(FsmState::Compile)?;
            let scratch = Scratch::new(&self.deps.work_dir, self.case.id(), &format!("t{k:02}"));
            let compiled = self
                .deps
                .backend
                .compile(&code, self.case, Harness::Functional, &scratch)
                .map_err(|e| self.exec_err(e))?;
            attempt.compile = Some(CompileSummary::from(&compiled));
            let artifact = match (compiled.success, compiled.artifact_path) {
                (true, Some(p)) => p,
                _ => {
                    self.record(attempt)?;
                    previous = Some((code, Feedback::compile(compiled.diagnostics)));
                    continue;
                }
            };

            self.go(FsmState::FuncTest)?;
            let tests = self.deps.backend.run_functional_tests(&artifact).map_err(|e| self.exec_err(e))?;
            attempt.test = Some(tests.clone());
            if !tests.all_passed {
                self.record(attempt)?;
                previous = Some((code, Feedback::test(tests.failure_report())));
                continue;
            }

            // baseline perf belongs to the attempt that produced v0
            self.go(FsmState::BaselinePerf)?;
            let perf = self.measure(&code, &scratch)?;
            match &perf {
                Ok(p) => attempt.perf = Some(p.clone()),
                Err(e) => attempt.error = Some(format!("baseline perf unavailable: {e}")),
            }
            self.record(attempt)?;
            let v0 = self.make_variant(code.clone(), perf);
            self.variants.push(v0);
            return Ok(Some((code, k)));
        }
        Ok(None)
    }

    fn optimize(&mut self) -> Result<(), TaskError> {
        let mut last_failure: Option<Feedback> = None;
        for j in 1..=self.deps.budgets.optimize_max {
            self.go(FsmState::Optimize)?;
            let best = select_best(&self.variants).cloned().ok_or_else(|| self.internal("no passing variant"))?;
            let pressure = match (&best.pressure, &best.analysis_error) {
                (Some(r), _) => Ok(r),
                (None, e) => Err(e.as_deref().unwrap_or("analysis unavailable")),
            };
            let prompt =
                build_optimize_prompt(self.case, &best.code, pressure, best.perf.as_ref(), last_failure.as_ref())
                    .map_err(|e| self.prompt_err(e))?;
            let mut attempt = self.new_attempt(Phase::Optimization, j, &prompt);
            let code = match self.ask(&prompt, &mut attempt) {
                Reply::LlmFailed => {
                    self.record(attempt)?;
                    return Ok(());
                }
                Reply::NoCode => {
                    self.record(attempt)?;
                    last_failure = Some(Feedback::compile(NO_CODE));
                    continue;
                }
                Reply::Code(c) => c,
            };

            self.go(FsmState::OptCompile)?;
            let scratch = Scratch::new(&self.deps.work_dir, self.case.id(), &format!("o{j:02}"));
            let compiled = self
                .deps
                .backend
                .compile(&code, self.case, Harness::Functional, &scratch)
                .map_err(|e| self.exec_err(e))?;
            attempt.compile = Some(CompileSummary::from(&compiled));
            let artifact = match (compiled.success, compiled.artifact_path) {
                (true, Some(p)) => p,
                _ => {
                    self.record(attempt)?;
                    last_failure = Some(Feedback::compile(compiled.diagnostics));
                    continue;
                }
            };

            self.go(FsmState::OptTest)?;
            let tests = self.deps.backend.run_functional_tests(&artifact).map_err(|e| self.exec_err(e))?;
            attempt.test = Some(tests.clone());
            if !tests.all_passed {
                self.record(attempt)?;
                last_failure = Some(Feedback::test(tests.failure_report()));
                continue;
            }

            self.go(FsmState::OptPerf)?;
            let perf = self.measure(&code, &scratch)?;
            match &perf {
                Ok(p) => attempt.perf = Some(p.clone()),
                Err(e) => attempt.error = Some(format!("perf unavailable: {e}")),
            }
            self.record(attempt)?;
            let v = self.make_variant(code, perf);
            self.variants.push(v);
            last_failure = None;
        }
        Ok(())
    }
}

/// Drives one case through translation, repair and optimization.
///
/// Translation failures are reported through `TaskOutcome::passed`; only
/// configuration and internal errors surface as `Err`.
pub fn run_task(case: &ValidatedCase, deps: &TaskDeps<'_>) -> Result<TaskOutcome, TaskError> {
    let b = deps.budgets;
    if b.translate_max == 0 || b.optimize_max == 0 {
        return Err(TaskError::Config("budgets must be at least 1".into()));
    }
    let log_path = attempt_log_path(&deps.work_dir, case.id());
    let open = || -> std::io::Result<File> {
        fs::create_dir_all(log_path.parent().expect("log path has a parent"))?;
        File::create(&log_path)
    };
    let log = open().map_err(|e| TaskError::Internal {
        case: case.id().to_string(),
        message: format!("opening {}: {e}", log_path.display()),
    })?;

    let mut run = Run {
        case,
        deps,
        trace: vec![FsmState::Init],
        attempts: Vec::new(),
        variants: Vec::new(),
        llm_calls: 0,
        log,
        native: None,
    };

    let Some((_, attempts_used)) = run.translate()? else {
        run.go(FsmState::Failed)?;
        let failure = run
            .attempts
            .last()
            .and_then(|a| a.error.clone().or_else(|| a.compile.as_ref().filter(|c| !c.success).map(|c| c.diagnostics.clone())))
            .or_else(|| run.attempts.last().and_then(|a| a.test.as_ref()).map(|t| t.failure_report()));
        info!("{}: failed after {} LLM calls", case.id(), run.llm_calls);
        return Ok(TaskOutcome {
            case_id: case.id().to_string(),
            passed: false,
            attempts_used: b.translate_max,
            best_variant: None,
            variants: run.variants,
            all_attempts: run.attempts,
            final_speedup: None,
            trace: run.trace,
            llm_calls: run.llm_calls,
            failure,
        });
    };

    run.optimize()?;
    run.go(FsmState::SelectBest)?;
    let best = select_best(&run.variants).cloned();
    run.go(FsmState::Done)?;
    let final_speedup = best.as_ref().and_then(Variant::speedup);
    info!("{}: passed on attempt {attempts_used}, {} variants", case.id(), run.variants.len());
    Ok(TaskOutcome {
        case_id: case.id().to_string(),
        passed: best.is_some(),
        attempts_used,
        best_variant: best,
        variants: run.variants,
        all_attempts: run.attempts,
        final_speedup,
        trace: run.trace,
        llm_calls: run.llm_calls,
        failure: None,
    })
}

/// Runs every case, at most `parallelism` at a time. Results keep the order
/// of `cases`.
pub fn run_corpus(
    cases: &[ValidatedCase],
    deps: &TaskDeps<'_>,
    parallelism: usize,
) -> Vec<Result<TaskOutcome, TaskError>> {
    #[cfg(feature = "parallel")]
    if parallelism > 1 {
        use rayon::prelude::*;
        match rayon::ThreadPoolBuilder::new().num_threads(parallelism).build() {
            Ok(pool) => return pool.install(|| cases.par_iter().map(|c| run_task(c, deps)).collect()),
            Err(e) => warn!("thread pool unavailable ({e}); running sequentially"),
        }
    }
    #[cfg(not(feature = "parallel"))]
    let _ = parallelism;
    cases.iter().map(|c| run_task(c, deps)).collect()
}
