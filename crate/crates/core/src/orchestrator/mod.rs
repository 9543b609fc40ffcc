//! Per-case state machine running the translate/repair and optimize loops.

mod task;

use std::fmt;
use std::path::PathBuf;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::agents::{LlmClient, Purpose, SamplingParams, DEFAULT_FEEDBACK_BUDGET};
use crate::executors::{Backend, CompileResult, PerfResult, TestResult};
use crate::liveness::PressureReport;
use crate::rational;
use crate::rvv_front::FootprintMode;

pub use task::{attempt_log_path, run_corpus, run_task, write_outcome, TaskError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FsmState {
    Init,
    Translate,
    Compile,
    FuncTest,
    BaselinePerf,
    Optimize,
    OptCompile,
    OptTest,
    OptPerf,
    SelectBest,
    Done,
    Failed,
}

impl FsmState {
    /// The complete transition relation.
    pub fn can_go_to(self, to: FsmState) -> bool {
        use FsmState::*;
        matches!(
            (self, to),
            (Init, Translate)
                // a reply without code goes straight back for another try
                | (Translate, Compile | Translate | Failed)
                | (Compile, FuncTest | Translate | Failed)
                | (FuncTest, BaselinePerf | Translate | Failed)
                | (BaselinePerf, Optimize)
                | (Optimize, OptCompile | Optimize | SelectBest)
                | (OptCompile, OptTest | Optimize | SelectBest)
                | (OptTest, OptPerf | Optimize | SelectBest)
                | (OptPerf, Optimize | SelectBest)
                | (SelectBest, Done)
        )
    }

    pub fn is_terminal(self) -> bool {
        matches!(self, FsmState::Done | FsmState::Failed)
    }
}

impl fmt::Display for FsmState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budgets {
    pub translate_max: u32,
    pub optimize_max: u32,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets { translate_max: 10, optimize_max: 10 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Translation,
    Optimization,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompileSummary {
    pub success: bool,
    pub diagnostics: String,
}

impl From<&CompileResult> for CompileSummary {
    fn from(c: &CompileResult) -> Self {
        CompileSummary { success: c.success, diagnostics: c.diagnostics.clone() }
    }
}

/// One LLM round trip and whatever validation it reached.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Attempt {
    pub case_id: String,
    /// 1-based within its phase.
    pub attempt_no: u32,
    pub phase: Phase,
    pub purpose: Purpose,
    pub prompt_digest: String,
    pub response_digest: Option<String>,
    pub code: Option<String>,
    pub compile: Option<CompileSummary>,
    pub test: Option<TestResult>,
    pub perf: Option<PerfResult>,
    /// Set when the attempt stopped before validation or perf failed.
    pub error: Option<String>,
    pub started_ms: u64,
    pub finished_ms: u64,
}

impl Attempt {
    pub fn passed(&self) -> bool {
        self.test.as_ref().is_some_and(|t| t.all_passed)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Variant {
    /// 0 for the first passing translation, then one per passing optimization.
    pub variant_id: u32,
    pub code: String,
    pub pressure: Option<PressureReport>,
    /// Why `pressure` is missing, if it is.
    pub analysis_error: Option<String>,
    pub perf: Option<PerfResult>,
    pub perf_error: Option<String>,
    pub passed_all_tests: bool,
}

impl Variant {
    pub fn speedup(&self) -> Option<Ratio<u64>> {
        self.perf.as_ref().map(|p| p.speedup)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskOutcome {
    pub case_id: String,
    pub passed: bool,
    /// Translation calls up to and including the first passing candidate;
    /// the translation budget when the task failed.
    pub attempts_used: u32,
    pub best_variant: Option<Variant>,
    pub variants: Vec<Variant>,
    pub all_attempts: Vec<Attempt>,
    #[serde(with = "rational::option", default)]
    pub final_speedup: Option<Ratio<u64>>,
    pub trace: Vec<FsmState>,
    pub llm_calls: u32,
    pub failure: Option<String>,
}

/// Best passing variant: highest speedup, measured beats unmeasured, and
/// the lower id wins ties. `None` only when nothing passed.
pub fn select_best(variants: &[Variant]) -> Option<&Variant> {
    variants.iter().filter(|v| v.passed_all_tests).fold(None, |best: Option<&Variant>, v| match best {
        None => Some(v),
        Some(b) => {
            let better = match (v.speedup(), b.speedup()) {
                (Some(x), Some(y)) => x > y || (x == y && v.variant_id < b.variant_id),
                (Some(_), None) => true,
                (None, Some(_)) => false,
                (None, None) => v.variant_id < b.variant_id,
            };
            Some(if better { v } else { b })
        }
    })
}

/// Everything a task needs besides the case itself.
pub struct TaskDeps<'a> {
    pub llm: &'a dyn LlmClient,
    pub backend: &'a dyn Backend,
    pub budgets: Budgets,
    pub sampling: SamplingParams,
    pub mode: FootprintMode,
    /// Root of `work/<case>/...`.
    pub work_dir: PathBuf,
    pub feedback_budget: usize,
}

impl<'a> TaskDeps<'a> {
    pub fn new(llm: &'a dyn LlmClient, backend: &'a dyn Backend, work_dir: impl Into<PathBuf>) -> Self {
        TaskDeps {
            llm,
            backend,
            budgets: Budgets::default(),
            sampling: SamplingParams::default(),
            mode: FootprintMode::default(),
            work_dir: work_dir.into(),
            feedback_budget: DEFAULT_FEEDBACK_BUDGET,
        }
    }
}
