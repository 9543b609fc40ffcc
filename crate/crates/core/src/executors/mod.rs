//! Compile, functional-test and benchmark candidates through external tools.
//!
//! Two backends implement [`Backend`]: [`ProcessBackend`] spawns the
//! configured cross compiler and emulator, [`MockBackend`] fakes both from
//! directives embedded in the candidate source so the pipeline can run
//! without a toolchain.

mod mock;
mod process;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::corpus::ValidatedCase;
use crate::rational;

pub use mock::{MockBackend, MockDirectives};
pub use process::ProcessBackend;

/// Bytes of output kept from each run.
pub const OUTPUT_TAIL_BYTES: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ToolchainConfig {
    /// Placeholders: `{cc}`, `{flags}`, `{inputs}`, `{output}`.
    pub compile_cmd_template: String,
    pub cc: String,
    pub flags: String,
    /// Placeholders: `{runner}`, `{vlen}`, `{binary}`.
    pub runner_cmd_template: String,
    pub runner: String,
    pub vlens: Vec<u32>,
    pub compile_timeout_s: u64,
    pub run_timeout_s: u64,
    pub perf_runs: u32,
}

impl Default for ToolchainConfig {
    fn default() -> Self {
        ToolchainConfig {
            compile_cmd_template: "{cc} {flags} {inputs} -o {output} -lm".into(),
            cc: "riscv64-linux-gnu-gcc".into(),
            flags: "-march=rv64gcv -O3".into(),
            runner_cmd_template: "{runner} -L /usr/riscv64-linux-gnu -cpu rv64,v=true,vlen={vlen} {binary}".into(),
            runner: "qemu-riscv64".into(),
            vlens: vec![128, 256],
            compile_timeout_s: 120,
            run_timeout_s: 60,
            perf_runs: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConfigError {
    #[error("no VLEN configured")]
    NoVlens,
    #[error("VLEN {0} is not a power of two in [32, 65536]")]
    BadVlen(u32),
    #[error("{0} must be at least 1")]
    Zero(&'static str),
    #[error("{what} `{name}` not found on PATH")]
    MissingTool { what: &'static str, name: String },
    #[error("template `{template}` lacks the {placeholder} placeholder")]
    Template { template: String, placeholder: &'static str },
}

impl ToolchainConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.vlens.is_empty() {
            return Err(ConfigError::NoVlens);
        }
        if let Some(&v) = self.vlens.iter().find(|&&v| !v.is_power_of_two() || !(32..=65536).contains(&v)) {
            return Err(ConfigError::BadVlen(v));
        }
        for (value, what) in [
            (self.compile_timeout_s, "compile timeout"),
            (self.run_timeout_s, "run timeout"),
            (u64::from(self.perf_runs), "perf run count"),
        ] {
            if value == 0 {
                return Err(ConfigError::Zero(what));
            }
        }
        for (template, placeholder) in [
            (&self.compile_cmd_template, "{inputs}"),
            (&self.compile_cmd_template, "{output}"),
            (&self.runner_cmd_template, "{binary}"),
        ] {
            if !template.contains(placeholder) {
                return Err(ConfigError::Template { template: template.clone(), placeholder });
            }
        }
        Ok(())
    }

    /// Checks that the compiler and, when the runner template uses one, the
    /// emulator can be found.
    pub fn probe(&self) -> Result<(), ConfigError> {
        self.validate()?;
        let cc = self.compile_command(&[], Path::new("out")).remove(0);
        if which::which(&cc).is_err() {
            return Err(ConfigError::MissingTool { what: "compiler", name: cc });
        }
        // a template starting with `{binary}` runs on the host, no emulator needed
        let runner = self.run_command(self.largest_vlen(), Path::new("{binary}")).remove(0);
        if runner != "{binary}" && which::which(&runner).is_err() {
            return Err(ConfigError::MissingTool { what: "emulator", name: runner });
        }
        Ok(())
    }

    pub fn largest_vlen(&self) -> u32 {
        self.vlens.iter().copied().max().unwrap_or(0)
    }

    pub fn compile_command(&self, inputs: &[&Path], output: &Path) -> Vec<String> {
        expand(&self.compile_cmd_template, |key| match key {
            "cc" => Some(vec![self.cc.clone()]),
            "flags" => Some(self.flags.split_whitespace().map(String::from).collect()),
            "inputs" => Some(inputs.iter().map(|p| p.display().to_string()).collect()),
            "output" => Some(vec![output.display().to_string()]),
            _ => None,
        })
    }

    pub fn run_command(&self, vlen: u32, binary: &Path) -> Vec<String> {
        expand(&self.runner_cmd_template, |key| match key {
            "runner" => Some(vec![self.runner.clone()]),
            "vlen" => Some(vec![vlen.to_string()]),
            "binary" => Some(vec![binary.display().to_string()]),
            _ => None,
        })
    }
}

/// Splits a template on whitespace and substitutes placeholders. A token that
/// is exactly one placeholder may expand to several arguments (or none);
/// placeholders embedded in a larger token are joined with spaces.
fn expand(template: &str, lookup: impl Fn(&str) -> Option<Vec<String>>) -> Vec<String> {
    let mut args = Vec::new();
    for token in template.split_whitespace() {
        if let Some(key) = token.strip_prefix('{').and_then(|t| t.strip_suffix('}')) {
            if let Some(values) = lookup(key) {
                args.extend(values);
                continue;
            }
        }
        let mut out = String::new();
        let mut rest = token;
        while let Some(start) = rest.find('{') {
            let Some(len) = rest[start..].find('}') else { break };
            let key = &rest[start + 1..start + len];
            out.push_str(&rest[..start]);
            match lookup(key) {
                Some(values) => out.push_str(&values.join(" ")),
                None => out.push_str(&rest[start..=start + len]),
            }
            rest = &rest[start + len + 1..];
        }
        out.push_str(rest);
        args.push(out);
    }
    args
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Harness {
    Functional,
    Perf,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompileResult {
    pub success: bool,
    pub diagnostics: String,
    pub artifact_path: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VlenRun {
    pub passed: bool,
    pub output_tail: String,
    /// `None` when the process was killed or died from a signal.
    pub exit_code: Option<i32>,
    pub timed_out: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestResult {
    pub all_passed: bool,
    pub per_vlen: BTreeMap<u32, VlenRun>,
}

impl TestResult {
    pub fn from_runs(per_vlen: BTreeMap<u32, VlenRun>) -> Self {
        TestResult {
            all_passed: !per_vlen.is_empty() && per_vlen.values().all(|r| r.passed),
            per_vlen,
        }
    }

    /// Failure report naming each failing VLEN, for repair prompts.
    pub fn failure_report(&self) -> String {
        let mut out = String::new();
        for (vlen, run) in self.per_vlen.iter().filter(|(_, r)| !r.passed) {
            let why = if run.timed_out {
                "timeout".to_string()
            } else {
                match run.exit_code {
                    Some(code) => format!("exit code {code}"),
                    None => "killed by a signal".to_string(),
                }
            };
            out.push_str(&format!("functional test failed at VLEN={vlen} ({why})\n"));
            if !run.output_tail.trim().is_empty() {
                out.push_str("output:\n");
                out.push_str(run.output_tail.trim_end());
                out.push('\n');
            }
        }
        let passed: Vec<String> = self.per_vlen.iter().filter(|(_, r)| r.passed).map(|(v, _)| v.to_string()).collect();
        if !passed.is_empty() {
            out.push_str(&format!("passed at VLEN={}\n", passed.join(", ")));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerfResult {
    pub translated_cost_ns: u64,
    pub native_cost_ns: u64,
    /// native / translated
    #[serde(with = "rational")]
    pub speedup: Ratio<u64>,
    pub runs: u32,
    pub vlen: u32,
}

impl PerfResult {
    pub fn new(native_cost_ns: u64, translated_cost_ns: u64, runs: u32, vlen: u32) -> Result<Self, ExecError> {
        Ok(PerfResult {
            speedup: speedup(native_cost_ns, translated_cost_ns)?,
            translated_cost_ns,
            native_cost_ns,
            runs,
            vlen,
        })
    }
}

/// Cost ratio `native / translated`.
pub fn speedup(native_cost_ns: u64, translated_cost_ns: u64) -> Result<Ratio<u64>, ExecError> {
    if native_cost_ns == 0 || translated_cost_ns == 0 {
        return Err(ExecError::NonPositiveCost);
    }
    Ok(Ratio::new(native_cost_ns, translated_cost_ns))
}

/// Median of the samples; the mean of the two middle values for even counts.
pub fn median(samples: &[u64]) -> Option<u64> {
    if samples.is_empty() {
        return None;
    }
    let mut s = samples.to_vec();
    s.sort_unstable();
    let mid = s.len() / 2;
    Some(if s.len() % 2 == 1 { s[mid] } else { s[mid - 1] / 2 + s[mid] / 2 + (s[mid - 1] % 2 + s[mid] % 2) / 2 })
}

/// Parses the nanosecond cost from the final non-empty stdout line.
pub fn parse_cost_line(stdout: &str) -> Option<u64> {
    let last = stdout.lines().rev().find(|l| !l.trim().is_empty())?.trim();
    if last.is_empty() || !last.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    last.parse().ok()
}

pub fn output_tail(bytes: &[u8]) -> String {
    let start = bytes.len().saturating_sub(OUTPUT_TAIL_BYTES);
    String::from_utf8_lossy(&bytes[start..]).into_owned()
}

#[derive(Debug, thiserror::Error)]
pub enum ExecError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
    #[error("benchmark output has no nanosecond cost on its last line: {tail:?}")]
    NoCostLine { tail: String },
    #[error("benchmark {what} failed: {detail}")]
    PerfRun { what: &'static str, detail: String },
    #[error("costs must be positive")]
    NonPositiveCost,
}

impl ExecError {
    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        ExecError::Io { context: context.into(), source }
    }

    /// Configuration problems abort a run instead of failing one attempt.
    pub fn is_config(&self) -> bool {
        matches!(self, ExecError::Config(_))
    }
}

/// Where one compilation happens: `work/<case>/<attempt>/`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scratch {
    pub dir: PathBuf,
}

impl Scratch {
    pub fn new(work_dir: &Path, case_id: &str, attempt: &str) -> Self {
        Scratch { dir: work_dir.join(case_id).join(attempt) }
    }

    pub fn create(&self) -> Result<(), ExecError> {
        std::fs::create_dir_all(&self.dir).map_err(|e| ExecError::io(format!("creating {}", self.dir.display()), e))
    }
}

pub trait Backend: Send + Sync {
    /// Writes `candidate` into the scratch dir and builds it together with the
    /// selected harness of `case`.
    fn compile(
        &self,
        candidate: &str,
        case: &ValidatedCase,
        harness: Harness,
        scratch: &Scratch,
    ) -> Result<CompileResult, ExecError>;

    /// Runs the functional binary once per configured VLEN.
    fn run_functional_tests(&self, artifact: &Path) -> Result<TestResult, ExecError>;

    /// Benchmarks both binaries at the largest VLEN and compares medians.
    fn run_perf(&self, translated: &Path, native: &Path) -> Result<PerfResult, ExecError>;

    fn vlens(&self) -> Vec<u32>;

    fn describe(&self) -> String;
}
