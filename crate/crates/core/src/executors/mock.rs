use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use super::{
    Backend, CompileResult, ExecError, Harness, PerfResult, Scratch, TestResult, ToolchainConfig, VlenRun,
};
use crate::corpus::{squeeze_c, ValidatedCase};
use crate::rvv_front::{parse_function_named, parse_vector_type, FootprintMode, Lmul};

/// Directives a candidate may carry in comments, one per line:
///
/// ```text
/// // mock:compile-error <message>
/// // mock:test-fail            (every VLEN)
/// // mock:test-fail=256,512
/// // mock:hang                 (functional run times out)
/// // mock:cost=59000           (benchmark nanoseconds)
/// // mock:no-perf              (benchmark prints no cost line)
/// ```
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MockDirectives {
    pub compile_error: Option<String>,
    pub test_fail: Option<Vec<u32>>,
    pub hang: bool,
    pub cost: Option<u64>,
    pub no_perf: bool,
}

impl MockDirectives {
    pub fn parse(source: &str) -> Self {
        let mut d = MockDirectives::default();
        for line in source.lines() {
            let Some(rest) = line.trim().strip_prefix("//").map(str::trim) else { continue };
            let Some(directive) = rest.strip_prefix("mock:") else { continue };
            let (key, value) = match directive.split_once(['=', ' ']) {
                Some((k, v)) => (k.trim(), Some(v.trim())),
                None => (directive.trim(), None),
            };
            match key {
                "compile-error" => {
                    d.compile_error = Some(value.filter(|v| !v.is_empty()).unwrap_or("error: mock compile failure").into())
                }
                "test-fail" => {
                    d.test_fail = Some(value.map_or_else(Vec::new, |v| v.split(',').filter_map(|x| x.trim().parse().ok()).collect()))
                }
                "hang" => d.hang = true,
                "cost" => d.cost = value.and_then(|v| v.parse().ok()),
                "no-perf" => d.no_perf = true,
                // written by the mock compiler itself
                "function" => {}
                _ => log::warn!("unknown mock directive `{directive}`"),
            }
        }
        d
    }
}

/// Toolchain stand-in. "Binaries" are copies of the candidate source, so the
/// run steps can read the directives back from the artifact path.
#[derive(Debug, Clone)]
pub struct MockBackend {
    pub vlens: Vec<u32>,
    pub runs: u32,
    /// Overrides the modeled cost of the native reference.
    pub native_cost: Option<u64>,
}

impl Default for MockBackend {
    fn default() -> Self {
        let c = ToolchainConfig::default();
        MockBackend { vlens: c.vlens, runs: c.perf_runs, native_cost: None }
    }
}

impl MockBackend {
    pub fn with_native_cost(mut self, ns: u64) -> Self {
        self.native_cost = Some(ns);
        self
    }

    fn read(path: &Path) -> Result<String, ExecError> {
        fs::read_to_string(path).map_err(|e| ExecError::io(format!("reading {}", path.display()), e))
    }
}

/// Cost model used when a source carries no `mock:cost`: wider register
/// groups amortize more work per instruction, predicted spills double the cost.
pub fn modeled_cost(source: &str, function: Option<&str>) -> u64 {
    let widest = source
        .split(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
        .filter_map(parse_vector_type)
        .map(|t| t.lmul())
        .max()
        .unwrap_or(Lmul::F8);
    let base: u64 = match widest {
        Lmul::M8 => 25_000,
        Lmul::M4 => 40_000,
        Lmul::M2 => 60_000,
        Lmul::M1 => 100_000,
        _ => 400_000,
    };
    let spills = function
        .and_then(|f| parse_function_named(source, f).ok())
        .map(|ir| crate::liveness::analyze_function(&ir, FootprintMode::Physical).report.spills_predicted)
        .unwrap_or(false);
    if spills {
        base * 2
    } else {
        base
    }
}

impl Backend for MockBackend {
    fn compile(
        &self,
        candidate: &str,
        case: &ValidatedCase,
        harness: Harness,
        scratch: &Scratch,
    ) -> Result<CompileResult, ExecError> {
        scratch.create()?;
        let write = |name: &str, text: &str| {
            let p = scratch.dir.join(name);
            fs::write(&p, text).map_err(|e| ExecError::io(format!("writing {}", p.display()), e)).map(|_| p)
        };
        write("candidate.c", candidate)?;
        let d = MockDirectives::parse(candidate);
        let failure = if let Some(msg) = d.compile_error {
            Some(msg)
        } else if !squeeze_c(candidate).contains(&squeeze_c(&case.manifest.function_signature)) {
            Some(format!("undefined reference to `{}`", case.function_name()))
        } else {
            None
        };
        if let Some(diagnostics) = failure {
            write("stderr.txt", &diagnostics)?;
            return Ok(CompileResult { success: false, diagnostics, artifact_path: None });
        }
        let name = match harness {
            Harness::Functional => "bin",
            Harness::Perf => "bin-perf",
        };
        let mut artifact = candidate.to_string();
        // mock artifacts remember which function they hold for the cost model
        artifact.push_str(&format!("\n// mock:function {}\n", case.function_name()));
        let bin = write(name, &artifact)?;
        Ok(CompileResult { success: true, diagnostics: String::new(), artifact_path: Some(bin) })
    }

    fn run_functional_tests(&self, artifact: &Path) -> Result<TestResult, ExecError> {
        let d = MockDirectives::parse(&Self::read(artifact)?);
        let per_vlen: BTreeMap<u32, VlenRun> = self
            .vlens
            .iter()
            .map(|&vlen| {
                let fails = d.test_fail.as_ref().is_some_and(|v| v.is_empty() || v.contains(&vlen));
                let run = if d.hang {
                    VlenRun { passed: false, output_tail: "timeout".into(), exit_code: None, timed_out: true }
                } else if fails {
                    VlenRun {
                        passed: false,
                        output_tail: format!("FAIL mismatch at VLEN={vlen}\n"),
                        exit_code: Some(1),
                        timed_out: false,
                    }
                } else {
                    VlenRun { passed: true, output_tail: "PASS\n".into(), exit_code: Some(0), timed_out: false }
                };
                (vlen, run)
            })
            .collect();
        Ok(TestResult::from_runs(per_vlen))
    }

    fn run_perf(&self, translated: &Path, native: &Path) -> Result<PerfResult, ExecError> {
        let cost = |text: &str, is_native: bool| -> Result<u64, ExecError> {
            let d = MockDirectives::parse(text);
            if d.no_perf {
                return Err(ExecError::NoCostLine { tail: "checksum 0\n".into() });
            }
            if is_native {
                if let Some(c) = self.native_cost {
                    return Ok(c);
                }
            }
            Ok(d.cost.unwrap_or_else(|| {
                let function = text.lines().find_map(|l| l.trim().strip_prefix("// mock:function ")).map(str::trim);
                modeled_cost(text, function)
            }))
        };
        let t = cost(&Self::read(translated)?, false)?;
        let n = cost(&Self::read(native)?, true)?;
        let vlen = self.vlens.iter().copied().max().unwrap_or(0);
        PerfResult::new(n, t, self.runs, vlen)
    }

    fn vlens(&self) -> Vec<u32> {
        self.vlens.clone()
    }

    fn describe(&self) -> String {
        "mock toolchain".into()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn directives_parse() {
        let d = MockDirectives::parse(
            "// mock:compile-error error: implicit declaration of function '__riscv_vadd_vv_i32m9'\n//mock:test-fail=256\n  // mock:cost=59000\n",
        );
        assert_eq!(d.compile_error.as_deref(), Some("error: implicit declaration of function '__riscv_vadd_vv_i32m9'"));
        assert_eq!(d.test_fail, Some(vec![256]));
        assert_eq!(d.cost, Some(59000));
        assert_eq!(MockDirectives::parse("// mock:test-fail").test_fail, Some(vec![]));
        assert_eq!(MockDirectives::parse("int x;"), MockDirectives::default());
    }

    #[test]
    fn model_prefers_wider_groups() {
        let m1 = "void f(void) { vint32m1_t a; }";
        let m4 = "void f(void) { vint32m4_t a; }";
        assert!(modeled_cost(m4, None) < modeled_cost(m1, None));
        assert_eq!(modeled_cost("int main(void) { return 0; }", None), 400_000);
    }
}
