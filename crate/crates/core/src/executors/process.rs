use std::collections::BTreeMap;
use std::fs::{self, File};
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::thread;
use std::time::{Duration, Instant};

use super::{
    median, output_tail, parse_cost_line, Backend, CompileResult, ExecError, Harness, PerfResult, Scratch,
    TestResult, ToolchainConfig, VlenRun,
};
use crate::corpus::ValidatedCase;

/// Runs the real cross compiler and emulator.
#[derive(Debug, Clone)]
pub struct ProcessBackend {
    pub config: ToolchainConfig,
}

struct Finished {
    exit_code: Option<i32>,
    timed_out: bool,
    stdout: Vec<u8>,
    stderr: Vec<u8>,
}

impl ProcessBackend {
    /// Probes the toolchain before handing out a backend.
    pub fn new(config: ToolchainConfig) -> Result<Self, ExecError> {
        config.probe()?;
        Ok(ProcessBackend { config })
    }

    fn run(&self, argv: &[String], timeout: Duration, log_stem: &Path) -> Result<Finished, ExecError> {
        let out_path = log_stem.with_extension("stdout.txt");
        let err_path = log_stem.with_extension("stderr.txt");
        let stdout = File::create(&out_path).map_err(|e| ExecError::io(format!("creating {}", out_path.display()), e))?;
        let stderr = File::create(&err_path).map_err(|e| ExecError::io(format!("creating {}", err_path.display()), e))?;
        log::debug!("running {argv:?}");
        let mut child = Command::new(&argv[0])
            .args(&argv[1..])
            .stdin(Stdio::null())
            .stdout(stdout)
            .stderr(stderr)
            .spawn()
            .map_err(|e| ExecError::io(format!("spawning `{}`", argv[0]), e))?;
        let deadline = Instant::now() + timeout;
        let mut poll = Duration::from_millis(2);
        let (status, timed_out) = loop {
            match child.try_wait().map_err(|e| ExecError::io("waiting for child", e))? {
                Some(status) => break (Some(status), false),
                None if Instant::now() >= deadline => {
                    let _ = child.kill();
                    let _ = child.wait();
                    break (None, true);
                }
                None => {
                    thread::sleep(poll);
                    poll = (poll * 2).min(Duration::from_millis(50));
                }
            }
        };
        let read = |p: &Path| fs::read(p).map_err(|e| ExecError::io(format!("reading {}", p.display()), e));
        Ok(Finished {
            exit_code: status.and_then(|s| s.code()),
            timed_out,
            stdout: read(&out_path)?,
            stderr: read(&err_path)?,
        })
    }

    fn bench_once(&self, binary: &Path, what: &'static str, i: u32) -> Result<u64, ExecError> {
        let vlen = self.config.largest_vlen();
        let argv = self.config.run_command(vlen, binary);
        let stem = binary.with_file_name(format!("perf-{what}-{i}"));
        let f = self.run(&argv, Duration::from_secs(self.config.run_timeout_s), &stem)?;
        if f.timed_out || f.exit_code != Some(0) {
            return Err(ExecError::PerfRun {
                what,
                detail: if f.timed_out { "timeout".into() } else { format!("exit code {:?}", f.exit_code) },
            });
        }
        let stdout = String::from_utf8_lossy(&f.stdout);
        parse_cost_line(&stdout).ok_or_else(|| ExecError::NoCostLine { tail: output_tail(&f.stdout) })
    }
}

impl Backend for ProcessBackend {
    fn compile(
        &self,
        candidate: &str,
        case: &ValidatedCase,
        harness: Harness,
        scratch: &Scratch,
    ) -> Result<CompileResult, ExecError> {
        scratch.create()?;
        let source = scratch.dir.join("candidate.c");
        fs::write(&source, candidate).map_err(|e| ExecError::io(format!("writing {}", source.display()), e))?;
        let (harness_path, bin): (&Path, PathBuf) = match harness {
            Harness::Functional => (&case.manifest.functional_test_path, scratch.dir.join("bin")),
            Harness::Perf => (&case.manifest.perf_test_path, scratch.dir.join("bin-perf")),
        };
        let argv = self.config.compile_command(&[&source, harness_path], &bin);
        let stem = scratch.dir.join(match harness {
            Harness::Functional => "compile",
            Harness::Perf => "compile-perf",
        });
        let f = self.run(&argv, Duration::from_secs(self.config.compile_timeout_s), &stem)?;
        // the functional build's logs also go to the plain names
        if harness == Harness::Functional {
            let _ = fs::copy(stem.with_extension("stdout.txt"), scratch.dir.join("stdout.txt"));
            let _ = fs::copy(stem.with_extension("stderr.txt"), scratch.dir.join("stderr.txt"));
        }
        if f.timed_out {
            return Ok(CompileResult {
                success: false,
                diagnostics: format!("compile timeout after {} s", self.config.compile_timeout_s),
                artifact_path: None,
            });
        }
        let mut diagnostics = output_tail(&f.stderr);
        if diagnostics.trim().is_empty() {
            diagnostics = output_tail(&f.stdout);
        }
        let success = f.exit_code == Some(0) && bin.is_file();
        Ok(CompileResult { success, diagnostics, artifact_path: success.then_some(bin) })
    }

    fn run_functional_tests(&self, artifact: &Path) -> Result<TestResult, ExecError> {
        let mut per_vlen = BTreeMap::new();
        for &vlen in &self.config.vlens {
            let argv = self.config.run_command(vlen, artifact);
            let stem = artifact.with_file_name(format!("test-vlen{vlen}"));
            let f = self.run(&argv, Duration::from_secs(self.config.run_timeout_s), &stem)?;
            let mut combined = f.stdout;
            combined.extend_from_slice(&f.stderr);
            let mut tail = output_tail(&combined);
            if f.timed_out {
                tail.push_str(&format!("\ntimeout after {} s", self.config.run_timeout_s));
            }
            per_vlen.insert(
                vlen,
                VlenRun {
                    passed: !f.timed_out && f.exit_code == Some(0),
                    output_tail: tail,
                    exit_code: f.exit_code,
                    timed_out: f.timed_out,
                },
            );
        }
        Ok(TestResult::from_runs(per_vlen))
    }

    fn run_perf(&self, translated: &Path, native: &Path) -> Result<PerfResult, ExecError> {
        let runs = self.config.perf_runs;
        let mut t = Vec::with_capacity(runs as usize);
        let mut n = Vec::with_capacity(runs as usize);
        // alternate so drift hits both binaries alike
        for i in 0..runs {
            t.push(self.bench_once(translated, "translated", i)?);
            n.push(self.bench_once(native, "native", i)?);
        }
        let translated_cost = median(&t).expect("runs >= 1");
        let native_cost = median(&n).expect("runs >= 1");
        PerfResult::new(native_cost, translated_cost, runs, self.config.largest_vlen())
    }

    fn vlens(&self) -> Vec<u32> {
        self.config.vlens.clone()
    }

    fn describe(&self) -> String {
        format!("{} {} / {}", self.config.cc, self.config.flags, self.config.runner)
    }
}
