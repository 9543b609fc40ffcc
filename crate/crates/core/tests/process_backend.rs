//! Drives the process backend with the host C compiler standing in for the
//! cross toolchain; the "emulator" is the binary itself, with the VLEN passed
//! through the environment.

use std::path::PathBuf;

use vecport::corpus::{load_corpus, validate_case, ValidatedCase};
use vecport::executors::{Backend, ConfigError, ExecError, Harness, ProcessBackend, Scratch, ToolchainConfig};

fn host_config() -> ToolchainConfig {
    ToolchainConfig {
        compile_cmd_template: "{cc} {flags} {inputs} -o {output}".into(),
        cc: "cc".into(),
        flags: "-O1 -w".into(),
        runner_cmd_template: "env VLEN={vlen} {binary}".into(),
        runner: String::new(),
        run_timeout_s: 2,
        perf_runs: 3,
        ..Default::default()
    }
}

fn vector_add_case() -> ValidatedCase {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus");
    let load = load_corpus(&dir).unwrap();
    validate_case(load.cases.iter().find(|c| c.case_id == "vector_add").unwrap()).unwrap()
}

const SCALAR: &str = "#include <stddef.h>\n#include <stdint.h>\nvoid vector_add(const int32_t *a, const int32_t *b, int32_t *c, size_t n)\n{\n    for (size_t i = 0; i < n; i++)\n        c[i] = a[i] + b[i];\n}\n";

/// Host model of a candidate that hardcodes 4 lanes: on a wider machine the
/// strip-mined loop advances by the real vector length and skips elements.
const FOUR_LANE: &str = "#include <stddef.h>\n#include <stdint.h>\n#include <stdlib.h>\nvoid vector_add(const int32_t *a, const int32_t *b, int32_t *c, size_t n)\n{\n    const char *v = getenv(\"VLEN\");\n    size_t lanes = (v ? (size_t)atoi(v) : 128) / 32;\n    for (size_t i = 0; i < n; i += lanes)\n        for (size_t j = 0; j < 4 && i + j < n; j++)\n            c[i + j] = a[i + j] + b[i + j];\n}\n";

fn scratch(tmp: &tempfile::TempDir, attempt: &str) -> Scratch {
    Scratch::new(tmp.path(), "vector_add", attempt)
}

#[test]
fn valid_candidate_compiles_and_passes_everywhere() {
    let backend = ProcessBackend::new(host_config()).unwrap();
    let tmp = tempfile::tempdir().unwrap();
    let case = vector_add_case();
    let c = backend.compile(SCALAR, &case, Harness::Functional, &scratch(&tmp, "t01")).unwrap();
    assert!(c.success, "{}", c.diagnostics);
    let bin = c.artifact_path.unwrap();
    assert!(bin.starts_with(tmp.path().join("vector_add").join("t01")));
    assert!(tmp.path().join("vector_add/t01/candidate.c").is_file());
    let t = backend.run_functional_tests(&bin).unwrap();
    assert!(t.all_passed, "{t:?}");
    assert_eq!(t.per_vlen.keys().copied().collect::<Vec<_>>(), [128, 256]);
}

#[test]
fn misspelled_function_is_named_in_diagnostics() {
    let backend = ProcessBackend::new(host_config()).unwrap();
    let tmp = tempfile::tempdir().unwrap();
    let broken = SCALAR.replace("c[i] = a[i] + b[i];", "c[i] = vadd_misspelled(a[i], b[i]);");
    let c = backend.compile(&broken, &vector_add_case(), Harness::Functional, &scratch(&tmp, "t01")).unwrap();
    assert!(!c.success);
    assert!(c.artifact_path.is_none());
    assert!(c.diagnostics.contains("vadd_misspelled"), "{}", c.diagnostics);
}

#[test]
fn four_lane_assumption_fails_only_at_256() {
    let backend = ProcessBackend::new(host_config()).unwrap();
    let tmp = tempfile::tempdir().unwrap();
    let c = backend.compile(FOUR_LANE, &vector_add_case(), Harness::Functional, &scratch(&tmp, "t02")).unwrap();
    assert!(c.success, "{}", c.diagnostics);
    let t = backend.run_functional_tests(&c.artifact_path.unwrap()).unwrap();
    assert!(t.per_vlen[&128].passed);
    assert!(!t.per_vlen[&256].passed);
    assert!(!t.all_passed);
    assert!(t.failure_report().contains("VLEN=256"));
}

#[test]
fn infinite_loop_times_out() {
    let mut cfg = host_config();
    cfg.run_timeout_s = 1;
    let backend = ProcessBackend::new(cfg).unwrap();
    let tmp = tempfile::tempdir().unwrap();
    let hang = SCALAR.replace("for (size_t i = 0; i < n; i++)", "for (volatile size_t i = 0; ; i *= 1)");
    let c = backend.compile(&hang, &vector_add_case(), Harness::Functional, &scratch(&tmp, "t03")).unwrap();
    assert!(c.success, "{}", c.diagnostics);
    let t = backend.run_functional_tests(&c.artifact_path.unwrap()).unwrap();
    let first = &t.per_vlen[&128];
    assert!(first.timed_out && !first.passed);
    assert!(first.output_tail.contains("timeout"));
}

#[test]
fn unreachable_compiler_is_a_configuration_error() {
    let cfg = ToolchainConfig { cc: "/definitely/not/here/cc".into(), ..host_config() };
    match ProcessBackend::new(cfg) {
        Err(ExecError::Config(ConfigError::MissingTool { what, name })) => {
            assert_eq!(what, "compiler");
            assert_eq!(name, "/definitely/not/here/cc");
        }
        other => panic!("expected a configuration error, got {other:?}"),
    }
    let cfg = ToolchainConfig { runner_cmd_template: "no-such-emulator {binary}".into(), ..host_config() };
    assert!(matches!(
        ProcessBackend::new(cfg),
        Err(ExecError::Config(ConfigError::MissingTool { what: "emulator", .. }))
    ));
}

#[test]
fn perf_compares_medians() {
    let backend = ProcessBackend::new(host_config()).unwrap();
    let tmp = tempfile::tempdir().unwrap();
    let case = vector_add_case();
    let fast = backend.compile(SCALAR, &case, Harness::Perf, &scratch(&tmp, "t01")).unwrap();
    let slow_src = SCALAR.replace(
        "c[i] = a[i] + b[i];",
        "{ volatile int32_t s = a[i]; for (int k = 0; k < 8; k++) s = s + 0; c[i] = s + b[i]; }",
    );
    let slow = backend.compile(&slow_src, &case, Harness::Perf, &scratch(&tmp, "native")).unwrap();
    assert!(fast.success && slow.success, "{} {}", fast.diagnostics, slow.diagnostics);
    let p = backend.run_perf(&fast.artifact_path.unwrap(), &slow.artifact_path.unwrap()).unwrap();
    assert_eq!(p.runs, 3);
    assert_eq!(p.vlen, 256);
    assert!(p.translated_cost_ns > 0 && p.native_cost_ns > 0);
    assert!(p.speedup > num_rational::Ratio::from_integer(1), "{p:?}");
}

#[test]
fn bench_without_cost_line_is_a_perf_error() {
    let backend = ProcessBackend::new(host_config()).unwrap();
    let tmp = tempfile::tempdir().unwrap();
    let case = vector_add_case();
    // the functional harness prints PASS, not a number
    let c = backend.compile(SCALAR, &case, Harness::Functional, &scratch(&tmp, "t01")).unwrap();
    let bin = c.artifact_path.unwrap();
    assert!(matches!(backend.run_perf(&bin, &bin), Err(ExecError::NoCostLine { .. })));
}
