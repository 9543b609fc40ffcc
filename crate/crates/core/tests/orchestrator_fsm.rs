use std::path::{Path, PathBuf};

use num_rational::Ratio;
use vecport::agents::ReplayClient;
use vecport::corpus::{load_corpus, validate_case, ValidatedCase};
use vecport::executors::MockBackend;
use vecport::orchestrator::{attempt_log_path, run_corpus, run_task, Budgets, FsmState, TaskDeps, TaskOutcome};

fn corpus() -> Vec<ValidatedCase> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus");
    load_corpus(&dir).unwrap().cases.iter().map(|m| validate_case(m).unwrap()).collect()
}

fn case(id: &str) -> ValidatedCase {
    corpus().into_iter().find(|c| c.id() == id).unwrap()
}

fn fenced(code: &str) -> String {
    format!("Here you go.\n\n```c\n{code}\n```\n")
}

fn broken(c: &ValidatedCase, n: usize) -> String {
    fenced(&format!("// mock:compile-error error: unknown type name 'vint32m9_t' (try {n})\n{}", c.native_text))
}

fn run(c: &ValidatedCase, script: Vec<String>, backend: &MockBackend, work: &Path) -> TaskOutcome {
    let llm = ReplayClient::shared(script);
    let deps = TaskDeps::new(&llm, backend, work);
    run_task(c, &deps).unwrap()
}

#[test]
fn success_on_third_attempt() {
    use FsmState::*;
    let c = case("vector_add");
    let work = tempfile::tempdir().unwrap();
    let script = vec![broken(&c, 1), broken(&c, 2), fenced(&c.native_text)];
    let out = run(&c, script, &MockBackend::default(), work.path());

    assert!(out.passed);
    assert_eq!(out.attempts_used, 3);
    assert_eq!(
        out.trace,
        [Init, Translate, Compile, Translate, Compile, Translate, Compile, FuncTest, BaselinePerf, Optimize, SelectBest, Done]
    );
    // the replay script ran dry on the first optimize call
    assert_eq!(out.llm_calls, 4);
    assert_eq!(out.best_variant.as_ref().unwrap().variant_id, 0);
    assert_eq!(out.final_speedup, Some(Ratio::from_integer(1)));
    let v0 = &out.variants[0];
    assert_eq!(v0.pressure.as_ref().unwrap().pressure, Ratio::from_integer(6));

    let log = std::fs::read_to_string(attempt_log_path(work.path(), "vector_add")).unwrap();
    assert_eq!(log.lines().count(), 4);
    assert_eq!(out.all_attempts.len(), 4);
}

#[test]
fn repair_prompt_carries_the_diagnostics() {
    let c = case("vector_add");
    let work = tempfile::tempdir().unwrap();
    let out = run(&c, vec![broken(&c, 1), fenced(&c.native_text)], &MockBackend::default(), work.path());
    let a = &out.all_attempts;
    assert_eq!(a[0].purpose, vecport::agents::Purpose::Translate);
    assert_eq!(a[1].purpose, vecport::agents::Purpose::RepairCompile);
    assert!(a[0].compile.as_ref().unwrap().diagnostics.contains("vint32m9_t"));
}

#[test]
fn ten_compile_failures_fail_the_task() {
    let c = case("sat_add_u8");
    let work = tempfile::tempdir().unwrap();
    let script = (1..=12).map(|n| broken(&c, n)).collect();
    let out = run(&c, script, &MockBackend::default(), work.path());

    assert!(!out.passed);
    assert!(out.best_variant.is_none() && out.final_speedup.is_none());
    assert_eq!(out.llm_calls, 10);
    assert_eq!(out.attempts_used, 10);
    assert_eq!(out.trace.last(), Some(&FsmState::Failed));
    assert!(!out.trace.contains(&FsmState::Optimize));
    let numbers: Vec<u32> = out.all_attempts.iter().map(|a| a.attempt_no).collect();
    assert_eq!(numbers, (1..=10).collect::<Vec<_>>());
    assert!(out.failure.unwrap().contains("vint32m9_t"));
}

#[test]
fn missing_code_is_a_consumed_attempt() {
    use FsmState::*;
    let c = case("vector_add");
    let work = tempfile::tempdir().unwrap();
    let script = vec!["I cannot help with that.".to_string(), fenced(&c.native_text)];
    let out = run(&c, script, &MockBackend::default(), work.path());
    assert_eq!(out.attempts_used, 2);
    assert_eq!(&out.trace[..4], &[Init, Translate, Translate, Compile]);
    assert!(out.all_attempts[0].error.as_deref().unwrap().starts_with("no code emitted"));
}

#[test]
fn test_failure_at_one_vlen_is_repaired() {
    let c = case("dot_i16");
    let work = tempfile::tempdir().unwrap();
    let bad = fenced(&format!("// mock:test-fail=256\n{}", c.native_text));
    let out = run(&c, vec![bad, fenced(&c.native_text)], &MockBackend::default(), work.path());
    assert_eq!(out.attempts_used, 2);
    let t = out.all_attempts[0].test.as_ref().unwrap();
    assert!(!t.all_passed && t.per_vlen[&128].passed && !t.per_vlen[&256].passed);
    assert_eq!(out.all_attempts[1].purpose, vecport::agents::Purpose::RepairTest);
}

#[test]
fn faster_optimized_variant_is_selected() {
    let c = case("vector_add");
    let work = tempfile::tempdir().unwrap();
    // native 1300 ns: v0 at 1625 ns is 0.8x, v1 at 1000 ns is 1.3x
    let backend = MockBackend::default().with_native_cost(1300);
    let script = vec![
        fenced(&format!("// mock:cost=1625\n{}", c.native_text)),
        fenced(&format!("// mock:cost=1000\n{}", c.native_text)),
        fenced(&format!("// mock:cost=1000\n// mock:test-fail\n{}", c.native_text)),
    ];
    let out = run(&c, script, &backend, work.path());

    assert_eq!(out.variants.len(), 2);
    assert_eq!(out.variants[0].speedup(), Some(Ratio::new(4, 5)));
    let best = out.best_variant.unwrap();
    assert_eq!(best.variant_id, 1);
    assert!(best.passed_all_tests);
    assert_eq!(out.final_speedup, Some(Ratio::new(13, 10)));
}

#[test]
fn baseline_at_parity_loses_to_faster_variant() {
    let c = case("vector_add");
    let work = tempfile::tempdir().unwrap();
    let backend = MockBackend::default().with_native_cost(1300);
    let script = vec![
        fenced(&format!("// mock:cost=1300\n{}", c.native_text)),
        fenced(&format!("// mock:cost=1000\n{}", c.native_text)),
    ];
    let out = run(&c, script, &backend, work.path());
    assert_eq!(out.variants[0].speedup(), Some(Ratio::from_integer(1)));
    assert_eq!(out.best_variant.unwrap().variant_id, 1);
}

#[test]
fn failed_optimizations_keep_the_baseline() {
    let c = case("max_f32");
    let work = tempfile::tempdir().unwrap();
    let mut script = vec![fenced(&c.native_text)];
    script.extend((1..=15).map(|n| broken(&c, n)));
    let out = run(&c, script, &MockBackend::default(), work.path());

    assert!(out.passed);
    assert_eq!(out.llm_calls, 11, "the optimize budget caps the calls");
    assert_eq!(out.variants.len(), 1);
    assert!(out.best_variant.unwrap().passed_all_tests);
    let opt: Vec<u32> = out
        .all_attempts
        .iter()
        .filter(|a| a.phase == vecport::orchestrator::Phase::Optimization)
        .map(|a| a.attempt_no)
        .collect();
    assert_eq!(opt, (1..=10).collect::<Vec<_>>());
}

#[test]
fn budgets_are_respected() {
    let c = case("vector_add");
    let work = tempfile::tempdir().unwrap();
    let llm = ReplayClient::shared((1..=30).map(|n| broken(&c, n)).collect());
    let backend = MockBackend::default();
    let mut deps = TaskDeps::new(&llm, &backend, work.path());
    deps.budgets = Budgets { translate_max: 3, optimize_max: 2 };
    let out = run_task(&c, &deps).unwrap();
    assert_eq!((out.llm_calls, out.attempts_used), (3, 3));

    deps.budgets.translate_max = 0;
    assert!(run_task(&c, &deps).is_err());
}

fn strip_timestamps(log: &str) -> String {
    log.lines()
        .map(|l| {
            let mut v: serde_json::Value = serde_json::from_str(l).unwrap();
            let o = v.as_object_mut().unwrap();
            o.remove("started_ms");
            o.remove("finished_ms");
            v.to_string()
        })
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn logs_are_reproducible() {
    let c = case("rgb_deinterleave");
    let script = || {
        vec![
            broken(&c, 1),
            fenced(&format!("// mock:test-fail=128\n{}", c.native_text)),
            fenced(&c.native_text),
            "no code here".to_string(),
            fenced(&format!("// mock:cost=1\n{}", c.native_text)),
        ]
    };
    let logs: Vec<(String, TaskOutcome)> = (0..2)
        .map(|_| {
            let work = tempfile::tempdir().unwrap();
            let out = run(&c, script(), &MockBackend::default(), work.path());
            let log = std::fs::read_to_string(attempt_log_path(work.path(), c.id())).unwrap();
            (strip_timestamps(&log), out)
        })
        .collect();
    assert_eq!(logs[0].0, logs[1].0);
    assert_eq!(logs[0].1.trace, logs[1].1.trace);
    assert_eq!(logs[0].1.variants, logs[1].1.variants);
}

#[test]
fn parallel_run_matches_sequential() {
    let cases = corpus();
    let scripts = cases.iter().map(|c| (c.id().to_string(), vec![fenced(&c.native_text)])).collect();
    let llm_per_case = ReplayClient::per_case(scripts);
    let backend = MockBackend::default();

    let results: Vec<Vec<TaskOutcome>> = [1, 4]
        .iter()
        .map(|&n| {
            let work = tempfile::tempdir().unwrap();
            let deps = TaskDeps::new(&llm_per_case, &backend, work.path());
            run_corpus(&cases, &deps, n).into_iter().map(Result::unwrap).collect()
        })
        .collect();
    for (a, b) in results[0].iter().zip(&results[1]) {
        assert_eq!(a.case_id, b.case_id);
        assert!(a.passed, "{}", a.case_id);
        assert_eq!((&a.trace, &a.variants, a.attempts_used), (&b.trace, &b.variants, b.attempts_used));
    }
}
