use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::{sha256_hex, ChatMessage, Role};
use crate::corpus::ValidatedCase;
use crate::executors::PerfResult;
use crate::liveness::PressureReport;
use crate::rational::to_short_decimal;
use crate::rvv_front::Regs;

/// Bumped whenever prompt wording changes, so logged digests stay comparable.
pub const PROMPT_VERSION: &str = "1";

pub const DEFAULT_FEEDBACK_BUDGET: usize = 6000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Purpose {
    Translate,
    RepairCompile,
    RepairTest,
    Optimize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptBundle {
    pub messages: Vec<ChatMessage>,
    pub purpose: Purpose,
    /// sha256 over the prompt version, purpose and every message.
    pub context_digest: String,
}

impl PromptBundle {
    fn new(purpose: Purpose, messages: Vec<ChatMessage>) -> Self {
        let purpose_tag = serde_json::to_string(&purpose).expect("enum serializes");
        let mut parts: Vec<&[u8]> = vec![PROMPT_VERSION.as_bytes(), purpose_tag.as_bytes()];
        let roles: Vec<String> = messages.iter().map(|m| format!("{:?}", m.role)).collect();
        for (m, role) in messages.iter().zip(&roles) {
            parts.push(role.as_bytes());
            parts.push(m.content.as_bytes());
        }
        let context_digest = sha256_hex(&parts);
        PromptBundle { messages, purpose, context_digest }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeedbackKind {
    /// Compiler or linker diagnostics.
    Compile,
    /// Failing functional-test report.
    Test,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Feedback {
    pub kind: FeedbackKind,
    pub text: String,
}

impl Feedback {
    pub fn compile(text: impl Into<String>) -> Self {
        Feedback { kind: FeedbackKind::Compile, text: text.into() }
    }

    pub fn test(text: impl Into<String>) -> Self {
        Feedback { kind: FeedbackKind::Test, text: text.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PromptError {
    #[error("case `{0}` has an empty source")]
    EmptySource(String),
    #[error("a repair prompt needs feedback")]
    MissingFeedback,
    #[error("the candidate code is empty")]
    EmptyCode,
}

const TRANSLATOR_SYSTEM: &str = "\
You are an expert in SIMD programming who ports Arm Neon intrinsic code to the \
RISC-V Vector extension using the RVV C intrinsics, version 1.0.

Requirements:
1. Keep the exact function signature given by the user; callers link against it.
2. Use only v1.0 intrinsic names with the `__riscv_` prefix and include <riscv_vector.h>.
3. Do not write a scalar tail loop. Strip-mine with __riscv_vsetvl_* so the last \
iteration handles the remaining elements.
4. Stay vector-length agnostic: the code must be correct for VLEN=128 and VLEN=256 \
(and any other VLEN). Never assume a fixed number of lanes.
5. Keep helper functions the translated function needs, translated as well.
6. Reply with exactly one fenced ```c code block containing the complete translation unit.";

const OPTIMIZER_SYSTEM: &str = "\
You are an expert in RISC-V Vector performance tuning. You are given a correct RVV \
intrinsic implementation together with a liveness-based estimate of its vector \
register pressure (the sum of LMUL over simultaneously live vector values, out of 32 \
architectural vector registers) and its measured speed relative to an expert-written \
native RVV implementation.

Rewrite the function to run faster while keeping it correct for every VLEN. Useful \
levers are the LMUL register grouping and loop unrolling; keep the live register \
demand within 32 registers to avoid spills. Keep the exact function signature and \
the v1.0 `__riscv_` intrinsic naming. Reply with exactly one fenced ```c code block \
containing the complete translation unit.";

fn fenced(code: &str) -> String {
    let mut s = String::from("```c\n");
    s.push_str(code.trim_end());
    s.push_str("\n```");
    s
}

fn translate_request(case: &ValidatedCase) -> String {
    format!(
        "Translate this Arm Neon implementation to RVV intrinsics.\n\nRequired signature:\n{}\n\nNeon source:\n{}",
        case.manifest.function_signature,
        fenced(&case.source_text)
    )
}

pub fn build_translate_prompt(case: &ValidatedCase) -> Result<PromptBundle, PromptError> {
    if case.source_text.trim().is_empty() {
        return Err(PromptError::EmptySource(case.manifest.case_id.clone()));
    }
    Ok(PromptBundle::new(
        Purpose::Translate,
        vec![ChatMessage::new(Role::System, TRANSLATOR_SYSTEM), ChatMessage::new(Role::User, translate_request(case))],
    ))
}

/// Keeps the head and tail of oversized diagnostics.
///
/// At most `budget` bytes are kept, except that the final quarter of the
/// input always survives even when it alone exceeds the budget.
pub fn truncate_diagnostics(text: &str, budget: usize) -> String {
    if text.len() <= budget {
        return text.to_string();
    }
    let quarter = text.len().div_ceil(4);
    let head_len = budget / 4;
    let tail_len = quarter.max(budget - head_len);
    let mut head_end = head_len.min(text.len() - tail_len);
    while !text.is_char_boundary(head_end) {
        head_end -= 1;
    }
    let mut tail_start = text.len() - tail_len;
    while !text.is_char_boundary(tail_start) {
        tail_start -= 1;
    }
    let omitted = tail_start - head_end;
    format!("{}\n[... {omitted} bytes omitted ...]\n{}", &text[..head_end], &text[tail_start..])
}

pub fn build_repair_prompt(
    case: &ValidatedCase,
    previous_code: &str,
    feedback: &Feedback,
    budget: usize,
) -> Result<PromptBundle, PromptError> {
    if feedback.text.trim().is_empty() {
        return Err(PromptError::MissingFeedback);
    }
    let mut bundle = build_translate_prompt(case)?;
    let (purpose, what) = match feedback.kind {
        FeedbackKind::Compile => (Purpose::RepairCompile, "Compiling your translation failed with these diagnostics:"),
        FeedbackKind::Test => (Purpose::RepairTest, "Your translation compiled but failed the functional tests:"),
    };
    let previous = if previous_code.trim().is_empty() {
        "(no code block was found in the previous reply)".to_string()
    } else {
        fenced(previous_code)
    };
    bundle.messages.push(ChatMessage::new(Role::Assistant, previous));
    bundle.messages.push(ChatMessage::new(
        Role::User,
        format!(
            "{what}\n\n```text\n{}\n```\n\nFix the code. Keep every requirement from the first message and reply with one complete ```c code block.",
            truncate_diagnostics(feedback.text.trim_end(), budget)
        ),
    ));
    Ok(PromptBundle::new(purpose, bundle.messages))
}

/// Pressure at or below this many registers counts as ample headroom.
pub const HEADROOM_THRESHOLD: u32 = 16;

pub fn build_optimize_prompt(
    case: &ValidatedCase,
    correct_code: &str,
    pressure: Result<&PressureReport, &str>,
    perf: Option<&PerfResult>,
    last_failure: Option<&Feedback>,
) -> Result<PromptBundle, PromptError> {
    if correct_code.trim().is_empty() {
        return Err(PromptError::EmptyCode);
    }
    let mut user = String::new();
    let _ = writeln!(user, "Function signature:\n{}\n", case.manifest.function_signature);
    let _ = writeln!(user, "Current correct implementation:\n{}\n", fenced(correct_code));
    let pressure = match pressure {
        Ok(p) => p,
        Err(why) => {
            let _ = writeln!(user, "Register pressure analysis: unavailable ({why}).\n");
            return Ok(finish_optimize(user, perf, None, last_failure));
        }
    };
    let _ = writeln!(user, "Register pressure analysis:\n```text\n{pressure}\n```\n");
    Ok(finish_optimize(user, perf, Some(pressure), last_failure))
}

fn finish_optimize(
    mut user: String,
    perf: Option<&PerfResult>,
    pressure: Option<&PressureReport>,
    last_failure: Option<&Feedback>,
) -> PromptBundle {
    match perf {
        Some(p) => {
            let _ = writeln!(
                user,
                "Measured performance: {}× vs native reference (native {} ns, this version {} ns, median of {} runs at VLEN={}).\n",
                to_short_decimal(&p.speedup, 2),
                p.native_cost_ns,
                p.translated_cost_ns,
                p.runs,
                p.vlen
            );
        }
        None => {
            let _ = writeln!(user, "Measured performance: not available for this version.\n");
        }
    }
    if let Some(pressure) = pressure {
        let _ = writeln!(user, "{}", guidance(pressure));
    }
    if let Some(f) = last_failure.filter(|f| !f.text.trim().is_empty()) {
        let _ = writeln!(
            user,
            "\nYour previous optimization attempt was rejected:\n```text\n{}\n```",
            truncate_diagnostics(f.text.trim_end(), DEFAULT_FEEDBACK_BUDGET)
        );
    }
    let _ = write!(user, "\nReply with one complete ```c code block.");
    PromptBundle::new(
        Purpose::Optimize,
        vec![ChatMessage::new(Role::System, OPTIMIZER_SYSTEM), ChatMessage::new(Role::User, user)],
    )
}

fn guidance(pressure: &PressureReport) -> String {
    let budget = Regs::from_integer(pressure.register_budget);
    if pressure.spills_predicted {
        format!(
            "The peak pressure of {} exceeds the {} available vector registers, so the compiler will spill. \
             Reduce the number of concurrently live vector values: use a smaller LMUL, shorten live ranges \
             around the hot statement, or split the loop body.",
            pressure.pressure, budget
        )
    } else if pressure.pressure <= Regs::from_integer(HEADROOM_THRESHOLD) {
        format!(
            "There is headroom: the peak pressure is {} of {} registers, leaving {} free. \
             Consider increasing LMUL (larger register groups process more elements per instruction) \
             or unrolling the loop to overlap independent work.",
            pressure.pressure,
            budget,
            pressure.headroom()
        )
    } else {
        format!(
            "The peak pressure of {} of {} registers leaves little room. Prefer changes that do not add \
             live vector values, such as reordering loads and stores or fusing operations.",
            pressure.pressure, budget
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{CaseManifest, SourceArch};
    use crate::liveness::{compute_pressure, solve_liveness};
    use crate::liveness::synth::wide_chain_ir;
    use crate::rvv_front::{FootprintMode, Lmul};
    use std::path::PathBuf;

    fn case(source: &str) -> ValidatedCase {
        ValidatedCase {
            manifest: CaseManifest {
                case_id: "vector_add".into(),
                source_arch: SourceArch::Neon,
                case_dir: PathBuf::new(),
                source_path: PathBuf::new(),
                functional_test_path: PathBuf::new(),
                perf_test_path: PathBuf::new(),
                native_reference_path: PathBuf::new(),
                function_signature: "void vector_add(const int32_t *a, const int32_t *b, int32_t *c, size_t n)".into(),
            },
            source_text: source.into(),
            test_text: String::new(),
            bench_text: String::new(),
            native_text: String::new(),
            warnings: vec![],
        }
    }

    const NEON: &str = "static inline int32x4_t add4(int32x4_t a, int32x4_t b) { return vaddq_s32(a, b); }\nstatic inline int32x4_t load4(const int32_t *p) { return vld1q_s32(p); }\nvoid vector_add(const int32_t *a, const int32_t *b, int32_t *c, size_t n) { }\n";

    fn report(stages: usize) -> PressureReport {
        let ir = wide_chain_ir(stages, Lmul::M2);
        compute_pressure(&ir, &solve_liveness(&ir), FootprintMode::PaperLiteral)
    }

    #[test]
    fn translate_prompt_is_deterministic() {
        let a = build_translate_prompt(&case(NEON)).unwrap();
        let b = build_translate_prompt(&case(NEON)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.purpose, Purpose::Translate);
        assert_eq!(a.messages.len(), 2);
        assert_eq!(a.context_digest.len(), 64);
        let user = &a.messages[1].content;
        assert!(user.contains("add4") && user.contains("load4"));
        assert!(a.messages[0].content.contains("VLEN=128 and VLEN=256"));
        let other = build_translate_prompt(&case(&NEON.replace("add4", "add_four"))).unwrap();
        assert_ne!(a.context_digest, other.context_digest);
    }

    #[test]
    fn empty_source_is_rejected() {
        assert_eq!(build_translate_prompt(&case("  \n")), Err(PromptError::EmptySource("vector_add".into())));
    }

    #[test]
    fn compile_repair_embeds_diagnostics_verbatim() {
        let diag = "candidate.c:9:21: error: implicit declaration of function '__riscv_vadd_vv_i32m2'";
        let b = build_repair_prompt(&case(NEON), "void vector_add() {}", &Feedback::compile(diag), 6000).unwrap();
        assert_eq!(b.purpose, Purpose::RepairCompile);
        assert_eq!(b.messages.len(), 4);
        assert_eq!(b.messages[2].role, Role::Assistant);
        assert!(b.messages[3].content.contains(diag));
    }

    #[test]
    fn test_repair_names_the_vlen() {
        let report = "functional test failed at VLEN=256 (exit code 1)\noutput:\nFAIL n=7 i=4\npassed at VLEN=128\n";
        let b = build_repair_prompt(&case(NEON), "x", &Feedback::test(report), 6000).unwrap();
        assert_eq!(b.purpose, Purpose::RepairTest);
        assert!(b.messages[3].content.contains("VLEN=256"));
    }

    #[test]
    fn missing_feedback_is_rejected() {
        assert_eq!(
            build_repair_prompt(&case(NEON), "x", &Feedback::compile(" "), 6000),
            Err(PromptError::MissingFeedback)
        );
    }

    #[test]
    fn truncation_keeps_head_and_final_quarter() {
        let text: String = (0..2000).map(|i| format!("line {i}\n")).collect();
        let cut = truncate_diagnostics(&text, 1000);
        assert!(cut.starts_with("line 0\n"));
        assert!(cut.ends_with(&text[text.len() * 3 / 4..]));
        assert!(cut.contains("bytes omitted"));
        let small = truncate_diagnostics(&text[..3000], 1000);
        assert!(small.len() <= 1000 + 40, "{}", small.len());
        assert!(small.ends_with(&text[3000 - 750..3000]));
        assert_eq!(truncate_diagnostics("short", 1000), "short");
    }

    #[test]
    fn headroom_statement() {
        let r = report(3);
        assert_eq!(r.pressure, Regs::from_integer(6));
        let b = build_optimize_prompt(&case(NEON), "void f(void) {}", Ok(&r), None, None).unwrap();
        let user = &b.messages[1].content;
        assert!(user.contains("headroom: the peak pressure is 6 of 32 registers, leaving 26 free"), "{user}");
        assert!(user.contains("increasing LMUL"));
    }

    #[test]
    fn spill_statement() {
        let r = report(17);
        let b = build_optimize_prompt(&case(NEON), "void f(void) {}", Ok(&r), None, None).unwrap();
        let user = &b.messages[1].content;
        assert!(user.contains("34 exceeds the 32"));
        assert!(user.contains("Reduce the number of concurrently live vector values"));
    }

    #[test]
    fn speedup_statement() {
        let perf = PerfResult::new(70_000, 100_000, 5, 256).unwrap();
        let b = build_optimize_prompt(&case(NEON), "void f(void) {}", Ok(&report(3)), Some(&perf), None).unwrap();
        assert!(b.messages[1].content.contains("0.7× vs native reference"));
    }
}

