//! Backward liveness over the statement CFG and LMUL-weighted register pressure.
//!
//! ```text
//! IN(i)  = (OUT(i) - DEF(i)) ∪ USE(i)
//! OUT(i) = ∪ IN(s) for s in succ(i)
//! ```

mod batch;
mod oracle;
mod pressure;
pub mod synth;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::rvv_front::{FunctionIr, StmtId};

pub use batch::{analyze_batch, analyze_batch_sequential, analyze_function, Analysis};
pub use oracle::{oracle_liveness, OracleError};
pub use pressure::{compute_pressure, LiveValue, PressureReport};

pub type VarSet = BTreeSet<String>;

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct LivenessResult {
    pub live_in: BTreeMap<StmtId, VarSet>,
    pub live_out: BTreeMap<StmtId, VarSet>,
}

impl LivenessResult {
    /// First statement where `IN = (OUT - DEF) ∪ USE` or `OUT = ∪ IN(succ)` fails.
    pub fn check_fixpoint(&self, ir: &FunctionIr) -> Result<(), StmtId> {
        let succs = ir.stmt_successors();
        for s in &ir.stmts {
            let out = &self.live_out[&s.id];
            let expect_in = transfer(out, &s.defs, &s.uses);
            if self.live_in[&s.id] != expect_in {
                return Err(s.id);
            }
            let expect_out: VarSet = succs[s.id].iter().flat_map(|n| self.live_in[n].iter().cloned()).collect();
            if *out != expect_out {
                return Err(s.id);
            }
        }
        Ok(())
    }
}

fn transfer(out: &VarSet, defs: &VarSet, uses: &VarSet) -> VarSet {
    out.difference(defs).chain(uses).cloned().collect()
}

/// Solves liveness visiting statements in reverse program order each pass.
pub fn solve_liveness(ir: &FunctionIr) -> LivenessResult {
    let order: Vec<StmtId> = (0..ir.stmts.len()).rev().collect();
    solve_liveness_in_order(ir, &order)
}

/// Round-robin solver with a caller-chosen visiting order.
///
/// `order` must be a permutation of the statement ids. The fixpoint does not
/// depend on it; only the number of passes does.
pub fn solve_liveness_in_order(ir: &FunctionIr, order: &[StmtId]) -> LivenessResult {
    let n = ir.stmts.len();
    assert_eq!(order.len(), n, "visiting order must cover every statement");
    let succs = ir.stmt_successors();
    let mut live_in = vec![VarSet::new(); n];
    let mut live_out = vec![VarSet::new(); n];

    let universe = ir
        .stmts
        .iter()
        .flat_map(|s| s.uses.iter().chain(&s.defs))
        .collect::<BTreeSet<_>>()
        .len();
    // every productive pass adds at least one (var, stmt) pair to some IN set
    let max_passes = universe * n + 1;
    let mut passes = 0;
    loop {
        passes += 1;
        assert!(passes <= max_passes, "liveness failed to converge in {max_passes} passes");
        let mut changed = false;
        for &i in order {
            let out: VarSet = succs[i].iter().flat_map(|s| live_in[*s].iter().cloned()).collect();
            let stmt = &ir.stmts[i];
            let inn = transfer(&out, &stmt.defs, &stmt.uses);
            if inn != live_in[i] {
                live_in[i] = inn;
                changed = true;
            }
            live_out[i] = out;
        }
        if !changed {
            break;
        }
    }
    log::trace!("liveness for {} converged after {passes} passes", ir.name);
    LivenessResult {
        live_in: live_in.into_iter().enumerate().collect(),
        live_out: live_out.into_iter().enumerate().collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::synth::{random_ir, straight_line_ir, SynthParams};
    use super::*;
    use crate::rvv_front::{parse_function, Lmul};
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn set(items: &[&str]) -> VarSet {
        items.iter().map(|s| s.to_string()).collect()
    }

    fn textbook() -> FunctionIr {
        straight_line_ir(
            &[(&[], &["a"]), (&[], &["b"]), (&["a", "b"], &["c"]), (&["c"], &[])],
            Lmul::M2,
        )
    }

    #[test]
    fn straight_line_sets() {
        let ir = textbook();
        let live = solve_liveness(&ir);
        assert_eq!(live.live_in[&2], set(&["a", "b"]));
        assert_eq!(live.live_out[&2], set(&["c"]));
        assert_eq!(live.live_in[&3], set(&["c"]));
        assert!(live.live_out[&3].is_empty());
        assert_eq!(live.live_out[&0], set(&["a"]));
        live.check_fixpoint(&ir).unwrap();
    }

    #[test]
    fn empty_function_has_empty_maps() {
        let ir = parse_function("void f(void) {}", "void f(void)").unwrap();
        let live = solve_liveness(&ir);
        assert!(live.live_in.is_empty() && live.live_out.is_empty());
    }

    #[test]
    fn loop_carried_accumulator() {
        let src = "void f(const int *p, size_t n, size_t vl) {\n  vint32m1_t acc = __riscv_vmv_v_x_i32m1(0, vl);\n  while (n) {\n    vint32m1_t x = __riscv_vle32_v_i32m1(p, vl);\n    acc = __riscv_vadd_vv_i32m1(acc, x, vl);\n    n--;\n  }\n  __riscv_vse32_v_i32m1(0, acc, vl);\n}";
        let ir = parse_function(src, "void f(const int *p, size_t n, size_t vl)").unwrap();
        let live = solve_liveness(&ir);
        live.check_fixpoint(&ir).unwrap();
        // s1 guard, s2 load, s3 add, s4 n--, s5 latch condition
        assert!(live.live_in[&1].contains("acc"));
        assert!(live.live_out[&5].contains("acc"));
        assert!(live.live_in[&2].contains("acc"));
        assert!(!live.live_in[&2].contains("x"));
        assert_eq!(oracle_liveness(&ir, 64).unwrap(), live);
    }

    #[test]
    fn solver_agrees_with_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        for _ in 0..300 {
            let ir = random_ir(&mut rng, &SynthParams::default());
            let live = solve_liveness(&ir);
            live.check_fixpoint(&ir).unwrap();
            assert_eq!(oracle_liveness(&ir, 2 * ir.stmts.len() + 1).unwrap(), live, "{}", ir.dump());
        }
    }

    #[test]
    fn visiting_order_does_not_change_fixpoint() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let ir = random_ir(&mut rng, &SynthParams::default());
            let reference = solve_liveness(&ir);
            let mut order: Vec<_> = (0..ir.stmts.len()).collect();
            order.shuffle(&mut rng);
            assert_eq!(solve_liveness_in_order(&ir, &order), reference);
        }
    }

    #[test]
    fn added_use_is_monotone() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let ir = random_ir(&mut rng, &SynthParams::default());
            if ir.stmts.is_empty() {
                continue;
            }
            let before = solve_liveness(&ir);
            let p_before = compute_pressure(&ir, &before, Default::default());
            let mut grown = ir.clone();
            let k = rand::Rng::random_range(&mut rng, 0..grown.stmts.len());
            let v = grown.symbols.keys().next().unwrap().clone();
            grown.stmts[k].uses.insert(v);
            let after = solve_liveness(&grown);
            for i in 0..ir.stmts.len() {
                assert!(before.live_in[&i].is_subset(&after.live_in[&i]));
                assert!(before.live_out[&i].is_subset(&after.live_out[&i]));
            }
            let p_after = compute_pressure(&grown, &after, Default::default());
            assert!(p_after.pressure >= p_before.pressure);
        }
    }

    #[test]
    fn dead_definition_is_never_live() {
        let ir = straight_line_ir(&[(&[], &["a"]), (&[], &["d"]), (&["a"], &[])], Lmul::M1);
        let live = solve_liveness(&ir);
        assert!(live.live_in.values().chain(live.live_out.values()).all(|s| !s.contains("d")));
    }
}
