//! Random and hand-shaped IR for property tests, the acceptance suite and benches.

use std::collections::BTreeSet;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::rvv_front::{BasicBlock, Cfg, ElemKind, FunctionIr, Lmul, Stmt, SymbolTable, VectorType};

#[derive(Debug, Clone)]
pub struct SynthParams {
    pub max_blocks: usize,
    pub max_stmts: usize,
    pub max_vars: usize,
    pub lmuls: Vec<Lmul>,
}

impl Default for SynthParams {
    fn default() -> Self {
        SynthParams {
            max_blocks: 6,
            max_stmts: 12,
            max_vars: 6,
            lmuls: vec![Lmul::F2, Lmul::M1, Lmul::M2, Lmul::M4],
        }
    }
}

fn i32_type(lmul: Lmul) -> VectorType {
    VectorType::data(ElemKind::SignedInt, 32, lmul, 1).expect("i32 is legal at every lmul >= 1/2")
}

/// Arbitrary (not necessarily structured) CFG with random USE/DEF sets.
///
/// Every block is reachable from the entry and has at least one successor;
/// blocks may be empty, and cycles that never reach the exit are allowed.
pub fn random_ir<R: Rng>(rng: &mut R, p: &SynthParams) -> FunctionIr {
    let n_blocks = rng.random_range(1..=p.max_blocks);
    let n_stmts = rng.random_range(0..=p.max_stmts);
    let n_vars = rng.random_range(1..=p.max_vars);

    let symbols: SymbolTable = (0..n_vars)
        .map(|v| (format!("v{v}"), i32_type(*p.lmuls.choose(rng).expect("lmul list is empty"))))
        .collect();
    let names: Vec<String> = symbols.keys().cloned().collect();

    let exit = n_blocks;
    let mut succs = vec![BTreeSet::new(); n_blocks + 1];
    for b in 1..n_blocks {
        let parent = rng.random_range(0..b);
        succs[parent].insert(b);
    }
    for s in succs.iter_mut().take(n_blocks) {
        let extra = rng.random_range(0..=2usize);
        for _ in 0..extra {
            s.insert(rng.random_range(0..=n_blocks));
        }
        if s.is_empty() {
            s.insert(exit);
        }
    }
    let leaving = rng.random_range(0..n_blocks);
    succs[leaving].insert(exit);

    // stmts are dealt to blocks in program order
    let mut cuts: Vec<usize> = (0..n_blocks - 1).map(|_| rng.random_range(0..=n_stmts)).collect();
    cuts.sort_unstable();
    let mut blocks = Vec::with_capacity(n_blocks + 1);
    let mut start = 0;
    for b in 0..n_blocks {
        let end = cuts.get(b).copied().unwrap_or(n_stmts);
        blocks.push(BasicBlock { id: b, stmts: (start..end).collect() });
        start = end;
    }
    blocks.push(BasicBlock { id: exit, stmts: vec![] });

    let pick = |rng: &mut R, odds: f64| -> Vec<String> {
        names.iter().filter(|_| rng.random_bool(odds)).cloned().collect()
    };
    let stmts = (0..n_stmts).map(|id| Stmt::synthetic(id, pick(rng, 0.3), pick(rng, 0.25))).collect();

    let cfg = Cfg { blocks, succs, entry: 0, exit };
    FunctionIr::from_parts("synthetic", symbols, stmts, cfg).expect("generator produced invalid IR")
}

/// Deterministic batch of random functions.
pub fn random_batch(seed: u64, count: usize, p: &SynthParams) -> Vec<FunctionIr> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_ir(&mut rng, p)).collect()
}

/// Single-block function whose i-th statement has the given (uses, defs);
/// every variable gets type `vint32<lmul>_t`.
pub fn straight_line_ir(shape: &[(&[&str], &[&str])], lmul: Lmul) -> FunctionIr {
    let symbols: SymbolTable = shape
        .iter()
        .flat_map(|(u, d)| u.iter().chain(d.iter()))
        .map(|v| (v.to_string(), i32_type(lmul)))
        .collect();
    let stmts: Vec<Stmt> = shape
        .iter()
        .enumerate()
        .map(|(i, (u, d))| Stmt::synthetic(i, u.iter().copied(), d.iter().copied()))
        .collect();
    let cfg = Cfg {
        blocks: vec![
            BasicBlock { id: 0, stmts: (0..stmts.len()).collect() },
            BasicBlock { id: 1, stmts: vec![] },
        ],
        succs: vec![BTreeSet::from([1]), BTreeSet::new()],
        entry: 0,
        exit: 1,
    };
    FunctionIr::from_parts("straight_line", symbols, stmts, cfg).expect("straight-line IR is valid")
}

/// `stages` values defined one after another and all consumed by a final
/// statement, so the peak pressure is `stages × lmul`.
pub fn wide_chain_ir(stages: usize, lmul: Lmul) -> FunctionIr {
    let names: Vec<String> = (0..stages).map(|i| format!("t{i}")).collect();
    let mut shape: Vec<(Vec<&str>, Vec<&str>)> = names.iter().map(|n| (vec![], vec![n.as_str()])).collect();
    shape.push((names.iter().map(String::as_str).collect(), vec![]));
    let borrowed: Vec<(&[&str], &[&str])> = shape.iter().map(|(u, d)| (u.as_slice(), d.as_slice())).collect();
    straight_line_ir(&borrowed, lmul)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_respects_limits() {
        let p = SynthParams::default();
        for ir in random_batch(3, 200, &p) {
            ir.validate().unwrap();
            assert!(ir.cfg.body_block_count() <= 6);
            assert!(ir.stmts.len() <= 12);
            assert!(ir.symbols.len() <= 6);
        }
    }

    #[test]
    fn batches_are_reproducible() {
        let p = SynthParams::default();
        assert_eq!(random_batch(9, 20, &p), random_batch(9, 20, &p));
    }
}
