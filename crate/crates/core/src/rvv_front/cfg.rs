//! Control-flow graph construction from structured statement nesting.
//!
//! Pre-tested loops are laid out in rotated form: the condition is evaluated
//! once as a guard in the preheader and again at the end of the body, so a
//! simple loop is a single block with a self back edge.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::Serialize;

use super::StmtId;

pub type BlockId = usize;

/// Statement nesting handed to [`build_cfg`].
#[derive(Debug, Clone, PartialEq)]
pub enum Structure {
    Stmt(StmtId),
    Seq(Vec<Structure>),
    If {
        cond: StmtId,
        then_branch: Box<Structure>,
        else_branch: Option<Box<Structure>>,
    },
    Loop {
        /// Condition copy evaluated before the first iteration (`while`/`for`).
        /// `None` with `test_first` means an omitted `for` condition.
        guard: Option<StmtId>,
        test_first: bool,
        body: Box<Structure>,
        step: Option<StmtId>,
        /// Condition copy evaluated at the end of every iteration.
        cond: Option<StmtId>,
    },
    Return(StmtId),
    Break,
    Continue,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BasicBlock {
    pub id: BlockId,
    pub stmts: Vec<StmtId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Cfg {
    pub blocks: Vec<BasicBlock>,
    pub succs: Vec<BTreeSet<BlockId>>,
    pub entry: BlockId,
    pub exit: BlockId,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CfgError {
    #[error("`{0}` outside of a loop")]
    JumpOutsideLoop(&'static str),
    #[error("block {0} has no successor")]
    DeadEnd(BlockId),
    #[error("block {0} is unreachable from entry")]
    Unreachable(BlockId),
    #[error("statement {0} appears in {1} blocks")]
    StmtPlacement(StmtId, usize),
    #[error("exit block must be empty and have no successors")]
    BadExit,
    #[error("entry or exit block id out of range")]
    BadEndpoints,
}

impl Cfg {
    pub fn preds(&self) -> Vec<BTreeSet<BlockId>> {
        let mut preds = vec![BTreeSet::new(); self.blocks.len()];
        for (b, succs) in self.succs.iter().enumerate() {
            for &s in succs {
                preds[s].insert(b);
            }
        }
        preds
    }

    pub fn block_of(&self) -> BTreeMap<StmtId, BlockId> {
        let mut map = BTreeMap::new();
        for b in &self.blocks {
            for &s in &b.stmts {
                map.insert(s, b.id);
            }
        }
        map
    }

    /// Number of non-synthetic blocks.
    pub fn body_block_count(&self) -> usize {
        self.blocks.len() - 1
    }

    pub fn reachable(&self) -> BTreeSet<BlockId> {
        let mut seen = BTreeSet::from([self.entry]);
        let mut queue = VecDeque::from([self.entry]);
        while let Some(b) = queue.pop_front() {
            for &s in &self.succs[b] {
                if seen.insert(s) {
                    queue.push_back(s);
                }
            }
        }
        seen
    }

    /// Checks the structural invariants against `stmt_count` statements.
    pub fn validate(&self, stmt_count: usize) -> Result<(), CfgError> {
        let n = self.blocks.len();
        if self.entry >= n || self.exit >= n || self.succs.len() != n {
            return Err(CfgError::BadEndpoints);
        }
        if !self.blocks[self.exit].stmts.is_empty() || !self.succs[self.exit].is_empty() {
            return Err(CfgError::BadExit);
        }
        for b in 0..n {
            if b != self.exit && self.succs[b].is_empty() {
                return Err(CfgError::DeadEnd(b));
            }
        }
        let reach = self.reachable();
        if let Some(b) = (0..n).find(|b| !reach.contains(b)) {
            return Err(CfgError::Unreachable(b));
        }
        let mut seen = vec![0usize; stmt_count];
        for b in &self.blocks {
            for &s in &b.stmts {
                if s < stmt_count {
                    seen[s] += 1;
                }
            }
        }
        if let Some((s, &c)) = seen.iter().enumerate().find(|(_, &c)| c != 1) {
            return Err(CfgError::StmtPlacement(s, c));
        }
        Ok(())
    }
}

const EXIT_PLACEHOLDER: BlockId = usize::MAX;

struct Builder {
    blocks: Vec<Vec<StmtId>>,
    succs: Vec<BTreeSet<BlockId>>,
    cur: Option<BlockId>,
    loops: Vec<LoopTargets>,
}

struct LoopTargets {
    after: BlockId,
    continues: Vec<BlockId>,
}

impl Builder {
    fn new_block(&mut self) -> BlockId {
        self.blocks.push(Vec::new());
        self.succs.push(BTreeSet::new());
        self.blocks.len() - 1
    }

    fn edge(&mut self, from: BlockId, to: BlockId) {
        self.succs[from].insert(to);
    }

    /// Current block, opening a fresh (unreachable) one after a jump.
    fn current(&mut self) -> BlockId {
        match self.cur {
            Some(b) => b,
            None => {
                let b = self.new_block();
                self.cur = Some(b);
                b
            }
        }
    }

    fn emit(&mut self, s: StmtId) {
        let b = self.current();
        self.blocks[b].push(s);
    }

    fn lower(&mut self, node: &Structure) -> Result<(), CfgError> {
        match node {
            Structure::Stmt(s) => self.emit(*s),
            Structure::Seq(items) => {
                for item in items {
                    self.lower(item)?;
                }
            }
            Structure::If {
                cond,
                then_branch,
                else_branch,
            } => {
                self.emit(*cond);
                let head = self.current();
                let then_block = self.new_block();
                self.edge(head, then_block);
                self.cur = Some(then_block);
                self.lower(then_branch)?;
                let then_end = self.cur;
                let else_end = match else_branch {
                    Some(e) => {
                        let else_block = self.new_block();
                        self.edge(head, else_block);
                        self.cur = Some(else_block);
                        self.lower(e)?;
                        self.cur
                    }
                    None => Some(head),
                };
                let join = self.new_block();
                for end in [then_end, else_end].into_iter().flatten() {
                    self.edge(end, join);
                }
                self.cur = Some(join);
            }
            Structure::Loop {
                guard,
                test_first,
                body,
                step,
                cond,
            } => {
                if let Some(g) = guard {
                    self.emit(*g);
                }
                let pre = self.current();
                let body_block = self.new_block();
                let after = self.new_block();
                self.edge(pre, body_block);
                if *test_first {
                    self.edge(pre, after);
                }
                self.loops.push(LoopTargets {
                    after,
                    continues: Vec::new(),
                });
                self.cur = Some(body_block);
                self.lower(body)?;
                let targets = self.loops.pop().expect("loop stack");
                let latch = if targets.continues.is_empty() {
                    self.cur
                } else {
                    let latch = self.new_block();
                    if let Some(end) = self.cur {
                        self.edge(end, latch);
                    }
                    for c in targets.continues {
                        self.edge(c, latch);
                    }
                    Some(latch)
                };
                // a latch that nothing reaches leaves step/cond out of the graph
                let latch = latch.unwrap_or_else(|| self.new_block());
                self.cur = Some(latch);
                if let Some(s) = step {
                    self.emit(*s);
                }
                if let Some(c) = cond {
                    self.emit(*c);
                }
                self.edge(latch, body_block);
                self.edge(latch, after);
                self.cur = Some(after);
            }
            Structure::Return(s) => {
                self.emit(*s);
                let b = self.current();
                self.edge(b, EXIT_PLACEHOLDER);
                self.cur = None;
            }
            Structure::Break => {
                let b = self.current();
                let after = self
                    .loops
                    .last()
                    .ok_or(CfgError::JumpOutsideLoop("break"))?
                    .after;
                self.edge(b, after);
                self.cur = None;
            }
            Structure::Continue => {
                let b = self.current();
                self.loops
                    .last_mut()
                    .ok_or(CfgError::JumpOutsideLoop("continue"))?
                    .continues
                    .push(b);
                self.cur = None;
            }
        }
        Ok(())
    }
}

/// Result of CFG construction; statements in pruned (unreachable) blocks are
/// reported so the caller can drop them.
#[derive(Debug, Clone)]
pub struct BuiltCfg {
    pub cfg: Cfg,
    /// Old statement id → new dense id, for statements that survived.
    pub stmt_renumbering: BTreeMap<StmtId, StmtId>,
}

/// Builds the CFG for `structure` over statements `0..stmt_count`.
///
/// Unreachable blocks are pruned and surviving statements renumbered densely
/// in their original order.
pub fn build_cfg(stmt_count: usize, structure: &Structure) -> Result<BuiltCfg, CfgError> {
    let mut b = Builder {
        blocks: Vec::new(),
        succs: Vec::new(),
        cur: None,
        loops: Vec::new(),
    };
    let entry = b.new_block();
    b.cur = Some(entry);
    b.lower(structure)?;
    if let Some(end) = b.cur {
        b.edge(end, EXIT_PLACEHOLDER);
    }
    let exit = b.new_block();
    for succs in &mut b.succs {
        if succs.remove(&EXIT_PLACEHOLDER) {
            succs.insert(exit);
        }
    }

    // prune blocks unreachable from entry, always keeping the exit
    let raw = Cfg {
        blocks: b
            .blocks
            .iter()
            .enumerate()
            .map(|(id, stmts)| BasicBlock {
                id,
                stmts: stmts.clone(),
            })
            .collect(),
        succs: b.succs.clone(),
        entry,
        exit,
    };
    let mut keep = raw.reachable();
    keep.insert(exit);
    let new_id: BTreeMap<BlockId, BlockId> =
        keep.iter().enumerate().map(|(new, &old)| (old, new)).collect();

    let mut surviving: Vec<StmtId> = keep
        .iter()
        .flat_map(|&old| b.blocks[old].iter().copied())
        .collect();
    surviving.sort_unstable();
    let stmt_renumbering: BTreeMap<StmtId, StmtId> = surviving
        .iter()
        .enumerate()
        .map(|(new, &old)| (old, new))
        .collect();
    debug_assert!(surviving.iter().all(|&s| s < stmt_count));

    let blocks = keep
        .iter()
        .map(|&old| BasicBlock {
            id: new_id[&old],
            stmts: b.blocks[old].iter().map(|s| stmt_renumbering[s]).collect(),
        })
        .collect();
    let succs = keep
        .iter()
        .map(|&old| b.succs[old].iter().map(|s| new_id[s]).collect())
        .collect();
    let cfg = Cfg {
        blocks,
        succs,
        entry: new_id[&entry],
        exit: new_id[&exit],
    };
    Ok(BuiltCfg {
        cfg,
        stmt_renumbering,
    })
}
