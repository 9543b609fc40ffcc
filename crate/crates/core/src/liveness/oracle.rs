//! Path-enumeration liveness, used only to cross-check the dataflow solver.
//!
//! `v` is live into statement `i` iff some path starting at `i` reaches a use
//! of `v` before any definition of it. Paths may visit a statement at most
//! twice, which covers every simple path plus one trip around each loop.

use std::collections::BTreeSet;

use super::{LivenessResult, VarSet};
use crate::rvv_front::{FunctionIr, StmtId};

const MAX_VISITS: u8 = 2;
const MAX_STEPS: usize = 2_000_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("a path from s{from} is longer than the bound of {bound} statements")]
    PathTooLong { from: StmtId, bound: usize },
    #[error("path enumeration exceeded {0} steps")]
    Explosion(usize),
}

pub fn oracle_liveness(ir: &FunctionIr, path_bound: usize) -> Result<LivenessResult, OracleError> {
    let succs = ir.stmt_successors();
    let mut search = Search {
        ir,
        succs: &succs,
        bound: path_bound,
        steps: 0,
        visits: vec![0; ir.stmts.len()],
        universe: ir.stmts.iter().flat_map(|s| s.uses.iter().chain(&s.defs).cloned()).collect(),
    };
    let mut result = LivenessResult::default();
    for s in &ir.stmts {
        let live_in = search.live_from(&[s.id])?;
        let starts: Vec<StmtId> = succs[s.id].iter().copied().collect();
        let live_out = search.live_from(&starts)?;
        result.live_in.insert(s.id, live_in);
        result.live_out.insert(s.id, live_out);
    }
    Ok(result)
}

struct Search<'a> {
    ir: &'a FunctionIr,
    succs: &'a [BTreeSet<StmtId>],
    bound: usize,
    steps: usize,
    visits: Vec<u8>,
    universe: VarSet,
}

impl Search<'_> {
    fn live_from(&mut self, starts: &[StmtId]) -> Result<VarSet, OracleError> {
        let mut found = VarSet::new();
        for &s in starts {
            self.walk(s, s, 1, &VarSet::new(), &mut found)?;
        }
        Ok(found)
    }

    fn walk(
        &mut self,
        origin: StmtId,
        node: StmtId,
        depth: usize,
        killed: &VarSet,
        found: &mut VarSet,
    ) -> Result<(), OracleError> {
        self.steps += 1;
        if self.steps > MAX_STEPS {
            return Err(OracleError::Explosion(MAX_STEPS));
        }
        if depth > self.bound {
            return Err(OracleError::PathTooLong { from: origin, bound: self.bound });
        }
        let stmt = &self.ir.stmts[node];
        for v in &stmt.uses {
            if !killed.contains(v) {
                found.insert(v.clone());
            }
        }
        let mut killed = killed.clone();
        killed.extend(stmt.defs.iter().cloned());
        // nothing left to learn on this path
        if self.universe.iter().all(|v| killed.contains(v) || found.contains(v)) {
            return Ok(());
        }
        self.visits[node] += 1;
        for &next in &self.succs[node] {
            if self.visits[next] < MAX_VISITS {
                self.walk(origin, next, depth + 1, &killed, found)?;
            }
        }
        self.visits[node] -= 1;
        Ok(())
    }
}
