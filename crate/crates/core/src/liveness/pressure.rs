use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write};

use serde::{Deserialize, Serialize};

use super::LivenessResult;
use crate::rational;
use crate::rvv_front::{FootprintMode, FunctionIr, Regs, StmtId, VECTOR_REGISTER_COUNT};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiveValue {
    pub name: String,
    pub type_name: String,
    #[serde(with = "rational")]
    pub footprint: Regs,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PressureReport {
    pub function: String,
    pub mode: FootprintMode,
    #[serde(with = "rational")]
    pub pressure: Regs,
    /// `None` only when the function has no statements.
    pub hot_stmt: Option<StmtId>,
    pub hot_line: Option<u32>,
    pub hot_text: Option<String>,
    #[serde(with = "per_stmt")]
    pub per_stmt_pressure: BTreeMap<StmtId, Regs>,
    pub live_at_hot: Vec<LiveValue>,
    pub register_budget: u32,
    pub spills_predicted: bool,
    pub dead_defs: BTreeSet<String>,
}

mod per_stmt {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(m: &BTreeMap<StmtId, Regs>, s: S) -> Result<S::Ok, S::Error> {
        s.collect_map(m.iter().map(|(k, v)| (k.to_string(), v.to_string())))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<StmtId, Regs>, D::Error> {
        use serde::de::Error;
        BTreeMap::<String, String>::deserialize(d)?
            .into_iter()
            .map(|(k, v)| {
                let id = k.parse().map_err(D::Error::custom)?;
                let r = rational::parse(&v).ok_or_else(|| D::Error::custom(format!("bad rational `{v}`")))?;
                Ok((id, r))
            })
            .collect()
    }
}

/// Peak of `Σ footprint(v)` over `v ∈ IN(i) ∪ OUT(i)`, maximized over statements.
pub fn compute_pressure(ir: &FunctionIr, live: &LivenessResult, mode: FootprintMode) -> PressureReport {
    let footprint = |v: &str| ir.symbols.get(v).map_or(Regs::from_integer(0), |t| t.footprint(mode));
    let mut per_stmt_pressure = BTreeMap::new();
    let mut hot: Option<(StmtId, Regs)> = None;
    for s in &ir.stmts {
        let empty = BTreeSet::new();
        let inn = live.live_in.get(&s.id).unwrap_or(&empty);
        let out = live.live_out.get(&s.id).unwrap_or(&empty);
        let p: Regs = inn.union(out).map(|v| footprint(v)).sum();
        per_stmt_pressure.insert(s.id, p);
        // strict comparison keeps the smallest id on ties
        if hot.is_none_or(|(_, best)| p > best) {
            hot = Some((s.id, p));
        }
    }
    let pressure = hot.map_or(Regs::from_integer(0), |(_, p)| p);
    let live_at_hot = hot
        .map(|(id, _)| {
            let inn = &live.live_in[&id];
            inn.union(&live.live_out[&id])
                .map(|v| LiveValue {
                    name: v.clone(),
                    type_name: ir.symbols.get(v).map(|t| t.type_name()).unwrap_or_default(),
                    footprint: footprint(v),
                })
                .collect()
        })
        .unwrap_or_default();
    let used: BTreeSet<&String> = ir.stmts.iter().flat_map(|s| &s.uses).collect();
    let dead_defs = ir
        .stmts
        .iter()
        .flat_map(|s| &s.defs)
        .filter(|v| !used.contains(v))
        .cloned()
        .collect();
    let hot_stmt = hot.map(|(id, _)| id);
    PressureReport {
        function: ir.name.clone(),
        mode,
        pressure,
        hot_stmt,
        hot_line: hot_stmt.map(|id| ir.stmts[id].line).filter(|&l| l > 0),
        hot_text: hot_stmt.map(|id| ir.stmts[id].text.clone()),
        per_stmt_pressure,
        live_at_hot,
        register_budget: VECTOR_REGISTER_COUNT,
        spills_predicted: pressure > Regs::from_integer(VECTOR_REGISTER_COUNT),
        dead_defs,
    }
}

impl PressureReport {
    pub fn headroom(&self) -> Regs {
        let budget = Regs::from_integer(self.register_budget);
        if self.pressure >= budget {
            Regs::from_integer(0)
        } else {
            budget - self.pressure
        }
    }

    /// Compact block used in prompts and logs.
    pub fn render(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for PressureReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        let _ = writeln!(out, "function: {}", self.function);
        let _ = writeln!(out, "footprint mode: {}", self.mode);
        let _ = writeln!(
            out,
            "peak vector register pressure: {} of {} registers",
            self.pressure, self.register_budget
        );
        match (self.hot_stmt, &self.hot_text) {
            (Some(id), Some(text)) => {
                let line = self.hot_line.map(|l| format!("line {l}, ")).unwrap_or_default();
                let _ = writeln!(out, "hot statement: s{id} ({line}`{text}`)");
            }
            _ => {
                let _ = writeln!(out, "hot statement: none");
            }
        }
        if self.live_at_hot.is_empty() {
            let _ = writeln!(out, "live at hot statement: none");
        } else {
            let _ = writeln!(out, "live at hot statement:");
            for v in &self.live_at_hot {
                let _ = writeln!(out, "  {:<12} {:<16} {}", v.name, v.type_name, v.footprint);
            }
        }
        let verdict = if self.spills_predicted {
            format!("exceeds the {}-register budget, spills predicted", self.register_budget)
        } else {
            format!("fits ({} registers of headroom)", self.headroom())
        };
        let _ = writeln!(out, "verdict: {verdict}");
        if !self.dead_defs.is_empty() {
            let names: Vec<_> = self.dead_defs.iter().map(String::as_str).collect();
            let _ = writeln!(out, "warning: defined but never used: {}", names.join(", "));
        }
        f.write_str(out.trim_end())
    }
}
