//! Front end for RVV intrinsic C: statement IR, vector-type decoding and CFG.

pub mod ast;
pub mod cfg;
mod lexer;
mod lower;
pub mod parser;
pub mod types;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use serde::Serialize;

pub use cfg::{build_cfg, BasicBlock, BlockId, Cfg, CfgError, Structure};
pub use lower::UseDef;
pub use parser::{parse_signature, Signature};
pub use types::{parse_vector_type, ElemKind, FootprintMode, Lmul, Regs, VectorType, VECTOR_REGISTER_COUNT};

use ast::FunctionDef;

pub type StmtId = usize;

/// Vector-typed variables of a function, keyed by their IR name.
pub type SymbolTable = BTreeMap<String, VectorType>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("unsupported construct: {construct} (line {line}, column {col})")]
    Unsupported {
        construct: String,
        line: u32,
        col: u32,
    },
    #[error("syntax error at line {line}, column {col}: {message}")]
    Syntax { message: String, line: u32, col: u32 },
    #[error("unbalanced braces (opened before line {line})")]
    UnbalancedBraces { line: u32 },
    #[error("function `{0}` has no definition in the source")]
    FunctionNotFound(String),
    #[error("invalid signature {0}")]
    Signature(String),
    #[error("reference to undeclared vector name `{name}` (line {line}, column {col})")]
    UndeclaredVector { name: String, line: u32, col: u32 },
    #[error(transparent)]
    Cfg(#[from] CfgError),
}

impl ParseError {
    pub fn line(&self) -> Option<u32> {
        match self {
            ParseError::Unsupported { line, .. }
            | ParseError::Syntax { line, .. }
            | ParseError::UnbalancedBraces { line }
            | ParseError::UndeclaredVector { line, .. } => Some(*line),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StmtKind {
    Decl,
    Assign,
    Call,
    Return,
    ScalarOther,
}

/// One statement (or loop/branch condition evaluation).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Stmt {
    pub id: StmtId,
    pub kind: StmtKind,
    pub uses: BTreeSet<String>,
    pub defs: BTreeSet<String>,
    pub line: u32,
    pub col: u32,
    pub text: String,
}

impl Stmt {
    /// Bare statement with the given sets, for synthetic IR.
    pub fn synthetic<I, J>(id: StmtId, uses: I, defs: J) -> Self
    where
        I: IntoIterator,
        I::Item: Into<String>,
        J: IntoIterator,
        J::Item: Into<String>,
    {
        let uses: BTreeSet<String> = uses.into_iter().map(Into::into).collect();
        let defs: BTreeSet<String> = defs.into_iter().map(Into::into).collect();
        let text = format!(
            "def {{{}}} use {{{}}}",
            defs.iter().cloned().collect::<Vec<_>>().join(", "),
            uses.iter().cloned().collect::<Vec<_>>().join(", ")
        );
        Stmt {
            id,
            kind: StmtKind::Assign,
            uses,
            defs,
            line: 0,
            col: 0,
            text,
        }
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum IrError {
    #[error("statement ids must be dense: found {found} at position {index}")]
    NonDenseIds { index: usize, found: StmtId },
    #[error("statement {stmt} references `{name}` which has no vector type")]
    UnknownVariable { stmt: StmtId, name: String },
    #[error(transparent)]
    Cfg(#[from] CfgError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FunctionIr {
    pub name: String,
    /// (name, type as written)
    pub params: Vec<(String, String)>,
    pub symbols: SymbolTable,
    pub stmts: Vec<Stmt>,
    pub cfg: Cfg,
    /// Parsed definition, when the IR came from source.
    pub def: Option<FunctionDef>,
}

impl FunctionIr {
    /// Assembles and validates IR from parts (used for synthetic functions).
    pub fn from_parts(
        name: impl Into<String>,
        symbols: SymbolTable,
        stmts: Vec<Stmt>,
        cfg: Cfg,
    ) -> Result<Self, IrError> {
        let ir = FunctionIr {
            name: name.into(),
            params: Vec::new(),
            symbols,
            stmts,
            cfg,
            def: None,
        };
        ir.validate()?;
        Ok(ir)
    }

    pub fn validate(&self) -> Result<(), IrError> {
        for (index, s) in self.stmts.iter().enumerate() {
            if s.id != index {
                return Err(IrError::NonDenseIds { index, found: s.id });
            }
            if let Some(name) = s.uses.iter().chain(&s.defs).find(|n| !self.symbols.contains_key(*n)) {
                return Err(IrError::UnknownVariable {
                    stmt: s.id,
                    name: name.clone(),
                });
            }
        }
        self.cfg.validate(self.stmts.len())?;
        Ok(())
    }

    pub fn vector_stmt_count(&self) -> usize {
        self.stmts
            .iter()
            .filter(|s| !s.uses.is_empty() || !s.defs.is_empty())
            .count()
    }

    /// Successor statements of every statement, skipping empty blocks.
    pub fn stmt_successors(&self) -> Vec<BTreeSet<StmtId>> {
        let cfg = &self.cfg;
        // first statement reachable from the start of each block
        let mut first: Vec<Option<BTreeSet<StmtId>>> = vec![None; cfg.blocks.len()];
        fn entry_stmts(
            cfg: &Cfg,
            b: BlockId,
            memo: &mut Vec<Option<BTreeSet<StmtId>>>,
            visiting: &mut BTreeSet<BlockId>,
        ) -> BTreeSet<StmtId> {
            if let Some(s) = &memo[b] {
                return s.clone();
            }
            let result = if let Some(&s) = cfg.blocks[b].stmts.first() {
                BTreeSet::from([s])
            } else if !visiting.insert(b) {
                // cycle of empty blocks
                BTreeSet::new()
            } else {
                let mut acc = BTreeSet::new();
                for &succ in &cfg.succs[b] {
                    acc.extend(entry_stmts(cfg, succ, memo, visiting));
                }
                visiting.remove(&b);
                acc
            };
            memo[b] = Some(result.clone());
            result
        }
        let mut out = vec![BTreeSet::new(); self.stmts.len()];
        for block in &cfg.blocks {
            for (i, &s) in block.stmts.iter().enumerate() {
                if let Some(&next) = block.stmts.get(i + 1) {
                    out[s].insert(next);
                } else {
                    for &succ in &cfg.succs[block.id] {
                        let mut visiting = BTreeSet::new();
                        out[s].extend(entry_stmts(cfg, succ, &mut first, &mut visiting));
                    }
                }
            }
        }
        out
    }

    /// Human-readable IR and CFG listing.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "function {}", self.name);
        for (name, ty) in &self.params {
            let _ = writeln!(out, "  param {name}: {ty}");
        }
        let _ = writeln!(out, "symbols:");
        for (name, ty) in &self.symbols {
            let _ = writeln!(out, "  {name}: {ty}");
        }
        let _ = writeln!(out, "blocks:");
        for b in &self.cfg.blocks {
            let mut tags = Vec::new();
            if b.id == self.cfg.entry {
                tags.push("entry");
            }
            if b.id == self.cfg.exit {
                tags.push("exit");
            }
            let succs: Vec<String> = self.cfg.succs[b.id].iter().map(|s| format!("bb{s}")).collect();
            let _ = writeln!(
                out,
                "  bb{}{} -> [{}]",
                b.id,
                if tags.is_empty() {
                    String::new()
                } else {
                    format!(" ({})", tags.join(", "))
                },
                succs.join(", ")
            );
            for &s in &b.stmts {
                let st = &self.stmts[s];
                let _ = writeln!(
                    out,
                    "    s{:<3} L{:<4} {:<12} use={{{}}} def={{{}}}  {}",
                    st.id,
                    st.line,
                    format!("{:?}", st.kind),
                    st.uses.iter().cloned().collect::<Vec<_>>().join(","),
                    st.defs.iter().cloned().collect::<Vec<_>>().join(","),
                    st.text
                );
            }
        }
        out
    }
}

/// Parses the function named by `signature` out of `source`.
pub fn parse_function(source: &str, signature: &str) -> Result<FunctionIr, ParseError> {
    let sig = parse_signature(signature)?;
    parse_function_named(source, &sig.name)
}

pub fn parse_function_named(source: &str, name: &str) -> Result<FunctionIr, ParseError> {
    let def = parser::parse_function_def(source, name)?;
    lower_function(def)
}

fn lower_function(def: FunctionDef) -> Result<FunctionIr, ParseError> {
    let mut lowerer = lower::Lowerer::new();
    for p in &def.params {
        lowerer.declare_param(p);
    }
    let structure = lowerer.lower_block(&def.body)?;
    let built = build_cfg(lowerer.stmts.len(), &structure)?;
    let stmts: Vec<Stmt> = lowerer
        .stmts
        .into_iter()
        .filter_map(|mut s| {
            built.stmt_renumbering.get(&s.id).map(|&new| {
                s.id = new;
                s
            })
        })
        .collect();
    let params = def
        .params
        .iter()
        .filter_map(|p| p.name.clone().map(|n| (n, p.type_string())))
        .collect();
    Ok(FunctionIr {
        name: def.name.clone(),
        params,
        symbols: lowerer.resolver.symbols,
        stmts,
        cfg: built.cfg,
        def: Some(def),
    })
}

/// USE/DEF sets of a single C statement against a symbol table.
///
/// Identifiers absent from `symbols` are treated as scalars unless the
/// statement itself declares them with a vector type.
pub fn extract_use_def(stmt_src: &str, symbols: &SymbolTable) -> Result<UseDef, ParseError> {
    use ast::{ForInit, StmtNode};
    let stmt = parser::parse_single_stmt(stmt_src)?;
    let mut r = lower::TableResolver {
        table: symbols,
        local: Default::default(),
    };
    match &stmt {
        StmtNode::Decl { decl, .. } | StmtNode::For { init: Some(ForInit::Decl(decl)), .. } => {
            Ok(lower::decl_use_def(decl, &mut r)?.0)
        }
        StmtNode::Expr { expr, .. } => lower::expr_use_def(expr, &r),
        StmtNode::Return { value: Some(v), .. } => lower::expr_use_def(v, &r),
        StmtNode::If { cond, .. } | StmtNode::While { cond, .. } | StmtNode::DoWhile { cond, .. } => {
            lower::expr_use_def(cond, &r)
        }
        _ => Ok(UseDef::default()),
    }
}

/// Registers charged for one value of type `t`.
pub fn register_footprint(t: &VectorType, mode: FootprintMode) -> Regs {
    t.footprint(mode)
}
