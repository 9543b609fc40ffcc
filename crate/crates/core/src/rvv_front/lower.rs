//! Lowers a parsed function into statements with USE/DEF sets plus the
//! structured nesting consumed by [`build_cfg`](super::cfg::build_cfg).

use std::collections::{BTreeSet, HashMap, HashSet};

use super::ast::*;
use super::cfg::Structure;
use super::types::{parse_vector_type, VectorType};
use super::{ParseError, Stmt, StmtKind, SymbolTable};

/// Resolves identifiers to vector variables.
pub(crate) trait Resolver {
    /// `Ok(None)` for scalars, pointers, globals and macros.
    fn resolve(&self, name: &str, pos: Pos) -> Result<Option<String>, ParseError>;
    /// Introduces a local; returns the unique name used in the IR.
    fn declare(&mut self, name: &str, ty: Option<VectorType>) -> String;
}

#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct UseDef {
    pub uses: BTreeSet<String>,
    pub defs: BTreeSet<String>,
}

pub(crate) fn declarator_vector_type(base_type: &str, d_ptr: usize, is_array: bool) -> Option<VectorType> {
    if d_ptr > 0 || is_array {
        return None;
    }
    parse_vector_type(&core_type(base_type))
}

fn collect(expr: &Expr, r: &dyn Resolver, out: &mut UseDef) -> Result<(), ParseError> {
    match expr {
        Expr::Ident { name, pos } => {
            if let Some(v) = r.resolve(name, *pos)? {
                out.uses.insert(v);
            }
        }
        Expr::Number(_) | Expr::Str(_) | Expr::Char(_) | Expr::SizeofType(_) => {}
        Expr::Call { callee, args } => {
            if !matches!(callee.as_ref(), Expr::Ident { .. }) {
                collect(callee, r, out)?;
            }
            for a in args {
                collect(a, r, out)?;
            }
        }
        Expr::Index { base, index } => {
            collect(base, r, out)?;
            collect(index, r, out)?;
        }
        Expr::Member { base, .. } => collect(base, r, out)?,
        Expr::PostIncDec { expr, .. } => collect_update(expr, r, out)?,
        Expr::Unary { op, expr } => {
            if matches!(*op, "++" | "--") {
                collect_update(expr, r, out)?;
            } else if *op != "sizeof" {
                collect(expr, r, out)?;
            }
        }
        Expr::Cast { expr, .. } => collect(expr, r, out)?,
        Expr::Binary { lhs, rhs, .. } => {
            collect(lhs, r, out)?;
            collect(rhs, r, out)?;
        }
        Expr::Ternary { cond, then, els } => {
            collect(cond, r, out)?;
            collect(then, r, out)?;
            collect(els, r, out)?;
        }
        Expr::Assign { op, lhs, rhs } => {
            collect(rhs, r, out)?;
            match lhs.as_ref() {
                Expr::Ident { name, pos } => {
                    if let Some(v) = r.resolve(name, *pos)? {
                        if *op != "=" {
                            out.uses.insert(v.clone());
                        }
                        out.defs.insert(v);
                    }
                }
                other => collect(other, r, out)?,
            }
        }
        Expr::Comma(items) | Expr::InitList(items) => {
            for e in items {
                collect(e, r, out)?;
            }
        }
    }
    Ok(())
}

fn collect_update(target: &Expr, r: &dyn Resolver, out: &mut UseDef) -> Result<(), ParseError> {
    if let Expr::Ident { name, pos } = target {
        if let Some(v) = r.resolve(name, *pos)? {
            out.uses.insert(v.clone());
            out.defs.insert(v);
        }
        Ok(())
    } else {
        collect(target, r, out)
    }
}

pub(crate) fn expr_use_def(expr: &Expr, r: &dyn Resolver) -> Result<UseDef, ParseError> {
    let mut out = UseDef::default();
    collect(expr, r, &mut out)?;
    Ok(out)
}

/// USE/DEF of a declaration; declares its names in `r` as a side effect.
pub(crate) fn decl_use_def(decl: &Decl, r: &mut dyn Resolver) -> Result<(UseDef, bool), ParseError> {
    let mut out = UseDef::default();
    let mut has_init = false;
    for d in &decl.declarators {
        if let Some(init) = &d.init {
            collect(init, r, &mut out)?;
            has_init = true;
        }
        let ty = declarator_vector_type(&decl.base_type, d.pointer_depth, !d.array_dims.is_empty());
        let unique = r.declare(&d.name, ty);
        if ty.is_some() && d.init.is_some() {
            out.defs.insert(unique);
        }
    }
    Ok((out, has_init))
}

pub(crate) fn expr_kind(expr: &Expr) -> StmtKind {
    match expr {
        Expr::Assign { .. } | Expr::PostIncDec { .. } => StmtKind::Assign,
        Expr::Unary { op, .. } if matches!(*op, "++" | "--") => StmtKind::Assign,
        Expr::Call { .. } => StmtKind::Call,
        Expr::Comma(items) if items.iter().any(|e| expr_kind(e) == StmtKind::Assign) => {
            StmtKind::Assign
        }
        _ => StmtKind::ScalarOther,
    }
}

/// Function-level resolver with lexical scopes and unique renaming of shadowed names.
pub(crate) struct ScopedResolver {
    scopes: Vec<HashMap<String, (String, Option<VectorType>)>>,
    used_names: HashSet<String>,
    ever_vector: HashSet<String>,
    pub symbols: SymbolTable,
}

impl ScopedResolver {
    pub fn new() -> Self {
        ScopedResolver {
            scopes: vec![HashMap::new()],
            used_names: HashSet::new(),
            ever_vector: HashSet::new(),
            symbols: SymbolTable::default(),
        }
    }

    pub fn push(&mut self) {
        self.scopes.push(HashMap::new());
    }

    pub fn pop(&mut self) {
        self.scopes.pop();
    }
}

impl Resolver for ScopedResolver {
    fn resolve(&self, name: &str, pos: Pos) -> Result<Option<String>, ParseError> {
        for scope in self.scopes.iter().rev() {
            if let Some((unique, ty)) = scope.get(name) {
                return Ok(ty.map(|_| unique.clone()));
            }
        }
        if self.ever_vector.contains(name) {
            return Err(ParseError::UndeclaredVector {
                name: name.to_string(),
                line: pos.line,
                col: pos.col,
            });
        }
        Ok(None)
    }

    fn declare(&mut self, name: &str, ty: Option<VectorType>) -> String {
        let mut unique = name.to_string();
        let mut n = 2;
        while self.used_names.contains(&unique) {
            unique = format!("{name}#{n}");
            n += 1;
        }
        self.used_names.insert(unique.clone());
        if let Some(t) = ty {
            self.ever_vector.insert(name.to_string());
            self.symbols.insert(unique.clone(), t);
        }
        self.scopes
            .last_mut()
            .expect("scope stack")
            .insert(name.to_string(), (unique.clone(), ty));
        unique
    }
}

pub(crate) struct Lowerer {
    pub resolver: ScopedResolver,
    pub stmts: Vec<Stmt>,
}

impl Lowerer {
    pub fn new() -> Self {
        Lowerer {
            resolver: ScopedResolver::new(),
            stmts: Vec::new(),
        }
    }

    fn push_stmt(&mut self, kind: StmtKind, ud: UseDef, pos: Pos, text: String) -> usize {
        let id = self.stmts.len();
        self.stmts.push(Stmt {
            id,
            kind,
            uses: ud.uses,
            defs: ud.defs,
            line: pos.line,
            col: pos.col,
            text,
        });
        id
    }

    fn cond_stmt(&mut self, cond: &Expr, pos: Pos, label: &str) -> Result<usize, ParseError> {
        let ud = expr_use_def(cond, &self.resolver)?;
        Ok(self.push_stmt(StmtKind::ScalarOther, ud, pos, format!("{label} ({cond})")))
    }

    pub fn declare_param(&mut self, p: &Param) {
        if let Some(name) = &p.name {
            let ty = declarator_vector_type(&p.base_type, p.pointer_depth, p.is_array);
            self.resolver.declare(name, ty);
        }
    }

    pub fn lower_block(&mut self, stmts: &[StmtNode]) -> Result<Structure, ParseError> {
        let mut items = Vec::with_capacity(stmts.len());
        for s in stmts {
            items.push(self.lower_stmt(s)?);
        }
        Ok(Structure::Seq(items))
    }

    fn lower_scoped(&mut self, stmt: &StmtNode) -> Result<Structure, ParseError> {
        self.resolver.push();
        let r = self.lower_stmt(stmt);
        self.resolver.pop();
        r
    }

    fn lower_stmt(&mut self, stmt: &StmtNode) -> Result<Structure, ParseError> {
        Ok(match stmt {
            StmtNode::Decl { decl, pos } => {
                let (ud, has_init) = decl_use_def(decl, &mut self.resolver)?;
                if has_init {
                    Structure::Stmt(self.push_stmt(StmtKind::Decl, ud, *pos, decl.to_string()))
                } else {
                    Structure::Seq(Vec::new())
                }
            }
            StmtNode::Expr { expr, pos } => {
                let ud = expr_use_def(expr, &self.resolver)?;
                Structure::Stmt(self.push_stmt(expr_kind(expr), ud, *pos, expr.to_string()))
            }
            StmtNode::If {
                cond,
                then,
                els,
                pos,
            } => {
                let cond = self.cond_stmt(cond, *pos, "if")?;
                let then_branch = Box::new(self.lower_scoped(then)?);
                let else_branch = match els {
                    Some(e) => Some(Box::new(self.lower_scoped(e)?)),
                    None => None,
                };
                Structure::If {
                    cond,
                    then_branch,
                    else_branch,
                }
            }
            StmtNode::While { cond, body, pos } => {
                let guard = self.cond_stmt(cond, *pos, "while")?;
                let body = Box::new(self.lower_scoped(body)?);
                let latch = self.cond_stmt(cond, *pos, "while")?;
                Structure::Loop {
                    guard: Some(guard),
                    test_first: true,
                    body,
                    step: None,
                    cond: Some(latch),
                }
            }
            StmtNode::DoWhile {
                body,
                cond,
                cond_pos,
                ..
            } => {
                let body = Box::new(self.lower_scoped(body)?);
                let latch = self.cond_stmt(cond, *cond_pos, "do-while")?;
                Structure::Loop {
                    guard: None,
                    test_first: false,
                    body,
                    step: None,
                    cond: Some(latch),
                }
            }
            StmtNode::For {
                init,
                cond,
                step,
                body,
                pos,
            } => {
                self.resolver.push();
                let mut seq = Vec::new();
                match init {
                    Some(ForInit::Decl(d)) => {
                        let (ud, has_init) = decl_use_def(d, &mut self.resolver)?;
                        if has_init {
                            seq.push(Structure::Stmt(self.push_stmt(
                                StmtKind::Decl,
                                ud,
                                *pos,
                                d.to_string(),
                            )));
                        }
                    }
                    Some(ForInit::Expr(e)) => {
                        let ud = expr_use_def(e, &self.resolver)?;
                        seq.push(Structure::Stmt(self.push_stmt(
                            expr_kind(e),
                            ud,
                            *pos,
                            e.to_string(),
                        )));
                    }
                    None => {}
                }
                let guard = match cond {
                    Some(c) => Some(self.cond_stmt(c, *pos, "for")?),
                    None => None,
                };
                let body_s = self.lower_scoped(body);
                let body_s = match body_s {
                    Ok(b) => Box::new(b),
                    Err(e) => {
                        self.resolver.pop();
                        return Err(e);
                    }
                };
                let step_id = match step {
                    Some(s) => {
                        let ud = expr_use_def(s, &self.resolver)?;
                        Some(self.push_stmt(expr_kind(s), ud, *pos, s.to_string()))
                    }
                    None => None,
                };
                let latch = match cond {
                    Some(c) => Some(self.cond_stmt(c, *pos, "for")?),
                    None => None,
                };
                self.resolver.pop();
                seq.push(Structure::Loop {
                    guard,
                    test_first: true,
                    body: body_s,
                    step: step_id,
                    cond: latch,
                });
                Structure::Seq(seq)
            }
            StmtNode::Return { value, pos } => {
                let (ud, text) = match value {
                    Some(v) => (expr_use_def(v, &self.resolver)?, format!("return {v}")),
                    None => (UseDef::default(), "return".to_string()),
                };
                Structure::Return(self.push_stmt(StmtKind::Return, ud, *pos, text))
            }
            StmtNode::Break { .. } => Structure::Break,
            StmtNode::Continue { .. } => Structure::Continue,
            StmtNode::Block { stmts, .. } => {
                self.resolver.push();
                let r = self.lower_block(stmts);
                self.resolver.pop();
                r?
            }
            StmtNode::Empty { .. } => Structure::Seq(Vec::new()),
        })
    }
}

/// Flat resolver over a caller-provided symbol table.
pub(crate) struct TableResolver<'a> {
    pub table: &'a SymbolTable,
    pub local: HashMap<String, Option<VectorType>>,
}

impl Resolver for TableResolver<'_> {
    fn resolve(&self, name: &str, _pos: Pos) -> Result<Option<String>, ParseError> {
        if let Some(ty) = self.local.get(name) {
            return Ok(ty.map(|_| name.to_string()));
        }
        Ok(self.table.contains_key(name).then(|| name.to_string()))
    }

    fn declare(&mut self, name: &str, ty: Option<VectorType>) -> String {
        self.local.insert(name.to_string(), ty);
        name.to_string()
    }
}
