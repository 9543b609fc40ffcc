//! Syntax tree for the supported C subset, plus a C pretty-printer.

use std::fmt::{self, Write};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Ident { name: String, pos: Pos },
    Number(String),
    Str(String),
    Char(String),
    Call { callee: Box<Expr>, args: Vec<Expr> },
    Index { base: Box<Expr>, index: Box<Expr> },
    Member { base: Box<Expr>, field: String, arrow: bool },
    PostIncDec { op: &'static str, expr: Box<Expr> },
    Unary { op: &'static str, expr: Box<Expr> },
    SizeofType(String),
    Cast { ty: String, expr: Box<Expr> },
    Binary { op: &'static str, lhs: Box<Expr>, rhs: Box<Expr> },
    Ternary { cond: Box<Expr>, then: Box<Expr>, els: Box<Expr> },
    Assign { op: &'static str, lhs: Box<Expr>, rhs: Box<Expr> },
    Comma(Vec<Expr>),
    InitList(Vec<Expr>),
}

impl Expr {
    /// Name of the directly called function, if the callee is a plain identifier.
    pub fn callee_name(&self) -> Option<&str> {
        match self {
            Expr::Call { callee, .. } => match callee.as_ref() {
                Expr::Ident { name, .. } => Some(name),
                _ => None,
            },
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Declarator {
    pub name: String,
    pub pointer_depth: usize,
    /// Array dimensions; `None` inner entries are `[]`.
    pub array_dims: Vec<Option<Expr>>,
    pub init: Option<Expr>,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decl {
    /// Specifiers and qualifiers as written, space separated.
    pub base_type: String,
    pub declarators: Vec<Declarator>,
}

impl Decl {
    /// Unqualified base type name, e.g. `vint32m1_t` for `const vint32m1_t`.
    pub fn core_type(&self) -> String {
        core_type(&self.base_type)
    }
}

pub fn core_type(base: &str) -> String {
    base.split_whitespace()
        .filter(|w| !is_qualifier(w))
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn is_qualifier(word: &str) -> bool {
    matches!(
        word,
        "const"
            | "volatile"
            | "static"
            | "register"
            | "restrict"
            | "__restrict"
            | "__restrict__"
            | "inline"
            | "__inline"
            | "__inline__"
            | "extern"
            | "auto"
    )
}

#[derive(Debug, Clone, PartialEq)]
pub enum ForInit {
    Decl(Decl),
    Expr(Expr),
}

#[derive(Debug, Clone, PartialEq)]
pub enum StmtNode {
    Decl { decl: Decl, pos: Pos },
    Expr { expr: Expr, pos: Pos },
    If { cond: Expr, then: Box<StmtNode>, els: Option<Box<StmtNode>>, pos: Pos },
    While { cond: Expr, body: Box<StmtNode>, pos: Pos },
    DoWhile { body: Box<StmtNode>, cond: Expr, pos: Pos, cond_pos: Pos },
    For {
        init: Option<ForInit>,
        cond: Option<Expr>,
        step: Option<Expr>,
        body: Box<StmtNode>,
        pos: Pos,
    },
    Return { value: Option<Expr>, pos: Pos },
    Break { pos: Pos },
    Continue { pos: Pos },
    Block { stmts: Vec<StmtNode>, pos: Pos },
    Empty { pos: Pos },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Param {
    pub base_type: String,
    pub pointer_depth: usize,
    pub name: Option<String>,
    pub is_array: bool,
}

impl Param {
    pub fn type_string(&self) -> String {
        let mut s = self.base_type.clone();
        if self.pointer_depth > 0 {
            s.push(' ');
            s.push_str(&"*".repeat(self.pointer_depth));
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FunctionDef {
    pub return_type: String,
    pub name: String,
    pub params: Vec<Param>,
    pub body: Vec<StmtNode>,
    pub pos: Pos,
}

fn prec(e: &Expr) -> u8 {
    match e {
        Expr::Comma(_) => 1,
        Expr::Assign { .. } => 2,
        Expr::Ternary { .. } => 3,
        Expr::Binary { op, .. } => binary_precedence(op).unwrap_or(4),
        Expr::Unary { .. } | Expr::Cast { .. } => 14,
        _ => 15,
    }
}

pub fn binary_precedence(op: &str) -> Option<u8> {
    Some(match op {
        "||" => 4,
        "&&" => 5,
        "|" => 6,
        "^" => 7,
        "&" => 8,
        "==" | "!=" => 9,
        "<" | ">" | "<=" | ">=" => 10,
        "<<" | ">>" => 11,
        "+" | "-" => 12,
        "*" | "/" | "%" => 13,
        _ => return None,
    })
}

fn write_operand(f: &mut fmt::Formatter<'_>, e: &Expr, min_prec: u8) -> fmt::Result {
    if prec(e) < min_prec {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Ident { name, .. } => f.write_str(name),
            Expr::Number(s) | Expr::Str(s) | Expr::Char(s) => f.write_str(s),
            Expr::Call { callee, args } => {
                write_operand(f, callee, 15)?;
                f.write_char('(')?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write_operand(f, a, 2)?;
                }
                f.write_char(')')
            }
            Expr::Index { base, index } => {
                write_operand(f, base, 15)?;
                write!(f, "[{index}]")
            }
            Expr::Member { base, field, arrow } => {
                write_operand(f, base, 15)?;
                write!(f, "{}{field}", if *arrow { "->" } else { "." })
            }
            Expr::PostIncDec { op, expr } => {
                write_operand(f, expr, 15)?;
                f.write_str(op)
            }
            Expr::Unary { op, expr } => {
                f.write_str(op)?;
                if *op == "sizeof" {
                    f.write_char(' ')?;
                }
                // avoid `- -x` collapsing into `--x`
                if matches!(expr.as_ref(), Expr::Unary { .. }) {
                    write!(f, "({expr})")
                } else {
                    write_operand(f, expr, 14)
                }
            }
            Expr::SizeofType(t) => write!(f, "sizeof({t})"),
            Expr::Cast { ty, expr } => {
                write!(f, "({ty})")?;
                write_operand(f, expr, 14)
            }
            Expr::Binary { op, lhs, rhs } => {
                let p = binary_precedence(op).unwrap_or(4);
                write_operand(f, lhs, p)?;
                write!(f, " {op} ")?;
                write_operand(f, rhs, p + 1)
            }
            Expr::Ternary { cond, then, els } => {
                write_operand(f, cond, 4)?;
                f.write_str(" ? ")?;
                write_operand(f, then, 1)?;
                f.write_str(" : ")?;
                write_operand(f, els, 3)
            }
            Expr::Assign { op, lhs, rhs } => {
                write_operand(f, lhs, 14)?;
                write!(f, " {op} ")?;
                write_operand(f, rhs, 2)
            }
            Expr::Comma(items) => {
                for (i, e) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write_operand(f, e, 2)?;
                }
                Ok(())
            }
            Expr::InitList(items) => {
                f.write_char('{')?;
                for (i, e) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write_operand(f, e, 2)?;
                }
                f.write_char('}')
            }
        }
    }
}

impl fmt::Display for Declarator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", "*".repeat(self.pointer_depth), self.name)?;
        for d in &self.array_dims {
            match d {
                Some(e) => write!(f, "[{e}]")?,
                None => f.write_str("[]")?,
            }
        }
        if let Some(init) = &self.init {
            write!(f, " = ")?;
            write_operand(f, init, 2)?;
        }
        Ok(())
    }
}

impl fmt::Display for Decl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.base_type)?;
        for (i, d) in self.declarators.iter().enumerate() {
            f.write_str(if i == 0 { " " } else { ", " })?;
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.base_type)?;
        if self.pointer_depth > 0 || self.name.is_some() {
            f.write_char(' ')?;
        }
        f.write_str(&"*".repeat(self.pointer_depth))?;
        if let Some(n) = &self.name {
            f.write_str(n)?;
        }
        if self.is_array {
            f.write_str("[]")?;
        }
        Ok(())
    }
}

fn indent(out: &mut String, depth: usize) {
    for _ in 0..depth {
        out.push_str("    ");
    }
}

fn write_body(out: &mut String, body: &StmtNode, depth: usize) {
    match body {
        StmtNode::Block { .. } => {
            out.push(' ');
            write_stmt_inline(out, body, depth);
        }
        other => {
            out.push_str(" {\n");
            write_stmt(out, other, depth + 1);
            indent(out, depth);
            out.push('}');
        }
    }
}

fn write_stmt_inline(out: &mut String, stmt: &StmtNode, depth: usize) {
    if let StmtNode::Block { stmts, .. } = stmt {
        out.push_str("{\n");
        for s in stmts {
            write_stmt(out, s, depth + 1);
        }
        indent(out, depth);
        out.push('}');
    }
}

/// Appends `stmt` as C source at the given indentation depth.
pub fn write_stmt(out: &mut String, stmt: &StmtNode, depth: usize) {
    indent(out, depth);
    match stmt {
        StmtNode::Decl { decl, .. } => {
            let _ = writeln!(out, "{decl};");
        }
        StmtNode::Expr { expr, .. } => {
            let _ = writeln!(out, "{expr};");
        }
        StmtNode::If { cond, then, els, .. } => {
            let _ = write!(out, "if ({cond})");
            write_body(out, then, depth);
            if let Some(e) = els {
                out.push_str(" else");
                if matches!(e.as_ref(), StmtNode::If { .. }) {
                    out.push(' ');
                    let mut nested = String::new();
                    write_stmt(&mut nested, e, depth);
                    out.push_str(nested.trim_start());
                    return;
                }
                write_body(out, e, depth);
            }
            out.push('\n');
        }
        StmtNode::While { cond, body, .. } => {
            let _ = write!(out, "while ({cond})");
            write_body(out, body, depth);
            out.push('\n');
        }
        StmtNode::DoWhile { body, cond, .. } => {
            out.push_str("do");
            write_body(out, body, depth);
            let _ = writeln!(out, " while ({cond});");
        }
        StmtNode::For {
            init,
            cond,
            step,
            body,
            ..
        } => {
            out.push_str("for (");
            match init {
                Some(ForInit::Decl(d)) => {
                    let _ = write!(out, "{d}");
                }
                Some(ForInit::Expr(e)) => {
                    let _ = write!(out, "{e}");
                }
                None => {}
            }
            out.push(';');
            if let Some(c) = cond {
                let _ = write!(out, " {c}");
            }
            out.push(';');
            if let Some(s) = step {
                let _ = write!(out, " {s}");
            }
            out.push(')');
            write_body(out, body, depth);
            out.push('\n');
        }
        StmtNode::Return { value, .. } => match value {
            Some(v) => {
                let _ = writeln!(out, "return {v};");
            }
            None => out.push_str("return;\n"),
        },
        StmtNode::Break { .. } => out.push_str("break;\n"),
        StmtNode::Continue { .. } => out.push_str("continue;\n"),
        StmtNode::Block { .. } => {
            write_stmt_inline(out, stmt, depth);
            out.push('\n');
        }
        StmtNode::Empty { .. } => out.push_str(";\n"),
    }
}

impl FunctionDef {
    pub fn header(&self) -> String {
        let params = if self.params.is_empty() {
            "void".to_string()
        } else {
            self.params
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join(", ")
        };
        format!("{} {}({})", self.return_type, self.name, params)
    }

    /// Renders the function back to compilable C.
    pub fn to_c(&self) -> String {
        let mut out = self.header();
        out.push_str(" {\n");
        for s in &self.body {
            write_stmt(&mut out, s, 1);
        }
        out.push_str("}\n");
        out
    }
}
