//! Recursive-descent parser for function bodies written in the supported C subset.

use super::ast::*;
use super::lexer::{tokenize, Tok, Token};
use super::ParseError;

const TYPE_KEYWORDS: [&str; 16] = [
    "void", "char", "short", "int", "long", "float", "double", "signed", "unsigned", "_Bool",
    "bool", "struct", "union", "enum", "_Float16", "__fp16",
];

fn is_type_word(word: &str) -> bool {
    TYPE_KEYWORDS.contains(&word) || is_qualifier(word) || is_typedef_name(word)
}

/// Typedef names are recognized by convention: `*_t` plus a few common ones.
fn is_typedef_name(word: &str) -> bool {
    (word.ends_with("_t") && word.len() > 2) || matches!(word, "FILE" | "float16_t")
}

/// A parsed C function prototype.
#[derive(Debug, Clone, PartialEq)]
pub struct Signature {
    pub return_type: String,
    pub name: String,
    pub params: Vec<Param>,
}

pub struct Parser {
    toks: Vec<Token>,
    pos: usize,
    eof_line: u32,
}

impl Parser {
    pub fn new(src: &str) -> Result<Self, ParseError> {
        let toks = tokenize(src)?;
        let eof_line = toks.last().map_or(1, |t| t.line);
        Ok(Parser {
            toks,
            pos: 0,
            eof_line,
        })
    }

    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.pos)
    }

    fn peek_at(&self, n: usize) -> Option<&Token> {
        self.toks.get(self.pos + n)
    }

    fn here(&self) -> Pos {
        match self.peek() {
            Some(t) => Pos {
                line: t.line,
                col: t.col,
            },
            None => Pos {
                line: self.eof_line,
                col: 1,
            },
        }
    }

    fn at_punct(&self, p: &str) -> bool {
        self.peek().is_some_and(|t| t.is_punct(p))
    }

    fn at_ident(&self, word: &str) -> bool {
        self.peek().and_then(Token::ident) == Some(word)
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        if self.at_punct(p) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        let pos = self.here();
        Err(ParseError::Syntax {
            message: message.into(),
            line: pos.line,
            col: pos.col,
        })
    }

    fn expect_punct(&mut self, p: &str) -> Result<(), ParseError> {
        if self.eat_punct(p) {
            return Ok(());
        }
        if p == "}" && self.peek().is_none() {
            return Err(ParseError::UnbalancedBraces {
                line: self.eof_line,
            });
        }
        match self.peek() {
            Some(t) => self.error(format!("expected `{p}`, found {}", t.describe())),
            None => self.error(format!("expected `{p}`, found end of input")),
        }
    }

    fn expect_ident(&mut self) -> Result<String, ParseError> {
        match self.peek().map(|t| t.tok.clone()) {
            Some(Tok::Ident(s)) => {
                self.pos += 1;
                Ok(s)
            }
            Some(_) => self.error(format!(
                "expected identifier, found {}",
                self.peek().unwrap().describe()
            )),
            None => self.error("expected identifier, found end of input"),
        }
    }

    fn unsupported<T>(&self, construct: &str) -> Result<T, ParseError> {
        let pos = self.here();
        Err(ParseError::Unsupported {
            construct: construct.to_string(),
            line: pos.line,
            col: pos.col,
        })
    }

    // ---- declarations -------------------------------------------------

    /// Does the upcoming token sequence start a declaration?
    fn at_declaration(&self) -> bool {
        let Some(word) = self.peek().and_then(Token::ident) else {
            return false;
        };
        if TYPE_KEYWORDS.contains(&word) || is_qualifier(word) {
            return true;
        }
        if is_typedef_name(word) {
            // `size_t x`, `vint32m1_t *p`; not `foo_t(...)` calls
            return self
                .peek_at(1)
                .is_some_and(|t| t.ident().is_some() || t.is_punct("*"));
        }
        false
    }

    fn parse_specifiers(&mut self) -> Result<String, ParseError> {
        let mut words = Vec::new();
        while let Some(word) = self.peek().and_then(Token::ident).map(str::to_string) {
            if !is_type_word(&word) {
                break;
            }
            // a typedef name only counts once; afterwards it's the declarator
            if is_typedef_name(&word) && words.iter().any(|w: &String| !is_qualifier(w)) {
                break;
            }
            self.pos += 1;
            if matches!(word.as_str(), "struct" | "union" | "enum") {
                let tag = self.expect_ident()?;
                if self.at_punct("{") {
                    return self.unsupported("inline struct definition");
                }
                words.push(format!("{word} {tag}"));
            } else {
                words.push(word);
            }
        }
        if words.is_empty() {
            return self.error("expected a type");
        }
        Ok(words.join(" "))
    }

    fn parse_pointer_depth(&mut self) -> usize {
        let mut depth = 0;
        loop {
            if self.eat_punct("*") {
                depth += 1;
            } else if self.peek().and_then(Token::ident).is_some_and(is_qualifier) {
                self.pos += 1;
            } else {
                return depth;
            }
        }
    }

    fn parse_declarator(&mut self) -> Result<Declarator, ParseError> {
        let pointer_depth = self.parse_pointer_depth();
        let pos = self.here();
        let name = self.expect_ident()?;
        let mut array_dims = Vec::new();
        while self.eat_punct("[") {
            if self.eat_punct("]") {
                array_dims.push(None);
            } else {
                let e = self.parse_assign()?;
                self.expect_punct("]")?;
                array_dims.push(Some(e));
            }
        }
        let init = if self.eat_punct("=") {
            Some(self.parse_initializer()?)
        } else {
            None
        };
        Ok(Declarator {
            name,
            pointer_depth,
            array_dims,
            init,
            pos,
        })
    }

    fn parse_initializer(&mut self) -> Result<Expr, ParseError> {
        if self.eat_punct("{") {
            let mut items = Vec::new();
            while !self.at_punct("}") {
                items.push(self.parse_initializer()?);
                if !self.eat_punct(",") {
                    break;
                }
            }
            self.expect_punct("}")?;
            Ok(Expr::InitList(items))
        } else {
            self.parse_assign()
        }
    }

    fn parse_decl(&mut self) -> Result<Decl, ParseError> {
        let base_type = self.parse_specifiers()?;
        let mut declarators = vec![self.parse_declarator()?];
        while self.eat_punct(",") {
            declarators.push(self.parse_declarator()?);
        }
        Ok(Decl {
            base_type,
            declarators,
        })
    }

    fn parse_param(&mut self) -> Result<Param, ParseError> {
        let base_type = self.parse_specifiers()?;
        let pointer_depth = self.parse_pointer_depth();
        let name = match self.peek().and_then(Token::ident) {
            Some(_) => Some(self.expect_ident()?),
            None => None,
        };
        let mut is_array = false;
        while self.eat_punct("[") {
            while !self.at_punct("]") {
                if self.peek().is_none() {
                    return self.error("unterminated array parameter");
                }
                self.pos += 1;
            }
            self.expect_punct("]")?;
            is_array = true;
        }
        Ok(Param {
            base_type,
            pointer_depth,
            name,
            is_array,
        })
    }

    fn parse_param_list(&mut self) -> Result<Vec<Param>, ParseError> {
        self.expect_punct("(")?;
        let mut params = Vec::new();
        if self.eat_punct(")") {
            return Ok(params);
        }
        if self.at_ident("void") && self.peek_at(1).is_some_and(|t| t.is_punct(")")) {
            self.pos += 2;
            return Ok(params);
        }
        loop {
            if self.eat_punct("...") {
                return self.unsupported("variadic parameters");
            }
            params.push(self.parse_param()?);
            if self.eat_punct(")") {
                return Ok(params);
            }
            self.expect_punct(",")?;
        }
    }

    // ---- statements -------------------------------------------------

    fn parse_block_body(&mut self) -> Result<Vec<StmtNode>, ParseError> {
        let mut stmts = Vec::new();
        loop {
            if self.eat_punct("}") {
                return Ok(stmts);
            }
            if self.peek().is_none() {
                return Err(ParseError::UnbalancedBraces {
                    line: self.eof_line,
                });
            }
            stmts.push(self.parse_stmt()?);
        }
    }

    pub fn parse_stmt(&mut self) -> Result<StmtNode, ParseError> {
        let pos = self.here();
        if self.eat_punct("{") {
            let stmts = self.parse_block_body()?;
            return Ok(StmtNode::Block { stmts, pos });
        }
        if self.eat_punct(";") {
            return Ok(StmtNode::Empty { pos });
        }
        if let Some(word) = self.peek().and_then(Token::ident).map(str::to_string) {
            match word.as_str() {
                "goto" => return self.unsupported("goto"),
                "switch" => return self.unsupported("switch"),
                "case" | "default" => return self.unsupported(&word),
                "asm" | "__asm__" | "__asm" => return self.unsupported("inline assembly"),
                "if" => {
                    self.pos += 1;
                    self.expect_punct("(")?;
                    let cond = self.parse_expr()?;
                    self.expect_punct(")")?;
                    let then = Box::new(self.parse_stmt()?);
                    let els = if self.at_ident("else") {
                        self.pos += 1;
                        Some(Box::new(self.parse_stmt()?))
                    } else {
                        None
                    };
                    return Ok(StmtNode::If {
                        cond,
                        then,
                        els,
                        pos,
                    });
                }
                "while" => {
                    self.pos += 1;
                    self.expect_punct("(")?;
                    let cond = self.parse_expr()?;
                    self.expect_punct(")")?;
                    let body = Box::new(self.parse_stmt()?);
                    return Ok(StmtNode::While { cond, body, pos });
                }
                "do" => {
                    self.pos += 1;
                    let body = Box::new(self.parse_stmt()?);
                    if !self.at_ident("while") {
                        return self.error("expected `while` after do-body");
                    }
                    self.pos += 1;
                    self.expect_punct("(")?;
                    let cond_pos = self.here();
                    let cond = self.parse_expr()?;
                    self.expect_punct(")")?;
                    self.expect_punct(";")?;
                    return Ok(StmtNode::DoWhile {
                        body,
                        cond,
                        pos,
                        cond_pos,
                    });
                }
                "for" => {
                    self.pos += 1;
                    self.expect_punct("(")?;
                    let init = if self.eat_punct(";") {
                        None
                    } else if self.at_declaration() {
                        let d = self.parse_decl()?;
                        self.expect_punct(";")?;
                        Some(ForInit::Decl(d))
                    } else {
                        let e = self.parse_expr()?;
                        self.expect_punct(";")?;
                        Some(ForInit::Expr(e))
                    };
                    let cond = if self.at_punct(";") {
                        None
                    } else {
                        Some(self.parse_expr()?)
                    };
                    self.expect_punct(";")?;
                    let step = if self.at_punct(")") {
                        None
                    } else {
                        Some(self.parse_expr()?)
                    };
                    self.expect_punct(")")?;
                    let body = Box::new(self.parse_stmt()?);
                    return Ok(StmtNode::For {
                        init,
                        cond,
                        step,
                        body,
                        pos,
                    });
                }
                "return" => {
                    self.pos += 1;
                    let value = if self.at_punct(";") {
                        None
                    } else {
                        Some(self.parse_expr()?)
                    };
                    self.expect_punct(";")?;
                    return Ok(StmtNode::Return { value, pos });
                }
                "break" => {
                    self.pos += 1;
                    self.expect_punct(";")?;
                    return Ok(StmtNode::Break { pos });
                }
                "continue" => {
                    self.pos += 1;
                    self.expect_punct(";")?;
                    return Ok(StmtNode::Continue { pos });
                }
                "typedef" => return self.unsupported("local typedef"),
                _ => {
                    // `label:` is an unstructured jump target
                    if self.peek_at(1).is_some_and(|t| t.is_punct(":")) {
                        return self.unsupported("label");
                    }
                }
            }
        }
        if self.at_declaration() {
            let decl = self.parse_decl()?;
            self.expect_punct(";")?;
            return Ok(StmtNode::Decl { decl, pos });
        }
        let expr = self.parse_expr()?;
        self.expect_punct(";")?;
        Ok(StmtNode::Expr { expr, pos })
    }

    // ---- expressions -------------------------------------------------

    pub fn parse_expr(&mut self) -> Result<Expr, ParseError> {
        let first = self.parse_assign()?;
        if !self.at_punct(",") {
            return Ok(first);
        }
        let mut items = vec![first];
        while self.eat_punct(",") {
            items.push(self.parse_assign()?);
        }
        Ok(Expr::Comma(items))
    }

    fn parse_assign(&mut self) -> Result<Expr, ParseError> {
        let lhs = self.parse_ternary()?;
        const OPS: [&str; 11] = ["=", "+=", "-=", "*=", "/=", "%=", "<<=", ">>=", "&=", "^=", "|="];
        if let Some(Tok::Punct(p)) = self.peek().map(|t| &t.tok) {
            if let Some(op) = OPS.iter().find(|o| *o == p) {
                self.pos += 1;
                let rhs = self.parse_assign()?;
                return Ok(Expr::Assign {
                    op,
                    lhs: Box::new(lhs),
                    rhs: Box::new(rhs),
                });
            }
        }
        Ok(lhs)
    }

    fn parse_ternary(&mut self) -> Result<Expr, ParseError> {
        let cond = self.parse_binary(4)?;
        if self.eat_punct("?") {
            let then = self.parse_expr()?;
            self.expect_punct(":")?;
            let els = self.parse_ternary()?;
            return Ok(Expr::Ternary {
                cond: Box::new(cond),
                then: Box::new(then),
                els: Box::new(els),
            });
        }
        Ok(cond)
    }

    fn parse_binary(&mut self, min_prec: u8) -> Result<Expr, ParseError> {
        let mut lhs = self.parse_unary()?;
        while let Some(&Tok::Punct(op)) = self.peek().map(|t| &t.tok) {
            let Some(p) = binary_precedence(op) else {
                break;
            };
            if p < min_prec {
                break;
            }
            self.pos += 1;
            let rhs = self.parse_binary(p + 1)?;
            lhs = Expr::Binary {
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
            };
        }
        Ok(lhs)
    }

    /// `( type-name )` lookahead: returns the type string and the token count consumed.
    fn try_type_in_parens(&self) -> Option<(String, usize)> {
        if !self.at_punct("(") {
            return None;
        }
        let mut i = self.pos + 1;
        let mut words = Vec::new();
        while let Some(w) = self.toks.get(i).and_then(Token::ident) {
            if !is_type_word(w) {
                return None;
            }
            if matches!(w, "struct" | "union" | "enum") {
                let tag = self.toks.get(i + 1)?.ident()?;
                words.push(format!("{w} {tag}"));
                i += 2;
                continue;
            }
            words.push(w.to_string());
            i += 1;
        }
        if words.is_empty() {
            return None;
        }
        let mut stars = 0;
        loop {
            let t = self.toks.get(i)?;
            if t.is_punct("*") {
                stars += 1;
            } else if t.ident().is_some_and(is_qualifier) {
                words.push(t.ident()?.to_string());
            } else {
                break;
            }
            i += 1;
        }
        if !self.toks.get(i)?.is_punct(")") {
            return None;
        }
        let mut ty = words.join(" ");
        if stars > 0 {
            ty.push(' ');
            ty.push_str(&"*".repeat(stars));
        }
        Some((ty, i + 1 - self.pos))
    }

    fn parse_unary(&mut self) -> Result<Expr, ParseError> {
        if let Some((ty, len)) = self.try_type_in_parens() {
            self.pos += len;
            if self.at_punct("{") {
                return self.unsupported("compound literal");
            }
            let expr = self.parse_unary()?;
            return Ok(Expr::Cast {
                ty,
                expr: Box::new(expr),
            });
        }
        if self.at_ident("sizeof") {
            self.pos += 1;
            if let Some((ty, len)) = self.try_type_in_parens() {
                self.pos += len;
                return Ok(Expr::SizeofType(ty));
            }
            let expr = self.parse_unary()?;
            return Ok(Expr::Unary {
                op: "sizeof",
                expr: Box::new(expr),
            });
        }
        for op in ["++", "--", "-", "+", "!", "~", "*", "&"] {
            if self.eat_punct(op) {
                let expr = self.parse_unary()?;
                return Ok(Expr::Unary {
                    op,
                    expr: Box::new(expr),
                });
            }
        }
        self.parse_postfix()
    }

    fn parse_postfix(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.parse_primary()?;
        loop {
            if self.eat_punct("(") {
                let mut args = Vec::new();
                if !self.eat_punct(")") {
                    loop {
                        args.push(self.parse_assign()?);
                        if self.eat_punct(")") {
                            break;
                        }
                        self.expect_punct(",")?;
                    }
                }
                e = Expr::Call {
                    callee: Box::new(e),
                    args,
                };
            } else if self.eat_punct("[") {
                let index = self.parse_expr()?;
                self.expect_punct("]")?;
                e = Expr::Index {
                    base: Box::new(e),
                    index: Box::new(index),
                };
            } else if self.at_punct(".") || self.at_punct("->") {
                let arrow = self.at_punct("->");
                self.pos += 1;
                let field = self.expect_ident()?;
                e = Expr::Member {
                    base: Box::new(e),
                    field,
                    arrow,
                };
            } else if self.at_punct("++") || self.at_punct("--") {
                let op = if self.at_punct("++") { "++" } else { "--" };
                self.pos += 1;
                e = Expr::PostIncDec {
                    op,
                    expr: Box::new(e),
                };
            } else {
                return Ok(e);
            }
        }
    }

    fn parse_primary(&mut self) -> Result<Expr, ParseError> {
        let pos = self.here();
        let Some(tok) = self.peek().cloned() else {
            return self.error("unexpected end of input in expression");
        };
        match tok.tok {
            Tok::Ident(name) => {
                if matches!(name.as_str(), "goto" | "switch" | "case" | "default") {
                    return self.unsupported(&name);
                }
                self.pos += 1;
                Ok(Expr::Ident { name, pos })
            }
            Tok::Number(n) => {
                self.pos += 1;
                Ok(Expr::Number(n))
            }
            Tok::Str(s) => {
                self.pos += 1;
                let mut text = s;
                // adjacent literal concatenation
                while let Some(Tok::Str(next)) = self.peek().map(|t| &t.tok) {
                    text.push(' ');
                    text.push_str(next);
                    self.pos += 1;
                }
                Ok(Expr::Str(text))
            }
            Tok::Char(c) => {
                self.pos += 1;
                Ok(Expr::Char(c))
            }
            Tok::Punct("(") => {
                self.pos += 1;
                if self.at_punct("{") {
                    return self.unsupported("statement expression");
                }
                let e = self.parse_expr()?;
                self.expect_punct(")")?;
                Ok(e)
            }
            _ => self.error(format!("unexpected {} in expression", tok.describe())),
        }
    }

    fn skip_balanced(&mut self, open: &str, close: &str) -> Result<(), ParseError> {
        let start = self.here();
        let mut depth = 0usize;
        while let Some(t) = self.peek() {
            if t.is_punct(open) {
                depth += 1;
            } else if t.is_punct(close) {
                depth -= 1;
                if depth == 0 {
                    self.pos += 1;
                    return Ok(());
                }
            }
            self.pos += 1;
        }
        if open == "{" {
            Err(ParseError::UnbalancedBraces { line: start.line })
        } else {
            Err(ParseError::Syntax {
                message: format!("unbalanced `{open}`"),
                line: start.line,
                col: start.col,
            })
        }
    }
}

/// Parses a C function prototype such as
/// `void add(const int32_t *a, int32_t *c, size_t n)` (trailing `;` optional).
pub fn parse_signature(text: &str) -> Result<Signature, ParseError> {
    let mut p = Parser::new(text)?;
    let return_type = p
        .parse_specifiers()
        .map_err(|_| ParseError::Signature(format!("`{text}`: missing return type")))?;
    let depth = p.parse_pointer_depth();
    let name = p
        .expect_ident()
        .map_err(|_| ParseError::Signature(format!("`{text}`: missing function name")))?;
    let params = p
        .parse_param_list()
        .map_err(|e| ParseError::Signature(format!("`{text}`: {e}")))?;
    p.eat_punct(";");
    if let Some(t) = p.peek() {
        return Err(ParseError::Signature(format!(
            "`{text}`: unexpected trailing {}",
            t.describe()
        )));
    }
    let return_type = if depth > 0 {
        format!("{return_type} {}", "*".repeat(depth))
    } else {
        return_type
    };
    Ok(Signature {
        return_type,
        name,
        params,
    })
}

/// Finds and parses the definition of `name` in a translation unit.
pub fn parse_function_def(source: &str, name: &str) -> Result<FunctionDef, ParseError> {
    let mut p = Parser::new(source)?;
    let mut depth = 0usize;
    while let Some(t) = p.peek() {
        if t.is_punct("{") {
            depth += 1;
        } else if t.is_punct("}") {
            if depth == 0 {
                return Err(ParseError::UnbalancedBraces { line: t.line });
            }
            depth -= 1;
        } else if depth == 0
            && t.ident() == Some(name)
            && p.peek_at(1).is_some_and(|n| n.is_punct("("))
        {
            let name_pos = p.here();
            let fn_idx = p.pos;
            p.pos += 1;
            let save = p.pos;
            p.skip_balanced("(", ")")?;
            if p.at_punct("{") {
                // a definition: re-read the header properly
                let return_type = header_return_type(&p.toks, fn_idx);
                p.pos = save;
                let params = p.parse_param_list()?;
                p.expect_punct("{")?;
                let body = p.parse_block_body()?;
                return Ok(FunctionDef {
                    return_type,
                    name: name.to_string(),
                    params,
                    body,
                    pos: name_pos,
                });
            }
            continue;
        }
        p.pos += 1;
    }
    if depth > 0 {
        return Err(ParseError::UnbalancedBraces { line: p.eof_line });
    }
    Err(ParseError::FunctionNotFound(name.to_string()))
}

/// Walks backwards from the function name over specifier tokens and `*`.
fn header_return_type(toks: &[Token], name_idx: usize) -> String {
    let mut words = Vec::new();
    let mut stars = 0;
    let mut i = name_idx;
    while i > 0 {
        let t = &toks[i - 1];
        if t.is_punct("*") {
            stars += 1;
        } else if let Some(w) = t.ident().filter(|w| is_type_word(w)) {
            words.push(w.to_string());
        } else {
            break;
        }
        i -= 1;
    }
    words.reverse();
    let mut ty = words
        .into_iter()
        .filter(|w| !matches!(w.as_str(), "static" | "inline" | "__inline" | "__inline__" | "extern"))
        .collect::<Vec<_>>()
        .join(" ");
    if ty.is_empty() {
        ty = "int".into();
    }
    if stars > 0 {
        ty.push(' ');
        ty.push_str(&"*".repeat(stars));
    }
    ty
}

/// Parses exactly one statement from `src`.
pub fn parse_single_stmt(src: &str) -> Result<StmtNode, ParseError> {
    let mut p = Parser::new(src)?;
    let stmt = p.parse_stmt()?;
    if let Some(t) = p.peek() {
        let t = t.clone();
        return Err(ParseError::Syntax {
            message: format!("trailing {} after statement", t.describe()),
            line: t.line,
            col: t.col,
        });
    }
    Ok(stmt)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn signature_parses() {
        let s = parse_signature("void vadd(const int32_t *a, const int32_t *b, int32_t *c, size_t n)")
            .unwrap();
        assert_eq!(s.name, "vadd");
        assert_eq!(s.return_type, "void");
        assert_eq!(s.params.len(), 4);
        assert_eq!(s.params[0].base_type, "const int32_t");
        assert_eq!(s.params[0].pointer_depth, 1);
        assert_eq!(s.params[3].name.as_deref(), Some("n"));

        let s = parse_signature("int32_t *f(void);").unwrap();
        assert_eq!(s.return_type, "int32_t *");
        assert!(s.params.is_empty());
    }

    #[test]
    fn bad_signatures_rejected() {
        for bad in ["", "void", "void f", "void f(int", "f(int x) {", "void (int x)"] {
            assert!(parse_signature(bad).is_err(), "{bad:?}");
        }
    }

    #[test]
    fn goto_rejected_with_location() {
        let src = "void f(int n) {\n  int i = 0;\n  goto out;\n}\n";
        let err = parse_function_def(src, "f").unwrap_err();
        assert_eq!(
            err,
            ParseError::Unsupported {
                construct: "goto".into(),
                line: 3,
                col: 3
            }
        );
        assert_eq!(err.to_string(), "unsupported construct: goto (line 3, column 3)");
    }

    #[test]
    fn switch_rejected() {
        let src = "void f(int n) { switch (n) { case 1: break; } }";
        assert!(matches!(
            parse_function_def(src, "f"),
            Err(ParseError::Unsupported { construct, .. }) if construct == "switch"
        ));
    }

    #[test]
    fn unbalanced_braces() {
        let src = "void f(int n) {\n  if (n) {\n    n = 1;\n";
        assert!(matches!(
            parse_function_def(src, "f"),
            Err(ParseError::UnbalancedBraces { .. })
        ));
    }

    #[test]
    fn finds_definition_not_prototype() {
        let src = "void g(int x);\nstatic inline int h(int a) { return a; }\nvoid g(int x) { x = h(x); }\n";
        let f = parse_function_def(src, "g").unwrap();
        assert_eq!(f.body.len(), 1);
        assert_eq!(f.pos.line, 3);
        let h = parse_function_def(src, "h").unwrap();
        assert_eq!(h.return_type, "int");
    }

    #[test]
    fn casts_and_precedence() {
        let stmt = parse_single_stmt("x = (int32_t)a + b * c - -d;").unwrap();
        let StmtNode::Expr { expr, .. } = stmt else {
            panic!()
        };
        assert_eq!(expr.to_string(), "x = (int32_t)a + b * c - -d");
        let stmt = parse_single_stmt("y = (a + b) * c;").unwrap();
        let StmtNode::Expr { expr, .. } = stmt else {
            panic!()
        };
        assert_eq!(expr.to_string(), "y = (a + b) * c");
    }

    #[test]
    fn declarations() {
        let stmt = parse_single_stmt("const vint32m1_t a = f(x), *p, arr[4] = {1, 2};").unwrap();
        let StmtNode::Decl { decl, .. } = stmt else {
            panic!()
        };
        assert_eq!(decl.core_type(), "vint32m1_t");
        assert_eq!(decl.declarators.len(), 3);
        assert_eq!(decl.declarators[1].pointer_depth, 1);
        assert_eq!(decl.declarators[2].array_dims.len(), 1);
    }
}
