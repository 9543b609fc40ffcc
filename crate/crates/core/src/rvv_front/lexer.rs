//! Tokenizer for the C subset. Comments and preprocessor lines are dropped.

use super::ParseError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Number(String),
    Str(String),
    Char(String),
    Punct(&'static str),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub line: u32,
    pub col: u32,
}

impl Token {
    pub fn is_punct(&self, p: &str) -> bool {
        matches!(&self.tok, Tok::Punct(q) if *q == p)
    }

    pub fn ident(&self) -> Option<&str> {
        match &self.tok {
            Tok::Ident(s) => Some(s),
            _ => None,
        }
    }

    pub fn describe(&self) -> String {
        match &self.tok {
            Tok::Ident(s) | Tok::Number(s) => format!("`{s}`"),
            Tok::Str(s) => format!("string {s}"),
            Tok::Char(s) => format!("char {s}"),
            Tok::Punct(p) => format!("`{p}`"),
        }
    }
}

const PUNCTS: [&str; 48] = [
    "<<=", ">>=", "...", "->", "++", "--", "<<", ">>", "<=", ">=", "==", "!=", "&&", "||", "+=",
    "-=", "*=", "/=", "%=", "&=", "^=", "|=", "##", "{", "}", "(", ")", "[", "]", ";", ",", ".",
    ":", "?", "~", "!", "+", "-", "*", "/", "%", "<", ">", "=", "&", "^", "|", "#",
];

pub fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let mut line = 1u32;
    let mut line_start = 0usize;
    // true while only whitespace has been seen on the current line
    let mut at_line_start = true;

    while i < bytes.len() {
        let c = bytes[i];
        let col = (i - line_start) as u32 + 1;
        match c {
            b'\n' => {
                i += 1;
                line += 1;
                line_start = i;
                at_line_start = true;
            }
            b' ' | b'\t' | b'\r' | 0x0c => i += 1,
            b'/' if bytes.get(i + 1) == Some(&b'/') => {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
            }
            b'/' if bytes.get(i + 1) == Some(&b'*') => {
                let start_line = line;
                i += 2;
                loop {
                    if i + 1 >= bytes.len() {
                        return Err(ParseError::Syntax {
                            message: "unterminated block comment".into(),
                            line: start_line,
                            col,
                        });
                    }
                    if bytes[i] == b'*' && bytes[i + 1] == b'/' {
                        i += 2;
                        break;
                    }
                    if bytes[i] == b'\n' {
                        line += 1;
                        line_start = i + 1;
                    }
                    i += 1;
                }
            }
            b'#' if at_line_start => {
                // preprocessor directive, honoring backslash continuations
                while i < bytes.len() && bytes[i] != b'\n' {
                    if bytes[i] == b'\\' && bytes.get(i + 1) == Some(&b'\n') {
                        i += 2;
                        line += 1;
                        line_start = i;
                        continue;
                    }
                    i += 1;
                }
            }
            b'"' | b'\'' => {
                let quote = c;
                let start = i;
                i += 1;
                while i < bytes.len() && bytes[i] != quote {
                    if bytes[i] == b'\\' {
                        i += 1;
                    }
                    if i < bytes.len() && bytes[i] == b'\n' {
                        return Err(ParseError::Syntax {
                            message: "unterminated literal".into(),
                            line,
                            col,
                        });
                    }
                    i += 1;
                }
                if i >= bytes.len() {
                    return Err(ParseError::Syntax {
                        message: "unterminated literal".into(),
                        line,
                        col,
                    });
                }
                i += 1;
                let text = src[start..i].to_string();
                let tok = if quote == b'"' {
                    Tok::Str(text)
                } else {
                    Tok::Char(text)
                };
                out.push(Token { tok, line, col });
                at_line_start = false;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push(Token {
                    tok: Tok::Ident(src[start..i].to_string()),
                    line,
                    col,
                });
                at_line_start = false;
            }
            c if c.is_ascii_digit()
                || (c == b'.' && bytes.get(i + 1).is_some_and(u8::is_ascii_digit)) =>
            {
                let start = i;
                while i < bytes.len() {
                    let b = bytes[i];
                    let hex = src[start..i].starts_with("0x") || src[start..i].starts_with("0X");
                    let exp_sign = (b == b'+' || b == b'-')
                        && if hex {
                            matches!(bytes[i - 1], b'p' | b'P')
                        } else {
                            matches!(bytes[i - 1], b'e' | b'E')
                        };
                    if b.is_ascii_alphanumeric() || b == b'.' || b == b'_' || exp_sign {
                        i += 1;
                    } else {
                        break;
                    }
                }
                out.push(Token {
                    tok: Tok::Number(src[start..i].to_string()),
                    line,
                    col,
                });
                at_line_start = false;
            }
            _ => {
                let rest = &src[i..];
                let Some(p) = PUNCTS.iter().find(|p| rest.starts_with(**p)) else {
                    return Err(ParseError::Syntax {
                        message: format!(
                            "unexpected character `{}`",
                            rest.chars().next().unwrap_or('?')
                        ),
                        line,
                        col,
                    });
                };
                i += p.len();
                out.push(Token {
                    tok: Tok::Punct(p),
                    line,
                    col,
                });
                at_line_start = false;
            }
        }
    }
    Ok(out)
}
