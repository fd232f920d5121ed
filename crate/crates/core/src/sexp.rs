//! S-expression reader shared by problem files, certificates and solver
//! responses.

use std::fmt;

use num_bigint::BigInt;
use thiserror::Error;

pub const MAX_DEPTH: usize = 512;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Sexp {
    Sym(String, Pos),
    Num(BigInt, Pos),
    Str(String, Pos),
    List(Vec<Sexp>, Pos),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{pos}: {msg}")]
pub struct SexpError {
    pub pos: Pos,
    pub msg: String,
}

impl Sexp {
    pub fn pos(&self) -> Pos {
        match self {
            Sexp::Sym(_, p) | Sexp::Num(_, p) | Sexp::Str(_, p) | Sexp::List(_, p) => *p,
        }
    }

    pub fn as_sym(&self) -> Option<&str> {
        match self {
            Sexp::Sym(s, _) => Some(s),
            _ => None,
        }
    }

    pub fn as_list(&self) -> Option<&[Sexp]> {
        match self {
            Sexp::List(items, _) => Some(items),
            _ => None,
        }
    }

    /// The head symbol of a list, if any.
    pub fn head(&self) -> Option<&str> {
        self.as_list().and_then(|l| l.first()).and_then(Sexp::as_sym)
    }

    pub fn error(&self, msg: impl Into<String>) -> SexpError {
        SexpError { pos: self.pos(), msg: msg.into() }
    }
}

impl fmt::Display for Sexp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sexp::Sym(s, _) => f.write_str(s),
            Sexp::Num(n, _) => write!(f, "{n}"),
            Sexp::Str(s, _) => write!(f, "\"{}\"", s.replace('"', "\"\"")),
            Sexp::List(items, _) => {
                f.write_str("(")?;
                for (i, it) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{it}")?;
                }
                f.write_str(")")
            }
        }
    }
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: u32,
    col: u32,
}

impl Lexer<'_> {
    fn pos(&self) -> Pos {
        Pos { line: self.line, col: self.col }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_trivia(&mut self) {
        while let Some(&c) = self.chars.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == ';' {
                while let Some(&c) = self.chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    self.bump();
                }
            } else {
                break;
            }
        }
    }
}

fn is_symbol_char(c: char) -> bool {
    !c.is_whitespace() && !matches!(c, '(' | ')' | ';' | '"' | '|')
}

/// Reads every top-level expression of `text`.
pub fn parse_all(text: &str) -> Result<Vec<Sexp>, SexpError> {
    let mut lx = Lexer { chars: text.chars().peekable(), line: 1, col: 1 };
    let mut stack: Vec<(Vec<Sexp>, Pos)> = Vec::new();
    let mut top = Vec::new();
    loop {
        lx.skip_trivia();
        let pos = lx.pos();
        let Some(&c) = lx.chars.peek() else { break };
        let item = match c {
            '(' => {
                lx.bump();
                if stack.len() >= MAX_DEPTH {
                    return Err(SexpError { pos, msg: format!("nesting deeper than {MAX_DEPTH}") });
                }
                stack.push((Vec::new(), pos));
                continue;
            }
            ')' => {
                lx.bump();
                match stack.pop() {
                    Some((items, open)) => Sexp::List(items, open),
                    None => return Err(SexpError { pos, msg: "unexpected `)`".into() }),
                }
            }
            '"' => {
                lx.bump();
                let mut s = String::new();
                loop {
                    match lx.bump() {
                        None => return Err(SexpError { pos, msg: "unterminated string literal".into() }),
                        Some('"') if lx.chars.peek() == Some(&'"') => {
                            lx.bump();
                            s.push('"');
                        }
                        Some('"') => break,
                        Some(ch) => s.push(ch),
                    }
                }
                Sexp::Str(s, pos)
            }
            '|' => {
                lx.bump();
                let mut s = String::new();
                loop {
                    match lx.bump() {
                        None => return Err(SexpError { pos, msg: "unterminated quoted symbol".into() }),
                        Some('|') => break,
                        Some(ch) => s.push(ch),
                    }
                }
                Sexp::Sym(s, pos)
            }
            _ => {
                let mut s = String::new();
                while let Some(&ch) = lx.chars.peek() {
                    if !is_symbol_char(ch) {
                        break;
                    }
                    s.push(ch);
                    lx.bump();
                }
                if s.is_empty() {
                    return Err(SexpError { pos, msg: format!("unexpected character `{c}`") });
                }
                if s.bytes().all(|b| b.is_ascii_digit()) {
                    Sexp::Num(s.parse().expect("digits"), pos)
                } else {
                    Sexp::Sym(s, pos)
                }
            }
        };
        match stack.last_mut() {
            Some((items, _)) => items.push(item),
            None => top.push(item),
        }
    }
    if let Some((_, open)) = stack.last() {
        return Err(SexpError { pos: *open, msg: "unbalanced `(`: missing `)`".into() });
    }
    Ok(top)
}

/// Reads exactly one expression.
pub fn parse_one(text: &str) -> Result<Sexp, SexpError> {
    let mut all = parse_all(text)?;
    match all.len() {
        1 => Ok(all.pop().unwrap()),
        0 => Err(SexpError { pos: Pos { line: 1, col: 1 }, msg: "empty input".into() }),
        _ => Err(all[1].error("trailing input after expression")),
    }
}

/// Paren balance of a chunk of text, ignoring strings, quoted symbols and
/// comments; used to frame multi-line solver responses.
pub fn paren_balance(text: &str) -> i64 {
    let mut depth = 0i64;
    let mut in_str = false;
    let mut in_quote = false;
    let mut in_comment = false;
    for c in text.chars() {
        if in_comment {
            in_comment = c != '\n';
            continue;
        }
        match c {
            '"' if !in_quote => in_str = !in_str,
            '|' if !in_str => in_quote = !in_quote,
            ';' if !in_str && !in_quote => in_comment = true,
            '(' if !in_str && !in_quote => depth += 1,
            ')' if !in_str && !in_quote => depth -= 1,
            _ => {}
        }
    }
    depth
}
