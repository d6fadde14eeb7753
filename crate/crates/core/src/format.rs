//! Text formats for nets and semilinear sets.
//!
//! Net files:
//!
//! ```text
//! # comment
//! dim 2
//! action t : 1 0 -> 0 1
//! ```
//!
//! Semilinear set files hold one linear component per line; an empty file
//! is the empty set:
//!
//! ```text
//! linear base 1 1 periods ( 1 0 ) ( 0 1 )
//! linear base 0 3
//! ```

use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::net::{NetError, PetriNet};
use crate::semilinear::{LinearSet, SemilinearSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok<'a> {
    Word(&'a str),
    Colon,
    Arrow,
    Open,
    Close,
}

impl fmt::Display for Tok<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Word(w) => write!(f, "`{w}`"),
            Tok::Colon => write!(f, "`:`"),
            Tok::Arrow => write!(f, "`->`"),
            Tok::Open => write!(f, "`(`"),
            Tok::Close => write!(f, "`)`"),
        }
    }
}

/// Tokens of one line with their 1-based columns; `#` starts a comment.
fn lex(line: &str) -> Vec<(usize, Tok<'_>)> {
    let line = match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    };
    let bytes = line.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let col = line[..i].chars().count() + 1;
        match c {
            b' ' | b'\t' | b'\r' => i += 1,
            b':' => {
                out.push((col, Tok::Colon));
                i += 1;
            }
            b'(' => {
                out.push((col, Tok::Open));
                i += 1;
            }
            b')' => {
                out.push((col, Tok::Close));
                i += 1;
            }
            b'-' if bytes.get(i + 1) == Some(&b'>') => {
                out.push((col, Tok::Arrow));
                i += 2;
            }
            _ => {
                let start = i;
                while i < bytes.len() {
                    let d = bytes[i];
                    if matches!(d, b' ' | b'\t' | b'\r' | b':' | b'(' | b')')
                        || (d == b'-' && bytes.get(i + 1) == Some(&b'>') && i > start)
                    {
                        break;
                    }
                    i += 1;
                }
                out.push((col, Tok::Word(&line[start..i])));
            }
        }
    }
    out
}

struct Cursor<'a> {
    line: usize,
    toks: Vec<(usize, Tok<'a>)>,
    pos: usize,
    eol_col: usize,
}

impl<'a> Cursor<'a> {
    fn new(line_no: usize, text: &'a str) -> Self {
        Cursor {
            line: line_no,
            toks: lex(text),
            pos: 0,
            eol_col: text.chars().count() + 1,
        }
    }

    fn err(&self, column: usize, message: impl Into<String>) -> ParseError {
        ParseError {
            line: self.line,
            column,
            message: message.into(),
        }
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.eol_col, |t| t.0)
    }

    fn peek(&self) -> Option<&Tok<'a>> {
        self.toks.get(self.pos).map(|t| &t.1)
    }

    fn next(&mut self) -> Option<(usize, Tok<'a>)> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn is_done(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn expect(&mut self, want: Tok<'static>) -> Result<(), ParseError> {
        let col = self.col();
        match self.next() {
            Some((_, t)) if t == want => Ok(()),
            Some((_, t)) => Err(self.err(col, format!("expected {want}, found {t}"))),
            None => Err(self.err(col, format!("expected {want}, found end of line"))),
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        let col = self.col();
        match self.next() {
            Some((_, Tok::Word(w))) if w == kw => Ok(()),
            Some((_, t)) => Err(self.err(col, format!("expected `{kw}`, found {t}"))),
            None => Err(self.err(col, format!("expected `{kw}`, found end of line"))),
        }
    }

    fn natural(&mut self) -> Result<u64, ParseError> {
        let col = self.col();
        match self.next() {
            Some((_, Tok::Word(w))) => parse_natural(w).map_err(|m| self.err(col, m)),
            Some((_, t)) => Err(self.err(col, format!("expected a natural number, found {t}"))),
            None => Err(self.err(col, "expected a natural number, found end of line")),
        }
    }

    /// Naturals up to the next non-word token or end of line.
    fn naturals(&mut self, expected: usize, what: &str) -> Result<Vec<u64>, ParseError> {
        let col = self.col();
        let mut v = Vec::new();
        while matches!(self.peek(), Some(Tok::Word(w)) if looks_numeric(w)) {
            v.push(self.natural()?);
        }
        if v.len() != expected {
            return Err(self.err(
                col,
                format!("{what} has {} entries, expected {expected}", v.len()),
            ));
        }
        Ok(v)
    }

    fn end(&mut self) -> Result<(), ParseError> {
        match self.next() {
            None => Ok(()),
            Some((col, t)) => Err(self.err(col, format!("unexpected {t}"))),
        }
    }
}

fn looks_numeric(w: &str) -> bool {
    w.starts_with(|c: char| c.is_ascii_digit() || c == '-' || c == '+')
}

fn parse_natural(w: &str) -> Result<u64, String> {
    if w.starts_with('-') && w[1..].chars().all(|c| c.is_ascii_digit()) && w.len() > 1 {
        return Err(format!("negative entry `{w}`"));
    }
    if w.is_empty() || !w.chars().all(|c| c.is_ascii_digit()) {
        return Err(format!("expected a natural number, found `{w}`"));
    }
    w.parse::<u64>().map_err(|_| format!("number `{w}` is too large"))
}

fn valid_name(w: &str) -> bool {
    let mut chars = w.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '.' | '-' | '\''))
}

pub fn parse_net(text: &str) -> Result<PetriNet, ParseError> {
    let mut net: Option<PetriNet> = None;
    let mut last_line = 0;
    for (idx, line) in text.lines().enumerate() {
        let mut cur = Cursor::new(idx + 1, line);
        last_line = idx + 1;
        if cur.is_done() {
            continue;
        }
        let col = cur.col();
        match cur.next() {
            Some((_, Tok::Word("dim"))) => {
                if net.is_some() {
                    return Err(cur.err(col, "`dim` declared twice"));
                }
                let ncol = cur.col();
                let d = cur.natural()?;
                let created = PetriNet::new(d as usize)
                    .map_err(|_| cur.err(ncol, "dimension must be at least 1"))?;
                cur.end()?;
                net = Some(created);
            }
            Some((_, Tok::Word("action"))) => {
                let Some(n) = net.as_mut() else {
                    return Err(cur.err(col, "`action` before `dim`"));
                };
                let ncol = cur.col();
                let name = match cur.next() {
                    Some((_, Tok::Word(w))) if valid_name(w) => w.to_string(),
                    Some((_, t)) => return Err(cur.err(ncol, format!("invalid action name {t}"))),
                    None => return Err(cur.err(ncol, "missing action name")),
                };
                cur.expect(Tok::Colon)?;
                let dim = n.dim();
                let pre = cur.naturals(dim, "pre-vector")?;
                cur.expect(Tok::Arrow)?;
                let post = cur.naturals(dim, "post-vector")?;
                cur.end()?;
                n.add_named_action(name, pre, post).map_err(|e| match e {
                    NetError::DuplicateName(name) => {
                        cur.err(ncol, format!("duplicate action name `{name}`"))
                    }
                    other => cur.err(ncol, other.to_string()),
                })?;
            }
            Some((_, t)) => return Err(cur.err(col, format!("expected `dim` or `action`, found {t}"))),
            None => unreachable!("non-empty line has a token"),
        }
    }
    net.ok_or(ParseError {
        line: last_line.max(1),
        column: 1,
        message: "missing `dim` declaration".into(),
    })
}

pub fn format_net(net: &PetriNet) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "dim {}", net.dim());
    for a in net.actions() {
        let _ = writeln!(s, "action {} : {} -> {}", a.name, join(&a.pre), join(&a.post));
    }
    s
}

/// Parses a semilinear set file whose vectors must have length `dim`.
pub fn parse_semilinear(text: &str, dim: usize) -> Result<SemilinearSet, ParseError> {
    let mut components = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let mut cur = Cursor::new(idx + 1, line);
        if cur.is_done() {
            continue;
        }
        cur.keyword("linear")?;
        cur.keyword("base")?;
        let base = cur.naturals(dim, "base")?;
        let mut periods = Vec::new();
        if !cur.is_done() {
            cur.keyword("periods")?;
            while !cur.is_done() {
                cur.expect(Tok::Open)?;
                periods.push(cur.naturals(dim, "period")?);
                cur.expect(Tok::Close)?;
            }
        }
        components.push(LinearSet::new(base, periods).expect("lengths checked while parsing"));
    }
    Ok(SemilinearSet::from_components(dim, components).expect("lengths checked while parsing"))
}

pub fn format_semilinear(set: &SemilinearSet) -> String {
    let mut s = String::new();
    for c in set.components() {
        let _ = write!(s, "linear base {}", join(c.base()));
        if !c.periods().is_empty() {
            s.push_str(" periods");
            for p in c.periods() {
                let _ = write!(s, " ( {} )", join(p));
            }
        }
        s.push('\n');
    }
    s
}

fn join(v: &[u64]) -> String {
    v.iter().map(u64::to_string).collect::<Vec<_>>().join(" ")
}
