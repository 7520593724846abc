//! Readers for the two surface syntaxes.
//!
//! The fully parenthesized reader takes text as written. The implicit reader
//! additionally lets a bare symbol of known arity `k` consume the next `k`
//! expressions as its arguments, so `* + 1 2 3` reads as `(* (+ 1 2) 3)`.
//! Inside explicit parentheses the first element is the head and never
//! consumes arguments; the remaining elements are read implicitly.
//!
//! An apostrophe written directly against the following token (`'x`) is
//! sugar for `(' x)` in both readers. A free-standing apostrophe is the
//! quote symbol itself, which is how the canonical form `(' x)` reads back.

use std::collections::HashMap;
use std::fmt;
use std::sync::LazyLock;

use thiserror::Error;

use super::{is_symbol_char, SExpr, MAX_NESTING, QUOTE};
use crate::interpreter::PRIMITIVES;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Empty,
    UnexpectedClose,
    MissingClose,
    TrailingInput,
    MissingArguments { symbol: String, needed: usize },
    InvalidCharacter(char),
    TooDeep,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::Empty => f.write_str("empty input"),
            ParseErrorKind::UnexpectedClose => f.write_str("unbalanced ')'"),
            ParseErrorKind::MissingClose => f.write_str("missing ')'"),
            ParseErrorKind::TrailingInput => f.write_str("trailing input after expression"),
            ParseErrorKind::MissingArguments { symbol, needed } => {
                write!(f, "{symbol} needs {needed} argument(s) but the input ran out")
            }
            ParseErrorKind::InvalidCharacter(c) => write!(f, "invalid character {c:?}"),
            ParseErrorKind::TooDeep => write!(f, "nesting deeper than {MAX_NESTING}"),
        }
    }
}

/// A reader error with a 1-based source position.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {kind}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub line: usize,
    pub column: usize,
}

/// Fixed argument counts used by the implicit reader.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArityTable {
    arities: HashMap<String, usize>,
}

static PRIMITIVE_TABLE: LazyLock<ArityTable> =
    LazyLock::new(|| ArityTable { arities: PRIMITIVES.iter().map(|p| (p.name.to_string(), p.arity)).collect() });

impl ArityTable {
    /// An empty table: the implicit reader then behaves like the full one
    /// except for free-standing apostrophes.
    pub fn empty() -> Self {
        Self { arities: HashMap::new() }
    }

    /// The dialect's primitives.
    pub fn primitives() -> &'static ArityTable {
        &PRIMITIVE_TABLE
    }

    /// Records a user function. Primitive arities cannot be overridden.
    pub fn define(&mut self, name: &str, arity: usize) {
        if !PRIMITIVE_TABLE.arities.contains_key(name) {
            self.arities.insert(name.to_string(), arity);
        }
    }

    pub fn arity(&self, name: &str) -> Option<usize> {
        self.arities.get(name).copied()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Open,
    Close,
    /// `attached` when the next character starts an expression.
    Quote {
        attached: bool,
    },
    Atom(String),
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut tokens = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut column) = (1, 1);
    while let Some(c) = chars.next() {
        let (tl, tc) = (line, column);
        if c == '\n' {
            line += 1;
            column = 1;
            continue;
        }
        column += 1;
        let tok = match c {
            ' ' | '\t' | '\r' => continue,
            '(' => Tok::Open,
            ')' => Tok::Close,
            '\'' => {
                let attached = chars.peek().is_some_and(|&n| !n.is_whitespace() && n != ')');
                Tok::Quote { attached }
            }
            c if is_symbol_char(c) => {
                let mut name = String::from(c);
                while let Some(&n) = chars.peek() {
                    if !is_symbol_char(n) {
                        break;
                    }
                    name.push(n);
                    chars.next();
                    column += 1;
                }
                Tok::Atom(name)
            }
            c => return Err(ParseError { kind: ParseErrorKind::InvalidCharacter(c), line: tl, column: tc }),
        };
        tokens.push(Token { tok, line: tl, column: tc });
    }
    Ok(tokens)
}

struct Cursor<'a> {
    tokens: &'a [Token],
    pos: usize,
    /// Position reported when the input runs out.
    end: (usize, usize),
}

impl<'a> Cursor<'a> {
    fn new(tokens: &'a [Token], text: &str) -> Self {
        let line = text.lines().count().max(1);
        let column = text.lines().last().map_or(0, str::len) + 1;
        Cursor { tokens, pos: 0, end: (line, column) }
    }

    fn peek(&self) -> Option<&'a Token> {
        self.tokens.get(self.pos)
    }

    fn err_here(&self, kind: ParseErrorKind) -> ParseError {
        let (line, column) = self.peek().map_or(self.end, |t| (t.line, t.column));
        ParseError { kind, line, column }
    }

    fn full(&mut self, depth: usize) -> Result<SExpr, ParseError> {
        if depth > MAX_NESTING {
            return Err(self.err_here(ParseErrorKind::TooDeep));
        }
        let tok = self.peek().ok_or_else(|| self.err_here(ParseErrorKind::Empty))?;
        match &tok.tok {
            Tok::Atom(name) => {
                self.pos += 1;
                Ok(SExpr::atom(name))
            }
            Tok::Quote { attached: false } => {
                self.pos += 1;
                Ok(SExpr::atom(QUOTE))
            }
            Tok::Quote { attached: true } => {
                self.pos += 1;
                Ok(SExpr::quote(self.full(depth + 1)?))
            }
            Tok::Close => Err(self.err_here(ParseErrorKind::UnexpectedClose)),
            Tok::Open => {
                self.pos += 1;
                let mut items = Vec::new();
                loop {
                    match self.peek().map(|t| &t.tok) {
                        None => return Err(self.err_here(ParseErrorKind::MissingClose)),
                        Some(Tok::Close) => {
                            self.pos += 1;
                            return Ok(SExpr::list(items));
                        }
                        Some(_) => items.push(self.full(depth + 1)?),
                    }
                }
            }
        }
    }

    fn implicit(&mut self, table: &ArityTable, depth: usize) -> Result<SExpr, ParseError> {
        if depth > MAX_NESTING {
            return Err(self.err_here(ParseErrorKind::TooDeep));
        }
        let tok = self.peek().ok_or_else(|| self.err_here(ParseErrorKind::Empty))?;
        match &tok.tok {
            Tok::Atom(name) => {
                self.pos += 1;
                let atom = SExpr::atom(name);
                match atom.as_symbol().and_then(|s| table.arity(s)) {
                    Some(arity) => {
                        let mut items = Vec::with_capacity(arity + 1);
                        items.push(atom);
                        for _ in 0..arity {
                            items.push(self.argument(table, name, arity, depth)?);
                        }
                        Ok(SExpr::list(items))
                    }
                    None => Ok(atom),
                }
            }
            Tok::Quote { .. } => {
                self.pos += 1;
                Ok(SExpr::quote(self.argument(table, QUOTE, 1, depth)?))
            }
            Tok::Close => Err(self.err_here(ParseErrorKind::UnexpectedClose)),
            Tok::Open => {
                self.pos += 1;
                let mut items = Vec::new();
                match self.peek().map(|t| &t.tok) {
                    Some(Tok::Atom(name)) => {
                        self.pos += 1;
                        items.push(SExpr::atom(name));
                    }
                    Some(Tok::Quote { attached: false }) => {
                        self.pos += 1;
                        items.push(SExpr::atom(QUOTE));
                    }
                    _ => {}
                }
                loop {
                    match self.peek().map(|t| &t.tok) {
                        None => return Err(self.err_here(ParseErrorKind::MissingClose)),
                        Some(Tok::Close) => {
                            self.pos += 1;
                            return Ok(SExpr::list(items));
                        }
                        Some(_) => items.push(self.implicit(table, depth + 1)?),
                    }
                }
            }
        }
    }

    fn argument(&mut self, table: &ArityTable, symbol: &str, needed: usize, depth: usize) -> Result<SExpr, ParseError> {
        match self.peek().map(|t| &t.tok) {
            None | Some(Tok::Close) => {
                Err(self.err_here(ParseErrorKind::MissingArguments { symbol: symbol.to_string(), needed }))
            }
            Some(_) => self.implicit(table, depth + 1),
        }
    }

    fn finish(&self, e: SExpr) -> Result<SExpr, ParseError> {
        match self.peek() {
            None => Ok(e),
            Some(_) => Err(self.err_here(ParseErrorKind::TrailingInput)),
        }
    }
}

/// Reads exactly one fully parenthesized expression.
pub fn parse_full(text: &str) -> Result<SExpr, ParseError> {
    let tokens = tokenize(text)?;
    let mut cur = Cursor::new(&tokens, text);
    let e = cur.full(0)?;
    cur.finish(e)
}

/// Reads exactly one expression, supplying parentheses from `table`.
pub fn parse_implicit(text: &str, table: &ArityTable) -> Result<SExpr, ParseError> {
    let tokens = tokenize(text)?;
    let mut cur = Cursor::new(&tokens, text);
    let e = cur.implicit(table, 0)?;
    cur.finish(e)
}

/// Reads a sequence of top-level forms in implicit syntax. The arity table
/// is passed per form so that definitions can extend it between reads.
pub struct FormReader {
    text: String,
    tokens: Vec<Token>,
    pos: usize,
}

impl FormReader {
    pub fn new(text: &str) -> Result<Self, ParseError> {
        Ok(Self { text: text.to_string(), tokens: tokenize(text)?, pos: 0 })
    }

    /// The next form with its starting line, or `None` at end of input.
    pub fn next_form(&mut self, table: &ArityTable) -> Option<Result<(SExpr, usize), ParseError>> {
        let start = self.tokens.get(self.pos)?.line;
        let mut cur = Cursor::new(&self.tokens, &self.text);
        cur.pos = self.pos;
        let result = cur.implicit(table, 0);
        self.pos = cur.pos;
        if result.is_err() {
            // Skip the rest so iteration terminates after an error.
            self.pos = self.tokens.len();
        }
        Some(result.map(|e| (e, start)))
    }
}
