//! Symbolic expressions: the single value and program representation of the
//! dialect.
//!
//! The canonical text of an expression is the fully parenthesized form with
//! exactly one blank between list elements. The empty list prints as `nil`,
//! and the quote form prints as the plain list `(' x)`; the apostrophe sugar
//! is accepted on input but never produced. Every list caches the length of
//! its canonical text, so [`SExpr::size_chars`] is constant time.

mod parser;

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, LazyLock, OnceLock};

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use thiserror::Error;

use crate::bits::{BitStream, BitString, OutOfData};

pub use parser::{parse_full, parse_implicit, ArityTable, FormReader, ParseError, ParseErrorKind};

/// Deepest list nesting the parsers accept and the evaluator will build.
pub const MAX_NESTING: usize = 4096;

/// The quote primitive's symbol.
pub const QUOTE: &str = "'";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SymbolError {
    #[error("empty symbol")]
    Empty,
    #[error("symbol {0:?} contains a forbidden character")]
    BadChar(String),
    #[error("{0:?} is a numeral, not a symbol")]
    Numeral(String),
}

/// A non-list, non-numeric atom. Never `nil` (that is the empty list) and
/// never all digits.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol(Arc<str>);

impl Symbol {
    fn new_unchecked(name: &str) -> Self {
        Symbol(Arc::from(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub(crate) fn is_symbol_char(c: char) -> bool {
    c.is_ascii_graphic() && !matches!(c, '(' | ')' | '\'')
}

/// Arbitrary-precision natural number.
#[derive(Clone)]
pub struct Natural(Arc<NatRepr>);

struct NatRepr {
    value: BigUint,
    chars: OnceLock<usize>,
}

impl Natural {
    pub fn new(value: BigUint) -> Self {
        Natural(Arc::new(NatRepr { value, chars: OnceLock::new() }))
    }

    pub fn value(&self) -> &BigUint {
        &self.0.value
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.0.value.to_u64()
    }

    /// Number of decimal digits.
    pub fn chars(&self) -> usize {
        *self.0.chars.get_or_init(|| match self.0.value.to_u64() {
            Some(v) => v.checked_ilog10().map_or(1, |l| l as usize + 1),
            None => self.0.value.to_string().len(),
        })
    }
}

impl PartialEq for Natural {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.value == other.0.value
    }
}

impl Eq for Natural {}

impl Hash for Natural {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.value.hash(state);
    }
}

/// An immutable list with its canonical length and nesting depth cached.
/// A list may be a suffix of another's storage, so taking the tail is
/// constant time.
#[derive(Clone)]
pub struct List {
    repr: Arc<ListRepr>,
    start: usize,
}

struct ListRepr {
    items: Vec<SExpr>,
    /// Characters of `items[i..]` without blanks or parentheses.
    suffix_chars: Vec<usize>,
    /// Deepest element of `items[i..]`.
    suffix_depth: Vec<usize>,
}

static EMPTY: LazyLock<List> = LazyLock::new(|| List {
    repr: Arc::new(ListRepr { items: Vec::new(), suffix_chars: Vec::new(), suffix_depth: Vec::new() }),
    start: 0,
});

impl List {
    pub fn new(items: Vec<SExpr>) -> Self {
        if items.is_empty() {
            return EMPTY.clone();
        }
        let mut suffix_chars = vec![0; items.len()];
        let mut suffix_depth = vec![0; items.len()];
        let (mut chars, mut depth) = (0, 0);
        for (i, item) in items.iter().enumerate().rev() {
            chars += item.size_chars();
            depth = depth.max(item.depth());
            suffix_chars[i] = chars;
            suffix_depth[i] = depth;
        }
        List { repr: Arc::new(ListRepr { items, suffix_chars, suffix_depth }), start: 0 }
    }

    pub fn items(&self) -> &[SExpr] {
        &self.repr.items[self.start..]
    }

    /// Everything after the first element, sharing storage.
    pub fn tail(&self) -> List {
        if self.start + 1 >= self.repr.items.len() {
            return EMPTY.clone();
        }
        List { repr: Arc::clone(&self.repr), start: self.start + 1 }
    }

    fn chars(&self) -> usize {
        match self.repr.suffix_chars.get(self.start) {
            Some(c) => 1 + (self.repr.items.len() - self.start) + c,
            None => 3,
        }
    }

    fn depth(&self) -> usize {
        self.repr.suffix_depth.get(self.start).map_or(0, |d| d + 1)
    }
}

impl PartialEq for List {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.repr, &other.repr) && self.start == other.start)
            || (self.chars() == other.chars() && self.items() == other.items())
    }
}

impl Eq for List {}

impl Hash for List {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.items().hash(state);
    }
}

/// An S-expression: symbol, natural number, or list.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum SExpr {
    Symbol(Symbol),
    Natural(Natural),
    List(List),
}

impl SExpr {
    /// The empty list, also spelled `nil` and `()`.
    pub fn nil() -> SExpr {
        SExpr::List(EMPTY.clone())
    }

    /// Interprets an atom token: digits give a natural, `nil` the empty
    /// list, anything else a symbol.
    pub fn try_atom(token: &str) -> Result<SExpr, SymbolError> {
        if token.is_empty() {
            return Err(SymbolError::Empty);
        }
        if token == QUOTE {
            return Ok(SExpr::Symbol(Symbol::new_unchecked(QUOTE)));
        }
        if !token.chars().all(is_symbol_char) {
            return Err(SymbolError::BadChar(token.to_string()));
        }
        if token.bytes().all(|b| b.is_ascii_digit()) {
            let value = token.parse::<BigUint>().expect("digits parse");
            return Ok(SExpr::natural(value));
        }
        if token == "nil" {
            return Ok(SExpr::nil());
        }
        Ok(SExpr::Symbol(Symbol::new_unchecked(token)))
    }

    /// Like [`SExpr::try_atom`] for tokens known to be valid.
    ///
    /// Panics on an invalid token.
    pub fn atom(token: &str) -> SExpr {
        SExpr::try_atom(token).unwrap_or_else(|e| panic!("invalid atom {token:?}: {e}"))
    }

    /// A symbol, or `Err` when `name` would not read back as that symbol.
    pub fn symbol(name: &str) -> Result<SExpr, SymbolError> {
        if name.bytes().all(|b| b.is_ascii_digit()) && !name.is_empty() {
            return Err(SymbolError::Numeral(name.to_string()));
        }
        SExpr::try_atom(name)
    }

    pub fn nat(v: u64) -> SExpr {
        SExpr::natural(BigUint::from(v))
    }

    pub fn natural(v: BigUint) -> SExpr {
        SExpr::Natural(Natural::new(v))
    }

    pub fn list(items: Vec<SExpr>) -> SExpr {
        SExpr::List(List::new(items))
    }

    /// `(' x)`.
    pub fn quote(x: SExpr) -> SExpr {
        SExpr::list(vec![SExpr::atom(QUOTE), x])
    }

    pub fn boolean(b: bool) -> SExpr {
        SExpr::atom(if b { "true" } else { "false" })
    }

    /// A bit string as a list of `0`/`1` naturals.
    pub fn from_bits(bits: &BitString) -> SExpr {
        SExpr::list(bits.iter().map(|b| SExpr::nat(u64::from(b))).collect())
    }

    /// The inverse of [`SExpr::from_bits`]; `None` unless every element is
    /// the natural 0 or 1.
    pub fn to_bitstring(&self) -> Option<BitString> {
        self.as_list()?
            .iter()
            .map(|e| match e.as_u64() {
                Some(b @ (0 | 1)) => Some(b as u8),
                _ => None,
            })
            .collect::<Option<Vec<u8>>>()
            .map(BitString::from)
    }

    pub fn is_nil(&self) -> bool {
        matches!(self, SExpr::List(l) if l.items().is_empty())
    }

    /// True for everything except non-empty lists.
    pub fn is_atom(&self) -> bool {
        !matches!(self, SExpr::List(l) if !l.items().is_empty())
    }

    /// The elements of a list; `nil` gives an empty slice.
    pub fn as_list(&self) -> Option<&[SExpr]> {
        match self {
            SExpr::List(l) => Some(l.items()),
            _ => None,
        }
    }

    pub fn as_symbol(&self) -> Option<&str> {
        match self {
            SExpr::Symbol(s) => Some(s.as_str()),
            _ => None,
        }
    }

    pub fn as_natural(&self) -> Option<&BigUint> {
        match self {
            SExpr::Natural(n) => Some(n.value()),
            _ => None,
        }
    }

    pub fn as_u64(&self) -> Option<u64> {
        match self {
            SExpr::Natural(n) => n.to_u64(),
            _ => None,
        }
    }

    pub fn is_symbol(&self, name: &str) -> bool {
        self.as_symbol() == Some(name)
    }

    /// Length in characters of the canonical text.
    pub fn size_chars(&self) -> usize {
        match self {
            SExpr::Symbol(s) => s.as_str().len(),
            SExpr::Natural(n) => n.chars(),
            SExpr::List(l) => l.chars(),
        }
    }

    /// List nesting depth; atoms and `nil` have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            SExpr::List(l) => l.depth(),
            _ => 0,
        }
    }

    /// Canonical text followed by a newline, 8 bits per character, most
    /// significant bit first.
    pub fn to_bits(&self) -> BitString {
        let text = self.to_string();
        let mut bits = BitString::new();
        for byte in text.bytes().chain(std::iter::once(b'\n')) {
            for i in (0..8).rev() {
                bits.push((byte >> i) & 1);
            }
        }
        bits
    }

    /// Every atom occurring in the expression (including `nil` for empty
    /// lists), each once, in first-occurrence order.
    pub fn atoms(&self) -> Vec<SExpr> {
        fn walk(e: &SExpr, out: &mut Vec<SExpr>) {
            match e.as_list() {
                Some(items) if !items.is_empty() => items.iter().for_each(|i| walk(i, out)),
                _ => {
                    if !out.contains(e) {
                        out.push(e.clone());
                    }
                }
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out
    }
}

impl fmt::Display for SExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SExpr::Symbol(s) => f.write_str(s.as_str()),
            SExpr::Natural(n) => write!(f, "{}", n.value()),
            SExpr::List(l) if l.items().is_empty() => f.write_str("nil"),
            SExpr::List(l) => {
                f.write_str("(")?;
                for (i, item) in l.items().iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{item}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl fmt::Debug for SExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl From<u64> for SExpr {
    fn from(v: u64) -> Self {
        SExpr::nat(v)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReadExpError {
    #[error("out of data")]
    OutOfData,
    #[error("malformed expression: {0}")]
    Parse(ParseError),
}

impl From<OutOfData> for ReadExpError {
    fn from(_: OutOfData) -> Self {
        ReadExpError::OutOfData
    }
}

/// Reads one expression encoded as 8-bit characters terminated by a newline.
///
/// The text is parsed fully parenthesized when possible and otherwise with
/// the primitive arity table. A byte that is neither printable ASCII nor the
/// newline is rejected as soon as it is read.
pub fn read_exp_from_stream(stream: &mut BitStream) -> Result<SExpr, ReadExpError> {
    let mut text = String::new();
    loop {
        let byte = stream.read_byte()?;
        match byte {
            b'\n' => break,
            0x20..=0x7e => text.push(char::from(byte)),
            _ => {
                return Err(ReadExpError::Parse(ParseError {
                    kind: ParseErrorKind::InvalidCharacter(char::from(byte)),
                    line: 1,
                    column: text.len() + 1,
                }))
            }
        }
    }
    match parse_full(&text) {
        Ok(e) => Ok(e),
        Err(full_err) => parse_implicit(&text, ArityTable::primitives()).map_err(|_| ReadExpError::Parse(full_err)),
    }
}
