//! Bit strings and a read cursor over them.
//!
//! Bits are stored one per byte (`0` or `1`). Ordering is lexicographic, so a
//! proper prefix sorts before its extensions.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// A finite sequence of bits.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString(Vec<u8>);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BitParseError {
    #[error("invalid bit character {0:?}")]
    BadChar(char),
    #[error("unbalanced parentheses in bit list")]
    Unbalanced,
}

impl BitString {
    pub fn new() -> Self {
        Self(Vec::new())
    }

    /// Builds from a slice of `0`/`1` values. Any nonzero value counts as 1.
    pub fn from_bits(bits: &[u8]) -> Self {
        Self(bits.iter().map(|&b| u8::from(b != 0)).collect())
    }

    /// The `len`-bit big-endian representation of `value`.
    pub fn from_u64(value: u64, len: usize) -> Self {
        Self((0..len).rev().map(|i| if i < 64 { ((value >> i) & 1) as u8 } else { 0 }).collect())
    }

    /// Base-two numeral of `n`, most significant bit first; zero is empty.
    pub fn numeral(n: u64) -> Self {
        let len = (64 - n.leading_zeros()) as usize;
        Self::from_u64(n, len)
    }

    /// Value of the bits read as a big-endian numeral. `None` on overflow.
    pub fn numeral_value(&self) -> Option<u64> {
        self.0.iter().try_fold(0u64, |acc, &b| acc.checked_mul(2).map(|v| v + u64::from(b)))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }

    pub fn push(&mut self, bit: u8) {
        self.0.push(u8::from(bit != 0));
    }

    pub fn extend_from(&mut self, other: &BitString) {
        self.0.extend_from_slice(&other.0);
    }

    pub fn concat(&self, other: &BitString) -> BitString {
        let mut out = self.clone();
        out.extend_from(other);
        out
    }

    /// `self` extended by one bit.
    pub fn child(&self, bit: u8) -> BitString {
        let mut out = BitString(Vec::with_capacity(self.len() + 1));
        out.0.extend_from_slice(&self.0);
        out.push(bit);
        out
    }

    pub fn is_prefix_of(&self, other: &BitString) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn slice(&self, start: usize, end: usize) -> BitString {
        BitString(self.0[start..end].to_vec())
    }

    pub fn iter(&self) -> impl Iterator<Item = u8> + '_ {
        self.0.iter().copied()
    }

    /// Every bit string of exactly `len` bits, in lexicographic order.
    pub fn all_of_len(len: usize) -> impl Iterator<Item = BitString> {
        assert!(len < 64, "exhaustive enumeration limited to lengths below 64");
        (0..(1u64 << len)).map(move |v| BitString::from_u64(v, len))
    }

    /// Every bit string of length at most `max_len`, ordered by length then
    /// lexicographically.
    pub fn all_up_to(max_len: usize) -> impl Iterator<Item = BitString> {
        (0..=max_len).flat_map(BitString::all_of_len)
    }

    /// List form, e.g. `(0 1 1)`.
    pub fn to_list_text(&self) -> String {
        let inner: Vec<&str> = self.0.iter().map(|&b| if b == 1 { "1" } else { "0" }).collect();
        format!("({})", inner.join(" "))
    }
}

impl From<Vec<u8>> for BitString {
    fn from(v: Vec<u8>) -> Self {
        BitString::from_bits(&v)
    }
}

impl FromIterator<u8> for BitString {
    fn from_iter<I: IntoIterator<Item = u8>>(iter: I) -> Self {
        BitString(iter.into_iter().map(|b| u8::from(b != 0)).collect())
    }
}

/// Accepts the compact form `0110` and the list form `(0 1 1 0)`. Whitespace
/// is ignored in both; the empty string and `()` denote the empty bit string.
impl FromStr for BitString {
    type Err = BitParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let trimmed = s.trim();
        let body = match trimmed.strip_prefix('(') {
            Some(rest) => rest.strip_suffix(')').ok_or(BitParseError::Unbalanced)?,
            None => trimmed,
        };
        let mut bits = Vec::with_capacity(body.len());
        for c in body.chars() {
            match c {
                '0' => bits.push(0),
                '1' => bits.push(1),
                c if c.is_whitespace() => {}
                '(' | ')' => return Err(BitParseError::Unbalanced),
                c => return Err(BitParseError::BadChar(c)),
            }
        }
        Ok(BitString(bits))
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

/// The read past the end of a [`BitStream`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("out of data")]
pub struct OutOfData;

/// A bit string with a read cursor, consumed front to back.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitStream {
    bits: BitString,
    pos: usize,
}

impl BitStream {
    pub fn new(bits: BitString) -> Self {
        Self { bits, pos: 0 }
    }

    pub fn read_bit(&mut self) -> Result<u8, OutOfData> {
        let b = *self.bits.0.get(self.pos).ok_or(OutOfData)?;
        self.pos += 1;
        Ok(b)
    }

    /// Reads `n` bits, or fails without moving the cursor.
    pub fn read_bits(&mut self, n: usize) -> Result<BitString, OutOfData> {
        if self.remaining() < n {
            return Err(OutOfData);
        }
        let out = self.bits.slice(self.pos, self.pos + n);
        self.pos += n;
        Ok(out)
    }

    /// Eight bits, most significant first.
    pub fn read_byte(&mut self) -> Result<u8, OutOfData> {
        if self.remaining() < 8 {
            self.pos = self.bits.len();
            return Err(OutOfData);
        }
        let mut byte = 0u8;
        for _ in 0..8 {
            byte = (byte << 1) | self.read_bit()?;
        }
        Ok(byte)
    }

    pub fn position(&self) -> usize {
        self.pos
    }

    pub fn remaining(&self) -> usize {
        self.bits.len() - self.pos
    }

    pub fn is_exhausted(&self) -> bool {
        self.remaining() == 0
    }

    pub fn bits(&self) -> &BitString {
        &self.bits
    }
}

/// True when no element of `codes` is a proper prefix of another (duplicates
/// count as a violation).
pub fn is_prefix_free(codes: &[BitString]) -> bool {
    let mut sorted: Vec<&BitString> = codes.iter().collect();
    sorted.sort();
    // In lexicographic order every extension of `a` directly follows `a`.
    sorted.windows(2).all(|w| !w[0].is_prefix_of(w[1]))
}
