//! Four ways to make a bit string self-delimiting.
//!
//! * doubling: every bit twice, then `01` (`2N + 2` bits);
//! * header: the doubled base-two numeral of `N`, then the `N` bits;
//! * two-header: the doubled numeral of the *length* of `N`'s numeral, then
//!   `N`'s numeral undoubled, then the bits;
//! * elegant header: a shortest program for `N` on some machine, then the
//!   bits.
//!
//! Numerals are most significant bit first and the numeral of zero is empty.
//! Decoders accept either unequal pair (`01` or `10`) as the doubling
//! terminator; encoders always write `01`.

use thiserror::Error;

use crate::ait::{h_upper, ComplexityRecord};
use crate::bits::{BitStream, BitString, OutOfData};
use crate::interpreter::Budget;
use crate::sexpr::SExpr;
use crate::universal::{Machine, RunResult};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodecError {
    #[error("out of data")]
    OutOfData,
    #[error("no program for length {length} within {cap} bits")]
    SearchExhausted { length: usize, cap: usize },
    #[error("header does not describe a length: {0}")]
    BadHeader(String),
}

impl From<OutOfData> for CodecError {
    fn from(_: OutOfData) -> Self {
        CodecError::OutOfData
    }
}

/// An encoder with its stream decoder.
pub trait Codec {
    fn name(&self) -> &'static str;
    fn encode(&self, x: &BitString) -> Result<BitString, CodecError>;
    /// Reads one codeword from the front of `s`.
    fn decode(&self, s: &mut BitStream) -> Result<BitString, CodecError>;
}

pub fn encode_doubling(x: &BitString) -> BitString {
    let mut out = BitString::new();
    for b in x.iter() {
        out.push(b);
        out.push(b);
    }
    out.push(0);
    out.push(1);
    out
}

pub fn decode_doubling(s: &mut BitStream) -> Result<BitString, CodecError> {
    let mut out = BitString::new();
    loop {
        let a = s.read_bit()?;
        let b = s.read_bit()?;
        if a != b {
            return Ok(out);
        }
        out.push(a);
    }
}

fn numeral_len(n: usize) -> usize {
    BitString::numeral(n as u64).len()
}

fn length_from(numeral: &BitString) -> Result<usize, CodecError> {
    numeral
        .numeral_value()
        .and_then(|v| usize::try_from(v).ok())
        .ok_or_else(|| CodecError::BadHeader(numeral.to_string()))
}

pub fn encode_header_numeral(x: &BitString) -> BitString {
    encode_doubling(&BitString::numeral(x.len() as u64)).concat(x)
}

pub fn decode_header_numeral(s: &mut BitStream) -> Result<BitString, CodecError> {
    let n = length_from(&decode_doubling(s)?)?;
    Ok(s.read_bits(n)?)
}

/// `2 * bits(N) + 2 + N`.
pub fn header_numeral_len(n: usize) -> usize {
    2 * numeral_len(n) + 2 + n
}

pub fn encode_two_header(x: &BitString) -> BitString {
    let numeral = BitString::numeral(x.len() as u64);
    encode_doubling(&BitString::numeral(numeral.len() as u64)).concat(&numeral).concat(x)
}

pub fn decode_two_header(s: &mut BitStream) -> Result<BitString, CodecError> {
    let numeral_bits = length_from(&decode_doubling(s)?)?;
    let n = length_from(&s.read_bits(numeral_bits)?)?;
    Ok(s.read_bits(n)?)
}

/// `2 * bits(bits(N)) + 2 + bits(N) + N`.
pub fn two_header_len(n: usize) -> usize {
    let m = numeral_len(n);
    2 * numeral_len(m) + 2 + m + n
}

/// The header is the shortest program for `|x|` found on `machine`.
pub fn encode_elegant_header(
    x: &BitString,
    machine: &dyn Machine,
    size_cap: usize,
    budget: u64,
) -> Result<(BitString, ComplexityRecord), CodecError> {
    let target = SExpr::nat(x.len() as u64);
    let record = h_upper(&target, machine, size_cap, budget)
        .map_err(|_| CodecError::SearchExhausted { length: x.len(), cap: size_cap })?;
    let program = record.witness.bits().expect("machine search yields bit programs").clone();
    Ok((program.concat(x), record))
}

/// Finds the shortest prefix of the stream on which `machine` halts with a
/// natural `N`, then reads `N` bits.
pub fn decode_elegant_header(
    s: &mut BitStream,
    machine: &dyn Machine,
    size_cap: usize,
    budget: u64,
) -> Result<BitString, CodecError> {
    let start = s.position();
    let rest = s.bits().slice(start, s.bits().len());
    for len in 0..=size_cap.min(rest.len()) {
        let prefix = rest.slice(0, len);
        match machine.run(&prefix, Budget::Limited(budget)) {
            RunResult::Halted { output, .. } => {
                let n = output
                    .as_u64()
                    .and_then(|v| usize::try_from(v).ok())
                    .ok_or_else(|| CodecError::BadHeader(output.to_string()))?;
                s.read_bits(len)?;
                return Ok(s.read_bits(n)?);
            }
            r if r.extensions_may_halt() => continue,
            r => return Err(CodecError::BadHeader(r.to_string())),
        }
    }
    if rest.len() < size_cap {
        Err(CodecError::OutOfData)
    } else {
        Err(CodecError::SearchExhausted { length: 0, cap: size_cap })
    }
}

pub struct Doubling;
pub struct HeaderNumeral;
pub struct TwoHeader;

/// The elegant-header codec over a fixed machine and search caps.
pub struct ElegantHeader<'m> {
    pub machine: &'m dyn Machine,
    pub size_cap: usize,
    pub budget: u64,
}

impl Codec for Doubling {
    fn name(&self) -> &'static str {
        "doubling"
    }

    fn encode(&self, x: &BitString) -> Result<BitString, CodecError> {
        Ok(encode_doubling(x))
    }

    fn decode(&self, s: &mut BitStream) -> Result<BitString, CodecError> {
        decode_doubling(s)
    }
}

impl Codec for HeaderNumeral {
    fn name(&self) -> &'static str {
        "header"
    }

    fn encode(&self, x: &BitString) -> Result<BitString, CodecError> {
        Ok(encode_header_numeral(x))
    }

    fn decode(&self, s: &mut BitStream) -> Result<BitString, CodecError> {
        decode_header_numeral(s)
    }
}

impl Codec for TwoHeader {
    fn name(&self) -> &'static str {
        "two-header"
    }

    fn encode(&self, x: &BitString) -> Result<BitString, CodecError> {
        Ok(encode_two_header(x))
    }

    fn decode(&self, s: &mut BitStream) -> Result<BitString, CodecError> {
        decode_two_header(s)
    }
}

impl Codec for ElegantHeader<'_> {
    fn name(&self) -> &'static str {
        "elegant"
    }

    fn encode(&self, x: &BitString) -> Result<BitString, CodecError> {
        encode_elegant_header(x, self.machine, self.size_cap, self.budget).map(|(code, _)| code)
    }

    fn decode(&self, s: &mut BitStream) -> Result<BitString, CodecError> {
        decode_elegant_header(s, self.machine, self.size_cap, self.budget)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::is_prefix_free;
    use crate::universal::NumeralMachine;

    fn b(s: &str) -> BitString {
        s.parse().unwrap()
    }

    fn decode_str(codec: &dyn Codec, s: &str) -> (BitString, usize) {
        let mut stream = BitStream::new(b(s));
        let x = codec.decode(&mut stream).unwrap();
        (x, stream.position())
    }

    #[test]
    fn doubling_examples() {
        assert_eq!(encode_doubling(&b("001")), b("00001101"));
        assert_eq!(encode_doubling(&b("")), b("01"));
        assert_eq!(encode_doubling(&b("1")), b("1101"));
        assert_eq!(decode_str(&Doubling, "00001101"), (b("001"), 8));
        assert_eq!(decode_str(&Doubling, "01"), (b(""), 2));
        assert_eq!(decode_str(&Doubling, "10"), (b(""), 2));
        assert_eq!(Doubling.decode(&mut BitStream::new(b("000"))), Err(CodecError::OutOfData));
    }

    #[test]
    fn header_examples() {
        assert_eq!(encode_header_numeral(&b("")), b("01"));
        assert_eq!(encode_header_numeral(&b("1010")), b("110000011010"));
        assert_eq!(decode_str(&HeaderNumeral, "1100000110101111"), (b("1010"), 12));
        assert_eq!(header_numeral_len(4), 12);
    }

    #[test]
    fn two_header_examples() {
        assert_eq!(encode_two_header(&b("")), b("01"));
        assert_eq!(encode_two_header(&b("0110")), b("111101").concat(&b("100")).concat(&b("0110")));
        assert_eq!(two_header_len(4), 13);
        assert_eq!(decode_str(&TwoHeader, "1111011000110"), (b("0110"), 13));
    }

    #[test]
    fn unconditional_codecs_round_trip_exhaustively() {
        let codecs: [&dyn Codec; 3] = [&Doubling, &HeaderNumeral, &TwoHeader];
        for codec in codecs {
            let words: Vec<BitString> = BitString::all_up_to(8).map(|x| codec.encode(&x).unwrap()).collect();
            assert!(is_prefix_free(&words), "{}", codec.name());
            for (x, w) in BitString::all_up_to(8).zip(&words) {
                let mut s = BitStream::new(w.concat(&b("1011")));
                assert_eq!(codec.decode(&mut s).unwrap(), x);
                assert_eq!(s.position(), w.len());
            }
        }
    }

    #[test]
    fn elegant_header_with_numeral_machine() {
        let codec = ElegantHeader { machine: &NumeralMachine, size_cap: 16, budget: 100 };
        assert_eq!(codec.encode(&b("")).unwrap(), b("01"));
        for x in ["", "1", "0110", "1111111", "10101010101"] {
            let x = b(x);
            let code = codec.encode(&x).unwrap();
            assert_eq!(code, encode_header_numeral(&x), "numeral machine reproduces the header code");
            let mut s = BitStream::new(code.concat(&b("0")));
            assert_eq!(codec.decode(&mut s).unwrap(), x);
            assert_eq!(s.remaining(), 1);
        }
        let tight = ElegantHeader { machine: &NumeralMachine, size_cap: 1, budget: 100 };
        assert!(matches!(tight.encode(&b("1")), Err(CodecError::SearchExhausted { .. })));
    }
}
