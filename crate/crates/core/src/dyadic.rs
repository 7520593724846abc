//! Exact non-negative rationals with power-of-two denominators.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign};

use num_bigint::BigUint;
use num_traits::{One, Zero};

/// `numerator / 2^exponent`, kept in lowest terms (odd numerator or zero
/// exponent).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    numerator: BigUint,
    exponent: u32,
}

impl Dyadic {
    pub fn zero() -> Self {
        Self { numerator: BigUint::zero(), exponent: 0 }
    }

    pub fn one() -> Self {
        Self { numerator: BigUint::one(), exponent: 0 }
    }

    pub fn new(numerator: impl Into<BigUint>, exponent: u32) -> Self {
        let mut d = Self { numerator: numerator.into(), exponent };
        d.normalize();
        d
    }

    /// `2^-k`.
    pub fn pow2_neg(k: u32) -> Self {
        Self { numerator: BigUint::one(), exponent: k }
    }

    fn normalize(&mut self) {
        if self.numerator.is_zero() {
            self.exponent = 0;
            return;
        }
        let tz = self.numerator.trailing_zeros().unwrap_or(0).min(u64::from(self.exponent));
        self.numerator >>= tz;
        self.exponent -= tz as u32;
    }

    pub fn numerator(&self) -> &BigUint {
        &self.numerator
    }

    /// Denominator exponent `k` in `n/2^k`.
    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }

    fn scaled_to(&self, exponent: u32) -> BigUint {
        debug_assert!(exponent >= self.exponent);
        &self.numerator << (exponent - self.exponent)
    }

    /// `self - other`, or `None` when the result would be negative.
    pub fn checked_sub(&self, other: &Dyadic) -> Option<Dyadic> {
        let e = self.exponent.max(other.exponent);
        let (a, b) = (self.scaled_to(e), other.scaled_to(e));
        (a >= b).then(|| Dyadic::new(a - b, e))
    }

    /// The first `n` binary digits after the point, truncating.
    pub fn truncate_bits(&self, n: u32) -> Dyadic {
        if self.exponent <= n {
            return self.clone();
        }
        Dyadic::new(&self.numerator >> (self.exponent - n), n)
    }

    /// Nearest multiple of `2^-n`, ties rounding up.
    pub fn round_bits(&self, n: u32) -> Dyadic {
        if self.exponent <= n {
            return self.clone();
        }
        let shift = self.exponent - n;
        let half = BigUint::one() << (shift - 1);
        Dyadic::new((&self.numerator + half) >> shift, n)
    }

    /// Binary expansion with exactly `n` digits after the point (truncated).
    pub fn binary_digits(&self, n: u32) -> String {
        let t = self.truncate_bits(n);
        let scaled = t.scaled_to(n.max(t.exponent));
        let int_part = &scaled >> n;
        let frac = &scaled - (&int_part << n);
        let mut digits = frac.to_str_radix(2);
        while digits.len() < n as usize {
            digits.insert(0, '0');
        }
        if n == 0 {
            int_part.to_string()
        } else {
            format!("{int_part}.{digits}")
        }
    }

    /// Full binary expansion, which is always finite: `0.01111`, `1`, `0`.
    pub fn binary_expansion(&self) -> String {
        self.binary_digits(self.exponent)
    }

    /// The `i`-th binary digit after the point (1-based).
    pub fn bit(&self, i: u32) -> u8 {
        let t = self.truncate_bits(i);
        let scaled = t.scaled_to(i.max(t.exponent));
        u8::from(scaled.bit(0))
    }
}

impl Default for Dyadic {
    fn default() -> Self {
        Self::zero()
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let e = self.exponent.max(other.exponent);
        self.scaled_to(e).cmp(&other.scaled_to(e))
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add<&Dyadic> for &Dyadic {
    type Output = Dyadic;

    fn add(self, rhs: &Dyadic) -> Dyadic {
        let e = self.exponent.max(rhs.exponent);
        Dyadic::new(self.scaled_to(e) + rhs.scaled_to(e), e)
    }
}

impl Add for Dyadic {
    type Output = Dyadic;

    fn add(self, rhs: Dyadic) -> Dyadic {
        &self + &rhs
    }
}

impl AddAssign<&Dyadic> for Dyadic {
    fn add_assign(&mut self, rhs: &Dyadic) {
        *self = &*self + rhs;
    }
}

impl std::iter::Sum for Dyadic {
    fn sum<I: Iterator<Item = Dyadic>>(iter: I) -> Self {
        iter.fold(Dyadic::zero(), |acc, d| &acc + &d)
    }
}

/// Fraction form: `15/32`, `0`, `1`.
impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponent == 0 {
            write!(f, "{}", self.numerator)
        } else {
            write!(f, "{}/{}", self.numerator, BigUint::one() << self.exponent)
        }
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dyadic({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(n: u64, e: u32) -> Dyadic {
        Dyadic::new(n, e)
    }

    #[test]
    fn normalizes_and_prints() {
        assert_eq!(d(2, 2), d(1, 1));
        assert_eq!(d(15, 5).to_string(), "15/32");
        assert_eq!(d(0, 9).to_string(), "0");
        assert_eq!(d(4, 2).to_string(), "1");
        assert_eq!(d(15, 5).binary_expansion(), "0.01111");
        assert_eq!(d(3, 2).binary_expansion(), "0.11");
        assert_eq!(Dyadic::one().binary_expansion(), "1");
    }

    #[test]
    fn arithmetic_and_order() {
        let sum: Dyadic = (1..=4).map(Dyadic::pow2_neg).sum();
        assert_eq!(sum, d(15, 4));
        assert!(d(15, 5) < d(1, 1));
        assert_eq!(d(1, 1).checked_sub(&d(1, 2)), Some(d(1, 2)));
        assert_eq!(d(1, 2).checked_sub(&d(1, 1)), None);
    }

    #[test]
    fn truncation_and_rounding() {
        let x = d(15, 5);
        assert_eq!(x.binary_digits(4), "0.0111");
        assert_eq!(x.round_bits(4).binary_digits(4), "0.1000");
        assert_eq!(d(1, 1).binary_digits(4), "0.1000");
        assert_eq!(x.bit(1), 0);
        assert_eq!(x.bit(2), 1);
        assert_eq!(x.bit(9), 0);
    }
}
