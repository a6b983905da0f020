//! Exact decimal arithmetic for durations, costs, frequencies and weights.
//!
//! Model files carry plain decimal literals ("0.332", "1049.941"). Those are
//! held as reduced `i128` rationals, so sums, products and quotients stay
//! exact and accumulated money/time never picks up binary-float drift.
//! Rounding happens only at display time, half-up (ties away from zero).

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// An exact decimal value. Closed under `+ - * /` (division by zero panics,
/// like integer division). Values are expected to stay well inside `i128`
/// range; the toolkit's domain (minutes, euros, weights, day counts) does.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Decimal(Ratio<i128>);

/// Error returned when a decimal literal cannot be parsed.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid decimal literal {literal:?}: {reason}")]
pub struct DecimalParseError {
    pub literal: String,
    pub reason: &'static str,
}

impl Decimal {
    pub const ZERO: Decimal = Decimal(Ratio::new_raw(0, 1));
    pub const ONE: Decimal = Decimal(Ratio::new_raw(1, 1));

    pub fn from_int(value: i64) -> Decimal {
        Decimal(Ratio::from_integer(value as i128))
    }

    /// Exact value numerator/denominator; `denominator > 0`.
    pub fn from_fraction(numerator: i128, denominator: i128) -> Decimal {
        Decimal(Ratio::new(numerator, denominator))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn abs(&self) -> Decimal {
        Decimal(self.0.abs())
    }

    /// True when the value can be written with at most `places` fractional
    /// digits, i.e. the reduced denominator divides 10^places.
    pub fn fits_places(&self, places: u32) -> bool {
        (pow10(places) % self.0.denom()) == 0
    }

    /// Rounds to `places` fractional digits, half-up (ties away from zero).
    pub fn round_half_up(&self, places: u32) -> Decimal {
        let scale = pow10(places);
        let scaled = self.0 * Ratio::from_integer(scale);
        Decimal(Ratio::new(scaled.round().to_integer(), scale))
    }

    /// Plain decimal string rounded to at most `max_places` digits,
    /// trailing zeros trimmed, never scientific notation.
    pub fn display(&self, max_places: u32) -> String {
        self.round_half_up(max_places).to_string()
    }

    /// Approximate conversion; used only where exactness is not required
    /// (random arrival rates, Python-facing conveniences).
    pub fn to_f64(&self) -> f64 {
        *self.0.numer() as f64 / *self.0.denom() as f64
    }

    /// Nearest integer, half away from zero.
    pub fn round_to_i64(&self) -> i64 {
        self.0.round().to_integer() as i64
    }

    /// Exact expansion if the value terminates, `None` otherwise
    /// (denominator has a prime factor other than 2 and 5).
    fn terminating_scale(&self) -> Option<u32> {
        let mut d = *self.0.denom();
        let mut twos = 0u32;
        while d % 2 == 0 {
            d /= 2;
            twos += 1;
        }
        let mut fives = 0u32;
        while d % 5 == 0 {
            d /= 5;
            fives += 1;
        }
        (d == 1).then_some(twos.max(fives))
    }
}

fn pow10(places: u32) -> i128 {
    10i128
        .checked_pow(places)
        .expect("decimal scale out of range")
}

impl fmt::Display for Decimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Non-terminating expansions (possible after division) fall back to
        // twelve rounded digits; terminating values print exactly.
        let value = match self.terminating_scale() {
            Some(_) => *self,
            None => self.round_half_up(12),
        };
        let scale = value.terminating_scale().expect("rounded value terminates");
        let scaled = (value.0 * Ratio::from_integer(pow10(scale))).to_integer();
        let sign = if scaled < 0 { "-" } else { "" };
        let magnitude = scaled.unsigned_abs();
        let base = pow10(scale) as u128;
        let int_part = magnitude / base;
        let mut frac = format!("{:0width$}", magnitude % base, width = scale as usize);
        while frac.ends_with('0') {
            frac.pop();
        }
        if frac.is_empty() {
            write!(f, "{sign}{int_part}")
        } else {
            write!(f, "{sign}{int_part}.{frac}")
        }
    }
}

impl fmt::Debug for Decimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Decimal {
    type Err = DecimalParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = |reason| DecimalParseError {
            literal: s.to_string(),
            reason,
        };
        let (sign, body) = match s.strip_prefix('-') {
            Some(rest) => (-1i128, rest),
            None => (1i128, s.strip_prefix('+').unwrap_or(s)),
        };
        let (int_part, frac_part) = match body.split_once('.') {
            Some((i, fr)) => (i, fr),
            None => (body, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(err("no digits"));
        }
        if !int_part.bytes().all(|b| b.is_ascii_digit())
            || !frac_part.bytes().all(|b| b.is_ascii_digit())
        {
            return Err(err("expected only digits around an optional '.'"));
        }
        if frac_part.len() > 27 {
            return Err(err("too many fractional digits"));
        }
        let mut numer: i128 = 0;
        for b in int_part.bytes().chain(frac_part.bytes()) {
            numer = numer
                .checked_mul(10)
                .and_then(|n| n.checked_add((b - b'0') as i128))
                .ok_or_else(|| err("magnitude out of range"))?;
        }
        Ok(Decimal(Ratio::new(
            sign * numer,
            pow10(frac_part.len() as u32),
        )))
    }
}

impl From<i64> for Decimal {
    fn from(value: i64) -> Self {
        Decimal::from_int(value)
    }
}

impl From<u32> for Decimal {
    fn from(value: u32) -> Self {
        Decimal::from_int(value as i64)
    }
}

impl Add for Decimal {
    type Output = Decimal;
    fn add(self, rhs: Decimal) -> Decimal {
        Decimal(self.0 + rhs.0)
    }
}

impl Sub for Decimal {
    type Output = Decimal;
    fn sub(self, rhs: Decimal) -> Decimal {
        Decimal(self.0 - rhs.0)
    }
}

impl Mul for Decimal {
    type Output = Decimal;
    fn mul(self, rhs: Decimal) -> Decimal {
        Decimal(self.0 * rhs.0)
    }
}

impl Div for Decimal {
    type Output = Decimal;
    fn div(self, rhs: Decimal) -> Decimal {
        Decimal(self.0 / rhs.0)
    }
}

impl Neg for Decimal {
    type Output = Decimal;
    fn neg(self) -> Decimal {
        Decimal(-self.0)
    }
}

impl AddAssign for Decimal {
    fn add_assign(&mut self, rhs: Decimal) {
        self.0 += rhs.0;
    }
}

impl SubAssign for Decimal {
    fn sub_assign(&mut self, rhs: Decimal) {
        self.0 -= rhs.0;
    }
}

impl Sum for Decimal {
    fn sum<I: Iterator<Item = Decimal>>(iter: I) -> Decimal {
        iter.fold(Decimal::ZERO, |acc, v| acc + v)
    }
}

impl<'a> Sum<&'a Decimal> for Decimal {
    fn sum<I: Iterator<Item = &'a Decimal>>(iter: I) -> Decimal {
        iter.copied().sum()
    }
}

impl Serialize for Decimal {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Decimal {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}
