//! Exact rational helpers shared by the fuzzy and temporal domains.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Integer, One, Signed, Zero};

pub type Rational = BigRational;

/// Parses `-12`, `3.25`, `+0.5` or `7/3` into an exact rational.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let (neg, body) = match text.as_bytes().first()? {
        b'-' => (true, &text[1..]),
        b'+' => (false, &text[1..]),
        _ => (false, text),
    };
    let value = if let Some((num, den)) = body.split_once('/') {
        let n = parse_digits(num)?;
        let d = parse_digits(den)?;
        if d.is_zero() {
            return None;
        }
        Rational::new(n, d)
    } else if let Some((int, frac)) = body.split_once('.') {
        if int.is_empty() || frac.is_empty() {
            return None;
        }
        let whole = parse_digits(int)?;
        let digits = parse_digits(frac)?;
        let scale = num::pow(BigInt::from(10u32), frac.len());
        Rational::new(whole * &scale + digits, scale)
    } else {
        Rational::from_integer(parse_digits(body)?)
    };
    Some(if neg { -value } else { value })
}

fn parse_digits(s: &str) -> Option<BigInt> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

/// Formats a rational as a terminating decimal when possible, `p/q` otherwise.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        return r.numer().to_string();
    }
    let mut den = r.denom().clone();
    let two = BigInt::from(2u32);
    let five = BigInt::from(5u32);
    let (mut twos, mut fives) = (0usize, 0usize);
    while den.is_even() {
        den /= &two;
        twos += 1;
    }
    while (&den % &five).is_zero() {
        den /= &five;
        fives += 1;
    }
    if !den.is_one() {
        return format!("{}/{}", r.numer(), r.denom());
    }
    let places = twos.max(fives);
    let scaled = r * Rational::from_integer(num::pow(BigInt::from(10u32), places));
    let digits = scaled.to_integer().abs().to_string();
    let digits = format!("{:0>width$}", digits, width = places + 1);
    let (int, frac) = digits.split_at(digits.len() - places);
    let sign = if r.is_negative() { "-" } else { "" };
    format!("{sign}{int}.{}", frac.trim_end_matches('0'))
}

pub fn from_int(i: i64) -> Rational {
    Rational::from_integer(BigInt::from(i))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}
