//! Exact decimal parsing and rendering for [`Rat`].

use num_bigint::BigInt;
use num_traits::{Pow, ToPrimitive, Zero};

use crate::Rat;

/// Parses `123`, `-4.5`, `0.125` exactly.
pub fn parse_decimal(text: &str) -> Option<Rat> {
    let (neg, body) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text),
    };
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    if int_part.is_empty() || !int_part.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    if !frac_part.bytes().all(|b| b.is_ascii_digit()) || (body.contains('.') && frac_part.is_empty()) {
        return None;
    }
    let digits: BigInt = format!("{int_part}{frac_part}").parse().ok()?;
    let den = BigInt::from(10u32).pow(frac_part.len());
    let r = Rat::new(digits, den);
    Some(if neg { -r } else { r })
}

/// Exact decimal text if the denominator divides a power of ten.
pub fn to_exact_decimal(r: &Rat) -> Option<String> {
    let mut den = r.denom().clone();
    let (two, five) = (BigInt::from(2), BigInt::from(5));
    let mut places = 0u32;
    let mut twos = 0u32;
    let mut fives = 0u32;
    while (&den % &two).is_zero() {
        den /= &two;
        twos += 1;
    }
    while (&den % &five).is_zero() {
        den /= &five;
        fives += 1;
    }
    if den != BigInt::from(1) {
        return None;
    }
    places = places.max(twos).max(fives);
    if places == 0 {
        return Some(r.numer().to_string());
    }
    let scaled = r * Rat::from_integer(BigInt::from(10u32).pow(places));
    let n = scaled.to_integer();
    let neg = n < BigInt::zero();
    let digits = if neg { (-n).to_string() } else { n.to_string() };
    let digits = format!("{:0>width$}", digits, width = places as usize + 1);
    let (i, f) = digits.split_at(digits.len() - places as usize);
    Some(format!("{}{}.{}", if neg { "-" } else { "" }, i, f))
}

/// Shortest decimal that round-trips through `f64`, e.g. `6.666666666666667` or `10.0`.
pub fn to_float_string(r: &Rat) -> String {
    match r.to_f64() {
        Some(x) => format!("{x:?}"),
        None => r.to_string(),
    }
}
