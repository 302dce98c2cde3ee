//! Exact rational helpers shared by every module.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational number.
pub type Rational = BigRational;

/// `num / den` as an exact rational. Panics if `den == 0`.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn integer(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// Parses `p`, `p/q` or a finite decimal such as `-3.25`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::InvalidParams(format!("not a rational number: {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = whole.starts_with('-');
        let digits = format!("{}{}", whole.trim_start_matches(['-', '+']), frac);
        let mut num: BigInt = digits.parse().map_err(|_| bad())?;
        if negative {
            num = -num;
        }
        let den = num_traits::pow(BigInt::from(10), frac.len());
        return Ok(Rational::new(num, den));
    }
    let p: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(p))
}

/// Always `p/q`, with `q = 1` for integers.
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn floor_usize(r: &Rational) -> usize {
    r.floor().to_integer().to_usize().unwrap_or(0)
}

pub fn ceil_usize(r: &Rational) -> usize {
    r.ceil().to_integer().to_usize().unwrap_or(0)
}

/// `⌊√r⌋` for a nonnegative rational, computed exactly.
pub fn floor_sqrt(r: &Rational) -> usize {
    assert!(!r.is_negative(), "square root of a negative rational");
    // c = ⌊√(p/q)⌋ is the largest c with c²·q ≤ p.
    let p = r.numer();
    let q = r.denom();
    let mut c = (p / q).sqrt();
    while (&c + 1u32) * (&c + 1u32) * q <= *p {
        c += 1u32;
    }
    while &c * &c * q > *p {
        c -= 1u32;
    }
    c.to_usize().unwrap_or(usize::MAX)
}

/// `⌈√r⌉` for a nonnegative rational, computed exactly.
pub fn ceil_sqrt(r: &Rational) -> usize {
    let f = floor_sqrt(r);
    let fr = Rational::from_integer(BigInt::from(f));
    if &fr * &fr == *r {
        f
    } else {
        f + 1
    }
}

/// Binomial coefficient saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step.
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

pub(crate) fn is_in_half_open_unit(r: &Rational) -> bool {
    r.is_positive() && *r <= Rational::one()
}
