//! Exact rational helpers. Every proportion in the crate is a reduced
//! [`BigRational`]; these functions cover the few operations the rest of the
//! code needs on top of `num-rational`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type ExactRational = BigRational;

pub fn ratio<A: Into<BigInt>, B: Into<BigInt>>(num: A, den: B) -> ExactRational {
    BigRational::new(num.into(), den.into())
}

pub fn int<A: Into<BigInt>>(a: A) -> ExactRational {
    BigRational::from_integer(a.into())
}

/// Nearest integer, realised as `floor(x + 1/2)`.
pub fn nearest_integer(x: &ExactRational) -> BigInt {
    (x + ratio(1, 2)).floor().to_integer()
}

/// Always `p/q`, including integers (`3/1`).
pub fn fmt_ratio(x: &ExactRational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

pub fn parse_ratio(s: &str) -> Option<ExactRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(BigRational::new(n, d))
            }
        }
        None => s.parse::<BigInt>().ok().map(BigRational::from_integer),
    }
}

pub fn to_f64(x: &ExactRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Decimal approximation with `places` digits, computed exactly then rounded.
pub fn fmt_decimal(x: &ExactRational, places: usize) -> String {
    let scale = BigInt::from(10u32).pow(places as u32);
    let scaled = nearest_integer(&(x * BigRational::from_integer(scale.clone())));
    let neg = scaled.is_negative();
    let (q, r) = scaled.abs().div_rem(&scale);
    let frac = format!("{:0>width$}", r.to_string(), width = places);
    let sign = if neg { "-" } else { "" };
    if places == 0 {
        format!("{sign}{q}")
    } else {
        format!("{sign}{q}.{frac}")
    }
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    (0..k).fold(BigInt::one(), |acc, i| acc * (n - i) / (i + 1))
}
