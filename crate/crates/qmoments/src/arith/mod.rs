//! Exact arithmetic and combinatorial primitives used by every other module.
//!
//! - [`Rational`]: arbitrary-precision signed rational, always in lowest
//!   terms with positive denominator (the currency of all exact moments).
//! - [`BigFloat`]: arbitrary-precision decimal float for bounds, fits and
//!   tails.
//! - [`Partition`]: integer partition stored as a descending part list.
//! - [`FormalSeries`]: truncated power series in the exponential
//!   (coefficient-of-`λ^n/n!`) convention, with formal `exp` and `log`.

pub mod bigfloat;
pub mod partition;
pub mod series;

pub use bigfloat::BigFloat;
pub use partition::{partitions_even_parts, Partition};
pub use series::FormalSeries;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// Arbitrary-precision signed rational. `num`'s `BigRational` already
/// maintains the invariants we rely on: lowest terms, denominator > 0.
pub type Rational = num_rational::BigRational;

/// Shorthand for an integer-valued rational.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Shorthand for `n / d`; panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// `n!` as an exact integer.
pub fn factorial_int(n: u64) -> BigInt {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= k;
    }
    acc
}

/// `n!` as an exact rational.
pub fn factorial(n: u64) -> Rational {
    Rational::from_integer(factorial_int(n))
}

/// Binomial coefficient `C(n, k)` as an exact integer; 0 when `k > n`.
pub fn binomial_int(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1; // exact: C(n,i+1) is an integer
    }
    acc
}

/// Binomial coefficient `C(n, k)` as an exact rational; 0 when `k > n`.
pub fn binomial(n: u64, k: u64) -> Rational {
    Rational::from_integer(binomial_int(n, k))
}

/// Serialize a rational as the `"num/den"` decimal string used by all
/// persisted artifacts.
pub fn rational_to_string(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parse the `"num/den"` form (a bare integer is also accepted).
pub fn rational_from_string(s: &str) -> crate::Result<Rational> {
    let parse_int = |t: &str| -> crate::Result<BigInt> {
        t.trim()
            .parse::<BigInt>()
            .map_err(|e| crate::Error::InvalidArgument(format!("bad integer {t:?}: {e}")))
    };
    match s.split_once('/') {
        Some((n, d)) => {
            let den = parse_int(d)?;
            if den.is_zero() {
                return Err(crate::Error::InvalidArgument("zero denominator".into()));
            }
            Ok(Rational::new(parse_int(n)?, den))
        }
        None => Ok(Rational::from_integer(parse_int(s)?)),
    }
}

/// Round a rational to `sig` significant decimal figures, returned as a
/// normalized string like `2.5516e6`. Used when comparing exact moments
/// against published rounded values.
pub fn to_sig_figs(r: &Rational, sig: u32) -> String {
    assert!(sig >= 1);
    if r.is_zero() {
        return "0".to_string();
    }
    let neg = r.is_negative();
    let a = r.abs();
    // decimal exponent e with 10^e <= a < 10^(e+1)
    let mut e: i64 = 0;
    let ten = int(10);
    let one = Rational::one();
    let mut x = a.clone();
    while x >= ten {
        x /= ten.clone();
        e += 1;
    }
    while x < one {
        x *= ten.clone();
        e -= 1;
    }
    // mantissa rounded to `sig` digits
    let shifted = shift_pow10(&a, sig as i64 - 1 - e);
    let mut m = round_half_even(&shifted);
    // rounding can carry the mantissa to 10^sig
    let limit = BigInt::from(10u32).pow(sig);
    if m.magnitude() >= limit.magnitude() {
        m /= 10;
        e += 1;
    }
    let digits = m.to_string();
    let (head, tail) = digits.split_at(1);
    let body = if tail.is_empty() || tail.chars().all(|c| c == '0') {
        head.to_string()
    } else {
        format!("{head}.{}", tail.trim_end_matches('0'))
    };
    let sign = if neg { "-" } else { "" };
    format!("{sign}{body}e{e}")
}

fn shift_pow10(r: &Rational, k: i64) -> Rational {
    let p = BigInt::from(10u32).pow(k.unsigned_abs() as u32);
    if k >= 0 {
        r * Rational::from_integer(p)
    } else {
        r / Rational::from_integer(p)
    }
}

/// Round to nearest integer, ties to even.
pub fn round_half_even(r: &Rational) -> BigInt {
    let two = BigInt::from(2);
    let num = r.numer();
    let den = r.denom();
    let (q, rem) = num_integer::Integer::div_mod_floor(num, den);
    let twice = &rem * &two;
    match twice.cmp(den) {
        std::cmp::Ordering::Less => q,
        std::cmp::Ordering::Greater => q + 1,
        std::cmp::Ordering::Equal => {
            if num_integer::Integer::is_even(&q) {
                q
            } else {
                q + 1
            }
        }
    }
}
