//! Arbitrary-precision decimal floating point.
//!
//! A [`BigFloat`] is `mantissa * 10^exp` with the mantissa held to a
//! configurable number of significant decimal digits (default 40, minimum
//! 20). Exact inputs (rationals, integers) are rounded half-even at the
//! working precision; arithmetic rounds the exact intermediate result, so
//! individual operations are correctly rounded. Transcendental functions
//! evaluate with internal guard digits and round back.
//!
//! Only what the rest of the crate needs is implemented: field operations,
//! comparisons, `sqrt`, `exp`, `ln`, `powf`, real `Γ`, the upper incomplete
//! `Γ` continued fraction, and `π`.

use super::{round_half_even, Rational};
use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use once_cell::sync::Lazy;
use std::cmp::Ordering;
use std::collections::HashMap;
use std::sync::Mutex;

/// Default number of significant decimal digits.
pub const DEFAULT_PRECISION: u32 = 40;

/// Minimum supported precision.
pub const MIN_PRECISION: u32 = 20;

/// Arbitrary-precision decimal float: `mantissa * 10^exp`, with
/// `|mantissa| < 10^precision`.
#[derive(Clone)]
pub struct BigFloat {
    m: BigInt,
    e: i64,
    prec: u32,
}

fn pow10(k: u32) -> BigInt {
    BigInt::from(10u32).pow(k)
}

fn dec_digits(m: &BigUint) -> u64 {
    if m.is_zero() {
        return 0;
    }
    // bits * log10(2) underestimates by < 1; adjust by comparison
    let bits = m.bits();
    let mut d = ((bits as f64) * std::f64::consts::LOG10_2).floor() as u64;
    if d == 0 {
        d = 1;
    }
    let mut p = BigUint::from(10u32).pow(d as u32);
    while *m >= p {
        p *= 10u32;
        d += 1;
    }
    d
}

impl BigFloat {
    /// Zero at the given precision.
    pub fn zero(prec: u32) -> Self {
        BigFloat { m: BigInt::zero(), e: 0, prec: prec.max(MIN_PRECISION) }
    }

    pub fn one(prec: u32) -> Self {
        Self::from_i64(1, prec)
    }

    pub fn from_i64(v: i64, prec: u32) -> Self {
        Self::from_bigint(BigInt::from(v), prec)
    }

    pub fn from_bigint(v: BigInt, prec: u32) -> Self {
        BigFloat { m: v, e: 0, prec: prec.max(MIN_PRECISION) }.normalized()
    }

    /// Correctly rounded conversion from an exact rational.
    pub fn from_rational(r: &Rational, prec: u32) -> Self {
        let prec = prec.max(MIN_PRECISION);
        if r.is_zero() {
            return Self::zero(prec);
        }
        // decimal exponent e with 10^e <= |r| < 10^(e+1)
        let e = decimal_exponent(r);
        let shift = prec as i64 - 1 - e;
        let scaled = scale_pow10_rational(r, shift);
        let m = round_half_even(&scaled);
        BigFloat { m, e: -shift, prec }.normalized()
    }

    /// Exact value as a rational (`mantissa * 10^exp`).
    pub fn to_rational(&self) -> Rational {
        let base = Rational::from_integer(self.m.clone());
        if self.e >= 0 {
            base * Rational::from_integer(pow10(self.e as u32))
        } else {
            base / Rational::from_integer(pow10((-self.e) as u32))
        }
    }

    pub fn from_f64(v: f64, prec: u32) -> Self {
        assert!(v.is_finite(), "cannot convert non-finite f64");
        let r = Rational::from_float(v).expect("finite f64");
        Self::from_rational(&r, prec)
    }

    pub fn to_f64(&self) -> f64 {
        if self.m.is_zero() {
            return 0.0;
        }
        let d = dec_digits(self.m.magnitude()) as i64;
        let keep = 18.min(d);
        let drop = d - keep;
        let lead = &self.m / pow10(drop as u32);
        let lead = lead.to_i64().expect("<= 18 digits fits i64") as f64;
        let exp = self.e + drop;
        lead * 10f64.powi(exp as i32)
    }

    /// Parse decimal notation, e.g. `-3.25`, `1e142`, `2.5e-7`.
    pub fn parse(s: &str, prec: u32) -> crate::Result<Self> {
        let t = s.trim();
        let (num_part, exp_part) = match t.find(['e', 'E']) {
            Some(i) => (&t[..i], Some(&t[i + 1..])),
            None => (t, None),
        };
        let exp10: i64 = match exp_part {
            Some(x) => x
                .parse()
                .map_err(|_| crate::Error::InvalidArgument(format!("bad exponent in {s:?}")))?,
            None => 0,
        };
        let (int_part, frac_part) = match num_part.split_once('.') {
            Some((a, b)) => (a, b),
            None => (num_part, ""),
        };
        let digits = format!("{int_part}{frac_part}");
        if digits.is_empty() || digits == "-" || digits == "+" {
            return Err(crate::Error::InvalidArgument(format!("bad number {s:?}")));
        }
        let m: BigInt = digits
            .parse()
            .map_err(|_| crate::Error::InvalidArgument(format!("bad number {s:?}")))?;
        let e = exp10 - frac_part.len() as i64;
        Ok(BigFloat { m, e, prec: prec.max(MIN_PRECISION) }.normalized())
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    /// Same value rounded to a (possibly different) precision.
    pub fn with_prec(&self, prec: u32) -> Self {
        BigFloat { m: self.m.clone(), e: self.e, prec: prec.max(MIN_PRECISION) }.normalized()
    }

    pub fn is_zero(&self) -> bool {
        self.m.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.m.is_negative()
    }

    pub fn abs(&self) -> Self {
        BigFloat { m: self.m.abs(), e: self.e, prec: self.prec }
    }

    pub fn neg(&self) -> Self {
        BigFloat { m: -&self.m, e: self.e, prec: self.prec }
    }

    fn normalized(mut self) -> Self {
        if self.m.is_zero() {
            self.e = 0;
            return self;
        }
        let d = dec_digits(self.m.magnitude());
        let p = self.prec as u64;
        if d > p {
            let drop = (d - p) as u32;
            let den = pow10(drop);
            let q = rounded_div(&self.m, &den);
            self.m = q;
            self.e += drop as i64;
            // rounding may carry to one extra digit
            if dec_digits(self.m.magnitude()) > p {
                self.m /= 10;
                self.e += 1;
            }
        }
        self
    }

    pub fn cmp_val(&self, other: &Self) -> Ordering {
        match (self.m.sign(), other.m.sign()) {
            (Sign::Minus, Sign::NoSign) | (Sign::Minus, Sign::Plus) => return Ordering::Less,
            (Sign::NoSign, Sign::Minus) | (Sign::Plus, Sign::Minus) => return Ordering::Greater,
            (Sign::NoSign, Sign::NoSign) => return Ordering::Equal,
            (Sign::NoSign, Sign::Plus) => return Ordering::Less,
            (Sign::Plus, Sign::NoSign) => return Ordering::Greater,
            _ => {}
        }
        // same nonzero sign: compare m1*10^e1 vs m2*10^e2 exactly
        let (a, b) = if self.e >= other.e {
            (&self.m * pow10((self.e - other.e) as u32), other.m.clone())
        } else {
            (self.m.clone(), &other.m * pow10((other.e - self.e) as u32))
        };
        a.cmp(&b)
    }

    pub fn max_val(&self, other: &Self) -> Self {
        if self.cmp_val(other) == Ordering::Less { other.clone() } else { self.clone() }
    }

    pub fn min_val(&self, other: &Self) -> Self {
        if self.cmp_val(other) == Ordering::Greater { other.clone() } else { self.clone() }
    }

    pub fn add(&self, other: &Self) -> Self {
        let prec = self.prec.max(other.prec);
        if self.m.is_zero() {
            return other.with_prec(prec);
        }
        if other.m.is_zero() {
            return self.with_prec(prec);
        }
        // cap the alignment so a negligibly small operand cannot blow up the
        // intermediate: beyond prec + 2 digits it only perturbs the sticky bit
        let gap = self.e - other.e;
        let limit = prec as i64 + dec_digits(self.m.magnitude()).max(dec_digits(other.m.magnitude())) as i64 + 4;
        if gap > limit {
            return self.with_prec(prec);
        }
        if -gap > limit {
            return other.with_prec(prec);
        }
        let (m, e) = if gap >= 0 {
            (&self.m * pow10(gap as u32) + &other.m, other.e)
        } else {
            (&self.m + &other.m * pow10((-gap) as u32), self.e)
        };
        BigFloat { m, e, prec }.normalized()
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let prec = self.prec.max(other.prec);
        BigFloat { m: &self.m * &other.m, e: self.e + other.e, prec }.normalized()
    }

    pub fn div(&self, other: &Self) -> Self {
        assert!(!other.m.is_zero(), "division by zero BigFloat");
        let prec = self.prec.max(other.prec);
        if self.m.is_zero() {
            return Self::zero(prec);
        }
        // scale so the quotient carries prec + 3 significant digits
        let d_num = dec_digits(self.m.magnitude()) as i64;
        let d_den = dec_digits(other.m.magnitude()) as i64;
        let extra = (prec as i64 + 3 + d_den - d_num).max(0) as u32;
        let num = &self.m * pow10(extra);
        let q = rounded_div(&num, &other.m);
        BigFloat { m: q, e: self.e - other.e - extra as i64, prec }.normalized()
    }

    pub fn recip(&self) -> Self {
        Self::one(self.prec).div(self)
    }

    pub fn mul_i64(&self, k: i64) -> Self {
        BigFloat { m: &self.m * k, e: self.e, prec: self.prec }.normalized()
    }

    /// Integer part as a big integer (truncation toward zero).
    pub fn trunc_bigint(&self) -> BigInt {
        if self.m.is_zero() {
            return BigInt::zero();
        }
        if self.e >= 0 {
            &self.m * pow10(self.e as u32)
        } else {
            let den = pow10((-self.e) as u32);
            let (q, _r) = self.m.div_rem(&den);
            q
        }
    }

    /// Largest integer <= self.
    pub fn floor_bigint(&self) -> BigInt {
        if self.e >= 0 {
            return self.trunc_bigint();
        }
        let den = pow10((-self.e) as u32);
        self.m.div_floor(&den)
    }

    pub fn sqrt(&self) -> Self {
        assert!(!self.is_negative(), "sqrt of negative BigFloat");
        if self.m.is_zero() {
            return self.clone();
        }
        let prec = self.prec;
        // scale so the integer sqrt carries ~2*prec+4 digits
        let d = dec_digits(self.m.magnitude()) as i64;
        let mut shift = 2 * (prec as i64 + 2) - d;
        if (self.e - shift) % 2 != 0 {
            shift += 1;
        }
        let scaled = if shift >= 0 {
            &self.m * pow10(shift as u32)
        } else {
            &self.m / pow10((-shift) as u32)
        };
        let root = scaled.sqrt();
        BigFloat { m: root, e: (self.e - shift) / 2, prec }.normalized()
    }

    // ---------------- transcendental functions ----------------

    /// `e^x`. Handles arbitrarily large |x| via decimal range reduction.
    pub fn exp(&self) -> Self {
        let prec = self.prec;
        if self.m.is_zero() {
            return Self::one(prec);
        }
        // extra digits to absorb the integer part of x*log10(e)
        let mag_digits = {
            let d = dec_digits(self.m.magnitude()) as i64 + self.e;
            d.max(0) as u32
        };
        let work = prec + 15 + mag_digits;
        let x = self.with_prec(work);
        let l10e = log10_e(work);
        let y = x.mul(&l10e);
        let n = y.floor_bigint();
        let frac = y.sub(&BigFloat::from_bigint(n.clone(), work));
        let ln10 = ln_10(work);
        let r = frac.mul(&ln10); // in [0, ln 10)
        let small = exp_taylor_reduced(&r, work);
        let n_i64 = n.to_i64().expect("exponent fits i64");
        let mut out = small;
        out.e += n_i64;
        out.with_prec(prec)
    }

    /// Natural logarithm; panics on non-positive input.
    pub fn ln(&self) -> Self {
        assert!(!self.is_zero() && !self.is_negative(), "ln of non-positive BigFloat");
        let prec = self.prec;
        let work = prec + 12;
        // x = mhat * 10^k with 1 <= mhat < 10
        let d = dec_digits(self.m.magnitude()) as i64;
        let k = self.e + d - 1;
        let mhat = BigFloat { m: self.m.clone(), e: -(d - 1), prec: work };
        let ln_m = ln_near_one(&mhat, work);
        let out = ln_m.add(&ln_10(work).mul_i64(k));
        out.with_prec(prec)
    }

    /// `x^y` for positive base.
    pub fn powf(&self, y: &Self) -> Self {
        let prec = self.prec.max(y.prec);
        if y.is_zero() {
            return Self::one(prec);
        }
        if self.is_zero() {
            assert!(!y.is_negative(), "0^negative");
            return Self::zero(prec);
        }
        let work = prec + 10;
        let r = self.with_prec(work).ln().mul(&y.with_prec(work));
        r.exp().with_prec(prec)
    }

    /// Integer power by binary exponentiation (any sign base).
    pub fn powi(&self, k: i64) -> Self {
        let prec = self.prec;
        if k == 0 {
            return Self::one(prec);
        }
        let work = prec + 10;
        let mut base = self.with_prec(work);
        let mut n = k.unsigned_abs();
        let mut acc = BigFloat::one(work);
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            n >>= 1;
        }
        if k < 0 {
            acc = acc.recip();
        }
        acc.with_prec(prec)
    }

    /// Real Γ(x) for x > 0. Integer arguments are computed exactly as
    /// factorials; otherwise Stirling's series after an upward shift.
    pub fn gamma(&self) -> Self {
        assert!(!self.is_zero() && !self.is_negative(), "gamma needs x > 0");
        let prec = self.prec;
        let r = self.to_rational();
        if r.is_integer() {
            if let Some(n) = r.to_integer().to_u64() {
                if n >= 1 && n <= 4_000 {
                    return BigFloat::from_bigint(super::factorial_int(n - 1), prec);
                }
            }
        }
        let work = prec + 15;
        let x = self.with_prec(work);
        // shift up to the Stirling-accurate region
        let threshold = (0.6 * work as f64) as i64 + 4;
        let xi = x.floor_bigint().to_i64().unwrap_or(i64::MAX);
        let shift = (threshold - xi).max(0) as u32;
        let z = x.add(&BigFloat::from_i64(shift as i64, work));
        let lg = ln_gamma_stirling(&z, work);
        let mut out = lg.exp();
        // divide back: Γ(x) = Γ(x+m) / (x (x+1) ... (x+m-1))
        let mut fac = BigFloat::one(work);
        for j in 0..shift {
            fac = fac.mul(&x.add(&BigFloat::from_i64(j as i64, work)));
        }
        out = out.div(&fac);
        out.with_prec(prec)
    }

    /// Upper incomplete Γ(s, x) by the standard continued fraction
    /// (modified Lentz). Requires x > 0; intended for x not small.
    pub fn gamma_upper(s: &Self, x: &Self) -> Self {
        assert!(!x.is_zero() && !x.is_negative(), "gamma_upper needs x > 0");
        let prec = s.prec.max(x.prec);
        let work = prec + 10;
        let s = s.with_prec(work);
        let x = x.with_prec(work);
        let one = BigFloat::one(work);
        let tiny = {
            let mut t = BigFloat::one(work);
            t.e -= 4 * work as i64;
            t
        };
        let eps = {
            let mut t = BigFloat::one(work);
            t.e -= work as i64 + 2;
            t
        };
        let mut b = x.add(&one).sub(&s);
        let mut c = tiny.recip();
        let mut d = if b.is_zero() { tiny.recip() } else { b.recip() };
        let mut h = d.clone();
        let max_iter = 40_000;
        let mut converged = false;
        for i in 1..=max_iter {
            let an = s.sub(&BigFloat::from_i64(i, work)).mul_i64(i);
            b = b.add(&BigFloat::from_i64(2, work));
            d = an.mul(&d).add(&b);
            if d.is_zero() {
                d = tiny.clone();
            }
            c = b.add(&an.div(&c));
            if c.is_zero() {
                c = tiny.clone();
            }
            d = d.recip();
            let del = d.mul(&c);
            h = h.mul(&del);
            if del.sub(&one).abs().cmp_val(&eps) == Ordering::Less {
                converged = true;
                break;
            }
        }
        assert!(converged, "incomplete gamma continued fraction did not converge");
        // Γ(s,x) = e^{-x} x^s h
        let pre = x.ln().mul(&s).sub(&x).exp();
        pre.mul(&h).with_prec(prec)
    }

    /// π at the given precision.
    pub fn pi(prec: u32) -> Self {
        cached_const("pi", prec.max(MIN_PRECISION), |p| {
            // Machin: π = 16 atan(1/5) - 4 atan(1/239)
            let a = atan_inv_int(5, p);
            let b = atan_inv_int(239, p);
            a.mul_i64(16).sub(&b.mul_i64(4))
        })
    }

    /// Decimal string with the given number of significant digits (not
    /// subject to the MIN_PRECISION clamp).
    pub fn to_string_sig(&self, sig: u32) -> String {
        let v = BigFloat { m: self.m.clone(), e: self.e, prec: sig.max(1) }.normalized();
        format!("{v}")
    }

    /// Fixed-point rendering with `places` digits after the decimal point.
    pub fn format_fixed(&self, places: u32) -> String {
        let scaled = scale_pow10_rational(&self.to_rational(), places as i64);
        let r = round_half_even(&scaled);
        let neg = r.is_negative();
        let digits = r.magnitude().to_string();
        let digits = if digits.len() <= places as usize {
            format!("{}{}", "0".repeat(places as usize + 1 - digits.len()), digits)
        } else {
            digits
        };
        let (int_part, frac_part) = digits.split_at(digits.len() - places as usize);
        let sign = if neg { "-" } else { "" };
        if places == 0 {
            format!("{sign}{int_part}")
        } else {
            format!("{sign}{int_part}.{frac_part}")
        }
    }
}

fn rounded_div(num: &BigInt, den: &BigInt) -> BigInt {
    // round-half-even division
    let r = Rational::new(num.clone(), den.clone());
    round_half_even(&r)
}

fn decimal_exponent(r: &Rational) -> i64 {
    debug_assert!(!r.is_zero());
    let num_d = dec_digits(r.numer().magnitude()) as i64;
    let den_d = dec_digits(r.denom().magnitude()) as i64;
    let mut e = num_d - den_d; // |r| in [10^(e-1), 10^(e+1))
    let a = r.abs();
    let p = |k: i64| -> Rational {
        if k >= 0 {
            Rational::from_integer(pow10(k as u32))
        } else {
            Rational::new(BigInt::one(), pow10((-k) as u32))
        }
    };
    if a >= p(e + 1) {
        e += 1;
    } else if a < p(e) {
        e -= 1;
    }
    debug_assert!(a >= p(e) && a < p(e + 1));
    e
}

fn scale_pow10_rational(r: &Rational, k: i64) -> Rational {
    if k >= 0 {
        r * Rational::from_integer(pow10(k as u32))
    } else {
        r / Rational::from_integer(pow10((-k) as u32))
    }
}

/// exp on [0, ln 10) by halving into the Taylor-fast region.
fn exp_taylor_reduced(r: &BigFloat, work: u32) -> BigFloat {
    // halve until |r| < 2^-5
    let mut halvings = 0u32;
    let mut x = r.clone();
    let cut = BigFloat::from_rational(&super::rat(1, 32), work);
    let two = BigFloat::from_i64(2, work);
    while x.abs().cmp_val(&cut) != Ordering::Less {
        x = x.div(&two);
        halvings += 1;
        assert!(halvings < 64, "exp range reduction runaway");
    }
    let mut term = BigFloat::one(work);
    let mut sum = BigFloat::one(work);
    let eps = {
        let mut t = BigFloat::one(work);
        t.e -= work as i64 + 4;
        t
    };
    let mut k: i64 = 1;
    loop {
        term = term.mul(&x).div(&BigFloat::from_i64(k, work));
        sum = sum.add(&term);
        if term.abs().cmp_val(&eps) == Ordering::Less {
            break;
        }
        k += 1;
        assert!(k < 10_000, "exp series runaway");
    }
    for _ in 0..halvings {
        sum = sum.mul(&sum);
    }
    sum
}

/// ln for mantissa in [1, 10): three square-root reductions then the
/// atanh series, ln u = 2 Σ t^(2i+1)/(2i+1), t = (u-1)/(u+1).
fn ln_near_one(x: &BigFloat, work: u32) -> BigFloat {
    let mut u = x.with_prec(work + 8);
    let reductions = 3u32;
    for _ in 0..reductions {
        u = u.sqrt();
    }
    let one = BigFloat::one(work + 8);
    let t = u.sub(&one).div(&u.add(&one));
    let t2 = t.mul(&t);
    let mut term = t.clone();
    let mut sum = t.clone();
    let eps = {
        let mut z = BigFloat::one(work + 8);
        z.e -= (work + 12) as i64;
        z
    };
    let mut k: i64 = 1;
    loop {
        term = term.mul(&t2);
        let contrib = term.div(&BigFloat::from_i64(2 * k + 1, work + 8));
        sum = sum.add(&contrib);
        if contrib.abs().cmp_val(&eps) == Ordering::Less {
            break;
        }
        k += 1;
        assert!(k < 100_000, "ln series runaway");
    }
    sum.mul_i64(2i64 << reductions).with_prec(work)
}

/// Integer-spigot atan(1/k) at `prec` digits.
fn atan_inv_int(k: u64, prec: u32) -> BigFloat {
    let guard = 10u32;
    let scale = pow10(prec + guard);
    let kk = BigInt::from(k) * BigInt::from(k);
    let mut t = &scale / BigInt::from(k);
    let mut sum = t.clone();
    let mut i: u64 = 1;
    while !t.is_zero() {
        t = &t / &kk;
        if t.is_zero() {
            break;
        }
        let c = &t / BigInt::from(2 * i + 1);
        if i % 2 == 1 {
            sum -= c;
        } else {
            sum += c;
        }
        i += 1;
    }
    BigFloat { m: sum, e: -((prec + guard) as i64), prec: prec + guard }.with_prec(prec)
}

/// Integer-spigot atanh(1/k) at `prec` digits (k >= 2).
fn atanh_inv_int(k: u64, prec: u32) -> BigFloat {
    let guard = 10u32;
    let scale = pow10(prec + guard);
    let kk = BigInt::from(k) * BigInt::from(k);
    let mut t = &scale / BigInt::from(k);
    let mut sum = t.clone();
    let mut i: u64 = 1;
    while !t.is_zero() {
        t = &t / &kk;
        if t.is_zero() {
            break;
        }
        sum += &t / BigInt::from(2 * i + 1);
        i += 1;
    }
    BigFloat { m: sum, e: -((prec + guard) as i64), prec: prec + guard }.with_prec(prec)
}

fn ln_10(prec: u32) -> BigFloat {
    cached_const("ln10", prec, |p| {
        // ln 10 = 3 ln 2 + ln(5/4); ln 2 = 2 atanh(1/3), ln(5/4) = 2 atanh(1/9)
        let ln2 = atanh_inv_int(3, p + 5).mul_i64(2);
        let ln54 = atanh_inv_int(9, p + 5).mul_i64(2);
        ln2.mul_i64(3).add(&ln54).with_prec(p)
    })
}

fn log10_e(prec: u32) -> BigFloat {
    cached_const("log10e", prec, |p| BigFloat::one(p + 5).div(&ln_10(p + 5)).with_prec(p))
}

static CONST_CACHE: Lazy<Mutex<HashMap<(&'static str, u32), BigFloat>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

fn cached_const(name: &'static str, prec: u32, f: impl FnOnce(u32) -> BigFloat) -> BigFloat {
    if let Some(v) = CONST_CACHE.lock().unwrap().get(&(name, prec)) {
        return v.clone();
    }
    let v = f(prec);
    CONST_CACHE.lock().unwrap().insert((name, prec), v.clone());
    v
}

/// Bernoulli numbers B_0..B_max (cached, exact) via the defining recurrence.
static BERNOULLI: Lazy<Mutex<Vec<Rational>>> = Lazy::new(|| Mutex::new(vec![Rational::one()]));

fn bernoulli(n: usize) -> Rational {
    let mut cache = BERNOULLI.lock().unwrap();
    while cache.len() <= n {
        let m = cache.len();
        // Σ_{k=0..m} C(m+1, k) B_k = 0  =>  B_m = -1/(m+1) Σ_{k<m} C(m+1,k) B_k
        let mut s = Rational::zero();
        for (k, b) in cache.iter().enumerate() {
            s += Rational::from_integer(super::binomial_int((m + 1) as u64, k as u64)) * b;
        }
        let bm = -s / Rational::from_integer(BigInt::from(m as i64 + 1));
        cache.push(bm);
    }
    cache[n].clone()
}

/// ln Γ(z) by Stirling's series; valid once z is large enough for the
/// requested precision (callers shift first).
fn ln_gamma_stirling(z: &BigFloat, work: u32) -> BigFloat {
    let half = BigFloat::from_rational(&super::rat(1, 2), work);
    let ln_z = z.ln();
    let two_pi = BigFloat::pi(work).mul_i64(2);
    let mut acc = z.sub(&half).mul(&ln_z).sub(z).add(&two_pi.ln().mul(&half));
    // Σ B_{2k} / (2k(2k-1) z^{2k-1})
    let z2 = z.mul(z);
    let mut zpow = z.clone(); // z^{2k-1}
    let eps = {
        let mut t = BigFloat::one(work);
        t.e -= work as i64 + 4;
        t
    };
    for k in 1..400usize {
        let b = bernoulli(2 * k);
        let coeff = b / Rational::from_integer(BigInt::from((2 * k * (2 * k - 1)) as i64));
        let term = BigFloat::from_rational(&coeff, work).div(&zpow);
        acc = acc.add(&term);
        if term.abs().cmp_val(&eps) == Ordering::Less {
            return acc;
        }
        zpow = zpow.mul(&z2);
    }
    panic!("Stirling series did not reach target precision; argument too small");
}

impl std::fmt::Display for BigFloat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.m.is_zero() {
            return write!(f, "0");
        }
        let digits = self.m.magnitude().to_string();
        let sign = if self.m.is_negative() { "-" } else { "" };
        let e10 = self.e + digits.len() as i64 - 1;
        let trimmed = digits.trim_end_matches('0');
        let trimmed = if trimmed.is_empty() { "0" } else { trimmed };
        let (head, tail) = trimmed.split_at(1);
        if tail.is_empty() {
            write!(f, "{sign}{head}e{e10}")
        } else {
            write!(f, "{sign}{head}.{tail}e{e10}")
        }
    }
}

impl std::fmt::Debug for BigFloat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "BigFloat({self}, prec={})", self.prec)
    }
}

impl PartialEq for BigFloat {
    fn eq(&self, other: &Self) -> bool {
        self.cmp_val(other) == Ordering::Equal
    }
}

impl PartialOrd for BigFloat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp_val(other))
    }
}
