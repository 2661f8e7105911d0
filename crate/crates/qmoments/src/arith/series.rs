//! Truncated formal power series in the exponential convention: index `n`
//! holds the coefficient of `λ^n/n!`, i.e. the series is read directly as a
//! moment (or cumulant) sequence.

use super::{binomial_int, Rational};
use num_traits::{One, Zero};

/// A formal power series truncated at a fixed order. `coeffs[n]` is the
/// coefficient of `λ^n/n!`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormalSeries {
    coeffs: Vec<Rational>,
}

impl FormalSeries {
    /// Build from the coefficient list; the truncation order is
    /// `coeffs.len() - 1`.
    pub fn new(coeffs: Vec<Rational>) -> Self {
        assert!(!coeffs.is_empty(), "series needs at least the constant term");
        FormalSeries { coeffs }
    }

    /// The zero series truncated at `order`.
    pub fn zero(order: usize) -> Self {
        FormalSeries { coeffs: vec![Rational::zero(); order + 1] }
    }

    pub fn truncation_order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> &Rational {
        &self.coeffs[n]
    }
}

/// Formal exponential of a series with zero constant term, truncated at the
/// same order. Uses the cumulant-to-moment recursion
/// `a_n = Σ_{k=1..n} C(n-1, k-1) c_k a_{n-k}` with `a_0 = 1`,
/// which needs O(N²) exact operations and no intermediate blowup.
pub fn series_exp(w: &FormalSeries) -> crate::Result<FormalSeries> {
    if !w.coeffs[0].is_zero() {
        return Err(crate::Error::NonzeroConstantTerm);
    }
    let order = w.truncation_order();
    let mut a = Vec::with_capacity(order + 1);
    a.push(Rational::one());
    for n in 1..=order {
        let mut s = Rational::zero();
        for k in 1..=n {
            if w.coeffs[k].is_zero() {
                continue;
            }
            let c = binomial_int((n - 1) as u64, (k - 1) as u64);
            s += Rational::from_integer(c) * &w.coeffs[k] * &a[n - k];
        }
        a.push(s);
    }
    Ok(FormalSeries { coeffs: a })
}

/// Formal logarithm of a series with constant term 1; exact inverse of
/// [`series_exp`] at the same truncation order.
pub fn series_log(m: &FormalSeries) -> crate::Result<FormalSeries> {
    if !m.coeffs[0].is_one() {
        return Err(crate::Error::ConstantTermNotOne);
    }
    let order = m.truncation_order();
    let mut c = Vec::with_capacity(order + 1);
    c.push(Rational::zero());
    for n in 1..=order {
        // invert a_n = Σ_{k=1..n} C(n-1,k-1) c_k a_{n-k} for c_n
        let mut s = m.coeffs[n].clone();
        for k in 1..n {
            let b = binomial_int((n - 1) as u64, (k - 1) as u64);
            s -= Rational::from_integer(b) * &c[k] * &m.coeffs[n - k];
        }
        c.push(s);
    }
    Ok(FormalSeries { coeffs: c })
}
