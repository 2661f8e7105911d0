//! Exact run-factor integrals `K_n^(r)`.
//!
//! `K_n^(r)` is the nested momentum integral attached to a run of length `n`
//! with auxiliary power `r`, for the operator class indexed by the odd
//! exponent `p` (`p = 1` for the Wick square of the field, `p = 3` for its
//! time derivative). The closed form at `n = 1` is
//! `K_1^(r) = 2^-(p+1) p! C(p+r, p)`, and deeper levels follow the
//! recurrence `K_n^(r) = (p!/2^(p+1)) C(p+r,p) Σ_{r'=0..p+r+1} K_{n-1}^(r')`.
//! Prefix sums over `r'` are memoized so each entry costs O(1) rational
//! operations beyond its predecessor.
//!
//! A direct multidimensional quadrature of the defining integral backs the
//! recurrence as an independent numerical oracle for small `n`.

use crate::arith::{binomial_int, factorial_int, BigFloat, Rational};
use crate::quad;
use num_bigint::BigInt;
use num_traits::{One, Zero};

/// Table of exact `K_n^(r)` values for one `p`, with prefix sums in `r`.
///
/// Built single-threaded (the recurrence is sequential in `n`), immutable
/// afterwards and safe to share across threads.
#[derive(Clone, Debug)]
pub struct KTable {
    p: u32,
    max_n: u32,
    /// `values[n-1][r]` = `K_n^(r)`; level `n` stores `r <= (max_n - n + 1)(p+1)`.
    values: Vec<Vec<Rational>>,
    /// `prefix[n-1][rr]` = `Σ_{r'=0..rr} K_n^(r')`.
    prefix: Vec<Vec<Rational>>,
}

fn check_p(p: u32) -> crate::Result<()> {
    if p < 1 || p % 2 == 0 {
        return Err(crate::Error::InvalidDerivativeOrder(p as i64));
    }
    Ok(())
}

/// Width of the `r` range stored at level `n` when the table extends to
/// `max_n`: each recurrence step consumes `r` up to `p + 1` more.
fn r_cap(p: u32, max_n: u32, n: u32) -> u32 {
    (max_n - n + 1) * (p + 1)
}

impl KTable {
    /// Build the table for all `n <= max_n` with the `r` ranges needed by
    /// downstream consumers.
    pub fn build(p: u32, max_n: u32) -> crate::Result<KTable> {
        check_p(p)?;
        assert!(max_n >= 1);
        let base_scale = Rational::new(factorial_int(p as u64), BigInt::from(2).pow(p + 1));
        let mut values: Vec<Vec<Rational>> = Vec::with_capacity(max_n as usize);
        let mut prefix: Vec<Vec<Rational>> = Vec::with_capacity(max_n as usize);

        let r1 = r_cap(p, max_n, 1);
        let level1: Vec<Rational> = (0..=r1)
            .map(|r| &base_scale * Rational::from_integer(binomial_int((p + r) as u64, p as u64)))
            .collect();
        prefix.push(prefix_sums(&level1));
        values.push(level1);

        for n in 2..=max_n {
            let cap = r_cap(p, max_n, n);
            let prev_prefix = &prefix[(n - 2) as usize];
            let level: Vec<Rational> = (0..=cap)
                .map(|r| {
                    let need = (p + r + 1) as usize;
                    assert!(need < prev_prefix.len(), "r range underprovisioned");
                    &base_scale
                        * Rational::from_integer(binomial_int((p + r) as u64, p as u64))
                        * &prev_prefix[need]
                })
                .collect();
            prefix.push(prefix_sums(&level));
            values.push(level);
        }
        Ok(KTable { p, max_n, values, prefix })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn max_n(&self) -> u32 {
        self.max_n
    }

    /// `K_n^(r)`; panics when the entry is outside the stored range.
    pub fn value(&self, n: u32, r: u32) -> &Rational {
        &self.values[(n - 1) as usize][r as usize]
    }

    /// `K_n = K_n^(0)`, the run factor itself.
    pub fn k(&self, n: u32) -> &Rational {
        self.value(n, 0)
    }

    /// `Σ_{r'=0..r} K_n^(r')`.
    pub fn prefix_sum(&self, n: u32, r: u32) -> &Rational {
        &self.prefix[(n - 1) as usize][r as usize]
    }

    /// Highest `r` stored at level `n`.
    pub fn r_max(&self, n: u32) -> u32 {
        (self.values[(n - 1) as usize].len() - 1) as u32
    }
}

fn prefix_sums(level: &[Rational]) -> Vec<Rational> {
    let mut acc = Rational::zero();
    level
        .iter()
        .map(|v| {
            acc += v;
            acc.clone()
        })
        .collect()
}

/// Single exact `K_n^(r)` without keeping a table around.
pub fn k_value(p: u32, n: u32, r: u32) -> crate::Result<Rational> {
    check_p(p)?;
    assert!(n >= 1);
    // level j of the chain needs r up to r + (n - j)(p + 1)
    let base_scale = Rational::new(factorial_int(p as u64), BigInt::from(2).pow(p + 1));
    let width = |j: u32| r + (n - j) * (p + 1);
    let mut prev: Vec<Rational> = (0..=width(1))
        .map(|rr| &base_scale * Rational::from_integer(binomial_int((p + rr) as u64, p as u64)))
        .collect();
    for j in 2..=n {
        let pref = prefix_sums(&prev);
        prev = (0..=width(j))
            .map(|rr| {
                &base_scale
                    * Rational::from_integer(binomial_int((p + rr) as u64, p as u64))
                    * &pref[(p + rr + 1) as usize]
            })
            .collect();
    }
    Ok(prev[r as usize].clone())
}

/// Direct quadrature of the defining nested integral over `(R+)^n`,
/// splitting the domain at the kinks `k_{i+1} = k_i` where the integrand
/// loses smoothness. Feasible only for tiny `n`; this is the independent
/// verification path for the recurrence.
///
/// Accuracy is bounded by f64 quadrature, roughly 1e-11 relative; `digits`
/// only sets the precision of the returned value.
pub fn k_numeric_oracle(p: u32, n: u32, r: u32, digits: u32) -> crate::Result<BigFloat> {
    check_p(p)?;
    if n == 0 || n > 3 {
        return Err(crate::Error::InvalidArgument(format!(
            "quadrature oracle supports 1 <= n <= 3, got {n}"
        )));
    }
    let cutoff = 60.0; // e^{-2*60} ~ 1e-52 swamps every polynomial factor here
    let pf = p as f64;
    let rf = r as f64;
    // 2^r / r!
    let norm = (0..r).fold(1.0f64, |acc, i| acc * 2.0 / (i as f64 + 1.0));
    let rel = 1e-13;
    let value = match n {
        1 => {
            let f = |k: f64| k.powf(pf + rf) * (-2.0 * k).exp();
            quad::integrate(&f, 0.0, cutoff, rel, 1e-300).value
        }
        2 => {
            let outer = |k1: f64| {
                let inner = |k2: f64| {
                    k2.powf(pf) * (-(k1 + k2 + (k2 - k1).abs())).exp()
                };
                let lo = quad::integrate(&inner, 0.0, k1, rel, 1e-300).value;
                let hi = quad::integrate(&inner, k1, cutoff, rel, 1e-300).value;
                k1.powf(pf + rf) * (lo + hi)
            };
            quad::integrate(&outer, 0.0, cutoff, rel, 1e-300).value
        }
        3 => {
            let outer = |k1: f64| {
                let mid = |k2: f64| {
                    let inner = |k3: f64| {
                        k3.powf(pf) * (-((k2 - k1).abs() + (k3 - k2).abs() + k3)).exp()
                    };
                    let lo = quad::integrate(&inner, 0.0, k2, rel * 10.0, 1e-300).value;
                    let hi = quad::integrate(&inner, k2, cutoff, rel * 10.0, 1e-300).value;
                    k2.powf(pf) * (lo + hi)
                };
                let lo = quad::integrate(&mid, 0.0, k1, rel * 3.0, 1e-300).value;
                let hi = quad::integrate(&mid, k1, cutoff, rel * 3.0, 1e-300).value;
                k1.powf(pf + rf) * (-k1).exp() * (lo + hi)
            };
            quad::integrate(&outer, 0.0, cutoff, rel, 1e-300).value
        }
        _ => unreachable!(),
    };
    Ok(BigFloat::from_f64(norm * value, digits))
}
