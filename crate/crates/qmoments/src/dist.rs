//! Distribution-level machinery: the shifted-Gamma model, tail-parameter
//! extraction from high moments, the heuristic full-range fit, Chebyshev
//! CDF bounds, and the Krein integrability diagnostic.

use crate::arith::{binomial_int, factorial_int, int, rat, BigFloat, Rational};
use crate::engine::MomentTable;
use crate::quad;
use num_traits::{One, Signed, Zero};

/// Parameters of a shifted Gamma density
/// `P(x) = θ(x+x0) β^α (x+x0)^(α-1) e^(-β(x+x0)) / Γ(α)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShiftedGammaParams {
    pub x0: Rational,
    pub alpha: Rational,
    pub beta: Rational,
}

impl ShiftedGammaParams {
    pub fn new(x0: Rational, alpha: Rational, beta: Rational) -> crate::Result<Self> {
        if !alpha.is_positive() || !beta.is_positive() || x0.is_negative() {
            return Err(crate::Error::InvalidArgument(
                "shifted Gamma needs alpha > 0, beta > 0, x0 >= 0".into(),
            ));
        }
        Ok(ShiftedGammaParams { x0, alpha, beta })
    }

    /// The empirical parameters reproducing every computed moment of the
    /// Lorentzian-smeared Wick square: `α = 1/72, β = 1/12, x0 = 1/6`.
    pub fn phi2() -> Self {
        ShiftedGammaParams { x0: rat(1, 6), alpha: rat(1, 72), beta: rat(1, 12) }
    }

    /// Gaussian-sampled energy density of a 2D CFT with central charge `c`,
    /// expressed in rate-1 units (the variable is rescaled by the rate, so
    /// all three parameters stay rational: `x0 = α = c/12`, `β = 1`).
    /// Moments in these units are the physical moments times the n-th power
    /// of the rate.
    pub fn cft_2d(c: Rational) -> crate::Result<Self> {
        if !c.is_positive() {
            return Err(crate::Error::InvalidArgument("central charge must be positive".into()));
        }
        Ok(ShiftedGammaParams { x0: &c / int(12), alpha: &c / int(12), beta: int(1) })
    }
}

/// Exact moments of the shifted Gamma density:
/// `a_n = x0^n Σ_{k=0..n} (-1)^(n-k) (β x0)^(-k) C(n,k) Γ(k+α)/Γ(α)`,
/// with the Γ-ratio evaluated by the rising product `Π_{j<k} (α+j)`.
pub fn shifted_gamma_moments(params: &ShiftedGammaParams, n_max: usize) -> Vec<Rational> {
    let bx0 = &params.beta * &params.x0;
    let mut out = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let mut sum = Rational::zero();
        let mut poch = Rational::one(); // Γ(k+α)/Γ(α)
        let mut bx0_pow = Rational::one(); // (β x0)^k
        for k in 0..=n {
            let mut term = Rational::from_integer(binomial_int(n as u64, k as u64)) * &poch
                / bx0_pow.clone();
            if (n - k) % 2 == 1 {
                term = -term;
            }
            sum += term;
            poch *= &params.alpha + int(k as i64);
            bx0_pow *= &bx0;
        }
        let mut x0_pow = Rational::one();
        for _ in 0..n {
            x0_pow *= &params.x0;
        }
        out.push(x0_pow * sum);
    }
    out
}

/// Density value at `x`; zero for `x <= -x0` (the boundary point carries an
/// integrable singularity when `α < 1` and is mapped to zero).
pub fn shifted_gamma_pdf(params: &ShiftedGammaParams, x: &BigFloat) -> BigFloat {
    let prec = x.precision();
    let t = x.add(&BigFloat::from_rational(&params.x0, prec));
    if t.is_zero() || t.is_negative() {
        return BigFloat::zero(prec);
    }
    let alpha = BigFloat::from_rational(&params.alpha, prec);
    let beta = BigFloat::from_rational(&params.beta, prec);
    let one = BigFloat::one(prec);
    beta.powf(&alpha)
        .mul(&t.powf(&alpha.sub(&one)))
        .mul(&beta.neg().mul(&t).exp())
        .div(&alpha.gamma())
}

/// Tail-ansatz parameters: `P(x) ~ c0 x^b e^(-a x^c)` with `b = -2`,
/// `c = 1/3` fixed by the `(3n-4)!`-class moment growth.
#[derive(Clone, Debug)]
pub struct TailParams {
    pub c0: BigFloat,
    pub a: BigFloat,
    pub b: i64,
    pub c: Rational,
}

/// Extract `(c0, a)` from two successive exact moments.
///
/// The ratio `a_{n+1}/a_n ≈ 3(n-1)(3n-2)(3n-1)/a^3` at `n = n_pair.0` fixes
/// `a`; matching the predicted moment at `n = n_pair.1` then fixes `c0`.
pub fn tail_fit(
    table: &MomentTable,
    n_pair: (usize, usize),
    digits: u32,
) -> crate::Result<TailParams> {
    let (n_a, n_c) = n_pair;
    let need = n_c.max(n_a + 1);
    if table.n_max() < need {
        return Err(crate::Error::InsufficientDepth { need, have: table.n_max() });
    }
    if n_a < 2 || n_c < 2 {
        return Err(crate::Error::InvalidArgument("calibration moments must have n >= 2".into()));
    }
    let prec = digits.max(crate::arith::bigfloat::MIN_PRECISION);
    let n = n_a as i64;
    let ratio = int(3 * (n - 1) * (3 * n - 2) * (3 * n - 1)) * table.a(n_a) / table.a(n_a + 1);
    let a = BigFloat::from_rational(&ratio, prec + 10)
        .powf(&BigFloat::from_rational(&rat(1, 3), prec + 10));
    // c0 = c a_n a^(3(n-1)) / Γ(3(n-1)) at n = n_c, with c = 1/3
    let m = 3 * (n_c as i64 - 1);
    let c0 = BigFloat::from_rational(table.a(n_c), prec + 10)
        .mul(&a.powi(m))
        .div(&BigFloat::from_bigint(factorial_int((m - 1) as u64) * 3, prec + 10));
    Ok(TailParams { c0: c0.with_prec(prec), a: a.with_prec(prec), b: -2, c: rat(1, 3) })
}

/// Moment of the pure tail ansatz:
/// `a_n = (c0/c) a^(-(n+b+1)/c) Γ((n+b+1)/c)`.
pub fn tail_predicted_moment(tail: &TailParams, n: usize) -> BigFloat {
    assert!(n >= 2, "tail moments start at n = 2");
    let prec = tail.a.precision();
    let z = (int(n as i64) + int(tail.b) + int(1)) / &tail.c;
    let z_bf = BigFloat::from_rational(&z, prec);
    let c_bf = BigFloat::from_rational(&tail.c, prec);
    tail.c0.div(&c_bf).mul(&tail.a.powf(&z_bf.neg())).mul(&z_bf.gamma())
}

/// `x` range over which moments `n_lo..n_hi` dominate the tail ansatz:
/// the integrand `x^n P_tail(x)` peaks at `x_max = (3(n-2)/a)^3`.
pub fn tail_validity_range(tail: &TailParams, n_lo: usize, n_hi: usize) -> (BigFloat, BigFloat) {
    assert!(n_lo >= 3, "validity estimate needs n >= 3");
    let prec = tail.a.precision();
    let peak = |n: usize| BigFloat::from_i64(3 * (n as i64 - 2), prec).div(&tail.a).powi(3);
    (peak(n_lo), peak(n_hi))
}

/// Constants of the heuristic full-range model
/// `P(x) = c1 (x0+x)^(-α) e^(-β (x0+x)^γ) + c0 (α0 + (x0+x)^2)^(-1) e^(-a (x0+x)^(1/3))`.
#[derive(Clone, Debug)]
pub struct FitParams {
    pub c1: BigFloat,
    pub alpha: BigFloat,
    pub beta: BigFloat,
    pub gamma: BigFloat,
    pub alpha0: BigFloat,
    pub x0: BigFloat,
    pub c0: BigFloat,
    pub a: BigFloat,
}

impl FitParams {
    /// Reference constants for the electromagnetic energy density. The
    /// tail pair `(c0, a)` comes from `tail_fit`, `x0` from the estimated
    /// quantum-inequality bound, and `α0, β, γ` were tuned by hand; the
    /// spike amplitude `c1` and exponent `α` are calibrated so that the
    /// model's zeroth and first moments match the exact table.
    pub fn rho_em_reference(prec: u32) -> Self {
        let bf = |s: &str| BigFloat::parse(s, prec).expect("literal");
        FitParams {
            c1: bf("0.0306266618"),
            alpha: bf("0.9720879966"),
            beta: bf("19.65"),
            gamma: bf("1.05"),
            alpha0: bf("610"),
            x0: bf("0.0472"),
            c0: bf("0.95539211"),
            a: bf("0.9630614156"),
        }
    }
}

/// Density value of the full-range model at `x` (f64 path, used for plot
/// grids and the Krein diagnostic).
pub fn fit_pdf_value(fit: &FitParams, x: f64) -> f64 {
    let x0 = fit.x0.to_f64();
    let t = x0 + x;
    if t <= 0.0 {
        return 0.0;
    }
    let spike = fit.c1.to_f64()
        * t.powf(-fit.alpha.to_f64())
        * (-fit.beta.to_f64() * t.powf(fit.gamma.to_f64())).exp();
    let tail = fit.c0.to_f64() / (fit.alpha0.to_f64() + t * t)
        * (-fit.a.to_f64() * t.powf(1.0 / 3.0)).exp();
    spike + tail
}

/// Moments `0..=n_max` of the full-range model.
///
/// The spike term is integrated analytically (`t = x0 + x`, binomial
/// expansion, `Γ((k-α+1)/γ) / (γ β^((k-α+1)/γ))` per power); the tail term
/// by adaptive quadrature at relative tolerance `tol` after the heavy-tail
/// substitution `t = s^3`, carrying the peak magnitude in log space so no
/// intermediate overflows.
pub fn model_fit_moments(fit: &FitParams, n_max: usize, tol: f64) -> crate::Result<Vec<BigFloat>> {
    if tol <= 0.0 {
        return Err(crate::Error::InvalidArgument("tolerance must be positive".into()));
    }
    let prec = 30u32.max(fit.a.precision());

    // analytic spike integrals I1(k) = Γ(z_k) / (γ β^z_k), z_k = (k-α+1)/γ
    let spike_int = |k: usize| -> BigFloat {
        let z = BigFloat::from_i64(k as i64 + 1, prec).sub(&fit.alpha).div(&fit.gamma);
        z.gamma().div(&fit.gamma.mul(&fit.beta.powf(&z)))
    };

    // quadrature tail integrals I2(k) = ∫ t^k/(α0+t^2) e^(-a t^(1/3)) dt
    let a_f = fit.a.to_f64();
    let alpha0_f = fit.alpha0.to_f64();
    let tail_int = |k: usize| -> crate::Result<BigFloat> {
        let m = (3 * k + 2) as f64;
        let s_star = m / a_f;
        let log_peak = if k == 0 { 0.0 } else { m * s_star.ln() - a_f * s_star };
        let g = move |s: f64| -> f64 {
            if s <= 0.0 {
                return 0.0;
            }
            3.0 * (m * s.ln() - a_f * s - log_peak).exp() / (alpha0_f + s.powi(6))
        };
        let split = 1.0f64.min(3.0 * s_star);
        let s_hi = 3.0 * s_star + 400.0 / a_f;
        let coarse = quad::integrate(&g, 0.0, split, 1e-6, 1e-280).value
            + quad::integrate(&g, split, s_hi, 1e-6, 1e-280).value;
        let abs_tol = (coarse.abs() * tol).max(1e-280);
        let r1 = quad::integrate(&g, 0.0, split, tol, abs_tol);
        let r2 = quad::integrate(&g, split, s_hi, tol, abs_tol);
        if !r1.converged || !r2.converged {
            return Err(crate::Error::NonConvergence(format!(
                "tail moment quadrature at k={k} (err {:.2e})",
                r1.error + r2.error
            )));
        }
        let scale = BigFloat::from_f64(log_peak, prec).exp();
        Ok(BigFloat::from_f64(r1.value + r2.value, prec).mul(&scale))
    };

    let mut spike_cache = Vec::with_capacity(n_max + 1);
    let mut tail_cache = Vec::with_capacity(n_max + 1);
    for k in 0..=n_max {
        spike_cache.push(fit.c1.mul(&spike_int(k)));
        tail_cache.push(fit.c0.mul(&tail_int(k)?));
    }

    let mut out = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let mut acc = BigFloat::zero(prec);
        for k in 0..=n {
            let coeff = BigFloat::from_bigint(binomial_int(n as u64, k as u64), prec)
                .mul(&fit.x0.neg().powi((n - k) as i64));
            acc = acc.add(&coeff.mul(&spike_cache[k].add(&tail_cache[k])));
        }
        out.push(acc);
    }
    Ok(out)
}

/// Chebyshev-variant upper bound on the tail probability:
/// `Prob(X >= λ) <= min_n (a_n + 1)/λ^n`, clamped to 1. The `+1` absorbs
/// the negative-support contribution, using `x0 < 1` for these operators.
pub fn cdf_upper_bound(table: &MomentTable, lambda: &BigFloat) -> BigFloat {
    assert!(!lambda.is_zero() && !lambda.is_negative(), "λ must be positive");
    let prec = lambda.precision();
    let one = BigFloat::one(prec);
    let mut best = one.clone(); // the n = 0 term is 2, so start at the clamp
    let mut lam_pow = one.clone();
    for n in 0..=table.n_max() {
        if n > 0 {
            lam_pow = lam_pow.mul(lambda);
        }
        let term = BigFloat::from_rational(table.a(n), prec).add(&one).div(&lam_pow);
        best = best.min_val(&term);
    }
    best
}

/// Asymptotic form of the same bound for `λ >> D`:
/// `√(2π) C (D/λ)^(7/6) e^(-(λ/D)^(1/3))` with `D = a^-3`, `C = 3 c0 / D`.
pub fn cdf_asymptotic_bound(tail: &TailParams, lambda: &BigFloat) -> BigFloat {
    let prec = tail.a.precision().max(lambda.precision());
    let d = tail.a.powi(-3);
    let c = tail.c0.mul_i64(3).div(&d);
    let ratio = d.div(lambda);
    let two_pi = BigFloat::pi(prec).mul_i64(2);
    let seven_sixths = BigFloat::from_rational(&rat(7, 6), prec);
    let third = BigFloat::from_rational(&rat(1, 3), prec);
    two_pi
        .sqrt()
        .mul(&c)
        .mul(&ratio.powf(&seven_sixths))
        .mul(&ratio.recip().powf(&third).neg().exp())
}

/// Outcome of the Krein integrability diagnostic.
#[derive(Clone, Debug)]
pub enum KreinOutcome {
    /// The integral converged; heavy tails (decay slower than stretched
    /// exponentials of power 1/2) land here.
    Finite(BigFloat),
    /// Partial integrals failed the Cauchy criterion, or the density
    /// vanishes on a set of positive measure.
    Divergent,
}

/// Evaluate `∫ log(p(x)) / (√(x+x0) (1+x)) dx` over `(-x0, ∞)`.
///
/// The endpoint is handled by `x = -x0 + u^2` and the far tail by
/// `x = σ^6 - x0`; convergence is judged by a Cauchy criterion on a
/// geometric ladder of upper limits. No determinacy verdict is attached:
/// the number (or flag) is a diagnostic input to Krein-type criteria.
pub fn krein_integral<F: Fn(f64) -> f64>(
    pdf: F,
    x0: f64,
    tol: f64,
) -> crate::Result<KreinOutcome> {
    use std::cell::Cell;
    let negative = Cell::new(false);
    let log_p = |x: f64| -> f64 {
        let p = pdf(x);
        if p < 0.0 {
            negative.set(true);
            return f64::NAN;
        }
        p.ln() // -inf for p == 0 flows through and poisons the panel
    };

    // near part: x = -x0 + u^2, u in (0, 1]
    let near = quad::integrate(
        &|u: f64| {
            let x = -x0 + u * u;
            2.0 * log_p(x) / (1.0 + x)
        },
        0.0,
        1.0,
        tol,
        1e-12,
    );
    if negative.get() {
        return Err(crate::Error::InvalidArgument("pdf negative at a sample point".into()));
    }
    if !near.value.is_finite() {
        return Ok(KreinOutcome::Divergent);
    }

    // far part: x = σ^6 - x0, σ >= 1 (so t = x + x0 >= 1)
    let far_integrand = |s: f64| -> f64 {
        let x = s.powi(6) - x0;
        6.0 * s * s * log_p(x) / (1.0 + x)
    };
    // densities with stretched-exponential tails underflow f64 at some
    // finite x; the ladder stops there and the verdict comes from the
    // geometric trend of the window increments (a Cauchy criterion with
    // extrapolated remainder)
    let underflowed = |s: f64| pdf(s.powi(6) - x0) == 0.0;
    let mut total = near.value;
    let mut upper = 1.0f64;
    let mut increments: Vec<f64> = Vec::new();
    let mut growth_events = 0u32;
    for _ in 0..64 {
        let mut next = upper * 2.0;
        let mut capped = false;
        if underflowed(next) {
            // bisect for the representability edge
            let (mut lo, mut hi) = (upper, next);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if underflowed(mid) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            next = lo;
            capped = true;
            if next <= upper * (1.0 + 1e-12) {
                break;
            }
        }
        let inc = quad::integrate(&far_integrand, upper, next, tol, 1e-12);
        if negative.get() {
            return Err(crate::Error::InvalidArgument("pdf negative at a sample point".into()));
        }
        if !inc.value.is_finite() {
            return Ok(KreinOutcome::Divergent); // true zero inside the window
        }
        total += inc.value;
        increments.push(inc.value);
        let k = increments.len();
        if k >= 2 {
            let prev = increments[k - 2].abs();
            let cur = increments[k - 1].abs();
            if cur > prev * 1.02 {
                growth_events += 1;
                if growth_events >= 2 {
                    return Ok(KreinOutcome::Divergent);
                }
            } else {
                growth_events = 0;
            }
            // geometric remainder estimate once the trend is established
            if k >= 3 {
                let r1 = increments[k - 1].abs() / increments[k - 2].abs().max(1e-300);
                let r2 = increments[k - 2].abs() / increments[k - 3].abs().max(1e-300);
                let r = r1.max(r2);
                if r < 0.85 {
                    let remainder = increments[k - 1] * r / (1.0 - r);
                    if remainder.abs() < tol.max(1e-14) * total.abs().max(1.0) || capped {
                        return Ok(KreinOutcome::Finite(BigFloat::from_f64(total + remainder, 20)));
                    }
                }
            }
        }
        if capped {
            // trend not established before the representability edge
            return Ok(KreinOutcome::Divergent);
        }
        upper = next;
    }
    Ok(KreinOutcome::Divergent)
}
