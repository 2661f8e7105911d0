//! Assembly of exact moment tables for the built-in quadratic operators,
//! plus growth diagnostics and the asymptotic run-factor brackets.
//!
//! Every operator here is a weighted sum of independent species, each with
//! the two-point structure of the base operator (`p = 1` or `p = 3`), so its
//! connected moments are a species-rescaled copy of the base connected
//! moments: `C_n(A) = Σ_I mult_I · w_I^n · C_n(base)`. Full moments follow
//! by formal exponentiation.

use crate::arith::series::{series_exp, series_log, FormalSeries};
use crate::arith::{factorial_int, int, rat, BigFloat, Rational};
use crate::kintegrals::KTable;
use crate::runpoly;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

/// The operators tabulated by the artifact.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BuiltinOperator {
    /// Wick square of the massless field, `p = 1`.
    Phi2,
    /// Wick square of its time derivative, `p = 3`.
    PhiDot2,
    /// Squared electric field strength.
    E2,
    /// Squared magnetic field strength (same moments as `E2`).
    B2,
    /// Scalar-field energy density.
    RhoS,
    /// Electromagnetic energy density.
    RhoEM,
}

impl BuiltinOperator {
    pub const ALL: [BuiltinOperator; 6] = [
        BuiltinOperator::Phi2,
        BuiltinOperator::PhiDot2,
        BuiltinOperator::E2,
        BuiltinOperator::B2,
        BuiltinOperator::RhoS,
        BuiltinOperator::RhoEM,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            BuiltinOperator::Phi2 => "phi2",
            BuiltinOperator::PhiDot2 => "phidot2",
            BuiltinOperator::E2 => "E2",
            BuiltinOperator::B2 => "B2",
            BuiltinOperator::RhoS => "rhoS",
            BuiltinOperator::RhoEM => "rhoEM",
        }
    }

    pub fn parse(s: &str) -> crate::Result<Self> {
        match s {
            "phi2" => Ok(BuiltinOperator::Phi2),
            "phidot2" => Ok(BuiltinOperator::PhiDot2),
            "E2" | "e2" => Ok(BuiltinOperator::E2),
            "B2" | "b2" => Ok(BuiltinOperator::B2),
            "rhoS" | "rhos" => Ok(BuiltinOperator::RhoS),
            "rhoEM" | "rhoem" => Ok(BuiltinOperator::RhoEM),
            _ => Err(crate::Error::InvalidArgument(format!(
                "unknown operator {s:?}; expected one of phi2, phidot2, E2, B2, rhoS, rhoEM"
            ))),
        }
    }
}

/// Weighted-species description of a smeared quadratic operator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperatorSpec {
    name: String,
    p: u32,
    /// `(weight, multiplicity)` per species; the weight is `α_I c_I`.
    weights: Vec<(Rational, u32)>,
}

impl OperatorSpec {
    pub fn builtin(op: BuiltinOperator) -> Self {
        let (p, weights) = match op {
            BuiltinOperator::Phi2 => (1, vec![(int(1), 1)]),
            BuiltinOperator::PhiDot2 => (3, vec![(int(1), 1)]),
            BuiltinOperator::E2 | BuiltinOperator::B2 => (3, vec![(rat(2, 3), 3)]),
            BuiltinOperator::RhoS => (3, vec![(rat(1, 2), 1), (rat(1, 6), 3)]),
            BuiltinOperator::RhoEM => (3, vec![(rat(1, 3), 6)]),
        };
        OperatorSpec { name: op.name().to_string(), p, weights }
    }

    /// User-supplied operator. Signed weights are accepted, but no analysis
    /// claims are made for them (operators unbounded below have no
    /// lower-bound story).
    pub fn custom(name: &str, p: u32, weights: Vec<(Rational, u32)>) -> crate::Result<Self> {
        if p < 1 || p % 2 == 0 {
            return Err(crate::Error::InvalidDerivativeOrder(p as i64));
        }
        if weights.is_empty() {
            return Err(crate::Error::InvalidArgument("weights must be nonempty".into()));
        }
        Ok(OperatorSpec { name: name.to_string(), p, weights })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn weights(&self) -> &[(Rational, u32)] {
        &self.weights
    }
}

/// Build metadata carried by every table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub p: u32,
    pub n_max: usize,
    pub code_version: String,
}

/// Exact connected and full moment sequences for one operator.
///
/// Conventions: `connected[0] = 1`, `connected[1] = 0` (normal ordering
/// gives a zero mean), `full[0] = 1`, `full[1] = 0`. Entries are the
/// dimensionless moments; the dimensionful scale `(4π τ^((p+1)/2))^(2n)`
/// lives only in the provenance notes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MomentTable {
    spec: OperatorSpec,
    n_max: usize,
    connected: Vec<Rational>,
    full: Vec<Rational>,
    provenance: Provenance,
}

impl MomentTable {
    pub fn spec(&self) -> &OperatorSpec {
        &self.spec
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn connected(&self) -> &[Rational] {
        &self.connected
    }

    pub fn full(&self) -> &[Rational] {
        &self.full
    }

    pub fn a(&self, n: usize) -> &Rational {
        &self.full[n]
    }

    pub fn c(&self, n: usize) -> &Rational {
        &self.connected[n]
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub(crate) fn from_parts(
        spec: OperatorSpec,
        connected: Vec<Rational>,
        full: Vec<Rational>,
    ) -> Self {
        let n_max = connected.len() - 1;
        let p = spec.p();
        MomentTable {
            spec,
            n_max,
            connected,
            full,
            provenance: Provenance { p, n_max, code_version: code_version() },
        }
    }
}

pub fn code_version() -> String {
    env!("CARGO_PKG_VERSION").to_string()
}

/// Species rescaling of connected moments:
/// `C_n(A) = Σ_I mult_I · w_I^n · C_n(base)`, exact. Index 0 and 1 keep the
/// `C_0 = 1`, `C_1 = 0` conventions.
pub fn species_connected_moments(
    base: &[Rational],
    weights: &[(Rational, u32)],
) -> Vec<Rational> {
    let mut out = Vec::with_capacity(base.len());
    for (n, c) in base.iter().enumerate() {
        if n == 0 {
            out.push(Rational::one());
        } else if n == 1 {
            out.push(Rational::zero());
        } else {
            let mut factor = Rational::zero();
            for (w, mult) in weights {
                let mut wp = Rational::one();
                for _ in 0..n {
                    wp *= w;
                }
                factor += wp * int(*mult as i64);
            }
            out.push(factor * c);
        }
    }
    out
}

fn full_from_connected(connected: &[Rational]) -> crate::Result<Vec<Rational>> {
    let mut w = connected.to_vec();
    w[0] = Rational::zero(); // C_0 = 1 is a table convention, not a series term
    let m = series_exp(&FormalSeries::new(w))?;
    Ok(m.coeffs().to_vec())
}

/// Build the exact moment table for one operator.
pub fn build_moment_table(spec: &OperatorSpec, n_max: usize) -> crate::Result<MomentTable> {
    Ok(build_moment_tables(std::slice::from_ref(spec), n_max)?.pop().expect("one table"))
}

/// Build tables for several operators at once, sharing the expensive
/// polynomial sweep across every operator of the same base class.
pub fn build_moment_tables(
    specs: &[OperatorSpec],
    n_max: usize,
) -> crate::Result<Vec<MomentTable>> {
    if n_max < 2 {
        return Err(crate::Error::InvalidArgument("n_max must be >= 2".into()));
    }
    let mut base_ps: Vec<u32> = specs.iter().map(|s| s.p()).collect();
    base_ps.sort_unstable();
    base_ps.dedup();
    let tables: Vec<KTable> = base_ps
        .iter()
        .map(|&p| KTable::build(p, (n_max as u32).max(2)))
        .collect::<crate::Result<_>>()?;
    let refs: Vec<&KTable> = tables.iter().collect();
    let base_moments = runpoly::base_connected_moments_multi(&refs, n_max as u32)?;
    build_tables_from_base(specs, &base_ps, &base_moments)
}

/// Assemble tables when the base connected moments are already known
/// (e.g. served from cache). `base_ps[i]` labels `base_moments[i]`.
pub fn build_tables_from_base(
    specs: &[OperatorSpec],
    base_ps: &[u32],
    base_moments: &[Vec<Rational>],
) -> crate::Result<Vec<MomentTable>> {
    specs
        .iter()
        .map(|spec| {
            let idx = base_ps
                .iter()
                .position(|&p| p == spec.p())
                .ok_or_else(|| crate::Error::InvalidArgument("missing base moments".into()))?;
            let connected = species_connected_moments(&base_moments[idx], spec.weights());
            let full = full_from_connected(&connected)?;
            Ok(MomentTable::from_parts(spec.clone(), connected, full))
        })
        .collect()
}

/// Round-trip check used by tests: recover the connected moments from the
/// full ones through the formal logarithm.
pub fn connected_from_full(full: &[Rational]) -> crate::Result<Vec<Rational>> {
    let w = series_log(&FormalSeries::new(full.to_vec()))?;
    let mut c = w.coeffs().to_vec();
    c[0] = Rational::one();
    Ok(c)
}

/// Moment-growth diagnostics. These are sufficient-condition checks only
/// and deliberately report margins, never a determinate/indeterminate
/// verdict.
#[derive(Clone, Debug)]
pub struct GrowthDiagnostics {
    /// Residuals of `ln a_n - ln n!` against the best-fit `ln C + n ln D`.
    pub hamburger_margin: Vec<BigFloat>,
    /// Same against `(2n)!`.
    pub stieltjes_margin: Vec<BigFloat>,
    /// Least-squares coefficient of `n ln n` in `ln a_n` over the top third
    /// of available `n`: ~1 for `n!`-class growth, ~3 for `(3n)!`-class.
    pub factorial_order_estimate: BigFloat,
}

pub fn growth_diagnostics(table: &MomentTable, digits: u32) -> crate::Result<GrowthDiagnostics> {
    let n_max = table.n_max();
    if n_max < 10 {
        return Err(crate::Error::InsufficientDepth { need: 10, have: n_max });
    }
    let prec = digits.max(30);
    let ns: Vec<usize> = (2..=n_max).collect();
    let ln_a: Vec<BigFloat> = ns.iter().map(|&n| ln_rational(table.a(n), prec)).collect();

    let margins = |fact_scale: u64| -> Vec<BigFloat> {
        // values v_n = ln a_n - ln (scale*n)! ; residuals of linear fit in n
        let vals: Vec<BigFloat> = ns
            .iter()
            .zip(&ln_a)
            .map(|(&n, la)| {
                let f = factorial_int(fact_scale * n as u64);
                la.sub(&ln_bigint(&f, prec))
            })
            .collect();
        let (c0, c1) = linear_fit(&ns, &vals, prec);
        ns.iter()
            .zip(&vals)
            .map(|(&n, v)| v.sub(&c0).sub(&c1.mul_i64(n as i64)))
            .collect()
    };

    let hamburger = margins(1);
    let stieltjes = margins(2);

    // top-third fit of ln a_n over {n ln n, n, 1}
    let start = ns.len() - ns.len() / 3;
    let top_ns = &ns[start..];
    let top_vals = &ln_a[start..];
    let estimate = fit_nlogn_coefficient(top_ns, top_vals, prec);

    Ok(GrowthDiagnostics {
        hamburger_margin: hamburger,
        stieltjes_margin: stieltjes,
        factorial_order_estimate: estimate,
    })
}

pub(crate) fn ln_rational(r: &Rational, prec: u32) -> BigFloat {
    assert!(r.is_positive(), "ln of non-positive rational");
    BigFloat::from_rational(r, prec + 5).ln().with_prec(prec)
}

fn ln_bigint(v: &BigInt, prec: u32) -> BigFloat {
    if v.is_one() {
        return BigFloat::zero(prec);
    }
    BigFloat::from_bigint(v.clone(), prec + 5).ln().with_prec(prec)
}

/// Ordinary least squares for `v ~ c0 + c1 n`.
fn linear_fit(ns: &[usize], vals: &[BigFloat], prec: u32) -> (BigFloat, BigFloat) {
    let m = ns.len() as i64;
    let zero = BigFloat::zero(prec);
    let sx = ns.iter().fold(zero.clone(), |a, &n| a.add(&BigFloat::from_i64(n as i64, prec)));
    let sxx = ns.iter().fold(zero.clone(), |a, &n| {
        a.add(&BigFloat::from_i64((n * n) as i64, prec))
    });
    let sy = vals.iter().fold(zero.clone(), |a, v| a.add(v));
    let sxy = ns
        .iter()
        .zip(vals)
        .fold(zero, |a, (&n, v)| a.add(&v.mul_i64(n as i64)));
    let m_bf = BigFloat::from_i64(m, prec);
    let det = m_bf.mul(&sxx).sub(&sx.mul(&sx));
    let c1 = m_bf.mul(&sxy).sub(&sx.mul(&sy)).div(&det);
    let c0 = sy.sub(&c1.mul(&sx)).div(&m_bf);
    (c0, c1)
}

/// Least squares of `v ~ q (n ln n) + c1 n + c0`; returns `q`.
fn fit_nlogn_coefficient(ns: &[usize], vals: &[BigFloat], prec: u32) -> BigFloat {
    let cols: Vec<Vec<BigFloat>> = ns
        .iter()
        .map(|&n| {
            let nf = BigFloat::from_i64(n as i64, prec);
            vec![nf.mul(&nf.ln()), nf, BigFloat::one(prec)]
        })
        .collect();
    let sol = crate::analysis::normal_equations(&cols, vals, prec).expect("3x3 fit");
    sol.into_iter().next().expect("coefficient of n ln n")
}

/// Exact lower-bound constant `L_n^(r)` for the run factors.
pub fn l_bound(p: u32, n: u32, r: u32) -> Rational {
    let np1 = (p + 1) as u64;
    let mut v = Rational::new(
        factorial_int(n as u64 * np1),
        factorial_int(n as u64) * (BigInt::from(2u32).pow(p + 1) * BigInt::from(np1)).pow(n),
    );
    for k in 1..n {
        v *= rat((r + n * (p + 1)) as i64, (r + k * (p + 1)) as i64);
    }
    v
}

/// Exact upper-bound constant `U_n^(r)`.
pub fn u_bound(p: u32, n: u32, r: u32) -> Rational {
    let np1 = (p + 1) as u64;
    let mut v = Rational::new(
        factorial_int(n as u64 * np1),
        factorial_int(n as u64) * (BigInt::from(2u32).pow(p + 1) * BigInt::from(np1)).pow(n),
    );
    if n >= 2 {
        for k in 0..=(n - 2) {
            for q in 1..=p {
                v *= rat((k * (p + 1) + r + q) as i64, (k * p + r + n + q - 1) as i64);
            }
        }
    }
    v
}

/// Bracket on `K_n^(r)`:
/// `C(n(p+1)-1+r, n(p+1)-1) L_n^(r) <= K_n^(r) <= C(n(p+2)-2+r, n(p+1)-1) U_n^(r)`.
pub fn k_bracket(p: u32, n: u32, r: u32) -> (Rational, Rational) {
    let lo = crate::arith::binomial((n * (p + 1) - 1 + r) as u64, (n * (p + 1) - 1) as u64)
        * l_bound(p, n, r);
    let hi = crate::arith::binomial((n * (p + 2) - 2 + r) as u64, (n * (p + 1) - 1) as u64)
        * u_bound(p, n, r);
    (lo, hi)
}

/// Dominant-graph value and its asymptotic bracket at level `n`.
#[derive(Clone, Debug)]
pub struct DominantBounds {
    /// `J_n = K_1^(0) K_{n-1}^(0)`, exactly.
    pub j_n: Rational,
    /// Rigorous lower bound `(p!/2^(p+1)) L_{n-1}^(0)` on `J_n`.
    pub lower: BigFloat,
    /// Upper bound `(p+1)!(p+1)^3 / (2^(p+1)(p+1)^2)^n · ((n-1)(p+2)-2)!/((n-2)!)^2`.
    pub upper: BigFloat,
    /// `α = e ((p+1)/(p+2))^(p+7/2)`: prefactor of the upper/lower ratio growth.
    pub alpha_growth: BigFloat,
    /// `β = (1/e) ((p+2)/(p+1))^(p+2)`: base of the upper/lower ratio growth.
    pub beta_growth: BigFloat,
}

/// Asymptotic control of the dominant run-factor product `J_n`.
pub fn appendix_b_bounds(
    p: u32,
    n: u32,
    kt: &KTable,
    digits: u32,
) -> crate::Result<DominantBounds> {
    if n < 3 {
        return Err(crate::Error::InvalidArgument("bounds need n >= 3".into()));
    }
    if kt.max_n() < n - 1 {
        return Err(crate::Error::InsufficientDepth {
            need: (n - 1) as usize,
            have: kt.max_n() as usize,
        });
    }
    let prec = digits.max(30);
    let j_n = kt.k(1) * kt.k(n - 1);
    let scale = Rational::new(factorial_int(p as u64), BigInt::from(2u32).pow(p + 1));
    let lower_exact = scale * l_bound(p, n - 1, 0);
    let upper_exact = {
        let num = factorial_int((p + 1) as u64)
            * BigInt::from((p + 1) as u64).pow(3)
            * factorial_int(((n - 1) * (p + 2) - 2) as u64);
        let den = (BigInt::from(2u32).pow(p + 1) * BigInt::from((p + 1) as u64).pow(2)).pow(n)
            * factorial_int((n - 2) as u64).pow(2);
        Rational::new(num, den)
    };
    let pf = |x: Rational| BigFloat::from_rational(&x, prec);
    let e = BigFloat::one(prec).exp();
    let ratio = BigFloat::from_rational(&rat((p + 1) as i64, (p + 2) as i64), prec);
    let alpha_growth =
        e.mul(&ratio.powf(&BigFloat::from_rational(&rat(2 * p as i64 + 7, 2), prec)));
    let beta_growth = ratio.recip().powi((p + 2) as i64).div(&e);
    Ok(DominantBounds {
        j_n,
        lower: pf(lower_exact),
        upper: pf(upper_exact),
        alpha_growth,
        beta_growth,
    })
}
