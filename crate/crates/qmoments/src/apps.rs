//! Physical estimates driven by the positive tail of the energy-density
//! distribution: black-hole nucleation counts and masses, and the
//! Boltzmann-brain exponent.

use crate::arith::{rat, BigFloat};
use crate::dist::TailParams;

/// Unit-conversion constants in natural units (ħ = c = 1), expressed in
/// centimeters. Defaults use the round-number conversions that the
/// nucleation estimates are quoted with; everything is overridable.
#[derive(Clone, Debug)]
pub struct PhysicalConstants {
    /// Planck length, cm (default 1e-33).
    pub planck_length_cm: BigFloat,
    /// Planck mass, g (default 2.2e-5).
    pub planck_mass_g: BigFloat,
    /// Light-seconds in cm (default 3e10).
    pub cm_per_second: BigFloat,
    /// Inverse centimeters per kilogram (default 1e41).
    pub inverse_cm_per_kg: BigFloat,
}

impl PhysicalConstants {
    pub fn rounded(prec: u32) -> Self {
        let bf = |s: &str| BigFloat::parse(s, prec).expect("literal");
        PhysicalConstants {
            planck_length_cm: bf("1e-33"),
            planck_mass_g: bf("2.2e-5"),
            cm_per_second: bf("3e10"),
            inverse_cm_per_kg: bf("1e41"),
        }
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::rounded(40)
    }
}

/// A nucleation question: observation region plus exactly one of
/// `mass_planck` (count is computed) or `expected_count` (mass is solved
/// for). The spacetime 4-volume may be given directly in Planck units,
/// overriding the volume/time fields.
#[derive(Clone, Debug)]
pub struct NucleationQuery {
    pub volume_cm3: BigFloat,
    pub time_s: BigFloat,
    pub four_volume_planck: Option<BigFloat>,
    pub mass_planck: Option<BigFloat>,
    pub expected_count: Option<BigFloat>,
}

impl NucleationQuery {
    fn validate(&self) -> crate::Result<()> {
        match (&self.mass_planck, &self.expected_count) {
            (Some(_), None) | (None, Some(_)) => Ok(()),
            _ => Err(crate::Error::InvalidArgument(
                "exactly one of mass / expected count must be set".into(),
            )),
        }
    }

    /// `V T / ℓ_p^4`.
    pub fn four_volume(&self, constants: &PhysicalConstants) -> BigFloat {
        if let Some(v) = &self.four_volume_planck {
            return v.clone();
        }
        let lp = &constants.planck_length_cm;
        let t_cm = self.time_s.mul(&constants.cm_per_second);
        self.volume_cm3.mul(&t_cm).div(&lp.powi(4))
    }
}

/// Evaluation mode for the per-cell nucleation probability.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProbabilityMode {
    /// `3 c0 a^3 [Γ(-3, u1) - Γ(-3, u2)]` with `u1 = a x^(1/3)`,
    /// `u2 = 2^(1/3) u1` (integral of the tail from `x` to `2x`).
    Exact,
    /// The large-x limit `(3 c0 / a) x^(-4/3) e^(-a x^(1/3))`, where the
    /// lower integration limit dominates.
    Asymptotic,
}

/// Probability that the sampled (dimensionless) energy density lands in
/// `[x, 2x]`, from the tail ansatz.
pub fn nucleation_probability(
    tail: &TailParams,
    x: &BigFloat,
    mode: ProbabilityMode,
) -> crate::Result<BigFloat> {
    if x.is_zero() || x.is_negative() {
        return Err(crate::Error::InvalidArgument("x must be positive".into()));
    }
    let prec = tail.a.precision().max(x.precision());
    let third = BigFloat::from_rational(&rat(1, 3), prec);
    let u1 = tail.a.mul(&x.powf(&third));
    match mode {
        ProbabilityMode::Asymptotic => {
            let four_thirds = BigFloat::from_rational(&rat(4, 3), prec);
            Ok(tail
                .c0
                .mul_i64(3)
                .div(&tail.a)
                .mul(&x.powf(&four_thirds).recip())
                .mul(&u1.neg().exp()))
        }
        ProbabilityMode::Exact => {
            let u2 = BigFloat::from_i64(2, prec).powf(&third).mul(&u1);
            let s = BigFloat::from_i64(-3, prec);
            let g1 = BigFloat::gamma_upper(&s, &u1);
            let g2 = BigFloat::gamma_upper(&s, &u2);
            Ok(tail.c0.mul_i64(3).mul(&tail.a.powi(3)).mul(&g1.sub(&g2)))
        }
    }
}

/// Mean number of nucleated black holes of mass `M` in the query's
/// 4-volume:
/// `n = (3c0/a) (16π²)^(-4/3) (VT/ℓ_p^4) (m_p/M)^(20/3) e^(-a0 (M/m_p)^(2/3))`
/// with `a0 = (16π²)^(1/3) a`.
pub fn black_hole_count(
    query: &NucleationQuery,
    tail: &TailParams,
    constants: &PhysicalConstants,
) -> crate::Result<BigFloat> {
    query.validate()?;
    let mass = query
        .mass_planck
        .as_ref()
        .ok_or_else(|| crate::Error::InvalidArgument("mass must be set for a count query".into()))?;
    if mass.is_zero() || mass.is_negative() {
        return Err(crate::Error::InvalidArgument("mass must be positive".into()));
    }
    Ok(count_for_mass(&query.four_volume(constants), mass, tail))
}

fn count_for_mass(four_volume: &BigFloat, mass_planck: &BigFloat, tail: &TailParams) -> BigFloat {
    let prec = tail.a.precision().max(mass_planck.precision()).max(30);
    let sixteen_pi2 = BigFloat::pi(prec).powi(2).mul_i64(16);
    let a0 = sixteen_pi2
        .powf(&BigFloat::from_rational(&rat(1, 3), prec))
        .mul(&tail.a);
    let prefactor = tail.c0.mul_i64(3).div(&tail.a).mul(
        &sixteen_pi2
            .powf(&BigFloat::from_rational(&rat(4, 3), prec))
            .recip(),
    );
    let mass_power = mass_planck.powf(&BigFloat::from_rational(&rat(20, 3), prec)).recip();
    let expo = a0
        .mul(&mass_planck.powf(&BigFloat::from_rational(&rat(2, 3), prec)))
        .neg()
        .exp();
    prefactor.mul(four_volume).mul(&mass_power).mul(&expo)
}

/// The exponent coefficient `a0 = (16π²)^(1/3) a` of the count formula.
pub fn nucleation_exponent_coefficient(tail: &TailParams) -> BigFloat {
    let prec = tail.a.precision().max(30);
    BigFloat::pi(prec)
        .powi(2)
        .mul_i64(16)
        .powf(&BigFloat::from_rational(&rat(1, 3), prec))
        .mul(&tail.a)
}

/// Solve the count equation for the black-hole mass (in Planck masses)
/// giving the requested expected count, by bisection on the strictly
/// decreasing count function over `[1, 1e6]` Planck masses.
pub fn black_hole_mass_for_count(
    query: &NucleationQuery,
    tail: &TailParams,
    constants: &PhysicalConstants,
) -> crate::Result<BigFloat> {
    query.validate()?;
    let target = query.expected_count.as_ref().ok_or_else(|| {
        crate::Error::InvalidArgument("expected count must be set for a mass query".into())
    })?;
    if target.is_zero() || target.is_negative() {
        return Err(crate::Error::InvalidArgument("expected count must be positive".into()));
    }
    let prec = tail.a.precision().max(30);
    let vt = query.four_volume(constants);
    let mut lo = BigFloat::one(prec);
    let mut hi = BigFloat::parse("1e6", prec).expect("literal");
    let count = |m: &BigFloat| count_for_mass(&vt, m, tail);
    // count decreases in M: need count(lo) >= target >= count(hi)
    if count(&lo).cmp_val(target) == std::cmp::Ordering::Less
        || count(&hi).cmp_val(target) == std::cmp::Ordering::Greater
    {
        return Err(crate::Error::NoRoot { lo: lo.to_string(), hi: hi.to_string() });
    }
    for _ in 0..(prec as usize * 4).max(120) {
        let mid = lo.add(&hi).div(&BigFloat::from_i64(2, prec));
        if count(&mid).cmp_val(target) == std::cmp::Ordering::Less {
            hi = mid;
        } else {
            lo = mid;
        }
        let rel = hi.sub(&lo).div(&hi);
        if rel.to_f64() < 1e-12 {
            break;
        }
    }
    Ok(lo.add(&hi).div(&BigFloat::from_i64(2, prec)))
}

/// Positive exponent `E` in the Boltzmann-brain probability `P ≈ e^(-E)`:
/// `E = τ^(4/3) M^(1/3) / ℓ` in natural (cm) units, prefactor ignored and
/// the tail rate taken as 1.
pub fn boltzmann_brain_exponent(
    mass_kg: &BigFloat,
    size_cm: &BigFloat,
    time_s: &BigFloat,
    constants: &PhysicalConstants,
) -> BigFloat {
    let prec = mass_kg.precision().max(30);
    let tau_cm = time_s.mul(&constants.cm_per_second);
    let m_inv_cm = mass_kg.mul(&constants.inverse_cm_per_kg);
    tau_cm
        .powf(&BigFloat::from_rational(&rat(4, 3), prec))
        .mul(&m_inv_cm.powf(&BigFloat::from_rational(&rat(1, 3), prec)))
        .div(size_cm)
}
