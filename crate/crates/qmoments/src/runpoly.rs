//! Run-structure polynomials.
//!
//! The connected moment `C_n` factorizes over the runs of the permutations
//! that index connected contraction graphs: `C_n = 8^n 𝒦_n(K_1, …, K_{n-1})`,
//! where `𝒦_n` is a polynomial whose monomials are indexed by the partitions
//! of `n` with an even number of parts (the run-length multisets) and whose
//! coefficients count the permutations with that run structure.
//!
//! `𝒦_2 = K_1^2 / 2`, and each level follows from the previous one by the
//! rewriting operators
//!
//! ```text
//! 𝒦_n = Σ_i K_{i+1} ∂𝒦_{n-1}/∂K_i  +  Σ_{i,j} K_1 K_i K_j ∂𝒦_{n-1}/∂K_{i+j}
//! ```
//!
//! applied as sparse partition edits: the first operator grows one part by
//! one; the second splits a part `s` into `{1, i, s-i}` for every ordered
//! pair `i + j = s`. A brute-force census of the permutations themselves
//! (feasible through `n = 10`) provides the independent check.

use crate::arith::{factorial_int, Partition, Rational};
use crate::kintegrals::KTable;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use std::collections::{BTreeMap, HashMap};

/// `𝒦_n`: sparse polynomial in `K_1..K_{n-1}` with partition-indexed terms.
///
/// Every monomial's partition has weight exactly `n` and an even number of
/// parts. Coefficients are positive integers for `n >= 3`; for `n = 2` the
/// single coefficient is 1/2.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunPolynomial {
    n: u32,
    terms: BTreeMap<Partition, Rational>,
}

impl RunPolynomial {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn terms(&self) -> &BTreeMap<Partition, Rational> {
        &self.terms
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, part: &Partition) -> Rational {
        self.terms.get(part).cloned().unwrap_or_else(Rational::zero)
    }

    /// Sum of all coefficients; equals `(n-1)!/2`.
    pub fn coefficient_sum(&self) -> Rational {
        let mut acc = Rational::zero();
        for v in self.terms.values() {
            acc += v;
        }
        acc
    }

    pub(crate) fn from_terms(n: u32, terms: BTreeMap<Partition, Rational>) -> Self {
        RunPolynomial { n, terms }
    }
}

/// Sweep state: doubled coefficients `2·𝒦_n`, which are integers at every
/// level (the 1/2 appears only in `𝒦_2` itself).
type DoubledTerms = HashMap<Vec<u32>, BigInt>;

fn doubled_k2() -> DoubledTerms {
    let mut m = HashMap::new();
    m.insert(vec![1, 1], BigInt::one());
    m
}

fn sweep_step(cur: &DoubledTerms) -> DoubledTerms {
    let mut next: DoubledTerms = HashMap::with_capacity(cur.len() * 2);
    for (parts, coeff) in cur {
        // multiplicity bookkeeping over distinct parts (parts sorted descending)
        let mut idx = 0;
        while idx < parts.len() {
            let part = parts[idx];
            let mut mult = 1u32;
            while idx + (mult as usize) < parts.len() && parts[idx + mult as usize] == part {
                mult += 1;
            }
            let weight = coeff * mult;
            // grow one copy of `part` to `part + 1`
            add_term(&mut next, grow_part(parts, idx, part + 1), &weight);
            // split one copy of `part` into {1, i, part - i}
            for i in 1..part {
                add_term(&mut next, split_part(parts, idx, i, part - i), &weight);
            }
            idx += mult as usize;
        }
    }
    next
}

fn add_term(map: &mut DoubledTerms, key: Vec<u32>, coeff: &BigInt) {
    map.entry(key)
        .and_modify(|c| *c += coeff)
        .or_insert_with(|| coeff.clone());
}

/// Copy `parts` with the entry at `at` replaced by `grown`, order kept.
fn grow_part(parts: &[u32], at: usize, grown: u32) -> Vec<u32> {
    let mut out = Vec::with_capacity(parts.len());
    let mut placed = false;
    for (j, &p) in parts.iter().enumerate() {
        if j == at {
            continue;
        }
        if !placed && grown >= p {
            out.push(grown);
            placed = true;
        }
        out.push(p);
    }
    if !placed {
        out.push(grown);
    }
    out
}

/// Copy `parts` with the entry at `at` replaced by `{1, i, j}`, order kept.
fn split_part(parts: &[u32], at: usize, i: u32, j: u32) -> Vec<u32> {
    let add = [i.max(j), i.min(j), 1];
    let mut out = Vec::with_capacity(parts.len() + 2);
    let mut k = 0usize;
    for (idx, &p) in parts.iter().enumerate() {
        if idx == at {
            continue;
        }
        while k < 3 && add[k] >= p {
            out.push(add[k]);
            k += 1;
        }
        out.push(p);
    }
    while k < 3 {
        out.push(add[k]);
        k += 1;
    }
    out
}

fn materialize(n: u32, doubled: &DoubledTerms) -> RunPolynomial {
    let two = Rational::from_integer(BigInt::from(2));
    let terms: BTreeMap<Partition, Rational> = doubled
        .iter()
        .map(|(k, v)| {
            (Partition::new(k.clone()), Rational::from_integer(v.clone()) / &two)
        })
        .collect();
    RunPolynomial { n, terms }
}

/// Build `𝒦_n` by iterating the rewriting recurrence from `𝒦_2`.
pub fn run_polynomial(n: u32) -> crate::Result<RunPolynomial> {
    if n < 2 {
        return Err(crate::Error::InvalidArgument(format!("run polynomial needs n >= 2, got {n}")));
    }
    let mut cur = doubled_k2();
    for _ in 3..=n {
        cur = sweep_step(&cur);
    }
    Ok(materialize(n, &cur))
}

/// Enumerate the permutations directly and tally their run-length multisets.
///
/// Permutations `σ` of `{1..n}` with `σ(1) = 1` and `σ(2) < σ(n)` are
/// decomposed into maximal monotone stretches of `σ(1), …, σ(n), σ(n+1)=1`
/// (the wrap convention). The result equals [`run_polynomial`] exactly; for
/// `n = 2` the half-count convention is applied.
pub fn brute_force_run_census(n: u32) -> crate::Result<RunPolynomial> {
    if !(2..=10).contains(&n) {
        return Err(crate::Error::InvalidArgument(format!(
            "census is feasible for 2 <= n <= 10, got {n}"
        )));
    }
    if n == 2 {
        // single permutation (1, 2); runs of the wrapped sequence 1,2,1 are
        // [1,1], counted with weight 1/2
        let mut terms = BTreeMap::new();
        terms.insert(Partition::new(vec![1, 1]), crate::arith::rat(1, 2));
        return Ok(RunPolynomial { n, terms });
    }
    let mut tally: HashMap<Vec<u32>, BigInt> = HashMap::new();
    let mut seq: Vec<u32> = vec![0; (n + 2) as usize];
    seq[1] = 1;
    seq[(n + 1) as usize] = 1;
    let mut pool: Vec<u32> = (2..=n).collect();
    permute_census(&mut seq, &mut pool, 2, n, &mut tally);
    let terms: BTreeMap<Partition, Rational> = tally
        .into_iter()
        .map(|(k, v)| (Partition::new(k), Rational::from_integer(v)))
        .collect();
    Ok(RunPolynomial { n, terms })
}

fn permute_census(
    seq: &mut Vec<u32>,
    pool: &mut Vec<u32>,
    pos: u32,
    n: u32,
    tally: &mut HashMap<Vec<u32>, BigInt>,
) {
    if pool.is_empty() {
        // side condition σ(2) < σ(n)
        if seq[2] < seq[n as usize] {
            let mut key = run_lengths(&seq[1..=(n + 1) as usize]);
            key.sort_unstable_by(|a, b| b.cmp(a));
            tally
                .entry(key)
                .and_modify(|c| *c += 1)
                .or_insert_with(BigInt::one);
        }
        return;
    }
    for i in 0..pool.len() {
        let v = pool.swap_remove(i);
        seq[pos as usize] = v;
        permute_census(seq, pool, pos + 1, n, tally);
        pool.push(v);
        let last = pool.len() - 1;
        pool.swap(i, last);
    }
}

/// Lengths of the maximal monotone stretches of `s` (length n+1, wrap
/// already appended). Adjacent entries are always distinct here.
fn run_lengths(s: &[u32]) -> Vec<u32> {
    let mut lengths = Vec::new();
    let mut i = 0usize;
    while i + 1 < s.len() {
        let ascending = s[i + 1] > s[i];
        let mut j = i + 1;
        while j + 1 < s.len() && ((s[j + 1] > s[j]) == ascending) {
            j += 1;
        }
        lengths.push((j - i) as u32);
        i = j;
    }
    lengths
}

/// Scaled run factors `A_j = K_j^(0) · 2^((p+1) j)`, which are integers; a
/// monomial of weight `n` then evaluates to an integer product and the
/// final `C_n` is assembled as one exact division.
fn scaled_run_factors(kt: &KTable, n_max: u32) -> Vec<BigInt> {
    let mut out = Vec::with_capacity(n_max as usize);
    out.push(BigInt::zero()); // index 0 unused
    for j in 1..n_max.max(2) {
        let k = kt.k(j);
        let scaled = k * Rational::from_integer(BigInt::from(2).pow((kt.p() + 1) * j));
        assert!(scaled.is_integer(), "K_j 2^((p+1)j) must be integral");
        out.push(scaled.to_integer());
    }
    out
}

fn eval_doubled(doubled: &DoubledTerms, factors: &[BigInt], n: u32, p: u32) -> Rational {
    let sum: BigInt = doubled
        .par_iter()
        .map(|(parts, coeff)| {
            let mut prod = coeff.clone();
            for &part in parts {
                prod *= &factors[part as usize];
            }
            prod
        })
        .reduce(BigInt::zero, |a, b| a + b);
    // C_n = 8^n (S_n / 2) / 2^((p+1) n)
    Rational::new(sum * BigInt::from(8u32).pow(n), BigInt::from(2).pow((p + 1) * n + 1))
}

/// `C_n = 8^n 𝒦_n(K_1, …, K_{n-1})` for one level.
pub fn connected_moment(n: u32, kt: &KTable) -> crate::Result<Rational> {
    if n < 2 {
        return Err(crate::Error::InvalidArgument("connected moments start at n = 2".into()));
    }
    if kt.max_n() < n - 1 {
        return Err(crate::Error::InsufficientDepth { need: (n - 1) as usize, have: kt.max_n() as usize });
    }
    let factors = scaled_run_factors(kt, n);
    let mut cur = doubled_k2();
    for _ in 3..=n {
        cur = sweep_step(&cur);
    }
    Ok(eval_doubled(&cur, &factors, n, kt.p()))
}

/// Connected moments `C_0..C_{n_max}` for every supplied table, sharing one
/// polynomial sweep across the different `p`. Returns one vector per table,
/// with the conventions `C_0 = 1`, `C_1 = 0`.
pub fn base_connected_moments_multi(
    tables: &[&KTable],
    n_max: u32,
) -> crate::Result<Vec<Vec<Rational>>> {
    assert!(n_max >= 2);
    for kt in tables {
        if kt.max_n() < n_max - 1 {
            return Err(crate::Error::InsufficientDepth {
                need: (n_max - 1) as usize,
                have: kt.max_n() as usize,
            });
        }
    }
    let factor_sets: Vec<Vec<BigInt>> =
        tables.iter().map(|kt| scaled_run_factors(kt, n_max)).collect();
    let mut out: Vec<Vec<Rational>> = tables
        .iter()
        .map(|_| vec![Rational::one(), Rational::zero()])
        .collect();
    let mut cur = doubled_k2();
    for n in 2..=n_max {
        if n > 2 {
            cur = sweep_step(&cur);
        }
        for (t, kt) in tables.iter().enumerate() {
            out[t].push(eval_doubled(&cur, &factor_sets[t], n, kt.p()));
        }
    }
    Ok(out)
}

/// Convenience wrapper for a single table.
pub fn base_connected_moments(kt: &KTable, n_max: u32) -> crate::Result<Vec<Rational>> {
    Ok(base_connected_moments_multi(&[kt], n_max)?.pop().expect("one result"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};

    fn part(v: &[u32]) -> Partition {
        Partition::new(v.to_vec())
    }

    #[test]
    fn k2_and_k3() {
        let k2 = run_polynomial(2).unwrap();
        assert_eq!(k2.term_count(), 1);
        assert_eq!(k2.coefficient(&part(&[1, 1])), rat(1, 2));
        let k3 = run_polynomial(3).unwrap();
        assert_eq!(k3.term_count(), 1);
        assert_eq!(k3.coefficient(&part(&[2, 1])), int(1));
    }

    #[test]
    fn k4_explicit() {
        let k4 = run_polynomial(4).unwrap();
        assert_eq!(k4.term_count(), 3);
        assert_eq!(k4.coefficient(&part(&[3, 1])), int(1));
        assert_eq!(k4.coefficient(&part(&[2, 2])), int(1));
        assert_eq!(k4.coefficient(&part(&[1, 1, 1, 1])), int(1));
    }

    #[test]
    fn k5_k6_k7_explicit() {
        let k5 = run_polynomial(5).unwrap();
        assert_eq!(k5.coefficient(&part(&[4, 1])), int(1));
        assert_eq!(k5.coefficient(&part(&[3, 2])), int(3));
        assert_eq!(k5.coefficient(&part(&[2, 1, 1, 1])), int(8));
        assert_eq!(k5.term_count(), 3);

        let k6 = run_polynomial(6).unwrap();
        assert_eq!(k6.coefficient(&part(&[5, 1])), int(1));
        assert_eq!(k6.coefficient(&part(&[3, 3])), int(3));
        assert_eq!(k6.coefficient(&part(&[4, 2])), int(4));
        assert_eq!(k6.coefficient(&part(&[3, 1, 1, 1])), int(13));
        assert_eq!(k6.coefficient(&part(&[2, 2, 1, 1])), int(31));
        assert_eq!(k6.coefficient(&part(&[1, 1, 1, 1, 1, 1])), int(8));

        let k7 = run_polynomial(7).unwrap();
        assert_eq!(k7.coefficient(&part(&[6, 1])), int(1));
        assert_eq!(k7.coefficient(&part(&[4, 3])), int(10));
        assert_eq!(k7.coefficient(&part(&[5, 2])), int(5));
        assert_eq!(k7.coefficient(&part(&[4, 1, 1, 1])), int(19));
        assert_eq!(k7.coefficient(&part(&[2, 2, 2, 1])), int(66));
        assert_eq!(k7.coefficient(&part(&[3, 2, 1, 1])), int(123));
        assert_eq!(k7.coefficient(&part(&[2, 1, 1, 1, 1, 1])), int(136));
    }

    #[test]
    fn coefficient_sums() {
        for n in 3..=9u32 {
            let p = run_polynomial(n).unwrap();
            let want = Rational::new(factorial_int((n - 1) as u64), BigInt::from(2));
            assert_eq!(p.coefficient_sum(), want, "n={n}");
        }
    }

    #[test]
    fn monomials_have_even_part_count_and_weight_n() {
        for n in 2..=14u32 {
            let p = run_polynomial(n).unwrap();
            for t in p.terms().keys() {
                assert_eq!(t.weight(), n);
                assert_eq!(t.len() % 2, 0);
            }
            assert_eq!(
                p.term_count(),
                crate::arith::partitions_even_parts(n).len(),
                "n={n}"
            );
        }
    }

    #[test]
    fn census_matches_recurrence_through_7() {
        for n in 2..=7u32 {
            let a = run_polynomial(n).unwrap();
            let b = brute_force_run_census(n).unwrap();
            assert_eq!(a, b, "n={n}");
        }
    }

    #[test]
    fn census_examples() {
        let c5 = brute_force_run_census(5).unwrap();
        assert_eq!(c5.coefficient(&part(&[2, 1, 1, 1])), int(8));
        let c3 = brute_force_run_census(3).unwrap();
        assert_eq!(c3.term_count(), 1);
        assert_eq!(c3.coefficient(&part(&[2, 1])), int(1));
    }

    #[test]
    fn census_rejects_out_of_range() {
        assert!(brute_force_run_census(1).is_err());
        assert!(brute_force_run_census(11).is_err());
    }

    #[test]
    fn connected_moment_values() {
        let k1 = KTable::build(1, 8).unwrap();
        let k3 = KTable::build(3, 8).unwrap();
        assert_eq!(connected_moment(2, &k1).unwrap(), int(2));
        assert_eq!(connected_moment(3, &k3).unwrap(), int(1890));
        assert_eq!(connected_moment(4, &k1).unwrap(), int(1728));
    }

    #[test]
    fn multi_table_evaluation_matches_single() {
        let k1 = KTable::build(1, 8).unwrap();
        let k3 = KTable::build(3, 8).unwrap();
        let both = base_connected_moments_multi(&[&k1, &k3], 6).unwrap();
        for n in 2..=6u32 {
            assert_eq!(both[0][n as usize], connected_moment(n, &k1).unwrap());
            assert_eq!(both[1][n as usize], connected_moment(n, &k3).unwrap());
        }
        assert_eq!(both[0][0], int(1));
        assert_eq!(both[0][1], int(0));
    }

    #[test]
    fn dominant_graph_lower_bound() {
        let kt = KTable::build(3, 12).unwrap();
        for n in 3..=12u32 {
            let cn = connected_moment(n, &kt).unwrap();
            let bound = Rational::from_integer(BigInt::from(8u32).pow(n))
                * kt.k(n - 1)
                * kt.k(1);
            assert!(cn >= bound, "n={n}");
        }
    }
}
