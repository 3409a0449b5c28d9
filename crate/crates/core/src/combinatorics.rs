//! Exact big-integer combinatorics: alternating binomial sums over periodic
//! sequences, and residue-class sums of multinomial expansions.
//!
//! The residue tables decide sign questions like "is
//! `sum_{p = 0 mod 3} (-1)^p C(m, p)` negative?" without rounding, for orders
//! where the binomials overflow machine integers.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Row `n` of Pascal's triangle.
pub fn binomial_row(n: usize) -> Vec<BigInt> {
    let mut row = vec![BigInt::one()];
    for _ in 0..n {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(BigInt::one());
        next.extend(row.windows(2).map(|w| &w[0] + &w[1]));
        next.push(BigInt::one());
        row = next;
    }
    row
}

pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// A sequence `u_0, u_1, ..` with `u_{j+p} = u_j`, stored as one period.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodicSequence {
    period: Vec<BigRational>,
}

impl PeriodicSequence {
    pub fn new(period: Vec<BigRational>) -> Result<Self> {
        if period.len() < 2 {
            return Err(Error::PeriodTooSmall(period.len()));
        }
        Ok(Self { period })
    }

    pub fn from_integers(values: &[i64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| BigRational::from_integer(v.into())).collect())
    }

    pub fn period(&self) -> usize {
        self.period.len()
    }

    pub fn get(&self, j: usize) -> &BigRational {
        &self.period[j % self.period.len()]
    }

    pub fn is_constant(&self) -> bool {
        self.period.iter().all(|u| u == &self.period[0])
    }
}

/// `D_i = sum_{j=0}^{M} C(M, j) (-1)^j u_{i+j}` for `i = 0..p-1`, exactly.
pub fn alternating_binomial_sums(seq: &PeriodicSequence, order: usize) -> Result<Vec<BigRational>> {
    if order == 0 {
        return Err(Error::ZeroBinomialOrder);
    }
    let row = binomial_row(order);
    let sums = (0..seq.period())
        .map(|i| {
            row.iter().enumerate().fold(BigRational::zero(), |acc, (j, c)| {
                let term = seq.get(i + j) * BigRational::from_integer(c.clone());
                if j % 2 == 0 {
                    acc + term
                } else {
                    acc - term
                }
            })
        })
        .collect();
    Ok(sums)
}

/// Sign structure of the alternating binomial sums of a periodic sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SumSigns {
    /// All sums share one weak sign, which forces the sequence to be constant.
    ForcedConstant,
    MixedSigns,
}

/// Classifies the signs of [`alternating_binomial_sums`].
///
/// # Panics
///
/// Panics if the sums share a weak sign while the sequence is not constant.
/// That outcome contradicts the circulant-numbers theorem and means either
/// the theorem or this implementation is wrong.
pub fn sum_signs(seq: &PeriodicSequence, order: usize) -> Result<(Vec<BigRational>, SumSigns)> {
    let sums = alternating_binomial_sums(seq, order)?;
    let all_nonneg = sums.iter().all(|d| !d.is_negative());
    let all_nonpos = sums.iter().all(|d| !d.is_positive());
    let verdict = if all_nonneg || all_nonpos {
        assert!(
            seq.is_constant(),
            "alternating binomial sums of order {order} share a sign for a non-constant sequence"
        );
        SumSigns::ForcedConstant
    } else {
        SumSigns::MixedSigns
    };
    Ok((sums, verdict))
}

/// Exact residue-class sums `S_j` of `(a_1 + a_2 z + .. + a_L z^{L-1})^m`,
/// bucketed by `i_1 + .. + i_m = j (mod r)` (1-based indices, so the weighted
/// exponent plus `m`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidueSumTable {
    pub order: usize,
    pub modulus: usize,
    pub pattern: Vec<i64>,
    #[serde(with = "bigint_strings")]
    pub sums: Vec<BigInt>,
}

impl ResidueSumTable {
    pub fn total(&self) -> BigInt {
        self.sums.iter().sum()
    }

    pub fn sum(&self, j: usize) -> &BigInt {
        &self.sums[j]
    }

    /// `S_1 - S_2`, the coefficient that survives when `v_1 + v_2 = 2 v_0`.
    pub fn first_second_difference(&self) -> BigInt {
        &self.sums[1] - &self.sums[2]
    }
}

/// Expands by enumerating compositions `k_1 + .. + k_L = m` with multinomial
/// weight `m! / (k_1! .. k_L!) * a_1^{k_1} .. a_L^{k_L}`. For three entries
/// this is the double sum over `(p, q)` with `2p + q` fixed mod `r`.
pub fn residue_sum_table(order: usize, modulus: usize, pattern: &[i64]) -> Result<ResidueSumTable> {
    if modulus == 0 {
        return Err(Error::ZeroModulus);
    }
    if pattern.is_empty() || pattern.len() > 4 {
        return Err(Error::PatternLength(pattern.len()));
    }
    let powers: Vec<Vec<BigInt>> = pattern
        .iter()
        .map(|&a| {
            let base = BigInt::from(a);
            let mut row = vec![BigInt::one()];
            for k in 1..=order {
                let next = &row[k - 1] * &base;
                row.push(next);
            }
            row
        })
        .collect();
    let pascal: Vec<Vec<BigInt>> = (0..=order).map(binomial_row).collect();
    let mut sums = vec![BigInt::zero(); modulus];
    let mut counts = vec![0usize; pattern.len()];
    accumulate(&powers, &pascal, order, 0, order, &mut counts, &mut sums);
    Ok(ResidueSumTable { order, modulus, pattern: pattern.to_vec(), sums })
}

fn accumulate(
    powers: &[Vec<BigInt>],
    pascal: &[Vec<BigInt>],
    order: usize,
    slot: usize,
    remaining: usize,
    counts: &mut [usize],
    sums: &mut [BigInt],
) {
    let last = powers.len() - 1;
    if slot == last {
        counts[slot] = remaining;
        let mut weight = BigInt::one();
        let mut left = order;
        let mut exponent = 0usize;
        for (i, &k) in counts.iter().enumerate() {
            weight *= &pascal[left][k];
            weight *= &powers[i][k];
            left -= k;
            exponent += i * k;
        }
        let r = sums.len();
        sums[(exponent + order) % r] += weight;
        return;
    }
    for k in 0..=remaining {
        counts[slot] = k;
        accumulate(powers, pascal, order, slot + 1, remaining - k, counts, sums);
    }
}

/// What a sign-fact row asserts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Expectation {
    S0Negative,
    S0Positive,
    S1EqualsS2,
    /// `S_0` agrees with the `S_0` of `other`.
    S0Matches { other: Vec<i64> },
    /// `S_1 - S_2` is the negation of `S_1 - S_2` for `other`.
    DifferenceAntisymmetric { other: Vec<i64> },
    DifferenceNonZero,
}

impl fmt::Display for Expectation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expectation::S0Negative => write!(f, "S0 < 0"),
            Expectation::S0Positive => write!(f, "S0 > 0"),
            Expectation::S1EqualsS2 => write!(f, "S1 = S2"),
            Expectation::S0Matches { other } => write!(f, "S0 = S0{}", fmt_pattern(other)),
            Expectation::DifferenceAntisymmetric { other } => {
                write!(f, "S1 - S2 = -(S1 - S2){}", fmt_pattern(other))
            }
            Expectation::DifferenceNonZero => write!(f, "S1 - S2 != 0"),
        }
    }
}

pub fn fmt_pattern(pattern: &[i64]) -> String {
    let inner: Vec<String> = pattern.iter().map(i64::to_string).collect();
    format!("({})", inner.join(","))
}

/// One exactly recomputed sign fact.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignFact {
    pub table: ResidueSumTable,
    pub expectation: Expectation,
    pub passed: bool,
}

impl SignFact {
    pub fn check(order: usize, pattern: &[i64], expectation: Expectation) -> Result<Self> {
        let table = residue_sum_table(order, 3, pattern)?;
        let passed = match &expectation {
            Expectation::S0Negative => table.sum(0).is_negative(),
            Expectation::S0Positive => table.sum(0).is_positive(),
            Expectation::S1EqualsS2 => table.sum(1) == table.sum(2),
            Expectation::S0Matches { other } => {
                residue_sum_table(order, 3, other)?.sum(0) == table.sum(0)
            }
            Expectation::DifferenceAntisymmetric { other } => {
                let theirs = residue_sum_table(order, 3, other)?.first_second_difference();
                table.first_second_difference() == -theirs
            }
            Expectation::DifferenceNonZero => !table.first_second_difference().is_zero(),
        };
        Ok(Self { table, expectation, passed })
    }
}

/// Orders at which index-three tensors are classified in closed form.
pub const INDEX_THREE_ORDERS: [usize; 5] = [6, 12, 18, 30, 42];

/// The full table of exact sign facts behind the index-three classification.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignFactReport {
    pub facts: Vec<SignFact>,
}

impl SignFactReport {
    pub fn all_passed(&self) -> bool {
        self.facts.iter().all(|f| f.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &SignFact> {
        self.facts.iter().filter(|f| !f.passed)
    }
}

pub fn sign_fact_report() -> SignFactReport {
    use Expectation::*;
    let pm: &[i64] = &[1, -1];
    let ppm: &[i64] = &[1, 1, -2];
    let a: &[i64] = &[1, -3, 2];
    let b: &[i64] = &[1, 2, -3];
    let mut rows: Vec<(usize, &[i64], Expectation)> = Vec::new();
    for &m in &[6, 18, 30, 42] {
        rows.push((m, pm, S0Negative));
        rows.push((m, ppm, S0Positive));
    }
    rows.push((12, pm, S0Positive));
    rows.push((12, a, S0Negative));
    rows.push((12, b, S0Matches { other: a.to_vec() }));
    for &m in &INDEX_THREE_ORDERS {
        rows.push((m, pm, S1EqualsS2));
        rows.push((m, ppm, S1EqualsS2));
    }
    for &m in &INDEX_THREE_ORDERS {
        rows.push((m, b, DifferenceAntisymmetric { other: a.to_vec() }));
        rows.push((m, b, DifferenceNonZero));
    }
    let facts = rows
        .into_iter()
        .map(|(m, p, e)| SignFact::check(m, p, e).expect("fixed patterns are valid"))
        .collect();
    SignFactReport { facts }
}

mod bigint_strings {
    use num_bigint::BigInt;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(values: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(values.iter().map(|v| v.to_string()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|s| s.parse().map_err(D::Error::custom))
            .collect()
    }
}
