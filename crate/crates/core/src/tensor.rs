//! Generating vectors, circulant structure, Hankel tensors and matrices, and
//! the structured test vectors used to refute positive semi-definiteness.
//!
//! Index conventions: the generating vector `v` is 0-based (`v_0 .. v_{(n-1)m}`),
//! tensor and matrix indices are 1-based, so that
//! `a_{i_1 .. i_m} = v_{i_1 + .. + i_m - m}` and `a_{ij} = v_{i+j-2}`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest `n^m` for which the order-m array may be materialized or enumerated.
pub const DEFAULT_DENSE_CAP: usize = 1_000_000;

/// Length of the generating vector of an order-`m`, dimension-`n` Hankel tensor.
pub fn generating_len(order: usize, dim: usize) -> usize {
    (dim - 1) * order + 1
}

/// `n^m`, or `None` on overflow.
pub(crate) fn dense_size(order: usize, dim: usize) -> Option<usize> {
    let mut size: usize = 1;
    for _ in 0..order {
        size = size.checked_mul(dim)?;
    }
    Some(size)
}

fn check_shape(order: usize, dim: usize) -> Result<()> {
    if order < 2 {
        return Err(Error::OrderTooSmall(order));
    }
    if dim < 2 {
        return Err(Error::DimensionTooSmall(dim));
    }
    Ok(())
}

fn check_finite(values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(pos) => Err(Error::NonFinite(pos)),
        None => Ok(()),
    }
}

pub(crate) fn max_abs(values: &[f64]) -> f64 {
    values.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
}

/// The vector `v` of length `(n-1)m+1` that defines every entry of a Hankel tensor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratingVector {
    order: usize,
    dim: usize,
    values: Vec<f64>,
}

impl GeneratingVector {
    pub fn new(order: usize, dim: usize, values: Vec<f64>) -> Result<Self> {
        check_shape(order, dim)?;
        let expected = generating_len(order, dim);
        if values.len() != expected {
            return Err(Error::GeneratingLength { expected, got: values.len() });
        }
        check_finite(&values)?;
        Ok(Self { order, dim, values })
    }

    /// Order `m`.
    pub fn order(&self) -> usize {
        self.order
    }

    /// Dimension `n`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, i: usize) -> Option<f64> {
        self.values.get(i).copied()
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.values)
    }

    pub fn is_even_order(&self) -> bool {
        self.order % 2 == 0
    }

    /// `k` with `m = 2k`.
    pub fn half_order(&self) -> Result<usize> {
        if self.is_even_order() {
            Ok(self.order / 2)
        } else {
            Err(Error::OddOrder(self.order))
        }
    }

    /// Smallest `r >= 1` with `v_i = v_{i+r}` for every valid `i` (exact comparison).
    pub fn minimal_period(&self) -> usize {
        let len = self.values.len();
        (1..len)
            .find(|&r| (0..len - r).all(|i| self.values[i] == self.values[i + r]))
            .unwrap_or(len)
    }

    pub fn tensor(&self) -> HankelTensor {
        HankelTensor { gen: self.clone() }
    }

    pub fn hankel_matrix(&self) -> Result<HankelMatrix> {
        HankelMatrix::new(self)
    }
}

/// Compressed form of a generalized anti-circulant tensor: `(m, n, r)` and the
/// seed `v_0 .. v_{r-1}`, with `v_i = v_{i+r}` throughout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CirculantSpec {
    order: usize,
    dim: usize,
    index: usize,
    seed: Vec<f64>,
}

impl CirculantSpec {
    /// Accepts `1 <= r <= max(n, 2n-4)` and `r <= (n-1)m`.
    pub fn new(order: usize, dim: usize, index: usize, seed: Vec<f64>) -> Result<Self> {
        check_shape(order, dim)?;
        let max = Self::max_index(order, dim);
        if index < 1 || index > max {
            return Err(Error::CirculantIndex { r: index, max });
        }
        if seed.len() != index {
            return Err(Error::SeedLength { expected: index, got: seed.len() });
        }
        check_finite(&seed)?;
        Ok(Self { order, dim, index, seed })
    }

    /// Largest admissible circulant index for the given shape.
    pub fn max_index(order: usize, dim: usize) -> usize {
        let by_dim = dim.max((2 * dim).saturating_sub(4));
        by_dim.min((dim - 1) * order)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Circulant index `r`.
    pub fn index(&self) -> usize {
        self.index
    }

    pub fn seed(&self) -> &[f64] {
        &self.seed
    }

    /// `v_i = seed[i mod r]`.
    pub fn value(&self, i: usize) -> f64 {
        self.seed[i % self.index]
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.seed)
    }

    /// Periodic tiling of the seed over the full generating vector.
    pub fn expand(&self) -> GeneratingVector {
        let len = generating_len(self.order, self.dim);
        let values = (0..len).map(|i| self.value(i)).collect();
        GeneratingVector { order: self.order, dim: self.dim, values }
    }

    /// Same tensor with every seed value multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.order,
            self.dim,
            self.index,
            self.seed.iter().map(|s| s * factor).collect(),
        )
    }

    pub fn witnesses(&self, family: WitnessFamily) -> Result<Vec<WitnessVector>> {
        witnesses(self.dim, family)
    }
}

/// Order-m Hankel tensor. Entries are derived from the generating vector on demand.
#[derive(Debug, Clone, PartialEq)]
pub struct HankelTensor {
    gen: GeneratingVector,
}

impl HankelTensor {
    pub fn new(gen: GeneratingVector) -> Self {
        Self { gen }
    }

    pub fn generating_vector(&self) -> &GeneratingVector {
        &self.gen
    }

    /// `a_{i_1 .. i_m} = v_{i_1 + .. + i_m - m}` with 1-based indices.
    pub fn entry(&self, idx: &[usize]) -> Result<f64> {
        let (order, dim) = (self.gen.order, self.gen.dim);
        if idx.len() != order {
            return Err(Error::IndexArity { expected: order, got: idx.len() });
        }
        let mut sum = 0;
        for (position, &index) in idx.iter().enumerate() {
            if index < 1 || index > dim {
                return Err(Error::IndexOutOfRange { position, index, dim });
            }
            sum += index - 1;
        }
        Ok(self.gen.values[sum])
    }

    /// Row-major dense array of all `n^m` entries (last index fastest).
    pub fn to_dense(&self, cap: usize) -> Result<Vec<f64>> {
        let (order, dim) = (self.gen.order, self.gen.dim);
        let size = dense_size(order, dim)
            .filter(|&s| s <= cap)
            .ok_or(Error::DenseCapExceeded { dim, order, cap })?;
        let mut out = Vec::with_capacity(size);
        let mut digits = vec![0usize; order];
        let mut sum = 0usize;
        for _ in 0..size {
            out.push(self.gen.values[sum]);
            // odometer increment, keeping the digit sum in step
            for d in digits.iter_mut().rev() {
                if *d + 1 < dim {
                    *d += 1;
                    sum += 1;
                    break;
                }
                sum -= *d;
                *d = 0;
            }
        }
        Ok(out)
    }
}

/// The `(nk-k+1)`-square Hankel matrix `a_{ij} = v_{i+j-2}` of an order `m = 2k` tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct HankelMatrix {
    size: usize,
    anti_diagonals: Vec<f64>,
}

impl HankelMatrix {
    pub fn new(gen: &GeneratingVector) -> Result<Self> {
        let k = gen.half_order()?;
        let size = gen.dim * k - k + 1;
        Ok(Self { size, anti_diagonals: gen.values[..2 * size - 1].to_vec() })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Entry `(i, j)`, 1-based.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        assert!((1..=self.size).contains(&i) && (1..=self.size).contains(&j));
        self.anti_diagonals[i + j - 2]
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.anti_diagonals)
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.size)
            .map(|i| self.anti_diagonals[i..i + self.size].to_vec())
            .collect()
    }

    /// `y^T A y`.
    pub fn quadratic_form(&self, y: &[f64]) -> f64 {
        let mut total = 0.0;
        for (i, yi) in y.iter().enumerate() {
            for (j, yj) in y.iter().enumerate() {
                total += self.anti_diagonals[i + j] * yi * yj;
            }
        }
        total
    }
}

/// Fixed small vectors (zero-padded to length n) used as refutation candidates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pattern {
    /// `(1, -1, 0, ..)`
    OneMinusOne,
    /// `(1, 1, 0, ..)`
    OneOne,
    /// `(1, 1, -2, 0, ..)`
    OneOneMinusTwo,
    /// `(1, -3, 2, 0, ..)`
    OneMinusThreeTwo,
    /// `(1, 2, -3, 0, ..)`
    OneTwoMinusThree,
    /// `(1, 0, -1, 0, ..)`
    OneZeroMinusOne,
    /// `(1, -1, -1, 1, 0, ..)`
    OneMinusOneMinusOneOne,
}

impl Pattern {
    pub const ALL: [Pattern; 7] = [
        Pattern::OneMinusOne,
        Pattern::OneOne,
        Pattern::OneOneMinusTwo,
        Pattern::OneMinusThreeTwo,
        Pattern::OneTwoMinusThree,
        Pattern::OneZeroMinusOne,
        Pattern::OneMinusOneMinusOneOne,
    ];

    pub fn entries(self) -> &'static [i64] {
        match self {
            Pattern::OneMinusOne => &[1, -1],
            Pattern::OneOne => &[1, 1],
            Pattern::OneOneMinusTwo => &[1, 1, -2],
            Pattern::OneMinusThreeTwo => &[1, -3, 2],
            Pattern::OneTwoMinusThree => &[1, 2, -3],
            Pattern::OneZeroMinusOne => &[1, 0, -1],
            Pattern::OneMinusOneMinusOneOne => &[1, -1, -1, 1],
        }
    }

    pub fn min_dim(self) -> usize {
        self.entries().len()
    }

    fn name(self) -> &'static str {
        match self {
            Pattern::OneMinusOne => "(1,-1)",
            Pattern::OneOne => "(1,1)",
            Pattern::OneOneMinusTwo => "(1,1,-2)",
            Pattern::OneMinusThreeTwo => "(1,-3,2)",
            Pattern::OneTwoMinusThree => "(1,2,-3)",
            Pattern::OneZeroMinusOne => "(1,0,-1)",
            Pattern::OneMinusOneMinusOneOne => "(1,-1,-1,1)",
        }
    }
}

/// A family of structured candidate vectors, each member shifted over `q = 1..n`
/// with cyclic wrap-around (`e_{n+1} = e_1`, `e_{n+2} = e_2`, `e_0 = e_n`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum WitnessFamily {
    /// `e_q`
    Unit,
    /// `e_q - e_{q+1}`
    UnitDifference,
    /// `e_q - e_{q+2}`
    StepTwoDifference,
    /// `alpha e_{q-1} + e_q - alpha e_{q+1}`
    Alpha { alpha: f64 },
    /// A single fixed vector.
    Pattern { pattern: Pattern },
}

impl WitnessFamily {
    fn name(&self) -> &'static str {
        match self {
            WitnessFamily::Unit => "unit",
            WitnessFamily::UnitDifference => "unit-difference",
            WitnessFamily::StepTwoDifference => "step-two-difference",
            WitnessFamily::Alpha { .. } => "alpha",
            WitnessFamily::Pattern { pattern } => pattern.name(),
        }
    }

    pub fn min_dim(&self) -> usize {
        match self {
            WitnessFamily::Unit | WitnessFamily::UnitDifference => 2,
            WitnessFamily::StepTwoDifference | WitnessFamily::Alpha { .. } => 3,
            WitnessFamily::Pattern { pattern } => pattern.min_dim(),
        }
    }
}

/// Where a witness vector came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum WitnessLabel {
    Family { family: WitnessFamily, q: Option<usize> },
    /// A `{-1, 0, 1}` sign vector.
    SignVector,
    /// Best point of a multistart sphere descent.
    SphereDescent,
}

impl fmt::Display for WitnessLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WitnessLabel::Family { family, q } => {
                match family {
                    WitnessFamily::Pattern { pattern } => write!(f, "pattern {}", pattern.name())?,
                    WitnessFamily::Alpha { alpha } => write!(f, "alpha={alpha}")?,
                    _ => write!(f, "{}", family.name())?,
                }
                match q {
                    Some(q) => write!(f, " q={q}"),
                    None => Ok(()),
                }
            }
            WitnessLabel::SignVector => write!(f, "sign vector"),
            WitnessLabel::SphereDescent => write!(f, "sphere descent"),
        }
    }
}

/// A nonzero point at which the form is evaluated to refute positivity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessVector {
    pub x: Vec<f64>,
    pub label: WitnessLabel,
}

impl WitnessVector {
    pub fn new(x: Vec<f64>, label: WitnessLabel) -> Result<Self> {
        if x.iter().all(|&xi| xi == 0.0) {
            return Err(Error::ZeroWitness);
        }
        check_finite(&x)?;
        Ok(Self { x, label })
    }

    pub fn norm(&self) -> f64 {
        self.x.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn normalized(&self) -> Vec<f64> {
        let norm = self.norm();
        self.x.iter().map(|v| v / norm).collect()
    }
}

fn wrap(q: isize, dim: usize) -> usize {
    // 1-based index reduced cyclically into 1..=dim, returned 0-based
    (q - 1).rem_euclid(dim as isize) as usize
}

/// All members of a witness family in dimension `dim`, in shift order `q = 1..n`.
/// Fixed patterns yield a single vector.
pub fn witnesses(dim: usize, family: WitnessFamily) -> Result<Vec<WitnessVector>> {
    let min = family.min_dim();
    if dim < min {
        return Err(Error::FamilyTooSmall { family: family.name(), min, dim });
    }
    let label = |q: Option<usize>| WitnessLabel::Family { family, q };
    let shifted = |q: usize, terms: &[(isize, f64)]| {
        let mut x = vec![0.0; dim];
        for &(offset, coeff) in terms {
            x[wrap(q as isize + offset, dim)] += coeff;
        }
        WitnessVector::new(x, label(Some(q)))
    };
    match family {
        WitnessFamily::Unit => (1..=dim).map(|q| shifted(q, &[(0, 1.0)])).collect(),
        WitnessFamily::UnitDifference => {
            (1..=dim).map(|q| shifted(q, &[(0, 1.0), (1, -1.0)])).collect()
        }
        WitnessFamily::StepTwoDifference => {
            (1..=dim).map(|q| shifted(q, &[(0, 1.0), (2, -1.0)])).collect()
        }
        WitnessFamily::Alpha { alpha } => (1..=dim)
            .map(|q| shifted(q, &[(-1, alpha), (0, 1.0), (1, -alpha)]))
            .collect(),
        WitnessFamily::Pattern { pattern } => {
            let mut x = vec![0.0; dim];
            for (slot, &e) in x.iter_mut().zip(pattern.entries()) {
                *slot = e as f64;
            }
            Ok(vec![WitnessVector::new(x, label(None))?])
        }
    }
}
