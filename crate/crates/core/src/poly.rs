//! Evaluation of the Hankel form `f(x) = sum v_{i_1+..+i_m-m} x_{i_1} .. x_{i_m}`.
//!
//! Grouping the multi-index sum by `s = i_1 + .. + i_m - m` turns the form into
//! `f(x) = sum_s v_s c_s`, where `c` is the coefficient vector of
//! `(x_1 + x_2 z + .. + x_n z^{n-1})^m`. The fast routines compute `c` by
//! repeated direct convolution; [`eval_naive`] enumerates all `n^m` terms.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::{dense_size, CirculantSpec, GeneratingVector, WitnessLabel, WitnessVector};

fn convolve<T: Num + Clone>(a: &[T], b: &[T]) -> Vec<T> {
    let mut out = vec![T::zero(); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            out[i + j] = out[i + j].clone() + ai.clone() * bj.clone();
        }
    }
    out
}

/// `power`-fold self-convolution of `x`; `[1]` for `power = 0`.
fn convolution_power<T: Num + Clone>(x: &[T], power: usize) -> Vec<T> {
    let mut acc = vec![T::one()];
    for _ in 0..power {
        acc = convolve(&acc, x);
    }
    acc
}

fn dot<T: Num + Clone>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

fn check_dim(gen: &GeneratingVector, x: &[f64]) -> Result<()> {
    if x.len() != gen.dim() {
        return Err(Error::DimensionMismatch { expected: gen.dim(), got: x.len() });
    }
    Ok(())
}

/// Multi-index sums of `x` grouped by `s = i_1 + .. + i_m - m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientProfile {
    pub order: usize,
    pub coeffs: Vec<f64>,
}

impl CoefficientProfile {
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }
}

/// Coefficients of `(x_1 + x_2 z + .. + x_n z^{n-1})^m`; length `(n-1)m+1`.
pub fn coefficient_profile(x: &[f64], order: usize) -> CoefficientProfile {
    CoefficientProfile { order, coeffs: convolution_power(x, order) }
}

/// Direct enumeration over all `n^m` index tuples. Refuses when `n^m > cap`.
pub fn eval_naive(gen: &GeneratingVector, x: &[f64], cap: usize) -> Result<f64> {
    check_dim(gen, x)?;
    let (order, dim) = (gen.order(), gen.dim());
    let size = dense_size(order, dim)
        .filter(|&s| s <= cap)
        .ok_or(Error::DenseCapExceeded { dim, order, cap })?;
    let v = gen.values();
    let mut digits = vec![0usize; order];
    let mut total = 0.0;
    for _ in 0..size {
        let sum: usize = digits.iter().sum();
        let product: f64 = digits.iter().map(|&d| x[d]).product();
        total += v[sum] * product;
        for d in digits.iter_mut().rev() {
            if *d + 1 < dim {
                *d += 1;
                break;
            }
            *d = 0;
        }
    }
    Ok(total)
}

/// `f(x) = <v, c(x)>` through the coefficient profile.
pub fn eval_fast(gen: &GeneratingVector, x: &[f64]) -> Result<f64> {
    check_dim(gen, x)?;
    Ok(dot(gen.values(), &convolution_power(x, gen.order())))
}

/// Sum of the absolute values of every term of the form at `x`,
/// `sum_s |v_s| c_s(|x|)`. This is the natural scale for relative error
/// statements about `f(x)`.
pub fn eval_magnitude(gen: &GeneratingVector, x: &[f64]) -> Result<f64> {
    check_dim(gen, x)?;
    let abs_x: Vec<f64> = x.iter().map(|v| v.abs()).collect();
    let profile = convolution_power(&abs_x, gen.order());
    Ok(gen.values().iter().zip(&profile).map(|(v, c)| v.abs() * c).sum())
}

/// `f(x)` together with its gradient.
///
/// `df/dx_i = m sum_s v_s d_{s-i+1}` where `d` is the `(m-1)`-fold convolution power.
pub fn eval_with_gradient(gen: &GeneratingVector, x: &[f64]) -> Result<(f64, Vec<f64>)> {
    check_dim(gen, x)?;
    let order = gen.order();
    let v = gen.values();
    let partial = convolution_power(x, order - 1);
    let value = dot(v, &convolve(&partial, x));
    let scale = order as f64;
    let grad = (0..x.len())
        .map(|i| scale * dot(&v[i..i + partial.len()], &partial))
        .collect();
    Ok((value, grad))
}

pub fn gradient(gen: &GeneratingVector, x: &[f64]) -> Result<Vec<f64>> {
    eval_with_gradient(gen, x).map(|(_, g)| g)
}

/// Residue-class parts `f_j(x)` for `j = 0..r-1`: the sum of all monomials
/// `x_{i_1} .. x_{i_m}` with `i_1 + .. + i_m = j (mod r)`.
///
/// `sum_j f_j(x) = (x_1 + .. + x_n)^m`, and `f(x) = sum_j v_{(j-m) mod r} f_j(x)`.
pub fn residue_components(spec: &CirculantSpec, x: &[f64]) -> Result<Vec<f64>> {
    if x.len() != spec.dim() {
        return Err(Error::DimensionMismatch { expected: spec.dim(), got: x.len() });
    }
    let (order, r) = (spec.order(), spec.index());
    let profile = convolution_power(x, order);
    let mut parts = vec![0.0; r];
    for (s, c) in profile.iter().enumerate() {
        parts[(s + order) % r] += c;
    }
    Ok(parts)
}

/// A line of points `x(alpha) = base + alpha * slope`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaFamily {
    pub base: Vec<f64>,
    pub slope: Vec<f64>,
}

impl AlphaFamily {
    pub fn new(base: Vec<f64>, slope: Vec<f64>) -> Result<Self> {
        if base.len() != slope.len() {
            return Err(Error::DimensionMismatch { expected: base.len(), got: slope.len() });
        }
        Ok(Self { base, slope })
    }

    /// `alpha e_{q-1} + e_q - alpha e_{q+1}` with cyclic wrap, `q` 1-based.
    pub fn shifted(dim: usize, q: usize) -> Result<Self> {
        if dim < 3 {
            return Err(Error::FamilyTooSmall { family: "alpha", min: 3, dim });
        }
        assert!((1..=dim).contains(&q), "shift q = {q} outside 1..={dim}");
        let mut base = vec![0.0; dim];
        let mut slope = vec![0.0; dim];
        base[q - 1] = 1.0;
        slope[(q + dim - 2) % dim] += 1.0;
        slope[q % dim] -= 1.0;
        Ok(Self { base, slope })
    }

    pub fn dim(&self) -> usize {
        self.base.len()
    }

    pub fn at(&self, alpha: f64) -> Vec<f64> {
        self.base.iter().zip(&self.slope).map(|(b, s)| b + alpha * s).collect()
    }

    pub fn witness(&self, alpha: f64, label: WitnessLabel) -> Result<WitnessVector> {
        WitnessVector::new(self.at(alpha), label)
    }
}

/// `f(x(alpha))` as a polynomial in `alpha`, lowest degree first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaPolynomial {
    pub coeffs: Vec<f64>,
    /// Whether the coefficients were obtained in exact rational arithmetic.
    pub exact: bool,
}

impl AlphaPolynomial {
    pub fn eval(&self, alpha: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * alpha + c)
    }
}

/// Converts to an exact rational when the value is a ratio of 64-bit integers.
fn small_rational(value: f64) -> Option<BigRational> {
    let q = BigRational::from_float(value)?;
    let fits = |n: &BigInt| n.to_i64().is_some();
    (fits(q.numer()) && fits(q.denom())).then_some(q)
}

/// Monomial coefficients of the polynomial through `(nodes[i], values[i])`,
/// via Newton divided differences.
fn interpolate<T: Num + Clone>(nodes: &[T], values: &[T]) -> Vec<T> {
    let n = nodes.len();
    let mut dd = values.to_vec();
    for level in 1..n {
        for i in (level..n).rev() {
            let denom = nodes[i].clone() - nodes[i - level].clone();
            assert!(!denom.is_zero(), "interpolation nodes must be distinct");
            dd[i] = (dd[i].clone() - dd[i - 1].clone()) / denom;
        }
    }
    // Horner expansion of the Newton form
    let mut coeffs = vec![T::zero(); n];
    for k in (0..n).rev() {
        let mut shifted = vec![T::zero(); n];
        for j in 0..n {
            if j + 1 < n {
                shifted[j + 1] = shifted[j + 1].clone() + coeffs[j].clone();
            }
            shifted[j] = shifted[j].clone() - nodes[k].clone() * coeffs[j].clone();
        }
        shifted[0] = shifted[0].clone() + dd[k].clone();
        coeffs = shifted;
    }
    coeffs
}

fn alpha_coefficients_in<T, F>(gen: &GeneratingVector, family: &AlphaFamily, lift: F) -> Option<Vec<T>>
where
    T: Num + Clone + FromPrimitive,
    F: Fn(f64) -> Option<T>,
{
    let v: Vec<T> = gen.values().iter().map(|&x| lift(x)).collect::<Option<_>>()?;
    let base: Vec<T> = family.base.iter().map(|&x| lift(x)).collect::<Option<_>>()?;
    let slope: Vec<T> = family.slope.iter().map(|&x| lift(x)).collect::<Option<_>>()?;
    let order = gen.order();
    let nodes: Vec<T> = (0..=order).map(|a| T::from_usize(a).unwrap()).collect();
    let values: Vec<T> = nodes
        .iter()
        .map(|alpha| {
            let x: Vec<T> = base
                .iter()
                .zip(&slope)
                .map(|(b, s)| b.clone() + alpha.clone() * s.clone())
                .collect();
            dot(&v, &convolution_power(&x, order))
        })
        .collect();
    Some(interpolate(&nodes, &values))
}

/// Coefficients of `f(base + alpha * slope)` in `alpha` (degree at most `m`),
/// recovered by interpolation at `alpha = 0, 1, .., m`.
///
/// Exact rational arithmetic is used when every input value is a ratio of
/// 64-bit integers; floating point otherwise.
pub fn alpha_coefficients(gen: &GeneratingVector, family: &AlphaFamily) -> Result<AlphaPolynomial> {
    if family.dim() != gen.dim() {
        return Err(Error::DimensionMismatch { expected: gen.dim(), got: family.dim() });
    }
    if let Some(exact) = alpha_coefficients_in::<BigRational, _>(gen, family, small_rational) {
        let coeffs = exact.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect();
        return Ok(AlphaPolynomial { coeffs, exact: true });
    }
    let coeffs = alpha_coefficients_in::<f64, _>(gen, family, Some)
        .expect("floating point lift is total");
    Ok(AlphaPolynomial { coeffs, exact: false })
}
