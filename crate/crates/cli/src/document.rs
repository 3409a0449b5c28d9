//! Tensor documents.
//!
//! ```json
//! { "m": 4, "n": 4, "r": 2, "seed": ["1", "1/2"], "tolerance": "1e-12" }
//! { "m": 2, "n": 2, "genvec": [1, 0, 1] }
//! ```
//!
//! Numbers may be JSON numbers or strings in any form [`parse_real`] accepts.
//! Exactly one of `seed` (with `r`) or `genvec` must be present; unknown
//! fields are rejected.

use anticirc::{CirculantSpec, GeneratingVector};
use serde::de::{self, Deserializer, Visitor};
use serde::Deserialize;

use crate::parse::parse_real;
use crate::CliError;

/// A real accepted either as a JSON number or as a string token.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Real(f64);

impl<'de> Deserialize<'de> for Real {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct RealVisitor;

        impl Visitor<'_> for RealVisitor {
            type Value = Real;

            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("a number or a numeric string")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Real, E> {
                Ok(Real(v))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Real, E> {
                Ok(Real(v as f64))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Real, E> {
                Ok(Real(v as f64))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Real, E> {
                parse_real(v).map(Real).map_err(|e| E::custom(e.message()))
            }
        }

        d.deserialize_any(RealVisitor)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDocument {
    m: usize,
    n: usize,
    r: Option<usize>,
    seed: Option<Vec<Real>>,
    genvec: Option<Vec<Real>>,
    tolerance: Option<Real>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Tensor {
    Circulant(CirculantSpec),
    Generating(GeneratingVector),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TensorDocument {
    pub tensor: Tensor,
    pub tolerance: Option<f64>,
}

impl TensorDocument {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let raw: RawDocument = serde_json::from_str(text).map_err(|e| CliError::Input(format!("document: {e}")))?;
        let reals = |v: Vec<Real>| v.into_iter().map(|r| r.0).collect::<Vec<_>>();
        let invalid = |e: anticirc::Error| CliError::Input(format!("document: {e}"));
        let tensor = match (raw.r, raw.seed, raw.genvec) {
            (Some(r), Some(seed), None) => {
                Tensor::Circulant(CirculantSpec::new(raw.m, raw.n, r, reals(seed)).map_err(invalid)?)
            }
            (None, None, Some(genvec)) => {
                Tensor::Generating(GeneratingVector::new(raw.m, raw.n, reals(genvec)).map_err(invalid)?)
            }
            (_, Some(_), Some(_)) => return Err(CliError::Input("document: give either seed or genvec, not both".into())),
            (Some(_), None, _) => return Err(CliError::Input("document: r requires a seed".into())),
            (None, Some(_), None) => return Err(CliError::Input("document: seed requires r".into())),
            (None, None, None) => return Err(CliError::Input("document: missing seed or genvec".into())),
        };
        let tolerance = raw.tolerance.map(|t| t.0);
        if let Some(t) = tolerance {
            if t < 0.0 {
                return Err(CliError::Input(format!("document: negative tolerance {t}")));
            }
        }
        Ok(Self { tensor, tolerance })
    }

    pub fn generating(&self) -> GeneratingVector {
        match &self.tensor {
            Tensor::Circulant(spec) => spec.expand(),
            Tensor::Generating(gen) => gen.clone(),
        }
    }

    pub fn dim(&self) -> usize {
        match &self.tensor {
            Tensor::Circulant(spec) => spec.dim(),
            Tensor::Generating(gen) => gen.dim(),
        }
    }
}
