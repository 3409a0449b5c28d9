//! Generalized anti-circulant Hankel tensors: evaluation, exact
//! combinatorics, and positive semi-definiteness decisions with
//! independently checkable certificates.
//!
//! A Hankel tensor of order `m` and dimension `n` is determined by its
//! generating vector `v` of length `(n - 1) m + 1`; the tensor is generalized
//! anti-circulant with circulant index `r` when `v_i = v_{i + r}`.

pub mod classifier;
pub mod combinatorics;
pub mod error;
pub mod oracle;
pub mod par;
pub mod poly;
pub mod tensor;

pub use classifier::{classify, classify_generating, CaseTag, Certificate, ClassifyOptions, Status, Tolerances, Verdict};
pub use error::{Error, Result};
pub use par::Execution;
pub use tensor::{CirculantSpec, GeneratingVector, HankelMatrix, HankelTensor, WitnessVector};
