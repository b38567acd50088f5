//! Finite-dimensional JB-algebras, their weighted operator means and
//! perspectives, singular-integral representations of `x^p`, `log x` and the
//! geometric mean, and a seeded harness that checks the associated Loewner-order
//! inequalities numerically.

pub mod algebra;
pub mod error;
pub mod harness;
pub mod means;
pub mod octonion;
pub mod quadrature;
pub mod spectral;

pub use algebra::{AlgebraDescriptor, AlgebraElement, AlgebraKind, PositiveGenSpec};
pub use error::{Error, Result};
pub use harness::{Check, SuiteConfig, SuiteReport, TrialRecord, Verdict};
pub use means::{MeanFamily, MeanKind, PerspectiveSpec, SpechtParams};
pub use octonion::Octonion;
pub use quadrature::{FunctionFamily, ProbeRecord, QuadratureConfig, Scheme};
pub use spectral::{LoewnerReport, LoewnerVerdict, ScalarFunction, SpectralDecomposition};
