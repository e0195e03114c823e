//! Orbit data of circle actions on positively curved four-manifolds.
//!
//! * [`invariants`]: rational invariant tuples up to dihedral moves and integer translation.
//! * [`seifert`]: Seifert presentations, Euler numbers, fundamental groups and boundary recognition.
//! * [`wcp`]: weighted projective weights from invariant triples.
//! * [`classifier`]: singular graphs in the orbit space and their classification.
//! * [`extent_lab`]: sampled quotient metrics, extents and branched covers.
//!
//! The exact modules are generic over an [`ExactInt`](scalar::ExactInt), the
//! numeric ones over a [`Real`](scalar::Real). The aliases below fix
//! arbitrary-precision integers and `f64`.

pub mod classifier;
pub mod extent_lab;
pub mod invariants;
pub mod lattice;
pub mod presentation;
pub mod rational;
pub mod scalar;
pub mod seifert;
pub mod wcp;

pub use num_bigint::BigInt;

pub type Rational = num_rational::Ratio<BigInt>;
pub type InvariantTuple = invariants::InvariantTuple<BigInt>;
pub type SeifertPresentation = seifert::SeifertPresentation<BigInt>;
pub type WeightTriple = wcp::WeightTriple<BigInt>;
pub type QuotientDescriptor = wcp::QuotientDescriptor<BigInt>;
pub type SingularGraph = classifier::SingularGraph<BigInt>;
pub type ClassificationResult = classifier::ClassificationResult<BigInt>;
pub type SampledMetricSpace = extent_lab::SampledMetricSpace<f64>;
pub type ExtentReport = extent_lab::ExtentReport<f64>;
