//! Numerical geometry of sampled orbit spaces S³/(T¹ × Γ): quotient metrics,
//! q-extents, double branched covers and the smallness conditions.
//!
//! Everything is generic over [`Real`](crate::scalar::Real). Parallel work is
//! split into independent items combined by order-independent reductions, so
//! results do not depend on the number of threads.

pub mod action;
pub mod cover;
pub mod extent;
pub mod linalg;
pub mod qprime;
pub mod space;

pub use action::{GammaSpec, Group, IsometricActionSpec, QuotientMetric};
pub use cover::{certified_cover, double_branched_cover, BranchedCover, CoverCertificate};
pub use extent::{compare_extents, extent, is_small, ExtentGap, ExtentMethod, ExtentReport, Smallness};
pub use qprime::{check_condition_qprime, Check, QPrimeReport};
pub use space::{read_matrix, sample_quotient, sample_round_sphere, MarkedPoint, SampledMetricSpace, TriangleCheck};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LabError {
    #[error("circle weights ({0}, {1}) must be nonzero and coprime")]
    Weights(i64, i64),
    #[error("{0} samples requested, at least {1} needed")]
    TooFewSamples(usize, usize),
    #[error("unknown group preset {0:?}")]
    UnknownPreset(String),
    #[error("group element {0} is not orthogonal")]
    NotOrthogonal(usize),
    #[error("group list is not closed under composition")]
    NotClosed,
    #[error("group element {0} does not normalize the circle")]
    NotNormalizing(usize),
    #[error("distance matrix has {0} entries for {1} points")]
    Shape(usize, usize),
    #[error("marked index {0} out of range")]
    MarkedIndex(usize),
    #[error("not a metric: {0}")]
    NotAMetric(String),
    #[error("extent order {0} out of range for {1} points")]
    ExtentOrder(usize, usize),
    #[error("branch points {0} and {1} coincide")]
    BranchCoincide(usize, usize),
    #[error("branch points {0} and {1} must both be marked")]
    BranchNotMarked(usize, usize),
    #[error("neighbour graph is disconnected")]
    Disconnected,
    #[error("fine sample does not extend the coarse sample")]
    NotNested,
    #[error("{0}")]
    Io(String),
}
