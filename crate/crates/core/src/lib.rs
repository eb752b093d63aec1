//! Ordering and quantification of nonclassicality for finite-dimensional
//! quantum states.
//!
//! Nonclassicality is always judged *relative to* a convex set of classical
//! states. This crate models that set as the convex hull of a finite family
//! of pure classical generators, and provides:
//!
//! - the mixture preorder `ρ ⪯ ρ'` (ρ is a classical mixture of ρ' and a
//!   classical state) decided by linear feasibility, with certificates
//!   ([`ordering`]);
//! - classical operations in operator-sum form and their verification
//!   ([`ops`]);
//! - the superposition-rank measure `r(ψ)`, the convex-roof bound pair
//!   `μ(ρ)`, and the compression map `f(μ) = (2/π)·arctan μ` ([`measures`]);
//! - the planar toy geometry demonstrating that norm distances order points
//!   ambiguously ([`toy`]);
//! - the small dense linear-algebra kernels everything runs on ([`linalg`]).
//!
//! All verdicts that depend on the classical set are relative to the finite
//! generator model: an infeasible answer means "infeasible within this model
//! at this tolerance", not a disproof for the ideal set.

pub mod io;
pub mod linalg;
pub mod measures;
pub mod ops;
pub mod ordering;
pub mod sets;
pub mod states;
pub mod suites;
pub mod toy;

pub use linalg::{ComplexMatrix, PNorm, RealMatrix, Spectrum, SvdResult};
pub use measures::{MeasureReport, MuBound, Rank};
pub use ops::ClassicalOperation;
pub use ordering::{PreorderCertificate, Verdict};
pub use sets::{ClassicalSetModel, MembershipResult, SetKind};
pub use states::{BipartiteShape, DensityMatrix, PureState};

/// Default tolerances shared by the solvers and the CLI.
///
/// The underlying theory assumes exact states; every threshold here exists
/// only to absorb floating-point noise from the feasibility kernels and is
/// configurable at the call sites that take a tolerance.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Tolerances {
    /// Hull membership: inside iff Frobenius residual <= `membership * trace`.
    pub membership: f64,
    /// Preorder feasibility at a fixed mixing parameter (absolute, Frobenius).
    pub preorder: f64,
    /// Relative threshold for counting singular values in numerical ranks.
    pub rank: f64,
    /// Span membership residual for the dictionary superposition rank.
    pub span: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { membership: 1e-7, preorder: 1e-7, rank: 1e-9, span: 1e-8 }
    }
}
