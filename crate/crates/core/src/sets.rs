//! Finite-generator models of the convex set of classical states.
//!
//! The ideal classical set is an arbitrary closed convex set with no
//! computational handle, so it is modeled here as the convex hull of finitely
//! many pure-state projectors. Membership (and everything downstream: the
//! preorder, classicality of operations, measure lower bounds) then reduces
//! to nonnegative least squares and is decided *relative to this model*:
//! refining the generator family only ever enlarges the hull, so an "inside"
//! verdict is conclusive while "outside" means outside the model at the given
//! tolerance.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::linalg::{hermitian_coords, nnls_feasible, ComplexMatrix, LinalgError, RealMatrix};
use crate::states::{from_pure, haar_pure, DensityMatrix, PureState, StateError};

/// Weight of the trace-constraint row relative to the Frobenius rows of the
/// membership system. Large enough to pin the weight sum without a second
/// solver stage; small enough not to swamp the least-squares conditioning.
pub const TRACE_ROW_WEIGHT: f64 = 1e3;

/// Default membership tolerance (relative to the trace): above solver noise,
/// below every physical scale exercised in the tests.
pub const DEFAULT_MEMBERSHIP_TOL: f64 = 1e-7;

/// Dual-variable tolerance handed to the NNLS kernel.
const NNLS_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum SetError {
    #[error("a classical set needs at least one generator")]
    EmptySet,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("Fock cutoff n_max={n_max} too small for |alpha|^2={alpha_sq:.3} (need |alpha|^2 <= n_max/4)")]
    TruncationTooSmall { n_max: usize, alpha_sq: f64 },
    #[error("Fock cutoff must be at least 1")]
    BadCutoff,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    State(#[from] StateError),
}

pub type Result<T> = std::result::Result<T, SetError>;

/// How the generator family was constructed.
#[derive(Clone, Debug, PartialEq)]
pub enum SetKind {
    CoherentGrid { n_max: usize, alphas: Vec<Complex64> },
    ProductGrid { dim_a: usize, dim_b: usize, count: usize, seed: u64 },
    Custom,
}

impl SetKind {
    pub fn tag(&self) -> &'static str {
        match self {
            SetKind::CoherentGrid { .. } => "coherent-grid",
            SetKind::ProductGrid { .. } => "product-grid",
            SetKind::Custom => "custom",
        }
    }
}

/// Convex hull of the projectors of a finite family of normalized pure
/// classical generators.
#[derive(Clone, Debug)]
pub struct ClassicalSetModel {
    dim: usize,
    generators: Vec<PureState>,
    kind: SetKind,
    // cached realified projector coordinates, one column per generator
    coords: Vec<Vec<f64>>,
    // cached design matrix (coordinate rows + trace row at TRACE_ROW_WEIGHT)
    design: RealMatrix,
}

impl ClassicalSetModel {
    fn build(generators: Vec<PureState>, kind: SetKind) -> Result<Self> {
        if generators.is_empty() {
            return Err(SetError::EmptySet);
        }
        let dim = generators[0].dim();
        if generators.iter().any(|g| g.dim() != dim) {
            return Err(SetError::ShapeMismatch("generators of mixed dimension".into()));
        }
        let generators: Vec<PureState> = generators.iter().map(PureState::normalized).collect();
        let coords: Vec<Vec<f64>> = generators
            .iter()
            .map(|g| hermitian_coords(from_pure(g).matrix()))
            .collect();
        let design = design_matrix(&coords, TRACE_ROW_WEIGHT)?;
        Ok(ClassicalSetModel { dim, generators, kind, coords, design })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[PureState] {
        &self.generators
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn kind(&self) -> &SetKind {
        &self.kind
    }

    pub fn generator_projector(&self, i: usize) -> DensityMatrix {
        from_pure(&self.generators[i])
    }

    /// Gram matrix `⟨gᵢ|gⱼ⟩` of the generators.
    pub fn gram(&self) -> ComplexMatrix {
        let n = self.generators.len();
        ComplexMatrix::from_fn(n, n, |i, j| {
            self.generators[i].inner(&self.generators[j]).expect("uniform dimension")
        })
    }

    /// Best nonnegative combination of generator projectors approximating a
    /// Hermitian `target` whose weights sum to `required_sum` (enforced as a
    /// weighted row). Returns the weights and the Frobenius-unit residual,
    /// with the sum row excluded from the reported residual.
    pub fn fit_cone_combination(
        &self,
        target: &ComplexMatrix,
        required_sum: f64,
        trace_weight: f64,
    ) -> Result<(Vec<f64>, f64)> {
        if !target.is_square() || target.rows() != self.dim {
            return Err(SetError::ShapeMismatch(format!(
                "{}x{} target vs set dimension {}",
                target.rows(),
                target.cols(),
                self.dim
            )));
        }
        let b_coords = hermitian_coords(target);
        let rebuilt;
        let a = if trace_weight == TRACE_ROW_WEIGHT {
            &self.design
        } else {
            rebuilt = design_matrix(&self.coords, trace_weight)?;
            &rebuilt
        };
        let mut b = b_coords.clone();
        b.push(trace_weight * required_sum);
        let (weights, _) = nnls_feasible(a, &b, NNLS_TOL)?;

        // residual in Frobenius units, without the sum row
        let mut recon = vec![0.0; b_coords.len()];
        for (col, &w) in self.coords.iter().zip(&weights) {
            if w > 0.0 {
                for (r, &c) in recon.iter_mut().zip(col) {
                    *r += w * c;
                }
            }
        }
        let residual = b_coords
            .iter()
            .zip(&recon)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt();
        Ok((weights, residual))
    }
}

fn design_matrix(coords: &[Vec<f64>], trace_weight: f64) -> Result<RealMatrix> {
    let rows = coords[0].len() + 1;
    let mut columns = Vec::with_capacity(coords.len());
    for col in coords {
        let mut c = Vec::with_capacity(rows);
        c.extend_from_slice(col);
        c.push(trace_weight); // generators are normalized: trace row is all ones
        columns.push(c);
    }
    Ok(RealMatrix::from_columns(&columns)?)
}

/// Certificate of (approximate) hull membership.
#[derive(Clone, Debug)]
pub struct MembershipResult {
    pub inside: bool,
    /// Nonnegative weights over the generators; sums to the trace of the
    /// tested state when inside.
    pub weights: Vec<f64>,
    /// Frobenius reconstruction residual.
    pub residual: f64,
}

/// Tests `ρ ∈ cone(C)`: nonnegative generator weights summing to `tr ρ` that
/// reconstruct `ρ` within `tol · tr ρ`.
pub fn membership(rho: &DensityMatrix, set: &ClassicalSetModel, tol: f64) -> Result<MembershipResult> {
    membership_weighted(rho, set, tol, TRACE_ROW_WEIGHT)
}

/// [`membership`] with an explicit trace-row weight.
pub fn membership_weighted(
    rho: &DensityMatrix,
    set: &ClassicalSetModel,
    tol: f64,
    trace_weight: f64,
) -> Result<MembershipResult> {
    let trace = rho.trace();
    let (weights, residual) = set.fit_cone_combination(rho.matrix(), trace, trace_weight)?;
    Ok(MembershipResult { inside: residual <= tol * trace, weights, residual })
}

/// Truncated coherent states `|α⟩ ∝ Σ_{n≤n_max} αⁿ/√(n!) |n⟩` over the given
/// amplitudes; duplicates (within 1e−12) are removed.
///
/// Truncation quality requires `|α|² ≤ n_max/4`.
pub fn coherent_grid(n_max: usize, alphas: &[Complex64]) -> Result<ClassicalSetModel> {
    if n_max < 1 {
        return Err(SetError::BadCutoff);
    }
    if alphas.is_empty() {
        return Err(SetError::EmptySet);
    }
    for alpha in alphas {
        let alpha_sq = alpha.norm_sqr();
        if alpha_sq > n_max as f64 / 4.0 {
            return Err(SetError::TruncationTooSmall { n_max, alpha_sq });
        }
    }
    let mut unique: Vec<Complex64> = Vec::new();
    for &a in alphas {
        if !unique.iter().any(|&u| (u - a).norm() <= 1e-12) {
            unique.push(a);
        }
    }
    let generators: Result<Vec<PureState>> = unique
        .iter()
        .map(|&alpha| {
            let mut amps = Vec::with_capacity(n_max + 1);
            let mut term = Complex64::new(1.0, 0.0);
            amps.push(term);
            for n in 1..=n_max {
                term *= alpha / (n as f64).sqrt();
                amps.push(term);
            }
            Ok(PureState::new(amps)?.normalized())
        })
        .collect();
    ClassicalSetModel::build(generators?, SetKind::CoherentGrid { n_max, alphas: unique })
}

/// Haar-random product-state generators `|a⟩⊗|b⟩`, deterministic for a fixed
/// seed.
///
/// For the hull to have full affine dimension, `count` should be at least
/// `(dim_a·dim_b)²`; smaller families are accepted but model a thinner set.
pub fn product_grid(dim_a: usize, dim_b: usize, count: usize, seed: u64) -> Result<ClassicalSetModel> {
    if dim_a == 0 || dim_b == 0 || count == 0 {
        return Err(SetError::EmptySet);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut generators = Vec::with_capacity(count);
    for _ in 0..count {
        let a = haar_pure(dim_a, &mut rng);
        let b = haar_pure(dim_b, &mut rng);
        generators.push(a.kron(&b));
    }
    ClassicalSetModel::build(generators, SetKind::ProductGrid { dim_a, dim_b, count, seed })
}

/// Hull of caller-supplied pure generators (normalized copies are stored).
pub fn custom_set(generators: &[PureState]) -> Result<ClassicalSetModel> {
    if generators.is_empty() {
        return Err(SetError::EmptySet);
    }
    ClassicalSetModel::build(generators.to_vec(), SetKind::Custom)
}
