//! Quantum-state data model: pure states and density matrices, both allowed
//! to be unnormalized.
//!
//! Working with the trace cone instead of the trace-one slice costs nothing:
//! any positive combination of states renormalizes to a convex combination,
//! so normalization can always be deferred to the end of a computation.

use num_complex::Complex64;
use thiserror::Error;

use crate::linalg::{hermitian_eig, ComplexMatrix, LinalgError};

/// Hermiticity tolerance for accepting a density matrix.
pub const HERMITICITY_TOL: f64 = 1e-10;
/// Relative slack on the smallest eigenvalue: feasibility solvers introduce
/// O(1e−10) noise below the exact-PSD boundary.
pub const PSD_SLACK: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum StateError {
    #[error("state has zero (or negative) trace")]
    ZeroTrace,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("pure state must have a positive norm")]
    ZeroVector,
    #[error("invalid density matrix: {0}")]
    Invalid(String),
    #[error("weights must be finite with at least one positive entry")]
    BadWeights,
    #[error("bipartite split {dim_a}x{dim_b} does not factor dimension {dim}")]
    BadFactorization { dim_a: usize, dim_b: usize, dim: usize },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

pub type Result<T> = std::result::Result<T, StateError>;

/// A ket with finite amplitudes and positive norm; normalization is not
/// required.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amplitudes: Vec<Complex64>,
}

impl PureState {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(StateError::ZeroVector);
        }
        if !amplitudes.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(StateError::Invalid("non-finite amplitude".into()));
        }
        let state = PureState { amplitudes };
        if state.norm() <= 0.0 {
            return Err(StateError::ZeroVector);
        }
        Ok(state)
    }

    /// Basis ket `|k⟩` in dimension `dim`.
    pub fn basis(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(StateError::ShapeMismatch(format!("basis index {k} in dimension {dim}")));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[k] = Complex64::new(1.0, 0.0);
        PureState::new(amplitudes)
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalized(&self) -> PureState {
        let n = self.norm();
        PureState { amplitudes: self.amplitudes.iter().map(|&z| z / n).collect() }
    }

    pub fn inner(&self, other: &PureState) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(StateError::ShapeMismatch(format!("{} vs {}", self.dim(), other.dim())));
        }
        Ok(self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum())
    }

    /// Tensor product `self ⊗ other`.
    pub fn kron(&self, other: &PureState) -> PureState {
        let mut amplitudes = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                amplitudes.push(a * b);
            }
        }
        PureState { amplitudes }
    }
}

/// How a state of dimension `dim_a * dim_b` splits into two subsystems.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct BipartiteShape {
    dim_a: usize,
    dim_b: usize,
}

impl BipartiteShape {
    pub fn new(dim_a: usize, dim_b: usize, dim: usize) -> Result<Self> {
        if dim_a == 0 || dim_b == 0 || dim_a * dim_b != dim {
            return Err(StateError::BadFactorization { dim_a, dim_b, dim });
        }
        Ok(BipartiteShape { dim_a, dim_b })
    }

    pub fn dim_a(self) -> usize {
        self.dim_a
    }

    pub fn dim_b(self) -> usize {
        self.dim_b
    }

    /// Amplitudes of `psi` rearranged as the `dim_a x dim_b` coefficient
    /// matrix whose singular values are the Schmidt coefficients.
    pub fn coefficient_matrix(self, psi: &PureState) -> Result<ComplexMatrix> {
        if psi.dim() != self.dim_a * self.dim_b {
            return Err(StateError::ShapeMismatch(format!(
                "state dimension {} vs split {}x{}",
                psi.dim(),
                self.dim_a,
                self.dim_b
            )));
        }
        Ok(ComplexMatrix::new(self.dim_a, self.dim_b, psi.amplitudes().to_vec())?)
    }
}

/// Pass/fail diagnostics for a density-matrix candidate.
#[derive(Clone, Debug, serde::Serialize)]
pub struct ValidationReport {
    pub hermiticity_defect: f64,
    pub min_eigenvalue: f64,
    pub trace: f64,
    pub hermitian_ok: bool,
    pub psd_ok: bool,
    pub trace_ok: bool,
    pub pass: bool,
}

/// Report-only check of the density-matrix invariants: Hermiticity within
/// [`HERMITICITY_TOL`], smallest eigenvalue above `−PSD_SLACK·trace`, and a
/// positive trace. Unnormalized cone elements pass.
pub fn validate(candidate: &ComplexMatrix) -> ValidationReport {
    let defect = candidate.hermitian_defect().unwrap_or(f64::INFINITY);
    let trace = candidate.trace().re;
    let min_eigenvalue = if candidate.is_square() {
        let sym = candidate
            .add(&candidate.adjoint())
            .map(|s| s.scale(Complex64::new(0.5, 0.0)))
            .expect("square matrix");
        hermitian_eig(&sym).map(|s| s.values.last().copied().unwrap_or(0.0)).unwrap_or(f64::NEG_INFINITY)
    } else {
        f64::NEG_INFINITY
    };
    let hermitian_ok = defect <= HERMITICITY_TOL;
    let psd_ok = min_eigenvalue >= -PSD_SLACK * trace.max(0.0) - f64::MIN_POSITIVE;
    let trace_ok = trace > 0.0;
    ValidationReport {
        hermiticity_defect: defect,
        min_eigenvalue,
        trace,
        hermitian_ok,
        psd_ok,
        trace_ok,
        pass: hermitian_ok && psd_ok && trace_ok,
    }
}

/// Hermitian positive-semidefinite matrix with positive trace; trace one is
/// not required (cone element).
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let report = validate(&matrix);
        if !report.pass {
            return Err(StateError::Invalid(format!(
                "hermiticity defect {:.3e}, min eigenvalue {:.3e}, trace {:.6e}",
                report.hermiticity_defect, report.min_eigenvalue, report.trace
            )));
        }
        Ok(DensityMatrix { matrix })
    }

    /// Wraps a matrix that is PSD by construction (e.g. an operator-sum
    /// image), skipping the eigenvalue check. The Hermitian part is enforced.
    pub(crate) fn from_psd_construction(matrix: ComplexMatrix) -> Self {
        let sym = matrix
            .add(&matrix.adjoint())
            .map(|s| s.scale(Complex64::new(0.5, 0.0)))
            .expect("square matrix");
        DensityMatrix { matrix: sym }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.trace() - 1.0).abs() <= tol
    }

    /// Spectral decomposition, eigenvalues descending.
    pub fn spectrum(&self) -> Result<crate::linalg::Spectrum> {
        Ok(hermitian_eig(&self.matrix)?)
    }

    pub fn frobenius_distance(&self, other: &DensityMatrix) -> Result<f64> {
        Ok(self.matrix.sub(&other.matrix)?.frobenius_norm())
    }
}

/// Scales to unit trace; proportionality to the input is exact.
pub fn normalize(rho: &DensityMatrix) -> Result<DensityMatrix> {
    let t = rho.trace();
    if !(t > 0.0) {
        return Err(StateError::ZeroTrace);
    }
    Ok(DensityMatrix { matrix: rho.matrix().scale(Complex64::new(1.0 / t, 0.0)) })
}

/// Weighted sum `Σ wᵢ ρᵢ` of cone elements; PSD and Hermiticity are
/// preserved by construction.
pub fn mix(states: &[DensityMatrix], weights: &[f64]) -> Result<DensityMatrix> {
    if states.is_empty() || states.len() != weights.len() {
        return Err(StateError::ShapeMismatch(format!(
            "{} states vs {} weights",
            states.len(),
            weights.len()
        )));
    }
    if !weights.iter().all(|w| w.is_finite() && *w >= 0.0) || !weights.iter().any(|&w| w > 0.0) {
        return Err(StateError::BadWeights);
    }
    let dim = states[0].dim();
    let mut acc = ComplexMatrix::zeros(dim, dim);
    for (rho, &w) in states.iter().zip(weights) {
        if rho.dim() != dim {
            return Err(StateError::ShapeMismatch(format!("{} vs {}", rho.dim(), dim)));
        }
        acc = acc.add(&rho.matrix().scale(Complex64::new(w, 0.0)))?;
    }
    Ok(DensityMatrix { matrix: acc })
}

/// Projector `|ψ⟩⟨ψ|`; its trace is `‖ψ‖²`.
pub fn from_pure(psi: &PureState) -> DensityMatrix {
    DensityMatrix { matrix: ComplexMatrix::outer(psi.amplitudes(), psi.amplitudes()) }
}

/// Haar-random pure state: complex Gaussian amplitudes, normalized.
pub fn haar_pure(dim: usize, rng: &mut impl rand::Rng) -> PureState {
    use rand_distr::{Distribution, StandardNormal};
    let amps: Vec<Complex64> = (0..dim)
        .map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            Complex64::new(re, im)
        })
        .collect();
    PureState::new(amps).expect("Gaussian draw is almost surely nonzero").normalized()
}

/// Normalized random density matrix `G G† / tr(G G†)` with `G` a complex
/// Gaussian `dim x rank` matrix (Ginibre ensemble).
pub fn random_density(dim: usize, rank: usize, rng: &mut impl rand::Rng) -> DensityMatrix {
    use rand_distr::{Distribution, StandardNormal};
    let rank = rank.max(1);
    let g = ComplexMatrix::from_fn(dim, rank, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        Complex64::new(re, im)
    });
    let gg = g.mul(&g.adjoint()).expect("shapes agree");
    let t = gg.trace().re;
    DensityMatrix { matrix: gg.scale(Complex64::new(1.0 / t, 0.0)) }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn validate_accepts_the_maximally_mixed_qubit() {
        let m = ComplexMatrix::identity(2).scale(c(0.5, 0.0));
        let report = validate(&m);
        assert!(report.pass);
        assert!((report.trace - 1.0).abs() < 1e-14);
    }

    #[test]
    fn validate_rejects_negative_eigenvalue() {
        let m = ComplexMatrix::new(2, 2, vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-0.1, 0.0)]).unwrap();
        let report = validate(&m);
        assert!(!report.pass);
        assert!(!report.psd_ok);
        assert!((report.min_eigenvalue + 0.1).abs() < 1e-12);
    }

    #[test]
    fn validate_accepts_unnormalized_cone_elements() {
        let psi = PureState::basis(2, 0).unwrap();
        let three = from_pure(&psi).matrix().scale(c(3.0, 0.0));
        let report = validate(&three);
        assert!(report.pass);
        assert!((report.trace - 3.0).abs() < 1e-14);
    }

    #[test]
    fn normalize_scales_and_is_idempotent() {
        let psi = PureState::basis(2, 0).unwrap();
        let rho = DensityMatrix::new(from_pure(&psi).matrix().scale(c(3.0, 0.0))).unwrap();
        let n = normalize(&rho).unwrap();
        assert!((n.trace() - 1.0).abs() < 1e-12);
        assert!((n.matrix()[(0, 0)].re - 1.0).abs() < 1e-12);
        let again = normalize(&n).unwrap();
        assert!(again.frobenius_distance(&n).unwrap() < 1e-15);
    }

    #[test]
    fn normalize_matches_the_two_term_recombination() {
        // λ₁ρ₁ + λ₂ρ₂ renormalizes with weights λᵢ·tr(ρᵢ)/Σλⱼtr(ρⱼ)
        let rho1 = from_pure(&PureState::basis(2, 0).unwrap());
        let plus = PureState::new(vec![c(1.0, 0.0), c(1.0, 0.0)]).unwrap().normalized();
        let rho2 = from_pure(&plus);
        let summed = mix(&[rho1.clone(), rho2.clone()], &[1.0, 1.0]).unwrap();
        let normalized = normalize(&summed).unwrap();
        let expected = mix(&[rho1, rho2], &[0.5, 0.5]).unwrap();
        assert!(normalized.frobenius_distance(&expected).unwrap() < 1e-12);
    }

    #[test]
    fn mix_is_linear_and_rejects_bad_weights() {
        let a = from_pure(&PureState::basis(2, 0).unwrap());
        let b = from_pure(&PureState::basis(2, 1).unwrap());
        let m = mix(&[a.clone(), b.clone()], &[0.5, 0.5]).unwrap();
        assert!((m.matrix()[(0, 0)].re - 0.5).abs() < 1e-14);
        assert!((m.matrix()[(1, 1)].re - 0.5).abs() < 1e-14);
        assert!(matches!(mix(&[a.clone(), b.clone()], &[0.0, 0.0]), Err(StateError::BadWeights)));
        assert!(matches!(mix(&[a], &[0.5, 0.5]), Err(StateError::ShapeMismatch(_))));
    }

    #[test]
    fn from_pure_is_rank_one_and_homogeneous() {
        let plus = PureState::new(vec![c(1.0, 0.0), c(1.0, 0.0)]).unwrap().normalized();
        let rho = from_pure(&plus);
        assert!((rho.trace() - 1.0).abs() < 1e-12);
        // direct outer product of (1,1)/√2 has every entry equal to 1/2
        for i in 0..2 {
            for j in 0..2 {
                assert!((rho.matrix()[(i, j)].re - 0.5).abs() < 1e-12);
            }
        }
        let spec = rho.spectrum().unwrap();
        assert_eq!(crate::linalg::eps_rank(&spec.values, 1e-9), 1);

        let double = PureState::new(vec![c(2.0, 0.0), c(0.0, 0.0)]).unwrap();
        let rho = from_pure(&double);
        assert!((rho.matrix()[(0, 0)].re - 4.0).abs() < 1e-12);
        assert!((rho.trace() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn bipartite_shape_validates_factorization() {
        assert!(BipartiteShape::new(2, 2, 4).is_ok());
        assert!(matches!(
            BipartiteShape::new(2, 3, 4),
            Err(StateError::BadFactorization { .. })
        ));
    }
}
