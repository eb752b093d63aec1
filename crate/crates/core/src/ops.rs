//! Classical operations in operator-sum (Kraus) form.
//!
//! A linear map is *classical* when it sends every classical state to a
//! classical state. Checking the generators suffices for the whole hull: the
//! map is linear and the hull is convex. The constructors here cover the maps
//! used throughout: pointwise classical functions `A|c⟩ = a(c)|f(c)⟩`,
//! composition, convex combination, the mix-with-a-classical-state channel,
//! and invertible generator permutations (whose inverse is classical by
//! construction).
//!
//! Operations are not required to preserve the trace; results live in the
//! state cone and callers renormalize when they need unit trace.

use num_complex::Complex64;
use thiserror::Error;

use crate::linalg::{eps_rank, hermitian_eig, svd, ComplexMatrix, LinalgError};
use crate::ordering::{preorder_leq_with, OrderError, PreorderOptions, Verdict};
use crate::sets::{membership, ClassicalSetModel, MembershipResult, SetError};
use crate::states::{normalize, DensityMatrix, StateError};

#[derive(Debug, Error)]
pub enum OpError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("mixing weight must lie in [0,1], got {0}")]
    BadWeight(f64),
    #[error("generators are linearly dependent (Gram rank {rank} < {count})")]
    DependentGenerators { rank: usize, count: usize },
    #[error("index {index} out of range for {count} generators")]
    IndexOutOfRange { index: usize, count: usize },
    #[error("coefficients must have unit modulus for an invertible permutation operation")]
    NotUnitModulus,
    #[error("index map is not a permutation")]
    NotPermutation,
    #[error("operation needs a full generator basis (got {count} generators in dimension {dim})")]
    NotFullBasis { count: usize, dim: usize },
    #[error("state to mix with must be normalized (trace deviates by {0:.3e})")]
    NotNormalized(f64),
    #[error("inverse verification failed (identity defect {0:.3e})")]
    InverseDefect(f64),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Set(#[from] SetError),
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Order(#[from] OrderError),
}

pub type Result<T> = std::result::Result<T, OpError>;

/// Linear map `ρ ↦ Σᵢ Aᵢ ρ Aᵢ†`, completely positive by construction.
#[derive(Clone, Debug)]
pub struct ClassicalOperation {
    dim_in: usize,
    dim_out: usize,
    kraus: Vec<ComplexMatrix>,
    label: String,
    inverse: Option<Box<ClassicalOperation>>,
}

impl ClassicalOperation {
    pub fn new(kraus: Vec<ComplexMatrix>, label: impl Into<String>) -> Result<Self> {
        if kraus.is_empty() {
            return Err(OpError::ShapeMismatch("empty Kraus list".into()));
        }
        let dim_out = kraus[0].rows();
        let dim_in = kraus[0].cols();
        if kraus.iter().any(|k| k.rows() != dim_out || k.cols() != dim_in) {
            return Err(OpError::ShapeMismatch("Kraus operators of mixed shape".into()));
        }
        Ok(ClassicalOperation { dim_in, dim_out, kraus, label: label.into(), inverse: None })
    }

    pub fn identity(dim: usize) -> Self {
        ClassicalOperation {
            dim_in: dim,
            dim_out: dim,
            kraus: vec![ComplexMatrix::identity(dim)],
            label: "Id".into(),
            inverse: None,
        }
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn inverse(&self) -> Option<&ClassicalOperation> {
        self.inverse.as_deref()
    }

    /// Linear action on an arbitrary matrix (not restricted to states).
    pub fn apply_raw(&self, m: &ComplexMatrix) -> Result<ComplexMatrix> {
        if m.rows() != self.dim_in || m.cols() != self.dim_in {
            return Err(OpError::ShapeMismatch(format!(
                "{}x{} state vs operation input dimension {}",
                m.rows(),
                m.cols(),
                self.dim_in
            )));
        }
        let mut acc = ComplexMatrix::zeros(self.dim_out, self.dim_out);
        for k in &self.kraus {
            acc = acc.add(&k.mul(m)?.mul(&k.adjoint())?)?;
        }
        Ok(acc)
    }

    /// Largest deviation of the action from `other`'s on the matrix-unit
    /// basis, in Frobenius norm.
    pub fn action_distance(&self, other: &ClassicalOperation) -> Result<f64> {
        if self.dim_in != other.dim_in || self.dim_out != other.dim_out {
            return Err(OpError::ShapeMismatch("operations of different shape".into()));
        }
        let d = self.dim_in;
        let mut worst = 0.0_f64;
        for k in 0..d {
            for l in 0..d {
                let mut unit = ComplexMatrix::zeros(d, d);
                unit[(k, l)] = Complex64::new(1.0, 0.0);
                let diff = self.apply_raw(&unit)?.sub(&other.apply_raw(&unit)?)?.frobenius_norm();
                worst = worst.max(diff);
            }
        }
        Ok(worst)
    }
}

/// Operator-sum action `Σᵢ Aᵢ ρ Aᵢ†`; Hermitian and PSD by construction,
/// trace may shrink.
pub fn apply(op: &ClassicalOperation, rho: &DensityMatrix) -> Result<DensityMatrix> {
    let image = op.apply_raw(rho.matrix())?;
    Ok(DensityMatrix::from_psd_construction(image))
}

/// Per-generator classicality evidence.
#[derive(Clone, Debug)]
pub struct ClassicalityReport {
    pub classical: bool,
    /// Membership result of each generator image (images with vanishing
    /// trace are classical as cone elements and recorded as inside).
    pub per_generator: Vec<MembershipResult>,
}

/// Definition check: `Λ` is classical for the modeled set iff every generator
/// image stays in the hull cone. Linearity extends the verdict to the whole
/// hull.
pub fn check_classical(
    op: &ClassicalOperation,
    set: &ClassicalSetModel,
    tol: f64,
) -> Result<ClassicalityReport> {
    if op.dim_in != set.dim() || op.dim_out != set.dim() {
        return Err(OpError::ShapeMismatch(format!(
            "operation {}→{} vs set dimension {}",
            op.dim_in,
            op.dim_out,
            set.dim()
        )));
    }
    let mut per_generator = Vec::with_capacity(set.len());
    let mut classical = true;
    for i in 0..set.len() {
        let image = apply(op, &set.generator_projector(i))?;
        let result = membership(&image, set, tol)?;
        classical &= result.inside;
        per_generator.push(result);
    }
    Ok(ClassicalityReport { classical, per_generator })
}

/// Builds the single-Kraus operation defined by `A|cᵢ⟩ = aᵢ |c_{f(i)}⟩` on
/// the span of the generators and zero on its orthogonal complement.
///
/// The generators must be linearly independent, otherwise the defining action
/// can be inconsistent and the construction is rejected.
pub fn classical_function_op(
    coefficients: &[Complex64],
    index_map: &[usize],
    set: &ClassicalSetModel,
) -> Result<ClassicalOperation> {
    let n = set.len();
    if coefficients.len() != n || index_map.len() != n {
        return Err(OpError::ShapeMismatch(format!(
            "{} coefficients / {} indices for {} generators",
            coefficients.len(),
            index_map.len(),
            n
        )));
    }
    for &j in index_map {
        if j >= n {
            return Err(OpError::IndexOutOfRange { index: j, count: n });
        }
    }
    let gram = set.gram();
    let gram_rank = eps_rank(&hermitian_eig(&gram)?.values, 1e-9);
    if gram_rank < n {
        return Err(OpError::DependentGenerators { rank: gram_rank, count: n });
    }

    let d = set.dim();
    let s = ComplexMatrix::from_fn(d, n, |i, j| set.generators()[j].amplitudes()[i]);
    let t = ComplexMatrix::from_fn(d, n, |i, j| {
        coefficients[j] * set.generators()[index_map[j]].amplitudes()[i]
    });
    // A = T S⁺ acts as required on span(S) and as zero on its complement
    let pinv = pseudo_inverse(&s)?;
    let a = t.mul(&pinv)?;
    ClassicalOperation::new(vec![a], "function-op")
}

fn pseudo_inverse(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let f = svd(m)?;
    let smax = f.singular_values.first().copied().unwrap_or(0.0);
    let k = f.singular_values.len();
    let mut sigma_inv = ComplexMatrix::zeros(k, k);
    for (i, &s) in f.singular_values.iter().enumerate() {
        if s <= smax * 1e-12 {
            return Err(OpError::DependentGenerators { rank: i, count: k });
        }
        sigma_inv[(i, i)] = Complex64::new(1.0 / s, 0.0);
    }
    Ok(f.v.mul(&sigma_inv)?.mul(&f.u.adjoint())?)
}

/// Composition `Λ₁ ∘ Λ₂`: all pairwise Kraus products.
pub fn compose(l1: &ClassicalOperation, l2: &ClassicalOperation) -> Result<ClassicalOperation> {
    if l1.dim_in != l2.dim_out {
        return Err(OpError::ShapeMismatch(format!(
            "inner dimensions {} vs {}",
            l1.dim_in, l2.dim_out
        )));
    }
    let mut kraus = Vec::with_capacity(l1.kraus.len() * l2.kraus.len());
    for a in &l1.kraus {
        for b in &l2.kraus {
            kraus.push(a.mul(b)?);
        }
    }
    ClassicalOperation::new(kraus, format!("{}∘{}", l1.label, l2.label))
}

/// Convex combination `λΛ₁ + (1−λ)Λ₂`, realized by rescaling both Kraus
/// families.
pub fn convex_combine(
    l1: &ClassicalOperation,
    l2: &ClassicalOperation,
    lambda: f64,
) -> Result<ClassicalOperation> {
    if !(0.0..=1.0).contains(&lambda) || lambda.is_nan() {
        return Err(OpError::BadWeight(lambda));
    }
    if l1.dim_in != l2.dim_in || l1.dim_out != l2.dim_out {
        return Err(OpError::ShapeMismatch("operations of different shape".into()));
    }
    let mut kraus = Vec::new();
    let s1 = Complex64::new(lambda.sqrt(), 0.0);
    let s2 = Complex64::new((1.0 - lambda).sqrt(), 0.0);
    if lambda > 0.0 {
        kraus.extend(l1.kraus.iter().map(|k| k.scale(s1)));
    }
    if lambda < 1.0 {
        kraus.extend(l2.kraus.iter().map(|k| k.scale(s2)));
    }
    ClassicalOperation::new(kraus, format!("{}·{} + {}·{}", lambda, l1.label, 1.0 - lambda, l2.label))
}

/// The mixing channel `ρ ↦ λρ + (1−λ)·tr(ρ)·γ` in operator-sum form, built
/// from the spectral decomposition `γ = Σ wⱼ |gⱼ⟩⟨gⱼ|`:
/// Kraus set `{√λ·Id} ∪ {√((1−λ)wⱼ) |gⱼ⟩⟨eₖ|}`.
pub fn mixing_op(gamma: &DensityMatrix, lambda: f64) -> Result<ClassicalOperation> {
    if !(0.0..=1.0).contains(&lambda) || lambda.is_nan() {
        return Err(OpError::BadWeight(lambda));
    }
    let dev = (gamma.trace() - 1.0).abs();
    if dev > 1e-9 {
        return Err(OpError::NotNormalized(dev));
    }
    let d = gamma.dim();
    let mut kraus = Vec::new();
    if lambda > 0.0 {
        kraus.push(ComplexMatrix::identity(d).scale(Complex64::new(lambda.sqrt(), 0.0)));
    }
    if lambda < 1.0 {
        let spec = gamma.spectrum()?;
        for (j, &w) in spec.values.iter().enumerate() {
            if w <= 1e-14 {
                continue;
            }
            let coeff = ((1.0 - lambda) * w).sqrt();
            let g = spec.vectors.column(j);
            for k in 0..d {
                let mut op = ComplexMatrix::zeros(d, d);
                for (i, &gi) in g.iter().enumerate() {
                    op[(i, k)] = gi * coeff;
                }
                kraus.push(op);
            }
        }
    }
    ClassicalOperation::new(kraus, format!("mix(λ={lambda})"))
}

/// Invertible classical operation permuting a full generator basis with
/// unit-modulus coefficients; the inverse is attached and classical by the
/// same construction.
pub fn invertible_permutation_op(
    phases: &[Complex64],
    permutation: &[usize],
    set: &ClassicalSetModel,
) -> Result<ClassicalOperation> {
    let n = set.len();
    if n != set.dim() {
        return Err(OpError::NotFullBasis { count: n, dim: set.dim() });
    }
    if phases.iter().any(|a| (a.norm() - 1.0).abs() > 1e-12) {
        return Err(OpError::NotUnitModulus);
    }
    let mut seen = vec![false; n];
    for &j in permutation {
        if j >= n || seen[j] {
            return Err(OpError::NotPermutation);
        }
        seen[j] = true;
    }
    if permutation.len() != n {
        return Err(OpError::NotPermutation);
    }

    let mut forward = classical_function_op(phases, permutation, set)?;
    let mut inv_phases = vec![Complex64::new(0.0, 0.0); n];
    let mut inv_map = vec![0usize; n];
    for i in 0..n {
        let j = permutation[i];
        inv_map[j] = i;
        inv_phases[j] = Complex64::new(1.0, 0.0) / phases[i];
    }
    let inverse = classical_function_op(&inv_phases, &inv_map, set)?;

    let both = compose(&forward, &inverse)?;
    let defect = both.action_distance(&ClassicalOperation::identity(n))?;
    if defect > 1e-8 {
        return Err(OpError::InverseDefect(defect));
    }
    forward.label = "permutation-op".into();
    forward.inverse = Some(Box::new(inverse));
    Ok(forward)
}

/// Certificates for order conservation under a classical operation: the
/// preorder before, and the preorder of the normalized images after.
#[derive(Clone, Debug)]
pub struct MonotoneReport {
    pub before: Verdict,
    pub after: Verdict,
}

impl MonotoneReport {
    pub fn conserved(&self) -> bool {
        self.before.is_certified() && self.after.is_certified()
    }
}

/// Re-certifies `ρ ⪯ ρ'` and certifies `Λ(ρ) ⪯ Λ(ρ')` after normalizing the
/// images.
pub fn check_monotone(
    op: &ClassicalOperation,
    rho: &DensityMatrix,
    rho_prime: &DensityMatrix,
    set: &ClassicalSetModel,
    opts: &PreorderOptions,
) -> Result<MonotoneReport> {
    let before = preorder_leq_with(rho, rho_prime, set, opts)?;
    let image = normalize(&apply(op, rho)?)?;
    let image_prime = normalize(&apply(op, rho_prime)?)?;
    let after = preorder_leq_with(&image, &image_prime, set, opts)?;
    Ok(MonotoneReport { before, after })
}
