//! Nonclassicality quantification.
//!
//! The central quantity is the superposition rank `r(ψ)`: the minimal number
//! of pure classical states whose superposition equals ψ. For bipartite
//! systems with product states as the classical dictionary this is the
//! Schmidt rank. Its convex-roof extension to mixed states,
//! `μ(ρ) = inf over decompositions of (max member rank) − 1`, is reported as
//! a certified bound pair: the exact roof is computationally hard and a
//! point estimate would be dishonest. The lower bound is the membership
//! dichotomy (0 inside the model hull, 1 outside); the upper bound comes from
//! a seeded search over ensemble decompositions, every one of which arises
//! from an isometry applied to the eigen-ensemble.
//!
//! `f(μ) = (2/π)·arctan(μ)` compresses the result into `[0,1]`, with the
//! infinite marker mapping to 1.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{
    eps_rank, hermitian_eig, schatten_norm, svd, ComplexMatrix, LinalgError, PNorm,
};
use crate::sets::{membership, ClassicalSetModel, SetError};
use crate::states::{haar_pure, BipartiteShape, DensityMatrix, PureState, StateError};
use crate::Tolerances;

#[derive(Debug, Error)]
pub enum MeasureError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("state must be normalized (deviation {0:.3e})")]
    NotNormalized(f64),
    #[error("subset-search cap must lie in 1..=12, got {0}")]
    BadCap(usize),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Set(#[from] SetError),
    #[error(transparent)]
    State(#[from] StateError),
}

pub type Result<T> = std::result::Result<T, MeasureError>;

/// A count that may be infinite. The infinite marker is explicit: it is never
/// encoded as a sentinel number.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Rank {
    Finite(usize),
    Infinite,
}

impl Rank {
    pub fn is_finite(&self) -> bool {
        matches!(self, Rank::Finite(_))
    }

    pub fn finite(&self) -> Option<usize> {
        match self {
            Rank::Finite(k) => Some(*k),
            Rank::Infinite => None,
        }
    }

    /// `r − 1`, saturating at zero; infinity stays infinite.
    pub fn minus_one(&self) -> Rank {
        match self {
            Rank::Finite(k) => Rank::Finite(k.saturating_sub(1)),
            Rank::Infinite => Rank::Infinite,
        }
    }
}

impl std::fmt::Display for Rank {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Rank::Finite(k) => write!(f, "{k}"),
            Rank::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for Rank {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Rank::Finite(k) => s.serialize_u64(*k as u64),
            Rank::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Rank {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(u64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(k) => Ok(Rank::Finite(k as usize)),
            Raw::Text(t) if t == "inf" => Ok(Rank::Infinite),
            Raw::Text(t) => Err(serde::de::Error::custom(format!("bad rank marker {t:?}"))),
        }
    }
}

/// Bound on the convex-roof measure μ.
pub type MuBound = Rank;

/// Which notion of "classical dictionary" the rank is computed against.
#[derive(Clone, Copy, Debug)]
pub enum RankBasis<'a> {
    /// Span rank over a finite dictionary of classical generators.
    Dictionary(&'a ClassicalSetModel),
    /// Schmidt rank across a fixed bipartition.
    Bipartite(BipartiteShape),
}

impl RankBasis<'_> {
    fn describe(&self) -> String {
        match self {
            RankBasis::Dictionary(set) => {
                format!("{} dim={} generators={}", set.kind().tag(), set.dim(), set.len())
            }
            RankBasis::Bipartite(shape) => format!("bipartite {}x{}", shape.dim_a(), shape.dim_b()),
        }
    }
}

/// One member of a certifying ensemble decomposition.
#[derive(Clone, Debug)]
pub struct EnsembleMember {
    pub probability: f64,
    pub state: PureState,
}

/// Measure evaluation result: the rank (pure inputs), the μ bound pair, the
/// compressed value, and the decomposition certifying the upper bound.
#[derive(Clone, Debug)]
pub struct MeasureReport {
    /// Superposition rank; only set when the input was pure.
    pub r: Option<Rank>,
    pub mu_lower: MuBound,
    pub mu_upper: MuBound,
    /// `(2/π)·arctan(mu_upper)`.
    pub f_mu: f64,
    /// Decomposition achieving `mu_upper`; reconstructs the state within
    /// 1e−8.
    pub certificate: Vec<EnsembleMember>,
    /// Description of the classical model the verdict is relative to.
    pub model: String,
}

const NORMALIZATION_TOL: f64 = 1e-9;
pub const MAX_CAP: usize = 12;

/// `(2/π)·arctan(μ)`, the compression of μ into `[0,1]`; infinity maps to 1.
pub fn f_map(mu: MuBound) -> f64 {
    match mu {
        Rank::Finite(m) => (m as f64).atan() / std::f64::consts::FRAC_PI_2,
        Rank::Infinite => 1.0,
    }
}

/// Least-squares residual of ψ against the span of the chosen generator
/// columns.
fn span_residual(psi: &PureState, set: &ClassicalSetModel, subset: &[usize]) -> Result<f64> {
    let d = set.dim();
    let g = ComplexMatrix::from_fn(d, subset.len(), |i, j| {
        set.generators()[subset[j]].amplitudes()[i]
    });
    let f = svd(&g)?;
    let smax = f.singular_values.first().copied().unwrap_or(0.0);
    // explicit residual vector ψ − Σⱼ (uⱼ†ψ)uⱼ; the norm²−proj² shortcut
    // cancels catastrophically for states inside the span
    let mut resid: Vec<Complex64> = psi.amplitudes().to_vec();
    for (j, &s) in f.singular_values.iter().enumerate() {
        if s > smax * 1e-13 {
            let uj = f.u.column(j);
            let amp: Complex64 = uj.iter().zip(psi.amplitudes()).map(|(u, p)| u.conj() * p).sum();
            for (r, u) in resid.iter_mut().zip(&uj) {
                *r -= amp * u;
            }
        }
    }
    Ok(resid.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
}

fn check_normalized_pure(psi: &PureState) -> Result<()> {
    let dev = (psi.norm() - 1.0).abs();
    if dev > NORMALIZATION_TOL {
        return Err(MeasureError::NotNormalized(dev));
    }
    Ok(())
}

/// Superposition rank of a pure state.
///
/// Bipartite mode counts the Schmidt coefficients above the rank tolerance.
/// Dictionary mode finds the smallest `k ≤ cap` such that ψ lies in the span
/// of `k` generators: a greedy pass gives an upper bound, then exhaustive
/// subset search below it settles optimality. If no subset of size ≤ cap
/// works the infinite marker is returned (this includes the cap-exceeded
/// case, which is reported this way rather than silently truncated).
pub fn superposition_rank(
    psi: &PureState,
    basis: &RankBasis,
    cap: usize,
    tols: &Tolerances,
) -> Result<Rank> {
    check_normalized_pure(psi)?;
    match basis {
        RankBasis::Bipartite(shape) => {
            let m = shape.coefficient_matrix(psi)?;
            let s = svd(&m)?;
            Ok(Rank::Finite(eps_rank(&s.singular_values, tols.rank)))
        }
        RankBasis::Dictionary(set) => {
            if cap == 0 || cap > MAX_CAP {
                return Err(MeasureError::BadCap(cap));
            }
            if psi.dim() != set.dim() {
                return Err(MeasureError::ShapeMismatch(format!(
                    "state dim {} vs set dim {}",
                    psi.dim(),
                    set.dim()
                )));
            }
            dictionary_rank(psi, set, cap, tols.span)
        }
    }
}

fn dictionary_rank(
    psi: &PureState,
    set: &ClassicalSetModel,
    cap: usize,
    span_tol: f64,
) -> Result<Rank> {
    let n = set.len();
    let all: Vec<usize> = (0..n).collect();
    if span_residual(psi, set, &all)? > span_tol {
        return Ok(Rank::Infinite);
    }

    // greedy upper bound
    let mut chosen: Vec<usize> = Vec::new();
    let mut greedy_k = None;
    for _ in 0..n {
        let mut best: Option<(usize, f64)> = None;
        for g in 0..n {
            if chosen.contains(&g) {
                continue;
            }
            let mut trial = chosen.clone();
            trial.push(g);
            let r = span_residual(psi, set, &trial)?;
            match best {
                Some((_, br)) if br <= r => {}
                _ => best = Some((g, r)),
            }
        }
        let (g, r) = best.expect("n > 0");
        chosen.push(g);
        if r <= span_tol {
            greedy_k = Some(chosen.len());
            break;
        }
    }

    for k in 1..=cap.min(n) {
        if greedy_k == Some(k) {
            return Ok(Rank::Finite(k));
        }
        let mut subset: Vec<usize> = (0..k).collect();
        loop {
            if span_residual(psi, set, &subset)? <= span_tol {
                return Ok(Rank::Finite(k));
            }
            if !next_combination(&mut subset, n) {
                break;
            }
        }
    }
    Ok(Rank::Infinite)
}

/// Advances `subset` to the next k-combination of `0..n` in lexicographic
/// order; false when exhausted.
fn next_combination(subset: &mut [usize], n: usize) -> bool {
    let k = subset.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if subset[i] < n - (k - i) {
            subset[i] += 1;
            for j in (i + 1)..k {
                subset[j] = subset[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Measure report for a pure state: the only decomposition of a pure state is
/// itself, so both μ bounds equal `r(ψ) − 1`.
pub fn mu_pure(
    psi: &PureState,
    basis: &RankBasis,
    cap: usize,
    tols: &Tolerances,
) -> Result<MeasureReport> {
    let r = superposition_rank(psi, basis, cap, tols)?;
    let mu = r.minus_one();
    Ok(MeasureReport {
        r: Some(r),
        mu_lower: mu,
        mu_upper: mu,
        f_mu: f_map(mu),
        certificate: vec![EnsembleMember { probability: 1.0, state: psi.normalized() }],
        model: basis.describe(),
    })
}

/// Options for the μ upper-bound search over ensemble decompositions.
#[derive(Clone, Copy, Debug)]
pub struct MuSearchOptions {
    pub seed: u64,
    /// Number of ensemble members to parametrize; 0 means "eigen-rank".
    pub ensemble_size: usize,
    pub restarts: usize,
    pub cap: usize,
    pub tols: Tolerances,
}

impl Default for MuSearchOptions {
    fn default() -> Self {
        MuSearchOptions {
            seed: 7,
            ensemble_size: 0,
            restarts: 40,
            cap: 8,
            tols: Tolerances::default(),
        }
    }
}

/// Transpose of the second subsystem; separable states stay positive under
/// it, so a negative eigenvalue witnesses nonclassicality in bipartite mode.
pub fn partial_transpose(rho: &DensityMatrix, shape: BipartiteShape) -> Result<ComplexMatrix> {
    let (da, db) = (shape.dim_a(), shape.dim_b());
    if rho.dim() != da * db {
        return Err(MeasureError::ShapeMismatch(format!(
            "state dim {} vs split {da}x{db}",
            rho.dim()
        )));
    }
    let m = rho.matrix();
    Ok(ComplexMatrix::from_fn(da * db, da * db, |row, col| {
        let (ia, ib) = (row / db, row % db);
        let (ja, jb) = (col / db, col % db);
        m[(ia * db + jb, ja * db + ib)]
    }))
}

/// μ bound pair for a mixed state.
///
/// The lower bound is the membership dichotomy against `set` (or, for
/// bipartite mode without a hull model, the partial-transpose witness). The
/// upper bound searches decompositions through seeded random isometries
/// applied to the eigen-ensemble, which by the ensemble theorem reach every
/// decomposition; the eigen-ensemble itself is always a candidate, so the
/// result never degrades with more restarts.
pub fn mu_mixed(
    rho: &DensityMatrix,
    basis: &RankBasis,
    set: Option<&ClassicalSetModel>,
    opts: &MuSearchOptions,
) -> Result<MeasureReport> {
    let dev = (rho.trace() - 1.0).abs();
    if dev > NORMALIZATION_TOL {
        return Err(MeasureError::NotNormalized(dev));
    }
    let hull = set.or(match basis {
        RankBasis::Dictionary(s) => Some(s),
        RankBasis::Bipartite(_) => None,
    });

    // lower bound and, when inside, the hull decomposition as certificate
    let mut inside_weights: Option<Vec<f64>> = None;
    let mu_lower = match (hull, basis) {
        (Some(h), _) => {
            let m = membership(rho, h, opts.tols.membership)?;
            if m.inside {
                inside_weights = Some(m.weights);
                Rank::Finite(0)
            } else {
                Rank::Finite(1)
            }
        }
        (None, RankBasis::Bipartite(shape)) => {
            let pt = partial_transpose(rho, *shape)?;
            let min_eig = hermitian_eig(&pt)?.values.last().copied().unwrap_or(0.0);
            if min_eig < -1e-9 {
                Rank::Finite(1)
            } else {
                Rank::Finite(0)
            }
        }
        (None, RankBasis::Dictionary(_)) => unreachable!("dictionary basis provides a hull"),
    };

    if let (Some(weights), Some(h)) = (&inside_weights, hull) {
        // classical: μ = 0 with the hull decomposition as certificate
        let trace = rho.trace();
        let certificate: Vec<EnsembleMember> = weights
            .iter()
            .enumerate()
            .filter(|(_, &w)| w > 1e-12)
            .map(|(i, &w)| EnsembleMember {
                probability: w / trace,
                state: h.generators()[i].clone(),
            })
            .collect();
        return Ok(MeasureReport {
            r: None,
            mu_lower: Rank::Finite(0),
            mu_upper: Rank::Finite(0),
            f_mu: 0.0,
            certificate,
            model: basis.describe(),
        });
    }

    // upper bound: seeded isometry search seeded with the eigen-ensemble
    let spec = rho.spectrum()?;
    let kept: Vec<(f64, Vec<Complex64>)> = spec
        .values
        .iter()
        .enumerate()
        .filter(|(_, &v)| v > 1e-12)
        .map(|(j, &v)| (v, spec.vectors.column(j)))
        .collect();
    let n_eig = kept.len();

    let eval = |members: &[(f64, PureState)]| -> Result<Rank> {
        let mut worst = Rank::Finite(0);
        for (_, psi) in members {
            let r = superposition_rank(psi, basis, opts.cap, &opts.tols)?;
            worst = worst.max(r);
        }
        Ok(worst)
    };

    let eigen_members: Vec<(f64, PureState)> = kept
        .iter()
        .map(|(v, col)| {
            (*v, PureState::new(col.clone()).expect("eigenvector is unit norm").normalized())
        })
        .collect();
    let mut best_members = eigen_members;
    let mut best_rank = eval(&best_members)?;

    let m = if opts.ensemble_size == 0 { n_eig } else { opts.ensemble_size.max(n_eig) };
    for t in 0..opts.restarts {
        if best_rank <= Rank::Finite(1) {
            break; // a max-rank-1 ensemble is already optimal for nonclassical states
        }
        let mut rng = ChaCha8Rng::seed_from_u64(splitmix(opts.seed, t as u64));
        let v = random_isometry(m, n_eig, &mut rng);
        let mut members: Vec<(f64, PureState)> = Vec::with_capacity(m);
        for row in &v {
            let mut amps = vec![Complex64::new(0.0, 0.0); rho.dim()];
            for (i, (val, col)) in kept.iter().enumerate() {
                let coeff = row[i] * val.sqrt();
                for (a, &c) in amps.iter_mut().zip(col) {
                    *a += coeff * c;
                }
            }
            let p: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
            if p > 1e-12 {
                let state = PureState::new(amps)?.normalized();
                members.push((p, state));
            }
        }
        let rank = eval(&members)?;
        if rank < best_rank {
            best_rank = rank;
            best_members = members;
        }
    }

    let mu_upper = best_rank.minus_one();
    let certificate = best_members
        .into_iter()
        .map(|(probability, state)| EnsembleMember { probability, state })
        .collect();
    Ok(MeasureReport {
        r: None,
        mu_lower,
        mu_upper,
        f_mu: f_map(mu_upper),
        certificate,
        model: basis.describe(),
    })
}

fn splitmix(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Random `m x n` matrix with orthonormal columns (rows indexed by ensemble
/// member), via Gram–Schmidt on Gaussian columns.
fn random_isometry(m: usize, n: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<Complex64>> {
    let mut cols: Vec<Vec<Complex64>> = (0..n)
        .map(|_| haar_pure(m, rng).amplitudes().to_vec())
        .collect();
    for j in 0..n {
        for i in 0..j {
            let proj: Complex64 = cols[i].iter().zip(&cols[j]).map(|(a, b)| a.conj() * b).sum();
            let prev = cols[i].clone();
            for (cj, pi) in cols[j].iter_mut().zip(&prev) {
                *cj -= proj * pi;
            }
        }
        let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for cj in cols[j].iter_mut() {
            *cj /= norm;
        }
    }
    // rows: member index, columns: eigen index
    (0..m).map(|row| (0..n).map(|col| cols[col][row]).collect()).collect()
}

/// Distance from ρ to the hull in Schatten p-norm, minimized over simplex
/// weights. The p = 2 case is an exact nonnegative least-squares projection;
/// p = 1 and p = ∞ start there and run 200 projected-subgradient steps, so
/// the result is a certified upper bound on the true distance.
pub fn distance_measure(rho: &DensityMatrix, set: &ClassicalSetModel, p: PNorm) -> Result<f64> {
    let dev = (rho.trace() - 1.0).abs();
    if dev > NORMALIZATION_TOL {
        return Err(MeasureError::NotNormalized(dev));
    }
    if rho.dim() != set.dim() {
        return Err(MeasureError::ShapeMismatch(format!(
            "state dim {} vs set dim {}",
            rho.dim(),
            set.dim()
        )));
    }
    let (w2, fro_residual) =
        set.fit_cone_combination(rho.matrix(), 1.0, crate::sets::TRACE_ROW_WEIGHT)?;
    if matches!(p, PNorm::Finite(x) if x == 2.0) {
        return Ok(fro_residual);
    }

    let simplex = |mut q: Vec<f64>| -> Vec<f64> {
        project_simplex(&mut q);
        q
    };
    let mut q = simplex(w2);
    let objective = |q: &[f64]| -> Result<f64> {
        Ok(schatten_norm(&delta_matrix(rho, set, q)?, p)?)
    };
    let mut best = objective(&q)?;
    let mut best_q = q.clone();
    for t in 0..200 {
        let delta = delta_matrix(rho, set, &q)?;
        let spec = hermitian_eig(&delta)?;
        let grad = match p {
            PNorm::Finite(x) if x == 1.0 => subgradient_s1(&spec, set),
            PNorm::Inf => subgradient_sinf(&spec, set),
            other => {
                return Err(MeasureError::Linalg(LinalgError::BadExponent(match other {
                    PNorm::Finite(v) => v,
                    PNorm::Inf => f64::INFINITY,
                })))
            }
        };
        let step = 0.5 / ((t + 1) as f64).sqrt();
        for (qi, gi) in q.iter_mut().zip(&grad) {
            *qi -= step * gi;
        }
        project_simplex(&mut q);
        let val = objective(&q)?;
        if val < best {
            best = val;
            best_q = q.clone();
        }
    }
    let _ = best_q;
    Ok(best)
}

fn delta_matrix(rho: &DensityMatrix, set: &ClassicalSetModel, q: &[f64]) -> Result<ComplexMatrix> {
    let mut acc = rho.matrix().clone();
    for (i, &w) in q.iter().enumerate() {
        if w != 0.0 {
            acc = acc.sub(&set.generator_projector(i).matrix().scale(Complex64::new(w, 0.0)))?;
        }
    }
    Ok(acc)
}

fn subgradient_s1(spec: &crate::linalg::Spectrum, set: &ClassicalSetModel) -> Vec<f64> {
    // ∂‖Δ‖₁/∂qᵢ = −Σ_k sgn(μ_k) |⟨u_k|cᵢ⟩|²
    (0..set.len())
        .map(|i| {
            let gen = set.generators()[i].amplitudes();
            -(0..spec.values.len())
                .map(|k| {
                    let uk = spec.vectors.column(k);
                    let amp: Complex64 = uk.iter().zip(gen).map(|(u, g)| u.conj() * g).sum();
                    spec.values[k].signum() * amp.norm_sqr()
                })
                .sum::<f64>()
        })
        .collect()
}

fn subgradient_sinf(spec: &crate::linalg::Spectrum, set: &ClassicalSetModel) -> Vec<f64> {
    let k_max = spec
        .values
        .iter()
        .enumerate()
        .max_by(|(_, a), (_, b)| a.abs().partial_cmp(&b.abs()).unwrap())
        .map(|(k, _)| k)
        .unwrap_or(0);
    let sign = spec.values[k_max].signum();
    let uk = spec.vectors.column(k_max);
    (0..set.len())
        .map(|i| {
            let gen = set.generators()[i].amplitudes();
            let amp: Complex64 = uk.iter().zip(gen).map(|(u, g)| u.conj() * g).sum();
            -sign * amp.norm_sqr()
        })
        .collect()
}

/// Euclidean projection onto `{q ≥ 0, Σq = 1}` (sort-and-threshold).
fn project_simplex(q: &mut [f64]) {
    let n = q.len();
    let mut sorted = q.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut acc = 0.0;
    let mut theta = 0.0;
    for (i, &v) in sorted.iter().enumerate() {
        acc += v;
        let t = (acc - 1.0) / (i + 1) as f64;
        if v - t > 0.0 {
            theta = t;
        }
    }
    let _ = n;
    for qi in q.iter_mut() {
        *qi = (*qi - theta).max(0.0);
    }
}

/// One instance of the measure-axiom harness: a state with optionally a known
/// dominating state (`rho ⪯ rho_prime` by construction).
#[derive(Clone, Debug)]
pub struct AxiomInstance {
    pub rho: DensityMatrix,
    pub rho_prime: Option<DensityMatrix>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct MeasureAxiomReport {
    /// Axiom (i): μ = 0 exactly when the state is inside the model hull.
    pub axiom_i_pass: usize,
    pub axiom_i_total: usize,
    /// Axiom (ii): μ(ρ) ≤ μ(ρ') on instances with a constructed relation.
    pub axiom_ii_pass: usize,
    pub axiom_ii_fail: usize,
    pub axiom_ii_inconclusive: usize,
    pub axiom_ii_total: usize,
}

impl MeasureAxiomReport {
    pub fn all_conclusive_pass(&self) -> bool {
        self.axiom_i_pass == self.axiom_i_total && self.axiom_ii_fail == 0
    }

    pub fn inconclusive_fraction(&self) -> f64 {
        if self.axiom_ii_total == 0 {
            0.0
        } else {
            self.axiom_ii_inconclusive as f64 / self.axiom_ii_total as f64
        }
    }
}

/// Runs the Definition-5 axiom checks with a caller-supplied bound evaluator
/// (state ↦ (μ lower, μ upper)).
///
/// Axiom (i) is checked against hull membership; axiom (ii) compares bound
/// pairs and reports inconclusive overlaps separately instead of failing
/// them.
pub fn check_measure_axioms(
    evaluate: &dyn Fn(&DensityMatrix) -> Result<(MuBound, MuBound)>,
    instances: &[AxiomInstance],
    set: &ClassicalSetModel,
    tol: f64,
) -> Result<MeasureAxiomReport> {
    let mut report = MeasureAxiomReport::default();
    for instance in instances {
        let (lower, upper) = evaluate(&instance.rho)?;
        let inside = membership(&instance.rho, set, tol)?.inside;
        report.axiom_i_total += 1;
        let zero_claim = upper == Rank::Finite(0);
        let positive_claim = lower >= Rank::Finite(1);
        if (inside && zero_claim) || (!inside && positive_claim) {
            report.axiom_i_pass += 1;
        }

        if let Some(rho_prime) = &instance.rho_prime {
            let (lower_p, upper_p) = evaluate(rho_prime)?;
            report.axiom_ii_total += 1;
            if upper <= lower_p {
                report.axiom_ii_pass += 1;
            } else if lower > upper_p {
                report.axiom_ii_fail += 1;
            } else {
                report.axiom_ii_inconclusive += 1;
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sets::{coherent_grid, custom_set, product_grid};
    use crate::states::{from_pure, mix, normalize};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn bell() -> PureState {
        let h = 1.0 / 2.0_f64.sqrt();
        PureState::new(vec![c(h, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(h, 0.0)]).unwrap()
    }

    fn tols() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn f_map_values() {
        assert_eq!(f_map(Rank::Finite(0)), 0.0);
        assert!((f_map(Rank::Finite(1)) - 0.5).abs() < 1e-12);
        assert_eq!(f_map(Rank::Infinite), 1.0);
        // strictly increasing and bounded
        let mut prev = -1.0;
        for m in 0..50 {
            let v = f_map(Rank::Finite(m));
            assert!(v > prev && v < 1.0);
            prev = v;
        }
    }

    #[test]
    fn schmidt_rank_examples() {
        let shape = BipartiteShape::new(2, 2, 4).unwrap();
        let basis = RankBasis::Bipartite(shape);

        let product = PureState::basis(2, 0).unwrap().kron(&PureState::basis(2, 0).unwrap());
        assert_eq!(superposition_rank(&product, &basis, 8, &tols()).unwrap(), Rank::Finite(1));
        assert_eq!(superposition_rank(&bell(), &basis, 8, &tols()).unwrap(), Rank::Finite(2));

        // W state across the 1|23 cut
        let inv = 1.0 / 3.0_f64.sqrt();
        let mut amps = vec![c(0.0, 0.0); 8];
        amps[1] = c(inv, 0.0);
        amps[2] = c(inv, 0.0);
        amps[4] = c(inv, 0.0);
        let w = PureState::new(amps).unwrap();
        let shape = BipartiteShape::new(2, 4, 8).unwrap();
        assert_eq!(
            superposition_rank(&w, &RankBasis::Bipartite(shape), 8, &tols()).unwrap(),
            Rank::Finite(2)
        );
    }

    #[test]
    fn dictionary_rank_on_cat_states() {
        let set = coherent_grid(16, &[c(2.0, 0.0), c(-2.0, 0.0)]).unwrap();
        let basis = RankBasis::Dictionary(&set);

        let single = set.generators()[0].clone();
        assert_eq!(superposition_rank(&single, &basis, 8, &tols()).unwrap(), Rank::Finite(1));

        let a = set.generators()[0].amplitudes();
        let b = set.generators()[1].amplitudes();
        let cat_raw: Vec<Complex64> = a.iter().zip(b).map(|(x, y)| x + y).collect();
        let cat = PureState::new(cat_raw).unwrap().normalized();
        assert_eq!(superposition_rank(&cat, &basis, 8, &tols()).unwrap(), Rank::Finite(2));

        // a state outside the dictionary span is reported as infinite
        let mut amps = vec![c(0.0, 0.0); set.dim()];
        amps[1] = c(1.0, 0.0);
        let fock1 = PureState::new(amps).unwrap();
        assert_eq!(superposition_rank(&fock1, &basis, 8, &tols()).unwrap(), Rank::Infinite);
    }

    #[test]
    fn dictionary_and_schmidt_agree_on_a_product_basis() {
        let mut gens = Vec::new();
        for i in 0..2 {
            for j in 0..2 {
                gens.push(PureState::basis(2, i).unwrap().kron(&PureState::basis(2, j).unwrap()));
            }
        }
        let set = custom_set(&gens).unwrap();
        let shape = BipartiteShape::new(2, 2, 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..15 {
            let psi = haar_pure(4, &mut rng);
            let via_dict =
                superposition_rank(&psi, &RankBasis::Dictionary(&set), 8, &tols()).unwrap();
            let via_schmidt =
                superposition_rank(&psi, &RankBasis::Bipartite(shape), 8, &tols()).unwrap();
            // a Schmidt-rank-r state needs between r and r² product terms;
            // for qubits: rank 1 ⇔ dictionary rank 1
            if via_schmidt == Rank::Finite(1) {
                assert_eq!(via_dict, Rank::Finite(1));
            } else {
                assert!(via_dict >= via_schmidt, "{via_dict:?} vs {via_schmidt:?}");
            }
        }
        // and exactly on basis-aligned states
        let psi = PureState::basis(2, 0).unwrap().kron(&PureState::basis(2, 1).unwrap());
        assert_eq!(
            superposition_rank(&psi, &RankBasis::Dictionary(&set), 8, &tols()).unwrap(),
            Rank::Finite(1)
        );
        assert_eq!(
            superposition_rank(&bell(), &RankBasis::Dictionary(&set), 8, &tols()).unwrap(),
            Rank::Finite(2)
        );
    }

    #[test]
    fn mu_pure_reports() {
        let shape = BipartiteShape::new(2, 2, 4).unwrap();
        let basis = RankBasis::Bipartite(shape);
        let report = mu_pure(&bell(), &basis, 8, &tols()).unwrap();
        assert_eq!(report.r, Some(Rank::Finite(2)));
        assert_eq!(report.mu_upper, Rank::Finite(1));
        assert!((report.f_mu - 0.5).abs() < 1e-12);

        let set = coherent_grid(8, &[c(1.0, 0.0)]).unwrap();
        let report =
            mu_pure(&set.generators()[0].clone(), &RankBasis::Dictionary(&set), 8, &tols()).unwrap();
        assert_eq!(report.mu_upper, Rank::Finite(0));
        assert_eq!(report.f_mu, 0.0);
    }

    #[test]
    fn mu_mixed_classical_state_gets_a_hull_certificate() {
        let set = product_grid(2, 2, 60, 3).unwrap();
        let members: Vec<DensityMatrix> = (0..3).map(|i| set.generator_projector(i)).collect();
        let rho = normalize(&mix(&members, &[0.2, 0.3, 0.5]).unwrap()).unwrap();
        let opts = MuSearchOptions::default();
        let report = mu_mixed(&rho, &RankBasis::Dictionary(&set), None, &opts).unwrap();
        assert_eq!(report.mu_lower, Rank::Finite(0));
        assert_eq!(report.mu_upper, Rank::Finite(0));
        assert_eq!(report.f_mu, 0.0);
        // certificate reconstructs the state
        let rec = report
            .certificate
            .iter()
            .fold(ComplexMatrix::zeros(4, 4), |acc, m| {
                acc.add(&from_pure(&m.state).matrix().scale(c(m.probability, 0.0))).unwrap()
            });
        let diff = rec.sub(rho.matrix()).unwrap().frobenius_norm();
        assert!(diff <= 1e-8, "certificate residual {diff}");
    }

    #[test]
    fn mu_mixed_bell_plus_product_mixture() {
        let set = product_grid(2, 2, 200, 7).unwrap();
        let zero_zero = PureState::basis(2, 0).unwrap().kron(&PureState::basis(2, 0).unwrap());
        let rho = normalize(
            &mix(&[from_pure(&bell()), from_pure(&zero_zero)], &[0.5, 0.5]).unwrap(),
        )
        .unwrap();
        let shape = BipartiteShape::new(2, 2, 4).unwrap();
        let opts = MuSearchOptions::default();
        let report =
            mu_mixed(&rho, &RankBasis::Bipartite(shape), Some(&set), &opts).unwrap();
        assert_eq!(report.mu_lower, Rank::Finite(1), "outside the separable hull");
        assert_eq!(report.mu_upper, Rank::Finite(1), "rank-2 ensemble exists");
        assert!((report.f_mu - 0.5).abs() < 1e-12);
        // certificate reconstructs ρ
        let rec = report
            .certificate
            .iter()
            .fold(ComplexMatrix::zeros(4, 4), |acc, m| {
                acc.add(&from_pure(&m.state).matrix().scale(c(m.probability, 0.0))).unwrap()
            });
        assert!(rec.sub(rho.matrix()).unwrap().frobenius_norm() <= 1e-8);
    }

    #[test]
    fn mu_mixed_on_a_pure_state_matches_mu_pure() {
        let shape = BipartiteShape::new(2, 2, 4).unwrap();
        let basis = RankBasis::Bipartite(shape);
        let rho = from_pure(&bell());
        let opts = MuSearchOptions::default();
        let mixed_report = mu_mixed(&rho, &basis, None, &opts).unwrap();
        let pure_report = mu_pure(&bell(), &basis, opts.cap, &opts.tols).unwrap();
        assert_eq!(mixed_report.mu_upper, pure_report.mu_upper);
        assert_eq!(mixed_report.mu_lower, Rank::Finite(1));
    }

    #[test]
    fn more_restarts_never_hurt() {
        let set = product_grid(2, 2, 120, 5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let rho = crate::states::random_density(4, 4, &mut rng);
        let shape = BipartiteShape::new(2, 2, 4).unwrap();
        let basis = RankBasis::Bipartite(shape);
        let mut prev = None;
        for restarts in [0, 5, 20] {
            let opts = MuSearchOptions { restarts, ..Default::default() };
            let report = mu_mixed(&rho, &basis, Some(&set), &opts).unwrap();
            if let Some(p) = prev {
                assert!(report.mu_upper <= p);
            }
            prev = Some(report.mu_upper);
        }
    }

    #[test]
    fn distance_zero_inside_the_hull() {
        let set = custom_set(&[PureState::basis(2, 0).unwrap(), PureState::basis(2, 1).unwrap()])
            .unwrap();
        let rho = normalize(
            &mix(&[set.generator_projector(0), set.generator_projector(1)], &[0.4, 0.6]).unwrap(),
        )
        .unwrap();
        for p in [PNorm::ONE, PNorm::TWO, PNorm::Inf] {
            let d = distance_measure(&rho, &set, p).unwrap();
            assert!(d <= 1e-7, "{p} distance {d}");
        }
    }

    #[test]
    fn bell_distance_is_bounded_away_from_zero() {
        let set = product_grid(2, 2, 200, 7).unwrap();
        let rho = from_pure(&bell());
        let d2 = distance_measure(&rho, &set, PNorm::TWO).unwrap();
        assert!(d2 >= 0.5, "d2 = {d2}");
        let d1 = distance_measure(&rho, &set, PNorm::ONE).unwrap();
        let dinf = distance_measure(&rho, &set, PNorm::Inf).unwrap();
        // Schatten norm ordering: ‖·‖∞ ≤ ‖·‖₂ ≤ ‖·‖₁
        assert!(dinf <= d2 + 1e-9 && d2 <= d1 + 1e-9, "{dinf} {d2} {d1}");
    }

    #[test]
    fn axiom_harness_classical_and_mixture_instances() {
        let set = product_grid(2, 2, 200, 7).unwrap();
        let shape = BipartiteShape::new(2, 2, 4).unwrap();
        let opts = MuSearchOptions::default();
        let evaluate = |rho: &DensityMatrix| -> Result<(MuBound, MuBound)> {
            let r = mu_mixed(rho, &RankBasis::Bipartite(shape), Some(&set), &opts)?;
            Ok((r.mu_lower, r.mu_upper))
        };

        let mut instances = Vec::new();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for k in 0..6 {
            // classical: hull mixture
            let gamma = crate::ordering::random_hull_mixture(&set, &mut rng);
            instances.push(AxiomInstance { rho: normalize(&gamma).unwrap(), rho_prime: None });
            // nonclassical mixture pair: ρ = λ·Bell + (1−λ)·γ ⪯ Bell
            let lam = 0.5 + 0.08 * k as f64;
            let gamma = crate::ordering::random_hull_mixture(&set, &mut rng);
            let rho = normalize(&mix(&[from_pure(&bell()), gamma], &[lam, 1.0 - lam]).unwrap())
                .unwrap();
            instances.push(AxiomInstance { rho, rho_prime: Some(from_pure(&bell())) });
        }
        let report = check_measure_axioms(&evaluate, &instances, &set, 1e-7).unwrap();
        assert!(report.all_conclusive_pass(), "{report:?}");
        assert!(report.inconclusive_fraction() < 0.2, "{report:?}");
    }

    #[test]
    fn rank_serde_markers() {
        assert_eq!(serde_json::to_string(&Rank::Finite(3)).unwrap(), "3");
        assert_eq!(serde_json::to_string(&Rank::Infinite).unwrap(), "\"inf\"");
        assert_eq!(serde_json::from_str::<Rank>("3").unwrap(), Rank::Finite(3));
        assert_eq!(serde_json::from_str::<Rank>("\"inf\"").unwrap(), Rank::Infinite);
    }

    #[test]
    fn cap_is_guarded() {
        let set = coherent_grid(8, &[c(1.0, 0.0)]).unwrap();
        let psi = set.generators()[0].clone();
        assert!(matches!(
            superposition_rank(&psi, &RankBasis::Dictionary(&set), 13, &tols()),
            Err(MeasureError::BadCap(13))
        ));
    }
}
