//! Small dense linear algebra: complex matrices, Hermitian eigendecomposition
//! and SVD by cyclic Jacobi sweeps, vector and Schatten p-norms, numerical
//! rank, and a nonnegative least-squares kernel.
//!
//! Everything here targets matrices of dimension at most [`DIM_CAP`]; the
//! Jacobi algorithms trade speed for unconditional robustness at that scale.

mod jacobi;
mod nnls;

pub use jacobi::{hermitian_eig, svd};
pub use nnls::nnls_feasible;

use num_complex::Complex64;
use thiserror::Error;

/// Hard cap on matrix dimension accepted by the decompositions.
pub const DIM_CAP: usize = 64;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("matrix is not Hermitian (defect {0:.3e})")]
    NotHermitian(f64),
    #[error("no convergence within {0} sweeps")]
    NoConvergence(usize),
    #[error("p-norm exponent must be >= 1, got {0}")]
    BadExponent(f64),
    #[error("map is numerically singular (condition estimate {0:.3e})")]
    SingularMap(f64),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("entries must be finite")]
    NonFinite,
    #[error("matrix dimensions must be positive")]
    EmptyMatrix,
    #[error("dimension {0} exceeds the supported cap {DIM_CAP}")]
    DimensionCap(usize),
}

pub type Result<T> = std::result::Result<T, LinalgError>;

/// Dense complex matrix, row-major.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(LinalgError::EmptyMatrix);
        }
        if entries.len() != rows * cols {
            return Err(LinalgError::ShapeMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        if !entries.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(LinalgError::NonFinite);
        }
        Ok(ComplexMatrix { rows, cols, entries })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix { rows, cols, entries: vec![Complex64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        ComplexMatrix { rows, cols, entries }
    }

    /// Column-wise outer product `x y†`.
    pub fn outer(x: &[Complex64], y: &[Complex64]) -> Self {
        Self::from_fn(x.len(), y.len(), |i, j| x[i] * y[j].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(LinalgError::ShapeMismatch(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        if self.cols != x.len() {
            return Err(LinalgError::ShapeMismatch(format!(
                "{}x{} * vector of length {}",
                self.rows,
                self.cols,
                x.len()
            )));
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.rows];
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[i] += self[(i, j)] * x[j];
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(LinalgError::ShapeMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let entries = self.entries.iter().zip(&other.entries).map(|(&a, &b)| f(a, b)).collect();
        Ok(ComplexMatrix { rows: self.rows, cols: self.cols, entries })
    }

    pub fn scale(&self, s: Complex64) -> Self {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Spectral norm (largest singular value).
    pub fn spectral_norm(&self) -> f64 {
        svd(self).map(|s| s.singular_values.first().copied().unwrap_or(0.0)).unwrap_or_else(|_| self.frobenius_norm())
    }

    /// `‖M − M†‖₂` for square matrices.
    pub fn hermitian_defect(&self) -> Result<f64> {
        if !self.is_square() {
            return Err(LinalgError::ShapeMismatch(format!("{}x{} is not square", self.rows, self.cols)));
        }
        Ok(self.sub(&self.adjoint())?.spectral_norm())
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.entries[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.entries[i * self.cols + j]
    }
}

/// Dense real matrix, row-major. Feasibility problems are solved over the
/// reals; complex Hermitian data reaches this type through
/// [`hermitian_coords`].
#[derive(Clone, Debug, PartialEq)]
pub struct RealMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl RealMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(LinalgError::EmptyMatrix);
        }
        if data.len() != rows * cols {
            return Err(LinalgError::ShapeMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if !data.iter().all(|x| x.is_finite()) {
            return Err(LinalgError::NonFinite);
        }
        Ok(RealMatrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        RealMatrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Builds the matrix whose j-th column is `columns[j]`.
    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        if columns.is_empty() || columns[0].is_empty() {
            return Err(LinalgError::EmptyMatrix);
        }
        let rows = columns[0].len();
        if columns.iter().any(|c| c.len() != rows) {
            return Err(LinalgError::ShapeMismatch("ragged columns".into()));
        }
        let mut m = Self::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            for (i, &x) in col.iter().enumerate() {
                m[(i, j)] = x;
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.rows];
        for i in 0..self.rows {
            let row = &self.data[i * self.cols..(i + 1) * self.cols];
            out[i] = row.iter().zip(x).map(|(a, b)| a * b).sum();
        }
        out
    }

    pub fn transpose_mul_vec(&self, y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.cols];
        for i in 0..self.rows {
            let row = &self.data[i * self.cols..(i + 1) * self.cols];
            for (o, a) in out.iter_mut().zip(row) {
                *o += a * y[i];
            }
        }
        out
    }
}

impl std::ops::Index<(usize, usize)> for RealMatrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for RealMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Exponent of a p-norm: a finite `p >= 1` or the max-norm limit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PNorm {
    Finite(f64),
    Inf,
}

impl PNorm {
    pub const ONE: PNorm = PNorm::Finite(1.0);
    pub const TWO: PNorm = PNorm::Finite(2.0);

    fn validate(self) -> Result<Self> {
        match self {
            PNorm::Finite(p) if !(p >= 1.0) => Err(LinalgError::BadExponent(p)),
            other => Ok(other),
        }
    }
}

impl std::fmt::Display for PNorm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PNorm::Finite(p) => write!(f, "p={p}"),
            PNorm::Inf => write!(f, "p=inf"),
        }
    }
}

impl std::str::FromStr for PNorm {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim() {
            "inf" | "Inf" | "INF" | "oo" => Ok(PNorm::Inf),
            other => other
                .parse::<f64>()
                .map_err(|e| format!("bad p-norm exponent {other:?}: {e}"))
                .and_then(|p| if p >= 1.0 { Ok(PNorm::Finite(p)) } else { Err(format!("p must be >= 1, got {p}")) }),
        }
    }
}

/// `(Σ|xᵢ|^p)^{1/p}`, or `max|xᵢ|` for the infinity exponent.
pub fn vec_p_norm(x: &[Complex64], p: PNorm) -> Result<f64> {
    let p = p.validate()?;
    if x.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(LinalgError::NonFinite);
    }
    Ok(match p {
        PNorm::Inf => x.iter().map(|z| z.norm()).fold(0.0, f64::max),
        PNorm::Finite(p) if p == 1.0 => x.iter().map(|z| z.norm()).sum(),
        PNorm::Finite(p) if p == 2.0 => x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt(),
        PNorm::Finite(p) => x.iter().map(|z| z.norm().powf(p)).sum::<f64>().powf(1.0 / p),
    })
}

/// Same as [`vec_p_norm`] on real slices.
pub fn real_p_norm(x: &[f64], p: PNorm) -> Result<f64> {
    let v: Vec<Complex64> = x.iter().map(|&r| Complex64::new(r, 0.0)).collect();
    vec_p_norm(&v, p)
}

/// `‖T x‖_p` for an invertible square map `T`; a norm whenever `T` is
/// invertible.
pub fn transformed_norm(x: &[Complex64], t: &ComplexMatrix, p: PNorm) -> Result<f64> {
    if !t.is_square() {
        return Err(LinalgError::ShapeMismatch(format!("{}x{} map is not square", t.rows, t.cols)));
    }
    let s = svd(t)?;
    let smax = s.singular_values.first().copied().unwrap_or(0.0);
    let smin = s.singular_values.last().copied().unwrap_or(0.0);
    let cond = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !(cond < 1e12) {
        return Err(LinalgError::SingularMap(cond));
    }
    vec_p_norm(&t.mul_vec(x)?, p)
}

/// Schatten p-norm: the p-norm of the singular-value vector.
pub fn schatten_norm(m: &ComplexMatrix, p: PNorm) -> Result<f64> {
    let p = p.validate()?;
    let s = svd(m)?;
    let v: Vec<Complex64> = s.singular_values.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    vec_p_norm(&v, p)
}

/// Number of entries above `tol * max(1, values[0])` in a descending list.
pub fn eps_rank(values: &[f64], tol: f64) -> usize {
    debug_assert!(values.windows(2).all(|w| w[0] >= w[1] - 1e-30), "values must be descending");
    match values.first() {
        None => 0,
        Some(&v0) => {
            let cut = tol * v0.max(1.0);
            values.iter().take_while(|&&v| v > cut).count()
        }
    }
}

/// Coordinates of a Hermitian matrix over the orthonormal Hermitian basis
/// `{E_ii} ∪ {(E_ij+E_ji)/√2} ∪ {i(E_ij−E_ji)/√2}`, i.e. an isometry from
/// d×d Hermitian matrices onto R^{d²}: Euclidean length equals the Frobenius
/// norm.
pub fn hermitian_coords(m: &ComplexMatrix) -> Vec<f64> {
    let d = m.rows();
    debug_assert!(m.is_square());
    let sqrt2 = std::f64::consts::SQRT_2;
    let mut out = Vec::with_capacity(d * d);
    for i in 0..d {
        out.push(m[(i, i)].re);
    }
    for i in 0..d {
        for j in (i + 1)..d {
            out.push(sqrt2 * m[(i, j)].re);
            out.push(sqrt2 * m[(i, j)].im);
        }
    }
    out
}

/// Hermitian eigendecomposition result; `values` descending, eigenvectors in
/// the columns of `vectors`.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

/// Thin SVD `M = U Σ V†` with `singular_values` descending and orthonormal
/// columns in `u` and `v`.
#[derive(Clone, Debug)]
pub struct SvdResult {
    pub u: ComplexMatrix,
    pub singular_values: Vec<f64>,
    pub v: ComplexMatrix,
}
