//! Cyclic Jacobi eigendecomposition for complex Hermitian matrices and a
//! one-sided (Hestenes) Jacobi SVD for general complex matrices.

use num_complex::Complex64;

use super::{ComplexMatrix, LinalgError, Result, Spectrum, SvdResult, DIM_CAP};

const MAX_SWEEPS: usize = 60;

/// 2x2 unitary zeroing the off-diagonal of the Hermitian block
/// `[[alpha, beta], [conj(beta), gamma]]`.
///
/// Returns `(c, s, u)` for the rotation with entries
/// `V_pp = c`, `V_pq = -s·u`, `V_qp = s·conj(u)`, `V_qq = c`,
/// where `u = beta/|beta|`.
fn hermitian_rotation(alpha: f64, gamma: f64, beta: Complex64) -> (f64, f64, Complex64) {
    let r = beta.norm();
    let u = beta / r;
    let tau = (gamma - alpha) / (2.0 * r);
    // smaller-magnitude root of t² − 2τt − 1 = 0
    let t = if tau >= 0.0 {
        -1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    (c, t * c, u)
}

/// Applies `A ← V† A V` for the rotation of [`hermitian_rotation`] acting on
/// rows/columns `p`, `q`.
fn rotate_hermitian(a: &mut ComplexMatrix, p: usize, q: usize, c: f64, s: f64, u: Complex64) {
    let n = a.rows();
    // columns: A ← A V
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = c * akp + s * u.conj() * akq;
        a[(k, q)] = -s * u * akp + c * akq;
    }
    // rows: A ← V† A
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = c * apk + s * u * aqk;
        a[(q, k)] = -s * u.conj() * apk + c * aqk;
    }
    // clean the rotated pivot pair
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
}

/// Accumulates `V ← V R` for the rotation acting on columns `p`, `q`.
fn accumulate(v: &mut ComplexMatrix, p: usize, q: usize, c: f64, s: f64, u: Complex64) {
    for k in 0..v.rows() {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = c * vkp + s * u.conj() * vkq;
        v[(k, q)] = -s * u * vkp + c * vkq;
    }
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum += a[(i, j)].norm_sqr();
            }
        }
    }
    sum.sqrt()
}

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi sweeps.
///
/// The input must satisfy `‖M − M†‖₂ ≤ 1e−10`; eigenvalues are returned in
/// descending order with matching orthonormal eigenvector columns.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<Spectrum> {
    if !m.is_square() {
        return Err(LinalgError::ShapeMismatch(format!("{}x{} is not square", m.rows(), m.cols())));
    }
    let n = m.rows();
    if n > DIM_CAP {
        return Err(LinalgError::DimensionCap(n));
    }
    let defect = m.hermitian_defect()?;
    if defect > 1e-10 {
        return Err(LinalgError::NotHermitian(defect));
    }

    // symmetrize away the sub-tolerance defect
    let mut a = m.add(&m.adjoint())?.scale(Complex64::new(0.5, 0.0));
    let mut v = ComplexMatrix::identity(n);

    let scale = a.frobenius_norm().max(1.0);
    let target = 1e-15 * scale;
    let mut converged = false;
    for _sweep in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= target {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let beta = a[(p, q)];
                if beta.norm() <= f64::MIN_POSITIVE {
                    continue;
                }
                let (c, s, u) = hermitian_rotation(a[(p, p)].re, a[(q, q)].re, beta);
                rotate_hermitian(&mut a, p, q, c, s, u);
                accumulate(&mut v, p, q, c, s, u);
            }
        }
    }
    if !converged && off_diagonal_norm(&a) > target {
        return Err(LinalgError::NoConvergence(MAX_SWEEPS));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.partial_cmp(&a[(i, i)].re).unwrap());
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok(Spectrum { values, vectors })
}

/// Thin SVD by one-sided Jacobi: right rotations orthogonalize the columns,
/// whose norms become the singular values.
pub fn svd(m: &ComplexMatrix) -> Result<SvdResult> {
    if m.rows() > DIM_CAP || m.cols() > DIM_CAP {
        return Err(LinalgError::DimensionCap(m.rows().max(m.cols())));
    }
    if m.rows() < m.cols() {
        // factor the adjoint and swap the roles of U and V
        let s = svd_tall(&m.adjoint())?;
        return Ok(SvdResult { u: s.v, singular_values: s.singular_values, v: s.u });
    }
    svd_tall(m)
}

fn svd_tall(m: &ComplexMatrix) -> Result<SvdResult> {
    let rows = m.rows();
    let cols = m.cols();
    let mut b = m.clone();
    let mut v = ComplexMatrix::identity(cols);

    let eps = 1e-15;
    let mut converged = false;
    for _sweep in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..cols {
            for q in (p + 1)..cols {
                let mut app = 0.0;
                let mut aqq = 0.0;
                let mut apq = Complex64::new(0.0, 0.0);
                for k in 0..rows {
                    app += b[(k, p)].norm_sqr();
                    aqq += b[(k, q)].norm_sqr();
                    apq += b[(k, p)].conj() * b[(k, q)];
                }
                if apq.norm() <= eps * (app * aqq).sqrt() || apq.norm() <= f64::MIN_POSITIVE {
                    continue;
                }
                let (c, s, u) = hermitian_rotation(app, aqq, apq);
                accumulate(&mut b, p, q, c, s, u);
                accumulate(&mut v, p, q, c, s, u);
                rotated = true;
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(LinalgError::NoConvergence(MAX_SWEEPS));
    }

    let mut sigma: Vec<f64> = (0..cols)
        .map(|j| (0..rows).map(|i| b[(i, j)].norm_sqr()).sum::<f64>().sqrt())
        .collect();
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&i, &j| sigma[j].partial_cmp(&sigma[i]).unwrap());
    sigma = order.iter().map(|&i| sigma[i]).collect();
    let v = ComplexMatrix::from_fn(cols, cols, |i, j| v[(i, order[j])]);

    // U columns: normalized columns of B; zero singular directions are
    // completed to an orthonormal set from basis vectors.
    let smax = sigma.first().copied().unwrap_or(0.0);
    let zero_cut = smax * 1e-14;
    let mut u = ComplexMatrix::zeros(rows, cols);
    let mut fixed: Vec<Vec<Complex64>> = Vec::with_capacity(cols);
    for j in 0..cols {
        if sigma[j] > zero_cut && sigma[j] > 0.0 {
            let col: Vec<Complex64> = (0..rows).map(|i| b[(i, order[j])] / sigma[j]).collect();
            for (i, &z) in col.iter().enumerate() {
                u[(i, j)] = z;
            }
            fixed.push(col);
        } else {
            let col = complete_orthonormal(rows, &fixed);
            for (i, &z) in col.iter().enumerate() {
                u[(i, j)] = z;
            }
            fixed.push(col);
            sigma[j] = 0.0;
        }
    }
    Ok(SvdResult { u, singular_values: sigma, v })
}

/// Deterministically picks a unit vector orthogonal to `fixed`.
fn complete_orthonormal(dim: usize, fixed: &[Vec<Complex64>]) -> Vec<Complex64> {
    for k in 0..dim {
        let mut cand = vec![Complex64::new(0.0, 0.0); dim];
        cand[k] = Complex64::new(1.0, 0.0);
        for f in fixed {
            let proj: Complex64 = f.iter().zip(&cand).map(|(a, b)| a.conj() * b).sum();
            for (c, fv) in cand.iter_mut().zip(f) {
                *c -= proj * fv;
            }
        }
        let norm = cand.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.5 {
            for c in cand.iter_mut() {
                *c /= norm;
            }
            return cand;
        }
    }
    // fixed spans the space already; unreachable for thin factorizations
    let mut e = vec![Complex64::new(0.0, 0.0); dim];
    e[0] = Complex64::new(1.0, 0.0);
    e
}
