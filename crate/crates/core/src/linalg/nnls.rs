//! Lawson–Hanson active-set solver for nonnegative least squares.

use super::{LinalgError, RealMatrix, Result};

/// Solves `min ‖A w − b‖₂` subject to `w ≥ 0`.
///
/// Returns the weight vector and the attained residual norm. `tol` bounds the
/// dual variables at termination (scaled by `max(1, ‖Aᵀb‖_∞)`); the result is
/// deterministic for a fixed input. Fails with `NoConvergence` after
/// `100 * cols` pivots.
pub fn nnls_feasible(a: &RealMatrix, b: &[f64], tol: f64) -> Result<(Vec<f64>, f64)> {
    let m = a.rows();
    let n = a.cols();
    if b.len() != m {
        return Err(LinalgError::ShapeMismatch(format!("{m} rows vs rhs of length {}", b.len())));
    }
    if !b.iter().all(|x| x.is_finite()) {
        return Err(LinalgError::NonFinite);
    }

    let grad0 = a.transpose_mul_vec(b);
    let dual_cut = tol * grad0.iter().fold(1.0_f64, |acc, &g| acc.max(g.abs()));

    let mut x = vec![0.0; n];
    let mut passive: Vec<usize> = Vec::new();
    let mut in_passive = vec![false; n];
    let max_iter = 100 * n;
    let mut iter = 0;

    'outer: loop {
        iter += 1;
        if iter > max_iter {
            return Err(LinalgError::NoConvergence(max_iter));
        }
        let ax = a.mul_vec(&x);
        let resid: Vec<f64> = b.iter().zip(&ax).map(|(bi, axi)| bi - axi).collect();
        let w = a.transpose_mul_vec(&resid);

        // candidates rejected in this round (numerically dependent or with a
        // non-positive trial coefficient) stay ineligible until x changes
        let mut skip = vec![false; n];
        let mut z;
        loop {
            let mut best: Option<(usize, f64)> = None;
            for j in 0..n {
                if !in_passive[j] && !skip[j] && w[j] > dual_cut {
                    match best {
                        Some((_, bw)) if bw >= w[j] => {}
                        _ => best = Some((j, w[j])),
                    }
                }
            }
            let Some((j_new, _)) = best else { break 'outer };

            passive.push(j_new);
            match least_squares_passive(a, b, &passive) {
                Some(trial) if *trial.last().expect("nonempty") > 0.0 => {
                    in_passive[j_new] = true;
                    z = trial;
                    break;
                }
                _ => {
                    passive.pop();
                    skip[j_new] = true;
                }
            }
        }

        // feasibility loop: step toward z, retiring coordinates pinned at zero
        loop {
            if z.iter().all(|&zi| zi > 0.0) {
                for (k, &j) in passive.iter().enumerate() {
                    x[j] = z[k];
                }
                continue 'outer;
            }
            iter += 1;
            if iter > max_iter {
                return Err(LinalgError::NoConvergence(max_iter));
            }
            let mut alpha = f64::INFINITY;
            for (k, &j) in passive.iter().enumerate() {
                if z[k] <= 0.0 {
                    let t = x[j] / (x[j] - z[k]);
                    if t < alpha {
                        alpha = t;
                    }
                }
            }
            for (k, &j) in passive.iter().enumerate() {
                x[j] += alpha * (z[k] - x[j]);
            }
            let (keep, drop): (Vec<usize>, Vec<usize>) =
                passive.iter().copied().partition(|&j| x[j] > 1e-14);
            for j in drop {
                x[j] = 0.0;
                in_passive[j] = false;
            }
            passive = keep;
            if passive.is_empty() {
                continue 'outer;
            }
            match least_squares_passive(a, b, &passive) {
                Some(trial) => z = trial,
                None => {
                    // rank collapse after retirement: shed the newest column
                    let j = passive.pop().expect("nonempty");
                    x[j] = 0.0;
                    in_passive[j] = false;
                    if passive.is_empty() {
                        continue 'outer;
                    }
                    z = match least_squares_passive(a, b, &passive) {
                        Some(t) => t,
                        None => continue 'outer,
                    };
                }
            }
        }
    }

    let ax = a.mul_vec(&x);
    let res = b.iter().zip(&ax).map(|(bi, axi)| (bi - axi) * (bi - axi)).sum::<f64>().sqrt();
    Ok((x, res))
}

/// Unconstrained least squares on the passive columns via Householder QR.
/// Returns `None` when the submatrix is numerically rank-deficient.
fn least_squares_passive(a: &RealMatrix, b: &[f64], passive: &[usize]) -> Option<Vec<f64>> {
    let m = a.rows();
    let k = passive.len();
    if k == 0 {
        return Some(Vec::new());
    }
    if k > m {
        return None;
    }
    // pack the submatrix column-major
    let mut r = vec![0.0; m * k];
    for (c, &j) in passive.iter().enumerate() {
        for i in 0..m {
            r[c * m + i] = a[(i, j)];
        }
    }
    let mut rhs = b.to_vec();

    let mut diag_max = 0.0_f64;
    let mut diag_min = f64::INFINITY;
    for c in 0..k {
        let col = &r[c * m..(c + 1) * m];
        let norm = col[c..].iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return None;
        }
        let alpha = if col[c] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = col[c..].to_vec();
        v[0] -= alpha;
        let vnorm_sq: f64 = v.iter().map(|x| x * x).sum();
        if vnorm_sq > 0.0 {
            for cc in c..k {
                let colc = &mut r[cc * m..(cc + 1) * m];
                let dot: f64 = v.iter().zip(&colc[c..]).map(|(a, b)| a * b).sum();
                let f = 2.0 * dot / vnorm_sq;
                for (vi, x) in v.iter().zip(colc[c..].iter_mut()) {
                    *x -= f * vi;
                }
            }
            let dot: f64 = v.iter().zip(&rhs[c..]).map(|(a, b)| a * b).sum();
            let f = 2.0 * dot / vnorm_sq;
            for (vi, x) in v.iter().zip(rhs[c..].iter_mut()) {
                *x -= f * vi;
            }
        }
        let d = r[c * m + c].abs();
        diag_max = diag_max.max(d);
        diag_min = diag_min.min(d);
    }
    if diag_min <= diag_max * 1e-12 {
        return None;
    }

    // back substitution on the k x k upper triangle
    let mut z = vec![0.0; k];
    for c in (0..k).rev() {
        let mut s = rhs[c];
        for cc in (c + 1)..k {
            s -= r[cc * m + c] * z[cc];
        }
        z[c] = s / r[c * m + c];
    }
    Some(z)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_recovers_nonnegative_rhs() {
        let a = RealMatrix::identity(2);
        let (w, res) = nnls_feasible(&a, &[1.0, 2.0], 1e-12).unwrap();
        assert!((w[0] - 1.0).abs() < 1e-12 && (w[1] - 2.0).abs() < 1e-12);
        assert!(res < 1e-12);
    }

    #[test]
    fn negative_rhs_projects_to_zero() {
        let a = RealMatrix::identity(2);
        let (w, res) = nnls_feasible(&a, &[-1.0, 0.0], 1e-12).unwrap();
        assert_eq!(w, vec![0.0, 0.0]);
        assert!((res - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_column_exact_fit() {
        let a = RealMatrix::new(2, 1, vec![1.0, 1.0]).unwrap();
        let (w, res) = nnls_feasible(&a, &[1.0, 1.0], 1e-12).unwrap();
        assert!((w[0] - 1.0).abs() < 1e-12);
        assert!(res < 1e-12);
    }

    #[test]
    fn duplicate_columns_terminate() {
        let a = RealMatrix::new(2, 3, vec![1.0, 1.0, 0.5, 0.0, 0.0, 0.5]).unwrap();
        let (w, res) = nnls_feasible(&a, &[2.0, 1.0], 1e-12).unwrap();
        assert!(w.iter().all(|&x| x >= 0.0));
        assert!(res < 1e-10);
    }
}
