//! Thin helpers over faer for the dense operations the surrogate needs.

use faer::{Mat, Par, Side};

use crate::error::{Error, Result};

/// Cholesky with an absolute jitter ladder for regularizing kernel matrices.
/// Returns the lower factor and the jitter that was needed.
pub fn cholesky_abs_jitter(k: &Mat<f64>) -> Result<(Mat<f64>, f64)> {
    cholesky_with_ladder(k, &[0.0, 1e-8, 1e-7, 1e-6, 1e-5, 1e-4])
}

/// Cholesky with a jitter ladder scaled to the matrix diagonal, for posterior
/// covariances whose overall magnitude can be arbitrarily small. A matrix
/// that is numerically zero then gets an essentially-zero factor instead of
/// an error, so degenerate posteriors sample as their mean.
pub fn cholesky_rel_jitter(k: &Mat<f64>) -> Result<(Mat<f64>, f64)> {
    let n = k.nrows();
    let mut diag_max = 0.0_f64;
    for i in 0..n {
        diag_max = diag_max.max(k[(i, i)].abs());
    }
    let scale = diag_max.max(f64::MIN_POSITIVE);
    let ladder: Vec<f64> =
        [0.0, 1e-12, 1e-10, 1e-8, 1e-6, 1e-4].iter().map(|e| e * scale).collect();
    cholesky_with_ladder(k, &ladder)
}

fn cholesky_with_ladder(k: &Mat<f64>, ladder: &[f64]) -> Result<(Mat<f64>, f64)> {
    let n = k.nrows();
    assert_eq!(n, k.ncols(), "Cholesky needs a square matrix");
    for &jitter in ladder {
        let mut kj = k.clone();
        if jitter > 0.0 {
            for i in 0..n {
                kj[(i, i)] += jitter;
            }
        }
        if let Ok(llt) = kj.llt(Side::Lower) {
            return Ok((llt.L().to_owned(), jitter));
        }
    }
    Err(Error::CholeskyFailed { max_jitter: *ladder.last().unwrap_or(&0.0) })
}

/// Solve `L x = rhs` in place for lower-triangular `L`.
pub fn solve_lower_in_place(l: &Mat<f64>, rhs: &mut Mat<f64>) {
    faer::linalg::triangular_solve::solve_lower_triangular_in_place(
        l.as_ref(),
        rhs.as_mut(),
        Par::Seq,
    );
}

/// Solve `L^T x = rhs` in place for lower-triangular `L`.
pub fn solve_lower_transpose_in_place(l: &Mat<f64>, rhs: &mut Mat<f64>) {
    faer::linalg::triangular_solve::solve_upper_triangular_in_place(
        l.transpose(),
        rhs.as_mut(),
        Par::Seq,
    );
}

/// `K^{-1} rhs` given the lower Cholesky factor of `K`.
pub fn chol_solve(l: &Mat<f64>, rhs: &Mat<f64>) -> Mat<f64> {
    let mut x = rhs.clone();
    solve_lower_in_place(l, &mut x);
    solve_lower_transpose_in_place(l, &mut x);
    x
}

/// Average out the floating-point asymmetry of a nominally symmetric matrix.
pub fn symmetrize_in_place(m: &mut Mat<f64>) {
    let n = m.nrows();
    debug_assert_eq!(n, m.ncols());
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = avg;
            m[(j, i)] = avg;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spd(n: usize) -> Mat<f64> {
        let b = Mat::<f64>::from_fn(n, n, |i, j| ((i * n + j) as f64 * 0.37).sin());
        &b * b.transpose() + Mat::<f64>::identity(n, n) * 0.5
    }

    #[test]
    fn cholesky_reconstructs_without_jitter_on_spd() {
        let k = spd(6);
        let (l, jitter) = cholesky_abs_jitter(&k).unwrap();
        assert_eq!(jitter, 0.0);
        let rec = &l * l.transpose();
        for i in 0..6 {
            for j in 0..6 {
                assert!((rec[(i, j)] - k[(i, j)]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn cholesky_escalates_jitter_on_singular_matrix() {
        // Rank-1 matrix: plain factorization fails, jitter rescues it.
        let v = Mat::<f64>::from_fn(4, 1, |i, _| (i + 1) as f64);
        let k = &v * v.transpose();
        let (_, jitter) = cholesky_abs_jitter(&k).unwrap();
        assert!(jitter > 0.0 && jitter <= 1e-4);
    }

    #[test]
    fn cholesky_rejects_negative_definite() {
        let k = Mat::<f64>::from_fn(3, 3, |i, j| if i == j { -1.0 } else { 0.0 });
        assert!(matches!(
            cholesky_abs_jitter(&k),
            Err(Error::CholeskyFailed { .. })
        ));
    }

    #[test]
    fn relative_jitter_handles_zero_and_tiny_matrices() {
        let zero = Mat::<f64>::zeros(3, 3);
        let (l, _) = cholesky_rel_jitter(&zero).unwrap();
        for i in 0..3 {
            assert!(l[(i, i)] < 1e-100); // factor of an (almost) zero matrix
        }
        let tiny = spd(3) * 1e-18;
        let (l, _) = cholesky_rel_jitter(&tiny).unwrap();
        let rec = &l * l.transpose();
        for i in 0..3 {
            for j in 0..3 {
                assert!((rec[(i, j)] - tiny[(i, j)]).abs() < 1e-24);
            }
        }
    }

    #[test]
    fn chol_solve_inverts() {
        let k = spd(5);
        let (l, _) = cholesky_abs_jitter(&k).unwrap();
        let x = chol_solve(&l, &Mat::<f64>::identity(5, 5));
        let eye = &k * &x;
        for i in 0..5 {
            for j in 0..5 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((eye[(i, j)] - want).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn symmetrize_averages_off_diagonal() {
        let mut m = Mat::<f64>::from_fn(2, 2, |i, j| (i * 2 + j) as f64);
        symmetrize_in_place(&mut m);
        assert_eq!(m[(0, 1)], 1.5);
        assert_eq!(m[(1, 0)], 1.5);
    }
}
