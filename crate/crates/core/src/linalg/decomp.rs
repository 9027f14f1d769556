use super::{adjoint, matmul, ComplexMatrix, SINGULAR_CONDITION};
use crate::error::{Result, WaxError};

/// Singular-value threshold used by rank decisions.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Tolerance {
    /// `max(rows, cols) · ε · σ_max`.
    #[default]
    Auto,
    /// Singular values `<= tol` count as zero.
    Absolute(f64),
}

impl Tolerance {
    pub fn threshold(self, rows: usize, cols: usize, sigma_max: f64) -> f64 {
        match self {
            Tolerance::Auto => rows.max(cols) as f64 * f64::EPSILON * sigma_max,
            Tolerance::Absolute(t) => t,
        }
    }
}

/// Full singular value decomposition `a = u·diag(s)·vᴴ`.
///
/// `u` is `m x m`, `v` is `n x n`, and `s` holds `min(m, n)` values in
/// non-increasing order.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: ComplexMatrix,
    pub s: Vec<f64>,
    pub v: ComplexMatrix,
}

impl Svd {
    /// Number of singular values above the tolerance threshold.
    pub fn rank(&self, tol: Tolerance) -> usize {
        count_above(&self.s, self.u.rows(), self.v.rows(), tol)
    }
}

fn count_above(s: &[f64], rows: usize, cols: usize, tol: Tolerance) -> usize {
    let sigma_max = s.first().copied().unwrap_or(0.0);
    let thr = tol.threshold(rows, cols, sigma_max);
    s.iter().filter(|&&x| x > thr).count()
}

pub fn svd(a: &ComplexMatrix) -> Result<Svd> {
    let (m, n) = a.shape();
    if m == 0 || n == 0 {
        return Ok(Svd {
            u: ComplexMatrix::identity(m),
            s: Vec::new(),
            v: ComplexMatrix::identity(n),
        });
    }
    check_finite(a)?;
    let dec = a.to_faer().svd().map_err(|_| WaxError::SvdNotConverged)?;
    let s_diag = dec.S().column_vector();
    let s = (0..m.min(n)).map(|i| s_diag[i].re).collect();
    Ok(Svd {
        u: ComplexMatrix::from_faer(dec.U()),
        s,
        v: ComplexMatrix::from_faer(dec.V()),
    })
}

/// Singular values only, non-increasing.
pub fn singular_values(a: &ComplexMatrix) -> Result<Vec<f64>> {
    if a.rows() == 0 || a.cols() == 0 {
        return Ok(Vec::new());
    }
    check_finite(a)?;
    let mut s = a
        .to_faer()
        .singular_values()
        .map_err(|_| WaxError::SvdNotConverged)?;
    s.sort_by(|x, y| y.total_cmp(x));
    Ok(s)
}

// Non-finite input makes the iterative SVD fail or return garbage; report it
// as non-convergence rather than a silently wrong rank.
fn check_finite(a: &ComplexMatrix) -> Result<()> {
    if a.is_finite() {
        Ok(())
    } else {
        Err(WaxError::SvdNotConverged)
    }
}

pub fn rank(a: &ComplexMatrix, tol: Tolerance) -> Result<usize> {
    let s = singular_values(a)?;
    Ok(count_above(&s, a.rows(), a.cols(), tol))
}

/// Orthonormal basis of the right null space, one column per basis vector.
///
/// Columns are the right singular vectors of the below-threshold singular
/// values, ordered by decreasing singular value, so the last column belongs
/// to the smallest one.
pub fn null_space_basis(a: &ComplexMatrix, tol: Tolerance) -> Result<ComplexMatrix> {
    let n = a.cols();
    let dec = svd(a)?;
    let r = dec.rank(tol);
    let idx: Vec<usize> = (r..n).collect();
    Ok(dec.v.select_cols(&idx))
}

/// Inverse of a square matrix together with its 2-norm condition estimate.
///
/// Fails with [`WaxError::NumericallySingular`] when the condition estimate
/// exceeds `1e12`.
pub fn invert(a: &ComplexMatrix) -> Result<(ComplexMatrix, f64)> {
    if !a.is_square() {
        return Err(WaxError::mismatch(
            "invert",
            a.shape(),
            (a.rows(), a.rows()),
        ));
    }
    if a.rows() == 0 {
        return Ok((ComplexMatrix::zeros(0, 0), 1.0));
    }
    let dec = svd(a)?;
    let smax = dec.s[0];
    let smin = *dec.s.last().unwrap();
    let condition = if smin > 0.0 {
        smax / smin
    } else {
        f64::INFINITY
    };
    if condition.is_nan() || condition > SINGULAR_CONDITION {
        return Err(WaxError::NumericallySingular { condition });
    }
    let n = a.rows();
    // V·Σ⁻¹·Uᴴ
    let v_scaled = ComplexMatrix::from_fn(n, n, |i, j| dec.v[(i, j)] / dec.s[j]);
    let inv = matmul(&v_scaled, &adjoint(&dec.u))?;
    Ok((inv, condition))
}

/// Moore–Penrose pseudo-inverse.
pub fn pinv(a: &ComplexMatrix, tol: Tolerance) -> Result<ComplexMatrix> {
    let (m, n) = a.shape();
    let dec = svd(a)?;
    let r = dec.rank(tol);
    let v_scaled = ComplexMatrix::from_fn(n, r, |i, j| dec.v[(i, j)] / dec.s[j]);
    let u_r = dec.u.select_cols(&(0..r).collect::<Vec<_>>());
    let out = matmul(&v_scaled, &adjoint(&u_r))?;
    debug_assert_eq!(out.shape(), (n, m));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn rank_examples() {
        assert_eq!(
            rank(&ComplexMatrix::identity(5), Tolerance::Auto).unwrap(),
            5
        );
        assert_eq!(
            rank(&ComplexMatrix::zeros(3, 4), Tolerance::Auto).unwrap(),
            0
        );
        assert_eq!(
            rank(&ComplexMatrix::ones(2, 2), Tolerance::Auto).unwrap(),
            1
        );
    }

    #[test]
    fn rank_of_non_finite_is_an_error() {
        let mut a = ComplexMatrix::identity(2);
        a[(0, 1)] = Complex64::new(f64::NAN, 0.0);
        assert!(matches!(
            rank(&a, Tolerance::Auto),
            Err(WaxError::SvdNotConverged)
        ));
    }

    #[test]
    fn null_space_examples() {
        let ns = null_space_basis(&ComplexMatrix::identity(3), Tolerance::Auto).unwrap();
        assert_eq!(ns.shape(), (3, 0));

        let ns = null_space_basis(&ComplexMatrix::ones(1, 2), Tolerance::Auto).unwrap();
        assert_eq!(ns.shape(), (2, 1));
        // proportional to [1, -1]/√2
        let ratio = ns[(0, 0)] / ns[(1, 0)];
        assert!((ratio + 1.0).norm() < 1e-12);
        assert!((ns.frobenius_norm() - 1.0).abs() < 1e-12);

        let ns = null_space_basis(&ComplexMatrix::zeros(2, 3), Tolerance::Auto).unwrap();
        assert_eq!(ns.shape(), (3, 3));
        let gram = matmul(&adjoint(&ns), &ns).unwrap();
        assert!(gram.relative_error(&ComplexMatrix::identity(3)).unwrap() < 1e-12);
    }

    #[test]
    fn invert_examples() {
        let (inv, cond) = invert(&ComplexMatrix::identity(4)).unwrap();
        assert!(inv.relative_error(&ComplexMatrix::identity(4)).unwrap() < 1e-15);
        assert!((cond - 1.0).abs() < 1e-12);

        let (inv, cond) = invert(&ComplexMatrix::diag_real(&[2.0, 4.0])).unwrap();
        assert!(
            inv.relative_error(&ComplexMatrix::diag_real(&[0.5, 0.25]))
                .unwrap()
                < 1e-15
        );
        assert!((cond - 2.0).abs() < 1e-12);

        match invert(&ComplexMatrix::ones(2, 2)) {
            Err(WaxError::NumericallySingular { condition }) => assert!(condition > 1e12),
            other => panic!("expected singular, got {other:?}"),
        }
    }

    #[test]
    fn invert_rejects_rectangular() {
        assert!(invert(&ComplexMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn pinv_of_tall_full_rank_is_left_inverse() {
        let a = ComplexMatrix::from_real_rows(&[[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]);
        let p = pinv(&a, Tolerance::Auto).unwrap();
        let pa = matmul(&p, &a).unwrap();
        assert!(pa.relative_error(&ComplexMatrix::identity(2)).unwrap() < 1e-12);
    }
}
