//! WAX decomposition `H = W̃·Ã·X` with block-diagonal `W̃`.
//!
//! The unknowns are stacked as `u = [vec(X); vec(V_1); …; vec(V_N)]` where
//! `V_n = W̃_n⁻¹`, and the condition `Ã·X − V·H = 0` becomes the homogeneous
//! system `B·u = 0` with `B = [I_K ⊗ Ã, −(Hᵀ ⊗ I_M)·P]`. Any null vector
//! whose `V_n` blocks are invertible yields a decomposition.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Result, WaxError};
use crate::linalg::{self, ComplexMatrix, Tolerance, SINGULAR_CONDITION};
use crate::rng::{self, Purpose};

/// System dimensions: `m` antennas, `k` users, `l` outputs per antenna,
/// `t` CPU inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SystemDims {
    pub m: usize,
    pub k: usize,
    pub l: usize,
    pub t: usize,
}

impl SystemDims {
    pub fn new(m: usize, k: usize, l: usize, t: usize) -> Result<Self> {
        if m == 0 || k == 0 || l == 0 || t == 0 {
            return Err(WaxError::InvalidArgument(format!(
                "dimensions must be positive: M={m}, K={k}, L={l}, T={t}"
            )));
        }
        if !m.is_multiple_of(l) {
            return Err(WaxError::InvalidArgument(format!(
                "M={m} is not divisible by L={l}"
            )));
        }
        if m < k {
            return Err(WaxError::InvalidArgument(format!(
                "M={m} antennas is fewer than K={k} users"
            )));
        }
        if t > m {
            return Err(WaxError::InvalidArgument(format!(
                "T={t} CPU inputs exceeds M={m}"
            )));
        }
        Ok(Self { m, k, l, t })
    }

    /// Dimensions implied by an `M x K` channel and an `M x T` combiner.
    pub fn from_shapes(h: &ComplexMatrix, a_tilde: &ComplexMatrix, l: usize) -> Result<Self> {
        if h.rows() != a_tilde.rows() {
            return Err(WaxError::mismatch(
                "channel vs combiner",
                h.shape(),
                a_tilde.shape(),
            ));
        }
        Self::new(h.rows(), h.cols(), l, a_tilde.cols())
    }

    /// Number of antenna clusters `M / L`.
    pub fn n(&self) -> usize {
        self.m / self.l
    }

    pub fn feasible(&self) -> bool {
        feasible_counts(self.m, self.k, self.l, self.t)
    }

    pub fn free_variable_count(&self) -> i64 {
        let (m, k, l, t) = (self.m as i64, self.k as i64, self.l as i64, self.t as i64);
        t * k + m * l - m * k
    }
}

/// `T > max(M(K−L)/K, K−1)` in exact integer arithmetic.
pub fn feasible(dims: &SystemDims) -> bool {
    dims.feasible()
}

/// Feasibility on raw counts, without the divisibility requirement.
pub fn feasible_counts(m: usize, k: usize, l: usize, t: usize) -> bool {
    let (m, k, l, t) = (m as i128, k as i128, l as i128, t as i128);
    // T > M(K−L)/K  ⇔  T·K > M·(K−L) for K > 0
    k > 0 && t * k > m * (k - l) && t > k - 1
}

/// `S = TK + ML − MK`, the generic dimension of the solution space.
pub fn free_variable_count(dims: &SystemDims) -> i64 {
    dims.free_variable_count()
}

/// `Ĩ_L = I_N ⊗ (1_{L×1} ⊗ I_L)`, an `(M·L) x M` binary matrix.
pub fn build_itilde(n: usize, l: usize) -> ComplexMatrix {
    let inner = linalg::kron(&ComplexMatrix::ones(l, 1), &ComplexMatrix::identity(l));
    linalg::kron(&ComplexMatrix::identity(n), &inner)
}

/// `A = Ĩ_L·Ã`: each `L`-row block of `Ã` repeated `L` times.
pub fn expand_combiner(a_tilde: &ComplexMatrix, l: usize) -> Result<ComplexMatrix> {
    check_divisible(a_tilde.rows(), l)?;
    let (m, t) = a_tilde.shape();
    let mut out = ComplexMatrix::zeros(m * l, t);
    for n in 0..m / l {
        for i in 0..l {
            for lp in 0..l {
                let src = a_tilde.row(n * l + lp);
                let dst = (n * l + i) * l + lp;
                for (j, &v) in src.iter().enumerate() {
                    out[(dst, j)] = v;
                }
            }
        }
    }
    Ok(out)
}

/// Selector `P` (`M² x M·L`) with `vec(W̃) = P·u_W`, where `u_W` stacks the
/// column-major vectorizations of the `N` diagonal `L x L` blocks.
pub fn build_selector_p(m: usize, l: usize) -> Result<ComplexMatrix> {
    check_divisible(m, l)?;
    let mut p = ComplexMatrix::zeros(m * m, m * l);
    for n in 0..m / l {
        for j in 0..l {
            for i in 0..l {
                let (r, c) = (n * l + i, n * l + j);
                p[(c * m + r, n * l * l + j * l + i)] = Complex64::new(1.0, 0.0);
            }
        }
    }
    Ok(p)
}

/// `B = [I_K ⊗ Ã, −(Hᵀ ⊗ I_M)·P]`, shape `(M·K) x (T·K + M·L)`.
///
/// Assembled entry by entry: the `(n, i, j)` column of the second part has
/// `−H[nL+j, k]` at row `k·M + nL + i`.
pub fn build_b(a_tilde: &ComplexMatrix, h: &ComplexMatrix, l: usize) -> Result<ComplexMatrix> {
    if a_tilde.rows() != h.rows() {
        return Err(WaxError::mismatch("build_b", a_tilde.shape(), h.shape()));
    }
    check_divisible(h.rows(), l)?;
    let (m, k) = h.shape();
    let t = a_tilde.cols();
    let mut b = ComplexMatrix::zeros(m * k, t * k + m * l);
    for kk in 0..k {
        b.set_submatrix(kk * m, kk * t, a_tilde);
    }
    let off = t * k;
    for kk in 0..k {
        for n in 0..m / l {
            for j in 0..l {
                let hv = -h[(n * l + j, kk)];
                for i in 0..l {
                    b[(kk * m + n * l + i, off + n * l * l + j * l + i)] = hv;
                }
            }
        }
    }
    Ok(b)
}

/// Stacks `[vec(X); vec(V_1); …; vec(V_N)]`.
pub fn stack_unknowns(x: &ComplexMatrix, w_inverse_blocks: &[ComplexMatrix]) -> ComplexMatrix {
    let mut v = linalg::vec(x).into_vec();
    for blk in w_inverse_blocks {
        v.extend(linalg::vec(blk).into_vec());
    }
    ComplexMatrix::column(v)
}

/// How the null space of `B` is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NullSpaceMethod {
    /// SVD of the full `MK x (TK+ML)` matrix `B`.
    Dense,
    /// Project `B` onto the orthogonal complement of `range(Ã)` and solve
    /// for the `W̃⁻¹` blocks alone; `X = Ã⁺·W̃⁻¹·H` afterwards. Same null
    /// space in exact arithmetic, with a `K(M−rank Ã) x ML` SVD.
    #[default]
    Projected,
}

#[derive(Debug, Clone)]
pub struct SolverOptions {
    /// Relative Frobenius residual accepted as success.
    pub success_tol: f64,
    /// Rank threshold for the null-space SVD.
    pub rank_tol: Tolerance,
    /// Random basis combinations tried after the default candidate.
    pub max_retries: usize,
    /// Seed for the random retry combinations.
    pub seed: u64,
    pub method: NullSpaceMethod,
    /// Reject infeasible dimensions up front. Disabling it lets callers
    /// observe how the linear system itself fails below the threshold.
    pub enforce_feasibility: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            success_tol: 1e-9,
            rank_tol: Tolerance::Auto,
            max_retries: 8,
            seed: 0,
            method: NullSpaceMethod::Projected,
            enforce_feasibility: true,
        }
    }
}

/// Result of a successful decomposition.
#[derive(Debug, Clone)]
pub struct WaxFactors {
    /// The `N` diagonal blocks `W̃_n`, each `L x L`.
    pub w_blocks: Vec<ComplexMatrix>,
    /// CPU-side matrix, `T x K`.
    pub x: ComplexMatrix,
    /// `‖W̃ÃX − H‖_F / ‖H‖_F`.
    pub residual_rel: f64,
    /// Dimension of the null space of `B`.
    pub nullspace_dim: usize,
    /// Worst condition estimate among the `W̃_n⁻¹` blocks.
    pub w_inverse_condition: f64,
}

impl WaxFactors {
    /// Block-diagonal `M x M` matrix `W̃`.
    pub fn w_tilde(&self) -> ComplexMatrix {
        ComplexMatrix::block_diag(&self.w_blocks)
    }

    pub fn block_size(&self) -> usize {
        self.w_blocks.first().map_or(0, |b| b.rows())
    }
}

/// Null-space candidates, before they are turned into factors.
struct Candidates {
    /// Columns span the admissible `u_W` (or full `u` for dense).
    basis: ComplexMatrix,
    nullspace_dim: usize,
    /// Pseudo-inverse of `Ã`, present for the projected method.
    a_pinv: Option<ComplexMatrix>,
}

/// Computes `H = W̃·Ã·X`.
///
/// The default candidate is the null vector of the smallest singular value.
/// If it yields a numerically singular `W̃_n⁻¹`, up to `max_retries` seeded
/// random combinations of the basis are tried. The chosen vector is scaled so
/// that the first `W̃⁻¹` block has unit Frobenius norm and its
/// largest-magnitude entry is real and positive.
pub fn wax_decompose(
    h: &ComplexMatrix,
    a_tilde: &ComplexMatrix,
    l: usize,
    opts: &SolverOptions,
) -> Result<WaxFactors> {
    let dims = SystemDims::from_shapes(h, a_tilde, l)?;
    if opts.enforce_feasibility && !dims.feasible() {
        return Err(WaxError::Infeasible {
            m: dims.m,
            k: dims.k,
            l: dims.l,
            t: dims.t,
        });
    }

    let cands = match opts.method {
        NullSpaceMethod::Dense => dense_candidates(h, a_tilde, l, opts)?,
        NullSpaceMethod::Projected => projected_candidates(h, a_tilde, l, opts)?,
    };
    let d = cands.basis.cols();
    if cands.nullspace_dim == 0 {
        return Err(WaxError::NoNontrivialSolution);
    }
    if d == 0 {
        // Only X-directions in the null space: every W̃⁻¹ block is zero.
        return Err(WaxError::SingularWInverse {
            condition: f64::INFINITY,
            attempts: 0,
        });
    }

    let retries = if d > 1 { opts.max_retries } else { 0 };
    let mut best_condition = f64::INFINITY;
    let mut best_residual: Option<f64> = None;
    let mut attempts = 0;
    for attempt in 0..=retries {
        attempts += 1;
        let coeffs = if attempt == 0 {
            let mut c = vec![Complex64::new(0.0, 0.0); d];
            c[d - 1] = Complex64::new(1.0, 0.0);
            c
        } else {
            random_unit(d, opts.seed, attempt as u64)
        };
        let u = linalg::matmul(&cands.basis, &ComplexMatrix::column(coeffs))?;
        match factors_from_candidate(&u, &cands, h, a_tilde, &dims)? {
            Extracted::Singular(cond) => best_condition = best_condition.min(cond),
            Extracted::Ok(mut f) => {
                f.nullspace_dim = cands.nullspace_dim;
                if f.residual_rel <= opts.success_tol {
                    return Ok(f);
                }
                best_residual =
                    Some(best_residual.map_or(f.residual_rel, |r| r.min(f.residual_rel)));
            }
        }
    }
    match best_residual {
        Some(residual) => Err(WaxError::ResidualTooLarge {
            residual,
            tol: opts.success_tol,
        }),
        None => Err(WaxError::SingularWInverse {
            condition: best_condition,
            attempts,
        }),
    }
}

fn random_unit(d: usize, seed: u64, attempt: u64) -> Vec<Complex64> {
    let mut r = rng::stream(seed, attempt, Purpose::Candidate);
    let mut c: Vec<Complex64> = (0..d).map(|_| rng::complex_gaussian(&mut r, 1.0)).collect();
    let norm = c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm > 0.0 {
        c.iter_mut().for_each(|z| *z /= norm);
    } else {
        c[r.random_range(0..d)] = Complex64::new(1.0, 0.0);
    }
    c
}

fn dense_candidates(
    h: &ComplexMatrix,
    a_tilde: &ComplexMatrix,
    l: usize,
    opts: &SolverOptions,
) -> Result<Candidates> {
    let b = build_b(a_tilde, h, l)?;
    let basis = linalg::null_space_basis(&b, opts.rank_tol)?;
    let nullspace_dim = basis.cols();
    Ok(Candidates {
        basis,
        nullspace_dim,
        a_pinv: None,
    })
}

/// Projection `C = (I_K ⊗ U₂ᴴ)·B₂`, with `U₂` an orthonormal basis of the
/// complement of `range(Ã)`. Columns of `null(C)` are the admissible `u_W`;
/// each extends uniquely (modulo `null(Ã)`) to a null vector of `B`.
fn projected_candidates(
    h: &ComplexMatrix,
    a_tilde: &ComplexMatrix,
    l: usize,
    opts: &SolverOptions,
) -> Result<Candidates> {
    let (m, k) = h.shape();
    let t = a_tilde.cols();
    let dec = linalg::svd(a_tilde)?;
    let r = dec.rank(opts.rank_tol);
    let q = m - r;
    let mut c = ComplexMatrix::zeros(k * q, m * l);
    for kk in 0..k {
        for n in 0..m / l {
            for j in 0..l {
                let hv = h[(n * l + j, kk)];
                for i in 0..l {
                    let row = n * l + i;
                    let col = n * l * l + j * l + i;
                    for p in 0..q {
                        c[(kk * q + p, col)] = -dec.u[(row, r + p)].conj() * hv;
                    }
                }
            }
        }
    }
    let basis = linalg::null_space_basis(&c, opts.rank_tol)?;
    let nullspace_dim = basis.cols() + k * (t - r);
    let a_pinv = linalg::pinv(a_tilde, opts.rank_tol)?;
    Ok(Candidates {
        basis,
        nullspace_dim,
        a_pinv: Some(a_pinv),
    })
}

enum Extracted {
    Ok(WaxFactors),
    Singular(f64),
}

fn factors_from_candidate(
    u: &ComplexMatrix,
    cands: &Candidates,
    h: &ComplexMatrix,
    a_tilde: &ComplexMatrix,
    dims: &SystemDims,
) -> Result<Extracted> {
    let (t, k, l, n) = (dims.t, dims.k, dims.l, dims.n());
    let u = u.as_slice();
    let w_off = if cands.a_pinv.is_some() { 0 } else { t * k };
    let mut w_inv: Vec<ComplexMatrix> = (0..n)
        .map(|b| {
            let start = w_off + b * l * l;
            linalg::unvec(
                &ComplexMatrix::column(u[start..start + l * l].to_vec()),
                l,
                l,
            )
        })
        .collect::<Result<_>>()?;

    let alpha = gauge(&w_inv[0]);
    if alpha == Complex64::new(0.0, 0.0) {
        return Ok(Extracted::Singular(f64::INFINITY));
    }
    for blk in &mut w_inv {
        *blk = blk.scale(alpha);
    }

    let mut w_blocks = Vec::with_capacity(n);
    let mut worst = 1.0f64;
    for blk in &w_inv {
        match linalg::invert(blk) {
            Ok((inv, cond)) => {
                worst = worst.max(cond);
                w_blocks.push(inv);
            }
            Err(WaxError::NumericallySingular { condition }) => {
                return Ok(Extracted::Singular(condition));
            }
            Err(e) => return Err(e),
        }
    }
    debug_assert!(worst <= SINGULAR_CONDITION);

    let x = match &cands.a_pinv {
        Some(a_pinv) => {
            let vh = block_diag_mul(&w_inv, h)?;
            linalg::matmul(a_pinv, &vh)?
        }
        None => {
            let x = linalg::unvec(&ComplexMatrix::column(u[..t * k].to_vec()), t, k)?;
            x.scale(alpha)
        }
    };

    let mut f = WaxFactors {
        w_blocks,
        x,
        residual_rel: 0.0,
        nullspace_dim: 0,
        w_inverse_condition: worst,
    };
    f.residual_rel = reconstruct(&f, a_tilde)?.relative_error(h)?;
    Ok(Extracted::Ok(f))
}

/// Scalar that normalizes `block` to unit Frobenius norm with its
/// largest-magnitude entry real positive. Zero for a zero block.
fn gauge(block: &ComplexMatrix) -> Complex64 {
    let norm = block.frobenius_norm();
    if norm == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let mut pivot = Complex64::new(0.0, 0.0);
    for &z in block.as_slice() {
        if z.norm() > pivot.norm() {
            pivot = z;
        }
    }
    pivot.conj() / (pivot.norm() * norm)
}

/// `blockdiag(blocks)·rhs` without assembling the block-diagonal matrix.
pub(crate) fn block_diag_mul(
    blocks: &[ComplexMatrix],
    rhs: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    let total: usize = blocks.iter().map(|b| b.cols()).sum();
    if total != rhs.rows() {
        return Err(WaxError::mismatch(
            "block_diag_mul",
            (total, total),
            rhs.shape(),
        ));
    }
    let mut out = ComplexMatrix::zeros(rhs.rows(), rhs.cols());
    let mut r0 = 0;
    for blk in blocks {
        let part = linalg::matmul(blk, &rhs.row_block(r0, blk.cols()))?;
        out.set_submatrix(r0, 0, &part);
        r0 += blk.rows();
    }
    Ok(out)
}

/// `W̃·Ã·X`.
pub fn reconstruct(f: &WaxFactors, a_tilde: &ComplexMatrix) -> Result<ComplexMatrix> {
    let ax = linalg::matmul(a_tilde, &f.x)?;
    block_diag_mul(&f.w_blocks, &ax)
}

/// Expands the cluster blocks into the per-antenna weight matrix `W`
/// (`M x M·L`): row `m` holds the row of its cluster block `W̃_n` at columns
/// `m·L .. m·L + L`, so that `W·Ĩ_L = W̃`.
pub fn wtilde_to_w(f: &WaxFactors, l: usize) -> ComplexMatrix {
    let m: usize = f.w_blocks.iter().map(|b| b.rows()).sum();
    let mut w = ComplexMatrix::zeros(m, m * l);
    for (n, blk) in f.w_blocks.iter().enumerate() {
        for i in 0..l {
            let row = n * l + i;
            for lp in 0..l {
                w[(row, row * l + lp)] = blk[(i, lp)];
            }
        }
    }
    w
}

fn check_divisible(rows: usize, l: usize) -> Result<()> {
    if l == 0 || !rows.is_multiple_of(l) {
        return Err(WaxError::InvalidArgument(format!(
            "row count {rows} is not divisible by L={l}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn dims(m: usize, k: usize, l: usize, t: usize) -> SystemDims {
        SystemDims::new(m, k, l, t).unwrap()
    }

    #[test]
    fn feasibility_examples() {
        assert!(dims(100, 10, 4, 61).feasible());
        assert!(!dims(100, 10, 4, 60).feasible());
        assert!(!dims(8, 5, 2, 4).feasible());
        assert!(dims(8, 5, 2, 5).feasible());
        assert!(dims(1000, 2, 2, 2).feasible());
        assert!(!dims(1000, 2, 2, 1).feasible());
    }

    #[test]
    fn free_variable_examples() {
        assert_eq!(dims(8, 5, 2, 5).free_variable_count(), 1);
        assert_eq!(dims(100, 10, 4, 61).free_variable_count(), 10);
        assert_eq!(dims(12, 4, 1, 9).free_variable_count(), 0);
    }

    #[test]
    fn dims_reject_bad_invariants() {
        assert!(SystemDims::new(9, 3, 2, 3).is_err());
        assert!(SystemDims::new(4, 5, 1, 4).is_err());
        assert!(SystemDims::new(4, 2, 1, 5).is_err());
    }

    #[test]
    fn itilde_examples() {
        assert_eq!(build_itilde(5, 1), ComplexMatrix::identity(5));
        let expected =
            ComplexMatrix::from_real_rows(&[[1.0, 0.0], [0.0, 1.0], [1.0, 0.0], [0.0, 1.0]]);
        assert_eq!(build_itilde(1, 2), expected);
        let it = build_itilde(3, 2);
        assert_eq!(it.shape(), (12, 6));
        for j in 0..6 {
            let s: f64 = it.col(j).iter().map(|z| z.re).sum();
            assert_eq!(s, 2.0);
        }
    }

    #[test]
    fn expand_combiner_matches_itilde_product() {
        let a = fixtures::ex3_a_tilde();
        assert_eq!(expand_combiner(&a, 1).unwrap(), a);
        let a2 = expand_combiner(&a, 2).unwrap();
        assert_eq!(a2, linalg::matmul(&build_itilde(4, 2), &a).unwrap());
        assert_eq!(a2.count_nonzero(0.0), 2 * a.count_nonzero(0.0));

        let stacked = expand_combiner(&ComplexMatrix::identity(2), 2).unwrap();
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(stacked, ComplexMatrix::vstack(&[&i2, &i2]).unwrap());

        assert!(expand_combiner(&ComplexMatrix::zeros(5, 2), 2).is_err());
    }

    #[test]
    fn selector_examples() {
        assert_eq!(build_selector_p(2, 2).unwrap(), ComplexMatrix::identity(4));
        let p = build_selector_p(2, 1).unwrap();
        assert_eq!(p.shape(), (4, 2));
        assert_eq!(p[(0, 0)].re, 1.0);
        assert_eq!(p[(3, 1)].re, 1.0);
        assert_eq!(p.count_nonzero(0.0), 2);
        assert!(build_selector_p(3, 2).is_err());
    }

    #[test]
    fn build_b_shape_for_example_three() {
        let b = build_b(&fixtures::ex3_a_tilde(), &fixtures::ex3_h(), 2).unwrap();
        assert_eq!(b.shape(), (40, 41));
    }

    #[test]
    fn build_b_zero_channel_annihilates_w_part() {
        let a = fixtures::ex3_a_tilde();
        let b = build_b(&a, &ComplexMatrix::zeros(8, 5), 2).unwrap();
        let u = ComplexMatrix::from_fn(41, 1, |i, _| {
            if i < 25 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(i as f64, -1.0)
            }
        });
        assert_eq!(linalg::matmul(&b, &u).unwrap().frobenius_norm(), 0.0);
    }

    #[test]
    fn infeasible_dimensions_are_rejected() {
        let a = fixtures::ex3_a_tilde().select_cols(&[0, 1, 2, 3]);
        let err = wax_decompose(&fixtures::ex3_h(), &a, 2, &SolverOptions::default()).unwrap_err();
        assert!(matches!(err, WaxError::Infeasible { t: 4, .. }));
    }

    #[test]
    fn identity_factors_are_reachable_when_h_equals_a() {
        let mut r = rng::stream(3, 0, Purpose::Channel);
        let h = rng::gaussian_matrix(&mut r, 6, 3);
        let f = wax_decompose(&h, &h, 2, &SolverOptions::default()).unwrap();
        assert!(f.residual_rel <= 1e-10);
        // the identity pair lies in the null space of B
        let u = stack_unknowns(
            &ComplexMatrix::identity(3),
            &vec![ComplexMatrix::identity(2); 3],
        );
        let b = build_b(&h, &h, 2).unwrap();
        assert!(linalg::matmul(&b, &u).unwrap().frobenius_norm() < 1e-12);
    }

    #[test]
    fn reconstruct_identity_factors_gives_combiner() {
        let a = fixtures::ex3_a_tilde();
        let f = WaxFactors {
            w_blocks: vec![ComplexMatrix::identity(2); 4],
            x: ComplexMatrix::identity(5),
            residual_rel: 0.0,
            nullspace_dim: 1,
            w_inverse_condition: 1.0,
        };
        assert_eq!(reconstruct(&f, &a).unwrap(), a);
    }

    #[test]
    fn wtilde_to_w_identity_l1() {
        let f = WaxFactors {
            w_blocks: vec![ComplexMatrix::identity(1); 3],
            x: ComplexMatrix::identity(3),
            residual_rel: 0.0,
            nullspace_dim: 1,
            w_inverse_condition: 1.0,
        };
        assert_eq!(wtilde_to_w(&f, 1), ComplexMatrix::identity(3));
    }

    #[test]
    fn gauge_normalizes_block() {
        let b = ComplexMatrix::from_fn(2, 2, |i, j| Complex64::new(i as f64 - 1.0, j as f64 + 0.5));
        let g = b.scale(gauge(&b));
        assert!((g.frobenius_norm() - 1.0).abs() < 1e-14);
        let pivot = g
            .as_slice()
            .iter()
            .copied()
            .fold(Complex64::new(0.0, 0.0), |a, z| {
                if z.norm() > a.norm() {
                    z
                } else {
                    a
                }
            });
        assert!(pivot.im.abs() < 1e-15 && pivot.re > 0.0);
    }
}
