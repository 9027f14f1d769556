//! Reference matrices: the sparse 100x61 combiner designed for
//! `(M, K, L) = (100, 10, 4)`, and the integer 8x5 decomposition example for
//! `(M, K, L, T) = (8, 5, 2, 5)`.

use crate::linalg::ComplexMatrix;

/// The 100x61 binary combiner for `M=100, K=10, L=4, T=61`.
///
/// Layout, top to bottom:
/// `I₆₁` over `[I₃₉ | S₁]`, with `S₁ = [I₂₂ ; [I₁₇ | S₂]]` and
/// `S₂ = [I₅ ; I₅ ; I₅ ; [I₂ I₂ 0₂ₓ₁]]`.
pub fn ex2_a_tilde() -> ComplexMatrix {
    let mut ones: Vec<(usize, usize)> = Vec::new();
    for i in 0..61 {
        ones.push((i, i));
    }
    // lower 39 rows start at row 61
    for i in 0..39 {
        ones.push((61 + i, i));
    }
    // S₁ occupies rows 61.., columns 39..61
    for i in 0..22 {
        ones.push((61 + i, 39 + i));
    }
    // [I₁₇ | S₂] at rows 83.., columns 39..
    for i in 0..17 {
        ones.push((83 + i, 39 + i));
    }
    // S₂ at rows 83.., columns 56..61
    for copy in 0..3 {
        for i in 0..5 {
            ones.push((83 + copy * 5 + i, 56 + i));
        }
    }
    for i in 0..2 {
        ones.push((98 + i, 56 + i));
        ones.push((98 + i, 58 + i));
    }
    let mut a = ComplexMatrix::zeros(100, 61);
    for (r, c) in ones {
        a[(r, c)].re = 1.0;
    }
    a
}

/// Number of ones in the Ĩ₄-expanded 100x61 combiner claimed in the
/// original design note. Direct counting gives 632 (158 per copy times 4).
pub const EX2_CLAIMED_ONES: usize = 612;

pub fn ex3_a_tilde() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[
        [1.0, 0.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 0.0, 1.0],
        [1.0, 0.0, 0.0, 1.0, 1.0],
        [0.0, 1.0, 0.0, 1.0, 1.0],
        [0.0, 0.0, 1.0, 1.0, 1.0],
    ])
}

/// The four 2x2 cluster weight blocks of the 8x5 example.
pub fn ex3_w_blocks() -> Vec<ComplexMatrix> {
    vec![
        ComplexMatrix::from_real_rows(&[[1.0, -1.0], [2.0, 1.0]]),
        ComplexMatrix::from_real_rows(&[[1.0, 1.0], [0.0, -1.0]]),
        ComplexMatrix::from_real_rows(&[[2.0, 1.0], [2.0, -1.0]]),
        ComplexMatrix::from_real_rows(&[[2.0, -1.0], [2.0, 2.0]]),
    ]
}

pub fn ex3_x() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[
        [-2.0, -1.0, -1.0, 2.0, 2.0],
        [1.0, -2.0, -1.0, 1.0, 2.0],
        [1.0, -1.0, -2.0, -1.0, -2.0],
        [0.0, 2.0, 0.0, -1.0, 0.0],
        [0.0, -1.0, 2.0, 1.0, -2.0],
    ])
}

/// The 8x5 channel exactly as originally printed. Its `(1, 0)` entry reads
/// `-2`, but the printed `W̃`, `Ã` and `X` multiply to `-3` there; see
/// [`ex3_h`].
pub fn ex3_h_as_printed() -> ComplexMatrix {
    let mut h = ex3_h();
    h[(1, 0)].re = -2.0;
    h
}

/// The 8x5 channel `W̃·Ã·X` of the integer example (with the `(1, 0)` entry
/// equal to `-3`, consistent with the printed factors).
pub fn ex3_h() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[
        [-3.0, 1.0, 0.0, 1.0, 0.0],
        [-3.0, -4.0, -3.0, 5.0, 6.0],
        [1.0, 1.0, -2.0, -2.0, -2.0],
        [0.0, -2.0, 0.0, 1.0, 0.0],
        [-2.0, -2.0, 5.0, 4.0, -4.0],
        [2.0, -2.0, 3.0, 0.0, -4.0],
        [1.0, -2.0, 2.0, 3.0, 4.0],
        [4.0, -2.0, 2.0, 0.0, -8.0],
    ])
}
