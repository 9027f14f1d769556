//! Combiner generation and validity checks.
//!
//! A combiner `Ã` is valid when almost every channel admits a WAX
//! decomposition with it. Three necessary conditions are checked directly
//! (full-rank blocks, the row-selection rank bound, and the block repetition
//! bound); Monte Carlo decomposition of random channels is the final arbiter.

use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Result, WaxError};
use crate::linalg::{self, ComplexMatrix, Tolerance};
use crate::rng::{self, Purpose};
use crate::tradeoff::min_inputs;
use crate::wax::{self, SolverOptions, SystemDims};

/// Default number of row selections examined by
/// [`check_row_selection_ranks`].
pub const DEFAULT_SELECTION_BUDGET: usize = 100_000;
pub const DEFAULT_MC_TRIALS: usize = 100;
pub const DEFAULT_MC_TOL: f64 = 1e-8;

const PERTURBATION_ATTEMPTS: usize = 64;
/// Decomposition trials run on each generator candidate.
const GENERATOR_MC_TRIALS: usize = 4;

/// `M x T` combiner with IID unit-variance complex Gaussian entries.
pub fn random_combiner(m: usize, t: usize, seed: u64) -> ComplexMatrix {
    let mut r = rng::stream(seed, 0, Purpose::Combiner);
    rng::gaussian_matrix(&mut r, m, t)
}

/// Rows of the nested-identity pattern with `m` rows and `t` columns.
fn nested_rows(m: usize, t: usize) -> Vec<Vec<u8>> {
    if m == 0 {
        return Vec::new();
    }
    if t == 0 {
        return vec![Vec::new(); m];
    }
    let mut rows = Vec::with_capacity(m);
    if m <= t {
        // [I_m | I_m | … | 0]
        for i in 0..m {
            let mut row = vec![0u8; t];
            for copy in 0..t / m {
                row[copy * m + i] = 1;
            }
            rows.push(row);
        }
    } else if m - t <= t {
        // [I_t ; [I_r | gen(r, t − r)]]
        for i in 0..t {
            let mut row = vec![0u8; t];
            row[i] = 1;
            rows.push(row);
        }
        let r = m - t;
        for (i, tail) in nested_rows(r, t - r).into_iter().enumerate() {
            let mut row = vec![0u8; t];
            row[i] = 1;
            row[r..].copy_from_slice(&tail);
            rows.push(row);
        }
    } else {
        // ⌊m/t⌋ stacked copies of I_t, remainder by the terminal rule
        for _ in 0..m / t {
            for i in 0..t {
                let mut row = vec![0u8; t];
                row[i] = 1;
                rows.push(row);
            }
        }
        rows.extend(nested_rows(m % t, t));
    }
    rows
}

fn binary_matrix(rows: &[Vec<u8>], cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows.len(), cols, |i, j| {
        num_complex::Complex64::new(rows[i][j] as f64, 0.0)
    })
}

/// Sparse `{0, 1}` combiner built from nested identity blocks, with
/// `T = min_inputs(M, K, L)` columns.
///
/// The raw pattern is checked for full-rank blocks, the repetition bound and
/// a short seeded decomposition run. If any check fails, a row of an
/// offending block (a random one when only the decomposition run failed) is
/// swapped with a row of another block and the checks are repeated, up to a
/// fixed budget.
pub fn nested_identity_combiner(m: usize, k: usize, l: usize) -> Result<ComplexMatrix> {
    if l == 0 || !m.is_multiple_of(l) {
        return Err(WaxError::InvalidArgument(format!(
            "M={m} is not divisible by L={l}"
        )));
    }
    if l >= k {
        return Err(WaxError::InvalidArgument(format!(
            "nested combiner needs L < K (got L={l}, K={k}); use an identity-topped T=K combiner"
        )));
    }
    if k > m {
        return Err(WaxError::InvalidArgument(format!("K={k} exceeds M={m}")));
    }
    let t = min_inputs(m, k, l);
    let mut a = binary_matrix(&nested_rows(m, t), t);
    let n = m / l;
    let mut perturb = rng::stream(
        (m * 1_000_003 + k * 1_009 + l) as u64,
        0,
        Purpose::Perturbation,
    );

    for _ in 0..PERTURBATION_ATTEMPTS {
        let ranks = check_block_ranks(&a, l)?;
        let rep = check_repetition_bound(&a, l, k);
        let offender = ranks
            .iter()
            .position(|ok| !ok)
            .or_else(|| rep.offending_blocks.get(1).copied());
        let block = match offender {
            Some(b) => b,
            None => {
                let mc = monte_carlo_validity(&a, l, k, GENERATOR_MC_TRIALS, 0, DEFAULT_MC_TOL)?;
                if mc.successes == mc.trials {
                    return Ok(a);
                }
                perturb.random_range(0..n)
            }
        };
        if n < 2 {
            break;
        }
        let other = loop {
            let b = perturb.random_range(0..n);
            if b != block {
                break b;
            }
        };
        let r1 = block * l + perturb.random_range(0..l);
        let r2 = other * l + perturb.random_range(0..l);
        a.swap_rows(r1, r2);
    }
    Err(WaxError::ConstructionFailed {
        attempts: PERTURBATION_ATTEMPTS,
    })
}

/// `rank(Ã_n) == L` for each `L x T` block.
pub fn check_block_ranks(a_tilde: &ComplexMatrix, l: usize) -> Result<Vec<bool>> {
    check_rows_divisible(a_tilde, l)?;
    (0..a_tilde.rows() / l)
        .map(|n| Ok(linalg::rank(&a_tilde.row_block(n * l, l), Tolerance::Auto)? == l))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowSelectionViolation {
    /// Block index of each selected row.
    pub blocks: Vec<usize>,
    /// Row within the block, aligned with `blocks`.
    pub rows: Vec<usize>,
    pub rank: usize,
    /// `R·(K−L)/K`; the rank must exceed it strictly.
    pub bound: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RowSelectionReport {
    /// True when selections were sampled rather than enumerated.
    pub sampled: bool,
    pub examined: usize,
    /// Total number of selections, saturated at `u128::MAX`.
    pub total_selections: u128,
    pub violations: Vec<RowSelectionViolation>,
}

impl RowSelectionReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `rank(Ã₀) > R(K−L)/K` for submatrices `Ã₀` made of `R` rows taken
/// from `R` distinct blocks.
///
/// There are `(L+1)^N − 1` such selections. They are enumerated when that
/// count fits in `budget`; otherwise `budget` selections are drawn uniformly
/// (each block independently unused or contributing one of its `L` rows,
/// rejecting the empty selection).
pub fn check_row_selection_ranks(
    a_tilde: &ComplexMatrix,
    l: usize,
    k: usize,
    budget: usize,
    seed: u64,
) -> Result<RowSelectionReport> {
    check_rows_divisible(a_tilde, l)?;
    let n = a_tilde.rows() / l;
    let radix = (l + 1) as u128;
    let total = (0..n)
        .try_fold(1u128, |acc, _| acc.checked_mul(radix))
        .map_or(u128::MAX, |p| p - 1);

    let mut violations = Vec::new();
    let mut check = |choice: &[usize]| -> Result<()> {
        let (blocks, rows): (Vec<usize>, Vec<usize>) = choice
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(b, &c)| (b, c - 1))
            .unzip();
        let idx: Vec<usize> = blocks.iter().zip(&rows).map(|(b, r)| b * l + r).collect();
        let r_count = idx.len();
        let rank = linalg::rank(&a_tilde.select_rows(&idx), Tolerance::Auto)?;
        // rank > R(K−L)/K  ⇔  rank·K > R·(K−L)
        let lhs = (rank * k) as i128;
        let rhs = r_count as i128 * (k as i128 - l as i128);
        if lhs <= rhs {
            violations.push(RowSelectionViolation {
                blocks,
                rows,
                rank,
                bound: rhs as f64 / k as f64,
            });
        }
        Ok(())
    };

    let mut choice = vec![0usize; n];
    let sampled = total > budget as u128;
    let examined;
    if !sampled {
        // mixed-radix counter over all non-empty selections
        for _ in 0..total {
            for c in choice.iter_mut() {
                *c += 1;
                if *c <= l {
                    break;
                }
                *c = 0;
            }
            check(&choice)?;
        }
        examined = total as usize;
    } else {
        let mut r = rng::stream(seed, 0, Purpose::Selection);
        for _ in 0..budget {
            loop {
                choice.iter_mut().for_each(|c| *c = r.random_range(0..=l));
                if choice.iter().any(|&c| c > 0) {
                    break;
                }
            }
            check(&choice)?;
        }
        examined = budget;
    }
    Ok(RowSelectionReport {
        sampled,
        examined,
        total_selections: total,
        violations,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct RepetitionReport {
    pub ok: bool,
    /// Largest multiplicity of an identical block.
    pub worst_repeat: usize,
    /// `K/(K−L)`, absent when `L ≥ K` (no constraint).
    pub bound: Option<f64>,
    /// Indices of the blocks in the most repeated group.
    pub offending_blocks: Vec<usize>,
    pub note: String,
}

/// Multiplicity `r` of every identical block must satisfy `r < K/(K−L)`.
/// Blocks are compared by exact entry equality.
pub fn check_repetition_bound(a_tilde: &ComplexMatrix, l: usize, k: usize) -> RepetitionReport {
    let n = a_tilde.rows().checked_div(l).unwrap_or(0);
    let mut groups: BTreeMap<Vec<(u64, u64)>, Vec<usize>> = BTreeMap::new();
    for b in 0..n {
        let key = a_tilde
            .row_block(b * l, l)
            .as_slice()
            .iter()
            // +0.0 so that -0.0 and 0.0 compare equal
            .map(|z| ((z.re + 0.0).to_bits(), (z.im + 0.0).to_bits()))
            .collect();
        groups.entry(key).or_default().push(b);
    }
    let mut worst: Vec<usize> = Vec::new();
    for members in groups.into_values() {
        if members.len() > worst.len() || (members.len() == worst.len() && members < worst) {
            worst = members;
        }
    }
    let worst_repeat = worst.len();
    if l >= k {
        return RepetitionReport {
            ok: true,
            worst_repeat,
            bound: None,
            offending_blocks: Vec::new(),
            note: format!("L={l} >= K={k}: repetition is unconstrained"),
        };
    }
    let ok = worst_repeat * (k - l) < k;
    let note = if 2 * l <= k {
        "L <= K/2: every block may occur only once".to_string()
    } else {
        format!("each block may occur fewer than {k}/{} times", k - l)
    };
    RepetitionReport {
        ok,
        worst_repeat,
        bound: Some(k as f64 / (k - l) as f64),
        offending_blocks: if ok { Vec::new() } else { worst },
        note,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MonteCarloResult {
    pub trials: usize,
    pub successes: usize,
    pub rate: f64,
    pub tol: f64,
    /// Failed trials by error kind.
    pub failures: BTreeMap<&'static str, usize>,
}

/// Fraction of random Rayleigh channels that decompose with residual
/// `<= tol`. Trial `i` draws its channel from stream `(seed, i)`.
pub fn monte_carlo_validity(
    a_tilde: &ComplexMatrix,
    l: usize,
    k: usize,
    trials: usize,
    seed: u64,
    tol: f64,
) -> Result<MonteCarloResult> {
    if trials == 0 {
        return Err(WaxError::InvalidArgument("trials must be positive".into()));
    }
    let dims = SystemDims::new(a_tilde.rows(), k, l, a_tilde.cols())?;
    if !dims.feasible() {
        return Err(WaxError::Infeasible {
            m: dims.m,
            k,
            l,
            t: dims.t,
        });
    }
    let opts = SolverOptions {
        success_tol: tol,
        seed,
        ..SolverOptions::default()
    };
    let outcomes: Vec<Result<()>> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut r = rng::stream(seed, i as u64, Purpose::Channel);
            let h = rng::gaussian_matrix(&mut r, dims.m, k);
            wax::wax_decompose(&h, a_tilde, l, &opts).map(|_| ())
        })
        .collect();

    let mut successes = 0;
    let mut failures: BTreeMap<&'static str, usize> = BTreeMap::new();
    for o in outcomes {
        match o {
            Ok(()) => successes += 1,
            Err(e @ (WaxError::InvalidArgument(_) | WaxError::DimensionMismatch { .. })) => {
                return Err(e)
            }
            Err(e) => *failures.entry(failure_kind(&e)).or_default() += 1,
        }
    }
    Ok(MonteCarloResult {
        trials,
        successes,
        rate: successes as f64 / trials as f64,
        tol,
        failures,
    })
}

fn failure_kind(e: &WaxError) -> &'static str {
    match e {
        WaxError::NoNontrivialSolution => "no-nontrivial-solution",
        WaxError::SingularWInverse { .. } => "singular-w-inverse",
        WaxError::ResidualTooLarge { .. } => "residual-too-large",
        WaxError::SvdNotConverged => "svd-not-converged",
        _ => "other",
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Valid,
    Invalid,
    Inconclusive,
}

#[derive(Debug, Clone)]
pub struct ValidationConfig {
    pub trials: usize,
    pub budget: usize,
    pub seed: u64,
    pub tol: f64,
}

impl Default for ValidationConfig {
    fn default() -> Self {
        Self {
            trials: DEFAULT_MC_TRIALS,
            budget: DEFAULT_SELECTION_BUDGET,
            seed: 0,
            tol: DEFAULT_MC_TOL,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CombinerValidityReport {
    pub block_rank_ok: Vec<bool>,
    pub row_selection: RowSelectionReport,
    pub repetition: RepetitionReport,
    pub monte_carlo: MonteCarloResult,
    pub verdict: Verdict,
}

/// Runs every check. The verdict is `Invalid` if any necessary condition
/// fails, `Valid` if all pass and every Monte Carlo trial decomposed, and
/// `Inconclusive` otherwise.
pub fn validate(
    a_tilde: &ComplexMatrix,
    l: usize,
    k: usize,
    cfg: &ValidationConfig,
) -> Result<CombinerValidityReport> {
    let block_rank_ok = check_block_ranks(a_tilde, l)?;
    let row_selection = check_row_selection_ranks(a_tilde, l, k, cfg.budget, cfg.seed)?;
    let repetition = check_repetition_bound(a_tilde, l, k);
    let monte_carlo = monte_carlo_validity(a_tilde, l, k, cfg.trials, cfg.seed, cfg.tol)?;
    let necessary = block_rank_ok.iter().all(|&b| b) && row_selection.ok() && repetition.ok;
    let verdict = if !necessary {
        Verdict::Invalid
    } else if monte_carlo.successes == monte_carlo.trials {
        Verdict::Valid
    } else {
        Verdict::Inconclusive
    };
    Ok(CombinerValidityReport {
        block_rank_ok,
        row_selection,
        repetition,
        monte_carlo,
        verdict,
    })
}

fn check_rows_divisible(a: &ComplexMatrix, l: usize) -> Result<()> {
    if l == 0 || !a.rows().is_multiple_of(l) {
        return Err(WaxError::InvalidArgument(format!(
            "combiner has {} rows, not divisible by L={l}",
            a.rows()
        )));
    }
    Ok(())
}
