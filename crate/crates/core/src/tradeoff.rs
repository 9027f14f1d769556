//! Trade-off between CPU inputs `T` and per-antenna outputs `L`.
//!
//! All arithmetic is on integers; the floor in `⌊M(K−L)/K + 1⌋` is an
//! Euclidean division so boundary cases where `K | M(K−L)` are exact.

use serde::Serialize;

use crate::error::{Result, WaxError};

/// Which arm of `max(⌊M(K−L)/K + 1⌋, K)` is attained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    MatrixBound,
    UserBound,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::MatrixBound => "matrix-bound",
            Regime::UserBound => "user-bound",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TradeoffPoint {
    /// `L` (outputs per antenna) or `L_mult` (multiplications per antenna).
    pub per_antenna: usize,
    /// Minimal number of CPU inputs.
    pub inputs: usize,
    pub regime: Regime,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveVariant {
    /// `T` against outputs per antenna, `L = 1..=K`.
    Outputs,
    /// `T` against multiplications per antenna, `L_mult = 0..=K`.
    Multiplications,
}

fn matrix_arm(m: usize, k: usize, l: usize) -> i64 {
    let (m, k, l) = (m as i64, k as i64, l as i64);
    (m * (k - l)).div_euclid(k) + 1
}

fn point(m: usize, k: usize, l: usize) -> TradeoffPoint {
    let arm = matrix_arm(m, k, l);
    if arm > k as i64 {
        TradeoffPoint {
            per_antenna: l,
            inputs: arm as usize,
            regime: Regime::MatrixBound,
        }
    } else {
        TradeoffPoint {
            per_antenna: l,
            inputs: k,
            regime: Regime::UserBound,
        }
    }
}

/// `T = max(⌊M(K−L)/K + 1⌋, K)`.
pub fn min_inputs(m: usize, k: usize, l: usize) -> usize {
    assert!(k >= 1 && l >= 1, "K and L must be positive");
    point(m, k, l).inputs
}

/// `T = M` for `L_mult = 0`, otherwise [`min_inputs`].
pub fn min_inputs_mult(m: usize, k: usize, l_mult: usize) -> usize {
    if l_mult == 0 {
        m
    } else {
        min_inputs(m, k, l_mult)
    }
}

/// Curve of minimal `T` from the variant's smallest per-antenna count up to
/// `K`. With `realizable_only`, outputs counts that do not divide `M` are
/// skipped (the block structure needs `L | M`).
pub fn tradeoff_curve(
    m: usize,
    k: usize,
    variant: CurveVariant,
    realizable_only: bool,
) -> Vec<TradeoffPoint> {
    let start = match variant {
        CurveVariant::Outputs => 1,
        CurveVariant::Multiplications => 0,
    };
    (start..=k)
        .filter(|&l| !realizable_only || l == 0 || m.is_multiple_of(l))
        .map(|l| {
            if l == 0 {
                TradeoffPoint {
                    per_antenna: 0,
                    inputs: m,
                    regime: Regime::MatrixBound,
                }
            } else {
                point(m, k, l)
            }
        })
        .collect()
}

/// Largest supported antenna count for a CPU with `T` inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AntennaBound {
    Bounded(usize),
    Unbounded,
}

/// Largest `M` with `T > M(K−L)/K`, i.e. `⌈T·K/(K−L)⌉ − 1`; unbounded when
/// `L ≥ K`.
pub fn max_antennas(t: usize, k: usize, l: usize) -> Result<AntennaBound> {
    if t < k {
        return Err(WaxError::InvalidArgument(format!(
            "CPU inputs below user count: T={t} < K={k}"
        )));
    }
    if l >= k {
        return Ok(AntennaBound::Unbounded);
    }
    let num = t * k;
    let den = k - l;
    Ok(AntennaBound::Bounded(num.div_ceil(den) - 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wax::feasible_counts;

    #[test]
    fn min_inputs_examples() {
        assert_eq!(min_inputs(100, 10, 4), 61);
        assert_eq!(min_inputs(8, 5, 2), 5);
        assert_eq!(min_inputs(100, 10, 1), 91);
        assert_eq!(min_inputs(100, 10, 10), 10);
        assert_eq!(min_inputs(100, 10, 12), 10);
    }

    #[test]
    fn min_inputs_mult_examples() {
        assert_eq!(min_inputs_mult(100, 10, 0), 100);
        assert_eq!(min_inputs_mult(100, 10, 1), 91);
        assert_eq!(min_inputs_mult(100, 10, 10), 10);
    }

    #[test]
    fn curve_examples() {
        let c = tradeoff_curve(100, 10, CurveVariant::Outputs, false);
        assert_eq!(c.len(), 10);
        assert_eq!((c[0].per_antenna, c[0].inputs), (1, 91));
        assert_eq!((c[9].per_antenna, c[9].inputs), (10, 10));
        assert_eq!(c[9].regime, Regime::UserBound);

        let c = tradeoff_curve(100, 10, CurveVariant::Multiplications, false);
        assert_eq!((c[0].per_antenna, c[0].inputs), (0, 100));

        let c = tradeoff_curve(7, 1, CurveVariant::Outputs, false);
        assert_eq!(c.len(), 1);
        assert_eq!((c[0].per_antenna, c[0].inputs), (1, 1));

        let c = tradeoff_curve(8, 5, CurveVariant::Outputs, true);
        assert!(c.iter().any(|p| p.per_antenna == 2 && p.inputs == 5));
        assert!(c.iter().all(|p| 8 % p.per_antenna == 0));
    }

    #[test]
    fn curve_is_monotone_and_bounded() {
        for m in 1..=40 {
            for k in 1..=m.min(9) {
                for variant in [CurveVariant::Outputs, CurveVariant::Multiplications] {
                    let c = tradeoff_curve(m, k, variant, false);
                    for w in c.windows(2) {
                        assert!(w[1].inputs <= w[0].inputs);
                    }
                    for p in &c {
                        assert!(p.inputs >= k && p.inputs <= m, "{m} {k} {p:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn max_antennas_examples() {
        assert_eq!(max_antennas(50, 3, 2).unwrap(), AntennaBound::Bounded(149));
        assert_eq!(max_antennas(50, 4, 2).unwrap(), AntennaBound::Bounded(99));
        assert_eq!(max_antennas(50, 2, 2).unwrap(), AntennaBound::Unbounded);
        assert!(max_antennas(3, 4, 2).is_err());
    }

    #[test]
    fn min_inputs_is_the_feasibility_threshold() {
        for m in 1..=64usize {
            for k in 1..=8usize.min(m) {
                for l in (1..=m).filter(|l| m % l == 0) {
                    let t = min_inputs(m, k, l);
                    assert!(feasible_counts(m, k, l, t), "({m},{k},{l},{t})");
                    if t > k {
                        assert!(!feasible_counts(m, k, l, t - 1), "({m},{k},{l},{t})");
                    }
                }
            }
        }
    }

    #[test]
    fn max_antennas_round_trip() {
        for t in 1..=64usize {
            for k in 1..=8usize.min(t) {
                for l in 1..=8usize {
                    match max_antennas(t, k, l).unwrap() {
                        AntennaBound::Bounded(mm) => {
                            assert!(feasible_counts(mm, k, l, t), "({t},{k},{l}) -> {mm}");
                            assert!(!feasible_counts(mm + 1, k, l, t), "({t},{k},{l}) -> {mm}");
                        }
                        AntennaBound::Unbounded => {
                            assert!(l >= k);
                            assert!(feasible_counts(10_000, k, l, t));
                        }
                    }
                }
            }
        }
    }
}
