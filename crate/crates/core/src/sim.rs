//! Narrowband uplink simulation comparing the centralized matched filter
//! with the decentralized per-antenna / combiner / CPU chain.
//!
//! SNR convention: with unit-power symbols and unit-variance channel entries
//! the per-antenna receive SNR is `K/N₀`, so `N₀ = K·10^(−snr_db/10)`.

use std::path::PathBuf;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::combiner;
use crate::error::{Result, WaxError};
use crate::fixtures;
use crate::io;
use crate::linalg::{self, ComplexMatrix, Tolerance};
use crate::rng::{self, Purpose};
use crate::wax::{self, SolverOptions, SystemDims, WaxFactors};

/// `M x K` IID Rayleigh channel, unit-variance entries.
pub fn rayleigh_channel(m: usize, k: usize, seed: u64) -> ComplexMatrix {
    let mut r = rng::stream(seed, 0, Purpose::Channel);
    rng::gaussian_matrix(&mut r, m, k)
}

/// `y = H·s + n` with `n` circularly-symmetric Gaussian of per-entry
/// variance `n0`.
pub fn uplink_transmit<R: Rng + ?Sized>(
    h: &ComplexMatrix,
    s: &ComplexMatrix,
    n0: f64,
    rng: &mut R,
) -> Result<ComplexMatrix> {
    if s.cols() != 1 || s.rows() != h.cols() {
        return Err(WaxError::mismatch("uplink_transmit", h.shape(), s.shape()));
    }
    if n0.is_nan() || n0 < 0.0 {
        return Err(WaxError::InvalidArgument(format!(
            "noise variance {n0} is negative"
        )));
    }
    let mut y = linalg::matmul(h, s)?;
    if n0 > 0.0 {
        for i in 0..y.rows() {
            y[(i, 0)] += rng::complex_gaussian(rng, n0);
        }
    }
    Ok(y)
}

/// `z = Hᴴ·y`.
pub fn matched_filter(h: &ComplexMatrix, y: &ComplexMatrix) -> Result<ComplexMatrix> {
    if y.rows() != h.rows() {
        return Err(WaxError::mismatch("matched_filter", h.shape(), y.shape()));
    }
    linalg::matmul(&linalg::adjoint(h), y)
}

/// `z' = Xᴴ·Ãᴴ·Ĩ_Lᴴ·Wᴴ·y`, evaluated stage by stage: each antenna scales its
/// sample by its `L` conjugate weights, the cluster adders and the combiner
/// network reduce the `M·L` outputs to `T` CPU inputs, and the CPU applies
/// `Xᴴ`.
pub fn decentralized_receive(
    factors: &WaxFactors,
    a_tilde: &ComplexMatrix,
    y: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    let l = factors.block_size();
    let m = factors.w_blocks.len() * l;
    if y.rows() != m || y.cols() != 1 {
        return Err(WaxError::mismatch(
            "decentralized_receive",
            (m, 1),
            y.shape(),
        ));
    }
    if a_tilde.rows() != m || a_tilde.cols() != factors.x.rows() {
        return Err(WaxError::mismatch(
            "decentralized_receive",
            a_tilde.shape(),
            factors.x.shape(),
        ));
    }

    // antenna m emits conj(w_m)·y_m on its L outputs
    let mut outputs = vec![Complex64::new(0.0, 0.0); m * l];
    for (n, blk) in factors.w_blocks.iter().enumerate() {
        for i in 0..l {
            let ant = n * l + i;
            for lp in 0..l {
                outputs[ant * l + lp] = blk[(i, lp)].conj() * y[(ant, 0)];
            }
        }
    }

    // cluster adders (Ĩ_Lᴴ): output lp of cluster n sums over its antennas
    let mut clustered = vec![Complex64::new(0.0, 0.0); m];
    for n in 0..m / l {
        for i in 0..l {
            for lp in 0..l {
                clustered[n * l + lp] += outputs[(n * l + i) * l + lp];
            }
        }
    }

    let cpu_in = linalg::matmul(&linalg::adjoint(a_tilde), &ComplexMatrix::column(clustered))?;
    linalg::matmul(&linalg::adjoint(&factors.x), &cpu_in)
}

/// `ŝ = (G + N₀·I)⁻¹·z`, from post-matched-filter quantities only.
pub fn mmse_estimates(g: &ComplexMatrix, z: &ComplexMatrix, n0: f64) -> Result<ComplexMatrix> {
    if !g.is_square() || z.rows() != g.rows() {
        return Err(WaxError::mismatch("mmse_estimates", g.shape(), z.shape()));
    }
    if n0.is_nan() || n0 < 0.0 {
        return Err(WaxError::InvalidArgument(format!(
            "noise variance {n0} is negative"
        )));
    }
    let reg = g.add(&ComplexMatrix::identity(g.rows()).scale_real(n0))?;
    let (inv, _) = linalg::invert(&reg)?;
    linalg::matmul(&inv, z)
}

/// Regularized least squares `argmin ‖y − H·s‖² + N₀‖s‖²` computed directly
/// from the received vector, as the least-squares solution of
/// `[H; √N₀·I]·s = [y; 0]`.
pub fn mmse_from_received(h: &ComplexMatrix, y: &ComplexMatrix, n0: f64) -> Result<ComplexMatrix> {
    let k = h.cols();
    let reg = ComplexMatrix::identity(k).scale_real(n0.sqrt());
    let stacked = ComplexMatrix::vstack(&[h, &reg])?;
    let rhs = ComplexMatrix::vstack(&[y, &ComplexMatrix::zeros(k, 1)])?;
    linalg::matmul(&linalg::pinv(&stacked, Tolerance::Auto)?, &rhs)
}

/// `log₂ det(I_K + HᴴH/N₀)` in bits per channel use, from the singular
/// values of `H`.
pub fn capacity(h: &ComplexMatrix, n0: f64) -> Result<f64> {
    let s = linalg::singular_values(h)?;
    Ok(s.iter().map(|sv| (1.0 + sv * sv / n0).log2()).sum())
}

/// Same quantity from the Gram matrix `G = HᴴH` seen after matched
/// filtering.
pub fn capacity_from_gram(g: &ComplexMatrix, n0: f64) -> Result<f64> {
    let k = g.rows();
    let m = ComplexMatrix::identity(k).add(&g.scale_real(1.0 / n0))?;
    // Hermitian positive definite: singular values are the eigenvalues
    let ev = linalg::singular_values(&m)?;
    Ok(ev.iter().map(|v| v.log2()).sum())
}

/// `N₀ = K·10^(−snr_db/10)`.
pub fn noise_variance_from_snr_db(snr_db: f64, k: usize) -> f64 {
    k as f64 * 10f64.powf(-snr_db / 10.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CombinerSource {
    /// Complex Gaussian combiner drawn from the simulation seed.
    Random,
    /// Sparse nested-identity combiner; `T` must equal the minimal count.
    Nested,
    /// The 100x61 sparse design.
    FixtureEx2,
    /// The 8x5 integer example.
    FixtureEx3,
    /// A matrix file.
    File { path: PathBuf },
}

impl CombinerSource {
    pub fn resolve(&self, dims: &SystemDims, seed: u64) -> Result<ComplexMatrix> {
        let a = match self {
            CombinerSource::Random => combiner::random_combiner(dims.m, dims.t, seed),
            CombinerSource::Nested => combiner::nested_identity_combiner(dims.m, dims.k, dims.l)?,
            CombinerSource::FixtureEx2 => fixtures::ex2_a_tilde(),
            CombinerSource::FixtureEx3 => fixtures::ex3_a_tilde(),
            CombinerSource::File { path } => io::read_matrix(path)?,
        };
        if a.shape() != (dims.m, dims.t) {
            return Err(WaxError::mismatch(
                "combiner vs dims",
                a.shape(),
                (dims.m, dims.t),
            ));
        }
        Ok(a)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SymbolSource {
    /// Unit-power QPSK: bits `(b0, b1)` map to `((1−2b0) + j(1−2b1))/√2`.
    #[default]
    Qpsk,
    /// Unit-variance circularly-symmetric complex Gaussian.
    Gaussian,
}

impl SymbolSource {
    pub fn draw<R: Rng + ?Sized>(self, rng: &mut R, k: usize) -> ComplexMatrix {
        let v = (0..k)
            .map(|_| match self {
                SymbolSource::Qpsk => {
                    let (b0, b1): (bool, bool) = (rng.random(), rng.random());
                    let re = if b0 { -1.0 } else { 1.0 };
                    let im = if b1 { -1.0 } else { 1.0 };
                    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
                }
                SymbolSource::Gaussian => rng::complex_gaussian(rng, 1.0),
            })
            .collect();
        ComplexMatrix::column(v)
    }
}

fn default_combiner() -> CombinerSource {
    CombinerSource::Random
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimConfig {
    pub m: usize,
    pub k: usize,
    pub l: usize,
    pub t: usize,
    /// Per-antenna receive SNR in dB.
    #[serde(default)]
    pub snr_db: f64,
    /// Overrides `snr_db` with an explicit `N₀` (0 for noiseless).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise_variance: Option<f64>,
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_combiner")]
    pub combiner: CombinerSource,
    #[serde(default)]
    pub symbols: SymbolSource,
}

impl SimConfig {
    pub fn dims(&self) -> Result<SystemDims> {
        SystemDims::new(self.m, self.k, self.l, self.t)
    }

    pub fn n0(&self) -> f64 {
        self.noise_variance
            .unwrap_or_else(|| noise_variance_from_snr_db(self.snr_db, self.k))
    }

    /// Checks trial count, dimension invariants and feasibility.
    pub fn validate(&self) -> Result<SystemDims> {
        if self.trials == 0 {
            return Err(WaxError::InvalidArgument(
                "trials must be at least 1".into(),
            ));
        }
        let n0 = self.n0();
        if !(n0 >= 0.0 && n0.is_finite()) {
            return Err(WaxError::InvalidArgument(format!(
                "invalid noise variance {n0}"
            )));
        }
        let dims = self.dims()?;
        if !dims.feasible() {
            return Err(WaxError::Infeasible {
                m: dims.m,
                k: dims.k,
                l: dims.l,
                t: dims.t,
            });
        }
        Ok(dims)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial: usize,
    /// `‖z' − Hᴴy‖ / ‖Hᴴy‖`.
    pub mf_mismatch: f64,
    /// Relative gap between MMSE estimates from `z'` and from raw `y`.
    pub mmse_mismatch: f64,
    /// From the raw model; absent for noiseless runs.
    pub capacity_raw: Option<f64>,
    /// From the post-matched-filter Gram matrix; absent for noiseless runs.
    pub capacity_post_mf: Option<f64>,
    pub residual_rel: f64,
    pub nullspace_dim: usize,
    /// `σ_max/σ_min` of `H`, which equals the condition number of `Hᴴ`.
    pub channel_condition: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimReport {
    pub n0: f64,
    pub trials: Vec<TrialRecord>,
    pub max_mf_mismatch: f64,
    pub max_mmse_mismatch: f64,
    pub max_residual: f64,
    pub mean_capacity: Option<f64>,
}

/// Runs `cfg.trials` independent trials. Trial `i` draws its channel,
/// symbols and noise from separate streams keyed by `(seed, i)`, so the
/// report does not depend on scheduling.
pub fn run_equivalence_experiment(cfg: &SimConfig) -> Result<SimReport> {
    let dims = cfg.validate()?;
    let a_tilde = cfg.combiner.resolve(&dims, cfg.seed)?;
    let n0 = cfg.n0();
    let opts = SolverOptions {
        seed: cfg.seed,
        ..SolverOptions::default()
    };

    let records: Vec<TrialRecord> = (0..cfg.trials)
        .into_par_iter()
        .map(|i| run_trial(i, cfg, &dims, &a_tilde, n0, &opts))
        .collect::<Result<_>>()?;

    let max = |f: fn(&TrialRecord) -> f64| records.iter().map(f).fold(0.0, f64::max);
    let mean_capacity = if n0 > 0.0 {
        let sum: f64 = records.iter().filter_map(|r| r.capacity_raw).sum();
        Some(sum / records.len() as f64)
    } else {
        None
    };
    Ok(SimReport {
        n0,
        max_mf_mismatch: max(|r| r.mf_mismatch),
        max_mmse_mismatch: max(|r| r.mmse_mismatch),
        max_residual: max(|r| r.residual_rel),
        mean_capacity,
        trials: records,
    })
}

fn run_trial(
    i: usize,
    cfg: &SimConfig,
    dims: &SystemDims,
    a_tilde: &ComplexMatrix,
    n0: f64,
    opts: &SolverOptions,
) -> Result<TrialRecord> {
    let wrap = |e: WaxError| WaxError::Trial {
        trial: i,
        source: Box::new(e),
    };
    let idx = i as u64;
    let h = rng::gaussian_matrix(
        &mut rng::stream(cfg.seed, idx, Purpose::Channel),
        dims.m,
        dims.k,
    );
    let factors = wax::wax_decompose(&h, a_tilde, dims.l, opts).map_err(wrap)?;
    let s = cfg
        .symbols
        .draw(&mut rng::stream(cfg.seed, idx, Purpose::Symbols), dims.k);
    let y = uplink_transmit(&h, &s, n0, &mut rng::stream(cfg.seed, idx, Purpose::Noise))?;

    let z = matched_filter(&h, &y)?;
    let z_dec = decentralized_receive(&factors, a_tilde, &y)?;
    let mf_mismatch = z_dec.relative_error(&z)?;

    let g = linalg::matmul(&linalg::adjoint(&h), &h)?;
    let s_raw = mmse_from_received(&h, &y, n0)?;
    let s_dec = mmse_estimates(&g, &z_dec, n0).map_err(wrap)?;
    let mmse_mismatch = s_dec.relative_error(&s_raw)?;

    let sv = linalg::singular_values(&h)?;
    let channel_condition = sv[0] / sv[sv.len() - 1];
    let (capacity_raw, capacity_post_mf) = if n0 > 0.0 {
        (Some(capacity(&h, n0)?), Some(capacity_from_gram(&g, n0)?))
    } else {
        (None, None)
    };
    Ok(TrialRecord {
        trial: i,
        mf_mismatch,
        mmse_mismatch,
        capacity_raw,
        capacity_post_mf,
        residual_rel: factors.residual_rel,
        nullspace_dim: factors.nullspace_dim,
        channel_condition,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn channel_is_seed_deterministic() {
        assert_eq!(rayleigh_channel(16, 4, 5), rayleigh_channel(16, 4, 5));
        assert_ne!(rayleigh_channel(16, 4, 5), rayleigh_channel(16, 4, 6));
    }

    #[test]
    fn noiseless_transmit_is_exact() {
        let h = rayleigh_channel(6, 2, 1);
        let s = ComplexMatrix::column(vec![c(1.0, 0.5), c(-0.3, 2.0)]);
        let y = uplink_transmit(&h, &s, 0.0, &mut rng::stream(0, 0, Purpose::Noise)).unwrap();
        assert_eq!(y, linalg::matmul(&h, &s).unwrap());
    }

    #[test]
    fn transmit_is_affine_under_fixed_noise() {
        let h = rayleigh_channel(6, 2, 1);
        let s1 = ComplexMatrix::column(vec![c(1.0, 0.5), c(-0.3, 2.0)]);
        let s2 = ComplexMatrix::column(vec![c(0.1, -0.5), c(0.7, 0.0)]);
        let tx = |s: &ComplexMatrix| {
            uplink_transmit(&h, s, 0.5, &mut rng::stream(11, 0, Purpose::Noise)).unwrap()
        };
        let zero = ComplexMatrix::zeros(2, 1);
        let combo = tx(&s1.add(&s2).unwrap())
            .sub(&tx(&s1))
            .unwrap()
            .sub(&tx(&s2))
            .unwrap()
            .add(&tx(&zero))
            .unwrap();
        assert!(combo.frobenius_norm() < 1e-12);
    }

    #[test]
    fn transmit_rejects_bad_shapes() {
        let h = rayleigh_channel(6, 2, 1);
        let s = ComplexMatrix::zeros(3, 1);
        assert!(uplink_transmit(&h, &s, 0.0, &mut rng::stream(0, 0, Purpose::Noise)).is_err());
    }

    #[test]
    fn matched_filter_examples() {
        let y = ComplexMatrix::column(vec![c(1.0, 2.0), c(-1.0, 0.5), c(0.0, 3.0)]);
        assert_eq!(matched_filter(&ComplexMatrix::identity(3), &y).unwrap(), y);

        let h = rayleigh_channel(5, 1, 2);
        let s = c(0.6, -0.8);
        let y = linalg::matmul(&h, &ComplexMatrix::column(vec![s])).unwrap();
        let z = matched_filter(&h, &y).unwrap();
        let energy = h.frobenius_norm().powi(2);
        assert!((z[(0, 0)] - s * energy).norm() < 1e-12);
    }

    #[test]
    fn mmse_examples() {
        // G = c·I: ŝ = z/(c + n0)
        let g = ComplexMatrix::identity(3).scale_real(4.0);
        let z = ComplexMatrix::column(vec![c(1.0, 1.0), c(2.0, 0.0), c(0.0, -3.0)]);
        let s = mmse_estimates(&g, &z, 1.0).unwrap();
        assert!(s.relative_error(&z.scale_real(0.2)).unwrap() < 1e-14);

        // large noise: ‖ŝ‖ ≤ ‖z‖/n0
        let h = rayleigh_channel(8, 3, 1);
        let g = linalg::matmul(&linalg::adjoint(&h), &h).unwrap();
        let s = mmse_estimates(&g, &z, 1e6).unwrap();
        assert!(s.frobenius_norm() <= z.frobenius_norm() / 1e6);
    }

    #[test]
    fn mmse_from_z_matches_raw_received() {
        let h = rayleigh_channel(10, 3, 4);
        let y = rayleigh_channel(10, 1, 5);
        let g = linalg::matmul(&linalg::adjoint(&h), &h).unwrap();
        let z = matched_filter(&h, &y).unwrap();
        for n0 in [0.0, 0.1, 3.0] {
            let a = mmse_estimates(&g, &z, n0).unwrap();
            let b = mmse_from_received(&h, &y, n0).unwrap();
            assert!(a.relative_error(&b).unwrap() < 1e-12);
        }
    }

    #[test]
    fn capacity_examples() {
        assert_eq!(capacity(&ComplexMatrix::zeros(4, 2), 1.0).unwrap(), 0.0);
        let h = ComplexMatrix::ones(16, 1);
        assert!((capacity(&h, 1.0).unwrap() - 17f64.log2()).abs() < 1e-12);

        let h = rayleigh_channel(8, 3, 3);
        assert!(capacity(&h, 0.1).unwrap() > capacity(&h, 1.0).unwrap());
        let g = linalg::matmul(&linalg::adjoint(&h), &h).unwrap();
        assert!((capacity(&h, 0.5).unwrap() - capacity_from_gram(&g, 0.5).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn qpsk_symbols_have_unit_power() {
        let s = SymbolSource::Qpsk.draw(&mut rng::stream(1, 0, Purpose::Symbols), 64);
        for z in s.as_slice() {
            assert!((z.norm() - 1.0).abs() < 1e-15);
            assert_eq!(z.re.abs(), z.im.abs());
        }
    }

    #[test]
    fn snr_conversion() {
        assert_eq!(noise_variance_from_snr_db(0.0, 10), 10.0);
        assert!((noise_variance_from_snr_db(20.0, 10) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn zero_trials_rejected() {
        let cfg = SimConfig {
            m: 8,
            k: 5,
            l: 2,
            t: 5,
            snr_db: 10.0,
            noise_variance: None,
            trials: 0,
            seed: 0,
            combiner: CombinerSource::FixtureEx3,
            symbols: SymbolSource::Qpsk,
        };
        assert!(matches!(
            run_equivalence_experiment(&cfg),
            Err(WaxError::InvalidArgument(_))
        ));
    }
}
