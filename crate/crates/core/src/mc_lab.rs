//! Monte Carlo laboratory: seeded spiked-covariance sampling, linear
//! spectral statistics, and aggregated CLT / size / power experiments.
//!
//! Replicates draw from independent keyed streams (a ChaCha key derived from
//! the experiment seed, one stream per replicate), so runs are deterministic,
//! order-free, and identical whether executed serially or in parallel.

use nalgebra::DMatrix;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::centering::centering_value;
use crate::clt_test::{clt_params_g, power, run_test};
use crate::error::{Error, Result};
use crate::spectral_fn::SpectralFunction;
use crate::spike_model::SpikedModel;

/// Distribution of the i.i.d. matrix entries (mean 0, variance 1, finite
/// fourth moment).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EntryDist {
    Gaussian,
    /// ±1 with equal probability; used for robustness smoke tests only.
    Rademacher,
}

/// Full description of one Monte Carlo experiment.
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub model: SpikedModel,
    pub reps: usize,
    pub seed: u64,
    pub entry_dist: EntryDist,
    pub test_function: SpectralFunction,
    pub alpha: f64,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.reps == 0 {
            return Err(Error::InvalidConfig("reps must be at least 1".into()));
        }
        if !self.alpha.is_finite() || self.alpha <= 0.0 || self.alpha >= 1.0 {
            return Err(Error::InvalidConfig(format!(
                "alpha must lie strictly inside (0, 1), got {}",
                self.alpha
            )));
        }
        Ok(())
    }
}

/// Per-replicate record, as dumped by `--dump-reps`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct RepRecord {
    pub rep: u64,
    /// Raw linear spectral statistic T_n(f) (equals L̃* for f = lrt_g).
    pub statistic: f64,
    /// Centered value: T_n(f) − p·centering for CLT runs, L̃* − p·G(g) for
    /// size/power runs.
    pub centered: f64,
    /// Test decision; absent for pure CLT experiments.
    pub reject: Option<bool>,
}

/// Aggregated experiment statistics.
///
/// `emp_mean`/`emp_var` describe the per-rep centered statistic;
/// `mean_se = sqrt(emp_var/reps)` and `ci95 = emp_mean ± 1.96·mean_se`.
/// Variance-derived fields are absent when reps < 2. Theory fields are
/// attached only where the asymptotic values apply (Gaussian entries,
/// f = g for the CLT pair; rejection-rate targets for size/power runs).
#[derive(Clone, Debug, Serialize)]
pub struct ExperimentReport {
    pub reps: usize,
    pub emp_mean: f64,
    pub emp_var: Option<f64>,
    pub mean_se: Option<f64>,
    pub ci95: Option<(f64, f64)>,
    pub theory_mean: Option<f64>,
    pub theory_var: Option<f64>,
    pub reject_rate: Option<f64>,
    pub reject_se: Option<f64>,
    pub theory_reject_rate: Option<f64>,
}

impl ExperimentReport {
    fn from_centered(values: &[f64]) -> Self {
        let reps = values.len();
        let emp_mean = values.iter().sum::<f64>() / reps as f64;
        let (emp_var, mean_se, ci95) = if reps >= 2 {
            let var = values.iter().map(|v| (v - emp_mean).powi(2)).sum::<f64>()
                / (reps - 1) as f64;
            let se = (var / reps as f64).sqrt();
            (Some(var), Some(se), Some((emp_mean - 1.96 * se, emp_mean + 1.96 * se)))
        } else {
            (None, None, None)
        };
        ExperimentReport {
            reps,
            emp_mean,
            emp_var,
            mean_se,
            ci95,
            theory_mean: None,
            theory_var: None,
            reject_rate: None,
            reject_se: None,
            theory_reject_rate: None,
        }
    }
}

/// Derive the per-replicate RNG: a ChaCha key expanded from the experiment
/// seed with the replicate index as the stream number.
fn rep_rng(seed: u64, rep: u64) -> ChaCha12Rng {
    fn splitmix64(state: &mut u64) -> u64 {
        *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = *state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    let mut state = seed;
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    let mut rng = ChaCha12Rng::from_seed(key);
    rng.set_stream(rep);
    rng
}

/// Draw one sample covariance spectrum, descending.
///
/// The population square root is applied as diagonal row scaling: row i of
/// the p×n entry matrix is scaled by √a for spike rows (spikes in decreasing
/// order, repeated by multiplicity) and left unscaled otherwise, then
/// S = Z Zᵀ / n is diagonalized. Deterministic given (seed, rep_index).
pub fn sample_eigenvalues(config: &ExperimentConfig, rep: u64) -> Result<Vec<f64>> {
    let model = &config.model;
    let p = model.p();
    let n = model.n();

    let mut row_scale = Vec::with_capacity(p);
    for s in model.spikes() {
        row_scale.extend(std::iter::repeat_n(s.value.sqrt(), s.mult));
    }
    row_scale.resize(p, 1.0);

    let mut rng = rep_rng(config.seed, rep);
    let mut data = vec![0.0f64; p * n];
    match config.entry_dist {
        EntryDist::Gaussian => {
            for (i, row) in data.chunks_exact_mut(n).enumerate() {
                let scale = row_scale[i];
                for v in row {
                    let g: f64 = rng.sample(rand_distr::StandardNormal);
                    *v = scale * g;
                }
            }
        }
        EntryDist::Rademacher => {
            for (i, row) in data.chunks_exact_mut(n).enumerate() {
                let scale = row_scale[i];
                for v in row {
                    *v = if rng.random::<bool>() { scale } else { -scale };
                }
            }
        }
    }

    let z = DMatrix::from_row_slice(p, n, &data);
    let s = &z * z.transpose() / n as f64;
    let mut eigs: Vec<f64> = s.symmetric_eigenvalues().iter().copied().collect();
    if eigs.iter().any(|e| !e.is_finite()) || eigs.len() != p {
        return Err(Error::Eigensolver {
            rep,
            details: "non-finite eigenvalue in the decomposition".into(),
        });
    }
    eigs.sort_by(|a, b| b.total_cmp(a));
    Ok(eigs)
}

/// Eigenvalues (descending) of S = XᵀX/n for a dataset whose rows are the
/// n observations. With `center` the column means are removed first; the
/// divisor stays n either way.
pub fn sample_cov_eigenvalues(observations: &[Vec<f64>], center: bool) -> Result<Vec<f64>> {
    let n = observations.len();
    if n == 0 {
        return Err(Error::InvalidConfig("dataset has no observations".into()));
    }
    let p = observations[0].len();
    if p == 0 || observations.iter().any(|row| row.len() != p) {
        return Err(Error::InvalidConfig(
            "dataset rows must be non-empty and of equal length".into(),
        ));
    }
    if p >= n {
        return Err(Error::Domain(format!(
            "the test needs more observations than variables (n > p), got p = {p}, n = {n}"
        )));
    }
    let mut x = DMatrix::from_fn(n, p, |i, j| observations[i][j]);
    if center {
        for j in 0..p {
            let mean = x.column(j).sum() / n as f64;
            for i in 0..n {
                x[(i, j)] -= mean;
            }
        }
    }
    let s = x.transpose() * &x / n as f64;
    let mut eigs: Vec<f64> = s.symmetric_eigenvalues().iter().copied().collect();
    if eigs.iter().any(|e| !e.is_finite()) {
        return Err(Error::Eigensolver {
            rep: 0,
            details: "non-finite eigenvalue in the dataset decomposition".into(),
        });
    }
    eigs.sort_by(|a, b| b.total_cmp(a));
    Ok(eigs)
}

/// Linear spectral statistic T(f) = Σ f(λ_i).
pub fn lss(eigenvalues: &[f64], f: &SpectralFunction) -> Result<f64> {
    let mut total = 0.0;
    for &lambda in eigenvalues {
        if !f.domain().contains_real(lambda) {
            return Err(Error::Domain(format!(
                "{} is undefined at the sample eigenvalue {lambda}",
                f.name()
            )));
        }
        total += f.eval_real(lambda);
    }
    Ok(total)
}

/// CLT experiment: per replicate computes X(f) = T(f) − p·F(f) with the
/// spike-corrected centering F(f), and aggregates mean/variance.
pub fn run_clt_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    run_clt_experiment_detailed(config).map(|(report, _)| report)
}

/// [`run_clt_experiment`] plus the per-replicate records.
pub fn run_clt_experiment_detailed(
    config: &ExperimentConfig,
) -> Result<(ExperimentReport, Vec<RepRecord>)> {
    config.validate()?;
    let centering = centering_value(&config.test_function, &config.model)?.total;
    let p = config.model.p() as f64;

    let records: Vec<RepRecord> = (0..config.reps as u64)
        .into_par_iter()
        .map(|rep| -> Result<RepRecord> {
            let eigs = sample_eigenvalues(config, rep)?;
            let statistic = lss(&eigs, &config.test_function)?;
            Ok(RepRecord { rep, statistic, centered: statistic - p * centering, reject: None })
        })
        .collect::<Result<Vec<_>>>()?;

    let centered: Vec<f64> = records.iter().map(|r| r.centered).collect();
    let mut report = ExperimentReport::from_centered(&centered);
    let y = config.model.aspect_ratio();
    if config.test_function.name() == "lrt_g"
        && config.entry_dist == EntryDist::Gaussian
        && y < 1.0
    {
        let (m_g, v_g) = clt_params_g(y)?;
        report.theory_mean = Some(m_g);
        report.theory_var = Some(v_g);
    }
    Ok((report, records))
}

/// Size/power experiment: per replicate runs the corrected likelihood-ratio
/// test and aggregates the rejection rate against its asymptotic target
/// (α under the null model, the power function under a spiked model).
pub fn empirical_size_power(config: &ExperimentConfig) -> Result<ExperimentReport> {
    empirical_size_power_detailed(config).map(|(report, _)| report)
}

/// [`empirical_size_power`] plus the per-replicate records.
pub fn empirical_size_power_detailed(
    config: &ExperimentConfig,
) -> Result<(ExperimentReport, Vec<RepRecord>)> {
    config.validate()?;
    if config.entry_dist != EntryDist::Gaussian {
        return Err(Error::InvalidConfig(
            "size/power experiments require Gaussian entries (the CLT constants are \
             Gaussian-case values)"
                .into(),
        ));
    }
    let model = &config.model;
    let y = model.aspect_ratio();
    if y >= 1.0 {
        return Err(Error::Domain(format!(
            "the likelihood-ratio test requires p < n, got y_n = {y}"
        )));
    }

    let records: Vec<RepRecord> = (0..config.reps as u64)
        .into_par_iter()
        .map(|rep| -> Result<RepRecord> {
            let eigs = sample_eigenvalues(config, rep)?;
            let outcome = run_test(&eigs, model.p(), model.n(), config.alpha)?;
            Ok(RepRecord {
                rep,
                statistic: outcome.statistic,
                centered: outcome.centered,
                reject: Some(outcome.reject),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let centered: Vec<f64> = records.iter().map(|r| r.centered).collect();
    let mut report = ExperimentReport::from_centered(&centered);
    let rejections = records.iter().filter(|r| r.reject == Some(true)).count();
    let rate = rejections as f64 / config.reps as f64;
    report.reject_rate = Some(rate);
    report.reject_se = Some((rate * (1.0 - rate) / config.reps as f64).sqrt());
    report.theory_reject_rate = Some(if model.total_spike_mult() == 0 {
        config.alpha
    } else {
        power(model, config.alpha)?
    });
    if model.total_spike_mult() == 0 {
        let (m_g, v_g) = clt_params_g(y)?;
        report.theory_mean = Some(m_g);
        report.theory_var = Some(v_g);
    }
    Ok((report, records))
}
