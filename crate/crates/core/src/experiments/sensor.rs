use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrixcore::cholesky;
use crate::rng::SplitMix64;
use crate::setfn::{GramianModel, SetFunction, Subset};
use crate::solvers::{greedy, sample_subsets, Summary};

use super::{objective, ExperimentConfig, ObjectiveName};

/// Monte-Carlo squared error of the posterior-mean estimate of `θ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MseEstimate {
    pub mean: f64,
    pub std_error: f64,
    /// `tr(W_S⁻¹)`, the exact expected squared error.
    pub analytic: f64,
}

/// One draw of `(θ, w)` over every sensor.
struct Draw {
    theta: Vec<f64>,
    y: Vec<f64>,
}

fn draws(model: &GramianModel, trials: usize, seed: u64) -> Vec<Draw> {
    let (n, ground, beta) = (model.dim(), model.ground(), model.beta());
    (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = SplitMix64::derive(seed, t as u64);
            let theta: Vec<f64> = (0..n).map(|_| rng.next_normal() / beta).collect();
            let y = (0..ground)
                .map(|j| {
                    let x = model.column(j);
                    x.iter().zip(&theta).map(|(a, b)| a * b).sum::<f64>() + rng.next_normal()
                })
                .collect();
            Draw { theta, y }
        })
        .collect()
}

fn mse_with(model: &GramianModel, set: Subset, draws: &[Draw]) -> Result<MseEstimate> {
    if draws.is_empty() {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    let chol = cholesky(&model.gramian(set))?;
    let n = model.dim();
    let mut errors = Vec::with_capacity(draws.len());
    let mut b = vec![0.0; n];
    for d in draws {
        b.iter_mut().for_each(|v| *v = 0.0);
        for j in set.iter() {
            for (bi, xi) in b.iter_mut().zip(model.column(j)) {
                *bi += xi * d.y[j];
            }
        }
        let est = chol.solve(&b)?;
        errors.push(
            est.iter()
                .zip(&d.theta)
                .map(|(a, t)| (a - t) * (a - t))
                .sum::<f64>(),
        );
    }
    let m = errors.len() as f64;
    let mean = errors.iter().sum::<f64>() / m;
    let var = if errors.len() > 1 {
        errors.iter().map(|e| (e - mean) * (e - mean)).sum::<f64>() / (m - 1.0)
    } else {
        0.0
    };
    Ok(MseEstimate {
        mean,
        std_error: (var / m).sqrt(),
        analytic: chol.trace_inverse(),
    })
}

/// Empirical `E‖θ̂ - θ‖²` for sensors `set` under `θ ~ N(0, β⁻² I)` and unit
/// noise. Trial `t` draws from substream `t` of `seed`, so two sets see the
/// same `(θ, w)` sequence.
pub fn mse_monte_carlo(
    model: &GramianModel,
    set: Subset,
    trials: usize,
    seed: u64,
) -> Result<MseEstimate> {
    if set.ground() != model.ground() {
        return Err(Error::DimensionMismatch {
            expected: model.ground(),
            found: set.ground(),
        });
    }
    mse_with(model, set, &draws(model, trials, seed))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BudgetRow {
    pub k: usize,
    pub greedy_set: Vec<usize>,
    pub greedy_value: f64,
    pub greedy_mse: MseEstimate,
    /// `log det W_S⁻¹`, the error entropy up to constants.
    pub greedy_log_det_cov: f64,
    pub random_value: Summary,
    pub random_mse: Summary,
    pub random_log_det_cov: Summary,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SensorReport {
    pub seed: u64,
    pub n: usize,
    pub ground: usize,
    pub beta: f64,
    pub objective: ObjectiveName,
    pub trials: usize,
    pub random_sets: usize,
    pub budgets: Vec<BudgetRow>,
}

const MC_STREAM: u64 = 0x4d43;
const BASELINE_STREAM: u64 = 0x5253;

/// Greedy versus uniformly random sensor sets for every budget `1..=k`.
/// The greedy rows are prefixes of a single run to `k`. Columns keep their
/// raw Gaussian norms: with unit columns every single sensor carries the
/// same information and budget 1 would compare noise against noise.
pub fn sensor_select(cfg: &ExperimentConfig) -> Result<SensorReport> {
    cfg.validate()?;
    let model = Arc::new(GramianModel::gaussian(
        cfg.n, cfg.ground, cfg.beta, cfg.seed, false,
    )?);
    sensor_select_on(model, cfg)
}

pub(crate) fn sensor_select_on(
    model: Arc<GramianModel>,
    cfg: &ExperimentConfig,
) -> Result<SensorReport> {
    let f = objective(&model, cfg.objective.kind())?;
    let trace = greedy(&f, cfg.k)?;
    let mc_seed = SplitMix64::derive(cfg.seed, MC_STREAM).next_u64();
    let draws = draws(&model, cfg.trials, mc_seed);
    let log_det_cov = |s: Subset| -> Result<f64> { Ok(-cholesky(&model.gramian(s))?.log_det()) };

    let mut budgets = Vec::with_capacity(cfg.k);
    for k in 1..=cfg.k {
        let set = trace.selection.prefix(k);
        let seed = SplitMix64::derive(cfg.seed, BASELINE_STREAM + k as u64).next_u64();
        let sets = sample_subsets(model.ground(), k, cfg.random_sets, seed)?;
        let random = sets
            .par_iter()
            .map(|&s| {
                Ok((
                    f.evaluate(s)?,
                    mse_with(&model, s, &draws)?.mean,
                    log_det_cov(s)?,
                ))
            })
            .collect::<Result<Vec<(f64, f64, f64)>>>()?;
        let col = |i: usize| -> Vec<f64> {
            random
                .iter()
                .map(|r| match i {
                    0 => r.0,
                    1 => r.1,
                    _ => r.2,
                })
                .collect()
        };
        budgets.push(BudgetRow {
            k,
            greedy_set: set.to_vec(),
            greedy_value: trace.selection.prefix_value(k),
            greedy_mse: mse_with(&model, set, &draws)?,
            greedy_log_det_cov: log_det_cov(set)?,
            random_value: Summary::from_values(&col(0))?,
            random_mse: Summary::from_values(&col(1))?,
            random_log_det_cov: Summary::from_values(&col(2))?,
        });
    }
    Ok(SensorReport {
        seed: cfg.seed,
        n: model.dim(),
        ground: model.ground(),
        beta: model.beta(),
        objective: cfg.objective,
        trials: cfg.trials,
        random_sets: cfg.random_sets,
        budgets,
    })
}
