//! Seeded experiment drivers behind the command-line tool.

mod analyze;
mod fixtures;
mod sensor;
mod sweep;
pub mod verify;

use std::fmt::Write as _;

use serde::Serialize;

pub use analyze::{analyze, AnalyzeInput, AnalyzeReport, SurrogateAnalysis};
pub use fixtures::{
    min_eig_witness, neg_trace_inv_witness, WITNESS_BETA, WITNESS_DIM, WITNESS_GROUND, WITNESS_SEED,
};
pub use sensor::{mse_monte_carlo, sensor_select, BudgetRow, MseEstimate, SensorReport};
pub use sweep::{sweep_beta, sweep_to_csv, SweepReport, SweepRow};
pub use verify::{run_all, run_suite, Failure, SuiteOutcome, EXTRA_SUITES, SUITES};

use crate::analysis::SingletonMatrix;
use crate::error::{Error, Result};
use crate::setfn::{GramianModel, GramianObjective, ObjectiveKind};

/// Objective being maximized in the Gramian experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ObjectiveName {
    NegTraceInv,
    MinEig,
}

impl ObjectiveName {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "neg-trace-inv" => Ok(ObjectiveName::NegTraceInv),
            "min-eig" => Ok(ObjectiveName::MinEig),
            _ => Err(Error::InvalidParameter(format!(
                "unknown objective `{s}` (expected neg-trace-inv or min-eig)"
            ))),
        }
    }

    pub fn kind(self) -> ObjectiveKind {
        match self {
            ObjectiveName::NegTraceInv => ObjectiveKind::NegTraceInv,
            ObjectiveName::MinEig => ObjectiveKind::MinEig,
        }
    }
}

/// Submodular surrogate paired with the objective.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SurrogateName {
    LogDet,
    Trace,
    MaxEig,
}

impl SurrogateName {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "log-det" => Ok(SurrogateName::LogDet),
            "trace" => Ok(SurrogateName::Trace),
            "max-eig" => Ok(SurrogateName::MaxEig),
            _ => Err(Error::InvalidParameter(format!(
                "unknown surrogate `{s}` (expected log-det, trace or max-eig)"
            ))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SurrogateName::LogDet => "log-det",
            SurrogateName::Trace => "trace",
            SurrogateName::MaxEig => "max-eig",
        }
    }

    pub fn kind(self) -> ObjectiveKind {
        match self {
            SurrogateName::LogDet => ObjectiveKind::LogDet,
            SurrogateName::Trace => ObjectiveKind::Trace,
            SurrogateName::MaxEig => ObjectiveKind::MaxEig,
        }
    }
}

/// `start:stop:points[,log]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BetaGrid {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    pub log: bool,
}

impl Default for BetaGrid {
    fn default() -> Self {
        Self {
            start: 0.1,
            stop: 100.0,
            points: 31,
            log: true,
        }
    }
}

impl BetaGrid {
    pub fn parse(s: &str) -> Result<Self> {
        let bad = || {
            Error::InvalidParameter(format!(
                "beta grid `{s}` must look like start:stop:points or start:stop:points,log"
            ))
        };
        let (body, log) = match s.strip_suffix(",log") {
            Some(b) => (b, true),
            None => (s, false),
        };
        let parts: Vec<&str> = body.split(':').collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        let grid = Self {
            start: parts[0].trim().parse().map_err(|_| bad())?,
            stop: parts[1].trim().parse().map_err(|_| bad())?,
            points: parts[2].trim().parse().map_err(|_| bad())?,
            log,
        };
        grid.check()?;
        Ok(grid)
    }

    fn check(&self) -> Result<()> {
        let ok = self.points >= 1
            && self.start > 0.0
            && self.start.is_finite()
            && self.stop.is_finite()
            && (self.points == 1 || self.stop > self.start);
        if !ok {
            return Err(Error::InvalidParameter(format!(
                "beta grid needs 0 < start < stop and at least one point, got {}:{}:{}",
                self.start, self.stop, self.points
            )));
        }
        Ok(())
    }

    /// Strictly increasing grid values.
    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.start];
        }
        let last = (self.points - 1) as f64;
        (0..self.points)
            .map(|i| {
                let t = i as f64 / last;
                if self.log {
                    (self.start.ln() + t * (self.stop.ln() - self.start.ln())).exp()
                } else {
                    self.start + t * (self.stop - self.start)
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => Err(Error::InvalidParameter(format!(
                "unknown format `{s}` (expected csv or json)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub n: usize,
    pub ground: usize,
    pub k: usize,
    /// Single β, used where a grid is not.
    pub beta: f64,
    pub beta_grid: BetaGrid,
    pub objective: ObjectiveName,
    pub surrogates: Vec<SurrogateName>,
    /// Monte-Carlo draws for the estimation error.
    pub trials: usize,
    /// Random subsets per budget for the baseline.
    pub random_sets: usize,
    pub exact_threshold: usize,
    pub interp: SingletonMatrix,
    /// Random pairs for sampled divergence above the exact threshold.
    pub samples: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            n: 10,
            ground: 30,
            k: 5,
            beta: 1.0,
            beta_grid: BetaGrid::default(),
            objective: ObjectiveName::NegTraceInv,
            surrogates: vec![SurrogateName::LogDet],
            trials: 500,
            random_sets: 100,
            exact_threshold: 12,
            interp: SingletonMatrix::IncludeBase,
            samples: 10_000,
        }
    }
}

impl ExperimentConfig {
    /// Every violated constraint, one per line item.
    pub fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.n == 0 {
            out.push("n must be positive".to_string());
        }
        if self.ground == 0 {
            out.push("N must be positive".to_string());
        }
        if self.ground > crate::setfn::MAX_GROUND {
            out.push(format!("N must be at most {}", crate::setfn::MAX_GROUND));
        }
        if self.k == 0 {
            out.push("k must be positive".to_string());
        }
        if self.k > self.ground {
            out.push(format!("k = {} exceeds N = {}", self.k, self.ground));
        }
        if !(self.beta > 0.0) || !self.beta.is_finite() {
            out.push(format!("beta must be positive, got {}", self.beta));
        }
        if let Err(e) = self.beta_grid.check() {
            out.push(e.to_string());
        }
        if self.trials == 0 {
            out.push("trials must be positive".to_string());
        }
        if self.random_sets == 0 {
            out.push("random-sets must be positive".to_string());
        }
        if self.samples == 0 {
            out.push("samples must be positive".to_string());
        }
        if self.surrogates.is_empty() {
            out.push("at least one surrogate is required".to_string());
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let p = self.problems();
        if p.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidParameter(p.join("; ")))
        }
    }
}

pub(crate) fn objective(
    model: &std::sync::Arc<GramianModel>,
    kind: ObjectiveKind,
) -> Result<GramianObjective> {
    GramianObjective::new(model.clone(), kind)
}

/// Quotes nothing: every field written here is numeric or a plain token.
pub(crate) fn csv_field(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub(crate) fn csv_line(out: &mut String, fields: &[String]) {
    let _ = writeln!(out, "{}", fields.join(","));
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        let g = BetaGrid::parse("0.1:100:4,log").unwrap();
        let v = g.values();
        assert_eq!(v.len(), 4);
        assert!((v[0] - 0.1).abs() < 1e-15 && (v[3] - 100.0).abs() < 1e-12);
        assert!((v[1] - 1.0).abs() < 1e-12);
        assert!(v.windows(2).all(|w| w[0] < w[1]));
        let g = BetaGrid::parse("1:3:3").unwrap();
        assert_eq!(g.values(), vec![1.0, 2.0, 3.0]);
        assert!(BetaGrid::parse("0:1:3").is_err());
        assert!(BetaGrid::parse("2:1:3").is_err());
        assert!(BetaGrid::parse("1:2").is_err());
        assert_eq!(BetaGrid::parse("5:5:1").unwrap().values(), vec![5.0]);
    }

    #[test]
    fn config_problems_are_itemized() {
        let c = ExperimentConfig {
            n: 0,
            k: 40,
            beta: -1.0,
            ..ExperimentConfig::default()
        };
        let p = c.problems();
        assert_eq!(p.len(), 3, "{p:?}");
        assert!(ExperimentConfig::default().validate().is_ok());
    }
}
