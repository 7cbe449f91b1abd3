use std::sync::Arc;

use serde::Serialize;

use crate::analysis::{
    alpha_delta, closeness_report, delta_bounds_prop1, delta_bounds_prop2, delta_bounds_prop3,
    is_submodular_bruteforce, ros_membership, tight_bounds, total_curvature, verify_sandwich,
    AlphaDelta, Candidate, ClosenessReport, DeltaBounds, RosReport, SandwichReport, EXACT_LIMIT,
    SCAN_LIMIT,
};
use crate::bounds::{bound_bian, bound_conforti, bound_delta, feasibility, BoundKind, Budget};
use crate::error::{Error, Result};
use crate::setfn::{GramianModel, Modular, SetFunction, Subset, TabularFunction};

use super::{objective, ExperimentConfig, ObjectiveName, SurrogateName};

pub enum AnalyzeInput {
    /// Sensor columns; `β` comes from the model.
    Gramian(Arc<GramianModel>),
    Tabular(TabularFunction),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurrogateAnalysis {
    pub name: String,
    pub bounds: Option<DeltaBounds>,
    /// `closed-form`, `empirical` or `exact`.
    pub bounds_source: Option<String>,
    pub total_curvature: Option<f64>,
    pub sandwich: Option<SandwichReport>,
    pub ros: Option<RosReport>,
    pub closeness: ClosenessReport,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundLine {
    pub kind: BoundKind,
    pub surrogate: Option<String>,
    pub finite: f64,
    pub limit: f64,
    pub feasible: bool,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalyzeReport {
    pub source: &'static str,
    pub objective: String,
    pub ground: usize,
    pub k: usize,
    pub beta: Option<f64>,
    pub submodular: Option<bool>,
    pub closeness: ClosenessReport,
    pub surrogates: Vec<SurrogateAnalysis>,
    pub alpha_delta: Option<AlphaDelta>,
    pub bounds: Vec<BoundLine>,
    pub notes: Vec<String>,
}

/// Errors that describe the instance rather than a failure to analyze it.
fn soft<T>(r: Result<T>) -> Result<std::result::Result<T, String>> {
    match r {
        Ok(v) => Ok(Ok(v)),
        Err(
            e @ (Error::ZeroDenominator { .. }
            | Error::AllSingletonsDegenerate
            | Error::DenominatorDegenerate { .. }
            | Error::Unbounded(_)
            | Error::Infeasible(_)
            | Error::NoFeasibleSurrogate { .. }
            | Error::TooLarge { .. }
            | Error::InvalidParameter(_)),
        ) => Ok(Err(e.to_string())),
        Err(e) => Err(e),
    }
}

struct Entry<'a> {
    name: String,
    g: &'a dyn SetFunction,
    bounds: std::result::Result<(DeltaBounds, &'static str), String>,
}

fn closed_form(
    model: &GramianModel,
    obj: ObjectiveName,
    sur: SurrogateName,
    cfg: &ExperimentConfig,
) -> Option<Result<DeltaBounds>> {
    match (obj, sur) {
        (ObjectiveName::NegTraceInv, SurrogateName::LogDet) => Some(delta_bounds_prop1(model)),
        (ObjectiveName::MinEig, SurrogateName::Trace) => {
            Some(delta_bounds_prop2(model, cfg.interp))
        }
        (ObjectiveName::MinEig, SurrogateName::MaxEig) => {
            Some(delta_bounds_prop3(model, cfg.interp))
        }
        _ => None,
    }
}

fn empirical(
    f: &dyn SetFunction,
    g: &dyn SetFunction,
) -> Result<std::result::Result<DeltaBounds, String>> {
    if f.ground_size() > SCAN_LIMIT {
        return Ok(Err(format!(
            "no closed-form bounds and N = {} is too large to scan",
            f.ground_size()
        )));
    }
    Ok(match soft(tight_bounds(f, g))? {
        Ok((lo, hi)) => soft(DeltaBounds::asymmetric(lo, hi))?,
        Err(e) => Err(e),
    })
}

fn analyze_surrogate(
    f: &dyn SetFunction,
    e: &Entry<'_>,
    cfg: &ExperimentConfig,
) -> Result<SurrogateAnalysis> {
    let n = f.ground_size();
    let exact = n <= cfg.exact_threshold;
    let mut notes = Vec::new();
    let total = match soft(total_curvature(e.g))? {
        Ok(c) => Some(c.value),
        Err(m) => {
            notes.push(m);
            None
        }
    };
    let (bounds, source) = match &e.bounds {
        Ok((b, s)) => (Some(*b), Some(s.to_string())),
        Err(m) => {
            notes.push(m.clone());
            (None, None)
        }
    };
    let sandwich = match bounds {
        Some(b) if exact && n <= SCAN_LIMIT => Some(verify_sandwich(f, e.g, &b)?),
        _ => None,
    };
    let ros = match bounds {
        Some(b) if exact && n <= EXACT_LIMIT => match soft(ros_membership(f, e.g, b.envelope()))? {
            Ok(r) => Some(r),
            Err(m) => {
                notes.push(m);
                None
            }
        },
        _ => None,
    };
    let closeness = closeness_report(
        f,
        Some(e.g),
        cfg.k,
        cfg.exact_threshold,
        cfg.samples,
        cfg.seed,
    )?;
    Ok(SurrogateAnalysis {
        name: e.name.clone(),
        bounds,
        bounds_source: source,
        total_curvature: total,
        sandwich,
        ros,
        closeness,
        notes,
    })
}

fn both(f: impl Fn(Budget) -> Result<f64>, k: usize) -> Result<(f64, f64)> {
    Ok((f(Budget::Finite(k))?, f(Budget::Limit)?))
}

/// Every measure and guarantee the instance size permits.
pub fn analyze(input: &AnalyzeInput, cfg: &ExperimentConfig) -> Result<AnalyzeReport> {
    let n = match input {
        AnalyzeInput::Gramian(m) => m.ground(),
        AnalyzeInput::Tabular(t) => t.ground_size(),
    };
    if cfg.k == 0 || cfg.k > n {
        return Err(Error::InvalidBudget {
            k: cfg.k,
            ground: n,
        });
    }
    match input {
        AnalyzeInput::Gramian(model) => {
            let f = objective(model, cfg.objective.kind())?;
            let gs = cfg
                .surrogates
                .iter()
                .map(|&s| objective(model, s.kind()))
                .collect::<Result<Vec<_>>>()?;
            let mut entries = Vec::new();
            for (&s, g) in cfg.surrogates.iter().zip(&gs) {
                let bounds = match closed_form(model, cfg.objective, s, cfg) {
                    Some(r) => match soft(r)? {
                        Ok(b) => Ok((b, "closed-form")),
                        Err(m) => Err(m),
                    },
                    None => empirical(&f, g)?.map(|b| (b, "empirical")),
                };
                entries.push(Entry {
                    name: s.name().to_string(),
                    g,
                    bounds,
                });
            }
            let mut rep = finish(&f, &entries, cfg, "gramian", cfg.objective.kind().name())?;
            rep.beta = Some(model.beta());
            Ok(rep)
        }
        AnalyzeInput::Tabular(t) => {
            let mut notes = Vec::new();
            let singletons = (0..n)
                .map(|a| t.evaluate(Subset::from_indices(&[a], n)?))
                .collect::<Result<Vec<f64>>>()?;
            let fit = Modular::new(singletons)?;
            let self_sub = n <= SCAN_LIMIT && is_submodular_bruteforce(t, 1e-9)?.submodular;
            let mut entries = Vec::new();
            if self_sub {
                entries.push(Entry {
                    name: "self".into(),
                    g: t,
                    bounds: Ok((DeltaBounds::symmetric(0.0)?, "exact")),
                });
            } else {
                notes.push(
                    "input is not submodular, so it cannot serve as its own surrogate".into(),
                );
            }
            entries.push(Entry {
                name: "modular-fit".into(),
                g: &fit,
                bounds: empirical(t, &fit)?.map(|b| (b, "empirical")),
            });
            let mut rep = finish(t, &entries, cfg, "tabular", "tabular")?;
            rep.notes.extend(notes);
            Ok(rep)
        }
    }
}

fn finish(
    f: &dyn SetFunction,
    entries: &[Entry<'_>],
    cfg: &ExperimentConfig,
    source: &'static str,
    objective_name: &str,
) -> Result<AnalyzeReport> {
    let n = f.ground_size();
    let k = cfg.k;
    let closeness = closeness_report(f, None, k, cfg.exact_threshold, cfg.samples, cfg.seed)?;
    let submodular = if n <= cfg.exact_threshold && n <= SCAN_LIMIT {
        Some(is_submodular_bruteforce(f, 1e-9)?.submodular)
    } else {
        None
    };
    let surrogates = entries
        .iter()
        .map(|e| analyze_surrogate(f, e, cfg))
        .collect::<Result<Vec<_>>>()?;
    let mut notes = Vec::new();
    let mut bounds = Vec::new();

    let gamma = closeness.gamma_f.value.map(|g| g.clamp(0.0, 1.0));
    match (submodular, closeness.alpha_total.value) {
        (Some(true), Some(a)) => {
            let (finite, limit) = both(|b| bound_conforti(a.clamp(0.0, 1.0), b), k)?;
            bounds.push(BoundLine {
                kind: BoundKind::TotalCurvature,
                surrogate: None,
                finite,
                limit,
                feasible: true,
                note: None,
            });
        }
        (Some(false), _) => {
            notes.push("total-curvature bound omitted: objective is not submodular".into())
        }
        _ => notes
            .push("total-curvature bound omitted: submodularity or curvature unavailable".into()),
    }
    match (gamma, closeness.alpha_generalized.value) {
        (Some(g), Some(a)) => {
            let (finite, limit) = both(|b| bound_bian(a.clamp(0.0, 1.0), g, b), k)?;
            bounds.push(BoundLine {
                kind: BoundKind::RatioCurvature,
                surrogate: None,
                finite,
                limit,
                feasible: true,
                note: Some(
                    "submodularity ratio and generalized curvature computed exhaustively".into(),
                ),
            });
        }
        _ => notes
            .push("ratio-curvature bound omitted: exact measures unavailable at this size".into()),
    }

    let mut cands = Vec::new();
    for (e, s) in entries.iter().zip(&surrogates) {
        let (Some(b), Some(a)) = (s.bounds, s.total_curvature) else {
            continue;
        };
        let verified = s.sandwich.as_ref().is_none_or(|w| w.holds);
        let (feasible, note) = match gamma {
            Some(g) => match soft(feasibility(&b, g))? {
                Ok(fz) => (fz.feasible && verified, Some(fz.reason)),
                Err(m) => (false, Some(m)),
            },
            None => (verified, None),
        };
        let (finite, limit) = match soft(both(|bud| bound_delta(a, &b, bud), k))? {
            Ok(v) => v,
            Err(m) => {
                notes.push(format!("{}: {m}", e.name));
                continue;
            }
        };
        bounds.push(BoundLine {
            kind: BoundKind::DeltaApproximation,
            surrogate: Some(e.name.clone()),
            finite,
            limit,
            feasible,
            note,
        });
        cands.push(Candidate {
            name: e.name.clone(),
            surrogate: e.g,
            bounds: b,
        });
    }
    let widest = cands
        .iter()
        .map(|c| c.bounds.symmetric_equivalent())
        .fold(0.0f64, f64::max);
    let ad = if cands.is_empty() {
        None
    } else {
        match soft(alpha_delta(f, &cands, widest, cfg.exact_threshold))? {
            Ok(a) => Some(a),
            Err(m) => {
                notes.push(m);
                None
            }
        }
    };
    Ok(AnalyzeReport {
        source,
        objective: objective_name.to_string(),
        ground: n,
        k,
        beta: None,
        submodular,
        closeness,
        surrogates,
        alpha_delta: ad,
        bounds,
        notes,
    })
}
