use serde::Serialize;

use crate::error::{Error, Result};
use crate::setfn::SetFunction;
use crate::solvers::{exhaustive_opt, greedy, MAX_EXHAUSTIVE};

use super::measures::{
    divergence_exact, divergence_sampled, generalized_curvature_exact, greedy_curvature,
    lemma1_min_delta, submodularity_ratio_exact, total_curvature,
};
use super::{EXACT_LIMIT, SCAN_LIMIT};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exact,
    /// A lower bound from random pairs.
    Sampled,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Measure {
    pub value: Option<f64>,
    pub method: Method,
    pub note: Option<String>,
}

impl Measure {
    fn exact(v: f64) -> Self {
        Self {
            value: Some(v),
            method: Method::Exact,
            note: None,
        }
    }

    fn skipped(note: impl Into<String>) -> Self {
        Self {
            value: None,
            method: Method::Skipped,
            note: Some(note.into()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClosenessReport {
    pub ground: usize,
    pub k: usize,
    pub gamma_f: Measure,
    /// Total curvature of the surrogate, or of `f` when none is given.
    pub alpha_total: Measure,
    pub alpha_generalized: Measure,
    pub alpha_greedy: Measure,
    pub divergence: Measure,
    pub lemma1_min_delta: Measure,
}

fn too_large(n: usize, limit: usize) -> Measure {
    Measure::skipped(format!(
        "ground set {n} exceeds the exact threshold {limit}"
    ))
}

fn soft(r: Result<Measure>) -> Result<Measure> {
    match r {
        Ok(m) => Ok(m),
        Err(
            e @ (Error::ZeroDenominator { .. }
            | Error::AllSingletonsDegenerate
            | Error::DenominatorDegenerate { .. }),
        ) => Ok(Measure::skipped(e.to_string())),
        Err(e) => Err(e),
    }
}

/// Every closeness measure the instance size allows. Exhaustive measures run
/// when the ground set is at most `exact_threshold`; the divergence falls
/// back to `samples` random pairs above it.
pub fn closeness_report(
    f: &dyn SetFunction,
    g: Option<&dyn SetFunction>,
    k: usize,
    exact_threshold: usize,
    samples: usize,
    seed: u64,
) -> Result<ClosenessReport> {
    let n = f.ground_size();
    let exact = n <= exact_threshold;

    let gamma_f = if exact && n <= EXACT_LIMIT {
        Measure::exact(submodularity_ratio_exact(f)?.value)
    } else {
        too_large(n, exact_threshold.min(EXACT_LIMIT))
    };
    let lemma1 = match gamma_f.value {
        Some(gm) => Measure::exact(lemma1_min_delta(gm.clamp(0.0, 1.0))?),
        None => Measure::skipped("requires the submodularity ratio"),
    };
    let alpha_total = soft(total_curvature(g.unwrap_or(f)).map(|c| Measure::exact(c.value)))?;
    let alpha_generalized = if exact && n <= EXACT_LIMIT {
        Measure::exact(generalized_curvature_exact(f)?.value)
    } else {
        too_large(n, exact_threshold.min(EXACT_LIMIT))
    };
    let alpha_greedy = if exact && n <= MAX_EXHAUSTIVE {
        let tr = greedy(f, k)?;
        let opt = exhaustive_opt(f, k)?;
        soft(greedy_curvature(f, &tr, &opt).map(Measure::exact))?
    } else {
        too_large(n, exact_threshold.min(MAX_EXHAUSTIVE))
    };
    let divergence = match g {
        None => Measure::skipped("no surrogate supplied"),
        Some(g) if exact && n <= SCAN_LIMIT => {
            soft(divergence_exact(f, g).map(|d| Measure::exact(d.value)))?
        }
        Some(g) => soft(
            divergence_sampled(f, g, samples.max(1), seed).map(|d| Measure {
                value: Some(d.value),
                method: Method::Sampled,
                note: Some(format!("lower bound from {} sampled pairs", samples.max(1))),
            }),
        )?,
    };
    Ok(ClosenessReport {
        ground: n,
        k,
        gamma_f,
        alpha_total,
        alpha_generalized,
        alpha_greedy,
        divergence,
        lemma1_min_delta: lemma1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::setfn::{random_tabular, Modular, TabularFamily};

    #[test]
    fn modular_report() {
        let f = Modular::new(vec![1.0; 6]).unwrap();
        let r = closeness_report(&f, Some(&f), 3, 12, 100, 0).unwrap();
        assert_eq!(r.gamma_f.value, Some(1.0));
        assert_eq!(r.alpha_total.value, Some(0.0));
        assert_eq!(r.alpha_generalized.value, Some(0.0));
        assert_eq!(r.alpha_greedy.value, Some(0.0));
        assert_eq!(r.divergence.value, Some(0.0));
        assert_eq!(r.lemma1_min_delta.value, Some(0.0));
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains(r#""method":"exact""#));
    }

    #[test]
    fn thresholds_switch_methods() {
        let f = random_tabular(TabularFamily::Mixed, 8, 1).unwrap();
        let g = random_tabular(TabularFamily::Coverage, 8, 2).unwrap();
        let r = closeness_report(&f, Some(&g), 3, 6, 500, 3).unwrap();
        assert_eq!(r.gamma_f.method, Method::Skipped);
        assert_eq!(r.divergence.method, Method::Sampled);
        assert_eq!(r.alpha_total.method, Method::Exact);
        let full = closeness_report(&f, Some(&g), 3, 12, 500, 3).unwrap();
        assert!(r.divergence.value.unwrap() <= full.divergence.value.unwrap());
        let lb = full.lemma1_min_delta.value.unwrap();
        let gm = full.gamma_f.value.unwrap();
        assert!((lb - (1.0 - gm) / (1.0 + gm)).abs() < 1e-12);
    }
}
