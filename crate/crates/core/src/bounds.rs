//! Closed-form greedy guarantees as fractions of the optimum.
//!
//! Every bound here reduces to `φ(x, k) = (1 - (1 - x/k)^k) / x`, or
//! `(1 - e^{-x}) / x` in the limit `k → ∞`, scaled by a constant.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::analysis::DeltaBounds;
use crate::error::{Error, Result};

/// Below this argument `φ` is evaluated by its second-order series.
pub const SERIES_THRESHOLD: f64 = 1e-8;

const RANGE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Budget {
    Finite(usize),
    Limit,
}

impl Serialize for Budget {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Budget::Finite(k) => s.serialize_u64(*k as u64),
            Budget::Limit => s.serialize_str("limit"),
        }
    }
}

impl fmt::Display for Budget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Budget::Finite(k) => write!(f, "{k}"),
            Budget::Limit => f.write_str("limit"),
        }
    }
}

impl FromStr for Budget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "limit" || s == "inf" {
            return Ok(Budget::Limit);
        }
        match s.parse::<usize>() {
            Ok(k) if k >= 1 => Ok(Budget::Finite(k)),
            _ => Err(Error::InvalidParameter(format!(
                "budget must be a positive integer or `limit`, got `{s}`"
            ))),
        }
    }
}

fn phi(x: f64, k: Budget) -> f64 {
    match k {
        Budget::Finite(k) => {
            let k = k as f64;
            if x < SERIES_THRESHOLD {
                1.0 - (k - 1.0) / (2.0 * k) * x + (k - 1.0) * (k - 2.0) / (6.0 * k * k) * x * x
            } else {
                -(k * (-x / k).ln_1p()).exp_m1() / x
            }
        }
        Budget::Limit => {
            if x < SERIES_THRESHOLD {
                1.0 - x / 2.0 + x * x / 6.0
            } else {
                -(-x).exp_m1() / x
            }
        }
    }
}

fn unit(name: &str, v: f64) -> Result<f64> {
    if !(-RANGE_TOL..=1.0 + RANGE_TOL).contains(&v) {
        return Err(Error::InvalidParameter(format!(
            "{name} must lie in [0, 1], got {v}"
        )));
    }
    Ok(v.clamp(0.0, 1.0))
}

fn budget(k: Budget) -> Result<Budget> {
    if k == Budget::Finite(0) {
        return Err(Error::InvalidParameter("budget must be at least 1".into()));
    }
    Ok(k)
}

/// `(1/α)(1 - (1 - α/k)^k)`; tends to 1 as `α → 0`.
pub fn bound_conforti(alpha: f64, k: Budget) -> Result<f64> {
    let a = unit("alpha", alpha)?;
    Ok(phi(a, budget(k)?))
}

/// `(1/α)(1 - (1 - αγ/k)^k)`; tends to `γ` as `α → 0`.
pub fn bound_bian(alpha: f64, gamma: f64, k: Budget) -> Result<f64> {
    let a = unit("alpha", alpha)?;
    let g = unit("gamma", gamma)?;
    Ok(g * phi(a * g, budget(k)?))
}

/// `(1/C)(1 - (1 - C r/k)^k)` with `r = δ_l/δ_u` and `C = 1 - r(1 - α_δ)`.
pub fn bound_delta(alpha_delta: f64, delta: &DeltaBounds, k: Budget) -> Result<f64> {
    let a = unit("alpha_delta", alpha_delta)?;
    let k = budget(k)?;
    let (c, r) = match *delta {
        DeltaBounds::Symmetric { delta: d } => {
            if !(0.0..1.0).contains(&d) {
                return Err(Error::InvalidParameter(format!(
                    "symmetric delta must lie in [0, 1), got {d}"
                )));
            }
            (
                a * (1.0 - d) / (1.0 + d) + 2.0 * d / (1.0 + d),
                (1.0 - d) / (1.0 + d),
            )
        }
        _ => {
            let (l, u) = (delta.lower(), delta.upper());
            if !(l >= 0.0) || !(u > 0.0) || !u.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "invalid bounds ({l}, {u})"
                )));
            }
            let r = l / u;
            if r > 1.0 {
                return Err(Error::InvalidParameter(format!(
                    "delta_l / delta_u = {r} exceeds 1"
                )));
            }
            (1.0 - r * (1.0 - a), r)
        }
    };
    Ok(r * phi(c * r, k))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Feasibility {
    pub feasible: bool,
    pub reason: String,
}

/// The condition each form of bounds must meet for a function with
/// submodularity ratio `gamma`.
pub fn feasibility(delta: &DeltaBounds, gamma: f64) -> Result<Feasibility> {
    let g = unit("gamma", gamma)?;
    let tol = 1e-12;
    Ok(match *delta {
        DeltaBounds::Symmetric { delta: d } => {
            let need = (1.0 - g) / (1.0 + g);
            Feasibility {
                feasible: d >= need - tol,
                reason: format!("delta >= (1 - gamma)/(1 + gamma): {d} >= {need}"),
            }
        }
        DeltaBounds::Asymmetric { delta_l, delta_u } => Feasibility {
            feasible: delta_l <= delta_u * g + tol,
            reason: format!("delta_l <= delta_u * gamma: {delta_l} <= {}", delta_u * g),
        },
        DeltaBounds::OneSided { delta: d } => {
            if g == 0.0 {
                return Err(Error::Infeasible(
                    "one-sided bounds need delta >= 1/gamma, unbounded at gamma = 0".into(),
                ));
            }
            Feasibility {
                feasible: d >= 1.0 / g - tol,
                reason: format!("delta >= 1/gamma: {d} >= {}", 1.0 / g),
            }
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundInputs {
    pub alpha: f64,
    pub gamma: f64,
    pub delta: DeltaBounds,
    pub k: Budget,
}

impl BoundInputs {
    pub fn new(alpha: f64, gamma: f64, delta: DeltaBounds, k: Budget) -> Result<Self> {
        Ok(Self {
            alpha: unit("alpha", alpha)?,
            gamma: unit("gamma", gamma)?,
            delta,
            k: budget(k)?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    /// Submodular objective with total curvature `α`.
    TotalCurvature,
    /// Generalized curvature `α` and submodularity ratio `γ`.
    RatioCurvature,
    /// δ-approximation by a submodular surrogate with curvature `α_δ`.
    DeltaApproximation,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub kind: BoundKind,
    pub ratio: f64,
    pub inputs: BoundInputs,
    pub feasible: bool,
    pub reason: String,
}

/// All three guarantees for one set of inputs. `alpha` is used as the
/// curvature in each formula.
pub fn bound_reports(inputs: &BoundInputs) -> Result<Vec<BoundReport>> {
    let feas = match feasibility(&inputs.delta, inputs.gamma) {
        Ok(f) => f,
        Err(Error::Infeasible(reason)) => Feasibility {
            feasible: false,
            reason,
        },
        Err(e) => return Err(e),
    };
    Ok(vec![
        BoundReport {
            kind: BoundKind::TotalCurvature,
            ratio: bound_conforti(inputs.alpha, inputs.k)?,
            inputs: *inputs,
            feasible: inputs.gamma >= 1.0 - RANGE_TOL,
            reason: "requires a submodular objective (gamma = 1)".into(),
        },
        BoundReport {
            kind: BoundKind::RatioCurvature,
            ratio: bound_bian(inputs.alpha, inputs.gamma, inputs.k)?,
            inputs: *inputs,
            feasible: true,
            reason: "holds for any monotone objective".into(),
        },
        BoundReport {
            kind: BoundKind::DeltaApproximation,
            ratio: bound_delta(inputs.alpha, &inputs.delta, inputs.k)?,
            inputs: *inputs,
            feasible: feas.feasible,
            reason: feas.reason,
        },
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    const E1: f64 = 0.632_120_558_828_557_7;

    #[test]
    fn conforti_values() {
        assert!((bound_conforti(1.0, Budget::Limit).unwrap() - E1).abs() < 1e-15);
        assert!((bound_conforti(1.0, Budget::Finite(2)).unwrap() - 0.75).abs() < 1e-15);
        assert_eq!(bound_conforti(0.0, Budget::Finite(5)).unwrap(), 1.0);
        assert_eq!(bound_conforti(0.0, Budget::Limit).unwrap(), 1.0);
        assert_eq!(bound_conforti(1.0, Budget::Finite(1)).unwrap(), 1.0);
        assert!(bound_conforti(1.5, Budget::Limit).is_err());
    }

    #[test]
    fn series_matches_direct_near_threshold() {
        for k in [
            Budget::Finite(1),
            Budget::Finite(3),
            Budget::Finite(50),
            Budget::Limit,
        ] {
            let below = phi(SERIES_THRESHOLD * 0.999, k);
            let above = phi(SERIES_THRESHOLD * 1.001, k);
            assert!((below - above).abs() < 1e-10, "{k}");
        }
    }

    #[test]
    fn bian_values() {
        assert!(
            (bound_bian(1.0, 0.5, Budget::Limit).unwrap() - (1.0 - (-0.5f64).exp())).abs() < 1e-15
        );
        assert!((bound_bian(0.0, 0.3, Budget::Limit).unwrap() - 0.3).abs() < 1e-15);
        assert_eq!(
            bound_bian(0.4, 1.0, Budget::Finite(7)).unwrap(),
            bound_conforti(0.4, Budget::Finite(7)).unwrap()
        );
    }

    #[test]
    fn delta_reductions() {
        let zero = DeltaBounds::symmetric(0.0).unwrap();
        for a in [0.0, 0.25, 0.9, 1.0] {
            for k in [Budget::Finite(3), Budget::Limit] {
                assert_eq!(
                    bound_delta(a, &zero, k).unwrap(),
                    bound_conforti(a, k).unwrap()
                );
            }
        }
        for d in [0.1, 0.3, 0.7] {
            let s = DeltaBounds::symmetric(d).unwrap();
            let a = DeltaBounds::asymmetric(1.0 - d, 1.0 + d).unwrap();
            let x = bound_delta(0.4, &s, Budget::Finite(4)).unwrap();
            let y = bound_delta(0.4, &a, Budget::Finite(4)).unwrap();
            assert!((x - y).abs() < 1e-12);
        }
        let tight = DeltaBounds::asymmetric(1.0, 1.0).unwrap();
        assert!((bound_delta(1.0, &tight, Budget::Limit).unwrap() - E1).abs() < 1e-15);
        let one = DeltaBounds::one_sided(2.0).unwrap();
        let v = bound_delta(0.5, &one, Budget::Limit).unwrap();
        let (r, c): (f64, f64) = (0.5, 1.0 - 0.5 * 0.5);
        assert!((v - (1.0 - (-c * r).exp()) / c).abs() < 1e-15);
    }

    #[test]
    fn feasibility_rows() {
        let s0 = DeltaBounds::symmetric(0.0).unwrap();
        assert!(feasibility(&s0, 1.0).unwrap().feasible);
        let s = DeltaBounds::symmetric(0.2).unwrap();
        assert!(!feasibility(&s, 0.5).unwrap().feasible);
        let o = DeltaBounds::one_sided(2.0).unwrap();
        assert!(feasibility(&o, 0.5).unwrap().feasible);
        assert!(matches!(feasibility(&o, 0.0), Err(Error::Infeasible(_))));
        let a = DeltaBounds::asymmetric(0.5, 1.0).unwrap();
        assert!(feasibility(&a, 0.5).unwrap().feasible);
        assert!(!feasibility(&a, 0.4).unwrap().feasible);
    }

    #[test]
    fn budget_parse_and_json() {
        assert_eq!("limit".parse::<Budget>().unwrap(), Budget::Limit);
        assert_eq!("4".parse::<Budget>().unwrap(), Budget::Finite(4));
        assert!("0".parse::<Budget>().is_err());
        assert_eq!(serde_json::to_string(&Budget::Limit).unwrap(), r#""limit""#);
        let inputs = BoundInputs::new(
            0.0,
            1.0,
            DeltaBounds::symmetric(0.0).unwrap(),
            Budget::Limit,
        )
        .unwrap();
        let reps = bound_reports(&inputs).unwrap();
        assert!(reps.iter().all(|r| r.ratio == 1.0 && r.feasible));
    }
}
