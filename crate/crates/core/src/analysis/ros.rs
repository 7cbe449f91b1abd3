use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrixcore::{spectrum, SymMatrix};
use crate::setfn::{GramianModel, SetFunction, Subset};
use crate::solvers::{GreedyTrace, OptResult};

use super::measures::{
    check_monotone, divergence_exact, is_submodular_bruteforce, lemma1_min_delta, same_ground,
    submodularity_ratio_exact, table_within, total_curvature,
};
use super::{EPS_DEN, EXACT_LIMIT, SCAN_LIMIT};

const TOL: f64 = 1e-9;

/// Multiplicative bounds `δ_l g_S(a) <= f_S(a) <= δ_u g_S(a)` in one of
/// three parameterizations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum DeltaBounds {
    /// `δ_l = 1 - δ`, `δ_u = 1 + δ` with `0 <= δ < 1`.
    Symmetric {
        delta: f64,
    },
    Asymmetric {
        delta_l: f64,
        delta_u: f64,
    },
    /// `δ_l = 1`, `δ_u = δ` with `δ >= 1`.
    OneSided {
        delta: f64,
    },
}

impl DeltaBounds {
    pub fn symmetric(delta: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&delta) {
            return Err(Error::InvalidParameter(format!(
                "symmetric delta must lie in [0, 1), got {delta}"
            )));
        }
        Ok(DeltaBounds::Symmetric { delta })
    }

    /// `δ_l` may be zero: some closed forms degenerate to it.
    pub fn asymmetric(delta_l: f64, delta_u: f64) -> Result<Self> {
        if !(delta_l >= 0.0) || !(delta_u >= delta_l) || !delta_u.is_finite() || delta_u <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "need 0 <= delta_l <= delta_u < inf, got ({delta_l}, {delta_u})"
            )));
        }
        Ok(DeltaBounds::Asymmetric { delta_l, delta_u })
    }

    pub fn one_sided(delta: f64) -> Result<Self> {
        if !(delta >= 1.0) || !delta.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "one-sided delta must be finite and >= 1, got {delta}"
            )));
        }
        Ok(DeltaBounds::OneSided { delta })
    }

    pub fn lower(&self) -> f64 {
        match *self {
            DeltaBounds::Symmetric { delta } => 1.0 - delta,
            DeltaBounds::Asymmetric { delta_l, .. } => delta_l,
            DeltaBounds::OneSided { .. } => 1.0,
        }
    }

    pub fn upper(&self) -> f64 {
        match *self {
            DeltaBounds::Symmetric { delta } => 1.0 + delta,
            DeltaBounds::Asymmetric { delta_u, .. } => delta_u,
            DeltaBounds::OneSided { delta } => delta,
        }
    }

    /// `δ_l / δ_u`.
    pub fn ratio(&self) -> f64 {
        self.lower() / self.upper()
    }

    /// The symmetric δ of the same bounds after rescaling the surrogate by
    /// `(δ_l + δ_u) / 2`.
    pub fn symmetric_equivalent(&self) -> f64 {
        let (l, u) = (self.lower(), self.upper());
        (u - l) / (u + l)
    }

    /// Largest `|f_S(a)/g_S(a) - 1|` the bounds allow.
    pub fn envelope(&self) -> f64 {
        (self.upper() - 1.0).max(1.0 - self.lower())
    }
}

/// Which matrix stands for a single element in the eigenvalue-based bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SingletonMatrix {
    /// `β² I + x xᵀ`
    IncludeBase,
    /// `x xᵀ`
    Rank1Only,
}

impl SingletonMatrix {
    pub fn name(self) -> &'static str {
        match self {
            SingletonMatrix::IncludeBase => "include-base",
            SingletonMatrix::Rank1Only => "rank1-only",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "include-base" | "include_base" => Ok(SingletonMatrix::IncludeBase),
            "rank1-only" | "rank1_only" => Ok(SingletonMatrix::Rank1Only),
            _ => Err(Error::InvalidParameter(format!(
                "unknown singleton interpretation `{s}` (expected include-base or rank1-only)"
            ))),
        }
    }
}

fn singleton_extremes(model: &GramianModel, interp: SingletonMatrix) -> Result<Vec<(f64, f64)>> {
    (0..model.ground())
        .map(|w| {
            let m = match interp {
                SingletonMatrix::IncludeBase => {
                    model.gramian(Subset::empty(model.ground()).with(w))
                }
                SingletonMatrix::Rank1Only => {
                    SymMatrix::zeros(model.dim())?.rank1_update(model.column(w))?
                }
            };
            let sp = spectrum(&m)?;
            let (lo, hi) = (sp.min().max(0.0), sp.max());
            if hi <= EPS_DEN {
                return Err(Error::Unbounded(format!(
                    "largest eigenvalue of the singleton matrix for element {w} vanishes"
                )));
            }
            Ok((lo, hi))
        })
        .collect()
}

/// Bounds tying `-tr(W_S⁻¹)` to `log det W_S`: `δ_u = 1/λ_1(W_∅)`,
/// `δ_l = 1/λ_n(W_Ω)`.
pub fn delta_bounds_prop1(model: &GramianModel) -> Result<DeltaBounds> {
    let lo = spectrum(&model.base())?.min();
    let hi = spectrum(&model.gramian(Subset::full(model.ground())))?.max();
    DeltaBounds::asymmetric(1.0 / hi, 1.0 / lo)
}

/// Bounds tying `λ_1(W_S)` to `tr(W_S)` with `ρ = min_ω λ_1(W_ω)/λ_n(W_ω)`:
/// `δ_u = 1 - (n-1)/n · ρ`, `δ_l = ρ/n`.
pub fn delta_bounds_prop2(model: &GramianModel, interp: SingletonMatrix) -> Result<DeltaBounds> {
    let rho = singleton_extremes(model, interp)?
        .into_iter()
        .map(|(lo, hi)| lo / hi)
        .fold(f64::INFINITY, f64::min);
    let n = model.dim() as f64;
    DeltaBounds::asymmetric(rho / n, 1.0 - (n - 1.0) / n * rho)
}

/// Bounds tying `λ_1(W_S)` to `λ_n(W_S)`: `δ_u = max_ω λ_n/λ_1`,
/// `δ_l = min_ω λ_1/λ_n`.
pub fn delta_bounds_prop3(model: &GramianModel, interp: SingletonMatrix) -> Result<DeltaBounds> {
    let ext = singleton_extremes(model, interp)?;
    let mut upper: f64 = 0.0;
    let mut lower = f64::INFINITY;
    for (w, (lo, hi)) in ext.into_iter().enumerate() {
        if lo <= EPS_DEN {
            return Err(Error::Unbounded(format!(
                "smallest eigenvalue of the singleton matrix for element {w} vanishes, so delta_u is infinite"
            )));
        }
        upper = upper.max(hi / lo);
        lower = lower.min(lo / hi);
    }
    DeltaBounds::asymmetric(lower, upper)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SandwichWitness {
    pub set: u64,
    pub element: usize,
    pub f_marginal: f64,
    pub g_marginal: f64,
    /// Amount by which the inequality fails.
    pub excess: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SandwichReport {
    pub bounds: DeltaBounds,
    pub holds: bool,
    pub pairs: usize,
    pub lower_violations: usize,
    pub upper_violations: usize,
    pub worst_lower: Option<SandwichWitness>,
    pub worst_upper: Option<SandwichWitness>,
}

/// Checks `δ_l g_S(a) - 1e-9 <= f_S(a) <= δ_u g_S(a) + 1e-9` for every
/// `S` and `a ∉ S`.
pub fn verify_sandwich(
    f: &dyn SetFunction,
    g: &dyn SetFunction,
    bounds: &DeltaBounds,
) -> Result<SandwichReport> {
    let ground = same_ground(f, g)?;
    let ft = table_within(f, SCAN_LIMIT)?;
    let gt = table_within(g, SCAN_LIMIT)?;
    let (l, u) = (bounds.lower(), bounds.upper());
    let mut rep = SandwichReport {
        bounds: *bounds,
        holds: true,
        pairs: 0,
        lower_violations: 0,
        upper_violations: 0,
        worst_lower: None,
        worst_upper: None,
    };
    let keep_worst = |slot: &mut Option<SandwichWitness>, w: SandwichWitness| {
        if slot.is_none_or(|s| w.excess > s.excess) {
            *slot = Some(w);
        }
    };
    for mask in 0..1u64 << ground {
        for a in (0..ground).filter(|a| mask >> a & 1 == 0) {
            let (fm, gm) = (ft.gain(mask, a), gt.gain(mask, a));
            rep.pairs += 1;
            let w = |excess| SandwichWitness {
                set: mask,
                element: a,
                f_marginal: fm,
                g_marginal: gm,
                excess,
            };
            let low = l * gm - fm;
            if low > TOL {
                rep.lower_violations += 1;
                keep_worst(&mut rep.worst_lower, w(low));
            }
            let high = fm - u * gm;
            if high > TOL {
                rep.upper_violations += 1;
                keep_worst(&mut rep.worst_upper, w(high));
            }
        }
    }
    rep.holds = rep.lower_violations == 0 && rep.upper_violations == 0;
    Ok(rep)
}

/// Empirical `(min, max)` of `f_S(a)/g_S(a)` over every pair with
/// `g_S(a) > EPS_DEN`: the tightest constants for which the sandwich holds.
pub fn tight_bounds(f: &dyn SetFunction, g: &dyn SetFunction) -> Result<(f64, f64)> {
    let ground = same_ground(f, g)?;
    let ft = table_within(f, SCAN_LIMIT)?;
    let gt = table_within(g, SCAN_LIMIT)?;
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for mask in 0..1u64 << ground {
        for a in (0..ground).filter(|a| mask >> a & 1 == 0) {
            let (fm, gm) = (ft.gain(mask, a), gt.gain(mask, a));
            if gm <= EPS_DEN {
                if fm.abs() > EPS_DEN {
                    return Err(Error::ZeroDenominator {
                        set: mask,
                        element: a,
                        f_marginal: fm,
                        g_marginal: gm,
                    });
                }
                continue;
            }
            lo = lo.min(fm / gm);
            hi = hi.max(fm / gm);
        }
    }
    if lo > hi {
        return Err(Error::Unbounded(
            "no pair with a positive surrogate marginal".into(),
        ));
    }
    Ok((lo, hi))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RosReport {
    pub member: bool,
    pub g_submodular: bool,
    pub g_monotone: bool,
    pub gamma_f: f64,
    pub lower_bound: f64,
    pub divergence: f64,
    pub delta: f64,
    pub reasons: Vec<String>,
}

/// Whether `g` is a monotone submodular function whose divergence from `f`
/// lies between the lower bound `(1-γ_f)/(1+γ_f)` and `delta`.
pub fn ros_membership(f: &dyn SetFunction, g: &dyn SetFunction, delta: f64) -> Result<RosReport> {
    same_ground(f, g)?;
    let sub = is_submodular_bruteforce(g, TOL)?;
    let mono = check_monotone(g, 0, 0)?.is_none();
    let gamma = submodularity_ratio_exact(f)?.value;
    let lower = lemma1_min_delta(gamma.clamp(0.0, 1.0))?;
    let d = divergence_exact(f, g)?.value;
    let mut reasons = Vec::new();
    if !sub.submodular {
        reasons.push(format!(
            "surrogate is not submodular (worst diminishing-returns gap {:e})",
            sub.worst_violation
        ));
    }
    if !mono {
        reasons.push("surrogate is not monotone".into());
    }
    if lower > d + TOL {
        reasons.push(format!("divergence {d} is below the lower bound {lower}"));
    }
    if d > delta + TOL {
        reasons.push(format!("divergence {d} exceeds delta {delta}"));
    }
    Ok(RosReport {
        member: reasons.is_empty(),
        g_submodular: sub.submodular,
        g_monotone: mono,
        gamma_f: gamma,
        lower_bound: lower,
        divergence: d,
        delta,
        reasons,
    })
}

/// A surrogate with the bounds claimed for it.
pub struct Candidate<'a> {
    pub name: String,
    pub surrogate: &'a dyn SetFunction,
    pub bounds: DeltaBounds,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CandidateOutcome {
    pub name: String,
    pub feasible: bool,
    /// Whether the bounds and submodularity were checked exhaustively.
    pub verified: bool,
    pub total_curvature: Option<f64>,
    pub reason: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlphaDelta {
    pub value: f64,
    pub index: usize,
    pub name: String,
    pub outcomes: Vec<CandidateOutcome>,
}

/// Smallest total curvature among candidates whose bounds are within
/// `delta` (compared through [`DeltaBounds::symmetric_equivalent`]). For
/// ground sets up to `exact_threshold` the claimed bounds and the
/// surrogate's submodularity are verified exhaustively; above it the
/// closed-form bounds are taken as given. Ties go to the lowest index.
pub fn alpha_delta(
    f: &dyn SetFunction,
    candidates: &[Candidate<'_>],
    delta: f64,
    exact_threshold: usize,
) -> Result<AlphaDelta> {
    if candidates.is_empty() {
        return Err(Error::InvalidParameter(
            "no candidate surrogates supplied".into(),
        ));
    }
    let exact = f.ground_size() <= exact_threshold.min(EXACT_LIMIT);
    let mut outcomes = Vec::with_capacity(candidates.len());
    let mut best: Option<(f64, usize)> = None;
    for (i, c) in candidates.iter().enumerate() {
        same_ground(f, c.surrogate)?;
        let mut reason = None;
        let sym = c.bounds.symmetric_equivalent();
        if sym > delta + 1e-12 {
            reason = Some(format!("bounds amount to delta {sym}, above {delta}"));
        } else if exact {
            let sw = verify_sandwich(f, c.surrogate, &c.bounds)?;
            let sub = is_submodular_bruteforce(c.surrogate, TOL)?;
            if !sw.holds {
                reason = Some(format!(
                    "claimed bounds fail on {} of {} pairs",
                    sw.lower_violations + sw.upper_violations,
                    sw.pairs
                ));
            } else if !sub.submodular {
                reason = Some("surrogate is not submodular".into());
            }
        }
        let mut curvature = None;
        if reason.is_none() {
            match total_curvature(c.surrogate) {
                Ok(cv) => curvature = Some(cv.value),
                Err(Error::AllSingletonsDegenerate) => {
                    reason = Some("surrogate has no usable singleton".into())
                }
                Err(e) => return Err(e),
            }
        }
        if let Some(a) = curvature {
            if best.is_none_or(|b| a < b.0) {
                best = Some((a, i));
            }
        }
        outcomes.push(CandidateOutcome {
            name: c.name.clone(),
            feasible: reason.is_none(),
            verified: exact,
            total_curvature: curvature,
            reason,
        });
    }
    let (value, index) = best.ok_or(Error::NoFeasibleSurrogate { delta })?;
    Ok(AlphaDelta {
        value,
        index,
        name: candidates[index].name.clone(),
        outcomes,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepCheck {
    pub step: usize,
    pub opt: f64,
    pub prefix_value: f64,
    pub next_gain: f64,
    pub rhs: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepReport {
    pub alpha_g: f64,
    pub bounds: DeltaBounds,
    pub steps: Vec<StepCheck>,
    pub all_hold: bool,
}

/// For each `i < k`, checks
/// `OPT <= α_G f(S^i) + k (δ_u/δ_l) A(i+1) + 1e-9 · max(1, OPT)`.
pub fn step_inequality_check(
    f: &dyn SetFunction,
    trace: &GreedyTrace,
    opt: &OptResult,
    alpha_g: f64,
    bounds: &DeltaBounds,
) -> Result<StepReport> {
    let sel = &trace.selection;
    let k = sel.len();
    let spread = if bounds.lower() > 0.0 {
        bounds.upper() / bounds.lower()
    } else {
        f64::INFINITY
    };
    let slack = TOL * opt.best_value.abs().max(1.0);
    let mut steps = Vec::with_capacity(k);
    for i in 0..k {
        let prefix_value = f.evaluate(sel.prefix(i))?;
        let gain = sel.gains()[i];
        let tail = if gain == 0.0 {
            0.0
        } else {
            k as f64 * spread * gain
        };
        let rhs = alpha_g * prefix_value + tail;
        steps.push(StepCheck {
            step: i,
            opt: opt.best_value,
            prefix_value,
            next_gain: gain,
            rhs,
            holds: opt.best_value <= rhs + slack,
        });
    }
    Ok(StepReport {
        alpha_g,
        bounds: *bounds,
        all_hold: steps.iter().all(|s| s.holds),
        steps,
    })
}
