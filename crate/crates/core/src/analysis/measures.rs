use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng::SplitMix64;
use crate::setfn::{SetFunction, Subset, Table, EPS_MONO};
use crate::solvers::{GreedyTrace, OptResult};

use super::{EPS_DEN, EXACT_LIMIT, SCAN_LIMIT};

pub(crate) fn table_within(f: &dyn SetFunction, limit: usize) -> Result<Table> {
    let ground = f.ground_size();
    if ground > limit {
        return Err(Error::TooLarge { ground, limit });
    }
    Table::tabulate(f)
}

pub(crate) fn same_ground(f: &dyn SetFunction, g: &dyn SetFunction) -> Result<usize> {
    if f.ground_size() != g.ground_size() {
        return Err(Error::DimensionMismatch {
            expected: f.ground_size(),
            found: g.ground_size(),
        });
    }
    Ok(f.ground_size())
}

#[inline]
fn full(ground: usize) -> u64 {
    Subset::full(ground).mask()
}

/// A pair `(S, a)` with both marginals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairWitness {
    pub set: u64,
    pub element: usize,
    pub f_marginal: f64,
    pub g_marginal: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Divergence {
    pub value: f64,
    pub witness: Option<PairWitness>,
    /// Pairs that entered the maximum.
    pub pairs: usize,
    /// Pairs skipped because both marginals vanish.
    pub skipped: usize,
}

fn pair_term(set: u64, element: usize, fm: f64, gm: f64) -> Result<Option<f64>> {
    if gm <= EPS_DEN {
        if fm.abs() <= EPS_DEN {
            return Ok(None);
        }
        return Err(Error::ZeroDenominator {
            set,
            element,
            f_marginal: fm,
            g_marginal: gm,
        });
    }
    Ok(Some((fm / gm - 1.0).abs()))
}

fn fold_divergence(terms: Vec<Result<Option<(f64, PairWitness)>>>) -> Result<Divergence> {
    let mut out = Divergence {
        value: 0.0,
        witness: None,
        pairs: 0,
        skipped: 0,
    };
    for t in terms {
        match t? {
            None => out.skipped += 1,
            Some((v, w)) => {
                out.pairs += 1;
                if out.witness.is_none() || v > out.value {
                    out.value = v;
                    out.witness = Some(w);
                }
            }
        }
    }
    Ok(out)
}

/// `max |f_S(a)/g_S(a) - 1|` over every `S` and `a ∉ S`.
pub fn divergence_exact(f: &dyn SetFunction, g: &dyn SetFunction) -> Result<Divergence> {
    let ground = same_ground(f, g)?;
    let ft = table_within(f, SCAN_LIMIT)?;
    let gt = table_within(g, SCAN_LIMIT)?;
    let terms: Vec<_> = (0..1u64 << ground)
        .into_par_iter()
        .flat_map_iter(|mask| {
            let (ft, gt) = (&ft, &gt);
            (0..ground)
                .filter(move |a| mask >> a & 1 == 0)
                .map(move |a| {
                    let (fm, gm) = (ft.gain(mask, a), gt.gain(mask, a));
                    pair_term(mask, a, fm, gm).map(|t| {
                        t.map(|v| {
                            (
                                v,
                                PairWitness {
                                    set: mask,
                                    element: a,
                                    f_marginal: fm,
                                    g_marginal: gm,
                                },
                            )
                        })
                    })
                })
        })
        .collect();
    fold_divergence(terms)
}

/// Maximum of the divergence term over `samples` random pairs: `S` uniform
/// over subsets other than `Ω`, then `a` uniform over `Ω \ S`. A lower bound
/// on [`divergence_exact`].
pub fn divergence_sampled(
    f: &dyn SetFunction,
    g: &dyn SetFunction,
    samples: usize,
    seed: u64,
) -> Result<Divergence> {
    let ground = same_ground(f, g)?;
    if samples == 0 {
        return Err(Error::InvalidParameter("samples must be at least 1".into()));
    }
    if ground == 0 {
        return Err(Error::InvalidParameter("empty ground set".into()));
    }
    let mut rng = SplitMix64::new(seed);
    let all = full(ground);
    let pairs: Vec<(u64, usize)> = (0..samples)
        .map(|_| {
            let mask = loop {
                let m = rng.next_u64() & all;
                if m != all {
                    break m;
                }
            };
            let rest = Subset::from_mask(!mask & all, ground).expect("within ground");
            let rest = rest.to_vec();
            (mask, rest[rng.next_below(rest.len() as u64) as usize])
        })
        .collect();
    let terms: Vec<_> = pairs
        .par_iter()
        .map(|&(mask, a)| {
            let s = Subset::from_mask(mask, ground)?;
            let (fm, gm) = (f.marginal(s, a)?, g.marginal(s, a)?);
            pair_term(mask, a, fm, gm).map(|t| {
                t.map(|v| {
                    (
                        v,
                        PairWitness {
                            set: mask,
                            element: a,
                            f_marginal: fm,
                            g_marginal: gm,
                        },
                    )
                })
            })
        })
        .collect();
    fold_divergence(terms)
}

/// Value of a ratio-type measure with its minimizing pair of sets.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Ratio {
    pub value: f64,
    /// `(S, T)` attaining the minimum.
    pub witness: Option<(u64, u64)>,
    /// Set when the minimum exceeds one by more than `1e-9`.
    pub above_one: bool,
}

/// `min_{S,T} Σ_{t∈T\S} f_S(t) / f_S(T)` over pairs with `f_S(T) > EPS_DEN`.
pub fn submodularity_ratio_exact(f: &dyn SetFunction) -> Result<Ratio> {
    let t = table_within(f, EXACT_LIMIT)?;
    let ground = t.ground();
    let all = full(ground);
    let per_set: Vec<Option<(f64, u64, u64)>> = (0..1u64 << ground)
        .into_par_iter()
        .map(|s| {
            let comp = !s & all;
            let gains: Vec<f64> = (0..ground).map(|a| t.gain(s, a)).collect();
            let base = t.value(s);
            let mut best: Option<(f64, u64, u64)> = None;
            let mut sub = comp;
            while sub != 0 {
                let den = t.value(s | sub) - base;
                if den > EPS_DEN {
                    let mut num = 0.0;
                    let mut bits = sub;
                    while bits != 0 {
                        num += gains[bits.trailing_zeros() as usize];
                        bits &= bits - 1;
                    }
                    let r = num / den;
                    if best.is_none_or(|b| r < b.0) {
                        best = Some((r, s, sub));
                    }
                }
                sub = (sub - 1) & comp;
            }
            best
        })
        .collect();
    let mut best: Option<(f64, u64, u64)> = None;
    for (r, s, tt) in per_set.into_iter().flatten() {
        if best.is_none_or(|b| r < b.0) {
            best = Some((r, s, tt));
        }
    }
    Ok(match best {
        None => Ratio {
            value: 1.0,
            witness: None,
            above_one: false,
        },
        Some((r, s, tt)) => Ratio {
            value: r,
            witness: Some((s, tt)),
            above_one: r > 1.0 + 1e-9,
        },
    })
}

/// Total curvature with the singletons that had to be skipped.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Curvature {
    pub value: f64,
    pub argmin: usize,
    pub skipped: Vec<usize>,
}

fn curvature_with(
    g: &dyn SetFunction,
    denominator: impl Fn(usize) -> Result<f64> + Sync,
) -> Result<Curvature> {
    let ground = g.ground_size();
    let all = Subset::full(ground);
    let terms = (0..ground)
        .into_par_iter()
        .map(|a| {
            let den = denominator(a)?;
            if den <= EPS_DEN {
                return Ok(None);
            }
            Ok(Some(g.marginal(all.without(a), a)? / den))
        })
        .collect::<Result<Vec<Option<f64>>>>()?;
    let mut skipped = Vec::new();
    let mut best: Option<(f64, usize)> = None;
    for (a, t) in terms.into_iter().enumerate() {
        match t {
            None => skipped.push(a),
            Some(r) => {
                if best.is_none_or(|b| r < b.0) {
                    best = Some((r, a));
                }
            }
        }
    }
    let (r, argmin) = best.ok_or(Error::AllSingletonsDegenerate)?;
    Ok(Curvature {
        value: 1.0 - r,
        argmin,
        skipped,
    })
}

/// `1 - min_a g_{Ω\a}(a) / g({a})`, using `N` marginal evaluations.
/// Singletons with `g({a}) <= EPS_DEN` are skipped and listed.
pub fn total_curvature(g: &dyn SetFunction) -> Result<Curvature> {
    let ground = g.ground_size();
    curvature_with(g, |a| g.evaluate(Subset::empty(ground).with(a)))
}

/// Total curvature with the unshifted singleton value `g({a}) + offset` in
/// the denominator, i.e. for the raw objective before `g(∅)` is subtracted.
pub fn total_curvature_raw(g: &dyn SetFunction) -> Result<Curvature> {
    let ground = g.ground_size();
    let offset = g.offset();
    curvature_with(g, |a| {
        Ok(g.evaluate(Subset::empty(ground).with(a))? + offset)
    })
}

/// `(S, T, s)` for the generalized curvature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TripleWitness {
    pub set: u64,
    pub other: u64,
    pub element: usize,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeneralizedCurvature {
    pub value: f64,
    pub witness: Option<TripleWitness>,
}

/// `1 - min f_{S\s ∪ T}(s) / f_{S\s}(s)` over `s ∈ S \ T` with a positive
/// denominator, via a superset-minimum table per element.
pub fn generalized_curvature_exact(f: &dyn SetFunction) -> Result<GeneralizedCurvature> {
    let t = table_within(f, EXACT_LIMIT)?;
    let ground = t.ground();
    let size = 1usize << ground;
    let per_element: Vec<Option<TripleWitness>> = (0..ground)
        .into_par_iter()
        .map(|s| {
            let sbit = 1u64 << s;
            let mut low = vec![f64::INFINITY; size];
            let mut arg = vec![0u64; size];
            for m in 0..size as u64 {
                if m & sbit == 0 {
                    low[m as usize] = t.gain(m, s);
                    arg[m as usize] = m;
                }
            }
            for b in (0..ground).filter(|&b| b != s) {
                let bbit = 1u64 << b;
                for m in 0..size as u64 {
                    if m & (bbit | sbit) == 0 {
                        let up = (m | bbit) as usize;
                        if low[up] < low[m as usize] {
                            low[m as usize] = low[up];
                            arg[m as usize] = arg[up];
                        }
                    }
                }
            }
            let mut best: Option<TripleWitness> = None;
            for a in 0..size as u64 {
                if a & sbit != 0 {
                    continue;
                }
                let den = t.gain(a, s);
                if den > EPS_DEN {
                    let r = low[a as usize] / den;
                    if best.is_none_or(|b| r < b.ratio) {
                        best = Some(TripleWitness {
                            set: a | sbit,
                            other: arg[a as usize] & !a,
                            element: s,
                            ratio: r,
                        });
                    }
                }
            }
            best
        })
        .collect();
    let mut best: Option<TripleWitness> = None;
    for w in per_element.into_iter().flatten() {
        if best.is_none_or(|b| w.ratio < b.ratio) {
            best = Some(w);
        }
    }
    Ok(GeneralizedCurvature {
        value: best.map_or(0.0, |w| 1.0 - w.ratio),
        witness: best,
    })
}

/// Greedy curvature of a greedy run against a fixed optimum:
///
/// `1 - min_i min{ min_{a ∈ S_G \ (S^{i-1} ∪ Ω*)} f_{S^{i-1} ∪ Ω*}(a) / f_{S^{i-1}}(a),
///                 min_{a ∈ (S_G ∩ Ω*) \ S^{i-1}, i ≤ j ≤ k} f_{S^{j-1}}(s_j) / f_{S^{i-1}}(a) }`
///
/// Empty ranges contribute nothing; if every range is empty the result is 0.
pub fn greedy_curvature(f: &dyn SetFunction, trace: &GreedyTrace, opt: &OptResult) -> Result<f64> {
    let sel = &trace.selection;
    let k = sel.len();
    if opt.best_set.len() != k || opt.best_set.ground() != sel.ground() {
        return Err(Error::InvalidParameter(format!(
            "greedy trace has {k} elements but the optimum has {}",
            opt.best_set.len()
        )));
    }
    let sg = sel.as_subset();
    let star = opt.best_set;
    let gains = sel.gains();
    let mut lowest = f64::INFINITY;
    for i in 1..=k {
        let prev = sel.prefix(i - 1);
        let denominator = |a: usize| -> Result<f64> {
            let den = f.marginal(prev, a)?;
            if den <= EPS_DEN {
                return Err(Error::DenominatorDegenerate {
                    step: i,
                    element: a,
                    value: den,
                });
            }
            Ok(den)
        };
        for a in sg.difference(prev.union(star)).iter() {
            let den = denominator(a)?;
            lowest = lowest.min(f.marginal(prev.union(star), a)? / den);
        }
        let tail = gains[i - 1..].iter().copied().fold(f64::INFINITY, f64::min);
        for a in sg.intersection(star).difference(prev).iter() {
            let den = denominator(a)?;
            lowest = lowest.min(tail / den);
        }
    }
    Ok(if lowest.is_finite() {
        1.0 - lowest
    } else {
        0.0
    })
}

/// A diminishing-returns violation `f_S(a) < f_T(a)` with `S ⊆ T`, `a ∉ T`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DrWitness {
    pub set: u64,
    pub superset: u64,
    pub element: usize,
    pub small_gain: f64,
    pub large_gain: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubmodularityCheck {
    pub submodular: bool,
    /// Largest `f_T(a) - f_S(a)` found (zero or negative when submodular).
    pub worst_violation: f64,
    pub witness: Option<DrWitness>,
}

/// Checks `f_S(a) >= f_T(a) - tol` for all `S ⊆ T`, `a ∉ T` using a
/// superset-maximum table per element. Reports the worst violation.
pub fn is_submodular_bruteforce(f: &dyn SetFunction, tol: f64) -> Result<SubmodularityCheck> {
    let t = table_within(f, EXACT_LIMIT)?;
    let ground = t.ground();
    let size = 1usize << ground;
    let per_element: Vec<Option<(f64, DrWitness)>> = (0..ground)
        .into_par_iter()
        .map(|a| {
            let abit = 1u64 << a;
            let mut high = vec![f64::NEG_INFINITY; size];
            let mut arg = vec![0u64; size];
            for m in 0..size as u64 {
                if m & abit == 0 {
                    high[m as usize] = t.gain(m, a);
                    arg[m as usize] = m;
                }
            }
            for b in (0..ground).filter(|&b| b != a) {
                let bbit = 1u64 << b;
                for m in 0..size as u64 {
                    if m & (bbit | abit) == 0 {
                        let up = (m | bbit) as usize;
                        if high[up] > high[m as usize] {
                            high[m as usize] = high[up];
                            arg[m as usize] = arg[up];
                        }
                    }
                }
            }
            let mut best: Option<(f64, DrWitness)> = None;
            for s in 0..size as u64 {
                if s & abit != 0 {
                    continue;
                }
                let small = t.gain(s, a);
                let gap = high[s as usize] - small;
                if best.is_none_or(|b| gap > b.0) {
                    best = Some((
                        gap,
                        DrWitness {
                            set: s,
                            superset: arg[s as usize],
                            element: a,
                            small_gain: small,
                            large_gain: high[s as usize],
                        },
                    ));
                }
            }
            best
        })
        .collect();
    let mut worst: Option<(f64, DrWitness)> = None;
    for w in per_element.into_iter().flatten() {
        if worst.is_none_or(|b| w.0 > b.0) {
            worst = Some(w);
        }
    }
    Ok(match worst {
        None => SubmodularityCheck {
            submodular: true,
            worst_violation: 0.0,
            witness: None,
        },
        Some((gap, w)) => SubmodularityCheck {
            submodular: gap <= tol,
            worst_violation: gap,
            witness: (gap > tol).then_some(w),
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonotoneViolation {
    pub set: u64,
    pub element: usize,
    pub marginal: f64,
}

/// First `(S, a)` with `f_S(a) < -EPS_MONO`. Exhaustive up to `SCAN_LIMIT`
/// elements, otherwise `samples` seeded random pairs.
pub fn check_monotone(
    f: &dyn SetFunction,
    samples: usize,
    seed: u64,
) -> Result<Option<MonotoneViolation>> {
    let ground = f.ground_size();
    if ground <= SCAN_LIMIT {
        let t = Table::tabulate(f)?;
        return Ok(t
            .monotonicity_violation(EPS_MONO)
            .map(|(set, element, marginal)| MonotoneViolation {
                set,
                element,
                marginal,
            }));
    }
    let mut rng = SplitMix64::new(seed);
    let all = full(ground);
    for _ in 0..samples {
        let mask = rng.next_u64() & all;
        if mask == all {
            continue;
        }
        let rest = Subset::from_mask(!mask & all, ground)?.to_vec();
        let a = rest[rng.next_below(rest.len() as u64) as usize];
        let s = Subset::from_mask(mask, ground)?;
        let d = f.evaluate(s.with(a))? - f.evaluate(s)?;
        if d < -EPS_MONO {
            return Ok(Some(MonotoneViolation {
                set: mask,
                element: a,
                marginal: d,
            }));
        }
    }
    Ok(None)
}

/// `(1 - γ) / (1 + γ)`, the smallest δ any submodular surrogate can attain.
pub fn lemma1_min_delta(gamma: f64) -> Result<f64> {
    if !(0.0..=1.0 + 1e-9).contains(&gamma) {
        return Err(Error::InvalidParameter(format!(
            "submodularity ratio must lie in [0, 1], got {gamma}"
        )));
    }
    let g = gamma.min(1.0);
    Ok((1.0 - g) / (1.0 + g))
}
