//! Greedy selection, exhaustive optimum and a uniform random baseline.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng::SplitMix64;
use crate::setfn::{OrderedSelection, SetFunction, Subset};

/// Largest ground set [`exhaustive_opt`] will enumerate.
pub const MAX_EXHAUSTIVE: usize = 24;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GreedyTrace {
    pub selection: OrderedSelection,
    /// Marginal of every remaining candidate at each step, ascending by index.
    pub candidates: Vec<Vec<(usize, f64)>>,
}

impl GreedyTrace {
    pub fn value(&self) -> f64 {
        self.selection.value()
    }

    pub fn set(&self) -> Subset {
        self.selection.as_subset()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptResult {
    pub best_set: Subset,
    pub best_value: f64,
}

fn check_budget(k: usize, ground: usize) -> Result<()> {
    if k == 0 || k > ground {
        return Err(Error::InvalidBudget { k, ground });
    }
    Ok(())
}

/// Picks `k` elements one at a time, each maximizing the marginal gain over
/// the current prefix. Ties go to the lowest index.
pub fn greedy(f: &dyn SetFunction, k: usize) -> Result<GreedyTrace> {
    let ground = f.ground_size();
    check_budget(k, ground)?;
    let mut selection = OrderedSelection::new(ground);
    let mut candidates = Vec::with_capacity(k);
    let mut current = Subset::empty(ground);
    for _ in 0..k {
        let remaining = current.complement().to_vec();
        let gains = remaining
            .par_iter()
            .map(|&a| f.marginal(current, a).map(|g| (a, g)))
            .collect::<Result<Vec<_>>>()?;
        let mut best = gains[0];
        for &(a, g) in &gains[1..] {
            if g > best.1 {
                best = (a, g);
            }
        }
        selection.push(best.0, best.1)?;
        current = current.with(best.0);
        candidates.push(gains);
    }
    Ok(GreedyTrace {
        selection,
        candidates,
    })
}

/// All `k`-subsets of `0..ground` as masks, in increasing numeric order.
pub fn k_subsets(ground: usize, k: usize) -> impl Iterator<Item = u64> {
    let limit: u128 = 1u128 << ground;
    let first: u64 = if k == 0 { 0 } else { u64::MAX >> (64 - k) };
    let mut next = if (k as u128) <= ground as u128 {
        Some(first)
    } else {
        None
    };
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == 0 {
            None
        } else {
            // Gosper's hack
            let c = cur & cur.wrapping_neg();
            let r = cur.checked_add(c);
            r.and_then(|r| {
                let n = (((r ^ cur) >> 2) / c) | r;
                ((n as u128) < limit).then_some(n)
            })
        };
        Some(cur)
    })
}

/// Exact maximum of `f` over `k`-subsets. Ties go to the smallest mask.
pub fn exhaustive_opt(f: &dyn SetFunction, k: usize) -> Result<OptResult> {
    let ground = f.ground_size();
    if ground > MAX_EXHAUSTIVE {
        return Err(Error::TooLarge {
            ground,
            limit: MAX_EXHAUSTIVE,
        });
    }
    check_budget(k, ground)?;
    let masks: Vec<u64> = k_subsets(ground, k).collect();
    let values = masks
        .par_iter()
        .map(|&m| f.evaluate(Subset::from_mask(m, ground)?))
        .collect::<Result<Vec<f64>>>()?;
    let mut best = 0;
    for i in 1..values.len() {
        if values[i] > values[best] {
            best = i;
        }
    }
    Ok(OptResult {
        best_set: Subset::from_mask(masks[best], ground)?,
        best_value: values[best],
    })
}

/// Order statistics of a sample. Quartiles interpolate linearly between
/// order statistics at position `p·(n-1)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub trials: usize,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub mean: f64,
}

impl Summary {
    pub fn from_values(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParameter(
                "cannot summarize an empty sample".into(),
            ));
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let q = |p: f64| {
            let h = p * (v.len() - 1) as f64;
            let lo = h.floor() as usize;
            let hi = (lo + 1).min(v.len() - 1);
            v[lo] + (h - lo as f64) * (v[hi] - v[lo])
        };
        Ok(Self {
            trials: v.len(),
            min: v[0],
            q1: q(0.25),
            median: q(0.5),
            q3: q(0.75),
            max: v[v.len() - 1],
            mean: v.iter().sum::<f64>() / v.len() as f64,
        })
    }
}

/// `trials` uniform `k`-subsets drawn in sequence from `SplitMix64::new(seed)`.
pub fn sample_subsets(ground: usize, k: usize, trials: usize, seed: u64) -> Result<Vec<Subset>> {
    check_budget(k, ground)?;
    let mut rng = SplitMix64::new(seed);
    (0..trials)
        .map(|_| Subset::from_indices(&rng.sample_indices(ground, k), ground))
        .collect()
}

/// Distribution of `f` over uniformly sampled `k`-subsets.
pub fn random_baseline(f: &dyn SetFunction, k: usize, trials: usize, seed: u64) -> Result<Summary> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    let sets = sample_subsets(f.ground_size(), k, trials, seed)?;
    let values = sets
        .par_iter()
        .map(|&s| f.evaluate(s))
        .collect::<Result<Vec<f64>>>()?;
    Summary::from_values(&values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::setfn::{Modular, TabularFunction};

    fn tab3() -> TabularFunction {
        TabularFunction::new(3, vec![0.0, 3.0, 2.0, 3.5, 2.0, 3.5, 5.0, 5.5]).unwrap()
    }

    #[test]
    fn greedy_modular() {
        let f = Modular::new(vec![3.0, 1.0, 2.0]).unwrap();
        let t = greedy(&f, 2).unwrap();
        assert_eq!(t.selection.elements(), &[0, 2]);
        assert_eq!(t.value(), 5.0);
        let t = greedy(&f, 3).unwrap();
        assert_eq!(t.set(), Subset::full(3));
        assert!(matches!(greedy(&f, 4), Err(Error::InvalidBudget { .. })));
        assert!(matches!(greedy(&f, 0), Err(Error::InvalidBudget { .. })));
    }

    #[test]
    fn greedy_is_suboptimal_on_tabular_instance() {
        let f = tab3();
        let t = greedy(&f, 2).unwrap();
        assert_eq!(t.selection.elements(), &[0, 1]);
        assert_eq!(t.value(), 3.5);
        let opt = exhaustive_opt(&f, 2).unwrap();
        assert_eq!(opt.best_set.to_vec(), vec![1, 2]);
        assert_eq!(opt.best_value, 5.0);
    }

    #[test]
    fn exhaustive_cases() {
        let f = Modular::new(vec![3.0, 1.0, 2.0]).unwrap();
        let o = exhaustive_opt(&f, 2).unwrap();
        assert_eq!(o.best_set.to_vec(), vec![0, 2]);
        assert_eq!(o.best_value, 5.0);
        let o = exhaustive_opt(&f, 3).unwrap();
        assert_eq!(o.best_set, Subset::full(3));
        let big = Modular::new(vec![1.0; 25]).unwrap();
        assert!(matches!(
            exhaustive_opt(&big, 2),
            Err(Error::TooLarge { .. })
        ));
        // equal values resolve to the smallest mask
        let flat = Modular::new(vec![1.0; 5]).unwrap();
        assert_eq!(exhaustive_opt(&flat, 2).unwrap().best_set.mask(), 0b11);
    }

    #[test]
    fn gosper_enumeration() {
        let masks: Vec<u64> = k_subsets(5, 2).collect();
        assert_eq!(masks.len(), 10);
        assert!(masks.windows(2).all(|w| w[0] < w[1]));
        assert!(masks.iter().all(|m| m.count_ones() == 2 && *m < 32));
        assert_eq!(k_subsets(4, 0).collect::<Vec<_>>(), vec![0]);
        assert_eq!(k_subsets(3, 3).collect::<Vec<_>>(), vec![7]);
        assert_eq!(k_subsets(64, 64).count(), 1);
        assert_eq!(k_subsets(3, 4).count(), 0);
    }

    #[test]
    fn random_baseline_cases() {
        let f = Modular::new(vec![1.0, 1.0, 1.0]).unwrap();
        let s = random_baseline(&f, 2, 50, 1).unwrap();
        assert_eq!((s.min, s.max), (2.0, 2.0));
        let s = random_baseline(&tab3(), 2, 1, 9).unwrap();
        assert!(s.min == s.median && s.median == s.max);
        let s = random_baseline(&tab3(), 2, 1000, 5).unwrap();
        assert!(s.median == 3.5 || s.median == 5.0);
        assert_eq!(s.max, 5.0);
        assert_eq!(s, random_baseline(&tab3(), 2, 1000, 5).unwrap());
        assert!(random_baseline(&tab3(), 2, 0, 5).is_err());
    }

    #[test]
    fn quartiles() {
        let s = Summary::from_values(&[4.0, 1.0, 3.0, 2.0, 5.0]).unwrap();
        assert_eq!((s.q1, s.median, s.q3), (2.0, 3.0, 4.0));
        let s = Summary::from_values(&[1.0, 2.0]).unwrap();
        assert_eq!(s.median, 1.5);
        assert_eq!(s.mean, 1.5);
    }
}
