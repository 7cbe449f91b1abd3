use std::sync::Arc;

use approxsub::analysis::{
    delta_bounds_prop1, divergence_exact, lemma1_min_delta, submodularity_ratio_exact,
    verify_sandwich, DeltaBounds,
};
use approxsub::bounds::{bound_bian, bound_conforti, bound_delta, Budget};
use approxsub::matrixcore::{cholesky, spectrum, SymMatrix};
use approxsub::rng::SplitMix64;
use approxsub::setfn::{random_tabular, GramianModel, GramianObjective, Modular, TabularFamily};
use approxsub::solvers::{exhaustive_opt, greedy};
use approxsub::{SetFunction, Subset};
use proptest::prelude::*;

fn family() -> impl Strategy<Value = TabularFamily> {
    prop::sample::select(TabularFamily::ALL.to_vec())
}

fn budget() -> impl Strategy<Value = Budget> {
    prop_oneof![(1usize..60).prop_map(Budget::Finite), Just(Budget::Limit)]
}

fn pd_matrix(n: usize, seed: u64) -> SymMatrix {
    let mut rng = SplitMix64::new(seed);
    let mut m = SymMatrix::scaled_identity(n, 0.5).unwrap();
    for _ in 0..n {
        let x: Vec<f64> = (0..n).map(|_| rng.next_normal()).collect();
        m.rank1_update_in_place(&x).unwrap();
    }
    m
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn subset_algebra(a in 0u64..1 << 12, b in 0u64..1 << 12) {
        let (s, t) = (Subset::from_mask(a, 12).unwrap(), Subset::from_mask(b, 12).unwrap());
        prop_assert_eq!(s.complement().complement(), s);
        prop_assert_eq!(s.union(t).len() + s.intersection(t).len(), s.len() + t.len());
        prop_assert!(s.difference(t).is_subset_of(s));
        prop_assert_eq!(s.difference(t).intersection(t).len(), 0);
    }

    #[test]
    fn sampled_indices_are_distinct(seed: u64, n in 1usize..40, k in 0usize..40) {
        let k = k.min(n);
        let mut v = SplitMix64::new(seed).sample_indices(n, k);
        prop_assert_eq!(v.len(), k);
        v.sort_unstable();
        v.dedup();
        prop_assert_eq!(v.len(), k);
        prop_assert!(v.iter().all(|&i| i < n));
    }

    #[test]
    fn cholesky_and_spectrum_agree(n in 1usize..9, seed: u64) {
        let m = pd_matrix(n, seed);
        let c = cholesky(&m).unwrap();
        let sp = spectrum(&m).unwrap();
        let scale = m.max_abs();
        let back = c.reconstruct();
        for i in 0..n {
            for j in 0..n {
                prop_assert!((back.get(i, j) - m.get(i, j)).abs() <= 1e-12 * scale.max(1.0));
            }
        }
        let ld: f64 = sp.values().iter().map(|v| v.ln()).sum();
        prop_assert!((c.log_det() - ld).abs() <= 1e-9 * ld.abs().max(1.0));
        let ti: f64 = sp.values().iter().map(|v| 1.0 / v).sum();
        prop_assert!((c.trace_inverse() - ti).abs() <= 1e-9 * ti.max(1.0));
    }

    #[test]
    fn greedy_never_beats_the_optimum(fam in family(), ground in 2usize..9, seed: u64, k in 1usize..9) {
        let f = random_tabular(fam, ground, seed).unwrap();
        let k = k.min(ground);
        let tr = greedy(&f, k).unwrap();
        let opt = exhaustive_opt(&f, k).unwrap();
        prop_assert!(tr.value() <= opt.best_value + 1e-12);
        prop_assert_eq!(tr.set().len(), k);
        prop_assert_eq!(opt.best_set.len(), k);
        // prefixes of a longer run are the shorter runs
        if k > 1 {
            let short = greedy(&f, k - 1).unwrap();
            prop_assert_eq!(short.selection.elements(), &tr.selection.elements()[..k - 1]);
        }
    }

    #[test]
    fn ratio_in_unit_interval_and_lemma_holds(fam in family(), ground in 2usize..7, seed: u64) {
        let f = random_tabular(fam, ground, seed).unwrap();
        let gamma = submodularity_ratio_exact(&f).unwrap().value;
        prop_assert!((0.0..=1.0 + 1e-12).contains(&gamma));
        if fam.is_submodular() {
            prop_assert!((gamma - 1.0).abs() <= 1e-9);
        }
        let singles: Vec<f64> = (0..ground)
            .map(|a| f.evaluate(Subset::from_indices(&[a], ground).unwrap()).unwrap())
            .collect();
        let g = Modular::new(singles).unwrap();
        let d = divergence_exact(&f, &g).unwrap().value;
        prop_assert!(d >= lemma1_min_delta(gamma.min(1.0)).unwrap() - 1e-9);
    }

    #[test]
    fn log_det_sandwich(n in 1usize..5, ground in 2usize..9, beta in 0.2f64..5.0, seed: u64) {
        let m = Arc::new(GramianModel::gaussian(n, ground, beta, seed, true).unwrap());
        let f = GramianObjective::neg_trace_inv(m.clone()).unwrap();
        let g = GramianObjective::log_det(m.clone()).unwrap();
        let b = delta_bounds_prop1(&m).unwrap();
        prop_assert!(verify_sandwich(&f, &g, &b).unwrap().holds);
    }

    #[test]
    fn bounds_are_ordered(alpha in 0.0f64..=1.0, gamma in 0.0f64..=1.0, k in budget(), d in 0.0f64..0.99) {
        let c = bound_conforti(alpha, k).unwrap();
        prop_assert!(c > 0.0 && c <= 1.0 + 1e-12);
        prop_assert!(bound_bian(alpha, gamma, k).unwrap() <= c + 1e-12);
        let s = bound_delta(alpha, &DeltaBounds::symmetric(d).unwrap(), k).unwrap();
        prop_assert!(s <= c + 1e-12);
        let a = bound_delta(alpha, &DeltaBounds::asymmetric(1.0 - d, 1.0 + d).unwrap(), k).unwrap();
        prop_assert!((s - a).abs() <= 1e-12);
    }

    #[test]
    fn conforti_decreases_with_curvature(a in 0.0f64..1.0, b in 0.0f64..1.0, k in budget()) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(bound_conforti(hi, k).unwrap() <= bound_conforti(lo, k).unwrap() + 1e-12);
    }
}
