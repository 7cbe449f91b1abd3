//! Measures of how close a monotone set function is to submodular, and the
//! machinery that turns them into approximation guarantees.

mod measures;
mod report;
mod ros;

pub use measures::{
    check_monotone, divergence_exact, divergence_sampled, generalized_curvature_exact,
    greedy_curvature, is_submodular_bruteforce, lemma1_min_delta, submodularity_ratio_exact,
    total_curvature, total_curvature_raw, Curvature, Divergence, DrWitness, GeneralizedCurvature,
    MonotoneViolation, PairWitness, Ratio, SubmodularityCheck, TripleWitness,
};
pub use report::{closeness_report, ClosenessReport, Measure, Method};
pub use ros::{
    alpha_delta, delta_bounds_prop1, delta_bounds_prop2, delta_bounds_prop3, ros_membership,
    step_inequality_check, tight_bounds, verify_sandwich, AlphaDelta, Candidate, CandidateOutcome,
    DeltaBounds, RosReport, SandwichReport, SandwichWitness, SingletonMatrix, StepCheck,
    StepReport,
};

/// Marginals at or below this are treated as zero in ratio denominators.
pub const EPS_DEN: f64 = 1e-12;

/// Largest ground set for the doubly exponential exact measures.
pub const EXACT_LIMIT: usize = 12;

/// Largest ground set for single-exponential exhaustive loops.
pub const SCAN_LIMIT: usize = 16;
