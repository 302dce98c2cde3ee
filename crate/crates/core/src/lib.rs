//! Universal support recovery for one-bit compressed sensing.
//!
//! Measurements are `y = sign(Ax)` for a fixed matrix `A` and any sparse
//! `x`. The crate builds matrices from list-disjunct and list union-free
//! designs (optionally with power rows), decodes supports from sign
//! patterns, and runs exhaustive and randomized experiments over rational
//! signal families. All combinatorial paths use exact rationals.

pub mod analysis;
pub mod designs;
pub mod error;
pub mod harness;
pub mod lp;
pub mod rational;
pub mod recovery;
pub mod seed;
pub mod sensing;
pub mod signals;

pub use analysis::{
    adversarial_pair, cauchy_root_radius, cauchy_root_radius_kappa, descartes_positive_root_bound,
    measurement_budget, BudgetQuery, Goal, SignalClass, SignedCoefficientSequence,
};
pub use designs::{
    construct_list_disjunct, construct_list_union_free, verify_list_disjunct,
    verify_list_union_free, BinaryDesign, DesignClaim, DesignParams, DesignProperty, Status,
    Violation,
};
pub use error::{Error, Result};
pub use harness::{
    generate_signal_family, run_experiment, ExperimentConfig, FamilyDescriptor, FamilyMode,
    ResultsTable, RunGoal, Summary, ValueSet,
};
pub use rational::{format_rational, parse_rational, Rational};
pub use recovery::{
    decode_approximate, decode_l0_bruteforce, decode_superset, decode_superset_bounded_range,
    decode_superset_same_sign, superset_to_approximate, RecoveryReport,
};
pub use seed::derive_seed;
pub use sensing::{
    build_gaussian_matrix, build_thm1_matrix, build_thm3_matrix, build_thm4_matrix,
    build_thm5_matrix, measure, measure_with_threshold, MeasureMode, MeasurementVector, Regime,
    RegimeParams, Row, SensingMatrix,
};
pub use signals::{BinarySign, IndexSet, SparseSignal, TernarySign};
