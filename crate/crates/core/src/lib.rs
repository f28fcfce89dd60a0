//! Fixed-point analysis for rational-type contractions with altering
//! distance functions.
//!
//! The crate works on complete metric spaces that can be evaluated exactly
//! (finite distance matrices and closed boxes in `R^n`) and provides:
//!
//! - [`altering`]: altering distance functions, including integral-type
//!   functions `t -> int_0^t phi`, and grid checks of their defining
//!   properties;
//! - [`contraction`]: the rational term `m(x, y)`, pointwise checks of the
//!   contractive inequalities, and certification of constants `(a, b)` by
//!   half-plane intersection;
//! - [`picard`]: Picard iteration with a priori bounds and Cauchy-violation
//!   witnesses;
//! - [`fixedset`]: fixed-point sets of iterates, property P, and periodic
//!   points;
//! - [`config`], [`report`] and [`run`]: the TOML-driven front end used by the
//!   `ratfix` binary.
//!
//! Runnable walkthroughs for each of these live in the `examples/` directory.

// `!(x > 0.0)` is how NaN gets rejected; matrix code indexes by design.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod altering;
pub mod config;
pub mod contraction;
pub mod error;
pub mod fixedset;
pub mod picard;
pub mod report;
pub mod run;
pub mod spaces;

pub use altering::{
    check_psi_properties, evaluate_psi, make_integral_psi, AlteringFunction, Density,
    QuadratureSettings,
};
pub use contraction::{
    certify, check_inequality, evaluate_m, feasible_region_vertices, ConditionKind,
    ContractionCertificate, ContractionCondition, Evidence, PairSample,
};
pub use error::{Error, Result};
pub use fixedset::{check_property_p, fixed_points, refute_periodic_chain, SearchOptions};
pub use picard::{
    a_priori_bound, find_cauchy_witness, iterate, iters_to_tolerance, BoundConstants,
    IterationTrace, Verdict,
};
pub use spaces::{
    validate_space, Family, FamilyMap, FiniteMetricSpace, MetricSpace, RealBoxSpace, SelfMap,
    TableMap,
};
