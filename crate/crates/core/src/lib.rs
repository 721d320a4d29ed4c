//! Entropy-method concentration checks on finite product spaces, and Monte
//! Carlo validation of eigenvalue tail bounds for bounded-entry random
//! matrices.
//!
//! * [`space`] and [`entropy`]: exact entropy functionals and the
//!   tensorization, log-Sobolev and moment generating function inequalities.
//! * [`delta`]: inf/sup coordinate perturbations, `Delta^2`, tail bounds.
//! * [`spectra`]: random matrix ensembles, eigenvalues, column-replacement
//!   checks and the Marchenko-Pastur comparison.
//! * [`montecarlo`]: reproducible parallel tail estimation.
//! * [`stats`]: Clopper-Pearson intervals.

pub mod delta;
pub mod entropy;
pub mod error;
pub mod montecarlo;
pub mod space;
pub mod spectra;
pub mod stats;

pub use delta::{
    delta_squared, maurer_eig_bounds, perturbed_values, tail_bound, DeltaReport,
    PerturbationChoice, TailSide,
};
pub use entropy::{
    duality_value, entropy, herbst_mgf_check, log_sobolev_gap, partial_entropy, tensorization_gap,
    variation_value, MgfComparison, Tolerances,
};
pub use error::{Error, Result, SeedTag};
pub use montecarlo::{compare_report, MpCheckConfig, SimulationConfig, TailReport};
pub use space::{CoordinateSpace, FunctionTable, Point, ProductSpace};
pub use stats::{clopper_pearson, Interval};
