//! Measurement-based equilibration of classical and quantum dynamics.
//!
//! A state equilibrates up to `ε` with respect to a measurement when the
//! time-averaged distinguishability between its outcome distribution and
//! the time-averaged distribution is at most `ε`. This crate evaluates that
//! quantity numerically for iterated maps of the torus and for
//! finite-dimensional quantum systems, and evaluates the analytic
//! conditions and bounds that predict it:
//!
//! * [`check_sufficiency`]: a condition that guarantees equilibration in
//!   any theory;
//! * [`classical::check_necessity`] and
//!   [`classical::pure_average_distinguishability_closed_form`] for
//!   classical pure states;
//! * [`classical::mixed_equilibration_bound`] for classical mixtures that
//!   are mostly chaotic;
//! * [`quantum::quantum_bound`] and
//!   [`quantum::max_outcomes_for_equilibration`] for quantum states.

pub mod average;
pub mod classical;
pub mod distribution;
pub mod error;
pub mod probe;
pub mod quantum;
pub mod report;
pub mod synthetic;

pub use average::{
    average_distinguishability, multi_average_distinguishability, time_average_distribution,
    Estimate, MultiAverage, SamplingScheme, TimeAverageConfig,
};
pub use distribution::{
    distinguishability, guessing_probability, multi_distinguishability, multi_measurement_budget,
    OutcomeDistribution,
};
pub use error::{Error, Result};
pub use probe::{ConstantProbe, FnProbe, TrajectoryProbe};
pub use report::{assess, check_sufficiency, EquilibrationReport, Verdict};
pub use synthetic::{synthetic_probe, SyntheticKind, SyntheticProbe, SyntheticSpec};
