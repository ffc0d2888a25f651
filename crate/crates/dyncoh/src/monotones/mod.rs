//! Channel resource monotones.
//!
//! Every evaluator returns a [`MonotoneReport`] whose `bound` field says
//! exactly what kind of statement the number makes: a closed-form value, a
//! certified one-sided bound with the witness achieving it, or a bracket
//! `[lower, upper]` from a solver paired with an independent certificate.
//! Heuristic estimates are never silently presented as exact values.

mod coherence;
mod conversion;
mod mio_distance;
mod ree;
mod report;

pub use coherence::{coherence_power, verify_convexity, verify_monotonicity, PropertyReport};
pub use conversion::{
    cnot_entanglement_lower, converted_entanglement_lower, entanglement_potential,
};
pub use mio_distance::{coherence_trace_distance_measured, coherence_trace_distance_mio, FreeSet};
pub use ree::{ree, ree_with_terms};
pub use report::{
    Bound, Diagnostics, MonotoneKind, MonotoneReport, OptimizerConfig, Resource, StepSchedule,
    Witness,
};
