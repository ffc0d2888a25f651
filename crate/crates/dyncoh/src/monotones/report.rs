//! Report and configuration types shared by every monotone evaluator.

use crate::channels::{ChannelError, QuantumChannel};
use crate::density::{DensityMatrix, StateError};
use crate::divergences::{DivergenceError, DivergenceKind, MeasurementMode, StateClass};
use crate::io::{ChannelFile, StateFile};
use crate::statesets::SeparableDecomposition;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MonotoneError {
    #[error("channel rejected, not in the required free set: {0}")]
    NotFree(String),

    #[error("dimension mismatch: {0}")]
    BadDims(String),

    #[error(transparent)]
    Channel(#[from] ChannelError),

    #[error(transparent)]
    State(#[from] StateError),

    #[error(transparent)]
    Divergence(#[from] DivergenceError),
}

/// Which resource a monotone quantifies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Resource {
    Coherence,
    Entanglement,
}

/// Identifier of a monotone: resource, divergence, input class, measurement
/// mode, and the free set the infimum runs over.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotoneKind {
    pub resource: Resource,
    pub divergence: DivergenceKind,
    pub states: StateClass,
    pub measurement: MeasurementMode,
    pub free_set: String,
}

impl std::fmt::Display for MonotoneKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let r = match self.resource {
            Resource::Coherence => "C",
            Resource::Entanglement => "E",
        };
        write!(
            f,
            "{r}[{}; {}; {}; {}]",
            self.free_set, self.divergence, self.states, self.measurement
        )
    }
}

/// What kind of statement the reported value makes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Bound {
    /// Closed-form or finite exact reduction.
    Exact,
    /// Certified lower bound achieved by the attached witness.
    LowerBound,
    /// Certified upper bound achieved by the attached witness.
    UpperBound,
    /// Two-sided enclosure from a solver plus an independent certificate.
    Bracket { lower: f64, upper: f64 },
}

/// Optimizer witness attached to a report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum Witness {
    None,
    /// A point on the input probability simplex.
    Probabilities(Vec<f64>),
    /// A quantum state (file-format encoding).
    State(StateFile),
    /// A channel (file-format encoding).
    Channel(ChannelFile),
    /// A separable decomposition certificate.
    Decomposition {
        dim_a: usize,
        dim_b: usize,
        weights: Vec<f64>,
        /// Per term: interleaved (re, im) coordinates of the A and B vectors.
        terms_a: Vec<Vec<f64>>,
        terms_b: Vec<Vec<f64>>,
    },
}

impl Witness {
    pub fn state(s: &DensityMatrix) -> Self {
        Witness::State(StateFile::from_state(s))
    }

    pub fn channel(c: &QuantumChannel) -> Self {
        Witness::Channel(ChannelFile::from_channel(c))
    }

    pub fn decomposition(dec: &SeparableDecomposition) -> Self {
        let encode = |v: &crate::matrix::ComplexVector| {
            let mut out = Vec::with_capacity(2 * v.dim());
            for i in 0..v.dim() {
                out.push(v[i].re);
                out.push(v[i].im);
            }
            out
        };
        Witness::Decomposition {
            dim_a: dec.dim_a(),
            dim_b: dec.dim_b(),
            weights: dec.weights().to_vec(),
            terms_a: dec.terms().iter().map(|(a, _)| encode(a)).collect(),
            terms_b: dec.terms().iter().map(|(_, b)| encode(b)).collect(),
        }
    }
}

/// Optimizer run statistics and provenance notes.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Diagnostics {
    pub iterations: usize,
    pub restarts: usize,
    pub evaluations: usize,
    pub seed: u64,
    /// Estimated distance to optimality where one is available.
    pub gap: Option<f64>,
    /// True when the value rests on sampled starting points rather than an
    /// exact reduction.
    pub heuristic: bool,
    pub notes: Vec<String>,
}

/// Value of a monotone plus the exact nature of the claim being made.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MonotoneReport {
    pub value: f64,
    pub kind: MonotoneKind,
    pub bound: Bound,
    pub witness: Witness,
    pub diagnostics: Diagnostics,
}

impl MonotoneReport {
    /// Largest value consistent with the report.
    pub fn upper(&self) -> f64 {
        match self.bound {
            Bound::Bracket { upper, .. } => upper,
            Bound::UpperBound | Bound::Exact => self.value,
            Bound::LowerBound => f64::INFINITY,
        }
    }

    /// Smallest value consistent with the report.
    pub fn lower(&self) -> f64 {
        match self.bound {
            Bound::Bracket { lower, .. } => lower,
            Bound::LowerBound | Bound::Exact => self.value,
            Bound::UpperBound => 0.0,
        }
    }

    /// Bracket width (zero for one-sided and exact reports).
    pub fn bracket_width(&self) -> f64 {
        match self.bound {
            Bound::Bracket { lower, upper } => upper - lower,
            _ => 0.0,
        }
    }

    /// Checks the structural invariants: nonnegative value, ordered bracket.
    pub fn validate(&self) -> Result<(), String> {
        if !self.value.is_finite() || self.value < 0.0 {
            return Err(format!("monotone value {} must be ≥ 0", self.value));
        }
        if let Bound::Bracket { lower, upper } = self.bound {
            if lower > upper + 1e-12 {
                return Err(format!("bracket [{lower}, {upper}] is inverted"));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Step-size schedule for subgradient-type solvers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum StepSchedule {
    /// `c/√k`; `c ≤ 0` auto-scales `c` to the upper-bound anchor.
    InverseSqrt {
        c: f64,
    },
    Fixed {
        step: f64,
    },
}

/// Budgets and seeds for the iterative evaluators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    /// Multi-start count (restarts for minimizers, sample counts for
    /// heuristic suprema).
    pub starts: usize,
    /// Iteration cap per start.
    pub max_iters: usize,
    pub step_schedule: StepSchedule,
    /// Relative-improvement stopping tolerance.
    pub tol: f64,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            starts: 16,
            max_iters: 600,
            step_schedule: StepSchedule::InverseSqrt { c: 0.0 },
            tol: 1e-9,
            seed: 7,
        }
    }
}

impl OptimizerConfig {
    /// Lighter budget for evaluators called inside other optimization loops.
    pub fn inner(&self) -> Self {
        Self {
            starts: 4.min(self.starts.max(1)),
            max_iters: self.max_iters.min(300),
            ..*self
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.starts == 0 {
            return Err("starts must be ≥ 1".into());
        }
        if !self.tol.is_finite() || self.tol <= 0.0 {
            return Err(format!("tol must be > 0, got {}", self.tol));
        }
        Ok(())
    }
}
