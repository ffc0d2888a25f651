//! Verification suites: seeded batches of channels pushed through the
//! monotone evaluators, with per-assertion pass/fail accounting.
//!
//! Determinism contract: every channel gets its own seed derived from the
//! config seed, per-channel work runs on a rayon pool, and results are
//! collected in index order, so reports are byte-identical across runs with
//! the same config regardless of scheduling. Wall time is printed to the
//! console but kept out of the serialized report for the same reason.

use crate::config::{ExperimentConfig, Suite};
use dyncoh::channels::{
    random_channel, random_mio_channel, random_unitary_channel, QuantumChannel,
};
use dyncoh::density::DensityMatrix;
use dyncoh::monotones::{
    cnot_entanglement_lower, coherence_power, converted_entanglement_lower, verify_convexity,
    verify_monotonicity, OptimizerConfig,
};
use dyncoh::statesets::{random_mixed, random_pure, relative_entropy_of_coherence};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::Path;

/// Pinned acceptance thresholds.
pub const THM5_TOL_QUBIT: f64 = 2e-3;
pub const THM5_TOL_QUTRIT: f64 = 5e-3;
pub const THM3_TOL: f64 = 2e-3;
pub const PROP2_TOL: f64 = 1e-7;
pub const COR6_FREE_TOL: f64 = 1e-9;
pub const COR6_UNITARY_MIN: f64 = 1e-6;
pub const REDUCTION_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AssertionReport {
    pub name: String,
    pub max_violation: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl AssertionReport {
    fn new(name: impl Into<String>, max_violation: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            max_violation,
            tolerance,
            pass: max_violation <= tolerance,
        }
    }
}

/// One row per evaluated channel: identifier, coherence power, converted
/// entanglement lower bound when the suite computes one, and their gap.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChannelRecord {
    pub id: String,
    pub coherence: f64,
    pub entanglement_lower: Option<f64>,
    pub gap: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub dims: Vec<usize>,
    pub n_channels: usize,
    pub seed: u64,
    pub assertions: Vec<AssertionReport>,
    pub channels: Vec<ChannelRecord>,
    pub pass: bool,
    #[serde(skip)]
    pub wall_time_secs: f64,
}

impl SuiteReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("channel_id,coherence,entanglement_lower,gap\n");
        for record in &self.channels {
            let e = record
                .entanglement_lower
                .map(|v| v.to_string())
                .unwrap_or_default();
            let g = record.gap.map(|v| v.to_string()).unwrap_or_default();
            out.push_str(&format!("{},{},{},{}\n", record.id, record.coherence, e, g));
        }
        out
    }

    /// Writes `report.json` and `report.csv` into `out_dir`.
    pub fn emit(&self, out_dir: &Path) -> anyhow::Result<()> {
        std::fs::create_dir_all(out_dir)?;
        let mut json = std::fs::File::create(out_dir.join("report.json"))?;
        json.write_all(self.to_json().as_bytes())?;
        let mut csv = std::fs::File::create(out_dir.join("report.csv"))?;
        csv.write_all(self.to_csv().as_bytes())?;
        Ok(())
    }
}

fn channel_seed(base: u64, stream: u64, index: u64) -> u64 {
    base.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(stream.wrapping_mul(0x1000))
        .wrapping_add(index)
}

fn opt(cfg: &ExperimentConfig, seed: u64) -> OptimizerConfig {
    OptimizerConfig {
        seed,
        ..cfg.optimizer
    }
}

fn thm5_tol(dim: usize) -> f64 {
    if dim <= 2 {
        THM5_TOL_QUBIT
    } else {
        THM5_TOL_QUTRIT
    }
}

fn run_thm5(cfg: &ExperimentConfig) -> (Vec<AssertionReport>, Vec<ChannelRecord>) {
    let mut assertions = Vec::new();
    let mut channels = Vec::new();
    for &dim in &cfg.dims {
        let results: Vec<ChannelRecord> = (0..cfg.n_channels as u64)
            .into_par_iter()
            .map(|k| {
                let seed = channel_seed(cfg.seed, 5, k);
                let theta = random_channel(dim, dim, dim, seed).expect("valid dims");
                let c = coherence_power(&theta, &opt(cfg, seed)).value;
                let e = cnot_entanglement_lower(&theta, &opt(cfg, seed))
                    .expect("square channel")
                    .value;
                ChannelRecord {
                    id: format!("thm5-d{dim}-{k}"),
                    coherence: c,
                    entanglement_lower: Some(e),
                    gap: Some(c - e),
                }
            })
            .collect();
        let worst = results
            .iter()
            .map(|r| r.gap.unwrap_or(0.0).abs())
            .fold(0.0f64, f64::max);
        assertions.push(AssertionReport::new(
            format!("thm5 equality |C − E_cnot| (d={dim})"),
            worst,
            thm5_tol(dim),
        ));
        channels.extend(results);
    }
    (assertions, channels)
}

fn run_thm3(cfg: &ExperimentConfig) -> (Vec<AssertionReport>, Vec<ChannelRecord>) {
    let mut assertions = Vec::new();
    let mut channels = Vec::new();
    for &dim in &cfg.dims {
        let results: Vec<ChannelRecord> = (0..cfg.n_channels as u64)
            .into_par_iter()
            .map(|k| {
                let seed = channel_seed(cfg.seed, 3, k);
                let theta = random_channel(dim, dim, dim, seed).expect("valid dims");
                let phi1 = random_mio_channel(dim * dim, seed.wrapping_add(1));
                let phi2 = random_mio_channel(dim * dim, seed.wrapping_add(2));
                let delta = QuantumChannel::dephasing(&[dim, dim]);
                let extended = QuantumChannel::tensor(&theta, &QuantumChannel::identity(dim));
                let converted = QuantumChannel::compose(
                    &phi2,
                    &QuantumChannel::compose(
                        &extended,
                        &QuantumChannel::compose(&phi1, &delta).expect("dims chain"),
                    )
                    .expect("dims chain"),
                )
                .expect("dims chain");
                let c = coherence_power(&theta, &opt(cfg, seed)).value;
                let e = converted_entanglement_lower(
                    &converted,
                    (dim, dim),
                    (dim, dim),
                    &opt(cfg, seed),
                )
                .expect("valid splits")
                .value;
                ChannelRecord {
                    id: format!("thm3-d{dim}-{k}"),
                    coherence: c,
                    entanglement_lower: Some(e),
                    gap: Some(c - e),
                }
            })
            .collect();
        // Violation is entanglement exceeding coherence.
        let worst = results
            .iter()
            .map(|r| -r.gap.unwrap_or(0.0))
            .fold(0.0f64, f64::max);
        assertions.push(AssertionReport::new(
            format!("thm3 inequality E ≤ C (d={dim})"),
            worst,
            THM3_TOL,
        ));
        channels.extend(results);
    }
    (assertions, channels)
}

fn run_prop2(cfg: &ExperimentConfig) -> (Vec<AssertionReport>, Vec<ChannelRecord>) {
    let mut assertions = Vec::new();
    let mut channels = Vec::new();
    for &dim in &cfg.dims {
        let mono: Vec<(ChannelRecord, f64)> = (0..cfg.n_channels as u64)
            .into_par_iter()
            .map(|k| {
                let seed = channel_seed(cfg.seed, 2, k);
                let theta = random_channel(dim, dim, dim, seed).expect("valid dims");
                let phi1 = random_mio_channel(dim, seed.wrapping_add(1));
                let phi2 = random_mio_channel(dim, seed.wrapping_add(2));
                let report = verify_monotonicity(&theta, &phi1, &phi2, &opt(cfg, seed), PROP2_TOL)
                    .expect("sampled processing is free");
                (
                    ChannelRecord {
                        id: format!("prop2-mono-d{dim}-{k}"),
                        coherence: report.rhs,
                        entanglement_lower: None,
                        gap: None,
                    },
                    report.violation,
                )
            })
            .collect();
        let conv: Vec<(ChannelRecord, f64)> = (0..cfg.n_channels as u64)
            .into_par_iter()
            .map(|k| {
                let seed = channel_seed(cfg.seed, 12, k);
                let a = random_channel(dim, dim, dim, seed).expect("valid dims");
                let b = random_channel(dim, dim, dim, seed.wrapping_add(1)).expect("valid dims");
                let t = (k as f64 + 0.5) / cfg.n_channels as f64;
                let report =
                    verify_convexity(&a, &b, t, &opt(cfg, seed), PROP2_TOL).expect("valid mixture");
                (
                    ChannelRecord {
                        id: format!("prop2-conv-d{dim}-{k}"),
                        coherence: report.lhs,
                        entanglement_lower: None,
                        gap: None,
                    },
                    report.violation,
                )
            })
            .collect();
        let worst_mono = mono.iter().map(|(_, v)| *v).fold(0.0f64, f64::max);
        let worst_conv = conv.iter().map(|(_, v)| *v).fold(0.0f64, f64::max);
        assertions.push(AssertionReport::new(
            format!("prop2 monotonicity (d={dim})"),
            worst_mono,
            PROP2_TOL,
        ));
        assertions.push(AssertionReport::new(
            format!("prop2 convexity (d={dim})"),
            worst_conv,
            PROP2_TOL,
        ));
        channels.extend(mono.into_iter().map(|(r, _)| r));
        channels.extend(conv.into_iter().map(|(r, _)| r));
    }
    (assertions, channels)
}

fn run_cor6(cfg: &ExperimentConfig) -> (Vec<AssertionReport>, Vec<ChannelRecord>) {
    let mut assertions = Vec::new();
    let mut channels = Vec::new();
    for &dim in &cfg.dims {
        let free: Vec<ChannelRecord> = (0..cfg.n_channels as u64)
            .into_par_iter()
            .map(|k| {
                let seed = channel_seed(cfg.seed, 6, k);
                let theta = random_mio_channel(dim, seed);
                ChannelRecord {
                    id: format!("cor6-free-d{dim}-{k}"),
                    coherence: coherence_power(&theta, &opt(cfg, seed)).value,
                    entanglement_lower: None,
                    gap: None,
                }
            })
            .collect();
        let unitaries: Vec<ChannelRecord> = (0..cfg.n_channels as u64)
            .into_par_iter()
            .map(|k| {
                let mut seed = channel_seed(cfg.seed, 16, k);
                // Incoherent unitaries are measure-zero; reject them anyway.
                let theta = loop {
                    let candidate = random_unitary_channel(dim, seed);
                    if !candidate.is_mio() {
                        break candidate;
                    }
                    seed = seed.wrapping_add(0xffff);
                };
                ChannelRecord {
                    id: format!("cor6-unitary-d{dim}-{k}"),
                    coherence: coherence_power(&theta, &opt(cfg, seed)).value,
                    entanglement_lower: None,
                    gap: None,
                }
            })
            .collect();
        let max_free = free.iter().map(|r| r.coherence).fold(0.0f64, f64::max);
        let min_unitary = unitaries
            .iter()
            .map(|r| r.coherence)
            .fold(f64::INFINITY, f64::min);
        assertions.push(AssertionReport::new(
            format!("cor6 free channels score zero (d={dim})"),
            max_free,
            COR6_FREE_TOL,
        ));
        // Positivity phrased as a violation: how far below the floor.
        assertions.push(AssertionReport::new(
            format!("cor6 random unitaries score above {COR6_UNITARY_MIN:.0e} (d={dim})"),
            (COR6_UNITARY_MIN - min_unitary).max(0.0),
            0.0,
        ));
        channels.extend(free);
        channels.extend(unitaries);
    }
    (assertions, channels)
}

fn run_reduction(cfg: &ExperimentConfig) -> (Vec<AssertionReport>, Vec<ChannelRecord>) {
    let mut assertions = Vec::new();
    let mut channels = Vec::new();
    for &dim in &cfg.dims {
        let results: Vec<(ChannelRecord, f64)> = (0..cfg.n_channels as u64)
            .into_par_iter()
            .map(|k| {
                let seed = channel_seed(cfg.seed, 4, k);
                let tau = if k % 2 == 0 {
                    DensityMatrix::from_pure(vec![dim], &random_pure(dim, seed))
                        .expect("normalized vector")
                } else {
                    random_mixed(dim, seed)
                };
                let channel = QuantumChannel::replacement(&tau, dim);
                let dynamic = coherence_power(&channel, &opt(cfg, seed)).value;
                let static_value = relative_entropy_of_coherence(&tau);
                (
                    ChannelRecord {
                        id: format!("reduction-d{dim}-{k}"),
                        coherence: dynamic,
                        entanglement_lower: None,
                        gap: Some(dynamic - static_value),
                    },
                    (dynamic - static_value).abs(),
                )
            })
            .collect();
        let worst = results.iter().map(|(_, v)| *v).fold(0.0f64, f64::max);
        assertions.push(AssertionReport::new(
            format!("reduction |C(Θ_τ) − R_C(τ)| (d={dim})"),
            worst,
            REDUCTION_TOL,
        ));
        channels.extend(results.into_iter().map(|(r, _)| r));
    }
    (assertions, channels)
}

/// Runs the configured suite. Deterministic given the config; the exit
/// status of the CLI reflects `report.pass`.
pub fn run_suite(cfg: &ExperimentConfig) -> anyhow::Result<SuiteReport> {
    cfg.validate()?;
    let start = std::time::Instant::now();
    let mut assertions = Vec::new();
    let mut channels = Vec::new();
    let parts: Vec<Suite> = match cfg.suite {
        Suite::All => vec![
            Suite::Thm5,
            Suite::Thm3,
            Suite::Prop2,
            Suite::Cor6,
            Suite::Reduction,
        ],
        s => vec![s],
    };
    for part in parts {
        let (a, c) = match part {
            Suite::Thm5 => run_thm5(cfg),
            Suite::Thm3 => run_thm3(cfg),
            Suite::Prop2 => run_prop2(cfg),
            Suite::Cor6 => run_cor6(cfg),
            Suite::Reduction => run_reduction(cfg),
            Suite::All => unreachable!("expanded above"),
        };
        assertions.extend(a);
        channels.extend(c);
    }
    let pass = assertions.iter().all(|a| a.pass);
    Ok(SuiteReport {
        suite: cfg.suite,
        dims: cfg.dims.clone(),
        n_channels: cfg.n_channels,
        seed: cfg.seed,
        assertions,
        channels,
        pass,
        wall_time_secs: start.elapsed().as_secs_f64(),
    })
}
