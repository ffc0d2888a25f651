//! Acceptance suite: equality and inequality verification of the channel
//! resource identities at desk scale, plus anchored closed-form values.
//! Each criterion prints one pass/fail line.

use dyncoh::channels::{
    basis_density, random_channel, random_mio_channel, random_unitary_channel, QuantumChannel,
};
use dyncoh::density::{shannon_entropy_bits, von_neumann_entropy, DensityMatrix};
use dyncoh::divergences::{
    channel_divergence, relative_entropy, trace_distance, DivergenceKind, StateClass,
};
use dyncoh::matrix::{ComplexMatrix, C64};
use dyncoh::monotones::{
    cnot_entanglement_lower, coherence_power, coherence_trace_distance_mio,
    converted_entanglement_lower, ree, verify_convexity, verify_monotonicity, Bound,
    OptimizerConfig,
};
use dyncoh::statesets::{random_mixed, random_pure, relative_entropy_of_coherence};
use std::time::Instant;

fn check(criterion: &str, pass: bool, details: String) {
    let status = if pass { "PASS" } else { "FAIL" };
    println!("[acceptance] {criterion}: {status} — {details}");
    assert!(pass, "{criterion} failed: {details}");
}

fn cfg(seed: u64) -> OptimizerConfig {
    OptimizerConfig {
        seed,
        ..OptimizerConfig::default()
    }
}

fn bracket(report: &dyncoh::monotones::MonotoneReport) -> (f64, f64) {
    match report.bound {
        Bound::Bracket { lower, upper } => (lower, upper),
        _ => (report.lower(), report.upper()),
    }
}

/// Criterion 1a: coherence power equals the CNOT-generated entanglement for
/// 30 seeded Haar-random qubit channels, within 2e-3 bits, in under 5
/// minutes.
#[test]
fn criterion_1a_qubit_conversion_equality() {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for seed in 0..30u64 {
        let theta = random_channel(2, 2, 2, 100 + seed).expect("valid dims");
        let c = coherence_power(&theta, &cfg(seed)).value;
        let e = cnot_entanglement_lower(&theta, &cfg(seed))
            .expect("square channel")
            .value;
        worst = worst.max((c - e).abs());
    }
    let elapsed = start.elapsed().as_secs_f64();
    check(
        "criterion 1a (qubit conversion equality)",
        worst <= 2e-3 && elapsed <= 300.0,
        format!("max |C − E_cnot| = {worst:.3e} (tol 2e-3), runtime {elapsed:.1}s (limit 300s)"),
    );
}

/// Criterion 1b: the same equality for 10 qutrit channels within 5e-3 bits,
/// in under 15 minutes.
#[test]
fn criterion_1b_qutrit_conversion_equality() {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for seed in 0..10u64 {
        let theta = random_channel(3, 3, 3, 200 + seed).expect("valid dims");
        let c = coherence_power(&theta, &cfg(seed)).value;
        let e = cnot_entanglement_lower(&theta, &cfg(seed))
            .expect("square channel")
            .value;
        worst = worst.max((c - e).abs());
    }
    let elapsed = start.elapsed().as_secs_f64();
    check(
        "criterion 1b (qutrit conversion equality)",
        worst <= 5e-3 && elapsed <= 900.0,
        format!("max |C − E_cnot| = {worst:.3e} (tol 5e-3), runtime {elapsed:.1}s (limit 900s)"),
    );
}

/// Criterion 2: converted-channel entanglement never exceeds the coherence
/// power, for 50 random (Θ, Φ₁, Φ₂) with free processing from the
/// MIO-sample family.
#[test]
fn criterion_2_conversion_inequality() {
    let mut violations = 0usize;
    let mut worst: f64 = f64::NEG_INFINITY;
    for seed in 0..50u64 {
        let theta = random_channel(2, 2, 2, 300 + seed).expect("valid dims");
        let phi1 = random_mio_channel(4, 1300 + seed);
        let phi2 = random_mio_channel(4, 2300 + seed);
        let delta = QuantumChannel::dephasing(&[2, 2]);
        let extended = QuantumChannel::tensor(&theta, &QuantumChannel::identity(2));
        let converted = QuantumChannel::compose(
            &phi2,
            &QuantumChannel::compose(
                &extended,
                &QuantumChannel::compose(&phi1, &delta).expect("dims chain"),
            )
            .expect("dims chain"),
        )
        .expect("dims chain");
        let e = converted_entanglement_lower(&converted, (2, 2), (2, 2), &cfg(seed))
            .expect("valid splits")
            .value;
        let c = coherence_power(&theta, &cfg(seed)).value;
        let slack = e - c;
        worst = worst.max(slack);
        if slack > 2e-3 {
            violations += 1;
        }
    }
    check(
        "criterion 2 (processing inequality)",
        violations == 0,
        format!("{violations} violations in 50 triples, worst E − C = {worst:.3e} (tol 2e-3)"),
    );
}

/// Criterion 3: faithfulness — free channels score zero, Haar-random
/// unitaries score strictly positive.
#[test]
fn criterion_3_faithfulness() {
    let mut max_free: f64 = 0.0;
    for seed in 0..20u64 {
        let free = random_mio_channel(2, 400 + seed);
        max_free = max_free.max(coherence_power(&free, &cfg(seed)).value);
    }
    let mut min_unitary = f64::INFINITY;
    let mut accepted = 0u32;
    let mut seed = 0u64;
    while accepted < 20 {
        let u = random_unitary_channel(2, 500 + seed);
        seed += 1;
        if u.is_mio() {
            continue; // reject incoherent unitaries
        }
        accepted += 1;
        min_unitary = min_unitary.min(coherence_power(&u, &cfg(seed)).value);
    }
    check(
        "criterion 3 (faithfulness)",
        max_free <= 1e-9 && min_unitary >= 1e-6,
        format!(
            "max over 20 free channels = {max_free:.3e} (≤ 1e-9), \
             min over 20 random unitaries = {min_unitary:.3e} (≥ 1e-6)"
        ),
    );
}

/// Criterion 4: monotonicity and convexity of the coherence power, 100
/// seeded triples each, violations capped at 1e-7.
#[test]
fn criterion_4_monotone_properties() {
    let mut worst_mono: f64 = 0.0;
    for seed in 0..100u64 {
        let theta = random_channel(2, 2, 2, 600 + seed).expect("valid dims");
        let phi1 = random_mio_channel(2, 1600 + seed);
        let phi2 = random_mio_channel(2, 2600 + seed);
        let report = verify_monotonicity(&theta, &phi1, &phi2, &cfg(seed), 1e-7)
            .expect("free processing accepted");
        worst_mono = worst_mono.max(report.violation);
    }
    let mut worst_conv: f64 = 0.0;
    for seed in 0..100u64 {
        let a = random_channel(2, 2, 2, 700 + seed).expect("valid dims");
        let b = random_channel(2, 2, 2, 1700 + seed).expect("valid dims");
        let t = (seed as f64 + 0.5) / 100.0;
        let report = verify_convexity(&a, &b, t, &cfg(seed), 1e-7).expect("valid mixture");
        worst_conv = worst_conv.max(report.violation);
    }
    check(
        "criterion 4 (monotonicity and convexity)",
        worst_mono <= 1e-7 && worst_conv <= 1e-7,
        format!(
            "worst monotonicity violation {worst_mono:.3e}, worst convexity violation \
             {worst_conv:.3e} (tol 1e-7, 100 triples each)"
        ),
    );
}

/// Criterion 5: closed-form anchors.
#[test]
fn criterion_5_anchors() {
    let hadamard = coherence_power(&QuantumChannel::hadamard(), &cfg(1)).value;
    let dephasing = coherence_power(&QuantumChannel::dephasing(&[2]), &cfg(2)).value;

    let bell = DensityMatrix::maximally_entangled(2);
    let bell_report = ree(&bell, &cfg(3)).expect("bipartite input");
    let (bell_lower, bell_upper) = bracket(&bell_report);

    let cnot = QuantumChannel::cnot(2).expect("d ≥ 2");
    let out = cnot.apply(&basis_density(4, 2)).expect("dims match"); // |10⟩
    let expected = basis_density(4, 3); // |11⟩
    let cnot_exact = out.matrix().distance(expected.matrix()) == 0.0;

    let pass = (hadamard - 1.0).abs() <= 1e-9
        && dephasing == 0.0
        && (bell_lower - 1.0).abs() <= 1e-3
        && (bell_upper - 1.0).abs() <= 1e-3
        && cnot_exact;
    check(
        "criterion 5 (anchors)",
        pass,
        format!(
            "C(Hadamard) = {hadamard:.12} (1 ± 1e-9), C(Δ) = {dephasing}, \
             ree(Bell) ∈ [{bell_lower:.6}, {bell_upper:.6}] (1 ± 1e-3), \
             CNOT |10⟩→|11⟩ exact: {cnot_exact}"
        ),
    );
}

/// Criterion 6: replacement channels reduce the dynamical measure to the
/// static relative entropy of coherence.
#[test]
fn criterion_6_state_reduction() {
    let mut worst: f64 = 0.0;
    for seed in 0..20u64 {
        let pure = DensityMatrix::from_pure(vec![2], &random_pure(2, 800 + seed))
            .expect("normalized vector");
        let mixed = random_mixed(2, 900 + seed);
        for tau in [pure, mixed] {
            let channel = QuantumChannel::replacement(&tau, 2);
            let dynamic = coherence_power(&channel, &cfg(seed)).value;
            let static_value = relative_entropy_of_coherence(&tau);
            worst = worst.max((dynamic - static_value).abs());
        }
    }
    check(
        "criterion 6 (replacement-channel reduction)",
        worst <= 1e-7,
        format!("max |C(Θ_τ) − R_C(τ)| = {worst:.3e} over 20 pure + 20 mixed τ (tol 1e-7)"),
    );
}

/// Criterion 7: relative entropy of entanglement of maximally correlated
/// states matches the coherence closed form within a tight bracket.
#[test]
fn criterion_7_ree_oracle_consistency() {
    let mut worst_width: f64 = 0.0;
    let mut contained = true;
    for seed in 0..20u64 {
        let base = random_mixed(2, 1000 + seed);
        let m = base.matrix();
        let mut mc = ComplexMatrix::zeros(4, 4);
        for i in 0..2 {
            for j in 0..2 {
                mc[(i * 2 + i, j * 2 + j)] = m[(i, j)];
            }
        }
        let rho = DensityMatrix::new(vec![2, 2], mc).expect("maximally correlated state");
        let oracle = shannon_entropy_bits(&m.real_diagonal()) - von_neumann_entropy(&base);
        let report = ree(&rho, &cfg(seed)).expect("bipartite input");
        let (lower, upper) = bracket(&report);
        contained &= lower <= oracle + 1e-9 && oracle <= upper + 1e-9;
        worst_width = worst_width.max(upper - lower);
    }
    check(
        "criterion 7 (maximally correlated REE oracle)",
        contained && worst_width <= 2e-3,
        format!("oracle contained in bracket: {contained}, max width {worst_width:.3e} (tol 2e-3)"),
    );
}

/// Criterion 8: trace-distance distance to MIO — zero on free channels,
/// bracket below the dephasing anchor, width within 1e-3 for qubits.
#[test]
fn criterion_8_trace_distance_mio() {
    let mut max_free: f64 = 0.0;
    let mut anchors_ok = true;
    let mut worst_width: f64 = 0.0;

    let mut channels = Vec::new();
    for seed in 0..10u64 {
        channels.push((random_mio_channel(2, 1100 + seed), true));
        channels.push((
            random_channel(2, 2, 2, 1200 + seed).expect("valid dims"),
            false,
        ));
    }
    for (idx, (theta, is_free)) in channels.iter().enumerate() {
        let report = coherence_trace_distance_mio(theta, &cfg(idx as u64)).expect("square channel");
        let (lower, upper) = bracket(&report);
        if *is_free {
            max_free = max_free.max(report.value);
        }
        // Upper anchor: Λ = ΔΘΔ.
        let delta = QuantumChannel::dephasing(&[2]);
        let anchor_channel = QuantumChannel::compose(
            &delta,
            &QuantumChannel::compose(theta, &delta).expect("dims"),
        )
        .expect("dims");
        let mut anchor: f64 = 0.0;
        for i in 0..2 {
            let a = DensityMatrix::new(vec![2], theta.basis_image(i)).expect("image is a state");
            let b = DensityMatrix::new(vec![2], anchor_channel.basis_image(i))
                .expect("image is a state");
            anchor = anchor.max(trace_distance(&a, &b));
        }
        anchors_ok &= lower <= anchor + 1e-12;
        worst_width = worst_width.max(upper - lower);
    }
    check(
        "criterion 8 (trace-distance MIO measure)",
        max_free <= 1e-6 && anchors_ok && worst_width <= 1e-3,
        format!(
            "max over free channels {max_free:.3e} (≤ 1e-6), lower ≤ anchor everywhere: \
             {anchors_ok}, max bracket width {worst_width:.3e} (≤ 1e-3)"
        ),
    );
}

/// Criterion 9: divergence property suite — data processing and joint
/// convexity on 500 random triples each, and ancilla elimination for
/// incoherent inputs by exact basis enumeration.
#[test]
fn criterion_9_divergence_properties() {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(0xD1CE);

    let mut worst_dpi: f64 = 0.0;
    for _ in 0..500 {
        let rho = dyncoh::statesets::random_mixed_with(2, &mut rng);
        let sigma = dyncoh::statesets::random_mixed_with(2, &mut rng);
        let channel = dyncoh::channels::random_channel_with(2, 2, 2, &mut rng).expect("valid dims");
        let out_r = channel.apply(&rho).expect("dims match");
        let out_s = channel.apply(&sigma).expect("dims match");
        worst_dpi = worst_dpi
            .max(relative_entropy(&out_r, &out_s) - relative_entropy(&rho, &sigma))
            .max(trace_distance(&out_r, &out_s) - trace_distance(&rho, &sigma));
    }

    let mut worst_convexity: f64 = 0.0;
    for _ in 0..500 {
        let rho1 = dyncoh::statesets::random_mixed_with(2, &mut rng);
        let rho2 = dyncoh::statesets::random_mixed_with(2, &mut rng);
        let sig1 = dyncoh::statesets::random_mixed_with(2, &mut rng);
        let sig2 = dyncoh::statesets::random_mixed_with(2, &mut rng);
        let t = 0.31;
        let mix = |a: &DensityMatrix, b: &DensityMatrix| {
            DensityMatrix::new(
                vec![2],
                a.matrix()
                    .scale(C64::new(t, 0.0))
                    .add(&b.matrix().scale(C64::new(1.0 - t, 0.0))),
            )
            .expect("mixture is a state")
        };
        let rho_mix = mix(&rho1, &rho2);
        let sig_mix = mix(&sig1, &sig2);
        worst_convexity = worst_convexity
            .max(
                relative_entropy(&rho_mix, &sig_mix)
                    - t * relative_entropy(&rho1, &sig1)
                    - (1.0 - t) * relative_entropy(&rho2, &sig2),
            )
            .max(
                trace_distance(&rho_mix, &sig_mix)
                    - t * trace_distance(&rho1, &sig1)
                    - (1.0 - t) * trace_distance(&rho2, &sig2),
            );
    }

    // Ancilla elimination: the incoherent-input channel divergence is
    // unchanged by tensoring an identity ancilla onto both channels.
    let mut worst_ancilla: f64 = 0.0;
    for seed in 0..10u64 {
        let theta = random_channel(2, 2, 2, 1400 + seed).expect("valid dims");
        let lambda = random_mio_channel(2, 1500 + seed);
        for kind in [
            DivergenceKind::TraceDistance,
            DivergenceKind::RelativeEntropy,
        ] {
            let direct = channel_divergence(
                kind,
                StateClass::IncoherentStates,
                &theta,
                &lambda,
                0,
                0,
                seed,
            )
            .expect("matching dims");
            let id = QuantumChannel::identity(2);
            let ext = channel_divergence(
                kind,
                StateClass::IncoherentStates,
                &QuantumChannel::tensor(&theta, &id),
                &QuantumChannel::tensor(&lambda, &id),
                0,
                0,
                seed,
            )
            .expect("matching dims");
            if direct.value.is_finite() && ext.value.is_finite() {
                worst_ancilla = worst_ancilla.max((direct.value - ext.value).abs());
            } else {
                worst_ancilla = worst_ancilla.max(if direct.value == ext.value {
                    0.0
                } else {
                    f64::INFINITY
                });
            }
        }
    }
    check(
        "criterion 9 (divergence properties)",
        worst_dpi <= 1e-9 && worst_convexity <= 1e-9 && worst_ancilla <= 1e-10,
        format!(
            "worst DPI violation {worst_dpi:.3e}, worst joint-convexity violation \
             {worst_convexity:.3e} (tol 1e-9, 500 triples each), worst ancilla-elimination \
             mismatch {worst_ancilla:.3e} (tol 1e-10)"
        ),
    );
}
