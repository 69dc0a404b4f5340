//! Acceptance criteria. Each test prints one PASS/FAIL line.

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use uqcm::budget::{
    emission_probability, feasibility_threshold, lhs_mmax, min_emission_probability, SpeciesDb,
    TrapParams,
};
use uqcm::cloner::{
    basis_count, feasibility, ideal_output, theoretical_fidelity, CloneSpec, MachineConvention,
};
use uqcm::perm::{schedule, validate_plan, Move, PermutationPlan, PermutationSpec};
use uqcm::prep::{synthesize_prep, PrepTarget};
use uqcm::synth::{reference_one_to_two, synthesize, ClonerCircuit, SynthOptions};
use uqcm::verify::{verify, ClonerSimulation};
use uqcm::StateVector;

fn report(id: &str, pass: bool, detail: String) {
    println!("{} criterion {id}: {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {id} failed: {detail}");
}

fn spec(n: u32, m: u32) -> CloneSpec {
    CloneSpec::new(n, m).unwrap()
}

/// Every spec with M <= 6 that synthesizes, with or without aux, into at
/// most 12 qubits.
fn small_cloners() -> Vec<(CloneSpec, bool, ClonerCircuit)> {
    let mut out = Vec::new();
    for m in 2..=6 {
        for n in 1..m {
            for aux in [false, true] {
                if let Ok(c) = synthesize(&spec(n, m), &SynthOptions::with_aux(aux)) {
                    if c.circuit.n_qubits() <= 12 {
                        out.push((spec(n, m), aux, c));
                    }
                }
            }
        }
    }
    out
}

/// Werner's optimal fidelity.
fn werner(n: u32, m: u32) -> f64 {
    let (n, m) = (n as f64, m as f64);
    (m * (n + 1.0) + n) / (m * (n + 2.0))
}

#[test]
fn criterion_1_one_to_two_fidelity() {
    let t = Instant::now();
    let s = spec(1, 2);
    let synthesized = synthesize(&s, &SynthOptions::default()).unwrap().circuit;
    let mut worst: f64 = 0.0;
    let mut worst_std: f64 = 0.0;
    for circuit in [reference_one_to_two(), synthesized] {
        let r = verify(&s, &circuit, 100, 11).unwrap();
        worst = worst.max((r.clone_fidelity_mean - 5.0 / 6.0).abs());
        worst_std = worst_std.max(r.clone_fidelity_std);
    }
    let elapsed = t.elapsed().as_secs_f64();
    report(
        "1",
        worst < 1e-9 && worst_std < 1e-9 && elapsed < 1.0,
        format!("|F - 5/6| = {worst:.3e}, std = {worst_std:.3e}, {elapsed:.3} s"),
    );
}

#[test]
fn criterion_2_two_to_four_exact_state() {
    let t = Instant::now();
    let s = spec(2, 4);
    let c = synthesize(&s, &SynthOptions::default()).unwrap();
    let sim = ClonerSimulation::new(&s, &c.circuit).unwrap();
    let out = sim.output(&StateVector::basis(1, 0).unwrap()).unwrap();
    let phase = {
        let big = out
            .amps()
            .iter()
            .copied()
            .max_by(|a, b| a.norm().total_cmp(&b.norm()))
            .unwrap();
        big.conj() / big.norm()
    };
    let mut got: Vec<f64> = out
        .amps()
        .iter()
        .filter(|a| a.norm() > 1e-12)
        .map(|a| {
            let z: Complex64 = a * phase;
            assert!(z.im.abs() < 1e-12);
            z.re
        })
        .collect();
    got.sort_by(f64::total_cmp);
    let mut want: Vec<f64> = std::iter::repeat_n((1.0f64 / 60.0).sqrt(), 6)
        .chain(std::iter::repeat_n((3.0f64 / 80.0).sqrt(), 8))
        .chain([(3.0f64 / 5.0).sqrt()])
        .collect();
    want.sort_by(f64::total_cmp);
    let err = if got.len() == want.len() {
        got.iter()
            .zip(&want)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    } else {
        f64::INFINITY
    };
    let elapsed = t.elapsed().as_secs_f64();
    report(
        "2",
        got.len() == 15 && err < 1e-9 && elapsed < 5.0,
        format!("{} bases, inf-norm error {err:.3e}, {elapsed:.3} s", got.len()),
    );
}

#[test]
fn criterion_3_clone_symmetry_and_ancilla_cleanup() {
    let mut symmetry: f64 = 0.0;
    let mut purity: f64 = 0.0;
    let cloners = small_cloners();
    for (s, _, c) in &cloners {
        let r = verify(s, &c.circuit, 20, 3).unwrap();
        symmetry = symmetry.max(r.clone_symmetry_error);
        purity = purity.max(r.ancilla_purity_error);
    }
    report(
        "3",
        symmetry < 1e-10 && purity < 1e-12,
        format!(
            "{} circuits, clone asymmetry {symmetry:.3e}, ancilla error {purity:.3e}",
            cloners.len()
        ),
    );
}

#[test]
fn criterion_4_feasibility_condition() {
    let mut ok = (2..=12).all(|m| feasibility(&spec(1, m)).feasible_without_aux);
    let f24 = feasibility(&spec(2, 4));
    let f36 = feasibility(&spec(3, 6));
    ok &= f24.feasible_without_aux && f24.lhs == 15u32.into() && f24.rhs == 16u32.into();
    ok &= !f36.feasible_without_aux && f36.lhs == 84u32.into() && f36.rhs == 64u32.into();
    ok &= basis_count(&spec(2, 4)) == 15u32.into();
    report(
        "4",
        ok,
        format!(
            "(1,2..12) feasible, (2,4) {} <= {}, (3,6) {} > {}",
            f24.lhs, f24.rhs, f36.lhs, f36.rhs
        ),
    );
}

#[test]
fn criterion_5_threshold_table() {
    let db = SpeciesDb::embedded();
    let params = TrapParams::default();
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, want) in [("Ca+", 0.72), ("Hg+", 0.084), ("Ba+", 2.58)] {
        let got = feasibility_threshold(db.find(name).unwrap(), &params);
        let rel = (got - want).abs() / want;
        ok &= rel < 0.01;
        parts.push(format!("{name} {got:.6} ({:.2}%)", 100.0 * rel));
    }
    let lhs = lhs_mmax(&spec(1, 2));
    let rel = (lhs - 31.15).abs() / 31.15;
    ok &= rel < 0.002;
    parts.push(format!("LHS(1,2) {lhs:.6} ({:.3}%)", 100.0 * rel));
    report("5", ok, parts.join(", "));
}

fn p_min_six_gates(name: &str, want: f64) {
    let db = SpeciesDb::embedded();
    let got = min_emission_probability(
        &spec(1, 2),
        db.find(name).unwrap(),
        &TrapParams::default(),
        Some(6.0),
    );
    let rel = (got - want).abs() / want;
    report(
        &format!("6 ({name})"),
        rel < 0.02,
        format!("p_min {got:.6} vs {want}, {:.2}% off (tolerance 2%)", 100.0 * rel),
    );
}

#[test]
fn criterion_6_p_min_calcium() {
    p_min_six_gates("Ca+", 0.062);
}

#[test]
fn criterion_6_p_min_barium() {
    p_min_six_gates("Ba+", 0.017);
}

/// Golden-section minimum of a unimodal function of `u` on `[a, b]`.
fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    for _ in 0..300 {
        if f(c) < f(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - r * (b - a);
        d = a + r * (b - a);
    }
    f((a + b) / 2.0)
}

#[test]
fn criterion_6_analytic_minimum_matches_numeric() {
    let db = SpeciesDb::embedded();
    let params = TrapParams {
        gamma1: Some(1.3e8),
        ..TrapParams::default()
    };
    let mut worst: f64 = 0.0;
    for sp in &db.species {
        for m in 2..=6 {
            for n in 1..m {
                let s = spec(n, m);
                let p = |u: f64| {
                    emission_probability(&s, sp, &params, u.exp(), None)
                        .unwrap()
                        .p_total
                };
                let numeric = golden_min(p, -60.0, 80.0);
                let analytic = min_emission_probability(&s, sp, &params, None);
                worst = worst.max((numeric - analytic).abs() / analytic);
            }
        }
    }
    report(
        "6 (numeric)",
        worst < 1e-9,
        format!("max relative gap {worst:.3e} over 3 species x 15 specs"),
    );
}

#[test]
fn criterion_7_universality() {
    let cloners = small_cloners();
    let mut dev: f64 = 0.0;
    let mut var: f64 = 0.0;
    for (s, _, c) in &cloners {
        let r = verify(s, &c.circuit, 50, 7).unwrap();
        dev = dev.max((r.clone_fidelity_mean - theoretical_fidelity(s)).abs());
        var = var.max(r.clone_fidelity_std.powi(2));
    }

    // Reduced state of clone 0 in the ideal (2,4) output, traced by hand.
    let s = spec(2, 4);
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    let mut oracle_dev: f64 = 0.0;
    for _ in 0..10 {
        let (th, ph) = (rng.random::<f64>() * PI, rng.random::<f64>() * 2.0 * PI);
        let (a, b) = (
            Complex64::new((th / 2.0).cos(), 0.0),
            Complex64::from_polar((th / 2.0).sin(), ph),
        );
        let psi = StateVector::qubit(a, b).unwrap();
        let out = ideal_output(&s, &psi, MachineConvention::Literal).unwrap();
        let half = out.dim() / 2;
        let mut rho = [[Complex64::new(0.0, 0.0); 2]; 2];
        for (i, row) in rho.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                for r in 0..half {
                    *e += out.amp(i * half + r) * out.amp(j * half + r).conj();
                }
            }
        }
        let f = (a.conj() * rho[0][0] * a
            + a.conj() * rho[0][1] * b
            + b.conj() * rho[1][0] * a
            + b.conj() * rho[1][1] * b)
            .re;
        oracle_dev = oracle_dev.max((f - 7.0 / 8.0).abs());
    }
    let theory_dev = (theoretical_fidelity(&s) - 7.0 / 8.0).abs();
    let werner_dev = cloners
        .iter()
        .map(|(s, _, _)| (theoretical_fidelity(s) - werner(s.n_in(), s.m_out())).abs())
        .fold(0.0, f64::max);
    report(
        "7",
        dev < 1e-9 && var < 1e-18 && oracle_dev < 1e-12 && theory_dev < 1e-15 && werner_dev < 1e-12,
        format!(
            "{} circuits, |F - F_th| {dev:.3e}, var {var:.3e}; (2,4) oracle {oracle_dev:.3e}",
            cloners.len()
        ),
    );
}

fn random_target(rng: &mut ChaCha8Rng, n: usize) -> PrepTarget {
    let coeffs = (0..1 << n).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
    PrepTarget::normalized(coeffs).unwrap()
}

#[test]
fn criterion_8_prep_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst: f64 = 0.0;
    for i in 0..200 {
        let n = 2 + i % 5;
        let target = random_target(&mut rng, n);
        let c = synthesize_prep(&target).unwrap();
        let out = c.apply(&StateVector::zero(n).unwrap()).unwrap();
        for (a, want) in out.amps().iter().zip(target.coeffs()) {
            worst = worst.max((a - want).norm());
        }
    }
    report(
        "8 (round trip)",
        worst < 1e-10,
        format!("200 targets on 2-6 qubits, max coefficient error {worst:.3e}"),
    );
}

/// Least-squares slope of `ys` against `xs`.
fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

#[test]
fn criterion_8_prep_scaling_exponent() {
    let mut rng = ChaCha8Rng::seed_from_u64(88);
    let mut counts = Vec::new();
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for n in 2..=8 {
        let c = synthesize_prep(&random_target(&mut rng, n)).unwrap();
        let cost = c.cnot_cost(false);
        let d = (1u64 << n) as f64;
        counts.push(cost);
        xs.push(d.ln());
        ys.push((cost as f64 / d.ln().powi(2)).ln());
    }
    let p = slope(&xs, &ys);
    report(
        "8 (scaling)",
        (0.9..=1.1).contains(&p),
        format!("fitted exponent {p:.4} in d^p (log d)^2 over n = 2..8, counts {counts:?}"),
    );
}

#[test]
fn criterion_9_permutation_scheduler() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut replayed = 0;
    for _ in 0..500 {
        let mut bases: Vec<u64> = (0..16).collect();
        let free = rng.random_range(1..=8);
        let used = 16 - free;
        for i in (1..16).rev() {
            bases.swap(i, rng.random_range(0..=i));
        }
        let k = rng.random_range(1..=used);
        let sources: Vec<u64> = bases[..k].to_vec();
        let mut pool: Vec<u64> = bases[..used].to_vec();
        for i in (1..pool.len()).rev() {
            pool.swap(i, rng.random_range(0..=i));
        }
        let dests = &pool[..k];
        let perm = PermutationSpec::new(4, sources.iter().copied().zip(dests.iter().copied()))
            .unwrap();
        let plan = schedule(&perm).unwrap();
        validate_plan(&perm, &plan).unwrap();
        replayed += 1;
    }
    let three_qubit_example = PermutationSpec::new(
        3,
        [
            (0b000, 0b000),
            (0b001, 0b101),
            (0b011, 0b011),
            (0b100, 0b111),
            (0b101, 0b010),
            (0b111, 0b100),
        ],
    )
    .unwrap();
    let reference = PermutationPlan {
        moves: [
            (0b101, 0b010),
            (0b001, 0b101),
            (0b111, 0b001),
            (0b100, 0b111),
            (0b001, 0b100),
        ]
        .into_iter()
        .map(|(s, d)| Move::new(s, d))
        .collect(),
        buffers: vec![0b001],
    };
    let verbatim = validate_plan(&three_qubit_example, &reference).is_ok();
    report(
        "9",
        replayed == 500 && verbatim,
        format!("{replayed}/500 random plans replay, reference order valid: {verbatim}"),
    );
}
