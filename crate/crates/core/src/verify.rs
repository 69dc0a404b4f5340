//! Verification of cloner circuits against the ideal transformation by
//! exact state-vector simulation.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, QubitRole};
use crate::cloner::{ideal_output, theoretical_fidelity, CloneSpec, MachineConvention};
use crate::error::{Error, Result};
use crate::statevec::{fidelity_against_pure, DensityMatrix, PartialTrace, StateVector};
use crate::synth::{cloner_roles, gate_counts, GateCounts};

pub const REPORT_SCHEMA: &str = "uqcm.verify/v1";
pub const PASS_TOLERANCE: f64 = 1e-9;

/// Haar-random pure qubit. Sample `stream` of `seed` is independent of how
/// many other samples are drawn.
pub fn haar_random_qubit(seed: u64, stream: u64) -> StateVector {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let g: [f64; 4] = std::array::from_fn(|_| StandardNormal.sample(&mut rng));
    let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
    StateVector::normalized(
        1,
        vec![
            Complex64::new(g[0] / norm, g[1] / norm),
            Complex64::new(g[2] / norm, g[3] / norm),
        ],
    )
    .expect("nonzero Gaussian vector")
}

/// Outputs of a cloner circuit for every computational input pattern, from
/// which the output for any product input follows by linearity.
#[derive(Debug, Clone)]
pub struct ClonerSimulation {
    spec: CloneSpec,
    n_qubits: usize,
    /// Qubits past the `2M - N` data qubits (aux and flag).
    extra_qubits: usize,
    pattern_outputs: Vec<Vec<Complex64>>,
}

impl ClonerSimulation {
    pub fn new(spec: &CloneSpec, circuit: &Circuit) -> Result<Self> {
        check_roles(spec, circuit)?;
        let n = spec.n_in() as usize;
        let n_qubits = circuit.n_qubits();
        let shift = n_qubits - n;
        let pattern_outputs = (0usize..1 << n)
            .map(|s| {
                let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
                amps[s << shift] = Complex64::new(1.0, 0.0);
                circuit.apply_in_place(&mut amps);
                amps
            })
            .collect();
        Ok(Self {
            spec: *spec,
            n_qubits,
            extra_qubits: n_qubits - spec.total_qubits() as usize,
            pattern_outputs,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Circuit output for input `psi^{⊗N}` with every other qubit in `|0>`.
    pub fn output(&self, psi: &StateVector) -> Result<StateVector> {
        if psi.n_qubits() != 1 {
            return Err(Error::DimensionMismatch("input must be one qubit".into()));
        }
        let (a, b) = (psi.amp(0), psi.amp(1));
        let n = self.spec.n_in() as i32;
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << self.n_qubits];
        for (s, out) in self.pattern_outputs.iter().enumerate() {
            let k = s.count_ones() as i32;
            let w = a.powi(n - k) * b.powi(k);
            if w == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (acc, x) in amps.iter_mut().zip(out) {
                *acc += w * x;
            }
        }
        StateVector::with_tolerance(self.n_qubits, amps, 1e-9)
    }

    /// The ideal output padded with `|0>` on the aux and flag qubits.
    pub fn ideal(&self, psi: &StateVector, convention: MachineConvention) -> Result<StateVector> {
        let ideal = ideal_output(&self.spec, psi, convention)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << self.n_qubits];
        for (o, a) in ideal.amps().iter().enumerate() {
            amps[o << self.extra_qubits] = *a;
        }
        StateVector::new(self.n_qubits, amps)
    }

    /// Reduced states of the M clone qubits.
    pub fn clone_states(&self, output: &StateVector) -> Result<Vec<DensityMatrix>> {
        (0..self.spec.m_out() as usize)
            .map(|q| output.partial_trace(&[q]))
            .collect()
    }

    /// Probability that every aux and flag qubit reads 0.
    pub fn ancilla_zero_probability(&self, output: &StateVector) -> f64 {
        let data = self.spec.total_qubits() as usize;
        (0..1usize << data)
            .map(|o| output.amp(o << self.extra_qubits).norm_sqr())
            .sum()
    }
}

fn check_roles(spec: &CloneSpec, circuit: &Circuit) -> Result<()> {
    let roles = circuit.roles();
    let aux = roles.iter().filter(|r| **r == QubitRole::Aux).count() as u32;
    let flag = roles.last() == Some(&QubitRole::AncillaFlag);
    let expected = cloner_roles(spec, aux, flag);
    if roles != expected.as_slice() {
        return Err(Error::RoleMismatch(format!(
            "expected {expected:?} for {spec}, found {roles:?}"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema: String,
    pub spec: CloneSpec,
    pub samples: usize,
    pub seed: u64,
    /// Largest amplitude error, after phase alignment, for inputs `|0>` and
    /// `|1>`, under the better-matching machine-register convention.
    pub max_state_error: f64,
    pub machine_convention: MachineConvention,
    pub clone_fidelity_mean: f64,
    pub clone_fidelity_std: f64,
    pub theoretical_fidelity: f64,
    /// Largest entry-wise difference between any two clone reduced states.
    pub clone_symmetry_error: f64,
    /// Largest probability of finding an aux or flag qubit outside `|0>`.
    pub ancilla_purity_error: f64,
    pub gate_counts: GateCounts,
    pub pass: bool,
}

impl VerificationReport {
    pub fn to_table(&self) -> String {
        let rows: [(&str, String); 9] = [
            ("spec", format!("{}", self.spec)),
            ("samples / seed", format!("{} / {}", self.samples, self.seed)),
            ("max state error", format!("{:.6e}", self.max_state_error)),
            ("clone fidelity mean", format!("{:.12}", self.clone_fidelity_mean)),
            ("theoretical fidelity", format!("{:.12}", self.theoretical_fidelity)),
            ("clone fidelity std", format!("{:.6e}", self.clone_fidelity_std)),
            ("clone symmetry error", format!("{:.6e}", self.clone_symmetry_error)),
            ("ancilla purity error", format!("{:.6e}", self.ancilla_purity_error)),
            (
                "gates prep / clone / total",
                format!(
                    "{} / {} / {} (bound {:.6e})",
                    self.gate_counts.prep,
                    self.gate_counts.clone,
                    self.gate_counts.total,
                    self.gate_counts.bound
                ),
            ),
        ];
        let mut out = String::new();
        for (k, v) in rows {
            out.push_str(&format!("{k:<28}{v}\n"));
        }
        out.push_str(&format!(
            "{:<28}{}\n",
            "result",
            if self.pass { "PASS" } else { "FAIL" }
        ));
        out
    }
}

/// Runs every check with multi-control cost charged as if an auxiliary
/// qubit were available exactly when the circuit carries aux qubits.
pub fn verify(
    spec: &CloneSpec,
    circuit: &Circuit,
    n_samples: usize,
    seed: u64,
) -> Result<VerificationReport> {
    let aux = !circuit.qubits_with_role(QubitRole::Aux).is_empty();
    verify_with_cost(spec, circuit, n_samples, seed, aux)
}

pub fn verify_with_cost(
    spec: &CloneSpec,
    circuit: &Circuit,
    n_samples: usize,
    seed: u64,
    aux_cost: bool,
) -> Result<VerificationReport> {
    let sim = ClonerSimulation::new(spec, circuit)?;
    let basis_inputs = [StateVector::basis(1, 0)?, StateVector::basis(1, 1)?];
    let outputs = basis_inputs
        .iter()
        .map(|psi| sim.output(psi))
        .collect::<Result<Vec<_>>>()?;
    let mut best = (f64::INFINITY, MachineConvention::Literal);
    for convention in [MachineConvention::Literal, MachineConvention::Complemented] {
        let mut err: f64 = 0.0;
        for (psi, out) in basis_inputs.iter().zip(&outputs) {
            err = err.max(out.distance_up_to_phase(&sim.ideal(psi, convention)?)?);
        }
        if err < best.0 {
            best = (err, convention);
        }
    }

    let mut fidelities = Vec::with_capacity(n_samples * spec.m_out() as usize);
    let mut symmetry: f64 = 0.0;
    let mut purity: f64 = 0.0;
    for i in 0..n_samples {
        let psi = haar_random_qubit(seed, i as u64);
        let out = sim.output(&psi)?;
        purity = purity.max((1.0 - sim.ancilla_zero_probability(&out)).abs());
        let clones = sim.clone_states(&out)?;
        for (q, rho) in clones.iter().enumerate() {
            fidelities.push(fidelity_against_pure(rho, &psi)?);
            for other in &clones[..q] {
                symmetry = symmetry.max(rho.max_abs_diff(other)?);
            }
        }
    }
    let (mean, std) = mean_std(&fidelities);
    let max_state_error = best.0;
    let pass = max_state_error < PASS_TOLERANCE
        && std < PASS_TOLERANCE
        && symmetry < PASS_TOLERANCE
        && purity < PASS_TOLERANCE;
    Ok(VerificationReport {
        schema: REPORT_SCHEMA.to_string(),
        spec: *spec,
        samples: n_samples,
        seed,
        max_state_error,
        machine_convention: best.1,
        clone_fidelity_mean: mean,
        clone_fidelity_std: std,
        theoretical_fidelity: theoretical_fidelity(spec),
        clone_symmetry_error: symmetry,
        ancilla_purity_error: purity,
        gate_counts: gate_counts(spec, circuit, aux_cost)?,
        pass,
    })
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}
