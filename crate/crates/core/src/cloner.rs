//! Closed-form mathematics of the N -> M universal cloner: output
//! coefficients, the ideal output state, theoretical fidelity, the
//! basis-count feasibility condition and the asymptotic gate-count bound.

use std::f64::consts::PI;

use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::statevec::{StateVector, MAX_QUBITS};

/// Largest N or M accepted. Binomials stay exact well beyond this.
pub const MAX_COPIES: u32 = 64;

/// An `N -> M` cloning task.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CloneSpec {
    n_in: u32,
    m_out: u32,
}

impl CloneSpec {
    pub fn new(n_in: u32, m_out: u32) -> Result<Self> {
        if n_in < 1 {
            return Err(Error::InvalidSpec("N must be at least 1".into()));
        }
        if m_out <= n_in {
            return Err(Error::InvalidSpec(format!(
                "M must exceed N (got N={n_in}, M={m_out})"
            )));
        }
        if m_out > MAX_COPIES {
            return Err(Error::InvalidSpec(format!("M={m_out} exceeds {MAX_COPIES}")));
        }
        Ok(Self { n_in, m_out })
    }

    pub fn n_in(&self) -> u32 {
        self.n_in
    }

    pub fn m_out(&self) -> u32 {
        self.m_out
    }

    /// `M - N`: number of blank qubits, and of machine qubits.
    pub fn excess(&self) -> u32 {
        self.m_out - self.n_in
    }

    /// `2M - N` data qubits: N inputs, M - N blanks, M - N machine qubits.
    pub fn total_qubits(&self) -> u32 {
        2 * self.m_out - self.n_in
    }

    /// Qubits available to the preparation stage, `2(M - N)`.
    pub fn prep_qubits(&self) -> u32 {
        2 * self.excess()
    }

    /// `2^(2(M-N))`, the dimension of the preparation register.
    pub fn d_prep(&self) -> BigUint {
        BigUint::one() << self.prep_qubits()
    }

    fn n(&self) -> usize {
        self.n_in as usize
    }

    fn m(&self) -> usize {
        self.m_out as usize
    }

    fn simulable(&self) -> Result<()> {
        if self.total_qubits() as usize > MAX_QUBITS {
            return Err(Error::DimensionMismatch(format!(
                "{} qubits exceeds the dense simulation cap",
                self.total_qubits()
            )));
        }
        Ok(())
    }
}

impl std::fmt::Display for CloneSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}->{}", self.n_in, self.m_out)
    }
}

/// How the machine register encodes `R_j`.
///
/// `Literal` writes `R_j(psi)` exactly as the Gisin-Massar formula does, so
/// `psi = |0>` leaves the machine in `|0...0>` on the `j = 0` branch.
/// `Complemented` stores every machine bit flipped, which puts `|1...1>` on
/// the `j = 0` branch. The two differ by X gates on the machine qubits only
/// and produce identical clones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MachineConvention {
    #[default]
    Literal,
    Complemented,
}

/// The coefficients `alpha_j`, `j = 0..=M-N`.
#[derive(Debug, Clone, PartialEq)]
pub struct CloneCoefficients {
    alphas: Vec<f64>,
}

impl CloneCoefficients {
    pub fn as_slice(&self) -> &[f64] {
        &self.alphas
    }

    pub fn len(&self) -> usize {
        self.alphas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alphas.is_empty()
    }

    pub fn get(&self, j: usize) -> f64 {
        self.alphas[j]
    }
}

pub fn alphas(spec: &CloneSpec) -> CloneCoefficients {
    let (n, m) = (spec.n_in as f64, spec.m_out as f64);
    let excess = spec.excess() as usize;
    let base = (n + 1.0) / (m + 1.0);
    let mut alphas = Vec::with_capacity(excess + 1);
    // (M-N)!/(M-N-j)! / (M!/(M-j)!) as a running product
    let mut ratio = 1.0;
    for j in 0..=excess {
        if j > 0 {
            let i = (j - 1) as f64;
            ratio *= (m - n - i) / (m - i);
        }
        alphas.push((base * ratio).sqrt());
    }
    CloneCoefficients { alphas }
}

/// Enumerates the computational strings behind the level-`j` symmetric
/// states: the clone register `|(M-j)psi, j psi_perp>` and the machine
/// register `R_j`, written for `psi = |0>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SymmetricBasisIndex {
    spec: CloneSpec,
    j: u32,
}

impl SymmetricBasisIndex {
    pub fn new(spec: CloneSpec, j: u32) -> Result<Self> {
        if j > spec.excess() {
            return Err(Error::InvalidSpec(format!(
                "level {j} outside 0..={}",
                spec.excess()
            )));
        }
        Ok(Self { spec, j })
    }

    pub fn level(&self) -> u32 {
        self.j
    }

    /// Weight-`j` strings over the M clone qubits, ascending.
    pub fn clone_bases(&self) -> Vec<u64> {
        weight_strings(self.spec.m_out, self.j)
    }

    /// Weight-`j` strings over the M - N machine qubits, ascending.
    pub fn machine_bases(&self) -> Vec<u64> {
        weight_strings(self.spec.excess(), self.j)
    }

    pub fn clone_count(&self) -> BigUint {
        binomial(self.spec.m_out as u64, self.j as u64)
    }

    pub fn machine_count(&self) -> BigUint {
        binomial(self.spec.excess() as u64, self.j as u64)
    }
}

fn weight_strings(bits: u32, weight: u32) -> Vec<u64> {
    (0u64..1 << bits)
        .filter(|x| x.count_ones() == weight)
        .collect()
}

/// Ideal cloner output for input `psi^{⊗N}`: M clone qubits followed by
/// M - N machine qubits.
///
/// Phases: `psi_perp = b*|0> - a*|1>`, `psi* = a*|0> + b*|1>`.
pub fn ideal_output(
    spec: &CloneSpec,
    psi: &StateVector,
    convention: MachineConvention,
) -> Result<StateVector> {
    if psi.n_qubits() != 1 {
        return Err(Error::DimensionMismatch(format!(
            "input must be a single qubit, got {}",
            psi.n_qubits()
        )));
    }
    spec.simulable()?;
    let (a, b) = (psi.amp(0), psi.amp(1));
    let perp = [b.conj(), -a.conj()];
    let conj = [a.conj(), b.conj()];
    let conj_perp = [conj[1].conj(), -conj[0].conj()];

    let m = spec.m();
    let r = m - spec.n();
    let clone_poly = symmetric_amplitudes(m, [a, b], perp, r);
    let machine_poly = symmetric_amplitudes(r, conj, conj_perp, r);
    let coeffs = alphas(spec);

    let machine_mask = (1usize << r) - 1;
    let total = spec.total_qubits() as usize;
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << total];
    for (j, alpha) in coeffs.as_slice().iter().enumerate() {
        let norm = (binomial_f64(m, j) * binomial_f64(r, j)).sqrt();
        let scale = alpha / norm;
        for x in 0..1usize << m {
            let cx = clone_poly[x * (r + 1) + j];
            if cx == Complex64::new(0.0, 0.0) {
                continue;
            }
            for y in 0..1usize << r {
                let stored = match convention {
                    MachineConvention::Literal => y,
                    MachineConvention::Complemented => !y & machine_mask,
                };
                let my = machine_poly[y * (r + 1) + j];
                amps[(x << r) | stored] += cx * my * scale;
            }
        }
    }
    StateVector::new(total, amps)
}

/// For every basis string `x` of `bits` qubits, the coefficients of `t^j`
/// (`j <= max_level`) in `prod_i (u[x_i] + t v[x_i])`. This is the
/// unnormalized sum over all placements of `j` copies of `v` among `u`.
/// Stored as `out[x * (max_level + 1) + j]`.
fn symmetric_amplitudes(
    bits: usize,
    u: [Complex64; 2],
    v: [Complex64; 2],
    max_level: usize,
) -> Vec<Complex64> {
    let width = max_level + 1;
    let zero = Complex64::new(0.0, 0.0);
    let mut out = vec![zero; (1usize << bits) * width];
    let mut poly = vec![zero; width];
    for x in 0..1usize << bits {
        poly.iter_mut().for_each(|p| *p = zero);
        poly[0] = Complex64::new(1.0, 0.0);
        for q in 0..bits {
            let bit = (x >> (bits - 1 - q)) & 1;
            for j in (0..width).rev() {
                let lower = if j > 0 { poly[j - 1] } else { zero };
                poly[j] = poly[j] * u[bit] + lower * v[bit];
            }
        }
        out[x * width..(x + 1) * width].copy_from_slice(&poly);
    }
    out
}

/// Images of the symmetric input levels under the ideal cloner.
///
/// Writing `psi^{⊗N} = sum_k a^{N-k} b^k sum_{|s|=k} |s>`, the ideal output
/// is linear: `ideal(psi) = sum_k a^{N-k} b^k V_k`. `V_k` is the image of
/// the unnormalized level-`k` input (sum of all weight-`k` patterns) and
/// has squared norm `C(N, k)`. Every entry is real and nonnegative.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelImage {
    pub level: u32,
    pub amps: Vec<f64>,
}

impl LevelImage {
    pub fn support(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.amps
            .iter()
            .enumerate()
            .filter(|(_, a)| **a != 0.0)
            .map(|(i, a)| (i, *a))
    }

    pub fn support_len(&self) -> usize {
        self.amps.iter().filter(|a| **a != 0.0).count()
    }
}

/// Extracts every `V_k` from `N + 1` evaluations of [`ideal_output`] on the
/// equator states `(|0> + e^{i theta}|1>)/sqrt 2` followed by a discrete
/// Fourier inversion over theta.
pub fn level_images(spec: &CloneSpec, convention: MachineConvention) -> Result<Vec<LevelImage>> {
    spec.simulable()?;
    let n = spec.n();
    let samples = n + 1;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let outputs: Vec<StateVector> = (0..samples)
        .map(|s| {
            let theta = 2.0 * PI * s as f64 / samples as f64;
            let psi = StateVector::qubit(
                Complex64::new(h, 0.0),
                Complex64::from_polar(h, theta),
            )?;
            ideal_output(spec, &psi, convention)
        })
        .collect::<Result<_>>()?;
    let dim = outputs[0].dim();
    let scale = 2f64.powf(n as f64 / 2.0) / samples as f64;
    let mut levels = Vec::with_capacity(samples);
    for k in 0..samples {
        let mut amps = vec![0.0; dim];
        for (i, amp) in amps.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (s, out) in outputs.iter().enumerate() {
                let theta = 2.0 * PI * (k * s) as f64 / samples as f64;
                acc += Complex64::from_polar(1.0, -theta) * out.amp(i);
            }
            acc *= scale;
            if acc.im.abs() > 1e-10 || acc.re < -1e-10 {
                return Err(Error::Inconsistent(format!(
                    "level {k} image has non-real or negative entry {acc} at basis {i}"
                )));
            }
            *amp = if acc.re.abs() < 1e-12 { 0.0 } else { acc.re };
        }
        levels.push(LevelImage {
            level: k as u32,
            amps,
        });
    }
    Ok(levels)
}

/// `F = sum_j alpha_j^2 (M - j)/M`: each level-`j` symmetric state has
/// single-qubit overlap `(M - j)/M` with `psi`.
pub fn theoretical_fidelity(spec: &CloneSpec) -> f64 {
    let m = spec.m_out as f64;
    alphas(spec)
        .as_slice()
        .iter()
        .enumerate()
        .map(|(j, a)| a * a * (m - j as f64) / m)
        .sum()
}

/// Number of computational bases carrying amplitude in the ideal output for
/// `psi = |0>`: `sum_k C(M, k) C(M-N, k)`.
pub fn basis_count(spec: &CloneSpec) -> BigUint {
    let (m, r) = (spec.m_out as u64, spec.excess() as u64);
    (0..=r)
        .map(|k| binomial(m, k) * binomial(r, k))
        .fold(BigUint::zero(), |acc, x| acc + x)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Feasibility {
    pub feasible_without_aux: bool,
    #[serde(serialize_with = "serialize_big")]
    pub lhs: BigUint,
    #[serde(serialize_with = "serialize_big")]
    pub rhs: BigUint,
}

fn serialize_big<S: serde::Serializer>(x: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

/// Whether the preparation register can hold every amplitude of the ideal
/// output: `basis_count <= 2^(2(M-N))`.
pub fn feasibility(spec: &CloneSpec) -> Feasibility {
    let lhs = basis_count(spec);
    let rhs = spec.d_prep();
    Feasibility {
        feasible_without_aux: lhs <= rhs,
        lhs,
        rhs,
    }
}

/// Asymptotic CNOT bound with unit constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GateCountBound {
    pub prep: f64,
    pub clone: f64,
    pub total: f64,
}

/// `prep = d_prep (log2 d_prep)^2` and
/// `clone = 2^(2M)/sqrt(pi M) * (2M - N)^(2 - aux)`.
///
/// Constants are one; callers rescale (the ion budget multiplies by its
/// proportionality factor). With `aux_qubits = 1` the multi-control cost
/// drops from quadratic to linear in the register size.
pub fn gate_count_bound(spec: &CloneSpec, aux_qubits: u32) -> Result<GateCountBound> {
    if aux_qubits > 1 {
        return Err(Error::InvalidParameter(format!(
            "aux_qubits must be 0 or 1, got {aux_qubits}"
        )));
    }
    let log_d = spec.prep_qubits() as f64;
    let prep = 2f64.powf(log_d) * log_d * log_d;
    let m = spec.m_out as f64;
    let width = spec.total_qubits() as f64;
    let clone = 2f64.powf(2.0 * m) / (PI * m).sqrt() * width.powi(2 - aux_qubits as i32);
    Ok(GateCountBound {
        prep,
        clone,
        total: prep + clone,
    })
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

pub(crate) fn binomial_f64(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}
