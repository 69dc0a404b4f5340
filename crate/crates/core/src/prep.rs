//! Preparation stage: real-amplitude state preparation by a binary tree of
//! uniformly controlled `U_theta` rotations, and the per-spec targets.

use serde::{Deserialize, Serialize};

use crate::circuit::{pattern_controls, Circuit, Gate, GateKind};
use crate::error::{Error, Result};

/// Real coefficients `c_k` over `n_qubits` qubits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct PrepTarget {
    n_qubits: usize,
    coeffs: Vec<f64>,
}

impl PrepTarget {
    pub const NORM_TOLERANCE: f64 = 1e-12;

    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        let len = coeffs.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::BadLength {
                expected: len.next_power_of_two().max(2),
                got: len,
            });
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter("non-finite coefficient".into()));
        }
        let norm: f64 = coeffs.iter().map(|c| c * c).sum();
        if norm == 0.0 {
            return Err(Error::ZeroTarget);
        }
        if (norm - 1.0).abs() > Self::NORM_TOLERANCE {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self {
            n_qubits: len.trailing_zeros() as usize,
            coeffs,
        })
    }

    /// Rescales to unit norm first.
    pub fn normalized(mut coeffs: Vec<f64>) -> Result<Self> {
        let norm = coeffs.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::ZeroTarget);
        }
        coeffs.iter_mut().for_each(|c| *c /= norm);
        Self::new(coeffs)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }
}

impl TryFrom<Vec<f64>> for PrepTarget {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<PrepTarget> for Vec<f64> {
    fn from(t: PrepTarget) -> Self {
        t.coeffs
    }
}

/// `levels[l - 1][b]` is the angle at tree level `l` for prefix `b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngleTree {
    levels: Vec<Vec<f64>>,
}

impl AngleTree {
    pub fn new(levels: Vec<Vec<f64>>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::EmptyRegister);
        }
        for (l, row) in levels.iter().enumerate() {
            if row.len() != 1 << l {
                return Err(Error::BadLength {
                    expected: 1 << l,
                    got: row.len(),
                });
            }
        }
        Ok(Self { levels })
    }

    pub fn n_qubits(&self) -> usize {
        self.levels.len()
    }

    pub fn levels(&self) -> &[Vec<f64>] {
        &self.levels
    }

    pub fn angle(&self, level: usize, branch: usize) -> f64 {
        self.levels[level - 1][branch]
    }

    /// Coefficients produced by the tree on `|0...0>`.
    pub fn amplitudes(&self) -> Vec<f64> {
        let mut amps = vec![1.0];
        for row in &self.levels {
            amps = amps
                .iter()
                .zip(row)
                .flat_map(|(a, t)| [a * t.cos(), a * t.sin()])
                .collect();
        }
        amps
    }
}

/// Probability-tree angles. Internal levels split the weight of prefix `b`
/// as `tan t = sqrt(W_right / W_left)`; the leaf level uses the signed pair
/// `(c_left, c_right)` directly so that negative coefficients need no
/// separate sign gates. Empty branches get `t = 0`.
pub fn solve_angles(target: &PrepTarget) -> AngleTree {
    let n = target.n_qubits;
    let c = &target.coeffs;
    // weights[l][b]: squared norm below prefix b of length l
    let mut weights: Vec<Vec<f64>> = vec![c.iter().map(|x| x * x).collect()];
    for _ in 0..n {
        let prev = weights.last().expect("nonempty");
        let next = prev.chunks(2).map(|p| p[0] + p[1]).collect();
        weights.push(next);
    }
    weights.reverse();
    let mut levels = Vec::with_capacity(n);
    for l in 1..=n {
        let row = (0..1usize << (l - 1))
            .map(|b| {
                let (left, right) = if l == n {
                    (c[2 * b], c[2 * b + 1])
                } else {
                    (weights[l][2 * b].sqrt(), weights[l][2 * b + 1].sqrt())
                };
                if left == 0.0 && right == 0.0 {
                    0.0
                } else {
                    right.atan2(left)
                }
            })
            .collect();
        levels.push(row);
    }
    AngleTree { levels }
}

/// One `U_theta` per tree node: level `l` targets qubit `l - 1`, controlled
/// on qubits `0..l-1` with the polarity pattern of the branch prefix.
pub fn emit_prep_circuit(angles: &AngleTree) -> Result<Circuit> {
    let n = angles.n_qubits();
    let mut circuit = Circuit::with_data_qubits(n)?;
    for l in 1..=n {
        let prefix: Vec<usize> = (0..l - 1).collect();
        for (b, &theta) in angles.levels[l - 1].iter().enumerate() {
            let controls = pattern_controls(&prefix, b as u64);
            circuit.push(Gate::new(GateKind::UTheta(theta), l - 1, controls)?)?;
        }
    }
    Ok(circuit)
}

pub fn synthesize_prep(target: &PrepTarget) -> Result<Circuit> {
    emit_prep_circuit(&solve_angles(target))
}

/// Where the sorted amplitudes of a cloner piece land in the preparation
/// register.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BasisLayout {
    /// Descending amplitudes into the lexicographically smallest bases.
    #[default]
    Packed,
    /// Descending amplitudes into these bases, in order. Targets with fewer
    /// amplitudes use a prefix of the list.
    Explicit(Vec<u64>),
}

impl BasisLayout {
    /// Bases for `count` amplitudes in a `n_qubits` register.
    pub fn bases(&self, count: usize, n_qubits: usize) -> Result<Vec<u64>> {
        let dim = 1u64 << n_qubits;
        match self {
            BasisLayout::Packed => {
                if count as u64 > dim {
                    return Err(Error::InvalidLayout(format!(
                        "{count} amplitudes do not fit in {n_qubits} qubits"
                    )));
                }
                Ok((0..count as u64).collect())
            }
            BasisLayout::Explicit(bases) => {
                if bases.len() < count {
                    return Err(Error::InvalidLayout(format!(
                        "layout lists {} bases for {count} amplitudes",
                        bases.len()
                    )));
                }
                for (i, &b) in bases.iter().enumerate() {
                    if b >= dim {
                        return Err(Error::InvalidLayout(format!(
                            "basis {b} outside a {n_qubits}-qubit register"
                        )));
                    }
                    if bases[..i].contains(&b) {
                        return Err(Error::InvalidLayout(format!("basis {b} listed twice")));
                    }
                }
                Ok(bases[..count].to_vec())
            }
        }
    }
}

/// Places amplitudes (any order) on the layout, largest first. Ties keep
/// their original order.
pub(crate) fn place_amplitudes(
    amplitudes: &[f64],
    layout: &BasisLayout,
    n_qubits: usize,
) -> Result<(PrepTarget, Vec<u64>)> {
    let mut order: Vec<usize> = (0..amplitudes.len()).collect();
    order.sort_by(|&i, &j| amplitudes[j].total_cmp(&amplitudes[i]));
    let bases = layout.bases(amplitudes.len(), n_qubits)?;
    let mut coeffs = vec![0.0; 1 << n_qubits];
    let mut placed = vec![0u64; amplitudes.len()];
    for (slot, &i) in order.iter().enumerate() {
        coeffs[bases[slot] as usize] = amplitudes[i];
        placed[i] = bases[slot];
    }
    Ok((PrepTarget::normalized(coeffs)?, placed))
}
