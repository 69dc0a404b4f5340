//! Gate-level circuit representation, exact application to state vectors,
//! and CNOT-equivalent cost accounting.

use std::ops::Range;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;

use crate::error::{Error, Result};
use crate::statevec::StateVector;

pub const CIRCUIT_SCHEMA: &str = "uqcm.circuit/v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    /// Fires when the control qubit is 1.
    Positive,
    /// Fires when the control qubit is 0.
    Negative,
}

impl Polarity {
    pub fn from_bit(bit: bool) -> Self {
        if bit {
            Polarity::Positive
        } else {
            Polarity::Negative
        }
    }

    pub fn active_bit(self) -> bool {
        matches!(self, Polarity::Positive)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Control {
    #[serde(rename = "q")]
    pub qubit: usize,
    pub polarity: Polarity,
}

impl Control {
    pub fn pos(qubit: usize) -> Self {
        Self {
            qubit,
            polarity: Polarity::Positive,
        }
    }

    pub fn neg(qubit: usize) -> Self {
        Self {
            qubit,
            polarity: Polarity::Negative,
        }
    }
}

/// Controls matching the bit pattern of `value` on `qubits`, with the first
/// listed qubit reading the most significant bit.
pub fn pattern_controls(qubits: &[usize], value: u64) -> Vec<Control> {
    let len = qubits.len();
    qubits
        .iter()
        .enumerate()
        .map(|(i, &q)| Control {
            qubit: q,
            polarity: Polarity::from_bit((value >> (len - 1 - i)) & 1 == 1),
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateKind {
    /// `R(t)|0> = cos t|0> + sin t|1>`, `R(t)|1> = -sin t|0> + cos t|1>`.
    RotY(f64),
    /// Real involution with rows `(cos t, sin t)` and `(sin t, -cos t)`.
    UTheta(f64),
    X,
    Cnot,
    MultiControlledX,
}

impl GateKind {
    fn tag(&self) -> &'static str {
        match self {
            GateKind::RotY(_) => "roty",
            GateKind::UTheta(_) => "utheta",
            GateKind::X => "x",
            GateKind::Cnot => "cnot",
            GateKind::MultiControlledX => "mcx",
        }
    }

    fn theta(&self) -> Option<f64> {
        match self {
            GateKind::RotY(t) | GateKind::UTheta(t) => Some(*t),
            _ => None,
        }
    }

    /// Row-major real 2x2 matrix acting on the target.
    fn matrix(&self) -> [[f64; 2]; 2] {
        match *self {
            GateKind::RotY(t) => {
                let (s, c) = t.sin_cos();
                [[c, -s], [s, c]]
            }
            GateKind::UTheta(t) => {
                let (s, c) = t.sin_cos();
                [[c, s], [s, -c]]
            }
            GateKind::X | GateKind::Cnot | GateKind::MultiControlledX => [[0.0, 1.0], [1.0, 0.0]],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    kind: GateKind,
    target: usize,
    controls: Vec<Control>,
}

impl Gate {
    pub fn new(kind: GateKind, target: usize, controls: Vec<Control>) -> Result<Self> {
        let arity_ok = match kind {
            GateKind::X => controls.is_empty(),
            GateKind::Cnot => controls.len() == 1,
            GateKind::MultiControlledX => !controls.is_empty(),
            GateKind::RotY(t) | GateKind::UTheta(t) => {
                if !t.is_finite() {
                    return Err(Error::InvalidGate(format!("non-finite angle {t}")));
                }
                true
            }
        };
        if !arity_ok {
            return Err(Error::InvalidGate(format!(
                "{} gate cannot take {} controls",
                kind.tag(),
                controls.len()
            )));
        }
        for (i, c) in controls.iter().enumerate() {
            if c.qubit == target {
                return Err(Error::InvalidGate(format!(
                    "qubit {target} is both target and control"
                )));
            }
            if controls[..i].iter().any(|o| o.qubit == c.qubit) {
                return Err(Error::DuplicateQubit(c.qubit));
            }
        }
        Ok(Self {
            kind,
            target,
            controls,
        })
    }

    pub fn x(target: usize) -> Self {
        Self {
            kind: GateKind::X,
            target,
            controls: Vec::new(),
        }
    }

    pub fn rot_y(target: usize, theta: f64) -> Result<Self> {
        Self::new(GateKind::RotY(theta), target, Vec::new())
    }

    pub fn u_theta(target: usize, theta: f64) -> Result<Self> {
        Self::new(GateKind::UTheta(theta), target, Vec::new())
    }

    pub fn cnot(control: usize, target: usize) -> Result<Self> {
        Self::new(GateKind::Cnot, target, vec![Control::pos(control)])
    }

    pub fn mcx(controls: Vec<Control>, target: usize) -> Result<Self> {
        Self::new(GateKind::MultiControlledX, target, controls)
    }

    pub fn kind(&self) -> GateKind {
        self.kind
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn controls(&self) -> &[Control] {
        &self.controls
    }

    pub fn inverse(&self) -> Gate {
        let kind = match self.kind {
            GateKind::RotY(t) => GateKind::RotY(-t),
            other => other,
        };
        Gate {
            kind,
            target: self.target,
            controls: self.controls.clone(),
        }
    }

    /// Adds controls and relabels qubits through `map`.
    pub fn remapped(&self, map: &[usize], extra_controls: &[Control]) -> Result<Gate> {
        let lookup = |q: usize| {
            map.get(q).copied().ok_or(Error::QubitOutOfRange {
                index: q,
                n_qubits: map.len(),
            })
        };
        let mut controls = Vec::with_capacity(self.controls.len() + extra_controls.len());
        controls.extend_from_slice(extra_controls);
        for c in &self.controls {
            controls.push(Control {
                qubit: lookup(c.qubit)?,
                polarity: c.polarity,
            });
        }
        let kind = match self.kind {
            GateKind::X | GateKind::Cnot if !controls.is_empty() => {
                if controls.len() == 1 {
                    GateKind::Cnot
                } else {
                    GateKind::MultiControlledX
                }
            }
            other => other,
        };
        Gate::new(kind, lookup(self.target)?, controls)
    }

    /// CNOT-equivalents: single-qubit gates are free, a `c`-controlled NOT
    /// costs 1 for `c = 1`, else `c^2` (or `c` with a borrowed auxiliary
    /// qubit). A controlled rotation is two controlled NOTs around
    /// single-qubit rotations.
    pub fn cnot_cost(&self, aux_available: bool) -> u64 {
        let c = self.controls.len() as u64;
        match self.kind {
            GateKind::X | GateKind::Cnot | GateKind::MultiControlledX => {
                mcx_cost(c, aux_available)
            }
            GateKind::RotY(_) | GateKind::UTheta(_) => 2 * mcx_cost(c, aux_available),
        }
    }

    fn max_qubit(&self) -> usize {
        self.controls
            .iter()
            .map(|c| c.qubit)
            .chain(std::iter::once(self.target))
            .max()
            .unwrap_or(0)
    }

    /// Applies the gate in place to a `n_qubits` amplitude array.
    pub(crate) fn apply_to(&self, amps: &mut [Complex64], n_qubits: usize) {
        let shift = |q: usize| n_qubits - 1 - q;
        let tmask = 1usize << shift(self.target);
        let mut cmask = 0usize;
        let mut cval = 0usize;
        for c in &self.controls {
            let bit = 1usize << shift(c.qubit);
            cmask |= bit;
            if c.polarity.active_bit() {
                cval |= bit;
            }
        }
        let is_not = matches!(
            self.kind,
            GateKind::X | GateKind::Cnot | GateKind::MultiControlledX
        );
        let m = self.kind.matrix();
        for i in 0..amps.len() {
            if i & tmask != 0 || i & cmask != cval {
                continue;
            }
            let j = i | tmask;
            if is_not {
                amps.swap(i, j);
            } else {
                let (a0, a1) = (amps[i], amps[j]);
                amps[i] = a0 * m[0][0] + a1 * m[0][1];
                amps[j] = a0 * m[1][0] + a1 * m[1][1];
            }
        }
    }

    /// Classical action on a basis index; `None` for non-permutation gates.
    pub(crate) fn apply_to_basis(&self, index: usize, n_qubits: usize) -> Option<usize> {
        if !matches!(
            self.kind,
            GateKind::X | GateKind::Cnot | GateKind::MultiControlledX
        ) {
            return None;
        }
        let fires = self.controls.iter().all(|c| {
            let bit = (index >> (n_qubits - 1 - c.qubit)) & 1 == 1;
            bit == c.polarity.active_bit()
        });
        Some(if fires {
            index ^ (1usize << (n_qubits - 1 - self.target))
        } else {
            index
        })
    }
}

pub fn mcx_cost(controls: u64, aux_available: bool) -> u64 {
    match controls {
        0 => 0,
        1 => 1,
        c if aux_available => c,
        c => c * c,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QubitRole {
    Input,
    Blank,
    Machine,
    Aux,
    AncillaFlag,
    /// Generic register for circuits built outside a cloner layout.
    Data,
}

/// A named, contiguous run of gates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stage {
    pub name: String,
    pub start: usize,
    pub end: usize,
}

impl Stage {
    pub fn range(&self) -> Range<usize> {
        self.start..self.end
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    n_qubits: usize,
    roles: Vec<QubitRole>,
    gates: Vec<Gate>,
    stages: Vec<Stage>,
}

impl Circuit {
    pub fn new(roles: Vec<QubitRole>) -> Result<Self> {
        if roles.is_empty() {
            return Err(Error::EmptyRegister);
        }
        Ok(Self {
            n_qubits: roles.len(),
            roles,
            gates: Vec::new(),
            stages: Vec::new(),
        })
    }

    pub fn with_data_qubits(n_qubits: usize) -> Result<Self> {
        Self::new(vec![QubitRole::Data; n_qubits])
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn roles(&self) -> &[QubitRole] {
        &self.roles
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn stages(&self) -> &[Stage] {
        &self.stages
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn qubits_with_role(&self, role: QubitRole) -> Vec<usize> {
        self.roles
            .iter()
            .enumerate()
            .filter(|(_, r)| **r == role)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        let top = gate.max_qubit();
        if top >= self.n_qubits {
            return Err(Error::QubitOutOfRange {
                index: top,
                n_qubits: self.n_qubits,
            });
        }
        self.gates.push(gate);
        Ok(())
    }

    /// Appends every gate of `other` (same width), shifting its stages.
    pub fn append(&mut self, other: &Circuit) -> Result<()> {
        if other.n_qubits != self.n_qubits {
            return Err(Error::DimensionMismatch(format!(
                "cannot append a {}-qubit circuit to a {}-qubit circuit",
                other.n_qubits, self.n_qubits
            )));
        }
        let offset = self.gates.len();
        self.gates.extend(other.gates.iter().cloned());
        self.stages.extend(other.stages.iter().map(|s| Stage {
            name: s.name.clone(),
            start: s.start + offset,
            end: s.end + offset,
        }));
        Ok(())
    }

    /// Appends `sub` with qubit `i` of `sub` placed on `map[i]` and every
    /// gate additionally conditioned on `extra_controls`.
    pub fn embed(&mut self, sub: &Circuit, map: &[usize], extra_controls: &[Control]) -> Result<()> {
        if map.len() != sub.n_qubits {
            return Err(Error::DimensionMismatch(format!(
                "qubit map has {} entries for a {}-qubit circuit",
                map.len(),
                sub.n_qubits
            )));
        }
        for gate in &sub.gates {
            self.push(gate.remapped(map, extra_controls)?)?;
        }
        Ok(())
    }

    /// Labels the gates appended since `start` as stage `name`.
    pub fn mark_stage(&mut self, name: &str, start: usize) {
        self.stages.push(Stage {
            name: name.to_string(),
            start,
            end: self.gates.len(),
        });
    }

    pub fn mark_stage_range(&mut self, name: &str, start: usize, end: usize) {
        self.stages.push(Stage {
            name: name.to_string(),
            start,
            end,
        });
    }

    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        if state.n_qubits() != self.n_qubits {
            return Err(Error::DimensionMismatch(format!(
                "circuit has {} qubits, state has {}",
                self.n_qubits,
                state.n_qubits()
            )));
        }
        let mut out = state.clone();
        self.apply_in_place(out.amps_mut());
        Ok(out)
    }

    pub(crate) fn apply_in_place(&self, amps: &mut [Complex64]) {
        for gate in &self.gates {
            gate.apply_to(amps, self.n_qubits);
        }
    }

    /// Image of a basis index when every gate is an X-type gate.
    pub fn apply_to_basis(&self, index: usize) -> Option<usize> {
        self.gates
            .iter()
            .try_fold(index, |i, g| g.apply_to_basis(i, self.n_qubits))
    }

    pub fn cnot_cost(&self, aux_available: bool) -> u64 {
        cost_of(&self.gates, aux_available)
    }

    /// Cost of the gates in every stage named `name`.
    pub fn stage_cost(&self, name: &str, aux_available: bool) -> u64 {
        self.stages
            .iter()
            .filter(|s| s.name == name)
            .map(|s| cost_of(&self.gates[s.range()], aux_available))
            .sum()
    }

    pub fn inverse(&self) -> Circuit {
        let len = self.gates.len();
        Circuit {
            n_qubits: self.n_qubits,
            roles: self.roles.clone(),
            gates: self.gates.iter().rev().map(Gate::inverse).collect(),
            stages: self
                .stages
                .iter()
                .rev()
                .map(|s| Stage {
                    name: s.name.clone(),
                    start: len - s.end,
                    end: len - s.start,
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let gates = self
            .gates
            .iter()
            .map(|g| {
                let theta = match g.kind.theta() {
                    Some(t) => Some(RawValue::from_string(format_angle(t))?),
                    None => None,
                };
                Ok(GateOut {
                    kind: g.kind.tag(),
                    theta,
                    target: g.target,
                    controls: &g.controls,
                })
            })
            .collect::<std::result::Result<Vec<_>, serde_json::Error>>()?;
        let wire = CircuitOut {
            schema: CIRCUIT_SCHEMA,
            n_qubits: self.n_qubits,
            roles: &self.roles,
            stages: &self.stages,
            gates,
        };
        Ok(serde_json::to_string_pretty(&wire)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let wire: CircuitIn = serde_json::from_str(text)?;
        if wire.schema != CIRCUIT_SCHEMA {
            return Err(Error::InvalidGate(format!(
                "unsupported circuit schema '{}'",
                wire.schema
            )));
        }
        if wire.roles.len() != wire.n_qubits {
            return Err(Error::RoleMismatch(format!(
                "{} roles for {} qubits",
                wire.roles.len(),
                wire.n_qubits
            )));
        }
        let mut circuit = Circuit::new(wire.roles)?;
        for g in wire.gates {
            let kind = match (g.kind.as_str(), g.theta) {
                ("roty", Some(t)) => GateKind::RotY(t),
                ("utheta", Some(t)) => GateKind::UTheta(t),
                ("x", None) => GateKind::X,
                ("cnot", None) => GateKind::Cnot,
                ("mcx", None) => GateKind::MultiControlledX,
                (k, t) => {
                    return Err(Error::InvalidGate(format!(
                        "bad gate kind '{k}' with theta {t:?}"
                    )))
                }
            };
            circuit.push(Gate::new(kind, g.target, g.controls)?)?;
        }
        for s in &wire.stages {
            if s.start > s.end || s.end > circuit.gates.len() {
                return Err(Error::InvalidGate(format!(
                    "stage '{}' spans {}..{} outside the gate list",
                    s.name, s.start, s.end
                )));
            }
        }
        circuit.stages = wire.stages;
        Ok(circuit)
    }
}

fn cost_of(gates: &[Gate], aux_available: bool) -> u64 {
    gates.iter().map(|g| g.cnot_cost(aux_available)).sum()
}

/// Seventeen significant digits: exact f64 round trip.
fn format_angle(t: f64) -> String {
    format!("{t:.16e}")
}

#[derive(Serialize)]
struct GateOut<'a> {
    kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    theta: Option<Box<RawValue>>,
    target: usize,
    controls: &'a [Control],
}

#[derive(Serialize)]
struct CircuitOut<'a> {
    schema: &'static str,
    n_qubits: usize,
    roles: &'a [QubitRole],
    #[serde(skip_serializing_if = "<[Stage]>::is_empty")]
    stages: &'a [Stage],
    gates: Vec<GateOut<'a>>,
}

#[derive(Deserialize)]
struct GateIn {
    kind: String,
    theta: Option<f64>,
    target: usize,
    #[serde(default)]
    controls: Vec<Control>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CircuitIn {
    schema: String,
    n_qubits: usize,
    roles: Vec<QubitRole>,
    #[serde(default)]
    stages: Vec<Stage>,
    gates: Vec<GateIn>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

    fn basis(n: usize, i: usize) -> StateVector {
        StateVector::basis(n, i).unwrap()
    }

    #[test]
    fn cnot_on_10() {
        let mut c = Circuit::with_data_qubits(2).unwrap();
        c.push(Gate::cnot(0, 1).unwrap()).unwrap();
        let out = c.apply(&basis(2, 0b10)).unwrap();
        assert_eq!(out.amp(0b11), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn u_theta_quarter_turn() {
        let mut c = Circuit::with_data_qubits(1).unwrap();
        c.push(Gate::u_theta(0, FRAC_PI_4).unwrap()).unwrap();
        let out = c.apply(&basis(1, 0)).unwrap();
        assert!((out.amp(0).re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((out.amp(1).re - FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn negative_control() {
        let mut c = Circuit::with_data_qubits(2).unwrap();
        c.push(Gate::new(GateKind::Cnot, 1, vec![Control::neg(0)]).unwrap())
            .unwrap();
        assert_eq!(c.apply(&basis(2, 0b00)).unwrap().amp(0b01).re, 1.0);
        assert_eq!(c.apply(&basis(2, 0b10)).unwrap().amp(0b10).re, 1.0);
    }

    #[test]
    fn rot_y_matches_definition() {
        let g = Gate::rot_y(0, 0.3).unwrap();
        let mut c = Circuit::with_data_qubits(1).unwrap();
        c.push(g).unwrap();
        let one = c.apply(&basis(1, 1)).unwrap();
        assert!((one.amp(0).re + 0.3f64.sin()).abs() < 1e-15);
        assert!((one.amp(1).re - 0.3f64.cos()).abs() < 1e-15);
    }

    #[test]
    fn gate_validation() {
        assert!(Gate::cnot(1, 1).is_err());
        assert!(Gate::new(GateKind::X, 0, vec![Control::pos(1)]).is_err());
        assert!(Gate::new(GateKind::Cnot, 0, vec![]).is_err());
        assert!(Gate::mcx(vec![], 0).is_err());
        assert!(matches!(
            Gate::mcx(vec![Control::pos(1), Control::neg(1)], 0),
            Err(Error::DuplicateQubit(1))
        ));
        assert!(Gate::rot_y(0, f64::NAN).is_err());
        let mut c = Circuit::with_data_qubits(2).unwrap();
        assert!(c.push(Gate::x(2)).is_err());
    }

    #[test]
    fn cost_model() {
        let mut c = Circuit::with_data_qubits(5).unwrap();
        assert_eq!(c.cnot_cost(false), 0);
        c.push(Gate::mcx((0..4).map(Control::pos).collect(), 4).unwrap())
            .unwrap();
        assert_eq!(c.cnot_cost(false), 16);
        assert_eq!(c.cnot_cost(true), 4);
        c.push(Gate::new(GateKind::Cnot, 0, vec![Control::neg(1)]).unwrap())
            .unwrap();
        c.push(Gate::rot_y(0, 0.1).unwrap()).unwrap();
        c.push(Gate::new(GateKind::UTheta(0.2), 2, vec![Control::pos(0), Control::neg(1)]).unwrap())
            .unwrap();
        assert_eq!(c.cnot_cost(false), 16 + 1 + 0 + 8);
    }

    #[test]
    fn inverse_flips_rot_y_only() {
        let mut c = Circuit::with_data_qubits(2).unwrap();
        c.push(Gate::rot_y(0, 0.3).unwrap()).unwrap();
        c.push(Gate::cnot(0, 1).unwrap()).unwrap();
        c.push(Gate::u_theta(1, 0.7).unwrap()).unwrap();
        let inv = c.inverse();
        assert_eq!(inv.gates()[0].kind(), GateKind::UTheta(0.7));
        assert_eq!(inv.gates()[1].kind(), GateKind::Cnot);
        assert_eq!(inv.gates()[2].kind(), GateKind::RotY(-0.3));
    }

    #[test]
    fn embed_adds_controls_and_promotes_kind() {
        let mut sub = Circuit::with_data_qubits(2).unwrap();
        sub.push(Gate::cnot(0, 1).unwrap()).unwrap();
        sub.push(Gate::x(0)).unwrap();
        let mut host = Circuit::with_data_qubits(4).unwrap();
        host.embed(&sub, &[3, 2], &[Control::neg(0)]).unwrap();
        assert_eq!(host.gates()[0].kind(), GateKind::MultiControlledX);
        assert_eq!(host.gates()[0].target(), 2);
        assert_eq!(host.gates()[1].kind(), GateKind::Cnot);
        assert_eq!(host.gates()[1].target(), 3);
        assert!(host.embed(&sub, &[3], &[]).is_err());
    }

    #[test]
    fn json_round_trip_is_exact() {
        let mut c = Circuit::new(vec![QubitRole::Input, QubitRole::Blank, QubitRole::AncillaFlag]).unwrap();
        c.push(Gate::rot_y(1, 0.1 + 0.2).unwrap()).unwrap();
        c.push(Gate::u_theta(0, -1.0 / 3.0).unwrap()).unwrap();
        c.push(Gate::mcx(vec![Control::pos(0), Control::neg(1)], 2).unwrap())
            .unwrap();
        c.mark_stage("prep", 0);
        let text = c.to_json().unwrap();
        assert!(text.contains("\"polarity\": \"negative\""));
        assert!(text.contains("3.0000000000000004e-1"));
        let back = Circuit::from_json(&text).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn json_rejects_garbage() {
        assert!(Circuit::from_json("{").is_err());
        let bad = r#"{"schema":"uqcm.circuit/v1","n_qubits":1,"roles":["data"],
            "gates":[{"kind":"roty","target":0,"controls":[]}]}"#;
        assert!(Circuit::from_json(bad).is_err());
        let oob = r#"{"schema":"uqcm.circuit/v1","n_qubits":1,"roles":["data"],
            "gates":[{"kind":"x","target":3,"controls":[]}]}"#;
        assert!(Circuit::from_json(oob).is_err());
    }

    #[test]
    fn pattern_controls_msb_first() {
        let c = pattern_controls(&[4, 5, 6], 0b101);
        assert_eq!(c, vec![Control::pos(4), Control::neg(5), Control::pos(6)]);
    }
}
