//! Cloning stage: partial basis permutations, move scheduling with buffer
//! bases, symbolic replay, and compilation to flag-routed gates.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::circuit::{pattern_controls, Circuit, Gate, QubitRole};
use crate::error::{Error, Result};

/// Transfer the amplitude at `source` to the empty basis `dest`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Move {
    pub source: u64,
    pub dest: u64,
}

impl Move {
    pub fn new(source: u64, dest: u64) -> Self {
        Self { source, dest }
    }
}

/// Injective map on basis indices of an `n_qubits` register. Only bases
/// carrying amplitude are constrained.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PermutationWire", into = "PermutationWire")]
pub struct PermutationSpec {
    n_qubits: usize,
    mapping: BTreeMap<u64, u64>,
}

#[derive(Serialize, Deserialize)]
struct PermutationWire {
    n_qubits: usize,
    mapping: Vec<Move>,
}

impl TryFrom<PermutationWire> for PermutationSpec {
    type Error = Error;
    fn try_from(w: PermutationWire) -> Result<Self> {
        PermutationSpec::new(w.n_qubits, w.mapping.into_iter().map(|m| (m.source, m.dest)))
    }
}

impl From<PermutationSpec> for PermutationWire {
    fn from(p: PermutationSpec) -> Self {
        PermutationWire {
            n_qubits: p.n_qubits,
            mapping: p.rows().collect(),
        }
    }
}

impl PermutationSpec {
    pub fn new(n_qubits: usize, pairs: impl IntoIterator<Item = (u64, u64)>) -> Result<Self> {
        if n_qubits == 0 || n_qubits > 63 {
            return Err(Error::InvalidPermutation(format!(
                "register width {n_qubits} outside 1..=63"
            )));
        }
        let dim = 1u64 << n_qubits;
        let mut mapping = BTreeMap::new();
        let mut images = BTreeSet::new();
        for (s, d) in pairs {
            if s >= dim || d >= dim {
                return Err(Error::InvalidPermutation(format!(
                    "pair {s} -> {d} outside a {n_qubits}-qubit register"
                )));
            }
            if mapping.insert(s, d).is_some() {
                return Err(Error::InvalidPermutation(format!("source {s} mapped twice")));
            }
            if !images.insert(d) {
                return Err(Error::InvalidPermutation(format!("destination {d} used twice")));
            }
        }
        Ok(Self { n_qubits, mapping })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.mapping.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mapping.is_empty()
    }

    pub fn get(&self, source: u64) -> Option<u64> {
        self.mapping.get(&source).copied()
    }

    pub fn rows(&self) -> impl Iterator<Item = Move> + '_ {
        self.mapping.iter().map(|(&s, &d)| Move::new(s, d))
    }

    /// Extension to a full permutation of `0..2^n`: unconstrained bases stay
    /// fixed where possible, and the leftover ends of open chains are joined
    /// in ascending order.
    pub fn completed(&self) -> Vec<u64> {
        let dim = 1u64 << self.n_qubits;
        let images: BTreeSet<u64> = self.mapping.values().copied().collect();
        let mut perm: Vec<u64> = (0..dim).collect();
        for (&s, &d) in &self.mapping {
            perm[s as usize] = d;
        }
        let heads: Vec<u64> = images
            .iter()
            .copied()
            .filter(|d| !self.mapping.contains_key(d))
            .collect();
        let tails: Vec<u64> = self
            .mapping
            .keys()
            .copied()
            .filter(|s| !images.contains(s))
            .collect();
        for (h, t) in heads.into_iter().zip(tails) {
            perm[h as usize] = t;
        }
        perm
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PermutationPlan {
    pub moves: Vec<Move>,
    /// Bases borrowed to break cycles.
    pub buffers: Vec<u64>,
}

impl PermutationPlan {
    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }
}

/// Orders the non-trivial rows of `perm` so that no move lands on an
/// occupied basis. Open chains run backwards from their empty end; each
/// cycle parks one token in the smallest empty basis.
pub fn schedule(perm: &PermutationSpec) -> Result<PermutationPlan> {
    let mapping = &perm.mapping;
    let inverse: BTreeMap<u64, u64> = mapping
        .iter()
        .filter(|(s, d)| s != d)
        .map(|(&s, &d)| (d, s))
        .collect();
    let mut occupied: BTreeSet<u64> = mapping.keys().copied().collect();
    let mut done: BTreeSet<u64> = mapping
        .iter()
        .filter(|(s, d)| s == d)
        .map(|(&s, _)| s)
        .collect();
    let mut moves = Vec::new();
    let mut buffers = Vec::new();

    let ends: Vec<u64> = inverse
        .keys()
        .copied()
        .filter(|d| !mapping.contains_key(d))
        .collect();
    for end in ends {
        let mut d = end;
        while let Some(&s) = inverse.get(&d) {
            shift(&mut moves, &mut occupied, s, d);
            done.insert(s);
            d = s;
        }
    }

    let pending: Vec<u64> = mapping
        .keys()
        .copied()
        .filter(|s| !done.contains(s))
        .collect();
    for c0 in pending {
        if done.contains(&c0) {
            continue;
        }
        let mut cycle = vec![c0];
        let mut next = mapping[&c0];
        while next != c0 {
            cycle.push(next);
            next = mapping[&next];
        }
        let buffer = smallest_empty(&occupied, perm.n_qubits)?;
        buffers.push(buffer);
        let last = *cycle.last().expect("cycle nonempty");
        shift(&mut moves, &mut occupied, last, buffer);
        for i in (0..cycle.len() - 1).rev() {
            shift(&mut moves, &mut occupied, cycle[i], cycle[i + 1]);
        }
        shift(&mut moves, &mut occupied, buffer, c0);
        done.extend(cycle);
    }
    Ok(PermutationPlan { moves, buffers })
}

fn shift(moves: &mut Vec<Move>, occupied: &mut BTreeSet<u64>, s: u64, d: u64) {
    occupied.remove(&s);
    occupied.insert(d);
    moves.push(Move::new(s, d));
}

fn smallest_empty(occupied: &BTreeSet<u64>, n_qubits: usize) -> Result<u64> {
    let dim = 1u64 << n_qubits;
    let mut candidate = 0u64;
    for &o in occupied {
        if o != candidate {
            break;
        }
        candidate += 1;
    }
    if candidate < dim {
        Ok(candidate)
    } else {
        Err(Error::NoFreeBasis)
    }
}

/// Replays `plan` on tokens placed at every source of `perm` and checks
/// that no move reads an empty basis or overwrites an occupied one, and
/// that every token finishes at its image.
pub fn validate_plan(perm: &PermutationSpec, plan: &PermutationPlan) -> Result<()> {
    let dim = 1u64 << perm.n_qubits;
    let mut at: BTreeMap<u64, u64> = perm.mapping.keys().map(|&s| (s, s)).collect();
    for (index, m) in plan.moves.iter().enumerate() {
        let fail = |reason: String| Error::InvalidPlan { index, reason };
        if m.source >= dim || m.dest >= dim {
            return Err(fail(format!("basis outside a {}-qubit register", perm.n_qubits)));
        }
        if m.source == m.dest {
            return Err(fail(format!("trivial move on {}", m.source)));
        }
        if at.contains_key(&m.dest) {
            return Err(fail(format!("destination {} is occupied", m.dest)));
        }
        let token = at
            .remove(&m.source)
            .ok_or_else(|| fail(format!("source {} is empty", m.source)))?;
        at.insert(m.dest, token);
    }
    for (&pos, &token) in &at {
        let want = perm.mapping[&token];
        if want != pos {
            return Err(Error::InvalidPlan {
                index: plan.moves.len(),
                reason: format!("amplitude from {token} ends at {pos}, expected {want}"),
            });
        }
    }
    Ok(())
}

/// Gates for `plan` on `n_qubits` data qubits plus a trailing flag qubit.
/// Each move sets the flag on the source pattern, flips the differing bits
/// from the flag, and clears the flag on the destination pattern.
pub fn compile_moves(plan: &PermutationPlan, n_qubits: usize) -> Result<Circuit> {
    let mut roles = vec![QubitRole::Data; n_qubits];
    roles.push(QubitRole::AncillaFlag);
    let mut circuit = Circuit::new(roles)?;
    let data: Vec<usize> = (0..n_qubits).collect();
    let flag = n_qubits;
    for m in &plan.moves {
        if m.source == m.dest {
            continue;
        }
        circuit.push(Gate::mcx(pattern_controls(&data, m.source), flag)?)?;
        let diff = m.source ^ m.dest;
        for q in 0..n_qubits {
            if (diff >> (n_qubits - 1 - q)) & 1 == 1 {
                circuit.push(Gate::cnot(flag, q)?)?;
            }
        }
        circuit.push(Gate::mcx(pattern_controls(&data, m.dest), flag)?)?;
    }
    Ok(circuit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{Control, GateKind};

    fn three_qubit_example() -> PermutationSpec {
        PermutationSpec::new(
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
        .unwrap()
    }

    #[test]
    fn schedule_matches_reference_order() {
        let plan = schedule(&three_qubit_example()).unwrap();
        let want = [
            (0b101, 0b010),
            (0b001, 0b101),
            (0b111, 0b001),
            (0b100, 0b111),
            (0b001, 0b100),
        ];
        let got: Vec<(u64, u64)> = plan.moves.iter().map(|m| (m.source, m.dest)).collect();
        assert_eq!(got, want);
        assert_eq!(plan.buffers, vec![0b001]);
        validate_plan(&three_qubit_example(), &plan).unwrap();
    }

    #[test]
    fn validator_rejects_bad_orders() {
        let perm = three_qubit_example();
        let overwrite = PermutationPlan {
            moves: vec![Move::new(0b001, 0b101)],
            buffers: vec![],
        };
        assert!(matches!(
            validate_plan(&perm, &overwrite),
            Err(Error::InvalidPlan { index: 0, .. })
        ));
        let incomplete = PermutationPlan {
            moves: vec![Move::new(0b101, 0b010)],
            buffers: vec![],
        };
        assert!(matches!(
            validate_plan(&perm, &incomplete),
            Err(Error::InvalidPlan { index: 1, .. })
        ));
        let empty_source = PermutationPlan {
            moves: vec![Move::new(0b110, 0b010)],
            buffers: vec![],
        };
        assert!(validate_plan(&perm, &empty_source).is_err());
    }

    #[test]
    fn identity_is_empty_plan() {
        let perm = PermutationSpec::new(2, (0..4).map(|i| (i, i))).unwrap();
        let plan = schedule(&perm).unwrap();
        assert!(plan.is_empty());
        assert!(compile_moves(&plan, 2).unwrap().is_empty());
    }

    #[test]
    fn full_cycle_without_room_fails() {
        let perm = PermutationSpec::new(1, [(0, 1), (1, 0)]).unwrap();
        assert!(matches!(schedule(&perm), Err(Error::NoFreeBasis)));
    }

    #[test]
    fn spec_validation() {
        assert!(PermutationSpec::new(2, [(0, 1), (2, 1)]).is_err());
        assert!(PermutationSpec::new(2, [(0, 1), (0, 2)]).is_err());
        assert!(PermutationSpec::new(2, [(0, 4)]).is_err());
    }

    #[test]
    fn completion_is_a_permutation() {
        let perm = three_qubit_example();
        let full = perm.completed();
        let mut sorted = full.clone();
        sorted.sort();
        assert_eq!(sorted, (0..8).collect::<Vec<_>>());
        for m in perm.rows() {
            assert_eq!(full[m.source as usize], m.dest);
        }
        assert_eq!(full[0b010], 0b001);
        assert_eq!(full[0b110], 0b110);
    }

    #[test]
    fn single_move_gadget() {
        let plan = PermutationPlan {
            moves: vec![Move::new(0b101, 0b010)],
            buffers: vec![],
        };
        let c = compile_moves(&plan, 3).unwrap();
        assert_eq!(c.len(), 5);
        assert_eq!(c.gates()[0].kind(), GateKind::MultiControlledX);
        assert_eq!(c.gates()[0].controls().len(), 3);
        assert_eq!(c.gates()[0].target(), 3);
        for g in &c.gates()[1..4] {
            assert_eq!(g.controls(), &[Control::pos(3)]);
        }
        // 101|0 -> 010|0, flag register is the last bit
        assert_eq!(c.apply_to_basis(0b1010), Some(0b0100));
        assert_eq!(c.apply_to_basis(0b0000), Some(0b0000));
    }

    #[test]
    fn plan_json_round_trip() {
        let perm = three_qubit_example();
        let text = serde_json::to_string(&perm).unwrap();
        assert!(text.contains("\"source\":1,\"dest\":5"));
        let back: PermutationSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back, perm);
        let plan = schedule(&perm).unwrap();
        let back: PermutationPlan =
            serde_json::from_str(&serde_json::to_string(&plan).unwrap()).unwrap();
        assert_eq!(back, plan);
    }
}
