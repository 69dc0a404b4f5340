//! End-to-end cloner synthesis: assigns the ideal output amplitudes to
//! input patterns and preparation bases, then emits the preparation and
//! permutation stages on the register
//! `[input N][blank M-N][machine M-N][aux a][flag]`.

use serde::{Deserialize, Serialize};

use crate::circuit::{pattern_controls, Circuit, Gate, GateKind, QubitRole};
use crate::cloner::{
    binomial_f64, feasibility, gate_count_bound, level_images, CloneSpec, LevelImage,
    MachineConvention,
};
use crate::dicke::{compressed_code, dicke_compression};
use crate::error::{Error, Result};
use crate::perm::{compile_moves, schedule, validate_plan, Move, PermutationPlan, PermutationSpec};
use crate::prep::{place_amplitudes, synthesize_prep, BasisLayout, PrepTarget};

/// Amplitudes closer than this are treated as one value class.
const CLASS_TOLERANCE: f64 = 1e-9;
/// Node budget for the piece-partition search.
const SEARCH_BUDGET: usize = 1_000_000;

/// How input patterns reach the preparation stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SynthRoute {
    /// Every input pattern of weight `k` owns a disjoint slice of the
    /// level-`k` image; the preparation is conditioned on the pattern.
    Split,
    /// The input register is first compressed from the symmetric subspace
    /// to one code word per weight; one preparation per weight.
    Compress,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SynthOptions {
    /// Allow extra preparation qubits and the linear multi-control cost.
    pub aux: bool,
    pub layout: BasisLayout,
    pub convention: MachineConvention,
    /// `None` tries `Split` and falls back to `Compress`.
    pub route: Option<SynthRoute>,
}

impl SynthOptions {
    pub fn with_aux(aux: bool) -> Self {
        Self {
            aux,
            ..Self::default()
        }
    }
}

/// The preparation target and basis rows owned by one input pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct PatternPiece {
    /// Input register value that selects this piece.
    pub pattern: u64,
    pub level: u32,
    pub target: PrepTarget,
    /// Rows over the `N + prep_width` qubit register.
    pub rows: Vec<Move>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClonerLayout {
    pub spec: CloneSpec,
    pub route: SynthRoute,
    pub convention: MachineConvention,
    pub aux_qubits: u32,
    /// `2(M-N) + aux_qubits`.
    pub prep_width: usize,
    pub pieces: Vec<PatternPiece>,
}

impl ClonerLayout {
    /// Width of the permuted register, `N + prep_width`.
    pub fn data_width(&self) -> usize {
        self.spec.n_in() as usize + self.prep_width
    }

    /// True when one uncontrolled preparation serves every input pattern.
    pub fn uniform_prep(&self) -> bool {
        let n = self.spec.n_in();
        self.pieces.len() == 1usize << n
            && self.pieces.windows(2).all(|w| {
                w[0].target
                    .coeffs()
                    .iter()
                    .zip(w[1].target.coeffs())
                    .all(|(a, b)| (a - b).abs() < 1e-12)
            })
    }

    pub fn permutation(&self) -> Result<PermutationSpec> {
        let rows = self
            .pieces
            .iter()
            .flat_map(|p| p.rows.iter().map(|m| (m.source, m.dest)));
        PermutationSpec::new(self.data_width(), rows)
    }
}

/// Input pattern, level, and the piece's `(output index, amplitude)` support.
type RawPiece = (u64, u32, Vec<(usize, f64)>);

struct ValueClass {
    value: f64,
    members: Vec<usize>,
}

/// Groups the support of an image by amplitude, largest first.
fn value_classes(entries: &[(usize, f64)]) -> Vec<ValueClass> {
    let mut sorted = entries.to_vec();
    sorted.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    let mut classes: Vec<ValueClass> = Vec::new();
    for (index, value) in sorted {
        match classes.last_mut() {
            Some(c) if (c.value - value).abs() < CLASS_TOLERANCE => c.members.push(index),
            _ => classes.push(ValueClass {
                value,
                members: vec![index],
            }),
        }
    }
    for c in &mut classes {
        c.members.sort_unstable();
    }
    classes
}

/// Count vectors (one per part) that split `classes` into `parts` pieces of
/// unit norm, or `None` if the search finds none within budget.
fn split_counts(classes: &[ValueClass], parts: usize) -> Option<Vec<Vec<usize>>> {
    let counts: Vec<usize> = classes.iter().map(|c| c.members.len()).collect();
    if counts.iter().all(|n| n % parts == 0) {
        return Some(vec![counts.iter().map(|n| n / parts).collect(); parts]);
    }
    let weights: Vec<f64> = classes.iter().map(|c| c.value * c.value).collect();
    let mut candidates = Vec::new();
    let mut budget = SEARCH_BUDGET;
    unit_vectors(&weights, &counts, &mut vec![], 0.0, &mut candidates, &mut budget);
    let mut chosen = Vec::new();
    let mut remaining = counts;
    if cover(&candidates, 0, parts, &mut remaining, &mut chosen, &mut budget) {
        Some(chosen.into_iter().map(|i| candidates[i].clone()).collect())
    } else {
        None
    }
}

fn unit_vectors(
    weights: &[f64],
    counts: &[usize],
    prefix: &mut Vec<usize>,
    norm: f64,
    out: &mut Vec<Vec<usize>>,
    budget: &mut usize,
) {
    if *budget == 0 {
        return;
    }
    *budget -= 1;
    let c = prefix.len();
    if c == weights.len() {
        if (norm - 1.0).abs() < CLASS_TOLERANCE {
            out.push(prefix.clone());
        }
        return;
    }
    for x in (0..=counts[c]).rev() {
        let next = norm + x as f64 * weights[c];
        if next > 1.0 + CLASS_TOLERANCE {
            continue;
        }
        prefix.push(x);
        unit_vectors(weights, counts, prefix, next, out, budget);
        prefix.pop();
    }
}

fn cover(
    candidates: &[Vec<usize>],
    from: usize,
    parts: usize,
    remaining: &mut Vec<usize>,
    chosen: &mut Vec<usize>,
    budget: &mut usize,
) -> bool {
    if parts == 0 {
        return remaining.iter().all(|&r| r == 0);
    }
    for i in from..candidates.len() {
        if *budget == 0 {
            return false;
        }
        *budget -= 1;
        let cand = &candidates[i];
        if cand.iter().zip(remaining.iter()).any(|(x, r)| x > r) {
            continue;
        }
        remaining.iter_mut().zip(cand).for_each(|(r, x)| *r -= x);
        chosen.push(i);
        if cover(candidates, i, parts - 1, remaining, chosen, budget) {
            return true;
        }
        chosen.pop();
        remaining.iter_mut().zip(cand).for_each(|(r, x)| *r += x);
    }
    false
}

/// Splits each level image into one unit-norm piece per input pattern.
fn split_pieces(spec: &CloneSpec, levels: &[LevelImage]) -> Option<Vec<RawPiece>> {
    let n = spec.n_in();
    let mut out = Vec::new();
    for level in levels {
        let patterns: Vec<u64> = (0u64..1 << n)
            .filter(|s| s.count_ones() == level.level)
            .collect();
        let entries: Vec<(usize, f64)> = level.support().collect();
        let classes = value_classes(&entries);
        let counts = split_counts(&classes, patterns.len())?;
        let mut offsets = vec![0usize; classes.len()];
        for (pattern, xs) in patterns.iter().zip(counts) {
            let mut piece = Vec::new();
            for (c, x) in xs.iter().enumerate() {
                let cls = &classes[c];
                for &i in &cls.members[offsets[c]..offsets[c] + x] {
                    piece.push((i, cls.value));
                }
                offsets[c] += x;
            }
            piece.sort_by_key(|e| e.0);
            out.push((*pattern, level.level, piece));
        }
    }
    Some(out)
}

fn compress_pieces(spec: &CloneSpec, levels: &[LevelImage]) -> Vec<RawPiece> {
    let n = spec.n_in() as usize;
    levels
        .iter()
        .map(|level| {
            let scale = binomial_f64(n, level.level as usize).sqrt();
            let piece = level.support().map(|(i, a)| (i, a / scale)).collect();
            (compressed_code(level.level), level.level, piece)
        })
        .collect()
}

/// Pairs preparation bases with output bases inside each amplitude class:
/// fixed points first, then ascending order.
fn pair_rows(
    pattern: u64,
    target: &PrepTarget,
    piece: &[(usize, f64)],
    prep_width: usize,
    aux_qubits: u32,
) -> Result<Vec<Move>> {
    let sources: Vec<(usize, f64)> = target
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != 0.0)
        .map(|(b, c)| (((pattern as usize) << prep_width) | b, *c))
        .collect();
    let dests: Vec<(usize, f64)> = piece
        .iter()
        .map(|&(o, a)| (o << aux_qubits, a))
        .collect();
    let src_classes = value_classes(&sources);
    let dst_classes = value_classes(&dests);
    let mismatch = || {
        Error::Inconsistent(format!(
            "amplitude multisets differ for input pattern {pattern:b}"
        ))
    };
    if src_classes.len() != dst_classes.len() {
        return Err(mismatch());
    }
    let mut rows = Vec::new();
    for (sc, dc) in src_classes.iter().zip(&dst_classes) {
        if sc.members.len() != dc.members.len()
            || (sc.value - dc.value).abs() > CLASS_TOLERANCE
        {
            return Err(mismatch());
        }
        let fixed: Vec<usize> = sc
            .members
            .iter()
            .copied()
            .filter(|s| dc.members.binary_search(s).is_ok())
            .collect();
        rows.extend(fixed.iter().map(|&x| Move::new(x as u64, x as u64)));
        let rest_s = sc.members.iter().filter(|s| !fixed.contains(s));
        let rest_d = dc.members.iter().filter(|d| !fixed.contains(d));
        rows.extend(rest_s.zip(rest_d).map(|(&s, &d)| Move::new(s as u64, d as u64)));
    }
    rows.sort();
    Ok(rows)
}

fn bits_for(count: usize) -> u32 {
    count.next_power_of_two().trailing_zeros()
}

/// Assigns every amplitude of the ideal output to an input pattern and a
/// preparation basis.
pub fn plan_layout(spec: &CloneSpec, options: &SynthOptions) -> Result<ClonerLayout> {
    let feas = feasibility(spec);
    let levels = level_images(spec, options.convention)?;
    let (route, pieces) = match options.route {
        Some(SynthRoute::Split) => (
            SynthRoute::Split,
            split_pieces(spec, &levels).ok_or_else(|| {
                Error::InvalidSpec(format!(
                    "{spec}: level images admit no equal-norm split by amplitude class"
                ))
            })?,
        ),
        Some(SynthRoute::Compress) => (SynthRoute::Compress, compress_pieces(spec, &levels)),
        None => match split_pieces(spec, &levels) {
            Some(p) => (SynthRoute::Split, p),
            None => (SynthRoute::Compress, compress_pieces(spec, &levels)),
        },
    };
    let base_width = spec.prep_qubits();
    let widest = pieces.iter().map(|p| p.2.len()).max().unwrap_or(1);
    let aux_qubits = bits_for(widest).saturating_sub(base_width);
    if !options.aux && (aux_qubits > 0 || !feas.feasible_without_aux) {
        return Err(Error::Infeasible {
            n: spec.n_in(),
            m: spec.m_out(),
            lhs: feas.lhs.to_string(),
            rhs: feas.rhs.to_string(),
        });
    }
    if aux_qubits > spec.n_in() {
        return Err(Error::InvalidSpec(format!(
            "{spec}: preparation needs {} qubits, more than 2M-N",
            base_width + aux_qubits
        )));
    }
    let prep_width = (base_width + aux_qubits) as usize;
    let pieces = pieces
        .into_iter()
        .map(|(pattern, level, piece)| {
            let amps: Vec<f64> = piece.iter().map(|e| e.1).collect();
            let (target, _) = place_amplitudes(&amps, &options.layout, prep_width)?;
            let rows = pair_rows(pattern, &target, &piece, prep_width, aux_qubits)?;
            Ok(PatternPiece {
                pattern,
                level,
                target,
                rows,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ClonerLayout {
        spec: *spec,
        route,
        convention: options.convention,
        aux_qubits,
        prep_width,
        pieces,
    })
}

/// Preparation target for the all-zero input pattern.
pub fn prep_for_spec(spec: &CloneSpec, options: &SynthOptions) -> Result<PrepTarget> {
    let layout = plan_layout(spec, options)?;
    layout
        .pieces
        .into_iter()
        .find(|p| p.pattern == 0)
        .map(|p| p.target)
        .ok_or_else(|| Error::Inconsistent("no piece for the all-zero input".into()))
}

/// Basis rows mapping input-pattern and preparation bases to ideal output
/// bases.
pub fn build_permutation(spec: &CloneSpec, options: &SynthOptions) -> Result<PermutationSpec> {
    plan_layout(spec, options)?.permutation()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GateCounts {
    pub prep: u64,
    pub clone: u64,
    pub total: u64,
    /// Asymptotic bound with unit constants.
    pub bound: f64,
}

/// Gate counts of a cloner circuit split by stage. Stages other than
/// `clone` count as preparation.
pub fn gate_counts(spec: &CloneSpec, circuit: &Circuit, aux: bool) -> Result<GateCounts> {
    let total = circuit.cnot_cost(aux);
    let clone = circuit.stage_cost("clone", aux);
    Ok(GateCounts {
        prep: total - clone,
        clone,
        total,
        bound: gate_count_bound(spec, aux as u32)?.total,
    })
}

#[derive(Debug, Clone)]
pub struct ClonerCircuit {
    pub spec: CloneSpec,
    pub options: SynthOptions,
    pub layout: ClonerLayout,
    pub permutation: PermutationSpec,
    pub plan: PermutationPlan,
    pub circuit: Circuit,
}

impl ClonerCircuit {
    pub fn route(&self) -> SynthRoute {
        self.layout.route
    }

    pub fn aux_qubits(&self) -> u32 {
        self.layout.aux_qubits
    }

    pub fn gate_counts(&self) -> Result<GateCounts> {
        gate_counts(&self.spec, &self.circuit, self.options.aux)
    }
}

pub fn cloner_roles(spec: &CloneSpec, aux_qubits: u32, flag: bool) -> Vec<QubitRole> {
    let (n, r) = (spec.n_in() as usize, spec.excess() as usize);
    let mut roles = vec![QubitRole::Input; n];
    roles.extend(std::iter::repeat_n(QubitRole::Blank, r));
    roles.extend(std::iter::repeat_n(QubitRole::Machine, r));
    roles.extend(std::iter::repeat_n(QubitRole::Aux, aux_qubits as usize));
    if flag {
        roles.push(QubitRole::AncillaFlag);
    }
    roles
}

pub fn synthesize(spec: &CloneSpec, options: &SynthOptions) -> Result<ClonerCircuit> {
    let layout = plan_layout(spec, options)?;
    let n = spec.n_in() as usize;
    let data_width = layout.data_width();
    let mut circuit = Circuit::new(cloner_roles(spec, layout.aux_qubits, true))?;
    let inputs: Vec<usize> = (0..n).collect();

    if layout.route == SynthRoute::Compress {
        let start = circuit.len();
        circuit.embed(&dicke_compression(n)?, &inputs, &[])?;
        circuit.mark_stage("compress", start);
    }

    let start = circuit.len();
    let prep_map: Vec<usize> = (n..data_width).collect();
    if layout.uniform_prep() {
        circuit.embed(&synthesize_prep(&layout.pieces[0].target)?, &prep_map, &[])?;
    } else {
        for piece in &layout.pieces {
            let controls = pattern_controls(&inputs, piece.pattern);
            circuit.embed(&synthesize_prep(&piece.target)?, &prep_map, &controls)?;
        }
    }
    circuit.mark_stage("prep", start);

    let permutation = layout.permutation()?;
    let plan = schedule(&permutation)?;
    validate_plan(&permutation, &plan)?;
    let start = circuit.len();
    circuit.append(&compile_moves(&plan, data_width)?)?;
    circuit.mark_stage("clone", start);

    Ok(ClonerCircuit {
        spec: *spec,
        options: options.clone(),
        layout,
        permutation,
        plan,
        circuit,
    })
}

/// Hand-built 1 -> 2 network on qubits `a` (input), `b` (blank), `x`
/// (machine): three rotations and two CNOTs prepare the machine state, four
/// CNOTs copy.
pub fn reference_one_to_two() -> Circuit {
    let t1 = (1.0 / 5f64.sqrt()).acos() / 2.0;
    let t2 = (5f64.sqrt() / 3.0).acos() / 2.0;
    let t3 = (2.0 / 5f64.sqrt()).acos() / 2.0;
    let spec = CloneSpec::new(1, 2).expect("valid spec");
    let mut c = Circuit::new(cloner_roles(&spec, 0, false)).expect("nonempty");
    let gates = [
        Gate::rot_y(1, t1),
        Gate::cnot(1, 2),
        Gate::rot_y(2, t2),
        Gate::cnot(2, 1),
        Gate::rot_y(1, t3),
        Gate::cnot(0, 1),
        Gate::cnot(0, 2),
        Gate::cnot(1, 0),
        Gate::cnot(2, 0),
    ];
    for g in gates {
        c.push(g.expect("valid gate")).expect("in range");
    }
    c.mark_stage_range("prep", 0, 5);
    c.mark_stage_range("clone", 5, 9);
    c
}

/// Rotation angles of the reference network, for inspection.
pub fn reference_angles() -> Vec<f64> {
    reference_one_to_two()
        .gates()
        .iter()
        .filter_map(|g| match g.kind() {
            GateKind::RotY(t) => Some(t),
            _ => None,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statevec::StateVector;

    fn spec(n: u32, m: u32) -> CloneSpec {
        CloneSpec::new(n, m).unwrap()
    }

    fn explicit_layout_options() -> SynthOptions {
        SynthOptions {
            layout: BasisLayout::Explicit(vec![0b00, 0b01, 0b11]),
            ..SynthOptions::default()
        }
    }

    #[test]
    fn one_to_two_rows_match_table() {
        let perm = build_permutation(&spec(1, 2), &explicit_layout_options()).unwrap();
        let rows: Vec<(u64, u64)> = perm.rows().map(|m| (m.source, m.dest)).collect();
        assert_eq!(
            rows,
            vec![
                (0b000, 0b000),
                (0b001, 0b101),
                (0b011, 0b011),
                (0b100, 0b111),
                (0b101, 0b010),
                (0b111, 0b100),
            ]
        );
    }

    #[test]
    fn one_to_two_prep_target() {
        let t = prep_for_spec(&spec(1, 2), &explicit_layout_options()).unwrap();
        let s = |x: f64| x.sqrt();
        let want = [s(2.0 / 3.0), s(1.0 / 6.0), 0.0, s(1.0 / 6.0)];
        for (a, b) in t.coeffs().iter().zip(want) {
            assert!((a - b).abs() < 1e-12);
        }
        let layout = plan_layout(&spec(1, 2), &explicit_layout_options()).unwrap();
        assert!(layout.uniform_prep());
        assert_eq!(layout.route, SynthRoute::Split);
    }

    #[test]
    fn two_to_four_prep_target() {
        let t = prep_for_spec(&spec(2, 4), &SynthOptions::default()).unwrap();
        let c = t.coeffs();
        assert!((c[0] - 0.6f64.sqrt()).abs() < 1e-12);
        for &x in &c[1..9] {
            assert!((x - (3.0f64 / 80.0).sqrt()).abs() < 1e-12);
        }
        for &x in &c[9..15] {
            assert!((x - (1.0f64 / 60.0).sqrt()).abs() < 1e-12);
        }
        assert_eq!(c[15], 0.0);
    }

    #[test]
    fn two_to_four_complemented_rows() {
        let options = SynthOptions {
            convention: MachineConvention::Complemented,
            ..SynthOptions::default()
        };
        let perm = build_permutation(&spec(2, 4), &options).unwrap();
        assert_eq!(perm.get(0b00_0000), Some(0b0000_11));
        assert_eq!(perm.get(0b11_0000), Some(0b1111_00));
        assert_eq!(perm.len(), 15 + 10 + 10 + 15);
    }

    #[test]
    fn infeasible_needs_aux() {
        let err = synthesize(&spec(3, 6), &SynthOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Infeasible { .. }));
        assert!(err.to_string().contains("84 > 64"));
        assert!(prep_for_spec(&spec(3, 6), &SynthOptions::default()).is_err());
    }

    #[test]
    fn synthesized_one_to_two_maps_zero_input() {
        let c = synthesize(&spec(1, 2), &SynthOptions::default()).unwrap();
        assert_eq!(c.circuit.n_qubits(), 4);
        let out = c.circuit.apply(&StateVector::zero(4).unwrap()).unwrap();
        let s = |x: f64| x.sqrt();
        assert!((out.amp(0b000_0).re - s(2.0 / 3.0)).abs() < 1e-12);
        assert!((out.amp(0b011_0).re - s(1.0 / 6.0)).abs() < 1e-12);
        assert!((out.amp(0b101_0).re - s(1.0 / 6.0)).abs() < 1e-12);
    }

    #[test]
    fn reference_network() {
        let c = reference_one_to_two();
        assert_eq!(c.cnot_cost(false), 6);
        let out = c.apply(&StateVector::zero(3).unwrap()).unwrap();
        let s = |x: f64| x.sqrt();
        assert!((out.amp(0b000).re - s(2.0 / 3.0)).abs() < 1e-12);
        assert!((out.amp(0b011).re - s(1.0 / 6.0)).abs() < 1e-12);
        assert!((out.amp(0b101).re - s(1.0 / 6.0)).abs() < 1e-12);
        assert_eq!(reference_angles().len(), 3);
        let counts = gate_counts(&spec(1, 2), &c, false).unwrap();
        assert_eq!((counts.prep, counts.clone, counts.total), (2, 4, 6));
    }

    #[test]
    fn split_counts_prefers_equal_division() {
        let classes = vec![
            ValueClass { value: 0.5, members: vec![0, 1, 2, 3] },
            ValueClass { value: 0.5, members: vec![4, 5, 6, 7] },
        ];
        assert_eq!(split_counts(&classes, 2), Some(vec![vec![2, 2]; 2]));
    }

    #[test]
    fn split_counts_searches_uneven_division() {
        // one piece of 0.5 + 2 * 0.25, one of 4 * 0.25
        let classes = vec![
            ValueClass { value: 0.5f64.sqrt(), members: vec![0] },
            ValueClass { value: 0.5, members: vec![1, 2, 3, 4, 5, 6] },
        ];
        let counts = split_counts(&classes, 2).unwrap();
        assert_eq!(counts, vec![vec![1, 2], vec![0, 4]]);
        let odd = vec![ValueClass { value: 0.6, members: vec![0, 1, 2] }];
        assert_eq!(split_counts(&odd, 2), None);
    }
}
