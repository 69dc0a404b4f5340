//! Deterministic Dicke-state preparation (split-and-cyclic-shift network)
//! and its inverse, used to compress the symmetric input subspace.

use crate::circuit::{Circuit, Control, Gate, GateKind};
use crate::error::Result;

/// Circuit on `n` qubits mapping `|0^(n-k) 1^k>` to the Dicke state
/// `D(n, k)` for every `k`.
pub fn dicke_preparation(n: usize) -> Result<Circuit> {
    let mut circuit = Circuit::with_data_qubits(n)?;
    for m in (2..=n).rev() {
        split_and_cyclic_shift(&mut circuit, m)?;
    }
    Ok(circuit)
}

/// Inverse of [`dicke_preparation`]: `D(n, k) -> |0^(n-k) 1^k>`.
pub fn dicke_compression(n: usize) -> Result<Circuit> {
    Ok(dicke_preparation(n)?.inverse())
}

/// Basis index of the compressed code word for weight `k`.
pub fn compressed_code(k: u32) -> u64 {
    (1u64 << k) - 1
}

/// Acts on qubits `0..m`; the last of them carries the moving excitation.
fn split_and_cyclic_shift(circuit: &mut Circuit, m: usize) -> Result<()> {
    let last = m - 1;
    let mf = m as f64;
    circuit.push(Gate::cnot(m - 2, last)?)?;
    circuit.push(Gate::new(
        GateKind::RotY((1.0 / mf).sqrt().acos()),
        m - 2,
        vec![Control::pos(last)],
    )?)?;
    circuit.push(Gate::cnot(m - 2, last)?)?;
    for l in 2..m {
        let q = m - 1 - l;
        circuit.push(Gate::cnot(q, last)?)?;
        circuit.push(Gate::new(
            GateKind::RotY((l as f64 / mf).sqrt().acos()),
            q,
            vec![Control::pos(last), Control::pos(q + 1)],
        )?)?;
        circuit.push(Gate::cnot(q, last)?)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statevec::StateVector;

    fn dicke(n: usize, k: u32) -> StateVector {
        let amps: Vec<f64> = (0..1usize << n)
            .map(|i| if i.count_ones() == k { 1.0 } else { 0.0 })
            .collect();
        let norm = amps.iter().sum::<f64>().sqrt();
        StateVector::from_real(n, &amps.iter().map(|a| a / norm).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn prepares_every_dicke_state() {
        for n in 1..=6 {
            let c = dicke_preparation(n).unwrap();
            for k in 0..=n as u32 {
                let input = StateVector::basis(n, compressed_code(k) as usize).unwrap();
                let out = c.apply(&input).unwrap();
                let want = dicke(n, k);
                for i in 0..out.dim() {
                    assert!((out.amp(i) - want.amp(i)).norm() < 1e-12, "n={n} k={k} i={i}");
                }
            }
        }
    }

    #[test]
    fn compression_inverts() {
        let c = dicke_compression(4).unwrap();
        let out = c.apply(&dicke(4, 2)).unwrap();
        assert!((out.amp(0b0011).re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_qubit_is_empty() {
        assert!(dicke_preparation(1).unwrap().is_empty());
    }
}
