//! Synthesis, exact simulation and ion-trap budgeting for N -> M universal
//! quantum cloning circuits.

pub mod budget;
pub mod circuit;
pub mod cli;
pub mod cloner;
pub mod dicke;
pub mod error;
pub mod perm;
pub mod prep;
pub mod statevec;
pub mod synth;
pub mod verify;

pub use circuit::{Circuit, Control, Gate, GateKind, Polarity, QubitRole};
pub use cloner::{CloneSpec, MachineConvention};
pub use error::{Error, Result};
pub use statevec::{DensityMatrix, PartialTrace, StateVector};
