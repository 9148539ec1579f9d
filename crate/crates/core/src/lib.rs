//! Static analysis and mid-circuit measurement/reset elimination for
//! dynamic quantum circuits.

pub mod bench;
pub mod circuit;
pub mod demo;
pub mod gate;
pub mod pcm;
pub mod qasm;
pub mod qcp;
pub mod randgen;
pub mod sim;
pub mod synth;

pub use circuit::{Branch, Circuit, CircuitError, Instruction, OpCounts, ProbabilisticGate};
pub use gate::{Gate, GateKind};
