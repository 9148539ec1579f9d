//! Small reference circuits.

use crate::circuit::{Branch, Circuit, Instruction, ProbabilisticGate};
use crate::gate::Gate;

/// Bernstein-Vazirani with one reused query qubit.
///
/// Qubit 1 is the oracle ancilla (`H` then `Z`, i.e. `|−⟩`). For every
/// secret bit, qubit 0 runs `H`, a CX onto the ancilla when the bit is set,
/// `H`, a measurement into clbit `i` and a reset.
pub fn bernstein_vazirani(secret: &[bool]) -> Circuit {
    let mut c = Circuit::new(2, secret.len());
    c.gate(Gate::h(1)).unwrap().gate(Gate::z(1)).unwrap();
    for (i, &bit) in secret.iter().enumerate() {
        c.gate(Gate::h(0)).unwrap();
        if bit {
            c.gate(Gate::cx(0, 1)).unwrap();
        }
        c.gate(Gate::h(0)).unwrap().measure(0, i).unwrap().reset(0).unwrap();
    }
    c.gate(Gate::h(1)).unwrap();
    c
}

/// Fixed three-qubit unitary standing in for the opaque block `U`.
pub fn block_u() -> Vec<Gate> {
    vec![Gate::cx(0, 1), Gate::ry(0.7, 2), Gate::ccx(0, 1, 2), Gate::cz(1, 2)]
}

/// `H` on qubits 0 and 2, measure qubit 0, `Y` on qubit 1 controlled by the
/// result, reset qubit 2, then [`block_u`].
pub fn measure_reset_example() -> Circuit {
    let mut c = Circuit::new(3, 1);
    c.gate(Gate::h(0))
        .unwrap()
        .gate(Gate::h(2))
        .unwrap()
        .measure(0, 0)
        .unwrap()
        .cond_gate(0, true, Gate::y(1))
        .unwrap()
        .reset(2)
        .unwrap();
    for g in block_u() {
        c.gate(g).unwrap();
    }
    c
}

/// Four-branch gate on two qubits: `H⊗I`, `I⊗X`, `Z⊗Z`, `X⊗Y` with
/// probabilities 0.1, 0.2, 0.3, 0.4 (qubit 0 is the left factor).
pub fn four_branch_gate() -> ProbabilisticGate {
    let branches = vec![
        Branch::new(vec![Gate::h(0)], 0.1),
        Branch::new(vec![Gate::x(1)], 0.2),
        Branch::new(vec![Gate::z(0), Gate::z(1)], 0.3),
        Branch::new(vec![Gate::x(0), Gate::y(1)], 0.4),
    ];
    ProbabilisticGate::new(vec![0, 1], branches).expect("probabilities sum to one")
}

/// `S` on qubit 0 followed by [`four_branch_gate`].
pub fn four_branch_circuit() -> Circuit {
    let instructions = vec![Instruction::Gate(Gate::s(0)), Instruction::ProbGate(four_branch_gate())];
    Circuit::from_instructions(2, 0, instructions).expect("valid")
}
