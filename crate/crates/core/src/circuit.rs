//! Circuit IR: instructions, probabilistic gates and per-shot compilation.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gate::{Gate, GateKind};

/// Tolerance on `Σ p = 1` for probabilistic gates.
pub const PROB_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CircuitError {
    #[error("gate `{gate}` has non-finite parameter {value}")]
    InvalidParameter { gate: &'static str, value: f64 },
    #[error("gate `{gate}` expects {expected} qubit(s), got {got}")]
    ArityMismatch {
        gate: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("qubit {0} appears twice in one operand list")]
    DuplicateQubit(usize),
    #[error("qubit {index} out of range (register has {size})")]
    QubitOutOfRange { index: usize, size: usize },
    #[error("clbit {index} out of range (register has {size})")]
    ClbitOutOfRange { index: usize, size: usize },
    #[error("branch probabilities sum to {sum}, expected 1")]
    InvalidDistribution { sum: f64 },
    #[error("branch probability {0} is outside [0, 1]")]
    ProbabilityOutOfRange(f64),
    #[error("probabilistic gate has no branches")]
    NoBranches,
    #[error("branch gate touches qubit {0}, which the probabilistic gate does not declare")]
    BranchQubit(usize),
    #[error("branches of a probabilistic gate write different clbit sets")]
    InconsistentWrites,
}

/// One outcome of a probabilistic gate: a static gate sequence, its
/// probability, and the classical bits it presets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub ops: Vec<Gate>,
    pub prob: f64,
    #[serde(default)]
    pub clbit_writes: Vec<(usize, bool)>,
}

impl Branch {
    pub fn new(ops: Vec<Gate>, prob: f64) -> Self {
        Branch { ops, prob, clbit_writes: Vec::new() }
    }

    pub fn with_writes(mut self, writes: Vec<(usize, bool)>) -> Self {
        self.clbit_writes = writes;
        self
    }
}

/// A compile-time random choice between static sub-circuits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbabilisticGate {
    pub qubits: Vec<usize>,
    pub branches: Vec<Branch>,
}

impl ProbabilisticGate {
    pub fn new(qubits: Vec<usize>, branches: Vec<Branch>) -> Result<Self, CircuitError> {
        let pg = ProbabilisticGate { qubits, branches };
        pg.check()?;
        Ok(pg)
    }

    /// `U(p)`: apply `gate` with probability `p`, identity otherwise.
    pub fn with_probability(gate: Gate, p: f64) -> Result<Self, CircuitError> {
        let qubits = gate.qubits.clone();
        Self::new(
            qubits,
            vec![Branch::new(vec![gate], p), Branch::new(Vec::new(), 1.0 - p)],
        )
    }

    pub fn total_probability(&self) -> f64 {
        self.branches.iter().map(|b| b.prob).sum()
    }

    pub(crate) fn check(&self) -> Result<(), CircuitError> {
        if self.branches.is_empty() {
            return Err(CircuitError::NoBranches);
        }
        for (i, q) in self.qubits.iter().enumerate() {
            if self.qubits[..i].contains(q) {
                return Err(CircuitError::DuplicateQubit(*q));
            }
        }
        let mut first_writes: Option<Vec<usize>> = None;
        for branch in &self.branches {
            if !(0.0..=1.0).contains(&branch.prob) {
                return Err(CircuitError::ProbabilityOutOfRange(branch.prob));
            }
            for op in &branch.ops {
                op.check()?;
                if let Some(q) = op.qubits.iter().find(|q| !self.qubits.contains(q)) {
                    return Err(CircuitError::BranchQubit(*q));
                }
            }
            let mut targets: Vec<usize> = branch.clbit_writes.iter().map(|w| w.0).collect();
            targets.sort_unstable();
            match &first_writes {
                None => first_writes = Some(targets),
                Some(f) if *f != targets => return Err(CircuitError::InconsistentWrites),
                _ => {}
            }
        }
        let sum = self.total_probability();
        if (sum - 1.0).abs() > PROB_TOLERANCE {
            return Err(CircuitError::InvalidDistribution { sum });
        }
        Ok(())
    }

    /// Index of the branch selected by a uniform draw `u ∈ [0, 1)`.
    pub fn select(&self, u: f64) -> usize {
        let mut acc = 0.0;
        let mut last_nonzero = 0;
        for (i, b) in self.branches.iter().enumerate() {
            if b.prob > 0.0 {
                last_nonzero = i;
                acc += b.prob;
                if u < acc {
                    return i;
                }
            }
        }
        last_nonzero
    }

    /// Largest number of gates any branch contributes to a shot.
    pub fn max_branch_len(&self) -> usize {
        self.branches.iter().map(|b| b.ops.len()).max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Instruction {
    Gate(Gate),
    Measure { qubit: usize, clbit: usize },
    Reset { qubit: usize },
    /// Apply `gate` iff `clbit == value` at runtime.
    CondGate { clbit: usize, value: bool, gate: Gate },
    ProbGate(ProbabilisticGate),
}

impl Instruction {
    /// Qubits this instruction acts on.
    pub fn qubits(&self) -> &[usize] {
        match self {
            Instruction::Gate(g) | Instruction::CondGate { gate: g, .. } => &g.qubits,
            Instruction::Measure { qubit, .. } | Instruction::Reset { qubit } => {
                std::slice::from_ref(qubit)
            }
            Instruction::ProbGate(pg) => &pg.qubits,
        }
    }

    /// Clbits read or written.
    pub fn clbits(&self) -> Vec<usize> {
        match self {
            Instruction::Measure { clbit, .. } | Instruction::CondGate { clbit, .. } => {
                vec![*clbit]
            }
            Instruction::ProbGate(pg) => pg
                .branches
                .first()
                .map(|b| b.clbit_writes.iter().map(|w| w.0).collect())
                .unwrap_or_default(),
            _ => Vec::new(),
        }
    }

    pub fn is_dynamic(&self) -> bool {
        matches!(self, Instruction::Measure { .. } | Instruction::Reset { .. })
    }
}

impl From<Gate> for Instruction {
    fn from(g: Gate) -> Self {
        Instruction::Gate(g)
    }
}

/// Dynamic-op and static-gate counts of a circuit.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpCounts {
    pub measurements: usize,
    pub resets: usize,
    pub static_gates: usize,
}

impl OpCounts {
    pub fn dynamic(&self) -> usize {
        self.measurements + self.resets
    }
}

/// An ordered instruction list over `n_qubits` qubits (initially `|0…0⟩`)
/// and `n_clbits` classical bits (initially 0).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    n_qubits: usize,
    n_clbits: usize,
    instructions: Vec<Instruction>,
}

impl Circuit {
    pub fn new(n_qubits: usize, n_clbits: usize) -> Self {
        Circuit { n_qubits, n_clbits, instructions: Vec::new() }
    }

    /// Builds and validates a circuit from parts.
    pub fn from_instructions(
        n_qubits: usize,
        n_clbits: usize,
        instructions: Vec<Instruction>,
    ) -> Result<Self, CircuitError> {
        let c = Circuit { n_qubits, n_clbits, instructions };
        c.validate()?;
        Ok(c)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_clbits(&self) -> usize {
        self.n_clbits
    }

    pub fn instructions(&self) -> &[Instruction] {
        &self.instructions
    }

    pub fn len(&self) -> usize {
        self.instructions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instructions.is_empty()
    }

    pub fn into_instructions(self) -> Vec<Instruction> {
        self.instructions
    }

    pub fn push(&mut self, inst: impl Into<Instruction>) -> Result<&mut Self, CircuitError> {
        let inst = inst.into();
        self.check_instruction(&inst)?;
        self.instructions.push(inst);
        Ok(self)
    }

    pub fn gate(&mut self, g: Gate) -> Result<&mut Self, CircuitError> {
        self.push(Instruction::Gate(g))
    }

    pub fn measure(&mut self, qubit: usize, clbit: usize) -> Result<&mut Self, CircuitError> {
        self.push(Instruction::Measure { qubit, clbit })
    }

    pub fn reset(&mut self, qubit: usize) -> Result<&mut Self, CircuitError> {
        self.push(Instruction::Reset { qubit })
    }

    pub fn cond_gate(&mut self, clbit: usize, value: bool, g: Gate) -> Result<&mut Self, CircuitError> {
        self.push(Instruction::CondGate { clbit, value, gate: g })
    }

    pub fn prob_gate(&mut self, pg: ProbabilisticGate) -> Result<&mut Self, CircuitError> {
        self.push(Instruction::ProbGate(pg))
    }

    /// Re-checks every instruction (used on ingest).
    pub fn validate(&self) -> Result<(), CircuitError> {
        self.instructions.iter().try_for_each(|i| self.check_instruction(i))
    }

    fn check_qubit(&self, q: usize) -> Result<(), CircuitError> {
        if q < self.n_qubits {
            Ok(())
        } else {
            Err(CircuitError::QubitOutOfRange { index: q, size: self.n_qubits })
        }
    }

    fn check_clbit(&self, c: usize) -> Result<(), CircuitError> {
        if c < self.n_clbits {
            Ok(())
        } else {
            Err(CircuitError::ClbitOutOfRange { index: c, size: self.n_clbits })
        }
    }

    fn check_gate(&self, g: &Gate) -> Result<(), CircuitError> {
        g.check()?;
        g.qubits.iter().try_for_each(|&q| self.check_qubit(q))
    }

    fn check_instruction(&self, inst: &Instruction) -> Result<(), CircuitError> {
        match inst {
            Instruction::Gate(g) => self.check_gate(g),
            Instruction::Measure { qubit, clbit } => {
                self.check_qubit(*qubit)?;
                self.check_clbit(*clbit)
            }
            Instruction::Reset { qubit } => self.check_qubit(*qubit),
            Instruction::CondGate { clbit, gate, .. } => {
                self.check_clbit(*clbit)?;
                self.check_gate(gate)
            }
            Instruction::ProbGate(pg) => {
                pg.check()?;
                pg.qubits.iter().try_for_each(|&q| self.check_qubit(q))?;
                pg.branches
                    .iter()
                    .flat_map(|b| b.clbit_writes.iter())
                    .try_for_each(|w| self.check_clbit(w.0))
            }
        }
    }

    /// Measurements, resets and static gates. `CondGate` counts as one static
    /// gate; a probabilistic gate counts as its longest branch.
    pub fn count_ops(&self) -> OpCounts {
        let mut counts = OpCounts::default();
        for inst in &self.instructions {
            match inst {
                Instruction::Measure { .. } => counts.measurements += 1,
                Instruction::Reset { .. } => counts.resets += 1,
                Instruction::Gate(_) | Instruction::CondGate { .. } => counts.static_gates += 1,
                Instruction::ProbGate(pg) => counts.static_gates += pg.max_branch_len(),
            }
        }
        counts
    }

    pub fn is_static(&self) -> bool {
        self.instructions.iter().all(|i| matches!(i, Instruction::Gate(_)))
    }

    /// Longest dependency chain through qubit and clbit wires.
    pub fn depth(&self) -> usize {
        let mut qdepth = vec![0usize; self.n_qubits];
        let mut cdepth = vec![0usize; self.n_clbits];
        let mut max = 0;
        for inst in &self.instructions {
            let qs = inst.qubits();
            let cs = inst.clbits();
            let level = qs
                .iter()
                .map(|&q| qdepth[q])
                .chain(cs.iter().map(|&c| cdepth[c]))
                .max()
                .unwrap_or(0)
                + 1;
            for &q in qs {
                qdepth[q] = level;
            }
            for &c in &cs {
                cdepth[c] = level;
            }
            max = max.max(level);
        }
        max
    }
}

/// Parallel X layer for a mask: an `X` on local qubit `i` iff `mask[i]`.
pub fn parallel_x(mask: &[bool]) -> Vec<Gate> {
    mask.iter()
        .enumerate()
        .filter(|(_, &bit)| bit)
        .map(|(i, _)| Gate::x(i))
        .collect()
}

/// Parses a `"0110"`-style mask; character `i` is qubit `i`.
pub fn mask_from_str(s: &str) -> Option<Vec<bool>> {
    s.chars()
        .map(|c| match c {
            '0' => Some(false),
            '1' => Some(true),
            _ => None,
        })
        .collect()
}

/// A classical-bit assignment made by a resolved probabilistic branch.
/// It takes effect before `circuit.instructions()[position]` runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PresetWrite {
    pub position: usize,
    pub clbit: usize,
    pub value: bool,
}

/// Result of resolving every probabilistic gate for one shot.
#[derive(Debug, Clone, PartialEq)]
pub struct CompiledShot {
    pub circuit: Circuit,
    pub writes: Vec<PresetWrite>,
    /// Selected branch index for each probabilistic gate, in program order.
    pub choices: Vec<usize>,
}

impl CompiledShot {
    /// Final preset value per clbit (later writes win).
    pub fn presets(&self) -> BTreeMap<usize, bool> {
        self.writes.iter().map(|w| (w.clbit, w.value)).collect()
    }
}

/// Replaces every probabilistic gate by one branch drawn from its
/// distribution. Other instructions keep their order.
pub fn compile_shot<R: Rng + ?Sized>(circuit: &Circuit, rng: &mut R) -> Result<CompiledShot, CircuitError> {
    let mut out = Vec::with_capacity(circuit.len());
    let mut writes = Vec::new();
    let mut choices = Vec::new();
    for inst in circuit.instructions() {
        match inst {
            Instruction::ProbGate(pg) => {
                pg.check()?;
                let idx = pg.select(rng.random::<f64>());
                choices.push(idx);
                let branch = &pg.branches[idx];
                out.extend(branch.ops.iter().cloned().map(Instruction::Gate));
                writes.extend(branch.clbit_writes.iter().map(|&(clbit, value)| PresetWrite {
                    position: out.len(),
                    clbit,
                    value,
                }));
            }
            other => out.push(other.clone()),
        }
    }
    Ok(CompiledShot {
        circuit: Circuit {
            n_qubits: circuit.n_qubits,
            n_clbits: circuit.n_clbits,
            instructions: out,
        },
        writes,
        choices,
    })
}

/// Kinds of the unconditional gates, in program order.
pub fn gate_kinds(circuit: &Circuit) -> impl Iterator<Item = GateKind> + '_ {
    circuit.instructions().iter().filter_map(|i| match i {
        Instruction::Gate(g) => Some(g.kind),
        _ => None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn fig1a() -> Circuit {
        let mut c = Circuit::new(1, 0);
        c.prob_gate(ProbabilisticGate::with_probability(Gate::x(0), 0.4).unwrap()).unwrap();
        c.prob_gate(ProbabilisticGate::with_probability(Gate::y(0), 0.6).unwrap()).unwrap();
        c.gate(Gate::z(0)).unwrap();
        c
    }

    #[test]
    fn parallel_x_masks() {
        assert_eq!(parallel_x(&mask_from_str("101").unwrap()), vec![Gate::x(0), Gate::x(2)]);
        assert!(parallel_x(&mask_from_str("000").unwrap()).is_empty());
        assert_eq!(parallel_x(&[true, true]), vec![Gate::x(0), Gate::x(1)]);
    }

    #[test]
    fn fig1_compiles_to_one_of_four_circuits() {
        let c = fig1a();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut seen = std::collections::BTreeSet::new();
        for _ in 0..200 {
            let shot = compile_shot(&c, &mut rng).unwrap();
            let names: String = gate_kinds(&shot.circuit).map(|k| k.name()).collect();
            assert!(["xyz", "xz", "yz", "z"].contains(&names.as_str()), "{names}");
            seen.insert(names);
        }
        assert_eq!(seen.len(), 4);
    }

    #[test]
    fn degenerate_distribution_always_picks_its_branch() {
        let pg = ProbabilisticGate::new(vec![0], vec![Branch::new(vec![Gate::h(0)], 1.0)]).unwrap();
        let mut c = Circuit::new(1, 0);
        c.prob_gate(pg).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let shot = compile_shot(&c, &mut rng).unwrap();
            assert_eq!(shot.circuit.instructions(), &[Instruction::Gate(Gate::h(0))]);
        }
    }

    #[test]
    fn invalid_distribution_rejected() {
        let bad = ProbabilisticGate::new(
            vec![0],
            vec![Branch::new(vec![], 0.5), Branch::new(vec![Gate::x(0)], 0.4)],
        );
        assert!(matches!(bad, Err(CircuitError::InvalidDistribution { .. })));

        // Distributions are re-checked when a shot is compiled.
        let mut c = Circuit::new(1, 0);
        c.instructions.push(Instruction::ProbGate(ProbabilisticGate {
            qubits: vec![0],
            branches: vec![Branch::new(vec![], 0.7)],
        }));
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(compile_shot(&c, &mut rng), Err(CircuitError::InvalidDistribution { .. })));
    }

    #[test]
    fn inconsistent_writes_rejected() {
        let r = ProbabilisticGate::new(
            vec![0],
            vec![
                Branch::new(vec![], 0.5).with_writes(vec![(0, false)]),
                Branch::new(vec![Gate::x(0)], 0.5).with_writes(vec![(1, true)]),
            ],
        );
        assert_eq!(r, Err(CircuitError::InconsistentWrites));
    }

    #[test]
    fn wire_range_checked() {
        let mut c = Circuit::new(2, 1);
        assert!(matches!(c.gate(Gate::h(2)), Err(CircuitError::QubitOutOfRange { .. })));
        assert!(matches!(c.measure(0, 1), Err(CircuitError::ClbitOutOfRange { .. })));
        assert!(c.cond_gate(0, true, Gate::cx(0, 1)).is_ok());
    }

    #[test]
    fn counts() {
        assert_eq!(Circuit::new(0, 0).count_ops(), OpCounts::default());
        let mut c = Circuit::new(3, 1);
        c.gate(Gate::h(0)).unwrap().gate(Gate::h(2)).unwrap();
        c.measure(0, 0).unwrap();
        c.cond_gate(0, true, Gate::y(1)).unwrap();
        c.reset(2).unwrap();
        let n = c.count_ops();
        assert_eq!((n.measurements, n.resets, n.static_gates), (1, 1, 3));
    }

    #[test]
    fn presets_record_branch_writes() {
        let pg = ProbabilisticGate::new(
            vec![0],
            vec![Branch::new(vec![Gate::x(0)], 1.0).with_writes(vec![(0, true)])],
        )
        .unwrap();
        let mut c = Circuit::new(1, 1);
        c.gate(Gate::h(0)).unwrap().prob_gate(pg).unwrap();
        let shot = compile_shot(&c, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        assert_eq!(shot.writes, vec![PresetWrite { position: 2, clbit: 0, value: true }]);
        assert_eq!(shot.presets().get(&0), Some(&true));
    }

    #[test]
    fn depth_counts_classical_dependencies() {
        let mut c = Circuit::new(2, 1);
        c.gate(Gate::h(0)).unwrap();
        c.measure(0, 0).unwrap();
        c.cond_gate(0, true, Gate::x(1)).unwrap();
        assert_eq!(c.depth(), 3);
    }
}
