//! Exact reference simulator for dynamic and probabilistic circuits.
//!
//! [`enumerate`] expands every measurement, reset and probabilistic branch
//! depth-first and returns each branch with its probability, classical record
//! and final statevector. [`sample`] runs seeded single-shot trajectories
//! instead and works beyond the enumeration limits.
//!
//! Classical bitstrings are written with clbit 0 as the leftmost character.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{compile_shot, Circuit, CircuitError, Instruction};
use crate::gate::Gate;

/// Largest register [`enumerate`] accepts.
pub const MAX_ENUM_QUBITS: usize = 14;
/// Largest number of live branches [`enumerate`] accepts.
pub const MAX_BRANCHES: usize = 1 << 20;
/// Largest register [`sample`] accepts.
pub const MAX_SAMPLE_QUBITS: usize = 20;
/// Branches with probability at or below this are dropped.
pub const PRUNE_PROB: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("circuit too large to simulate: {0}")]
    TooLarge(String),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

/// Dense statevector; bit `q` of an index is the value of qubit `q`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn zero(n_qubits: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        StateVector { n_qubits, amps }
    }

    pub fn from_amplitudes(amps: Vec<Complex64>) -> Self {
        assert!(amps.len().is_power_of_two(), "length must be a power of two");
        StateVector { n_qubits: amps.len().trailing_zeros() as usize, amps }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn apply(&mut self, gate: &Gate) {
        let m = gate.kind.matrix_unchecked();
        let k = gate.qubits.len();
        let dim = 1usize << k;
        let offsets: Vec<usize> = (0..dim)
            .map(|local| {
                gate.qubits
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| local >> j & 1 == 1)
                    .map(|(_, &q)| 1usize << q)
                    .sum()
            })
            .collect();
        let gate_mask: usize = gate.qubits.iter().map(|&q| 1usize << q).sum();
        let mut buf = vec![Complex64::new(0.0, 0.0); dim];
        for base in 0..self.amps.len() {
            if base & gate_mask != 0 {
                continue;
            }
            for (slot, off) in buf.iter_mut().zip(&offsets) {
                *slot = self.amps[base | off];
            }
            for (row, off) in offsets.iter().enumerate() {
                let mut acc = Complex64::new(0.0, 0.0);
                for (col, v) in buf.iter().enumerate() {
                    acc += m.get(row, col) * v;
                }
                self.amps[base | off] = acc;
            }
        }
    }

    pub fn prob_one(&self, qubit: usize) -> f64 {
        let bit = 1usize << qubit;
        self.amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & bit != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    /// Projects `qubit` onto `outcome` and renormalizes by `prob`.
    fn collapse(&mut self, qubit: usize, outcome: bool, prob: f64) {
        let bit = 1usize << qubit;
        let scale = 1.0 / prob.sqrt();
        for (i, a) in self.amps.iter_mut().enumerate() {
            if (i & bit != 0) == outcome {
                *a *= scale;
            } else {
                *a = Complex64::new(0.0, 0.0);
            }
        }
    }

    /// Moves the `|1⟩` component of `qubit` onto `|0⟩`; the state must
    /// already be collapsed to `qubit = 1`.
    fn flip_to_zero(&mut self, qubit: usize) {
        let bit = 1usize << qubit;
        for i in 0..self.amps.len() {
            if i & bit != 0 {
                self.amps[i ^ bit] = self.amps[i];
                self.amps[i] = Complex64::new(0.0, 0.0);
            }
        }
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &StateVector) -> f64 {
        inner(&self.amps, &other.amps).norm_sqr()
    }
}

/// `⟨a|b⟩`.
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Runs a static circuit on `|0…0⟩`.
pub fn simulate_static(c: &Circuit) -> Result<StateVector, SimError> {
    simulate_static_from(c, StateVector::zero(c.n_qubits()))
}

/// Runs a static circuit on a given input state.
pub fn simulate_static_from(c: &Circuit, mut state: StateVector) -> Result<StateVector, SimError> {
    if c.n_qubits() > MAX_SAMPLE_QUBITS {
        return Err(SimError::TooLarge(format!("{} qubits", c.n_qubits())));
    }
    for inst in c.instructions() {
        match inst {
            Instruction::Gate(g) => state.apply(g),
            other => {
                return Err(SimError::TooLarge(format!(
                    "static simulation cannot run {other:?}"
                )))
            }
        }
    }
    Ok(state)
}

/// One fully resolved execution path.
#[derive(Debug, Clone)]
pub struct BranchOutcome {
    pub clbits: Vec<bool>,
    pub probability: f64,
    pub state: StateVector,
    /// Choice index taken at each split, in program order.
    pub path: Vec<u32>,
}

impl BranchOutcome {
    pub fn key(&self) -> String {
        bits_to_string(&self.clbits)
    }
}

pub fn bits_to_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

struct Frame {
    pc: usize,
    clbits: Vec<bool>,
    prob: f64,
    state: StateVector,
    path: Vec<u32>,
}

/// Expands every branch of `c`.
pub fn enumerate(c: &Circuit) -> Result<Vec<BranchOutcome>, SimError> {
    if c.n_qubits() > MAX_ENUM_QUBITS {
        return Err(SimError::TooLarge(format!(
            "{} qubits exceeds the enumeration limit of {MAX_ENUM_QUBITS}",
            c.n_qubits()
        )));
    }
    c.validate()?;
    let insts = c.instructions();
    let mut out = Vec::new();
    let mut stack = vec![Frame {
        pc: 0,
        clbits: vec![false; c.n_clbits()],
        prob: 1.0,
        state: StateVector::zero(c.n_qubits()),
        path: Vec::new(),
    }];
    while let Some(mut frame) = stack.pop() {
        if stack.len() + out.len() > MAX_BRANCHES {
            return Err(SimError::TooLarge(format!("more than {MAX_BRANCHES} branches")));
        }
        // Run deterministically until the next split; push children in
        // reverse so the lowest choice index is explored first.
        let mut children: Vec<Frame> = Vec::new();
        while frame.pc < insts.len() {
            let pc = frame.pc;
            frame.pc += 1;
            match &insts[pc] {
                Instruction::Gate(g) => frame.state.apply(g),
                Instruction::CondGate { clbit, value, gate } => {
                    if frame.clbits[*clbit] == *value {
                        frame.state.apply(gate);
                    }
                }
                Instruction::Measure { qubit, clbit } => {
                    children = split_measure(&frame, *qubit, |f, outcome| {
                        f.clbits[*clbit] = outcome;
                    });
                    break;
                }
                Instruction::Reset { qubit } => {
                    children = split_measure(&frame, *qubit, |f, outcome| {
                        if outcome {
                            f.state.flip_to_zero(*qubit);
                        }
                    });
                    break;
                }
                Instruction::ProbGate(pg) => {
                    for (i, branch) in pg.branches.iter().enumerate() {
                        let p = frame.prob * branch.prob;
                        if branch.prob <= PRUNE_PROB {
                            continue;
                        }
                        let mut child = Frame {
                            pc: frame.pc,
                            clbits: frame.clbits.clone(),
                            prob: p,
                            state: frame.state.clone(),
                            path: frame.path.clone(),
                        };
                        child.path.push(i as u32);
                        for g in &branch.ops {
                            child.state.apply(g);
                        }
                        for &(cb, v) in &branch.clbit_writes {
                            child.clbits[cb] = v;
                        }
                        children.push(child);
                    }
                    break;
                }
            }
        }
        if frame.pc >= insts.len() && children.is_empty() {
            out.push(BranchOutcome {
                clbits: frame.clbits,
                probability: frame.prob,
                state: frame.state,
                path: frame.path,
            });
        } else {
            stack.extend(children.into_iter().rev());
        }
    }
    Ok(out)
}

fn split_measure(frame: &Frame, qubit: usize, post: impl Fn(&mut Frame, bool)) -> Vec<Frame> {
    let p1 = frame.state.prob_one(qubit).clamp(0.0, 1.0);
    let mut children = Vec::with_capacity(2);
    for (outcome, p) in [(false, 1.0 - p1), (true, p1)] {
        if p <= PRUNE_PROB {
            continue;
        }
        let mut child = Frame {
            pc: frame.pc,
            clbits: frame.clbits.clone(),
            prob: frame.prob * p,
            state: frame.state.clone(),
            path: frame.path.clone(),
        };
        child.path.push(outcome as u32);
        child.state.collapse(qubit, outcome, p);
        post(&mut child, outcome);
        children.push(child);
    }
    children
}

/// Probability per classical bitstring.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OutcomeDistribution(pub BTreeMap<String, f64>);

impl OutcomeDistribution {
    pub fn get(&self, key: &str) -> f64 {
        self.0.get(key).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.0.values().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &f64)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Exact outcome distribution, merging branches by classical record.
pub fn distribution(c: &Circuit) -> Result<OutcomeDistribution, SimError> {
    let mut map = BTreeMap::new();
    for b in enumerate(c)? {
        *map.entry(b.key()).or_insert(0.0) += b.probability;
    }
    Ok(OutcomeDistribution(map))
}

/// Total variation distance `½ Σ |a(x) − b(x)|`.
pub fn tvd(a: &OutcomeDistribution, b: &OutcomeDistribution) -> f64 {
    let mut sum = 0.0;
    for (k, pa) in &a.0 {
        sum += (pa - b.get(k)).abs();
    }
    for (k, pb) in &b.0 {
        if !a.0.contains_key(k) {
            sum += pb.abs();
        }
    }
    0.5 * sum
}

/// Probability-weighted density matrix of the final quantum state for each
/// classical outcome, `Σ_branch p |ψ⟩⟨ψ|` (row-major, unnormalized).
/// Comparing these is global-phase free.
pub fn conditional_states(c: &Circuit) -> Result<BTreeMap<String, Vec<Complex64>>, SimError> {
    let dim = 1usize << c.n_qubits();
    let mut map: BTreeMap<String, Vec<Complex64>> = BTreeMap::new();
    for b in enumerate(c)? {
        let rho = map
            .entry(b.key())
            .or_insert_with(|| vec![Complex64::new(0.0, 0.0); dim * dim]);
        let amps = b.state.amplitudes();
        for i in 0..dim {
            if amps[i] == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..dim {
                rho[i * dim + j] += b.probability * amps[i] * amps[j].conj();
            }
        }
    }
    Ok(map)
}

/// Largest entrywise difference between the conditional states of two
/// circuits over the same registers.
pub fn conditional_state_distance(a: &Circuit, b: &Circuit) -> Result<f64, SimError> {
    let ra = conditional_states(a)?;
    let rb = conditional_states(b)?;
    let zero = Complex64::new(0.0, 0.0);
    let mut worst: f64 = 0.0;
    for key in ra.keys().chain(rb.keys()) {
        let (x, y) = (ra.get(key), rb.get(key));
        let len = x.or(y).map_or(0, Vec::len);
        for i in 0..len {
            let xv = x.map_or(zero, |m| m[i]);
            let yv = y.map_or(zero, |m| m[i]);
            worst = worst.max((xv - yv).norm());
        }
    }
    Ok(worst)
}

/// Derives an independent stream seed from a base seed and an index
/// (SplitMix64 finalizer).
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Runs one trajectory of `c` using `rng` for both probabilistic-gate
/// resolution and measurement outcomes; returns the final classical record.
pub fn run_shot<R: Rng + ?Sized>(c: &Circuit, rng: &mut R) -> Result<Vec<bool>, SimError> {
    let shot = compile_shot(c, rng)?;
    let mut state = StateVector::zero(c.n_qubits());
    let mut clbits = vec![false; c.n_clbits()];
    let mut writes = shot.writes.iter().peekable();
    for (pc, inst) in shot.circuit.instructions().iter().enumerate() {
        while let Some(w) = writes.next_if(|w| w.position == pc) {
            clbits[w.clbit] = w.value;
        }
        match inst {
            Instruction::Gate(g) => state.apply(g),
            Instruction::CondGate { clbit, value, gate } => {
                if clbits[*clbit] == *value {
                    state.apply(gate);
                }
            }
            Instruction::Measure { qubit, clbit } => {
                clbits[*clbit] = sample_collapse(&mut state, *qubit, rng);
            }
            Instruction::Reset { qubit } => {
                if sample_collapse(&mut state, *qubit, rng) {
                    state.flip_to_zero(*qubit);
                }
            }
            Instruction::ProbGate(_) => unreachable!("compile_shot resolves probabilistic gates"),
        }
    }
    for w in writes {
        clbits[w.clbit] = w.value;
    }
    Ok(clbits)
}

fn sample_collapse<R: Rng + ?Sized>(state: &mut StateVector, qubit: usize, rng: &mut R) -> bool {
    let p1 = state.prob_one(qubit).clamp(0.0, 1.0);
    let outcome = rng.random::<f64>() < p1;
    let p = if outcome { p1 } else { 1.0 - p1 };
    state.collapse(qubit, outcome, p);
    outcome
}

/// Outcome counts over `shots` seeded trajectories.
pub fn sample_counts(c: &Circuit, shots: usize, seed: u64) -> Result<BTreeMap<String, u64>, SimError> {
    if c.n_qubits() > MAX_SAMPLE_QUBITS {
        return Err(SimError::TooLarge(format!(
            "{} qubits exceeds the sampling limit of {MAX_SAMPLE_QUBITS}",
            c.n_qubits()
        )));
    }
    c.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = BTreeMap::new();
    for _ in 0..shots {
        let bits = run_shot(c, &mut rng)?;
        *counts.entry(bits_to_string(&bits)).or_insert(0) += 1;
    }
    Ok(counts)
}

/// Empirical outcome frequencies over `shots` seeded trajectories.
pub fn sample(c: &Circuit, shots: usize, seed: u64) -> Result<OutcomeDistribution, SimError> {
    let counts = sample_counts(c, shots, seed)?;
    let n = shots.max(1) as f64;
    Ok(OutcomeDistribution(
        counts.into_iter().map(|(k, v)| (k, v as f64 / n)).collect(),
    ))
}
