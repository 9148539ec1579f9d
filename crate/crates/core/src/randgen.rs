//! Seeded random dynamic circuits.
//!
//! Each layer partitions the qubits into random 1-, 2- and 3-qubit gates
//! (weights 5:4:1) with uniform angles. After a layer, a measurement into a
//! fresh clbit is added with probability `meas_density`, followed with
//! probability `cond_density` by 1-3 gates conditioned on that clbit, and a
//! reset is added with probability `reset_density`. Instructions that would
//! push the circuit past the requested depth are dropped, so the depth of
//! the result equals the request.

use std::f64::consts::TAU;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{Circuit, Instruction};
use crate::gate::{Gate, GateKind};
use crate::sim::derive_seed;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenError {
    #[error("{name} must lie in [0, 1], got {value}")]
    Density { name: &'static str, value: f64 },
    #[error("circuit needs at least one qubit and depth one")]
    Empty,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenConfig {
    pub n_qubits: usize,
    pub depth: usize,
    pub meas_density: f64,
    pub cond_density: f64,
    pub reset_density: f64,
    pub seed: u64,
}

impl GenConfig {
    /// `10·scale` qubits and depth `200·scale` with default densities.
    pub fn scale(scale: usize, seed: u64) -> Self {
        Self::explicit(10 * scale, 200 * scale, seed)
    }

    pub fn explicit(n_qubits: usize, depth: usize, seed: u64) -> Self {
        GenConfig { n_qubits, depth, meas_density: 0.05, cond_density: 0.5, reset_density: 0.03, seed }
    }

    pub fn with_densities(mut self, meas: f64, cond: f64, reset: f64) -> Self {
        self.meas_density = meas;
        self.cond_density = cond;
        self.reset_density = reset;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<(), GenError> {
        for (name, value) in [
            ("meas_density", self.meas_density),
            ("cond_density", self.cond_density),
            ("reset_density", self.reset_density),
        ] {
            if !(0.0..=1.0).contains(&value) {
                return Err(GenError::Density { name, value });
            }
        }
        if self.n_qubits == 0 || self.depth == 0 {
            return Err(GenError::Empty);
        }
        Ok(())
    }
}

/// Per-wire dependency levels, computed as in [`Circuit::depth`].
struct Levels {
    qubit: Vec<usize>,
    clbit: Vec<usize>,
    max: usize,
}

impl Levels {
    fn level(&self, inst: &Instruction) -> usize {
        let q = inst.qubits().iter().map(|&q| self.qubit[q]);
        let c = inst.clbits().into_iter().map(|c| self.clbit[c]);
        q.chain(c).max().unwrap_or(0) + 1
    }

    fn place(&mut self, inst: &Instruction) {
        let level = self.level(inst);
        for &q in inst.qubits() {
            self.qubit[q] = level;
        }
        for c in inst.clbits() {
            self.clbit[c] = level;
        }
        self.max = self.max.max(level);
    }
}

fn random_gate<R: Rng>(rng: &mut R, qubits: &[usize]) -> Gate {
    let kind = match qubits.len() {
        1 => match rng.random_range(0..12) {
            0 => GateKind::H,
            1 => GateKind::X,
            2 => GateKind::Y,
            3 => GateKind::Z,
            4 => GateKind::S,
            5 => GateKind::Sdg,
            6 => GateKind::T,
            7 => GateKind::Tdg,
            8 => GateKind::Rx(rng.random_range(0.0..TAU)),
            9 => GateKind::Ry(rng.random_range(0.0..TAU)),
            10 => GateKind::Rz(rng.random_range(0.0..TAU)),
            _ => GateKind::U(rng.random_range(0.0..TAU), rng.random_range(0.0..TAU), rng.random_range(0.0..TAU)),
        },
        2 => [GateKind::Cx, GateKind::Cz, GateKind::Swap][rng.random_range(0..3)],
        _ => GateKind::Ccx,
    };
    Gate::new(kind, qubits.to_vec()).expect("distinct operands")
}

fn random_arity<R: Rng>(rng: &mut R, available: usize) -> usize {
    loop {
        let a = match rng.random_range(0..10) {
            0..=4 => 1,
            5..=8 => 2,
            _ => 3,
        };
        if a <= available {
            return a;
        }
    }
}

pub fn generate(cfg: &GenConfig) -> Result<Circuit, GenError> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = cfg.n_qubits;
    let mut levels = Levels { qubit: vec![0; n], clbit: Vec::new(), max: 0 };
    let mut out: Vec<Instruction> = Vec::new();
    let mut order: Vec<usize> = (0..n).collect();

    let push = |inst: Instruction, levels: &mut Levels, out: &mut Vec<Instruction>| {
        if levels.level(&inst) <= cfg.depth {
            levels.place(&inst);
            out.push(inst);
        }
    };

    while levels.max < cfg.depth {
        order.shuffle(&mut rng);
        let mut i = 0;
        while i < n {
            let a = random_arity(&mut rng, n - i);
            let g = random_gate(&mut rng, &order[i..i + a]);
            push(Instruction::Gate(g), &mut levels, &mut out);
            i += a;
        }
        if rng.random_bool(cfg.meas_density) {
            let qubit = rng.random_range(0..n);
            let clbit = levels.clbit.len();
            levels.clbit.push(0);
            push(Instruction::Measure { qubit, clbit }, &mut levels, &mut out);
            if rng.random_bool(cfg.cond_density) {
                for _ in 0..rng.random_range(1..=3) {
                    order.shuffle(&mut rng);
                    let a = random_arity(&mut rng, n.min(2));
                    let gate = random_gate(&mut rng, &order[..a]);
                    push(Instruction::CondGate { clbit, value: rng.random_bool(0.5), gate }, &mut levels, &mut out);
                }
            }
        }
        if rng.random_bool(cfg.reset_density) {
            let qubit = rng.random_range(0..n);
            push(Instruction::Reset { qubit }, &mut levels, &mut out);
        }
    }
    Ok(Circuit::from_instructions(n, levels.clbit.len(), out).expect("generated wires are in range"))
}

/// `count` circuits sharing `cfg` except for derived seeds.
pub fn generate_suite(cfg: &GenConfig, count: usize) -> Result<Vec<Circuit>, GenError> {
    (0..count)
        .map(|i| generate(&cfg.with_seed(derive_seed(cfg.seed, i as u64))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qasm::serialize;

    #[test]
    fn scale_sets_size() {
        let cfg = GenConfig::scale(3, 7);
        assert_eq!((cfg.n_qubits, cfg.depth), (30, 600));
        let c = generate(&cfg).unwrap();
        assert_eq!(c.n_qubits(), 30);
        assert_eq!(c.depth(), 600);
    }

    #[test]
    fn zero_densities_give_static_circuits() {
        let cfg = GenConfig::explicit(5, 30, 1).with_densities(0.0, 0.0, 0.0);
        let c = generate(&cfg).unwrap();
        assert!(c.is_static());
        assert_eq!(c.count_ops().dynamic(), 0);
    }

    #[test]
    fn deterministic_under_seed() {
        let cfg = GenConfig::scale(1, 42);
        assert_eq!(serialize(&generate(&cfg).unwrap()), serialize(&generate(&cfg).unwrap()));
        assert_ne!(generate(&cfg).unwrap(), generate(&cfg.with_seed(43)).unwrap());
    }

    #[test]
    fn depth_matches_for_dense_dynamics() {
        for seed in 0..20 {
            let cfg = GenConfig::explicit(4, 40, seed).with_densities(0.5, 0.5, 0.5);
            let c = generate(&cfg).unwrap();
            assert_eq!(c.depth(), 40);
            assert!(c.count_ops().dynamic() > 0);
        }
    }

    #[test]
    fn suite_uses_distinct_seeds() {
        let suite = generate_suite(&GenConfig::explicit(4, 30, 5), 10).unwrap();
        assert_eq!(suite.len(), 10);
        assert_ne!(suite[0], suite[1]);
    }

    #[test]
    fn rejects_bad_config() {
        let bad = GenConfig::explicit(4, 30, 0).with_densities(1.5, 0.0, 0.0);
        assert!(matches!(generate(&bad), Err(GenError::Density { name: "meas_density", .. })));
        assert_eq!(generate(&GenConfig::explicit(0, 30, 0)), Err(GenError::Empty));
    }
}
