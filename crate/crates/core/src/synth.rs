//! State preparation and state-to-state transformation circuits.
//!
//! Dense states are prepared by recursive disentangling with uniformly
//! controlled `RY`/`RZ` rotations, each decomposed into `2^k` rotations and
//! `2^k` CNOTs through the Gray-code construction. The prepared state equals
//! the target up to global phase. States with at most two non-zero
//! amplitudes take a short path of one pivot rotation plus CX/X gates.
//!
//! Gate count of [`state_prep`] is at most [`GATE_COUNT_FACTOR`]` · 2^n`.

use num_complex::Complex64;
use thiserror::Error;

use crate::circuit::{Circuit, Instruction};
use crate::gate::Gate;
use crate::qcp::AmplitudeTable;
use crate::sim::inner;

/// Default limit on the number of qubits handed to synthesis.
pub const DEFAULT_SYNTH_CAP: usize = 12;
/// `c` in the bound `gates(state_prep(ψ)) ≤ c · 2^n`.
pub const GATE_COUNT_FACTOR: usize = 4;
/// Tolerance on the norm of input states.
pub const NORM_TOL: f64 = 1e-9;

/// Rotation angles smaller than this are dropped.
const ANGLE_EPS: f64 = 1e-14;
/// Amplitudes smaller than this are treated as zero.
const AMP_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SynthError {
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("state has {n} qubits, above the synthesis cap of {cap}")]
    SynthesisCapExceeded { n: usize, cap: usize },
    #[error("instruction {0} is not a unitary gate")]
    NotUnitary(usize),
}

/// A normalized dense state; bit `i` of an index is local qubit `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetState {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl TargetState {
    pub fn new(amps: Vec<Complex64>) -> Result<Self, SynthError> {
        if amps.is_empty() || !amps.len().is_power_of_two() {
            return Err(SynthError::InvalidState(format!(
                "length {} is not a power of two",
                amps.len()
            )));
        }
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(SynthError::InvalidState("non-finite amplitude".into()));
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(SynthError::InvalidState(format!("squared norm {norm} is not 1")));
        }
        Ok(TargetState { n_qubits: amps.len().trailing_zeros() as usize, amps })
    }

    /// Computational basis state `|index⟩` on `n` qubits.
    pub fn basis(n_qubits: usize, index: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amps[index] = Complex64::new(1.0, 0.0);
        TargetState { n_qubits, amps }
    }

    /// The group state as a dense vector over its own qubits (local index
    /// `p` is `table.qubits()[p]`).
    pub fn from_table(table: &AmplitudeTable) -> Self {
        TargetState { n_qubits: table.qubits().len(), amps: table.to_dense() }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    fn support(&self) -> Vec<usize> {
        (0..self.amps.len()).filter(|&i| self.amps[i].norm() >= AMP_EPS).collect()
    }
}

/// Static circuit `C` with `C|0…0⟩ = |ψ⟩` up to global phase.
pub fn state_prep(psi: &TargetState) -> Result<Circuit, SynthError> {
    state_prep_with_cap(psi, DEFAULT_SYNTH_CAP)
}

pub fn state_prep_with_cap(psi: &TargetState, cap: usize) -> Result<Circuit, SynthError> {
    let n = psi.n_qubits;
    if n > cap {
        return Err(SynthError::SynthesisCapExceeded { n, cap });
    }
    let support = psi.support();
    let gates = match support.len() {
        1 => basis_prep(support[0], n),
        2 => two_term_prep(psi, support[0], support[1]),
        _ => dense_prep(psi),
    };
    Ok(into_circuit(n, gates))
}

fn into_circuit(n: usize, gates: Vec<Gate>) -> Circuit {
    Circuit::from_instructions(n, 0, gates.into_iter().map(Instruction::Gate).collect())
        .expect("synthesized gates are in range")
}

fn basis_prep(index: usize, n: usize) -> Vec<Gate> {
    (0..n).filter(|q| index >> q & 1 == 1).map(Gate::x).collect()
}

/// `α|a⟩ + β|b⟩`: rotate a pivot qubit where `a` and `b` differ, then copy
/// it onto the other differing qubits and fix the constant ones.
fn two_term_prep(psi: &TargetState, a: usize, b: usize) -> Vec<Gate> {
    let diff = a ^ b;
    let pivot = diff.trailing_zeros() as usize;
    // orient so that branch `a` has the pivot clear
    let (a, b) = if a >> pivot & 1 == 0 { (a, b) } else { (b, a) };
    let (alpha, beta) = (psi.amps[a], psi.amps[b]);

    let mut gates = Vec::new();
    let ratio = beta / alpha;
    if (ratio - Complex64::new(1.0, 0.0)).norm() < 1e-12 {
        gates.push(Gate::h(pivot));
    } else {
        let theta = 2.0 * beta.norm().atan2(alpha.norm());
        gates.push(Gate::ry(theta, pivot));
        let phi = wrap_angle(beta.arg() - alpha.arg());
        if phi.abs() > ANGLE_EPS {
            gates.push(Gate::rz(phi, pivot));
        }
    }
    let n = psi.n_qubits;
    for q in (0..n).filter(|&q| q != pivot) {
        let (abit, bbit) = (a >> q & 1 == 1, b >> q & 1 == 1);
        if abit != bbit {
            gates.push(Gate::cx(pivot, q));
            if abit {
                gates.push(Gate::x(q));
            }
        } else if abit {
            gates.push(Gate::x(q));
        }
    }
    gates
}

fn wrap_angle(x: f64) -> f64 {
    use std::f64::consts::PI;
    let mut y = x % (2.0 * PI);
    if y > PI {
        y -= 2.0 * PI;
    } else if y < -PI {
        y += 2.0 * PI;
    }
    y
}

#[derive(Clone, Copy)]
enum Axis {
    Y,
    Z,
}

fn dense_prep(psi: &TargetState) -> Vec<Gate> {
    let n = psi.n_qubits;
    let mut mags: Vec<f64> = psi.amps.iter().map(|a| a.norm()).collect();
    let mut phases: Vec<f64> = psi
        .amps
        .iter()
        .map(|a| if a.norm() < AMP_EPS { 0.0 } else { a.arg() })
        .collect();

    // Disentangle qubit 0 first. After removing qubits 0..t, bit m of the
    // reduced index is qubit t + 1 + m.
    let mut levels: Vec<(Vec<f64>, Vec<f64>)> = Vec::with_capacity(n);
    for _ in 0..n {
        let half = mags.len() / 2;
        let mut ry = vec![0.0; half];
        let mut rz = vec![0.0; half];
        let mut next_mag = vec![0.0; half];
        let mut next_phase = vec![0.0; half];
        for c in 0..half {
            let (r0, r1) = (mags[2 * c], mags[2 * c + 1]);
            let (w0, w1) = (phases[2 * c], phases[2 * c + 1]);
            next_mag[c] = r0.hypot(r1);
            if r1 < AMP_EPS {
                next_phase[c] = w0;
            } else if r0 < AMP_EPS {
                ry[c] = 2.0 * r1.atan2(r0);
                next_phase[c] = w1;
            } else {
                ry[c] = 2.0 * r1.atan2(r0);
                rz[c] = w1 - w0;
                next_phase[c] = 0.5 * (w0 + w1);
            }
        }
        levels.push((ry, rz));
        mags = next_mag;
        phases = next_phase;
    }

    let mut gates = Vec::new();
    for target in (0..n).rev() {
        let controls: Vec<usize> = (target + 1..n).collect();
        let (ry, rz) = &levels[target];
        uniformly_controlled(Axis::Y, target, &controls, ry, &mut gates);
        uniformly_controlled(Axis::Z, target, &controls, rz, &mut gates);
    }
    gates
}

/// Emits a rotation on `target` by `angles[j]` when the controls read `j`
/// (bit `m` of `j` is `controls[m]`).
fn uniformly_controlled(axis: Axis, target: usize, controls: &[usize], angles: &[f64], out: &mut Vec<Gate>) {
    if angles.iter().all(|a| a.abs() < ANGLE_EPS) {
        return;
    }
    let rot = |theta: f64| match axis {
        Axis::Y => Gate::ry(theta, target),
        Axis::Z => Gate::rz(theta, target),
    };
    let k = controls.len();
    if k == 0 {
        out.push(rot(angles[0]));
        return;
    }
    let n = 1usize << k;
    let gray = |i: usize| i ^ (i >> 1);
    for i in 0..n {
        let g = gray(i);
        let theta: f64 = angles
            .iter()
            .enumerate()
            .map(|(j, a)| if (j & g).count_ones() % 2 == 0 { *a } else { -*a })
            .sum::<f64>()
            / n as f64;
        if theta.abs() > ANGLE_EPS {
            out.push(rot(theta));
        }
        let changed = g ^ gray((i + 1) % n);
        out.push(Gate::cx(controls[changed.trailing_zeros() as usize], target));
    }
}

/// Reverses a static circuit and replaces every gate by its adjoint.
pub fn invert(c: &Circuit) -> Result<Circuit, SynthError> {
    let mut out = Vec::with_capacity(c.len());
    for (i, inst) in c.instructions().iter().enumerate().rev() {
        match inst {
            Instruction::Gate(g) => out.push(Instruction::Gate(g.adjoint())),
            _ => return Err(SynthError::NotUnitary(i)),
        }
    }
    Ok(Circuit::from_instructions(c.n_qubits(), c.n_clbits(), out).expect("same wires as input"))
}

/// Static circuit `T` with `T|ψ⟩ = |φ⟩` up to global phase, built as
/// `SP_φ · SP_ψ⁻¹`. Returns an empty circuit when the states already agree.
pub fn transform(psi: &TargetState, phi: &TargetState) -> Result<Circuit, SynthError> {
    transform_with_cap(psi, phi, DEFAULT_SYNTH_CAP)
}

pub fn transform_with_cap(psi: &TargetState, phi: &TargetState, cap: usize) -> Result<Circuit, SynthError> {
    if psi.n_qubits != phi.n_qubits {
        return Err(SynthError::InvalidState(format!(
            "dimension mismatch: {} vs {} qubits",
            psi.n_qubits, phi.n_qubits
        )));
    }
    let n = psi.n_qubits;
    if inner(&psi.amps, &phi.amps).norm_sqr() >= 1.0 - 1e-12 {
        return Ok(Circuit::new(n, 0));
    }
    let undo = invert(&state_prep_with_cap(psi, cap)?)?;
    let redo = state_prep_with_cap(phi, cap)?;
    let gates = undo.into_instructions().into_iter().chain(redo.into_instructions()).collect();
    Ok(Circuit::from_instructions(n, 0, gates).expect("same wires"))
}
