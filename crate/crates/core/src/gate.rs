//! Gate alphabet and unitary semantics.
//!
//! Matrices use little-endian operand order: for a gate on operands
//! `[q0, q1, ...]`, bit `j` of a row/column index is the value of operand `j`.
//! For `CX` the first operand is the control, for `CCX` the first two.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circuit::CircuitError;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Kinds of gates the IR can express. Angles are radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GateKind {
    H,
    X,
    Y,
    Z,
    S,
    Sdg,
    T,
    Tdg,
    Rx(f64),
    Ry(f64),
    Rz(f64),
    U(f64, f64, f64),
    Cx,
    Cz,
    Ccx,
    Swap,
}

impl GateKind {
    pub fn arity(&self) -> usize {
        match self {
            GateKind::Cx | GateKind::Cz | GateKind::Swap => 2,
            GateKind::Ccx => 3,
            _ => 1,
        }
    }

    /// Lower-case OpenQASM 2 name.
    pub fn name(&self) -> &'static str {
        match self {
            GateKind::H => "h",
            GateKind::X => "x",
            GateKind::Y => "y",
            GateKind::Z => "z",
            GateKind::S => "s",
            GateKind::Sdg => "sdg",
            GateKind::T => "t",
            GateKind::Tdg => "tdg",
            GateKind::Rx(_) => "rx",
            GateKind::Ry(_) => "ry",
            GateKind::Rz(_) => "rz",
            GateKind::U(..) => "u3",
            GateKind::Cx => "cx",
            GateKind::Cz => "cz",
            GateKind::Ccx => "ccx",
            GateKind::Swap => "swap",
        }
    }

    pub fn params(&self) -> Vec<f64> {
        match *self {
            GateKind::Rx(t) | GateKind::Ry(t) | GateKind::Rz(t) => vec![t],
            GateKind::U(t, p, l) => vec![t, p, l],
            _ => Vec::new(),
        }
    }

    /// Builds a kind from its QASM name and parameter list.
    pub fn from_name(name: &str, params: &[f64]) -> Option<GateKind> {
        let kind = match (name, params) {
            ("h", []) => GateKind::H,
            ("x", []) => GateKind::X,
            ("y", []) => GateKind::Y,
            ("z", []) => GateKind::Z,
            ("s", []) => GateKind::S,
            ("sdg", []) => GateKind::Sdg,
            ("t", []) => GateKind::T,
            ("tdg", []) => GateKind::Tdg,
            ("rx", [t]) => GateKind::Rx(*t),
            ("ry", [t]) => GateKind::Ry(*t),
            ("rz", [t]) => GateKind::Rz(*t),
            ("u3" | "u" | "U", [t, p, l]) => GateKind::U(*t, *p, *l),
            ("cx" | "CX", []) => GateKind::Cx,
            ("cz", []) => GateKind::Cz,
            ("ccx", []) => GateKind::Ccx,
            ("swap", []) => GateKind::Swap,
            _ => return None,
        };
        Some(kind)
    }

    pub fn is_known_name(name: &str) -> bool {
        matches!(
            name,
            "h" | "x"
                | "y"
                | "z"
                | "s"
                | "sdg"
                | "t"
                | "tdg"
                | "rx"
                | "ry"
                | "rz"
                | "u3"
                | "u"
                | "U"
                | "cx"
                | "CX"
                | "cz"
                | "ccx"
                | "swap"
        )
    }

    /// The inverse gate, staying inside the alphabet.
    pub fn adjoint(&self) -> GateKind {
        match *self {
            GateKind::S => GateKind::Sdg,
            GateKind::Sdg => GateKind::S,
            GateKind::T => GateKind::Tdg,
            GateKind::Tdg => GateKind::T,
            GateKind::Rx(t) => GateKind::Rx(-t),
            GateKind::Ry(t) => GateKind::Ry(-t),
            GateKind::Rz(t) => GateKind::Rz(-t),
            GateKind::U(t, p, l) => GateKind::U(-t, -l, -p),
            other => other,
        }
    }

    pub fn check_finite(&self) -> Result<(), CircuitError> {
        match self.params().into_iter().find(|p| !p.is_finite()) {
            Some(value) => Err(CircuitError::InvalidParameter {
                gate: self.name(),
                value,
            }),
            None => Ok(()),
        }
    }

    /// Unitary matrix of dimension `2^arity`.
    pub fn unitary(&self) -> Result<Matrix, CircuitError> {
        self.check_finite()?;
        Ok(self.matrix_unchecked())
    }

    pub(crate) fn matrix_unchecked(&self) -> Matrix {
        let c = |re: f64| Complex64::new(re, 0.0);
        match *self {
            GateKind::H => Matrix::from_rows(
                2,
                [c(FRAC_1_SQRT_2), c(FRAC_1_SQRT_2), c(FRAC_1_SQRT_2), c(-FRAC_1_SQRT_2)],
            ),
            GateKind::X => Matrix::from_rows(2, [ZERO, ONE, ONE, ZERO]),
            GateKind::Y => Matrix::from_rows(2, [ZERO, -I, I, ZERO]),
            GateKind::Z => Matrix::diagonal(&[ONE, -ONE]),
            GateKind::S => Matrix::diagonal(&[ONE, I]),
            GateKind::Sdg => Matrix::diagonal(&[ONE, -I]),
            GateKind::T => Matrix::diagonal(&[ONE, Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4)]),
            GateKind::Tdg => {
                Matrix::diagonal(&[ONE, Complex64::from_polar(1.0, -std::f64::consts::FRAC_PI_4)])
            }
            GateKind::Rx(t) => {
                let (s, co) = (t / 2.0).sin_cos();
                Matrix::from_rows(2, [c(co), -I * s, -I * s, c(co)])
            }
            GateKind::Ry(t) => {
                let (s, co) = (t / 2.0).sin_cos();
                Matrix::from_rows(2, [c(co), c(-s), c(s), c(co)])
            }
            GateKind::Rz(t) => Matrix::diagonal(&[
                Complex64::from_polar(1.0, -t / 2.0),
                Complex64::from_polar(1.0, t / 2.0),
            ]),
            GateKind::U(t, p, l) => {
                let (s, co) = (t / 2.0).sin_cos();
                Matrix::from_rows(
                    2,
                    [
                        c(co),
                        -Complex64::from_polar(s, l),
                        Complex64::from_polar(s, p),
                        Complex64::from_polar(co, p + l),
                    ],
                )
            }
            GateKind::Cx => Matrix::permutation(&[0, 3, 2, 1]),
            GateKind::Cz => Matrix::diagonal(&[ONE, ONE, ONE, -ONE]),
            GateKind::Swap => Matrix::permutation(&[0, 2, 1, 3]),
            GateKind::Ccx => Matrix::permutation(&[0, 1, 2, 7, 4, 5, 6, 3]),
        }
    }

    /// Whether the gate maps computational basis states to basis states
    /// (up to phase). Used by the syntactic baselines.
    pub fn is_permutation_like(&self) -> bool {
        matches!(
            self,
            GateKind::X
                | GateKind::Y
                | GateKind::Z
                | GateKind::S
                | GateKind::Sdg
                | GateKind::T
                | GateKind::Tdg
                | GateKind::Rz(_)
                | GateKind::Cx
                | GateKind::Cz
                | GateKind::Ccx
                | GateKind::Swap
        )
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())?;
        let params = self.params();
        if !params.is_empty() {
            let parts: Vec<String> = params.iter().map(|p| format_float(*p)).collect();
            write!(f, "({})", parts.join(","))?;
        }
        Ok(())
    }
}

/// Formats a float with 17 significant digits so that it parses back exactly.
pub fn format_float(x: f64) -> String {
    format!("{:.16e}", x)
}

/// A gate applied to an ordered list of qubits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub kind: GateKind,
    pub qubits: Vec<usize>,
}

impl Gate {
    /// Checked constructor: arity, distinct operands and finite parameters.
    pub fn new(kind: GateKind, qubits: Vec<usize>) -> Result<Self, CircuitError> {
        let gate = Gate { kind, qubits };
        gate.check()?;
        Ok(gate)
    }

    pub(crate) fn check(&self) -> Result<(), CircuitError> {
        if self.qubits.len() != self.kind.arity() {
            return Err(CircuitError::ArityMismatch {
                gate: self.kind.name(),
                expected: self.kind.arity(),
                got: self.qubits.len(),
            });
        }
        for (i, q) in self.qubits.iter().enumerate() {
            if self.qubits[..i].contains(q) {
                return Err(CircuitError::DuplicateQubit(*q));
            }
        }
        self.kind.check_finite()
    }

    fn single(kind: GateKind, q: usize) -> Self {
        Gate { kind, qubits: vec![q] }
    }

    pub fn h(q: usize) -> Self {
        Self::single(GateKind::H, q)
    }
    pub fn x(q: usize) -> Self {
        Self::single(GateKind::X, q)
    }
    pub fn y(q: usize) -> Self {
        Self::single(GateKind::Y, q)
    }
    pub fn z(q: usize) -> Self {
        Self::single(GateKind::Z, q)
    }
    pub fn s(q: usize) -> Self {
        Self::single(GateKind::S, q)
    }
    pub fn sdg(q: usize) -> Self {
        Self::single(GateKind::Sdg, q)
    }
    pub fn rx(theta: f64, q: usize) -> Self {
        Self::single(GateKind::Rx(theta), q)
    }
    pub fn ry(theta: f64, q: usize) -> Self {
        Self::single(GateKind::Ry(theta), q)
    }
    pub fn rz(theta: f64, q: usize) -> Self {
        Self::single(GateKind::Rz(theta), q)
    }

    /// Panics if `control == target`.
    pub fn cx(control: usize, target: usize) -> Self {
        assert_ne!(control, target, "cx operands must differ");
        Gate { kind: GateKind::Cx, qubits: vec![control, target] }
    }

    /// Panics if `a == b`.
    pub fn cz(a: usize, b: usize) -> Self {
        assert_ne!(a, b, "cz operands must differ");
        Gate { kind: GateKind::Cz, qubits: vec![a, b] }
    }

    /// Panics on repeated operands.
    pub fn ccx(c0: usize, c1: usize, target: usize) -> Self {
        assert!(c0 != c1 && c0 != target && c1 != target, "ccx operands must differ");
        Gate { kind: GateKind::Ccx, qubits: vec![c0, c1, target] }
    }

    pub fn adjoint(&self) -> Gate {
        Gate { kind: self.kind.adjoint(), qubits: self.qubits.clone() }
    }

    /// Renames operands through `map` (local index -> wire).
    pub fn remap(&self, map: &[usize]) -> Gate {
        Gate {
            kind: self.kind,
            qubits: self.qubits.iter().map(|&q| map[q]).collect(),
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind)?;
        for (i, q) in self.qubits.iter().enumerate() {
            let sep = if i == 0 { " " } else { "," };
            write!(f, "{sep}q[{q}]")?;
        }
        Ok(())
    }
}

/// Dense row-major complex square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl Matrix {
    pub fn identity(dim: usize) -> Self {
        let mut m = Matrix { dim, data: vec![ZERO; dim * dim] };
        for i in 0..dim {
            m.data[i * dim + i] = ONE;
        }
        m
    }

    pub fn from_rows<const N: usize>(dim: usize, entries: [Complex64; N]) -> Self {
        assert_eq!(dim * dim, N);
        Matrix { dim, data: entries.to_vec() }
    }

    pub fn diagonal(diag: &[Complex64]) -> Self {
        let dim = diag.len();
        let mut m = Matrix { dim, data: vec![ZERO; dim * dim] };
        for (i, d) in diag.iter().enumerate() {
            m.data[i * dim + i] = *d;
        }
        m
    }

    /// Column `j` is mapped to row `perm[j]`.
    fn permutation(perm: &[usize]) -> Self {
        let dim = perm.len();
        let mut m = Matrix { dim, data: vec![ZERO; dim * dim] };
        for (col, &row) in perm.iter().enumerate() {
            m.data[row * dim + col] = ONE;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }

    pub fn mul(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.dim, rhs.dim);
        let n = self.dim;
        let mut out = vec![ZERO; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        Matrix { dim: n, data: out }
    }

    pub fn adjoint(&self) -> Matrix {
        let n = self.dim;
        let mut out = vec![ZERO; n * n];
        for i in 0..n {
            for j in 0..n {
                out[j * n + i] = self.data[i * n + j].conj();
            }
        }
        Matrix { dim: n, data: out }
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim);
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    /// Largest entrywise deviation from `other`.
    pub fn max_diff(&self, other: &Matrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.adjoint().mul(self).max_diff(&Matrix::identity(self.dim)) <= tol
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    const ALL: [GateKind; 16] = [
        GateKind::H,
        GateKind::X,
        GateKind::Y,
        GateKind::Z,
        GateKind::S,
        GateKind::Sdg,
        GateKind::T,
        GateKind::Tdg,
        GateKind::Rx(0.3),
        GateKind::Ry(-1.2),
        GateKind::Rz(2.5),
        GateKind::U(0.4, 1.1, -0.7),
        GateKind::Cx,
        GateKind::Cz,
        GateKind::Ccx,
        GateKind::Swap,
    ];

    #[test]
    fn pauli_x_matrix() {
        let x = GateKind::X.unitary().unwrap();
        assert_eq!(x, Matrix::from_rows(2, [ZERO, ONE, ONE, ZERO]));
    }

    #[test]
    fn hadamard_squares_to_identity() {
        let h = GateKind::H.unitary().unwrap();
        assert!(h.mul(&h).max_diff(&Matrix::identity(2)) < 1e-12);
    }

    #[test]
    fn every_kind_is_unitary_with_matching_dimension() {
        for kind in ALL {
            let m = kind.unitary().unwrap();
            assert_eq!(m.dim(), 1 << kind.arity(), "{kind}");
            assert!(m.is_unitary(1e-12), "{kind}");
        }
    }

    #[test]
    fn adjoint_inverts_every_kind() {
        for kind in ALL {
            let m = kind.unitary().unwrap();
            let a = kind.adjoint().unitary().unwrap();
            assert!(a.mul(&m).max_diff(&Matrix::identity(m.dim())) < 1e-12, "{kind}");
        }
    }

    #[test]
    fn non_finite_parameter_rejected() {
        assert!(matches!(
            GateKind::Ry(f64::NAN).unitary(),
            Err(CircuitError::InvalidParameter { .. })
        ));
        assert!(GateKind::U(0.0, f64::INFINITY, 0.0).unitary().is_err());
    }

    #[test]
    fn cx_flips_target_when_control_set() {
        // operand 0 is the control: |c=1,t=0> (index 1) -> |c=1,t=1> (index 3)
        let cx = GateKind::Cx.unitary().unwrap();
        let mut v = vec![ZERO; 4];
        v[1] = ONE;
        let out = cx.apply(&v);
        assert_eq!(out[3], ONE);
    }

    #[test]
    fn ry_rz_minus_pi_end_state() {
        // RZ(-pi) RY(-pi) |0> = RZ(-pi)(-|1>) = -e^{-i pi/2}|1>: |1> up to phase.
        let ry = GateKind::Ry(-PI).unitary().unwrap();
        let rz = GateKind::Rz(-PI).unitary().unwrap();
        let out = rz.apply(&ry.apply(&[ONE, ZERO]));
        assert!(out[0].norm() < 1e-12);
        assert!((out[1].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gate_constructor_checks() {
        assert!(Gate::new(GateKind::Cx, vec![0]).is_err());
        assert_eq!(
            Gate::new(GateKind::Cx, vec![1, 1]),
            Err(CircuitError::DuplicateQubit(1))
        );
        assert!(Gate::new(GateKind::Ccx, vec![0, 1, 2]).is_ok());
    }
}
