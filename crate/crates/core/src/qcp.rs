//! Quantum constant propagation.
//!
//! A forward abstract interpretation that tracks, for each entanglement group
//! of qubits, either the exact pure state of the group (a sparse amplitude
//! table) or `Top`. Groups are merged when a multi-qubit gate connects them
//! and split again whenever a qubit factors out of its group. A merge that
//! would exceed `n_max` qubits produces `Top`.
//!
//! Invariant relied on by the optimization pass: every `Known` group is, on
//! every execution path, in exactly the recorded pure state and in a product
//! state with all other qubits.

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circuit::{Branch, Circuit, Instruction};
use crate::gate::{Gate, Matrix};

/// Amplitudes with smaller magnitude are not stored.
pub const PRUNE_AMP: f64 = 1e-12;
/// Second singular value below which a qubit is considered factorable.
pub const RANK_TOL: f64 = 1e-10;
/// Residual below which the two reset branches count as proportional.
pub const PROPORTIONAL_TOL: f64 = 1e-9;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Sparse pure state of an ordered list of qubits. Bit `p` of a basis key is
/// the value of `qubits[p]`; `qubits` is ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeTable {
    qubits: Vec<usize>,
    amps: BTreeMap<u64, Complex64>,
}

impl AmplitudeTable {
    /// `|0⟩` on one qubit.
    pub fn zero(qubit: usize) -> Self {
        AmplitudeTable {
            qubits: vec![qubit],
            amps: BTreeMap::from([(0, Complex64::new(1.0, 0.0))]),
        }
    }

    /// Builds a table from a dense vector (index bit `p` = `qubits[p]`).
    /// `qubits` must be ascending and the vector normalized.
    pub fn from_dense(qubits: Vec<usize>, dense: &[Complex64]) -> Self {
        assert_eq!(dense.len(), 1 << qubits.len());
        debug_assert!(qubits.windows(2).all(|w| w[0] < w[1]));
        let amps = dense
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm() >= PRUNE_AMP)
            .map(|(i, a)| (i as u64, *a))
            .collect();
        let mut t = AmplitudeTable { qubits, amps };
        t.normalize();
        t
    }

    pub fn qubits(&self) -> &[usize] {
        &self.qubits
    }

    pub fn amplitudes(&self) -> &BTreeMap<u64, Complex64> {
        &self.amps
    }

    pub fn amplitude(&self, basis: u64) -> Complex64 {
        self.amps.get(&basis).copied().unwrap_or(ZERO)
    }

    pub fn position(&self, qubit: usize) -> Option<usize> {
        self.qubits.iter().position(|&q| q == qubit)
    }

    pub fn to_dense(&self) -> Vec<Complex64> {
        let mut v = vec![ZERO; 1 << self.qubits.len()];
        for (&b, &a) in &self.amps {
            v[b as usize] = a;
        }
        v
    }

    /// Number of stored (non-negligible) amplitudes.
    pub fn size(&self) -> usize {
        self.amps.values().filter(|a| a.norm() >= PRUNE_AMP).count()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.values().map(|a| a.norm_sqr()).sum()
    }

    /// Basis key rendered with position 0 first.
    pub fn basis_string(&self, basis: u64) -> String {
        (0..self.qubits.len())
            .map(|p| if basis >> p & 1 == 1 { '1' } else { '0' })
            .collect()
    }

    fn prune(&mut self) {
        self.amps.retain(|_, a| a.norm() >= PRUNE_AMP);
    }

    fn normalize(&mut self) {
        let n = self.norm_sqr().sqrt();
        if n > 0.0 {
            for a in self.amps.values_mut() {
                *a /= n;
            }
        }
    }

    /// Applies `m` to the qubits at `positions` (little-endian operand order).
    fn apply_matrix(&mut self, m: &Matrix, positions: &[usize]) {
        let dim = m.dim();
        let mask: u64 = positions.iter().map(|&p| 1u64 << p).sum();
        let spread = |local: usize| -> u64 {
            positions
                .iter()
                .enumerate()
                .filter(|(j, _)| local >> j & 1 == 1)
                .map(|(_, &p)| 1u64 << p)
                .sum()
        };
        let mut out: BTreeMap<u64, Complex64> = BTreeMap::new();
        for (&b, &a) in &self.amps {
            let col = positions
                .iter()
                .enumerate()
                .map(|(j, &p)| ((b >> p & 1) as usize) << j)
                .sum::<usize>();
            let base = b & !mask;
            for row in 0..dim {
                let coef = m.get(row, col);
                if coef == ZERO {
                    continue;
                }
                *out.entry(base | spread(row)).or_insert(ZERO) += coef * a;
            }
        }
        self.amps = out;
        self.prune();
        self.normalize();
    }

    /// Tensor product, re-ordered so the merged qubit list is ascending.
    pub fn tensor(&self, other: &AmplitudeTable) -> AmplitudeTable {
        let mut qubits: Vec<usize> = self.qubits.iter().chain(&other.qubits).copied().collect();
        qubits.sort_unstable();
        let pos_a: Vec<usize> = self.qubits.iter().map(|q| qubits.binary_search(q).unwrap()).collect();
        let pos_b: Vec<usize> = other.qubits.iter().map(|q| qubits.binary_search(q).unwrap()).collect();
        let mut amps = BTreeMap::new();
        for (&ba, &aa) in &self.amps {
            let ka = scatter(ba, &pos_a);
            for (&bb, &ab) in &other.amps {
                let v = aa * ab;
                if v.norm() >= PRUNE_AMP {
                    amps.insert(ka | scatter(bb, &pos_b), v);
                }
            }
        }
        let mut t = AmplitudeTable { qubits, amps };
        t.normalize();
        t
    }

    /// The two halves of the table split on `pos`, with that bit cleared:
    /// `(terms with bit 0, terms with bit 1)`.
    fn branches(&self, pos: usize) -> (BTreeMap<u64, Complex64>, BTreeMap<u64, Complex64>) {
        let bit = 1u64 << pos;
        let mut zero = BTreeMap::new();
        let mut one = BTreeMap::new();
        for (&b, &a) in &self.amps {
            if b & bit == 0 {
                zero.insert(b, a);
            } else {
                one.insert(b & !bit, a);
            }
        }
        (zero, one)
    }

    /// Value of the qubit at `pos` if every stored term agrees on it.
    pub fn deterministic_bit(&self, pos: usize) -> Option<bool> {
        let mut bits = self.amps.keys().map(|b| b >> pos & 1 == 1);
        let first = bits.next()?;
        bits.all(|b| b == first).then_some(first)
    }

    /// Tries to write the table as `(qubit at pos) ⊗ rest`.
    fn factor_out(&self, pos: usize) -> Option<(AmplitudeTable, AmplitudeTable)> {
        let (r0, r1) = self.branches(pos);
        let n0 = sparse_norm_sqr(&r0);
        let n1 = sparse_norm_sqr(&r1);
        let (big, small, big_n) = if n0 >= n1 { (&r0, &r1, n0) } else { (&r1, &r0, n1) };
        if big_n == 0.0 {
            return None;
        }
        // det(M M†) = |big|² |residual|², computed without cancellation.
        let resid_sqr = residual_sqr(big, small, big_n);
        let det = big_n * resid_sqr;
        let tr = n0 + n1;
        let lambda_max = 0.5 * (tr + (tr * tr - 4.0 * det).max(0.0).sqrt());
        let sigma_min = (det / lambda_max).max(0.0).sqrt();
        if sigma_min >= RANK_TOL {
            return None;
        }

        let qubit = self.qubits[pos];
        let scale = 1.0 / big_n.sqrt();
        let rest_vec: BTreeMap<u64, Complex64> = big.iter().map(|(k, v)| (*k, v * scale)).collect();
        let a0 = sparse_inner(&rest_vec, &r0);
        let a1 = sparse_inner(&rest_vec, &r1);
        let mut single = AmplitudeTable {
            qubits: vec![qubit],
            amps: [(0u64, a0), (1u64, a1)].into_iter().collect(),
        };
        single.prune();
        single.normalize();

        let rest_qubits: Vec<usize> = self.qubits.iter().copied().filter(|&q| q != qubit).collect();
        let mut rest = AmplitudeTable {
            qubits: rest_qubits,
            amps: rest_vec.into_iter().map(|(k, v)| (squeeze(k, pos), v)).collect(),
        };
        rest.prune();
        rest.normalize();
        Some((single, rest))
    }
}

/// Moves bit `j` of `local` to bit `positions[j]`.
fn scatter(local: u64, positions: &[usize]) -> u64 {
    positions
        .iter()
        .enumerate()
        .filter(|(j, _)| local >> j & 1 == 1)
        .map(|(_, &p)| 1u64 << p)
        .sum()
}

/// Removes bit `pos` (which must be clear), shifting higher bits down.
fn squeeze(b: u64, pos: usize) -> u64 {
    let low = b & ((1u64 << pos) - 1);
    let high = (b >> (pos + 1)) << pos;
    low | high
}

fn sparse_norm_sqr(v: &BTreeMap<u64, Complex64>) -> f64 {
    v.values().map(|a| a.norm_sqr()).sum()
}

/// `⟨a|b⟩` over sparse vectors.
fn sparse_inner(a: &BTreeMap<u64, Complex64>, b: &BTreeMap<u64, Complex64>) -> Complex64 {
    a.iter()
        .filter_map(|(k, x)| b.get(k).map(|y| x.conj() * y))
        .sum()
}

/// Number of non-zero coefficients of a known state.
pub fn state_size(table: &AmplitudeTable) -> usize {
    table.size()
}

/// Greedily factors single qubits out of `table`. The tensor product of the
/// returned tables equals the input up to global phase; they are ordered by
/// their smallest qubit.
pub fn try_split(table: &AmplitudeTable) -> Vec<AmplitudeTable> {
    let mut out = Vec::new();
    let mut rest = table.clone();
    'outer: while rest.qubits.len() > 1 {
        for pos in 0..rest.qubits.len() {
            if let Some((single, remainder)) = rest.factor_out(pos) {
                out.push(single);
                rest = remainder;
                continue 'outer;
            }
        }
        break;
    }
    out.push(rest);
    out.sort_by_key(|t| t.qubits[0]);
    out
}

#[derive(Debug, Clone, PartialEq)]
pub enum AbstractState {
    Top,
    Known(AmplitudeTable),
}

impl AbstractState {
    pub fn is_top(&self) -> bool {
        matches!(self, AbstractState::Top)
    }

    pub fn known(&self) -> Option<&AmplitudeTable> {
        match self {
            AbstractState::Known(t) => Some(t),
            AbstractState::Top => None,
        }
    }
}

/// How the analysis treats a reset on a qubit entangled with its group.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ResetSoundness {
    /// Keep the group only when the reset output is provably pure.
    #[default]
    Strict,
    /// Drop the `|1⟩` terms and renormalize unconditionally.
    Literal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Group {
    qubits: Vec<usize>,
    state: AbstractState,
}

impl Group {
    pub fn qubits(&self) -> &[usize] {
        &self.qubits
    }

    pub fn state(&self) -> &AbstractState {
        &self.state
    }

    fn known(table: AmplitudeTable) -> Self {
        Group { qubits: table.qubits.clone(), state: AbstractState::Known(table) }
    }

    fn top(mut qubits: Vec<usize>) -> Self {
        qubits.sort_unstable();
        Group { qubits, state: AbstractState::Top }
    }
}

/// Qubit-to-group map plus the abstract state of every group. Each group is
/// keyed by its smallest qubit.
#[derive(Debug, Clone, PartialEq)]
pub struct UnionTable {
    owner: Vec<usize>,
    groups: BTreeMap<usize, Group>,
    n_max: usize,
}

impl UnionTable {
    /// Every qubit in its own `|0⟩` group.
    pub fn new(n_qubits: usize, n_max: usize) -> Self {
        assert!(n_max >= 1, "n_max must be positive");
        UnionTable {
            owner: (0..n_qubits).collect(),
            groups: (0..n_qubits).map(|q| (q, Group::known(AmplitudeTable::zero(q)))).collect(),
            n_max,
        }
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn group_of(&self, qubit: usize) -> &Group {
        &self.groups[&self.owner[qubit]]
    }

    pub fn groups(&self) -> impl Iterator<Item = &Group> {
        self.groups.values()
    }

    fn insert(&mut self, group: Group) {
        let root = group.qubits[0];
        for &q in &group.qubits {
            self.owner[q] = root;
        }
        self.groups.insert(root, group);
    }

    /// Merges the groups of `qubits`, returning the merged group's key.
    fn merge(&mut self, qubits: &[usize]) -> usize {
        let mut roots: Vec<usize> = qubits.iter().map(|&q| self.owner[q]).collect();
        roots.sort_unstable();
        roots.dedup();
        if roots.len() == 1 {
            return roots[0];
        }
        let parts: Vec<Group> = roots.iter().map(|r| self.groups.remove(r).unwrap()).collect();
        let all: Vec<usize> = parts.iter().flat_map(|g| g.qubits.iter().copied()).collect();
        let merged = if all.len() > self.n_max || parts.iter().any(|g| g.state.is_top()) {
            Group::top(all)
        } else {
            let mut tables = parts.into_iter().map(|g| match g.state {
                AbstractState::Known(t) => t,
                AbstractState::Top => unreachable!(),
            });
            let first = tables.next().unwrap();
            Group::known(tables.fold(first, |acc, t| acc.tensor(&t)))
        };
        let root = merged.qubits[0];
        self.insert(merged);
        root
    }

    fn split(&mut self, root: usize) {
        let Some(AbstractState::Known(t)) = self.groups.get(&root).map(|g| &g.state) else {
            return;
        };
        if t.qubits.len() < 2 {
            return;
        }
        let parts = try_split(t);
        if parts.len() > 1 {
            self.groups.remove(&root);
            for p in parts {
                self.insert(Group::known(p));
            }
        }
    }

    /// Merges the groups of `qubits` and forgets their state.
    pub fn make_top(&mut self, qubits: &[usize]) {
        let root = self.merge(qubits);
        self.groups.get_mut(&root).unwrap().state = AbstractState::Top;
    }

    pub fn apply_gate(&mut self, gate: &Gate) {
        let root = self.merge(&gate.qubits);
        let group = self.groups.get_mut(&root).unwrap();
        if let AbstractState::Known(t) = &mut group.state {
            let positions: Vec<usize> = gate.qubits.iter().map(|&q| t.position(q).unwrap()).collect();
            t.apply_matrix(&gate.kind.matrix_unchecked(), &positions);
        }
        self.split(root);
    }

    /// Returns the outcome when it is statically determined; otherwise the
    /// group becomes `Top`.
    pub fn apply_measure(&mut self, qubit: usize) -> Option<bool> {
        let root = self.owner[qubit];
        let group = self.groups.get_mut(&root).unwrap();
        match &group.state {
            AbstractState::Top => None,
            AbstractState::Known(t) => {
                let outcome = t.deterministic_bit(t.position(qubit).unwrap());
                if outcome.is_none() {
                    group.state = AbstractState::Top;
                }
                outcome
            }
        }
    }

    /// Takes `qubit` out of its group as a fresh `|0⟩`; the rest of the
    /// group stays `Top`.
    fn detach_as_zero(&mut self, qubit: usize) {
        let root = self.owner[qubit];
        let group = self.groups.remove(&root).unwrap();
        let rest: Vec<usize> = group.qubits.into_iter().filter(|&q| q != qubit).collect();
        if !rest.is_empty() {
            self.insert(Group::top(rest));
        }
        self.insert(Group::known(AmplitudeTable::zero(qubit)));
    }

    pub fn apply_reset(&mut self, qubit: usize, mode: ResetSoundness) {
        let root = self.owner[qubit];
        let AbstractState::Known(t) = &self.groups[&root].state else {
            self.detach_as_zero(qubit);
            return;
        };
        match reset_output(t, qubit, mode) {
            Some(next) => {
                self.groups.get_mut(&root).unwrap().state = AbstractState::Known(next);
                self.split(root);
            }
            None => self.detach_as_zero(qubit),
        }
    }

    /// Product of all group states as a dense statevector over `n` qubits
    /// (bit `q` = qubit `q`), or `None` if any group is `Top`.
    pub fn product_state(&self) -> Option<Vec<Complex64>> {
        let n = self.owner.len();
        let mut full = vec![ZERO; 1 << n];
        full[0] = Complex64::new(1.0, 0.0);
        let mut covered: Vec<usize> = Vec::new();
        for g in self.groups.values() {
            let t = g.state.known()?;
            let mut next = vec![ZERO; 1 << n];
            for (i, &a) in full.iter().enumerate() {
                if a == ZERO {
                    continue;
                }
                for (&b, &v) in &t.amps {
                    next[i | scatter(b, &t.qubits) as usize] += a * v;
                }
            }
            covered.extend(&t.qubits);
            full = next;
        }
        debug_assert_eq!(covered.len(), n);
        Some(full)
    }
}

/// Post-reset pure state of a known group, or `None` when the reset output
/// is mixed and the mode is strict.
pub fn reset_output(t: &AmplitudeTable, qubit: usize, mode: ResetSoundness) -> Option<AmplitudeTable> {
    let pos = t.position(qubit)?;
    let (zero, one) = t.branches(pos);
    let keep = if one.is_empty() {
        return Some(t.clone());
    } else if zero.is_empty() {
        one
    } else {
        if mode == ResetSoundness::Strict && !proportional(&zero, &one) {
            return None;
        }
        zero
    };
    let mut next = AmplitudeTable { qubits: t.qubits.clone(), amps: keep };
    next.prune();
    next.normalize();
    Some(next)
}

/// Whether `b` is a scalar multiple of `a` (both non-empty).
fn proportional(a: &BTreeMap<u64, Complex64>, b: &BTreeMap<u64, Complex64>) -> bool {
    residual_sqr(a, b, sparse_norm_sqr(a)).sqrt() <= PROPORTIONAL_TOL
}

/// `|small − (⟨big|small⟩/|big|²) big|²`, accumulated entrywise.
fn residual_sqr(big: &BTreeMap<u64, Complex64>, small: &BTreeMap<u64, Complex64>, big_n: f64) -> f64 {
    let overlap = sparse_inner(big, small) / big_n;
    let mut sum = 0.0;
    for (k, v) in small {
        sum += (v - overlap * big.get(k).copied().unwrap_or(ZERO)).norm_sqr();
    }
    for (k, v) in big {
        if !small.contains_key(k) {
            sum += (overlap * v).norm_sqr();
        }
    }
    sum
}

/// Analysis parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QcpConfig {
    pub n_max: usize,
    pub reset: ResetSoundness,
}

impl Default for QcpConfig {
    fn default() -> Self {
        QcpConfig { n_max: 4, reset: ResetSoundness::Strict }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SiteKind {
    Measure,
    Reset,
}

/// Analysis facts at one measurement or reset, taken before it executes.
#[derive(Debug, Clone, PartialEq)]
pub struct SiteRecord {
    pub index: usize,
    pub kind: SiteKind,
    pub qubit: usize,
    pub clbit: Option<usize>,
    /// Qubits of the target's group, ascending.
    pub group: Vec<usize>,
    /// Index of `qubit` within `group`.
    pub position: usize,
    pub state: AbstractState,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisResult {
    pub sites: Vec<SiteRecord>,
    pub final_table: UnionTable,
    /// Statically known clbit values at the end of the circuit.
    pub final_clbits: Vec<Option<bool>>,
}

impl AnalysisResult {
    pub fn site(&self, index: usize) -> Option<&SiteRecord> {
        self.sites.iter().find(|s| s.index == index)
    }
}

/// Abstract interpreter state, advanced one instruction at a time.
#[derive(Debug, Clone)]
pub struct Analyzer {
    table: UnionTable,
    clbits: Vec<Option<bool>>,
    config: QcpConfig,
}

impl Analyzer {
    pub fn new(n_qubits: usize, n_clbits: usize, config: QcpConfig) -> Self {
        Analyzer {
            table: UnionTable::new(n_qubits, config.n_max),
            clbits: vec![Some(false); n_clbits],
            config,
        }
    }

    pub fn table(&self) -> &UnionTable {
        &self.table
    }

    pub fn clbits(&self) -> &[Option<bool>] {
        &self.clbits
    }

    pub fn step(&mut self, inst: &Instruction) {
        match inst {
            Instruction::Gate(g) => self.table.apply_gate(g),
            Instruction::Measure { qubit, clbit } => {
                self.clbits[*clbit] = self.table.apply_measure(*qubit);
            }
            Instruction::Reset { qubit } => self.table.apply_reset(*qubit, self.config.reset),
            Instruction::CondGate { clbit, value, gate } => match self.clbits[*clbit] {
                Some(v) if v == *value => self.table.apply_gate(gate),
                Some(_) => {}
                None => self.table.make_top(&gate.qubits),
            },
            Instruction::ProbGate(pg) => {
                let live: Vec<_> = pg.branches.iter().filter(|b| b.prob > 0.0).collect();
                let same_ops = live.windows(2).all(|w| w[0].ops == w[1].ops);
                if same_ops {
                    if let Some(b) = live.first() {
                        for g in &b.ops {
                            self.table.apply_gate(g);
                        }
                    }
                } else {
                    let touched: Vec<usize> = {
                        let mut v: Vec<usize> =
                            live.iter().flat_map(|b| b.ops.iter().flat_map(|g| g.qubits.iter().copied())).collect();
                        v.sort_unstable();
                        v.dedup();
                        v
                    };
                    if !touched.is_empty() {
                        self.table.make_top(&touched);
                    }
                }
                let written: BTreeSet<usize> =
                    live.iter().flat_map(|b| b.clbit_writes.iter().map(|&(cb, _)| cb)).collect();
                for cb in written {
                    let value = |b: &&Branch| b.clbit_writes.iter().rev().find(|w| w.0 == cb).map(|w| w.1);
                    let first = value(&live[0]);
                    let agreed = live.iter().all(|b| value(b) == first);
                    self.clbits[cb] = if agreed { first } else { None };
                }
            }
        }
    }

    fn record(&self, index: usize, kind: SiteKind, qubit: usize, clbit: Option<usize>) -> SiteRecord {
        let group = self.table.group_of(qubit);
        SiteRecord {
            index,
            kind,
            qubit,
            clbit,
            group: group.qubits.clone(),
            position: group.qubits.iter().position(|&q| q == qubit).unwrap(),
            state: group.state.clone(),
        }
    }
}

/// Runs the analysis over `circuit`, recording the input state at every
/// measurement and reset.
pub fn run(circuit: &Circuit, config: QcpConfig) -> AnalysisResult {
    let mut an = Analyzer::new(circuit.n_qubits(), circuit.n_clbits(), config);
    let mut sites = Vec::new();
    for (index, inst) in circuit.instructions().iter().enumerate() {
        match inst {
            Instruction::Measure { qubit, clbit } => {
                sites.push(an.record(index, SiteKind::Measure, *qubit, Some(*clbit)))
            }
            Instruction::Reset { qubit } => sites.push(an.record(index, SiteKind::Reset, *qubit, None)),
            _ => {}
        }
        an.step(inst);
    }
    AnalysisResult { sites, final_table: an.table, final_clbits: an.clbits }
}

/// JSON view of one group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupReport {
    pub qubits: Vec<usize>,
    pub top: bool,
    pub size: Option<usize>,
    pub amplitudes: Vec<AmplitudeEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeEntry {
    pub basis: String,
    pub re: f64,
    pub im: f64,
}

impl GroupReport {
    pub fn new(qubits: &[usize], state: &AbstractState) -> Self {
        match state {
            AbstractState::Top => GroupReport {
                qubits: qubits.to_vec(),
                top: true,
                size: None,
                amplitudes: Vec::new(),
            },
            AbstractState::Known(t) => GroupReport {
                qubits: qubits.to_vec(),
                top: false,
                size: Some(t.size()),
                amplitudes: t
                    .amps
                    .iter()
                    .map(|(&b, a)| AmplitudeEntry { basis: t.basis_string(b), re: a.re, im: a.im })
                    .collect(),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SiteReport {
    pub index: usize,
    pub kind: SiteKind,
    pub qubit: usize,
    pub clbit: Option<usize>,
    pub position: usize,
    pub group: GroupReport,
}

/// Serializable summary of an [`AnalysisResult`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub n_max: usize,
    pub sites: Vec<SiteReport>,
    pub final_groups: Vec<GroupReport>,
    pub final_clbits: Vec<Option<bool>>,
}

impl AnalysisResult {
    pub fn report(&self) -> AnalysisReport {
        AnalysisReport {
            n_max: self.final_table.n_max,
            sites: self
                .sites
                .iter()
                .map(|s| SiteReport {
                    index: s.index,
                    kind: s.kind,
                    qubit: s.qubit,
                    clbit: s.clbit,
                    position: s.position,
                    group: GroupReport::new(&s.group, &s.state),
                })
                .collect(),
            final_groups: self
                .final_table
                .groups()
                .map(|g| GroupReport::new(&g.qubits, &g.state))
                .collect(),
            final_clbits: self.final_clbits.clone(),
        }
    }
}
