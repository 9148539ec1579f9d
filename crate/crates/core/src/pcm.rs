//! Measurement and reset elimination driven by constant propagation.
//!
//! The analysis runs once over the input. Every measurement whose group
//! state is known with at most `n_pcm` non-zero amplitudes becomes a state
//! transformation to `|0…0⟩` followed by a probabilistic gate that re-creates
//! each basis outcome and presets the clbit. Every eligible reset becomes the
//! static transformation from its input state to its output state.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::circuit::{parallel_x, Branch, Circuit, Instruction, ProbabilisticGate};
use crate::gate::Gate;
use crate::qcp::{self, AbstractState, AmplitudeTable, QcpConfig, ResetSoundness, SiteKind, SiteRecord};
use crate::synth::{self, SynthError, TargetState, DEFAULT_SYNTH_CAP};

/// When a multi-qubit measurement replacement may fire.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Any known state within the budget.
    Faithful,
    /// Only when the collapse of the other group qubits is unobservable.
    #[default]
    Conservative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PassConfig {
    pub n_pcm: usize,
    pub n_max: usize,
    pub mode: Mode,
    pub reset_soundness: ResetSoundness,
    pub seed: u64,
}

impl Default for PassConfig {
    fn default() -> Self {
        PassConfig {
            n_pcm: 2,
            n_max: 4,
            mode: Mode::Conservative,
            reset_soundness: ResetSoundness::Strict,
            seed: 0,
        }
    }
}

impl PassConfig {
    pub fn with_n_pcm(mut self, n_pcm: usize) -> Self {
        self.n_pcm = n_pcm;
        self
    }

    pub fn with_n_max(mut self, n_max: usize) -> Self {
        self.n_max = n_max;
        self
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_reset_soundness(mut self, r: ResetSoundness) -> Self {
        self.reset_soundness = r;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SkipReason {
    /// Group state unknown.
    Top,
    /// Group state has more than `n_pcm` non-zero amplitudes.
    StateTooLarge,
    /// Other group qubits are used coherently after the measurement.
    Coherence,
    /// Reset output is not a pure state.
    MixedReset,
    /// An earlier replacement already collapsed part of this group.
    StaleState,
    /// Group wider than the synthesis cap.
    SynthesisCap,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SiteDecision {
    pub index: usize,
    pub kind: SiteKind,
    pub qubit: usize,
    pub fired: bool,
    pub reason: Option<SkipReason>,
    pub state_size: Option<usize>,
    pub group_size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PassReport {
    pub removed_measurements: usize,
    pub removed_resets: usize,
    /// Static gate count after minus before.
    pub introduced_static_gates: i64,
    /// Seconds spent building transformation circuits.
    pub synthesis_time: f64,
    pub decisions: Vec<SiteDecision>,
}

impl PassReport {
    pub fn removed(&self) -> usize {
        self.removed_measurements + self.removed_resets
    }
}

/// Runs the pass. Ineligible sites are left in place and reported.
pub fn run_pass(c: &Circuit, cfg: &PassConfig) -> (Circuit, PassReport) {
    assert!(cfg.n_pcm >= 1 && cfg.n_max >= 1, "n_pcm and n_max must be positive");
    let analysis = qcp::run(c, QcpConfig { n_max: cfg.n_max, reset: cfg.reset_soundness });
    let mut replacements: Vec<Option<Vec<Instruction>>> = vec![None; c.len()];
    let mut decisions = Vec::with_capacity(analysis.sites.len());
    let mut synth_secs = 0.0;
    // (index, group) of fired multi-qubit measurement replacements
    let mut collapsed: Vec<(usize, &[usize])> = Vec::new();

    let measures = analysis.sites.iter().filter(|s| s.kind == SiteKind::Measure);
    let resets = analysis.sites.iter().filter(|s| s.kind == SiteKind::Reset);
    for site in measures.chain(resets) {
        let mut decision = SiteDecision {
            index: site.index,
            kind: site.kind,
            qubit: site.qubit,
            fired: false,
            reason: None,
            state_size: site.state.known().map(qcp::state_size),
            group_size: site.group.len(),
        };
        let outcome = decide(c, site, cfg, &collapsed).and_then(|table| {
            let start = Instant::now();
            let r = match site.kind {
                SiteKind::Measure => replace_measurement(table, site.position, site.clbit.expect("measure clbit")),
                SiteKind::Reset => replace_reset(table, site.position, cfg.reset_soundness),
            };
            synth_secs += start.elapsed().as_secs_f64();
            r
        });
        match outcome {
            Ok(ops) => {
                decision.fired = true;
                if site.kind == SiteKind::Measure && site.group.len() > 1 {
                    collapsed.push((site.index, &site.group));
                }
                log::debug!("site {} ({:?} q{}) replaced by {} ops", site.index, site.kind, site.qubit, ops.len());
                replacements[site.index] = Some(ops);
            }
            Err(reason) => decision.reason = Some(reason),
        }
        decisions.push(decision);
    }
    decisions.sort_by_key(|d| d.index);

    let mut out = Vec::with_capacity(c.len());
    for (inst, rep) in c.instructions().iter().zip(replacements) {
        match rep {
            Some(ops) => out.extend(ops),
            None => out.push(inst.clone()),
        }
    }
    let out = Circuit::from_instructions(c.n_qubits(), c.n_clbits(), out).expect("replacements stay on the input wires");

    let fired = |k: SiteKind| decisions.iter().filter(|d| d.fired && d.kind == k).count();
    let report = PassReport {
        removed_measurements: fired(SiteKind::Measure),
        removed_resets: fired(SiteKind::Reset),
        introduced_static_gates: out.count_ops().static_gates as i64 - c.count_ops().static_gates as i64,
        synthesis_time: synth_secs,
        decisions,
    };
    (out, report)
}

fn decide<'a>(
    c: &Circuit,
    site: &'a SiteRecord,
    cfg: &PassConfig,
    collapsed: &[(usize, &[usize])],
) -> Result<&'a AmplitudeTable, SkipReason> {
    let table = match &site.state {
        AbstractState::Top => return Err(SkipReason::Top),
        AbstractState::Known(t) => t,
    };
    if qcp::state_size(table) > cfg.n_pcm {
        return Err(SkipReason::StateTooLarge);
    }
    if site.group.len() > DEFAULT_SYNTH_CAP {
        return Err(SkipReason::SynthesisCap);
    }
    let stale = collapsed
        .iter()
        .any(|(i, g)| *i < site.index && g.iter().any(|q| site.group.contains(q)));
    if stale {
        return Err(SkipReason::StaleState);
    }
    if site.kind == SiteKind::Measure
        && cfg.mode == Mode::Conservative
        && site.group.len() > 1
        && !others_measured_next(c, site)
    {
        return Err(SkipReason::Coherence);
    }
    Ok(table)
}

/// Whether every other group qubit's next instruction after the site is a
/// measurement or reset of that qubit.
fn others_measured_next(c: &Circuit, site: &SiteRecord) -> bool {
    let rest = &c.instructions()[site.index + 1..];
    site.group.iter().filter(|&&q| q != site.qubit).all(|&q| {
        matches!(
            rest.iter().find(|inst| inst.qubits().contains(&q)),
            Some(Instruction::Measure { .. } | Instruction::Reset { .. })
        )
    })
}

fn synth_err(e: SynthError) -> SkipReason {
    match e {
        SynthError::SynthesisCapExceeded { .. } => SkipReason::SynthesisCap,
        other => panic!("synthesis failed on an analysis state: {other}"),
    }
}

fn on_group(circuit: Circuit, group: &[usize]) -> impl Iterator<Item = Instruction> + '_ {
    circuit.into_instructions().into_iter().map(move |inst| match inst {
        Instruction::Gate(g) => Instruction::Gate(g.remap(group)),
        other => other,
    })
}

/// Replacement for measuring the qubit at `position` of `table` into `clbit`.
pub fn replace_measurement(
    table: &AmplitudeTable,
    position: usize,
    clbit: usize,
) -> Result<Vec<Instruction>, SkipReason> {
    let group = table.qubits();
    let k = group.len();
    let amps = table.amplitudes();
    if amps.len() == 1 {
        let (&basis, _) = amps.iter().next().expect("non-empty table");
        let branch = Branch::new(Vec::new(), 1.0).with_writes(vec![(clbit, basis >> position & 1 == 1)]);
        let pg = ProbabilisticGate::new(group.to_vec(), vec![branch]).expect("single certain branch");
        return Ok(vec![Instruction::ProbGate(pg)]);
    }
    let psi = TargetState::from_table(table);
    let to_zero = synth::transform(&psi, &TargetState::basis(k, 0)).map_err(synth_err)?;
    let mut ops: Vec<Instruction> = on_group(to_zero, group).collect();
    let branches = amps
        .iter()
        .map(|(&s, a)| {
            let mask: Vec<bool> = (0..k).map(|p| s >> p & 1 == 1).collect();
            let flips: Vec<Gate> = parallel_x(&mask).iter().map(|g| g.remap(group)).collect();
            Branch::new(flips, a.norm_sqr()).with_writes(vec![(clbit, s >> position & 1 == 1)])
        })
        .collect();
    let pg = ProbabilisticGate::new(group.to_vec(), branches).expect("normalized table gives a distribution");
    ops.push(Instruction::ProbGate(pg));
    Ok(ops)
}

/// Static replacement for resetting the qubit at `position` of `table`.
pub fn replace_reset(
    table: &AmplitudeTable,
    position: usize,
    mode: ResetSoundness,
) -> Result<Vec<Instruction>, SkipReason> {
    let qubit = table.qubits()[position];
    let phi = qcp::reset_output(table, qubit, mode).ok_or(SkipReason::MixedReset)?;
    let t = synth::transform(&TargetState::from_table(table), &TargetState::from_table(&phi)).map_err(synth_err)?;
    Ok(on_group(t, table.qubits()).collect())
}

/// Deletes resets on wires that are syntactically still `|0⟩`: untouched so
/// far, or touched only by resets and measurements since starting at or
/// returning to `|0⟩`.
pub fn baseline_remove_reset_in_zero(c: &Circuit) -> (Circuit, usize) {
    let mut zero = vec![true; c.n_qubits()];
    let mut out = Vec::with_capacity(c.len());
    let mut count = 0;
    for inst in c.instructions() {
        match inst {
            Instruction::Reset { qubit } => {
                if zero[*qubit] {
                    count += 1;
                    continue;
                }
                zero[*qubit] = true;
            }
            Instruction::Measure { .. } => {}
            other => {
                for &q in other.qubits() {
                    zero[q] = false;
                }
            }
        }
        out.push(inst.clone());
    }
    (rebuild(c, out), count)
}

/// Replaces a reset that directly follows a measurement of the same qubit
/// with an X conditioned on the measured clbit.
pub fn baseline_reset_after_measure(c: &Circuit) -> (Circuit, usize) {
    let mut last: Vec<Option<usize>> = vec![None; c.n_qubits()];
    let mut out = Vec::with_capacity(c.len());
    let mut count = 0;
    for inst in c.instructions() {
        let written = match inst {
            Instruction::Measure { clbit, .. } => vec![*clbit],
            Instruction::ProbGate(pg) => pg.branches[0].clbit_writes.iter().map(|w| w.0).collect(),
            _ => Vec::new(),
        };
        for slot in last.iter_mut() {
            if slot.is_some_and(|cb| written.contains(&cb)) {
                *slot = None;
            }
        }
        match inst {
            Instruction::Measure { qubit, clbit } => last[*qubit] = Some(*clbit),
            Instruction::Reset { qubit } => {
                if let Some(clbit) = last[*qubit].take() {
                    count += 1;
                    out.push(Instruction::CondGate { clbit, value: true, gate: Gate::x(*qubit) });
                    continue;
                }
            }
            other => {
                for &q in other.qubits() {
                    last[q] = None;
                }
            }
        }
        out.push(inst.clone());
    }
    (rebuild(c, out), count)
}

/// Both baselines in sequence; returns the total number of resets removed.
pub fn baseline_combined(c: &Circuit) -> (Circuit, usize) {
    let (a, n1) = baseline_remove_reset_in_zero(c);
    let (b, n2) = baseline_reset_after_measure(&a);
    (b, n1 + n2)
}

fn rebuild(c: &Circuit, instructions: Vec<Instruction>) -> Circuit {
    Circuit::from_instructions(c.n_qubits(), c.n_clbits(), instructions).expect("same wires as input")
}
