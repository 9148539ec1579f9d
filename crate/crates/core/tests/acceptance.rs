//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

mod common;

use std::time::{Duration, Instant};

use common::{fidelity, phase_distance, random_state};
use dyncirc::bench::sweep_suite;
use dyncirc::circuit::compile_shot;
use dyncirc::demo::{bernstein_vazirani, four_branch_circuit, measure_reset_example};
use dyncirc::pcm::{baseline_combined, run_pass, PassConfig};
use dyncirc::qcp::{self, try_split, AbstractState, AmplitudeTable, QcpConfig, ResetSoundness};
use dyncirc::randgen::{generate, generate_suite, GenConfig};
use dyncirc::sim::{
    conditional_state_distance, derive_seed, distribution, simulate_static, simulate_static_from, tvd, StateVector,
};
use dyncirc::synth::{state_prep, transform, TargetState, GATE_COUNT_FACTOR};
use dyncirc::{Circuit, Gate, Instruction};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(limit: Duration, elapsed: Duration, what: &str) -> Result<(), String> {
    check(elapsed < limit, || format!("{what} took {elapsed:?}, limit {limit:?}"))
}

fn gate_at(c: &Circuit, i: usize) -> Option<&Gate> {
    match c.instructions().get(i) {
        Some(Instruction::Gate(g)) => Some(g),
        _ => None,
    }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let c = measure_reset_example();
    let (out, r) = run_pass(&c, &PassConfig::default().with_n_pcm(2).with_n_max(3));
    let elapsed = start.elapsed();
    check(r.removed_measurements == 1 && r.removed_resets == 1, || format!("removed {r:?}"))?;
    check(out.count_ops().dynamic() == 0, || "dynamic ops remain".into())?;

    // H H ProbGate{X: 0.5} on the top wire, then the conditional Y, then H on the bottom wire
    check(gate_at(&out, 2) == Some(&Gate::h(0)), || format!("expected H q[0] at 2: {:?}", out.instructions()[2]))?;
    let Some(Instruction::ProbGate(pg)) = out.instructions().get(3) else {
        return Err("expected a probabilistic gate after the inserted H".into());
    };
    let x_branch = pg.branches.iter().find(|b| b.ops == vec![Gate::x(0)]);
    let id_branch = pg.branches.iter().find(|b| b.ops.is_empty());
    check(pg.branches.len() == 2 && x_branch.is_some() && id_branch.is_some(), || format!("branches {pg:?}"))?;
    check((x_branch.unwrap().prob - 0.5).abs() < 1e-12, || "X branch probability".into())?;
    check(x_branch.unwrap().clbit_writes == vec![(0, true)], || "X branch write".into())?;
    check(matches!(out.instructions()[4], Instruction::CondGate { .. }), || "conditional Y kept".into())?;
    check(gate_at(&out, 5) == Some(&Gate::h(2)), || "expected H q[2] in place of the reset".into())?;

    let d = tvd(&distribution(&c).map_err(|e| e.to_string())?, &distribution(&out).map_err(|e| e.to_string())?);
    let s = conditional_state_distance(&c, &out).map_err(|e| e.to_string())?;
    check(d <= 1e-9, || format!("tvd {d:e}"))?;
    check(s <= 1e-9, || format!("branch state distance {s:e}"))?;
    within(Duration::from_secs(1), elapsed, "pass")?;
    Ok(format!("1 meas + 1 reset removed, tvd {d:.1e}, branch state dist {s:.1e}, {elapsed:?}"))
}

fn bv_check(secret: &[bool]) -> Result<Duration, String> {
    let c = bernstein_vazirani(secret);
    let start = Instant::now();
    let (out, r) = run_pass(&c, &PassConfig::default().with_n_pcm(1));
    let elapsed = start.elapsed();
    let n = secret.len();
    check(r.removed_measurements == n && r.removed_resets == n, || {
        format!("secret {secret:?}: removed {}/{}", r.removed_measurements, r.removed_resets)
    })?;
    check(out.count_ops().dynamic() == 0, || "dynamic ops remain".into())?;

    // static skeleton: H Z on the ancilla, then H [CX] H [X] per bit, then H on the ancilla
    let mut want = vec![Gate::h(1), Gate::z(1)];
    for &bit in secret {
        want.push(Gate::h(0));
        if bit {
            want.push(Gate::cx(0, 1));
        }
        want.push(Gate::h(0));
        if bit {
            want.push(Gate::x(0));
        }
    }
    want.push(Gate::h(1));
    let got: Vec<Gate> = out
        .instructions()
        .iter()
        .filter_map(|i| match i {
            Instruction::Gate(g) => Some(g.clone()),
            _ => None,
        })
        .collect();
    check(got == want, || format!("secret {secret:?}: gate pattern {got:?}"))?;

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let shot = compile_shot(&out, &mut rng).map_err(|e| e.to_string())?;
    let presets: Vec<bool> = (0..n).map(|i| shot.presets().get(&i).copied().unwrap_or(false)).collect();
    check(presets == secret, || format!("presets {presets:?} for secret {secret:?}"))?;
    let key: String = secret.iter().map(|&b| if b { '1' } else { '0' }).collect();
    let p = distribution(&out).map_err(|e| e.to_string())?.get(&key);
    check((p - 1.0).abs() < 1e-9, || format!("optimized circuit gives the secret with p={p}"))?;
    within(Duration::from_secs(1), elapsed, "pass")?;
    Ok(elapsed)
}

fn criterion_2() -> Outcome {
    let mut worst = bv_check(&[true; 6])?;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..20 {
        let len = rng.random_range(1..=10);
        let secret: Vec<bool> = (0..len).map(|_| rng.random_bool(0.5)).collect();
        worst = worst.max(bv_check(&secret)?);
    }
    Ok(format!("111111 plus 20 random secrets: all resets and measurements removed, slowest {worst:?}"))
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let (mut worst, mut fired, mut sites) = (0.0f64, 0, 0);
    for i in 0..200u64 {
        let n = 4 + (i % 3) as usize;
        let depth = 10 + (derive_seed(31, i) % 31) as usize;
        let cfg = GenConfig::explicit(n, depth, derive_seed(17, i)).with_densities(0.1, 0.5, 0.05);
        let c = generate(&cfg).map_err(|e| e.to_string())?;
        let before = distribution(&c).map_err(|e| e.to_string())?;
        for pass in [PassConfig::default().with_n_pcm(1), PassConfig::default().with_n_pcm(1 << n).with_n_max(n)] {
            let pass = pass.with_reset_soundness(ResetSoundness::Strict);
            let (out, r) = run_pass(&c, &pass);
            fired += r.removed();
            sites += r.decisions.len();
            let d = tvd(&before, &distribution(&out).map_err(|e| e.to_string())?);
            worst = worst.max(d);
            check(d <= 1e-9, || format!("circuit {i} (n_pcm {}): tvd {d:e}", pass.n_pcm))?;
        }
    }
    let elapsed = start.elapsed();
    check(fired > 0, || "no site fired; the suite exercises nothing".into())?;
    within(Duration::from_secs(300), elapsed, "suite")?;
    Ok(format!("200 circuits x 2 budgets, {fired}/{sites} sites replaced, worst tvd {worst:.1e}, {elapsed:?}"))
}

fn criterion_4() -> Outcome {
    let mut worst = 0.0f64;
    for i in 0..500u64 {
        let n = 1 + (i % 4) as usize;
        let depth = 1 + (derive_seed(41, i) % 30) as usize;
        let cfg = GenConfig::explicit(n, depth, derive_seed(43, i)).with_densities(0.0, 0.0, 0.0);
        let c = generate(&cfg).map_err(|e| e.to_string())?;
        let analysis = qcp::run(&c, QcpConfig { n_max: 4, reset: ResetSoundness::Strict });
        let got = analysis.final_table.product_state().ok_or_else(|| format!("circuit {i}: Top"))?;
        let want = simulate_static(&c).map_err(|e| e.to_string())?;
        let d = phase_distance(want.amplitudes(), &got);
        worst = worst.max(d);
        check(d <= 1e-9, || format!("circuit {i}: distance {d:e}"))?;
    }

    // uniform three-qubit table splits into three |+> groups
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let uniform = AmplitudeTable::from_dense(vec![0, 1, 2], &[Complex64::new(0.5 * h, 0.0); 8]);
    let parts = try_split(&uniform);
    check(parts.len() == 3, || format!("uniform table split into {} groups", parts.len()))?;
    for p in &parts {
        let d = p.to_dense();
        check(d.iter().all(|a| (a - h).norm() < 1e-12), || format!("group {:?} = {d:?}", p.qubits()))?;
    }

    // state before the measurement/reset example's dynamic ops is |+0+>
    let analysis = qcp::run(&measure_reset_example(), QcpConfig { n_max: 3, reset: ResetSoundness::Strict });
    let plus = vec![Complex64::new(h, 0.0); 2];
    for (site, qubit) in analysis.sites.iter().zip([0usize, 2]) {
        let AbstractState::Known(t) = &site.state else {
            return Err(format!("site {} is Top", site.index));
        };
        check(site.group == vec![qubit] && t.to_dense() == plus, || format!("site {} state {t:?}", site.index))?;
    }
    // reset propagation: qubit 2 is |0> right after its reset
    let mut prefix = Circuit::new(3, 1);
    for inst in &measure_reset_example().instructions()[..5] {
        prefix.push(inst.clone()).map_err(|e| e.to_string())?;
    }
    let after = qcp::run(&prefix, QcpConfig { n_max: 3, reset: ResetSoundness::Strict });
    let AbstractState::Known(t) = after.final_table.group_of(2).state() else {
        return Err("reset qubit is Top".into());
    };
    check(t.to_dense() == vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)], || format!("{t:?}"))?;
    Ok(format!("500 static circuits, worst distance {worst:.1e}; split and reset cases exact"))
}

fn bench_suite() -> Result<Vec<Circuit>, String> {
    generate_suite(&GenConfig::scale(1, 2024), 10).map_err(|e| e.to_string())
}

fn criterion_5(suite: &[Circuit]) -> Outcome {
    let base = PassConfig::default();
    let budgets = [1, 2, 4, 8, 16];
    let rows: Vec<_> = sweep_suite(suite, 1, &budgets, &base).into_iter().filter(|r| r.circuit.is_none()).collect();
    let removed: Vec<usize> = rows.iter().map(|r| r.removed()).collect();
    let gates: Vec<i64> = rows.iter().map(|r| r.introduced_gates).collect();
    check(removed.windows(2).all(|w| w[0] <= w[1]), || format!("removals {removed:?}"))?;
    check(gates.windows(2).all(|w| w[0] <= w[1]), || format!("introduced gates {gates:?}"))?;
    let cap = 1 << base.n_max;
    let total = |n_pcm: usize| -> usize {
        suite.iter().map(|c| run_pass(c, &base.with_n_pcm(n_pcm)).1.removed()).sum()
    };
    let (at_cap, beyond) = (total(cap), total(4 * cap));
    check(at_cap == beyond, || format!("removals at {cap}: {at_cap}, at {}: {beyond}", 4 * cap))?;
    Ok(format!("removals {removed:?}, introduced gates {gates:?}, saturation {at_cap} = {beyond}"))
}

fn criterion_6(suite: &[Circuit]) -> Outcome {
    let pcm: usize = suite.iter().map(|c| run_pass(c, &PassConfig::default().with_n_pcm(1)).1.removed()).sum();
    let baseline: usize = suite.iter().map(|c| baseline_combined(c).1).sum();
    let dynamic: usize = suite.iter().map(|c| c.count_ops().dynamic()).sum();
    let ratio = if baseline == 0 { "unbounded (baseline 0)".to_string() } else { format!("{:.2}x", pcm as f64 / baseline as f64) };
    check(pcm >= baseline, || format!("pcm {pcm} < baselines {baseline}"))?;
    Ok(format!("pcm removed {pcm}, baselines removed {baseline} of {dynamic} dynamic ops, ratio {ratio}"))
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let (mut worst_prep, mut worst_transform) = (1.0f64, 1.0f64);
    for n in 1..=6 {
        for i in 0..200 {
            let sparse = i % 2 == 1;
            let amps = random_state(&mut rng, n, sparse);
            let psi = TargetState::new(amps.clone()).map_err(|e| e.to_string())?;
            let c = state_prep(&psi).map_err(|e| e.to_string())?;
            check(c.len() <= GATE_COUNT_FACTOR << n, || format!("n={n}: {} gates", c.len()))?;
            let f = fidelity(simulate_static(&c).map_err(|e| e.to_string())?.amplitudes(), &amps);
            worst_prep = worst_prep.min(f);
            check(f >= 1.0 - 1e-10, || format!("n={n}: prep fidelity {f}"))?;

            let target = random_state(&mut rng, n, !sparse);
            let phi = TargetState::new(target.clone()).map_err(|e| e.to_string())?;
            let t = transform(&psi, &phi).map_err(|e| e.to_string())?;
            let out = simulate_static_from(&t, StateVector::from_amplitudes(amps)).map_err(|e| e.to_string())?;
            let f = fidelity(out.amplitudes(), &target);
            worst_transform = worst_transform.min(f);
            check(f >= 1.0 - 1e-9, || format!("n={n}: transform fidelity {f}"))?;
        }
    }
    Ok(format!(
        "1200 states, worst prep infidelity {:.1e}, worst transform infidelity {:.1e}, gates <= {GATE_COUNT_FACTOR}*2^n",
        1.0 - worst_prep,
        1.0 - worst_transform
    ))
}

fn criterion_8() -> Outcome {
    let c = four_branch_circuit();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let shots = 100_000;
    let mut counts = [0usize; 4];
    for _ in 0..shots {
        let shot = compile_shot(&c, &mut rng).map_err(|e| e.to_string())?;
        counts[shot.choices[0]] += 1;
    }
    let freqs: Vec<f64> = counts.iter().map(|&k| k as f64 / shots as f64).collect();
    for (f, p) in freqs.iter().zip([0.1, 0.2, 0.3, 0.4]) {
        check((f - p).abs() <= 0.01, || format!("frequencies {freqs:?}"))?;
    }
    Ok(format!("frequencies {:.4?} over {shots} shots", freqs))
}

fn main() {
    let suite = bench_suite();
    let with_suite = |f: fn(&[Circuit]) -> Outcome| -> Outcome { f(suite.as_ref().map_err(|e| e.clone())?) };
    let criteria: Vec<Criterion> = vec![
        ("measure/reset example", Box::new(criterion_1)),
        ("Bernstein-Vazirani with reuse", Box::new(criterion_2)),
        ("semantic preservation", Box::new(criterion_3)),
        ("constant propagation soundness", Box::new(criterion_4)),
        ("monotonicity and saturation", Box::new(move || with_suite(criterion_5))),
        ("baseline dominance", Box::new(move || with_suite(criterion_6))),
        ("synthesis quality", Box::new(criterion_7)),
        ("probabilistic shot statistics", Box::new(criterion_8)),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {} ({name}): PASS: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} ({name}): FAIL: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
