use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::error::ErrorKind;
use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use dyncirc::bench::{run_bench, BenchError, BenchRow};
use dyncirc::circuit::compile_shot;
use dyncirc::demo::bernstein_vazirani;
use dyncirc::pcm::{run_pass, Mode, PassConfig, PassReport};
use dyncirc::qasm::{from_json, parse, serialize, to_json};
use dyncirc::qcp::{self, QcpConfig, ResetSoundness};
use dyncirc::randgen::{generate_suite, GenConfig};
use dyncirc::sim::{bits_to_string, derive_seed, distribution, sample};
use dyncirc::Circuit;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Measurement and reset elimination for dynamic quantum circuits.
#[derive(Parser, Debug)]
#[command(name = "dyncirc", version)]
struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Replace measurements and resets with static or probabilistic gates.
    Optimize(OptimizeArgs),
    /// Dump the constant-propagation facts at every measurement and reset.
    Analyze(AnalyzeArgs),
    /// Exact or sampled classical outcome distribution.
    Simulate(SimulateArgs),
    /// Generate random dynamic circuits plus a manifest.
    Gen(GenArgs),
    /// Run the pass and the baselines over generated suites.
    Bench(BenchArgs),
    /// Optimize the Bernstein-Vazirani circuit with one reused qubit.
    DemoBv(DemoArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ModeArg {
    Faithful,
    Conservative,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ResetArg {
    Strict,
    #[value(name = "paper", alias = "literal")]
    Literal,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
enum CircuitFormat {
    Dqasm,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
enum ReportFormat {
    Json,
    Csv,
}

#[derive(Args, Debug)]
struct PassArgs {
    /// Largest group state (nonzero amplitudes) the pass will synthesize.
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..))]
    n_pcm: u64,
    /// Largest group the analysis tracks before giving up on it.
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u64).range(1..=20))]
    n_max: u64,
    #[arg(long, value_enum, default_value_t = ModeArg::Conservative)]
    mode: ModeArg,
    #[command(flatten)]
    reset: ResetFlags,
}

#[derive(Args, Debug)]
struct ResetFlags {
    #[arg(long, value_enum, default_value_t = ResetArg::Strict)]
    reset_soundness: ResetArg,
    /// Same as `--reset-soundness paper`.
    #[arg(long, conflicts_with = "reset_soundness")]
    paper_faithful_reset: bool,
}

impl ResetFlags {
    fn soundness(&self) -> ResetSoundness {
        match (self.paper_faithful_reset, self.reset_soundness) {
            (true, _) | (false, ResetArg::Literal) => ResetSoundness::Literal,
            (false, ResetArg::Strict) => ResetSoundness::Strict,
        }
    }
}

impl PassArgs {
    fn config(&self, seed: u64) -> PassConfig {
        PassConfig {
            n_pcm: self.n_pcm as usize,
            n_max: self.n_max as usize,
            mode: match self.mode {
                ModeArg::Faithful => Mode::Faithful,
                ModeArg::Conservative => Mode::Conservative,
            },
            reset_soundness: self.reset.soundness(),
            seed,
        }
    }
}

#[derive(Args, Debug)]
struct OptimizeArgs {
    /// Input circuit (`.dqasm`, or IR JSON when the name ends in `.json`; `-` for stdin).
    input: PathBuf,
    #[command(flatten)]
    pass: PassArgs,
    /// Output circuit format; inferred from `-o` when omitted.
    #[arg(long, value_enum)]
    format: Option<CircuitFormat>,
    /// Emit the pass report in this format.
    #[arg(long, value_enum)]
    report: Option<ReportFormat>,
    /// Where the report goes (stderr when omitted).
    #[arg(long, requires = "report")]
    report_out: Option<PathBuf>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    input: PathBuf,
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u64).range(1..=20))]
    n_max: u64,
    #[command(flatten)]
    reset: ResetFlags,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("method").required(true).args(["shots", "enumerate"])))]
struct SimulateArgs {
    input: PathBuf,
    /// Sample this many seeded shots.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    shots: Option<u64>,
    /// Exact distribution by branch enumeration.
    #[arg(long)]
    enumerate: bool,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct GenArgs {
    /// Size preset: 10·scale qubits, depth 200·scale.
    #[arg(long, conflicts_with_all = ["qubits", "depth"], value_parser = clap::value_parser!(u64).range(1..))]
    scale: Option<u64>,
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u64).range(1..))]
    qubits: u64,
    #[arg(long, default_value_t = 40, value_parser = clap::value_parser!(u64).range(1..))]
    depth: u64,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    count: u64,
    #[arg(long, default_value_t = 0.05)]
    meas_density: f64,
    #[arg(long, default_value_t = 0.5)]
    cond_density: f64,
    #[arg(long, default_value_t = 0.03)]
    reset_density: f64,
    /// Output directory for the circuits and `manifest.json`.
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_value = "1", value_parser = clap::value_parser!(u64).range(1..))]
    scales: Vec<u64>,
    #[arg(long, value_delimiter = ',', default_value = "1,2,4,8,16", value_parser = clap::value_parser!(u64).range(1..))]
    n_pcm: Vec<u64>,
    /// Circuits per scale.
    #[arg(long, default_value_t = 10)]
    count: u64,
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u64).range(1..=20))]
    n_max: u64,
    #[arg(long, value_enum, default_value_t = ModeArg::Conservative)]
    mode: ModeArg,
    #[command(flatten)]
    reset: ResetFlags,
    #[arg(long, value_enum, default_value_t = ReportFormat::Csv)]
    format: ReportFormat,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct DemoArgs {
    /// Secret bitstring, first bit leftmost.
    #[arg(value_parser = parse_secret)]
    secret: Secret,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    n_pcm: u64,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Debug)]
struct Secret(Vec<bool>);

fn parse_secret(s: &str) -> Result<Secret, String> {
    if s.is_empty() {
        return Err("secret must have at least one bit".into());
    }
    s.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(format!("'{c}' is not a bit")),
        })
        .collect::<Result<_, _>>()
        .map(Secret)
}

enum Failure {
    Usage(String),
    Processing(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Processing(e)
    }
}

fn read_circuit(path: &Path) -> anyhow::Result<Circuit> {
    let text = if path == Path::new("-") {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).context("reading stdin")?;
        s
    } else {
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?
    };
    if path.extension().is_some_and(|e| e == "json") {
        from_json(&text).with_context(|| format!("{}", path.display()))
    } else {
        parse(&text).with_context(|| format!("parsing {}", path.display()))
    }
}

fn write_to(path: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => io::stdout().write_all(text.as_bytes()).context("writing stdout"),
    }
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

fn csv_rows<T: Serialize>(rows: &[T]) -> anyhow::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn pass_report_text(report: &PassReport, format: ReportFormat) -> anyhow::Result<String> {
    match format {
        ReportFormat::Json => Ok(json(report)),
        ReportFormat::Csv => csv_rows(&report.decisions),
    }
}

fn optimize(args: &OptimizeArgs, seed: u64) -> anyhow::Result<()> {
    let c = read_circuit(&args.input)?;
    let (out, report) = run_pass(&c, &args.pass.config(seed));
    log::info!("removed {} measurements, {} resets", report.removed_measurements, report.removed_resets);
    let inferred = match args.output.as_deref().and_then(Path::extension) {
        Some(e) if e == "json" => CircuitFormat::Json,
        _ => CircuitFormat::Dqasm,
    };
    let text = match args.format.unwrap_or(inferred) {
        CircuitFormat::Dqasm => serialize(&out),
        CircuitFormat::Json => to_json(&out) + "\n",
    };
    write_to(args.output.as_deref(), &text)?;
    if let Some(format) = args.report {
        let r = pass_report_text(&report, format)?;
        match &args.report_out {
            Some(p) => write_to(Some(p), &r)?,
            None => io::stderr().write_all(r.as_bytes())?,
        }
    }
    Ok(())
}

fn analyze(args: &AnalyzeArgs) -> anyhow::Result<()> {
    let c = read_circuit(&args.input)?;
    let result = qcp::run(&c, QcpConfig { n_max: args.n_max as usize, reset: args.reset.soundness() });
    write_to(args.output.as_deref(), &json(&result.report()))
}

fn simulate(args: &SimulateArgs, seed: u64) -> anyhow::Result<()> {
    let c = read_circuit(&args.input)?;
    let dist = match args.shots {
        Some(shots) => sample(&c, shots as usize, seed)?,
        None => distribution(&c)?,
    };
    write_to(args.output.as_deref(), &json(&dist))
}

#[derive(Serialize)]
struct ManifestEntry {
    file: String,
    seed: u64,
    n_qubits: usize,
    n_clbits: usize,
    depth: usize,
    measurements: usize,
    resets: usize,
    static_gates: usize,
}

#[derive(Serialize)]
struct Manifest {
    seed: u64,
    config: GenConfig,
    circuits: Vec<ManifestEntry>,
}

fn gen(args: &GenArgs, seed: u64) -> Result<(), Failure> {
    let cfg = match args.scale {
        Some(s) => GenConfig::scale(s as usize, seed),
        None => GenConfig::explicit(args.qubits as usize, args.depth as usize, seed),
    }
    .with_densities(args.meas_density, args.cond_density, args.reset_density);
    cfg.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    let suite = generate_suite(&cfg, args.count as usize).map_err(anyhow::Error::from)?;
    fs::create_dir_all(&args.output).with_context(|| format!("creating {}", args.output.display()))?;
    let mut circuits = Vec::new();
    for (i, c) in suite.iter().enumerate() {
        let file = format!("circuit_{i:04}.dqasm");
        write_to(Some(&args.output.join(&file)), &serialize(c))?;
        let counts = c.count_ops();
        circuits.push(ManifestEntry {
            file,
            seed: derive_seed(seed, i as u64),
            n_qubits: c.n_qubits(),
            n_clbits: c.n_clbits(),
            depth: c.depth(),
            measurements: counts.measurements,
            resets: counts.resets,
            static_gates: counts.static_gates,
        });
    }
    let manifest = Manifest { seed, config: cfg, circuits };
    write_to(Some(&args.output.join("manifest.json")), &json(&manifest))?;
    Ok(())
}

fn bench(args: &BenchArgs, seed: u64) -> Result<(), Failure> {
    let base = PassConfig {
        n_max: args.n_max as usize,
        mode: match args.mode {
            ModeArg::Faithful => Mode::Faithful,
            ModeArg::Conservative => Mode::Conservative,
        },
        reset_soundness: args.reset.soundness(),
        seed,
        ..PassConfig::default()
    };
    let scales: Vec<usize> = args.scales.iter().map(|&s| s as usize).collect();
    let budgets: Vec<usize> = args.n_pcm.iter().map(|&n| n as usize).collect();
    let rows: Vec<BenchRow> = match run_bench(&scales, &budgets, args.count as usize, seed, &base) {
        Ok(rows) => rows,
        Err(e @ (BenchError::EmptySuite | BenchError::ZeroScale | BenchError::ZeroBudget)) => {
            return Err(Failure::Usage(e.to_string()))
        }
        Err(e) => return Err(Failure::Processing(e.into())),
    };
    let text = match args.format {
        ReportFormat::Json => json(&rows),
        ReportFormat::Csv => csv_rows(&rows)?,
    };
    write_to(args.output.as_deref(), &text)?;
    Ok(())
}

#[derive(Serialize)]
struct DemoReport {
    secret: String,
    original: String,
    optimized: String,
    presets: String,
    report: PassReport,
}

fn demo_bv(args: &DemoArgs, seed: u64) -> anyhow::Result<()> {
    let secret = &args.secret.0;
    let c = bernstein_vazirani(secret);
    let cfg = PassConfig::default().with_n_pcm(args.n_pcm as usize);
    let (out, report) = run_pass(&c, &PassConfig { seed, ..cfg });
    let remaining = out.count_ops().dynamic();
    if remaining != 0 {
        bail!("{remaining} measurements/resets remain after optimization");
    }
    let shot = compile_shot(&out, &mut ChaCha8Rng::seed_from_u64(seed))?;
    let presets = shot.presets();
    let bits: Vec<bool> = (0..secret.len()).map(|i| presets.get(&i).copied().unwrap_or(false)).collect();
    if &bits != secret {
        bail!("presets {} differ from the secret", bits_to_string(&bits));
    }
    let demo = DemoReport {
        secret: bits_to_string(secret),
        original: serialize(&c),
        optimized: serialize(&out),
        presets: bits_to_string(&bits),
        report,
    };
    write_to(args.output.as_deref(), &json(&demo))
}

fn run(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Optimize(a) => optimize(a, cli.seed)?,
        Command::Analyze(a) => analyze(a)?,
        Command::Simulate(a) => simulate(a, cli.seed)?,
        Command::Gen(a) => gen(a, cli.seed)?,
        Command::Bench(a) => bench(a, cli.seed)?,
        Command::DemoBv(a) => demo_bv(a, cli.seed)?,
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("DYNCIRC_LOG")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Processing(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
