//! Argument definitions and command implementations.
//!
//! Argument structs double as manifest parameters: after resolution (worker
//! count, step count, initial state) they are serialized into the manifest
//! and deserialized again by `replay`.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use sre_core::dynamics::{
    apply_single_qubit_gate, apply_two_qubit_gate, run_quench, run_quench_with, Boundary, InitialState,
    Model, QuenchSpec, SreTrace, Unitary4,
};
use sre_core::engine::{sre2_exact_with, EngineOptions};
use sre_core::oracle::{sre2_brute_force_with, OracleOptions};
use sre_core::state::{
    basis_state, haar_random_state, neel_state, random_product_state, t_state, ProductMeasure,
};
use sre_core::{sre2_batch, Method, RngSpec, SreResult, StateVector, C64};

use crate::error::{CliError, CliResult};
use crate::guard::{check_memory, resolve_workers};
use crate::manifest::{manifest_path, RunManifest, MANIFEST_FORMAT};
use crate::output::{
    bench_csv, gnuplot_script, haar_csv, haar_theory, log2_slope, to_json_pretty, trace_csv, write_file,
    BenchRow, HaarRow, ResultDocument, ResultReport, RngDoc, TraceDocument,
};
use crate::state_io::{load_state, save_state, StateFormat};

/// Largest pointwise engine/oracle difference accepted by `--oracle-check`.
pub const ORACLE_CHECK_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Parser)]
#[command(name = "sre", version, about = "Exact stabilizer Renyi entropy M2 of pure states")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize)]
#[serde(tag = "command", content = "params", rename_all = "kebab-case")]
pub enum Command {
    /// M2 of one state with the XOR/FWHT engine.
    Compute(ComputeArgs),
    /// M2 of one state by enumerating all Pauli strings.
    Oracle(OracleArgs),
    /// Haar-ensemble means of M2 over a range of sizes.
    HaarScan(HaarScanArgs),
    /// M2 after a quantum quench of a spin chain.
    Quench(QuenchArgs),
    /// M2 along a brickwork circuit of Haar two-qubit gates.
    Circuit(CircuitArgs),
    /// Engine timings over a list of sizes.
    Bench(BenchArgs),
    /// Re-runs the command recorded in a manifest.
    Replay(ReplayArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Compute(_) => "compute",
            Command::Oracle(_) => "oracle",
            Command::HaarScan(_) => "haar-scan",
            Command::Quench(_) => "quench",
            Command::Circuit(_) => "circuit",
            Command::Bench(_) => "bench",
            Command::Replay(_) => "replay",
        }
    }
}

/// Exactly one state source.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[group(required = true, multiple = false)]
pub struct SourceArgs {
    /// State file (binary, or JSON lines).
    #[arg(long, value_name = "PATH")]
    pub file: Option<PathBuf>,
    /// Computational basis state with this index.
    #[arg(long, value_name = "INDEX")]
    pub basis: Option<u64>,
    /// Haar-random state.
    #[arg(long)]
    pub haar: bool,
    /// Néel state, qubit 0 up.
    #[arg(long)]
    pub neel: bool,
    /// Random product state.
    #[arg(long)]
    pub product: bool,
    /// GHZ state prepared by a Hadamard and a CNOT ladder.
    #[arg(long)]
    pub ghz: bool,
    /// T state on qubit 0, all other qubits in |0>.
    #[arg(long)]
    pub t_state: bool,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct GeneratorArgs {
    /// Number of qubits of generated states.
    #[arg(long, short = 'n')]
    pub n: Option<u32>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0)]
    pub stream: u64,
    /// Draw product-state qubits uniformly on the Bloch sphere instead of uniformly in angle.
    #[arg(long)]
    pub sphere: bool,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ComputeArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub generator: GeneratorArgs,
    /// Worker threads [default: SRE_WORKERS, then the core count].
    #[arg(long)]
    pub workers: Option<usize>,
    /// Result JSON without timing.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Also write the input state; `.jsonl` selects JSON lines.
    #[arg(long, value_name = "PATH")]
    pub save_state: Option<PathBuf>,
    /// Skip the memory guard.
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct OracleArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub generator: GeneratorArgs,
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Lift the ten-qubit limit of the enumeration.
    #[arg(long)]
    pub allow_large: bool,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct HaarScanArgs {
    #[arg(long, default_value_t = 2)]
    pub n_min: u32,
    #[arg(long, default_value_t = 12)]
    pub n_max: u32,
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    /// Sample `s` at size `N` uses stream `(N << 32) + s`.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelArg {
    Xxz,
    TfimLf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryArg {
    #[default]
    Periodic,
    Open,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialArg {
    Neel,
    AllUp,
    Product,
    ProductSphere,
    File,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct TraceOutputArgs {
    /// Output prefix: writes `<PREFIX>.csv`, `<PREFIX>.json` and a manifest.
    #[arg(long, value_name = "PREFIX")]
    pub out: Option<PathBuf>,
    /// Keep every sample's trace.
    #[arg(long)]
    pub per_sample: bool,
    /// Also write a gnuplot script `<PREFIX>.gp`.
    #[arg(long, requires = "out")]
    pub gnuplot: bool,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct QuenchArgs {
    #[arg(long, value_enum)]
    pub model: ModelArg,
    /// Chain length; taken from the file when `--initial-file` is given.
    #[arg(long, short = 'n')]
    pub n: Option<u32>,
    #[arg(long, default_value_t = 1.0)]
    pub j: f64,
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub delta: f64,
    #[arg(long, default_value_t = 1.5, allow_negative_numbers = true)]
    pub hx: f64,
    #[arg(long, default_value_t = 1.5, allow_negative_numbers = true)]
    pub hz: f64,
    #[arg(long, value_enum, default_value_t)]
    pub boundary: BoundaryArg,
    #[arg(long, default_value_t = sre_core::dynamics::DEFAULT_DT)]
    pub dt: f64,
    /// Final time; must be a whole number of steps.
    #[arg(long, conflicts_with = "steps")]
    pub t_max: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long, default_value_t = sre_core::dynamics::DEFAULT_KRYLOV_DIM)]
    pub krylov_dim: usize,
    #[arg(long, default_value_t = 1)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0)]
    pub stream: u64,
    /// [default: neel for xxz, product for tfim-lf]
    #[arg(long, value_enum)]
    pub initial: Option<InitialArg>,
    #[arg(long, value_name = "PATH")]
    pub initial_file: Option<PathBuf>,
    /// Recompute the trace by Pauli enumeration and fail on any difference above 1e-9.
    #[arg(long)]
    pub oracle_check: bool,
    #[command(flatten)]
    pub output: TraceOutputArgs,
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct CircuitArgs {
    /// Even number of qubits.
    #[arg(long, short = 'n')]
    pub n: u32,
    /// Number of brickwork layers.
    #[arg(long, default_value_t = 40)]
    pub steps: usize,
    #[arg(long, default_value_t = 20)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0)]
    pub stream: u64,
    #[arg(long, value_enum, default_value_t = InitialArg::AllUp)]
    pub initial: InitialArg,
    #[command(flatten)]
    pub output: TraceOutputArgs,
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct BenchArgs {
    /// Comma-separated sizes.
    #[arg(long, short = 'n', value_delimiter = ',', default_value = "8,10,12")]
    pub n: Vec<u32>,
    #[arg(long, default_value_t = 3)]
    pub repeats: usize,
    /// Seed of the Haar states being timed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ReplayArgs {
    pub manifest: PathBuf,
    /// New output path (prefix for trace commands); defaults to the recorded one.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Override the recorded worker count.
    #[arg(long)]
    pub workers: Option<usize>,
}

/// Files written by a command and the manifest anchor they hang off.
struct Outputs {
    anchor: PathBuf,
    files: Vec<PathBuf>,
}

struct Finished {
    rng: Option<RngSpec>,
    workers: usize,
    outputs: Option<Outputs>,
}

/// Runs one command, printing its report to `stdout`.
pub fn run(command: Command, argv: &[String], stdout: &mut dyn Write) -> CliResult<()> {
    if let Command::Replay(args) = command {
        return replay(args, argv, stdout);
    }
    let start = Instant::now();
    let mut command = command;
    let done = match &mut command {
        Command::Compute(a) => cmd_compute(a, stdout)?,
        Command::Oracle(a) => cmd_oracle(a, stdout)?,
        Command::HaarScan(a) => cmd_haar_scan(a, stdout)?,
        Command::Quench(a) => cmd_quench(a, stdout)?,
        Command::Circuit(a) => cmd_circuit(a, stdout)?,
        Command::Bench(a) => cmd_bench(a, stdout)?,
        Command::Replay(_) => unreachable!(),
    };
    let wall_seconds = start.elapsed().as_secs_f64();
    if let Some(outputs) = done.outputs {
        let value = serde_json::to_value(&command).expect("arguments serialize");
        let manifest = RunManifest {
            format: MANIFEST_FORMAT.to_owned(),
            command: command.name().to_owned(),
            argv: argv.to_vec(),
            params: value["params"].clone(),
            rng: done.rng.map(RngDoc::from),
            version: env!("CARGO_PKG_VERSION").to_owned(),
            wall_seconds,
            workers: done.workers,
            outputs: outputs.files,
        };
        manifest.write(&manifest_path(&outputs.anchor))?;
    }
    Ok(())
}

fn replay(args: ReplayArgs, argv: &[String], stdout: &mut dyn Write) -> CliResult<()> {
    let manifest = RunManifest::read(&args.manifest)?;
    let value = serde_json::json!({ "command": manifest.command, "params": manifest.params });
    let mut command: Command =
        serde_json::from_value(value).map_err(|e| CliError::format(&args.manifest, e.to_string()))?;
    match &mut command {
        Command::Compute(a) => {
            override_opt(&mut a.workers, args.workers);
            if let Some(out) = &args.out {
                a.save_state = a.save_state.as_ref().map(|s| sibling(out, s));
                a.out = Some(out.clone());
            }
        }
        Command::Oracle(a) => {
            override_opt(&mut a.workers, args.workers);
            override_opt(&mut a.out, args.out);
        }
        Command::HaarScan(a) => {
            override_opt(&mut a.workers, args.workers);
            override_opt(&mut a.out, args.out);
        }
        Command::Quench(a) => {
            override_opt(&mut a.workers, args.workers);
            override_opt(&mut a.output.out, args.out);
        }
        Command::Circuit(a) => {
            override_opt(&mut a.workers, args.workers);
            override_opt(&mut a.output.out, args.out);
        }
        Command::Bench(a) => {
            override_opt(&mut a.workers, args.workers);
            override_opt(&mut a.out, args.out);
        }
        Command::Replay(_) => {
            return Err(CliError::format(&args.manifest, "a manifest cannot record a replay"));
        }
    }
    run(command, argv, stdout)
}

fn override_opt<T>(slot: &mut Option<T>, value: Option<T>) {
    if value.is_some() {
        *slot = value;
    }
}

/// `<out>.state.<ext of original>`.
fn sibling(out: &Path, original: &Path) -> PathBuf {
    let ext = original.extension().and_then(|e| e.to_str()).unwrap_or("bin");
    let mut s = out.as_os_str().to_owned();
    s.push(format!(".state.{ext}"));
    PathBuf::from(s)
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn print_json<T: Serialize>(stdout: &mut dyn Write, value: &T) -> CliResult<()> {
    stdout.write_all(to_json_pretty(value).as_bytes()).map_err(|e| CliError::io("<stdout>", e))
}

fn print_text(stdout: &mut dyn Write, text: &str) -> CliResult<()> {
    stdout.write_all(text.as_bytes()).map_err(|e| CliError::io("<stdout>", e))
}

fn need_n(n: Option<u32>, what: &str) -> CliResult<u32> {
    n.ok_or_else(|| CliError::Usage(format!("{what} needs --n")))
}

fn measure(sphere: bool) -> ProductMeasure {
    if sphere {
        ProductMeasure::SphereUniform
    } else {
        ProductMeasure::UniformAngles
    }
}

/// GHZ through a Hadamard on qubit 0 and CNOTs down the chain.
fn ghz_by_gates(n: u32) -> CliResult<StateVector> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let h = [[C64::new(s, 0.0), C64::new(s, 0.0)], [C64::new(s, 0.0), C64::new(-s, 0.0)]];
    let mut psi = basis_state(n, 0)?;
    apply_single_qubit_gate(&mut psi, &h, 0)?;
    for q in 1..n as usize {
        apply_two_qubit_gate(&mut psi, &Unitary4::cnot(), q - 1, q)?;
    }
    Ok(psi)
}

/// Builds the requested state; the string describes the source for reports.
fn build_state(
    src: &SourceArgs,
    g: &GeneratorArgs,
    force: bool,
    workers: usize,
) -> CliResult<(StateVector, String)> {
    let rng = RngSpec::new(g.seed, g.stream);
    if let Some(path) = &src.file {
        let psi = load_state(path)?;
        check_memory(psi.n_qubits(), workers, force)?;
        return Ok((psi, format!("file:{}", path.display())));
    }
    let n = need_n(g.n, "a generated state")?;
    check_memory(n, workers, force)?;
    let out = if let Some(idx) = src.basis {
        (basis_state(n, idx)?, format!("basis:{idx}"))
    } else if src.haar {
        (haar_random_state(n, &rng)?, "haar".to_owned())
    } else if src.neel {
        (neel_state(n)?, "neel".to_owned())
    } else if src.product {
        let name = if g.sphere { "product_sphere" } else { "product" };
        (random_product_state(n, &rng, measure(g.sphere))?, name.to_owned())
    } else if src.ghz {
        (ghz_by_gates(n)?, "ghz".to_owned())
    } else if src.t_state {
        let psi = if n == 1 { t_state() } else { t_state().tensor(&basis_state(n - 1, 0)?) };
        (psi, "t_state".to_owned())
    } else {
        return Err(CliError::Usage("no state source given".into()));
    };
    Ok(out)
}

fn seeded(src: &SourceArgs, g: &GeneratorArgs) -> Option<RngSpec> {
    (src.haar || src.product).then(|| RngSpec::new(g.seed, g.stream))
}

fn report_result(
    res: &SreResult,
    source: &str,
    out: Option<&Path>,
    stdout: &mut dyn Write,
) -> CliResult<Option<PathBuf>> {
    let doc = ResultDocument::new(res, source);
    print_json(stdout, &ResultReport { result: &doc, wall_seconds: res.wall_seconds, workers: res.workers })?;
    match out {
        Some(path) => {
            write_file(path, to_json_pretty(&doc).as_bytes())?;
            Ok(Some(path.to_owned()))
        }
        None => Ok(None),
    }
}

fn cmd_compute(a: &mut ComputeArgs, stdout: &mut dyn Write) -> CliResult<Finished> {
    let workers = resolve_workers(a.workers)?;
    a.workers = Some(workers);
    let (psi, source) = build_state(&a.source, &a.generator, a.force, workers)?;
    let max_qubits = if a.force { u32::MAX } else { sre_core::engine::DEFAULT_MAX_QUBITS };
    let res = sre2_exact_with(&psi, &EngineOptions { workers, max_qubits })?;
    let mut files = Vec::new();
    if let Some(path) = &a.save_state {
        save_state(path, &psi, StateFormat::from_path(path))?;
        files.push(path.clone());
    }
    let written = report_result(&res, &source, a.out.as_deref(), stdout)?;
    files.extend(written.clone());
    let anchor = written.or_else(|| a.save_state.clone());
    Ok(Finished {
        rng: seeded(&a.source, &a.generator),
        workers,
        outputs: anchor.map(|anchor| Outputs { anchor, files }),
    })
}

fn cmd_oracle(a: &mut OracleArgs, stdout: &mut dyn Write) -> CliResult<Finished> {
    let workers = resolve_workers(a.workers)?;
    a.workers = Some(workers);
    let (psi, source) = build_state(&a.source, &a.generator, a.allow_large, workers)?;
    let max_qubits = if a.allow_large { u32::MAX } else { sre_core::oracle::DEFAULT_ORACLE_MAX_QUBITS };
    let res = sre2_brute_force_with(&psi, &OracleOptions { workers, max_qubits }).map_err(|e| match e {
        sre_core::Error::TooManyQubits { n_qubits, limit } => CliError::Resource(format!(
            "the enumeration oracle costs O(8^N); N = {n_qubits} exceeds its limit of {limit} \
             (pass --allow-large to run anyway)"
        )),
        other => other.into(),
    })?;
    let written = report_result(&res, &source, a.out.as_deref(), stdout)?;
    Ok(Finished {
        rng: seeded(&a.source, &a.generator),
        workers,
        outputs: written.map(|p| Outputs { anchor: p.clone(), files: vec![p] }),
    })
}

/// Stream of sample `s` at size `n` in a Haar scan.
pub fn haar_scan_rng(seed: u64, n_qubits: u32, sample: usize) -> RngSpec {
    RngSpec::new(seed, (u64::from(n_qubits) << 32) + sample as u64)
}

fn cmd_haar_scan(a: &mut HaarScanArgs, stdout: &mut dyn Write) -> CliResult<Finished> {
    let workers = resolve_workers(a.workers)?;
    a.workers = Some(workers);
    if a.n_min == 0 || a.n_min > a.n_max {
        return Err(CliError::Usage("need 1 <= --n-min <= --n-max".into()));
    }
    if a.samples == 0 {
        return Err(CliError::Usage("--samples must be at least 1".into()));
    }
    let mut rows = Vec::new();
    for n in a.n_min..=a.n_max {
        check_memory(n, workers, a.force)?;
        let mut m2 = Vec::with_capacity(a.samples);
        // Batches of `workers` states bound peak memory.
        for chunk in (0..a.samples).collect::<Vec<_>>().chunks(workers) {
            let states: Vec<StateVector> = chunk
                .iter()
                .map(|&s| haar_random_state(n, &haar_scan_rng(a.seed, n, s)))
                .collect::<Result<_, _>>()?;
            let results = if states.len() == 1 {
                vec![sre2_exact_with(&states[0], &EngineOptions { workers, max_qubits: u32::MAX })?]
            } else {
                sre2_batch(&states, workers)?
            };
            m2.extend(results.iter().map(|r| r.m2));
        }
        let (mean, stderr) = sre_core::reduce::mean_stderr(&m2);
        rows.push(HaarRow { n_qubits: n, mean, stderr, theory: haar_theory(n) });
    }
    let csv = haar_csv(&rows);
    print_text(stdout, &csv)?;
    let outputs = match &a.out {
        Some(path) => {
            write_file(path, csv.as_bytes())?;
            Some(Outputs { anchor: path.clone(), files: vec![path.clone()] })
        }
        None => None,
    };
    Ok(Finished { rng: Some(RngSpec::new(a.seed, 0)), workers, outputs })
}

fn initial_state(arg: InitialArg, file: Option<&Path>) -> CliResult<InitialState> {
    Ok(match arg {
        InitialArg::Neel => InitialState::Neel,
        InitialArg::AllUp => InitialState::AllUp,
        InitialArg::Product => InitialState::RandomProduct(ProductMeasure::UniformAngles),
        InitialArg::ProductSphere => InitialState::RandomProduct(ProductMeasure::SphereUniform),
        InitialArg::File => {
            let path = file.ok_or_else(|| CliError::Usage("--initial file needs --initial-file".into()))?;
            InitialState::Custom(load_state(path)?)
        }
    })
}

#[derive(Serialize)]
struct TraceReport<'a> {
    model: &'a str,
    n_qubits: u32,
    samples: usize,
    steps: usize,
    final_time: f64,
    final_mean: f64,
    max_norm_drift: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle_max_diff: Option<f64>,
    outputs: Vec<PathBuf>,
}

fn emit_trace(
    trace: &SreTrace,
    output: &TraceOutputArgs,
    oracle_max_diff: Option<f64>,
    xlabel: &str,
    stdout: &mut dyn Write,
) -> CliResult<Option<Outputs>> {
    let csv = trace_csv(trace);
    let outputs = match &output.out {
        Some(prefix) => {
            let csv_path = with_suffix(prefix, ".csv");
            let json_path = with_suffix(prefix, ".json");
            write_file(&csv_path, csv.as_bytes())?;
            let doc = TraceDocument::new(trace, Method::XorFwht.as_str());
            write_file(&json_path, to_json_pretty(&doc).as_bytes())?;
            let mut files = vec![csv_path.clone(), json_path];
            if output.gnuplot {
                let gp_path = with_suffix(prefix, ".gp");
                let csv_name =
                    csv_path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
                write_file(&gp_path, gnuplot_script(&csv_name, trace.spec.n_qubits, xlabel).as_bytes())?;
                files.push(gp_path);
            }
            Some(Outputs { anchor: prefix.clone(), files })
        }
        None => {
            print_text(stdout, &csv)?;
            return Ok(None);
        }
    };
    let last = trace.times.len() - 1;
    print_json(
        stdout,
        &TraceReport {
            model: trace.spec.model.name(),
            n_qubits: trace.spec.n_qubits,
            samples: trace.spec.samples,
            steps: trace.spec.n_steps,
            final_time: trace.times[last],
            final_mean: trace.m2_mean[last],
            max_norm_drift: trace.max_norm_drift,
            oracle_max_diff,
            outputs: outputs.as_ref().map(|o| o.files.clone()).unwrap_or_default(),
        },
    )?;
    Ok(outputs)
}

fn resolve_steps(dt: f64, t_max: Option<f64>, steps: Option<usize>) -> CliResult<usize> {
    match (t_max, steps) {
        (_, Some(s)) => Ok(s),
        (Some(t), None) => {
            if !(t.is_finite() && t >= 0.0 && dt.is_finite() && dt > 0.0) {
                return Err(CliError::Usage("--t-max and --dt must be finite, dt positive".into()));
            }
            let s = (t / dt).round();
            if (s * dt - t).abs() > 1e-9 * t.max(1.0) {
                return Err(CliError::Usage(format!("--t-max {t} is not a multiple of --dt {dt}")));
            }
            Ok(s as usize)
        }
        (None, None) => Err(CliError::Usage("give --t-max or --steps".into())),
    }
}

/// Largest pointwise difference between per-sample engine traces and an oracle rerun.
fn oracle_difference(spec: &QuenchSpec, engine: &SreTrace) -> CliResult<f64> {
    let inner = if spec.samples >= spec.workers { 1 } else { spec.workers };
    let opts = OracleOptions { workers: inner, ..OracleOptions::default() };
    let oracle = run_quench_with(spec, |psi| Ok(sre2_brute_force_with(psi, &opts)?.m2))?;
    let (Some(a), Some(b)) = (&engine.samples, &oracle.samples) else {
        return Err(CliError::Consistency("oracle check needs per-sample traces".into()));
    };
    let diff = a.iter().flatten().zip(b.iter().flatten()).fold(0.0f64, |acc, (x, y)| {
        if (x - y).is_nan() {
            f64::NAN
        } else {
            acc.max((x - y).abs())
        }
    });
    if diff.is_nan() || diff > ORACLE_CHECK_TOLERANCE {
        return Err(CliError::Consistency(format!(
            "engine and oracle traces differ by {diff:e} (tolerance {ORACLE_CHECK_TOLERANCE:e})"
        )));
    }
    Ok(diff)
}

fn cmd_quench(a: &mut QuenchArgs, stdout: &mut dyn Write) -> CliResult<Finished> {
    let workers = resolve_workers(a.workers)?;
    a.workers = Some(workers);
    let initial_arg = match (a.initial, &a.initial_file) {
        (Some(arg), _) => arg,
        (None, Some(_)) => InitialArg::File,
        (None, None) => match a.model {
            ModelArg::Xxz => InitialArg::Neel,
            ModelArg::TfimLf => InitialArg::Product,
        },
    };
    a.initial = Some(initial_arg);
    let initial = initial_state(initial_arg, a.initial_file.as_deref())?;
    let n = match (&initial, a.n) {
        (InitialState::Custom(psi), Some(n)) if psi.n_qubits() != n => {
            return Err(CliError::Usage(format!(
                "--n {n} but the initial state has {} qubits",
                psi.n_qubits()
            )));
        }
        (InitialState::Custom(psi), _) => psi.n_qubits(),
        (_, n) => need_n(n, "quench")?,
    };
    a.n = Some(n);
    let steps = resolve_steps(a.dt, a.t_max, a.steps)?;
    a.steps = Some(steps);
    a.t_max = None;
    check_memory(n, workers, a.force)?;

    let model = match a.model {
        ModelArg::Xxz => Model::Xxz { j: a.j, delta: a.delta },
        ModelArg::TfimLf => Model::TfimLf { j: a.j, hx: a.hx, hz: a.hz },
    };
    let mut spec = QuenchSpec {
        model,
        n_qubits: n,
        boundary: match a.boundary {
            BoundaryArg::Periodic => Boundary::Periodic,
            BoundaryArg::Open => Boundary::Open,
        },
        dt: a.dt,
        n_steps: steps,
        krylov_dim: a.krylov_dim,
        samples: a.samples,
        rng: RngSpec::new(a.seed, a.stream),
        initial,
        record_samples: a.output.per_sample || a.oracle_check,
        workers,
    };
    let mut trace = run_quench(&spec, Method::XorFwht)?;
    let diff = if a.oracle_check { Some(oracle_difference(&spec, &trace)?) } else { None };
    if !a.output.per_sample {
        spec.record_samples = false;
        trace.spec.record_samples = false;
        trace.samples = None;
    }
    let outputs = emit_trace(&trace, &a.output, diff, "t", stdout)?;
    Ok(Finished { rng: Some(spec.rng), workers, outputs })
}

fn cmd_circuit(a: &mut CircuitArgs, stdout: &mut dyn Write) -> CliResult<Finished> {
    let workers = resolve_workers(a.workers)?;
    a.workers = Some(workers);
    if a.initial == InitialArg::File {
        return Err(CliError::Usage("circuits start from neel, all-up or product states".into()));
    }
    check_memory(a.n, workers, a.force)?;
    let mut spec = QuenchSpec::brickwork(a.n);
    spec.n_steps = a.steps;
    spec.samples = a.samples;
    spec.rng = RngSpec::new(a.seed, a.stream);
    spec.initial = initial_state(a.initial, None)?;
    spec.record_samples = a.output.per_sample;
    spec.workers = workers;
    let trace = run_quench(&spec, Method::XorFwht)?;
    let outputs = emit_trace(&trace, &a.output, None, "layer", stdout)?;
    Ok(Finished { rng: Some(spec.rng), workers, outputs })
}

#[derive(Serialize)]
struct BenchReport<'a> {
    rows: &'a [BenchRow],
    repeats: usize,
    workers: usize,
    /// Fitted slope of log2(seconds) per qubit; 2 plus a slowly decaying term from the N factor.
    log2_slope: Option<f64>,
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let m = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[m]
    } else {
        0.5 * (xs[m - 1] + xs[m])
    }
}

fn cmd_bench(a: &mut BenchArgs, stdout: &mut dyn Write) -> CliResult<Finished> {
    let workers = resolve_workers(a.workers)?;
    a.workers = Some(workers);
    if a.n.is_empty() || a.repeats == 0 {
        return Err(CliError::Usage("need at least one size and one repeat".into()));
    }
    let mut rows: Vec<BenchRow> = Vec::new();
    for &n in &a.n {
        check_memory(n, workers, a.force)?;
        let psi = haar_random_state(n, &RngSpec::new(a.seed, u64::from(n)))?;
        let opts = EngineOptions { workers, max_qubits: u32::MAX };
        let times = (0..a.repeats)
            .map(|_| Ok(sre2_exact_with(&psi, &opts)?.wall_seconds))
            .collect::<CliResult<Vec<f64>>>()?;
        let median_seconds = median(times);
        let ratio = rows.last().map_or(f64::NAN, |p| median_seconds / p.median_seconds);
        rows.push(BenchRow { n_qubits: n, median_seconds, ratio });
    }
    let slope = log2_slope(&rows);
    print_json(
        stdout,
        &BenchReport {
            rows: &rows,
            repeats: a.repeats,
            workers,
            log2_slope: slope.is_finite().then_some(slope),
        },
    )?;
    let outputs = match &a.out {
        Some(path) => {
            write_file(path, bench_csv(&rows).as_bytes())?;
            Some(Outputs { anchor: path.clone(), files: vec![path.clone()] })
        }
        None => None,
    };
    Ok(Finished { rng: Some(RngSpec::new(a.seed, 0)), workers, outputs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    fn parse(args: &[&str]) -> Result<Cli, clap::Error> {
        Cli::try_parse_from(std::iter::once("sre").chain(args.iter().copied()))
    }

    #[test]
    fn clap_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn exactly_one_source() {
        assert!(parse(&["compute", "--n", "3"]).is_err());
        assert!(parse(&["compute", "--haar", "--neel", "--n", "3"]).is_err());
        assert!(parse(&["compute", "--basis", "2", "--n", "3"]).is_ok());
    }

    #[test]
    fn steps_from_time() {
        assert_eq!(resolve_steps(0.05, Some(2.0), None).unwrap(), 40);
        assert_eq!(resolve_steps(0.05, None, Some(7)).unwrap(), 7);
        assert!(resolve_steps(0.3, Some(1.0), None).is_err());
        assert!(resolve_steps(0.05, None, None).is_err());
    }

    #[test]
    fn commands_round_trip_through_json() {
        let cli =
            parse(&["quench", "--model", "tfim-lf", "--n", "6", "--steps", "3", "--delta", "-1"]).unwrap();
        let value = serde_json::to_value(&cli.command).unwrap();
        assert_eq!(value["command"], "quench");
        let back: Command = serde_json::from_value(value.clone()).unwrap();
        assert_eq!(serde_json::to_value(&back).unwrap(), value);
    }

    #[test]
    fn median_of_even_and_odd() {
        assert_eq!(median(vec![3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(vec![4.0, 1.0, 2.0, 3.0]), 2.5);
    }

    #[test]
    fn t_state_source_pins_value() {
        let mut out = Vec::new();
        let mut a = ComputeArgs {
            source: SourceArgs { t_state: true, ..Default::default() },
            generator: GeneratorArgs { n: Some(3), ..Default::default() },
            workers: Some(1),
            out: None,
            save_state: None,
            force: false,
        };
        cmd_compute(&mut a, &mut out).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&out).unwrap();
        assert!((v["m2"].as_f64().unwrap() - (4.0f64 / 3.0).log2()).abs() < 1e-12);
    }
}
