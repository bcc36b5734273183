//! CSV and JSON artifacts.
//!
//! Every CSV starts with a `# <schema> v<version>` comment line followed by
//! the column header. Undefined values are written as `nan` in CSV and `null`
//! in JSON. Floats use the shortest representation that round-trips.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sre_core::dynamics::{Boundary, InitialState, Model, SreTrace};
use sre_core::state::ProductMeasure;
use sre_core::{RngSpec, SreResult};

use crate::error::{CliError, CliResult};

pub const TRACE_CSV_SCHEMA: &str = "# sre-trace-csv v1";
pub const HAAR_CSV_SCHEMA: &str = "# sre-haar-scan-csv v1";
pub const BENCH_CSV_SCHEMA: &str = "# sre-bench-csv v1";
pub const RESULT_FORMAT: &str = "sre-result/1";
pub const TRACE_FORMAT: &str = "sre-trace/1";

pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".to_owned()
    } else {
        format!("{x}")
    }
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

/// `log₂(2ᴺ + 3) − 2`, the Haar-average M₂.
pub fn haar_theory(n_qubits: u32) -> f64 {
    (2f64.powi(n_qubits as i32) + 3.0).log2() - 2.0
}

pub fn write_file(path: &Path, contents: &[u8]) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    std::fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

pub fn to_json_pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("documents serialize");
    s.push('\n');
    s
}

/// Deterministic part of an [`SreResult`]; timing lives in stdout and the manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultDocument {
    pub format: String,
    pub source: String,
    pub method: String,
    pub n_qubits: u32,
    pub m2: f64,
    pub fourth_moment_sum: f64,
    pub second_moment_sum: f64,
}

impl ResultDocument {
    pub fn new(res: &SreResult, source: &str) -> Self {
        Self {
            format: RESULT_FORMAT.to_owned(),
            source: source.to_owned(),
            method: res.method.as_str().to_owned(),
            n_qubits: res.n_qubits,
            m2: res.m2,
            fourth_moment_sum: res.fourth_moment_sum,
            second_moment_sum: res.second_moment_sum,
        }
    }
}

/// What `compute` and `oracle` print.
#[derive(Debug, Clone, Serialize)]
pub struct ResultReport<'a> {
    #[serde(flatten)]
    pub result: &'a ResultDocument,
    pub wall_seconds: f64,
    pub workers: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RngDoc {
    pub seed: u64,
    pub stream: u64,
}

impl From<RngSpec> for RngDoc {
    fn from(r: RngSpec) -> Self {
        Self { seed: r.seed, stream: r.stream }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum ModelDoc {
    Xxz { j: f64, delta: f64 },
    TfimLf { j: f64, hx: f64, hz: f64 },
    Brickwork,
}

impl From<Model> for ModelDoc {
    fn from(m: Model) -> Self {
        match m {
            Model::Xxz { j, delta } => ModelDoc::Xxz { j, delta },
            Model::TfimLf { j, hx, hz } => ModelDoc::TfimLf { j, hx, hz },
            Model::Brickwork => ModelDoc::Brickwork,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpecDoc {
    pub model: ModelDoc,
    pub n_qubits: u32,
    /// `null` for the circuit, whose bonds are fixed by the brickwork pattern.
    pub boundary: Option<String>,
    pub dt: Option<f64>,
    pub n_steps: usize,
    pub krylov_dim: Option<usize>,
    pub samples: usize,
    pub initial: String,
    pub rng: RngDoc,
}

pub fn initial_name(initial: &InitialState) -> &'static str {
    match initial {
        InitialState::Neel => "neel",
        InitialState::AllUp => "all_up",
        InitialState::RandomProduct(ProductMeasure::UniformAngles) => "product",
        InitialState::RandomProduct(ProductMeasure::SphereUniform) => "product_sphere",
        InitialState::Custom(_) => "file",
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceDocument {
    pub format: String,
    pub method: String,
    pub spec: SpecDoc,
    /// Stream used by each sample, in sample order.
    pub sample_rng: Vec<RngDoc>,
    pub times: Vec<f64>,
    pub m2_mean: Vec<f64>,
    pub m2_stderr: Vec<Option<f64>>,
    pub samples: Option<Vec<Vec<f64>>>,
    pub max_norm_drift: f64,
}

impl TraceDocument {
    pub fn new(trace: &SreTrace, method: &str) -> Self {
        let s = &trace.spec;
        let hamiltonian = s.model.is_hamiltonian();
        let boundary = match s.boundary {
            Boundary::Periodic => "periodic",
            Boundary::Open => "open",
        };
        Self {
            format: TRACE_FORMAT.to_owned(),
            method: method.to_owned(),
            spec: SpecDoc {
                model: s.model.into(),
                n_qubits: s.n_qubits,
                boundary: hamiltonian.then(|| boundary.to_owned()),
                dt: hamiltonian.then_some(s.dt),
                n_steps: s.n_steps,
                krylov_dim: hamiltonian.then_some(s.krylov_dim),
                samples: s.samples,
                initial: initial_name(&s.initial).to_owned(),
                rng: s.rng.into(),
            },
            sample_rng: (0..s.samples as u64).map(|k| s.rng.substream(k).into()).collect(),
            times: trace.times.clone(),
            m2_mean: trace.m2_mean.clone(),
            m2_stderr: trace.m2_stderr.iter().copied().map(finite).collect(),
            samples: trace.samples.clone(),
            max_norm_drift: trace.max_norm_drift,
        }
    }
}

/// `t,mean,stderr[,sample_k…]`.
pub fn trace_csv(trace: &SreTrace) -> String {
    let mut out = String::new();
    writeln!(out, "{TRACE_CSV_SCHEMA}").unwrap();
    out.push_str("t,mean,stderr");
    if let Some(samples) = &trace.samples {
        for k in 0..samples.len() {
            write!(out, ",sample_{k}").unwrap();
        }
    }
    out.push('\n');
    for (i, t) in trace.times.iter().enumerate() {
        write!(out, "{},{},{}", fmt_f64(*t), fmt_f64(trace.m2_mean[i]), fmt_f64(trace.m2_stderr[i])).unwrap();
        if let Some(samples) = &trace.samples {
            for s in samples {
                write!(out, ",{}", fmt_f64(s[i])).unwrap();
            }
        }
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HaarRow {
    pub n_qubits: u32,
    pub mean: f64,
    pub stderr: f64,
    pub theory: f64,
}

/// `n,mean,stderr,theory`.
pub fn haar_csv(rows: &[HaarRow]) -> String {
    let mut out = format!("{HAAR_CSV_SCHEMA}\nn,mean,stderr,theory\n");
    for r in rows {
        writeln!(out, "{},{},{},{}", r.n_qubits, fmt_f64(r.mean), fmt_f64(r.stderr), fmt_f64(r.theory))
            .unwrap();
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BenchRow {
    pub n_qubits: u32,
    pub median_seconds: f64,
    /// Median over the previous row's median; NaN on the first row.
    #[serde(serialize_with = "nan_as_null")]
    pub ratio: f64,
}

fn nan_as_null<S: serde::Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    finite(*x).serialize(s)
}

/// `n,median_seconds,ratio`.
pub fn bench_csv(rows: &[BenchRow]) -> String {
    let mut out = format!("{BENCH_CSV_SCHEMA}\nn,median_seconds,ratio\n");
    for r in rows {
        writeln!(out, "{},{},{}", r.n_qubits, fmt_f64(r.median_seconds), fmt_f64(r.ratio)).unwrap();
    }
    out
}

/// Least-squares slope of `log₂(seconds)` against `N`.
pub fn log2_slope(rows: &[BenchRow]) -> f64 {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.median_seconds > 0.0)
        .map(|r| (f64::from(r.n_qubits), r.median_seconds.log2()))
        .collect();
    if pts.len() < 2 {
        return f64::NAN;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

/// Gnuplot script plotting a trace CSV with error bars against the Haar value.
pub fn gnuplot_script(csv_name: &str, n_qubits: u32, xlabel: &str) -> String {
    format!(
        "set datafile separator ','\n\
         set datafile missing 'nan'\n\
         set key bottom right\n\
         set xlabel '{xlabel}'\n\
         set ylabel 'M_2'\n\
         haar = {haar}\n\
         plot '{csv_name}' skip 2 using 1:2:3 with yerrorlines title 'N = {n_qubits}', \\\n\
         \x20    haar with lines dashtype 2 title 'Haar'\n",
        haar = fmt_f64(haar_theory(n_qubits)),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use sre_core::dynamics::QuenchSpec;

    fn trace() -> SreTrace {
        SreTrace {
            times: vec![0.0, 0.05],
            m2_mean: vec![0.0, 0.125],
            m2_stderr: vec![f64::NAN, f64::NAN],
            samples: Some(vec![vec![0.0, 0.125]]),
            spec: QuenchSpec::xxz(4),
            max_norm_drift: 0.0,
        }
    }

    #[test]
    fn trace_csv_layout() {
        let csv = trace_csv(&trace());
        assert_eq!(csv, "# sre-trace-csv v1\nt,mean,stderr,sample_0\n0,0,nan,0\n0.05,0.125,nan,0.125\n");
    }

    #[test]
    fn stderr_nan_becomes_null() {
        let doc = TraceDocument::new(&trace(), "xor_fwht");
        let v = serde_json::to_value(&doc).unwrap();
        assert!(v["m2_stderr"][0].is_null());
        assert_eq!(v["spec"]["model"]["name"], "xxz");
        assert_eq!(v["spec"]["boundary"], "periodic");
    }

    #[test]
    fn haar_theory_values() {
        assert!((haar_theory(2) - (7f64.log2() - 2.0)).abs() < 1e-15);
        assert!((haar_theory(10) - (1027f64.log2() - 2.0)).abs() < 1e-15);
        let csv = haar_csv(&[HaarRow { n_qubits: 2, mean: 0.8, stderr: f64::NAN, theory: 0.807 }]);
        assert!(csv.ends_with("2,0.8,nan,0.807\n"));
    }

    #[test]
    fn slope_of_exact_powers() {
        let rows: Vec<BenchRow> = [8u32, 10, 12]
            .iter()
            .map(|&n| BenchRow { n_qubits: n, median_seconds: 2f64.powi(2 * n as i32 - 20), ratio: f64::NAN })
            .collect();
        assert!((log2_slope(&rows) - 2.0).abs() < 1e-12);
        assert!(log2_slope(&rows[..1]).is_nan());
    }
}
