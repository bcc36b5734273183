use alloc::vec::Vec;

use super::{brickwork_step, Boundary, Hamiltonian, KrylovPropagator, DEFAULT_DT, DEFAULT_KRYLOV_DIM};
use crate::oracle::{sre2_brute_force_with, OracleOptions};
use crate::state::{all_up_state, neel_state, random_product_state_from, ProductMeasure};
use crate::{parallel, reduce, sre2_exact, Error, Method, Result, RngSpec, StateVector};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Model {
    /// `Σ J(XX + YY) + Δ ZZ`.
    Xxz { j: f64, delta: f64 },
    /// `−J Σ ZZ − h_x Σ X − h_z Σ Z`.
    TfimLf { j: f64, hx: f64, hz: f64 },
    /// Nearest-neighbour Haar U(4) brickwork circuit, open boundary.
    Brickwork,
}

impl Model {
    pub fn name(&self) -> &'static str {
        match self {
            Model::Xxz { .. } => "xxz",
            Model::TfimLf { .. } => "tfim_lf",
            Model::Brickwork => "brickwork",
        }
    }

    pub fn is_hamiltonian(&self) -> bool {
        !matches!(self, Model::Brickwork)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialState {
    Neel,
    AllUp,
    RandomProduct(ProductMeasure),
    Custom(StateVector),
}

/// Everything needed to reproduce an ensemble of trajectories.
#[derive(Debug, Clone, PartialEq)]
pub struct QuenchSpec {
    pub model: Model,
    pub n_qubits: u32,
    pub boundary: Boundary,
    /// Time step of Hamiltonian models; ignored by the circuit.
    pub dt: f64,
    /// Number of time steps (circuit layers for the brickwork model).
    pub n_steps: usize,
    pub krylov_dim: usize,
    pub samples: usize,
    /// Sample `s` draws from `rng.substream(s)`.
    pub rng: RngSpec,
    pub initial: InitialState,
    /// Keep per-sample traces in the output.
    pub record_samples: bool,
    pub workers: usize,
}

impl QuenchSpec {
    fn base(model: Model, n_qubits: u32, boundary: Boundary, initial: InitialState) -> Self {
        Self {
            model,
            n_qubits,
            boundary,
            dt: DEFAULT_DT,
            n_steps: 0,
            krylov_dim: DEFAULT_KRYLOV_DIM,
            samples: 1,
            rng: RngSpec::default(),
            initial,
            record_samples: false,
            workers: 1,
        }
    }

    /// XXZ chain with `J = 1`, `Δ = 0.5`, periodic, from the Néel state.
    pub fn xxz(n_qubits: u32) -> Self {
        Self::base(Model::Xxz { j: 1.0, delta: 0.5 }, n_qubits, Boundary::Periodic, InitialState::Neel)
    }

    /// TFIM with longitudinal field, `J = 1`, `h_x = h_z = 1.5`, periodic,
    /// from random product states.
    pub fn tfim_lf(n_qubits: u32) -> Self {
        Self::base(
            Model::TfimLf { j: 1.0, hx: 1.5, hz: 1.5 },
            n_qubits,
            Boundary::Periodic,
            InitialState::RandomProduct(ProductMeasure::UniformAngles),
        )
    }

    /// Brickwork circuit from `|↑…↑⟩`.
    pub fn brickwork(n_qubits: u32) -> Self {
        Self::base(Model::Brickwork, n_qubits, Boundary::Open, InitialState::AllUp)
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::invalid("need at least one sample"));
        }
        match self.model {
            Model::Brickwork => {
                super::brickwork_bonds(self.n_qubits)?;
            }
            _ => {
                if self.n_qubits < 2 {
                    return Err(Error::invalid("spin-chain models need at least two sites"));
                }
                if !(self.dt.is_finite() && self.dt > 0.0) {
                    return Err(Error::invalid("dt must be positive and finite"));
                }
                if self.krylov_dim < 2 {
                    return Err(Error::invalid("Krylov dimension must be at least 2"));
                }
            }
        }
        if let InitialState::Custom(psi) = &self.initial {
            if psi.n_qubits() != self.n_qubits {
                return Err(Error::invalid(alloc::format!(
                    "initial state has {} qubits, spec has {}",
                    psi.n_qubits(),
                    self.n_qubits
                )));
            }
        }
        Ok(())
    }

    /// Time stamp of step `k`.
    pub fn time_at(&self, k: usize) -> f64 {
        if self.model.is_hamiltonian() {
            k as f64 * self.dt
        } else {
            k as f64
        }
    }
}

/// Ensemble-averaged M₂ time series.
#[derive(Debug, Clone, PartialEq)]
pub struct SreTrace {
    pub times: Vec<f64>,
    pub m2_mean: Vec<f64>,
    /// NaN when there is a single sample.
    pub m2_stderr: Vec<f64>,
    /// `samples[s][k]`, present when `spec.record_samples` is set.
    pub samples: Option<Vec<Vec<f64>>>,
    pub spec: QuenchSpec,
    /// Largest `|‖ψ‖ − 1|` seen before any renormalization.
    pub max_norm_drift: f64,
}

struct Trajectory {
    m2: Vec<f64>,
    drift: f64,
}

fn initial_state<R: rand::Rng + ?Sized>(spec: &QuenchSpec, rng: &mut R) -> Result<StateVector> {
    match &spec.initial {
        InitialState::Neel => neel_state(spec.n_qubits),
        InitialState::AllUp => all_up_state(spec.n_qubits),
        InitialState::RandomProduct(measure) => random_product_state_from(spec.n_qubits, rng, *measure),
        InitialState::Custom(psi) => Ok(psi.clone()),
    }
}

fn trajectory<F>(spec: &QuenchSpec, h: Option<&Hamiltonian>, sample: usize, eval: &F) -> Result<Trajectory>
where
    F: Fn(&StateVector) -> Result<f64>,
{
    let mut rng = spec.rng.substream(sample as u64).rng();
    let mut psi = initial_state(spec, &mut rng)?;
    let mut m2 = Vec::with_capacity(spec.n_steps + 1);
    let mut drift: f64 = 0.0;
    m2.push(eval(&psi)?);
    match h {
        Some(h) => {
            let mut prop = KrylovPropagator::new(psi.dim(), spec.krylov_dim)?;
            for _ in 0..spec.n_steps {
                drift = drift.max(crate::math::abs(prop.step(h, &mut psi, spec.dt)?));
                m2.push(eval(&psi)?);
            }
        }
        None => {
            for _ in 0..spec.n_steps {
                brickwork_step(&mut psi, &mut rng)?;
                drift = drift.max(crate::math::abs(psi.norm() - 1.0));
                m2.push(eval(&psi)?);
            }
        }
    }
    Ok(Trajectory { m2, drift })
}

/// Runs the ensemble with an arbitrary M₂ evaluator.
///
/// Samples are spread over `spec.workers` threads; aggregation is in sample
/// order, so the trace does not depend on the worker count as long as `eval`
/// does not.
pub fn run_quench_with<F>(spec: &QuenchSpec, eval: F) -> Result<SreTrace>
where
    F: Fn(&StateVector) -> Result<f64> + Sync,
{
    spec.validate()?;
    let h = if spec.model.is_hamiltonian() {
        Some(Hamiltonian::new(&spec.model, spec.n_qubits, spec.boundary)?)
    } else {
        None
    };
    let runs: Vec<Result<Trajectory>> =
        parallel::map_indexed(spec.samples, spec.workers, |s| trajectory(spec, h.as_ref(), s, &eval));
    let runs: Vec<Trajectory> = runs.into_iter().collect::<Result<_>>()?;

    let points = spec.n_steps + 1;
    let mut m2_mean = Vec::with_capacity(points);
    let mut m2_stderr = Vec::with_capacity(points);
    let mut column = Vec::with_capacity(runs.len());
    for k in 0..points {
        column.clear();
        column.extend(runs.iter().map(|r| r.m2[k]));
        let (mean, se) = reduce::mean_stderr(&column);
        m2_mean.push(mean);
        m2_stderr.push(se);
    }
    let max_norm_drift = runs.iter().fold(0.0f64, |acc, r| acc.max(r.drift));
    Ok(SreTrace {
        times: (0..points).map(|k| spec.time_at(k)).collect(),
        m2_mean,
        m2_stderr,
        samples: spec.record_samples.then(|| runs.into_iter().map(|r| r.m2).collect()),
        spec: spec.clone(),
        max_norm_drift,
    })
}

/// Runs the ensemble, evaluating M₂ with `method` at every recorded time.
pub fn run_quench(spec: &QuenchSpec, method: Method) -> Result<SreTrace> {
    // Threads go to samples first; leftover parallelism goes to each evaluation.
    let inner = if spec.samples >= spec.workers { 1 } else { spec.workers };
    match method {
        Method::XorFwht => run_quench_with(spec, |psi| Ok(sre2_exact(psi, inner)?.m2)),
        Method::BruteForce => {
            let opts = OracleOptions { workers: inner, ..OracleOptions::default() };
            run_quench_with(spec, |psi| Ok(sre2_brute_force_with(psi, &opts)?.m2))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_steps_gives_initial_value() {
        let mut spec = QuenchSpec::xxz(6);
        spec.n_steps = 0;
        let trace = run_quench(&spec, Method::XorFwht).unwrap();
        assert_eq!(trace.times, [0.0]);
        assert_eq!(trace.m2_mean, [0.0]);
        assert!(trace.m2_stderr[0].is_nan());

        let mut spec = QuenchSpec::brickwork(4);
        spec.n_steps = 0;
        assert_eq!(run_quench(&spec, Method::XorFwht).unwrap().m2_mean, [0.0]);
    }

    #[test]
    fn validation() {
        let mut spec = QuenchSpec::brickwork(5);
        assert!(spec.validate().is_err());
        spec.n_qubits = 4;
        spec.samples = 0;
        assert!(spec.validate().is_err());
        let mut spec = QuenchSpec::xxz(4);
        spec.dt = -0.1;
        assert!(spec.validate().is_err());
        spec.dt = 0.1;
        spec.initial = InitialState::Custom(crate::state::neel_state(3).unwrap());
        assert!(spec.validate().is_err());
    }

    #[test]
    fn worker_count_does_not_change_trace() {
        let mut spec = QuenchSpec::tfim_lf(6);
        spec.n_steps = 4;
        spec.dt = 0.1;
        spec.samples = 3;
        spec.rng = RngSpec::new(9, 0);
        let a = run_quench(&spec, Method::XorFwht).unwrap();
        spec.workers = 3;
        let b = run_quench(&spec, Method::XorFwht).unwrap();
        assert_eq!(a.m2_mean, b.m2_mean);
        assert_eq!(a.m2_stderr, b.m2_stderr);
    }
}
