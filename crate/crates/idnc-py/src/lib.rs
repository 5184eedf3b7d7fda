//! Python bindings: the feedback-state model, the coding-opportunity graph,
//! clique selection, the expectation formulas, and the frame simulator.

use std::collections::HashMap;
use std::sync::Arc;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use idnc::expectation::Cardinalities;
use idnc::rng::{derive_rng, STREAM_CHANNEL, STREAM_SELECT};
use idnc::sim::ExperimentConfig;
use idnc::state::{PacketSet, ReceptionOutcome};
use idnc::strategies::{SolverKind, StrategyConfig, StrategyKind};
use idnc::verify::VerifyParams;
use idnc::{ChannelConfig, IdncError};

fn err(e: IdncError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn strategy_config(strategy: &str, solver: &str, bias: f64) -> PyResult<StrategyConfig> {
    let kind: StrategyKind = strategy.parse().map_err(err)?;
    let solver: SolverKind = solver.parse().map_err(err)?;
    Ok(StrategyConfig::new(kind, solver).with_bias(bias))
}

/// Frame parameters: receiver count, packet count, per-receiver reception
/// probabilities, and the seed all frame randomness derives from.
#[pyclass(frozen)]
struct FrameConfig {
    inner: Arc<idnc::FrameConfig>,
}

#[pymethods]
impl FrameConfig {
    #[new]
    fn new(
        num_receivers: usize,
        num_packets: usize,
        reception_probs: Vec<f64>,
        seed: u64,
    ) -> PyResult<Self> {
        Ok(Self {
            inner: Arc::new(
                idnc::FrameConfig::new(num_receivers, num_packets, reception_probs, seed)
                    .map_err(err)?,
            ),
        })
    }

    /// Same reception probability for every receiver.
    #[staticmethod]
    fn uniform(num_receivers: usize, num_packets: usize, q: f64, seed: u64) -> PyResult<Self> {
        Ok(Self {
            inner: Arc::new(
                idnc::FrameConfig::uniform(num_receivers, num_packets, q, seed).map_err(err)?,
            ),
        })
    }

    #[getter]
    fn num_receivers(&self) -> usize {
        self.inner.num_receivers()
    }

    #[getter]
    fn num_packets(&self) -> usize {
        self.inner.num_packets()
    }

    #[getter]
    fn reception_probs(&self) -> Vec<f64> {
        self.inner.reception_probs().to_vec()
    }
}

/// Per-receiver Wants/Has sets over a frame.
#[pyclass]
struct FeedbackState {
    inner: idnc::FeedbackState,
}

#[pymethods]
impl FeedbackState {
    /// Builds a state from explicit Wants sets (packet id lists, 1-based).
    #[staticmethod]
    fn from_wants(frame: &FrameConfig, wants: Vec<Vec<usize>>) -> PyResult<Self> {
        let sets = wants.into_iter().map(PacketSet::from_iter).collect();
        Ok(Self {
            inner: idnc::FeedbackState::from_wants(Arc::clone(&frame.inner), sets)
                .map_err(err)?,
        })
    }

    fn wants(&self, receiver: usize) -> Vec<usize> {
        self.inner.wants(receiver).iter().collect()
    }

    fn has(&self, receiver: usize) -> Vec<usize> {
        self.inner.has(receiver).iter().collect()
    }

    fn wants_count(&self, receiver: usize) -> usize {
        self.inner.wants_count(receiver)
    }

    fn is_complete(&self) -> bool {
        self.inner.is_complete()
    }

    /// Applies a transmission given `{receiver: received}` indicators for
    /// exactly the plan's targeted receivers.
    fn apply_transmission(
        &self,
        plan: &TransmissionPlan,
        received: HashMap<usize, bool>,
    ) -> PyResult<Self> {
        let outcome = ReceptionOutcome::from_pairs(received);
        Ok(Self {
            inner: self
                .inner
                .apply_transmission(&plan.inner, &outcome)
                .map_err(err)?,
        })
    }

    fn __repr__(&self) -> String {
        format!("{:?}", self.inner)
    }
}

/// The coding-opportunity graph for one feedback state.
#[pyclass(frozen)]
struct IdncGraph {
    inner: idnc::IdncGraph,
}

#[pymethods]
impl IdncGraph {
    #[getter]
    fn vertex_count(&self) -> usize {
        self.inner.vertex_count()
    }

    #[getter]
    fn edge_count(&self) -> u64 {
        self.inner.edge_count()
    }

    fn coding_density(&self) -> f64 {
        self.inner.coding_density()
    }

    /// Vertices as `(receiver, packet)` pairs, lexicographically ordered.
    fn vertices(&self) -> Vec<(usize, usize)> {
        self.inner
            .vertices()
            .iter()
            .map(|v| (v.receiver, v.packet))
            .collect()
    }

    fn degree(&self, index: usize) -> usize {
        self.inner.degree(index)
    }

    /// Debug export: one edge per line as `i.j k.l`.
    fn edge_list(&self) -> String {
        self.inner.edge_list()
    }

    fn maximal_cliques(&self) -> Vec<Vec<usize>> {
        self.inner.maximal_cliques()
    }
}

/// A chosen clique: the requests served by one XOR transmission.
#[pyclass(frozen)]
struct TransmissionPlan {
    inner: idnc::TransmissionPlan,
}

#[pymethods]
impl TransmissionPlan {
    fn vertices(&self) -> Vec<(usize, usize)> {
        self.inner
            .vertices()
            .iter()
            .map(|v| (v.receiver, v.packet))
            .collect()
    }

    fn targeted(&self) -> Vec<usize> {
        self.inner.targeted().collect()
    }

    fn packet_for(&self, receiver: usize) -> Option<usize> {
        self.inner.packet_for(receiver)
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }
}

/// Aggregated outcome of a simulated experiment.
#[pyclass(frozen)]
struct ExperimentSummary {
    #[pyo3(get)]
    strategy: String,
    #[pyo3(get)]
    mean_delay: f64,
    #[pyo3(get)]
    delay_ci95: f64,
    #[pyo3(get)]
    mean_goodput: f64,
    #[pyo3(get)]
    goodput_ci95: f64,
    #[pyo3(get)]
    mean_density: Vec<f64>,
    #[pyo3(get)]
    survivors: Vec<usize>,
    #[pyo3(get)]
    delays: Vec<usize>,
    #[pyo3(get)]
    trajectory_csv: String,
}

impl From<&idnc::ExperimentResult> for ExperimentSummary {
    fn from(r: &idnc::ExperimentResult) -> Self {
        Self {
            strategy: r.config.strategy.kind.name().to_string(),
            mean_delay: r.mean_delay,
            delay_ci95: r.delay_ci95,
            mean_goodput: r.mean_goodput,
            goodput_ci95: r.goodput_ci95,
            mean_density: r.mean_density.clone(),
            survivors: r.survivors.clone(),
            delays: r.delays.clone(),
            trajectory_csv: idnc::sim::trajectory_csv(r),
        }
    }
}

/// Runs the initial transmission phase with the frame's seed.
#[pyfunction]
fn init_frame(frame: &FrameConfig) -> FeedbackState {
    FeedbackState {
        inner: idnc::init_frame(&frame.inner),
    }
}

#[pyfunction]
fn build_graph(state: &FeedbackState) -> IdncGraph {
    IdncGraph {
        inner: idnc::build_graph(&state.inner),
    }
}

/// Closed-form edge count from the pairwise Wants-set cardinalities.
#[pyfunction]
fn edge_count_formula(state: &FeedbackState) -> u64 {
    idnc::edge_count_formula(&state.inner)
}

/// Closed-form degree of vertex `(receiver, packet)`.
#[pyfunction]
fn vertex_degree(state: &FeedbackState, receiver: usize, packet: usize) -> PyResult<u64> {
    idnc::vertex_degree(&state.inner, idnc::Vertex::new(receiver, packet)).map_err(err)
}

/// Closed-form edge count after a transmission: returns `(before, after)`.
#[pyfunction]
fn exact_evolution(
    state: &FeedbackState,
    plan: &TransmissionPlan,
    received: HashMap<usize, bool>,
) -> PyResult<(u64, u64)> {
    let outcome = ReceptionOutcome::from_pairs(received);
    let delta = idnc::exact_evolution(&state.inner, &plan.inner, &outcome).map_err(err)?;
    Ok((delta.before, delta.after))
}

/// Selects a clique by strategy name (`rnd | mc | mwc-r | mowps | wort`) and
/// solver (`exact | greedy`); `rnd` draws from the given seed.
#[pyfunction]
#[pyo3(signature = (graph, state, strategy, solver="greedy", bias=1.0, seed=0))]
fn select_clique(
    graph: &IdncGraph,
    state: &FeedbackState,
    strategy: &str,
    solver: &str,
    bias: f64,
    seed: u64,
) -> PyResult<TransmissionPlan> {
    let cfg = strategy_config(strategy, solver, bias)?;
    let mut rng = derive_rng(seed, &[0, STREAM_SELECT]);
    Ok(TransmissionPlan {
        inner: idnc::strategies::select(&graph.inner, &state.inner, &cfg, &mut rng)
            .map_err(err)?,
    })
}

/// Samples reception indicators for the plan's targeted receivers.
#[pyfunction]
fn sample_outcome(
    plan: &TransmissionPlan,
    frame: &FrameConfig,
    seed: u64,
) -> HashMap<usize, bool> {
    let mut rng = derive_rng(seed, &[0, STREAM_CHANNEL]);
    let outcome = idnc::sample_outcome(&plan.inner, &frame.inner, &mut rng);
    outcome.receivers().map(|r| (r, outcome.received(r))).collect()
}

/// Expected vertex degree per receiver from Wants-set cardinalities
/// (Has sets are the complements).
#[pyfunction]
fn expected_degree(wants: Vec<usize>, num_packets: usize) -> PyResult<Vec<f64>> {
    let card = Cardinalities::complementary(wants, num_packets).map_err(err)?;
    Ok(idnc::expected_degree(&card))
}

#[pyfunction]
fn expected_edge_count(wants: Vec<usize>, num_packets: usize) -> PyResult<f64> {
    let card = Cardinalities::complementary(wants, num_packets).map_err(err)?;
    Ok(idnc::expected_edge_count(&card))
}

/// Expected edge count after one transmission targeting `targeted`.
#[pyfunction]
fn expected_edge_evolution(
    wants: Vec<usize>,
    num_packets: usize,
    q: Vec<f64>,
    targeted: Vec<usize>,
) -> PyResult<f64> {
    let card = Cardinalities::complementary(wants, num_packets).map_err(err)?;
    idnc::expected_edge_evolution(&card, &q, &targeted).map_err(err)
}

/// Runs one frame end to end; returns `(completion_delay, densities, goodput)`.
#[pyfunction]
#[pyo3(signature = (frame, strategy, solver="greedy", bias=1.0))]
fn run_frame(
    frame: &FrameConfig,
    strategy: &str,
    solver: &str,
    bias: f64,
) -> PyResult<(usize, Vec<f64>, f64)> {
    let cfg = strategy_config(strategy, solver, bias)?;
    let trace = idnc::run_frame(&frame.inner, &cfg).map_err(err)?;
    let goodput = trace.goodput(Default::default());
    Ok((trace.completion_delay, trace.density_per_tx, goodput))
}

fn experiment_config(
    receivers: usize,
    packets: usize,
    erasure_low: f64,
    erasure_high: f64,
    erasure_worst: Option<f64>,
    strategy: StrategyConfig,
    iterations: usize,
    seed: u64,
    verify_evolution: bool,
) -> PyResult<ExperimentConfig> {
    let mut channel = ChannelConfig::new(erasure_low, erasure_high).map_err(err)?;
    if let Some(w) = erasure_worst {
        channel = channel.with_worst_erasure(w).map_err(err)?;
    }
    let mut cfg = ExperimentConfig::new(channel, receivers, packets, strategy, iterations, seed);
    cfg.verify_evolution = verify_evolution;
    Ok(cfg)
}

/// Runs a full experiment: per iteration, fresh erasures from the channel,
/// an initial phase, and a recovery phase; densities are averaged per
/// transmission index over surviving iterations.
#[pyfunction]
#[pyo3(signature = (receivers, packets, erasure_low, erasure_high, strategy,
                     solver="greedy", bias=1.0, iterations=100, seed=1,
                     erasure_worst=None, verify_evolution=false))]
#[allow(clippy::too_many_arguments)]
fn run_experiment(
    receivers: usize,
    packets: usize,
    erasure_low: f64,
    erasure_high: f64,
    strategy: &str,
    solver: &str,
    bias: f64,
    iterations: usize,
    seed: u64,
    erasure_worst: Option<f64>,
    verify_evolution: bool,
) -> PyResult<ExperimentSummary> {
    let cfg = experiment_config(
        receivers,
        packets,
        erasure_low,
        erasure_high,
        erasure_worst,
        strategy_config(strategy, solver, bias)?,
        iterations,
        seed,
        verify_evolution,
    )?;
    let result = idnc::run_experiment(&cfg).map_err(err)?;
    Ok(ExperimentSummary::from(&result))
}

/// Paired comparison of several strategies under common channel randomness.
#[pyfunction]
#[pyo3(signature = (receivers, packets, erasure_low, erasure_high, strategies,
                     solver="greedy", bias=1.0, iterations=100, seed=1))]
#[allow(clippy::too_many_arguments)]
fn compare_strategies(
    receivers: usize,
    packets: usize,
    erasure_low: f64,
    erasure_high: f64,
    strategies: Vec<String>,
    solver: &str,
    bias: f64,
    iterations: usize,
    seed: u64,
) -> PyResult<Vec<ExperimentSummary>> {
    let configs = strategies
        .iter()
        .map(|s| strategy_config(s, solver, bias))
        .collect::<PyResult<Vec<_>>>()?;
    let cfg = experiment_config(
        receivers,
        packets,
        erasure_low,
        erasure_high,
        None,
        configs[0],
        iterations,
        seed,
        false,
    )?;
    let table = idnc::compare_strategies(&cfg, &configs).map_err(err)?;
    Ok(table.results.iter().map(ExperimentSummary::from).collect())
}

/// Runs reduced-size verification suites; returns their summary lines.
/// Raises if any suite fails.
#[pyfunction]
fn verify_quick() -> PyResult<Vec<String>> {
    let outcomes = idnc::verify::run_all(&VerifyParams::quick());
    let lines: Vec<String> = outcomes.iter().map(|o| o.summary_line()).collect();
    if outcomes.iter().any(|o| !o.passed()) {
        return Err(PyValueError::new_err(lines.join("\n")));
    }
    Ok(lines)
}

#[pymodule]
fn idnc_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<FrameConfig>()?;
    m.add_class::<FeedbackState>()?;
    m.add_class::<IdncGraph>()?;
    m.add_class::<TransmissionPlan>()?;
    m.add_class::<ExperimentSummary>()?;
    m.add_function(wrap_pyfunction!(init_frame, m)?)?;
    m.add_function(wrap_pyfunction!(build_graph, m)?)?;
    m.add_function(wrap_pyfunction!(edge_count_formula, m)?)?;
    m.add_function(wrap_pyfunction!(vertex_degree, m)?)?;
    m.add_function(wrap_pyfunction!(exact_evolution, m)?)?;
    m.add_function(wrap_pyfunction!(select_clique, m)?)?;
    m.add_function(wrap_pyfunction!(sample_outcome, m)?)?;
    m.add_function(wrap_pyfunction!(expected_degree, m)?)?;
    m.add_function(wrap_pyfunction!(expected_edge_count, m)?)?;
    m.add_function(wrap_pyfunction!(expected_edge_evolution, m)?)?;
    m.add_function(wrap_pyfunction!(run_frame, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(compare_strategies, m)?)?;
    m.add_function(wrap_pyfunction!(verify_quick, m)?)?;
    Ok(())
}
