//! Clique selection strategies over the IDNC graph.
//!
//! Every transmission serves a clique: a set of mutually adjacent request
//! vertices with at most one vertex per receiver. The strategies differ only
//! in the vertex weights handed to a maximum-weight-clique solver:
//!
//! - `rnd`: no weights; grow a maximal clique by uniformly random choices;
//! - `mc`: unit weights (maximum cardinality);
//! - `mwc-r`: the receiver's reception probability `q_i`;
//! - `mowps`: `|Ω_j|^n` where `Ω_j` is the set of receivers wanting packet
//!   `j` (serve the most wanted packets);
//! - `wort`: `(ψ_i/q_i)^n` (serve the receivers with the most missing
//!   packets and the worst channels).
//!
//! `n` is a biasing exponent, 1.0 by default. The exact solver is a
//! branch-and-bound with weight-sum pruning; the greedy solver follows the
//! adjacency-modified weights `ω_ij = w_ij · Σ_{v_kl adjacent} w_kl`,
//! recomputed over the shrinking candidate set each iteration, which keeps a
//! selection at `O(M²N)`.

use std::str::FromStr;

use rand::Rng;

use crate::error::{IdncError, Result};
use crate::graph::{bits, IdncGraph, Vertex};
use crate::state::FeedbackState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StrategyKind {
    Rnd,
    Mc,
    MwcR,
    MoWps,
    Wort,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 5] = [
        StrategyKind::Rnd,
        StrategyKind::Mc,
        StrategyKind::MwcR,
        StrategyKind::MoWps,
        StrategyKind::Wort,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            StrategyKind::Rnd => "rnd",
            StrategyKind::Mc => "mc",
            StrategyKind::MwcR => "mwc-r",
            StrategyKind::MoWps => "mowps",
            StrategyKind::Wort => "wort",
        }
    }
}

impl std::fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StrategyKind {
    type Err = IdncError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rnd" => Ok(StrategyKind::Rnd),
            "mc" => Ok(StrategyKind::Mc),
            "mwc-r" | "mwcr" => Ok(StrategyKind::MwcR),
            "mowps" => Ok(StrategyKind::MoWps),
            "wort" => Ok(StrategyKind::Wort),
            other => Err(IdncError::Config(format!(
                "unknown strategy '{other}' (expected rnd | mc | mwc-r | mowps | wort)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolverKind {
    Exact,
    Greedy,
}

impl SolverKind {
    pub fn name(&self) -> &'static str {
        match self {
            SolverKind::Exact => "exact",
            SolverKind::Greedy => "greedy",
        }
    }
}

impl std::fmt::Display for SolverKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SolverKind {
    type Err = IdncError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "exact" => Ok(SolverKind::Exact),
            "greedy" => Ok(SolverKind::Greedy),
            other => Err(IdncError::Config(format!(
                "unknown solver '{other}' (expected exact | greedy)"
            ))),
        }
    }
}

pub const DEFAULT_EXACT_SIZE_LIMIT: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrategyConfig {
    pub kind: StrategyKind,
    pub solver: SolverKind,
    /// Biasing exponent `n` in the mowps/wort weights.
    pub bias: f64,
    /// The exact solver refuses graphs above this vertex count.
    pub exact_size_limit: usize,
}

impl StrategyConfig {
    pub fn new(kind: StrategyKind, solver: SolverKind) -> Self {
        Self {
            kind,
            solver,
            bias: 1.0,
            exact_size_limit: DEFAULT_EXACT_SIZE_LIMIT,
        }
    }

    pub fn with_bias(mut self, bias: f64) -> Self {
        self.bias = bias;
        self
    }

    pub fn with_exact_size_limit(mut self, limit: usize) -> Self {
        self.exact_size_limit = limit;
        self
    }
}

/// Base weights `w_ij` per vertex plus the per-packet demand counts
/// `Ω_j = |{i : j ∈ W_i}|`.
#[derive(Debug, Clone)]
pub struct VertexWeights {
    base: Vec<f64>,
    demand: Vec<usize>,
}

impl VertexWeights {
    pub fn unit(graph: &IdncGraph) -> Self {
        Self {
            base: vec![1.0; graph.vertex_count()],
            demand: Vec::new(),
        }
    }

    pub fn from_base(base: Vec<f64>) -> Self {
        Self {
            base,
            demand: Vec::new(),
        }
    }

    pub fn base(&self) -> &[f64] {
        &self.base
    }

    /// `|Ω_j|` for packet `j` (zero when no receiver wants it).
    pub fn demand(&self, packet: usize) -> usize {
        self.demand.get(packet - 1).copied().unwrap_or(0)
    }
}

/// Computes the strategy's vertex weights for a graph built from `state`.
pub fn assign_weights(
    kind: StrategyKind,
    graph: &IdncGraph,
    state: &FeedbackState,
    bias: f64,
) -> VertexWeights {
    let mut demand = vec![0usize; state.num_packets()];
    for i in 1..=state.num_receivers() {
        for j in state.wants(i).iter() {
            demand[j - 1] += 1;
        }
    }
    let base = graph
        .vertices()
        .iter()
        .map(|v| match kind {
            StrategyKind::Rnd | StrategyKind::Mc => 1.0,
            StrategyKind::MwcR => state.frame().reception_prob(v.receiver),
            StrategyKind::MoWps => (demand[v.packet - 1] as f64).powf(bias),
            StrategyKind::Wort => {
                let psi = state.wants_count(v.receiver) as f64;
                let q = state.frame().reception_prob(v.receiver);
                (psi / q).powf(bias)
            }
        })
        .collect();
    VertexWeights { base, demand }
}

/// Adjacency-modified weights over the full graph:
/// `ω_ij = w_ij · Σ_{v_kl adjacent to v_ij} w_kl`.
pub fn modified_weights(graph: &IdncGraph, weights: &VertexWeights) -> Vec<f64> {
    (0..graph.vertex_count())
        .map(|v| {
            weights.base[v]
                * bits::ones(graph.neighbor_row(v))
                    .map(|u| weights.base[u])
                    .sum::<f64>()
        })
        .collect()
}

/// A chosen clique: the vertices to XOR together, at most one per receiver.
/// The targeted set is the receivers of those vertices; `packet_for` gives
/// the packet that serves each of them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransmissionPlan {
    vertices: Vec<Vertex>,
}

impl TransmissionPlan {
    pub fn empty() -> Self {
        Self { vertices: Vec::new() }
    }

    /// Builds a plan from clique vertices. Rejects two vertices of the same
    /// receiver; adjacency is checked against a state by [`Self::validate_for`].
    pub fn from_vertices(mut vertices: Vec<Vertex>) -> Result<Self> {
        vertices.sort_unstable();
        if vertices.windows(2).any(|p| p[0].receiver == p[1].receiver) {
            return Err(IdncError::InvalidPlan(
                "a clique can include at most one vertex per receiver".into(),
            ));
        }
        Ok(Self { vertices })
    }

    pub fn from_indices(graph: &IdncGraph, indices: &[usize]) -> Result<Self> {
        Self::from_vertices(indices.iter().map(|&i| graph.vertex(i)).collect())
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// The targeted receivers, ascending.
    pub fn targeted(&self) -> impl Iterator<Item = usize> + '_ {
        self.vertices.iter().map(|v| v.receiver)
    }

    pub fn targets(&self, receiver: usize) -> bool {
        self.packet_for(receiver).is_some()
    }

    /// The packet targeting `receiver`, if it is in the targeted set.
    pub fn packet_for(&self, receiver: usize) -> Option<usize> {
        self.vertices
            .binary_search_by_key(&receiver, |v| v.receiver)
            .ok()
            .map(|idx| self.vertices[idx].packet)
    }

    /// Checks that the plan is a clique of the state's graph: every packet is
    /// wanted by its receiver and every vertex pair satisfies C1 or C2.
    pub fn validate_for(&self, state: &FeedbackState) -> Result<()> {
        for v in &self.vertices {
            if v.receiver == 0
                || v.receiver > state.num_receivers()
                || v.packet == 0
                || v.packet > state.num_packets()
            {
                return Err(IdncError::InvalidPlan(format!("vertex {v} out of range")));
            }
            if !state.wants(v.receiver).contains(v.packet) {
                return Err(IdncError::InvalidPlan(format!(
                    "receiver {} does not want packet {}",
                    v.receiver, v.packet
                )));
            }
        }
        for (a, va) in self.vertices.iter().enumerate() {
            for vb in &self.vertices[a + 1..] {
                let c1 = va.packet == vb.packet;
                let c2 = state.has(vb.receiver).contains(va.packet)
                    && state.has(va.receiver).contains(vb.packet);
                if !(c1 || c2) {
                    return Err(IdncError::InvalidPlan(format!(
                        "vertices {va} and {vb} are not adjacent"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Total base weight, summed in vertex order against a graph's weights.
    pub fn weight(&self, graph: &IdncGraph, weights: &VertexWeights) -> f64 {
        self.vertices
            .iter()
            .map(|v| weights.base[graph.index_of(*v).expect("plan vertex in graph")])
            .sum()
    }
}

/// Canonical clique weight: summed over ascending vertex indices, so that two
/// solvers evaluating the same clique get bit-identical totals.
pub(crate) fn clique_weight(weights: &VertexWeights, sorted_indices: &[usize]) -> f64 {
    sorted_indices.iter().map(|&i| weights.base[i]).sum()
}

/// `true` when clique `a` beats clique `b` under the solver's total order:
/// larger weight, then larger cardinality, then lexicographically smaller
/// sorted index list. Both lists must be sorted ascending.
pub(crate) fn clique_beats(
    weights: &VertexWeights,
    a: &[usize],
    b: &[usize],
) -> bool {
    const EPS: f64 = 1e-9;
    let (wa, wb) = (clique_weight(weights, a), clique_weight(weights, b));
    if wa > wb + EPS {
        return true;
    }
    if wa < wb - EPS {
        return false;
    }
    match a.len().cmp(&b.len()) {
        std::cmp::Ordering::Greater => true,
        std::cmp::Ordering::Less => false,
        std::cmp::Ordering::Equal => a < b,
    }
}

/// Exact maximum-weight clique by branch-and-bound with weight-sum pruning.
/// Ties break toward larger cardinality, then the lexicographically smallest
/// vertex list. Refuses graphs above `limit` vertices.
pub fn select_exact(
    graph: &IdncGraph,
    weights: &VertexWeights,
    limit: usize,
) -> Result<TransmissionPlan> {
    let n = graph.vertex_count();
    if n > limit {
        return Err(IdncError::ExactSizeLimit {
            vertices: n,
            limit,
        });
    }
    if n == 0 {
        return Ok(TransmissionPlan::empty());
    }
    if weights.base.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(IdncError::InvalidPlan(
            "exact solver requires finite nonnegative weights".into(),
        ));
    }

    // Branching order: heavy vertices first tightens the bound early.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        weights.base[b]
            .partial_cmp(&weights.base[a])
            .expect("finite weights")
            .then(a.cmp(&b))
    });

    let mut best: Vec<usize> = Vec::new();
    let mut current: Vec<usize> = Vec::new();
    branch(graph, weights, &order, &mut current, &mut best);

    TransmissionPlan::from_indices(graph, &best)
}

fn branch(
    graph: &IdncGraph,
    weights: &VertexWeights,
    candidates: &[usize],
    current: &mut Vec<usize>,
    best: &mut Vec<usize>,
) {
    let mut sorted = current.clone();
    sorted.sort_unstable();
    if clique_beats(weights, &sorted, best) {
        *best = sorted;
    }

    let current_weight: f64 = current.iter().map(|&v| weights.base[v]).sum();
    let best_weight = clique_weight(weights, best);
    let mut remaining: f64 = candidates.iter().map(|&v| weights.base[v]).sum();
    for (pos, &v) in candidates.iter().enumerate() {
        // Even taking every remaining candidate cannot beat the incumbent.
        // Strict inequality keeps exact ties alive for the tie-break.
        if current_weight + remaining < best_weight - 1e-9 {
            return;
        }
        let next: Vec<usize> = candidates[pos + 1..]
            .iter()
            .copied()
            .filter(|&u| graph.are_adjacent(v, u))
            .collect();
        current.push(v);
        branch(graph, weights, &next, current, best);
        current.pop();
        remaining -= weights.base[v];
    }
}

/// Greedy maximal clique under adjacency-modified weights: each iteration
/// recomputes `ω` over the remaining candidates, takes the argmax (ties:
/// lexicographically smallest vertex), and keeps only common neighbors.
pub fn select_greedy(graph: &IdncGraph, weights: &VertexWeights) -> TransmissionPlan {
    let n = graph.vertex_count();
    if n == 0 {
        return TransmissionPlan::empty();
    }
    let w = &weights.base;
    let mut candidates = bits::full(n);
    candidates.resize(graph.words(), 0);
    let mut clique = Vec::new();
    while !bits::is_empty(&candidates) {
        let mut best: Option<(f64, usize)> = None;
        for v in bits::ones(&candidates) {
            let omega: f64 = w[v]
                * bits::ones(&bits::and(graph.neighbor_row(v), &candidates))
                    .map(|u| w[u])
                    .sum::<f64>();
            if best.map_or(true, |(bw, _)| omega > bw) {
                best = Some((omega, v));
            }
        }
        let (_, v) = best.expect("candidates nonempty");
        clique.push(v);
        bits::and_assign(&mut candidates, graph.neighbor_row(v));
    }
    TransmissionPlan::from_indices(graph, &clique).expect("greedy output is a clique")
}

/// Grows a maximal clique by repeatedly adding a uniformly random vertex
/// adjacent to everything chosen so far.
pub fn select_random(graph: &IdncGraph, rng: &mut impl Rng) -> TransmissionPlan {
    let n = graph.vertex_count();
    if n == 0 {
        return TransmissionPlan::empty();
    }
    let mut candidates = bits::full(n);
    candidates.resize(graph.words(), 0);
    let mut clique = Vec::new();
    while !bits::is_empty(&candidates) {
        let options: Vec<usize> = bits::ones(&candidates).collect();
        let v = options[rng.random_range(0..options.len())];
        clique.push(v);
        bits::and_assign(&mut candidates, graph.neighbor_row(v));
    }
    TransmissionPlan::from_indices(graph, &clique).expect("random output is a clique")
}

/// Strategy dispatcher: weights per `cfg.kind`, solved per `cfg.solver`
/// (`rnd` draws from the provided stream instead).
pub fn select(
    graph: &IdncGraph,
    state: &FeedbackState,
    cfg: &StrategyConfig,
    rng: &mut impl Rng,
) -> Result<TransmissionPlan> {
    if cfg.kind == StrategyKind::Rnd {
        return Ok(select_random(graph, rng));
    }
    let weights = assign_weights(cfg.kind, graph, state, cfg.bias);
    match cfg.solver {
        SolverKind::Exact => select_exact(graph, &weights, cfg.exact_size_limit),
        SolverKind::Greedy => Ok(select_greedy(graph, &weights)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_graph;
    use crate::rng::derive_rng;
    use crate::state::{FrameConfig, PacketSet};
    use std::sync::Arc;

    fn six_receiver_graph() -> IdncGraph {
        let wants: Vec<PacketSet> = (1..=6).map(|i| PacketSet::from_iter([i])).collect();
        let has = vec![
            PacketSet::from_iter([2, 3, 4]),
            PacketSet::from_iter([1, 3, 5]),
            PacketSet::from_iter([1, 2, 6]),
            PacketSet::from_iter([1]),
            PacketSet::from_iter([2]),
            PacketSet::from_iter([3]),
        ];
        IdncGraph::from_sets(&wants, &has)
    }

    fn state_from(wants: Vec<PacketSet>, n: usize, q: f64) -> FeedbackState {
        let frame = Arc::new(FrameConfig::uniform(wants.len(), n, q, 0).unwrap());
        FeedbackState::from_wants(frame, wants).unwrap()
    }

    #[test]
    fn strategy_names_round_trip() {
        for kind in StrategyKind::ALL {
            assert_eq!(kind.name().parse::<StrategyKind>().unwrap(), kind);
        }
        assert!("bogus".parse::<StrategyKind>().is_err());
        assert_eq!("exact".parse::<SolverKind>().unwrap(), SolverKind::Exact);
        assert!("simplex".parse::<SolverKind>().is_err());
    }

    #[test]
    fn unit_weights_for_mc() {
        let state = state_from(
            vec![PacketSet::from_iter([1, 2]), PacketSet::from_iter([2, 3])],
            3,
            0.8,
        );
        let graph = build_graph(&state);
        let w = assign_weights(StrategyKind::Mc, &graph, &state, 1.0);
        assert!(w.base().iter().all(|&x| x == 1.0));
    }

    #[test]
    fn mowps_weights_on_six_receiver_scenario() {
        // Every packet is wanted by exactly one receiver, so all weights are 1.
        let wants: Vec<PacketSet> = (1..=6).map(|i| PacketSet::from_iter([i])).collect();
        let state = state_from(wants, 6, 0.9);
        let graph = build_graph(&state);
        let w = assign_weights(StrategyKind::MoWps, &graph, &state, 1.0);
        assert!(w.base().iter().all(|&x| x == 1.0));
        for j in 1..=6 {
            assert_eq!(w.demand(j), 1);
        }
    }

    #[test]
    fn wort_weights_direct_formula() {
        let frame = Arc::new(FrameConfig::new(2, 3, vec![0.5, 0.9], 0).unwrap());
        let state = FeedbackState::from_wants(
            frame,
            vec![PacketSet::from_iter([1, 2]), PacketSet::from_iter([3])],
        )
        .unwrap();
        let graph = build_graph(&state);
        let w = assign_weights(StrategyKind::Wort, &graph, &state, 1.0);
        // Vertices sorted: (1,1), (1,2), (2,3).
        assert!((w.base()[0] - 4.0).abs() < 1e-12);
        assert!((w.base()[1] - 4.0).abs() < 1e-12);
        assert!((w.base()[2] - 1.0 / 0.9).abs() < 1e-12);
    }

    #[test]
    fn mwc_r_weights_are_reception_probs() {
        let frame = Arc::new(FrameConfig::new(2, 2, vec![0.3, 0.7], 0).unwrap());
        let state = FeedbackState::from_wants(
            frame,
            vec![PacketSet::from_iter([1]), PacketSet::from_iter([1])],
        )
        .unwrap();
        let graph = build_graph(&state);
        let w = assign_weights(StrategyKind::MwcR, &graph, &state, 1.0);
        assert_eq!(w.base(), &[0.3, 0.7]);
    }

    #[test]
    fn exact_finds_triangle_in_scenario() {
        let graph = six_receiver_graph();
        let weights = VertexWeights::unit(&graph);
        let plan = select_exact(&graph, &weights, 60).unwrap();
        let expected: Vec<Vertex> = (1..=3).map(|i| Vertex::new(i, i)).collect();
        assert_eq!(plan.vertices(), expected.as_slice());
        assert!((plan.weight(&graph, &weights) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn exact_single_vertex_graph() {
        let state = state_from(vec![PacketSet::from_iter([2])], 3, 0.5);
        let graph = build_graph(&state);
        let plan = select_exact(&graph, &VertexWeights::unit(&graph), 60).unwrap();
        assert_eq!(plan.vertices(), &[Vertex::new(1, 2)]);
    }

    #[test]
    fn exact_respects_size_limit() {
        let graph = six_receiver_graph();
        let err = select_exact(&graph, &VertexWeights::unit(&graph), 4).unwrap_err();
        assert!(matches!(
            err,
            IdncError::ExactSizeLimit { vertices: 6, limit: 4 }
        ));
    }

    #[test]
    fn greedy_finds_triangle_in_scenario() {
        // Initial ω: triangle vertices score 3 (three unit neighbors), the
        // pendant vertices score 1, so the greedy walk stays in the triangle.
        let graph = six_receiver_graph();
        let weights = VertexWeights::unit(&graph);
        let omega = modified_weights(&graph, &weights);
        assert_eq!(omega, vec![3.0, 3.0, 3.0, 1.0, 1.0, 1.0]);
        let plan = select_greedy(&graph, &weights);
        let expected: Vec<Vertex> = (1..=3).map(|i| Vertex::new(i, i)).collect();
        assert_eq!(plan.vertices(), expected.as_slice());
    }

    #[test]
    fn greedy_on_empty_graph_is_empty() {
        let state = state_from(vec![PacketSet::empty()], 2, 0.5);
        let graph = build_graph(&state);
        assert!(select_greedy(&graph, &VertexWeights::unit(&graph)).is_empty());
    }

    #[test]
    fn greedy_takes_every_vertex_of_a_complete_graph() {
        // Four receivers each missing only their own packet: every pair is
        // adjacent via C2, and equal weights mean the whole graph is served.
        let wants: Vec<PacketSet> = (1..=4).map(|i| PacketSet::from_iter([i])).collect();
        let state = state_from(wants, 4, 0.5);
        let graph = build_graph(&state);
        assert_eq!(graph.edge_count(), 6);
        let plan = select_greedy(&graph, &VertexWeights::unit(&graph));
        assert_eq!(plan.len(), 4);
    }

    #[test]
    fn greedy_output_is_maximal_clique() {
        for seed in 0..200u64 {
            let mut rng = derive_rng(seed, &[11]);
            let m = 2 + (seed as usize % 5);
            let n = 2 + (seed as usize % 6);
            let frame = Arc::new(FrameConfig::uniform(m, n, 0.5, seed).unwrap());
            let state = crate::state::init_frame_with(&frame, &mut rng);
            let graph = build_graph(&state);
            let weights = assign_weights(StrategyKind::Wort, &graph, &state, 1.0);
            let plan = select_greedy(&graph, &weights);
            plan.validate_for(&state).unwrap();
            assert_eq!(plan.is_empty(), graph.vertex_count() == 0);
            // Maximality: no vertex is adjacent to the whole clique.
            let chosen: Vec<usize> = plan
                .vertices()
                .iter()
                .map(|&v| graph.index_of(v).unwrap())
                .collect();
            for v in 0..graph.vertex_count() {
                if chosen.contains(&v) {
                    continue;
                }
                assert!(
                    !chosen.iter().all(|&c| graph.are_adjacent(v, c)),
                    "vertex {v} extends the clique"
                );
            }
        }
    }

    #[test]
    fn random_selection_is_seeded_and_maximal() {
        let graph = six_receiver_graph();
        let mut rng = derive_rng(5, &[1]);
        let plan_a = select_random(&graph, &mut rng);
        let mut rng = derive_rng(5, &[1]);
        let plan_b = select_random(&graph, &mut rng);
        assert_eq!(plan_a, plan_b, "same stream, same plan");
        assert!(!plan_a.is_empty());

        // Single-edge graph: the only maximal clique is both endpoints.
        let state = state_from(
            vec![PacketSet::from_iter([1]), PacketSet::from_iter([1])],
            1,
            0.5,
        );
        let graph = build_graph(&state);
        let plan = select_random(&graph, &mut derive_rng(9, &[2]));
        assert_eq!(plan.len(), 2);
    }

    #[test]
    fn plan_rejects_duplicate_receiver() {
        assert!(TransmissionPlan::from_vertices(vec![
            Vertex::new(1, 1),
            Vertex::new(1, 2)
        ])
        .is_err());
    }

    #[test]
    fn plan_validation_rejects_non_clique() {
        // W_1 = {1,2}, W_2 = {1,3}: vertices (1,2) and (2,1) are not adjacent
        // (packet 1 is still wanted by receiver 1, failing C2).
        let state = state_from(
            vec![PacketSet::from_iter([1, 2]), PacketSet::from_iter([1, 3])],
            3,
            0.5,
        );
        let plan = TransmissionPlan::from_vertices(vec![Vertex::new(1, 2), Vertex::new(2, 1)])
            .unwrap();
        assert!(plan.validate_for(&state).is_err());
        // The common packet is a valid clique.
        let plan = TransmissionPlan::from_vertices(vec![Vertex::new(1, 1), Vertex::new(2, 1)])
            .unwrap();
        plan.validate_for(&state).unwrap();
    }
}
