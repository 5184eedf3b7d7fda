//! Instantly decodable network coding (IDNC) over single-hop broadcast
//! erasure channels.
//!
//! A sender broadcasts a frame of `N` packets to `M` receivers. Each receiver
//! misses a random subset (its *Wants* set) and holds the rest (its *Has*
//! set). During the recovery phase the sender transmits XOR combinations that
//! every targeted receiver can decode instantly from its side information.
//! The combinations that are simultaneously decodable form cliques of the
//! IDNC graph, whose edges are the pairwise coding opportunities.
//!
//! The crate provides:
//!
//! - [`state`]: feedback sets, the erasure channel, and all randomness;
//! - [`graph`]: the IDNC graph, its closed-form edge count, and the coding
//!   density metric;
//! - [`evolution`]: the exact per-transmission change of the edge set size
//!   and the common-packet dominance check;
//! - [`expectation`]: expected degree / edge-set formulas over feedback set
//!   cardinalities and the ordering predicates derived from them;
//! - [`strategies`]: clique selection (random, max cardinality, and three
//!   weighted variants) with exact branch-and-bound and greedy solvers;
//! - [`sim`]: frame-level simulation, density trajectories, completion delay
//!   and receiver goodput, with CSV export;
//! - [`verify`]: self-check suites that compare every closed form against an
//!   independent oracle (enumeration, rebuild-and-count, or Monte Carlo);
//! - [`config`]: the experiment spec ingested from a TOML file.

pub mod config;
pub mod error;
pub mod evolution;
pub mod expectation;
pub mod graph;
pub mod rng;
pub mod sim;
pub mod state;
pub mod strategies;
pub mod verify;

pub use config::{ExperimentSpec, Mode};
pub use error::{IdncError, Result};
pub use evolution::{
    check_common_packet_dominance, exact_evolution, pairwise_evolution, DominanceReport,
    EvolutionDelta, PairCase,
};
pub use expectation::{
    expected_degree, expected_edge_count, expected_edge_evolution, Cardinalities,
    ExpectedEvolutionTerms,
};
pub use graph::{build_graph, edge_count_formula, vertex_degree, IdncGraph, PairwiseStats, Vertex};
pub use sim::{compare_strategies, run_experiment, run_frame, ExperimentResult, FrameTrace};
pub use state::{
    init_frame, sample_outcome, ChannelConfig, FeedbackState, FrameConfig, PacketSet,
    ReceptionOutcome,
};
pub use strategies::{
    assign_weights, select_exact, select_greedy, select_random, SolverKind, StrategyConfig,
    StrategyKind, TransmissionPlan, VertexWeights,
};
