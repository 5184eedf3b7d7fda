//! The IDNC graph and its structural quantities.
//!
//! A vertex `(i, j)` stands for receiver `i` requesting packet `j`. Two
//! vertices `(i, j)` and `(k, l)` of distinct receivers are adjacent iff
//!
//! - C1: `j == l` (both miss the same packet), or
//! - C2: `j ∈ H_k` and `l ∈ H_i` (each request is side information at the
//!   other receiver),
//!
//! in which case one XOR transmission serves both requests. The edge count
//! also has a closed form over the pairwise Wants-set cardinalities
//! ([`edge_count_formula`]), which the adjacency construction must match
//! exactly; the verification suites enforce this.

use crate::error::Result;
use crate::state::{FeedbackState, PacketSet};

/// One packet request: receiver `i` misses packet `j`. Ordered
/// lexicographically by `(receiver, packet)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Vertex {
    pub receiver: usize,
    pub packet: usize,
}

impl Vertex {
    pub fn new(receiver: usize, packet: usize) -> Self {
        Self { receiver, packet }
    }
}

impl std::fmt::Display for Vertex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}.{}", self.receiver, self.packet)
    }
}

/// Bit-mask helpers over `&[u64]` words; vertex indices are bit positions.
pub(crate) mod bits {
    pub fn words_for(n: usize) -> usize {
        n.div_ceil(64)
    }

    pub fn set(mask: &mut [u64], idx: usize) {
        mask[idx / 64] |= 1u64 << (idx % 64);
    }

    pub fn get(mask: &[u64], idx: usize) -> bool {
        mask[idx / 64] & (1u64 << (idx % 64)) != 0
    }

    pub fn clear(mask: &mut [u64], idx: usize) {
        mask[idx / 64] &= !(1u64 << (idx % 64));
    }

    pub fn count(mask: &[u64]) -> usize {
        mask.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(mask: &[u64]) -> bool {
        mask.iter().all(|w| *w == 0)
    }

    pub fn and(a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter().zip(b).map(|(x, y)| x & y).collect()
    }

    pub fn and_assign(a: &mut [u64], b: &[u64]) {
        for (x, y) in a.iter_mut().zip(b) {
            *x &= y;
        }
    }

    pub fn full(n: usize) -> Vec<u64> {
        let mut mask = vec![0u64; words_for(n)];
        for idx in 0..n {
            set(&mut mask, idx);
        }
        mask
    }

    pub fn ones(mask: &[u64]) -> impl Iterator<Item = usize> + '_ {
        mask.iter().enumerate().flat_map(|(wi, &word)| {
            let mut w = word;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let tz = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * 64 + tz)
                }
            })
        })
    }
}

/// The coding-opportunity graph for one feedback state. Immutable after
/// construction; adjacency is stored as one bit row per vertex.
#[derive(Debug, Clone)]
pub struct IdncGraph {
    vertices: Vec<Vertex>,
    words: usize,
    rows: Vec<u64>,
    degrees: Vec<usize>,
    edge_count: u64,
}

impl IdncGraph {
    /// Builds the graph from explicit Wants/Has sets (indexed by
    /// receiver - 1). The sets need not partition a frame; adjacency uses C1
    /// and C2 verbatim.
    pub fn from_sets(wants: &[PacketSet], has: &[PacketSet]) -> Self {
        assert_eq!(wants.len(), has.len());
        let mut vertices = Vec::new();
        for (idx, w) in wants.iter().enumerate() {
            for j in w.iter() {
                vertices.push(Vertex::new(idx + 1, j));
            }
        }
        // Receiver blocks are generated in ascending order, so the list is
        // already lexicographic.
        debug_assert!(vertices.windows(2).all(|p| p[0] < p[1]));

        let n = vertices.len();
        let words = bits::words_for(n).max(1);
        let mut rows = vec![0u64; n * words];
        let mut degrees = vec![0usize; n];
        let mut edge_count = 0u64;
        for a in 0..n {
            let va = vertices[a];
            for b in (a + 1)..n {
                let vb = vertices[b];
                if va.receiver == vb.receiver {
                    continue;
                }
                let c1 = va.packet == vb.packet;
                let c2 = has[vb.receiver - 1].contains(va.packet)
                    && has[va.receiver - 1].contains(vb.packet);
                if c1 || c2 {
                    bits::set(&mut rows[a * words..(a + 1) * words], b);
                    bits::set(&mut rows[b * words..(b + 1) * words], a);
                    degrees[a] += 1;
                    degrees[b] += 1;
                    edge_count += 1;
                }
            }
        }
        Self {
            vertices,
            words,
            rows,
            degrees,
            edge_count,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> u64 {
        self.edge_count
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex(&self, idx: usize) -> Vertex {
        self.vertices[idx]
    }

    /// Index of a vertex in the lexicographic ordering.
    pub fn index_of(&self, v: Vertex) -> Option<usize> {
        self.vertices.binary_search(&v).ok()
    }

    /// Adjacency-count degree `Δ_ij`.
    pub fn degree(&self, idx: usize) -> usize {
        self.degrees[idx]
    }

    pub fn are_adjacent(&self, a: usize, b: usize) -> bool {
        bits::get(self.neighbor_row(a), b)
    }

    /// The neighbor bit row of a vertex.
    pub fn neighbor_row(&self, idx: usize) -> &[u64] {
        &self.rows[idx * self.words..(idx + 1) * self.words]
    }

    pub(crate) fn words(&self) -> usize {
        self.words
    }

    /// Edge count over the complete-graph edge count for the same vertex set.
    /// Graphs with at most one vertex are vacuously complete (density 1.0),
    /// so density trajectories end cleanly at frame completion.
    pub fn coding_density(&self) -> f64 {
        let v = self.vertices.len() as f64;
        if v <= 1.0 {
            return 1.0;
        }
        self.edge_count as f64 / (0.5 * v * (v - 1.0))
    }

    /// Debug export: one edge per line as `i.j k.l`, ascending.
    pub fn edge_list(&self) -> String {
        let mut out = String::new();
        for a in 0..self.vertices.len() {
            for b in bits::ones(self.neighbor_row(a)) {
                if b > a {
                    out.push_str(&format!("{} {}\n", self.vertices[a], self.vertices[b]));
                }
            }
        }
        out
    }

    /// All maximal cliques, as sorted vertex-index lists, via Bron–Kerbosch
    /// with pivoting. Intended for small graphs (verification suites).
    pub fn maximal_cliques(&self) -> Vec<Vec<usize>> {
        let n = self.vertices.len();
        let mut cliques = Vec::new();
        if n == 0 {
            return cliques;
        }
        let mut current = Vec::new();
        self.bron_kerbosch(
            &mut current,
            bits::full(n),
            vec![0u64; self.words],
            &mut cliques,
        );
        for c in &mut cliques {
            c.sort_unstable();
        }
        cliques.sort();
        cliques
    }

    fn bron_kerbosch(
        &self,
        current: &mut Vec<usize>,
        candidates: Vec<u64>,
        excluded: Vec<u64>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if bits::is_empty(&candidates) && bits::is_empty(&excluded) {
            out.push(current.clone());
            return;
        }
        // Pivot on the vertex covering most candidates.
        let pivot = bits::ones(&candidates)
            .chain(bits::ones(&excluded))
            .max_by_key(|&u| bits::count(&bits::and(self.neighbor_row(u), &candidates)))
            .expect("candidates or excluded nonempty");
        let mut todo = candidates.clone();
        for (w, nw) in todo.iter_mut().zip(self.neighbor_row(pivot)) {
            *w &= !nw;
        }
        let mut candidates = candidates;
        let mut excluded = excluded;
        for v in bits::ones(&todo.clone()) {
            current.push(v);
            self.bron_kerbosch(
                current,
                bits::and(&candidates, self.neighbor_row(v)),
                bits::and(&excluded, self.neighbor_row(v)),
                out,
            );
            current.pop();
            bits::clear(&mut candidates, v);
            bits::set(&mut excluded, v);
        }
    }
}

/// Builds the IDNC graph of a feedback state: one vertex per `(i, j ∈ W_i)`,
/// adjacency per C1/C2.
pub fn build_graph(state: &FeedbackState) -> IdncGraph {
    IdncGraph::from_sets(state.wants_sets(), &state.has_sets())
}

/// Pairwise Wants-set statistics of receivers `i` and `k`:
/// `ψ_ik = |W_i ∩ W_k|`, `θ_ik = ψ_i - ψ_ik`, `θ_ki = ψ_k - ψ_ik`, and the
/// pairwise edge count `Y_ik = ψ_ik + θ_ik·θ_ki`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairwiseStats {
    pub psi_ik: usize,
    pub theta_ik: usize,
    pub theta_ki: usize,
}

impl PairwiseStats {
    pub fn of(state: &FeedbackState, i: usize, k: usize) -> Self {
        let wi = state.wants(i);
        let wk = state.wants(k);
        let psi_ik = wi.intersection_len(&wk);
        Self {
            psi_ik,
            theta_ik: wi.len() - psi_ik,
            theta_ki: wk.len() - psi_ik,
        }
    }

    /// `θ̂_ik = θ_ik - 1` (can be -1 when the sets coincide).
    pub fn theta_hat_ik(&self) -> i64 {
        self.theta_ik as i64 - 1
    }

    pub fn theta_hat_ki(&self) -> i64 {
        self.theta_ki as i64 - 1
    }

    /// `Y_ik = ψ_ik + θ_ik·θ_ki`.
    pub fn pairwise_edges(&self) -> u64 {
        self.psi_ik as u64 + self.theta_ik as u64 * self.theta_ki as u64
    }
}

/// Closed-form edge set size: `|E| = ½ Σ_i Σ_{k≠i} (ψ_ik + θ_ik·θ_ki)`,
/// computed over unordered receiver pairs. Must equal
/// `build_graph(state).edge_count()` exactly.
pub fn edge_count_formula(state: &FeedbackState) -> u64 {
    let m = state.num_receivers();
    let mut total = 0u64;
    for i in 1..=m {
        for k in (i + 1)..=m {
            total += PairwiseStats::of(state, i, k).pairwise_edges();
        }
    }
    total
}

/// Closed-form vertex degree:
/// `Δ_ij = Σ_{k≠i} [ I(j ∈ W_k) + I(j ∈ H_k)·(ψ_k - ψ_ik) ]`.
/// Must equal the adjacency-count degree of `(i, j)` in the built graph.
pub fn vertex_degree(state: &FeedbackState, v: Vertex) -> Result<u64> {
    if !state.wants(v.receiver).contains(v.packet) {
        return Err(crate::error::IdncError::InvalidPlan(format!(
            "({}, {}) is not a vertex: packet not wanted",
            v.receiver, v.packet
        )));
    }
    let mut degree = 0u64;
    for k in 1..=state.num_receivers() {
        if k == v.receiver {
            continue;
        }
        let wk = state.wants(k);
        if wk.contains(v.packet) {
            degree += 1;
        } else {
            let psi_ik = state.wants(v.receiver).intersection_len(&wk) as u64;
            degree += wk.len() as u64 - psi_ik;
        }
    }
    Ok(degree)
}

/// Convenience re-export of [`IdncGraph::coding_density`] as a free function.
pub fn coding_density(graph: &IdncGraph) -> f64 {
    graph.coding_density()
}
