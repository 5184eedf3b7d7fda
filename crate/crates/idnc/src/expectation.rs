//! Expected-value machinery over feedback set cardinalities.
//!
//! Dropping the identities of the requested packets and keeping only the
//! cardinalities `ψ_i = |W_i|`, `ϱ_i = |H_i|` turns each Wants set into a
//! uniformly random `ψ_i`-subset of the frame, with pairwise intersections
//! hypergeometric. Everything here is a function of `(ψ, ϱ, q, N)` alone:
//!
//! - the expected vertex degree
//!   `E[Δ_i] = Σ_{k≠i} (ψ_k/N)(1 + ϱ_k ϱ_i/(N-1))`;
//! - the expected edge set size `E[|E|] = ½ Σ_i ψ_i E[Δ_i]`;
//! - the one-transmission evolution of both, through the `α/β/γ/Φ/ξ` terms;
//! - the ordering predicates used by the receiver-selection analysis
//!   ([`degree_ordering_holds`], [`targeting_gain_holds`]).
//!
//! All functions take double precision and are checked against exhaustive
//! enumeration and Monte Carlo oracles in the verification suites.

use crate::error::{IdncError, Result};
use crate::state::FeedbackState;

/// Wants/Has set cardinalities for `M` receivers over an `N`-packet frame.
/// `ψ_i + ϱ_i = N` for every receiver.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cardinalities {
    wants: Vec<usize>,
    has: Vec<usize>,
    num_packets: usize,
}

impl Cardinalities {
    pub fn new(wants: Vec<usize>, has: Vec<usize>, num_packets: usize) -> Result<Self> {
        if wants.is_empty() || wants.len() != has.len() {
            return Err(IdncError::InvalidExpectationInput(
                "wants/has vectors must be nonempty and of equal length".into(),
            ));
        }
        if num_packets == 0 {
            return Err(IdncError::InvalidExpectationInput(
                "frame must contain at least one packet".into(),
            ));
        }
        for (i, (&psi, &rho)) in wants.iter().zip(&has).enumerate() {
            if psi + rho != num_packets {
                return Err(IdncError::InvalidExpectationInput(format!(
                    "receiver {}: ψ {} + ϱ {} != N {}",
                    i + 1,
                    psi,
                    rho,
                    num_packets
                )));
            }
        }
        Ok(Self {
            wants,
            has,
            num_packets,
        })
    }

    /// Builds the Has cardinalities as complements of the Wants.
    pub fn complementary(wants: Vec<usize>, num_packets: usize) -> Result<Self> {
        let has = wants
            .iter()
            .map(|&psi| {
                num_packets.checked_sub(psi).ok_or_else(|| {
                    IdncError::InvalidExpectationInput(format!(
                        "ψ {psi} exceeds the frame size {num_packets}"
                    ))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(wants, has, num_packets)
    }

    pub fn from_state(state: &FeedbackState) -> Self {
        let wants: Vec<usize> = (1..=state.num_receivers())
            .map(|i| state.wants_count(i))
            .collect();
        Self::complementary(wants, state.num_packets()).expect("state invariants hold")
    }

    pub fn num_receivers(&self) -> usize {
        self.wants.len()
    }

    pub fn num_packets(&self) -> usize {
        self.num_packets
    }

    /// `ψ_i` (1-based receiver id).
    pub fn psi(&self, receiver: usize) -> usize {
        self.wants[receiver - 1]
    }

    /// `ϱ_i` (1-based receiver id).
    pub fn rho(&self, receiver: usize) -> usize {
        self.has[receiver - 1]
    }

    pub fn wants(&self) -> &[usize] {
        &self.wants
    }

    pub fn has(&self) -> &[usize] {
        &self.has
    }
}

fn validate_probs(card: &Cardinalities, q: &[f64]) -> Result<()> {
    if q.len() != card.num_receivers() {
        return Err(IdncError::InvalidExpectationInput(format!(
            "expected {} reception probabilities, got {}",
            card.num_receivers(),
            q.len()
        )));
    }
    if let Some(p) = q.iter().find(|p| !(**p > 0.0 && **p <= 1.0)) {
        return Err(IdncError::InvalidExpectationInput(format!(
            "reception probability {p} outside (0, 1]"
        )));
    }
    Ok(())
}

fn validate_targeted(card: &Cardinalities, targeted: &[usize]) -> Result<()> {
    let m = card.num_receivers();
    if targeted.windows(2).any(|w| w[0] >= w[1]) {
        return Err(IdncError::InvalidExpectationInput(
            "targeted set must be strictly ascending".into(),
        ));
    }
    if targeted.iter().any(|&i| i == 0 || i > m) {
        return Err(IdncError::InvalidExpectationInput(
            "targeted receiver out of range".into(),
        ));
    }
    Ok(())
}

/// Expected degree of a vertex of receiver `i`, for every `i`:
/// `E[Δ_i] = Σ_{k≠i} (ψ_k/N)(1 + ϱ_k ϱ_i/(N-1))`.
/// For `N = 1` the `ϱ` product term is dropped (it is always zero there).
pub fn expected_degree(card: &Cardinalities) -> Vec<f64> {
    let n = card.num_packets as f64;
    let m = card.num_receivers();
    (1..=m)
        .map(|i| {
            let rho_i = card.rho(i) as f64;
            (1..=m)
                .filter(|&k| k != i)
                .map(|k| {
                    let base = card.psi(k) as f64 / n;
                    if card.num_packets >= 2 {
                        base * (1.0 + card.rho(k) as f64 * rho_i / (n - 1.0))
                    } else {
                        base
                    }
                })
                .sum()
        })
        .collect()
}

/// Expected edge set size `E[|E|] = ½ Σ_i ψ_i E[Δ_i]`.
pub fn expected_edge_count(card: &Cardinalities) -> f64 {
    0.5 * expected_degree(card)
        .iter()
        .enumerate()
        .map(|(idx, d)| card.wants[idx] as f64 * d)
        .sum::<f64>()
}

/// `ξ_k = ψ_k ϱ_k / (N(N-1))`, zero for `N = 1`.
pub fn xi(card: &Cardinalities, k: usize) -> f64 {
    if card.num_packets < 2 {
        return 0.0;
    }
    let n = card.num_packets as f64;
    card.psi(k) as f64 * card.rho(k) as f64 / (n * (n - 1.0))
}

/// `Φ_k(x)` as seen by an observer with Has cardinality `ϱ_i`:
/// `Φ_k(x) = (q_k/N)(1 + (ϱ_k - ψ_k + 1)(ϱ_i + x)/(N-1))`,
/// with the second term dropped for `N = 1`.
pub fn phi(card: &Cardinalities, q_k: f64, k: usize, rho_i: usize, x: f64) -> f64 {
    let n = card.num_packets as f64;
    let base = q_k / n;
    if card.num_packets < 2 {
        return base;
    }
    let spread = card.rho(k) as f64 - card.psi(k) as f64 + 1.0;
    base * (1.0 + spread * (rho_i as f64 + x) / (n - 1.0))
}

/// The per-receiver evolution terms of the expected edge set size:
/// `α_i = Σ_{k≠i} q_i ξ_k − Σ_{k∈T\{i}} Φ_k(q_i)`,
/// `β_i = −Σ_{k∈T\{i}} Φ_k(0)`,
/// `γ_i = Σ_{k≠i} ξ_k − Σ_{k∈T\{i}} Φ_k(1)`,
/// computed for every receiver regardless of membership in `T`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpectedEvolutionTerms {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub gamma: Vec<f64>,
    pub xi: Vec<f64>,
    pub expected_degrees: Vec<f64>,
}

/// Computes the `α/β/γ/ξ` terms for a targeted set (ascending receiver ids).
pub fn evolution_terms(
    card: &Cardinalities,
    q: &[f64],
    targeted: &[usize],
) -> Result<ExpectedEvolutionTerms> {
    validate_probs(card, q)?;
    validate_targeted(card, targeted)?;
    let m = card.num_receivers();
    let xi_all: Vec<f64> = (1..=m).map(|k| xi(card, k)).collect();
    let xi_total: f64 = xi_all.iter().sum();
    let expected_degrees = expected_degree(card);

    let mut alpha = vec![0.0; m];
    let mut beta = vec![0.0; m];
    let mut gamma = vec![0.0; m];
    for i in 1..=m {
        let q_i = q[i - 1];
        let rho_i = card.rho(i);
        let xi_sum = xi_total - xi_all[i - 1];
        let mut phi_qi = 0.0;
        let mut phi_zero = 0.0;
        let mut phi_one = 0.0;
        for &k in targeted {
            if k == i {
                continue;
            }
            let q_k = q[k - 1];
            phi_qi += phi(card, q_k, k, rho_i, q_i);
            phi_zero += phi(card, q_k, k, rho_i, 0.0);
            phi_one += phi(card, q_k, k, rho_i, 1.0);
        }
        alpha[i - 1] = q_i * xi_sum - phi_qi;
        beta[i - 1] = -phi_zero;
        gamma[i - 1] = xi_sum - phi_one;
    }
    Ok(ExpectedEvolutionTerms {
        alpha,
        beta,
        gamma,
        xi: xi_all,
        expected_degrees,
    })
}

/// Expected vertex degree per receiver after one transmission targeting `T`:
/// `E[Δ_i^{t+1}] = E[Δ_i^t] + α_i` for targeted receivers and
/// `E[Δ_i^{t+1}] = E[Δ_i^t] + β_i` otherwise.
pub fn expected_degree_evolution(
    card: &Cardinalities,
    q: &[f64],
    targeted: &[usize],
) -> Result<Vec<f64>> {
    let terms = evolution_terms(card, q, targeted)?;
    Ok((0..card.num_receivers())
        .map(|idx| {
            let shift = if targeted.contains(&(idx + 1)) {
                terms.alpha[idx]
            } else {
                terms.beta[idx]
            };
            terms.expected_degrees[idx] + shift
        })
        .collect())
}

/// Expected edge set size after one transmission targeting `T`:
///
/// ```text
/// E[|E^{t+1}|] = E[|E^t|] − ½ Σ_{i∈T} q_i E[Δ_i]
///              + ½ Σ_{i∈T} ψ_i (α_i − q_i γ_i / ψ_i) + ½ Σ_{i∉T} ψ_i β_i
/// ```
///
/// Rejects targeted receivers with `ψ_i = 0` (nothing to serve, and the
/// `γ_i/ψ_i` term would be singular).
pub fn expected_edge_evolution(
    card: &Cardinalities,
    q: &[f64],
    targeted: &[usize],
) -> Result<f64> {
    if let Some(&i) = targeted.iter().find(|&&i| card.psi(i) == 0) {
        return Err(IdncError::InvalidExpectationInput(format!(
            "receiver {i} has an empty Wants set and cannot be targeted"
        )));
    }
    let terms = evolution_terms(card, q, targeted)?;
    let mut total = expected_edge_count(card);
    for i in 1..=card.num_receivers() {
        let idx = i - 1;
        let psi = card.psi(i) as f64;
        if targeted.contains(&i) {
            let q_i = q[idx];
            total -= 0.5 * q_i * terms.expected_degrees[idx];
            total += 0.5 * psi * (terms.alpha[idx] - q_i * terms.gamma[idx] / psi);
        } else {
            total += 0.5 * psi * terms.beta[idx];
        }
    }
    Ok(total)
}

/// Given `ψ_i > ψ_h`, checks the expected-degree ordering
/// `E[Δ_h] > E[Δ_i]`. The precondition is enforced.
pub fn degree_ordering_holds(card: &Cardinalities, i: usize, h: usize) -> Result<bool> {
    if card.psi(i) <= card.psi(h) {
        return Err(IdncError::InvalidExpectationInput(format!(
            "precondition ψ_{i} > ψ_{h} violated ({} <= {})",
            card.psi(i),
            card.psi(h)
        )));
    }
    let degrees = expected_degree(card);
    Ok(degrees[h - 1] > degrees[i - 1])
}

/// Checks `α_i − q_i γ_i / ψ_i ≥ β_i` for receiver `i` under the stated
/// preconditions: `ψ_i > 0`, and `ψ_k > 1` and `ψ_k ≤ ϱ_k` for every other
/// targeted receiver. Holding means moving `i` into the targeted set never
/// reduces the expected degree gain of its remaining vertices.
pub fn targeting_gain_holds(
    card: &Cardinalities,
    q: &[f64],
    targeted: &[usize],
    i: usize,
) -> Result<bool> {
    if card.psi(i) == 0 {
        return Err(IdncError::InvalidExpectationInput(format!(
            "precondition ψ_{i} > 0 violated"
        )));
    }
    for &k in targeted {
        if k == i {
            continue;
        }
        if card.psi(k) <= 1 || card.psi(k) > card.rho(k) {
            return Err(IdncError::InvalidExpectationInput(format!(
                "precondition ψ_{k} > 1 and ψ_{k} <= ϱ_{k} violated (ψ={}, ϱ={})",
                card.psi(k),
                card.rho(k)
            )));
        }
    }
    let terms = evolution_terms(card, q, targeted)?;
    let idx = i - 1;
    let lhs = terms.alpha[idx] - q[idx] * terms.gamma[idx] / card.psi(i) as f64;
    Ok(lhs >= terms.beta[idx] - 1e-12)
}
