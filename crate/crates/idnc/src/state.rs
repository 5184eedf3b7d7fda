//! Frame configuration, per-receiver feedback sets, and the erasure channel.
//!
//! Receiver ids run from 1 to `M` and packet ids from 1 to `N`. Each receiver
//! partitions the frame into a *Wants* set (packets still missing) and a *Has*
//! set (packets already received); the state stores only the Wants sets, so
//! the partition invariant holds by construction.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::Rng;

use crate::error::{IdncError, Result};
use crate::rng::{derive_rng, STREAM_INIT};
use crate::strategies::TransmissionPlan;

/// A set of packet ids backed by a 128-bit mask. Packet ids are 1-based.
#[derive(Clone, Copy, PartialEq, Eq, Default)]
pub struct PacketSet {
    bits: u128,
}

impl PacketSet {
    /// Largest supported frame size.
    pub const MAX_PACKETS: usize = 128;

    pub fn empty() -> Self {
        Self { bits: 0 }
    }

    /// The full frame `{1..n}`.
    pub fn full(n: usize) -> Self {
        debug_assert!(n <= Self::MAX_PACKETS);
        if n == 0 {
            Self::empty()
        } else {
            Self {
                bits: (u128::MAX >> (128 - n)),
            }
        }
    }

    pub fn from_iter<I: IntoIterator<Item = usize>>(packets: I) -> Self {
        let mut set = Self::empty();
        for p in packets {
            set.insert(p);
        }
        set
    }

    #[inline]
    fn bit(packet: usize) -> u128 {
        debug_assert!(packet >= 1 && packet <= Self::MAX_PACKETS);
        1u128 << (packet - 1)
    }

    #[inline]
    pub fn contains(&self, packet: usize) -> bool {
        self.bits & Self::bit(packet) != 0
    }

    pub fn insert(&mut self, packet: usize) {
        self.bits |= Self::bit(packet);
    }

    pub fn remove(&mut self, packet: usize) {
        self.bits &= !Self::bit(packet);
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.bits.count_ones() as usize
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    pub fn intersection(&self, other: &Self) -> Self {
        Self {
            bits: self.bits & other.bits,
        }
    }

    pub fn union(&self, other: &Self) -> Self {
        Self {
            bits: self.bits | other.bits,
        }
    }

    /// `|self ∩ other|` without materializing the intersection.
    #[inline]
    pub fn intersection_len(&self, other: &Self) -> usize {
        (self.bits & other.bits).count_ones() as usize
    }

    /// Complement within the frame `{1..n}`.
    pub fn complement(&self, n: usize) -> Self {
        Self {
            bits: Self::full(n).bits & !self.bits,
        }
    }

    /// Ascending packet ids.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        let mut bits = self.bits;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let tz = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(tz + 1)
            }
        })
    }
}

impl std::fmt::Debug for PacketSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Immutable per-frame parameters: `M` receivers, `N` packets, reception
/// probabilities `q_i`, and the root seed for the frame's randomness.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameConfig {
    num_receivers: usize,
    num_packets: usize,
    reception_probs: Vec<f64>,
    rng_seed: u64,
}

impl FrameConfig {
    pub fn new(
        num_receivers: usize,
        num_packets: usize,
        reception_probs: Vec<f64>,
        rng_seed: u64,
    ) -> Result<Self> {
        if num_receivers == 0 {
            return Err(IdncError::InvalidConfig("num_receivers must be >= 1".into()));
        }
        if num_packets == 0 {
            return Err(IdncError::InvalidConfig("num_packets must be >= 1".into()));
        }
        if num_packets > PacketSet::MAX_PACKETS {
            return Err(IdncError::InvalidConfig(format!(
                "num_packets {} exceeds the supported maximum {}",
                num_packets,
                PacketSet::MAX_PACKETS
            )));
        }
        if reception_probs.len() != num_receivers {
            return Err(IdncError::InvalidConfig(format!(
                "expected {} reception probabilities, got {}",
                num_receivers,
                reception_probs.len()
            )));
        }
        if let Some(q) = reception_probs.iter().find(|q| !(**q > 0.0 && **q <= 1.0)) {
            return Err(IdncError::InvalidConfig(format!(
                "reception probability {q} outside (0, 1]"
            )));
        }
        Ok(Self {
            num_receivers,
            num_packets,
            reception_probs,
            rng_seed,
        })
    }

    /// Uniform reception probability `q` across all receivers.
    pub fn uniform(num_receivers: usize, num_packets: usize, q: f64, rng_seed: u64) -> Result<Self> {
        Self::new(num_receivers, num_packets, vec![q; num_receivers], rng_seed)
    }

    pub fn num_receivers(&self) -> usize {
        self.num_receivers
    }

    pub fn num_packets(&self) -> usize {
        self.num_packets
    }

    pub fn reception_probs(&self) -> &[f64] {
        &self.reception_probs
    }

    /// `q_i` for receiver `i` (1-based).
    pub fn reception_prob(&self, receiver: usize) -> f64 {
        self.reception_probs[receiver - 1]
    }

    pub fn rng_seed(&self) -> u64 {
        self.rng_seed
    }

    pub fn receivers(&self) -> impl Iterator<Item = usize> {
        1..=self.num_receivers
    }

    pub fn packets(&self) -> impl Iterator<Item = usize> {
        1..=self.num_packets
    }
}

/// The erasure channel: per-receiver erasure probabilities are drawn uniformly
/// from `[erasure_low, erasure_high]` at the start of every frame and stay
/// fixed within it. `worst_erasure`, when set, replaces the upper end of the
/// range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelConfig {
    erasure_low: f64,
    erasure_high: f64,
    worst_erasure: Option<f64>,
}

impl ChannelConfig {
    pub fn new(erasure_low: f64, erasure_high: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&erasure_low)
            || !(0.0..1.0).contains(&erasure_high)
            || erasure_low > erasure_high
        {
            return Err(IdncError::InvalidConfig(format!(
                "erasure range [{erasure_low}, {erasure_high}] must satisfy 0 <= low <= high < 1"
            )));
        }
        Ok(Self {
            erasure_low,
            erasure_high,
            worst_erasure: None,
        })
    }

    /// Overrides the upper end of the erasure range.
    pub fn with_worst_erasure(mut self, worst: f64) -> Result<Self> {
        if !(self.erasure_low..1.0).contains(&worst) {
            return Err(IdncError::InvalidConfig(format!(
                "worst erasure {worst} outside [{}, 1)",
                self.erasure_low
            )));
        }
        self.worst_erasure = Some(worst);
        Ok(self)
    }

    pub fn erasure_low(&self) -> f64 {
        self.erasure_low
    }

    /// Effective upper end of the range (the override, when present).
    pub fn erasure_high(&self) -> f64 {
        self.worst_erasure.unwrap_or(self.erasure_high)
    }

    pub fn worst_erasure(&self) -> Option<f64> {
        self.worst_erasure
    }

    /// Midpoint of the effective erasure range.
    pub fn mean_erasure(&self) -> f64 {
        0.5 * (self.erasure_low + self.erasure_high())
    }

    /// Draws `e_i` uniformly from the effective range and returns the
    /// reception probabilities `q_i = 1 - e_i`.
    pub fn draw_reception_probs(&self, num_receivers: usize, rng: &mut impl Rng) -> Vec<f64> {
        let (lo, hi) = (self.erasure_low, self.erasure_high());
        (0..num_receivers)
            .map(|_| {
                let e = if lo == hi {
                    lo
                } else {
                    rng.random_range(lo..=hi)
                };
                1.0 - e
            })
            .collect()
    }
}

/// Per-receiver feedback sets over a frame. Only the Wants sets are stored;
/// the Has sets are their complements, so `W_i ∪ H_i = {1..N}` and
/// `W_i ∩ H_i = ∅` hold structurally.
#[derive(Clone, PartialEq)]
pub struct FeedbackState {
    frame: Arc<FrameConfig>,
    wants: Vec<PacketSet>,
}

impl FeedbackState {
    /// Builds a state from explicit Wants sets.
    pub fn from_wants(frame: Arc<FrameConfig>, wants: Vec<PacketSet>) -> Result<Self> {
        if wants.len() != frame.num_receivers() {
            return Err(IdncError::InvalidConfig(format!(
                "expected {} Wants sets, got {}",
                frame.num_receivers(),
                wants.len()
            )));
        }
        let full = PacketSet::full(frame.num_packets());
        if let Some(w) = wants.iter().find(|w| w.union(&full) != full) {
            return Err(IdncError::InvalidConfig(format!(
                "Wants set {w:?} contains packets outside the frame"
            )));
        }
        Ok(Self { frame, wants })
    }

    pub fn frame(&self) -> &Arc<FrameConfig> {
        &self.frame
    }

    pub fn num_receivers(&self) -> usize {
        self.frame.num_receivers()
    }

    pub fn num_packets(&self) -> usize {
        self.frame.num_packets()
    }

    /// `W_i` (1-based receiver id).
    pub fn wants(&self, receiver: usize) -> PacketSet {
        self.wants[receiver - 1]
    }

    /// `H_i = {1..N} \ W_i`.
    pub fn has(&self, receiver: usize) -> PacketSet {
        self.wants[receiver - 1].complement(self.frame.num_packets())
    }

    /// `ψ_i = |W_i|`.
    pub fn wants_count(&self, receiver: usize) -> usize {
        self.wants[receiver - 1].len()
    }

    /// `ϱ_i = |H_i|`.
    pub fn has_count(&self, receiver: usize) -> usize {
        self.frame.num_packets() - self.wants_count(receiver)
    }

    /// All Wants sets, indexed by receiver - 1.
    pub fn wants_sets(&self) -> &[PacketSet] {
        &self.wants
    }

    /// All Has sets, indexed by receiver - 1.
    pub fn has_sets(&self) -> Vec<PacketSet> {
        let n = self.frame.num_packets();
        self.wants.iter().map(|w| w.complement(n)).collect()
    }

    /// True when every Wants set is empty.
    pub fn is_complete(&self) -> bool {
        self.wants.iter().all(PacketSet::is_empty)
    }

    /// Applies a transmission: every targeted receiver that received the
    /// packet (`X_i = 1`) moves its targeted packet from Wants to Has. The
    /// outcome must be defined on exactly the plan's targeted set.
    pub fn apply_transmission(
        &self,
        plan: &TransmissionPlan,
        outcome: &ReceptionOutcome,
    ) -> Result<FeedbackState> {
        plan.validate_for(self)?;
        let targeted: Vec<usize> = plan.targeted().collect();
        if outcome.receivers().ne(targeted.iter().copied()) {
            return Err(IdncError::OutcomeMismatch(format!(
                "outcome domain {:?} != targeted set {:?}",
                outcome.receivers().collect::<Vec<_>>(),
                targeted
            )));
        }
        let mut wants = self.wants.clone();
        for vertex in plan.vertices() {
            if outcome.received(vertex.receiver) {
                wants[vertex.receiver - 1].remove(vertex.packet);
            }
        }
        Ok(FeedbackState {
            frame: Arc::clone(&self.frame),
            wants,
        })
    }
}

impl std::fmt::Debug for FeedbackState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut map = f.debug_map();
        for i in self.frame.receivers() {
            map.entry(&i, &self.wants[i - 1]);
        }
        map.finish()
    }
}

/// Reception indicators `X_i` for the targeted receivers of one transmission.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReceptionOutcome {
    received: BTreeMap<usize, bool>,
}

impl ReceptionOutcome {
    pub fn new(received: BTreeMap<usize, bool>) -> Self {
        Self { received }
    }

    pub fn from_pairs<I: IntoIterator<Item = (usize, bool)>>(pairs: I) -> Self {
        Self {
            received: pairs.into_iter().collect(),
        }
    }

    /// Every targeted receiver marked as received.
    pub fn all_received<I: IntoIterator<Item = usize>>(targeted: I) -> Self {
        Self::from_pairs(targeted.into_iter().map(|i| (i, true)))
    }

    /// Every targeted receiver marked as erased.
    pub fn none_received<I: IntoIterator<Item = usize>>(targeted: I) -> Self {
        Self::from_pairs(targeted.into_iter().map(|i| (i, false)))
    }

    /// The receivers the outcome is defined on, ascending.
    pub fn receivers(&self) -> impl Iterator<Item = usize> + '_ {
        self.received.keys().copied()
    }

    /// `X_i = 1`? Receivers outside the domain yield false.
    pub fn received(&self, receiver: usize) -> bool {
        self.received.get(&receiver).copied().unwrap_or(false)
    }
}

/// Runs the initial transmission phase: each packet lands in `H_i`
/// independently with probability `q_i`, using the frame's seed.
pub fn init_frame(frame: &Arc<FrameConfig>) -> FeedbackState {
    let mut rng = derive_rng(frame.rng_seed(), &[0, STREAM_INIT]);
    init_frame_with(frame, &mut rng)
}

/// As [`init_frame`] but drawing from a caller-provided stream.
pub fn init_frame_with(frame: &Arc<FrameConfig>, rng: &mut impl Rng) -> FeedbackState {
    let wants = frame
        .receivers()
        .map(|i| {
            let q = frame.reception_prob(i);
            let mut w = PacketSet::empty();
            for j in frame.packets() {
                if !rng.random_bool(q) {
                    w.insert(j);
                }
            }
            w
        })
        .collect();
    FeedbackState {
        frame: Arc::clone(frame),
        wants,
    }
}

/// Samples the reception indicators of a transmission: each targeted receiver
/// receives independently with probability `q_i`.
pub fn sample_outcome(
    plan: &TransmissionPlan,
    frame: &FrameConfig,
    rng: &mut impl Rng,
) -> ReceptionOutcome {
    ReceptionOutcome::from_pairs(
        plan.targeted()
            .map(|i| (i, rng.random_bool(frame.reception_prob(i)))),
    )
}

/// Samples one reception indicator per receiver in the frame, targeted or
/// not. The simulator uses the full vector so that untargeted receivers'
/// physical receptions can be counted toward goodput totals, and so that the
/// stream consumption per transmission does not depend on the chosen plan.
pub fn sample_reception_vector(frame: &FrameConfig, rng: &mut impl Rng) -> Vec<bool> {
    frame
        .receivers()
        .map(|i| rng.random_bool(frame.reception_prob(i)))
        .collect()
}
