//! Synthetic temporal networks with planted dynamic states, for
//! oracle-grade experiments.
//!
//! Each window draws its contacts from the activity model of its planted
//! state. The periodic model exists because rotation matching is phase
//! invariant: two windows sharing a periodic on/off template look alike
//! regardless of phase, while per-window aggregation can be made blind to
//! the period entirely (equal duty cycles give equal expected edge
//! weights). That is exactly the regime where timeline information matters.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{NodeIdx, NodeRegistry, TemporalNetwork, TimeGrid};

/// Which node pairs a state's activity model drives.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PairSet {
    /// Every pair over the whole node set.
    #[default]
    All,
    /// Every pair within the given node subset.
    Nodes(Vec<NodeIdx>),
    /// An explicit pair list.
    Pairs(Vec<(NodeIdx, NodeIdx)>),
}

/// Per-snapshot activity of a driven pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activity {
    /// Independent coin flip per snapshot.
    Bernoulli { p: f64 },
    /// Square wave: `duty` connected snapshots out of every `period`,
    /// with a fresh random phase per pair per window.
    Periodic { period: usize, duty: usize },
}

/// Activity model of one planted state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateModel {
    #[serde(default)]
    pub pairs: PairSet,
    pub activity: Activity,
}

fn default_delta_t() -> u64 {
    20
}

/// Full description of a synthetic instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub num_nodes: NodeIdx,
    pub num_windows: usize,
    /// Window length in snapshots.
    pub window_len: usize,
    #[serde(default = "default_delta_t")]
    pub delta_t: u64,
    /// Planted state id per window.
    pub state_sequence: Vec<usize>,
    pub states: Vec<StateModel>,
    /// Probability of flipping each generated bit.
    #[serde(default)]
    pub noise: f64,
    pub seed: u64,
}

impl SyntheticSpec {
    fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.num_nodes < 2 {
            return fail("need at least 2 nodes".into());
        }
        if self.num_windows == 0 || self.window_len == 0 {
            return fail("windows and window_len must be positive".into());
        }
        if self.delta_t == 0 {
            return fail("delta_t must be positive".into());
        }
        if self.state_sequence.len() != self.num_windows {
            return fail(format!(
                "state_sequence has {} entries for {} windows",
                self.state_sequence.len(),
                self.num_windows
            ));
        }
        if !(0.0..=1.0).contains(&self.noise) {
            return fail(format!("noise {} out of [0,1]", self.noise));
        }
        for (i, &s) in self.state_sequence.iter().enumerate() {
            if s >= self.states.len() {
                return fail(format!("window {i} references unknown state {s}"));
            }
        }
        for (i, state) in self.states.iter().enumerate() {
            match &state.activity {
                Activity::Bernoulli { p } => {
                    if !(0.0..=1.0).contains(p) {
                        return fail(format!("state {i}: probability {p} out of [0,1]"));
                    }
                }
                Activity::Periodic { period, duty } => {
                    if *period == 0 || duty > period {
                        return fail(format!(
                            "state {i}: bad periodic template ({duty}/{period})"
                        ));
                    }
                }
            }
            match &state.pairs {
                PairSet::Nodes(nodes) => {
                    if nodes.iter().any(|&n| n >= self.num_nodes) || nodes.len() < 2 {
                        return fail(format!("state {i}: bad node subset"));
                    }
                }
                PairSet::Pairs(pairs) => {
                    if pairs
                        .iter()
                        .any(|&(a, b)| a == b || a >= self.num_nodes || b >= self.num_nodes)
                    {
                        return fail(format!("state {i}: bad pair list"));
                    }
                }
                PairSet::All => {}
            }
        }
        Ok(())
    }

    fn driven_pairs(&self, state: &StateModel) -> Vec<(NodeIdx, NodeIdx)> {
        let mut pairs = match &state.pairs {
            PairSet::All => {
                let mut v = Vec::new();
                for a in 0..self.num_nodes {
                    for b in a + 1..self.num_nodes {
                        v.push((a, b));
                    }
                }
                v
            }
            PairSet::Nodes(nodes) => {
                let mut sorted = nodes.clone();
                sorted.sort_unstable();
                sorted.dedup();
                let mut v = Vec::new();
                for (i, &a) in sorted.iter().enumerate() {
                    for &b in &sorted[i + 1..] {
                        v.push((a, b));
                    }
                }
                v
            }
            PairSet::Pairs(pairs) => pairs
                .iter()
                .map(|&(a, b)| (a.min(b), a.max(b)))
                .collect(),
        };
        pairs.sort_unstable();
        pairs.dedup();
        pairs
    }
}

/// Generate the temporal network and its planted per-window truth labels.
/// Deterministic for a fixed spec (including seed).
pub fn generate_planted_states(spec: &SyntheticSpec) -> Result<(TemporalNetwork, Vec<usize>)> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.num_windows * spec.window_len;
    let grid = TimeGrid {
        delta_t: spec.delta_t,
        t_start: 0,
        t_end: (n as u64 - 1) * spec.delta_t,
    };
    let mut snapshots: Vec<Vec<(NodeIdx, NodeIdx)>> = vec![Vec::new(); n];

    let pair_lists: Vec<Vec<(NodeIdx, NodeIdx)>> = spec
        .states
        .iter()
        .map(|s| spec.driven_pairs(s))
        .collect();

    for (wi, &state_id) in spec.state_sequence.iter().enumerate() {
        let state = &spec.states[state_id];
        let base = wi * spec.window_len;
        for &pair in &pair_lists[state_id] {
            match state.activity {
                Activity::Bernoulli { p } => {
                    for offset in 0..spec.window_len {
                        let mut bit = rng.random_bool(p);
                        if spec.noise > 0.0 && rng.random_bool(spec.noise) {
                            bit = !bit;
                        }
                        if bit {
                            snapshots[base + offset].push(pair);
                        }
                    }
                }
                Activity::Periodic { period, duty } => {
                    let phase = rng.random_range(0..period);
                    for offset in 0..spec.window_len {
                        let mut bit = (offset + phase) % period < duty;
                        if spec.noise > 0.0 && rng.random_bool(spec.noise) {
                            bit = !bit;
                        }
                        if bit {
                            snapshots[base + offset].push(pair);
                        }
                    }
                }
            }
        }
    }

    let registry = NodeRegistry::from_tokens((0..spec.num_nodes).map(|i| i.to_string()));
    let net = TemporalNetwork::from_parts(grid, registry, snapshots)?;
    Ok((net, spec.state_sequence.clone()))
}

/// Truth sidecar written next to generated contact lists, carrying the grid
/// so a consumer can reproduce the exact windowing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticTruth {
    pub labels: Vec<usize>,
    pub delta_t: u64,
    pub t_start: u64,
    pub t_end: u64,
    pub window_len: usize,
}

impl SyntheticTruth {
    pub fn new(spec: &SyntheticSpec, net: &TemporalNetwork, labels: Vec<usize>) -> Self {
        SyntheticTruth {
            labels,
            delta_t: net.grid().delta_t,
            t_start: net.grid().t_start,
            t_end: net.grid().t_end,
            window_len: spec.window_len,
        }
    }
}

/// The aggregate-blind three-state instance used throughout the examples
/// and tests: distinct periods, identical duty cycles, so every state has
/// the same expected per-window edge weights.
pub fn equal_duty_three_state_spec(seed: u64) -> SyntheticSpec {
    let periodic = |period, duty| StateModel {
        pairs: PairSet::All,
        activity: Activity::Periodic { period, duty },
    };
    SyntheticSpec {
        num_nodes: 60,
        num_windows: 30,
        window_len: 60,
        delta_t: 20,
        state_sequence: (0..30).map(|w| w % 3).collect(),
        states: vec![periodic(4, 2), periodic(6, 3), periodic(10, 5)],
        noise: 0.05,
        seed,
    }
}
