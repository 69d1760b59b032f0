//! Meta-level network over windows and dynamic-state detection.
//!
//! Windows become nodes of a complete weighted graph whose edge weights are
//! the tensor similarities. Communities of that graph, found by modularity
//! maximization with a tunable resolution, are the dynamic states.
//!
//! The quality function is weighted modularity with a factor `gamma` on
//! the null-model term:
//!
//! ```text
//! Q_gamma = (1/2W) * sum_ij [ w_ij - gamma * s_i * s_j / (2W) ] * delta(c_i, c_j)
//! ```
//!
//! where `W` is the total edge weight and `s_i` the weighted degree.
//! Larger `gamma` means a stronger null-model penalty and finer partitions.
//!
//! The user-facing *community resolution parameter* follows the opposite,
//! scan-friendly orientation: a resolution of 1.0 is plain modularity, and
//! smaller resolutions uncover more, finer states. Detection at resolution
//! `r` maximizes `Q_gamma` with `gamma = 1/r`, which is the same
//! parameterization written multiplicatively on the weight term instead of
//! the null model.

use std::collections::{BTreeSet, HashMap};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::similarity::SimilarityMatrix;

/// Complete weighted graph on the windows; `weight(i, j)` is the tensor
/// similarity of windows `i` and `j`. No self-loops.
#[derive(Debug, Clone, PartialEq)]
pub struct MetaNetwork {
    t: usize,
    weights: Vec<f64>, // row-major t*t, zero diagonal
    strength: Vec<f64>,
    two_w: f64,
}

impl MetaNetwork {
    /// Build from raw row-major similarity values, validating symmetry,
    /// unit diagonal, and the `[0, 1]` range.
    pub fn from_similarity_values(t: usize, values: &[f64]) -> Result<MetaNetwork> {
        if values.len() != t * t {
            return Err(Error::InvalidMatrix(format!(
                "expected {} values, got {}",
                t * t,
                values.len()
            )));
        }
        let mut weights = vec![0.0; t * t];
        for i in 0..t {
            let d = values[i * t + i];
            if d != 1.0 {
                return Err(Error::InvalidMatrix(format!(
                    "diagonal entry ({i},{i}) is {d}, expected 1"
                )));
            }
            for j in 0..t {
                let v = values[i * t + j];
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::InvalidMatrix(format!(
                        "entry ({i},{j}) = {v} out of [0,1]"
                    )));
                }
                if v != values[j * t + i] {
                    return Err(Error::InvalidMatrix(format!(
                        "asymmetry at ({i},{j}): {v} vs {}",
                        values[j * t + i]
                    )));
                }
                if i != j {
                    weights[i * t + j] = v;
                }
            }
        }
        let strength: Vec<f64> = (0..t)
            .map(|i| weights[i * t..(i + 1) * t].iter().sum())
            .collect();
        let two_w = strength.iter().sum();
        Ok(MetaNetwork {
            t,
            weights,
            strength,
            two_w,
        })
    }

    pub fn num_windows(&self) -> usize {
        self.t
    }

    pub fn num_edges(&self) -> usize {
        self.t * (self.t - 1) / 2
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weights[i * self.t + j]
    }

    /// Weighted degree of window `i`.
    pub fn strength(&self, i: usize) -> f64 {
        self.strength[i]
    }

    /// Sum of all weighted degrees (twice the total edge weight).
    pub fn total_degree(&self) -> f64 {
        self.two_w
    }
}

/// Discard the diagonal of a similarity matrix and keep the off-diagonal
/// entries as edge weights.
pub fn build_meta_network(s: &SimilarityMatrix) -> Result<MetaNetwork> {
    MetaNetwork::from_similarity_values(s.dim(), s.values())
}

/// Assignment of each window to a dynamic state.
///
/// State ids are canonical: state 0 is the earliest window's state and each
/// new state takes the next id at its first appearance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateLabeling {
    pub labels: Vec<usize>,
    pub num_states: usize,
    pub resolution: f64,
    pub modularity: f64,
}

/// Renumber arbitrary community ids by first appearance.
pub fn canonical_renumber(raw: &[usize]) -> (Vec<usize>, usize) {
    let mut map: HashMap<usize, usize> = HashMap::new();
    let mut labels = Vec::with_capacity(raw.len());
    for &r in raw {
        let next = map.len();
        labels.push(*map.entry(r).or_insert(next));
    }
    (labels, map.len())
}

/// Resolution-parameterized weighted modularity of a labeling.
pub fn modularity(net: &MetaNetwork, labels: &[usize], gamma: f64) -> f64 {
    assert_eq!(labels.len(), net.t, "labels must cover all windows");
    let two_w = net.two_w;
    if two_w == 0.0 {
        return 0.0;
    }
    let k = labels.iter().copied().max().unwrap_or(0) + 1;
    let mut s_in = vec![0.0; k]; // ordered intra-community weight
    let mut s_tot = vec![0.0; k];
    for i in 0..net.t {
        s_tot[labels[i]] += net.strength[i];
        for j in 0..net.t {
            if j != i && labels[j] == labels[i] {
                s_in[labels[i]] += net.weight(i, j);
            }
        }
    }
    (0..k)
        .map(|c| s_in[c] / two_w - gamma * (s_tot[c] / two_w).powi(2))
        .sum()
}

// Gains below this are treated as zero; keeps floating-point noise from
// producing move cycles.
const GAIN_EPS: f64 = 1e-12;

/// One level of the hierarchy: a weighted graph whose nodes may carry
/// self-loops accumulated from collapsed communities. `self_loop` holds the
/// ordered-pair intra weight, so `strength` sums stay invariant across
/// aggregation.
struct LevelGraph {
    adj: Vec<Vec<(usize, f64)>>,
    self_loop: Vec<f64>,
    strength: Vec<f64>,
    two_w: f64,
}

impl LevelGraph {
    fn from_meta(net: &MetaNetwork) -> LevelGraph {
        let t = net.t;
        let adj: Vec<Vec<(usize, f64)>> = (0..t)
            .map(|i| {
                (0..t)
                    .filter(|&j| j != i && net.weight(i, j) != 0.0)
                    .map(|j| (j, net.weight(i, j)))
                    .collect()
            })
            .collect();
        LevelGraph {
            adj,
            self_loop: vec![0.0; t],
            strength: net.strength.clone(),
            two_w: net.two_w,
        }
    }

    fn len(&self) -> usize {
        self.adj.len()
    }
}

/// Phase 1: sweep nodes in a seeded order, greedily moving each to the
/// community with the largest positive modularity gain, until a full sweep
/// makes no move. Starts from the partition in `init` (dense community
/// ids); returns the community id per node and whether anything moved.
fn one_level(
    g: &LevelGraph,
    init: &[usize],
    gamma: f64,
    rng: &mut ChaCha8Rng,
) -> (Vec<usize>, bool) {
    let n = g.len();
    let two_w = g.two_w;
    let mut comm: Vec<usize> = init.to_vec();
    let mut tot: Vec<f64> = vec![0.0; n];
    let mut size: Vec<usize> = vec![0; n];
    for node in 0..n {
        tot[comm[node]] += g.strength[node];
        size[comm[node]] += 1;
    }
    let mut free: BTreeSet<usize> = (0..n).filter(|&c| size[c] == 0).collect();

    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);

    let mut moved_any = false;
    if two_w == 0.0 {
        return (comm, false);
    }
    loop {
        let mut moves = 0usize;
        for &node in &order {
            let current = comm[node];
            let s_i = g.strength[node];

            // total edge weight from `node` into each neighboring community
            let mut by_comm: HashMap<usize, f64> = HashMap::new();
            for &(j, w) in &g.adj[node] {
                *by_comm.entry(comm[j]).or_insert(0.0) += w;
            }
            let k_i_current = by_comm.get(&current).copied().unwrap_or(0.0);

            // gain of pulling `node` out of its community into isolation
            let remove_gain = -2.0 * k_i_current / two_w
                + 2.0 * gamma * s_i * (tot[current] - s_i) / (two_w * two_w);

            // candidates in ascending id order so equal gains resolve to
            // the smallest community id
            let mut candidates: Vec<(usize, f64)> = by_comm
                .iter()
                .filter(|&(&d, _)| d != current)
                .map(|(&d, &w)| (d, w))
                .collect();
            candidates.sort_unstable_by_key(|&(d, _)| d);

            let mut best_comm = current;
            let mut best_gain = 0.0;
            for (d, k_i_d) in candidates {
                let add_gain =
                    2.0 * k_i_d / two_w - 2.0 * gamma * s_i * tot[d] / (two_w * two_w);
                let gain = remove_gain + add_gain;
                if gain > best_gain + GAIN_EPS {
                    best_gain = gain;
                    best_comm = d;
                }
            }
            // isolation: a fresh singleton community; never wins ties
            let isolate = size[current] > 1 && remove_gain > best_gain + GAIN_EPS;
            if isolate {
                best_comm = *free.iter().next().expect("a free community id must exist");
            }

            if best_comm != current {
                tot[current] -= s_i;
                size[current] -= 1;
                if size[current] == 0 {
                    free.insert(current);
                }
                free.remove(&best_comm);
                tot[best_comm] += s_i;
                size[best_comm] += 1;
                comm[node] = best_comm;
                moves += 1;
                moved_any = true;
            }
        }
        if moves == 0 {
            break;
        }
    }
    (comm, moved_any)
}

/// Phase 2: collapse each community into a super-node. Intra weight moves
/// into self-loops (ordered count) so strengths and `2W` are preserved.
/// Returns the new graph and the map old-community-id -> new node id.
fn aggregate(g: &LevelGraph, comm: &[usize]) -> (LevelGraph, HashMap<usize, usize>) {
    let mut ids: Vec<usize> = comm.to_vec();
    ids.sort_unstable();
    ids.dedup();
    let remap: HashMap<usize, usize> = ids.iter().enumerate().map(|(k, &c)| (c, k)).collect();
    let k = ids.len();

    let mut adj_maps: Vec<HashMap<usize, f64>> = vec![HashMap::new(); k];
    let mut self_loop = vec![0.0; k];
    for i in 0..g.len() {
        let ci = remap[&comm[i]];
        self_loop[ci] += g.self_loop[i];
        for &(j, w) in &g.adj[i] {
            let cj = remap[&comm[j]];
            if ci == cj {
                // visited once from each endpoint: accumulates 2w total
                self_loop[ci] += w;
            } else {
                *adj_maps[ci].entry(cj).or_insert(0.0) += w;
            }
        }
    }
    let adj: Vec<Vec<(usize, f64)>> = adj_maps
        .into_iter()
        .map(|m| {
            let mut v: Vec<(usize, f64)> = m.into_iter().collect();
            v.sort_unstable_by_key(|&(j, _)| j);
            v
        })
        .collect();
    let strength: Vec<f64> = (0..k)
        .map(|i| adj[i].iter().map(|&(_, w)| w).sum::<f64>() + self_loop[i])
        .collect();
    let two_w = strength.iter().sum();
    (
        LevelGraph {
            adj,
            self_loop,
            strength,
            two_w,
        },
        remap,
    )
}

/// One full two-phase optimization pass: repeated level sweeps with
/// aggregation, plus a refinement sweep back at the original level after
/// each multilevel round. The refinement matters: aggregation fuses nodes,
/// and moves of whole super-nodes can leave individual nodes misplaced; the
/// extra finest-level sweeps run until no single node can improve, so the
/// result is single-move locally optimal.
fn louvain_once(base: &LevelGraph, gamma: f64, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let n = base.len();
    let mut communities: Vec<usize> = (0..n).collect();
    let mut first = true;
    loop {
        let (refined, moved0) = one_level(base, &communities, gamma, rng);
        if !moved0 && !first {
            break;
        }
        first = false;
        if moved0 {
            communities = canonical_renumber(&refined).0;
        }

        // multilevel: collapse the current partition and keep sweeping
        // aggregates until they stop moving
        let (mut g, remap) = aggregate(base, &communities);
        let mut node_of: Vec<usize> = communities.iter().map(|c| remap[c]).collect();
        let mut any_merge = false;
        loop {
            let identity: Vec<usize> = (0..g.len()).collect();
            let (comm, moved) = one_level(&g, &identity, gamma, rng);
            if !moved {
                break;
            }
            any_merge = true;
            let (next, remap) = aggregate(&g, &comm);
            for v in &mut node_of {
                *v = remap[&comm[*v]];
            }
            g = next;
        }
        if any_merge {
            communities = canonical_renumber(&node_of).0;
        } else {
            // the finest-level sweep converged and aggregation found no
            // merge either
            break;
        }
    }
    communities
}

/// How many seeded restarts a detection runs; the best-modularity labeling
/// wins (ties keep the earliest restart). Greedy sweeps can settle into
/// local optima on weakly structured graphs; independent visit orders make
/// that negligible at the window counts this crate targets.
const LOUVAIN_RESTARTS: u64 = 100;

/// Two-phase modularity maximization at a community resolution.
///
/// `resolution` follows the scan orientation: 1.0 is plain weighted
/// modularity, smaller values yield more, finer states (internally the
/// null-model factor is `gamma = 1/resolution`; see the module docs).
///
/// Node visit order is a permutation drawn from `seed`, fixed per level;
/// every accepted move strictly increases `Q_gamma`; ties on gain go to the
/// smallest community id. The detection runs [`LOUVAIN_RESTARTS`] seeded
/// restarts (independent RNG streams derived from `seed`) and keeps the
/// best labeling, so the output is deterministic for a fixed
/// `(network, resolution, seed)`, single-move locally optimal, and
/// canonically renumbered by first window appearance. The reported
/// `modularity` is `Q_gamma` of the labels at the effective `gamma`.
pub fn louvain_detect(net: &MetaNetwork, resolution: f64, seed: u64) -> Result<StateLabeling> {
    if !(resolution > 0.0 && resolution.is_finite()) {
        return Err(Error::InvalidResolution(resolution));
    }
    let gamma = 1.0 / resolution;
    let base = LevelGraph::from_meta(net);
    let mut best: Option<(f64, Vec<usize>)> = None;
    for restart in 0..LOUVAIN_RESTARTS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(restart);
        let communities = louvain_once(&base, gamma, &mut rng);
        let q = modularity(net, &communities, gamma);
        if best.as_ref().is_none_or(|(bq, _)| q > *bq) {
            best = Some((q, communities));
        }
    }
    let (q, communities) = best.unwrap();
    let (labels, num_states) = canonical_renumber(&communities);
    Ok(StateLabeling {
        labels,
        num_states,
        resolution,
        modularity: q,
    })
}

/// One scan step: the resolution used and what it produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanEntry {
    pub gamma: f64,
    pub labeling: StateLabeling,
}

/// Labelings for a descending, equally spaced sequence of resolutions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolutionScan {
    pub entries: Vec<ScanEntry>,
}

impl ResolutionScan {
    /// Resolutions where the state count differs from the previous step
    /// (the first entry always reports).
    pub fn change_points(&self) -> Vec<(f64, usize)> {
        let mut out = Vec::new();
        let mut prev = None;
        for e in &self.entries {
            if prev != Some(e.labeling.num_states) {
                out.push((e.gamma, e.labeling.num_states));
                prev = Some(e.labeling.num_states);
            }
        }
        out
    }
}

/// Run detection at `gamma_from, gamma_from - step, ...` down to
/// `gamma_to` (inclusive). Steps are independent and run in parallel.
pub fn scan_resolutions(
    net: &MetaNetwork,
    gamma_from: f64,
    gamma_to: f64,
    step: f64,
    seed: u64,
) -> Result<ResolutionScan> {
    if !(gamma_from > gamma_to && gamma_to > 0.0 && step > 0.0) {
        return Err(Error::InvalidScanRange {
            from: gamma_from,
            to: gamma_to,
            step,
        });
    }
    let count = ((gamma_from - gamma_to) / step + 1e-9).floor() as usize + 1;
    let gammas: Vec<f64> = (0..count)
        .map(|k| gamma_from - k as f64 * step)
        .filter(|&g| g > 0.0)
        .collect();
    let entries: Vec<ScanEntry> = gammas
        .par_iter()
        .map(|&gamma| {
            louvain_detect(net, gamma, seed).map(|labeling| ScanEntry { gamma, labeling })
        })
        .collect::<Result<_>>()?;
    Ok(ResolutionScan { entries })
}
