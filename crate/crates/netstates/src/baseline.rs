//! Comparison pipeline: per-window aggregation into static weighted
//! networks, DeltaCon graph similarity, agglomerative clustering, and
//! Dunn's-index model selection.
//!
//! Aggregation collapses each window into edge weights (contact counts),
//! discarding the in-window timelines the proposed method keeps. DeltaCon
//! compares node-affinity matrices `S = (I + eps^2 D - eps A)^{-1}` via the
//! root-Euclidean distance; `sim = 1 / (1 + d)`.

use std::collections::HashMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::community::canonical_renumber;
use crate::error::{Error, Result};
use crate::ingest::{NodeIdx, TemporalNetwork};
use crate::window::{Window, WindowPlan};

/// Static weighted network aggregated from one window; weight(j, k) is the
/// number of in-window snapshots where the edge was present. Node space is
/// the global registry so all windows are directly comparable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AggregatedNetwork {
    pub window_index: usize,
    num_nodes: usize,
    weights: Vec<((NodeIdx, NodeIdx), u32)>, // sorted, a < b
}

impl AggregatedNetwork {
    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn weight(&self, j: NodeIdx, k: NodeIdx) -> u32 {
        let key = (j.min(k), j.max(k));
        self.weights
            .binary_search_by_key(&key, |(p, _)| *p)
            .map(|i| self.weights[i].1)
            .unwrap_or(0)
    }

    pub fn edges(&self) -> impl Iterator<Item = ((NodeIdx, NodeIdx), u32)> + '_ {
        self.weights.iter().copied()
    }

    /// Sum of all edge weights = contact count in the window.
    pub fn total_weight(&self) -> u64 {
        self.weights.iter().map(|&(_, w)| w as u64).sum()
    }

    pub fn max_weighted_degree(&self) -> f64 {
        let mut degree = vec![0u64; self.num_nodes];
        for &((a, b), w) in &self.weights {
            degree[a as usize] += w as u64;
            degree[b as usize] += w as u64;
        }
        degree.iter().copied().max().unwrap_or(0) as f64
    }
}

/// Count contacts per pair inside one window.
pub fn aggregate_window(
    net: &TemporalNetwork,
    window: Window,
    window_index: usize,
) -> AggregatedNetwork {
    let mut map: HashMap<(NodeIdx, NodeIdx), u32> = HashMap::new();
    for p in 0..window.len {
        for &pair in net.snapshot(window.start + p) {
            *map.entry(pair).or_insert(0) += 1;
        }
    }
    let mut weights: Vec<_> = map.into_iter().collect();
    weights.sort_unstable_by_key(|(p, _)| *p);
    AggregatedNetwork {
        window_index,
        num_nodes: net.num_nodes(),
        weights,
    }
}

pub fn aggregate_windows(net: &TemporalNetwork, plan: &WindowPlan) -> Vec<AggregatedNetwork> {
    plan.windows
        .iter()
        .enumerate()
        .map(|(i, &w)| aggregate_window(net, w, i))
        .collect()
}

/// Node-affinity matrix `S = (I + eps^2 D - eps A)^{-1}`.
///
/// For `eps <= 1/(1 + max weighted degree)` the system matrix is strictly
/// diagonally dominant with non-positive off-diagonal entries, so it is
/// nonsingular and its inverse is entrywise non-negative.
fn affinity_matrix(g: &AggregatedNetwork, eps: f64) -> Result<DMatrix<f64>> {
    let n = g.num_nodes;
    let mut m = DMatrix::<f64>::identity(n, n);
    for ((a, b), w) in g.edges() {
        let (a, b, w) = (a as usize, b as usize, w as f64);
        m[(a, b)] -= eps * w;
        m[(b, a)] -= eps * w;
        m[(a, a)] += eps * eps * w;
        m[(b, b)] += eps * eps * w;
    }
    let s = m
        .lu()
        .try_inverse()
        .ok_or_else(|| Error::Numerical("affinity system is singular".into()))?;
    Ok(s)
}

fn root_euclidean_distance(s1: &DMatrix<f64>, s2: &DMatrix<f64>) -> f64 {
    let clamp = |v: f64| {
        // entries are non-negative up to solver round-off
        debug_assert!(v > -1e-9, "affinity entry {v} unexpectedly negative");
        v.max(0.0)
    };
    s1.iter()
        .zip(s2.iter())
        .map(|(&a, &b)| {
            let d = clamp(a).sqrt() - clamp(b).sqrt();
            d * d
        })
        .sum::<f64>()
        .sqrt()
}

/// DeltaCon similarity of two aggregated windows, in `(0, 1]`.
///
/// Uses the exact affinity matrices (direct solve) with
/// `eps = 1/(1 + max weighted degree over both graphs)` unless overridden.
pub fn deltacon_similarity(
    g1: &AggregatedNetwork,
    g2: &AggregatedNetwork,
    eps: Option<f64>,
) -> Result<f64> {
    if g1.num_nodes != g2.num_nodes {
        return Err(Error::Config(format!(
            "node spaces differ: {} vs {}",
            g1.num_nodes, g2.num_nodes
        )));
    }
    let eps = match eps {
        Some(e) if e > 0.0 => e,
        Some(e) => return Err(Error::Config(format!("epsilon must be positive, got {e}"))),
        None => 1.0 / (1.0 + g1.max_weighted_degree().max(g2.max_weighted_degree())),
    };
    let s1 = affinity_matrix(g1, eps)?;
    let s2 = affinity_matrix(g2, eps)?;
    Ok(1.0 / (1.0 + root_euclidean_distance(&s1, &s2)))
}

/// Symmetric matrix of pairwise distances, zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    t: usize,
    values: Vec<f64>,
}

impl DistanceMatrix {
    pub fn from_values(t: usize, values: Vec<f64>) -> Result<DistanceMatrix> {
        if values.len() != t * t {
            return Err(Error::InvalidMatrix(format!(
                "expected {} values, got {}",
                t * t,
                values.len()
            )));
        }
        for i in 0..t {
            if values[i * t + i] != 0.0 {
                return Err(Error::InvalidMatrix(format!("nonzero diagonal at {i}")));
            }
            for j in 0..t {
                let v = values[i * t + j];
                if v.is_nan() || v < 0.0 {
                    return Err(Error::InvalidMatrix(format!("d({i},{j}) = {v}")));
                }
                if v != values[j * t + i] {
                    return Err(Error::InvalidMatrix(format!("asymmetry at ({i},{j})")));
                }
            }
        }
        Ok(DistanceMatrix { t, values })
    }

    pub fn dim(&self) -> usize {
        self.t
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.t + j]
    }
}

/// Aggregate every window, compute all pairwise DeltaCon similarities with
/// one shared epsilon (so each window's affinity matrix is computed once),
/// and return distances `d = 1 - sim`.
pub fn deltacon_distance_matrix(
    graphs: &[AggregatedNetwork],
    eps: Option<f64>,
) -> Result<DistanceMatrix> {
    let t = graphs.len();
    if t < 2 {
        return Err(Error::InsufficientWindows(t));
    }
    let eps = match eps {
        Some(e) if e > 0.0 => e,
        Some(e) => return Err(Error::Config(format!("epsilon must be positive, got {e}"))),
        None => {
            let dmax = graphs
                .iter()
                .map(AggregatedNetwork::max_weighted_degree)
                .fold(0.0, f64::max);
            1.0 / (1.0 + dmax)
        }
    };
    let affinities: Vec<DMatrix<f64>> = graphs
        .iter()
        .map(|g| affinity_matrix(g, eps))
        .collect::<Result<_>>()?;
    let mut values = vec![0.0; t * t];
    for i in 0..t {
        for j in i + 1..t {
            let sim = 1.0 / (1.0 + root_euclidean_distance(&affinities[i], &affinities[j]));
            let d = 1.0 - sim;
            values[i * t + j] = d;
            values[j * t + i] = d;
        }
    }
    Ok(DistanceMatrix { t, values })
}

/// Linkage criterion for agglomerative clustering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Linkage {
    Single,
    Complete,
    #[default]
    Average,
}

impl std::str::FromStr for Linkage {
    type Err = Error;
    fn from_str(s: &str) -> Result<Linkage> {
        match s {
            "single" => Ok(Linkage::Single),
            "complete" => Ok(Linkage::Complete),
            "average" => Ok(Linkage::Average),
            other => Err(Error::Config(format!("unknown linkage {other:?}"))),
        }
    }
}

/// The merge sequence of bottom-up clustering: at step `s`, the clusters
/// rooted at `merges[s].0` and `merges[s].1` join (identified by their
/// smallest original member).
fn merge_sequence(d: &DistanceMatrix, linkage: Linkage) -> Vec<(usize, usize)> {
    let t = d.dim();
    // active clusters keyed by smallest member; dist kept under Lance-Williams updates
    let mut active: Vec<usize> = (0..t).collect(); // representative = smallest member
    let mut size: Vec<usize> = vec![1; t];
    let mut dist: Vec<f64> = d.values.clone(); // t*t working copy, indexed by representative
    let mut merges = Vec::with_capacity(t - 1);
    while active.len() > 1 {
        // closest pair; ties go to the lexicographically smallest
        // representative pair (active is kept sorted)
        let (mut bi, mut bj, mut best) = (0, 1, f64::INFINITY);
        for (x, &i) in active.iter().enumerate() {
            for &j in &active[x + 1..] {
                let v = dist[i * t + j];
                if v < best {
                    best = v;
                    bi = i;
                    bj = j;
                }
            }
        }
        // merge bj into bi (bi < bj since active is sorted)
        for &k in &active {
            if k == bi || k == bj {
                continue;
            }
            let dik = dist[bi * t + k];
            let djk = dist[bj * t + k];
            let merged = match linkage {
                Linkage::Single => dik.min(djk),
                Linkage::Complete => dik.max(djk),
                Linkage::Average => {
                    (size[bi] as f64 * dik + size[bj] as f64 * djk)
                        / (size[bi] + size[bj]) as f64
                }
            };
            dist[bi * t + k] = merged;
            dist[k * t + bi] = merged;
        }
        size[bi] += size[bj];
        active.retain(|&k| k != bj);
        merges.push((bi, bj));
    }
    merges
}

/// Cut a merge sequence so that `k` clusters remain; labels are canonical
/// by first appearance.
fn cut_merges(t: usize, merges: &[(usize, usize)], k: usize) -> Vec<usize> {
    let mut parent: Vec<usize> = (0..t).collect();
    fn find(parent: &mut Vec<usize>, x: usize) -> usize {
        if parent[x] != x {
            parent[x] = find(parent, parent[x]);
        }
        parent[x]
    }
    for &(a, b) in &merges[..t - k] {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        let (keep, drop) = (ra.min(rb), ra.max(rb));
        parent[drop] = keep;
    }
    let raw: Vec<usize> = (0..t).map(|x| find(&mut parent, x)).collect();
    canonical_renumber(&raw).0
}

/// Bottom-up clustering of a distance matrix into exactly `k` clusters.
pub fn agglomerative_cluster(
    d: &DistanceMatrix,
    k: usize,
    linkage: Linkage,
) -> Result<Vec<usize>> {
    let t = d.dim();
    if k < 2 || k + 1 > t {
        return Err(Error::InvalidClusterCount {
            k,
            max: t.saturating_sub(1),
        });
    }
    Ok(cut_merges(t, &merge_sequence(d, linkage), k))
}

/// Dunn's index: (minimum inter-cluster distance) / (maximum intra-cluster
/// diameter). Higher means better separated.
pub fn dunn_index(d: &DistanceMatrix, labels: &[usize]) -> Result<f64> {
    let t = d.dim();
    assert_eq!(labels.len(), t, "labels must cover all points");
    let k = labels.iter().copied().max().unwrap_or(0) + 1;
    if k < 2 {
        return Err(Error::SingleCluster);
    }
    let mut min_inter = f64::INFINITY;
    let mut max_diam: Option<f64> = None;
    for i in 0..t {
        for j in i + 1..t {
            let v = d.get(i, j);
            if labels[i] == labels[j] {
                max_diam = Some(max_diam.unwrap_or(0.0).max(v));
            } else {
                min_inter = min_inter.min(v);
            }
        }
    }
    let Some(max_diam) = max_diam else {
        return Err(Error::UndefinedDiameter);
    };
    if max_diam == 0.0 {
        // perfectly compact clusters; separated ones score infinity
        return Ok(if min_inter > 0.0 { f64::INFINITY } else { 0.0 });
    }
    Ok(min_inter / max_diam)
}

/// One candidate cluster count in the Dunn scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DunnCandidate {
    pub k: usize,
    pub dunn: f64,
}

/// Baseline detection output: Dunn-selected clustering of the DeltaCon
/// distance matrix, labels canonically renumbered.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineDetection {
    pub labels: Vec<usize>,
    pub num_states: usize,
    pub selected_k: usize,
    pub dunn: f64,
    pub candidates: Vec<DunnCandidate>,
}

/// Full baseline pipeline: aggregate -> DeltaCon distances -> agglomerative
/// scan over `k = 2..T-1` -> pick the k with the largest Dunn index (ties
/// to the smallest k).
pub fn baseline_detect(
    net: &TemporalNetwork,
    plan: &WindowPlan,
    linkage: Linkage,
    eps: Option<f64>,
) -> Result<BaselineDetection> {
    let graphs = aggregate_windows(net, plan);
    let d = deltacon_distance_matrix(&graphs, eps)?;
    baseline_detect_from_distances(&d, linkage)
}

/// Dunn scan + selection on an existing distance matrix.
pub fn baseline_detect_from_distances(
    d: &DistanceMatrix,
    linkage: Linkage,
) -> Result<BaselineDetection> {
    let t = d.dim();
    if t < 3 {
        return Err(Error::InsufficientWindows(t));
    }
    let merges = merge_sequence(d, linkage);
    let mut candidates = Vec::new();
    let mut best: Option<(usize, f64, Vec<usize>)> = None;
    for k in 2..t {
        let labels = cut_merges(t, &merges, k);
        let dunn = match dunn_index(d, &labels) {
            Ok(v) => v,
            // all-singleton cuts carry no diameter information; skip
            Err(Error::UndefinedDiameter) => continue,
            Err(e) => return Err(e),
        };
        candidates.push(DunnCandidate { k, dunn });
        if best.as_ref().is_none_or(|(_, b, _)| dunn > *b) {
            best = Some((k, dunn, labels));
        }
    }
    let (selected_k, dunn, labels) =
        best.ok_or_else(|| Error::Numerical("no valid cluster count in scan".into()))?;
    let (labels, num_states) = canonical_renumber(&labels);
    Ok(BaselineDetection {
        labels,
        num_states,
        selected_k,
        dunn,
        candidates,
    })
}
