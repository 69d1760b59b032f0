//! Independent reference implementations the acceptance suite checks the
//! optimized code against. Everything here is deliberately naive: direct
//! position-by-position scans, dense materialization, exhaustive
//! enumeration.

use netstates::community::{modularity, MetaNetwork};
use netstates::ingest::{NodeIdx, NodeRegistry, TemporalNetwork, TimeGrid};
use netstates::window::ConnectionSeriesTensor;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Best ring match by walking every rotation of the outer ring around an
/// inner ring padded with empty slots; returns `(matched, ring_len)`.
pub fn naive_best_match(a: &[bool], b: &[bool]) -> (usize, usize) {
    let (outer, inner) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    let l = outer.len();
    let matched = (0..l)
        .map(|p| {
            (0..inner.len())
                .filter(|&i| outer[(i + p) % l] == inner[i])
                .count()
        })
        .max()
        .unwrap();
    (matched, l)
}

/// Dense tensor-mean oracle: materialize both aligned tensors over the
/// union node set as plain bool series, enumerate all `m(m-1)` ordered
/// pairs with the naive ring match, sum integer match counts, divide once.
pub fn dense_tensor_similarity(a: &ConnectionSeriesTensor, b: &ConnectionSeriesTensor) -> f64 {
    let mut union: Vec<NodeIdx> = a.node_set().iter().chain(b.node_set()).copied().collect();
    union.sort_unstable();
    union.dedup();
    let m = union.len();
    if m < 2 {
        return 1.0;
    }
    let materialize = |t: &ConnectionSeriesTensor, j: NodeIdx, k: NodeIdx| -> Vec<bool> {
        match t.series(j, k) {
            Some(s) => s.bits().collect(),
            None => vec![false; t.length()],
        }
    };
    let l = a.length().max(b.length());
    let mut matched_total: u64 = 0;
    for &j in &union {
        for &k in &union {
            if j == k {
                continue;
            }
            let sa = materialize(a, j, k);
            let sb = materialize(b, j, k);
            matched_total += naive_best_match(&sa, &sb).0 as u64;
        }
    }
    matched_total as f64 / ((m * (m - 1)) as u64 * l as u64) as f64
}

/// Visit every set partition of `0..n` (restricted-growth enumeration).
pub fn for_each_partition(n: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(labels: &mut Vec<usize>, n: usize, f: &mut impl FnMut(&[usize])) {
        if labels.len() == n {
            f(labels);
            return;
        }
        let max = labels.iter().copied().max().unwrap_or(0);
        for c in 0..=max + 1 {
            labels.push(c);
            rec(labels, n, f);
            labels.pop();
        }
    }
    let mut labels = vec![0];
    rec(&mut labels, n, f);
}

/// Exhaustive modularity optimum over all partitions.
pub fn exhaustive_best_partition(net: &MetaNetwork, gamma: f64) -> (Vec<usize>, f64) {
    let n = net.num_windows();
    let mut best_q = f64::MIN;
    let mut best = vec![0; n];
    for_each_partition(n, &mut |labels| {
        let q = modularity(net, labels, gamma);
        if q > best_q {
            best_q = q;
            best = labels.to_vec();
        }
    });
    (best, best_q)
}

/// Random weighted meta network with weights in `[0, 1]` and edge density
/// `density`.
pub fn random_meta_network(rng: &mut ChaCha8Rng, n: usize, density: f64) -> MetaNetwork {
    let mut values = vec![0.0; n * n];
    for i in 0..n {
        values[i * n + i] = 1.0;
        for j in i + 1..n {
            let w = if rng.random::<f64>() < density {
                rng.random::<f64>()
            } else {
                0.0
            };
            values[i * n + j] = w;
            values[j * n + i] = w;
        }
    }
    MetaNetwork::from_similarity_values(n, &values).unwrap()
}

/// Random two-window temporal network over up to `max_nodes` nodes with
/// window length `w`, built through the public construction path.
pub fn random_two_window_net(
    rng: &mut ChaCha8Rng,
    max_nodes: usize,
    w: usize,
) -> TemporalNetwork {
    let n = 2 * w;
    let grid = TimeGrid {
        delta_t: 1,
        t_start: 0,
        t_end: n as u64 - 1,
    };
    let registry = NodeRegistry::from_tokens((0..max_nodes).map(|i| i.to_string()));
    let snapshots: Vec<Vec<(NodeIdx, NodeIdx)>> = (0..n)
        .map(|_| {
            let mut edges = Vec::new();
            for a in 0..max_nodes as NodeIdx {
                for b in a + 1..max_nodes as NodeIdx {
                    if rng.random::<f64>() < 0.2 {
                        edges.push((a, b));
                    }
                }
            }
            edges
        })
        .collect();
    TemporalNetwork::from_parts(grid, registry, snapshots).unwrap()
}
