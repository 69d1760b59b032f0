//! Non-overlapping windowing and connection-series tensor construction.
//!
//! A window of `w` consecutive snapshots turns into one tensor: for every
//! pair of nodes that touch inside the window, the bit vector of their
//! connection status at each in-window timestamp.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::ingest::{NodeIdx, TemporalNetwork};

/// One window: `len` snapshots starting at grid position `start`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    pub start: usize,
    pub len: usize,
}

/// Contiguous, non-overlapping cover of all `n` snapshots. Every window has
/// length `w` except possibly the last.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowPlan {
    pub w: usize,
    pub windows: Vec<Window>,
}

impl WindowPlan {
    pub fn num_windows(&self) -> usize {
        self.windows.len()
    }
}

/// Split `net` into `ceil(n / w)` windows.
pub fn slice_windows(net: &TemporalNetwork, w: usize) -> Result<WindowPlan> {
    plan_windows(net.len(), w)
}

pub(crate) fn plan_windows(n: usize, w: usize) -> Result<WindowPlan> {
    if w == 0 || w > n {
        return Err(Error::InvalidWindow { w, n });
    }
    let windows = (0..n.div_ceil(w))
        .map(|i| Window {
            start: i * w,
            len: w.min(n - i * w),
        })
        .collect();
    Ok(WindowPlan { w, windows })
}

/// Bit vector of connection status, one bit per in-window timestamp.
/// Bit `p` set means the pair was connected at the window's `p`-th snapshot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConnectionSeries {
    len: usize,
    words: Vec<u64>,
}

impl ConnectionSeries {
    pub fn zeros(len: usize) -> Self {
        ConnectionSeries {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut s = ConnectionSeries::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                s.set(i);
            }
        }
        s
    }

    /// Parse a string like `"10110"`.
    pub fn from_bitstring(s: &str) -> Result<Self> {
        let bits: Vec<bool> = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Config(format!("bad bit character {other:?}"))),
            })
            .collect::<Result<_>>()?;
        Ok(ConnectionSeries::from_bits(&bits))
    }

    pub fn set(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / 64] |= 1u64 << (i % 64);
    }

    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn bits(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn to_bitstring(&self) -> String {
        self.bits().map(|b| if b { '1' } else { '0' }).collect()
    }
}

/// Connection series tensor for one window: the set of nodes active in the
/// window and, for each active unordered pair, its connection series.
///
/// Storage is sparse. Pairs of active nodes that never touch inside the
/// window are implicit all-zero series; [`ConnectionSeriesTensor::series`]
/// returns `None` for them and the similarity stage treats that as zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConnectionSeriesTensor {
    window_index: usize,
    length: usize,
    nodes: Vec<NodeIdx>,
    series: Vec<((NodeIdx, NodeIdx), ConnectionSeries)>,
}

impl ConnectionSeriesTensor {
    pub fn window_index(&self) -> usize {
        self.window_index
    }

    /// Window length in snapshots; every stored series has this length.
    pub fn length(&self) -> usize {
        self.length
    }

    /// Nodes incident to at least one in-window contact, sorted.
    pub fn node_set(&self) -> &[NodeIdx] {
        &self.nodes
    }

    pub fn num_active_pairs(&self) -> usize {
        self.series.len()
    }

    pub fn contains_node(&self, j: NodeIdx) -> bool {
        self.nodes.binary_search(&j).is_ok()
    }

    /// Series for an unordered pair; `(j, k)` and `(k, j)` are the same key.
    pub fn series(&self, j: NodeIdx, k: NodeIdx) -> Option<&ConnectionSeries> {
        let key = (j.min(k), j.max(k));
        self.series
            .binary_search_by_key(&key, |(p, _)| *p)
            .ok()
            .map(|i| &self.series[i].1)
    }

    /// Stored pairs in sorted order.
    pub fn active_pairs(
        &self,
    ) -> impl Iterator<Item = ((NodeIdx, NodeIdx), &ConnectionSeries)> + '_ {
        self.series.iter().map(|(p, s)| (*p, s))
    }

    /// Total number of set bits over all stored series; equals the number
    /// of contacts that fall inside the window.
    pub fn total_contacts(&self) -> usize {
        self.series.iter().map(|(_, s)| s.count_ones()).sum()
    }
}

/// Build the tensor for one window.
pub fn build_tensor(
    net: &TemporalNetwork,
    window: Window,
    window_index: usize,
) -> ConnectionSeriesTensor {
    let mut map: HashMap<(NodeIdx, NodeIdx), ConnectionSeries> = HashMap::new();
    for p in 0..window.len {
        for &pair in net.snapshot(window.start + p) {
            map.entry(pair)
                .or_insert_with(|| ConnectionSeries::zeros(window.len))
                .set(p);
        }
    }
    let mut series: Vec<_> = map.into_iter().collect();
    series.sort_unstable_by_key(|(p, _)| *p);
    let mut nodes: Vec<NodeIdx> = series
        .iter()
        .flat_map(|&((a, b), _)| [a, b])
        .collect();
    nodes.sort_unstable();
    nodes.dedup();
    ConnectionSeriesTensor {
        window_index,
        length: window.len,
        nodes,
        series,
    }
}

/// Build one tensor per window of the plan.
pub fn build_tensors(net: &TemporalNetwork, plan: &WindowPlan) -> Vec<ConnectionSeriesTensor> {
    plan.windows
        .iter()
        .enumerate()
        .map(|(i, &w)| build_tensor(net, w, i))
        .collect()
}
