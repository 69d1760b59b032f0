//! Rotation-based similarity between connection series, averaged similarity
//! between tensors, and the full window-by-window similarity matrix.
//!
//! Two series are compared by rolling both into rings and rotating the
//! longer (outer) ring one position at a time past the fixed shorter
//! (inner) ring. When lengths differ the inner ring is padded with empty
//! slots that never match. The similarity is the best rotation's match
//! count divided by the outer ring length.
//!
//! Match counting is the runtime bottleneck of the whole pipeline, so a
//! rotation is scored as `len_inner - popcount(rotated_outer XOR inner)`
//! on packed 64-bit words rather than by walking individual positions.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ingest::NodeIdx;
use crate::window::{ConnectionSeries, ConnectionSeriesTensor};

/// Best rotation found between two series.
///
/// `offset` is the rotation of the outer (longer) ring: outer position
/// `(i + offset) mod L` faces inner slot `i`. Ties resolve to the smallest
/// offset.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RotationAlignment {
    pub offset: usize,
    pub matched: usize,
}

fn extract64(words: &[u64], bit: usize) -> u64 {
    let w = bit / 64;
    let r = bit % 64;
    if r == 0 {
        words[w]
    } else {
        (words[w] >> r) | (words[w + 1] << (64 - r))
    }
}

fn mask_words(len: usize) -> Vec<u64> {
    let mut mask = vec![u64::MAX; len.div_ceil(64)];
    let tail = len % 64;
    if tail != 0 {
        *mask.last_mut().unwrap() = (1u64 << tail) - 1;
    }
    mask
}

/// Scan all rotations of the outer ring against the inner ring and return
/// the best one.
pub fn best_alignment(a: &ConnectionSeries, b: &ConnectionSeries) -> Result<RotationAlignment> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySeries);
    }
    let (outer, inner) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    let l = outer.len();

    // Two copies of the outer bits back to back, so any rotation is a
    // contiguous 64-bit read.
    let mut doubled = vec![0u64; (2 * l).div_ceil(64) + 1];
    let outer_words = outer.words();
    doubled[..outer_words.len()].copy_from_slice(outer_words);
    let (wshift, bshift) = (l / 64, l % 64);
    for (i, &w) in outer_words.iter().enumerate() {
        if bshift == 0 {
            doubled[wshift + i] |= w;
        } else {
            doubled[wshift + i] |= w << bshift;
            doubled[wshift + i + 1] |= w >> (64 - bshift);
        }
    }

    let inner_words = inner.words();
    let mask = mask_words(inner.len());
    let mut best = RotationAlignment {
        offset: 0,
        matched: 0,
    };
    let mut first = true;
    for p in 0..l {
        let mut mismatched = 0u32;
        for (wi, (&iw, &mw)) in inner_words.iter().zip(&mask).enumerate() {
            mismatched += ((extract64(&doubled, p + wi * 64) ^ iw) & mw).count_ones();
        }
        let matched = inner.len() - mismatched as usize;
        if first || matched > best.matched {
            best = RotationAlignment { offset: p, matched };
            first = false;
        }
    }
    Ok(best)
}

/// Similarity between two connection series: best rotation match count over
/// the outer ring length, in `[0, 1]`.
pub fn series_similarity(a: &ConnectionSeries, b: &ConnectionSeries) -> Result<f64> {
    let alignment = best_alignment(a, b)?;
    Ok(alignment.matched as f64 / a.len().max(b.len()) as f64)
}

/// Per-pair and aggregate detail behind one [`tensor_similarity`] value.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorSimilarityBreakdown {
    /// Size of the union node set both tensors are aligned onto.
    pub union_nodes: usize,
    /// Unordered pairs over the union node set, `m(m-1)/2`.
    pub total_pairs: u64,
    /// Pairs with a stored series in at least one tensor.
    pub active_pairs: u64,
    /// Outer ring length shared by every pair comparison here.
    pub ring_len: usize,
    /// Match count an idle pair (all-zero series on both sides) scores;
    /// equals the shorter window length.
    pub idle_match: usize,
    /// Total match count over all unordered pairs, idle ones included.
    pub matched_total: u64,
    /// Final averaged similarity.
    pub value: f64,
}

fn merged_pairs<'a>(
    a: &'a ConnectionSeriesTensor,
    b: &'a ConnectionSeriesTensor,
) -> impl Iterator<
    Item = (
        (NodeIdx, NodeIdx),
        Option<&'a ConnectionSeries>,
        Option<&'a ConnectionSeries>,
    ),
> {
    let mut ia = a.active_pairs().peekable();
    let mut ib = b.active_pairs().peekable();
    std::iter::from_fn(move || match (ia.peek(), ib.peek()) {
        (Some(&(pa, _)), Some(&(pb, _))) if pa == pb => {
            let (p, sa) = ia.next().unwrap();
            let (_, sb) = ib.next().unwrap();
            Some((p, Some(sa), Some(sb)))
        }
        (Some(&(pa, _)), Some(&(pb, _))) if pa < pb => {
            let (p, sa) = ia.next().unwrap();
            Some((p, Some(sa), None))
        }
        (Some(_), Some(_)) => {
            let (p, sb) = ib.next().unwrap();
            Some((p, None, Some(sb)))
        }
        (Some(_), None) => {
            let (p, sa) = ia.next().unwrap();
            Some((p, Some(sa), None))
        }
        (None, Some(_)) => {
            let (p, sb) = ib.next().unwrap();
            Some((p, None, Some(sb)))
        }
        (None, None) => None,
    })
}

fn union_node_count(a: &[NodeIdx], b: &[NodeIdx]) -> usize {
    let mut count = 0;
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
        count += 1;
    }
    count + (a.len() - i) + (b.len() - j)
}

/// Averaged similarity between two tensors after aligning both onto the
/// union of their node sets: the mean of `sim(c_a[j,k], c_b[j,k])` over all
/// ordered pairs of union nodes, self-series excluded.
///
/// Every pair comparison here shares the same ring length
/// `L = max(len_a, len_b)`, so the mean is accumulated as an exact integer
/// match total and divided once. Pairs stored in neither tensor are all
/// zeros on both sides; they all score the same match count (the shorter
/// window length), which is added in closed form instead of being scanned.
///
/// Degenerate union node sets (fewer than 2 nodes) have no pairs to
/// average; such windows are defined to be maximally similar (1.0).
pub fn tensor_similarity_breakdown(
    a: &ConnectionSeriesTensor,
    b: &ConnectionSeriesTensor,
) -> TensorSimilarityBreakdown {
    let m = union_node_count(a.node_set(), b.node_set());
    let ring_len = a.length().max(b.length());
    let idle_match = a.length().min(b.length());

    if m < 2 {
        return TensorSimilarityBreakdown {
            union_nodes: m,
            total_pairs: 0,
            active_pairs: 0,
            ring_len,
            idle_match,
            matched_total: 0,
            value: 1.0,
        };
    }
    let total_pairs = (m as u64) * (m as u64 - 1) / 2;

    let zeros_a = ConnectionSeries::zeros(a.length());
    let zeros_b = ConnectionSeries::zeros(b.length());
    let mut matched_total: u64 = 0;
    let mut active_pairs: u64 = 0;
    for (_, sa, sb) in merged_pairs(a, b) {
        let sa = sa.unwrap_or(&zeros_a);
        let sb = sb.unwrap_or(&zeros_b);
        matched_total += best_alignment(sa, sb).unwrap().matched as u64;
        active_pairs += 1;
    }
    let idle_pairs = total_pairs - active_pairs;
    matched_total += idle_pairs * idle_match as u64;
    let value = matched_total as f64 / (total_pairs * ring_len as u64) as f64;
    TensorSimilarityBreakdown {
        union_nodes: m,
        total_pairs,
        active_pairs,
        ring_len,
        idle_match,
        matched_total,
        value,
    }
}

/// See [`tensor_similarity_breakdown`]; this is just its final value.
pub fn tensor_similarity(a: &ConnectionSeriesTensor, b: &ConnectionSeriesTensor) -> f64 {
    tensor_similarity_breakdown(a, b).value
}

/// Per-pair similarities over the active pairs of two tensors, for debug
/// dumps. Idle pairs are omitted; they all score
/// `idle_match / ring_len` (see [`TensorSimilarityBreakdown`]).
pub fn pairwise_similarities(
    a: &ConnectionSeriesTensor,
    b: &ConnectionSeriesTensor,
) -> Vec<((NodeIdx, NodeIdx), f64)> {
    let zeros_a = ConnectionSeries::zeros(a.length());
    let zeros_b = ConnectionSeries::zeros(b.length());
    let ring_len = a.length().max(b.length());
    merged_pairs(a, b)
        .map(|(p, sa, sb)| {
            let sa = sa.unwrap_or(&zeros_a);
            let sb = sb.unwrap_or(&zeros_b);
            let matched = best_alignment(sa, sb).unwrap().matched;
            (p, matched as f64 / ring_len as f64)
        })
        .collect()
}

/// Symmetric T×T matrix of tensor similarities, diagonal 1.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    t: usize,
    values: Vec<f64>,
}

impl SimilarityMatrix {
    /// Validate and wrap a row-major `t * t` value buffer.
    pub fn from_values(t: usize, values: Vec<f64>) -> Result<SimilarityMatrix> {
        if values.len() != t * t {
            return Err(Error::InvalidMatrix(format!(
                "expected {} values, got {}",
                t * t,
                values.len()
            )));
        }
        let m = SimilarityMatrix { t, values };
        for i in 0..t {
            if m.get(i, i) != 1.0 {
                return Err(Error::InvalidMatrix(format!(
                    "diagonal entry ({i},{i}) is {}, expected 1",
                    m.get(i, i)
                )));
            }
            for j in 0..t {
                let v = m.get(i, j);
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::InvalidMatrix(format!(
                        "entry ({i},{j}) = {v} out of [0,1]"
                    )));
                }
                if m.get(i, j) != m.get(j, i) {
                    return Err(Error::InvalidMatrix(format!(
                        "asymmetry at ({i},{j}): {} vs {}",
                        m.get(i, j),
                        m.get(j, i)
                    )));
                }
            }
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.t
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.t + j]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Compute all pairwise tensor similarities. Cells are independent, so the
/// upper triangle is evaluated in parallel; the result does not depend on
/// scheduling.
pub fn similarity_matrix(tensors: &[ConnectionSeriesTensor]) -> Result<SimilarityMatrix> {
    let t = tensors.len();
    if t < 2 {
        return Err(Error::InsufficientWindows(t));
    }
    let pairs: Vec<(usize, usize)> = (0..t)
        .flat_map(|i| (i + 1..t).map(move |j| (i, j)))
        .collect();
    let sims: Vec<f64> = pairs
        .par_iter()
        .map(|&(i, j)| tensor_similarity(&tensors[i], &tensors[j]))
        .collect();
    let mut values = vec![0.0; t * t];
    for i in 0..t {
        values[i * t + i] = 1.0;
    }
    for (&(i, j), &s) in pairs.iter().zip(&sims) {
        values[i * t + j] = s;
        values[j * t + i] = s;
    }
    Ok(SimilarityMatrix { t, values })
}
