//! Ground-truth schedules, window-level truth projection, and clustering
//! agreement scores (ARI, NMI).

use std::collections::HashMap;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::TimeGrid;
use crate::window::WindowPlan;

/// Truth label for windows not covered by any schedule interval (data
/// periods routinely overhang the schedule on both ends).
pub const UNSCHEDULED: &str = "unscheduled";

/// One labeled interval, `[start, end)` in dataset seconds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScheduleInterval {
    pub start: u64,
    pub end: u64,
    pub label: String,
}

/// Non-overlapping, sorted labeled intervals. Labels may repeat across
/// intervals (e.g. several class periods).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GroundTruthSchedule {
    intervals: Vec<ScheduleInterval>,
}

#[derive(Deserialize)]
struct RawInterval {
    start: ClockValue,
    end: ClockValue,
    label: String,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ClockValue {
    Seconds(u64),
    Clock(String),
}

/// Parse `"HH:MM"` or `"HH:MM:SS"` into seconds.
pub fn parse_clock(s: &str) -> Result<u64> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || Error::Schedule(format!("bad clock value {s:?}"));
    let nums: Vec<u64> = parts
        .iter()
        .map(|p| p.parse::<u64>().map_err(|_| bad()))
        .collect::<Result<_>>()?;
    match nums.as_slice() {
        [h, m] if *m < 60 => Ok(h * 3600 + m * 60),
        [h, m, s] if *m < 60 && *s < 60 => Ok(h * 3600 + m * 60 + s),
        _ => Err(bad()),
    }
}

/// Parse either plain seconds or a clock string, shifting clock values by
/// `clock_origin` (the dataset second corresponding to 00:00).
pub fn parse_time(s: &str, clock_origin: u64) -> Result<u64> {
    if let Ok(secs) = s.parse::<u64>() {
        return Ok(secs);
    }
    Ok(clock_origin + parse_clock(s)?)
}

impl GroundTruthSchedule {
    pub fn new(mut intervals: Vec<ScheduleInterval>) -> Result<GroundTruthSchedule> {
        intervals.sort_by_key(|iv| iv.start);
        for iv in &intervals {
            if iv.end <= iv.start {
                return Err(Error::Schedule(format!(
                    "interval {:?} ends at {} before it starts at {}",
                    iv.label, iv.end, iv.start
                )));
            }
        }
        for pair in intervals.windows(2) {
            if pair[1].start < pair[0].end {
                return Err(Error::Schedule(format!(
                    "intervals {:?} and {:?} overlap",
                    pair[0].label, pair[1].label
                )));
            }
        }
        Ok(GroundTruthSchedule { intervals })
    }

    pub fn intervals(&self) -> &[ScheduleInterval] {
        &self.intervals
    }

    /// Label covering dataset second `t`, if any.
    pub fn label_at(&self, t: u64) -> Option<&str> {
        self.intervals
            .iter()
            .find(|iv| iv.start <= t && t < iv.end)
            .map(|iv| iv.label.as_str())
    }

    /// Position of the first interval carrying `label` (used for
    /// deterministic tie-breaking).
    fn label_priority(&self, label: &str) -> usize {
        self.intervals
            .iter()
            .position(|iv| iv.label == label)
            .unwrap_or(usize::MAX)
    }
}

/// Load a schedule from JSON: `[{"start":"12:00","end":"14:00","label":"Lunchtime"},...]`
/// where times are `HH:MM[:SS]` strings (shifted by `clock_origin`) or plain
/// dataset seconds.
pub fn load_schedule(json: &str, clock_origin: u64) -> Result<GroundTruthSchedule> {
    let raw: Vec<RawInterval> = serde_json::from_str(json)?;
    let intervals = raw
        .into_iter()
        .map(|iv| {
            let resolve = |v: ClockValue| -> Result<u64> {
                match v {
                    ClockValue::Seconds(s) => Ok(s),
                    ClockValue::Clock(s) => Ok(clock_origin + parse_clock(&s)?),
                }
            };
            Ok(ScheduleInterval {
                start: resolve(iv.start)?,
                end: resolve(iv.end)?,
                label: iv.label,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    GroundTruthSchedule::new(intervals)
}

/// Project a schedule onto windows: each window takes the label covering
/// the majority of its snapshots, with [`UNSCHEDULED`] for uncovered time.
/// Count ties resolve to the label appearing earliest in the schedule;
/// `UNSCHEDULED` loses all ties.
pub fn window_ground_truth(
    schedule: &GroundTruthSchedule,
    plan: &WindowPlan,
    grid: &TimeGrid,
) -> Vec<String> {
    plan.windows
        .iter()
        .map(|w| {
            let mut counts: HashMap<&str, usize> = HashMap::new();
            for p in 0..w.len {
                let t = grid.timestamp(w.start + p);
                let label = schedule.label_at(t).unwrap_or(UNSCHEDULED);
                *counts.entry(label).or_insert(0) += 1;
            }
            counts
                .into_iter()
                .min_by_key(|&(label, count)| {
                    (std::cmp::Reverse(count), schedule.label_priority(label))
                })
                .map(|(label, _)| label.to_string())
                .unwrap()
        })
        .collect()
}

/// (table, row sums, column sums)
type Contingency = (Vec<Vec<u64>>, Vec<u64>, Vec<u64>);

fn contingency<T: Eq + Hash, U: Eq + Hash>(truth: &[T], predicted: &[U]) -> Result<Contingency> {
    if truth.len() != predicted.len() {
        return Err(Error::LabelLengthMismatch(truth.len(), predicted.len()));
    }
    let mut ti: HashMap<&T, usize> = HashMap::new();
    let mut pi: HashMap<&U, usize> = HashMap::new();
    for t in truth {
        let next = ti.len();
        ti.entry(t).or_insert(next);
    }
    for p in predicted {
        let next = pi.len();
        pi.entry(p).or_insert(next);
    }
    let mut table = vec![vec![0u64; pi.len()]; ti.len()];
    for (t, p) in truth.iter().zip(predicted) {
        table[ti[t]][pi[p]] += 1;
    }
    let rows: Vec<u64> = table.iter().map(|r| r.iter().sum()).collect();
    let cols: Vec<u64> = (0..pi.len()).map(|j| table.iter().map(|r| r[j]).sum()).collect();
    Ok((table, rows, cols))
}

fn choose2(n: u64) -> f64 {
    (n * n.saturating_sub(1)) as f64 / 2.0
}

/// Adjusted Rand index between two labelings, in `[-1, 1]`; invariant under
/// relabeling of either side, 0 in expectation for random labelings.
pub fn adjusted_rand_index<T: Eq + Hash, U: Eq + Hash>(
    truth: &[T],
    predicted: &[U],
) -> Result<f64> {
    let (table, rows, cols) = contingency(truth, predicted)?;
    let n = truth.len() as u64;
    let index: f64 = table
        .iter()
        .flat_map(|r| r.iter())
        .map(|&v| choose2(v))
        .sum();
    let sum_rows: f64 = rows.iter().map(|&v| choose2(v)).sum();
    let sum_cols: f64 = cols.iter().map(|&v| choose2(v)).sum();
    let total = choose2(n);
    if total == 0.0 {
        return Ok(1.0);
    }
    let expected = sum_rows * sum_cols / total;
    let max = (sum_rows + sum_cols) / 2.0;
    if max == expected {
        // both labelings are trivial in the same way
        return Ok(1.0);
    }
    Ok((index - expected) / (max - expected))
}

/// Normalized mutual information with arithmetic-mean normalization,
/// in `[0, 1]`.
pub fn normalized_mutual_information<T: Eq + Hash, U: Eq + Hash>(
    truth: &[T],
    predicted: &[U],
) -> Result<f64> {
    let (table, rows, cols) = contingency(truth, predicted)?;
    let n = truth.len() as f64;
    if n == 0.0 {
        return Ok(1.0);
    }
    let entropy = |counts: &[u64]| -> f64 {
        -counts
            .iter()
            .filter(|&&c| c > 0)
            .map(|&c| {
                let p = c as f64 / n;
                p * p.ln()
            })
            .sum::<f64>()
    };
    let h_t = entropy(&rows);
    let h_p = entropy(&cols);
    if h_t == 0.0 && h_p == 0.0 {
        return Ok(1.0);
    }
    let mut mi = 0.0;
    for (i, row) in table.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            if v > 0 {
                let p = v as f64 / n;
                mi += p * ((n * v as f64) / (rows[i] * cols[j]) as f64).ln();
            }
        }
    }
    let mean = (h_t + h_p) / 2.0;
    Ok(if mean > 0.0 { (mi / mean).clamp(0.0, 1.0) } else { 0.0 })
}

/// A scored comparison of predicted states against truth labels.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LabelAlignment {
    pub truth: Vec<String>,
    pub predicted: Vec<usize>,
    pub ari: f64,
    pub nmi: f64,
    /// `(truth label, state, window count)` triples, sorted.
    pub confusion: Vec<(String, usize, usize)>,
}

pub fn align_labels(truth: &[String], predicted: &[usize]) -> Result<LabelAlignment> {
    let ari = adjusted_rand_index(truth, predicted)?;
    let nmi = normalized_mutual_information(truth, predicted)?;
    let mut counts: HashMap<(&String, usize), usize> = HashMap::new();
    for (t, &p) in truth.iter().zip(predicted) {
        *counts.entry((t, p)).or_insert(0) += 1;
    }
    let mut confusion: Vec<(String, usize, usize)> = counts
        .into_iter()
        .map(|((t, p), c)| (t.clone(), p, c))
        .collect();
    confusion.sort();
    Ok(LabelAlignment {
        truth: truth.to_vec(),
        predicted: predicted.to_vec(),
        ari,
        nmi,
        confusion,
    })
}
