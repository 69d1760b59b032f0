//! Contact-list ingestion: parsing, time-grid inference, and regularization
//! into a snapshot sequence.
//!
//! Input is the usual contact-list form: one interaction per line,
//! `t i j [extra columns ignored]`, whitespace separated, `#` comments
//! allowed. Node tokens are opaque; they are mapped once to dense indices
//! and everything downstream works on those.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;
use std::io::BufRead;

use crate::error::{Error, Result};

/// Dense node index assigned at ingest.
pub type NodeIdx = u32;

/// Bijection between external node tokens and dense indices.
///
/// Indices are assigned canonically: tokens are sorted (numerically when
/// every token parses as an integer, lexicographically otherwise) so the
/// mapping depends only on the set of nodes, not on input line order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeRegistry {
    tokens: Vec<String>,
    index: HashMap<String, NodeIdx>,
}

impl NodeRegistry {
    pub fn from_tokens<I, S>(tokens: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let set: BTreeSet<String> = tokens.into_iter().map(Into::into).collect();
        let mut tokens: Vec<String> = set.into_iter().collect();
        if tokens.iter().all(|t| t.parse::<u64>().is_ok()) {
            tokens.sort_by_key(|t| t.parse::<u64>().unwrap());
        }
        let index = tokens
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i as NodeIdx))
            .collect();
        NodeRegistry { tokens, index }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn token(&self, idx: NodeIdx) -> &str {
        &self.tokens[idx as usize]
    }

    pub fn index_of(&self, token: &str) -> Option<NodeIdx> {
        self.index.get(token).copied()
    }
}

/// One undirected contact at a grid timestamp. `a < b` always holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct ContactEvent {
    pub t: u64,
    pub a: NodeIdx,
    pub b: NodeIdx,
}

/// Parsed contact list: deduplicated events plus the node registry they
/// are expressed in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContactLog {
    pub events: Vec<ContactEvent>,
    pub registry: NodeRegistry,
}

/// Options for [`parse_contact_log`].
#[derive(Debug, Clone, Copy, Default)]
pub struct ParseOptions {
    /// Drop events with `t < time_from` (inclusive crop).
    pub time_from: Option<u64>,
    /// Drop events with `t > time_to` (inclusive crop).
    pub time_to: Option<u64>,
}

/// Parse a SocioPatterns-style contact list.
///
/// The first three whitespace-separated columns are `t i j`; anything after
/// is ignored. `(t,i,j)` and `(t,j,i)` are the same contact and duplicates
/// collapse to one event. Events come back sorted by `(t, a, b)`.
pub fn parse_contact_log<R: BufRead>(source: R, options: ParseOptions) -> Result<ContactLog> {
    let mut raw: Vec<(u64, String, String)> = Vec::new();
    for (lineno, line) in source.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line.map_err(|e| Error::io(format!("line {lineno}"), e))?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut cols = trimmed.split_whitespace();
        let (Some(t), Some(i), Some(j)) = (cols.next(), cols.next(), cols.next()) else {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("expected at least 3 columns, got {:?}", trimmed),
            });
        };
        let t: u64 = t.parse().map_err(|_| Error::Parse {
            line: lineno,
            msg: format!("non-numeric timestamp {t:?}"),
        })?;
        if i == j {
            return Err(Error::SelfContact {
                line: lineno,
                node: i.to_string(),
            });
        }
        if options.time_from.is_some_and(|from| t < from)
            || options.time_to.is_some_and(|to| t > to)
        {
            continue;
        }
        raw.push((t, i.to_string(), j.to_string()));
    }

    let registry =
        NodeRegistry::from_tokens(raw.iter().flat_map(|(_, i, j)| [i.clone(), j.clone()]));
    let mut events: Vec<ContactEvent> = raw
        .into_iter()
        .map(|(t, i, j)| {
            let a = registry.index_of(&i).unwrap();
            let b = registry.index_of(&j).unwrap();
            ContactEvent {
                t,
                a: a.min(b),
                b: a.max(b),
            }
        })
        .collect();
    events.sort_unstable();
    events.dedup();
    Ok(ContactLog { events, registry })
}

/// Uniform sampling grid: timestamps `t_start, t_start + delta_t, ..., t_end`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TimeGrid {
    pub delta_t: u64,
    pub t_start: u64,
    pub t_end: u64,
}

impl TimeGrid {
    /// Number of grid points.
    pub fn len(&self) -> usize {
        ((self.t_end - self.t_start) / self.delta_t) as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false // a grid always has at least one point
    }

    pub fn timestamp(&self, i: usize) -> u64 {
        self.t_start + i as u64 * self.delta_t
    }

    pub fn index_of(&self, t: u64) -> Option<usize> {
        if t < self.t_start || t > self.t_end || !(t - self.t_start).is_multiple_of(self.delta_t)
        {
            return None;
        }
        Some(((t - self.t_start) / self.delta_t) as usize)
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Infer the sampling grid from event timestamps.
///
/// Without an override, `delta_t` is the gcd of all inter-timestamp gaps
/// (sparse data may skip grid points, so the minimum gap would be wrong).
/// A single distinct timestamp carries no gap information; `delta_t`
/// defaults to 1 s there, which is irrelevant for the one-snapshot grid it
/// produces.
pub fn infer_time_grid(
    events: &[ContactEvent],
    delta_t_override: Option<u64>,
) -> Result<TimeGrid> {
    if events.is_empty() {
        return Err(Error::NoEvents);
    }
    let t_start = events.iter().map(|e| e.t).min().unwrap();
    let t_end = events.iter().map(|e| e.t).max().unwrap();
    let delta_t = match delta_t_override {
        Some(dt) => {
            if dt == 0 {
                return Err(Error::Config("delta-t must be positive".into()));
            }
            dt
        }
        None => {
            let mut g = 0u64;
            for e in events {
                g = gcd(g, e.t - t_start);
            }
            if g == 0 {
                1
            } else {
                g
            }
        }
    };
    for e in events {
        if !(e.t - t_start).is_multiple_of(delta_t) {
            return Err(Error::GridMismatch {
                t: e.t,
                delta_t,
                t_start,
            });
        }
    }
    Ok(TimeGrid {
        delta_t,
        t_start,
        t_end,
    })
}

/// A regularized temporal network: one unweighted, undirected edge set per
/// grid point. Grid positions with no recorded contacts hold an empty edge
/// set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TemporalNetwork {
    grid: TimeGrid,
    registry: NodeRegistry,
    snapshots: Vec<Vec<(NodeIdx, NodeIdx)>>,
}

impl TemporalNetwork {
    /// Place every event onto the grid, synthesizing empty snapshots for
    /// unrecorded timestamps.
    pub fn regularize(log: ContactLog, grid: TimeGrid) -> Result<TemporalNetwork> {
        let mut snapshots = vec![Vec::new(); grid.len()];
        for e in &log.events {
            let i = grid.index_of(e.t).ok_or(Error::GridMismatch {
                t: e.t,
                delta_t: grid.delta_t,
                t_start: grid.t_start,
            })?;
            snapshots[i].push((e.a, e.b));
        }
        for s in &mut snapshots {
            s.sort_unstable();
            s.dedup();
        }
        Ok(TemporalNetwork {
            grid,
            registry: log.registry,
            snapshots,
        })
    }

    /// Parse, infer the grid, and regularize in one step.
    pub fn from_reader<R: BufRead>(
        source: R,
        options: ParseOptions,
        delta_t_override: Option<u64>,
    ) -> Result<TemporalNetwork> {
        let log = parse_contact_log(source, options)?;
        let grid = infer_time_grid(&log.events, delta_t_override)?;
        TemporalNetwork::regularize(log, grid)
    }

    pub fn grid(&self) -> TimeGrid {
        self.grid
    }

    /// Number of snapshots (grid points).
    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }

    pub fn num_nodes(&self) -> usize {
        self.registry.len()
    }

    pub fn registry(&self) -> &NodeRegistry {
        &self.registry
    }

    /// Edge set at grid position `i`, sorted, each pair `(a, b)` with `a < b`.
    pub fn snapshot(&self, i: usize) -> &[(NodeIdx, NodeIdx)] {
        &self.snapshots[i]
    }

    pub fn snapshots(&self) -> impl Iterator<Item = &[(NodeIdx, NodeIdx)]> {
        self.snapshots.iter().map(Vec::as_slice)
    }

    /// Total number of (deduplicated) contacts across all snapshots.
    pub fn total_contacts(&self) -> usize {
        self.snapshots.iter().map(Vec::len).sum()
    }

    /// Build directly from per-snapshot edge lists (used by the synthetic
    /// generator, which knows its grid exactly).
    pub fn from_parts(
        grid: TimeGrid,
        registry: NodeRegistry,
        mut snapshots: Vec<Vec<(NodeIdx, NodeIdx)>>,
    ) -> Result<TemporalNetwork> {
        if snapshots.len() != grid.len() {
            return Err(Error::Config(format!(
                "snapshot count {} does not match grid length {}",
                snapshots.len(),
                grid.len()
            )));
        }
        for s in &mut snapshots {
            s.sort_unstable();
            s.dedup();
            for &(a, b) in s.iter() {
                if a >= b || b as usize >= registry.len() {
                    return Err(Error::Config(format!("bad edge ({a}, {b})")));
                }
            }
        }
        Ok(TemporalNetwork {
            grid,
            registry,
            snapshots,
        })
    }

    /// Serialize back to contact-list lines (`t i j`, one contact per line,
    /// time-ordered). Re-parsing the output reproduces this network.
    pub fn to_contact_lines(&self) -> String {
        let mut out = String::new();
        for (i, snap) in self.snapshots.iter().enumerate() {
            let t = self.grid.timestamp(i);
            for &(a, b) in snap {
                writeln!(out, "{t}\t{}\t{}", self.registry.token(a), self.registry.token(b))
                    .unwrap();
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    fn parse(s: &str) -> Result<ContactLog> {
        parse_contact_log(Cursor::new(s), ParseOptions::default())
    }

    #[test]
    fn undirected_dedup() {
        let log = parse("60 1558 1567\n60 1567 1558\n").unwrap();
        assert_eq!(log.events.len(), 1);
        let e = log.events[0];
        assert_eq!(e.t, 60);
        assert_eq!(
            (log.registry.token(e.a), log.registry.token(e.b)),
            ("1558", "1567")
        );
    }

    #[test]
    fn extra_columns_ignored() {
        let log = parse("31220 1558 1567 3B 3B\n").unwrap();
        assert_eq!(log.events.len(), 1);
        assert_eq!(log.events[0].t, 31220);
    }

    #[test]
    fn malformed_inputs() {
        match parse("abc 1 2\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 1),
            other => panic!("expected parse error, got {other:?}"),
        }
        match parse("10 1\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 1),
            other => panic!("expected parse error, got {other:?}"),
        }
        match parse("10 7 7\n") {
            Err(Error::SelfContact { line, node }) => {
                assert_eq!(line, 1);
                assert_eq!(node, "7");
            }
            other => panic!("expected self-contact error, got {other:?}"),
        }
    }

    #[test]
    fn comments_and_blank_lines_skipped() {
        let log = parse("# header\n\n20 1 2\n").unwrap();
        assert_eq!(log.events.len(), 1);
    }

    #[test]
    fn time_crop_is_inclusive() {
        let opts = ParseOptions {
            time_from: Some(20),
            time_to: Some(40),
        };
        let log = parse_contact_log(Cursor::new("0 1 2\n20 1 2\n40 1 2\n60 1 2\n"), opts).unwrap();
        let times: Vec<u64> = log.events.iter().map(|e| e.t).collect();
        assert_eq!(times, vec![20, 40]);
    }

    #[test]
    fn grid_inference_uses_gcd_of_gaps() {
        let log = parse("20 1 2\n40 1 2\n100 1 2\n").unwrap();
        let grid = infer_time_grid(&log.events, None).unwrap();
        assert_eq!((grid.delta_t, grid.t_start, grid.t_end), (20, 20, 100));
        assert_eq!(grid.len(), 5);
    }

    #[test]
    fn grid_override() {
        let log = parse("0 1 2\n20 1 2\n").unwrap();
        let grid = infer_time_grid(&log.events, Some(20)).unwrap();
        assert_eq!((grid.delta_t, grid.t_start, grid.t_end), (20, 0, 20));

        let log = parse("0 1 2\n30 1 2\n").unwrap();
        match infer_time_grid(&log.events, Some(20)) {
            Err(Error::GridMismatch { t, .. }) => assert_eq!(t, 30),
            other => panic!("expected grid mismatch, got {other:?}"),
        }
    }

    #[test]
    fn single_timestamp_grid() {
        let log = parse("50 1 2\n").unwrap();
        let grid = infer_time_grid(&log.events, None).unwrap();
        assert_eq!(grid.len(), 1);
        let net = TemporalNetwork::regularize(log, grid).unwrap();
        assert_eq!(net.len(), 1);
        assert_eq!(net.snapshot(0).len(), 1);
    }

    #[test]
    fn regularize_synthesizes_empty_snapshots() {
        let log = parse("0 1 2\n40 2 3\n").unwrap();
        let grid = infer_time_grid(&log.events, Some(20)).unwrap();
        let net = TemporalNetwork::regularize(log, grid).unwrap();
        assert_eq!(net.len(), 3);
        assert_eq!(net.snapshot(0).len(), 1);
        assert!(net.snapshot(1).is_empty());
        assert_eq!(net.snapshot(2).len(), 1);
    }

    #[test]
    fn contact_conservation() {
        let input = "0 5 3\n0 1 2\n20 5 1\n60 3 5\n60 5 3\n";
        let log = parse(input).unwrap();
        let n_events = log.events.len();
        let grid = infer_time_grid(&log.events, None).unwrap();
        let net = TemporalNetwork::regularize(log, grid).unwrap();
        assert_eq!(net.total_contacts(), n_events);
    }

    #[test]
    fn round_trip_identity() {
        let input = "40 9 8\n0 1 9\n0 9 8\n20 xx 1\n";
        let log = parse(input).unwrap();
        let grid = infer_time_grid(&log.events, None).unwrap();
        let net = TemporalNetwork::regularize(log, grid).unwrap();
        let lines = net.to_contact_lines();
        let net2 = TemporalNetwork::from_reader(
            Cursor::new(lines),
            ParseOptions::default(),
            None,
        )
        .unwrap();
        assert_eq!(net, net2);
    }

    #[test]
    fn registry_is_input_order_independent() {
        let a = parse("0 7 3\n20 1 7\n").unwrap();
        let b = parse("20 7 1\n0 3 7\n").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn numeric_tokens_sort_numerically() {
        let log = parse("0 10 9\n").unwrap();
        assert_eq!(log.registry.token(0), "9");
        assert_eq!(log.registry.token(1), "10");
    }
}
