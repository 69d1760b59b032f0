//! Acceptance suite: one test per criterion, each printing a PASS/FAIL
//! line (run with `cargo test --test acceptance -- --nocapture`).
//!
//! Criteria 6-9 need the publicly available SocioPatterns contact lists
//! (see README); they print SKIP when the files are not present. Everything
//! else is hermetic.

mod common;

use std::path::PathBuf;
use std::time::Instant;

use netstates::baseline::{baseline_detect, Linkage};
use netstates::community::{build_meta_network, louvain_detect, modularity, scan_resolutions};
use netstates::evaluation::{adjusted_rand_index, load_schedule, window_ground_truth};
use netstates::ingest::{parse_contact_log, ParseOptions, TemporalNetwork};
use netstates::pipeline::{self, MethodConfig, RunConfig};
use netstates::similarity::{best_alignment, series_similarity, similarity_matrix, tensor_similarity};
use netstates::synth::equal_duty_three_state_spec;
use netstates::window::{build_tensors, slice_windows, ConnectionSeries};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn pass(n: usize, name: &str, detail: String) {
    println!("acceptance {n:02} {name}: PASS ({detail})");
}

fn skip(n: usize, name: &str, why: String) {
    println!("acceptance {n:02} {name}: SKIP ({why})");
}

#[test]
fn criterion_01_ring_example_exactness() {
    let a = ConnectionSeries::from_bitstring("11100").unwrap();
    let b = ConnectionSeries::from_bitstring("00101").unwrap();
    let alignment = best_alignment(&a, &b).unwrap();
    assert_eq!((alignment.matched, a.len().max(b.len())), (4, 5));
    let sim = series_similarity(&a, &b).unwrap();
    assert_eq!(sim, 0.8);
    pass(1, "ring-example-exactness", format!("sim = {sim} = 4/5"));
}

#[test]
fn criterion_02_series_oracle_equivalence() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut cases = 0;
    while cases < 1200 {
        let la = rng.random_range(1..=16);
        let lb = rng.random_range(1..=16);
        let a: Vec<bool> = (0..la).map(|_| rng.random()).collect();
        let b: Vec<bool> = (0..lb).map(|_| rng.random()).collect();
        let fast = best_alignment(
            &ConnectionSeries::from_bits(&a),
            &ConnectionSeries::from_bits(&b),
        )
        .unwrap();
        let (matched, l) = common::naive_best_match(&a, &b);
        assert_eq!(
            (fast.matched, la.max(lb)),
            (matched, l),
            "a={a:?} b={b:?}"
        );
        cases += 1;
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
    pass(
        2,
        "series-oracle-equivalence",
        format!("{cases} random pairs exact in {elapsed:?}"),
    );
}

#[test]
fn criterion_03_tensor_mean_oracle_equivalence() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let mut cases = 0;
    while cases < 120 {
        let w = rng.random_range(1..=8);
        let nodes = rng.random_range(2..=8);
        let net = common::random_two_window_net(&mut rng, nodes, w);
        // odd total lengths exercise the unequal-length ring path
        let w_plan = if rng.random() { w } else { (w + 1).min(net.len()) };
        let plan = slice_windows(&net, w_plan).unwrap();
        let tensors = build_tensors(&net, &plan);
        for i in 0..tensors.len() {
            for j in i..tensors.len() {
                let fast = tensor_similarity(&tensors[i], &tensors[j]);
                let dense = common::dense_tensor_similarity(&tensors[i], &tensors[j]);
                assert_eq!(fast, dense, "case {cases}: windows {i},{j}");
            }
        }
        cases += 1;
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "took {elapsed:?}");
    pass(
        3,
        "tensor-mean-oracle-equivalence",
        format!("{cases} random instances exact in {elapsed:?}"),
    );
}

#[test]
fn criterion_04_louvain_vs_exhaustive() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(107);
    let mut worst_gap = 0.0f64;
    for case in 0..100u64 {
        let n = rng.random_range(3..=7);
        let net = common::random_meta_network(&mut rng, n, 0.75);
        let resolution = if case % 2 == 0 {
            1.0
        } else {
            rng.random_range(0.6..1.4)
        };
        // detection at resolution r maximizes Q_gamma with gamma = 1/r
        let gamma = 1.0 / resolution;
        let got = louvain_detect(&net, resolution, case).unwrap();
        let (_, best_q) = common::exhaustive_best_partition(&net, gamma);
        let tolerance = 1e-9f64.max(0.02 * best_q.abs());
        assert!(
            got.modularity >= best_q - tolerance,
            "case {case}: Q {} vs optimum {best_q}",
            got.modularity
        );
        worst_gap = worst_gap.max(best_q - got.modularity);

        // single-move local optimality, checked by full recomputation
        let base = modularity(&net, &got.labels, gamma);
        for node in 0..n {
            for target in 0..=got.num_states {
                let mut alt = got.labels.clone();
                alt[node] = target;
                assert!(
                    modularity(&net, &alt, gamma) <= base + 1e-9,
                    "case {case}: node {node} -> {target} improves"
                );
            }
        }
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 30.0, "took {elapsed:?}");
    pass(
        4,
        "louvain-vs-exhaustive",
        format!("100 graphs, worst optimum gap {worst_gap:.2e}, {elapsed:?}"),
    );
}

#[test]
fn criterion_05_planted_state_recovery() {
    let started = Instant::now();
    let mut min_proposed = f64::INFINITY;
    let mut max_baseline = f64::NEG_INFINITY;
    for seed in 0..10u64 {
        // three periodic templates with equal duty cycles: per-window
        // aggregate weights carry no state signal, timelines do
        let spec = equal_duty_three_state_spec(seed);
        let (net, truth) = netstates::synth::generate_planted_states(&spec).unwrap();
        let plan = slice_windows(&net, spec.window_len).unwrap();
        let tensors = build_tensors(&net, &plan);
        let sim = similarity_matrix(&tensors).unwrap();
        let meta = build_meta_network(&sim).unwrap();
        let detected = louvain_detect(&meta, 1.0, 42).unwrap();
        let proposed_ari = adjusted_rand_index(&truth, &detected.labels).unwrap();
        assert!(
            proposed_ari >= 0.9,
            "seed {seed}: proposed ARI {proposed_ari}"
        );

        let baseline = baseline_detect(&net, &plan, Linkage::Average, None).unwrap();
        let baseline_ari = adjusted_rand_index(&truth, &baseline.labels).unwrap();
        assert!(
            proposed_ari > baseline_ari,
            "seed {seed}: proposed {proposed_ari} not above baseline {baseline_ari}"
        );
        min_proposed = min_proposed.min(proposed_ari);
        max_baseline = max_baseline.max(baseline_ari);
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 120.0, "took {elapsed:?}");
    pass(
        5,
        "planted-state-recovery",
        format!(
            "10 seeds: proposed ARI >= {min_proposed:.3}, baseline ARI <= {max_baseline:.3}, {elapsed:?}"
        ),
    );
}

// ---------------------------------------------------------------------
// Real-dataset criteria. The SocioPatterns files are not redistributable
// fixtures; these tests run when they are present (see README) and skip
// otherwise.
// ---------------------------------------------------------------------

fn data_file(names: &[&str]) -> Option<PathBuf> {
    let dir = std::env::var("NETSTATES_DATA").unwrap_or_else(|_| "data".into());
    for base in [PathBuf::from(&dir), PathBuf::from("../..").join(&dir)] {
        for name in names {
            let p = base.join(name);
            if p.exists() {
                return Some(p);
            }
        }
    }
    None
}

const SCHOOL_FILES: &[&str] = &[
    "primaryschool.csv",
    "primaryschool.csv.gz",
    "primaryschool.tsv",
];
const CONFERENCE_FILES: &[&str] = &["ht09_contact_list.dat", "ht09_contact_list.dat.gz"];

/// Day-1 school network: the dataset clock is seconds since midnight of the
/// first day, so cropping at 17:20 (= 62400 s) isolates day one.
fn school_day_one(path: &std::path::Path) -> TemporalNetwork {
    let reader = pipeline::open_contact_reader(path).unwrap();
    let options = ParseOptions {
        time_from: None,
        time_to: Some(62400),
    };
    TemporalNetwork::from_reader(reader, options, None).unwrap()
}

fn majority_state(windows: &[usize], labels: &[usize]) -> usize {
    let mut counts = std::collections::HashMap::new();
    for &w in windows {
        *counts.entry(labels[w]).or_insert(0usize) += 1;
    }
    counts
        .into_iter()
        .max_by_key(|&(state, count)| (count, std::cmp::Reverse(state)))
        .map(|(state, _)| state)
        .unwrap()
}

fn school_truth(net: &TemporalNetwork, w: usize) -> Vec<String> {
    let schedule = load_schedule(
        &std::fs::read_to_string("tests/fixtures/school_schedule.json").unwrap(),
        0,
    )
    .unwrap();
    let plan = slice_windows(net, w).unwrap();
    window_ground_truth(&schedule, &plan, &net.grid())
}

#[test]
fn criterion_06_school_two_states() {
    let Some(path) = data_file(SCHOOL_FILES) else {
        skip(6, "school-two-states", "primaryschool.csv not found".into());
        return;
    };
    let started = Instant::now();
    let net = school_day_one(&path);
    let w = 1200 / net.grid().delta_t as usize; // 20 minutes
    let plan = slice_windows(&net, w).unwrap();
    let tensors = build_tensors(&net, &plan);
    let sim = similarity_matrix(&tensors).unwrap();
    let meta = build_meta_network(&sim).unwrap();
    let detected = louvain_detect(&meta, 1.0, 42).unwrap();
    assert_eq!(detected.num_states, 2, "expected exactly 2 states");

    let truth = school_truth(&net, w);
    let lunch: Vec<usize> = (0..truth.len())
        .filter(|&i| truth[i] == "Lunchtime")
        .collect();
    assert!(!lunch.is_empty());
    let (lo, hi) = (lunch[0], *lunch.last().unwrap());
    assert_eq!(hi - lo + 1, lunch.len(), "lunch block not contiguous");
    let class: Vec<usize> = (0..truth.len())
        .filter(|&i| truth[i] == "Class time")
        .collect();
    let s_lunch = majority_state(&lunch, &detected.labels);
    let s_class = majority_state(&class, &detected.labels);
    assert_ne!(s_lunch, s_class, "lunch state not distinct from class");
    // +-1 window slack at each lunch boundary
    for &i in &lunch {
        if i > lo && i < hi {
            assert_eq!(detected.labels[i], s_lunch, "interior lunch window {i}");
        }
    }
    for &i in &class {
        if i + 1 < lo || i > hi + 1 {
            assert_ne!(detected.labels[i], s_lunch, "class window {i} got lunch state");
        }
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 120.0, "took {elapsed:?}");
    pass(
        6,
        "school-two-states",
        format!(
            "{} windows, 2 states, lunch block windows {lo}..={hi}, {elapsed:?}",
            plan.num_windows()
        ),
    );
}

#[test]
fn criterion_07_school_hierarchy() {
    let Some(path) = data_file(SCHOOL_FILES) else {
        skip(7, "school-hierarchy", "primaryschool.csv not found".into());
        return;
    };
    let net = school_day_one(&path);
    let w = 1200 / net.grid().delta_t as usize;
    let plan = slice_windows(&net, w).unwrap();
    let tensors = build_tensors(&net, &plan);
    let sim = similarity_matrix(&tensors).unwrap();
    let meta = build_meta_network(&sim).unwrap();
    let scan = scan_resolutions(&meta, 1.0, 0.85, 0.01, 42).unwrap();

    let truth = school_truth(&net, w);
    let class: Vec<usize> = (0..truth.len())
        .filter(|&i| truth[i] == "Class time")
        .collect();
    let lunch: Vec<usize> = (0..truth.len())
        .filter(|&i| truth[i] == "Lunchtime")
        .collect();
    let breaks: Vec<usize> = (0..truth.len())
        .filter(|&i| truth[i] == "Break time")
        .collect();
    let morning: Vec<usize> = breaks.iter().copied().filter(|&i| i < lunch[0]).collect();
    let afternoon: Vec<usize> = breaks
        .iter()
        .copied()
        .filter(|&i| i > *lunch.last().unwrap())
        .collect();
    assert!(!morning.is_empty() && !afternoon.is_empty(), "break windows missing");

    let found = scan.entries.iter().find(|e| {
        if e.labeling.num_states < 3 {
            return false;
        }
        let labels = &e.labeling.labels;
        let s_class = majority_state(&class, labels);
        let s_lunch = majority_state(&lunch, labels);
        let off_schedule =
            |i: &usize| labels[*i] != s_class && labels[*i] != s_lunch;
        morning.iter().any(off_schedule) && afternoon.iter().any(off_schedule)
    });
    let entry = found.expect("no resolution in [0.85, 1.0] separates both breaks");
    pass(
        7,
        "school-hierarchy",
        format!(
            "gamma {:.2} yields {} states with both breaks separated",
            entry.gamma, entry.labeling.num_states
        ),
    );
}

#[test]
fn criterion_08_conference_break_grouping() {
    let Some(path) = data_file(CONFERENCE_FILES) else {
        skip(8, "conference-grouping", "ht09_contact_list.dat not found".into());
        return;
    };
    // conference clock: seconds on the dataset clock; 00:00 of day one is
    // taken as floor(t_min / 86400) * 86400 unless overridden
    let reader = pipeline::open_contact_reader(&path).unwrap();
    let log = parse_contact_log(reader, ParseOptions::default()).unwrap();
    let t_min = log.events.first().unwrap().t;
    let origin = std::env::var("NETSTATES_CONF_ORIGIN")
        .ok()
        .and_then(|v| v.parse::<u64>().ok())
        .unwrap_or(t_min / 86400 * 86400);
    let reader = pipeline::open_contact_reader(&path).unwrap();
    let options = ParseOptions {
        time_from: Some(origin + 9 * 3600),
        time_to: Some(origin + 19 * 3600),
    };
    let net = TemporalNetwork::from_reader(reader, options, None).unwrap();
    let w = 300 / net.grid().delta_t as usize; // 5 minutes
    let plan = slice_windows(&net, w).unwrap();
    let tensors = build_tensors(&net, &plan);
    let sim = similarity_matrix(&tensors).unwrap();
    let meta = build_meta_network(&sim).unwrap();
    let detected = louvain_detect(&meta, 1.0, 42).unwrap();

    let schedule = load_schedule(
        &std::fs::read_to_string("tests/fixtures/conference_schedule.json").unwrap(),
        origin,
    )
    .unwrap();
    let truth = window_ground_truth(&schedule, &plan, &net.grid());
    let grouped: Vec<usize> = (0..truth.len())
        .filter(|&i| {
            truth[i] == "Coffee break 1"
                || truth[i] == "Coffee break 2"
                || truth[i] == "Wine & cheese welcome reception"
        })
        .collect();
    assert!(!grouped.is_empty(), "no coffee-break/reception windows found");
    let shared = majority_state(&grouped, &detected.labels);
    let agreement = grouped
        .iter()
        .filter(|&&i| detected.labels[i] == shared)
        .count() as f64
        / grouped.len() as f64;
    assert!(
        agreement >= 0.7,
        "only {:.0}% of break/reception windows share one state",
        agreement * 100.0
    );
    pass(
        8,
        "conference-grouping",
        format!(
            "{} windows, {} break/reception windows agree {:.0}%",
            plan.num_windows(),
            grouped.len(),
            agreement * 100.0
        ),
    );
}

#[test]
fn criterion_09_baseline_contrast_on_school() {
    let Some(path) = data_file(SCHOOL_FILES) else {
        skip(9, "school-baseline-contrast", "primaryschool.csv not found".into());
        return;
    };
    let net = school_day_one(&path);
    let w = 1200 / net.grid().delta_t as usize;
    let plan = slice_windows(&net, w).unwrap();
    let truth = school_truth(&net, w);

    let baseline = baseline_detect(&net, &plan, Linkage::Average, None).unwrap();
    assert_eq!(baseline.num_states, 2, "baseline should pick 2 states");
    let lunch: Vec<usize> = (0..truth.len())
        .filter(|&i| truth[i] == "Lunchtime")
        .collect();
    let class: Vec<usize> = (0..truth.len())
        .filter(|&i| truth[i] == "Class time")
        .collect();
    let breaks: Vec<usize> = (0..truth.len())
        .filter(|&i| truth[i] == "Break time")
        .collect();
    let s_class = majority_state(&class, &baseline.labels);
    let s_lunch = majority_state(&lunch, &baseline.labels);
    assert_ne!(s_class, s_lunch, "baseline failed to separate lunch");
    for &b in &breaks {
        assert_eq!(
            baseline.labels[b], s_class,
            "baseline separated break window {b}, contrary to expectation"
        );
    }

    // quantitative contrast against the 3-label truth
    let on_schedule: Vec<usize> = (0..truth.len())
        .filter(|&i| truth[i] != netstates::evaluation::UNSCHEDULED)
        .collect();
    let truth3: Vec<&String> = on_schedule.iter().map(|&i| &truth[i]).collect();
    let baseline3: Vec<usize> = on_schedule.iter().map(|&i| baseline.labels[i]).collect();
    let baseline_ari = adjusted_rand_index(&truth3, &baseline3).unwrap();

    let tensors = build_tensors(&net, &plan);
    let sim = similarity_matrix(&tensors).unwrap();
    let meta = build_meta_network(&sim).unwrap();
    let scan = scan_resolutions(&meta, 1.0, 0.85, 0.01, 42).unwrap();
    let best_proposed = scan
        .entries
        .iter()
        .map(|e| {
            let pred: Vec<usize> = on_schedule.iter().map(|&i| e.labeling.labels[i]).collect();
            adjusted_rand_index(&truth3, &pred).unwrap()
        })
        .fold(f64::NEG_INFINITY, f64::max);
    assert!(
        baseline_ari < best_proposed,
        "baseline ARI {baseline_ari} not below best proposed {best_proposed}"
    );
    pass(
        9,
        "school-baseline-contrast",
        format!("baseline ARI {baseline_ari:.3} < best proposed {best_proposed:.3}"),
    );
}

#[test]
fn criterion_10_manifest_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let contacts = dir.path().join("contacts.tsv");
    let spec = equal_duty_three_state_spec(0);
    let (net, _) = netstates::synth::generate_planted_states(&spec).unwrap();
    std::fs::write(&contacts, net.to_contact_lines()).unwrap();

    let out1 = dir.path().join("run1");
    let config = RunConfig {
        input: contacts.clone(),
        delta_t: Some(20),
        time_from: Some(0),
        time_to: Some(net.grid().t_end),
        window_seconds: 20 * spec.window_len as u64,
        seed: 42,
        method: MethodConfig::Detect { resolution: 1.0 },
        write_simmatrix: true,
        dump_tensors: None,
        output_dir: out1.clone(),
    };
    let first = pipeline::run(&config).unwrap();

    // rerun strictly from the recorded manifest into a fresh directory
    let mut rerun = pipeline::load_manifest(&first.manifest_path).unwrap().config;
    let out2 = dir.path().join("run2");
    rerun.output_dir = out2.clone();
    pipeline::run(&rerun).unwrap();

    for name in ["states.json", "states.tsv", "simmatrix.csv"] {
        let a = std::fs::read(out1.join(name)).unwrap();
        let b = std::fs::read(out2.join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between runs");
    }
    pass(
        10,
        "manifest-determinism",
        "states.json, states.tsv, simmatrix.csv byte-identical on rerun".into(),
    );
}
