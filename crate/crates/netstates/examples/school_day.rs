//! The full workflow on the SocioPatterns primary-school data (first day,
//! 20-minute windows): detection at resolution 1.0, the hierarchy scan,
//! and the aggregation baseline, each compared against the published
//! school-day schedule.
//!
//! The dataset is not bundled. Download `primaryschool.csv[.gz]` from
//! sociopatterns.org ("Primary school temporal network data") into
//! `./data/` (or set NETSTATES_DATA), then:
//!
//!     cargo run --release --example school_day

use std::path::PathBuf;

use netstates::pipeline::open_contact_reader;
use netstates::prelude::*;

const SCHOOL_SCHEDULE: &str = r#"[
    { "start": "8:30",  "end": "10:30", "label": "Class" },
    { "start": "10:30", "end": "10:55", "label": "Break" },
    { "start": "10:55", "end": "12:00", "label": "Class" },
    { "start": "12:00", "end": "14:00", "label": "Lunch" },
    { "start": "14:00", "end": "15:30", "label": "Class" },
    { "start": "15:30", "end": "15:55", "label": "Break" },
    { "start": "15:55", "end": "16:30", "label": "Class" }
]"#;

fn find_data() -> Option<PathBuf> {
    let dir = std::env::var("NETSTATES_DATA").unwrap_or_else(|_| "data".into());
    ["primaryschool.csv", "primaryschool.csv.gz"]
        .iter()
        .map(|name| PathBuf::from(&dir).join(name))
        .find(|p| p.exists())
}

fn clock(t: u64) -> String {
    format!("{:02}:{:02}", t / 3600, (t % 3600) / 60)
}

fn main() -> Result<()> {
    let Some(path) = find_data() else {
        eprintln!("primaryschool.csv not found under ./data (or $NETSTATES_DATA).");
        eprintln!("Download it from sociopatterns.org and re-run.");
        return Ok(());
    };

    // timestamps are seconds since midnight of day one; crop at 17:20 to
    // keep the first day only
    let options = ParseOptions {
        time_from: None,
        time_to: Some(62400),
    };
    let net = TemporalNetwork::from_reader(open_contact_reader(&path)?, options, None)?;
    println!(
        "day 1: {} nodes, {} contacts, delta_t {} s, {}..{}",
        net.num_nodes(),
        net.total_contacts(),
        net.grid().delta_t,
        clock(net.grid().t_start),
        clock(net.grid().t_end)
    );

    let w = (1200 / net.grid().delta_t) as usize; // 20-minute windows
    let plan = slice_windows(&net, w)?;
    let schedule = load_schedule(SCHOOL_SCHEDULE, 0)?;
    let truth = window_ground_truth(&schedule, &plan, &net.grid());

    let tensors = build_tensors(&net, &plan);
    let sim = similarity_matrix(&tensors)?;
    let meta = build_meta_network(&sim)?;

    let detected = louvain_detect(&meta, 1.0, 42)?;
    println!("\nresolution 1.0 -> {} states:", detected.num_states);
    for (i, window) in plan.windows.iter().enumerate() {
        println!(
            "  {}  {:<11}  state {}",
            clock(net.grid().timestamp(window.start)),
            truth[i],
            detected.labels[i]
        );
    }
    let coarse = align_labels(&truth, &detected.labels)?;
    println!("ARI vs schedule: {:.3}", coarse.ari);

    println!("\nscanning resolution 1.00 -> 0.85:");
    let scan = scan_resolutions(&meta, 1.0, 0.85, 0.01, 42)?;
    for (resolution, states) in scan.change_points() {
        println!("  resolution {resolution:.2}: {states} states");
    }
    let best = scan
        .entries
        .iter()
        .map(|e| {
            let ari = adjusted_rand_index(&truth, &e.labeling.labels).unwrap();
            (e, ari)
        })
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap();
    println!(
        "best schedule agreement: resolution {:.2} with {} states, ARI {:.3}",
        best.0.gamma, best.0.labeling.num_states, best.1
    );

    let baseline = baseline_detect(&net, &plan, Linkage::Average, None)?;
    let baseline_ari = adjusted_rand_index(&truth, &baseline.labels)?;
    println!(
        "\nbaseline (aggregation + DeltaCon + Dunn): {} states, ARI {:.3}",
        baseline.num_states, baseline_ari
    );
    Ok(())
}
