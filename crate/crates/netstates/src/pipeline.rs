//! End-to-end orchestration: load a contact list, window it, score window
//! similarity, detect states (proposed method or baseline), and write
//! reproducible artifacts.
//!
//! Every run writes a manifest carrying the fully resolved configuration;
//! re-running from a manifest reproduces the labeling outputs byte for
//! byte.

use std::fmt::Write as _;
use std::fs;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use flate2::read::GzDecoder;
use serde::{Deserialize, Serialize};

use crate::baseline::{baseline_detect, Linkage};
use crate::community::{build_meta_network, louvain_detect, scan_resolutions};
use crate::error::{Error, Result};
use crate::evaluation::{
    align_labels, load_schedule, window_ground_truth, GroundTruthSchedule, LabelAlignment,
};
use crate::ingest::{parse_contact_log, infer_time_grid, ParseOptions, TemporalNetwork, TimeGrid};
use crate::similarity::{similarity_matrix, SimilarityMatrix};
use crate::synth::{generate_planted_states, SyntheticSpec, SyntheticTruth};
use crate::window::{build_tensors, plan_windows, slice_windows, Window, WindowPlan};

/// Parse a duration like `20m`, `1200s`, `2h`, or plain seconds.
pub fn parse_duration(s: &str) -> Result<u64> {
    let bad = || Error::Config(format!("bad duration {s:?} (expected <int>[s|m|h])"));
    let (num, mult) = match s.as_bytes().last() {
        Some(b's') => (&s[..s.len() - 1], 1),
        Some(b'm') => (&s[..s.len() - 1], 60),
        Some(b'h') => (&s[..s.len() - 1], 3600),
        _ => (s, 1),
    };
    let v: u64 = num.parse().map_err(|_| bad())?;
    if v == 0 {
        return Err(bad());
    }
    Ok(v * mult)
}

/// Which detection method a run executes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MethodConfig {
    Detect {
        resolution: f64,
    },
    Scan {
        from: f64,
        to: f64,
        step: f64,
    },
    Baseline {
        linkage: Linkage,
        epsilon: Option<f64>,
    },
}

/// Fully resolved run configuration; this is what the manifest records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub input: PathBuf,
    pub delta_t: Option<u64>,
    pub time_from: Option<u64>,
    pub time_to: Option<u64>,
    pub window_seconds: u64,
    pub seed: u64,
    pub method: MethodConfig,
    #[serde(default)]
    pub write_simmatrix: bool,
    #[serde(default)]
    pub dump_tensors: Option<PathBuf>,
    pub output_dir: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub package: String,
    pub version: String,
    pub config: RunConfig,
}

/// One window's state assignment with its time span (first and last
/// snapshot timestamps).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowState {
    pub window: usize,
    pub t_start: u64,
    pub t_end: u64,
    pub state: usize,
}

/// The `states.json` artifact, shared by `detect` and `baseline` so
/// downstream evaluation is method-agnostic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatesFile {
    pub method: String,
    pub gamma: Option<f64>,
    pub modularity: Option<f64>,
    pub selected_k: Option<usize>,
    pub dunn: Option<f64>,
    pub seed: u64,
    pub delta_t: u64,
    pub window_snapshots: usize,
    pub num_states: usize,
    pub states: Vec<WindowState>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanFileEntry {
    pub gamma: f64,
    pub modularity: f64,
    pub num_states: usize,
    pub states: Vec<WindowState>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChangePoint {
    pub gamma: f64,
    pub num_states: usize,
}

/// The `scan.json` artifact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanFile {
    pub seed: u64,
    pub delta_t: u64,
    pub window_snapshots: usize,
    pub entries: Vec<ScanFileEntry>,
    pub change_points: Vec<ChangePoint>,
}

/// Everything a run produced.
#[derive(Debug)]
pub struct RunOutput {
    pub manifest_path: PathBuf,
    pub artifacts: Vec<PathBuf>,
    pub states: Option<StatesFile>,
    pub scan: Option<ScanFile>,
}

/// Open a contact list, transparently decompressing gzip (sniffed from the
/// magic bytes, not the extension).
pub fn open_contact_reader(path: &Path) -> Result<Box<dyn BufRead>> {
    let display = path.display().to_string();
    let file = fs::File::open(path).map_err(|e| Error::io(&display, e))?;
    let mut reader = BufReader::new(file);
    let magic = reader.fill_buf().map_err(|e| Error::io(&display, e))?;
    if magic.starts_with(&[0x1f, 0x8b]) {
        Ok(Box::new(BufReader::new(GzDecoder::new(reader))))
    } else {
        Ok(Box::new(reader))
    }
}

fn load_network(config: &RunConfig) -> Result<TemporalNetwork> {
    let reader = open_contact_reader(&config.input)?;
    let options = ParseOptions {
        time_from: config.time_from,
        time_to: config.time_to,
    };
    TemporalNetwork::from_reader(reader, options, config.delta_t)
}

/// Convert a wall-clock window duration into snapshots, rejecting
/// non-divisible combinations instead of rounding.
pub fn window_snapshots(window_seconds: u64, delta_t: u64) -> Result<usize> {
    if !window_seconds.is_multiple_of(delta_t) {
        return Err(Error::Config(format!(
            "window of {window_seconds} s is not a whole number of {delta_t} s snapshots"
        )));
    }
    Ok((window_seconds / delta_t) as usize)
}

struct ArtifactWriter {
    dir: PathBuf,
    written: Vec<PathBuf>,
}

impl ArtifactWriter {
    fn new(dir: &Path) -> Result<ArtifactWriter> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir.display().to_string(), e))?;
        Ok(ArtifactWriter {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        })
    }

    fn write_text(&mut self, name: &str, contents: &str) -> Result<PathBuf> {
        let path = self.dir.join(name);
        fs::write(&path, contents).map_err(|e| Error::io(path.display().to_string(), e))?;
        self.written.push(path.clone());
        Ok(path)
    }

    fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<PathBuf> {
        let mut body = serde_json::to_string_pretty(value)?;
        body.push('\n');
        self.write_text(name, &body)
    }

    fn cleanup(&self) {
        for p in &self.written {
            let _ = fs::remove_file(p);
        }
    }
}

fn window_states(
    plan: &WindowPlan,
    grid: &TimeGrid,
    labels: &[usize],
) -> Vec<WindowState> {
    plan.windows
        .iter()
        .enumerate()
        .map(|(i, w)| WindowState {
            window: i,
            t_start: grid.timestamp(w.start),
            t_end: grid.timestamp(w.start + w.len - 1),
            state: labels[i],
        })
        .collect()
}

fn states_tsv(states: &[WindowState]) -> String {
    let mut out = String::new();
    for s in states {
        writeln!(out, "{}\t{}", s.t_start, s.state).unwrap();
    }
    out
}

/// Render the similarity matrix as CSV: a header row of window start
/// times, then the matrix row-major.
pub fn similarity_csv(s: &SimilarityMatrix, window_starts: &[u64]) -> String {
    let mut out = String::new();
    out.push_str(
        &window_starts
            .iter()
            .map(u64::to_string)
            .collect::<Vec<_>>()
            .join(","),
    );
    out.push('\n');
    for i in 0..s.dim() {
        let row: Vec<String> = (0..s.dim()).map(|j| s.get(i, j).to_string()).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Long-format similarity listing: `i,j,sim` per line.
pub fn similarity_long_csv(s: &SimilarityMatrix) -> String {
    let mut out = String::from("i,j,sim\n");
    for i in 0..s.dim() {
        for j in 0..s.dim() {
            writeln!(out, "{i},{j},{}", s.get(i, j)).unwrap();
        }
    }
    out
}

fn dump_tensors_to(
    dir: &Path,
    net: &TemporalNetwork,
    tensors: &[crate::window::ConnectionSeriesTensor],
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir.display().to_string(), e))?;
    let mut paths = Vec::new();
    for t in tensors {
        let mut body = String::new();
        for ((a, b), series) in t.active_pairs() {
            writeln!(
                body,
                "{} {} {}",
                net.registry().token(a),
                net.registry().token(b),
                series.to_bitstring()
            )
            .unwrap();
        }
        let path = dir.join(format!("tensor_{:04}.txt", t.window_index()));
        fs::write(&path, body).map_err(|e| Error::io(path.display().to_string(), e))?;
        paths.push(path);
    }
    Ok(paths)
}

/// Execute a full run and write its artifacts. On error, any partially
/// written outputs are removed.
pub fn run(config: &RunConfig) -> Result<RunOutput> {
    let mut writer = ArtifactWriter::new(&config.output_dir)?;
    match run_inner(config, &mut writer) {
        Ok(out) => Ok(out),
        Err(e) => {
            writer.cleanup();
            Err(e)
        }
    }
}

fn run_inner(config: &RunConfig, writer: &mut ArtifactWriter) -> Result<RunOutput> {
    let net = load_network(config)?;
    let grid = net.grid();
    let w = window_snapshots(config.window_seconds, grid.delta_t)?;
    let plan = slice_windows(&net, w)?;
    let window_starts: Vec<u64> = plan
        .windows
        .iter()
        .map(|win| grid.timestamp(win.start))
        .collect();

    let mut states_out: Option<StatesFile> = None;
    let mut scan_out: Option<ScanFile> = None;

    match &config.method {
        MethodConfig::Detect { resolution } => {
            let tensors = build_tensors(&net, &plan);
            if let Some(dir) = &config.dump_tensors {
                writer.written.extend(dump_tensors_to(dir, &net, &tensors)?);
            }
            let sim = similarity_matrix(&tensors)?;
            if config.write_simmatrix {
                writer.write_text("simmatrix.csv", &similarity_csv(&sim, &window_starts))?;
            }
            let meta = build_meta_network(&sim)?;
            let labeling = louvain_detect(&meta, *resolution, config.seed)?;
            let states = window_states(&plan, &grid, &labeling.labels);
            let file = StatesFile {
                method: "detect".into(),
                gamma: Some(labeling.resolution),
                modularity: Some(labeling.modularity),
                selected_k: None,
                dunn: None,
                seed: config.seed,
                delta_t: grid.delta_t,
                window_snapshots: w,
                num_states: labeling.num_states,
                states,
            };
            writer.write_json("states.json", &file)?;
            writer.write_text("states.tsv", &states_tsv(&file.states))?;
            states_out = Some(file);
        }
        MethodConfig::Scan { from, to, step } => {
            let tensors = build_tensors(&net, &plan);
            if let Some(dir) = &config.dump_tensors {
                writer.written.extend(dump_tensors_to(dir, &net, &tensors)?);
            }
            let sim = similarity_matrix(&tensors)?;
            if config.write_simmatrix {
                writer.write_text("simmatrix.csv", &similarity_csv(&sim, &window_starts))?;
            }
            let meta = build_meta_network(&sim)?;
            let scan = scan_resolutions(&meta, *from, *to, *step, config.seed)?;
            let entries: Vec<ScanFileEntry> = scan
                .entries
                .iter()
                .map(|e| ScanFileEntry {
                    gamma: e.gamma,
                    modularity: e.labeling.modularity,
                    num_states: e.labeling.num_states,
                    states: window_states(&plan, &grid, &e.labeling.labels),
                })
                .collect();
            let change_points = scan
                .change_points()
                .into_iter()
                .map(|(gamma, num_states)| ChangePoint { gamma, num_states })
                .collect();
            let file = ScanFile {
                seed: config.seed,
                delta_t: grid.delta_t,
                window_snapshots: w,
                entries,
                change_points,
            };
            writer.write_json("scan.json", &file)?;
            let mut tsv = String::from("gamma\tnum_states\tmodularity\n");
            for e in &file.entries {
                writeln!(tsv, "{}\t{}\t{}", e.gamma, e.num_states, e.modularity).unwrap();
            }
            writer.write_text("scan.tsv", &tsv)?;
            scan_out = Some(file);
        }
        MethodConfig::Baseline { linkage, epsilon } => {
            let detection = baseline_detect(&net, &plan, *linkage, *epsilon)?;
            let states = window_states(&plan, &grid, &detection.labels);
            let file = StatesFile {
                method: "baseline".into(),
                gamma: None,
                modularity: None,
                selected_k: Some(detection.selected_k),
                dunn: Some(detection.dunn),
                seed: config.seed,
                delta_t: grid.delta_t,
                window_snapshots: w,
                num_states: detection.num_states,
                states,
            };
            writer.write_json("states.json", &file)?;
            writer.write_text("states.tsv", &states_tsv(&file.states))?;
            states_out = Some(file);
        }
    }

    let manifest = Manifest {
        package: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        config: config.clone(),
    };
    let manifest_path = writer.write_json("manifest.json", &manifest)?;
    Ok(RunOutput {
        manifest_path,
        artifacts: writer.written.clone(),
        states: states_out,
        scan: scan_out,
    })
}

/// Load the config back out of a manifest for a byte-identical rerun.
pub fn load_manifest(path: &Path) -> Result<Manifest> {
    let body =
        fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    Ok(serde_json::from_str(&body)?)
}

/// Per-window contact counts for the dataset report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindowActivity {
    pub window: usize,
    pub t_start: u64,
    pub contacts: usize,
}

/// Dataset report produced by `summarize`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryReport {
    pub nodes: usize,
    pub events: usize,
    pub delta_t: u64,
    pub t_start: u64,
    pub t_end: u64,
    pub snapshots: usize,
    pub duration_seconds: u64,
    pub window_activity: Option<Vec<WindowActivity>>,
}

pub fn summarize(
    input: &Path,
    options: ParseOptions,
    delta_t_override: Option<u64>,
    window_seconds: Option<u64>,
) -> Result<SummaryReport> {
    let reader = open_contact_reader(input)?;
    let log = parse_contact_log(reader, options)?;
    let grid = infer_time_grid(&log.events, delta_t_override)?;
    let events = log.events.len();
    let net = TemporalNetwork::regularize(log, grid)?;
    let window_activity = match window_seconds {
        Some(secs) => {
            let w = window_snapshots(secs, grid.delta_t)?;
            let plan = plan_windows(net.len(), w)?;
            Some(
                plan.windows
                    .iter()
                    .enumerate()
                    .map(|(i, win)| WindowActivity {
                        window: i,
                        t_start: grid.timestamp(win.start),
                        contacts: (win.start..win.start + win.len)
                            .map(|s| net.snapshot(s).len())
                            .sum(),
                    })
                    .collect(),
            )
        }
        None => None,
    };
    Ok(SummaryReport {
        nodes: net.num_nodes(),
        events,
        delta_t: grid.delta_t,
        t_start: grid.t_start,
        t_end: grid.t_end,
        snapshots: net.len(),
        duration_seconds: grid.t_end - grid.t_start,
        window_activity,
    })
}

/// The `eval` report: requested metrics plus the confusion triples.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub num_windows: usize,
    pub ari: Option<f64>,
    pub nmi: Option<f64>,
    pub confusion: Vec<(String, usize, usize)>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum TruthFile {
    Synthetic(SyntheticTruth),
    Schedule(#[allow(dead_code)] Vec<serde_json::Value>),
}

/// Score a `states.json` prediction against a truth file, which is either
/// a schedule (JSON array of labeled intervals, projected onto the
/// prediction's windows by majority) or a synthetic truth sidecar with
/// per-window labels.
pub fn evaluate(
    truth_path: &Path,
    pred_path: &Path,
    clock_origin: u64,
    want_ari: bool,
    want_nmi: bool,
) -> Result<EvalReport> {
    let pred_body = fs::read_to_string(pred_path)
        .map_err(|e| Error::io(pred_path.display().to_string(), e))?;
    let pred: StatesFile = serde_json::from_str(&pred_body)?;
    let predicted: Vec<usize> = pred.states.iter().map(|s| s.state).collect();

    let truth_body = fs::read_to_string(truth_path)
        .map_err(|e| Error::io(truth_path.display().to_string(), e))?;
    let truth_labels: Vec<String> = match serde_json::from_str::<TruthFile>(&truth_body)? {
        TruthFile::Synthetic(truth) => truth.labels.iter().map(|l| format!("state-{l}")).collect(),
        TruthFile::Schedule(_) => {
            let schedule = load_schedule(&truth_body, clock_origin)?;
            let (plan, grid) = reconstruct_windows(&pred)?;
            window_ground_truth(&schedule, &plan, &grid)
        }
    };

    let alignment: LabelAlignment = align_labels(&truth_labels, &predicted)?;
    Ok(EvalReport {
        num_windows: predicted.len(),
        ari: want_ari.then_some(alignment.ari),
        nmi: want_nmi.then_some(alignment.nmi),
        confusion: alignment.confusion,
    })
}

/// Rebuild the window plan and grid a `states.json` was produced on.
pub fn reconstruct_windows(pred: &StatesFile) -> Result<(WindowPlan, TimeGrid)> {
    let first = pred
        .states
        .first()
        .ok_or_else(|| Error::Config("states file has no windows".into()))?;
    let last = pred.states.last().unwrap();
    let grid = TimeGrid {
        delta_t: pred.delta_t,
        t_start: first.t_start,
        t_end: last.t_end,
    };
    let windows = pred
        .states
        .iter()
        .map(|s| {
            let start = grid.index_of(s.t_start).ok_or_else(|| {
                Error::Config(format!("window start {} is off the grid", s.t_start))
            })?;
            let len = ((s.t_end - s.t_start) / pred.delta_t) as usize + 1;
            Ok(Window { start, len })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((
        WindowPlan {
            w: pred.window_snapshots,
            windows,
        },
        grid,
    ))
}

/// Ground-truth labels for an existing prediction's windows under a
/// schedule file (used by tests and examples).
pub fn truth_for_states(
    schedule: &GroundTruthSchedule,
    pred: &StatesFile,
) -> Result<Vec<String>> {
    let (plan, grid) = reconstruct_windows(pred)?;
    Ok(window_ground_truth(schedule, &plan, &grid))
}

/// Generate a synthetic instance and write `contacts.tsv` + truth sidecar.
pub fn synth_to_files(
    spec_path: &Path,
    out_path: &Path,
    truth_path: &Path,
) -> Result<(TemporalNetwork, Vec<usize>)> {
    let body = fs::read_to_string(spec_path)
        .map_err(|e| Error::io(spec_path.display().to_string(), e))?;
    let spec: SyntheticSpec = serde_json::from_str(&body)?;
    let (net, labels) = generate_planted_states(&spec)?;
    fs::write(out_path, net.to_contact_lines())
        .map_err(|e| Error::io(out_path.display().to_string(), e))?;
    let truth = SyntheticTruth::new(&spec, &net, labels.clone());
    let mut body = serde_json::to_string_pretty(&truth)?;
    body.push('\n');
    fs::write(truth_path, body).map_err(|e| Error::io(truth_path.display().to_string(), e))?;
    Ok((net, labels))
}
