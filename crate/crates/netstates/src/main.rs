//! Thin command-line front end; all logic lives in the library.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use netstates::baseline::Linkage;
use netstates::error::{Error, Result};
use netstates::ingest::ParseOptions;
use netstates::pipeline::{
    self, parse_duration, MethodConfig, RunConfig, RunOutput,
};

#[derive(Parser)]
#[command(name = "netstates", version, about = "Detect dynamic states in temporal contact networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct InputArgs {
    /// Contact list (`t i j [extra]` per line; gzip detected automatically)
    #[arg(long)]
    input: Option<PathBuf>,
    /// Sampling interval override in seconds (default: inferred via gcd)
    #[arg(long)]
    delta_t: Option<u64>,
    /// Keep only events at or after this time (seconds or HH:MM)
    #[arg(long)]
    time_from: Option<String>,
    /// Keep only events at or before this time (seconds or HH:MM)
    #[arg(long)]
    time_to: Option<String>,
    /// Dataset second corresponding to clock 00:00 (for HH:MM arguments)
    #[arg(long, default_value_t = 0)]
    clock_origin: u64,
}

impl InputArgs {
    fn parse_options(&self) -> Result<ParseOptions> {
        let resolve = |s: &Option<String>| -> Result<Option<u64>> {
            s.as_deref()
                .map(|v| netstates::evaluation::parse_time(v, self.clock_origin))
                .transpose()
        };
        Ok(ParseOptions {
            time_from: resolve(&self.time_from)?,
            time_to: resolve(&self.time_to)?,
        })
    }

    fn required_input(&self) -> Result<PathBuf> {
        self.input
            .clone()
            .ok_or_else(|| Error::Config("--input is required".into()))
    }
}

#[derive(Args, Clone)]
struct RunArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Window duration: `<int>[s|m|h]`, e.g. `20m`
    #[arg(long)]
    window: Option<String>,
    /// Seed for the community-detection visit order
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Directory for artifacts (states/scan JSON + TSV, manifest)
    #[arg(long, default_value = "netstates-out")]
    output_dir: PathBuf,
    /// Also write the window similarity matrix as CSV
    #[arg(long)]
    simmatrix: bool,
    /// Write one `j k bitstring` text file per window into this directory
    #[arg(long)]
    dump_tensors: Option<PathBuf>,
}

impl RunArgs {
    fn to_config(&self, method: MethodConfig) -> Result<RunConfig> {
        let options = self.input.parse_options()?;
        let window = self
            .window
            .as_deref()
            .ok_or_else(|| Error::Config("--window is required".into()))?;
        Ok(RunConfig {
            input: self.input.required_input()?,
            delta_t: self.input.delta_t,
            time_from: options.time_from,
            time_to: options.time_to,
            window_seconds: parse_duration(window)?,
            seed: self.seed,
            method,
            write_simmatrix: self.simmatrix,
            dump_tensors: self.dump_tensors.clone(),
            output_dir: self.output_dir.clone(),
        })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Report node count, event count, grid, and per-window activity
    Summarize {
        #[command(flatten)]
        input: InputArgs,
        /// Optional window duration for the activity histogram
        #[arg(long)]
        window: Option<String>,
        /// Output format
        #[arg(long, default_value = "json")]
        format: String,
    },
    /// Detect dynamic states with the connection-series pipeline
    Detect {
        #[command(flatten)]
        run: RunArgs,
        /// Community resolution parameter
        #[arg(long, default_value_t = 1.0)]
        resolution: f64,
        /// Rerun an earlier configuration exactly (other flags ignored)
        #[arg(long, conflicts_with_all = ["resolution"])]
        from_manifest: Option<PathBuf>,
    },
    /// Scan a descending range of resolutions
    Scan {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value_t = 1.0)]
        resolution_from: f64,
        #[arg(long, default_value_t = 0.85)]
        resolution_to: f64,
        #[arg(long, default_value_t = 0.01)]
        step: f64,
    },
    /// Aggregation + DeltaCon + Dunn-selected clustering baseline
    Baseline {
        #[command(flatten)]
        run: RunArgs,
        /// single | complete | average
        #[arg(long, default_value = "average")]
        linkage: String,
        /// DeltaCon epsilon: `auto` or a positive number
        #[arg(long, default_value = "auto")]
        epsilon: String,
    },
    /// Write the window similarity matrix as CSV
    Simmatrix {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        window: String,
        /// Output CSV path
        #[arg(long, default_value = "simmatrix.csv")]
        output: PathBuf,
        /// Also write a long-format `i,j,sim` listing next to it
        #[arg(long)]
        long: bool,
    },
    /// Score a states.json against a schedule or synthetic truth file
    Eval {
        /// Schedule JSON (array of intervals) or synthetic truth sidecar
        #[arg(long)]
        truth: PathBuf,
        /// states.json produced by detect or baseline
        #[arg(long)]
        pred: PathBuf,
        /// Comma-separated list from: ari, nmi
        #[arg(long, default_value = "ari,nmi")]
        metrics: String,
        #[arg(long, default_value_t = 0)]
        clock_origin: u64,
    },
    /// Generate a synthetic temporal network with planted states
    Synth {
        /// Generator spec JSON
        #[arg(long)]
        spec: PathBuf,
        /// Output contact list
        #[arg(long)]
        out: PathBuf,
        /// Output truth sidecar JSON
        #[arg(long)]
        truth_out: PathBuf,
    },
}

fn describe_run(out: &RunOutput) {
    if let Some(states) = &out.states {
        println!(
            "{}: {} windows -> {} states",
            states.method,
            states.states.len(),
            states.num_states
        );
    }
    if let Some(scan) = &out.scan {
        println!("scan: {} resolutions", scan.entries.len());
        for cp in &scan.change_points {
            println!("  gamma {:.4}: {} states", cp.gamma, cp.num_states);
        }
    }
    for p in &out.artifacts {
        println!("wrote {}", p.display());
    }
}

fn real_main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Summarize {
            input,
            window,
            format,
        } => {
            let options = input.parse_options()?;
            let window_seconds = window.as_deref().map(parse_duration).transpose()?;
            let report =
                pipeline::summarize(&input.required_input()?, options, input.delta_t, window_seconds)?;
            match format.as_str() {
                "json" => println!("{}", serde_json::to_string_pretty(&report)?),
                "tsv" => {
                    println!("nodes\t{}", report.nodes);
                    println!("events\t{}", report.events);
                    println!("delta_t\t{}", report.delta_t);
                    println!("t_start\t{}", report.t_start);
                    println!("t_end\t{}", report.t_end);
                    println!("snapshots\t{}", report.snapshots);
                    if let Some(activity) = &report.window_activity {
                        for a in activity {
                            println!("window\t{}\t{}\t{}", a.window, a.t_start, a.contacts);
                        }
                    }
                }
                other => return Err(Error::Config(format!("unknown format {other:?}"))),
            }
        }
        Command::Detect {
            run,
            resolution,
            from_manifest,
        } => {
            let config = match from_manifest {
                Some(path) => {
                    let mut config = pipeline::load_manifest(&path)?.config;
                    config.output_dir = run.output_dir.clone();
                    config
                }
                None => run.to_config(MethodConfig::Detect { resolution })?,
            };
            describe_run(&pipeline::run(&config)?);
        }
        Command::Scan {
            run,
            resolution_from,
            resolution_to,
            step,
        } => {
            let config = run.to_config(MethodConfig::Scan {
                from: resolution_from,
                to: resolution_to,
                step,
            })?;
            describe_run(&pipeline::run(&config)?);
        }
        Command::Baseline {
            run,
            linkage,
            epsilon,
        } => {
            let epsilon = match epsilon.as_str() {
                "auto" => None,
                v => Some(v.parse::<f64>().map_err(|_| {
                    Error::Config(format!("epsilon must be `auto` or a number, got {v:?}"))
                })?),
            };
            let config = run.to_config(MethodConfig::Baseline {
                linkage: linkage.parse::<Linkage>()?,
                epsilon,
            })?;
            describe_run(&pipeline::run(&config)?);
        }
        Command::Simmatrix {
            input,
            window,
            output,
            long,
        } => {
            use netstates::similarity::similarity_matrix;
            use netstates::window::{build_tensors, slice_windows};
            let options = input.parse_options()?;
            let reader = pipeline::open_contact_reader(&input.required_input()?)?;
            let net = netstates::ingest::TemporalNetwork::from_reader(
                reader,
                options,
                input.delta_t,
            )?;
            let w = pipeline::window_snapshots(parse_duration(&window)?, net.grid().delta_t)?;
            let plan = slice_windows(&net, w)?;
            let starts: Vec<u64> = plan
                .windows
                .iter()
                .map(|win| net.grid().timestamp(win.start))
                .collect();
            let sim = similarity_matrix(&build_tensors(&net, &plan))?;
            std::fs::write(&output, pipeline::similarity_csv(&sim, &starts))
                .map_err(|e| Error::io(output.display().to_string(), e))?;
            println!("wrote {}", output.display());
            if long {
                let long_path = output.with_extension("long.csv");
                std::fs::write(&long_path, pipeline::similarity_long_csv(&sim))
                    .map_err(|e| Error::io(long_path.display().to_string(), e))?;
                println!("wrote {}", long_path.display());
            }
        }
        Command::Eval {
            truth,
            pred,
            metrics,
            clock_origin,
        } => {
            let wanted: Vec<&str> = metrics.split(',').map(str::trim).collect();
            for m in &wanted {
                if !["ari", "nmi"].contains(m) {
                    return Err(Error::Config(format!("unknown metric {m:?}")));
                }
            }
            let report = pipeline::evaluate(
                &truth,
                &pred,
                clock_origin,
                wanted.contains(&"ari"),
                wanted.contains(&"nmi"),
            )?;
            println!("{}", serde_json::to_string_pretty(&report)?);
        }
        Command::Synth {
            spec,
            out,
            truth_out,
        } => {
            let (net, labels) = pipeline::synth_to_files(&spec, &out, &truth_out)?;
            println!(
                "generated {} snapshots, {} nodes, {} windows",
                net.len(),
                net.num_nodes(),
                labels.len()
            );
            println!("wrote {}", out.display());
            println!("wrote {}", truth_out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match real_main() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
