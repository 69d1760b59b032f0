//! Dynamic-state detection in temporal contact networks.
//!
//! A temporal network is a sequence of graph snapshots on a uniform time
//! grid. Many such systems move through recurring regimes (class time vs.
//! lunchtime, sessions vs. breaks). This crate detects those regimes from
//! the *timelines* of contacts rather than from per-window edge counts:
//!
//! 1. [`ingest`] parses a contact list and regularizes it onto its grid.
//! 2. [`window`] slices the snapshot sequence into non-overlapping windows
//!    and builds one connection-series tensor per window: a bit vector of
//!    connected/disconnected status per active node pair.
//! 3. [`similarity`] scores window pairs by the best cyclic-rotation match
//!    between corresponding connection series, averaged over the union
//!    node set, producing a window-by-window similarity matrix.
//! 4. [`community`] treats that matrix as a complete weighted meta-level
//!    network and finds dynamic states as communities via modularity
//!    maximization with a tunable resolution.
//! 5. [`baseline`] implements the comparison pipeline that aggregates each
//!    window into a static weighted graph, scores window pairs by DeltaCon
//!    similarity, and picks a clustering by Dunn's index.
//! 6. [`evaluation`] and [`synth`] score labelings against ground truth
//!    (schedules or planted states) and generate synthetic instances.
//!
//! The `examples/` directory has one runnable example per capability; the
//! `netstates` binary wires the same pieces behind subcommands
//! (`summarize`, `detect`, `scan`, `baseline`, `simmatrix`, `eval`,
//! `synth`).
//!
//! ```
//! use netstates::prelude::*;
//!
//! let contacts = "0 a b\n20 a b\n40 b c\n60 b c\n";
//! let net = TemporalNetwork::from_reader(
//!     std::io::Cursor::new(contacts),
//!     ParseOptions::default(),
//!     None,
//! )?;
//! let plan = slice_windows(&net, 2)?;
//! let tensors = build_tensors(&net, &plan);
//! let sim = similarity_matrix(&tensors)?;
//! let meta = build_meta_network(&sim)?;
//! let states = louvain_detect(&meta, 1.0, 42)?;
//! assert_eq!(states.labels.len(), 2);
//! # Ok::<(), netstates::Error>(())
//! ```

pub mod baseline;
pub mod community;
pub mod error;
pub mod evaluation;
pub mod ingest;
pub mod pipeline;
pub mod similarity;
pub mod synth;
pub mod window;

pub use error::{Error, Result};

/// The commonly used types and entry points in one import.
pub mod prelude {
    pub use crate::baseline::{
        aggregate_window, aggregate_windows, agglomerative_cluster, baseline_detect,
        deltacon_similarity, dunn_index, AggregatedNetwork, BaselineDetection, DistanceMatrix,
        Linkage,
    };
    pub use crate::community::{
        build_meta_network, louvain_detect, modularity, scan_resolutions, MetaNetwork,
        ResolutionScan, StateLabeling,
    };
    pub use crate::error::{Error, Result};
    pub use crate::evaluation::{
        adjusted_rand_index, align_labels, load_schedule, normalized_mutual_information,
        window_ground_truth, GroundTruthSchedule, LabelAlignment, UNSCHEDULED,
    };
    pub use crate::ingest::{
        infer_time_grid, parse_contact_log, ContactEvent, ContactLog, NodeIdx, NodeRegistry,
        ParseOptions, TemporalNetwork, TimeGrid,
    };
    pub use crate::similarity::{
        best_alignment, series_similarity, similarity_matrix, tensor_similarity,
        tensor_similarity_breakdown, RotationAlignment, SimilarityMatrix,
    };
    pub use crate::synth::{
        generate_planted_states, Activity, PairSet, StateModel, SyntheticSpec,
    };
    pub use crate::window::{
        build_tensor, build_tensors, slice_windows, ConnectionSeries, ConnectionSeriesTensor,
        Window, WindowPlan,
    };
}
