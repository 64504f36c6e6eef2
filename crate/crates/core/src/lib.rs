//! Coresets for k-median in the shortest-path metric of edge-weighted graphs.
//!
//! The pipeline: an iterated bicriteria sampler finds a small weighted
//! candidate set, single-swap local search turns it into an O(1)-approximate
//! center set, per-point sensitivities are derived from that solution, and
//! importance sampling draws the weighted coreset. The [`evaluation`] module
//! scores coresets by their empirical error against random center sets, and
//! [`theory_lab`] generates the hard instances for lower-bound experiments.

pub mod clustering;
pub mod coreset;
pub mod error;
pub mod evaluation;
pub mod graph;
pub mod points;
pub mod seed;
pub mod theory_lab;

pub use clustering::{
    brute_force_kmedian, brute_force_sensitivity, local_search, CandidatePool, LocalSearchConfig,
    LocalSearchResult,
};
pub use coreset::{
    build_coreset, coreset_size_bound, iterated_thorup, sensitivities, tho_sample, tho_sample_best,
    BicriteriaConfig, Coreset, CoresetMeta, ImportanceSampler, SensitivityVector,
};
pub use error::{Error, Result};
pub use evaluation::{
    ball_region, empirical_error, gen_dataset, max_error_trial, run_benchmark, uniform_baseline,
    BenchmarkReport, CoresetMethod, ErrorTrialConfig, IdentityMethod, ReportRow, Scenario,
    SensitivityMethod, UniformMethod,
};
pub use graph::{
    assign, cost, load_graph, multi_source_dijkstra, ClusteringStats, Graph, GraphFormat,
    ShortestPaths,
};
pub use points::{
    load_points_csv, parse_points_csv, write_points_csv, CenterSet, WeightedPointSet,
};
pub use theory_lab::{
    count_ball_intersections, gen_lowerbound_instance, gen_star_instance,
    verify_lowerbound_distances, LowerBoundInstance, VertexRole, WeightedBallQuery,
};
