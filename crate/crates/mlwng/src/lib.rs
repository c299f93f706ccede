//! Naming game on multi-local-world community networks.
//!
//! The crate bundles everything the experiments need: an undirected
//! simple graph with exact structural statistics, a community-structured
//! network generator plus three density-matched baseline topologies, the
//! minimal naming-game engine, trajectory metrics, and a declarative,
//! seeded sweep harness with CSV output.

pub mod config;
pub mod edgelist;
pub mod experiment;
pub mod game;
pub mod generate;
pub mod graph;
pub mod metrics;
pub mod output;
pub mod seed;

pub use experiment::{
    match_baselines, run_experiment, ExperimentConfig, ExperimentKind, ExperimentResult,
    MlwTemplate, Topology,
};
pub use game::{run as run_game, GameOutcome, GameState, InteractionOutcome, PairSelection};
pub use generate::{gen_baseline, gen_mlw, BaselineKind, BaselineParams, MlwNetwork, MlwParams};
pub use graph::{CommunityRatioReport, Graph, GraphStats};
pub use metrics::{box_stats, BoxStats, MetricsSample, MetricsSeries};
