//! Declarative sweep harness.
//!
//! A sweep expands into points (one swept parameter value each, or one
//! topology per reference point for comparisons), every point runs `runs`
//! independent games with seeds derived from `(base_seed, point, run)`,
//! and the results aggregate into per-point box statistics, convergence
//! counts, community-ratio means and network statistics. Runs execute in
//! parallel and are collected in deterministic order, so identical
//! configurations reproduce identical summaries byte for byte.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game::{self, PairSelection};
use crate::generate::{gen_baseline, gen_mlw, BaselineKind, BaselineParams, GenError, MlwParams};
use crate::graph::{Graph, GraphStats};
use crate::metrics::{box_stats, BoxStats, MetricsSeries};
use crate::seed::derive_seed;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("point {point}: {source}")]
    Generator {
        point: String,
        #[source]
        source: GenError,
    },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    /// Convergence time vs the initial local-world size.
    M0Sweep,
    /// Convergence time vs the pre-assigned population fraction.
    RhoSweep,
    /// Four topologies at matched average degree per reference point.
    TopologyCompare,
    /// The m0 sweep repeated over several population sizes.
    Scaling,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Topology {
    Mlw,
    Rg,
    Sw,
    Sf,
}

impl Topology {
    pub fn tag(self) -> &'static str {
        match self {
            Topology::Mlw => "mlw",
            Topology::Rg => "rg",
            Topology::Sw => "sw",
            Topology::Sf => "sf",
        }
    }

    fn baseline_kind(self) -> Option<BaselineKind> {
        match self {
            Topology::Mlw => None,
            Topology::Rg => Some(BaselineKind::RandomGraph),
            Topology::Sw => Some(BaselineKind::SmallWorld),
            Topology::Sf => Some(BaselineKind::ScaleFree),
        }
    }
}

/// Generator knobs shared by every multi-local-world point of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MlwTemplate {
    pub alpha: f64,
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
    pub p4: f64,
    pub e1: usize,
    pub e2: usize,
    pub e3: usize,
    pub e4: usize,
}

impl Default for MlwTemplate {
    fn default() -> Self {
        use crate::generate::mlw_defaults as d;
        MlwTemplate {
            alpha: d::ALPHA,
            p1: d::PROBS.0,
            p2: d::PROBS.1,
            p3: d::PROBS.2,
            p4: d::PROBS.3,
            e1: d::NODE_EDGES,
            e2: d::INTRA_ADDITIONS,
            e3: d::INTRA_DELETIONS,
            e4: d::INTER_ADDITIONS,
        }
    }
}

impl MlwTemplate {
    pub fn to_params(&self, n: usize, rho: f64, m0: usize) -> Result<MlwParams, GenError> {
        let mut params = MlwParams::from_rho(n, rho, m0)?;
        params.alpha = self.alpha;
        params.p1 = self.p1;
        params.p2 = self.p2;
        params.p3 = self.p3;
        params.p4 = self.p4;
        params.e1 = self.e1;
        params.e2 = self.e2;
        params.e3 = self.e3;
        params.e4 = self.e4;
        params.validate()?;
        Ok(params)
    }
}

/// Fully resolved sweep description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub n: usize,
    pub runs: usize,
    pub max_steps: u64,
    pub base_seed: u64,
    /// Fixed pre-assigned fraction (m0 sweeps, topology compare, scaling).
    pub rho: f64,
    /// Fixed local-world size (rho sweeps).
    pub m0: usize,
    pub m0_values: Vec<usize>,
    pub rho_values: Vec<f64>,
    pub n_values: Vec<usize>,
    pub topologies: Vec<Topology>,
    pub regenerate_network_per_run: bool,
    pub save_series: bool,
    pub save_networks: bool,
    /// 0 = all available parallelism.
    pub workers: usize,
    /// A point whose censored median exceeds the running plateau median by
    /// more than this factor marks the rho threshold.
    pub rho_th_factor: f64,
    pub mlw: MlwTemplate,
    pub sw_rewire_prob: f64,
    pub pair_selection: PairSelectionConfig,
}

/// Serializable mirror of [`PairSelection`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum PairSelectionConfig {
    #[default]
    SpeakerFirst,
    EdgeUniform,
}

impl From<PairSelectionConfig> for PairSelection {
    fn from(value: PairSelectionConfig) -> Self {
        match value {
            PairSelectionConfig::SpeakerFirst => PairSelection::SpeakerFirst,
            PairSelectionConfig::EdgeUniform => PairSelection::EdgeUniform,
        }
    }
}

/// One expanded sweep point.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub label: String,
    /// The swept value, for the summary CSV.
    pub param: f64,
    /// Initial local-world count, for multi-local-world points.
    pub n_lw: Option<usize>,
    pub network: NetworkSpec,
}

#[derive(Debug, Clone)]
pub enum NetworkSpec {
    Mlw(MlwParams),
    Baseline(BaselineParams),
}

/// Outcome of one game run plus the structural context it ran in.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub run: usize,
    pub network_seed: u64,
    pub game_seed: u64,
    pub converged: bool,
    pub convergence_time: Option<u64>,
    pub final_n_diff: u64,
    pub final_n_total: u64,
    pub network_stats: GraphStats,
    pub ratio_mean: Option<f64>,
    pub series: MetricsSeries,
    /// Serialized network, captured only when the sweep saves networks.
    pub network_edge_list: Option<String>,
}

/// Aggregates over one point's runs.
#[derive(Debug, Clone)]
pub struct PointSummary {
    pub runs: usize,
    pub converged: usize,
    pub non_converged: usize,
    /// Convergence-time box statistics over converged runs only.
    pub time_stats: Option<BoxStats>,
    /// Median over all runs with non-converged runs counted at the cap.
    pub censored_median: f64,
    pub mean_final_n_diff: f64,
    pub mean_final_n_diff_non_converged: Option<f64>,
    pub mean_ratio: Option<f64>,
    pub ratio_std: Option<f64>,
    pub mean_degree: f64,
    pub mean_path_length: Option<f64>,
    pub mean_clustering: f64,
}

/// Mean trajectory sample across a point's runs; converged runs extend
/// with their terminal values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanSample {
    pub step: u64,
    pub n_total: f64,
    pub n_diff: f64,
    pub success_rate: f64,
}

#[derive(Debug, Clone)]
pub struct PointResult {
    pub label: String,
    pub param: f64,
    pub n_lw: Option<usize>,
    pub summary: PointSummary,
    pub runs: Vec<RunResult>,
    pub mean_series: Vec<MeanSample>,
}

#[derive(Debug)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub points: Vec<PointResult>,
    /// Estimated rho threshold (rho sweeps only).
    pub rho_th: Option<f64>,
}

/// Derives the three baseline parameter sets matched to a measured mean
/// degree: a random graph with the exact edge budget, a ring lattice of
/// the nearest even degree, and preferential-attachment growth wiring
/// `round(k/2)` edges per node.
pub fn match_baselines(mean_degree: f64, n: usize, sw_rewire_prob: f64) -> Vec<BaselineParams> {
    [
        BaselineKind::RandomGraph,
        BaselineKind::SmallWorld,
        BaselineKind::ScaleFree,
    ]
    .into_iter()
    .map(|kind| BaselineParams {
        kind,
        n,
        target_avg_degree: mean_degree,
        sw_rewire_prob,
    })
    .collect()
}

impl ExperimentConfig {
    /// Expands the sweep into points. Topology comparison expands only
    /// its reference (multi-local-world) points here; baselines are
    /// matched to measured degrees while the experiment runs.
    pub fn expand_points(&self) -> Result<Vec<SweepPoint>, ExperimentError> {
        let mlw_point = |label: String, param: f64, n: usize, rho: f64, m0: usize| {
            let params = self.mlw.to_params(n, rho, m0).map_err(|source| {
                ExperimentError::Generator {
                    point: label.clone(),
                    source,
                }
            })?;
            Ok(SweepPoint {
                label,
                param,
                n_lw: Some(params.n_lw),
                network: NetworkSpec::Mlw(params),
            })
        };
        match self.kind {
            ExperimentKind::M0Sweep => self
                .m0_values
                .iter()
                .map(|&m0| mlw_point(format!("m0_{m0}"), m0 as f64, self.n, self.rho, m0))
                .collect(),
            ExperimentKind::RhoSweep => self
                .rho_values
                .iter()
                .map(|&rho| mlw_point(format!("rho_{rho}"), rho, self.n, rho, self.m0))
                .collect(),
            ExperimentKind::Scaling => {
                let mut points = Vec::new();
                for &n in &self.n_values {
                    for &m0 in &self.m0_values {
                        points.push(mlw_point(
                            format!("n{n}_m0_{m0}"),
                            m0 as f64,
                            n,
                            self.rho,
                            m0,
                        )?);
                    }
                }
                Ok(points)
            }
            ExperimentKind::TopologyCompare => {
                if !self.topologies.contains(&Topology::Mlw) {
                    return Err(ExperimentError::InvalidConfig(
                        "topology comparison needs the mlw reference topology".into(),
                    ));
                }
                self.m0_values
                    .iter()
                    .map(|&m0| {
                        mlw_point(format!("m0_{m0}_mlw"), m0 as f64, self.n, self.rho, m0)
                    })
                    .collect()
            }
        }
    }
}

/// Optional progress sink: called with (completed runs, total runs).
pub type Progress<'a> = Option<&'a (dyn Fn(usize, usize) + Sync)>;

/// Executes a sweep. Results are deterministic in the configuration
/// regardless of worker count.
pub fn run_experiment(
    cfg: &ExperimentConfig,
    progress: Progress,
) -> Result<ExperimentResult, ExperimentError> {
    if cfg.runs == 0 {
        return Err(ExperimentError::InvalidConfig("runs must be >= 1".into()));
    }
    if cfg.max_steps == 0 {
        return Err(ExperimentError::InvalidConfig("max_steps must be >= 1".into()));
    }
    let execute = || execute_experiment(cfg, progress);
    let result = if cfg.workers == 0 {
        execute()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.workers)
            .build()
            .map_err(|e| ExperimentError::InvalidConfig(format!("worker pool: {e}")))?;
        pool.install(execute)
    }?;
    Ok(result)
}

fn execute_experiment(
    cfg: &ExperimentConfig,
    progress: Progress,
) -> Result<ExperimentResult, ExperimentError> {
    let mut points = cfg.expand_points()?;
    let mut total_points = points.len();
    if cfg.kind == ExperimentKind::TopologyCompare {
        let baselines: Vec<Topology> = cfg
            .topologies
            .iter()
            .copied()
            .filter(|t| *t != Topology::Mlw)
            .collect();
        total_points += points.len() * baselines.len();
    }
    let total_runs = total_points * cfg.runs;
    let completed = std::sync::atomic::AtomicUsize::new(0);
    let tick = |_: usize| {
        if let Some(cb) = progress {
            let done = completed.fetch_add(1, std::sync::atomic::Ordering::Relaxed) + 1;
            cb(done, total_runs);
        }
    };

    let mut results = run_points(cfg, &points, 0, &tick)?;

    if cfg.kind == ExperimentKind::TopologyCompare {
        // baselines are density-matched to the measured reference degree
        let reference_points = std::mem::take(&mut points);
        let base_index = reference_points.len();
        let mut baseline_points = Vec::new();
        for (reference, result) in reference_points.iter().zip(&results) {
            let mean_degree = result.summary.mean_degree;
            for topology in cfg.topologies.iter().filter(|t| **t != Topology::Mlw) {
                let kind = topology.baseline_kind().expect("mlw filtered out");
                let label = format!(
                    "{}_{}",
                    reference.label.trim_end_matches("_mlw"),
                    topology.tag()
                );
                baseline_points.push(SweepPoint {
                    label,
                    param: reference.param,
                    n_lw: None,
                    network: NetworkSpec::Baseline(BaselineParams {
                        kind,
                        n: cfg.n,
                        target_avg_degree: mean_degree,
                        sw_rewire_prob: cfg.sw_rewire_prob,
                    }),
                });
            }
        }
        results.extend(run_points(cfg, &baseline_points, base_index, &tick)?);
    }

    let rho_th = if cfg.kind == ExperimentKind::RhoSweep {
        estimate_rho_threshold(
            &results
                .iter()
                .map(|p| (p.param, p.summary.censored_median))
                .collect::<Vec<_>>(),
            cfg.rho_th_factor,
        )
    } else {
        None
    };

    Ok(ExperimentResult {
        config: cfg.clone(),
        points: results,
        rho_th,
    })
}

fn run_points(
    cfg: &ExperimentConfig,
    points: &[SweepPoint],
    index_offset: usize,
    tick: &(dyn Fn(usize) + Sync),
) -> Result<Vec<PointResult>, ExperimentError> {
    let jobs: Vec<(usize, usize)> = (0..points.len())
        .flat_map(|p| (0..cfg.runs).map(move |r| (p, r)))
        .collect();
    let mut run_results: Vec<(usize, RunResult)> = jobs
        .par_iter()
        .map(|&(p, r)| {
            let result = run_single(cfg, &points[p], index_offset + p, r);
            tick(0);
            result.map(|res| (p, res))
        })
        .collect::<Result<Vec<_>, _>>()?;
    // parallel collection preserves job order, but make it explicit
    run_results.sort_by_key(|(p, res)| (*p, res.run));

    let mut grouped: Vec<Vec<RunResult>> = (0..points.len()).map(|_| Vec::new()).collect();
    for (p, res) in run_results {
        grouped[p].push(res);
    }
    Ok(points
        .iter()
        .zip(grouped)
        .map(|(point, runs)| {
            let summary = summarize_point(&runs, cfg.max_steps);
            let mean_series = mean_trajectory(&runs, point.network_node_count());
            PointResult {
                label: point.label.clone(),
                param: point.param,
                n_lw: point.n_lw,
                summary,
                runs,
                mean_series,
            }
        })
        .collect())
}

impl SweepPoint {
    fn network_node_count(&self) -> usize {
        match &self.network {
            NetworkSpec::Mlw(p) => p.n,
            NetworkSpec::Baseline(p) => p.n,
        }
    }
}

fn run_single(
    cfg: &ExperimentConfig,
    point: &SweepPoint,
    point_index: usize,
    run: usize,
) -> Result<RunResult, ExperimentError> {
    let gen_err = |source| ExperimentError::Generator {
        point: point.label.clone(),
        source,
    };
    let network_run = if cfg.regenerate_network_per_run { run } else { 0 };
    let network_seed = derive_seed(cfg.base_seed, &[point_index as u64, network_run as u64, 0]);
    let game_seed = derive_seed(cfg.base_seed, &[point_index as u64, run as u64, 1]);

    let (graph, ratio_mean): (Graph, Option<f64>) = match &point.network {
        NetworkSpec::Mlw(params) => {
            let net = gen_mlw(params, network_seed).map_err(gen_err)?;
            let ratio = net.graph.community_ratio().ok().map(|r| r.mean_ratio);
            (net.graph, ratio)
        }
        NetworkSpec::Baseline(params) => (gen_baseline(params, network_seed).map_err(gen_err)?, None),
    };
    let network_stats = graph.stats();
    let (outcome, series) = game::run(
        &graph,
        game_seed,
        cfg.max_steps,
        cfg.pair_selection.into(),
    )
    .expect("generated networks are connected and caps are validated");

    Ok(RunResult {
        run,
        network_seed,
        game_seed,
        converged: outcome.converged(),
        convergence_time: outcome.convergence_time,
        final_n_diff: outcome.final_n_diff,
        final_n_total: outcome.final_n_total,
        network_stats,
        ratio_mean,
        series,
        network_edge_list: cfg
            .save_networks
            .then(|| crate::edgelist::edge_list_string(&graph)),
    })
}

fn summarize_point(runs: &[RunResult], max_steps: u64) -> PointSummary {
    let converged_times: Vec<f64> = runs
        .iter()
        .filter_map(|r| r.convergence_time)
        .map(|t| t as f64)
        .collect();
    let censored: Vec<f64> = runs
        .iter()
        .map(|r| r.convergence_time.unwrap_or(max_steps) as f64)
        .collect();
    let non_converged: Vec<&RunResult> = runs.iter().filter(|r| !r.converged).collect();

    let mean = |values: &[f64]| values.iter().sum::<f64>() / values.len() as f64;
    let ratios: Vec<f64> = runs.iter().filter_map(|r| r.ratio_mean).collect();
    let (mean_ratio, ratio_std) = if ratios.is_empty() {
        (None, None)
    } else {
        let m = mean(&ratios);
        let var = ratios.iter().map(|r| (r - m).powi(2)).sum::<f64>() / ratios.len() as f64;
        (Some(m), Some(var.sqrt()))
    };
    let path_lengths: Vec<f64> = runs
        .iter()
        .filter_map(|r| r.network_stats.avg_path_length)
        .collect();

    PointSummary {
        runs: runs.len(),
        converged: converged_times.len(),
        non_converged: non_converged.len(),
        time_stats: box_stats(&converged_times).ok(),
        censored_median: box_stats(&censored).map(|b| b.median).unwrap_or(f64::NAN),
        mean_final_n_diff: mean(&runs.iter().map(|r| r.final_n_diff as f64).collect::<Vec<_>>()),
        mean_final_n_diff_non_converged: if non_converged.is_empty() {
            None
        } else {
            Some(mean(
                &non_converged
                    .iter()
                    .map(|r| r.final_n_diff as f64)
                    .collect::<Vec<_>>(),
            ))
        },
        mean_ratio,
        ratio_std,
        mean_degree: mean(
            &runs
                .iter()
                .map(|r| r.network_stats.avg_degree)
                .collect::<Vec<_>>(),
        ),
        mean_path_length: if path_lengths.len() == runs.len() {
            Some(mean(&path_lengths))
        } else {
            None
        },
        mean_clustering: mean(
            &runs
                .iter()
                .map(|r| r.network_stats.avg_clustering)
                .collect::<Vec<_>>(),
        ),
    }
}

/// Averages trajectories across runs on the union of their sample steps.
/// Between samples a run contributes its latest recorded values; past its
/// terminal step a converged run contributes the consensus state.
fn mean_trajectory(runs: &[RunResult], n: usize) -> Vec<MeanSample> {
    let mut grid: Vec<u64> = runs
        .iter()
        .flat_map(|r| r.series.samples().iter().map(|s| s.step))
        .collect();
    grid.sort_unstable();
    grid.dedup();
    let mut cursors = vec![0usize; runs.len()];
    let mut out = Vec::with_capacity(grid.len());
    for &step in &grid {
        let (mut total, mut diff, mut rate) = (0.0, 0.0, 0.0);
        for (run, cursor) in runs.iter().zip(cursors.iter_mut()) {
            let samples = run.series.samples();
            while *cursor + 1 < samples.len() && samples[*cursor + 1].step <= step {
                *cursor += 1;
            }
            let last = samples[samples.len() - 1];
            if step > last.step && run.converged {
                total += n as f64;
                diff += 1.0;
                rate += 1.0;
            } else {
                // clamp to the latest sample at or before this step; the
                // forced step-1 sample guarantees one exists
                let sample = samples[*cursor];
                total += sample.n_total as f64;
                diff += sample.n_diff as f64;
                rate += sample.success_rate;
            }
        }
        let k = runs.len() as f64;
        out.push(MeanSample {
            step,
            n_total: total / k,
            n_diff: diff / k,
            success_rate: rate / k,
        });
    }
    out
}

/// Walks the sweep in order keeping a running plateau median; the first
/// point whose censored median exceeds `factor` times the plateau marks
/// the threshold, reported as the previous (last flat) value.
pub fn estimate_rho_threshold(medians: &[(f64, f64)], factor: f64) -> Option<f64> {
    let mut plateau: Vec<f64> = Vec::new();
    for (i, &(rho, median)) in medians.iter().enumerate() {
        if i > 0 {
            let plateau_median = box_stats(&plateau).ok()?.median;
            if median > factor * plateau_median {
                return Some(medians[i - 1].0);
            }
        }
        let _ = rho;
        plateau.push(median);
    }
    None
}
