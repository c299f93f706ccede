//! Results-directory layout.
//!
//! ```text
//! <dir>/config.toml             echoed resolved configuration
//! <dir>/summary.csv             one row per sweep point
//! <dir>/runs.csv                one row per run
//! <dir>/series/<label>_<run>.csv        per-run trajectories
//! <dir>/mean_series/<label>.csv         per-point mean trajectories
//! <dir>/networks/<label>_<run>.edges    edge lists (opt-in)
//! ```
//!
//! All numeric formatting goes through `Display`, which is deterministic,
//! so identical experiments produce byte-identical files.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use crate::config::echo_config;
use crate::experiment::{ExperimentResult, PointResult};

pub fn write_results(dir: &Path, result: &ExperimentResult) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("config.toml"), echo_config(&result.config))?;
    fs::write(dir.join("summary.csv"), summary_csv(result))?;
    fs::write(dir.join("runs.csv"), runs_csv(result))?;

    if result.config.save_series {
        let series_dir = dir.join("series");
        fs::create_dir_all(&series_dir)?;
        for point in &result.points {
            for run in &point.runs {
                fs::write(
                    series_dir.join(format!("{}_{}.csv", point.label, run.run)),
                    series_csv(run),
                )?;
            }
        }
        let mean_dir = dir.join("mean_series");
        fs::create_dir_all(&mean_dir)?;
        for point in &result.points {
            fs::write(
                mean_dir.join(format!("{}.csv", point.label)),
                mean_series_csv(point),
            )?;
        }
    }

    if result.config.save_networks {
        let networks_dir = dir.join("networks");
        fs::create_dir_all(&networks_dir)?;
        for point in &result.points {
            for run in &point.runs {
                if let Some(edges) = &run.network_edge_list {
                    fs::write(
                        networks_dir.join(format!("{}_{}.edges", point.label, run.run)),
                        edges,
                    )?;
                }
            }
        }
    }
    Ok(())
}

fn fmt_opt(value: Option<f64>) -> String {
    value.map(|v| v.to_string()).unwrap_or_default()
}

pub fn summary_csv(result: &ExperimentResult) -> String {
    let mut out = String::from(
        "label,param,n_lw,runs,converged,non_converged_frac,median,q1,q3,wlow,whigh,mean,\
         n_outliers,censored_median,mean_final_n_diff,mean_final_n_diff_nonconv,mean_r,std_r,\
         avg_k,avg_pl,avg_cc,rho_th\n",
    );
    for point in &result.points {
        let s = &point.summary;
        let b = s.time_stats.as_ref();
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            point.label,
            point.param,
            point.n_lw.map(|v| v.to_string()).unwrap_or_default(),
            s.runs,
            s.converged,
            s.non_converged as f64 / s.runs as f64,
            fmt_opt(b.map(|b| b.median)),
            fmt_opt(b.map(|b| b.q1)),
            fmt_opt(b.map(|b| b.q3)),
            fmt_opt(b.map(|b| b.whisker_low)),
            fmt_opt(b.map(|b| b.whisker_high)),
            fmt_opt(b.map(|b| b.mean)),
            b.map(|b| b.outliers.len().to_string()).unwrap_or_default(),
            s.censored_median,
            s.mean_final_n_diff,
            fmt_opt(s.mean_final_n_diff_non_converged),
            fmt_opt(s.mean_ratio),
            fmt_opt(s.ratio_std),
            s.mean_degree,
            fmt_opt(s.mean_path_length),
            s.mean_clustering,
            fmt_opt(result.rho_th),
        )
        .unwrap();
    }
    out
}

pub fn runs_csv(result: &ExperimentResult) -> String {
    let mut out = String::from(
        "label,run,network_seed,game_seed,converged,convergence_time,final_n_diff,\
         final_n_total,avg_k,avg_pl,avg_cc,r_mean\n",
    );
    for point in &result.points {
        for run in &point.runs {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{}",
                point.label,
                run.run,
                run.network_seed,
                run.game_seed,
                run.converged,
                run.convergence_time.map(|t| t.to_string()).unwrap_or_default(),
                run.final_n_diff,
                run.final_n_total,
                run.network_stats.avg_degree,
                fmt_opt(run.network_stats.avg_path_length),
                run.network_stats.avg_clustering,
                fmt_opt(run.ratio_mean),
            )
            .unwrap();
        }
    }
    out
}

pub fn series_csv(run: &crate::experiment::RunResult) -> String {
    let mut out = String::from("step,n_total,n_diff,success_rate\n");
    for s in run.series.samples() {
        writeln!(out, "{},{},{},{}", s.step, s.n_total, s.n_diff, s.success_rate).unwrap();
    }
    out
}

pub fn mean_series_csv(point: &PointResult) -> String {
    let mut out = String::from("step,n_total,n_diff,success_rate\n");
    for s in &point.mean_series {
        writeln!(out, "{},{},{},{}", s.step, s.n_total, s.n_diff, s.success_rate).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::{
        run_experiment, ExperimentConfig, ExperimentKind, MlwTemplate, PairSelectionConfig,
        Topology,
    };

    fn smoke_config() -> ExperimentConfig {
        ExperimentConfig {
            kind: ExperimentKind::M0Sweep,
            n: 70,
            runs: 2,
            max_steps: 200_000,
            base_seed: 3,
            rho: 0.5,
            m0: 4,
            m0_values: vec![3, 4],
            rho_values: vec![0.3],
            n_values: vec![70],
            topologies: vec![Topology::Mlw],
            regenerate_network_per_run: true,
            save_series: true,
            save_networks: true,
            workers: 0,
            rho_th_factor: 2.0,
            mlw: MlwTemplate::default(),
            sw_rewire_prob: 0.2,
            pair_selection: PairSelectionConfig::SpeakerFirst,
        }
    }

    #[test]
    fn results_directory_layout() {
        let result = run_experiment(&smoke_config(), None).unwrap();
        let dir = tempfile::tempdir().unwrap();
        write_results(dir.path(), &result).unwrap();
        for file in ["config.toml", "summary.csv", "runs.csv"] {
            assert!(dir.path().join(file).exists(), "{file}");
        }
        assert!(dir.path().join("series/m0_3_0.csv").exists());
        assert!(dir.path().join("series/m0_4_1.csv").exists());
        assert!(dir.path().join("mean_series/m0_3.csv").exists());
        assert!(dir.path().join("networks/m0_4_0.edges").exists());

        let summary = fs::read_to_string(dir.path().join("summary.csv")).unwrap();
        assert_eq!(summary.lines().count(), 3);
        assert!(summary.starts_with("label,param,n_lw,runs,"));
        let runs = fs::read_to_string(dir.path().join("runs.csv")).unwrap();
        assert_eq!(runs.lines().count(), 5);
    }

    #[test]
    fn rerun_is_byte_identical() {
        let cfg = smoke_config();
        let a = run_experiment(&cfg, None).unwrap();
        let b = run_experiment(&cfg, None).unwrap();
        assert_eq!(summary_csv(&a), summary_csv(&b));
        assert_eq!(runs_csv(&a), runs_csv(&b));
        assert_eq!(series_csv(&a.points[0].runs[0]), series_csv(&b.points[0].runs[0]));
        assert_eq!(mean_series_csv(&a.points[1]), mean_series_csv(&b.points[1]));
    }
}
