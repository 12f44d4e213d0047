//! Multi-seed experiment execution with plot-friendly output: one CSV per
//! seed (fixed column schema) and a JSON summary carrying per-checkpoint
//! min / median / max across seeds.

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::game::{run_game, Budget, GameConfig, GameRun, MethodKind, ParamOverrides};
use crate::harness::dataset::load_dataset;
use crate::harness::hyperparams::compute_hyperparams;
use crate::learner::{Dataset, OfflineConfig, TaskKind};

/// Fixed metrics schema; one row per (seed, checkpoint).
pub const METRICS_HEADER: &str =
    "method,seed,data_points,dual_gap,gap_tolerance,task_metric,elapsed_ms";

/// Caps how many seeds run in parallel.
pub const THREADS_ENV: &str = "MINIMAX_BANDIT_THREADS";

#[derive(Debug, Clone)]
pub enum DataSource {
    CsvPath(PathBuf),
    InMemory(Dataset),
}

#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub data: DataSource,
    pub task: TaskKind,
    pub method: MethodKind,
    pub k: usize,
    pub budget: Budget,
    pub delta: f64,
    pub seeds: Vec<u64>,
    pub ball_radius: f64,
    pub out_dir: PathBuf,
    pub checkpoints: Option<usize>,
    pub overrides: ParamOverrides,
    pub offline: OfflineConfig,
}

impl ExperimentSpec {
    pub fn new(
        data: DataSource,
        task: TaskKind,
        method: MethodKind,
        k: usize,
        budget: Budget,
        out_dir: PathBuf,
    ) -> Self {
        Self {
            data,
            task,
            method,
            k,
            budget,
            delta: 0.05,
            seeds: vec![0, 1, 2, 3, 4],
            ball_radius: 1.0,
            out_dir,
            checkpoints: None,
            overrides: ParamOverrides::default(),
            offline: OfflineConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0 < self.delta && self.delta < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "delta={} outside (0,1)",
                self.delta
            )));
        }
        if self.seeds.is_empty() {
            return Err(Error::InvalidArgument("seeds list is empty".into()));
        }
        if self.k == 0 {
            return Err(Error::InvalidArgument("k must be positive".into()));
        }
        if !self.ball_radius.is_finite() || self.ball_radius < 0.0 {
            return Err(Error::InvalidArgument("ball radius must be nonnegative".into()));
        }
        Ok(())
    }
}

#[derive(Debug)]
pub struct ExperimentOutcome {
    pub per_seed_files: Vec<(u64, PathBuf)>,
    pub summary_path: PathBuf,
    pub failures: Vec<(u64, String)>,
    pub runs: Vec<(u64, GameRun)>,
}

impl ExperimentOutcome {
    pub fn all_completed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn parallelism(seeds: usize) -> usize {
    let cap = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&v| v >= 1);
    let hw = std::thread::available_parallelism()
        .map(|v| v.get())
        .unwrap_or(1);
    cap.unwrap_or(hw).min(seeds).max(1)
}

fn write_seed_csv(path: &Path, method: MethodKind, seed: u64, run: &GameRun) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(METRICS_HEADER.split(','))?;
    for (ck, &ms) in run.trace.checkpoints.iter().zip(&run.checkpoint_elapsed_ms) {
        w.write_record(&[
            method.name().to_string(),
            seed.to_string(),
            ck.data_points.to_string(),
            ck.dual_gap.to_string(),
            ck.gap_tolerance.to_string(),
            ck.task_metric.to_string(),
            ms.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn median(sorted: &[f64]) -> f64 {
    let m = sorted.len();
    if m % 2 == 1 {
        sorted[m / 2]
    } else {
        0.5 * (sorted[m / 2 - 1] + sorted[m / 2])
    }
}

fn summarize(
    spec: &ExperimentSpec,
    n: usize,
    runs: &[(u64, GameRun)],
) -> Result<serde_json::Value> {
    let params = compute_hyperparams(spec.method, n, spec.k, spec.budget, spec.delta, spec.ball_radius)
        .map(|h| serde_json::to_value(h))
        .unwrap_or(Ok(serde_json::Value::Null))?;
    let mut checkpoints = Vec::new();
    if let Some((_, first)) = runs.first() {
        for (idx, ck) in first.trace.checkpoints.iter().enumerate() {
            let mut gaps: Vec<f64> = Vec::new();
            let mut metrics: Vec<f64> = Vec::new();
            for (_, run) in runs {
                let c = &run.trace.checkpoints[idx];
                gaps.push(c.dual_gap);
                metrics.push(c.task_metric);
            }
            gaps.sort_by(f64::total_cmp);
            metrics.sort_by(f64::total_cmp);
            checkpoints.push(serde_json::json!({
                "data_points": ck.data_points,
                "gap_min": gaps.first().copied().unwrap_or(f64::NAN),
                "gap_med": median(&gaps),
                "gap_max": gaps.last().copied().unwrap_or(f64::NAN),
                "metric_min": metrics.first().copied().unwrap_or(f64::NAN),
                "metric_med": median(&metrics),
                "metric_max": metrics.last().copied().unwrap_or(f64::NAN),
            }));
        }
    }
    Ok(serde_json::json!({
        "method": spec.method.name(),
        "params": params,
        "checkpoints": checkpoints,
    }))
}

/// Run one game per seed (in parallel up to the thread cap), write per-seed
/// metrics and the cross-seed summary. Partial outputs are retained on
/// failure together with a failure manifest.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentOutcome> {
    spec.validate()?;
    let data = match &spec.data {
        DataSource::CsvPath(path) => load_dataset(path, spec.task)?.0,
        DataSource::InMemory(d) => d.clone(),
    };
    if spec.k > data.len() {
        return Err(Error::InvalidArgument(format!(
            "k={} exceeds dataset size n={}",
            spec.k,
            data.len()
        )));
    }
    std::fs::create_dir_all(&spec.out_dir)?;

    let make_config = |seed: u64| -> GameConfig {
        GameConfig {
            method: spec.method,
            k: spec.k,
            budget: spec.budget,
            delta: spec.delta,
            ball_radius: spec.ball_radius,
            seed,
            checkpoints: spec.checkpoints,
            overrides: spec.overrides,
            offline: spec.offline,
            track_regret: false,
        }
    };

    let threads = parallelism(spec.seeds.len());
    let mut results: Vec<Option<std::result::Result<GameRun, String>>> =
        (0..spec.seeds.len()).map(|_| None).collect();
    for chunk in spec.seeds.chunks(threads).enumerate() {
        let (chunk_idx, seeds) = chunk;
        std::thread::scope(|scope| {
            let handles: Vec<_> = seeds
                .iter()
                .map(|&seed| {
                    let cfg = make_config(seed);
                    let data = &data;
                    scope.spawn(move || run_game(&cfg, data).map_err(|e| e.to_string()))
                })
                .collect();
            for (i, h) in handles.into_iter().enumerate() {
                results[chunk_idx * threads + i] = Some(h.join().expect("game thread panicked"));
            }
        });
    }

    let mut per_seed_files = Vec::new();
    let mut failures = Vec::new();
    let mut runs = Vec::new();
    for (&seed, result) in spec.seeds.iter().zip(results.into_iter()) {
        match result.expect("every seed was scheduled") {
            Ok(run) => {
                let path = spec
                    .out_dir
                    .join(format!("{}_seed{}.csv", spec.method.name(), seed));
                write_seed_csv(&path, spec.method, seed, &run)?;
                per_seed_files.push((seed, path));
                runs.push((seed, run));
            }
            Err(msg) => failures.push((seed, msg)),
        }
    }

    let summary = summarize(spec, data.len(), &runs)?;
    let summary_path = spec.out_dir.join("summary.json");
    std::fs::write(&summary_path, serde_json::to_string_pretty(&summary)?)?;

    if !failures.is_empty() {
        let manifest = serde_json::json!({
            "failures": failures
                .iter()
                .map(|(seed, err)| serde_json::json!({"seed": seed, "error": err}))
                .collect::<Vec<_>>(),
        });
        std::fs::write(
            spec.out_dir.join("failures.json"),
            serde_json::to_string_pretty(&manifest)?,
        )?;
    }

    Ok(ExperimentOutcome {
        per_seed_files,
        summary_path,
        failures,
        runs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::dataset::synthetic_regression;

    fn tiny_spec(dir: &Path) -> ExperimentSpec {
        let mut spec = ExperimentSpec::new(
            DataSource::InMemory(synthetic_regression(12, 2, 3)),
            TaskKind::Regression,
            MethodKind::UniformBaseline,
            2,
            Budget::Rounds(40),
            dir.to_path_buf(),
        );
        spec.seeds = vec![11, 7, 3];
        spec.checkpoints = Some(4);
        spec.offline = OfflineConfig {
            budget: 5_000,
            tol: 1e-7,
        };
        spec
    }

    #[test]
    fn writes_one_csv_per_seed_plus_summary() {
        let dir = tempfile::tempdir().unwrap();
        let outcome = run_experiment(&tiny_spec(dir.path())).unwrap();
        assert!(outcome.all_completed());
        assert_eq!(outcome.per_seed_files.len(), 3);
        for (_, path) in &outcome.per_seed_files {
            let text = std::fs::read_to_string(path).unwrap();
            let mut lines = text.lines();
            assert_eq!(lines.next().unwrap(), METRICS_HEADER);
            assert!(lines.count() >= 2);
        }
        let summary: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(&outcome.summary_path).unwrap())
                .unwrap();
        assert_eq!(summary["method"], "uniform-baseline");
        let cks = summary["checkpoints"].as_array().unwrap();
        assert!(!cks.is_empty());
        for ck in cks {
            let (lo, med, hi) = (
                ck["gap_min"].as_f64().unwrap(),
                ck["gap_med"].as_f64().unwrap(),
                ck["gap_max"].as_f64().unwrap(),
            );
            assert!(lo <= med && med <= hi);
        }
    }

    #[test]
    fn invalid_delta_fails_before_any_run() {
        let dir = tempfile::tempdir().unwrap();
        let mut spec = tiny_spec(dir.path());
        spec.delta = 1.2;
        assert!(run_experiment(&spec).is_err());
        assert!(std::fs::read_dir(dir.path()).unwrap().next().is_none());
    }

    #[test]
    fn seed_permutation_leaves_individual_traces_unchanged() {
        let dir_a = tempfile::tempdir().unwrap();
        let dir_b = tempfile::tempdir().unwrap();
        let mut spec_a = tiny_spec(dir_a.path());
        spec_a.method = MethodKind::OlExp4Mp;
        spec_a.budget = Budget::Rounds(60);
        let mut spec_b = spec_a.clone();
        spec_b.out_dir = dir_b.path().to_path_buf();
        spec_b.seeds = vec![3, 11, 7];
        let out_a = run_experiment(&spec_a).unwrap();
        let out_b = run_experiment(&spec_b).unwrap();
        for (seed, path_a) in &out_a.per_seed_files {
            let path_b = &out_b
                .per_seed_files
                .iter()
                .find(|(s, _)| s == seed)
                .unwrap()
                .1;
            let strip = |p: &Path| -> Vec<String> {
                std::fs::read_to_string(p)
                    .unwrap()
                    .lines()
                    .map(|l| l.rsplit_once(',').unwrap().0.to_string())
                    .collect()
            };
            assert_eq!(strip(path_a), strip(path_b), "seed {seed}");
        }
    }
}
