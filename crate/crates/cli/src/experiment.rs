//! Error sweeps: many sampled instances per noise level, every selected
//! algorithm on each, aggregated into an [`ErrorTable`].

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use gridrecov_core::bounds::mean_stderr;
use gridrecov_core::graph::GridGraph;
use gridrecov_core::inference::{
    gamma, map_full, marginal_predict, marginals, max_agreement_edges, two_step, MARGINAL_CAP,
};
use gridrecov_core::noise::{
    checkerboard_truth, hamming_error, sample_observations, sign_symmetric_error, AdversaryMode, RandomLabels,
    Truthful,
};
use gridrecov_core::oracles::brute_force_max;
use gridrecov_core::{build_grid, Labeling, NoiseParams, Signals};
use rayon::prelude::*;

use crate::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Algorithm {
    TwoStep,
    Marginal,
    MapFull,
    EdgeOnly,
    Oracle,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] =
        [Algorithm::TwoStep, Algorithm::Marginal, Algorithm::MapFull, Algorithm::EdgeOnly, Algorithm::Oracle];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::TwoStep => "two-step",
            Algorithm::Marginal => "marginal",
            Algorithm::MapFull => "map-full",
            Algorithm::EdgeOnly => "edge-only",
            Algorithm::Oracle => "oracle",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| CliError::Config(format!("unknown algorithm '{s}'")))
    }
}

/// How the ground truth of each trial is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TruthKind {
    #[default]
    Plus,
    Checkerboard,
    Random,
}

impl TruthKind {
    pub fn sample(self, grid: &GridGraph, seed: u64) -> Labeling {
        match self {
            TruthKind::Plus => Labeling::all_plus(grid.n()),
            TruthKind::Checkerboard => checkerboard_truth(grid, seed),
            TruthKind::Random => Labeling::random(grid.n(), seed),
        }
    }
}

impl FromStr for TruthKind {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        match s {
            "plus" => Ok(TruthKind::Plus),
            "checkerboard" => Ok(TruthKind::Checkerboard),
            "random" => Ok(TruthKind::Random),
            _ => Err(CliError::Config(format!("unknown truth '{s}'"))),
        }
    }
}

/// Labels written on corrupted elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AdversaryKind {
    #[default]
    Flip,
    Truthful,
    Random,
}

impl AdversaryKind {
    pub fn mode(self) -> AdversaryMode {
        match self {
            AdversaryKind::Flip => AdversaryMode::ConsistentFlip,
            AdversaryKind::Truthful => AdversaryMode::Pluggable(Arc::new(Truthful)),
            AdversaryKind::Random => AdversaryMode::Pluggable(Arc::new(RandomLabels)),
        }
    }
}

impl FromStr for AdversaryKind {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        match s {
            "flip" => Ok(AdversaryKind::Flip),
            "truthful" => Ok(AdversaryKind::Truthful),
            "random" => Ok(AdversaryKind::Random),
            _ => Err(CliError::Config(format!("unknown adversary '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub rows: usize,
    pub cols: usize,
    pub ps: Vec<f64>,
    pub q: f64,
    pub trials: usize,
    pub seed: u64,
    pub algorithms: Vec<Algorithm>,
    pub adversary: AdversaryKind,
    pub truth: TruthKind,
    pub output: Option<PathBuf>,
    /// Record wall-clock times; off by default so reports are reproducible.
    pub timing: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            rows: 20,
            cols: 20,
            ps: vec![0.01, 0.02, 0.04, 0.06, 0.08, 0.1],
            q: 0.4,
            trials: 100,
            seed: 0,
            algorithms: vec![Algorithm::TwoStep, Algorithm::MapFull, Algorithm::EdgeOnly],
            adversary: AdversaryKind::Flip,
            truth: TruthKind::Plus,
            output: None,
            timing: false,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> CliResult<()> {
        if self.rows == 0 || self.cols == 0 {
            return Err(CliError::Config(format!("grid must be non-empty, got {}x{}", self.rows, self.cols)));
        }
        if self.trials == 0 {
            return Err(CliError::Config("trials must be at least 1".into()));
        }
        if self.algorithms.is_empty() {
            return Err(CliError::Config("no algorithm selected".into()));
        }
        for &p in self.ps.iter().chain([&self.q]) {
            if !(0.0..=0.5).contains(&p) {
                return Err(CliError::Config(format!("noise level {p} outside [0, 0.5]")));
            }
        }
        if self.algorithms.contains(&Algorithm::Marginal) && self.rows > MARGINAL_CAP {
            return Err(CliError::Capacity(format!(
                "marginal inference supports at most {MARGINAL_CAP} rows, got {}",
                self.rows
            )));
        }
        Ok(())
    }
}

/// One aggregated line of an [`ErrorTable`].
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorRow {
    pub algorithm: Algorithm,
    pub p: f64,
    pub q: f64,
    pub rows: usize,
    pub cols: usize,
    pub trials: usize,
    pub mean_error: f64,
    pub stderr: f64,
    pub wall_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ErrorTable {
    pub rows: Vec<ErrorRow>,
}

impl ErrorTable {
    pub fn row(&self, algorithm: Algorithm, p: f64) -> Option<&ErrorRow> {
        self.rows.iter().find(|r| r.algorithm == algorithm && r.p == p)
    }

    /// Rows ordered by algorithm name, then `p`.
    pub fn sorted(&self) -> Vec<&ErrorRow> {
        let mut rows: Vec<&ErrorRow> = self.rows.iter().collect();
        rows.sort_by(|a, b| a.algorithm.name().cmp(b.algorithm.name()).then(a.p.total_cmp(&b.p)));
        rows
    }
}

/// Prediction of `algorithm` on a grid instance. Edge-only returns the
/// first-stage labeling as is.
pub fn predict(algorithm: Algorithm, grid: &GridGraph, signals: &Signals, p: f64, q: f64) -> CliResult<Labeling> {
    let fail = |e: gridrecov_core::Error| CliError::algorithm(algorithm, e);
    Ok(match algorithm {
        Algorithm::EdgeOnly => max_agreement_edges(grid, signals).map_err(fail)?.labeling,
        Algorithm::TwoStep => two_step(grid, signals).map_err(fail)?,
        Algorithm::MapFull | Algorithm::Oracle => match limit_case(grid, signals, p, q).map_err(fail)? {
            Some(labels) => labels,
            None => {
                let w = gamma(p, q).map_err(fail)?;
                if algorithm == Algorithm::MapFull {
                    map_full(grid, signals, w).map_err(fail)?
                } else {
                    brute_force_max(grid, signals, w.value()).map_err(fail)?.1
                }
            }
        },
        Algorithm::Marginal => match limit_case(grid, signals, p, q).map_err(fail)? {
            Some(labels) => labels,
            None => marginal_predict(&marginals(grid, signals, p, q).map_err(fail)?),
        },
    })
}

/// Error of `algorithm` on one instance. Edge-only errors are measured up
/// to the global sign; the others are plain Hamming distances.
pub fn run_algorithm(
    algorithm: Algorithm,
    grid: &GridGraph,
    signals: &Signals,
    truth: &Labeling,
    p: f64,
    q: f64,
) -> CliResult<usize> {
    let prediction = predict(algorithm, grid, signals, p, q)?;
    let fail = |e: gridrecov_core::Error| CliError::algorithm(algorithm, e);
    if algorithm == Algorithm::EdgeOnly {
        sign_symmetric_error(&prediction, truth).map_err(fail)
    } else {
        hamming_error(&prediction, truth).map_err(fail)
    }
}

/// Decisions at noise levels where the log-odds weights are infinite or
/// zero: exact edges reduce to the two-step rule, exact nodes or
/// uninformative edges to the node observations.
fn limit_case(grid: &GridGraph, signals: &Signals, p: f64, q: f64) -> gridrecov_core::Result<Option<Labeling>> {
    if q == 0.0 || (p == 0.5 && q < 0.5) {
        return Labeling::new(signals.nodes().to_vec()).map(Some);
    }
    if p == 0.0 {
        return two_step(grid, signals).map(Some);
    }
    if p == 0.5 {
        return Ok(Some(Labeling::all_plus(grid.n())));
    }
    Ok(None)
}

/// Runs every trial of every `p`; trial `t` samples truth and noise with
/// seed `seed ^ t`. Trials run in parallel; sums are taken in trial order.
pub fn run_experiment(cfg: &ExperimentConfig) -> CliResult<ErrorTable> {
    cfg.validate()?;
    let grid = build_grid(cfg.rows, cfg.cols).map_err(|e| CliError::Config(e.to_string()))?;
    let mut table = ErrorTable::default();
    for &p in &cfg.ps {
        let params =
            NoiseParams::with_adversary(p, cfg.q, cfg.adversary.mode()).map_err(|e| CliError::Config(e.to_string()))?;
        let per_trial: Vec<Vec<(usize, f64)>> = (0..cfg.trials)
            .into_par_iter()
            .map(|t| {
                let seed = cfg.seed ^ t as u64;
                let truth = cfg.truth.sample(&grid, seed);
                let obs = sample_observations(&grid, &truth, &params, seed).map_err(|e| CliError::Config(e.to_string()))?;
                cfg.algorithms
                    .iter()
                    .map(|&a| {
                        let start = Instant::now();
                        let err = run_algorithm(a, &grid, obs.signals(), &truth, p, cfg.q)?;
                        Ok((err, start.elapsed().as_secs_f64() * 1e3))
                    })
                    .collect()
            })
            .collect::<CliResult<_>>()?;
        for (k, &algorithm) in cfg.algorithms.iter().enumerate() {
            let errors: Vec<f64> = per_trial.iter().map(|r| r[k].0 as f64).collect();
            let (mean_error, stderr) = mean_stderr(&errors);
            let wall_ms = if cfg.timing { per_trial.iter().map(|r| r[k].1).sum() } else { 0.0 };
            table.rows.push(ErrorRow {
                algorithm,
                p,
                q: cfg.q,
                rows: cfg.rows,
                cols: cfg.cols,
                trials: cfg.trials,
                mean_error,
                stderr,
                wall_ms,
            });
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(algorithms: Vec<Algorithm>) -> ExperimentConfig {
        ExperimentConfig { rows: 3, cols: 4, ps: vec![0.0, 0.1], q: 0.3, trials: 8, seed: 7, algorithms, ..Default::default() }
    }

    #[test]
    fn noiseless_two_step_is_exact() {
        let cfg = ExperimentConfig { ps: vec![0.0], q: 0.0, ..small(vec![Algorithm::TwoStep]) };
        let table = run_experiment(&cfg).unwrap();
        assert_eq!(table.rows[0].mean_error, 0.0);
    }

    #[test]
    fn repeated_runs_agree() {
        let cfg = small(Algorithm::ALL.to_vec());
        assert_eq!(run_experiment(&cfg).unwrap(), run_experiment(&cfg).unwrap());
    }

    #[test]
    fn map_full_matches_oracle() {
        let cfg = ExperimentConfig { truth: TruthKind::Random, ..small(vec![Algorithm::MapFull, Algorithm::Oracle]) };
        let table = run_experiment(&cfg).unwrap();
        for p in [0.0, 0.1] {
            let a = table.row(Algorithm::MapFull, p).unwrap().mean_error;
            let b = table.row(Algorithm::Oracle, p).unwrap().mean_error;
            assert!((a - b).abs() <= 0.5, "{a} vs {b}");
        }
    }

    #[test]
    fn config_errors() {
        assert!(matches!(
            ExperimentConfig { trials: 0, ..small(vec![Algorithm::TwoStep]) }.validate(),
            Err(CliError::Config(_))
        ));
        assert!(matches!(
            ExperimentConfig { ps: vec![0.7], ..small(vec![Algorithm::TwoStep]) }.validate(),
            Err(CliError::Config(_))
        ));
        assert!(matches!(
            ExperimentConfig { rows: 17, ..small(vec![Algorithm::Marginal]) }.validate(),
            Err(CliError::Capacity(_))
        ));
    }

    #[test]
    fn oracle_capacity_names_algorithm() {
        let cfg = ExperimentConfig { rows: 5, cols: 5, ..small(vec![Algorithm::Oracle]) };
        let err = run_experiment(&cfg).unwrap_err();
        assert!(matches!(err, CliError::Algorithm { algorithm: Algorithm::Oracle, .. }));
        assert!(err.is_capacity());
    }

    #[test]
    fn names_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.name().parse::<Algorithm>().unwrap(), a);
        }
        assert!("fast".parse::<Algorithm>().is_err());
    }
}
