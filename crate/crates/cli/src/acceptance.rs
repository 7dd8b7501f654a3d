//! The acceptance checks, one function per criterion. Each returns an
//! [`Outcome`] instead of panicking so a runner can report every line.

use std::fmt;
use std::time::{Duration, Instant};

use gridrecov_core::bounds::{
    bad_region_prob_bound, bounds_csv, bounds_report, exact_bad_tail, lower_bound_estimate, refined_constant,
    series_error_bound,
};
use gridrecov_core::graph::{count_saps, enumerate_filled_regions, expansion_constant, group_counts, EnumerationCaps, TypeClass};
use gridrecov_core::inference::{gamma, map_full_scored, marginals, max_agreement_edges, max_agreement_exhaustive};
use gridrecov_core::noise::sample_observations;
use gridrecov_core::oracles::{
    brute_force_marginals, brute_force_max, check_expander_bound, check_filled_in_lemma, check_flipping_lemma,
    polyomino_census, OracleReport,
};
use gridrecov_core::{build_grid, Graph, Labeling, NoiseParams};

use crate::experiment::{run_experiment, Algorithm, ExperimentConfig};
use crate::CliResult;

#[derive(Debug, Clone)]
pub struct Outcome {
    pub id: u8,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "criterion {} {:<24} {} ({:.1}s) {}",
            self.id,
            self.name,
            if self.pass { "PASS" } else { "FAIL" },
            self.elapsed.as_secs_f64(),
            self.detail
        )
    }
}

fn timed(id: u8, name: &'static str, limit: Option<Duration>, body: impl FnOnce() -> CliResult<(bool, String)>) -> Outcome {
    let start = Instant::now();
    let (mut pass, mut detail) = match body() {
        Ok(result) => result,
        Err(e) => (false, format!("error: {e}")),
    };
    let elapsed = start.elapsed();
    if let Some(limit) = limit {
        if elapsed > limit {
            pass = false;
            detail.push_str(&format!("; exceeded time limit of {}s", limit.as_secs()));
        }
    }
    Outcome { id, name, pass, detail, elapsed }
}

/// Frontier solvers against brute force on small grids.
pub fn oracle_equivalence() -> Outcome {
    timed(1, "oracle-equivalence", Some(Duration::from_secs(120)), || {
        let mut mismatches = Vec::new();
        let mut worst_marginal = 0.0f64;
        let mut instances = 0;
        for (rows, cols) in [(2, 2), (2, 5), (3, 3), (3, 4)] {
            let grid = build_grid(rows, cols)?;
            for k in 0..200u64 {
                let (p, q) = ([0.1, 0.3][k as usize % 2], [0.1, 0.3][k as usize / 2 % 2]);
                let seed = 1000 * (rows * 10 + cols) as u64 + k;
                let truth = Labeling::random(grid.n(), seed);
                let obs = sample_observations(&grid, &truth, &NoiseParams::new(p, q)?, seed)?;
                let s = obs.signals();
                instances += 1;

                let edge = max_agreement_edges(&grid, s)?.score as f64;
                let (edge_oracle, _) = brute_force_max(&grid, s, 0.0)?;
                let w = gamma(p, q)?;
                let (full, _) = map_full_scored(&grid, s, w)?;
                let (full_oracle, _) = brute_force_max(&grid, s, w.value())?;
                if edge != edge_oracle || (full - full_oracle).abs() > 1e-9 * full_oracle.abs().max(1.0) {
                    mismatches.push(format!("{rows}x{cols} seed {seed}"));
                }
                let exact = marginals(&grid, s, p, q)?;
                let brute = brute_force_marginals(&grid, s, p, q)?;
                for v in 0..grid.n() {
                    worst_marginal = worst_marginal.max((exact.get(v) - brute.get(v)).abs());
                }
            }
        }
        let pass = mismatches.is_empty() && worst_marginal <= 1e-9;
        Ok((
            pass,
            format!(
                "{instances} instances, {} score mismatches{}, max marginal gap {worst_marginal:.2e}",
                mismatches.len(),
                mismatches.first().map(|m| format!(" (first: {m})")).unwrap_or_default()
            ),
        ))
    })
}

/// Both flipping lemmas at the exact first-stage optimum on 5x5 grids.
pub fn flipping_suite() -> Outcome {
    timed(2, "flipping-lemma", Some(Duration::from_secs(60)), || {
        let grid = build_grid(5, 5)?;
        let mut failures = Vec::new();
        let mut checked = 0;
        for p in [0.05, 0.15] {
            let params = NoiseParams::new(p, 0.4)?;
            for seed in 0..1000u64 {
                let truth = Labeling::random(grid.n(), seed);
                let obs = sample_observations(&grid, &truth, &params, seed)?;
                let first = max_agreement_edges(&grid, obs.signals())?;
                for report in [
                    check_flipping_lemma(&grid, &obs, &truth, &first)?,
                    check_filled_in_lemma(&grid, &obs, &truth, &first)?,
                ] {
                    checked += 1;
                    if !report.pass {
                        failures.push(report.with_instance(format!("5x5 p={p} seed={seed}")).to_json_line());
                    }
                }
            }
        }
        Ok((
            failures.is_empty(),
            format!("{checked} checks, {} failures{}", failures.len(), failures.first().map(|f| format!(": {f}")).unwrap_or_default()),
        ))
    })
}

/// Area and count bounds over enumerated filled regions, and the polygon
/// census against polyomino growth.
pub fn region_apparatus() -> Outcome {
    timed(3, "region-apparatus", None, || {
        let mut problems = Vec::new();
        let mut total = 0;
        for (rows, cols) in [(5, 5), (6, 6)] {
            let grid = build_grid(rows, cols)?;
            let n = grid.n() as f64;
            let regions = enumerate_filled_regions(&grid, 12, EnumerationCaps::default())?;
            total += regions.len();
            for r in &regions {
                let (area, i) = (r.area(), r.perimeter());
                let ok = match r.filled_type.class() {
                    TypeClass::Interior => 16 * area <= i * i,
                    TypeClass::Perimeter => area <= i * i,
                };
                if !ok {
                    problems.push(format!("{rows}x{cols}: area {area} at boundary {i} ({:?})", r.filled_type));
                }
            }
            for ((i, class), count) in group_counts(&regions) {
                let growth = 3f64.powi(i as i32 - 2);
                let ok = match class {
                    TypeClass::Interior => i % 2 == 0 && count as f64 <= n * 2.0 * growth / i as f64,
                    TypeClass::Perimeter => count as f64 <= 2.0 * n.sqrt() * growth,
                };
                if !ok {
                    problems.push(format!("{rows}x{cols}: {count} {} regions at boundary {i}", class.label()));
                }
            }
        }
        let census = count_saps(12)?;
        let oracle = polyomino_census(12)?;
        if census != oracle {
            problems.push("polygon census differs from polyomino growth".into());
        }
        let totals: Vec<String> = (4..=12).step_by(2).map(|i| census.total(i).to_string()).collect();
        Ok((
            problems.is_empty(),
            format!(
                "{total} regions, polygons by perimeter 4..12: [{}]{}",
                totals.join(", "),
                problems.first().map(|p| format!("; {p}")).unwrap_or_default()
            ),
        ))
    })
}

/// `mean_error / (p^2 N)` of the two-step algorithm on 20x20 grids.
pub fn error_scaling() -> Outcome {
    timed(4, "error-scaling", Some(Duration::from_secs(600)), || {
        let ps = vec![0.01, 0.02, 0.04];
        let cfg = ExperimentConfig {
            rows: 20,
            cols: 20,
            ps: ps.clone(),
            q: 0.4,
            trials: 500,
            seed: 2024,
            algorithms: vec![Algorithm::TwoStep],
            ..Default::default()
        };
        let table = run_experiment(&cfg)?;
        let n = 400.0;
        let means: Vec<f64> = ps.iter().map(|&p| table.row(Algorithm::TwoStep, p).map_or(f64::NAN, |r| r.mean_error)).collect();
        let ratios: Vec<f64> = ps.iter().zip(&means).map(|(p, m)| m / (p * p * n)).collect();
        let spread = ratios.iter().cloned().fold(f64::MIN, f64::max) / ratios.iter().cloned().fold(f64::MAX, f64::min);
        let baseline = 0.5 * cfg.q * n;
        let pass = spread < 3.0 && means[2] < baseline;
        Ok((pass, format!("means {means:.4?}, ratios {ratios:.3?}, spread {spread:.3}, baseline {baseline}")))
    })
}

/// Two-step against exact marginals on 12x12 grids.
pub fn near_optimality() -> Outcome {
    timed(5, "near-optimality", None, || {
        let ps = vec![0.01, 0.02];
        let cfg = ExperimentConfig {
            rows: 12,
            cols: 12,
            ps: ps.clone(),
            q: 0.4,
            trials: 300,
            seed: 77,
            algorithms: vec![Algorithm::TwoStep, Algorithm::Marginal],
            ..Default::default()
        };
        let table = run_experiment(&cfg)?;
        let mut pass = true;
        let mut parts = Vec::new();
        for p in ps {
            let two = table.row(Algorithm::TwoStep, p).map_or(f64::NAN, |r| r.mean_error);
            let marg = table.row(Algorithm::Marginal, p).map_or(f64::NAN, |r| r.mean_error);
            if marg < 0.5 {
                parts.push(format!("p={p}: two-step {two:.4}, marginal {marg:.4}, ratio skipped (marginal error below 0.5)"));
            } else {
                let ratio = two / marg;
                pass &= ratio <= 1.5;
                parts.push(format!("p={p}: two-step {two:.4}, marginal {marg:.4}, ratio {ratio:.3}"));
            }
        }
        Ok((pass, parts.join("; ")))
    })
}

/// Ambiguous-node frequency and the error of the optimal white-node
/// predictor under the checkerboard construction.
pub fn lower_bound() -> Outcome {
    timed(6, "lower-bound", None, || {
        let grid = build_grid(20, 20)?;
        let n = grid.n() as f64;
        let mut pass = true;
        let mut ratios = Vec::new();
        let mut parts = Vec::new();
        for (k, p) in [0.02, 0.04, 0.08].into_iter().enumerate() {
            let trials = 500;
            let stats = lower_bound_estimate(&grid, p, 0.4, trials, 31 + k as u64)?;
            let rate = stats.ambiguous_expected / stats.interior_white as f64;
            let sigma = (stats.interior_white as f64 * rate * (1.0 - rate) / trials as f64).sqrt();
            let z = (stats.ambiguous_mean - stats.ambiguous_expected) / sigma;
            pass &= z.abs() <= 3.0;
            let ratio = stats.ambiguous_error_mean / (p * p * n);
            ratios.push(ratio);
            parts.push(format!(
                "p={p}: ambiguous {:.3} vs {:.3} (z={z:.2}), L/(p^2 N)={ratio:.3}",
                stats.ambiguous_mean, stats.ambiguous_expected
            ));
        }
        let spread = ratios.iter().cloned().fold(f64::MIN, f64::max) / ratios.iter().cloned().fold(f64::MAX, f64::min);
        pass &= spread <= 2.0;
        parts.push(format!("spread {spread:.3}"));
        Ok((pass, parts.join("; ")))
    })
}

/// `H <= 2|B|/(cd)` on random cubic graphs with the exhaustive first stage.
pub fn expander_suite() -> Outcome {
    timed(7, "expander-bound", None, || {
        let (mut applicable, mut skipped, mut failures) = (0, 0, Vec::new());
        for graph_seed in 0..50u64 {
            let g = Graph::random_regular(14, 3, graph_seed)?;
            let c = expansion_constant(&g)?;
            for p in [0.03, 0.08] {
                let params = NoiseParams::new(p, 0.3)?;
                for trial in 0..10u64 {
                    let seed = graph_seed * 1000 + trial;
                    let truth = Labeling::random(g.n(), seed);
                    let obs = sample_observations(&g, &truth, &params, seed)?;
                    let first = max_agreement_exhaustive(&g, obs.signals())?;
                    let report = check_expander_bound(&g, &obs, &truth, &first, c, 3)?;
                    if !report.applicable {
                        skipped += 1;
                    } else if report.pass {
                        applicable += 1;
                    } else {
                        failures.push(report.with_instance(format!("graph {graph_seed} p={p} trial {trial}")).to_json_line());
                    }
                }
            }
        }
        Ok((
            failures.is_empty(),
            format!(
                "{applicable} passing, {skipped} not applicable, {} failing{}",
                failures.len(),
                failures.first().map(|f| format!(": {f}")).unwrap_or_default()
            ),
        ))
    })
}

/// Series convergence flags, tail ordering and the refined-constant report.
pub fn bounds_calculators() -> Outcome {
    timed(8, "bounds-calculators", None, || {
        let mut problems = Vec::new();
        let finite = series_error_bound(1.0 / 162.0, 400)?;
        if !(finite.converges && finite.value().is_finite()) {
            problems.push("series not finite at p = 1/162".to_string());
        }
        if series_error_bound(1.0 / 81.0, 400)?.converges {
            problems.push("series not flagged divergent at p = 1/81".to_string());
        }
        for i in 1..=30 {
            for k in 1..=10 {
                let p = k as f64 / 100.0;
                let (exact, tight, loose) =
                    (exact_bad_tail(i, p)?, bad_region_prob_bound(i, p, true)?, bad_region_prob_bound(i, p, false)?);
                if !(exact <= tight && tight <= loose) {
                    problems.push(format!("tail ordering fails at i={i} p={p}"));
                }
            }
        }
        let census = count_saps(12)?;
        let refined = refined_constant(0.017, &census, 12)?;
        let second = refined_constant(0.017, &polyomino_census(12)?, 12)?;
        if refined.explicit != second.explicit {
            problems.push("census sum depends on the enumeration path".into());
        }
        if !(refined.explicit.is_finite() && refined.remainder.is_finite()) {
            problems.push("refined constant terms not finite".into());
        }
        let report = bounds_csv(&bounds_report(&[0.017], 400, &census, 12)?);
        let again = bounds_csv(&bounds_report(&[0.017], 400, &count_saps(12)?, 12)?);
        if report != again {
            problems.push("bounds report not reproducible".into());
        }
        Ok((
            problems.is_empty(),
            format!(
                "series(1/162) = {:.4}, C(0.017): census sum {:.4e}, remainder {:.4e}, total {:.4e}{}",
                finite.value(),
                refined.explicit,
                refined.remainder,
                refined.total,
                problems.first().map(|p| format!("; {p}")).unwrap_or_default()
            ),
        ))
    })
}

/// Runs the `experiment` twice through `run` (which returns the CSV bytes
/// for one run) and compares the outputs.
pub fn determinism(run: impl Fn(usize) -> CliResult<Vec<u8>>) -> Outcome {
    timed(9, "determinism", None, || {
        let first = run(0)?;
        let second = run(1)?;
        Ok((first == second && !first.is_empty(), format!("{} bytes, identical: {}", first.len(), first == second)))
    })
}

/// The configuration the determinism criterion runs.
pub fn determinism_config() -> ExperimentConfig {
    ExperimentConfig {
        rows: 8,
        cols: 8,
        ps: vec![0.02, 0.05, 0.1],
        q: 0.4,
        trials: 40,
        seed: 99,
        algorithms: vec![Algorithm::TwoStep, Algorithm::Marginal, Algorithm::MapFull, Algorithm::EdgeOnly],
        ..Default::default()
    }
}

/// A quick oracle pass for `gridrecov verify`: solver cross-checks on 3x3
/// grids, both flipping lemmas on 5x5 grids and the expander bound on
/// random cubic graphs, `trials` instances each.
pub fn oracle_suite(trials: usize, seed: u64) -> CliResult<Vec<OracleReport>> {
    let mut reports = Vec::new();
    let small = build_grid(3, 3)?;
    let grid = build_grid(5, 5)?;
    for t in 0..trials as u64 {
        let s = seed ^ t;
        let (p, q) = ([0.1, 0.3][t as usize % 2], [0.1, 0.3][t as usize / 2 % 2]);
        let truth = Labeling::random(small.n(), s);
        let obs = sample_observations(&small, &truth, &NoiseParams::new(p, q)?, s)?;
        let (oracle, _) = brute_force_max(&small, obs.signals(), 0.0)?;
        let candidate = max_agreement_edges(&small, obs.signals())?.score as f64;
        reports.push(OracleReport {
            check: "edge_only_max".into(),
            instance: format!("3x3 p={p} q={q} seed={s}"),
            oracle_value: oracle,
            candidate_value: candidate,
            pass: oracle == candidate,
            applicable: true,
            detail: String::new(),
        });
        let exact = marginals(&small, obs.signals(), p, q)?;
        let brute = brute_force_marginals(&small, obs.signals(), p, q)?;
        let gap = (0..small.n()).map(|v| (exact.get(v) - brute.get(v)).abs()).fold(0.0, f64::max);
        reports.push(OracleReport {
            check: "marginals".into(),
            instance: format!("3x3 p={p} q={q} seed={s}"),
            oracle_value: 0.0,
            candidate_value: gap,
            pass: gap <= 1e-9,
            applicable: true,
            detail: String::new(),
        });

        let truth = Labeling::random(grid.n(), s);
        let obs = sample_observations(&grid, &truth, &NoiseParams::new(0.1, 0.4)?, s)?;
        let first = max_agreement_edges(&grid, obs.signals())?;
        let instance = format!("5x5 p=0.1 seed={s}");
        reports.push(check_flipping_lemma(&grid, &obs, &truth, &first)?.with_instance(instance.clone()));
        reports.push(check_filled_in_lemma(&grid, &obs, &truth, &first)?.with_instance(instance));

        let g = Graph::random_regular(14, 3, s)?;
        let c = expansion_constant(&g)?;
        let truth = Labeling::random(g.n(), s);
        let obs = sample_observations(&g, &truth, &NoiseParams::new(0.05, 0.3)?, s)?;
        let first = max_agreement_exhaustive(&g, obs.signals())?;
        reports.push(check_expander_bound(&g, &obs, &truth, &first, c, 3)?.with_instance(format!("cubic n=14 seed={s}")));
    }
    Ok(reports)
}

/// Every criterion in order; `run_experiment_csv` backs the determinism check.
pub fn run_all(run_experiment_csv: impl Fn(usize) -> CliResult<Vec<u8>>) -> Vec<Outcome> {
    vec![
        oracle_equivalence(),
        flipping_suite(),
        region_apparatus(),
        error_scaling(),
        near_optimality(),
        lower_bound(),
        expander_suite(),
        bounds_calculators(),
        determinism(run_experiment_csv),
    ]
}
