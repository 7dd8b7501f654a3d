//! Closed-form calculators for the tail bounds, the error series, the
//! refined constant, the lower bound and the expander and min-cut
//! conditions.

use std::f64::consts::E;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::fmt::sig6;
use crate::graph::CycleCensus;
use crate::graph::GridGraph;
use crate::noise::{check_probability, checkerboard_truth, is_black, sample_observations, NoiseParams};

/// Upper bound on the connective constant of the square lattice.
pub const CONNECTIVE_CONSTANT: f64 = 2.65;

/// Probability that a fixed set with `i` boundary edges is bad: the loose
/// bound `(3 sqrt p)^i`, or with `tight` the bound `(2 e p)^(i/2)`.
pub fn bad_region_prob_bound(i: usize, p: f64, tight: bool) -> Result<f64> {
    check_boundary(i)?;
    check_probability("p", p)?;
    Ok(if tight {
        (2.0 * E * p).powf(i as f64 / 2.0)
    } else {
        (3.0 * p.sqrt()).powi(i as i32)
    })
}

/// Exact probability that at least half of `i` independent edges are bad.
pub fn exact_bad_tail(i: usize, p: f64) -> Result<f64> {
    check_boundary(i)?;
    check_probability("p", p)?;
    Ok(binomial_upper_tail(i, i.div_ceil(2), p))
}

fn check_boundary(i: usize) -> Result<()> {
    if i == 0 {
        return Err(Error::InvalidArgument("boundary size must be at least 1".into()));
    }
    Ok(())
}

fn binomial_upper_tail(n: usize, from: usize, p: f64) -> f64 {
    let mut total = 0.0;
    let mut choose = 1.0f64;
    for k in 0..=n {
        if k > 0 {
            choose = choose * (n - k + 1) as f64 / k as f64;
        }
        if k >= from {
            total += choose * p.powi(k as i32) * (1.0 - p).powi((n - k) as i32);
        }
    }
    total
}

/// The expected-error series `N * a(p) + sqrt(N) * b(p)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesBound {
    pub p: f64,
    pub n: usize,
    /// `a(p) = sum_{i>=2} (i/16) (81p)^i`.
    pub type_one: f64,
    /// `b(p) = sum_{j>=2} (2 j^2 / 9) (9 sqrt p)^j`.
    pub boundary: f64,
    pub converges: bool,
}

impl SeriesBound {
    pub fn value(&self) -> f64 {
        self.n as f64 * self.type_one + (self.n as f64).sqrt() * self.boundary
    }
}

/// Sums both series in closed form; infinite with `converges == false`
/// once `81 p >= 1`.
pub fn series_error_bound(p: f64, n: usize) -> Result<SeriesBound> {
    check_probability("p", p)?;
    if n < 4 {
        return Err(Error::InvalidArgument(format!("series bound needs N >= 4, got {n}")));
    }
    let x = 81.0 * p;
    let y = 9.0 * p.sqrt();
    let converges = x < 1.0 && y < 1.0;
    let (type_one, boundary) = if converges {
        // sum_{i>=1} i x^i = x/(1-x)^2 and sum_{j>=1} j^2 y^j = y(1+y)/(1-y)^3
        let a = (x / (1.0 - x).powi(2) - x) / 16.0;
        let b = 2.0 / 9.0 * (y * (1.0 + y) / (1.0 - y).powi(3) - y);
        (a, b)
    } else {
        (f64::INFINITY, f64::INFINITY)
    };
    Ok(SeriesBound { p, n, type_one, boundary, converges })
}

/// The type-1 constant `C(p)` with expected error at most `C(p) p^2 N`,
/// split into the census sum and the geometric remainder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefinedConstant {
    pub p: f64,
    pub i_max: usize,
    /// `sum_{even i <= i_max} P(bad | i) * sum_a a c[a, i]`, per vertex.
    pub explicit: f64,
    /// `m^2 b^m / (1-b)^3` with `m = i_max/2 + 1`, `b = 2 e p mu^2`.
    pub remainder: f64,
    /// `(explicit + remainder) / p^2`.
    pub total: f64,
    pub converges: bool,
}

pub fn refined_constant(p: f64, census: &CycleCensus, i_max: usize) -> Result<RefinedConstant> {
    check_probability("p", p)?;
    if p == 0.0 {
        return Err(Error::InvalidProbability { name: "p", value: p });
    }
    if i_max < 4 || !i_max.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!("i_max must be even and at least 4, got {i_max}")));
    }
    if census.max_perimeter < i_max {
        return Err(Error::InvalidArgument(format!(
            "census covers perimeters up to {}, need {i_max}",
            census.max_perimeter
        )));
    }
    let explicit: f64 = (4..=i_max)
        .step_by(2)
        .map(|i| binomial_upper_tail(i, i / 2, p) * census.area_moment(i) as f64)
        .sum();
    let b = 2.0 * E * p * CONNECTIVE_CONSTANT * CONNECTIVE_CONSTANT;
    let converges = b < 1.0;
    let remainder = if converges {
        let m = (i_max / 2 + 1) as f64;
        m * m * b.powf(m) / (1.0 - b).powi(3)
    } else {
        f64::INFINITY
    };
    let total = (explicit + remainder) / (p * p);
    Ok(RefinedConstant { p, i_max, explicit, remainder, total, converges })
}

/// Probability that a degree-4 white node sees exactly two `+1` edges.
pub fn ambiguous_node_rate(p: f64) -> Result<f64> {
    check_probability("p", p)?;
    Ok(6.0 * p * p * (1.0 - p) * (1.0 - p))
}

/// Monte Carlo statistics of the checkerboard lower-bound construction.
#[derive(Debug, Clone, PartialEq)]
pub struct LowerBoundStats {
    pub p: f64,
    pub q: f64,
    pub trials: usize,
    /// Number of degree-4 white nodes in the grid.
    pub interior_white: usize,
    /// Mean number of ambiguous degree-4 white nodes per trial.
    pub ambiguous_mean: f64,
    pub ambiguous_stderr: f64,
    /// `ambiguous_node_rate(p) * interior_white`.
    pub ambiguous_expected: f64,
    /// Mean error of the optimal white-node predictor on ambiguous nodes.
    pub ambiguous_error_mean: f64,
    pub ambiguous_error_stderr: f64,
    /// Mean error of the same predictor over all white nodes.
    pub error_mean: f64,
    pub error_stderr: f64,
}

/// Samples checkerboard truths (black nodes `+1`, white nodes uniform),
/// reveals the black nodes and predicts every white node by its posterior
/// sign given its incident edges and its own observation; ties follow the
/// node observation.
///
/// Trial `t` uses seed `seed ^ t` for both the truth and the noise.
pub fn lower_bound_estimate(grid: &GridGraph, p: f64, q: f64, trials: usize, seed: u64) -> Result<LowerBoundStats> {
    let params = NoiseParams::new(p, q)?;
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let log_odds = |x: f64| if x == 0.0 { f64::INFINITY } else { ((1.0 - x) / x).ln() };
    let (edge_weight, node_weight) = (log_odds(p), log_odds(q));
    let white: Vec<usize> = (0..grid.n()).filter(|&v| !is_black(grid, v)).collect();
    let interior_white = white.iter().filter(|&&v| grid.degree(v) == 4).count();

    let mut ambiguous = Vec::with_capacity(trials);
    let mut ambiguous_errors = Vec::with_capacity(trials);
    let mut errors = Vec::with_capacity(trials);
    for t in 0..trials {
        let trial_seed = seed ^ t as u64;
        let truth = checkerboard_truth(grid, trial_seed);
        let obs = sample_observations(grid, &truth, &params, trial_seed)?;
        let signals = obs.signals();
        let (mut count, mut amb_err, mut err) = (0usize, 0usize, 0usize);
        for &v in &white {
            // black neighbours are +1, so each edge observation votes for y_v directly
            let plus = grid.neighbors(v).iter().filter(|&&(_, e)| signals.edge(e) > 0).count();
            let votes = 2 * plus as i64 - grid.degree(v) as i64;
            let node = signals.node(v);
            let prediction = if votes == 0 {
                node
            } else {
                let edge_term = if edge_weight.is_infinite() { votes.signum() as f64 * f64::MAX } else { votes as f64 * edge_weight };
                let node_term = if node_weight.is_infinite() { node as f64 * f64::MAX } else { node as f64 * node_weight };
                let score = edge_term + node_term;
                if score > 0.0 {
                    1
                } else if score < 0.0 {
                    -1
                } else {
                    node
                }
            };
            let wrong = prediction != truth.get(v);
            err += wrong as usize;
            if grid.degree(v) == 4 && plus == 2 {
                count += 1;
                amb_err += wrong as usize;
            }
        }
        ambiguous.push(count as f64);
        ambiguous_errors.push(amb_err as f64);
        errors.push(err as f64);
    }
    let (ambiguous_mean, ambiguous_stderr) = mean_stderr(&ambiguous);
    let (ambiguous_error_mean, ambiguous_error_stderr) = mean_stderr(&ambiguous_errors);
    let (error_mean, error_stderr) = mean_stderr(&errors);
    Ok(LowerBoundStats {
        p,
        q,
        trials,
        interior_white,
        ambiguous_mean,
        ambiguous_stderr,
        ambiguous_expected: ambiguous_node_rate(p)? * interior_white as f64,
        ambiguous_error_mean,
        ambiguous_error_stderr,
        error_mean,
        error_stderr,
    })
}

/// Sample mean and standard error of the mean.
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Error guarantee `(3p/c) N` on a `d`-regular expander with expansion `c`.
pub fn expander_error_bound(c: f64, d: usize, p: f64, n: usize) -> Result<f64> {
    check_expander(c, d)?;
    check_probability("p", p)?;
    Ok(3.0 * p / c * n as f64)
}

/// Error bound `2 |B| / (c d)` given the number of bad edges.
pub fn expander_conditional_bound(c: f64, d: usize, bad_edges: usize) -> Result<f64> {
    check_expander(c, d)?;
    Ok(2.0 * bad_edges as f64 / (c * d as f64))
}

fn check_expander(c: f64, d: usize) -> Result<()> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidArgument(format!("expansion constant must be positive, got {c}")));
    }
    if d < 3 {
        return Err(Error::InvalidArgument(format!("degree must be at least 3, got {d}")));
    }
    Ok(())
}

/// Bound `N^(2i/c*)` on the number of cuts of size `i` in a graph with
/// minimum cut `c*`, and whether `c* >= c log2 N` holds for the constant `c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinCutBound {
    pub value: f64,
    pub condition: bool,
}

pub fn mincut_region_count_bound(cstar: usize, n: usize, i: usize, c: f64) -> Result<MinCutBound> {
    if cstar == 0 {
        return Err(Error::InvalidArgument("minimum cut must be at least 1".into()));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("graph must have at least one vertex".into()));
    }
    let n = n as f64;
    Ok(MinCutBound { value: n.powf(2.0 * i as f64 / cstar as f64), condition: cstar as f64 >= c * n.log2() })
}

/// One line of the bounds report.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundRow {
    pub quantity: String,
    pub p: f64,
    pub n: usize,
    pub value: f64,
    pub flag: bool,
}

/// Bounds report rows for every `p`: the series terms and total, the
/// refined constant (census sum, remainder, total) and the ambiguous rate.
pub fn bounds_report(ps: &[f64], n: usize, census: &CycleCensus, i_max: usize) -> Result<Vec<BoundRow>> {
    let mut rows = Vec::new();
    for &p in ps {
        let row = |quantity: &str, value: f64, flag: bool| BoundRow { quantity: quantity.into(), p, n, value, flag };
        let series = series_error_bound(p, n)?;
        rows.push(row("series_type1", series.type_one, series.converges));
        rows.push(row("series_boundary", series.boundary, series.converges));
        rows.push(row("series_total", series.value(), series.converges));
        if p > 0.0 {
            let refined = refined_constant(p, census, i_max)?;
            rows.push(row("refined_explicit", refined.explicit, refined.converges));
            rows.push(row("refined_remainder", refined.remainder, refined.converges));
            rows.push(row("refined_total", refined.total, refined.converges));
        }
        rows.push(row("ambiguous_rate", ambiguous_node_rate(p)?, true));
    }
    Ok(rows)
}

/// CSV with header `quantity,p,N,value,flag`.
pub fn bounds_csv(rows: &[BoundRow]) -> String {
    let mut out = String::from("quantity,p,N,value,flag\n");
    for r in rows {
        writeln!(out, "{},{},{},{},{}", r.quantity, sig6(r.p), r.n, sig6(r.value), r.flag).unwrap();
    }
    out
}
