//! Brute-force references and lemma checkers for small instances.
//!
//! Nothing here calls the scoring or sweep code of [`crate::inference`]:
//! objectives are evaluated from scratch so the two sides can disagree.

use std::collections::{BTreeMap, HashSet};

use num_rational::Ratio;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{fill_in, CycleCensus, Graph, GridGraph, RegionType};
use crate::inference::{FirstStageResult, MarginalTable};
use crate::noise::{check_probability, Labeling, Observations, Signals};

/// Largest vertex count for [`brute_force_max`].
pub const MAX_ORACLE_CAP: usize = 24;
/// Largest vertex count for [`brute_force_marginals`].
pub const MARGINAL_ORACLE_CAP: usize = 20;
/// Largest perimeter for [`polyomino_census`].
pub const POLYOMINO_CAP: usize = 12;

/// Outcome of one oracle comparison, serialisable as a JSON line.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub check: String,
    pub instance: String,
    pub oracle_value: f64,
    pub candidate_value: f64,
    pub pass: bool,
    /// False when the instance falls outside the checked statement.
    pub applicable: bool,
    pub detail: String,
}

impl OracleReport {
    fn new(check: &str, instance: String) -> Self {
        Self {
            check: check.into(),
            instance,
            oracle_value: 0.0,
            candidate_value: 0.0,
            pass: true,
            applicable: true,
            detail: String::new(),
        }
    }

    pub fn with_instance(mut self, instance: impl Into<String>) -> Self {
        self.instance = instance.into();
        self
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("report fields are serialisable")
    }
}

fn describe(g: &Graph) -> String {
    format!("n={} m={}", g.n(), g.num_edges())
}

fn check_cap(what: &'static str, limit: usize, got: usize) -> Result<()> {
    if got > limit {
        return Err(Error::Capacity { what, limit, got });
    }
    Ok(())
}

fn check_signals(g: &Graph, signals: &Signals) -> Result<()> {
    if signals.edges().len() != g.num_edges() {
        return Err(Error::DimensionMismatch { expected: g.num_edges(), got: signals.edges().len() });
    }
    if signals.nodes().len() != g.n() {
        return Err(Error::DimensionMismatch { expected: g.n(), got: signals.nodes().len() });
    }
    Ok(())
}

/// Label of vertex `v` under bitmask `mask`: bit set means `-1`.
fn spin(mask: u32, v: usize) -> i64 {
    1 - 2 * ((mask >> v) & 1) as i64
}

fn labeling_of(mask: u32, n: usize) -> Labeling {
    Labeling::new((0..n).map(|v| spin(mask, v) as i8).collect()).expect("labels are +-1")
}

/// Maximises `sum_e X_e y_u y_v + gamma sum_v X_v y_v` over all labelings.
/// With `gamma == 0` only labelings with the last vertex `+1` are visited.
/// The first maximiser in mask order is returned.
pub fn brute_force_max(g: &Graph, signals: &Signals, gamma: f64) -> Result<(f64, Labeling)> {
    let n = g.n();
    check_cap("vertices", MAX_ORACLE_CAP, n)?;
    check_signals(g, signals)?;
    if n == 0 {
        return Ok((0.0, labeling_of(0, 0)));
    }
    let masks: u32 = if gamma == 0.0 { 1 << (n - 1) } else { 1 << n };
    let edges: Vec<(usize, usize, i64)> =
        g.edges().iter().enumerate().map(|(e, &(u, v))| (u, v, signals.edge(e) as i64)).collect();
    let nodes: Vec<i64> = signals.nodes().iter().map(|&x| x as i64).collect();
    let mut best = (f64::NEG_INFINITY, 0u32);
    for mask in 0..masks {
        let edge_sum: i64 = edges.iter().map(|&(u, v, x)| x * spin(mask, u) * spin(mask, v)).sum();
        let node_sum: i64 = if gamma == 0.0 { 0 } else { (0..n).map(|v| nodes[v] * spin(mask, v)).sum() };
        let value = edge_sum as f64 + gamma * node_sum as f64;
        if value > best.0 {
            best = (value, mask);
        }
    }
    Ok((best.0, labeling_of(best.1, n)))
}

/// Posterior `P(y_v = +1)` under a uniform prior by summing the likelihood
/// `prod_e (1-p or p) * prod_v (1-q or q)` over every labeling.
pub fn brute_force_marginals(g: &Graph, signals: &Signals, p: f64, q: f64) -> Result<MarginalTable> {
    let n = g.n();
    check_cap("vertices", MARGINAL_ORACLE_CAP, n)?;
    check_signals(g, signals)?;
    check_probability("p", p)?;
    check_probability("q", q)?;
    let mut plus = vec![0.0f64; n];
    let mut total = 0.0f64;
    for mask in 0u32..1 << n {
        let mut weight = 1.0;
        for (e, &(u, v)) in g.edges().iter().enumerate() {
            let agrees = signals.edge(e) as i64 == spin(mask, u) * spin(mask, v);
            weight *= if agrees { 1.0 - p } else { p };
        }
        for v in 0..n {
            let agrees = signals.node(v) as i64 == spin(mask, v);
            weight *= if agrees { 1.0 - q } else { q };
        }
        total += weight;
        for (v, acc) in plus.iter_mut().enumerate() {
            if mask >> v & 1 == 0 {
                *acc += weight;
            }
        }
    }
    if total == 0.0 {
        return Err(Error::InvalidArgument("observations have zero likelihood under (p, q)".into()));
    }
    MarginalTable::new(plus.into_iter().map(|w| w / total).collect())
}

/// The sign of the first-stage output with fewer disagreements, and the
/// maximal connected components of its misclassified vertices.
fn misclassified_components(g: &Graph, labels: &Labeling, truth: &Labeling) -> (Vec<bool>, Vec<Vec<usize>>) {
    let wrong: Vec<bool> = (0..g.n()).map(|v| labels.get(v) != truth.get(v)).collect();
    let errors = wrong.iter().filter(|&&w| w).count();
    let better: Vec<bool> = if 2 * errors <= g.n() { wrong } else { wrong.iter().map(|&w| !w).collect() };
    let components = g.components(&better);
    (better, components)
}

fn bad_fraction(boundary: &[usize], bad: &[bool]) -> (usize, usize) {
    (boundary.iter().filter(|&&e| bad[e]).count(), boundary.len())
}

fn check_lengths(g: &Graph, obs: &Observations, truth: &Labeling, first: &FirstStageResult) -> Result<()> {
    check_signals(g, obs.signals())?;
    for len in [truth.len(), first.labeling.len()] {
        if len != g.n() {
            return Err(Error::DimensionMismatch { expected: g.n(), got: len });
        }
    }
    Ok(())
}

/// Every maximal misclassified component of the better sign must have at
/// least half of its boundary edges bad. The oracle value is the smallest
/// bad fraction found (1 when nothing is misclassified).
pub fn check_flipping_lemma(
    g: &Graph,
    obs: &Observations,
    truth: &Labeling,
    first: &FirstStageResult,
) -> Result<OracleReport> {
    check_lengths(g, obs, truth, first)?;
    let mut report = OracleReport::new("flipping_lemma", describe(g));
    report.candidate_value = 0.5;
    report.oracle_value = 1.0;
    let bad = obs.bad_edge_mask(g.num_edges());
    let (_, components) = misclassified_components(g, &first.labeling, truth);
    for comp in &components {
        let boundary = g.boundary(comp)?;
        let (bad_count, len) = bad_fraction(&boundary, &bad);
        if len == 0 {
            continue;
        }
        let fraction = bad_count as f64 / len as f64;
        report.oracle_value = report.oracle_value.min(fraction);
        if 2 * bad_count < len && report.pass {
            report.pass = false;
            report.detail = format!(
                "component of {} vertices starting at {} has {bad_count}/{len} bad boundary edges{}",
                comp.len(),
                comp[0],
                if first.certified_optimal { "" } else { " (uncertified labeling)" }
            );
        }
    }
    Ok(report)
}

/// Every misclassified component of the sign that does not misclassify an
/// all-sides set fills in to a bad set.
pub fn check_filled_in_lemma(
    grid: &GridGraph,
    obs: &Observations,
    truth: &Labeling,
    first: &FirstStageResult,
) -> Result<OracleReport> {
    check_lengths(grid, obs, truth, first)?;
    let mut report = OracleReport::new("filled_in_lemma", format!("grid {}x{}", grid.rows(), grid.cols()));
    report.candidate_value = 0.5;
    report.oracle_value = 1.0;
    let bad = obs.bad_edge_mask(grid.num_edges());
    let (better, _) = misclassified_components(grid, &first.labeling, truth);
    let flipped: Vec<bool> = better.iter().map(|&w| !w).collect();
    let has_all_sides = |mask: &[bool]| {
        grid.components(mask)
            .iter()
            .any(|comp| RegionType::from_sides(grid.sides_touched(comp.iter().copied())) == RegionType::AllSides)
    };
    let chosen = if !has_all_sides(&better) {
        better
    } else if !has_all_sides(&flipped) {
        flipped
    } else {
        report.pass = false;
        report.detail = "both signs misclassify a set touching all four sides".into();
        return Ok(report);
    };
    for comp in grid.components(&chosen) {
        let filled = fill_in(grid, &comp)?;
        let (bad_count, len) = bad_fraction(&filled.boundary, &bad);
        if len == 0 {
            continue;
        }
        report.oracle_value = report.oracle_value.min(bad_count as f64 / len as f64);
        if 2 * bad_count < len && report.pass {
            report.pass = false;
            report.detail = format!(
                "filled region of {} vertices from component at {} has {bad_count}/{len} bad boundary edges",
                filled.area(),
                comp[0]
            );
        }
    }
    Ok(report)
}

/// `H <= 2 |B| / (c d)` for the better sign, applicable when every
/// misclassified component has at most `N/2` vertices. Compared exactly in
/// rational arithmetic.
pub fn check_expander_bound(
    g: &Graph,
    obs: &Observations,
    truth: &Labeling,
    first: &FirstStageResult,
    c: Ratio<usize>,
    d: usize,
) -> Result<OracleReport> {
    check_lengths(g, obs, truth, first)?;
    if *c.numer() == 0 || d == 0 {
        return Err(Error::InvalidArgument("expansion constant and degree must be positive".into()));
    }
    let mut report = OracleReport::new("expander_bound", describe(g));
    let (better, components) = misclassified_components(g, &first.labeling, truth);
    let h = better.iter().filter(|&&w| w).count();
    let b = obs.bad_edges().len();
    report.candidate_value = h as f64;
    report.oracle_value = 2.0 * b as f64 * *c.denom() as f64 / (*c.numer() * d) as f64;
    if components.iter().any(|comp| 2 * comp.len() > g.n()) {
        report.applicable = false;
        report.detail = "a misclassified component exceeds N/2".into();
        return Ok(report);
    }
    // h <= 2b / (c d)  <=>  h * numer * d <= 2 * b * denom
    report.pass = h * c.numer() * d <= 2 * b * c.denom();
    if !report.pass {
        report.detail = format!("H = {h} exceeds 2|B|/(cd) with |B| = {b}, c = {c}, d = {d}");
    }
    Ok(report)
}

/// Errors of a predictor on `(truth, obs)` and on `(-truth, obs.mirrored())`
/// must coincide.
pub fn check_sign_symmetry(
    g: &Graph,
    obs: &Observations,
    truth: &Labeling,
    predict: impl Fn(&Signals) -> Result<Labeling>,
) -> Result<OracleReport> {
    check_signals(g, obs.signals())?;
    let count_errors = |pred: &Labeling, truth: &Labeling| (0..g.n()).filter(|&v| pred.get(v) != truth.get(v)).count();
    let direct = count_errors(&predict(obs.signals())?, truth);
    let mirrored = count_errors(&predict(obs.mirrored().signals())?, &truth.negated());
    let mut report = OracleReport::new("sign_symmetry", describe(g));
    report.oracle_value = direct as f64;
    report.candidate_value = mirrored as f64;
    report.pass = direct == mirrored;
    if !report.pass {
        report.detail = format!("error {direct} for the truth but {mirrored} for its negation");
    }
    Ok(report)
}

/// Self-avoiding polygon counts by growing hole-free polyominoes cell by
/// cell: a polygon of perimeter `i` bounds a hole-free polyomino with `i`
/// boundary edges.
pub fn polyomino_census(max_perimeter: usize) -> Result<CycleCensus> {
    if !max_perimeter.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!("polygon perimeter must be even, got {max_perimeter}")));
    }
    check_cap("polygon perimeter", POLYOMINO_CAP, max_perimeter)?;
    let max_area = max_perimeter * max_perimeter / 16;
    let mut counts = BTreeMap::new();
    let mut level: HashSet<Vec<(i32, i32)>> = HashSet::from([vec![(0, 0)]]);
    for area in 1..=max_area {
        for cells in &level {
            let perimeter = polyomino_perimeter(cells);
            if perimeter <= max_perimeter && is_hole_free(cells) {
                *counts.entry((perimeter, area)).or_insert(0u64) += 1;
            }
        }
        if area == max_area {
            break;
        }
        let mut next = HashSet::new();
        for cells in &level {
            let occupied: HashSet<(i32, i32)> = cells.iter().copied().collect();
            for &(x, y) in cells {
                for (dx, dy) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
                    let cell = (x + dx, y + dy);
                    if !occupied.contains(&cell) {
                        let mut grown = cells.clone();
                        grown.push(cell);
                        next.insert(normalize(grown));
                    }
                }
            }
        }
        level = next;
    }
    Ok(CycleCensus::from_counts(max_perimeter, counts))
}

fn normalize(mut cells: Vec<(i32, i32)>) -> Vec<(i32, i32)> {
    let min_x = cells.iter().map(|c| c.0).min().unwrap_or(0);
    let min_y = cells.iter().map(|c| c.1).min().unwrap_or(0);
    for c in &mut cells {
        *c = (c.0 - min_x, c.1 - min_y);
    }
    cells.sort_unstable();
    cells
}

fn polyomino_perimeter(cells: &[(i32, i32)]) -> usize {
    let occupied: HashSet<(i32, i32)> = cells.iter().copied().collect();
    cells
        .iter()
        .map(|&(x, y)| {
            [(1, 0), (-1, 0), (0, 1), (0, -1)].iter().filter(|&&(dx, dy)| !occupied.contains(&(x + dx, y + dy))).count()
        })
        .sum()
}

/// The empty cells of the bounding box, padded by one, form a single
/// 4-connected region.
fn is_hole_free(cells: &[(i32, i32)]) -> bool {
    let occupied: HashSet<(i32, i32)> = cells.iter().copied().collect();
    let max_x = cells.iter().map(|c| c.0).max().unwrap_or(0) + 1;
    let max_y = cells.iter().map(|c| c.1).max().unwrap_or(0) + 1;
    let inside = |(x, y): (i32, i32)| (-1..=max_x).contains(&x) && (-1..=max_y).contains(&y);
    let empty_total = ((max_x + 2) * (max_y + 2)) as usize - cells.len();
    let mut seen = HashSet::from([(-1, -1)]);
    let mut stack = vec![(-1, -1)];
    while let Some((x, y)) = stack.pop() {
        for (dx, dy) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
            let next = (x + dx, y + dy);
            if inside(next) && !occupied.contains(&next) && seen.insert(next) {
                stack.push(next);
            }
        }
    }
    seen.len() == empty_total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_grid;
    use crate::noise::{sample_observations, NoiseParams};

    #[test]
    fn noiseless_two_by_three() {
        let g = build_grid(2, 3).unwrap();
        let truth = Labeling::random(6, 4);
        let obs = sample_observations(&g, &truth, &NoiseParams::new(0.0, 0.0).unwrap(), 1).unwrap();
        let (score, labels) = brute_force_max(&g, obs.signals(), 0.0).unwrap();
        assert_eq!(score, 7.0);
        assert_eq!(labels.get(5), 1);
    }

    #[test]
    fn capacity_errors() {
        let g = Graph::new(25, (0..24).map(|v| (v, v + 1))).unwrap();
        let signals = Signals::new(vec![1; 24], vec![1; 25]).unwrap();
        assert!(brute_force_max(&g, &signals, 0.0).unwrap_err().is_capacity());
        assert!(brute_force_marginals(&g, &signals, 0.1, 0.1).unwrap_err().is_capacity());
        assert!(polyomino_census(14).unwrap_err().is_capacity());
    }

    #[test]
    fn marginals_uninformative_and_single_vertex() {
        let g = build_grid(2, 2).unwrap();
        let signals = Signals::new(vec![1, -1, 1, 1], vec![1, -1, -1, 1]).unwrap();
        let table = brute_force_marginals(&g, &signals, 0.5, 0.5).unwrap();
        assert!(table.probs().iter().all(|&x| (x - 0.5).abs() < 1e-15));
        let single = Graph::new(1, []).unwrap();
        let table = brute_force_marginals(&single, &Signals::new(vec![], vec![1]).unwrap(), 0.1, 0.3).unwrap();
        assert!((table.get(0) - 0.7).abs() < 1e-15);
    }

    #[test]
    fn polyomino_small_perimeters() {
        let census = polyomino_census(8).unwrap();
        assert_eq!(census.total(4), 1);
        assert_eq!(census.count(6, 2), 2);
        assert_eq!(census.total(8), 7);
    }

    #[test]
    fn report_json_line() {
        let report = OracleReport::new("x", "grid 2x2".into());
        let line = report.to_json_line();
        assert!(line.starts_with("{\"check\":\"x\",\"instance\":\"grid 2x2\""));
        assert!(!line.contains('\n'));
    }
}
