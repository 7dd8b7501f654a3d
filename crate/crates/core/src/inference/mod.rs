//! Recovery algorithms: edge-only agreement maximization, the two-stage
//! sign vote, full MAP, exact posterior marginals, and the exhaustive first
//! stage for general graphs.

mod frontier;

use crate::error::{Error, Result};
use crate::graph::{Graph, GridGraph};
use crate::noise::{Labeling, Signals};

pub use frontier::SCORE_TIE_TOL;

/// Largest row count for the max-product frontier sweep.
pub const FRONTIER_CAP: usize = 22;
/// Largest row count for exact marginals.
pub const MARGINAL_CAP: usize = 16;
/// Largest vertex count for exhaustive maximization.
pub const EXHAUSTIVE_CAP: usize = 24;

/// Relative weight of node terms against edge terms in the MAP objective.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct GammaWeight(f64);

impl GammaWeight {
    /// A caller-chosen weight; must be finite and non-negative.
    pub fn new(value: f64) -> Result<Self> {
        if !value.is_finite() || value < 0.0 {
            return Err(Error::InvalidArgument(format!("gamma must be finite and >= 0, got {value}")));
        }
        Ok(Self(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// `log((1-q)/q) / log((1-p)/p)`.
///
/// `p` must lie strictly inside `(0, 1/2)`; `q` in `(0, 1/2]`, where
/// `q = 1/2` gives weight zero.
pub fn gamma(p: f64, q: f64) -> Result<GammaWeight> {
    if !(0.0..=0.5).contains(&p) {
        return Err(Error::InvalidProbability { name: "p", value: p });
    }
    if !(0.0..=0.5).contains(&q) {
        return Err(Error::InvalidProbability { name: "q", value: q });
    }
    if p == 0.0 || p == 0.5 {
        return Err(Error::DegenerateNoise { name: "p", value: p });
    }
    if q == 0.0 {
        return Err(Error::DegenerateNoise { name: "q", value: q });
    }
    GammaWeight::new(((1.0 - q) / q).ln() / ((1.0 - p) / p).ln())
}

/// `sum_e X_e y_u y_v`.
pub fn agreement_score(g: &Graph, signals: &Signals, labels: &Labeling) -> i64 {
    g.edges()
        .iter()
        .enumerate()
        .map(|(e, &(u, v))| i64::from(signals.edge(e) * labels.get(u) * labels.get(v)))
        .sum()
}

/// `sum_e X_e y_u y_v + gamma * sum_v X_v y_v`.
pub fn full_objective(g: &Graph, signals: &Signals, labels: &Labeling, gamma: GammaWeight) -> f64 {
    let node: i64 = (0..g.n()).map(|v| i64::from(signals.node(v) * labels.get(v))).sum();
    agreement_score(g, signals, labels) as f64 + gamma.value() * node as f64
}

/// Output of the edge-only stage.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FirstStageResult {
    pub labeling: Labeling,
    /// Agreement `sum_e X_e y_u y_v`; identical for the negated labeling.
    pub score: i64,
    /// Set only by the exact solvers.
    pub certified_optimal: bool,
}

impl FirstStageResult {
    /// Wraps an arbitrary labeling, e.g. a heuristic or perturbed one.
    pub fn uncertified(g: &Graph, signals: &Signals, labeling: Labeling) -> Result<Self> {
        signals.check_shape(g)?;
        if labeling.len() != g.n() {
            return Err(Error::DimensionMismatch { expected: g.n(), got: labeling.len() });
        }
        let score = agreement_score(g, signals, &labeling);
        Ok(Self { labeling, score, certified_optimal: false })
    }
}

fn check_rows(grid: &GridGraph, cap: usize) -> Result<()> {
    if grid.rows() > cap {
        return Err(Error::Capacity { what: "grid rows", limit: cap, got: grid.rows() });
    }
    Ok(())
}

/// Global maximizer of the edge agreement on a grid.
pub fn max_agreement_edges(grid: &GridGraph, signals: &Signals) -> Result<FirstStageResult> {
    max_agreement_edges_with_cap(grid, signals, FRONTIER_CAP)
}

pub fn max_agreement_edges_with_cap(
    grid: &GridGraph,
    signals: &Signals,
    cap: usize,
) -> Result<FirstStageResult> {
    check_rows(grid, cap)?;
    signals.check_shape(grid)?;
    // scores are bounded by the edge count
    let (score, labels) = if grid.num_edges() <= i16::MAX as usize {
        let (s, y) = frontier::argmax_flip_symmetric(grid, |e| i16::from(signals.edge(e)));
        (i64::from(s), y)
    } else {
        let (s, y) = frontier::argmax_flip_symmetric(grid, |e| i32::from(signals.edge(e)));
        (i64::from(s), y)
    };
    Ok(FirstStageResult {
        labeling: Labeling::from_vec_unchecked(labels),
        score,
        certified_optimal: true,
    })
}

/// Second stage: keep `first` unless the node vote `sum_v X_v y_v` is
/// strictly negative.
pub fn sign_vote(first: &Labeling, signals: &Signals) -> Labeling {
    let vote: i64 = first
        .values()
        .iter()
        .zip(signals.nodes())
        .map(|(&y, &x)| i64::from(x * y))
        .sum();
    if vote < 0 {
        first.negated()
    } else {
        first.clone()
    }
}

/// The two-stage algorithm on a grid.
pub fn two_step(grid: &GridGraph, signals: &Signals) -> Result<Labeling> {
    let first = max_agreement_edges(grid, signals)?;
    Ok(sign_vote(&first.labeling, signals))
}

/// The two-stage algorithm with the exhaustive first stage.
pub fn two_step_exhaustive(g: &Graph, signals: &Signals) -> Result<Labeling> {
    let first = max_agreement_exhaustive(g, signals)?;
    Ok(sign_vote(&first.labeling, signals))
}

/// Exact maximizer of the full MAP objective on a grid, with its score.
pub fn map_full_scored(grid: &GridGraph, signals: &Signals, gamma: GammaWeight) -> Result<(f64, Labeling)> {
    check_rows(grid, FRONTIER_CAP)?;
    signals.check_shape(grid)?;
    let g = gamma.value();
    let (score, labels) =
        frontier::argmax(grid, |e| f64::from(signals.edge(e)), |v| g * f64::from(signals.node(v)));
    Ok((score, Labeling::from_vec_unchecked(labels)))
}

pub fn map_full(grid: &GridGraph, signals: &Signals, gamma: GammaWeight) -> Result<Labeling> {
    map_full_scored(grid, signals, gamma).map(|(_, y)| y)
}

/// Per-vertex posterior probability of `+1` under a uniform prior.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginalTable(Vec<f64>);

impl MarginalTable {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if let Some(&bad) = probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::InvalidProbability { name: "marginal", value: bad });
        }
        Ok(Self(probs))
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn get(&self, v: usize) -> f64 {
        self.0[v]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

fn check_marginal_noise(p: f64, q: f64) -> Result<()> {
    for (name, value) in [("p", p), ("q", q)] {
        if !(0.0..=0.5).contains(&value) {
            return Err(Error::InvalidProbability { name, value });
        }
        if value == 0.0 {
            return Err(Error::DegenerateNoise { name, value });
        }
    }
    Ok(())
}

/// Exact posterior marginals on a grid with at most [`MARGINAL_CAP`] rows.
pub fn marginals(grid: &GridGraph, signals: &Signals, p: f64, q: f64) -> Result<MarginalTable> {
    check_rows(grid, MARGINAL_CAP)?;
    check_marginal_noise(p, q)?;
    signals.check_shape(grid)?;
    let j = 0.5 * ((1.0 - p) / p).ln();
    let k = 0.5 * ((1.0 - q) / q).ln();
    let probs = frontier::marginals(grid, |e| j * f64::from(signals.edge(e)), |v| k * f64::from(signals.node(v)));
    Ok(MarginalTable(probs.into_iter().map(|x| x.clamp(0.0, 1.0)).collect()))
}

/// `+1` where the posterior is at least 1/2, `-1` otherwise.
pub fn marginal_predict(table: &MarginalTable) -> Labeling {
    Labeling::from_vec_unchecked(table.0.iter().map(|&x| if x >= 0.5 { 1 } else { -1 }).collect())
}

/// Exact edge-agreement maximizer on any graph by Gray-code enumeration of
/// the `2^(N-1)` sign classes (the last vertex is pinned to `+1`).
pub fn max_agreement_exhaustive(g: &Graph, signals: &Signals) -> Result<FirstStageResult> {
    let n = g.n();
    if n > EXHAUSTIVE_CAP {
        return Err(Error::Capacity { what: "vertex count for exhaustive search", limit: EXHAUSTIVE_CAP, got: n });
    }
    signals.check_shape(g)?;
    let mut labels = vec![1i8; n];
    let mut score: i64 = signals.edges().iter().map(|&x| i64::from(x)).sum();
    let mut best = (score, 0u32);
    let free = n.saturating_sub(1) as u32;
    let mut code = 0u32;
    for step in 1u32..(1u32 << free) {
        let v = step.trailing_zeros() as usize;
        let local: i64 = g
            .neighbors(v)
            .iter()
            .map(|&(w, e)| i64::from(signals.edge(e) * labels[v] * labels[w]))
            .sum();
        score -= 2 * local;
        labels[v] = -labels[v];
        code ^= 1 << v;
        if score > best.0 {
            best = (score, code);
        }
    }
    let labeling = (0..n).map(|v| if v < 32 && (best.1 >> v) & 1 == 1 { -1 } else { 1 }).collect();
    Ok(FirstStageResult {
        labeling: Labeling::from_vec_unchecked(labeling),
        score: best.0,
        certified_optimal: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_grid;
    use crate::noise::{sample_observations, sign_symmetric_error, NoiseParams};

    fn assert_close(a: f64, b: f64) {
        assert!((a - b).abs() < 1e-12, "{a} vs {b}");
    }

    #[test]
    fn gamma_examples() {
        assert_close(gamma(0.1, 0.1).unwrap().value(), 1.0);
        assert_close(gamma(0.1, 0.5).unwrap().value(), 0.0);
        assert_close(gamma(0.1, 0.3).unwrap().value(), (7.0f64 / 3.0).ln() / 9.0f64.ln());
        assert!((gamma(0.1, 0.3).unwrap().value() - 0.3856).abs() < 1e-4);
        assert!(matches!(gamma(0.0, 0.3), Err(Error::DegenerateNoise { name: "p", .. })));
        assert!(matches!(gamma(0.5, 0.3), Err(Error::DegenerateNoise { name: "p", .. })));
        assert!(matches!(gamma(0.1, 0.0), Err(Error::DegenerateNoise { name: "q", .. })));
        assert!(matches!(gamma(0.7, 0.3), Err(Error::InvalidProbability { .. })));
    }

    #[test]
    fn noiseless_first_stage() {
        let g = build_grid(3, 3).unwrap();
        let truth = Labeling::random(9, 5);
        let obs = sample_observations(&g, &truth, &NoiseParams::new(0.0, 0.3).unwrap(), 1).unwrap();
        let first = max_agreement_edges(&g, obs.signals()).unwrap();
        assert_eq!(first.score, 12);
        assert!(first.labeling == truth || first.labeling == truth.negated());
        assert!(first.certified_optimal);
    }

    #[test]
    fn one_flipped_edge() {
        let g = build_grid(3, 3).unwrap();
        let truth = Labeling::random(9, 11);
        let mut edges: Vec<i8> = g.edges().iter().map(|&(u, v)| truth.get(u) * truth.get(v)).collect();
        for flip in 0..g.num_edges() {
            edges[flip] = -edges[flip];
            let s = Signals::new(edges.clone(), truth.values().to_vec()).unwrap();
            let first = max_agreement_edges(&g, &s).unwrap();
            assert_eq!(first.score, 10);
            let (u, v) = g.edge(flip);
            if g.degree(u) > 2 && g.degree(v) > 2 {
                assert!(first.labeling == truth || first.labeling == truth.negated());
            } else {
                // flipping the corner vertex instead is an equally good optimum
                assert!(sign_symmetric_error(&first.labeling, &truth).unwrap() <= 1);
            }
            edges[flip] = -edges[flip];
        }
    }

    #[test]
    fn vote_rules() {
        let y = Labeling::random(6, 2);
        let same = Signals::new(vec![], y.values().to_vec()).unwrap();
        assert_eq!(sign_vote(&y, &same), y);
        let opposite = Signals::new(vec![], y.negated().values().to_vec()).unwrap();
        assert_eq!(sign_vote(&y, &opposite), y.negated());
        let mut tie = y.values().to_vec();
        for x in tie.iter_mut().take(3) {
            *x = -*x;
        }
        let tied = Signals::new(vec![], tie).unwrap();
        assert_eq!(sign_vote(&y, &tied), y);
    }

    #[test]
    fn map_limits() {
        let g = build_grid(3, 4).unwrap();
        let truth = Labeling::random(g.n(), 3);
        let obs = sample_observations(&g, &truth, &NoiseParams::new(0.3, 0.3).unwrap(), 4).unwrap();
        let s = obs.signals();
        let (zero, _) = map_full_scored(&g, s, GammaWeight::new(0.0).unwrap()).unwrap();
        assert_eq!(zero, max_agreement_edges(&g, s).unwrap().score as f64);
        let big = GammaWeight::new((2 * g.num_edges() + 1) as f64).unwrap();
        assert_eq!(map_full(&g, s, big).unwrap().values(), s.nodes());
    }

    #[test]
    fn marginals_uninformative() {
        let g = build_grid(3, 3).unwrap();
        let obs = sample_observations(&g, &Labeling::random(9, 1), &NoiseParams::new(0.2, 0.2).unwrap(), 2)
            .unwrap();
        let m = marginals(&g, obs.signals(), 0.5, 0.5).unwrap();
        assert!(m.probs().iter().all(|&x| (x - 0.5).abs() < 1e-12));
        let plus = Signals::new(obs.signals().edges().to_vec(), vec![1; 9]).unwrap();
        let m = marginals(&g, &plus, 0.5, 1e-6).unwrap();
        assert!(m.probs().iter().all(|&x| x > 1.0 - 1e-5));
    }

    #[test]
    fn marginals_single_edge_by_hand() {
        let g = build_grid(1, 2).unwrap();
        let s = Signals::new(vec![1], vec![1, -1]).unwrap();
        let (p, q) = (0.1f64, 0.3f64);
        // weight(y0, y1) = edge factor * node factors
        let w = |y0: i8, y1: i8| {
            let e = if y0 == y1 { 1.0 - p } else { p };
            let n0 = if y0 == 1 { 1.0 - q } else { q };
            let n1 = if y1 == -1 { 1.0 - q } else { q };
            e * n0 * n1
        };
        let z = w(1, 1) + w(1, -1) + w(-1, 1) + w(-1, -1);
        let m = marginals(&g, &s, p, q).unwrap();
        assert!((m.get(0) - (w(1, 1) + w(1, -1)) / z).abs() < 1e-12);
        assert!((m.get(1) - (w(1, 1) + w(-1, 1)) / z).abs() < 1e-12);
    }

    #[test]
    fn predict_rule() {
        let t = MarginalTable::new(vec![0.9, 0.1, 0.5]).unwrap();
        assert_eq!(marginal_predict(&t).values(), &[1, -1, 1]);
        assert!(MarginalTable::new(vec![1.5]).is_err());
    }

    #[test]
    fn capacity_errors() {
        let tall = build_grid(23, 2).unwrap();
        let s = Signals::new(vec![1; tall.num_edges()], vec![1; tall.n()]).unwrap();
        assert!(max_agreement_edges(&tall, &s).unwrap_err().is_capacity());
        assert!(marginals(&build_grid(17, 1).unwrap(), &Signals::new(vec![1; 16], vec![1; 17]).unwrap(), 0.1, 0.1)
            .unwrap_err()
            .is_capacity());
        let g = Graph::cycle(25).unwrap();
        let s = Signals::new(vec![1; 25], vec![1; 25]).unwrap();
        assert!(max_agreement_exhaustive(&g, &s).unwrap_err().is_capacity());
    }

    #[test]
    fn exhaustive_noiseless() {
        let g = Graph::random_regular(12, 3, 1).unwrap();
        let truth = Labeling::random(12, 4);
        let obs = sample_observations(&g, &truth, &NoiseParams::new(0.0, 0.4).unwrap(), 0).unwrap();
        let first = max_agreement_exhaustive(&g, obs.signals()).unwrap();
        assert_eq!(first.score, g.num_edges() as i64);
        let mirrored = obs.mirrored();
        assert_eq!(max_agreement_exhaustive(&g, mirrored.signals()).unwrap().score, first.score);
    }
}
