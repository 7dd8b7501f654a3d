//! Ground truths, the noisy observation process and error metrics.

use std::fmt;
use std::fmt::Write as _;
use std::ops::Neg;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graph::{Graph, GridGraph};
use crate::rng::{KeyedDraws, Stream};

/// An assignment of `±1` to every vertex.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Labeling(Vec<i8>);

impl Labeling {
    pub fn new(values: Vec<i8>) -> Result<Self> {
        if let Some(&bad) = values.iter().find(|&&x| x != 1 && x != -1) {
            return Err(Error::InvalidLabel(i64::from(bad)));
        }
        Ok(Self(values))
    }

    pub(crate) fn from_vec_unchecked(values: Vec<i8>) -> Self {
        debug_assert!(values.iter().all(|&x| x == 1 || x == -1));
        Self(values)
    }

    pub fn all_plus(n: usize) -> Self {
        Self(vec![1; n])
    }

    /// Independent uniform labels.
    pub fn random(n: usize, seed: u64) -> Self {
        let mut draws = KeyedDraws::new(seed, Stream::Truth);
        Self((0..n as u64).map(|v| draws.sign(v)).collect())
    }

    pub fn values(&self) -> &[i8] {
        &self.0
    }

    pub fn get(&self, v: usize) -> i8 {
        self.0[v]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn negated(&self) -> Self {
        Self(self.0.iter().map(|&x| -x).collect())
    }

    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.0.len() * 3);
        for &x in &self.0 {
            out.push_str(if x > 0 { "+1\n" } else { "-1\n" });
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let values = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(i, l)| {
                l.trim().parse::<i8>().map_err(|_| Error::Parse { line: i + 1, msg: "expected ±1".into() })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(values)
    }
}

impl Neg for &Labeling {
    type Output = Labeling;

    fn neg(self) -> Labeling {
        self.negated()
    }
}

/// Number of positions where `pred` and `truth` differ.
pub fn hamming_error(pred: &Labeling, truth: &Labeling) -> Result<usize> {
    check_len(truth.len(), pred.len())?;
    Ok(pred.0.iter().zip(&truth.0).filter(|(a, b)| a != b).count())
}

/// Error of the better of `pred` and `-pred`.
pub fn sign_symmetric_error(pred: &Labeling, truth: &Labeling) -> Result<usize> {
    let h = hamming_error(pred, truth)?;
    Ok(h.min(truth.len() - h))
}

fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

/// Chessboard prior: black cells (`r + c` even) are `+1`, white cells are
/// independent uniform signs.
pub fn checkerboard_truth(grid: &GridGraph, seed: u64) -> Labeling {
    let mut draws = KeyedDraws::new(seed, Stream::Truth);
    let values = (0..grid.n())
        .map(|v| if is_black(grid, v) { 1 } else { draws.sign(v as u64) })
        .collect();
    Labeling(values)
}

pub fn is_black(grid: &GridGraph, v: usize) -> bool {
    let (r, c) = grid.coords(v);
    (r + c) % 2 == 0
}

/// What the adversary gets to see when labeling corrupted elements.
pub struct AdversaryView<'a> {
    pub graph: &'a Graph,
    pub truth: &'a Labeling,
    pub bad_edges: &'a [usize],
    pub bad_nodes: &'a [usize],
    pub seed: u64,
}

/// Chooses observation labels for corrupted elements. Which elements are
/// corrupted is decided before the rule is consulted.
pub trait AdversaryRule: Send + Sync {
    fn edge_label(&self, view: &AdversaryView<'_>, edge: usize) -> i8;
    fn node_label(&self, view: &AdversaryView<'_>, vertex: usize) -> i8;
}

/// Labels every bad element inconsistently with the truth.
#[derive(Debug, Clone, Copy, Default)]
pub struct ConsistentFlip;

impl AdversaryRule for ConsistentFlip {
    fn edge_label(&self, view: &AdversaryView<'_>, edge: usize) -> i8 {
        let (u, v) = view.graph.edge(edge);
        -(view.truth.get(u) * view.truth.get(v))
    }

    fn node_label(&self, view: &AdversaryView<'_>, vertex: usize) -> i8 {
        -view.truth.get(vertex)
    }
}

/// Labels bad elements as if they were good.
#[derive(Debug, Clone, Copy, Default)]
pub struct Truthful;

impl AdversaryRule for Truthful {
    fn edge_label(&self, view: &AdversaryView<'_>, edge: usize) -> i8 {
        let (u, v) = view.graph.edge(edge);
        view.truth.get(u) * view.truth.get(v)
    }

    fn node_label(&self, view: &AdversaryView<'_>, vertex: usize) -> i8 {
        view.truth.get(vertex)
    }
}

/// Labels bad elements with fresh uniform signs.
#[derive(Debug, Clone, Copy, Default)]
pub struct RandomLabels;

impl AdversaryRule for RandomLabels {
    fn edge_label(&self, view: &AdversaryView<'_>, edge: usize) -> i8 {
        KeyedDraws::new(view.seed, Stream::Adversary).sign(2 * edge as u64)
    }

    fn node_label(&self, view: &AdversaryView<'_>, vertex: usize) -> i8 {
        KeyedDraws::new(view.seed, Stream::Adversary).sign(2 * vertex as u64 + 1)
    }
}

#[derive(Clone, Default)]
pub enum AdversaryMode {
    #[default]
    ConsistentFlip,
    Pluggable(Arc<dyn AdversaryRule>),
}

impl fmt::Debug for AdversaryMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AdversaryMode::ConsistentFlip => f.write_str("ConsistentFlip"),
            AdversaryMode::Pluggable(_) => f.write_str("Pluggable(..)"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct NoiseParams {
    pub p: f64,
    pub q: f64,
    pub adversary: AdversaryMode,
}

impl NoiseParams {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        Self::with_adversary(p, q, AdversaryMode::ConsistentFlip)
    }

    pub fn with_adversary(p: f64, q: f64, adversary: AdversaryMode) -> Result<Self> {
        check_probability("p", p)?;
        check_probability("q", q)?;
        Ok(Self { p, q, adversary })
    }
}

pub(crate) fn check_probability(name: &'static str, value: f64) -> Result<()> {
    if !(0.0..=0.5).contains(&value) {
        return Err(Error::InvalidProbability { name, value });
    }
    Ok(())
}

/// The observation maps inference is allowed to see.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signals {
    edges: Vec<i8>,
    nodes: Vec<i8>,
}

impl Signals {
    pub fn new(edges: Vec<i8>, nodes: Vec<i8>) -> Result<Self> {
        for &x in edges.iter().chain(&nodes) {
            if x != 1 && x != -1 {
                return Err(Error::InvalidLabel(i64::from(x)));
            }
        }
        Ok(Self { edges, nodes })
    }

    pub fn edge(&self, e: usize) -> i8 {
        self.edges[e]
    }

    pub fn node(&self, v: usize) -> i8 {
        self.nodes[v]
    }

    pub fn edges(&self) -> &[i8] {
        &self.edges
    }

    pub fn nodes(&self) -> &[i8] {
        &self.nodes
    }

    /// Checks the signal vectors against a graph's shape.
    pub fn check_shape(&self, g: &Graph) -> Result<()> {
        check_len(g.n(), self.nodes.len())?;
        check_len(g.num_edges(), self.edges.len())
    }

    /// Same edge signals with every node signal negated: the observations a
    /// globally flipped truth produces under the same corruption pattern.
    pub fn with_negated_nodes(&self) -> Self {
        Self { edges: self.edges.clone(), nodes: self.nodes.iter().map(|&x| -x).collect() }
    }

    /// Lines `node v x` followed by `edge u v x`.
    pub fn to_text(&self, g: &Graph) -> String {
        let mut out = String::new();
        for (v, &x) in self.nodes.iter().enumerate() {
            writeln!(out, "node {v} {x}").unwrap();
        }
        for (e, &x) in self.edges.iter().enumerate() {
            let (u, v) = g.edge(e);
            writeln!(out, "edge {u} {v} {x}").unwrap();
        }
        out
    }

    /// Parses the text form, requiring exactly one observation per vertex
    /// and per edge of `g`.
    pub fn parse(text: &str, g: &Graph) -> Result<Self> {
        let mut nodes = vec![0i8; g.n()];
        let mut edges = vec![0i8; g.num_edges()];
        for (i, line) in text.lines().enumerate() {
            let ln = i + 1;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            let err = |msg: &str| Error::Parse { line: ln, msg: msg.into() };
            let int = |s: &str| s.parse::<i64>().map_err(|_| err("invalid integer"));
            let sign = |s: &str| match int(s)? {
                1 => Ok(1i8),
                -1 => Ok(-1i8),
                _ => Err(err("observation must be +1 or -1")),
            };
            let index = |s: &str, n: usize| {
                usize::try_from(int(s)?).ok().filter(|&v| v < n).ok_or_else(|| err("vertex out of range"))
            };
            match toks.as_slice() {
                ["node", v, x] => {
                    let v = index(v, g.n())?;
                    if nodes[v] != 0 {
                        return Err(err("duplicate node observation"));
                    }
                    nodes[v] = sign(x)?;
                }
                ["edge", u, v, x] => {
                    let (u, v) = (index(u, g.n())?, index(v, g.n())?);
                    let e = g.edge_id(u, v).ok_or_else(|| err("no such edge"))?;
                    if edges[e] != 0 {
                        return Err(err("duplicate edge observation"));
                    }
                    edges[e] = sign(x)?;
                }
                _ => return Err(err("expected `node v x` or `edge u v x`")),
            }
        }
        if let Some(v) = nodes.iter().position(|&x| x == 0) {
            return Err(Error::Parse { line: 0, msg: format!("missing observation for node {v}") });
        }
        if let Some(e) = edges.iter().position(|&x| x == 0) {
            let (u, v) = g.edge(e);
            return Err(Error::Parse { line: 0, msg: format!("missing observation for edge {u} {v}") });
        }
        Ok(Self { edges, nodes })
    }
}

/// One sampled instance: the signals plus the realized corruption sets.
/// Inference only ever receives [`Signals`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Observations {
    signals: Signals,
    bad_edges: Vec<usize>,
    bad_nodes: Vec<usize>,
}

impl Observations {
    pub fn signals(&self) -> &Signals {
        &self.signals
    }

    pub fn bad_edges(&self) -> &[usize] {
        &self.bad_edges
    }

    pub fn bad_nodes(&self) -> &[usize] {
        &self.bad_nodes
    }

    pub fn bad_edge_mask(&self, num_edges: usize) -> Vec<bool> {
        let mut mask = vec![false; num_edges];
        for &e in &self.bad_edges {
            mask[e] = true;
        }
        mask
    }

    /// The instance a negated truth yields under the same corruption.
    pub fn mirrored(&self) -> Self {
        Self {
            signals: self.signals.with_negated_nodes(),
            bad_edges: self.bad_edges.clone(),
            bad_nodes: self.bad_nodes.clone(),
        }
    }
}

/// Samples corruption (edges with probability `p`, nodes with `q`) keyed by
/// element id, labels good elements from the truth and hands bad ones to
/// the adversary.
pub fn sample_observations(
    g: &Graph,
    truth: &Labeling,
    params: &NoiseParams,
    seed: u64,
) -> Result<Observations> {
    check_len(g.n(), truth.len())?;
    check_probability("p", params.p)?;
    check_probability("q", params.q)?;
    let mut edge_draws = KeyedDraws::new(seed, Stream::EdgeCorruption);
    let mut node_draws = KeyedDraws::new(seed, Stream::NodeCorruption);
    let bad_edges: Vec<usize> =
        (0..g.num_edges()).filter(|&e| edge_draws.bernoulli(e as u64, params.p)).collect();
    let bad_nodes: Vec<usize> = (0..g.n()).filter(|&v| node_draws.bernoulli(v as u64, params.q)).collect();

    let mut edges: Vec<i8> = g.edges().iter().map(|&(u, v)| truth.get(u) * truth.get(v)).collect();
    let mut nodes: Vec<i8> = truth.values().to_vec();
    let view = AdversaryView { graph: g, truth, bad_edges: &bad_edges, bad_nodes: &bad_nodes, seed };
    let rule: &dyn AdversaryRule = match &params.adversary {
        AdversaryMode::ConsistentFlip => &ConsistentFlip,
        AdversaryMode::Pluggable(rule) => rule.as_ref(),
    };
    for &e in &bad_edges {
        edges[e] = rule.edge_label(&view, e).signum();
    }
    for &v in &bad_nodes {
        nodes[v] = rule.node_label(&view, v).signum();
    }
    let signals = Signals::new(edges, nodes)?;
    Ok(Observations { signals, bad_edges, bad_nodes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_grid;

    #[test]
    fn noiseless_matches_truth() {
        let g = build_grid(4, 5).unwrap();
        let truth = Labeling::random(g.n(), 3);
        let obs = sample_observations(&g, &truth, &NoiseParams::new(0.0, 0.0).unwrap(), 9).unwrap();
        for (e, &(u, v)) in g.edges().iter().enumerate() {
            assert_eq!(obs.signals().edge(e), truth.get(u) * truth.get(v));
        }
        assert_eq!(obs.signals().nodes(), truth.values());
        assert!(obs.bad_edges().is_empty() && obs.bad_nodes().is_empty());
    }

    #[test]
    fn deterministic_per_seed() {
        let g = build_grid(6, 6).unwrap();
        let truth = Labeling::all_plus(g.n());
        let params = NoiseParams::new(0.2, 0.3).unwrap();
        let a = sample_observations(&g, &truth, &params, 42).unwrap();
        let b = sample_observations(&g, &truth, &params, 42).unwrap();
        let c = sample_observations(&g, &truth, &params, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn dimension_mismatch() {
        let g = build_grid(2, 2).unwrap();
        let truth = Labeling::all_plus(5);
        let err = sample_observations(&g, &truth, &NoiseParams::new(0.1, 0.1).unwrap(), 0);
        assert_eq!(err, Err(Error::DimensionMismatch { expected: 4, got: 5 }));
        assert!(NoiseParams::new(0.6, 0.1).is_err());
        assert!(NoiseParams::new(0.1, -0.1).is_err());
    }

    #[test]
    fn checkerboard_structure() {
        let g = build_grid(2, 2).unwrap();
        for seed in 0..10 {
            let y = checkerboard_truth(&g, seed);
            assert_eq!(y.get(0), 1);
            assert_eq!(y.get(3), 1);
        }
        let big = build_grid(7, 9).unwrap();
        let a = checkerboard_truth(&big, 5);
        assert_eq!(a, checkerboard_truth(&big, 5));
        assert!((0..big.n()).filter(|&v| is_black(&big, v)).all(|v| a.get(v) == 1));
        let whites: Vec<i8> = (0..big.n()).filter(|&v| !is_black(&big, v)).map(|v| a.get(v)).collect();
        assert!(whites.contains(&1) && whites.contains(&-1));
    }

    #[test]
    fn error_metrics() {
        let t = Labeling::random(9, 1);
        assert_eq!(hamming_error(&t, &t).unwrap(), 0);
        assert_eq!(hamming_error(&t.negated(), &t).unwrap(), 9);
        let mut v = t.values().to_vec();
        v[0] = -v[0];
        v[4] = -v[4];
        let two = Labeling::new(v).unwrap();
        assert_eq!(hamming_error(&two, &t).unwrap(), 2);
        assert_eq!(sign_symmetric_error(&t.negated(), &t).unwrap(), 0);
        assert_eq!(sign_symmetric_error(&t, &t).unwrap(), 0);
        let seven = two.negated();
        assert_eq!(hamming_error(&seven, &t).unwrap(), 7);
        assert_eq!(sign_symmetric_error(&seven, &t).unwrap(), 2);
        assert!(hamming_error(&Labeling::all_plus(3), &t).is_err());
        assert!(Labeling::new(vec![1, 0]).is_err());
    }

    #[test]
    fn signals_text_round_trip() {
        let g = build_grid(3, 4).unwrap();
        let truth = Labeling::random(g.n(), 8);
        let obs = sample_observations(&g, &truth, &NoiseParams::new(0.3, 0.3).unwrap(), 1).unwrap();
        let text = obs.signals().to_text(&g);
        assert_eq!(&Signals::parse(&text, &g).unwrap(), obs.signals());
        assert!(Signals::parse("node 0 1\n", &g).is_err());
        assert!(Signals::parse(&text.replace("node 0 ", "node 0 2 "), &g).is_err());
    }

    #[test]
    fn pluggable_adversary_keeps_corruption() {
        let g = build_grid(5, 5).unwrap();
        let truth = Labeling::random(g.n(), 2);
        let flip = NoiseParams::new(0.25, 0.25).unwrap();
        let honest =
            NoiseParams::with_adversary(0.25, 0.25, AdversaryMode::Pluggable(Arc::new(Truthful))).unwrap();
        let a = sample_observations(&g, &truth, &flip, 17).unwrap();
        let b = sample_observations(&g, &truth, &honest, 17).unwrap();
        assert_eq!(a.bad_edges(), b.bad_edges());
        assert_eq!(a.bad_nodes(), b.bad_nodes());
        assert_eq!(b.signals().nodes(), truth.values());
    }
}
