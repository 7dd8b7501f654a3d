//! Graphs, grid geometry and the combinatorial machinery built on them:
//! boundaries, region classification, filled-in sets, dual cycles,
//! polygon census, expansion constant and global minimum cut.

mod dual;
mod io;
mod region;
mod sap;

use std::collections::{HashSet, VecDeque};
use std::ops::Deref;

use num_rational::Ratio;
use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::rng::{self, Stream};

pub use dual::{enumerate_filled_regions, group_counts, DualCycle, DualGraph, EnumerationCaps};
pub use io::ParsedGraph;
pub use region::{classify_region, fill_in, FilledRegion, RegionSet, RegionType, Side, TypeClass};
pub use sap::{count_saps, count_saps_with_cap, CycleCensus, DEFAULT_SAP_CAP};

/// Largest vertex count accepted by [`expansion_constant`].
pub const EXPANSION_CAP: usize = 20;

/// A simple undirected graph with edges identified by their insertion index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<(usize, usize)>>,
}

impl Graph {
    /// Builds a graph, rejecting self-loops, parallel edges and
    /// out-of-range endpoints. Edge endpoints are stored as `(min, max)`.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut seen = HashSet::new();
        let mut list = Vec::new();
        let mut adj = vec![Vec::new(); n];
        for (u, v) in edges {
            for w in [u, v] {
                if w >= n {
                    return Err(Error::VertexOutOfRange { vertex: w, n });
                }
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop at vertex {u}")));
            }
            let key = (u.min(v), u.max(v));
            if !seen.insert(key) {
                return Err(Error::InvalidGraph(format!("parallel edge {} {}", key.0, key.1)));
            }
            let id = list.len();
            list.push(key);
            adj[key.0].push((key.1, id));
            adj[key.1].push((key.0, id));
        }
        Ok(Self { n, edges: list, adj })
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
        Self::new(n, edges).expect("complete graph is simple")
    }

    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidGraph(format!("cycle needs at least 3 vertices, got {n}")));
        }
        Self::new(n, (0..n).map(|v| (v, (v + 1) % n)))
    }

    /// Uniform-ish random connected `d`-regular graph from the pairing model,
    /// retrying until the pairing is simple and connected.
    pub fn random_regular(n: usize, d: usize, seed: u64) -> Result<Self> {
        if d >= n || !(n * d).is_multiple_of(2) || d == 0 {
            return Err(Error::InvalidArgument(format!(
                "no simple {d}-regular graph on {n} vertices"
            )));
        }
        let mut rng = rng::sequential(seed, Stream::Graph);
        let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, d)).collect();
        'attempt: for _ in 0..100_000 {
            stubs.shuffle(&mut rng);
            let mut seen = HashSet::new();
            for pair in stubs.chunks_exact(2) {
                let (u, v) = (pair[0], pair[1]);
                if u == v || !seen.insert((u.min(v), u.max(v))) {
                    continue 'attempt;
                }
            }
            let g = Self::new(n, stubs.chunks_exact(2).map(|p| (p[0], p[1])))?;
            if g.is_connected() {
                return Ok(g);
            }
        }
        Err(Error::InvalidArgument(format!(
            "failed to sample a connected {d}-regular graph on {n} vertices"
        )))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> (usize, usize) {
        self.edges[id]
    }

    /// `(neighbor, edge id)` pairs incident to `v`.
    pub fn neighbors(&self, v: usize) -> &[(usize, usize)] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn edge_id(&self, u: usize, v: usize) -> Option<usize> {
        self.adj.get(u)?.iter().find(|&&(w, _)| w == v).map(|&(_, e)| e)
    }

    /// The common degree if every vertex has the same degree.
    pub fn regular_degree(&self) -> Option<usize> {
        let d = self.adj.first().map_or(0, Vec::len);
        self.adj.iter().all(|a| a.len() == d).then_some(d)
    }

    pub fn is_connected(&self) -> bool {
        self.n == 0 || self.components(&vec![true; self.n]).len() == 1
    }

    /// Connected components of the subgraph induced by `mask`, each sorted,
    /// ordered by their smallest vertex.
    pub fn components(&self, mask: &[bool]) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        let mut queue = VecDeque::new();
        for start in 0..self.n {
            if !mask[start] || seen[start] {
                continue;
            }
            seen[start] = true;
            queue.push_back(start);
            let mut comp = Vec::new();
            while let Some(v) = queue.pop_front() {
                comp.push(v);
                for &(w, _) in &self.adj[v] {
                    if mask[w] && !seen[w] {
                        seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Membership mask for a vertex list, validating the range.
    pub fn mask_of(&self, set: &[usize]) -> Result<Vec<bool>> {
        let mut mask = vec![false; self.n];
        for &v in set {
            if v >= self.n {
                return Err(Error::VertexOutOfRange { vertex: v, n: self.n });
            }
            mask[v] = true;
        }
        Ok(mask)
    }

    /// Edges with exactly one endpoint in `set`, sorted by edge id.
    pub fn boundary(&self, set: &[usize]) -> Result<Vec<usize>> {
        Ok(self.boundary_of_mask(&self.mask_of(set)?))
    }

    pub fn boundary_of_mask(&self, mask: &[bool]) -> Vec<usize> {
        self.edges
            .iter()
            .enumerate()
            .filter(|(_, &(u, v))| mask[u] != mask[v])
            .map(|(e, _)| e)
            .collect()
    }

    /// Value of the global minimum edge cut (Stoer-Wagner).
    pub fn min_cut(&self) -> Result<usize> {
        if self.n < 2 {
            return Err(Error::InvalidGraph("minimum cut needs at least 2 vertices".into()));
        }
        if !self.is_connected() {
            return Err(Error::Disconnected);
        }
        let n = self.n;
        let mut w = vec![vec![0usize; n]; n];
        for &(u, v) in &self.edges {
            w[u][v] += 1;
            w[v][u] += 1;
        }
        let mut active: Vec<usize> = (0..n).collect();
        let mut best = usize::MAX;
        while active.len() > 1 {
            let mut added = vec![false; n];
            let mut key = vec![0usize; n];
            let mut prev = active[0];
            let mut last = active[0];
            for step in 0..active.len() {
                let next = *active
                    .iter()
                    .filter(|&&v| !added[v])
                    .max_by(|&&a, &&b| key[a].cmp(&key[b]).then(b.cmp(&a)))
                    .expect("an unadded vertex remains");
                added[next] = true;
                if step + 1 == active.len() {
                    best = best.min(key[next]);
                    prev = last;
                    last = next;
                } else {
                    last = next;
                    for &v in &active {
                        if !added[v] {
                            key[v] += w[next][v];
                        }
                    }
                }
            }
            // merge `last` into `prev`
            for &v in &active {
                w[prev][v] += w[last][v];
                w[v][prev] = w[prev][v];
            }
            w[prev][prev] = 0;
            active.retain(|&v| v != last);
        }
        Ok(best)
    }
}

/// Exact expansion constant `min |δ(S)| / (d |S|)` over non-empty `S` with
/// `|S| <= N/2`, by enumeration of all vertex subsets.
pub fn expansion_constant(g: &Graph) -> Result<Ratio<usize>> {
    expansion_constant_with_cap(g, EXPANSION_CAP)
}

pub fn expansion_constant_with_cap(g: &Graph, cap: usize) -> Result<Ratio<usize>> {
    let n = g.n();
    if n > cap.min(63) {
        return Err(Error::Capacity { what: "vertex count for expansion search", limit: cap, got: n });
    }
    if n < 2 {
        return Err(Error::InvalidGraph("expansion needs at least 2 vertices".into()));
    }
    let d = g.regular_degree().ok_or(Error::NotRegular)?;
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let adj: Vec<u64> = (0..n)
        .map(|v| g.neighbors(v).iter().fold(0u64, |m, &(w, _)| m | (1 << w)))
        .collect();
    let mut best: Option<Ratio<usize>> = None;
    for set in 1u64..(1u64 << n) {
        let size = set.count_ones() as usize;
        if 2 * size > n {
            continue;
        }
        let mut cut = 0usize;
        let mut rest = set;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            cut += (adj[v] & !set).count_ones() as usize;
        }
        let ratio = Ratio::new(cut, d * size);
        if best.is_none_or(|b| ratio < b) {
            best = Some(ratio);
        }
    }
    Ok(best.expect("n >= 2 admits a singleton"))
}

/// A rows x cols grid with row-major vertex numbering from the top-left.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridGraph {
    rows: usize,
    cols: usize,
    graph: Graph,
    right: Vec<Option<usize>>,
    down: Vec<Option<usize>>,
}

impl GridGraph {
    pub fn new(rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyGrid { rows, cols });
        }
        let n = rows * cols;
        let mut edges = Vec::with_capacity(rows * (cols - 1) + cols * (rows - 1));
        let mut right = vec![None; n];
        let mut down = vec![None; n];
        for r in 0..rows {
            for c in 0..cols {
                let v = r * cols + c;
                if c + 1 < cols {
                    right[v] = Some(edges.len());
                    edges.push((v, v + 1));
                }
                if r + 1 < rows {
                    down[v] = Some(edges.len());
                    edges.push((v, v + cols));
                }
            }
        }
        let graph = Graph::new(n, edges)?;
        Ok(Self { rows, cols, graph, right, down })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn vertex(&self, r: usize, c: usize) -> usize {
        debug_assert!(r < self.rows && c < self.cols);
        r * self.cols + c
    }

    pub fn coords(&self, v: usize) -> (usize, usize) {
        (v / self.cols, v % self.cols)
    }

    /// Edge between `(r, c)` and `(r, c + 1)`.
    pub fn right_edge(&self, r: usize, c: usize) -> Option<usize> {
        self.right[self.vertex(r, c)]
    }

    /// Edge between `(r, c)` and `(r + 1, c)`.
    pub fn down_edge(&self, r: usize, c: usize) -> Option<usize> {
        self.down[self.vertex(r, c)]
    }

    /// Perimeter sides a vertex lies on, as a bitmask over [`Side`].
    /// Corners lie on both of their sides.
    pub fn sides_of(&self, v: usize) -> u8 {
        let (r, c) = self.coords(v);
        let mut m = 0;
        if r == 0 {
            m |= Side::Top.bit();
        }
        if r + 1 == self.rows {
            m |= Side::Bottom.bit();
        }
        if c == 0 {
            m |= Side::Left.bit();
        }
        if c + 1 == self.cols {
            m |= Side::Right.bit();
        }
        m
    }

    pub fn sides_touched(&self, set: impl IntoIterator<Item = usize>) -> u8 {
        set.into_iter().fold(0, |m, v| m | self.sides_of(v))
    }

    /// Number of perimeter edges (both endpoints on the same side).
    pub fn perimeter_edge_count(&self) -> usize {
        self.graph
            .edges()
            .iter()
            .filter(|&&(u, v)| self.sides_of(u) & self.sides_of(v) != 0)
            .count()
    }
}

impl Deref for GridGraph {
    type Target = Graph;

    fn deref(&self) -> &Graph {
        &self.graph
    }
}

impl AsRef<Graph> for GridGraph {
    fn as_ref(&self) -> &Graph {
        &self.graph
    }
}

impl AsRef<Graph> for Graph {
    fn as_ref(&self) -> &Graph {
        self
    }
}

/// Builds the `rows x cols` grid.
pub fn build_grid(rows: usize, cols: usize) -> Result<GridGraph> {
    GridGraph::new(rows, cols)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_sizes() {
        for (r, c, n, m) in [(2, 2, 4, 4), (3, 3, 9, 12), (20, 20, 400, 760), (1, 5, 5, 4)] {
            let g = build_grid(r, c).unwrap();
            assert_eq!(g.n(), n);
            assert_eq!(g.num_edges(), m);
        }
        assert_eq!(build_grid(0, 3), Err(Error::EmptyGrid { rows: 0, cols: 3 }));
    }

    #[test]
    fn grid_degrees() {
        let g = build_grid(5, 7).unwrap();
        let degs: Vec<usize> = (0..g.n()).map(|v| g.degree(v)).collect();
        assert!(degs.iter().all(|d| (2..=4).contains(d)));
        assert_eq!(degs.iter().filter(|&&d| d == 2).count(), 4);
    }

    #[test]
    fn boundary_examples() {
        let g = build_grid(3, 3).unwrap();
        assert_eq!(g.boundary(&[4]).unwrap().len(), 4);
        assert_eq!(g.boundary(&[0]).unwrap().len(), 2);
        let all: Vec<usize> = (0..9).collect();
        assert!(g.boundary(&all).unwrap().is_empty());
        assert!(g.boundary(&[9]).is_err());
    }

    #[test]
    fn rejects_bad_edges() {
        assert!(Graph::new(3, [(0, 0)]).is_err());
        assert!(Graph::new(3, [(0, 1), (1, 0)]).is_err());
        assert!(Graph::new(3, [(0, 3)]).is_err());
    }

    #[test]
    fn expansion_examples() {
        assert_eq!(expansion_constant(&Graph::complete(4)).unwrap(), Ratio::new(2, 3));
        assert_eq!(expansion_constant(&Graph::cycle(4).unwrap()).unwrap(), Ratio::new(1, 2));
        let two_triangles = Graph::new(6, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]).unwrap();
        assert_eq!(expansion_constant(&two_triangles), Err(Error::Disconnected));
        let path = Graph::new(3, [(0, 1), (1, 2)]).unwrap();
        assert_eq!(expansion_constant(&path), Err(Error::NotRegular));
        assert!(expansion_constant(&Graph::cycle(21).unwrap()).unwrap_err().is_capacity());
    }

    #[test]
    fn min_cut_examples() {
        for n in 2..7 {
            assert_eq!(build_grid(n, n).unwrap().min_cut().unwrap(), 2);
        }
        assert_eq!(Graph::complete(4).min_cut().unwrap(), 3);
        assert_eq!(Graph::cycle(6).unwrap().min_cut().unwrap(), 2);
        let bridge = Graph::new(6, [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 5), (5, 3)]).unwrap();
        assert_eq!(bridge.min_cut().unwrap(), 1);
        let split = Graph::new(4, [(0, 1), (2, 3)]).unwrap();
        assert_eq!(split.min_cut(), Err(Error::Disconnected));
    }

    #[test]
    fn random_regular_is_regular_and_connected() {
        for seed in 0..20 {
            let g = Graph::random_regular(14, 3, seed).unwrap();
            assert_eq!(g.regular_degree(), Some(3));
            assert!(g.is_connected());
            assert_eq!(g.num_edges(), 21);
        }
        assert!(Graph::random_regular(5, 3, 0).is_err());
    }

    #[test]
    fn perimeter_edges() {
        let g = build_grid(4, 6).unwrap();
        assert_eq!(g.perimeter_edge_count(), 2 * (3 + 5));
    }
}
