use std::collections::{BTreeMap, VecDeque};

use super::region::{FilledRegion, RegionSet, TypeClass};
use super::GridGraph;
use crate::error::{Error, Result};

/// Planar dual of a grid: one vertex per interior face (a `(rows-1) x
/// (cols-1)` lattice of cells, row-major) plus the outer-face vertex `z`,
/// and one dual edge per primal edge, sharing its id. Parallel dual edges
/// occur wherever two primal edges separate the same pair of faces.
#[derive(Debug, Clone)]
pub struct DualGraph {
    cell_rows: usize,
    cell_cols: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<(usize, usize)>>,
}

impl DualGraph {
    pub fn new(grid: &GridGraph) -> Result<Self> {
        if grid.rows() < 2 || grid.cols() < 2 {
            return Err(Error::InvalidArgument(
                "dual graph needs at least a 2x2 grid".into(),
            ));
        }
        let cell_rows = grid.rows() - 1;
        let cell_cols = grid.cols() - 1;
        let z = cell_rows * cell_cols;
        let cell = |r: isize, c: isize| -> usize {
            if r < 0 || c < 0 || r >= cell_rows as isize || c >= cell_cols as isize {
                z
            } else {
                r as usize * cell_cols + c as usize
            }
        };
        let mut edges = Vec::with_capacity(grid.num_edges());
        for &(u, v) in grid.edges() {
            let (r, c) = grid.coords(u);
            let (r, c) = (r as isize, c as isize);
            let pair = if v == u + 1 {
                // horizontal: faces above and below
                (cell(r - 1, c), cell(r, c))
            } else {
                // vertical: faces left and right
                (cell(r, c - 1), cell(r, c))
            };
            edges.push(pair);
        }
        let mut adj = vec![Vec::new(); z + 1];
        for (e, &(a, b)) in edges.iter().enumerate() {
            adj[a].push((b, e));
            adj[b].push((a, e));
        }
        Ok(Self { cell_rows, cell_cols, edges, adj })
    }

    pub fn num_cells(&self) -> usize {
        self.cell_rows * self.cell_cols
    }

    /// The outer-face vertex.
    pub fn z(&self) -> usize {
        self.num_cells()
    }

    pub fn num_vertices(&self) -> usize {
        self.num_cells() + 1
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    /// Checks whether a set of dual edges (primal edge ids) forms one
    /// simple cycle.
    pub fn as_cycle(&self, edge_ids: &[usize]) -> Option<DualCycle> {
        if edge_ids.len() < 2 {
            return None;
        }
        let mut deg = vec![0usize; self.num_vertices()];
        let mut local: Vec<Vec<usize>> = vec![Vec::new(); self.num_vertices()];
        for &e in edge_ids {
            let (a, b) = *self.edges.get(e)?;
            if a == b {
                return None;
            }
            deg[a] += 1;
            deg[b] += 1;
            local[a].push(b);
            local[b].push(a);
        }
        if deg.iter().any(|&d| d != 0 && d != 2) {
            return None;
        }
        let start = deg.iter().position(|&d| d == 2)?;
        let mut seen = vec![false; self.num_vertices()];
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        let mut count = 0;
        while let Some(v) = queue.pop_front() {
            count += 1;
            for &w in &local[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        let touched = deg.iter().filter(|&&d| d == 2).count();
        (count == touched).then(|| DualCycle {
            length: edge_ids.len(),
            through_z: deg[self.z()] == 2,
        })
    }

    /// All simple cycles up to `max_len`, each as its sorted edge-id list.
    /// A cycle is reported once: from its smallest vertex, in the
    /// orientation whose first edge id is below its closing edge id.
    pub fn simple_cycles(&self, max_len: usize) -> Vec<Vec<usize>> {
        let nv = self.num_vertices();
        let mut out = Vec::new();
        let mut visited = vec![false; nv];
        let mut path = Vec::with_capacity(max_len);
        for start in 0..nv {
            let dist = self.distances_from(start);
            visited[start] = true;
            self.extend(start, start, max_len, &dist, &mut visited, &mut path, &mut out);
            visited[start] = false;
        }
        out
    }

    // BFS distances to `start` through vertices >= start.
    fn distances_from(&self, start: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.num_vertices()];
        dist[start] = 0;
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &(w, _) in &self.adj[v] {
                if w >= start && dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    #[allow(clippy::too_many_arguments)]
    fn extend(
        &self,
        start: usize,
        at: usize,
        max_len: usize,
        dist: &[usize],
        visited: &mut [bool],
        path: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        for &(w, e) in &self.adj[at] {
            if w == start {
                if let Some(&first) = path.first() {
                    if e != first && first < e {
                        let mut cycle = path.clone();
                        cycle.push(e);
                        cycle.sort_unstable();
                        out.push(cycle);
                    }
                }
                continue;
            }
            if w < start || visited[w] || path.len() + 1 + dist[w] > max_len {
                continue;
            }
            visited[w] = true;
            path.push(e);
            self.extend(start, w, max_len, dist, visited, path, out);
            path.pop();
            visited[w] = false;
        }
    }
}

/// Shape of a simple dual cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DualCycle {
    pub length: usize,
    pub through_z: bool,
}

/// Limits on exhaustive region enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationCaps {
    pub max_boundary: usize,
    pub max_rows: usize,
    pub max_cols: usize,
}

impl Default for EnumerationCaps {
    fn default() -> Self {
        Self { max_boundary: 14, max_rows: 8, max_cols: 8 }
    }
}

/// Every filled-in region whose boundary has at most `max_boundary` edges.
///
/// Filled-in sets are exactly the sides of minimal cuts whose complement
/// is 3-sided and which do not touch all four sides; minimal cuts are the
/// simple cycles of the dual graph. A cut whose two sides are both valid
/// (a straight cut across the grid) yields two regions.
pub fn enumerate_filled_regions(
    grid: &GridGraph,
    max_boundary: usize,
    caps: EnumerationCaps,
) -> Result<Vec<FilledRegion>> {
    if max_boundary > caps.max_boundary {
        return Err(Error::Capacity {
            what: "boundary budget",
            limit: caps.max_boundary,
            got: max_boundary,
        });
    }
    if grid.rows() > caps.max_rows {
        return Err(Error::Capacity { what: "grid rows", limit: caps.max_rows, got: grid.rows() });
    }
    if grid.cols() > caps.max_cols {
        return Err(Error::Capacity { what: "grid cols", limit: caps.max_cols, got: grid.cols() });
    }
    let dual = DualGraph::new(grid)?;
    let mut regions = Vec::new();
    for cycle in dual.simple_cycles(max_boundary) {
        let mut cut = vec![false; grid.num_edges()];
        for &e in &cycle {
            cut[e] = true;
        }
        let sides = split_by_cut(grid, &cut);
        debug_assert_eq!(sides.len(), 2, "a simple dual cycle is a minimal cut");
        let masks: Vec<u8> = sides.iter().map(|s| grid.sides_touched(s.iter().copied())).collect();
        for (i, side) in sides.iter().enumerate() {
            let other = masks[1 - i];
            if masks[i].count_ones() < 4 && other.count_ones() >= 3 {
                let mask = grid.mask_of(side)?;
                let origin = RegionSet::from_mask(grid, &mask)?;
                regions.push(FilledRegion {
                    filled: origin.members.clone(),
                    boundary: origin.boundary.clone(),
                    filled_type: origin.region_type,
                    origin,
                });
            }
        }
    }
    regions.sort_by(|a, b| (a.perimeter(), &a.filled).cmp(&(b.perimeter(), &b.filled)));
    Ok(regions)
}

// Components of the grid after deleting the cut edges.
fn split_by_cut(grid: &GridGraph, cut: &[bool]) -> Vec<Vec<usize>> {
    let n = grid.n();
    let mut label = vec![usize::MAX; n];
    let mut parts = Vec::new();
    for s in 0..n {
        if label[s] != usize::MAX {
            continue;
        }
        let id = parts.len();
        label[s] = id;
        let mut comp = vec![s];
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &(w, e) in grid.neighbors(v) {
                if !cut[e] && label[w] == usize::MAX {
                    label[w] = id;
                    comp.push(w);
                    queue.push_back(w);
                }
            }
        }
        comp.sort_unstable();
        parts.push(comp);
    }
    parts
}

/// Region counts keyed by `(boundary size, type class)`.
pub fn group_counts(regions: &[FilledRegion]) -> BTreeMap<(usize, TypeClass), usize> {
    let mut counts = BTreeMap::new();
    for r in regions {
        *counts.entry((r.perimeter(), r.filled_type.class())).or_insert(0) += 1;
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_grid;

    #[test]
    fn dual_shape() {
        let g = build_grid(4, 5).unwrap();
        let d = DualGraph::new(&g).unwrap();
        assert_eq!(d.num_cells(), 12);
        assert_eq!(d.edges().len(), g.num_edges());
        assert_eq!(d.degree(d.z()), g.perimeter_edge_count());
        for cell in 0..d.num_cells() {
            assert_eq!(d.degree(cell), 4);
        }
    }

    #[test]
    fn small_grid_counts() {
        let g = build_grid(4, 4).unwrap();
        let regions = enumerate_filled_regions(&g, 4, EnumerationCaps::default()).unwrap();
        let counts = group_counts(&regions);
        assert_eq!(counts.get(&(4, TypeClass::Interior)), Some(&4));
        assert_eq!(counts.get(&(3, TypeClass::Interior)), None);
        assert_eq!(counts.get(&(2, TypeClass::Perimeter)), Some(&4));
    }

    #[test]
    fn caps_enforced() {
        let g = build_grid(4, 4).unwrap();
        assert!(enumerate_filled_regions(&g, 15, EnumerationCaps::default())
            .unwrap_err()
            .is_capacity());
        let big = build_grid(9, 4).unwrap();
        assert!(enumerate_filled_regions(&big, 4, EnumerationCaps::default())
            .unwrap_err()
            .is_capacity());
    }

    #[test]
    fn cycle_recognition() {
        let g = build_grid(3, 3).unwrap();
        let d = DualGraph::new(&g).unwrap();
        let center = g.boundary(&[4]).unwrap();
        assert_eq!(d.as_cycle(&center), Some(DualCycle { length: 4, through_z: false }));
        let corner = g.boundary(&[0]).unwrap();
        assert_eq!(d.as_cycle(&corner), Some(DualCycle { length: 2, through_z: true }));
        // two disjoint unit cells' worth of edges is not a single cycle
        let g5 = build_grid(5, 5).unwrap();
        let d5 = DualGraph::new(&g5).unwrap();
        let mut two = g5.boundary(&[6]).unwrap();
        two.extend(g5.boundary(&[18]).unwrap());
        assert_eq!(d5.as_cycle(&two), None);
    }
}
