use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Largest perimeter [`count_saps`] enumerates without an explicit cap.
pub const DEFAULT_SAP_CAP: usize = 16;

/// Self-avoiding polygon counts `c[(perimeter, area)]` on the infinite
/// square lattice, up to translation.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CycleCensus {
    pub max_perimeter: usize,
    counts: BTreeMap<(usize, usize), u64>,
}

impl CycleCensus {
    pub fn from_counts(max_perimeter: usize, counts: BTreeMap<(usize, usize), u64>) -> Self {
        Self { max_perimeter, counts }
    }

    pub fn count(&self, perimeter: usize, area: usize) -> u64 {
        self.counts.get(&(perimeter, area)).copied().unwrap_or(0)
    }

    pub fn total(&self, perimeter: usize) -> u64 {
        self.counts.range((perimeter, 0)..(perimeter + 1, 0)).map(|(_, &c)| c).sum()
    }

    /// `sum_a a * c[(perimeter, a)]`.
    pub fn area_moment(&self, perimeter: usize) -> u64 {
        self.counts
            .range((perimeter, 0)..(perimeter + 1, 0))
            .map(|(&(_, a), &c)| a as u64 * c)
            .sum()
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, u64)> + '_ {
        self.counts.iter().map(|(&(i, a), &c)| (i, a, c))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("perimeter,area,count\n");
        for (i, a, c) in self.entries() {
            writeln!(out, "{i},{a},{c}").unwrap();
        }
        out
    }
}

pub fn count_saps(max_perimeter: usize) -> Result<CycleCensus> {
    count_saps_with_cap(max_perimeter, DEFAULT_SAP_CAP)
}

/// Enumerates polygons as closed self-avoiding walks rooted at their
/// lowest-then-leftmost vertex; each polygon is walked once per orientation.
pub fn count_saps_with_cap(max_perimeter: usize, cap: usize) -> Result<CycleCensus> {
    if !max_perimeter.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "polygon perimeter must be even, got {max_perimeter}"
        )));
    }
    if max_perimeter > cap {
        return Err(Error::Capacity { what: "polygon perimeter", limit: cap, got: max_perimeter });
    }
    let half = (max_perimeter / 2) as i32;
    let mut walker = Walker {
        max_len: max_perimeter,
        width: 2 * half + 1,
        half,
        visited: vec![false; ((2 * half + 1) * (half + 1)).max(1) as usize],
        raw: BTreeMap::new(),
    };
    if max_perimeter >= 4 {
        let root = walker.index(0, 0);
        walker.visited[root] = true;
        walker.walk(0, 0, 0, 0);
    }
    let counts = walker
        .raw
        .into_iter()
        .map(|(k, c)| {
            debug_assert!(c % 2 == 0);
            (k, c / 2)
        })
        .collect();
    Ok(CycleCensus { max_perimeter, counts })
}

struct Walker {
    max_len: usize,
    width: i32,
    half: i32,
    visited: Vec<bool>,
    raw: BTreeMap<(usize, usize), u64>,
}

const STEPS: [(i32, i32); 4] = [(1, 0), (0, 1), (-1, 0), (0, -1)];

impl Walker {
    fn index(&self, x: i32, y: i32) -> usize {
        (y * self.width + x + self.half) as usize
    }

    // The root (0, 0) is the lowest vertex, leftmost among the lowest:
    // every other vertex has y > 0, or y == 0 and x > 0.
    fn walk(&mut self, x: i32, y: i32, len: usize, twice_area: i64) {
        for (dx, dy) in STEPS {
            let (nx, ny) = (x + dx, y + dy);
            let area = twice_area + i64::from(x * ny - nx * y);
            if nx == 0 && ny == 0 {
                if len + 1 >= 4 {
                    let key = (len + 1, (area.unsigned_abs() / 2) as usize);
                    *self.raw.entry(key).or_insert(0) += 1;
                }
                continue;
            }
            if ny < 0 || (ny == 0 && nx < 0) {
                continue;
            }
            let back = (nx.abs() + ny) as usize;
            if len + 1 + back > self.max_len {
                continue;
            }
            let idx = self.index(nx, ny);
            if self.visited[idx] {
                continue;
            }
            self.visited[idx] = true;
            self.walk(nx, ny, len + 1, area);
            self.visited[idx] = false;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_perimeters() {
        let census = count_saps(8).unwrap();
        assert_eq!(census.total(4), 1);
        assert_eq!(census.count(4, 1), 1);
        assert_eq!(census.total(6), 2);
        assert_eq!(census.count(6, 2), 2);
        assert_eq!(census.total(8), 7);
        for i in [1, 2, 3, 5, 7] {
            assert_eq!(census.total(i), 0);
        }
    }

    #[test]
    fn rejects_odd_and_oversized() {
        assert!(count_saps(7).is_err());
        assert!(count_saps(18).unwrap_err().is_capacity());
    }

    #[test]
    fn csv_layout() {
        let csv = count_saps(6).unwrap().to_csv();
        assert_eq!(csv, "perimeter,area,count\n4,1,1\n6,2,2\n");
    }
}
