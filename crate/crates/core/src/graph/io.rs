//! Plain-text edge lists: `N M` followed by `M` lines `u v`, or the
//! one-line form `grid R C` for grids.

use std::fmt::Write as _;
use std::str::FromStr;

use super::{Graph, GridGraph};
use crate::error::{Error, Result};

/// A graph read from text, keeping grid geometry when the file declares it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParsedGraph {
    Grid(GridGraph),
    General(Graph),
}

impl ParsedGraph {
    pub fn graph(&self) -> &Graph {
        match self {
            ParsedGraph::Grid(g) => g.graph(),
            ParsedGraph::General(g) => g,
        }
    }

    pub fn as_grid(&self) -> Option<&GridGraph> {
        match self {
            ParsedGraph::Grid(g) => Some(g),
            ParsedGraph::General(_) => None,
        }
    }
}

impl Graph {
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("{} {}\n", self.n(), self.num_edges());
        for &(u, v) in self.edges() {
            writeln!(out, "{u} {v}").unwrap();
        }
        out
    }
}

impl GridGraph {
    pub fn to_grid_line(&self) -> String {
        format!("grid {} {}\n", self.rows(), self.cols())
    }
}

fn number<T: FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    tok.ok_or_else(|| Error::Parse { line, msg: format!("missing {what}") })?
        .parse()
        .map_err(|_| Error::Parse { line, msg: format!("invalid {what}") })
}

impl FromStr for ParsedGraph {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (ln, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "empty input".into() })?;
        let mut toks = header.split_whitespace();
        if header.starts_with("grid") {
            toks.next();
            let rows = number(toks.next(), ln, "rows")?;
            let cols = number(toks.next(), ln, "cols")?;
            if let Some((extra, _)) = lines.next() {
                return Err(Error::Parse { line: extra, msg: "trailing content after grid line".into() });
            }
            return Ok(ParsedGraph::Grid(GridGraph::new(rows, cols)?));
        }
        let n: usize = number(toks.next(), ln, "vertex count")?;
        let m: usize = number(toks.next(), ln, "edge count")?;
        let mut edges = Vec::with_capacity(m);
        for (ln, line) in lines {
            let mut toks = line.split_whitespace();
            let u = number(toks.next(), ln, "endpoint")?;
            let v = number(toks.next(), ln, "endpoint")?;
            if toks.next().is_some() {
                return Err(Error::Parse { line: ln, msg: "expected two endpoints".into() });
            }
            edges.push((u, v));
        }
        if edges.len() != m {
            return Err(Error::Parse {
                line: ln,
                msg: format!("header declares {m} edges, found {}", edges.len()),
            });
        }
        Ok(ParsedGraph::General(Graph::new(n, edges)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_list_round_trip() {
        let g = Graph::random_regular(10, 3, 4).unwrap();
        let text = g.to_edge_list();
        assert_eq!(text.parse::<ParsedGraph>().unwrap(), ParsedGraph::General(g));
    }

    #[test]
    fn grid_line() {
        let g = GridGraph::new(3, 4).unwrap();
        let parsed: ParsedGraph = g.to_grid_line().parse().unwrap();
        assert_eq!(parsed.as_grid(), Some(&g));
    }

    #[test]
    fn malformed() {
        assert!("3 2\n0 1\n".parse::<ParsedGraph>().is_err());
        assert!("3 1\n0 x\n".parse::<ParsedGraph>().is_err());
        assert!("grid 0 3\n".parse::<ParsedGraph>().is_err());
        assert!("".parse::<ParsedGraph>().is_err());
    }
}
