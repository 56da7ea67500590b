use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Undirected connected graph without self-loops.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawGraph", into = "RawGraph")]
pub struct GraphTopology {
    n: usize,
    edges: Vec<(usize, usize)>,
    neighbors: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct RawGraph {
    nodes: usize,
    edges: Vec<(usize, usize)>,
}

impl TryFrom<RawGraph> for GraphTopology {
    type Error = Error;
    fn try_from(raw: RawGraph) -> Result<Self> {
        GraphTopology::new(raw.nodes, raw.edges)
    }
}

impl From<GraphTopology> for RawGraph {
    fn from(g: GraphTopology) -> Self {
        RawGraph {
            nodes: g.n,
            edges: g.edges,
        }
    }
}

impl GraphTopology {
    /// Edges are undirected; repeats in either orientation are merged.
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInstance("graph needs at least one node".into()));
        }
        let mut neighbors = vec![Vec::new(); n];
        let mut kept = Vec::new();
        for (a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::InvalidInstance(format!("edge ({a}, {b}) out of range")));
            }
            if a == b {
                return Err(Error::InvalidInstance(format!("self-loop at node {a}")));
            }
            let e = (a.min(b), a.max(b));
            if !kept.contains(&e) {
                kept.push(e);
                neighbors[a].push(b);
                neighbors[b].push(a);
            }
        }
        for nb in &mut neighbors {
            nb.sort_unstable();
        }
        kept.sort_unstable();
        let g = Self {
            n,
            edges: kept,
            neighbors,
        };
        if !g.is_connected() {
            return Err(Error::InvalidInstance("graph is not connected".into()));
        }
        Ok(g)
    }

    pub fn cycle(n: usize) -> Result<Self> {
        let edges = if n < 2 {
            Vec::new()
        } else {
            (0..n).map(|i| (i, (i + 1) % n)).collect()
        };
        Self::new(n, edges)
    }

    pub fn path(n: usize) -> Result<Self> {
        Self::new(n, (1..n).map(|i| (i - 1, i)).collect())
    }

    fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(i) = stack.pop() {
            for &j in &self.neighbors[i] {
                if !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Undirected edges `(i, j)` with `i < j`, sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[i]
    }

    /// Ordered neighbor pairs `(i, j)` in lexicographic order; one consensus
    /// queue per pair.
    pub fn ordered_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(2 * self.edges.len());
        for i in 0..self.n {
            for &j in &self.neighbors[i] {
                out.push((i, j));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_graphs() {
        assert!(GraphTopology::new(3, vec![(0, 1)]).is_err());
        assert!(GraphTopology::new(2, vec![(0, 0), (0, 1)]).is_err());
        assert!(GraphTopology::new(2, vec![(0, 2)]).is_err());
        assert!(GraphTopology::new(0, vec![]).is_err());
    }

    #[test]
    fn cycle_pairs() {
        let g = GraphTopology::cycle(4).unwrap();
        assert_eq!(g.edges().len(), 4);
        assert_eq!(g.neighbors(0), &[1, 3]);
        let pairs = g.ordered_pairs();
        assert_eq!(pairs.len(), 8);
        assert!(pairs.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(GraphTopology::cycle(1).unwrap().ordered_pairs().len(), 0);
    }

    #[test]
    fn merges_duplicate_edges() {
        let g = GraphTopology::new(2, vec![(0, 1), (1, 0)]).unwrap();
        assert_eq!(g.edges(), &[(0, 1)]);
    }
}
