use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::SolveError;

/// Directed graph with a 2-D layout. Node ids are indices into `positions`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DirectedGraph {
    pub positions: Vec<[f64; 2]>,
    pub edges: Vec<(usize, usize)>,
    pub start: usize,
    pub goal: usize,
}

impl DirectedGraph {
    pub fn new(positions: Vec<[f64; 2]>, edges: Vec<(usize, usize)>, start: usize, goal: usize, min_separation: f64) -> Result<Self, SolveError> {
        let g = DirectedGraph { positions, edges, start, goal };
        g.check(min_separation)?;
        Ok(g)
    }

    pub fn check(&self, min_separation: f64) -> Result<(), SolveError> {
        let n = self.positions.len();
        if self.start >= n || self.goal >= n {
            return Err(SolveError::InvalidInput("start or goal is not a node".into()));
        }
        for &(a, b) in &self.edges {
            if a >= n || b >= n {
                return Err(SolveError::InvalidInput(format!("edge ({a},{b}) references a missing node")));
            }
            if a == b {
                return Err(SolveError::InvalidInput(format!("self-loop on node {a}")));
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                let (p, q) = (self.positions[i], self.positions[j]);
                let d2 = (p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2);
                if d2 < min_separation * min_separation {
                    return Err(SolveError::InvalidInput(format!("nodes {i} and {j} are closer than {min_separation}")));
                }
            }
        }
        Ok(())
    }

    pub fn node_count(&self) -> usize {
        self.positions.len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a, b))
    }

    /// Sorted out-neighbours of every node.
    pub fn successors(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.node_count()];
        for &(a, b) in &self.edges {
            out[a].push(b);
        }
        for v in &mut out {
            v.sort_unstable();
            v.dedup();
        }
        out
    }

    /// Hop counts from `from`, following edges forward (or backward when `reverse`).
    pub fn hops_from(&self, from: usize, reverse: bool) -> Vec<Option<u32>> {
        let mut adj = vec![Vec::new(); self.node_count()];
        for &(a, b) in &self.edges {
            if reverse {
                adj[b].push(a);
            } else {
                adj[a].push(b);
            }
        }
        bfs(&adj, from)
    }

    /// Hop counts when edges may be traversed either way.
    pub fn undirected_hops_from(&self, from: usize) -> Vec<Option<u32>> {
        let mut adj = vec![Vec::new(); self.node_count()];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        bfs(&adj, from)
    }
}

fn bfs(adj: &[Vec<usize>], from: usize) -> Vec<Option<u32>> {
    let mut dist = vec![None; adj.len()];
    dist[from] = Some(0);
    let mut q = VecDeque::from([from]);
    while let Some(v) = q.pop_front() {
        let d = dist[v].unwrap();
        for &w in &adj[v] {
            if dist[w].is_none() {
                dist[w] = Some(d + 1);
                q.push_back(w);
            }
        }
    }
    dist
}

/// Minimum-hop directed path. Among equal-length paths, each hop takes the
/// smallest node id that still lies on a shortest route.
pub fn digraph_shortest(g: &DirectedGraph) -> Result<Vec<usize>, SolveError> {
    g.check(0.0)?;
    let to_goal = g.hops_from(g.goal, true);
    let Some(total) = to_goal[g.start] else {
        return Err(SolveError::NoPath);
    };
    let succ = g.successors();
    let mut path = vec![g.start];
    let mut cur = g.start;
    for remaining in (0..total).rev() {
        cur = *succ[cur]
            .iter()
            .find(|&&w| to_goal[w] == Some(remaining))
            .expect("a successor one hop closer exists");
        path.push(cur);
    }
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(n: usize, edges: &[(usize, usize)], s: usize, t: usize) -> DirectedGraph {
        let pos = (0..n).map(|i| [i as f64 * 50.0, 0.0]).collect();
        DirectedGraph::new(pos, edges.to_vec(), s, t, 10.0).unwrap()
    }

    #[test]
    fn single_edge() {
        assert_eq!(digraph_shortest(&graph(2, &[(0, 1)], 0, 1)).unwrap(), vec![0, 1]);
    }

    #[test]
    fn cycle_goes_forward() {
        assert_eq!(digraph_shortest(&graph(3, &[(0, 1), (1, 2), (2, 0)], 0, 2)).unwrap(), vec![0, 1, 2]);
    }

    #[test]
    fn reverse_only_is_unreachable() {
        assert_eq!(digraph_shortest(&graph(2, &[(1, 0)], 0, 1)), Err(SolveError::NoPath));
    }

    #[test]
    fn smallest_id_tie_break() {
        let g = graph(4, &[(0, 2), (0, 1), (2, 3), (1, 3)], 0, 3);
        assert_eq!(digraph_shortest(&g).unwrap(), vec![0, 1, 3]);
    }

    #[test]
    fn rejects_self_loop_and_crowding() {
        assert!(DirectedGraph::new(vec![[0.0, 0.0], [50.0, 0.0]], vec![(0, 0)], 0, 1, 1.0).is_err());
        assert!(DirectedGraph::new(vec![[0.0, 0.0], [5.0, 0.0]], vec![(0, 1)], 0, 1, 10.0).is_err());
    }
}
