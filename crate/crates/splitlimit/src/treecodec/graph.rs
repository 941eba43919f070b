//! Simple undirected graphs on vertices `0..n`.

use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;

/// Simple undirected graph with sorted adjacency lists.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Graph {
    adj: Vec<Vec<u32>>,
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    n: usize,
    edges: Vec<[u32; 2]>,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Graph {
            adj: vec![Vec::new(); n],
        }
    }

    pub fn from_edges(n: usize, edges: &[(u32, u32)]) -> Result<Self> {
        let mut g = Graph::new(n);
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Graph::new(n);
        for u in 0..n as u32 {
            for v in u + 1..n as u32 {
                g.add_edge(u, v).unwrap();
            }
        }
        g
    }

    pub fn path(n: usize) -> Self {
        let mut g = Graph::new(n);
        for v in 1..n as u32 {
            g.add_edge(v - 1, v).unwrap();
        }
        g
    }

    pub fn cycle(n: usize) -> Self {
        let mut g = Graph::path(n);
        if n >= 3 {
            g.add_edge(0, n as u32 - 1).unwrap();
        }
        g
    }

    /// Adds `{u, v}`; repeated edges are ignored, loops rejected.
    pub fn add_edge(&mut self, u: u32, v: u32) -> Result<()> {
        let n = self.adj.len() as u32;
        if u == v || u >= n || v >= n {
            return Err(Error::Invalid(format!("bad edge {{{u}, {v}}} on {n} vertices")));
        }
        for (a, b) in [(u, v), (v, u)] {
            let row = &mut self.adj[a as usize];
            if let Err(pos) = row.binary_search(&b) {
                row.insert(pos, b);
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.adj[v as usize]
    }

    pub fn degree(&self, v: u32) -> usize {
        self.adj[v as usize].len()
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        self.adj[u as usize].binary_search(&v).is_ok()
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for (u, row) in self.adj.iter().enumerate() {
            for &v in row {
                if (u as u32) < v {
                    out.push((u as u32, v));
                }
            }
        }
        out
    }

    /// Hop distances from `src`; `None` for unreachable vertices.
    pub fn bfs(&self, src: u32) -> Vec<Option<u32>> {
        let mut dist = vec![None; self.n()];
        let mut queue = VecDeque::new();
        dist[src as usize] = Some(0);
        queue.push_back(src);
        while let Some(v) = queue.pop_front() {
            let d = dist[v as usize].unwrap();
            for &w in &self.adj[v as usize] {
                if dist[w as usize].is_none() {
                    dist[w as usize] = Some(d + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub fn is_connected(&self) -> bool {
        self.n() == 0 || self.bfs(0).iter().all(Option::is_some)
    }

    /// Cut vertices, sorted.  Iterative low-link search.
    pub fn articulation_points(&self) -> Vec<u32> {
        let n = self.n();
        let mut disc = vec![usize::MAX; n];
        let mut low = vec![0usize; n];
        let mut is_cut = vec![false; n];
        let mut time = 0;
        for root in 0..n {
            if disc[root] != usize::MAX {
                continue;
            }
            disc[root] = time;
            low[root] = time;
            time += 1;
            let mut root_children = 0;
            // (vertex, parent, next neighbor index)
            let mut stack = vec![(root, usize::MAX, 0usize)];
            while let Some(&mut (v, parent, ref mut i)) = stack.last_mut() {
                if *i < self.adj[v].len() {
                    let w = self.adj[v][*i] as usize;
                    *i += 1;
                    if disc[w] == usize::MAX {
                        disc[w] = time;
                        low[w] = time;
                        time += 1;
                        if v == root {
                            root_children += 1;
                        }
                        stack.push((w, v, 0));
                    } else if w != parent {
                        low[v] = low[v].min(disc[w]);
                    }
                } else {
                    stack.pop();
                    if parent != usize::MAX {
                        low[parent] = low[parent].min(low[v]);
                        if parent != root && low[v] >= disc[parent] {
                            is_cut[parent] = true;
                        }
                    }
                }
            }
            if root_children >= 2 {
                is_cut[root] = true;
            }
        }
        (0..n as u32).filter(|&v| is_cut[v as usize]).collect()
    }

    /// Subgraph induced by `vertices`, relabeled `0..` in the given order.
    pub fn induced(&self, vertices: &[u32]) -> Graph {
        let mut pos = vec![u32::MAX; self.n()];
        for (i, &v) in vertices.iter().enumerate() {
            pos[v as usize] = i as u32;
        }
        let mut g = Graph::new(vertices.len());
        for (i, &v) in vertices.iter().enumerate() {
            for &w in &self.adj[v as usize] {
                let j = pos[w as usize];
                if j != u32::MAX && (i as u32) < j {
                    g.add_edge(i as u32, j).unwrap();
                }
            }
        }
        g
    }

    /// Neighborhood bitmasks; only for `n ≤ 32`.
    pub fn masks(&self) -> Vec<u32> {
        assert!(self.n() <= 32, "bitmask view needs at most 32 vertices");
        self.adj
            .iter()
            .map(|row| row.iter().fold(0u32, |m, &w| m | 1 << w))
            .collect()
    }

    pub fn from_masks(adj: &[u32]) -> Graph {
        let mut g = Graph::new(adj.len());
        for (u, &m) in adj.iter().enumerate() {
            g.adj[u] = (0..adj.len() as u32).filter(|&w| m >> w & 1 == 1).collect();
        }
        g
    }

    pub fn to_json(&self) -> String {
        let edges = self.edges().into_iter().map(|(u, v)| [u, v]).collect();
        serde_json::to_string(&GraphJson { n: self.n(), edges }).unwrap()
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let gj: GraphJson = serde_json::from_str(s)?;
        let edges: Vec<(u32, u32)> = gj.edges.iter().map(|e| (e[0], e[1])).collect();
        Graph::from_edges(gj.n, &edges)
    }
}

/// A tree given by adjacency lists; leaves are the degree-1 vertices.
#[derive(Clone, Debug)]
pub struct PlainTree {
    pub adj: Vec<Vec<usize>>,
}

impl PlainTree {
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        PlainTree { adj }
    }

    pub fn leaves(&self) -> Vec<usize> {
        (0..self.adj.len()).filter(|&v| self.adj[v].len() == 1).collect()
    }
}

/// Graph on the leaves of `tree` (numbered in increasing vertex order),
/// with an edge between leaves at tree distance at most `k`.
pub fn leaf_power(tree: &PlainTree, k: usize) -> Graph {
    let leaves = tree.leaves();
    let mut index = vec![usize::MAX; tree.adj.len()];
    for (i, &l) in leaves.iter().enumerate() {
        index[l] = i;
    }
    let mut g = Graph::new(leaves.len());
    let mut dist = vec![usize::MAX; tree.adj.len()];
    for (i, &l) in leaves.iter().enumerate() {
        let mut seen = vec![l];
        let mut queue = VecDeque::from([l]);
        dist[l] = 0;
        while let Some(v) = queue.pop_front() {
            if dist[v] == k {
                continue;
            }
            for &w in &tree.adj[v] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    seen.push(w);
                    queue.push_back(w);
                }
            }
        }
        for &v in &seen {
            if index[v] != usize::MAX && index[v] > i {
                g.add_edge(i as u32, index[v] as u32).unwrap();
            }
            dist[v] = usize::MAX;
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn articulation_points_of_small_graphs() {
        assert_eq!(Graph::path(4).articulation_points(), vec![1, 2]);
        assert!(Graph::cycle(5).articulation_points().is_empty());
        // two triangles sharing vertex 2
        let g = Graph::from_edges(5, &[(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4)]).unwrap();
        assert_eq!(g.articulation_points(), vec![2]);
    }

    #[test]
    fn json_round_trip() {
        let g = Graph::cycle(6);
        let s = g.to_json();
        assert_eq!(s, r#"{"n":6,"edges":[[0,1],[0,5],[1,2],[2,3],[3,4],[4,5]]}"#);
        assert_eq!(Graph::from_json(&s).unwrap(), g);
    }

    #[test]
    fn star_leaf_power_is_a_triangle() {
        let t = PlainTree::from_edges(4, &[(0, 1), (0, 2), (0, 3)]);
        assert_eq!(leaf_power(&t, 3), Graph::complete(3));
    }

    #[test]
    fn caterpillar_leaf_power_is_a_path() {
        // u - a - b - c - w with v hanging at b
        let (u, a, b, c, w, v) = (0, 1, 2, 3, 4, 5);
        let t = PlainTree::from_edges(6, &[(u, a), (a, b), (b, c), (c, w), (b, v)]);
        // leaves in vertex order: u, w, v
        let g = leaf_power(&t, 3);
        assert_eq!(g.edges(), vec![(0, 2), (1, 2)]);
    }

    #[test]
    fn induced_relabels() {
        let g = Graph::cycle(5);
        let h = g.induced(&[4, 0, 1]);
        assert_eq!(h.edges(), vec![(0, 1), (1, 2)]);
    }
}
