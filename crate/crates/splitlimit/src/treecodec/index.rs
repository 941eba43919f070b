//! Flattened view of a [`DhTree`] for path queries.
//!
//! Vertex 0 is the root-leaf, vertex `i+1` is internal node `i`, and leaves
//! follow.  At a star vertex `w` entered from `x` and left toward `y`, the
//! path jumps unless the center of `w` is `x` or `y`; cliques never jump.

use super::graph::Graph;
use super::{Child, DhTree, NodeType};
use crate::crt::KProperTree;
use crate::{Error, Result};

const NONE: u32 = u32::MAX;

#[derive(Clone, Debug)]
pub struct TreeIndex {
    parent: Vec<u32>,
    depth: Vec<u32>,
    /// Center neighbor of star vertices, `NONE` otherwise.
    center: Vec<u32>,
    children: Vec<Vec<u32>>,
    /// Vertex of each leaf label (`NONE` when absent).
    leaf_vertex: Vec<u32>,
    /// Label of each leaf vertex (`NONE` for internal vertices).
    label: Vec<u32>,
}

/// Enriched induced subtree: the shape spanned by marked leaves plus the
/// number of jumps along each of its edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enriched {
    pub tree: KProperTree,
    /// Jumps per edge, indexed like the edges of `tree`.
    pub jumps: Vec<u32>,
    /// Some edge of the shape corresponds to a path without interior
    /// vertices (two essential vertices are neighbors).
    pub adjacent_essentials: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EnrichedError {
    /// A branch vertex of the spanned subtree has degree above 3.
    HighDegree(usize),
    RepeatedMark,
    Missing(u32),
}

impl TreeIndex {
    pub fn new(t: &DhTree) -> Self {
        let nn = t.nodes.len();
        let nv = 1 + nn + t.size();
        let mut ix = TreeIndex {
            parent: vec![NONE; nv],
            depth: vec![0; nv],
            center: vec![NONE; nv],
            children: vec![Vec::new(); nv],
            leaf_vertex: Vec::new(),
            label: vec![NONE; nv],
        };
        ix.label[0] = 0;
        let mut next_leaf = 1 + nn as u32;
        let mut leaf_pairs = vec![(0u32, 0u32)];
        let mut stack = vec![(t.root, 0u32)];
        while let Some((c, p)) = stack.pop() {
            let v = match c {
                Child::Leaf(l) => {
                    let v = next_leaf;
                    next_leaf += 1;
                    ix.label[v as usize] = l;
                    leaf_pairs.push((l, v));
                    v
                }
                Child::Node(i) => i as u32 + 1,
            };
            ix.parent[v as usize] = p;
            ix.depth[v as usize] = ix.depth[p as usize] + 1;
            ix.children[p as usize].push(v);
            if let Child::Node(i) = c {
                let nd = &t.nodes[i];
                for &ch in nd.children.iter().rev() {
                    stack.push((ch, v));
                }
                match nd.ty {
                    NodeType::K => {}
                    NodeType::SC => ix.center[v as usize] = p,
                    NodeType::SX => {
                        if let Some(Child::Node(ci)) = nd.dist.map(|d| nd.children[d]) {
                            ix.center[v as usize] = ci as u32 + 1;
                        }
                    }
                }
            }
        }
        // centers at leaves need the leaf vertex ids
        let max_label = leaf_pairs.iter().map(|p| p.0).max().unwrap_or(0);
        ix.leaf_vertex = vec![NONE; max_label as usize + 1];
        for &(l, v) in &leaf_pairs {
            ix.leaf_vertex[l as usize] = v;
        }
        for (i, nd) in t.nodes.iter().enumerate() {
            if let (NodeType::SX, Some(d)) = (nd.ty, nd.dist) {
                if let Child::Leaf(l) = nd.children[d] {
                    ix.center[i + 1] = ix.leaf_vertex[l as usize];
                }
            }
        }
        ix
    }

    pub fn vertex_count(&self) -> usize {
        self.parent.len()
    }

    fn vertex(&self, label: u32) -> Result<u32> {
        match self.leaf_vertex.get(label as usize) {
            Some(&v) if v != NONE => Ok(v),
            _ => Err(Error::LeafNotFound(label)),
        }
    }

    fn neighbors(&self, v: u32) -> impl Iterator<Item = u32> + '_ {
        let p = self.parent[v as usize];
        (p != NONE)
            .then_some(p)
            .into_iter()
            .chain(self.children[v as usize].iter().copied())
    }

    #[inline]
    fn jump_at(&self, w: u32, x: u32, y: u32) -> bool {
        let c = self.center[w as usize];
        c != NONE && c != x && c != y
    }

    /// Vertices of the tree path from `a` to `b`, both included.
    fn path(&self, mut a: u32, mut b: u32) -> Vec<u32> {
        let mut left = Vec::new();
        let mut right = Vec::new();
        while self.depth[a as usize] > self.depth[b as usize] {
            left.push(a);
            a = self.parent[a as usize];
        }
        while self.depth[b as usize] > self.depth[a as usize] {
            right.push(b);
            b = self.parent[b as usize];
        }
        while a != b {
            left.push(a);
            right.push(b);
            a = self.parent[a as usize];
            b = self.parent[b as usize];
        }
        left.push(a);
        left.extend(right.into_iter().rev());
        left
    }

    fn path_jumps(&self, path: &[u32]) -> u32 {
        path.windows(3)
            .filter(|w| self.jump_at(w[1], w[0], w[2]))
            .count() as u32
    }

    /// Jumps between leaves `a` and `b` (label 0 is the root-leaf).
    pub fn jumps(&self, a: u32, b: u32) -> Result<u32> {
        let va = self.vertex(a)?;
        let vb = self.vertex(b)?;
        if va == vb {
            return Err(Error::Invalid(format!("jumps needs two distinct leaves, got {a} twice")));
        }
        Ok(self.path_jumps(&self.path(va, vb)))
    }

    pub fn distance(&self, a: u32, b: u32) -> Result<u32> {
        Ok(self.jumps(a, b)? + 1)
    }

    /// Leaf labels present, root-leaf included.
    pub fn labels(&self) -> Vec<u32> {
        (0..self.leaf_vertex.len() as u32)
            .filter(|&l| self.leaf_vertex[l as usize] != NONE)
            .collect()
    }

    /// The encoded graph: leaves joined iff their path has no jump.  Vertex
    /// ids are leaf labels, so the labels must be `0..=n`.
    pub fn graph(&self) -> Graph {
        let n = self.leaf_vertex.len();
        let mut g = Graph::new(n);
        let mut stack = Vec::new();
        for a in 0..n as u32 {
            let va = self.leaf_vertex[a as usize];
            if va == NONE {
                continue;
            }
            for w in self.neighbors(va) {
                stack.push((w, va));
            }
            while let Some((w, from)) = stack.pop() {
                let lw = self.label[w as usize];
                if lw != NONE {
                    if lw > a {
                        g.add_edge(a, lw).unwrap();
                    }
                    continue;
                }
                for y in self.neighbors(w) {
                    if y != from && !self.jump_at(w, from, y) {
                        stack.push((y, w));
                    }
                }
            }
        }
        g
    }

    /// Enriched subtree spanned by `marks[0]` (its root) and the marked
    /// leaves `marks[1..]`.
    pub fn enriched(&self, marks: &[u32]) -> std::result::Result<Enriched, EnrichedError> {
        let k = marks.len() - 1;
        let nv = self.vertex_count();
        let mut is_mark = vec![NONE; nv];
        let mut verts = Vec::with_capacity(marks.len());
        for (i, &m) in marks.iter().enumerate() {
            let v = self.vertex(m).map_err(|_| EnrichedError::Missing(m))?;
            if is_mark[v as usize] != NONE {
                return Err(EnrichedError::RepeatedMark);
            }
            is_mark[v as usize] = i as u32;
            verts.push(v);
        }
        // count marks below every vertex (rooted at the tree's root-leaf)
        let mut order = Vec::with_capacity(nv);
        order.push(0u32);
        let mut i = 0;
        while i < order.len() {
            let v = order[i];
            order.extend(self.children[v as usize].iter().copied());
            i += 1;
        }
        let total = marks.len() as u32;
        let mut cnt = vec![0u32; nv];
        for &v in order.iter().rev() {
            if is_mark[v as usize] != NONE {
                cnt[v as usize] += 1;
            }
            let p = self.parent[v as usize];
            if p != NONE {
                cnt[p as usize] += cnt[v as usize];
            }
        }
        let in_span = |v: u32| {
            let c = cnt[v as usize];
            self.parent[v as usize] != NONE && c > 0 && c < total
        };
        let span_neighbors = |v: u32| -> Vec<u32> {
            let mut out = Vec::new();
            if in_span(v) {
                out.push(self.parent[v as usize]);
            }
            out.extend(self.children[v as usize].iter().copied().filter(|&c| in_span(c)));
            out
        };
        // walk the spanned subtree from marks[0]
        let mut shape_parent = vec![usize::MAX; 2 * k.max(1)];
        let mut jumps_above = vec![0u32; 2 * k.max(1)];
        let mut adjacent = false;
        let mut next_internal = k + 1;
        // (shape vertex, tree vertex we came from, first tree vertex of the edge)
        let mut stack: Vec<(usize, u32, u32)> = Vec::new();
        let r = verts[0];
        for y in span_neighbors(r) {
            stack.push((0, r, y));
        }
        while let Some((sp, from, first)) = stack.pop() {
            let mut prev = from;
            let mut cur = first;
            let mut j = 0u32;
            let mut interior = 0;
            let nbrs = loop {
                let nb = span_neighbors(cur);
                if nb.len() != 2 || is_mark[cur as usize] != NONE {
                    break nb;
                }
                let next = if nb[0] == prev { nb[1] } else { nb[0] };
                if self.jump_at(cur, prev, next) {
                    j += 1;
                }
                interior += 1;
                prev = cur;
                cur = next;
            };
            adjacent |= interior == 0;
            let sv = if is_mark[cur as usize] != NONE {
                is_mark[cur as usize] as usize
            } else {
                if nbrs.len() > 3 {
                    return Err(EnrichedError::HighDegree(nbrs.len()));
                }
                let out: Vec<u32> = nbrs.iter().copied().filter(|&y| y != prev).collect();
                let sv = next_internal;
                next_internal += 1;
                for y in out {
                    stack.push((sv, cur, y));
                }
                sv
            };
            shape_parent[sv] = sp;
            jumps_above[sv] = j;
        }
        let (tree, map) = KProperTree::canonical(k, &shape_parent);
        let mut jumps = vec![0u32; tree.edge_count()];
        for (v, &m) in map.iter().enumerate().skip(1) {
            jumps[tree.edge_above(m).unwrap()] = jumps_above[v];
        }
        Ok(Enriched {
            tree,
            jumps,
            adjacent_essentials: adjacent,
        })
    }

    /// Jumps at a branch vertex `w` for a path entering from neighbor `x`
    /// and leaving toward `y`; exposed for distance bookkeeping.
    pub fn is_jump(&self, w: u32, x: u32, y: u32) -> bool {
        self.jump_at(w, x, y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distances_match_bfs_on_example_tree() {
        let t = DhTree::example();
        let ix = t.index();
        let g = ix.graph();
        for a in 0..=8 {
            let d = g.bfs(a);
            for b in 0..=8 {
                if a != b {
                    assert_eq!(Some(ix.distance(a, b).unwrap()), d[b as usize], "{a} {b}");
                    assert_eq!(ix.jumps(a, b).unwrap(), ix.jumps(b, a).unwrap());
                }
            }
        }
    }

    #[test]
    fn unknown_leaf_is_an_error() {
        let t = DhTree::single(NodeType::K, 3);
        assert!(matches!(t.jumps(1, 9), Err(Error::LeafNotFound(9))));
    }

    #[test]
    fn enriched_on_example_tree() {
        let ix = DhTree::example().index();
        // marks 6 and 7 share the branch at the upper SX node
        let e = ix.enriched(&[0, 6, 7]).unwrap();
        assert_eq!(e.tree.k(), 2);
        // root edge: 0 - A - C, jump at A? SC center is the root-leaf: no
        // leaf edge to 6: C is the branch, no interior vertex
        // leaf edge to 7: C - D - 7, D jumps (center is 8)
        assert_eq!(e.jumps, vec![0, 0, 1]);
        assert!(e.adjacent_essentials);
        let single = ix.enriched(&[6, 7]).unwrap();
        assert_eq!(single.jumps, vec![2]);
    }
}
