//! Rooted clique-star trees ("DH-trees") and the graphs they encode.
//!
//! A tree is stored as an arena of internal nodes hanging below an implicit
//! root-leaf labeled 0.  Leaves carry labels `1..=n`.  A node of type `SC` has
//! its star center toward the parent; an `SX` node has its center at the
//! distinguished child `dist`.

mod decompose;
pub mod dh;
pub mod graph;
mod index;

pub use decompose::{decompose, elimination_order, Elimination, Step};
pub use dh::{
    find_obstruction, is_dh, is_dh_by_definition, is_dh_by_forbidden_subgraphs, is_dh_masks, obstruction_in,
    prunable_masks, Obstruction,
};
pub use graph::{leaf_power, Graph, PlainTree};
pub use index::{Enriched, EnrichedError, TreeIndex};

use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum NodeType {
    K,
    SC,
    SX,
}

impl NodeType {
    pub const ALL: [NodeType; 3] = [NodeType::K, NodeType::SC, NodeType::SX];

    pub fn is_star(self) -> bool {
        self != NodeType::K
    }

    /// Whether a node of type `self` may sit below a parent edge whose far
    /// side looks like `cotype`.
    pub fn fits_cotype(self, cotype: NodeType) -> bool {
        !matches!(
            (cotype, self),
            (NodeType::K, NodeType::K) | (NodeType::SX, NodeType::SC) | (NodeType::SC, NodeType::SX)
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Child {
    Leaf(u32),
    Node(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Node {
    pub ty: NodeType,
    pub children: Vec<Child>,
    /// Index into `children` of the center child; `SX` only.
    pub dist: Option<usize>,
}

impl Node {
    /// Cotype seen by the child at position `i`.
    pub fn child_cotype(&self, i: usize) -> NodeType {
        match self.ty {
            NodeType::K => NodeType::K,
            NodeType::SC => NodeType::SX,
            NodeType::SX if self.dist == Some(i) => NodeType::SC,
            NodeType::SX => NodeType::SX,
        }
    }
}

/// A DH-tree.  `root` is whatever hangs below the root-leaf; it is a leaf
/// only for the one-edge tree encoding the graph on `{0, 1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DhTree {
    pub nodes: Vec<Node>,
    pub root: Child,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub is_2connected: bool,
    pub is_3leaf: bool,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum JsonChild {
    Leaf(u32),
    Node(JsonNode),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonNode {
    #[serde(rename = "type")]
    ty: NodeType,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dist: Option<usize>,
    children: Vec<JsonChild>,
}

impl DhTree {
    /// A single node of type `ty` with leaves `1..=n`; `SX` gets leaf 1 as
    /// distinguished child.
    pub fn single(ty: NodeType, n: u32) -> Self {
        DhTree {
            nodes: vec![Node {
                ty,
                children: (1..=n).map(Child::Leaf).collect(),
                dist: (ty == NodeType::SX).then_some(0),
            }],
            root: Child::Node(0),
        }
    }

    /// The nine-leaf example tree: an `SC` root with children
    /// `1`, `K{2,3,4}` and `SX{5*,6,SX{7,8*}}` (starred = distinguished).
    pub fn example() -> Self {
        let leaf = Child::Leaf;
        DhTree {
            nodes: vec![
                Node {
                    ty: NodeType::SC,
                    children: vec![leaf(1), Child::Node(1), Child::Node(2)],
                    dist: None,
                },
                Node {
                    ty: NodeType::K,
                    children: vec![leaf(2), leaf(3), leaf(4)],
                    dist: None,
                },
                Node {
                    ty: NodeType::SX,
                    children: vec![leaf(5), leaf(6), Child::Node(3)],
                    dist: Some(0),
                },
                Node {
                    ty: NodeType::SX,
                    children: vec![leaf(7), leaf(8)],
                    dist: Some(1),
                },
            ],
            root: Child::Node(0),
        }
    }

    /// Number of non-root leaves.
    pub fn size(&self) -> usize {
        match self.root {
            Child::Leaf(_) => 1,
            Child::Node(_) => self
                .nodes
                .iter()
                .flat_map(|nd| &nd.children)
                .filter(|c| matches!(c, Child::Leaf(_)))
                .count(),
        }
    }

    /// Leaf labels in increasing order (root-leaf excluded).
    pub fn leaves(&self) -> Vec<u32> {
        let mut out: Vec<u32> = match self.root {
            Child::Leaf(l) => vec![l],
            Child::Node(_) => self
                .nodes
                .iter()
                .flat_map(|nd| &nd.children)
                .filter_map(|c| match c {
                    Child::Leaf(l) => Some(*l),
                    Child::Node(_) => None,
                })
                .collect(),
        };
        out.sort_unstable();
        out
    }

    pub fn root_type(&self) -> Option<NodeType> {
        match self.root {
            Child::Node(i) => Some(self.nodes[i].ty),
            Child::Leaf(_) => None,
        }
    }

    /// Checks the reduced-tree conditions, collecting every violation.
    pub fn validate_reduced(&self) -> Result<()> {
        let mut errs = Vec::new();
        let mut seen_node = vec![false; self.nodes.len()];
        let mut labels = Vec::new();
        let mut stack = vec![(self.root, None::<NodeType>)];
        while let Some((c, cotype)) = stack.pop() {
            let i = match c {
                Child::Leaf(l) => {
                    labels.push(l);
                    continue;
                }
                Child::Node(i) => i,
            };
            if i >= self.nodes.len() {
                errs.push(format!("node index {i} out of range"));
                continue;
            }
            if std::mem::replace(&mut seen_node[i], true) {
                errs.push(format!("node {i} reached twice"));
                continue;
            }
            let nd = &self.nodes[i];
            if nd.children.len() < 2 {
                errs.push(format!("node {i} has {} children, needs at least 2", nd.children.len()));
            }
            if let Some(ct) = cotype {
                if !nd.ty.fits_cotype(ct) {
                    errs.push(format!("node {i} of type {:?} below a {:?} side", nd.ty, ct));
                }
            }
            match (nd.ty, nd.dist) {
                (NodeType::SX, Some(d)) if d < nd.children.len() => {}
                (NodeType::SX, d) => errs.push(format!("SX node {i} has bad distinguished index {d:?}")),
                (_, Some(_)) => errs.push(format!("non-SX node {i} has a distinguished child")),
                (_, None) => {}
            }
            for (j, &ch) in nd.children.iter().enumerate() {
                stack.push((ch, Some(nd.child_cotype(j))));
            }
        }
        if let Some(i) = seen_node.iter().position(|s| !s) {
            errs.push(format!("node {i} unreachable from the root"));
        }
        labels.sort_unstable();
        let expected: Vec<u32> = (1..=labels.len() as u32).collect();
        if labels != expected {
            errs.push(format!("leaf labels {labels:?} are not 1..={}", labels.len()));
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidTree(errs))
        }
    }

    fn min_leaf(&self, c: Child, memo: &mut [u32]) -> u32 {
        match c {
            Child::Leaf(l) => l,
            Child::Node(i) => {
                if memo[i] == u32::MAX {
                    let m = self.nodes[i]
                        .children
                        .clone()
                        .into_iter()
                        .map(|ch| self.min_leaf(ch, memo))
                        .min()
                        .unwrap_or(u32::MAX - 1);
                    memo[i] = m;
                }
                memo[i]
            }
        }
    }

    /// Same tree with children sorted by smallest leaf label and the arena
    /// in preorder.  Two trees are equal iff their canonical forms are.
    pub fn canonical(&self) -> DhTree {
        let mut memo = vec![u32::MAX; self.nodes.len()];
        let mut out = DhTree {
            nodes: Vec::with_capacity(self.nodes.len()),
            root: self.root,
        };
        if let Child::Node(r) = self.root {
            out.root = Child::Node(self.copy_canonical(r, &mut memo, &mut out.nodes));
        }
        out
    }

    fn copy_canonical(&self, i: usize, memo: &mut [u32], out: &mut Vec<Node>) -> usize {
        let nd = &self.nodes[i];
        let mut order: Vec<(u32, usize)> = nd
            .children
            .iter()
            .enumerate()
            .map(|(j, &c)| (self.min_leaf(c, memo), j))
            .collect();
        order.sort_unstable();
        let id = out.len();
        out.push(Node {
            ty: nd.ty,
            children: Vec::with_capacity(nd.children.len()),
            dist: nd
                .dist
                .map(|d| order.iter().position(|&(_, j)| j == d).unwrap()),
        });
        for &(_, j) in &order {
            let ch = match nd.children[j] {
                Child::Leaf(l) => Child::Leaf(l),
                Child::Node(c) => Child::Node(self.copy_canonical(c, memo, out)),
            };
            out[id].children.push(ch);
        }
        id
    }

    /// Renames leaves through `map` (`map[old] = new`).
    pub fn relabel(&self, map: &[u32]) -> DhTree {
        let f = |c: Child| match c {
            Child::Leaf(l) => Child::Leaf(map[l as usize]),
            other => other,
        };
        DhTree {
            nodes: self
                .nodes
                .iter()
                .map(|nd| Node {
                    ty: nd.ty,
                    children: nd.children.iter().map(|&c| f(c)).collect(),
                    dist: nd.dist,
                })
                .collect(),
            root: f(self.root),
        }
    }

    pub fn index(&self) -> TreeIndex {
        TreeIndex::new(self)
    }

    /// Number of jumps on the path between two leaves (0 = root-leaf).
    pub fn jumps(&self, a: u32, b: u32) -> Result<u32> {
        self.index().jumps(a, b)
    }

    /// Graph distance between two leaves of `gr(self)`.
    pub fn distance(&self, a: u32, b: u32) -> Result<u32> {
        self.index().distance(a, b)
    }

    /// The graph encoded by the tree, on vertices `0..=n`.
    pub fn gr(&self) -> Result<Graph> {
        self.validate_reduced()?;
        Ok(self.index().graph())
    }

    pub fn classify(&self) -> Classification {
        let mut two_connected = self.root_type() != Some(NodeType::SC);
        let mut stars = 0usize;
        let mut star_edges = 0usize;
        let mut center_edge = false;
        for nd in &self.nodes {
            if nd.ty.is_star() {
                stars += 1;
            }
            for (j, &c) in nd.children.iter().enumerate() {
                let at_center = nd.ty == NodeType::SX && nd.dist == Some(j);
                match c {
                    Child::Leaf(_) => two_connected &= !at_center,
                    Child::Node(ci) => {
                        let cty = self.nodes[ci].ty;
                        if nd.ty.is_star() && cty.is_star() {
                            star_edges += 1;
                            center_edge |= at_center && cty == NodeType::SC;
                        }
                    }
                }
            }
        }
        Classification {
            is_2connected: two_connected,
            is_3leaf: (stars == 0 || star_edges + 1 == stars) && !center_edge,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.json_child(self.root)).unwrap()
    }

    fn json_child(&self, c: Child) -> JsonChild {
        match c {
            Child::Leaf(l) => JsonChild::Leaf(l),
            Child::Node(i) => {
                let nd = &self.nodes[i];
                JsonChild::Node(JsonNode {
                    ty: nd.ty,
                    dist: nd.dist,
                    children: nd.children.iter().map(|&ch| self.json_child(ch)).collect(),
                })
            }
        }
    }

    /// Parses tree JSON; the result is not validated.
    pub fn from_json(s: &str) -> Result<Self> {
        let root: JsonChild = serde_json::from_str(s)?;
        let mut nodes = Vec::new();
        let root = Self::read_json(root, &mut nodes);
        Ok(DhTree { nodes, root })
    }

    fn read_json(c: JsonChild, nodes: &mut Vec<Node>) -> Child {
        match c {
            JsonChild::Leaf(l) => Child::Leaf(l),
            JsonChild::Node(jn) => {
                let id = nodes.len();
                nodes.push(Node {
                    ty: jn.ty,
                    children: Vec::new(),
                    dist: jn.dist,
                });
                let children = jn
                    .children
                    .into_iter()
                    .map(|ch| Self::read_json(ch, nodes))
                    .collect();
                nodes[id].children = children;
                Child::Node(id)
            }
        }
    }

    /// Leaf labels below each child of node `i`, as sets.
    pub fn clades(&self, i: usize) -> Vec<BTreeSet<u32>> {
        self.nodes[i]
            .children
            .iter()
            .map(|&c| {
                let mut s = BTreeSet::new();
                self.collect_leaves(c, &mut s);
                s
            })
            .collect()
    }

    fn collect_leaves(&self, c: Child, out: &mut BTreeSet<u32>) {
        match c {
            Child::Leaf(l) => {
                out.insert(l);
            }
            Child::Node(i) => {
                for &ch in &self.nodes[i].children {
                    self.collect_leaves(ch, out);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_clique_gives_complete_graph() {
        let t = DhTree::single(NodeType::K, 4);
        assert_eq!(t.gr().unwrap(), Graph::complete(5));
    }

    #[test]
    fn single_sc_gives_star_at_root_leaf() {
        let t = DhTree::single(NodeType::SC, 4);
        let g = t.gr().unwrap();
        assert_eq!(g.edges(), vec![(0, 1), (0, 2), (0, 3), (0, 4)]);
        assert_eq!(t.jumps(1, 2).unwrap(), 1);
        assert_eq!(t.distance(1, 2).unwrap(), 2);
    }

    #[test]
    fn example_tree_distances() {
        let t = DhTree::example();
        t.validate_reduced().unwrap();
        let g = t.gr().unwrap();
        assert!(g.has_edge(2, 3));
        assert!(!g.has_edge(6, 7));
        assert_eq!(t.jumps(6, 7).unwrap(), 2);
        assert_eq!(t.distance(6, 7).unwrap(), 3);
        assert_eq!(g.bfs(6)[7], Some(3));
    }

    #[test]
    fn validate_reports_each_violation() {
        let mut t = DhTree::single(NodeType::K, 3);
        t.nodes[0].children.push(Child::Node(1));
        t.nodes.push(Node {
            ty: NodeType::K,
            children: vec![Child::Leaf(4)],
            dist: Some(0),
        });
        let Err(Error::InvalidTree(errs)) = t.validate_reduced() else {
            panic!("expected invalid tree")
        };
        assert_eq!(errs.len(), 3, "{errs:?}");
    }

    #[test]
    fn json_round_trip_is_exact() {
        let t = DhTree::example();
        let s = t.to_json();
        assert_eq!(
            s,
            r#"{"type":"SC","children":[1,{"type":"K","children":[2,3,4]},{"type":"SX","dist":0,"children":[5,6,{"type":"SX","dist":1,"children":[7,8]}]}]}"#
        );
        let back = DhTree::from_json(&s).unwrap();
        assert_eq!(back, t);
        assert_eq!(back.to_json(), s);
    }

    #[test]
    fn canonical_sorts_children() {
        let t = DhTree {
            nodes: vec![
                Node {
                    ty: NodeType::SX,
                    children: vec![Child::Node(1), Child::Leaf(1)],
                    dist: Some(0),
                },
                Node {
                    ty: NodeType::SC,
                    children: vec![Child::Leaf(3), Child::Leaf(2)],
                    dist: None,
                },
            ],
            root: Child::Node(0),
        };
        let c = t.canonical();
        assert_eq!(c.to_json(), r#"{"type":"SX","dist":1,"children":[1,{"type":"SC","children":[2,3]}]}"#);
        assert_eq!(c.gr().unwrap(), t.gr().unwrap());
    }

    #[test]
    fn classify_small_trees() {
        let k = DhTree::single(NodeType::K, 3).classify();
        assert!(k.is_2connected && k.is_3leaf);
        let sc = DhTree::single(NodeType::SC, 3).classify();
        assert!(!sc.is_2connected && sc.is_3leaf);
        let ex = DhTree::example().classify();
        assert!(!ex.is_2connected);
        assert!(ex.is_3leaf);
    }
}
