//! Graph to tree: prune pendants and twins, then rebuild the clique-star
//! tree by replaying the insertions backwards.

use super::graph::Graph;
use super::{Child, DhTree, Node, NodeType};
use crate::{Error, Result};
use fixedbitset::FixedBitSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Step {
    /// `x` hangs off `y` only.
    Pendant,
    /// `N[x] = N[y]`.
    TrueTwin,
    /// `N(x) = N(y)`.
    FalseTwin,
}

/// Vertices removed in order, each with its partner, down to an edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Elimination {
    pub steps: Vec<(u32, Step, u32)>,
    pub base: (u32, u32),
}

/// Pruning sequence, always removing the lowest eligible vertex; `None` if
/// it gets stuck (the graph is not distance-hereditary).  Expects a
/// connected graph with at least two vertices.
pub fn elimination_order(g: &Graph) -> Option<Elimination> {
    let n = g.n();
    let mut nbr: Vec<FixedBitSet> = (0..n)
        .map(|v| {
            let mut b = FixedBitSet::with_capacity(n);
            for &w in g.neighbors(v as u32) {
                b.insert(w as usize);
            }
            b
        })
        .collect();
    let mut deg: Vec<usize> = (0..n).map(|v| g.degree(v as u32)).collect();
    let mut alive = FixedBitSet::with_capacity(n);
    alive.insert_range(..);
    let mut remaining = n;
    let mut steps = Vec::with_capacity(n.saturating_sub(2));
    while remaining > 2 {
        let (x, step, y) = find_step(&nbr, &deg, &alive)?;
        steps.push((x as u32, step, y as u32));
        alive.set(x, false);
        remaining -= 1;
        for w in nbr[x].ones().collect::<Vec<_>>() {
            nbr[w].set(x, false);
            deg[w] -= 1;
        }
    }
    let mut rest = alive.ones();
    let (a, b) = (rest.next()?, rest.next()?);
    nbr[a].contains(b).then_some(Elimination {
        steps,
        base: (a as u32, b as u32),
    })
}

fn find_step(nbr: &[FixedBitSet], deg: &[usize], alive: &FixedBitSet) -> Option<(usize, Step, usize)> {
    for x in alive.ones() {
        if deg[x] == 1 {
            return Some((x, Step::Pendant, nbr[x].ones().next().unwrap()));
        }
        for y in alive.ones() {
            if y == x {
                continue;
            }
            let adjacent = nbr[x].contains(y);
            let (dx, dy) = (deg[x], deg[y]);
            if dx != dy {
                continue;
            }
            let mut a = nbr[x].clone();
            a.set(y, false);
            let mut b = nbr[y].clone();
            b.set(x, false);
            if a == b {
                let step = if adjacent { Step::TrueTwin } else { Step::FalseTwin };
                return Some((x, step, y));
            }
        }
    }
    None
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Leaf(u32),
    Clique,
    Star { center: usize },
    Dead,
}

/// Unrooted clique-star tree under construction.
struct Builder {
    kind: Vec<Kind>,
    adj: Vec<Vec<usize>>,
    leaf_of: Vec<usize>,
}

impl Builder {
    fn new(n: usize, a: u32, b: u32) -> Self {
        let mut leaf_of = vec![usize::MAX; n];
        leaf_of[a as usize] = 0;
        leaf_of[b as usize] = 1;
        Builder {
            kind: vec![Kind::Leaf(a), Kind::Leaf(b)],
            adj: vec![vec![1], vec![0]],
            leaf_of,
        }
    }

    fn add(&mut self, kind: Kind) -> usize {
        self.kind.push(kind);
        self.adj.push(Vec::new());
        self.kind.len() - 1
    }

    fn replace_neighbor(&mut self, v: usize, old: usize, new: usize) {
        for w in self.adj[v].iter_mut() {
            if *w == old {
                *w = new;
            }
        }
        if let Kind::Star { center } = &mut self.kind[v] {
            if *center == old {
                *center = new;
            }
        }
    }

    /// Adds leaf `x` next to leaf `y` as dictated by `step`.
    fn insert(&mut self, x: u32, step: Step, y: u32) -> usize {
        let ly = self.leaf_of[y as usize];
        let p = self.adj[ly][0];
        let lx = self.add(Kind::Leaf(x));
        self.leaf_of[x as usize] = lx;
        let q = self.add(match step {
            Step::TrueTwin => Kind::Clique,
            Step::FalseTwin => Kind::Star { center: p },
            Step::Pendant => Kind::Star { center: ly },
        });
        self.replace_neighbor(p, ly, q);
        self.adj[ly] = vec![q];
        self.adj[lx] = vec![q];
        self.adj[q] = vec![p, ly, lx];
        q
    }

    fn is_internal(&self, v: usize) -> bool {
        matches!(self.kind[v], Kind::Clique | Kind::Star { .. })
    }

    /// Which of `a`, `b` should absorb the other, if the edge between two
    /// internal nodes violates the reduced conditions.
    fn violation(&self, a: usize, b: usize) -> Option<(usize, usize)> {
        match (self.kind[a], self.kind[b]) {
            (Kind::Clique, Kind::Clique) => Some((a, b)),
            (Kind::Star { center: ca }, Kind::Star { center: cb }) => {
                // center of one star facing an extremity of the other: the
                // merged star keeps the other one's center
                if ca == b && cb != a {
                    Some((b, a))
                } else if cb == a && ca != b {
                    Some((a, b))
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    /// Merges `b` into `a`; `a` keeps its kind.
    fn merge(&mut self, a: usize, b: usize) {
        let others: Vec<usize> = self.adj[b].iter().copied().filter(|&w| w != a).collect();
        for &w in &others {
            self.replace_neighbor(w, b, a);
        }
        self.adj[a].retain(|&w| w != b);
        self.adj[a].extend(others);
        self.adj[b].clear();
        self.kind[b] = Kind::Dead;
    }

    fn normalize(&mut self, start: usize) {
        let mut work = vec![start];
        while let Some(v) = work.pop() {
            if !self.is_internal(v) {
                continue;
            }
            let found = self.adj[v]
                .iter()
                .copied()
                .filter(|&w| self.is_internal(w))
                .find_map(|w| self.violation(v, w));
            if let Some((keep, gone)) = found {
                self.merge(keep, gone);
                work.push(keep);
            }
        }
    }

    fn into_tree(self) -> DhTree {
        let l0 = self.leaf_of[0];
        let top = self.adj[l0][0];
        let mut nodes = Vec::new();
        let root = self.emit(top, l0, &mut nodes);
        DhTree { nodes, root }
    }

    fn emit(&self, v: usize, from: usize, nodes: &mut Vec<Node>) -> Child {
        let ty_center = match self.kind[v] {
            Kind::Leaf(l) => return Child::Leaf(l),
            Kind::Clique => (NodeType::K, None),
            Kind::Star { center } if center == from => (NodeType::SC, None),
            Kind::Star { center } => (NodeType::SX, Some(center)),
            Kind::Dead => unreachable!("dead node reachable"),
        };
        let id = nodes.len();
        nodes.push(Node {
            ty: ty_center.0,
            children: Vec::new(),
            dist: None,
        });
        let kids: Vec<usize> = self.adj[v].iter().copied().filter(|&w| w != from).collect();
        let mut children = Vec::with_capacity(kids.len());
        for (j, &w) in kids.iter().enumerate() {
            if Some(w) == ty_center.1 {
                nodes[id].dist = Some(j);
            }
            children.push(self.emit(w, v, nodes));
        }
        nodes[id].children = children;
        Child::Node(id)
    }
}

/// The reduced DH-tree of `g`, rooted at vertex 0.
pub fn decompose(g: &Graph) -> Result<DhTree> {
    if g.n() < 3 {
        return Err(Error::TooSmall(g.n()));
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let elim = elimination_order(g).ok_or(Error::NotDistanceHereditary)?;
    let mut b = Builder::new(g.n(), elim.base.0, elim.base.1);
    for &(x, step, y) in elim.steps.iter().rev() {
        let q = b.insert(x, step, y);
        b.normalize(q);
    }
    let t = b.into_tree().canonical();
    if let Err(e) = t.validate_reduced() {
        panic!("decomposition produced a non-reduced tree: {e}");
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_is_a_single_clique() {
        let t = decompose(&Graph::complete(3)).unwrap();
        assert_eq!(t, DhTree::single(NodeType::K, 2));
    }

    #[test]
    fn path_is_a_single_sx_with_center_one() {
        let t = decompose(&Graph::path(3)).unwrap();
        assert_eq!(t.to_json(), r#"{"type":"SX","dist":0,"children":[1,2]}"#);
    }

    #[test]
    fn example_round_trip() {
        let t = DhTree::example();
        let g = t.gr().unwrap();
        assert_eq!(decompose(&g).unwrap(), t.canonical());
    }

    #[test]
    fn errors() {
        assert!(matches!(decompose(&Graph::path(2)), Err(Error::TooSmall(2))));
        assert!(matches!(decompose(&Graph::cycle(5)), Err(Error::NotDistanceHereditary)));
        let g = Graph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        assert!(matches!(decompose(&g), Err(Error::Disconnected)));
    }
}
