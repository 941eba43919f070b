//! Brute-force statistics of trees with marked leaves.
//!
//! A tree on `m` leaves is read as a tree of size `n = m - k` with `k`
//! marks: labels `n+1, …, n+k` are the marks, in order.  Every tree is
//! visited once and contributes to all `k` at the same time.

use super::brute::BruteForce;
use crate::crt::KProperTree;
use crate::treecodec::{Child, DhTree, Node, NodeType};
use crate::Family;
use std::collections::HashMap;

/// What one marked tree contributes to.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Stat {
    /// One mark: root type, cotype of the mark, jumps from the root-leaf.
    Marked {
        family: Family,
        root: NodeType,
        cotype: NodeType,
        jumps: u32,
    },
    /// Two marks hanging from the root-node, with the types that can be
    /// glued above (`a`) and below them (`b`, `c`).
    Junction {
        family: Family,
        a: NodeType,
        b: NodeType,
        c: NodeType,
    },
    /// Two marks at extremities of an SX root, gluable in a 3-leaf tree.
    LeafJunction,
    /// `k ≥ 1` marks spanning `tree` with these per-edge jumps.
    Shape {
        family: Family,
        tree: KProperTree,
        jumps: Vec<u32>,
    },
}

impl Stat {
    pub fn family(&self) -> Family {
        match self {
            Stat::Marked { family, .. } | Stat::Junction { family, .. } | Stat::Shape { family, .. } => *family,
            Stat::LeafJunction => Family::Leaf3,
        }
    }
}

/// Counts keyed by `(size, stat)`.
pub type Tally = HashMap<(usize, Stat), u64>;

struct View {
    leaf_at: HashMap<u32, (usize, usize)>,
    node_at: Vec<Option<(usize, usize)>>,
    /// Labels of leaves at the center of an SX node.
    center_leaves: Vec<u32>,
}

impl View {
    fn new(t: &DhTree) -> Self {
        let mut leaf_at = HashMap::new();
        let mut node_at = vec![None; t.nodes.len()];
        let mut center_leaves = Vec::new();
        for (i, nd) in t.nodes.iter().enumerate() {
            for (j, c) in nd.children.iter().enumerate() {
                match *c {
                    Child::Leaf(l) => {
                        leaf_at.insert(l, (i, j));
                        let at_center = nd.ty == NodeType::SX && nd.dist == Some(j);
                        if at_center {
                            center_leaves.push(l);
                        }
                    }
                    Child::Node(c) => node_at[c] = Some((i, j)),
                }
            }
        }
        View {
            leaf_at,
            node_at,
            center_leaves,
        }
    }

    fn leaf_cotype(&self, t: &DhTree, l: u32) -> NodeType {
        let (p, j) = self.leaf_at[&l];
        t.nodes[p].child_cotype(j)
    }
}

/// Which statistics to gather.
#[derive(Clone, Copy, Debug)]
pub struct Plan {
    pub max_leaves: usize,
    pub max_marks: usize,
}

/// Visits all trees with `2..=plan.max_leaves` leaves.
pub fn tally(plan: Plan) -> Tally {
    let mut total = Tally::new();
    for m in 2..=plan.max_leaves {
        let bf = BruteForce::new(m);
        let parts = bf.fold(Tally::new, |acc, b| {
            let t = b.to_dh_tree();
            for k in 1..=plan.max_marks.min(m - 1) {
                visit(&t, m - k, k, 1, acc);
            }
        });
        for part in parts {
            for (key, c) in part {
                *total.entry(key).or_insert(0) += c;
            }
        }
    }
    total
}

fn bump(acc: &mut Tally, n: usize, s: Stat, w: u64) {
    *acc.entry((n, s)).or_insert(0) += w;
}

/// Adds the statistics of `t` read with its last `k` labels as marks
/// (`n` unmarked leaves), each with weight `w`.
pub fn visit(t: &DhTree, n: usize, k: usize, w: u64, acc: &mut Tally) {
    let view = View::new(t);
    let class = t.classify();
    let ix = t.index();
    let root = t.root_type().expect("trees here have a root-node");
    let m = n + k;
    let marks: Vec<u32> = (n as u32 + 1..=m as u32).collect();
    let unmarked_off_center = view.center_leaves.iter().all(|&l| l as usize > n);
    if k == 1 {
        let cotype = view.leaf_cotype(t, marks[0]);
        let jumps = ix.jumps(0, marks[0]).unwrap();
        let mut fams = vec![Family::Dh];
        if unmarked_off_center {
            fams.push(Family::Dh2c);
        }
        if class.is_3leaf {
            fams.push(Family::Leaf3);
        }
        for family in fams {
            bump(
                acc,
                n,
                Stat::Marked {
                    family,
                    root,
                    cotype,
                    jumps,
                },
                w,
            );
        }
    }
    if k == 2 {
        junctions(t, &view, n, unmarked_off_center, class.is_3leaf, w, acc);
    }
    let mut spec = vec![0u32];
    spec.extend(&marks);
    let Ok(en) = ix.enriched(&spec) else { return };
    if en.adjacent_essentials {
        return;
    }
    let mut fams = vec![Family::Dh];
    if class.is_2connected {
        fams.push(Family::Dh2c);
    }
    if class.is_3leaf && branch_nodes_are_sx(t, &view, n) {
        fams.push(Family::Leaf3);
    }
    for family in fams {
        bump(
            acc,
            n,
            Stat::Shape {
                family,
                tree: en.tree.clone(),
                jumps: en.jumps.clone(),
            },
            w,
        );
    }
}

fn junctions(t: &DhTree, view: &View, n: usize, off_center: bool, is_3leaf: bool, w: u64, acc: &mut Tally) {
    let (m1, m2) = (n as u32 + 1, n as u32 + 2);
    let Child::Node(r) = t.root else { return };
    let (p1, j1) = view.leaf_at[&m1];
    let (p2, j2) = view.leaf_at[&m2];
    if p1 != r || p2 != r {
        return;
    }
    let node = &t.nodes[r];
    let (c1, c2) = (node.child_cotype(j1), node.child_cotype(j2));
    for a in NodeType::ALL {
        if !node.ty.fits_cotype(a) {
            continue;
        }
        for b in NodeType::ALL.into_iter().filter(|b| b.fits_cotype(c1)) {
            for c in NodeType::ALL.into_iter().filter(|c| c.fits_cotype(c2)) {
                bump(acc, n, Stat::Junction { family: Family::Dh, a, b, c }, w);
                if off_center {
                    bump(acc, n, Stat::Junction { family: Family::Dh2c, a, b, c }, w);
                }
            }
        }
    }
    if is_3leaf && glued_is_3leaf(t, n) {
        bump(acc, n, Stat::LeafJunction, w);
    }
}

/// Glues the tree under an extremity of an SX node and small SX trees on
/// both marks, and asks whether the result is a reduced 3-leaf tree.
fn glued_is_3leaf(t: &DhTree, n: usize) -> bool {
    let Child::Node(r) = t.root else { return false };
    let mut nodes = t.nodes.clone();
    let base = nodes.len();
    let l = |i: usize| Child::Leaf((n + i) as u32);
    for c in nodes[r].children.iter_mut() {
        if *c == l(1) {
            *c = Child::Node(base + 1);
        } else if *c == l(2) {
            *c = Child::Node(base + 2);
        }
    }
    let sx = |children: Vec<Child>| Node {
        ty: NodeType::SX,
        children,
        dist: Some(0),
    };
    nodes.push(sx(vec![l(1), Child::Node(r)]));
    nodes.push(sx(vec![l(2), l(3)]));
    nodes.push(sx(vec![l(4), l(5)]));
    let glued = DhTree {
        nodes,
        root: Child::Node(base),
    };
    glued.validate_reduced().is_ok() && glued.classify().is_3leaf
}

/// Every branch node of the marks is SX with cotype SX, and its children
/// toward marks are SX nodes.
fn branch_nodes_are_sx(t: &DhTree, view: &View, n: usize) -> bool {
    let nn = t.nodes.len();
    let mut cnt = vec![0u32; nn];
    let order = postorder(t);
    for &i in &order {
        let mut c = 0;
        for ch in &t.nodes[i].children {
            c += match *ch {
                Child::Leaf(l) => (l as usize > n) as u32,
                Child::Node(j) => cnt[j],
            };
        }
        cnt[i] = c;
    }
    for &i in &order {
        let nd = &t.nodes[i];
        let marked_children: Vec<&Child> = nd
            .children
            .iter()
            .filter(|ch| match **ch {
                Child::Leaf(l) => l as usize > n,
                Child::Node(j) => cnt[j] > 0,
            })
            .collect();
        if marked_children.len() < 2 {
            continue;
        }
        if nd.ty != NodeType::SX {
            return false;
        }
        match view.node_at[i] {
            Some((p, j)) if t.nodes[p].child_cotype(j) == NodeType::SX => {}
            _ => return false,
        }
        for ch in marked_children {
            match *ch {
                Child::Node(j) if t.nodes[j].ty == NodeType::SX => {}
                _ => return false,
            }
        }
    }
    true
}

fn postorder(t: &DhTree) -> Vec<usize> {
    let mut out = Vec::with_capacity(t.nodes.len());
    let Child::Node(r) = t.root else { return out };
    let mut stack = vec![(r, false)];
    while let Some((i, done)) = stack.pop() {
        if done {
            out.push(i);
            continue;
        }
        stack.push((i, true));
        for ch in &t.nodes[i].children {
            if let Child::Node(j) = *ch {
                stack.push((j, false));
            }
        }
    }
    out
}
