//! Exhaustive generation of small DH-trees.
//!
//! Trees are built from set partitions of the label set: the children of a
//! node are the blocks, listed by smallest label, so every unordered tree
//! comes out exactly once.  Only the local type rules are used (a node must
//! fit the cotype its parent presents); the subfamilies are obtained by
//! filtering with [`DhTree::classify`].

use crate::treecodec::{Child, DhTree, Node, NodeType};
use crate::Family;
use rayon::prelude::*;
use std::collections::HashMap;
use std::sync::Arc;

/// Immutable shared tree, cheap to reuse across many parents.
#[derive(Debug)]
pub enum BTree {
    Leaf(u32),
    Node {
        ty: NodeType,
        children: Vec<Arc<BTree>>,
        dist: Option<usize>,
    },
}

impl BTree {
    pub fn to_dh_tree(&self) -> DhTree {
        let mut nodes = Vec::new();
        let root = self.emit(&mut nodes);
        DhTree { nodes, root }
    }

    fn emit(&self, nodes: &mut Vec<Node>) -> Child {
        match self {
            BTree::Leaf(l) => Child::Leaf(*l),
            BTree::Node { ty, children, dist } => {
                let id = nodes.len();
                nodes.push(Node {
                    ty: *ty,
                    children: Vec::new(),
                    dist: *dist,
                });
                let kids = children.iter().map(|c| c.emit(nodes)).collect();
                nodes[id].children = kids;
                Child::Node(id)
            }
        }
    }
}

type List = Arc<Vec<Arc<BTree>>>;

fn cot_index(c: NodeType) -> usize {
    c as usize
}

/// All set partitions of `mask` (blocks by increasing smallest element).
pub fn set_partitions(mask: u32) -> Vec<Vec<u32>> {
    if mask == 0 {
        return vec![Vec::new()];
    }
    let low = mask & mask.wrapping_neg();
    let rest = mask & !low;
    let mut out = Vec::new();
    // blocks containing `low`: low ∪ (any subset of rest)
    let mut sub = rest;
    loop {
        let block = low | sub;
        for mut tail in set_partitions(rest & !sub) {
            tail.insert(0, block);
            out.push(tail);
        }
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & rest;
    }
    out
}

/// Memoized subtree lists for every proper label subset of `1..=n`.
pub struct BruteForce {
    n: usize,
    memo: HashMap<u32, [List; 3]>,
}

/// One way to build the root: type, blocks, and which block is the center.
#[derive(Clone, Debug)]
struct RootPlan {
    ty: NodeType,
    blocks: Vec<u32>,
    dist: Option<usize>,
}

impl BruteForce {
    pub fn new(n: usize) -> Self {
        assert!(n <= 20, "brute force beyond 20 labels is hopeless");
        let full = (1u32 << n) - 1;
        let mut masks: Vec<u32> = (1..full).collect();
        masks.sort_by_key(|m| m.count_ones());
        let mut bf = BruteForce {
            n,
            memo: HashMap::new(),
        };
        for m in masks {
            let lists = NodeType::ALL.map(|c| Arc::new(bf.build(m, Some(c))));
            bf.memo.insert(m, lists);
        }
        bf
    }

    fn sub(&self, mask: u32, cotype: NodeType) -> &List {
        &self.memo[&mask][cot_index(cotype)]
    }

    fn plans(mask: u32, cotype: Option<NodeType>) -> Vec<RootPlan> {
        let mut out = Vec::new();
        let parts: Vec<Vec<u32>> = set_partitions(mask).into_iter().filter(|p| p.len() >= 2).collect();
        for ty in NodeType::ALL {
            if let Some(c) = cotype {
                if !ty.fits_cotype(c) {
                    continue;
                }
            }
            for p in &parts {
                if ty == NodeType::SX {
                    for d in 0..p.len() {
                        out.push(RootPlan {
                            ty,
                            blocks: p.clone(),
                            dist: Some(d),
                        });
                    }
                } else {
                    out.push(RootPlan {
                        ty,
                        blocks: p.clone(),
                        dist: None,
                    });
                }
            }
        }
        out
    }

    fn child_lists(&self, plan: &RootPlan) -> Vec<List> {
        plan.blocks
            .iter()
            .enumerate()
            .map(|(j, &b)| {
                let c = match plan.ty {
                    NodeType::K => NodeType::K,
                    NodeType::SC => NodeType::SX,
                    NodeType::SX if plan.dist == Some(j) => NodeType::SC,
                    NodeType::SX => NodeType::SX,
                };
                self.sub(b, c).clone()
            })
            .collect()
    }

    fn build(&self, mask: u32, cotype: Option<NodeType>) -> Vec<Arc<BTree>> {
        if mask.count_ones() == 1 {
            return vec![Arc::new(BTree::Leaf(mask.trailing_zeros() + 1))];
        }
        let mut out = Vec::new();
        for plan in Self::plans(mask, cotype) {
            let lists = self.child_lists(&plan);
            product(&lists, &mut |kids| {
                out.push(Arc::new(BTree::Node {
                    ty: plan.ty,
                    children: kids.to_vec(),
                    dist: plan.dist,
                }))
            });
        }
        out
    }

    /// Calls `f` on every DH-tree with leaves `1..=n` (root unconstrained).
    /// Work is split over root plans; `f` runs on worker threads.
    pub fn for_each<F>(&self, f: F)
    where
        F: Fn(&BTree) + Sync,
    {
        if self.n < 2 {
            return;
        }
        let full = (1u32 << self.n) - 1;
        Self::plans(full, None).par_iter().for_each(|plan| {
            let lists = self.child_lists(plan);
            product(&lists, &mut |kids| {
                f(&BTree::Node {
                    ty: plan.ty,
                    children: kids.to_vec(),
                    dist: plan.dist,
                })
            });
        });
    }

    /// Folds every tree into per-worker accumulators made by `init`; the
    /// accumulators come back in a deterministic order.
    pub fn fold<T, I, F>(&self, init: I, f: F) -> Vec<T>
    where
        T: Send,
        I: Fn() -> T + Sync,
        F: Fn(&mut T, &BTree) + Sync,
    {
        if self.n < 2 {
            return Vec::new();
        }
        let full = (1u32 << self.n) - 1;
        Self::plans(full, None)
            .par_iter()
            .map(|plan| {
                let lists = self.child_lists(plan);
                let mut acc = init();
                product(&lists, &mut |kids| {
                    let t = BTree::Node {
                        ty: plan.ty,
                        children: kids.to_vec(),
                        dist: plan.dist,
                    };
                    f(&mut acc, &t);
                });
                acc
            })
            .collect()
    }

    /// Maps every tree through `f` and collects the `Some` results in a
    /// deterministic order.
    pub fn collect<T, F>(&self, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(&BTree) -> Option<T> + Sync,
    {
        if self.n < 2 {
            return Vec::new();
        }
        let full = (1u32 << self.n) - 1;
        let chunks: Vec<Vec<T>> = Self::plans(full, None)
            .par_iter()
            .map(|plan| {
                let lists = self.child_lists(plan);
                let mut out = Vec::new();
                product(&lists, &mut |kids| {
                    let t = BTree::Node {
                        ty: plan.ty,
                        children: kids.to_vec(),
                        dist: plan.dist,
                    };
                    if let Some(v) = f(&t) {
                        out.push(v);
                    }
                });
                out
            })
            .collect();
        chunks.into_iter().flatten().collect()
    }
}

fn product(lists: &[List], f: &mut dyn FnMut(&[Arc<BTree>])) {
    let mut idx = vec![0usize; lists.len()];
    if lists.iter().any(|l| l.is_empty()) {
        return;
    }
    let mut cur: Vec<Arc<BTree>> = lists.iter().map(|l| l[0].clone()).collect();
    loop {
        f(&cur);
        let mut i = lists.len();
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            idx[i] += 1;
            if idx[i] < lists[i].len() {
                cur[i] = lists[i][idx[i]].clone();
                break;
            }
            idx[i] = 0;
            cur[i] = lists[i][0].clone();
        }
    }
}

pub fn in_family(f: Family, t: &DhTree) -> bool {
    match f {
        Family::Dh => true,
        Family::Dh2c => t.classify().is_2connected,
        Family::Leaf3 => t.classify().is_3leaf,
    }
}

/// Every family tree of size `n`, in a deterministic order.
pub fn brute_force_trees(f: Family, n: usize) -> Vec<DhTree> {
    let mut out = Vec::new();
    if n == 1 && f == Family::Leaf3 {
        out.push(DhTree {
            nodes: Vec::new(),
            root: Child::Leaf(1),
        });
    }
    out.extend(BruteForce::new(n.max(1)).collect(|b| {
        let t = b.to_dh_tree();
        in_family(f, &t).then_some(t)
    }));
    out
}

/// Number of family trees of size `n`, without keeping them.
pub fn brute_force_count(f: Family, n: usize) -> u64 {
    use std::sync::atomic::{AtomicU64, Ordering};
    let count = AtomicU64::new((n == 1 && f == Family::Leaf3) as u64);
    BruteForce::new(n.max(1)).for_each(|b| {
        if f == Family::Dh || in_family(f, &b.to_dh_tree()) {
            count.fetch_add(1, Ordering::Relaxed);
        }
    });
    count.into_inner()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn partitions_are_bell_numbers() {
        let bell = [1usize, 1, 2, 5, 15, 52, 203];
        for (n, &b) in bell.iter().enumerate() {
            assert_eq!(set_partitions((1u32 << n) - 1).len(), b);
        }
    }

    #[test]
    fn size_two_trees() {
        let ts = brute_force_trees(Family::Dh, 2);
        let json: Vec<String> = ts.iter().map(|t| t.to_json()).collect();
        assert_eq!(ts.len(), 4, "{json:?}");
        assert!(json.contains(&r#"{"type":"K","children":[1,2]}"#.to_string()));
        assert!(json.contains(&r#"{"type":"SC","children":[1,2]}"#.to_string()));
        assert!(json.contains(&r#"{"type":"SX","dist":0,"children":[1,2]}"#.to_string()));
        assert!(json.contains(&r#"{"type":"SX","dist":1,"children":[1,2]}"#.to_string()));
    }

    #[test]
    fn generated_trees_are_valid_canonical_and_distinct() {
        let ts = brute_force_trees(Family::Dh, 4);
        let mut seen = HashSet::new();
        for t in &ts {
            t.validate_reduced().unwrap();
            assert_eq!(&t.canonical(), t);
            assert!(seen.insert(t.to_json()));
        }
        assert_eq!(brute_force_count(Family::Dh, 4), ts.len() as u64);
    }

    #[test]
    fn subfamilies_are_subsets() {
        let all: HashSet<String> = brute_force_trees(Family::Dh, 4).iter().map(|t| t.to_json()).collect();
        for f in [Family::Dh2c, Family::Leaf3] {
            for t in brute_force_trees(f, 4) {
                assert!(all.contains(&t.to_json()));
            }
        }
    }
}
