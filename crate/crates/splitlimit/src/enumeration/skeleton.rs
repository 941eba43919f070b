//! Trees whose unmarked leaves are interchangeable dots.
//!
//! A tree with `n` dots and `k` labeled marks stands for `n!/|Aut|` labeled
//! trees, where `Aut` permutes identical sibling subtrees.  This reaches one
//! or two more leaves than the labeled brute force in the same time.

use super::marked_brute::{visit, Tally};
use crate::treecodec::{Child, DhTree, Node, NodeType};
use std::collections::HashMap;
use std::sync::Arc;

#[derive(Debug)]
pub enum Skel {
    Dot,
    Mark(u32),
    Node {
        ty: NodeType,
        /// Center child of an SX node.
        dist: Option<Arc<Skel>>,
        children: Vec<Arc<Skel>>,
    },
}

/// Where the star nodes of a subtree sit, for the 3-leaf filter: they must
/// form one connected block with no SC node at the center of an SX node.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Stars {
    None,
    /// Connected and containing the subtree root.
    Top,
    /// Connected, below a clique root.
    Buried,
}

#[derive(Clone, Debug)]
struct Entry {
    tree: Arc<Skel>,
    aut: u64,
    stars: Stars,
}

const ANY: usize = 3;

/// Identity of a subtree inside the memo: `(dots, marks, index)`.
type Id = (usize, u32, usize);

pub struct Skeletons {
    n: usize,
    k: usize,
    leaf3_only: bool,
    memo: HashMap<(usize, u32, usize), Vec<Entry>>,
}

impl Skeletons {
    /// All trees with `n` dots and `k` marks (at least two leaves in all).
    /// With `leaf3_only`, only trees of the 3-leaf family are produced.
    pub fn new(n: usize, k: usize, leaf3_only: bool) -> Self {
        assert!(n + k >= 2 && k <= 8);
        let mut s = Skeletons {
            n,
            k,
            leaf3_only,
            memo: HashMap::new(),
        };
        let full = (1u32 << k) - 1;
        let mut parts: Vec<(usize, u32)> = (0..=n)
            .flat_map(|d| (0..=full).map(move |m| (d, m)))
            .filter(|&(d, m)| {
                let size = d + m.count_ones() as usize;
                size >= 1 && size < n + k
            })
            .collect();
        parts.sort_by_key(|&(d, m)| d + m.count_ones() as usize);
        for (d, m) in parts {
            for cot in 0..3 {
                let mut list = Vec::new();
                s.generate(d, m, cot, &mut |e| list.push(e));
                s.memo.insert((d, m, cot), list);
            }
        }
        s
    }

    /// Calls `f` on every tree with its labeled multiplicity.  Dots get
    /// labels `1..=n` and mark `i` gets `n+1+i`.
    pub fn for_each(&self, mut f: impl FnMut(&DhTree, u64)) {
        let full = (1u32 << self.k) - 1;
        let fact: u64 = (1..=self.n as u64).product();
        self.generate(self.n, full, ANY, &mut |e| {
            assert_eq!(fact % e.aut, 0);
            f(&self.materialize(&e.tree), fact / e.aut);
        });
    }

    /// Sum of multiplicities, to compare with the labeled count.
    pub fn total(&self) -> u128 {
        let mut t = 0u128;
        self.for_each(|_, w| t += w as u128);
        t
    }

    fn list(&self, d: usize, m: u32, cot: usize) -> &[Entry] {
        self.memo.get(&(d, m, cot)).map_or(&[], |v| v.as_slice())
    }

    fn generate(&self, d: usize, mask: u32, cot: usize, sink: &mut dyn FnMut(Entry)) {
        let size = d + mask.count_ones() as usize;
        if size == 1 {
            let tree = if d == 1 {
                Skel::Dot
            } else {
                Skel::Mark(mask.trailing_zeros())
            };
            sink(Entry {
                tree: Arc::new(tree),
                aut: 1,
                stars: Stars::None,
            });
            return;
        }
        for ty in NodeType::ALL {
            if cot != ANY && !ty.fits_cotype(NodeType::ALL[cot]) {
                continue;
            }
            match ty {
                NodeType::K | NodeType::SC => {
                    let child_cot = if ty == NodeType::K { 0 } else { 2 };
                    self.multisets(d, mask, child_cot, 2, (0, 0, 0), &mut Vec::new(), &mut |kids| {
                        if let Some(e) = self.node(ty, None, kids) {
                            sink(e);
                        }
                    });
                }
                NodeType::SX => {
                    for d1 in 0..=d {
                        let mut m1 = mask;
                        loop {
                            let s1 = d1 + m1.count_ones() as usize;
                            if s1 >= 1 && s1 < size {
                                for center in self.list(d1, m1, 1) {
                                    self.multisets(d - d1, mask & !m1, 2, 1, (0, 0, 0), &mut Vec::new(), &mut |kids| {
                                        if let Some(e) = self.node(ty, Some(center), kids) {
                                            sink(e);
                                        }
                                    });
                                }
                            }
                            if m1 == 0 {
                                break;
                            }
                            m1 = (m1 - 1) & mask;
                        }
                    }
                }
            }
        }
    }

    /// Multisets of subtrees (all seeing cotype `cot`) covering `d` dots and
    /// the marks in `mask`, with at least `min` parts, listed by
    /// nondecreasing id starting at `from`.
    #[allow(clippy::too_many_arguments)]
    fn multisets<'a>(
        &'a self,
        d: usize,
        mask: u32,
        cot: usize,
        min: usize,
        from: Id,
        chosen: &mut Vec<(Id, &'a Entry)>,
        f: &mut dyn FnMut(&[(Id, &'a Entry)]),
    ) {
        for d1 in from.0..=d {
            let mut subs: Vec<u32> = Vec::new();
            let mut m1 = mask;
            loop {
                subs.push(m1);
                if m1 == 0 {
                    break;
                }
                m1 = (m1 - 1) & mask;
            }
            subs.sort_unstable();
            for m1 in subs {
                if d1 == from.0 && m1 < from.1 {
                    continue;
                }
                if d1 + m1.count_ones() as usize == 0 {
                    continue;
                }
                let (rd, rm) = (d - d1, mask & !m1);
                let last = rd == 0 && rm == 0;
                if last && chosen.len() + 1 < min {
                    continue;
                }
                let start = if (d1, m1) == (from.0, from.1) { from.2 } else { 0 };
                let list = self.list(d1, m1, cot);
                for (i, e) in list.iter().enumerate().skip(start) {
                    let id = (d1, m1, i);
                    chosen.push((id, e));
                    if last {
                        f(chosen);
                    } else {
                        self.multisets(rd, rm, cot, min, id, chosen, f);
                    }
                    chosen.pop();
                }
            }
        }
    }

    fn node(&self, ty: NodeType, center: Option<&Entry>, kids: &[(Id, &Entry)]) -> Option<Entry> {
        let mut aut = center.map_or(1, |c| c.aut);
        let mut run = 1u64;
        for (i, (id, e)) in kids.iter().enumerate() {
            aut *= e.aut;
            if i > 0 && kids[i - 1].0 == *id {
                run += 1;
                aut *= run;
            } else {
                run = 1;
            }
        }
        let stars = if self.leaf3_only {
            let states = kids.iter().map(|(_, e)| e.stars);
            if ty == NodeType::K {
                let busy: Vec<Stars> = states.filter(|s| *s != Stars::None).collect();
                match busy.len() {
                    0 => Stars::None,
                    1 => Stars::Buried,
                    _ => return None,
                }
            } else {
                let center_ok = center.is_none_or(|c| c.stars == Stars::None);
                if !center_ok || states.clone().any(|s| s == Stars::Buried) {
                    return None;
                }
                Stars::Top
            }
        } else {
            Stars::None
        };
        Some(Entry {
            tree: Arc::new(Skel::Node {
                ty,
                dist: center.map(|c| c.tree.clone()),
                children: kids.iter().map(|(_, e)| e.tree.clone()).collect(),
            }),
            aut,
            stars,
        })
    }

    fn materialize(&self, s: &Skel) -> DhTree {
        let mut nodes = Vec::new();
        let mut next_dot = 1u32;
        let root = self.emit(s, &mut nodes, &mut next_dot);
        DhTree { nodes, root }
    }

    fn emit(&self, s: &Skel, nodes: &mut Vec<Node>, next_dot: &mut u32) -> Child {
        match s {
            Skel::Dot => {
                *next_dot += 1;
                Child::Leaf(*next_dot - 1)
            }
            Skel::Mark(i) => Child::Leaf(self.n as u32 + 1 + i),
            Skel::Node { ty, dist, children } => {
                let id = nodes.len();
                nodes.push(Node {
                    ty: *ty,
                    children: Vec::new(),
                    dist: dist.as_ref().map(|_| 0),
                });
                let mut kids: Vec<Child> = dist.iter().map(|c| self.emit(c, nodes, next_dot)).collect();
                kids.extend(children.iter().map(|c| self.emit(c, nodes, next_dot)));
                nodes[id].children = kids;
                Child::Node(id)
            }
        }
    }
}

/// Marked-tree statistics for exactly `n` unmarked leaves and `k` marks.
pub fn skeleton_tally(n: usize, k: usize, leaf3_only: bool) -> Tally {
    let mut acc = Tally::new();
    Skeletons::new(n, k, leaf3_only).for_each(|t, w| visit(t, n, k, w, &mut acc));
    if leaf3_only {
        acc.retain(|(_, s), _| s.family() == crate::Family::Leaf3);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumeration::count_trees;
    use crate::enumeration::marked_brute::{tally, Plan};
    use crate::Family;
    use num_bigint::BigInt;

    #[test]
    fn multiplicities_add_up_to_labeled_counts() {
        for m in 2..=7 {
            for k in 0..=3.min(m) {
                let n = m - k;
                for (fam, only) in [(Family::Dh, false), (Family::Leaf3, true)] {
                    let total = Skeletons::new(n, k, only).total();
                    assert_eq!(BigInt::from(total), count_trees(fam, m).unwrap(), "{fam:?} n={n} k={k}");
                }
            }
        }
    }

    #[test]
    fn skeleton_and_labeled_tallies_agree() {
        let labeled = tally(Plan {
            max_leaves: 6,
            max_marks: 3,
        });
        let mut merged = Tally::new();
        for m in 2..=6 {
            for k in 1..=3.min(m - 1) {
                for (key, c) in skeleton_tally(m - k, k, false) {
                    *merged.entry(key).or_insert(0) += c;
                }
            }
        }
        assert_eq!(merged, labeled);
    }

    #[test]
    fn leaf3_filter_keeps_exactly_the_leaf3_statistics() {
        for (n, k) in [(3, 2), (3, 3), (4, 2)] {
            let full = skeleton_tally(n, k, false);
            let only = skeleton_tally(n, k, true);
            let expect: Tally = full
                .into_iter()
                .filter(|((_, s), _)| s.family() == Family::Leaf3)
                .collect();
            assert_eq!(only, expect, "n={n} k={k}");
        }
    }
}
