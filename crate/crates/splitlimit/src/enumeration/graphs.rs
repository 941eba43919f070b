//! Exhaustive counting of small labeled graphs in each family, straight from
//! graph-side characterizations (no trees involved).
//!
//! Graphs are grown one vertex at a time.  All three families are closed
//! under taking induced subgraphs once connectivity is dropped, so only
//! graphs that are still "free" (no forbidden pattern anywhere) need to be
//! extended.

use crate::treecodec::{obstruction_in, prunable_masks};
use crate::Family;
use rayon::prelude::*;

/// How a new vertex is screened against the forbidden patterns.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Screen {
    /// Look for a house, gem, domino or hole through the new vertex.
    Forbidden,
    /// Run pendant/twin pruning on the whole graph.
    Pruning,
}

fn extensions(graphs: &[Vec<u32>], screen: Screen) -> Vec<Vec<u32>> {
    graphs
        .par_iter()
        .flat_map_iter(|adj| {
            let v = adj.len();
            (0u32..1 << v).filter_map(move |nb| {
                let mut next = adj.clone();
                for (w, a) in next.iter_mut().enumerate() {
                    *a |= (nb >> w & 1) << v;
                }
                next.push(nb);
                let ok = match screen {
                    Screen::Pruning => prunable_masks(&next),
                    Screen::Forbidden => new_vertex_is_clean(&next, v),
                };
                ok.then_some(next)
            })
        })
        .collect()
}

fn new_vertex_is_clean(adj: &[u32], v: usize) -> bool {
    let others = (1u32 << v) - 1;
    let mut sub = others;
    loop {
        if sub.count_ones() >= 4 && obstruction_in(adj, sub | 1 << v).is_some() {
            return false;
        }
        if sub == 0 {
            return true;
        }
        sub = (sub - 1) & others;
    }
}

/// Every labeled graph on `m` vertices whose components are all
/// distance-hereditary, as bitmask adjacency lists.
pub fn free_graphs(m: usize, screen: Screen) -> Vec<Vec<u32>> {
    assert!(m <= 10, "too many vertices for exhaustive generation");
    let mut level = vec![Vec::new()];
    for _ in 0..m {
        level = extensions(&level, screen);
    }
    level
}

fn connected(adj: &[u32]) -> bool {
    let full = (1u32 << adj.len()) - 1;
    let mut seen = 1u32;
    let mut frontier = 1u32;
    while frontier != 0 {
        let mut next = 0;
        let mut f = frontier;
        while f != 0 {
            next |= adj[f.trailing_zeros() as usize];
            f &= f - 1;
        }
        frontier = next & !seen;
        seen |= next;
    }
    seen == full
}

/// No vertex whose removal disconnects the rest.
pub fn biconnected_masks(adj: &[u32]) -> bool {
    let n = adj.len();
    if n < 3 || !connected(adj) {
        return false;
    }
    (0..n).all(|v| {
        let rest: Vec<u32> = (0..n)
            .filter(|&w| w != v)
            .map(|w| compress(adj[w], v))
            .collect();
        connected(&rest)
    })
}

fn compress(mask: u32, v: usize) -> u32 {
    let low = mask & ((1 << v) - 1);
    let high = (mask >> (v + 1)) << v;
    low | high
}

fn chordal(adj: &[u32]) -> bool {
    let mut alive = (1u32 << adj.len()) - 1;
    'outer: while alive != 0 {
        let mut rest = alive;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let nb = adj[v] & alive;
            let mut it = nb;
            let mut clique = true;
            while it != 0 {
                let w = it.trailing_zeros() as usize;
                it &= it - 1;
                if nb & !(1 << w) & !adj[w] != 0 {
                    clique = false;
                    break;
                }
            }
            if clique {
                alive &= !(1 << v);
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// Degree sequences and edge lists of the bull, the dart and the gem.
const SMALL_PATTERNS: [&[(usize, usize)]; 3] = [
    &[(0, 1), (1, 2), (2, 0), (0, 3), (1, 4)],
    &[(0, 1), (0, 2), (1, 2), (1, 3), (2, 3), (1, 4)],
    &[(0, 1), (1, 2), (2, 3), (4, 0), (4, 1), (4, 2), (4, 3)],
];

fn pattern_masks(edges: &[(usize, usize)]) -> [u32; 5] {
    let mut m = [0u32; 5];
    for &(a, b) in edges {
        m[a] |= 1 << b;
        m[b] |= 1 << a;
    }
    m
}

fn induces(adj: &[u32], verts: &[usize; 5], pat: &[u32; 5]) -> bool {
    let sub: [u32; 5] = std::array::from_fn(|i| {
        (0..5).fold(0, |acc, j| acc | ((adj[verts[i]] >> verts[j] & 1) << j))
    });
    let mut sub_deg: Vec<u32> = sub.iter().map(|m| m.count_ones()).collect();
    let mut pat_deg: Vec<u32> = pat.iter().map(|m| m.count_ones()).collect();
    sub_deg.sort_unstable();
    pat_deg.sort_unstable();
    if sub_deg != pat_deg {
        return false;
    }
    let mut perm = [0usize, 1, 2, 3, 4];
    any_permutation(&mut perm, &mut |p| {
        (0..5).all(|i| (0..5).all(|j| (sub[p[i]] >> p[j] & 1) == (pat[i] >> j & 1)))
    })
}

/// Heap's algorithm, stopping at the first permutation accepted by `f`.
fn any_permutation(a: &mut [usize; 5], f: &mut impl FnMut(&[usize; 5]) -> bool) -> bool {
    let mut c = [0usize; 5];
    if f(a) {
        return true;
    }
    let mut i = 0;
    while i < 5 {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            if f(a) {
                return true;
            }
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    false
}

/// Chordal with no induced bull, dart or gem, the classical graph-side
/// description of 3-leaf powers.
pub fn three_leaf_power_masks(adj: &[u32]) -> bool {
    if !chordal(adj) {
        return false;
    }
    let n = adj.len();
    let pats: Vec<[u32; 5]> = SMALL_PATTERNS.iter().map(|e| pattern_masks(e)).collect();
    let mut verts = [0usize; 5];
    fn rec(adj: &[u32], pats: &[[u32; 5]], verts: &mut [usize; 5], depth: usize, start: usize) -> bool {
        if depth == 5 {
            return pats.iter().any(|p| induces(adj, verts, p));
        }
        (start..adj.len()).any(|v| {
            verts[depth] = v;
            rec(adj, pats, verts, depth + 1, v + 1)
        })
    }
    n < 5 || !rec(adj, &pats, &mut verts, 0, 0)
}

/// Whether a connected DH graph belongs to the family, judged on the graph.
pub fn graph_in_family(f: Family, adj: &[u32]) -> bool {
    match f {
        Family::Dh => true,
        Family::Dh2c => biconnected_masks(adj),
        Family::Leaf3 => three_leaf_power_masks(adj),
    }
}

/// Number of connected labeled graphs of the family on `m` vertices.
pub fn brute_force_graph_count(f: Family, m: usize, screen: Screen) -> u64 {
    free_graphs(m, screen)
        .par_iter()
        .filter(|adj| connected(adj) && graph_in_family(f, adj))
        .count() as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::treecodec::{is_dh_masks, leaf_power, Graph, PlainTree};

    #[test]
    fn tiny_counts() {
        assert_eq!(brute_force_graph_count(Family::Dh, 3, Screen::Forbidden), 4);
        assert_eq!(brute_force_graph_count(Family::Dh2c, 3, Screen::Forbidden), 1);
        assert_eq!(brute_force_graph_count(Family::Leaf3, 3, Screen::Forbidden), 4);
    }

    #[test]
    fn both_screens_agree() {
        for m in 1..=6 {
            let mut a = free_graphs(m, Screen::Forbidden);
            let mut b = free_graphs(m, Screen::Pruning);
            a.sort();
            b.sort();
            assert_eq!(a, b, "m = {m}");
        }
    }

    #[test]
    fn extension_finds_every_connected_dh_graph_on_six_vertices() {
        let n = 6;
        let pairs: Vec<(u32, u32)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        let mut direct = 0u64;
        for bits in 0u32..1 << pairs.len() {
            let edges: Vec<_> = (0..pairs.len()).filter(|&i| bits >> i & 1 == 1).map(|i| pairs[i]).collect();
            let g = Graph::from_edges(n as usize, &edges).unwrap();
            if g.is_connected() && is_dh_masks(&g.masks()) {
                direct += 1;
            }
        }
        assert_eq!(brute_force_graph_count(Family::Dh, 6, Screen::Pruning), direct);
    }

    #[test]
    fn leaf_powers_pass_the_graph_test() {
        // spiders and caterpillars with subdivided legs
        let trees = [
            vec![(0, 1), (0, 2), (0, 3), (3, 4), (3, 5), (5, 6), (5, 7), (1, 8)],
            vec![(0, 1), (1, 2), (2, 3), (3, 4), (0, 5), (1, 6), (2, 7), (3, 8), (4, 9), (4, 10)],
            vec![(0, 1), (0, 2), (0, 3), (1, 4), (1, 5), (2, 6), (2, 7), (3, 8), (3, 9)],
        ];
        for edges in trees {
            let t = PlainTree::from_edges(edges.len() + 1, &edges);
            let g = leaf_power(&t, 3);
            assert!(three_leaf_power_masks(&g.masks()), "{edges:?}");
        }
    }

    #[test]
    fn biconnectivity_matches_articulation_points() {
        for adj in free_graphs(5, Screen::Pruning) {
            if !connected(&adj) {
                continue;
            }
            let g = Graph::from_masks(&adj);
            assert_eq!(biconnected_masks(&adj), g.articulation_points().is_empty());
        }
    }
}
