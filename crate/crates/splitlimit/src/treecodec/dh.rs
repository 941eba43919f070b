//! Distance-hereditary recognition: pruning by pendants and twins, plus two
//! slow oracles (forbidden induced subgraphs, and distance preservation in
//! every connected induced subgraph) for small graphs.

use super::graph::Graph;
use crate::{Error, Result};

/// True iff `g` is distance-hereditary.  Errors on disconnected input.
pub fn is_dh(g: &Graph) -> Result<bool> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    Ok(super::decompose::elimination_order(g).is_some())
}

/// Pruning check on bitmask adjacency (`n ≤ 32`).  Isolated vertices may be
/// deleted too, so this accepts exactly the graphs whose components are all
/// distance-hereditary.
pub fn prunable_masks(adj: &[u32]) -> bool {
    let n = adj.len();
    let mut alive: u32 = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    'outer: while alive.count_ones() > 2 {
        let mut rest = alive;
        while rest != 0 {
            let x = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let nx = adj[x] & alive;
            if nx.count_ones() <= 1 {
                alive &= !(1 << x);
                continue 'outer;
            }
            let mut others = alive & !(1 << x);
            while others != 0 {
                let y = others.trailing_zeros() as usize;
                others &= others - 1;
                let ny = adj[y] & alive;
                let bx = 1u32 << x;
                let by = 1u32 << y;
                if nx & !by == ny & !bx {
                    alive &= !bx;
                    continue 'outer;
                }
            }
        }
        return false;
    }
    true
}

/// Connected and distance-hereditary, on bitmask adjacency.
pub fn is_dh_masks(adj: &[u32]) -> bool {
    connected_masks(adj, full(adj.len())) && prunable_masks(adj)
}

fn full(n: usize) -> u32 {
    if n == 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

fn connected_masks(adj: &[u32], set: u32) -> bool {
    if set == 0 {
        return true;
    }
    let mut seen = 1u32 << set.trailing_zeros();
    let mut frontier = seen;
    while frontier != 0 {
        let mut next = 0;
        let mut f = frontier;
        while f != 0 {
            let v = f.trailing_zeros() as usize;
            f &= f - 1;
            next |= adj[v] & set;
        }
        frontier = next & !seen;
        seen |= next;
    }
    seen == set
}

/// Which forbidden pattern, if any, the vertex set `s` induces.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Obstruction {
    Hole,
    House,
    Gem,
    Domino,
}

/// The obstruction induced by the vertex set `s`, if it is one.
pub fn obstruction_in(adj: &[u32], s: u32) -> Option<Obstruction> {
    let size = s.count_ones();
    if size < 5 || !connected_masks(adj, s) {
        return None;
    }
    let mut degs = Vec::with_capacity(size as usize);
    let mut rest = s;
    while rest != 0 {
        let v = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        degs.push((v, (adj[v] & s).count_ones()));
    }
    if degs.iter().all(|&(_, d)| d == 2) {
        return Some(Obstruction::Hole);
    }
    let edges: u32 = degs.iter().map(|&(_, d)| d).sum::<u32>() / 2;
    let mut seq: Vec<u32> = degs.iter().map(|&(_, d)| d).collect();
    seq.sort_unstable();
    let deg3: Vec<usize> = degs.iter().filter(|&&(_, d)| d == 3).map(|&(v, _)| v).collect();
    let deg3_adjacent = deg3.len() == 2 && adj[deg3[0]] >> deg3[1] & 1 == 1;
    match (size, edges) {
        (5, 6) if seq == [2, 2, 2, 3, 3] && deg3_adjacent => Some(Obstruction::House),
        (5, 7) if seq == [2, 2, 3, 3, 4] => Some(Obstruction::Gem),
        (6, 7) if seq == [2, 2, 2, 2, 3, 3] && deg3_adjacent && triangle_free(adj, s) => {
            Some(Obstruction::Domino)
        }
        _ => None,
    }
}

fn triangle_free(adj: &[u32], s: u32) -> bool {
    let mut rest = s;
    while rest != 0 {
        let v = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        let mut nb = adj[v] & s;
        while nb != 0 {
            let w = nb.trailing_zeros() as usize;
            nb &= nb - 1;
            if adj[v] & adj[w] & s != 0 {
                return false;
            }
        }
    }
    true
}

/// First induced house, gem, domino or hole found, scanning vertex subsets
/// in increasing bitmask order.  Exponential; meant for `n ≤ 12` or so.
pub fn find_obstruction(g: &Graph) -> Option<(Obstruction, Vec<u32>)> {
    let adj = g.masks();
    let n = g.n() as u32;
    for s in 0u64..(1u64 << n) {
        let s = s as u32;
        if let Some(kind) = obstruction_in(&adj, s) {
            return Some((kind, (0..n).filter(|&v| s >> v & 1 == 1).collect()));
        }
    }
    None
}

/// Distance-hereditary test by forbidden induced subgraphs.
pub fn is_dh_by_forbidden_subgraphs(g: &Graph) -> Result<bool> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    Ok(find_obstruction(g).is_none())
}

/// Distance-hereditary test straight from the definition: every connected
/// induced subgraph keeps the distances of `g`.  Exponential.
pub fn is_dh_by_definition(g: &Graph) -> Result<bool> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let adj = g.masks();
    let n = g.n();
    let whole = full(n);
    let base: Vec<Vec<u32>> = (0..n).map(|v| bfs_masks(&adj, whole, v)).collect();
    for s in 1u64..(1u64 << n) {
        let s = s as u32;
        if s.count_ones() < 3 || !connected_masks(&adj, s) {
            continue;
        }
        let mut rest = s;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let d = bfs_masks(&adj, s, v);
            let mut r2 = rest;
            while r2 != 0 {
                let w = r2.trailing_zeros() as usize;
                r2 &= r2 - 1;
                if d[w] != base[v][w] {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

fn bfs_masks(adj: &[u32], set: u32, src: usize) -> Vec<u32> {
    let mut dist = vec![u32::MAX; adj.len()];
    dist[src] = 0;
    let mut seen = 1u32 << src;
    let mut frontier = seen;
    let mut d = 0;
    while frontier != 0 {
        d += 1;
        let mut next = 0;
        let mut f = frontier;
        while f != 0 {
            let v = f.trailing_zeros() as usize;
            f &= f - 1;
            next |= adj[v] & set;
        }
        frontier = next & !seen;
        seen |= next;
        let mut f = frontier;
        while f != 0 {
            let v = f.trailing_zeros() as usize;
            f &= f - 1;
            dist[v] = d;
        }
    }
    dist
}

#[cfg(test)]
mod tests {
    use super::*;

    fn house() -> Graph {
        Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (1, 4)]).unwrap()
    }

    fn gem() -> Graph {
        Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (4, 0), (4, 1), (4, 2), (4, 3)]).unwrap()
    }

    fn domino() -> Graph {
        Graph::from_edges(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (1, 4)]).unwrap()
    }

    #[test]
    fn five_cycle_is_not_dh() {
        let c5 = Graph::cycle(5);
        assert!(!is_dh(&c5).unwrap());
        assert!(!is_dh_by_forbidden_subgraphs(&c5).unwrap());
        assert!(!is_dh_by_definition(&c5).unwrap());
        assert_eq!(find_obstruction(&c5).unwrap().0, Obstruction::Hole);
    }

    #[test]
    fn each_obstruction_is_recognized() {
        for (g, kind) in [
            (house(), Obstruction::House),
            (gem(), Obstruction::Gem),
            (domino(), Obstruction::Domino),
        ] {
            assert_eq!(find_obstruction(&g).unwrap().0, kind);
            assert!(!is_dh(&g).unwrap());
            assert!(!is_dh_by_definition(&g).unwrap());
        }
    }

    #[test]
    fn trees_and_cliques_are_dh() {
        let star = Graph::from_edges(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        for g in [Graph::path(7), star, Graph::complete(6), Graph::cycle(4)] {
            assert!(is_dh(&g).unwrap());
            assert!(is_dh_by_forbidden_subgraphs(&g).unwrap());
            assert!(is_dh_by_definition(&g).unwrap());
        }
    }

    #[test]
    fn disconnected_input_is_an_error() {
        let g = Graph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        assert!(matches!(is_dh(&g), Err(Error::Disconnected)));
        assert!(prunable_masks(&g.masks()));
    }

    #[test]
    fn three_oracles_agree_on_all_graphs_with_five_vertices() {
        let pairs: Vec<(u32, u32)> = (0..5u32)
            .flat_map(|u| (u + 1..5).map(move |v| (u, v)))
            .collect();
        for bits in 0u32..(1 << pairs.len()) {
            let edges: Vec<_> = (0..pairs.len())
                .filter(|&i| bits >> i & 1 == 1)
                .map(|i| pairs[i])
                .collect();
            let g = Graph::from_edges(5, &edges).unwrap();
            if !g.is_connected() {
                continue;
            }
            let a = is_dh(&g).unwrap();
            assert_eq!(a, is_dh_by_forbidden_subgraphs(&g).unwrap(), "{edges:?}");
            assert_eq!(a, is_dh_by_definition(&g).unwrap(), "{edges:?}");
            assert_eq!(a, is_dh_masks(&g.masks()));
        }
    }
}
