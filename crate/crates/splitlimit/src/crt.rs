//! Finite-dimensional distance laws of the Brownian CRT.
//!
//! For `k` marked leaves the reduced tree is a uniform `k`-proper tree and
//! the `2k-1` edge lengths have joint density proportional to
//! `s·exp(-s²/2)` with `s` their sum.

use rand::Rng;
use rand_distr::{ChiSquared, Distribution, Exp1};
use serde::Serialize;

const NONE: usize = usize::MAX;

/// An unrooted tree with leaves `0..=k` (leaf 0 is the root-leaf) and `k-1`
/// internal vertices of degree 3, stored rooted at leaf 0.
///
/// Vertices `0..=k` are the leaves and `k+1..2k` the internal vertices.
/// Edge `i` is the edge above vertex `below[i]`: edge 0 hangs from the
/// root-leaf, edges `1..=k` end at the leaves, and the remaining internal
/// edges are sorted by the set of leaves beneath them.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct KProperTree {
    k: usize,
    parent: Vec<usize>,
    /// Vertex at the lower end of each edge.
    below: Vec<usize>,
    /// Edge above each vertex (`NONE` for the root-leaf).
    edge_above: Vec<usize>,
}

impl KProperTree {
    /// Canonical form of the tree given by `parent` (leaves `0..=k`, any
    /// numbering for internal vertices, `parent[0]` ignored).  Also returns
    /// the map from input vertices to canonical vertices.
    pub fn canonical(k: usize, parent: &[usize]) -> (Self, Vec<usize>) {
        let nv = parent.len();
        assert_eq!(nv, 2 * k, "a {k}-proper tree has {} vertices", 2 * k);
        let mut children = vec![Vec::new(); nv];
        for v in 1..nv {
            children[parent[v]].push(v);
        }
        let mut clade = vec![0u64; nv];
        fn fill(v: usize, children: &[Vec<usize>], clade: &mut [u64], k: usize) -> u64 {
            let mut m = if (1..=k).contains(&v) { 1u64 << v } else { 0 };
            for &c in &children[v] {
                m |= fill(c, children, clade, k);
            }
            clade[v] = m;
            m
        }
        fill(0, &children, &mut clade, k);
        let top = children[0][0];
        let mut internal: Vec<usize> = (k + 1..nv).filter(|&v| v != top).collect();
        internal.sort_by_key(|&v| clade[v]);
        let mut map = vec![NONE; nv];
        map[0] = 0;
        for (v, m) in map.iter_mut().enumerate().take(k + 1).skip(1) {
            *m = v;
        }
        if top > k {
            map[top] = k + 1;
        }
        for (i, &v) in internal.iter().enumerate() {
            map[v] = k + 2 + i;
        }
        let mut new_parent = vec![NONE; nv];
        for v in 1..nv {
            new_parent[map[v]] = map[parent[v]];
        }
        let mut below: Vec<usize> = Vec::with_capacity(nv - 1);
        below.push(map[top]);
        for v in 1..=k {
            if v != map[top] {
                below.push(v);
            }
        }
        for &v in &internal {
            below.push(map[v]);
        }
        let mut edge_above = vec![NONE; nv];
        for (e, &v) in below.iter().enumerate() {
            edge_above[v] = e;
        }
        (
            KProperTree {
                k,
                parent: new_parent,
                below,
                edge_above,
            },
            map,
        )
    }

    /// The one-edge tree.
    pub fn single() -> Self {
        Self::canonical(1, &[NONE, 0]).0
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn edge_count(&self) -> usize {
        self.below.len()
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        (v != 0).then(|| self.parent[v])
    }

    /// Upper and lower endpoints of edge `e`.
    pub fn edge(&self, e: usize) -> (usize, usize) {
        let v = self.below[e];
        (self.parent[v], v)
    }

    pub fn edge_above(&self, v: usize) -> Option<usize> {
        (v != 0).then(|| self.edge_above[v])
    }

    pub fn is_leaf(&self, v: usize) -> bool {
        v <= self.k
    }

    /// Child edges of the lower endpoint of `e`, in increasing index order.
    pub fn child_edges(&self, e: usize) -> Vec<usize> {
        let w = self.below[e];
        let mut out: Vec<usize> = (0..self.edge_count())
            .filter(|&f| self.parent[self.below[f]] == w)
            .collect();
        out.sort_unstable();
        out
    }

    /// Sets of marked leaves (bit `i` for leaf `i`) below each internal edge,
    /// sorted; identifies the shape.
    pub fn shape_key(&self) -> Vec<u64> {
        let mut out: Vec<u64> = self
            .below
            .iter()
            .skip(self.k + 1)
            .map(|&v| self.clade(v))
            .collect();
        out.sort_unstable();
        out
    }

    fn clade(&self, v: usize) -> u64 {
        (1..=self.k)
            .filter(|&l| self.is_ancestor(v, l))
            .fold(0, |m, l| m | 1 << l)
    }

    fn is_ancestor(&self, a: usize, mut v: usize) -> bool {
        loop {
            if v == a {
                return true;
            }
            if v == 0 {
                return false;
            }
            v = self.parent[v];
        }
    }

    /// Edges on the path between vertices `a` and `b`.
    pub fn path_edges(&self, a: usize, b: usize) -> Vec<usize> {
        let mut up_a = vec![a];
        while let Some(p) = self.parent(*up_a.last().unwrap()) {
            up_a.push(p);
        }
        let mut out = Vec::new();
        let mut v = b;
        while !up_a.contains(&v) {
            out.push(self.edge_above[v]);
            v = self.parent[v];
        }
        for &u in up_a.iter().take_while(|&&u| u != v) {
            out.push(self.edge_above[u]);
        }
        out.sort_unstable();
        out
    }

    /// Degrees of all vertices, for structural checks.
    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.parent.len()];
        for e in 0..self.edge_count() {
            let (u, v) = self.edge(e);
            d[u] += 1;
            d[v] += 1;
        }
        d
    }

    /// All `(2k-3)!!` shapes, by grafting in every possible way.
    pub fn all(k: usize) -> Vec<KProperTree> {
        let mut trees = vec![vec![NONE, 0usize]];
        for _ in 2..=k {
            let mut next = Vec::new();
            for t in &trees {
                for v in 1..t.len() {
                    next.push(graft(t, v));
                }
            }
            trees = next;
        }
        trees
            .into_iter()
            .map(|p| Self::canonical(k, &relabel_leaves(&p, k)).0)
            .collect()
    }
}

// Splits the edge above `v` with a new internal vertex carrying a new leaf;
// ids are handed out in insertion order.
fn graft(parent: &[usize], v: usize) -> Vec<usize> {
    let mut p = parent.to_vec();
    let x = p.len();
    p.push(p[v]);
    p.push(x);
    p[v] = x;
    p
}

// Rewrites a tree grown by `graft` (leaf j at id 2j-1 for j ≥ 1, internal
// vertex created with leaf j at id 2j-2) into leaves-first numbering.
fn relabel_leaves(p: &[usize], k: usize) -> Vec<usize> {
    let mut id = vec![NONE; p.len()];
    id[0] = 0;
    id[1] = 1;
    for j in 2..=k {
        id[2 * j - 1] = j;
        id[2 * j - 2] = k + j - 1;
    }
    let mut out = vec![NONE; p.len()];
    for v in 1..p.len() {
        out[id[v]] = id[p[v]];
    }
    out
}

/// Uniform `k`-proper tree by grafting leaves `2..=k` on uniform edges.
pub fn sample_kproper<R: Rng + ?Sized>(k: usize, rng: &mut R) -> KProperTree {
    assert!(k >= 1);
    let mut p = vec![NONE, 0usize];
    for _ in 2..=k {
        let v = rng.gen_range(1..p.len());
        p = graft(&p, v);
    }
    KProperTree::canonical(k, &relabel_leaves(&p, k)).0
}

/// Edge lengths: a chi(2k) total split by a uniform point of the simplex.
pub fn sample_lengths<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Vec<f64> {
    let s = ChiSquared::new(2.0 * k as f64).unwrap().sample(rng).sqrt();
    let m = 2 * k - 1;
    let w: Vec<f64> = (0..m).map(|_| Exp1.sample(rng)).collect();
    let total: f64 = w.iter().sum();
    w.into_iter().map(|x| s * x / total).collect()
}

/// Edge lengths by rejection from independent exponentials, accepting with
/// probability proportional to the target density over the proposal.
pub fn sample_lengths_rejection<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Vec<f64> {
    let m = 2 * k - 1;
    let lambda = m as f64 / (2.0 * k as f64).sqrt();
    // target/proposal ∝ h(s) = s·exp(-s²/2 + λs), maximal at s*
    let h = |s: f64| s * (-s * s / 2.0 + lambda * s).exp();
    let s_star = (lambda + (lambda * lambda + 4.0).sqrt()) / 2.0;
    let h_max = h(s_star);
    loop {
        let x: Vec<f64> = (0..m)
            .map(|_| {
                let e: f64 = Exp1.sample(rng);
                e / lambda
            })
            .collect();
        let s: f64 = x.iter().sum();
        if rng.gen::<f64>() * h_max <= h(s) {
            return x;
        }
    }
}

/// Path-length distances between the leaves `0..=k`.
pub fn distance_matrix(tree: &KProperTree, lengths: &[f64]) -> Vec<Vec<f64>> {
    let k = tree.k();
    let mut d = vec![vec![0.0; k + 1]; k + 1];
    for i in 0..=k {
        for j in i + 1..=k {
            let v: f64 = tree.path_edges(i, j).iter().map(|&e| lengths[e]).sum();
            d[i][j] = v;
            d[j][i] = v;
        }
    }
    d
}

/// Whether `d` satisfies the four-point condition up to `tol`.
pub fn is_tree_metric(d: &[Vec<f64>], tol: f64) -> bool {
    let n = d.len();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for e in 0..n {
                    let mut s = [d[a][b] + d[c][e], d[a][c] + d[b][e], d[a][e] + d[b][c]];
                    s.sort_by(|x, y| x.partial_cmp(y).unwrap());
                    if s[2] - s[1] > tol {
                        return false;
                    }
                }
            }
        }
    }
    true
}

#[derive(Clone, Debug, Serialize)]
pub struct CrtSample {
    #[serde(skip)]
    pub tree: KProperTree,
    pub shape: Vec<u64>,
    pub lengths: Vec<f64>,
    pub matrix: Vec<Vec<f64>>,
}

pub fn sample<R: Rng + ?Sized>(k: usize, rng: &mut R) -> CrtSample {
    let tree = sample_kproper(k, rng);
    let lengths = sample_lengths(k, rng);
    let matrix = distance_matrix(&tree, &lengths);
    CrtSample {
        shape: tree.shape_key(),
        tree,
        lengths,
        matrix,
    }
}

/// Distribution function of the chi law with `dof` degrees of freedom.
pub fn chi_cdf(dof: f64, x: f64) -> f64 {
    use statrs::distribution::{ChiSquared as StatChi2, ContinuousCDF};
    if x <= 0.0 {
        return 0.0;
    }
    StatChi2::new(dof).unwrap().cdf(x * x)
}

/// `(2k-3)!!`, the number of `k`-proper trees.
pub fn double_factorial_odd(k: usize) -> u64 {
    (1..k).map(|i| 2 * i as u64 - 1).product::<u64>().max(1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::{HashMap, HashSet};

    #[test]
    fn shape_counts() {
        for k in 1..=6 {
            let all = KProperTree::all(k);
            let keys: HashSet<_> = all.iter().map(|t| t.shape_key()).collect();
            assert_eq!(all.len() as u64, double_factorial_odd(k));
            assert_eq!(keys.len(), all.len(), "k = {k}");
        }
    }

    #[test]
    fn structure_of_sampled_trees() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for k in 1..=7 {
            for _ in 0..20 {
                let t = sample_kproper(k, &mut rng);
                assert_eq!(t.edge_count(), 2 * k - 1);
                let deg = t.degrees();
                assert!(deg[..=k].iter().all(|&d| d == 1));
                assert!(deg[k + 1..].iter().all(|&d| d == 3));
                assert_eq!(t.edge(0).0, 0);
                for i in 1..=k {
                    assert_eq!(t.edge(if k == 1 { 0 } else { i }).1, i);
                }
            }
        }
    }

    #[test]
    fn one_edge_tree() {
        let t = KProperTree::single();
        assert_eq!(t.edge_count(), 1);
        let d = distance_matrix(&t, &[2.5]);
        assert_eq!(d, vec![vec![0.0, 2.5], vec![2.5, 0.0]]);
    }

    #[test]
    fn zero_lengths_give_zero_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let t = sample_kproper(4, &mut rng);
        let d = distance_matrix(&t, &[0.0; 7]);
        assert!(d.iter().flatten().all(|&x| x == 0.0));
    }

    #[test]
    fn four_point_condition() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let s = sample(5, &mut rng);
            assert!(is_tree_metric(&s.matrix, 1e-9));
            for i in 0..=5 {
                assert_eq!(s.matrix[i][i], 0.0);
                for j in 0..i {
                    assert!(s.matrix[i][j] > 0.0);
                    assert_eq!(s.matrix[i][j], s.matrix[j][i]);
                }
            }
        }
    }

    #[test]
    fn k3_shapes_are_uniform() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let n = 30_000;
        let mut freq: HashMap<Vec<u64>, usize> = HashMap::new();
        for _ in 0..n {
            *freq.entry(sample_kproper(3, &mut rng).shape_key()).or_default() += 1;
        }
        assert_eq!(freq.len(), 3);
        let sigma = (n as f64 * (1.0 / 3.0) * (2.0 / 3.0)).sqrt();
        for &c in freq.values() {
            assert!((c as f64 - n as f64 / 3.0).abs() < 4.0 * sigma);
        }
    }

    #[test]
    fn rayleigh_mean_for_one_leaf() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 40_000;
        let mean = (0..n).map(|_| sample_lengths(1, &mut rng)[0]).sum::<f64>() / n as f64;
        let sd = (2.0 - std::f64::consts::PI / 2.0).sqrt() / (n as f64).sqrt();
        assert!((mean - (std::f64::consts::PI / 2.0).sqrt()).abs() < 4.0 * sd);
    }
}
