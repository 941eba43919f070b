//! Generating series of trees with marked leaves: one marked leaf with the
//! jump count to the root-leaf, the two-mark junction pieces, and the
//! product formula over the shape spanned by `k` marks.
//!
//! Types are indexed as `NodeType as usize` (K = 0, SC = 1, SX = 2).  In
//! `d[a][b]`, `a` is the type of the root-node and `b` the cotype of the
//! marked leaf.

use super::mpoly::MPoly;
use crate::crt::KProperTree;
use crate::series::{solve_fixpoint, BiSeries, Expr, Series, System};
use crate::{BigRational, Error, Family, RationalBiSeries, RationalSeries, Result};

const K: usize = 0;
const SC: usize = 1;
const SX: usize = 2;

/// Unmarked series of the dh or dh2c family.
#[derive(Clone, Debug)]
pub struct BaseSeries {
    pub family: Family,
    pub order: usize,
    pub z: RationalSeries,
    pub d_k: RationalSeries,
    pub d_sc: RationalSeries,
    pub d_sx: RationalSeries,
    /// `exp_{≥1}(z + D_K + D_SX)`.
    pub f: RationalSeries,
}

impl BaseSeries {
    /// Solves the three-class specification by fixpoint iteration.
    pub fn solve(family: Family, order: usize) -> Result<Self> {
        if family == Family::Leaf3 {
            return Err(Error::Invalid("leaf3 has its own series, see LeafSeries".into()));
        }
        let mut sys: System<BigRational> = System::new();
        let k = sys.unknown("K");
        let sc = sys.unknown("SC");
        let sx = sys.unknown("SX");
        sys.define(&k, (Expr::Z + sc.clone() + sx.clone()).exp_ge(2))?;
        sys.define(&sc, (Expr::Z + k.clone() + sx.clone()).exp_ge(2))?;
        let first = if family == Family::Dh {
            Expr::Z + k.clone() + sc.clone()
        } else {
            k.clone() + sc.clone()
        };
        sys.define(&sx, first * (Expr::Z + k + sx.clone()).exp_ge(1))?;
        let sol = solve_fixpoint(&sys, order)?;
        let z = Series::z(order);
        let d_k = sol.series("K");
        let d_sc = sol.series("SC");
        let d_sx = sol.series("SX");
        let f = (&(&z + &d_k) + &d_sx).exp_ge(1)?;
        Ok(BaseSeries {
            family,
            order,
            z,
            d_k,
            d_sc,
            d_sx,
            f,
        })
    }

    /// `D` for dh, `D̄ = D̄_K + D̄_SX` for dh2c.
    pub fn total(&self) -> RationalSeries {
        match self.family {
            Family::Dh => &(&self.d_k + &self.d_sc) + &self.d_sx,
            _ => &self.d_k + &self.d_sx,
        }
    }

    /// The factor multiplying `u` in the marked systems: `F` for dh,
    /// `F - z` for dh2c.
    pub fn jump_weight(&self) -> RationalSeries {
        match self.family {
            Family::Dh => self.f.clone(),
            _ => &self.f - &self.z,
        }
    }

    /// `(1+F)(1-2F)`.
    pub fn base_denominator(&self) -> RationalSeries {
        let one = Series::one(self.order);
        let two_f = &self.f + &self.f;
        &(&one + &self.f) * &(&one - &two_f)
    }

    /// `H = jump_weight / ((1+F)(1-2F))`.
    pub fn h(&self) -> Result<RationalSeries> {
        self.jump_weight().div(&self.base_denominator())
    }
}

/// The nine one-mark series `d[a][b]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Marked {
    pub d: [[RationalBiSeries; 3]; 3],
}

impl Marked {
    /// Sums over root types (`a = None`) and/or cotypes (`b = None`),
    /// restricted to `allowed`.
    pub fn get(&self, a: Option<usize>, b: Option<usize>, allowed: &[usize]) -> RationalBiSeries {
        let order = self.d[0][0].order();
        let rows: Vec<usize> = a.map_or_else(|| allowed.to_vec(), |x| vec![x]);
        let cols: Vec<usize> = b.map_or_else(|| allowed.to_vec(), |x| vec![x]);
        let mut acc = BiSeries::zero(order);
        for &r in &rows {
            for &c in &cols {
                acc = &acc + &self.d[r][c];
            }
        }
        acc
    }
}

/// Solves the marked systems exactly as written (with the `exp` factors,
/// before any simplification).
pub fn marked_system(base: &BaseSeries) -> Result<Marked> {
    let order = base.order;
    let z = &base.z;
    let e_kx = (&(z + &base.d_k) + &base.d_sx).exp_ge(0)?;
    let e1_kx = (&(z + &base.d_k) + &base.d_sx).exp_ge(1)?;
    let e1_cx = (&(z + &base.d_sc) + &base.d_sx).exp_ge(1)?;
    let center = match base.family {
        Family::Dh => &(z + &base.d_sc) + &base.d_k,
        _ => &base.d_sc + &base.d_k,
    };
    let jump_factor = &center * &e_kx;
    let mut sys: System<BigRational> = System::new();
    let names = ["K", "SC", "SX"];
    let mut v = Vec::new();
    for b in names {
        let row: Vec<Expr<BigRational>> = names.iter().map(|a| sys.unknown(&format!("{a}^{b}"))).collect();
        v.push(row);
    }
    // v[b][a] = D_a^b
    let one = || Expr::int(1);
    let kn = |s: &RationalSeries| Expr::known(s);
    for b in 0..3 {
        let (dk, dc, dx) = (v[b][K].clone(), v[b][SC].clone(), v[b][SX].clone());
        let is = |t: usize| -> Vec<Expr<BigRational>> { if b == t { vec![one()] } else { vec![] } };
        // K root: marked subtree is a bare leaf (cotype K) or an SC/SX tree
        let mut k_in = is(K);
        k_in.extend([dc.clone(), dx.clone()]);
        sys.define(&dk, Expr::Sum(k_in) * kn(&e1_cx))?;
        // SC root: marked subtree at an extremity, bare leaf has cotype SX
        let mut c_in = is(SX);
        c_in.extend([dk.clone(), dx.clone()]);
        sys.define(&dc, Expr::Sum(c_in) * kn(&e1_kx))?;
        // SX root: at the center (no jump, bare leaf has cotype SC) or at an
        // extremity (one jump, bare leaf has cotype SX)
        let mut at_center = is(SC);
        at_center.extend([dc.clone(), dk.clone()]);
        let mut at_extremity = is(SX);
        at_extremity.extend([dk, dx.clone()]);
        sys.define(
            &dx,
            Expr::Sum(at_center) * kn(&e1_kx) + Expr::U * Expr::Sum(at_extremity) * kn(&jump_factor),
        )?;
    }
    let sol = solve_fixpoint(&sys, order)?;
    let d = std::array::from_fn(|a| std::array::from_fn(|b| sol.get(&format!("{}^{}", names[a], names[b])).clone()));
    Ok(Marked { d })
}

/// Sign of the `F²/Δ` term in the closed form of `D_K^K`.  The dh2c
/// version variant with a minus is kept for comparison.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KkSign {
    Plus,
    Minus,
}

/// Closed forms `Q + M/(Δ)` with `Δ = (1+F)(1-2F) - u·jump_weight`.
pub fn marked_closed_forms(base: &BaseSeries, kk: KkSign) -> Result<Marked> {
    let order = base.order;
    let bi = |s: &RationalSeries| BiSeries::from_series(s);
    let one = Series::one(order);
    let f = &base.f;
    let delta = &bi(&base.base_denominator()) - &(&BiSeries::u(order) * &bi(&base.jump_weight()));
    let inv = delta.recip()?;
    let one_plus_f_inv = (&one + f).recip()?;
    let om = &one - f;
    let ff = f * f;
    let q_kk = f * &one_plus_f_inv;
    let q_xx = -&one_plus_f_inv;
    let q_kx = -&(f * &one_plus_f_inv);
    let frac = |num: &RationalSeries| &bi(num) * &inv;
    let kk_term = frac(&ff);
    let kk_term = if kk == KkSign::Minus && base.family == Family::Dh2c {
        -&kk_term
    } else {
        kk_term
    };
    let zero = BiSeries::zero(order);
    let d_kk = &bi(&q_kk) + &kk_term;
    let d_xx = &bi(&q_xx) + &frac(&(&om * &om));
    let d_cc = frac(&ff);
    let d_kx = &bi(&q_kx) + &frac(&(f * &om));
    let d_kc = frac(&ff);
    let d_xc = frac(&(f * &om));
    let mut d: [[RationalBiSeries; 3]; 3] = std::array::from_fn(|_| std::array::from_fn(|_| zero.clone()));
    d[K][K] = d_kk;
    d[SX][SX] = d_xx;
    d[SC][SC] = d_cc;
    d[K][SX] = d_kx.clone();
    d[SX][K] = d_kx;
    d[K][SC] = d_kc.clone();
    d[SC][K] = d_kc;
    d[SX][SC] = d_xc.clone();
    d[SC][SX] = d_xc;
    Ok(Marked { d })
}

/// Indicator sets of the junction formula.
fn in_a(a: usize, b: usize, c: usize) -> bool {
    a != SX && b != SC && c != SC
}

fn in_b(a: usize, b: usize, c: usize) -> bool {
    b != SX && a != SC && c != SC
}

fn in_c(a: usize, b: usize, c: usize) -> bool {
    c != SX && a != SC && b != SC
}

/// Junction series `J_a^{bc}` (two marked children of the root), in its
/// expanded form with the `exp` factors.
pub fn junction_expanded(base: &BaseSeries, a: usize, b: usize, c: usize) -> Result<RationalSeries> {
    let z = &base.z;
    let e_kx = (&(z + &base.d_k) + &base.d_sx).exp_ge(0)?;
    let e_cx = (&(z + &base.d_sc) + &base.d_sx).exp_ge(0)?;
    let center = match base.family {
        Family::Dh => &(z + &base.d_sc) + &base.d_k,
        _ => &base.d_sc + &base.d_k,
    };
    let set = [a, b, c];
    let n_abc = in_a(a, b, c) as i64 + in_b(a, b, c) as i64 + in_c(a, b, c) as i64;
    let mut out = e_kx.scale(&BigRational::from_integer(n_abc.into()));
    if !set.contains(&K) {
        out = &out + &e_cx;
    }
    if !set.contains(&SC) {
        out = &out + &(&center * &e_kx);
    }
    Ok(out)
}

/// `J_a^{bc} = n·(1+F) + [SC ∉ {a,b,c}]·jump_weight`; returns `n` and the
/// indicator.
pub fn junction_terms(a: usize, b: usize, c: usize) -> (i64, bool) {
    let set = [a, b, c];
    let n = in_a(a, b, c) as i64 + in_b(a, b, c) as i64 + in_c(a, b, c) as i64 + !set.contains(&K) as i64;
    (n, !set.contains(&SC))
}

/// Junction series in terms of `F`.
pub fn junction(base: &BaseSeries, a: usize, b: usize, c: usize) -> RationalSeries {
    let one = Series::one(base.order);
    let (n, with_jump) = junction_terms(a, b, c);
    let mut out = (&one + &base.f).scale(&BigRational::from_integer(n.into()));
    if with_jump {
        out = &out + &base.jump_weight();
    }
    out
}

/// Types allowed at the root edge and at marked leaves: all three for dh,
/// K and SX for dh2c.
pub fn end_types(f: Family) -> Vec<usize> {
    match f {
        Family::Dh => vec![K, SC, SX],
        _ => vec![K, SX],
    }
}

/// The shape formula: sum over type/cotype assignments of products of
/// one-mark series along the edges and junctions at the branch vertices,
/// expanded to `z`-order `order`.  Computed bottom-up: for each edge the
/// partial sum is indexed by the type at its upper end.
pub fn shape_series(base: &BaseSeries, marked: &Marked, t0: &KProperTree, order: usize) -> MPoly {
    let nv = t0.edge_count();
    let ends = end_types(base.family);
    let junctions: Vec<Vec<Vec<MPoly>>> = (0..3)
        .map(|a| {
            (0..3)
                .map(|b| (0..3).map(|c| MPoly::from_series(&junction(base, a, b, c), nv, order)).collect())
                .collect()
        })
        .collect();
    // below[e][tp] for every edge, filled children first
    let mut below: Vec<Option<Vec<MPoly>>> = vec![None; nv];
    let mut todo: Vec<usize> = (0..nv).collect();
    while let Some(pos) = todo.iter().position(|&e| t0.child_edges(e).iter().all(|&c| below[c].is_some())) {
        let e = todo.remove(pos);
        let kids = t0.child_edges(e);
        let upper_types: Vec<Option<usize>> = if e == 0 { vec![None] } else { (0..3).map(Some).collect() };
        let mut per_type = Vec::new();
        for tp in upper_types {
            let mut acc = MPoly::zero(nv, order);
            if kids.is_empty() {
                let s = marked.get(tp, None, &ends);
                acc = MPoly::from_bi(&s, e, nv, order);
            } else {
                let (s, g) = (kids[0].min(kids[1]), kids[0].max(kids[1]));
                let bs = below[s].as_ref().unwrap();
                let bg = below[g].as_ref().unwrap();
                for ct in 0..3 {
                    let d = match tp {
                        Some(t) => marked.d[t][ct].clone(),
                        None => marked.get(None, Some(ct), &ends),
                    };
                    let mut inner = MPoly::zero(nv, order);
                    for ts in 0..3 {
                        for tg in 0..3 {
                            inner = inner.add(&junctions[ct][ts][tg].mul(&bs[ts]).mul(&bg[tg]));
                        }
                    }
                    acc = acc.add(&MPoly::from_bi(&d, e, nv, order).mul(&inner));
                }
            }
            per_type.push(acc);
        }
        below[e] = Some(per_type);
    }
    below[0].take().unwrap().remove(0)
}

/// Series of the 3-leaf family.
#[derive(Clone, Debug)]
pub struct LeafSeries {
    pub order: usize,
    pub z: RationalSeries,
    /// `e^z - 1`.
    pub l: RationalSeries,
    pub e_sx: RationalSeries,
    pub e_sc: RationalSeries,
    pub e_k: RationalSeries,
    /// `L·exp(L + E_SX)`.
    pub p: RationalSeries,
}

impl LeafSeries {
    pub fn solve(order: usize) -> Result<Self> {
        let z = Series::z(order);
        let l = z.exp_ge(1)?;
        let mut sys: System<BigRational> = System::new();
        let sx = sys.unknown("SX");
        sys.define(&sx, Expr::known(&l) * (Expr::known(&l) + sx.clone()).exp_ge(1))?;
        let e_sx = solve_fixpoint(&sys, order)?.series("SX");
        let l_plus = &l + &e_sx;
        let e_sc = l_plus.exp_ge(2)?;
        let e_k = &l + &(&(&e_sx + &e_sc) * &l);
        let p = &l * &l_plus.exp_ge(0)?;
        Ok(LeafSeries {
            order,
            z,
            l,
            e_sx,
            e_sc,
            e_k,
            p,
        })
    }

    pub fn total(&self) -> RationalSeries {
        &(&self.e_sx + &self.e_sc) + &self.e_k
    }

    /// `(E_SX^SX, E_SX^•)` from their defining linear system.
    pub fn marked_system(&self) -> Result<(RationalBiSeries, RationalBiSeries)> {
        let ez = self.z.exp_ge(0)?;
        let set = (&self.l + &self.e_sx).exp_ge(0)?;
        let set1 = (&self.l + &self.e_sx).exp_ge(1)?;
        let l_set = &self.l * &set;
        let mut sys: System<BigRational> = System::new();
        let xx = sys.unknown("SX^SX");
        let xb = sys.unknown("SX^*");
        sys.define(&xx, Expr::U * (Expr::int(1) + xx.clone()) * Expr::known(&l_set))?;
        sys.define(
            &xb,
            Expr::known(&ez) * Expr::known(&set1) + Expr::U * (Expr::known(&ez) + xb.clone()) * Expr::known(&l_set),
        )?;
        let sol = solve_fixpoint(&sys, self.order)?;
        Ok((sol.get("SX^SX").clone(), sol.get("SX^*").clone()))
    }

    /// `(-1 + 1/(1-uP), -e^z + e^z·exp(e^z-1+E_SX)/(1-uP))`.
    pub fn marked_closed_forms(&self) -> Result<(RationalBiSeries, RationalBiSeries)> {
        let order = self.order;
        let bi = |s: &RationalSeries| BiSeries::from_series(s);
        let geo = (&BiSeries::one(order) - &(&BiSeries::u(order) * &bi(&self.p))).recip()?;
        let ez = self.z.exp_ge(0)?;
        let xx = &geo - &BiSeries::one(order);
        let g = &ez * &(&self.l + &self.e_sx).exp_ge(0)?;
        let xb = &(&bi(&g) * &geo) - &bi(&ez);
        Ok((xx, xb))
    }

    /// Junction piece with both marks at extremities of an SX root.
    pub fn junction(&self) -> Result<RationalSeries> {
        Ok(&self.l * &(&self.e_sx + &self.l).exp_ge(0)?)
    }

    /// Product formula over a shape with `k ≥ 2` marks (edges `1..=k` end at
    /// the marks).
    pub fn shape_series(&self, t0: &KProperTree, order: usize) -> Result<MPoly> {
        let k = t0.k();
        let nv = t0.edge_count();
        let (xx, xb) = self.marked_closed_forms()?;
        let i = MPoly::from_series(&self.junction()?, nv, order);
        let mut acc = MPoly::one(nv, order);
        for e in 0..nv {
            let s = if e <= k { &xb } else { &xx };
            acc = acc.mul(&MPoly::from_bi(s, e, nv, order));
        }
        for _ in 1..k {
            acc = acc.mul(&i);
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumeration::marked_brute::{tally, Plan, Stat, Tally};
    use crate::treecodec::NodeType;
    use num_bigint::BigInt;
    use std::sync::OnceLock;

    const LEAVES: usize = 6;

    fn brute() -> &'static Tally {
        static T: OnceLock<Tally> = OnceLock::new();
        T.get_or_init(|| tally(Plan { max_leaves: LEAVES, max_marks: 3 }))
    }

    fn count(n: usize, s: Stat) -> BigInt {
        BigInt::from(brute().get(&(n, s)).copied().unwrap_or(0))
    }

    fn times_fact(c: BigRational, n: usize) -> BigInt {
        let f: BigInt = (1..=n).fold(BigInt::from(1), |a, b| a * b);
        let v = c * BigRational::from_integer(f);
        assert!(v.is_integer());
        v.to_integer()
    }

    #[test]
    fn one_mark_systems_match_brute_force() {
        for fam in [Family::Dh, Family::Dh2c] {
            let m = marked_system(&BaseSeries::solve(fam, LEAVES).unwrap()).unwrap();
            for (a, ta) in NodeType::ALL.into_iter().enumerate() {
                for (b, tb) in NodeType::ALL.into_iter().enumerate() {
                    for n in 1..LEAVES {
                        for j in 0..LEAVES {
                            let s = Stat::Marked { family: fam, root: ta, cotype: tb, jumps: j as u32 };
                            assert_eq!(times_fact(m.d[a][b].coeff(n, j), n), count(n, s), "{fam:?} {ta:?}^{tb:?} n={n} j={j}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn closed_forms_solve_the_systems() {
        for fam in [Family::Dh, Family::Dh2c] {
            let base = BaseSeries::solve(fam, 12).unwrap();
            let sys = marked_system(&base).unwrap();
            assert_eq!(marked_closed_forms(&base, KkSign::Plus).unwrap(), sys, "{fam:?}");
        }
        let base = BaseSeries::solve(Family::Dh2c, 8).unwrap();
        let minus = marked_closed_forms(&base, KkSign::Minus).unwrap();
        assert_ne!(minus.d[K][K], marked_system(&base).unwrap().d[K][K]);
    }

    #[test]
    fn marked_series_are_symmetric_where_expected() {
        let base = BaseSeries::solve(Family::Dh, 10).unwrap();
        let m = marked_system(&base).unwrap();
        assert_eq!(m.d[K][SX], m.d[SX][K]);
        assert_eq!(m.d[K][SC], m.d[SC][K]);
        assert_eq!(m.d[SX][SC], m.d[SC][SX]);
    }

    #[test]
    fn junctions_match_expansion_and_brute_force() {
        for fam in [Family::Dh, Family::Dh2c] {
            let base = BaseSeries::solve(fam, LEAVES).unwrap();
            for (a, ta) in NodeType::ALL.into_iter().enumerate() {
                for (b, tb) in NodeType::ALL.into_iter().enumerate() {
                    for (c, tc) in NodeType::ALL.into_iter().enumerate() {
                        let j = junction(&base, a, b, c);
                        assert_eq!(j, junction_expanded(&base, a, b, c).unwrap());
                        for n in 1..=LEAVES - 2 {
                            let s = Stat::Junction { family: fam, a: ta, b: tb, c: tc };
                            assert_eq!(times_fact(j.coeff(n).clone(), n), count(n, s), "{fam:?} J_{ta:?}^{tb:?}{tc:?} n={n}");
                        }
                    }
                }
            }
        }
    }

    fn check_shapes(fam: Family, ks: &[usize], series: impl Fn(&KProperTree, usize) -> MPoly) {
        for &k in ks {
            let order = LEAVES - k;
            for t0 in KProperTree::all(k) {
                let p = series(&t0, order);
                let mut seen = 0;
                for ((n, e), c) in p.terms() {
                    if *n == 0 {
                        continue;
                    }
                    let s = Stat::Shape { family: fam, tree: t0.clone(), jumps: e.clone() };
                    assert_eq!(times_fact(c.clone(), *n), count(*n, s), "{fam:?} k={k} {t0:?} n={n} {e:?}");
                    seen += 1;
                }
                // every brute-force class appears in the series
                let brute_classes = brute()
                    .keys()
                    .filter(|(n, s)| *n <= order && matches!(s, Stat::Shape { family, tree, .. } if *family == fam && *tree == t0))
                    .count();
                assert_eq!(seen, brute_classes, "{fam:?} {t0:?}");
            }
        }
    }

    #[test]
    fn shape_series_match_brute_force() {
        for fam in [Family::Dh, Family::Dh2c] {
            let base = BaseSeries::solve(fam, LEAVES).unwrap();
            let m = marked_system(&base).unwrap();
            check_shapes(fam, &[1, 2, 3], |t, o| shape_series(&base, &m, t, o));
        }
    }

    #[test]
    fn leaf_marked_series() {
        let ls = LeafSeries::solve(LEAVES).unwrap();
        let (xx, xb) = ls.marked_system().unwrap();
        assert_eq!((xx.clone(), xb.clone()), ls.marked_closed_forms().unwrap());
        let i = ls.junction().unwrap();
        for n in 1..LEAVES {
            for j in 0..LEAVES {
                let at = |cotype| count(n, Stat::Marked { family: Family::Leaf3, root: NodeType::SX, cotype, jumps: j as u32 });
                assert_eq!(times_fact(xx.coeff(n, j), n), at(NodeType::SX), "n={n} j={j}");
                let all: BigInt = NodeType::ALL.into_iter().map(at).sum();
                assert_eq!(times_fact(xb.coeff(n, j), n), all, "n={n} j={j}");
            }
            if n <= LEAVES - 2 {
                assert_eq!(times_fact(i.coeff(n).clone(), n), count(n, Stat::LeafJunction), "n={n}");
            }
        }
        check_shapes(Family::Leaf3, &[2, 3], |t, o| ls.shape_series(t, o).unwrap());
    }

    #[test]
    fn leaf_totals_match_tables() {
        let ls = LeafSeries::solve(10).unwrap();
        let counts = crate::enumeration::count_trees_upto(Family::Leaf3, 10);
        for n in 1..=10 {
            assert_eq!(times_fact(ls.total().coeff(n).clone(), n), counts[n - 1], "n={n}");
        }
    }
}
