//! Coefficientwise verification of the closed forms, against the defining
//! systems, the counting tables and brute-force enumeration.

use super::marked::{
    junction, junction_expanded, marked_closed_forms, marked_system, shape_series, BaseSeries, KkSign,
    LeafSeries, Marked,
};
use super::marked_brute::{Stat, Tally};
use super::skeleton::skeleton_tally;
use super::mpoly::MPoly;
use crate::crt::KProperTree;
use crate::series::Series;
use crate::treecodec::NodeType;
use crate::{BigRational, Error, Family, RationalBiSeries, RationalSeries, Result};
use num_traits::{One, Zero};
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Offending monomial on failure, a short summary otherwise.
    pub detail: String,
    /// Reported but not required to pass.
    pub informational: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityReport {
    pub order: usize,
    pub brute_leaves: usize,
    pub checks: Vec<Check>,
}

impl IdentityReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed || c.informational)
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.passed && !c.informational)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Options {
    /// Order of the exact identities.
    pub order: usize,
    /// Order of the derivative check.
    pub derivative_order: usize,
    /// Largest tree (marks included) in the brute-force comparison.
    pub brute_leaves: usize,
    /// Same for the 3-leaf family, whose trees can be generated alone.
    pub leaf3_leaves: usize,
    pub max_marks: usize,
}

impl Options {
    pub fn new(order: usize) -> Self {
        Options {
            order,
            derivative_order: order.min(20),
            brute_leaves: 8,
            leaf3_leaves: 10,
            max_marks: 3,
        }
    }
}

/// Runs every identity to `order` with the default brute-force sizes.
pub fn verify_identities(order: usize) -> Result<IdentityReport> {
    verify_identities_with(Options::new(order))
}

pub fn verify_identities_with(opts: Options) -> Result<IdentityReport> {
    if opts.order < 2 {
        return Err(Error::Invalid("identity order must be at least 2".into()));
    }
    if opts.brute_leaves < 3 || opts.brute_leaves > 9 || opts.leaf3_leaves < opts.brute_leaves || opts.leaf3_leaves > 11 {
        return Err(Error::Invalid("brute-force leaves must lie in 3..=9 (3..=11 for leaf3)".into()));
    }
    let mut checks = Vec::new();
    for fam in [Family::Dh, Family::Dh2c] {
        dh_like(fam, &opts, &mut checks)?;
    }
    leaf3(&opts, &mut checks)?;
    let brute = marked_tally(&opts);
    for fam in [Family::Dh, Family::Dh2c] {
        dh_like_brute(fam, &opts, &brute, &mut checks)?;
    }
    leaf3_brute(&opts, &brute, &mut checks)?;
    Ok(IdentityReport {
        order: opts.order,
        brute_leaves: opts.brute_leaves,
        checks,
    })
}

/// Marked statistics from the skeleton generator: every family up to
/// `brute_leaves`, then 3-leaf trees alone up to `leaf3_leaves`.
fn marked_tally(opts: &Options) -> Tally {
    let mut acc = Tally::new();
    for m in 2..=opts.leaf3_leaves {
        let leaf3_only = m > opts.brute_leaves;
        for k in 1..=opts.max_marks.min(m - 1) {
            for (key, c) in skeleton_tally(m - k, k, leaf3_only) {
                *acc.entry(key).or_insert(0) += c;
            }
        }
    }
    acc
}

fn check(name: impl Into<String>, failure: Option<String>, ok: impl Into<String>) -> Check {
    Check {
        name: name.into(),
        passed: failure.is_none(),
        detail: failure.unwrap_or_else(|| ok.into()),
        informational: false,
    }
}

fn series_eq(name: &str, lhs: &RationalSeries, rhs: &RationalSeries) -> Check {
    let n = lhs.order().min(rhs.order());
    let bad = (0..=n).find(|&i| lhs.coeff(i) != rhs.coeff(i));
    check(
        name,
        bad.map(|i| format!("z^{i}: {} vs {}", lhs.coeff(i), rhs.coeff(i))),
        format!("equal to order {n}"),
    )
}

fn bi_eq(name: &str, lhs: &RationalBiSeries, rhs: &RationalBiSeries) -> Check {
    let n = lhs.order().min(rhs.order());
    check(
        name,
        lhs.first_difference(rhs)
            .map(|(i, j)| format!("z^{i} u^{j}: {} vs {}", lhs.coeff(i, j), rhs.coeff(i, j))),
        format!("equal to order {n}"),
    )
}

fn tag(t: usize) -> &'static str {
    ["K", "SC", "SX"][t]
}

fn int(k: i64) -> BigRational {
    BigRational::from_integer(k.into())
}

fn dh_like(fam: Family, opts: &Options, out: &mut Vec<Check>) -> Result<()> {
    let p = fam.tag();
    let order = opts.order;
    let base = BaseSeries::solve(fam, order)?;
    let one = Series::one(order);
    let z = &base.z;
    let f = &base.f;
    let one_plus_f = &one + f;
    // D_K and D_SX in terms of F
    let (dk, dsx, weight) = match fam {
        Family::Dh => (
            (&f.div(&one_plus_f)? - z).scale(&BigRational::new(1.into(), 2.into())),
            (f * f).div(&one_plus_f)?,
            f.clone(),
        ),
        _ => {
            let f_minus_z = f - z;
            (
                f_minus_z.div(&one_plus_f.scale(&int(2)))?,
                (f * &f_minus_z).div(&one_plus_f)?,
                f_minus_z,
            )
        }
    };
    out.push(series_eq(&format!("{p}: D_K in terms of F"), &base.d_k, &dk));
    out.push(series_eq(&format!("{p}: D_SX in terms of F"), &base.d_sx, &dsx));
    out.push(series_eq(&format!("{p}: D_SC = D_K"), &base.d_sc, &base.d_k));
    let center = match fam {
        Family::Dh => &(z + &base.d_sc) + &base.d_k,
        _ => &base.d_sc + &base.d_k,
    };
    let lhs = &center * &(&(z + &base.d_sx) + &base.d_k).exp_ge(0)?;
    out.push(series_eq(&format!("{p}: star/clique simplification"), &lhs, &weight));

    let sys = marked_system(&base)?;
    let closed = marked_closed_forms(&base, KkSign::Plus)?;
    for a in 0..3 {
        for b in 0..3 {
            out.push(bi_eq(
                &format!("{p}: D_{}^{} closed form", tag(a), tag(b)),
                &sys.d[a][b],
                &closed.d[a][b],
            ));
        }
    }
    if fam == Family::Dh2c {
        let minus = marked_closed_forms(&base, KkSign::Minus)?;
        let mut c = bi_eq(&format!("{p}: D_K^K with a minus before the fraction"), &sys.d[0][0], &minus.d[0][0]);
        c.informational = true;
        out.push(c);
    }
    for (a, b) in [(0, 2), (0, 1), (2, 1)] {
        out.push(bi_eq(
            &format!("{p}: D_{}^{} = D_{}^{}", tag(a), tag(b), tag(b), tag(a)),
            &sys.d[a][b],
            &sys.d[b][a],
        ));
    }
    out.push(jump_factorization(p, &base, &sys)?);

    let mut bad = None;
    let mut sym = None;
    for a in 0..3 {
        for b in 0..3 {
            for c in 0..3 {
                let j = junction(&base, a, b, c);
                if bad.is_none() && j != junction_expanded(&base, a, b, c)? {
                    bad = Some(format!("J_{}^{}{}", tag(a), tag(b), tag(c)));
                }
                if sym.is_none() && (j != junction(&base, a, c, b) || j != junction(&base, b, a, c)) {
                    sym = Some(format!("J_{}^{}{}", tag(a), tag(b), tag(c)));
                }
            }
        }
    }
    out.push(check(format!("{p}: junction formula"), bad, "27 junctions"));
    out.push(check(format!("{p}: junction symmetries"), sym, "27 junctions"));

    if fam == Family::Dh {
        let d_order = opts.derivative_order;
        let small = BaseSeries::solve(fam, d_order + 1)?;
        let m = marked_system(&small)?;
        for (a, d) in [&small.d_k, &small.d_sc, &small.d_sx].into_iter().enumerate() {
            let marked = m.get(Some(a), None, &[0, 1, 2]).at_u(&BigRational::one()).truncate(d_order);
            out.push(series_eq(
                &format!("{p}: sum_b D_{}^b(z,1) = D_{}'", tag(a), tag(a)),
                &marked,
                &d.derivative().truncate(d_order),
            ));
        }
    }

    let tables = super::count_trees_upto(fam, order);
    let total = base.total();
    let bad = (1..=order).find(|&n| total.labeled_count(n) != BigRational::from_integer(tables[n - 1].clone()));
    out.push(check(
        format!("{p}: series total = counting tables"),
        bad.map(|n| format!("n = {n}: {} vs {}", total.labeled_count(n), tables[n - 1])),
        format!("sizes 1..={order}"),
    ));
    Ok(())
}

/// `[u^1] D_a^b · ((1+F)(1-2F))² = num_a · num_b · weight`, with
/// `num_K = num_SC = F` and `num_SX = 1 - F`: the jump series is the same
/// for all pairs and the prefactor splits into one factor per end.
fn jump_factorization(p: &str, base: &BaseSeries, m: &Marked) -> Result<Check> {
    let one = Series::one(base.order);
    let nums = [base.f.clone(), base.f.clone(), &one - &base.f];
    let den = base.base_denominator();
    let den2 = &den * &den;
    let w = base.jump_weight();
    let mut bad = None;
    for a in 0..3 {
        for b in 0..3 {
            let lhs = &m.d[a][b].u_coeff(1) * &den2;
            let rhs = &(&nums[a] * &nums[b]) * &w;
            if bad.is_none() {
                if let Some(n) = (0..=base.order).find(|&n| lhs.coeff(n) != rhs.coeff(n)) {
                    bad = Some(format!("D_{}^{} at z^{n}", tag(a), tag(b)));
                }
            }
        }
    }
    Ok(check(format!("{p}: jump coefficient factorizes"), bad, "nine pairs"))
}

fn leaf3(opts: &Options, out: &mut Vec<Check>) -> Result<()> {
    let order = opts.order;
    let ls = LeafSeries::solve(order)?;
    let (xx, xb) = ls.marked_system()?;
    let (cxx, cxb) = ls.marked_closed_forms()?;
    out.push(bi_eq("leaf3: E_SX^SX closed form", &xx, &cxx));
    out.push(bi_eq("leaf3: E_SX^* closed form", &xb, &cxb));
    out.push(series_eq("leaf3: [u] E_SX^SX = P", &xx.u_coeff(1), &ls.p));

    let d_order = opts.derivative_order;
    let small = LeafSeries::solve(d_order + 1)?;
    let (_, sb) = small.marked_system()?;
    out.push(series_eq(
        "leaf3: E_SX^*(z,1) = E_SX'",
        &sb.at_u(&BigRational::one()).truncate(d_order),
        &small.e_sx.derivative().truncate(d_order),
    ));

    let tables = super::count_trees_upto(Family::Leaf3, order);
    let total = ls.total();
    let bad = (1..=order).find(|&n| total.labeled_count(n) != BigRational::from_integer(tables[n - 1].clone()));
    out.push(check(
        "leaf3: series total = counting tables",
        bad.map(|n| format!("n = {n}")),
        format!("sizes 1..={order}"),
    ));
    Ok(())
}

fn brute_count(b: &Tally, n: usize, s: Stat) -> BigRational {
    BigRational::from_integer(b.get(&(n, s)).copied().unwrap_or(0).into())
}

/// Compares a bivariate series with brute-force counts for sizes `1..=max_n`.
fn bi_vs_brute(
    name: &str,
    s: &RationalBiSeries,
    max_n: usize,
    brute: impl Fn(usize, u32) -> BigRational,
) -> Check {
    let mut bad = None;
    'outer: for n in 1..=max_n {
        for j in 0..=n + 1 {
            let lhs = s.labeled_count(n, j);
            let rhs = brute(n, j as u32);
            if lhs != rhs {
                bad = Some(format!("z^{n} u^{j}: series {lhs}, brute force {rhs}"));
                break 'outer;
            }
        }
    }
    check(name, bad, format!("sizes 1..={max_n}"))
}

fn shapes_vs_brute(
    name: &str,
    fam: Family,
    k: usize,
    leaves: usize,
    brute: &Tally,
    series: impl Fn(&KProperTree, usize) -> Result<MPoly>,
) -> Result<Check> {
    let order = leaves - k;
    let mut bad = None;
    let mut classes = 0usize;
    for t0 in KProperTree::all(k) {
        let p = series(&t0, order)?;
        for ((n, e), c) in p.terms() {
            if *n == 0 {
                continue;
            }
            let lhs = c * BigRational::from_integer(factorial(*n));
            let rhs = brute_count(
                brute,
                *n,
                Stat::Shape {
                    family: fam,
                    tree: t0.clone(),
                    jumps: e.clone(),
                },
            );
            classes += 1;
            if bad.is_none() && lhs != rhs {
                bad = Some(format!("{:?} z^{n} u^{e:?}: series {lhs}, brute force {rhs}", t0.shape_key()));
            }
        }
        // classes seen by brute force but absent from the series
        let missing = brute.iter().find(|((n, s), _)| {
            *n >= 1
                && *n <= order
                && matches!(s, Stat::Shape { family, tree, jumps }
                    if *family == fam && *tree == t0 && p.coeff(&(*n, jumps.clone())).is_zero())
        });
        if bad.is_none() {
            if let Some(((n, s), c)) = missing {
                bad = Some(format!("size {n}: {s:?} has {c} trees but no series term"));
            }
        }
    }
    if classes == 0 && bad.is_none() {
        bad = Some(format!("vacuous: no tree with {k} marks within {leaves} leaves"));
    }
    Ok(check(
        name,
        bad,
        format!("{classes} monomials, trees up to {leaves} leaves"),
    ))
}

fn factorial(n: usize) -> num_bigint::BigInt {
    (1..=n).fold(num_bigint::BigInt::from(1), |a, b| a * b)
}

fn dh_like_brute(fam: Family, opts: &Options, brute: &Tally, out: &mut Vec<Check>) -> Result<()> {
    let p = fam.tag();
    let leaves = opts.brute_leaves;
    let base = BaseSeries::solve(fam, leaves)?;
    let m = marked_system(&base)?;
    for (a, ta) in NodeType::ALL.into_iter().enumerate() {
        for (b, tb) in NodeType::ALL.into_iter().enumerate() {
            out.push(bi_vs_brute(
                &format!("{p}: D_{}^{} vs brute force", tag(a), tag(b)),
                &m.d[a][b],
                leaves - 1,
                |n, jumps| {
                    brute_count(
                        brute,
                        n,
                        Stat::Marked {
                            family: fam,
                            root: ta,
                            cotype: tb,
                            jumps,
                        },
                    )
                },
            ));
        }
    }
    let mut bad = None;
    for (a, ta) in NodeType::ALL.into_iter().enumerate() {
        for (b, tb) in NodeType::ALL.into_iter().enumerate() {
            for (c, tc) in NodeType::ALL.into_iter().enumerate() {
                let j = junction(&base, a, b, c);
                for n in 1..=leaves - 2 {
                    let lhs = j.labeled_count(n);
                    let rhs = brute_count(
                        brute,
                        n,
                        Stat::Junction {
                            family: fam,
                            a: ta,
                            b: tb,
                            c: tc,
                        },
                    );
                    if bad.is_none() && lhs != rhs {
                        bad = Some(format!("J_{}^{}{} z^{n}: series {lhs}, brute force {rhs}", tag(a), tag(b), tag(c)));
                    }
                }
            }
        }
    }
    out.push(check(format!("{p}: junctions vs brute force"), bad, format!("sizes 1..={}", leaves - 2)));
    for k in 1..=opts.max_marks.min(leaves - 1) {
        out.push(shapes_vs_brute(
            &format!("{p}: shape product formula, k = {k}"),
            fam,
            k,
            leaves,
            brute,
            |t, o| Ok(shape_series(&base, &m, t, o)),
        )?);
    }
    Ok(())
}

fn leaf3_brute(opts: &Options, brute: &Tally, out: &mut Vec<Check>) -> Result<()> {
    let leaves = opts.leaf3_leaves;
    let ls = LeafSeries::solve(leaves)?;
    let (xx, xb) = ls.marked_system()?;
    let at = |n: usize, root: NodeType, cotype: NodeType, jumps: u32| {
        brute_count(
            brute,
            n,
            Stat::Marked {
                family: Family::Leaf3,
                root,
                cotype,
                jumps,
            },
        )
    };
    out.push(bi_vs_brute("leaf3: E_SX^SX vs brute force", &xx, leaves - 1, |n, j| {
        at(n, NodeType::SX, NodeType::SX, j)
    }));
    out.push(bi_vs_brute("leaf3: E_SX^* vs brute force", &xb, leaves - 1, |n, j| {
        NodeType::ALL.into_iter().map(|c| at(n, NodeType::SX, c, j)).sum()
    }));
    // rerooting at the mark swaps root type and cotype
    out.push(bi_vs_brute("leaf3: E_*^SX = E_SX^*", &xb, leaves - 1, |n, j| {
        NodeType::ALL.into_iter().map(|r| at(n, r, NodeType::SX, j)).sum()
    }));
    let i = ls.junction()?;
    let bad = (1..=leaves - 2).find(|&n| i.labeled_count(n) != brute_count(brute, n, Stat::LeafJunction));
    out.push(check(
        "leaf3: junction I vs brute force",
        bad.map(|n| format!("z^{n}: series {}, brute force {}", i.labeled_count(n), brute_count(brute, n, Stat::LeafJunction))),
        format!("sizes 1..={}", leaves - 2),
    ));
    for k in 2..=opts.max_marks.min(leaves - 1) {
        out.push(shapes_vs_brute(
            &format!("leaf3: shape product formula, k = {k}"),
            Family::Leaf3,
            k,
            leaves,
            brute,
            |t, o| ls.shape_series(t, o),
        )?);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_identity_holds_at_low_order() {
        let report = verify_identities_with(Options {
            order: 10,
            derivative_order: 8,
            brute_leaves: 6,
            leaf3_leaves: 7,
            max_marks: 2,
        })
        .unwrap();
        for c in &report.checks {
            assert!(c.passed || c.informational, "{}: {}", c.name, c.detail);
        }
        let minus = report.checks.iter().find(|c| c.informational).unwrap();
        assert!(!minus.passed);
    }

    #[test]
    fn order_below_two_is_rejected() {
        assert!(verify_identities(1).is_err());
    }
}
