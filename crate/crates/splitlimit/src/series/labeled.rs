//! Labeled counts stored as integers (`a[n] = n!·[z^n]`), with binomial
//! convolution.  Much faster than rational series at high order.

use super::{factorial, Series};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::sync::Arc;

/// Pascal triangle rows `0..=n`.
#[derive(Clone, Debug)]
pub struct Binomials {
    rows: Vec<Vec<BigInt>>,
}

impl Binomials {
    pub fn new(n: usize) -> Self {
        let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(n + 1);
        for m in 0..=n {
            let mut row = vec![BigInt::one(); m + 1];
            for k in 1..m {
                row[k] = &rows[m - 1][k - 1] + &rows[m - 1][k];
            }
            rows.push(row);
        }
        Binomials { rows }
    }

    pub fn max(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn get(&self, n: usize, k: usize) -> &BigInt {
        &self.rows[n][k]
    }
}

/// Labeled counts truncated at `order`.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledSeries {
    pub a: Vec<BigInt>,
}

impl LabeledSeries {
    pub fn zero(order: usize) -> Self {
        LabeledSeries {
            a: vec![BigInt::zero(); order + 1],
        }
    }

    pub fn z(order: usize) -> Self {
        let mut s = Self::zero(order);
        if order >= 1 {
            s.a[1] = BigInt::one();
        }
        s
    }

    pub fn order(&self) -> usize {
        self.a.len() - 1
    }

    pub fn add(&self, other: &Self) -> Self {
        LabeledSeries {
            a: self.a.iter().zip(&other.a).map(|(x, y)| x + y).collect(),
        }
    }

    pub fn one(order: usize) -> Self {
        let mut s = Self::zero(order);
        s.a[0] = BigInt::one();
        s
    }

    pub fn from_counts(counts: &[BigInt], order: usize) -> Self {
        let mut s = Self::zero(order);
        for (x, c) in s.a.iter_mut().zip(counts) {
            *x = c.clone();
        }
        s
    }

    pub fn sub(&self, other: &Self) -> Self {
        LabeledSeries {
            a: self.a.iter().zip(&other.a).map(|(x, y)| x - y).collect(),
        }
    }

    pub fn scale(&self, k: i64) -> Self {
        let k = BigInt::from(k);
        LabeledSeries {
            a: self.a.iter().map(|x| x * &k).collect(),
        }
    }

    /// `1/(1 - self)`, for a series with zero constant term.
    pub fn geometric(&self, b: &Binomials) -> Self {
        assert!(self.a[0].is_zero(), "geometric series of a series with nonzero constant term");
        let n = self.order();
        let mut g = Self::one(n);
        for m in 1..=n {
            let mut acc = BigInt::zero();
            for k in 1..=m {
                if self.a[k].is_zero() {
                    continue;
                }
                acc += b.get(m, k) * &self.a[k] * &g.a[m - k];
            }
            g.a[m] = acc;
        }
        g
    }

    pub fn pow(&self, mut k: usize, b: &Binomials) -> Self {
        let mut acc = Self::one(self.order());
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base, b);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base, b);
            }
        }
        acc
    }

    /// Top coefficient of the product only.
    pub fn mul_top(&self, other: &Self, b: &Binomials) -> BigInt {
        let n = self.order().min(other.order());
        let mut acc = BigInt::zero();
        for k in 0..=n {
            if self.a[k].is_zero() || other.a[n - k].is_zero() {
                continue;
            }
            acc += b.get(n, k) * &self.a[k] * &other.a[n - k];
        }
        acc
    }

    pub fn mul(&self, other: &Self, b: &Binomials) -> Self {
        let n = self.order().min(other.order());
        let mut out = Self::zero(n);
        for m in 0..=n {
            let mut acc = BigInt::zero();
            for k in 0..=m {
                if self.a[k].is_zero() || other.a[m - k].is_zero() {
                    continue;
                }
                acc += b.get(m, k) * &self.a[k] * &other.a[m - k];
            }
            out.a[m] = acc;
        }
        out
    }

    /// Labeled sets with at least `r` blocks from `self`.
    pub fn exp_ge(&self, r: usize, b: &Binomials) -> Self {
        assert!(self.a[0].is_zero(), "exp of a series with nonzero constant term");
        let mut set = OnlineSet::new(r, self.order());
        for n in 0..=self.order() {
            set.extend(&self.a, n, b);
        }
        LabeledSeries {
            a: set.counts().to_vec(),
        }
    }

    pub fn to_series(&self) -> Series<BigRational> {
        Series::from_labeled_counts(&self.a, self.order())
    }

    pub fn from_series(s: &Series<BigRational>) -> Self {
        LabeledSeries {
            a: s.labeled_counts(),
        }
    }
}

/// Incrementally maintained `Set_{≥r}(A)` counts.
///
/// The block containing the smallest label has size `k`; the rest is a set
/// with at least `r-1` blocks, so `E_r[n] = Σ C(n-1,k-1)·A[k]·E_{r-1}[n-k]`.
/// For `r ≥ 2` the coefficient at `n` needs `A` only below `n`.
#[derive(Clone, Debug)]
pub struct OnlineSet {
    // levels[j] = Set_{≥j}(A), j = 0..=r
    levels: Vec<Vec<BigInt>>,
}

impl OnlineSet {
    pub fn new(r: usize, order: usize) -> Self {
        OnlineSet {
            levels: (0..=r).map(|_| Vec::with_capacity(order + 1)).collect(),
        }
    }

    pub fn r(&self) -> usize {
        self.levels.len() - 1
    }

    /// Computes the coefficient at `n` (all smaller ones must be present);
    /// `a` must be known up to `n` (or `n-1` when `r ≥ 2`).
    pub fn extend(&mut self, a: &[BigInt], n: usize, b: &Binomials) {
        assert_eq!(self.levels[0].len(), n, "extend out of order");
        if n == 0 {
            for (j, lv) in self.levels.iter_mut().enumerate() {
                lv.push(if j == 0 { BigInt::one() } else { BigInt::zero() });
            }
            return;
        }
        let get = |k: usize| a.get(k).cloned().unwrap_or_default();
        let mut exp_n = BigInt::zero();
        for k in 1..=n {
            let ak = get(k);
            if ak.is_zero() {
                continue;
            }
            exp_n += b.get(n - 1, k - 1) * &ak * &self.levels[0][n - k];
        }
        self.levels[0].push(exp_n);
        for j in 1..self.levels.len() {
            let mut v = BigInt::zero();
            for k in 1..=n {
                let lower = &self.levels[j - 1][n - k];
                if lower.is_zero() {
                    continue;
                }
                let ak = get(k);
                if ak.is_zero() {
                    continue;
                }
                v += b.get(n - 1, k - 1) * &ak * lower;
            }
            self.levels[j].push(v);
        }
    }

    pub fn counts(&self) -> &[BigInt] {
        &self.levels[self.levels.len() - 1]
    }

    /// `Set_{≥j}(A)` counts computed so far.
    pub fn level(&self, j: usize) -> &[BigInt] {
        &self.levels[j]
    }

    /// Top-level coefficient at `n` before `a[n]` is known (`r ≥ 2`); all
    /// levels must already reach `n-1`.
    pub fn peek_top(&self, a: &[BigInt], n: usize, b: &Binomials) -> BigInt {
        let r = self.r();
        assert!(r >= 2, "peek needs at least two blocks");
        assert_eq!(self.levels[0].len(), n, "peek out of order");
        let lower = &self.levels[r - 1];
        let mut v = BigInt::zero();
        for k in 1..n {
            if a[k].is_zero() || lower[n - k].is_zero() {
                continue;
            }
            v += b.get(n - 1, k - 1) * &a[k] * &lower[n - k];
        }
        v
    }
}

/// Shared binomial table sized for `order`.
pub fn binomials(order: usize) -> Arc<Binomials> {
    Arc::new(Binomials::new(order))
}

/// `n!` as a rational, handy when moving between conventions.
pub fn factorial_q(n: usize) -> BigRational {
    BigRational::from_integer(factorial(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::RationalSeries;

    #[test]
    fn exp_ge_matches_rational_route() {
        let order = 12;
        let b = Binomials::new(order);
        let z = RationalSeries::z(order);
        // A = z + z^2 (labeled counts 1, 2)
        let a = &z + &(&z * &z);
        let la = LabeledSeries::from_series(&a);
        for r in 0..4 {
            let exact = a.exp_ge(r).unwrap().labeled_counts();
            assert_eq!(la.exp_ge(r, &b).a, exact, "r = {r}");
        }
    }

    #[test]
    fn geometric_and_pow_match_rational_route() {
        let order = 12;
        let b = Binomials::new(order);
        let z = RationalSeries::z(order);
        let a = &z.exp_ge(1).unwrap() + &(&z * &z);
        let la = LabeledSeries::from_series(&a);
        let one = RationalSeries::one(order);
        let g = (&one - &a).recip().unwrap();
        assert_eq!(la.geometric(&b).a, g.labeled_counts());
        assert_eq!(la.pow(5, &b).a, a.pow(5).labeled_counts());
        assert_eq!(la.mul_top(&la, &b), (&a * &a).labeled_counts()[order]);
    }

    #[test]
    fn product_matches_rational_route() {
        let order = 10;
        let b = Binomials::new(order);
        let z = RationalSeries::z(order);
        let x = z.exp_ge(1).unwrap();
        let y = (&z * &z).exp_ge(0).unwrap();
        let lx = LabeledSeries::from_series(&x);
        let ly = LabeledSeries::from_series(&y);
        assert_eq!(lx.mul(&ly, &b).a, (&x * &y).labeled_counts());
    }

    #[test]
    fn peek_matches_extend() {
        let b = Binomials::new(9);
        let a: Vec<BigInt> = (0..=9).map(|n| BigInt::from(n * n % 7)).collect();
        let mut set = OnlineSet::new(3, 9);
        for n in 0..=9 {
            let peek = (n > 0).then(|| set.peek_top(&a[..n], n, &b));
            set.extend(&a, n, &b);
            if let Some(p) = peek {
                assert_eq!(p, set.counts()[n]);
            }
        }
    }

    #[test]
    fn set_partitions_are_bell_numbers() {
        let b = Binomials::new(10);
        let ones = LabeledSeries {
            a: (0..=10).map(|n| BigInt::from((n > 0) as u8)).collect(),
        };
        let bell = [1u64, 1, 2, 5, 15, 52, 203, 877, 4140, 21147, 115975];
        let e = ones.exp_ge(0, &b);
        for (n, v) in bell.iter().enumerate() {
            assert_eq!(e.a[n], BigInt::from(*v));
        }
    }
}
