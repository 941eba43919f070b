//! Truncated power series, exact when the coefficient ring is
//! [`BigRational`], plus a Jacobi fixpoint solver for combinatorial
//! specifications.
//!
//! Series follow the exponential convention: the labeled count of size `n`
//! is `n!·[z^n]`.
//!
//! ```
//! use splitlimit::RationalSeries;
//! let z = RationalSeries::z(6);
//! let set2 = z.exp_ge(2).unwrap();
//! let counts = set2.labeled_counts();
//! assert_eq!(counts[1], 0.into());
//! assert_eq!(counts[5], 1.into());
//! ```

pub mod labeled;

use crate::scalar::Real;
use crate::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Signed, Zero};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Coefficient rings accepted by [`Series`] and [`BiSeries`].
pub trait Coeff: Clone + fmt::Debug + PartialEq + Num + FromPrimitive + Send + Sync {}
impl<T> Coeff for T where T: Clone + fmt::Debug + PartialEq + Num + FromPrimitive + Send + Sync {}

/// Coefficients that can be pushed into a [`Real`].
pub trait IntoReal {
    fn to_real<R: Real>(&self) -> R;
}

impl IntoReal for BigRational {
    fn to_real<R: Real>(&self) -> R {
        R::from_rational(self)
    }
}

impl IntoReal for f64 {
    fn to_real<R: Real>(&self) -> R {
        R::lit(*self)
    }
}

fn from_usize<C: Coeff>(n: usize) -> C {
    C::from_usize(n).expect("small integer")
}

/// Univariate series truncated at `order` (coefficients `0..=order`).
#[derive(Clone, Debug, PartialEq)]
pub struct Series<C> {
    c: Vec<C>,
}

impl<C: Coeff> Series<C> {
    pub fn zero(order: usize) -> Self {
        Series {
            c: vec![C::zero(); order + 1],
        }
    }

    pub fn one(order: usize) -> Self {
        Self::constant(C::one(), order)
    }

    pub fn constant(value: C, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.c[0] = value;
        s
    }

    /// The series `z`.
    pub fn z(order: usize) -> Self {
        Self::monomial(C::one(), 1, order)
    }

    pub fn monomial(value: C, degree: usize, order: usize) -> Self {
        let mut s = Self::zero(order);
        if degree <= order {
            s.c[degree] = value;
        }
        s
    }

    /// Pads with zeros or truncates to `order`.
    pub fn from_coeffs(mut coeffs: Vec<C>, order: usize) -> Self {
        coeffs.resize(order + 1, C::zero());
        Series { c: coeffs }
    }

    pub fn order(&self) -> usize {
        self.c.len() - 1
    }

    pub fn coeff(&self, n: usize) -> &C {
        &self.c[n]
    }

    pub fn coeffs(&self) -> &[C] {
        &self.c
    }

    pub fn truncate(&self, order: usize) -> Self {
        Self::from_coeffs(self.c[..=order.min(self.order())].to_vec(), order)
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(Zero::is_zero)
    }

    /// Lowest degree with a nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.c.iter().position(|x| !x.is_zero())
    }

    pub fn scale(&self, k: &C) -> Self {
        Series {
            c: self.c.iter().map(|x| x.clone() * k.clone()).collect(),
        }
    }

    /// Multiplication by `z^k`.
    pub fn shift(&self, k: usize) -> Self {
        let n = self.order();
        let mut out = Self::zero(n);
        for i in 0..=n.saturating_sub(k) {
            if i + k <= n {
                out.c[i + k] = self.c[i].clone();
            }
        }
        out
    }

    /// Formal derivative; the result has order one less.
    pub fn derivative(&self) -> Self {
        let n = self.order();
        if n == 0 {
            return Self::zero(0);
        }
        let c = (1..=n)
            .map(|i| self.c[i].clone() * from_usize::<C>(i))
            .collect();
        Series { c }
    }

    pub fn pow(&self, mut k: usize) -> Self {
        let mut acc = Self::one(self.order());
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// `exp(self)` for a series with zero constant term.
    fn exp_full(&self) -> Self {
        let n = self.order();
        let mut e = Self::zero(n);
        e.c[0] = C::one();
        for m in 1..=n {
            let mut acc = C::zero();
            for k in 1..=m {
                if !self.c[k].is_zero() {
                    acc = acc + from_usize::<C>(k) * self.c[k].clone() * e.c[m - k].clone();
                }
            }
            e.c[m] = acc / from_usize::<C>(m);
        }
        e
    }

    /// `Σ_{ℓ≥r} self^ℓ/ℓ!`.
    ///
    /// ```
    /// use splitlimit::RationalSeries;
    /// let z = RationalSeries::z(4);
    /// let s = z.exp_ge(1).unwrap();
    /// let c: Vec<String> = s.coeffs().iter().map(|x| x.to_string()).collect();
    /// assert_eq!(c, ["0", "1", "1/2", "1/6", "1/24"]);
    /// ```
    pub fn exp_ge(&self, r: usize) -> Result<Self> {
        if !self.c[0].is_zero() {
            return Err(Error::ExpOfUnitSeries(format!("{:?}", self.c[0])));
        }
        let n = self.order();
        let mut out = self.exp_full();
        let mut term = Self::one(n);
        for l in 0..r.min(n + 1) {
            if l > 0 {
                term = (&term * self).scale(&(C::one() / from_usize::<C>(l)));
            }
            out = &out - &term;
        }
        Ok(out)
    }

    /// Multiplicative inverse; needs an invertible constant term.
    pub fn recip(&self) -> Result<Self> {
        if self.c[0].is_zero() {
            return Err(Error::NotInvertible);
        }
        let n = self.order();
        let inv0 = C::one() / self.c[0].clone();
        let mut r = Self::zero(n);
        r.c[0] = inv0.clone();
        for m in 1..=n {
            let mut acc = C::zero();
            for k in 1..=m {
                if !self.c[k].is_zero() {
                    acc = acc + self.c[k].clone() * r.c[m - k].clone();
                }
            }
            r.c[m] = C::zero() - acc * inv0.clone();
        }
        Ok(r)
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self * &other.recip()?)
    }

    /// Partial sum at `z0` with a geometric tail bound.
    ///
    /// The bound assumes `|a_n|·ρ^n` over the truncated range does not
    /// exceed its maximum over the upper half of the computed coefficients,
    /// which holds for the algebraic-logarithmic coefficient shapes met here.
    pub fn evaluate<R: Real>(&self, z0: &R, rho_est: &R, tol: &R) -> Result<Evaluation<R>>
    where
        C: IntoReal,
    {
        let terms: Vec<R> = self.c.iter().map(|x| x.to_real::<R>()).collect();
        eval_terms(&terms, z0, rho_est, tol)
    }
}

/// Value of a truncated series together with a bound on the neglected tail.
#[derive(Clone, Debug)]
pub struct Evaluation<R> {
    pub value: R,
    pub tail_bound: R,
}

fn eval_terms<R: Real>(terms: &[R], z0: &R, rho_est: &R, tol: &R) -> Result<Evaluation<R>> {
    let n = terms.len() - 1;
    let mut value = R::zero();
    for a in terms.iter().rev() {
        value = value * z0.clone() + a.clone();
    }
    let r = z0.clone() / rho_est.clone();
    if r >= R::one() {
        return Err(Error::TailBound {
            bound: f64::INFINITY,
            tolerance: tol.to_f64(),
        });
    }
    let mut peak = R::zero();
    let mut rp = rho_est.powi((n / 2) as u32);
    for a in terms.iter().skip(n / 2) {
        let m = a.abs() * rp.clone();
        if m > peak {
            peak = m;
        }
        rp = rp * rho_est.clone();
    }
    let tail_bound = peak * r.powi(n as u32 + 1) / (R::one() - r);
    if tail_bound > *tol {
        return Err(Error::TailBound {
            bound: tail_bound.to_f64(),
            tolerance: tol.to_f64(),
        });
    }
    Ok(Evaluation { value, tail_bound })
}

impl Series<BigRational> {
    /// `n!·[z^n]`, exact.
    pub fn labeled_count(&self, n: usize) -> BigRational {
        self.c[n].clone() * BigRational::from_integer(factorial(n))
    }

    /// All labeled counts; panics if some count is not an integer.
    pub fn labeled_counts(&self) -> Vec<BigInt> {
        (0..=self.order())
            .map(|n| {
                let v = self.labeled_count(n);
                assert!(v.is_integer(), "non-integral labeled count at degree {n}: {v}");
                v.to_integer()
            })
            .collect()
    }

    pub fn from_labeled_counts(counts: &[BigInt], order: usize) -> Self {
        let c = counts
            .iter()
            .take(order + 1)
            .enumerate()
            .map(|(n, a)| BigRational::new(a.clone(), factorial(n)))
            .collect();
        Self::from_coeffs(c, order)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.c.iter().all(|x| !x.is_negative())
    }
}

pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

impl<'a, C: Coeff> Add<&'a Series<C>> for &'a Series<C> {
    type Output = Series<C>;
    fn add(self, rhs: &Series<C>) -> Series<C> {
        let n = self.order().min(rhs.order());
        Series {
            c: (0..=n).map(|i| self.c[i].clone() + rhs.c[i].clone()).collect(),
        }
    }
}

impl<'a, C: Coeff> Sub<&'a Series<C>> for &'a Series<C> {
    type Output = Series<C>;
    fn sub(self, rhs: &Series<C>) -> Series<C> {
        let n = self.order().min(rhs.order());
        Series {
            c: (0..=n).map(|i| self.c[i].clone() - rhs.c[i].clone()).collect(),
        }
    }
}

impl<'a, C: Coeff> Mul<&'a Series<C>> for &'a Series<C> {
    type Output = Series<C>;
    fn mul(self, rhs: &Series<C>) -> Series<C> {
        let n = self.order().min(rhs.order());
        let mut c = vec![C::zero(); n + 1];
        for (i, a) in self.c.iter().enumerate().take(n + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.c.iter().enumerate().take(n + 1 - i) {
                if !b.is_zero() {
                    c[i + j] = c[i + j].clone() + a.clone() * b.clone();
                }
            }
        }
        Series { c }
    }
}

impl<C: Coeff> Neg for &Series<C> {
    type Output = Series<C>;
    fn neg(self) -> Series<C> {
        Series {
            c: self.c.iter().map(|x| C::zero() - x.clone()).collect(),
        }
    }
}

macro_rules! by_value {
    ($ty:ident, $tr:ident, $m:ident) => {
        impl<C: Coeff> $tr<$ty<C>> for $ty<C> {
            type Output = $ty<C>;
            fn $m(self, rhs: $ty<C>) -> $ty<C> {
                (&self).$m(&rhs)
            }
        }
        impl<'a, C: Coeff> $tr<&'a $ty<C>> for $ty<C> {
            type Output = $ty<C>;
            fn $m(self, rhs: &$ty<C>) -> $ty<C> {
                (&self).$m(rhs)
            }
        }
    };
}
by_value!(Series, Add, add);
by_value!(Series, Sub, sub);
by_value!(Series, Mul, mul);

/// Bivariate series in `(z, u)`, truncated by z-degree; the u-degree is
/// kept up to the z-truncation order.
#[derive(Clone, Debug, PartialEq)]
pub struct BiSeries<C> {
    order: usize,
    // c[n][j] = [z^n u^j]; trailing zeros trimmed
    c: Vec<Vec<C>>,
}

impl<C: Coeff> BiSeries<C> {
    pub fn zero(order: usize) -> Self {
        BiSeries {
            order,
            c: vec![Vec::new(); order + 1],
        }
    }

    pub fn one(order: usize) -> Self {
        Self::from_series(&Series::one(order))
    }

    pub fn constant(value: C, order: usize) -> Self {
        Self::from_series(&Series::constant(value, order))
    }

    pub fn z(order: usize) -> Self {
        Self::from_series(&Series::z(order))
    }

    /// The series `u` (no z factor).
    pub fn u(order: usize) -> Self {
        let mut s = Self::zero(order);
        s.c[0] = vec![C::zero(), C::one()];
        s
    }

    pub fn from_series(s: &Series<C>) -> Self {
        let mut out = BiSeries {
            order: s.order(),
            c: s.c.iter().map(|x| vec![x.clone()]).collect(),
        };
        out.trim();
        out
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeff(&self, n: usize, j: usize) -> C {
        self.c[n].get(j).cloned().unwrap_or_else(C::zero)
    }

    /// The u-polynomial multiplying `z^n`.
    pub fn row(&self, n: usize) -> &[C] {
        &self.c[n]
    }

    pub fn set(&mut self, n: usize, j: usize, value: C) {
        if j > self.order {
            return;
        }
        if self.c[n].len() <= j {
            self.c[n].resize(j + 1, C::zero());
        }
        self.c[n][j] = value;
        self.trim_row(n);
    }

    pub fn max_u_degree(&self) -> Option<usize> {
        self.c.iter().filter_map(|r| r.len().checked_sub(1)).max()
    }

    /// True when every monomial `z^n u^j` has `j ≤ n`.
    pub fn u_degree_within_z_degree(&self) -> bool {
        self.c.iter().enumerate().all(|(n, r)| r.len() <= n + 1)
    }

    pub fn truncate(&self, order: usize) -> Self {
        let mut c: Vec<Vec<C>> = self.c.iter().take(order + 1).cloned().collect();
        c.resize(order + 1, Vec::new());
        let mut out = BiSeries { order, c };
        for r in out.c.iter_mut() {
            r.truncate(order + 1);
        }
        out.trim();
        out
    }

    pub fn scale(&self, k: &C) -> Self {
        let mut out = self.clone();
        for r in out.c.iter_mut() {
            for x in r.iter_mut() {
                *x = x.clone() * k.clone();
            }
        }
        out.trim();
        out
    }

    /// Multiplication by `u`.
    pub fn mul_u(&self) -> Self {
        let mut out = self.clone();
        for r in out.c.iter_mut() {
            if !r.is_empty() {
                r.insert(0, C::zero());
                r.truncate(self.order + 1);
            }
        }
        out
    }

    /// Substitutes a value for `u`.
    pub fn at_u(&self, u0: &C) -> Series<C> {
        let c = self
            .c
            .iter()
            .map(|r| {
                r.iter()
                    .rev()
                    .fold(C::zero(), |acc, x| acc * u0.clone() + x.clone())
            })
            .collect();
        Series { c }
    }

    /// The coefficient of `u^j` as a series in z.
    pub fn u_coeff(&self, j: usize) -> Series<C> {
        Series {
            c: (0..=self.order).map(|n| self.coeff(n, j)).collect(),
        }
    }

    pub fn is_univariate(&self) -> bool {
        self.c.iter().all(|r| r.len() <= 1)
    }

    fn trim_row(&mut self, n: usize) {
        let r = &mut self.c[n];
        while r.last().is_some_and(|x| x.is_zero()) {
            r.pop();
        }
    }

    fn trim(&mut self) {
        for n in 0..=self.order {
            self.trim_row(n);
        }
    }

    fn add_poly_into(dst: &mut Vec<C>, src: &[C], limit: usize) {
        if dst.len() < src.len() {
            dst.resize(src.len().min(limit), C::zero());
        }
        for (j, x) in src.iter().enumerate().take(limit) {
            dst[j] = dst[j].clone() + x.clone();
        }
    }

    fn mul_poly(a: &[C], b: &[C], limit: usize) -> Vec<C> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let len = (a.len() + b.len() - 1).min(limit);
        let mut out = vec![C::zero(); len];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if i + j >= len {
                    break;
                }
                if !y.is_zero() {
                    out[i + j] = out[i + j].clone() + x.clone() * y.clone();
                }
            }
        }
        out
    }

    /// `exp_{≥r}` in z, for a series whose `z^0` row vanishes.
    pub fn exp_ge(&self, r: usize) -> Result<Self> {
        if !self.c[0].is_empty() {
            return Err(Error::ExpOfUnitSeries(format!("{:?}", self.c[0])));
        }
        let n = self.order;
        let lim = n + 1;
        let mut e = Self::zero(n);
        e.c[0] = vec![C::one()];
        for m in 1..=n {
            let mut acc: Vec<C> = Vec::new();
            for k in 1..=m {
                if self.c[k].is_empty() || e.c[m - k].is_empty() {
                    continue;
                }
                let p = Self::mul_poly(&self.c[k], &e.c[m - k], lim);
                let kk = from_usize::<C>(k);
                let p: Vec<C> = p.into_iter().map(|x| x * kk.clone()).collect();
                Self::add_poly_into(&mut acc, &p, lim);
            }
            let inv = C::one() / from_usize::<C>(m);
            e.c[m] = acc.into_iter().map(|x| x * inv.clone()).collect();
            e.trim_row(m);
        }
        let mut term = Self::one(n);
        for l in 0..r.min(n + 1) {
            if l > 0 {
                term = (&term * self).scale(&(C::one() / from_usize::<C>(l)));
            }
            e = &e - &term;
        }
        Ok(e)
    }

    /// Inverse of a series whose `z^0` row is a nonzero scalar.
    pub fn recip(&self) -> Result<Self> {
        if self.c[0].len() != 1 {
            return Err(Error::NotInvertible);
        }
        let n = self.order;
        let lim = n + 1;
        let inv0 = C::one() / self.c[0][0].clone();
        let mut r = Self::zero(n);
        r.c[0] = vec![inv0.clone()];
        for m in 1..=n {
            let mut acc: Vec<C> = Vec::new();
            for k in 1..=m {
                let p = Self::mul_poly(&self.c[k], &r.c[m - k], lim);
                Self::add_poly_into(&mut acc, &p, lim);
            }
            r.c[m] = acc
                .into_iter()
                .map(|x| C::zero() - x * inv0.clone())
                .collect();
            r.trim_row(m);
        }
        Ok(r)
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self * &other.recip()?)
    }

    pub fn pow(&self, mut k: usize) -> Self {
        let mut acc = Self::one(self.order);
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// First monomial `(n, j)` where the two series differ.
    pub fn first_difference(&self, other: &Self) -> Option<(usize, usize)> {
        let n = self.order.min(other.order);
        for m in 0..=n {
            let len = self.c[m].len().max(other.c[m].len());
            for j in 0..len {
                if self.coeff(m, j) != other.coeff(m, j) {
                    return Some((m, j));
                }
            }
        }
        None
    }

    pub fn evaluate<R: Real>(&self, z0: &R, u0: &R, rho_est: &R, tol: &R) -> Result<Evaluation<R>>
    where
        C: IntoReal,
    {
        let terms: Vec<R> = self
            .c
            .iter()
            .map(|r| {
                r.iter()
                    .rev()
                    .fold(R::zero(), |acc, x| acc * u0.clone() + x.to_real::<R>())
            })
            .collect();
        eval_terms(&terms, z0, rho_est, tol)
    }
}

impl BiSeries<BigRational> {
    pub fn is_nonnegative(&self) -> bool {
        self.c.iter().flatten().all(|x| !x.is_negative())
    }

    /// `n!·[z^n u^j]`.
    pub fn labeled_count(&self, n: usize, j: usize) -> BigRational {
        self.coeff(n, j) * BigRational::from_integer(factorial(n))
    }
}

impl<'a, C: Coeff> Add<&'a BiSeries<C>> for &'a BiSeries<C> {
    type Output = BiSeries<C>;
    fn add(self, rhs: &BiSeries<C>) -> BiSeries<C> {
        let n = self.order.min(rhs.order);
        let mut out = BiSeries::zero(n);
        for m in 0..=n {
            let mut r = self.c[m].clone();
            BiSeries::add_poly_into(&mut r, &rhs.c[m], n + 1);
            out.c[m] = r;
            out.trim_row(m);
        }
        out
    }
}

impl<C: Coeff> Neg for &BiSeries<C> {
    type Output = BiSeries<C>;
    fn neg(self) -> BiSeries<C> {
        self.scale(&(C::zero() - C::one()))
    }
}

impl<'a, C: Coeff> Sub<&'a BiSeries<C>> for &'a BiSeries<C> {
    type Output = BiSeries<C>;
    fn sub(self, rhs: &BiSeries<C>) -> BiSeries<C> {
        self + &(-rhs)
    }
}

impl<'a, C: Coeff> Mul<&'a BiSeries<C>> for &'a BiSeries<C> {
    type Output = BiSeries<C>;
    fn mul(self, rhs: &BiSeries<C>) -> BiSeries<C> {
        let n = self.order.min(rhs.order);
        let lim = n + 1;
        let mut out = BiSeries::zero(n);
        for i in 0..=n {
            if self.c[i].is_empty() {
                continue;
            }
            for j in 0..=(n - i) {
                if rhs.c[j].is_empty() {
                    continue;
                }
                let p = BiSeries::mul_poly(&self.c[i], &rhs.c[j], lim);
                BiSeries::add_poly_into(&mut out.c[i + j], &p, lim);
            }
        }
        out.trim();
        out
    }
}

by_value!(BiSeries, Add, add);
by_value!(BiSeries, Sub, sub);
by_value!(BiSeries, Mul, mul);

/// Right-hand sides of a specification system.
#[derive(Clone, Debug)]
pub enum Expr<C> {
    Z,
    U,
    /// A known series (constants included).
    Known(BiSeries<C>),
    Scalar(C),
    Var(usize),
    Sum(Vec<Expr<C>>),
    Prod(Vec<Expr<C>>),
    ExpGe(usize, Box<Expr<C>>),
}

impl<C: Coeff> Expr<C> {
    pub fn exp_ge(self, r: usize) -> Self {
        Expr::ExpGe(r, Box::new(self))
    }

    pub fn known(s: &Series<C>) -> Self {
        Expr::Known(BiSeries::from_series(s))
    }

    pub fn int(k: i64) -> Self {
        Expr::Scalar(C::from_i64(k).expect("small integer"))
    }

    fn visit_vars(&self, f: &mut impl FnMut(usize)) {
        match self {
            Expr::Var(i) => f(*i),
            Expr::Sum(v) | Expr::Prod(v) => v.iter().for_each(|e| e.visit_vars(f)),
            Expr::ExpGe(_, e) => e.visit_vars(f),
            _ => {}
        }
    }

    fn eval(&self, vals: &[BiSeries<C>], order: usize) -> Result<BiSeries<C>> {
        Ok(match self {
            Expr::Z => BiSeries::z(order),
            Expr::U => BiSeries::u(order),
            Expr::Known(s) => s.truncate(order),
            Expr::Scalar(c) => BiSeries::constant(c.clone(), order),
            Expr::Var(i) => vals[*i].clone(),
            Expr::Sum(v) => {
                let mut acc = BiSeries::zero(order);
                for e in v {
                    acc = &acc + &e.eval(vals, order)?;
                }
                acc
            }
            Expr::Prod(v) => {
                let mut acc = BiSeries::one(order);
                for e in v {
                    let x = e.eval(vals, order)?;
                    if x == BiSeries::zero(order) {
                        return Ok(x);
                    }
                    acc = &acc * &x;
                }
                acc
            }
            Expr::ExpGe(r, e) => e.eval(vals, order)?.exp_ge(*r)?,
        })
    }
}

impl<C: Coeff> Add for Expr<C> {
    type Output = Expr<C>;
    fn add(self, rhs: Expr<C>) -> Expr<C> {
        match self {
            Expr::Sum(mut v) => {
                v.push(rhs);
                Expr::Sum(v)
            }
            lhs => Expr::Sum(vec![lhs, rhs]),
        }
    }
}

impl<C: Coeff> Mul for Expr<C> {
    type Output = Expr<C>;
    fn mul(self, rhs: Expr<C>) -> Expr<C> {
        match self {
            Expr::Prod(mut v) => {
                v.push(rhs);
                Expr::Prod(v)
            }
            lhs => Expr::Prod(vec![lhs, rhs]),
        }
    }
}

/// A set of equations `X_i = rhs_i(z, u, X)`.
#[derive(Clone, Debug, Default)]
pub struct System<C> {
    names: Vec<String>,
    rhs: Vec<Option<Expr<C>>>,
}

impl<C: Coeff> System<C> {
    pub fn new() -> Self {
        System {
            names: Vec::new(),
            rhs: Vec::new(),
        }
    }

    /// Declares an unknown and returns the expression that refers to it.
    pub fn unknown(&mut self, name: &str) -> Expr<C> {
        self.names.push(name.to_string());
        self.rhs.push(None);
        Expr::Var(self.names.len() - 1)
    }

    pub fn define(&mut self, var: &Expr<C>, rhs: Expr<C>) -> Result<()> {
        let Expr::Var(i) = var else {
            return Err(Error::BadSystem("left side is not an unknown".into()));
        };
        if self.rhs[*i].is_some() {
            return Err(Error::BadSystem(format!("{} defined twice", self.names[*i])));
        }
        self.rhs[*i] = Some(rhs);
        Ok(())
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    fn validate(&self) -> Result<()> {
        for (name, rhs) in self.names.iter().zip(&self.rhs) {
            let Some(e) = rhs else {
                return Err(Error::BadSystem(format!("{name} has no equation")));
            };
            let mut bad = None;
            e.visit_vars(&mut |i| {
                if i >= self.names.len() {
                    bad = Some(i);
                }
            });
            if let Some(i) = bad {
                return Err(Error::BadSystem(format!("{name} refers to undeclared unknown #{i}")));
            }
        }
        Ok(())
    }

    /// Evaluates every right side at `vals`.
    pub fn apply(&self, vals: &[BiSeries<C>], order: usize) -> Result<Vec<BiSeries<C>>> {
        self.rhs
            .iter()
            .map(|e| e.as_ref().expect("validated").eval(vals, order))
            .collect()
    }
}

/// Solved unknowns, by name.
#[derive(Clone, Debug)]
pub struct Solution<C> {
    names: Vec<String>,
    values: Vec<BiSeries<C>>,
    pub passes: usize,
}

impl<C: Coeff> Solution<C> {
    pub fn get(&self, name: &str) -> &BiSeries<C> {
        let i = self
            .names
            .iter()
            .position(|n| n == name)
            .unwrap_or_else(|| panic!("no unknown named {name}"));
        &self.values[i]
    }

    /// The `u^0` part of an unknown (the whole series for univariate systems).
    pub fn series(&self, name: &str) -> Series<C> {
        self.get(name).u_coeff(0)
    }

    pub fn values(&self) -> &[BiSeries<C>] {
        &self.values
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }
}

fn agreement<C: Coeff>(a: &[BiSeries<C>], b: &[BiSeries<C>], order: usize) -> usize {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.first_difference(y).map_or(order + 1, |(n, _)| n))
        .min()
        .unwrap_or(order + 1)
}

/// Jacobi iteration from zero: every pass re-evaluates all right sides from
/// the previous iterate.  Stops when a pass changes nothing up to `order`;
/// fails if a pass does not extend the prefix on which consecutive iterates
/// agree.
pub fn solve_fixpoint<C: Coeff>(sys: &System<C>, order: usize) -> Result<Solution<C>> {
    sys.validate()?;
    let mut cur: Vec<BiSeries<C>> = vec![BiSeries::zero(order); sys.names.len()];
    let mut prev_agree: Option<usize> = None;
    let mut pass = 0;
    loop {
        pass += 1;
        let next = sys.apply(&cur, order)?;
        let agree = agreement(&cur, &next, order);
        if agree > order {
            return Ok(Solution {
                names: sys.names.clone(),
                values: next,
                passes: pass,
            });
        }
        if prev_agree.is_some_and(|p| agree <= p) {
            return Err(Error::IllFounded {
                pass,
                degree: agree,
            });
        }
        prev_agree = Some(agree);
        cur = next;
    }
}

/// Exact rational from a small fraction.
pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// Integer-valued rational check for a whole series.
pub fn all_integral(s: &Series<BigRational>) -> bool {
    (0..=s.order()).all(|n| s.labeled_count(n).is_integer())
}

/// Greatest common divisor of labeled counts (used in some sanity checks).
pub fn counts_gcd(counts: &[BigInt]) -> BigInt {
    counts.iter().fold(BigInt::zero(), |g, x| g.gcd(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::RationalSeries;

    #[test]
    fn exp_ge_rejects_unit_series() {
        let s = RationalSeries::one(3);
        assert!(matches!(s.exp_ge(0), Err(Error::ExpOfUnitSeries(_))));
    }

    #[test]
    fn exp_ge_set2_counts() {
        let s = RationalSeries::z(8).exp_ge(2).unwrap();
        let c = s.labeled_counts();
        assert_eq!(c[0], 0.into());
        assert_eq!(c[1], 0.into());
        for n in 2..=8 {
            assert_eq!(c[n], 1.into());
        }
    }

    #[test]
    fn exp_times_exp_of_negative_is_one() {
        for order in [0, 1, 5, 12] {
            let a = RationalSeries::z(order).scale(&q(2, 1));
            let b = -&a;
            let p = &a.exp_ge(0).unwrap() * &b.exp_ge(0).unwrap();
            assert_eq!(p, RationalSeries::one(order));
        }
    }

    #[test]
    fn recip_roundtrip() {
        let z = RationalSeries::z(10);
        let s = &RationalSeries::one(10) + &(&z * &z).scale(&q(3, 2));
        assert_eq!(&s * &s.recip().unwrap(), RationalSeries::one(10));
    }

    #[test]
    fn bivariate_geometric_series() {
        // 1/(1 - u z) = Σ u^n z^n
        let uz = &BiSeries::<BigRational>::u(6) * &BiSeries::z(6);
        let g = (&BiSeries::one(6) - &uz).recip().unwrap();
        for n in 0..=6 {
            for j in 0..=6 {
                let expect = if n == j { q(1, 1) } else { q(0, 1) };
                assert_eq!(g.coeff(n, j), expect);
            }
        }
        assert!(g.u_degree_within_z_degree());
    }

    #[test]
    fn fixpoint_catalan() {
        let mut sys = System::<BigRational>::new();
        let x = sys.unknown("X");
        sys.define(&x, Expr::Z + x.clone() * x.clone()).unwrap();
        let sol = solve_fixpoint(&sys, 8).unwrap();
        let s = sol.series("X");
        let cat = [0, 1, 1, 2, 5, 14, 42, 132, 429];
        for (n, c) in cat.iter().enumerate() {
            assert_eq!(*s.coeff(n), q(*c, 1));
        }
    }

    #[test]
    fn fixpoint_detects_ill_founded() {
        let mut sys = System::<BigRational>::new();
        let x = sys.unknown("X");
        sys.define(&x, Expr::int(1) + x.clone()).unwrap();
        assert!(matches!(
            solve_fixpoint(&sys, 5),
            Err(Error::IllFounded { .. })
        ));
    }

    #[test]
    fn system_rejects_missing_equation() {
        let mut sys = System::<BigRational>::new();
        let x = sys.unknown("X");
        let _y = sys.unknown("Y");
        sys.define(&x, Expr::Z).unwrap();
        assert!(matches!(solve_fixpoint(&sys, 3), Err(Error::BadSystem(_))));
    }

    #[test]
    fn evaluate_exp_at_one() {
        let e = RationalSeries::z(40).exp_ge(0).unwrap();
        let v = e.evaluate(&1.0f64, &1e9, &1e-12).unwrap();
        assert!((v.value - std::f64::consts::E).abs() < 1e-12);
    }

    #[test]
    fn evaluate_reports_tail_bound() {
        // 1/(1-2z) at z = 0.49 with 10 terms cannot meet 1e-12
        let s = (&RationalSeries::one(10) - &RationalSeries::z(10).scale(&q(2, 1)))
            .recip()
            .unwrap();
        let r = s.evaluate(&0.49f64, &0.5, &1e-12);
        assert!(matches!(r, Err(Error::TailBound { .. })));
    }
}
