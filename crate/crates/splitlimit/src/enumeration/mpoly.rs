//! Sparse polynomials in `z` and several jump variables `u_0, u_1, …`,
//! truncated in `z`.  Small and slow; used to expand products of marked
//! series at low order.

use crate::series::{BiSeries, Series};
use num_rational::BigRational;
use num_traits::Zero;
use std::collections::BTreeMap;

/// Monomial `z^n Π u_i^{e_i}`, stored as `(n, e)`.
pub type Monomial = (usize, Vec<u32>);

#[derive(Clone, Debug, PartialEq)]
pub struct MPoly {
    nvars: usize,
    order: usize,
    terms: BTreeMap<Monomial, BigRational>,
}

impl MPoly {
    pub fn zero(nvars: usize, order: usize) -> Self {
        MPoly {
            nvars,
            order,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize, order: usize) -> Self {
        let mut p = Self::zero(nvars, order);
        p.terms.insert((0, vec![0; nvars]), BigRational::from_integer(1.into()));
        p
    }

    /// A bivariate series with its `u` renamed to `u_var`.
    pub fn from_bi(s: &BiSeries<BigRational>, var: usize, nvars: usize, order: usize) -> Self {
        let mut p = Self::zero(nvars, order);
        for n in 0..=order.min(s.order()) {
            for (j, c) in s.row(n).iter().enumerate() {
                if !c.is_zero() {
                    let mut e = vec![0; nvars];
                    e[var] = j as u32;
                    p.terms.insert((n, e), c.clone());
                }
            }
        }
        p
    }

    pub fn from_series(s: &Series<BigRational>, nvars: usize, order: usize) -> Self {
        let mut p = Self::zero(nvars, order);
        for n in 0..=order.min(s.order()) {
            let c = s.coeff(n);
            if !c.is_zero() {
                p.terms.insert((n, vec![0; nvars]), c.clone());
            }
        }
        p
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, BigRational> {
        &self.terms
    }

    pub fn coeff(&self, m: &Monomial) -> BigRational {
        self.terms.get(m).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            let e = out.terms.entry(m.clone()).or_insert_with(BigRational::zero);
            *e += c;
        }
        out.terms.retain(|_, c| !c.is_zero());
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.nvars, self.order.min(other.order));
        for ((n1, e1), c1) in &self.terms {
            for ((n2, e2), c2) in &other.terms {
                let n = n1 + n2;
                if n > out.order {
                    continue;
                }
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                let slot = out.terms.entry((n, e)).or_insert_with(BigRational::zero);
                *slot += c1 * c2;
            }
        }
        out.terms.retain(|_, c| !c.is_zero());
        out
    }

    pub fn scale_int(&self, k: i64) -> Self {
        let mut out = self.clone();
        let k = BigRational::from_integer(k.into());
        for c in out.terms.values_mut() {
            *c *= &k;
        }
        out.terms.retain(|_, c| !c.is_zero());
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::q;

    #[test]
    fn product_of_geometric_series_in_two_variables() {
        // 1/(1 - u z) in u_0 times the same in u_1
        let mut g = BiSeries::zero(4);
        for n in 0..=4 {
            g.set(n, n, q(1, 1));
        }
        let a = MPoly::from_bi(&g, 0, 2, 4);
        let b = MPoly::from_bi(&g, 1, 2, 4);
        let p = a.mul(&b);
        assert_eq!(p.coeff(&(3, vec![1, 2])), q(1, 1));
        assert_eq!(p.coeff(&(3, vec![3, 1])), q(0, 1));
        assert_eq!(p.terms().len(), 15);
    }
}
