//! Double-precision series with coefficients scaled by `r^n`, i.e. series
//! in `t = z/r`.  With `r = ρ` the coefficients stay of order `n^{-3/2}`,
//! so very high orders fit in `f64`.  Every coefficient computed here is a
//! sum of nonnegative terms, which keeps the relative rounding error below
//! a small multiple of `order·ε`.

use crate::Family;

/// Coefficients `a_n·r^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScaledSeries {
    pub r: f64,
    pub c: Vec<f64>,
}

impl ScaledSeries {
    pub fn zero(r: f64, order: usize) -> Self {
        ScaledSeries {
            r,
            c: vec![0.0; order + 1],
        }
    }

    pub fn one(r: f64, order: usize) -> Self {
        let mut s = Self::zero(r, order);
        s.c[0] = 1.0;
        s
    }

    pub fn z(r: f64, order: usize) -> Self {
        let mut s = Self::zero(r, order);
        if order >= 1 {
            s.c[1] = r;
        }
        s
    }

    pub fn order(&self) -> usize {
        self.c.len() - 1
    }

    pub fn add(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a + b)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a - b)
    }

    fn zip(&self, o: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        ScaledSeries {
            r: self.r,
            c: self.c.iter().zip(&o.c).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    pub fn scale(&self, k: f64) -> Self {
        ScaledSeries {
            r: self.r,
            c: self.c.iter().map(|a| a * k).collect(),
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let n = self.order().min(o.order());
        let mut out = Self::zero(self.r, n);
        for (i, &a) in self.c.iter().enumerate().take(n + 1) {
            if a == 0.0 {
                continue;
            }
            for (j, &b) in o.c.iter().enumerate().take(n + 1 - i) {
                out.c[i + j] += a * b;
            }
        }
        out
    }

    /// Only the top coefficient of the product.
    pub fn mul_top(&self, o: &Self) -> f64 {
        let n = self.order().min(o.order());
        (0..=n).map(|k| self.c[k] * o.c[n - k]).sum()
    }

    /// `exp(self)` for a series with zero constant term.
    pub fn exp(&self) -> Self {
        assert_eq!(self.c[0], 0.0, "exp of a series with nonzero constant term");
        let n = self.order();
        let mut e = Self::zero(self.r, n);
        e.c[0] = 1.0;
        for m in 1..=n {
            let s: f64 = (1..=m).map(|k| k as f64 * self.c[k] * e.c[m - k]).sum();
            e.c[m] = s / m as f64;
        }
        e
    }

    /// `1/(1 - self)` for a series with zero constant term.
    pub fn geometric(&self) -> Self {
        assert_eq!(self.c[0], 0.0, "geometric series of a series with nonzero constant term");
        let n = self.order();
        let mut g = Self::zero(self.r, n);
        g.c[0] = 1.0;
        for m in 1..=n {
            g.c[m] = (1..=m).map(|k| self.c[k] * g.c[m - k]).sum();
        }
        g
    }

    pub fn pow(&self, mut k: usize) -> Self {
        let mut acc = Self::one(self.r, self.order());
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Value at `z = x·r` (`x ≤ 1`), as a plain partial sum.
    pub fn eval_scaled(&self, x: f64) -> f64 {
        self.c.iter().rev().fold(0.0, |acc, &a| acc * x + a)
    }
}

/// Running `exp(y)` where `y` is revealed one coefficient at a time.
struct OnlineExp {
    y: Vec<f64>,
    e: Vec<f64>,
}

impl OnlineExp {
    fn new() -> Self {
        OnlineExp {
            y: vec![0.0],
            e: vec![1.0],
        }
    }

    /// `exp_{≥2}(y)` at degree `n = len`, which needs `y` only below `n`.
    fn peek_ge2(&self) -> f64 {
        let n = self.y.len();
        let s: f64 = (1..n).map(|k| k as f64 * self.y[k] * self.e[n - k]).sum();
        s / n as f64
    }

    fn push(&mut self, yn: f64) {
        let ge2 = self.peek_ge2();
        self.y.push(yn);
        self.e.push(ge2 + yn);
    }
}

/// Scaled class series of a family, computed coefficient by coefficient.
#[derive(Clone, Debug)]
pub struct ScaledTables {
    pub family: Family,
    pub r: f64,
    /// dh, dh2c: `D_K`, `D_SC`, `D_SX`.  leaf3: `L`, `E_SX`, `E_SC`.
    pub classes: [ScaledSeries; 3],
    /// `F = exp_{≥1}(z + D_K + D_SX)` for dh and dh2c, `exp(L + E_SX)` for
    /// leaf3.
    pub f: ScaledSeries,
}

impl ScaledTables {
    pub fn new(family: Family, r: f64, order: usize) -> Self {
        let z = |n: usize| if n == 1 { r } else { 0.0 };
        match family {
            Family::Dh | Family::Dh2c => {
                let mut a = [vec![0.0], vec![0.0], vec![0.0]];
                // exp(z + SC + SX), exp(z + K + SX); the latter minus 1 is F
                let mut e_k = OnlineExp::new();
                let mut e_c = OnlineExp::new();
                for n in 1..=order {
                    let k = e_k.peek_ge2();
                    let sc = e_c.peek_ge2();
                    let first = |m: usize| {
                        let base = a[0][m] + a[1][m];
                        if family == Family::Dh {
                            base + z(m)
                        } else {
                            base
                        }
                    };
                    let sx: f64 = (1..n).map(|m| first(m) * e_c.e[n - m]).sum();
                    a[0].push(k);
                    a[1].push(sc);
                    a[2].push(sx);
                    e_k.push(z(n) + sc + sx);
                    e_c.push(z(n) + k + sx);
                }
                let mut f = e_c.e;
                f[0] = 0.0;
                ScaledTables {
                    family,
                    r,
                    classes: a.map(|c| ScaledSeries { r, c }),
                    f: ScaledSeries { r, c: f },
                }
            }
            Family::Leaf3 => {
                // L = e^z - 1, E_SX = L·exp_{≥1}(L + E_SX)
                let mut l = vec![0.0];
                let mut fact = 1.0;
                for n in 1..=order {
                    fact *= r / n as f64;
                    l.push(fact);
                }
                let mut e = OnlineExp::new();
                let mut sx = vec![0.0];
                let mut sc = vec![0.0];
                for n in 1..=order {
                    let v: f64 = (1..n).map(|m| l[m] * e.e[n - m]).sum();
                    sx.push(v);
                    sc.push(e.peek_ge2());
                    e.push(l[n] + v);
                }
                ScaledTables {
                    family,
                    r,
                    classes: [l, sx, sc].map(|c| ScaledSeries { r, c }),
                    f: ScaledSeries { r, c: e.e },
                }
            }
        }
    }

    /// Scaled series of the whole family.
    pub fn total(&self) -> ScaledSeries {
        let [a, b, c] = &self.classes;
        match self.family {
            Family::Dh => a.add(b).add(c),
            Family::Dh2c => a.add(c),
            Family::Leaf3 => {
                // E_K = L + (E_SX + E_SC)·L; the lone leaf sits in L
                let e_k = a.add(&b.add(c).mul(a));
                b.add(c).add(&e_k)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumeration::count_trees_upto;
    use crate::scalar::ln_bigint;

    #[test]
    fn scaled_totals_match_exact_counts() {
        let r = 0.15;
        for f in Family::ALL {
            let t = ScaledTables::new(f, r, 60).total();
            let exact = count_trees_upto(f, 60);
            for n in 1..=60 {
                if exact[n - 1] == 0.into() {
                    assert_eq!(t.c[n], 0.0, "{f} n={n}");
                    continue;
                }
                let lf: f64 = (1..=n).map(|k| (k as f64).ln()).sum();
                let want = ln_bigint(&exact[n - 1]) - lf + n as f64 * r.ln();
                assert!((t.c[n].ln() - want).abs() < 1e-12, "{f} n={n}");
            }
        }
    }

    #[test]
    fn exp_and_geometric_invert_known_series() {
        let r = 0.5;
        let z = ScaledSeries::z(r, 20);
        let e = z.exp();
        let mut fact = 1.0;
        for n in 0..=20 {
            if n > 0 {
                fact *= r / n as f64;
            }
            assert!((e.c[n] - fact).abs() < 1e-15);
        }
        let g = z.geometric();
        let back = g.mul(&ScaledSeries::one(r, 20).sub(&z));
        assert!((back.c[0] - 1.0).abs() < 1e-15);
        assert!(back.c[1..].iter().all(|c| c.abs() < 1e-15));
    }

    #[test]
    fn pow_agrees_with_repeated_products() {
        let s = ScaledSeries::z(0.3, 15).exp().sub(&ScaledSeries::one(0.3, 15));
        let mut acc = ScaledSeries::one(0.3, 15);
        for _ in 0..5 {
            acc = acc.mul(&s);
        }
        let p = s.pow(5);
        for (a, b) in acc.c.iter().zip(&p.c) {
            assert!((a - b).abs() <= 1e-15 * a.abs().max(1e-300));
        }
    }
}
