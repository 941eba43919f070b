//! `[z^n] M·H^{a_n}` against the semi-large powers estimate, the plain
//! coefficient asymptotics of the family, and a finite-difference look at
//! the square-root singularity of the fixpoint.
//!
//! Up to [`EXACT_CAP`] coefficients come from exact integer counts; above
//! that, from the scaled double-precision series.

use super::floats::{ScaledSeries, ScaledTables};
use super::{m_at_rho, solve_constants, FamilyConstants};
use crate::enumeration::marked::end_types;
use crate::enumeration::Tables;
use crate::scalar::{ln_bigint, MpFloat};
use crate::series::labeled::{Binomials, LabeledSeries};
use crate::{Error, Family, Result};
use serde::Serialize;

/// Largest `n` handled with exact integers by default.
pub const EXACT_CAP: usize = 500;

/// How the coefficient was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Route {
    Exact,
    Float,
}

#[derive(Clone, Debug, Serialize)]
pub struct SemilargeReport {
    pub family: Family,
    pub n: usize,
    pub x: f64,
    pub a_n: usize,
    pub route: Route,
    /// `[z^n] M·H^{a_n}·ρ^n`.
    pub scaled_coefficient: f64,
    /// `Ray(x·h/σ)·M(ρ)·σ^{a_n}/(n·√π)`.
    pub scaled_prediction: f64,
    pub ratio: f64,
    /// Relative error bound on `scaled_coefficient` (0 for the exact route
    /// beyond the final conversion).
    pub rel_error_bound: f64,
    pub coefficient: CoefficientRatio,
}

/// `[z^n]D ÷ (γ_D/(2√π)·ρ^{-n}·n^{-3/2})`.
#[derive(Clone, Debug, Serialize)]
pub struct CoefficientRatio {
    pub n: usize,
    pub ratio: f64,
}

/// Rayleigh density `x/2·e^{-x²/4}`.
pub fn rayleigh(x: f64) -> f64 {
    x / 2.0 * (-x * x / 4.0).exp()
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

fn constants(f: Family) -> Result<FamilyConstants<f64>> {
    Ok(solve_constants::<MpFloat>(f, 128)?.to_f64())
}

/// Semi-large powers check at size `n` and `a_n = ⌊x√n⌋`; exact up to
/// [`EXACT_CAP`].
pub fn semilarge_check(f: Family, n: usize, x: f64) -> Result<SemilargeReport> {
    let route = if n <= EXACT_CAP { Route::Exact } else { Route::Float };
    semilarge_check_with(f, n, x, route)
}

pub fn semilarge_check_with(f: Family, n: usize, x: f64, route: Route) -> Result<SemilargeReport> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::Invalid(format!("x must be positive, got {x}")));
    }
    let a_n = (x * (n as f64).sqrt()).floor() as usize;
    if a_n < 1 || n < 2 {
        return Err(Error::Invalid(format!("a_n = floor(x*sqrt(n)) must be at least 1 (n = {n}, x = {x})")));
    }
    let c = constants(f)?;
    let (scaled_coefficient, total_scaled, rel_error_bound) = match route {
        Route::Exact => {
            let (top, total) = exact_coefficients(f, n, a_n);
            let shift = n as f64 * c.rho.ln() - ln_factorial(n);
            ((ln_bigint(&top) + shift).exp(), (ln_bigint(&total) + shift).exp(), 0.0)
        }
        Route::Float => {
            let (top, total) = float_coefficients(f, n, a_n, c.rho);
            let bound = 10.0 * (n as f64).powi(2) * f64::EPSILON * ((a_n as f64).log2() + 5.0);
            (top, total, bound)
        }
    };
    let scaled_prediction = rayleigh(x * c.gamma_h / c.sigma) * m_at_rho(&c) * c.sigma.powi(a_n as i32)
        / (n as f64 * std::f64::consts::PI.sqrt());
    let coef_pred = c.gamma_d / (2.0 * std::f64::consts::PI.sqrt()) * (n as f64).powf(-1.5);
    Ok(SemilargeReport {
        family: f,
        n,
        x,
        a_n,
        route,
        scaled_coefficient,
        scaled_prediction,
        ratio: scaled_coefficient / scaled_prediction,
        rel_error_bound,
        coefficient: CoefficientRatio {
            n,
            ratio: total_scaled / coef_pred,
        },
    })
}

/// Coefficient-asymptotics ratio alone.
pub fn coefficient_ratio(f: Family, n: usize) -> Result<CoefficientRatio> {
    let c = constants(f)?;
    let t = Tables::new(f, n);
    let total = t.total(n)?;
    let scaled = (ln_bigint(&total) + n as f64 * c.rho.ln() - ln_factorial(n)).exp();
    let pred = c.gamma_d / (2.0 * std::f64::consts::PI.sqrt()) * (n as f64).powf(-1.5);
    Ok(CoefficientRatio { n, ratio: scaled / pred })
}

/// Labeled counts `n!·[z^n]` of `M·H^a` and of the family series.
fn exact_coefficients(f: Family, n: usize, a: usize) -> (num_bigint::BigInt, num_bigint::BigInt) {
    let t = Tables::new(f, n);
    let b: &Binomials = t.binomials();
    let z = LabeledSeries::z(n);
    let one = LabeledSeries::one(n);
    let total = t.total(n).expect("within order");
    let (m, h) = match f {
        Family::Leaf3 => {
            let sx = LabeledSeries::from_counts(t.class_counts(1), n);
            let l = z.exp_ge(1, b);
            let set = l.add(&sx).exp_ge(0, b);
            let ez_set = z.exp_ge(0, b).mul(&set, b);
            (ez_set.mul(&ez_set, b), l.mul(&set, b))
        }
        _ => {
            let dk = LabeledSeries::from_counts(t.class_counts(0), n);
            let dsx = LabeledSeries::from_counts(t.class_counts(2), n);
            let ff = z.add(&dk).add(&dsx).exp_ge(1, b);
            let inv = ff.add(&ff.mul(&ff, b).scale(2)).geometric(b);
            let jw = if f == Family::Dh { ff.clone() } else { ff.sub(&z) };
            let (nf, nx) = lambda_numerator_counts(f);
            let num = one.scale(nx).add(&ff.scale(nf - nx));
            (num.mul(&num, b).mul(&inv, b), jw.mul(&inv, b))
        }
    };
    (m.mul_top(&h.pow(a, b), b), total)
}

/// `Σ_{a ∈ ends} Λ_a·√Δ = nf·F + nx·(1 - F)`: returns `(nf, nx)`.
fn lambda_numerator_counts(f: Family) -> (i64, i64) {
    let ends = end_types(f);
    let nx = ends.iter().filter(|&&a| a == 2).count() as i64;
    (ends.len() as i64 - nx, nx)
}

/// Scaled `[z^n]` of `M·H^a` and of the family series, in `f64`.
fn float_coefficients(f: Family, n: usize, a: usize, rho: f64) -> (f64, f64) {
    let t = ScaledTables::new(f, rho, n);
    let z = ScaledSeries::z(rho, n);
    let one = ScaledSeries::one(rho, n);
    let (m, h) = match f {
        Family::Leaf3 => {
            let l = &t.classes[0];
            let ez_set = z.exp().mul(&t.f);
            (ez_set.mul(&ez_set), l.mul(&t.f))
        }
        _ => {
            let ff = &t.f;
            let inv = ff.add(&ff.mul(ff).scale(2.0)).geometric();
            let jw = if f == Family::Dh { ff.clone() } else { ff.sub(&z) };
            let (nf, nx) = lambda_numerator_counts(f);
            let num = one.scale(nx as f64).add(&ff.scale((nf - nx) as f64));
            (num.mul(&num).mul(&inv), jw.mul(&inv))
        }
    };
    (m.mul_top(&h.pow(a)), t.total().c[n])
}

/// Finite-difference estimate of the square-root coefficient of the
/// fixpoint series (`F`, or `E_SX` for leaf3) next to `ρ`.
#[derive(Clone, Debug, Serialize)]
pub struct SlopeCheck {
    pub family: Family,
    pub gamma: f64,
    pub estimate: f64,
    pub rel_diff: f64,
}

/// `s(δ) = (w(ρ) - w(ρ(1-δ)))/√δ = γ + O(√δ)`; one Richardson step removes
/// the `√δ` term.
pub fn slope_check(f: Family) -> Result<SlopeCheck> {
    let c = constants(f)?;
    let order = 8000;
    let t = ScaledTables::new(f, c.rho, order);
    let series = match f {
        Family::Leaf3 => &t.classes[1],
        _ => &t.f,
    };
    let s = |d: f64| (c.f_at_rho - series.eval_scaled(1.0 - d)) / d.sqrt();
    let delta = 0.01;
    let estimate = 2.0 * s(delta / 4.0) - s(delta);
    Ok(SlopeCheck {
        family: f,
        gamma: c.gamma_f,
        estimate,
        rel_diff: (estimate - c.gamma_f).abs() / c.gamma_f,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_route_agrees_with_exact_route() {
        for f in Family::ALL {
            let e = semilarge_check_with(f, 150, 1.0, Route::Exact).unwrap();
            let g = semilarge_check_with(f, 150, 1.0, Route::Float).unwrap();
            let d = (e.scaled_coefficient - g.scaled_coefficient).abs() / e.scaled_coefficient;
            assert!(d < g.rel_error_bound.max(1e-11), "{f}: {d:e}");
            let d = (e.coefficient.ratio - g.coefficient.ratio).abs();
            assert!(d < 1e-10, "{f}: {d:e}");
        }
    }

    #[test]
    fn exact_route_matches_rational_series() {
        use crate::enumeration::marked::BaseSeries;
        let n = 20;
        let a = 3;
        let base = BaseSeries::solve(Family::Dh, n).unwrap();
        let h = base.h().unwrap();
        let one = crate::RationalSeries::one(n);
        let m = (&one + &base.f).div(&(&one - &(&base.f + &base.f))).unwrap();
        let want = (&m * &h.pow(a)).labeled_counts()[n].clone();
        assert_eq!(exact_coefficients(Family::Dh, n, a).0, want);
    }

    #[test]
    fn slope_matches_gamma() {
        for f in Family::ALL {
            let s = slope_check(f).unwrap();
            assert!(s.rel_diff < 0.05, "{s:?}");
        }
    }

    #[test]
    fn small_a_n_is_rejected() {
        assert!(semilarge_check(Family::Dh, 4, 0.1).is_err());
    }
}
