//! Dominant singularities, square-root expansion constants and the
//! identities tying them together, plus the semi-large powers check.
//!
//! For dh and dh2c the fixpoint is `F = G(z, F)` with `G = exp_{≥1}(y)`;
//! for leaf3 it is `E_SX = G(z, E_SX)` with `G = L·(exp(L+w) - 1)`.  Every
//! other series is a function of `z` and that fixpoint `w`, so its
//! square-root coefficient is `∂_w(series)·γ_F`.

pub(crate) mod floats;
pub mod semilarge;

pub use floats::{ScaledSeries, ScaledTables};
pub use semilarge::{coefficient_ratio, semilarge_check, slope_check, CoefficientRatio, SemilargeReport, SlopeCheck};

use crate::enumeration::marked::{end_types, junction_terms};
use crate::scalar::{with_precision, Real};
use crate::{Error, Family, Result};
use serde::Serialize;

/// Constants of one family, computed in the scalar `R`.
#[derive(Clone, Debug)]
pub struct FamilyConstants<R> {
    pub family: Family,
    pub precision: usize,
    pub rho: R,
    /// The fixpoint at `rho`: `F(ρ)` for dh and dh2c, `E_SX(ρ)` for leaf3.
    pub f_at_rho: R,
    /// Coefficients `γ` in `S(z) = S(ρ) - γ·√(1-z/ρ) + O(1-z/ρ)`, for the
    /// fixpoint, the K-rooted and SX-rooted classes and the whole family.
    pub gamma_f: R,
    pub gamma_k: R,
    pub gamma_x: R,
    pub gamma_d: R,
    /// Jump series amplitude: `H` for dh, `H̄` for dh2c, `P` for leaf3.
    pub gamma_h: R,
    /// Value of the jump series at `rho` (1 in all three families).
    pub sigma: R,
    /// `√2 / gamma_h`.
    pub c_f: R,
    pub mu: Option<R>,
    pub nu: Option<R>,
    /// The characteristic system evaluated at the solution.
    pub residuals: Vec<(String, R)>,
    /// Bound on the error of every reported constant.
    pub error_bound: f64,
}

/// `G` and the partial derivatives entering the square-root expansion.
#[derive(Clone, Debug)]
struct CharSys<R> {
    g: R,
    g_z: R,
    g_w: R,
    g_ww: R,
}

fn half<R: Real>() -> R {
    R::one() / R::int(2)
}

fn charsys<R: Real>(f: Family, z: &R, w: &R) -> CharSys<R> {
    let one = R::one();
    let two = R::int(2);
    let w1 = one.clone() + w.clone();
    match f {
        Family::Dh | Family::Dh2c => {
            let (y, y_z, y_w, y_ww) = if f == Family::Dh {
                let y = z.clone() / two.clone() + w.clone() / (two.clone() * w1.clone()) + w.clone() * w.clone() / w1.clone();
                let y_w = one.clone() - one.clone() / (two.clone() * w1.powi(2));
                let y_ww = one.clone() / w1.powi(3);
                (y, half::<R>(), y_w, y_ww)
            } else {
                let d = w.clone() - z.clone();
                let g = one.clone() - one.clone() / (two.clone() * w1.clone());
                let y = z.clone() + d.clone() * g.clone();
                let y_z = one.clone() / (two.clone() * w1.clone());
                let y_w = g + d.clone() / (two * w1.powi(2));
                let y_ww = one.clone() / w1.powi(2) - d / w1.powi(3);
                (y, y_z, y_w, y_ww)
            };
            let e = y.exp();
            CharSys {
                g: e.clone() - one,
                g_z: e.clone() * y_z,
                g_w: e.clone() * y_w.clone(),
                g_ww: e * (y_w.clone() * y_w + y_ww),
            }
        }
        Family::Leaf3 => {
            let ez = z.exp();
            let l = ez.clone() - one.clone();
            let t = (l.clone() + w.clone()).exp();
            CharSys {
                g: l.clone() * (t.clone() - one.clone()),
                g_z: ez.clone() * (t.clone() - one) + l.clone() * t.clone() * ez,
                g_w: l.clone() * t.clone(),
                g_ww: l * t,
            }
        }
    }
}

/// Root of `f` on `[lo, hi]` (values of opposite signs at the ends): Newton
/// steps from the current point, falling back to bisection whenever a step
/// leaves the bracket or fails to halve it.
pub fn bisect_newton<R: Real>(f: impl Fn(&R) -> (R, R), lo: R, hi: R, tol: &R) -> Result<R> {
    let (mut lo, mut hi) = (lo, hi);
    let (flo, _) = f(&lo);
    let (fhi, _) = f(&hi);
    let zero = R::zero();
    if (flo > zero) == (fhi > zero) {
        return Err(Error::Bracket {
            lo: lo.to_f64(),
            hi: hi.to_f64(),
        });
    }
    let rising = fhi > zero;
    let two = R::int(2);
    let mut x = (lo.clone() + hi.clone()) / two.clone();
    for _ in 0..2000 {
        let (fx, dfx) = f(&x);
        if fx.is_zero() {
            return Ok(x);
        }
        if (fx > zero) == rising {
            hi = x.clone();
        } else {
            lo = x.clone();
        }
        let width = hi.clone() - lo.clone();
        if width.abs() <= *tol {
            return Ok(x);
        }
        let newton = if dfx.is_zero() {
            None
        } else {
            Some(x.clone() - fx / dfx)
        };
        let next = match newton {
            Some(n) if n > lo && n < hi => n,
            _ => (lo.clone() + hi.clone()) / two.clone(),
        };
        if (next.clone() - x.clone()).abs() <= *tol {
            return Ok(next);
        }
        x = next;
    }
    Ok(x)
}

/// Solves the characteristic system of `f` and derives every constant,
/// working at `precision` bits (only meaningful for the software float).
pub fn solve_constants<R: Real>(f: Family, precision: usize) -> Result<FamilyConstants<R>> {
    if precision < 64 {
        return Err(Error::Invalid(format!("precision must be at least 64 bits, got {precision}")));
    }
    with_precision(precision, || solve_inner::<R>(f, precision))
}

fn solve_inner<R: Real>(f: Family, precision: usize) -> Result<FamilyConstants<R>> {
    let one = R::one();
    let two = R::int(2);
    let tol = R::epsilon() * R::int(64);
    let (rho, w) = match f {
        Family::Dh => {
            let w = (R::int(3).sqrt() - one.clone()) / two.clone();
            let rho = bisect_newton(
                |z: &R| {
                    let c = charsys(f, z, &w);
                    (c.g - w.clone(), c.g_z)
                },
                R::zero(),
                half(),
                &tol,
            )?;
            (rho, w)
        }
        Family::Dh2c => {
            let s = bisect_newton(
                |s: &R| {
                    let e = (two.clone() * s.clone() - half::<R>()).exp();
                    (e.clone() - one.clone() - s.clone(), two.clone() * e - one.clone())
                },
                R::zero(),
                R::one(),
                &tol,
            )?;
            let rho = two.clone() * s.clone() * s.clone() + two.clone() * s.clone() - one.clone();
            (rho, s)
        }
        Family::Leaf3 => {
            let e = one.exp();
            ((one.clone() + one.clone() / e.clone()).ln(), one.clone() - one.clone() / e)
        }
    };
    let c = charsys(f, &rho, &w);
    let residuals = vec![
        ("G(rho, w) - w".to_string(), c.g.clone() - w.clone()),
        ("G_w(rho, w) - 1".to_string(), c.g_w.clone() - one.clone()),
    ];
    let gamma_f = (two.clone() * rho.clone() * c.g_z.clone() / c.g_ww.clone()).sqrt();
    let d = derivatives(f, &rho, &w);
    let gamma_h = d.h.clone() * gamma_f.clone();
    let c_f = two.sqrt() / gamma_h.clone();
    let (mu, nu) = match f {
        Family::Leaf3 => (None, None),
        _ => {
            let (mu, nu) = mu_nu(f, &rho, &w);
            (Some(mu), Some(nu))
        }
    };
    Ok(FamilyConstants {
        family: f,
        precision,
        gamma_k: d.k * gamma_f.clone(),
        gamma_x: d.x * gamma_f.clone(),
        gamma_d: d.total * gamma_f.clone(),
        gamma_h,
        sigma: d.sigma,
        c_f,
        mu,
        nu,
        gamma_f,
        rho,
        f_at_rho: w,
        residuals,
        error_bound: 2f64.powi(-(precision.min(1000) as i32 - 12)).max(f64::EPSILON * 64.0),
    })
}

/// `∂_w` of the family series at `(z, w)`, and the jump series value.
struct Derivs<R> {
    k: R,
    x: R,
    total: R,
    h: R,
    sigma: R,
}

/// `(1+w)(1-2w)`.
fn delta<R: Real>(w: &R) -> R {
    (R::one() + w.clone()) * (R::one() - R::int(2) * w.clone())
}

/// Numerator of the jump series: `F` for dh, `F - z` for dh2c.
fn jump_weight<R: Real>(f: Family, z: &R, w: &R) -> R {
    match f {
        Family::Dh => w.clone(),
        _ => w.clone() - z.clone(),
    }
}

fn derivatives<R: Real>(f: Family, z: &R, w: &R) -> Derivs<R> {
    let one = R::one();
    let two = R::int(2);
    let w1 = one.clone() + w.clone();
    match f {
        Family::Dh | Family::Dh2c => {
            let (k, x) = if f == Family::Dh {
                (one.clone() / (two.clone() * w1.powi(2)), one.clone() - one.clone() / w1.powi(2))
            } else {
                (
                    (one.clone() + z.clone()) / (two.clone() * w1.powi(2)),
                    (w.clone() * w.clone() + two.clone() * w.clone() - z.clone()) / w1.powi(2),
                )
            };
            let total = if f == Family::Dh {
                two.clone() * k.clone() + x.clone()
            } else {
                k.clone() + x.clone()
            };
            let del = delta(w);
            let del_w = -(one.clone() + R::int(4) * w.clone());
            let n = jump_weight(f, z, w);
            let h = (del.clone() - n.clone() * del_w) / (del.clone() * del.clone());
            Derivs {
                k,
                x,
                total,
                h,
                sigma: n / del,
            }
        }
        Family::Leaf3 => {
            let l = z.exp() - one.clone();
            let t = (l.clone() + w.clone()).exp();
            let p = l.clone() * t.clone();
            Derivs {
                k: p.clone(),
                x: one.clone(),
                total: t * (one + l),
                h: p.clone(),
                sigma: p,
            }
        }
    }
}

/// `Λ_a` at `(z, w)` for `a` in K, SC, SX.
fn lambdas<R: Real>(w: &R) -> [R; 3] {
    let s = delta(w).sqrt();
    let k = w.clone() / s.clone();
    [k.clone(), k, (R::one() - w.clone()) / s]
}

/// `J_a^{bc}` at `(z, w)`.
fn junction_value<R: Real>(f: Family, z: &R, w: &R, a: usize, b: usize, c: usize) -> R {
    let (n, with_jump) = junction_terms(a, b, c);
    let mut v = R::int(n) * (R::one() + w.clone());
    if with_jump {
        v = v + jump_weight(f, z, w);
    }
    v
}

/// `(μ, ν)`: `Λ_•` sums over the end types of the family, the junction sum
/// over all three types.
fn mu_nu<R: Real>(f: Family, z: &R, w: &R) -> (R, R) {
    let lam = lambdas(w);
    let bullet = end_types(f).into_iter().fold(R::zero(), |acc, a| acc + lam[a].clone());
    let mut s = R::zero();
    for a in 0..3 {
        for b in 0..3 {
            for c in 0..3 {
                s = s + lam[a].clone() * lam[b].clone() * lam[c].clone() * junction_value(f, z, w, a, b, c);
            }
        }
    }
    (bullet.clone() / s.clone(), bullet * s)
}

/// `M(ρ)` for the semi-large check: `Λ_•²` for dh and dh2c, `N(ρ)` with
/// one mark for leaf3.
pub fn m_at_rho<R: Real>(c: &FamilyConstants<R>) -> R {
    match c.family {
        Family::Leaf3 => leaf_n(&c.rho, &c.f_at_rho, 1),
        f => {
            let lam = lambdas(&c.f_at_rho);
            let b = end_types(f).into_iter().fold(R::zero(), |acc, a| acc + lam[a].clone());
            b.clone() * b
        }
    }
}

/// `N = (e^z·exp(L + E_SX))^{k+1} · P^{k-1}` at `(z, w)`.
fn leaf_n<R: Real>(z: &R, w: &R, k: u32) -> R {
    let ez = z.exp();
    let t = (ez.clone() - R::one() + w.clone()).exp();
    let p = (ez.clone() - R::one()) * t.clone();
    (ez * t).powi(k + 1) * p.powi(k.saturating_sub(1))
}

/// One identity between constants.
#[derive(Clone, Debug, Serialize)]
pub struct ConstantCheck {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConstantReport {
    pub family: Family,
    pub precision: usize,
    pub checks: Vec<ConstantCheck>,
}

impl ConstantReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&ConstantCheck> {
        self.checks.iter().find(|c| !c.passed)
    }
}

/// Evaluates the identities between the constants of `f`; residuals are
/// relative to `max(1, |expected|)`.
pub fn verify_constant_identities<R: Real>(f: Family, precision: usize) -> Result<ConstantReport> {
    let c = solve_constants::<R>(f, precision)?;
    let tolerance = 1e-12f64.max(c.error_bound * 1e3);
    let checks = with_precision(precision, || identity_residuals(&c))
        .into_iter()
        .map(|(name, residual)| ConstantCheck {
            passed: residual.abs() <= tolerance,
            name,
            residual,
            tolerance,
        })
        .collect();
    Ok(ConstantReport {
        family: f,
        precision,
        checks,
    })
}

fn identity_residuals<R: Real>(c: &FamilyConstants<R>) -> Vec<(String, f64)> {
    let one = R::one();
    let two = R::int(2);
    let three = R::int(3);
    let e = one.exp();
    let rel = |got: R, want: R| -> f64 {
        let scale = if want.abs() > one { want.abs() } else { one.clone() };
        ((got - want) / scale).to_f64()
    };
    let mut out: Vec<(String, f64)> = c.residuals.iter().map(|(n, r)| (n.clone(), r.to_f64())).collect();
    let (rho, w) = (c.rho.clone(), c.f_at_rho.clone());
    let gh = c.gamma_h.clone();
    let mut push = |name: &str, got: R, want: R| out.push((name.to_string(), rel(got, want)));
    match c.family {
        Family::Dh => {
            let r3 = three.sqrt();
            push("2F^2 + 2F - 1 = 0", two.clone() * w.clone() * w.clone() + two.clone() * w.clone(), one.clone());
            push("H(rho) = 1", c.sigma.clone(), one.clone());
            push(
                "D_SX(rho) = (2 - sqrt3)/(1 + sqrt3)",
                w.clone() * w.clone() / (one.clone() + w.clone()),
                (two.clone() - r3.clone()) / (one.clone() + r3.clone()),
            );
            let root = (R::int(6) + R::int(4) * r3.clone()).sqrt();
            push(
                "gamma_F closed form",
                c.gamma_f.clone(),
                (one.clone() + r3.clone()).powi(2) / (two.clone() * root.clone()) * rho.sqrt(),
            );
            push(
                "gamma_D closed form",
                c.gamma_d.clone(),
                (two.clone() + r3) / root * rho.sqrt(),
            );
            push(
                "gamma_H closed form",
                gh.clone(),
                (one.clone() / (three.clone() * (one.clone() + w.clone()).powi(2))
                    + two.clone() / (three.clone() * (one.clone() - two.clone() * w.clone()).powi(2)))
                    * c.gamma_f.clone(),
            );
        }
        Family::Dh2c => {
            push(
                "rho = 2F^2 + 2F - 1",
                rho.clone(),
                two.clone() * w.clone() * w.clone() + two.clone() * w.clone() - one.clone(),
            );
            push(
                "F = exp_{>=1}(2F - 1/2)",
                w.clone(),
                (two.clone() * w.clone() - half::<R>()).exp() - one.clone(),
            );
            push("H(rho) = 1", c.sigma.clone(), one.clone());
            push(
                "gamma_F^2 = rho(1+F)/(1+2F)",
                c.gamma_f.clone() * c.gamma_f.clone(),
                rho.clone() * (one.clone() + w.clone()) / (one.clone() + two.clone() * w.clone()),
            );
            let inner = (one.clone() + two.clone() * w.clone())
                * (two.clone() * w.powi(3) + R::int(4) * w.powi(2) + w.clone() - one.clone());
            push(
                "gamma_H closed form",
                gh.clone(),
                two.clone() * inner.sqrt() / (one.clone() - w.clone() - two.clone() * w.clone() * w.clone()),
            );
        }
        Family::Leaf3 => {
            push("rho = log(1 + 1/e)", rho.clone(), (one.clone() + one.clone() / e.clone()).ln());
            push("E_SX(rho) = 1 - 1/e", w.clone(), one.clone() - one.clone() / e.clone());
            push(
                "gamma_E^2 = 2(1+e)rho",
                c.gamma_f.clone() * c.gamma_f.clone(),
                two.clone() * (one.clone() + e.clone()) * rho.clone(),
            );
            push("P(rho) = 1", c.sigma.clone(), one.clone());
            push("gamma_P = gamma_E", gh.clone(), c.gamma_f.clone());
            push("gamma of E = (e+1) gamma_E", c.gamma_d.clone(), (e.clone() + one.clone()) * c.gamma_f.clone());
            let l = rho.exp() - one.clone();
            let t = (l.clone() + w.clone()).exp();
            let e_sc = t.clone() - one.clone() - l.clone() - w.clone();
            let e_k = l.clone() + (w.clone() + e_sc.clone()) * l;
            push(
                "E(rho) = e - 1/e - 1/e^2",
                w.clone() + e_sc + e_k,
                e.clone() - one.clone() / e.clone() - one.clone() / (e.clone() * e.clone()),
            );
            for k in 1..=4u32 {
                push(
                    &format!("N(rho) = (e+1)^{} for k = {k}", k + 1),
                    leaf_n(&rho, &w, k),
                    (e.clone() + one.clone()).powi(k + 1),
                );
            }
        }
    }
    if let (Some(mu), Some(nu)) = (&c.mu, &c.nu) {
        push("gamma_H^2 = 2 rho nu", gh.clone() * gh.clone(), two * rho * nu.clone());
        push("gamma_H mu = gamma_D", gh * mu.clone(), c.gamma_d.clone());
    }
    out
}

/// Plain view of the constants for JSON output.
#[derive(Clone, Debug, Serialize)]
pub struct ConstantsJson {
    pub family: Family,
    pub precision: usize,
    pub rho: f64,
    #[serde(rename = "F_rho")]
    pub f_rho: f64,
    pub gamma_f: f64,
    pub gamma_k: f64,
    pub gamma_x: f64,
    pub gamma_d: f64,
    pub gamma_h: f64,
    pub c_f: f64,
    pub mu: Option<f64>,
    pub nu: Option<f64>,
    pub error_bound: f64,
    /// Full-precision decimal strings.
    pub digits: std::collections::BTreeMap<String, String>,
    pub residuals: std::collections::BTreeMap<String, f64>,
}

impl<R: Real> FamilyConstants<R> {
    pub fn to_json(&self) -> ConstantsJson {
        let mut digits = std::collections::BTreeMap::new();
        for (k, v) in [
            ("rho", &self.rho),
            ("F_rho", &self.f_at_rho),
            ("gamma_f", &self.gamma_f),
            ("gamma_h", &self.gamma_h),
            ("gamma_d", &self.gamma_d),
            ("c_f", &self.c_f),
        ] {
            digits.insert(k.to_string(), with_precision(self.precision, || v.to_string()));
        }
        ConstantsJson {
            family: self.family,
            precision: self.precision,
            rho: self.rho.to_f64(),
            f_rho: self.f_at_rho.to_f64(),
            gamma_f: self.gamma_f.to_f64(),
            gamma_k: self.gamma_k.to_f64(),
            gamma_x: self.gamma_x.to_f64(),
            gamma_d: self.gamma_d.to_f64(),
            gamma_h: self.gamma_h.to_f64(),
            c_f: self.c_f.to_f64(),
            mu: self.mu.as_ref().map(|v| v.to_f64()),
            nu: self.nu.as_ref().map(|v| v.to_f64()),
            error_bound: self.error_bound,
            digits,
            residuals: self.residuals.iter().map(|(k, v)| (k.clone(), v.to_f64())).collect(),
        }
    }

    /// The same constants in double precision.
    pub fn to_f64(&self) -> FamilyConstants<f64> {
        let m = |v: &R| v.to_f64();
        FamilyConstants {
            family: self.family,
            precision: self.precision,
            rho: m(&self.rho),
            f_at_rho: m(&self.f_at_rho),
            gamma_f: m(&self.gamma_f),
            gamma_k: m(&self.gamma_k),
            gamma_x: m(&self.gamma_x),
            gamma_d: m(&self.gamma_d),
            gamma_h: m(&self.gamma_h),
            sigma: m(&self.sigma),
            c_f: m(&self.c_f),
            mu: self.mu.as_ref().map(m),
            nu: self.nu.as_ref().map(m),
            residuals: self.residuals.iter().map(|(k, v)| (k.clone(), m(v))).collect(),
            error_bound: self.error_bound.max(f64::EPSILON * 16.0),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::MpFloat;

    #[test]
    fn constants_match_published_digits() {
        let dh = solve_constants::<MpFloat>(Family::Dh, 128).unwrap().to_f64();
        assert!((dh.rho - 0.1597).abs() < 1e-4);
        assert!((dh.gamma_h - 3.9258).abs() < 1e-4);
        assert!((dh.c_f - 0.3602).abs() < 1e-4);
        let c2 = solve_constants::<MpFloat>(Family::Dh2c, 128).unwrap().to_f64();
        assert!((c2.gamma_h - 7.5022).abs() < 1e-4);
        assert!((c2.c_f - 0.1885).abs() < 1e-4);
        let l3 = solve_constants::<MpFloat>(Family::Leaf3, 128).unwrap().to_f64();
        assert!((l3.gamma_h - 1.5263).abs() < 1e-4);
        assert!((l3.c_f - 0.9266).abs() < 1e-4);
    }

    #[test]
    fn identities_hold_in_both_scalars() {
        for f in Family::ALL {
            let r = verify_constant_identities::<MpFloat>(f, 128).unwrap();
            assert!(r.all_passed(), "{f}: {:?}", r.first_failure());
            let r = verify_constant_identities::<f64>(f, 64).unwrap();
            assert!(r.all_passed(), "{f} f64: {:?}", r.first_failure());
        }
    }

    #[test]
    fn doubling_precision_stays_within_the_error_bound() {
        for f in Family::ALL {
            let a = solve_constants::<MpFloat>(f, 128).unwrap();
            let b = solve_constants::<MpFloat>(f, 256).unwrap();
            for (x, y) in [
                (&a.rho, &b.rho),
                (&a.gamma_f, &b.gamma_f),
                (&a.gamma_h, &b.gamma_h),
                (&a.gamma_d, &b.gamma_d),
                (&a.c_f, &b.c_f),
            ] {
                let diff = with_precision(256, || (x.clone() - y.clone()).abs().to_f64());
                assert!(diff < a.error_bound, "{f}: {diff:e} vs {:e}", a.error_bound);
            }
        }
    }

    #[test]
    fn c_f_is_sqrt2_over_gamma() {
        for f in Family::ALL {
            let c = solve_constants::<f64>(f, 64).unwrap();
            assert_eq!(c.c_f, 2f64.sqrt() / c.gamma_h);
        }
    }

    #[test]
    fn low_precision_is_rejected() {
        assert!(solve_constants::<f64>(Family::Dh, 32).is_err());
    }

    #[test]
    fn bracket_failure_reports_the_interval() {
        let e = bisect_newton(|x: &f64| (x * x + 1.0, 2.0 * x), 0.0, 1.0, &1e-12).unwrap_err();
        assert!(matches!(e, Error::Bracket { lo, hi } if lo == 0.0 && hi == 1.0));
    }
}
