//! Monte-Carlo checks of the rescaled distance laws: two-point distances
//! against the Rayleigh law, and enriched k-point subtrees against uniform
//! shapes with chi-distributed total length.

use crate::asymptotics::solve_constants;
use crate::crt::{chi_cdf, double_factorial_odd, KProperTree};
use crate::sampler::{replicate_rng, Sampler, SamplerConfig};
use crate::treecodec::EnrichedError;
use crate::{Error, Family, Result};
use rand::seq::index::sample as sample_indices;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};
use std::collections::BTreeMap;

pub const MIN_KS_SAMPLES: usize = 20;
pub const MIN_REPLICATES: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KsResult {
    pub n: usize,
    pub statistic: f64,
    pub p_value: f64,
}

/// One-sample Kolmogorov–Smirnov test with the asymptotic p-value
/// (Stephens' small-sample correction of the argument).
pub fn ks_test(samples: &[f64], cdf: impl Fn(f64) -> f64) -> Result<KsResult> {
    let n = samples.len();
    if n < MIN_KS_SAMPLES {
        return Err(Error::TooFewSamples(n));
    }
    let mut xs = samples.to_vec();
    xs.sort_by(|a, b| a.total_cmp(b));
    let nf = n as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i + 1) as f64 / nf - f).max(f - i as f64 / nf);
    }
    let lambda = (nf.sqrt() + 0.12 + 0.11 / nf.sqrt()) * d;
    Ok(KsResult {
        n,
        statistic: d,
        p_value: kolmogorov_q(lambda),
    })
}

/// Two-sample Kolmogorov–Smirnov test, asymptotic p-value with the
/// effective size `nm/(n+m)`.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<KsResult> {
    for s in [a, b] {
        if s.len() < MIN_KS_SAMPLES {
            return Err(Error::TooFewSamples(s.len()));
        }
    }
    let sorted = |s: &[f64]| {
        let mut v = s.to_vec();
        v.sort_by(|x, y| x.total_cmp(y));
        v
    };
    let (xa, xb) = (sorted(a), sorted(b));
    let (na, nb) = (xa.len() as f64, xb.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < xa.len() && j < xb.len() {
        let x = xa[i].min(xb[j]);
        while i < xa.len() && xa[i] <= x {
            i += 1;
        }
        while j < xb.len() && xb[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    let ne = na * nb / (na + nb);
    let lambda = (ne.sqrt() + 0.12 + 0.11 / ne.sqrt()) * d;
    Ok(KsResult {
        n: xa.len() + xb.len(),
        statistic: d,
        p_value: kolmogorov_q(lambda),
    })
}

/// `P(K > λ)` for the Kolmogorov distribution.
pub fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for j in 1..=100 {
        let term = (-2.0 * (j * j) as f64 * lambda * lambda).exp();
        sum += if j % 2 == 1 { term } else { -term };
        if term < 1e-17 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Rayleigh distribution function `1 - e^{-x²/2}`.
pub fn rayleigh_cdf(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        -(-x * x / 2.0).exp_m1()
    }
}

/// Distance normalization: `Printed` multiplies by `c_f = √2/γ`;
/// `Density` by `γ/√2 = 1/c_f`, the factor under which the jump counts of
/// the enriched subtree have the CRT edge-length density.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Printed,
    Density,
}

impl std::str::FromStr for Scale {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "printed" => Ok(Scale::Printed),
            "density" => Ok(Scale::Density),
            other => Err(Error::Invalid(format!("unknown scale `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    TwoPoint,
    KPoint,
}

#[derive(Clone, Debug, Serialize)]
pub struct ShapeFrequency {
    /// Sorted clade bitmasks of the internal edges.
    pub shape: Vec<u64>,
    pub count: usize,
    pub frequency: f64,
    pub expected: f64,
    /// `(frequency - expected)/σ` with the binomial σ.
    pub z: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentReport {
    pub version: &'static str,
    pub experiment: Experiment,
    pub family: Family,
    pub n: usize,
    pub replicates: usize,
    pub k: usize,
    pub seed: u64,
    pub c_f: f64,
    pub scale: Scale,
    /// Factor applied to `d/√m`: `c_f` or `1/c_f`.
    pub factor: f64,
    /// Reference law of the rescaled statistic.
    pub reference: String,
    pub reference_mean: f64,
    pub mean: f64,
    pub ks: KsResult,
    pub shapes: Vec<ShapeFrequency>,
    pub shape_chi2_p_value: Option<f64>,
    /// Markings whose spanned subtree has a branch vertex of degree above 3.
    pub degenerate: usize,
    /// Kept markings with two neighboring essential vertices.
    pub adjacent_essentials: usize,
    /// Rescaled statistic per kept replicate, in replicate order.
    pub values: Vec<f64>,
    pub note: &'static str,
}

const NOTE: &str = "tolerances for finite n are empirical; the limit laws hold as n tends to infinity";

impl ExperimentReport {
    /// Largest `|z|` over the shape frequencies.
    pub fn max_shape_z(&self) -> f64 {
        self.shapes.iter().map(|s| s.z.abs()).fold(0.0, f64::max)
    }

    /// CSV with a commented header carrying the configuration.
    pub fn to_csv(&self) -> String {
        let mut out = format!(
            "# splitlimit {} {:?} family={} n={} replicates={} k={} seed={} c_f={} factor={}\n# columns: replicate index among kept draws, rescaled statistic ({})\nreplicate,value\n",
            self.version, self.experiment, self.family, self.n, self.replicates, self.k, self.seed, self.c_f, self.factor, self.reference
        );
        for (i, v) in self.values.iter().enumerate() {
            out.push_str(&format!("{i},{v}\n"));
        }
        out
    }

    /// Histogram of the values with the reference density on top.
    pub fn to_svg(&self) -> String {
        let bins = 40usize;
        let top = self.values.iter().cloned().fold(0.0, f64::max).max(1e-9) * 1.05;
        let width = top / bins as f64;
        let mut hist = vec![0usize; bins];
        for &v in &self.values {
            hist[((v / width) as usize).min(bins - 1)] += 1;
        }
        let total = self.values.len().max(1) as f64;
        let dens: Vec<f64> = hist.iter().map(|&h| h as f64 / (total * width)).collect();
        let k = self.k as f64;
        let reference = |x: f64| -> f64 {
            // chi(2k) density; k = 1 is the Rayleigh density
            let lg = statrs::function::gamma::ln_gamma(k);
            ((2.0 * k - 1.0) * x.ln() - x * x / 2.0 - (k - 1.0) * 2f64.ln() - lg).exp()
        };
        let curve: Vec<(f64, f64)> = (1..=200).map(|i| top * i as f64 / 200.0).map(|x| (x, reference(x))).collect();
        let ymax = dens.iter().cloned().chain(curve.iter().map(|c| c.1)).fold(0.0, f64::max).max(1e-9) * 1.1;
        let (w, h, pad) = (640.0, 400.0, 40.0);
        let sx = |x: f64| pad + x / top * (w - 2.0 * pad);
        let sy = |y: f64| h - pad - y / ymax * (h - 2.0 * pad);
        let mut s = format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\">\n<!-- splitlimit {} {:?} family={} n={} replicates={} k={} seed={} -->\n",
            self.version, self.experiment, self.family, self.n, self.replicates, self.k, self.seed
        );
        for (i, d) in dens.iter().enumerate() {
            let x0 = sx(i as f64 * width);
            let x1 = sx((i + 1) as f64 * width);
            s.push_str(&format!(
                "<rect x=\"{x0:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"#9ab\"/>\n",
                sy(*d),
                x1 - x0,
                sy(0.0) - sy(*d)
            ));
        }
        let pts: Vec<String> = curve.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        s.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"#c33\" stroke-width=\"2\"/>\n",
            pts.join(" ")
        ));
        s.push_str(&format!(
            "<line x1=\"{pad}\" y1=\"{0:.2}\" x2=\"{1:.2}\" y2=\"{0:.2}\" stroke=\"black\"/>\n<text x=\"{pad}\" y=\"20\">{2} vs {3}</text>\n</svg>\n",
            sy(0.0),
            w - pad,
            self.family,
            self.reference
        ));
        s
    }
}

fn c_f(f: Family) -> Result<f64> {
    Ok(solve_constants::<f64>(f, 64)?.c_f)
}

fn factor(cf: f64, scale: Scale) -> f64 {
    match scale {
        Scale::Printed => cf,
        Scale::Density => 1.0 / cf,
    }
}

fn exact_sampler(f: Family, n: usize, seed: u64) -> Result<Sampler> {
    Sampler::new(&SamplerConfig::exact(f, n, seed))
}

fn check_reps(reps: usize) -> Result<()> {
    if reps < MIN_REPLICATES {
        return Err(Error::Invalid(format!("need at least {MIN_REPLICATES} replicates, got {reps}")));
    }
    Ok(())
}

/// Rescaled distance `c_f·d/√m` between two distinct uniform vertices of a
/// uniform graph with `m = n + 1` vertices.
pub fn two_point(f: Family, n: usize, reps: usize, seed: u64) -> Result<ExperimentReport> {
    two_point_with(f, n, reps, seed, Scale::Printed)
}

pub fn two_point_with(f: Family, n: usize, reps: usize, seed: u64, scale_by: Scale) -> Result<ExperimentReport> {
    check_reps(reps)?;
    let cf = c_f(f)?;
    let sampler = exact_sampler(f, n, seed)?;
    let m = n + 1;
    let fac = factor(cf, scale_by);
    let scale = fac / (m as f64).sqrt();
    let values = (0..reps as u64)
        .into_par_iter()
        .map(|i| -> Result<f64> {
            let tree = sampler.draw_replicate(seed, i)?;
            let mut rng = replicate_rng(seed ^ 0x9e37_79b9_7f4a_7c15, i);
            let pair = sample_indices(&mut rng, m, 2);
            let d = tree.index().distance(pair.index(0) as u32, pair.index(1) as u32)?;
            Ok(d as f64 * scale)
        })
        .collect::<Result<Vec<f64>>>()?;
    let ks = ks_test(&values, rayleigh_cdf)?;
    Ok(ExperimentReport {
        version: env!("CARGO_PKG_VERSION"),
        experiment: Experiment::TwoPoint,
        family: f,
        n,
        replicates: reps,
        k: 1,
        seed,
        c_f: cf,
        scale: scale_by,
        factor: fac,
        reference: "rayleigh".into(),
        reference_mean: (std::f64::consts::PI / 2.0).sqrt(),
        mean: values.iter().sum::<f64>() / values.len() as f64,
        ks,
        shapes: Vec::new(),
        shape_chi2_p_value: None,
        degenerate: 0,
        adjacent_essentials: 0,
        values,
        note: NOTE,
    })
}

enum KDraw {
    Kept { shape: Vec<u64>, total: f64, adjacent: bool },
    Degenerate,
}

/// Shape and rescaled total jump count of the subtree spanned by `k + 1`
/// distinct uniform vertices (the first one as root).
pub fn k_point(f: Family, n: usize, k: usize, reps: usize, seed: u64) -> Result<ExperimentReport> {
    k_point_with(f, n, k, reps, seed, Scale::Printed)
}

pub fn k_point_with(f: Family, n: usize, k: usize, reps: usize, seed: u64, scale_by: Scale) -> Result<ExperimentReport> {
    check_reps(reps)?;
    if k < 2 {
        return Err(Error::Invalid(format!("k-point needs k >= 2, got {k}")));
    }
    if k > 8 {
        return Err(Error::Invalid(format!("k-point supports k <= 8, got {k}")));
    }
    let m = n + 1;
    if m < k + 1 {
        return Err(Error::Invalid(format!("cannot mark {} vertices in a graph on {m}", k + 1)));
    }
    let cf = c_f(f)?;
    let sampler = exact_sampler(f, n, seed)?;
    let fac = factor(cf, scale_by);
    let scale = fac / (m as f64).sqrt();
    let draws = (0..reps as u64)
        .into_par_iter()
        .map(|i| -> Result<KDraw> {
            let tree = sampler.draw_replicate(seed, i)?;
            let mut rng = replicate_rng(seed ^ 0x9e37_79b9_7f4a_7c15, i);
            let marks: Vec<u32> = sample_indices(&mut rng, m, k + 1).into_iter().map(|v| v as u32).collect();
            match tree.index().enriched(&marks) {
                Ok(e) => Ok(KDraw::Kept {
                    shape: e.tree.shape_key(),
                    total: e.jumps.iter().sum::<u32>() as f64 * scale,
                    adjacent: e.adjacent_essentials,
                }),
                Err(EnrichedError::HighDegree(_)) => Ok(KDraw::Degenerate),
                Err(e) => Err(Error::Invalid(format!("marking failed: {e:?}"))),
            }
        })
        .collect::<Result<Vec<KDraw>>>()?;
    let mut values = Vec::new();
    let mut counts: BTreeMap<Vec<u64>, usize> = KProperTree::all(k).into_iter().map(|t| (t.shape_key(), 0)).collect();
    let (mut degenerate, mut adjacent) = (0, 0);
    for d in draws {
        match d {
            KDraw::Kept { shape, total, adjacent: a } => {
                *counts.entry(shape).or_insert(0) += 1;
                values.push(total);
                adjacent += a as usize;
            }
            KDraw::Degenerate => degenerate += 1,
        }
    }
    let kept = values.len();
    let expected = 1.0 / double_factorial_odd(k) as f64;
    let sigma = (expected * (1.0 - expected) / kept.max(1) as f64).sqrt();
    let shapes: Vec<ShapeFrequency> = counts
        .into_iter()
        .map(|(shape, count)| {
            let frequency = count as f64 / kept.max(1) as f64;
            ShapeFrequency {
                shape,
                count,
                frequency,
                expected,
                z: if sigma > 0.0 { (frequency - expected) / sigma } else { 0.0 },
            }
        })
        .collect();
    let cells = shapes.len();
    let chi2: f64 = shapes
        .iter()
        .map(|s| {
            let e = expected * kept as f64;
            (s.count as f64 - e).powi(2) / e
        })
        .sum();
    let shape_chi2_p_value = (cells > 1).then(|| 1.0 - ChiSquared::new((cells - 1) as f64).unwrap().cdf(chi2));
    let dof = 2.0 * k as f64;
    let ks = ks_test(&values, |x| chi_cdf(dof, x))?;
    Ok(ExperimentReport {
        version: env!("CARGO_PKG_VERSION"),
        experiment: Experiment::KPoint,
        family: f,
        n,
        replicates: reps,
        k,
        seed,
        c_f: cf,
        scale: scale_by,
        factor: fac,
        reference: format!("chi({})", 2 * k),
        reference_mean: std::f64::consts::SQRT_2
            * (statrs::function::gamma::ln_gamma(k as f64 + 0.5) - statrs::function::gamma::ln_gamma(k as f64)).exp(),
        mean: values.iter().sum::<f64>() / kept.max(1) as f64,
        ks,
        shapes,
        shape_chi2_p_value,
        degenerate,
        adjacent_essentials: adjacent,
        values,
        note: NOTE,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn uniforms(count: usize, seed: u64) -> Vec<f64> {
        let mut rng = replicate_rng(seed, 0);
        (0..count).map(|_| rng.gen::<f64>()).collect()
    }

    #[test]
    fn ks_accepts_uniform_against_uniform() {
        let r = ks_test(&uniforms(10_000, 1), |x| x.clamp(0.0, 1.0)).unwrap();
        assert!(r.p_value > 1e-3, "{r:?}");
    }

    #[test]
    fn ks_rejects_uniform_against_rayleigh() {
        let r = ks_test(&uniforms(10_000, 2), rayleigh_cdf).unwrap();
        assert!(r.p_value < 1e-6, "{r:?}");
    }

    #[test]
    fn ks_accepts_inverse_transform_rayleigh() {
        let xs: Vec<f64> = uniforms(10_000, 3).into_iter().map(|u| (-2.0 * (1.0 - u).ln()).sqrt()).collect();
        let r = ks_test(&xs, rayleigh_cdf).unwrap();
        assert!(r.p_value > 1e-3, "{r:?}");
    }

    #[test]
    fn two_sample_ks_separates_shifted_samples() {
        let a = uniforms(5000, 4);
        let b = uniforms(5000, 5);
        assert!(ks_two_sample(&a, &b).unwrap().p_value > 1e-3);
        let shifted: Vec<f64> = b.iter().map(|x| x + 0.1).collect();
        assert!(ks_two_sample(&a, &shifted).unwrap().p_value < 1e-6);
        let r = ks_two_sample(&[0.0; 20], &[1.0; 20]).unwrap();
        assert_eq!(r.statistic, 1.0);
    }

    #[test]
    fn ks_needs_twenty_samples() {
        assert!(matches!(ks_test(&[0.5; 19], |x| x), Err(Error::TooFewSamples(19))));
    }

    #[test]
    fn kolmogorov_tail_known_values() {
        // Q(1.3581) ≈ 0.05, Q(1.6276) ≈ 0.01
        assert!((kolmogorov_q(1.3581) - 0.05).abs() < 1e-4);
        assert!((kolmogorov_q(1.6276) - 0.01).abs() < 1e-4);
    }

    #[test]
    fn reports_are_reproducible() {
        let a = two_point(Family::Dh, 200, 100, 5).unwrap();
        let b = two_point(Family::Dh, 200, 100, 5).unwrap();
        assert_eq!(a.values, b.values);
        let a = k_point(Family::Leaf3, 200, 3, 100, 5).unwrap();
        let b = k_point(Family::Leaf3, 200, 3, 100, 5).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }

    #[test]
    fn k_point_reports_every_shape() {
        let r = k_point(Family::Dh, 300, 3, 200, 9).unwrap();
        assert_eq!(r.shapes.len(), 3);
        assert_eq!(r.shapes.iter().map(|s| s.count).sum::<usize>() + r.degenerate, 200);
        assert!(r.to_csv().starts_with("# splitlimit"));
        assert!(r.to_svg().contains("<polyline"));
    }

    #[test]
    fn too_few_replicates_rejected() {
        assert!(two_point(Family::Dh, 100, 99, 0).is_err());
        assert!(k_point(Family::Dh, 100, 1, 100, 0).is_err());
    }
}
