//! Seeded invariant suites. Every check yields a slack that is non-negative
//! exactly when the check passes at its tolerance.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bochner::{
    bochner_report, delta_r_inner, f_simplex, substitution_check, tolerance_scale,
};
use crate::cone_analysis::{
    alpha_max, extremal_spectrum, in_cone, lambda1_bound, theta_auto, ConeParams, HighAlphaBounds,
    MEMBERSHIP_TOL,
};
use crate::error::{Error, Result};
use crate::model_spaces::{constant_curvature, random_einstein, random_einstein_in_cone};
use crate::oracle_opt::{f_minimizers, lp_min_lambda1, minimize_f, sample_cone};
use crate::rng::stream_rng;
use crate::second_kind::scal_consistency;
use crate::tensor_algebra::traceless_dim;
use crate::weyl_action::{eigen_profile, max_norm_ratio, sum_norm_ratio, weyl_norm_from_spectrum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Identities,
    Cone,
    Bochner,
    Oracles,
}

impl Suite {
    pub const ALL: [Suite; 4] = [
        Suite::Identities,
        Suite::Cone,
        Suite::Bochner,
        Suite::Oracles,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Suite::Identities => "identities",
            Suite::Cone => "cone",
            Suite::Bochner => "bochner",
            Suite::Oracles => "oracles",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A suite name or `all`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteSelection(pub Vec<Suite>);

impl FromStr for SuiteSelection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(Self(Suite::ALL.to_vec())),
            _ => Suite::ALL
                .iter()
                .find(|suite| suite.as_str() == s)
                .map(|&suite| Self(vec![suite]))
                .ok_or_else(|| {
                    Error::Format(format!(
                        "unknown suite '{s}', expected identities, cone, bochner, oracles or all"
                    ))
                }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Grid {
    Default,
    Quick,
}

impl FromStr for Grid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "default" => Ok(Grid::Default),
            "quick" => Ok(Grid::Quick),
            _ => Err(Error::Format(format!(
                "unknown grid '{s}', expected default or quick"
            ))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    /// Dimensions for the identity, cone and Bochner suites.
    pub dims: Vec<usize>,
    /// Samples per dimension (and per parameter point in the cone suite).
    pub count: usize,
    pub seed: u64,
    /// Relative error injected into the `Σ|SʲW|²` constant.
    pub perturb: f64,
    pub grid: Grid,
    pub restarts: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            dims: (4..=10).collect(),
            count: 100,
            seed: 0,
            perturb: 0.0,
            grid: Grid::Default,
            restarts: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleReport {
    pub label: String,
    pub checks: Vec<Check>,
    pub worst_slack: f64,
    pub pass: bool,
    /// Set when the sample could not be evaluated.
    pub error: Option<String>,
}

impl SampleReport {
    fn from_checks(label: String, checks: Result<Vec<Check>>) -> Self {
        match checks {
            Ok(checks) => {
                let worst = checks.iter().map(|c| c.slack).fold(f64::INFINITY, f64::min);
                Self {
                    label,
                    pass: worst >= 0.0,
                    worst_slack: worst,
                    checks,
                    error: None,
                }
            }
            Err(e) => Self {
                label,
                checks: Vec::new(),
                worst_slack: f64::NEG_INFINITY,
                pass: false,
                error: Some(e.to_string()),
            },
        }
    }

    pub fn failing_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !(c.slack >= 0.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summary {
    pub samples: usize,
    pub violations: usize,
    pub worst_slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub reports: Vec<SampleReport>,
    pub summary: Summary,
}

impl SuiteReport {
    fn new(suite: Suite, reports: Vec<SampleReport>) -> Self {
        let summary = Summary {
            samples: reports.len(),
            violations: reports.iter().filter(|r| !r.pass).count(),
            worst_slack: reports
                .iter()
                .map(|r| r.worst_slack)
                .fold(f64::INFINITY, f64::min),
        };
        Self {
            suite,
            reports,
            summary,
        }
    }
}

fn check(name: &'static str, slack: f64) -> Check {
    Check { name, slack }
}

/// `|a − b| ≤ tol·|b|` as a slack in units of `|b|`.
fn rel_slack(a: f64, b: f64, tol: f64) -> f64 {
    if b == 0.0 {
        tol - a.abs()
    } else {
        tol - (a - b).abs() / b.abs()
    }
}

pub fn run(selection: &SuiteSelection, cfg: &VerifyConfig) -> Result<Vec<SuiteReport>> {
    selection.0.iter().map(|&s| run_suite(s, cfg)).collect()
}

pub fn run_suite(suite: Suite, cfg: &VerifyConfig) -> Result<SuiteReport> {
    if cfg.count == 0 {
        return Err(Error::Precondition("count must be at least 1".into()));
    }
    let reports = match suite {
        Suite::Identities => identities(cfg)?,
        Suite::Cone => cone(cfg)?,
        Suite::Bochner => bochner(cfg)?,
        Suite::Oracles => oracles(cfg)?,
    };
    Ok(SuiteReport::new(suite, reports))
}

fn require_dims(cfg: &VerifyConfig, min: usize) -> Result<Vec<usize>> {
    if let Some(&bad) = cfg.dims.iter().find(|&&n| n < min) {
        return Err(Error::InvalidDimension {
            n: bad,
            reason: "verification suites need n >= 4",
        });
    }
    Ok(cfg.dims.clone())
}

fn sample_grid(dims: &[usize], count: usize) -> Vec<(usize, u64)> {
    dims.iter()
        .flat_map(|&n| (0..count as u64).map(move |i| (n, i)))
        .collect()
}

fn identity_checks(n: usize, index: u64, cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let mut rng = stream_rng(cfg.seed, 0x1d, ((n as u64) << 32) | index);
    let nf = n as f64;
    let scal = nf * (nf - 1.0) * rng.random_range(-1.0..1.0);
    let r = random_einstein(n, scal, rng.random())?;
    let (spec, profile) = eigen_profile(&r)?;
    let w2 = profile.weyl_norm;
    let c = sum_norm_ratio(n) * (1.0 + cfg.perturb);
    let scal_rep = scal_consistency(&r, &spec)?;
    let scal_scale = scal_rep.scal.abs().max(1.0);
    Ok(vec![
        check("sum_sjw", rel_slack(profile.sum(), c * w2, 1e-9)),
        check("max_sjw", max_norm_ratio(n) * w2 + 1e-9 - profile.max()),
        check(
            "weyl_norm_spectrum",
            rel_slack(weyl_norm_from_spectrum(&spec), w2, 1e-8),
        ),
        check("scal", (1e-8 * scal_scale - scal_rep.residual) / scal_scale),
    ])
}

fn identities(cfg: &VerifyConfig) -> Result<Vec<SampleReport>> {
    let dims = require_dims(cfg, 4)?;
    Ok(sample_grid(&dims, cfg.count)
        .into_par_iter()
        .map(|(n, i)| {
            SampleReport::from_checks(format!("n={n} sample={i}"), identity_checks(n, i, cfg))
        })
        .collect())
}

const CONE_ALPHAS: [f64; 6] = [1.0, 1.5, 2.0, 2.7, 3.0, std::f64::consts::PI];
const CONE_THETAS: [f64; 4] = [0.0, 0.2, 0.5, 1.0];

fn cone_point_checks(
    big_n: usize,
    params: &ConeParams,
    cfg: &VerifyConfig,
    tag: u64,
) -> Result<Vec<SampleReport>> {
    let a = lambda1_bound(big_n, params)?;
    let next_alpha = (params.alpha() + 0.5).min(0.5 * (params.alpha() + big_n as f64));
    let wider_alpha = ConeParams::new(next_alpha, params.theta())?;
    let wider_theta = ConeParams::new(params.alpha(), params.theta() + 0.3)?;
    let ext = extremal_spectrum(big_n, params, 1.0)?;
    let mut reports = vec![SampleReport::from_checks(
        format!(
            "N={big_n} alpha={} theta={} extremal",
            params.alpha(),
            params.theta()
        ),
        (|| {
            let slack = in_cone(&ext, params)?.slack;
            Ok(vec![
                check("extremal_tight", 1e-10 - slack.abs()),
                check("extremal_lambda1", 1e-12 - (ext.values()[0] + a).abs()),
            ])
        })(),
    )];
    let samples = sample_cone(big_n, params, cfg.count, cfg.seed ^ tag)?;
    reports.extend(samples.iter().enumerate().map(|(i, s)| {
        SampleReport::from_checks(
            format!(
                "N={big_n} alpha={} theta={} sample={i}",
                params.alpha(),
                params.theta()
            ),
            (|| {
                let m = s.mean();
                Ok(vec![
                    check("membership", in_cone(s, params)?.slack),
                    check("mean_nonnegative", m + MEMBERSHIP_TOL),
                    check("lambda1_bound", s.values()[0] + a * m + 1e-10),
                    check(
                        "monotone_alpha",
                        in_cone(s, &wider_alpha)?.slack + MEMBERSHIP_TOL,
                    ),
                    check(
                        "monotone_theta",
                        in_cone(s, &wider_theta)?.slack + MEMBERSHIP_TOL,
                    ),
                ])
            })(),
        )
    }));
    Ok(reports)
}

fn cone(cfg: &VerifyConfig) -> Result<Vec<SampleReport>> {
    let dims = require_dims(cfg, 4)?;
    let mut points = Vec::new();
    for &n in &dims {
        let big_n = traceless_dim(n);
        for &alpha in CONE_ALPHAS.iter().filter(|&&a| a < big_n as f64) {
            for &theta in &CONE_THETAS {
                points.push((big_n, ConeParams::new(alpha, theta)?));
            }
        }
    }
    let nested = points
        .par_iter()
        .enumerate()
        .map(|(tag, (big_n, p))| cone_point_checks(*big_n, p, cfg, tag as u64))
        .collect::<Result<Vec<_>>>()?;
    Ok(nested.into_iter().flatten().collect())
}

/// `k` evenly spaced points from `lo` to `hi`.
pub fn linspace(lo: f64, hi: f64, k: usize) -> Vec<f64> {
    match k {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..k)
            .map(|i| lo + (hi - lo) * i as f64 / (k - 1) as f64)
            .collect(),
    }
}

/// The α-range on which the Bochner inequalities are sampled.
pub fn bochner_alpha_range(n: usize) -> Result<(f64, f64)> {
    let hi = alpha_max(n)?;
    let hi = if n >= 6 {
        hi.min(HighAlphaBounds::of(n).quadratic)
    } else {
        hi
    };
    Ok((1.0, hi))
}

fn bochner_checks(n: usize, alpha: f64, seed: u64) -> Result<Vec<Check>> {
    let params = ConeParams::new(alpha, theta_auto(n, alpha)?)?;
    let r = random_einstein_in_cone(n, &params, seed)?;
    let rep = bochner_report(&r, &params)?;
    let (spec, profile) = eigen_profile(&r)?;
    let mut checks = vec![
        check("in_cone", in_cone(&spec, &params)?.slack + MEMBERSHIP_TOL),
        check("nonnegativity", 3.0 * rep.delta_rr / rep.scale + 1e-8),
    ];
    if let (Some(f), Some(rhs)) = (rep.f_bound, rep.lemma31_rhs) {
        checks.push(check(
            "main_inequality",
            (3.0 * rep.delta_rr - f) / rep.scale + 1e-8,
        ));
        checks.push(check("lemma31", (rep.lemma31_lhs - rhs) / rep.scale + 1e-8));
        checks.push(check(
            "sum_minus_alpha_max",
            profile.sum() - alpha * profile.max() + 1e-9 * profile.weyl_norm.max(1.0),
        ));
    }
    let sub = substitution_check(&spec, &params, n)?;
    checks.push(check("substitution", 1e-9 - sub.rel_residual));
    Ok(checks)
}

fn bochner(cfg: &VerifyConfig) -> Result<Vec<SampleReport>> {
    let dims = require_dims(cfg, 4)?;
    let mut reports: Vec<SampleReport> = dims
        .par_iter()
        .map(|&n| {
            SampleReport::from_checks(
                format!("n={n} constant curvature"),
                (|| {
                    let r = constant_curvature(n, 1.0)?;
                    let (spec, profile) = eigen_profile(&r)?;
                    let d = delta_r_inner(&spec, Some(&profile), n)?;
                    Ok(vec![check(
                        "constant_zero",
                        1e-8 - d.abs() / tolerance_scale(&spec),
                    )])
                })(),
            )
        })
        .collect();
    let jobs = sample_grid(&dims, cfg.count);
    reports.extend(
        jobs.into_par_iter()
            .map(|(n, i)| {
                let label = format!("n={n} sample={i}");
                let checks = bochner_alpha_range(n).and_then(|(lo, hi)| {
                    let mut rng = stream_rng(cfg.seed, 0xb0, ((n as u64) << 32) | i);
                    let alphas = linspace(lo, hi, 5);
                    let alpha = alphas[i as usize % alphas.len()];
                    bochner_checks(n, alpha, rng.random())
                });
                SampleReport::from_checks(label, checks)
            })
            .collect::<Vec<_>>(),
    );
    Ok(reports)
}

pub const LP_SIZES: [usize; 5] = [9, 14, 20, 27, 35];

fn lp_checks(big_n: usize, params: &ConeParams) -> Result<Vec<Check>> {
    let lp = lp_min_lambda1(big_n, params)?;
    let a = lambda1_bound(big_n, params)?;
    let ext = extremal_spectrum(big_n, params, 1.0)?;
    let dist = lp
        .argmin
        .values()
        .iter()
        .zip(ext.values())
        .fold(0.0_f64, |d, (x, y)| d.max((x - y).abs()));
    Ok(vec![
        check("lp_vs_closed_form", 1e-9 - (lp.min_lambda1 + a).abs()),
        check("lp_argmin_extremal", 1e-9 - dist),
        check("extremal_tight", 1e-10 - in_cone(&ext, params)?.slack.abs()),
    ])
}

fn min_f_checks(n: usize, alpha: f64, cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let big_n = traceless_dim(n);
    let params = ConeParams::new(alpha, theta_auto(n, alpha)?)?;
    let a = lambda1_bound(big_n, &params)?;
    let res = minimize_f(big_n, a, cfg.restarts, cfg.seed)?;
    let worst_minimizer = f_minimizers(big_n, a)
        .iter()
        .map(|x| f_simplex(x, a, big_n).abs())
        .fold(0.0_f64, f64::max);
    Ok(vec![
        check("f_nonnegative", res.min_value + 1e-8),
        check("minimizers_zero", 1e-9 - worst_minimizer),
        check(
            "gradient_vs_enumeration",
            1e-8 - (res.gradient_min - res.enumeration_min).abs(),
        ),
        check(
            "restarts_converged",
            if res.restarts_converged == res.restarts {
                0.0
            } else {
                -1.0
            },
        ),
    ])
}

fn oracles(cfg: &VerifyConfig) -> Result<Vec<SampleReport>> {
    let (sizes, alphas, thetas, dims): (Vec<usize>, Vec<f64>, Vec<f64>, Vec<usize>) = match cfg.grid
    {
        Grid::Default => (
            LP_SIZES.to_vec(),
            CONE_ALPHAS.to_vec(),
            CONE_THETAS.to_vec(),
            (4..=12).collect(),
        ),
        Grid::Quick => (vec![9, 20], vec![1.0, 2.0], vec![0.0, 0.5], vec![4, 6]),
    };
    let mut lp_points = Vec::new();
    for &big_n in &sizes {
        for &alpha in alphas.iter().filter(|&&a| a < big_n as f64) {
            for &theta in &thetas {
                lp_points.push((big_n, alpha, theta));
            }
        }
    }
    let mut reports: Vec<SampleReport> = lp_points
        .par_iter()
        .map(|&(big_n, alpha, theta)| {
            SampleReport::from_checks(
                format!("lp N={big_n} alpha={alpha} theta={theta}"),
                ConeParams::new(alpha, theta).and_then(|p| lp_checks(big_n, &p)),
            )
        })
        .collect();
    let mut f_points = Vec::new();
    for &n in &dims {
        let (lo, hi) = (1.0, alpha_max(n)?);
        f_points.extend(linspace(lo, hi, 5).into_iter().map(|a| (n, a)));
    }
    reports.extend(
        f_points
            .par_iter()
            .map(|&(n, alpha)| {
                SampleReport::from_checks(
                    format!("minimize_f n={n} alpha={alpha}"),
                    min_f_checks(n, alpha, cfg),
                )
            })
            .collect::<Vec<_>>(),
    );
    Ok(reports)
}
