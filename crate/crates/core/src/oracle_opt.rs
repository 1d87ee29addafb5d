//! Brute-force oracles, independent of the closed forms they check.
//!
//! * [`lp_min_lambda1`] minimizes `λ₁` over sorted, mean-one spectra in the
//!   cone by enumerating the vertices of the feasible polyhedron.
//! * [`minimize_f`] minimizes the simplex cubic `F` by enumerating
//!   two-level stationary patterns and, separately, by projected gradient
//!   descent from random starts.
//! * [`sample_cone`] draws random in-cone spectra for the invariant suites.

use rand::Rng;
use rand_distr::{Exp1, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::bochner::{f_simplex, f_simplex_grad};
use crate::cone_analysis::{cone_value, in_cone, ConeParams};
use crate::error::{Error, Result};
use crate::rng::stream_rng;
use crate::second_kind::Spectrum;

#[derive(Debug, Clone, Serialize)]
pub struct LpResult {
    pub min_lambda1: f64,
    pub argmin: Spectrum,
    pub active_constraints: Vec<String>,
    pub vertices_examined: usize,
}

/// Per-index weights of the cone functional `α·cone_value(λ)` on sorted `λ`.
fn cone_weights(big_n: usize, alpha: f64) -> Vec<f64> {
    let whole = alpha.floor() as usize;
    let frac = alpha - whole as f64;
    (0..big_n)
        .map(|i| match i {
            i if i < whole => 1.0,
            i if i == whole => frac,
            _ => 0.0,
        })
        .collect()
}

/// Exact minimum of `λ₁` subject to `λ₁ ≤ … ≤ λ_N`, `Σλ = N` and
/// `cone_value(λ, α) ≥ −θ`.
///
/// A vertex needs `N` independent active constraints. With the sum and cone
/// constraints active that leaves `N−2` active order constraints, i.e. at
/// most two distinct levels; without the cone constraint the vertex is the
/// constant spectrum. The polyhedron has no lines, so the minimum is
/// attained at one of these.
pub fn lp_min_lambda1(big_n: usize, params: &ConeParams) -> Result<LpResult> {
    params.check_against(big_n)?;
    let nf = big_n as f64;
    let rhs = -params.alpha() * params.theta();
    let weights = cone_weights(big_n, params.alpha());

    // (a, b, k): first k entries at a, the rest at b.
    let mut best: (f64, f64, usize) = (1.0, 1.0, big_n);
    let mut examined = 1;
    let mut w_low = 0.0;
    for k in 1..big_n {
        w_low += weights[k - 1];
        let w_high = params.alpha() - w_low;
        let (kf, rest) = (k as f64, (big_n - k) as f64);
        let det = kf * w_high - rest * w_low;
        examined += 1;
        if det.abs() < 1e-14 * nf {
            continue;
        }
        let a = (nf * w_high - rest * rhs) / det;
        let b = (kf * rhs - w_low * nf) / det;
        // Ties resolve to the fewest entries at the lower level.
        if a <= b + 1e-12 && a < best.0 - 1e-12 * best.0.abs().max(1.0) {
            best = (a, b, k);
        }
    }

    let (a, b, k) = best;
    let mut values = vec![b; big_n];
    values[..k].fill(a);
    let argmin = Spectrum::new(values)?;
    let check = in_cone(&argmin, params)?;
    if check.slack < -1e-10 {
        return Err(Error::Domain(format!(
            "LP optimum violates the cone (slack {:e})",
            check.slack
        )));
    }
    let mut active = vec!["sum".to_string()];
    if check.slack.abs() <= 1e-10 {
        active.push("cone".into());
    }
    active.extend(
        (1..big_n)
            .filter(|&i| i != k)
            .map(|i| format!("order({},{})", i, i + 1)),
    );
    Ok(LpResult {
        min_lambda1: a,
        argmin,
        active_constraints: active,
        vertices_examined: examined,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Pattern {
    pub zeros: usize,
    /// Distinct positive levels, ascending.
    pub levels: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MinFResult {
    pub min_value: f64,
    pub argmin: Vec<f64>,
    pub pattern: Pattern,
    pub enumeration_min: f64,
    pub gradient_min: f64,
    pub restarts: usize,
    pub restarts_converged: usize,
}

/// `F` for a point with `p` coordinates at `u`, `q` at `v`, zeros elsewhere.
fn f_two_level(p: usize, u: f64, q: usize, v: f64, a: f64, big_n: usize) -> f64 {
    let nf = big_n as f64;
    let s = 1.0 + a;
    let (pf, qf) = (p as f64, q as f64);
    let cubes = pf * u.powi(3) + qf * v.powi(3);
    let squares = pf * u * u + qf * v * v;
    cubes - (3.0 - (nf - 2.0) / (nf - 1.0)) * s * squares + s.powi(3) * nf * nf / (nf - 1.0)
}

struct TwoLevel {
    value: f64,
    zeros: usize,
    p: usize,
    u: f64,
    v: f64,
}

impl TwoLevel {
    fn point(&self, big_n: usize) -> Vec<f64> {
        let mut x = vec![0.0; self.zeros];
        x.extend(std::iter::repeat_n(self.u, self.p));
        x.extend(std::iter::repeat_n(self.v, big_n - self.zeros - self.p));
        x.sort_by(f64::total_cmp);
        x
    }
}

/// Global minimum over points with `k` zeros and at most two positive
/// levels. Any interior KKT point has this form, since `∂F/∂xᵢ` is a
/// quadratic in `xᵢ` alone.
fn enumerate_two_level(big_n: usize, a: f64) -> TwoLevel {
    let total = big_n as f64 * (1.0 + a);
    let c = (3.0 - (big_n as f64 - 2.0) / (big_n as f64 - 1.0)) * (1.0 + a);
    let mut best = TwoLevel {
        value: f64::INFINITY,
        zeros: 0,
        p: big_n,
        u: 1.0 + a,
        v: 1.0 + a,
    };
    for zeros in 0..big_n {
        let m = big_n - zeros;
        for p in 1..=m {
            let q = m - p;
            let hi = total / p as f64;
            let mut candidates = vec![total / m as f64];
            if q > 0 {
                candidates.extend([0.0, hi]);
                // Interior stationary point of the 1-D restriction: u + v = 2c/3.
                if m != 2 * p {
                    let u = (2.0 * c * q as f64 / 3.0 - total) / (q as f64 - p as f64);
                    if (0.0..=hi).contains(&u) {
                        candidates.push(u);
                    }
                }
            }
            for u in candidates {
                let v = if q > 0 {
                    ((total - p as f64 * u) / q as f64).max(0.0)
                } else {
                    0.0
                };
                let value = f_two_level(p, u, q, v, a, big_n);
                if value < best.value {
                    best = TwoLevel {
                        value,
                        zeros,
                        p,
                        u,
                        v,
                    };
                }
            }
        }
    }
    best
}

/// Euclidean projection onto `{x ≥ 0, Σx = total}` by sort-and-threshold.
pub fn project_to_simplex(y: &[f64], total: f64) -> Vec<f64> {
    let mut sorted = y.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut tau = 0.0;
    for (j, &u) in sorted.iter().enumerate() {
        cumsum += u;
        let t = (cumsum - total) / (j + 1) as f64;
        if u - t > 0.0 {
            tau = t;
        }
    }
    y.iter().map(|&v| (v - tau).max(0.0)).collect()
}

/// Stopping threshold on `‖x − P(x − ∇F(x))‖`.
pub const GRADIENT_MAP_TOL: f64 = 1e-12;
const MAX_ITERATIONS: usize = 100_000;

fn gradient_map_norm(x: &[f64], grad: &[f64], total: f64) -> f64 {
    let y: Vec<f64> = x.iter().zip(grad).map(|(a, g)| a - g).collect();
    let p = project_to_simplex(&y, total);
    x.iter()
        .zip(&p)
        .map(|(a, b)| (a - b).powi(2))
        .sum::<f64>()
        .sqrt()
}

struct Descent {
    value: f64,
    x: Vec<f64>,
    converged: bool,
}

fn projected_gradient(mut x: Vec<f64>, a: f64, big_n: usize) -> Descent {
    let total = big_n as f64 * (1.0 + a);
    let tol = GRADIENT_MAP_TOL * total.max(1.0);
    let c = (3.0 - (big_n as f64 - 2.0) / (big_n as f64 - 1.0)) * (1.0 + a);
    // The Hessian is diagonal with entries 6xᵢ − 2c, so 1/L always descends.
    let min_step = 1.0 / (6.0 * total).max(2.0 * c);
    let mut fx = f_simplex(&x, a, big_n);
    let mut step = 1.0;
    for _ in 0..MAX_ITERATIONS {
        let grad = f_simplex_grad(&x, a, big_n);
        if gradient_map_norm(&x, &grad, total) <= tol {
            return Descent {
                value: fx,
                x,
                converged: true,
            };
        }
        // Backtracking on the quadratic upper model, floored at 1/L where
        // rounding in F would otherwise stall the test.
        loop {
            let trial: Vec<f64> = x.iter().zip(&grad).map(|(v, g)| v - step * g).collect();
            let y = project_to_simplex(&trial, total);
            let fy = f_simplex(&y, a, big_n);
            let (lin, dist) = x
                .iter()
                .zip(&y)
                .zip(&grad)
                .fold((0.0, 0.0), |(l, d), ((xi, yi), gi)| {
                    (l + gi * (yi - xi), d + (yi - xi).powi(2))
                });
            if step <= min_step || fy <= fx + lin + dist / (2.0 * step) {
                x = y;
                fx = fy;
                step = (step * 2.0).max(min_step);
                break;
            }
            step = (step * 0.5).max(min_step);
        }
    }
    let grad = f_simplex_grad(&x, a, big_n);
    let converged = gradient_map_norm(&x, &grad, total) <= tol;
    Descent {
        value: fx,
        x,
        converged,
    }
}

fn random_simplex_point(big_n: usize, total: f64, seed: u64, index: u64) -> Vec<f64> {
    let mut rng = stream_rng(seed, 0x51_4d, index);
    let e: Vec<f64> = (0..big_n).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let s: f64 = e.iter().sum();
    e.iter().map(|v| v / s * total).collect()
}

fn pattern_of(x: &[f64]) -> Pattern {
    let zeros = x.iter().filter(|v| v.abs() <= 1e-9).count();
    let mut levels: Vec<f64> = Vec::new();
    let mut sorted: Vec<f64> = x.iter().copied().filter(|v| v.abs() > 1e-9).collect();
    sorted.sort_by(f64::total_cmp);
    for v in sorted {
        match levels.last() {
            Some(&last) if (v - last).abs() <= 1e-6 * last.abs().max(1.0) => {}
            _ => levels.push(v),
        }
    }
    Pattern { zeros, levels }
}

/// Global minimum of `F` over `{x ≥ 0, Σx = N(1+A)}`.
pub fn minimize_f(big_n: usize, a: f64, restarts: usize, seed: u64) -> Result<MinFResult> {
    if !(a > -1.0) {
        return Err(Error::OutOfRange {
            name: "A",
            value: a,
            range: "(-1, inf)".into(),
        });
    }
    if restarts == 0 {
        return Err(Error::Precondition(
            "minimize_f needs at least one restart".into(),
        ));
    }
    if big_n < 2 {
        return Err(Error::Shape("minimize_f needs N >= 2".into()));
    }
    let total = big_n as f64 * (1.0 + a);
    let enumerated = enumerate_two_level(big_n, a);
    let runs: Vec<Descent> = (0..restarts as u64)
        .into_par_iter()
        .map(|i| projected_gradient(random_simplex_point(big_n, total, seed, i), a, big_n))
        .collect();
    let restarts_converged = runs.iter().filter(|d| d.converged).count();
    let best_run = runs
        .into_iter()
        .min_by(|p, q| p.value.total_cmp(&q.value))
        .expect("restarts >= 1");

    let (min_value, argmin) = if best_run.value < enumerated.value {
        (best_run.value, best_run.x.clone())
    } else {
        (enumerated.value, enumerated.point(big_n))
    };
    Ok(MinFResult {
        min_value,
        pattern: pattern_of(&argmin),
        argmin,
        enumeration_min: enumerated.value,
        gradient_min: best_run.value,
        restarts,
        restarts_converged,
    })
}

/// The two equality points of `F`: `(1+A)·𝟙` and
/// `(0, N(1+A)/(N−1), …, N(1+A)/(N−1))`.
pub fn f_minimizers(big_n: usize, a: f64) -> [Vec<f64>; 2] {
    let s = 1.0 + a;
    let nf = big_n as f64;
    let mut one_zero = vec![nf * s / (nf - 1.0); big_n];
    one_zero[0] = 0.0;
    [vec![s; big_n], one_zero]
}

/// Random sorted spectra with mean 1 in `C(α, θ)`.
///
/// Each sample takes a standard normal direction `z`, sorts and centers it,
/// and starts at `𝟙 + t·z` with `t` up to twice the boundary distance; `t` is
/// then shrunk geometrically until the spectrum is in the cone.
pub fn sample_cone(
    big_n: usize,
    params: &ConeParams,
    count: usize,
    seed: u64,
) -> Result<Vec<Spectrum>> {
    params.check_against(big_n)?;
    (0..count as u64)
        .map(|i| {
            let mut rng = stream_rng(seed, 0xc0_4e, i);
            let mut z: Vec<f64> = (0..big_n).map(|_| rng.sample(StandardNormal)).collect();
            z.sort_by(f64::total_cmp);
            let zm = z.iter().sum::<f64>() / big_n as f64;
            z.iter_mut().for_each(|v| *v -= zm);
            let direction = Spectrum::new(z.clone())?;
            let c = cone_value(&direction, params.alpha())?;
            let boundary = if c < 0.0 {
                (1.0 + params.theta()) / -c
            } else {
                1.0
            };
            let mut t = boundary * rng.random_range(0.05..2.0);
            for _ in 0..200 {
                let s = Spectrum::new(z.iter().map(|v| 1.0 + t * v).collect())?;
                if in_cone(&s, params)?.slack >= 0.0 {
                    return Ok(s);
                }
                t *= 0.9;
            }
            Spectrum::constant(big_n, 1.0)
        })
        .collect()
}
