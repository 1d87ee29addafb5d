//! Cone conditions `C(α, θ)` on second-kind spectra and the rigidity
//! thresholds attached to them.
//!
//! A spectrum lies in `C(α, θ)` when the weighted mean of its bottom `α`
//! eigenvalues,
//! `α⁻¹(λ₁ + … + λ_[α] + (α − [α])·λ_[α]+1)`, is at least `−θ·λ̄`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::second_kind::Spectrum;
use crate::tensor_algebra::traceless_dim;

/// Absolute slack allowed by [`in_cone`].
pub const MEMBERSHIP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConeParams {
    alpha: f64,
    theta: f64,
}

impl ConeParams {
    /// Requires `α ≥ 1` and `θ > −1`; the upper bound `α < N` is checked
    /// wherever `N` is known.
    pub fn new(alpha: f64, theta: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha < 1.0 {
            return Err(Error::OutOfRange {
                name: "alpha",
                value: alpha,
                range: "[1, N)".into(),
            });
        }
        if !theta.is_finite() || theta <= -1.0 {
            return Err(Error::OutOfRange {
                name: "theta",
                value: theta,
                range: "(-1, inf)".into(),
            });
        }
        Ok(Self { alpha, theta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// `[α]`.
    pub fn alpha_floor(&self) -> usize {
        self.alpha.floor() as usize
    }

    pub fn check_against(&self, big_n: usize) -> Result<()> {
        check_alpha(self.alpha, big_n)
    }
}

fn check_alpha(alpha: f64, big_n: usize) -> Result<()> {
    if !(alpha >= 1.0 && alpha < big_n as f64) {
        return Err(Error::OutOfRange {
            name: "alpha",
            value: alpha,
            range: format!("[1, {big_n})"),
        });
    }
    Ok(())
}

/// `α⁻¹(Σ_{i≤[α]} λᵢ + (α − [α])·λ_{[α]+1})`.
///
/// For integral `α` the fractional term is dropped and `λ_{[α]+1}` is never
/// read.
pub fn cone_value(spec: &Spectrum, alpha: f64) -> Result<f64> {
    check_alpha(alpha, spec.len())?;
    let whole = alpha.floor() as usize;
    let frac = alpha - whole as f64;
    let vals = spec.values();
    let mut total: f64 = vals[..whole].iter().sum();
    if frac > 0.0 {
        total += frac * vals[whole];
    }
    Ok(total / alpha)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConeCheck {
    pub member: bool,
    /// `cone_value + θ·λ̄`; non-negative for members up to tolerance.
    pub slack: f64,
    pub cone_value: f64,
}

pub fn in_cone(spec: &Spectrum, params: &ConeParams) -> Result<ConeCheck> {
    let value = cone_value(spec, params.alpha)?;
    let slack = value + params.theta * spec.mean();
    Ok(ConeCheck {
        member: slack >= -MEMBERSHIP_TOL,
        slack,
        cone_value: value,
    })
}

/// Which dimension regime the thresholds come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    /// `n ≥ 6`.
    High,
    /// `n ∈ {4, 5}`.
    Low,
}

impl Regime {
    pub fn of(n: usize) -> Result<Regime> {
        match n {
            4 | 5 => Ok(Regime::Low),
            n if n >= 6 => Ok(Regime::High),
            _ => Err(Error::InvalidDimension {
                n,
                reason: "rigidity thresholds are defined for n >= 4",
            }),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::High => "high",
            Regime::Low => "low",
        }
    }
}

/// `θ(n,α) = 3(N−n+1)(N−α) / (3nα(N−2) + (N−3)(N−α)) − 1` without range
/// checks.
pub fn theta_formula(n: usize, alpha: f64) -> f64 {
    let nf = n as f64;
    let big_n = traceless_dim(n) as f64;
    3.0 * (big_n - nf + 1.0) * (big_n - alpha)
        / (3.0 * nf * alpha * (big_n - 2.0) + (big_n - 3.0) * (big_n - alpha))
        - 1.0
}

/// `(n−1)((n+2)(n+5) − (3n+8)α) / (3α(n+3)(n−2))` without range checks.
pub fn theta_lowdim_formula(n: usize, alpha: f64) -> f64 {
    let nf = n as f64;
    (nf - 1.0) * ((nf + 2.0) * (nf + 5.0) - (3.0 * nf + 8.0) * alpha)
        / (3.0 * alpha * (nf + 3.0) * (nf - 2.0))
}

/// The two candidate upper bounds for `α` when `n ≥ 6`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HighAlphaBounds {
    /// `(n⁴ − n³ + 8n − 8) / (3n³ + 5n² − 22n + 8)`; `θ(n,α)` vanishes here.
    pub quartic: f64,
    /// `(n² + n − 8) / (4n − 8)`, the range of the Weyl estimate.
    pub quadratic: f64,
}

impl HighAlphaBounds {
    pub fn of(n: usize) -> Self {
        let nf = n as f64;
        let quartic = (nf.powi(4) - nf.powi(3) + 8.0 * nf - 8.0)
            / (3.0 * nf.powi(3) + 5.0 * nf * nf - 22.0 * nf + 8.0);
        let quadratic = (nf * nf + nf - 8.0) / (4.0 * nf - 8.0);
        Self { quartic, quadratic }
    }

    pub fn min(&self) -> f64 {
        self.quartic.min(self.quadratic)
    }

    pub fn quadratic_is_min(&self) -> bool {
        self.quadratic < self.quartic
    }
}

/// Largest admissible `α` for the rigidity thresholds in dimension `n`.
pub fn alpha_max(n: usize) -> Result<f64> {
    match Regime::of(n)? {
        Regime::Low => Ok(((n + 2) * (n + 5)) as f64 / (3 * n + 8) as f64),
        Regime::High => Ok(HighAlphaBounds::of(n).min()),
    }
}

fn check_admissible(n: usize, alpha: f64) -> Result<()> {
    let max = alpha_max(n)?;
    if !(alpha >= 1.0 && alpha <= max) {
        return Err(Error::OutOfRange {
            name: "alpha",
            value: alpha,
            range: format!("[1, {max}] for n = {n}"),
        });
    }
    Ok(())
}

/// `θ(n, α)` for `n ≥ 6` and `1 ≤ α ≤ alpha_max(n)`.
pub fn theta_threshold(n: usize, alpha: f64) -> Result<f64> {
    if n < 6 {
        return Err(Error::InvalidDimension {
            n,
            reason: "theta(n, alpha) is defined for n >= 6",
        });
    }
    check_admissible(n, alpha)?;
    Ok(theta_formula(n, alpha))
}

/// The low-dimensional threshold for `n ∈ {4, 5}`.
pub fn theta_lowdim(n: usize, alpha: f64) -> Result<f64> {
    if n != 4 && n != 5 {
        return Err(Error::InvalidDimension {
            n,
            reason: "the low-dimensional threshold is defined for n = 4, 5",
        });
    }
    check_admissible(n, alpha)?;
    Ok(theta_lowdim_formula(n, alpha))
}

/// Resolves `θ = auto`: the threshold of whichever regime `n` falls in.
pub fn theta_auto(n: usize, alpha: f64) -> Result<f64> {
    match Regime::of(n)? {
        Regime::High => theta_threshold(n, alpha),
        Regime::Low => theta_lowdim(n, alpha),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub n: usize,
    #[serde(rename = "N")]
    pub big_n: usize,
    pub alpha: f64,
    pub theta: f64,
    pub alpha_max: f64,
    pub regime: Regime,
}

impl ThresholdReport {
    pub fn theta_high(&self) -> Option<f64> {
        (self.regime == Regime::High).then_some(self.theta)
    }

    pub fn theta_low(&self) -> Option<f64> {
        (self.regime == Regime::Low).then_some(self.theta)
    }
}

pub fn threshold_report(n: usize, alpha: f64) -> Result<ThresholdReport> {
    Ok(ThresholdReport {
        n,
        big_n: traceless_dim(n),
        alpha,
        theta: theta_auto(n, alpha)?,
        alpha_max: alpha_max(n)?,
        regime: Regime::of(n)?,
    })
}

/// The α-interval `(lower, upper]` on which the rigidity statements are new
/// compared with integral-α results, per dimension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorollaryRange {
    pub n: usize,
    pub lower: f64,
    pub upper: f64,
    /// True when `upper` is `(n² + n − 8)/(4n − 8)` rather than the quartic
    /// ratio (only for `n ≥ 17`).
    pub quadratic_upper: bool,
}

pub fn corollary_range(n: usize) -> Result<CorollaryRange> {
    let (lower, upper, quadratic_upper) = match n {
        4 => (2.0, 27.0 / 10.0, false),
        5 => (3.0, 70.0 / 23.0, false),
        _ if n >= 6 => {
            let b = HighAlphaBounds::of(n);
            let lower = match n {
                6 | 7 => 1.0,
                8..=10 => 2.0,
                _ => ((n + 2) / 4) as f64,
            };
            if n >= 17 {
                (lower, b.quadratic, true)
            } else {
                (lower, b.quartic, false)
            }
        }
        _ => {
            return Err(Error::InvalidDimension {
                n,
                reason: "rigidity ranges are defined for n >= 4",
            })
        }
    };
    Ok(CorollaryRange {
        n,
        lower,
        upper,
        quadratic_upper,
    })
}

/// `A = ((α−1)N + α(N−1)θ)/(N−α)`; every in-cone spectrum has
/// `λ₁ ≥ −A·λ̄`.
pub fn lambda1_bound(big_n: usize, params: &ConeParams) -> Result<f64> {
    params.check_against(big_n)?;
    let nf = big_n as f64;
    let (a, t) = (params.alpha, params.theta);
    Ok(((a - 1.0) * nf + a * (nf - 1.0) * t) / (nf - a))
}

/// `(−A, (N+αθ)/(N−α), …, (N+αθ)/(N−α))·mean`, the spectrum attaining the
/// `λ₁` bound.
pub fn extremal_spectrum(big_n: usize, params: &ConeParams, mean: f64) -> Result<Spectrum> {
    if !(mean >= 0.0) {
        return Err(Error::Domain(format!(
            "extremal spectrum needs mean >= 0, got {mean}"
        )));
    }
    let a = lambda1_bound(big_n, params)?;
    let nf = big_n as f64;
    let rest = (nf + params.alpha * params.theta) / (nf - params.alpha);
    let mut values = vec![rest * mean; big_n];
    values[0] = -a * mean;
    Spectrum::new(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ramp(len: usize) -> Spectrum {
        Spectrum::new((0..len).map(|i| i as f64 - 1.0).collect()).unwrap()
    }

    #[test]
    fn cone_value_examples() {
        let ones = Spectrum::constant(9, 1.0).unwrap();
        for alpha in [1.0, 1.5, 2.0, 8.9] {
            assert!((cone_value(&ones, alpha).unwrap() - 1.0).abs() < 1e-15);
        }
        assert_eq!(cone_value(&ramp(9), 2.0).unwrap(), -0.5);
        assert!((cone_value(&ramp(9), 2.5).unwrap() + 0.2).abs() < 1e-15);
        assert!(cone_value(&ramp(9), 0.5).is_err());
        assert!(cone_value(&ramp(9), 9.0).is_err());
        // Largest integral alpha reads only the first N-1 entries.
        assert_eq!(cone_value(&ramp(3), 2.0).unwrap(), -0.5);
    }

    #[test]
    fn in_cone_examples() {
        let ones = Spectrum::constant(14, 1.0).unwrap();
        let p = ConeParams::new(2.3, -0.5).unwrap();
        assert!(in_cone(&ones, &p).unwrap().member);

        let mut v = vec![1.0; 9];
        v[0] = -1.0;
        let s = Spectrum::new(v).unwrap();
        assert!(
            !in_cone(&s, &ConeParams::new(1.0, 0.0).unwrap())
                .unwrap()
                .member
        );

        let p = ConeParams::new(1.0, 0.5).unwrap();
        let e = extremal_spectrum(9, &p, 1.0).unwrap();
        let c = in_cone(&e, &p).unwrap();
        assert!(c.member && c.slack.abs() <= 1e-10);
    }

    #[test]
    fn params_validation() {
        assert!(ConeParams::new(0.5, 0.0).is_err());
        assert!(ConeParams::new(1.0, -1.0).is_err());
        assert!(ConeParams::new(f64::NAN, 0.0).is_err());
        assert!(ConeParams::new(1.0, -0.99).is_ok());
    }

    #[test]
    fn theta_examples() {
        assert!((theta_threshold(6, 1.0).unwrap() - 208.0 / 647.0).abs() < 1e-15);
        assert!((theta_formula(6, 20.0) + 1.0).abs() < 1e-15);
        assert!(theta_threshold(6, 20.0).is_err());
        assert!((theta_formula(7, 2.0) + 1.0 / 22.0).abs() < 1e-15);
        // alpha = 2 exceeds alpha_max(7) ~ 1.867, so the checked form refuses it.
        assert!(matches!(
            theta_threshold(7, 2.0),
            Err(Error::OutOfRange { .. })
        ));
        assert!(theta_threshold(5, 1.0).is_err());
    }

    #[test]
    fn lowdim_examples() {
        assert!((theta_lowdim(4, 2.0).unwrap() - 0.5).abs() < 1e-15);
        assert!(theta_lowdim(4, 2.7).unwrap().abs() < 1e-15);
        assert!(theta_lowdim(5, 70.0 / 23.0).unwrap().abs() < 1e-15);
        assert!(theta_lowdim(6, 1.0).is_err());
        assert!(theta_lowdim(4, 2.71).is_err());
    }

    #[test]
    fn alpha_max_examples() {
        assert_eq!(alpha_max(4).unwrap(), 2.7);
        assert_eq!(alpha_max(5).unwrap(), 70.0 / 23.0);
        assert!((alpha_max(6).unwrap() - 35.0 / 22.0).abs() < 1e-15);
        let b = HighAlphaBounds::of(6);
        assert!((b.quartic - 1120.0 / 704.0).abs() < 1e-15);
        assert!((b.quadratic - 34.0 / 16.0).abs() < 1e-15);
        let b17 = HighAlphaBounds::of(17);
        assert!(b17.quadratic_is_min());
        assert_eq!(alpha_max(17).unwrap(), b17.quadratic);
        assert!(alpha_max(3).is_err());
    }

    #[test]
    fn theta_vanishes_at_quartic_bound() {
        for n in 6..=16 {
            let b = HighAlphaBounds::of(n);
            assert!(theta_formula(n, b.quartic).abs() < 1e-12, "n = {n}");
        }
    }

    #[test]
    fn lambda1_bound_examples() {
        let p = ConeParams::new(1.0, 0.37).unwrap();
        assert!((lambda1_bound(20, &p).unwrap() - 0.37).abs() < 1e-15);
        let p = ConeParams::new(1.0, 0.5).unwrap();
        assert!((lambda1_bound(9, &p).unwrap() - 0.5).abs() < 1e-15);
        let p = ConeParams::new(2.0, 0.0).unwrap();
        assert!((lambda1_bound(20, &p).unwrap() - 10.0 / 9.0).abs() < 1e-15);
        assert!(lambda1_bound(2, &p).is_err());
    }

    #[test]
    fn extremal_examples() {
        let p = ConeParams::new(1.0, 0.5).unwrap();
        let e = extremal_spectrum(9, &p, 1.0).unwrap();
        assert_eq!(e.values()[0], -0.5);
        assert!(e.values()[1..].iter().all(|&v| (v - 1.1875).abs() < 1e-15));
        assert!((e.values().iter().sum::<f64>() - 9.0).abs() < 1e-12);
        let z = extremal_spectrum(9, &p, 0.0).unwrap();
        assert!(z.values().iter().all(|&v| v == 0.0));
        assert!(extremal_spectrum(9, &p, -1.0).is_err());
    }

    #[test]
    fn corollary_ranges() {
        let r4 = corollary_range(4).unwrap();
        assert_eq!((r4.lower, r4.upper), (2.0, 2.7));
        assert_eq!(corollary_range(11).unwrap().lower, 3.0);
        assert!(corollary_range(17).unwrap().quadratic_upper);
        assert!(!corollary_range(16).unwrap().quadratic_upper);
        for n in 6..=30 {
            let r = corollary_range(n).unwrap();
            assert_eq!(r.upper, alpha_max(n).unwrap(), "n = {n}");
        }
    }

    fn sorted_vec() -> impl Strategy<Value = Spectrum> {
        prop::collection::vec(-3.0f64..3.0, 9..30).prop_map(|v| Spectrum::new(v).unwrap())
    }

    proptest! {
        #[test]
        fn cone_value_monotone_in_alpha(s in sorted_vec(), a in 1.0f64..8.0, da in 0.0f64..1.0) {
            let lo = cone_value(&s, a).unwrap();
            let hi = cone_value(&s, a + da).unwrap();
            prop_assert!(hi >= lo - 1e-12);
        }

        #[test]
        fn membership_monotone_in_theta(s in sorted_vec(), a in 1.0f64..8.0, t in -0.9f64..2.0, dt in 0.0f64..1.0) {
            let p = ConeParams::new(a, t).unwrap();
            let q = ConeParams::new(a, t + dt).unwrap();
            if in_cone(&s, &p).unwrap().member && s.mean() >= 0.0 {
                prop_assert!(in_cone(&s, &q).unwrap().member);
            }
        }

        #[test]
        fn members_have_nonnegative_mean(s in sorted_vec(), a in 1.0f64..8.0, t in -0.9f64..2.0) {
            let p = ConeParams::new(a, t).unwrap();
            if in_cone(&s, &p).unwrap().member {
                prop_assert!(s.mean() >= -MEMBERSHIP_TOL / (1.0 + t));
            }
        }

        #[test]
        fn lowdim_matches_corollary_forms(a in 1.0f64..2.7) {
            let t4 = theta_lowdim_formula(4, a);
            prop_assert!((t4 * 7.0 * a + 10.0 * a - 27.0).abs() < 1e-12);
            let t5 = theta_lowdim_formula(5, a);
            prop_assert!((t5 * 18.0 * a + 23.0 * a - 70.0).abs() < 1e-12);
        }
    }
}
