//! The Bochner quantity `⟨ΔR, R⟩` of an Einstein curvature tensor expressed
//! through second-kind eigenvalues, its cubic lower bound `f(λ)`, and the
//! simplex polynomial `F(x)` that `f` reduces to.
//!
//! The displayed formulas are taken as definitions. For `n ≥ 6` the
//! quantity needs `Σⱼ λⱼ|SʲW|²`, with `Sʲ` the eigentensor of `λⱼ`; for
//! `n ∈ {4, 5}` it is a cubic in the eigenvalues alone.

use serde::Serialize;

use crate::cone_analysis::{
    extremal_spectrum, in_cone, lambda1_bound, theta_auto, theta_formula, ConeParams, Regime,
};
use crate::error::{Error, Result};
use crate::second_kind::Spectrum;
use crate::tensor_algebra::{traceless_dim, AlgCurvature};
use crate::weyl_action::{eigen_profile, SjwProfile};

/// `max(1, N·|λ̄|³)`; the cubic quantities here are compared relative to it.
pub fn tolerance_scale(spec: &Spectrum) -> f64 {
    (spec.len() as f64 * spec.mean().abs().powi(3)).max(1.0)
}

fn check_len(spec: &Spectrum, n: usize) -> Result<()> {
    if spec.len() != traceless_dim(n) {
        return Err(Error::Shape(format!(
            "spectrum has {} values, n = {n} needs {}",
            spec.len(),
            traceless_dim(n)
        )));
    }
    Ok(())
}

fn require_high(n: usize) -> Result<()> {
    if n < 6 {
        return Err(Error::InvalidDimension {
            n,
            reason: "this bound is stated for n >= 6",
        });
    }
    Ok(())
}

/// `(1/3)[Σλⱼ|SʲW|² − 16N(2N−9n+6)/(3n)·λ̄³ + 16(2N−12n+6)/(3n)·λ̄Σλⱼ² + 16Σλⱼ³]`.
///
/// Defined for every `n ≥ 4`; [`delta_r_inner`] uses it for `n ≥ 6`.
pub fn delta_r_inner_weyl(spec: &Spectrum, profile: &SjwProfile, n: usize) -> Result<f64> {
    if n < 4 {
        return Err(Error::InvalidDimension {
            n,
            reason: "the Bochner quantity is defined for n >= 4",
        });
    }
    check_len(spec, n)?;
    let nf = n as f64;
    let big_n = spec.len() as f64;
    let m = spec.mean();
    let weighted = profile.weighted_sum(spec)?;
    let three_dr = weighted
        - 16.0 * big_n * (2.0 * big_n - 9.0 * nf + 6.0) / (3.0 * nf) * m.powi(3)
        + 16.0 * (2.0 * big_n - 12.0 * nf + 6.0) / (3.0 * nf) * m * spec.sum_sq()
        + 16.0 * spec.sum_cubes();
    Ok(three_dr / 3.0)
}

/// `8Σλⱼ³ + (8(n−4)/3)·λ̄Σλⱼ² − (4(n+2)(n−1)²/3)·λ̄³` for `n ∈ {4, 5}`.
pub fn delta_r_inner_eigen(spec: &Spectrum, n: usize) -> Result<f64> {
    if n != 4 && n != 5 {
        return Err(Error::InvalidDimension {
            n,
            reason: "the eigenvalue-only formula is stated for n = 4, 5",
        });
    }
    check_len(spec, n)?;
    let nf = n as f64;
    let m = spec.mean();
    Ok(
        8.0 * spec.sum_cubes() + 8.0 * (nf - 4.0) / 3.0 * m * spec.sum_sq()
            - 4.0 * (nf + 2.0) * (nf - 1.0).powi(2) / 3.0 * m.powi(3),
    )
}

/// `⟨ΔR, R⟩` by dimension regime; the profile is required for `n ≥ 6` and
/// ignored otherwise.
pub fn delta_r_inner(spec: &Spectrum, profile: Option<&SjwProfile>, n: usize) -> Result<f64> {
    match Regime::of(n)? {
        Regime::Low => delta_r_inner_eigen(spec, n),
        Regime::High => {
            let profile = profile.ok_or_else(|| {
                Error::Precondition(format!("n = {n} needs the |S^j W|^2 profile"))
            })?;
            delta_r_inner_weyl(spec, profile, n)
        }
    }
}

/// `−16(N−3)/(3n)·θλ̄Σλⱼ² + 16N(N−3)/(3n)·θλ̄³`, the lower bound for
/// `Σλⱼ|SʲW|²` under the cone condition.
pub fn lemma31_bound(spec: &Spectrum, theta: f64, n: usize) -> Result<f64> {
    require_high(n)?;
    check_len(spec, n)?;
    let nf = n as f64;
    let big_n = spec.len() as f64;
    let m = spec.mean();
    let c = 16.0 * (big_n - 3.0) / (3.0 * nf) * theta * m;
    Ok(-c * spec.sum_sq() + c * big_n * m * m)
}

/// `f(λ) = 16N/(3n)·[(N−3)θ − (2N−9n+6)]λ̄³ + 16/(3n)·[(2N−12n+6) − (N−3)θ]λ̄Σλⱼ² + 16Σλⱼ³`.
pub fn f_lower_bound(spec: &Spectrum, theta: f64, n: usize) -> Result<f64> {
    require_high(n)?;
    check_len(spec, n)?;
    let nf = n as f64;
    let big_n = spec.len() as f64;
    let m = spec.mean();
    let cubic =
        16.0 * big_n / (3.0 * nf) * ((big_n - 3.0) * theta - (2.0 * big_n - 9.0 * nf + 6.0));
    let mixed = 16.0 / (3.0 * nf) * ((2.0 * big_n - 12.0 * nf + 6.0) - (big_n - 3.0) * theta);
    Ok(cubic * m.powi(3) + mixed * m * spec.sum_sq() + 16.0 * spec.sum_cubes())
}

/// `F(x) = Σxᵢ³ − (3 − (N−2)/(N−1))(1+A)Σxᵢ² + (1+A)³N²/(N−1)`.
pub fn f_simplex(x: &[f64], a: f64, big_n: usize) -> f64 {
    let nf = big_n as f64;
    let s = 1.0 + a;
    let (sq, cu) = x
        .iter()
        .fold((0.0, 0.0), |(q, c), &v| (q + v * v, c + v * v * v));
    cu - (3.0 - (nf - 2.0) / (nf - 1.0)) * s * sq + s.powi(3) * nf * nf / (nf - 1.0)
}

/// Gradient of [`f_simplex`] with respect to `x`.
pub fn f_simplex_grad(x: &[f64], a: f64, big_n: usize) -> Vec<f64> {
    let nf = big_n as f64;
    let c = (3.0 - (nf - 2.0) / (nf - 1.0)) * (1.0 + a);
    x.iter().map(|&v| 3.0 * v * v - 2.0 * c * v).collect()
}

/// `xⱼ = λⱼ/λ̄ + A`.
pub fn simplex_coordinates(spec: &Spectrum, a: f64) -> Result<Vec<f64>> {
    let m = spec.mean();
    if !(m > 0.0) {
        return Err(Error::Domain(format!(
            "the simplex substitution needs mean > 0, got {m}"
        )));
    }
    Ok(spec.values().iter().map(|l| l / m + a).collect())
}

/// The two coefficient rewrites that turn `f` into `16λ̄³F`, evaluated at
/// `θ = θ(n, α)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoefficientIdentities {
    pub theta: f64,
    pub a: f64,
    /// `(N−3)θ − (2N−9n+6)`.
    pub cubic_lhs: f64,
    /// `−3n((N−2)A − N)/(N−1)`.
    pub cubic_rhs: f64,
    /// `(2N−12n+6) − (N−3)θ`.
    pub mixed_lhs: f64,
    /// `3n((N−2)A − (2N−1))/(N−1)`.
    pub mixed_rhs: f64,
}

impl CoefficientIdentities {
    pub fn max_rel_error(&self) -> f64 {
        let rel = |l: f64, r: f64| (l - r).abs() / l.abs().max(r.abs()).max(1.0);
        rel(self.cubic_lhs, self.cubic_rhs).max(rel(self.mixed_lhs, self.mixed_rhs))
    }
}

/// Uses the unchecked `θ` formula so the identities can be probed past the
/// admissible range as well.
pub fn coefficient_identities(n: usize, alpha: f64) -> Result<CoefficientIdentities> {
    require_high(n)?;
    let big_n = traceless_dim(n);
    let theta = theta_formula(n, alpha);
    let a = lambda1_bound(big_n, &ConeParams::new(alpha, theta)?)?;
    let (nf, bn) = (n as f64, big_n as f64);
    Ok(CoefficientIdentities {
        theta,
        a,
        cubic_lhs: (bn - 3.0) * theta - (2.0 * bn - 9.0 * nf + 6.0),
        cubic_rhs: -3.0 * nf * ((bn - 2.0) * a - bn) / (bn - 1.0),
        mixed_lhs: (2.0 * bn - 12.0 * nf + 6.0) - (bn - 3.0) * theta,
        mixed_rhs: 3.0 * nf * ((bn - 2.0) * a - (2.0 * bn - 1.0)) / (bn - 1.0),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubstitutionReport {
    pub regime: Regime,
    /// `f(λ)` for `n ≥ 6`, `⟨ΔR,R⟩` for `n ∈ {4, 5}`.
    pub lhs: f64,
    /// `16λ̄³F(x)` for `n ≥ 6`, `8λ̄³F(x)` for `n ∈ {4, 5}`.
    pub rhs: f64,
    pub rel_residual: f64,
    pub a: f64,
    pub x: Vec<f64>,
    pub x_sum: f64,
    /// `N(1 + A)`.
    pub x_sum_expected: f64,
    pub x_min: f64,
}

impl SubstitutionReport {
    pub fn holds(&self, tol: f64) -> bool {
        self.rel_residual <= tol
            && (self.x_sum - self.x_sum_expected).abs() <= tol * self.x_sum_expected.abs().max(1.0)
    }
}

/// Checks the rewrite of the cubic bound as a multiple of `λ̄³F(x)` at the
/// regime threshold `θ = θ_auto(n, α)`.
pub fn substitution_check(
    spec: &Spectrum,
    params: &ConeParams,
    n: usize,
) -> Result<SubstitutionReport> {
    check_len(spec, n)?;
    let regime = Regime::of(n)?;
    let expected_theta = theta_auto(n, params.alpha())?;
    if (params.theta() - expected_theta).abs() > 1e-12 * expected_theta.abs().max(1.0) {
        return Err(Error::Precondition(format!(
            "substitution needs theta = {expected_theta} for n = {n}, alpha = {}",
            params.alpha()
        )));
    }
    let m = spec.mean();
    if !(m > 0.0) {
        return Err(Error::Domain(format!(
            "substitution needs mean > 0, got {m}"
        )));
    }
    let big_n = spec.len();
    let a = lambda1_bound(big_n, params)?;
    let x = simplex_coordinates(spec, a)?;
    let f = f_simplex(&x, a, big_n);
    let (lhs, rhs) = match regime {
        Regime::High => (
            f_lower_bound(spec, params.theta(), n)?,
            16.0 * m.powi(3) * f,
        ),
        Regime::Low => (delta_r_inner_eigen(spec, n)?, 8.0 * m.powi(3) * f),
    };
    let scale = tolerance_scale(spec).max(lhs.abs());
    Ok(SubstitutionReport {
        regime,
        lhs,
        rhs,
        rel_residual: (lhs - rhs).abs() / scale,
        a,
        x_sum: x.iter().sum(),
        x_sum_expected: big_n as f64 * (1.0 + a),
        x_min: x.iter().copied().fold(f64::INFINITY, f64::min),
        x,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EqualityCase {
    Constant,
    Extremal,
    None,
}

/// Matches `spec` against the two equality patterns; `constant` wins when
/// both match.
pub fn equality_case_classify(spec: &Spectrum, params: &ConeParams, tol: f64) -> EqualityCase {
    let m = spec.mean();
    let max_dev = spec
        .values()
        .iter()
        .fold(0.0_f64, |d, v| d.max((v - m).abs()));
    if max_dev <= tol * m.abs() {
        return EqualityCase::Constant;
    }
    if m >= 0.0 {
        if let Ok(ext) = extremal_spectrum(spec.len(), params, m) {
            let dist = spec
                .values()
                .iter()
                .zip(ext.values())
                .fold(0.0_f64, |d, (a, b)| d.max((a - b).abs()));
            if dist <= tol * m.abs().max(1.0) {
                return EqualityCase::Extremal;
            }
        }
    }
    EqualityCase::None
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BochnerReport {
    pub n: usize,
    pub delta_rr: f64,
    /// `f(λ)`; absent for `n < 6`.
    pub f_bound: Option<f64>,
    /// `Σλⱼ|SʲW|²` on the eigenbasis.
    pub lemma31_lhs: f64,
    /// Absent for `n < 6`.
    pub lemma31_rhs: Option<f64>,
    pub in_cone_checked: bool,
    pub equality_case: EqualityCase,
    pub scale: f64,
}

impl BochnerReport {
    /// Worst (most negative) scaled slack of the inequalities that apply:
    /// `3⟨ΔR,R⟩ ≥ f` and `Σλ|SW|² ≥ rhs` for `n ≥ 6`, `⟨ΔR,R⟩ ≥ 0` in both
    /// regimes. Only meaningful for in-cone inputs at the regime threshold.
    pub fn worst_slack(&self) -> f64 {
        let mut worst = self.delta_rr / self.scale;
        if let Some(f) = self.f_bound {
            worst = worst.min((3.0 * self.delta_rr - f) / self.scale);
        }
        if let Some(rhs) = self.lemma31_rhs {
            worst = worst.min((self.lemma31_lhs - rhs) / self.scale);
        }
        worst
    }
}

/// Evaluates all Bochner quantities for an Einstein tensor at `params`.
pub fn bochner_report(r: &AlgCurvature, params: &ConeParams) -> Result<BochnerReport> {
    let n = r.n();
    Regime::of(n)?;
    let (spec, profile) = eigen_profile(r)?;
    params.check_against(spec.len())?;
    let delta_rr = delta_r_inner(&spec, Some(&profile), n)?;
    let (f_bound, lemma31_rhs) = if n >= 6 {
        (
            Some(f_lower_bound(&spec, params.theta(), n)?),
            Some(lemma31_bound(&spec, params.theta(), n)?),
        )
    } else {
        (None, None)
    };
    Ok(BochnerReport {
        n,
        delta_rr,
        f_bound,
        lemma31_lhs: profile.weighted_sum(&spec)?,
        lemma31_rhs,
        in_cone_checked: in_cone(&spec, params)?.member,
        equality_case: equality_case_classify(&spec, params, 1e-6),
        scale: tolerance_scale(&spec),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone_analysis::{theta_lowdim, theta_threshold};

    fn zero_profile(n: usize) -> SjwProfile {
        SjwProfile {
            n,
            norms: vec![0.0; traceless_dim(n)],
            weyl_norm: 0.0,
        }
    }

    #[test]
    fn constant_spectra_have_zero_bochner_quantity() {
        for n in 4..=10 {
            let big_n = traceless_dim(n);
            let s = Spectrum::constant(big_n, 1.3).unwrap();
            let d = delta_r_inner(&s, Some(&zero_profile(n)), n).unwrap();
            assert!(d.abs() < 1e-10 * tolerance_scale(&s), "n = {n}: {d}");
            let d = delta_r_inner_weyl(&s, &zero_profile(n), n).unwrap();
            assert!(d.abs() < 1e-10 * tolerance_scale(&s), "n = {n}: {d}");
        }
    }

    #[test]
    fn high_regime_needs_profile() {
        let s = Spectrum::constant(20, 1.0).unwrap();
        assert!(matches!(
            delta_r_inner(&s, None, 6),
            Err(Error::Precondition(_))
        ));
        assert!(delta_r_inner(&Spectrum::constant(9, 1.0).unwrap(), None, 4).is_ok());
        assert!(delta_r_inner(&s, None, 3).is_err());
    }

    #[test]
    fn lemma31_bound_examples() {
        let s = Spectrum::new((0..20).map(|i| i as f64 * 0.1 - 0.3).collect()).unwrap();
        assert_eq!(lemma31_bound(&s, 0.0, 6).unwrap(), 0.0);
        let c = Spectrum::constant(20, 1.0).unwrap();
        assert!(lemma31_bound(&c, 0.2, 6).unwrap().abs() < 1e-12);
        assert!(lemma31_bound(&c, 0.2, 5).is_err());
    }

    #[test]
    fn f_vanishes_on_constant_and_extremal() {
        for n in 6..=10 {
            let big_n = traceless_dim(n);
            for theta in [0.0, 0.3, 1.7] {
                let c = Spectrum::constant(big_n, 0.8).unwrap();
                assert!(f_lower_bound(&c, theta, n).unwrap().abs() < 1e-10);
            }
        }
        assert_eq!(
            f_lower_bound(&Spectrum::constant(20, 0.0).unwrap(), 0.4, 6).unwrap(),
            0.0
        );
        let theta = theta_threshold(6, 1.0).unwrap();
        let p = ConeParams::new(1.0, theta).unwrap();
        let e = extremal_spectrum(20, &p, 1.0).unwrap();
        assert!(f_lower_bound(&e, theta, 6).unwrap().abs() < 1e-9);
    }

    #[test]
    fn simplex_minimizers_evaluate_to_zero() {
        let theta = theta_threshold(6, 1.0).unwrap();
        let a = lambda1_bound(20, &ConeParams::new(1.0, theta).unwrap()).unwrap();
        let s = 1.0 + a;
        assert!(f_simplex(&[s; 20], a, 20).abs() < 1e-10);
        let mut x = vec![20.0 * s / 19.0; 20];
        x[0] = 0.0;
        assert!(f_simplex(&x, a, 20).abs() < 1e-10);
        assert_eq!(f_simplex(&[0.0; 7], -1.0, 7), 0.0);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let x = [0.3, 1.2, 2.5, 0.0, 0.9];
        let g = f_simplex_grad(&x, 0.4, 5);
        for i in 0..5 {
            let h = 1e-6;
            let mut xp = x;
            let mut xm = x;
            xp[i] += h;
            xm[i] -= h;
            let fd = (f_simplex(&xp, 0.4, 5) - f_simplex(&xm, 0.4, 5)) / (2.0 * h);
            assert!((fd - g[i]).abs() < 1e-6);
        }
    }

    #[test]
    fn substitution_on_special_spectra() {
        let theta = theta_threshold(6, 1.2).unwrap();
        let p = ConeParams::new(1.2, theta).unwrap();
        let c = Spectrum::constant(20, 1.0).unwrap();
        let rep = substitution_check(&c, &p, 6).unwrap();
        assert!(rep.lhs.abs() < 1e-10 && rep.rhs.abs() < 1e-10);
        let e = extremal_spectrum(20, &p, 2.0).unwrap();
        let rep = substitution_check(&e, &p, 6).unwrap();
        assert!(rep.lhs.abs() < 1e-9 * tolerance_scale(&e));
        assert_eq!(rep.x.iter().filter(|v| v.abs() < 1e-12).count(), 1);
        assert!(rep.holds(1e-9));
    }

    #[test]
    fn substitution_low_regime() {
        for (n, alpha) in [(4, 1.0), (4, 2.3), (5, 1.7), (5, 3.0)] {
            let theta = theta_lowdim(n, alpha).unwrap();
            let p = ConeParams::new(alpha, theta).unwrap();
            let big_n = traceless_dim(n);
            let vals: Vec<f64> = (0..big_n)
                .map(|i| 1.0 + 0.1 * ((i * 7 % 5) as f64 - 2.0))
                .collect();
            let s = Spectrum::new(vals).unwrap();
            let rep = substitution_check(&s, &p, n).unwrap();
            assert!(rep.holds(1e-12), "n = {n}, alpha = {alpha}: {rep:?}");
        }
    }

    #[test]
    fn substitution_errors() {
        let p = ConeParams::new(1.2, 0.0).unwrap();
        let c = Spectrum::constant(20, 1.0).unwrap();
        assert!(matches!(
            substitution_check(&c, &p, 6),
            Err(Error::Precondition(_))
        ));
        let theta = theta_threshold(6, 1.2).unwrap();
        let p = ConeParams::new(1.2, theta).unwrap();
        let z = Spectrum::constant(20, 0.0).unwrap();
        assert!(matches!(
            substitution_check(&z, &p, 6),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn coefficient_identities_hold_on_admissible_range() {
        for n in 6..=12 {
            let amax = crate::cone_analysis::alpha_max(n).unwrap();
            for k in 0..=20 {
                let alpha = 1.0 + (amax - 1.0) * k as f64 / 20.0;
                let c = coefficient_identities(n, alpha).unwrap();
                assert!(c.max_rel_error() < 1e-10, "n = {n}, alpha = {alpha}: {c:?}");
            }
        }
    }

    #[test]
    fn classification() {
        let p = ConeParams::new(1.5, 0.3).unwrap();
        let c = Spectrum::constant(14, 2.0).unwrap();
        assert_eq!(equality_case_classify(&c, &p, 1e-6), EqualityCase::Constant);
        let e = extremal_spectrum(14, &p, 2.0).unwrap();
        assert_eq!(equality_case_classify(&e, &p, 1e-6), EqualityCase::Extremal);
        let mut v = vec![1.0; 14];
        v[0] = -1.0;
        v[1] = 0.9;
        v[2] = 1.1;
        let s = Spectrum::new(v).unwrap();
        assert_eq!(equality_case_classify(&s, &p, 1e-6), EqualityCase::None);
    }
}
