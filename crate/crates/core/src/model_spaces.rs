//! Curvature tensors of model spaces and seeded random Einstein tensors.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::cone_analysis::{cone_value, ConeParams};
use crate::error::{Error, Result};
use crate::rng::stream_rng;
use crate::second_kind::spectrum_of;
use crate::tensor_algebra::{
    bianchi_project, einstein_from_weyl, kulkarni_nomizu, weyl_decompose, AlgCurvature, Sym2,
    Tensor,
};

/// `R = (κ/2) g∧g`, sectional curvature `κ`.
pub fn constant_curvature(n: usize, kappa: f64) -> Result<AlgCurvature> {
    if n < 2 {
        return Err(Error::InvalidDimension {
            n,
            reason: "curvature needs n >= 2",
        });
    }
    let g = Sym2::identity(n);
    Ok(kulkarni_nomizu(&g, &g)?.scaled(kappa / 2.0))
}

pub fn flat(n: usize) -> Result<AlgCurvature> {
    constant_curvature(n, 0.0)
}

/// Fubini–Study curvature on `ℂPᵐ` (real dimension `2m`), holomorphic
/// sectional curvature 1 and sectional curvatures in `[1/4, 1]`.
pub fn fubini_study(m: usize) -> Result<AlgCurvature> {
    if m < 2 {
        return Err(Error::InvalidDimension {
            n: 2 * m,
            reason: "complex projective space needs m >= 2",
        });
    }
    let n = 2 * m;
    let j = |a: usize, b: usize| -> f64 {
        if a / 2 != b / 2 || a == b {
            0.0
        } else if a.is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    };
    let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    let t = Tensor::from_fn(n, 4, |ix| {
        let (x, y, z, w) = (ix[0], ix[1], ix[2], ix[3]);
        0.25 * (d(x, z) * d(y, w) - d(x, w) * d(y, z) + j(x, z) * j(y, w) - j(x, w) * j(y, z)
            + 2.0 * j(x, y) * j(z, w))
    });
    AlgCurvature::try_from_tensor(t)
}

#[derive(Debug, Clone)]
pub struct SphereProduct {
    pub curvature: AlgCurvature,
    /// `(p−1)κ₁ = (q−1)κ₂`.
    pub einstein: bool,
}

/// `S^p(κ₁) × S^q(κ₂)`.
pub fn sphere_product(p: usize, kappa1: f64, q: usize, kappa2: f64) -> Result<SphereProduct> {
    if p < 2 || q < 2 {
        return Err(Error::InvalidDimension {
            n: p + q,
            reason: "both sphere factors need dimension >= 2",
        });
    }
    let n = p + q;
    let block = |a: usize| if a < p { 0 } else { 1 };
    let kappa = [kappa1, kappa2];
    let t = Tensor::from_fn(n, 4, |ix| {
        let (i, j, k, l) = (ix[0], ix[1], ix[2], ix[3]);
        let b = block(i);
        if block(j) != b || block(k) != b || block(l) != b {
            return 0.0;
        }
        let d = |a: usize, c: usize| if a == c { 1.0 } else { 0.0 };
        kappa[b] * (d(i, k) * d(j, l) - d(i, l) * d(j, k))
    });
    let lhs = (p as f64 - 1.0) * kappa1;
    let rhs = (q as f64 - 1.0) * kappa2;
    Ok(SphereProduct {
        curvature: AlgCurvature::try_from_tensor(t)?,
        einstein: (lhs - rhs).abs() <= 1e-12 * lhs.abs().max(rhs.abs()).max(1.0),
    })
}

/// Random Weyl tensor: a standard normal element of `S²(∧²)`, projected onto
/// the Bianchi subspace, with all traces removed.
pub fn random_weyl(n: usize, seed: u64) -> Result<AlgCurvature> {
    if n < 4 {
        return Err(Error::InvalidDimension {
            n,
            reason: "nonzero Weyl tensors need n >= 4",
        });
    }
    let mut rng = stream_rng(seed, 0x3e_11, n as u64);
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .collect();
    let mut t = Tensor::zeros(n, 4);
    for a in 0..pairs.len() {
        for b in a..pairs.len() {
            let v: f64 = rng.sample(StandardNormal);
            let ((i, j), (k, l)) = (pairs[a], pairs[b]);
            for (p, q, sign) in [((i, j), (k, l), 1.0), ((k, l), (i, j), 1.0)] {
                for (x, y, s1) in [(p.0, p.1, 1.0), (p.1, p.0, -1.0)] {
                    for (z, w, s2) in [(q.0, q.1, 1.0), (q.1, q.0, -1.0)] {
                        let off = t.offset(&[x, y, z, w]);
                        t.as_mut_slice()[off] = sign * s1 * s2 * v;
                    }
                }
            }
        }
    }
    Ok(weyl_decompose(&bianchi_project(&t)?)?.weyl)
}

/// `W + Scal/(2n(n−1)) g∧g` with `W` from [`random_weyl`].
pub fn random_einstein(n: usize, scal: f64, seed: u64) -> Result<AlgCurvature> {
    einstein_from_weyl(&random_weyl(n, seed)?, scal)
}

/// Random Einstein tensor whose second-kind spectrum lies in `C(α, θ)`.
///
/// The spectrum of `W + (λ̄/2) g∧g` is that of `W̊` shifted by `λ̄`, so the
/// cone condition is linear in `λ̄`: it holds iff
/// `λ̄ ≥ λ* = −cone_value(W̊)/(1+θ)`. The mean is drawn in `[λ*, 2λ*]`,
/// weighted towards the boundary.
pub fn random_einstein_in_cone(n: usize, params: &ConeParams, seed: u64) -> Result<AlgCurvature> {
    let w = random_weyl(n, seed)?;
    let mu = spectrum_of(&w)?;
    params.check_against(mu.len())?;
    let boundary = -cone_value(&mu, params.alpha())? / (1.0 + params.theta());
    let mut rng = stream_rng(seed, 0xe1_c0, n as u64);
    let u: f64 = rng.random();
    let mean = if boundary > 0.0 {
        boundary * (1.0 + u * u) + 1e-9 * boundary
    } else {
        1.0
    };
    let nf = n as f64;
    einstein_from_weyl(&w, nf * (nf - 1.0) * mean)
}

/// Serializable description of a model curvature tensor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum ModelSpec {
    Constant {
        n: usize,
        kappa: f64,
    },
    Flat {
        n: usize,
    },
    FubiniStudy {
        m: usize,
    },
    SphereProduct {
        p: usize,
        kappa1: f64,
        q: usize,
        kappa2: f64,
    },
    RandomEinstein {
        n: usize,
        scal: f64,
        seed: u64,
    },
}

impl ModelSpec {
    pub fn build(&self) -> Result<AlgCurvature> {
        match *self {
            ModelSpec::Constant { n, kappa } => constant_curvature(n, kappa),
            ModelSpec::Flat { n } => flat(n),
            ModelSpec::FubiniStudy { m } => fubini_study(m),
            ModelSpec::SphereProduct {
                p,
                kappa1,
                q,
                kappa2,
            } => Ok(sphere_product(p, kappa1, q, kappa2)?.curvature),
            ModelSpec::RandomEinstein { n, scal, seed } => random_einstein(n, scal, seed),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone_analysis::in_cone;

    #[test]
    fn constant_curvature_sectional() {
        let r = constant_curvature(5, 0.7).unwrap();
        assert!((r.get(0, 1, 0, 1) - 0.7).abs() < 1e-15);
        assert!((r.get(0, 1, 1, 0) + 0.7).abs() < 1e-15);
        assert!((r.scalar() - 0.7 * 20.0).abs() < 1e-12);
        assert_eq!(flat(4).unwrap().norm_sq(), 0.0);
        assert!(constant_curvature(1, 1.0).is_err());
    }

    #[test]
    fn fubini_study_is_einstein_and_pinched() {
        assert!(fubini_study(1).is_err());
        for m in 2..=3 {
            let r = fubini_study(m).unwrap();
            assert!(r.einstein_residual() < 1e-14);
            let n = 2 * m;
            assert!((r.scalar() - (n * (n + 2)) as f64 / 4.0).abs() < 1e-12);
            assert!((r.get(0, 1, 0, 1) - 1.0).abs() < 1e-15);
            assert!((r.get(0, 2, 0, 2) - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn sphere_product_einstein_flag() {
        let s = sphere_product(2, 1.0, 2, 1.0).unwrap();
        assert!(s.einstein);
        assert!(s.curvature.einstein_residual() < 1e-14);
        let s = sphere_product(2, 2.0, 3, 1.0).unwrap();
        assert!(s.einstein);
        assert!(!sphere_product(2, 1.0, 3, 1.0).unwrap().einstein);
        assert_eq!(s.curvature.get(0, 2, 0, 2), 0.0);
        assert!(sphere_product(1, 1.0, 3, 1.0).is_err());
    }

    #[test]
    fn random_weyl_is_trace_free_and_reproducible() {
        let a = random_weyl(6, 11).unwrap();
        let b = random_weyl(6, 11).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, random_weyl(6, 12).unwrap());
        assert!(a.trace_residual() < 1e-12 * a.tensor().max_abs());
        assert!(a.norm_sq() > 0.0);
        assert!(random_weyl(3, 0).is_err());
    }

    #[test]
    fn random_einstein_scalar() {
        let r = random_einstein(5, 3.5, 2).unwrap();
        assert!((r.scalar() - 3.5).abs() < 1e-10);
        assert!(r.einstein_residual() < 1e-10);
    }

    #[test]
    fn random_in_cone_is_in_cone() {
        let p = ConeParams::new(1.5, 0.3).unwrap();
        for seed in 0..5 {
            let r = random_einstein_in_cone(6, &p, seed).unwrap();
            let s = spectrum_of(&r).unwrap();
            assert!(in_cone(&s, &p).unwrap().member, "seed {seed}");
            assert!(s.mean() > 0.0);
        }
    }

    #[test]
    fn model_spec_json() {
        let spec = ModelSpec::SphereProduct {
            p: 2,
            kappa1: 1.0,
            q: 2,
            kappa2: 1.0,
        };
        let text = serde_json::to_string(&spec).unwrap();
        assert!(text.contains("\"kind\":\"sphere_product\""));
        let back: ModelSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back, spec);
        assert_eq!(back.build().unwrap().n(), 4);
    }
}
