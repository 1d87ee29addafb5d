//! The derivation action of a symmetric 2-tensor on covariant tensors,
//! `(S·T)(X₁,…,X_k) = Σᵢ T(X₁,…,S Xᵢ,…,X_k)`, and the norms `|SʲW|²` that
//! enter the Weyl estimates.
//!
//! `T^{S²₀} = Σⱼ SʲT ⊗ Sʲ` is never materialized; only the per-element norms
//! are needed.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::second_kind::{second_kind_matrix, Spectrum};
use crate::tensor_algebra::{weyl_decompose, AlgCurvature, Sym2, Sym2Basis, Tensor};

/// `Σⱼ |SʲW|² / |W|²` for any orthonormal basis of traceless tensors.
pub fn sum_norm_ratio(n: usize) -> f64 {
    let nf = n as f64;
    2.0 * (nf * nf + nf - 8.0) / nf
}

/// Upper bound of `|SW|² / |W|²` over unit traceless `S`.
pub fn max_norm_ratio(n: usize) -> f64 {
    let nf = n as f64;
    (8.0 * nf - 16.0) / nf
}

/// `S·T`, summing the action of `S` over every slot of `T`.
pub fn tensor_action(s: &Sym2, t: &Tensor) -> Result<Tensor> {
    let n = t.n();
    let rank = t.rank();
    if rank == 0 {
        return Err(Error::Shape("tensor action needs rank >= 1".into()));
    }
    if s.n() != n {
        return Err(Error::Shape(format!(
            "2-tensor has dimension {}, tensor has {n}",
            s.n()
        )));
    }
    let nonzeros: Vec<(usize, usize, f64)> = (0..n)
        .flat_map(|a| (0..n).map(move |m| (a, m)))
        .filter_map(|(a, m)| {
            let v = s.get(a, m);
            (v != 0.0).then_some((a, m, v))
        })
        .collect();
    let src = t.as_slice();
    let mut out = vec![0.0; src.len()];
    for slot in 0..rank {
        let stride = n.pow((rank - 1 - slot) as u32);
        let outer = n.pow(slot as u32);
        for &(a, m, v) in &nonzeros {
            for o in 0..outer {
                let base = o * n * stride;
                let from = &src[base + m * stride..base + (m + 1) * stride];
                let to = &mut out[base + a * stride..base + (a + 1) * stride];
                for (dst, x) in to.iter_mut().zip(from) {
                    *dst += v * x;
                }
            }
        }
    }
    Tensor::from_vec(n, rank, out)
}

/// `|SʲW|²` for each element of a basis, together with `|W|²`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SjwProfile {
    pub n: usize,
    pub norms: Vec<f64>,
    pub weyl_norm: f64,
}

impl SjwProfile {
    pub fn sum(&self) -> f64 {
        self.norms.iter().sum()
    }

    pub fn max(&self) -> f64 {
        self.norms.iter().fold(0.0_f64, |m, &v| m.max(v))
    }

    /// `Σⱼ|SʲW|² / |W|²`, or 0 for `W = 0`.
    pub fn sum_ratio(&self) -> f64 {
        if self.weyl_norm == 0.0 {
            0.0
        } else {
            self.sum() / self.weyl_norm
        }
    }

    pub fn max_ratio(&self) -> f64 {
        if self.weyl_norm == 0.0 {
            0.0
        } else {
            self.max() / self.weyl_norm
        }
    }

    /// `Σⱼ λⱼ|SʲW|²`; meaningful when the profile was built on the
    /// eigenbasis matching `spec`.
    pub fn weighted_sum(&self, spec: &Spectrum) -> Result<f64> {
        if spec.len() != self.norms.len() {
            return Err(Error::Shape(format!(
                "spectrum has {} values, profile has {}",
                spec.len(),
                self.norms.len()
            )));
        }
        Ok(spec
            .values()
            .iter()
            .zip(&self.norms)
            .map(|(l, s)| l * s)
            .sum())
    }

    pub fn scaled(&self, c: f64) -> SjwProfile {
        SjwProfile {
            n: self.n,
            norms: self.norms.iter().map(|v| c * c * v).collect(),
            weyl_norm: c * c * self.weyl_norm,
        }
    }
}

pub fn sjw_profile(w: &AlgCurvature, basis: &Sym2Basis) -> Result<SjwProfile> {
    let n = w.n();
    if basis.n() != n {
        return Err(Error::Shape(format!(
            "basis is for n = {}, tensor has n = {n}",
            basis.n()
        )));
    }
    let residual = w.trace_residual();
    if residual > 1e-9 * w.tensor().max_abs().max(1.0) {
        return Err(Error::Precondition(format!(
            "input is not a Weyl tensor (max trace residual {residual:e})"
        )));
    }
    let norms = basis
        .elements()
        .par_iter()
        .map(|s| tensor_action(s, w.tensor()).map(|t| t.norm_sq()))
        .collect::<Result<Vec<_>>>()?;
    Ok(SjwProfile {
        n,
        norms,
        weyl_norm: w.norm_sq(),
    })
}

/// `|W|² = (4/3)Σλⱼ² − (4N/3)λ̄²`, valid for Einstein tensors.
pub fn weyl_norm_from_spectrum(spec: &Spectrum) -> f64 {
    let big_n = spec.len() as f64;
    let m = spec.mean();
    4.0 / 3.0 * spec.sum_sq() - 4.0 * big_n / 3.0 * m * m
}

/// Spectrum of `R̊` and the `|SʲW|²` profile of the Weyl part of `r`, both
/// indexed by the same sorted eigenbasis.
pub fn eigen_profile(r: &AlgCurvature) -> Result<(Spectrum, SjwProfile)> {
    let n = r.n();
    let op = second_kind_matrix(r, &Sym2Basis::standard(n)?)?;
    let eig = op.eigen()?;
    let weyl = weyl_decompose(r)?.weyl;
    let profile = sjw_profile(&weyl, &eig.eigenbasis)?;
    Ok((eig.spectrum, profile))
}
