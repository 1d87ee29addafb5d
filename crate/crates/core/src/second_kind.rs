//! Curvature operators of the first and second kind as matrices, and their
//! spectra.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jacobi::{self, SymmetricEigen};
use crate::tensor_algebra::{AlgCurvature, Sym2, Sym2Basis};

/// Sorted eigenvalues `λ₁ ≤ … ≤ λ_N` together with their mean `λ̄`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    values: Vec<f64>,
    mean: f64,
}

impl Spectrum {
    /// Sorts ascending (stable) and computes the mean.
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Shape("spectrum must be non-empty".into()));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite eigenvalue {bad}")));
        }
        values.sort_by(f64::total_cmp);
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        Ok(Self { values, mean })
    }

    /// `(κ, …, κ)` of length `len`.
    pub fn constant(len: usize, kappa: f64) -> Result<Self> {
        Self::new(vec![kappa; len])
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sum_sq(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    pub fn sum_cubes(&self) -> f64 {
        self.values.iter().map(|v| v * v * v).sum()
    }

    pub fn scaled(&self, c: f64) -> Result<Spectrum> {
        Spectrum::new(self.values.iter().map(|v| c * v).collect())
    }
}

/// `R̄(φ)_ij = Σ_kl R_iklj φ_kl`.
pub fn overline_r(r: &AlgCurvature, phi: &Sym2) -> Result<Sym2> {
    let n = r.n();
    if phi.n() != n {
        return Err(Error::Shape(format!(
            "tensor has dimension {n}, 2-tensor has {}",
            phi.n()
        )));
    }
    Ok(Sym2::from_fn(n, |i, j| {
        let mut s = 0.0;
        for k in 0..n {
            for l in 0..n {
                let p = phi.get(k, l);
                if p != 0.0 {
                    s += r.get(i, k, l, j) * p;
                }
            }
        }
        s
    }))
}

/// The matrix of `R̊` in an orthonormal basis of traceless symmetric
/// 2-tensors. The projection onto the traceless part is implicit since
/// every basis element is traceless.
#[derive(Debug, Clone)]
pub struct SecondKindOperator {
    n: usize,
    basis: Sym2Basis,
    matrix: DMatrix<f64>,
}

/// Spectrum plus the eigenvectors of `R̊`, expressed as 2-tensors.
#[derive(Debug, Clone)]
pub struct SecondKindEigen {
    pub spectrum: Spectrum,
    /// `eigenbasis.get(j)` is the unit eigentensor for `spectrum.values()[j]`.
    pub eigenbasis: Sym2Basis,
    pub max_residual: f64,
}

impl SecondKindOperator {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn basis(&self) -> &Sym2Basis {
        &self.basis
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn asymmetry(&self) -> f64 {
        jacobi::asymmetry(&self.matrix)
    }

    fn decompose(&self) -> Result<SymmetricEigen> {
        jacobi::symmetric_eigen(&self.matrix, 1e-11)
    }

    pub fn spectrum(&self) -> Result<Spectrum> {
        Spectrum::new(self.decompose()?.values)
    }

    pub fn eigen(&self) -> Result<SecondKindEigen> {
        let dec = self.decompose()?;
        let big_n = self.basis.len();
        let mut max_residual = 0.0_f64;
        let mut elements = Vec::with_capacity(big_n);
        for (j, &lambda) in dec.values.iter().enumerate() {
            let col = dec.vectors.column(j);
            let r = &self.matrix * col - col * lambda;
            max_residual = max_residual.max(r.norm());
            let terms = (0..big_n).map(|a| (col[a], self.basis.get(a)));
            elements.push(Sym2::linear_combination(self.n, terms)?);
        }
        Ok(SecondKindEigen {
            spectrum: Spectrum::new(dec.values)?,
            eigenbasis: Sym2Basis::from_elements(self.n, elements)?,
            max_residual,
        })
    }
}

/// `matrix[a][b] = ⟨R̄(S^b), S^a⟩`.
pub fn second_kind_matrix(r: &AlgCurvature, basis: &Sym2Basis) -> Result<SecondKindOperator> {
    let n = r.n();
    if basis.n() != n {
        return Err(Error::Shape(format!(
            "basis is for n = {}, tensor has n = {n}",
            basis.n()
        )));
    }
    let big_n = basis.len();
    let images = basis
        .elements()
        .iter()
        .map(|s| overline_r(r, s))
        .collect::<Result<Vec<_>>>()?;
    let mut matrix = DMatrix::zeros(big_n, big_n);
    for (b, img) in images.iter().enumerate() {
        for a in 0..big_n {
            matrix[(a, b)] = img.inner(basis.get(a))?;
        }
    }
    Ok(SecondKindOperator {
        n,
        basis: basis.clone(),
        matrix,
    })
}

/// `R̂` on 2-forms in the ordered basis `{eᵢ∧eⱼ}_{i<j}` with
/// `R̂(ω)_ij = ½ Σ_kl R_ijkl ω_kl`; entry `[(ij),(kl)] = R_ijkl`.
///
/// The normalization depends on the convention `eᵢ∧eⱼ = eᵢ⊗eⱼ − eⱼ⊗eᵢ`; no
/// inequality here depends on it.
pub fn first_kind_matrix(r: &AlgCurvature) -> DMatrix<f64> {
    let n = r.n();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .collect();
    DMatrix::from_fn(pairs.len(), pairs.len(), |a, b| {
        let (i, j) = pairs[a];
        let (k, l) = pairs[b];
        r.get(i, j, k, l)
    })
}

/// Spectrum of `R̊` in the standard basis.
pub fn spectrum_of(r: &AlgCurvature) -> Result<Spectrum> {
    second_kind_matrix(r, &Sym2Basis::standard(r.n())?)?.spectrum()
}

pub fn spectrum(op: &SecondKindOperator) -> Result<Spectrum> {
    op.spectrum()
}

/// Evaluates many tensors concurrently; output order matches input order.
pub fn spectra_batch(tensors: &[AlgCurvature]) -> Vec<Result<Spectrum>> {
    tensors.par_iter().map(spectrum_of).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalReport {
    pub scal: f64,
    pub mean: f64,
    /// `n(n−1)·λ̄`.
    pub predicted: f64,
    pub residual: f64,
    pub holds: bool,
}

/// Checks `Scal = n(n−1)λ̄` for an Einstein tensor.
pub fn scal_consistency(r: &AlgCurvature, spec: &Spectrum) -> Result<ScalReport> {
    let n = r.n();
    let scale = r.tensor().max_abs().max(1.0);
    let einstein = r.einstein_residual();
    if einstein > 1e-8 * scale {
        return Err(Error::Precondition(format!(
            "tensor is not Einstein (max |Ric - (Scal/n) g| = {einstein:e})"
        )));
    }
    let scal = r.scalar();
    let predicted = (n * (n - 1)) as f64 * spec.mean();
    let residual = (scal - predicted).abs();
    Ok(ScalReport {
        scal,
        mean: spec.mean(),
        predicted,
        residual,
        holds: residual <= 1e-8 * scal.abs().max(1.0),
    })
}
