//! Curvature operator of the second kind on algebraic curvature tensors:
//! spectra, the cone conditions `C(α, θ)`, rigidity thresholds, the Bochner
//! quantity `⟨ΔR, R⟩` in terms of eigenvalues, and brute-force oracles that
//! cross-check every closed form.
//!
//! All tensors are components in an orthonormal frame, so `g = I`. Inner
//! products and norms are full contractions.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bochner;
pub mod cone_analysis;
pub mod error;
pub mod io;
pub mod jacobi;
pub mod model_spaces;
pub mod oracle_opt;
pub mod rng;
pub mod second_kind;
pub mod tensor_algebra;
pub mod verify;
pub mod weyl_action;

pub use error::{Error, Result};
pub use second_kind::Spectrum;
pub use tensor_algebra::{AlgCurvature, Sym2, Sym2Basis, Tensor};
