//! Dense tensor algebra on ℝⁿ in a fixed orthonormal frame.
//!
//! The metric is the identity matrix throughout, so covariant and
//! contravariant indices are not distinguished. Inner products on every
//! tensor space are full contractions with no combinatorial weights, e.g.
//! `|R|² = Σ R_ijkl²`.
//!
//! Index convention for curvature tensors: the constant-curvature model is
//! `R = (κ/2)·g∧g`, which gives `R[0][1][0][1] = κ`, and the Ricci tensor is
//! the first–third contraction `Ric[j][l] = Σᵢ R[i][j][i][l]`.

use crate::error::{Error, Result};

/// Tolerance for exact algebraic identities (relative to the entry scale).
pub const EXACT_TOL: f64 = 1e-12;

/// Dimension `N = (n+2)(n−1)/2` of the traceless symmetric 2-tensors on ℝⁿ.
pub fn traceless_dim(n: usize) -> usize {
    (n + 2) * (n - 1) / 2
}

fn scale_of(data: &[f64]) -> f64 {
    data.iter().fold(1.0_f64, |m, v| m.max(v.abs()))
}

/// A symmetric 2-tensor on ℝⁿ stored as a full row-major `n×n` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Sym2 {
    n: usize,
    data: Vec<f64>,
}

impl Sym2 {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    /// The metric `g`.
    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    /// Builds from the upper triangle of `f`; the lower triangle is mirrored.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                data[i * n + j] = v;
                data[j * n + i] = v;
            }
        }
        Self { n, data }
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let n = values.len();
        Self::from_fn(n, |i, j| if i == j { values[i] } else { 0.0 })
    }

    /// Validating constructor from a row-major `n×n` array.
    pub fn try_new(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::Shape(format!(
                "expected {} entries for a {n}x{n} matrix, got {}",
                n * n,
                data.len()
            )));
        }
        let scale = scale_of(&data);
        let mut residual = 0.0_f64;
        for i in 0..n {
            for j in 0..i {
                residual = residual.max((data[i * n + j] - data[j * n + i]).abs());
            }
        }
        if residual > 1e-14 * scale {
            return Err(Error::Symmetry {
                what: "symmetry of 2-tensor",
                residual,
            });
        }
        Ok(Self::from_fn(n, |i, j| {
            0.5 * (data[i * n + j] + data[j * n + i])
        }))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    /// Full contraction `Σᵢⱼ AᵢⱼBᵢⱼ`.
    pub fn inner(&self, other: &Sym2) -> Result<f64> {
        check_dims(self.n, other.n)?;
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum())
    }

    pub fn norm_sq(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }

    pub fn scaled(&self, c: f64) -> Sym2 {
        Sym2 {
            n: self.n,
            data: self.data.iter().map(|v| c * v).collect(),
        }
    }

    pub fn add(&self, other: &Sym2) -> Result<Sym2> {
        check_dims(self.n, other.n)?;
        Ok(Sym2 {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    /// `Σ cᵢ Aᵢ` over matching dimensions.
    pub fn linear_combination<'a>(
        n: usize,
        terms: impl IntoIterator<Item = (f64, &'a Sym2)>,
    ) -> Result<Sym2> {
        let mut data = vec![0.0; n * n];
        for (c, s) in terms {
            check_dims(n, s.n)?;
            for (d, v) in data.iter_mut().zip(&s.data) {
                *d += c * v;
            }
        }
        Ok(Sym2 { n, data })
    }
}

fn check_dims(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::Shape(format!("dimension {a} does not match {b}")));
    }
    Ok(())
}

/// An ordered orthonormal basis of the traceless symmetric 2-tensors.
#[derive(Debug, Clone)]
pub struct Sym2Basis {
    n: usize,
    elements: Vec<Sym2>,
}

impl Sym2Basis {
    /// The standard basis: the `n(n−1)/2` off-diagonal elements
    /// `(eᵢ⊗eⱼ + eⱼ⊗eᵢ)/√2` in lexicographic `(i,j)` order, followed by the
    /// `n−1` normalized traceless diagonals `diag(1,…,1,−k,0,…,0)`.
    pub fn standard(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidDimension {
                n,
                reason: "traceless symmetric 2-tensors need n >= 2",
            });
        }
        let mut elements = Vec::with_capacity(traceless_dim(n));
        let h = std::f64::consts::FRAC_1_SQRT_2;
        for i in 0..n {
            for j in (i + 1)..n {
                elements.push(Sym2::from_fn(
                    n,
                    |a, b| {
                        if (a, b) == (i, j) {
                            h
                        } else {
                            0.0
                        }
                    },
                ));
            }
        }
        for k in 1..n {
            let norm = ((k * (k + 1)) as f64).sqrt();
            let mut diag = vec![0.0; n];
            diag[..k].fill(1.0 / norm);
            diag[k] = -(k as f64) / norm;
            elements.push(Sym2::diagonal(&diag));
        }
        Ok(Self { n, elements })
    }

    /// Validates that `elements` is an orthonormal basis of traceless tensors.
    pub fn from_elements(n: usize, elements: Vec<Sym2>) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidDimension {
                n,
                reason: "traceless symmetric 2-tensors need n >= 2",
            });
        }
        if elements.len() != traceless_dim(n) {
            return Err(Error::Shape(format!(
                "basis for n = {n} needs {} elements, got {}",
                traceless_dim(n),
                elements.len()
            )));
        }
        for e in &elements {
            check_dims(n, e.n)?;
            if e.trace().abs() > 1e-12 {
                return Err(Error::Precondition(format!(
                    "basis element has trace {:e}",
                    e.trace()
                )));
            }
        }
        let basis = Self { n, elements };
        let dev = basis.orthonormality_defect();
        if dev > 1e-12 {
            return Err(Error::Precondition(format!(
                "basis is not orthonormal (max Gram deviation {dev:e})"
            )));
        }
        Ok(basis)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[Sym2] {
        &self.elements
    }

    pub fn get(&self, idx: usize) -> &Sym2 {
        &self.elements[idx]
    }

    /// Max entrywise deviation of the Gram matrix from the identity.
    pub fn orthonormality_defect(&self) -> f64 {
        let mut dev = 0.0_f64;
        for (a, ea) in self.elements.iter().enumerate() {
            for (b, eb) in self.elements.iter().enumerate().skip(a) {
                let g: f64 = ea.data.iter().zip(&eb.data).map(|(x, y)| x * y).sum();
                let target = if a == b { 1.0 } else { 0.0 };
                dev = dev.max((g - target).abs());
            }
        }
        dev
    }
}

/// A dense rank-`k` tensor on ℝⁿ, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    n: usize,
    rank: usize,
    data: Vec<f64>,
}

impl Tensor {
    pub fn zeros(n: usize, rank: usize) -> Self {
        Self {
            n,
            rank,
            data: vec![0.0; n.pow(rank as u32)],
        }
    }

    pub fn from_vec(n: usize, rank: usize, data: Vec<f64>) -> Result<Self> {
        let len = n.pow(rank as u32);
        if data.len() != len {
            return Err(Error::Shape(format!(
                "rank-{rank} tensor on R^{n} needs {len} entries, got {}",
                data.len()
            )));
        }
        Ok(Self { n, rank, data })
    }

    /// Fills every component from `f(index)`.
    pub fn from_fn(n: usize, rank: usize, mut f: impl FnMut(&[usize]) -> f64) -> Self {
        let mut t = Self::zeros(n, rank);
        let mut idx = vec![0usize; rank];
        for slot in t.data.iter_mut() {
            *slot = f(&idx);
            for d in (0..rank).rev() {
                idx[d] += 1;
                if idx[d] < n {
                    break;
                }
                idx[d] = 0;
            }
        }
        t
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn offset(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.rank);
        idx.iter().fold(0, |acc, &i| acc * self.n + i)
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.data[self.offset(idx)]
    }

    #[inline]
    pub fn at4(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        let n = self.n;
        self.data[((i * n + j) * n + k) * n + l]
    }

    pub fn norm_sq(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }

    pub fn inner(&self, other: &Tensor) -> Result<f64> {
        if self.n != other.n || self.rank != other.rank {
            return Err(Error::Shape(format!(
                "rank-{} tensor on R^{} vs rank-{} tensor on R^{}",
                self.rank, self.n, other.rank, other.n
            )));
        }
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum())
    }

    pub fn scaled(&self, c: f64) -> Tensor {
        Tensor {
            n: self.n,
            rank: self.rank,
            data: self.data.iter().map(|v| c * v).collect(),
        }
    }

    /// `self + c·other`.
    pub fn add_scaled(&self, c: f64, other: &Tensor) -> Result<Tensor> {
        if self.n != other.n || self.rank != other.rank {
            return Err(Error::Shape("tensor shapes differ".into()));
        }
        Ok(Tensor {
            n: self.n,
            rank: self.rank,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + c * b)
                .collect(),
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    fn require_rank4(&self) -> Result<()> {
        if self.rank != 4 {
            return Err(Error::Shape(format!(
                "expected a rank-4 tensor, got rank {}",
                self.rank
            )));
        }
        Ok(())
    }
}

/// Residuals of the curvature symmetries of a rank-4 tensor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetryResiduals {
    pub antisymmetry: f64,
    pub pair_symmetry: f64,
    pub bianchi: f64,
}

impl SymmetryResiduals {
    pub fn of(t: &Tensor) -> Self {
        let n = t.n;
        let (mut anti, mut pair, mut bianchi) = (0.0_f64, 0.0_f64, 0.0_f64);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let v = t.at4(i, j, k, l);
                        anti = anti
                            .max((v + t.at4(j, i, k, l)).abs())
                            .max((v + t.at4(i, j, l, k)).abs());
                        pair = pair.max((v - t.at4(k, l, i, j)).abs());
                        bianchi = bianchi.max((v + t.at4(i, k, l, j) + t.at4(i, l, j, k)).abs());
                    }
                }
            }
        }
        Self {
            antisymmetry: anti,
            pair_symmetry: pair,
            bianchi,
        }
    }
}

/// An algebraic curvature tensor: antisymmetric in each index pair,
/// pair-symmetric, and satisfying the first Bianchi identity.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgCurvature {
    t: Tensor,
}

impl AlgCurvature {
    pub fn zeros(n: usize) -> Self {
        Self {
            t: Tensor::zeros(n, 4),
        }
    }

    /// Validates the curvature symmetries at `EXACT_TOL` relative to the
    /// largest component.
    pub fn try_from_tensor(t: Tensor) -> Result<Self> {
        t.require_rank4()?;
        let tol = EXACT_TOL * scale_of(&t.data);
        let res = SymmetryResiduals::of(&t);
        if res.antisymmetry > tol {
            return Err(Error::Symmetry {
                what: "antisymmetry R[i][j][k][l] = -R[j][i][k][l] = -R[i][j][l][k]",
                residual: res.antisymmetry,
            });
        }
        if res.pair_symmetry > tol {
            return Err(Error::Symmetry {
                what: "pair symmetry R[i][j][k][l] = R[k][l][i][j]",
                residual: res.pair_symmetry,
            });
        }
        if res.bianchi > tol {
            return Err(Error::Symmetry {
                what: "first Bianchi identity",
                residual: res.bianchi,
            });
        }
        Ok(Self { t })
    }

    /// For results of operations that preserve the symmetries exactly.
    pub(crate) fn from_tensor_unchecked(t: Tensor) -> Self {
        debug_assert_eq!(t.rank, 4);
        Self { t }
    }

    pub fn n(&self) -> usize {
        self.t.n
    }

    pub fn tensor(&self) -> &Tensor {
        &self.t
    }

    pub fn into_tensor(self) -> Tensor {
        self.t
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.t.at4(i, j, k, l)
    }

    pub fn norm_sq(&self) -> f64 {
        self.t.norm_sq()
    }

    pub fn inner(&self, other: &AlgCurvature) -> Result<f64> {
        self.t.inner(&other.t)
    }

    pub fn scaled(&self, c: f64) -> AlgCurvature {
        Self::from_tensor_unchecked(self.t.scaled(c))
    }

    /// `self + c·other`.
    pub fn add_scaled(&self, c: f64, other: &AlgCurvature) -> Result<AlgCurvature> {
        Ok(Self::from_tensor_unchecked(self.t.add_scaled(c, &other.t)?))
    }

    pub fn ricci(&self) -> Sym2 {
        let n = self.n();
        Sym2::from_fn(n, |j, l| (0..n).map(|i| self.get(i, j, i, l)).sum())
    }

    pub fn scalar(&self) -> f64 {
        self.ricci().trace()
    }

    /// `max_{j,l} |Σᵢ R[i][j][i][l]|`; zero exactly for Weyl tensors.
    pub fn trace_residual(&self) -> f64 {
        self.ricci()
            .as_slice()
            .iter()
            .fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// `max |Ric − (Scal/n)·g|`.
    pub fn einstein_residual(&self) -> f64 {
        let n = self.n();
        let ric = self.ricci();
        let mean = ric.trace() / n as f64;
        let mut res = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { mean } else { 0.0 };
                res = res.max((ric.get(i, j) - target).abs());
            }
        }
        res
    }

    /// The pulled-back tensor `R'_{abcd} = Σ Q_ai Q_bj Q_ck Q_dl R_ijkl`.
    pub fn rotated(&self, q: &nalgebra::DMatrix<f64>) -> Result<AlgCurvature> {
        let n = self.n();
        if q.nrows() != n || q.ncols() != n {
            return Err(Error::Shape(format!(
                "rotation is {}x{}, tensor dimension is {n}",
                q.nrows(),
                q.ncols()
            )));
        }
        let mut cur = self.t.data.clone();
        // Contract one slot at a time; each pass moves the transformed slot
        // to the back so the same loop applies four times.
        for _ in 0..4 {
            let mut next = vec![0.0; cur.len()];
            let n3 = n * n * n;
            for a in 0..n {
                for rest in 0..n3 {
                    let mut s = 0.0;
                    for i in 0..n {
                        s += q[(a, i)] * cur[i * n3 + rest];
                    }
                    next[rest * n + a] = s;
                }
            }
            cur = next;
        }
        Ok(Self::from_tensor_unchecked(Tensor::from_vec(n, 4, cur)?))
    }
}

/// `(A∧B)_{ijkl} = A_ik B_jl + A_jl B_ik − A_jk B_il − A_il B_jk`.
pub fn kulkarni_nomizu(a: &Sym2, b: &Sym2) -> Result<AlgCurvature> {
    check_dims(a.n, b.n)?;
    let t = Tensor::from_fn(a.n, 4, |ix| {
        let (i, j, k, l) = (ix[0], ix[1], ix[2], ix[3]);
        a.get(i, k) * b.get(j, l) + a.get(j, l) * b.get(i, k)
            - a.get(j, k) * b.get(i, l)
            - a.get(i, l) * b.get(j, k)
    });
    Ok(AlgCurvature::from_tensor_unchecked(t))
}

pub fn ricci(r: &AlgCurvature) -> Sym2 {
    r.ricci()
}

pub fn scalar(r: &AlgCurvature) -> f64 {
    r.scalar()
}

/// Squared Frobenius norm `|R|² = Σ R_ijkl²`.
pub fn frobenius(r: &AlgCurvature) -> f64 {
    r.norm_sq()
}

/// The irreducible pieces `R = W + (1/(n−2)) Ric∧g − Scal/(2(n−1)(n−2)) g∧g`.
#[derive(Debug, Clone)]
pub struct CurvDecomposition {
    pub weyl: AlgCurvature,
    pub ricci: Sym2,
    pub scal: f64,
}

impl CurvDecomposition {
    pub fn recompose(&self) -> Result<AlgCurvature> {
        let n = self.weyl.n();
        if n < 3 {
            return Err(Error::InvalidDimension {
                n,
                reason: "the Weyl decomposition needs n >= 3",
            });
        }
        let g = Sym2::identity(n);
        let nf = n as f64;
        let ric_g = kulkarni_nomizu(&self.ricci, &g)?;
        let g_g = kulkarni_nomizu(&g, &g)?;
        self.weyl
            .add_scaled(1.0 / (nf - 2.0), &ric_g)?
            .add_scaled(-self.scal / (2.0 * (nf - 1.0) * (nf - 2.0)), &g_g)
    }
}

pub fn weyl_decompose(r: &AlgCurvature) -> Result<CurvDecomposition> {
    let n = r.n();
    if n < 3 {
        return Err(Error::InvalidDimension {
            n,
            reason: "the Weyl decomposition needs n >= 3",
        });
    }
    let nf = n as f64;
    let g = Sym2::identity(n);
    let ricci = r.ricci();
    let scal = ricci.trace();
    let weyl = r
        .add_scaled(-1.0 / (nf - 2.0), &kulkarni_nomizu(&ricci, &g)?)?
        .add_scaled(
            scal / (2.0 * (nf - 1.0) * (nf - 2.0)),
            &kulkarni_nomizu(&g, &g)?,
        )?;
    Ok(CurvDecomposition { weyl, ricci, scal })
}

/// `R = W + Scal/(2n(n−1)) g∧g` for a totally trace-free `W`.
pub fn einstein_from_weyl(w: &AlgCurvature, scal: f64) -> Result<AlgCurvature> {
    let n = w.n();
    if n < 2 {
        return Err(Error::InvalidDimension {
            n,
            reason: "curvature needs n >= 2",
        });
    }
    let residual = w.trace_residual();
    if residual > 1e-10 * w.t.max_abs().max(1.0) {
        return Err(Error::Precondition(format!(
            "Weyl input is not trace-free (max trace residual {residual:e})"
        )));
    }
    let nf = n as f64;
    let g = Sym2::identity(n);
    w.add_scaled(scal / (2.0 * nf * (nf - 1.0)), &kulkarni_nomizu(&g, &g)?)
}

/// Orthogonal projection of `S²(∧²)` onto the Bianchi subspace, removing
/// the totally antisymmetric `∧⁴` component.
pub fn bianchi_project(t: &Tensor) -> Result<AlgCurvature> {
    t.require_rank4()?;
    let res = SymmetryResiduals::of(t);
    let tol = 1e-10 * scale_of(&t.data);
    if res.antisymmetry > tol {
        return Err(Error::Symmetry {
            what: "antisymmetry of input to Bianchi projection",
            residual: res.antisymmetry,
        });
    }
    if res.pair_symmetry > tol {
        return Err(Error::Symmetry {
            what: "pair symmetry of input to Bianchi projection",
            residual: res.pair_symmetry,
        });
    }
    let n = t.n;
    let out = Tensor::from_fn(n, 4, |ix| {
        let (i, j, k, l) = (ix[0], ix[1], ix[2], ix[3]);
        let cyclic = t.at4(i, j, k, l) + t.at4(i, k, l, j) + t.at4(i, l, j, k);
        t.at4(i, j, k, l) - cyclic / 3.0
    });
    Ok(AlgCurvature::from_tensor_unchecked(out))
}
