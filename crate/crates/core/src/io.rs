//! JSON formats for curvature tensors, spectra and `|SʲW|²` profiles.
//!
//! Tensors are stored as a generating set of components
//! `R[i][j][k][l]` with `i < j`, `k < l` and `(i, j) ≤ (k, l)`; the reader
//! expands the rest by symmetry and validates the result. Floats are written
//! with 17 significant digits so every `f64` round-trips exactly.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::second_kind::Spectrum;
use crate::tensor_algebra::{traceless_dim, AlgCurvature, Tensor};
use crate::weyl_action::SjwProfile;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub l: usize,
    pub v: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TensorFile {
    pub n: usize,
    pub entries: Vec<Entry>,
}

/// `{:.16e}` keeps 17 significant digits, enough to round-trip any `f64`.
fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Nonzero canonical components, ordered by `(i, j, k, l)`.
pub fn canonical_entries(r: &AlgCurvature) -> Vec<Entry> {
    let n = r.n();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .collect();
    let mut out = Vec::new();
    for (a, &(i, j)) in pairs.iter().enumerate() {
        for &(k, l) in &pairs[a..] {
            let v = r.get(i, j, k, l);
            if v != 0.0 {
                out.push(Entry { i, j, k, l, v });
            }
        }
    }
    out
}

pub fn tensor_to_json(r: &AlgCurvature) -> String {
    let mut s = format!("{{\n  \"n\": {},\n  \"entries\": [", r.n());
    let entries = canonical_entries(r);
    for (idx, e) in entries.iter().enumerate() {
        let sep = if idx + 1 == entries.len() { "" } else { "," };
        let _ = write!(
            s,
            "\n    {{\"i\": {}, \"j\": {}, \"k\": {}, \"l\": {}, \"v\": {}}}{sep}",
            e.i,
            e.j,
            e.k,
            e.l,
            fmt_f64(e.v)
        );
    }
    if !entries.is_empty() {
        s.push_str("\n  ");
    }
    s.push_str("]\n}\n");
    s
}

pub fn tensor_from_file_struct(file: &TensorFile) -> Result<AlgCurvature> {
    let n = file.n;
    if n < 2 {
        return Err(Error::InvalidDimension {
            n,
            reason: "curvature needs n >= 2",
        });
    }
    let mut t = Tensor::zeros(n, 4);
    let mut seen = HashSet::new();
    for e in &file.entries {
        let Entry { i, j, k, l, v } = *e;
        if i >= n || j >= n || k >= n || l >= n {
            return Err(Error::Format(format!(
                "index out of range in entry ({i},{j},{k},{l}) for n = {n}"
            )));
        }
        if !(i < j && k < l && (i, j) <= (k, l)) {
            return Err(Error::Format(format!(
                "entry ({i},{j},{k},{l}) is not canonical: need i<j, k<l, (i,j) <= (k,l)"
            )));
        }
        if !v.is_finite() {
            return Err(Error::Format(format!(
                "non-finite value in entry ({i},{j},{k},{l})"
            )));
        }
        if !seen.insert((i, j, k, l)) {
            return Err(Error::Format(format!("duplicate entry ({i},{j},{k},{l})")));
        }
        for ((a, b), (c, d)) in [((i, j), (k, l)), ((k, l), (i, j))] {
            for (x, y, s1) in [(a, b, 1.0), (b, a, -1.0)] {
                for (z, w, s2) in [(c, d, 1.0), (d, c, -1.0)] {
                    let off = t.offset(&[x, y, z, w]);
                    t.as_mut_slice()[off] = s1 * s2 * v;
                }
            }
        }
    }
    AlgCurvature::try_from_tensor(t)
}

pub fn tensor_from_json(text: &str) -> Result<AlgCurvature> {
    let file: TensorFile = serde_json::from_str(text)?;
    tensor_from_file_struct(&file)
}

pub fn read_tensor(path: &Path) -> Result<AlgCurvature> {
    tensor_from_json(&std::fs::read_to_string(path)?)
}

pub fn write_tensor(path: &Path, r: &AlgCurvature) -> Result<()> {
    std::fs::write(path, tensor_to_json(r))?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumFile {
    pub n: usize,
    #[serde(rename = "N")]
    pub big_n: usize,
    pub eigenvalues: Vec<f64>,
    pub mean: f64,
    pub scal: f64,
}

impl SpectrumFile {
    pub fn new(n: usize, spec: &Spectrum, scal: f64) -> Self {
        Self {
            n,
            big_n: spec.len(),
            eigenvalues: spec.values().to_vec(),
            mean: spec.mean(),
            scal,
        }
    }

    /// Validates the length against `n` and the stored mean against the
    /// eigenvalues.
    pub fn spectrum(&self) -> Result<Spectrum> {
        if self.big_n != traceless_dim(self.n) || self.eigenvalues.len() != self.big_n {
            return Err(Error::Format(format!(
                "n = {} needs N = {} eigenvalues, file has N = {} and {} values",
                self.n,
                traceless_dim(self.n),
                self.big_n,
                self.eigenvalues.len()
            )));
        }
        let spec = Spectrum::new(self.eigenvalues.clone())?;
        if (spec.mean() - self.mean).abs() > 1e-12 * spec.mean().abs().max(1.0) {
            return Err(Error::Format(format!(
                "stored mean {} disagrees with eigenvalues (mean {})",
                self.mean,
                spec.mean()
            )));
        }
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        let values: Vec<String> = self.eigenvalues.iter().map(|&v| fmt_f64(v)).collect();
        format!(
            "{{\n  \"n\": {},\n  \"N\": {},\n  \"eigenvalues\": [{}],\n  \"mean\": {},\n  \"scal\": {}\n}}\n",
            self.n,
            self.big_n,
            values.join(", "),
            fmt_f64(self.mean),
            fmt_f64(self.scal)
        )
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: SpectrumFile = serde_json::from_str(text)?;
        file.spectrum()?;
        Ok(file)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileFile {
    pub n: usize,
    pub norms: Vec<f64>,
    pub weyl_norm: f64,
    pub sum_ratio: f64,
    pub max_ratio: f64,
}

impl From<&SjwProfile> for ProfileFile {
    fn from(p: &SjwProfile) -> Self {
        Self {
            n: p.n,
            norms: p.norms.clone(),
            weyl_norm: p.weyl_norm,
            sum_ratio: p.sum_ratio(),
            max_ratio: p.max_ratio(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model_spaces::{constant_curvature, fubini_study, random_einstein};

    #[test]
    fn tensor_round_trip_is_exact_on_generators() {
        let r = random_einstein(5, 2.3, 9).unwrap();
        let back = tensor_from_json(&tensor_to_json(&r)).unwrap();
        assert_eq!(canonical_entries(&r), canonical_entries(&back));
        let diff = r.add_scaled(-1.0, &back).unwrap().tensor().max_abs();
        assert!(diff <= 1e-15 * r.tensor().max_abs());
    }

    #[test]
    fn constant_curvature_generators() {
        let r = constant_curvature(3, 1.0).unwrap();
        let e = canonical_entries(&r);
        assert_eq!(e.len(), 3);
        assert!(e.iter().all(|x| x.i == x.k && x.j == x.l && x.v == 1.0));
    }

    #[test]
    fn empty_entries_give_flat() {
        let r = tensor_from_json(r#"{"n": 4, "entries": []}"#).unwrap();
        assert_eq!(r.norm_sq(), 0.0);
        let text = tensor_to_json(&r);
        assert_eq!(tensor_from_json(&text).unwrap(), r);
    }

    #[test]
    fn rejects_bad_tensors() {
        let dup = r#"{"n": 3, "entries": [{"i":0,"j":1,"k":0,"l":1,"v":1.0},{"i":0,"j":1,"k":0,"l":1,"v":1.0}]}"#;
        assert!(matches!(tensor_from_json(dup), Err(Error::Format(m)) if m.contains("duplicate")));
        let noncanon = r#"{"n": 3, "entries": [{"i":1,"j":0,"k":0,"l":1,"v":1.0}]}"#;
        assert!(
            matches!(tensor_from_json(noncanon), Err(Error::Format(m)) if m.contains("canonical"))
        );
        let range = r#"{"n": 3, "entries": [{"i":0,"j":3,"k":0,"l":3,"v":1.0}]}"#;
        assert!(matches!(tensor_from_json(range), Err(Error::Format(_))));
        // R_0123 alone violates the first Bianchi identity.
        let bianchi = r#"{"n": 4, "entries": [{"i":0,"j":1,"k":2,"l":3,"v":1.0}]}"#;
        assert!(matches!(
            tensor_from_json(bianchi),
            Err(Error::Symmetry { what, .. }) if what.contains("Bianchi")
        ));
        assert!(tensor_from_json("{").is_err());
    }

    #[test]
    fn spectrum_file_round_trip() {
        let r = fubini_study(2).unwrap();
        let spec = crate::second_kind::spectrum_of(&r).unwrap();
        let file = SpectrumFile::new(4, &spec, r.scalar());
        let back = SpectrumFile::from_json(&file.to_json()).unwrap();
        assert_eq!(back, file);
        assert_eq!(back.spectrum().unwrap(), spec);
        let mut bad = file.clone();
        bad.eigenvalues.pop();
        assert!(SpectrumFile::from_json(&serde_json::to_string(&bad).unwrap()).is_err());
    }
}
