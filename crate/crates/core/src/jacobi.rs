//! Cyclic Jacobi eigensolver for dense real symmetric matrices.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Relative off-diagonal Frobenius threshold at which sweeps stop.
pub const OFF_DIAGONAL_TOL: f64 = 1e-13;
const MAX_SWEEPS: usize = 100;

#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    /// Ascending; ties keep the order in which the solver produced them.
    pub values: Vec<f64>,
    /// Column `j` is the unit eigenvector for `values[j]`.
    pub vectors: DMatrix<f64>,
    pub sweeps: usize,
}

pub fn asymmetry(m: &DMatrix<f64>) -> f64 {
    let mut res = 0.0_f64;
    for i in 0..m.nrows() {
        for j in 0..i {
            res = res.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    res
}

fn off_diagonal_norm(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)] * a[(i, j)];
            }
        }
    }
    s.sqrt()
}

/// Eigen-decomposition of a symmetric matrix; fails if `m` is not square or
/// its asymmetry exceeds `sym_tol · max(1, ‖m‖_F)`.
pub fn symmetric_eigen(m: &DMatrix<f64>, sym_tol: f64) -> Result<SymmetricEigen> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::Shape(format!(
            "eigensolver needs a square matrix, got {}x{}",
            n,
            m.ncols()
        )));
    }
    let norm = m.norm();
    let asym = asymmetry(m);
    if asym > sym_tol * norm.max(1.0) {
        return Err(Error::Precondition(format!(
            "matrix is not symmetric (max asymmetry {asym:e})"
        )));
    }
    let mut a = DMatrix::from_fn(n, n, |i, j| 0.5 * (m[(i, j)] + m[(j, i)]));
    let mut v = DMatrix::<f64>::identity(n, n);
    let target = OFF_DIAGONAL_TOL * norm;

    let mut sweeps = 0;
    while off_diagonal_norm(&a) > target {
        if sweeps == MAX_SWEEPS {
            return Err(Error::Domain(format!(
                "Jacobi did not converge in {MAX_SWEEPS} sweeps"
            )));
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                a[(p, p)] -= t * apq;
                a[(q, q)] += t * apq;
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for r in 0..n {
                    if r == p || r == q {
                        continue;
                    }
                    let arp = a[(r, p)];
                    let arq = a[(r, q)];
                    let new_p = c * arp - s * arq;
                    let new_q = s * arp + c * arq;
                    a[(r, p)] = new_p;
                    a[(p, r)] = new_p;
                    a[(r, q)] = new_q;
                    a[(q, r)] = new_q;
                }
                for r in 0..n {
                    let vrp = v[(r, p)];
                    let vrq = v[(r, q)];
                    v[(r, p)] = c * vrp - s * vrq;
                    v[(r, q)] = s * vrp + c * vrq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(SymmetricEigen {
        values,
        vectors,
        sweeps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_input_is_sorted() {
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![3.0, 1.0, 2.0]));
        let e = symmetric_eigen(&m, 1e-12).unwrap();
        assert_eq!(e.values, vec![1.0, 2.0, 3.0]);
        assert_eq!(e.sweeps, 0);
    }

    #[test]
    fn residuals_and_orthogonality() {
        let n = 12;
        let m = DMatrix::from_fn(n, n, |i, j| {
            let (a, b) = (i.min(j) as f64, i.max(j) as f64);
            (a * 0.37 + b * 1.11).sin() + if i == j { 0.5 * a } else { 0.0 }
        });
        let e = symmetric_eigen(&m, 1e-12).unwrap();
        for j in 0..n {
            let col = e.vectors.column(j);
            let r = &m * col - col * e.values[j];
            assert!(r.norm() <= 1e-9 * m.norm());
        }
        let vtv = e.vectors.transpose() * &e.vectors;
        assert!((vtv - DMatrix::<f64>::identity(n, n)).norm() < 1e-12);
        let tr: f64 = m.diagonal().iter().sum();
        assert!((e.values.iter().sum::<f64>() - tr).abs() <= 1e-10 * tr.abs().max(1.0));
    }

    #[test]
    fn matches_nalgebra() {
        let n = 9;
        let m = DMatrix::from_fn(n, n, |i, j| {
            ((i * j) as f64 * 0.3).cos() + (i + j) as f64 * 0.1
        });
        let ours = symmetric_eigen(&m, 1e-12).unwrap().values;
        let mut theirs: Vec<f64> = m
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .collect();
        theirs.sort_by(f64::total_cmp);
        for (a, b) in ours.iter().zip(&theirs) {
            assert!((a - b).abs() < 1e-11);
        }
    }

    #[test]
    fn rejects_asymmetric() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 1.0]);
        assert!(matches!(
            symmetric_eigen(&m, 1e-12),
            Err(Error::Precondition(_))
        ));
        let r = DMatrix::<f64>::zeros(2, 3);
        assert!(matches!(symmetric_eigen(&r, 1e-12), Err(Error::Shape(_))));
    }
}
