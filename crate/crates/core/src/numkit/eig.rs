//! Cyclic Jacobi eigensolver for small dense symmetric matrices.
//!
//! Sweeps visit the strictly upper triangle in row order, so the result is
//! bit-reproducible for a given input.

use crate::error::{LabError, Result};

use super::mat::{Mat, SymOp};

pub const MAX_SWEEPS: usize = 64;

/// Eigenvalues in ascending order with the matching eigenvectors as columns.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: Mat,
}

impl EigenDecomposition {
    pub fn vector(&self, k: usize) -> Vec<f64> {
        self.vectors.column(k)
    }

    /// `V Λ Vᵀ`
    pub fn reconstruct(&self) -> Mat {
        let n = self.values.len();
        let v = &self.vectors;
        Mat::from_fn(n, |i, j| {
            (0..n).map(|k| v[(i, k)] * self.values[k] * v[(j, k)]).sum()
        })
    }
}

fn off_diagonal_norm(a: &Mat) -> f64 {
    let n = a.dim();
    let mut s = 0.0;
    for p in 0..n {
        for q in p + 1..n {
            s += a[(p, q)] * a[(p, q)];
        }
    }
    (2.0 * s).sqrt()
}

pub fn eigh(m: &SymOp) -> Result<EigenDecomposition> {
    let n = m.dim();
    let mut a = m.mat().clone();
    let mut v = Mat::identity(n);
    let scale = a.frobenius();
    let target = f64::EPSILON * 0.25 * scale;

    let mut converged = false;
    for _sweep in 0..MAX_SWEEPS {
        let off = off_diagonal_norm(&a);
        if off <= target {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let (app, aqq) = (a[(p, p)], a[(q, q)]);
                // negligible against both diagonal entries: drop it
                if apq.abs() * 1e18 < app.abs() && apq.abs() * 1e18 < aqq.abs() {
                    a[(p, q)] = 0.0;
                    a[(q, p)] = 0.0;
                    continue;
                }
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for k in 0..n {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    if !converged {
        let off = off_diagonal_norm(&a);
        if !(off <= target) {
            return Err(LabError::NotConverged {
                sweeps: MAX_SWEEPS,
                off_norm: off,
            });
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let vectors = Mat::from_fn(n, |r, c| v[(r, order[c])]);
    Ok(EigenDecomposition { values, vectors })
}

/// Symmetric square root and inverse square root of a positive definite operator.
pub fn spd_sqrt_pair(m: &SymOp) -> Result<(Mat, Mat)> {
    let eig = eigh(m)?;
    let n = m.dim();
    if let Some(bad) = eig.values.iter().find(|v| !(**v > 0.0)) {
        return Err(LabError::Degenerate(format!(
            "operator is not positive definite (eigenvalue {bad:e})"
        )));
    }
    let v = &eig.vectors;
    let build = |f: &dyn Fn(f64) -> f64| {
        Mat::from_fn(n, |i, j| {
            (0..n)
                .map(|k| v[(i, k)] * f(eig.values[k]) * v[(j, k)])
                .sum()
        })
    };
    Ok((build(&|x| x.sqrt()), build(&|x| 1.0 / x.sqrt())))
}
