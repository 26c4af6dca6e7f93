use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn scaled(alpha: f64, x: &[f64]) -> Vec<f64> {
    x.iter().map(|v| alpha * v).collect()
}

pub fn normalized(x: &[f64]) -> Vec<f64> {
    let r = norm(x);
    scaled(1.0 / r, x)
}

pub fn basis_vector(n: usize, i: usize) -> Vec<f64> {
    let mut e = vec![0.0; n];
    e[i] = 1.0;
    e
}

/// Largest absolute difference between two slices.
pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Dense square matrix, row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mat {
    n: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(n: usize) -> Self {
        Mat {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_row_major(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(LabError::DimensionMismatch {
                expected: n * n,
                got: data.len(),
            });
        }
        Ok(Mat { n, data })
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Mat { n, data }
    }

    pub fn diag(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, v) in d.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    /// Outer product `a bᵀ`.
    pub fn outer(a: &[f64], b: &[f64]) -> Self {
        Self::from_fn(a.len(), |i, j| a[i] * b[j])
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.n).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)])
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, alpha: f64) -> Self {
        Mat {
            n: self.n,
            data: self.data.iter().map(|v| alpha * v).collect(),
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n).map(|i| dot(self.row(i), x)).collect()
    }

    /// `⟨x, M y⟩`
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        dot(x, &self.apply(y))
    }

    pub fn matmul(&self, other: &Mat) -> Mat {
        let n = self.n;
        let mut out = Mat::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                let orow = &other.data[k * n..(k + 1) * n];
                let dst = &mut out.data[i * n..(i + 1) * n];
                for (d, o) in dst.iter_mut().zip(orow) {
                    *d += a * o;
                }
            }
        }
        out
    }

    /// Commutator `AB − BA`.
    pub fn commutator(&self, other: &Mat) -> Mat {
        &self.matmul(other) - &other.matmul(self)
    }

    /// Kronecker product `A ⊗ B`.
    pub fn kron(&self, other: &Mat) -> Mat {
        let (p, q) = (self.n, other.n);
        Mat::from_fn(p * q, |r, c| self[(r / q, c / q)] * other[(r % q, c % q)])
    }

    pub fn frobenius(&self) -> f64 {
        norm(&self.data)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_abs_diff(&self, other: &Mat) -> f64 {
        max_abs_diff(&self.data, &other.data)
    }

    /// Largest deviation from exact symmetry.
    pub fn asymmetry(&self) -> f64 {
        self.max_abs_diff(&self.transpose())
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Cholesky factor `L` with `M = L Lᵀ`, or `None` if not positive definite.
    pub fn cholesky(&self) -> Option<Mat> {
        let n = self.n;
        let mut l = Mat::zeros(n);
        for j in 0..n {
            let mut d = self[(j, j)];
            for k in 0..j {
                d -= l[(j, k)] * l[(j, k)];
            }
            if !(d > 0.0) {
                return None;
            }
            let d = d.sqrt();
            l[(j, j)] = d;
            for i in j + 1..n {
                let mut s = self[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)];
                }
                l[(i, j)] = s / d;
            }
        }
        Some(l)
    }

    /// Inverse of a symmetric positive definite matrix via Cholesky.
    pub fn spd_inverse(&self) -> Option<Mat> {
        let n = self.n;
        let l = self.cholesky()?;
        let mut inv = Mat::zeros(n);
        for c in 0..n {
            // forward solve L y = e_c, back solve Lᵀ x = y
            let mut y = vec![0.0; n];
            for i in 0..n {
                let mut s = if i == c { 1.0 } else { 0.0 };
                for k in 0..i {
                    s -= l[(i, k)] * y[k];
                }
                y[i] = s / l[(i, i)];
            }
            let mut x = vec![0.0; n];
            for i in (0..n).rev() {
                let mut s = y[i];
                for k in i + 1..n {
                    s -= l[(k, i)] * x[k];
                }
                x[i] = s / l[(i, i)];
            }
            for i in 0..n {
                inv[(i, c)] = x[i];
            }
        }
        Some(inv)
    }
}

impl Index<(usize, usize)> for Mat {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

impl Add for &Mat {
    type Output = Mat;
    fn add(self, rhs: &Mat) -> Mat {
        Mat {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &Mat {
    type Output = Mat;
    fn sub(self, rhs: &Mat) -> Mat {
        Mat {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &Mat {
    type Output = Mat;
    fn mul(self, rhs: &Mat) -> Mat {
        self.matmul(rhs)
    }
}

impl Neg for &Mat {
    type Output = Mat;
    fn neg(self) -> Mat {
        self.scale(-1.0)
    }
}

/// Symmetric operator. Symmetry holds bit-exactly: construction averages `M` and `Mᵀ`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymOp(Mat);

impl SymOp {
    pub fn new(m: &Mat) -> Self {
        let n = m.dim();
        SymOp(Mat::from_fn(n, |i, j| 0.5 * (m[(i, j)] + m[(j, i)])))
    }

    pub fn zeros(n: usize) -> Self {
        SymOp(Mat::zeros(n))
    }

    pub fn identity(n: usize) -> Self {
        SymOp(Mat::identity(n))
    }

    pub fn scalar(n: usize, c: f64) -> Self {
        SymOp(Mat::identity(n).scale(c))
    }

    pub fn diag(d: &[f64]) -> Self {
        SymOp(Mat::diag(d))
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn mat(&self) -> &Mat {
        &self.0
    }

    pub fn into_mat(self) -> Mat {
        self.0
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.0.apply(x)
    }

    pub fn trace(&self) -> f64 {
        self.0.trace()
    }

    pub fn scale(&self, alpha: f64) -> SymOp {
        SymOp(self.0.scale(alpha))
    }

    pub fn add(&self, other: &SymOp) -> SymOp {
        SymOp(&self.0 + &other.0)
    }

    pub fn sub(&self, other: &SymOp) -> SymOp {
        SymOp(&self.0 - &other.0)
    }
}

impl Index<(usize, usize)> for SymOp {
    type Output = f64;
    fn index(&self, idx: (usize, usize)) -> &f64 {
        &self.0[idx]
    }
}

/// Skew-symmetric operator. Skewness holds bit-exactly: construction takes `(M − Mᵀ)/2`.
#[derive(Clone, Debug, PartialEq)]
pub struct SkewOp(Mat);

impl SkewOp {
    pub fn new(m: &Mat) -> Self {
        let n = m.dim();
        SkewOp(Mat::from_fn(n, |i, j| 0.5 * (m[(i, j)] - m[(j, i)])))
    }

    pub fn zeros(n: usize) -> Self {
        SkewOp(Mat::zeros(n))
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn mat(&self) -> &Mat {
        &self.0
    }

    pub fn into_mat(self) -> Mat {
        self.0
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.0.apply(x)
    }

    pub fn scale(&self, alpha: f64) -> SkewOp {
        SkewOp(self.0.scale(alpha))
    }

    pub fn add(&self, other: &SkewOp) -> SkewOp {
        SkewOp(&self.0 + &other.0)
    }
}

impl Index<(usize, usize)> for SkewOp {
    type Output = f64;
    fn index(&self, idx: (usize, usize)) -> &f64 {
        &self.0[idx]
    }
}

/// The operator `Z ↦ ⟨X,Z⟩Y − ⟨Y,Z⟩X`.
pub fn wedge(x: &[f64], y: &[f64]) -> Result<SkewOp> {
    if x.len() != y.len() {
        return Err(LabError::DimensionMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    let n = x.len();
    // column c is the image of e_c: x_c Y − y_c X
    Ok(SkewOp(Mat::from_fn(n, |r, c| x[c] * y[r] - y[c] * x[r])))
}

/// Orthonormalizes `vectors` in order (modified Gram–Schmidt, two passes).
/// Returns `None` as soon as a vector is dependent on its predecessors to within `tol`.
pub fn gram_schmidt(vectors: &[Vec<f64>], tol: f64) -> Option<Vec<Vec<f64>>> {
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(vectors.len());
    for v in vectors {
        let mut w = v.clone();
        for _ in 0..2 {
            for q in &out {
                let c = dot(q, &w);
                axpy(-c, q, &mut w);
            }
        }
        let r = norm(&w);
        if r <= tol * norm(v).max(1.0) {
            return None;
        }
        out.push(scaled(1.0 / r, &w));
    }
    Some(out)
}

/// Orthogonal projector onto the span of an orthonormal family.
pub fn projector(basis: &[Vec<f64>], n: usize) -> Mat {
    let mut p = Mat::zeros(n);
    for b in basis {
        for i in 0..n {
            for j in 0..n {
                p[(i, j)] += b[i] * b[j];
            }
        }
    }
    p
}
