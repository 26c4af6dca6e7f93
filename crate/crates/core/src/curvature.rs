//! Algebraic curvature tensors `R_ijkl = ⟨R(eᵢ,eⱼ)eₖ, e_l⟩` on ℝⁿ with the
//! identity metric: Clifford-type constructions, Jacobi operators, the
//! Osserman check and the Ricci/Weyl decomposition.
//!
//! Sign convention: `R(X,Y)Z = λ₀(⟨X,Z⟩Y − ⟨Y,Z⟩X) + …`, so `λ₀ > 0` with
//! `ν = 0` is the round sphere and `Ric = (n−1)λ₀·I`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::clifford::CliffordSystem;
use crate::error::{LabError, Result};
use crate::numkit::{basis_vector, eigh, norm, random_unit_vector, scaled, Mat, Spectrum, SymOp, TolerancePolicy};

/// Dense rank-4 tensor, index `((i·n + j)·n + k)·n + l`.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvTensor {
    n: usize,
    data: Vec<f64>,
}

/// Largest violation of each curvature symmetry.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SymmetryResiduals {
    pub antisym_first: f64,
    pub antisym_second: f64,
    pub pair_exchange: f64,
    pub bianchi: f64,
}

impl SymmetryResiduals {
    pub fn max(&self) -> f64 {
        self.antisym_first
            .max(self.antisym_second)
            .max(self.pair_exchange)
            .max(self.bianchi)
    }
}

impl CurvTensor {
    pub fn zeros(n: usize) -> Self {
        CurvTensor { n, data: vec![0.0; n * n * n * n] }
    }

    /// Components taken as given, without projection. Used by constructions
    /// whose symmetries are to be measured rather than imposed.
    pub fn raw(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n * n * n {
            return Err(LabError::DimensionMismatch { expected: n * n * n * n, got: data.len() });
        }
        Ok(CurvTensor { n, data })
    }

    /// Arbitrary components projected onto the space of algebraic curvature tensors.
    pub fn new(n: usize, data: Vec<f64>) -> Result<Self> {
        Ok(Self::raw(n, data)?.symmetrized())
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize, usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(n * n * n * n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        data.push(f(i, j, k, l));
                    }
                }
            }
        }
        CurvTensor { n, data }
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

    #[inline]
    pub fn idx(&self, i: usize, j: usize, k: usize, l: usize) -> usize {
        ((i * self.n + j) * self.n + k) * self.n + l
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.data[self.idx(i, j, k, l)]
    }

    /// Antisymmetrizes both pairs, symmetrizes under pair exchange and removes
    /// the totally antisymmetric (first Bianchi) part.
    pub fn symmetrized(&self) -> CurvTensor {
        let a = CurvTensor::from_fn(self.n, |i, j, k, l| {
            0.25 * (self.get(i, j, k, l) - self.get(j, i, k, l) - self.get(i, j, l, k) + self.get(j, i, l, k))
        });
        let s = CurvTensor::from_fn(self.n, |i, j, k, l| 0.5 * (a.get(i, j, k, l) + a.get(k, l, i, j)));
        CurvTensor::from_fn(self.n, |i, j, k, l| {
            s.get(i, j, k, l) - (s.get(i, j, k, l) + s.get(j, k, i, l) + s.get(k, i, j, l)) / 3.0
        })
    }

    pub fn symmetry_residuals(&self) -> SymmetryResiduals {
        let n = self.n;
        let mut r = SymmetryResiduals { antisym_first: 0.0, antisym_second: 0.0, pair_exchange: 0.0, bianchi: 0.0 };
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let v = self.get(i, j, k, l);
                        r.antisym_first = r.antisym_first.max((v + self.get(j, i, k, l)).abs());
                        r.antisym_second = r.antisym_second.max((v + self.get(i, j, l, k)).abs());
                        r.pair_exchange = r.pair_exchange.max((v - self.get(k, l, i, j)).abs());
                        r.bianchi = r
                            .bianchi
                            .max((v + self.get(j, k, i, l) + self.get(k, i, j, l)).abs());
                    }
                }
            }
        }
        r
    }

    fn zip_with(&self, other: &CurvTensor, f: impl Fn(f64, f64) -> f64) -> Result<CurvTensor> {
        if self.n != other.n {
            return Err(LabError::DimensionMismatch { expected: self.n, got: other.n });
        }
        Ok(CurvTensor {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(*a, *b)).collect(),
        })
    }

    pub fn add(&self, other: &CurvTensor) -> Result<CurvTensor> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &CurvTensor) -> Result<CurvTensor> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, alpha: f64) -> CurvTensor {
        CurvTensor { n: self.n, data: self.data.iter().map(|v| alpha * v).collect() }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest entrywise difference; infinite if the dimensions differ.
    pub fn max_abs_diff(&self, other: &CurvTensor) -> f64 {
        if self.n != other.n {
            return f64::INFINITY;
        }
        self.data.iter().zip(&other.data).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// `Σ R_ijkl²`.
    pub fn norm_sq(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }

    /// The operator `R(X,Y)` as a matrix acting on column vectors.
    pub fn operator(&self, x: &[f64], y: &[f64]) -> Mat {
        let n = self.n;
        let mut m = Mat::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let c = x[i] * y[j];
                if c == 0.0 {
                    continue;
                }
                for k in 0..n {
                    for l in 0..n {
                        m[(l, k)] += c * self.get(i, j, k, l);
                    }
                }
            }
        }
        m
    }

    /// `R(X,Y)Z`.
    pub fn apply(&self, x: &[f64], y: &[f64], z: &[f64]) -> Vec<f64> {
        self.operator(x, y).apply(z)
    }
}

/// `(A⊙B)_ijkl = A_ik B_jl + A_jl B_ik − A_il B_jk − A_jk B_il`.
pub fn kulkarni_nomizu(a: &Mat, b: &Mat) -> Result<CurvTensor> {
    if a.dim() != b.dim() {
        return Err(LabError::DimensionMismatch { expected: a.dim(), got: b.dim() });
    }
    Ok(CurvTensor::from_fn(a.dim(), |i, j, k, l| {
        a[(i, k)] * b[(j, l)] + a[(j, l)] * b[(i, k)] - a[(i, l)] * b[(j, k)] - a[(j, k)] * b[(i, l)]
    }))
}

/// `λ(⟨X,Z⟩Y − ⟨Y,Z⟩X)`.
pub fn constant_curvature(n: usize, lambda: f64) -> CurvTensor {
    let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    CurvTensor::from_fn(n, |i, j, k, l| lambda * (d(i, k) * d(j, l) - d(j, k) * d(i, l)))
}

/// `Σηᵢ(2⟨JᵢX,Y⟩JᵢZ + ⟨JᵢZ,Y⟩JᵢX − ⟨JᵢZ,X⟩JᵢY)`.
pub fn clifford_part(sys: &CliffordSystem) -> CurvTensor {
    let n = sys.n();
    // b[p][q] = ⟨J e_p, e_q⟩
    let bs: Vec<Mat> = sys.generators().iter().map(|j| j.mat().transpose()).collect();
    let eta = sys.eta();
    CurvTensor::from_fn(n, |i, j, k, l| {
        bs.iter()
            .zip(eta)
            .map(|(b, e)| {
                e * (2.0 * b[(i, j)] * b[(k, l)] + b[(k, j)] * b[(i, l)] - b[(k, i)] * b[(j, l)])
            })
            .sum()
    })
}

/// The tensor induced by a Clifford system.
pub fn from_clifford(sys: &CliffordSystem) -> CurvTensor {
    let c = constant_curvature(sys.n(), sys.lambda0());
    c.add(&clifford_part(sys)).expect("same dimension")
}

/// `⟨X,Z⟩ρY + ⟨ρX,Z⟩Y − ⟨Y,Z⟩ρX − ⟨ρY,Z⟩X` plus the Clifford part; `λ₀` is ignored.
pub fn from_confcs(rho: &SymOp, sys: &CliffordSystem) -> Result<CurvTensor> {
    if rho.dim() != sys.n() {
        return Err(LabError::DimensionMismatch { expected: sys.n(), got: rho.dim() });
    }
    kulkarni_nomizu(&Mat::identity(sys.n()), rho.mat())?.add(&clifford_part(sys))
}

/// Curvature of the rank-one model `M_{ν,ε}`: `ε(X∧Y + Σ(JᵢX∧JᵢY + 2⟨JᵢX,Y⟩Jᵢ))`.
/// `sys` supplies the structures; its constants are replaced by `λ₀ = ηᵢ = ε`.
pub fn model_tensor(sys: &CliffordSystem, eps: f64) -> Result<CurvTensor> {
    check_model(sys, eps)?;
    let s = sys.with_constants(eps, vec![eps; sys.nu()])?;
    Ok(from_clifford(&s))
}

pub(crate) fn check_model(sys: &CliffordSystem, eps: f64) -> Result<()> {
    if eps != 1.0 && eps != -1.0 {
        return Err(LabError::InvalidArgument(format!("eps must be +1 or -1, got {eps}")));
    }
    match sys.nu() {
        1 => Ok(()),
        3 => {
            let j = sys.generators();
            let p = j[0].mat().matmul(j[1].mat());
            let j3 = j[2].mat();
            let d = p.max_abs_diff(j3).min(p.max_abs_diff(&j3.scale(-1.0)));
            if d < 1e-8 {
                Ok(())
            } else {
                Err(LabError::InvalidArgument(format!(
                    "quaternionic model needs J1J2 = ±J3 (deviation {d:e})"
                )))
            }
        }
        nu => Err(LabError::InvalidArgument(format!("model spaces exist for nu in {{1, 3}}, got {nu}"))),
    }
}

/// `(R_X)_jl = Σ XᵢXₖ R_ijkl`, the operator `Y ↦ R(X,Y)X`.
pub fn jacobi(r: &CurvTensor, x: &[f64]) -> SymOp {
    let n = r.n;
    let mut m = Mat::zeros(n);
    for i in 0..n {
        for k in 0..n {
            let c = x[i] * x[k];
            if c == 0.0 {
                continue;
            }
            for j in 0..n {
                for l in 0..n {
                    m[(j, l)] += c * r.get(i, j, k, l);
                }
            }
        }
    }
    SymOp::new(&m)
}

/// `Ric_jl = Σᵢ R_ijil`.
pub fn ricci(r: &CurvTensor) -> SymOp {
    let n = r.n;
    SymOp::new(&Mat::from_fn(n, |j, l| (0..n).map(|i| r.get(i, j, i, l)).sum()))
}

pub fn scalar(r: &CurvTensor) -> f64 {
    ricci(r).trace()
}

/// `W = R − I⊙P` with the Schouten operator `P = (Ric − scal/(2(n−1))·I)/(n−2)`.
pub fn weyl(r: &CurvTensor) -> Result<CurvTensor> {
    let n = r.n;
    if n < 4 {
        return Err(LabError::UnsupportedDimension(n));
    }
    let ric = ricci(r);
    let s = ric.trace();
    let p = ric
        .sub(&SymOp::scalar(n, s / (2.0 * (n as f64 - 1.0))))
        .scale(1.0 / (n as f64 - 2.0));
    r.sub(&kulkarni_nomizu(&Mat::identity(n), p.mat())?)
}

/// `ρ = Ric/(n−2) + (λ₀/2 − scal/(2(n−1)(n−2)))·I`.
pub fn recover_rho(r: &CurvTensor, lambda0: f64) -> Result<SymOp> {
    let n = r.n;
    if n < 3 {
        return Err(LabError::UnsupportedDimension(n));
    }
    let nf = n as f64;
    let ric = ricci(r);
    let s = ric.trace();
    let shift = 0.5 * lambda0 - s / (2.0 * (nf - 1.0) * (nf - 2.0));
    Ok(ric.scale(1.0 / (nf - 2.0)).add(&SymOp::scalar(n, shift)))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OssermanReport {
    pub is_osserman: bool,
    pub reference_spectrum: Spectrum,
    pub max_spectrum_deviation: f64,
    pub samples_used: usize,
}

/// Sample directions: the basis vectors, `⌈samples/2⌉` seeded unit vectors and,
/// with a system attached, the normalized `JᵢX` of each seeded vector.
pub fn osserman_directions(n: usize, samples: usize, seed: u64, sys: Option<&CliffordSystem>) -> Vec<Vec<f64>> {
    let mut dirs: Vec<Vec<f64>> = (0..n).map(|i| basis_vector(n, i)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples.div_ceil(2) {
        let x = random_unit_vector(&mut rng, n);
        if let Some(s) = sys {
            for j in s.generators() {
                let jx = j.apply(&x);
                let r = norm(&jx);
                if r > 1e-12 {
                    dirs.push(scaled(1.0 / r, &jx));
                }
            }
        }
        dirs.push(x);
    }
    dirs
}

/// Compares sorted Jacobi eigenvalues over the sample set against the first
/// basis direction, in the sup norm.
pub fn osserman_check(
    r: &CurvTensor,
    samples: usize,
    seed: u64,
    sys: Option<&CliffordSystem>,
    policy: &TolerancePolicy,
) -> Result<OssermanReport> {
    let n = r.n;
    if samples < n {
        return Err(LabError::InvalidArgument(format!("need at least n = {n} samples, got {samples}")));
    }
    if let Some(s) = sys {
        if s.n() != n {
            return Err(LabError::DimensionMismatch { expected: n, got: s.n() });
        }
    }
    let dirs = osserman_directions(n, samples, seed, sys);
    let spectra: Vec<Vec<f64>> = dirs
        .par_iter()
        .map(|x| eigh(&jacobi(r, x)).map(|e| e.values))
        .collect::<Result<_>>()?;
    let reference = &spectra[0];
    let dev = spectra.iter().fold(0.0_f64, |m, s| {
        s.iter().zip(reference).fold(m, |m, (a, b)| {
            let d = (a - b).abs();
            if d.is_nan() { f64::INFINITY } else { m.max(d) }
        })
    });
    Ok(OssermanReport {
        is_osserman: dev < policy.cluster_tol,
        reference_spectrum: Spectrum::from_values(reference, policy.cluster_tol),
        max_spectrum_deviation: dev,
        samples_used: dirs.len(),
    })
}
