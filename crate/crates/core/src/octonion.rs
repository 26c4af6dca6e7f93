//! Octonions and bioctonions over a multiplication table generated by the
//! Cayley–Dickson doubling `(a,b)(c,d) = (ac − d*b, da + bc*)`, starting from
//! the reals. Flattening the pairs gives the basis `1, e₁, …, e₇` with
//! `e₃ = e₁e₂`, `e₄ = (0,1)`, `e₅ = e₁e₄`, `e₆ = e₂e₄`, `e₇ = e₃e₄`.
//!
//! The same routine yields the complex numbers (dimension 2) and the
//! quaternions (dimension 4); the Clifford generator ladder reuses them.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::OnceLock;

use num_complex::Complex64;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{LabError, Result};
use crate::numkit::{
    dot, gram_schmidt, norm, projector, random_unit_vector, Mat, SkewOp, TolerancePolicy,
};

/// Basis product `e_i e_j = sign · e_index`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BasisProduct {
    pub sign: i8,
    pub index: usize,
}

/// Structure constants of a Cayley–Dickson algebra of dimension `2^k`.
#[derive(Clone, Debug)]
pub struct MulTable {
    dim: usize,
    entries: Vec<BasisProduct>,
}

impl MulTable {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn product(&self, i: usize, j: usize) -> BasisProduct {
        self.entries[i * self.dim + j]
    }

    /// Bilinear product of coefficient slices.
    pub fn mul<T>(&self, a: &[T], b: &[T]) -> Vec<T>
    where
        T: Copy + Zero + Add<Output = T> + Sub<Output = T> + Mul<Output = T>,
    {
        let mut out = vec![T::zero(); self.dim];
        for (i, &ai) in a.iter().enumerate() {
            for (j, &bj) in b.iter().enumerate() {
                let p = self.entries[i * self.dim + j];
                let t = ai * bj;
                out[p.index] = if p.sign > 0 {
                    out[p.index] + t
                } else {
                    out[p.index] - t
                };
            }
        }
        out
    }

    /// Matrix of `X ↦ X u`.
    pub fn right_mult_matrix(&self, u: &[f64]) -> Mat {
        let n = self.dim;
        let mut m = Mat::zeros(n);
        for j in 0..n {
            let mut ej = vec![0.0; n];
            ej[j] = 1.0;
            let col = self.mul(&ej, u);
            for i in 0..n {
                m[(i, j)] = col[i];
            }
        }
        m
    }

    /// Matrix of `X ↦ u X`.
    pub fn left_mult_matrix(&self, u: &[f64]) -> Mat {
        let n = self.dim;
        let mut m = Mat::zeros(n);
        for j in 0..n {
            let mut ej = vec![0.0; n];
            ej[j] = 1.0;
            let col = self.mul(u, &ej);
            for i in 0..n {
                m[(i, j)] = col[i];
            }
        }
        m
    }
}

fn cd_conj(a: &[f64]) -> Vec<f64> {
    let mut c: Vec<f64> = a.iter().map(|v| -v).collect();
    c[0] = a[0];
    c
}

fn cd_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let n = a.len();
    if n == 1 {
        return vec![a[0] * b[0]];
    }
    let h = n / 2;
    let (p, q) = a.split_at(h);
    let (r, s) = b.split_at(h);
    let pr = cd_mul(p, r);
    let sq = cd_mul(&cd_conj(s), q);
    let sp = cd_mul(s, p);
    let qr = cd_mul(q, &cd_conj(r));
    pr.iter()
        .zip(&sq)
        .map(|(x, y)| x - y)
        .chain(sp.iter().zip(&qr).map(|(x, y)| x + y))
        .collect()
}

/// Generates the structure constants by expanding the doubling rule on basis elements.
pub fn cayley_dickson_table(dim: usize) -> Result<MulTable> {
    if !dim.is_power_of_two() || dim > 16 {
        return Err(LabError::UnsupportedDimension(dim));
    }
    let mut entries = Vec::with_capacity(dim * dim);
    for i in 0..dim {
        for j in 0..dim {
            let mut ei = vec![0.0; dim];
            let mut ej = vec![0.0; dim];
            ei[i] = 1.0;
            ej[j] = 1.0;
            let prod = cd_mul(&ei, &ej);
            let (index, value) = prod
                .iter()
                .enumerate()
                .find(|(_, v)| **v != 0.0)
                .map(|(k, v)| (k, *v))
                .ok_or_else(|| LabError::Degenerate("zero basis product".into()))?;
            entries.push(BasisProduct {
                sign: if value > 0.0 { 1 } else { -1 },
                index,
            });
        }
    }
    Ok(MulTable { dim, entries })
}

pub fn octonion_table() -> &'static MulTable {
    static TABLE: OnceLock<MulTable> = OnceLock::new();
    TABLE.get_or_init(|| cayley_dickson_table(8).expect("dimension 8 is supported"))
}

/// Coefficient field of an octonion algebra (ℝ or ℂ).
pub trait OctScalar:
    Copy
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + From<f64>
    + std::fmt::Debug
{
    /// Modulus, for residual reporting.
    fn modulus(self) -> f64;
}

impl OctScalar for f64 {
    fn modulus(self) -> f64 {
        self.abs()
    }
}

impl OctScalar for Complex64 {
    fn modulus(self) -> f64 {
        self.norm()
    }
}

/// Element of the algebra with coefficients in `T`, basis `1, e₁, …, e₇`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Oct<T>(pub [T; 8]);

pub type Octonion = Oct<f64>;
pub type Bioctonion = Oct<Complex64>;

impl<T: OctScalar> Oct<T> {
    pub fn zero() -> Self {
        Oct([T::zero(); 8])
    }

    pub fn one() -> Self {
        Self::basis(0)
    }

    pub fn basis(i: usize) -> Self {
        let mut c = [T::zero(); 8];
        c[i] = T::one();
        Oct(c)
    }

    pub fn real_part(&self) -> T {
        self.0[0]
    }

    pub fn scale(&self, s: T) -> Self {
        Oct(self.0.map(|c| c * s))
    }

    /// `a* = 2⟨a,1⟩1 − a`
    pub fn conj(&self) -> Self {
        let mut c = self.0.map(|v| -v);
        c[0] = self.0[0];
        Oct(c)
    }

    /// Scalar part of `½(a*b + b*a)`; bilinear also over ℂ.
    pub fn inner(&self, other: &Self) -> T {
        let s = self.conj() * *other + other.conj() * *self;
        s.0[0] * T::from(0.5)
    }

    /// `Σ aᵢbᵢ` in coefficients, the same pairing computed without products.
    pub fn coeff_dot(&self, other: &Self) -> T {
        self.0
            .iter()
            .zip(&other.0)
            .fold(T::zero(), |acc, (a, b)| acc + *a * *b)
    }

    pub fn norm_sq(&self) -> T {
        self.coeff_dot(self)
    }

    /// Sup-norm of the coefficients.
    pub fn max_modulus(&self) -> f64 {
        self.0.iter().fold(0.0, |m, c| m.max(c.modulus()))
    }
}

impl Octonion {
    pub fn from_slice(v: &[f64]) -> Result<Self> {
        let arr: [f64; 8] = v
            .try_into()
            .map_err(|_| LabError::DimensionMismatch { expected: 8, got: v.len() })?;
        Ok(Oct(arr))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        norm(&self.0)
    }

    /// `a⁻¹ = ‖a‖⁻² a*`
    pub fn inverse(&self) -> Result<Self> {
        let r2 = self.norm_sq();
        if r2 == 0.0 {
            return Err(LabError::Degenerate("zero octonion has no inverse".into()));
        }
        Ok(self.conj().scale(1.0 / r2))
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Oct(std::array::from_fn(|_| rng.gen_range(-1.0..1.0)))
    }
}

impl Bioctonion {
    pub fn from_real(a: &Octonion) -> Self {
        Oct(a.0.map(|v| Complex64::new(v, 0.0)))
    }

    /// Hermitian norm `(Σ|aᵢ|²)^½` on ℂ⁸.
    pub fn hermitian_norm(&self) -> f64 {
        self.0.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Oct(std::array::from_fn(|_| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        }))
    }
}

impl<T: OctScalar> Mul for Oct<T> {
    type Output = Oct<T>;
    fn mul(self, rhs: Oct<T>) -> Oct<T> {
        let v = octonion_table().mul(&self.0, &rhs.0);
        Oct(std::array::from_fn(|i| v[i]))
    }
}

impl<T: OctScalar> Add for Oct<T> {
    type Output = Oct<T>;
    fn add(self, rhs: Oct<T>) -> Oct<T> {
        Oct(std::array::from_fn(|i| self.0[i] + rhs.0[i]))
    }
}

impl<T: OctScalar> Sub for Oct<T> {
    type Output = Oct<T>;
    fn sub(self, rhs: Oct<T>) -> Oct<T> {
        Oct(std::array::from_fn(|i| self.0[i] - rhs.0[i]))
    }
}

impl<T: OctScalar> Neg for Oct<T> {
    type Output = Oct<T>;
    fn neg(self) -> Oct<T> {
        Oct(self.0.map(|v| -v))
    }
}

/// The 8×8 matrix of `X ↦ X u` for an imaginary octonion `u`.
pub fn right_mult_operator(u: &Octonion) -> Result<SkewOp> {
    if u.0[0].abs() > 1e-14 * u.norm().max(1.0) {
        return Err(LabError::InvalidArgument(format!(
            "right multiplication operator needs an imaginary octonion, real part is {}",
            u.0[0]
        )));
    }
    let mut imag = u.0;
    imag[0] = 0.0;
    Ok(SkewOp::new(&octonion_table().right_mult_matrix(&imag)))
}

/// The seven operators `X ↦ X eᵢ`.
pub fn right_mult_generators() -> Vec<SkewOp> {
    (1..8)
        .map(|i| right_mult_operator(&Octonion::basis(i)).expect("basis units are imaginary"))
        .collect()
}

/// Sign `σ` with `J₁J₂…J₇ = σ·I₈` for the basis right multiplications.
pub fn generator_product_sign() -> Result<i8> {
    let gens = right_mult_generators();
    let prod = gens
        .iter()
        .skip(1)
        .fold(gens[0].mat().clone(), |acc, j| acc.matmul(j.mat()));
    let id = Mat::identity(8);
    if prod.max_abs_diff(&id) < 1e-12 {
        Ok(1)
    } else if prod.max_abs_diff(&id.scale(-1.0)) < 1e-12 {
        Ok(-1)
    } else {
        Err(LabError::VerificationFailed(
            "product of the seven generators is not ±I".into(),
        ))
    }
}

fn basis_label(i: usize) -> String {
    if i == 0 {
        "1".to_string()
    } else {
        format!("e{i}")
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TableDump {
    pub basis: Vec<String>,
    /// `products[i][j]` is the signed basis element `eᵢeⱼ`.
    pub products: Vec<Vec<String>>,
}

pub fn table_dump() -> TableDump {
    let t = octonion_table();
    let products = (0..8)
        .map(|i| {
            (0..8)
                .map(|j| {
                    let p = t.product(i, j);
                    let s = if p.sign < 0 { "-" } else { "" };
                    format!("{s}{}", basis_label(p.index))
                })
                .collect()
        })
        .collect();
    TableDump {
        basis: (0..8).map(basis_label).collect(),
        products,
    }
}

/// Maximum residual per identity over the random trials.
#[derive(Clone, Debug, Serialize)]
pub struct IdentityReport {
    pub trials: usize,
    pub residuals: BTreeMap<String, f64>,
    pub max_residual: f64,
}

fn record(map: &mut BTreeMap<String, f64>, key: &str, value: f64) {
    let e = map.entry(key.to_string()).or_insert(0.0);
    if value > *e || value.is_nan() {
        *e = value;
    }
}

fn polynomial_identities<T: OctScalar>(
    a: Oct<T>,
    b: Oct<T>,
    c: Oct<T>,
    res: &mut BTreeMap<String, f64>,
) {
    let one = Oct::<T>::one();
    let two = T::from(2.0);
    let ip = |x: &Oct<T>, y: &Oct<T>| x.coeff_dot(y);
    let m = |x: T, y: T| (x - y).modulus();

    record(
        res,
        "conj_formula",
        (a.conj() - (one.scale(two * ip(&a, &one)) - a)).max_modulus(),
    );
    record(res, "inner_conj_invariant", m(ip(&a, &b), ip(&a.conj(), &b.conj())));
    let half_sym = (a.conj() * b + b.conj() * a).scale(T::from(0.5));
    record(res, "inner_polarization", (half_sym - one.scale(ip(&a, &b))).max_modulus());
    record(res, "left_alternative", (a * (a * b) - (a * a) * b).max_modulus());
    record(res, "inner_shift_left", m(ip(&a, &(b * c)), ip(&(b.conj() * a), &c)));
    record(res, "inner_shift_right", m(ip(&a, &(b * c)), ip(&(a * c.conj()), &b)));
    let lhs = (a * b.conj()) * c + (a * c.conj()) * b;
    record(res, "conj_linearization", (lhs - a.scale(two * ip(&b, &c))).max_modulus());
    let nb = ip(&a, &a) * ip(&b, &c);
    record(res, "left_isometry", m(ip(&(a * b), &(a * c)), nb));
    record(res, "right_isometry", m(ip(&(b * a), &(c * a)), nb));
}

/// Runs the octonion identity suite over `trials` random triples.
pub fn identity_suite(trials: usize, seed: u64) -> IdentityReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut res = BTreeMap::new();
    for _ in 0..trials {
        let (a, b, c) = (
            Octonion::random(&mut rng),
            Octonion::random(&mut rng),
            Octonion::random(&mut rng),
        );
        polynomial_identities(a, b, c, &mut res);
        record(&mut res, "norm_multiplicative", ((a * b).norm() - a.norm() * b.norm()).abs());
        if let Ok(inv) = a.inverse() {
            let one = Octonion::one();
            let r = (inv * a - one).max_modulus().max((a * inv - one).max_modulus());
            record(&mut res, "inverse", r);
        }
    }
    let max_residual = res.values().cloned().fold(0.0, f64::max);
    IdentityReport {
        trials,
        residuals: res,
        max_residual,
    }
}

/// The same polynomial identities for bioctonions.
pub fn bioctonion_identity_suite(trials: usize, seed: u64) -> IdentityReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut res = BTreeMap::new();
    for _ in 0..trials {
        let (a, b, c) = (
            Bioctonion::random(&mut rng),
            Bioctonion::random(&mut rng),
            Bioctonion::random(&mut rng),
        );
        polynomial_identities(a, b, c, &mut res);
    }
    let max_residual = res.values().cloned().fold(0.0, f64::max);
    IdentityReport {
        trials,
        residuals: res,
        max_residual,
    }
}

/// The pair `(i·1 + e₁, i·1 − e₁)`.
pub fn zero_divisor_pair() -> (Bioctonion, Bioctonion) {
    let i = Complex64::new(0.0, 1.0);
    let one = Bioctonion::one().scale(i);
    let e1 = Bioctonion::basis(1);
    (one + e1, one - e1)
}

/// Subspace of ℝ⁸ given by an orthonormal basis.
#[derive(Clone, Debug, PartialEq)]
pub struct Subspace {
    basis: Vec<Vec<f64>>,
}

impl Subspace {
    /// Orthonormalizes a spanning family; fails if it is dependent.
    pub fn span(vectors: &[Vec<f64>]) -> Result<Self> {
        gram_schmidt(vectors, 1e-10)
            .map(|basis| Subspace { basis })
            .ok_or_else(|| LabError::Degenerate("spanning vectors are linearly dependent".into()))
    }

    pub fn basis(&self) -> &[Vec<f64>] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn projector(&self) -> Mat {
        projector(&self.basis, 8)
    }

    /// Distance from `v` to the subspace.
    pub fn distance(&self, v: &[f64]) -> f64 {
        let mut r = v.to_vec();
        for b in &self.basis {
            let c = dot(b, v);
            for (ri, bi) in r.iter_mut().zip(b) {
                *ri -= c * bi;
            }
        }
        norm(&r)
    }

    /// Frobenius distance between orthogonal projectors.
    pub fn projector_distance(&self, other: &Subspace) -> f64 {
        (&self.projector() - &other.projector()).frobenius()
    }

    pub fn orthogonal_complement(&self) -> Subspace {
        let p = self.projector();
        let mut cands: Vec<Vec<f64>> = Vec::new();
        for i in 0..8 {
            let mut e = vec![0.0; 8];
            e[i] = 1.0;
            let pe = p.apply(&e);
            cands.push(e.iter().zip(&pe).map(|(a, b)| a - b).collect());
        }
        // greedy selection of the 8 − dim most independent residuals
        let mut basis: Vec<Vec<f64>> = Vec::new();
        for c in cands {
            if basis.len() + self.dim() == 8 {
                break;
            }
            let mut trial = basis.clone();
            trial.push(c);
            if let Some(q) = gram_schmidt(&trial, 1e-6) {
                basis = q;
            }
        }
        Subspace { basis }
    }

    /// Random unit vector inside the subspace.
    pub fn random_unit<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let w = random_unit_vector(rng, self.dim());
        let mut v = vec![0.0; 8];
        for (c, b) in w.iter().zip(&self.basis) {
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi += c * bi;
            }
        }
        v
    }
}

/// Closure check: `X(Y*Z) ∈ P` for all triples of basis vectors.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct CayleyCheck {
    pub is_cayley: bool,
    pub residual: f64,
}

fn triple(x: &[f64], y: &[f64], z: &[f64]) -> Octonion {
    let (x, y, z) = (
        Octonion::from_slice(x).expect("length 8"),
        Octonion::from_slice(y).expect("length 8"),
        Octonion::from_slice(z).expect("length 8"),
    );
    x * (y.conj() * z)
}

pub fn is_cayley_plane(p: &Subspace, policy: &TolerancePolicy) -> CayleyCheck {
    if p.dim() != 4 {
        return CayleyCheck {
            is_cayley: false,
            residual: f64::INFINITY,
        };
    }
    let b = p.basis();
    let mut residual: f64 = 0.0;
    for x in b {
        for y in b {
            for z in b {
                residual = residual.max(p.distance(&triple(x, y, z).0));
            }
        }
    }
    CayleyCheck {
        is_cayley: residual < policy.identity_tol,
        residual,
    }
}

/// Largest closure defect over random unit triples from `p`.
pub fn random_triple_closure_defect(p: &Subspace, trials: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..trials)
        .map(|_| {
            let (x, y, z) = (p.random_unit(&mut rng), p.random_unit(&mut rng), p.random_unit(&mut rng));
            p.distance(&triple(&x, &y, &z).0)
        })
        .fold(0.0, f64::max)
}

/// A 4-dimensional subspace of 𝕆 closed under `X(Y*Z)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CayleyPlane(Subspace);

impl CayleyPlane {
    /// Wraps a subspace after checking closure.
    pub fn new(p: Subspace, policy: &TolerancePolicy) -> Result<Self> {
        let check = is_cayley_plane(&p, policy);
        if check.is_cayley {
            Ok(CayleyPlane(p))
        } else {
            Err(LabError::VerificationFailed(format!(
                "subspace is not a Cayley plane (closure residual {:e})",
                check.residual
            )))
        }
    }

    pub fn subspace(&self) -> &Subspace {
        &self.0
    }
}

/// `Span(e, eu, ev, (eu)v)` for imaginary orthonormal `u, v`.
pub fn cayley_plane_span(
    e: &Octonion,
    u: &Octonion,
    v: &Octonion,
    policy: &TolerancePolicy,
) -> Result<CayleyPlane> {
    let tol = 1e-12;
    if e.norm() == 0.0 {
        return Err(LabError::InvalidArgument("e must be nonzero".into()));
    }
    if u.0[0].abs() > tol || v.0[0].abs() > tol {
        return Err(LabError::InvalidArgument("u and v must be imaginary".into()));
    }
    if (u.norm() - 1.0).abs() > 1e-10 || (v.norm() - 1.0).abs() > 1e-10 || dot(&u.0, &v.0).abs() > 1e-10 {
        return Err(LabError::InvalidArgument("u and v must be orthonormal".into()));
    }
    let eu = *e * *u;
    let ev = *e * *v;
    let euv = eu * *v;
    let p = Subspace::span(&[e.0.to_vec(), eu.0.to_vec(), ev.0.to_vec(), euv.0.to_vec()])?;
    CayleyPlane::new(p, policy)
}

/// `X*P` for a nonzero `X ∈ P`, checked to be the same subspace for five
/// further random `X ∈ P`.
pub fn cayley_product_space(p: &CayleyPlane, seed: u64, policy: &TolerancePolicy) -> Result<Subspace> {
    let sub = p.subspace();
    let star_times = |x: &[f64]| -> Result<Subspace> {
        let xs = Octonion::from_slice(x)?.conj();
        let imgs: Vec<Vec<f64>> = sub
            .basis()
            .iter()
            .map(|y| (xs * Octonion::from_slice(y).expect("length 8")).0.to_vec())
            .collect();
        Subspace::span(&imgs)
    };
    let reference = star_times(&sub.basis()[0])?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..5 {
        let x = sub.random_unit(&mut rng);
        let d = reference.projector_distance(&star_times(&x)?);
        if !(d < policy.identity_tol) {
            return Err(LabError::VerificationFailed(format!(
                "X*P depends on X (projector deviation {d:e})"
            )));
        }
    }
    Ok(reference)
}
