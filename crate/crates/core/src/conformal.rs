//! Conformal calculus around the rank-one models `M_{ν,ε}`: the operator `T`,
//! the Schouten-type operator `K` built from `φ`, the deformed curvature and
//! its Weyl tensor, the Weyl-norm constant, `∇W` and the Codazzi probe.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::clifford::CliffordSystem;
use crate::curvature::{check_model, constant_curvature, kulkarni_nomizu, osserman_check, CurvTensor};
use crate::error::{LabError, Result};
use crate::numkit::{
    axpy, dot, eigh, gram_schmidt, norm, random_gaussian_vector, random_symmetric, random_unit_vector, wedge, Mat,
    SkewOp, SymOp, TolerancePolicy,
};

/// Pointwise data of `g̃ = f⟨·,·⟩` with `f = e^{2φ}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConformalData {
    f: f64,
    grad_f: Vec<f64>,
    phi_grad: Vec<f64>,
    phi_hess: SymOp,
    eps: f64,
    sys: CliffordSystem,
}

impl ConformalData {
    /// Checks `f > 0`, `∇f = 2f∇φ`, `ε = ±1` and the model constraints on `sys`.
    pub fn new(
        f: f64,
        grad_f: Vec<f64>,
        phi_grad: Vec<f64>,
        phi_hess: SymOp,
        eps: f64,
        sys: CliffordSystem,
    ) -> Result<Self> {
        let n = sys.n();
        for len in [grad_f.len(), phi_grad.len(), phi_hess.dim()] {
            if len != n {
                return Err(LabError::DimensionMismatch { expected: n, got: len });
            }
        }
        if !(f > 0.0) || !f.is_finite() {
            return Err(LabError::InvalidArgument(format!("conformal factor must be positive, got {f}")));
        }
        check_model(&sys, eps)?;
        let defect = grad_f
            .iter()
            .zip(&phi_grad)
            .fold(0.0_f64, |m, (g, p)| m.max((g - 2.0 * f * p).abs()));
        let scale = norm(&grad_f).max(f);
        if !(defect <= 1e-10 * scale) {
            return Err(LabError::InvalidArgument(format!(
                "gradF and 2f·gradPhi disagree by {defect:e}"
            )));
        }
        Ok(ConformalData { f, grad_f, phi_grad, phi_hess, eps, sys })
    }

    /// Data for `f = e^{2φ}` from the value, gradient and Hessian of `φ`.
    pub fn from_phi(phi: f64, phi_grad: Vec<f64>, phi_hess: SymOp, eps: f64, sys: CliffordSystem) -> Result<Self> {
        let f = (2.0 * phi).exp();
        let grad_f = phi_grad.iter().map(|p| 2.0 * f * p).collect();
        Self::new(f, grad_f, phi_grad, phi_hess, eps, sys)
    }

    pub fn f(&self) -> f64 {
        self.f
    }

    pub fn grad_f(&self) -> &[f64] {
        &self.grad_f
    }

    pub fn phi_grad(&self) -> &[f64] {
        &self.phi_grad
    }

    pub fn phi_hess(&self) -> &SymOp {
        &self.phi_hess
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn sys(&self) -> &CliffordSystem {
        &self.sys
    }

    pub fn k(&self) -> Result<SymOp> {
        k_from_phi(&self.phi_grad, &self.phi_hess)
    }
}

/// `T(X,Y) = Σ(JᵢX ∧ JᵢY + 2⟨JᵢX,Y⟩Jᵢ)`.
pub fn t_op(sys: &CliffordSystem, x: &[f64], y: &[f64]) -> Result<SkewOp> {
    let n = sys.n();
    if x.len() != n || y.len() != n {
        return Err(LabError::DimensionMismatch { expected: n, got: x.len().min(y.len()) });
    }
    let mut acc = Mat::zeros(n);
    for j in sys.generators() {
        let (jx, jy) = (j.apply(x), j.apply(y));
        acc = &acc + wedge(&jx, &jy)?.mat();
        acc = &acc + &j.mat().scale(2.0 * dot(&jx, y));
    }
    Ok(SkewOp::new(&acc))
}

/// Components of `T` as a curvature tensor.
pub fn t_tensor(sys: &CliffordSystem) -> Result<CurvTensor> {
    let s = sys.with_constants(0.0, vec![1.0; sys.nu()])?;
    Ok(crate::curvature::clifford_part(&s))
}

/// `K = H(φ) − ∇φ⊗∇φ + ½‖∇φ‖²·I`.
pub fn k_from_phi(phi_grad: &[f64], phi_hess: &SymOp) -> Result<SymOp> {
    let n = phi_hess.dim();
    if phi_grad.len() != n {
        return Err(LabError::DimensionMismatch { expected: n, got: phi_grad.len() });
    }
    let g2 = dot(phi_grad, phi_grad);
    let m = Mat::from_fn(n, |i, j| {
        phi_hess[(i, j)] - phi_grad[i] * phi_grad[j] + if i == j { 0.5 * g2 } else { 0.0 }
    });
    Ok(SymOp::new(&m))
}

/// `R(X,Y) = (X∧KY + KX∧Y) + εf(X∧Y + T(X,Y))`.
pub fn conformal_curvature(data: &ConformalData, k: &SymOp) -> Result<CurvTensor> {
    let n = data.sys.n();
    if k.dim() != n {
        return Err(LabError::DimensionMismatch { expected: n, got: k.dim() });
    }
    let model = constant_curvature(n, 1.0).add(&t_tensor(&data.sys)?)?;
    kulkarni_nomizu(&Mat::identity(n), k.mat())?.add(&model.scale(data.eps * data.f))
}

/// `W_{ν,ε} = εf(−3ν/(n−1)·X∧Y + T(X,Y))`.
pub fn model_weyl(sys: &CliffordSystem, eps: f64, f: f64) -> Result<CurvTensor> {
    check_model(sys, eps)?;
    let n = sys.n();
    let c = -3.0 * sys.nu() as f64 / (n as f64 - 1.0);
    Ok(constant_curvature(n, c).add(&t_tensor(sys)?)?.scale(eps * f))
}

/// `‖W‖² = Σ W_ijkl²`; with this convention the model tensors satisfy
/// `‖W‖² = C_{νn} f²` exactly.
pub fn weyl_norm_sq(w: &CurvTensor) -> f64 {
    w.norm_sq()
}

/// `C_{νn} = 6νn(n+2)(n−ν−1)/(n−1)`.
pub fn c_const(nu: usize, n: usize) -> f64 {
    let (nu, n) = (nu as f64, n as f64);
    6.0 * nu * n * (n + 2.0) * (n - nu - 1.0) / (n - 1.0)
}

/// `(∇_Z W)(X,Y)` as an operator.
pub fn cov_deriv_operator(data: &ConformalData, z: &[f64], x: &[f64], y: &[f64]) -> Result<Mat> {
    let sys = &data.sys;
    let n = sys.n();
    let eps = data.eps;
    let a = wedge(&data.grad_f, z)?;
    let zf = dot(&data.grad_f, z);
    let txy = t_op(sys, x, y)?;
    let c = -3.0 * sys.nu() as f64 / (n as f64 - 1.0);
    let first = &wedge(x, y)?.mat().scale(c) + txy.mat();
    let comm = txy.mat().commutator(a.mat());
    let tax = t_op(sys, &a.apply(x), y)?;
    let tay = t_op(sys, x, &a.apply(y))?;
    let second = &(&comm + tax.mat()) + tay.mat();
    Ok(&first.scale(eps * zf) + &second.scale(0.5 * eps))
}

/// Components `⟨(∇_Z W)(eᵢ,eⱼ)eₖ, e_l⟩`.
pub fn weyl_cov_deriv(data: &ConformalData, z: &[f64]) -> Result<CurvTensor> {
    let n = data.sys.n();
    if z.len() != n {
        return Err(LabError::DimensionMismatch { expected: n, got: z.len() });
    }
    let mut out = vec![0.0; n * n * n * n];
    for i in 0..n {
        for j in 0..n {
            let mut ei = vec![0.0; n];
            let mut ej = vec![0.0; n];
            ei[i] = 1.0;
            ej[j] = 1.0;
            let m = cov_deriv_operator(data, z, &ei, &ej)?;
            for k in 0..n {
                for l in 0..n {
                    out[((i * n + j) * n + k) * n + l] = m[(l, k)];
                }
            }
        }
    }
    CurvTensor::raw(n, out)
}

/// `θ(Y,Z) = Σⱼ ⟨(∇_{Eⱼ}W)(Eⱼ,Y)Y, Z⟩` over the standard frame.
pub fn theta(data: &ConformalData, y: &[f64], z: &[f64]) -> Result<f64> {
    let n = data.sys.n();
    let mut total = 0.0;
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        let m = cov_deriv_operator(data, &e, &e, y)?;
        total += dot(&m.apply(y), z);
    }
    Ok(total)
}

/// `−3εν(n−3)/(2(n−1))·⟨∇f,Z⟩`, valid for unit `Y ⊥ Z, JᵢZ`.
pub fn theta_closed_form(data: &ConformalData, z: &[f64]) -> f64 {
    let n = data.sys.n() as f64;
    let nu = data.sys.nu() as f64;
    -3.0 * data.eps * nu * (n - 3.0) / (2.0 * (n - 1.0)) * dot(&data.grad_f, z)
}

/// Unit vector orthogonal to `Z` and every `JᵢZ`, projected from `seed_vec`.
pub fn orthogonal_to_orbit(sys: &CliffordSystem, z: &[f64], seed_vec: &[f64]) -> Result<Vec<f64>> {
    let mut span = vec![z.to_vec()];
    span.extend(sys.generators().iter().map(|j| j.apply(z)));
    let q = gram_schmidt(&span, 1e-10)
        .ok_or_else(|| LabError::Degenerate("Z and its J-orbit are dependent".into()))?;
    let mut y = seed_vec.to_vec();
    for _ in 0..2 {
        for b in &q {
            axpy(-dot(b, &y), b, &mut y);
        }
    }
    let r = norm(&y);
    if r < 1e-8 {
        return Err(LabError::Degenerate("seed vector lies in the J-orbit of Z".into()));
    }
    Ok(y.iter().map(|v| v / r).collect())
}

/// `Σηᵢ(2⟨JᵢX,Y⟩JᵢZ + ⟨JᵢZ,Y⟩JᵢX − ⟨JᵢZ,X⟩JᵢY)`.
pub fn codazzi_term(sys: &CliffordSystem, x: &[f64], y: &[f64], z: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; sys.n()];
    for (j, eta) in sys.generators().iter().zip(sys.eta()) {
        let (jx, jy, jz) = (j.apply(x), j.apply(y), j.apply(z));
        axpy(eta * 2.0 * dot(&jx, y), &jz, &mut out);
        axpy(eta * dot(&jz, y), &jx, &mut out);
        axpy(-eta * dot(&jz, x), &jy, &mut out);
    }
    out
}

/// Orthonormal bases of the eigenspaces of `ρ`, clustered with `cluster_tol`.
pub fn eigenspaces(rho: &SymOp, policy: &TolerancePolicy) -> Result<Vec<Vec<Vec<f64>>>> {
    let eig = eigh(rho)?;
    let mut spaces: Vec<Vec<Vec<f64>>> = Vec::new();
    let mut last: Option<f64> = None;
    for (k, v) in eig.values.iter().enumerate() {
        match last {
            Some(prev) if v - prev <= policy.cluster_tol => {
                spaces.last_mut().expect("open cluster").push(eig.vector(k))
            }
            _ => spaces.push(vec![eig.vector(k)]),
        }
        last = Some(*v);
    }
    Ok(spaces)
}

/// Largest norm of the Codazzi term over triples `X ∈ E_β`, `Y ∈ E_γ`,
/// `Z ∈ E_α` with `α ∉ {β, γ}`. Each eigenspace contributes its eigenbasis
/// and, when of dimension ≥ 2, `samples` seeded unit vectors.
pub fn codazzi_residual(
    rho: &SymOp,
    sys: &CliffordSystem,
    samples: usize,
    seed: u64,
    policy: &TolerancePolicy,
) -> Result<f64> {
    if sys.nu() == 0 {
        return Err(LabError::InvalidArgument("codazzi residual needs nu >= 1".into()));
    }
    if rho.dim() != sys.n() {
        return Err(LabError::DimensionMismatch { expected: sys.n(), got: rho.dim() });
    }
    let spaces = eigenspaces(rho, policy)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = sys.n();
    let candidates: Vec<Vec<Vec<f64>>> = spaces
        .iter()
        .map(|basis| {
            let mut c = basis.clone();
            if basis.len() >= 2 {
                for _ in 0..samples {
                    let w = random_unit_vector(&mut rng, basis.len());
                    let mut v = vec![0.0; n];
                    for (coef, b) in w.iter().zip(basis) {
                        axpy(*coef, b, &mut v);
                    }
                    c.push(v);
                }
            }
            c
        })
        .collect();
    let mut worst: f64 = 0.0;
    for (alpha, zs) in candidates.iter().enumerate() {
        for (beta, xs) in candidates.iter().enumerate() {
            if beta == alpha {
                continue;
            }
            for (gamma, ys) in candidates.iter().enumerate() {
                if gamma == alpha {
                    continue;
                }
                for z in zs {
                    for x in xs {
                        for y in ys {
                            worst = worst.max(norm(&codazzi_term(sys, x, y, z)));
                        }
                    }
                }
            }
        }
    }
    Ok(worst)
}

/// Residuals of the conformal invariants for one model `(ν, n, ε)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConformalReport {
    pub nu: usize,
    pub n: usize,
    pub eps: f64,
    pub seed: u64,
    pub residuals: BTreeMap<String, f64>,
    /// Smallest Codazzi residual over non-scalar `ρ`; rigidity needs it bounded away from 0.
    pub codazzi_nonscalar_min: f64,
    pub passed: bool,
}

/// Thresholds used by [`conformal_verify`], keyed like the residuals.
pub const CONFORMAL_THRESHOLDS: [(&str, f64); 8] = [
    ("codazzi_scalar", 1e-12),
    ("cov_deriv_operator_skew", 1e-10),
    ("cov_deriv_xy_antisymmetry", 1e-10),
    ("model_weyl_osserman_deviation", 1e-10),
    ("theta_closed_form", 1e-10),
    ("weyl_invariance", 1e-10),
    ("weyl_norm_relative", 1e-9),
    ("weyl_spectrum_scaling", 1e-10),
];

/// Seeded sweep over the invariants of the conformal calculus.
pub fn conformal_verify(nu: usize, n: usize, eps: f64, seed: u64, policy: &TolerancePolicy) -> Result<ConformalReport> {
    let eta = vec![eps; nu];
    let sys = crate::clifford::generate(n, nu, eps, &eta, Some(seed))?;
    check_model(&sys, eps)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let draw = |rng: &mut ChaCha8Rng| -> Result<ConformalData> {
        let f = rng.gen_range(0.2..3.0);
        let grad_f = random_gaussian_vector(rng, n);
        let phi_grad = grad_f.iter().map(|g| g / (2.0 * f)).collect();
        ConformalData::new(f, grad_f, phi_grad, random_symmetric(rng, n), eps, sys.clone())
    };
    let mut res = BTreeMap::new();

    let mut inv: f64 = 0.0;
    for _ in 0..50 {
        let data = draw(&mut rng)?;
        let k = random_symmetric(&mut rng, n);
        let w = crate::curvature::weyl(&conformal_curvature(&data, &k)?)?;
        inv = inv.max(w.max_abs_diff(&model_weyl(&sys, eps, data.f())?));
    }
    res.insert("weyl_invariance".to_string(), inv);

    let f = rng.gen_range(0.2..3.0);
    let w1 = model_weyl(&sys, eps, 1.0)?;
    let wf = model_weyl(&sys, eps, f)?;
    let c = c_const(nu, n);
    res.insert("weyl_norm_relative".to_string(), ((weyl_norm_sq(&wf) / (f * f) - c) / c).abs());
    let o1 = osserman_check(&w1, 4 * n, rng.gen(), Some(&sys), policy)?;
    let of = osserman_check(&wf, 4 * n, rng.gen(), Some(&sys), policy)?;
    res.insert("model_weyl_osserman_deviation".to_string(), o1.max_spectrum_deviation.max(of.max_spectrum_deviation));
    let scaled: Vec<f64> = o1.reference_spectrum.expanded().iter().map(|v| f * v).collect();
    let scaling = scaled
        .iter()
        .zip(of.reference_spectrum.expanded())
        .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
    res.insert("weyl_spectrum_scaling".to_string(), scaling);

    let mut skew_xy: f64 = 0.0;
    let mut skew_op: f64 = 0.0;
    let mut th: f64 = 0.0;
    for t in 0..100 {
        let data = draw(&mut rng)?;
        let z = random_unit_vector(&mut rng, n);
        if t < 5 {
            let s = weyl_cov_deriv(&data, &z)?.symmetry_residuals();
            skew_xy = skew_xy.max(s.antisym_first);
            skew_op = skew_op.max(s.antisym_second);
        }
        let y = orthogonal_to_orbit(&sys, &z, &random_gaussian_vector(&mut rng, n))?;
        th = th.max((theta(&data, &y, &z)? - theta_closed_form(&data, &z)).abs());
    }
    res.insert("cov_deriv_xy_antisymmetry".to_string(), skew_xy);
    res.insert("cov_deriv_operator_skew".to_string(), skew_op);
    res.insert("theta_closed_form".to_string(), th);

    let mut scalar_res: f64 = 0.0;
    let mut nonscalar_min = f64::INFINITY;
    for _ in 0..20 {
        let c = rng.gen_range(-3.0..3.0);
        scalar_res = scalar_res.max(codazzi_residual(&SymOp::scalar(n, c), &sys, 4, rng.gen(), policy)?);
        let rho = random_symmetric(&mut rng, n);
        nonscalar_min = nonscalar_min.min(codazzi_residual(&rho, &sys, 4, rng.gen(), policy)?);
    }
    res.insert("codazzi_scalar".to_string(), scalar_res);

    let passed = CONFORMAL_THRESHOLDS.iter().all(|(k, tol)| res.get(*k).is_some_and(|v| *v < *tol))
        && nonscalar_min > 1e-3;
    Ok(ConformalReport { nu, n, eps, seed, residuals: res, codazzi_nonscalar_min: nonscalar_min, passed })
}
