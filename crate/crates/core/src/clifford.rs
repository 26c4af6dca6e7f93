//! Radon–Hurwitz arithmetic and systems of anticommuting almost Hermitian
//! structures `J₁ … J_ν` on ℝⁿ together with the constants `λ₀, η₁ … η_ν`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::numkit::{eigh, random_gaussian_vector, random_orthogonal, spd_sqrt_pair, dot, Mat, SkewOp, SymOp, TolerancePolicy};
use crate::octonion::{cayley_dickson_table, octonion_table};

/// Largest `ν` for which ℝⁿ is a `Cl(ν)`-module: `2ᵇ + 8a − 1` for `n = 2^{4a+b}·c`, `c` odd.
pub fn radon_bound(n: usize) -> usize {
    assert!(n >= 1, "radon_bound needs n >= 1");
    let k = n.trailing_zeros() as usize;
    let (a, b) = (k / 4, k % 4);
    (1usize << b) + 8 * a - 1
}

/// Smallest `d` with `radon_bound(d) ≥ ν`.
pub fn min_module_dim(nu: usize) -> usize {
    let mut d = 1usize;
    while radon_bound(d) < nu {
        d *= 2;
    }
    d
}

fn rot() -> Mat {
    Mat::from_row_major(2, vec![0.0, -1.0, 1.0, 0.0]).expect("2x2")
}

fn sign() -> Mat {
    Mat::diag(&[1.0, -1.0])
}

fn right_mults(dim: usize, count: usize) -> Vec<Mat> {
    let table = cayley_dickson_table(dim).expect("power of two");
    (1..=count)
        .map(|i| {
            let mut u = vec![0.0; dim];
            u[i] = 1.0;
            table.right_mult_matrix(&u)
        })
        .collect()
}

/// Generators of an irreducible `Cl(ν)` representation of dimension `min_module_dim(ν)`.
pub fn irreducible_generators(nu: usize) -> Vec<Mat> {
    match nu {
        0 => Vec::new(),
        1 => vec![rot()],
        2 | 3 => right_mults(4, nu),
        4..=7 => right_mults(8, nu),
        8 => {
            let mut g: Vec<Mat> = right_mults(8, 7).iter().map(|e| e.kron(&sign())).collect();
            g.push(Mat::identity(8).kron(&rot()));
            g
        }
        _ => {
            let f = irreducible_generators(8);
            let omega = f.iter().skip(1).fold(f[0].clone(), |acc, m| acc.matmul(m));
            let inner = irreducible_generators(nu - 8);
            let m = min_module_dim(nu - 8);
            let mut g: Vec<Mat> = f.iter().map(|fj| fj.kron(&Mat::identity(m))).collect();
            g.extend(inner.iter().map(|e| omega.kron(e)));
            g
        }
    }
}

/// `ν` anticommuting almost Hermitian structures on ℝⁿ with the constants of the
/// induced curvature tensor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SystemRecord", into = "SystemRecord")]
pub struct CliffordSystem {
    n: usize,
    j: Vec<SkewOp>,
    lambda0: f64,
    eta: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct SystemRecord {
    n: usize,
    nu: usize,
    lambda0: f64,
    eta: Vec<f64>,
    #[serde(rename = "J")]
    j: Vec<Vec<f64>>,
}

impl From<CliffordSystem> for SystemRecord {
    fn from(s: CliffordSystem) -> Self {
        SystemRecord {
            n: s.n,
            nu: s.j.len(),
            lambda0: s.lambda0,
            eta: s.eta,
            j: s.j.into_iter().map(|m| m.into_mat().into_vec()).collect(),
        }
    }
}

impl TryFrom<SystemRecord> for CliffordSystem {
    type Error = LabError;
    fn try_from(r: SystemRecord) -> Result<Self> {
        if r.nu != r.j.len() {
            return Err(LabError::DimensionMismatch { expected: r.nu, got: r.j.len() });
        }
        let mut j = Vec::with_capacity(r.nu);
        for data in r.j {
            let m = Mat::from_row_major(r.n, data)?;
            let skewness = (&m + &m.transpose()).max_abs();
            if skewness > 1e-8 {
                return Err(LabError::InvalidArgument(format!(
                    "generator is not skew-symmetric (|J + Jᵀ| = {skewness:e})"
                )));
            }
            j.push(SkewOp::new(&m));
        }
        CliffordSystem::from_parts(r.n, j, r.lambda0, r.eta)
    }
}

impl CliffordSystem {
    /// Assembles a system without checking the Clifford relations; see [`validate`].
    pub fn from_parts(n: usize, j: Vec<SkewOp>, lambda0: f64, eta: Vec<f64>) -> Result<Self> {
        if eta.len() != j.len() {
            return Err(LabError::DimensionMismatch { expected: j.len(), got: eta.len() });
        }
        if let Some(bad) = j.iter().find(|m| m.dim() != n) {
            return Err(LabError::DimensionMismatch { expected: n, got: bad.dim() });
        }
        Ok(CliffordSystem { n, j, lambda0, eta })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nu(&self) -> usize {
        self.j.len()
    }

    pub fn generators(&self) -> &[SkewOp] {
        &self.j
    }

    pub fn lambda0(&self) -> f64 {
        self.lambda0
    }

    pub fn eta(&self) -> &[f64] {
        &self.eta
    }

    pub fn with_constants(&self, lambda0: f64, eta: Vec<f64>) -> Result<Self> {
        CliffordSystem::from_parts(self.n, self.j.clone(), lambda0, eta)
    }

    /// `QJᵢQᵀ` for an orthogonal `Q`.
    pub fn conjugated(&self, q: &Mat) -> Result<Self> {
        if q.dim() != self.n {
            return Err(LabError::DimensionMismatch { expected: self.n, got: q.dim() });
        }
        let qt = q.transpose();
        let j = self.j.iter().map(|m| SkewOp::new(&q.matmul(m.mat()).matmul(&qt))).collect();
        CliffordSystem::from_parts(self.n, j, self.lambda0, self.eta.clone())
    }

    /// Jacobi eigenvalues predicted for a unit vector: `0`, `λ₀` with multiplicity
    /// `n−1−ν`, and `λ₀ + 3ηᵢ`.
    pub fn predicted_jacobi_eigenvalues(&self) -> Vec<f64> {
        let mut v = vec![0.0];
        v.extend(std::iter::repeat(self.lambda0).take(self.n - 1 - self.nu()));
        v.extend(self.eta.iter().map(|e| self.lambda0 + 3.0 * e));
        v
    }

    /// Product `J₁J₂⋯J_ν`.
    pub fn generator_product(&self) -> Mat {
        self.j
            .iter()
            .fold(Mat::identity(self.n), |acc, m| acc.matmul(m.mat()))
    }
}

fn check_eta(eta: &[f64], nu: usize) -> Result<()> {
    if eta.len() != nu {
        return Err(LabError::DimensionMismatch { expected: nu, got: eta.len() });
    }
    if eta.iter().any(|e| *e == 0.0 || !e.is_finite()) {
        return Err(LabError::InvalidArgument("eta entries must be finite and nonzero".into()));
    }
    Ok(())
}

/// Builds a system on ℝⁿ from the irreducible ladder as `Gᵢ ⊗ I`. With a
/// seed, the result is conjugated by a random orthogonal matrix.
pub fn generate(n: usize, nu: usize, lambda0: f64, eta: &[f64], seed: Option<u64>) -> Result<CliffordSystem> {
    if n == 0 {
        return Err(LabError::UnsupportedDimension(n));
    }
    check_eta(eta, nu)?;
    let bound = radon_bound(n);
    if nu > bound {
        return Err(LabError::HurwitzObstruction { n, nu, bound });
    }
    let d = min_module_dim(nu);
    if n % d != 0 {
        return Err(LabError::NotAModuleDimension { n, nu, module_dim: d });
    }
    let id = Mat::identity(n / d);
    let j = irreducible_generators(nu)
        .iter()
        .map(|g| SkewOp::new(&g.kron(&id)))
        .collect();
    let mut sys = CliffordSystem::from_parts(n, j, lambda0, eta.to_vec())?;
    if let Some(seed) = seed {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        sys = sys.conjugated(&random_orthogonal(&mut rng, n))?;
    }
    let report = validate(&sys, &TolerancePolicy::default());
    if !report.passed {
        return Err(LabError::VerificationFailed(format!(
            "generated system failed validation: {report:?}"
        )));
    }
    Ok(sys)
}

/// The first `ν` octonion right multiplications `X ↦ Xeᵢ` on ℝ⁸.
pub fn octonionic_system(nu: usize, lambda0: f64, eta: &[f64]) -> Result<CliffordSystem> {
    if nu > 7 {
        return Err(LabError::HurwitzObstruction { n: 8, nu, bound: 7 });
    }
    check_eta(eta, nu)?;
    let j = (1..=nu)
        .map(|i| {
            let mut u = [0.0; 8];
            u[i] = 1.0;
            SkewOp::new(&octonion_table().right_mult_matrix(&u))
        })
        .collect();
    CliffordSystem::from_parts(8, j, lambda0, eta.to_vec())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub skew: f64,
    pub orthogonality: f64,
    pub anticommutation: f64,
    pub pairing: f64,
    pub eta_nonzero: bool,
    pub passed: bool,
}

/// Residuals of the Clifford relations; passes iff all are below `identity_tol`.
pub fn validate(sys: &CliffordSystem, policy: &TolerancePolicy) -> ValidationReport {
    let n = sys.n;
    let id = Mat::identity(n);
    let mut skew: f64 = 0.0;
    let mut orth: f64 = 0.0;
    let mut anti: f64 = 0.0;
    for (a, ja) in sys.j.iter().enumerate() {
        let m = ja.mat();
        skew = skew.max((m + &m.transpose()).max_abs());
        orth = orth.max(m.transpose().matmul(m).max_abs_diff(&id));
        for jb in &sys.j[a..] {
            let target = if std::ptr::eq(ja, jb) { id.scale(-2.0) } else { Mat::zeros(n) };
            let ac = &m.matmul(jb.mat()) + &jb.mat().matmul(m);
            anti = anti.max(ac.max_abs_diff(&target));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut pairing: f64 = 0.0;
    for _ in 0..4 {
        let x = random_gaussian_vector(&mut rng, n);
        let x2 = dot(&x, &x);
        let images: Vec<Vec<f64>> = sys.j.iter().map(|m| m.apply(&x)).collect();
        for (a, ia) in images.iter().enumerate() {
            for (b, ib) in images.iter().enumerate() {
                let expect = if a == b { x2 } else { 0.0 };
                pairing = pairing.max((dot(ia, ib) - expect).abs() / x2);
            }
        }
    }
    let eta_nonzero = sys.eta.iter().all(|e| *e != 0.0);
    let tol = policy.identity_tol;
    let passed = skew < tol && orth < tol && anti < tol && pairing < tol && eta_nonzero;
    ValidationReport {
        skew,
        orthogonality: orth,
        anticommutation: anti,
        pairing,
        eta_nonzero,
        passed,
    }
}

/// The two cases for a Clifford system on ℝ⁸.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum R8Class {
    /// `ν = 3` with `J₁J₂ = sign·J₃`.
    Cliff3Special { sign: i8 },
    Extendable,
}

pub fn classify_r8(sys: &CliffordSystem, policy: &TolerancePolicy) -> Result<R8Class> {
    if sys.n != 8 || sys.nu() == 0 || sys.nu() > 7 {
        return Err(LabError::InvalidArgument(format!(
            "classification needs n = 8 and 1 <= nu <= 7, got n = {}, nu = {}",
            sys.n,
            sys.nu()
        )));
    }
    if sys.nu() == 3 {
        let p = sys.j[0].mat().matmul(sys.j[1].mat());
        let j3 = sys.j[2].mat();
        if p.max_abs_diff(j3) < policy.identity_tol {
            return Ok(R8Class::Cliff3Special { sign: 1 });
        }
        if p.max_abs_diff(&j3.scale(-1.0)) < policy.identity_tol {
            return Ok(R8Class::Cliff3Special { sign: -1 });
        }
    }
    Ok(R8Class::Extendable)
}

/// Retry cap for drawing a nonsingular element of the anticommutant.
pub const EXTENSION_RETRIES: usize = 32;

fn skew_basis(n: usize) -> Vec<Mat> {
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            let mut m = Mat::zeros(n);
            m[(a, b)] = 1.0;
            m[(b, a)] = -1.0;
            out.push(m);
        }
    }
    out
}

/// Basis of the skew matrices anticommuting with every current generator.
fn anticommutant(gens: &[SkewOp]) -> Result<Vec<Mat>> {
    let basis = skew_basis(8);
    let cols: Vec<Vec<f64>> = basis
        .iter()
        .map(|b| {
            gens.iter()
                .flat_map(|j| (&b.matmul(j.mat()) + &j.mat().matmul(b)).into_vec())
                .collect()
        })
        .collect();
    let k = basis.len();
    let gram = Mat::from_fn(k, |p, q| dot(&cols[p], &cols[q]));
    let eig = eigh(&SymOp::new(&gram))?;
    let scale = eig.values.iter().cloned().fold(1.0, f64::max);
    Ok((0..k)
        .filter(|&c| eig.values[c] <= 1e-10 * scale)
        .map(|c| {
            let coeffs = eig.vector(c);
            basis
                .iter()
                .zip(&coeffs)
                .fold(Mat::zeros(8), |acc, (b, w)| &acc + &b.scale(*w))
        })
        .collect())
}

fn draw_structure(null: &[Mat], rng: &mut ChaCha8Rng) -> Result<Option<SkewOp>> {
    let m = null
        .iter()
        .fold(Mat::zeros(8), |acc, b| &acc + &b.scale(rng.sample::<f64, _>(StandardNormal)));
    let s = SymOp::new(&m.transpose().matmul(&m));
    let eig = eigh(&s)?;
    let (lo, hi) = (eig.values[0], eig.values[7]);
    if !(hi > 0.0) || lo < 1e-8 * hi {
        return Ok(None);
    }
    let (_, inv_sqrt) = spd_sqrt_pair(&s)?;
    Ok(Some(SkewOp::new(&m.matmul(&inv_sqrt))))
}

/// Completes an extendable system on ℝ⁸ to seven generators. The constants
/// become `λ₀ − 3ξ`, `ηᵢ + ξ`, and `ξ` for each added generator; the first `ν`
/// generators are kept as they are. If `J₁⋯J₇ = −I` the last added generator
/// is negated.
pub fn extend_to_seven(
    sys: &CliffordSystem,
    xi: f64,
    seed: u64,
    policy: &TolerancePolicy,
) -> Result<CliffordSystem> {
    match classify_r8(sys, policy)? {
        R8Class::Cliff3Special { .. } => {
            return Err(LabError::InvalidArgument(
                "Cliff(3) system with J1J2 = ±J3 does not extend".into(),
            ))
        }
        R8Class::Extendable => {}
    }
    let nu = sys.nu();
    if nu == 7 {
        return Ok(sys.clone());
    }
    if xi == 0.0 || !xi.is_finite() || sys.eta.iter().any(|e| (e + xi).abs() <= 1e-12 * e.abs().max(1.0)) {
        return Err(LabError::InvalidArgument(format!(
            "xi = {xi} must be nonzero and different from every -eta_i"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gens = sys.j.clone();
    while gens.len() < 7 {
        let null = anticommutant(&gens)?;
        if null.is_empty() {
            return Err(LabError::ExtensionFailed(format!(
                "no skew operator anticommutes with the {} current generators",
                gens.len()
            )));
        }
        let mut found = None;
        for _ in 0..EXTENSION_RETRIES {
            if let Some(k) = draw_structure(&null, &mut rng)? {
                found = Some(k);
                break;
            }
        }
        match found {
            Some(k) => gens.push(k),
            None => {
                return Err(LabError::ExtensionFailed(format!(
                    "no nonsingular anticommuting element after {EXTENSION_RETRIES} draws"
                )))
            }
        }
    }
    let product = gens.iter().fold(Mat::identity(8), |acc, m| acc.matmul(m.mat()));
    if product.max_abs_diff(&Mat::identity(8).scale(-1.0)) < 1e-8 {
        let last = gens.pop().expect("seven generators");
        gens.push(last.scale(-1.0));
    }
    let mut eta: Vec<f64> = sys.eta.iter().map(|e| e + xi).collect();
    eta.extend(std::iter::repeat(xi).take(7 - nu));
    let out = CliffordSystem::from_parts(8, gens, sys.lambda0 - 3.0 * xi, eta)?;
    let report = validate(&out, policy);
    if !report.passed {
        return Err(LabError::ExtensionFailed(format!("extended system failed validation: {report:?}")));
    }
    Ok(out)
}

/// Expected equality cases of `n ≥ 3ν + 3`.
pub const EQUALITY_CASES: [(usize, usize); 3] = [(6, 1), (12, 3), (24, 7)];
/// Expected exceptions to `n > 4ν − 2`.
pub const EXCEPTION_CASES: [(usize, usize); 2] = [(24, 7), (32, 8)];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NvsnuReport {
    pub max_n: usize,
    pub pairs_checked: usize,
    /// Pairs with `n < 3ν + 3`.
    pub violations_i: Vec<(usize, usize)>,
    pub equality_i: Vec<(usize, usize)>,
    /// Pairs with `n ≤ 4ν − 2`.
    pub exceptions_ii: Vec<(usize, usize)>,
    /// Pairs with no power of two strictly between `ν` and `n`.
    pub violations_iii: Vec<(usize, usize)>,
    pub equality_matches_listed: bool,
    pub exceptions_match_listed: bool,
    pub passed: bool,
}

/// Checks the three inequalities for every `n ≤ max_n`, `n ∉ {2,4,8,16}`,
/// and every `1 ≤ ν ≤ radon_bound(n)`.
pub fn nvsnu_scan(max_n: usize) -> NvsnuReport {
    let mut r = NvsnuReport {
        max_n,
        pairs_checked: 0,
        violations_i: Vec::new(),
        equality_i: Vec::new(),
        exceptions_ii: Vec::new(),
        violations_iii: Vec::new(),
        equality_matches_listed: false,
        exceptions_match_listed: false,
        passed: false,
    };
    for n in 1..=max_n {
        if matches!(n, 2 | 4 | 8 | 16) {
            continue;
        }
        for nu in 1..=radon_bound(n) {
            r.pairs_checked += 1;
            let p = (n, nu);
            if n < 3 * nu + 3 {
                r.violations_i.push(p);
            } else if n == 3 * nu + 3 {
                r.equality_i.push(p);
            }
            if n + 2 <= 4 * nu {
                r.exceptions_ii.push(p);
            }
            let has_power = (0..usize::BITS).map(|l| 1usize << l).any(|q| nu < q && q < n);
            if !has_power {
                r.violations_iii.push(p);
            }
        }
    }
    r.equality_matches_listed = r.equality_i == EQUALITY_CASES;
    r.exceptions_match_listed = r.exceptions_ii == EXCEPTION_CASES;
    r.passed = r.violations_i.is_empty()
        && r.violations_iii.is_empty()
        && r.equality_matches_listed
        && r.exceptions_match_listed;
    r
}
