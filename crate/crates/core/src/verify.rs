//! The acceptance runner: one named check per criterion, each a pure
//! function of the seed. `verify all` serializes [`run_all`].

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::clifford::{
    classify_r8, extend_to_seven, generate, nvsnu_scan, octonionic_system, validate, R8Class,
};
use crate::conformal::{
    c_const, codazzi_residual, conformal_curvature, model_weyl, orthogonal_to_orbit, theta,
    theta_closed_form, weyl_norm_sq, ConformalData,
};
use crate::curvature::{from_clifford, jacobi, osserman_check, weyl};
use crate::error::Result;
use crate::geodiff::{
    bianchi2_convergence, bianchi2_residual, laplacian_identity_residual, riemann_at, sample_points,
    Chart, DerivativeMode, FDConfig, Polynomial,
};
use crate::numkit::{
    eigh, random_gaussian_vector, random_orthogonal, random_symmetric, random_unit_vector, Mat,
    Spectrum, SymOp, TolerancePolicy,
};
use crate::octonion::{
    bioctonion_identity_suite, generator_product_sign, identity_suite, right_mult_generators,
    right_mult_operator, zero_divisor_pair, Octonion,
};

/// Pinned thresholds.
pub mod thresholds {
    pub const OSSERMAN_DEVIATION: f64 = 1e-10;
    pub const OCTONION_IDENTITY: f64 = 1e-12;
    pub const ZERO_DIVISOR: f64 = 1e-15;
    pub const EXTENSION_AGREEMENT: f64 = 1e-11;
    pub const CONFORMAL_WEYL: f64 = 1e-10;
    pub const WEYL_NORM_RELATIVE: f64 = 1e-9;
    pub const THETA: f64 = 1e-10;
    pub const CODAZZI_NONSCALAR: f64 = 1e-3;
    pub const SPHERE_RIEMANN: f64 = 1e-5;
    pub const CP2_SPECTRUM: f64 = 1e-4;
    pub const CONFORMAL_FLAT_WEYL: f64 = 1e-4;
    pub const BIANCHI_ORDER: f64 = 1.8;
    pub const LAPLACIAN: f64 = 1e-6;
    /// Step for the Bianchi order measurement.
    pub const BIANCHI_STEP: f64 = 0.02;
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionReport {
    pub id: u8,
    pub name: String,
    pub passed: bool,
    pub checks: BTreeMap<String, serde_json::Value>,
    pub failures: Vec<String>,
}

impl CriterionReport {
    fn new(id: u8, name: &str) -> Self {
        CriterionReport { id, name: name.to_string(), passed: true, checks: BTreeMap::new(), failures: Vec::new() }
    }

    fn record(&mut self, key: &str, value: impl Serialize) {
        self.checks.insert(key.to_string(), serde_json::to_value(value).unwrap_or(serde_json::Value::Null));
    }

    /// Records `value` and fails unless `ok`.
    fn expect(&mut self, key: &str, value: impl Serialize, ok: bool) {
        self.record(key, value);
        if !ok {
            self.passed = false;
            self.failures.push(key.to_string());
        }
    }

    fn fail_with(&mut self, key: &str, err: impl std::fmt::Display) {
        self.expect(key, err.to_string(), false);
    }

    /// One-line summary.
    pub fn summary(&self) -> String {
        let status = if self.passed { "PASS" } else { "FAIL" };
        if self.failures.is_empty() {
            format!("criterion {} [{}] {}", self.id, status, self.name)
        } else {
            format!("criterion {} [{}] {} (failed: {})", self.id, status, self.name, self.failures.join(", "))
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub passed: bool,
    pub criteria: Vec<CriterionReport>,
}

fn sub_seed(seed: u64, tag: u64) -> u64 {
    seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(tag)
}

fn nonzero_constant<R: Rng>(rng: &mut R) -> f64 {
    let m = rng.gen_range(0.25..2.0);
    if rng.gen_bool(0.5) {
        m
    } else {
        -m
    }
}

/// Clifford ⇒ Osserman with the predicted spectrum.
pub fn criterion_clifford_osserman(seed: u64, policy: &TolerancePolicy) -> CriterionReport {
    let mut rep = CriterionReport::new(1, "clifford structure implies osserman");
    let mut cases: Vec<(usize, usize)> = vec![(2, 1), (4, 1), (4, 3), (6, 1)];
    cases.extend((1..=7).map(|k| (8, k)));
    cases.extend([(12, 3), (16, 4)]);
    let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(seed, 1));
    for (n, nu) in cases {
        let key = format!("n{n:02}_nu{nu}");
        let lambda0 = nonzero_constant(&mut rng);
        let eta: Vec<f64> = (0..nu).map(|_| nonzero_constant(&mut rng)).collect();
        let sys_seed = rng.gen();
        let check_seed = rng.gen();
        let sys = match generate(n, nu, lambda0, &eta, Some(sys_seed)) {
            Ok(s) => s,
            Err(e) => {
                rep.fail_with(&format!("{key}_generate"), e);
                continue;
            }
        };
        let r = from_clifford(&sys);
        match osserman_check(&r, 200, check_seed, Some(&sys), policy) {
            Ok(o) => {
                let predicted = Spectrum::from_values(&sys.predicted_jacobi_eigenvalues(), policy.cluster_tol);
                let dev = o.max_spectrum_deviation;
                rep.expect(&format!("{key}_deviation"), dev, o.is_osserman && dev < thresholds::OSSERMAN_DEVIATION);
                let matches = o.reference_spectrum.matches(&predicted, thresholds::OSSERMAN_DEVIATION);
                rep.expect(&format!("{key}_spectrum_matches_prediction"), matches, matches);
            }
            Err(e) => rep.fail_with(&format!("{key}_osserman"), e),
        }
    }
    rep
}

/// Radon–Hurwitz scan of the three inequalities up to `n = 512`.
pub fn criterion_radon_scan() -> CriterionReport {
    let mut rep = CriterionReport::new(2, "radon-hurwitz inequality scan to n = 512");
    let s = nvsnu_scan(512);
    rep.record("pairs_checked", s.pairs_checked);
    rep.expect("violations_i", &s.violations_i, s.violations_i.is_empty());
    rep.expect("violations_iii", &s.violations_iii, s.violations_iii.is_empty());
    rep.expect("equality_i", &s.equality_i, s.equality_matches_listed);
    rep.expect("exceptions_ii", &s.exceptions_ii, s.exceptions_match_listed);
    rep
}

/// Octonion and bioctonion identities, zero divisors and the generator product.
pub fn criterion_octonions(seed: u64) -> CriterionReport {
    let mut rep = CriterionReport::new(3, "octonion identity suite");
    let real = identity_suite(10_000, sub_seed(seed, 3));
    rep.expect("octonion_max_residual", real.max_residual, real.max_residual < thresholds::OCTONION_IDENTITY);
    let bi = bioctonion_identity_suite(10_000, sub_seed(seed, 4));
    rep.expect("bioctonion_max_residual", bi.max_residual, bi.max_residual < thresholds::OCTONION_IDENTITY);
    let (a, b) = zero_divisor_pair();
    let prod = (a * b).hermitian_norm();
    rep.expect("zero_divisor_product", prod, prod < thresholds::ZERO_DIVISOR);
    let norms = a.hermitian_norm() * b.hermitian_norm();
    rep.expect("zero_divisor_factor_norms", norms, norms > 1.0);

    let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(seed, 5));
    let mut orth: f64 = 0.0;
    for _ in 0..1000 {
        let mut u = Octonion::random(&mut rng);
        u.0[0] = 0.0;
        let x = random_gaussian_vector(&mut rng, 8);
        let j = right_mult_operator(&u).expect("imaginary");
        let lhs = crate::numkit::norm(&j.apply(&x));
        orth = orth.max((lhs - u.norm() * crate::numkit::norm(&x)).abs());
    }
    rep.expect("orthogonal_multiplication", orth, orth < thresholds::OCTONION_IDENTITY);

    match generator_product_sign() {
        Ok(sign) => {
            rep.record("generator_product_sign", sign);
            let mut gens: Vec<Mat> = right_mult_generators().into_iter().map(|j| j.into_mat()).collect();
            if sign < 0 {
                gens[6] = gens[6].scale(-1.0);
            }
            let p = gens.iter().fold(Mat::identity(8), |acc, m| acc.matmul(m));
            let d = p.max_abs_diff(&Mat::identity(8));
            rep.expect("flipped_product_is_identity", d, d < thresholds::OCTONION_IDENTITY);
        }
        Err(e) => rep.fail_with("generator_product_sign", e),
    }
    rep
}

/// Extension of Clifford systems on ℝ⁸ to seven generators.
pub fn criterion_extension(seed: u64, policy: &TolerancePolicy) -> CriterionReport {
    let mut rep = CriterionReport::new(4, "extension of clifford systems on R^8");
    let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(seed, 6));
    for nu in [1usize, 2, 4, 5, 6] {
        let lambda0 = nonzero_constant(&mut rng);
        let eta: Vec<f64> = (0..nu).map(|_| nonzero_constant(&mut rng)).collect();
        let q = random_orthogonal(&mut rng, 8);
        let sys = octonionic_system(nu, lambda0, &eta)
            .and_then(|s| s.conjugated(&q))
            .expect("octonionic system");
        let before = from_clifford(&sys);
        let mut worst: f64 = 0.0;
        let mut ok = true;
        let mut used = 0;
        while used < 3 {
            let xi = nonzero_constant(&mut rng);
            if eta.iter().any(|e| (e + xi).abs() < 0.05) {
                continue;
            }
            used += 1;
            match extend_to_seven(&sys, xi, rng.gen(), policy) {
                Ok(ext) => {
                    worst = worst.max(from_clifford(&ext).max_abs_diff(&before));
                    ok &= validate(&ext, policy).passed && ext.nu() == 7;
                    ok &= ext.generators()[..nu] == sys.generators()[..];
                }
                Err(e) => {
                    rep.fail_with(&format!("nu{nu}_extend"), e);
                    ok = false;
                }
            }
        }
        rep.expect(&format!("nu{nu}_tensor_agreement"), worst, worst < thresholds::EXTENSION_AGREEMENT);
        rep.expect(&format!("nu{nu}_valid_and_prefix_kept"), ok, ok);
    }
    for (label, conj) in [("canonical", false), ("conjugated", true)] {
        let eta: Vec<f64> = (0..3).map(|_| nonzero_constant(&mut rng)).collect();
        let mut sys = generate(8, 3, 1.0, &eta, None).expect("quaternionic blocks");
        if conj {
            sys = sys.conjugated(&random_orthogonal(&mut rng, 8)).expect("same dimension");
        }
        let class = classify_r8(&sys, policy);
        let special = matches!(class, Ok(R8Class::Cliff3Special { .. }));
        rep.expect(&format!("quaternionic_{label}_class"), format!("{class:?}"), special);
        let refused = extend_to_seven(&sys, 0.5, 1, policy).is_err();
        rep.expect(&format!("quaternionic_{label}_refused"), refused, refused);
    }
    rep
}

const MODEL_PAIRS: [(usize, usize); 5] = [(1, 4), (1, 6), (1, 8), (3, 8), (3, 12)];

fn random_data<R: Rng>(rng: &mut R, nu: usize, n: usize, eps: f64) -> Result<ConformalData> {
    let sys = generate(n, nu, eps, &vec![eps; nu], Some(rng.gen()))?;
    let f = rng.gen_range(0.2..3.0);
    let grad_f = random_gaussian_vector(rng, n);
    let phi_grad = grad_f.iter().map(|g| g / (2.0 * f)).collect();
    ConformalData::new(f, grad_f, phi_grad, random_symmetric(rng, n), eps, sys)
}

/// Conformal invariance of the model Weyl tensor, its norm, and the θ identity.
pub fn criterion_conformal(seed: u64) -> CriterionReport {
    let mut rep = CriterionReport::new(5, "weyl conformal machinery");
    let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(seed, 7));
    let run = |rep: &mut CriterionReport, rng: &mut ChaCha8Rng| -> Result<()> {
        let mut worst: f64 = 0.0;
        for draw in 0..50 {
            let (nu, n) = MODEL_PAIRS[draw % MODEL_PAIRS.len()];
            let eps = if draw % 2 == 0 { 1.0 } else { -1.0 };
            let data = random_data(rng, nu, n, eps)?;
            let k = random_symmetric(rng, n);
            let w = weyl(&conformal_curvature(&data, &k)?)?;
            worst = worst.max(w.max_abs_diff(&model_weyl(data.sys(), eps, data.f())?));
        }
        rep.expect("weyl_invariance_max_deviation", worst, worst < thresholds::CONFORMAL_WEYL);

        let c16 = c_const(1, 6);
        let c38 = c_const(3, 8);
        rep.expect("c_1_6", c16, ((c16 - 230.4) / 230.4).abs() < 1e-14);
        rep.expect("c_3_8", c38, ((c38 - 5760.0 / 7.0) / (5760.0 / 7.0)).abs() < 1e-14);
        for (nu, n) in MODEL_PAIRS {
            let sys = generate(n, nu, 1.0, &vec![1.0; nu], Some(rng.gen()))?;
            let f = rng.gen_range(0.2..3.0);
            let ratio = weyl_norm_sq(&model_weyl(&sys, 1.0, f)?) / (f * f);
            let rel = ((ratio - c_const(nu, n)) / c_const(nu, n)).abs();
            rep.expect(&format!("norm_nu{nu}_n{n:02}_relative_error"), rel, rel < thresholds::WEYL_NORM_RELATIVE);
        }

        let mut worst_theta: f64 = 0.0;
        for s in 0..100 {
            let (nu, n) = MODEL_PAIRS[s % MODEL_PAIRS.len()];
            let eps = if s % 2 == 0 { 1.0 } else { -1.0 };
            let data = random_data(rng, nu, n, eps)?;
            let z = random_unit_vector(rng, n);
            let y = orthogonal_to_orbit(data.sys(), &z, &random_gaussian_vector(rng, n))?;
            let d = (theta(&data, &y, &z)? - theta_closed_form(&data, &z)).abs();
            worst_theta = worst_theta.max(d);
        }
        rep.expect("theta_max_residual", worst_theta, worst_theta < thresholds::THETA);
        Ok(())
    };
    if let Err(e) = run(&mut rep, &mut rng) {
        rep.fail_with("error", e);
    }
    rep
}

/// Non-scalar `ρ`: half generic, half with two eigenvalues.
fn random_nonscalar_rho<R: Rng>(rng: &mut R, n: usize, two_valued: bool) -> SymOp {
    if !two_valued {
        return random_symmetric(rng, n);
    }
    let k = rng.gen_range(1..n);
    let a = rng.gen_range(-2.0..2.0);
    let b = a + nonzero_constant(rng) + 0.25_f64.copysign(a);
    let d: Vec<f64> = (0..n).map(|i| if i < k { a } else { b }).collect();
    let q = random_orthogonal(rng, n);
    SymOp::new(&q.matmul(&Mat::diag(&d)).matmul(&q.transpose()))
}

/// Rigidity of the Codazzi condition.
pub fn criterion_codazzi(seed: u64, policy: &TolerancePolicy) -> CriterionReport {
    let mut rep = CriterionReport::new(6, "codazzi rigidity");
    let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(seed, 8));
    for (n, nu) in [(6usize, 1usize), (8, 3), (12, 3)] {
        let eta: Vec<f64> = (0..nu).map(|_| nonzero_constant(&mut rng)).collect();
        let sys = generate(n, nu, 1.0, &eta, None).expect("valid pair");
        let mut min_nonscalar = f64::INFINITY;
        let mut max_scalar: f64 = 0.0;
        let mut two_valued_count = 0;
        for t in 0..200 {
            let two = t % 2 == 1;
            let rho = random_nonscalar_rho(&mut rng, n, two);
            let clusters = eigh(&rho).map(|e| Spectrum::from_values(&e.values, policy.cluster_tol).clusters.len());
            if clusters.map_or(true, |c| c < 2) {
                continue;
            }
            two_valued_count += usize::from(two);
            match codazzi_residual(&rho, &sys, 4, rng.gen(), policy) {
                Ok(r) => min_nonscalar = min_nonscalar.min(r),
                Err(e) => rep.fail_with(&format!("n{n:02}_nu{nu}_error"), e),
            }
            let c = rng.gen_range(-3.0..3.0);
            match codazzi_residual(&SymOp::scalar(n, c), &sys, 4, rng.gen(), policy) {
                Ok(r) => max_scalar = max_scalar.max(r),
                Err(e) => rep.fail_with(&format!("n{n:02}_nu{nu}_error"), e),
            }
        }
        rep.record(&format!("n{n:02}_nu{nu}_two_valued_draws"), two_valued_count);
        rep.expect(
            &format!("n{n:02}_nu{nu}_min_nonscalar_residual"),
            min_nonscalar,
            min_nonscalar > thresholds::CODAZZI_NONSCALAR,
        );
        rep.expect(&format!("n{n:02}_nu{nu}_max_scalar_residual"), max_scalar, max_scalar == 0.0);
    }
    rep
}

/// Finite-difference cross-validation on model charts.
pub fn criterion_geodiff(seed: u64) -> CriterionReport {
    let mut rep = CriterionReport::new(7, "finite-difference cross-validation");
    let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(seed, 9));
    let run = |rep: &mut CriterionReport, rng: &mut ChaCha8Rng| -> Result<()> {
        let cfg = FDConfig::with_step(1e-3);
        for n in [4usize, 5, 6] {
            let chart = Chart::sphere(n);
            let oracle = from_clifford(&generate(n, 0, 1.0, &[], None)?);
            let mut worst: f64 = 0.0;
            for x in sample_points(&chart, 3, rng.gen()) {
                worst = worst.max(riemann_at(&chart, &x, &cfg)?.max_abs_diff(&oracle));
            }
            rep.expect(&format!("sphere{n}_riemann_error"), worst, worst < thresholds::SPHERE_RIEMANN);
        }

        let cp2 = Chart::complex_projective(2);
        let expected = [0.0, 1.0, 1.0, 4.0];
        let mut worst: f64 = 0.0;
        for x in sample_points(&cp2, 5, rng.gen()) {
            let r = riemann_at(&cp2, &x, &cfg)?;
            for _ in 0..20 {
                let d = random_unit_vector(rng, 4);
                let vals = eigh(&jacobi(&r, &d))?.values;
                worst = vals.iter().zip(expected).fold(worst, |m, (a, b)| m.max((a - b).abs()));
            }
        }
        rep.expect("cp2_spectrum_error", worst, worst < thresholds::CP2_SPECTRUM);

        let fd_only = FDConfig { analytic: false, ..cfg };
        let mut worst: f64 = 0.0;
        for n in [4usize, 5, 6] {
            let chart = Chart::conformally_flat(n, Polynomial::random_quadratic(rng, n, 0.3))?;
            for x in sample_points(&chart, 2, rng.gen()) {
                worst = worst.max(weyl(&riemann_at(&chart, &x, &fd_only)?)?.norm_sq().sqrt());
            }
        }
        rep.expect("conformally_flat_weyl_norm", worst, worst < thresholds::CONFORMAL_FLAT_WEYL);
        let base = Chart::sphere(4);
        let chart = Chart::conformal(base, Polynomial::random_quadratic(rng, 4, 0.3))?;
        let mut worst: f64 = 0.0;
        for x in sample_points(&chart, 2, rng.gen()) {
            worst = worst.max(weyl(&riemann_at(&chart, &x, &cfg)?)?.norm_sq().sqrt());
        }
        rep.expect("conformal_sphere_weyl_norm", worst, worst < thresholds::CONFORMAL_FLAT_WEYL);

        let x = [0.2, -0.1, 0.15, 0.05];
        let conv = bianchi2_convergence(&Chart::sphere(4), &x, &FDConfig::with_step(thresholds::BIANCHI_STEP))?;
        rep.record("bianchi_sphere_residuals", &conv.residuals);
        rep.expect("bianchi_sphere_min_order", conv.min_order, conv.min_order >= thresholds::BIANCHI_ORDER);
        let cp_res = bianchi2_residual(&cp2, &x, &cfg)?;
        rep.expect("bianchi_cp2_residual", cp_res, cp_res < 1e-3);

        let lap_cfg = FDConfig { h: 1e-2, richardson: true, analytic: true };
        let mut worst: f64 = 0.0;
        for n in [5usize, 6, 8] {
            for _ in 0..3 {
                let phi = Polynomial::random_quadratic(rng, n, 0.5);
                let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-0.5..0.5)).collect();
                worst = worst.max(laplacian_identity_residual(&phi, &x, DerivativeMode::FiniteDifference, &lap_cfg)?);
            }
        }
        rep.expect("laplacian_fd_max_residual", worst, worst < thresholds::LAPLACIAN);
        let a = random_gaussian_vector(rng, 6);
        let lin = laplacian_identity_residual(&Polynomial::linear(&a), &[0.1; 6], DerivativeMode::Analytic, &lap_cfg)?;
        rep.expect("laplacian_linear_analytic_residual", lin, lin < 1e-8);
        Ok(())
    };
    if let Err(e) = run(&mut rep, &mut rng) {
        rep.fail_with("error", e);
    }
    rep
}

/// Criteria 1 to 7.
pub fn run_criteria(seed: u64, policy: &TolerancePolicy) -> Vec<CriterionReport> {
    vec![
        criterion_clifford_osserman(seed, policy),
        criterion_radon_scan(),
        criterion_octonions(seed),
        criterion_extension(seed, policy),
        criterion_conformal(seed),
        criterion_codazzi(seed, policy),
        criterion_geodiff(seed),
    ]
}

/// Default thread count of the second determinism run.
pub const DETERMINISM_THREADS: usize = 4;

/// Criteria 1 to 7, plus criterion 8: the serialized reports from a
/// one-thread pool and a `threads`-thread pool must be byte-identical.
/// `threads = 0` uses [`DETERMINISM_THREADS`].
pub fn run_all(seed: u64, policy: &TolerancePolicy, threads: usize) -> Result<VerifyReport> {
    let threads = if threads == 0 { DETERMINISM_THREADS } else { threads };
    let in_pool = |threads: usize| -> Result<Vec<CriterionReport>> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| crate::error::LabError::InvalidArgument(e.to_string()))?;
        Ok(pool.install(|| run_criteria(seed, policy)))
    };
    let mut criteria = in_pool(1)?;
    let other = in_pool(threads)?;
    let same = crate::json::to_string(&criteria)? == crate::json::to_string(&other)?;
    let mut det = CriterionReport::new(8, "determinism across thread counts");
    det.expect("reports_identical_across_pools", same, same);
    criteria.push(det);
    let passed = criteria.iter().all(|c| c.passed);
    Ok(VerifyReport { seed, passed, criteria })
}
