use osserman_lab::clifford::{generate, CliffordSystem};
use osserman_lab::curvature::*;
use osserman_lab::numkit::{
    basis_vector, dot, eigh, random_gaussian_vector, random_symmetric, random_unit_vector, Mat, Spectrum, SymOp,
    TolerancePolicy,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn add_scaled(out: &mut [f64], c: f64, v: &[f64]) {
    for (o, x) in out.iter_mut().zip(v) {
        *o += c * x;
    }
}

/// `λ₀(⟨X,Z⟩Y − ⟨Y,Z⟩X) + Σηᵢ(2⟨JᵢX,Y⟩JᵢZ + ⟨JᵢZ,Y⟩JᵢX − ⟨JᵢZ,X⟩JᵢY)`, evaluated on vectors.
fn cs_formula(sys: &CliffordSystem, x: &[f64], y: &[f64], z: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; x.len()];
    add_scaled(&mut out, sys.lambda0() * dot(x, z), y);
    add_scaled(&mut out, -sys.lambda0() * dot(y, z), x);
    for (j, e) in sys.generators().iter().zip(sys.eta()) {
        let (jx, jy, jz) = (j.apply(x), j.apply(y), j.apply(z));
        add_scaled(&mut out, 2.0 * e * dot(&jx, y), &jz);
        add_scaled(&mut out, e * dot(&jz, y), &jx);
        add_scaled(&mut out, -e * dot(&jz, x), &jy);
    }
    out
}

/// `εf(−3ν/(n−1)·X∧Y + Σ(JᵢX∧JᵢY + 2⟨JᵢX,Y⟩Jᵢ))Z` with `(X∧Y)Z = ⟨X,Z⟩Y − ⟨Y,Z⟩X`.
fn model_weyl_formula(sys: &CliffordSystem, eps: f64, f: f64, x: &[f64], y: &[f64], z: &[f64]) -> Vec<f64> {
    let n = x.len() as f64;
    let nu = sys.nu() as f64;
    let mut out = vec![0.0; x.len()];
    let c = -3.0 * nu / (n - 1.0);
    add_scaled(&mut out, c * dot(x, z), y);
    add_scaled(&mut out, -c * dot(y, z), x);
    for j in sys.generators() {
        let (jx, jy, jz) = (j.apply(x), j.apply(y), j.apply(z));
        add_scaled(&mut out, dot(&jx, z), &jy);
        add_scaled(&mut out, -dot(&jy, z), &jx);
        add_scaled(&mut out, 2.0 * dot(&jx, y), &jz);
    }
    out.iter().map(|v| eps * f * v).collect()
}

fn spectrum_of(r: &CurvTensor, x: &[f64]) -> Vec<(f64, usize)> {
    let e = eigh(&jacobi(r, x)).unwrap();
    Spectrum::from_values(&e.values, 1e-9)
        .clusters
        .iter()
        .map(|c| ((c.eigenvalue * 1e9).round() / 1e9, c.multiplicity))
        .collect()
}

#[test]
fn unit_sphere_tensor() {
    let sys = generate(4, 0, 1.0, &[], None).unwrap();
    let r = from_clifford(&sys);
    let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                for l in 0..4 {
                    assert_eq!(r.get(i, j, k, l), d(i, k) * d(j, l) - d(i, l) * d(j, k));
                }
            }
        }
    }
}

#[test]
fn from_clifford_matches_defining_formula() {
    let mut g = rng(1);
    for (n, nu) in [(4usize, 3usize), (8, 5), (12, 3), (16, 8)] {
        let eta: Vec<f64> = (0..nu).map(|i| 0.3 + 0.4 * i as f64).collect();
        let sys = generate(n, nu, -0.7, &eta, Some(n as u64)).unwrap();
        let r = from_clifford(&sys);
        for _ in 0..10 {
            let (x, y, z) = (
                random_gaussian_vector(&mut g, n),
                random_gaussian_vector(&mut g, n),
                random_gaussian_vector(&mut g, n),
            );
            let a = r.apply(&x, &y, &z);
            let b = cs_formula(&sys, &x, &y, &z);
            for (p, q) in a.iter().zip(&b) {
                assert!((p - q).abs() < 1e-12 * (1.0 + q.abs()), "({n},{nu})");
            }
        }
    }
}

#[test]
fn jacobi_spectrum_examples() {
    let sys = generate(6, 1, 1.0, &[1.0], Some(2)).unwrap();
    let x = random_unit_vector(&mut rng(2), 6);
    assert_eq!(spectrum_of(&from_clifford(&sys), &x), vec![(0.0, 1), (1.0, 4), (4.0, 1)]);
    let sys = generate(8, 3, 1.0, &[1.0; 3], Some(3)).unwrap();
    let x = random_unit_vector(&mut rng(3), 8);
    assert_eq!(spectrum_of(&from_clifford(&sys), &x), vec![(0.0, 1), (1.0, 4), (4.0, 3)]);
}

#[test]
fn jacobi_matches_closed_form() {
    let mut g = rng(4);
    let sys = generate(8, 4, 0.6, &[1.0, -0.5, 2.0, 0.25], Some(4)).unwrap();
    let r = from_clifford(&sys);
    for _ in 0..20 {
        let x = random_unit_vector(&mut g, 8);
        let mut expect = (&Mat::identity(8) - &Mat::outer(&x, &x)).scale(sys.lambda0());
        for (j, e) in sys.generators().iter().zip(sys.eta()) {
            let jx = j.apply(&x);
            expect = &expect + &Mat::outer(&jx, &jx).scale(3.0 * e);
        }
        assert!(jacobi(&r, &x).mat().max_abs_diff(&expect) < 1e-13);
        assert!(jacobi(&r, &x).apply(&x).iter().all(|v| v.abs() < 1e-13));
        let x2: Vec<f64> = x.iter().map(|v| 2.0 * v).collect();
        assert!(jacobi(&r, &x2).mat().max_abs_diff(&jacobi(&r, &x).mat().scale(4.0)) < 1e-12);
    }
}

#[test]
fn confcs_examples() {
    let mut g = rng(5);
    let sys = generate(6, 1, 1.4, &[0.8], Some(5)).unwrap();
    let half = SymOp::scalar(6, 0.7);
    assert!(from_confcs(&half, &sys).unwrap().max_abs_diff(&from_clifford(&sys)) < 1e-15);
    let w0 = weyl(&from_confcs(&SymOp::zeros(6), &sys).unwrap()).unwrap();
    for _ in 0..10 {
        let rho = random_symmetric(&mut g, 6);
        let w = weyl(&from_confcs(&rho, &sys).unwrap()).unwrap();
        assert!(w.max_abs_diff(&w0) < 1e-10);
    }
    let flat = generate(5, 0, 1.0, &[], None).unwrap();
    let rho = SymOp::diag(&[1.0, 1.0, 3.0, 3.0, 3.0]);
    assert!(weyl(&from_confcs(&rho, &flat).unwrap()).unwrap().max_abs() < 1e-14);
    assert!(from_confcs(&SymOp::zeros(5), &sys).is_err());
}

#[test]
fn model_examples() {
    let policy = TolerancePolicy::default();
    let sys = generate(4, 1, 1.0, &[1.0], Some(6)).unwrap();
    let r = model_tensor(&sys, 1.0).unwrap();
    for a in 0..4 {
        for b in 0..a {
            let k = r.get(a, b, a, b);
            assert!((1.0 - 1e-12..=4.0 + 1e-12).contains(&k), "K = {k}");
        }
    }
    let sys = generate(6, 1, 1.0, &[1.0], Some(7)).unwrap();
    let r = model_tensor(&sys, -1.0).unwrap();
    let x = random_unit_vector(&mut rng(7), 6);
    assert_eq!(spectrum_of(&r, &x), vec![(-4.0, 1), (-1.0, 4), (0.0, 1)]);
    let sys = generate(8, 3, 1.0, &[1.0; 3], Some(8)).unwrap();
    let ric = ricci(&model_tensor(&sys, 1.0).unwrap());
    let c = ric.trace() / 8.0;
    assert!(ric.mat().max_abs_diff(&Mat::identity(8).scale(c)) < 1e-12);
    assert!(osserman_check(&weyl(&model_tensor(&sys, 1.0).unwrap()).unwrap(), 64, 1, Some(&sys), &policy)
        .unwrap()
        .is_osserman);
    let oct = generate(8, 3, 1.0, &[1.0; 3], None).unwrap();
    assert!(model_tensor(&oct, 2.0).is_err());
    assert!(model_tensor(&generate(8, 2, 1.0, &[1.0; 2], None).unwrap(), 1.0).is_err());
}

#[test]
fn model_weyl_matches_closed_form() {
    let mut g = rng(9);
    for (nu, n, eps) in [(1usize, 4usize, 1.0), (1, 6, -1.0), (3, 8, 1.0), (3, 12, -1.0)] {
        let sys = generate(n, nu, 1.0, &vec![1.0; nu], Some(n as u64 + nu as u64)).unwrap();
        let w = weyl(&model_tensor(&sys, eps).unwrap()).unwrap();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let (ei, ej, ek) = (basis_vector(n, i), basis_vector(n, j), basis_vector(n, k));
                    let v = model_weyl_formula(&sys, eps, 1.0, &ei, &ej, &ek);
                    for l in 0..n {
                        assert!((w.get(i, j, k, l) - v[l]).abs() < 1e-12);
                    }
                }
            }
        }
        let c = 6.0 * (nu * n * (n + 2) * (n - nu - 1)) as f64 / (n as f64 - 1.0);
        let f: f64 = 0.5 + (nu as f64);
        let scaled = w.scale(f);
        assert!((scaled.norm_sq() - c * f * f).abs() < 1e-9 * c * f * f);
        let x = random_gaussian_vector(&mut g, n);
        assert_eq!(x.len(), n);
    }
}

#[test]
fn ricci_of_clifford_tensor() {
    let sys = generate(12, 3, 0.4, &[1.0, -2.0, 0.5], Some(10)).unwrap();
    let expect = 11.0 * 0.4 + 3.0 * (1.0 - 2.0 + 0.5);
    let ric = ricci(&from_clifford(&sys));
    assert!(ric.mat().max_abs_diff(&Mat::identity(12).scale(expect)) < 1e-12);
    assert!((scalar(&from_clifford(&sys)) - 12.0 * expect).abs() < 1e-11);
}

#[test]
fn weyl_of_constant_curvature_vanishes() {
    for n in [4usize, 5, 7] {
        assert!(weyl(&constant_curvature(n, 2.5)).unwrap().max_abs() < 1e-14);
    }
    assert!(weyl(&constant_curvature(3, 1.0)).is_err());
}

#[test]
fn osserman_check_examples() {
    let policy = TolerancePolicy::default();
    let sys = generate(8, 3, 1.0, &[1.0, 2.0, 3.0], Some(11)).unwrap();
    let r = from_clifford(&sys);
    let rep = osserman_check(&r, 200, 3, Some(&sys), &policy).unwrap();
    assert!(rep.is_osserman && rep.max_spectrum_deviation < 1e-10);
    let mut g = rng(12);
    let a = random_symmetric(&mut g, 8);
    let bump = kulkarni_nomizu(a.mat(), a.mat()).unwrap().scale(0.1 * r.max_abs() / a.mat().max_abs().powi(2));
    let perturbed = r.add(&bump).unwrap();
    let s0 = eigh(&jacobi(&perturbed, &basis_vector(8, 0))).unwrap().values;
    let s1 = eigh(&jacobi(&perturbed, &basis_vector(8, 1))).unwrap().values;
    let brute = s0.iter().zip(&s1).fold(0.0_f64, |m, (p, q)| m.max((p - q).abs()));
    assert!(brute > 1e-3);
    assert!(!osserman_check(&perturbed, 200, 3, None, &policy).unwrap().is_osserman);
    let zero = osserman_check(&CurvTensor::zeros(5), 10, 0, None, &policy).unwrap();
    assert!(zero.is_osserman);
    assert_eq!(zero.reference_spectrum.multiplicities(), vec![5]);
    assert!(osserman_check(&r, 3, 0, None, &policy).is_err());
}

#[test]
fn recover_rho_round_trip() {
    let mut g = rng(13);
    let sys = generate(6, 1, 0.0, &[0.9], Some(13)).unwrap();
    let rho = random_symmetric(&mut g, 6);
    let r = from_confcs(&rho, &sys).unwrap();
    let plain = recover_rho(&r, 0.0).unwrap();
    let shift = plain.sub(&rho);
    let c = shift.trace() / 6.0;
    assert!(shift.mat().max_abs_diff(&Mat::identity(6).scale(c)) < 1e-12);
    assert!((c - 3.0 * 0.9 / 10.0).abs() < 1e-12);
    let gauge = -3.0 * 0.9 / 5.0;
    let exact = recover_rho(&r, gauge).unwrap();
    assert!(from_confcs(&exact, &sys).unwrap().max_abs_diff(&r) < 1e-9);

    let flat = generate(5, 0, 1.0, &[], None).unwrap();
    let d = SymOp::diag(&[0.5, -1.0, 2.0, 0.0, 3.0]);
    let rec = recover_rho(&from_confcs(&d, &flat).unwrap(), 0.0).unwrap();
    assert!(rec.mat().max_abs_diff(d.mat()) < 1e-14);
    let rec = recover_rho(&constant_curvature(5, 1.8), 0.0).unwrap();
    assert!(rec.mat().max_abs_diff(&Mat::identity(5).scale(0.9)) < 1e-14);
    let rec = recover_rho(&constant_curvature(5, 1.8), 1.8).unwrap();
    assert!(rec.mat().max_abs_diff(&Mat::identity(5).scale(1.8)) < 1e-14);
}

#[test]
fn symmetrization_and_raw_storage() {
    let mut g = rng(14);
    let data = random_gaussian_vector(&mut g, 256);
    let raw = CurvTensor::raw(4, data.clone()).unwrap();
    assert!(raw.symmetry_residuals().max() > 0.1);
    let sym = CurvTensor::new(4, data).unwrap();
    assert!(sym.symmetry_residuals().max() < 1e-14);
    assert!(sym.symmetrized().max_abs_diff(&sym) < 1e-14);
    assert!(CurvTensor::raw(4, vec![0.0; 10]).is_err());
    assert!(CurvTensor::zeros(3).add(&CurvTensor::zeros(4)).is_err());
}

fn system_strategy() -> impl Strategy<Value = CliffordSystem> {
    (0usize..=7, any::<u64>(), -2.0..2.0f64).prop_map(|(nu, seed, lambda0)| {
        let mut g = rng(seed);
        let eta: Vec<f64> = (0..nu).map(|_| 0.1 + rand::Rng::gen_range(&mut g, 0.0..2.0)).collect();
        generate(8, nu, lambda0, &eta, Some(seed)).unwrap()
    })
}

proptest! {
    #[test]
    fn clifford_tensors_are_algebraic_curvature_tensors(sys in system_strategy()) {
        let r = from_clifford(&sys);
        let s = r.symmetry_residuals();
        prop_assert!(s.max() < 1e-12, "{:?}", s);
    }

    #[test]
    fn clifford_tensors_are_osserman_with_predicted_spectrum(sys in system_strategy(), seed in any::<u64>()) {
        let policy = TolerancePolicy::default();
        let rep = osserman_check(&from_clifford(&sys), 40, seed, Some(&sys), &policy).unwrap();
        prop_assert!(rep.is_osserman);
        let predicted = Spectrum::from_values(&sys.predicted_jacobi_eigenvalues(), policy.cluster_tol);
        prop_assert!(rep.reference_spectrum.matches(&predicted, 1e-10));
    }

    #[test]
    fn weyl_is_idempotent_and_ricci_free(seed in any::<u64>(), n in 4usize..8) {
        let mut g = rng(seed);
        let r = CurvTensor::new(n, random_gaussian_vector(&mut g, n.pow(4))).unwrap();
        let w = weyl(&r).unwrap();
        prop_assert!(weyl(&w).unwrap().max_abs_diff(&w) < 1e-10);
        prop_assert!(ricci(&w).mat().max_abs() < 1e-10);
    }

    #[test]
    fn jacobi_annihilates_its_direction(seed in any::<u64>(), n in 2usize..8) {
        let mut g = rng(seed);
        let r = CurvTensor::new(n, random_gaussian_vector(&mut g, n.pow(4))).unwrap();
        let x = random_gaussian_vector(&mut g, n);
        let jx = jacobi(&r, &x);
        prop_assert!(jx.apply(&x).iter().all(|v| v.abs() < 1e-10 * (1.0 + dot(&x, &x) * r.max_abs())));
    }

    #[test]
    fn kulkarni_nomizu_of_symmetric_pair_is_curvature_tensor(seed in any::<u64>(), n in 2usize..7) {
        let mut g = rng(seed);
        let a = random_symmetric(&mut g, n);
        let b = random_symmetric(&mut g, n);
        let t = kulkarni_nomizu(a.mat(), b.mat()).unwrap();
        prop_assert!(t.symmetry_residuals().max() < 1e-12);
        prop_assert!(t.max_abs_diff(&kulkarni_nomizu(b.mat(), a.mat()).unwrap()) < 1e-14);
    }
}
