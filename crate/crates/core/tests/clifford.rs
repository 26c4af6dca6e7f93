use osserman_lab::clifford::*;
use osserman_lab::curvature::from_clifford;
use osserman_lab::json;
use osserman_lab::numkit::{Mat, SkewOp, TolerancePolicy};
use osserman_lab::octonion::right_mult_generators;
use osserman_lab::LabError;
use proptest::prelude::*;

/// Hurwitz–Radon numbers ρ(2ᵏ) for k = 0..11.
const HURWITZ_RADON_POW2: [usize; 12] = [1, 2, 4, 8, 9, 10, 12, 16, 17, 18, 20, 24];

#[test]
fn radon_bound_examples() {
    assert_eq!(radon_bound(8), 7);
    assert_eq!(radon_bound(16), 8);
    assert_eq!(radon_bound(1), 0);
    assert_eq!(radon_bound(6), 1);
    for (k, rho) in HURWITZ_RADON_POW2.iter().enumerate() {
        for odd in [1usize, 3, 5, 7] {
            assert_eq!(radon_bound(odd << k), rho - 1, "n = {}", odd << k);
        }
    }
}

#[test]
fn min_module_dim_examples() {
    assert_eq!(min_module_dim(1), 2);
    assert_eq!(min_module_dim(7), 8);
    assert_eq!(min_module_dim(8), 16);
    assert_eq!(min_module_dim(0), 1);
}

fn valid_grid() -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for n in [2usize, 4, 6, 8, 12, 16, 24, 32] {
        for nu in 0..=radon_bound(n) {
            if n % min_module_dim(nu) == 0 {
                out.push((n, nu));
            }
        }
    }
    out
}

#[test]
fn generate_validates_on_grid() {
    let policy = TolerancePolicy::default();
    for (n, nu) in valid_grid() {
        for seed in [None, Some(n as u64 * 31 + nu as u64)] {
            let sys = generate(n, nu, 1.0, &vec![0.5; nu], seed).unwrap();
            let r = validate(&sys, &policy);
            assert!(r.passed, "({n},{nu}) {r:?}");
            let worst = r.skew.max(r.orthogonality).max(r.anticommutation).max(r.pairing);
            assert!(worst < 1e-13, "({n},{nu}) residual {worst:e}");
        }
    }
}

#[test]
fn two_dimensional_structure_is_a_rotation() {
    let sys = generate(2, 1, 1.0, &[1.0], Some(4)).unwrap();
    let j = sys.generators()[0].mat();
    let rot = Mat::from_row_major(2, vec![0.0, -1.0, 1.0, 0.0]).unwrap();
    let d = j.max_abs_diff(&rot).min(j.max_abs_diff(&rot.scale(-1.0)));
    assert!(d < 1e-14);
}

#[test]
fn eight_dimensional_canonical_system_is_octonionic() {
    let sys = generate(8, 7, 1.0, &[1.0; 7], None).unwrap();
    for (a, b) in sys.generators().iter().zip(right_mult_generators()) {
        assert_eq!(a.mat(), b.mat());
    }
    assert_eq!(sys, octonionic_system(7, 1.0, &[1.0; 7]).unwrap());
}

#[test]
fn quaternionic_triple() {
    let sys = generate(4, 3, 1.0, &[1.0; 3], None).unwrap();
    let j = sys.generators();
    let p = j[0].mat().matmul(j[1].mat());
    let d = p.max_abs_diff(j[2].mat()).min(p.max_abs_diff(&j[2].mat().scale(-1.0)));
    assert!(d < 1e-14);
    assert!(validate(&sys, &TolerancePolicy::default()).anticommutation < 1e-14);
}

#[test]
fn validate_detects_scaled_generator() {
    let sys = generate(8, 2, 1.0, &[1.0, 1.0], None).unwrap();
    let mut j = sys.generators().to_vec();
    j[0] = j[0].scale(1.01);
    let bad = CliffordSystem::from_parts(8, j, 1.0, vec![1.0, 1.0]).unwrap();
    let r = validate(&bad, &TolerancePolicy::default());
    assert!(!r.passed);
    assert!((r.orthogonality - 0.0201).abs() < 1e-12, "{r:?}");
}

#[test]
fn validate_empty_system() {
    let sys = generate(5, 0, 1.0, &[], None).unwrap();
    assert!(validate(&sys, &TolerancePolicy::default()).passed);
}

#[test]
fn generate_rejects_bad_input() {
    assert!(matches!(generate(6, 2, 1.0, &[1.0; 2], None), Err(LabError::HurwitzObstruction { .. })));
    assert!(matches!(generate(0, 0, 1.0, &[], None), Err(LabError::UnsupportedDimension(0))));
    assert!(matches!(generate(8, 2, 1.0, &[1.0], None), Err(LabError::DimensionMismatch { .. })));
    assert!(generate(8, 2, 1.0, &[1.0, 0.0], None).is_err());
}

#[test]
fn predicted_eigenvalues() {
    let sys = generate(8, 3, 1.0, &[1.0, 2.0, -1.0], None).unwrap();
    let mut p = sys.predicted_jacobi_eigenvalues();
    p.sort_by(f64::total_cmp);
    assert_eq!(p, vec![-2.0, 0.0, 1.0, 1.0, 1.0, 1.0, 4.0, 7.0]);
}

#[test]
fn json_round_trip_is_exact() {
    let sys = generate(12, 3, 0.7, &[0.1, -2.5, 1.0 / 3.0], Some(99)).unwrap();
    let text = json::to_string(&sys).unwrap();
    let back: CliffordSystem = json::from_str(&text).unwrap();
    assert_eq!(back, sys);
    assert_eq!(json::to_string(&back).unwrap(), text);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["nu"], 3);
    assert_eq!(v["J"].as_array().unwrap().len(), 3);
    assert_eq!(v["J"][0].as_array().unwrap().len(), 144);
}

#[test]
fn json_rejects_non_skew_generator() {
    let text = r#"{"n":2,"nu":1,"lambda0":1.0,"eta":[1.0],"J":[[1.0,0.0,0.0,1.0]]}"#;
    assert!(json::from_str::<CliffordSystem>(text).is_err());
    let short = r#"{"n":2,"nu":1,"lambda0":1.0,"eta":[1.0],"J":[[0.0,-1.0,1.0]]}"#;
    assert!(json::from_str::<CliffordSystem>(short).is_err());
}

#[test]
fn classification_on_r8() {
    let policy = TolerancePolicy::default();
    let quat = generate(8, 3, 1.0, &[1.0; 3], None).unwrap();
    assert!(matches!(classify_r8(&quat, &policy).unwrap(), R8Class::Cliff3Special { .. }));
    let oct3 = octonionic_system(3, 1.0, &[1.0; 3]).unwrap();
    let j = oct3.generators();
    let p = j[0].mat().matmul(j[1].mat());
    assert!(p.max_abs_diff(j[2].mat()) > 0.5 && p.max_abs_diff(&j[2].mat().scale(-1.0)) > 0.5);
    assert_eq!(classify_r8(&oct3, &policy).unwrap(), R8Class::Extendable);
    let oct7 = octonionic_system(7, 1.0, &[1.0; 7]).unwrap();
    assert_eq!(classify_r8(&oct7, &policy).unwrap(), R8Class::Extendable);
    assert!(classify_r8(&generate(4, 1, 1.0, &[1.0], None).unwrap(), &policy).is_err());
}

#[test]
fn extension_keeps_curvature() {
    let policy = TolerancePolicy::default();
    let sys = octonionic_system(1, 0.0, &[1.0]).unwrap();
    let ext = extend_to_seven(&sys, 1.0, 5, &policy).unwrap();
    assert_eq!(ext.nu(), 7);
    assert_eq!(ext.generators()[0], sys.generators()[0]);
    assert_eq!(ext.lambda0(), -3.0);
    assert_eq!(ext.eta(), &[2.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0]);
    assert!(from_clifford(&ext).max_abs_diff(&from_clifford(&sys)) < 1e-11);
    let sign = ext.generator_product();
    assert!(sign.max_abs_diff(&Mat::identity(8)) < 1e-10);
}

#[test]
fn extension_of_full_system_is_identity() {
    let policy = TolerancePolicy::default();
    let sys = octonionic_system(7, 1.0, &[1.0; 7]).unwrap();
    assert_eq!(extend_to_seven(&sys, 0.3, 0, &policy).unwrap(), sys);
}

#[test]
fn extension_of_conjugated_systems() {
    let policy = TolerancePolicy::default();
    for nu in [2usize, 4, 5, 6] {
        let eta: Vec<f64> = (0..nu).map(|i| 0.5 + i as f64).collect();
        let base = octonionic_system(nu, 0.8, &eta).unwrap();
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(nu as u64);
        let sys = base.conjugated(&osserman_lab::numkit::random_orthogonal(&mut rng, 8)).unwrap();
        for (k, xi) in [-0.4, 0.9, 2.5].into_iter().enumerate() {
            let ext = extend_to_seven(&sys, xi, k as u64, &policy).unwrap();
            assert!(validate(&ext, &policy).passed);
            assert_eq!(&ext.generators()[..nu], sys.generators());
            assert!(from_clifford(&ext).max_abs_diff(&from_clifford(&sys)) < 1e-11);
        }
    }
}

#[test]
fn extension_refusals() {
    let policy = TolerancePolicy::default();
    let quat = generate(8, 3, 1.0, &[1.0; 3], Some(3)).unwrap();
    assert!(extend_to_seven(&quat, 0.5, 0, &policy).is_err());
    let sys = octonionic_system(2, 1.0, &[1.0, 2.0]).unwrap();
    assert!(extend_to_seven(&sys, -2.0, 0, &policy).is_err());
    assert!(extend_to_seven(&sys, 0.0, 0, &policy).is_err());
}

#[test]
fn non_skew_from_parts_is_caught_by_validation() {
    let m = Mat::from_row_major(2, vec![0.0, -2.0, 2.0, 0.0]).unwrap();
    let sys = CliffordSystem::from_parts(2, vec![SkewOp::new(&m)], 1.0, vec![1.0]).unwrap();
    assert!(!validate(&sys, &TolerancePolicy::default()).passed);
}

/// Direct evaluation of the three inequalities.
fn brute_force(max_n: usize) -> (Vec<(usize, usize)>, Vec<(usize, usize)>, usize) {
    let mut eq = Vec::new();
    let mut exc = Vec::new();
    let mut bad = 0;
    for n in (1..=max_n).filter(|n| ![2, 4, 8, 16].contains(n)) {
        for nu in 1..=radon_bound(n) {
            let (nf, vf) = (n as f64, nu as f64);
            if nf < 3.0 * vf + 3.0 {
                bad += 1;
            }
            if nf == 3.0 * vf + 3.0 {
                eq.push((n, nu));
            }
            if !(nf > 4.0 * vf - 2.0) {
                exc.push((n, nu));
            }
            if !(0..20).any(|l| (nu as u64) < (1u64 << l) && (1u64 << l) < n as u64) {
                bad += 1;
            }
        }
    }
    (eq, exc, bad)
}

#[test]
fn nvsnu_scan_to_64() {
    let r = nvsnu_scan(64);
    assert!(r.violations_i.is_empty() && r.violations_iii.is_empty());
    assert_eq!(r.equality_i, vec![(6, 1), (12, 3), (24, 7)]);
    assert!(r.equality_matches_listed);
}

#[test]
fn nvsnu_scan_agrees_with_brute_force() {
    let r = nvsnu_scan(512);
    let (eq, exc, bad) = brute_force(512);
    assert_eq!(bad, 0);
    assert_eq!(r.equality_i, eq);
    assert_eq!(r.exceptions_ii, exc);
    assert_eq!(r.exceptions_ii, vec![(24, 7), (32, 9)]);
}

proptest! {
    #[test]
    fn min_module_dim_is_minimal(nu in 0usize..40) {
        let d = min_module_dim(nu);
        prop_assert!(radon_bound(d) >= nu);
        for smaller in 1..d {
            prop_assert!(radon_bound(smaller) < nu);
        }
    }

    #[test]
    fn seeded_generation_is_deterministic(seed in any::<u64>(), nu in 1usize..=7) {
        let a = generate(8, nu, 1.0, &vec![1.0; nu], Some(seed)).unwrap();
        let b = generate(8, nu, 1.0, &vec![1.0; nu], Some(seed)).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert!(validate(&a, &TolerancePolicy::default()).passed);
    }

    #[test]
    fn radon_bound_ignores_odd_factor(k in 0u32..12, odd in 0usize..50) {
        let n = (2 * odd + 1) << k;
        prop_assert_eq!(radon_bound(n), radon_bound(1 << k));
    }
}
