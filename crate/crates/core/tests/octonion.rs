use num_complex::Complex64;
use osserman_lab::numkit::{dot, norm, random_gaussian_vector, Mat, TolerancePolicy};
use osserman_lab::octonion::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Quat = [f64; 4];

fn qmul(a: Quat, b: Quat) -> Quat {
    [
        a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
        a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
        a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
        a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0],
    ]
}

fn qconj(a: Quat) -> Quat {
    [a[0], -a[1], -a[2], -a[3]]
}

/// Octonion product by the doubling rule (a,b)(c,d) = (ac − d*b, da + bc*)
/// over Hamilton quaternions.
fn doubling_mul(x: &[f64; 8], y: &[f64; 8]) -> [f64; 8] {
    let (a, b) = ([x[0], x[1], x[2], x[3]], [x[4], x[5], x[6], x[7]]);
    let (c, d) = ([y[0], y[1], y[2], y[3]], [y[4], y[5], y[6], y[7]]);
    let ac = qmul(a, c);
    let db = qmul(qconj(d), b);
    let da = qmul(d, a);
    let bc = qmul(b, qconj(c));
    let mut out = [0.0; 8];
    for k in 0..4 {
        out[k] = ac[k] - db[k];
        out[k + 4] = da[k] + bc[k];
    }
    out
}

fn unit(i: usize) -> [f64; 8] {
    let mut e = [0.0; 8];
    e[i] = 1.0;
    e
}

#[test]
fn table_matches_quaternion_doubling() {
    let t = octonion_table();
    for i in 0..8 {
        for j in 0..8 {
            let p = t.product(i, j);
            let mut expect = [0.0; 8];
            expect[p.index] = p.sign as f64;
            assert_eq!(doubling_mul(&unit(i), &unit(j)), expect, "e{i}·e{j}");
        }
    }
}

#[test]
fn table_examples() {
    let e = |i| Octonion::basis(i);
    assert_eq!(e(1) * e(2), e(3));
    let a = Octonion::from_slice(&[0.5, -1.0, 2.0, 0.25, 3.0, -0.75, 1.5, 0.1]).unwrap();
    assert_eq!(Octonion::one() * a, a);
    assert_eq!(a * Octonion::one(), a);
    assert_eq!(Octonion::one().conj(), Octonion::one());
    assert_eq!(e(3).conj(), e(3).scale(-1.0));
    for i in 0..8 {
        for j in 0..8 {
            let expect = if i == j { 1.0 } else { 0.0 };
            assert_eq!(e(i).inner(&e(j)), expect);
        }
    }
}

#[test]
fn table_dump_lists_signed_products() {
    let d = table_dump();
    assert_eq!(d.basis[0], "1");
    assert_eq!(d.products[1][2], "e3");
    assert_eq!(d.products[2][1], "-e3");
    assert_eq!(d.products[5][5], "-1");
}

#[test]
fn cayley_dickson_tables_by_dimension() {
    assert!(cayley_dickson_table(3).is_err());
    assert!(cayley_dickson_table(32).is_err());
    let c = cayley_dickson_table(2).unwrap();
    assert_eq!(c.product(1, 1).sign, -1);
    let h = cayley_dickson_table(4).unwrap();
    let p = h.product(1, 2);
    assert_eq!((p.sign, p.index), (1, 3));
    let s = cayley_dickson_table(16).unwrap();
    assert_eq!(s.dim(), 16);
}

#[test]
fn bioctonion_zero_divisor() {
    let (a, b) = zero_divisor_pair();
    assert_eq!((a * b).max_modulus(), 0.0);
    let i = Complex64::new(0.0, 1.0);
    assert_eq!(a.0[0], i);
    assert!((a.hermitian_norm() * b.hermitian_norm() - 2.0).abs() < 1e-15);
}

#[test]
fn identity_suite_passes() {
    let r = identity_suite(10_000, 1);
    assert!(r.max_residual < 1e-12, "{:?}", r.residuals);
    assert_eq!(r.residuals.len(), 11);
    let b = bioctonion_identity_suite(10_000, 2);
    assert!(b.max_residual < 1e-12, "{:?}", b.residuals);
}

#[test]
fn right_multiplications_satisfy_cliff7() {
    let j: Vec<Mat> = right_mult_generators().into_iter().map(|s| s.into_mat()).collect();
    let id = Mat::identity(8);
    for a in 0..7 {
        assert!((&j[a].matmul(&j[a]) + &id).max_abs() < 1e-15);
        for b in 0..a {
            let ac = &j[a].matmul(&j[b]) + &j[b].matmul(&j[a]);
            assert!(ac.max_abs() < 1e-15, "J{a}, J{b} do not anticommute");
        }
    }
    let sign = generator_product_sign().unwrap();
    let p = j.iter().fold(Mat::identity(8), |acc, m| acc.matmul(m));
    assert!(p.max_abs_diff(&id.scale(sign as f64)) < 1e-14);
}

#[test]
fn right_mult_operator_realizes_x_u() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..1000 {
        let mut u = Octonion::random(&mut rng);
        u.0[0] = 0.0;
        let x = Octonion::random(&mut rng);
        let j = right_mult_operator(&u).unwrap();
        let jx = j.apply(&x.0);
        let xu = doubling_mul(&x.0, &u.0);
        for k in 0..8 {
            assert!((jx[k] - xu[k]).abs() < 1e-13);
        }
        assert!((norm(&jx) - u.norm() * x.norm()).abs() < 1e-12);
    }
    assert!(right_mult_operator(&Octonion::one()).is_err());
}

#[test]
fn inverse_of_zero_fails() {
    assert!(Octonion::zero().inverse().is_err());
}

fn span_of(vs: &[usize]) -> Subspace {
    Subspace::span(&vs.iter().map(|i| unit(*i).to_vec()).collect::<Vec<_>>()).unwrap()
}

#[test]
fn cayley_plane_examples() {
    let policy = TolerancePolicy::default();
    assert!(is_cayley_plane(&span_of(&[0, 1, 2, 3]), &policy).is_cayley);
    let bad = is_cayley_plane(&span_of(&[0, 1, 2, 4]), &policy);
    assert!(!bad.is_cayley && bad.residual >= 0.5, "{bad:?}");
    assert!(is_cayley_plane(&span_of(&[4, 5, 6, 7]), &policy).is_cayley);
    assert!(!is_cayley_plane(&span_of(&[0, 1, 2]), &policy).is_cayley);
}

#[test]
fn cayley_plane_span_examples() {
    let policy = TolerancePolicy::default();
    let e = |i| Octonion::basis(i);
    let p = cayley_plane_span(&e(0), &e(1), &e(2), &policy).unwrap();
    assert!(p.subspace().projector_distance(&span_of(&[0, 1, 2, 3])) < 1e-14);
    let q = cayley_plane_span(&e(0), &e(1), &e(4), &policy).unwrap();
    let e1e4 = doubling_mul(&unit(1), &unit(4));
    let fourth = e1e4.iter().position(|v| v.abs() == 1.0).unwrap();
    assert!(q.subspace().projector_distance(&span_of(&[0, 1, 4, fourth])) < 1e-14);
    assert!(cayley_plane_span(&e(0), &e(0), &e(2), &policy).is_err());
    for plane in [p, q] {
        let perp = plane.subspace().orthogonal_complement();
        assert!(is_cayley_plane(&perp, &policy).is_cayley);
    }
}

#[test]
fn cayley_product_space_examples() {
    let policy = TolerancePolicy::default();
    let quat = CayleyPlane::new(span_of(&[0, 1, 2, 3]), &policy).unwrap();
    let perp = CayleyPlane::new(span_of(&[4, 5, 6, 7]), &policy).unwrap();
    let a = cayley_product_space(&quat, 1, &policy).unwrap();
    let b = cayley_product_space(&perp, 2, &policy).unwrap();
    assert!(a.projector_distance(quat.subspace()) < 1e-12);
    assert!(b.projector_distance(quat.subspace()) < 1e-12);
    assert!(CayleyPlane::new(span_of(&[0, 1, 2, 4]), &policy).is_err());
}

#[test]
fn random_cayley_planes() {
    let policy = TolerancePolicy::default();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for k in 0..20 {
        let e = Octonion::random(&mut rng);
        let mut u = Octonion::random(&mut rng);
        u.0[0] = 0.0;
        let u = u.scale(1.0 / u.norm());
        let mut v = Octonion::random(&mut rng);
        v.0[0] = 0.0;
        let c = dot(&v.0, &u.0);
        let v = v - u.scale(c);
        let v = v.scale(1.0 / v.norm());
        let p = cayley_plane_span(&e, &u, &v, &policy).unwrap();
        assert!(random_triple_closure_defect(p.subspace(), 50, k) < 1e-12);
        let star = cayley_product_space(&p, k, &policy).unwrap();
        let perp = CayleyPlane::new(p.subspace().orthogonal_complement(), &policy).unwrap();
        let star_perp = cayley_product_space(&perp, k + 100, &policy).unwrap();
        assert!(star.projector_distance(&star_perp) < 1e-10);
    }
}

fn oct() -> impl Strategy<Value = Octonion> {
    proptest::array::uniform8(-3.0..3.0f64).prop_map(Oct)
}

proptest! {
    #[test]
    fn alternativity_and_moufang(a in oct(), b in oct(), c in oct()) {
        let tol = 1e-10 * (1.0 + a.norm() * a.norm() * b.norm() * (1.0 + c.norm()));
        prop_assert!((a * (a * b) - (a * a) * b).max_modulus() < tol);
        prop_assert!(((b * a) * a - b * (a * a)).max_modulus() < tol);
        let moufang = (a * (b * a)) * c - a * (b * (a * c));
        prop_assert!(moufang.max_modulus() < tol * (1.0 + a.norm()));
    }

    #[test]
    fn norm_is_multiplicative(a in oct(), b in oct()) {
        prop_assert!(((a * b).norm() - a.norm() * b.norm()).abs() < 1e-12 * (1.0 + a.norm() * b.norm()));
    }

    #[test]
    fn conjugation_reverses_products(a in oct(), b in oct()) {
        let d = (a * b).conj() - b.conj() * a.conj();
        prop_assert!(d.max_modulus() < 1e-12 * (1.0 + a.norm() * b.norm()));
    }

    #[test]
    fn inverse_is_two_sided(a in oct()) {
        prop_assume!(a.norm() > 1e-3);
        let inv = a.inverse().unwrap();
        prop_assert!((inv * a - Octonion::one()).max_modulus() < 1e-12);
        prop_assert!((a * inv - Octonion::one()).max_modulus() < 1e-12);
    }

    #[test]
    fn right_mult_is_orthogonal(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut u = Octonion::random(&mut rng);
        u.0[0] = 0.0;
        let x = random_gaussian_vector(&mut rng, 8);
        let j = right_mult_operator(&u).unwrap();
        prop_assert!((norm(&j.apply(&x)) - u.norm() * norm(&x)).abs() < 1e-12 * (1.0 + u.norm() * norm(&x)));
    }
}
