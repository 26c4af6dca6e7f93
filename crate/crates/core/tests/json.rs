use osserman_lab::clifford::generate;
use osserman_lab::curvature::{constant_curvature, from_clifford};
use osserman_lab::json::{from_str, to_string, TensorDocument};
use proptest::prelude::*;

#[test]
fn floats_use_seventeen_digits() {
    assert_eq!(to_string(&0.1f64).unwrap(), "1.0000000000000001e-1\n");
    assert_eq!(to_string(&vec![1.0f64, -2.5]).unwrap(), "[\n  1.0000000000000000e0,\n  -2.5000000000000000e0\n]\n");
    assert_eq!(to_string(&f64::NAN).unwrap(), "null\n");
    assert_eq!(to_string(&f64::INFINITY).unwrap(), "null\n");
}

#[test]
fn tensor_document_round_trip() {
    let sys = generate(6, 1, 1.0, &[0.7], Some(3)).unwrap();
    let t = from_clifford(&sys);
    let text = to_string(&TensorDocument::new(&t, Some(sys.clone()))).unwrap();
    let doc: TensorDocument = from_str(&text).unwrap();
    assert_eq!(doc.r, t.as_slice());
    assert!(doc.tensor().unwrap().max_abs_diff(&t) < 1e-14);
    assert_eq!(doc.system.as_ref().unwrap().n(), 6);
    assert_eq!(to_string(&doc).unwrap(), text);
}

#[test]
fn tensor_document_errors() {
    assert!(from_str::<TensorDocument>("{\"n\": 2").is_err());
    let short: TensorDocument = from_str("{\"n\": 2, \"R\": [0.0, 1.0]}").unwrap();
    assert!(short.tensor().is_err());
    let sys = generate(4, 1, 1.0, &[1.0], None).unwrap();
    let mut doc = TensorDocument::new(&constant_curvature(6, 1.0), None);
    doc.system = Some(sys);
    assert!(doc.tensor().is_err());
}

#[test]
fn loading_projects_onto_symmetries() {
    let mut r = vec![0.0; 16];
    r[1] = 1.0;
    let doc = TensorDocument { n: 2, r, system: None };
    let t = doc.tensor().unwrap();
    assert!(t.symmetry_residuals().max() < 1e-15);
}

proptest! {
    #[test]
    fn floats_round_trip_bit_exactly(bits in any::<u64>()) {
        let v = f64::from_bits(bits);
        prop_assume!(v.is_finite());
        let back: f64 = from_str(&to_string(&v).unwrap()).unwrap();
        prop_assert_eq!(back.to_bits(), v.to_bits());
    }

    #[test]
    fn vectors_round_trip(v in prop::collection::vec(-1e300f64..1e300, 0..20)) {
        let back: Vec<f64> = from_str(&to_string(&v).unwrap()).unwrap();
        prop_assert_eq!(back, v);
    }
}
