mod common;

use cgaedit_core::cga::{
    decompose_motor, MotorDecomposition, dilator, dilator_inverse, embed_sphere, extract_sphere, quaternion_from_rotor, rotor,
    rotor_from_quaternion, sandwich, translator, translator_inverse, DilationSpec, Multivector, RotorSpec,
    TranslationSpec, Vec3, BLADE_COUNT,
};
use cgaedit_core::scene::{apply_decomposition, SceneObject};
use common::*;
use nalgebra::{Quaternion, UnitQuaternion};
use proptest::prelude::*;

fn coeff() -> impl Strategy<Value = f64> {
    -1.0..=1.0f64
}

fn mv() -> impl Strategy<Value = Multivector> {
    proptest::array::uniform32(coeff()).prop_map(Multivector::from_coeffs)
}

fn vec3(r: f64) -> impl Strategy<Value = Vec3> {
    (-r..=r, -r..=r, -r..=r).prop_map(|(x, y, z)| Vec3::new(x, y, z))
}

fn unit_quat() -> impl Strategy<Value = UnitQuaternion<f64>> {
    (coeff(), coeff(), coeff(), coeff())
        .prop_filter("nonzero", |(w, x, y, z)| w * w + x * x + y * y + z * z > 1e-4)
        .prop_map(|(w, x, y, z)| UnitQuaternion::new_normalize(Quaternion::new(w, x, y, z)))
}

fn motor_parts() -> impl Strategy<Value = (Vec3, UnitQuaternion<f64>, f64)> {
    (vec3(577.0), unit_quat(), 0.1..=10.0f64)
}

fn motor(t: &Vec3, q: &UnitQuaternion<f64>, d: f64) -> Multivector {
    translator(&TranslationSpec::new(*t).unwrap())
        * rotor_from_quaternion(q.quaternion()).unwrap()
        * dilator(&DilationSpec::new(d).unwrap())
}

#[test]
fn product_matches_word_oracle_on_basis() {
    for i in 0..BLADE_COUNT {
        for j in 0..BLADE_COUNT {
            let got = Multivector::basis(i) * Multivector::basis(j);
            let (s, k) = word_product(i, j);
            assert_eq!(got, Multivector::blade(k, s), "e[{i}] e[{j}]");
        }
    }
}

#[test]
fn conformal_nulls() {
    let eo = Multivector::eo();
    let einf = Multivector::einf();
    assert!((eo * eo).scalar_part().abs() <= 1e-15);
    assert!((einf * einf).scalar_part().abs() <= 1e-15);
    assert_eq!((eo * einf + einf * eo).scalar_part(), -2.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn geometric_product_matches_oracle(a in mv(), b in mv()) {
        prop_assert!((a * b).approx_eq(&oracle_product(&a, &b), 1e-12));
    }

    #[test]
    fn associativity(a in mv(), b in mv(), c in mv()) {
        prop_assert!(((a * b) * c).approx_eq(&(a * (b * c)), 1e-9));
    }

    #[test]
    fn versor_composition((t1, q1, d1) in motor_parts(), (t2, q2, d2) in motor_parts(), p in vec3(10.0), r in 0.0..5.0f64) {
        let m1 = motor(&(t1 / 577.0), &q1, d1);
        let m2 = motor(&(t2 / 577.0), &q2, d2);
        let x = embed_sphere(&p, r).unwrap();
        let nested = sandwich(&m2, &sandwich(&m1, &x).unwrap()).unwrap();
        let composed = sandwich(&(m2 * m1), &x).unwrap();
        let scale = nested.max_abs_coeff().max(1.0);
        prop_assert!(composed.approx_eq(&nested, 1e-9 * scale));
    }

    #[test]
    fn translator_times_inverse(t in vec3(1e3)) {
        let spec = TranslationSpec::new(t).unwrap();
        let one = translator(&spec) * translator_inverse(&spec);
        prop_assert!(one.approx_eq(&Multivector::scalar(1.0), 1e-15));
    }

    #[test]
    fn dilator_times_inverse(d in 0.1..=10.0f64) {
        let spec = DilationSpec::new(d).unwrap();
        prop_assert!((dilator(&spec) * dilator_inverse(&spec)).approx_eq(&Multivector::scalar(1.0), 1e-12));
    }

    #[test]
    fn rotor_is_unit(q in unit_quat()) {
        let r = rotor_from_quaternion(q.quaternion()).unwrap();
        prop_assert!((r * r.reverse()).approx_eq(&Multivector::scalar(1.0), 1e-12));
        let back = quaternion_from_rotor(&r).unwrap();
        prop_assert!(same_rotation(&back, &q, 1e-12));
    }

    #[test]
    fn rotor_acts_like_quaternion(q in unit_quat(), p in vec3(100.0)) {
        let r = rotor_from_quaternion(q.quaternion()).unwrap();
        let got = sandwich_point(&r, &p);
        prop_assert!((got - q * p).norm() <= 1e-9 * p.norm().max(1.0));
    }

    #[test]
    fn rotor_spec_roundtrip(q in unit_quat()) {
        let c = q.quaternion();
        let spec = RotorSpec::from_quaternion(c).unwrap();
        prop_assert!(same_rotation(&spec.quaternion(), &q, 1e-12));
        prop_assert_eq!(rotor(&spec), rotor_from_quaternion(c).unwrap());
    }

    #[test]
    fn embed_extract_roundtrip(c in vec3(577.0), r in 0.0..=1e3f64) {
        let (c2, r2) = extract_sphere(&embed_sphere(&c, r).unwrap()).unwrap();
        let mag = 1.0f64.max(c.norm_squared() + r * r);
        prop_assert!((c2 - c).norm() <= 1e-12 * c.norm().max(1.0));
        prop_assert!((r2 * r2 - r * r).abs() <= 1e-12 * mag);
    }

    #[test]
    fn decompose_roundtrip((t, q, d) in motor_parts()) {
        let dec = decompose_motor(&motor(&t, &q, d)).unwrap();
        prop_assert!((dec.translation - t).norm() <= 1e-6);
        prop_assert!(same_rotation(&dec.rotation, &q, 1e-6));
        prop_assert!((dec.scale - d).abs() <= 1e-6);
        prop_assert!(dec.rotation.quaternion().w >= 0.0);
    }

    #[test]
    fn decomposition_matches_sandwich_on_corners((t, q, d) in motor_parts(), c in vec3(5.0), e in vec3(2.0)) {
        let m = motor(&t, &q, d);
        let dec = decompose_motor(&m).unwrap();
        let half = e.abs() + Vec3::repeat(0.05);
        let obj = SceneObject::new("o", c - half, c + half);
        for corner in obj.bbox.corners() {
            let a = sandwich_point(&m, &corner);
            let b = dec.apply_point(&corner);
            prop_assert!((a - b).norm() <= 1e-6, "{a} vs {b}");
        }
    }

    #[test]
    fn volume_under_motion(q in unit_quat(), t in vec3(10.0), e in vec3(2.0), s in 0.1..=10.0f64) {
        let half = e.abs() + Vec3::repeat(0.05);
        let obj = SceneObject::new("o", -half, half);
        let rigid = MotorDecomposition { translation: t, rotation: q, scale: 1.0 };
        let scaled = MotorDecomposition { translation: t, rotation: UnitQuaternion::identity(), scale: s };
        // rotation re-hulls the box, so only the scale-only motor preserves shape exactly
        let v0 = obj.bbox.volume();
        prop_assert!((apply_decomposition(&obj, &scaled).bbox.volume() - v0 * s.powi(3)).abs() <= 1e-9 * v0 * s.powi(3));
        prop_assert!(apply_decomposition(&obj, &rigid).bbox.volume() >= v0 * (1.0 - 1e-9));
    }

    #[test]
    fn sequential_translations_compose(a in vec3(100.0), b in vec3(100.0), c in vec3(5.0)) {
        let obj = SceneObject::new("o", c - Vec3::repeat(0.5), c + Vec3::repeat(0.5));
        let da = MotorDecomposition::from_translation(a);
        let db = MotorDecomposition::from_translation(b);
        let two = apply_decomposition(&apply_decomposition(&obj, &da), &db);
        let dec = decompose_motor(&(translator(&TranslationSpec::new(b).unwrap()) * translator(&TranslationSpec::new(a).unwrap()))).unwrap();
        let one = apply_decomposition(&obj, &dec);
        prop_assert!(one.bbox.max_abs_diff(&two.bbox) <= 1e-9 * (a.norm() + b.norm()).max(1.0));
    }

    #[test]
    fn composed_motor_on_centered_box((_, q1, d1) in motor_parts(), (t2, _, d2) in motor_parts()) {
        let obj = SceneObject::new("o", Vec3::new(-1.0, -0.5, -0.25), Vec3::new(1.0, 0.5, 0.25));
        // rotation only, so the intermediate hull stays origin centred
        let m1 = motor(&Vec3::zeros(), &q1, d1 / 10.0 + 0.5);
        let m2 = motor(&(t2 / 577.0), &UnitQuaternion::identity(), d2 / 10.0 + 0.5);
        let step = apply_decomposition(&apply_decomposition(&obj, &decompose_motor(&m1).unwrap()), &decompose_motor(&m2).unwrap());
        let once = apply_decomposition(&obj, &decompose_motor(&(m2 * m1)).unwrap());
        prop_assert!(step.bbox.max_abs_diff(&once.bbox) <= 1e-6);
    }
}
