//! Conformal embeddings, versor constructors and motor decomposition.

use nalgebra::{Quaternion, UnitQuaternion, Vector3};
use serde::{Deserialize, Serialize};

use super::multivector::{blade, Multivector};
use super::CgaError;

pub type Vec3 = Vector3<f64>;

/// Tolerances used by the versor checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Relative non-scalar residue allowed in `M·reverse(M)`.
    pub versor: f64,
    /// Allowed deviation of a quaternion/rotor norm from 1.
    pub unit: f64,
    /// Relative residue allowed outside the round blades when extracting a
    /// sphere.
    pub round: f64,
    /// Relative residue allowed outside `{1, e12, e13, e23}` in `T⁻¹MD⁻¹`.
    pub motor: f64,
    /// Below this magnitude the `eo` weight of a round counts as zero.
    pub weight: f64,
    /// Squared radii in `[-radius_clamp, 0)` are clamped to zero.
    pub radius_clamp: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            versor: 1e-9,
            unit: 1e-9,
            round: 1e-9,
            motor: 1e-6,
            weight: 1e-12,
            radius_clamp: 1e-9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TranslationSpec {
    pub t: [f64; 3],
}

impl TranslationSpec {
    pub fn new(t: Vec3) -> Result<Self, CgaError> {
        if !t.iter().all(|c| c.is_finite()) {
            return Err(CgaError::NonFinite);
        }
        Ok(Self { t: [t.x, t.y, t.z] })
    }

    pub fn vector(&self) -> Vec3 {
        Vec3::new(self.t[0], self.t[1], self.t[2])
    }
}

/// Rotor `a + b e12 + c e13 + d e23`, normalised to unit length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotorSpec {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl RotorSpec {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self, CgaError> {
        let norm = (a * a + b * b + c * c + d * d).sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > Tolerances::default().unit {
            return Err(CgaError::NotUnit { norm });
        }
        Ok(Self { a, b, c, d })
    }

    /// The rotor for a unit quaternion `w + xi + yj + zk`. The quaternion
    /// `a − d i + c j − b k` corresponds to `a + b e12 + c e13 + d e23`.
    pub fn from_quaternion(q: &Quaternion<f64>) -> Result<Self, CgaError> {
        Self::new(q.w, -q.k, q.j, -q.i)
    }

    pub fn quaternion(&self) -> UnitQuaternion<f64> {
        UnitQuaternion::new_unchecked(Quaternion::new(self.a, -self.d, self.c, -self.b))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DilationSpec {
    pub d: f64,
}

impl DilationSpec {
    pub fn new(d: f64) -> Result<Self, CgaError> {
        if !(d.is_finite() && d > 0.0) {
            return Err(CgaError::InvalidScale { scale: d });
        }
        Ok(Self { d })
    }
}

/// A motor split into translation, rotation and uniform scale, applied to a
/// point `p` as `translation + rotation·(scale·p)`.
///
/// Serialized as `{"translation": [x,y,z], "rotation": [w,x,y,z], "scale": s}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "DecompositionWire", try_from = "DecompositionWire")]
pub struct MotorDecomposition {
    pub translation: Vec3,
    pub rotation: UnitQuaternion<f64>,
    pub scale: f64,
}

#[derive(Serialize, Deserialize)]
struct DecompositionWire {
    translation: [f64; 3],
    rotation: [f64; 4],
    scale: f64,
}

impl From<MotorDecomposition> for DecompositionWire {
    fn from(d: MotorDecomposition) -> Self {
        let q = d.rotation.quaternion();
        Self {
            translation: [d.translation.x, d.translation.y, d.translation.z],
            rotation: [q.w, q.i, q.j, q.k],
            scale: d.scale,
        }
    }
}

impl TryFrom<DecompositionWire> for MotorDecomposition {
    type Error = CgaError;

    fn try_from(w: DecompositionWire) -> Result<Self, CgaError> {
        let [qw, qx, qy, qz] = w.rotation;
        let spec = RotorSpec::from_quaternion(&Quaternion::new(qw, qx, qy, qz))?;
        Ok(Self {
            translation: TranslationSpec::new(Vec3::from(w.translation))?.vector(),
            rotation: spec.quaternion(),
            scale: DilationSpec::new(w.scale)?.d,
        })
    }
}

impl Default for MotorDecomposition {
    fn default() -> Self {
        Self::identity()
    }
}

impl MotorDecomposition {
    pub fn identity() -> Self {
        Self {
            translation: Vec3::zeros(),
            rotation: UnitQuaternion::identity(),
            scale: 1.0,
        }
    }

    pub fn from_translation(t: Vec3) -> Self {
        Self {
            translation: t,
            ..Self::identity()
        }
    }

    pub fn apply_point(&self, p: &Vec3) -> Vec3 {
        self.translation + self.rotation * (p * self.scale)
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &MotorDecomposition) -> MotorDecomposition {
        MotorDecomposition {
            translation: next.translation + next.rotation * (self.translation * next.scale),
            rotation: next.rotation * self.rotation,
            scale: next.scale * self.scale,
        }
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        self.translation.norm() <= tol
            && (self.scale - 1.0).abs() <= tol
            && self.rotation.angle() <= tol
    }

    /// Rebuilds the motor `T·R·D`.
    pub fn to_motor(&self) -> Multivector {
        translator_from(&self.translation)
            * rotor_from_unit(&self.rotation)
            * dilator_unchecked(self.scale)
    }
}

/// Conformal point `x + 0.5|x|² einf + eo`.
pub fn embed_point(x: &Vec3) -> Multivector {
    embed_sphere_unchecked(x, 0.0)
}

/// Dual sphere `x + 0.5(|x|² − r²) einf + eo`.
pub fn embed_sphere(center: &Vec3, radius: f64) -> Result<Multivector, CgaError> {
    if !(radius >= 0.0 && radius.is_finite()) || !center.iter().all(|c| c.is_finite()) {
        return Err(CgaError::NonFinite);
    }
    Ok(embed_sphere_unchecked(center, radius))
}

fn embed_sphere_unchecked(center: &Vec3, radius: f64) -> Multivector {
    let alpha = 0.5 * (center.norm_squared() - radius * radius);
    Multivector::vector(center.x, center.y, center.z) + Multivector::einf() * alpha
        + Multivector::eo()
}

/// Recovers center and radius from a (scaled) sphere or point.
pub fn extract_sphere(s: &Multivector) -> Result<(Vec3, f64), CgaError> {
    extract_sphere_with(s, &Tolerances::default())
}

pub fn extract_sphere_with(s: &Multivector, tol: &Tolerances) -> Result<(Vec3, f64), CgaError> {
    let c4 = s[blade::E4];
    let c5 = s[blade::E5];
    // eo contributes (-0.5, 0.5) and einf (1, 1) to (e4, e5)
    let weight = c5 - c4;
    if !weight.is_finite() || weight.abs() < tol.weight {
        return Err(CgaError::ZeroWeight);
    }
    let normalized = *s * (1.0 / weight);
    let center = Vec3::new(
        normalized[blade::E1],
        normalized[blade::E2],
        normalized[blade::E3],
    );
    let alpha = 0.5 * (normalized[blade::E4] + normalized[blade::E5]);

    let scale = normalized.max_abs_coeff().max(1.0);
    let residue = normalized
        .terms()
        .filter(|(i, _)| !matches!(*i, blade::E1 | blade::E2 | blade::E3 | blade::E4 | blade::E5))
        .fold(0.0f64, |m, (_, c)| m.max(c.abs()));
    if residue > tol.round * scale {
        return Err(CgaError::NotARound { residue });
    }

    let mut r2 = center.norm_squared() - 2.0 * alpha;
    if r2 < 0.0 {
        if r2 >= -tol.radius_clamp * scale {
            r2 = 0.0;
        } else {
            return Err(CgaError::ImaginaryRadius { radius_squared: r2 });
        }
    }
    Ok((center, r2.sqrt()))
}

/// Translator `1 − 0.5 t einf`.
pub fn translator(spec: &TranslationSpec) -> Multivector {
    translator_from(&spec.vector())
}

/// Inverse translator `1 + 0.5 t einf`.
pub fn translator_inverse(spec: &TranslationSpec) -> Multivector {
    translator_from(&-spec.vector())
}

fn translator_from(t: &Vec3) -> Multivector {
    Multivector::scalar(1.0) - Multivector::vector(0.5 * t.x, 0.5 * t.y, 0.5 * t.z) * Multivector::einf()
}

pub fn rotor(spec: &RotorSpec) -> Multivector {
    let mut r = Multivector::scalar(spec.a);
    r[blade::E12] = spec.b;
    r[blade::E13] = spec.c;
    r[blade::E23] = spec.d;
    r
}

/// Inverse of a unit rotor: the bivector part changes sign.
pub fn rotor_inverse(spec: &RotorSpec) -> Multivector {
    rotor(&RotorSpec {
        a: spec.a,
        b: -spec.b,
        c: -spec.c,
        d: -spec.d,
    })
}

pub fn rotor_from_quaternion(q: &Quaternion<f64>) -> Result<Multivector, CgaError> {
    Ok(rotor(&RotorSpec::from_quaternion(q)?))
}

fn rotor_from_unit(q: &UnitQuaternion<f64>) -> Multivector {
    let q = q.quaternion();
    rotor(&RotorSpec {
        a: q.w,
        b: -q.k,
        c: q.j,
        d: -q.i,
    })
}

/// Reads a rotor back as a unit quaternion. Fails if `r` has components
/// outside `{1, e12, e13, e23}` or is not unit length.
pub fn quaternion_from_rotor(r: &Multivector) -> Result<UnitQuaternion<f64>, CgaError> {
    let tol = Tolerances::default();
    let residue = rotor_residue(r);
    if residue > tol.unit {
        return Err(CgaError::NotAMotor { residue });
    }
    let spec = RotorSpec::new(r[0], r[blade::E12], r[blade::E13], r[blade::E23])?;
    Ok(spec.quaternion())
}

fn rotor_residue(r: &Multivector) -> f64 {
    r.terms()
        .filter(|(i, _)| !matches!(*i, blade::SCALAR | blade::E12 | blade::E13 | blade::E23))
        .map(|(_, c)| c * c)
        .sum::<f64>()
        .sqrt()
}

/// Dilator `1 + (1−d)/(1+d) e45` scaling by `d` about the origin. `e45`
/// equals `einf ∧ eo` exactly.
pub fn dilator(spec: &DilationSpec) -> Multivector {
    dilator_unchecked(spec.d)
}

fn dilator_unchecked(d: f64) -> Multivector {
    let mut m = Multivector::scalar(1.0);
    m[blade::E45] = (1.0 - d) / (1.0 + d);
    m
}

/// `(1+d)²/4d + (d²−1)/4d e45`, the exact inverse of [`dilator`].
pub fn dilator_inverse(spec: &DilationSpec) -> Multivector {
    let d = spec.d;
    let mut m = Multivector::scalar((1.0 + d) * (1.0 + d) / (4.0 * d));
    m[blade::E45] = (d * d - 1.0) / (4.0 * d);
    m
}

/// `M⁻¹ = reverse(M) / ⟨M reverse(M)⟩₀`, after checking `M reverse(M)` is
/// scalar.
pub fn versor_inverse(m: &Multivector) -> Result<Multivector, CgaError> {
    versor_inverse_with(m, &Tolerances::default())
}

pub fn versor_inverse_with(m: &Multivector, tol: &Tolerances) -> Result<Multivector, CgaError> {
    if !m.is_finite() {
        return Err(CgaError::NonFinite);
    }
    let rev = m.reverse();
    let norm = *m * rev;
    let scale = m.coeff_norm_squared();
    let residue = norm
        .terms()
        .filter(|(i, _)| *i != blade::SCALAR)
        .fold(0.0f64, |acc, (_, c)| acc.max(c.abs()));
    let s = norm.scalar_part();
    if scale == 0.0 || residue > tol.versor * scale || s.abs() <= tol.versor * scale {
        return Err(CgaError::NotAVersor {
            residue: if scale == 0.0 { 0.0 } else { residue / scale },
        });
    }
    Ok(rev * (1.0 / s))
}

/// Checks that `m` is an invertible versor.
pub fn check_versor(m: &Multivector) -> Result<(), CgaError> {
    versor_inverse(m).map(|_| ())
}

/// Sandwich product `M X M⁻¹`.
pub fn sandwich(m: &Multivector, x: &Multivector) -> Result<Multivector, CgaError> {
    sandwich_with(m, x, &Tolerances::default())
}

pub fn sandwich_with(
    m: &Multivector,
    x: &Multivector,
    tol: &Tolerances,
) -> Result<Multivector, CgaError> {
    let inv = versor_inverse_with(m, tol)?;
    let out = *m * *x * inv;
    if !out.is_finite() {
        return Err(CgaError::NonFinite);
    }
    Ok(out)
}

/// Splits `M = T·R·D`.
///
/// The unit sphere at the origin is mapped through `M`; its image has the
/// translation as center and the scale as radius. The rotor is what remains
/// of `T⁻¹ M D⁻¹`, renormalised, with the quaternion sign chosen so the
/// scalar part is nonnegative.
pub fn decompose_motor(m: &Multivector) -> Result<MotorDecomposition, CgaError> {
    decompose_motor_with(m, &Tolerances::default())
}

pub fn decompose_motor_with(
    m: &Multivector,
    tol: &Tolerances,
) -> Result<MotorDecomposition, CgaError> {
    // The image of the unit sphere `eo − 0.5 einf` is taken term by term:
    // `M eo M⁻¹ = w·P(t)` and `M einf M⁻¹ = λ einf` with `λ/w = d²`. Reading
    // the radius from `|c|² − 2α` instead cancels catastrophically for
    // large translations.
    let inv = versor_inverse_with(m, tol)?;
    let origin = *m * Multivector::eo() * inv;
    let infinity = *m * Multivector::einf() * inv;
    if !origin.is_finite() || !infinity.is_finite() {
        return Err(CgaError::NonFinite);
    }
    let not_motor = |residue| CgaError::NotAMotor { residue };
    let (center, _) = extract_sphere_with(&origin, tol).map_err(|e| match e {
        CgaError::ZeroWeight | CgaError::NotARound { .. } | CgaError::ImaginaryRadius { .. } => {
            not_motor(f64::INFINITY)
        }
        other => other,
    })?;
    let weight = origin[blade::E5] - origin[blade::E4];
    let lambda = 0.5 * (infinity[blade::E4] + infinity[blade::E5]);
    let stray = infinity
        .terms()
        .map(|(i, c)| match i {
            blade::E4 | blade::E5 => (c - lambda).abs(),
            _ => c.abs(),
        })
        .fold(0.0f64, f64::max);
    if stray > tol.round * lambda.abs().max(1.0) {
        return Err(not_motor(stray));
    }
    let radius = (lambda / weight).sqrt();
    if radius <= 0.0 || !radius.is_finite() {
        return Err(not_motor(f64::INFINITY));
    }

    let t_inv = translator_from(&-center);
    let d_inv = dilator_inverse(&DilationSpec { d: radius });
    let r = t_inv * *m * d_inv;

    let rotor_norm =
        (r[0] * r[0] + r[blade::E12].powi(2) + r[blade::E13].powi(2) + r[blade::E23].powi(2))
            .sqrt();
    if rotor_norm == 0.0 || !rotor_norm.is_finite() {
        return Err(CgaError::NotAMotor {
            residue: f64::INFINITY,
        });
    }
    let residue = rotor_residue(&r) / rotor_norm;
    if residue > tol.motor {
        return Err(CgaError::NotAMotor { residue });
    }
    let q = Quaternion::new(
        r[0] / rotor_norm,
        -r[blade::E23] / rotor_norm,
        r[blade::E13] / rotor_norm,
        -r[blade::E12] / rotor_norm,
    );
    Ok(MotorDecomposition {
        translation: center,
        rotation: UnitQuaternion::new_normalize(canonical_sign(q)),
        scale: radius,
    })
}

/// Picks the representative of `±q` with nonnegative scalar part, or with the
/// first nonzero vector component nonnegative when the scalar part vanishes.
pub fn canonical_sign(q: Quaternion<f64>) -> Quaternion<f64> {
    const ZERO: f64 = 1e-12;
    let key = if q.w.abs() > ZERO {
        q.w
    } else {
        [q.i, q.j, q.k]
            .into_iter()
            .find(|c| c.abs() > ZERO)
            .unwrap_or(0.0)
    };
    if key < 0.0 {
        -q
    } else {
        q
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn v(x: f64, y: f64, z: f64) -> Vec3 {
        Vec3::new(x, y, z)
    }

    #[test]
    fn embedding_examples() {
        assert_eq!(embed_point(&v(0.0, 0.0, 0.0)), Multivector::eo());
        assert_eq!(
            embed_point(&v(1.0, 0.0, 0.0)),
            Multivector::basis(blade::E1) + Multivector::einf() * 0.5 + Multivector::eo()
        );
        // 0.5(1 + 4 + 9) = 7
        assert_eq!(
            embed_point(&v(1.0, 2.0, 3.0)),
            Multivector::vector(1.0, 2.0, 3.0) + Multivector::einf() * 7.0 + Multivector::eo()
        );
        assert_eq!(
            embed_sphere(&v(0.0, 0.0, 0.0), 1.0).unwrap(),
            Multivector::einf() * -0.5 + Multivector::eo()
        );
        assert_eq!(embed_sphere(&v(0.0, 0.0, 0.0), 0.0).unwrap(), Multivector::eo());
        // 0.5(4 − 1) = 1.5
        assert_eq!(
            embed_sphere(&v(2.0, 0.0, 0.0), 1.0).unwrap(),
            Multivector::vector(2.0, 0.0, 0.0) + Multivector::einf() * 1.5 + Multivector::eo()
        );
        assert!(embed_sphere(&v(0.0, 0.0, 0.0), -1.0).is_err());
    }

    #[test]
    fn point_inner_product_reads_coordinates() {
        let p = embed_point(&v(3.0, 5.0, 7.0));
        assert_eq!(p | Multivector::basis(blade::E2), Multivector::scalar(5.0));
        assert_eq!(p | Multivector::basis(blade::E3), Multivector::scalar(7.0));
    }

    #[test]
    fn extraction_examples() {
        let (c, r) = extract_sphere(&(Multivector::einf() * -0.5 + Multivector::eo())).unwrap();
        assert_eq!((c, r), (v(0.0, 0.0, 0.0), 1.0));
        let (c, r) = extract_sphere(&Multivector::eo()).unwrap();
        assert_eq!((c, r), (v(0.0, 0.0, 0.0), 0.0));
        let s = (Multivector::vector(2.0, 0.0, 0.0) + Multivector::einf() * 1.5 + Multivector::eo())
            * 2.0;
        let (c, r) = extract_sphere(&s).unwrap();
        assert_eq!((c, r), (v(2.0, 0.0, 0.0), 1.0));
    }

    #[test]
    fn extraction_errors() {
        assert_eq!(
            extract_sphere(&Multivector::einf()),
            Err(CgaError::ZeroWeight)
        );
        let bad = Multivector::eo() + Multivector::basis(blade::E12);
        assert!(matches!(extract_sphere(&bad), Err(CgaError::NotARound { .. })));
        // imaginary sphere: alpha too large for |x|² = 0
        let imaginary = Multivector::eo() + Multivector::einf() * 1.0;
        assert!(matches!(
            extract_sphere(&imaginary),
            Err(CgaError::ImaginaryRadius { .. })
        ));
        // tiny negative r² from round-off is clamped
        let nearly = Multivector::eo() + Multivector::einf() * 1e-11;
        assert_eq!(extract_sphere(&nearly).unwrap().1, 0.0);
    }

    #[test]
    fn translator_examples() {
        let zero = TranslationSpec::new(v(0.0, 0.0, 0.0)).unwrap();
        assert_eq!(translator(&zero), Multivector::scalar(1.0));
        let t = TranslationSpec::new(v(2.0, 0.0, 0.0)).unwrap();
        let expected = Multivector::scalar(1.0) - Multivector::basis(blade::E1) * Multivector::einf();
        assert_eq!(translator(&t), expected);
        let t = TranslationSpec::new(v(1.0, 2.0, 3.0)).unwrap();
        let moved = sandwich(&translator(&t), &embed_point(&v(0.0, 0.0, 0.0))).unwrap();
        assert!(moved.approx_eq(&embed_point(&v(1.0, 2.0, 3.0)), 1e-12));
    }

    #[test]
    fn translator_times_inverse_is_one() {
        let t = TranslationSpec::new(v(0.3, -1.7, 2.5)).unwrap();
        let prod = translator(&t) * translator_inverse(&t);
        assert!(prod.approx_eq(&Multivector::scalar(1.0), 1e-15));
    }

    #[test]
    fn rotor_identity_and_inverse() {
        let q = Quaternion::new(1.0, 0.0, 0.0, 0.0);
        assert_eq!(rotor_from_quaternion(&q).unwrap(), Multivector::scalar(1.0));
        let spec = RotorSpec::new(0.5, 0.5, 0.5, 0.5).unwrap();
        let prod = rotor(&spec) * rotor_inverse(&spec);
        assert!(prod.approx_eq(&Multivector::scalar(1.0), 1e-15));
        assert!(matches!(
            rotor_from_quaternion(&Quaternion::new(1.0, 1.0, 0.0, 0.0)),
            Err(CgaError::NotUnit { .. })
        ));
    }

    #[test]
    fn quarter_turn_about_z_maps_x_to_y() {
        let q = UnitQuaternion::from_axis_angle(&Vec3::z_axis(), FRAC_PI_2);
        let r = rotor_from_quaternion(q.quaternion()).unwrap();
        let image = sandwich(&r, &embed_point(&v(1.0, 0.0, 0.0))).unwrap();
        assert!(image.approx_eq(&embed_point(&v(0.0, 1.0, 0.0)), 1e-12));
    }

    #[test]
    fn dilator_examples() {
        assert_eq!(dilator(&DilationSpec::new(1.0).unwrap()), Multivector::scalar(1.0));
        let d2 = dilator(&DilationSpec::new(2.0).unwrap());
        assert_eq!(d2[0], 1.0);
        assert!((d2[blade::E45] + 1.0 / 3.0).abs() < 1e-15);
        for d in [0.5, 2.0, 3.0] {
            let spec = DilationSpec::new(d).unwrap();
            let prod = dilator(&spec) * dilator_inverse(&spec);
            assert!(prod.approx_eq(&Multivector::scalar(1.0), 1e-12), "d={d}");
        }
        assert!(DilationSpec::new(0.0).is_err());
        assert!(DilationSpec::new(-2.0).is_err());
    }

    #[test]
    fn sandwich_examples() {
        let x = embed_sphere(&v(1.0, 2.0, 3.0), 0.5).unwrap();
        assert_eq!(sandwich(&Multivector::scalar(1.0), &x).unwrap(), x);

        let t = translator(&TranslationSpec::new(v(0.0, 0.0, 5.0)).unwrap());
        let moved = sandwich(&t, &embed_sphere(&v(0.0, 0.0, 0.0), 2.0).unwrap()).unwrap();
        assert!(moved.approx_eq(&embed_sphere(&v(0.0, 0.0, 5.0), 2.0).unwrap(), 1e-12));

        let d = dilator(&DilationSpec::new(2.0).unwrap());
        let grown = sandwich(&d, &embed_sphere(&v(0.0, 0.0, 0.0), 1.0).unwrap()).unwrap();
        let (c, r) = extract_sphere(&grown).unwrap();
        assert!(c.norm() < 1e-12);
        assert!((r - 2.0).abs() < 1e-12);
    }

    #[test]
    fn sandwich_rejects_non_versor() {
        let m = Multivector::scalar(1.0) + Multivector::basis(blade::E1);
        assert!(matches!(
            sandwich(&m, &Multivector::eo()),
            Err(CgaError::NotAVersor { .. })
        ));
        assert!(matches!(
            sandwich(&Multivector::zero(), &Multivector::eo()),
            Err(CgaError::NotAVersor { .. })
        ));
    }

    #[test]
    fn decomposition_examples() {
        let t = translator(&TranslationSpec::new(v(1.0, 2.0, 3.0)).unwrap());
        let dec = decompose_motor(&t).unwrap();
        assert!((dec.translation - v(1.0, 2.0, 3.0)).norm() < 1e-12);
        assert!(dec.rotation.angle() < 1e-12);
        assert!((dec.scale - 1.0).abs() < 1e-12);

        let d = dilator(&DilationSpec::new(2.0).unwrap());
        let dec = decompose_motor(&d).unwrap();
        assert!(dec.translation.norm() < 1e-12);
        assert!(dec.rotation.angle() < 1e-12);
        assert!((dec.scale - 2.0).abs() < 1e-12);
    }

    #[test]
    fn decomposition_rejects_reflection() {
        // a single vector is a versor (a reflection) but not a motor
        let m = Multivector::basis(blade::E1);
        assert!(matches!(decompose_motor(&m), Err(CgaError::NotAMotor { .. })));
    }

    #[test]
    fn negated_motor_gives_same_decomposition() {
        let dec = MotorDecomposition {
            translation: v(1.0, -2.0, 0.5),
            rotation: UnitQuaternion::from_axis_angle(&Vec3::y_axis(), 0.7),
            scale: 1.5,
        };
        let a = decompose_motor(&dec.to_motor()).unwrap();
        let b = decompose_motor(&(-dec.to_motor())).unwrap();
        assert!((a.translation - b.translation).norm() < 1e-12);
        assert!((a.rotation.quaternion() - b.rotation.quaternion()).norm() < 1e-12);
        assert!(a.rotation.w >= 0.0);
    }

    #[test]
    fn canonical_sign_rules() {
        let q = canonical_sign(Quaternion::new(-0.5, 0.5, 0.5, 0.5));
        assert_eq!(q, Quaternion::new(0.5, -0.5, -0.5, -0.5));
        let q = canonical_sign(Quaternion::new(0.0, 0.0, -1.0, 0.0));
        assert_eq!(q, Quaternion::new(-0.0, -0.0, 1.0, -0.0));
    }

    #[test]
    fn then_matches_motor_product() {
        let a = MotorDecomposition {
            translation: v(1.0, 0.0, 0.0),
            rotation: UnitQuaternion::from_axis_angle(&Vec3::z_axis(), FRAC_PI_2),
            scale: 2.0,
        };
        let b = MotorDecomposition {
            translation: v(0.0, 3.0, -1.0),
            rotation: UnitQuaternion::from_axis_angle(&Vec3::x_axis(), 0.3),
            scale: 0.5,
        };
        let composed = a.then(&b);
        let from_motor = decompose_motor(&(b.to_motor() * a.to_motor())).unwrap();
        assert!((composed.translation - from_motor.translation).norm() < 1e-9);
        assert!((composed.scale - from_motor.scale).abs() < 1e-9);
        assert!(composed.rotation.angle_to(&from_motor.rotation) < 1e-9);
    }
}
