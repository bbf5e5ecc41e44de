//! Conformal geometric algebra kernel: Cl(4,1) multivectors, versors and
//! motor decomposition.

mod multivector;
mod versor;

pub use multivector::{
    blade, blade_from_name, blade_grade, blade_name, blade_product_sign, Multivector, BLADE_COUNT,
};
pub use versor::{
    canonical_sign, check_versor, decompose_motor, decompose_motor_with, dilator, dilator_inverse,
    embed_point, embed_sphere, extract_sphere, extract_sphere_with, quaternion_from_rotor, rotor,
    rotor_from_quaternion, rotor_inverse, sandwich, sandwich_with, translator, translator_inverse,
    versor_inverse, versor_inverse_with, DilationSpec, MotorDecomposition, RotorSpec, Tolerances,
    TranslationSpec, Vec3,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CgaError {
    #[error("round has zero eo weight")]
    ZeroWeight,
    #[error("multivector is not a sphere or point (residue {residue:e})")]
    NotARound { residue: f64 },
    #[error("sphere has imaginary radius (r² = {radius_squared})")]
    ImaginaryRadius { radius_squared: f64 },
    #[error("quaternion or rotor is not unit length (norm {norm})")]
    NotUnit { norm: f64 },
    #[error("scale factor must be positive and finite, got {scale}")]
    InvalidScale { scale: f64 },
    #[error("multivector is not an invertible versor (relative residue {residue:e})")]
    NotAVersor { residue: f64 },
    #[error("versor is not a translation-rotation-dilation motor (residue {residue:e})")]
    NotAMotor { residue: f64 },
    #[error("non-finite coefficient")]
    NonFinite,
}
