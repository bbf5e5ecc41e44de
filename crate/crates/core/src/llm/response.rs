use nalgebra::{Matrix3, Rotation3, UnitQuaternion};
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::cga::{canonical_sign, check_versor, decompose_motor, CgaError, MotorDecomposition, Multivector, Vec3};
use crate::expr::{canonical_print, eval_str, ExprError};

use super::prompt::{ContextEntry, ObjectContext};
use super::StrategyKind;

/// Largest tolerated entry of `RᵀR − I` after removing the uniform scale.
/// Loose on purpose: models write cosines with four or five digits.
pub const MATRIX_ORTHONORMAL_TOL: f64 = 1e-3;
const LAST_ROW_TOL: f64 = 1e-9;

/// A transformation as the model wrote it, after JSON decoding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Payload {
    Cga(String),
    Matrix([[f64; 4]; 4]),
    Pose { position: [f64; 3], rotation: [f64; 3] },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectTransform {
    pub variable: String,
    pub payload: Payload,
    /// The evaluated expression, for the CGA strategy.
    pub motor: Option<Multivector>,
    pub decomposition: MotorDecomposition,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParsedResponse {
    pub entries: Vec<ObjectTransform>,
}

impl ParsedResponse {
    pub fn get(&self, variable: &str) -> Option<&ObjectTransform> {
        self.entries.iter().find(|e| e.variable == variable)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ResponseError {
    #[error("response does not match the schema: {0}")]
    Schema(String),
    #[error("transformation for {variable}: {source}")]
    Expr { variable: String, source: ExprError },
    #[error("transformation for {variable} is not a motor: {source}")]
    NotAVersor { variable: String, source: CgaError },
    #[error("matrix for {variable} is not rigid with uniform scale: {reason}")]
    NonRigidMatrix { variable: String, reason: String },
}

fn schema(msg: impl Into<String>) -> ResponseError {
    ResponseError::Schema(msg.into())
}

/// The JSON object inside `raw`, tolerating code fences and chatter around it.
fn extract_json(raw: &str) -> Result<Value, ResponseError> {
    let start = raw.find('{').ok_or_else(|| schema("no JSON object found"))?;
    let end = raw.rfind('}').ok_or_else(|| schema("no JSON object found"))?;
    if end < start {
        return Err(schema("no JSON object found"));
    }
    serde_json::from_str(&raw[start..=end]).map_err(|e| schema(format!("invalid JSON: {e}")))
}

/// Parses and validates a model response. Every variable of `ctx` must get
/// exactly one entry; unknown variables are rejected.
pub fn parse_response(
    strategy: StrategyKind,
    raw: &str,
    ctx: &ObjectContext,
) -> Result<ParsedResponse, ResponseError> {
    let root = extract_json(raw)?;
    let objects = root
        .get("objects")
        .and_then(Value::as_array)
        .ok_or_else(|| schema("missing `objects` array"))?;
    let mut entries: Vec<ObjectTransform> = Vec::with_capacity(objects.len());
    for (i, item) in objects.iter().enumerate() {
        let variable = item
            .get("name")
            .and_then(Value::as_str)
            .ok_or_else(|| schema(format!("objects[{i}] has no string `name`")))?;
        let entry = ctx
            .get(variable)
            .ok_or_else(|| schema(format!("unknown variable `{variable}`")))?;
        if entries.iter().any(|e| e.variable == variable) {
            return Err(schema(format!("variable `{variable}` appears twice")));
        }
        let value = item
            .get("transformation")
            .ok_or_else(|| schema(format!("objects[{i}] has no `transformation`")))?;
        entries.push(parse_entry(strategy, entry, value)?);
    }
    if let Some(missing) = ctx
        .entries
        .iter()
        .find(|c| !entries.iter().any(|e| e.variable == c.variable))
    {
        return Err(schema(format!("no transformation for `{}`", missing.variable)));
    }
    Ok(ParsedResponse { entries })
}

fn parse_entry(
    strategy: StrategyKind,
    ctx: &ContextEntry,
    value: &Value,
) -> Result<ObjectTransform, ResponseError> {
    let variable = ctx.variable.clone();
    match strategy {
        StrategyKind::Cga => {
            let text = value
                .as_str()
                .ok_or_else(|| schema(format!("transformation for `{variable}` must be a string")))?;
            let motor = eval_str(text).map_err(|source| ResponseError::Expr {
                variable: variable.clone(),
                source,
            })?;
            let decomposition = check_versor(&motor)
                .and_then(|_| decompose_motor(&motor))
                .map_err(|source| ResponseError::NotAVersor {
                    variable: variable.clone(),
                    source,
                })?;
            Ok(ObjectTransform {
                variable,
                payload: Payload::Cga(text.to_owned()),
                motor: Some(motor),
                decomposition,
            })
        }
        StrategyKind::Euclidean => {
            let m: [[f64; 4]; 4] = serde_json::from_value(value.clone()).map_err(|_| {
                schema(format!("transformation for `{variable}` must be a 4x4 number array"))
            })?;
            let decomposition = matrix_decomposition(&m).map_err(|reason| ResponseError::NonRigidMatrix {
                variable: variable.clone(),
                reason,
            })?;
            Ok(ObjectTransform {
                variable,
                payload: Payload::Matrix(m),
                motor: None,
                decomposition,
            })
        }
        StrategyKind::Omniverse => {
            let obj = value.as_object().ok_or_else(|| {
                schema(format!("transformation for `{variable}` must be an object"))
            })?;
            let position = number_triple(obj, "position", &variable)?;
            let rotation = number_triple(obj, "rotation", &variable)?;
            let decomposition = pose_decomposition(ctx, position, rotation);
            Ok(ObjectTransform {
                variable,
                payload: Payload::Pose { position, rotation },
                motor: None,
                decomposition,
            })
        }
    }
}

fn number_triple(obj: &Map<String, Value>, key: &str, variable: &str) -> Result<[f64; 3], ResponseError> {
    let v = obj
        .get(key)
        .ok_or_else(|| schema(format!("transformation for `{variable}` has no `{key}`")))?;
    let arr: [f64; 3] = serde_json::from_value(v.clone())
        .map_err(|_| schema(format!("`{key}` for `{variable}` must be three numbers")))?;
    if arr.iter().all(|x| x.is_finite()) {
        Ok(arr)
    } else {
        Err(schema(format!("`{key}` for `{variable}` is not finite")))
    }
}

fn unit(q: UnitQuaternion<f64>) -> UnitQuaternion<f64> {
    UnitQuaternion::new_normalize(canonical_sign(*q.quaternion()))
}

/// Splits `[[sR, t], [0, 1]]` into translation, rotation and scale.
pub fn matrix_decomposition(m: &[[f64; 4]; 4]) -> Result<MotorDecomposition, String> {
    if m.iter().flatten().any(|x| !x.is_finite()) {
        return Err("non-finite entry".into());
    }
    let last = [0.0, 0.0, 0.0, 1.0];
    if m[3].iter().zip(last).any(|(a, b)| (a - b).abs() > LAST_ROW_TOL) {
        return Err("last row must be [0, 0, 0, 1]".into());
    }
    let a = Matrix3::from_fn(|r, c| m[r][c]);
    let det = a.determinant();
    if det <= 0.0 {
        return Err(format!("determinant {det} is not positive"));
    }
    let scale = det.cbrt();
    let r = a / scale;
    let err = (r.transpose() * r - Matrix3::identity()).amax();
    if err > MATRIX_ORTHONORMAL_TOL {
        return Err(format!("rotation part deviates from orthonormal by {err:e}"));
    }
    let rotation = unit(UnitQuaternion::from_rotation_matrix(&Rotation3::from_matrix(&r)));
    Ok(MotorDecomposition {
        translation: Vec3::new(m[0][3], m[1][3], m[2][3]),
        rotation,
        scale,
    })
}

/// Intrinsic Z-Y-X Euler angles in degrees, given as `[x, y, z]`.
pub fn euler_to_quaternion(deg: [f64; 3]) -> UnitQuaternion<f64> {
    let [x, y, z] = deg.map(f64::to_radians);
    UnitQuaternion::from_euler_angles(x, y, z)
}

pub fn quaternion_to_euler(q: &UnitQuaternion<f64>) -> [f64; 3] {
    let (x, y, z) = q.euler_angles();
    [x.to_degrees(), y.to_degrees(), z.to_degrees()]
}

/// The relative motion taking the current pose in `ctx` to the absolute
/// pose `(position, rotation)`.
fn pose_decomposition(ctx: &ContextEntry, position: [f64; 3], rotation: [f64; 3]) -> MotorDecomposition {
    let q0 = euler_to_quaternion(ctx.euler_degrees);
    let q1 = euler_to_quaternion(rotation);
    let dq = unit(q1 * q0.inverse());
    MotorDecomposition {
        translation: Vec3::from(position) - dq * ctx.center(),
        rotation: dq,
        scale: 1.0,
    }
}

/// Canonical payload for `d` under `strategy`, the inverse of
/// [`parse_response`] for one entry. The pose form cannot carry a scale and
/// drops it.
pub fn payload_for(strategy: StrategyKind, d: &MotorDecomposition, ctx: &ContextEntry) -> Payload {
    match strategy {
        StrategyKind::Cga => Payload::Cga(canonical_print(&d.to_motor())),
        StrategyKind::Euclidean => {
            let r = d.rotation.to_rotation_matrix().into_inner() * d.scale;
            let t = d.translation;
            Payload::Matrix([
                [r[(0, 0)], r[(0, 1)], r[(0, 2)], t.x],
                [r[(1, 0)], r[(1, 1)], r[(1, 2)], t.y],
                [r[(2, 0)], r[(2, 1)], r[(2, 2)], t.z],
                [0.0, 0.0, 0.0, 1.0],
            ])
        }
        StrategyKind::Omniverse => {
            let q0 = euler_to_quaternion(ctx.euler_degrees);
            let p = d.rotation * ctx.center() + d.translation;
            Payload::Pose {
                position: [p.x, p.y, p.z],
                rotation: quaternion_to_euler(&(d.rotation * q0)),
            }
        }
    }
}

/// Wraps payloads in the response envelope.
pub fn response_text<'a>(entries: impl IntoIterator<Item = (&'a str, &'a Payload)>) -> String {
    let objects: Vec<Value> = entries
        .into_iter()
        .map(|(name, payload)| json!({"name": name, "transformation": payload}))
        .collect();
    json!({ "objects": objects }).to_string()
}

/// Rotation angle between two decompositions' quaternions, ignoring sign.
pub fn rotation_distance(a: &UnitQuaternion<f64>, b: &UnitQuaternion<f64>) -> f64 {
    let dot: f64 = a.coords.dot(&b.coords);
    2.0 * dot.abs().min(1.0).acos()
}
