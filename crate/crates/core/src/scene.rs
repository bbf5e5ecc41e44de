//! Scenes of named objects with axis-aligned bounding boxes.
//!
//! Scene files are UTF-8 JSON:
//!
//! ```json
//! {"id": "room", "bounds": {"min": [0,0,0], "max": [6,5,3]},
//!  "objects": [{"name": "sofa", "min": [1,1,0], "max": [3,2,0.9],
//!               "mesh_uri": "sofa.glb", "orientation": [1,0,0,0], "scale": 1}]}
//! ```
//!
//! `bounds`, `mesh_uri`, `orientation` (`[w,x,y,z]`) and `scale` are optional.

use nalgebra::{Quaternion, UnitQuaternion};
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::cga::{MotorDecomposition, Vec3};

/// Slack for box predicates, absorbing rounding from rotated corners.
pub const GEOM_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aabb {
    pub min: Vec3,
    pub max: Vec3,
}

impl Aabb {
    pub fn new(min: Vec3, max: Vec3) -> Self {
        Self { min, max }
    }

    pub fn from_center_extents(center: Vec3, extents: Vec3) -> Self {
        let half = extents * 0.5;
        Self {
            min: center - half,
            max: center + half,
        }
    }

    pub fn center(&self) -> Vec3 {
        (self.min + self.max) * 0.5
    }

    /// Width, depth and height along x, y and z.
    pub fn extents(&self) -> Vec3 {
        self.max - self.min
    }

    pub fn volume(&self) -> f64 {
        let e = self.extents();
        e.x * e.y * e.z
    }

    pub fn corners(&self) -> [Vec3; 8] {
        let (a, b) = (self.min, self.max);
        [
            Vec3::new(a.x, a.y, a.z),
            Vec3::new(b.x, a.y, a.z),
            Vec3::new(a.x, b.y, a.z),
            Vec3::new(b.x, b.y, a.z),
            Vec3::new(a.x, a.y, b.z),
            Vec3::new(b.x, a.y, b.z),
            Vec3::new(a.x, b.y, b.z),
            Vec3::new(b.x, b.y, b.z),
        ]
    }

    pub fn hull<'a>(points: impl IntoIterator<Item = &'a Vec3>) -> Option<Aabb> {
        let mut iter = points.into_iter();
        let first = *iter.next()?;
        let mut out = Aabb::new(first, first);
        for p in iter {
            out.min = out.min.inf(p);
            out.max = out.max.sup(p);
        }
        Some(out)
    }

    pub fn union(&self, other: &Aabb) -> Aabb {
        Aabb::new(self.min.inf(&other.min), self.max.sup(&other.max))
    }

    pub fn translated(&self, offset: &Vec3) -> Aabb {
        Aabb::new(self.min + offset, self.max + offset)
    }

    /// Grows by `dxy` along x and y and by `dz` along z, on every side.
    pub fn inflated(&self, dxy: f64, dz: f64) -> Aabb {
        let d = Vec3::new(dxy, dxy, dz);
        Aabb::new(self.min - d, self.max + d)
    }

    /// Intersection with positive volume; touching faces do not count, nor
    /// do penetrations within [`GEOM_EPS`] left by rounding.
    pub fn overlaps(&self, other: &Aabb) -> bool {
        (0..3).all(|k| self.min[k] < other.max[k] - GEOM_EPS && other.min[k] < self.max[k] - GEOM_EPS)
    }

    /// Containment up to [`GEOM_EPS`].
    pub fn contains(&self, other: &Aabb) -> bool {
        (0..3).all(|k| self.min[k] - GEOM_EPS <= other.min[k] && other.max[k] <= self.max[k] + GEOM_EPS)
    }

    pub fn is_valid(&self) -> bool {
        (0..3).all(|k| self.min[k].is_finite() && self.max[k].is_finite() && self.min[k] <= self.max[k])
    }

    pub fn max_abs_diff(&self, other: &Aabb) -> f64 {
        (self.min - other.min).amax().max((self.max - other.max).amax())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SceneObject {
    pub name: String,
    pub bbox: Aabb,
    pub mesh_uri: Option<String>,
    pub orientation: UnitQuaternion<f64>,
    pub scale: f64,
}

impl SceneObject {
    pub fn new(name: impl Into<String>, min: Vec3, max: Vec3) -> Self {
        Self {
            name: name.into(),
            bbox: Aabb::new(min, max),
            mesh_uri: None,
            orientation: UnitQuaternion::identity(),
            scale: 1.0,
        }
    }

    pub fn center(&self) -> Vec3 {
        self.bbox.center()
    }

    pub fn extents(&self) -> Vec3 {
        self.bbox.extents()
    }
}

/// Applies a decomposed motor to an object. Corners go through
/// scale-rotate-translate about the world origin and the new box is the
/// axis-aligned hull of the eight images.
pub fn apply_decomposition(obj: &SceneObject, d: &MotorDecomposition) -> SceneObject {
    let corners = obj.bbox.corners().map(|c| d.apply_point(&c));
    let bbox = Aabb::hull(corners.iter()).expect("eight corners");
    SceneObject {
        name: obj.name.clone(),
        bbox,
        mesh_uri: obj.mesh_uri.clone(),
        orientation: d.rotation * obj.orientation,
        scale: d.scale * obj.scale,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub id: String,
    pub bounds: Option<Aabb>,
    pub objects: Vec<SceneObject>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("scene schema error at {pointer}: {message}")]
pub struct SchemaError {
    /// JSON pointer to the offending value.
    pub pointer: String,
    pub message: String,
}

impl SchemaError {
    fn new(pointer: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            pointer: pointer.into(),
            message: message.into(),
        }
    }
}

impl Scene {
    pub fn new(id: impl Into<String>, bounds: Option<Aabb>, objects: Vec<SceneObject>) -> Result<Self, SchemaError> {
        let scene = Self {
            id: id.into(),
            bounds,
            objects,
        };
        scene.validate()?;
        Ok(scene)
    }

    pub fn object(&self, name: &str) -> Option<&SceneObject> {
        self.objects.iter().find(|o| o.name == name)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.objects.iter().position(|o| o.name == name)
    }

    /// Replaces the object with the same name.
    pub fn with_object(&self, obj: SceneObject) -> Scene {
        let mut next = self.clone();
        if let Some(i) = next.index_of(&obj.name) {
            next.objects[i] = obj;
        }
        next
    }

    /// Box enclosing the room bounds, or all objects when there are none.
    pub fn extent(&self) -> Option<Aabb> {
        self.bounds.or_else(|| {
            self.objects
                .iter()
                .map(|o| o.bbox)
                .reduce(|a, b| a.union(&b))
        })
    }

    pub fn validate(&self) -> Result<(), SchemaError> {
        if self.id.is_empty() {
            return Err(SchemaError::new("/id", "scene id must be nonempty"));
        }
        if let Some(b) = &self.bounds {
            if !b.is_valid() {
                return Err(SchemaError::new("/bounds", "bounds min must not exceed max"));
            }
        }
        let mut seen = std::collections::HashSet::new();
        for (i, o) in self.objects.iter().enumerate() {
            if o.name.is_empty() {
                return Err(SchemaError::new(format!("/objects/{i}/name"), "name must be nonempty"));
            }
            if !seen.insert(o.name.as_str()) {
                return Err(SchemaError::new(
                    format!("/objects/{i}/name"),
                    format!("duplicate object name `{}`", o.name),
                ));
            }
            if !o.bbox.is_valid() {
                return Err(SchemaError::new(
                    format!("/objects/{i}/min"),
                    "min corner must not exceed max corner",
                ));
            }
            if !(o.scale.is_finite() && o.scale > 0.0) {
                return Err(SchemaError::new(format!("/objects/{i}/scale"), "scale must be positive"));
            }
            if let Some(b) = &self.bounds {
                if !b.contains(&o.bbox) {
                    return Err(SchemaError::new(
                        format!("/objects/{i}"),
                        format!("object `{}` lies outside the scene bounds", o.name),
                    ));
                }
            }
        }
        Ok(())
    }
}

fn vec3_at(value: Option<&Value>, pointer: &str) -> Result<Vec3, SchemaError> {
    let arr = value
        .ok_or_else(|| SchemaError::new(pointer, "missing field"))?
        .as_array()
        .ok_or_else(|| SchemaError::new(pointer, "expected an array of 3 numbers"))?;
    if arr.len() != 3 {
        return Err(SchemaError::new(pointer, "expected an array of 3 numbers"));
    }
    let mut out = Vec3::zeros();
    for (k, v) in arr.iter().enumerate() {
        out[k] = finite_number(v, &format!("{pointer}/{k}"))?;
    }
    Ok(out)
}

fn finite_number(v: &Value, pointer: &str) -> Result<f64, SchemaError> {
    v.as_f64()
        .filter(|x| x.is_finite())
        .ok_or_else(|| SchemaError::new(pointer, "expected a finite number"))
}

fn aabb_at(value: &Value, pointer: &str) -> Result<Aabb, SchemaError> {
    let obj = value
        .as_object()
        .ok_or_else(|| SchemaError::new(pointer, "expected an object"))?;
    let min = vec3_at(obj.get("min"), &format!("{pointer}/min"))?;
    let max = vec3_at(obj.get("max"), &format!("{pointer}/max"))?;
    Ok(Aabb::new(min, max))
}

fn object_at(value: &Value, pointer: &str) -> Result<SceneObject, SchemaError> {
    let obj = value
        .as_object()
        .ok_or_else(|| SchemaError::new(pointer, "expected an object"))?;
    let name = obj
        .get("name")
        .ok_or_else(|| SchemaError::new(format!("{pointer}/name"), "missing field"))?
        .as_str()
        .ok_or_else(|| SchemaError::new(format!("{pointer}/name"), "expected a string"))?;
    let bbox = aabb_at(value, pointer)?;
    let mesh_uri = match obj.get("mesh_uri") {
        None | Some(Value::Null) => None,
        Some(Value::String(s)) => Some(s.clone()),
        Some(_) => return Err(SchemaError::new(format!("{pointer}/mesh_uri"), "expected a string")),
    };
    let orientation = match obj.get("orientation") {
        None | Some(Value::Null) => UnitQuaternion::identity(),
        Some(v) => {
            let p = format!("{pointer}/orientation");
            let arr = v
                .as_array()
                .filter(|a| a.len() == 4)
                .ok_or_else(|| SchemaError::new(&p, "expected [w, x, y, z]"))?;
            let mut q = [0.0; 4];
            for (k, c) in arr.iter().enumerate() {
                q[k] = finite_number(c, &format!("{p}/{k}"))?;
            }
            let q = Quaternion::new(q[0], q[1], q[2], q[3]);
            if (q.norm() - 1.0).abs() > 1e-6 {
                return Err(SchemaError::new(p, "orientation must be a unit quaternion"));
            }
            UnitQuaternion::new_normalize(q)
        }
    };
    let scale = match obj.get("scale") {
        None | Some(Value::Null) => 1.0,
        Some(v) => finite_number(v, &format!("{pointer}/scale"))?,
    };
    Ok(SceneObject {
        name: name.to_owned(),
        bbox,
        mesh_uri,
        orientation,
        scale,
    })
}

/// Reads and validates a scene from a JSON value.
pub fn scene_from_value(value: &Value) -> Result<Scene, SchemaError> {
    let root = value
        .as_object()
        .ok_or_else(|| SchemaError::new("", "expected a JSON object"))?;
    let id = root
        .get("id")
        .ok_or_else(|| SchemaError::new("/id", "missing field"))?
        .as_str()
        .ok_or_else(|| SchemaError::new("/id", "expected a string"))?;
    let bounds = match root.get("bounds") {
        None | Some(Value::Null) => None,
        Some(v) => Some(aabb_at(v, "/bounds")?),
    };
    let objects = root
        .get("objects")
        .ok_or_else(|| SchemaError::new("/objects", "missing field"))?
        .as_array()
        .ok_or_else(|| SchemaError::new("/objects", "expected an array"))?
        .iter()
        .enumerate()
        .map(|(i, v)| object_at(v, &format!("/objects/{i}")))
        .collect::<Result<Vec<_>, _>>()?;
    Scene::new(id, bounds, objects)
}

pub fn load_scene(bytes: &[u8]) -> Result<Scene, SchemaError> {
    let value: Value = serde_json::from_slice(bytes)
        .map_err(|e| SchemaError::new("", format!("invalid JSON: {e}")))?;
    scene_from_value(&value)
}

pub fn load_scene_file(path: &std::path::Path) -> Result<Scene, SchemaError> {
    let bytes = std::fs::read(path)
        .map_err(|e| SchemaError::new("", format!("cannot read {}: {e}", path.display())))?;
    load_scene(&bytes)
}

fn vec3_json(v: &Vec3) -> Value {
    json!([v.x, v.y, v.z])
}

/// Canonical JSON form: every optional field except `mesh_uri` and `bounds`
/// is written out.
pub fn scene_to_value(scene: &Scene) -> Value {
    let mut root = Map::new();
    root.insert("id".into(), json!(scene.id));
    if let Some(b) = &scene.bounds {
        root.insert("bounds".into(), json!({"min": vec3_json(&b.min), "max": vec3_json(&b.max)}));
    }
    let objects: Vec<Value> = scene
        .objects
        .iter()
        .map(|o| {
            let mut m = Map::new();
            m.insert("name".into(), json!(o.name));
            m.insert("min".into(), vec3_json(&o.bbox.min));
            m.insert("max".into(), vec3_json(&o.bbox.max));
            if let Some(uri) = &o.mesh_uri {
                m.insert("mesh_uri".into(), json!(uri));
            }
            let q = o.orientation.quaternion();
            m.insert("orientation".into(), json!([q.w, q.i, q.j, q.k]));
            m.insert("scale".into(), json!(o.scale));
            Value::Object(m)
        })
        .collect();
    root.insert("objects".into(), Value::Array(objects));
    Value::Object(root)
}

pub fn save_scene(scene: &Scene) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(&scene_to_value(scene)).expect("scene serializes");
    out.push(b'\n');
    out
}
