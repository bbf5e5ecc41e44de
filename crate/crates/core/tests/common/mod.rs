#![allow(dead_code)]

use cgaedit_core::cga::{
    blade, embed_point, sandwich, DilationSpec, Multivector, RotorSpec, TranslationSpec, Vec3, BLADE_COUNT,
};
use cgaedit_core::scene::{Aabb, Scene, SceneObject, GEOM_EPS};
use nalgebra::{Quaternion, UnitQuaternion};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Squares of e1..e5.
const METRIC: [f64; 5] = [1.0, 1.0, 1.0, 1.0, -1.0];

fn basis_list(index: usize) -> Vec<u8> {
    (0..5u8).filter(|k| index & (1 << k) != 0).collect()
}

fn list_index(list: &[u8]) -> usize {
    list.iter().fold(0, |acc, k| acc | (1 << k))
}

/// Multiplies two basis blades by writing out the vector word, bubble
/// sorting it and cancelling equal neighbours with the metric.
pub fn word_product(a: usize, b: usize) -> (f64, usize) {
    let mut word = basis_list(a);
    word.extend(basis_list(b));
    let mut sign = 1.0;
    loop {
        let mut changed = false;
        let mut i = 0;
        while i + 1 < word.len() {
            if word[i] > word[i + 1] {
                word.swap(i, i + 1);
                sign = -sign;
                changed = true;
            } else if word[i] == word[i + 1] {
                sign *= METRIC[word[i] as usize];
                word.drain(i..i + 2);
                changed = true;
                continue;
            }
            i += 1;
        }
        if !changed {
            break;
        }
    }
    (sign, list_index(&word))
}

pub fn oracle_product(x: &Multivector, y: &Multivector) -> Multivector {
    let mut out = [0.0; BLADE_COUNT];
    for i in 0..BLADE_COUNT {
        for j in 0..BLADE_COUNT {
            if x[i] == 0.0 || y[j] == 0.0 {
                continue;
            }
            let (s, k) = word_product(i, j);
            out[k] += s * x[i] * y[j];
        }
    }
    Multivector::from_coeffs(out)
}

pub fn random_mv(rng: &mut impl Rng) -> Multivector {
    let mut c = [0.0; BLADE_COUNT];
    for x in &mut c {
        *x = rng.random_range(-1.0..=1.0);
    }
    Multivector::from_coeffs(c)
}

pub fn random_unit_quaternion(rng: &mut impl Rng) -> UnitQuaternion<f64> {
    loop {
        let q = Quaternion::new(
            rng.random_range(-1.0..=1.0),
            rng.random_range(-1.0..=1.0),
            rng.random_range(-1.0..=1.0),
            rng.random_range(-1.0..=1.0),
        );
        let n = q.norm();
        if n > 1e-3 && n <= 1.0 {
            return UnitQuaternion::new_normalize(q);
        }
    }
}

pub fn random_translation(rng: &mut impl Rng, max_norm: f64) -> Vec3 {
    loop {
        let v = Vec3::new(
            rng.random_range(-1.0..=1.0),
            rng.random_range(-1.0..=1.0),
            rng.random_range(-1.0..=1.0),
        );
        if v.norm() <= 1.0 {
            return v * max_norm;
        }
    }
}

pub struct MotorCase {
    pub t: TranslationSpec,
    pub r: RotorSpec,
    pub d: DilationSpec,
}

pub fn random_motor_case(rng: &mut impl Rng) -> MotorCase {
    let q = random_unit_quaternion(rng);
    MotorCase {
        t: TranslationSpec::new(random_translation(rng, 1e3)).unwrap(),
        r: RotorSpec::from_quaternion(q.quaternion()).unwrap(),
        d: DilationSpec::new(rng.random_range(0.1..=10.0)).unwrap(),
    }
}

pub fn same_rotation(a: &UnitQuaternion<f64>, b: &UnitQuaternion<f64>, tol: f64) -> bool {
    let (p, q) = (a.quaternion(), b.quaternion());
    (p - q).norm() <= tol || (p + q).norm() <= tol
}

/// Reads a conformal point back to Euclidean coordinates; the weight is the
/// `eo` coefficient, `e5 − e4` with `eo = 0.5(e5 − e4)`.
pub fn point_coords(x: &Multivector) -> Vec3 {
    let w = x[blade::E5] - x[blade::E4];
    Vec3::new(x[blade::E1], x[blade::E2], x[blade::E3]) / w
}

pub fn sandwich_point(m: &Multivector, p: &Vec3) -> Vec3 {
    point_coords(&sandwich(m, &embed_point(p)).unwrap())
}

pub fn boxed(name: &str, center: [f64; 3], size: [f64; 3]) -> SceneObject {
    let c = Vec3::from(center);
    let h = Vec3::from(size) * 0.5;
    SceneObject::new(name, c - h, c + h)
}

// Independent restatement of the placement rules: buffer grows boxes in x
// and y, overlaps need more than GEOM_EPS of penetration, containment
// allows GEOM_EPS.

pub fn grow_xy(b: &Aabb, buffer: f64) -> Aabb {
    let d = Vec3::new(buffer, buffer, 0.0);
    Aabb::new(b.min - d, b.max + d)
}

pub fn penetrates(a: &Aabb, b: &Aabb) -> bool {
    (0..3).all(|k| a.max[k].min(b.max[k]) - a.min[k].max(b.min[k]) > GEOM_EPS)
}

pub fn inside(room: &Aabb, b: &Aabb) -> bool {
    (0..3).all(|k| b.min[k] >= room.min[k] - GEOM_EPS && b.max[k] <= room.max[k] + GEOM_EPS)
}

pub fn blockers(scene: &Scene, skip: usize, b: &Aabb, buffer: f64) -> Vec<Aabb> {
    scene
        .objects
        .iter()
        .enumerate()
        .filter(|(j, o)| *j != skip && penetrates(&grow_xy(b, buffer), &grow_xy(&o.bbox, buffer)))
        .map(|(_, o)| o.bbox)
        .collect()
}

pub fn placement_ok(scene: &Scene, skip: usize, b: &Aabb, buffer: f64) -> bool {
    let in_room = scene.bounds.is_none_or(|room| inside(&room, &grow_xy(b, buffer)));
    in_room && blockers(scene, skip, b, buffer).is_empty()
}

pub const ROOM: [f64; 3] = [6.0, 5.0, 2.5];

/// Twenty seeded rooms, each with a moved object dropped at a random spot
/// that usually hits something. Static objects are placed without overlaps.
pub fn collision_fixtures() -> Vec<(Scene, String)> {
    seeded_fixtures(0x5eed_c011, 20)
}

pub fn seeded_fixtures(seed: u64, count: usize) -> Vec<(Scene, String)> {
    let mut rng = rng(seed);
    let room = Aabb::new(Vec3::zeros(), Vec3::from(ROOM));
    let buffer = 0.1;
    (0..count)
        .map(|f| {
            let mut objects: Vec<SceneObject> = Vec::new();
            let wanted = rng.random_range(3..=9);
            let mut tries = 0;
            while objects.len() < wanted && tries < 500 {
                tries += 1;
                let size = [
                    rng.random_range(0.3..1.6),
                    rng.random_range(0.3..1.6),
                    rng.random_range(0.3..1.5),
                ];
                let center = [
                    rng.random_range(size[0] / 2.0 + buffer..ROOM[0] - size[0] / 2.0 - buffer),
                    rng.random_range(size[1] / 2.0 + buffer..ROOM[1] - size[1] / 2.0 - buffer),
                    size[2] / 2.0,
                ];
                let candidate = boxed(&format!("s{}", objects.len()), center, size);
                if objects
                    .iter()
                    .all(|o| !penetrates(&grow_xy(&o.bbox, buffer), &grow_xy(&candidate.bbox, buffer)))
                {
                    objects.push(candidate);
                }
            }
            let size = [
                rng.random_range(0.3..1.0),
                rng.random_range(0.3..1.0),
                rng.random_range(0.2..0.8),
            ];
            let target = &objects[rng.random_range(0..objects.len())].bbox;
            let jitter = Vec3::new(rng.random_range(-0.3..0.3), rng.random_range(-0.3..0.3), 0.0);
            let c = target.center() + jitter;
            let moved = boxed("m", [c.x, c.y, size[2] / 2.0], size);
            objects.push(moved);
            let scene = Scene {
                id: format!("fixture{f}"),
                bounds: Some(room),
                objects,
            };
            (scene, "m".to_owned())
        })
        .collect()
}

/// A 4×4 grid of unit boxes filling a 4×4×1 room, with one box pushed onto
/// its neighbour. No cell of any grid can hold it.
pub fn packed_room() -> Scene {
    let mut objects = Vec::new();
    for i in 0..4 {
        for j in 0..4 {
            objects.push(boxed(&format!("b{i}{j}"), [i as f64 + 0.5, j as f64 + 0.5, 0.5], [1.0; 3]));
        }
    }
    objects[0] = boxed("b00", [1.5, 1.5, 0.5], [1.0; 3]);
    Scene {
        id: "packed".into(),
        bounds: Some(Aabb::new(Vec3::zeros(), Vec3::new(4.0, 4.0, 1.0))),
        objects,
    }
}

/// Search region of the grid phase, rebuilt from its definition: the
/// intended box and everything it hits, grown by twice the largest extent,
/// clipped to the room.
pub fn grid_region(scene: &Scene, index: usize, buffer: f64) -> Option<Aabb> {
    let intended = scene.objects[index].bbox;
    let mut hull = intended;
    for b in blockers(scene, index, &intended, buffer) {
        hull = hull.union(&b);
    }
    let grow = 2.0 * intended.extents().max();
    let g = Vec3::repeat(grow);
    let (mut min, mut max) = (hull.min - g, hull.max + g);
    if let Some(room) = scene.bounds {
        min = min.sup(&room.min);
        max = max.inf(&room.max);
    }
    (0..3).all(|k| min[k] <= max[k]).then(|| Aabb::new(min, max))
}

/// Exhaustive check of the grid phase: walks every cell of the region and
/// fails if a valid cell lies strictly closer than `found` (or at all when
/// nothing was found).
pub fn grid_oracle(
    scene: &Scene,
    index: usize,
    buffer: f64,
    resolution: f64,
    found: Option<f64>,
) -> Result<usize, String> {
    let Some(region) = grid_region(scene, index, buffer) else {
        return match found {
            Some(d) if d > 0.0 => Err("placement found with an empty region".into()),
            _ => Ok(0),
        };
    };
    let spacing = resolution.max(region.extents().max() / 64.0);
    let intended = scene.objects[index].bbox;
    let c = intended.center();
    let range = |k: usize| {
        let lo = ((region.min[k] - c[k]) / spacing).ceil() as i32;
        let hi = ((region.max[k] - c[k]) / spacing).floor() as i32;
        lo..=hi
    };
    let mut visited = 0;
    for i in range(0) {
        for j in range(1) {
            for k in range(2) {
                visited += 1;
                let offset = Vec3::new(f64::from(i), f64::from(j), f64::from(k)) * spacing;
                let dist = offset.norm();
                if found.is_some_and(|d| dist >= d - 1e-12) {
                    continue;
                }
                let b = intended.translated(&offset);
                if placement_ok(scene, index, &b, buffer) {
                    return Err(format!("cell ({i},{j},{k}) at {dist} is valid but was not chosen ({found:?})"));
                }
            }
        }
    }
    Ok(visited)
}
