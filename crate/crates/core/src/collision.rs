//! Bounding-box collision detection and placement repair.
//!
//! Boxes are inflated by the buffer along x and y only, so objects resting on
//! each other (touching along z) are not colliding. A moved object that
//! collides, or leaves the room, is first nudged upward in steps of δ and
//! then searched for on a grid around the collision, nearest cell first.

use std::collections::HashSet;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::cga::Vec3;
use crate::scene::{Aabb, Scene};

/// Grid cells per axis before the resolution is coarsened.
pub const MAX_CELLS_PER_AXIS: f64 = 64.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResolverConfig {
    /// Upward step; defaults to 5% of the moved object's height.
    pub delta: Option<f64>,
    /// Horizontal clearance; defaults to 2% of the scene diagonal.
    pub buffer: Option<f64>,
    /// Grid spacing; defaults to half the moved object's smallest extent.
    pub grid_resolution: Option<f64>,
    /// Seconds.
    pub time_budget: f64,
    pub max_delta_steps: u32,
}

impl Default for ResolverConfig {
    fn default() -> Self {
        Self {
            delta: None,
            buffer: None,
            grid_resolution: None,
            time_budget: 0.5,
            max_delta_steps: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ResolveError {
    #[error("invalid resolver setting `{field}`: {value}")]
    InvalidConfig { field: &'static str, value: f64 },
    #[error("no object named `{0}`")]
    UnknownObject(String),
    #[error("no collision-free placement for `{object}`: {reason}")]
    Unresolvable { object: String, reason: UnresolvableReason },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnresolvableReason {
    Timeout,
    GridExhausted,
}

impl std::fmt::Display for UnresolvableReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            UnresolvableReason::Timeout => "time budget expired",
            UnresolvableReason::GridExhausted => "search grid exhausted",
        })
    }
}

impl ResolverConfig {
    pub fn validate(&self) -> Result<(), ResolveError> {
        let positive = |field, v: Option<f64>| match v {
            Some(x) if !(x.is_finite() && x > 0.0) => Err(ResolveError::InvalidConfig { field, value: x }),
            _ => Ok(()),
        };
        positive("delta", self.delta)?;
        positive("grid_resolution", self.grid_resolution)?;
        positive("time_budget", Some(self.time_budget))?;
        match self.buffer {
            Some(b) if !(b.is_finite() && b >= 0.0) => Err(ResolveError::InvalidConfig {
                field: "buffer",
                value: b,
            }),
            _ => Ok(()),
        }
    }

    pub fn buffer_for(&self, scene: &Scene) -> f64 {
        self.buffer.unwrap_or_else(|| {
            scene
                .extent()
                .map_or(0.0, |e| 0.02 * e.extents().norm())
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Phase {
    /// The intended pose was already valid.
    Intended,
    Delta { step: u32 },
    Grid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Placement {
    pub name: String,
    pub center: Vec3,
    pub distance_from_intended: f64,
    pub phase: Phase,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Resolution {
    pub scene: Scene,
    pub placements: Vec<Placement>,
    pub buffer: f64,
}

fn inflate(b: &Aabb, buffer: f64) -> Aabb {
    b.inflated(buffer, 0.0)
}

fn collides(a: &Aabb, b: &Aabb, buffer: f64) -> bool {
    inflate(a, buffer).overlaps(&inflate(b, buffer))
}

/// Unordered pairs `(a, b)` with `a` moved whose inflated boxes overlap with
/// positive volume. Each pair is reported once, in scene order.
pub fn detect_collisions(scene: &Scene, moved: &[&str], buffer: f64) -> Vec<(String, String)> {
    let moved: HashSet<&str> = moved.iter().copied().collect();
    let objs = &scene.objects;
    let mut pairs = Vec::new();
    for (i, a) in objs.iter().enumerate() {
        for b in &objs[i + 1..] {
            if (moved.contains(a.name.as_str()) || moved.contains(b.name.as_str()))
                && collides(&a.bbox, &b.bbox, buffer)
            {
                pairs.push((a.name.clone(), b.name.clone()));
            }
        }
    }
    pairs
}

/// Repairs each moved object in turn; the scene holds them at their intended
/// poses. Other objects never move.
pub fn resolve(scene: &Scene, moved: &[&str], cfg: &ResolverConfig) -> Result<Resolution, ResolveError> {
    cfg.validate()?;
    let started = Instant::now();
    let budget = Duration::from_secs_f64(cfg.time_budget);
    let buffer = cfg.buffer_for(scene);
    let mut current = scene.clone();
    let mut placements = Vec::with_capacity(moved.len());
    for name in moved {
        let index = current
            .index_of(name)
            .ok_or_else(|| ResolveError::UnknownObject((*name).to_owned()))?;
        let placement = place_one(&current, index, buffer, cfg, started, budget)?;
        let obj = &mut current.objects[index];
        let shift = placement.center - obj.bbox.center();
        obj.bbox = obj.bbox.translated(&shift);
        placements.push(placement);
    }
    Ok(Resolution {
        scene: current,
        placements,
        buffer,
    })
}

struct Probe<'a> {
    scene: &'a Scene,
    index: usize,
    extents: Vec3,
    buffer: f64,
}

impl Probe<'_> {
    fn boxed(&self, center: &Vec3) -> Aabb {
        Aabb::from_center_extents(*center, self.extents)
    }

    fn colliders<'b>(&'b self, b: &'b Aabb) -> impl Iterator<Item = &'b Aabb> + 'b {
        self.scene
            .objects
            .iter()
            .enumerate()
            .filter(move |(j, o)| *j != self.index && collides(b, &o.bbox, self.buffer))
            .map(|(_, o)| &o.bbox)
    }

    /// A repaired placement must clear everything with its buffer.
    fn is_valid(&self, center: &Vec3) -> bool {
        let b = self.boxed(center);
        let in_bounds = self
            .scene
            .bounds
            .is_none_or(|room| room.contains(&inflate(&b, self.buffer)));
        in_bounds && self.colliders(&b).next().is_none()
    }

    /// The intended pose only needs to be collision free and inside the room.
    fn needs_repair(&self, b: &Aabb) -> bool {
        let outside = self.scene.bounds.is_some_and(|room| !room.contains(b));
        outside || self.colliders(b).next().is_some()
    }
}

fn place_one(
    scene: &Scene,
    index: usize,
    buffer: f64,
    cfg: &ResolverConfig,
    started: Instant,
    budget: Duration,
) -> Result<Placement, ResolveError> {
    let obj = &scene.objects[index];
    let intended = obj.bbox.center();
    let probe = Probe {
        scene,
        index,
        extents: obj.bbox.extents(),
        buffer,
    };
    let name = obj.name.clone();
    if !probe.needs_repair(&obj.bbox) {
        return Ok(Placement {
            name,
            center: intended,
            distance_from_intended: 0.0,
            phase: Phase::Intended,
        });
    }
    let unresolvable = |reason| ResolveError::Unresolvable {
        object: obj.name.clone(),
        reason,
    };

    let delta = cfg.delta.unwrap_or(0.05 * probe.extents.z);
    if delta > 0.0 {
        for step in 1..=cfg.max_delta_steps {
            let lift = delta * f64::from(step);
            let candidate = intended + Vec3::new(0.0, 0.0, lift);
            if probe.is_valid(&candidate) {
                return Ok(Placement {
                    name,
                    center: candidate,
                    distance_from_intended: lift,
                    phase: Phase::Delta { step },
                });
            }
        }
    }

    let region = search_region(&probe, &obj.bbox);
    let Some(region) = region else {
        return Err(unresolvable(UnresolvableReason::GridExhausted));
    };
    let spacing = grid_spacing(&probe, cfg, &region);
    let cells = grid_cells(&intended, spacing, &region);
    for (n, (offset, norm2)) in cells.iter().enumerate() {
        if n % 256 == 0 && started.elapsed() > budget {
            return Err(unresolvable(UnresolvableReason::Timeout));
        }
        let candidate = intended + Vec3::from(offset.map(|k| f64::from(k) * spacing));
        if probe.is_valid(&candidate) {
            return Ok(Placement {
                name,
                center: candidate,
                distance_from_intended: spacing * (*norm2 as f64).sqrt(),
                phase: Phase::Grid,
            });
        }
    }
    if started.elapsed() > budget {
        return Err(unresolvable(UnresolvableReason::Timeout));
    }
    Err(unresolvable(UnresolvableReason::GridExhausted))
}

/// Union of the intended box and everything it hits, grown by twice the
/// object's largest extent and clipped to the room.
fn search_region(probe: &Probe<'_>, intended: &Aabb) -> Option<Aabb> {
    let hull = probe
        .colliders(intended)
        .fold(*intended, |acc, b| acc.union(b));
    let grow = 2.0 * probe.extents.max();
    let region = hull.inflated(grow, grow);
    match probe.scene.bounds {
        None => Some(region),
        Some(room) => {
            let min = region.min.sup(&room.min);
            let max = region.max.inf(&room.max);
            (0..3).all(|k| min[k] <= max[k]).then(|| Aabb::new(min, max))
        }
    }
}

/// Grid spacing, coarsened so no axis has more than
/// [`MAX_CELLS_PER_AXIS`] cells.
pub fn grid_spacing_for(extents: &Vec3, requested: Option<f64>, region: &Aabb) -> f64 {
    let base = requested.unwrap_or(0.5 * extents.min());
    let floor = region.extents().max() / MAX_CELLS_PER_AXIS;
    let spacing = base.max(floor);
    if spacing > 0.0 {
        spacing
    } else {
        // degenerate object and region; any positive spacing visits the one cell
        1.0
    }
}

fn grid_spacing(probe: &Probe<'_>, cfg: &ResolverConfig, region: &Aabb) -> f64 {
    grid_spacing_for(&probe.extents, cfg.grid_resolution, region)
}

fn axis_rank(k: i32) -> u8 {
    match k.signum() {
        1 => 0,
        -1 => 1,
        _ => 2,
    }
}

/// Integer offsets whose centers fall in `region`, nearest first. Equal
/// distances are ordered by direction, +x, −x, +y, −y, +z, −z, then by the
/// larger displacement along earlier axes.
pub fn grid_cells(intended: &Vec3, spacing: f64, region: &Aabb) -> Vec<([i32; 3], i64)> {
    let range = |k: usize| {
        let lo = ((region.min[k] - intended[k]) / spacing).ceil() as i32;
        let hi = ((region.max[k] - intended[k]) / spacing).floor() as i32;
        lo..=hi
    };
    let mut cells = Vec::new();
    for i in range(0) {
        for j in range(1) {
            for k in range(2) {
                let norm2 = i64::from(i).pow(2) + i64::from(j).pow(2) + i64::from(k).pow(2);
                cells.push(([i, j, k], norm2));
            }
        }
    }
    cells.sort_by_key(|([i, j, k], n)| {
        (
            *n,
            [axis_rank(*i), axis_rank(*j), axis_rank(*k)],
            [-i.abs(), -j.abs(), -k.abs()],
        )
    });
    cells
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::SceneObject;

    fn unit_box(name: &str, c: [f64; 3]) -> SceneObject {
        let b = Aabb::from_center_extents(Vec3::from(c), Vec3::new(1.0, 1.0, 1.0));
        SceneObject::new(name, b.min, b.max)
    }

    fn scene(bounds: Option<Aabb>, objs: Vec<SceneObject>) -> Scene {
        Scene::new("t", bounds, objs).unwrap()
    }

    #[test]
    fn disjoint_boxes() {
        let s = scene(None, vec![unit_box("a", [0.0, 0.0, 0.5]), unit_box("b", [3.0, 0.0, 0.5])]);
        assert!(detect_collisions(&s, &["a"], 0.1).is_empty());
    }

    #[test]
    fn half_overlap() {
        let s = scene(None, vec![unit_box("a", [0.0, 0.0, 0.5]), unit_box("b", [0.5, 0.0, 0.5])]);
        assert_eq!(detect_collisions(&s, &["a"], 0.0), vec![("a".into(), "b".into())]);
        // reported once even when both moved
        assert_eq!(detect_collisions(&s, &["a", "b"], 0.0).len(), 1);
        // neither moved: not our business
        assert!(detect_collisions(&s, &[], 0.0).is_empty());
    }

    #[test]
    fn touching_at_width_plus_two_buffers() {
        let w = 1.0;
        let b = 0.25;
        let s = scene(None, vec![unit_box("a", [0.0, 0.0, 0.5]), unit_box("b", [w + 2.0 * b, 0.0, 0.5])]);
        assert!(detect_collisions(&s, &["a"], b).is_empty());
        let closer = scene(None, vec![unit_box("a", [0.0, 0.0, 0.5]), unit_box("b", [w + 2.0 * b - 1e-6, 0.0, 0.5])]);
        assert_eq!(detect_collisions(&closer, &["a"], b).len(), 1);
    }

    #[test]
    fn stacked_boxes_do_not_collide() {
        let s = scene(None, vec![unit_box("a", [0.0, 0.0, 0.5]), unit_box("b", [0.0, 0.0, 1.5])]);
        assert!(detect_collisions(&s, &["b"], 0.3).is_empty());
    }

    #[test]
    fn valid_intended_pose_is_kept() {
        let s = scene(None, vec![unit_box("a", [0.0, 0.0, 0.5]), unit_box("b", [3.0, 0.0, 0.5])]);
        let r = resolve(&s, &["a"], &ResolverConfig { buffer: Some(0.1), ..Default::default() }).unwrap();
        assert_eq!(r.placements[0].phase, Phase::Intended);
        assert_eq!(r.scene, s);
    }

    #[test]
    fn one_delta_step() {
        // a rests 0.02 into b's top; one 0.05 lift clears it
        let s = scene(None, vec![unit_box("a", [0.0, 0.0, 1.48]), unit_box("b", [0.0, 0.0, 0.5])]);
        let cfg = ResolverConfig {
            buffer: Some(0.1),
            delta: Some(0.05),
            ..Default::default()
        };
        let r = resolve(&s, &["a"], &cfg).unwrap();
        let p = &r.placements[0];
        assert_eq!(p.phase, Phase::Delta { step: 1 });
        assert_eq!(p.center, Vec3::new(0.0, 0.0, 1.48 + 0.05));
        assert!(detect_collisions(&r.scene, &["a"], 0.1).is_empty());
    }

    #[test]
    fn packed_room_is_unresolvable() {
        let mut objs = Vec::new();
        for i in 0..4 {
            for j in 0..4 {
                objs.push(unit_box(&format!("b{i}{j}"), [i as f64 + 0.5, j as f64 + 0.5, 0.5]));
            }
        }
        // b00 pushed onto b11
        objs[0] = unit_box("b00", [1.5, 1.5, 0.5]);
        let room = Aabb::new(Vec3::zeros(), Vec3::new(4.0, 4.0, 1.0));
        let s = Scene {
            id: "packed".into(),
            bounds: Some(room),
            objects: objs,
        };
        let started = Instant::now();
        let err = resolve(&s, &["b00"], &ResolverConfig { buffer: Some(0.05), ..Default::default() }).unwrap_err();
        assert!(started.elapsed() < Duration::from_millis(550));
        assert!(matches!(err, ResolveError::Unresolvable { .. }));
    }

    #[test]
    fn tie_break_order() {
        let region = Aabb::new(Vec3::new(-1.0, -1.0, -1.0), Vec3::new(1.0, 1.0, 1.0));
        let cells = grid_cells(&Vec3::zeros(), 1.0, &region);
        let first: Vec<[i32; 3]> = cells.iter().take(7).map(|(c, _)| *c).collect();
        assert_eq!(
            first,
            vec![[0, 0, 0], [1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0], [0, 0, 1], [0, 0, -1]]
        );
    }

    #[test]
    fn equal_distance_prefers_plus_x() {
        // blocker straddles the intended spot; +x and -x escapes are both free
        let s = scene(
            None,
            vec![
                SceneObject::new("m", Vec3::new(-0.5, -0.5, 0.0), Vec3::new(0.5, 0.5, 1.0)),
                SceneObject::new("block", Vec3::new(-0.5, -0.5, 0.0), Vec3::new(0.5, 0.5, 3.0)),
            ],
        );
        let cfg = ResolverConfig {
            buffer: Some(0.0),
            delta: Some(0.1),
            grid_resolution: Some(1.0),
            ..Default::default()
        };
        let r = resolve(&s, &["m"], &cfg).unwrap();
        assert_eq!(r.placements[0].phase, Phase::Grid);
        assert_eq!(r.placements[0].center, Vec3::new(1.0, 0.0, 0.5));
    }

    #[test]
    fn leaving_the_room_triggers_repair() {
        let room = Aabb::new(Vec3::zeros(), Vec3::new(4.0, 4.0, 3.0));
        let s = Scene {
            id: "r".into(),
            bounds: Some(room),
            objects: vec![unit_box("a", [3.8, 2.0, 0.5])],
        };
        let cfg = ResolverConfig {
            buffer: Some(0.1),
            grid_resolution: Some(0.25),
            ..Default::default()
        };
        let r = resolve(&s, &["a"], &cfg).unwrap();
        let b = r.scene.objects[0].bbox;
        assert!(room.contains(&b.inflated(0.1, 0.0)));
        assert_eq!(r.placements[0].phase, Phase::Grid);
        assert!((r.placements[0].center - Vec3::new(3.3, 2.0, 0.5)).norm() < 1e-12);
    }

    #[test]
    fn bad_config() {
        let cfg = ResolverConfig {
            delta: Some(-1.0),
            ..Default::default()
        };
        assert!(matches!(cfg.validate(), Err(ResolveError::InvalidConfig { field: "delta", .. })));
        let cfg = ResolverConfig {
            time_budget: f64::INFINITY,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
    }
}
