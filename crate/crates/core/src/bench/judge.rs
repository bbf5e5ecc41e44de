use crate::scene::{Aabb, Scene};

use super::case::{OracleCheck, QueryCase};

/// Slack on top of the buffer for resting contact.
pub const CONTACT_SLACK: f64 = 1e-3;

/// Horizontal distance between two boxes; zero when their footprints meet.
pub fn horizontal_gap(a: &Aabb, b: &Aabb) -> f64 {
    let dx = (a.min.x - b.max.x).max(b.min.x - a.max.x).max(0.0);
    let dy = (a.min.y - b.max.y).max(b.min.y - a.max.y).max(0.0);
    dx.hypot(dy)
}

pub fn check_passes(check: &OracleCheck, scene: &Scene, buffer: f64) -> bool {
    let bbox = |name: &str| scene.object(name).map(|o| o.bbox);
    match check {
        OracleCheck::Exact {
            object,
            min,
            max,
            tolerance,
        } => bbox(object).is_some_and(|b| {
            (0..3).all(|k| (b.min[k] - min[k]).abs() <= *tolerance && (b.max[k] - max[k]).abs() <= *tolerance)
        }),
        OracleCheck::OnTopOf { object, support } => match (bbox(object), bbox(support)) {
            (Some(a), Some(s)) => {
                (a.min.z - s.max.z).abs() <= buffer + CONTACT_SLACK
                    && (0..2).all(|k| s.min[k] <= a.min[k] && a.max[k] <= s.max[k])
            }
            _ => false,
        },
        OracleCheck::NextTo { object, other, max_gap } => match (bbox(object), bbox(other)) {
            (Some(a), Some(b)) => horizontal_gap(&a, &b) <= *max_gap,
            _ => false,
        },
    }
}

/// Whether the final scene satisfies every oracle check of the case.
pub fn judge(case: &QueryCase, final_scene: &Scene, buffer: f64) -> bool {
    case.oracle.iter().all(|c| check_passes(c, final_scene, buffer))
}
