mod common;

use std::time::{Duration, Instant};

use cgaedit_core::collision::{detect_collisions, resolve, Phase, ResolveError, ResolverConfig};
use common::*;
use proptest::prelude::*;

const BUFFER: f64 = 0.1;

fn check_resolution(scene: &cgaedit_core::scene::Scene, moved: &str, cfg: &ResolverConfig) -> Result<(), TestCaseError> {
    let index = scene.index_of(moved).unwrap();
    match resolve(scene, &[moved], cfg) {
        Ok(r) => {
            let placed = &r.scene.objects[index];
            prop_assert!(placement_ok(&r.scene, index, &placed.bbox, BUFFER) || r.placements[0].phase == Phase::Intended);
            prop_assert!(detect_collisions(&r.scene, &[moved], BUFFER).is_empty());
            for (j, (a, b)) in scene.objects.iter().zip(&r.scene.objects).enumerate() {
                if j != index {
                    prop_assert_eq!(a, b);
                }
            }
            prop_assert!((placed.extents() - scene.objects[index].extents()).amax() <= 1e-12);
        }
        Err(ResolveError::Unresolvable { .. }) => {}
        Err(e) => prop_assert!(false, "{e}"),
    }
    Ok(())
}

#[test]
fn fixtures_resolve_cleanly() {
    let cfg = ResolverConfig {
        buffer: Some(BUFFER),
        ..Default::default()
    };
    let mut repaired = 0;
    for (scene, moved) in collision_fixtures() {
        check_resolution(&scene, &moved, &cfg).unwrap();
        repaired += usize::from(!detect_collisions(&scene, &[&moved], BUFFER).is_empty());
    }
    // the fixtures are meant to exercise repair, not just pass through
    assert!(repaired >= 15, "{repaired}");
}

#[test]
fn no_strictly_closer_cell_exists() {
    let resolution = 0.2;
    let cfg = ResolverConfig {
        buffer: Some(BUFFER),
        grid_resolution: Some(resolution),
        max_delta_steps: 0,
        time_budget: 5.0,
        ..Default::default()
    };
    for (scene, moved) in collision_fixtures() {
        let index = scene.index_of(&moved).unwrap();
        let found = match resolve(&scene, &[&moved], &cfg) {
            Ok(r) => Some(r.placements[0].distance_from_intended),
            Err(ResolveError::Unresolvable { .. }) => None,
            Err(e) => panic!("{e}"),
        };
        grid_oracle(&scene, index, BUFFER, resolution, found).unwrap_or_else(|e| panic!("{}: {e}", scene.id));
    }
}

#[test]
fn packed_room_gives_up_in_time() {
    let scene = packed_room();
    let cfg = ResolverConfig {
        buffer: Some(0.05),
        ..Default::default()
    };
    let started = Instant::now();
    let err = resolve(&scene, &["b00"], &cfg).unwrap_err();
    assert!(matches!(err, ResolveError::Unresolvable { .. }));
    assert!(started.elapsed() <= Duration::from_secs_f64(cfg.time_budget) + Duration::from_millis(50));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_rooms_resolve_cleanly(seed in any::<u64>()) {
        let cfg = ResolverConfig { buffer: Some(BUFFER), ..Default::default() };
        for (scene, moved) in seeded_fixtures(seed, 1) {
            let started = Instant::now();
            check_resolution(&scene, &moved, &cfg)?;
            prop_assert!(started.elapsed() <= Duration::from_millis(550));
        }
    }

    #[test]
    fn random_rooms_have_no_closer_cell(seed in any::<u64>()) {
        let cfg = ResolverConfig {
            buffer: Some(BUFFER),
            grid_resolution: Some(0.25),
            max_delta_steps: 0,
            time_budget: 5.0,
            ..Default::default()
        };
        for (scene, moved) in seeded_fixtures(seed, 1) {
            let index = scene.index_of(&moved).unwrap();
            let found = resolve(&scene, &[&moved], &cfg).ok().map(|r| r.placements[0].distance_from_intended);
            if let Err(e) = grid_oracle(&scene, index, BUFFER, 0.25, found) {
                prop_assert!(false, "{}", e);
            }
        }
    }
}
