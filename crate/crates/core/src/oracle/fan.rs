use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Scene;
use crate::error::{invalid, GeometryError, Result};
use crate::scene::{Angle, Point2};

pub const MIN_RAYS: usize = 1000;

/// Which eyes look through the scene.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FanEyes {
    /// Forward-facing single eye. Directions beyond `left_limit` lie outside its
    /// field of view.
    Monocular { eye: Point2, left_limit: Angle },
    /// Turned head: only directions occluded for both eyes count.
    Binocular { left: Point2, right: Point2 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FanTrace {
    pub obstruction: Angle,
    pub rays_used: usize,
    pub seed: u64,
}

/// Casts `n_rays` stratified rays over [0°, 180°] and measures the obstruction.
///
/// Ray k points at (k + u_k)·180°/n with u_k drawn from a generator seeded by
/// `seed`, so each ray stands for one cell of width 180°/n.
///
/// Binocular: the measure of directions blocked for both eyes. Monocular: the
/// angle between the rearward axis and the rearmost direction in which the eye
/// still sees out, after any deflection by the sheet patch.
pub fn fan_trace_obstruction(
    scene: &Scene,
    eyes: &FanEyes,
    n_rays: usize,
    seed: u64,
) -> Result<FanTrace> {
    if n_rays < MIN_RAYS {
        return Err(invalid("n_rays", n_rays as f64, "must be at least 1000"));
    }
    let eye_points: Vec<Point2> = match *eyes {
        FanEyes::Monocular { eye, .. } => vec![eye],
        FanEyes::Binocular { left, right } => vec![left, right],
    };
    for e in &eye_points {
        if scene.occluders().any(|r| r.contains_strictly(*e)) {
            return Err(GeometryError::Degenerate("eye inside an occluder"));
        }
    }

    let cell = std::f64::consts::PI / n_rays as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let directions = (0..n_rays).map(|k| (k as f64 + rng.gen::<f64>()) * cell);

    let obstruction = match *eyes {
        FanEyes::Binocular { left, right } => {
            let blocked = directions
                .filter(|&phi| {
                    let dir = Point2::new(phi.cos(), phi.sin());
                    occluded(scene, left, dir) && occluded(scene, right, dir)
                })
                .count();
            blocked as f64 * cell
        }
        FanEyes::Monocular { eye, left_limit } => {
            let limit = left_limit.radians();
            let rearmost = directions
                .filter(|&phi| phi <= limit)
                .filter_map(|phi| {
                    let dir = Point2::new(phi.cos(), phi.sin());
                    if occluded(scene, eye, dir) {
                        None
                    } else {
                        Some(phi + deflection_at_window(scene, eye, dir))
                    }
                })
                .fold(f64::NEG_INFINITY, f64::max);
            if rearmost.is_finite() {
                (std::f64::consts::PI - rearmost).max(0.0)
            } else {
                std::f64::consts::PI
            }
        }
    };
    Ok(FanTrace {
        obstruction: Angle::from_radians(obstruction),
        rays_used: n_rays * eye_points.len(),
        seed,
    })
}

fn occluded(scene: &Scene, origin: Point2, dir: Point2) -> bool {
    scene
        .occluders()
        .any(|r| r.hit_by(origin, dir, f64::INFINITY))
}

/// Deflection (radians) picked up where the ray crosses the window line.
fn deflection_at_window(scene: &Scene, origin: Point2, dir: Point2) -> f64 {
    let Some(patch) = scene.bse_patch else {
        return 0.0;
    };
    if dir.y <= 0.0 {
        return 0.0;
    }
    let t = (scene.window_y - origin.y) / dir.y;
    if t <= 0.0 {
        return 0.0;
    }
    let x = origin.x + t * dir.x;
    if x >= patch.start_x && x <= patch.end_x {
        patch.mu.radians()
    } else {
        0.0
    }
}
