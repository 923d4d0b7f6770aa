use std::ops::Range;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{bisect_shift, traced_first_crossing, Scene, DEFAULT_PATCH_LENGTH};
use crate::headmotion::{required_shift, required_shift_bse};
use crate::mirror::kappa;
use crate::obstruction::{binocular_alpha_at, monocular_lambda, monocular_lambda_bse};
use crate::scene::{Angle, BseConfig, DriverModel, FieldOfView, VehicleGeometry};

/// Sampling ranges for random scenes (cm and degrees).
#[derive(Clone, Debug, PartialEq)]
pub struct SceneRanges {
    pub pillar_width: Range<f64>,
    pub pillar_offset: Range<f64>,
    pub mirror_base_x: Range<f64>,
    pub mirror_base_y: Range<f64>,
    pub mirror_length: Range<f64>,
    pub mirror_angle_deg: Range<f64>,
    pub head_position: Range<f64>,
    pub interpupillary: Range<f64>,
    pub head_to_pupil: Range<f64>,
    pub mu_deg: Range<f64>,
}

impl Default for SceneRanges {
    fn default() -> Self {
        SceneRanges {
            pillar_width: 5.0..35.0,
            pillar_offset: 20.0..40.0,
            mirror_base_x: 80.0..130.0,
            mirror_base_y: 20.0..40.0,
            mirror_length: 10.0..25.0,
            mirror_angle_deg: 0.0..20.0,
            head_position: 0.0..15.0,
            interpupillary: 5.4..7.4,
            head_to_pupil: 16.0..22.0,
            mu_deg: 0.0..60.0,
        }
    }
}

/// A scene on which every closed form and every oracle is defined.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RandomScene {
    pub geom: VehicleGeometry,
    pub driver: DriverModel,
    pub bse: BseConfig,
    /// Turned-head right-eye position used for the binocular angle. Drawn
    /// independently of E0 so every eye/pillar case is exercised.
    pub eye: f64,
    pub seed: u64,
    pub index: u64,
    /// Draws rejected before this scene was accepted.
    pub rejected: u32,
}

const MAX_DRAWS: u32 = 100_000;

/// Scene number `index` of the stream seeded by `seed`, drawn from the default
/// ranges. Deterministic; scenes with different indices are independent.
pub fn random_scene(seed: u64, index: u64) -> RandomScene {
    random_scene_in(&SceneRanges::default(), seed, index)
}

/// As [`random_scene`] with explicit ranges. Draws are repeated until the
/// scene is usable; panics if the ranges admit almost no usable scene.
pub fn random_scene_in(ranges: &SceneRanges, seed: u64, index: u64) -> RandomScene {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    for rejected in 0..MAX_DRAWS {
        if let Some((geom, driver, bse, eye)) = draw(ranges, &mut rng) {
            if usable(&geom, &driver, &bse, eye) {
                return RandomScene {
                    geom,
                    driver,
                    bse,
                    eye,
                    seed,
                    index,
                    rejected,
                };
            }
        }
    }
    panic!("no usable scene in {MAX_DRAWS} draws; ranges too narrow");
}

fn draw(
    r: &SceneRanges,
    rng: &mut ChaCha8Rng,
) -> Option<(VehicleGeometry, DriverModel, BseConfig, f64)> {
    let mut pick = |range: &Range<f64>| rng.gen_range(range.clone());
    let geom = VehicleGeometry::new(
        pick(&r.pillar_width),
        pick(&r.pillar_offset),
        pick(&r.mirror_base_x),
        pick(&r.mirror_base_y),
        pick(&r.mirror_length),
        Angle::from_degrees(pick(&r.mirror_angle_deg)),
    )
    .ok()?;
    let driver = DriverModel::new(
        pick(&r.interpupillary),
        pick(&r.head_to_pupil),
        pick(&r.head_position),
        None,
    )
    .ok()?;
    let bse = BseConfig::from_degrees(pick(&r.mu_deg)).ok()?;
    let w = geom.pillar_width;
    let f = driver.interpupillary;
    let eye = pick(&(-w..2.0 * w + f));
    Some((geom, driver, bse, eye))
}

fn usable(geom: &VehicleGeometry, driver: &DriverModel, bse: &BseConfig, eye: f64) -> bool {
    let closed_forms = kappa(geom, driver).is_ok()
        && monocular_lambda(geom, driver).is_ok()
        && monocular_lambda_bse(geom, driver, bse).is_ok()
        && binocular_alpha_at(geom, driver, eye).is_ok()
        && required_shift(geom, driver).is_ok()
        && required_shift_bse(geom, driver, bse).is_ok();
    if !closed_forms {
        return false;
    }
    let scene = Scene::from_geometry(geom);
    let Ok(target) = traced_first_crossing(&scene, driver) else {
        return false;
    };
    let brackets = [Angle::ZERO, bse.deflection]
        .iter()
        .all(|&mu| bisect_shift(&scene, driver, mu, target).is_ok());
    brackets && edge_of_view_lands_on_patch(geom, driver)
}

/// The rearmost ray the forward-facing eye can see must cross the window on
/// the sheet patch, otherwise the sheet cannot change what that eye sees.
fn edge_of_view_lands_on_patch(geom: &VehicleGeometry, driver: &DriverModel) -> bool {
    let eye = driver.forward_left_eye();
    let edge = geom.pillar_forward_edge();
    let limit = FieldOfView::monocular_left_limit();
    let to_edge = Angle::of_vector(edge - eye);
    if to_edge <= limit {
        return true;
    }
    let rise = geom.pillar_offset - eye.y;
    let x = eye.x + rise * limit.cos() / limit.sin();
    let w = geom.pillar_width;
    x > w && x < w + DEFAULT_PATCH_LENGTH
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_independent() {
        let a = random_scene(42, 7);
        let b = random_scene(42, 7);
        assert_eq!(a, b);
        assert_ne!(random_scene(42, 8).geom, a.geom);
        assert_ne!(random_scene(43, 7).geom, a.geom);
    }

    #[test]
    fn scenes_respect_ranges() {
        let r = SceneRanges::default();
        for i in 0..50 {
            let s = random_scene(1, i);
            assert!(r.pillar_width.contains(&s.geom.pillar_width));
            assert!(r.head_position.contains(&s.driver.head_position));
            assert!(r.mu_deg.contains(&s.bse.deflection.degrees()));
            let w = s.geom.pillar_width;
            assert!(s.eye >= -w && s.eye < 2.0 * w + s.driver.interpupillary);
        }
    }

    #[test]
    fn rejection_is_not_dominant() {
        let rejected: u32 = (0..200).map(|i| random_scene(5, i).rejected).sum();
        assert!(rejected < 200 * 20, "{rejected}");
    }
}
