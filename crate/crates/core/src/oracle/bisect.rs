use super::{trace_reflected_line, Scene};
use crate::error::{GeometryError, Result};
use crate::scene::{deflect, intersect_lines, Angle, DriverModel, Point2, SightLine};

/// Half-width of the search interval around E0, cm.
pub const BISECT_SPAN_CM: f64 = 200.0;
pub const BISECT_TOLERANCE_CM: f64 = 1e-9;
const MAX_ITERATIONS: usize = 200;

/// Finds the turned-head right-eye position E whose sight line through the
/// pillar's forward edge, deflected there by `mu`, passes through `target`.
/// Returns E - E0.
///
/// The search runs over [E0 - 200, E0 + 200] cm. A root where the line only
/// reaches `target` behind the edge (the ray points away from it) is reported
/// as an overshoot rather than accepted.
pub fn bisect_shift(scene: &Scene, driver: &DriverModel, mu: Angle, target: Point2) -> Result<f64> {
    let pivot = Point2::new(scene.pillar_width, scene.window_y);
    let eye_y = scene.window_y - eye_to_pillar(scene, driver);
    let to_target = target - pivot;
    let direction = |e: f64| deflect(Angle::of_vector(pivot - Point2::new(e, eye_y)), mu).unit();
    let miss = |e: f64| direction(e).cross(to_target);

    let e0 = driver.turned_right_eye();
    let (mut lo, mut hi) = (e0 - BISECT_SPAN_CM, e0 + BISECT_SPAN_CM);
    let (mut f_lo, f_hi) = (miss(lo), miss(hi));
    if f_lo.signum() == f_hi.signum() && f_lo != 0.0 && f_hi != 0.0 {
        return Err(GeometryError::NoBracket { lo, hi });
    }
    let root = if f_lo == 0.0 {
        lo
    } else if f_hi == 0.0 {
        hi
    } else {
        for _ in 0..MAX_ITERATIONS {
            if hi - lo <= BISECT_TOLERANCE_CM {
                break;
            }
            let mid = 0.5 * (lo + hi);
            let f_mid = miss(mid);
            if f_mid == 0.0 {
                lo = mid;
                hi = mid;
                break;
            }
            if f_mid.signum() == f_lo.signum() {
                lo = mid;
                f_lo = f_mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    if direction(root).dot(to_target) <= 0.0 {
        return Err(GeometryError::BseOvershoot { mu_deg: mu.degrees() });
    }
    Ok(root - e0)
}

/// Crossing of the traced mirror line with the first-position sight line from
/// the turned-head left eye through the pillar's rear edge.
pub fn traced_first_crossing(scene: &Scene, driver: &DriverModel) -> Result<Point2> {
    let mirror = trace_reflected_line(scene, driver.forward_right_eye())?;
    let eye_y = scene.window_y - eye_to_pillar(scene, driver);
    let left = Point2::new(driver.turned_right_eye() - driver.interpupillary, eye_y);
    let first = SightLine::through(left, Point2::new(0.0, scene.window_y));
    intersect_lines(&first, &mirror)
}

fn eye_to_pillar(scene: &Scene, driver: &DriverModel) -> f64 {
    driver.eye_to_pillar.unwrap_or(scene.window_y)
}
