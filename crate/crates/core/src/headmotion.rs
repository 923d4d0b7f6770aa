//! Forward head displacement that closes the turned-head blind wedge against
//! the mirror's outer sight line, with and without the refractive sheet.
//!
//! The first-position sight line runs from the left eye at the headrest
//! through the pillar's rear edge (0, h). After moving, the right eye's line
//! through the forward edge (W, h), deflected there when the sheet is fitted,
//! has to reach the point where the first line meets the mirror line.

use crate::error::{GeometryError, Result};
use crate::mirror::mirror_sightline;
use crate::scene::{Angle, BseConfig, DriverModel, Point2, SightLine, VehicleGeometry};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShiftResult {
    /// Mirror line ∩ first-position sight line, (x0, y0).
    pub crossing: Point2,
    /// Required right-eye position E1 (or E_b1 with the sheet).
    pub final_eye: f64,
    /// final_eye - E0. Negative means the head is already far enough forward.
    pub shift: f64,
    /// Sheet deflection used; zero for the unassisted solve.
    pub mu: Angle,
}

impl ShiftResult {
    pub fn assisted(&self) -> bool {
        self.mu != Angle::ZERO
    }

    /// The final-position sight line: from the moved right eye through the
    /// forward edge, deflected by `mu` at the edge.
    pub fn final_sight_line(&self, geom: &VehicleGeometry, driver: &DriverModel) -> SightLine {
        let (_, eye) = driver.turned_eyes(geom, self.final_eye);
        let edge = geom.pillar_forward_edge();
        let undeflected = Angle::of_vector(edge - eye);
        SightLine::new(edge, undeflected + self.mu)
    }
}

/// Left-eye first-position line from the headrest position.
pub fn first_sight_line(geom: &VehicleGeometry, driver: &DriverModel) -> SightLine {
    let (left, _) = driver.turned_eyes(geom, driver.turned_right_eye());
    SightLine::through(left, geom.pillar_rear_edge())
}

/// Closed-form crossing of the first-position sight line with the mirror line.
pub fn first_crossing(geom: &VehicleGeometry, driver: &DriverModel) -> Result<Point2> {
    let mirror = mirror_sightline(geom, driver)?;
    let cot = mirror.cot_slope();
    let tip = mirror.anchor();
    let d = driver.eye_to_pillar(geom);
    let h = geom.pillar_offset;
    let run = driver.interpupillary - driver.turned_right_eye();
    if run == 0.0 {
        // left eye directly under the rear edge: the first line is x = 0
        return Ok(Point2::new(0.0, mirror.y_at(0.0)));
    }
    let denom = d / run + cot;
    if denom.abs() < 1e-12 * (1.0 + cot.abs()) {
        return Err(GeometryError::ParallelLines);
    }
    let x0 = (tip.x * cot + tip.y - h) / denom;
    let y0 = d * x0 / run + h;
    Ok(Point2::new(x0, y0))
}

/// Unassisted head displacement, E1 = W + (x0 - W)(E0 - f)/x0.
pub fn required_shift(geom: &VehicleGeometry, driver: &DriverModel) -> Result<ShiftResult> {
    let crossing = first_crossing(geom, driver)?;
    let x0 = crossing.x;
    if x0 == 0.0 {
        return Err(GeometryError::Degenerate("first crossing lies on the rear-edge line"));
    }
    let w = geom.pillar_width;
    let e0 = driver.turned_right_eye();
    let final_eye = w + (x0 - w) * (e0 - driver.interpupillary) / x0;
    Ok(ShiftResult {
        crossing,
        final_eye,
        shift: final_eye - e0,
        mu: Angle::ZERO,
    })
}

/// Head displacement when the sheet deflects the final sight line by μ at the
/// pillar's forward edge.
pub fn required_shift_bse(
    geom: &VehicleGeometry,
    driver: &DriverModel,
    bse: &BseConfig,
) -> Result<ShiftResult> {
    let mu = bse.deflection;
    if mu == Angle::ZERO {
        return required_shift(geom, driver);
    }
    let crossing = first_crossing(geom, driver)?;
    let x0 = crossing.x;
    let w = geom.pillar_width;
    let h = geom.pillar_offset;
    let f = driver.interpupillary;
    let e0 = driver.turned_right_eye();
    let d = driver.eye_to_pillar(geom);
    if x0 == 0.0 || x0 == w || e0 == f {
        return Err(GeometryError::Degenerate("crossing is level with a pillar edge"));
    }
    if !(crossing.y > h) {
        return Err(GeometryError::Degenerate("crossing is not outboard of the pillar"));
    }
    // the undeflected line from the eye has to leave at (required - mu), which
    // must still point outward
    let required = Angle::of_vector(crossing - geom.pillar_forward_edge());
    let undeflected = required - mu;
    if !(undeflected > Angle::ZERO) {
        return Err(GeometryError::BseOvershoot { mu_deg: mu.degrees() });
    }

    let slope = d * x0 / ((x0 - w) * (f - e0));
    let t = mu.tan();
    let denom = slope - t;
    if denom.abs() < 1e-12 {
        return Err(GeometryError::Degenerate("singular denominator: the sheet alone closes the gap"));
    }
    let final_eye = w - (d + t * d * d * x0 / ((x0 - w) * (f - e0))) / denom;
    Ok(ShiftResult {
        crossing,
        final_eye,
        shift: final_eye - e0,
        mu,
    })
}
