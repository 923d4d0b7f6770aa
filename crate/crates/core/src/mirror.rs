//! Side-mirror geometry: the right eye's glance at the mirror tip and the
//! outermost reflected sight line that bounds the mirror's coverage.

use crate::error::{GeometryError, Result};
use crate::scene::{Angle, DriverModel, Point2, SightLine, VehicleGeometry};

/// The outer reflected sight line, anchored at the mirror tip.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MirrorSightLine {
    /// Anchored at the tip, pointing along -kappa (descending toward +x).
    pub line: SightLine,
    pub kappa: Angle,
    pub tau0: Angle,
    /// cot(2θ + τ0), the slope magnitude used by the closed-form line.
    slope: f64,
}

impl MirrorSightLine {
    pub fn anchor(&self) -> Point2 {
        self.line.origin
    }

    /// Lateral coordinate on the mirror line at `x`:
    /// y = cot(2θ + τ0)(x_tip - x) + y_tip.
    pub fn y_at(&self, x: f64) -> f64 {
        self.slope * (self.line.origin.x - x) + self.line.origin.y
    }

    /// cot(2θ + τ0), equal to tan(κ).
    pub fn cot_slope(&self) -> f64 {
        self.slope
    }
}

/// Angle between the lateral axis and the right eye's line to the mirror tip.
pub fn tau0(geom: &VehicleGeometry, driver: &DriverModel) -> Result<Angle> {
    let tip = geom.mirror_tip();
    let eye = driver.forward_right_eye();
    let along = tip.x - eye.x;
    let across = tip.y - eye.y;
    if !(across > 0.0) {
        return Err(GeometryError::Degenerate("mirror tip is not outboard of the right eye"));
    }
    if !(along > 0.0) {
        return Err(GeometryError::Degenerate("mirror tip is not forward of the right eye"));
    }
    Ok(Angle::from_radians((along / across).atan()))
}

/// Angle of the outer mirror sight line with the longitudinal axis,
/// κ = 90° - τ0 - 2θ. Negative values (mirror aimed outward) are valid.
pub fn kappa(geom: &VehicleGeometry, driver: &DriverModel) -> Result<Angle> {
    let t = tau0(geom, driver)?;
    Ok(kappa_from(t, geom.mirror_angle))
}

fn kappa_from(tau0: Angle, theta: Angle) -> Angle {
    Angle::from_degrees(90.0) - tau0 - theta - theta
}

pub fn mirror_sightline(geom: &VehicleGeometry, driver: &DriverModel) -> Result<MirrorSightLine> {
    let tau0 = tau0(geom, driver)?;
    let theta = geom.mirror_angle;
    let kappa = kappa_from(tau0, theta);
    let incidence = theta + theta + tau0;
    let s = incidence.sin();
    if s.abs() < 1e-15 {
        return Err(GeometryError::Degenerate("mirror line is parallel to the lateral axis"));
    }
    let tip = geom.mirror_tip();
    Ok(MirrorSightLine {
        line: SightLine::new(tip, (-kappa).normalized()),
        kappa,
        tau0,
        slope: incidence.cos() / s,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flat_mirror() -> VehicleGeometry {
        let mut g = VehicleGeometry::odyssey();
        g.mirror_angle = Angle::ZERO;
        g.mirror_length = 0.0;
        g
    }

    #[test]
    fn bare_triangle() {
        let d = DriverModel::odyssey();
        let t = tau0(&flat_mirror(), &d).unwrap();
        let expect = (82.3f64 / 31.25).atan().to_degrees();
        // b = 18.7023, so the leg is 82.2977 rather than the rounded 82.3
        assert!((t.degrees() - expect).abs() < 2e-3, "{}", t.degrees());
        assert!((t.degrees() - 69.21).abs() < 0.01);
        let k = kappa(&flat_mirror(), &d).unwrap();
        assert!((k.degrees() - (90.0 - t.degrees())).abs() < 1e-12);
        assert!((k.degrees() - 20.79).abs() < 0.01);
    }

    #[test]
    fn odyssey_values() {
        let g = VehicleGeometry::odyssey();
        let d = DriverModel::odyssey();
        assert!((tau0(&g, &d).unwrap().degrees() - 58.445).abs() < 1e-3);
        assert!((kappa(&g, &d).unwrap().degrees() - 13.555).abs() < 1e-3);
    }

    #[test]
    fn tau0_limit_and_errors() {
        let g = VehicleGeometry::odyssey();
        let d = DriverModel::odyssey();
        let tip = g.mirror_tip();
        let eye_x = d.forward_right_eye().x;
        // move the head until the eye is just behind the tip
        let near = d.with_head_position(d.head_position + (tip.x - eye_x) - 1e-9).unwrap();
        assert!(tau0(&g, &near).unwrap().degrees() < 1e-6);
        let past = d.with_head_position(d.head_position + (tip.x - eye_x) + 1.0).unwrap();
        assert!(matches!(tau0(&g, &past), Err(GeometryError::Degenerate(_))));
    }

    #[test]
    fn grazing_kappa() {
        // choose theta so that tau0 = 90 - 2 theta; kappa then vanishes
        let d = DriverModel::odyssey();
        let mut g = VehicleGeometry::odyssey();
        g.mirror_length = 0.0;
        let t = tau0(&g, &d).unwrap().degrees();
        g.mirror_angle = Angle::from_degrees((90.0 - t) / 2.0);
        assert!(kappa(&g, &d).unwrap().degrees().abs() < 1e-12);
    }

    #[test]
    fn line_anchor_and_slope() {
        let g = VehicleGeometry::odyssey();
        let d = DriverModel::odyssey();
        let m = mirror_sightline(&g, &d).unwrap();
        let tip = g.mirror_tip();
        assert_eq!(m.anchor(), tip);
        assert!((m.y_at(tip.x) - tip.y).abs() < 1e-12);
        assert!((m.cot_slope() - m.kappa.tan()).abs() < 1e-12);
        assert!((m.y_at(-24.1055) - 76.418).abs() < 1e-2);

        let flat = flat_mirror();
        let m = mirror_sightline(&flat, &d).unwrap();
        assert_eq!(m.anchor(), Point2::new(flat.mirror_base_x, flat.mirror_base_y));
        let slope = (m.y_at(10.0) - m.y_at(0.0)) / 10.0;
        assert!((slope + m.kappa.tan()).abs() < 1e-12);
    }

    #[test]
    fn line_direction_matches_finite_difference() {
        let g = VehicleGeometry::odyssey();
        let d = DriverModel::odyssey();
        let m = mirror_sightline(&g, &d).unwrap();
        let (x1, x2) = (0.0, 50.0);
        let fd = Angle::of_vector(Point2::new(x2 - x1, m.y_at(x2) - m.y_at(x1)));
        assert!((fd.radians() + m.kappa.radians()).abs() < 1e-12);
        let along = m.line.y_at(x2).unwrap();
        assert!((along - m.y_at(x2)).abs() < 1e-9);
    }
}
