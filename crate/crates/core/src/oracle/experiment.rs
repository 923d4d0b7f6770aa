use serde::Serialize;

use crate::error::{invalid, GeometryError, Result};
use crate::scene::{intersect_lines, Angle, DriverModel, Point2, SightLine, VehicleGeometry};

/// The in-car measurement: a sheet hung along the mirror's outer sight line,
/// with the laser intercepts read off it before and after fitting the sheet.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExperimentSetup {
    pub geom: VehicleGeometry,
    pub driver: DriverModel,
    /// Angle of the measuring sheet below the rearward axis, anchored at the
    /// mirror tip.
    pub sheet_angle: Angle,
    /// Intercept of the unaided left-eye line, cm from the sheet's reference mark.
    pub unaided_intercept: f64,
    /// Intercept of the deflected line, cm from the same mark.
    pub aided_intercept: f64,
}

impl ExperimentSetup {
    /// Odyssey scene, sheet at the measured 10.3°, intercepts 35 cm and 105 cm.
    pub fn odyssey() -> Self {
        ExperimentSetup {
            geom: VehicleGeometry::odyssey(),
            driver: DriverModel::odyssey(),
            sheet_angle: Angle::from_degrees(10.3),
            unaided_intercept: 35.0,
            aided_intercept: 105.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExperimentReconstruction {
    pub inferred_mu: Angle,
    /// Where the deflection happens: the pillar's forward edge.
    pub deflection_point: Point2,
    /// Unaided intercept on the sheet.
    pub point_a: Point2,
    /// Aided intercept on the sheet.
    pub point_b: Point2,
    /// Signed distance from A to B along the sheet, rearward positive.
    pub ab_distance: f64,
    /// Fitted position of the sheet's 0 cm mark.
    pub sheet_reference: Point2,
    pub unaided_direction: Angle,
    pub aided_direction: Angle,
}

/// Places A where the unaided left-eye line through the pillar's forward edge
/// meets the sheet, fits the reference mark so A reads `unaided_intercept`,
/// puts B at `aided_intercept` and measures the angle AEB at the edge.
pub fn reconstruct_experiment(setup: &ExperimentSetup) -> Result<ExperimentReconstruction> {
    for (name, v) in [
        ("unaided_intercept", setup.unaided_intercept),
        ("aided_intercept", setup.aided_intercept),
    ] {
        if !v.is_finite() || v < 0.0 {
            return Err(invalid(name, v, "must be a non-negative length"));
        }
    }
    let edge = setup.geom.pillar_forward_edge();
    let h = setup.geom.pillar_offset;
    let tip = setup.geom.mirror_tip();
    // rearward along the sheet
    let rearward = Angle::from_degrees(180.0) - setup.sheet_angle;
    let u = rearward.unit();
    let sheet = SightLine::new(tip, rearward);

    let unaided = SightLine::through(setup.driver.forward_left_eye(), edge);
    let point_a = intersect_lines(&unaided, &sheet)?;
    if (point_a - edge).dot(unaided.direction.unit()) <= 0.0 {
        return Err(GeometryError::Degenerate("unaided line meets the sheet behind the eye"));
    }
    let along = setup.aided_intercept - setup.unaided_intercept;
    let point_b = point_a + u.scale(along);
    let sheet_reference = point_a - u.scale(setup.unaided_intercept);
    for p in [point_a, point_b] {
        if !(p.y > h) {
            return Err(GeometryError::Degenerate("sheet intercept is not outboard of the window"));
        }
    }
    let unaided_direction = Angle::of_vector(point_a - edge);
    let aided_direction = Angle::of_vector(point_b - edge);
    Ok(ExperimentReconstruction {
        inferred_mu: (aided_direction - unaided_direction).wrapped(),
        deflection_point: edge,
        point_a,
        point_b,
        ab_distance: (point_b - point_a).dot(u),
        sheet_reference,
        unaided_direction,
        aided_direction,
    })
}

/// One intermediate value of the published law-of-sines chain, which prints
/// two different numbers for the same quantity.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainDiscrepancy {
    pub quantity: &'static str,
    pub printed: f64,
    /// The second printed value, or the printed expression evaluated.
    pub alternate: f64,
    /// Value from the scene geometry.
    pub recomputed: f64,
    pub unit: &'static str,
    pub status: &'static str,
}

/// The five inconsistent intermediate values, next to what the Odyssey scene
/// actually gives. Always flagged, never asserted.
pub fn printed_chain() -> Vec<ChainDiscrepancy> {
    let setup = ExperimentSetup::odyssey();
    let edge = setup.geom.pillar_forward_edge();
    let tip = setup.geom.mirror_tip();
    let left_eye = setup.driver.forward_left_eye();
    let kappa = setup.sheet_angle.degrees();
    let to_tip = Angle::of_vector(tip - edge).degrees();
    let recon = reconstruct_experiment(&setup).ok();
    let angle_ebc = recon
        .map(|r| {
            let a = Angle::of_vector(edge - r.point_a);
            let c = Angle::of_vector(tip - r.point_a);
            (a - c).wrapped().abs().degrees()
        })
        .unwrap_or(f64::NAN);
    let row = |quantity, printed, alternate, recomputed, unit| ChainDiscrepancy {
        quantity,
        printed,
        alternate,
        recomputed,
        unit,
        status: "flagged",
    };
    vec![
        row(
            "lambda + mu from arctan((25.4 - 6.7)/(24.8 - 20))",
            77.9,
            ((25.4_f64 - 6.7) / (24.8 - 20.0)).atan().to_degrees(),
            180.0 - Angle::of_vector(edge - left_eye).degrees(),
            "deg",
        ),
        row("left eye x", 23.8, 24.8, left_eye.x, "cm"),
        row("|EC|", 85.8, 89.5, edge.distance(tip), "cm"),
        row("angle ECB", 23.8, 23.3, kappa + to_tip, "deg"),
        row("angle EBC", 67.6, 68.2, angle_ebc, "deg"),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn odyssey_reconstruction() {
        let r = reconstruct_experiment(&ExperimentSetup::odyssey()).unwrap();
        assert!((r.inferred_mu.degrees() - 45.7).abs() < 2.0, "{}", r.inferred_mu);
        assert!((r.ab_distance - 70.0).abs() < 1e-12);
        assert!((r.point_b.distance(r.point_a) - 70.0).abs() < 1e-9);
        assert_eq!(r.deflection_point, Point2::new(20.8, 25.4));
        // reference mark reads 0, A reads 35
        assert!((r.point_a.distance(r.sheet_reference) - 35.0).abs() < 1e-9);
    }

    #[test]
    fn equal_intercepts_mean_no_deflection() {
        let mut s = ExperimentSetup::odyssey();
        s.aided_intercept = s.unaided_intercept;
        let r = reconstruct_experiment(&s).unwrap();
        assert_eq!(r.inferred_mu, Angle::ZERO);
        assert_eq!(r.point_a, r.point_b);
    }

    #[test]
    fn intercepts_must_be_lengths() {
        let mut s = ExperimentSetup::odyssey();
        s.aided_intercept = -1.0;
        assert!(reconstruct_experiment(&s).is_err());
    }

    #[test]
    fn sheet_inboard_of_window_is_rejected() {
        let mut s = ExperimentSetup::odyssey();
        // sheet dives steeply inboard toward the rear
        s.sheet_angle = Angle::from_degrees(-60.0);
        assert!(reconstruct_experiment(&s).is_err());
    }

    #[test]
    fn chain_rows_are_flagged() {
        let rows = printed_chain();
        assert_eq!(rows.len(), 5);
        assert!(rows.iter().all(|r| r.status == "flagged"));
        assert!((rows[0].alternate - 75.6).abs() < 0.05);
        assert!((rows[1].recomputed - 24.7023).abs() < 1e-3);
        assert!((rows[2].recomputed - 85.79).abs() < 0.01);
    }
}
