//! Obstruction angles: forward-facing monocular, turned-head binocular, and
//! monocular with the refractive sheet.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{invalid, GeometryError, Result};
use crate::scene::{Angle, BseConfig, DriverModel, FieldOfView, Point2, VehicleGeometry};

/// Where the turned-head eyes sit relative to the pillar's two edges.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum EyePositionCase {
    BothBehind,
    LeftBehind,
    BothWithin,
    RightAhead,
    BothAhead,
}

impl EyePositionCase {
    pub const ALL: [EyePositionCase; 5] = [
        EyePositionCase::BothBehind,
        EyePositionCase::LeftBehind,
        EyePositionCase::BothWithin,
        EyePositionCase::RightAhead,
        EyePositionCase::BothAhead,
    ];

    pub fn label(self) -> &'static str {
        match self {
            EyePositionCase::BothBehind => "BothBehind",
            EyePositionCase::LeftBehind => "LeftBehind",
            EyePositionCase::BothWithin => "BothWithin",
            EyePositionCase::RightAhead => "RightAhead",
            EyePositionCase::BothAhead => "BothAhead",
        }
    }
}

impl fmt::Display for EyePositionCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for EyePositionCase {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        EyePositionCase::ALL
            .into_iter()
            .find(|c| c.label() == s)
            .ok_or_else(|| format!("unknown eye position case {s:?}"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ObstructionResult {
    /// Angle straight from the formula (λ or α, before any clamp).
    pub geometric: Angle,
    /// Angle after the monocular floor or the zero clamp.
    pub effective: Angle,
    /// Eye/pillar case; binocular results only.
    pub case: Option<EyePositionCase>,
    pub clamped: bool,
}

/// Classifies the right eye at `e` (left eye at `e - f`) against a pillar
/// spanning [0, `w`]. Ties go to the more rearward case.
pub fn classify_eyes(e: f64, w: f64, f: f64) -> EyePositionCase {
    let left = e - f;
    if e < 0.0 {
        EyePositionCase::BothBehind
    } else if left < 0.0 {
        EyePositionCase::LeftBehind
    } else if e <= w {
        EyePositionCase::BothWithin
    } else if left <= w {
        EyePositionCase::RightAhead
    } else {
        EyePositionCase::BothAhead
    }
}

/// Forward-facing obstruction for the window-side eye: the angle between the
/// rearward axis and the sight line grazing the pillar's forward edge, floored
/// at the monocular field-of-view limit.
pub fn monocular_lambda(geom: &VehicleGeometry, driver: &DriverModel) -> Result<ObstructionResult> {
    let half = 0.5 * driver.interpupillary;
    let across = geom.pillar_offset - half;
    if !(across > 0.0) {
        return Err(invalid("h", geom.pillar_offset, "must exceed f/2"));
    }
    let along = driver.head_position + driver.pupil_forward_offset() - geom.pillar_width;
    let geometric = Angle::from_radians(across.atan2(along));
    let floor = Angle::from_degrees(FieldOfView::MONOCULAR_FLOOR_DEG);
    let clamped = geometric < floor;
    Ok(ObstructionResult {
        geometric,
        effective: geometric.max(floor),
        case: None,
        clamped,
    })
}

/// Turned-head obstruction: overlap of the two eyes' occluded sectors.
///
/// β is the direction from the left eye to the rear edge, σ from the right eye
/// to the forward edge, both in (0°, 180°); α = β - σ, clamped below at zero.
pub fn binocular_alpha(e: f64, w: f64, d: f64, f: f64) -> Result<ObstructionResult> {
    if !(w > 0.0) {
        return Err(invalid("W", w, "must be positive"));
    }
    if !(d > 0.0) {
        return Err(invalid("d", d, "must be positive"));
    }
    if !(f > 0.0) {
        return Err(invalid("f", f, "must be positive"));
    }
    if !e.is_finite() {
        return Err(invalid("E", e, "must be finite"));
    }
    let left = Point2::new(e - f, 0.0);
    let right = Point2::new(e, 0.0);
    let beta = Angle::of_vector(Point2::new(0.0, d) - left);
    let sigma = Angle::of_vector(Point2::new(w, d) - right);
    let geometric = beta - sigma;
    let clamped = geometric < Angle::ZERO;
    Ok(ObstructionResult {
        geometric,
        effective: geometric.max(Angle::ZERO),
        case: Some(classify_eyes(e, w, f)),
        clamped,
    })
}

/// [`binocular_alpha`] for a driver whose turned-head right eye is at `e`.
pub fn binocular_alpha_at(
    geom: &VehicleGeometry,
    driver: &DriverModel,
    e: f64,
) -> Result<ObstructionResult> {
    binocular_alpha(
        e,
        geom.pillar_width,
        driver.eye_to_pillar(geom),
        driver.interpupillary,
    )
}

/// Monocular obstruction seen through the refractive sheet. The floor is applied
/// first and the deflection subtracted afterwards.
pub fn monocular_lambda_bse(
    geom: &VehicleGeometry,
    driver: &DriverModel,
    bse: &BseConfig,
) -> Result<ObstructionResult> {
    let base = monocular_lambda(geom, driver)?;
    let mu = bse.deflection;
    if mu > base.effective {
        return Err(GeometryError::InvalidParameter {
            name: "mu",
            value: mu.degrees(),
            reason: "exceeds the unassisted obstruction angle",
        });
    }
    Ok(ObstructionResult {
        geometric: base.geometric - mu,
        effective: base.effective - mu,
        case: None,
        clamped: base.clamped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const W: f64 = 20.8;
    const D: f64 = 25.4;
    const F: f64 = 6.7;

    #[test]
    fn odyssey_monocular() {
        let r = monocular_lambda(&VehicleGeometry::odyssey(), &DriverModel::odyssey()).unwrap();
        assert!((r.geometric.degrees() - 79.96).abs() < 0.01);
        assert!((r.effective.degrees() - 80.0).abs() < 1e-12);
        assert!(r.clamped);

        let far = DriverModel::odyssey().with_head_position(20.0).unwrap();
        let r = monocular_lambda(&VehicleGeometry::odyssey(), &far).unwrap();
        assert!((r.geometric.degrees() - 50.927).abs() < 1e-3);
        assert!((r.effective.degrees() - 80.0).abs() < 1e-12);
    }

    #[test]
    fn monocular_special_angles() {
        let g = VehicleGeometry::odyssey();
        let d = DriverModel::odyssey();
        // equal legs
        let leg = g.pillar_offset - d.interpupillary / 2.0;
        let at45 = d
            .with_head_position(g.pillar_width + leg - d.pupil_forward_offset())
            .unwrap();
        let r = monocular_lambda(&g, &at45).unwrap();
        assert!((r.geometric.degrees() - 45.0).abs() < 1e-9);
        // eye on the forward edge's longitudinal position
        let at90 = d.with_head_position(g.pillar_width - d.pupil_forward_offset()).unwrap();
        let r = monocular_lambda(&g, &at90).unwrap();
        assert!((r.geometric.degrees() - 90.0).abs() < 1e-9);
        assert!(!r.clamped);
    }

    #[test]
    fn monocular_rejects_low_pillar() {
        let mut g = VehicleGeometry::odyssey();
        g.pillar_offset = 3.0;
        assert!(monocular_lambda(&g, &DriverModel::odyssey()).is_err());
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify_eyes(-5.0, W, F), EyePositionCase::BothBehind);
        assert_eq!(classify_eyes(3.0, W, F), EyePositionCase::LeftBehind);
        assert_eq!(classify_eyes(13.75, W, F), EyePositionCase::BothWithin);
        assert_eq!(classify_eyes(24.0, W, F), EyePositionCase::RightAhead);
        assert_eq!(classify_eyes(27.6, W, F), EyePositionCase::BothAhead);
        // boundaries resolve rearward
        assert_eq!(classify_eyes(0.0, W, F), EyePositionCase::LeftBehind);
        assert_eq!(classify_eyes(F, W, F), EyePositionCase::BothWithin);
        assert_eq!(classify_eyes(W, W, F), EyePositionCase::BothWithin);
        assert_eq!(classify_eyes(W + F, W, F), EyePositionCase::RightAhead);
    }

    #[test]
    fn case_labels_round_trip() {
        for c in EyePositionCase::ALL {
            assert_eq!(c.label().parse::<EyePositionCase>().unwrap(), c);
        }
        assert!("Sideways".parse::<EyePositionCase>().is_err());
    }

    #[test]
    fn binocular_examples() {
        let r = binocular_alpha(13.75, W, D, F).unwrap();
        assert_eq!(r.case, Some(EyePositionCase::BothWithin));
        assert!((r.geometric.degrees() - 31.02).abs() < 0.01);

        // E - f lands on the forward edge itself, so the case is a tie
        let r = binocular_alpha(27.5, W, D, F).unwrap();
        assert!(r.case >= Some(EyePositionCase::RightAhead));
        assert!((r.geometric.degrees() - 24.537).abs() < 1e-3);

        // pillar exactly as wide as the eye spacing, eyes straddling it
        let r = binocular_alpha(F, F, 40.0, F).unwrap();
        assert!(r.effective.degrees().abs() < 1e-12);

        for e in [-1e7, 1e7] {
            let r = binocular_alpha(e, W, D, F).unwrap();
            assert!(r.effective.degrees() < 1e-4);
        }
    }

    #[test]
    fn binocular_clamps_at_zero() {
        // a thin pillar between the eyes is fully compensated
        let r = binocular_alpha(5.0, 2.0, D, F).unwrap();
        assert!(r.geometric.degrees() < 0.0);
        assert_eq!(r.effective, Angle::ZERO);
        assert!(r.clamped);
    }

    #[test]
    fn binocular_rejects_bad_inputs() {
        assert!(binocular_alpha(10.0, 0.0, D, F).is_err());
        assert!(binocular_alpha(10.0, W, -1.0, F).is_err());
        assert!(binocular_alpha(10.0, W, D, 0.0).is_err());
    }

    #[test]
    fn bse_examples() {
        let g = VehicleGeometry::odyssey();
        let d = DriverModel::odyssey();
        let r = monocular_lambda_bse(&g, &d, &BseConfig::from_degrees(45.7).unwrap()).unwrap();
        assert!((r.effective.degrees() - 34.3).abs() < 1e-9);

        let zero = monocular_lambda_bse(&g, &d, &BseConfig::from_degrees(0.0).unwrap()).unwrap();
        let plain = monocular_lambda(&g, &d).unwrap();
        assert_eq!(zero.effective, plain.effective);
        assert_eq!(zero.geometric, plain.geometric);

        let far = d.with_head_position(20.0).unwrap();
        let r = monocular_lambda_bse(&g, &far, &BseConfig::from_degrees(30.0).unwrap()).unwrap();
        assert!((r.effective.degrees() - 50.0).abs() < 1e-9);
    }

    #[test]
    fn bse_rejects_negative_result() {
        let g = VehicleGeometry::odyssey();
        let d = DriverModel::odyssey();
        let err = monocular_lambda_bse(&g, &d, &BseConfig::from_degrees(85.0).unwrap());
        assert!(matches!(err, Err(GeometryError::InvalidParameter { name: "mu", .. })));
    }
}
