use super::Scene;
use crate::error::{GeometryError, Result};
use crate::scene::{reflect_direction, Angle, Point2, SightLine};

/// Traces the ray from `eye` to the mirror's outer tip and reflects it off the
/// mirror surface. The returned line is anchored at the tip.
pub fn trace_reflected_line(scene: &Scene, eye: Point2) -> Result<SightLine> {
    let tip = scene.mirror.tip;
    let to_tip = tip - eye;
    if scene.occluders().any(|r| r.hit_by(eye, to_tip, 1.0)) {
        return Err(GeometryError::Obstructed("line of sight to the mirror tip"));
    }
    let incoming = Angle::of_vector(to_tip);
    let out = reflect_direction(incoming, mirror_normal(scene));
    Ok(SightLine::new(tip, out))
}

fn mirror_normal(scene: &Scene) -> Angle {
    let along = scene.mirror.along;
    Angle::of_vector(Point2::new(-along.y, along.x))
}

/// Angle of a traced mirror line below the rearward axis, i.e. 180° minus its
/// direction. Positive when the line rises toward the rear.
pub fn traced_kappa(line: &SightLine) -> Angle {
    (Angle::from_degrees(180.0) - line.direction).wrapped()
}

/// |angle of incidence - angle of reflection| about the mirror normal.
pub fn reflection_residual(scene: &Scene, eye: Point2, reflected: &SightLine) -> Result<f64> {
    let n = mirror_normal(scene).unit();
    let to_tip = scene.mirror.tip - eye;
    let d_in = to_tip.scale(1.0 / to_tip.norm());
    let d_out = reflected.direction.unit();
    let incidence = (-d_in.dot(n)).clamp(-1.0, 1.0).acos();
    let reflection = d_out.dot(n).clamp(-1.0, 1.0).acos();
    Ok((incidence - reflection).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{Rect, Segment};
    use crate::scene::{DriverModel, VehicleGeometry};

    fn bare_scene(base: Point2, tip: Point2) -> Scene {
        Scene {
            pillar: None,
            rear_body: None,
            mirror: Segment::new(base, tip),
            window_y: 25.4,
            pillar_width: 20.8,
            bse_patch: None,
        }
    }

    #[test]
    fn straight_back_on_the_perpendicular() {
        // mirror along the lateral axis, eye on its perpendicular through the tip
        let s = bare_scene(Point2::new(100.0, 20.0), Point2::new(100.0, 30.0));
        let line = trace_reflected_line(&s, Point2::new(0.0, 30.0)).unwrap();
        assert!((line.direction.degrees() - 180.0).abs() < 1e-12);
    }

    #[test]
    fn forty_five_degree_mirror_turns_by_ninety() {
        let s = bare_scene(Point2::new(10.0, 0.0), Point2::new(0.0, 10.0));
        let line = trace_reflected_line(&s, Point2::new(-50.0, 10.0)).unwrap();
        let incoming = Angle::ZERO;
        let turn = (line.direction - incoming).wrapped().degrees().abs();
        assert!((turn - 90.0).abs() < 1e-12, "{turn}");
    }

    #[test]
    fn odyssey_matches_reflection_law() {
        let g = VehicleGeometry::odyssey();
        let d = DriverModel::odyssey();
        let s = Scene::from_geometry(&g);
        let eye = d.forward_right_eye();
        let line = trace_reflected_line(&s, eye).unwrap();
        assert!((traced_kappa(&line).degrees() - 13.555).abs() < 1e-3);
        assert!(reflection_residual(&s, eye, &line).unwrap() < 1e-12);
    }

    #[test]
    fn blocked_glance() {
        let mut s = bare_scene(Point2::new(100.0, 20.0), Point2::new(100.0, 30.0));
        s.pillar = Some(Rect {
            min: Point2::new(40.0, 0.0),
            max: Point2::new(41.0, 40.0),
        });
        assert!(matches!(
            trace_reflected_line(&s, Point2::new(0.0, 30.0)),
            Err(GeometryError::Obstructed(_))
        ));
    }
}
