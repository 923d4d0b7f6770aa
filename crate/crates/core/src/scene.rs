//! Coordinate frame, domain types and 2D primitives shared by every other module.
//!
//! All positions live in one frame, described by [`CANONICAL_FRAME`]. Angles are
//! carried as [`Angle`] (radians inside, degrees at every external boundary).

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::ops::{Add, Neg, Sub};

use crate::error::{invalid, GeometryError, Result};

/// The single frame used by every computation in this crate.
pub const CANONICAL_FRAME: &str = "\
x: longitudinal, origin at the pillar's rear (reference) edge, +x toward the vehicle front; \
the pillar occupies x in [0, W] on the window line y = h. \
y: lateral, origin on the seat/headrest centerline, +y toward the driver-side window. \
Forward-facing pupils at (H0 + b, +f/2) [left, window side] and (H0 + b, -f/2) [right]. \
Mirror base at (l, p), mirror tip at (l - m sin(theta), p + m cos(theta)). \
Turned-head eye line at y = h - d (y = 0 when d = h): right eye at x = E, left eye at x = E - f. \
Directions are measured counter-clockwise from +x.";

/// Returns the canonical frame definition.
pub fn canonical_frame_doc() -> &'static str {
    CANONICAL_FRAME
}

/// Human field-of-view constants.
pub struct FieldOfView;

impl FieldOfView {
    /// Nominal total viewing angle, degrees.
    pub const TOTAL_DEG: f64 = 120.0;
    /// Smallest unassisted monocular obstruction angle, degrees.
    pub const MONOCULAR_FLOOR_DEG: f64 = 80.0;

    /// Leftmost direction a forward-facing eye can see, measured from +x.
    pub fn monocular_left_limit() -> Angle {
        Angle::from_degrees(180.0 - Self::MONOCULAR_FLOOR_DEG)
    }
}

/// Plane angle stored in radians.
#[derive(Clone, Copy, Debug, Default, PartialEq, PartialOrd)]
pub struct Angle(f64);

impl Angle {
    pub const ZERO: Angle = Angle(0.0);

    pub fn from_radians(rad: f64) -> Self {
        Angle(rad)
    }

    pub fn from_degrees(deg: f64) -> Self {
        Angle(deg.to_radians())
    }

    pub fn radians(self) -> f64 {
        self.0
    }

    pub fn degrees(self) -> f64 {
        self.0.to_degrees()
    }

    /// Direction of a vector, in (-180°, 180°].
    pub fn of_vector(v: Point2) -> Self {
        Angle(v.y.atan2(v.x))
    }

    /// Directional normalization into [0°, 360°).
    pub fn normalized(self) -> Self {
        let r = self.0.rem_euclid(TAU);
        // rem_euclid can round up to exactly TAU for tiny negative inputs
        Angle(if r >= TAU { 0.0 } else { r })
    }

    /// Difference normalization into (-180°, 180°].
    pub fn wrapped(self) -> Self {
        let r = self.normalized().0;
        Angle(if r > PI { r - TAU } else { r })
    }

    pub fn sin(self) -> f64 {
        self.0.sin()
    }

    pub fn cos(self) -> f64 {
        self.0.cos()
    }

    pub fn tan(self) -> f64 {
        self.0.tan()
    }

    pub fn abs(self) -> Self {
        Angle(self.0.abs())
    }

    pub fn max(self, other: Angle) -> Self {
        Angle(self.0.max(other.0))
    }

    pub fn min(self, other: Angle) -> Self {
        Angle(self.0.min(other.0))
    }

    /// Unit vector pointing along this direction.
    pub fn unit(self) -> Point2 {
        Point2::new(self.0.cos(), self.0.sin())
    }
}

impl Add for Angle {
    type Output = Angle;
    fn add(self, rhs: Angle) -> Angle {
        Angle(self.0 + rhs.0)
    }
}

impl Sub for Angle {
    type Output = Angle;
    fn sub(self, rhs: Angle) -> Angle {
        Angle(self.0 - rhs.0)
    }
}

impl Neg for Angle {
    type Output = Angle;
    fn neg(self) -> Angle {
        Angle(-self.0)
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.4}°", self.degrees())
    }
}

/// A point (or displacement) in the canonical frame, in centimetres.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    pub fn dot(self, o: Point2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 3D cross product.
    pub fn cross(self, o: Point2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn scale(self, k: f64) -> Point2 {
        Point2::new(self.x * k, self.y * k)
    }

    pub fn distance(self, o: Point2) -> f64 {
        (o - self).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, o: Point2) -> Point2 {
        Point2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, o: Point2) -> Point2 {
        Point2::new(self.x - o.x, self.y - o.y)
    }
}

/// A ray: origin plus direction. Intersections treat it as the full line.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SightLine {
    pub origin: Point2,
    pub direction: Angle,
}

impl SightLine {
    pub fn new(origin: Point2, direction: Angle) -> Self {
        SightLine { origin, direction }
    }

    /// The line from `from` through `through`, directed toward `through`.
    pub fn through(from: Point2, through: Point2) -> Self {
        SightLine::new(from, Angle::of_vector(through - from))
    }

    pub fn point_at(&self, t: f64) -> Point2 {
        self.origin + self.direction.unit().scale(t)
    }

    /// Lateral coordinate of the line at longitudinal coordinate `x`; `None` for a
    /// line parallel to the y-axis.
    pub fn y_at(&self, x: f64) -> Option<f64> {
        let u = self.direction.unit();
        if u.x.abs() < 1e-15 {
            return None;
        }
        Some(self.origin.y + (x - self.origin.x) * u.y / u.x)
    }

    /// Signed perpendicular distance of `p` from the line (positive to the left).
    pub fn signed_distance(&self, p: Point2) -> f64 {
        self.direction.unit().cross(p - self.origin)
    }
}

/// Tolerance on the cross product of unit directions below which lines are parallel.
pub const PARALLEL_TOLERANCE: f64 = 1e-12;

/// Intersection of the two infinite lines carrying `a` and `b`.
///
/// The result does not depend on argument order: both orders evaluate the same
/// expression on a canonically ordered pair.
pub fn intersect_lines(a: &SightLine, b: &SightLine) -> Result<Point2> {
    let (a, b) = if line_key(a) <= line_key(b) {
        (a, b)
    } else {
        (b, a)
    };
    let da = a.direction.unit();
    let db = b.direction.unit();
    let denom = da.cross(db);
    if denom.abs() < PARALLEL_TOLERANCE {
        return Err(GeometryError::ParallelLines);
    }
    let t = (b.origin - a.origin).cross(db) / denom;
    Ok(a.point_at(t))
}

fn line_key(l: &SightLine) -> (u64, u64, u64) {
    (
        l.origin.x.to_bits(),
        l.origin.y.to_bits(),
        l.direction.radians().to_bits(),
    )
}

/// Law of reflection: the outgoing direction of a ray travelling along
/// `incoming` after bouncing off a surface with normal `mirror_normal`.
pub fn reflect_direction(incoming: Angle, mirror_normal: Angle) -> Angle {
    let d = incoming.unit();
    let n = mirror_normal.unit();
    let out = d - n.scale(2.0 * d.dot(n));
    Angle::of_vector(out).normalized()
}

/// Constant angular deflection applied by the refractive sheet. Positive `mu`
/// turns a sight line counter-clockwise, i.e. further rearward for lines that
/// leave the window toward the rear-left.
pub fn deflect(direction: Angle, mu: Angle) -> Angle {
    (direction + mu).normalized()
}

/// Forward offset of the pupils from the back of the head: the leg of the
/// isosceles head triangle with sides `head_to_pupil` and base `interpupillary`.
pub fn pupil_offset(head_to_pupil: f64, interpupillary: f64) -> Result<f64> {
    if !(head_to_pupil > 0.0) || !head_to_pupil.is_finite() {
        return Err(invalid("g", head_to_pupil, "must be positive"));
    }
    if !(interpupillary >= 0.0) || !interpupillary.is_finite() {
        return Err(invalid("f", interpupillary, "must be non-negative"));
    }
    if interpupillary >= 2.0 * head_to_pupil {
        return Err(invalid("f", interpupillary, "must be smaller than 2g"));
    }
    let half = 0.5 * interpupillary;
    Ok(((head_to_pupil - half) * (head_to_pupil + half)).sqrt())
}

/// Pillar, mirror and mounting dimensions of one vehicle (lengths in cm).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VehicleGeometry {
    /// Pillar cross-section width along the window line (W).
    pub pillar_width: f64,
    /// Lateral distance from the headrest centerline to the pillar (h).
    pub pillar_offset: f64,
    /// Longitudinal distance from the pillar reference edge to the mirror base (l).
    pub mirror_base_x: f64,
    /// Lateral distance from the headrest centerline to the mirror base (p).
    pub mirror_base_y: f64,
    /// Mirror length (m).
    pub mirror_length: f64,
    /// Mirror angle from the lateral axis (theta).
    pub mirror_angle: Angle,
}

impl VehicleGeometry {
    pub fn new(
        pillar_width: f64,
        pillar_offset: f64,
        mirror_base_x: f64,
        mirror_base_y: f64,
        mirror_length: f64,
        mirror_angle: Angle,
    ) -> Result<Self> {
        let g = VehicleGeometry {
            pillar_width,
            pillar_offset,
            mirror_base_x,
            mirror_base_y,
            mirror_length,
            mirror_angle,
        };
        g.validate()?;
        Ok(g)
    }

    /// 2007 Honda Odyssey measurements used for the prototype experiment.
    pub fn odyssey() -> Self {
        VehicleGeometry {
            pillar_width: 20.8,
            pillar_offset: 25.4,
            mirror_base_x: 107.0,
            mirror_base_y: 27.9,
            mirror_length: 17.8,
            mirror_angle: Angle::from_degrees(9.0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        positive("W", self.pillar_width)?;
        positive("h", self.pillar_offset)?;
        positive("l", self.mirror_base_x)?;
        positive("p", self.mirror_base_y)?;
        if !(self.mirror_length >= 0.0) || !self.mirror_length.is_finite() {
            return Err(invalid("m", self.mirror_length, "must be non-negative"));
        }
        let theta = self.mirror_angle.degrees();
        if !(0.0..45.0).contains(&theta) {
            return Err(invalid("theta", theta, "must lie in [0, 45) degrees"));
        }
        Ok(())
    }

    pub fn with_pillar_width(mut self, w: f64) -> Result<Self> {
        self.pillar_width = w;
        self.validate()?;
        Ok(self)
    }

    /// Outer end of the mirror, (l - m sin(theta), p + m cos(theta)).
    pub fn mirror_tip(&self) -> Point2 {
        let (s, c) = self.mirror_angle.radians().sin_cos();
        Point2::new(
            self.mirror_base_x - self.mirror_length * s,
            self.mirror_base_y + self.mirror_length * c,
        )
    }

    pub fn mirror_base(&self) -> Point2 {
        Point2::new(self.mirror_base_x, self.mirror_base_y)
    }

    /// Pillar rear (reference) edge on the window line.
    pub fn pillar_rear_edge(&self) -> Point2 {
        Point2::new(0.0, self.pillar_offset)
    }

    /// Pillar forward edge on the window line.
    pub fn pillar_forward_edge(&self) -> Point2 {
        Point2::new(self.pillar_width, self.pillar_offset)
    }
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(name, v, "must be positive"))
    }
}

/// Adult interpupillary range, cm.
pub const INTERPUPILLARY_RANGE: (f64, f64) = (5.4, 7.4);

/// Head and eye placement of the driver (lengths in cm).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DriverModel {
    /// Interpupillary distance (f).
    pub interpupillary: f64,
    /// Distance from the back-of-head centre to each pupil (g).
    pub head_to_pupil: f64,
    /// Longitudinal distance from the pillar reference edge to the headrest centre (H0).
    pub head_position: f64,
    /// Eye-line to pillar distance for the turned head (d); `None` means d = h.
    pub eye_to_pillar: Option<f64>,
    pupil_forward: f64,
}

impl DriverModel {
    pub fn new(
        interpupillary: f64,
        head_to_pupil: f64,
        head_position: f64,
        eye_to_pillar: Option<f64>,
    ) -> Result<Self> {
        if !(interpupillary > 0.0) || !interpupillary.is_finite() {
            return Err(invalid("f", interpupillary, "must be positive"));
        }
        let pupil_forward = pupil_offset(head_to_pupil, interpupillary)?;
        if !head_position.is_finite() {
            return Err(invalid("H0", head_position, "must be finite"));
        }
        if let Some(d) = eye_to_pillar {
            positive("d", d)?;
        }
        let (lo, hi) = INTERPUPILLARY_RANGE;
        if !(lo..=hi).contains(&interpupillary) {
            log::warn!("interpupillary distance {interpupillary} cm lies outside the adult range [{lo}, {hi}] cm");
        }
        Ok(DriverModel {
            interpupillary,
            head_to_pupil,
            head_position,
            eye_to_pillar,
            pupil_forward,
        })
    }

    /// The prototype mannequin: f = 6.7, g = 19, H0 = 6, d = h.
    pub fn odyssey() -> Self {
        DriverModel::new(6.7, 19.0, 6.0, None).expect("valid preset")
    }

    pub fn with_head_position(&self, head_position: f64) -> Result<Self> {
        DriverModel::new(
            self.interpupillary,
            self.head_to_pupil,
            head_position,
            self.eye_to_pillar,
        )
    }

    /// Head position that puts the turned-head right eye at `right_eye_x`.
    pub fn with_turned_right_eye(&self, right_eye_x: f64) -> Result<Self> {
        self.with_head_position(right_eye_x - 0.5 * (self.pupil_forward + self.interpupillary))
    }

    /// Derived pupil forward offset (b).
    pub fn pupil_forward_offset(&self) -> f64 {
        self.pupil_forward
    }

    /// Derived turned-head right-eye position at the headrest, E0 = H0 + (b + f)/2.
    pub fn turned_right_eye(&self) -> f64 {
        self.head_position + 0.5 * (self.pupil_forward + self.interpupillary)
    }

    /// d, falling back to the pillar offset h.
    pub fn eye_to_pillar(&self, geom: &VehicleGeometry) -> f64 {
        self.eye_to_pillar.unwrap_or(geom.pillar_offset)
    }

    /// Forward-facing left (window-side) pupil.
    pub fn forward_left_eye(&self) -> Point2 {
        Point2::new(
            self.head_position + self.pupil_forward,
            0.5 * self.interpupillary,
        )
    }

    /// Forward-facing right pupil.
    pub fn forward_right_eye(&self) -> Point2 {
        Point2::new(
            self.head_position + self.pupil_forward,
            -0.5 * self.interpupillary,
        )
    }

    /// Turned-head eyes (left, right) for a right eye at longitudinal position `e`.
    pub fn turned_eyes(&self, geom: &VehicleGeometry, e: f64) -> (Point2, Point2) {
        let y = geom.pillar_offset - self.eye_to_pillar(geom);
        (
            Point2::new(e - self.interpupillary, y),
            Point2::new(e, y),
        )
    }
}

/// Refractive sheet on the window, modelled as a constant deflection.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BseConfig {
    pub deflection: Angle,
}

impl BseConfig {
    pub fn new(deflection: Angle) -> Result<Self> {
        let deg = deflection.degrees();
        if !(0.0..90.0).contains(&deg) {
            return Err(invalid("mu", deg, "must lie in [0, 90) degrees"));
        }
        Ok(BseConfig { deflection })
    }

    pub fn from_degrees(deg: f64) -> Result<Self> {
        Self::new(Angle::from_degrees(deg))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn pupil_offset_examples() {
        assert!(close(pupil_offset(19.0, 6.7).unwrap(), 18.7023, 1e-4));
        assert_eq!(pupil_offset(5.0, 6.0).unwrap(), 4.0);
        assert_eq!(pupil_offset(7.5, 0.0).unwrap(), 7.5);
    }

    #[test]
    fn pupil_offset_domain() {
        assert!(pupil_offset(3.0, 6.0).is_err());
        assert!(pupil_offset(3.0, 7.0).is_err());
        assert!(pupil_offset(0.0, 1.0).is_err());
        assert!(pupil_offset(-4.0, 1.0).is_err());
        assert!(pupil_offset(4.0, -1.0).is_err());
    }

    #[test]
    fn frame_positions() {
        let d = DriverModel::odyssey();
        let right = d.forward_right_eye();
        assert!(close(right.x, 24.7, 0.01) && close(right.y, -3.35, 1e-12));
        assert!(close(d.turned_right_eye(), 18.7, 0.01));

        let origin = d.with_head_position(0.0).unwrap();
        let eye = origin.forward_left_eye();
        assert_eq!(eye.x, origin.pupil_forward_offset());
        assert_eq!(eye.y, 3.35);
    }

    #[test]
    fn intersect_examples() {
        let a = SightLine::new(Point2::new(0.0, 0.0), Angle::ZERO);
        let b = SightLine::new(Point2::new(1.0, 5.0), Angle::from_degrees(90.0));
        let p = intersect_lines(&a, &b).unwrap();
        assert!(close(p.x, 1.0, 1e-12) && close(p.y, 0.0, 1e-12));

        let c = SightLine::new(Point2::new(0.0, 0.0), Angle::from_degrees(45.0));
        let e = SightLine::new(Point2::new(0.0, 3.0), Angle::from_degrees(45.0));
        assert_eq!(intersect_lines(&c, &e), Err(GeometryError::ParallelLines));
        let e2 = SightLine::new(Point2::new(0.0, 3.0), Angle::from_degrees(225.0));
        assert_eq!(intersect_lines(&c, &e2), Err(GeometryError::ParallelLines));
    }

    #[test]
    fn reflection_examples() {
        let out = reflect_direction(Angle::from_degrees(180.0), Angle::ZERO);
        assert!(close(out.wrapped().degrees(), 0.0, 1e-12));
        // a ray rising at 45° off a horizontal surface leaves descending at -45°
        let out = reflect_direction(Angle::from_degrees(45.0), Angle::from_degrees(90.0));
        assert!(close(out.degrees(), 315.0, 1e-12));
        // normal orientation does not matter
        let flipped = reflect_direction(Angle::from_degrees(45.0), Angle::from_degrees(270.0));
        assert!(close(flipped.degrees(), 315.0, 1e-12));
    }

    #[test]
    fn deflect_examples() {
        let x = Angle::from_degrees(123.0);
        assert!(close(deflect(x, Angle::ZERO).degrees(), 123.0, 1e-12));
        let y = deflect(Angle::from_degrees(77.9), Angle::from_degrees(45.7));
        assert!(close(y.degrees(), 123.6, 1e-12));
    }

    #[test]
    fn angle_normalization() {
        assert!(close(Angle::from_degrees(-30.0).normalized().degrees(), 330.0, 1e-12));
        assert!(close(Angle::from_degrees(725.0).normalized().degrees(), 5.0, 1e-9));
        assert!(close(Angle::from_degrees(180.0).wrapped().degrees(), 180.0, 1e-12));
        assert!(close(Angle::from_degrees(-180.0).wrapped().degrees(), 180.0, 1e-12));
        assert!(close(Angle::from_degrees(190.0).wrapped().degrees(), -170.0, 1e-9));
        let tiny = Angle::from_radians(-1e-18).normalized();
        assert!(tiny.radians() >= 0.0 && tiny.radians() < TAU);
    }

    #[test]
    fn geometry_validation() {
        let g = VehicleGeometry::odyssey();
        assert!(g.validate().is_ok());
        assert!(g.with_pillar_width(-1.0).is_err());
        let mut bad = g;
        bad.mirror_angle = Angle::from_degrees(45.0);
        assert!(bad.validate().is_err());
        bad.mirror_angle = Angle::from_degrees(0.0);
        bad.mirror_length = 0.0;
        assert!(bad.validate().is_ok());
        assert!(BseConfig::from_degrees(90.0).is_err());
        assert!(BseConfig::from_degrees(-1.0).is_err());
        assert!(BseConfig::from_degrees(45.7).is_ok());
    }

    #[test]
    fn driver_rejects_wide_pupils() {
        assert!(DriverModel::new(38.0, 19.0, 6.0, None).is_err());
        assert!(DriverModel::new(0.0, 19.0, 6.0, None).is_err());
        assert!(DriverModel::new(6.7, 19.0, 6.0, Some(0.0)).is_err());
        // outside the adult range only warns
        assert!(DriverModel::new(9.0, 19.0, 6.0, None).is_ok());
    }

    #[test]
    fn turned_eye_from_position() {
        let d = DriverModel::odyssey();
        let moved = d.with_turned_right_eye(30.0).unwrap();
        assert!(close(moved.turned_right_eye(), 30.0, 1e-12));
    }
}
