//! Brute-force geometric checks, independent of the closed forms.
//!
//! Everything here works from explicit scene geometry: rays are cast and
//! tested against the pillar, reflections are traced off the mirror segment,
//! and head shifts are found by bisection. None of it calls into the
//! closed-form modules it is used to check.

mod bisect;
mod experiment;
mod fan;
mod random;
mod trace;

pub use bisect::{bisect_shift, traced_first_crossing, BISECT_SPAN_CM, BISECT_TOLERANCE_CM};
pub use experiment::{
    printed_chain, reconstruct_experiment, ChainDiscrepancy, ExperimentReconstruction,
    ExperimentSetup,
};
pub use fan::{fan_trace_obstruction, FanEyes, FanTrace, MIN_RAYS};
pub use random::{random_scene, RandomScene, SceneRanges};
pub use trace::{reflection_residual, trace_reflected_line, traced_kappa};

use serde::Serialize;

use crate::scene::{Angle, Point2, VehicleGeometry};

/// Rearward extent of the side body behind the pillar, cm.
pub const REAR_BODY_LENGTH: f64 = 1.0e4;

/// Default length of the sheet patch forward of the pillar, cm.
pub const DEFAULT_PATCH_LENGTH: f64 = 60.0;

/// Closed axis-aligned rectangle; zero thickness is allowed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rect {
    pub min: Point2,
    pub max: Point2,
}

impl Rect {
    pub fn contains_strictly(&self, p: Point2) -> bool {
        p.x > self.min.x && p.x < self.max.x && p.y > self.min.y && p.y < self.max.y
    }

    /// Slab test for the ray `origin + t·dir`, `t` in [0, t_max]. Touching an
    /// edge or corner counts as a hit.
    pub fn hit_by(&self, origin: Point2, dir: Point2, t_max: f64) -> bool {
        let mut lo = 0.0_f64;
        let mut hi = t_max;
        for (o, d, a, b) in [
            (origin.x, dir.x, self.min.x, self.max.x),
            (origin.y, dir.y, self.min.y, self.max.y),
        ] {
            if d == 0.0 {
                if o < a || o > b {
                    return false;
                }
            } else {
                let t1 = (a - o) / d;
                let t2 = (b - o) / d;
                lo = lo.max(t1.min(t2));
                hi = hi.min(t1.max(t2));
                if lo > hi {
                    return false;
                }
            }
        }
        true
    }
}

/// A mirror as a segment from its base to its outer tip. `along` is the unit
/// direction of the reflecting surface, kept separately so a zero-length
/// mirror still has an orientation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment {
    pub base: Point2,
    pub tip: Point2,
    pub along: Point2,
}

impl Segment {
    /// Panics if `base == tip`; use a struct literal for zero-length mirrors.
    pub fn new(base: Point2, tip: Point2) -> Self {
        let v = tip - base;
        let n = v.norm();
        assert!(n > 0.0, "segment needs distinct endpoints");
        Segment {
            base,
            tip,
            along: v.scale(1.0 / n),
        }
    }
}

/// Refractive sheet on the window line, forward of the pillar.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BsePatch {
    pub start_x: f64,
    pub end_x: f64,
    pub mu: Angle,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Scene {
    pub pillar: Option<Rect>,
    pub rear_body: Option<Rect>,
    pub mirror: Segment,
    /// Lateral position of the window line (h).
    pub window_y: f64,
    pub pillar_width: f64,
    pub bse_patch: Option<BsePatch>,
}

impl Scene {
    /// Pillar as the window-line face [0, W] at y = h, no body, no sheet.
    pub fn from_geometry(geom: &VehicleGeometry) -> Self {
        let h = geom.pillar_offset;
        let w = geom.pillar_width;
        let (s, c) = geom.mirror_angle.radians().sin_cos();
        let base = Point2::new(geom.mirror_base_x, geom.mirror_base_y);
        Scene {
            pillar: Some(Rect {
                min: Point2::new(0.0, h),
                max: Point2::new(w, h),
            }),
            rear_body: None,
            mirror: Segment {
                base,
                tip: Point2::new(base.x - geom.mirror_length * s, base.y + geom.mirror_length * c),
                along: Point2::new(-s, c),
            },
            window_y: h,
            pillar_width: w,
            bse_patch: None,
        }
    }

    /// Gives the pillar a cross-section depth outboard of the window line.
    pub fn with_pillar_depth(mut self, depth: f64) -> Self {
        if let Some(p) = self.pillar.as_mut() {
            p.max.y = self.window_y + depth.max(0.0);
        }
        self
    }

    /// Adds the side body running rearward from the pillar's rear edge.
    pub fn with_rear_body(mut self) -> Self {
        self.rear_body = Some(Rect {
            min: Point2::new(-REAR_BODY_LENGTH, self.window_y),
            max: Point2::new(0.0, self.window_y),
        });
        self
    }

    /// Fits a sheet of `length` cm immediately forward of the pillar.
    pub fn with_bse(mut self, mu: Angle, length: f64) -> Self {
        self.bse_patch = Some(BsePatch {
            start_x: self.pillar_width,
            end_x: self.pillar_width + length,
            mu,
        });
        self
    }

    pub fn without_pillar(mut self) -> Self {
        self.pillar = None;
        self
    }

    pub(crate) fn occluders(&self) -> impl Iterator<Item = &Rect> {
        self.pillar.iter().chain(self.rear_body.iter())
    }
}

/// Quantity checked by a verification run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Kappa,
    Lambda,
    LambdaBse,
    Alpha,
    Shift,
    ShiftBse,
}

impl Metric {
    pub const ALL: [Metric; 6] = [
        Metric::Kappa,
        Metric::Lambda,
        Metric::LambdaBse,
        Metric::Alpha,
        Metric::Shift,
        Metric::ShiftBse,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Kappa => "kappa",
            Metric::Lambda => "lambda",
            Metric::LambdaBse => "lambda_bse",
            Metric::Alpha => "alpha",
            Metric::Shift => "shift",
            Metric::ShiftBse => "shift_bse",
        }
    }

    pub fn unit(self) -> &'static str {
        match self {
            Metric::Kappa => "rad",
            Metric::Lambda | Metric::LambdaBse | Metric::Alpha => "deg",
            Metric::Shift | Metric::ShiftBse => "cm",
        }
    }
}

/// One oracle-versus-closed-form comparison.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleReport {
    pub metric: Metric,
    pub measured: f64,
    pub closed_form: f64,
    pub abs_error: f64,
    pub unit: &'static str,
    pub rays_used: usize,
    pub seed: u64,
}

impl OracleReport {
    pub fn new(metric: Metric, measured: f64, closed_form: f64, rays_used: usize, seed: u64) -> Self {
        OracleReport {
            metric,
            measured,
            closed_form,
            abs_error: (measured - closed_form).abs(),
            unit: metric.unit(),
            rays_used,
            seed,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slab_hits_and_misses() {
        let r = Rect {
            min: Point2::new(0.0, 10.0),
            max: Point2::new(5.0, 10.0),
        };
        let o = Point2::new(2.0, 0.0);
        assert!(r.hit_by(o, Point2::new(0.0, 1.0), f64::INFINITY));
        assert!(!r.hit_by(o, Point2::new(0.0, -1.0), f64::INFINITY));
        assert!(!r.hit_by(o, Point2::new(1.0, 0.0), f64::INFINITY));
        // corner graze
        assert!(r.hit_by(o, Point2::new(3.0, 10.0), f64::INFINITY));
        // segment stops short
        assert!(!r.hit_by(o, Point2::new(0.0, 1.0), 9.0));
    }

    #[test]
    fn scene_from_odyssey() {
        let g = VehicleGeometry::odyssey();
        let s = Scene::from_geometry(&g);
        assert_eq!(s.mirror.tip, g.mirror_tip());
        assert_eq!(s.pillar.unwrap().max, g.pillar_forward_edge());
        let deep = s.with_pillar_depth(10.0);
        assert_eq!(deep.pillar.unwrap().max.y, 35.4);
        assert!(s.with_rear_body().rear_body.is_some());
        assert!(s.without_pillar().pillar.is_none());
    }

    #[test]
    fn report_error_is_absolute() {
        let r = OracleReport::new(Metric::Alpha, 30.0, 31.0, 1000, 7);
        assert_eq!(r.abs_error, 1.0);
        assert_eq!(r.unit, "deg");
    }
}
