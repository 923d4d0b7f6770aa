use serde::Serialize;

use super::par_map;
use crate::error::{invalid, Result};
use crate::headmotion::{required_shift, required_shift_bse};
use crate::mirror::kappa;
use crate::obstruction::{binocular_alpha_at, monocular_lambda, monocular_lambda_bse};
use crate::oracle::{
    bisect_shift, fan_trace_obstruction, random_scene, trace_reflected_line, traced_first_crossing,
    traced_kappa, FanEyes, Metric, OracleReport, RandomScene, Scene, DEFAULT_PATCH_LENGTH,
    MIN_RAYS,
};
use crate::scene::{Angle, FieldOfView};

/// Largest accepted |oracle - closed form| per metric.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Tolerances {
    pub angle_deg: f64,
    pub shift_cm: f64,
    pub kappa_rad: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            angle_deg: 0.1,
            shift_cm: 1e-6,
            kappa_rad: 1e-9,
        }
    }
}

impl Tolerances {
    pub fn for_metric(&self, m: Metric) -> f64 {
        match m {
            Metric::Kappa => self.kappa_rad,
            Metric::Lambda | Metric::LambdaBse | Metric::Alpha => self.angle_deg,
            Metric::Shift | Metric::ShiftBse => self.shift_cm,
        }
    }
}

/// Compares every closed form with its oracle on one scene. Fan traces use
/// `rays` rays per eye and `seed`.
pub fn verify_scene(s: &RandomScene, rays: usize, seed: u64) -> Result<Vec<OracleReport>> {
    let (geom, driver) = (&s.geom, &s.driver);
    let scene = Scene::from_geometry(geom);
    let mut out = Vec::with_capacity(Metric::ALL.len());

    let eye = driver.forward_right_eye();
    let traced = traced_kappa(&trace_reflected_line(&scene, eye)?);
    let closed = kappa(geom, driver)?;
    out.push(OracleReport::new(
        Metric::Kappa,
        traced.radians(),
        closed.radians(),
        0,
        seed,
    ));

    let body = scene.with_rear_body();
    let forward = FanEyes::Monocular {
        eye: driver.forward_left_eye(),
        left_limit: FieldOfView::monocular_left_limit(),
    };
    let fan = fan_trace_obstruction(&body, &forward, rays, seed)?;
    let closed = monocular_lambda(geom, driver)?.effective;
    out.push(OracleReport::new(
        Metric::Lambda,
        fan.obstruction.degrees(),
        closed.degrees(),
        fan.rays_used,
        seed,
    ));

    let mu = s.bse.deflection;
    let sheet = body.with_bse(mu, DEFAULT_PATCH_LENGTH);
    let fan = fan_trace_obstruction(&sheet, &forward, rays, seed)?;
    let closed = monocular_lambda_bse(geom, driver, &s.bse)?.effective;
    out.push(OracleReport::new(
        Metric::LambdaBse,
        fan.obstruction.degrees(),
        closed.degrees(),
        fan.rays_used,
        seed,
    ));

    let (left, right) = driver.turned_eyes(geom, s.eye);
    let fan = fan_trace_obstruction(&scene, &FanEyes::Binocular { left, right }, rays, seed)?;
    let closed = binocular_alpha_at(geom, driver, s.eye)?.effective;
    out.push(OracleReport::new(
        Metric::Alpha,
        fan.obstruction.degrees(),
        closed.degrees(),
        fan.rays_used,
        seed,
    ));

    let target = traced_first_crossing(&scene, driver)?;
    let bisected = bisect_shift(&scene, driver, Angle::ZERO, target)?;
    out.push(OracleReport::new(
        Metric::Shift,
        bisected,
        required_shift(geom, driver)?.shift,
        0,
        seed,
    ));
    let bisected = bisect_shift(&scene, driver, mu, target)?;
    out.push(OracleReport::new(
        Metric::ShiftBse,
        bisected,
        required_shift_bse(geom, driver, &s.bse)?.shift,
        0,
        seed,
    ));
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MetricSummary {
    pub metric: Metric,
    pub unit: &'static str,
    pub tolerance: f64,
    pub checked: usize,
    pub failures: usize,
    pub worst_error: f64,
    /// Scene index of the worst error.
    pub worst_scene: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Offender {
    pub scene: u64,
    /// error / tolerance
    pub ratio: f64,
    pub report: OracleReport,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub trials: usize,
    pub rays: usize,
    pub tolerances: Tolerances,
    pub passed: bool,
    pub metrics: Vec<MetricSummary>,
    /// The five largest errors relative to their tolerance.
    pub worst_offenders: Vec<Offender>,
    /// Scenes on which an oracle or closed form failed outright.
    pub scene_errors: Vec<String>,
}

const OFFENDERS: usize = 5;

/// Runs `trials` random scenes drawn from `seed` through [`verify_scene`].
pub fn verify(
    trials: usize,
    rays: usize,
    seed: u64,
    tolerances: &Tolerances,
    threads: Option<usize>,
) -> Result<VerifyReport> {
    if trials < 1 {
        return Err(invalid("trials", trials as f64, "must be at least 1"));
    }
    if rays < MIN_RAYS {
        return Err(invalid("rays", rays as f64, "must be at least 1000"));
    }
    for (name, t) in [
        ("angle tolerance", tolerances.angle_deg),
        ("shift tolerance", tolerances.shift_cm),
        ("kappa tolerance", tolerances.kappa_rad),
    ] {
        if !(t >= 0.0) {
            return Err(invalid(name, t, "must be non-negative"));
        }
    }
    let indices: Vec<u64> = (0..trials as u64).collect();
    let results = par_map(&indices, threads, |&i| {
        let scene = random_scene(seed, i);
        (i, verify_scene(&scene, rays, seed.wrapping_add(i)))
    });

    let mut metrics: Vec<MetricSummary> = Metric::ALL
        .iter()
        .map(|&m| MetricSummary {
            metric: m,
            unit: m.unit(),
            tolerance: tolerances.for_metric(m),
            checked: 0,
            failures: 0,
            worst_error: 0.0,
            worst_scene: None,
        })
        .collect();
    let mut offenders = Vec::new();
    let mut scene_errors = Vec::new();
    for (i, r) in results {
        let reports = match r {
            Ok(r) => r,
            Err(e) => {
                scene_errors.push(format!("scene {i}: {e}"));
                continue;
            }
        };
        for rep in reports {
            let m = metrics
                .iter_mut()
                .find(|s| s.metric == rep.metric)
                .expect("every metric listed");
            m.checked += 1;
            if !(rep.abs_error <= m.tolerance) {
                m.failures += 1;
            }
            if rep.abs_error > m.worst_error || m.worst_scene.is_none() {
                m.worst_error = rep.abs_error;
                m.worst_scene = Some(i);
            }
            let ratio = if m.tolerance > 0.0 {
                rep.abs_error / m.tolerance
            } else if rep.abs_error == 0.0 {
                0.0
            } else {
                f64::INFINITY
            };
            offenders.push(Offender {
                scene: i,
                ratio,
                report: rep,
            });
        }
    }
    // stable sort keeps scene order among ties
    offenders.sort_by(|a, b| b.ratio.total_cmp(&a.ratio));
    offenders.truncate(OFFENDERS);
    let passed = scene_errors.is_empty() && metrics.iter().all(|m| m.failures == 0);
    Ok(VerifyReport {
        seed,
        trials,
        rays,
        tolerances: *tolerances,
        passed,
        metrics,
        worst_offenders: offenders,
        scene_errors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_run_passes_and_repeats() {
        let t = Tolerances::default();
        let a = verify(8, 20_000, 3, &t, Some(2)).unwrap();
        assert!(a.passed, "{a:#?}");
        assert_eq!(a.metrics.iter().map(|m| m.checked).sum::<usize>(), 48);
        let b = verify(8, 20_000, 3, &t, Some(1)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn zero_angle_tolerance_fails_on_angles() {
        let t = Tolerances {
            angle_deg: 0.0,
            ..Tolerances::default()
        };
        let r = verify(3, 1000, 0, &t, None).unwrap();
        assert!(!r.passed);
        let alpha = r.metrics.iter().find(|m| m.metric == Metric::Alpha).unwrap();
        assert!(alpha.failures > 0);
    }

    #[test]
    fn rejects_bad_input() {
        let t = Tolerances::default();
        assert!(verify(0, 1000, 0, &t, None).is_err());
        assert!(verify(1, 999, 0, &t, None).is_err());
    }
}
