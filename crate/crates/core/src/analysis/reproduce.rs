use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::sweep::{SweepSpec, DEFAULT_MU_LIST, DEFAULT_WIDTH_LOCATIONS};
use super::{sweep_head, sweep_shift, sweep_width, width_threshold, SweepResult};
use crate::error::Result;
use crate::headmotion::{required_shift, required_shift_bse};
use crate::mirror::kappa;
use crate::obstruction::{binocular_alpha_at, monocular_lambda, monocular_lambda_bse};
use crate::oracle::{
    bisect_shift, fan_trace_obstruction, printed_chain, reconstruct_experiment,
    trace_reflected_line, traced_first_crossing, traced_kappa, ChainDiscrepancy, ExperimentSetup,
    FanEyes, Metric, OracleReport, Scene, DEFAULT_PATCH_LENGTH,
};
use crate::scene::{Angle, BseConfig, DriverModel, FieldOfView, Point2, VehicleGeometry};

/// Fan size for the reproduction cross-checks.
pub const REPRODUCE_RAYS: usize = 100_000;

const PUBLISHED_MU_DEG: f64 = 45.7;
const SAMPLED_ROWS: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FigureId {
    Fig20,
    Fig22,
    Fig25,
    Experiment,
}

impl FigureId {
    pub const ALL: [FigureId; 4] = [FigureId::Fig20, FigureId::Fig22, FigureId::Fig25, FigureId::Experiment];

    pub fn name(self) -> &'static str {
        match self {
            FigureId::Fig20 => "fig20",
            FigureId::Fig22 => "fig22",
            FigureId::Fig25 => "fig25",
            FigureId::Experiment => "experiment",
        }
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FigureId {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        FigureId::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| format!("unknown figure '{s}'; expected fig20, fig22, fig25 or experiment"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Match,
    Flagged,
}

impl Status {
    fn from_ok(ok: bool) -> Self {
        if ok {
            Status::Match
        } else {
            Status::Flagged
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Status::Match => "match",
            Status::Flagged => "flagged",
        }
    }
}

/// One line of the published-versus-computed table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Discrepancy {
    pub quantity: String,
    pub published: String,
    pub computed: String,
    pub status: Status,
    pub note: String,
}

impl Discrepancy {
    fn new(quantity: &str, published: impl Into<String>, computed: impl Into<String>, status: Status, note: &str) -> Self {
        Discrepancy {
            quantity: quantity.into(),
            published: published.into(),
            computed: computed.into(),
            status,
            note: note.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentSummary {
    pub sheet_angle_deg: f64,
    pub unaided_intercept_cm: f64,
    pub aided_intercept_cm: f64,
    pub inferred_mu_deg: f64,
    pub ab_distance_cm: f64,
    pub deflection_point: [f64; 2],
    pub point_a: [f64; 2],
    pub point_b: [f64; 2],
    pub sheet_reference: [f64; 2],
    /// Same reconstruction with the sheet on the formula's mirror line.
    pub computed_kappa_deg: f64,
    pub inferred_mu_at_computed_kappa_deg: Option<f64>,
    pub chain: Vec<ChainDiscrepancy>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Reproduction {
    pub figure: FigureId,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub experiment: Option<ExperimentSummary>,
    pub oracle_checks: Vec<OracleReport>,
    pub discrepancies: Vec<Discrepancy>,
    pub notes: Vec<String>,
}

impl Reproduction {
    /// The discrepancy table as markdown.
    pub fn markdown_table(&self) -> String {
        let mut s = format!("# {} reproduction\n\n", self.figure);
        s.push_str("| quantity | published | computed | status | note |\n");
        s.push_str("|---|---|---|---|---|\n");
        for d in &self.discrepancies {
            s.push_str(&format!(
                "| {} | {} | {} | {} | {} |\n",
                cell(&d.quantity),
                cell(&d.published),
                cell(&d.computed),
                d.status.label(),
                cell(&d.note)
            ));
        }
        if !self.oracle_checks.is_empty() {
            s.push_str("\n## Oracle cross-checks\n\n");
            s.push_str("| metric | oracle | closed form | abs error | unit | rays | seed |\n");
            s.push_str("|---|---|---|---|---|---|---|\n");
            for r in &self.oracle_checks {
                s.push_str(&format!(
                    "| {} | {:.4} | {:.4} | {:.3e} | {} | {} | {} |\n",
                    r.metric.name(),
                    r.measured,
                    r.closed_form,
                    r.abs_error,
                    r.unit,
                    r.rays_used,
                    r.seed
                ));
            }
        }
        if !self.notes.is_empty() {
            s.push_str("\n## Notes\n\n");
            for n in &self.notes {
                s.push_str(&format!("- {n}\n"));
            }
        }
        s
    }
}

fn cell(s: &str) -> String {
    s.replace('|', "\\|")
}

fn fmt4(x: f64) -> String {
    format!("{x:.4}")
}

fn opt4(x: Option<f64>) -> String {
    x.map_or_else(|| "n/a".to_string(), fmt4)
}

fn point(p: Point2) -> [f64; 2] {
    [super::round4(p.x), super::round4(p.y)]
}

/// Row indices spread evenly over `n` rows.
fn sampled_rows(n: usize) -> Vec<usize> {
    if n == 0 {
        return Vec::new();
    }
    (0..SAMPLED_ROWS)
        .map(|k| k * (n - 1) / (SAMPLED_ROWS - 1))
        .collect()
}

/// Runs the sweep or reconstruction behind one published figure, cross-checks
/// sampled rows with the oracle and tabulates published against computed
/// values. Fan traces use `rays` rays seeded by `seed`.
pub fn reproduce(
    figure: FigureId,
    geom: &VehicleGeometry,
    driver: &DriverModel,
    rays: usize,
    seed: u64,
    threads: Option<usize>,
) -> Result<Reproduction> {
    match figure {
        FigureId::Fig20 => fig20(geom, driver, rays, seed, threads),
        FigureId::Fig22 => fig22(geom, driver, rays, seed, threads),
        FigureId::Fig25 => fig25(geom, driver, seed, threads),
        FigureId::Experiment => experiment(geom, driver, rays, seed),
    }
}

fn fig20(
    geom: &VehicleGeometry,
    driver: &DriverModel,
    rays: usize,
    seed: u64,
    threads: Option<usize>,
) -> Result<Reproduction> {
    let spec = SweepSpec::width_default().with_threads(threads);
    let sweep = sweep_width(geom, driver, &spec)?;

    let mut checks = Vec::new();
    for (k, row) in sampled_rows(sweep.rows.len()).into_iter().enumerate() {
        let s = k % spec.scenarios.len();
        let e0 = DEFAULT_WIDTH_LOCATIONS[s];
        let w = sweep.rows[row].x;
        let g = geom.with_pillar_width(w)?;
        let d = driver.with_turned_right_eye(e0)?;
        let (left, right) = d.turned_eyes(&g, e0);
        let fan = fan_trace_obstruction(&Scene::from_geometry(&g), &FanEyes::Binocular { left, right }, rays, seed)?;
        let closed = binocular_alpha_at(&g, &d, e0)?.effective;
        checks.push(OracleReport::new(Metric::Alpha, fan.obstruction.degrees(), closed.degrees(), fan.rays_used, seed));
    }

    let threshold = width_threshold(geom, driver, &DEFAULT_WIDTH_LOCATIONS, 1.0)?;
    let monotone = sweep
        .columns
        .iter()
        .enumerate()
        .filter(|(_, c)| c.plotted)
        .all(|(i, _)| {
            let s: Vec<Option<f64>> = sweep.series(i);
            s.windows(2).all(|p| match (p[0], p[1]) {
                (Some(a), Some(b)) => a <= b,
                _ => true,
            })
        });
    let discrepancies = vec![
        Discrepancy::new(
            "zero-impact width threshold (alpha > 1 deg at all three eye locations)",
            "< 7 cm",
            format!("{} cm", fmt4(threshold)),
            Status::from_ok(threshold > 6.0 && threshold < 8.0),
            "semi-quantitative; accepted range (6, 8) cm",
        ),
        Discrepancy::new(
            "binocular angle against pillar width",
            "increases with width",
            if monotone { "non-decreasing in every column" } else { "not monotone" },
            Status::from_ok(monotone),
            "",
        ),
    ];
    let notes = vec![
        format!(
            "eye locations E0 = {:?} cm are a reconstruction (behind, within, ahead of the pillar); values are grid-dependent",
            DEFAULT_WIDTH_LOCATIONS
        ),
        "monocular columns are the effective (floored) forward-facing angle at the head position matching each E0".into(),
    ];
    Ok(Reproduction {
        figure: FigureId::Fig20,
        sweep: Some(sweep),
        experiment: None,
        oracle_checks: checks,
        discrepancies,
        notes,
    })
}

fn fig22(
    geom: &VehicleGeometry,
    driver: &DriverModel,
    rays: usize,
    seed: u64,
    threads: Option<usize>,
) -> Result<Reproduction> {
    let spec = SweepSpec::head_default(PUBLISHED_MU_DEG)?.with_threads(threads);
    let sweep = sweep_head(geom, driver, &spec)?;
    let bse = BseConfig::from_degrees(PUBLISHED_MU_DEG)?;

    let mut checks = Vec::new();
    for (k, row) in sampled_rows(sweep.rows.len()).into_iter().enumerate() {
        let d = driver.with_head_position(sweep.rows[row].x)?;
        let eyes = FanEyes::Monocular {
            eye: d.forward_left_eye(),
            left_limit: FieldOfView::monocular_left_limit(),
        };
        let body = Scene::from_geometry(geom).with_rear_body();
        let report = if k % 2 == 0 {
            let fan = fan_trace_obstruction(&body, &eyes, rays, seed)?;
            let closed = monocular_lambda(geom, &d)?.effective;
            OracleReport::new(Metric::Lambda, fan.obstruction.degrees(), closed.degrees(), fan.rays_used, seed)
        } else {
            let sheet = body.with_bse(bse.deflection, DEFAULT_PATCH_LENGTH);
            let fan = fan_trace_obstruction(&sheet, &eyes, rays, seed)?;
            let closed = monocular_lambda_bse(geom, &d, &bse)?.effective;
            OracleReport::new(Metric::LambdaBse, fan.obstruction.degrees(), closed.degrees(), fan.rays_used, seed)
        };
        checks.push(report);
    }

    let forward: Vec<_> = sweep.rows.iter().filter(|r| r.x >= 6.0).collect();
    let assisted_min = sweep
        .rows
        .iter()
        .filter_map(|r| r.values[1])
        .fold(f64::INFINITY, f64::min);
    let min_everywhere_forward = !forward.is_empty()
        && forward
            .iter()
            .all(|r| r.values[1].is_some_and(|v| (v - assisted_min).abs() < 1e-9));
    let floored = !forward.is_empty() && forward.iter().all(|r| r.values[0] == Some(80.0));
    let reduction = sweep.summary.first().and_then(|r| r.mean_percent);
    let discrepancies = vec![
        Discrepancy::new(
            "minimum assisted angle (mu = 45.7 deg)",
            "34 deg",
            format!("{} deg", fmt4(assisted_min)),
            Status::from_ok((assisted_min - 34.0).abs() <= 0.5),
            "tolerance 0.5 deg",
        ),
        Discrepancy::new(
            "minimum attained for every H0 >= 6 cm",
            "from H0 = 6 cm on",
            if min_everywhere_forward { "yes" } else { "no" },
            Status::from_ok(min_everywhere_forward),
            "",
        ),
        Discrepancy::new(
            "unassisted angle for H0 >= 6 cm",
            "80 deg",
            if floored { "80.0000 deg in every row" } else { "not constant" },
            Status::from_ok(floored),
            "field-of-view floor",
        ),
        Discrepancy::new(
            "average reduction of the obstruction angle",
            "41.37 %",
            format!("{} %", opt4(reduction)),
            Status::from_ok(reduction.is_some_and(|r| (r - 41.37).abs() <= 5.0)),
            "grid-dependent soft check, tolerance 5 percentage points; the results section prints 41.39 %",
        ),
    ];
    let notes = vec![
        format!("grid H0 = {} cm; the published grid is not stated", spec.range),
        "reduction = mean over grid points of (unassisted - assisted)/unassisted".into(),
    ];
    Ok(Reproduction {
        figure: FigureId::Fig22,
        sweep: Some(sweep),
        experiment: None,
        oracle_checks: checks,
        discrepancies,
        notes,
    })
}

fn fig25(
    geom: &VehicleGeometry,
    driver: &DriverModel,
    seed: u64,
    threads: Option<usize>,
) -> Result<Reproduction> {
    let spec = SweepSpec::shift_default(&DEFAULT_MU_LIST)?.with_threads(threads);
    let sweep = sweep_shift(geom, driver, &spec)?;

    let mut checks = Vec::new();
    let scene = Scene::from_geometry(geom);
    for (k, row) in sampled_rows(sweep.rows.len()).into_iter().enumerate() {
        let d = driver.with_head_position(sweep.rows[row].x)?;
        let bse = BseConfig::from_degrees(DEFAULT_MU_LIST[k % DEFAULT_MU_LIST.len()])?;
        let target = traced_first_crossing(&scene, &d)?;
        let bisected = bisect_shift(&scene, &d, bse.deflection, target)?;
        let closed = required_shift_bse(geom, &d, &bse)?.shift;
        let metric = if bse.deflection == Angle::ZERO { Metric::Shift } else { Metric::ShiftBse };
        checks.push(OracleReport::new(metric, bisected, closed, 0, seed));
    }

    let ordered = sweep.rows.iter().all(|r| match (r.values[0], r.values[1], r.values[2]) {
        (Some(plain), Some(m30), Some(m45)) => m45 <= m30 && m30 <= plain,
        _ => false,
    });
    let positive = sweep
        .rows
        .iter()
        .all(|r| match (r.values[0], r.values[1], r.values[2]) {
            (Some(plain), Some(m30), Some(m45)) => plain > m30 && plain > m45,
            _ => false,
        });
    let reduction = |i: usize| sweep.summary.get(i).and_then(|r| r.mean_percent);
    let compare = |published: f64, got: Option<f64>| Status::from_ok(got.is_some_and(|g| (g - published).abs() <= 5.0));
    let discrepancies = vec![
        Discrepancy::new(
            "pointwise ordering dE_b(45.7) <= dE_b(30) <= dE",
            "implied",
            if ordered { "holds in every row" } else { "violated" },
            Status::from_ok(ordered),
            "",
        ),
        Discrepancy::new(
            "reduction positive at every grid point",
            "implied",
            if positive { "yes" } else { "no" },
            Status::from_ok(positive),
            "",
        ),
        Discrepancy::new(
            "average movement reduction, mu = 30 deg",
            "58.11 %",
            format!("{} %", opt4(reduction(0))),
            compare(58.11, reduction(0)),
            "comparison only; grid-dependent",
        ),
        Discrepancy::new(
            "average movement reduction, mu = 45.7 deg",
            "79.85 %",
            format!("{} %", opt4(reduction(1))),
            compare(79.85, reduction(1)),
            "comparison only; grid-dependent; above 100 % where the sheet alone over-covers",
        ),
    ];
    let notes = vec![
        format!("grid H0 = {} cm with E0 derived; the published x-axis variable and grid are not stated", spec.range),
        "negative movements (head already far enough forward) are kept, not clamped".into(),
    ];
    Ok(Reproduction {
        figure: FigureId::Fig25,
        sweep: Some(sweep),
        experiment: None,
        oracle_checks: checks,
        discrepancies,
        notes,
    })
}

fn experiment(geom: &VehicleGeometry, driver: &DriverModel, rays: usize, seed: u64) -> Result<Reproduction> {
    let setup = ExperimentSetup {
        geom: *geom,
        driver: *driver,
        ..ExperimentSetup::odyssey()
    };
    let recon = reconstruct_experiment(&setup)?;
    let computed_kappa = kappa(geom, driver)?;
    let at_computed = reconstruct_experiment(&ExperimentSetup {
        sheet_angle: computed_kappa,
        ..setup
    })
    .ok()
    .map(|r| super::round4(r.inferred_mu.degrees()));
    let chain = printed_chain();

    let scene = Scene::from_geometry(geom);
    let bse = BseConfig::from_degrees(PUBLISHED_MU_DEG)?;
    let mut checks = Vec::new();
    let traced = traced_kappa(&trace_reflected_line(&scene, driver.forward_right_eye())?);
    checks.push(OracleReport::new(Metric::Kappa, traced.radians(), computed_kappa.radians(), 0, seed));
    let eyes = FanEyes::Monocular {
        eye: driver.forward_left_eye(),
        left_limit: FieldOfView::monocular_left_limit(),
    };
    let body = scene.with_rear_body();
    let fan = fan_trace_obstruction(&body, &eyes, rays, seed)?;
    checks.push(OracleReport::new(
        Metric::Lambda,
        fan.obstruction.degrees(),
        monocular_lambda(geom, driver)?.effective.degrees(),
        fan.rays_used,
        seed,
    ));
    let fan = fan_trace_obstruction(&body.with_bse(bse.deflection, DEFAULT_PATCH_LENGTH), &eyes, rays, seed)?;
    checks.push(OracleReport::new(
        Metric::LambdaBse,
        fan.obstruction.degrees(),
        monocular_lambda_bse(geom, driver, &bse)?.effective.degrees(),
        fan.rays_used,
        seed,
    ));
    let target = traced_first_crossing(&scene, driver)?;
    checks.push(OracleReport::new(
        Metric::Shift,
        bisect_shift(&scene, driver, Angle::ZERO, target)?,
        required_shift(geom, driver)?.shift,
        0,
        seed,
    ));
    checks.push(OracleReport::new(
        Metric::ShiftBse,
        bisect_shift(&scene, driver, bse.deflection, target)?,
        required_shift_bse(geom, driver, &bse)?.shift,
        0,
        seed,
    ));

    let mu = recon.inferred_mu.degrees();
    let mut discrepancies = vec![
        Discrepancy::new(
            "mu inferred from the 35 cm / 105 cm intercepts",
            "45.7 deg",
            format!("{} deg", fmt4(mu)),
            Status::from_ok((mu - 45.7).abs() <= 2.0),
            "tolerance 2 deg; sheet on the measured 10.3 deg line",
        ),
        Discrepancy::new(
            "|AB| along the sheet",
            "70 cm",
            format!("{} cm", fmt4(recon.ab_distance)),
            Status::from_ok((recon.ab_distance - 70.0).abs() < 1e-9),
            "",
        ),
        Discrepancy::new(
            "kappa (mirror sight line)",
            "10.3 deg",
            format!("{} deg", fmt4(computed_kappa.degrees())),
            Status::Flagged,
            "formula value from the stated Odyssey parameters; the published angle was measured",
        ),
        Discrepancy::new(
            "mu with the sheet on the computed kappa line",
            "45.7 deg",
            format!("{} deg", opt4(at_computed)),
            Status::Flagged,
            "alternative reconstruction, reported only",
        ),
    ];
    for c in &chain {
        discrepancies.push(Discrepancy::new(
            &format!("printed chain: {}", c.quantity),
            format!("{} / {} {}", c.printed, fmt4(c.alternate), c.unit),
            format!("{} {}", fmt4(c.recomputed), c.unit),
            Status::Flagged,
            "internally inconsistent intermediate value, reported side by side",
        ));
    }
    let notes = vec![
        format!(
            "sheet 0 cm mark fitted at ({}, {}) cm; only the 70 cm intercept difference is physically meaningful",
            fmt4(recon.sheet_reference.x),
            fmt4(recon.sheet_reference.y)
        ),
        "the deflection point is the pillar's forward edge; exact 2D intersection replaces the printed law-of-sines chain".into(),
        "seat height (71 cm) is metadata only".into(),
    ];
    let experiment = ExperimentSummary {
        sheet_angle_deg: setup.sheet_angle.degrees(),
        unaided_intercept_cm: setup.unaided_intercept,
        aided_intercept_cm: setup.aided_intercept,
        inferred_mu_deg: super::round4(mu),
        ab_distance_cm: super::round4(recon.ab_distance),
        deflection_point: point(recon.deflection_point),
        point_a: point(recon.point_a),
        point_b: point(recon.point_b),
        sheet_reference: point(recon.sheet_reference),
        computed_kappa_deg: super::round4(computed_kappa.degrees()),
        inferred_mu_at_computed_kappa_deg: at_computed,
        chain,
    };
    Ok(Reproduction {
        figure: FigureId::Experiment,
        sweep: None,
        experiment: Some(experiment),
        oracle_checks: checks,
        discrepancies,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(f: FigureId) -> Reproduction {
        reproduce(f, &VehicleGeometry::odyssey(), &DriverModel::odyssey(), 20_000, 0, None).unwrap()
    }

    fn row<'a>(r: &'a Reproduction, prefix: &str) -> &'a Discrepancy {
        r.discrepancies.iter().find(|d| d.quantity.starts_with(prefix)).unwrap()
    }

    #[test]
    fn figure_ids_parse() {
        for f in FigureId::ALL {
            assert_eq!(f.name().parse::<FigureId>().unwrap(), f);
        }
        assert!("fig21".parse::<FigureId>().is_err());
    }

    #[test]
    fn fig20_threshold_matches() {
        let r = run(FigureId::Fig20);
        assert_eq!(row(&r, "zero-impact").status, Status::Match);
        assert_eq!(r.oracle_checks.len(), 5);
        assert!(r.oracle_checks.iter().all(|c| c.abs_error < 0.1));
    }

    #[test]
    fn fig22_minimum_matches() {
        let r = run(FigureId::Fig22);
        assert_eq!(row(&r, "minimum assisted").status, Status::Match);
        assert_eq!(row(&r, "unassisted").status, Status::Match);
        assert!(r.oracle_checks.iter().all(|c| c.abs_error < 0.1));
    }

    #[test]
    fn fig25_hard_requirements() {
        let r = run(FigureId::Fig25);
        assert_eq!(row(&r, "pointwise").status, Status::Match);
        assert_eq!(row(&r, "reduction positive").status, Status::Match);
        assert!(r.oracle_checks.iter().all(|c| c.abs_error < 1e-6));
    }

    #[test]
    fn experiment_flags_and_matches() {
        let r = run(FigureId::Experiment);
        assert_eq!(row(&r, "mu inferred").status, Status::Match);
        assert_eq!(row(&r, "kappa").status, Status::Flagged);
        let chain: Vec<_> = r
            .discrepancies
            .iter()
            .filter(|d| d.quantity.starts_with("printed chain"))
            .collect();
        assert_eq!(chain.len(), 5);
        assert!(chain.iter().all(|d| d.status == Status::Flagged));
        let md = r.markdown_table();
        assert!(md.contains("| kappa (mirror sight line) | 10.3 deg | 13.5550 deg | flagged |"));
    }
}
