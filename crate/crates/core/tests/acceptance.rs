//! One PASS/FAIL line per acceptance criterion. Runs without the libtest
//! harness so the lines always print; exits non-zero if a criterion fails.

use pillar_sight::analysis::{
    reproduce, sweep, verify, width_threshold, FigureId, Status, SweepResult, SweepSpec, Tolerances,
    DEFAULT_WIDTH_LOCATIONS,
};
use pillar_sight::headmotion::{required_shift, required_shift_bse};
use pillar_sight::obstruction::{binocular_alpha, monocular_lambda, monocular_lambda_bse};
use pillar_sight::oracle::{random_scene, reconstruct_experiment, ExperimentSetup};
use pillar_sight::scene::{pupil_offset, BseConfig, DriverModel, VehicleGeometry};

const SEED: u64 = 0;
const VERIFY_RAYS: usize = 20_000;
const REPRODUCE_RAYS: usize = 20_000;

struct Outcome {
    hard: bool,
    detail: String,
}

fn pass(detail: impl Into<String>) -> Outcome {
    Outcome { hard: true, detail: detail.into() }
}

fn fail(detail: impl Into<String>) -> Outcome {
    Outcome { hard: false, detail: detail.into() }
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        pass(detail)
    } else {
        fail(detail)
    }
}

fn odyssey() -> (VehicleGeometry, DriverModel) {
    (VehicleGeometry::odyssey(), DriverModel::odyssey())
}

fn criterion_1() -> Outcome {
    match pupil_offset(19.0, 6.7) {
        Ok(b) => check((b - 18.70).abs() <= 0.01, format!("b = {b:.4} cm")),
        Err(e) => fail(e.to_string()),
    }
}

fn criterion_2() -> Outcome {
    let (g, d) = odyssey();
    match monocular_lambda(&g, &d) {
        Ok(r) => {
            let eff = r.effective.degrees();
            let geo = r.geometric.degrees();
            check(
                (eff - 80.0).abs() <= 0.1 && (geo - 79.97).abs() <= 0.05,
                format!("lambda_eff = {eff:.4} deg, lambda_geom = {geo:.4} deg"),
            )
        }
        Err(e) => fail(e.to_string()),
    }
}

fn criterion_3() -> Outcome {
    let (g, d) = odyssey();
    let single = BseConfig::from_degrees(45.7).and_then(|b| monocular_lambda_bse(&g, &d, &b));
    let spec = SweepSpec::head_default(45.7).expect("valid mu");
    let (single, grid) = match (single, sweep(&g, &d, &spec)) {
        (Ok(s), Ok(r)) => (s.effective.degrees(), r),
        (Err(e), _) | (_, Err(e)) => return fail(e.to_string()),
    };
    let col = grid.column("lambda_deg[mu=45.7]").expect("assisted column");
    let tail: Vec<Option<f64>> = grid
        .rows
        .iter()
        .filter(|r| r.x >= 6.0)
        .map(|r| r.values[col])
        .collect();
    let all_min = !tail.is_empty() && tail.iter().all(|v| v.is_some_and(|v| (v - single).abs() < 1e-9));
    check(
        (single - 34.3).abs() <= 0.5 && all_min,
        format!(
            "lambda_bse = {single:.4} deg; equal at all {} grid points with H0 >= 6: {all_min}",
            tail.len()
        ),
    )
}

fn criterion_4() -> Outcome {
    let (g, d) = odyssey();
    match width_threshold(&g, &d, &DEFAULT_WIDTH_LOCATIONS, 1.0) {
        Ok(w) => check(w > 6.0 && w < 8.0, format!("threshold W = {w:.4} cm")),
        Err(e) => fail(e.to_string()),
    }
}

fn criterion_5() -> Outcome {
    match reconstruct_experiment(&ExperimentSetup::odyssey()) {
        Ok(r) => {
            let mu = r.inferred_mu.degrees();
            check(
                (mu - 45.7).abs() <= 2.0 && (r.ab_distance - 70.0).abs() < 1e-9,
                format!("mu = {mu:.4} deg, |AB| = {:.6} cm", r.ab_distance),
            )
        }
        Err(e) => fail(e.to_string()),
    }
}

fn criterion_6() -> Outcome {
    match verify(1000, VERIFY_RAYS, SEED, &Tolerances::default(), None) {
        Ok(r) => {
            let worst: Vec<String> = r
                .metrics
                .iter()
                .map(|m| format!("{} {:.3e} {}", m.metric.name(), m.worst_error, m.unit))
                .collect();
            check(
                r.passed && r.scene_errors.is_empty() && r.metrics.iter().all(|m| m.checked == 1000),
                format!("1000 scenes, {VERIFY_RAYS} rays; worst: {}", worst.join(", ")),
            )
        }
        Err(e) => fail(e.to_string()),
    }
}

fn criterion_7() -> Outcome {
    let mut problems = Vec::new();

    for i in 0..1000 {
        let s = random_scene(SEED, i);
        let zero = BseConfig::from_degrees(0.0).unwrap();
        match (required_shift(&s.geom, &s.driver), required_shift_bse(&s.geom, &s.driver, &zero)) {
            (Ok(a), Ok(b)) if a.shift == b.shift && a.final_eye == b.final_eye => {}
            _ => problems.push(format!("shift_bse(0) != shift on scene {i}")),
        }
        let base = monocular_lambda_bse(&s.geom, &s.driver, &zero).map(|r| r.geometric.degrees());
        let with = monocular_lambda_bse(&s.geom, &s.driver, &s.bse).map(|r| r.geometric.degrees());
        match (base, with) {
            (Ok(b), Ok(w)) if (b - s.bse.deflection.degrees() - w).abs() < 1e-9 => {}
            _ => problems.push(format!("lambda_bse not linear in mu on scene {i}")),
        }
    }

    for i in 0..200 {
        let s = random_scene(SEED, i);
        let top = s.bse.deflection.degrees();
        let shifts: Vec<f64> = (0..10)
            .filter_map(|k| {
                let b = BseConfig::from_degrees(top * k as f64 / 9.0).ok()?;
                required_shift_bse(&s.geom, &s.driver, &b).ok().map(|r| r.shift)
            })
            .collect();
        if shifts.len() != 10 {
            problems.push(format!("shift_bse undefined for some mu on scene {i}"));
        } else if shifts.windows(2).any(|p| p[1] > p[0] + 1e-12) {
            problems.push(format!("shift_bse increases with mu on scene {i}"));
        }
    }

    for i in 0..1000 {
        let s = random_scene(SEED, i);
        let d = s.driver.eye_to_pillar(&s.geom);
        let f = s.driver.interpupillary;
        let w = s.geom.pillar_width;
        let a = binocular_alpha(s.eye, w, d, f).map(|r| r.geometric.degrees());
        let b = binocular_alpha(s.eye, w + 0.5, d, f).map(|r| r.geometric.degrees());
        match (a, b) {
            (Ok(a), Ok(b)) if b > a => {}
            _ => problems.push(format!("alpha not increasing in W on scene {i}")),
        }
    }

    check(
        problems.is_empty(),
        if problems.is_empty() {
            "shift_bse(0) = shift and linearity on 1000 scenes; monotone in mu on 200 x 10; alpha increasing in W on 1000".into()
        } else {
            format!("{} violations, first: {}", problems.len(), problems[0])
        },
    )
}

fn pointwise(sweep: &SweepResult) -> (bool, bool) {
    let idx = |name: &str| sweep.column(name).expect("column");
    let base = idx("delta_e_cm[mu=0]");
    let mid = idx("delta_e_cm[mu=30]");
    let top = idx("delta_e_cm[mu=45.7]");
    let mut ordered = true;
    let mut positive = true;
    for r in &sweep.rows {
        match (r.values[base], r.values[mid], r.values[top]) {
            (Some(b), Some(m), Some(t)) => {
                ordered &= t <= m && m <= b;
                positive &= b > m && b > t;
            }
            _ => {
                ordered = false;
                positive = false;
            }
        }
    }
    (ordered, positive)
}

/// Hard part: pointwise ordering and positive reductions. Soft part: the
/// published averages, reported only.
fn criterion_8() -> (Outcome, String) {
    let (g, d) = odyssey();
    let fig22 = reproduce(FigureId::Fig22, &g, &d, REPRODUCE_RAYS, SEED, None);
    let fig25 = reproduce(FigureId::Fig25, &g, &d, REPRODUCE_RAYS, SEED, None);
    let (fig22, fig25) = match (fig22, fig25) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return (fail(e.to_string()), String::new()),
    };
    let s25 = fig25.sweep.as_ref().expect("fig25 sweep");
    let (ordered, positive) = pointwise(s25);
    let avg22 = fig22.sweep.as_ref().and_then(|s| s.summary.first()).and_then(|r| r.mean_percent);
    let avg25: Vec<String> = s25
        .summary
        .iter()
        .map(|r| format!("{} {:.2} %", r.assisted, r.mean_percent.unwrap_or(f64::NAN)))
        .collect();
    let soft_ok = avg22.is_some_and(|a| (a - 41.37).abs() <= 5.0);
    let soft = format!(
        "[SOFT {}] fig22 average reduction {:.2} % vs 41.37 % (+/-5); fig25 {} vs 58.11 % / 79.85 % (grid-dependent)",
        if soft_ok { "PASS" } else { "FAIL" },
        avg22.unwrap_or(f64::NAN),
        avg25.join(", "),
    );
    (
        check(
            ordered && positive,
            format!("pointwise ordering holds: {ordered}; reductions positive at every point: {positive}"),
        ),
        soft,
    )
}

fn criterion_9() -> Outcome {
    let (g, d) = odyssey();
    let r = match reproduce(FigureId::Experiment, &g, &d, REPRODUCE_RAYS, SEED, None) {
        Ok(r) => r,
        Err(e) => return fail(e.to_string()),
    };
    let kappa_flagged = r
        .discrepancies
        .iter()
        .any(|x| x.quantity.starts_with("kappa") && x.status == Status::Flagged);
    let chain = r
        .discrepancies
        .iter()
        .filter(|x| x.quantity.starts_with("printed chain") && x.status == Status::Flagged)
        .count();
    let table = r.markdown_table();
    let labelled = table.matches("| flagged |").count() >= 6;

    let dir = tempfile::tempdir().expect("tempdir");
    let out = dir.path().join("experiment");
    let args = ["pillar-sight", "reproduce", "experiment", "--rays", "20000", "--out", out.to_str().unwrap()];
    let (mut so, mut se) = (Vec::new(), Vec::new());
    let code = pillar_sight::cli::run(args, &mut so, &mut se);
    check(
        kappa_flagged && chain == 5 && labelled && code == 0,
        format!("kappa flagged: {kappa_flagged}; chain rows flagged: {chain}/5; reproduce exit code {code}"),
    )
}

fn cli(args: &[&str]) -> (i32, Vec<u8>) {
    let mut argv = vec!["pillar-sight"];
    argv.extend_from_slice(args);
    let (mut so, mut se) = (Vec::new(), Vec::new());
    let code = pillar_sight::cli::run(argv, &mut so, &mut se);
    (code, so)
}

fn criterion_10() -> Outcome {
    let (g, d) = odyssey();
    let mut same = true;

    let v = ["verify", "--trials", "100", "--rays", "5000", "--seed", "7"];
    let (c1, a) = cli(&v);
    let (c2, b) = cli(&v);
    same &= c1 == 0 && c2 == 0 && a == b;
    let tol = Tolerances::default();
    let one = serde_json::to_string(&verify(100, 5000, 7, &tol, Some(1)).unwrap()).unwrap();
    let four = serde_json::to_string(&verify(100, 5000, 7, &tol, Some(4)).unwrap()).unwrap();
    same &= one == four;

    for kind in ["width", "head", "shift"] {
        let (c1, a) = cli(&["sweep", kind]);
        let (c2, b) = cli(&["sweep", kind]);
        same &= c1 == 0 && c2 == 0 && a == b;
    }
    let specs = [
        SweepSpec::width_default(),
        SweepSpec::head_default(45.7).unwrap(),
        SweepSpec::shift_default(&[0.0, 30.0, 45.7]).unwrap(),
    ];
    for spec in specs {
        let a = serde_json::to_string(&sweep(&g, &d, &spec.clone().with_threads(Some(1))).unwrap()).unwrap();
        let b = serde_json::to_string(&sweep(&g, &d, &spec.with_threads(Some(3))).unwrap()).unwrap();
        same &= a == b;
    }
    check(same, format!("verify and 3 sweeps byte-identical across runs and 1 vs 3/4 threads: {same}"))
}

fn main() {
    let (c8, soft) = criterion_8();
    let results = [
        (1, "pupil offset", criterion_1()),
        (2, "monocular floor", criterion_2()),
        (3, "sheet minimum", criterion_3()),
        (4, "width threshold", criterion_4()),
        (5, "experiment reconstruction", criterion_5()),
        (6, "oracle equivalence", criterion_6()),
        (7, "consistency and monotonicity", criterion_7()),
        (8, "published averages (hard part)", c8),
        (9, "flagged non-reproducibles", criterion_9()),
        (10, "determinism", criterion_10()),
    ];
    let mut failed = Vec::new();
    for (n, name, o) in &results {
        println!("criterion {n:>2} [{}] {name}: {}", if o.hard { "PASS" } else { "FAIL" }, o.detail);
        if *n == 8 {
            println!("criterion  8 {soft}");
        }
        if !o.hard {
            failed.push(*n);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 10 criteria passed");
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
