//! Single-scene analysis report and the CSV encodings of every output.
//!
//! Numbers in files carry 4 decimals. CSV is UTF-8 with LF line endings, a
//! mandatory header row and empty cells for absent values.

use serde::Serialize;

use crate::analysis::{round4, RowParams, SweepResult, VerifyReport};
use crate::config::SceneModel;
use crate::headmotion::{required_shift, required_shift_bse};
use crate::mirror::mirror_sightline;
use crate::obstruction::{binocular_alpha_at, monocular_lambda, monocular_lambda_bse, EyePositionCase};

/// Everything the closed forms say about one scene. Assisted fields are
/// present only when the scene carries a sheet.
#[allow(non_snake_case)]
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnalyzeReport {
    pub label: String,
    pub b_cm: f64,
    pub E0_cm: f64,
    pub d_cm: f64,
    pub tau0_deg: Option<f64>,
    pub kappa_deg: Option<f64>,
    pub mirror_anchor_x_cm: Option<f64>,
    pub mirror_anchor_y_cm: Option<f64>,
    pub lambda_geom_deg: Option<f64>,
    pub lambda_eff_deg: Option<f64>,
    pub lambda_clamped: Option<bool>,
    pub alpha_deg: Option<f64>,
    pub eye_case: Option<EyePositionCase>,
    pub x0_cm: Option<f64>,
    pub y0_cm: Option<f64>,
    pub E1_cm: Option<f64>,
    pub delta_e_cm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu_deg: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_bse_deg: Option<Option<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub E_b1_cm: Option<Option<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_e_bse_cm: Option<Option<f64>>,
    /// Quantities that are undefined for this scene, with the reason.
    pub errors: Vec<String>,
}

fn keep<T>(errors: &mut Vec<String>, what: &str, r: crate::Result<T>) -> Option<T> {
    r.map_err(|e| errors.push(format!("{what}: {e}"))).ok()
}

pub fn analyze(model: &SceneModel) -> AnalyzeReport {
    let (g, d) = (&model.geom, &model.driver);
    let mut errors = Vec::new();
    let mirror = keep(&mut errors, "mirror", mirror_sightline(g, d));
    let lambda = keep(&mut errors, "lambda", monocular_lambda(g, d));
    let e0 = d.turned_right_eye();
    let alpha = keep(&mut errors, "alpha", binocular_alpha_at(g, d, e0));
    let shift = keep(&mut errors, "shift", required_shift(g, d));
    let (mut lambda_bse, mut e_b1, mut delta_bse) = (None, None, None);
    if let Some(bse) = &model.bse {
        let l = keep(&mut errors, "lambda_bse", monocular_lambda_bse(g, d, bse));
        let s = keep(&mut errors, "shift_bse", required_shift_bse(g, d, bse));
        lambda_bse = Some(l.map(|r| round4(r.effective.degrees())));
        e_b1 = Some(s.map(|r| round4(r.final_eye)));
        delta_bse = Some(s.map(|r| round4(r.shift)));
    }
    AnalyzeReport {
        label: model.label.clone(),
        b_cm: round4(d.pupil_forward_offset()),
        E0_cm: round4(e0),
        d_cm: round4(d.eye_to_pillar(g)),
        tau0_deg: mirror.map(|m| round4(m.tau0.degrees())),
        kappa_deg: mirror.map(|m| round4(m.kappa.degrees())),
        mirror_anchor_x_cm: mirror.map(|m| round4(m.anchor().x)),
        mirror_anchor_y_cm: mirror.map(|m| round4(m.anchor().y)),
        lambda_geom_deg: lambda.map(|r| round4(r.geometric.degrees())),
        lambda_eff_deg: lambda.map(|r| round4(r.effective.degrees())),
        lambda_clamped: lambda.map(|r| r.clamped),
        alpha_deg: alpha.map(|r| round4(r.effective.degrees())),
        eye_case: alpha.and_then(|r| r.case),
        x0_cm: shift.map(|r| round4(r.crossing.x)),
        y0_cm: shift.map(|r| round4(r.crossing.y)),
        E1_cm: shift.map(|r| round4(r.final_eye)),
        delta_e_cm: shift.map(|r| round4(r.shift)),
        mu_deg: model.bse.map(|b| round4(b.deflection.degrees())),
        lambda_bse_deg: lambda_bse,
        E_b1_cm: e_b1,
        delta_e_bse_cm: delta_bse,
        errors,
    }
}

/// Fixed 4-decimal rendering; negative zero prints as zero.
pub fn num(x: f64) -> String {
    let s = format!("{x:.4}");
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// Quotes a cell only when it needs it.
fn field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn line(cells: &[String]) -> String {
    let mut s = cells.iter().map(|c| field(c)).collect::<Vec<_>>().join(",");
    s.push('\n');
    s
}

pub fn analyze_csv(r: &AnalyzeReport) -> String {
    let mut header: Vec<&str> = vec![
        "label", "b_cm", "E0_cm", "d_cm", "tau0_deg", "kappa_deg", "mirror_anchor_x_cm",
        "mirror_anchor_y_cm", "lambda_geom_deg", "lambda_eff_deg", "lambda_clamped", "alpha_deg",
        "eye_case", "x0_cm", "y0_cm", "E1_cm", "delta_e_cm",
    ];
    let mut row = vec![
        r.label.clone(),
        num(r.b_cm),
        num(r.E0_cm),
        num(r.d_cm),
        opt(r.tau0_deg),
        opt(r.kappa_deg),
        opt(r.mirror_anchor_x_cm),
        opt(r.mirror_anchor_y_cm),
        opt(r.lambda_geom_deg),
        opt(r.lambda_eff_deg),
        r.lambda_clamped.map(|b| b.to_string()).unwrap_or_default(),
        opt(r.alpha_deg),
        r.eye_case.map(|c| c.label().to_string()).unwrap_or_default(),
        opt(r.x0_cm),
        opt(r.y0_cm),
        opt(r.E1_cm),
        opt(r.delta_e_cm),
    ];
    if let Some(mu) = r.mu_deg {
        header.extend(["mu_deg", "lambda_bse_deg", "E_b1_cm", "delta_e_bse_cm"]);
        row.extend([
            num(mu),
            opt(r.lambda_bse_deg.flatten()),
            opt(r.E_b1_cm.flatten()),
            opt(r.delta_e_bse_cm.flatten()),
        ]);
    }
    let header: Vec<String> = header.into_iter().map(String::from).collect();
    line(&header) + &line(&row)
}

/// x, one column per value series, one case column per scenario (width
/// sweeps), then the echoed row parameters.
pub fn sweep_csv(r: &SweepResult) -> String {
    let with_cases = r.rows.first().is_some_and(|row| !row.cases.is_empty());
    let mut header = vec![r.x_label.to_string()];
    header.extend(r.columns.iter().map(|c| c.name.clone()));
    if with_cases {
        header.extend(r.scenarios.iter().map(|s| format!("case[{}]", s.label)));
    }
    header.extend(RowParams::HEADERS.iter().map(|h| h.to_string()));
    let mut out = line(&header);
    for row in &r.rows {
        let mut cells = vec![num(row.x)];
        cells.extend(row.values.iter().map(|v| opt(*v)));
        if with_cases {
            cells.extend(
                row.cases
                    .iter()
                    .map(|c| c.map(|c| c.label().to_string()).unwrap_or_default()),
            );
        }
        cells.extend(row.params.values().iter().map(|v| num(*v)));
        out.push_str(&line(&cells));
    }
    out
}

/// The reduction summary as its own small table.
pub fn summary_csv(r: &SweepResult) -> String {
    let mut out = line(&["baseline".into(), "assisted".into(), "mean_percent".into(), "points".into()]);
    for s in &r.summary {
        out.push_str(&line(&[
            s.baseline.clone(),
            s.assisted.clone(),
            s.mean_percent.map(|m| format!("{m}")).unwrap_or_default(),
            s.points.to_string(),
        ]));
    }
    out
}

pub fn verify_csv(r: &VerifyReport) -> String {
    let mut out = line(
        &["metric", "unit", "tolerance", "checked", "failures", "worst_error", "worst_scene"]
            .map(String::from),
    );
    for m in &r.metrics {
        out.push_str(&line(&[
            m.metric.name().to_string(),
            m.unit.to_string(),
            format!("{:e}", m.tolerance),
            m.checked.to_string(),
            m.failures.to_string(),
            format!("{:e}", m.worst_error),
            m.worst_scene.map(|s| s.to_string()).unwrap_or_default(),
        ]));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{sweep_width, SweepSpec};
    use crate::config::SceneConfig;

    #[test]
    fn odyssey_analysis() {
        let r = analyze(&SceneConfig::odyssey().to_model().unwrap());
        assert_eq!(r.lambda_eff_deg, Some(80.0));
        assert_eq!(r.lambda_bse_deg, Some(Some(34.3)));
        assert_eq!(r.kappa_deg, Some(13.555));
        assert!(r.errors.is_empty());
    }

    #[test]
    fn unassisted_report_omits_sheet_fields() {
        let mut c = SceneConfig::odyssey();
        c.mu_deg = None;
        let r = analyze(&c.to_model().unwrap());
        let json = serde_json::to_string(&r).unwrap();
        assert!(!json.contains("lambda_bse") && !json.contains("mu_deg"));
        assert!(!analyze_csv(&r).contains("lambda_bse"));
    }

    #[test]
    fn numbers_and_cells() {
        assert_eq!(num(-0.00001), "0.0000");
        assert_eq!(num(34.3), "34.3000");
        assert_eq!(num(-2.5), "-2.5000");
        assert_eq!(field("a,b"), "\"a,b\"");
    }

    #[test]
    fn sweep_csv_shape() {
        let model = SceneConfig::odyssey().to_model().unwrap();
        let r = sweep_width(&model.geom, &model.driver, &SweepSpec::width_default()).unwrap();
        let csv = sweep_csv(&r);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 37);
        assert!(lines[0].starts_with("W_cm,lambda_eff_deg[E0=-5],alpha_deg[E0=-5]"));
        assert!(lines[0].contains("case[E0=13.75]"));
        assert!(!csv.contains('\r'));
        let cols = lines[0].split(',').count();
        assert!(lines.iter().all(|l| l.split(',').count() == cols));
    }
}
