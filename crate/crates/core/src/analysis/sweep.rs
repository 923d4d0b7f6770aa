use serde::Serialize;

use super::{par_map, round4, SweepRange, SweepVariable};
use crate::error::{invalid, GeometryError, Result};
use crate::headmotion::required_shift_bse;
use crate::obstruction::{
    binocular_alpha, binocular_alpha_at, monocular_lambda, monocular_lambda_bse, EyePositionCase,
};
use crate::scene::{BseConfig, DriverModel, VehicleGeometry};

/// Turned-head right-eye positions for the width sweep, cm: behind, within and
/// ahead of a pillar of typical width.
pub const DEFAULT_WIDTH_LOCATIONS: [f64; 3] = [-5.0, 13.75, 30.0];

/// Deflection angles for the head-movement sweep, degrees.
pub const DEFAULT_MU_LIST: [f64; 3] = [0.0, 30.0, 45.7];

/// One configuration evaluated at every grid point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Scenario {
    pub label: String,
    /// Overrides E0 (and so H0) for the width sweep.
    #[serde(rename = "E0_cm", skip_serializing_if = "Option::is_none")]
    pub turned_right_eye: Option<f64>,
    #[serde(rename = "mu_deg", skip_serializing_if = "Option::is_none", serialize_with = "mu_deg")]
    pub bse: Option<BseConfig>,
}

fn mu_deg<S: serde::Serializer>(bse: &Option<BseConfig>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match bse {
        Some(b) => s.serialize_f64(b.deflection.degrees()),
        None => s.serialize_none(),
    }
}

impl Scenario {
    pub fn at_eye(e0: f64) -> Self {
        Scenario {
            label: format!("E0={e0}"),
            turned_right_eye: Some(e0),
            bse: None,
        }
    }

    pub fn unassisted() -> Self {
        Scenario {
            label: "unassisted".into(),
            turned_right_eye: None,
            bse: None,
        }
    }

    pub fn with_mu(mu_deg: f64) -> Result<Self> {
        Ok(Scenario {
            label: format!("mu={mu_deg}"),
            turned_right_eye: None,
            bse: Some(BseConfig::from_degrees(mu_deg)?),
        })
    }

    fn mu_is_zero(&self) -> bool {
        self.bse.is_none_or(|b| b.deflection.radians() == 0.0)
    }
}

/// What a sweep is run over.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub range: SweepRange,
    pub scenarios: Vec<Scenario>,
    /// Worker cap; never affects the result.
    pub threads: Option<usize>,
}

impl SweepSpec {
    pub fn new(variable: SweepVariable, range: SweepRange, scenarios: Vec<Scenario>) -> Result<Self> {
        if scenarios.is_empty() {
            return Err(invalid("scenarios", 0.0, "need at least one"));
        }
        Ok(SweepSpec {
            variable,
            range,
            scenarios,
            threads: None,
        })
    }

    pub fn width_default() -> Self {
        let scenarios = DEFAULT_WIDTH_LOCATIONS.iter().map(|&e| Scenario::at_eye(e)).collect();
        SweepSpec::new(SweepVariable::PillarWidth, SweepVariable::PillarWidth.default_range(), scenarios)
            .expect("non-empty")
    }

    /// Unassisted against one sheet of `mu_deg`.
    pub fn head_default(mu_deg: f64) -> Result<Self> {
        SweepSpec::new(
            SweepVariable::HeadPosition,
            SweepVariable::HeadPosition.default_range(),
            vec![Scenario::unassisted(), Scenario::with_mu(mu_deg)?],
        )
    }

    pub fn shift_default(mu_list: &[f64]) -> Result<Self> {
        let scenarios = mu_list.iter().map(|&m| Scenario::with_mu(m)).collect::<Result<_>>()?;
        SweepSpec::new(
            SweepVariable::HeadPositionShift,
            SweepVariable::HeadPositionShift.default_range(),
            scenarios,
        )
    }

    pub fn with_range(mut self, range: SweepRange) -> Self {
        self.range = range;
        self
    }

    pub fn with_threads(mut self, threads: Option<usize>) -> Self {
        self.threads = threads;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    LambdaEff,
    Lambda,
    Alpha,
    Shift,
}

impl Quantity {
    pub fn name(self) -> &'static str {
        match self {
            Quantity::LambdaEff => "lambda_eff_deg",
            Quantity::Lambda => "lambda_deg",
            Quantity::Alpha => "alpha_deg",
            Quantity::Shift => "delta_e_cm",
        }
    }

    pub fn unit(self) -> &'static str {
        match self {
            Quantity::Shift => "cm",
            _ => "deg",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Column {
    pub name: String,
    pub scenario: usize,
    pub quantity: Quantity,
    pub unit: &'static str,
    /// Drawn in the plot.
    pub plotted: bool,
}

/// Inputs of one grid point, echoed with the row.
#[allow(non_snake_case)]
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RowParams {
    pub W_cm: f64,
    pub h_cm: f64,
    pub l_cm: f64,
    pub p_cm: f64,
    pub m_cm: f64,
    pub theta_deg: f64,
    pub H0_cm: f64,
    pub f_cm: f64,
    pub g_cm: f64,
    pub d_cm: f64,
}

impl RowParams {
    pub const HEADERS: [&'static str; 10] = [
        "W_cm", "h_cm", "l_cm", "p_cm", "m_cm", "theta_deg", "H0_cm", "f_cm", "g_cm", "d_cm",
    ];

    pub fn new(geom: &VehicleGeometry, driver: &DriverModel) -> Self {
        RowParams {
            W_cm: geom.pillar_width,
            h_cm: geom.pillar_offset,
            l_cm: geom.mirror_base_x,
            p_cm: geom.mirror_base_y,
            m_cm: geom.mirror_length,
            theta_deg: geom.mirror_angle.degrees(),
            H0_cm: driver.head_position,
            f_cm: driver.interpupillary,
            g_cm: driver.head_to_pupil,
            d_cm: driver.eye_to_pillar(geom),
        }
    }

    pub fn values(&self) -> [f64; 10] {
        [
            self.W_cm,
            self.h_cm,
            self.l_cm,
            self.p_cm,
            self.m_cm,
            self.theta_deg,
            self.H0_cm,
            self.f_cm,
            self.g_cm,
            self.d_cm,
        ]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub x: f64,
    /// One entry per column; `None` where the model is undefined.
    pub values: Vec<Option<f64>>,
    /// Eye/pillar case per scenario, width sweeps only.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub cases: Vec<Option<EyePositionCase>>,
    pub params: RowParams,
}

/// Mean pointwise reduction of one column against a baseline column, percent.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Reduction {
    pub baseline: String,
    pub assisted: String,
    /// `None` when no row has both values.
    pub mean_percent: Option<f64>,
    pub points: usize,
}

impl Reduction {
    /// Mean over rows with both values present and a non-zero baseline of
    /// 100·(baseline - assisted)/baseline.
    pub fn from_rows(rows: &[SweepRow], columns: &[Column], baseline: usize, assisted: usize) -> Self {
        let mut sum = 0.0;
        let mut points = 0;
        for row in rows {
            if let (Some(b), Some(a)) = (row.values[baseline], row.values[assisted]) {
                if b != 0.0 {
                    sum += 100.0 * (b - a) / b;
                    points += 1;
                }
            }
        }
        Reduction {
            baseline: columns[baseline].name.clone(),
            assisted: columns[assisted].name.clone(),
            mean_percent: (points > 0).then(|| sum / points as f64),
            points,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepResult {
    pub variable: SweepVariable,
    pub x_label: &'static str,
    pub range: SweepRange,
    pub scenarios: Vec<Scenario>,
    pub columns: Vec<Column>,
    pub rows: Vec<SweepRow>,
    pub summary: Vec<Reduction>,
}

impl SweepResult {
    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    /// Values of one column, in row order.
    pub fn series(&self, column: usize) -> Vec<Option<f64>> {
        self.rows.iter().map(|r| r.values[column]).collect()
    }
}

pub fn sweep(geom: &VehicleGeometry, driver: &DriverModel, spec: &SweepSpec) -> Result<SweepResult> {
    match spec.variable {
        SweepVariable::PillarWidth => sweep_width(geom, driver, spec),
        SweepVariable::HeadPosition => sweep_head(geom, driver, spec),
        SweepVariable::HeadPositionShift => sweep_shift(geom, driver, spec),
    }
}

fn defined<T>(r: Result<T>, what: &str, x: f64) -> Option<T> {
    match r {
        Ok(v) => Some(v),
        Err(e) => {
            log::debug!("{what} undefined at x = {x}: {e}");
            None
        }
    }
}

fn column(scenario: usize, label: &str, quantity: Quantity, plotted: bool) -> Column {
    Column {
        name: format!("{}[{label}]", quantity.name()),
        scenario,
        quantity,
        unit: quantity.unit(),
        plotted,
    }
}

/// Effective monocular λ and binocular α against W at each scenario's eye
/// location. Only α is plotted.
pub fn sweep_width(geom: &VehicleGeometry, driver: &DriverModel, spec: &SweepSpec) -> Result<SweepResult> {
    let mut columns = Vec::new();
    let mut drivers = Vec::new();
    for (i, s) in spec.scenarios.iter().enumerate() {
        let e0 = s.turned_right_eye.unwrap_or_else(|| driver.turned_right_eye());
        drivers.push((e0, driver.with_turned_right_eye(e0)?));
        columns.push(column(i, &s.label, Quantity::LambdaEff, false));
        columns.push(column(i, &s.label, Quantity::Alpha, true));
    }
    let xs = spec.range.values();
    let rows = par_map(&xs, spec.threads, |&w| {
        let g = geom.with_pillar_width(w);
        let mut values = Vec::with_capacity(columns.len());
        let mut cases = Vec::with_capacity(drivers.len());
        for (e0, d) in &drivers {
            let (lambda, alpha) = match &g {
                Ok(g) => (
                    defined(monocular_lambda(g, d), "lambda", w),
                    defined(binocular_alpha_at(g, d, *e0), "alpha", w),
                ),
                Err(_) => (None, None),
            };
            values.push(lambda.map(|r| round4(r.effective.degrees())));
            values.push(alpha.map(|r| round4(r.effective.degrees())));
            cases.push(alpha.and_then(|r| r.case));
        }
        SweepRow {
            x: w,
            values,
            cases,
            params: RowParams::new(g.as_ref().unwrap_or(geom), driver),
        }
    });
    Ok(SweepResult {
        variable: SweepVariable::PillarWidth,
        x_label: SweepVariable::PillarWidth.axis_label(),
        range: spec.range,
        scenarios: spec.scenarios.clone(),
        columns,
        rows,
        summary: Vec::new(),
    })
}

/// Forward-facing λ against H0: the unassisted effective angle for scenarios
/// without a sheet, λ_bse otherwise. Summary: each assisted column against the
/// first unassisted one.
pub fn sweep_head(geom: &VehicleGeometry, driver: &DriverModel, spec: &SweepSpec) -> Result<SweepResult> {
    let columns: Vec<Column> = spec
        .scenarios
        .iter()
        .enumerate()
        .map(|(i, s)| column(i, &s.label, Quantity::Lambda, true))
        .collect();
    let xs = spec.range.values();
    let rows = par_map(&xs, spec.threads, |&h0| {
        let d = driver.with_head_position(h0);
        let values = spec
            .scenarios
            .iter()
            .map(|s| {
                let d = d.as_ref().ok()?;
                let r = match &s.bse {
                    None => monocular_lambda(geom, d),
                    Some(b) => monocular_lambda_bse(geom, d, b),
                };
                defined(r, "lambda", h0).map(|r| round4(r.effective.degrees()))
            })
            .collect();
        SweepRow {
            x: h0,
            values,
            cases: Vec::new(),
            params: RowParams::new(geom, d.as_ref().unwrap_or(driver)),
        }
    });
    let baseline = spec.scenarios.iter().position(|s| s.bse.is_none());
    let summary = summarize(&rows, &columns, baseline, |i| spec.scenarios[i].bse.is_some());
    Ok(SweepResult {
        variable: SweepVariable::HeadPosition,
        x_label: SweepVariable::HeadPosition.axis_label(),
        range: spec.range,
        scenarios: spec.scenarios.clone(),
        columns,
        rows,
        summary,
    })
}

/// Required head movement against H0 for each scenario's deflection.
/// Summary: each column against the first zero-deflection one.
pub fn sweep_shift(geom: &VehicleGeometry, driver: &DriverModel, spec: &SweepSpec) -> Result<SweepResult> {
    let columns: Vec<Column> = spec
        .scenarios
        .iter()
        .enumerate()
        .map(|(i, s)| column(i, &s.label, Quantity::Shift, true))
        .collect();
    let plain = BseConfig::from_degrees(0.0)?;
    let xs = spec.range.values();
    let rows = par_map(&xs, spec.threads, |&h0| {
        let d = driver.with_head_position(h0);
        let values = spec
            .scenarios
            .iter()
            .map(|s| {
                let d = d.as_ref().ok()?;
                let bse = s.bse.unwrap_or(plain);
                defined(required_shift_bse(geom, d, &bse), "shift", h0).map(|r| round4(r.shift))
            })
            .collect();
        SweepRow {
            x: h0,
            values,
            cases: Vec::new(),
            params: RowParams::new(geom, d.as_ref().unwrap_or(driver)),
        }
    });
    let baseline = spec.scenarios.iter().position(Scenario::mu_is_zero);
    let summary = summarize(&rows, &columns, baseline, |i| Some(i) != baseline);
    Ok(SweepResult {
        variable: SweepVariable::HeadPositionShift,
        x_label: SweepVariable::HeadPositionShift.axis_label(),
        range: spec.range,
        scenarios: spec.scenarios.clone(),
        columns,
        rows,
        summary,
    })
}

fn summarize(
    rows: &[SweepRow],
    columns: &[Column],
    baseline: Option<usize>,
    compared: impl Fn(usize) -> bool,
) -> Vec<Reduction> {
    let Some(b) = baseline else {
        return Vec::new();
    };
    (0..columns.len())
        .filter(|&i| compared(i))
        .map(|i| Reduction::from_rows(rows, columns, b, i))
        .collect()
}

/// Smallest pillar width at which the binocular angle exceeds
/// `threshold_deg` at every one of the given eye locations.
pub fn width_threshold(
    geom: &VehicleGeometry,
    driver: &DriverModel,
    locations: &[f64],
    threshold_deg: f64,
) -> Result<f64> {
    let d = driver.eye_to_pillar(geom);
    let f = driver.interpupillary;
    let mut widest: f64 = 0.0;
    for &e in locations {
        let alpha = |w: f64| binocular_alpha(e, w, d, f).map(|r| r.effective.degrees());
        let mut lo = 1e-9;
        if alpha(lo)? > threshold_deg {
            widest = widest.max(lo);
            continue;
        }
        let mut hi = 1.0;
        while alpha(hi)? <= threshold_deg {
            hi *= 2.0;
            if hi > 1e6 {
                return Err(GeometryError::NoBracket { lo, hi });
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if alpha(mid)? > threshold_deg {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo < 1e-12 {
                break;
            }
        }
        widest = widest.max(hi);
    }
    Ok(widest)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn odyssey() -> (VehicleGeometry, DriverModel) {
        (VehicleGeometry::odyssey(), DriverModel::odyssey())
    }

    #[test]
    fn width_sweep_shape_and_monotone_alpha() {
        let (g, d) = odyssey();
        let r = sweep_width(&g, &d, &SweepSpec::width_default()).unwrap();
        assert_eq!(r.rows.len(), 36);
        assert_eq!(r.columns.len(), 6);
        for c in r.columns.iter().filter(|c| c.quantity == Quantity::Alpha) {
            let s: Vec<f64> = r.series(r.columns.iter().position(|x| x == c).unwrap())
                .into_iter()
                .map(Option::unwrap)
                .collect();
            assert!(s.windows(2).all(|p| p[0] <= p[1]), "{}", c.name);
        }
        assert_eq!(r.rows[0].params.W_cm, 5.0);
    }

    #[test]
    fn straddling_eyes_see_round_a_pillar_as_wide_as_their_spacing() {
        let (g, d) = odyssey();
        let spec = SweepSpec::new(
            SweepVariable::PillarWidth,
            SweepRange::new(6.7, 7.7, 1.0).unwrap(),
            vec![Scenario::at_eye(6.7)],
        )
        .unwrap();
        let r = sweep_width(&g, &d, &spec).unwrap();
        assert_eq!(r.rows[0].values[1], Some(0.0));
    }

    #[test]
    fn head_sweep_clamps_and_bse_minimum() {
        let (g, d) = odyssey();
        let r = sweep_head(&g, &d, &SweepSpec::head_default(45.7).unwrap()).unwrap();
        for row in r.rows.iter().filter(|row| row.x >= 6.0) {
            assert_eq!(row.values[0], Some(80.0));
            assert_eq!(row.values[1], Some(34.3));
        }
        assert_eq!(r.summary.len(), 1);
        let zero = sweep_head(&g, &d, &SweepSpec::head_default(0.0).unwrap()).unwrap();
        assert_eq!(zero.summary[0].mean_percent, Some(0.0));
    }

    #[test]
    fn shift_sweep_ordering() {
        let (g, d) = odyssey();
        let r = sweep_shift(&g, &d, &SweepSpec::shift_default(&DEFAULT_MU_LIST).unwrap()).unwrap();
        for row in &r.rows {
            let v: Vec<f64> = row.values.iter().map(|v| v.unwrap()).collect();
            assert!(v[2] <= v[1] && v[1] <= v[0], "{row:?}");
        }
        assert_eq!(r.summary.len(), 2);
        let base = sweep_shift(&g, &d, &SweepSpec::shift_default(&[0.0]).unwrap()).unwrap();
        assert!(base.summary.is_empty());
    }

    #[test]
    fn threshold_lies_between_six_and_eight() {
        let (g, d) = odyssey();
        let w = width_threshold(&g, &d, &DEFAULT_WIDTH_LOCATIONS, 1.0).unwrap();
        assert!(w > 6.0 && w < 8.0, "{w}");
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let (g, d) = odyssey();
        let spec = SweepSpec::shift_default(&DEFAULT_MU_LIST).unwrap();
        let a = sweep_shift(&g, &d, &spec.clone().with_threads(Some(1))).unwrap();
        let b = sweep_shift(&g, &d, &spec.with_threads(Some(4))).unwrap();
        assert_eq!(a, b);
    }
}
