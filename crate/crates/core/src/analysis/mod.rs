//! Parameter sweeps, summary statistics, randomized verification and the
//! per-figure reproduction bundles.

mod parallel;
mod reproduce;
mod sweep;
mod verify;

pub use parallel::{par_map, threads_from_env, THREADS_ENV};
pub use reproduce::{
    reproduce, Discrepancy, ExperimentSummary, FigureId, Reproduction, Status, REPRODUCE_RAYS,
};
pub use sweep::{
    sweep, sweep_head, sweep_shift, sweep_width, width_threshold, Column, Quantity, Reduction,
    RowParams, Scenario, SweepResult, SweepRow, SweepSpec, DEFAULT_MU_LIST, DEFAULT_WIDTH_LOCATIONS,
};
pub use verify::{verify, verify_scene, MetricSummary, Tolerances, VerifyReport};

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{invalid, Result};

/// The swept quantity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    /// W, with the head at fixed turned-head eye locations.
    PillarWidth,
    /// H0, forward-facing obstruction with and without the sheet.
    HeadPosition,
    /// H0, required head movement per deflection angle.
    HeadPositionShift,
}

impl SweepVariable {
    pub fn name(self) -> &'static str {
        match self {
            SweepVariable::PillarWidth => "pillar_width",
            SweepVariable::HeadPosition => "head_position",
            SweepVariable::HeadPositionShift => "head_position_shift",
        }
    }

    /// Header of the x column.
    pub fn axis_label(self) -> &'static str {
        match self {
            SweepVariable::PillarWidth => "W_cm",
            SweepVariable::HeadPosition | SweepVariable::HeadPositionShift => "H0_cm",
        }
    }

    pub fn default_range(self) -> SweepRange {
        match self {
            SweepVariable::PillarWidth => SweepRange::new(5.0, 40.0, 1.0),
            SweepVariable::HeadPosition | SweepVariable::HeadPositionShift => {
                SweepRange::new(0.0, 12.0, 0.5)
            }
        }
        .expect("valid default grid")
    }
}

/// Inclusive grid start, start + step, ... up to stop.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SweepRange {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl SweepRange {
    pub fn new(start: f64, stop: f64, step: f64) -> Result<Self> {
        if !start.is_finite() || !stop.is_finite() {
            return Err(invalid("range", if start.is_finite() { stop } else { start }, "must be finite"));
        }
        if !(step > 0.0) || !step.is_finite() {
            return Err(invalid("range step", step, "must be positive"));
        }
        if !(start < stop) {
            return Err(invalid("range start", start, "must be below stop"));
        }
        Ok(SweepRange { start, stop, step })
    }

    /// floor((stop - start)/step) + 1, with a little slack so decimal steps
    /// such as 0.1 do not lose their last point.
    pub fn len(&self) -> usize {
        ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.len())
            .map(|i| self.start + i as f64 * self.step)
            .collect()
    }
}

impl FromStr for SweepRange {
    type Err = String;

    /// Parses `START:STOP:STEP`.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("range '{s}' is not START:STOP:STEP"));
        }
        let mut nums = [0.0; 3];
        for (slot, p) in nums.iter_mut().zip(&parts) {
            *slot = p
                .trim()
                .parse()
                .map_err(|_| format!("range '{s}': '{p}' is not a number"))?;
        }
        SweepRange::new(nums[0], nums[1], nums[2]).map_err(|e| format!("range '{s}': {e}"))
    }
}

impl fmt::Display for SweepRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.stop, self.step)
    }
}

/// Rounds to the 4 decimals used in every emitted file, so in-memory results
/// and their serialized form carry identical numbers.
pub fn round4(x: f64) -> f64 {
    format!("{x:.4}").parse().unwrap_or(x)
}
