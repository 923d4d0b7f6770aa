//! C ABI over the closed-form engine.
//!
//! Every entry point returns a [`PsStatus`] and writes its result through an
//! out-pointer. On failure, [`ps_last_error_message`] describes the most
//! recent error on the calling thread. Scenes are opaque handles created by
//! [`ps_scene_new`] or [`ps_scene_from_json`] and released by
//! [`ps_scene_free`]. Strings returned by the library are released with
//! [`ps_string_free`].

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use libc::c_char;
use pillar_sight::config::{SceneConfig, SceneModel};
use pillar_sight::headmotion::{required_shift, required_shift_bse};
use pillar_sight::mirror::{kappa, tau0};
use pillar_sight::obstruction::{binocular_alpha_at, monocular_lambda, monocular_lambda_bse};
use pillar_sight::oracle::{reconstruct_experiment, ExperimentSetup};
use pillar_sight::report::analyze;
use pillar_sight::scene::{pupil_offset, BseConfig};
use pillar_sight::GeometryError;

#[repr(C)]
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum PsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    InvalidJson = 3,
    Degenerate = 4,
    NoBracket = 5,
    Obstructed = 6,
    BseOvershoot = 7,
    /// The scene has no sheet but an assisted quantity was requested.
    NoSheet = 8,
    Internal = 9,
}

/// Flat scene description. Lengths in cm, angles in degrees. Set
/// `eye_to_pillar_cm` to NaN to use the pillar offset, and `mu_deg` to NaN
/// for a scene without a sheet.
#[repr(C)]
#[derive(Copy, Clone, Debug)]
pub struct PsSceneParams {
    pub pillar_width_cm: f64,
    pub pillar_offset_cm: f64,
    pub mirror_x_cm: f64,
    pub mirror_y_cm: f64,
    pub mirror_length_cm: f64,
    pub mirror_angle_deg: f64,
    pub head_position_cm: f64,
    pub interpupillary_cm: f64,
    pub head_to_pupil_cm: f64,
    pub eye_to_pillar_cm: f64,
    pub mu_deg: f64,
}

/// Reconstruction of the in-car sheet measurement.
#[repr(C)]
#[derive(Copy, Clone, Debug, Default)]
pub struct PsExperiment {
    pub inferred_mu_deg: f64,
    pub ab_distance_cm: f64,
    pub point_a_x_cm: f64,
    pub point_a_y_cm: f64,
    pub point_b_x_cm: f64,
    pub point_b_y_cm: f64,
}

/// Opaque scene handle.
pub struct PsScene {
    model: SceneModel,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Failure(PsStatus, String);

impl From<GeometryError> for Failure {
    fn from(e: GeometryError) -> Self {
        let status = match e {
            GeometryError::InvalidParameter { .. } => PsStatus::InvalidParameter,
            GeometryError::ParallelLines | GeometryError::Degenerate(_) => PsStatus::Degenerate,
            GeometryError::NoBracket { .. } => PsStatus::NoBracket,
            GeometryError::Obstructed(_) => PsStatus::Obstructed,
            GeometryError::BseOvershoot { .. } => PsStatus::BseOvershoot,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(PsStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, catching panics, recording the error message and mapping the
/// outcome to a status.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> PsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            PsStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            PsStatus::Internal
        }
    }
}

unsafe fn scene_ref<'a>(scene: *const PsScene) -> Result<&'a SceneModel, Failure> {
    // SAFETY: the caller passes a handle from ps_scene_new / ps_scene_from_json.
    unsafe { scene.as_ref() }.map(|s| &s.model).ok_or_else(|| null("scene"))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("out"));
    }
    // SAFETY: non-null and, per the contract, valid for writes.
    unsafe { out.write(value) };
    Ok(())
}

fn sheet(model: &SceneModel) -> Result<BseConfig, Failure> {
    model
        .bse
        .ok_or_else(|| Failure(PsStatus::NoSheet, "scene has no sheet (mu_deg unset)".into()))
}

fn config_failure(e: pillar_sight::config::ConfigError) -> Failure {
    use pillar_sight::config::ConfigError;
    let status = match e {
        ConfigError::Parse(_) | ConfigError::Io { .. } => PsStatus::InvalidJson,
        ConfigError::Invalid { .. } => PsStatus::InvalidParameter,
    };
    Failure(status, e.to_string())
}

fn boxed(model: SceneModel) -> *mut PsScene {
    Box::into_raw(Box::new(PsScene { model }))
}

/// Builds a scene from flat parameters.
///
/// # Safety
/// `params` must be valid for reads and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ps_scene_new(params: *const PsSceneParams, out: *mut *mut PsScene) -> PsStatus {
    guard(|| {
        // SAFETY: caller contract.
        let p = unsafe { params.as_ref() }.ok_or_else(|| null("params"))?;
        let opt = |v: f64| (!v.is_nan()).then_some(v);
        let config = SceneConfig {
            label: String::new(),
            w_cm: p.pillar_width_cm,
            h_cm: p.pillar_offset_cm,
            l_cm: p.mirror_x_cm,
            p_cm: p.mirror_y_cm,
            m_cm: p.mirror_length_cm,
            theta_deg: p.mirror_angle_deg,
            h0_cm: p.head_position_cm,
            f_cm: p.interpupillary_cm,
            g_cm: p.head_to_pupil_cm,
            d_cm: opt(p.eye_to_pillar_cm),
            mu_deg: opt(p.mu_deg),
        };
        let model = config.to_model().map_err(config_failure)?;
        if out.is_null() {
            return Err(null("out"));
        }
        // SAFETY: caller contract.
        unsafe { write_out(out, boxed(model)) }
    })
}

/// Builds a scene from a JSON config (UTF-8, NUL terminated).
///
/// # Safety
/// `json` must be a valid C string and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ps_scene_from_json(json: *const c_char, out: *mut *mut PsScene) -> PsStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        // SAFETY: non-null C string per the contract.
        let text = unsafe { CStr::from_ptr(json) }
            .to_str()
            .map_err(|e| Failure(PsStatus::InvalidJson, format!("config is not UTF-8: {e}")))?;
        let model = SceneConfig::from_json(text)
            .and_then(|c| c.to_model())
            .map_err(config_failure)?;
        if out.is_null() {
            return Err(null("out"));
        }
        // SAFETY: caller contract.
        unsafe { write_out(out, boxed(model)) }
    })
}

/// The bundled Odyssey scene with a 45.7 deg sheet.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ps_scene_odyssey(out: *mut *mut PsScene) -> PsStatus {
    guard(|| {
        let model = SceneConfig::odyssey().to_model().map_err(config_failure)?;
        if out.is_null() {
            return Err(null("out"));
        }
        // SAFETY: caller contract.
        unsafe { write_out(out, boxed(model)) }
    })
}

/// Releases a scene. Null is ignored.
///
/// # Safety
/// `scene` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ps_scene_free(scene: *mut PsScene) {
    if !scene.is_null() {
        // SAFETY: created by Box::into_raw in this crate.
        drop(unsafe { Box::from_raw(scene) });
    }
}

/// Forward offset of the pupils from the head centre.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ps_pupil_offset(head_to_pupil_cm: f64, interpupillary_cm: f64, out: *mut f64) -> PsStatus {
    guard(|| {
        let b = pupil_offset(head_to_pupil_cm, interpupillary_cm)?;
        // SAFETY: caller contract.
        unsafe { write_out(out, b) }
    })
}

/// Shared body of the scalar scene queries.
unsafe fn scalar(
    scene: *const PsScene,
    out: *mut f64,
    f: impl FnOnce(&SceneModel) -> Result<f64, Failure>,
) -> PsStatus {
    guard(|| {
        // SAFETY: caller contract.
        let m = unsafe { scene_ref(scene) }?;
        let value = f(m)?;
        // SAFETY: caller contract.
        unsafe { write_out(out, value) }
    })
}

/// Mirror-to-eye angle, degrees.
///
/// # Safety
/// `scene` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ps_tau0_deg(scene: *const PsScene, out: *mut f64) -> PsStatus {
    unsafe { scalar(scene, out, |m| Ok(tau0(&m.geom, &m.driver)?.degrees())) }
}

/// Mirror sight line angle, degrees.
///
/// # Safety
/// `scene` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ps_kappa_deg(scene: *const PsScene, out: *mut f64) -> PsStatus {
    unsafe { scalar(scene, out, |m| Ok(kappa(&m.geom, &m.driver)?.degrees())) }
}

/// Forward-facing obstruction, floored at the field-of-view limit, degrees.
///
/// # Safety
/// `scene` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ps_lambda_deg(scene: *const PsScene, out: *mut f64) -> PsStatus {
    unsafe { scalar(scene, out, |m| Ok(monocular_lambda(&m.geom, &m.driver)?.effective.degrees())) }
}

/// Forward-facing obstruction before the field-of-view floor, degrees.
///
/// # Safety
/// `scene` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ps_lambda_geom_deg(scene: *const PsScene, out: *mut f64) -> PsStatus {
    unsafe { scalar(scene, out, |m| Ok(monocular_lambda(&m.geom, &m.driver)?.geometric.degrees())) }
}

/// Forward-facing obstruction with the sheet, degrees.
///
/// # Safety
/// `scene` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ps_lambda_bse_deg(scene: *const PsScene, out: *mut f64) -> PsStatus {
    unsafe { scalar(scene, out, |m| Ok(monocular_lambda_bse(&m.geom, &m.driver, &sheet(m)?)?.effective.degrees())) }
}

/// Turned-head binocular obstruction at the driver's resting eye, degrees.
///
/// # Safety
/// `scene` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ps_alpha_deg(scene: *const PsScene, out: *mut f64) -> PsStatus {
    unsafe { scalar(scene, out, |m| Ok(binocular_alpha_at(&m.geom, &m.driver, m.driver.turned_right_eye())?.effective.degrees())) }
}

/// Head movement needed to see the mirror sight line, cm.
///
/// # Safety
/// `scene` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ps_shift_cm(scene: *const PsScene, out: *mut f64) -> PsStatus {
    unsafe { scalar(scene, out, |m| Ok(required_shift(&m.geom, &m.driver)?.shift)) }
}

/// Head movement needed with the sheet, cm.
///
/// # Safety
/// `scene` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ps_shift_bse_cm(scene: *const PsScene, out: *mut f64) -> PsStatus {
    unsafe { scalar(scene, out, |m| Ok(required_shift_bse(&m.geom, &m.driver, &sheet(m)?)?.shift)) }
}

/// Reconstructs the sheet measurement for this scene, using the 10.3 deg
/// sheet line and the 35 cm / 105 cm intercepts.
///
/// # Safety
/// `scene` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ps_experiment(scene: *const PsScene, out: *mut PsExperiment) -> PsStatus {
    guard(|| {
        // SAFETY: caller contract.
        let m = unsafe { scene_ref(scene) }?;
        let setup = ExperimentSetup {
            geom: m.geom,
            driver: m.driver,
            ..ExperimentSetup::odyssey()
        };
        let r = reconstruct_experiment(&setup)?;
        let value = PsExperiment {
            inferred_mu_deg: r.inferred_mu.degrees(),
            ab_distance_cm: r.ab_distance,
            point_a_x_cm: r.point_a.x,
            point_a_y_cm: r.point_a.y,
            point_b_x_cm: r.point_b.x,
            point_b_y_cm: r.point_b.y,
        };
        // SAFETY: caller contract.
        unsafe { write_out(out, value) }
    })
}

/// Full analysis report as JSON. Release the string with [`ps_string_free`].
///
/// # Safety
/// `scene` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ps_analyze_json(scene: *const PsScene, out: *mut *mut c_char) -> PsStatus {
    guard(|| {
        // SAFETY: caller contract.
        let m = unsafe { scene_ref(scene) }?;
        let text = serde_json::to_string(&analyze(m))
            .map_err(|e| Failure(PsStatus::Internal, e.to_string()))?;
        let c = CString::new(text).map_err(|e| Failure(PsStatus::Internal, e.to_string()))?;
        if out.is_null() {
            return Err(null("out"));
        }
        // SAFETY: caller contract.
        unsafe { write_out(out, c.into_raw()) }
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ps_string_free(s: *mut c_char) {
    if !s.is_null() {
        // SAFETY: created by CString::into_raw in this crate.
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Message for the last failed call on this thread, or "" after a success.
/// The pointer stays valid until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn ps_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Stable name of a status code.
#[no_mangle]
pub extern "C" fn ps_status_name(status: PsStatus) -> *const c_char {
    let s: &'static CStr = match status {
        PsStatus::Ok => c"ok",
        PsStatus::NullPointer => c"null pointer",
        PsStatus::InvalidParameter => c"invalid parameter",
        PsStatus::InvalidJson => c"invalid json",
        PsStatus::Degenerate => c"degenerate geometry",
        PsStatus::NoBracket => c"no bracket",
        PsStatus::Obstructed => c"obstructed",
        PsStatus::BseOvershoot => c"sheet overshoot",
        PsStatus::NoSheet => c"no sheet",
        PsStatus::Internal => c"internal error",
    };
    s.as_ptr()
}
