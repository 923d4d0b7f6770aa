#ifndef PILLAR_SIGHT_H
#define PILLAR_SIGHT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PsStatus {
  PS_STATUS_OK = 0,
  PS_STATUS_NULL_POINTER = 1,
  PS_STATUS_INVALID_PARAMETER = 2,
  PS_STATUS_INVALID_JSON = 3,
  PS_STATUS_DEGENERATE = 4,
  PS_STATUS_NO_BRACKET = 5,
  PS_STATUS_OBSTRUCTED = 6,
  PS_STATUS_BSE_OVERSHOOT = 7,
  /*
   The scene has no sheet but an assisted quantity was requested.
   */
  PS_STATUS_NO_SHEET = 8,
  PS_STATUS_INTERNAL = 9,
} PsStatus;

/*
 Opaque scene handle.
 */
typedef struct PsScene PsScene;

/*
 Flat scene description. Lengths in cm, angles in degrees. Set
 `eye_to_pillar_cm` to NaN to use the pillar offset, and `mu_deg` to NaN
 for a scene without a sheet.
 */
typedef struct PsSceneParams {
  double pillar_width_cm;
  double pillar_offset_cm;
  double mirror_x_cm;
  double mirror_y_cm;
  double mirror_length_cm;
  double mirror_angle_deg;
  double head_position_cm;
  double interpupillary_cm;
  double head_to_pupil_cm;
  double eye_to_pillar_cm;
  double mu_deg;
} PsSceneParams;

/*
 Reconstruction of the in-car sheet measurement.
 */
typedef struct PsExperiment {
  double inferred_mu_deg;
  double ab_distance_cm;
  double point_a_x_cm;
  double point_a_y_cm;
  double point_b_x_cm;
  double point_b_y_cm;
} PsExperiment;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Builds a scene from flat parameters.

 # Safety
 `params` must be valid for reads and `out` valid for writes.
 */
enum PsStatus ps_scene_new(const struct PsSceneParams *params, struct PsScene **out);

/*
 Builds a scene from a JSON config (UTF-8, NUL terminated).

 # Safety
 `json` must be a valid C string and `out` valid for writes.
 */
enum PsStatus ps_scene_from_json(const char *json, struct PsScene **out);

/*
 The bundled Odyssey scene with a 45.7 deg sheet.

 # Safety
 `out` must be valid for writes.
 */
enum PsStatus ps_scene_odyssey(struct PsScene **out);

/*
 Releases a scene. Null is ignored.

 # Safety
 `scene` must come from this library and not be used afterwards.
 */
void ps_scene_free(struct PsScene *scene);

/*
 Forward offset of the pupils from the head centre.

 # Safety
 `out` must be valid for writes.
 */
enum PsStatus ps_pupil_offset(double head_to_pupil_cm, double interpupillary_cm, double *out);

/*
 Mirror-to-eye angle, degrees.

 # Safety
 `scene` must be a live handle and `out` valid for writes.
 */
enum PsStatus ps_tau0_deg(const struct PsScene *scene, double *out);

/*
 Mirror sight line angle, degrees.

 # Safety
 `scene` must be a live handle and `out` valid for writes.
 */
enum PsStatus ps_kappa_deg(const struct PsScene *scene, double *out);

/*
 Forward-facing obstruction, floored at the field-of-view limit, degrees.

 # Safety
 `scene` must be a live handle and `out` valid for writes.
 */
enum PsStatus ps_lambda_deg(const struct PsScene *scene, double *out);

/*
 Forward-facing obstruction before the field-of-view floor, degrees.

 # Safety
 `scene` must be a live handle and `out` valid for writes.
 */
enum PsStatus ps_lambda_geom_deg(const struct PsScene *scene, double *out);

/*
 Forward-facing obstruction with the sheet, degrees.

 # Safety
 `scene` must be a live handle and `out` valid for writes.
 */
enum PsStatus ps_lambda_bse_deg(const struct PsScene *scene, double *out);

/*
 Turned-head binocular obstruction at the driver's resting eye, degrees.

 # Safety
 `scene` must be a live handle and `out` valid for writes.
 */
enum PsStatus ps_alpha_deg(const struct PsScene *scene, double *out);

/*
 Head movement needed to see the mirror sight line, cm.

 # Safety
 `scene` must be a live handle and `out` valid for writes.
 */
enum PsStatus ps_shift_cm(const struct PsScene *scene, double *out);

/*
 Head movement needed with the sheet, cm.

 # Safety
 `scene` must be a live handle and `out` valid for writes.
 */
enum PsStatus ps_shift_bse_cm(const struct PsScene *scene, double *out);

/*
 Reconstructs the sheet measurement for this scene, using the 10.3 deg
 sheet line and the 35 cm / 105 cm intercepts.

 # Safety
 `scene` must be a live handle and `out` valid for writes.
 */
enum PsStatus ps_experiment(const struct PsScene *scene, struct PsExperiment *out);

/*
 Full analysis report as JSON. Release the string with [`ps_string_free`].

 # Safety
 `scene` must be a live handle and `out` valid for writes.
 */
enum PsStatus ps_analyze_json(const struct PsScene *scene, char **out);

/*
 Releases a string returned by this library. Null is ignored.

 # Safety
 `s` must come from this library and not be used afterwards.
 */
void ps_string_free(char *s);

/*
 Message for the last failed call on this thread, or "" after a success.
 The pointer stays valid until the next library call on the same thread.
 */
const char *ps_last_error_message(void);

/*
 Stable name of a status code.
 */
const char *ps_status_name(enum PsStatus status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PILLAR_SIGHT_H */
