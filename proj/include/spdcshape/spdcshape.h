#ifndef SPDCSHAPE_SPDCSHAPE_H
#define SPDCSHAPE_SPDCSHAPE_H

/*
 * C interface to libspdcshape.
 *
 * Every fallible call returns an spdc_status; on failure a message is
 * available from spdc_last_error() on the calling thread until the next call.
 * Objects are opaque and owned by the caller. Strings returned through char**
 * outputs are released with spdc_string_free. All quantities are SI.
 */

#include <stddef.h>

#if defined(_WIN32)
#  if defined(SPDC_BUILDING_LIBRARY)
#    define SPDC_API __declspec(dllexport)
#  else
#    define SPDC_API __declspec(dllimport)
#  endif
#else
#  define SPDC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum spdc_status {
  SPDC_OK = 0,
  SPDC_ERR_INVALID_ARGUMENT = 1,
  SPDC_ERR_CONFIG = 2,
  SPDC_ERR_DOMAIN = 3,           /* wavelength outside the dispersion model */
  SPDC_ERR_EVANESCENT = 4,
  SPDC_ERR_NO_PHASE_MATCHING = 5,
  SPDC_ERR_TOTAL_INTERNAL_REFLECTION = 6,
  SPDC_ERR_NON_FINITE = 7,
  SPDC_ERR_SCAN = 8,             /* width extraction or peak search failed */
  SPDC_ERR_INTERNAL = 9
} spdc_status;

typedef enum spdc_axis { SPDC_AXIS_X = 0, SPDC_AXIS_Y = 1 } spdc_axis;
typedef enum spdc_mode { SPDC_MODE_POINT = 0, SPDC_MODE_INTEGRATED = 1 } spdc_mode;
typedef enum spdc_width_method { SPDC_WIDTH_GAUSSIAN_FIT = 0, SPDC_WIDTH_THRESHOLD = 1 } spdc_width_method;

typedef struct spdc_scenario spdc_scenario;
typedef struct spdc_scan spdc_scan;
typedef struct spdc_table spdc_table;

typedef struct spdc_widths {
  double w_x;
  double w_y;
  double ellipticity;
  double peak_x;
  double peak_y;
  double max_convergence;
} spdc_widths;

SPDC_API const char* spdc_version(void);
SPDC_API const char* spdc_last_error(void);
SPDC_API const char* spdc_status_name(spdc_status status);
SPDC_API void spdc_string_free(char* text);

/* Scenarios */

/* Comma-separated list of built-in presets. */
SPDC_API spdc_status spdc_preset_names(char** out);
/* File path, then $SPDCSHAPE_PRESET_DIR/<ref>.json, then a built-in preset. */
SPDC_API spdc_status spdc_scenario_resolve(const char* ref, spdc_scenario** out);
SPDC_API spdc_status spdc_scenario_from_json(const char* text, spdc_scenario** out);
SPDC_API spdc_status spdc_scenario_clone(const spdc_scenario* scenario, spdc_scenario** out);
SPDC_API void spdc_scenario_free(spdc_scenario* scenario);

SPDC_API spdc_status spdc_scenario_set_pump_waist(spdc_scenario* scenario, double w0);
SPDC_API spdc_status spdc_scenario_set_pump_bandwidth(spdc_scenario* scenario, double fwhm);
/* Multiplies every quadrature node count by factor. */
SPDC_API spdc_status spdc_scenario_scale_quadrature(spdc_scenario* scenario, double factor);

SPDC_API spdc_status spdc_scenario_label(const spdc_scenario* scenario, char** out);
SPDC_API spdc_status spdc_scenario_to_json(const spdc_scenario* scenario, char** out);
/* Config plus SI-resolved values and derived quantities. */
SPDC_API spdc_status spdc_scenario_report(const spdc_scenario* scenario, char** out);

/* Primitives */

SPDC_API spdc_status spdc_degenerate_emission_angle(const spdc_scenario* scenario, double* angle);
SPDC_API spdc_status spdc_noncollinear_length(double w0, double phi1, double* out);
SPDC_API spdc_status spdc_thin_crystal_width(double signal_wavelength, double focal_length, double w0, double* out);
/* Rates at signal position (x, y) with the idler at its configured position. */
SPDC_API spdc_status spdc_coincidence_point(const spdc_scenario* scenario, double x, double y, double* rate);
SPDC_API spdc_status spdc_coincidence_integrated(const spdc_scenario* scenario, double x, double y, double* rate,
                                                 double* convergence);

/* Scans */

/* Cut through the located coincidence peak; half_range <= 0 picks one automatically. */
SPDC_API spdc_status spdc_scan_cut(const spdc_scenario* scenario, spdc_axis axis, spdc_mode mode, double half_range,
                                   int samples, int threads, spdc_scan** out);
SPDC_API void spdc_scan_free(spdc_scan* scan);
SPDC_API size_t spdc_scan_size(const spdc_scan* scan);
SPDC_API spdc_status spdc_scan_sample(const spdc_scan* scan, size_t index, double* position, double* rate,
                                      double* convergence);
/* Number of samples whose convergence estimate exceeds the threshold. */
SPDC_API size_t spdc_scan_unconverged(const spdc_scan* scan);
SPDC_API spdc_status spdc_scan_csv(const spdc_scan* scan, char** out);
SPDC_API spdc_status spdc_scan_half_width(const spdc_scan* scan, spdc_width_method method, double* width);

SPDC_API spdc_status spdc_measure_widths(const spdc_scenario* scenario, spdc_mode mode, int samples, int threads,
                                         spdc_widths* out);

/* Sweeps. Rows follow the order of values. */

SPDC_API spdc_status spdc_sweep_pump_width(const spdc_scenario* scenario, const double* values, size_t count,
                                           spdc_mode mode, int samples, int threads, int include_singles,
                                           spdc_table** out);
SPDC_API spdc_status spdc_sweep_pump_bandwidth(const spdc_scenario* scenario, const double* values, size_t count,
                                               int samples, int threads, spdc_table** out);
SPDC_API void spdc_table_free(spdc_table* table);
SPDC_API size_t spdc_table_rows(const spdc_table* table);
/* Row as w0 (or fwhm), w_x, w_y, ellipticity, convergence. */
SPDC_API spdc_status spdc_table_row(const spdc_table* table, size_t index, spdc_widths* out, double* parameter);
SPDC_API double spdc_table_max_convergence(const spdc_table* table);
SPDC_API spdc_status spdc_table_csv(const spdc_table* table, char** out);

#ifdef __cplusplus
}
#endif

#endif
