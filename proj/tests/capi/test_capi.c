/* Exercises the C interface from C. */
#include <math.h>
#include <stdio.h>
#include <string.h>

#include "spdcshape/spdcshape.h"

static int failures = 0;

#define EXPECT(cond)                                                  \
  do {                                                                \
    if (!(cond)) {                                                    \
      ++failures;                                                     \
      fprintf(stderr, "%s:%d: check failed: %s\n", __FILE__, __LINE__, #cond); \
    }                                                                 \
  } while (0)

static void test_presets_and_report(void) {
  char* names = NULL;
  EXPECT(spdc_preset_names(&names) == SPDC_OK);
  EXPECT(strstr(names, "fig3a") != NULL);
  spdc_string_free(names);

  spdc_scenario* sc = NULL;
  EXPECT(spdc_scenario_resolve("fig3a", &sc) == SPDC_OK);
  char* label = NULL;
  EXPECT(spdc_scenario_label(sc, &label) == SPDC_OK);
  EXPECT(strcmp(label, "fig3a") == 0);
  spdc_string_free(label);

  double angle = 0.0;
  EXPECT(spdc_degenerate_emission_angle(sc, &angle) == SPDC_OK);
  EXPECT(fabs(angle * 180.0 / 3.141592653589793 - 17.1) <= 0.5);

  char* report = NULL;
  EXPECT(spdc_scenario_report(sc, &report) == SPDC_OK);
  EXPECT(strstr(report, "\"noncollinear_length_m\"") != NULL);
  spdc_string_free(report);

  char* json = NULL;
  EXPECT(spdc_scenario_to_json(sc, &json) == SPDC_OK);
  spdc_scenario* again = NULL;
  EXPECT(spdc_scenario_from_json(json, &again) == SPDC_OK);
  char* json2 = NULL;
  EXPECT(spdc_scenario_to_json(again, &json2) == SPDC_OK);
  EXPECT(strcmp(json, json2) == 0);
  spdc_string_free(json);
  spdc_string_free(json2);
  spdc_scenario_free(again);
  spdc_scenario_free(sc);
}

static void test_errors(void) {
  spdc_scenario* sc = NULL;
  EXPECT(spdc_scenario_resolve("not-a-preset", &sc) == SPDC_ERR_CONFIG);
  EXPECT(sc == NULL);
  EXPECT(strlen(spdc_last_error()) > 0);

  EXPECT(spdc_scenario_from_json("{\"pump\": {\"w0_um\": 1, \"bogus\": 2}}", &sc) == SPDC_ERR_CONFIG);
  EXPECT(strstr(spdc_last_error(), "pump.bogus") != NULL);

  double out = 0.0;
  EXPECT(spdc_noncollinear_length(1e-4, 0.0, &out) == SPDC_ERR_INVALID_ARGUMENT);
  EXPECT(spdc_thin_crystal_width(810e-9, 0.25, 0.0, &out) == SPDC_ERR_INVALID_ARGUMENT);
  EXPECT(spdc_noncollinear_length(1e-4, 0.5, NULL) == SPDC_ERR_INVALID_ARGUMENT);
  EXPECT(strcmp(spdc_status_name(SPDC_ERR_SCAN), "scan failure") == 0);

  EXPECT(spdc_scenario_resolve("fig1a", &sc) == SPDC_OK);
  EXPECT(spdc_scenario_set_pump_waist(sc, -1.0) == SPDC_ERR_CONFIG);
  spdc_scan* scan = NULL;
  EXPECT(spdc_scan_cut(sc, SPDC_AXIS_X, SPDC_MODE_POINT, 0.0, 8, 1, &scan) == SPDC_ERR_INVALID_ARGUMENT);
  EXPECT(scan == NULL);
  EXPECT(spdc_scan_cut(sc, (spdc_axis)7, SPDC_MODE_POINT, 0.0, 41, 1, &scan) == SPDC_ERR_INVALID_ARGUMENT);
  spdc_scenario_free(sc);

  /* Overflowing amplitude: non-finite rate. */
  EXPECT(spdc_scenario_from_json("{\"pump\": {\"amplitude\": 1e200}}", &sc) == SPDC_OK);
  double rate = 0.0;
  EXPECT(spdc_coincidence_point(sc, 0.0, 0.0, &rate) == SPDC_ERR_NON_FINITE);
  spdc_scenario_free(sc);

  spdc_scenario_free(NULL);
  spdc_scan_free(NULL);
  spdc_table_free(NULL);
  EXPECT(spdc_scan_size(NULL) == 0);
}

static void test_primitives(void) {
  double v = 0.0;
  EXPECT(spdc_noncollinear_length(32e-6, 17.1 * 3.141592653589793 / 180.0, &v) == SPDC_OK);
  EXPECT(fabs(v - 1.0882861041157767e-4) < 1e-16);
  EXPECT(spdc_thin_crystal_width(810e-9, 0.25, 500e-6, &v) == SPDC_OK);
  EXPECT(fabs(v - 1.2891550390443522e-4) < 1e-16);

  spdc_scenario* sc = NULL;
  EXPECT(spdc_scenario_from_json("{\"pump\": {\"w0_um\": 50, \"bandwidth_nm\": 0}, \"detection\": "
                                 "{\"filter_fwhm_nm\": \"none\", \"pinhole_signal_um\": 0, \"pinhole_idler_um\": 0}}",
                                 &sc) == SPDC_OK);
  double point = 0.0, integrated = 0.0, conv = 1.0;
  EXPECT(spdc_coincidence_point(sc, 1e-4, 2e-5, &point) == SPDC_OK);
  EXPECT(spdc_coincidence_integrated(sc, 1e-4, 2e-5, &integrated, &conv) == SPDC_OK);
  EXPECT(fabs(point - integrated) <= 1e-12 * point);
  EXPECT(conv == 0.0);
  spdc_scenario_free(sc);
}

static void test_scan_and_sweeps(void) {
  spdc_scenario* sc = NULL;
  EXPECT(spdc_scenario_resolve("fig3a", &sc) == SPDC_OK);
  spdc_scan* scan = NULL;
  EXPECT(spdc_scan_cut(sc, SPDC_AXIS_X, SPDC_MODE_POINT, 0.0, 41, 2, &scan) == SPDC_OK);
  EXPECT(spdc_scan_size(scan) == 41);
  double first = 0.0, last = 0.0, r1 = 0.0, r2 = 0.0;
  EXPECT(spdc_scan_sample(scan, 0, &first, &r1, NULL) == SPDC_OK);
  EXPECT(spdc_scan_sample(scan, 40, &last, &r2, NULL) == SPDC_OK);
  EXPECT(first == -last);
  EXPECT(r1 == r2);
  EXPECT(spdc_scan_sample(scan, 41, NULL, NULL, NULL) == SPDC_ERR_INVALID_ARGUMENT);
  double wx = 0.0;
  EXPECT(spdc_scan_half_width(scan, SPDC_WIDTH_GAUSSIAN_FIT, &wx) == SPDC_OK);
  EXPECT(fabs(wx - 2.0e-3) < 0.05e-3);
  char* csv = NULL;
  EXPECT(spdc_scan_csv(scan, &csv) == SPDC_OK);
  EXPECT(strncmp(csv, "# scenario=fig3a axis=x mode=point\nposition_m,rate,convergence\n", 62) == 0);
  spdc_string_free(csv);
  spdc_scan_free(scan);

  spdc_widths w;
  EXPECT(spdc_measure_widths(sc, SPDC_MODE_POINT, 41, 1, &w) == SPDC_OK);
  EXPECT(w.ellipticity > 4.0);

  const double w0[] = {32e-6, 100e-6};
  spdc_table* table = NULL;
  EXPECT(spdc_sweep_pump_width(sc, w0, 2, SPDC_MODE_POINT, 41, 1, 0, &table) == SPDC_OK);
  EXPECT(spdc_table_rows(table) == 2);
  spdc_widths row;
  double parameter = 0.0;
  EXPECT(spdc_table_row(table, 1, &row, &parameter) == SPDC_OK);
  EXPECT(parameter == 100e-6);
  EXPECT(row.w_x < w.w_x);
  EXPECT(spdc_table_csv(table, &csv) == SPDC_OK);
  EXPECT(strstr(csv, "w0_m,w_x_m,w_y_m,ellipticity,singles_x_width_m,L_nc_m,convergence\n") != NULL);
  EXPECT(strstr(csv, ",nan,") != NULL);
  spdc_string_free(csv);
  spdc_table_free(table);

  EXPECT(spdc_sweep_pump_width(sc, w0, 0, SPDC_MODE_POINT, 41, 1, 0, &table) == SPDC_ERR_INVALID_ARGUMENT);
  spdc_scenario_free(sc);
}

int main(void) {
  test_presets_and_report();
  test_errors();
  test_primitives();
  test_scan_and_sweeps();
  if (failures > 0) {
    fprintf(stderr, "%d check(s) failed\n", failures);
    return 1;
  }
  printf("all C API checks passed\n");
  return 0;
}
