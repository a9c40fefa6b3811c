/* C bindings for the clode complex-linearization engine. */

#pragma once

/* Generated with cbindgen:0.26.0 */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes mirroring the CLI exit-code contract.
typedef enum ClodeStatus {
  ClodeOk = 0,
  ClodeParseError = 2,
  ClodeUndecided = 3,
  ClodeInvalidArgument = 4,
  ClodeInternalError = 5,
} ClodeStatus;

// Opaque analysis result. Obtain with `clode_analyze` / `clode_symmetries`,
// read with the accessors, release with `clode_report_free`.
typedef struct ClodeReport ClodeReport;

// Analyze a problem text (same format as the CLI's problem files).
// Pass degree < 0, seed < 0 or tol <= 0 for the defaults.
//
// # Safety
// `problem_text` must be a valid NUL-terminated string and `out` a valid
// pointer to a report-handle slot.
enum ClodeStatus clode_analyze(const char *problem_text,
                               int32_t degree,
                               int64_t seed,
                               double tol,
                               struct ClodeReport **out);

// Compute only the symmetry section.
//
// # Safety
// Same contract as [`clode_analyze`].
enum ClodeStatus clode_symmetries(const char *problem_text,
                                  int32_t degree,
                                  int64_t seed,
                                  double tol,
                                  struct ClodeReport **out);

// JSON form of a report; owned by the handle.
//
// # Safety
// `report` must be a live handle from this library (or NULL).
const char *clode_report_json(const struct ClodeReport *report);

// Text rendering of a report; owned by the handle.
//
// # Safety
// `report` must be a live handle from this library (or NULL).
const char *clode_report_text(const struct ClodeReport *report);

// Release a report handle.
//
// # Safety
// `report` must be NULL or a handle not freed before.
void clode_report_free(struct ClodeReport *report);

// Copy the last error message of this thread into `buf` (NUL-terminated,
// truncating); returns the full message length.
//
// # Safety
// `buf` must point to at least `len` writable bytes, or be NULL.
size_t clode_last_error(char *buf, size_t len);

// Library version as a static string.
const char *clode_version(void);
