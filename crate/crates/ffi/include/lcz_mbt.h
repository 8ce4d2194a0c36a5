#ifndef LCZ_MBT_H
#define LCZ_MBT_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every C API call.
typedef enum LczStatus {
  LCZ_STATUS_OK = 0,
  // A required pointer argument was null.
  LCZ_STATUS_NULL_ARGUMENT = 1,
  // A string argument was not valid UTF-8.
  LCZ_STATUS_INVALID_UTF8 = 2,
  // Input text could not be parsed or did not match its schema.
  LCZ_STATUS_PARSE_ERROR = 3,
  // The model has validation errors.
  LCZ_STATUS_INVALID_MODEL = 4,
  // A threshold, format, criterion or configuration was out of range.
  LCZ_STATUS_INVALID_ARGUMENT = 5,
  // Requirements could not be built or generation failed.
  LCZ_STATUS_GENERATION_FAILED = 6,
  // A suite was produced but does not satisfy the criterion.
  LCZ_STATUS_INCOMPLETE_COVERAGE = 7,
  // The suite was checked and does not satisfy the criterion.
  LCZ_STATUS_UNSATISFIED = 8,
  // An internal error; the engine caught a panic.
  LCZ_STATUS_INTERNAL = 99,
} LczStatus;

typedef enum LczFormat {
  LCZ_FORMAT_JSON = 0,
  LCZ_FORMAT_XML = 1,
  LCZ_FORMAT_CSV = 2,
} LczFormat;

typedef enum LczCriterion {
  LCZ_CRITERION_EACH_BORDER_NODE_ONCE = 0,
  LCZ_CRITERION_ALL_COMBINATIONS_OF_BORDER_NODES = 1,
} LczCriterion;

// A parsed process model.
typedef struct LczModel LczModel;

// A generated or imported test suite.
typedef struct LczSuite LczSuite;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Parses a model document. JSON and XML are accepted.
//
// # Safety
// `text` must be a NUL-terminated string and `out` valid for writes.
enum LczStatus lcz_model_parse(const char *text, enum LczFormat format, struct LczModel **out);

// Releases a model. Null is ignored.
//
// # Safety
// `model` must be null or a handle from `lcz_model_parse` not yet freed.
void lcz_model_free(struct LczModel *model);

// Writes the validation report as JSON. Returns `InvalidModel` when the
// report contains errors; the report is written either way.
//
// # Safety
// `model` must be a live handle and `report_json` valid for writes.
enum LczStatus lcz_model_validate(const struct LczModel *model, char **report_json);

// Computes the zones at `threshold` and writes the report as JSON.
//
// # Safety
// `model` must be a live handle and `report_json` valid for writes.
enum LczStatus lcz_model_zones(const struct LczModel *model,
                               double threshold_value,
                               char **report_json);

// Generates a suite. `config_json` is a generation config object, e.g.
// `{"threshold": 0.5, "criterion": "each_border_node_once", "seed": 42}`.
//
// Returns `IncompleteCoverage` with a valid suite in `*out` when the
// generator ran out of iterations; the caller frees it as usual.
//
// # Safety
// `model` must be a live handle, `config_json` a NUL-terminated string and
// `out` valid for writes.
enum LczStatus lcz_generate(const struct LczModel *model,
                            const char *config_json,
                            struct LczSuite **out);

// Reads a suite previously exported as JSON or XML.
//
// # Safety
// `text` must be a NUL-terminated string and `out` valid for writes.
enum LczStatus lcz_suite_import(const char *text, enum LczFormat format, struct LczSuite **out);

// Releases a suite. Null is ignored.
//
// # Safety
// `suite` must be null or a handle from this library not yet freed.
void lcz_suite_free(struct LczSuite *suite);

// Serializes a suite with its checklist annotations.
//
// # Safety
// `suite` must be a live handle and `text` valid for writes.
enum LczStatus lcz_suite_export(const struct LczSuite *suite, enum LczFormat format, char **text);

// Total transitions over all cases, or 0 for a null handle.
//
// # Safety
// `suite` must be null or a live handle.
size_t lcz_suite_total_steps(const struct LczSuite *suite);

// Number of test cases, or 0 for a null handle.
//
// # Safety
// `suite` must be null or a live handle.
size_t lcz_suite_case_count(const struct LczSuite *suite);

// Checks `suite` against `criterion` at `threshold` and writes the verdict
// as JSON. Returns `Unsatisfied` when the criterion is not met.
//
// # Safety
// `model` and `suite` must be live handles and `verdict_json` valid for writes.
enum LczStatus lcz_verify(const struct LczModel *model,
                          const struct LczSuite *suite,
                          double threshold_value,
                          enum LczCriterion criterion,
                          char **verdict_json);

// Renders the model and its zones as Graphviz DOT. `suite` may be null;
// otherwise its walks are drawn bold.
//
// # Safety
// `model` must be a live handle, `suite` null or a live handle, and `dot`
// valid for writes.
enum LczStatus lcz_render_dot(const struct LczModel *model,
                              double threshold_value,
                              const struct LczSuite *suite,
                              char **dot);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must be null or a string from this library not yet freed.
void lcz_string_free(char *s);

// Message of the last failure on this thread, or null after a success.
// The pointer stays valid until the next API call on the same thread.
const char *lcz_last_error_message(void);

// Machine-readable code of the last failure on this thread (for example
// `INFEASIBLE_BORDER_NODE`), or null after a success.
const char *lcz_last_error_code(void);

// Library version as a static NUL-terminated string.
const char *lcz_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LCZ_MBT_H */
