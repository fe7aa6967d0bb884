#ifndef FGG_H
#define FGG_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum FggStatus {
  FGG_STATUS_OK = 0,
  FGG_STATUS_NULL_ARGUMENT = 1,
  FGG_STATUS_INVALID_UTF8 = 2,
  FGG_STATUS_PARSE_ERROR = 3,
  FGG_STATUS_TYPE_ERROR = 4,
  FGG_STATUS_TRANSLATE_ERROR = 5,
  /**
   * The program panicked (failed assertion or explicit `panic`).
   */
  FGG_STATUS_RUNTIME_PANIC = 6,
  FGG_STATUS_STEP_LIMIT = 7,
  /**
   * Correspondence checking found a step that does not match.
   */
  FGG_STATUS_MISMATCH = 8,
  /**
   * Only FGG programs can be translated or co-simulated.
   */
  FGG_STATUS_WRONG_LANGUAGE = 9,
  FGG_STATUS_INTERNAL = 10,
} FggStatus;

typedef enum FggLanguage {
  FGG_LANGUAGE_FG_CORE = 0,
  FGG_LANGUAGE_FG_EXTENDED = 1,
  FGG_LANGUAGE_FGG = 2,
} FggLanguage;

typedef enum FggMode {
  FGG_MODE_DICT = 0,
  FGG_MODE_ERASURE = 1,
} FggMode;

/**
 * A parsed program.
 */
typedef struct FggProgram FggProgram;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses `source` as `language`. On success `*out` holds a new handle.
 *
 * # Safety
 * `source` must be a nul-terminated string and `out` a valid pointer.
 */
enum FggStatus fgg_parse(const char *source, enum FggLanguage language, struct FggProgram **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `program` must come from this library and not be used afterwards.
 */
void fgg_program_free(struct FggProgram *program);

/**
 * Typechecks; on success `*type_out` (if not null) receives the type of
 * `main`.
 *
 * # Safety
 * `program` must be a live handle; `type_out` null or valid.
 */
enum FggStatus fgg_typecheck(const struct FggProgram *program, char **type_out);

/**
 * Prints the program in canonical concrete syntax.
 *
 * # Safety
 * `program` must be a live handle and `out` a valid pointer.
 */
enum FggStatus fgg_print(const struct FggProgram *program, char **out);

/**
 * Translates a well-typed FGG program to extended FG; `*out` receives a
 * new handle.
 *
 * # Safety
 * `program` must be a live handle and `out` a valid pointer.
 */
enum FggStatus fgg_translate(const struct FggProgram *program,
                             enum FggMode mode,
                             struct FggProgram **out);

/**
 * Evaluates `main` for at most `max_steps` steps. On `Ok`, `*value_out`
 * (if not null) receives the printed value; `*steps_out` (if not null)
 * is set in every outcome except argument errors.
 *
 * # Safety
 * `program` must be a live handle; the output pointers null or valid.
 */
enum FggStatus fgg_run(const struct FggProgram *program,
                       size_t max_steps,
                       char **value_out,
                       size_t *steps_out);

/**
 * Checks step correspondence against the dictionary translation for up
 * to `max_steps` source steps. `*report_out` (if not null) receives the
 * JSON report whether or not the check passed.
 *
 * # Safety
 * `program` must be a live handle; `report_out` null or valid.
 */
enum FggStatus fgg_cosim(const struct FggProgram *program, size_t max_steps, char **report_out);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void fgg_string_free(char *s);

/**
 * The message for the last failed call on this thread, or null. Valid
 * until the next call into the library on the same thread.
 */
const char *fgg_last_error(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FGG_H */
