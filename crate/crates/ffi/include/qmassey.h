#ifndef QMASSEY_H
#define QMASSEY_H

#pragma once

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes shared by all functions.
typedef enum QmStatus {
  QM_STATUS_OK = 0,
  QM_STATUS_NULL_POINTER = 1,
  QM_STATUS_INVALID_UTF8 = 2,
  QM_STATUS_PARSE = 3,
  QM_STATUS_INVALID_ARGUMENT = 4,
  QM_STATUS_UNDEFINED = 5,
  QM_STATUS_INTERNAL = 6,
} QmStatus;

// Opaque handle to a replication transcript.
typedef struct QmTranscript QmTranscript;

// Opaque handle to a Gromov-Witten table on the model target.
typedef struct QmY QmY;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failing call on this thread, or NULL. Owned by the library.
const char *qm_last_error(void);

// Releases a string returned by this library. NULL is ignored.
//
// # Safety
// `s` must come from this library and not have been freed.
void qm_string_free(char *s);

// Library version as a static string.
const char *qm_version(void);

// Builds the bundled model table.
//
// # Safety
// `out` must be a valid pointer.
enum QmStatus qm_y_new(struct QmY **out);

// Builds a table from algebra and invariant texts in the dataset formats.
//
// # Safety
// Strings must be NUL-terminated; `out` must be valid.
enum QmStatus qm_y_from_text(const char *algebra, const char *gw, struct QmY **out);

// # Safety
// `y` must come from `qm_y_new`/`qm_y_from_text` and not have been freed. NULL is ignored.
void qm_y_free(struct QmY *y);

// The energy-`class` product `x *_class z` rendered as a linear combination.
//
// `class` is a name such as `0`, `F`, `R` or `2F`; `x` and `z` are linear combinations of basis
// labels. `product_last` selects which slot of the three-point invariant carries the output.
//
// # Safety
// Strings must be NUL-terminated; `y` and `out` must be valid.
enum QmStatus qm_y_star(const struct QmY *y,
                        const char *class_,
                        const char *x,
                        const char *z,
                        bool product_last,
                        char **out);

// Runs the end-to-end replication on the bundled data.
//
// `convention` is `tabulated`, `stated`, or NULL for both. Stage failures are part of the
// transcript, so this returns `Ok` whenever the run itself could be performed.
//
// # Safety
// `convention` must be NULL or NUL-terminated; `out` must be valid.
enum QmStatus qm_replicate(const char *convention, struct QmTranscript **out);

// True iff the run completed with a nontrivial coset for every convention.
//
// # Safety
// Pointers must be valid.
enum QmStatus qm_transcript_verdict(const struct QmTranscript *t, bool *out);

// The transcript as sorted-key JSON; free with `qm_string_free`.
//
// # Safety
// Pointers must be valid.
enum QmStatus qm_transcript_json(const struct QmTranscript *t, char **out);

// The transcript as text; free with `qm_string_free`.
//
// # Safety
// Pointers must be valid.
enum QmStatus qm_transcript_text(const struct QmTranscript *t, char **out);

// # Safety
// `t` must come from `qm_replicate` and not have been freed. NULL is ignored.
void qm_transcript_free(struct QmTranscript *t);

// Runs a command line as the `qmassey` binary would, without the program name.
//
// The captured output goes to `*out` (free with `qm_string_free`) and the process exit code
// to `*exit_code`: 0 passed, 1 a check failed, 2 usage or input error.
//
// # Safety
// `argv` must hold `argc` NUL-terminated strings; `out` and `exit_code` must be valid.
enum QmStatus qm_cli_run(int argc, const char *const *argv, char **out, int *exit_code);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* QMASSEY_H */
