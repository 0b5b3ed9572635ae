#ifndef ESMIN_H
#define ESMIN_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of a call.
typedef enum EsminStatus {
  // Success, or an affirmative verdict.
  ESMIN_STATUS_OK = 0,
  // A well-formed negative verdict.
  ESMIN_STATUS_NO = 1,
  // A required pointer was null.
  ESMIN_STATUS_NULL_ARGUMENT = 2,
  // A string argument was not valid UTF-8.
  ESMIN_STATUS_INVALID_UTF8 = 3,
  // An input text could not be parsed.
  ESMIN_STATUS_PARSE_ERROR = 4,
  // Any other library error.
  ESMIN_STATUS_ERROR = 5,
  // The library panicked; this is a bug.
  ESMIN_STATUS_PANIC = 6,
} EsminStatus;

// An owned, parsed structure.
typedef struct EsminModel EsminModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. The pointer stays
// valid until the next call into the library on this thread.
const char *esmin_last_error(void);

// Parse a structure in the `.es` text format.
//
// # Safety
// `src` must be a nul-terminated string and `out` a valid pointer.
enum EsminStatus esmin_model_parse(const char *src, struct EsminModel **out);

// Release a handle. Null is ignored.
//
// # Safety
// `m` must come from this library and not have been freed.
void esmin_model_free(struct EsminModel *m);

// Number of events, or 0 for a null handle.
//
// # Safety
// `m` must be null or a live handle.
size_t esmin_model_event_count(const struct EsminModel *m);

// Number of configurations.
//
// # Safety
// `m` must be a live handle and `out` a valid pointer.
enum EsminStatus esmin_model_config_count(const struct EsminModel *m, size_t *out);

// Check the axioms of the structure's class. `report` may be null.
//
// # Safety
// `m` must be a live handle; `report`, if non-null, a valid pointer.
enum EsminStatus esmin_validate(const struct EsminModel *m, char **report);

// Serialise a structure to the `.es` text format.
//
// # Safety
// `m` must be a live handle and `out` a valid pointer.
enum EsminStatus esmin_model_serialize(const struct EsminModel *m, char **out);

// Decide whether `map` (in the `.map` format) is a folding of `src` onto `dst`.
// A map that is not a morphism yields `ESMIN_NO`. `report` may be null.
//
// # Safety
// Handles must be live, `map` nul-terminated, `report` null or valid.
enum EsminStatus esmin_check_folding(const struct EsminModel *src,
                                     const struct EsminModel *dst,
                                     const char *map,
                                     char **report);

// Decide hp (`hereditary` false) or hhp (`hereditary` true) bisimilarity.
//
// # Safety
// Both handles must be live.
enum EsminStatus esmin_bisim(const struct EsminModel *a,
                             const struct EsminModel *b,
                             bool hereditary);

// Minimise within `class` ("poset", "pes" or "aes"). On success `count`
// receives the number of maximal solutions and `first`, if non-null, the
// first quotient in the `.es` format.
//
// # Safety
// `m` must be live, `class` nul-terminated, `count` valid, `first` null or valid.
enum EsminStatus esmin_minimize(const struct EsminModel *m,
                                const char *class_,
                                size_t *count,
                                char **first);

// Release a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from this library and not have been freed.
void esmin_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ESMIN_H */
