#ifndef HOMOSYNTAX_H
#define HOMOSYNTAX_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum HsStatus {
  HS_STATUS_OK = 0,
  /**
   * A required pointer was null or a string was not valid UTF-8.
   */
  HS_STATUS_INVALID_ARGUMENT = 1,
  /**
   * A resource file is missing or unreadable.
   */
  HS_STATUS_IO = 2,
  /**
   * A resource file is malformed.
   */
  HS_STATUS_FORMAT = 3,
  /**
   * The request was rejected, e.g. a length outside 3..=15.
   */
  HS_STATUS_CONFIG = 4,
  /**
   * The query is not in the embedding vocabulary.
   */
  HS_STATUS_OOV = 5,
  /**
   * Generation was attempted and failed.
   */
  HS_STATUS_GENERATION = 6,
  /**
   * An internal panic was caught at the boundary.
   */
  HS_STATUS_PANIC = 7,
  HS_STATUS_OTHER = 8,
} HsStatus;

/**
 * Loaded generation resources. Opaque to C.
 */
typedef struct HsResources HsResources;

typedef struct HsGenerateOptions {
  /**
   * 1, 2 or 3.
   */
  uint8_t model;
  /**
   * Sentence length in tokens, 3..=15.
   */
  uint32_t length;
  uint64_t seed;
  /**
   * Skeleton decoding: 0 samples among the top `top_k` successors, 1 takes the argmax.
   */
  uint8_t argmax;
  uint32_t top_k;
  /**
   * Neighbor list size for Model 1 relaxation.
   */
  uint32_t neighbors;
  uint32_t max_hops;
  /**
   * Candidate cap for Model 3.
   */
  uint32_t cap_m;
  /**
   * Nonzero selects the inverted Model 3 score.
   */
  uint8_t invert_score;
  uint32_t max_attempts;
} HsGenerateOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Default options: Model 3, length 8, seed 0, top-3 decoding.
 */
struct HsGenerateOptions hs_generate_options_default(void);

/**
 * Loads a resource directory into `*out`.
 *
 * # Safety
 * `dir` must be a NUL-terminated string and `out` valid for a pointer write.
 */
enum HsStatus hs_resources_load(const char *dir, struct HsResources **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `h` must be null or a handle from [`hs_resources_load`] not yet freed.
 */
void hs_resources_free(struct HsResources *h);

/**
 * Generates one sentence and writes its text to `*out`. `opts` may be null
 * for the defaults.
 *
 * # Safety
 * `h` must be a live handle, `query` a NUL-terminated string, `opts` null or
 * valid, and `out` valid for a pointer write.
 */
enum HsStatus hs_generate(const struct HsResources *h,
                          const char *query,
                          const struct HsGenerateOptions *opts,
                          char **out);

/**
 * Like [`hs_generate`] but writes the full result, per-slot trace included,
 * as a JSON object.
 *
 * # Safety
 * Same contract as [`hs_generate`].
 */
enum HsStatus hs_generate_trace(const struct HsResources *h,
                                const char *query,
                                const struct HsGenerateOptions *opts,
                                char **out);

/**
 * Writes the proximity of two vocabulary words, in [0, 1], to `*out`.
 *
 * # Safety
 * `h` must be a live handle, `a` and `b` NUL-terminated strings, `out` valid
 * for a write.
 */
enum HsStatus hs_proximity(const struct HsResources *h, const char *a, const char *b, double *out);

/**
 * Writes the `m` nearest neighbors of `word` as a JSON array of
 * `[word, proximity]` pairs.
 *
 * # Safety
 * `h` must be a live handle, `word` a NUL-terminated string, `out` valid for
 * a pointer write.
 */
enum HsStatus hs_neighbors_json(const struct HsResources *h,
                                const char *word,
                                uint32_t m,
                                char **out);

/**
 * Frees a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must be null or a string from this library not yet freed.
 */
void hs_string_free(char *s);

/**
 * Message of the last failed call on this thread, or null. The pointer is
 * valid until the next call into this library on the same thread.
 */
const char *hs_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *hs_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HOMOSYNTAX_H */
