#ifndef TEXSTAGE_H
#define TEXSTAGE_H

/* Generated by cbindgen from crates/ffi. Do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Service stage. Values start at 1 so that a zeroed output is never a valid stage.
 */
typedef enum TsStage {
  TS_STAGE_TYPE_I = 1,
  TS_STAGE_TYPE_II = 2,
  TS_STAGE_TYPE_III = 3,
} TsStage;

/**
 * Result codes.
 */
typedef enum TsStatus {
  TS_STATUS_OK = 0,
  TS_STATUS_NULL_POINTER = 1,
  TS_STATUS_INVALID_INPUT = 2,
  TS_STATUS_INVALID_CONFIG = 3,
  /**
   * No pixel pair fits in the image for the configured offsets.
   */
  TS_STATUS_DEGENERATE = 4,
  /**
   * Constant image: correlation has no value.
   */
  TS_STATUS_UNDEFINED_CORRELATION = 5,
  TS_STATUS_INVALID_MODEL = 6,
  TS_STATUS_FINGERPRINT_MISMATCH = 7,
  TS_STATUS_UNSUPPORTED_IMAGE = 8,
  TS_STATUS_IO = 9,
  TS_STATUS_PARSE = 10,
  /**
   * A Rust panic was caught at the boundary.
   */
  TS_STATUS_INTERNAL = 99,
} TsStatus;

/**
 * Opaque model handle.
 */
typedef struct TsModel TsModel;

typedef struct TsFeatures {
  double contrast;
  double correlation;
  double energy;
  double homogeneity;
} TsFeatures;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or NULL. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *ts_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *ts_version(void);

/**
 * Verdict phrase for a stage: "normal use", "early warning" or
 * "not recommended". Static storage.
 */
const char *ts_stage_phrase(enum TsStage stage);

/**
 * Loads a model JSON file.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum TsStatus ts_model_load(const char *path, struct TsModel **out);

/**
 * Parses a model from a JSON document.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum TsStatus ts_model_from_json(const char *json, struct TsModel **out);

/**
 * Releases a model. NULL is ignored.
 *
 * # Safety
 * `model` must come from `ts_model_load`/`ts_model_from_json` and not be
 * used afterwards.
 */
void ts_model_free(struct TsModel *model);

/**
 * Neighbor count of the model, or 0 for NULL.
 *
 * # Safety
 * `model` must be a live handle or NULL.
 */
size_t ts_model_k(const struct TsModel *model);

/**
 * Features of an 8-bit gray image under the default configuration
 * (8 levels, horizontal offset, symmetric).
 *
 * # Safety
 * `pixels` must point to `width * height` bytes; `out` must be writable.
 */
enum TsStatus ts_extract_gray(const uint8_t *pixels,
                              size_t width,
                              size_t height,
                              struct TsFeatures *out);

/**
 * Classifies a feature vector. Features must come from the model's own
 * configuration (see `ts_model_classify_gray` to extract and classify).
 *
 * # Safety
 * `model` must be a live handle; `features` readable; `out_stage` writable.
 */
enum TsStatus ts_model_classify_features(const struct TsModel *model,
                                         const struct TsFeatures *features,
                                         enum TsStage *out_stage);

/**
 * Extracts features from an 8-bit gray image with the model's configuration
 * and classifies them. `out_features` may be NULL.
 *
 * # Safety
 * `pixels` must point to `width * height` bytes; output pointers writable.
 */
enum TsStatus ts_model_classify_gray(const struct TsModel *model,
                                     const uint8_t *pixels,
                                     size_t width,
                                     size_t height,
                                     enum TsStage *out_stage,
                                     struct TsFeatures *out_features);

/**
 * Decodes a PNG or JPEG buffer and classifies it. `out_features` may be NULL.
 *
 * # Safety
 * `bytes` must point to `len` readable bytes; output pointers writable.
 */
enum TsStatus ts_model_classify_image(const struct TsModel *model,
                                      const uint8_t *bytes,
                                      size_t len,
                                      enum TsStage *out_stage,
                                      struct TsFeatures *out_features);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TEXSTAGE_H */
