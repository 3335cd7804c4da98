/* C interface for the MSCF tracker. Generated; do not edit. */

#ifndef MSCF_H
#define MSCF_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible entry point.
 */
typedef enum MscfStatus {
  MscfStatus_Ok = 0,
  MscfStatus_NullPointer = 1,
  MscfStatus_InvalidArgument = 2,
  MscfStatus_ConfigError = 3,
  MscfStatus_IoError = 4,
  MscfStatus_ParseError = 5,
  MscfStatus_DegenerateResponse = 6,
  MscfStatus_Utf8Error = 7,
  MscfStatus_Panic = 8,
} MscfStatus;

/**
 * Opaque color-names lookup table.
 */
typedef struct MscfCnTableHandle MscfCnTableHandle;

/**
 * Opaque tracker configuration.
 */
typedef struct MscfConfigHandle MscfConfigHandle;

/**
 * Opaque per-sequence tracker state.
 */
typedef struct MscfTrackerHandle MscfTrackerHandle;

/**
 * Axis-aligned box; (x, y) is the top-left corner in pixels.
 */
typedef struct MscfRect {
  double x;
  double y;
  double w;
  double h;
} MscfRect;

/**
 * Per-frame tracking output.
 */
typedef struct MscfFrameReport {
  struct MscfRect rect;
  double response_max;
  double mtf;
  bool trained;
  double elapsed_seconds;
} MscfFrameReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message of this thread into `buf` (truncated,
 * always NUL-terminated) and returns the full message length.
 *
 * # Safety
 * `buf` must point to `len` writable bytes, or be null (query mode).
 */
uintptr_t mscf_last_error_message(char *buf, uintptr_t len);

/**
 * Creates a configuration with the reference defaults.
 */
struct MscfConfigHandle *mscf_config_new(void);

/**
 * Loads a configuration file (flat `key = value` lines).
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum MscfStatus mscf_config_load(const char *path, struct MscfConfigHandle **out);

/**
 * Sets one configuration key from its textual form, e.g. ("lambda1", "20").
 *
 * # Safety
 * All pointers must be valid; strings NUL-terminated.
 */
enum MscfStatus mscf_config_set(struct MscfConfigHandle *cfg, const char *key, const char *value);

/**
 * # Safety
 * `cfg` must come from this library and not have been freed.
 */
void mscf_config_free(struct MscfConfigHandle *cfg);

/**
 * Loads a color-names table (little-endian f32, 32768 x 10).
 *
 * # Safety
 * `path` must be NUL-terminated; `out` writable.
 */
enum MscfStatus mscf_cn_table_load(const char *path, struct MscfCnTableHandle **out);

/**
 * # Safety
 * `table` must come from this library and not have been freed.
 */
void mscf_cn_table_free(struct MscfCnTableHandle *table);

/**
 * Initializes a tracker on the first frame. `frame` is row-major 8-bit RGB
 * (`width * height * 3` bytes); `cn` may be null to track without
 * color-names channels; the config is copied and may be freed afterwards.
 *
 * # Safety
 * `frame` must point to the full pixel buffer; handles must be valid.
 */
enum MscfStatus mscf_tracker_init(const uint8_t *frame,
                                  uintptr_t width,
                                  uintptr_t height,
                                  struct MscfRect rect,
                                  const struct MscfConfigHandle *cfg,
                                  const struct MscfCnTableHandle *cn,
                                  struct MscfTrackerHandle **out);

/**
 * Advances the tracker by one frame and fills `report`.
 *
 * # Safety
 * `tracker` must be a live handle; `frame` the full pixel buffer; `report`
 * writable.
 */
enum MscfStatus mscf_tracker_track(struct MscfTrackerHandle *tracker,
                                   const uint8_t *frame,
                                   uintptr_t width,
                                   uintptr_t height,
                                   struct MscfFrameReport *report);

/**
 * Reads the current box without advancing the tracker.
 *
 * # Safety
 * `tracker` must be a live handle; `rect` writable.
 */
enum MscfStatus mscf_tracker_box(const struct MscfTrackerHandle *tracker, struct MscfRect *rect);

/**
 * # Safety
 * `tracker` must come from this library and not have been freed.
 */
void mscf_tracker_free(struct MscfTrackerHandle *tracker);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MSCF_H */
