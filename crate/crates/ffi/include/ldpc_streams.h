#ifndef LDPC_STREAMS_H
#define LDPC_STREAMS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum LdpcSchedule {
  LDPC_SCHEDULE_FLOODING = 0,
  LDPC_SCHEDULE_LAYERED = 1,
} LdpcSchedule;

typedef enum LdpcBackpressure {
  LDPC_BACKPRESSURE_BLOCK = 0,
  LDPC_BACKPRESSURE_REJECT = 1,
} LdpcBackpressure;

/**
 * Result of every fallible call.
 */
typedef enum LdpcStatus {
  LDPC_STATUS_OK = 0,
  LDPC_STATUS_NULL_POINTER = 1,
  LDPC_STATUS_INVALID_ARGUMENT = 2,
  LDPC_STATUS_FORMAT = 3,
  LDPC_STATUS_DEGENERATE = 4,
  LDPC_STATUS_DIMENSION = 5,
  LDPC_STATUS_CONFIG = 6,
  LDPC_STATUS_INFEASIBLE = 7,
  LDPC_STATUS_NOISE_VARIANCE = 8,
  LDPC_STATUS_ENGINE_STOPPED = 9,
  LDPC_STATUS_QUEUE_FULL = 10,
  LDPC_STATUS_IO = 11,
  LDPC_STATUS_STARTUP = 12,
  /**
   * No result was ready, or nothing is outstanding.
   */
  LDPC_STATUS_EMPTY = 13,
  /**
   * The library panicked; the handle involved should be freed.
   */
  LDPC_STATUS_PANIC = 14,
} LdpcStatus;

/**
 * Opaque parity-check code.
 */
typedef struct LdpcCode LdpcCode;

/**
 * Opaque stream engine.
 */
typedef struct LdpcEngine LdpcEngine;

/**
 * Enum fields of config structs must hold one of the declared values.
 */
typedef struct LdpcDecoderConfig {
  enum LdpcSchedule schedule;
  size_t max_iterations;
  bool early_termination;
  double normalization;
  double llr_clamp;
} LdpcDecoderConfig;

typedef struct LdpcStreamConfig {
  /**
   * Worker streams.
   */
  size_t streams;
  /**
   * Maximum frames per job.
   */
  size_t batch;
  size_t queue_depth;
  enum LdpcBackpressure backpressure;
} LdpcStreamConfig;

typedef struct LdpcShutdownSummary {
  uint64_t accepted;
  uint64_t completed;
  uint64_t cancelled;
} LdpcShutdownSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failing call on this thread, or NULL. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *ldpc_last_error(void);

struct LdpcDecoderConfig ldpc_decoder_config_default(void);

struct LdpcStreamConfig ldpc_stream_config_default(void);

/**
 * Parses a NUL-terminated alist document.
 *
 * # Safety
 * `text` must be a valid C string and `out` a valid pointer.
 */
enum LdpcStatus ldpc_code_from_alist(const char *text, struct LdpcCode **out);

/**
 * Builds a code from a dense row-major `m × n` 0/1 matrix.
 *
 * # Safety
 * `h` must point to `m·n` bytes and `out` must be valid.
 */
enum LdpcStatus ldpc_code_from_dense(const uint8_t *h, size_t m, size_t n, struct LdpcCode **out);

/**
 * Pseudo-random regular code, deterministic in `seed`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum LdpcStatus ldpc_code_generate(size_t n,
                                   size_t m,
                                   size_t row_degree,
                                   uint64_t seed,
                                   struct LdpcCode **out);

/**
 * # Safety
 * `code` must come from this library and not be used afterwards. NULL is a no-op.
 */
void ldpc_code_free(struct LdpcCode *code);

/**
 * Code length, or 0 for NULL.
 *
 * # Safety
 * `code` must be NULL or a live handle.
 */
size_t ldpc_code_n(const struct LdpcCode *code);

/**
 * Number of checks, or 0 for NULL.
 *
 * # Safety
 * `code` must be NULL or a live handle.
 */
size_t ldpc_code_m(const struct LdpcCode *code);

/**
 * Number of nonzero entries of H, or 0 for NULL.
 *
 * # Safety
 * `code` must be NULL or a live handle.
 */
size_t ldpc_code_num_edges(const struct LdpcCode *code);

/**
 * Serializes to alist. The string must be released with [`ldpc_string_free`].
 *
 * # Safety
 * `code` must be a live handle and `out` a valid pointer.
 */
enum LdpcStatus ldpc_code_to_alist(const struct LdpcCode *code, char **out);

/**
 * # Safety
 * `s` must come from this library. NULL is a no-op.
 */
void ldpc_string_free(char *s);

/**
 * Writes `H·bits` over GF(2) into `syndrome` (length m).
 *
 * # Safety
 * `bits` must hold `len` bytes and `syndrome` m bytes.
 */
enum LdpcStatus ldpc_code_syndrome(const struct LdpcCode *code,
                                   const uint8_t *bits,
                                   size_t len,
                                   uint8_t *syndrome);

/**
 * Decodes one frame of `len` channel LLRs into `bits` (length n).
 * `iterations` and `syndrome_ok` may be NULL.
 *
 * # Safety
 * Buffers must have the stated lengths; `code` and `config` must be valid.
 */
enum LdpcStatus ldpc_decode(const struct LdpcCode *code,
                            const struct LdpcDecoderConfig *config,
                            const double *llrs,
                            size_t len,
                            uint8_t *bits,
                            size_t *iterations,
                            bool *syndrome_ok);

/**
 * Decodes `frames` frames in lockstep. `llrs` and `bits` are frame-major
 * (`frames·n`); `iterations` and `syndrome_ok` hold one entry per frame and
 * may be NULL.
 *
 * # Safety
 * Buffers must have the stated lengths; `code` and `config` must be valid.
 */
enum LdpcStatus ldpc_decode_batch(const struct LdpcCode *code,
                                  const struct LdpcDecoderConfig *config,
                                  const double *llrs,
                                  size_t frames,
                                  uint8_t *bits,
                                  size_t *iterations,
                                  bool *syndrome_ok);

/**
 * Reorders `frames` frame-major frames of length `n` into symbol-major
 * order: element `i·frames + s` is symbol `i` of frame `s`.
 *
 * # Safety
 * `input_data` and `output_data` must each hold `frames·n` values.
 */
enum LdpcStatus ldpc_interleave(const double *input_data,
                                size_t frames,
                                size_t n,
                                double *output_data);

/**
 * Inverse of [`ldpc_interleave`].
 *
 * # Safety
 * `input_data` and `output_data` must each hold `frames·n` values.
 */
enum LdpcStatus ldpc_deinterleave(const double *input_data,
                                  size_t frames,
                                  size_t n,
                                  double *output_data);

/**
 * Starts an engine decoding with `code`. The engine keeps its own reference
 * to the code, so the code handle may be freed afterwards.
 *
 * # Safety
 * All pointers must be valid.
 */
enum LdpcStatus ldpc_engine_start(const struct LdpcCode *code,
                                  const struct LdpcDecoderConfig *config,
                                  const struct LdpcStreamConfig *stream,
                                  struct LdpcEngine **out);

/**
 * Submits a job of `frames` frame-major frames and writes its id.
 * Returns `QueueFull` under reject backpressure when every queue is full.
 *
 * # Safety
 * `llrs` must hold `frames·n` values; `job_id` may be NULL.
 */
enum LdpcStatus ldpc_engine_submit(const struct LdpcEngine *engine,
                                   const double *llrs,
                                   size_t frames,
                                   uint64_t *job_id);

/**
 * Takes one finished job. `timeout_ms < 0` waits while work is outstanding,
 * `0` only checks, and a positive value waits at most that long. Returns
 * `Empty` if no result was obtained.
 *
 * `bits` must hold `batch·n` bytes and `iterations`/`syndrome_ok` `batch`
 * entries (the engine's maximum job size); the latter two may be NULL.
 *
 * # Safety
 * Buffers must have the stated lengths.
 */
enum LdpcStatus ldpc_engine_collect(const struct LdpcEngine *engine,
                                    int64_t timeout_ms,
                                    uint64_t *job_id,
                                    size_t *frames,
                                    uint8_t *bits,
                                    size_t *iterations,
                                    bool *syndrome_ok);

/**
 * # Safety
 * `engine` must be a live handle.
 */
enum LdpcStatus ldpc_engine_pause(const struct LdpcEngine *engine);

/**
 * # Safety
 * `engine` must be a live handle.
 */
enum LdpcStatus ldpc_engine_resume(const struct LdpcEngine *engine);

/**
 * Stops the engine. With `drain`, queued jobs are decoded first; otherwise
 * they are cancelled. Results stay collectable. Repeated calls report the
 * first summary.
 *
 * # Safety
 * `engine` must be a live handle; `summary` may be NULL.
 */
enum LdpcStatus ldpc_engine_shutdown(const struct LdpcEngine *engine,
                                     bool drain,
                                     struct LdpcShutdownSummary *summary);

/**
 * Cancels queued work, joins the workers and releases the engine.
 *
 * # Safety
 * `engine` must come from this library and not be used afterwards. NULL is a no-op.
 */
void ldpc_engine_free(struct LdpcEngine *engine);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LDPC_STREAMS_H */
