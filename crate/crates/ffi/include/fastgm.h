#ifndef FASTGM_H
#define FASTGM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes.
typedef enum FgmStatus {
  FGM_STATUS_OK = 0,
  FGM_STATUS_NULL_POINTER = 1,
  FGM_STATUS_INVALID_ARGUMENT = 2,
  FGM_STATUS_NO_POSITIVE_ELEMENTS = 3,
  FGM_STATUS_INCOMPATIBLE_SKETCH = 4,
  FGM_STATUS_IO = 5,
  FGM_STATUS_FORMAT = 6,
  FGM_STATUS_OUT_OF_RANGE = 7,
  FGM_STATUS_INTERNAL = 99,
} FgmStatus;

// Sketching parameters: `k`, seed, ball budget increment and hash/gamma
// threshold.
typedef struct FgmConfig FgmConfig;

// A finished sketch.
typedef struct FgmSketch FgmSketch;

// An ordered collection of named sketches sharing `k` and the seed; the
// unit of file I/O.
typedef struct FgmSketchSet FgmSketchSet;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *fgm_version(void);

// Copies the calling thread's last error message into `buf` (truncated and
// always NUL-terminated when `len > 0`). Returns the full message length
// excluding the terminator, or 0 when no error has been recorded.
//
// # Safety
// `buf` must be null or valid for `len` bytes of writes.
size_t fgm_last_error_message(char *buf, size_t len);

// Creates a configuration with `k` registers and the default ball budget
// increment (`k`) and threshold (`k/10`).
//
// # Safety
// `out` must be valid for writes.
enum FgmStatus fgm_config_new(uint32_t k, uint64_t global_seed, struct FgmConfig **out);

// Sets the hash/gamma threshold; must satisfy `0 <= phi < k`.
//
// # Safety
// `cfg` must be null or a live config handle.
enum FgmStatus fgm_config_set_phi(struct FgmConfig *cfg, double phi);

// Sets the per-round ball budget increment; must be at least 1.
//
// # Safety
// `cfg` must be null or a live config handle.
enum FgmStatus fgm_config_set_delta(struct FgmConfig *cfg, uint64_t delta);

// # Safety
// `cfg` must be null or a handle from [`fgm_config_new`] not yet freed.
void fgm_config_free(struct FgmConfig *cfg);

// Sketches the sparse vector given by `len` parallel `(indices, weights)`
// entries. Indices must be distinct and below `UINT32_MAX`; weights must be
// positive and finite.
//
// # Safety
// `cfg` must be a live config handle, `indices`/`weights` must each hold
// `len` values, and `out` must be valid for writes.
enum FgmStatus fgm_sketch_new(const struct FgmConfig *cfg,
                              const uint32_t *indices,
                              const double *weights,
                              size_t len,
                              struct FgmSketch **out);

// # Safety
// `sketch` must be null or a live sketch handle owned by the caller.
void fgm_sketch_free(struct FgmSketch *sketch);

// Number of registers, or 0 for a null handle.
//
// # Safety
// `sketch` must be null or a live sketch handle.
uint32_t fgm_sketch_k(const struct FgmSketch *sketch);

// Copies the `k` register indices into `s` and register values into `y`.
// Either output may be null to skip it; `len` must equal `k`.
//
// # Safety
// `sketch` must be a live sketch handle; non-null outputs must be valid for
// `len` writes.
enum FgmStatus fgm_sketch_registers(const struct FgmSketch *sketch,
                                    uint32_t *s,
                                    double *y,
                                    size_t len);

// Fraction of registers on which two sketches agree, an unbiased estimate of
// the probability Jaccard similarity of their vectors.
//
// # Safety
// `a` and `b` must be live sketch handles and `out` valid for writes.
enum FgmStatus fgm_sketch_similarity(const struct FgmSketch *a,
                                     const struct FgmSketch *b,
                                     double *out);

// Exact probability Jaccard similarity of two sparse vectors.
//
// # Safety
// Each index/weight array must hold its stated number of values; `out` must
// be valid for writes.
enum FgmStatus fgm_jaccard_p(const uint32_t *u_indices,
                             const double *u_weights,
                             size_t u_len,
                             const uint32_t *v_indices,
                             const double *v_weights,
                             size_t v_len,
                             double *out);

// Exact weighted Jaccard similarity of two sparse vectors.
//
// # Safety
// As for [`fgm_jaccard_p`].
enum FgmStatus fgm_jaccard_w(const uint32_t *u_indices,
                             const double *u_weights,
                             size_t u_len,
                             const uint32_t *v_indices,
                             const double *v_weights,
                             size_t v_len,
                             double *out);

// Creates an empty sketch set for sketches with `k` registers and `global_seed`.
//
// # Safety
// `out` must be valid for writes.
enum FgmStatus fgm_sketch_set_new(uint32_t k, uint64_t global_seed, struct FgmSketchSet **out);

// Reads a sketch file.
//
// # Safety
// `path` must be a NUL-terminated UTF-8 string and `out` valid for writes.
enum FgmStatus fgm_sketch_set_read(const char *path, struct FgmSketchSet **out);

// Writes a sketch file.
//
// # Safety
// `set` must be a live set handle and `path` a NUL-terminated UTF-8 string.
enum FgmStatus fgm_sketch_set_write(const struct FgmSketchSet *set, const char *path);

// Appends a copy of `sketch` under `id`. The sketch must match the set's `k`
// and seed.
//
// # Safety
// `set` and `sketch` must be live handles; `id` a NUL-terminated UTF-8 string.
enum FgmStatus fgm_sketch_set_push(struct FgmSketchSet *set,
                                   const char *id,
                                   const struct FgmSketch *sketch);

// Number of records, or 0 for a null handle.
//
// # Safety
// `set` must be null or a live set handle.
size_t fgm_sketch_set_len(const struct FgmSketchSet *set);

// Returns a new sketch handle holding a copy of record `index`; free it
// with [`fgm_sketch_free`].
//
// # Safety
// `set` must be a live set handle and `out` valid for writes.
enum FgmStatus fgm_sketch_set_get(const struct FgmSketchSet *set,
                                  size_t index,
                                  struct FgmSketch **out);

// Copies the id of record `index` into `buf` (truncated, NUL-terminated when
// `len > 0`) and stores its full byte length in `id_len`.
//
// # Safety
// `set` must be a live set handle, `buf` null or valid for `len` bytes, and
// `id_len` valid for writes.
enum FgmStatus fgm_sketch_set_id(const struct FgmSketchSet *set,
                                 size_t index,
                                 char *buf,
                                 size_t len,
                                 size_t *id_len);

// # Safety
// `set` must be null or a live set handle owned by the caller.
void fgm_sketch_set_free(struct FgmSketchSet *set);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FASTGM_H */
