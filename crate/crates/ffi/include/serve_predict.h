#ifndef SERVE_PREDICT_H
#define SERVE_PREDICT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SpModelKind {
  SP_MODEL_KIND_LR = 0,
  SP_MODEL_KIND_RF = 1,
  SP_MODEL_KIND_DT = 2,
  SP_MODEL_KIND_SVM = 3,
  SP_MODEL_KIND_NN = 4,
} SpModelKind;

typedef enum SpStatus {
  SP_STATUS_OK = 0,
  SP_STATUS_NULL_POINTER = 1,
  SP_STATUS_INVALID_ARGUMENT = 2,
  SP_STATUS_IO = 3,
  SP_STATUS_PARSE = 4,
  SP_STATUS_SHAPE = 5,
  SP_STATUS_UNSUPPORTED = 6,
  SP_STATUS_PANIC = 7,
} SpStatus;

/**
 * Cleaned and replayed charting data.
 */
typedef struct SpDataset SpDataset;

/**
 * Feature rows of one player from one side.
 */
typedef struct SpFeatureSet SpFeatureSet;

typedef struct SpModel SpModel;

/**
 * Parsed serve token. `direction` is 0 wide, 1 body, 2 T, -1 unknown.
 */
typedef struct SpServe {
  int32_t direction;
  bool is_in;
  bool is_ace;
} SpServe;

typedef struct SpAnxiety {
  double uncertainty;
  double hope;
  double fear;
  double anxiety;
} SpAnxiety;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *sp_last_error(void);

/**
 * # Safety
 * `token` must be a NUL-terminated string and `out` a valid pointer.
 */
enum SpStatus sp_parse_serve(const char *token, struct SpServe *out);

/**
 * Anxiety components for a score of `own` against `opp` with `target`
 * points, games or sets needed to win.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum SpStatus sp_anxiety(uint32_t own, uint32_t opp, uint32_t target, struct SpAnxiety *out);

/**
 * Loads, cleans and replays a matches/points file pair. `tour` is 0 for
 * both tours, 1 for men, 2 for women.
 *
 * # Safety
 * Paths must be NUL-terminated strings; `out` must be a valid pointer.
 */
enum SpStatus sp_dataset_load(const char *matches_path,
                              const char *points_path,
                              uint32_t tour,
                              struct SpDataset **out);

/**
 * # Safety
 * `ds` must be null or a handle from `sp_dataset_load`.
 */
size_t sp_dataset_match_count(const struct SpDataset *ds);

/**
 * # Safety
 * `ds` must be null or a handle from `sp_dataset_load`.
 */
size_t sp_dataset_point_count(const struct SpDataset *ds);

/**
 * # Safety
 * `ds` must be null or a handle from `sp_dataset_load` not yet freed.
 */
void sp_dataset_free(struct SpDataset *ds);

/**
 * Feature rows for `player` serving from the deuce (`side` 0) or ad (1) side.
 *
 * # Safety
 * `ds` must be a live dataset handle, `player` a NUL-terminated string and
 * `out` a valid pointer.
 */
enum SpStatus sp_features_for_player(const struct SpDataset *ds,
                                     const char *player,
                                     uint32_t side,
                                     struct SpFeatureSet **out);

/**
 * # Safety
 * `fs` must be null or a live feature-set handle.
 */
size_t sp_features_rows(const struct SpFeatureSet *fs);

/**
 * # Safety
 * `fs` must be null or a live feature-set handle.
 */
size_t sp_features_cols(const struct SpFeatureSet *fs);

/**
 * Copies the row-major feature matrix into `x` and labels into `y`.
 *
 * # Safety
 * `x` must hold `x_len` doubles and `y` `y_len` integers.
 */
enum SpStatus sp_features_copy(const struct SpFeatureSet *fs,
                               double *x,
                               size_t x_len,
                               uint32_t *y,
                               size_t y_len);

/**
 * # Safety
 * `fs` must be null or a live feature-set handle not yet freed.
 */
void sp_features_free(struct SpFeatureSet *fs);

/**
 * Trains a three-class model with default hyperparameters. Labels are
 * 0 wide, 1 body, 2 T.
 *
 * # Safety
 * `x` must hold `rows * cols` doubles, `y` `rows` labels; `out` must be valid.
 */
enum SpStatus sp_model_train(enum SpModelKind kind,
                             const double *x,
                             size_t rows,
                             size_t cols,
                             const uint32_t *y,
                             uint64_t seed,
                             struct SpModel **out);

/**
 * # Safety
 * `model` must be a live handle; `x` must hold `rows * cols` doubles and
 * `out` `rows` integers.
 */
enum SpStatus sp_model_predict(const struct SpModel *model,
                               const double *x,
                               size_t rows,
                               size_t cols,
                               uint32_t *out);

/**
 * # Safety
 * `model` must be a live handle and `path` a NUL-terminated string.
 */
enum SpStatus sp_model_save(const struct SpModel *model, const char *path);

/**
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum SpStatus sp_model_load(const char *path, struct SpModel **out);

/**
 * Writes normalized importances (column order) into `out`. Only tree and
 * forest models support this.
 *
 * # Safety
 * `model` must be a live handle and `out` must hold `len` doubles.
 */
enum SpStatus sp_model_importance(const struct SpModel *model, double *out, size_t len);

/**
 * # Safety
 * `model` must be null or a live handle not yet freed.
 */
void sp_model_free(struct SpModel *model);

/**
 * Runs the full experiment described by a key-value config file and writes
 * its reports.
 *
 * # Safety
 * `config_path` must be a NUL-terminated string.
 */
enum SpStatus sp_run_experiment(const char *config_path);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SERVE_PREDICT_H */
