#ifndef SFVEM_H
#define SFVEM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SfvemStatus {
  SFVEM_STATUS_OK = 0,
  SFVEM_STATUS_NULL_POINTER = 1,
  SFVEM_STATUS_INVALID_ARGUMENT = 2,
  SFVEM_STATUS_UNSUPPORTED_DEGREE = 3,
  SFVEM_STATUS_INVALID_LEVEL = 4,
  SFVEM_STATUS_NOT_POSITIVE_DEFINITE = 5,
  SFVEM_STATUS_NO_CONVERGENCE = 6,
  SFVEM_STATUS_NUMERICAL = 7,
  SFVEM_STATUS_IO = 8,
  SFVEM_STATUS_PANIC = 9,
} SfvemStatus;

/**
 * Generated mesh.
 */
typedef struct SfvemMesh SfvemMesh;

/**
 * Result of a convergence study.
 */
typedef struct SfvemReport SfvemReport;

/**
 * One level of a report. `kappa` is NaN when it was not requested.
 */
typedef struct SfvemRow {
  size_t level;
  size_t dofs;
  double l2;
  double l2_order;
  double h1;
  double h1_order;
  double kappa;
} SfvemRow;

/**
 * Message of the last failed call on this thread, or NULL after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *sfvem_last_error(void);

/**
 * Generates level `level` of a mesh family (`"uniform"` or `"irregular8"`).
 *
 * # Safety
 * `family` must be a NUL-terminated string and `out` a writable pointer.
 */
enum SfvemStatus sfvem_mesh_generate(const char *family, size_t level, struct SfvemMesh **out);

/**
 * # Safety
 * `mesh` must come from [`sfvem_mesh_generate`] and not be freed yet; NULL is ignored.
 */
void sfvem_mesh_free(struct SfvemMesh *mesh);

/**
 * Vertex and triangle counts.
 *
 * # Safety
 * `mesh` must be a live handle; the outputs must be writable.
 */
enum SfvemStatus sfvem_mesh_sizes(const struct SfvemMesh *mesh,
                                  size_t *vertices,
                                  size_t *triangles);

/**
 * Copies vertex coordinates as `x0 y0 x1 y1 ...` into `coords` (length `2 * vertices`)
 * and triangle vertex indices into `tris` (length `3 * triangles`).
 *
 * # Safety
 * `mesh` must be a live handle and the buffers at least `len` entries long.
 */
enum SfvemStatus sfvem_mesh_copy(const struct SfvemMesh *mesh,
                                 double *coords,
                                 size_t coords_len,
                                 size_t *tris,
                                 size_t tris_len);

/**
 * Runs a convergence study against the sine solution. `config` holds
 * `key=value` lines (`method`, `k`, `mesh`, `levels`, `alpha`, `dof-mode`,
 * `harmonic-degrees`, `source`, `kappa`, `tol`, `solver`); unset keys keep
 * their defaults. Timing is off unless `timing=true` is given.
 *
 * # Safety
 * `config` must be a NUL-terminated string and `out` a writable pointer.
 */
enum SfvemStatus sfvem_run(const char *config, struct SfvemReport **out);

/**
 * # Safety
 * `report` must come from [`sfvem_run`] and not be freed yet; NULL is ignored.
 */
void sfvem_report_free(struct SfvemReport *report);

/**
 * # Safety
 * `report` must be a live handle and `rows` writable.
 */
enum SfvemStatus sfvem_report_len(const struct SfvemReport *report, size_t *rows);

/**
 * # Safety
 * `report` must be a live handle and `row` writable.
 */
enum SfvemStatus sfvem_report_row(const struct SfvemReport *report,
                                  size_t index,
                                  struct SfvemRow *row);

/**
 * The report as CSV; release with [`sfvem_string_free`].
 *
 * # Safety
 * `report` must be a live handle and `out` writable.
 */
enum SfvemStatus sfvem_report_csv(const struct SfvemReport *report, char **out);

/**
 * # Safety
 * `s` must come from this library and not be freed yet; NULL is ignored.
 */
void sfvem_string_free(char *s);

#endif  /* SFVEM_H */
