#ifndef OSSERMAN_LAB_H
#define OSSERMAN_LAB_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

// Status codes.
typedef enum OlStatus {
  OL_STATUS_OK = 0,
  OL_STATUS_NULL_POINTER = 1,
  OL_STATUS_INVALID_ARGUMENT = 2,
  OL_STATUS_DIMENSION_MISMATCH = 3,
  OL_STATUS_UNSUPPORTED = 4,
  OL_STATUS_NOT_CONVERGED = 5,
  OL_STATUS_FAILED = 6,
  OL_STATUS_BUFFER_TOO_SMALL = 7,
  OL_STATUS_PANIC = 8,
} OlStatus;

// Clifford system handle.
typedef struct OlCliffordSystem OlCliffordSystem;

// Algebraic curvature tensor handle.
typedef struct OlCurvTensor OlCurvTensor;

// Result of [`ol_tensor_osserman`].
typedef struct OlOssermanSummary {
  bool is_osserman;
  double max_spectrum_deviation;
  size_t samples_used;
  // Number of eigenvalue clusters of the reference Jacobi operator.
  size_t distinct_eigenvalues;
} OlOssermanSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Copy of the last error message on this thread, or null. Free with
// [`ol_string_free`].
char *ol_last_error_message(void);

// # Safety
// `s` must be null or a string returned by this library, not yet freed.
void ol_string_free(char *s);

// Radon–Hurwitz number `ρ(n) − 1`; 0 for `n = 0`.
size_t ol_radon_bound(size_t n);

// Dimension of an irreducible `Cl(ν)` module.
size_t ol_min_module_dim(size_t nu);

// Builds a Clifford system. `eta` holds `nu` constants; the generators are
// conjugated by a seeded orthogonal matrix when `use_seed` is true.
//
// # Safety
// `eta` must point to `eta_len` doubles (or be null with `eta_len = 0`);
// `out` must be writable.
enum OlStatus ol_clifford_generate(size_t n,
                                   size_t nu,
                                   double lambda0,
                                   const double *eta,
                                   size_t eta_len,
                                   uint64_t seed,
                                   bool use_seed,
                                   struct OlCliffordSystem **out);

// Parses a Clifford system from its JSON form.
//
// # Safety
// `json` must be a NUL-terminated string; `out` must be writable.
enum OlStatus ol_clifford_from_json(const char *json, struct OlCliffordSystem **out);

// # Safety
// `sys` must be a live handle; `out` must be writable.
enum OlStatus ol_clifford_to_json(const struct OlCliffordSystem *sys, char **out);

// # Safety
// `sys` must be null or a handle not yet freed.
void ol_clifford_free(struct OlCliffordSystem *sys);

// # Safety
// `sys` must be null or a live handle. Returns 0 for null.
size_t ol_clifford_dim(const struct OlCliffordSystem *sys);

// # Safety
// `sys` must be null or a live handle. Returns 0 for null.
size_t ol_clifford_nu(const struct OlCliffordSystem *sys);

// Writes generator `index` row-major into `out` (`n²` doubles).
//
// # Safety
// `sys` must be a live handle; `out` must hold `out_len` doubles.
enum OlStatus ol_clifford_generator(const struct OlCliffordSystem *sys,
                                    size_t index,
                                    double *out,
                                    size_t out_len);

// Checks the Clifford relations; `passed` receives the verdict.
//
// # Safety
// `sys` must be a live handle; `passed` must be writable.
enum OlStatus ol_clifford_validate(const struct OlCliffordSystem *sys, bool *passed);

// Completes a system on R^8 to seven generators.
//
// # Safety
// `sys` must be a live handle; `out` must be writable.
enum OlStatus ol_clifford_extend_to_seven(const struct OlCliffordSystem *sys,
                                          double xi,
                                          uint64_t seed,
                                          struct OlCliffordSystem **out);

// Curvature tensor of a Clifford system.
//
// # Safety
// `sys` must be a live handle; `out` must be writable.
enum OlStatus ol_tensor_from_clifford(const struct OlCliffordSystem *sys,
                                      struct OlCurvTensor **out);

// Rank-one model tensor with `eps = ±1`.
//
// # Safety
// `sys` must be a live handle; `out` must be writable.
enum OlStatus ol_tensor_model(const struct OlCliffordSystem *sys,
                              double eps,
                              struct OlCurvTensor **out);

// Constant sectional curvature `lambda` on R^n.
//
// # Safety
// `out` must be writable.
enum OlStatus ol_tensor_constant_curvature(size_t n, double lambda, struct OlCurvTensor **out);

// Tensor from `n⁴` components `R_ijkl` at `((i·n + j)·n + k)·n + l`,
// projected onto the curvature symmetries.
//
// # Safety
// `data` must point to `len` doubles; `out` must be writable.
enum OlStatus ol_tensor_from_components(size_t n,
                                        const double *data,
                                        size_t len,
                                        struct OlCurvTensor **out);

// # Safety
// `t` must be null or a handle not yet freed.
void ol_tensor_free(struct OlCurvTensor *t);

// # Safety
// `t` must be null or a live handle. Returns 0 for null.
size_t ol_tensor_dim(const struct OlCurvTensor *t);

// Writes the `n⁴` components.
//
// # Safety
// `t` must be a live handle; `out` must hold `out_len` doubles.
enum OlStatus ol_tensor_components(const struct OlCurvTensor *t, double *out, size_t out_len);

// Weyl tensor as a new handle.
//
// # Safety
// `t` must be a live handle; `out` must be writable.
enum OlStatus ol_tensor_weyl(const struct OlCurvTensor *t, struct OlCurvTensor **out);

// Ricci tensor, row-major `n²`.
//
// # Safety
// `t` must be a live handle; `out` must hold `out_len` doubles.
enum OlStatus ol_tensor_ricci(const struct OlCurvTensor *t, double *out, size_t out_len);

// # Safety
// `t` must be a live handle; `out` must be writable.
enum OlStatus ol_tensor_scalar(const struct OlCurvTensor *t, double *out);

// Jacobi operator `R_X`, row-major `n²`.
//
// # Safety
// `t` must be a live handle; `x` must hold `x_len` doubles; `out` must hold
// `out_len` doubles.
enum OlStatus ol_tensor_jacobi(const struct OlCurvTensor *t,
                               const double *x,
                               size_t x_len,
                               double *out,
                               size_t out_len);

// Osserman check over seeded directions; `sys` may be null.
//
// # Safety
// `t` must be a live handle, `sys` null or a live handle, `out` writable.
enum OlStatus ol_tensor_osserman(const struct OlCurvTensor *t,
                                 const struct OlCliffordSystem *sys,
                                 size_t samples,
                                 uint64_t seed,
                                 struct OlOssermanSummary *out);

// Tensor JSON document `{ "n", "R" }`.
//
// # Safety
// `t` must be a live handle; `out` must be writable.
enum OlStatus ol_tensor_to_json(const struct OlCurvTensor *t, char **out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* OSSERMAN_LAB_H */
