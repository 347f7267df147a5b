#ifndef GAUSS_HARDY_H
#define GAUSS_HARDY_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum GhStatus {
  GH_STATUS_OK = 0,
  GH_STATUS_NULL_POINTER = 1,
  GH_STATUS_INVALID_INPUT = 2,
  GH_STATUS_NOT_IN_HARDY_SPACE = 3,
  GH_STATUS_FAILED = 4,
  GH_STATUS_PANIC = 5,
} GhStatus;

// An atomic decomposition together with the function it was built from.
typedef struct GhDecomposition GhDecomposition;

// A represented function.
typedef struct GhFunction GhFunction;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failure on this thread, or NULL. Owned by the library.
const char *gh_last_error(void);

// Parses a JSON function spec (`{"dim":…, "kind":…, "data":…}`).
//
// # Safety
// `json` must be a NUL-terminated string and `out` a valid pointer.
enum GhStatus gh_function_from_json(const char *json, struct GhFunction **out);

// # Safety
// `f` must come from `gh_function_from_json` or be NULL.
void gh_function_free(struct GhFunction *f);

// Dimension of the function, 0 for NULL.
//
// # Safety
// `f` must be a live handle or NULL.
size_t gh_function_dim(const struct GhFunction *f);

// # Safety
// `x` must point to `len` doubles, `len` equal to the dimension.
enum GhStatus gh_function_eval(const struct GhFunction *f,
                               const double *x,
                               size_t len,
                               double *out);

// ‖f‖ in L^p(γ), p ≥ 1 or +∞.
//
// # Safety
// `f` must be a live handle and `out` valid.
enum GhStatus gh_lp_norm(const struct GhFunction *f, double p, double *out);

// ‖M̂_loc f‖ in L^p(γ) on the adaptive grid with `per_unit` cells per
// admissible radius and the standard dictionary.
//
// # Safety
// `f` must be a live handle and `out` valid.
enum GhStatus gh_maximal_norm(const struct GhFunction *f, size_t per_unit, double p, double *out);

// The one-dimensional functional E(f). `divergent` receives 1 when the
// truncations grow.
//
// # Safety
// `f` must be a live handle; `out` and `divergent` valid.
enum GhStatus gh_e_functional(const struct GhFunction *f, double *out, int32_t *divergent);

// E₊(f) = ∫|x|²|f| dγ.
//
// # Safety
// `f` must be a live handle and `out` valid.
enum GhStatus gh_e_plus(const struct GhFunction *f, double *out);

// Atomic decomposition. Returns `NOT_IN_HARDY_SPACE` when a truncated
// necessary condition diverges.
//
// # Safety
// `f` must be a live handle and `out` valid.
enum GhStatus gh_decompose(const struct GhFunction *f, struct GhDecomposition **out);

// # Safety
// `d` must come from `gh_decompose` or be NULL.
void gh_decomposition_free(struct GhDecomposition *d);

// Number of atoms, 0 for NULL.
//
// # Safety
// `d` must be a live handle or NULL.
size_t gh_decomposition_len(const struct GhDecomposition *d);

// Coefficient of atom `index`.
//
// # Safety
// `d` must be a live handle and `out` valid.
enum GhStatus gh_decomposition_coefficient(const struct GhDecomposition *d,
                                           size_t index,
                                           double *out);

// Σ|λ_j| over the decomposition.
//
// # Safety
// `d` must be a live handle and `out` valid.
enum GhStatus gh_decomposition_norm(const struct GhDecomposition *d, double *out);

// Value of Σ λ_j a_j at `x`.
//
// # Safety
// `x` must point to `len` doubles; `out` valid.
enum GhStatus gh_decomposition_eval(const struct GhDecomposition *d,
                                    const double *x,
                                    size_t len,
                                    double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GAUSS_HARDY_H */
