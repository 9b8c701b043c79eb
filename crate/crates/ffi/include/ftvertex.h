#ifndef FTVERTEX_H
#define FTVERTEX_H

#include <stdbool.h>
#include <stddef.h>

typedef enum FtStatus {
  FT_STATUS_OK = 0,
  FT_STATUS_NULL_POINTER = 1,
  FT_STATUS_INVALID_ARGUMENT = 2,
  FT_STATUS_NOT_FREE_LIKE = 3,
  FT_STATUS_NOT_HERMITIAN = 4,
  FT_STATUS_SINGULAR = 5,
  FT_STATUS_NUMERICAL_FAILURE = 6,
  FT_STATUS_BUFFER_TOO_SMALL = 7,
  FT_STATUS_PANIC = 8,
} FtStatus;

typedef enum FtCase {
  FT_CASE_MINUS_J = 0,
  FT_CASE_PLUS_J = 1,
  FT_CASE_BALANCED = 2,
} FtCase;

/**
 * An approximating graph.
 */
typedef struct FtApproxGraph FtApproxGraph;

/**
 * A coupling in ST-form.
 */
typedef struct FtCoupling FtCoupling;

/**
 * An n x n scattering matrix.
 */
typedef struct FtScattering FtScattering;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `cap`). Returns the full message length without the NUL.
 */
size_t ft_last_error_message(char *buf, size_t cap);

/**
 * Creates a coupling from an `m x (n-m)` matrix `t`.
 */
enum FtStatus ft_coupling_new(size_t n,
                              size_t m,
                              const double *t,
                              size_t t_len,
                              struct FtCoupling **out);

/**
 * The free coupling of degree `n`.
 */
enum FtStatus ft_coupling_free_vertex(size_t n, struct FtCoupling **out);

void ft_coupling_destroy(struct FtCoupling *c);

/**
 * The k-independent scattering matrix of `c`.
 */
enum FtStatus ft_coupling_scattering(const struct FtCoupling *c, struct FtScattering **out);

/**
 * Scattering matrix at momentum `k` through the general (A, B) form.
 */
enum FtStatus ft_coupling_scattering_at_k(const struct FtCoupling *c,
                                          double k,
                                          struct FtScattering **out);

/**
 * Wraps an `n x n` matrix, checking unitarity within `tol`.
 */
enum FtStatus ft_scattering_new(size_t n,
                                const double *data,
                                size_t len,
                                double tol,
                                struct FtScattering **out);

/**
 * Matrix dimension, or 0 for a null handle.
 */
size_t ft_scattering_dim(const struct FtScattering *s);

/**
 * Writes the matrix to `buf` (`2 n^2` doubles, row-major, interleaved).
 */
enum FtStatus ft_scattering_copy(const struct FtScattering *s, double *buf, size_t len);

void ft_scattering_destroy(struct FtScattering *s);

enum FtStatus ft_scattering_is_freelike(const struct FtScattering *s, double tol, bool *out);

/**
 * Classifies a free-like matrix. `phases` receives `n - 1` values and
 * `permutation` receives `n` zero-based canonical positions.
 */
enum FtStatus ft_scattering_classify(const struct FtScattering *s,
                                     double tol,
                                     enum FtCase *case_out,
                                     size_t *p_out,
                                     double *phases,
                                     size_t phases_len,
                                     size_t *permutation,
                                     size_t permutation_len);

/**
 * Builds the approximating graph of `c` at scale `d`.
 */
enum FtStatus ft_approx_build(const struct FtCoupling *c, double d, struct FtApproxGraph **out);

/**
 * Number of connecting edges, or 0 for a null handle.
 */
size_t ft_approx_connector_count(const struct FtApproxGraph *g);

/**
 * Largest deviation of the graph's edge weights from those required by `c`.
 */
enum FtStatus ft_approx_reconstruction_residual(const struct FtApproxGraph *g,
                                                const struct FtCoupling *c,
                                                double *out);

/**
 * Scattering matrix of the graph at momentum `k`.
 */
enum FtStatus ft_approx_solve(const struct FtApproxGraph *g, double k, struct FtScattering **out);

void ft_approx_destroy(struct FtApproxGraph *g);

/**
 * Convergence study on `d_start * 2^-j`, `j < steps`. `errors` receives one
 * value per step (NaN where the solver failed) and `order` the fitted slope.
 */
enum FtStatus ft_convergence(const struct FtCoupling *c,
                             double k,
                             double d_start,
                             size_t steps,
                             double *errors,
                             size_t errors_len,
                             double *order);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FTVERTEX_H */
