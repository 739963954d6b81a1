#ifndef RDP_DBAR_H
#define RDP_DBAR_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum RdpMethod {
  RDP_METHOD_DIRECT = 0,
  RDP_METHOD_TABLE = 1,
} RdpMethod;

// Status codes returned by every entry point.
typedef enum RdpStatus {
  RDP_STATUS_OK = 0,
  RDP_STATUS_NULL_POINTER = 1,
  RDP_STATUS_INVALID_ARGUMENT = 2,
  RDP_STATUS_OFF_SURFACE = 3,
  RDP_STATUS_OUTSIDE_DOMAIN = 4,
  RDP_STATUS_NOT_CLOSED = 5,
  RDP_STATUS_NOT_CONVERGED = 6,
  RDP_STATUS_NOT_INVARIANT = 7,
  RDP_STATUS_NON_FINITE = 8,
  RDP_STATUS_BUFFER_TOO_SMALL = 9,
  RDP_STATUS_INTERNAL = 10,
} RdpStatus;

typedef enum RdpSurface {
  RDP_SURFACE_A = 0,
  RDP_SURFACE_D = 1,
} RdpSurface;

// Opaque solution handle.
typedef struct RdpSolution RdpSolution;

// Both sides of an inequality and the normalized margin
// `(lhs - rhs) / max(lhs, rhs)`.
typedef struct RdpMargin {
  double lhs;
  double rhs;
  double margin;
} RdpMargin;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Copies the last error message of this thread into `buf` (NUL
// terminated, truncated to `len`). Returns the full message length.
//
// # Safety
// `buf` must be null or point to `len` writable bytes.
uintptr_t rdp_last_error_message(char *buf, uintptr_t len);

// Library version as a static NUL-terminated string.
const char *rdp_version(void);

// Solves a shipped manufactured case (`"zero"`, `"bump_u0"`, `"bump_u3"`)
// on the ball of radius `radius` and stores a new handle in `*out`.
// `grid` of 0 picks the default lattice. The oracle error is measured on
// `samples` seeded points.
//
// # Safety
// `case_name` must be a valid C string and `out` a valid pointer.
enum RdpStatus rdp_solve_case(enum RdpSurface surface,
                              uint32_t n,
                              double radius,
                              const char *case_name,
                              uint32_t grid,
                              enum RdpMethod method,
                              uint32_t samples,
                              uint64_t seed,
                              struct RdpSolution **out);

// Evaluates the solution at a surface point given as six doubles
// `(re x1, im x1, re x2, im x2, re x3, im x3)`; writes `(re, im)` to `out`.
//
// # Safety
// `sol` must come from [`rdp_solve_case`]; `x` must hold 6 doubles and
// `out` room for 2.
enum RdpStatus rdp_solution_eval(const struct RdpSolution *sol, const double *x, double *out);

// Relative sup error against the exact solution measured at solve time.
//
// # Safety
// `sol` must come from [`rdp_solve_case`] and `out` be valid.
enum RdpStatus rdp_solution_oracle_error(const struct RdpSolution *sol, double *out);

// Releases a solution handle. Null is ignored.
//
// # Safety
// `sol` must come from [`rdp_solve_case`] and not be used afterwards.
void rdp_solution_free(struct RdpSolution *sol);

// Distance inequality for the degree 2 quotient at plane points `z`,
// `zeta` (4 doubles each).
//
// # Safety
// `z` and `zeta` must hold 4 doubles, `out` must be valid.
enum RdpStatus rdp_check_a2(const double *z, const double *zeta, struct RdpMargin *out);

// Distance inequality for the degree `n` quotient map with exponent
// `delta`.
//
// # Safety
// `z` and `zeta` must hold 4 doubles, `out` must be valid.
enum RdpStatus rdp_check_general(uint32_t n,
                                 uint32_t delta,
                                 const double *z,
                                 const double *zeta,
                                 struct RdpMargin *out);

// Ball form of the distance inequality on `B_radius`.
//
// # Safety
// `z` and `zeta` must hold 4 doubles, `out` must be valid.
enum RdpStatus rdp_check_ball(uint32_t n,
                              double radius,
                              const double *z,
                              const double *zeta,
                              struct RdpMargin *out);

// Index set `J` for `a`, `s` (2 doubles each). Writes up to `cap` indices
// to `out` and the full count to `*len`; returns `BUFFER_TOO_SMALL` if
// `cap` was insufficient.
//
// # Safety
// `a`, `s` must hold 2 doubles, `out` room for `cap` values, `len` valid.
enum RdpStatus rdp_build_j(uint32_t n,
                           const double *a,
                           const double *s,
                           uint32_t *out,
                           uintptr_t cap,
                           uintptr_t *len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RDP_DBAR_H */
