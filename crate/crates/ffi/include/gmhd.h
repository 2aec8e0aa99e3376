#ifndef GMHD_H
#define GMHD_H

/* Generated by cbindgen from crates/ffi/src. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Number of values written by [`gmhd_simulation_diagnostics`].
 */
#define GMHD_DIAGNOSTICS_COLUMNS 25

typedef enum GmhdStatus {
  GMHD_STATUS_OK = 0,
  GMHD_STATUS_NULL_POINTER = 1,
  GMHD_STATUS_INVALID_ARGUMENT = 2,
  GMHD_STATUS_KERNEL = 3,
  GMHD_STATUS_CONFIG = 4,
  GMHD_STATUS_BLOWUP = 5,
  GMHD_STATUS_BUFFER_TOO_SMALL = 6,
  GMHD_STATUS_INTERNAL = 7,
} GmhdStatus;

typedef enum GmhdVerdict {
  GMHD_VERDICT_ADMISSIBLE = 0,
  GMHD_VERDICT_WEAK_ONLY = 1,
  GMHD_VERDICT_REJECTED = 2,
} GmhdVerdict;

typedef struct GmhdProfile GmhdProfile;

typedef struct GmhdSimulation GmhdSimulation;

typedef struct GmhdSymbol GmhdSymbol;

/**
 * Result of [`gmhd_profile_validate`]. `doubling_constant` is negative when absent and
 * `dini_integral` is +inf when divergent.
 */
typedef struct GmhdValidationReport {
  bool monotone_ok;
  double doubling_constant;
  double dini_integral;
  bool limit_zero_ok;
  enum GmhdVerdict verdict;
} GmhdValidationReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message of this thread, NUL terminated and truncated to `cap` bytes.
 * Returns the full message length excluding the terminator.
 *
 * # Safety
 * `buf` must be null or point to `cap` writable bytes.
 */
size_t gmhd_last_error_message(char *buf, size_t cap);

/**
 * Static, NUL-terminated name of diagnostics column `index`, or null when out of range.
 */
const char *gmhd_diagnostics_column_name(size_t index);

/**
 * m(r) = r^{2α}.
 *
 * # Safety
 * `out` must be a valid pointer to a handle slot.
 */
enum GmhdStatus gmhd_profile_power_law(double alpha, bool override_weak, struct GmhdProfile **out);

/**
 * m(r) = [log(e + 1/r)]^{−(1+eps1)} [1 + log(1 + r)]^{1+eps2}.
 *
 * # Safety
 * `out` must be a valid pointer to a handle slot.
 */
enum GmhdStatus gmhd_profile_log_weak(double eps1,
                                      double eps2,
                                      bool override_weak,
                                      struct GmhdProfile **out);

/**
 * Profile interpolated log-log through `len` samples (radii strictly increasing, values positive).
 *
 * # Safety
 * `radii` and `values` must point to `len` readable doubles; `out` to a handle slot.
 */
enum GmhdStatus gmhd_profile_tabulated(const double *radii,
                                       const double *values,
                                       size_t len,
                                       bool override_weak,
                                       struct GmhdProfile **out);

/**
 * # Safety
 * `p` must be null or a handle from a `gmhd_profile_*` constructor, not yet freed.
 */
void gmhd_profile_free(struct GmhdProfile *p);

/**
 * # Safety
 * `p` must be a live profile handle and `out` writable.
 */
enum GmhdStatus gmhd_profile_evaluate(const struct GmhdProfile *p, double r, double *out);

/**
 * # Safety
 * `p` must be a live profile handle and `out` writable.
 */
enum GmhdStatus gmhd_profile_validate(const struct GmhdProfile *p,
                                      struct GmhdValidationReport *out);

/**
 * σ at each of the `len` wavenumbers; fails with `GMHD_STATUS_KERNEL` for rejected profiles.
 *
 * # Safety
 * `p` must be a live profile handle, `kappas` must point to `len` doubles, `out` to a handle slot.
 */
enum GmhdStatus gmhd_symbol_compute(const struct GmhdProfile *p,
                                    const double *kappas,
                                    size_t len,
                                    struct GmhdSymbol **out);

/**
 * Number of distinct wavenumbers held by the symbol.
 *
 * # Safety
 * `s` must be a live symbol handle and `out` writable.
 */
enum GmhdStatus gmhd_symbol_len(const struct GmhdSymbol *s, size_t *out);

/**
 * σ(kappa) for a wavenumber the symbol was computed at.
 *
 * # Safety
 * `s` must be a live symbol handle and `out` writable.
 */
enum GmhdStatus gmhd_symbol_get(const struct GmhdSymbol *s, double kappa, double *out);

/**
 * Copies the sorted wavenumbers and their σ into two arrays of capacity `cap`.
 *
 * # Safety
 * `s` must be a live symbol handle; `kappas` and `sigmas` must each hold `cap` doubles.
 */
enum GmhdStatus gmhd_symbol_values(const struct GmhdSymbol *s,
                                   double *kappas,
                                   double *sigmas,
                                   size_t cap);

/**
 * # Safety
 * `s` must be null or a handle from [`gmhd_symbol_compute`], not yet freed.
 */
void gmhd_symbol_free(struct GmhdSymbol *s);

/**
 * C(α) κ^{2α}, the exact symbol of the power-law profile.
 *
 * # Safety
 * `out` must be writable.
 */
enum GmhdStatus gmhd_closed_form_symbol(double alpha, double kappa, double *out);

/**
 * Builds a simulation at t = 0 from a TOML run configuration (the same format the CLI reads).
 *
 * # Safety
 * `config_toml` must be a NUL-terminated UTF-8 string and `out` a handle slot.
 */
enum GmhdStatus gmhd_simulation_new(const char *config_toml, struct GmhdSimulation **out);

/**
 * # Safety
 * `s` must be null or a handle from [`gmhd_simulation_new`], not yet freed.
 */
void gmhd_simulation_free(struct GmhdSimulation *s);

/**
 * One CFL-limited step. On `GMHD_STATUS_BLOWUP` the state is left at the last valid time.
 *
 * # Safety
 * `s` must be a live simulation handle.
 */
enum GmhdStatus gmhd_simulation_step(struct GmhdSimulation *s);

/**
 * Steps until the time reaches `t_end` exactly; the number of steps taken goes to `steps` if non-null.
 *
 * # Safety
 * `s` must be a live simulation handle; `steps` null or writable.
 */
enum GmhdStatus gmhd_simulation_advance(struct GmhdSimulation *s,
                                        double t_end,
                                        uint64_t *steps);

/**
 * # Safety
 * `s` must be a live simulation handle and `out` writable.
 */
enum GmhdStatus gmhd_simulation_time(const struct GmhdSimulation *s, double *out);

/**
 * Grid points per side.
 *
 * # Safety
 * `s` must be a live simulation handle and `out` writable.
 */
enum GmhdStatus gmhd_simulation_grid_size(const struct GmhdSimulation *s, size_t *out);

/**
 * Writes the current diagnostics record, in CSV column order, into `GMHD_DIAGNOSTICS_COLUMNS`
 * doubles. `bkm_integral` is accumulated over every step taken through this handle.
 *
 * # Safety
 * `s` must be a live simulation handle; `out` must hold `cap` doubles.
 */
enum GmhdStatus gmhd_simulation_diagnostics(const struct GmhdSimulation *s,
                                            double *out,
                                            size_t cap);

/**
 * Real-space ω and j, n² values each, row-major with x2 as the row index.
 *
 * # Safety
 * `s` must be a live simulation handle; `omega` and `j` must each hold `cap` doubles.
 */
enum GmhdStatus gmhd_simulation_fields(const struct GmhdSimulation *s,
                                       double *omega,
                                       double *j,
                                       size_t cap);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* GMHD_H */
