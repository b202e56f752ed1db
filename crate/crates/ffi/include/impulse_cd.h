#ifndef IMPULSE_CD_H
#define IMPULSE_CD_H

#pragma once

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum IcdStatus {
  ICD_STATUS_OK = 0,
  ICD_STATUS_NULL_POINTER = 1,
  ICD_STATUS_INVALID_ARGUMENT = 2,
  ICD_STATUS_NUMERICAL_FAILURE = 3,
  ICD_STATUS_OUT_OF_RANGE = 4,
  ICD_STATUS_PANIC = 5,
} IcdStatus;

typedef enum IcdMode {
  ICD_MODE_NONE = 0,
  ICD_MODE_FULL = 1,
  ICD_MODE_IMPULSE = 2,
  ICD_MODE_WINDOW = 3,
} IcdMode;

// Opaque model handle.
typedef struct IcdModel IcdModel;

// Opaque result handle.
typedef struct IcdRun IcdRun;

// Options for [`icd_run`]. Zero/non-positive fields select the defaults.
typedef struct IcdRunOptions {
  enum IcdMode mode;
  // Window half-width, used only with `ICD_MODE_WINDOW`.
  double eta;
  double steepness;
  uint64_t steps;
  uint32_t samples;
} IcdRunOptions;

typedef struct IcdCosts {
  double cost;
  double delta_e;
  double ratio;
  // NaN when the model has no geometric bound.
  double lower_bound;
} IcdCosts;

typedef struct IcdSample {
  double t;
  double fidelity;
  double switching;
  double norm_drift;
} IcdSample;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Landau-Zener model `Δσx + g(t)σz` ramped from `g0` to `-g0`.
//
// # Safety
// `out` must be a valid pointer to writable storage for one handle.
enum IcdStatus icd_model_new_lz(double delta, double g0, double tau_q, struct IcdModel **out);

// Ising chain as `n/2` momentum modes, ramped from `g0` through `g = 1`.
//
// # Safety
// `out` must be a valid pointer to writable storage for one handle.
enum IcdStatus icd_model_new_tfim_momentum(uint32_t n,
                                           double omega,
                                           double g0,
                                           double tau_q,
                                           struct IcdModel **out);

// Dense spin-basis Ising chain with counterdiabatic range `trunc`
// (`1..=n/2`).
//
// # Safety
// `out` must be a valid pointer to writable storage for one handle.
enum IcdStatus icd_model_new_tfim_spin(uint32_t n,
                                       double omega,
                                       double g0,
                                       double tau_q,
                                       uint32_t trunc,
                                       struct IcdModel **out);

// # Safety
// `model` must be null or a handle from `icd_model_new_*` not yet freed.
void icd_model_free(struct IcdModel *model);

// Adiabatic-impulse crossover times `t_-`, `t_+`.
//
// # Safety
// `model` must be a live handle; `t_minus` and `t_plus` must be writable.
enum IcdStatus icd_model_window(const struct IcdModel *model, double *t_minus, double *t_plus);

// Default run options: impulse control with model defaults.
struct IcdRunOptions icd_run_options_default(void);

// Simulates the model and computes its costs. `opts` may be null for
// defaults.
//
// # Safety
// `model` must be a live handle, `opts` null or valid, `out` writable.
enum IcdStatus icd_run(const struct IcdModel *model,
                       const struct IcdRunOptions *opts,
                       struct IcdRun **out);

// # Safety
// `run` must be null or a handle from [`icd_run`] not yet freed.
void icd_run_free(struct IcdRun *run);

// Final ground-state fidelity, or NaN for a null handle.
//
// # Safety
// `run` must be null or a live handle.
double icd_run_final_fidelity(const struct IcdRun *run);

// Control window used by the run.
//
// # Safety
// `run` must be a live handle; `t_minus` and `t_plus` must be writable.
enum IcdStatus icd_run_window(const struct IcdRun *run, double *t_minus, double *t_plus);

// # Safety
// `run` must be a live handle and `out` writable.
enum IcdStatus icd_run_costs(const struct IcdRun *run, struct IcdCosts *out);

// Number of trace samples, or 0 for a null handle.
//
// # Safety
// `run` must be null or a live handle.
uintptr_t icd_run_trace_len(const struct IcdRun *run);

// # Safety
// `run` must be a live handle and `out` writable.
enum IcdStatus icd_run_trace_sample(const struct IcdRun *run,
                                    uintptr_t index,
                                    struct IcdSample *out);

// Message for the last failed call on this thread, or null. The pointer is
// valid until the next `icd_*` call on the same thread.
const char *icd_last_error(void);

// Static, NUL-terminated version string.
const char *icd_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* IMPULSE_CD_H */
