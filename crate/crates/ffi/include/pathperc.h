#ifndef PATHPERC_H
#define PATHPERC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PpStatus {
  PP_STATUS_OK = 0,
  PP_STATUS_NULL_POINTER = 1,
  PP_STATUS_INVALID_ARGUMENT = 2,
  PP_STATUS_NOT_CONVERGED = 3,
  PP_STATUS_BUFFER_TOO_SMALL = 4,
  PP_STATUS_PANIC = 5,
  PP_STATUS_INTERNAL = 6,
} PpStatus;

typedef enum PpTopology {
  PP_TOPOLOGY_UST = 0,
  PP_TOPOLOGY_ER = 1,
  PP_TOPOLOGY_HONEYCOMB = 2,
  PP_TOPOLOGY_COMPLETE = 3,
  PP_TOPOLOGY_SATELLITE = 4,
} PpTopology;

typedef enum PpScheme {
  PP_SCHEME_CROSS_LINKING = 0,
  PP_SCHEME_DOWNLINK = 1,
  PP_SCHEME_REDUNDANCY = 2,
} PpScheme;

typedef enum PpKernel {
  PP_KERNEL_ASYMPTOTIC_HALF = 0,
  PP_KERNEL_PER_PARENT = 1,
  PP_KERNEL_EXACT_UST = 2,
} PpKernel;

// Opaque simulation handle.
typedef struct PpSimulation PpSimulation;

// One simulation step as seen from C.
typedef struct PpStepRecord {
  uint64_t step;
  uint64_t removed_path_length;
  uint64_t links_added;
  uint64_t n_components;
  uint64_t s_max;
  double eta;
} PpStepRecord;

typedef struct PpMomentReport {
  double tau;
  uint64_t s_max;
  double k_exact;
  double k_asym;
  double alpha_star_exact;
  double alpha_star_asym;
  double alpha_star_balance;
} PpMomentReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *pp_version(void);

// Copies the calling thread's last error message into `buf` (NUL
// terminated, truncated to `len - 1` bytes) and returns the full message
// length in bytes. Empty after a successful call.
//
// # Safety
// `buf` must be null or valid for `len` bytes.
size_t pp_last_error_message(char *buf, size_t len);

// Creates a simulation on a freshly generated topology. `mean_degree` is
// read only for ER topologies. Downlink uses the default ground disk and
// resamples failed transmissions when `resample_rejects` is nonzero.
//
// # Safety
// `out` must be valid for one pointer write.
enum PpStatus pp_simulation_new(enum PpTopology topology,
                                size_t n,
                                double mean_degree,
                                enum PpScheme scheme,
                                double alpha,
                                int32_t resample_rejects,
                                uint64_t seed,
                                struct PpSimulation **out);

// Releases a handle from [`pp_simulation_new`]. Null is ignored.
//
// # Safety
// `sim` must be null or a live handle not used afterwards.
void pp_simulation_free(struct PpSimulation *sim);

// Advances `steps` steps and stores the last step's record in `last`
// (which may be null).
//
// # Safety
// `sim` must be a live handle; `last` null or valid for one write.
enum PpStatus pp_simulation_step(struct PpSimulation *sim,
                                 uint64_t steps,
                                 struct PpStepRecord *last);

// Current availability of the simulated network.
//
// # Safety
// `sim` must be a live handle; `eta` valid for one write.
enum PpStatus pp_simulation_availability(const struct PpSimulation *sim, double *eta);

// Writes the component sizes (in no particular order) into `buf` and the
// component count into `count`. Returns `BufferTooSmall`, with `count`
// still set, when `len` is short.
//
// # Safety
// `sim` must be a live handle; `buf` valid for `len` writes; `count` for one.
enum PpStatus pp_simulation_component_sizes(const struct PpSimulation *sim,
                                            uint64_t *buf,
                                            size_t len,
                                            size_t *count);

// Availability of a partition given by its block sizes.
//
// # Safety
// `sizes` must be valid for `len` reads; `eta` for one write.
enum PpStatus pp_availability_from_sizes(const uint64_t *sizes, size_t len, double *eta);

// Steady state of the rate equation. `v` receives `v(1)..v(s_max)` and must
// hold `s_max` values. `full_equation` selects the full rather than the
// approximate equation. The solution is written even when it did not
// converge, in which case `NotConverged` is returned.
//
// # Safety
// `v` must be valid for `len` writes; `residual` null or valid for one.
enum PpStatus pp_solve_steady_state(double alpha,
                                    size_t s_max,
                                    enum PpKernel kernel,
                                    int32_t full_equation,
                                    double *v,
                                    size_t len,
                                    double *residual);

// Closed-form threshold estimates for power-law exponent `tau`.
//
// # Safety
// `out` must be valid for one write.
enum PpStatus pp_critical_alpha(double tau, uint64_t s_max, struct PpMomentReport *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PATHPERC_H */
