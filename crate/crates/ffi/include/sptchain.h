#ifndef SPTCHAIN_H
#define SPTCHAIN_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  SPT_STATUS_OK = 0,
  SPT_STATUS_NULL_POINTER = 1,
  SPT_STATUS_INVALID_UTF8 = 2,
  SPT_STATUS_CONFIG = 3,
  SPT_STATUS_NUMERICAL = 4,
  SPT_STATUS_SCHEDULE = 5,
  SPT_STATUS_DIMENSION = 6,
  SPT_STATUS_RESOURCE = 7,
  SPT_STATUS_UNSUPPORTED_GATE = 8,
  SPT_STATUS_EMPTY_SHOTS = 9,
  SPT_STATUS_PARSE = 10,
  SPT_STATUS_IO = 11,
  SPT_STATUS_PANIC = 12,
} SptStatus;

/**
 * Gate sequence on a chain.
 */
typedef struct SptCircuit SptCircuit;

/**
 * Measured bitstrings.
 */
typedef struct SptShots SptShots;

/**
 * Statevector of a chain.
 */
typedef struct SptState SptState;

/**
 * Message for the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *spt_last_error(void);

/**
 * Release a string returned by this library.
 */
void spt_string_free(char *s);

/**
 * Computational basis state; `bits[k]` is 0 or 1 for site `k`.
 */
SptStatus spt_state_basis(const uint8_t *bits, size_t n_sites, SptState **out);

/**
 * The alternating state `|0101...0>`.
 */
SptStatus spt_state_neel(size_t n_sites, SptState **out);

/**
 * Ground state of the interpolated Hamiltonian at `s` for a named preset
 * (`"ed"`, `"sd"` or `"ed-supplement"`), restricted to the alternating-state
 * magnetization sector. Writes the energy when `energy` is not null.
 */
SptStatus spt_state_ground(const char *preset_name,
                           size_t n_sites,
                           double s,
                           double *energy,
                           SptState **out);

void spt_state_free(SptState *state);

/**
 * Number of sites, or 0 for a null handle.
 */
size_t spt_state_n_sites(const SptState *state);

/**
 * Copy the `2^n` amplitudes into `re` and `im`, each of length `len`.
 */
SptStatus spt_state_amplitudes(const SptState *state, double *re, double *im, size_t len);

/**
 * `|<a|b>|^2`.
 */
SptStatus spt_state_fidelity(const SptState *a, const SptState *b, double *out);

/**
 * Preparation circuit of a named preset from `|00...0>`: the alternating-state
 * layer followed by the first `upto_step` Trotter steps.
 */
SptStatus spt_circuit_asp(const char *preset_name,
                          size_t n_sites,
                          size_t upto_step,
                          SptCircuit **out);

/**
 * Parse the line-oriented circuit text format.
 */
SptStatus spt_circuit_parse(const char *source, SptCircuit **out);

/**
 * Serialize a circuit; release the result with [`spt_string_free`].
 */
SptStatus spt_circuit_to_text(const SptCircuit *circuit, char **out);

void spt_circuit_free(SptCircuit *circuit);

/**
 * Number of gates, or 0 for a null handle.
 */
size_t spt_circuit_len(const SptCircuit *circuit);

size_t spt_circuit_two_qubit_count(const SptCircuit *circuit);

/**
 * Apply `circuit` to a copy of `initial`.
 */
SptStatus spt_simulate(const SptCircuit *circuit, const SptState *initial, SptState **out);

/**
 * Draw `shots` bitstrings; the same seed gives the same shots.
 */
SptStatus spt_sample(const SptState *state, size_t shots, uint64_t seed, SptShots **out);

/**
 * Keep only shots whose total `sum_k z_k` equals `target_sz`.
 */
SptStatus spt_shots_post_select(const SptShots *shots, int32_t target_sz, SptShots **out);

void spt_shots_free(SptShots *shots);

/**
 * Number of shots, or 0 for a null handle.
 */
size_t spt_shots_len(const SptShots *shots);

/**
 * Fraction of the originally drawn shots still present.
 */
double spt_shots_retention(const SptShots *shots);

/**
 * Signed exact string order `O_z^n` of a state.
 */
SptStatus spt_string_order_exact(const SptState *state, size_t n, double *out);

/**
 * Signed shot estimate of `O_z^n`.
 */
SptStatus spt_string_order_shots(const SptShots *shots, size_t n, double *out);

#endif  /* SPTCHAIN_H */
