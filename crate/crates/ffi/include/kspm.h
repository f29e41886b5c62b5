#ifndef KSPM_H
#define KSPM_H

/* Generated by cbindgen from the kspm-ffi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  KSPM_STATUS_OK = 0,
  KSPM_STATUS_NULL_POINTER = 1,
  KSPM_STATUS_INVALID_ARGUMENT = 2,
  KSPM_STATUS_RULE_VIOLATION = 3,
  KSPM_STATUS_BAD_ENCODING = 4,
  KSPM_STATUS_INTERNAL = 5,
} KspmStatus;

/**
 * Opaque sand pile configuration.
 */
typedef struct KspmConfig KspmConfig;

/**
 * Opaque interval word transducer.
 */
typedef struct KspmMachine KspmMachine;

/**
 * Wave-tail match result for a stable configuration.
 */
typedef struct {
  /**
   * Minimal column from which the tail is a wave.
   */
  uintptr_t start_column;
  uintptr_t left_blocks;
  uintptr_t right_blocks;
  bool has_zero;
} KspmWaveMatch;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Computes the fixed point of `n` stacked grains for KSPM(d).
 *
 * # Safety
 * `out` must be a valid pointer to a `KspmConfig*`.
 */
KspmStatus kspm_fixed_point(uint32_t d, uint64_t n, KspmConfig **out);

/**
 * Builds a configuration from a slope array.
 *
 * # Safety
 * `slopes` must point to `len` readable `uint32_t` values (or be NULL with
 * `len == 0`), and `out` must be a valid pointer to a `KspmConfig*`.
 */
KspmStatus kspm_config_from_slopes(const uint32_t *slopes, uintptr_t len, KspmConfig **out);

/**
 * Number of non-empty columns.
 *
 * # Safety
 * `config` must be a live handle from this library.
 */
uintptr_t kspm_config_width(const KspmConfig *config);

/**
 * Total grain count.
 *
 * # Safety
 * `config` must be a live handle from this library.
 */
uint64_t kspm_config_mass(const KspmConfig *config);

/**
 * Slope at `column` (zero beyond the stored prefix).
 *
 * # Safety
 * `config` must be a live handle and `out` a valid `uint32_t` pointer.
 */
KspmStatus kspm_config_slope(const KspmConfig *config, uintptr_t column, uint32_t *out);

/**
 * Canonical slope array as a JSON string; free with [`kspm_string_free`].
 *
 * # Safety
 * `config` must be a live handle and `out` a valid `char**`.
 */
KspmStatus kspm_config_to_json(const KspmConfig *config, char **out);

/**
 * Matches the wave tail pattern of a stable configuration.
 *
 * # Safety
 * `config` must be a live handle and `out` a valid `KspmWaveMatch` pointer.
 */
KspmStatus kspm_wave_match(const KspmConfig *config, uint32_t d, KspmWaveMatch *out);

/**
 * Frees a configuration handle; NULL is ignored.
 *
 * # Safety
 * `config` must be NULL or a handle not yet freed.
 */
void kspm_config_free(KspmConfig *config);

/**
 * Builds the interval machine for KSPM(d). `mode` 0 keeps the update
 * rule's transient outputs, 1 suppresses them.
 *
 * # Safety
 * `out` must be a valid pointer to a `KspmMachine*`.
 */
KspmStatus kspm_machine_build(uint32_t d, uint32_t mode, KspmMachine **out);

/**
 * Number of reachable states.
 *
 * # Safety
 * `machine` must be a live handle from this library.
 */
uintptr_t kspm_machine_state_count(const KspmMachine *machine);

/**
 * Runs `word` (digits, or a/b for D=3) through the machine. On success
 * writes the output word to `out_image` and the end state tuple to
 * `out_state`; both are optional and freed with [`kspm_string_free`].
 *
 * # Safety
 * `machine` must be a live handle, `word` a NUL-terminated string, and the
 * out parameters NULL or valid `char**`.
 */
KspmStatus kspm_machine_run(const KspmMachine *machine,
                            const char *word,
                            char **out_image,
                            char **out_state);

/**
 * Number of image iterations until `word` becomes an alternating prefix.
 *
 * # Safety
 * `machine` must be a live handle, `word` a NUL-terminated string and
 * `out` a valid pointer.
 */
KspmStatus kspm_machine_wave_steps(const KspmMachine *machine, const char *word, uintptr_t *out);

/**
 * DOT export of the machine; free with [`kspm_string_free`].
 *
 * # Safety
 * `machine` must be a live handle and `out` a valid `char**`.
 */
KspmStatus kspm_machine_to_dot(const KspmMachine *machine, char **out);

/**
 * Frees a machine handle; NULL is ignored.
 *
 * # Safety
 * `machine` must be NULL or a handle not yet freed.
 */
void kspm_machine_free(KspmMachine *machine);

/**
 * Frees a string returned by this library; NULL is ignored.
 *
 * # Safety
 * `s` must be NULL or a string returned by this library, not yet freed.
 */
void kspm_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* KSPM_H */
