#ifndef FORCING_LAB_H
#define FORCING_LAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum FlStatus {
  FL_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  FL_STATUS_NULL_ARGUMENT = 1,
  FL_STATUS_INVALID_UTF8 = 2,
  /**
   * Malformed formula, HF literal or JSON.
   */
  FL_STATUS_PARSE = 3,
  /**
   * The poset is not a forcing notion, or a condition is not in it.
   */
  FL_STATUS_INVALID_NOTION = 4,
  /**
   * A resource guard or enumeration bound was hit.
   */
  FL_STATUS_BOUND = 5,
  /**
   * Any other rejected input.
   */
  FL_STATUS_INPUT = 6,
  /**
   * The library panicked; the handle arguments are still valid.
   */
  FL_STATUS_PANIC = 7,
} FlStatus;

typedef struct FlFormula FlFormula;

typedef struct FlPoset FlPoset;

typedef struct FlSet FlSet;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * The last error message on this thread, or null if there was none. The
 * returned string is owned by the caller.
 */
char *fl_last_error_message(void);

/**
 * # Safety
 * `s` is null or a string returned by this library, not yet freed.
 */
void fl_string_free(char *s);

/**
 * # Safety
 * `src` is a nul-terminated string; `out` is writable.
 */
enum FlStatus fl_formula_parse(const char *src, struct FlFormula **out);

/**
 * # Safety
 * `f` is null or a live handle from this library.
 */
void fl_formula_free(struct FlFormula *f);

/**
 * # Safety
 * `f` is a live handle; `out` is writable.
 */
enum FlStatus fl_formula_render(const struct FlFormula *f, char **out);

/**
 * # Safety
 * `f` is a live handle; `out` is writable.
 */
enum FlStatus fl_formula_arity(const struct FlFormula *f, size_t *out);

/**
 * # Safety
 * `f` is a live handle; `out` is writable.
 */
enum FlStatus fl_formula_is_core(const struct FlFormula *f, bool *out);

/**
 * The forcing formula of a core formula, as a new handle.
 *
 * # Safety
 * `f` is a live handle; `out` is writable.
 */
enum FlStatus fl_formula_forces(const struct FlFormula *f, struct FlFormula **out);

/**
 * # Safety
 * `src` is a nul-terminated string; `out` is writable.
 */
enum FlStatus fl_set_parse(const char *src, struct FlSet **out);

/**
 * # Safety
 * `x` is null or a live handle from this library.
 */
void fl_set_free(struct FlSet *x);

/**
 * # Safety
 * `x` is a live handle; `out` is writable.
 */
enum FlStatus fl_set_render(const struct FlSet *x, char **out);

/**
 * The rank stage `V_n`.
 *
 * # Safety
 * `out` is writable.
 */
enum FlStatus fl_set_v_stage(size_t n, struct FlSet **out);

/**
 * # Safety
 * `a` and `b` are live handles; `out` is writable.
 */
enum FlStatus fl_set_equal(const struct FlSet *a, const struct FlSet *b, bool *out);

/**
 * `x ∈ y`.
 *
 * # Safety
 * `x` and `y` are live handles; `out` is writable.
 */
enum FlStatus fl_set_mem(const struct FlSet *x, const struct FlSet *y, bool *out);

/**
 * A poset from inline JSON, a file path or `builtin:trivial|C2|A2`.
 *
 * # Safety
 * `src` is a nul-terminated string; `out` is writable.
 */
enum FlStatus fl_poset_from_json(const char *src, bool close_leq, struct FlPoset **out);

/**
 * # Safety
 * `p` is null or a live handle from this library.
 */
void fl_poset_free(struct FlPoset *p);

/**
 * The condition named by `label` (or an HF literal), as a new set handle.
 *
 * # Safety
 * `p` is a live handle; `label` is a nul-terminated string; `out` is writable.
 */
enum FlStatus fl_poset_condition(const struct FlPoset *p, const char *label, struct FlSet **out);

/**
 * `model, env ⊨ f` for a core formula.
 *
 * # Safety
 * `model` and `f` are live handles; `env` points to `env_len` live set
 * handles (or is null when `env_len` is 0); `out` is writable.
 */
enum FlStatus fl_sats(const struct FlSet *model,
                      const struct FlSet *const *env,
                      size_t env_len,
                      const struct FlFormula *f,
                      bool *out);

/**
 * The atomic forcing relation; `ft` is 1 for membership and 0 for equality.
 *
 * # Safety
 * All handles are live; `out` is writable.
 */
enum FlStatus fl_frc_at(const struct FlPoset *poset,
                        uint8_t ft,
                        const struct FlSet *t1,
                        const struct FlSet *t2,
                        const struct FlSet *p,
                        bool *out);

/**
 * `val(G, name)` as a new set handle.
 *
 * # Safety
 * `g` and `name` are live handles; `out` is writable.
 */
enum FlStatus fl_val(const struct FlSet *g, const struct FlSet *name, struct FlSet **out);

/**
 * The fully generic filters of a poset as a JSON array of arrays of HF literals.
 *
 * # Safety
 * `poset` is a live handle; `out` is writable.
 */
enum FlStatus fl_generic_filters_json(const struct FlPoset *poset, char **out);

/**
 * The replacement-instance registry as JSON.
 *
 * # Safety
 * `out` is writable.
 */
enum FlStatus fl_registry_json(char **out);

/**
 * Runs a lab experiment and writes its JSON report. `config_json` may be
 * null for the defaults; missing fields take their defaults. `pass` may be null.
 *
 * # Safety
 * `experiment` is a nul-terminated string; `config_json` is null or one;
 * `out` is writable; `pass` is null or writable.
 */
enum FlStatus fl_lab_run_json(const char *experiment,
                              const char *config_json,
                              char **out,
                              bool *pass);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FORCING_LAB_H */
