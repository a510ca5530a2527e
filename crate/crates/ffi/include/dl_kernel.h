#ifndef DL_KERNEL_H
#define DL_KERNEL_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Arithmetic handling for [`dl_check_script`].
typedef enum DlArith {
  DL_ARITH_ASSUME = 0,
  DL_ARITH_SAMPLE = 1,
  DL_ARITH_EXTERNAL = 2,
} DlArith;

// Result codes.
typedef enum DlStatus {
  DL_STATUS_OK = 0,
  DL_STATUS_NULL_ARGUMENT = 1,
  DL_STATUS_INVALID_UTF8 = 2,
  DL_STATUS_PARSE_ERROR = 3,
  DL_STATUS_CLASH = 4,
  DL_STATUS_NOT_FOUND = 5,
  DL_STATUS_CHECK_FAILED = 6,
  DL_STATUS_PANIC = 7,
} DlStatus;

// A parsed term, formula or program.
typedef struct DlExpr DlExpr;

// A parsed uniform substitution.
typedef struct DlSubst DlSubst;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failing call on this thread, or NULL. Valid until the next call.
const char *dl_last_error(void);

// Library version as a static string.
const char *dl_version(void);

// # Safety
// `s` is NULL or a string returned by this library and not yet freed.
void dl_string_free(char *s);

// Parses a term, formula or program.
//
// # Safety
// `src` is a NUL-terminated string; `out` is writable.
enum DlStatus dl_expr_parse(const char *src, struct DlExpr **out);

// Looks up an axiom of the standard registry by name or alias.
//
// # Safety
// `name` is a NUL-terminated string; `out` is writable.
enum DlStatus dl_axiom(const char *name, struct DlExpr **out);

// Pretty-printed form of `e`; release with [`dl_string_free`].
//
// # Safety
// `e` is a live handle; `out` is writable.
enum DlStatus dl_expr_print(const struct DlExpr *e, char **out);

// Free, bound and must-bound variables plus signature as JSON.
//
// # Safety
// `e` is a live handle; `out` is writable.
enum DlStatus dl_expr_static_json(const struct DlExpr *e, char **out);

// # Safety
// `e` is NULL or a handle from this library not yet freed.
void dl_expr_free(struct DlExpr *e);

// Parses a substitution pair list such as `((fn f 0) "x^2")`.
//
// # Safety
// `src` is a NUL-terminated string; `out` is writable.
enum DlStatus dl_subst_parse(const char *src, struct DlSubst **out);

// Applies `s` to `e`. A clash yields [`DlStatus::Clash`] and a message naming the taboo set.
//
// # Safety
// `s` and `e` are live handles; `out` is writable.
enum DlStatus dl_subst_apply(const struct DlSubst *s, const struct DlExpr *e, struct DlExpr **out);

// # Safety
// `s` is NULL or a handle from this library not yet freed.
void dl_subst_free(struct DlSubst *s);

// Checks a proof script. On success and on check failures `out_json` receives the
// JSON report (goals or error); release it with [`dl_string_free`].
// `command` is only read for [`DlArith::External`].
//
// # Safety
// `src` is a NUL-terminated string; `command` is NULL or NUL-terminated; `out_json` is writable.
enum DlStatus dl_check_script(const char *src,
                              enum DlArith arith,
                              uint64_t seed,
                              const char *command,
                              char **out_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DL_KERNEL_H */
