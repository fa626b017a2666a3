/* C interface to the codiff deformation-theory engine. */

#ifndef CODIFF_H
#define CODIFF_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every entry point.
 */
typedef enum CodiffStatus {
  /**
   * Success.
   */
  CodiffStatus_Ok = 0,
  /**
   * Malformed input text (syntax, unknown names, bad flags).
   */
  CodiffStatus_InvalidInput = 1,
  /**
   * Mathematically rejected: not a codifferential, or the deformation
   * does not factor in verify mode.
   */
  CodiffStatus_MathReject = 2,
  /**
   * The word-count resource cap was exceeded.
   */
  CodiffStatus_ResourceLimit = 3,
  /**
   * A null pointer or invalid UTF-8 was passed.
   */
  CodiffStatus_BadArgument = 4,
  /**
   * An internal invariant failed; the message names the panic.
   */
  CodiffStatus_InternalError = 5,
} CodiffStatus;

/**
 * Opaque handle to a computed miniversal report.
 */
typedef struct CodiffReport CodiffReport;

/**
 * Opaque handle to a verify-mode result.
 */
typedef struct CodiffVerify CodiffVerify;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Check that the input defines a codifferential. `weight_cap` 0 means
 * "from the file or the default".
 *
 * # Safety
 * `input` must be a valid NUL-terminated UTF-8 string or NULL.
 */
enum CodiffStatus codiff_check(const char *input, uint32_t weight_cap, bool strict);

/**
 * Run the miniversal construction; on success `*out` owns a report handle
 * to be released with [`codiff_report_free`].
 *
 * # Safety
 * `input` must be a valid NUL-terminated UTF-8 string or NULL; `out` must
 * be a valid pointer to a report-handle slot.
 */
enum CodiffStatus codiff_miniversal(const char *input,
                                    uint32_t weight_cap,
                                    uint32_t order,
                                    bool strict,
                                    struct CodiffReport **out);

/**
 * Render a report as text; the returned string is owned by the caller and
 * released with [`codiff_string_free`]. NULL on a null handle.
 *
 * # Safety
 * `report` must be a handle from [`codiff_miniversal`] that has not been
 * freed.
 */
char *codiff_report_render(const struct CodiffReport *report, bool machine);

/**
 * Number of base generators (deformation parameters) in a report.
 *
 * # Safety
 * `report` must be a live handle from [`codiff_miniversal`].
 */
uint32_t codiff_report_parameter_count(const struct CodiffReport *report);

/**
 * Number of relation polynomials in a report.
 *
 * # Safety
 * `report` must be a live handle from [`codiff_miniversal`].
 */
uint32_t codiff_report_relation_count(const struct CodiffReport *report);

/**
 * Release a report handle.
 *
 * # Safety
 * `report` must be a handle from [`codiff_miniversal`], not yet freed;
 * NULL is ignored.
 */
void codiff_report_free(struct CodiffReport *report);

/**
 * Factor a user-supplied deformation through the miniversal deformation.
 * On success `*out` owns a verify handle.
 *
 * # Safety
 * `input` must be a valid NUL-terminated UTF-8 string or NULL; `out` must
 * be a valid pointer to a handle slot.
 */
enum CodiffStatus codiff_verify(const char *input,
                                uint32_t weight_cap,
                                uint32_t order,
                                bool strict,
                                struct CodiffVerify **out);

/**
 * Render a verify result; caller frees with [`codiff_string_free`].
 *
 * # Safety
 * `verify` must be a live handle from [`codiff_verify`].
 */
char *codiff_verify_render(const struct CodiffVerify *verify, bool machine);

/**
 * Release a verify handle.
 *
 * # Safety
 * `verify` must be a handle from [`codiff_verify`], not yet freed; NULL is
 * ignored.
 */
void codiff_verify_free(struct CodiffVerify *verify);

/**
 * Take the last error message for this thread, or NULL when none is set.
 * The caller releases it with [`codiff_string_free`].
 */
char *codiff_last_error(void);

/**
 * Release a string returned by this library.
 *
 * # Safety
 * `text` must be a string returned by a codiff function, not yet freed;
 * NULL is ignored.
 */
void codiff_string_free(char *text);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* CODIFF_H */
