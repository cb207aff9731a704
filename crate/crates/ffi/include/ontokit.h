#ifndef ONTOKIT_H
#define ONTOKIT_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum OntokitStatus {
  ONTOKIT_STATUS_OK = 0,
  ONTOKIT_STATUS_NULL_POINTER = 1,
  ONTOKIT_STATUS_INVALID_ARGUMENT = 2,
  ONTOKIT_STATUS_PARSE = 3,
  ONTOKIT_STATUS_DIMENSION = 4,
  ONTOKIT_STATUS_PANIC = 5,
} OntokitStatus;

// Opaque ontological model.
typedef struct OntokitModel OntokitModel;

// Opaque verification report.
typedef struct OntokitReport OntokitReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failure on this thread, or null. The pointer stays
// valid until the next failing call on the same thread.
const char *ontokit_last_error(void);

// Library version, a static string.
const char *ontokit_version(void);

// Spekkens' toy bit with its fragment.
//
// # Safety
// `out` must be valid for writing a pointer.
enum OntokitStatus ontokit_model_spekkens(struct OntokitModel **out);

// Parses a model from its JSON form.
//
// # Safety
// `json` must be a NUL-terminated string; `out` must be valid for writing a pointer.
enum OntokitStatus ontokit_model_from_json(const char *json, struct OntokitModel **out);

// JSON form of a model; release with [`ontokit_string_free`].
//
// # Safety
// `model` must come from this library; `out` must be valid for writing a pointer.
enum OntokitStatus ontokit_model_to_json(const struct OntokitModel *model, char **out);

// # Safety
// `model` must be null or a handle from this library not yet freed.
void ontokit_model_free(struct OntokitModel *model);

// # Safety
// `s` must be null or a string returned by this library not yet freed.
void ontokit_string_free(char *s);

// Checks that `model` reproduces the Born probabilities of its fragment.
//
// # Safety
// `model` must come from this library; `out` must be valid for writing a pointer.
enum OntokitStatus ontokit_verify_reproduces(const struct OntokitModel *model,
                                             double tol,
                                             struct OntokitReport **out);

// # Safety
// `report` must come from this library; `out` must be valid for a write.
enum OntokitStatus ontokit_report_verified(const struct OntokitReport *report, bool *out);

// # Safety
// `report` must come from this library; `out` must be valid for a write.
enum OntokitStatus ontokit_report_max_residual(const struct OntokitReport *report, double *out);

// JSON form of a report; release with [`ontokit_string_free`].
//
// # Safety
// `report` must come from this library; `out` must be valid for writing a pointer.
enum OntokitStatus ontokit_report_to_json(const struct OntokitReport *report, char **out);

// # Safety
// `report` must be null or a handle from this library not yet freed.
void ontokit_report_free(struct OntokitReport *report);

// `|<psi|phi>|^2` for unit vectors given as `dim` interleaved
// (real, imaginary) pairs.
//
// # Safety
// `psi` and `phi` must each point to `2 * dim` doubles; `out` must be valid for a write.
enum OntokitStatus ontokit_pure_overlap(const double *psi,
                                        const double *phi,
                                        size_t dim,
                                        double *out);

// Closed form `I_N = 2N sin^2(pi / 4N)` of the chained Bell correlation and
// its bound `pi^2 / 8N`.
//
// # Safety
// `value` and `bound` must be valid for a write.
enum OntokitStatus ontokit_chained_closed_form(size_t n, double *value, double *bound);

// KS qubit model prediction for preparing Bloch vector `psi` and testing
// `phi` (each three doubles), by Gauss-Legendre quadrature.
//
// # Safety
// `psi` and `phi` must each point to 3 doubles; `out` must be valid for a write.
enum OntokitStatus ontokit_ks_born_quadrature(const double *psi, const double *phi, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ONTOKIT_H */
