#ifndef QFIMLAB_H
#define QFIMLAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum QfimlabNoise {
  QFIMLAB_NOISE_NONE = 0,
  QFIMLAB_NOISE_BIT_FLIP = 1,
  QFIMLAB_NOISE_GLOBAL_DEPOL = 2,
  QFIMLAB_NOISE_LOCAL_DEPOL = 3,
} QfimlabNoise;

typedef enum QfimlabStatus {
  QFIMLAB_STATUS_OK = 0,
  QFIMLAB_STATUS_NULL_POINTER = 1,
  QFIMLAB_STATUS_INVALID_ARGUMENT = 2,
  QFIMLAB_STATUS_DIMENSION_MISMATCH = 3,
  QFIMLAB_STATUS_NUMERICAL_FAILURE = 4,
  QFIMLAB_STATUS_CAP_EXCEEDED = 5,
  QFIMLAB_STATUS_BUFFER_TOO_SMALL = 6,
  QFIMLAB_STATUS_PANIC = 7,
} QfimlabStatus;

// A circuit with its noise slots and default input state.
typedef struct QfimlabCircuit QfimlabCircuit;

// QFIM with its spectrum.
typedef struct QfimlabReport QfimlabReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Static description of a status code.
const char *qfimlab_status_message(enum QfimlabStatus status);

// Message of the last failed call on this thread (empty after a success).
const char *qfimlab_last_error(void);

// Single-qubit model `R_x R_z R_x R_z` on `0.9|+⟩⟨+| + 0.05 I`, noiseless.
//
// # Safety
// `out` must be valid for a pointer write.
enum QfimlabStatus qfimlab_circuit_toy(struct QfimlabCircuit **out);

// Periodic transverse-field Ising HVA on `n` qubits with `layers` layers, input `|+⟩^{⊗n}`.
//
// # Safety
// `out` must be valid for a pointer write.
enum QfimlabStatus qfimlab_circuit_hva_tfim(size_t n, size_t layers, struct QfimlabCircuit **out);

// # Safety
// `circuit` must be null or a handle from this library that has not been freed.
void qfimlab_circuit_free(struct QfimlabCircuit *circuit);

// Number of parameters, or 0 for a null handle.
//
// # Safety
// `circuit` must be null or a live handle.
size_t qfimlab_circuit_num_params(const struct QfimlabCircuit *circuit);

// Number of qubits, or 0 for a null handle.
//
// # Safety
// `circuit` must be null or a live handle.
size_t qfimlab_circuit_num_qubits(const struct QfimlabCircuit *circuit);

// Places the same channel of strength `p` in all `M + 1` noise slots, replacing any
// previous noise.
//
// # Safety
// `circuit` must be a live handle.
enum QfimlabStatus qfimlab_circuit_set_noise(struct QfimlabCircuit *circuit,
                                             enum QfimlabNoise model,
                                             double p);

// QFIM of the circuit output at `theta[0..len]`. Non-positive `rank_abs`/`rank_rel` select
// the defaults `1e-12`/`1e-10`.
//
// # Safety
// `circuit` must be a live handle, `theta` valid for `len` reads, `out` valid for a write.
enum QfimlabStatus qfimlab_qfim(const struct QfimlabCircuit *circuit,
                                const double *theta,
                                size_t len,
                                double rank_abs,
                                double rank_rel,
                                struct QfimlabReport **out);

// # Safety
// `report` must be null or a live handle.
void qfimlab_report_free(struct QfimlabReport *report);

// Matrix side length `M`, or 0 for a null handle.
//
// # Safety
// `report` must be null or a live handle.
size_t qfimlab_report_dim(const struct QfimlabReport *report);

// Numerical rank, or 0 for a null handle.
//
// # Safety
// `report` must be null or a live handle.
size_t qfimlab_report_rank(const struct QfimlabReport *report);

// Writes the `M` eigenvalues in descending order.
//
// # Safety
// `report` must be a live handle and `buf` valid for `cap` writes.
enum QfimlabStatus qfimlab_report_eigenvalues(const struct QfimlabReport *report,
                                              double *buf,
                                              size_t cap);

// Writes the `M × M` matrix in row-major order.
//
// # Safety
// `report` must be a live handle and `buf` valid for `cap` writes.
enum QfimlabStatus qfimlab_report_matrix(const struct QfimlabReport *report,
                                         double *buf,
                                         size_t cap);

// Dimension of the dynamical Lie algebra of the circuit generators. With `sector` nonzero and
// an HVA circuit, the closure is taken on the `X^{⊗n} = +1` sector that holds the input state.
//
// # Safety
// `circuit` must be a live handle and `out` valid for a write.
enum QfimlabStatus qfimlab_dla_dimension(const struct QfimlabCircuit *circuit,
                                         bool sector,
                                         size_t *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QFIMLAB_H */
