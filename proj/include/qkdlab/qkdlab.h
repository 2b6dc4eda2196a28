#ifndef QKDLAB_QKDLAB_H
#define QKDLAB_QKDLAB_H

/*
 * C interface to qkdlab. All functions return a qkd_status; on failure the
 * message is available from qkd_last_error() on the same thread until the
 * next call. Strings returned through char** are owned by the caller and
 * released with qkd_string_free().
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(QKDLAB_BUILDING_LIBRARY)
#    define QKD_API __declspec(dllexport)
#  else
#    define QKD_API __declspec(dllimport)
#  endif
#else
#  define QKD_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum qkd_status {
    QKD_OK = 0,
    QKD_ERR_INVALID_ARGUMENT = 1,
    QKD_ERR_OUT_OF_RANGE = 2,
    QKD_ERR_NO_CROSSING = 3,
    QKD_ERR_NOT_CONVERGED = 4,
    QKD_ERR_PARSE = 5,
    QKD_ERR_INTERNAL = 6
} qkd_status;

typedef enum qkd_log_base { QKD_LOG_2 = 0, QKD_LOG_3 = 1, QKD_LOG_E = 2 } qkd_log_base;

typedef enum qkd_preset {
    QKD_PRESET_3DEB = 0,
    QKD_PRESET_UNIVERSAL = 1,
    QKD_PRESET_2MUB = 2,
    QKD_PRESET_QUBIT = 3
} qkd_preset;

#define QKD_MAX_PARAMS 4

QKD_API const char* qkd_version(void);
QKD_API const char* qkd_last_error(void);
QKD_API const char* qkd_status_name(qkd_status status);
QKD_API void qkd_string_free(char* s);

QKD_API qkd_status qkd_parse_preset(const char* key, qkd_preset* out);
QKD_API qkd_status qkd_preset_key(qkd_preset preset, const char** out);
QKD_API qkd_status qkd_parse_log_base(const char* text, qkd_log_base* out);

/* ---- qudit core ------------------------------------------------------- */

/* Amplitudes of |l_phi> (or its conjugate) into re[3], im[3]. */
QKD_API qkd_status qkd_phi_basis_state(double phi, int l, int conjugate, double* re, double* im);
/* The four optimal bases, their conjugates and cross overlaps. */
QKD_API qkd_status qkd_bases_json(char** out);

/* ---- cloner ----------------------------------------------------------- */

typedef struct qkd_cloner qkd_cloner;

typedef struct qkd_fidelities {
    double F_A, D_A1, D_A2;
    double F_B, D_B1, D_B2;
    int closed_form_B;
} qkd_fidelities;

typedef struct qkd_information {
    double I_AB, I_AE, I_BE, R_bound;
} qkd_information;

/* Phase-covariant cloner; without `normalize` the norm must be 1 within 1e-6. */
QKD_API qkd_status qkd_cloner_create(double v, double x, double y, double z, int normalize, qkd_cloner** out);
/* The rounded published optimum, normalized. */
QKD_API qkd_status qkd_cloner_create_published(qkd_cloner** out);
/* Arbitrary dim x dim amplitude matrix, row-major, unit Frobenius norm. */
QKD_API qkd_status qkd_cloner_create_matrix(int dim, const double* re, const double* im, qkd_cloner** out);
QKD_API void qkd_cloner_free(qkd_cloner* c);

/* v, x, y, z; QKD_ERR_INVALID_ARGUMENT for a general matrix. */
QKD_API qkd_status qkd_cloner_params(const qkd_cloner* c, double out[4]);
/* Closed-form fidelities (phase-covariant cloners only). */
QKD_API qkd_status qkd_cloner_fidelities(const qkd_cloner* c, qkd_fidelities* out);
/* Fidelities from the explicit output state for input |l_phi>. */
QKD_API qkd_status qkd_cloner_state_fidelities(const qkd_cloner* c, double phi, int l, qkd_fidelities* out);
/* Largest entrywise gap between the mixture and partial-trace clone states. */
QKD_API qkd_status qkd_cloner_mixture_discrepancy(const qkd_cloner* c, double phi, int l, double* out);
/* Largest fidelity deviation across an n-point phase grid. */
QKD_API qkd_status qkd_cloner_phase_covariance(const qkd_cloner* c, int grid_points, double* out);
/* Fourier-dual amplitudes, row-major. */
QKD_API qkd_status qkd_cloner_dual(const qkd_cloner* c, double* re, double* im, size_t capacity);
/* Eve's table P(alpha, beta, gamma | k), index alpha*9 + beta*3 + gamma. */
QKD_API qkd_status qkd_cloner_eve_table(const qkd_cloner* c, int alice_trit, double out[27]);
QKD_API qkd_status qkd_cloner_information(const qkd_cloner* c, qkd_log_base base, qkd_information* out);
QKD_API qkd_status qkd_cloner_report_json(const qkd_cloner* c, qkd_log_base base, char** out);

QKD_API qkd_status qkd_bob_information(double fidelity, qkd_log_base base, int dim, double* out);

/* ---- security analysis ------------------------------------------------ */

typedef struct qkd_crossing {
    qkd_preset preset;
    double F_A_star;
    double params[QKD_MAX_PARAMS];
    int num_params;
    double I_AB, I_AE, residual;
    int iterations;
} qkd_crossing;

typedef struct qkd_symmetric {
    qkd_preset preset;
    double fidelity, F_A, F_B;
    double params[QKD_MAX_PARAMS];
    int num_params;
} qkd_symmetric;

typedef struct qkd_thresholds {
    double bell_visibility, bell_fidelity, qubit_fidelity;
    double security_fidelity_3deb, kaszlikowski_visibility, kaszlikowski_fidelity;
} qkd_thresholds;

typedef struct qkd_table_row {
    qkd_preset preset;
    char protocol[16];
    double F_A_star, error_rate, paper_value, delta;
} qkd_table_row;

typedef struct qkd_sweep_row {
    double F_A;
    double params[3];
    double F_B, I_AB, I_AE, I_BE, R_bound;
} qkd_sweep_row;

QKD_API qkd_status qkd_crossing_point(qkd_preset preset, qkd_log_base base, qkd_crossing* out);
QKD_API qkd_status qkd_crossing_json(qkd_preset preset, qkd_log_base base, char** out);
QKD_API qkd_status qkd_symmetric_point(qkd_preset preset, qkd_symmetric* out);
QKD_API qkd_status qkd_symmetric_json(qkd_preset preset, char** out);
QKD_API qkd_status qkd_get_thresholds(qkd_thresholds* out);
QKD_API qkd_status qkd_thresholds_json(char** out);
QKD_API qkd_status qkd_fidelity_from_visibility(double visibility, double* out);
/* rows must hold 4 entries. */
QKD_API qkd_status qkd_error_rate_table(qkd_log_base base, qkd_table_row* rows, size_t capacity, size_t* count);
QKD_API qkd_status qkd_error_rate_table_json(qkd_log_base base, char** out);
QKD_API qkd_status qkd_sweep_point(double fidelity, qkd_log_base base, qkd_sweep_row* out);
QKD_API qkd_status qkd_sweep_point_json(double fidelity, qkd_log_base base, char** out);

/* ---- protocol simulation ---------------------------------------------- */

typedef struct qkd_sim_config qkd_sim_config;
typedef struct qkd_sim_result qkd_sim_result;

typedef struct qkd_sim_summary {
    uint64_t rounds, sifted_count, sifted_errors;
    int has_qber;
    double qber, qber_standard_error;
    int has_eve_information;
    double empirical_I_AE;
    unsigned threads_used;
} qkd_sim_summary;

typedef struct qkd_comparison {
    double analytic_I_AE, empirical_I_AE, I_AE_standard_error;
    int I_AE_within;
    double analytic_qber, empirical_qber, qber_standard_error;
    int qber_within;
    int bootstrap_resamples;
    double plugin_bias_bound;
    uint64_t sifted_count;
} qkd_comparison;

QKD_API qkd_status qkd_sim_config_create(qkd_sim_config** out);
QKD_API qkd_status qkd_sim_config_from_json(const char* text, qkd_sim_config** out);
QKD_API qkd_status qkd_sim_config_to_json(const qkd_sim_config* cfg, char** out);
QKD_API void qkd_sim_config_free(qkd_sim_config* cfg);
QKD_API qkd_status qkd_sim_config_set_rounds(qkd_sim_config* cfg, uint64_t rounds);
QKD_API qkd_status qkd_sim_config_set_seed(qkd_sim_config* cfg, uint64_t seed);
QKD_API qkd_status qkd_sim_config_set_threads(qkd_sim_config* cfg, unsigned threads);
QKD_API qkd_status qkd_sim_config_set_ideal(qkd_sim_config* cfg);
QKD_API qkd_status qkd_sim_config_set_depolarizing(qkd_sim_config* cfg, double visibility);
QKD_API qkd_status qkd_sim_config_set_attack(qkd_sim_config* cfg, const qkd_cloner* cloner);
/* party 0 = Alice, 1 = Bob. */
QKD_API qkd_status qkd_sim_config_set_weights(qkd_sim_config* cfg, int party, const double weights[4]);
QKD_API qkd_status qkd_sim_config_set_same_index(qkd_sim_config* cfg);
QKD_API qkd_status qkd_sim_config_set_pairs(qkd_sim_config* cfg, const int* alice, const int* bob, size_t n);
QKD_API qkd_status qkd_sim_config_set_bob_conjugate(qkd_sim_config* cfg, int conjugate);
QKD_API qkd_status qkd_sim_config_set_log_base(qkd_sim_config* cfg, qkd_log_base base);

/* Exact per-round table for the config's channel; 9 or 81 entries. */
QKD_API qkd_status qkd_round_distribution(const qkd_sim_config* cfg, int alice_basis, int bob_basis, double* out,
                                          size_t capacity, size_t* count);

QKD_API qkd_status qkd_simulate(const qkd_sim_config* cfg, qkd_sim_result** out);
QKD_API void qkd_sim_result_free(qkd_sim_result* r);
QKD_API qkd_status qkd_sim_result_summary(const qkd_sim_result* r, qkd_sim_summary* out);
/* 4x4 row-major P(a = b | i, j); NaN for pairs never drawn. */
QKD_API qkd_status qkd_sim_result_correlation(const qkd_sim_result* r, double out[16]);
/* counts[((i*4 + j)*3 + a)*3 + b] */
QKD_API qkd_status qkd_sim_result_outcome_counts(const qkd_sim_result* r, uint64_t out[144]);
/* counts[m*3 + e]: Eve's recorded error m against Bob's actual error e. */
QKD_API qkd_status qkd_sim_result_syndrome_counts(const qkd_sim_result* r, uint64_t out[9]);
QKD_API qkd_status qkd_sim_result_json(const qkd_sim_result* r, char** out);

QKD_API qkd_status qkd_survey(const qkd_sim_config* cfg, double exact[16], double empirical[16]);
QKD_API qkd_status qkd_survey_json(const qkd_sim_config* cfg, char** out);
QKD_API qkd_status qkd_compare(const qkd_sim_config* cfg, int resamples, qkd_comparison* out);
QKD_API qkd_status qkd_compare_json(const qkd_sim_config* cfg, int resamples, char** out);
QKD_API qkd_status qkd_write_rounds_csv(const qkd_sim_config* cfg, const char* path);

#ifdef __cplusplus
}
#endif

#endif
