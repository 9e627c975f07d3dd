/*
 * nilflow: numerical laboratory for higher-rank abelian actions on
 * Heisenberg nilmanifolds.
 *
 * C interface to the shared library. All functions return nf_status; on
 * failure, nf_last_error() carries a thread-local message. Matrices are
 * row-major double arrays whose dimensions follow from g (genus) and d
 * (action rank). Handles are opaque and freed with their nf_*_free call.
 */

#ifndef NILFLOW_H
#define NILFLOW_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum nf_status {
    NF_OK = 0,
    NF_ERR_INVALID_ARGUMENT = 1,
    NF_ERR_DEGENERATE_FRAME = 2,
    NF_ERR_SINGULAR = 3,
    NF_ERR_TOLERANCE = 4,
    NF_ERR_BUDGET = 5,
    NF_ERR_TRUNCATION = 6,
    NF_ERR_PARSE = 7,
    NF_ERR_IO = 8,
    NF_ERR_INTERNAL = 9
} nf_status;

const char* nf_version(void);
/* Message for the most recent failing call on this thread ("" if none). */
const char* nf_last_error(void);

typedef struct nf_symplectic nf_symplectic;
typedef struct nf_observable nf_observable;
typedef struct nf_skew_shift nf_skew_shift;
typedef struct nf_config nf_config;

/* ---- deformations / moduli ------------------------------------------- */

nf_status nf_symplectic_create(int g, const double* entries_2g_x_2g, nf_symplectic** out);
/* name: "identity" | "golden" | "random" (seed used for "random" only) */
nf_status nf_symplectic_preset(int g, const char* name, uint64_t seed, nf_symplectic** out);
void nf_symplectic_free(nf_symplectic* alpha);
nf_status nf_symplectic_entries(const nf_symplectic* alpha, double* out_2g_x_2g);

/* 1 if M^T J M = J within 1e-10, else 0. */
nf_status nf_is_symplectic(int g, const double* entries_2g_x_2g, int* out);

/* indices are 0-based, distinct, length d. */
nf_status nf_renormalize(const nf_symplectic* alpha, const int* indices, const double* t, int d,
                         nf_symplectic** out);

nf_status nf_moebius_action(const nf_symplectic* m, const double* x_in, const double* y_in,
                            double* x_out, double* y_out);
nf_status nf_siegel_point(const nf_symplectic* alpha, double* x_out, double* y_out);
nf_status nf_height(int g, const double* x, const double* y, double* out);
nf_status nf_max_height(int g, const double* x, const double* y, int depth, double* out);
nf_status nf_dc_integral(const nf_symplectic* alpha, int d, double cutoff, double step, int depth,
                         double* out);
/* t_norm_out and log_hgt_out hold `samples` entries. */
nf_status nf_log_law_profile(const nf_symplectic* alpha, int d, double t_max, int samples,
                             int depth, double* t_norm_out, double* log_hgt_out);

/* ---- group / dynamics ------------------------------------------------- */

/* m_xyz holds (x_1..x_g, y_1..y_g, z). */
nf_status nf_flow(const nf_symplectic* alpha, const double* m_xyz, const double* x, int d,
                  double* out_xyz);

nf_status nf_observable_create(int g, double K, nf_observable** out);
nf_status nf_observable_add_term(nf_observable* f, const int* m, int n, double re, double im);
void nf_observable_free(nf_observable* f);

nf_status nf_birkhoff_integral(const nf_symplectic* alpha, const double* m_xyz, const double* T,
                               int d, const nf_observable* f, double rel_tol, double* out_re,
                               double* out_im);
/* Rejects observables with a nonzero mean. */
nf_status nf_bufetov_estimate(const nf_symplectic* alpha, const double* m_xyz, const double* T,
                              int d, const nf_observable* f, double rel_tol, double* out_re,
                              double* out_im);

nf_status nf_return_map(const nf_symplectic* alpha, int d, double K, nf_skew_shift** out);
void nf_skew_shift_free(nf_skew_shift* shift);
/* rho/v are d*g row-major; tau and t_ret length d. Any output may be NULL. */
nf_status nf_skew_shift_data(const nf_skew_shift* shift, double* rho, double* v, double* tau,
                             double* t_ret);
nf_status nf_skew_iterate(const nf_skew_shift* shift, const double* y, double z, const int* j,
                          double* y_out, double* z_out);
nf_status nf_return_time(const nf_symplectic* alpha, const double* y, const double* t_x,
                         double* out);

/* ---- spectral ---------------------------------------------------------- */

nf_status nf_character_eval(int g, const int* m, int n, double K, const double* y, double z,
                            double* out_re, double* out_im);
/* labels_out, when non-NULL, holds count * g entries (m rows); call first
 * with labels_out = NULL to size it. */
nf_status nf_dual_orbit(const nf_skew_shift* shift, const int* seed_m, int seed_n, double K,
                        int truncation, int* count_out, int* labels_out);
nf_status nf_invariant_distribution(const nf_skew_shift* shift, const int* seed_m, int seed_n,
                                    double K, const nf_observable* fhat, int truncation,
                                    double* out_re, double* out_im);
nf_status nf_chi_modular(const double* u, int d, double* out_re, double* out_im);
nf_status nf_theta_field(const double* T, const double* u, int d, double* out_re, double* out_im);

/* ---- experiments ------------------------------------------------------- */

nf_status nf_theta_sum(int g, const double* q, const double* l, long long n, double* out_re,
                       double* out_im);

typedef struct nf_summary {
    long long count;
    double mean;
    double variance;
    double support_radius;
    double q05, q25, q50, q75, q95;
    uint64_t seed;
} nf_summary;

nf_status nf_theta_distribution(int g, const double* q, long long n, int samples, uint64_t seed,
                                nf_summary* out);
/* out holds `count` summaries, one per T_n = T0 * ratio^n. */
nf_status nf_limit_distribution(const nf_symplectic* alpha, const nf_observable* f,
                                const double* t0, int d, double ratio, int count, int samples,
                                uint64_t seed, double rel_tol, int threads, nf_summary* out);
nf_status nf_transverse_l2_profile(const nf_symplectic* alpha, const int* label_m, int label_n,
                                   double K, const double* T, int d, double* out);

/* ---- configuration / orchestration ------------------------------------ */

/* On parse/validation failure returns NF_ERR_PARSE and, when errbuf is given,
 * fills it with one "line N: message" per error, newline-separated. */
nf_status nf_config_parse(const char* text, nf_config** out, char* errbuf, size_t errbuf_len);
nf_status nf_config_parse_file(const char* path, nf_config** out, char* errbuf, size_t errbuf_len);
void nf_config_free(nf_config* cfg);
nf_status nf_config_text(const nf_config* cfg, char* buf, size_t len);

/* Runs the experiment; *exit_code_out receives the CLI exit status
 * (0 ok, 2 validation, 3 budget/tolerance, 4 output I/O). out_dir may be
 * NULL to use the config's. seed_override applies when has_seed_override. */
nf_status nf_run(const nf_config* cfg, const char* out_dir, int threads, int has_seed_override,
                 uint64_t seed_override, int* exit_code_out, char* msgbuf, size_t msgbuf_len);

/* Newline-separated list of named alpha presets. */
nf_status nf_presets(char* buf, size_t len);

#ifdef __cplusplus
}
#endif

#endif /* NILFLOW_H */
