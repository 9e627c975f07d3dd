#include "nilflow.h"

#include <cstring>
#include <fstream>
#include <new>
#include <sstream>
#include <string>

#include "nilflow/config.hpp"
#include "nilflow/errors.hpp"
#include "nilflow/experiments.hpp"
#include "nilflow/runner.hpp"

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

template <typename Fn>
nf_status guarded(Fn&& fn) {
    try {
        fn();
        g_last_error.clear();
        return NF_OK;
    } catch (const nilflow::DegenerateFrameError& e) {
        set_error(e.what());
        return NF_ERR_DEGENERATE_FRAME;
    } catch (const nilflow::NumericSingularityError& e) {
        set_error(e.what());
        return NF_ERR_SINGULAR;
    } catch (const nilflow::ToleranceNotMetError& e) {
        set_error(e.what());
        return NF_ERR_TOLERANCE;
    } catch (const nilflow::BudgetExceededError& e) {
        set_error(e.what());
        return NF_ERR_BUDGET;
    } catch (const nilflow::TruncationInsufficientError& e) {
        set_error(e.what());
        return NF_ERR_TRUNCATION;
    } catch (const std::invalid_argument& e) {
        set_error(e.what());
        return NF_ERR_INVALID_ARGUMENT;
    } catch (const std::bad_alloc&) {
        set_error("out of memory");
        return NF_ERR_INTERNAL;
    } catch (const std::exception& e) {
        set_error(e.what());
        return NF_ERR_INTERNAL;
    }
}

nf_status require(bool cond, const char* msg) {
    if (cond) return NF_OK;
    set_error(msg);
    return NF_ERR_INVALID_ARGUMENT;
}

void copy_string(const std::string& s, char* buf, size_t len) {
    if (!buf || len == 0) return;
    size_t n = std::min(len - 1, s.size());
    std::memcpy(buf, s.data(), n);
    buf[n] = '\0';
}

Eigen::MatrixXd to_matrix(const double* data, int rows, int cols) {
    Eigen::MatrixXd m(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) m(r, c) = data[static_cast<size_t>(r) * cols + c];
    return m;
}

void from_matrix(const Eigen::MatrixXd& m, double* out) {
    for (int r = 0; r < m.rows(); ++r)
        for (int c = 0; c < m.cols(); ++c) out[static_cast<size_t>(r) * m.cols() + c] = m(r, c);
}

nilflow::GroupElement element_from(const double* xyz, int g) {
    Eigen::VectorXd x(g), y(g);
    for (int i = 0; i < g; ++i) x[i] = xyz[i];
    for (int i = 0; i < g; ++i) y[i] = xyz[g + i];
    return nilflow::GroupElement(x, y, xyz[2 * g]);
}

nilflow::CharacterLabel label_from(const int* m, int n, double k, int g) {
    Eigen::VectorXi mv(g);
    for (int i = 0; i < g; ++i) mv[i] = m[i];
    return nilflow::CharacterLabel(mv, n, k);
}

void fill_summary(const nilflow::DistributionSummary& s, nf_summary* out) {
    out->count = s.count;
    out->mean = s.mean;
    out->variance = s.variance;
    out->support_radius = s.support_radius;
    out->q05 = s.quantiles[0].second;
    out->q25 = s.quantiles[1].second;
    out->q50 = s.quantiles[2].second;
    out->q75 = s.quantiles[3].second;
    out->q95 = s.quantiles[4].second;
    out->seed = s.seed;
}

}  // namespace

struct nf_symplectic {
    nilflow::SymplecticMatrix m;
};
struct nf_observable {
    nilflow::Observable f;
};
struct nf_skew_shift {
    nilflow::SkewShift s;
};
struct nf_config {
    nilflow::ExperimentConfig cfg;
};

extern "C" {

const char* nf_version(void) { return nilflow::kToolVersion; }

const char* nf_last_error(void) { return g_last_error.c_str(); }

nf_status nf_symplectic_create(int g, const double* entries, nf_symplectic** out) {
    if (auto s = require(g >= 1 && entries && out, "nf_symplectic_create: bad arguments")) return s;
    return guarded([&] { *out = new nf_symplectic{nilflow::SymplecticMatrix(g, to_matrix(entries, 2 * g, 2 * g))}; });
}

nf_status nf_symplectic_preset(int g, const char* name, uint64_t seed, nf_symplectic** out) {
    if (auto s = require(g >= 1 && name && out, "nf_symplectic_preset: bad arguments")) return s;
    return guarded([&] {
        std::string n = name;
        if (n == "identity")
            *out = new nf_symplectic{nilflow::SymplecticMatrix::identity(g)};
        else if (n == "golden")
            *out = new nf_symplectic{nilflow::golden_frame(g)};
        else if (n == "random")
            *out = new nf_symplectic{nilflow::random_symplectic(g, seed)};
        else
            throw std::invalid_argument("unknown preset '" + n + "' (identity|golden|random)");
    });
}

void nf_symplectic_free(nf_symplectic* alpha) { delete alpha; }

nf_status nf_symplectic_entries(const nf_symplectic* alpha, double* out) {
    if (auto s = require(alpha && out, "nf_symplectic_entries: bad arguments")) return s;
    return guarded([&] { from_matrix(alpha->m.m, out); });
}

nf_status nf_is_symplectic(int g, const double* entries, int* out) {
    if (auto s = require(g >= 1 && entries && out, "nf_is_symplectic: bad arguments")) return s;
    return guarded([&] { *out = nilflow::is_symplectic(to_matrix(entries, 2 * g, 2 * g)) ? 1 : 0; });
}

nf_status nf_renormalize(const nf_symplectic* alpha, const int* indices, const double* t, int d,
                         nf_symplectic** out) {
    if (auto s = require(alpha && indices && t && d >= 1 && out, "nf_renormalize: bad arguments"))
        return s;
    return guarded([&] {
        std::vector<int> idx(indices, indices + d);
        Eigen::VectorXd times(d);
        for (int i = 0; i < d; ++i) times[i] = t[i];
        nilflow::RenormalizationDirection dir(idx, times, alpha->m.g);
        *out = new nf_symplectic{nilflow::renormalize(alpha->m, dir)};
    });
}

nf_status nf_moebius_action(const nf_symplectic* m, const double* x_in, const double* y_in,
                            double* x_out, double* y_out) {
    if (auto s = require(m && x_in && y_in && x_out && y_out, "nf_moebius_action: bad arguments"))
        return s;
    return guarded([&] {
        int g = m->m.g;
        nilflow::SiegelPoint z(to_matrix(x_in, g, g), to_matrix(y_in, g, g));
        nilflow::SiegelPoint w = nilflow::moebius_action(m->m, z);
        from_matrix(w.real_part, x_out);
        from_matrix(w.imag_part, y_out);
    });
}

nf_status nf_siegel_point(const nf_symplectic* alpha, double* x_out, double* y_out) {
    if (auto s = require(alpha && x_out && y_out, "nf_siegel_point: bad arguments")) return s;
    return guarded([&] {
        nilflow::SiegelPoint z = nilflow::siegel_point(alpha->m);
        from_matrix(z.real_part, x_out);
        from_matrix(z.imag_part, y_out);
    });
}

nf_status nf_height(int g, const double* x, const double* y, double* out) {
    if (auto s = require(g >= 1 && x && y && out, "nf_height: bad arguments")) return s;
    return guarded([&] { *out = nilflow::height(nilflow::SiegelPoint(to_matrix(x, g, g), to_matrix(y, g, g))); });
}

nf_status nf_max_height(int g, const double* x, const double* y, int depth, double* out) {
    if (auto s = require(g >= 1 && x && y && out, "nf_max_height: bad arguments")) return s;
    return guarded([&] {
        *out = nilflow::max_height(nilflow::SiegelPoint(to_matrix(x, g, g), to_matrix(y, g, g)), depth);
    });
}

nf_status nf_dc_integral(const nf_symplectic* alpha, int d, double cutoff, double step, int depth,
                         double* out) {
    if (auto s = require(alpha && out, "nf_dc_integral: bad arguments")) return s;
    return guarded([&] { *out = nilflow::dc_integral(alpha->m, d, cutoff, step, depth); });
}

nf_status nf_log_law_profile(const nf_symplectic* alpha, int d, double t_max, int samples,
                             int depth, double* t_norm_out, double* log_hgt_out) {
    if (auto s = require(alpha && t_norm_out && log_hgt_out, "nf_log_law_profile: bad arguments"))
        return s;
    return guarded([&] {
        auto profile = nilflow::log_law_profile(alpha->m, d, t_max, samples, depth);
        for (size_t i = 0; i < profile.size(); ++i) {
            t_norm_out[i] = profile[i].first;
            log_hgt_out[i] = profile[i].second;
        }
    });
}

nf_status nf_flow(const nf_symplectic* alpha, const double* m_xyz, const double* x, int d,
                  double* out_xyz) {
    if (auto s = require(alpha && m_xyz && x && d >= 1 && out_xyz, "nf_flow: bad arguments")) return s;
    return guarded([&] {
        int g = alpha->m.g;
        Eigen::VectorXd xv(d);
        for (int i = 0; i < d; ++i) xv[i] = x[i];
        nilflow::GroupElement p = nilflow::flow(alpha->m, element_from(m_xyz, g), xv);
        for (int i = 0; i < g; ++i) out_xyz[i] = p.x[i];
        for (int i = 0; i < g; ++i) out_xyz[g + i] = p.y[i];
        out_xyz[2 * g] = p.z;
    });
}

nf_status nf_observable_create(int g, double K, nf_observable** out) {
    if (auto s = require(g >= 1 && out, "nf_observable_create: bad arguments")) return s;
    return guarded([&] { *out = new nf_observable{nilflow::Observable(g, K)}; });
}

nf_status nf_observable_add_term(nf_observable* f, const int* m, int n, double re, double im) {
    if (auto s = require(f && m, "nf_observable_add_term: bad arguments")) return s;
    return guarded([&] {
        Eigen::VectorXi mv(f->f.genus());
        for (int i = 0; i < f->f.genus(); ++i) mv[i] = m[i];
        f->f.add_term(mv, n, {re, im});
    });
}

void nf_observable_free(nf_observable* f) { delete f; }

nf_status nf_birkhoff_integral(const nf_symplectic* alpha, const double* m_xyz, const double* T,
                               int d, const nf_observable* f, double rel_tol, double* out_re,
                               double* out_im) {
    if (auto s = require(alpha && m_xyz && T && f && out_re && out_im,
                         "nf_birkhoff_integral: bad arguments"))
        return s;
    return guarded([&] {
        Eigen::VectorXd sides(d);
        for (int i = 0; i < d; ++i) sides[i] = T[i];
        nilflow::QuadratureSpec spec;
        if (rel_tol > 0) spec.rel_tol = rel_tol;
        auto v = nilflow::birkhoff_integral(alpha->m, element_from(m_xyz, alpha->m.g), sides, f->f, spec);
        *out_re = v.real();
        *out_im = v.imag();
    });
}

nf_status nf_bufetov_estimate(const nf_symplectic* alpha, const double* m_xyz, const double* T,
                              int d, const nf_observable* f, double rel_tol, double* out_re,
                              double* out_im) {
    if (auto s = require(alpha && m_xyz && T && f && out_re && out_im,
                         "nf_bufetov_estimate: bad arguments"))
        return s;
    return guarded([&] {
        Eigen::VectorXd sides(d);
        for (int i = 0; i < d; ++i) sides[i] = T[i];
        nilflow::QuadratureSpec spec;
        if (rel_tol > 0) spec.rel_tol = rel_tol;
        auto v = nilflow::bufetov_estimate(alpha->m, element_from(m_xyz, alpha->m.g), sides, f->f, spec);
        *out_re = v.real();
        *out_im = v.imag();
    });
}

nf_status nf_return_map(const nf_symplectic* alpha, int d, double K, nf_skew_shift** out) {
    if (auto s = require(alpha && out, "nf_return_map: bad arguments")) return s;
    return guarded([&] { *out = new nf_skew_shift{nilflow::return_map(alpha->m, d, K)}; });
}

void nf_skew_shift_free(nf_skew_shift* shift) { delete shift; }

nf_status nf_skew_shift_data(const nf_skew_shift* shift, double* rho, double* v, double* tau,
                             double* t_ret) {
    if (auto s = require(shift != nullptr, "nf_skew_shift_data: bad arguments")) return s;
    return guarded([&] {
        if (rho) from_matrix(shift->s.rho, rho);
        if (v) from_matrix(shift->s.v, v);
        if (tau)
            for (int i = 0; i < shift->s.d; ++i) tau[i] = shift->s.tau[i];
        if (t_ret)
            for (int i = 0; i < shift->s.d; ++i) t_ret[i] = shift->s.t_ret[i];
    });
}

nf_status nf_skew_iterate(const nf_skew_shift* shift, const double* y, double z, const int* j,
                          double* y_out, double* z_out) {
    if (auto s = require(shift && y && j && y_out && z_out, "nf_skew_iterate: bad arguments"))
        return s;
    return guarded([&] {
        nilflow::TorusPoint p;
        p.y.resize(shift->s.g);
        for (int i = 0; i < shift->s.g; ++i) p.y[i] = y[i];
        p.z = z;
        Eigen::VectorXi jv(shift->s.d);
        for (int i = 0; i < shift->s.d; ++i) jv[i] = j[i];
        nilflow::TorusPoint q = nilflow::skew_iterate(shift->s, p, jv);
        for (int i = 0; i < shift->s.g; ++i) y_out[i] = q.y[i];
        *z_out = q.z;
    });
}

nf_status nf_return_time(const nf_symplectic* alpha, const double* y, const double* t_x,
                         double* out) {
    if (auto s = require(alpha && y && t_x && out, "nf_return_time: bad arguments")) return s;
    return guarded([&] {
        int g = alpha->m.g;
        Eigen::VectorXd yv(g), tv(g);
        for (int i = 0; i < g; ++i) yv[i] = y[i];
        for (int i = 0; i < g; ++i) tv[i] = t_x[i];
        Eigen::VectorXd t = nilflow::return_time(alpha->m, yv, tv);
        for (int i = 0; i < g; ++i) out[i] = t[i];
    });
}

nf_status nf_character_eval(int g, const int* m, int n, double K, const double* y, double z,
                            double* out_re, double* out_im) {
    if (auto s = require(g >= 1 && m && y && out_re && out_im, "nf_character_eval: bad arguments"))
        return s;
    return guarded([&] {
        Eigen::VectorXd yv(g);
        for (int i = 0; i < g; ++i) yv[i] = y[i];
        auto v = nilflow::character_eval(label_from(m, n, K, g), yv, z);
        *out_re = v.real();
        *out_im = v.imag();
    });
}

nf_status nf_dual_orbit(const nf_skew_shift* shift, const int* seed_m, int seed_n, double K,
                        int truncation, int* count_out, int* labels_out) {
    if (auto s = require(shift && seed_m && count_out, "nf_dual_orbit: bad arguments")) return s;
    return guarded([&] {
        auto orbit = nilflow::dual_orbit(shift->s, label_from(seed_m, seed_n, K, shift->s.g), truncation);
        *count_out = static_cast<int>(orbit.labels.size());
        if (labels_out) {
            for (size_t i = 0; i < orbit.labels.size(); ++i)
                for (int k = 0; k < shift->s.g; ++k)
                    labels_out[i * shift->s.g + k] = orbit.labels[i][k];
        }
    });
}

nf_status nf_invariant_distribution(const nf_skew_shift* shift, const int* seed_m, int seed_n,
                                    double K, const nf_observable* fhat, int truncation,
                                    double* out_re, double* out_im) {
    if (auto s = require(shift && seed_m && fhat && out_re && out_im,
                         "nf_invariant_distribution: bad arguments"))
        return s;
    return guarded([&] {
        auto v = nilflow::invariant_distribution(shift->s, label_from(seed_m, seed_n, K, shift->s.g),
                                                 fhat->f, truncation);
        *out_re = v.real();
        *out_im = v.imag();
    });
}

nf_status nf_chi_modular(const double* u, int d, double* out_re, double* out_im) {
    if (auto s = require(u && d >= 1 && out_re && out_im, "nf_chi_modular: bad arguments")) return s;
    return guarded([&] {
        Eigen::VectorXd uv(d);
        for (int i = 0; i < d; ++i) uv[i] = u[i];
        auto v = nilflow::chi_modular(uv);
        *out_re = v.real();
        *out_im = v.imag();
    });
}

nf_status nf_theta_field(const double* T, const double* u, int d, double* out_re, double* out_im) {
    if (auto s = require(T && u && d >= 1 && out_re && out_im, "nf_theta_field: bad arguments"))
        return s;
    return guarded([&] {
        Eigen::VectorXd tv(d), uv(d);
        for (int i = 0; i < d; ++i) tv[i] = T[i];
        for (int i = 0; i < d; ++i) uv[i] = u[i];
        auto v = nilflow::theta_field(tv, uv);
        *out_re = v.real();
        *out_im = v.imag();
    });
}

nf_status nf_theta_sum(int g, const double* q, const double* l, long long n, double* out_re,
                       double* out_im) {
    if (auto s = require(g >= 1 && q && l && out_re && out_im, "nf_theta_sum: bad arguments"))
        return s;
    return guarded([&] {
        Eigen::VectorXd lv(g);
        for (int i = 0; i < g; ++i) lv[i] = l[i];
        auto v = nilflow::theta_sum(nilflow::ThetaParams(to_matrix(q, g, g), lv, n));
        *out_re = v.real();
        *out_im = v.imag();
    });
}

nf_status nf_theta_distribution(int g, const double* q, long long n, int samples, uint64_t seed,
                                nf_summary* out) {
    if (auto s = require(g >= 1 && q && out, "nf_theta_distribution: bad arguments")) return s;
    return guarded([&] {
        auto summary = nilflow::theta_distribution(to_matrix(q, g, g), n, samples, seed);
        fill_summary(summary, out);
    });
}

nf_status nf_limit_distribution(const nf_symplectic* alpha, const nf_observable* f,
                                const double* t0, int d, double ratio, int count, int samples,
                                uint64_t seed, double rel_tol, int threads, nf_summary* out) {
    if (auto s = require(alpha && f && t0 && out, "nf_limit_distribution: bad arguments")) return s;
    return guarded([&] {
        Eigen::VectorXd t0v(d);
        for (int i = 0; i < d; ++i) t0v[i] = t0[i];
        nilflow::QuadratureSpec spec{rel_tol > 0 ? rel_tol : 1e-4, 1e-9, 2, 200000000};
        auto summaries = nilflow::limit_distribution_experiment(
            alpha->m, f->f, nilflow::TSequence::geometric(t0v, ratio, count), samples, seed, spec,
            threads);
        for (size_t i = 0; i < summaries.size(); ++i) fill_summary(summaries[i], &out[i]);
    });
}

nf_status nf_transverse_l2_profile(const nf_symplectic* alpha, const int* label_m, int label_n,
                                   double K, const double* T, int d, double* out) {
    if (auto s = require(alpha && label_m && T && out, "nf_transverse_l2_profile: bad arguments"))
        return s;
    return guarded([&] {
        Eigen::VectorXd tv(d);
        for (int i = 0; i < d; ++i) tv[i] = T[i];
        *out = nilflow::transverse_l2_profile(alpha->m, label_from(label_m, label_n, K, alpha->m.g), tv);
    });
}

nf_status nf_config_parse(const char* text, nf_config** out, char* errbuf, size_t errbuf_len) {
    if (auto s = require(text && out, "nf_config_parse: bad arguments")) return s;
    nilflow::ParseResult r = nilflow::parse_config(text);
    if (!r.ok()) {
        std::ostringstream msg;
        for (const auto& e : r.errors) {
            if (e.line > 0) msg << "line " << e.line << ": ";
            msg << e.message << "\n";
        }
        copy_string(msg.str(), errbuf, errbuf_len);
        set_error(msg.str());
        return NF_ERR_PARSE;
    }
    return guarded([&] { *out = new nf_config{*r.config}; });
}

nf_status nf_config_parse_file(const char* path, nf_config** out, char* errbuf, size_t errbuf_len) {
    if (auto s = require(path && out, "nf_config_parse_file: bad arguments")) return s;
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        std::string msg = std::string("cannot open config file '") + path + "'";
        copy_string(msg, errbuf, errbuf_len);
        set_error(msg);
        return NF_ERR_IO;
    }
    std::ostringstream text;
    text << in.rdbuf();
    return nf_config_parse(text.str().c_str(), out, errbuf, errbuf_len);
}

void nf_config_free(nf_config* cfg) { delete cfg; }

nf_status nf_config_text(const nf_config* cfg, char* buf, size_t len) {
    if (auto s = require(cfg && buf && len > 0, "nf_config_text: bad arguments")) return s;
    return guarded([&] { copy_string(cfg->cfg.to_text(), buf, len); });
}

nf_status nf_run(const nf_config* cfg, const char* out_dir, int threads, int has_seed_override,
                 uint64_t seed_override, int* exit_code_out, char* msgbuf, size_t msgbuf_len) {
    if (auto s = require(cfg && exit_code_out, "nf_run: bad arguments")) return s;
    return guarded([&] {
        nilflow::RunOptions opts;
        if (out_dir) opts.out_dir = out_dir;
        opts.threads = threads;
        if (has_seed_override) opts.seed_override = seed_override;
        nilflow::RunOutcome outcome = nilflow::run_experiment(cfg->cfg, opts);
        *exit_code_out = outcome.exit_code;
        copy_string(outcome.exit_code == 0 ? outcome.csv_path : outcome.error, msgbuf, msgbuf_len);
    });
}

nf_status nf_presets(char* buf, size_t len) {
    if (auto s = require(buf != nullptr && len > 0, "nf_presets: bad arguments")) return s;
    copy_string("identity\ngolden\nrandom (requires seed)\n", buf, len);
    return NF_OK;
}

}  // extern "C"
