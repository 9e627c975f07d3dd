#include "nilflow/runner.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <stdexcept>

#include "nilflow/errors.hpp"
#include "nilflow/experiments.hpp"
#include "nilflow/numeric.hpp"

namespace nilflow {

namespace {

using nlohmann::json;

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Minimal RFC-4180 quoting; numeric fields never need it but headers could.
std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

class CsvWriter {
  public:
    explicit CsvWriter(const std::string& path) : out_(path, std::ios::binary) {
        if (!out_) throw std::runtime_error("cannot open " + path);
    }
    void row(const std::vector<std::string>& fields) {
        for (size_t i = 0; i < fields.size(); ++i) {
            if (i) out_ << ',';
            out_ << csv_field(fields[i]);
        }
        out_ << '\n';
    }
    bool good() const { return static_cast<bool>(out_); }

  private:
    std::ofstream out_;
};

SymplecticMatrix build_alpha(const ExperimentConfig& cfg) {
    switch (cfg.alpha_preset) {
        case AlphaPreset::Identity:
            return SymplecticMatrix::identity(cfg.g);
        case AlphaPreset::Golden:
            return golden_frame(cfg.g);
        case AlphaPreset::Random:
            return random_symplectic(cfg.g, cfg.alpha_seed);
        case AlphaPreset::Matrix: {
            Eigen::MatrixXd m(2 * cfg.g, 2 * cfg.g);
            for (int r = 0; r < 2 * cfg.g; ++r)
                for (int c = 0; c < 2 * cfg.g; ++c)
                    m(r, c) = cfg.alpha_matrix[static_cast<size_t>(r) * 2 * cfg.g + c];
            return SymplecticMatrix(cfg.g, m);
        }
    }
    throw std::logic_error("build_alpha: unreachable");
}

Observable build_observable(const ExperimentConfig& cfg) {
    Observable f(cfg.g, cfg.big_k);
    for (const auto& t : cfg.observable) {
        Eigen::VectorXi m(cfg.g);
        for (int i = 0; i < cfg.g; ++i) m[i] = t.m[static_cast<size_t>(i)];
        f.add_term(m, t.n, {t.re, t.im});
    }
    return f;
}

json summary_json(const DistributionSummary& s) {
    json q = json::array();
    for (const auto& p : s.quantiles) q.push_back({{"p", p.first}, {"value", p.second}});
    json h = json::array();
    for (const auto& b : s.histogram) h.push_back({{"center", b.first}, {"count", b.second}});
    return json{{"count", s.count},        {"mean", s.mean},
                {"variance", s.variance},  {"support_radius", s.support_radius},
                {"quantiles", q},          {"histogram", h},
                {"seed", s.seed}};
}

struct KindOutput {
    json summary;
};

KindOutput run_kind(const ExperimentConfig& cfg, CsvWriter& csv, std::uint64_t seed, int threads) {
    KindOutput out;
    switch (cfg.kind) {
        case ExperimentKind::Heights: {
            SymplecticMatrix alpha = build_alpha(cfg);
            auto profile = log_law_profile(alpha, cfg.d, cfg.t_max, cfg.samples, cfg.depth);
            csv.row({"t_norm", "log_hgt"});
            double max_log = 0.0, slope = 0.0;
            for (const auto& p : profile) {
                csv.row({fmt17(p.first), fmt17(p.second)});
                max_log = std::max(max_log, p.second);
                if (p.first > 0) slope = std::max(slope, p.second / p.first);
            }
            out.summary = {{"max_log_hgt", max_log}, {"max_slope_linear", slope}};
            break;
        }
        case ExperimentKind::Dc: {
            SymplecticMatrix alpha = build_alpha(cfg);
            double value = dc_integral(alpha, cfg.d, cfg.cutoff, cfg.step, cfg.depth);
            csv.row({"cutoff", "step", "depth", "value"});
            csv.row({fmt17(cfg.cutoff), fmt17(cfg.step), std::to_string(cfg.depth), fmt17(value)});
            out.summary = {{"value", value}};
            break;
        }
        case ExperimentKind::Birkhoff: {
            SymplecticMatrix alpha = build_alpha(cfg);
            Observable f = build_observable(cfg);
            Eigen::VectorXd sides(cfg.d);
            for (int i = 0; i < cfg.d; ++i) sides[i] = cfg.sides[static_cast<size_t>(i)];
            QuadratureSpec spec;
            spec.rel_tol = cfg.rel_tol;
            GroupElement base = GroupElement::identity(cfg.g);
            BirkhoffResult r = birkhoff_integral_detailed(alpha, base, sides, f, spec);
            csv.row({"re", "im", "abs", "error_estimate"});
            csv.row({fmt17(r.value.real()), fmt17(r.value.imag()), fmt17(std::abs(r.value)),
                     fmt17(r.error_estimate)});
            out.summary = {{"re", r.value.real()},
                           {"im", r.value.imag()},
                           {"error_estimate", r.error_estimate},
                           {"evaluations", r.evaluations}};
            break;
        }
        case ExperimentKind::ReturnMap: {
            SymplecticMatrix alpha = build_alpha(cfg);
            SkewShift shift = return_map(alpha, cfg.d, cfg.big_k);
            std::vector<std::string> header = {"generator", "t_ret", "tau"};
            for (int k = 0; k < cfg.g; ++k) header.push_back("rho_" + std::to_string(k + 1));
            for (int k = 0; k < cfg.g; ++k) header.push_back("v_" + std::to_string(k + 1));
            csv.row(header);
            for (int i = 0; i < shift.d; ++i) {
                std::vector<std::string> row = {std::to_string(i + 1), fmt17(shift.t_ret[i]),
                                                fmt17(shift.tau[i])};
                for (int k = 0; k < cfg.g; ++k) row.push_back(fmt17(shift.rho(i, k)));
                for (int k = 0; k < cfg.g; ++k) row.push_back(fmt17(shift.v(i, k)));
                csv.row(row);
            }
            out.summary = {{"K", shift.K}, {"d", shift.d}};
            break;
        }
        case ExperimentKind::Obstruction: {
            SymplecticMatrix alpha = build_alpha(cfg);
            SkewShift shift = return_map(alpha, cfg.d, cfg.big_k);
            Eigen::VectorXi m(cfg.g);
            for (int i = 0; i < cfg.g; ++i) m[i] = cfg.seed_m[static_cast<size_t>(i)];
            CharacterLabel seed_label(m, cfg.seed_n, cfg.big_k);
            Observable fhat = cfg.observable.empty() ? [&] {
                Observable single(cfg.g, cfg.big_k);
                single.add_term(m, cfg.seed_n, {1.0, 0.0});
                return single;
            }()
                                                     : build_observable(cfg);
            std::complex<double> value = invariant_distribution(shift, seed_label, fhat, cfg.truncation);
            std::vector<std::string> header;
            for (int i = 0; i < cfg.d; ++i) header.push_back("j_" + std::to_string(i + 1));
            for (int k = 0; k < cfg.g; ++k) header.push_back("m_" + std::to_string(k + 1));
            header.push_back("phase_re");
            header.push_back("phase_im");
            csv.row(header);
            Eigen::VectorXi j = Eigen::VectorXi::Constant(cfg.d, -cfg.truncation);
            while (true) {
                ComposedCharacter cc = compose_with_iterate(shift, seed_label, j);
                std::vector<std::string> row;
                for (int i = 0; i < cfg.d; ++i) row.push_back(std::to_string(j[i]));
                for (int k = 0; k < cfg.g; ++k) row.push_back(std::to_string(cc.label_m[k]));
                row.push_back(fmt17(cc.phase.real()));
                row.push_back(fmt17(cc.phase.imag()));
                csv.row(row);
                int i = 0;
                while (i < cfg.d && ++j[i] > cfg.truncation) j[i++] = -cfg.truncation;
                if (i == cfg.d) break;
            }
            out.summary = {{"re", value.real()}, {"im", value.imag()}, {"abs", std::abs(value)}};
            break;
        }
        case ExperimentKind::Theta: {
            Eigen::MatrixXd q(cfg.g, cfg.g);
            for (int r = 0; r < cfg.g; ++r)
                for (int c = 0; c < cfg.g; ++c) q(r, c) = cfg.q[static_cast<size_t>(r) * cfg.g + c];
            if (cfg.samples == 0) {
                Eigen::VectorXd l(cfg.g);
                for (int i = 0; i < cfg.g; ++i) l[i] = cfg.l[static_cast<size_t>(i)];
                std::complex<double> v = theta_sum(ThetaParams(q, l, cfg.big_n));
                csv.row({"N", "re", "im", "abs"});
                csv.row({std::to_string(cfg.big_n), fmt17(v.real()), fmt17(v.imag()),
                         fmt17(std::abs(v))});
                out.summary = {{"re", v.real()}, {"im", v.imag()}, {"abs", std::abs(v)}};
            } else {
                std::vector<std::string> header = {"sample"};
                for (int k = 0; k < cfg.g; ++k) header.push_back("l_" + std::to_string(k + 1));
                header.push_back("abs");
                csv.row(header);
                std::vector<double> values;
                for (int i = 0; i < cfg.samples; ++i) {
                    Rng rng = rng_for_sample(seed, static_cast<std::uint64_t>(i));
                    Eigen::VectorXd l(cfg.g);
                    for (int k = 0; k < cfg.g; ++k) l[k] = rng.uniform();
                    double v = std::abs(theta_sum(ThetaParams(q, l, cfg.big_n)));
                    values.push_back(v);
                    std::vector<std::string> row = {std::to_string(i)};
                    for (int k = 0; k < cfg.g; ++k) row.push_back(fmt17(l[k]));
                    row.push_back(fmt17(v));
                    csv.row(row);
                }
                out.summary = summary_json(DistributionSummary::from_samples(values, seed));
            }
            break;
        }
        case ExperimentKind::LimitDist: {
            SymplecticMatrix alpha = build_alpha(cfg);
            Observable f = build_observable(cfg);
            Eigen::VectorXd t0(cfg.d);
            for (int i = 0; i < cfg.d; ++i) t0[i] = cfg.t0[static_cast<size_t>(i)];
            TSequence seq = TSequence::geometric(t0, cfg.ratio, cfg.count);
            QuadratureSpec spec;
            spec.rel_tol = cfg.rel_tol;
            spec.abs_tol = 1e-9;
            auto summaries = limit_distribution_experiment(alpha, f, seq, cfg.samples, seed, spec,
                                                           threads);
            std::vector<std::string> header = {"t_index"};
            for (int i = 0; i < cfg.d; ++i) header.push_back("T_" + std::to_string(i + 1));
            header.push_back("mean");
            header.push_back("variance");
            header.push_back("support_radius");
            csv.row(header);
            json list = json::array();
            for (size_t n = 0; n < summaries.size(); ++n) {
                std::vector<std::string> row = {std::to_string(n)};
                for (int i = 0; i < cfg.d; ++i) row.push_back(fmt17(seq.entries[n][i]));
                row.push_back(fmt17(summaries[n].mean));
                row.push_back(fmt17(summaries[n].variance));
                row.push_back(fmt17(summaries[n].support_radius));
                csv.row(row);
                list.push_back(summary_json(summaries[n]));
            }
            out.summary = {{"summaries", list}};
            break;
        }
        case ExperimentKind::Chi: {
            csv.row({"u", "re", "im", "abs"});
            for (int i = 0; i < cfg.samples; ++i) {
                double u = cfg.u_max * i / (cfg.samples - 1);
                Eigen::VectorXd uv = Eigen::VectorXd::Constant(cfg.d, u);
                std::complex<double> v = chi_modular(uv);
                csv.row({fmt17(u), fmt17(v.real()), fmt17(v.imag()), fmt17(std::abs(v))});
            }
            out.summary = {{"l2_line_norm_sq", chi_line_l2_squared()}};
            break;
        }
    }
    return out;
}

}  // namespace

RunOutcome run_experiment(const ExperimentConfig& cfg, const RunOptions& opts) {
    RunOutcome outcome;
    namespace fs = std::filesystem;
    const std::string out_dir = opts.out_dir.empty() ? cfg.out_dir : opts.out_dir;
    const std::uint64_t seed = opts.seed_override.value_or(cfg.seed);
    const int threads = std::max(1, opts.threads);

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) {
        outcome.exit_code = kExitIo;
        outcome.error = "output: cannot create directory '" + out_dir + "': " + ec.message();
        return outcome;
    }
    const std::string csv_path = (fs::path(out_dir) / (cfg.prefix + ".csv")).string();
    const std::string json_path = (fs::path(out_dir) / (cfg.prefix + ".json")).string();

    auto start = std::chrono::steady_clock::now();
    json summary;
    try {
        CsvWriter csv(csv_path);
        KindOutput res = run_kind(cfg, csv, seed, threads);
        if (!csv.good()) throw std::runtime_error("short write on " + csv_path);
        summary = std::move(res.summary);
    } catch (const BudgetExceededError& e) {
        outcome.exit_code = kExitBudget;
        outcome.error = std::string("budget: ") + e.what();
        return outcome;
    } catch (const ToleranceNotMetError& e) {
        outcome.exit_code = kExitBudget;
        outcome.error = std::string("tolerance: ") + e.what();
        return outcome;
    } catch (const std::invalid_argument& e) {
        outcome.exit_code = kExitValidation;
        outcome.error = std::string("validation: ") + e.what();
        return outcome;
    } catch (const std::exception& e) {
        outcome.exit_code = kExitIo;
        outcome.error = std::string("io: ") + e.what();
        return outcome;
    }
    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    ExperimentConfig echo = cfg;
    if (cfg.kind == ExperimentKind::Theta || cfg.kind == ExperimentKind::LimitDist)
        echo.seed = seed;  // only kinds that serialize a seed key
    json doc{{"schema_version", 1},
             {"tool", "nilflow-lab"},
             {"version", kToolVersion},
             {"kind", kind_name(cfg.kind)},
             {"seed", seed},
             {"threads", threads},
             {"wall_time_seconds", wall},
             {"config_text", echo.to_text()},
             {"csv", fs::path(csv_path).filename().string()},
             {"summary", summary}};
    std::ofstream jout(json_path, std::ios::binary);
    if (!jout) {
        outcome.exit_code = kExitIo;
        outcome.error = "io: cannot open " + json_path;
        return outcome;
    }
    jout << doc.dump(2) << "\n";
    if (!jout) {
        outcome.exit_code = kExitIo;
        outcome.error = "io: short write on " + json_path;
        return outcome;
    }
    outcome.csv_path = csv_path;
    outcome.json_path = json_path;
    return outcome;
}

}  // namespace nilflow
