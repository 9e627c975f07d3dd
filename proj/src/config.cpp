#include "nilflow/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <set>
#include <sstream>

namespace nilflow {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct Entry {
    std::string value;
    int line = 0;
    bool used = false;
};

struct RawConfig {
    std::map<std::string, Entry> entries;  // "section.key" -> value
    std::vector<ParseError> errors;

    void fail(int line, std::string msg) { errors.push_back({line, std::move(msg)}); }

    Entry* find(const std::string& section, const std::string& key) {
        auto it = entries.find(section + "." + key);
        if (it == entries.end()) return nullptr;
        it->second.used = true;
        return &it->second;
    }
};

RawConfig tokenize(const std::string& text) {
    RawConfig raw;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                raw.fail(lineno, "malformed section header: " + line);
                continue;
            }
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) raw.fail(lineno, "empty section name");
            continue;
        }
        size_t eq = line.find('=');
        if (eq == std::string::npos) {
            raw.fail(lineno, "expected 'key = value': " + line);
            continue;
        }
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            raw.fail(lineno, "empty key");
            continue;
        }
        if (section.empty()) {
            raw.fail(lineno, "key '" + key + "' appears before any [section] header");
            continue;
        }
        std::string full = section + "." + key;
        if (raw.entries.count(full)) {
            raw.fail(lineno, "duplicate key '" + key + "' in [" + section + "]");
            continue;
        }
        raw.entries[full] = Entry{value, lineno, false};
    }
    return raw;
}

bool parse_double(const std::string& s, double* out) {
    char* end = nullptr;
    const char* c = s.c_str();
    double v = std::strtod(c, &end);
    if (end == c || *end != '\0' || !std::isfinite(v)) return false;
    *out = v;
    return true;
}

bool parse_ll(const std::string& s, long long* out) {
    char* end = nullptr;
    const char* c = s.c_str();
    long long v = std::strtoll(c, &end, 10);
    if (end == c || *end != '\0') return false;
    *out = v;
    return true;
}

bool parse_u64(const std::string& s, std::uint64_t* out) {
    char* end = nullptr;
    const char* c = s.c_str();
    if (!s.empty() && s[0] == '-') return false;
    unsigned long long v = std::strtoull(c, &end, 10);
    if (end == c || *end != '\0') return false;
    *out = v;
    return true;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(trim(cur));
    return out;
}

std::vector<std::string> fields(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string w;
    while (in >> w) out.push_back(w);
    return out;
}

// schema helpers binding errors to the entry's line
struct Schema {
    RawConfig& raw;
    ExperimentConfig& cfg;

    bool get_double(const char* sec, const char* key, double* out, double lo, double hi) {
        Entry* e = raw.find(sec, key);
        if (!e) return false;
        double v;
        if (!parse_double(e->value, &v)) {
            raw.fail(e->line, std::string("key '") + key + "': expected a number, got '" + e->value + "'");
            return false;
        }
        if (v < lo || v > hi) {
            raw.fail(e->line, std::string("key '") + key + "': value " + fmt17(v) +
                                  " outside range [" + fmt17(lo) + ", " + fmt17(hi) + "]");
            return false;
        }
        *out = v;
        return true;
    }

    bool get_int(const char* sec, const char* key, int* out, long long lo, long long hi) {
        Entry* e = raw.find(sec, key);
        if (!e) return false;
        long long v;
        if (!parse_ll(e->value, &v)) {
            raw.fail(e->line, std::string("key '") + key + "': expected an integer, got '" + e->value + "'");
            return false;
        }
        if (v < lo || v > hi) {
            raw.fail(e->line, std::string("key '") + key + "': value " + std::to_string(v) +
                                  " outside range [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
            return false;
        }
        *out = static_cast<int>(v);
        return true;
    }

    bool get_ll(const char* sec, const char* key, long long* out, long long lo, long long hi) {
        Entry* e = raw.find(sec, key);
        if (!e) return false;
        long long v;
        if (!parse_ll(e->value, &v) || v < lo || v > hi) {
            raw.fail(e->line, std::string("key '") + key + "': expected an integer in [" +
                                  std::to_string(lo) + ", " + std::to_string(hi) + "]");
            return false;
        }
        *out = v;
        return true;
    }

    bool get_u64(const char* sec, const char* key, std::uint64_t* out) {
        Entry* e = raw.find(sec, key);
        if (!e) return false;
        std::uint64_t v;
        if (!parse_u64(e->value, &v)) {
            raw.fail(e->line, std::string("key '") + key + "': expected an unsigned integer");
            return false;
        }
        *out = v;
        return true;
    }

    bool get_double_list(const char* sec, const char* key, std::vector<double>* out, size_t want,
                         double lo) {
        Entry* e = raw.find(sec, key);
        if (!e) return false;
        std::vector<double> v;
        for (const auto& w : fields(e->value)) {
            double x;
            if (!parse_double(w, &x)) {
                raw.fail(e->line, std::string("key '") + key + "': expected numbers, got '" + w + "'");
                return false;
            }
            if (x < lo) {
                raw.fail(e->line, std::string("key '") + key + "': entry " + fmt17(x) +
                                      " below minimum " + fmt17(lo));
                return false;
            }
            v.push_back(x);
        }
        if (want != 0 && v.size() != want) {
            raw.fail(e->line, std::string("key '") + key + "': expected " + std::to_string(want) +
                                  " entries, got " + std::to_string(v.size()));
            return false;
        }
        *out = std::move(v);
        return true;
    }

    bool get_int_list(const char* sec, const char* key, std::vector<int>* out, size_t want) {
        Entry* e = raw.find(sec, key);
        if (!e) return false;
        std::vector<int> v;
        for (const auto& w : fields(e->value)) {
            long long x;
            if (!parse_ll(w, &x)) {
                raw.fail(e->line, std::string("key '") + key + "': expected integers, got '" + w + "'");
                return false;
            }
            v.push_back(static_cast<int>(x));
        }
        if (want != 0 && v.size() != want) {
            raw.fail(e->line, std::string("key '") + key + "': expected " + std::to_string(want) +
                                  " entries, got " + std::to_string(v.size()));
            return false;
        }
        *out = std::move(v);
        return true;
    }

    // rows separated by ';'
    bool get_matrix(const char* sec, const char* key, std::vector<double>* out, int rows, int cols) {
        Entry* e = raw.find(sec, key);
        if (!e) return false;
        auto row_strs = split(e->value, ';');
        if (static_cast<int>(row_strs.size()) != rows) {
            raw.fail(e->line, std::string("key '") + key + "': expected " + std::to_string(rows) +
                                  " rows separated by ';'");
            return false;
        }
        std::vector<double> v;
        for (const auto& r : row_strs) {
            auto ws = fields(r);
            if (static_cast<int>(ws.size()) != cols) {
                raw.fail(e->line, std::string("key '") + key + "': each row needs " +
                                      std::to_string(cols) + " entries");
                return false;
            }
            for (const auto& w : ws) {
                double x;
                if (!parse_double(w, &x)) {
                    raw.fail(e->line, std::string("key '") + key + "': expected numbers, got '" + w + "'");
                    return false;
                }
                v.push_back(x);
            }
        }
        *out = std::move(v);
        return true;
    }

    // terms separated by ';', each  m_1 .. m_g / n / re [im]
    bool get_observable(const char* sec, const char* key, std::vector<ObservableTermSpec>* out) {
        Entry* e = raw.find(sec, key);
        if (!e) return false;
        std::vector<ObservableTermSpec> terms;
        for (const auto& term_str : split(e->value, ';')) {
            auto parts = split(term_str, '/');
            if (parts.size() != 3) {
                raw.fail(e->line, std::string("key '") + key +
                                      "': each term must be 'm_1 .. m_g / n / re [im]'");
                return false;
            }
            ObservableTermSpec t;
            for (const auto& w : fields(parts[0])) {
                long long x;
                if (!parse_ll(w, &x)) {
                    raw.fail(e->line, std::string("key '") + key + "': bad label entry '" + w + "'");
                    return false;
                }
                t.m.push_back(static_cast<int>(x));
            }
            if (static_cast<int>(t.m.size()) != cfg.g) {
                raw.fail(e->line, std::string("key '") + key + "': label length must equal g = " +
                                      std::to_string(cfg.g));
                return false;
            }
            long long n;
            if (!parse_ll(parts[1], &n)) {
                raw.fail(e->line, std::string("key '") + key + "': bad central index '" + parts[1] + "'");
                return false;
            }
            t.n = static_cast<int>(n);
            auto cw = fields(parts[2]);
            if (cw.empty() || cw.size() > 2 || !parse_double(cw[0], &t.re) ||
                (cw.size() == 2 && !parse_double(cw[1], &t.im))) {
                raw.fail(e->line, std::string("key '") + key + "': bad coefficient '" + parts[2] + "'");
                return false;
            }
            terms.push_back(std::move(t));
        }
        if (terms.empty()) {
            raw.fail(e->line, std::string("key '") + key + "': no terms");
            return false;
        }
        *out = std::move(terms);
        return true;
    }
};

const std::map<std::string, std::set<std::string>>& known_keys() {
    static const std::map<std::string, std::set<std::string>> k = {
        {"experiment", {"kind", "g", "d", "K"}},
        {"alpha", {"preset", "seed", "matrix"}},
        {"params",
         {"tmax", "samples", "depth", "cutoff", "step", "T", "observable", "rel_tol", "m", "n", "J",
          "Q", "l", "N", "T0", "ratio", "count", "seed", "umax"}},
        {"output", {"dir", "prefix"}},
    };
    return k;
}

const std::set<std::string>& params_for(ExperimentKind kind) {
    static const std::map<ExperimentKind, std::set<std::string>> k = {
        {ExperimentKind::Heights, {"tmax", "samples", "depth"}},
        {ExperimentKind::Dc, {"cutoff", "step", "depth"}},
        {ExperimentKind::Birkhoff, {"T", "observable", "rel_tol"}},
        {ExperimentKind::ReturnMap, {}},
        {ExperimentKind::Obstruction, {"m", "n", "J", "observable"}},
        {ExperimentKind::Theta, {"Q", "l", "N", "samples", "seed"}},
        {ExperimentKind::LimitDist,
         {"observable", "T0", "ratio", "count", "samples", "seed", "rel_tol"}},
        {ExperimentKind::Chi, {"umax", "samples"}},
    };
    return k.at(kind);
}

bool kind_needs_alpha(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::Theta:
        case ExperimentKind::Chi:
            return false;
        default:
            return true;
    }
}

}  // namespace

const char* kind_name(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::Heights: return "heights";
        case ExperimentKind::Dc: return "dc";
        case ExperimentKind::Birkhoff: return "birkhoff";
        case ExperimentKind::ReturnMap: return "return-map";
        case ExperimentKind::Obstruction: return "obstruction";
        case ExperimentKind::Theta: return "theta";
        case ExperimentKind::LimitDist: return "limit-dist";
        case ExperimentKind::Chi: return "chi";
    }
    return "?";
}

std::optional<ExperimentKind> kind_from_name(const std::string& name) {
    for (ExperimentKind k :
         {ExperimentKind::Heights, ExperimentKind::Dc, ExperimentKind::Birkhoff,
          ExperimentKind::ReturnMap, ExperimentKind::Obstruction, ExperimentKind::Theta,
          ExperimentKind::LimitDist, ExperimentKind::Chi})
        if (name == kind_name(k)) return k;
    return std::nullopt;
}

ParseResult parse_config(const std::string& text) {
    ParseResult result;
    RawConfig raw = tokenize(text);
    ExperimentConfig cfg;
    Schema s{raw, cfg};

    // unknown sections / keys
    for (const auto& kv : raw.entries) {
        auto dot = kv.first.find('.');
        std::string sec = kv.first.substr(0, dot);
        std::string key = kv.first.substr(dot + 1);
        auto it = known_keys().find(sec);
        if (it == known_keys().end())
            raw.fail(kv.second.line, "unknown section [" + sec + "]");
        else if (!it->second.count(key))
            raw.fail(kv.second.line, "unknown key '" + key + "' in [" + sec + "]");
    }

    Entry* kind_e = raw.find("experiment", "kind");
    if (!kind_e) {
        raw.fail(0, "missing required key 'kind' in [experiment]");
        result.errors = raw.errors;
        return result;
    }
    auto kind = kind_from_name(kind_e->value);
    if (!kind) {
        raw.fail(kind_e->line, "unknown experiment kind '" + kind_e->value +
                                   "' (expected heights|dc|birkhoff|return-map|obstruction|theta|"
                                   "limit-dist|chi)");
        result.errors = raw.errors;
        return result;
    }
    cfg.kind = *kind;

    s.get_int("experiment", "g", &cfg.g, 1, 8);
    cfg.d = 0;
    bool d_given = s.get_int("experiment", "d", &cfg.d, 1, 8);
    if (!d_given) cfg.d = 1;
    if (cfg.d > cfg.g) {
        Entry* de = raw.entries.count("experiment.d") ? &raw.entries["experiment.d"] : nullptr;
        raw.fail(de ? de->line : 0, "range violation: require d <= g, got d = " + std::to_string(cfg.d) +
                                        " with g = " + std::to_string(cfg.g) + " (keys 'd', 'g')");
    }
    double kparam = 2.0;
    if (s.get_double("experiment", "K", &kparam, 2.0, 64.0)) {
        if (kparam != std::round(kparam) || std::llround(kparam) % 2 != 0) {
            raw.fail(raw.entries["experiment.K"].line,
                     "key 'K': must be an even positive integer (central characters must be "
                     "lattice-periodic)");
        }
    }
    cfg.big_k = kparam;

    // alpha
    Entry* preset_e = raw.find("alpha", "preset");
    Entry* matrix_e = raw.entries.count("alpha.matrix") ? &raw.entries["alpha.matrix"] : nullptr;
    if (preset_e && matrix_e)
        raw.fail(matrix_e->line, "give either 'preset' or 'matrix' in [alpha], not both");
    if (preset_e) {
        if (preset_e->value == "identity") cfg.alpha_preset = AlphaPreset::Identity;
        else if (preset_e->value == "golden") cfg.alpha_preset = AlphaPreset::Golden;
        else if (preset_e->value == "random") {
            cfg.alpha_preset = AlphaPreset::Random;
            std::uint64_t sd;
            if (raw.entries.count("alpha.seed")) {
                if (s.get_u64("alpha", "seed", &sd)) cfg.alpha_seed = sd;
            } else {
                raw.fail(preset_e->line, "preset 'random' requires 'seed' in [alpha]");
            }
        } else {
            raw.fail(preset_e->line,
                     "unknown alpha preset '" + preset_e->value + "' (identity|golden|random)");
        }
    } else if (matrix_e) {
        cfg.alpha_preset = AlphaPreset::Matrix;
        s.get_matrix("alpha", "matrix", &cfg.alpha_matrix, 2 * cfg.g, 2 * cfg.g);
    } else if (kind_needs_alpha(cfg.kind)) {
        raw.fail(0, "experiment kind '" + std::string(kind_name(cfg.kind)) +
                        "' requires an [alpha] section (preset or matrix)");
    }
    if (raw.entries.count("alpha.seed") && cfg.alpha_preset != AlphaPreset::Random) {
        raw.fail(raw.entries["alpha.seed"].line, "'seed' in [alpha] is only valid with preset = random");
        raw.entries["alpha.seed"].used = true;
    }

    // kind-specific params
    const auto& allowed = params_for(cfg.kind);
    for (const auto& kv : raw.entries) {
        auto dot = kv.first.find('.');
        if (kv.first.substr(0, dot) != "params") continue;
        std::string key = kv.first.substr(dot + 1);
        if (known_keys().at("params").count(key) && !allowed.count(key))
            raw.fail(kv.second.line, "key '" + key + "' does not apply to kind '" +
                                         kind_name(cfg.kind) + "'");
    }

    switch (cfg.kind) {
        case ExperimentKind::Heights:
            cfg.samples = 60;
            s.get_double("params", "tmax", &cfg.t_max, 1e-9, 60.0);
            s.get_int("params", "samples", &cfg.samples, 2, 100000);
            s.get_int("params", "depth", &cfg.depth, 0, 24);
            break;
        case ExperimentKind::Dc:
            s.get_double("params", "cutoff", &cfg.cutoff, 0.0, 200.0);
            s.get_double("params", "step", &cfg.step, 1e-6, 10.0);
            s.get_int("params", "depth", &cfg.depth, 0, 24);
            break;
        case ExperimentKind::Birkhoff: {
            cfg.sides.assign(static_cast<size_t>(cfg.d), 1.0);
            s.get_double_list("params", "T", &cfg.sides, static_cast<size_t>(cfg.d), 1e-12);
            if (!raw.entries.count("params.observable"))
                raw.fail(0, "kind 'birkhoff' requires 'observable' in [params]");
            s.get_observable("params", "observable", &cfg.observable);
            s.get_double("params", "rel_tol", &cfg.rel_tol, 1e-12, 1e-1);
            break;
        }
        case ExperimentKind::ReturnMap:
            break;
        case ExperimentKind::Obstruction: {
            cfg.seed_m.assign(static_cast<size_t>(cfg.g), 0);
            s.get_int_list("params", "m", &cfg.seed_m, static_cast<size_t>(cfg.g));
            s.get_int("params", "n", &cfg.seed_n, -1000000, 1000000);
            s.get_int("params", "J", &cfg.truncation, 0, 64);
            if (raw.entries.count("params.observable"))
                s.get_observable("params", "observable", &cfg.observable);
            break;
        }
        case ExperimentKind::Theta: {
            cfg.q.assign(static_cast<size_t>(cfg.g) * cfg.g, 0.0);
            cfg.l.assign(static_cast<size_t>(cfg.g), 0.0);
            s.get_matrix("params", "Q", &cfg.q, cfg.g, cfg.g);
            s.get_double_list("params", "l", &cfg.l, static_cast<size_t>(cfg.g), -1e18);
            cfg.big_n = 100;
            long long n_cap = static_cast<long long>(std::floor(std::pow(1e8, 1.0 / cfg.g))) - 1;
            s.get_ll("params", "N", &cfg.big_n, 1, n_cap);
            cfg.samples = 0;
            s.get_int("params", "samples", &cfg.samples, 0, 10000000);
            s.get_u64("params", "seed", &cfg.seed);
            break;
        }
        case ExperimentKind::LimitDist: {
            if (!raw.entries.count("params.observable"))
                raw.fail(0, "kind 'limit-dist' requires 'observable' in [params]");
            s.get_observable("params", "observable", &cfg.observable);
            cfg.t0.assign(static_cast<size_t>(cfg.d), 10.0);
            s.get_double_list("params", "T0", &cfg.t0, static_cast<size_t>(cfg.d), 1e-12);
            s.get_double("params", "ratio", &cfg.ratio, 1.0000001, 1000.0);
            s.get_int("params", "count", &cfg.count, 1, 64);
            cfg.samples = 100;
            s.get_int("params", "samples", &cfg.samples, 10, 10000000);
            s.get_u64("params", "seed", &cfg.seed);
            cfg.rel_tol = 1e-4;
            s.get_double("params", "rel_tol", &cfg.rel_tol, 1e-12, 1e-1);
            break;
        }
        case ExperimentKind::Chi: {
            cfg.samples = 101;
            s.get_double("params", "umax", &cfg.u_max, 1e-9, 1e6);
            s.get_int("params", "samples", &cfg.samples, 2, 10000000);
            break;
        }
    }

    Entry* dir_e = raw.find("output", "dir");
    if (dir_e) cfg.out_dir = dir_e->value;
    Entry* prefix_e = raw.find("output", "prefix");
    cfg.prefix = prefix_e ? prefix_e->value : kind_name(cfg.kind);

    result.errors = raw.errors;
    if (raw.errors.empty()) result.config = cfg;
    return result;
}

std::string ExperimentConfig::to_text() const {
    std::ostringstream out;
    out << "[experiment]\n";
    out << "kind = " << kind_name(kind) << "\n";
    out << "g = " << g << "\n";
    out << "d = " << d << "\n";
    out << "K = " << fmt17(big_k) << "\n";
    out << "\n[alpha]\n";
    switch (alpha_preset) {
        case AlphaPreset::Identity:
            out << "preset = identity\n";
            break;
        case AlphaPreset::Golden:
            out << "preset = golden\n";
            break;
        case AlphaPreset::Random:
            out << "preset = random\nseed = " << alpha_seed << "\n";
            break;
        case AlphaPreset::Matrix: {
            out << "matrix = ";
            for (int r = 0; r < 2 * g; ++r) {
                if (r) out << " ; ";
                for (int c = 0; c < 2 * g; ++c) {
                    if (c) out << ' ';
                    out << fmt17(alpha_matrix[static_cast<size_t>(r) * 2 * g + c]);
                }
            }
            out << "\n";
            break;
        }
    }
    out << "\n[params]\n";
    auto emit_list = [&out](const char* key, const std::vector<double>& v) {
        out << key << " = ";
        for (size_t i = 0; i < v.size(); ++i) out << (i ? " " : "") << fmt17(v[i]);
        out << "\n";
    };
    auto emit_observable = [&](const std::vector<ObservableTermSpec>& terms) {
        out << "observable = ";
        for (size_t t = 0; t < terms.size(); ++t) {
            if (t) out << " ; ";
            for (size_t i = 0; i < terms[t].m.size(); ++i) out << (i ? " " : "") << terms[t].m[i];
            out << " / " << terms[t].n << " / " << fmt17(terms[t].re) << " " << fmt17(terms[t].im);
        }
        out << "\n";
    };
    switch (kind) {
        case ExperimentKind::Heights:
            out << "tmax = " << fmt17(t_max) << "\n";
            out << "samples = " << samples << "\n";
            out << "depth = " << depth << "\n";
            break;
        case ExperimentKind::Dc:
            out << "cutoff = " << fmt17(cutoff) << "\n";
            out << "step = " << fmt17(step) << "\n";
            out << "depth = " << depth << "\n";
            break;
        case ExperimentKind::Birkhoff:
            emit_list("T", sides);
            emit_observable(observable);
            out << "rel_tol = " << fmt17(rel_tol) << "\n";
            break;
        case ExperimentKind::ReturnMap:
            break;
        case ExperimentKind::Obstruction: {
            out << "m = ";
            for (size_t i = 0; i < seed_m.size(); ++i) out << (i ? " " : "") << seed_m[i];
            out << "\n";
            out << "n = " << seed_n << "\n";
            out << "J = " << truncation << "\n";
            if (!observable.empty()) emit_observable(observable);
            break;
        }
        case ExperimentKind::Theta: {
            out << "Q = ";
            for (int r = 0; r < g; ++r) {
                if (r) out << " ; ";
                for (int c = 0; c < g; ++c)
                    out << (c ? " " : "") << fmt17(q[static_cast<size_t>(r) * g + c]);
            }
            out << "\n";
            emit_list("l", l);
            out << "N = " << big_n << "\n";
            out << "samples = " << samples << "\n";
            out << "seed = " << seed << "\n";
            break;
        }
        case ExperimentKind::LimitDist:
            emit_observable(observable);
            emit_list("T0", t0);
            out << "ratio = " << fmt17(ratio) << "\n";
            out << "count = " << count << "\n";
            out << "samples = " << samples << "\n";
            out << "seed = " << seed << "\n";
            out << "rel_tol = " << fmt17(rel_tol) << "\n";
            break;
        case ExperimentKind::Chi:
            out << "umax = " << fmt17(u_max) << "\n";
            out << "samples = " << samples << "\n";
            break;
    }
    out << "\n[output]\n";
    out << "dir = " << out_dir << "\n";
    out << "prefix = " << prefix << "\n";
    return out.str();
}

}  // namespace nilflow
