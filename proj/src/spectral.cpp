#include "nilflow/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "nilflow/errors.hpp"
#include "nilflow/numeric.hpp"

namespace nilflow {

namespace {

bool near_integer(double x, double tol) { return std::abs(x - std::round(x)) <= tol; }

std::string label_key(const Eigen::VectorXi& m, int n) {
    std::string k = std::to_string(n);
    for (int i = 0; i < m.size(); ++i) {
        k += ',';
        k += std::to_string(m[i]);
    }
    return k;
}

// Integer label steps nK v_i of the composed character, validated integral.
Eigen::MatrixXi label_shifts(const SkewShift& shift, int n, double K) {
    Eigen::MatrixXi s(shift.d, shift.g);
    for (int i = 0; i < shift.d; ++i)
        for (int k = 0; k < shift.g; ++k) {
            double raw = n * K * shift.v(i, k);
            if (!near_integer(raw, 1e-9))
                throw std::invalid_argument(
                    "dual orbit: n*K*v must be integral (torus map is not well-defined otherwise)");
            s(i, k) = static_cast<int>(std::llround(raw));
        }
    return s;
}

}  // namespace

CharacterLabel::CharacterLabel(Eigen::VectorXi m_, int n_, double K_) : m(std::move(m_)), n(n_), K(K_) {
    if (m.size() < 1) throw std::invalid_argument("CharacterLabel: m must have length g >= 1");
    if (!(K > 0.0)) throw std::invalid_argument("CharacterLabel: K must be > 0");
}

CharacterLabel CharacterLabel::orbit_reduced() const {
    if (n == 0) return *this;
    double mod_raw = K * std::abs(static_cast<double>(n));
    if (!near_integer(mod_raw, 1e-9) || mod_raw < 0.5) return *this;
    int modulus = static_cast<int>(std::llround(mod_raw));
    CharacterLabel out = *this;
    for (int i = 0; i < m.size(); ++i) {
        int r = m[i] % modulus;
        if (r < 0) r += modulus;
        out.m[i] = r;
    }
    return out;
}

std::complex<double> character_eval(const CharacterLabel& label, const Eigen::VectorXd& y, double z) {
    if (y.size() != label.m.size())
        throw std::invalid_argument("character_eval: point dimension mismatch");
    double turns = label.n * label.K * z;
    for (int i = 0; i < y.size(); ++i) turns += label.m[i] * y[i];
    return unit_phase(turns);
}

ComposedCharacter compose_with_iterate(const SkewShift& shift, const CharacterLabel& label,
                                       const Eigen::VectorXi& j) {
    if (label.genus() != shift.g)
        throw std::invalid_argument("compose_with_iterate: label genus mismatch");
    if (j.size() != shift.d)
        throw std::invalid_argument("compose_with_iterate: iterate vector must have length d");
    Eigen::MatrixXi steps = label_shifts(shift, label.n, label.K);

    ComposedCharacter out;
    out.label_m = label.m;
    for (int i = 0; i < shift.d; ++i) out.label_m += j[i] * steps.row(i).transpose();

    // Phase turns: m . (sum_i j_i rho_i) + nK * [ sum_i (j_i tau_i +
    // v_i.rho_i C(j_i,2)) + sum_{k<i} j_i j_k v_i.rho_k ].
    KahanSum turns;
    const double nk = label.n * label.K;
    for (int i = 0; i < shift.d; ++i) {
        const double ji = static_cast<double>(j[i]);
        double mrho = 0.0;
        for (int k = 0; k < shift.g; ++k) mrho += label.m[k] * shift.rho(i, k);
        turns.add(frac_prod(ji, mod_unit(mrho)));
        turns.add(frac_prod(ji, mod_unit(nk * shift.tau[i])));
        double virho = shift.v.row(i).dot(shift.rho.row(i));
        turns.add(frac_prod(0.5 * ji * (ji - 1.0), mod_unit(nk * virho)));
        for (int k = 0; k < i; ++k) {
            double virhok = shift.v.row(i).dot(shift.rho.row(k));
            turns.add(frac_prod(ji * static_cast<double>(j[k]), mod_unit(nk * virhok)));
        }
    }
    out.phase = unit_phase(turns.value());
    return out;
}

DualOrbit dual_orbit(const SkewShift& shift, const CharacterLabel& seed, int truncation) {
    if (truncation < 0) throw std::invalid_argument("dual_orbit: truncation must be >= 0");
    if (seed.genus() != shift.g) throw std::invalid_argument("dual_orbit: seed genus mismatch");
    DualOrbit orbit;
    orbit.seed = seed;
    orbit.truncation = truncation;
    if (seed.n == 0) {
        orbit.shift_vectors = Eigen::MatrixXi::Zero(shift.d, shift.g);
        orbit.labels.push_back(seed.m);
        return orbit;
    }
    orbit.shift_vectors = label_shifts(shift, seed.n, seed.K);

    std::map<std::vector<int>, Eigen::VectorXi> seen;
    Eigen::VectorXi j = Eigen::VectorXi::Constant(shift.d, -truncation);
    while (true) {
        Eigen::VectorXi m = seed.m;
        for (int i = 0; i < shift.d; ++i) m += j[i] * orbit.shift_vectors.row(i).transpose();
        std::vector<int> key(m.data(), m.data() + m.size());
        seen.emplace(std::move(key), m);
        int i = 0;
        while (i < shift.d && ++j[i] > truncation) j[i++] = -truncation;
        if (i == shift.d) break;
    }
    orbit.labels.reserve(seen.size());
    for (auto& kv : seen) orbit.labels.push_back(kv.second);
    return orbit;
}

namespace {

// Solve sum_i j_i s_i = delta for integer j; axis-separated shears solve
// exactly, otherwise a bounded box search.
bool solve_orbit_index(const Eigen::MatrixXi& steps, const Eigen::VectorXi& delta, int box,
                       Eigen::VectorXi* j_out) {
    const int d = static_cast<int>(steps.rows());
    const int g = static_cast<int>(steps.cols());
    // axis-separated: each generator moves a single private coordinate
    std::vector<int> axis(static_cast<size_t>(d), -1);
    bool separated = true;
    std::vector<bool> used(static_cast<size_t>(g), false);
    for (int i = 0; i < d && separated; ++i) {
        int nz = -1;
        for (int k = 0; k < g; ++k)
            if (steps(i, k) != 0) {
                if (nz >= 0) {
                    separated = false;
                    break;
                }
                nz = k;
            }
        if (nz < 0 || used[static_cast<size_t>(nz)]) separated = false;
        else {
            axis[static_cast<size_t>(i)] = nz;
            used[static_cast<size_t>(nz)] = true;
        }
    }
    if (separated) {
        Eigen::VectorXi j = Eigen::VectorXi::Zero(d);
        Eigen::VectorXi rem = delta;
        for (int i = 0; i < d; ++i) {
            int k = axis[static_cast<size_t>(i)];
            if (rem[k] % steps(i, k) != 0) return false;
            j[i] = rem[k] / steps(i, k);
            rem[k] = 0;
        }
        if (!rem.isZero()) return false;
        *j_out = j;
        return true;
    }
    Eigen::VectorXi j = Eigen::VectorXi::Constant(d, -box);
    while (true) {
        Eigen::VectorXi acc = Eigen::VectorXi::Zero(g);
        for (int i = 0; i < d; ++i) acc += j[i] * steps.row(i).transpose();
        if (acc == delta) {
            *j_out = j;
            return true;
        }
        int i = 0;
        while (i < d && ++j[i] > box) j[i++] = -box;
        if (i == d) break;
    }
    return false;
}

}  // namespace

std::complex<double> invariant_distribution(const SkewShift& shift, const CharacterLabel& seed,
                                            const Observable& fhat, int truncation) {
    if (truncation < 0) throw std::invalid_argument("invariant_distribution: truncation must be >= 0");
    if (fhat.genus() != shift.g)
        throw std::invalid_argument("invariant_distribution: fhat genus mismatch");
    if (std::abs(fhat.central_parameter() - seed.K) > 1e-12)
        throw std::invalid_argument("invariant_distribution: fhat and seed disagree on K");

    std::unordered_map<std::string, std::complex<double>> coeff;
    for (const auto& t : fhat.terms()) coeff[label_key(t.m, t.n)] += t.coefficient;

    // Partial sum over the box; conj(phase) reads off the Fourier
    // coefficient of fhat against the composed character.
    KahanComplexSum acc;
    std::vector<std::string> in_box;
    Eigen::VectorXi j = Eigen::VectorXi::Constant(shift.d, -truncation);
    while (true) {
        ComposedCharacter cc = compose_with_iterate(shift, seed, j);
        auto key = label_key(cc.label_m, seed.n);
        auto it = coeff.find(key);
        if (it != coeff.end()) acc.add(std::conj(cc.phase) * it->second);
        in_box.push_back(std::move(key));
        int i = 0;
        while (i < shift.d && ++j[i] > truncation) j[i++] = -truncation;
        if (i == shift.d) break;
    }

    // Truncation diagnosis: support on the orbit outside the box is an error.
    if (seed.n != 0) {
        Eigen::MatrixXi steps = label_shifts(shift, seed.n, seed.K);
        std::sort(in_box.begin(), in_box.end());
        for (const auto& t : fhat.terms()) {
            if (t.n != seed.n || std::abs(t.coefficient) == 0.0) continue;
            auto key = label_key(t.m, t.n);
            if (std::binary_search(in_box.begin(), in_box.end(), key)) continue;
            Eigen::VectorXi delta = t.m - seed.m;
            Eigen::VectorXi idx;
            if (solve_orbit_index(steps, delta, 4 * truncation + 16, &idx))
                throw TruncationInsufficientError(
                    "invariant_distribution: fhat support at orbit index |j| > J (J = " +
                    std::to_string(truncation) + ")");
        }
    }
    return acc.value();
}

std::complex<double> chi_modular(const Eigen::VectorXd& u) {
    std::complex<double> out(1.0, 0.0);
    for (int i = 0; i < u.size(); ++i) {
        double x = u[i];
        std::complex<double> factor;
        if (std::abs(x) < 1e-4) {
            // (e^{iu}-1)/(iu) = 1 + iu/2 + (iu)^2/6 + (iu)^3/24 + O(u^4/120)
            std::complex<double> iu(0.0, x);
            factor = 1.0 + iu * (1.0 / 2.0 + iu * (1.0 / 6.0 + iu * (1.0 / 24.0)));
        } else {
            factor = std::complex<double>(std::sin(x) / x, (1.0 - std::cos(x)) / x);
        }
        out *= factor;
    }
    return out;
}

std::complex<double> theta_field(const Eigen::VectorXd& sides, const Eigen::VectorXd& u) {
    if (sides.size() != u.size()) throw std::invalid_argument("theta_field: dimension mismatch");
    double vol = 1.0;
    Eigen::VectorXd tu(u.size());
    for (int i = 0; i < u.size(); ++i) {
        if (!(sides[i] > 0.0)) throw std::invalid_argument("theta_field: sides must be positive");
        vol *= sides[i];
        tu[i] = sides[i] * u[i];
    }
    return std::sqrt(vol) * chi_modular(tu);
}

namespace {

// pi/2 - Si(w) = f(w) cos w + g(w) sin w, 3-term asymptotics (w >= ~50).
double si_tail(double w) {
    double w2 = w * w;
    double f = (1.0 - 2.0 / w2 + 24.0 / (w2 * w2)) / w;
    double g = (1.0 - 6.0 / w2 + 120.0 / (w2 * w2)) / w2;
    return f * std::cos(w) + g * std::sin(w);
}

// int_{|u| > w} |chi_1(u)|^2 du with |chi_1|^2 = 2(1 - cos u)/u^2.
double chi_tail_l2_squared(double w) {
    return 4.0 * ((1.0 - std::cos(w)) / w + si_tail(w));
}

double chi1_sq(double u) {
    if (std::abs(u) < 1e-6) {
        double u2 = u * u;
        return 1.0 - u2 / 12.0;
    }
    return 2.0 * (1.0 - std::cos(u)) / (u * u);
}

// Composite Gauss-Legendre 8 on [a, b] split into panels of width <= hmax.
double gauss_panels(const std::function<double(double)>& f, double a, double b, double hmax) {
    static const double xs[4] = {0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                                 0.9602898564975363};
    static const double ws[4] = {0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
                                 0.1012285362903763};
    int n = std::max(1, static_cast<int>(std::ceil((b - a) / hmax)));
    double h = (b - a) / n;
    KahanSum acc;
    for (int p = 0; p < n; ++p) {
        double c = a + (p + 0.5) * h;
        double r = 0.5 * h;
        for (int q = 0; q < 4; ++q) {
            acc.add(ws[q] * r * f(c + r * xs[q]));
            acc.add(ws[q] * r * f(c - r * xs[q]));
        }
    }
    return acc.value();
}

}  // namespace

double chi_line_l2_squared() {
    const double w = 2000.0;
    double head = gauss_panels(chi1_sq, 0.0, w, 0.5);
    return 2.0 * head + chi_tail_l2_squared(w);
}

SampledFunction SampledFunction::from_callable(int d, double half_width, int points_per_axis,
                                               const std::function<double(const Eigen::VectorXd&)>& f,
                                               double tail_amplitude, double tail_rate) {
    if (d < 1 || d > 2) throw std::invalid_argument("SampledFunction: d must be 1 or 2");
    if (points_per_axis < 9) throw std::invalid_argument("SampledFunction: need at least 9 points per axis");
    SampledFunction out;
    out.d = d;
    out.half_width = half_width;
    out.points_per_axis = points_per_axis;
    out.tail_amplitude = tail_amplitude;
    out.tail_rate = tail_rate;
    const double h = out.spacing();
    if (d == 1) {
        out.values.resize(static_cast<size_t>(points_per_axis));
        Eigen::VectorXd u(1);
        for (int i = 0; i < points_per_axis; ++i) {
            u[0] = -half_width + i * h;
            out.values[static_cast<size_t>(i)] = f(u);
        }
    } else {
        out.values.resize(static_cast<size_t>(points_per_axis) * points_per_axis);
        Eigen::VectorXd u(2);
        for (int i = 0; i < points_per_axis; ++i)
            for (int j = 0; j < points_per_axis; ++j) {
                u[0] = -half_width + i * h;
                u[1] = -half_width + j * h;
                out.values[static_cast<size_t>(i) * points_per_axis + j] = f(u);
            }
    }
    return out;
}

namespace {

void validate_tail_bound(const SampledFunction& f) {
    const double h = f.spacing();
    const int n = f.points_per_axis;
    for (size_t idx = 0; idx < f.values.size(); ++idx) {
        double maxc;
        if (f.d == 1) {
            maxc = std::abs(-f.half_width + static_cast<double>(idx) * h);
        } else {
            int i = static_cast<int>(idx) / n;
            int j = static_cast<int>(idx) % n;
            maxc = std::max(std::abs(-f.half_width + i * h), std::abs(-f.half_width + j * h));
        }
        double bound = f.tail_amplitude * std::exp(-f.tail_rate * maxc) + 1e-12;
        if (std::abs(f.values[idx]) > bound)
            throw std::invalid_argument("l2_convergence_check: samples violate the declared tail bound");
    }
}

// Cubic Catmull-Rom interpolation on a uniform grid.
double interp1(const std::vector<double>& v, double idx) {
    const int n = static_cast<int>(v.size());
    if (idx <= 0.0) return v.front();
    if (idx >= n - 1) return v.back();
    int i = static_cast<int>(idx);
    double t = idx - i;
    double p0 = v[static_cast<size_t>(std::max(0, i - 1))];
    double p1 = v[static_cast<size_t>(i)];
    double p2 = v[static_cast<size_t>(std::min(n - 1, i + 1))];
    double p3 = v[static_cast<size_t>(std::min(n - 1, i + 2))];
    return p1 + 0.5 * t * (p2 - p0 + t * (2 * p0 - 5 * p1 + 4 * p2 - p3 + t * (3 * (p1 - p2) + p3 - p0)));
}

}  // namespace

std::vector<double> l2_convergence_check(const SampledFunction& f,
                                         const std::vector<Eigen::VectorXd>& t_seq) {
    validate_tail_bound(f);
    if (t_seq.empty()) return {};
    for (size_t i = 0; i < t_seq.size(); ++i) {
        if (static_cast<int>(t_seq[i].size()) != f.d)
            throw std::invalid_argument("l2_convergence_check: T dimension mismatch");
        for (int k = 0; k < f.d; ++k)
            if (!(t_seq[i][k] > 0.0))
                throw std::invalid_argument("l2_convergence_check: T must be positive");
        if (i > 0)
            for (int k = 0; k < f.d; ++k)
                if (!(t_seq[i][k] >= t_seq[i - 1][k]))
                    throw std::invalid_argument("l2_convergence_check: Tseq must be increasing");
    }

    const double hs = f.spacing();
    const int ns = f.points_per_axis;
    const double domega = 0.02;
    const double omega_cap = std::min(40.0, M_PI / hs);
    const int nw = static_cast<int>(std::ceil(omega_cap / domega)) + 1;

    std::vector<double> errors;
    if (f.d == 1) {
        // |F(omega)| on a uniform grid; f real so |F(-omega)| = |F(omega)|.
        std::vector<double> fabs2(static_cast<size_t>(nw));
        for (int w = 0; w < nw; ++w) {
            double omega = w * domega;
            KahanSum re, im;
            for (int i = 0; i < ns; ++i) {
                double u = -f.half_width + i * hs;
                double weight = (i == 0 || i == ns - 1) ? 0.5 : 1.0;
                re.add(weight * f.values[static_cast<size_t>(i)] * std::cos(omega * u));
                im.add(-weight * f.values[static_cast<size_t>(i)] * std::sin(omega * u));
            }
            double fr = re.value() * hs, fi = im.value() * hs;
            fabs2[static_cast<size_t>(w)] = fr * fr + fi * fi;
        }
        const double f0 = std::sqrt(fabs2[0]);
        // decay frequency: beyond it |F| is negligible and |F - F0| ~ |F0|
        double omega_dec = omega_cap;
        double thresh = std::max(1e-6, 1e-6 * f0 * f0);
        for (int w = nw - 1; w >= 1; --w) {
            if (fabs2[static_cast<size_t>(w)] > thresh) {
                omega_dec = std::min(omega_cap, (w + 2) * domega);
                break;
            }
        }
        // grid of (F(omega) - F0)^2 via complex parts: recompute with phases
        std::vector<double> dff2(static_cast<size_t>(nw));
        for (int w = 0; w < nw; ++w) {
            double omega = w * domega;
            KahanSum re, im;
            for (int i = 0; i < ns; ++i) {
                double u = -f.half_width + i * hs;
                double weight = (i == 0 || i == ns - 1) ? 0.5 : 1.0;
                re.add(weight * f.values[static_cast<size_t>(i)] * std::cos(omega * u));
                im.add(-weight * f.values[static_cast<size_t>(i)] * std::sin(omega * u));
            }
            double fr = re.value() * hs - f0, fi = im.value() * hs;
            dff2[static_cast<size_t>(w)] = fr * fr + fi * fi;
        }
        for (const auto& tvec : t_seq) {
            double t = tvec[0];
            double w_cut = t * omega_dec;
            auto integrand = [&](double nu) {
                double widx = std::abs(nu) / t / domega;
                return chi1_sq(nu) * interp1(dff2, widx);
            };
            double head = gauss_panels(integrand, 0.0, w_cut, 0.5);
            double err2 = (2.0 * head + f0 * f0 * chi_tail_l2_squared(w_cut)) / kTwoPi;
            errors.push_back(std::sqrt(std::max(0.0, err2)));
        }
        return errors;
    }

    // d == 2: staged transform onto a tensor omega-grid, then box quadrature
    // in nu with the chi tail applied outside the box. The quarter-grid
    // reflection below needs samples even in each coordinate.
    for (int i = 0; i < ns; ++i)
        for (int j = 0; j < ns; ++j) {
            double a = f.values[static_cast<size_t>(i) * ns + j];
            double b = f.values[static_cast<size_t>(ns - 1 - i) * ns + j];
            double c = f.values[static_cast<size_t>(i) * ns + (ns - 1 - j)];
            if (std::abs(a - b) > 1e-9 || std::abs(a - c) > 1e-9)
                throw std::invalid_argument(
                    "l2_convergence_check: d = 2 requires coordinate-even samples");
        }
    const int nw2 = nw;
    std::vector<std::complex<double>> stage1(static_cast<size_t>(ns) * nw2);
    for (int i = 0; i < ns; ++i)
        for (int w = 0; w < nw2; ++w) {
            double omega = w * domega;
            KahanSum re, im;
            for (int jj = 0; jj < ns; ++jj) {
                double u = -f.half_width + jj * hs;
                double weight = (jj == 0 || jj == ns - 1) ? 0.5 : 1.0;
                double val = f.values[static_cast<size_t>(i) * ns + jj];
                re.add(weight * val * std::cos(omega * u));
                im.add(-weight * val * std::sin(omega * u));
            }
            stage1[static_cast<size_t>(i) * nw2 + w] = {re.value() * hs, im.value() * hs};
        }
    std::vector<std::complex<double>> fgrid(static_cast<size_t>(nw2) * nw2);
    for (int w1 = 0; w1 < nw2; ++w1) {
        double omega = w1 * domega;
        for (int w2 = 0; w2 < nw2; ++w2) {
            KahanComplexSum acc;
            for (int i = 0; i < ns; ++i) {
                double u = -f.half_width + i * hs;
                double weight = (i == 0 || i == ns - 1) ? 0.5 : 1.0;
                std::complex<double> ph(std::cos(omega * u), -std::sin(omega * u));
                acc.add(weight * ph * stage1[static_cast<size_t>(i) * nw2 + w2]);
            }
            fgrid[static_cast<size_t>(w1) * nw2 + w2] = acc.value() * hs;
        }
    }
    const double f0 = fgrid[0].real();
    auto dff2_at = [&](double o1, double o2) {
        double i1 = std::min(o1 / domega, static_cast<double>(nw2 - 1));
        double i2 = std::min(o2 / domega, static_cast<double>(nw2 - 1));
        int a = static_cast<int>(i1), b = static_cast<int>(i2);
        double ta = i1 - a, tb = i2 - b;
        auto at = [&](int x, int y) {
            x = std::min(x, nw2 - 1);
            y = std::min(y, nw2 - 1);
            return fgrid[static_cast<size_t>(x) * nw2 + y];
        };
        std::complex<double> v = (1 - ta) * (1 - tb) * at(a, b) + ta * (1 - tb) * at(a + 1, b) +
                                 (1 - ta) * tb * at(a, b + 1) + ta * tb * at(a + 1, b + 1);
        return std::norm(v - f0);
    };
    double omega_dec = omega_cap;
    {
        double thresh = std::max(1e-8, 1e-6 * f0 * f0);
        for (int w = nw2 - 1; w >= 1; --w) {
            double m = std::norm(fgrid[static_cast<size_t>(w)]);
            m = std::max(m, std::norm(fgrid[static_cast<size_t>(w) * nw2]));
            if (m > thresh) {
                omega_dec = std::min(omega_cap, (w + 2) * domega);
                break;
            }
        }
    }
    for (const auto& tvec : t_seq) {
        double t1 = tvec[0], t2 = tvec[1];
        double w1 = t1 * omega_dec, w2 = t2 * omega_dec;
        // quadrature over the quarter box [0,w1]x[0,w2], exploiting the
        // reflection symmetry |F(-omega)| = |F(omega)| of real samples
        double h1 = 0.5, h2 = 0.5;
        int n1 = std::max(1, static_cast<int>(std::ceil(w1 / h1)));
        int n2 = std::max(1, static_cast<int>(std::ceil(w2 / h2)));
        h1 = w1 / n1;
        h2 = w2 / n2;
        KahanSum box;
        for (int a = 0; a < n1; ++a)
            for (int b = 0; b < n2; ++b) {
                double nu1 = (a + 0.5) * h1, nu2 = (b + 0.5) * h2;
                double val = chi1_sq(nu1) * chi1_sq(nu2) * dff2_at(nu1 / t1, nu2 / t2);
                box.add(val * h1 * h2);
            }
        double inner = 4.0 * box.value();  // four quadrants
        double chi_full = chi_line_l2_squared();
        double tail = f0 * f0 * (chi_tail_l2_squared(w1) * chi_full +
                                 chi_tail_l2_squared(w2) * chi_full -
                                 chi_tail_l2_squared(w1) * chi_tail_l2_squared(w2));
        double err2 = (inner + tail) / (kTwoPi * kTwoPi);
        errors.push_back(std::sqrt(std::max(0.0, err2)));
    }
    return errors;
}

}  // namespace nilflow
