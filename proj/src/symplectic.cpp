#include "nilflow/symplectic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <deque>
#include <stdexcept>
#include <string>
#include <tuple>
#include <unordered_set>
#include <unsupported/Eigen/MatrixFunctions>
#include <vector>

#include "nilflow/errors.hpp"
#include "nilflow/numeric.hpp"

namespace nilflow {

namespace {

Eigen::MatrixXd standard_j(int g) {
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(2 * g, 2 * g);
    j.topRightCorner(g, g) = Eigen::MatrixXd::Identity(g, g);
    j.bottomLeftCorner(g, g) = -Eigen::MatrixXd::Identity(g, g);
    return j;
}

}  // namespace

SymplecticMatrix::SymplecticMatrix(int g_, Eigen::MatrixXd m_, double tol) : g(g_), m(std::move(m_)) {
    if (g < 1 || m.rows() != 2 * g || m.cols() != 2 * g)
        throw std::invalid_argument("SymplecticMatrix: expected a 2g x 2g matrix");
    if (!is_symplectic(m, tol))
        throw std::invalid_argument("SymplecticMatrix: M^T J M != J beyond tolerance");
}

SymplecticMatrix SymplecticMatrix::identity(int g) {
    return SymplecticMatrix(g, Eigen::MatrixXd::Identity(2 * g, 2 * g));
}

SymplecticMatrix SymplecticMatrix::inverse() const {
    Eigen::MatrixXd inv(2 * g, 2 * g);
    inv.topLeftCorner(g, g) = block_d().transpose();
    inv.topRightCorner(g, g) = -block_b().transpose();
    inv.bottomLeftCorner(g, g) = -block_c().transpose();
    inv.bottomRightCorner(g, g) = block_a().transpose();
    SymplecticMatrix out;
    out.g = g;
    out.m = std::move(inv);
    return out;
}

SiegelPoint::SiegelPoint(Eigen::MatrixXd x, Eigen::MatrixXd y)
    : real_part(std::move(x)), imag_part(std::move(y)) {
    const auto n = real_part.rows();
    if (n < 1 || real_part.cols() != n || imag_part.rows() != n || imag_part.cols() != n)
        throw std::invalid_argument("SiegelPoint: expected square g x g parts");
    if ((real_part - real_part.transpose()).cwiseAbs().maxCoeff() > 1e-12 ||
        (imag_part - imag_part.transpose()).cwiseAbs().maxCoeff() > 1e-12)
        throw std::invalid_argument("SiegelPoint: parts must be symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(imag_part);
    if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0.0)
        throw std::invalid_argument("SiegelPoint: imaginary part must be positive definite");
}

SiegelPoint SiegelPoint::basepoint(int g) {
    return SiegelPoint(Eigen::MatrixXd::Zero(g, g), Eigen::MatrixXd::Identity(g, g));
}

RenormalizationDirection::RenormalizationDirection(std::vector<int> idx, Eigen::VectorXd times, int g)
    : indices(std::move(idx)), t(std::move(times)) {
    if (indices.empty() || static_cast<int>(indices.size()) > g)
        throw std::invalid_argument("RenormalizationDirection: rank must satisfy 1 <= d <= g");
    if (static_cast<int>(indices.size()) != t.size())
        throw std::invalid_argument("RenormalizationDirection: indices and times differ in length");
    std::vector<bool> seen(g, false);
    for (int i : indices) {
        if (i < 0 || i >= g) throw std::invalid_argument("RenormalizationDirection: index out of range");
        if (seen[i]) throw std::invalid_argument("RenormalizationDirection: indices must be distinct");
        seen[i] = true;
    }
}

RenormalizationDirection RenormalizationDirection::leading(Eigen::VectorXd times, int g) {
    std::vector<int> idx(static_cast<size_t>(times.size()));
    for (size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
    return RenormalizationDirection(std::move(idx), std::move(times), g);
}

bool is_symplectic(const Eigen::MatrixXd& m, double tol) {
    if (m.rows() != m.cols() || m.rows() % 2 != 0 || m.rows() < 2)
        throw std::invalid_argument("is_symplectic: expected a square matrix of even dimension");
    const int g = static_cast<int>(m.rows()) / 2;
    Eigen::MatrixXd j = standard_j(g);
    return (m.transpose() * j * m - j).cwiseAbs().maxCoeff() <= tol;
}

std::complex<double> moebius_denominator_det(const SymplecticMatrix& m, const SiegelPoint& z) {
    const int g = m.g;
    Eigen::MatrixXcd zc = z.real_part.cast<std::complex<double>>() +
                          std::complex<double>(0, 1) * z.imag_part.cast<std::complex<double>>();
    Eigen::MatrixXcd den = m.block_c().cast<std::complex<double>>() * zc +
                           m.block_d().cast<std::complex<double>>();
    return Eigen::PartialPivLU<Eigen::MatrixXcd>(den).determinant();
}

SiegelPoint moebius_action(const SymplecticMatrix& m, const SiegelPoint& z) {
    const int g = m.g;
    if (z.genus() != g) throw std::invalid_argument("moebius_action: genus mismatch");
    Eigen::MatrixXcd zc = z.real_part.cast<std::complex<double>>() +
                          std::complex<double>(0, 1) * z.imag_part.cast<std::complex<double>>();
    Eigen::MatrixXcd num = m.block_a().cast<std::complex<double>>() * zc +
                           m.block_b().cast<std::complex<double>>();
    Eigen::MatrixXcd den = m.block_c().cast<std::complex<double>>() * zc +
                           m.block_d().cast<std::complex<double>>();
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(den);
    std::complex<double> det = lu.determinant();
    double scale = den.cwiseAbs().maxCoeff();
    if (!(std::abs(det) > 1e-13 * std::max(1.0, std::pow(scale, g))))
        throw NumericSingularityError("moebius_action: CZ + D is numerically singular");
    // Solve W (CZ+D) = (AZ+B), i.e. (CZ+D)^T W^T = (AZ+B)^T.
    Eigen::MatrixXcd w = Eigen::PartialPivLU<Eigen::MatrixXcd>(den.transpose())
                             .solve(num.transpose())
                             .transpose();
    Eigen::MatrixXcd anti = w - w.transpose();
    double wscale = std::max(1.0, w.cwiseAbs().maxCoeff());
    if (anti.cwiseAbs().maxCoeff() > 1e-8 * wscale)
        throw NumericSingularityError("moebius_action: output lost symmetry beyond 1e-8");
    w = 0.5 * (w + w.transpose().eval());
    return SiegelPoint(w.real(), w.imag());
}

double height(const SiegelPoint& z) { return z.imag_part.determinant(); }

SiegelPoint siegel_point(const SymplecticMatrix& alpha) {
    return moebius_action(alpha.inverse(), SiegelPoint::basepoint(alpha.g));
}

double max_height_exact_g1(const SiegelPoint& z) {
    if (z.genus() != 1) throw std::invalid_argument("max_height_exact_g1: g must be 1");
    double x = z.real_part(0, 0);
    double y = z.imag_part(0, 0);
    for (int step = 0; step < 10000; ++step) {
        x -= std::round(x);
        double q = x * x + y * y;
        if (q >= 1.0 - 1e-15) return y;
        x = -x / q;
        y = y / q;
    }
    throw std::runtime_error("max_height_exact_g1: reduction did not converge in 10^4 steps");
}

namespace {

// Word search over a fixed generator set of Sp(2g, Z) acting on the Siegel
// space, memoized on visited points. The "snap" translation X -> X - round(X)
// counts as a single move so the classical reduction path fits in the depth.
struct SiegelStateSearch {
    int g;
    int depth;
    double best = 0.0;
    std::unordered_set<std::string> seen;

    std::string key(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) const {
        std::string k;
        k.reserve(static_cast<size_t>(32 * g * g));
        char buf[32];
        for (int i = 0; i < g; ++i)
            for (int j = 0; j < g; ++j) {
                std::snprintf(buf, sizeof buf, "%.9e|%.9e;", x(i, j), y(i, j));
                k += buf;
            }
        return k;
    }

    void run(const Eigen::MatrixXd& x0, const Eigen::MatrixXd& y0) {
        std::deque<std::tuple<Eigen::MatrixXd, Eigen::MatrixXd, int>> queue;
        queue.emplace_back(x0, y0, 0);
        seen.insert(key(x0, y0));
        best = y0.determinant();
        while (!queue.empty()) {
            auto [x, y, lvl] = queue.front();
            queue.pop_front();
            if (lvl >= depth) continue;
            expand(x, y, lvl, queue);
        }
    }

    void visit(Eigen::MatrixXd x, Eigen::MatrixXd y, int lvl,
               std::deque<std::tuple<Eigen::MatrixXd, Eigen::MatrixXd, int>>& queue) {
        x = 0.5 * (x + x.transpose().eval());
        y = 0.5 * (y + y.transpose().eval());
        auto k = key(x, y);
        if (!seen.insert(k).second) return;
        best = std::max(best, y.determinant());
        queue.emplace_back(std::move(x), std::move(y), lvl);
    }

    void invert(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, int lvl,
                std::deque<std::tuple<Eigen::MatrixXd, Eigen::MatrixXd, int>>& queue) {
        // Z -> -Z^{-1}
        Eigen::MatrixXcd z = x.cast<std::complex<double>>() +
                             std::complex<double>(0, 1) * y.cast<std::complex<double>>();
        Eigen::PartialPivLU<Eigen::MatrixXcd> lu(z);
        Eigen::MatrixXcd zi = -lu.inverse();
        visit(zi.real(), zi.imag(), lvl, queue);
    }

    void conjugate(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, const Eigen::MatrixXd& u,
                   int lvl, std::deque<std::tuple<Eigen::MatrixXd, Eigen::MatrixXd, int>>& queue) {
        // Z -> U Z U^T
        visit(u * x * u.transpose(), u * y * u.transpose(), lvl, queue);
    }

    void expand(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, int lvl,
                std::deque<std::tuple<Eigen::MatrixXd, Eigen::MatrixXd, int>>& queue) {
        const int nl = lvl + 1;
        // snap translation
        Eigen::MatrixXd snapped = x;
        for (int i = 0; i < g; ++i)
            for (int j = 0; j < g; ++j) snapped(i, j) = x(i, j) - std::round(x(i, j));
        visit(snapped, y, nl, queue);
        // unit translations by a basis of symmetric integer matrices
        for (int i = 0; i < g; ++i)
            for (int j = i; j < g; ++j) {
                Eigen::MatrixXd s = Eigen::MatrixXd::Zero(g, g);
                s(i, j) = s(j, i) = 1.0;
                visit(x + s, y, nl, queue);
                visit(x - s, y, nl, queue);
            }
        invert(x, y, nl, queue);
        if (g > 1) {
            for (int i = 0; i < g; ++i)
                for (int j = 0; j < g; ++j) {
                    if (i == j) continue;
                    Eigen::MatrixXd u = Eigen::MatrixXd::Identity(g, g);
                    u(i, j) = 1.0;
                    conjugate(x, y, u, nl, queue);
                    u(i, j) = -1.0;
                    conjugate(x, y, u, nl, queue);
                }
            for (int i = 0; i + 1 < g; ++i) {
                Eigen::MatrixXd u = Eigen::MatrixXd::Identity(g, g);
                u(i, i) = u(i + 1, i + 1) = 0.0;
                u(i, i + 1) = u(i + 1, i) = 1.0;
                conjugate(x, y, u, nl, queue);
            }
            Eigen::MatrixXd u = Eigen::MatrixXd::Identity(g, g);
            u(0, 0) = -1.0;
            conjugate(x, y, u, nl, queue);
        }
    }
};

// Specialized g = 1 search; states are (x, y) pairs keyed by quantized
// mantissas, generators {snap-translate, T, T^{-1}, S}.
double word_search_g1(double x0, double y0, int depth) {
    struct Key {
        std::int64_t xm, ym;
        int xe, ye;
        bool operator==(const Key& o) const {
            return xm == o.xm && ym == o.ym && xe == o.xe && ye == o.ye;
        }
    };
    struct KeyHash {
        size_t operator()(const Key& k) const {
            std::uint64_t h = 0x9E3779B97F4A7C15ull;
            auto mix = [&h](std::uint64_t v) {
                h ^= v + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
            };
            mix(static_cast<std::uint64_t>(k.xm));
            mix(static_cast<std::uint64_t>(k.ym));
            mix(static_cast<std::uint64_t>(static_cast<std::int64_t>(k.xe)));
            mix(static_cast<std::uint64_t>(static_cast<std::int64_t>(k.ye)));
            return h;
        }
    };
    auto quantize = [](double v, std::int64_t& m, int& e) {
        int ex;
        double mant = std::frexp(v, &ex);  // |mant| in [0.5, 1)
        m = static_cast<std::int64_t>(std::llround(mant * 0x1p40));
        e = ex;
    };
    auto key_of = [&](double x, double y) {
        Key k;
        quantize(x, k.xm, k.xe);
        quantize(y, k.ym, k.ye);
        return k;
    };

    std::unordered_set<Key, KeyHash> seen;
    std::vector<std::tuple<double, double, int>> queue;
    queue.reserve(1 << 12);
    queue.emplace_back(x0, y0, 0);
    seen.insert(key_of(x0, y0));
    double best = y0;
    size_t head = 0;
    auto visit = [&](double x, double y, int lvl) {
        if (!seen.insert(key_of(x, y)).second) return;
        best = std::max(best, y);
        queue.emplace_back(x, y, lvl);
    };
    while (head < queue.size()) {
        auto [x, y, lvl] = queue[head++];
        if (lvl >= depth) continue;
        const int nl = lvl + 1;
        visit(x - std::round(x), y, nl);
        visit(x + 1.0, y, nl);
        visit(x - 1.0, y, nl);
        double q = x * x + y * y;
        visit(-x / q, y / q, nl);
    }
    return best;
}

}  // namespace

double max_height_word_search(const SiegelPoint& z, int depth) {
    if (depth < 0) throw std::invalid_argument("max_height_word_search: depth must be >= 0");
    if (z.genus() == 1) return word_search_g1(z.real_part(0, 0), z.imag_part(0, 0), depth);
    SiegelStateSearch search{z.genus(), depth};
    search.run(z.real_part, z.imag_part);
    return search.best;
}

double max_height(const SiegelPoint& z, int depth) {
    if (depth < 0) throw std::invalid_argument("max_height: depth must be >= 0");
    if (z.genus() == 1) return max_height_exact_g1(z);
    return max_height_word_search(z, depth);
}

SymplecticMatrix renormalize(const SymplecticMatrix& alpha, const RenormalizationDirection& dir) {
    const int g = alpha.g;
    for (int i : dir.indices)
        if (i < 0 || i >= g) throw std::invalid_argument("renormalize: direction index out of range");
    Eigen::VectorXd diag = Eigen::VectorXd::Ones(2 * g);
    for (int k = 0; k < dir.rank(); ++k) {
        diag[dir.indices[k]] = std::exp(dir.t[k]);
        diag[g + dir.indices[k]] = std::exp(-dir.t[k]);
    }
    SymplecticMatrix out;
    out.g = g;
    out.m = diag.asDiagonal() * alpha.m;
    return out;
}

namespace {

double renormalized_hgt(const SymplecticMatrix& alpha_inv, const Eigen::VectorXd& t, int d, int g,
                        int depth) {
    // Z([[r_{-t} alpha]]) = alpha^{-1} r_t . iI; build alpha^{-1} r_t directly.
    Eigen::VectorXd diag = Eigen::VectorXd::Ones(2 * g);
    for (int k = 0; k < d; ++k) {
        diag[k] = std::exp(t[k]);
        diag[g + k] = std::exp(-t[k]);
    }
    SymplecticMatrix composed;
    composed.g = g;
    composed.m = alpha_inv.m * diag.asDiagonal();
    SiegelPoint z = moebius_action(composed, SiegelPoint::basepoint(g));
    return max_height(z, depth);
}

}  // namespace

double dc_integral(const SymplecticMatrix& alpha, int d, double cutoff, double step, int depth) {
    if (cutoff < 0.0) throw std::invalid_argument("dc_integral: cutoff must be >= 0");
    if (step <= 0.0) throw std::invalid_argument("dc_integral: step must be > 0");
    if (d < 1 || d > alpha.g) throw std::invalid_argument("dc_integral: need 1 <= d <= g");
    if (cutoff == 0.0) return 0.0;
    const int n = std::max(1, static_cast<int>(std::llround(cutoff / step)));
    const double h = cutoff / n;
    SymplecticMatrix ainv = alpha.inverse();

    Eigen::VectorXd t(d);
    std::vector<int> idx(static_cast<size_t>(d), 0);
    KahanSum acc;
    while (true) {
        double w = 1.0;
        double tsum = 0.0;
        for (int k = 0; k < d; ++k) {
            t[k] = idx[static_cast<size_t>(k)] * h;
            tsum += t[k];
            if (idx[static_cast<size_t>(k)] == 0 || idx[static_cast<size_t>(k)] == n) w *= 0.5;
        }
        double hgt = renormalized_hgt(ainv, t, d, alpha.g, depth);
        acc.add(w * std::exp(-0.5 * tsum) * std::pow(hgt, 0.25));
        int k = 0;
        while (k < d && ++idx[static_cast<size_t>(k)] > n) idx[static_cast<size_t>(k++)] = 0;
        if (k == d) break;
    }
    return acc.value() * std::pow(h, d);
}

std::vector<std::pair<double, double>> log_law_profile(const SymplecticMatrix& alpha, int d,
                                                       double t_max, int samples, int depth) {
    if (t_max <= 0.0) throw std::invalid_argument("log_law_profile: tMax must be > 0");
    if (samples < 2) throw std::invalid_argument("log_law_profile: samples must be >= 2");
    if (d < 1 || d > alpha.g) throw std::invalid_argument("log_law_profile: need 1 <= d <= g");
    SymplecticMatrix ainv = alpha.inverse();
    std::vector<std::pair<double, double>> out;
    out.reserve(static_cast<size_t>(samples));
    for (int k = 1; k <= samples; ++k) {
        double s = t_max * k / samples;
        Eigen::VectorXd t = Eigen::VectorXd::Constant(d, s);
        double hgt = renormalized_hgt(ainv, t, d, alpha.g, depth);
        out.emplace_back(s * std::sqrt(static_cast<double>(d)), std::log(hgt));
    }
    return out;
}

SymplecticMatrix random_symplectic(int g, std::uint64_t seed) {
    Rng rng(seed);
    Eigen::MatrixXd p(g, g), q(g, g), r(g, g);
    for (int i = 0; i < g; ++i)
        for (int j = 0; j < g; ++j) p(i, j) = rng.uniform(-1.0, 1.0);
    for (int i = 0; i < g; ++i)
        for (int j = i; j < g; ++j) {
            q(i, j) = q(j, i) = rng.uniform(-1.0, 1.0);
            r(i, j) = r(j, i) = rng.uniform(-1.0, 1.0);
        }
    Eigen::MatrixXd gmat(2 * g, 2 * g);
    gmat.topLeftCorner(g, g) = p;
    gmat.topRightCorner(g, g) = q;
    gmat.bottomLeftCorner(g, g) = r;
    gmat.bottomRightCorner(g, g) = -p.transpose();
    Eigen::MatrixXd m = gmat.exp();
    return SymplecticMatrix(g, m, 1e-8);
}

SymplecticMatrix golden_frame(int g) {
    const double phi = 0.5 * (1.0 + std::sqrt(5.0));
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(2 * g, 2 * g);
    // frame coefficients (alpha^T)^{-1} then carry X_i^alpha = X_i + phi Y_i
    for (int i = 0; i < g; ++i) m(g + i, i) = -phi;
    return SymplecticMatrix(g, m);
}

}  // namespace nilflow
