// Test-only oracles, independent of the library code paths they check.
#ifndef NILFLOW_TESTS_ORACLES_HPP
#define NILFLOW_TESTS_ORACLES_HPP

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <optional>

#include "nilflow/dynamics.hpp"
#include "nilflow/heisenberg.hpp"
#include "nilflow/numeric.hpp"

namespace nilflow_tests {

// Search over lattice words gamma = (p, q, r) near the floor solution for a
// coset representative of `a` inside the fundamental window, verifying window
// membership through the group law.
inline std::optional<nilflow::GroupElement> brute_force_reduce(const nilflow::GroupElement& a) {
    const int g = a.rank();
    std::vector<int> dp(static_cast<size_t>(g), -1), dq(static_cast<size_t>(g), -1);
    double zbound = std::abs(a.z) + 1.0;
    for (int i = 0; i < g; ++i) zbound += std::abs(a.x[i]) * (std::abs(a.y[i]) + 2.0);
    const int rmax = 2 * static_cast<int>(std::ceil(zbound)) + 2;
    for (;;) {
        for (;;) {
            Eigen::VectorXd pv(g), qv(g);
            for (int i = 0; i < g; ++i) {
                pv[i] = -std::floor(a.x[i]) + dp[static_cast<size_t>(i)];
                qv[i] = -std::floor(a.y[i]) + dq[static_cast<size_t>(i)];
            }
            for (int rr = -rmax; rr <= rmax; ++rr) {
                nilflow::GroupElement gamma(pv, qv, 0.5 * rr);
                nilflow::GroupElement cand = nilflow::multiply(a, gamma);
                if (nilflow::is_reduced(cand, 0.0)) return cand;
            }
            int i = 0;
            while (i < g && ++dq[static_cast<size_t>(i)] > 1) dq[static_cast<size_t>(i++)] = -1;
            if (i == g) break;
        }
        int i = 0;
        while (i < g && ++dp[static_cast<size_t>(i)] > 1) dp[static_cast<size_t>(i++)] = -1;
        if (i == g) break;
    }
    return std::nullopt;
}

// One application of the i-th component skew shift (or its inverse).
inline nilflow::TorusPoint skew_apply_once(const nilflow::SkewShift& shift,
                                           const nilflow::TorusPoint& p, int i, int dir) {
    nilflow::TorusPoint out = p;
    const double zp = shift.z_period();
    if (dir > 0) {
        double inc = shift.v.row(i).dot(p.y) + shift.tau[i];
        for (int k = 0; k < shift.g; ++k) out.y[k] = nilflow::mod_unit(p.y[k] + shift.rho(i, k));
        out.z = nilflow::mod_window(p.z + inc, zp);
    } else {
        for (int k = 0; k < shift.g; ++k) out.y[k] = nilflow::mod_unit(p.y[k] - shift.rho(i, k));
        double inc = shift.v.row(i).dot(out.y) + shift.tau[i];
        out.z = nilflow::mod_window(p.z - inc, zp);
    }
    return out;
}

// Literal iterated composition of A^j, one application at a time.
inline nilflow::TorusPoint skew_iterate_literal(const nilflow::SkewShift& shift,
                                                const nilflow::TorusPoint& p,
                                                const Eigen::VectorXi& j) {
    nilflow::TorusPoint cur = p;
    for (int i = 0; i < shift.d; ++i) {
        int n = std::abs(j[i]);
        int dir = j[i] >= 0 ? 1 : -1;
        for (int s = 0; s < n; ++s) cur = skew_apply_once(shift, cur, i, dir);
    }
    return cur;
}

// First positive return time of the rank-1 flow along X_1^alpha from the
// section point (0, y, z), found by bisection on the crossing of the x
// coordinate through the integer lattice (g = 1 only).
inline double first_return_time_bisection(const nilflow::SymplecticMatrix& alpha, double y,
                                          double z) {
    using namespace nilflow;
    Frame frame = frame_transform(alpha);
    double a = frame.coeffs(0, 0);
    GroupElement base(Eigen::VectorXd::Zero(1), Eigen::VectorXd::Constant(1, y), z);
    auto xcoord = [&](double t) {
        Eigen::VectorXd tv = Eigen::VectorXd::Constant(1, t);
        Eigen::VectorXd av = frame.coeffs.row(0).head(1).transpose();
        Eigen::VectorXd bv = frame.coeffs.row(0).tail(1).transpose();
        GroupElement u(t * av, t * bv, 0.5 * t * t * av.dot(bv));
        return multiply(u, base).x[0];  // unreduced
    };
    // the unreduced x coordinate is t*a; bracket the first integer crossing
    double target = a > 0 ? 1.0 : -1.0;
    double lo = 0.0, hi = std::abs(1.5 / a);
    while (xcoord(hi) * target < 1.0) hi *= 1.5;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (xcoord(mid) * target < 1.0)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-13) break;
    }
    return 0.5 * (lo + hi);
}

inline nilflow::Observable single_character(int g, const Eigen::VectorXi& m, int n,
                                            std::complex<double> c = {1.0, 0.0}, double K = 2.0) {
    nilflow::Observable f(g, K);
    f.add_term(m, n, c);
    return f;
}

inline Eigen::VectorXi label1(int m) { return Eigen::VectorXi::Constant(1, m); }

}  // namespace nilflow_tests

#endif
