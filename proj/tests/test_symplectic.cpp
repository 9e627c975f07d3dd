#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "nilflow/errors.hpp"
#include "nilflow/numeric.hpp"
#include "nilflow/symplectic.hpp"

using namespace nilflow;

namespace {

SiegelPoint point1(double x, double y) {
    return SiegelPoint(Eigen::MatrixXd::Constant(1, 1, x), Eigen::MatrixXd::Constant(1, 1, y));
}

SymplecticMatrix sl2(double a, double b, double c, double d) {
    Eigen::MatrixXd m(2, 2);
    m << a, b, c, d;
    return SymplecticMatrix(1, m);
}

SiegelPoint random_point1(Rng& rng) {
    // real part in [-2, 2], imaginary part log-uniform in [0.05, 20]
    double y = 0.05 * std::exp(rng.uniform() * std::log(400.0));
    return point1(rng.uniform(-2.0, 2.0), y);
}

RenormalizationDirection dir1(double t) {
    return RenormalizationDirection::leading(Eigen::VectorXd::Constant(1, t), 1);
}

}  // namespace

TEST_CASE("is_symplectic") {
    CHECK(is_symplectic(Eigen::MatrixXd::Identity(4, 4)));
    Eigen::MatrixXd j(4, 4);
    j.setZero();
    j.topRightCorner(2, 2) = Eigen::MatrixXd::Identity(2, 2);
    j.bottomLeftCorner(2, 2) = -Eigen::MatrixXd::Identity(2, 2);
    CHECK(is_symplectic(j));

    Eigen::MatrixXd bad = Eigen::MatrixXd::Identity(4, 4);
    bad(0, 0) = 2.0;  // non-unit determinant on one conjugate pair
    CHECK_FALSE(is_symplectic(bad));

    CHECK_THROWS_AS(is_symplectic(Eigen::MatrixXd::Identity(3, 3)), std::invalid_argument);
}

TEST_CASE("moebius action on the upper half space") {
    SymplecticMatrix id = SymplecticMatrix::identity(2);
    Rng rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        Eigen::MatrixXd x(2, 2), y(2, 2);
        double a = rng.uniform(-1, 1), b = rng.uniform(-1, 1);
        x << a, b, b, -a;
        y = Eigen::MatrixXd::Identity(2, 2) * rng.uniform(0.5, 2.0);
        SiegelPoint z(x, y);
        SiegelPoint w = moebius_action(id, z);
        CHECK((w.real_part - z.real_part).cwiseAbs().maxCoeff() <= 1e-14);
        CHECK((w.imag_part - z.imag_part).cwiseAbs().maxCoeff() <= 1e-14);
    }

    // g = 1: S sends 2i to i/2, T translates by one
    SymplecticMatrix s = sl2(0, -1, 1, 0);
    SiegelPoint w = moebius_action(s, point1(0.0, 2.0));
    CHECK(w.real_part(0, 0) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(w.imag_part(0, 0) == doctest::Approx(0.5).epsilon(1e-14));

    SymplecticMatrix t = sl2(1, 1, 0, 1);
    SiegelPoint zt = moebius_action(t, point1(0.3, 1.7));
    CHECK(zt.real_part(0, 0) == doctest::Approx(1.3).epsilon(1e-14));
    CHECK(zt.imag_part(0, 0) == doctest::Approx(1.7).epsilon(1e-14));
}

TEST_CASE("moebius action is a group action") {
    Rng rng(13);
    for (int g : {1, 2}) {
        for (int trial = 0; trial < 30; ++trial) {
            SymplecticMatrix m1 = random_symplectic(g, rng.next_u64());
            SymplecticMatrix m2 = random_symplectic(g, rng.next_u64());
            SiegelPoint z = SiegelPoint::basepoint(g);
            SymplecticMatrix m12;
            m12.g = g;
            m12.m = m1.m * m2.m;
            SiegelPoint lhs = moebius_action(m12, z);
            SiegelPoint rhs = moebius_action(m1, moebius_action(m2, z));
            CHECK((lhs.real_part - rhs.real_part).cwiseAbs().maxCoeff() <= 1e-9);
            CHECK((lhs.imag_part - rhs.imag_part).cwiseAbs().maxCoeff() <= 1e-9);
        }
    }
}

TEST_CASE("singular denominator raises") {
    // C Z + D = Z is singular at Z = i - i = 0 only off the upper half
    // space; engineer singularity via S acting on a point with tiny norm is
    // not possible, so test through a genuinely singular complex system:
    // for g = 1, S at Z = i gives CZ+D = i (fine); use Z with imag -> 0
    // blocked by the SiegelPoint validator, so check the validator instead.
    CHECK_THROWS_AS(point1(0.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(point1(0.0, -1.0), std::invalid_argument);
}

TEST_CASE("height") {
    CHECK(height(SiegelPoint::basepoint(3)) == doctest::Approx(1.0));
    Eigen::MatrixXd y(2, 2);
    y << 2, 0, 0, 3;
    CHECK(height(SiegelPoint(Eigen::MatrixXd::Zero(2, 2), y)) == doctest::Approx(6.0));
    SymplecticMatrix s = sl2(0, -1, 1, 0);
    CHECK(height(moebius_action(s, point1(0.0, 2.0))) == doctest::Approx(0.5));
}

TEST_CASE("max height for g = 1 is the exact reduction") {
    CHECK(max_height(point1(0.0, 2.0)) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(max_height(point1(0.0, 0.1)) == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(max_height(point1(0.5, 1.2)) == doctest::Approx(1.2).epsilon(1e-12));
    // never below the plain height, invariant under integral moves
    Rng rng(17);
    for (int trial = 0; trial < 200; ++trial) {
        SiegelPoint z = random_point1(rng);
        double h = max_height(z);
        CHECK(h >= height(z) - 1e-12);
        SiegelPoint zt = moebius_action(sl2(1, 1, 0, 1), z);
        SiegelPoint zs = moebius_action(sl2(0, -1, 1, 0), z);
        CHECK(max_height(zt) == doctest::Approx(h).epsilon(1e-10));
        CHECK(max_height(zs) == doctest::Approx(h).epsilon(1e-10));
    }
}

TEST_CASE("word search agrees with the exact g = 1 reduction") {
    Rng rng(19);
    for (int trial = 0; trial < 100; ++trial) {
        SiegelPoint z = random_point1(rng);
        double exact = max_height_exact_g1(z);
        double searched = max_height_word_search(z, 14);
        CHECK(std::abs(exact - searched) <= 1e-9 * std::max(1.0, exact));
    }
}

TEST_CASE("word search is a certified lower bound for g = 2") {
    Rng rng(23);
    for (int trial = 0; trial < 5; ++trial) {
        SymplecticMatrix alpha = random_symplectic(2, rng.next_u64());
        SiegelPoint z = siegel_point(alpha);
        double d3 = max_height_word_search(z, 3);
        double d5 = max_height_word_search(z, 5);
        CHECK(d3 >= height(z) - 1e-12);
        CHECK(d5 >= d3 - 1e-12);  // deeper search can only improve
    }
}

TEST_CASE("renormalize") {
    SymplecticMatrix id = SymplecticMatrix::identity(1);
    SymplecticMatrix same = renormalize(id, dir1(0.0));
    CHECK((same.m - id.m).cwiseAbs().maxCoeff() == 0.0);

    double s = 0.8;
    SymplecticMatrix r = renormalize(id, dir1(s));
    CHECK(r.m(0, 0) == doctest::Approx(std::exp(s)).epsilon(1e-15));
    CHECK(r.m(1, 1) == doctest::Approx(std::exp(-s)).epsilon(1e-15));

    Rng rng(29);
    for (int g : {2, 3}) {
        SymplecticMatrix alpha = random_symplectic(g, rng.next_u64());
        Eigen::VectorXd t(2);
        t << 0.5, -0.3;
        RenormalizationDirection dir({0, g - 1}, t, g);
        SymplecticMatrix out = renormalize(alpha, dir);
        CHECK(is_symplectic(out.m, 1e-9));
    }
    CHECK_THROWS_AS(RenormalizationDirection({0, 0}, Eigen::VectorXd::Zero(2), 2),
                    std::invalid_argument);
}

TEST_CASE("height along the renormalization geodesic of the identity") {
    // Hgt([[r_t id]]) = e^{2|t|}: the Siegel point of r_t id is e^{-2t} i
    // under the coset identification, and its class height is e^{2t}.
    for (double t : {0.5, 1.0, 2.0}) {
        SymplecticMatrix r = renormalize(SymplecticMatrix::identity(1), dir1(t));
        SiegelPoint z = siegel_point(r);
        CHECK(z.imag_part(0, 0) == doctest::Approx(std::exp(-2 * t)).epsilon(1e-12));
        CHECK(max_height(z) ==
              doctest::Approx(std::exp(2 * t) * max_height(SiegelPoint::basepoint(1))).epsilon(1e-10));
    }
}

TEST_CASE("renormalized height inequality") {
    // Hgt([[r_{-t} alpha]]) <= det(e^{t delta})^2 Hgt([[alpha]]) (1 + 1e-6)
    Rng rng(31);
    for (int trial = 0; trial < 200; ++trial) {
        SymplecticMatrix alpha = random_symplectic(1, rng.next_u64());
        double t = rng.uniform(0.0, 3.0);
        double lhs = max_height(siegel_point(renormalize(alpha, dir1(-t))));
        double rhs = std::exp(2.0 * t) * max_height(siegel_point(alpha));
        CHECK(lhs <= rhs * (1.0 + 1e-6));
    }
    // g = 2, rank 2, bounded-depth certification on both sides
    for (int trial = 0; trial < 10; ++trial) {
        SymplecticMatrix alpha = random_symplectic(2, rng.next_u64());
        Eigen::VectorXd t(2);
        t << rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0);
        RenormalizationDirection fwd = RenormalizationDirection::leading(-t, 2);
        double lhs = max_height(siegel_point(renormalize(alpha, fwd)), 4);
        double rhs = std::exp(2.0 * t.sum()) * max_height(siegel_point(alpha), 4);
        CHECK(lhs <= rhs * (1.0 + 1e-6));
    }
}

TEST_CASE("dc integral") {
    SymplecticMatrix id = SymplecticMatrix::identity(1);
    CHECK(dc_integral(id, 1, 0.0, 0.05) == 0.0);

    // identity integrand is exactly 1, so the integral equals the cutoff
    CHECK(dc_integral(id, 1, 5.0, 0.05) == doctest::Approx(5.0).epsilon(1e-9));
    CHECK(dc_integral(id, 1, 10.0, 0.05) == doctest::Approx(10.0).epsilon(1e-9));

    // monotone in the cutoff
    SymplecticMatrix g = golden_frame(1);
    double v5 = dc_integral(g, 1, 5.0, 0.05);
    double v10 = dc_integral(g, 1, 10.0, 0.05);
    double v20 = dc_integral(g, 1, 20.0, 0.05);
    CHECK(v5 <= v10 + 1e-12);
    CHECK(v10 <= v20 + 1e-12);

    // bounded type: the tail beyond cutoff 20 is negligible
    double v40 = dc_integral(g, 1, 40.0, 0.05);
    CHECK(std::abs(v40 - v20) <= 0.01 * v40);
}

TEST_CASE("log law profile") {
    SymplecticMatrix id = SymplecticMatrix::identity(1);
    auto profile = log_law_profile(id, 1, 5.0, 20);
    REQUIRE(profile.size() == 20);
    for (const auto& p : profile) {
        // identity: log Hgt = 2 t exactly (non-Roth, slope 2 > 2d/(g+1) = 1)
        CHECK(p.second == doctest::Approx(2.0 * p.first).epsilon(1e-8));
    }

    // bounded type: all values below a single constant
    auto golden = log_law_profile(golden_frame(1), 1, 15.0, 60);
    double max_log = 0.0;
    for (const auto& p : golden) max_log = std::max(max_log, p.second);
    CHECK(max_log <= std::log(5.0));
}

TEST_CASE("log law statistics for random frames") {
    // empirical check of the Roth-type bound: the linear slope of log Hgt
    // beyond a burn-in is below 2d/(g+1) + 0.2 for at least 90% of samples
    Rng rng(37);
    const int total = 50;
    int good = 0;
    for (int trial = 0; trial < total; ++trial) {
        SymplecticMatrix alpha = random_symplectic(1, rng.next_u64());
        auto profile = log_law_profile(alpha, 1, 15.0, 30);
        double slope = 0.0;
        for (const auto& p : profile)
            if (p.first >= 2.5) slope = std::max(slope, p.second / p.first);
        if (slope <= 2.0 / 2.0 + 0.2) ++good;
    }
    CHECK(good >= 45);
}

TEST_CASE("presets") {
    CHECK(is_symplectic(golden_frame(1).m));
    CHECK(is_symplectic(golden_frame(2).m));
    CHECK(is_symplectic(random_symplectic(3, 99).m, 1e-8));
    // the golden frame carries rotation number phi on each plane
    Eigen::MatrixXd f = golden_frame(2).inverse().m.transpose();
    const double phi = 0.5 * (1.0 + std::sqrt(5.0));
    CHECK(f(0, 2) == doctest::Approx(phi).epsilon(1e-15));
    CHECK(f(1, 3) == doctest::Approx(phi).epsilon(1e-15));
}
