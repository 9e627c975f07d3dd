#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "nilflow/heisenberg.hpp"
#include "nilflow/numeric.hpp"
#include "nilflow/symplectic.hpp"
#include "oracles.hpp"

using namespace nilflow;
using nilflow_tests::brute_force_reduce;

namespace {

GroupElement random_element(int g, Rng& rng, double scale = 3.0) {
    Eigen::VectorXd x(g), y(g);
    for (int i = 0; i < g; ++i) x[i] = rng.uniform(-scale, scale);
    for (int i = 0; i < g; ++i) y[i] = rng.uniform(-scale, scale);
    return GroupElement(x, y, rng.uniform(-scale, scale));
}

LieAlgebraVector random_algebra(int g, Rng& rng, double scale = 2.0) {
    Eigen::VectorXd a(g), b(g);
    for (int i = 0; i < g; ++i) a[i] = rng.uniform(-scale, scale);
    for (int i = 0; i < g; ++i) b[i] = rng.uniform(-scale, scale);
    return LieAlgebraVector(a, b, rng.uniform(-scale, scale));
}

double element_distance(const GroupElement& a, const GroupElement& b) {
    double r = std::abs(a.z - b.z);
    r = std::max(r, (a.x - b.x).cwiseAbs().maxCoeff());
    r = std::max(r, (a.y - b.y).cwiseAbs().maxCoeff());
    return r;
}

}  // namespace

TEST_CASE("group law basics") {
    GroupElement e = GroupElement::identity(2);
    Rng rng(11);
    GroupElement a = random_element(2, rng);
    CHECK(element_distance(multiply(e, a), a) == 0.0);
    CHECK(element_distance(multiply(a, e), a) == 0.0);

    // g = 1 product under the x.y' convention
    GroupElement u(Eigen::VectorXd::Constant(1, 1.0), Eigen::VectorXd::Zero(1), 0.0);
    GroupElement v(Eigen::VectorXd::Zero(1), Eigen::VectorXd::Constant(1, 1.0), 0.0);
    GroupElement uv = multiply(u, v);
    CHECK(uv.x[0] == 1.0);
    CHECK(uv.y[0] == 1.0);
    CHECK(uv.z == 1.0);

    CHECK_THROWS_AS(multiply(a, GroupElement::identity(3)), std::invalid_argument);
}

TEST_CASE("group commutator lands in the center") {
    Rng rng(17);
    for (int trial = 0; trial < 50; ++trial) {
        double s = rng.uniform(-2, 2), t = rng.uniform(-2, 2);
        GroupElement a(Eigen::VectorXd::Constant(1, s), Eigen::VectorXd::Zero(1), 0.0);
        GroupElement b(Eigen::VectorXd::Zero(1), Eigen::VectorXd::Constant(1, t), 0.0);
        GroupElement comm = multiply(multiply(a, b), multiply(inverse(a), inverse(b)));
        CHECK(std::abs(comm.x[0]) <= 1e-15);
        CHECK(std::abs(comm.y[0]) <= 1e-15);
        CHECK(comm.z == doctest::Approx(s * t).epsilon(1e-12));
    }
    // commutator of arbitrary elements is central
    for (int trial = 0; trial < 50; ++trial) {
        GroupElement a = random_element(3, rng), b = random_element(3, rng);
        GroupElement comm = multiply(multiply(a, b), multiply(inverse(a), inverse(b)));
        CHECK(comm.x.cwiseAbs().maxCoeff() <= 1e-13);
        CHECK(comm.y.cwiseAbs().maxCoeff() <= 1e-13);
    }
}

TEST_CASE("inverse closed form") {
    GroupElement e = GroupElement::identity(1);
    CHECK(element_distance(inverse(e), e) == 0.0);

    GroupElement a(Eigen::VectorXd::Constant(1, 1.0), Eigen::VectorXd::Constant(1, 1.0), 1.0);
    GroupElement ai = inverse(a);
    CHECK(ai.x[0] == -1.0);
    CHECK(ai.y[0] == -1.0);
    CHECK(ai.z == 0.0);

    Rng rng(23);
    for (int trial = 0; trial < 200; ++trial) {
        GroupElement b = random_element(2, rng);
        CHECK(element_distance(multiply(b, inverse(b)), GroupElement::identity(2)) <= 1e-14);
        CHECK(element_distance(multiply(inverse(b), b), GroupElement::identity(2)) <= 1e-14);
    }
}

TEST_CASE("associativity over random triples") {
    Rng rng(31);
    for (int g : {1, 2, 3}) {
        for (int trial = 0; trial < 200; ++trial) {
            GroupElement a = random_element(g, rng), b = random_element(g, rng),
                         c = random_element(g, rng);
            CHECK(element_distance(multiply(multiply(a, b), c), multiply(a, multiply(b, c))) <= 1e-12);
        }
    }
}

TEST_CASE("central elements commute with everything") {
    Rng rng(37);
    for (int trial = 0; trial < 100; ++trial) {
        GroupElement a = random_element(2, rng);
        GroupElement z(Eigen::VectorXd::Zero(2), Eigen::VectorXd::Zero(2), rng.uniform(-3, 3));
        CHECK(element_distance(multiply(a, z), multiply(z, a)) <= 1e-15);
    }
}

TEST_CASE("exponential map is exact at step 2") {
    CHECK(element_distance(exp_map(LieAlgebraVector::zero(2)), GroupElement::identity(2)) == 0.0);

    LieAlgebraVector x1(Eigen::VectorXd::Constant(1, 1.0), Eigen::VectorXd::Zero(1), 0.0);
    GroupElement ex1 = exp_map(x1);
    CHECK(ex1.x[0] == 1.0);
    CHECK(ex1.y[0] == 0.0);
    CHECK(ex1.z == 0.0);

    // exp(X_1 + Y_1) = (e_1, e_1, 1/2); the square-vs-double oracle pins it
    LieAlgebraVector xy(Eigen::VectorXd::Constant(1, 1.0), Eigen::VectorXd::Constant(1, 1.0), 0.0);
    GroupElement exy = exp_map(xy);
    CHECK(exy.z == 0.5);
    LieAlgebraVector xy2(Eigen::VectorXd::Constant(1, 2.0), Eigen::VectorXd::Constant(1, 2.0), 0.0);
    CHECK(element_distance(multiply(exy, exy), exp_map(xy2)) <= 1e-15);

    Rng rng(41);
    for (int trial = 0; trial < 100; ++trial) {
        LieAlgebraVector v = random_algebra(2, rng);
        double t = rng.uniform(-2, 2), s = rng.uniform(-2, 2);
        LieAlgebraVector vt(t * v.a, t * v.b, t * v.c);
        LieAlgebraVector vs(s * v.a, s * v.b, s * v.c);
        LieAlgebraVector vts((t + s) * v.a, (t + s) * v.b, (t + s) * v.c);
        CHECK(element_distance(multiply(exp_map(vt), exp_map(vs)), exp_map(vts)) <= 1e-13);
        // log inverts exp exactly
        LieAlgebraVector w = log_map(exp_map(v));
        CHECK((w.a - v.a).cwiseAbs().maxCoeff() <= 1e-15);
        CHECK((w.b - v.b).cwiseAbs().maxCoeff() <= 1e-15);
        CHECK(std::abs(w.c - v.c) <= 1e-14);
    }
}

TEST_CASE("BCH terminates at step 2") {
    LieAlgebraVector x1(Eigen::VectorXd::Constant(1, 1.0), Eigen::VectorXd::Zero(1), 0.0);
    LieAlgebraVector y1(Eigen::VectorXd::Zero(1), Eigen::VectorXd::Constant(1, 1.0), 0.0);
    CHECK(bch_check(x1, y1) <= 1e-15);
    CHECK(bch_check(x1, x1) <= 1e-15);

    Rng rng(43);
    for (int g : {1, 2, 3}) {
        double worst = 0.0;
        for (int trial = 0; trial < 1000; ++trial) {
            LieAlgebraVector u = random_algebra(g, rng), v = random_algebra(g, rng);
            worst = std::max(worst, bch_check(u, v));
        }
        CHECK(worst <= 1e-12);
    }
}

TEST_CASE("lattice reduction against the brute-force coset oracle") {
    GroupElement e = GroupElement::identity(1);
    CHECK(element_distance(lattice_reduce(e), e) == 0.0);

    GroupElement a(Eigen::VectorXd::Constant(1, 1.25), Eigen::VectorXd::Constant(1, -0.5), 0.9);
    GroupElement red = lattice_reduce(a);
    CHECK(red.x[0] == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(red.y[0] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(red.z == doctest::Approx(0.15).epsilon(1e-12));  // picks up the x.q central correction
    auto oracle = brute_force_reduce(a);
    REQUIRE(oracle.has_value());
    CHECK(element_distance(red, *oracle) <= 1e-12);

    Rng rng(47);
    for (int trial = 0; trial < 50; ++trial) {
        GroupElement b = random_element(2, rng);
        GroupElement r = lattice_reduce(b);
        CHECK(is_reduced(r));
        // idempotence
        CHECK(element_distance(lattice_reduce(r), r) == 0.0);
        auto o = brute_force_reduce(b);
        REQUIRE(o.has_value());
        CHECK(element_distance(r, *o) <= 1e-12);
    }
}

TEST_CASE("reduction stays in the right coset") {
    Rng rng(53);
    for (int g : {1, 2}) {
        for (int trial = 0; trial < 200; ++trial) {
            GroupElement a = random_element(g, rng, 5.0);
            GroupElement gamma = multiply(inverse(a), lattice_reduce(a));
            for (int i = 0; i < g; ++i) {
                CHECK(std::abs(gamma.x[i] - std::round(gamma.x[i])) <= 1e-10);
                CHECK(std::abs(gamma.y[i] - std::round(gamma.y[i])) <= 1e-10);
            }
            CHECK(std::abs(2 * gamma.z - std::round(2 * gamma.z)) <= 1e-10);
        }
    }
}

TEST_CASE("frame transform") {
    // identity gives the standard frame
    Frame f = frame_transform(SymplecticMatrix::identity(2));
    CHECK((f.coeffs - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() == 0.0);

    // diagonal geodesic: X^alpha picks e^{-t} on X, Y^alpha picks e^{t} on Y
    double t = 0.7;
    Eigen::MatrixXd m(2, 2);
    m << std::exp(t), 0, 0, std::exp(-t);
    Frame fd = frame_transform(SymplecticMatrix(1, m));
    CHECK(fd.coeffs(0, 0) == doctest::Approx(std::exp(-t)).epsilon(1e-15));
    CHECK(fd.coeffs(0, 1) == 0.0);
    CHECK(fd.coeffs(1, 1) == doctest::Approx(std::exp(t)).epsilon(1e-15));

    // functoriality: coeffs(alpha beta) = coeffs(alpha) coeffs(beta)
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        SymplecticMatrix a = random_symplectic(2, seed);
        SymplecticMatrix b = random_symplectic(2, seed + 100);
        SymplecticMatrix ab;
        ab.g = 2;
        ab.m = a.m * b.m;
        Eigen::MatrixXd lhs = frame_transform(ab).coeffs;
        Eigen::MatrixXd rhs = frame_transform(a).coeffs * frame_transform(b).coeffs;
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-10);
        // the frame coefficient matrix is itself symplectic
        CHECK(is_symplectic(frame_transform(a).coeffs, 1e-9));
    }

    Eigen::MatrixXd bad = Eigen::MatrixXd::Identity(2, 2) * 2.0;
    SymplecticMatrix wrapper;
    wrapper.g = 1;
    wrapper.m = bad;
    CHECK_THROWS_AS(frame_transform(wrapper), std::invalid_argument);
}
