#include "nilflow/heisenberg.hpp"

#include <cmath>
#include <stdexcept>

#include "nilflow/numeric.hpp"

namespace nilflow {

namespace {

void require_same_rank(int a, int b, const char* what) {
    if (a != b) throw std::invalid_argument(std::string(what) + ": rank mismatch");
}

}  // namespace

GroupElement::GroupElement(Eigen::VectorXd x_, Eigen::VectorXd y_, double z_)
    : x(std::move(x_)), y(std::move(y_)), z(z_) {
    if (x.size() != y.size() || x.size() < 1)
        throw std::invalid_argument("GroupElement: x and y must have equal length g >= 1");
}

GroupElement GroupElement::identity(int g) {
    return GroupElement(Eigen::VectorXd::Zero(g), Eigen::VectorXd::Zero(g), 0.0);
}

LieAlgebraVector::LieAlgebraVector(Eigen::VectorXd a_, Eigen::VectorXd b_, double c_)
    : a(std::move(a_)), b(std::move(b_)), c(c_) {
    if (a.size() != b.size() || a.size() < 1)
        throw std::invalid_argument("LieAlgebraVector: a and b must have equal length g >= 1");
}

LieAlgebraVector LieAlgebraVector::zero(int g) {
    return LieAlgebraVector(Eigen::VectorXd::Zero(g), Eigen::VectorXd::Zero(g), 0.0);
}

LieAlgebraVector Frame::x_vector(int i) const {
    return LieAlgebraVector(coeffs.row(i).head(g).transpose(),
                            coeffs.row(i).tail(g).transpose(), 0.0);
}

LieAlgebraVector Frame::y_vector(int i) const {
    return LieAlgebraVector(coeffs.row(g + i).head(g).transpose(),
                            coeffs.row(g + i).tail(g).transpose(), 0.0);
}

LieAlgebraVector Frame::z_vector(int g) { return LieAlgebraVector(Eigen::VectorXd::Zero(g), Eigen::VectorXd::Zero(g), 1.0); }

GroupElement multiply(const GroupElement& a, const GroupElement& b) {
    require_same_rank(a.rank(), b.rank(), "multiply");
    return GroupElement(a.x + b.x, a.y + b.y, a.z + b.z + a.x.dot(b.y));
}

GroupElement inverse(const GroupElement& a) {
    return GroupElement(-a.x, -a.y, a.x.dot(a.y) - a.z);
}

GroupElement exp_map(const LieAlgebraVector& v) {
    return GroupElement(v.a, v.b, v.c + 0.5 * v.a.dot(v.b));
}

LieAlgebraVector log_map(const GroupElement& a) {
    return LieAlgebraVector(a.x, a.y, a.z - 0.5 * a.x.dot(a.y));
}

LieAlgebraVector bracket(const LieAlgebraVector& u, const LieAlgebraVector& v) {
    LieAlgebraVector w = LieAlgebraVector::zero(u.rank());
    w.c = u.a.dot(v.b) - v.a.dot(u.b);
    return w;
}

double bch_check(const LieAlgebraVector& u, const LieAlgebraVector& v) {
    require_same_rank(u.rank(), v.rank(), "bch_check");
    GroupElement lhs = multiply(exp_map(u), exp_map(v));
    LieAlgebraVector w(u.a + v.a, u.b + v.b, u.c + v.c + 0.5 * bracket(u, v).c);
    GroupElement rhs = exp_map(w);
    double r = std::abs(lhs.z - rhs.z);
    r = std::max(r, (lhs.x - rhs.x).cwiseAbs().maxCoeff());
    r = std::max(r, (lhs.y - rhs.y).cwiseAbs().maxCoeff());
    return r;
}

GroupElement lattice_reduce(const GroupElement& a) {
    const int g = a.rank();
    Eigen::VectorXd p(g), q(g);
    for (int j = 0; j < g; ++j) {
        p[j] = -std::floor(a.x[j]);
        q[j] = -std::floor(a.y[j]);
    }
    // gamma = (p, q, r); the central part picks up x.q through the group law.
    double zc = a.z + a.x.dot(q);
    GroupElement out(a.x + p, a.y + q, mod_window(zc, 0.5));
    for (int j = 0; j < g; ++j) {
        out.x[j] = mod_unit(out.x[j]);
        out.y[j] = mod_unit(out.y[j]);
    }
    return out;
}

bool is_reduced(const GroupElement& a, double tol) {
    for (int j = 0; j < a.rank(); ++j) {
        if (a.x[j] < -tol || a.x[j] >= 1.0 + tol) return false;
        if (a.y[j] < -tol || a.y[j] >= 1.0 + tol) return false;
    }
    return a.z >= -tol && a.z < 0.5 + tol;
}

Frame frame_transform(const SymplecticMatrix& alpha) {
    if (!is_symplectic(alpha.m)) throw std::invalid_argument("frame_transform: matrix is not symplectic");
    Frame f;
    f.g = alpha.g;
    f.coeffs = alpha.inverse().m.transpose();
    return f;
}

}  // namespace nilflow
