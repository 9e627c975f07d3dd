#ifndef NILFLOW_HEISENBERG_HPP
#define NILFLOW_HEISENBERG_HPP

#include <Eigen/Dense>

#include "nilflow/symplectic.hpp"

namespace nilflow {

// Point of the reduced Heisenberg group in coordinates (x, y, z),
// x, y in R^g and z central. Group law used throughout:
//   (x,y,z)(x',y',z') = (x+x', y+y', z+z'+x.y')
// so that the commutator of the X- and Y-generators is exp(+Z).
// Coordinates are unconstrained until lattice_reduce is applied; the
// standard lattice is Z^g x Z^g x (1/2)Z and the fundamental window is
// [0,1)^g x [0,1)^g x [0,1/2).
struct GroupElement {
    Eigen::VectorXd x;
    Eigen::VectorXd y;
    double z = 0.0;

    GroupElement() = default;
    GroupElement(Eigen::VectorXd x_, Eigen::VectorXd y_, double z_);

    int rank() const { return static_cast<int>(x.size()); }
    static GroupElement identity(int g);
};

// Element of the Lie algebra, a.X + b.Y + c.Z.
struct LieAlgebraVector {
    Eigen::VectorXd a;
    Eigen::VectorXd b;
    double c = 0.0;

    LieAlgebraVector() = default;
    LieAlgebraVector(Eigen::VectorXd a_, Eigen::VectorXd b_, double c_);

    int rank() const { return static_cast<int>(a.size()); }
    static LieAlgebraVector zero(int g);
};

// Deformed frame (X_i^alpha, Y_i^alpha, Z). Row i of `coeffs` holds the
// coefficients of X_i^alpha in the standard (X_1..X_g, Y_1..Y_g) basis,
// row g+i those of Y_i^alpha; Z is fixed. The coefficient matrix equals
// (alpha^T)^{-1}, i.e. alpha^{-1} applied to the basis coefficient
// vectors, and is itself symplectic.
struct Frame {
    int g = 0;
    Eigen::MatrixXd coeffs;  // 2g x 2g

    LieAlgebraVector x_vector(int i) const;
    LieAlgebraVector y_vector(int i) const;
    static LieAlgebraVector z_vector(int g);

    Eigen::MatrixXd block_a() const { return coeffs.topLeftCorner(g, g); }
    Eigen::MatrixXd block_b() const { return coeffs.topRightCorner(g, g); }
    Eigen::MatrixXd block_c() const { return coeffs.bottomLeftCorner(g, g); }
    Eigen::MatrixXd block_d() const { return coeffs.bottomRightCorner(g, g); }
};

GroupElement multiply(const GroupElement& a, const GroupElement& b);
GroupElement inverse(const GroupElement& a);

// exp is exact for the step-2 group: exp(aX+bY+cZ) = (a, b, c + a.b/2).
GroupElement exp_map(const LieAlgebraVector& v);
LieAlgebraVector log_map(const GroupElement& a);

LieAlgebraVector bracket(const LieAlgebraVector& u, const LieAlgebraVector& v);

// Max-norm distance between exp(u)exp(v) and exp(u + v + [u,v]/2); zero up
// to round-off since BCH terminates at step 2.
double bch_check(const LieAlgebraVector& u, const LieAlgebraVector& v);

// Right-coset reduction a -> a*gamma into the fundamental window.
GroupElement lattice_reduce(const GroupElement& a);
bool is_reduced(const GroupElement& a, double tol = 0.0);

Frame frame_transform(const SymplecticMatrix& alpha);

}  // namespace nilflow

#endif
