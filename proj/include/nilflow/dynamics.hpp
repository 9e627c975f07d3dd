#ifndef NILFLOW_DYNAMICS_HPP
#define NILFLOW_DYNAMICS_HPP

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "nilflow/heisenberg.hpp"
#include "nilflow/symplectic.hpp"

namespace nilflow {

// Standard rectangle: side lengths T and basepoint m.
struct Rectangle {
    Eigen::VectorXd sides;
    GroupElement base;

    Rectangle(Eigen::VectorXd t, GroupElement m);
    int rank() const { return static_cast<int>(sides.size()); }
};

// Commuting family of skew shifts on T^g x R/(1/K)Z, the return maps of the
// d leading generators to the transverse torus. Row i of `rho`/`v` holds the
// rotation and shear of the i-th map:
//   A_i(y, z) = (y + rho_i, z + v_i . y + tau_i).
struct SkewShift {
    int g = 0;
    int d = 0;
    Eigen::MatrixXd rho;   // d x g
    Eigen::MatrixXd v;     // d x g
    Eigen::VectorXd tau;   // d
    double K = 2.0;
    Eigen::VectorXd t_ret;  // d, positive

    double z_period() const { return 1.0 / K; }
};

struct TorusPoint {
    Eigen::VectorXd y;
    double z = 0.0;
};

// Finite character sum on the transverse torus, pulled back to the manifold
// through the standard-frame flow coordinates. Terms with n = 0 evaluate as
// e^{2 pi i m.y} directly; terms with n != 0 are lifted with a smooth window
// in the flow coordinate (a sin^8 bump, integral one per axis), which is the
// transfer-operator lift that lands the character inside the n-th central
// isotypic component as a C^7 function on the manifold.
class Observable {
  public:
    struct Term {
        Eigen::VectorXi m;
        int n = 0;
        std::complex<double> coefficient;
    };

    Observable(int g, double K = 2.0);

    void add_term(Eigen::VectorXi m, int n, std::complex<double> coefficient);

    int genus() const { return g_; }
    double central_parameter() const { return K_; }
    const std::vector<Term>& terms() const { return terms_; }
    bool has_zero_mean() const;  // every term has (m, n) != (0, 0)
    bool has_central_terms() const;

    // Value at a point of M given by a lattice-reduced representative.
    std::complex<double> evaluate(const GroupElement& reduced) const;

    // Evaluate on the transverse torus (ignores the window; used on the
    // section where the flow coordinate is zero).
    std::complex<double> evaluate_torus(const Eigen::VectorXd& y, double z) const;

  private:
    int g_;
    double K_;
    std::vector<Term> terms_;
};

struct QuadratureSpec {
    double rel_tol = 1e-8;
    double abs_tol = 1e-14;
    int min_points_per_unit = 2;
    long long max_evals = 200000000;
};

struct BirkhoffResult {
    std::complex<double> value;
    double error_estimate = 0.0;
    long long evaluations = 0;
};

// P_x^{d,alpha} m = lattice_reduce(exp(x_1 X_1^alpha + ... + x_d X_d^alpha) m).
GroupElement flow(const SymplecticMatrix& alpha, const GroupElement& m, const Eigen::VectorXd& x);
GroupElement flow(const Frame& frame, const GroupElement& m, const Eigen::VectorXd& x);

// Tensor-product composite midpoint with dyadic refinement; the returned
// value is the Richardson extrapolant of the last two levels and the error
// estimate their scaled difference.
BirkhoffResult birkhoff_integral_detailed(const SymplecticMatrix& alpha, const GroupElement& m,
                                          const Eigen::VectorXd& sides, const Observable& f,
                                          const QuadratureSpec& spec = {});
std::complex<double> birkhoff_integral(const SymplecticMatrix& alpha, const GroupElement& m,
                                       const Eigen::VectorXd& sides, const Observable& f,
                                       const QuadratureSpec& spec = {});

// Return-map data of the d leading generator flows on the transverse torus.
SkewShift return_map(const SymplecticMatrix& alpha, int d, double K = 2.0);

// A^j via the closed form (exact modular arithmetic for integer shears).
TorusPoint skew_iterate(const SkewShift& shift, const TorusPoint& p, const Eigen::VectorXi& j);

// Return-time block formula t(xi) = D t_x + C (y - y_x) in frame blocks.
Eigen::VectorXd return_time(const SymplecticMatrix& alpha, const Eigen::VectorXd& y,
                            const Eigen::VectorXd& t_x,
                            const Eigen::VectorXd* y_x = nullptr);

}  // namespace nilflow

#endif
