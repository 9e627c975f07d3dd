#ifndef NILFLOW_SYMPLECTIC_HPP
#define NILFLOW_SYMPLECTIC_HPP

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

namespace nilflow {

// Element of Sp(2g, R) in block form (A B; C D).
struct SymplecticMatrix {
    int g = 0;
    Eigen::MatrixXd m;  // 2g x 2g

    SymplecticMatrix() = default;
    // Validates the symplectic identities to `tol`.
    SymplecticMatrix(int g_, Eigen::MatrixXd m_, double tol = 1e-10);

    static SymplecticMatrix identity(int g);
    SymplecticMatrix inverse() const;  // closed form J^{-1} M^T J, no factorization

    Eigen::MatrixXd block_a() const { return m.topLeftCorner(g, g); }
    Eigen::MatrixXd block_b() const { return m.topRightCorner(g, g); }
    Eigen::MatrixXd block_c() const { return m.bottomLeftCorner(g, g); }
    Eigen::MatrixXd block_d() const { return m.bottomRightCorner(g, g); }
};

// Z = X + iY with X, Y symmetric and Y positive definite.
struct SiegelPoint {
    Eigen::MatrixXd real_part;
    Eigen::MatrixXd imag_part;

    SiegelPoint() = default;
    // Validates symmetry (1e-12) and positive definiteness.
    SiegelPoint(Eigen::MatrixXd x, Eigen::MatrixXd y);

    int genus() const { return static_cast<int>(real_part.rows()); }
    static SiegelPoint basepoint(int g);  // i * I_g
};

// Rank-d renormalization data: scaled coordinate indices (0-based) and the
// flow times along each.
struct RenormalizationDirection {
    std::vector<int> indices;
    Eigen::VectorXd t;

    RenormalizationDirection() = default;
    RenormalizationDirection(std::vector<int> idx, Eigen::VectorXd times, int g);

    int rank() const { return static_cast<int>(indices.size()); }
    // Convenience: scale coordinates 0..d-1 by the same times.
    static RenormalizationDirection leading(Eigen::VectorXd times, int g);
};

bool is_symplectic(const Eigen::MatrixXd& m, double tol = 1e-10);

std::complex<double> moebius_denominator_det(const SymplecticMatrix& m, const SiegelPoint& z);
SiegelPoint moebius_action(const SymplecticMatrix& m, const SiegelPoint& z);

double height(const SiegelPoint& z);

// Point of the Siegel upper half space attached to alpha, alpha^{-1} . iI.
// With the renormalization flow acting by left multiplication this is the
// identification under which frame rotation numbers and geodesic behaviour
// agree (the identity frame diverges, bounded-type frames stay bounded).
SiegelPoint siegel_point(const SymplecticMatrix& alpha);

// Maximal height over the Sp(2g,Z) orbit. Exact for g = 1 via iterated
// SL(2,Z) reduction; for g >= 2 a certified lower bound from a word search
// of the stated depth over a fixed generator set.
double max_height(const SiegelPoint& z, int depth = 8);

// The g = 1 exact reduction and the generator-word search, exposed
// separately so they can be cross-checked.
double max_height_exact_g1(const SiegelPoint& z);
double max_height_word_search(const SiegelPoint& z, int depth);

// exp(sum_k t_k delta_hat_{i_k}) * alpha (left multiplication).
SymplecticMatrix renormalize(const SymplecticMatrix& alpha, const RenormalizationDirection& dir);

// Tensor-product trapezoid approximation of
//   int_0^cutoff ... e^{-(t_1+..+t_d)/2} Hgt([[r_{-t} alpha]])^{1/4} dt,
// with Hgt evaluated through max_height at `depth`.
double dc_integral(const SymplecticMatrix& alpha, int d, double cutoff, double step,
                   int depth = 8);

// Samples (|t|, log Hgt([[r_{-t} alpha]])) along the diagonal ray of the
// positive cone; |t| is the Euclidean norm.
std::vector<std::pair<double, double>> log_law_profile(const SymplecticMatrix& alpha, int d,
                                                       double t_max, int samples, int depth = 8);

// alpha = exp(G) for G in sp(2g) with entries uniform in [-1, 1].
SymplecticMatrix random_symplectic(int g, std::uint64_t seed);

// Block-diagonal frame whose per-plane rotation number is the golden mean.
SymplecticMatrix golden_frame(int g);

}  // namespace nilflow

#endif
