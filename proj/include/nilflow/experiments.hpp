#ifndef NILFLOW_EXPERIMENTS_HPP
#define NILFLOW_EXPERIMENTS_HPP

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <vector>

#include "nilflow/dynamics.hpp"
#include "nilflow/numeric.hpp"
#include "nilflow/spectral.hpp"

namespace nilflow {

// Theta sum data: quadratic form Q[x] = x^T Q x, linear form l, cube side N.
struct ThetaParams {
    Eigen::MatrixXd q;
    Eigen::VectorXd l;
    long long n = 1;

    ThetaParams(Eigen::MatrixXd q_, Eigen::VectorXd l_, long long n_);
    int genus() const { return static_cast<int>(l.size()); }
};

// Empirical statistics of a family of real samples.
struct DistributionSummary {
    long long count = 0;
    double mean = 0.0;
    double variance = 0.0;
    std::vector<std::pair<double, double>> quantiles;  // (probability, value)
    double support_radius = 0.0;
    std::vector<std::pair<double, long long>> histogram;  // (bin center, count)
    std::uint64_t seed = 0;

    static DistributionSummary from_samples(const std::vector<double>& samples, std::uint64_t seed,
                                            int bins = 32);
};

// Increasing sequence of rectangle side vectors (Folner-style growth).
struct TSequence {
    std::vector<Eigen::VectorXd> entries;

    TSequence() = default;
    explicit TSequence(std::vector<Eigen::VectorXd> e);
    static TSequence geometric(const Eigen::VectorXd& t0, double ratio, int count);
};

inline constexpr long long kThetaTermBudget = 100000000;

// N^{-g/2} sum over Z^g cap [0, N]^g of exp(2 pi i (Q[n] + l(n))).
std::complex<double> theta_sum(const ThetaParams& p);

DistributionSummary theta_distribution(const Eigen::MatrixXd& q, long long n, int samples,
                                       std::uint64_t seed);

// The O(1)-accurate empirical estimator of the deviation functional: the
// Birkhoff integral itself, for zero-mean character observables.
std::complex<double> bufetov_estimate(const SymplecticMatrix& alpha, const GroupElement& m,
                                      const Eigen::VectorXd& sides, const Observable& f,
                                      const QuadratureSpec& spec = {});

// For each T_n, draws basepoints uniformly on the fundamental window and
// summarizes E_T(f) = vol(U(T))^{-1/2} <P_{U(T)} m, omega_f>. Observables
// are expected conjugate-symmetric so E_T is real; the real part is kept.
std::vector<DistributionSummary> limit_distribution_experiment(
    const SymplecticMatrix& alpha, const Observable& f, const TSequence& t_seq, int samples,
    std::uint64_t seed, const QuadratureSpec& spec = {1e-4, 1e-9, 2, 200000000}, int threads = 1);

// || sum over the return grid of e_{m,n} o A^j ||_{L^2} by Parseval over the
// dual orbit; equals sqrt(vol(U(T)) / vol(U(t_ret))) when the composed
// labels are distinct.
double transverse_l2_profile(const SymplecticMatrix& alpha, const CharacterLabel& label,
                             const Eigen::VectorXd& sides);

GroupElement random_basepoint(int g, Rng& rng);

}  // namespace nilflow

#endif
