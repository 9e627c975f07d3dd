#ifndef NILFLOW_SPECTRAL_HPP
#define NILFLOW_SPECTRAL_HPP

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "nilflow/dynamics.hpp"

namespace nilflow {

// Character label (m, n) with representation parameter K:
//   e_{m,n}(y, z) = exp(2 pi i (m.y + n K z)).
struct CharacterLabel {
    Eigen::VectorXi m;
    int n = 0;
    double K = 2.0;

    CharacterLabel() = default;
    CharacterLabel(Eigen::VectorXi m_, int n_, double K_ = 2.0);
    int genus() const { return static_cast<int>(m.size()); }

    // Representative with m reduced modulo K|n| per coordinate (orbit
    // bookkeeping only; evaluation always uses the raw m).
    CharacterLabel orbit_reduced() const;
};

// e_{m,n} composed with A^j equals phase * e_{label, n}; both computed from
// the closed-form iterate, which is the ground truth for Fourier-side work.
struct ComposedCharacter {
    Eigen::VectorXi label_m;
    std::complex<double> phase;
};

struct DualOrbit {
    CharacterLabel seed;
    Eigen::MatrixXi shift_vectors;        // d x g, the integer label step per generator
    int truncation = 0;
    std::vector<Eigen::VectorXi> labels;  // distinct labels inside the box, lexicographic
};

std::complex<double> character_eval(const CharacterLabel& label, const Eigen::VectorXd& y, double z);

ComposedCharacter compose_with_iterate(const SkewShift& shift, const CharacterLabel& label,
                                       const Eigen::VectorXi& j);

DualOrbit dual_orbit(const SkewShift& shift, const CharacterLabel& seed, int truncation);

// Partial sum over [-J, J]^d of the invariant-distribution pairing of the
// finite character sum `fhat` against the orbit of `seed`. Throws
// TruncationInsufficientError when fhat has support on the orbit outside
// the box.
std::complex<double> invariant_distribution(const SkewShift& shift, const CharacterLabel& seed,
                                            const Observable& fhat, int truncation);

// chi(u) = prod_j (e^{i u_j} - 1) / (i u_j), series branch below |u_j| = 1e-4.
std::complex<double> chi_modular(const Eigen::VectorXd& u);

// vol(U(T))^{1/2} chi(T o u), the renormalized Fourier-side profile.
std::complex<double> theta_field(const Eigen::VectorXd& sides, const Eigen::VectorXd& u);

// int_R |chi_1|^2 du, evaluated by panel quadrature plus an asymptotic tail;
// equals 2 pi to ~1e-9.
double chi_line_l2_squared();

// Rapidly decaying test function supplied as samples on a uniform grid over
// [-L, L]^d together with the analytic bound |f(u)| <= A exp(-r max_i |u_i|).
struct SampledFunction {
    int d = 1;
    double half_width = 8.0;
    int points_per_axis = 257;
    std::vector<double> values;  // row-major, size points_per_axis^d
    double tail_amplitude = 1.0;
    double tail_rate = 1.0;

    double spacing() const { return 2.0 * half_width / (points_per_axis - 1); }
    static SampledFunction from_callable(int d, double half_width, int points_per_axis,
                                         const std::function<double(const Eigen::VectorXd&)>& f,
                                         double tail_amplitude, double tail_rate);
};

// For each T in the sequence, the L^2 distance between the normalized moving
// average vol(U(T))^{-1/2} int_{U(T)} f(.+t) dt and the renormalized profile
// theta(r_{log T} alpha) Leb(f), computed on the Fourier side.
std::vector<double> l2_convergence_check(const SampledFunction& f,
                                         const std::vector<Eigen::VectorXd>& t_seq);

}  // namespace nilflow

#endif
