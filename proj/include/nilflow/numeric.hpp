#ifndef NILFLOW_NUMERIC_HPP
#define NILFLOW_NUMERIC_HPP

#include <cmath>
#include <complex>
#include <cstdint>

namespace nilflow {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// Reduce x into [0, L). Round-toward-zero quotient via fmod, then one
// correction so the result stays in the half-open window under round-off.
inline double mod_window(double x, double L) {
    double r = std::fmod(x, L);
    if (r < 0.0) r += L;
    if (r >= L) r = 0.0;
    return r;
}

inline double mod_unit(double x) { return mod_window(x, 1.0); }

// Fractional part of a*b with the rounding error of the product restored
// through fma. Keeps phases of large quadratic terms accurate to ~1 ulp
// even when a*b is ~1e10.
inline double frac_prod(double a, double b) {
    double p = a * b;
    double e = std::fma(a, b, -p);
    return mod_unit(mod_unit(p) + e);
}

inline std::complex<double> unit_phase(double turns) {
    double t = kTwoPi * mod_unit(turns);
    return {std::cos(t), std::sin(t)};
}

// Compensated accumulator (Kahan-Babuska / Neumaier variant).
class KahanSum {
  public:
    void add(double x) {
        double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

  private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

class KahanComplexSum {
  public:
    void add(const std::complex<double>& z) {
        re_.add(z.real());
        im_.add(z.imag());
    }
    std::complex<double> value() const { return {re_.value(), im_.value()}; }

  private:
    KahanSum re_, im_;
};

// SplitMix64. Deterministic across platforms, unlike the standard library
// distributions; all Monte-Carlo reproducibility contracts rest on it.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ull;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1)
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  private:
    std::uint64_t state_;
};

// Generator state for sample `index` of a run seeded with `seed`; depends on
// (seed, index) only, never on scheduling.
inline Rng rng_for_sample(std::uint64_t seed, std::uint64_t index) {
    Rng mix(seed ^ (0xA0761D6478BD642Full * (index + 1)));
    mix.next_u64();
    return mix;
}

}  // namespace nilflow

#endif
