#ifndef NILFLOW_ERRORS_HPP
#define NILFLOW_ERRORS_HPP

#include <complex>
#include <stdexcept>
#include <string>

namespace nilflow {

// Frame fails the return-map/return-time nondegeneracy requirements.
class DegenerateFrameError : public std::runtime_error {
  public:
    explicit DegenerateFrameError(const std::string& what) : std::runtime_error(what) {}
};

// A matrix that must be inverted is numerically singular.
class NumericSingularityError : public std::runtime_error {
  public:
    explicit NumericSingularityError(const std::string& what) : std::runtime_error(what) {}
};

// Quadrature budget exhausted before the error estimate met the target.
// Carries the last two dyadic estimates so callers can inspect convergence.
class ToleranceNotMetError : public std::runtime_error {
  public:
    ToleranceNotMetError(const std::string& what, std::complex<double> coarse,
                         std::complex<double> fine)
        : std::runtime_error(what), coarse_estimate(coarse), fine_estimate(fine) {}
    std::complex<double> coarse_estimate;
    std::complex<double> fine_estimate;
};

// Work cap exceeded (e.g. direct theta summation term count).
class BudgetExceededError : public std::runtime_error {
  public:
    explicit BudgetExceededError(const std::string& what) : std::runtime_error(what) {}
};

// Truncation box does not cover the declared support of a functional.
class TruncationInsufficientError : public std::runtime_error {
  public:
    explicit TruncationInsufficientError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace nilflow

#endif
