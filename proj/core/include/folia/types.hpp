#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace folia {

using Complex = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Violation of an operation's mathematical preconditions, as opposed to an
// I/O or schema problem.  The CLI maps these to exit code 2.
class domain_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Tolerances {
  double quadrature = 1e-8;
  double solver = 1e-10;
  double compatibility = 1e-2;  // relative
};

inline bool nearly_equal(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace folia
