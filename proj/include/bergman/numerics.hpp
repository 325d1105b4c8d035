#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace bergman {

using complex = std::complex<double>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kTwoPi = 2.0 * kPi;
inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// log(sum exp(x_i)); returns -inf for an empty or all -inf input.
double log_sum_exp(std::span<const double> xs);

/// Compensated (Kahan-Babuska) running sum.
class KahanSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
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

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Composite 8-point Gauss-Legendre rule on [a, b] with `panels` equal panels.
QuadratureRule composite_gauss_legendre(double a, double b, std::size_t panels);

/// Adaptive Gauss-Kronrod integral of f over [a, b].
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-12, double* error_estimate = nullptr);

/// Runs body(i) for i in [0, n) on `threads` workers. Results must be written by index;
/// the iteration order is unspecified.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body);

/// Number of worker threads used when a caller passes threads <= 0.
int default_thread_count();

}  // namespace bergman
