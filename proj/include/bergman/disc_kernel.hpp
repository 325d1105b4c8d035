#pragma once

// Bergman space of the Poincaré punctured disc at tensor power p.
//
// The orthonormal basis is c_l z^l, l >= 1, with c_l^2 = l^(p-1) / (2 pi (p-2)!), for the
// metric h_p = |log|z|^2|^p on the trivial bundle and the cusp metric
// omega = i dz^dzbar / (|z|^2 log^2 |z|^2). Every series is summed in the log domain:
// at p ~ 200 the terms span well over a thousand orders of magnitude.

#include <cstddef>
#include <span>
#include <vector>

#include "bergman/numerics.hpp"

namespace bergman {

/// Open annulus {a < |z| < b} in the punctured disc. a == b is the empty region.
class Annulus {
 public:
  Annulus(double inner, double outer);

  double inner() const { return a_; }
  double outer() const { return b_; }
  bool empty() const { return !(a_ < b_); }
  bool contains(double radius, double tol = 0.0) const {
    return radius >= a_ - tol && radius <= b_ + tol;
  }

 private:
  double a_;
  double b_;
};

/// Pointwise h_p-norm of a kernel or section value: modulus kept as a logarithm.
struct KernelValue {
  double log_modulus = kNegInf;  // -inf: underflow
  double phase = 0.0;            // in (-pi, pi]

  bool underflow() const { return !(log_modulus > kNegInf); }
  double modulus() const { return std::exp(log_modulus); }
  /// The value divided by exp(log_scale), as an ordinary complex number.
  complex scaled(double log_scale) const {
    return underflow() ? complex{} : std::polar(std::exp(log_modulus - log_scale), phase);
  }
};

/// 2 log c_l = (p-1) log l - log(2 pi) - lgamma(p-1).
double log_coefficient(int p, std::size_t ell);

/// Smallest L with sum_{l>L} c_l^2 r^{2l} <= rel_tol * sum_{l<=L} c_l^2 r^{2l}.
std::size_t required_length(int p, double r, double rel_tol);

class DiscSpace {
 public:
  DiscSpace(int p, std::size_t length);

  /// Space whose truncation is adequate (relative tail <= rel_tol) up to radius max_radius.
  static DiscSpace for_radius(int p, double max_radius, double rel_tol = 1e-14);

  int p() const { return p_; }
  std::size_t length() const { return log_coeffs_.size(); }
  /// Entry l-1 holds 2 log c_l.
  std::span<const double> log_coeffs() const { return log_coeffs_; }
  double log_coeff(std::size_t ell) const { return log_coeffs_[ell - 1]; }

  struct TermRange {
    std::size_t first;  // 1-based, inclusive
    std::size_t last;
    double peak_log;    // largest log term, log c_l^2 + l log x
  };
  /// Indices whose term log c_l^2 + l log x is within `cutoff` of the largest one.
  TermRange significant_range(double log_x, double cutoff = 60.0) const;

  /// log sum_{l=1}^{L} c_l^2 x^l for x = exp(log_x) in (0, 1).
  double log_series(double log_x) const;
  /// sum l c_l^2 x^l / sum c_l^2 x^l over the truncated range.
  double mean_index(double log_x) const;
  /// log of the untruncated remainder sum_{l>L} c_l^2 x^l.
  double log_tail(double log_x) const;
  /// log sum_{l>L} l c_l^2 x^l.
  double log_tail_first_moment(double log_x) const;

  /// sum_{l>L} c_l^2 r^{2l} / sum_{l<=L} c_l^2 r^{2l}.
  double relative_tail(double r) const;
  /// Largest radius with relative_tail(r) <= rel_tol.
  double max_radius(double rel_tol = 1e-14) const;

 private:
  int p_;
  double log_norm_;  // log(2 pi) + lgamma(p - 1)
  std::vector<double> log_coeffs_;
};

DiscSpace make_disc_space(int p, std::size_t length);

/// Default accuracy demanded of the truncated series.
inline constexpr double kKernelTailTolerance = 1e-14;

/// B_p(z) for |z| = r.
double kernel_function(const DiscSpace& space, double r);
/// log B_p at |z| = exp(log_r); valid for radii below double underflow.
double log_kernel_function_at_log_radius(const DiscSpace& space, double log_r);

/// 2 pi B_p(r)/(p-1) - 1 of the untruncated series, via the Poisson-summed identity
/// sum_l l^(p-1) e^{-s l} = (p-1)! sum_k (s + 2 pi i k)^{-p}, s = |log r^2|. Requires p >= 3.
double plateau_deviation(int p, double r);

/// Two-point kernel B_p(z, w) in h_p-norm: log-modulus and phase.
KernelValue kernel(const DiscSpace& space, complex z, complex w);

struct SupResult {
  double log_r_star;  // log of the maximizer; r_star itself may underflow
  double r_star;
  double t_star;      // log(-log r_star)
  double value;       // sup B_p
};

/// Global maximum of B_p, searched in t = log(-log r).
SupResult sup_kernel(const DiscSpace& space);

struct NormalizedKernel {
  double value = 0.0;
  bool underflow = false;
};

/// |B_p(z,w)| / sqrt(B_p(z) B_p(w)).
NormalizedKernel normalized_kernel(const DiscSpace& space, complex z, complex w);

/// Riemannian distance of the cusp metric, via the covering tau = theta/2pi + i(-log r)/2pi.
double poincare_distance(complex z, complex w);

/// int_U c_1(L,h) = (1/2)(1/|log b| - 1/|log a|).
double area_L(const Annulus& region);
/// int_U omega = 2 pi area_L.
double omega_area(const Annulus& region);

struct ExpectedCount {
  double value = 0.0;
  bool truncation_adequate = true;
  double tail_effect = 0.0;  // bound on the change of the count from the omitted tail
};

/// Expected number of zeros (puncture excluded) of the Gaussian section in |z| < r.
double expected_zeros_in_disc(const DiscSpace& space, double r);

/// E[#zeros in the annulus] = int_U (p c_1 + (i/2pi) d dbar log B_p).
ExpectedCount expected_zero_measure(const DiscSpace& space, const Annulus& region);

/// int_U |log B_p| omega.
double log_bergman_l1(const DiscSpace& space, const Annulus& region);

}  // namespace bergman
