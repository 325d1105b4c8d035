#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <random>

#include "bergman/disc_kernel.hpp"
#include "bergman/errors.hpp"

using namespace bergman;
using Big = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<256, boost::multiprecision::digit_base_2>>;

namespace {

// 2 log c_l with (p-2)! as an exact product in 256-bit arithmetic.
double big_log_coefficient(int p, int ell) {
  Big fact = 1;
  for (int k = 2; k <= p - 2; ++k) fact *= k;
  const Big two_pi = 2 * boost::math::constants::pi<Big>();
  const Big v = (p - 1) * log(Big(ell)) - log(two_pi) - log(fact);
  return static_cast<double>(v);
}

// B_p(r) as a plain double sum, no log domain.
double direct_kernel(int p, double r) {
  double fact = 1.0;
  for (int k = 2; k <= p - 2; ++k) fact *= k;
  double s = 0.0;
  for (int ell = 1; ell < 20000; ++ell) {
    const double term = std::pow(static_cast<double>(ell), p - 1) * std::pow(r, 2 * ell);
    s += term;
    if (ell > 10 * p && term < 1e-30 * s) break;
  }
  return s * std::pow(std::abs(std::log(r * r)), p) / (2.0 * kPi * fact);
}

double gk(const std::function<double(double)>& f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-14);
}

}  // namespace

TEST_CASE("basis coefficients") {
  CHECK(std::exp(log_coefficient(2, 1)) == doctest::Approx(1.0 / (2.0 * kPi)).epsilon(1e-15));
  CHECK(std::exp(log_coefficient(3, 2)) == doctest::Approx(2.0 / kPi).epsilon(1e-15));  // 2^2 / (2 pi 1!)
  const double big = big_log_coefficient(200, 150);
  CHECK(std::abs(log_coefficient(200, 150) - big) <= 1e-12 * std::abs(big));
  for (int p = 2; p <= 20; ++p) {
    double fact = 1.0;
    for (int k = 2; k <= p - 2; ++k) fact *= k;
    const DiscSpace s(p, 4);
    CHECK(std::exp(s.log_coeffs()[0]) == doctest::Approx(1.0 / (2.0 * kPi * fact)).epsilon(1e-13));
  }
  CHECK_THROWS_AS(DiscSpace(1, 10), InvalidParameter);
  CHECK_THROWS_AS(DiscSpace(5, 0), InvalidParameter);
}

TEST_CASE("kernel function against the direct sum") {
  for (int p = 3; p <= 20; ++p) {
    const DiscSpace s = DiscSpace::for_radius(p, 0.95);
    for (double r : {0.01, 0.1, 0.3, 0.5, 0.7, 0.9, 0.95}) {
      const double b = kernel_function(s, r);
      CHECK(b > 0.0);
      CHECK(std::abs(b - direct_kernel(p, r)) <= 1e-10 * b);
    }
  }
  const DiscSpace s10 = DiscSpace::for_radius(10, 0.5);
  CHECK(kernel_function(s10, 1e-9) < 1e-6);
  CHECK_THROWS_AS(kernel_function(s10, 1.2), DomainError);
  CHECK_THROWS_AS(kernel_function(s10, 0.0), DomainError);
}

TEST_CASE("truncation error reports the required length") {
  const DiscSpace short_space(50, 10);
  try {
    kernel_function(short_space, 0.9);
    FAIL("expected a truncation error");
  } catch (const TruncationError& e) {
    CHECK(e.required_length() > 10);
    const DiscSpace ok(50, e.required_length());
    CHECK(kernel_function(ok, 0.9) > 0.0);
  }
}

TEST_CASE("plateau and sup") {
  const DiscSpace s60 = DiscSpace::for_radius(60, 0.9);
  for (double r = 0.3; r <= 0.9; r += 0.05)
    CHECK(std::abs(kTwoPi * kernel_function(s60, r) / 59.0 - 1.0) <= 1e-3);

  // Poisson-summed deviation agrees with the direct route where the latter resolves it.
  const DiscSpace s20 = DiscSpace::for_radius(20, 0.9);
  for (double r : {0.3, 0.6, 0.9}) {
    const double direct = kTwoPi * direct_kernel(20, r) / 19.0 - 1.0;
    CHECK(plateau_deviation(20, r) == doctest::Approx(direct).epsilon(1e-5));
  }

  const SupResult s100 = sup_kernel(DiscSpace::for_radius(100, 0.5));
  const SupResult s200 = sup_kernel(DiscSpace::for_radius(200, 0.5));
  const double e100 = s100.value * std::pow(kTwoPi / 100.0, 1.5);
  const double e200 = s200.value * std::pow(kTwoPi / 200.0, 1.5);
  CHECK(e100 >= 0.75);
  CHECK(e100 <= 1.25);
  CHECK(std::abs(e200 - 1.0) < std::abs(e100 - 1.0));
  CHECK(s200.log_r_star < s100.log_r_star);
  const SupResult s50 = sup_kernel(DiscSpace::for_radius(50, 0.5));
  CHECK(s50.value >= 49.0 / kTwoPi);
  // The maximizer is a stationary point.
  const DiscSpace sp = DiscSpace::for_radius(100, 0.5);
  const double h = 1e-4;
  const double f0 = log_kernel_function_at_log_radius(sp, s100.log_r_star);
  CHECK(log_kernel_function_at_log_radius(sp, s100.log_r_star * (1 + h)) <= f0 + 1e-12);
  CHECK(log_kernel_function_at_log_radius(sp, s100.log_r_star * (1 - h)) <= f0 + 1e-12);
}

TEST_CASE("two-point kernel") {
  const DiscSpace s = DiscSpace::for_radius(40, 0.9);
  const complex z = std::polar(0.5, 0.3);
  const complex w = std::polar(0.7, -1.1);
  CHECK(kernel(s, z, z).log_modulus == doctest::Approx(std::log(kernel_function(s, 0.5))).epsilon(1e-12));
  const KernelValue a = kernel(s, z, w);
  const KernelValue b = kernel(s, w, z);
  CHECK(a.log_modulus == doctest::Approx(b.log_modulus).epsilon(1e-12));
  CHECK(std::abs(std::remainder(a.phase + b.phase, kTwoPi)) < 1e-10);

  const DiscSpace s150 = DiscSpace::for_radius(150, 0.8);
  CHECK(normalized_kernel(s150, std::polar(0.4, 0.2), std::polar(0.8, 2.0)).value <= 1e-6);
}

TEST_CASE("normalized kernel is a correlation") {
  const DiscSpace s = DiscSpace::for_radius(60, 0.95);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> rad(0.05, 0.95);
  std::uniform_real_distribution<double> ang(0.0, kTwoPi);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const NormalizedKernel n = normalized_kernel(s, std::polar(rad(rng), ang(rng)), std::polar(rad(rng), ang(rng)));
    CHECK(n.value >= 0.0);
    worst = std::max(worst, n.value);
  }
  CHECK(worst <= 1.0 + 1e-12);
  CHECK(normalized_kernel(s, std::polar(0.4, 1.0), std::polar(0.4, 1.0)).value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("Poincare distance") {
  const complex z = std::polar(0.4, 0.7);
  CHECK(poincare_distance(z, z) == doctest::Approx(0.0));
  CHECK(poincare_distance(z, z * std::polar(1.0, kTwoPi)) == doctest::Approx(0.0).epsilon(1e-12));

  // Radial path length: sqrt(g_rr) = 1 / (sqrt 2 r |log r|).
  const double r1 = std::exp(-1.0);
  const double r2 = std::exp(-std::exp(std::sqrt(2.0)));
  const double length =
      gk([](double t) { return 1.0 / (std::sqrt(2.0) * std::abs(t)); }, std::log(r2), std::log(r1));
  CHECK(length == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(poincare_distance(r1, r2) == doctest::Approx(length).epsilon(1e-12));

  // A circle arc is longer than the geodesic; short arcs agree to second order.
  const double r = 0.5;
  const double arc = 0.01 / (std::sqrt(2.0) * std::abs(std::log(r)));
  const double d = poincare_distance(r, std::polar(r, 0.01));
  CHECK(d <= arc);
  CHECK(d == doctest::Approx(arc).epsilon(1e-4));

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> rad(0.01, 0.99);
  std::uniform_real_distribution<double> ang(0.0, kTwoPi);
  for (int i = 0; i < 100; ++i) {
    const complex a = std::polar(rad(rng), ang(rng));
    const complex b = std::polar(rad(rng), ang(rng));
    const complex c = std::polar(rad(rng), ang(rng));
    CHECK(poincare_distance(a, b) == doctest::Approx(poincare_distance(b, a)).epsilon(1e-13));
    CHECK(poincare_distance(a, c) <= poincare_distance(a, b) + poincare_distance(b, c) + 1e-9);
  }
  CHECK_THROWS_AS(poincare_distance(0.0, 0.5), DomainError);
}

TEST_CASE("areas") {
  CHECK(area_L(Annulus(0.1, 0.5)) == doctest::Approx(0.5042).epsilon(1e-4));
  // c_1 = dA / (pi r^2 log^2 r^2)
  const double q = gk([](double r) { return 2.0 * kPi * r / (kPi * r * r * std::pow(std::log(r * r), 2)); }, 0.1, 0.5);
  CHECK(area_L(Annulus(0.1, 0.5)) == doctest::Approx(q).epsilon(1e-12));
  CHECK(omega_area(Annulus(0.1, 0.5)) == doctest::Approx(kTwoPi * q).epsilon(1e-12));
  CHECK(area_L(Annulus(0.3, 0.3)) == 0.0);
}

TEST_CASE("expected zero measure") {
  const DiscSpace s = DiscSpace::for_radius(100, 0.8);
  CHECK(expected_zero_measure(s, Annulus(0.5, 0.5)).value == 0.0);
  const double whole = expected_zero_measure(s, Annulus(0.2, 0.7)).value;
  const double left = expected_zero_measure(s, Annulus(0.2, 0.45)).value;
  const double right = expected_zero_measure(s, Annulus(0.45, 0.7)).value;
  CHECK(std::abs(whole - left - right) <= 1e-9);

  // Disc count = x K'(x)/K(x) - 1 with K(x) = sum c_l^2 x^l; finite-difference oracle in log x.
  for (double r : {0.3, 0.6}) {
    const double lx = 2.0 * std::log(r);
    const double h = 1e-4;
    const double fd = (s.log_series(lx + h) - s.log_series(lx - h)) / (2.0 * h) - 1.0;
    CHECK(expected_zeros_in_disc(s, r) == doctest::Approx(fd).epsilon(1e-7));
  }

  // value / p -> Area^L
  const Annulus u(0.2, 0.7);
  double prev = 1e9;
  for (int p : {10, 40, 160}) {
    const DiscSpace sp = DiscSpace::for_radius(p, 0.8);
    const double gap = std::abs(expected_zero_measure(sp, u).value / p - area_L(u));
    CHECK(gap <= prev);
    prev = gap;
  }
  CHECK(prev < 1e-3);
}

TEST_CASE("L1 norm of log B_p") {
  const Annulus u(0.3, 0.9);
  CHECK(log_bergman_l1(DiscSpace::for_radius(18, 0.9), Annulus(0.5, 0.5)) == 0.0);
  const DiscSpace s = DiscSpace::for_radius(18, 0.9);
  const double v = log_bergman_l1(s, u);
  CHECK(v == doctest::Approx(std::log(17.0 / kTwoPi) * omega_area(u)).epsilon(0.05));
  const double q = gk(
      [&](double r) {
        return std::abs(std::log(kernel_function(s, r))) * 2.0 * kTwoPi * r / (r * r * std::pow(std::log(r * r), 2));
      },
      0.3, 0.9);
  CHECK(v == doctest::Approx(q).epsilon(1e-8));
  for (int p : {25, 50, 100, 200, 400}) {
    const DiscSpace sp = DiscSpace::for_radius(p, 0.9);
    CHECK(log_bergman_l1(sp, u) <= omega_area(u) * std::log(static_cast<double>(p)));
  }
}
