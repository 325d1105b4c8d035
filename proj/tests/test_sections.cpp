#include <doctest.h>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <algorithm>
#include <cmath>
#include <memory>

#include "bergman/errors.hpp"
#include "bergman/sections.hpp"

using namespace bergman;
using Big = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<256, boost::multiprecision::digit_base_2>>;

namespace {

std::shared_ptr<const DiscSpace> space(int p, std::size_t L) { return std::make_shared<const DiscSpace>(p, L); }

double coeff(const DiscSpace& s, std::size_t ell) { return std::exp(0.5 * s.log_coeff(ell)); }

// Section whose polynomial part P is prod (z - root) (leading coefficient 1).
SectionSample with_roots(std::shared_ptr<const DiscSpace> sp, const std::vector<complex>& roots) {
  std::vector<complex> poly{1.0};
  for (complex r : roots) {
    std::vector<complex> next(poly.size() + 1);
    for (std::size_t k = 0; k < poly.size(); ++k) {
      next[k + 1] += poly[k];
      next[k] -= r * poly[k];
    }
    poly = next;
  }
  std::vector<complex> eta(sp->length());
  for (std::size_t k = 0; k < poly.size(); ++k) eta[k] = poly[k] / coeff(*sp, k + 1);
  return section_from_coefficients(sp, eta);
}

// Smallest L with tail <= eps^2 * head, in 256-bit arithmetic.
std::size_t big_truncation_length(int p, double b, double eps) {
  const Big x = Big(b) * Big(b);
  std::vector<Big> terms;
  Big total = 0;
  for (int ell = 1; ell < 4000; ++ell) {
    const Big t = pow(Big(ell), p - 1) * pow(x, ell);
    terms.push_back(t);
    total += t;
  }
  Big head = 0;
  const Big e2 = Big(eps) * Big(eps);
  for (std::size_t L = 1; L <= terms.size(); ++L) {
    head += terms[L - 1];
    if (total - head <= e2 * head) return L;
  }
  return 0;
}

double ks_exponential(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = 1.0 - std::exp(-xs[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return d;
}

}  // namespace

TEST_CASE("Gaussian coefficients") {
  const auto sp = space(20, 100000);
  const SectionSample a = sample_section(sp, 42, {1, 2, 3});
  const SectionSample b = sample_section(sp, 42, {1, 2, 3});
  const SectionSample c = sample_section(sp, 42, {1, 2, 4});
  CHECK(a.eta == b.eta);
  CHECK(a.eta != c.eta);
  CHECK(a.eta.size() == sp->length());

  std::vector<double> mod2;
  double mean = 0.0;
  for (complex e : a.eta) {
    mod2.push_back(std::norm(e));
    mean += std::norm(e);
  }
  mean /= static_cast<double>(mod2.size());
  CHECK(std::abs(mean - 1.0) <= 0.02);
  CHECK(ks_exponential(mod2) < 1.628 / std::sqrt(static_cast<double>(mod2.size())));  // level 0.01
}

TEST_CASE("evaluation") {
  const int p = 15;
  const auto sp = space(p, 40);
  std::vector<complex> e1(40);
  e1[0] = 1.0;
  const SectionSample s1 = section_from_coefficients(sp, e1);
  const complex z = std::polar(0.6, 0.4);
  const double expected = 0.5 * sp->log_coeff(1) + std::log(0.6) + 0.5 * p * std::log(std::abs(std::log(0.36)));
  CHECK(evaluate(s1, z).log_modulus == doctest::Approx(expected).epsilon(1e-13));

  const SectionSample a = sample_section(sp, 1, {1});
  const SectionSample b = sample_section(sp, 1, {2});
  std::vector<complex> sum(40);
  for (int k = 0; k < 40; ++k) sum[k] = a.eta[k] + b.eta[k];
  const SectionSample ab = section_from_coefficients(sp, sum);
  const complex va = evaluate(a, z).scaled(0.0);
  const complex vb = evaluate(b, z).scaled(0.0);
  const complex vab = evaluate(ab, z).scaled(0.0);
  CHECK(std::abs(vab - va - vb) <= 1e-10 * std::abs(vab));
  CHECK_THROWS_AS(section_from_coefficients(sp, std::vector<complex>(3)), InvalidParameter);
}

TEST_CASE("E |s(z)|^2 = B_p(z)") {
  const int p = 30;
  const auto sp = std::make_shared<const DiscSpace>(DiscSpace::for_radius(p, 0.8));
  const int m = 10000;
  for (double r : {0.2, 0.5, 0.8}) {
    const complex z = std::polar(r, 1.0);
    const double log_b = std::log(kernel_function(*sp, r));
    double mean = 0.0;
    for (int i = 0; i < m; ++i) mean += std::exp(2.0 * evaluate(sample_section(sp, 9, {7, static_cast<std::uint64_t>(i)}), z).log_modulus - log_b);
    mean /= m;
    CHECK(std::abs(mean - 1.0) <= 3.0 / std::sqrt(static_cast<double>(m)));  // |s|^2/B ~ Exp(1)
  }
}

TEST_CASE("truncation length") {
  std::size_t prev = 0;
  for (double eps : {1e-2, 1e-4, 1e-8, 1e-12}) {
    const std::size_t L = truncation_length(100, 0.7, eps);
    CHECK(L >= prev);
    prev = L;
  }
  CHECK(truncation_length(10, 0.5, 1e-8) == big_truncation_length(10, 0.5, 1e-8));
  CHECK(truncation_length(40, 0.7, 1e-6) == big_truncation_length(40, 0.7, 1e-6));
}

TEST_CASE("zeros of constructed sections") {
  const auto sp = space(20, 12);
  std::vector<complex> e1(12);
  e1[0] = 1.0;
  CHECK(find_zeros(section_from_coefficients(sp, e1), Annulus(0.01, 0.99)).count() == 0);

  const complex w = std::polar(0.45, 2.0);
  const ZeroSet one = find_zeros(with_roots(sp, {w}), Annulus(0.3, 0.6));
  REQUIRE(one.count() == 1);
  CHECK(std::abs(one.zeros[0].location - w) < 1e-12);
  CHECK(one.zeros[0].converged);

  const std::vector<complex> roots = {std::polar(0.25, 0.1), std::polar(0.4, -2.0), std::polar(0.55, 1.5),
                                      std::polar(0.7, 3.0), std::polar(0.9, -0.7), std::polar(1.5, 0.2)};
  const SectionSample s = with_roots(sp, roots);
  const ZeroSet all = find_zeros(s, Annulus(0.2, 0.95));
  REQUIRE(all.count() == 5);
  for (std::size_t k = 0; k < 5; ++k) CHECK(std::abs(all.zeros[k].location - roots[k]) < 1e-10);
  for (std::size_t k = 1; k < all.zeros.size(); ++k)
    CHECK(std::abs(all.zeros[k - 1].location) <= std::abs(all.zeros[k].location));
  CHECK(count_zeros_argument_principle(s, Annulus(0.2, 0.95)).count == 5);
  CHECK(count_zeros_argument_principle(s, Annulus(0.3, 0.6)).count == 2);
  CHECK(find_zeros(s, Annulus(0.3, 0.6)).count() == 2);

  // A double root splits by about sqrt(machine eps) in double precision; the count is still 2.
  const ZeroSet dbl = find_zeros(with_roots(sp, {w, w}), Annulus(0.3, 0.6));
  CHECK(dbl.count() == 2);
  for (const Zero& q : dbl.zeros) CHECK(std::abs(q.location - w) < 1e-7);
}

TEST_CASE("monomial sections and degenerate contours") {
  const auto sp = space(10, 8);
  for (std::size_t k = 1; k <= 6; ++k) {
    std::vector<complex> eta(8);
    eta[k - 1] = 1.0;
    const SectionSample s = section_from_coefficients(sp, eta);
    const ContourCount c = count_zeros_argument_principle(s, Annulus(0.3, 0.8));
    CHECK(c.count == 0);
    CHECK(c.winding_inner == static_cast<int>(k) - 1);  // s winds k times; the puncture is divided out
    CHECK(c.winding_outer == static_cast<int>(k) - 1);
  }
  const SectionSample r = sample_section(std::make_shared<const DiscSpace>(DiscSpace::for_radius(40, 0.8)), 3, {1});
  CHECK(count_zeros_argument_principle(r, Annulus(0.5 - 1e-12, 0.5)).count == 0);
  CHECK(find_zeros(r, Annulus(0.5, 0.5)).count() == 0);

  // Zero on the contour: the raw winding refuses, the counter perturbs.
  const auto s12 = space(20, 12);
  const SectionSample on = with_roots(s12, {complex(0.5, 0.0), std::polar(0.7, 1.0)});
  CHECK(winding_number(on, 0.5) == -1);
  const ContourCount pc = count_zeros_argument_principle(on, Annulus(0.3, 0.5));
  CHECK(pc.perturbations >= 1);
  CHECK(pc.outer != 0.5);
}

TEST_CASE("companion and argument principle agree on random sections") {
  const int p = 80;
  const Annulus u(0.2, 0.7);
  const auto sp = std::make_shared<const DiscSpace>(p, truncation_length(p, 0.7, 1e-8));
  for (std::uint64_t i = 0; i < 20; ++i) {
    const SectionSample s = sample_section(sp, 77, {i});
    const ZeroSet z = find_zeros(s, u);
    CHECK(z.count() == count_zeros_argument_principle(s, u).count);
    CHECK(z.unconverged == 0);
    for (const Zero& q : z.zeros) CHECK(u.contains(std::abs(q.location), 1e-10));

    // Global phase leaves the zeros in place.
    std::vector<complex> rot = s.eta;
    for (complex& e : rot) e *= std::polar(1.0, 0.9);
    const ZeroSet zr = find_zeros(section_from_coefficients(sp, rot), u);
    REQUIRE(zr.count() == z.count());
    for (std::size_t k = 0; k < z.zeros.size(); ++k) CHECK(std::abs(zr.zeros[k].location - z.zeros[k].location) < 1e-10);
  }
}

TEST_CASE("linear statistics") {
  const auto sp = std::make_shared<const DiscSpace>(40, truncation_length(40, 0.8, 1e-8));
  const SectionSample s = sample_section(sp, 5, {1});
  const ZeroSet z = find_zeros(s, Annulus(0.2, 0.8));
  CHECK(linear_statistic(z, [](complex) { return 1.0; }) == doctest::Approx(z.count()));
  auto f = [](complex w) { return std::abs(w); };
  auto g = [](complex w) { return std::norm(w); };
  CHECK(linear_statistic(z, [&](complex w) { return 2.0 * f(w) - g(w); }) ==
        doctest::Approx(2.0 * linear_statistic(z, f) - linear_statistic(z, g)).epsilon(1e-13));
}
