#include <doctest.h>

#include <cmath>
#include <random>

#include "bergman/errors.hpp"
#include "bergman/model_kernel.hpp"

using namespace bergman;

namespace {

HomogeneousCurvature quartic_example() { return HomogeneousCurvature::from_form_coefficient(4, {{0, 2, 1.0}}); }

// |f|^2 integrated on a square by the tensor trapezoid rule (spectrally accurate for this decay).
double norm_squared(const ExpPoly& f, double half_width, int n) {
  const double h = 2.0 * half_width / n;
  double s = 0.0;
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j) {
      const complex z(-half_width + i * h, -half_width + j * h);
      s += std::norm(f(z));
    }
  return s * h * h;
}

double fd_laplacian(const std::function<double(double, double)>& f, double x, double y, double h) {
  return (f(x + h, y) + f(x - h, y) + f(x, y + h) + f(x, y - h) - 4.0 * f(x, y)) / (h * h);
}

}  // namespace

TEST_CASE("potential solves dPsi/dzbar = psi z / rho'") {
  const HomogeneousCurvature c = HomogeneousCurvature::constant(3.0);
  const PotentialPair pc = solve_potential(c);
  CHECK(std::abs(pc.Psi().coefficient(1, 1) - complex(1.5, 0.0)) < 1e-15);
  CHECK(pc.Psi().terms().size() == 1);

  for (const HomogeneousCurvature& curv :
       {quartic_example(), HomogeneousCurvature::from_terms(4, {{2, 0, 1.0}, {1, 1, 0.5}, {0, 2, 2.0}}),
        HomogeneousCurvature::from_terms(6, {{4, 0, 1.0}, {2, 2, 3.0}, {0, 4, 1.0}})}) {
    const PotentialPair pp = solve_potential(curv);
    const ZPoly lhs = pp.Psi().d_zbar();
    const ZPoly rhs = curv.psi_zpoly() * ZPoly({{1, 0, complex(1.0 / curv.rho_prime(), 0.0)}});
    for (const ZTerm& t : rhs.terms()) CHECK(std::abs(lhs.coefficient(t.a, t.b) - t.coeff) <= 1e-12);
    for (const ZTerm& t : lhs.terms()) CHECK(std::abs(rhs.coefficient(t.a, t.b) - t.coeff) <= 1e-12);
    CHECK(std::abs(pp.Psi().coefficient(curv.rho_prime(), 0)) == 0.0);

    // (1/2) Euclidean Laplacian of phi = psi, checked by finite differences on a grid.
    auto phi = [&](double x, double y) { return pp.phi(complex(x, y)); };
    for (double x = -1.0; x <= 1.0; x += 0.25)
      for (double y = -1.0; y <= 1.0; y += 0.25)
        CHECK(0.5 * fd_laplacian(phi, x, y, 1e-3) == doctest::Approx(curv.psi(x, y)).epsilon(1e-6).scale(1.0));
  }

  // Linearity.
  const PotentialPair one = solve_potential(HomogeneousCurvature::from_terms(4, {{0, 2, 1.0}, {2, 0, 0.5}}));
  const PotentialPair two = solve_potential(HomogeneousCurvature::from_terms(4, {{0, 2, 2.0}, {2, 0, 1.0}}));
  for (const ZTerm& t : one.Psi().terms()) CHECK(std::abs(two.Psi().coefficient(t.a, t.b) - 2.0 * t.coeff) < 1e-14);
}

TEST_CASE("curvature validation") {
  CHECK_THROWS_AS(HomogeneousCurvature::from_terms(3, {{1, 0, 1.0}}), InvalidParameter);
  CHECK_THROWS_AS(HomogeneousCurvature::from_terms(4, {{1, 0, 1.0}}), InvalidParameter);
  CHECK_THROWS_AS(HomogeneousCurvature::from_terms(4, {{0, 2, -1.0}}), InvalidParameter);
  CHECK_THROWS_AS(HomogeneousCurvature::from_terms(4, {{1, 1, 1.0}}), InvalidParameter);  // xy changes sign
  CHECK_THROWS_AS(HomogeneousCurvature::from_terms(4, {}), InvalidParameter);
  CHECK_THROWS_AS(HomogeneousCurvature::constant(0.0), InvalidParameter);
}

TEST_CASE("the quartic example matches the explicit element up to gauge") {
  const PotentialPair pp = solve_potential(quartic_example()).with_gauge(complex(1.0 / 16.0, 0.0));
  const ExpPoly f = quartic_example_element();
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 200; ++i) {
    const complex z(u(rng), u(rng));
    const complex g = std::exp(-0.5 * pp.Psi()(z));
    CHECK(std::abs(g - f(z)) <= 1e-12 * std::max(1.0, std::abs(g)));
  }
}

TEST_CASE("membership residual") {
  std::vector<complex> grid;
  for (int i = 0; i < 50; ++i)
    for (int j = 0; j < 50; ++j) grid.emplace_back(-3.0 + 6.0 * i / 49.0, -3.0 + 6.0 * j / 49.0);
  CHECK(kernel_membership_residual(quartic_example(), quartic_example_element(), grid) <= 1e-10);

  const double c = 1.7;
  const HomogeneousCurvature cc = HomogeneousCurvature::constant(c);
  const ExpPoly gauss{ZPoly({{0, 0, 1.0}}), ZPoly({{1, 1, complex(-c / 4.0, 0.0)}})};
  CHECK(kernel_membership_residual(cc, gauss, grid) <= 1e-12);
  // Same element through the finite-difference overload.
  CHECK(kernel_membership_residual(cc, [&](complex z) { return gauss(z); }, grid) <= 1e-8);

  std::vector<complex> circle;
  for (int k = 0; k < 64; ++k) circle.push_back(std::polar(1.0, kTwoPi * k / 64.0));
  const ExpPoly zbar{ZPoly({{0, 1, 1.0}}), ZPoly()};
  CHECK(kernel_membership_residual(cc, zbar, circle) > 0.5);
}

TEST_CASE("lower bound on the quartic weight") {
  const PotentialPair pp = solve_potential(quartic_example()).with_gauge(complex(1.0 / 16.0, 0.0));
  auto lower = [](double x, double y) { return std::pow(x, 4) / 24.0 + std::pow(y, 4) / 6.0; };
  // 8 phi = Re(|z|^4 - |z|^2 z^2 - |z|^2 zbar^2 / 3 + z^4 / 2)
  const std::vector<complex> one{complex(1.0, 0.0)};
  CHECK(weight_lower_bound_check(pp, one, lower, 8.0));
  CHECK(8.0 * pp.phi(1.0) >= 1.0 / 24.0 - 1e-15);
  const std::vector<complex> origin{complex(0.0, 0.0)};
  CHECK(weight_lower_bound_check(pp, origin, lower, 8.0));
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  std::vector<complex> pts;
  for (int i = 0; i < 10000; ++i) pts.emplace_back(u(rng), u(rng));
  CHECK(weight_lower_bound_check(pp, pts, lower, 8.0));
  // A bound that is too strong fails.
  CHECK_FALSE(weight_lower_bound_check(pp, pts, [](double x, double y) { return x * x * x * x + y * y * y * y; }, 8.0));
}

TEST_CASE("gauge") {
  const PotentialPair base = solve_potential(quartic_example());
  CHECK(min_phi_on_circle(base) < 0.0);  // lambda = 0 weight is not integrable
  const PotentialPair fixed = base.with_gauge(integrable_gauge(base));
  CHECK(min_phi_on_circle(fixed) > 0.0);
  CHECK_THROWS_AS(gram_matrix(base, 4), InvalidParameter);
  const PotentialPair radial = solve_potential(HomogeneousCurvature::constant(1.0));
  CHECK(integrable_gauge(radial) == complex(0.0, 0.0));
}

TEST_CASE("Fock space Gram matrix") {
  const PotentialPair pp = solve_potential(HomogeneousCurvature::constant(2.0));  // phi = |z|^2
  const GramBasis g = gram_matrix(pp, 10);
  double fact = 1.0;
  for (int n = 0; n <= 10; ++n) {
    if (n > 0) fact *= n;
    CHECK(g.gram()(n, n).real() == doctest::Approx(kPi * fact).epsilon(1e-12));
    for (int m = 0; m <= 10; ++m)
      if (m != n) CHECK(std::abs(g.gram()(m, n)) <= 1e-12 * kPi * fact);
  }
}

TEST_CASE("constant curvature kernel") {
  for (double c : {0.5, 1.0, 2.0}) {
    const PotentialPair pp = solve_potential(HomogeneousCurvature::constant(c));
    CHECK(model_bergman_at_zero(gram_matrix(pp, 12)) == doctest::Approx(c / kTwoPi).epsilon(1e-12));
    CHECK(orthonormal_basis(pp, 12).kernel_at_zero() == doctest::Approx(c / kTwoPi).epsilon(1e-12));
  }
}

TEST_CASE("quartic example Gram matrix and kernel") {
  const PotentialPair base = solve_potential(quartic_example());
  const PotentialPair pp = base.with_gauge(integrable_gauge(base));
  const GramBasis g8 = gram_matrix(pp, 8);
  const Eigen::LLT<Eigen::MatrixXcd> llt(g8.gram());
  CHECK(llt.info() == Eigen::Success);
  CHECK((g8.gram() - g8.gram().adjoint()).norm() <= 1e-14 * g8.gram().norm());
  CHECK(g8.refinement_change() <= 1e-6);

  // Doubling the angular nodes leaves B^R(0,0) fixed.
  GramOptions fixed;
  fixed.fixed_nodes = g8.angular_nodes();
  GramOptions doubled;
  doubled.fixed_nodes = 2 * g8.angular_nodes();
  const double b1 = model_bergman_at_zero(gram_matrix(pp, 12, fixed));
  const double b2 = model_bergman_at_zero(gram_matrix(pp, 12, doubled));
  CHECK(std::abs(b1 - b2) <= 1e-6 * b2);

  // Gauge invariance: lambda = 1/16 and the searched lambda give the same value.
  const double fixed_gauge = model_bergman_at_zero(gram_matrix(base.with_gauge(complex(1.0 / 16.0, 0.0)), 12));
  CHECK(fixed_gauge == doctest::Approx(b1).epsilon(1e-3));

  // Variational lower bound with the explicit element, f(0) = 1.
  const double nf = norm_squared(quartic_example_element(), 12.0, 1200);
  CHECK(b1 > 0.0);
  CHECK(b1 >= 1.0 / nf);

  // The Arnoldi basis reproduces the monomial route where the latter is well conditioned.
  CHECK(orthonormal_basis(pp, 12).kernel_at_zero() == doctest::Approx(b1).epsilon(1e-9));
}

TEST_CASE("kernel at zero converges in the degree") {
  const PotentialPair base = solve_potential(quartic_example());
  const PotentialPair pp = base.with_gauge(integrable_gauge(base));
  const ConvergedKernel ck = model_bergman_at_zero_converged(pp, 1e-6);
  CHECK(ck.last_change < 1e-6);
  const OrthoPolyBasis basis = orthonormal_basis(pp, ck.max_deg);
  const std::vector<double>& seq = basis.kernel_at_zero_by_degree();
  CHECK(std::abs(seq[ck.max_deg] - seq[ck.max_deg - 2]) <= 1e-6 * seq[ck.max_deg]);
  CHECK(seq[ck.max_deg] == doctest::Approx(ck.value).epsilon(1e-9));
  // Monotone in N: more polynomials, larger kernel.
  for (std::size_t n = 1; n < seq.size(); ++n) CHECK(seq[n] >= seq[n - 1] * (1.0 - 1e-12));

  // Family psi_t = x^2 + t y^2 varies smoothly.
  std::vector<double> vals;
  for (int k = 0; k <= 100; ++k) {
    const double t = 0.5 + 0.01 * k;
    const PotentialPair pt = solve_potential(HomogeneousCurvature::from_terms(4, {{2, 0, 1.0}, {0, 2, t}}));
    vals.push_back(model_bergman_at_zero(gram_matrix(pt, 12)));
  }
  for (std::size_t k = 1; k + 1 < vals.size(); ++k) {
    const double slope = std::abs(vals[k + 1] - vals[k - 1]) / 2.0;
    CHECK(std::abs(vals[k] - vals[k - 1]) <= 10.0 * slope + 1e-14);
  }
}

TEST_CASE("parity and jets") {
  const PotentialPair base = solve_potential(quartic_example());
  const GramBasis g = gram_matrix(base.with_gauge(integrable_gauge(base)), 12);
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int i = 0; i < 100; ++i) {
    const complex z(u(rng), u(rng));
    CHECK(g.kernel_diagonal(z) == doctest::Approx(g.kernel_diagonal(-z)).epsilon(1e-10));
  }
  const auto jets = kernel_parity_and_jets(g, 3);
  for (const JetEntry& j : jets) {
    if (j.dx + j.dy == 0) CHECK(j.value == doctest::Approx(model_bergman_at_zero(g)).epsilon(1e-12));
    if (j.dx + j.dy == 1) CHECK(std::abs(j.value) <= 1e-6);
    if ((j.dx + j.dy) % 2 == 1) CHECK(std::abs(j.value) <= 1e-5);
  }
  CHECK_THROWS_AS(kernel_parity_and_jets(g, 5), InvalidParameter);

  // Rotation covariance for a radial curvature.
  const GramBasis r = gram_matrix(solve_potential(HomogeneousCurvature::from_terms(4, {{2, 0, 1.0}, {0, 2, 1.0}})), 12);
  for (int i = 0; i < 20; ++i) {
    const complex z(u(rng), u(rng));
    CHECK(r.kernel_diagonal(z * std::polar(1.0, 0.7)) == doctest::Approx(r.kernel_diagonal(z)).epsilon(1e-10));
  }
}
