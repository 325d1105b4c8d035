#pragma once

// Model Bergman kernels on C with homogeneous curvature. The space is realized as entire
// functions g with norm int |g|^2 e^{-phi} dA, phi = Re Psi, where dPsi/dzbar = psi z / rho'.

#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "bergman/numerics.hpp"

namespace bergman {

/// c * x^i * y^j
struct XYMonomial {
  int i = 0;
  int j = 0;
  double coeff = 0.0;
};

/// c * z^a * zbar^b
struct ZTerm {
  int a = 0;
  int b = 0;
  complex coeff{};
};

/// Polynomial in z and zbar.
class ZPoly {
 public:
  ZPoly() = default;
  explicit ZPoly(std::vector<ZTerm> terms);

  /// Expansion of sum c x^i y^j with x = (z + zbar)/2, y = (z - zbar)/(2i).
  static ZPoly from_xy(std::span<const XYMonomial> terms);

  complex operator()(complex z) const;
  /// d/dzbar, termwise.
  ZPoly d_zbar() const;
  ZPoly operator+(const ZPoly& other) const;
  ZPoly operator*(const ZPoly& other) const;
  ZPoly scaled(complex s) const;

  /// Coefficient of z^a zbar^b (0 if absent).
  complex coefficient(int a, int b) const;
  const std::vector<ZTerm>& terms() const { return terms_; }

 private:
  void normalize();
  std::vector<ZTerm> terms_;  // sorted by (a, b), merged, zeros removed
};

/// Nonnegative homogeneous curvature coefficient psi of degree rho' - 2 in (x, y).
class HomogeneousCurvature {
 public:
  /// psi = sum of terms; every term must have i + j = rho' - 2.
  static HomogeneousCurvature from_terms(int rho_prime, std::vector<XYMonomial> terms);
  /// Curvature form R = r(x,y) dz^dzbar given by r; then psi = iR(e1, e2) = 2 r.
  static HomogeneousCurvature from_form_coefficient(int rho_prime, std::vector<XYMonomial> r_terms);
  /// psi = c > 0, rho' = 2.
  static HomogeneousCurvature constant(double c);

  int rho_prime() const { return rho_prime_; }
  const std::vector<XYMonomial>& terms() const { return terms_; }
  double psi(double x, double y) const;
  double psi(complex z) const { return psi(z.real(), z.imag()); }
  const ZPoly& psi_zpoly() const { return zpoly_; }

 private:
  HomogeneousCurvature(int rho_prime, std::vector<XYMonomial> terms);
  int rho_prime_;
  std::vector<XYMonomial> terms_;
  ZPoly zpoly_;
};

/// Psi and the weight phi = Re Psi. Homogeneous of degree rho'.
class PotentialPair {
 public:
  PotentialPair(int rho_prime, ZPoly psi_potential, complex gauge);

  int rho_prime() const { return rho_prime_; }
  const ZPoly& Psi() const { return Psi_; }
  /// Coefficient lambda of the holomorphic term lambda z^rho' added to the particular solution.
  complex gauge() const { return gauge_; }
  double phi(complex z) const { return Psi_(z).real(); }
  /// phi on the unit circle; phi(r e^{i theta}) = r^rho' * phi_angular(theta).
  double phi_angular(double theta) const;

  /// Same potential with the holomorphic term replaced by lambda z^rho'.
  PotentialPair with_gauge(complex lambda) const;

 private:
  int rho_prime_;
  ZPoly Psi_;
  complex gauge_;
};

/// The particular solution with no z^rho' term (lambda = 0).
PotentialPair solve_potential(const HomogeneousCurvature& curv);

/// A gauge lambda making phi positive away from 0 (so e^{-phi} is integrable): 0 when
/// phi already is, else the maximizer of min_theta phi found by compass search.
complex integrable_gauge(const PotentialPair& pp);

/// min over the unit circle of phi, sampled at `samples` equispaced angles.
double min_phi_on_circle(const PotentialPair& pp, int samples = 4096);

/// True iff scale * phi(z) >= lower(x, y) at every point, with tolerance 1e-12 * max(1, |lower|).
bool weight_lower_bound_check(const PotentialPair& pp, std::span<const complex> grid,
                              const std::function<double(double, double)>& lower, double scale = 1.0);

struct GramOptions {
  int initial_nodes = 64;
  int max_nodes = 1 << 17;
  int fixed_nodes = 0;        // > 0: no refinement, use exactly this many angular nodes
  double target = 1e-13;      // stop refining when the scaled change is below this
  double fail_tolerance = 1e-6;
};

/// Monomial Gram matrix G_mn = int z^m zbar^n e^{-phi} dA, m, n = 0..max_deg, and its inverse.
class GramBasis {
 public:
  GramBasis(PotentialPair pp, int max_deg, Eigen::MatrixXcd gram, int nodes, double change);

  int max_deg() const { return max_deg_; }
  const PotentialPair& potential() const { return pp_; }
  const Eigen::MatrixXcd& gram() const { return gram_; }
  const Eigen::MatrixXcd& inverse() const { return inverse_; }
  int angular_nodes() const { return nodes_; }
  /// Largest scaled entry change in the last node doubling.
  double refinement_change() const { return change_; }

  /// K(Z, Z) = sum (G^-1)_{nm} Z^m Zbar^n e^{-phi(Z)}.
  double kernel_diagonal(complex z) const;

 private:
  PotentialPair pp_;
  int max_deg_;
  Eigen::MatrixXcd gram_;
  Eigen::MatrixXcd inverse_;
  int nodes_;
  double change_;
};

GramBasis gram_matrix(const PotentialPair& pp, int max_deg, const GramOptions& options = {});

/// B^R(0,0) = (G^-1)_00.
double model_bergman_at_zero(const GramBasis& basis);

/// Orthonormal polynomials for the weight e^{-phi}, built by Arnoldi iteration on point values
/// (multiplication by z^2 within each parity class). Stays stable at degrees where the
/// monomial Gram matrix is numerically singular.
class OrthoPolyBasis {
 public:
  struct Recurrence {
    int parity = 0;
    std::vector<double> norms;                // h_k
    std::vector<std::vector<complex>> coeffs;  // c_{jk}, j < k
  };

  OrthoPolyBasis(PotentialPair pp, int max_deg, std::vector<double> at_zero, Recurrence even, Recurrence odd);

  int max_deg() const { return max_deg_; }
  const PotentialPair& potential() const { return pp_; }
  /// Entry N: K_N(0,0) of the span of z^0..z^N.
  const std::vector<double>& kernel_at_zero_by_degree() const { return at_zero_; }
  double kernel_at_zero() const { return at_zero_.back(); }
  /// sum_k |q_k(Z)|^2 e^{-phi(Z)}.
  double kernel_diagonal(complex z) const;

 private:
  PotentialPair pp_;
  int max_deg_;
  std::vector<double> at_zero_;
  Recurrence even_;
  Recurrence odd_;
};

struct OrthoOptions {
  int angular_nodes = 256;  // on [0, pi); both parities give pi-periodic |q|^2
  int radial_nodes = 0;     // 0: max_deg + 48
};

OrthoPolyBasis orthonormal_basis(const PotentialPair& pp, int max_deg, const OrthoOptions& options = {});

struct ConvergedKernel {
  double value = 0.0;
  int max_deg = 0;
  double last_change = 0.0;  // relative change over the final N -> N+2 step
};

/// B^R(0,0), raising the degree until the N -> N+2 relative change is below rel_tol.
ConvergedKernel model_bergman_at_zero_converged(const PotentialPair& pp, double rel_tol = 1e-6,
                                                int degree_cap = 200, const OrthoOptions& options = {});

/// f = prefactor * exp(exponent), both polynomials in z and zbar.
struct ExpPoly {
  ZPoly prefactor;
  ZPoly exponent;

  complex operator()(complex z) const;
  complex d_zbar(complex z) const;
};

/// max over grid of |b+ f| / (1 + |f|), b+ = 2 d/dzbar + psi z / rho'. Analytic d/dzbar.
double kernel_membership_residual(const HomogeneousCurvature& curv, const ExpPoly& f,
                                  std::span<const complex> grid);
/// Same residual for an arbitrary function; d/dzbar by a 4th-order central difference of step h.
double kernel_membership_residual(const HomogeneousCurvature& curv,
                                  const std::function<complex(complex)>& f,
                                  std::span<const complex> grid, double h = 1e-3);

/// The example element: R = y^2 dz^dzbar, f = exp(-(|z|^4 - |z|^2 z^2 - |z|^2 zbar^2 / 3 + z^4 / 2) / 16).
ExpPoly quartic_example_element();

struct JetEntry {
  int dx = 0;  // order in x
  int dy = 0;  // order in y
  double value = 0.0;
};

/// Central-difference partial derivatives d^{dx+dy} K / dx^dx dy^dy at 0 for all dx + dy <= order.
std::vector<JetEntry> kernel_parity_and_jets(const GramBasis& basis, int order, double h = 1e-3);

}  // namespace bergman
