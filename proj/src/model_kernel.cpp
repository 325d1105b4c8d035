#include "bergman/model_kernel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <sstream>
#include <utility>

#include "bergman/errors.hpp"

namespace bergman {

namespace {

double binomial(int n, int k) { return std::round(std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0))); }

complex ipow(complex z, int k) {
  complex out{1.0, 0.0};
  for (int i = 0; i < k; ++i) out *= z;
  return out;
}

}  // namespace

ZPoly::ZPoly(std::vector<ZTerm> terms) : terms_(std::move(terms)) { normalize(); }

void ZPoly::normalize() {
  std::map<std::pair<int, int>, complex> merged;
  for (const ZTerm& t : terms_) merged[{t.a, t.b}] += t.coeff;
  terms_.clear();
  for (const auto& [key, c] : merged)
    if (c != complex{}) terms_.push_back({key.first, key.second, c});
}

ZPoly ZPoly::from_xy(std::span<const XYMonomial> terms) {
  std::vector<ZTerm> out;
  const complex i_unit{0.0, 1.0};
  for (const XYMonomial& m : terms) {
    // x^i = 2^-i sum_k C(i,k) z^k zbar^(i-k);  y^j = (2i)^-j sum_l C(j,l) z^l (-zbar)^(j-l)
    const complex scale = m.coeff / (std::pow(2.0, m.i) * ipow(2.0 * i_unit, m.j));
    for (int k = 0; k <= m.i; ++k)
      for (int l = 0; l <= m.j; ++l) {
        const double sign = ((m.j - l) % 2 == 0) ? 1.0 : -1.0;
        out.push_back({k + l, (m.i - k) + (m.j - l), scale * binomial(m.i, k) * binomial(m.j, l) * sign});
      }
  }
  ZPoly p(std::move(out));
  // x, y real: drop the rounding residue of cancelled imaginary parts.
  for (ZTerm& t : p.terms_) {
    if (std::abs(t.coeff.real()) < 1e-15 * std::abs(t.coeff)) t.coeff.real(0.0);
    if (std::abs(t.coeff.imag()) < 1e-15 * std::abs(t.coeff)) t.coeff.imag(0.0);
  }
  p.normalize();
  return p;
}

complex ZPoly::operator()(complex z) const {
  const complex zb = std::conj(z);
  complex s{};
  for (const ZTerm& t : terms_) s += t.coeff * ipow(z, t.a) * ipow(zb, t.b);
  return s;
}

ZPoly ZPoly::d_zbar() const {
  std::vector<ZTerm> out;
  for (const ZTerm& t : terms_)
    if (t.b > 0) out.push_back({t.a, t.b - 1, t.coeff * static_cast<double>(t.b)});
  return ZPoly(std::move(out));
}

ZPoly ZPoly::operator+(const ZPoly& other) const {
  std::vector<ZTerm> out = terms_;
  out.insert(out.end(), other.terms_.begin(), other.terms_.end());
  return ZPoly(std::move(out));
}

ZPoly ZPoly::operator*(const ZPoly& other) const {
  std::vector<ZTerm> out;
  for (const ZTerm& s : terms_)
    for (const ZTerm& t : other.terms_) out.push_back({s.a + t.a, s.b + t.b, s.coeff * t.coeff});
  return ZPoly(std::move(out));
}

ZPoly ZPoly::scaled(complex s) const {
  std::vector<ZTerm> out = terms_;
  for (ZTerm& t : out) t.coeff *= s;
  return ZPoly(std::move(out));
}

complex ZPoly::coefficient(int a, int b) const {
  for (const ZTerm& t : terms_)
    if (t.a == a && t.b == b) return t.coeff;
  return {};
}

HomogeneousCurvature::HomogeneousCurvature(int rho_prime, std::vector<XYMonomial> terms)
    : rho_prime_(rho_prime), terms_(std::move(terms)) {
  if (rho_prime < 2 || rho_prime % 2 != 0)
    throw InvalidParameter("curvature: rho' must be an even integer >= 2");
  for (const XYMonomial& m : terms_)
    if (m.i < 0 || m.j < 0 || m.i + m.j != rho_prime - 2) {
      std::ostringstream os;
      os << "curvature: monomial x^" << m.i << " y^" << m.j << " is not of degree rho'-2 = " << rho_prime - 2;
      throw InvalidParameter(os.str());
    }
  zpoly_ = ZPoly::from_xy(terms_);
  if (zpoly_.terms().empty()) throw InvalidParameter("curvature: psi is identically zero");

  // Homogeneous, so the unit circle decides the sign.
  constexpr int kSamples = 10000;
  double lo = 0.0;
  double hi = 0.0;
  for (int k = 0; k < kSamples; ++k) {
    const double t = kTwoPi * k / kSamples;
    const double v = psi(std::cos(t), std::sin(t));
    lo = std::min(lo, v);
    hi = std::max(hi, std::abs(v));
  }
  if (lo < -1e-12 * hi) throw InvalidParameter("curvature: psi takes negative values");
}

HomogeneousCurvature HomogeneousCurvature::from_terms(int rho_prime, std::vector<XYMonomial> terms) {
  return HomogeneousCurvature(rho_prime, std::move(terms));
}

HomogeneousCurvature HomogeneousCurvature::from_form_coefficient(int rho_prime,
                                                                 std::vector<XYMonomial> r_terms) {
  for (XYMonomial& m : r_terms) m.coeff *= 2.0;  // dz^dzbar = -2i dx^dy
  return HomogeneousCurvature(rho_prime, std::move(r_terms));
}

HomogeneousCurvature HomogeneousCurvature::constant(double c) {
  if (!(c > 0.0)) throw InvalidParameter("curvature: constant must be positive");
  return HomogeneousCurvature(2, {{0, 0, c}});
}

double HomogeneousCurvature::psi(double x, double y) const {
  double s = 0.0;
  for (const XYMonomial& m : terms_) s += m.coeff * std::pow(x, m.i) * std::pow(y, m.j);
  return s;
}

PotentialPair::PotentialPair(int rho_prime, ZPoly psi_potential, complex gauge)
    : rho_prime_(rho_prime), Psi_(std::move(psi_potential)), gauge_(gauge) {}

double PotentialPair::phi_angular(double theta) const { return phi(std::polar(1.0, theta)); }

PotentialPair PotentialPair::with_gauge(complex lambda) const {
  const ZPoly shifted = Psi_ + ZPoly({{rho_prime_, 0, lambda - gauge_}});
  return PotentialPair(rho_prime_, shifted, lambda);
}

PotentialPair solve_potential(const HomogeneousCurvature& curv) {
  // psi = sum beta_ab z^a zbar^b  =>  Psi = sum beta_ab z^(a+1) zbar^(b+1) / (rho' (b+1))
  const int rho = curv.rho_prime();
  std::vector<ZTerm> out;
  for (const ZTerm& t : curv.psi_zpoly().terms())
    out.push_back({t.a + 1, t.b + 1, t.coeff / (static_cast<double>(rho) * (t.b + 1))});
  return PotentialPair(rho, ZPoly(std::move(out)), complex{});
}

double min_phi_on_circle(const PotentialPair& pp, int samples) {
  double m = std::numeric_limits<double>::infinity();
  for (int k = 0; k < samples; ++k) m = std::min(m, pp.phi_angular(kTwoPi * k / samples));
  return m;
}

complex integrable_gauge(const PotentialPair& pp) {
  constexpr int kSamples = 4096;
  const int rho = pp.rho_prime();
  const PotentialPair base = pp.with_gauge({});
  std::vector<double> phi0(kSamples), c(kSamples), s(kSamples);
  double scale = 0.0;
  for (int k = 0; k < kSamples; ++k) {
    const double t = kTwoPi * k / kSamples;
    phi0[k] = base.phi_angular(t);
    c[k] = std::cos(rho * t);
    s[k] = std::sin(rho * t);
    scale = std::max(scale, std::abs(phi0[k]));
  }
  // min_theta of phi0 + Re(lambda e^{i rho theta}); concave in lambda.
  auto objective = [&](double u, double v) {
    double m = std::numeric_limits<double>::infinity();
    for (int k = 0; k < kSamples; ++k) m = std::min(m, phi0[k] + u * c[k] - v * s[k]);
    return m;
  };
  double u = 0.0;
  double v = 0.0;
  double best = objective(u, v);
  if (best > 1e-12 * scale) return {};
  static constexpr std::array<std::pair<double, double>, 8> kDirs{
      {{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {0.7071067811865476, 0.7071067811865476},
       {-0.7071067811865476, 0.7071067811865476}, {0.7071067811865476, -0.7071067811865476},
       {-0.7071067811865476, -0.7071067811865476}}};
  double step = scale;
  while (step > 1e-12 * scale) {
    bool moved = false;
    for (const auto& [du, dv] : kDirs) {
      const double val = objective(u + step * du, v + step * dv);
      if (val > best) {
        best = val;
        u += step * du;
        v += step * dv;
        moved = true;
        break;
      }
    }
    if (!moved) step *= 0.5;
  }
  if (!(best > 1e-12 * scale))
    throw InvalidParameter("no gauge lambda z^rho' makes the weight e^{-phi} integrable");
  return {u, v};
}

bool weight_lower_bound_check(const PotentialPair& pp, std::span<const complex> grid,
                              const std::function<double(double, double)>& lower, double scale) {
  for (complex z : grid) {
    const double bound = lower(z.real(), z.imag());
    if (scale * pp.phi(z) < bound - 1e-12 * std::max(1.0, std::abs(bound))) return false;
  }
  return true;
}

GramBasis::GramBasis(PotentialPair pp, int max_deg, Eigen::MatrixXcd gram, int nodes, double change)
    : pp_(std::move(pp)), max_deg_(max_deg), gram_(std::move(gram)), nodes_(nodes), change_(change) {
  const Eigen::Index n = gram_.rows();
  Eigen::VectorXd d(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(gram_(i, i).real() > 0.0)) throw NumericalFailure("Gram matrix has a non-positive diagonal");
    d(i) = 1.0 / std::sqrt(gram_(i, i).real());
  }
  const Eigen::MatrixXcd scaled = d.asDiagonal() * gram_ * d.asDiagonal();
  Eigen::LLT<Eigen::MatrixXcd> llt(scaled);
  if (llt.info() != Eigen::Success) throw NumericalFailure("Gram matrix is not positive definite");
  const Eigen::MatrixXcd inv = llt.solve(Eigen::MatrixXcd::Identity(n, n));
  inverse_ = d.asDiagonal() * inv * d.asDiagonal();
}

double GramBasis::kernel_diagonal(complex z) const {
  const Eigen::Index n = max_deg_ + 1;
  Eigen::VectorXcd v(n);
  complex zk{1.0, 0.0};
  for (Eigen::Index k = 0; k < n; ++k) {
    v(k) = zk;
    zk *= z;
  }
  const complex s = v.adjoint() * inverse_ * v;
  return s.real() * std::exp(-pp_.phi(z));
}

namespace {

Eigen::MatrixXcd gram_at_nodes(const PotentialPair& pp, int max_deg, int nodes) {
  const int rho = pp.rho_prime();
  const int n = max_deg + 1;
  const int dmax = 2 * max_deg;
  std::vector<double> log_gamma(dmax + 1);
  for (int d = 0; d <= dmax; ++d) {
    const double s = (d + 2.0) / rho;
    log_gamma[d] = std::lgamma(s) - std::log(static_cast<double>(rho));
  }
  // acc[d][m-n + max_deg] = sum_k e^{i(m-n)theta_k} Phi_k^{-(d+2)/rho}
  std::vector<complex> acc((dmax + 1) * (2 * max_deg + 1));
  std::vector<complex> phase(2 * max_deg + 1);
  for (int k = 0; k < nodes; ++k) {
    const double t = kTwoPi * k / nodes;
    const double phi = pp.phi_angular(t);
    if (!(phi > 0.0)) throw InvalidParameter("weight e^{-phi} is not integrable; choose an integrable gauge");
    const double log_phi = std::log(phi);
    for (int j = -max_deg; j <= max_deg; ++j) phase[j + max_deg] = std::polar(1.0, j * t);
    for (int d = 0; d <= dmax; ++d) {
      const double w = std::exp(log_gamma[d] - (d + 2.0) / rho * log_phi);
      const int jlo = std::max(-max_deg, d - 2 * max_deg);  // m - n with m + n = d, 0 <= m, n <= N
      const int jhi = std::min(max_deg, d);
      for (int j = jlo; j <= jhi; ++j) acc[d * (2 * max_deg + 1) + j + max_deg] += w * phase[j + max_deg];
    }
  }
  Eigen::MatrixXcd g(n, n);
  const double h = kTwoPi / nodes;
  for (int m = 0; m < n; ++m)
    for (int q = 0; q < n; ++q) g(m, q) = h * acc[(m + q) * (2 * max_deg + 1) + (m - q) + max_deg];
  // Exact symmetries: Hermitian, and zero for odd m + n (phi is even).
  for (int m = 0; m < n; ++m) {
    g(m, m) = g(m, m).real();
    for (int q = 0; q < m; ++q) {
      const complex v = (m + q) % 2 == 0 ? 0.5 * (g(m, q) + std::conj(g(q, m))) : complex{};
      g(m, q) = v;
      g(q, m) = std::conj(v);
    }
  }
  return g;
}

double scaled_change(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  double worst = 0.0;
  for (Eigen::Index m = 0; m < a.rows(); ++m)
    for (Eigen::Index n = 0; n < a.cols(); ++n)
      worst = std::max(worst, std::abs(a(m, n) - b(m, n)) / std::sqrt(b(m, m).real() * b(n, n).real()));
  return worst;
}

}  // namespace

GramBasis gram_matrix(const PotentialPair& pp, int max_deg, const GramOptions& options) {
  if (max_deg < 0) throw InvalidParameter("gram_matrix: max_deg must be >= 0");
  if (options.fixed_nodes > 0) {
    return GramBasis(pp, max_deg, gram_at_nodes(pp, max_deg, options.fixed_nodes), options.fixed_nodes, 0.0);
  }
  int nodes = std::max(8, options.initial_nodes);
  Eigen::MatrixXcd prev = gram_at_nodes(pp, max_deg, nodes);
  for (;;) {
    nodes *= 2;
    Eigen::MatrixXcd next = gram_at_nodes(pp, max_deg, nodes);
    const double change = scaled_change(prev, next);
    if (change <= options.target) return GramBasis(pp, max_deg, std::move(next), nodes, change);
    if (nodes >= options.max_nodes) {
      if (change <= options.fail_tolerance) return GramBasis(pp, max_deg, std::move(next), nodes, change);
      std::ostringstream os;
      os << "gram_matrix: step-halving disagreement " << change << " at " << nodes << " angular nodes";
      throw QuadratureError(os.str());
    }
    prev = std::move(next);
  }
}

double model_bergman_at_zero(const GramBasis& basis) {
  const double v = basis.inverse()(0, 0).real();
  if (!(v > 0.0)) throw NumericalFailure("model kernel at 0 is not positive");
  return v;
}

namespace {

struct PointRule {
  std::vector<complex> z;
  std::vector<double> sqrt_w;
};

// Angular trapezoid on [0, pi) times Gauss-Legendre in s = Phi(theta)^{1/rho'} r, where the
// weight becomes s e^{-s^rho'} ds for every direction.
PointRule model_rule(const PotentialPair& pp, int max_deg, int n_theta, int n_r) {
  const double rho = pp.rho_prime();
  const double k = 2.0 * max_deg + 1.0;
  const double s_peak = std::pow(k / rho, 1.0 / rho);
  auto f = [&](double s) { return k * std::log(s) - std::pow(s, rho); };
  const double target = f(s_peak) - 50.0;
  double lo = s_peak;
  double hi = s_peak + 1.0;
  while (f(hi) > target) hi += 1.0;
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > target ? lo : hi) = mid;
  }
  const QuadratureRule radial = composite_gauss_legendre(0.0, hi, static_cast<std::size_t>((n_r + 7) / 8));

  PointRule rule;
  rule.z.reserve(static_cast<std::size_t>(n_theta) * radial.nodes.size());
  rule.sqrt_w.reserve(rule.z.capacity());
  for (int t = 0; t < n_theta; ++t) {
    const double theta = kPi * t / n_theta;
    const double phi = pp.phi_angular(theta);
    if (!(phi > 0.0)) throw InvalidParameter("weight e^{-phi} is not integrable; choose an integrable gauge");
    const double scale = std::pow(phi, -1.0 / rho);
    const complex dir = std::polar(scale, theta);
    for (std::size_t i = 0; i < radial.nodes.size(); ++i) {
      const double s = radial.nodes[i];
      const double w = (kTwoPi / n_theta) * scale * scale * radial.weights[i] * s * std::exp(-std::pow(s, rho));
      rule.z.push_back(s * dir);
      rule.sqrt_w.push_back(std::sqrt(w));
    }
  }
  return rule;
}

// Arnoldi on one parity class; returns the recurrence and q_k(0) for each basis vector.
OrthoPolyBasis::Recurrence arnoldi(const PointRule& rule, int parity, int count, std::vector<double>& at_zero) {
  using Vec = Eigen::VectorXcd;
  const Eigen::Index n = static_cast<Eigen::Index>(rule.z.size());
  Vec z2(n);
  Vec v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    z2(i) = rule.z[i] * rule.z[i];
    v(i) = (parity == 0 ? complex{1.0, 0.0} : rule.z[i]) * rule.sqrt_w[i];
  }
  OrthoPolyBasis::Recurrence rec;
  rec.parity = parity;
  std::vector<Vec> q;
  std::vector<complex> q0;
  double h = v.norm();
  rec.norms.push_back(h);
  rec.coeffs.emplace_back();
  q.push_back(v / h);
  q0.push_back(parity == 0 ? complex{1.0 / h, 0.0} : complex{});
  for (int k = 1; k < count; ++k) {
    v = z2.cwiseProduct(q.back());
    std::vector<complex> c(q.size(), complex{});
    complex v0{};  // (z^2 q)(0) = 0
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t j = 0; j < q.size(); ++j) {
        const complex cj = q[j].dot(v);
        v -= cj * q[j];
        c[j] += cj;
        v0 -= cj * q0[j];
      }
    h = v.norm();
    if (!(h > 0.0)) throw NumericalFailure("orthonormal basis: Arnoldi breakdown");
    rec.norms.push_back(h);
    rec.coeffs.push_back(std::move(c));
    q.push_back(v / h);
    q0.push_back(v0 / h);
  }
  for (complex c : q0) at_zero.push_back(std::norm(c));
  return rec;
}

}  // namespace

OrthoPolyBasis::OrthoPolyBasis(PotentialPair pp, int max_deg, std::vector<double> at_zero, Recurrence even,
                               Recurrence odd)
    : pp_(std::move(pp)), max_deg_(max_deg), at_zero_(std::move(at_zero)), even_(std::move(even)), odd_(std::move(odd)) {}

double OrthoPolyBasis::kernel_diagonal(complex z) const {
  const complex z2 = z * z;
  double s = 0.0;
  for (const Recurrence* rec : {&even_, &odd_}) {
    std::vector<complex> q;
    q.reserve(rec->norms.size());
    for (std::size_t k = 0; k < rec->norms.size(); ++k) {
      complex v = k == 0 ? (rec->parity == 0 ? complex{1.0, 0.0} : z) : z2 * q.back();
      for (std::size_t j = 0; j < rec->coeffs[k].size(); ++j) v -= rec->coeffs[k][j] * q[j];
      q.push_back(v / rec->norms[k]);
      s += std::norm(q.back());
    }
  }
  return s * std::exp(-pp_.phi(z));
}

OrthoPolyBasis orthonormal_basis(const PotentialPair& pp, int max_deg, const OrthoOptions& options) {
  if (max_deg < 0) throw InvalidParameter("orthonormal_basis: max_deg must be >= 0");
  const int n_r = options.radial_nodes > 0 ? options.radial_nodes : max_deg + 48;
  const PointRule rule = model_rule(pp, max_deg, options.angular_nodes, n_r);
  std::vector<double> even0;
  std::vector<double> odd0;
  OrthoPolyBasis::Recurrence even = arnoldi(rule, 0, max_deg / 2 + 1, even0);
  OrthoPolyBasis::Recurrence odd;
  odd.parity = 1;
  if (max_deg >= 1) odd = arnoldi(rule, 1, (max_deg - 1) / 2 + 1, odd0);
  std::vector<double> by_degree(max_deg + 1);
  double acc = 0.0;
  for (int d = 0; d <= max_deg; ++d) {
    if (d % 2 == 0) acc += even0[d / 2];
    by_degree[d] = acc;
  }
  return OrthoPolyBasis(pp, max_deg, std::move(by_degree), std::move(even), std::move(odd));
}

ConvergedKernel model_bergman_at_zero_converged(const PotentialPair& pp, double rel_tol, int degree_cap,
                                                const OrthoOptions& options) {
  int n = 32;
  for (;;) {
    const OrthoPolyBasis basis = orthonormal_basis(pp, n, options);
    const auto& b = basis.kernel_at_zero_by_degree();
    for (int d = 2; d + 2 <= n; d += 2) {
      const double change = std::abs(b[d + 2] - b[d]) / b[d + 2];
      if (change < rel_tol) return {b[d + 2], d + 2, change};
    }
    if (n >= degree_cap) {
      std::ostringstream os;
      os << "model kernel at 0 not converged to " << rel_tol << " by degree " << n;
      throw QuadratureError(os.str());
    }
    n = std::min(2 * n, degree_cap);
  }
}

complex ExpPoly::operator()(complex z) const { return prefactor(z) * std::exp(exponent(z)); }

complex ExpPoly::d_zbar(complex z) const {
  return (prefactor.d_zbar()(z) + prefactor(z) * exponent.d_zbar()(z)) * std::exp(exponent(z));
}

double kernel_membership_residual(const HomogeneousCurvature& curv, const ExpPoly& f,
                                  std::span<const complex> grid) {
  const double rho = curv.rho_prime();
  double worst = 0.0;
  for (complex z : grid) {
    const complex fz = f(z);
    const complex bplus = 2.0 * f.d_zbar(z) + curv.psi(z) * z / rho * fz;
    worst = std::max(worst, std::abs(bplus) / (1.0 + std::abs(fz)));
  }
  return worst;
}

double kernel_membership_residual(const HomogeneousCurvature& curv,
                                  const std::function<complex(complex)>& f,
                                  std::span<const complex> grid, double h) {
  const double rho = curv.rho_prime();
  const complex i_unit{0.0, 1.0};
  auto d = [&](complex z, complex e) {
    return (f(z - 2.0 * e) - 8.0 * f(z - e) + 8.0 * f(z + e) - f(z + 2.0 * e)) / (12.0 * h);
  };
  double worst = 0.0;
  for (complex z : grid) {
    const complex fz = f(z);
    const complex dzbar = 0.5 * (d(z, h) + i_unit * d(z, i_unit * h));
    const complex bplus = 2.0 * dzbar + curv.psi(z) * z / rho * fz;
    worst = std::max(worst, std::abs(bplus) / (1.0 + std::abs(fz)));
  }
  return worst;
}

ExpPoly quartic_example_element() {
  ExpPoly f;
  f.prefactor = ZPoly({{0, 0, 1.0}});
  f.exponent = ZPoly({{2, 2, 1.0}, {3, 1, -1.0}, {1, 3, -1.0 / 3.0}, {4, 0, 0.5}}).scaled(-1.0 / 16.0);
  return f;
}

std::vector<JetEntry> kernel_parity_and_jets(const GramBasis& basis, int order, double h) {
  if (order < 0 || order > 4) throw InvalidParameter("kernel_parity_and_jets: order must be in [0, 4]");
  static constexpr double kStencil[5][5] = {{0, 0, 1, 0, 0},
                                            {0, -0.5, 0, 0.5, 0},
                                            {0, 1, -2, 1, 0},
                                            {-0.5, 1, 0, -1, 0.5},
                                            {1, -4, 6, -4, 1}};
  double values[5][5];
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) values[i][j] = basis.kernel_diagonal({(i - 2) * h, (j - 2) * h});
  std::vector<JetEntry> out;
  for (int total = 0; total <= order; ++total)
    for (int dx = total; dx >= 0; --dx) {
      const int dy = total - dx;
      double s = 0.0;
      for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) s += kStencil[dx][i] * kStencil[dy][j] * values[i][j];
      out.push_back({dx, dy, s / std::pow(h, total)});
    }
  return out;
}

}  // namespace bergman
