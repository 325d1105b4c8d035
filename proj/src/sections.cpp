#include "bergman/sections.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include "bergman/errors.hpp"

namespace bergman {

namespace {

constexpr double kNearContour = 1e-8;
constexpr double kMergeDistance = 1e-8;
constexpr double kPolishTolerance = 1e-12;

// Coefficients of P(z) = sum_k a_k z^k, k = 0..L-1, as log-modulus and phase.
struct LogPoly {
  std::vector<double> log_mod;
  std::vector<double> phase;
};

LogPoly coefficients(const SectionSample& s) {
  const auto lc = s.space->log_coeffs();
  LogPoly out;
  out.log_mod.resize(s.eta.size());
  out.phase.resize(s.eta.size());
  for (std::size_t k = 0; k < s.eta.size(); ++k) {
    const double m = std::abs(s.eta[k]);
    out.log_mod[k] = m > 0.0 ? std::log(m) + 0.5 * lc[k] : kNegInf;
    out.phase[k] = std::arg(s.eta[k]);
  }
  return out;
}

// Newton quotient P(z)/P'(z) with both scaled by the largest term.
complex newton_quotient(const LogPoly& a, complex z) {
  const double lr = std::log(std::abs(z));
  const double th = std::arg(z);
  double m = kNegInf;
  for (std::size_t k = 0; k < a.log_mod.size(); ++k) m = std::max(m, a.log_mod[k] + k * lr);
  complex s0{};
  complex s1{};
  for (std::size_t k = 0; k < a.log_mod.size(); ++k) {
    const double t = a.log_mod[k] + k * lr - m;
    if (t < -80.0) continue;
    const complex term = std::polar(std::exp(t), a.phase[k] + k * th);
    s0 += term;
    s1 += static_cast<double>(k) * term;
  }
  return z * s0 / s1;  // P' = (sum k a_k z^k) / z
}

void sort_zeros(std::vector<Zero>& zs) {
  std::sort(zs.begin(), zs.end(), [](const Zero& x, const Zero& y) {
    const double rx = std::abs(x.location);
    const double ry = std::abs(y.location);
    if (rx != ry) return rx < ry;
    return std::arg(x.location) < std::arg(y.location);
  });
}

}  // namespace

int ZeroSet::count() const {
  int n = 0;
  for (const Zero& z : zeros) n += z.multiplicity;
  return n;
}

SectionSample sample_section(std::shared_ptr<const DiscSpace> space, std::uint64_t seed, SeedPath path) {
  if (!space) throw InvalidParameter("sample_section: null space");
  CounterStream stream(seed, path);
  SectionSample s;
  s.eta.resize(space->length());
  for (complex& e : s.eta) e = stream.complex_normal();
  s.space = std::move(space);
  s.seed = seed;
  s.seed_path = std::move(path);
  return s;
}

SectionSample section_from_coefficients(std::shared_ptr<const DiscSpace> space, std::vector<complex> eta) {
  if (!space) throw InvalidParameter("section_from_coefficients: null space");
  if (eta.size() != space->length())
    throw InvalidParameter("section_from_coefficients: coefficient count must equal the truncation length");
  SectionSample s;
  s.space = std::move(space);
  s.eta = std::move(eta);
  return s;
}

KernelValue evaluate(const SectionSample& sample, complex z) {
  const double r = std::abs(z);
  if (!(r > 0.0 && r < 1.0)) throw DomainError("evaluate: point outside the punctured disc");
  const LogPoly a = coefficients(sample);
  const double lr = std::log(r);
  const double th = std::arg(z);
  double m = kNegInf;
  for (std::size_t k = 0; k < a.log_mod.size(); ++k) m = std::max(m, a.log_mod[k] + (k + 1) * lr);
  KernelValue out;
  if (!(m > kNegInf)) return out;
  complex s{};
  for (std::size_t k = 0; k < a.log_mod.size(); ++k) {
    const double t = a.log_mod[k] + (k + 1) * lr - m;
    if (t < -80.0) continue;
    s += std::polar(std::exp(t), a.phase[k] + std::remainder((k + 1) * th, kTwoPi));
  }
  const double mod = std::abs(s);
  if (mod > 0.0) {
    out.log_modulus = m + std::log(mod) + 0.5 * sample.space->p() * std::log(-2.0 * lr);
    out.phase = std::arg(s);
  }
  return out;
}

std::size_t truncation_length(int p, double outer_radius, double eps) {
  if (!(eps > 0.0)) throw InvalidParameter("truncation_length: eps must be positive");
  return required_length(p, outer_radius, eps * eps);
}

ZeroSet polynomial_zeros(const SectionSample& sample) {
  const LogPoly a = coefficients(sample);
  ZeroSet out;
  out.method = ZeroMethod::companion;
  // Leading and trailing zero coefficients: degree drop and roots at the puncture.
  std::size_t lo = 0;
  std::size_t hi = a.log_mod.size();
  while (lo < hi && !(a.log_mod[lo] > kNegInf)) ++lo;
  while (hi > lo && !(a.log_mod[hi - 1] > kNegInf)) --hi;
  if (hi <= lo + 1) return out;
  const auto n = static_cast<lapack_int>(hi - lo - 1);

  // z = beta w with |b_0| = |b_n|, then monic.
  const double log_beta = (a.log_mod[lo] - a.log_mod[hi - 1]) / n;
  const double lead = a.log_mod[hi - 1] + n * log_beta;
  std::vector<complex> c(n);  // c_j, j = 0..n-1, of w^n + sum c_j w^j
  for (lapack_int j = 0; j < n; ++j) {
    const double lm = a.log_mod[lo + j];
    if (!(lm > kNegInf)) continue;
    const double t = lm + j * log_beta - lead;
    if (t > 700.0) throw NumericalFailure("find_zeros: balanced coefficients overflow");
    c[j] = std::polar(std::exp(t), a.phase[lo + j] - a.phase[hi - 1]);
  }
  std::vector<complex> h(static_cast<std::size_t>(n) * n);
  auto at = [&](lapack_int i, lapack_int j) -> complex& { return h[static_cast<std::size_t>(j) * n + i]; };
  for (lapack_int j = 0; j < n; ++j) at(0, j) = -c[n - 1 - j];
  for (lapack_int i = 1; i < n; ++i) at(i, i - 1) = 1.0;
  lapack_int ilo = 1;
  lapack_int ihi = n;
  std::vector<double> scale(n);
  if (LAPACKE_zgebal(LAPACK_COL_MAJOR, 'S', n, h.data(), n, &ilo, &ihi, scale.data()) != 0)
    throw NumericalFailure("find_zeros: balancing failed");
  std::vector<complex> w(n);
  complex dummy{};
  if (LAPACKE_zhseqr(LAPACK_COL_MAJOR, 'E', 'N', n, ilo, ihi, h.data(), n, w.data(), &dummy, 1) != 0)
    throw NumericalFailure("find_zeros: Hessenberg QR did not converge");

  const double beta = std::exp(log_beta);
  std::vector<Zero> roots;
  roots.reserve(n);
  for (complex wi : w) {
    Zero zr;
    zr.location = beta * wi;
    double last = std::numeric_limits<double>::infinity();
    zr.converged = false;
    for (int it = 0; it < 30; ++it) {
      const complex d = newton_quotient(a, zr.location);
      const double step = std::abs(d);
      if (!std::isfinite(step) || step > last) break;
      zr.location -= d;
      last = step;
      if (step < kPolishTolerance * std::max(1.0, std::abs(zr.location))) {
        zr.converged = true;
        break;
      }
    }
    zr.newton_step = last;
    roots.push_back(zr);
  }
  sort_zeros(roots);

  // Merge clusters closer than the merge distance.
  std::vector<bool> used(roots.size(), false);
  for (std::size_t i = 0; i < roots.size(); ++i) {
    if (used[i]) continue;
    Zero merged = roots[i];
    for (std::size_t j = i + 1; j < roots.size(); ++j) {
      if (used[j]) continue;
      if (std::abs(std::abs(roots[j].location) - std::abs(roots[i].location)) > kMergeDistance) break;
      if (std::abs(roots[j].location - roots[i].location) < kMergeDistance) {
        used[j] = true;
        merged.multiplicity += roots[j].multiplicity;
        merged.converged = merged.converged && roots[j].converged;
      }
    }
    if (merged.multiplicity > 1) ++out.merged;
    if (!merged.converged) ++out.unconverged;
    out.zeros.push_back(merged);
  }
  return out;
}

ZeroSet find_zeros(const SectionSample& sample, const Annulus& region) {
  ZeroSet all = polynomial_zeros(sample);
  ZeroSet out;
  out.region = region;
  out.method = ZeroMethod::companion;
  if (region.empty()) return out;
  for (const Zero& z : all.zeros) {
    const double r = std::abs(z.location);
    if (r >= region.inner() && r <= region.outer()) {
      out.zeros.push_back(z);
      if (z.multiplicity > 1) ++out.merged;
      if (!z.converged) ++out.unconverged;
    }
  }
  return out;
}

int winding_number(const SectionSample& sample, double radius) {
  if (!(radius > 0.0 && radius < 1.0)) throw DomainError("winding_number: radius outside (0, 1)");
  const LogPoly a = coefficients(sample);
  const double lr = std::log(radius);
  double m = kNegInf;
  for (std::size_t k = 0; k < a.log_mod.size(); ++k) m = std::max(m, a.log_mod[k] + k * lr);
  if (!(m > kNegInf)) throw InvalidParameter("winding_number: zero section");
  // On the circle P is a trigonometric polynomial in u = e^{i theta}.
  std::vector<complex> b(a.log_mod.size());
  std::size_t top = 0;
  for (std::size_t k = 0; k < b.size(); ++k) {
    const double t = a.log_mod[k] + k * lr - m;
    if (t < -745.0) continue;
    b[k] = std::polar(std::exp(t), a.phase[k]);
    top = k;
  }
  auto eval = [&](double theta, complex& s1) {
    const complex u = std::polar(1.0, theta);
    complex s0{};
    s1 = {};
    for (std::size_t k = top + 1; k-- > 0;) {
      s0 = s0 * u + b[k];
      s1 = s1 * u + static_cast<double>(k) * b[k];
    }
    return s0;
  };

  // No step longer than a quarter period of the top frequency.
  const double max_step = std::min(0.5, 0.25 * kTwoPi / static_cast<double>(std::max<std::size_t>(top, 1)));
  complex d;
  complex v = eval(0.0, d);
  double theta = 0.0;
  double total = 0.0;
  while (theta < kTwoPi) {
    // |P / P'| approximates the distance to the nearest zero; dP/dtheta = i z P'.
    const double ratio = std::abs(v) / std::abs(d);
    if (radius * ratio < kNearContour) return -1;
    double step = std::min({0.25 * ratio, kTwoPi - theta, max_step});
    for (;;) {
      complex d_next;
      const complex v_next = eval(theta + step, d_next);
      const double inc = std::arg(v_next / v);
      const double ratio_next = std::abs(v_next) / std::abs(d_next);
      if (std::abs(inc) < 0.5 * kPi && step <= 0.25 * ratio_next) {
        total += inc;
        theta += step;
        v = v_next;
        d = d_next;
        break;
      }
      step *= 0.5;
      if (radius * step < 0.25 * kNearContour) return -1;
    }
  }
  const double turns = total / kTwoPi;
  const double rounded = std::round(turns);
  if (std::abs(turns - rounded) > 1e-6) throw NumericalFailure("winding_number: phase tracking lost");
  return static_cast<int>(rounded);
}

ContourCount count_zeros_argument_principle(const SectionSample& sample, const Annulus& region) {
  ContourCount out;
  out.inner = region.inner();
  out.outer = region.outer();
  if (region.empty()) return out;
  static constexpr double kOffsets[] = {0.0, 1e-6, -1e-6, 2e-6};
  auto wind = [&](double radius, double& used) {
    for (double off : kOffsets) {
      const double r = radius + off;
      if (!(r > 0.0 && r < 1.0)) continue;
      const int w = winding_number(sample, r);
      if (w >= 0) {
        used = r;
        return w;
      }
      ++out.perturbations;
    }
    std::ostringstream os;
    os << "argument principle: a zero stays within " << kNearContour << " of |z| = " << radius
       << " after 3 perturbations";
    throw NumericalFailure(os.str());
  };
  out.winding_outer = wind(region.outer(), out.outer);
  out.winding_inner = wind(region.inner(), out.inner);
  out.count = out.winding_outer - out.winding_inner;
  return out;
}

double linear_statistic(const ZeroSet& zeros, const std::function<double(complex)>& f) {
  KahanSum s;
  for (const Zero& z : zeros.zeros) s.add(z.multiplicity * f(z.location));
  return s.value();
}

}  // namespace bergman
