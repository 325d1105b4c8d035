#include "bergman/disc_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bergman/errors.hpp"

namespace bergman {

namespace {

constexpr double kSignificance = 60.0;  // terms below max - 60 (e^-60 ~ 1e-26) are dropped

void require_radius(double r, const char* what) {
  if (!(r > 0.0 && r < 1.0)) {
    std::ostringstream os;
    os << what << ": radius " << r << " outside (0, 1)";
    throw DomainError(os.str());
  }
}

double log_add(double a, double b) {
  if (a < b) std::swap(a, b);
  if (!(b > kNegInf)) return a;
  return a + std::log1p(std::exp(b - a));
}

}  // namespace

Annulus::Annulus(double inner, double outer) : a_(inner), b_(outer) {
  if (!(inner > 0.0 && outer < 1.0 && inner <= outer)) {
    std::ostringstream os;
    os << "annulus requires 0 < a <= b < 1, got a=" << inner << ", b=" << outer;
    throw InvalidParameter(os.str());
  }
}

double log_coefficient(int p, std::size_t ell) {
  return (p - 1) * std::log(static_cast<double>(ell)) - std::log(kTwoPi) - std::lgamma(p - 1.0);
}

std::size_t required_length(int p, double r, double rel_tol) {
  require_radius(r, "required_length");
  if (p < 2) throw InvalidParameter("required_length: p must be >= 2");
  if (!(rel_tol > 0.0)) throw InvalidParameter("required_length: tolerance must be positive");
  const double log_x = 2.0 * std::log(r);
  const double peak = (p - 1) / -log_x;
  if (peak > 5e7) throw InvalidParameter("required_length: radius too close to 1");
  const double log_tol = std::log(rel_tol);

  // Terms up to well past the peak, then exact suffix sums.
  std::vector<double> e;
  double m = kNegInf;
  for (std::size_t ell = 1;; ++ell) {
    const double v = log_coefficient(p, ell) + static_cast<double>(ell) * log_x;
    e.push_back(v);
    m = std::max(m, v);
    if (static_cast<double>(ell) > peak + 1.0 && v < m + log_tol - kSignificance) break;
  }
  const std::size_t n = e.size();
  std::vector<double> suffix(n + 1, kNegInf);
  for (std::size_t i = n; i-- > 0;) suffix[i] = log_add(suffix[i + 1], e[i]);
  double prefix = kNegInf;
  for (std::size_t len = 1; len <= n; ++len) {
    prefix = log_add(prefix, e[len - 1]);
    if (suffix[len] <= log_tol + prefix) return len;
  }
  return n;
}

DiscSpace::DiscSpace(int p, std::size_t length) : p_(p) {
  if (p < 2) throw InvalidParameter("DiscSpace: p must be >= 2 (basis needs (p-2)!)");
  if (length < 1) throw InvalidParameter("DiscSpace: truncation length must be >= 1");
  log_norm_ = std::log(kTwoPi) + std::lgamma(p - 1.0);
  log_coeffs_.resize(length);
  for (std::size_t ell = 1; ell <= length; ++ell)
    log_coeffs_[ell - 1] = (p - 1) * std::log(static_cast<double>(ell)) - log_norm_;
}

DiscSpace DiscSpace::for_radius(int p, double max_radius, double rel_tol) {
  if (p < 2) throw InvalidParameter("DiscSpace: p must be >= 2 (basis needs (p-2)!)");
  return DiscSpace(p, required_length(p, max_radius, rel_tol));
}

DiscSpace make_disc_space(int p, std::size_t length) { return DiscSpace(p, length); }

DiscSpace::TermRange DiscSpace::significant_range(double log_x, double cutoff) const {
  // l -> log c_l^2 + l log x is concave, so terms decrease monotonically away from the peak.
  const auto L = static_cast<long long>(length());
  const double peak = log_x < 0.0 ? (p_ - 1) / -log_x : static_cast<double>(L);
  long long start = std::clamp(static_cast<long long>(std::llround(peak)), 1LL, L);
  auto term = [&](long long ell) { return log_coeffs_[ell - 1] + static_cast<double>(ell) * log_x; };
  while (start < L && term(start + 1) > term(start)) ++start;
  while (start > 1 && term(start - 1) > term(start)) --start;
  const double m = term(start);
  long long lo = start;
  while (lo > 1 && term(lo - 1) >= m - cutoff) --lo;
  long long hi = start;
  while (hi < L && term(hi + 1) >= m - cutoff) ++hi;
  return {static_cast<std::size_t>(lo), static_cast<std::size_t>(hi), m};
}

double DiscSpace::log_series(double log_x) const {
  const TermRange range = significant_range(log_x, kSignificance);
  double s = 0.0;
  for (std::size_t ell = range.first; ell <= range.last; ++ell)
    s += std::exp(log_coeffs_[ell - 1] + static_cast<double>(ell) * log_x - range.peak_log);
  return range.peak_log + std::log(s);
}

double DiscSpace::mean_index(double log_x) const {
  const TermRange range = significant_range(log_x, kSignificance);
  double s = 0.0;
  double s1 = 0.0;
  for (std::size_t ell = range.first; ell <= range.last; ++ell) {
    const double w = std::exp(log_coeffs_[ell - 1] + static_cast<double>(ell) * log_x - range.peak_log);
    s += w;
    s1 += static_cast<double>(ell) * w;
  }
  return s1 / s;
}

double DiscSpace::log_tail(double log_x) const {
  double acc = kNegInf;
  const double peak = (p_ - 1) / -log_x;
  for (std::size_t ell = length() + 1;; ++ell) {
    const double v = log_coefficient(p_, ell) + static_cast<double>(ell) * log_x;
    acc = log_add(acc, v);
    if (static_cast<double>(ell) > peak && v < acc - kSignificance) break;
    if (ell > length() + 50'000'000) break;
  }
  return acc;
}

double DiscSpace::log_tail_first_moment(double log_x) const {
  double acc = kNegInf;
  const double peak = p_ / -log_x;
  for (std::size_t ell = length() + 1;; ++ell) {
    const double v = std::log(static_cast<double>(ell)) + log_coefficient(p_, ell) +
                     static_cast<double>(ell) * log_x;
    acc = log_add(acc, v);
    if (static_cast<double>(ell) > peak && v < acc - kSignificance) break;
    if (ell > length() + 50'000'000) break;
  }
  return acc;
}

double DiscSpace::relative_tail(double r) const {
  require_radius(r, "relative_tail");
  const double log_x = 2.0 * std::log(r);
  return std::exp(log_tail(log_x) - log_series(log_x));
}

double DiscSpace::max_radius(double rel_tol) const {
  double lo = 1e-12;
  double hi = 1.0 - 1e-12;
  if (relative_tail(hi) <= rel_tol) return hi;
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (relative_tail(mid) <= rel_tol)
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

namespace {

// Cheap sufficient test: after l = L+1 the term ratio only decreases, so the tail is
// bounded by a geometric series. Falls back to the exact tail when the bound is loose.
void require_adequate_truncation(const DiscSpace& space, double log_r, double rel_tol) {
  const double log_x = 2.0 * log_r;
  const int p = space.p();
  const auto L = static_cast<double>(space.length());
  const double first = log_coefficient(p, space.length() + 1) + (L + 1.0) * log_x;
  const double log_ratio = (p - 1) * std::log((L + 2.0) / (L + 1.0)) + log_x;
  const double head = space.log_series(log_x);
  if (log_ratio < 0.0 && first - std::log(-std::expm1(log_ratio)) <= head + std::log(rel_tol))
    return;
  if (space.log_tail(log_x) - head <= std::log(rel_tol)) return;
  const double r = std::exp(log_r);
  const std::size_t need = required_length(p, r, rel_tol);
  std::ostringstream os;
  os << "truncation L=" << space.length() << " inadequate at r=" << r << " for p=" << p
     << "; need L >= " << need;
  throw TruncationError(os.str(), need);
}

}  // namespace

double log_kernel_function_at_log_radius(const DiscSpace& space, double log_r) {
  if (!(log_r < 0.0) || !std::isfinite(log_r))
    throw DomainError("kernel_function: radius outside (0, 1)");
  require_adequate_truncation(space, log_r, kKernelTailTolerance);
  const double log_x = 2.0 * log_r;
  return space.p() * std::log(-log_x) + space.log_series(log_x);
}

double kernel_function(const DiscSpace& space, double r) {
  require_radius(r, "kernel_function");
  return std::exp(log_kernel_function_at_log_radius(space, std::log(r)));
}

double plateau_deviation(int p, double r) {
  if (p < 3) throw InvalidParameter("plateau_deviation: requires p >= 3");
  require_radius(r, "plateau_deviation");
  const double s = -2.0 * std::log(r);
  KahanSum acc;
  for (long long k = 1; k < 10'000'000; ++k) {
    const double x = kTwoPi * static_cast<double>(k) / s;
    const double log_mag = -0.5 * p * std::log1p(x * x);
    const double mag = std::exp(log_mag);
    acc.add(2.0 * mag * std::cos(p * std::atan(x)));
    const double bound = mag * (1.0 + static_cast<double>(k) / (p - 1));
    if (bound <= 1e-17 * std::abs(acc.value()) || log_mag < -700.0) break;
  }
  return acc.value();
}

KernelValue kernel(const DiscSpace& space, complex z, complex w) {
  const double rz = std::abs(z);
  const double rw = std::abs(w);
  require_radius(rz, "kernel");
  require_radius(rw, "kernel");
  require_adequate_truncation(space, std::log(std::max(rz, rw)), kKernelTailTolerance);
  const double log_x = std::log(rz) + std::log(rw);
  const double theta = std::arg(z) - std::arg(w);
  const auto range = space.significant_range(log_x);
  const auto lc = space.log_coeffs();
  complex s{};
  for (std::size_t ell = range.first; ell <= range.last; ++ell) {
    const double v = lc[ell - 1] + static_cast<double>(ell) * log_x - range.peak_log;
    s += std::polar(std::exp(v), std::remainder(static_cast<double>(ell) * theta, kTwoPi));
  }
  const double peak = range.peak_log;
  KernelValue out;
  const double p = space.p();
  const double mod = std::abs(s);
  if (mod > 0.0) {
    out.log_modulus = 0.5 * p * (std::log(-2.0 * std::log(rz)) + std::log(-2.0 * std::log(rw))) +
                      peak + std::log(mod);
    out.phase = std::arg(s);
  }
  return out;
}

SupResult sup_kernel(const DiscSpace& space) {
  if (space.p() < 3) throw InvalidParameter("sup_kernel: requires p >= 3");
  const double r_max = space.max_radius(kKernelTailTolerance);
  const double t_lo = std::log(-std::log(r_max)) + 1e-9;
  const double t_hi = std::log(2.0 * space.p()) + 1.0;
  auto f = [&](double t) { return log_kernel_function_at_log_radius(space, -std::exp(t)); };

  constexpr int kGrid = 512;
  const double h = (t_hi - t_lo) / (kGrid - 1);
  int best = 0;
  double best_val = kNegInf;
  for (int i = 0; i < kGrid; ++i) {
    const double v = f(t_lo + i * h);
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  double a = t_lo + std::max(best - 1, 0) * h;
  double b = t_lo + std::min(best + 1, kGrid - 1) * h;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a);
  double d = a + g * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > 1e-10) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  double t_star = 0.5 * (a + b);
  double v_star = f(t_star);
  if (best_val > v_star) {
    t_star = t_lo + best * h;
    v_star = best_val;
  }
  SupResult out;
  out.t_star = t_star;
  out.log_r_star = -std::exp(t_star);
  out.r_star = std::exp(out.log_r_star);
  out.value = std::exp(v_star);
  return out;
}

NormalizedKernel normalized_kernel(const DiscSpace& space, complex z, complex w) {
  const KernelValue k = kernel(space, z, w);
  NormalizedKernel out;
  if (k.underflow()) {
    out.underflow = true;
    return out;
  }
  const double log_n = k.log_modulus - 0.5 * (log_kernel_function_at_log_radius(space, std::log(std::abs(z))) +
                                              log_kernel_function_at_log_radius(space, std::log(std::abs(w))));
  out.value = std::exp(log_n);
  out.underflow = out.value == 0.0;
  return out;
}

double poincare_distance(complex z, complex w) {
  const double rz = std::abs(z);
  const double rw = std::abs(w);
  require_radius(rz, "poincare_distance");
  require_radius(rw, "poincare_distance");
  const double yz = -std::log(rz) / kTwoPi;
  const double yw = -std::log(rw) / kTwoPi;
  double dx = (std::arg(z) - std::arg(w)) / kTwoPi;
  dx -= std::round(dx);  // nearest deck translate
  const double dy = yz - yw;
  const double chord = std::sqrt(dx * dx + dy * dy);
  // cosh d_H = 1 + |dtau|^2/(2 y y')  <=>  sinh(d_H/2) = |dtau| / (2 sqrt(y y'))
  const double d_h = 2.0 * std::asinh(chord / (2.0 * std::sqrt(yz * yw)));
  return d_h / std::sqrt(2.0);
}

double area_L(const Annulus& region) {
  if (region.empty()) return 0.0;
  return 0.5 * (1.0 / -std::log(region.outer()) - 1.0 / -std::log(region.inner()));
}

double omega_area(const Annulus& region) { return kTwoPi * area_L(region); }

double expected_zeros_in_disc(const DiscSpace& space, double r) {
  require_radius(r, "expected_zeros_in_disc");
  return space.mean_index(2.0 * std::log(r)) - 1.0;
}

ExpectedCount expected_zero_measure(const DiscSpace& space, const Annulus& region) {
  ExpectedCount out;
  if (region.empty()) return out;
  const double log_xb = 2.0 * std::log(region.outer());
  out.value = space.mean_index(log_xb) - space.mean_index(2.0 * std::log(region.inner()));
  out.tail_effect = std::exp(space.log_tail_first_moment(log_xb) - space.log_series(log_xb));
  out.truncation_adequate = out.tail_effect <= 1e-10;
  return out;
}

double log_bergman_l1(const DiscSpace& space, const Annulus& region) {
  if (region.empty()) return 0.0;
  require_adequate_truncation(space, std::log(region.outer()), kKernelTailTolerance);
  // u = -1/log r turns omega on annuli into pi du.
  const double ua = -1.0 / std::log(region.inner());
  const double ub = -1.0 / std::log(region.outer());
  auto f = [&](double u) {
    return std::abs(log_kernel_function_at_log_radius(space, -1.0 / u));
  };
  return kPi * integrate(f, ua, ub, 1e-12);
}

}  // namespace bergman
