#include "bergman/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <sstream>

#include <unsupported/Eigen/FFT>

#include "bergman/errors.hpp"

namespace bergman {

namespace {

constexpr std::uint64_t kTagEquidistribution = 0x45515549;
constexpr std::uint64_t kTagVariance = 0x56415249;
constexpr std::uint64_t kTagBootstrap = 0x424f4f54;
constexpr std::uint64_t kTagClt = 0x434c5421;
constexpr std::uint64_t kTagHoles = 0x484f4c45;
constexpr std::uint64_t kTagDeviation = 0x44455649;
constexpr std::uint64_t kTagDecay = 0x44454341;

double log_neg_log(double r) { return std::log(-std::log(r)); }

std::size_t next_pow2(std::size_t n) {
  std::size_t m = 1;
  while (m < n) m <<= 1;
  return m;
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

// |sum_l c_l^2 (r r')^l e^{i l alpha_k}| / sqrt(K(r) K(r')) at alpha_k = 2 pi k / M.
// Folding l mod M makes the samples exact.
class AngularProfile {
 public:
  explicit AngularProfile(const DiscSpace& space) : space_(space) {}

  const std::vector<double>& operator()(double r, double rp, std::size_t min_points = 256) {
    const double log_x = std::log(r) + std::log(rp);
    const auto range = space_.significant_range(log_x, 60.0);
    const double norm = 0.5 * (space_.log_series(2.0 * std::log(r)) + space_.log_series(2.0 * std::log(rp)));
    const std::size_t m = next_pow2(std::max(min_points, 8 * (range.last - range.first + 1)));
    in_.assign(m, complex{});
    const auto lc = space_.log_coeffs();
    for (std::size_t ell = range.first; ell <= range.last; ++ell)
      in_[ell % m] += std::exp(lc[ell - 1] + static_cast<double>(ell) * log_x - norm);
    fft_.fwd(out_, in_);
    values_.resize(m);
    for (std::size_t k = 0; k < m; ++k) values_[k] = std::min(1.0, std::abs(out_[k]));
    return values_;
  }

 private:
  const DiscSpace& space_;
  Eigen::FFT<double> fft_;
  std::vector<complex> in_;
  std::vector<complex> out_;
  std::vector<double> values_;
};

// Nodes in t = log(-log r) mapped back to r, with the Jacobian |dr/dt| = r e^t folded into the weight.
struct RadialNodes {
  std::vector<double> r;
  std::vector<double> w;
};

RadialNodes radial_nodes(double a, double b, std::size_t panels) {
  const QuadratureRule q = composite_gauss_legendre(log_neg_log(b), log_neg_log(a), panels);
  RadialNodes out;
  for (std::size_t i = 0; i < q.nodes.size(); ++i) {
    const double e = std::exp(q.nodes[i]);
    const double r = std::exp(-e);
    out.r.push_back(r);
    out.w.push_back(q.weights[i] * r * e);
  }
  return out;
}

double binomial_se(double f, long long n) { return n > 1 ? std::sqrt(f * (1.0 - f) / n) : 0.0; }

}  // namespace

// Test functions ---------------------------------------------------------------------

TestFunction::TestFunction(double a, double b, Profile f, Profile d1, Profile d2)
    : a_(a), b_(b), f_(std::move(f)), d1_(std::move(d1)), d2_(std::move(d2)) {
  if (!(a > 0.0 && a < b && b < 1.0)) throw InvalidParameter("test function support must satisfy 0 < a < b < 1");
}

TestFunction TestFunction::bump(double a, double b, double height) {
  const double w = b - a;
  auto u = [a, w](double r) { return (r - a) / w; };
  return TestFunction(
      a, b,
      [=](double r) {
        const double q = 4.0 * u(r) * (1.0 - u(r));
        return height * q * q * q * q;
      },
      [=](double r) {
        const double q = 4.0 * u(r) * (1.0 - u(r));
        const double dq = 4.0 * (1.0 - 2.0 * u(r));
        return height * 4.0 * q * q * q * dq / w;
      },
      [=](double r) {
        const double q = 4.0 * u(r) * (1.0 - u(r));
        const double dq = 4.0 * (1.0 - 2.0 * u(r));
        return height * (12.0 * q * q * dq * dq - 32.0 * q * q * q) / (w * w);
      });
}

TestFunction TestFunction::from_profile(double a, double b, Profile f, Profile d1, Profile d2) {
  return TestFunction(a, b, std::move(f), std::move(d1), std::move(d2));
}

double TestFunction::value(double r) const { return r > a_ && r < b_ ? f_(r) : 0.0; }
double TestFunction::d1(double r) const { return r > a_ && r < b_ ? d1_(r) : 0.0; }
double TestFunction::d2(double r) const { return r > a_ && r < b_ ? d2_(r) : 0.0; }
double TestFunction::laplacian(double r) const { return d2(r) + d1(r) / r; }

TestFunction TestFunction::scaled(double s) const {
  return TestFunction(
      a_, b_, [f = f_, s](double r) { return s * f(r); }, [f = d1_, s](double r) { return s * f(r); },
      [f = d2_, s](double r) { return s * f(r); });
}

double laplacian_ratio(const TestFunction& phi, complex z) {
  const double r = std::abs(z);
  if (!(r > 0.0 && r < 1.0)) throw DomainError("laplacian_ratio: point outside the punctured disc");
  const double l = 2.0 * std::log(r);
  return 0.5 * kPi * phi.laplacian(r) * r * r * l * l;
}

double linear_statistic(const ZeroSet& zeros, const TestFunction& phi) {
  return linear_statistic(zeros, [&](complex z) { return phi(z); });
}

// Bipotential ------------------------------------------------------------------------

namespace {

double li2_series(double x) {
  KahanSum s;
  double xp = 1.0;
  for (int j = 1; j < 10'000'000; ++j) {
    xp *= x;
    const double term = xp / (static_cast<double>(j) * j);
    s.add(term);
    if (term < 1e-18 * s.value()) break;
  }
  return s.value();
}

}  // namespace

double Gtilde_series(double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("Gtilde: t outside [0, 1]");
  if (t == 1.0) return 1.0 / 24.0;
  return li2_series(t * t) / (4.0 * kPi * kPi);
}

double Gtilde(double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("Gtilde: t outside [0, 1]");
  const double x = t * t;
  if (x <= 0.5) return li2_series(x) / (4.0 * kPi * kPi);
  if (x == 1.0) return 1.0 / 24.0;
  // Li2(x) = pi^2/6 - log(x) log(1-x) - Li2(1-x)
  const double li2 = kPi * kPi / 6.0 - std::log(x) * std::log1p(-x) - li2_series(1.0 - x);
  return li2 / (4.0 * kPi * kPi);
}

double Gtilde_integral(double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("Gtilde: t outside [0, 1]");
  auto f = [](double s) { return s == 0.0 ? -1.0 : std::log1p(-s) / s; };
  return -integrate(f, 0.0, t * t, 1e-15) / (4.0 * kPi * kPi);
}

VarianceResult variance_bipotential(const DiscSpace& space, const TestFunction& phi, const VarianceOptions& options) {
  kernel_function(space, phi.outer());  // throws on inadequate truncation

  auto evaluate_at = [&](std::size_t panels) {
    const RadialNodes nodes = radial_nodes(phi.inner(), phi.outer(), panels);
    const std::size_t n = nodes.r.size();
    std::vector<double> lap(n);
    for (std::size_t i = 0; i < n; ++i) lap[i] = phi.laplacian(nodes.r[i]) * nodes.r[i] * nodes.w[i];
    std::vector<double> row(n, 0.0);
    parallel_for(n, options.threads, [&](std::size_t i) {
      if (lap[i] == 0.0) return;
      AngularProfile profile(space);
      KahanSum s;
      for (std::size_t j = i; j < n; ++j) {
        if (lap[j] == 0.0) continue;
        const auto& nv = profile(nodes.r[i], nodes.r[j]);
        KahanSum a;
        for (double v : nv)
          if (v > 1e-10) a.add(Gtilde(v));
        const double angular = a.value() * kTwoPi / static_cast<double>(nv.size());
        s.add((j == i ? 1.0 : 2.0) * lap[j] * angular);
      }
      row[i] = lap[i] * s.value();
    });
    KahanSum total;
    for (double v : row) total.add(v);
    return 0.25 * kTwoPi * total.value();
  };

  VarianceResult out;
  std::size_t panels = std::max<std::size_t>(1, options.panels);
  double prev = evaluate_at(panels);
  for (;;) {
    const std::size_t next = 2 * panels;
    const double cur = evaluate_at(next);
    out.value = cur;
    out.panels = next;
    out.error_estimate = std::abs(cur - prev);
    if (out.error_estimate <= options.rel_tol * std::abs(cur) || out.error_estimate == 0.0) break;
    if (next >= options.max_panels) {
      out.converged = false;
      break;
    }
    panels = next;
    prev = cur;
  }
  out.value = std::max(out.value, 0.0);
  return out;
}

double laplacian_energy(const TestFunction& phi) {
  // int |L phi|^2 c_1 = (pi^2/2) int (Lap phi)^2 r^3 log^2(r^2) dr
  auto f = [&](double r) {
    const double l = 2.0 * std::log(r);
    const double lap = phi.laplacian(r);
    return lap * lap * r * r * r * l * l;
  };
  const double mid = 0.5 * (phi.inner() + phi.outer());
  return 0.5 * kPi * kPi * (integrate(f, phi.inner(), mid, 1e-13) + integrate(f, mid, phi.outer(), 1e-13));
}

double variance_leading_term(const TestFunction& phi, int p) {
  if (p < 2) throw InvalidParameter("variance_leading_term: p must be >= 2");
  return kZeta3 / (4.0 * kPi * kPi * p) * laplacian_energy(phi);
}

// Tests and summaries ----------------------------------------------------------------

double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf) {
  if (sample.empty()) throw InvalidParameter("ks_statistic: empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return d;
}

double ks_pvalue(double d, std::size_t n) {
  const double sn = std::sqrt(static_cast<double>(n));
  const double lambda = (sn + 0.12 + 0.11 / sn) * d;
  if (lambda <= 0.0) return 1.0;
  double q;
  if (lambda < 1.18) {
    // 1 - (sqrt(2 pi)/lambda) sum exp(-(2j-1)^2 pi^2 / (8 lambda^2))
    double s = 0.0;
    for (int j = 1; j <= 50; ++j) {
      const double k = 2.0 * j - 1.0;
      s += std::exp(-k * k * kPi * kPi / (8.0 * lambda * lambda));
    }
    q = 1.0 - std::sqrt(kTwoPi) / lambda * s;
  } else {
    double s = 0.0;
    for (int j = 1; j <= 100; ++j) s += (j % 2 == 1 ? 2.0 : -2.0) * std::exp(-2.0 * j * j * lambda * lambda);
    q = s;
  }
  return std::clamp(q, 0.0, 1.0);
}

Interval wilson_interval(std::size_t k, std::size_t n, double z) {
  if (n == 0) return {};
  const double nn = static_cast<double>(n);
  const double ph = k / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (ph + z2 / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(ph * (1.0 - ph) / nn + z2 / (4.0 * nn * nn)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

double sample_mean(std::span<const double> xs) {
  KahanSum s;
  for (double x : xs) s.add(x);
  return xs.empty() ? 0.0 : s.value() / static_cast<double>(xs.size());
}

double sample_variance(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double m = sample_mean(xs);
  KahanSum s;
  for (double x : xs) s.add((x - m) * (x - m));
  return s.value() / static_cast<double>(xs.size() - 1);
}

// Experiments ------------------------------------------------------------------------

const StatsRow* StatsReport::find(int p, const std::string& statistic) const {
  for (const StatsRow& r : rows)
    if (r.p == p && r.statistic == statistic) return &r;
  return nullptr;
}

SeedPath sample_path(std::uint64_t tag, int p, long long i, bool paired) {
  if (paired) return {tag, static_cast<std::uint64_t>(i)};
  return {tag, static_cast<std::uint64_t>(p), static_cast<std::uint64_t>(i)};
}

namespace {

int count_in(const SectionSample& s, const Annulus& region, CountMethod method) {
  if (method == CountMethod::companion) return find_zeros(s, region).count();
  return count_zeros_argument_principle(s, region).count;
}

std::shared_ptr<const DiscSpace> space_for(int p, double outer, double eps) {
  return std::make_shared<const DiscSpace>(p, truncation_length(p, outer, eps));
}

}  // namespace

std::vector<int> sample_counts(int p, const Annulus& region, const SamplingOptions& options, std::uint64_t tag) {
  const auto m = static_cast<std::size_t>(options.samples);
  std::vector<int> counts(m, 0);
  if (region.empty()) return counts;
  const auto space = space_for(p, region.outer(), options.truncation_eps);
  parallel_for(m, options.threads, [&](std::size_t i) {
    const SectionSample s = sample_section(space, options.seed, sample_path(tag, p, static_cast<long long>(i), options.paired));
    counts[i] = count_in(s, region, options.count_method);
  });
  return counts;
}

std::vector<double> sample_linear_statistics(int p, const TestFunction& phi, const SamplingOptions& options,
                                             std::uint64_t tag) {
  const auto m = static_cast<std::size_t>(options.samples);
  std::vector<double> ys(m, 0.0);
  const auto space = space_for(p, phi.outer(), options.truncation_eps);
  const Annulus support(phi.inner(), phi.outer());
  parallel_for(m, options.threads, [&](std::size_t i) {
    const SectionSample s = sample_section(space, options.seed, sample_path(tag, p, static_cast<long long>(i), options.paired));
    ys[i] = linear_statistic(find_zeros(s, support), phi);
  });
  return ys;
}

StatsReport equidistribution_experiment(std::span<const int> p_list, const Annulus& region,
                                        const SamplingOptions& options) {
  StatsReport rep;
  const double area = area_L(region);
  std::vector<double> devs;
  for (int p : p_list) {
    const std::vector<int> counts = sample_counts(p, region, options, kTagEquidistribution);
    std::vector<double> x(counts.begin(), counts.end());
    const double mean = sample_mean(x);
    const double se = std::sqrt(sample_variance(x) / static_cast<double>(x.size()));
    const auto space = space_for(p, region.empty() ? 0.5 : region.outer(), options.truncation_eps);
    const double expected = region.empty() ? 0.0 : expected_zero_measure(*space, region).value;
    const double dev = std::abs(mean / p - area);
    devs.push_back(dev);
    rep.rows.push_back({"equidistribution", p, "count", mean, se, expected, std::abs(mean - expected), options.samples, options.seed});
    rep.rows.push_back({"equidistribution", p, "count_over_p", mean / p, se / p, area, dev, options.samples, options.seed});
    rep.rows.push_back({"equidistribution", p, "expected_over_p", expected / p, 0.0, area, std::abs(expected / p - area), options.samples, options.seed});
    const bool ok = dev <= 3.0 * se / p + 0.05;
    const bool expected_ok = std::abs(mean - expected) <= 3.0 * se;
    rep.checks.push_back({"expected_measure_p" + std::to_string(p), expected_ok,
                          "|mean - expected| = " + fmt(std::abs(mean - expected)) + " vs 3 SE = " + fmt(3.0 * se)});
    rep.checks.push_back({"equidistribution_p" + std::to_string(p), ok,
                          "|mean/p - area| = " + fmt(dev) + " vs 3 SE + 0.05 = " + fmt(3.0 * se / p + 0.05)});
  }
  if (devs.size() >= 2) {
    const bool ok = devs.back() < devs.front();
    rep.checks.push_back({"equidistribution_deviation_decreasing", ok,
                          "deviation " + fmt(devs.front()) + " at p=" + std::to_string(p_list.front()) + ", " +
                              fmt(devs.back()) + " at p=" + std::to_string(p_list.back())});
  }
  return rep;
}

StatsReport variance_experiment(std::span<const int> p_list, const TestFunction& phi, const SamplingOptions& options,
                                const VarianceExperimentOptions& var_options) {
  StatsReport rep;
  const double energy = laplacian_energy(phi);
  const double lead_scaled = kZeta3 / (4.0 * kPi * kPi) * energy;
  std::vector<double> gaps;
  for (int p : p_list) {
    const auto space = space_for(p, phi.outer(), options.truncation_eps);
    const VarianceResult bip = variance_bipotential(*space, phi, var_options.quadrature);
    const double gap = std::abs(p * bip.value - lead_scaled);
    gaps.push_back(gap);
    rep.rows.push_back({"variance", p, "var_bipotential", bip.value, bip.error_estimate, lead_scaled / p,
                        std::abs(bip.value - lead_scaled / p), 0, options.seed});
    rep.rows.push_back({"variance", p, "p_var_bipotential", p * bip.value, p * bip.error_estimate, lead_scaled, gap, 0,
                        options.seed});
    if (!bip.converged)
      rep.checks.push_back({"variance_quadrature_p" + std::to_string(p), false,
                            "step-halving error " + fmt(bip.error_estimate) + " above tolerance"});
    const auto& mc = var_options.mc_p_list;
    if (options.samples < 2 || (!mc.empty() && std::find(mc.begin(), mc.end(), p) == mc.end())) continue;

    const std::vector<double> ys = sample_linear_statistics(p, phi, options, kTagVariance);
    const double var = sample_variance(ys);
    std::vector<double> boot(var_options.bootstrap);
    const std::size_t m = ys.size();
    parallel_for(boot.size(), options.threads, [&](std::size_t b) {
      CounterStream stream(options.seed, {kTagBootstrap, static_cast<std::uint64_t>(p), b});
      std::vector<double> re(m);
      for (double& y : re) y = ys[std::min(m - 1, static_cast<std::size_t>(stream.uniform() * m))];
      boot[b] = sample_variance(re);
    });
    const double se = std::sqrt(sample_variance(boot));
    rep.rows.push_back({"variance", p, "var_mc", var, se, bip.value, std::abs(var - bip.value), options.samples, options.seed});
    const double allowed = std::max(0.15 * bip.value, 3.0 * se);
    rep.checks.push_back({"variance_mc_vs_bipotential_p" + std::to_string(p), std::abs(var - bip.value) <= allowed,
                          "|" + fmt(var) + " - " + fmt(bip.value) + "| vs " + fmt(allowed)});
  }
  if (gaps.size() >= 2)
    rep.checks.push_back({"variance_leading_gap_decreasing", gaps.back() < gaps.front(),
                          "|p Var - lead| " + fmt(gaps.front()) + " -> " + fmt(gaps.back())});
  return rep;
}

double sodin_tsirelson_proxy(const DiscSpace& space, double a, double b, int radial_points) {
  kernel_function(space, b);
  const RadialNodes nodes = radial_nodes(a, b, 16);
  AngularProfile profile(space);
  double best = 0.0;
  for (int k = 0; k < radial_points; ++k) {
    const double r = a + (b - a) * (k + 0.5) / radial_points;
    KahanSum s;
    for (std::size_t j = 0; j < nodes.r.size(); ++j) {
      const auto& nv = profile(r, nodes.r[j]);
      double ang = 0.0;
      for (double v : nv) ang += v;
      ang *= kTwoPi / static_cast<double>(nv.size());
      const double rp = nodes.r[j];
      const double l = 2.0 * std::log(rp);
      s.add(nodes.w[j] * ang / (kPi * rp * l * l));  // c_1 = dA / (pi r^2 log^2 r^2)
    }
    best = std::max(best, s.value());
  }
  return best;
}

CltResult clt_experiment(int p, const TestFunction& phi, const SamplingOptions& options, std::span<const int> proxy_p_list) {
  CltResult out;
  StatsReport& rep = out.report;
  const std::vector<double> ys = sample_linear_statistics(p, phi, options, kTagClt);
  const double mean = sample_mean(ys);
  const double var = sample_variance(ys);
  if (!(var > 0.0))
    throw NumericalFailure("clt: degenerate variance (all statistics equal); widen the support or raise p");
  const double sd = std::sqrt(var);
  out.standardized.resize(ys.size());
  for (std::size_t i = 0; i < ys.size(); ++i) out.standardized[i] = (ys[i] - mean) / sd;
  const double d = ks_statistic(out.standardized, [](double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); });
  const double pv = ks_pvalue(d, ys.size());
  rep.rows.push_back({"clt", p, "y_mean", mean, sd / std::sqrt(static_cast<double>(ys.size())), std::nan(""), std::nan(""), options.samples, options.seed});
  rep.rows.push_back({"clt", p, "y_variance", var, 0.0, std::nan(""), std::nan(""), options.samples, options.seed});
  rep.rows.push_back({"clt", p, "ks_distance", d, 0.0, 0.0, d, options.samples, options.seed});
  rep.rows.push_back({"clt", p, "ks_pvalue", pv, 0.0, std::nan(""), std::nan(""), options.samples, options.seed});
  rep.checks.push_back({"clt_ks_p" + std::to_string(p), pv >= 0.01, "KS p-value " + fmt(pv) + " (level 0.01)"});

  std::vector<double> proxies;
  for (int q : proxy_p_list) {
    const auto space = space_for(q, phi.outer(), 1e-14);
    const double v = sodin_tsirelson_proxy(*space, phi.inner(), phi.outer());
    proxies.push_back(v);
    rep.rows.push_back({"clt", q, "st_proxy", v, 0.0, 0.0, v, 0, options.seed});
  }
  if (proxies.size() >= 2)
    rep.checks.push_back({"clt_st_proxy_decreasing", proxies.back() < proxies.front(),
                          "proxy " + fmt(proxies.front()) + " -> " + fmt(proxies.back())});
  return out;
}

StatsReport hole_probability_experiment(std::span<const int> p_list, const Annulus& region,
                                        const SamplingOptions& options) {
  StatsReport rep;
  std::vector<double> estimates;
  std::vector<Interval> intervals;
  std::vector<double> xs;
  std::vector<double> ys;
  for (int p : p_list) {
    const std::vector<int> counts = sample_counts(p, region, options, kTagHoles);
    const auto holes = static_cast<std::size_t>(std::count(counts.begin(), counts.end(), 0));
    const std::size_t m = counts.size();
    const Interval ci = wilson_interval(holes, m);
    const double ph = m ? static_cast<double>(holes) / m : 0.0;
    estimates.push_back(ph);
    intervals.push_back(ci);
    if (holes == 0) {
      // One-sided 95% bound: (1 - P)^M >= 0.05.
      const double bound = 1.0 - std::pow(0.05, 1.0 / static_cast<double>(m));
      rep.rows.push_back({"holes", p, "hole_probability_upper_bound", bound, 0.0, std::nan(""), std::nan(""), options.samples, options.seed});
    } else {
      rep.rows.push_back({"holes", p, "hole_probability", ph, binomial_se(ph, static_cast<long long>(m)), std::nan(""), std::nan(""), options.samples, options.seed});
      xs.push_back(static_cast<double>(p) * p);
      ys.push_back(-std::log(ph));
    }
    rep.rows.push_back({"holes", p, "wilson_lower", ci.lower, 0.0, std::nan(""), std::nan(""), options.samples, options.seed});
    rep.rows.push_back({"holes", p, "wilson_upper", ci.upper, 0.0, std::nan(""), std::nan(""), options.samples, options.seed});
  }
  if (xs.size() >= 2) {
    const double mx = sample_mean(xs);
    const double my = sample_mean(ys);
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxy += (xs[i] - mx) * (ys[i] - my);
      sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    rep.rows.push_back({"holes", 0, "neg_log_hole_vs_p2_slope", sxy / sxx, 0.0, std::nan(""), std::nan(""), options.samples, options.seed});
  }
  if (estimates.size() >= 2) {
    bool decreasing = true;
    for (std::size_t i = 1; i < estimates.size(); ++i) decreasing = decreasing && estimates[i] < estimates[i - 1];
    rep.checks.push_back({"holes_strictly_decreasing", decreasing, "estimates " + [&] {
                            std::string s;
                            for (double e : estimates) s += fmt(e) + " ";
                            return s;
                          }()});
    const bool separated = intervals.back().upper < intervals.front().lower;
    rep.checks.push_back({"holes_wilson_separated", separated,
                          "first [" + fmt(intervals.front().lower) + ", " + fmt(intervals.front().upper) + "], last [" +
                              fmt(intervals.back().lower) + ", " + fmt(intervals.back().upper) + "]"});
  }
  return rep;
}

double log_sup_norm(const SectionSample& sample, const Annulus& region) {
  const DiscSpace& space = *sample.space;
  const std::size_t L = space.length();
  const int p = space.p();
  const auto lc = space.log_coeffs();
  const std::size_t m = next_pow2(std::max<std::size_t>(256, 4 * L));
  Eigen::FFT<double> fft;
  std::vector<complex> in(m);
  std::vector<complex> out;
  constexpr int kRadii = 24;
  double best = kNegInf;
  double best_r = region.inner();
  double best_t = 0.0;
  for (int k = 0; k < kRadii; ++k) {
    const double r = region.empty() ? region.inner()
                                    : region.inner() + (region.outer() - region.inner()) * k / (kRadii - 1.0);
    const double lr = std::log(r);
    double top = kNegInf;
    for (std::size_t ell = 1; ell <= L; ++ell) top = std::max(top, 0.5 * lc[ell - 1] + ell * lr);
    std::fill(in.begin(), in.end(), complex{});
    for (std::size_t ell = 1; ell <= L; ++ell) {
      const double t = 0.5 * lc[ell - 1] + ell * lr - top;
      if (t > -745.0) in[ell % m] += sample.eta[ell - 1] * std::exp(t);
    }
    fft.inv(out, in);  // sum_l a_l e^{+i l theta_j} / m
    const double shift = top + std::log(static_cast<double>(m)) + 0.5 * p * std::log(-2.0 * lr);
    for (std::size_t j = 0; j < m; ++j) {
      const double v = std::log(std::abs(out[j])) + shift;
      if (v > best) {
        best = v;
        best_r = r;
        best_t = kTwoPi * j / m;
      }
    }
    if (region.empty()) break;
  }
  // Compass refinement in (r, theta).
  auto f = [&](double r, double t) { return evaluate(sample, std::polar(r, t)).log_modulus; };
  double dr = region.empty() ? 0.0 : (region.outer() - region.inner()) / (kRadii - 1.0);
  double dt = kTwoPi / m;
  for (int it = 0; it < 40; ++it) {
    bool moved = false;
    constexpr int kSteps[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
    for (const auto& [sr, st] : kSteps) {
      const double r = std::clamp(best_r + sr * dr, region.inner(), region.outer());
      const double t = best_t + st * dt;
      const double v = f(r, t);
      if (v > best) {
        best = v;
        best_r = r;
        best_t = t;
        moved = true;
      }
    }
    if (!moved) {
      dr *= 0.5;
      dt *= 0.5;
    }
  }
  return best;
}

StatsReport deviation_experiment(std::span<const int> p_list, const Annulus& region, double delta, double sup_delta,
                                 const SamplingOptions& options) {
  if (!(delta > 0.0) || !(sup_delta > 0.0)) throw InvalidParameter("deviation: thresholds must be positive");
  StatsReport rep;
  const double area = area_L(region);
  std::vector<double> freqs;
  for (int p : p_list) {
    const auto m = static_cast<std::size_t>(options.samples);
    std::vector<char> count_hit(m, 0);
    std::vector<char> sup_hit(m, 0);
    if (!region.empty()) {
      const auto space = space_for(p, region.outer(), options.truncation_eps);
      parallel_for(m, options.threads, [&](std::size_t i) {
        const SectionSample s =
            sample_section(space, options.seed, sample_path(kTagDeviation, p, static_cast<long long>(i), options.paired));
        const int n = count_in(s, region, options.count_method);
        count_hit[i] = std::abs(static_cast<double>(n) / p - area) > delta;
        sup_hit[i] = std::abs(log_sup_norm(s, region)) / p >= sup_delta;
      });
    }
    const double fc = m ? static_cast<double>(std::count(count_hit.begin(), count_hit.end(), 1)) / m : 0.0;
    const double fs = m ? static_cast<double>(std::count(sup_hit.begin(), sup_hit.end(), 1)) / m : 0.0;
    freqs.push_back(fc);
    rep.rows.push_back({"deviation", p, "count_deviation_frequency", fc, binomial_se(fc, options.samples), std::nan(""), std::nan(""), options.samples, options.seed});
    rep.rows.push_back({"deviation", p, "sup_deviation_frequency", fs, binomial_se(fs, options.samples), std::nan(""), std::nan(""), options.samples, options.seed});
    rep.checks.push_back({"sup_deviation_rare_p" + std::to_string(p), fs < 1e-2, "frequency " + fmt(fs) + " (bound 0.01)"});
  }
  if (freqs.size() >= 2)
    rep.checks.push_back({"deviation_frequency_decreasing", freqs.back() < freqs.front(),
                          "frequency " + fmt(freqs.front()) + " -> " + fmt(freqs.back())});
  return rep;
}

StatsReport kernel_decay_experiment(int p, const DecayOptions& options) {
  const double scale = std::sqrt(std::log(static_cast<double>(p)) / p);
  const double b_near = std::sqrt(12.0 * options.k_near) * scale;
  const double b_far = std::sqrt(12.0 * options.k_far) * scale;
  const double d_max = 1.5 * b_far;

  struct Pair {
    complex z;
    complex w;
    double d;
  };
  std::vector<Pair> pairs(options.pairs);
  double r_max = 0.0;
  for (int i = 0; i < options.pairs; ++i) {
    CounterStream s(options.seed, {kTagDecay, static_cast<std::uint64_t>(p), static_cast<std::uint64_t>(i)});
    const double rz = options.inner + (options.outer - options.inner) * s.uniform();
    const double tz = kTwoPi * s.uniform();
    const double d = d_max * s.uniform();
    const double beta = kTwoPi * s.uniform();
    // Local coordinates: d^2 ~ (du^2 + (dtheta / |log r|)^2) / 2, u = log(-log r).
    const double lz = -std::log(rz);
    const double u = std::sqrt(2.0) * d * std::cos(beta);
    const double dt = std::sqrt(2.0) * d * std::sin(beta) * lz;
    const double rw = std::exp(-lz * std::exp(u));
    const complex z = std::polar(rz, tz);
    const complex w = std::polar(rw, tz + dt);
    pairs[i] = {z, w, poincare_distance(z, w)};
    r_max = std::max({r_max, rz, rw});
  }
  const DiscSpace space = DiscSpace::for_radius(p, r_max);
  double sxy = 0.0;
  double sxx = 0.0;
  int near = 0;
  int far = 0;
  double far_max = 0.0;
  for (const Pair& q : pairs) {
    const NormalizedKernel nk = normalized_kernel(space, q.z, q.w);
    if (q.d <= b_near && !nk.underflow && q.d > 0.0) {
      const double x = p * q.d * q.d / 4.0;
      const double y = -std::log(nk.value);
      sxy += x * y;
      sxx += x * x;
      ++near;
    }
    if (q.d >= b_far) {
      far_max = std::max(far_max, nk.value);
      ++far;
    }
  }
  StatsReport rep;
  const double slope = sxx > 0.0 ? sxy / sxx : std::nan("");
  rep.rows.push_back({"kernel-decay", p, "decay_slope", slope, 0.0, 1.0, std::abs(slope - 1.0), near, options.seed});
  rep.rows.push_back({"kernel-decay", p, "max_far_kernel", far_max, 0.0, 0.0, far_max, far, options.seed});
  rep.checks.push_back({"kernel_decay_slope", slope >= 0.9 && slope <= 1.1, "slope " + fmt(slope) + " (window [0.9, 1.1])"});
  rep.checks.push_back({"kernel_decay_far", far > 0 && far_max <= options.far_bound,
                        "max N beyond threshold " + fmt(far_max) + " over " + std::to_string(far) + " pairs"});
  return rep;
}

}  // namespace bergman
