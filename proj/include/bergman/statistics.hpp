#pragma once

// Monte Carlo experiments on zeros of Gaussian sections of the disc model, with the
// closed-form or quadrature predictions they are compared against.

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "bergman/disc_kernel.hpp"
#include "bergman/sections.hpp"

namespace bergman {

/// Radial test function supported in [a, b], C^3 with phi, phi', phi'' vanishing at both ends.
class TestFunction {
 public:
  using Profile = std::function<double(double)>;

  /// h * (4u(1-u))^4, u = (r-a)/(b-a).
  static TestFunction bump(double a, double b, double height = 1.0);
  /// Profile with its first two derivatives; evaluated only inside [a, b].
  static TestFunction from_profile(double a, double b, Profile f, Profile d1, Profile d2);

  double inner() const { return a_; }
  double outer() const { return b_; }
  double value(double r) const;
  double d1(double r) const;
  double d2(double r) const;
  double operator()(complex z) const { return value(std::abs(z)); }
  /// Euclidean Laplacian phi'' + phi'/r.
  double laplacian(double r) const;
  TestFunction scaled(double s) const;

 private:
  TestFunction(double a, double b, Profile f, Profile d1, Profile d2);
  double a_;
  double b_;
  Profile f_;
  Profile d1_;
  Profile d2_;
};

/// Density of i ddbar phi with respect to c_1 = omega / 2pi: (pi/2) (phi'' + phi'/r) r^2 log^2(r^2).
double laplacian_ratio(const TestFunction& phi, complex z);

/// sum over zeros of phi(zero).
double linear_statistic(const ZeroSet& zeros, const TestFunction& phi);

inline constexpr double kZeta3 = 1.202056903159594;

/// (1/4pi^2) sum_j t^{2j} / j^2 = Li2(t^2) / 4pi^2.
double Gtilde(double t);
/// Plain compensated series.
double Gtilde_series(double t);
/// -(1/4pi^2) int_0^{t^2} log(1-s)/s ds by adaptive quadrature.
double Gtilde_integral(double t);

struct VarianceOptions {
  std::size_t panels = 8;        // initial Gauss-Legendre panels in t = log(-log r)
  std::size_t max_panels = 64;
  double rel_tol = 1e-4;         // step-halving target
  int threads = 0;
};

struct VarianceResult {
  double value = 0.0;
  double error_estimate = 0.0;
  std::size_t panels = 0;
  bool converged = true;
};

/// Var[Y_p(phi)] = (1/4) int int Lap phi(z) Lap phi(w) Gtilde(N_p(z,w)) dA dA, reduced to (r, r', angle).
VarianceResult variance_bipotential(const DiscSpace& space, const TestFunction& phi,
                                    const VarianceOptions& options = {});

/// int |L phi|^2 c_1.
double laplacian_energy(const TestFunction& phi);
/// zeta(3) / (4 pi^2 p) * int |L phi|^2 c_1.
double variance_leading_term(const TestFunction& phi, int p);

/// One-sample Kolmogorov-Smirnov distance of `sample` against `cdf`.
double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf);
/// Asymptotic Kolmogorov tail with Stephens' finite-n correction.
double ks_pvalue(double d, std::size_t n);

struct Interval {
  double lower = 0.0;
  double upper = 1.0;
};
/// Wilson score interval for k successes in n trials at normal quantile z.
Interval wilson_interval(std::size_t k, std::size_t n, double z = 1.959963984540054);

/// Sample variance with divisor n - 1.
double sample_variance(std::span<const double> xs);
double sample_mean(std::span<const double> xs);

// Experiments ------------------------------------------------------------------------

enum class CountMethod { companion, argument_principle };

struct StatsRow {
  std::string experiment;
  int p = 0;
  std::string statistic;
  double estimate = 0.0;
  double stderr_ = 0.0;
  double prediction = std::numeric_limits<double>::quiet_NaN();
  double deviation = std::numeric_limits<double>::quiet_NaN();
  long long n_samples = 0;
  std::uint64_t seed = 0;
};

struct CheckResult {
  std::string name;
  bool passed = true;
  std::string detail;
};

struct StatsReport {
  std::vector<StatsRow> rows;
  std::vector<CheckResult> checks;

  const StatsRow* find(int p, const std::string& statistic) const;
};

struct SamplingOptions {
  std::uint64_t seed = 0;
  long long samples = 1000;
  double truncation_eps = 1e-8;
  CountMethod count_method = CountMethod::argument_principle;
  bool paired = false;  // same eta streams across p (prefix-shared)
  int threads = 0;
};

/// Seed path of sample i of an experiment tagged `tag` at tensor power p.
SeedPath sample_path(std::uint64_t tag, int p, long long i, bool paired);

/// Zero counts N^U of M sections at power p.
std::vector<int> sample_counts(int p, const Annulus& region, const SamplingOptions& options, std::uint64_t tag);

/// Y_p(phi) of M sections at power p (companion roots).
std::vector<double> sample_linear_statistics(int p, const TestFunction& phi, const SamplingOptions& options,
                                             std::uint64_t tag);

StatsReport equidistribution_experiment(std::span<const int> p_list, const Annulus& region,
                                        const SamplingOptions& options);

struct VarianceExperimentOptions {
  std::size_t bootstrap = 200;
  VarianceOptions quadrature;
  std::vector<int> mc_p_list;  // powers that also get a Monte Carlo estimate; empty: all
};
StatsReport variance_experiment(std::span<const int> p_list, const TestFunction& phi, const SamplingOptions& options,
                                const VarianceExperimentOptions& var_options = {});

struct CltResult {
  StatsReport report;
  std::vector<double> standardized;
};
/// Sodin-Tsirelson proxy sup_{|z| in [a,b]} int_{a<|w|<b} N_p(z,w) c_1(w).
double sodin_tsirelson_proxy(const DiscSpace& space, double a, double b, int radial_points = 24);
CltResult clt_experiment(int p, const TestFunction& phi, const SamplingOptions& options,
                         std::span<const int> proxy_p_list = {});

StatsReport hole_probability_experiment(std::span<const int> p_list, const Annulus& region,
                                        const SamplingOptions& options);

/// sup over the annulus of log |s|_{h_p}, by FFT grids on circles and local refinement.
double log_sup_norm(const SectionSample& sample, const Annulus& region);

StatsReport deviation_experiment(std::span<const int> p_list, const Annulus& region, double delta,
                                 double sup_delta, const SamplingOptions& options);

struct DecayOptions {
  std::uint64_t seed = 0;
  int pairs = 4000;
  int k_near = 1;       // regression window radius b = sqrt(12 k) sqrt(log p / p)
  int k_far = 2;        // beyond-threshold radius
  double far_bound = 1e-3;
  double inner = 0.2;   // base points drawn in this annulus
  double outer = 0.8;
};
StatsReport kernel_decay_experiment(int p, const DecayOptions& options);

}  // namespace bergman
