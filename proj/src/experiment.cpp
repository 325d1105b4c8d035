#include "bergman/experiment.hpp"

#include <Eigen/Core>
#include <boost/version.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "bergman/disc_kernel.hpp"
#include "bergman/model_kernel.hpp"

namespace bergman {

using nlohmann::json;

namespace {

const std::vector<std::string> kCommonKeys = {"experiment", "seed", "threads", "output"};

const std::vector<ExperimentInfo>& infos() {
  static const std::vector<ExperimentInfo> table = {
      {"plateau",
       {"p_list", "r_min", "r_max", "grid", "tolerance"},
       "Bergman kernel of the punctured disc, plateau estimate \"there exists c=c(a)>0\"",
       "sup over [r_min, r_max] of |2 pi B_p(r)/(p-1) - 1|"},
      {"sup",
       {"p_list", "tolerance"},
       "Supremum law \"the supremum value of\" B_p",
       "sup B_p and sup B_p (2 pi/p)^{3/2}"},
      {"model-kernel",
       {"curvatures", "max_deg", "method", "rel_tol", "degree_cap", "jet_order", "jet_step", "jet_tolerance",
        "tolerance"},
       "Model operators b, b+ and the Lemma \"B^{R}(0)>0\", \"B_R is an even function\"",
       "B^R(0,0) from a weighted Gram matrix, odd jets of the diagonal"},
      {"equidistribution",
       {"p_list", "annulus", "samples", "count_method", "paired", "truncation_eps"},
       "Equidistribution \"weak convergence of measures\"; expected measure \"exists as a positive distribution\"",
       "mean zero count N/p against Area^L and the expected zero measure"},
      {"variance",
       {"p_list", "phi", "samples", "mc_p_list", "bootstrap", "panels", "max_panels", "rel_tol", "truncation_eps"},
       "Number variance \"we have the formula for\" with zeta(3); bipotential \"identity of distribution on\"",
       "Var Y_p(phi): Monte Carlo, bipotential quadrature, leading term"},
      {"clt",
       {"p", "phi", "samples", "proxy_p_list", "truncation_eps"},
       "Central limit theorem \"converges weakly to\"; Sodin-Tsirelson condition (ii)",
       "KS test of standardized Y_p(phi) against N(0,1)"},
      {"holes",
       {"p_list", "annulus", "samples", "count_method", "truncation_eps"},
       "Proposition \"Hole probabilities\"",
       "P(no zeros in the annulus) with Wilson intervals"},
      {"deviation",
       {"p_list", "annulus", "delta", "delta_relative", "sup_delta", "samples", "count_method", "truncation_eps"},
       "\"Large deviation estimates or concentration inequalities\"",
       "tail frequencies of |N/p - Area| > delta and |log sup|s|| / p >= sup_delta"},
      {"kernel-decay",
       {"p", "pairs", "k_near", "k_far", "far_bound", "inner", "outer"},
       "\"uniform estimate on the normalized Bergman kernel\"",
       "slope of -log N_p against p d^2/4 near the diagonal, bound beyond sqrt(12 k log p / p)"},
      {"l1log",
       {"p_list", "annulus"},
       "L1 bound on log B_p \"<= C log p\"",
       "int_U |log B_p| omega against Area_omega(U) log p"},
  };
  return table;
}

const ExperimentInfo* info_for(const std::string& kind) {
  for (const ExperimentInfo& i : infos())
    if (i.kind == kind) return &i;
  return nullptr;
}

std::pair<int, int> line_column(const std::string& text, std::size_t offset) {
  int line = 1;
  int col = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

// Location of "key" in the source, or (0, 0).
std::pair<int, int> locate_key(const std::string& text, const std::string& key) {
  const auto at = text.find("\"" + key + "\"");
  if (at == std::string::npos) return {0, 0};
  return line_column(text, at);
}

class Reader {
 public:
  Reader(const json& obj, const std::string& source, std::string where)
      : obj_(obj), source_(source), where_(std::move(where)) {}

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    const auto [line, col] = locate_key(source_, key);
    throw ConfigError(where_ + "key '" + key + "': " + what, line, col);
  }

  void only(const std::vector<std::string>& allowed) const {
    for (const auto& [key, value] : obj_.items())
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) fail(key, "unknown key");
  }

  bool has(const std::string& key) const { return obj_.contains(key); }

  const json& raw(const std::string& key) const { return obj_.at(key); }

  double number(const std::string& key, std::optional<double> fallback = {}) const {
    if (!has(key)) {
      if (!fallback) fail(key, "required");
      return *fallback;
    }
    const json& v = obj_.at(key);
    if (!v.is_number()) fail(key, "expected a number");
    return v.get<double>();
  }

  long long integer(const std::string& key, std::optional<long long> fallback = {}) const {
    if (!has(key)) {
      if (!fallback) fail(key, "required");
      return *fallback;
    }
    const json& v = obj_.at(key);
    if (!v.is_number_integer()) fail(key, "expected an integer");
    return v.get<long long>();
  }

  bool boolean(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const json& v = obj_.at(key);
    if (!v.is_boolean()) fail(key, "expected true or false");
    return v.get<bool>();
  }

  std::string string(const std::string& key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    const json& v = obj_.at(key);
    if (!v.is_string()) fail(key, "expected a string");
    return v.get<std::string>();
  }

  std::vector<int> int_list(const std::string& key, std::vector<int> fallback, int min_value) const {
    if (!has(key)) return fallback;
    const json& v = obj_.at(key);
    if (!v.is_array() || v.empty()) fail(key, "expected a non-empty array of integers");
    std::vector<int> out;
    for (const json& e : v) {
      if (!e.is_number_integer()) fail(key, "expected a non-empty array of integers");
      const long long x = e.get<long long>();
      if (x < min_value || x > 100000) fail(key, "entries must lie in [" + std::to_string(min_value) + ", 100000]");
      out.push_back(static_cast<int>(x));
    }
    return out;
  }

 private:
  const json& obj_;
  const std::string& source_;
  std::string where_;
};

json annulus_param(const Reader& r, std::vector<double> fallback) {
  std::vector<double> ab = fallback;
  if (r.has("annulus")) {
    const json& v = r.raw("annulus");
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
      r.fail("annulus", "expected [inner, outer]");
    ab = {v[0].get<double>(), v[1].get<double>()};
  }
  if (!(ab[0] > 0.0 && ab[0] <= ab[1] && ab[1] < 1.0)) r.fail("annulus", "need 0 < inner <= outer < 1");
  return ab;
}

json phi_param(const Reader& r, const std::string& source) {
  json phi = {{"type", "bump"}, {"a", 0.2}, {"b", 0.7}, {"height", 1.0}};
  if (!r.has("phi")) return phi;
  const json& v = r.raw("phi");
  if (!v.is_object()) r.fail("phi", "expected an object");
  Reader pr(v, source, "phi: ");
  pr.only({"type", "a", "b", "height"});
  if (pr.string("type", "bump") != "bump") pr.fail("type", "only \"bump\" test functions are supported");
  phi["a"] = pr.number("a", 0.2);
  phi["b"] = pr.number("b", 0.7);
  phi["height"] = pr.number("height", 1.0);
  const double a = phi["a"];
  const double b = phi["b"];
  if (!(a > 0.0 && a < b && b < 1.0)) r.fail("phi", "support needs 0 < a < b < 1");
  return phi;
}

std::string count_method_param(const Reader& r) {
  const std::string m = r.string("count_method", "argument_principle");
  if (m != "argument_principle" && m != "companion")
    r.fail("count_method", "expected \"argument_principle\" or \"companion\"");
  return m;
}

void positive(const Reader& r, const std::string& key, double v) {
  if (!(v > 0.0)) r.fail(key, "must be positive");
}

json curvature_param(const json& v, const std::string& source, std::size_t index) {
  const std::string where = "curvatures[" + std::to_string(index) + "]: ";
  if (!v.is_object()) throw ConfigError(where + "expected an object");
  Reader cr(v, source, where);
  json out;
  if (cr.has("constant")) {
    cr.only({"constant"});
    const double c = cr.number("constant");
    positive(cr, "constant", c);
    out["constant"] = c;
    return out;
  }
  cr.only({"rho_prime", "terms", "convention"});
  const long long rho = cr.integer("rho_prime");
  if (rho < 2 || rho % 2 != 0 || rho > 12) cr.fail("rho_prime", "must be even, between 2 and 12");
  const std::string conv = cr.string("convention", "psi");
  if (conv != "psi" && conv != "form") cr.fail("convention", "expected \"psi\" or \"form\"");
  if (!cr.has("terms")) cr.fail("terms", "required");
  const json& t = cr.raw("terms");
  if (!t.is_array() || t.empty()) cr.fail("terms", "expected a non-empty array of [i, j, coefficient]");
  for (const json& m : t) {
    if (!m.is_array() || m.size() != 3 || !m[0].is_number_integer() || !m[1].is_number_integer() ||
        !m[2].is_number())
      cr.fail("terms", "expected a non-empty array of [i, j, coefficient]");
  }
  out["rho_prime"] = rho;
  out["terms"] = t;
  out["convention"] = conv;
  return out;
}

json validate(const std::string& kind, const json& root, const std::string& source) {
  const ExperimentInfo* info = info_for(kind);
  std::vector<std::string> allowed = kCommonKeys;
  allowed.insert(allowed.end(), info->parameters.begin(), info->parameters.end());
  Reader r(root, source, "");
  r.only(allowed);

  json p;
  auto samples = [&](long long fallback) {
    const long long m = r.integer("samples", fallback);
    if (m < 1 || m > 100'000'000) r.fail("samples", "must lie in [1, 1e8]");
    p["samples"] = m;
  };
  auto eps = [&] {
    const double e = r.number("truncation_eps", 1e-8);
    if (!(e > 0.0 && e < 1.0)) r.fail("truncation_eps", "must lie in (0, 1)");
    p["truncation_eps"] = e;
  };

  if (kind == "plateau") {
    p["p_list"] = r.int_list("p_list", {20, 40, 60}, 3);
    p["r_min"] = r.number("r_min", 0.3);
    p["r_max"] = r.number("r_max", 0.9);
    if (!(p["r_min"].get<double>() > 0.0 && p["r_min"].get<double>() <= p["r_max"].get<double>() &&
          p["r_max"].get<double>() < 1.0))
      r.fail("r_max", "need 0 < r_min <= r_max < 1");
    const long long grid = r.integer("grid", 601);
    if (grid < 2) r.fail("grid", "must be >= 2");
    p["grid"] = grid;
    p["tolerance"] = r.number("tolerance", 1e-3);
  } else if (kind == "sup") {
    p["p_list"] = r.int_list("p_list", {100, 200}, 3);
    p["tolerance"] = r.number("tolerance", 0.25);
  } else if (kind == "model-kernel") {
    if (!r.has("curvatures")) r.fail("curvatures", "required");
    const json& cs = r.raw("curvatures");
    if (!cs.is_array() || cs.empty()) r.fail("curvatures", "expected a non-empty array");
    json list = json::array();
    for (std::size_t i = 0; i < cs.size(); ++i) list.push_back(curvature_param(cs[i], source, i));
    p["curvatures"] = list;
    const long long deg = r.integer("max_deg", 12);
    if (deg < 0 || deg > 400) r.fail("max_deg", "must lie in [0, 400]");
    p["max_deg"] = deg;
    const std::string method = r.string("method", "gram");
    if (method != "gram" && method != "orthogonal") r.fail("method", "expected \"gram\" or \"orthogonal\"");
    p["method"] = method;
    p["rel_tol"] = r.number("rel_tol", 1e-6);
    p["degree_cap"] = r.integer("degree_cap", 200);
    const long long order = r.integer("jet_order", 3);
    if (order < 0 || order > 4) r.fail("jet_order", "must lie in [0, 4]");
    p["jet_order"] = order;
    p["jet_step"] = r.number("jet_step", 1e-3);
    p["jet_tolerance"] = r.number("jet_tolerance", 1e-5);
    p["tolerance"] = r.number("tolerance", 1e-6);
  } else if (kind == "equidistribution") {
    p["p_list"] = r.int_list("p_list", {50, 100, 200}, 2);
    p["annulus"] = annulus_param(r, {0.2, 0.7});
    samples(500);
    p["count_method"] = count_method_param(r);
    p["paired"] = r.boolean("paired", false);
    eps();
  } else if (kind == "variance") {
    p["p_list"] = r.int_list("p_list", {40, 80}, 2);
    p["phi"] = phi_param(r, source);
    samples(2000);
    p["mc_p_list"] = r.int_list("mc_p_list", {}, 2);
    const long long boot = r.integer("bootstrap", 200);
    if (boot < 2) r.fail("bootstrap", "must be >= 2");
    p["bootstrap"] = boot;
    const long long panels = r.integer("panels", 8);
    const long long max_panels = r.integer("max_panels", 64);
    if (panels < 1 || max_panels < panels) r.fail("max_panels", "need 1 <= panels <= max_panels");
    p["panels"] = panels;
    p["max_panels"] = max_panels;
    p["rel_tol"] = r.number("rel_tol", 1e-4);
    eps();
  } else if (kind == "clt") {
    const long long pp = r.integer("p", 100);
    if (pp < 2) r.fail("p", "must be >= 2");
    p["p"] = pp;
    p["phi"] = phi_param(r, source);
    samples(1000);
    if (p["samples"].get<long long>() < 2) r.fail("samples", "need at least 2 samples");
    p["proxy_p_list"] = r.int_list("proxy_p_list", {50, 200}, 2);
    eps();
  } else if (kind == "holes") {
    p["p_list"] = r.int_list("p_list", {4, 6, 8}, 2);
    p["annulus"] = annulus_param(r, {0.25, 0.45});
    samples(100000);
    p["count_method"] = count_method_param(r);
    eps();
  } else if (kind == "deviation") {
    p["p_list"] = r.int_list("p_list", {20, 40}, 2);
    p["annulus"] = annulus_param(r, {0.3, 0.4});
    if (r.has("delta") && r.has("delta_relative")) r.fail("delta_relative", "give either delta or delta_relative");
    if (r.has("delta")) {
      p["delta"] = r.number("delta");
      positive(r, "delta", p["delta"]);
    } else {
      p["delta_relative"] = r.number("delta_relative", 0.3);
      positive(r, "delta_relative", p["delta_relative"]);
    }
    p["sup_delta"] = r.number("sup_delta", 0.5);
    positive(r, "sup_delta", p["sup_delta"]);
    samples(10000);
    p["count_method"] = count_method_param(r);
    eps();
  } else if (kind == "kernel-decay") {
    const long long pp = r.integer("p", 200);
    if (pp < 3) r.fail("p", "must be >= 3");
    p["p"] = pp;
    const long long pairs = r.integer("pairs", 4000);
    if (pairs < 1) r.fail("pairs", "must be >= 1");
    p["pairs"] = pairs;
    p["k_near"] = r.integer("k_near", 1);
    p["k_far"] = r.integer("k_far", 2);
    p["far_bound"] = r.number("far_bound", 1e-3);
    p["inner"] = r.number("inner", 0.2);
    p["outer"] = r.number("outer", 0.8);
    if (!(p["inner"].get<double>() > 0.0 && p["inner"].get<double>() < p["outer"].get<double>() &&
          p["outer"].get<double>() < 1.0))
      r.fail("outer", "need 0 < inner < outer < 1");
  } else if (kind == "l1log") {
    p["p_list"] = r.int_list("p_list", {25, 50, 100, 200, 400}, 3);
    p["annulus"] = annulus_param(r, {0.2, 0.7});
  }
  return p;
}

SamplingOptions sampling(const ExperimentConfig& c) {
  SamplingOptions o;
  o.seed = c.seed;
  o.threads = c.threads;
  o.samples = c.params.value("samples", 1000LL);
  o.truncation_eps = c.params.value("truncation_eps", 1e-8);
  o.count_method = c.params.value("count_method", std::string("argument_principle")) == "companion"
                       ? CountMethod::companion
                       : CountMethod::argument_principle;
  o.paired = c.params.value("paired", false);
  return o;
}

Annulus annulus_of(const json& p) { return Annulus(p["annulus"][0].get<double>(), p["annulus"][1].get<double>()); }

TestFunction phi_of(const json& p) {
  const json& f = p["phi"];
  return TestFunction::bump(f["a"].get<double>(), f["b"].get<double>(), f["height"].get<double>());
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

StatsReport run_plateau(const ExperimentConfig& c) {
  const json& p = c.params;
  const std::vector<int> ps = p["p_list"];
  const double a = p["r_min"];
  const double b = p["r_max"];
  const long long grid = p["grid"];
  const double tol = p["tolerance"];
  StatsReport rep;
  std::vector<double> devs;
  for (int power : ps) {
    const DiscSpace space = DiscSpace::for_radius(power, b);
    double sup_dev = 0.0;
    double sup_direct = 0.0;
    for (long long k = 0; k < grid; ++k) {
      const double r = a + (b - a) * static_cast<double>(k) / static_cast<double>(grid - 1);
      sup_dev = std::max(sup_dev, std::abs(plateau_deviation(power, r)));
      sup_direct = std::max(sup_direct, std::abs(kTwoPi * kernel_function(space, r) / (power - 1) - 1.0));
    }
    devs.push_back(sup_dev);
    rep.rows.push_back({"plateau", power, "sup_plateau_deviation", sup_dev, 0.0, 0.0, sup_dev, 0, c.seed});
    rep.rows.push_back({"plateau", power, "sup_plateau_deviation_direct", sup_direct, 0.0, 0.0, sup_direct, 0, c.seed});
  }
  rep.checks.push_back({"plateau_tolerance_p" + std::to_string(ps.back()), devs.back() <= tol,
                        "deviation " + fmt(devs.back()) + " vs " + fmt(tol)});
  bool decreasing = true;
  for (std::size_t i = 1; i < devs.size(); ++i) decreasing = decreasing && devs[i] < devs[i - 1];
  rep.checks.push_back({"plateau_strictly_decreasing", decreasing, "over the p list"});
  return rep;
}

StatsReport run_sup(const ExperimentConfig& c) {
  const std::vector<int> ps = c.params["p_list"];
  const double tol = c.params["tolerance"];
  StatsReport rep;
  std::vector<double> devs;
  for (int power : ps) {
    const DiscSpace space = DiscSpace::for_radius(power, 0.5);
    const SupResult s = sup_kernel(space);
    const double lead = std::pow(power / kTwoPi, 1.5);
    const double scaled = s.value / lead;
    devs.push_back(std::abs(scaled - 1.0));
    rep.rows.push_back({"sup", power, "sup_kernel", s.value, 0.0, lead, std::abs(s.value - lead), 0, c.seed});
    rep.rows.push_back({"sup", power, "sup_kernel_scaled", scaled, 0.0, 1.0, std::abs(scaled - 1.0), 0, c.seed});
    rep.rows.push_back({"sup", power, "log_r_star", s.log_r_star, 0.0, std::nan(""), std::nan(""), 0, c.seed});
  }
  rep.checks.push_back({"sup_tolerance_p" + std::to_string(ps.front()), devs.front() <= tol,
                        "|scaled - 1| = " + fmt(devs.front()) + " vs " + fmt(tol)});
  bool decreasing = true;
  for (std::size_t i = 1; i < devs.size(); ++i) decreasing = decreasing && devs[i] < devs[i - 1];
  rep.checks.push_back({"sup_deviation_strictly_decreasing", decreasing, "over the p list"});
  return rep;
}

StatsReport run_model_kernel(const ExperimentConfig& c) {
  const json& p = c.params;
  const int deg = p["max_deg"];
  const bool gram = p["method"] == "gram";
  const int order = p["jet_order"];
  StatsReport rep;
  const auto& list = p["curvatures"];
  for (std::size_t k = 0; k < list.size(); ++k) {
    const json& cj = list[k];
    const std::string tag = "[" + std::to_string(k) + "]";
    std::optional<double> constant;
    HomogeneousCurvature curv = HomogeneousCurvature::constant(1.0);
    if (cj.contains("constant")) {
      constant = cj["constant"].get<double>();
      curv = HomogeneousCurvature::constant(*constant);
    } else {
      std::vector<XYMonomial> terms;
      for (const json& t : cj["terms"]) terms.push_back({t[0].get<int>(), t[1].get<int>(), t[2].get<double>()});
      curv = cj["convention"] == "form" ? HomogeneousCurvature::from_form_coefficient(cj["rho_prime"], terms)
                                         : HomogeneousCurvature::from_terms(cj["rho_prime"], terms);
    }
    const PotentialPair base = solve_potential(curv);
    const PotentialPair pp = base.with_gauge(integrable_gauge(base));
    const double pred = constant ? *constant / kTwoPi : std::nan("");
    double value = 0.0;
    double err = 0.0;
    if (gram) {
      const GramBasis basis = gram_matrix(pp, deg);
      value = model_bergman_at_zero(basis);
      err = basis.refinement_change();
      if (order > 0) {
        double odd = 0.0;
        for (const JetEntry& j : kernel_parity_and_jets(basis, order, p["jet_step"]))
          if ((j.dx + j.dy) % 2 == 1) odd = std::max(odd, std::abs(j.value));
        rep.rows.push_back({"model-kernel", 0, "max_odd_jet" + tag, odd, 0.0, 0.0, odd, 0, c.seed});
        rep.checks.push_back({"model_kernel_odd_jets" + tag, odd <= p["jet_tolerance"].get<double>(),
                              "max odd jet " + fmt(odd)});
      }
    } else {
      const ConvergedKernel ck = model_bergman_at_zero_converged(pp, p["rel_tol"], p["degree_cap"]);
      value = ck.value;
      err = ck.last_change * ck.value;
      rep.rows.push_back({"model-kernel", 0, "max_deg" + tag, static_cast<double>(ck.max_deg), 0.0, std::nan(""),
                          std::nan(""), 0, c.seed});
    }
    rep.rows.push_back({"model-kernel", 0, "bergman_at_zero" + tag, value, err, pred,
                        constant ? std::abs(value - pred) : std::nan(""), 0, c.seed});
    rep.checks.push_back({"model_kernel_positive" + tag, value > 0.0, "B^R(0,0) = " + fmt(value)});
    if (constant) {
      const double rel = std::abs(value / pred - 1.0);
      rep.checks.push_back({"model_kernel_constant" + tag, rel <= p["tolerance"].get<double>(),
                            "|2 pi B/c - 1| = " + fmt(rel)});
    }
  }
  return rep;
}

StatsReport run_l1log(const ExperimentConfig& c) {
  const std::vector<int> ps = c.params["p_list"];
  const Annulus region = annulus_of(c.params);
  StatsReport rep;
  bool ok = true;
  for (int power : ps) {
    const DiscSpace space = DiscSpace::for_radius(power, region.outer());
    const double v = log_bergman_l1(space, region);
    const double bound = omega_area(region) * std::log(static_cast<double>(power));
    ok = ok && v <= bound;
    rep.rows.push_back({"l1log", power, "log_bergman_l1", v, 0.0, bound, std::abs(v - bound), 0, c.seed});
  }
  rep.checks.push_back({"l1log_below_area_log_p", ok, "int |log B_p| omega <= Area_omega log p"});
  return rep;
}

void csv_number(std::string& out, double x) {
  if (std::isnan(x)) return;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  out += buf;
}

json json_number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

}  // namespace

const std::vector<ExperimentInfo>& list_experiments() { return infos(); }

std::string list_experiments_text() {
  std::ostringstream os;
  for (const ExperimentInfo& i : infos()) {
    os << i.kind << "\n  " << i.summary << "\n  anchor: " << i.anchor << "\n  keys:";
    for (const std::string& k : i.parameters) os << ' ' << k;
    os << "\n";
  }
  return os.str();
}

std::string list_experiments_json() {
  json arr = json::array();
  for (const ExperimentInfo& i : infos())
    arr.push_back({{"kind", i.kind}, {"parameters", i.parameters}, {"anchor", i.anchor}, {"summary", i.summary}});
  return json{{"experiments", arr}, {"common_keys", kCommonKeys}}.dump(2) + "\n";
}

ExperimentConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_column(text, e.byte > 0 ? e.byte - 1 : 0);
    throw ConfigError(std::string("malformed JSON: ") + e.what(), line, col);
  }
  if (!root.is_object()) throw ConfigError("config must be a JSON object");
  Reader r(root, text, "");
  if (!r.has("experiment")) throw ConfigError("key 'experiment': required");
  ExperimentConfig c;
  c.kind = r.string("experiment", "");
  if (!info_for(c.kind)) r.fail("experiment", "unknown experiment kind '" + c.kind + "'");
  if (r.has("seed")) {
    const json& s = root["seed"];
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0))
      r.fail("seed", "expected a non-negative 64-bit integer");
    c.seed = s.get<std::uint64_t>();
  }
  c.threads = static_cast<int>(r.integer("threads", 0));
  c.output = r.string("output", ".");
  c.params = validate(c.kind, root, text);
  c.source = text;
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

StatsReport run_experiment(const ExperimentConfig& c) {
  const json& p = c.params;
  if (c.kind == "plateau") return run_plateau(c);
  if (c.kind == "sup") return run_sup(c);
  if (c.kind == "model-kernel") return run_model_kernel(c);
  if (c.kind == "l1log") return run_l1log(c);
  if (c.kind == "equidistribution") {
    const std::vector<int> ps = p["p_list"];
    return equidistribution_experiment(ps, annulus_of(p), sampling(c));
  }
  if (c.kind == "variance") {
    const std::vector<int> ps = p["p_list"];
    VarianceExperimentOptions vo;
    vo.bootstrap = p["bootstrap"];
    vo.mc_p_list = p["mc_p_list"].get<std::vector<int>>();
    vo.quadrature.panels = p["panels"];
    vo.quadrature.max_panels = p["max_panels"];
    vo.quadrature.rel_tol = p["rel_tol"];
    vo.quadrature.threads = c.threads;
    return variance_experiment(ps, phi_of(p), sampling(c), vo);
  }
  if (c.kind == "clt") {
    const std::vector<int> proxy = p["proxy_p_list"];
    return clt_experiment(p["p"], phi_of(p), sampling(c), proxy).report;
  }
  if (c.kind == "holes") {
    const std::vector<int> ps = p["p_list"];
    return hole_probability_experiment(ps, annulus_of(p), sampling(c));
  }
  if (c.kind == "deviation") {
    const std::vector<int> ps = p["p_list"];
    const Annulus region = annulus_of(p);
    const double delta = p.contains("delta") ? p["delta"].get<double>() : p["delta_relative"].get<double>() * area_L(region);
    return deviation_experiment(ps, region, delta, p["sup_delta"], sampling(c));
  }
  if (c.kind == "kernel-decay") {
    DecayOptions o;
    o.seed = c.seed;
    o.pairs = p["pairs"];
    o.k_near = p["k_near"];
    o.k_far = p["k_far"];
    o.far_bound = p["far_bound"];
    o.inner = p["inner"];
    o.outer = p["outer"];
    return kernel_decay_experiment(p["p"], o);
  }
  throw ConfigError("unknown experiment kind '" + c.kind + "'");
}

std::string results_csv(const StatsReport& report) {
  std::string out = "experiment,p,statistic,estimate,stderr,prediction,deviation,n_samples,seed\n";
  for (const StatsRow& r : report.rows) {
    out += r.experiment + "," + std::to_string(r.p) + "," + r.statistic + ",";
    csv_number(out, r.estimate);
    out += ",";
    csv_number(out, r.stderr_);
    out += ",";
    csv_number(out, r.prediction);
    out += ",";
    csv_number(out, r.deviation);
    out += "," + std::to_string(r.n_samples) + "," + std::to_string(r.seed) + "\n";
  }
  return out;
}

std::string config_digest(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string summary_json(const ExperimentConfig& config, const StatsReport& report) {
  json rows = json::array();
  for (const StatsRow& r : report.rows)
    rows.push_back({{"experiment", r.experiment},
                    {"p", r.p},
                    {"statistic", r.statistic},
                    {"estimate", json_number(r.estimate)},
                    {"stderr", json_number(r.stderr_)},
                    {"prediction", json_number(r.prediction)},
                    {"deviation", json_number(r.deviation)},
                    {"n_samples", r.n_samples},
                    {"seed", r.seed}});
  json checks = json::array();
  for (const CheckResult& ch : report.checks)
    checks.push_back({{"name", ch.name}, {"passed", ch.passed}, {"detail", ch.detail}});
  const json versions = {
      {"bergman_zeros", BERGMAN_VERSION},
      {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                    std::to_string(EIGEN_MINOR_VERSION)},
      {"boost", BOOST_LIB_VERSION},
      {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." + std::to_string(NLOHMANN_JSON_VERSION_MINOR) +
                            "." + std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
  };
  const json summary = {{"experiment", config.kind},
                        {"config_digest", config_digest(config.source)},
                        {"seed", config.seed},
                        {"parameters", config.params},
                        {"rows", rows},
                        {"checks", checks},
                        {"versions", versions}};
  return summary.dump(2) + "\n";
}

int run_command(const RunRequest& request, std::ostream& out, std::ostream& err) {
  try {
    ExperimentConfig c = load_config(request.config_path);
    if (request.seed) c.seed = *request.seed;
    if (request.threads) c.threads = *request.threads;
    if (request.out) c.output = *request.out;
    const StatsReport rep = run_experiment(c);

    namespace fs = std::filesystem;
    fs::create_directories(c.output);
    {
      std::ofstream f(fs::path(c.output) / "results.csv", std::ios::binary);
      f << results_csv(rep);
      if (!f) throw Error("cannot write results.csv in '" + c.output + "'");
    }
    {
      std::ofstream f(fs::path(c.output) / "summary.json", std::ios::binary);
      f << summary_json(c, rep);
      if (!f) throw Error("cannot write summary.json in '" + c.output + "'");
    }
    bool all = true;
    for (const CheckResult& ch : rep.checks) {
      out << (ch.passed ? "PASS " : "FAIL ") << ch.name << ": " << ch.detail << "\n";
      all = all && ch.passed;
    }
    out << "wrote " << rep.rows.size() << " rows to " << (fs::path(c.output) / "results.csv").string() << "\n";
    return request.check && !all ? 2 : 0;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
  }
  return 1;
}

}  // namespace bergman
