#include "bergman/numerics.hpp"

#include <algorithm>
#include <exception>
#include <mutex>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace bergman {

double log_sum_exp(std::span<const double> xs) {
  if (xs.empty()) return kNegInf;
  const double m = *std::max_element(xs.begin(), xs.end());
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

QuadratureRule composite_gauss_legendre(double a, double b, std::size_t panels) {
  using rule = boost::math::quadrature::gauss<double, 8>;
  const auto& x = rule::abscissa();  // positive half, ascending
  const auto& w = rule::weights();
  QuadratureRule q;
  q.nodes.reserve(8 * panels);
  q.weights.reserve(8 * panels);
  const double h = (b - a) / static_cast<double>(panels);
  for (std::size_t k = 0; k < panels; ++k) {
    const double mid = a + (static_cast<double>(k) + 0.5) * h;
    const double half = 0.5 * h;
    for (std::size_t i = x.size(); i-- > 0;) {
      q.nodes.push_back(mid - half * x[i]);
      q.weights.push_back(half * w[i]);
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
      q.nodes.push_back(mid + half * x[i]);
      q.weights.push_back(half * w[i]);
    }
  }
  return q;
}

double integrate(const std::function<double(double)>& f, double a, double b, double rel_tol,
                 double* error_estimate) {
  if (a == b) {
    if (error_estimate) *error_estimate = 0.0;
    return 0.0;
  }
  double err = 0.0;
  const double v =
      boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 15, rel_tol, &err);
  if (error_estimate) *error_estimate = err;
  return v;
}

int default_thread_count() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body) {
  if (threads <= 0) threads = default_thread_count();
#ifdef _OPENMP
  if (threads > 1 && n > 1) {
    std::exception_ptr failure;
    std::mutex guard;
    const auto count = static_cast<long long>(n);
#pragma omp parallel for num_threads(threads) schedule(dynamic, 1)
    for (long long i = 0; i < count; ++i) {
      try {
        body(static_cast<std::size_t>(i));
      } catch (...) {
        std::lock_guard<std::mutex> lock(guard);
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
    return;
  }
#endif
  for (std::size_t i = 0; i < n; ++i) body(i);
}

}  // namespace bergman
