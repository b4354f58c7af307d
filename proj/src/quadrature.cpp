#include "levelflow/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "levelflow/errors.hpp"

namespace levelflow::quadrature {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double pairwise(const double* x, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise(x, half) + pairwise(x + half, n - half);
}

AdaptiveResult& accumulate(AdaptiveResult& total, const AdaptiveResult& part) {
  total.value += part.value;
  total.error += part.error;
  total.l1 += part.l1;
  return total;
}

}  // namespace

double pairwise_sum(std::span<const double> values) { return pairwise(values.data(), values.size()); }

AdaptiveResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                  const AdaptiveOptions& options) {
  AdaptiveResult r;
  if (a == b) return r;
  bool finite = true;
  auto guarded = [&](double x) {
    const double v = f(x);
    if (!std::isfinite(v)) finite = false;
    return v;
  };
  r.value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(guarded, a, b, options.max_depth,
                                                                         options.rel_tol, &r.error, &r.l1);
  if (!finite || !std::isfinite(r.value)) {
    std::ostringstream os;
    os << "integrand not finite on [" << a << ", " << b << "]";
    throw ConvergenceError(os.str());
  }
  if (r.error > options.rel_tol * r.l1 && r.error > 1e-300) {
    std::ostringstream os;
    os << "adaptive quadrature on [" << a << ", " << b << "] stopped at depth " << options.max_depth
       << " with error " << r.error << " (|f| integral " << r.l1 << ")";
    throw ConvergenceError(os.str());
  }
  return r;
}

AdaptiveResult integrate_graded(const OffsetIntegrand& f, double a, double b, double grading,
                                const AdaptiveOptions& options) {
  const double half = 0.5 * (b - a);
  const double q = grading;
  auto left = [&](double s) {
    if (s <= 0.0) return 0.0;
    return f(a, half * std::pow(s, q)) * half * q * std::pow(s, q - 1.0);
  };
  auto right = [&](double s) {
    if (s <= 0.0) return 0.0;
    return f(b, -half * std::pow(s, q)) * half * q * std::pow(s, q - 1.0);
  };
  AdaptiveResult total = integrate_adaptive(left, 0.0, 1.0, options);
  return accumulate(total, integrate_adaptive(right, 0.0, 1.0, options));
}

AdaptiveResult integrate_graded(const std::function<double(double)>& f, double a, double b, double grading,
                                const AdaptiveOptions& options) {
  return integrate_graded([&](double end, double offset) { return f(end + offset); }, a, b, grading, options);
}

AdaptiveResult integrate_periodic(const OffsetIntegrand& f, std::vector<double> breaks, double grading,
                                  const AdaptiveOptions& options) {
  for (double& b : breaks) b = b - kTwoPi * std::floor(b / kTwoPi);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  if (breaks.empty()) breaks.push_back(0.0);
  AdaptiveResult total;
  for (std::size_t i = 0; i < breaks.size(); ++i) {
    const double a = breaks[i];
    const double b = i + 1 < breaks.size() ? breaks[i + 1] : breaks.front() + kTwoPi;
    accumulate(total, integrate_graded(f, a, b, grading, options));
  }
  return total;
}

AdaptiveResult integrate_periodic(const std::function<double(double)>& f, std::vector<double> breaks, double grading,
                                  const AdaptiveOptions& options) {
  return integrate_periodic([&](double end, double offset) { return f(end + offset); }, std::move(breaks), grading,
                            options);
}

double periodic_trapezoid(const std::function<double(double)>& f, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[i] = f(kTwoPi * i / n);
  return kTwoPi / n * pairwise_sum(v);
}

}  // namespace levelflow::quadrature
