#pragma once

#include <functional>
#include <span>
#include <vector>

namespace levelflow::quadrature {

/// Pairwise (cascade) summation; the result depends only on the input order.
double pairwise_sum(std::span<const double> values);

struct AdaptiveOptions {
  /// Stop when the estimated error is below rel_tol times the integral of |f|.
  double rel_tol = 1e-10;
  /// Bisection depth cap; 2^max_depth subintervals at most.
  unsigned max_depth = 20;
};

struct AdaptiveResult {
  double value = 0.0;
  double error = 0.0;
  /// Integral of |f|, the scale the tolerance is measured against.
  double l1 = 0.0;
};

/// Adaptive Gauss-Kronrod (7, 15) with dyadic bisection.
/// Throws ConvergenceError when the depth cap is hit above tolerance or the integrand is not finite.
AdaptiveResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                  const AdaptiveOptions& options = {});

/// Integrand evaluated at x = end + offset, where end is the nearer panel end.
/// Passing the pair lets callers resolve |offset| far below the spacing of
/// doubles near `end`.
using OffsetIntegrand = std::function<double(double end, double offset)>;

/// Integral over [a, b] of a function allowed an integrable power singularity
/// |x - x0|^alpha (alpha > -1) at either endpoint. Each half of the interval is
/// mapped by x = end +- (h/2) s^grading so the singularity becomes smooth in s.
AdaptiveResult integrate_graded(const OffsetIntegrand& f, double a, double b, double grading = 4.0,
                                const AdaptiveOptions& options = {});
AdaptiveResult integrate_graded(const std::function<double(double)>& f, double a, double b, double grading = 4.0,
                                const AdaptiveOptions& options = {});

/// Integral over one period split at the given break angles (reduced to [0, 2 pi)),
/// each panel graded toward its ends.
AdaptiveResult integrate_periodic(const OffsetIntegrand& f, std::vector<double> breaks, double grading = 4.0,
                                  const AdaptiveOptions& options = {});
AdaptiveResult integrate_periodic(const std::function<double(double)>& f, std::vector<double> breaks,
                                  double grading = 4.0, const AdaptiveOptions& options = {});

/// Composite trapezoid weights are uniform for periodic integrands: (2 pi / n) * sum f(theta_i).
double periodic_trapezoid(const std::function<double(double)>& f, int n);

}  // namespace levelflow::quadrature
