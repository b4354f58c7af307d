#pragma once

#include <functional>
#include <optional>
#include <ostream>
#include <utility>
#include <vector>

#include "levelflow/chart.hpp"
#include "levelflow/field.hpp"

namespace levelflow::levelsets {

struct CurveSample {
  Point2 point;
  /// Derivative of the point with respect to the curve parameter.
  Point2 tangent;
  /// Parameter step attributed to this sample by the quadrature rule.
  double dparam = 0.0;

  /// Euclidean arclength weight |tangent| * dparam.
  double weight() const { return tangent.norm() * dparam; }
};

struct Circle {
  Point2 center;
  double radius = 0.0;
};

enum class ExtractionMethod { radial_circle, warped_circle, star_shaped, traced };

struct LevelCurve {
  double level = 0.0;
  std::vector<CurveSample> samples;
  bool closed = true;
  ExtractionMethod method = ExtractionMethod::traced;
  /// Set when the curve is an exact coordinate circle (radial fields).
  std::optional<Circle> circle;

  /// Sum of Euclidean arclength weights.
  double euclidean_length() const;
};

/// Values of u on the two boundary components, when known.
std::optional<std::pair<double, double>> level_range(const HarmonicField& u, const Chart& chart);

/// Closed level curve {u = t} sampled with n_samples points.
///
/// Radial fields give exact circles; warped charts need a radial field and
/// locate the circle by a monotone root-find. Other fields are sampled along
/// rays when the level is star-shaped about the domain centre and traced by a
/// predictor-corrector otherwise.
/// Throws DomainError when t is outside the open range of boundary values,
/// CriticalPointError near a critical point, TopologyError when the level
/// reaches the boundary.
LevelCurve extract_level_curve(const HarmonicField& u, const Chart& chart, double t, int n_samples);

/// Predictor-corrector tracing of the level with step 2 pi rho_mid / n_samples,
/// independent of the field's radial or star-shaped structure.
LevelCurve trace_level_curve(const HarmonicField& u, const Chart& chart, double t, int n_samples);

/// Integral of f over the curve against the metric length element.
/// Circles through or near declared singular points of the chart switch to
/// adaptive quadrature in angle with breaks at the singular angles.
double level_integral(const LevelCurve& curve, const Chart& chart, const std::function<double(Point2)>& f);

/// Metric length of the curve.
double length(const LevelCurve& curve, const Chart& chart);

/// Pointwise integrands over a level curve, all metric quantities.
struct LevelIntegrands {
  double gradnorm = 0.0;
  /// <-grad u/|grad u|, grad|grad u|> / |grad u|^2, the first-variation integrand.
  double first = 0.0;
  /// |grad|grad u||^2 / |grad u|^4 - K / |grad u|^2.
  double second = 0.0;
  /// |grad u|^{-2}.
  double invgrad2 = 0.0;
  /// k / |grad u|.
  double phi_k = 0.0;
  double K = 0.0;
};

LevelIntegrands level_integrands(const HarmonicField& u, const Chart& chart, Point2 p);

/// Level integrals over {u = t} against the metric length element.
struct LevelMoments {
  double L = 0.0;
  /// First-variation integral, L'(t).
  double Lp = 0.0;
  /// Second-variation integral, L''(t).
  double Lpp = 0.0;
  /// Integral of |grad u|^{-2}.
  double aux = 0.0;
  /// Integral of k / |grad u|; equals -L'(t).
  double phi_k = 0.0;
};

LevelMoments level_moments(const HarmonicField& u, const Chart& chart, double t, int n_samples = 512);
LevelMoments level_moments(const HarmonicField& u, const Chart& chart, const LevelCurve& curve);

/// L'(t) from the first-variation integral.
double dlength_integral(const HarmonicField& u, const Chart& chart, double t, int n_samples = 512);
/// L''(t) from the second-variation integral.
double d2length_integral(const HarmonicField& u, const Chart& chart, double t, int n_samples = 512);
/// Integral of |grad u|^{-2} over the level.
double invgrad2_integral(const HarmonicField& u, const Chart& chart, double t, int n_samples = 512);

struct FiniteDifferences {
  double first = 0.0;
  double second = 0.0;
};

/// Centred differences of L at t with step h.
FiniteDifferences length_differences(const HarmonicField& u, const Chart& chart, double t, double h,
                                     int n_samples = 512);

struct LengthProfile {
  std::vector<double> t;
  std::vector<double> L;
  std::vector<double> Lp;
  std::vector<double> Lpp;
  std::vector<double> lnL_pp;
  std::vector<double> L_fd_p;
  std::vector<double> L_fd_pp;
  std::vector<double> aux_invgrad2;
  /// Finite-difference step used for the L_fd columns.
  double fd_step = 0.0;

  std::size_t size() const { return t.size(); }
};

struct ProfileOptions {
  int n_samples = 512;
  /// Finite-difference step; 0 selects 1e-3 times the level range.
  double fd_step = 0.0;
};

/// Length profile over a grid of at least 8 levels, parallel over levels.
LengthProfile length_profile(const HarmonicField& u, const Chart& chart, const std::vector<double>& t_grid,
                             const ProfileOptions& options = {});
/// Serial reference; bitwise identical to length_profile.
LengthProfile length_profile_serial(const HarmonicField& u, const Chart& chart, const std::vector<double>& t_grid,
                                    const ProfileOptions& options = {});

/// n levels spanning (lo, hi) with both ends inset by 1e-3 (hi - lo).
std::vector<double> inset_grid(double lo, double hi, int n);

/// Columns t, L, Lp, Lpp, lnL_pp, L_fd_p, L_fd_pp, aux_invgrad2 with 17 significant digits.
void write_profile_csv(std::ostream& out, const LengthProfile& profile);

/// Second differences of ln L on a (possibly non-uniform) grid, scaled to approximate (ln L)''.
std::vector<double> discrete_second_differences(const std::vector<double>& t, const std::vector<double>& L);

struct ConvexityReport {
  /// Minimum of the integral-formula (ln L)''; NaN when the profile has no integral columns.
  double min_lnL_pp = 0.0;
  double min_discrete = 0.0;
  /// Level at which the discrete minimum occurs.
  double t_at_min_discrete = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

ConvexityReport log_convexity_check(const LengthProfile& profile, double tolerance = 1e-8);

/// (ln L)'' + (kappa / L) * integral |grad u|^{-2}, without checking K <= kappa.
double sharp_bound_value(const HarmonicField& u, const Chart& chart, double t, double kappa, int n_samples = 512);
/// Same after verifying kappa <= 0 and K <= kappa at every sample of the level.
double sharp_bound_gap(const HarmonicField& u, const Chart& chart, double t, double kappa, int n_samples = 512);

/// (ln L)''(t) - (kappa2 / kappa1) / t^2 after checking t > 0 and -kappa1 <= K <= -kappa2 <= 0 on the level.
double pinched_bound_check(const HarmonicField& u, const Chart& chart, double t, double kappa1, double kappa2,
                           int n_samples = 512);

/// e^{4t} (L L'' - L'^2) for u = -ln|z| on the punctured disc carrying the factor phi.
/// Requires lambda = e^phi normalised at the origin: lambda(0) = 1, grad lambda(0) = 0.
double asymptotic_defect(const ScalarField& phi, double t, int n_samples = 1024);

}  // namespace levelflow::levelsets
