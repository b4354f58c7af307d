#pragma once

#include <string>
#include <vector>

#include "levelflow/chart.hpp"
#include "levelflow/field.hpp"
#include "levelflow/levelsets.hpp"
#include "json.hpp"

namespace levelflow::curvature_flow {

/// |k| or |h| below this disables the logarithmic inequalities.
inline constexpr double kCurvatureThreshold = 1e-6;

/// Pointwise curvature data of u. The rotated gradient is star grad u = (u_y, -u_x) / sqrt(E G).
struct CurvatureSample {
  Point2 p;
  /// Level-curve curvature, -div(grad u / |grad u|).
  double k = 0.0;
  /// Steepest-descent curvature, div(star grad u / |grad u|).
  double h = 0.0;
  double gradnorm = 0.0;
  double phi_k = 0.0;
  double phi_h = 0.0;
  double K = 0.0;
  /// Coordinate gradient of K.
  Point2 gradK;
  /// |grad K| in the metric.
  double gradK_norm = 0.0;
  /// <grad K, grad u>.
  double gradK_u = 0.0;
  /// <grad K, star grad u>.
  double gradK_star = 0.0;
};

/// Throws CriticalPointError when the coordinate gradient is below 1e-8.
CurvatureSample curvature_sample(const HarmonicField& u, const Chart& chart, Point2 p);
double level_curvature_k(const HarmonicField& u, const Chart& chart, Point2 p);
double steepest_descent_curvature_h(const HarmonicField& u, const Chart& chart, Point2 p);

enum class LaplacianMode {
  /// Central differences at h and 2h combined as (4 D(h) - D(2h)) / 3.
  richardson,
  /// Plain central differences, second order in the step.
  central,
  /// Outer derivatives taken from the order-4 jet of u.
  exact_jet,
};

struct StencilOptions {
  LaplacianMode mode = LaplacianMode::richardson;
  double step = 1e-3;
};

/// 1e-4 (1 + |local|).
double fd_tolerance(double local);

/// Delta phi_k + 2 K phi_k - <grad K, grad u> / |grad u|^2 with phi_k = k / |grad u|.
/// Throws DomainError when the stencil leaves the chart.
double pde1_residual(const HarmonicField& u, const Chart& chart, Point2 p, const StencilOptions& options = {});
/// Delta phi_h + 2 K phi_h + <grad K, star grad u> / |grad u|^2 with phi_h = h / |grad u|.
double pde1_star_residual(const HarmonicField& u, const Chart& chart, Point2 p, const StencilOptions& options = {});

struct GapResult {
  double gap = 0.0;
  /// |grad phi|^2 / phi^2.
  double theoretical_gap = 0.0;
};

/// -Delta ln|k| - K + <grad K, grad u> / (k |grad u|).
/// Throws PreconditionError when |k| <= 1e-6 on the stencil.
GapResult pde2_gap(const HarmonicField& u, const Chart& chart, Point2 p, const StencilOptions& options = {});
/// -Delta ln|h| - K - <grad K, star grad u> / (h |grad u|).
GapResult pde2_star_gap(const HarmonicField& u, const Chart& chart, Point2 p, const StencilOptions& options = {});

enum class Quantity { k, h, phi_k, phi_h, ln_abs_k, ln_abs_h };

/// Claims checked by the audit.
///   boundary_minimum:       K >= 0 and <grad K, grad u> <= 0 (for h: <grad K, star grad u> >= 0)
///                           force the minimum of |k| (|h|) onto the boundary.
///   case1 .. case4:         with P = <grad K, grad u> (for h: -<grad K, star grad u>),
///                           case1 K <= 0, P >= 0: a non-negative maximum of phi is on the boundary;
///                           case2 K <= 0, P <= 0: a non-positive minimum;
///                           case3 K >= 0, P >= 0: a non-positive maximum;
///                           case4 K >= 0, P <= 0: a non-negative minimum.
///   interior_minimum_bound: at an interior minimum y of k (h), k(y) <= |grad K| / K.
enum class CorollaryCase { boundary_minimum, case1, case2, case3, case4, interior_minimum_bound };

enum class Verdict { pass, vacuous, fail, hypotheses_unmet };

std::string to_string(Quantity q);
std::string to_string(CorollaryCase c);
std::string to_string(Verdict v);
Quantity parse_quantity(const std::string& s);
CorollaryCase parse_corollary_case(const std::string& s);

struct Extremum {
  Point2 point;
  double value = 0.0;
};

struct HypothesisFlags {
  double K_min = 0.0;
  double K_max = 0.0;
  double gradK_u_min = 0.0;
  double gradK_u_max = 0.0;
  double gradK_star_min = 0.0;
  double gradK_star_max = 0.0;
  /// Smallest |k| (or |h| for h-quantities) over the samples.
  double curvature_min_abs = 0.0;

  bool K_nonnegative() const;
  bool K_nonpositive() const;
  bool gradK_u_nonnegative() const;
  bool gradK_u_nonpositive() const;
  bool gradK_star_nonnegative() const;
  bool gradK_star_nonpositive() const;
  bool curvature_nonzero() const;
};

struct AuditOptions {
  int rows = 256;
  int columns = 256;
  /// Samples on each boundary component.
  int boundary_samples = 1024;
};

struct PrincipleAuditReport {
  Quantity quantity = Quantity::k;
  CorollaryCase corollary_case = CorollaryCase::boundary_minimum;
  HypothesisFlags hypothesis_flags;
  /// Interior and boundary extrema of the kind the case speaks about (minimum or maximum).
  Extremum interior_extremum;
  Extremum boundary_extremum;
  bool extremum_is_max = false;
  Verdict verdict = Verdict::fail;
  double tolerance = 0.0;
  double grid_spacing = 0.0;
  double lipschitz = 0.0;
};

/// Dense-grid audit of one corollary on a closed sub-region.
/// region is an annulus (any center) for conformal charts or a band for warped charts;
/// the audited quantity for boundary_minimum is |k| (|h|), or ln|k| (ln|h|) when requested.
/// Throws CriticalPointError when a sample is critical, DomainError when the region leaves the chart.
PrincipleAuditReport principle_audit(const HarmonicField& u, const Chart& chart, const Domain& region,
                                     Quantity quantity, CorollaryCase corollary_case,
                                     const AuditOptions& options = {});
/// Serial reference; identical to principle_audit.
PrincipleAuditReport principle_audit_serial(const HarmonicField& u, const Chart& chart, const Domain& region,
                                            Quantity quantity, CorollaryCase corollary_case,
                                            const AuditOptions& options = {});

/// Keys in the order quantity, case, hypothesis_flags, interior_extremum, boundary_extremum, verdict, tolerance.
nlohmann::ordered_json to_json(const PrincipleAuditReport& report);

enum class SlopeCase { nonpositive_curvature, nonnegative_curvature, none };

struct SlopeBoundReport {
  /// Which hypothesis set holds: K <= 0 and <grad K, grad u> <= 0, or K >= 0 and k >= 0.
  SlopeCase slope_case = SlopeCase::none;
  std::string diagnostic;
  /// Infimum of k / |grad u| over the two extreme level curves of the profile.
  double boundary_inf_phi_k = 0.0;
  double bound = 0.0;
  std::vector<double> t;
  /// (ln L)' = L' / L per level.
  std::vector<double> slope;
  /// |L' + integral of k / |grad u|| per level.
  std::vector<double> identity_residual;
  double max_identity_residual = 0.0;
  bool bound_holds = false;
  bool identity_holds = false;
};

/// Checks (ln L)' <= max(-inf phi_k, 0) (first case) or <= -inf phi_k (second case) on every
/// profile level, with the region bounded by the first and last levels. When neither
/// hypothesis set holds the bound is skipped and the diagnostic says why; the identity
/// L' = -integral of k / |grad u| is checked in every case.
SlopeBoundReport logL_slope_bound(const HarmonicField& u, const Chart& chart, const levelsets::LengthProfile& profile,
                                  int boundary_samples = 1024, int n_samples = 512);

}  // namespace levelflow::curvature_flow
