#pragma once

#include <limits>
#include <string>
#include <vector>

#include "levelflow/calculus.hpp"
#include "levelflow/field.hpp"

namespace levelflow {

enum class DomainKind { annulus, disc, half_plane, band };

/// Coordinate domain of a chart.
///
/// annulus:    inner < |z - center| < outer (inner = 0 is a punctured disc,
///             outer = inf the punctured plane)
/// disc:       |z - center| < outer
/// half_plane: y > 0
/// band:       inner < x < outer, y periodic with period 2 pi (warped charts)
struct Domain {
  DomainKind kind = DomainKind::annulus;
  Point2 center;
  double inner = 1.0;
  double outer = 2.0;

  static Domain annulus(double inner, double outer, Point2 center = {});
  static Domain disc(double radius, Point2 center = {});
  static Domain half_plane();
  static Domain band(double t_min, double t_max);

  bool contains(Point2 p) const;
  /// Distance from p to the domain boundary (inf when unbounded in all directions).
  double boundary_distance(Point2 p) const;
};

enum class ChartKind { conformal, warped };

/// A coordinate representation of a surface piece.
///
/// conformal: g = e^{2 phi} (dx^2 + dy^2)
/// warped:    g = dt^2 + w(t)^2 dtheta^2, coordinates (x, y) = (t, theta)
class Chart {
 public:
  static constexpr double kSingularRadius = 1e-9;

  static Chart conformal(ScalarField factor, Domain domain, std::vector<Point2> singular_points = {});
  static Chart warped(ScalarField warp, double t_min, double t_max);

  ChartKind kind() const { return kind_; }
  const Domain& domain() const { return domain_; }
  /// phi for conformal charts, w for warped charts.
  const ScalarField& factor() const { return factor_; }
  const std::vector<Point2>& singular_points() const { return singular_; }
  const std::string& description() const { return description_; }
  Chart& with_description(std::string d) {
    description_ = std::move(d);
    return *this;
  }

  bool contains(Point2 p) const { return domain_.contains(p); }
  /// Throws DomainError outside the domain and SingularityError near a
  /// declared singular point.
  void check_point(Point2 p) const;
  /// Distance to the nearest declared singular point (inf if none).
  double singular_distance(Point2 p) const;

  MetricJets<4> metric(Point2 p) const;
  /// Gaussian curvature as an order-2 jet.
  Jet<2> curvature(Point2 p) const;
  /// sqrt(E x'^2 + G y'^2) for the tangent (x', y') at p.
  double length_element(Point2 p, Point2 tangent) const;
  /// sqrt(E G) at p.
  double area_element(Point2 p) const;

 private:
  ChartKind kind_ = ChartKind::conformal;
  Domain domain_;
  ScalarField factor_;
  std::vector<Point2> singular_;
  std::string description_;
};

/// Closed-form conformal factors and warps used by the test corpus and CLI.
namespace factors {

/// phi = c (flat metric).
ScalarField flat(double c = 0.0);
/// phi = ln(1 + c r^2), i.e. lambda = e^phi = 1 + c r^2; K(0) = -4c.
ScalarField quadratic(double c);
/// phi = ln(2 / (1 + r^2)); the round unit sphere, K = 1.
ScalarField stereographic();
/// phi = -ln y; the hyperbolic upper half-plane, K = -1.
ScalarField half_plane();
/// phi = ln|z - center|; singular at center.
ScalarField log_distance(Point2 center);
/// w(t) = scale * cosh t; K = -1.
ScalarField warp_cosh(double scale);

}  // namespace factors

/// Warped cylinder dt^2 + (ln(lambda)/2pi)^2 cosh^2 t dtheta^2 on t_min < t < t_max.
Chart hyperbolic_cylinder(double lambda, double t_min, double t_max);

}  // namespace levelflow
