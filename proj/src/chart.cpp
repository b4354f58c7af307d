#include "levelflow/chart.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "levelflow/errors.hpp"

namespace levelflow {

Domain Domain::annulus(double inner, double outer, Point2 center) {
  if (!(inner >= 0.0) || !(outer > inner)) throw DomainError("annulus requires 0 <= inner < outer");
  return {DomainKind::annulus, center, inner, outer};
}

Domain Domain::disc(double radius, Point2 center) {
  if (!(radius > 0.0)) throw DomainError("disc requires a positive radius");
  return {DomainKind::disc, center, 0.0, radius};
}

Domain Domain::half_plane() { return {DomainKind::half_plane, {}, 0.0, std::numeric_limits<double>::infinity()}; }

Domain Domain::band(double t_min, double t_max) {
  if (!(t_max > t_min)) throw DomainError("band requires t_min < t_max");
  return {DomainKind::band, {}, t_min, t_max};
}

bool Domain::contains(Point2 p) const {
  if (!p.finite()) return false;
  switch (kind) {
    case DomainKind::annulus: {
      const double r = distance(p, center);
      return r > inner && r < outer;
    }
    case DomainKind::disc:
      return distance(p, center) < outer;
    case DomainKind::half_plane:
      return p.y > 0.0;
    case DomainKind::band:
      return p.x > inner && p.x < outer;
  }
  return false;
}

double Domain::boundary_distance(Point2 p) const {
  switch (kind) {
    case DomainKind::annulus: {
      const double r = distance(p, center);
      return std::min(r - inner, outer - r);
    }
    case DomainKind::disc:
      return outer - distance(p, center);
    case DomainKind::half_plane:
      return p.y;
    case DomainKind::band:
      return std::min(p.x - inner, outer - p.x);
  }
  return 0.0;
}

Chart Chart::conformal(ScalarField factor, Domain domain, std::vector<Point2> singular_points) {
  if (domain.kind == DomainKind::band) throw DomainError("conformal charts use annulus or half-plane domains");
  Chart c;
  c.kind_ = ChartKind::conformal;
  c.domain_ = domain;
  c.factor_ = std::move(factor);
  c.singular_ = std::move(singular_points);
  c.description_ = "conformal(" + c.factor_.name() + ")";
  return c;
}

Chart Chart::warped(ScalarField warp, double t_min, double t_max) {
  Chart c;
  c.kind_ = ChartKind::warped;
  c.domain_ = Domain::band(t_min, t_max);
  c.factor_ = std::move(warp);
  c.description_ = "warped(" + c.factor_.name() + ")";
  return c;
}

double Chart::singular_distance(Point2 p) const {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& s : singular_) d = std::min(d, distance(p, s));
  return d;
}

void Chart::check_point(Point2 p) const {
  if (singular_distance(p) <= kSingularRadius) {
    std::ostringstream os;
    os << "evaluation at declared singular point (" << p.x << ", " << p.y << ")";
    throw SingularityError(os.str());
  }
  if (!contains(p)) {
    std::ostringstream os;
    os << "point (" << p.x << ", " << p.y << ") outside chart domain";
    throw DomainError(os.str());
  }
}

MetricJets<4> Chart::metric(Point2 p) const {
  check_point(p);
  const FieldJet f = factor_.jet(p);
  if (kind_ == ChartKind::conformal) {
    const FieldJet e = exp(2.0 * f);
    return {e, e};
  }
  if (!(f.value() > 0.0)) throw DomainError("warp must be positive");
  return {FieldJet(1.0), f * f};
}

Jet<2> Chart::curvature(Point2 p) const {
  check_point(p);
  const FieldJet f = factor_.jet(p);
  const Jet<2> fxx = d_dx(d_dx(f));
  if (kind_ == ChartKind::conformal) {
    const Jet<2> lap0 = fxx + d_dy(d_dy(f));
    return -exp(-2.0 * truncate<2>(f)) * lap0;
  }
  return -fxx / truncate<2>(f);
}

double Chart::length_element(Point2 p, Point2 tangent) const {
  const double f = factor_.value(p);
  if (kind_ == ChartKind::conformal) return std::exp(f) * tangent.norm();
  return std::sqrt(tangent.x * tangent.x + f * f * tangent.y * tangent.y);
}

double Chart::area_element(Point2 p) const {
  const double f = factor_.value(p);
  return kind_ == ChartKind::conformal ? std::exp(2.0 * f) : f;
}

namespace factors {

ScalarField flat(double c) { return ScalarField::constant(c); }

ScalarField quadratic(double c) {
  std::ostringstream os;
  os << "quadratic(" << c << ")";
  return ScalarField::analytic(os.str(), [c](const auto& x, const auto& y) { return log(1.0 + c * (x * x + y * y)); });
}

ScalarField stereographic() {
  return ScalarField::analytic("stereographic",
                               [](const auto& x, const auto& y) { return std::log(2.0) - log(1.0 + x * x + y * y); });
}

ScalarField half_plane() {
  return ScalarField::analytic("half_plane", [](const auto&, const auto& y) { return -log(y); });
}

ScalarField log_distance(Point2 center) {
  return ScalarField::analytic("log_distance", [center](const auto& x, const auto& y) {
    const auto dx = x - center.x;
    const auto dy = y - center.y;
    return 0.5 * log(dx * dx + dy * dy);
  });
}

ScalarField warp_cosh(double scale) {
  std::ostringstream os;
  os << "cosh(" << scale << ")";
  return ScalarField::analytic(os.str(), [scale](const auto& t, const auto&) { return scale * cosh(t); });
}

}  // namespace factors

Chart hyperbolic_cylinder(double lambda, double t_min, double t_max) {
  if (!(lambda > 1.0)) throw DomainError("hyperbolic cylinder requires lambda > 1");
  Chart c = Chart::warped(factors::warp_cosh(std::log(lambda) / (2.0 * std::numbers::pi)), t_min, t_max);
  c.with_description("hyperbolic_cylinder");
  return c;
}

}  // namespace levelflow
