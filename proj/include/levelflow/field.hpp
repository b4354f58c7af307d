#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>

#include "levelflow/jet.hpp"

namespace levelflow {

/// Chart coordinates (x, y); for warped charts x is t and y is theta.
struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Point2, Point2) = default;

  double norm() const { return std::hypot(x, y); }
  bool finite() const { return std::isfinite(x) && std::isfinite(y); }
};

inline double distance(Point2 a, Point2 b) { return (a - b).norm(); }

enum class DerivativeSource { closed_form, nested_finite_difference };

/// Order-4 jet of a field at a point: value, gradient, Hessian, third and
/// fourth derivatives.
using FieldJet = Jet<4>;

/// Immutable real field on chart coordinates.
///
/// Closed-form fields are written once as a generic expression over jets and
/// get exact derivatives by forward-mode Taylor arithmetic; sampled fields
/// fall back to nested central differences with one Richardson level.
class ScalarField {
 public:
  using ValueFn = std::function<double(Point2)>;
  using JetFn = std::function<FieldJet(Point2)>;

  ScalarField() = default;

  /// `expr(x, y)` must be callable with Jet<0> and Jet<4> arguments.
  template <class Expr>
  static ScalarField analytic(std::string name, Expr expr) {
    ScalarField f;
    f.name_ = std::move(name);
    f.source_ = DerivativeSource::closed_form;
    f.value_ = [expr](Point2 p) {
      return expr(Jet<0>::variable(p.x, 0), Jet<0>::variable(p.y, 1)).value();
    };
    f.jet_ = [expr](Point2 p) { return expr(Jet<4>::variable(p.x, 0), Jet<4>::variable(p.y, 1)); };
    return f;
  }

  static ScalarField constant(double c);

  /// Field known only through point values; derivatives by nested central
  /// differences with the given step and one Richardson extrapolation level.
  static ScalarField sampled(std::string name, ValueFn f, double step);

  double value(Point2 p) const { return value_(p); }
  double operator()(Point2 p) const { return value_(p); }
  FieldJet jet(Point2 p) const { return jet_(p); }

  DerivativeSource source() const { return source_; }
  const std::string& name() const { return name_; }
  bool empty() const { return !value_; }

  friend ScalarField operator+(const ScalarField& a, const ScalarField& b);
  friend ScalarField operator*(double s, const ScalarField& a);

 private:
  std::string name_;
  DerivativeSource source_ = DerivativeSource::closed_form;
  ValueFn value_;
  JetFn jet_;
};

/// Finite-difference derivative table of `f` at `p`: every partial of total
/// order <= 4, second-order central stencils at steps h and h/2 combined by
/// one Richardson level.
FieldJet finite_difference_jet(const ScalarField::ValueFn& f, Point2 p, double step);

/// u = a + b ln|z - center| in a conformal chart.
struct RadialLogForm {
  Point2 center;
  double a = 0.0;
  double b = 1.0;

  /// Radius of the level circle {u = t}.
  double radius_of(double t) const { return std::exp((t - a) / b); }
};

/// u = u(t) on a warped chart (independent of theta).
struct WarpedRadialForm {
  /// Strictly monotone profile of u in t.
  std::function<double(double)> profile;
  /// Inverse of `profile` on its range, when available in closed form.
  std::function<double(double)> inverse;
};

enum class HarmonicProvenance { annulus_dirichlet, catalog, numeric_grid, combination };

/// A ScalarField known to be harmonic for the chart it is paired with.
class HarmonicField {
 public:
  HarmonicField() = default;
  HarmonicField(ScalarField field, HarmonicProvenance provenance, std::string label)
      : field_(std::move(field)), provenance_(provenance), label_(std::move(label)) {}

  const ScalarField& field() const { return field_; }
  double value(Point2 p) const { return field_.value(p); }
  FieldJet jet(Point2 p) const { return field_.jet(p); }

  HarmonicProvenance provenance() const { return provenance_; }
  const std::string& label() const { return label_; }

  const std::optional<RadialLogForm>& radial() const { return radial_; }
  const std::optional<WarpedRadialForm>& warped_radial() const { return warped_radial_; }
  HarmonicField& with_radial(RadialLogForm r) {
    radial_ = r;
    return *this;
  }
  HarmonicField& with_warped_radial(WarpedRadialForm r) {
    warped_radial_ = std::move(r);
    return *this;
  }

  /// Boundary values (t1 on the inner boundary, t2 on the outer) when the
  /// field solves an annulus Dirichlet problem.
  const std::optional<std::pair<double, double>>& boundary_values() const { return boundary_values_; }
  HarmonicField& with_boundary_values(double t1, double t2) {
    boundary_values_ = std::make_pair(t1, t2);
    return *this;
  }

  /// a*u + b*v (harmonic for the same chart).
  static HarmonicField combine(double a, const HarmonicField& u, double b, const HarmonicField& v);

 private:
  ScalarField field_;
  HarmonicProvenance provenance_ = HarmonicProvenance::catalog;
  std::string label_;
  std::optional<RadialLogForm> radial_;
  std::optional<WarpedRadialForm> warped_radial_;
  std::optional<std::pair<double, double>> boundary_values_;
};

}  // namespace levelflow
