#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "levelflow/chart.hpp"
#include "levelflow/field.hpp"

namespace levelflow::harmonic {

/// Dirichlet data on the annulus 1 < |z| < R: u = t1 on |z| = 1, u = t2 on |z| = R.
struct DirichletSpec {
  double R = 2.0;
  double t1 = 0.0;
  double t2 = 1.0;
};

/// u(z) = t1 + (t2 - t1) ln|z| / ln R.
HarmonicField solve_annulus_dirichlet(const DirichletSpec& spec);

/// Closed-form harmonic fields with exact derivatives to order 4.
///
///   "log"           [a]     u = a ln|z|
///   "re_poly"       [n]     u = Re z^n
///   "im_poly"       [n]     u = Im z^n
///   "re_z_plus_inv" [a]     u = Re(z + a/z)
///   "arg"           []      u = arg z (principal branch, cut on the negative real axis)
///   "log_plus_re"   [a, b]  u = a ln|z| + b Re z
///   "warped_arctan" []      u(t, theta) = 2 arctan(e^t), harmonic on dt^2 + c^2 cosh^2 t dtheta^2
HarmonicField catalog_field(std::string_view name, std::span<const double> params = {});

/// Names accepted by catalog_field.
std::vector<std::string> catalog_names();

struct SeedFailure {
  Point2 seed;
  std::string reason;
};

struct CriticalPointReport {
  std::vector<Point2> points;
  /// Minimum of |grad_0 u| over the scan grid.
  double min_grid_gradient = 0.0;
  int seeds = 0;
  std::vector<SeedFailure> failures;
};

/// Grid scan of |grad_0 u|^2 minima followed by damped Newton on grad_0 u.
/// Supports annulus, disc and band domains.
CriticalPointReport critical_points(const HarmonicField& u, const Chart& chart, int resolution);

struct GridSize {
  int n_r = 64;
  int n_theta = 128;
};

struct NumericAnnulusSolution {
  HarmonicField field;
  GridSize grid;
  double R = 2.0;
  /// Nodal values, row-major in (radius index, angle index).
  std::vector<double> values;
  int iterations = 0;
  double residual = 0.0;

  double radius(int i) const { return 1.0 + (R - 1.0) * i / (grid.n_r - 1); }
  double angle(int j) const;
  double at(int i, int j) const { return values[static_cast<std::size_t>(i) * grid.n_theta + j]; }
  /// Max over grid nodes of |u_numeric - reference|.
  double max_nodal_error(const HarmonicField& reference) const;
};

/// Second-order five-point polar-grid discretisation of lap_0 u = 0 solved by SOR.
NumericAnnulusSolution solve_annulus_numeric(const DirichletSpec& spec, GridSize grid);

}  // namespace levelflow::harmonic
