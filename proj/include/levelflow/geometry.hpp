#pragma once

#include <array>

#include "levelflow/chart.hpp"
#include "levelflow/field.hpp"

namespace levelflow::geometry {

/// Coordinate gradients below this norm count as critical points.
inline constexpr double kCriticalThreshold = 1e-8;

struct MetricPointData {
  /// sqrt(E G); equals e^{2 phi} on conformal charts.
  double conf = 1.0;
  double K = 0.0;
  /// Coordinate components (K_x, K_y).
  Point2 gradK;
  /// G^x_xx, G^x_xy, G^x_yy, G^y_xx, G^y_xy, G^y_yy.
  std::array<double, 6> christoffels{};
};

/// conformal: K = -e^{-2 phi} lap_0 phi; warped: K = -w''/w.
double gauss_curvature(const Chart& chart, Point2 p);

/// Coordinate gradient of K.
Point2 grad_gauss_curvature(const Chart& chart, Point2 p);

MetricPointData metric_point_data(const Chart& chart, Point2 p);

/// |grad u|_g; e^{-phi} |grad_0 u| on conformal charts.
double metric_gradient_norm(const HarmonicField& u, const Chart& chart, Point2 p);
double metric_gradient_norm(const ScalarField& u, const Chart& chart, Point2 p);

/// Metric Laplacian of u at p (zero for harmonic fields).
double laplacian_residual(const ScalarField& u, const Chart& chart, Point2 p);

/// 1 + |nabla^2 u|_g^2, the scale of the identity-residual tolerance contract.
double identity_scale(const HarmonicField& u, const Chart& chart, Point2 p);

/// |nabla^2 u|^2 - 2 |grad |grad u||^2 (refined Kato equality in dimension 2).
double kato_residual(const HarmonicField& u, const Chart& chart, Point2 p);

/// lap(|grad u|^2 / 2) - |nabla^2 u|^2 - K |grad u|^2.
double bochner_residual(const HarmonicField& u, const Chart& chart, Point2 p);

/// lap(log |grad u|) - K.
double log_gradient_residual(const HarmonicField& u, const Chart& chart, Point2 p);

}  // namespace levelflow::geometry
