#include "levelflow/geometry.hpp"

#include <cmath>

#include "levelflow/calculus.hpp"
#include "levelflow/errors.hpp"

namespace levelflow::geometry {

namespace {

struct LocalJets {
  FieldJet u;
  MetricJets<4> metric;
};

LocalJets local_jets(const ScalarField& u, const Chart& chart, Point2 p) {
  return {u.jet(p), chart.metric(p)};
}

void require_regular(const FieldJet& u, Point2 p) {
  const double g0 = std::hypot(u.coeff(1, 0), u.coeff(0, 1));
  if (!(g0 >= kCriticalThreshold)) {
    throw CriticalPointError("gradient vanishes at (" + std::to_string(p.x) + ", " + std::to_string(p.y) + ")");
  }
}

}  // namespace

double gauss_curvature(const Chart& chart, Point2 p) { return chart.curvature(p).value(); }

Point2 grad_gauss_curvature(const Chart& chart, Point2 p) {
  const Jet<2> K = chart.curvature(p);
  return {K.coeff(1, 0), K.coeff(0, 1)};
}

MetricPointData metric_point_data(const Chart& chart, Point2 p) {
  const auto m = chart.metric(p);
  const Jet<2> K = chart.curvature(p);
  MetricPointData d;
  const double E = m.E.value(), G = m.G.value();
  d.conf = std::sqrt(E * G);
  d.K = K.value();
  d.gradK = {K.coeff(1, 0), K.coeff(0, 1)};
  const double Ex = m.E.coeff(1, 0), Ey = m.E.coeff(0, 1);
  const double Gx = m.G.coeff(1, 0), Gy = m.G.coeff(0, 1);
  d.christoffels = {Ex / (2 * E), Ey / (2 * E), -Gx / (2 * E), -Ey / (2 * G), Gx / (2 * G), Gy / (2 * G)};
  return d;
}

double metric_gradient_norm(const ScalarField& u, const Chart& chart, Point2 p) {
  const auto m = chart.metric(p);
  const FieldJet uj = u.jet(p);
  const double ux = uj.coeff(1, 0), uy = uj.coeff(0, 1);
  return std::sqrt(ux * ux / m.E.value() + uy * uy / m.G.value());
}

double metric_gradient_norm(const HarmonicField& u, const Chart& chart, Point2 p) {
  return metric_gradient_norm(u.field(), chart, p);
}

double laplacian_residual(const ScalarField& u, const Chart& chart, Point2 p) {
  const auto [uj, m] = local_jets(u, chart, p);
  return laplacian(uj, m.truncated<3>()).value();
}

double identity_scale(const HarmonicField& u, const Chart& chart, Point2 p) {
  const auto [uj, m] = local_jets(u.field(), chart, p);
  return 1.0 + hessian_norm_sq(uj, m.truncated<3>()).value();
}

double kato_residual(const HarmonicField& u, const Chart& chart, Point2 p) {
  const auto [uj, m] = local_jets(u.field(), chart, p);
  require_regular(uj, p);
  const auto m3 = m.truncated<3>();
  const Jet<3> g = gradient_norm(uj, m3);
  const double grad_g_sq = gradient_norm_sq(partials(g), m.truncated<2>()).value();
  return hessian_norm_sq(uj, m3).value() - 2.0 * grad_g_sq;
}

double bochner_residual(const HarmonicField& u, const Chart& chart, Point2 p) {
  const auto [uj, m] = local_jets(u.field(), chart, p);
  require_regular(uj, p);
  const auto m3 = m.truncated<3>();
  const Jet<3> half_g2 = 0.5 * gradient_norm_sq(partials(uj), m3);
  const double lap = laplacian(half_g2, m.truncated<2>()).value();
  const double K = chart.curvature(p).value();
  return lap - hessian_norm_sq(uj, m3).value() - 2.0 * K * half_g2.value();
}

double log_gradient_residual(const HarmonicField& u, const Chart& chart, Point2 p) {
  const auto [uj, m] = local_jets(u.field(), chart, p);
  require_regular(uj, p);
  const Jet<3> log_g = 0.5 * log(gradient_norm_sq(partials(uj), m.truncated<3>()));
  return laplacian(log_g, m.truncated<2>()).value() - chart.curvature(p).value();
}

}  // namespace levelflow::geometry
