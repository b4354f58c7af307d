#include "levelflow/levelsets.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/tools/toms748_solve.hpp>

#include "levelflow/calculus.hpp"
#include "levelflow/errors.hpp"
#include "levelflow/geometry.hpp"
#include "levelflow/harmonic.hpp"
#include "levelflow/quadrature.hpp"

namespace levelflow::levelsets {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kRayScan = 64;

std::string fmt_point(Point2 p) {
  std::ostringstream os;
  os << "(" << p.x << ", " << p.y << ")";
  return os.str();
}

double root_in(const std::function<double(double)>& g, double lo, double hi, double glo, double ghi) {
  std::uintmax_t iters = 200;
  const auto [a, b] = boost::math::tools::toms748_solve(g, lo, hi, glo, ghi,
                                                        boost::math::tools::eps_tolerance<double>(52), iters);
  return std::abs(g(a)) <= std::abs(g(b)) ? a : b;
}

Point2 coordinate_gradient(const HarmonicField& u, Point2 p) {
  const Jet<1> j = truncate<1>(u.jet(p));
  return {j.coeff(1, 0), j.coeff(0, 1)};
}

void require_regular(Point2 grad, Point2 p) {
  if (!(grad.norm() >= geometry::kCriticalThreshold))
    throw CriticalPointError("level passes within the critical threshold at " + fmt_point(p));
}

/// Radial interval (rho0, rho1) about the domain centre usable for ray scans.
std::optional<std::pair<double, double>> ray_interval(const Domain& d) {
  if (d.kind != DomainKind::annulus && d.kind != DomainKind::disc) return std::nullopt;
  if (!std::isfinite(d.outer)) return std::nullopt;
  const double lo = d.kind == DomainKind::disc ? 0.0 : d.inner;
  const double inset = 1e-9 * (d.outer - lo);
  return std::make_pair(lo + inset, d.outer - inset);
}

LevelCurve exact_circle(double t, Point2 c, double r, int n, const Chart& chart) {
  LevelCurve curve;
  curve.level = t;
  curve.method = ExtractionMethod::radial_circle;
  curve.circle = Circle{c, r};
  curve.samples.reserve(static_cast<std::size_t>(n));
  const double dth = kTwoPi / n;
  for (int i = 0; i < n; ++i) {
    const double th = dth * i;
    const Point2 p{c.x + r * std::cos(th), c.y + r * std::sin(th)};
    if (!chart.contains(p)) throw TopologyError("level circle of radius " + std::to_string(r) + " leaves the domain");
    curve.samples.push_back({p, {-r * std::sin(th), r * std::cos(th)}, dth});
  }
  return curve;
}

LevelCurve warped_circle(const HarmonicField& u, const Chart& chart, double t, int n) {
  if (!u.warped_radial()) throw PreconditionError("warped charts support radial fields only");
  const auto& profile = u.warped_radial()->profile;
  const Domain& d = chart.domain();
  const double a = d.inner, b = d.outer;
  const double fa = profile(a) - t, fb = profile(b) - t;
  if (!(fa * fb < 0.0)) throw DomainError("level " + std::to_string(t) + " is not attained inside the band");
  const double r = root_in([&](double x) { return profile(x) - t; }, a, b, fa, fb);
  LevelCurve curve;
  curve.level = t;
  curve.method = ExtractionMethod::warped_circle;
  const double dth = kTwoPi / n;
  for (int i = 0; i < n; ++i) curve.samples.push_back({{r, dth * i}, {0.0, 1.0}, dth});
  return curve;
}

/// Sign changes of u - t along the ray at angle th; returns the bracket when there is exactly one.
std::optional<std::pair<double, double>> ray_bracket(const HarmonicField& u, const Chart& chart, Point2 c, double th,
                                                     double r0, double r1, double t) {
  const Point2 e{std::cos(th), std::sin(th)};
  int changes = 0;
  std::pair<double, double> bracket;
  double prev_r = r0;
  double prev = u.value(c + r0 * e) - t;
  for (int k = 1; k <= kRayScan; ++k) {
    const double r = r0 + (r1 - r0) * k / kRayScan;
    const Point2 p = c + r * e;
    if (chart.singular_distance(p) <= Chart::kSingularRadius) return std::nullopt;
    const double v = u.value(p) - t;
    if ((prev < 0.0) != (v < 0.0) || v == 0.0) {
      ++changes;
      bracket = {prev_r, r};
    }
    prev = v;
    prev_r = r;
  }
  if (changes != 1) return std::nullopt;
  return bracket;
}

std::optional<LevelCurve> star_shaped(const HarmonicField& u, const Chart& chart, double t, int n) {
  const auto interval = ray_interval(chart.domain());
  if (!interval) return std::nullopt;
  const auto [r0, r1] = *interval;
  const Point2 c = chart.domain().center;
  LevelCurve curve;
  curve.level = t;
  curve.method = ExtractionMethod::star_shaped;
  const double dth = kTwoPi / n;
  for (int i = 0; i < n; ++i) {
    const double th = dth * i;
    const auto bracket = ray_bracket(u, chart, c, th, r0, r1, t);
    if (!bracket) return std::nullopt;
    const Point2 e{std::cos(th), std::sin(th)};
    auto g = [&](double r) { return u.value(c + r * e) - t; };
    const double r = root_in(g, bracket->first, bracket->second, g(bracket->first), g(bracket->second));
    const Point2 p = c + r * e;
    const Point2 grad = coordinate_gradient(u, p);
    require_regular(grad, p);
    const Point2 eperp{-e.y, e.x};
    const double u_r = grad.x * e.x + grad.y * e.y;
    const double u_th = r * (grad.x * eperp.x + grad.y * eperp.y);
    if (std::abs(u_r) < geometry::kCriticalThreshold) return std::nullopt;
    const double dr = -u_th / u_r;
    curve.samples.push_back({p, dr * e + r * eperp, dth});
  }
  return curve;
}

Point2 correct_onto_level(const HarmonicField& u, Point2 p, double t) {
  for (int it = 0; it < 20; ++it) {
    const double v = u.value(p) - t;
    const Point2 g = coordinate_gradient(u, p);
    require_regular(g, p);
    if (std::abs(v) <= 1e-14 * (1.0 + std::abs(t))) break;
    p = p - (v / (g.x * g.x + g.y * g.y)) * g;
  }
  return p;
}

Point2 unit_tangent(const HarmonicField& u, Point2 p) {
  const Point2 g = coordinate_gradient(u, p);
  require_regular(g, p);
  const double n = g.norm();
  return {-g.y / n, g.x / n};
}

/// A critical point on the level within a few steps of p, found by Newton on grad u.
/// Tracing steps over isolated saddles without ever seeing |grad u| below the threshold.
std::optional<Point2> nearby_critical_point(const HarmonicField& u, Point2 p, double t, double ds) {
  const Jet<2> j = truncate<2>(u.jet(p));
  const double hess = std::hypot(j.derivative(2, 0), j.derivative(1, 1), j.derivative(0, 2));
  if (std::hypot(j.coeff(1, 0), j.coeff(0, 1)) > 4.0 * ds * hess) return std::nullopt;
  Point2 x = p;
  for (int it = 0; it < 30; ++it) {
    const Jet<2> k = truncate<2>(u.jet(x));
    const double gx = k.coeff(1, 0), gy = k.coeff(0, 1);
    const double hxx = k.derivative(2, 0), hxy = k.derivative(1, 1), hyy = k.derivative(0, 2);
    const double det = hxx * hyy - hxy * hxy;
    if (std::abs(det) < 1e-300) return std::nullopt;
    x = x - Point2{(hyy * gx - hxy * gy) / det, (hxx * gy - hxy * gx) / det};
    if (distance(x, p) > 8.0 * ds) return std::nullopt;
    if (coordinate_gradient(u, x).norm() < 1e-12 * (1.0 + hess)) {
      if (std::abs(u.value(x) - t) <= 1e-8 * (1.0 + std::abs(t))) return x;
      return std::nullopt;
    }
  }
  return std::nullopt;
}

LevelCurve traced(const HarmonicField& u, const Chart& chart, double t, int n) {
  const auto interval = ray_interval(chart.domain());
  if (!interval) throw PreconditionError("level tracing needs a bounded annulus or disc chart");
  const auto [r0, r1] = *interval;
  const Point2 c = chart.domain().center;

  // Any sign change along a ray gives a starting point.
  std::optional<Point2> start;
  for (int i = 0; i < 256 && !start; ++i) {
    const double th = kTwoPi * i / 256;
    const Point2 e{std::cos(th), std::sin(th)};
    double prev_r = r0, prev = u.value(c + r0 * e) - t;
    for (int k = 1; k <= kRayScan; ++k) {
      const double r = r0 + (r1 - r0) * k / kRayScan;
      const double v = u.value(c + r * e) - t;
      if ((prev < 0.0) != (v < 0.0)) {
        auto g = [&](double x) { return u.value(c + x * e) - t; };
        start = c + root_in(g, prev_r, r, prev, v) * e;
        break;
      }
      prev = v;
      prev_r = r;
    }
  }
  if (!start) throw DomainError("level " + std::to_string(t) + " is empty in the chart domain");

  const double ds = kTwoPi * 0.5 * (r0 + r1) / n;
  std::vector<Point2> pts{*start};
  double travelled = 0.0;
  const int max_steps = 100 * n;
  for (int step = 0; step < max_steps; ++step) {
    const Point2 p = pts.back();
    const Point2 mid = p + 0.5 * ds * unit_tangent(u, p);
    Point2 q = p + ds * unit_tangent(u, mid);
    q = correct_onto_level(u, q, t);
    if (const auto crit = nearby_critical_point(u, q, t, ds))
      throw CriticalPointError("level " + std::to_string(t) + " passes through the critical point " + fmt_point(*crit));
    if (!chart.contains(q)) throw TopologyError("level " + std::to_string(t) + " reaches the boundary near " + fmt_point(q));
    travelled += distance(p, q);
    if (travelled > 3.0 * ds && distance(q, *start) < ds) {
      LevelCurve curve;
      curve.level = t;
      curve.method = ExtractionMethod::traced;
      const std::size_t m = pts.size();
      for (std::size_t i = 0; i < m; ++i) {
        const Point2 a = pts[(i + m - 1) % m], b = pts[i], d = pts[(i + 1) % m];
        curve.samples.push_back({b, unit_tangent(u, b), 0.5 * (distance(a, b) + distance(b, d))});
      }
      return curve;
    }
    pts.push_back(q);
  }
  throw TopologyError("level " + std::to_string(t) + " did not close after " + std::to_string(max_steps) + " steps");
}

LevelMoments moments(const HarmonicField& u, const Chart& chart, const LevelCurve& curve) {
  const std::size_t n = curve.samples.size();
  std::vector<double> L(n), Lp(n), Lpp(n), aux(n), pk(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& s = curve.samples[i];
    const double ds = chart.length_element(s.point, s.tangent) * s.dparam;
    const LevelIntegrands in = level_integrands(u, chart, s.point);
    L[i] = ds;
    Lp[i] = in.first * ds;
    Lpp[i] = in.second * ds;
    aux[i] = in.invgrad2 * ds;
    pk[i] = in.phi_k * ds;
  }
  using quadrature::pairwise_sum;
  return {pairwise_sum(L), pairwise_sum(Lp), pairwise_sum(Lpp), pairwise_sum(aux), pairwise_sum(pk)};
}

double span_of(const HarmonicField& u, const Chart& chart, const std::vector<double>& grid) {
  const auto range = level_range(u, chart);
  if (range && std::isfinite(range->first) && std::isfinite(range->second)) return std::abs(range->second - range->first);
  return grid.back() - grid.front();
}

void profile_level(const HarmonicField& u, const Chart& chart, const ProfileOptions& o, double h, LengthProfile& out,
                   std::size_t i) {
  const double t = out.t[i];
  const LevelMoments m = level_moments(u, chart, t, o.n_samples);
  // Inset grid ends sit one nominal step from the boundary values; keep the stencil inside.
  double step = h;
  if (const auto range = level_range(u, chart)) {
    const double room = std::min(std::abs(t - range->first), std::abs(t - range->second));
    step = std::min(step, 0.5 * room);
  }
  const FiniteDifferences fd = length_differences(u, chart, t, step, o.n_samples);
  out.L[i] = m.L;
  out.Lp[i] = m.Lp;
  out.Lpp[i] = m.Lpp;
  out.lnL_pp[i] = (m.Lpp * m.L - m.Lp * m.Lp) / (m.L * m.L);
  out.L_fd_p[i] = fd.first;
  out.L_fd_pp[i] = fd.second;
  out.aux_invgrad2[i] = m.aux;
}

LengthProfile prepare_profile(const HarmonicField& u, const Chart& chart, const std::vector<double>& t_grid,
                              const ProfileOptions& o) {
  if (t_grid.size() < 8) throw DomainError("length profile needs at least 8 levels");
  if (!std::is_sorted(t_grid.begin(), t_grid.end())) throw DomainError("level grid must be increasing");
  if (const auto range = level_range(u, chart)) {
    const double lo = std::min(range->first, range->second), hi = std::max(range->first, range->second);
    if (!(t_grid.front() > lo && t_grid.back() < hi))
      throw DomainError("level grid must lie strictly between the boundary values");
  }
  LengthProfile p;
  const std::size_t n = t_grid.size();
  p.t = t_grid;
  for (auto* col : {&p.L, &p.Lp, &p.Lpp, &p.lnL_pp, &p.L_fd_p, &p.L_fd_pp, &p.aux_invgrad2}) col->assign(n, 0.0);
  p.fd_step = o.fd_step > 0.0 ? o.fd_step : 1e-3 * span_of(u, chart, t_grid);
  return p;
}

}  // namespace

double LevelCurve::euclidean_length() const {
  std::vector<double> w(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) w[i] = samples[i].weight();
  return quadrature::pairwise_sum(w);
}

std::optional<std::pair<double, double>> level_range(const HarmonicField& u, const Chart& chart) {
  if (u.boundary_values()) return u.boundary_values();
  const Domain& d = chart.domain();
  if (chart.kind() == ChartKind::warped) {
    if (!u.warped_radial()) return std::nullopt;
    return std::make_pair(u.warped_radial()->profile(d.inner), u.warped_radial()->profile(d.outer));
  }
  if (u.radial() && (d.kind == DomainKind::annulus || d.kind == DomainKind::disc) && d.center == u.radial()->center) {
    const auto& r = *u.radial();
    const double inner = d.kind == DomainKind::disc ? 0.0 : d.inner;
    return std::make_pair(r.a + r.b * std::log(inner), r.a + r.b * std::log(d.outer));
  }
  return std::nullopt;
}

LevelCurve extract_level_curve(const HarmonicField& u, const Chart& chart, double t, int n_samples) {
  if (n_samples < 8) throw DomainError("level curves need at least 8 samples");
  if (chart.kind() == ChartKind::warped) return warped_circle(u, chart, t, n_samples);
  if (const auto range = level_range(u, chart)) {
    const double lo = std::min(range->first, range->second), hi = std::max(range->first, range->second);
    if (!(t > lo && t < hi)) throw DomainError("level " + std::to_string(t) + " is outside the open boundary range");
  }
  if (u.radial()) return exact_circle(t, u.radial()->center, u.radial()->radius_of(t), n_samples, chart);
  if (auto curve = star_shaped(u, chart, t, n_samples)) return *curve;
  return traced(u, chart, t, n_samples);
}

LevelMoments level_moments(const HarmonicField& u, const Chart& chart, double t, int n_samples) {
  return moments(u, chart, extract_level_curve(u, chart, t, n_samples));
}

LevelMoments level_moments(const HarmonicField& u, const Chart& chart, const LevelCurve& curve) {
  return moments(u, chart, curve);
}

LevelCurve trace_level_curve(const HarmonicField& u, const Chart& chart, double t, int n_samples) {
  if (n_samples < 8) throw DomainError("level curves need at least 8 samples");
  return traced(u, chart, t, n_samples);
}

double level_integral(const LevelCurve& curve, const Chart& chart, const std::function<double(Point2)>& f) {
  if (curve.circle && chart.kind() == ChartKind::conformal && !chart.singular_points().empty()) {
    const Circle c = *curve.circle;
    std::vector<double> breaks;
    for (Point2 s : chart.singular_points()) {
      if (std::abs(distance(s, c.center) - c.radius) < 0.1 * c.radius)
        breaks.push_back(std::atan2(s.y - c.center.y, s.x - c.center.x));
    }
    if (!breaks.empty()) {
      auto integrand = [&](double th) {
        const Point2 p{c.center.x + c.radius * std::cos(th), c.center.y + c.radius * std::sin(th)};
        // A Chart::kSingularRadius neighbourhood of the atom is dropped; its
        // contribution is below the quadrature tolerance for integrable exponents.
        if (chart.singular_distance(p) <= Chart::kSingularRadius) return 0.0;
        return f(p) * chart.length_element(p, {-c.radius * std::sin(th), c.radius * std::cos(th)});
      };
      return quadrature::integrate_periodic(integrand, breaks).value;
    }
  }
  std::vector<double> terms(curve.samples.size());
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const auto& s = curve.samples[i];
    terms[i] = f(s.point) * chart.length_element(s.point, s.tangent) * s.dparam;
  }
  return quadrature::pairwise_sum(terms);
}

double length(const LevelCurve& curve, const Chart& chart) {
  return level_integral(curve, chart, [](Point2) { return 1.0; });
}

LevelIntegrands level_integrands(const HarmonicField& u, const Chart& chart, Point2 p) {
  const MetricJets<4> m4 = chart.metric(p);
  const Jet<2> uj = truncate<2>(u.jet(p));
  require_regular({uj.coeff(1, 0), uj.coeff(0, 1)}, p);
  const auto m1 = m4.truncated<1>();
  const auto m0 = m4.truncated<0>();
  const Gradient<1> du = partials(uj);
  const Jet<1> g = sqrt(gradient_norm_sq(du, m1));
  const Gradient<0> dg = partials(g);
  const Gradient<0> du0{truncate<0>(du.x), truncate<0>(du.y)};
  const double gv = g.value();
  const double K = chart.curvature(p).value();
  LevelIntegrands in;
  in.gradnorm = gv;
  in.first = -gradient_inner(du0, dg, m0).value() / (gv * gv * gv);
  in.second = gradient_norm_sq(dg, m0).value() / (gv * gv * gv * gv) - K / (gv * gv);
  in.invgrad2 = 1.0 / (gv * gv);
  in.phi_k = level_curvature(uj, m1).value() / gv;
  in.K = K;
  return in;
}

double dlength_integral(const HarmonicField& u, const Chart& chart, double t, int n_samples) {
  return level_moments(u, chart, t, n_samples).Lp;
}

double d2length_integral(const HarmonicField& u, const Chart& chart, double t, int n_samples) {
  return level_moments(u, chart, t, n_samples).Lpp;
}

double invgrad2_integral(const HarmonicField& u, const Chart& chart, double t, int n_samples) {
  return level_moments(u, chart, t, n_samples).aux;
}

FiniteDifferences length_differences(const HarmonicField& u, const Chart& chart, double t, double h, int n_samples) {
  const double lm = length(extract_level_curve(u, chart, t - h, n_samples), chart);
  const double l0 = length(extract_level_curve(u, chart, t, n_samples), chart);
  const double lp = length(extract_level_curve(u, chart, t + h, n_samples), chart);
  return {(lp - lm) / (2.0 * h), (lp - 2.0 * l0 + lm) / (h * h)};
}

LengthProfile length_profile(const HarmonicField& u, const Chart& chart, const std::vector<double>& t_grid,
                             const ProfileOptions& options) {
  LengthProfile p = prepare_profile(u, chart, t_grid, options);
  const long n = static_cast<long>(p.size());
  const double h = p.fd_step;
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < n; ++i) {
    try {
      profile_level(u, chart, options, h, p, static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(levelflow_profile_error)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return p;
}

LengthProfile length_profile_serial(const HarmonicField& u, const Chart& chart, const std::vector<double>& t_grid,
                                    const ProfileOptions& options) {
  LengthProfile p = prepare_profile(u, chart, t_grid, options);
  for (std::size_t i = 0; i < p.size(); ++i) profile_level(u, chart, options, p.fd_step, p, i);
  return p;
}

std::vector<double> inset_grid(double lo, double hi, int n) {
  if (n < 2) throw DomainError("grid needs at least 2 points");
  const double inset = 1e-3 * (hi - lo);
  const double a = lo + inset, b = hi - inset;
  std::vector<double> g(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) g[i] = a + (b - a) * i / (n - 1);
  return g;
}

void write_profile_csv(std::ostream& out, const LengthProfile& p) {
  out << "t,L,Lp,Lpp,lnL_pp,L_fd_p,L_fd_pp,aux_invgrad2\n";
  char buf[32];
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double row[] = {p.t[i], p.L[i], p.Lp[i], p.Lpp[i], p.lnL_pp[i], p.L_fd_p[i], p.L_fd_pp[i], p.aux_invgrad2[i]};
    for (std::size_t k = 0; k < std::size(row); ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", row[k]);
      out << (k ? "," : "") << buf;
    }
    out << '\n';
  }
}

std::vector<double> discrete_second_differences(const std::vector<double>& t, const std::vector<double>& L) {
  std::vector<double> d;
  for (std::size_t i = 1; i + 1 < t.size(); ++i) {
    const double h1 = t[i] - t[i - 1], h2 = t[i + 1] - t[i];
    const double y0 = std::log(L[i - 1]), y1 = std::log(L[i]), y2 = std::log(L[i + 1]);
    d.push_back(2.0 * ((y2 - y1) / h2 - (y1 - y0) / h1) / (h1 + h2));
  }
  return d;
}

ConvexityReport log_convexity_check(const LengthProfile& profile, double tolerance) {
  if (profile.size() < 8) throw DomainError("convexity check needs at least 8 levels");
  ConvexityReport r;
  r.tolerance = tolerance;
  r.min_lnL_pp = std::numeric_limits<double>::quiet_NaN();
  for (double v : profile.lnL_pp) {
    if (!std::isnan(v) && !(v >= r.min_lnL_pp)) r.min_lnL_pp = v;
  }
  const auto d = discrete_second_differences(profile.t, profile.L);
  const auto it = std::min_element(d.begin(), d.end());
  r.min_discrete = *it;
  r.t_at_min_discrete = profile.t[static_cast<std::size_t>(it - d.begin()) + 1];
  r.pass = (std::isnan(r.min_lnL_pp) || r.min_lnL_pp >= -tolerance) && r.min_discrete >= -tolerance;
  return r;
}

double sharp_bound_value(const HarmonicField& u, const Chart& chart, double t, double kappa, int n_samples) {
  const LevelMoments m = level_moments(u, chart, t, n_samples);
  return (m.Lpp * m.L - m.Lp * m.Lp) / (m.L * m.L) + kappa * m.aux / m.L;
}

double sharp_bound_gap(const HarmonicField& u, const Chart& chart, double t, double kappa, int n_samples) {
  if (kappa > 0.0) throw PreconditionError("sharp bound needs kappa <= 0");
  const LevelCurve curve = extract_level_curve(u, chart, t, n_samples);
  for (const auto& s : curve.samples) {
    const double K = geometry::gauss_curvature(chart, s.point);
    if (K > kappa + 1e-12 * (1.0 + std::abs(kappa))) {
      std::ostringstream os;
      os << "curvature bound K <= " << kappa << " violated: K = " << K << " at " << fmt_point(s.point);
      throw PreconditionError(os.str());
    }
  }
  const LevelMoments m = moments(u, chart, curve);
  return (m.Lpp * m.L - m.Lp * m.Lp) / (m.L * m.L) + kappa * m.aux / m.L;
}

double pinched_bound_check(const HarmonicField& u, const Chart& chart, double t, double kappa1, double kappa2,
                           int n_samples) {
  if (!(t > 0.0)) throw PreconditionError("pinched bound needs u > 0 on the level");
  if (!(kappa1 > 0.0 && kappa2 >= 0.0 && kappa2 <= kappa1))
    throw PreconditionError("pinched bound needs kappa1 > 0 and 0 <= kappa2 <= kappa1");
  const LevelCurve curve = extract_level_curve(u, chart, t, n_samples);
  for (const auto& s : curve.samples) {
    const double K = geometry::gauss_curvature(chart, s.point);
    const double slack = 1e-12 * (1.0 + kappa1);
    if (K < -kappa1 - slack || K > -kappa2 + slack) {
      std::ostringstream os;
      os << "curvature pinching " << -kappa1 << " <= K <= " << -kappa2 << " violated: K = " << K << " at "
         << fmt_point(s.point);
      throw PreconditionError(os.str());
    }
  }
  const LevelMoments m = moments(u, chart, curve);
  return (m.Lpp * m.L - m.Lp * m.Lp) / (m.L * m.L) - (kappa2 / kappa1) / (t * t);
}

double asymptotic_defect(const ScalarField& phi, double t, int n_samples) {
  const FieldJet j = phi.jet({0.0, 0.0});
  const double scale = 1e-12;
  if (std::abs(j.value()) > scale || std::abs(j.coeff(1, 0)) > scale || std::abs(j.coeff(0, 1)) > scale) {
    std::ostringstream os;
    os << "conformal factor is not normalised at the origin: lambda(0) = " << std::exp(j.value())
       << ", grad lambda(0) = (" << j.coeff(1, 0) << ", " << j.coeff(0, 1) << ")";
    throw PreconditionError(os.str());
  }
  const double r = std::exp(-t);
  const Chart chart = Chart::conformal(phi, Domain::annulus(0.0, 2.0 * r));
  const double a = -1.0;
  const HarmonicField u = harmonic::catalog_field("log", std::span(&a, 1));
  const LevelMoments m = level_moments(u, chart, t, n_samples);
  return std::exp(4.0 * t) * (m.L * m.Lpp - m.Lp * m.Lp);
}

}  // namespace levelflow::levelsets
