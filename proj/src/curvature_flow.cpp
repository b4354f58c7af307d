#include "levelflow/curvature_flow.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>

#include "levelflow/calculus.hpp"
#include "levelflow/errors.hpp"
#include "levelflow/geometry.hpp"
#include "levelflow/harmonic.hpp"

namespace levelflow::curvature_flow {

namespace {

constexpr double kSignSlack = 1e-12;

std::string at(Point2 p) {
  std::ostringstream os;
  os << "(" << p.x << ", " << p.y << ")";
  return os.str();
}

void require_regular(const FieldJet& u, Point2 p) {
  const double g0 = std::hypot(u.coeff(1, 0), u.coeff(0, 1));
  if (!(g0 >= geometry::kCriticalThreshold)) throw CriticalPointError("gradient vanishes at " + at(p));
}

struct Local {
  FieldJet u;
  MetricJets<4> m;
};

Local local(const HarmonicField& u, const Chart& chart, Point2 p) {
  chart.check_point(p);
  Local l{u.jet(p), chart.metric(p)};
  require_regular(l.u, p);
  return l;
}

Jet<2> curvature_jet(const Local& l, bool star) {
  const auto m3 = l.m.truncated<3>();
  return star ? descent_curvature(l.u, m3) : level_curvature(l.u, m3);
}

Jet<2> phi_jet(const Local& l, bool star) {
  return curvature_jet(l, star) / truncate<2>(gradient_norm(l.u, l.m.truncated<3>()));
}

struct StencilDerivatives {
  double fx = 0.0;
  double fy = 0.0;
  double lap = 0.0;
};

// Metric Laplacian (1/s)[(s/E) f_xx + (s/E)_x f_x + (s/G) f_yy + (s/G)_y f_y] from central differences.
StencilDerivatives central(const std::function<double(Point2)>& f, double f0, const MetricJets<4>& m, Point2 p,
                           double h) {
  const double xp = f({p.x + h, p.y}), xm = f({p.x - h, p.y});
  const double yp = f({p.x, p.y + h}), ym = f({p.x, p.y - h});
  const double fx = (xp - xm) / (2 * h), fy = (yp - ym) / (2 * h);
  const double fxx = (xp - 2 * f0 + xm) / (h * h), fyy = (yp - 2 * f0 + ym) / (h * h);
  const FieldJet s = sqrt(m.E * m.G);
  const FieldJet a = s / m.E, b = s / m.G;
  const double lap = (a.value() * fxx + a.derivative(1, 0) * fx + b.value() * fyy + b.derivative(0, 1) * fy) / s.value();
  return {fx, fy, lap};
}

StencilDerivatives stencil(const std::function<double(Point2)>& f, const Chart& chart, Point2 p,
                           const StencilOptions& o) {
  if (!(o.step > 0.0)) throw DomainError("finite-difference step must be positive");
  const auto m = chart.metric(p);
  const double f0 = f(p);
  const StencilDerivatives d1 = central(f, f0, m, p, o.step);
  if (o.mode == LaplacianMode::central) return d1;
  const StencilDerivatives d2 = central(f, f0, m, p, 2 * o.step);
  auto rich = [](double a, double b) { return (4 * a - b) / 3; };
  return {rich(d1.fx, d2.fx), rich(d1.fy, d2.fy), rich(d1.lap, d2.lap)};
}

double pde1_impl(const HarmonicField& u, const Chart& chart, Point2 p, const StencilOptions& o, bool star) {
  const CurvatureSample c = curvature_sample(u, chart, p);
  const double phi = star ? c.phi_h : c.phi_k;
  const double g2 = c.gradnorm * c.gradnorm;
  const double source = star ? c.gradK_star / g2 : -c.gradK_u / g2;
  double lap = 0.0;
  if (o.mode == LaplacianMode::exact_jet) {
    const Local l = local(u, chart, p);
    lap = laplacian<2>(phi_jet(l, star), l.m.truncated<1>()).value();
  } else {
    auto f = [&](Point2 q) {
      const CurvatureSample s = curvature_sample(u, chart, q);
      return star ? s.phi_h : s.phi_k;
    };
    lap = stencil(f, chart, p, o).lap;
  }
  return lap + 2 * c.K * phi + source;
}

double checked_curvature(const CurvatureSample& s, bool star) {
  const double c = star ? s.h : s.k;
  if (!(std::abs(c) > kCurvatureThreshold)) {
    throw PreconditionError(std::string(star ? "h" : "k") + " vanishes at " + at(s.p));
  }
  return c;
}

GapResult pde2_impl(const HarmonicField& u, const Chart& chart, Point2 p, const StencilOptions& o, bool star) {
  const CurvatureSample c = curvature_sample(u, chart, p);
  const double curv = checked_curvature(c, star);
  const double phi = curv / c.gradnorm;
  const double pairing = star ? -c.gradK_star : c.gradK_u;
  const auto m = chart.metric(p);
  const double E = m.E.value(), G = m.G.value();
  double lap_ln = 0.0, phi_x = 0.0, phi_y = 0.0;
  if (o.mode == LaplacianMode::exact_jet) {
    const Local l = local(u, chart, p);
    lap_ln = laplacian<2>(log(abs(curvature_jet(l, star))), l.m.truncated<1>()).value();
    const Jet<2> pj = phi_jet(l, star);
    phi_x = pj.derivative(1, 0);
    phi_y = pj.derivative(0, 1);
  } else {
    auto ln_abs = [&](Point2 q) { return std::log(std::abs(checked_curvature(curvature_sample(u, chart, q), star))); };
    auto phi_f = [&](Point2 q) {
      const CurvatureSample s = curvature_sample(u, chart, q);
      return star ? s.phi_h : s.phi_k;
    };
    lap_ln = stencil(ln_abs, chart, p, o).lap;
    const StencilDerivatives d = stencil(phi_f, chart, p, o);
    phi_x = d.fx;
    phi_y = d.fy;
  }
  GapResult r;
  r.gap = -lap_ln - c.K + pairing / (curv * c.gradnorm);
  r.theoretical_gap = (phi_x * phi_x / E + phi_y * phi_y / G) / (phi * phi);
  return r;
}

bool uses_h(Quantity q) { return q == Quantity::h || q == Quantity::phi_h || q == Quantity::ln_abs_h; }

void validate(Quantity q, CorollaryCase c) {
  bool ok = false;
  switch (c) {
    case CorollaryCase::boundary_minimum:
      ok = q == Quantity::k || q == Quantity::h || q == Quantity::ln_abs_k || q == Quantity::ln_abs_h;
      break;
    case CorollaryCase::case1:
    case CorollaryCase::case2:
    case CorollaryCase::case3:
    case CorollaryCase::case4:
      ok = q == Quantity::phi_k || q == Quantity::phi_h;
      break;
    case CorollaryCase::interior_minimum_bound:
      ok = q == Quantity::k || q == Quantity::h;
      break;
  }
  if (!ok) throw DomainError("quantity " + to_string(q) + " does not fit case " + to_string(c));
}

double quantity_value(const CurvatureSample& s, Quantity q, CorollaryCase c) {
  switch (q) {
    case Quantity::k:
      return c == CorollaryCase::boundary_minimum ? std::abs(s.k) : s.k;
    case Quantity::h:
      return c == CorollaryCase::boundary_minimum ? std::abs(s.h) : s.h;
    case Quantity::phi_k:
      return s.phi_k;
    case Quantity::phi_h:
      return s.phi_h;
    case Quantity::ln_abs_k:
      return std::log(std::abs(s.k));
    case Quantity::ln_abs_h:
      return std::log(std::abs(s.h));
  }
  return 0.0;
}

bool lex_less(Point2 a, Point2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); }

struct AuditGrid {
  std::vector<Point2> points;
  int rows = 0;
  int cols = 0;
  int nb = 0;
  double spacing = 0.0;

  // Interior nodes first (row-major), then nb samples on the inner and nb on the outer boundary.
  std::size_t interior(int i, int j) const { return static_cast<std::size_t>(i) * cols + j; }
  std::size_t boundary(int side, int j) const {
    return static_cast<std::size_t>(rows) * cols + static_cast<std::size_t>(side) * nb + j;
  }
};

AuditGrid make_grid(const Chart& chart, const Domain& region, const AuditOptions& o) {
  if (o.rows < 2 || o.columns < 3 || o.boundary_samples < 3) throw DomainError("audit grid too small");
  const bool band = region.kind == DomainKind::band;
  if (!band && !(region.kind == DomainKind::annulus && region.inner > 0.0 && std::isfinite(region.outer))) {
    throw DomainError("audit region must be a bounded annulus or a band");
  }
  if (!(region.outer > region.inner)) throw DomainError("empty audit region");
  AuditGrid g;
  g.rows = o.rows;
  g.cols = o.columns;
  g.nb = o.boundary_samples;
  const double two_pi = 2 * std::numbers::pi;
  auto point = [&](double rho, double th) -> Point2 {
    if (band) return {rho, th};
    return {region.center.x + rho * std::cos(th), region.center.y + rho * std::sin(th)};
  };
  g.points.reserve(static_cast<std::size_t>(g.rows) * g.cols + 2 * g.nb);
  const double dr = (region.outer - region.inner) / (g.rows + 1);
  for (int i = 0; i < g.rows; ++i) {
    for (int j = 0; j < g.cols; ++j) g.points.push_back(point(region.inner + dr * (i + 1), two_pi * j / g.cols));
  }
  for (double rho : {region.inner, region.outer}) {
    for (int j = 0; j < g.nb; ++j) g.points.push_back(point(rho, two_pi * j / g.nb));
  }
  const double arc = band ? 1.0 : region.outer;
  g.spacing = std::max(dr, arc * two_pi / std::min(g.cols, g.nb));
  for (Point2 p : g.points) chart.check_point(p);
  return g;
}

double lipschitz_estimate(const AuditGrid& g, const std::vector<double>& v) {
  double lip = 0.0;
  auto pair = [&](std::size_t a, std::size_t b) {
    const double d = distance(g.points[a], g.points[b]);
    if (d > 0.0) lip = std::max(lip, std::abs(v[a] - v[b]) / d);
  };
  for (int i = 0; i < g.rows; ++i) {
    for (int j = 0; j < g.cols; ++j) {
      pair(g.interior(i, j), g.interior(i, (j + 1) % g.cols));
      if (i + 1 < g.rows) pair(g.interior(i, j), g.interior(i + 1, j));
    }
  }
  for (int side = 0; side < 2; ++side) {
    const int row = side == 0 ? 0 : g.rows - 1;
    for (int j = 0; j < g.nb; ++j) pair(g.boundary(side, j), g.boundary(side, (j + 1) % g.nb));
    for (int j = 0; j < g.cols; ++j) {
      const int b = static_cast<int>(std::lround(static_cast<double>(j) * g.nb / g.cols)) % g.nb;
      pair(g.interior(row, j), g.boundary(side, b));
    }
  }
  return lip;
}

Extremum extremum(const AuditGrid& g, const std::vector<double>& v, std::size_t first, std::size_t last, bool max) {
  Extremum e{g.points[first], v[first]};
  for (std::size_t i = first + 1; i < last; ++i) {
    const bool better = max ? v[i] > e.value : v[i] < e.value;
    if (better || (v[i] == e.value && lex_less(g.points[i], e.point))) e = {g.points[i], v[i]};
  }
  return e;
}

HypothesisFlags sample_flags(const std::vector<CurvatureSample>& samples, bool h_quantity) {
  HypothesisFlags f;
  constexpr double inf = std::numeric_limits<double>::infinity();
  f.K_min = f.gradK_u_min = f.gradK_star_min = f.curvature_min_abs = inf;
  f.K_max = f.gradK_u_max = f.gradK_star_max = -inf;
  for (const auto& s : samples) {
    f.K_min = std::min(f.K_min, s.K);
    f.K_max = std::max(f.K_max, s.K);
    f.gradK_u_min = std::min(f.gradK_u_min, s.gradK_u);
    f.gradK_u_max = std::max(f.gradK_u_max, s.gradK_u);
    f.gradK_star_min = std::min(f.gradK_star_min, s.gradK_star);
    f.gradK_star_max = std::max(f.gradK_star_max, s.gradK_star);
    f.curvature_min_abs = std::min(f.curvature_min_abs, std::abs(h_quantity ? s.h : s.k));
  }
  return f;
}

bool hypotheses_hold(const HypothesisFlags& f, Quantity q, CorollaryCase c) {
  const bool h = uses_h(q);
  // P = <grad K, grad u> for k-quantities and -<grad K, star grad u> for h-quantities.
  const bool P_nonneg = h ? f.gradK_star_nonpositive() : f.gradK_u_nonnegative();
  const bool P_nonpos = h ? f.gradK_star_nonnegative() : f.gradK_u_nonpositive();
  switch (c) {
    case CorollaryCase::boundary_minimum:
      return f.K_nonnegative() && P_nonpos && f.curvature_nonzero();
    case CorollaryCase::case1:
      return f.K_nonpositive() && P_nonneg;
    case CorollaryCase::case2:
      return f.K_nonpositive() && P_nonpos;
    case CorollaryCase::case3:
      return f.K_nonnegative() && P_nonneg;
    case CorollaryCase::case4:
      return f.K_nonnegative() && P_nonpos;
    case CorollaryCase::interior_minimum_bound:
      return f.curvature_nonzero();
  }
  return false;
}

PrincipleAuditReport audit_impl(const HarmonicField& u, const Chart& chart, const Domain& region, Quantity q,
                                CorollaryCase c, const AuditOptions& o, bool parallel) {
  validate(q, c);
  const AuditGrid g = make_grid(chart, region, o);
  // Critical points depend on coordinates only, so any chart over the region can scan for them.
  const Chart scan = region.kind == DomainKind::band ? Chart::warped(chart.factor(), region.inner, region.outer)
                                                     : Chart::conformal(factors::flat(), region);
  const auto crit = harmonic::critical_points(u, scan, 64);
  if (!crit.points.empty()) throw CriticalPointError("critical point of u at " + at(crit.points.front()) + " in the audit region");
  const auto n = static_cast<std::ptrdiff_t>(g.points.size());
  std::vector<CurvatureSample> samples(g.points.size());
  std::exception_ptr error;
#pragma omp parallel for schedule(static) if (parallel)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      samples[i] = curvature_sample(u, chart, g.points[i]);
    } catch (...) {
#pragma omp critical(levelflow_audit_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);

  std::vector<double> v(samples.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = quantity_value(samples[i], q, c);

  PrincipleAuditReport r;
  r.quantity = q;
  r.corollary_case = c;
  r.hypothesis_flags = sample_flags(samples, uses_h(q));
  r.grid_spacing = g.spacing;
  r.lipschitz = lipschitz_estimate(g, v);
  r.tolerance = 10.0 * r.grid_spacing * r.lipschitz;
  r.extremum_is_max = c == CorollaryCase::case1 || c == CorollaryCase::case3;
  const std::size_t split = g.interior(g.rows, 0);
  r.interior_extremum = extremum(g, v, 0, split, r.extremum_is_max);
  r.boundary_extremum = extremum(g, v, split, v.size(), r.extremum_is_max);

  if (!hypotheses_hold(r.hypothesis_flags, q, c)) {
    r.verdict = Verdict::hypotheses_unmet;
    return r;
  }
  const double iv = r.interior_extremum.value, bv = r.boundary_extremum.value;
  const bool attained = r.extremum_is_max ? iv <= bv + r.tolerance : iv >= bv - r.tolerance;
  const double overall = r.extremum_is_max ? std::max(iv, bv) : std::min(iv, bv);
  bool premise = true;
  switch (c) {
    case CorollaryCase::case1:
    case CorollaryCase::case4:
      premise = overall >= 0.0;
      break;
    case CorollaryCase::case2:
    case CorollaryCase::case3:
      premise = overall <= 0.0;
      break;
    default:
      break;
  }
  if (c == CorollaryCase::interior_minimum_bound) {
    if (attained) {
      r.verdict = Verdict::vacuous;
      return r;
    }
    const std::size_t y = static_cast<std::size_t>(
        std::find_if(g.points.begin(), g.points.begin() + static_cast<std::ptrdiff_t>(split),
                     [&](Point2 p) { return p.x == r.interior_extremum.point.x && p.y == r.interior_extremum.point.y; }) -
        g.points.begin());
    const CurvatureSample& s = samples[y];
    if (!(s.K > 0.0)) {
      r.verdict = Verdict::hypotheses_unmet;
      return r;
    }
    r.verdict = iv <= s.gradK_norm / s.K + r.tolerance ? Verdict::pass : Verdict::fail;
    return r;
  }
  if (!premise) {
    r.verdict = Verdict::vacuous;
    return r;
  }
  r.verdict = attained ? Verdict::pass : Verdict::fail;
  return r;
}

nlohmann::ordered_json extremum_json(const Extremum& e) {
  nlohmann::ordered_json j;
  j["point"] = {e.point.x, e.point.y};
  j["value"] = e.value;
  return j;
}

}  // namespace

CurvatureSample curvature_sample(const HarmonicField& u, const Chart& chart, Point2 p) {
  const Local l = local(u, chart, p);
  const Jet<2> Kj = chart.curvature(p);
  CurvatureSample s;
  s.p = p;
  s.k = curvature_jet(l, false).value();
  s.h = curvature_jet(l, true).value();
  const double E = l.m.E.value(), G = l.m.G.value(), root = std::sqrt(E * G);
  const double ux = l.u.derivative(1, 0), uy = l.u.derivative(0, 1);
  s.gradnorm = std::sqrt(ux * ux / E + uy * uy / G);
  s.phi_k = s.k / s.gradnorm;
  s.phi_h = s.h / s.gradnorm;
  s.K = Kj.value();
  s.gradK = {Kj.derivative(1, 0), Kj.derivative(0, 1)};
  s.gradK_norm = std::sqrt(s.gradK.x * s.gradK.x / E + s.gradK.y * s.gradK.y / G);
  s.gradK_u = s.gradK.x * ux / E + s.gradK.y * uy / G;
  s.gradK_star = (s.gradK.x * uy - s.gradK.y * ux) / root;
  return s;
}

double level_curvature_k(const HarmonicField& u, const Chart& chart, Point2 p) {
  return curvature_jet(local(u, chart, p), false).value();
}

double steepest_descent_curvature_h(const HarmonicField& u, const Chart& chart, Point2 p) {
  return curvature_jet(local(u, chart, p), true).value();
}

double fd_tolerance(double local) { return 1e-4 * (1.0 + std::abs(local)); }

double pde1_residual(const HarmonicField& u, const Chart& chart, Point2 p, const StencilOptions& options) {
  return pde1_impl(u, chart, p, options, false);
}

double pde1_star_residual(const HarmonicField& u, const Chart& chart, Point2 p, const StencilOptions& options) {
  return pde1_impl(u, chart, p, options, true);
}

GapResult pde2_gap(const HarmonicField& u, const Chart& chart, Point2 p, const StencilOptions& options) {
  return pde2_impl(u, chart, p, options, false);
}

GapResult pde2_star_gap(const HarmonicField& u, const Chart& chart, Point2 p, const StencilOptions& options) {
  return pde2_impl(u, chart, p, options, true);
}

std::string to_string(Quantity q) {
  switch (q) {
    case Quantity::k:
      return "k";
    case Quantity::h:
      return "h";
    case Quantity::phi_k:
      return "phi_k";
    case Quantity::phi_h:
      return "phi_h";
    case Quantity::ln_abs_k:
      return "ln_abs_k";
    case Quantity::ln_abs_h:
      return "ln_abs_h";
  }
  return "?";
}

std::string to_string(CorollaryCase c) {
  switch (c) {
    case CorollaryCase::boundary_minimum:
      return "boundary_minimum";
    case CorollaryCase::case1:
      return "case1";
    case CorollaryCase::case2:
      return "case2";
    case CorollaryCase::case3:
      return "case3";
    case CorollaryCase::case4:
      return "case4";
    case CorollaryCase::interior_minimum_bound:
      return "interior_minimum_bound";
  }
  return "?";
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::pass:
      return "pass";
    case Verdict::vacuous:
      return "vacuous";
    case Verdict::fail:
      return "fail";
    case Verdict::hypotheses_unmet:
      return "hypotheses_unmet";
  }
  return "?";
}

Quantity parse_quantity(const std::string& s) {
  for (Quantity q : {Quantity::k, Quantity::h, Quantity::phi_k, Quantity::phi_h, Quantity::ln_abs_k,
                     Quantity::ln_abs_h}) {
    if (to_string(q) == s) return q;
  }
  throw DomainError("unknown quantity '" + s + "'");
}

CorollaryCase parse_corollary_case(const std::string& s) {
  for (CorollaryCase c : {CorollaryCase::boundary_minimum, CorollaryCase::case1, CorollaryCase::case2,
                          CorollaryCase::case3, CorollaryCase::case4, CorollaryCase::interior_minimum_bound}) {
    if (to_string(c) == s) return c;
  }
  throw DomainError("unknown corollary case '" + s + "'");
}

bool HypothesisFlags::K_nonnegative() const { return K_min >= -kSignSlack; }
bool HypothesisFlags::K_nonpositive() const { return K_max <= kSignSlack; }
bool HypothesisFlags::gradK_u_nonnegative() const { return gradK_u_min >= -kSignSlack; }
bool HypothesisFlags::gradK_u_nonpositive() const { return gradK_u_max <= kSignSlack; }
bool HypothesisFlags::gradK_star_nonnegative() const { return gradK_star_min >= -kSignSlack; }
bool HypothesisFlags::gradK_star_nonpositive() const { return gradK_star_max <= kSignSlack; }
bool HypothesisFlags::curvature_nonzero() const { return curvature_min_abs > kCurvatureThreshold; }

PrincipleAuditReport principle_audit(const HarmonicField& u, const Chart& chart, const Domain& region,
                                     Quantity quantity, CorollaryCase corollary_case, const AuditOptions& options) {
  return audit_impl(u, chart, region, quantity, corollary_case, options, true);
}

PrincipleAuditReport principle_audit_serial(const HarmonicField& u, const Chart& chart, const Domain& region,
                                            Quantity quantity, CorollaryCase corollary_case,
                                            const AuditOptions& options) {
  return audit_impl(u, chart, region, quantity, corollary_case, options, false);
}

nlohmann::ordered_json to_json(const PrincipleAuditReport& r) {
  const HypothesisFlags& f = r.hypothesis_flags;
  nlohmann::ordered_json j;
  j["quantity"] = to_string(r.quantity);
  j["case"] = to_string(r.corollary_case);
  j["hypothesis_flags"] = {
      {"K_nonnegative", f.K_nonnegative()},
      {"K_nonpositive", f.K_nonpositive()},
      {"gradK_gradu_nonnegative", f.gradK_u_nonnegative()},
      {"gradK_gradu_nonpositive", f.gradK_u_nonpositive()},
      {"gradK_stargradu_nonnegative", f.gradK_star_nonnegative()},
      {"gradK_stargradu_nonpositive", f.gradK_star_nonpositive()},
      {"curvature_nonzero", f.curvature_nonzero()},
  };
  j["interior_extremum"] = extremum_json(r.interior_extremum);
  j["boundary_extremum"] = extremum_json(r.boundary_extremum);
  j["verdict"] = to_string(r.verdict);
  j["tolerance"] = r.tolerance;
  return j;
}

SlopeBoundReport logL_slope_bound(const HarmonicField& u, const Chart& chart, const levelsets::LengthProfile& profile,
                                  int boundary_samples, int n_samples) {
  const std::size_t n = profile.size();
  if (n < 2) throw DomainError("slope bound needs at least two levels");
  SlopeBoundReport r;
  r.t = profile.t;
  std::vector<CurvatureSample> samples;
  double inf_phi = std::numeric_limits<double>::infinity();
  for (double t : {profile.t.front(), profile.t.back()}) {
    for (const auto& s : levelsets::extract_level_curve(u, chart, t, boundary_samples).samples) {
      samples.push_back(curvature_sample(u, chart, s.point));
      inf_phi = std::min(inf_phi, samples.back().phi_k);
    }
  }
  r.boundary_inf_phi_k = inf_phi;
  double k_min = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const auto curve = levelsets::extract_level_curve(u, chart, profile.t[i], n_samples);
    const auto m = levelsets::level_moments(u, chart, curve);
    r.slope.push_back(profile.Lp[i] / profile.L[i]);
    r.identity_residual.push_back(std::abs(m.Lp + m.phi_k));
    for (const auto& s : curve.samples) samples.push_back(curvature_sample(u, chart, s.point));
  }
  for (const auto& s : samples) k_min = std::min(k_min, s.k);
  r.max_identity_residual = *std::max_element(r.identity_residual.begin(), r.identity_residual.end());
  r.identity_holds = r.max_identity_residual <= 1e-6;

  const HypothesisFlags f = sample_flags(samples, false);
  if (f.K_nonpositive() && f.gradK_u_nonpositive()) {
    r.slope_case = SlopeCase::nonpositive_curvature;
    r.bound = std::max(-inf_phi, 0.0);
  } else if (f.K_nonnegative() && k_min >= -kSignSlack) {
    r.slope_case = SlopeCase::nonnegative_curvature;
    r.bound = -inf_phi;
  } else {
    r.slope_case = SlopeCase::none;
    std::ostringstream os;
    os << "skipped: sampled K in [" << f.K_min << ", " << f.K_max << "], <grad K, grad u> in [" << f.gradK_u_min
       << ", " << f.gradK_u_max << "], min k = " << k_min;
    r.diagnostic = os.str();
    return r;
  }
  const double tol = 1e-8 * (1.0 + std::abs(r.bound));
  r.bound_holds = std::all_of(r.slope.begin(), r.slope.end(), [&](double s) { return s <= r.bound + tol; });
  return r;
}

}  // namespace levelflow::curvature_flow
