// Acceptance run: one PASS/FAIL line per criterion; exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "levelflow/bic.hpp"
#include "levelflow/curvature_flow.hpp"
#include "levelflow/errors.hpp"
#include "levelflow/geometry.hpp"
#include "levelflow/harmonic.hpp"
#include "levelflow/levelsets.hpp"
#include "levelflow/sampling.hpp"

using namespace levelflow;
namespace cf = levelflow::curvature_flow;

namespace {

constexpr double kPi = std::numbers::pi;
const double kE2 = std::exp(2.0);

HarmonicField catalog(std::string_view name, std::vector<double> params = {}) {
  return harmonic::catalog_field(name, std::span<const double>(params));
}

Chart flat(double r0, double r1) { return Chart::conformal(factors::flat(), Domain::annulus(r0, r1)); }
Chart cap(Domain d) { return Chart::conformal(factors::quadratic(-0.1), d); }
Chart hyperbolic() { return hyperbolic_cylinder(kE2, -4.0, 4.0); }

double lnL_pp(const levelsets::LevelMoments& m) { return m.Lpp / m.L - (m.Lp / m.L) * (m.Lp / m.L); }

struct Verdict {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [failed]");
  }
};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

Verdict flat_equality() {
  Verdict v;
  const Chart chart = flat(1.0, kE2);
  const auto u = harmonic::solve_annulus_dirichlet({kE2, 0.0, -2.0});
  const auto grid = levelsets::inset_grid(-2.0, 0.0, 50);
  // Radial field: exact circles and closed-form integrands.
  const auto p = levelsets::length_profile(u, chart, grid);
  const double closed = max_abs(p.lnL_pp);
  v.require(closed <= 1e-8, "max|(ln L)''| exact circles " + fmt(closed) + " <= 1e-8");
  // Same levels by predictor-corrector tracing, 2048 nodes.
  double traced = 0.0;
  for (double t : grid) {
    const auto m = levelsets::level_moments(u, chart, levelsets::trace_level_curve(u, chart, t, 2048));
    traced = std::max(traced, std::abs(lnL_pp(m)));
  }
  v.require(traced <= 1e-6, "traced 2048 nodes " + fmt(traced) + " <= 1e-6");
  return v;
}

Verdict hyperbolic_example() {
  Verdict v;
  const Chart chart = hyperbolic();
  const auto u = catalog("warped_arctan");
  const auto grid = levelsets::inset_grid(0.4, kPi - 0.4, 50);
  const auto p = levelsets::length_profile(u, chart, grid, {64});
  double length = 0.0, scaled = 0.0, sharp = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double s = std::sin(p.t[i]);
    length = std::max(length, std::abs(p.L[i] * s - 2.0) / 2.0);
    scaled = std::max(scaled, std::abs(p.lnL_pp[i] * s * s - 1.0));
    sharp = std::max(sharp, std::abs(levelsets::sharp_bound_gap(u, chart, p.t[i], -1.0, 64)));
  }
  v.require(length <= 1e-8, "rel|L sin s - 2| " + fmt(length) + " <= 1e-8");
  v.require(scaled <= 1e-6, "|(ln L)'' sin^2 s - 1| " + fmt(scaled) + " <= 1e-6");
  v.require(sharp <= 1e-6, "|sharp gap(kappa=-1)| " + fmt(sharp) + " <= 1e-6");
  return v;
}

Verdict counterexample() {
  Verdict v;
  const double limit = -15.7914;  // -4 pi^2 * 0.4
  double worst = 0.0;
  bool flips = true;
  for (int i = 0; i <= 8; ++i) {
    const double r = 0.01 + 0.005 * i;
    const double t = -std::log(r);
    const double d = levelsets::asymptotic_defect(factors::quadratic(-0.1), t);
    const double mirrored = levelsets::asymptotic_defect(factors::quadratic(0.1), t);
    worst = std::max(worst, std::abs(d - limit) / std::abs(limit));
    flips = flips && d < 0.0 && mirrored > 0.0 && std::abs(mirrored + limit) <= 0.02 * std::abs(limit);
  }
  v.require(worst <= 0.02, "rel error vs -15.7914 over r in [0.01, 0.05] " + fmt(worst) + " <= 0.02");
  v.require(flips, "sign flips under c -> -c");
  return v;
}

Verdict identity_suite() {
  Verdict v;
  struct Case {
    std::string name;
    Chart chart;
    HarmonicField u;
    std::vector<Point2> points;
  };
  const std::vector<Case> cases{
      {"flat/Re z^2", flat(1.0, 2.0), catalog("re_poly", {2}), annulus_points(1.0, 2.0, 100)},
      {"cap/-ln", cap(Domain::annulus(0.5, 2.5)), catalog("log", {-1}), annulus_points(1.0, 2.0, 100, 3)},
      {"cap/Im z^3", cap(Domain::annulus(0.5, 2.5)), catalog("im_poly", {3}), annulus_points(0.6, 2.0, 100, 17)},
      {"stereographic/Re(z+1/z)", Chart::conformal(factors::stereographic(), Domain::annulus(0.5, 3.0)),
       catalog("re_z_plus_inv", {1}), annulus_points(1.2, 2.5, 100, 5)},
      {"hyperbolic/arctan", hyperbolic_cylinder(kE2, -3, 3), catalog("warped_arctan"),
       box_points(-2.5, 2.5, 0, 2 * kPi, 100)},
  };
  for (const auto& c : cases) {
    double worst = 0.0;
    for (Point2 p : c.points) {
      const double s = geometry::identity_scale(c.u, c.chart, p);
      worst = std::max({worst, std::abs(geometry::kato_residual(c.u, c.chart, p)) / s,
                        std::abs(geometry::bochner_residual(c.u, c.chart, p)) / s,
                        std::abs(geometry::log_gradient_residual(c.u, c.chart, p)) / s});
    }
    v.require(worst <= 1e-6, c.name + " " + fmt(worst));
  }
  return v;
}

Verdict pde_suite() {
  Verdict v;
  // Warped closed form: phi_k = -sinh t.
  const Chart hyp = hyperbolic_cylinder(kE2, -3, 3);
  const auto w = catalog("warped_arctan");
  double warped = 0.0, closed_form = 0.0;
  for (Point2 p : box_points(-2.5, 2.5, 0, 2 * kPi, 50, 3)) {
    warped = std::max(warped, std::abs(cf::pde1_residual(w, hyp, p)));
    closed_form = std::max(closed_form, std::abs(cf::curvature_sample(w, hyp, p).phi_k + std::sinh(p.x)));
  }
  v.require(warped <= 1e-6 && closed_form <= 1e-12, "warped pde1 " + fmt(warped) + " <= 1e-6");

  // Sphere cap under finite differences, with the measured step order.
  const auto u = catalog("log", {-1});
  const Chart annulus = cap(Domain::annulus(0.5, 2.5));
  const auto x = catalog("re_poly", {1});
  const Point2 centre{1.2, 1.0};
  const Chart disc = cap(Domain::disc(0.8, centre));
  double fd = 0.0, order_lo = 10.0, order_hi = -10.0;
  auto scan = [&](const HarmonicField& f, const Chart& c, bool star, const std::vector<Point2>& pts) {
    auto residual = [&](Point2 p, cf::StencilOptions o) {
      return star ? cf::pde1_star_residual(f, c, p, o) : cf::pde1_residual(f, c, p, o);
    };
    for (Point2 p : pts) fd = std::max(fd, std::abs(residual(p, {})));
    const double e1 = std::abs(residual(pts.front(), {cf::LaplacianMode::central, 2e-2}));
    const double e2 = std::abs(residual(pts.front(), {cf::LaplacianMode::central, 1e-2}));
    const double order = std::log2(e1 / e2);
    order_lo = std::min(order_lo, order);
    order_hi = std::max(order_hi, order);
  };
  scan(u, annulus, false, annulus_points(0.6, 2.4, 50));
  scan(x, disc, true, annulus_points(0.0, 0.7, 50, 5, centre));
  scan(x, disc, false, annulus_points(0.0, 0.7, 50, 9, centre));
  v.require(fd <= 1e-4, "cap pde1/pde1* FD " + fmt(fd) + " <= 1e-4");
  v.require(order_lo >= 1.8 && order_hi <= 2.2, "step order in [" + fmt(order_lo) + ", " + fmt(order_hi) + "]");

  // Gap of the logarithmic form at 50 points.
  const Chart gap_chart = cap(Domain::annulus(0.5, 1.8));
  double min_gap = std::numeric_limits<double>::infinity(), gap_err = 0.0;
  for (Point2 p : annulus_points(0.6, 1.6, 50)) {
    const auto g = cf::pde2_gap(u, gap_chart, p);
    min_gap = std::min(min_gap, g.gap);
    gap_err = std::max(gap_err, std::abs(g.gap - g.theoretical_gap));
  }
  v.require(min_gap >= -1e-6, "min pde2 gap " + fmt(min_gap) + " >= -1e-6");
  v.require(gap_err <= 1e-4, "|gap - |grad phi|^2/phi^2| " + fmt(gap_err) + " <= 1e-4");
  return v;
}

Verdict pinched_bound() {
  Verdict v;
  const auto u = catalog("warped_arctan");
  double worst = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 100; ++i) {
    const double s = 0.1 + (kPi - 0.2) * (i + 0.5) / 100;
    worst = std::min(worst, levelsets::pinched_bound_check(u, hyperbolic(), s, 1.0, 1.0, 64));
  }
  v.require(worst >= -1e-8, "min (ln L)'' - 1/s^2 " + fmt(worst) + " >= -1e-8");
  return v;
}

std::vector<double> grid_through(double lo, double hi, int n, const std::vector<double>& exact) {
  std::vector<double> t(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) t[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
  for (double e : exact) {
    *std::min_element(t.begin(), t.end(), [&](double a, double b) { return std::abs(a - e) < std::abs(b - e); }) = e;
  }
  std::sort(t.begin(), t.end());
  return t;
}

Verdict bic_convexity() {
  Verdict v;
  const harmonic::DirichletSpec spec{kE2, 0.0, -2.0};
  const auto f = bic::conical_factor(0.0, {{{1.2, 0.0}, 0.5}, {{0.0, -1.6}, 0.3}});
  const auto t = grid_through(-2.0, 0.0, 200, {-std::log(1.2), -std::log(1.6)});
  const auto d = levelsets::discrete_second_differences(t, bic::bic_length_profile(f, spec, t).L);
  const double min_d = *std::min_element(d.begin(), d.end());
  v.require(min_d >= -1e-5, "min second difference " + fmt(min_d) + " >= -1e-5 on 200 levels through both atoms");

  double increase = -std::numeric_limits<double>::infinity();
  for (double level : {-std::log(1.5), -std::log(1.2), -1.0}) {
    const auto m = bic::mollified_convergence(f, spec, level, {0.4, 0.2, 0.1, 0.05, 0.02});
    increase = std::max(increase, m.max_increase);
  }
  v.require(increase <= 1e-6, "max increase of L_eps " + fmt(increase) + " <= 1e-6");

  const auto bad = bic::conical_factor(0.0, {{{3.0, 0.0}, -0.5}});
  const auto tb = grid_through(-2.0, 0.0, 200, {-std::log(3.0)});
  const auto r = levelsets::log_convexity_check(bic::bic_length_profile(bad, spec, tb, {true}), 1e-5);
  v.require(!r.pass && r.min_discrete < -1e-5, "alpha = -0.5 violation detected, min " + fmt(r.min_discrete));
  return v;
}

Verdict principle_audits() {
  Verdict v;
  const Chart hyp = hyperbolic_cylinder(kE2, -3, 3);
  const auto w = catalog("warped_arctan");
  cf::AuditOptions o{128, 128, 512};
  // phi_k = -sinh t: non-negative maximum at t = -1.5, non-positive minimum at t = 1.5.
  const auto a1 = cf::principle_audit(w, hyp, Domain::band(-1.5, -0.3), cf::Quantity::phi_k, cf::CorollaryCase::case1, o);
  const auto a2 = cf::principle_audit(w, hyp, Domain::band(0.3, 1.5), cf::Quantity::phi_k, cf::CorollaryCase::case2, o);
  const auto a3 = cf::principle_audit(w, hyp, Domain::band(0.3, 1.5), cf::Quantity::phi_h, cf::CorollaryCase::case1, o);
  v.require(a1.verdict == cf::Verdict::pass && std::abs(a1.boundary_extremum.value - std::sinh(1.5)) <= 1e-9,
            "case1 max phi_k on boundary " + fmt(a1.boundary_extremum.value));
  v.require(a2.verdict == cf::Verdict::pass && std::abs(a2.boundary_extremum.value + std::sinh(1.5)) <= 1e-9,
            "case2 min phi_k on boundary " + fmt(a2.boundary_extremum.value));
  v.require(a3.verdict == cf::Verdict::pass, std::string("case1 phi_h ") + cf::to_string(a3.verdict));

  // L' = -integral of k / |grad u| on every catalog field with closed levels, against a
  // Richardson-extrapolated difference of L.
  struct Case {
    std::string name;
    HarmonicField u;
    Chart chart;
    std::vector<double> levels;
    int n;
  };
  const std::vector<Case> cases{
      {"log/flat", catalog("log", {-1}), flat(1.0, kE2), {-1.8, -1.0, -0.2}, 512},
      {"log/cap", catalog("log", {-1}), cap(Domain::annulus(0.0, 3.0)), {-0.9, 0.0, 1.5}, 512},
      {"log/stereographic", catalog("log", {1}), Chart::conformal(factors::stereographic(), Domain::annulus(0.5, 3.0)),
       {-0.5, 0.3, 1.0}, 512},
      {"log_plus_re/flat", catalog("log_plus_re", {1.0, 0.1}), flat(1.0, 3.0), {0.3, 0.5, 0.7}, 1024},
      {"warped_arctan/hyperbolic", w, hyperbolic(), {0.5, kPi / 2, 2.5}, 64},
  };
  double worst_integral = 0.0, worst_fd = 0.0;
  for (const auto& c : cases) {
    for (double t : c.levels) {
      const auto m = levelsets::level_moments(c.u, c.chart, t, c.n);
      const double h = 1e-3;
      const double d1 = levelsets::length_differences(c.u, c.chart, t, h, c.n).first;
      const double d2 = levelsets::length_differences(c.u, c.chart, t, 2 * h, c.n).first;
      worst_integral = std::max(worst_integral, std::abs(m.Lp + m.phi_k));
      worst_fd = std::max(worst_fd, std::abs((4 * d1 - d2) / 3 + m.phi_k));
    }
  }
  v.require(worst_integral <= 1e-6, "|L' + int k/|grad u|| integral " + fmt(worst_integral) + " <= 1e-6");
  v.require(worst_fd <= 1e-6, "finite-difference L' " + fmt(worst_fd) + " <= 1e-6");
  return v;
}

Verdict cross_method() {
  Verdict v;
  struct Case {
    std::string name;
    HarmonicField u;
    Chart chart;
    double t;
    int n;
  };
  const std::vector<Case> cases{
      {"flat", catalog("log", {-1}), flat(1.0, kE2), -1.0, 512},
      {"cap", catalog("log", {-1}), cap(Domain::annulus(0.0, 3.0)), 0.0, 512},
      {"stereographic", catalog("log", {1}), Chart::conformal(factors::stereographic(), Domain::annulus(0.5, 3.0)),
       0.3, 512},
      {"hyperbolic", catalog("warped_arctan"), hyperbolic(), 1.0, 64},
      {"flat/log_plus_re", catalog("log_plus_re", {1.0, 0.1}), flat(1.0, 3.0), 0.5, 1024},
      {"mollified cone", harmonic::solve_annulus_dirichlet({kE2, 0.0, -2.0}),
       bic::mollify(bic::conical_factor(0.0, {{{1.5, 0.0}, 0.5}}), 0.3).chart(Domain::annulus(1.0, kE2)),
       -std::log(1.4), 2048},
  };
  double lo = 10.0, hi = -10.0;
  for (const auto& c : cases) {
    const auto m = levelsets::level_moments(c.u, c.chart, c.t, c.n);
    const auto a = levelsets::length_differences(c.u, c.chart, c.t, 4e-2, c.n);
    const auto b = levelsets::length_differences(c.u, c.chart, c.t, 2e-2, c.n);
    const double p1 = std::log2(std::abs(a.first - m.Lp) / std::abs(b.first - m.Lp));
    const double p2 = std::log2(std::abs(a.second - m.Lpp) / std::abs(b.second - m.Lpp));
    const bool ok = p1 >= 1.8 && p1 <= 2.2 && p2 >= 1.8 && p2 <= 2.2;
    lo = std::min({lo, p1, p2});
    hi = std::max({hi, p1, p2});
    if (!ok) v.require(false, c.name + " orders " + fmt(p1) + ", " + fmt(p2));
  }
  v.require(lo >= 1.8 && hi <= 2.2, "observed orders in [" + fmt(lo) + ", " + fmt(hi) + "] over 6 scenarios");
  return v;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    std::string title;
    std::function<Verdict()> run;
    double limit_seconds;
  };
  const double none = std::numeric_limits<double>::infinity();
  const std::vector<Criterion> criteria{
      {1, "flat annulus equality", flat_equality, 1.0},
      {2, "hyperbolic example", hyperbolic_example, 1.0},
      {3, "sphere-cap counterexample", counterexample, 5.0},
      {4, "identity residuals", identity_suite, 2.0},
      {5, "curvature PDE suite", pde_suite, 5.0},
      {6, "pinched bound", pinched_bound, none},
      {7, "conical convexity", bic_convexity, 30.0},
      {8, "principle audits and L' identity", principle_audits, none},
      {9, "cross-method coherence", cross_method, none},
  };
  bool all = true;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v.require(false, std::string("exception: ") + e.what());
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (std::isfinite(c.limit_seconds)) {
      v.require(seconds < c.limit_seconds, "runtime " + fmt(seconds) + " s < " + fmt(c.limit_seconds) + " s");
    } else {
      v.detail += "; runtime " + fmt(seconds) + " s";
    }
    std::printf("criterion %d %s: %s (%s)\n", c.id, c.title.c_str(), v.pass ? "PASS" : "FAIL", v.detail.c_str());
    all = all && v.pass;
  }
  return all ? 0 : 1;
}
