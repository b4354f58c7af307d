#include <cmath>
#include <numbers>
#include <vector>

#include "levelflow/curvature_flow.hpp"
#include "levelflow/errors.hpp"
#include "levelflow/harmonic.hpp"
#include "levelflow/levelsets.hpp"
#include "levelflow/sampling.hpp"
#include "test_main.hpp"

using namespace levelflow;
using namespace levelflow::curvature_flow;

namespace {

HarmonicField catalog(std::string_view name, std::vector<double> params = {}) {
  return harmonic::catalog_field(name, std::span<const double>(params));
}

Chart flat(double r0, double r1) { return Chart::conformal(factors::flat(), Domain::annulus(r0, r1)); }

Chart cap(Domain d) { return Chart::conformal(factors::quadratic(-0.1), d); }

// Off-centre disc where Re z has nonvanishing k and h on the cap metric.
const Point2 kDiscCenter{1.2, 1.0};
Chart cap_disc() { return cap(Domain::disc(0.8, kDiscCenter)); }

const StencilOptions kExact{LaplacianMode::exact_jet, 0.0};

StencilOptions central(double h) { return {LaplacianMode::central, h}; }

// -div of the unit gradient (div of its rotation) by nested central differences of its flux.
double fd_divergence_curvature(const HarmonicField& u, const Chart& chart, Point2 p, double h, bool star) {
  auto flux = [&](Point2 q) -> Point2 {
    const auto m = chart.metric(q);
    const auto j = u.jet(q);
    const double E = m.E.value(), G = m.G.value(), s = std::sqrt(E * G);
    const double ux = j.derivative(1, 0), uy = j.derivative(0, 1);
    const double g = std::sqrt(ux * ux / E + uy * uy / G);
    if (star) return {s * (uy / s) / g, s * (-ux / s) / g};
    return {s * ux / (E * g), s * uy / (G * g)};
  };
  const auto m = chart.metric(p);
  const double s = std::sqrt(m.E.value() * m.G.value());
  const double dx = (flux({p.x + h, p.y}).x - flux({p.x - h, p.y}).x) / (2 * h);
  const double dy = (flux({p.x, p.y + h}).y - flux({p.x, p.y - h}).y) / (2 * h);
  return (star ? 1.0 : -1.0) * (dx + dy) / s;
}

}  // namespace

TEST_CASE("level curvature examples") {
  const auto u = catalog("log", {-1.0});
  for (Point2 p : annulus_points(1.0, 3.0, 20)) {
    CHECK(level_curvature_k(u, flat(1, 3), p) == doctest::Approx(1.0 / p.norm()).epsilon(1e-13));
    CHECK(std::abs(steepest_descent_curvature_h(u, flat(1, 3), p)) <= 1e-13);
  }
  const auto x = catalog("re_poly", {1.0});
  for (Point2 p : annulus_points(0.5, 3.0, 20)) CHECK(std::abs(level_curvature_k(x, flat(0.5, 3), p)) <= 1e-14);

  // Radial field on the warped hyperbolic cylinder: |k| = |tanh t|, meridians are geodesics.
  const auto w = catalog("warped_arctan");
  const Chart hyp = hyperbolic_cylinder(std::exp(2.0), -3, 3);
  for (double t : {-2.0, -0.5, 0.0, 0.7, 2.5}) {
    const Point2 p{t, 1.3};
    CHECK(std::abs(level_curvature_k(w, hyp, p)) == doctest::Approx(std::abs(std::tanh(t))).epsilon(1e-12));
    CHECK(std::abs(steepest_descent_curvature_h(w, hyp, p)) <= 1e-12);
    const auto s = curvature_sample(w, hyp, p);
    CHECK(s.phi_k == doctest::Approx(-std::sinh(t)).epsilon(1e-12));
    CHECK(s.phi_k * s.gradnorm == doctest::Approx(s.k).epsilon(1e-15));
  }

  // Steepest-descent lines of arg z are circles about the origin.
  const auto a = catalog("arg");
  for (Point2 p : annulus_points(0.5, 2.0, 20, 3)) {
    if (p.x < 0.0 && std::abs(p.y) < 0.1) continue;
    CHECK(steepest_descent_curvature_h(a, flat(0.5, 2), p) == doctest::Approx(1.0 / p.norm()).epsilon(1e-12));
  }

  CHECK_THROWS_AS(level_curvature_k(catalog("re_z_plus_inv", {1.0}), flat(0.5, 2), {1.0, 0.0}), CriticalPointError);
  CHECK_THROWS_AS(level_curvature_k(u, flat(1, 3), {0.5, 0.0}), DomainError);
}

TEST_CASE("curvatures match the finite-difference divergence at second order") {
  const std::vector<std::pair<HarmonicField, Chart>> cases{
      {catalog("re_poly", {2.0}), cap_disc()},
      {catalog("log_plus_re", {-1.0, 0.1}), cap(Domain::annulus(0.5, 2.0))},
      {catalog("re_poly", {3.0}), Chart::conformal(factors::stereographic(), Domain::annulus(0.5, 2.0))},
  };
  for (const auto& [u, chart] : cases) {
    CAPTURE(u.label());
    const Point2 p = chart.domain().kind == DomainKind::disc ? Point2{1.5, 1.2} : Point2{0.6, 1.1};
    for (bool star : {false, true}) {
      const double exact = star ? steepest_descent_curvature_h(u, chart, p) : level_curvature_k(u, chart, p);
      const double e1 = std::abs(fd_divergence_curvature(u, chart, p, 1e-2, star) - exact);
      const double e2 = std::abs(fd_divergence_curvature(u, chart, p, 5e-3, star) - exact);
      CHECK(e2 <= 1e-4);
      const double order = std::log2(e1 / e2);
      CHECK(order >= 1.8);
      CHECK(order <= 2.2);
    }
  }
}

TEST_CASE("rotation duality on flat charts") {
  // With u + i v holomorphic, h of u equals k of v.
  const std::vector<std::tuple<HarmonicField, HarmonicField, double>> pairs{
      {catalog("arg"), catalog("log", {1.0}), -1.0},
      {catalog("re_poly", {3.0}), catalog("im_poly", {3.0}), 1.0},
      {catalog("im_poly", {3.0}), catalog("re_poly", {3.0}), -1.0},
      {catalog("re_poly", {2.0}), catalog("im_poly", {2.0}), 1.0},
  };
  const Chart c = flat(0.5, 2.0);
  for (const auto& [u, v, sign] : pairs) {
    CAPTURE(u.label());
    for (Point2 p : annulus_points(0.5, 2.0, 50, 11)) {
      if (p.x < 0.0 && std::abs(p.y) < 0.1) continue;
      const double h = steepest_descent_curvature_h(u, c, p);
      const double k = level_curvature_k(HarmonicField::combine(sign, v, 0.0, v), c, p);
      CHECK(std::abs(h - k) <= 1e-8);
    }
  }
}

TEST_CASE("sign coherence under u -> -u") {
  const auto u = catalog("log", {-1.0});
  const auto v = catalog("log", {1.0});
  const Chart c = flat(1.0, std::exp(2.0));
  for (Point2 p : annulus_points(1.0, std::exp(2.0), 30)) {
    CHECK(level_curvature_k(u, c, p) > 0.0);
    CHECK(level_curvature_k(v, c, p) == doctest::Approx(-level_curvature_k(u, c, p)).epsilon(1e-14));
  }
  for (const auto& f : {u, v}) {
    const double t = f.value({2.0, 0.0});
    const auto m = levelsets::level_moments(f, c, t);
    CHECK(std::abs(m.Lp + m.phi_k) <= 1e-10);
  }
}

TEST_CASE("pde1 on closed forms") {
  const auto u = catalog("log", {-1.0});
  for (Point2 p : annulus_points(1.0, 3.0, 20)) {
    CHECK(std::abs(pde1_residual(u, flat(1, 3), p)) <= 1e-6);
    CHECK(std::abs(pde1_residual(u, flat(1, 3), p, kExact)) <= 1e-12);
    CHECK(std::abs(pde1_star_residual(u, flat(1, 3), p)) <= 1e-6);
    CHECK(std::abs(pde1_star_residual(u, flat(1, 3), p, kExact)) <= 1e-12);
  }
  const auto w = catalog("warped_arctan");
  const Chart hyp = hyperbolic_cylinder(std::exp(2.0), -3, 3);
  for (Point2 p : box_points(-2.5, 2.5, 0.0, 6.0, 30)) {
    CHECK(std::abs(pde1_residual(w, hyp, p)) <= 1e-6);
    CHECK(std::abs(pde1_residual(w, hyp, p, kExact)) <= 1e-10);
    CHECK(std::abs(pde1_star_residual(w, hyp, p)) <= 1e-10);
  }
  CHECK_THROWS_AS(pde1_residual(u, flat(1, 3), {1.0005, 0.0}), DomainError);
}

TEST_CASE("pde1 and its rotated form on the cap") {
  const auto u = catalog("log", {-1.0});
  const Chart annulus = cap(Domain::annulus(0.5, 2.5));
  const auto x = catalog("re_poly", {1.0});
  const Chart disc = cap_disc();

  struct Case {
    const HarmonicField* field;
    const Chart* chart;
    bool star;
    std::vector<Point2> points;
  };
  const std::vector<Case> cases{
      {&u, &annulus, false, annulus_points(0.6, 2.4, 50)},
      {&x, &disc, true, annulus_points(0.0, 0.7, 50, 5, kDiscCenter)},
      {&x, &disc, false, annulus_points(0.0, 0.7, 20, 9, kDiscCenter)},
  };
  for (const auto& c : cases) {
    CAPTURE(c.star);
    auto residual = [&](Point2 p, const StencilOptions& o) {
      return c.star ? pde1_star_residual(*c.field, *c.chart, p, o) : pde1_residual(*c.field, *c.chart, p, o);
    };
    double source_max = 0.0;
    for (Point2 p : c.points) {
      const auto s = curvature_sample(*c.field, *c.chart, p);
      CHECK(std::abs(residual(p, kExact)) <= 1e-10);
      CHECK(std::abs(residual(p, {})) <= fd_tolerance(c.star ? s.phi_h : s.phi_k));
      source_max = std::max(source_max, std::abs(c.star ? s.gradK_star : s.gradK_u) / (s.gradnorm * s.gradnorm));
    }
    // The source term is not negligible, so its sign is tested.
    CHECK(source_max >= 1e-2);

    const Point2 p = c.points.front();
    const double e1 = std::abs(residual(p, central(2e-2)));
    const double e2 = std::abs(residual(p, central(1e-2)));
    const double order = std::log2(e1 / e2);
    CHECK(order >= 1.8);
    CHECK(order <= 2.2);
  }
}

TEST_CASE("pde2 gap equals |grad phi|^2 / phi^2") {
  SUBCASE("flat") {
    const auto g = pde2_gap(catalog("log", {-1.0}), flat(1, 3), {1.5, 0.4});
    CHECK(std::abs(g.gap) <= 1e-6);
    CHECK(std::abs(g.theoretical_gap) <= 1e-12);
    const auto a = pde2_star_gap(catalog("arg"), flat(0.5, 2), {0.3, 1.1});
    CHECK(std::abs(a.gap) <= 1e-6);
    CHECK(std::abs(a.theoretical_gap) <= 1e-12);
    CHECK_THROWS_AS(pde2_star_gap(catalog("log", {-1.0}), flat(1, 3), {1.5, 0.4}), PreconditionError);
  }
  SUBCASE("warped hyperbolic") {
    const Chart hyp = hyperbolic_cylinder(std::exp(2.0), -3, 3);
    const auto g = pde2_gap(catalog("warped_arctan"), hyp, {0.5, 2.0});
    const double coth = std::cosh(0.5) / std::sinh(0.5);
    CHECK(g.theoretical_gap == doctest::Approx(coth * coth).epsilon(1e-5));
    CHECK(g.gap == doctest::Approx(coth * coth).epsilon(1e-5));
    CHECK_THROWS_AS(pde2_gap(catalog("warped_arctan"), hyp, {0.0, 2.0}), PreconditionError);
  }
  SUBCASE("cap") {
    const auto u = catalog("log", {-1.0});
    const Chart annulus = cap(Domain::annulus(0.5, 1.8));
    for (Point2 p : annulus_points(0.6, 1.6, 50)) {
      const auto s = curvature_sample(u, annulus, p);
      REQUIRE(std::abs(s.k) > 1e-3);
      const auto g = pde2_gap(u, annulus, p);
      CHECK(g.gap >= -1e-6);
      CHECK(std::abs(g.gap - g.theoretical_gap) <= 1e-4);
      const auto e = pde2_gap(u, annulus, p, kExact);
      CHECK(std::abs(e.gap - e.theoretical_gap) <= 1e-10);
    }
    const auto x = catalog("re_poly", {1.0});
    for (Point2 p : annulus_points(0.0, 0.7, 50, 5, kDiscCenter)) {
      const auto g = pde2_star_gap(x, cap_disc(), p);
      CHECK(g.gap >= -1e-6);
      CHECK(std::abs(g.gap - g.theoretical_gap) <= 1e-4);
      const auto e = pde2_star_gap(x, cap_disc(), p, kExact);
      CHECK(std::abs(e.gap - e.theoretical_gap) <= 1e-10);
    }
  }
}

TEST_CASE("principle audits") {
  const Chart hyp = hyperbolic_cylinder(std::exp(2.0), -3, 3);
  const auto w = catalog("warped_arctan");
  const Domain band = Domain::band(-1.0, 1.5);
  for (auto c : {CorollaryCase::case1, CorollaryCase::case2}) {
    const auto r = principle_audit(w, hyp, band, Quantity::phi_k, c);
    CHECK(r.verdict == Verdict::pass);
    // phi_k = -sinh t: maximum at t = -1, minimum at t = 1.5.
    CHECK(r.boundary_extremum.point.x == (c == CorollaryCase::case1 ? -1.0 : 1.5));
    CHECK(std::abs(r.boundary_extremum.value) == doctest::Approx(std::sinh(std::abs(r.boundary_extremum.point.x))));
  }
  CHECK(principle_audit(w, hyp, band, Quantity::phi_k, CorollaryCase::case3).verdict == Verdict::hypotheses_unmet);

  const auto u = catalog("log", {-1.0});
  const auto f = principle_audit(u, flat(1, 3), Domain::annulus(1.2, 2.8), Quantity::phi_k, CorollaryCase::case1);
  CHECK(f.verdict == Verdict::pass);
  CHECK(f.interior_extremum.value == doctest::Approx(1.0).epsilon(1e-14));

  const Chart cap_annulus = cap(Domain::annulus(0.4, 2.0));
  const auto c = principle_audit(u, cap_annulus, Domain::annulus(0.5, 1.5), Quantity::k, CorollaryCase::boundary_minimum);
  CHECK(c.hypothesis_flags.K_nonnegative());
  CHECK(c.hypothesis_flags.gradK_u_nonpositive());
  CHECK(c.verdict == Verdict::pass);
  CHECK(c.boundary_extremum.point.norm() == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(principle_audit(u, cap_annulus, Domain::annulus(0.5, 1.5), Quantity::ln_abs_k, CorollaryCase::boundary_minimum)
            .verdict == Verdict::pass);
  CHECK(principle_audit(u, cap_annulus, Domain::annulus(0.5, 1.5), Quantity::k, CorollaryCase::interior_minimum_bound)
            .verdict == Verdict::vacuous);
  CHECK(principle_audit(u, cap_annulus, Domain::annulus(0.5, 1.5), Quantity::phi_k, CorollaryCase::case1).verdict ==
        Verdict::hypotheses_unmet);

  CHECK_THROWS_AS(principle_audit(catalog("re_z_plus_inv", {1.0}), flat(0.5, 2), Domain::annulus(0.6, 1.8),
                                  Quantity::k, CorollaryCase::boundary_minimum),
                  CriticalPointError);
  CHECK_THROWS_AS(principle_audit(u, flat(1, 3), Domain::annulus(0.5, 2), Quantity::k, CorollaryCase::boundary_minimum),
                  DomainError);
  CHECK_THROWS_AS(principle_audit(u, flat(1, 3), Domain::annulus(1.2, 2), Quantity::k, CorollaryCase::case1),
                  DomainError);
}

TEST_CASE("audit serialisation and determinism") {
  const auto u = catalog("log_plus_re", {-1.0, 0.1});
  const Chart c = cap(Domain::annulus(0.4, 2.0));
  const AuditOptions small{64, 64, 256};
  const auto a = principle_audit(u, c, Domain::annulus(1.1, 1.9), Quantity::phi_k, CorollaryCase::case4, small);
  const auto b = principle_audit_serial(u, c, Domain::annulus(1.1, 1.9), Quantity::phi_k, CorollaryCase::case4, small);
  CHECK(a.interior_extremum.value == b.interior_extremum.value);
  CHECK(a.boundary_extremum.point.x == b.boundary_extremum.point.x);
  CHECK(a.tolerance == b.tolerance);
  CHECK(a.verdict == b.verdict);

  const auto j = to_json(a);
  std::vector<std::string> keys;
  for (const auto& [k, v] : j.items()) keys.push_back(k);
  const std::vector<std::string> expected{"quantity",          "case",    "hypothesis_flags", "interior_extremum",
                                          "boundary_extremum", "verdict", "tolerance"};
  CHECK(keys == expected);
  CHECK(j["quantity"] == "phi_k");
  CHECK(j["case"] == "case4");
  CHECK(parse_quantity("ln_abs_h") == Quantity::ln_abs_h);
  CHECK(parse_corollary_case("case3") == CorollaryCase::case3);
  CHECK_THROWS_AS(parse_quantity("q"), DomainError);
}

TEST_CASE("slope bound on ln L") {
  SUBCASE("flat annulus") {
    const auto u = harmonic::solve_annulus_dirichlet({std::exp(2.0), 0.0, -2.0});
    const Chart c = flat(1.0, std::exp(2.0));
    const auto prof = levelsets::length_profile(u, c, levelsets::inset_grid(-2.0, 0.0, 10));
    const auto r = logL_slope_bound(u, c, prof);
    CHECK(r.slope_case == SlopeCase::nonpositive_curvature);
    CHECK(r.bound == 0.0);
    for (double s : r.slope) CHECK(s == doctest::Approx(-1.0).epsilon(1e-10));
    CHECK(r.bound_holds);
    CHECK(r.identity_holds);
  }
  SUBCASE("warped hyperbolic") {
    const auto w = catalog("warped_arctan");
    const Chart hyp = hyperbolic_cylinder(std::exp(2.0), -3, 3);
    std::vector<double> s_grid;
    for (int i = 0; i < 12; ++i) s_grid.push_back(0.2 + 1.3 * i / 11);
    const auto prof = levelsets::length_profile(w, hyp, s_grid);
    const auto r = logL_slope_bound(w, hyp, prof);
    CHECK(r.slope_case == SlopeCase::nonpositive_curvature);
    for (std::size_t i = 0; i < s_grid.size(); ++i) {
      CHECK(r.slope[i] == doctest::Approx(-std::cos(s_grid[i]) / std::sin(s_grid[i])).epsilon(1e-8));
    }
    CHECK(r.bound_holds);
    CHECK(r.identity_holds);
  }
  SUBCASE("cap is skipped") {
    const auto u = catalog("log", {-1.0});
    const Chart c = cap(Domain::annulus(0.5, 2.0));
    const auto prof = levelsets::length_profile(u, c, levelsets::inset_grid(-std::log(2.0), std::log(2.0), 8));
    const auto r = logL_slope_bound(u, c, prof);
    CHECK(r.slope_case == SlopeCase::none);
    CHECK_FALSE(r.diagnostic.empty());
    CHECK(r.identity_holds);
  }
}
