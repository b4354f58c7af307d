#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "levelflow/errors.hpp"
#include "levelflow/harmonic.hpp"
#include "levelflow/levelsets.hpp"
#include "levelflow/quadrature.hpp"
#include "test_main.hpp"

using namespace levelflow;
using namespace levelflow::levelsets;

namespace {

const double kPi = std::numbers::pi;
const double kLnLambda = 2.0;  // lambda = e^2

HarmonicField catalog(std::string_view name, std::vector<double> params = {}) {
  return harmonic::catalog_field(name, std::span<const double>(params));
}

HarmonicField neg_log() { return catalog("log", {-1.0}); }

Chart flat(double r0, double r1) { return Chart::conformal(factors::flat(), Domain::annulus(r0, r1)); }
Chart flat_e2() { return flat(1.0, std::exp(2.0)); }
Chart hyperbolic() { return hyperbolic_cylinder(std::exp(kLnLambda), -4.0, 4.0); }
Chart sphere_cap() { return Chart::conformal(factors::quadratic(-0.1), Domain::annulus(0.0, 3.0)); }

double hyp_L(double s) { return kLnLambda / std::sin(s); }
double hyp_Lp(double s) { return -kLnLambda * std::cos(s) / (std::sin(s) * std::sin(s)); }
double hyp_Lpp(double s) { return kLnLambda * (1 + std::cos(s) * std::cos(s)) / std::pow(std::sin(s), 3); }

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("radial levels are exact circles") {
  const auto u = neg_log();
  for (double t : {-1.9, -1.0, -0.2}) {
    const auto c = extract_level_curve(u, flat_e2(), t, 256);
    CHECK(c.method == ExtractionMethod::radial_circle);
    CHECK(c.closed);
    double hd = 0.0;
    for (const auto& s : c.samples) {
      hd = std::max(hd, std::abs(s.point.norm() - std::exp(-t)));
      CHECK(std::abs(u.value(s.point) - t) <= 1e-9 * 2.0);
      CHECK(s.weight() > 0.0);
    }
    CHECK(hd <= 1e-10);
    CHECK(c.euclidean_length() == doctest::Approx(2 * kPi * std::exp(-t)).epsilon(1e-13));
  }
  CHECK_THROWS_AS(extract_level_curve(u, flat_e2(), 0.5, 64), DomainError);
  CHECK_THROWS_AS(extract_level_curve(u, flat_e2(), -2.0, 64), DomainError);
}

TEST_CASE("warped levels by monotone root-find") {
  const auto w = catalog("warped_arctan");
  for (double s : {0.3, 1.0, kPi / 2, 2.5}) {
    const auto c = extract_level_curve(w, hyperbolic(), s, 64);
    CHECK(c.method == ExtractionMethod::warped_circle);
    CHECK(c.samples[0].point.x == doctest::Approx(std::log(std::tan(0.5 * s))).epsilon(1e-12));
    for (const auto& smp : c.samples) CHECK(std::abs(w.value(smp.point) - s) <= 1e-9 * kPi);
  }
  CHECK_THROWS_AS(extract_level_curve(w, hyperbolic(), 3.2, 64), DomainError);
  CHECK_THROWS_AS(extract_level_curve(catalog("re_poly", {1.0}), hyperbolic(), 0.5, 64), PreconditionError);
}

TEST_CASE("non-radial levels") {
  // -ln|z| + 0.1 Re z on 1 < |z| < 2: boundary ranges [-0.1, 0.1] and [-0.893, -0.493].
  const auto u = catalog("log_plus_re", {-1.0, 0.1});
  const Chart c = flat(1.0, 2.0);
  const auto star = extract_level_curve(u, c, -0.3, 512);
  CHECK(star.method == ExtractionMethod::star_shaped);
  for (const auto& s : star.samples) CHECK(std::abs(u.value(s.point) - (-0.3)) <= 1e-9);

  const auto traced = trace_level_curve(u, c, -0.3, 2048);
  CHECK(traced.method == ExtractionMethod::traced);
  for (const auto& s : traced.samples) CHECK(std::abs(u.value(s.point) - (-0.3)) <= 1e-9);
  // Polygon trapezoid is second order; the star-shaped rule is spectral.
  CHECK(rel(length(traced, c), length(star, c)) <= 1e-5);

  // Re(z + 1/z) = 1.6 on 1.2 < |z| < 2 is a pair of arcs ending on the boundary.
  CHECK_THROWS_AS(extract_level_curve(catalog("re_z_plus_inv", {1.0}), flat(1.2, 2.0), 1.6, 256), TopologyError);

  // A level through a saddle: Re(z + 1/z) = 2 passes through z = 1.
  CHECK_THROWS_AS(trace_level_curve(catalog("re_z_plus_inv", {1.0}), flat(0.5, 2.0), 2.0, 256), CriticalPointError);
}

TEST_CASE("length examples") {
  const auto u = neg_log();
  for (double r : {1.3, 2.0, 5.0}) {
    CHECK(length(extract_level_curve(u, flat_e2(), -std::log(r), 64), flat_e2()) ==
          doctest::Approx(2 * kPi * r).epsilon(1e-14));
  }
  const auto w = catalog("warped_arctan");
  CHECK(length(extract_level_curve(w, hyperbolic(), kPi / 2, 64), hyperbolic()) == doctest::Approx(2.0).epsilon(1e-12));

  // Off-centre factor |z - 1.5|: elliptic-integral oracle 2 (a + b) E(k), k = 2 sqrt(ab) / (a + b).
  const Chart off = Chart::conformal(factors::log_distance({1.5, 0.0}), Domain::annulus(0.1, 1.4), {{1.5, 0.0}});
  const double a = 1.5, b = 0.5;
  const double oracle = 0.5 * 4 * (a + b) * std::comp_ellint_2(2 * std::sqrt(a * b) / (a + b));
  CHECK(rel(length(extract_level_curve(u, off, -std::log(0.5), 512), off), oracle) <= 1e-8);

  // Circle through the singular point: integral of |e^{i th} - 1| = 8.
  const Chart through = Chart::conformal(factors::log_distance({1.0, 0.0}), Domain::annulus(0.1, 3.0), {{1.0, 0.0}});
  CHECK(rel(length(extract_level_curve(u, through, 0.0, 64), through), 8.0) <= 1e-9);
}

TEST_CASE("quadrature convergence and reparametrisation") {
  const auto u = neg_log();
  const Chart c = sphere_cap();
  const double t = -std::log(1.5);
  const double l512 = length(extract_level_curve(u, c, t, 512), c);
  const double l1024 = length(extract_level_curve(u, c, t, 1024), c);
  CHECK(rel(l512, l1024) <= 1e-10);

  const auto v = catalog("log_plus_re", {-1.0, 0.1});
  const double s256 = length(extract_level_curve(v, flat(1, 2), -0.3, 256), flat(1, 2));
  const double s1000 = length(extract_level_curve(v, flat(1, 2), -0.3, 1000), flat(1, 2));
  CHECK(rel(s256, s1000) <= 1e-10);
}

TEST_CASE("first and second variation integrals") {
  const auto u = neg_log();
  for (double t : {-1.5, -0.5}) {
    CHECK(dlength_integral(u, flat_e2(), t) == doctest::Approx(-2 * kPi * std::exp(-t)).epsilon(1e-12));
    CHECK(d2length_integral(u, flat_e2(), t) == doctest::Approx(2 * kPi * std::exp(-t)).epsilon(1e-12));
    CHECK(invgrad2_integral(u, flat_e2(), t) == doctest::Approx(2 * kPi * std::exp(-3 * t)).epsilon(1e-12));
  }
  const auto w = catalog("warped_arctan");
  for (double s : {0.4, 1.0, kPi / 2, 2.2, kPi - 0.4}) {
    CHECK(std::abs(dlength_integral(w, hyperbolic(), s, 64) - hyp_Lp(s)) <= 1e-6 * std::abs(hyp_Lp(s)) + 1e-12);
    CHECK(rel(d2length_integral(w, hyperbolic(), s, 64), hyp_Lpp(s)) <= 1e-6);
  }
  CHECK(std::abs(dlength_integral(w, hyperbolic(), kPi / 2, 64)) <= 1e-12);

  const Chart c = sphere_cap();
  const double t = -std::log(1.5);
  const auto fd = length_differences(u, c, t, 1e-3);
  CHECK(rel(d2length_integral(u, c, t), fd.second) <= 1e-4);
  CHECK(rel(dlength_integral(u, c, t), fd.first) <= 1e-4);
}

TEST_CASE("integral formulas agree with finite differences at second order") {
  struct Case {
    const char* name;
    HarmonicField u;
    Chart chart;
    double t;
  };
  const std::vector<Case> cases{
      {"flat", neg_log(), flat_e2(), -1.0},
      {"sphere-cap", neg_log(), sphere_cap(), -std::log(1.5)},
      {"hyperbolic", catalog("warped_arctan"), hyperbolic(), 1.0},
      {"star-shaped", catalog("log_plus_re", {-1.0, 0.1}), flat(1, 2), -0.3},
  };
  for (const auto& c : cases) {
    CAPTURE(c.name);
    const double lp = dlength_integral(c.u, c.chart, c.t, 512);
    const double lpp = d2length_integral(c.u, c.chart, c.t, 512);
    const auto coarse = length_differences(c.u, c.chart, c.t, 0.04, 512);
    const auto fine = length_differences(c.u, c.chart, c.t, 0.02, 512);
    const double order1 = std::log2(std::abs(coarse.first - lp) / std::abs(fine.first - lp));
    const double order2 = std::log2(std::abs(coarse.second - lpp) / std::abs(fine.second - lpp));
    CHECK(order1 >= 1.8);
    CHECK(order1 <= 2.2);
    CHECK(order2 >= 1.8);
    CHECK(order2 <= 2.2);
  }
}

TEST_CASE("length profiles") {
  const auto u = neg_log();
  const auto grid = inset_grid(-2.0, 0.0, 50);
  CHECK(grid.front() == doctest::Approx(-1.998));
  const auto flat_profile = length_profile(u, flat_e2(), grid, {2048, 0.0});
  CHECK(flat_profile.fd_step == doctest::Approx(2e-3));
  for (double v : flat_profile.lnL_pp) CHECK(std::abs(v) <= 1e-8);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(flat_profile.L[i] > 0.0);
    CHECK(rel(flat_profile.L_fd_p[i], flat_profile.Lp[i]) <= 1e-4);
    CHECK(rel(flat_profile.L_fd_pp[i], flat_profile.Lpp[i]) <= 1e-4);
  }

  const auto w = catalog("warped_arctan");
  const auto sgrid = inset_grid(0.4, kPi - 0.4, 40);
  const auto hp = length_profile(w, hyperbolic(), sgrid, {64, 0.0});
  for (std::size_t i = 0; i < sgrid.size(); ++i) {
    const double s = sgrid[i];
    CHECK(hp.L[i] * std::sin(s) == doctest::Approx(2.0).epsilon(1e-8));
    CHECK(std::abs(hp.lnL_pp[i] * std::sin(s) * std::sin(s) - 1.0) <= 1e-6);
  }

  // Thread count does not change a single bit.
  const auto serial = length_profile_serial(u, sphere_cap(), inset_grid(-1.0, 1.0, 24));
  const auto parallel = length_profile(u, sphere_cap(), inset_grid(-1.0, 1.0, 24));
  CHECK(serial.L == parallel.L);
  CHECK(serial.Lpp == parallel.Lpp);
  CHECK(serial.L_fd_pp == parallel.L_fd_pp);

  CHECK_THROWS_AS(length_profile(u, flat_e2(), inset_grid(-2.0, 0.0, 5)), DomainError);
  CHECK_THROWS_AS(length_profile(u, flat_e2(), inset_grid(-2.5, 0.0, 10)), DomainError);

  std::ostringstream csv;
  write_profile_csv(csv, flat_profile);
  std::istringstream in(csv.str());
  std::string header, first;
  std::getline(in, header);
  std::getline(in, first);
  CHECK(header == "t,L,Lp,Lpp,lnL_pp,L_fd_p,L_fd_pp,aux_invgrad2");
  CHECK(first.rfind("-1.998,", 0) == 0);
  CHECK(std::count(first.begin(), first.end(), ',') == 7);
}

TEST_CASE("log-convexity verdicts") {
  const auto u = neg_log();
  const auto flat_r = log_convexity_check(length_profile(u, flat_e2(), inset_grid(-2.0, 0.0, 50)));
  CHECK(flat_r.pass);
  CHECK(std::abs(flat_r.min_lnL_pp) <= 1e-8);
  CHECK(std::abs(flat_r.min_discrete) <= 1e-8);

  const auto w = catalog("warped_arctan");
  const auto sgrid = inset_grid(0.4, kPi - 0.4, 40);
  const auto hyp_r = log_convexity_check(length_profile(w, hyperbolic(), sgrid, {64, 0.0}));
  CHECK(hyp_r.pass);
  CHECK(hyp_r.min_lnL_pp >= 1.0);
  double oracle = 1e300;
  for (double s : sgrid) oracle = std::min(oracle, 1.0 / std::pow(std::sin(s), 2));
  CHECK(hyp_r.min_lnL_pp == doctest::Approx(oracle).epsilon(1e-6));

  // Positive curvature near the centre of the cap: (ln L)'' = -0.4 r^2 / (1 - 0.1 r^2)^2 < 0.
  const auto cap = length_profile(u, sphere_cap(), inset_grid(-1.0, 2.0, 30));
  const auto cap_r = log_convexity_check(cap);
  CHECK_FALSE(cap_r.pass);
  CHECK(cap_r.min_lnL_pp < -0.01);
  for (std::size_t i = 0; i < cap.size(); ++i) {
    const double r = std::exp(-cap.t[i]);
    CHECK(cap.lnL_pp[i] == doctest::Approx(-0.4 * r * r / std::pow(1 - 0.1 * r * r, 2)).epsilon(1e-9));
  }

  // The integral-formula lnL_pp matches the discrete second difference of ln L at O(dt^2).
  const auto fine = length_profile(u, sphere_cap(), inset_grid(0.0, 2.0, 101));
  const auto d = discrete_second_differences(fine.t, fine.L);
  for (std::size_t i = 0; i < d.size(); ++i) CHECK(std::abs(d[i] - fine.lnL_pp[i + 1]) <= 1e-3 * std::abs(fine.lnL_pp[i + 1]));
}

TEST_CASE("sharp and pinched curvature bounds") {
  const auto w = catalog("warped_arctan");
  for (double s : {0.5, 1.2, kPi / 2, 2.6}) CHECK(std::abs(sharp_bound_gap(w, hyperbolic(), s, -1.0, 64)) <= 1e-6);

  const auto u = neg_log();
  CHECK(std::abs(sharp_bound_gap(u, flat_e2(), -1.0, 0.0)) <= 1e-10);
  CHECK_THROWS_AS(sharp_bound_gap(u, flat_e2(), -1.0, -0.5), PreconditionError);
  CHECK_THROWS_AS(sharp_bound_gap(u, flat_e2(), -1.0, 0.5), PreconditionError);
  // Formula value without the curvature check: (-0.5 / 2 pi r) * 2 pi r^3 = -0.5 r^2.
  for (double r : {1.5, 3.0}) {
    CHECK(invgrad2_integral(u, flat_e2(), -std::log(r)) == doctest::Approx(2 * kPi * r * r * r).epsilon(1e-12));
    CHECK(sharp_bound_value(u, flat_e2(), -std::log(r), -0.5) == doctest::Approx(-0.5 * r * r).epsilon(1e-10));
  }

  double worst = 1e300;
  for (int i = 0; i < 100; ++i) {
    const double s = 0.1 + (kPi - 0.2) * i / 99;
    worst = std::min(worst, pinched_bound_check(w, hyperbolic(), s, 1.0, 1.0, 64));
  }
  CHECK(worst >= -1e-8);
  CHECK(pinched_bound_check(w, hyperbolic(), kPi / 2, 1.0, 1.0, 64) == doctest::Approx(1 - 4 / (kPi * kPi)).epsilon(1e-8));
  CHECK_THROWS_AS(pinched_bound_check(w, hyperbolic(), kPi / 2, 0.5, 0.5, 64), PreconditionError);

  // Flat with kappa2 = 0 reduces to (ln L)'' >= 0 on positive levels.
  const auto v = catalog("log", {1.0});
  CHECK(std::abs(pinched_bound_check(v, flat_e2(), 1.0, 1.0, 0.0)) <= 1e-10);
  CHECK_THROWS_AS(pinched_bound_check(u, flat_e2(), -1.0, 1.0, 0.0), PreconditionError);
}

TEST_CASE("asymptotic defect near a normalised centre") {
  const double limit = -4 * kPi * kPi * 0.4;
  for (double r : {0.05, 0.03, 0.01}) {
    const double t = -std::log(r);
    CHECK(rel(asymptotic_defect(factors::quadratic(-0.1), t), limit) <= 0.02);
    CHECK(rel(asymptotic_defect(factors::quadratic(0.1), t), -limit) <= 0.02);
    CHECK(std::abs(asymptotic_defect(factors::flat(), t)) <= 1e-9);
  }
  CHECK_THROWS_AS(asymptotic_defect(factors::flat(0.3), 3.0), PreconditionError);
  const auto tilted = ScalarField::analytic("tilt", [](const auto& x, const auto&) { return 0.1 * x; });
  CHECK_THROWS_AS(asymptotic_defect(tilted, 3.0), PreconditionError);
}

TEST_CASE("pairwise summation and adaptive quadrature") {
  std::vector<double> ones(1000, 0.1);
  CHECK(quadrature::pairwise_sum(ones) == doctest::Approx(100.0).epsilon(1e-15));
  // Integrable endpoint singularity: integral of x^{-1/2} over (0, 1] is 2.
  const auto r = quadrature::integrate_graded([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0);
  CHECK(r.value == doctest::Approx(2.0).epsilon(1e-10));
  // Periodic integral of |sin(th/2)|^{-1/2} with a break at 0 equals 4 int_0^{pi/2} sin^{-1/2} = 2 B(1/4, 1/2).
  // Both panel ends sit on the break (0 and 2 pi), so |sin(th/2)| = |sin(offset/2)| exactly.
  const auto p = quadrature::integrate_periodic(
      [](double, double offset) { return 1.0 / std::sqrt(std::abs(std::sin(0.5 * offset))); }, {0.0});
  const double oracle = 4.0 * std::beta(0.25, 0.5) / 2.0;
  CHECK(p.value == doctest::Approx(oracle).epsilon(1e-9));
}
