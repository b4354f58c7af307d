#include "commands.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "CLI11.hpp"
#include "levelflow/errors.hpp"
#include "levelflow/geometry.hpp"
#include "levelflow/levelsets.hpp"
#include "levelflow/sampling.hpp"

namespace levelflow::cli {

using nlohmann::ordered_json;

namespace {

constexpr double kPi = std::numbers::pi;

double tolerance(double fallback, const std::optional<double>& configured, const RunOptions& o) {
  return configured ? *configured : fallback * o.tol_scale;
}

ordered_json header(const std::string& command, const ScenarioConfig* config, const RunOptions& o) {
  ordered_json j;
  j["command"] = command;
  if (config) {
    j["name"] = config->name;
    j["seed"] = config->seed;
  }
  j["tol_scale"] = o.tol_scale;
  return j;
}

ordered_json profile_json(const levelsets::LengthProfile& p) {
  ordered_json j;
  j["t"] = p.t;
  j["L"] = p.L;
  j["Lp"] = p.Lp;
  j["Lpp"] = p.Lpp;
  j["lnL_pp"] = p.lnL_pp;
  j["L_fd_p"] = p.L_fd_p;
  j["L_fd_pp"] = p.L_fd_pp;
  j["aux_invgrad2"] = p.aux_invgrad2;
  j["fd_step"] = p.fd_step;
  return j;
}

std::string profile_table(const levelsets::LengthProfile& p, TableFormat format) {
  if (format == TableFormat::json) return profile_json(p).dump(2) + "\n";
  std::ostringstream out;
  levelsets::write_profile_csv(out, p);
  return out.str();
}

void add_table(Outcome& outcome, const std::string& stem, const levelsets::LengthProfile& p, const RunOptions& o) {
  outcome.tables.emplace_back(stem, profile_table(p, o.format));
  if (o.format == TableFormat::json) outcome.report[stem] = profile_json(p);
}

double atom_level(const harmonic::DirichletSpec& d, Point2 z) {
  return d.t1 + (d.t2 - d.t1) * std::log(z.norm()) / std::log(d.R);
}

/// Moves the nearest grid level onto each target and re-sorts.
void snap_levels(std::vector<double>& t, const std::vector<double>& targets) {
  for (double e : targets) {
    auto nearest = std::min_element(t.begin(), t.end(), [&](double a, double b) {
      return std::abs(a - e) < std::abs(b - e);
    });
    *nearest = e;
  }
  std::sort(t.begin(), t.end());
}

struct Scenario {
  Chart chart;
  HarmonicField u;
  std::optional<bic::ConicalFactor> conical;
  std::vector<double> grid;
  int n_samples = 512;
};

Scenario load(const ScenarioConfig& config, int default_samples) {
  Scenario s{build_chart(config), build_field(config), build_conical(config), {}, 0};
  s.grid = build_grid(config, s.u, s.chart);
  s.n_samples = config.analysis.n_samples.value_or(default_samples);
  const bool through = !config.analysis.grid || config.analysis.grid->through_atoms;
  const bool explicit_levels = config.analysis.grid && !config.analysis.grid->levels.empty();
  if (s.conical && through && !explicit_levels) {
    const auto& d = *config.field->dirichlet;
    std::vector<double> targets;
    for (const auto& a : s.conical->atoms()) {
      const double r = a.z.norm();
      if (r > 1.0 && r < d.R) targets.push_back(atom_level(d, a.z));
    }
    snap_levels(s.grid, targets);
  }
  return s;
}

levelsets::LengthProfile compute_profile(const Scenario& s, const ScenarioConfig& config) {
  if (s.conical) {
    return bic::bic_length_profile(*s.conical, *config.field->dirichlet, s.grid,
                                   {config.analysis.allow_positive_curvature});
  }
  return levelsets::length_profile(s.u, s.chart, s.grid, {s.n_samples, config.analysis.fd_step});
}

ordered_json convexity_json(const levelsets::ConvexityReport& r) {
  ordered_json j;
  j["min_lnL_pp"] = r.min_lnL_pp;
  j["min_discrete"] = r.min_discrete;
  j["t_at_min_discrete"] = r.t_at_min_discrete;
  j["tolerance"] = r.tolerance;
  j["pass"] = r.pass;
  return j;
}

std::vector<Point2> sample_points(const Domain& d, int n, std::uint64_t seed) {
  const auto count = static_cast<std::size_t>(n);
  switch (d.kind) {
    case DomainKind::annulus: {
      const double outer = std::isfinite(d.outer) ? d.outer : d.inner + 4.0;
      const double w = outer - d.inner;
      return annulus_points(d.inner + 0.05 * w, outer - 0.05 * w, count, seed, d.center);
    }
    case DomainKind::disc:
      return annulus_points(0.05 * d.outer, 0.95 * d.outer, count, seed, d.center);
    case DomainKind::band: {
      const double w = d.outer - d.inner;
      return box_points(d.inner + 0.05 * w, d.outer - 0.05 * w, 0.0, 2 * kPi, count, seed);
    }
    case DomainKind::half_plane:
      return box_points(-1.0, 1.0, 0.5, 2.0, count, seed);
  }
  return {};
}

Domain default_region(const Domain& d) {
  switch (d.kind) {
    case DomainKind::annulus: {
      if (!std::isfinite(d.outer)) break;
      const double w = d.outer - d.inner;
      return Domain::annulus(d.inner + 0.1 * w, d.outer - 0.1 * w, d.center);
    }
    case DomainKind::disc:
      return Domain::annulus(0.1 * d.outer, 0.9 * d.outer, d.center);
    case DomainKind::band: {
      const double w = d.outer - d.inner;
      return Domain::band(d.inner + 0.1 * w, d.outer - 0.1 * w);
    }
    case DomainKind::half_plane:
      break;
  }
  throw ConfigError("analysis needs a 'region' for this chart");
}

/// Worst value of one residual family over the sample points.
struct Tally {
  std::string name;
  double tolerance = 0.0;
  double worst = 0.0;
  int checked = 0;
  int skipped = 0;
  bool pass = true;

  void residual(double scaled) {
    ++checked;
    worst = std::max(worst, scaled);
    if (!(scaled <= tolerance)) pass = false;
  }
  ordered_json json() const {
    ordered_json j;
    j["name"] = name;
    j["checked"] = checked;
    j["skipped"] = skipped;
    j["max_scaled_residual"] = worst;
    j["tolerance"] = tolerance;
    j["pass"] = pass && checked > 0;
    return j;
  }
};

}  // namespace

Outcome run_profile(const ScenarioConfig& config, const RunOptions& options) {
  const Scenario s = load(config, 512);
  const auto profile = compute_profile(s, config);
  Outcome outcome{header("profile", &config, options), {}, true};
  outcome.report["levels"] = profile.size();
  outcome.report["n_samples"] = s.n_samples;
  add_table(outcome, "profile", profile, options);
  outcome.report["pass"] = true;
  return outcome;
}

Outcome run_convexity(const ScenarioConfig& config, const RunOptions& options) {
  const Scenario s = load(config, 512);
  const auto profile = compute_profile(s, config);
  const double tol = tolerance(s.conical ? 1e-5 : 1e-8, config.analysis.tolerance, options);
  Outcome outcome{header("convexity", &config, options), {}, true};
  const auto check = levelsets::log_convexity_check(profile, tol);
  outcome.report["tolerances"] = {{"convexity", tol}};
  outcome.report["convexity"] = convexity_json(check);
  outcome.pass = check.pass;

  if (config.analysis.kappa) {
    if (s.conical) throw ConfigError("analysis.kappa needs a smooth chart");
    const double kappa = *config.analysis.kappa;
    const double sharp_tol = 1e-6 * options.tol_scale;
    double min_gap = std::numeric_limits<double>::infinity();
    for (double t : s.grid) min_gap = std::min(min_gap, levelsets::sharp_bound_gap(s.u, s.chart, t, kappa, s.n_samples));
    outcome.report["tolerances"]["sharp_bound"] = sharp_tol;
    outcome.report["sharp_bound"] = {{"kappa", kappa}, {"min_gap", min_gap}, {"pass", min_gap >= -sharp_tol}};
    outcome.pass = outcome.pass && min_gap >= -sharp_tol;
  }
  if (config.analysis.kappa1) {
    if (s.conical) throw ConfigError("analysis.kappa1 needs a smooth chart");
    for (double t : s.grid) {
      if (!(t > 0.0)) throw ConfigError("the pinched bound needs every level t > 0");
    }
    const double pinched_tol = 1e-8 * options.tol_scale;
    double worst = std::numeric_limits<double>::infinity();
    for (double t : s.grid) {
      worst = std::min(worst, levelsets::pinched_bound_check(s.u, s.chart, t, *config.analysis.kappa1,
                                                              *config.analysis.kappa2, s.n_samples));
    }
    outcome.report["tolerances"]["pinched_bound"] = pinched_tol;
    outcome.report["pinched_bound"] = {{"kappa1", *config.analysis.kappa1},
                                       {"kappa2", *config.analysis.kappa2},
                                       {"min_margin", worst},
                                       {"pass", worst >= -pinched_tol}};
    outcome.pass = outcome.pass && worst >= -pinched_tol;
  }
  add_table(outcome, "profile", profile, options);
  outcome.report["pass"] = outcome.pass;
  return outcome;
}

Outcome run_residuals(const ScenarioConfig& config, const RunOptions& options) {
  const Chart chart = build_chart(config);
  const HarmonicField u = build_field(config);
  const double scale = options.tol_scale;
  const double identity_tol = tolerance(1e-6, config.analysis.tolerance, options);
  const double pde_tol = 1e-4 * scale;
  const double gap_floor = 1e-6 * scale;
  // ln|k| is differentiated numerically, so levels where k nearly vanishes are skipped.
  constexpr double kCurvatureFloor = 1e-2;

  Tally kato{"kato", identity_tol}, bochner{"bochner", identity_tol}, loggrad{"log_gradient", identity_tol};
  Tally pde1{"pde1", pde_tol}, pde1s{"pde1_star", pde_tol};
  Tally pde2{"pde2_gap", pde_tol}, pde2s{"pde2_star_gap", pde_tol};
  double min_gap = std::numeric_limits<double>::infinity();
  double min_star_gap = std::numeric_limits<double>::infinity();
  int skipped = 0;

  const bool branch_cut = u.field().name() == "arg";
  for (Point2 p : sample_points(chart.domain(), config.analysis.points, config.seed)) {
    if (chart.singular_distance(p) < 0.05 || (branch_cut && p.x < 0.05 && std::abs(p.y) < 0.05)) {
      ++skipped;
      continue;
    }
    curvature_flow::CurvatureSample c;
    try {
      c = curvature_flow::curvature_sample(u, chart, p);
    } catch (const CriticalPointError&) {
      ++skipped;
      continue;
    }
    if (c.gradnorm <= 1e-6) {
      ++skipped;
      continue;
    }
    const double s = geometry::identity_scale(u, chart, p);
    kato.residual(std::abs(geometry::kato_residual(u, chart, p)) / s);
    bochner.residual(std::abs(geometry::bochner_residual(u, chart, p)) / s);
    loggrad.residual(std::abs(geometry::log_gradient_residual(u, chart, p)) / s);
    pde1.residual(std::abs(curvature_flow::pde1_residual(u, chart, p)) / (1.0 + std::abs(c.phi_k)));
    pde1s.residual(std::abs(curvature_flow::pde1_star_residual(u, chart, p)) / (1.0 + std::abs(c.phi_h)));
    auto gap = [&](Tally& tally, double& min_value, double curvature, bool star) {
      if (std::abs(curvature) < kCurvatureFloor) {
        ++tally.skipped;
        return;
      }
      try {
        const auto g = star ? curvature_flow::pde2_star_gap(u, chart, p) : curvature_flow::pde2_gap(u, chart, p);
        min_value = std::min(min_value, g.gap);
        tally.residual(std::abs(g.gap - g.theoretical_gap) / (1.0 + g.theoretical_gap));
      } catch (const PreconditionError&) {
        ++tally.skipped;
      }
    };
    gap(pde2, min_gap, c.k, false);
    gap(pde2s, min_star_gap, c.h, true);
  }

  Outcome outcome{header("residuals", &config, options), {}, true};
  outcome.report["tolerances"] = {{"identity", identity_tol},
                                  {"pde", pde_tol},
                                  {"gap_floor", gap_floor},
                                  {"curvature_floor", kCurvatureFloor}};
  outcome.report["points"] = config.analysis.points;
  outcome.report["skipped_points"] = skipped;
  ordered_json checks = ordered_json::array();
  for (const Tally* t : {&kato, &bochner, &loggrad, &pde1, &pde1s}) {
    checks.push_back(t->json());
    outcome.pass = outcome.pass && t->pass && t->checked > 0;
  }
  // The gap checks are vacuous when the curvature vanishes throughout (straight level lines).
  for (auto [t, m] : {std::pair{&pde2, min_gap}, std::pair{&pde2s, min_star_gap}}) {
    ordered_json j = t->json();
    const bool sign_ok = t->checked == 0 || m >= -gap_floor;
    j["min_gap"] = t->checked > 0 ? ordered_json(m) : ordered_json(nullptr);
    j["pass"] = t->pass && sign_ok;
    if (t->checked == 0) j["note"] = "vacuous: curvature below the floor at every point";
    checks.push_back(j);
    outcome.pass = outcome.pass && t->pass && sign_ok;
  }
  outcome.report["checks"] = checks;
  outcome.report["pass"] = outcome.pass;
  return outcome;
}

Outcome run_audit(const ScenarioConfig& config, const RunOptions& options) {
  const Chart chart = build_chart(config);
  const HarmonicField u = build_field(config);
  if (chart.kind() == ChartKind::conformal && !chart.singular_points().empty()) {
    throw ConfigError("audits need a smooth chart");
  }
  const Domain region = config.analysis.region ? *config.analysis.region : default_region(chart.domain());
  std::vector<AuditSpec> audits = config.analysis.audits;
  if (audits.empty()) {
    using curvature_flow::CorollaryCase;
    using curvature_flow::Quantity;
    audits = {{Quantity::k, CorollaryCase::boundary_minimum}, {Quantity::phi_k, CorollaryCase::case1},
              {Quantity::phi_k, CorollaryCase::case2},       {Quantity::phi_k, CorollaryCase::case3},
              {Quantity::phi_k, CorollaryCase::case4},       {Quantity::k, CorollaryCase::interior_minimum_bound}};
  }

  Outcome outcome{header("audit", &config, options), {}, true};
  ordered_json reports = ordered_json::array();
  for (const AuditSpec& a : audits) {
    const auto r = curvature_flow::principle_audit(u, chart, region, a.quantity, a.corollary_case);
    reports.push_back(curvature_flow::to_json(r));
    outcome.pass = outcome.pass && r.verdict != curvature_flow::Verdict::fail;
  }
  outcome.report["audits"] = reports;

  if (config.analysis.grid) {
    const int n = config.analysis.n_samples.value_or(512);
    const auto grid = build_grid(config, u, chart);
    const auto profile = levelsets::length_profile(u, chart, grid, {n, config.analysis.fd_step});
    const auto b = curvature_flow::logL_slope_bound(u, chart, profile, 1024, n);
    ordered_json j;
    j["slope_case"] = b.slope_case == curvature_flow::SlopeCase::nonpositive_curvature   ? "nonpositive_curvature"
                      : b.slope_case == curvature_flow::SlopeCase::nonnegative_curvature ? "nonnegative_curvature"
                                                                                         : "none";
    j["diagnostic"] = b.diagnostic;
    j["boundary_inf_phi_k"] = b.boundary_inf_phi_k;
    j["bound"] = b.bound;
    j["max_slope"] = b.slope.empty() ? 0.0 : *std::max_element(b.slope.begin(), b.slope.end());
    j["max_identity_residual"] = b.max_identity_residual;
    j["identity_tolerance"] = 1e-6;
    j["bound_holds"] = b.bound_holds;
    j["identity_holds"] = b.identity_holds;
    outcome.report["slope_bound"] = j;
    const bool bound_ok = b.slope_case == curvature_flow::SlopeCase::none || b.bound_holds;
    outcome.pass = outcome.pass && b.identity_holds && bound_ok;
  }
  outcome.report["pass"] = outcome.pass;
  return outcome;
}

Outcome run_bic(const ScenarioConfig& config, const RunOptions& options) {
  if (!config.chart || config.chart->kind != "conical") throw ConfigError("bic needs a conical chart");
  if (!config.field || !config.field->dirichlet) throw ConfigError("bic needs a dirichlet field");
  const Scenario s = load(config, 2048);
  const auto& spec = *config.field->dirichlet;
  const auto profile = compute_profile(s, config);
  const double tol = tolerance(1e-5, config.analysis.tolerance, options);
  const double monotone_tol = 1e-6 * options.tol_scale;
  const double smooth_tol = 1e-8 * options.tol_scale;

  Outcome outcome{header("bic", &config, options), {}, true};
  outcome.report["tolerances"] = {{"convexity", tol}, {"mollified_monotonicity", monotone_tol},
                                  {"mollified_convexity", smooth_tol}};
  const auto& f = *s.conical;
  outcome.report["nonpositive_curvature"] = f.nonpositive_curvature();
  outcome.report["total_curvature_mass"] = f.curvature_measure().total_mass();
  const auto check = levelsets::log_convexity_check(profile, tol);
  outcome.report["convexity"] = convexity_json(check);
  outcome.pass = check.pass;

  if (!config.analysis.eps.empty()) {
    const double t = config.analysis.t.value_or(0.5 * (spec.t1 + spec.t2));
    const auto m = bic::mollified_convergence(f, spec, t, config.analysis.eps);
    ordered_json j;
    j["t"] = t;
    j["eps"] = m.eps;
    j["lengths"] = m.lengths;
    j["limit"] = m.limit;
    j["max_increase"] = m.max_increase;
    j["pass"] = m.max_increase <= monotone_tol;
    outcome.pass = outcome.pass && m.max_increase <= monotone_tol;

    if (config.analysis.mollified_profiles) {
      const auto u = harmonic::solve_annulus_dirichlet(spec);
      const Domain domain = Domain::annulus(1.0, spec.R);
      const auto grid = levelsets::inset_grid(std::min(spec.t1, spec.t2), std::max(spec.t1, spec.t2), 24);
      ordered_json profiles = ordered_json::array();
      for (double eps : config.analysis.eps) {
        const auto prof = levelsets::length_profile(u, bic::mollify(f, eps).chart(domain), grid, {s.n_samples});
        const auto rep = levelsets::log_convexity_check(prof, smooth_tol);
        profiles.push_back({{"eps", eps}, {"min_lnL_pp", rep.min_lnL_pp}, {"pass", rep.pass}});
        outcome.pass = outcome.pass && rep.pass;
      }
      j["profiles"] = profiles;
    }
    outcome.report["mollified"] = j;
  }
  add_table(outcome, "bic_profile", profile, options);
  outcome.report["pass"] = outcome.pass;
  return outcome;
}

Outcome run_counterexample(const ScenarioConfig& config, const RunOptions& options) {
  if (!config.chart || config.chart->kind != "conformal") throw ConfigError("counterexample needs a conformal chart");
  const ChartSpec& c = *config.chart;
  if (c.factor != "quadratic" && !(c.factor == "flat" && c.c == 0.0)) {
    throw ConfigError("counterexample needs a factor normalised at the origin: quadratic, or flat with c = 0");
  }
  const double coef = c.factor == "quadratic" ? c.c : 0.0;
  const int n = config.analysis.n_samples.value_or(1024);
  const double rel_tol = tolerance(0.02, config.analysis.tolerance, options);
  const double abs_tol = 1e-9 * options.tol_scale;
  const double limit = 16 * kPi * kPi * coef;
  std::vector<double> radii = config.analysis.radii;
  if (radii.empty()) radii = {0.05, 0.03, 0.02, 0.01};

  Outcome outcome{header("counterexample", &config, options), {}, true};
  outcome.report["tolerances"] = {{"relative", rel_tol}, {"absolute_when_flat", abs_tol}};
  outcome.report["c"] = coef;
  outcome.report["limit"] = limit;
  auto within = [&](double value, double target) {
    return target == 0.0 ? std::abs(value) <= abs_tol : std::abs(value - target) <= rel_tol * std::abs(target);
  };
  ordered_json rows = ordered_json::array();
  for (double r : radii) {
    const double t = -std::log(r);
    const double d = levelsets::asymptotic_defect(factors::quadratic(coef), t, n);
    const double mirrored = levelsets::asymptotic_defect(factors::quadratic(-coef), t, n);
    const bool ok = within(d, limit) && within(mirrored, -limit);
    ordered_json row;
    row["radius"] = r;
    row["t"] = t;
    row["defect"] = d;
    row["relative_error"] = limit == 0.0 ? 0.0 : std::abs(d - limit) / std::abs(limit);
    row["defect_mirrored"] = mirrored;
    row["pass"] = ok;
    rows.push_back(row);
    outcome.pass = outcome.pass && ok;
  }
  outcome.report["sweep"] = rows;
  outcome.report["pass"] = outcome.pass;
  return outcome;
}

namespace {

struct ExampleCheck {
  ordered_json report;
  bool pass = true;

  void expect(const std::string& name, double value, double tol, bool ok) {
    report["checks"].push_back({{"name", name}, {"value", value}, {"tolerance", tol}, {"pass", ok}});
    pass = pass && ok;
  }
};

ExampleCheck example_flat(const RunOptions& o) {
  ExampleCheck e;
  e.report["scenario"] = "flat annulus 1 < |z| < e^2, u = -ln|z|";
  e.report["checks"] = ordered_json::array();
  const Chart chart = Chart::conformal(factors::flat(), Domain::annulus(1.0, std::exp(2.0)));
  const double a = -1.0;
  const auto u = harmonic::catalog_field("log", std::span(&a, 1));
  const auto p = levelsets::length_profile(u, chart, levelsets::inset_grid(-2.0, 0.0, 50), {2048});
  double worst = 0.0;
  for (double v : p.lnL_pp) worst = std::max(worst, std::abs(v));
  const auto c = levelsets::log_convexity_check(p, 1e-8 * o.tol_scale);
  e.expect("max |(ln L)''| (integral formulas)", worst, 1e-6 * o.tol_scale, worst <= 1e-6 * o.tol_scale);
  e.expect("min second difference of ln L", c.min_discrete, 1e-8 * o.tol_scale,
           std::abs(c.min_discrete) <= 1e-8 * o.tol_scale);
  return e;
}

ExampleCheck example_hyperbolic(const RunOptions& o) {
  ExampleCheck e;
  e.report["scenario"] = "hyperbolic cylinder, lambda = e^2, u = 2 arctan(e^t)";
  e.report["checks"] = ordered_json::array();
  const Chart chart = hyperbolic_cylinder(std::exp(2.0), -4.0, 4.0);
  const auto u = harmonic::catalog_field("warped_arctan");
  const auto grid = levelsets::inset_grid(0.4, kPi - 0.4, 40);
  const auto p = levelsets::length_profile(u, chart, grid, {64});
  double min_scaled = std::numeric_limits<double>::infinity();
  double worst_scaled = 0.0;
  double worst_length = 0.0;
  double worst_sharp = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double sn = std::sin(p.t[i]);
    min_scaled = std::min(min_scaled, p.lnL_pp[i] * sn * sn);
    worst_scaled = std::max(worst_scaled, std::abs(p.lnL_pp[i] * sn * sn - 1.0));
    worst_length = std::max(worst_length, std::abs(p.L[i] * sn - 2.0) / 2.0);
    worst_sharp = std::max(worst_sharp, std::abs(levelsets::sharp_bound_gap(u, chart, p.t[i], -1.0, 64)));
  }
  double pinched = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 100; ++i) {
    const double s = 0.1 + (kPi - 0.2) * i / 99;
    pinched = std::min(pinched, levelsets::pinched_bound_check(u, chart, s, 1.0, 1.0, 64));
  }
  const double s = o.tol_scale;
  e.report["min_lnL_pp_sin2"] = min_scaled;
  e.expect("max |L sin s - 2| / 2", worst_length, 1e-8 * s, worst_length <= 1e-8 * s);
  e.expect("max |(ln L)'' sin^2 s - 1|", worst_scaled, 1e-6 * s, worst_scaled <= 1e-6 * s);
  e.expect("max |sharp bound gap| at kappa = -1", worst_sharp, 1e-6 * s, worst_sharp <= 1e-6 * s);
  e.expect("min pinched margin (ln L)'' - 1/s^2", pinched, 1e-8 * s, pinched >= -1e-8 * s);
  return e;
}

ExampleCheck example_sphere_cap(const RunOptions& o) {
  ExampleCheck e;
  e.report["scenario"] = "sphere cap lambda = 1 - 0.1 r^2, u = -ln|z|; convexity must fail";
  e.report["checks"] = ordered_json::array();
  const Chart chart = Chart::conformal(factors::quadratic(-0.1), Domain::annulus(0.0, 3.0));
  const double a = -1.0;
  const auto u = harmonic::catalog_field("log", std::span(&a, 1));
  const auto p = levelsets::length_profile(u, chart, levelsets::inset_grid(-1.0, 2.0, 30));
  const auto c = levelsets::log_convexity_check(p);
  double worst = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double r = std::exp(-p.t[i]);
    const double exact = -0.4 * r * r / std::pow(1 - 0.1 * r * r, 2);
    worst = std::max(worst, std::abs(p.lnL_pp[i] - exact) / std::abs(exact));
  }
  const double s = o.tol_scale;
  e.expect("min (ln L)'' (negative: violation detected)", c.min_lnL_pp, 0.0, !c.pass && c.min_lnL_pp < 0.0);
  e.expect("max relative error of (ln L)'' against -0.4 r^2 / (1 - 0.1 r^2)^2", worst, 1e-9 * s, worst <= 1e-9 * s);
  const double limit = 16 * kPi * kPi * -0.1;
  for (double r : {0.05, 0.03, 0.01}) {
    const double d = levelsets::asymptotic_defect(factors::quadratic(-0.1), -std::log(r));
    const double rel = std::abs(d - limit) / std::abs(limit);
    e.expect("defect relative error at r = " + ordered_json(r).dump(), rel, 0.02 * s, rel <= 0.02 * s);
  }
  return e;
}

ExampleCheck example_conical(const RunOptions& o) {
  ExampleCheck e;
  e.report["scenario"] = "conical atoms alpha = 0.5 at 1.2 and 0.3 at -1.6i on 1 < |z| < e^2";
  e.report["checks"] = ordered_json::array();
  const harmonic::DirichletSpec spec{std::exp(2.0), 0.0, -2.0};
  const auto f = bic::conical_factor(0.0, {{{1.2, 0.0}, 0.5}, {{0.0, -1.6}, 0.3}});
  std::vector<double> grid(200);
  for (int i = 0; i < 200; ++i) grid[static_cast<std::size_t>(i)] = -2.0 + 2.0 * i / 199;
  auto through = grid;
  snap_levels(through, {-std::log(1.2), -std::log(1.6)});
  const double s = o.tol_scale;
  const auto c = levelsets::log_convexity_check(bic::bic_length_profile(f, spec, through), 1e-5 * s);
  e.expect("min second difference of ln L", c.min_discrete, 1e-5 * s, c.pass);

  const auto m = bic::mollified_convergence(f, spec, -std::log(1.5), {0.4, 0.2, 0.1, 0.05});
  e.expect("max increase of L_eps as eps decreases", m.max_increase, 1e-6 * s, m.max_increase <= 1e-6 * s);

  const auto bad = bic::conical_factor(0.0, {{{3.0, 0.0}, -0.5}});
  auto bad_grid = grid;
  snap_levels(bad_grid, {-std::log(3.0)});
  const auto v = levelsets::log_convexity_check(bic::bic_length_profile(bad, spec, bad_grid, {true}), 1e-5 * s);
  e.expect("alpha = -0.5 atom: min second difference (violation detected)", v.min_discrete, 1e-5 * s, !v.pass);
  return e;
}

}  // namespace

std::vector<std::string> example_names() { return {"flat", "hyperbolic", "sphere-cap", "conical"}; }

Outcome run_examples(const std::string& name, const RunOptions& options) {
  Outcome outcome{header("examples", nullptr, options), {}, true};
  ordered_json results;
  for (const auto& n : example_names()) {
    if (!name.empty() && name != n) continue;
    ExampleCheck e = n == "flat"         ? example_flat(options)
                     : n == "hyperbolic" ? example_hyperbolic(options)
                     : n == "sphere-cap" ? example_sphere_cap(options)
                                         : example_conical(options);
    e.report["pass"] = e.pass;
    results[n] = e.report;
    outcome.pass = outcome.pass && e.pass;
  }
  if (results.empty()) throw ConfigError("unknown example '" + name + "'");
  outcome.report["examples"] = results;
  outcome.report["pass"] = outcome.pass;
  return outcome;
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << text;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Level curves of harmonic functions on surfaces: length profiles and curvature checks"};
  app.name("levelflow");
  std::string config_path;
  std::string out_dir;
  std::string format = "csv";
  std::string example;
  double tol_scale = 1.0;
  int threads = 0;
  app.add_option("--config", config_path, "Scenario config (JSON)");
  app.add_option("--out", out_dir, "Directory for the report and tables");
  app.add_option("--tol-scale", tol_scale, "Multiplies every default tolerance")->check(CLI::PositiveNumber);
  app.add_option("--threads", threads, "OpenMP threads (falls back to LEVELFLOW_THREADS)")->check(CLI::PositiveNumber);
  app.add_option("--format", format, "Table format")->check(CLI::IsMember({"csv", "json"}));
  app.require_subcommand(1);

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"profile", "Length profile L(t) with derivative columns"},
      {"convexity", "Log-convexity of L and the curvature-bound variants"},
      {"residuals", "Pointwise identity and curvature PDE residuals"},
      {"audit", "Maximum-principle audits and the slope bound"},
      {"bic", "Conical-singularity profiles and mollification"},
      {"counterexample", "Asymptotic defect sweep near a normalised centre"},
      {"examples", "Built-in scenarios: flat, hyperbolic, sphere-cap, conical"},
  };
  for (const auto& [name, description] : commands) {
    CLI::App* sub = app.add_subcommand(name, description);
    sub->fallthrough();
    if (name == "examples") sub->add_option("name", example, "Scenario")->check(CLI::IsMember(example_names()));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  if (threads == 0) {
    if (const char* env = std::getenv("LEVELFLOW_THREADS"); env && *env) {
      char* end = nullptr;
      const long n = std::strtol(env, &end, 10);
      if (*end != '\0' || n <= 0) {
        err << "error: LEVELFLOW_THREADS must be a positive integer\n";
        return 2;
      }
      threads = static_cast<int>(n);
    }
  }
  if (threads > 0) omp_set_num_threads(threads);

  const RunOptions options{tol_scale, format == "json" ? TableFormat::json : TableFormat::csv};
  Outcome outcome;
  try {
    if (command == "examples") {
      outcome = run_examples(example, options);
    } else {
      if (config_path.empty()) throw ConfigError("--config is required for '" + command + "'");
      const ScenarioConfig config = load_config(config_path);
      outcome = command == "profile"     ? run_profile(config, options)
                : command == "convexity" ? run_convexity(config, options)
                : command == "residuals" ? run_residuals(config, options)
                : command == "audit"     ? run_audit(config, options)
                : command == "bic"       ? run_bic(config, options)
                                         : run_counterexample(config, options);
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    err << "error: invalid input: " << e.what() << "\n";
    return 2;
  } catch (const SingularityError& e) {
    err << "error: invalid input: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    // Critical points, topology changes and failed hypotheses are mathematical outcomes.
    outcome.report = header(command, nullptr, options);
    outcome.report["error"] = e.what();
    outcome.report["pass"] = false;
    outcome.pass = false;
  }

  const std::string report = outcome.report.dump(2) + "\n";
  if (!out_dir.empty()) {
    try {
      std::filesystem::create_directories(out_dir);
      write_file(std::filesystem::path(out_dir) / (command + ".json"), report);
      const std::string ext = options.format == TableFormat::json ? ".json" : ".csv";
      for (const auto& [stem, table] : outcome.tables) write_file(std::filesystem::path(out_dir) / (stem + ext), table);
    } catch (const std::exception& e) {
      err << "error: " << e.what() << "\n";
      return 2;
    }
    out << report;
  } else if (command == "profile" && !outcome.tables.empty()) {
    out << outcome.tables.front().second;
  } else {
    out << report;
  }
  return outcome.pass ? 0 : 1;
}

}  // namespace levelflow::cli
