#include "levelflow/harmonic.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <sstream>

#include "levelflow/errors.hpp"

namespace levelflow::harmonic {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double param(std::span<const double> params, std::size_t i, double fallback) {
  return i < params.size() ? params[i] : fallback;
}

template <class T>
std::pair<T, T> complex_power(const T& x, const T& y, int n) {
  T re = 0.0 * x + 1.0;
  T im = 0.0 * x;
  for (int k = 0; k < n; ++k) {
    T nre = re * x - im * y;
    T nim = re * y + im * x;
    re = nre;
    im = nim;
  }
  return {re, im};
}

std::string label_with(std::string_view name, std::span<const double> params) {
  std::ostringstream os;
  os << name;
  if (!params.empty()) {
    os << "(";
    for (std::size_t i = 0; i < params.size(); ++i) os << (i ? "," : "") << params[i];
    os << ")";
  }
  return os.str();
}

}  // namespace

HarmonicField solve_annulus_dirichlet(const DirichletSpec& spec) {
  if (!(spec.R > 1.0)) throw DomainError("annulus Dirichlet problem requires R > 1");
  const double t1 = spec.t1;
  const double slope = (spec.t2 - spec.t1) / std::log(spec.R);
  std::ostringstream os;
  os << "dirichlet(R=" << spec.R << ",t1=" << spec.t1 << ",t2=" << spec.t2 << ")";
  auto field = ScalarField::analytic(os.str(), [t1, slope](const auto& x, const auto& y) {
    return t1 + 0.5 * slope * log(x * x + y * y);
  });
  HarmonicField u(std::move(field), HarmonicProvenance::annulus_dirichlet, os.str());
  if (slope != 0.0) u.with_radial({{0.0, 0.0}, t1, slope});
  u.with_boundary_values(spec.t1, spec.t2);
  return u;
}

std::vector<std::string> catalog_names() {
  return {"log", "re_poly", "im_poly", "re_z_plus_inv", "arg", "log_plus_re", "warped_arctan"};
}

HarmonicField catalog_field(std::string_view name, std::span<const double> params) {
  const std::string label = label_with(name, params);
  if (name == "log") {
    const double a = param(params, 0, -1.0);
    HarmonicField u(ScalarField::analytic(label, [a](const auto& x, const auto& y) { return 0.5 * a * log(x * x + y * y); }),
                    HarmonicProvenance::catalog, label);
    if (a != 0.0) u.with_radial({{0.0, 0.0}, 0.0, a});
    return u;
  }
  if (name == "re_poly" || name == "im_poly") {
    const double nd = param(params, 0, 2.0);
    const int n = static_cast<int>(std::lround(nd));
    if (n < 0 || n != nd) throw DomainError("polynomial degree must be a non-negative integer");
    const bool real = name == "re_poly";
    return {ScalarField::analytic(label,
                                  [n, real](const auto& x, const auto& y) {
                                    auto [re, im] = complex_power(x, y, n);
                                    return real ? re : im;
                                  }),
            HarmonicProvenance::catalog, label};
  }
  if (name == "re_z_plus_inv") {
    const double a = param(params, 0, 1.0);
    return {ScalarField::analytic(label, [a](const auto& x, const auto& y) { return x + a * x / (x * x + y * y); }),
            HarmonicProvenance::catalog, label};
  }
  if (name == "arg") {
    return {ScalarField::analytic(label, [](const auto& x, const auto& y) { return atan2(y, x); }),
            HarmonicProvenance::catalog, label};
  }
  if (name == "log_plus_re") {
    const double a = param(params, 0, -1.0), b = param(params, 1, 0.1);
    return {ScalarField::analytic(label,
                                  [a, b](const auto& x, const auto& y) { return 0.5 * a * log(x * x + y * y) + b * x; }),
            HarmonicProvenance::catalog, label};
  }
  if (name == "warped_arctan") {
    HarmonicField u(ScalarField::analytic(label, [](const auto& t, const auto&) { return 2.0 * atan(exp(t)); }),
                    HarmonicProvenance::catalog, label);
    u.with_warped_radial({[](double t) { return 2.0 * std::atan(std::exp(t)); },
                          [](double s) { return std::log(std::tan(0.5 * s)); }});
    return u;
  }
  throw DomainError("unknown catalog field '" + std::string(name) + "'");
}

// --- critical points -------------------------------------------------------

namespace {

struct ScanGrid {
  int n_radial;
  int n_angular;
  std::function<Point2(int, int)> node;
  bool periodic;
};

ScanGrid scan_grid(const Domain& d, int resolution) {
  const int n = resolution;
  switch (d.kind) {
    case DomainKind::disc: {
      // Cartesian so the centre is an ordinary grid node; nodes outside the disc are masked by the caller.
      if (!std::isfinite(d.outer)) throw DomainError("critical_points needs a bounded domain");
      const double h = (1.0 - 1e-3) * d.outer;
      return {n, n, [=](int i, int j) {
                return Point2{d.center.x - h + 2 * h * i / (n - 1), d.center.y - h + 2 * h * j / (n - 1)};
              }, false};
    }
    case DomainKind::annulus: {
      if (!std::isfinite(d.outer)) throw DomainError("critical_points needs a bounded domain");
      const double lo = d.inner;
      const double inset = 1e-3 * (d.outer - lo);
      const double r0 = lo + inset, r1 = d.outer - inset;
      return {n, n, [=](int i, int j) {
                const double r = r0 + (r1 - r0) * i / (n - 1);
                const double th = kTwoPi * j / n;
                return Point2{d.center.x + r * std::cos(th), d.center.y + r * std::sin(th)};
              }, true};
    }
    case DomainKind::band: {
      const double inset = 1e-3 * (d.outer - d.inner);
      const double t0 = d.inner + inset, t1 = d.outer - inset;
      return {n, n, [=](int i, int j) { return Point2{t0 + (t1 - t0) * i / (n - 1), kTwoPi * j / n}; }, true};
    }
    case DomainKind::half_plane:
      break;
  }
  throw DomainError("critical_points needs a bounded domain");
}

struct NewtonOutcome {
  bool converged = false;
  Point2 point;
  std::string reason;
};

NewtonOutcome polish(const HarmonicField& u, const Chart& chart, Point2 seed) {
  constexpr int kMaxIterations = 50;
  constexpr double kDamping = 0.5;
  Point2 x = seed;
  auto grad_at = [&](Point2 p, FieldJet& jet) {
    jet = u.jet(p);
    return Point2{jet.coeff(1, 0), jet.coeff(0, 1)};
  };
  FieldJet jet;
  Point2 g = grad_at(x, jet);
  for (int it = 0; it < kMaxIterations; ++it) {
    const double hxx = jet.derivative(2, 0), hxy = jet.derivative(1, 1), hyy = jet.derivative(0, 2);
    const double det = hxx * hyy - hxy * hxy;
    if (!(std::abs(det) > 1e-300)) return {false, x, "singular Hessian"};
    const Point2 step{(hyy * g.x - hxy * g.y) / det, (-hxy * g.x + hxx * g.y) / det};
    double alpha = 1.0;
    Point2 trial;
    Point2 gt;
    FieldJet jt;
    bool accepted = false;
    for (int k = 0; k < 40; ++k) {
      trial = x - alpha * step;
      if (chart.contains(trial) && chart.singular_distance(trial) > Chart::kSingularRadius) {
        gt = grad_at(trial, jt);
        if (gt.norm() < g.norm() || gt.norm() == 0.0) {
          accepted = true;
          break;
        }
      }
      alpha *= kDamping;
    }
    if (!accepted) return {false, x, "line search failed"};
    const double moved = (alpha * step).norm();
    x = trial;
    g = gt;
    jet = jt;
    if (g.norm() <= 1e-14 || moved <= 1e-13 * (1.0 + x.norm())) {
      if (g.norm() > 1e-9) return {false, x, "stalled at nonzero gradient"};
      return {true, x, {}};
    }
  }
  return {false, x, "no convergence in 50 iterations"};
}

}  // namespace

CriticalPointReport critical_points(const HarmonicField& u, const Chart& chart, int resolution) {
  if (resolution < 16) throw DomainError("critical_points requires resolution >= 16");
  const ScanGrid grid = scan_grid(chart.domain(), resolution);
  const int nr = grid.n_radial, na = grid.n_angular;
  std::vector<double> g2(static_cast<std::size_t>(nr) * na);
  std::vector<Point2> nodes(g2.size());
  CriticalPointReport report;
  report.min_grid_gradient = std::numeric_limits<double>::infinity();
  for (int i = 0; i < nr; ++i) {
    for (int j = 0; j < na; ++j) {
      const Point2 p = grid.node(i, j);
      const std::size_t k = static_cast<std::size_t>(i) * na + j;
      nodes[k] = p;
      if (!chart.contains(p) || chart.singular_distance(p) <= Chart::kSingularRadius) {
        g2[k] = std::numeric_limits<double>::infinity();
        continue;
      }
      const FieldJet jet = u.jet(p);
      g2[k] = jet.coeff(1, 0) * jet.coeff(1, 0) + jet.coeff(0, 1) * jet.coeff(0, 1);
      report.min_grid_gradient = std::min(report.min_grid_gradient, std::sqrt(g2[k]));
    }
  }
  auto at = [&](int i, int j) {
    if (!grid.periodic && (j < 0 || j >= na)) return std::numeric_limits<double>::infinity();
    return g2[static_cast<std::size_t>(i) * na + ((j % na + na) % na)];
  };

  std::vector<std::pair<double, Point2>> seeds;
  for (int i = 1; i + 1 < nr; ++i) {
    for (int j = 0; j < na; ++j) {
      const double v = at(i, j);
      if (!std::isfinite(v)) continue;
      double lo = v, hi = v;
      bool is_min = true;
      for (int di = -1; di <= 1 && is_min; ++di) {
        for (int dj = -1; dj <= 1; ++dj) {
          if (di == 0 && dj == 0) continue;
          const double w = at(i + di, j + dj);
          if (!std::isfinite(w)) continue;
          lo = std::min(lo, w);
          hi = std::max(hi, w);
          if (w < v) {
            is_min = false;
            break;
          }
        }
      }
      // Flat neighbourhoods (|grad u| locally constant) carry no isolated zero.
      if (is_min && hi - lo > 1e-12 * (1.0 + v)) seeds.emplace_back(v, nodes[static_cast<std::size_t>(i) * na + j]);
    }
  }
  std::sort(seeds.begin(), seeds.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  constexpr std::size_t kMaxSeeds = 64;
  if (seeds.size() > kMaxSeeds) seeds.resize(kMaxSeeds);
  report.seeds = static_cast<int>(seeds.size());

  for (const auto& [value, seed] : seeds) {
    const NewtonOutcome out = polish(u, chart, seed);
    if (!out.converged) {
      report.failures.push_back({seed, out.reason});
      continue;
    }
    const bool duplicate = std::any_of(report.points.begin(), report.points.end(),
                                       [&](Point2 q) { return distance(q, out.point) < 1e-6; });
    if (!duplicate) report.points.push_back(out.point);
  }
  std::sort(report.points.begin(), report.points.end(),
            [](Point2 a, Point2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  return report;
}

// --- numeric solver --------------------------------------------------------

double NumericAnnulusSolution::angle(int j) const { return kTwoPi * j / grid.n_theta; }

double NumericAnnulusSolution::max_nodal_error(const HarmonicField& reference) const {
  double err = 0.0;
  for (int i = 0; i < grid.n_r; ++i) {
    const double r = radius(i);
    for (int j = 0; j < grid.n_theta; ++j) {
      const double th = angle(j);
      err = std::max(err, std::abs(at(i, j) - reference.value({r * std::cos(th), r * std::sin(th)})));
    }
  }
  return err;
}

NumericAnnulusSolution solve_annulus_numeric(const DirichletSpec& spec, GridSize grid) {
  if (!(spec.R > 1.0)) throw DomainError("annulus Dirichlet problem requires R > 1");
  if (grid.n_r < 8 || grid.n_theta < 16) throw DomainError("numeric solver requires n_r >= 8 and n_theta >= 16");
  const int nr = grid.n_r, nt = grid.n_theta;
  const double hr = (spec.R - 1.0) / (nr - 1);
  const double ht = kTwoPi / nt;
  auto values = std::make_shared<std::vector<double>>(static_cast<std::size_t>(nr) * nt);
  auto& u = *values;
  auto idx = [nt](int i, int j) { return static_cast<std::size_t>(i) * nt + ((j % nt + nt) % nt); };
  for (int i = 0; i < nr; ++i) {
    const double s = static_cast<double>(i) / (nr - 1);
    for (int j = 0; j < nt; ++j) u[idx(i, j)] = spec.t1 + s * (spec.t2 - spec.t1);
  }

  const double omega = 2.0 / (1.0 + std::sin(std::numbers::pi / (nr - 1)));
  const double scale = 1.0 + std::max(std::abs(spec.t1), std::abs(spec.t2));
  const int max_sweeps = 400 * std::max(nr, nt) + 10000;
  int sweep = 0;
  double last_update = 0.0;
  for (; sweep < max_sweeps; ++sweep) {
    last_update = 0.0;
    for (int i = 1; i + 1 < nr; ++i) {
      const double r = 1.0 + hr * i;
      const double ap = 1.0 / (hr * hr) + 1.0 / (2.0 * r * hr);
      const double am = 1.0 / (hr * hr) - 1.0 / (2.0 * r * hr);
      const double b = 1.0 / (r * r * ht * ht);
      const double diag = 2.0 / (hr * hr) + 2.0 * b;
      for (int j = 0; j < nt; ++j) {
        const double c = u[idx(i, j)];
        // Residual form keeps constant data an exact fixed point.
        const double delta = omega *
                             (ap * (u[idx(i + 1, j)] - c) + am * (u[idx(i - 1, j)] - c) +
                              b * ((u[idx(i, j + 1)] - c) + (u[idx(i, j - 1)] - c))) /
                             diag;
        u[idx(i, j)] += delta;
        last_update = std::max(last_update, std::abs(delta));
      }
    }
    if (last_update < 1e-14 * scale) break;
  }

  double residual = 0.0;
  for (int i = 1; i + 1 < nr; ++i) {
    const double r = 1.0 + hr * i;
    for (int j = 0; j < nt; ++j) {
      const double lap = (u[idx(i + 1, j)] - 2.0 * u[idx(i, j)] + u[idx(i - 1, j)]) / (hr * hr) +
                         (u[idx(i + 1, j)] - u[idx(i - 1, j)]) / (2.0 * r * hr) +
                         (u[idx(i, j + 1)] - 2.0 * u[idx(i, j)] + u[idx(i, j - 1)]) / (r * r * ht * ht);
      residual = std::max(residual, std::abs(lap));
    }
  }
  if (sweep >= max_sweeps) {
    std::ostringstream os;
    os << "SOR did not converge: " << sweep << " sweeps, last update " << last_update << ", residual " << residual;
    throw ConvergenceError(os.str());
  }

  const double R = spec.R;
  auto interpolate = [values, nr, nt, hr, ht, R](Point2 p) {
    const double r = std::clamp(p.norm(), 1.0, R);
    double th = std::atan2(p.y, p.x);
    if (th < 0.0) th += kTwoPi;
    const double fi = std::min((r - 1.0) / hr, nr - 1.000000001);
    const double fj = th / ht;
    const int i0 = static_cast<int>(fi), j0 = static_cast<int>(fj);
    const double a = fi - i0, b = fj - j0;
    auto v = [&](int i, int j) { return (*values)[static_cast<std::size_t>(i) * nt + ((j % nt + nt) % nt)]; };
    return (1 - a) * (1 - b) * v(i0, j0) + a * (1 - b) * v(i0 + 1, j0) + (1 - a) * b * v(i0, j0 + 1) +
           a * b * v(i0 + 1, j0 + 1);
  };
  std::ostringstream os;
  os << "numeric_annulus(" << nr << "x" << nt << ")";
  NumericAnnulusSolution sol;
  sol.field = HarmonicField(ScalarField::sampled(os.str(), interpolate, 0.5 * hr), HarmonicProvenance::numeric_grid,
                            os.str());
  sol.field.with_boundary_values(spec.t1, spec.t2);
  sol.grid = grid;
  sol.R = R;
  sol.values = *values;
  sol.iterations = sweep + 1;
  sol.residual = residual;
  return sol;
}

}  // namespace levelflow::harmonic
