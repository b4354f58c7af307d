#include "levelflow/bic.hpp"

#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <sstream>

#include "levelflow/errors.hpp"
#include "levelflow/quadrature.hpp"

namespace levelflow::bic {

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Q(x) = x - 3x^2/4 + x^3/3 - x^4/16, with Q(1) = 25/48.
template <class T>
T q_poly(const T& x) {
  return x * (1.0 + x * (-0.75 + x * (1.0 / 3.0 - x * (1.0 / 16.0))));
}

template <class J>
J mollified_log_jet(const J& r2, double eps) {
  const double e2 = eps * eps;
  if (r2.value() >= e2) return 0.5 * log(r2);
  return std::log(eps) - 25.0 / 24.0 + 2.0 * q_poly(r2 * (1.0 / e2));
}

std::string describe(double beta0, const std::vector<Atom>& atoms) {
  std::ostringstream os;
  os << "conical(" << beta0;
  for (const auto& a : atoms) os << "; (" << a.z.x << ", " << a.z.y << ") " << a.alpha;
  os << ")";
  return os.str();
}

std::vector<Point2> atom_points(const std::vector<Atom>& atoms) {
  std::vector<Point2> pts;
  for (const auto& a : atoms) pts.push_back(a.z);
  return pts;
}

double level_radius(const harmonic::DirichletSpec& spec, double t) {
  const auto u = harmonic::solve_annulus_dirichlet(spec);
  if (!u.radial()) throw DomainError("constant boundary data has no level circles");
  const double lo = std::min(spec.t1, spec.t2), hi = std::max(spec.t1, spec.t2);
  if (!(t >= lo && t <= hi)) throw DomainError("level outside the boundary values");
  return u.radial()->radius_of(t);
}

double wrap(double th) { return th - kTwoPi * std::floor(th / kTwoPi); }

// Integral of e^v r dtheta over |z| = r. Angle differences to an atom whose angle is a
// quadrature break are taken from the offset, so |z - z_j| keeps full relative precision.
double circle_length(const ConicalFactor& f, double r) {
  const auto& atoms = f.atoms();
  std::vector<double> theta(atoms.size()), rho(atoms.size());
  std::vector<char> is_break(atoms.size(), 0);
  std::vector<double> breaks;
  for (std::size_t j = 0; j < atoms.size(); ++j) {
    rho[j] = atoms[j].z.norm();
    theta[j] = wrap(std::atan2(atoms[j].z.y, atoms[j].z.x));
    if (std::abs(rho[j] - r) < 0.1 * r) {
      is_break[j] = 1;
      breaks.push_back(theta[j]);
    }
  }
  auto integrand = [&](double end, double offset) {
    double logsum = f.beta0();
    for (std::size_t j = 0; j < atoms.size(); ++j) {
      const bool anchored = is_break[j] && (end == theta[j] || end == theta[j] + kTwoPi);
      const double d = anchored ? offset : (end + offset) - theta[j];
      const double s = std::sin(0.5 * d);
      const double dist2 = (r - rho[j]) * (r - rho[j]) + 4 * r * rho[j] * s * s;
      if (dist2 == 0.0) return 0.0;
      logsum += 0.5 * atoms[j].alpha * std::log(dist2);
    }
    return r * std::exp(logsum);
  };
  return quadrature::integrate_periodic(quadrature::OffsetIntegrand(integrand), breaks).value;
}

void fill_differences(levelsets::LengthProfile& p) {
  const std::size_t n = p.size();
  p.L_fd_p.assign(n, kNaN);
  p.L_fd_pp.assign(n, kNaN);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double h1 = p.t[i] - p.t[i - 1], h2 = p.t[i + 1] - p.t[i];
    const double a = p.L[i - 1], b = p.L[i], c = p.L[i + 1];
    p.L_fd_p[i] = -h2 / (h1 * (h1 + h2)) * a + (h2 - h1) / (h1 * h2) * b + h1 / (h2 * (h1 + h2)) * c;
    p.L_fd_pp[i] = 2 * (a / (h1 * (h1 + h2)) - b / (h1 * h2) + c / (h2 * (h1 + h2)));
  }
}

levelsets::LengthProfile profile_impl(const ConicalFactor& f, const harmonic::DirichletSpec& spec,
                                      const std::vector<double>& t_grid, const BicProfileOptions& o, bool parallel) {
  if (!o.allow_positive_curvature && !f.nonpositive_curvature()) {
    throw PreconditionError("conical factor has an atom of positive curvature (alpha < 0)");
  }
  if (t_grid.size() < 3) throw DomainError("BIC profile needs at least three levels");
  for (std::size_t i = 1; i < t_grid.size(); ++i) {
    if (!(t_grid[i] > t_grid[i - 1])) throw DomainError("level grid must be strictly increasing");
  }
  std::vector<double> radii(t_grid.size());
  for (std::size_t i = 0; i < t_grid.size(); ++i) radii[i] = level_radius(spec, t_grid[i]);

  levelsets::LengthProfile p;
  const std::size_t n = t_grid.size();
  p.t = t_grid;
  p.L.assign(n, 0.0);
  std::exception_ptr error;
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      p.L[i] = circle_length(f, radii[i]);
    } catch (...) {
#pragma omp critical(levelflow_bic_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  p.Lp.assign(n, kNaN);
  p.Lpp.assign(n, kNaN);
  p.lnL_pp.assign(n, kNaN);
  p.aux_invgrad2.assign(n, kNaN);
  fill_differences(p);
  return p;
}

}  // namespace

double CurvatureMeasure::total_mass() const {
  double m = 0.0;
  for (const auto& a : atoms) m += a.mass;
  return m;
}

bool CurvatureMeasure::nonpositive() const {
  for (const auto& a : atoms) {
    if (a.mass > 0.0) return false;
  }
  return true;
}

ConicalFactor::ConicalFactor(double beta0, std::vector<Atom> atoms) : beta0_(beta0), atoms_(std::move(atoms)) {
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    if (!(atoms_[i].alpha > -1.0)) {
      throw DomainError("cone exponent alpha <= -1 makes the length element non-integrable");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (distance(atoms_[i].z, atoms_[j].z) <= Chart::kSingularRadius) throw DomainError("coincident cone points");
    }
  }
}

bool ConicalFactor::nonpositive_curvature() const {
  for (const auto& a : atoms_) {
    if (a.alpha < 0.0) return false;
  }
  return true;
}

double ConicalFactor::cone_angle(std::size_t j) const { return kTwoPi * (1.0 + atoms_.at(j).alpha); }

CurvatureMeasure ConicalFactor::curvature_measure() const {
  CurvatureMeasure m;
  for (const auto& a : atoms_) m.atoms.push_back({a.z, -kTwoPi * a.alpha});
  return m;
}

double ConicalFactor::value(Point2 p) const {
  double v = beta0_;
  for (const auto& a : atoms_) v += a.alpha * std::log(distance(p, a.z));
  return v;
}

ScalarField ConicalFactor::field() const {
  const double beta0 = beta0_;
  const std::vector<Atom> atoms = atoms_;
  return ScalarField::analytic(describe(beta0_, atoms_), [beta0, atoms](const auto& x, const auto& y) {
    using J = std::decay_t<decltype(x)>;
    J v(beta0);
    for (const auto& a : atoms) {
      const J dx = x - a.z.x, dy = y - a.z.y;
      v += (0.5 * a.alpha) * log(dx * dx + dy * dy);
    }
    return v;
  });
}

Chart ConicalFactor::chart(const Domain& domain) const {
  Chart c = Chart::conformal(field(), domain, atom_points(atoms_));
  c.with_description(describe(beta0_, atoms_));
  return c;
}

ConicalFactor conical_factor(double beta0, std::vector<Atom> atoms) { return ConicalFactor(beta0, std::move(atoms)); }

double mollified_log(double a, double eps) {
  if (a >= eps) return std::log(a);
  const double x = (a / eps) * (a / eps);
  return std::log(eps) - 25.0 / 24.0 + 2.0 * q_poly(x);
}

double mollifier_kernel(double r, double eps) {
  if (r >= eps) return 0.0;
  const double w = 1.0 - (r / eps) * (r / eps);
  return 4.0 / (std::numbers::pi * eps * eps) * w * w * w;
}

MollifiedFactor::MollifiedFactor(ConicalFactor source, double eps) : source_(std::move(source)), eps_(eps) {
  if (!(eps > 0.0)) throw DomainError("mollification radius must be positive");
}

double MollifiedFactor::value(Point2 p) const {
  double v = source_.beta0();
  for (const auto& a : source_.atoms()) v += a.alpha * mollified_log(distance(p, a.z), eps_);
  return v;
}

ScalarField MollifiedFactor::field() const {
  const double beta0 = source_.beta0(), eps = eps_;
  const std::vector<Atom> atoms = source_.atoms();
  std::ostringstream os;
  os << "mollified(" << eps << ", " << describe(beta0, atoms) << ")";
  return ScalarField::analytic(os.str(), [beta0, eps, atoms](const auto& x, const auto& y) {
    using J = std::decay_t<decltype(x)>;
    J v(beta0);
    for (const auto& a : atoms) {
      const J dx = x - a.z.x, dy = y - a.z.y;
      v += a.alpha * mollified_log_jet(dx * dx + dy * dy, eps);
    }
    return v;
  });
}

Chart MollifiedFactor::chart(const Domain& domain) const { return Chart::conformal(field(), domain); }

MollifiedFactor mollify(const ConicalFactor& factor, double eps) { return MollifiedFactor(factor, eps); }

double bic_length(const ConicalFactor& factor, const harmonic::DirichletSpec& spec, double t) {
  return circle_length(factor, level_radius(spec, t));
}

levelsets::LengthProfile bic_length_profile(const ConicalFactor& factor, const harmonic::DirichletSpec& spec,
                                            const std::vector<double>& t_grid, const BicProfileOptions& options) {
  return profile_impl(factor, spec, t_grid, options, true);
}

levelsets::LengthProfile bic_length_profile_serial(const ConicalFactor& factor, const harmonic::DirichletSpec& spec,
                                                   const std::vector<double>& t_grid,
                                                   const BicProfileOptions& options) {
  return profile_impl(factor, spec, t_grid, options, false);
}

MollifiedConvergence mollified_convergence(const ConicalFactor& factor, const harmonic::DirichletSpec& spec, double t,
                                           const std::vector<double>& eps_sequence) {
  if (eps_sequence.empty()) throw DomainError("empty mollification sequence");
  for (std::size_t i = 1; i < eps_sequence.size(); ++i) {
    if (!(eps_sequence[i] < eps_sequence[i - 1])) throw DomainError("mollification radii must decrease");
  }
  const double r = level_radius(spec, t);
  std::vector<double> breaks;
  for (const auto& a : factor.atoms()) breaks.push_back(std::atan2(a.z.y, a.z.x));
  MollifiedConvergence c;
  c.eps = eps_sequence;
  c.limit = circle_length(factor, r);
  c.max_increase = -std::numeric_limits<double>::infinity();
  for (double eps : eps_sequence) {
    const MollifiedFactor s = mollify(factor, eps);
    auto integrand = [&](double th) { return r * std::exp(s.value({r * std::cos(th), r * std::sin(th)})); };
    c.lengths.push_back(quadrature::integrate_periodic(integrand, breaks).value);
    if (c.lengths.size() > 1) c.max_increase = std::max(c.max_increase, c.lengths.back() - c.lengths[c.lengths.size() - 2]);
  }
  if (c.lengths.size() == 1) c.max_increase = 0.0;
  return c;
}

double atom_flux(const ConicalFactor& factor, std::size_t j, double rho) {
  if (!(rho > 0.0)) throw DomainError("flux circle radius must be positive");
  const Point2 z = factor.atoms().at(j).z;
  const ScalarField v = factor.field();
  auto normal_derivative = [&](double th) {
    const Point2 n{std::cos(th), std::sin(th)};
    const FieldJet jet = v.jet({z.x + rho * n.x, z.y + rho * n.y});
    return (jet.derivative(1, 0) * n.x + jet.derivative(0, 1) * n.y) * rho;
  };
  return quadrature::periodic_trapezoid(normal_derivative, 512) / kTwoPi;
}

double sub_mean_value_gap(const MollifiedFactor& s, Point2 c, double rho) {
  if (!(rho > 0.0)) throw DomainError("circle radius must be positive");
  auto f = [&](double th) { return s.value({c.x + rho * std::cos(th), c.y + rho * std::sin(th)}); };
  return quadrature::integrate_periodic(f, {}).value / kTwoPi - s.value(c);
}

}  // namespace levelflow::bic
