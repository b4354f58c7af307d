#pragma once

#include <vector>

#include "levelflow/chart.hpp"
#include "levelflow/field.hpp"
#include "levelflow/harmonic.hpp"
#include "levelflow/levelsets.hpp"

namespace levelflow::bic {

struct Atom {
  Point2 z;
  /// Cone angle 2 pi (1 + alpha).
  double alpha = 0.0;
};

/// Curvature measure of a conical factor: one atom of mass -2 pi alpha_j per singularity.
struct CurvatureMeasure {
  struct PointMass {
    Point2 z;
    double mass = 0.0;
  };
  std::vector<PointMass> atoms;

  double total_mass() const;
  bool nonpositive() const;
};

/// v(z) = beta0 + sum_j alpha_j ln|z - z_j|, the conformal factor of a flat metric with cone points.
class ConicalFactor {
 public:
  /// Throws DomainError when some alpha_j <= -1 (length element not integrable) or two atoms coincide.
  ConicalFactor(double beta0, std::vector<Atom> atoms);

  double beta0() const { return beta0_; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  bool nonpositive_curvature() const;
  double cone_angle(std::size_t j) const;
  CurvatureMeasure curvature_measure() const;

  double value(Point2 p) const;
  /// Closed-form field with exact jets away from the atoms.
  ScalarField field() const;
  /// Conformal chart on the domain with the atoms declared singular.
  Chart chart(const Domain& domain) const;

 private:
  double beta0_ = 0.0;
  std::vector<Atom> atoms_;
};

ConicalFactor conical_factor(double beta0, std::vector<Atom> atoms);

/// Convolution of ln|z| with the radial kernel (4 / (pi eps^2)) (1 - |z|^2/eps^2)^3 on |z| < eps,
/// evaluated at distance a: ln a for a >= eps, ln eps - 25/24 + 2 Q(a^2/eps^2) inside with
/// Q(x) = x - 3x^2/4 + x^3/3 - x^4/16.
double mollified_log(double a, double eps);

/// The mollifier itself.
double mollifier_kernel(double r, double eps);

/// s_eps = v * kernel_eps, smooth everywhere; s_eps >= v and decreasing as eps decreases when all alpha_j >= 0.
class MollifiedFactor {
 public:
  MollifiedFactor(ConicalFactor source, double eps);

  const ConicalFactor& source() const { return source_; }
  double eps() const { return eps_; }
  double value(Point2 p) const;
  ScalarField field() const;
  Chart chart(const Domain& domain) const;

 private:
  ConicalFactor source_;
  double eps_ = 0.0;
};

/// Throws DomainError unless eps > 0.
MollifiedFactor mollify(const ConicalFactor& factor, double eps);

/// L(t): the integral of e^v over the level circle of the annulus Dirichlet solution, by adaptive
/// quadrature in angle with breaks at the atoms the circle passes near.
double bic_length(const ConicalFactor& factor, const harmonic::DirichletSpec& spec, double t);

struct BicProfileOptions {
  /// Allows atoms with alpha < 0 (positive curvature), used to exhibit convexity failures.
  bool allow_positive_curvature = false;
};

/// Length profile with L from bic_length and finite-difference columns from the t-grid
/// (non-uniform three-point formulas, NaN at the two ends). Integral columns are NaN.
/// Parallel over levels.
levelsets::LengthProfile bic_length_profile(const ConicalFactor& factor, const harmonic::DirichletSpec& spec,
                                            const std::vector<double>& t_grid, const BicProfileOptions& options = {});
/// Serial reference; bitwise identical to bic_length_profile.
levelsets::LengthProfile bic_length_profile_serial(const ConicalFactor& factor, const harmonic::DirichletSpec& spec,
                                                   const std::vector<double>& t_grid,
                                                   const BicProfileOptions& options = {});

struct MollifiedConvergence {
  std::vector<double> eps;
  /// L_eps(t) for each eps, in the given order.
  std::vector<double> lengths;
  /// L(t) of the unmollified factor.
  double limit = 0.0;
  /// Largest increase L_{eps_{i+1}} - L_{eps_i} along the sequence (<= 0 when monotone).
  double max_increase = 0.0;
};

/// Requires a strictly decreasing eps sequence.
MollifiedConvergence mollified_convergence(const ConicalFactor& factor, const harmonic::DirichletSpec& spec, double t,
                                           const std::vector<double>& eps_sequence);

/// (1 / 2 pi) times the flux of grad v through the circle of radius rho about atom j.
double atom_flux(const ConicalFactor& factor, std::size_t j, double rho);

/// Mean of s over the circle of radius rho about c minus s(c); non-negative for subharmonic s.
double sub_mean_value_gap(const MollifiedFactor& s, Point2 c, double rho);

}  // namespace levelflow::bic
