#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "levelflow/bic.hpp"
#include "levelflow/chart.hpp"
#include "levelflow/curvature_flow.hpp"
#include "levelflow/harmonic.hpp"

namespace levelflow::cli {

/// Invalid configuration; the message starts with "line N:" when the location is known.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Line of every object member and array element, keyed by JSON pointer.
class PositionIndex {
 public:
  /// Expects text that nlohmann::json already accepted.
  static PositionIndex build(std::string_view text);
  /// Line of the pointer, or of its nearest recorded ancestor; 0 when unknown.
  int line_of(const std::string& pointer) const;

 private:
  std::map<std::string, int> lines_;
};

struct ChartSpec {
  /// conformal, warped or conical.
  std::string kind = "conformal";
  /// flat, quadratic, stereographic or half_plane (conformal charts).
  std::string factor = "flat";
  double c = 0.0;
  std::optional<Domain> domain;
  /// Hyperbolic cylinder parameters (warped charts).
  double lambda = 0.0;
  double t_min = -3.0;
  double t_max = 3.0;
  /// Conical factor parameters.
  double beta0 = 0.0;
  std::vector<bic::Atom> atoms;
};

struct FieldSpec {
  std::optional<harmonic::DirichletSpec> dirichlet;
  std::string catalog;
  std::vector<double> params;
};

struct GridSpec {
  double lo = 0.0;
  double hi = 0.0;
  int n = 0;
  bool inset = true;
  /// Conical charts: move the nearest level onto each atom's level.
  bool through_atoms = true;
  std::vector<double> levels;
};

struct AuditSpec {
  curvature_flow::Quantity quantity = curvature_flow::Quantity::phi_k;
  curvature_flow::CorollaryCase corollary_case = curvature_flow::CorollaryCase::case1;
};

struct AnalysisSpec {
  std::optional<GridSpec> grid;
  std::optional<int> n_samples;
  double fd_step = 0.0;
  std::optional<double> tolerance;
  std::optional<double> kappa;
  std::optional<double> kappa1;
  std::optional<double> kappa2;
  int points = 100;
  std::optional<Domain> region;
  std::vector<AuditSpec> audits;
  std::vector<double> eps;
  std::optional<double> t;
  std::vector<double> radii;
  bool allow_positive_curvature = false;
  bool mollified_profiles = false;
};

struct ScenarioConfig {
  std::uint64_t seed = 0;
  std::string name;
  std::optional<ChartSpec> chart;
  std::optional<FieldSpec> field;
  AnalysisSpec analysis;
};

/// Parses and validates; unknown keys and ill-typed values raise ConfigError with a line number.
ScenarioConfig parse_config(std::string_view text);
ScenarioConfig load_config(const std::string& path);

Chart build_chart(const ScenarioConfig& config);
HarmonicField build_field(const ScenarioConfig& config);
std::optional<bic::ConicalFactor> build_conical(const ScenarioConfig& config);
/// Levels from the grid spec, or from the field's boundary values when no grid is given.
std::vector<double> build_grid(const ScenarioConfig& config, const HarmonicField& u, const Chart& chart);

}  // namespace levelflow::cli
