#include "config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "levelflow/errors.hpp"
#include "levelflow/levelsets.hpp"

namespace levelflow::cli {

using nlohmann::json;

namespace {

std::string escape_pointer_token(const std::string& key) {
  std::string out;
  for (char c : key) {
    if (c == '~') {
      out += "~0";
    } else if (c == '/') {
      out += "~1";
    } else {
      out += c;
    }
  }
  return out;
}

}  // namespace

PositionIndex PositionIndex::build(std::string_view text) {
  struct Frame {
    bool object = false;
    bool expect_key = false;
    int index = -1;
    std::string key;
  };
  PositionIndex index;
  std::vector<Frame> stack;
  int line = 1;

  auto path = [&] {
    std::string p;
    for (const Frame& f : stack) p += "/" + (f.object ? escape_pointer_token(f.key) : std::to_string(f.index));
    return p;
  };
  // Object members are recorded at their key; array elements where the value starts.
  auto value_start = [&] {
    if (!stack.empty() && !stack.back().object) {
      ++stack.back().index;
      index.lines_.emplace(path(), line);
    }
  };

  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (c == '\n') {
      ++line;
      ++i;
    } else if (c == '"') {
      std::string s;
      ++i;
      while (i < text.size() && text[i] != '"') {
        if (text[i] == '\\' && i + 1 < text.size()) ++i;
        s += text[i++];
      }
      ++i;
      if (!stack.empty() && stack.back().object && stack.back().expect_key) {
        stack.back().key = s;
        stack.back().expect_key = false;
        index.lines_.emplace(path(), line);
      } else {
        value_start();
      }
    } else if (c == '{' || c == '[') {
      value_start();
      stack.push_back({c == '{', c == '{', -1, {}});
      ++i;
    } else if (c == '}' || c == ']') {
      if (!stack.empty()) stack.pop_back();
      ++i;
    } else if (c == ',') {
      if (!stack.empty() && stack.back().object) stack.back().expect_key = true;
      ++i;
    } else if (c == ':' || c == ' ' || c == '\t' || c == '\r') {
      ++i;
    } else {
      value_start();
      while (i < text.size() && std::string_view(",]} \t\r\n").find(text[i]) == std::string_view::npos) ++i;
    }
  }
  return index;
}

int PositionIndex::line_of(const std::string& pointer) const {
  std::string p = pointer;
  while (true) {
    if (auto it = lines_.find(p); it != lines_.end()) return it->second;
    const auto slash = p.rfind('/');
    if (slash == std::string::npos || p.empty()) return 0;
    p.erase(slash);
    if (p.empty()) return 0;
  }
}

namespace {

/// Typed, position-aware access to one JSON object.
class Reader {
 public:
  Reader(const json& node, std::string pointer, const PositionIndex& index)
      : node_(node), pointer_(std::move(pointer)), index_(index) {
    if (!node_.is_object()) fail("", "expected an object");
  }

  [[noreturn]] void fail(const std::string& key, const std::string& message) const {
    const std::string where = key.empty() ? pointer_ : pointer_ + "/" + escape_pointer_token(key);
    const int line = index_.line_of(where);
    std::string label = where.empty() ? "<root>" : where;
    throw ConfigError((line > 0 ? "line " + std::to_string(line) + ": " : std::string()) + label + ": " + message);
  }

  void allow(std::initializer_list<std::string_view> keys) const {
    for (const auto& [key, value] : node_.items()) {
      bool known = false;
      for (auto k : keys) known = known || key == k;
      if (!known) fail(key, "unknown key '" + key + "'");
    }
  }

  bool has(const std::string& key) const { return node_.contains(key); }

  double number(const std::string& key) const {
    const json& v = at(key);
    if (!v.is_number()) fail(key, "must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(key, "must be finite");
    return x;
  }
  double number(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }

  double positive(const std::string& key, double fallback) const {
    const double x = number(key, fallback);
    if (!(x > 0.0)) fail(key, "must be positive");
    return x;
  }

  int integer(const std::string& key, int fallback, int min_value) const {
    if (!has(key)) return fallback;
    const json& v = at(key);
    if (!v.is_number_integer()) fail(key, "must be an integer");
    const auto x = v.get<long long>();
    if (x < min_value || x > std::numeric_limits<int>::max()) {
      fail(key, "must be an integer >= " + std::to_string(min_value));
    }
    return static_cast<int>(x);
  }

  bool boolean(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const json& v = at(key);
    if (!v.is_boolean()) fail(key, "must be true or false");
    return v.get<bool>();
  }

  std::string string(const std::string& key) const {
    const json& v = at(key);
    if (!v.is_string()) fail(key, "must be a string");
    return v.get<std::string>();
  }
  std::string string(const std::string& key, const std::string& fallback) const {
    return has(key) ? string(key) : fallback;
  }

  std::vector<double> numbers(const std::string& key) const {
    const json& v = at(key);
    if (!v.is_array()) fail(key, "must be an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) element_fail(key, i, "must be a number");
      out.push_back(v[i].get<double>());
    }
    return out;
  }

  Point2 point(const std::string& key) const {
    const auto xs = numbers(key);
    if (xs.size() != 2) fail(key, "must be a pair [x, y]");
    return {xs[0], xs[1]};
  }

  Reader object(const std::string& key) const {
    const json& v = at(key);
    if (!v.is_object()) fail(key, "must be an object");
    return {v, child(key), index_};
  }

  std::vector<Reader> objects(const std::string& key) const {
    const json& v = at(key);
    if (!v.is_array()) fail(key, "must be an array of objects");
    std::vector<Reader> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_object()) element_fail(key, i, "must be an object");
      out.emplace_back(v[i], child(key) + "/" + std::to_string(i), index_);
    }
    return out;
  }

 private:
  const json& at(const std::string& key) const {
    if (!has(key)) fail("", "missing required key '" + key + "'");
    return node_.at(key);
  }
  std::string child(const std::string& key) const { return pointer_ + "/" + escape_pointer_token(key); }
  [[noreturn]] void element_fail(const std::string& key, std::size_t i, const std::string& message) const {
    Reader(json::object(), child(key), index_).fail(std::to_string(i), message);
  }

  const json& node_;
  std::string pointer_;
  const PositionIndex& index_;
};

Domain read_domain(const Reader& r) {
  r.allow({"kind", "inner", "outer", "center", "radius", "t_min", "t_max"});
  const std::string kind = r.string("kind");
  const Point2 center = r.has("center") ? r.point("center") : Point2{};
  if (kind == "annulus") {
    const double inner = r.number("inner");
    const double outer = r.number("outer");
    if (!(inner >= 0.0 && outer > inner)) r.fail("outer", "annulus needs 0 <= inner < outer");
    return Domain::annulus(inner, outer, center);
  }
  if (kind == "disc") return Domain::disc(r.positive("radius", 1.0), center);
  if (kind == "half_plane") return Domain::half_plane();
  if (kind == "band") {
    const double lo = r.number("t_min");
    const double hi = r.number("t_max");
    if (!(hi > lo)) r.fail("t_max", "band needs t_min < t_max");
    return Domain::band(lo, hi);
  }
  r.fail("kind", "unknown domain kind '" + kind + "' (annulus, disc, half_plane, band)");
}

ChartSpec read_chart(const Reader& r) {
  ChartSpec c;
  c.kind = r.string("kind");
  if (c.kind == "conformal") {
    r.allow({"kind", "factor", "c", "domain"});
    c.factor = r.string("factor", "flat");
    if (c.factor != "flat" && c.factor != "quadratic" && c.factor != "stereographic" && c.factor != "half_plane") {
      r.fail("factor", "unknown factor '" + c.factor + "' (flat, quadratic, stereographic, half_plane)");
    }
    c.c = r.number("c", 0.0);
    if (r.has("domain")) c.domain = read_domain(r.object("domain"));
  } else if (c.kind == "warped") {
    r.allow({"kind", "lambda", "t_min", "t_max"});
    c.lambda = r.number("lambda");
    if (!(c.lambda > 1.0)) r.fail("lambda", "must exceed 1");
    c.t_min = r.number("t_min", c.t_min);
    c.t_max = r.number("t_max", c.t_max);
    if (!(c.t_max > c.t_min)) r.fail("t_max", "needs t_min < t_max");
  } else if (c.kind == "conical") {
    r.allow({"kind", "beta0", "atoms", "domain"});
    c.beta0 = r.number("beta0", 0.0);
    if (r.has("atoms")) {
      for (const Reader& a : r.objects("atoms")) {
        a.allow({"z", "alpha"});
        const double alpha = a.number("alpha");
        if (!(alpha > -1.0)) a.fail("alpha", "must exceed -1");
        c.atoms.push_back({a.point("z"), alpha});
      }
    }
    if (r.has("domain")) c.domain = read_domain(r.object("domain"));
  } else {
    r.fail("kind", "unknown chart kind '" + c.kind + "' (conformal, warped, conical)");
  }
  return c;
}

FieldSpec read_field(const Reader& r) {
  r.allow({"dirichlet", "catalog", "params"});
  FieldSpec f;
  if (r.has("dirichlet") == r.has("catalog")) r.fail("", "field needs exactly one of 'dirichlet' or 'catalog'");
  if (r.has("dirichlet")) {
    if (r.has("params")) r.fail("params", "only valid with 'catalog'");
    const Reader d = r.object("dirichlet");
    d.allow({"R", "t1", "t2"});
    harmonic::DirichletSpec spec;
    spec.R = d.number("R");
    spec.t1 = d.number("t1");
    spec.t2 = d.number("t2");
    if (!(spec.R > 1.0)) d.fail("R", "must exceed 1");
    if (spec.t1 == spec.t2) d.fail("t2", "must differ from t1");
    f.dirichlet = spec;
  } else {
    f.catalog = r.string("catalog");
    bool known = false;
    for (const auto& name : harmonic::catalog_names()) known = known || name == f.catalog;
    if (!known) r.fail("catalog", "unknown catalog field '" + f.catalog + "'");
    if (r.has("params")) f.params = r.numbers("params");
  }
  return f;
}

AnalysisSpec read_analysis(const Reader& r) {
  r.allow({"t_grid", "n_samples", "fd_step", "tolerance", "kappa", "kappa1", "kappa2", "points", "region", "audits",
           "eps", "t", "radii", "allow_positive_curvature", "mollified_profiles"});
  AnalysisSpec a;
  if (r.has("t_grid")) {
    const Reader g = r.object("t_grid");
    GridSpec grid;
    g.allow({"lo", "hi", "n", "inset", "levels", "through_atoms"});
    grid.through_atoms = g.boolean("through_atoms", true);
    if (g.has("levels")) {
      if (g.has("lo") || g.has("hi") || g.has("n")) g.fail("levels", "'levels' excludes lo, hi and n");
      grid.levels = g.numbers("levels");
      if (grid.levels.size() < 3) g.fail("levels", "needs at least 3 levels");
      for (std::size_t i = 1; i < grid.levels.size(); ++i) {
        if (!(grid.levels[i] > grid.levels[i - 1])) g.fail("levels", "must be strictly increasing");
      }
    } else {
      grid.lo = g.number("lo");
      grid.hi = g.number("hi");
      if (!(grid.hi > grid.lo)) g.fail("hi", "needs lo < hi");
      grid.n = g.integer("n", 50, 3);
      grid.inset = g.boolean("inset", true);
    }
    a.grid = grid;
  }
  if (r.has("n_samples")) a.n_samples = r.integer("n_samples", 512, 16);
  a.fd_step = r.number("fd_step", 0.0);
  if (a.fd_step < 0.0) r.fail("fd_step", "must be non-negative");
  if (r.has("tolerance")) a.tolerance = r.positive("tolerance", 1.0);
  if (r.has("kappa")) a.kappa = r.number("kappa");
  if (r.has("kappa1") != r.has("kappa2")) r.fail(r.has("kappa1") ? "kappa1" : "kappa2", "kappa1 and kappa2 go together");
  if (r.has("kappa1")) {
    a.kappa1 = r.positive("kappa1", 1.0);
    a.kappa2 = r.positive("kappa2", 1.0);
  }
  a.points = r.integer("points", a.points, 1);
  if (r.has("region")) a.region = read_domain(r.object("region"));
  if (r.has("audits")) {
    for (const Reader& e : r.objects("audits")) {
      e.allow({"quantity", "case"});
      AuditSpec s;
      try {
        s.quantity = curvature_flow::parse_quantity(e.string("quantity"));
      } catch (const DomainError&) {
        e.fail("quantity", "unknown quantity (k, h, phi_k, phi_h, ln_abs_k, ln_abs_h)");
      }
      try {
        s.corollary_case = curvature_flow::parse_corollary_case(e.string("case"));
      } catch (const DomainError&) {
        e.fail("case", "unknown case (boundary_minimum, case1..case4, interior_minimum_bound)");
      }
      a.audits.push_back(s);
    }
  }
  if (r.has("eps")) {
    a.eps = r.numbers("eps");
    for (std::size_t i = 0; i < a.eps.size(); ++i) {
      if (!(a.eps[i] > 0.0) || (i > 0 && !(a.eps[i] < a.eps[i - 1]))) {
        r.fail("eps", "must be positive and strictly decreasing");
      }
    }
  }
  if (r.has("t")) a.t = r.number("t");
  if (r.has("radii")) {
    a.radii = r.numbers("radii");
    for (double x : a.radii) {
      if (!(x > 0.0 && x < 1.0)) r.fail("radii", "radii must lie in (0, 1)");
    }
  }
  a.allow_positive_curvature = r.boolean("allow_positive_curvature", false);
  a.mollified_profiles = r.boolean("mollified_profiles", false);
  return a;
}

}  // namespace

ScenarioConfig parse_config(std::string_view text) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError(e.what());
  }
  const PositionIndex index = PositionIndex::build(text);
  const Reader r(root, "", index);
  r.allow({"seed", "name", "chart", "field", "analysis"});

  ScenarioConfig config;
  if (r.has("seed")) {
    const json& s = root.at("seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0)) {
      r.fail("seed", "must be a non-negative integer");
    }
    config.seed = s.get<std::uint64_t>();
  }
  config.name = r.string("name", "");
  if (r.has("chart")) config.chart = read_chart(r.object("chart"));
  if (r.has("field")) config.field = read_field(r.object("field"));
  if (r.has("analysis")) config.analysis = read_analysis(r.object("analysis"));

  if (config.chart && config.chart->kind == "conical" && config.field && !config.field->dirichlet) {
    r.fail("field", "conical charts need a dirichlet field");
  }
  if (config.chart && config.chart->kind == "warped" && config.field && config.field->dirichlet) {
    r.fail("field", "warped charts take catalog fields");
  }
  return config;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

namespace {

const ChartSpec& require_chart(const ScenarioConfig& config) {
  if (!config.chart) throw ConfigError("config has no 'chart'");
  return *config.chart;
}

const FieldSpec& require_field(const ScenarioConfig& config) {
  if (!config.field) throw ConfigError("config has no 'field'");
  return *config.field;
}

Domain default_domain(const ScenarioConfig& config) {
  const ChartSpec& c = *config.chart;
  if (c.domain) return *c.domain;
  if (config.field && config.field->dirichlet) return Domain::annulus(1.0, config.field->dirichlet->R);
  if (c.kind == "conformal" && c.factor == "half_plane") return Domain::half_plane();
  throw ConfigError("chart needs a 'domain'");
}

}  // namespace

Chart build_chart(const ScenarioConfig& config) {
  const ChartSpec& c = require_chart(config);
  if (c.kind == "warped") return hyperbolic_cylinder(c.lambda, c.t_min, c.t_max);
  if (c.kind == "conical") return build_conical(config)->chart(default_domain(config));
  ScalarField factor = c.factor == "quadratic"       ? factors::quadratic(c.c)
                       : c.factor == "stereographic" ? factors::stereographic()
                       : c.factor == "half_plane"    ? factors::half_plane()
                                                     : factors::flat(c.c);
  return Chart::conformal(std::move(factor), default_domain(config));
}

HarmonicField build_field(const ScenarioConfig& config) {
  const FieldSpec& f = require_field(config);
  if (f.dirichlet) return harmonic::solve_annulus_dirichlet(*f.dirichlet);
  try {
    return harmonic::catalog_field(f.catalog, f.params);
  } catch (const DomainError& e) {
    throw ConfigError(std::string("field: ") + e.what());
  }
}

std::optional<bic::ConicalFactor> build_conical(const ScenarioConfig& config) {
  const ChartSpec& c = require_chart(config);
  if (c.kind != "conical") return std::nullopt;
  try {
    return bic::conical_factor(c.beta0, c.atoms);
  } catch (const DomainError& e) {
    throw ConfigError(std::string("chart: ") + e.what());
  }
}

std::vector<double> build_grid(const ScenarioConfig& config, const HarmonicField& u, const Chart& chart) {
  const auto& g = config.analysis.grid;
  if (g && !g->levels.empty()) return g->levels;
  double lo = 0.0;
  double hi = 0.0;
  int n = 50;
  bool inset = true;
  if (g) {
    lo = g->lo;
    hi = g->hi;
    n = g->n;
    inset = g->inset;
  } else if (config.field && config.field->dirichlet) {
    lo = std::min(config.field->dirichlet->t1, config.field->dirichlet->t2);
    hi = std::max(config.field->dirichlet->t1, config.field->dirichlet->t2);
  } else if (auto range = levelsets::level_range(u, chart)) {
    lo = std::min(range->first, range->second);
    hi = std::max(range->first, range->second);
  } else {
    throw ConfigError("analysis needs a 't_grid' for this field");
  }
  if (inset) return levelsets::inset_grid(lo, hi, n);
  std::vector<double> t(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) t[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
  return t;
}

}  // namespace levelflow::cli
