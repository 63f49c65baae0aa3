#include "cli/setup.hpp"

#include <cmath>

#include "cli/io.hpp"
#include "sublin/error.hpp"

namespace sublin::cli {

namespace {

const char* kAxes[] = {"x1", "x2", "x3"};

// Environment layout: x1..xd, r, then t and p when present.
struct Env {
  std::array<double, kMaxDim + 3> slots{};
  std::size_t dim;

  explicit Env(std::size_t d) : dim(d) {}
  void set_point(const Point& x) {
    double r2 = 0.0;
    for (std::size_t k = 0; k < dim; ++k) {
      slots[k] = x[k];
      r2 += x[k] * x[k];
    }
    slots[dim] = std::sqrt(r2);
  }
  std::span<const double> view() const { return {slots.data(), dim + 3}; }
};

std::vector<std::size_t> parse_shape(const Value& v, std::size_t dim) {
  std::vector<std::size_t> out;
  for (double d : v.as_numbers()) {
    if (d < 3 || d != std::floor(d)) throw ConfigError("grid shape entries must be integers >= 3");
    out.push_back(static_cast<std::size_t>(d));
  }
  if (out.size() == 1) out.assign(dim, out.front());
  if (out.size() != dim) throw ConfigError("grid shape needs one entry per axis");
  return out;
}

std::vector<Interval> parse_bounds(const Value& v, std::size_t dim) {
  std::vector<Interval> out;
  if (!v.is_array()) throw ConfigError("bounds must be [lo, hi] or a list of [lo, hi]");
  if (!v.items.empty() && !v.items.front().is_array()) {
    const auto lh = v.as_numbers();
    if (lh.size() != 2) throw ConfigError("bounds must be [lo, hi]");
    out.assign(dim, Interval{lh[0], lh[1]});
    return out;
  }
  for (const Value& item : v.items) {
    const auto lh = item.as_numbers();
    if (lh.size() != 2) throw ConfigError("each bound must be [lo, hi]");
    out.push_back({lh[0], lh[1]});
  }
  if (out.size() != dim) throw ConfigError("bounds need one interval per axis");
  return out;
}

std::string value_text(const Value& v) {
  if (v.is_array()) throw ConfigError("line " + std::to_string(v.line) + ": expected an expression");
  return v.text;
}

}  // namespace

std::vector<std::string> expression_variables(std::size_t dim, bool with_t, bool with_p) {
  std::vector<std::string> vars(kAxes, kAxes + dim);
  vars.emplace_back("r");
  // Keep t and p in fixed slots so one environment serves every expression.
  vars.emplace_back(with_t ? "t" : "");
  vars.emplace_back(with_p ? "p" : "");
  return vars;
}

std::function<double(const Point&)> spatial_function(const std::string& text, std::size_t dim) {
  auto e = std::make_shared<Expr>(parse_expr(text, expression_variables(dim, false)));
  return [e, dim](const Point& x) {
    Env env(dim);
    env.set_point(x);
    return e->evaluate(env.view());
  };
}

Geometry build_geometry(const Section& s) {
  const long long dim = s.integer("dim", 0);
  if (dim < 1 || dim > 3) throw ConfigError("[" + s.name() + "] dim must be 1, 2 or 3");
  const auto d = static_cast<std::size_t>(dim);
  Geometry g;
  g.grid = build_grid(d, parse_shape(s.at("shape"), d), parse_bounds(s.at("bounds"), d));
  if (s.has("mask")) {
    const auto fn = spatial_function(value_text(s.at("mask")), d);
    g.mask = mask_from_predicate(g.grid, [&](const Point& x) { return fn(x) > 0; });
  } else {
    g.mask = mask_from_predicate(g.grid, [](const Point&) { return true; });
  }
  return g;
}

bool has_truncations(const Section& geometry) { return geometry.has("truncation_radii"); }

TruncationFamily build_truncations(const Section& s) {
  const long long dim = s.integer("dim", 0);
  if (dim < 1 || dim > 3) throw ConfigError("[" + s.name() + "] dim must be 1, 2 or 3");
  return cube_truncations(static_cast<std::size_t>(dim), s.at("truncation_radii").as_numbers(),
                          s.required_number("spacing"));
}

ExhaustionSequence build_exhaustion_sequence(const Section& s) {
  if (has_truncations(s)) return exhaustion_from_truncations(build_truncations(s));
  const Geometry g = build_geometry(s);
  const long long levels = s.integer("levels", 3);
  if (levels < 2) throw ConfigError("[" + s.name() + "] levels must be at least 2");
  return build_exhaustion(g.mask, static_cast<std::size_t>(levels));
}

CoefficientSet build_coefficients(const Section& s, std::size_t dim) {
  CoefficientSet c = CoefficientSet::laplacian(dim);
  if (const Value* a = s.find("a")) {
    if (!a->is_array()) {
      if (a->text != "identity") throw ConfigError("[operator] a must be 'identity' or a d x d array");
    } else {
      if (a->items.size() != dim) throw ConfigError("[operator] a must have d rows");
      c.a.clear();
      for (const Value& row : a->items) {
        if (!row.is_array() || row.items.size() != dim) throw ConfigError("[operator] a must be d x d");
        for (const Value& entry : row.items) c.a.push_back(spatial_function(value_text(entry), dim));
      }
    }
  }
  if (const Value* b = s.find("b")) {
    if (!b->is_array() || b->items.size() != dim) throw ConfigError("[operator] b must have d entries");
    c.b.clear();
    for (const Value& entry : b->items) c.b.push_back(spatial_function(value_text(entry), dim));
  }
  if (const Value* r = s.find("c")) c.c = spatial_function(value_text(*r), dim);
  return c;
}

SchemeOptions build_scheme(const Section& s) {
  SchemeOptions o;
  const std::string drift = s.string("drift", "upwind");
  if (drift == "upwind") {
    o.drift = DriftScheme::upwind;
  } else if (drift == "centered") {
    o.drift = DriftScheme::centered;
  } else {
    throw ConfigError("[operator] drift must be upwind or centered");
  }
  const std::string cross = s.string("cross", "directional");
  if (cross == "directional") {
    o.cross = CrossScheme::directional;
  } else if (cross == "centered") {
    o.cross = CrossScheme::centered;
  } else {
    throw ConfigError("[operator] cross must be directional or centered");
  }
  o.require_m_matrix = s.flag("require_m_matrix", false);
  return o;
}

SemilinearParams build_solver_params(const Section& s) {
  SemilinearParams p;
  p.tolerance = s.number("tolerance", p.tolerance);
  p.max_iterations = static_cast<int>(s.integer("max_iterations", p.max_iterations));
  if (const Value* l = s.find("lambda")) {
    if (l->is_array() || l->text != "adaptive") p.shift_lambda = l->as_number();
  }
  p.record_history = s.flag("record_history", false);
  try {
    p.linear.method = parse_solver_method(s.string("linear", "auto"));
  } catch (const PreconditionError& e) {
    throw ConfigError(std::string("[solver] ") + e.what());
  }
  p.linear.tolerance = s.number("linear_tolerance", p.linear.tolerance);
  p.linear.max_iterations = static_cast<int>(s.integer("linear_max_iterations", p.linear.max_iterations));
  return p;
}

ExperimentParams build_experiment_params(const Config& cfg) {
  ExperimentParams p = default_experiment_params();
  const Section s = cfg.section("solver");
  const SemilinearParams defaults = p.solver;
  p.solver = build_solver_params(s);
  if (!s.has("tolerance")) p.solver.tolerance = defaults.tolerance;
  if (!s.has("linear_tolerance")) p.solver.linear.tolerance = defaults.linear.tolerance;
  p.scheme = build_scheme(cfg.section("operator"));
  return p;
}

std::filesystem::path resolve_path(const Config& cfg, const std::string& path) {
  const std::filesystem::path p(path);
  if (p.is_absolute() || cfg.base_dir().empty()) return p;
  return std::filesystem::path(cfg.base_dir()) / p;
}

std::optional<Density> build_density(const Config& cfg, std::size_t dim, const MaskPtr& mask) {
  const Section s = cfg.section("phi");
  if (s.has("p") && s.has("p_csv")) throw ConfigError("[phi] give p or p_csv, not both");
  if (s.has("p")) {
    const auto fn = spatial_function(value_text(s.at("p")), dim);
    return density_from_function(fn);
  }
  if (s.has("p_csv")) {
    if (!mask) throw ConfigError("[phi] p_csv needs a geometry");
    return density_from_field(field_from_table(read_csv(resolve_path(cfg, s.required_string("p_csv"))), mask));
  }
  return std::nullopt;
}

HypothesisFlags parse_claims(const std::vector<std::string>& names) {
  HypothesisFlags f;
  for (const std::string& n : names) {
    if (n == "sh1") {
      f.sh1 = true;
    } else if (n == "h1") {
      f.h1 = true;
    } else if (n == "h2") {
      f.h2 = true;
    } else if (n == "h3") {
      f.h3 = true;
    } else if (n == "h4") {
      f.h4 = true;
    } else {
      throw ConfigError("unknown hypothesis '" + n + "' (use sh1, h1, h2, h3, h4)");
    }
  }
  return f;
}

Phi build_base_phi(const Config& cfg, std::size_t dim, const MaskPtr& mask) {
  const Section s = cfg.section("phi");
  const std::string family = s.string("family", "zero");
  const std::optional<Density> density = build_density(cfg, dim, mask);
  const Density p = density.value_or(constant_density(1.0));
  Phi phi = Phi::zero();
  if (family == "zero") {
    phi = Phi::zero();
  } else if (family == "power") {
    phi = Phi::power(p, s.required_number("exponent"));
  } else if (family == "unit_cap") {
    phi = Phi::unit_cap(p);
  } else if (family == "affine") {
    phi = Phi::affine(p, s.number("slope", 1.0), s.number("offset", 0.0));
  } else if (family == "expression") {
    const std::string text = value_text(s.at("expression"));
    auto e = std::make_shared<Expr>(parse_expr(text, expression_variables(dim, true, density.has_value())));
    auto kernel = [e, dim, density](const Site& site, double t) {
      Env env(dim);
      env.set_point(site.x);
      env.slots[dim + 1] = t;
      if (density) env.slots[dim + 2] = (*density)(site);
      return e->evaluate(env.view());
    };
    const HypothesisFlags claims = s.has("claims") ? parse_claims(s.at("claims").as_strings()) : HypothesisFlags{};
    phi = Phi::general(kernel, text, claims, density);
    return phi;
  } else {
    throw ConfigError("[phi] unknown family '" + family + "'");
  }
  if (s.has("claims")) phi = phi.with_claims(parse_claims(s.at("claims").as_strings()));
  return phi;
}

Phi build_phi(const Config& cfg, std::size_t dim, const MaskPtr& mask) {
  Phi base = build_base_phi(cfg, dim, mask);
  if (!cfg.section("phi").flag("majorant", false)) return base;
  const std::optional<Density> density = build_density(cfg, dim, mask);
  if (!density) throw ConfigError("[phi] majorant needs a density p");
  Field p(mask, 0.0);
  for (const Site& site : sites_of(*mask)) p[site.index] = (*density)(site);
  return build_concave_majorant(base, p).phi();
}

std::vector<Point> parse_points(const Value& v, std::size_t dim) {
  std::vector<Point> out;
  if (!v.is_array()) throw ConfigError("line " + std::to_string(v.line) + ": expected a list of points");
  for (const Value& item : v.items) {
    const auto xs = item.as_numbers();
    if (xs.size() != dim) throw ConfigError("line " + std::to_string(v.line) + ": points need one coordinate per axis");
    Point x{0.0, 0.0, 0.0};
    for (std::size_t k = 0; k < dim; ++k) x[k] = xs[k];
    out.push_back(x);
  }
  return out;
}

}  // namespace sublin::cli
