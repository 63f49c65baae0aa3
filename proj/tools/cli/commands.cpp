#include "cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <set>

#include "cli/io.hpp"
#include "cli/setup.hpp"
#include "sublin/error.hpp"
#include "sublin/potential.hpp"

namespace sublin::cli {

namespace {

using nlohmann::json;

constexpr unsigned long long kDefaultSeed = 20240601ULL;

struct Context {
  const Config& cfg;
  Manifest& manifest;
  unsigned long long seed;
  bool verbose;
  std::ostream& out;
  std::ostream& err;
  std::set<std::string> formats;

  void log(const std::string& msg) const {
    if (verbose) err << "[sublin] " << msg << "\n";
  }
  bool wants(const std::string& f) const { return formats.count(f) > 0; }
};

// The dichotomy theory is set in d >= 3; lower dimensions serve as oracles.
void flag_dimension(json& doc, std::size_t dim) {
  doc["dim"] = dim;
  doc["outside_hypotheses"] = dim < 3;
  if (dim < 3) doc["dimension_note"] = "d < 3 lies outside the d >= 3 hypotheses of the sublinear theory";
}

json point_json(const Point& x, std::size_t dim) { return std::vector<double>(x.begin(), x.begin() + dim); }

json to_json(const SolveReport& r) {
  return {{"iterations", r.iterations},
          {"converged", r.converged},
          {"final_increment", r.final_increment},
          {"interior_residual", r.interior_residual},
          {"identity_residual", r.identity_residual},
          {"monotone_history", r.monotone_history},
          {"m_matrix", r.m_matrix},
          {"steps",
           {{"secant", r.secant_steps},
            {"tangent", r.tangent_steps},
            {"lipschitz", r.lipschitz_steps},
            {"fixed", r.fixed_steps}}},
          {"warnings", r.warnings},
          {"history", r.history}};
}

json to_json(const HypothesisResult& h, std::size_t dim) {
  json j = {{"assessed", h.assessed}, {"pass", h.pass}, {"note", h.note}};
  if (h.witness) j["witness"] = {{"x", point_json(h.witness->site.x, dim)}, {"t", h.witness->t}, {"value", h.witness->value}};
  return j;
}

json to_json(const HypothesisReport& r, std::size_t dim) {
  return {{"SH1", to_json(r.sh1, dim)}, {"H1", to_json(r.h1, dim)}, {"H2", to_json(r.h2, dim)},
          {"H3", to_json(r.h3, dim)},   {"H4", to_json(r.h4, dim)}, {"sh1_multiplier", r.sh1_multiplier}};
}

json to_json(const HypothesisFlags& f) {
  return {{"SH1", f.sh1}, {"H1", f.h1}, {"H2", f.h2}, {"H3", f.h3}, {"H4", f.h4}};
}

json to_json(const SupIdentityReport& r) {
  return {{"verdict", to_string(r.verdict)},
          {"sup_estimate", r.sup_estimate},
          {"core_limit", r.core_limit},
          {"c", r.c},
          {"note", r.note}};
}

json to_json(const BoundedIndication& b) {
  json prefixes = json::array();
  for (const auto& p : b.prefixes) prefixes.push_back(to_json(p));
  return {{"indicated", b.indicated}, {"relative_change", b.relative_change}, {"prefixes", prefixes}, {"note", b.note}};
}

json to_json(const BlowupSweep& s, std::size_t dim) {
  json probes = json::array();
  for (const Point& p : s.probes) probes.push_back(point_json(p, dim));
  json j = {{"verdict", to_string(s.verdict)},
            {"m_values", s.m_values},
            {"probes", probes},
            {"values", s.values},
            {"monotone_ok", s.monotone_ok},
            {"last_decade_increment", s.last_decade_increment},
            {"growth_exponent", std::isfinite(s.growth_exponent) ? json(s.growth_exponent) : json(nullptr)},
            {"min_ratio", std::isfinite(s.min_ratio) ? json(s.min_ratio) : json(nullptr)}};
  if (s.failure) j["failure"] = *s.failure;
  return j;
}

json to_json(const PotentialDiagnostic& d, std::size_t dim) {
  json probes = json::array();
  for (const Point& p : d.probes) probes.push_back(point_json(p, dim));
  return {{"verdict", to_string(d.verdict)},
          {"radii", d.radii},
          {"probes", probes},
          {"values", d.values},
          {"increment_exponent",
           std::isfinite(d.increment_exponent) ? json(d.increment_exponent) : json(nullptr)},
          {"monotone_ok", d.monotone_ok}};
}

json exhaustion_json(const ExhaustionRun& run) {
  json reports = json::array();
  for (const auto& r : run.reports) reports.push_back(to_json(r));
  return {{"c", run.c},
          {"levels", run.levels.size()},
          {"level_sups", run.level_sups},
          {"core_sups", run.core_sups},
          {"core_values", run.core_values},
          {"core_depths", run.core_depths},
          {"core_limit", run.core_limit},
          {"richardson_note", run.richardson_note},
          {"decreasing_ok", run.decreasing_ok},
          {"decreasing_violation", run.decreasing_violation},
          {"sup_estimate", run.sup_estimate},
          {"solves", reports}};
}

Table exhaustion_levels_table(const ExhaustionRun& run) {
  Table t{{"level", "interior_points", "core_depth", "level_sup", "core_sup", "core_value", "iterations"}, {}};
  for (std::size_t n = 0; n < run.levels.size(); ++n)
    t.rows.push_back({static_cast<double>(n + 1), static_cast<double>(run.levels[n]->interior().size()),
                      run.core_depths[n], run.level_sups[n], run.core_sups[n], run.core_values[n],
                      static_cast<double>(run.reports[n].iterations)});
  return t;
}

Table sweep_table(const BlowupSweep& s) {
  Table t{{"m"}, {}};
  for (std::size_t j = 0; j < s.probes.size(); ++j) t.columns.push_back("u_probe" + std::to_string(j + 1));
  for (std::size_t i = 0; i < s.values.size(); ++i) {
    std::vector<double> row{s.m_values[i]};
    row.insert(row.end(), s.values[i].begin(), s.values[i].end());
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table potential_table(const PotentialDiagnostic& d) {
  Table t{{"radius"}, {}};
  for (std::size_t j = 0; j < d.probes.size(); ++j) t.columns.push_back("sum_probe" + std::to_string(j + 1));
  for (std::size_t k = 0; k < d.values.size(); ++k) {
    std::vector<double> row{d.radii[k]};
    row.insert(row.end(), d.values[k].begin(), d.values[k].end());
    t.rows.push_back(std::move(row));
  }
  return t;
}

void emit_field(Context& ctx, const std::string& stem, const Field& f, const std::string& value_name) {
  if (ctx.wants("csv")) ctx.manifest.write_table(stem + ".csv", field_table(f, value_name), "field-csv");
  if (ctx.wants("bin")) {
    write_field_binary(ctx.manifest.path(stem + ".bin"), f);
    ctx.manifest.add(stem + ".bin", "field-binary");
  }
}

void emit_mask(Context& ctx, const std::string& name, const DomainMask& mask) {
  if (ctx.wants("mask")) ctx.manifest.write_text(name, mask_text(mask), "mask-text");
}

std::vector<Point> probes_or_origin(const Section& s, const std::string& key, std::size_t dim) {
  if (const Value* v = s.find(key)) return parse_points(*v, dim);
  return {Point{0.0, 0.0, 0.0}};
}

SupIdentityParams sup_params(const Section& s) {
  SupIdentityParams p;
  p.trivial_fraction = s.number("trivial_fraction", p.trivial_fraction);
  p.band = s.number("band", p.band);
  return p;
}

Field density_field(const Density& p, const MaskPtr& mask) {
  Field f(mask, 0.0);
  for (const Site& s : sites_of(*mask)) f[s.index] = p(s);
  return f;
}

int cmd_solve(Context& ctx) {
  const Geometry geo = build_geometry(ctx.cfg.section("geometry"));
  const std::size_t dim = geo.grid->dim();
  const CoefficientSet coeffs = build_coefficients(ctx.cfg.section("operator"), dim);
  const AssembledOperator op = assemble(geo.mask, coeffs, build_scheme(ctx.cfg.section("operator")));
  const Phi phi = build_phi(ctx.cfg, dim, geo.mask);
  const SemilinearParams params = build_solver_params(ctx.cfg.section("solver"));
  const Section ex = ctx.cfg.section("experiment");
  const auto f_fn = spatial_function(ex.string("boundary", "1"), dim);
  const Field f = Field::from_function(geo.mask, f_fn);
  ctx.log("solving on " + std::to_string(op.interior_size()) + " interior points with phi = " + phi.description());
  auto [u, report] = solve_semilinear_dirichlet(op, phi, f, params);
  ctx.log("converged in " + std::to_string(report.iterations) + " iterations");
  emit_field(ctx, "solution", u, "u");
  emit_mask(ctx, "mask.txt", *geo.mask);
  json doc = {{"command", "solve"},
              {"phi", phi.description()},
              {"claims", to_json(phi.claims())},
              {"interior_points", op.interior_size()},
              {"solve", to_json(report)}};
  flag_dimension(doc, dim);
  ctx.manifest.write_json("report.json", doc, "report");
  ctx.out << "solve: " << report.iterations << " iterations, identity residual " << report.identity_residual << "\n";
  return kOk;
}

int cmd_exhaust(Context& ctx) {
  const Section geo_s = ctx.cfg.section("geometry");
  const ExhaustionSequence seq = build_exhaustion_sequence(geo_s);
  const std::size_t dim = seq.omega().grid().dim();
  const CoefficientSet coeffs = build_coefficients(ctx.cfg.section("operator"), dim);
  const Phi phi = build_phi(ctx.cfg, dim, seq.omega_ptr());
  const ExperimentParams params = build_experiment_params(ctx.cfg);
  const Section ex = ctx.cfg.section("experiment");
  const double c = ex.number("c", 1.0);
  ctx.log("exhaustion with " + std::to_string(seq.size()) + " levels");
  const ExhaustionRun run = run_exhaustion(seq, coeffs, phi, c, params);
  const SupIdentityParams sp = sup_params(ex);
  const SupIdentityReport sup = check_sup_identity(run, sp);
  const BoundedIndication bounded = bounded_solution_indicated(run, sp);

  json doc = {{"command", "exhaust"},
              {"phi", phi.description()},
              {"exhaustion", exhaustion_json(run)},
              {"sup_identity", to_json(sup)},
              {"bounded", to_json(bounded)}};
  flag_dimension(doc, dim);
  if (const Value* ratios = ex.find("scaling_ratios")) {
    json checks = json::array();
    for (double ratio : ratios->as_numbers()) {
      if (!(ratio >= 1.0)) throw ConfigError("[experiment] scaling ratios must be >= 1");
      const ExhaustionRun scaled = ratio == 1.0 ? run : run_exhaustion(seq, coeffs, phi, c * ratio, params);
      const ScalingReport sr = scaling_bound_check(scaled, run);
      checks.push_back({{"ratio", sr.ratio},
                        {"skipped", sr.skipped},
                        {"pass", sr.pass},
                        {"min_margin", sr.min_margin},
                        {"warning", sr.warning}});
    }
    doc["scaling"] = checks;
  }

  ctx.manifest.write_table("levels.csv", exhaustion_levels_table(run), "table");
  Table per_level{{}, {}};
  const DomainMask& core = *run.levels.front();
  for (std::size_t k = 0; k < dim; ++k) per_level.columns.push_back("x" + std::to_string(k + 1));
  for (std::size_t n = 0; n < run.per_level.size(); ++n) per_level.columns.push_back("u_level" + std::to_string(n + 1));
  for (std::size_t i = 0; i < core.grid().size(); ++i) {
    if (!core.is_active(i)) continue;
    const Point x = core.grid().point(i);
    std::vector<double> row(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(dim));
    for (const Field& f : run.per_level) row.push_back(f[i]);
    per_level.rows.push_back(std::move(row));
  }
  ctx.manifest.write_table("per_level.csv", per_level, "table");
  emit_field(ctx, "v_c", run.v_c(), "v_c");
  ctx.manifest.write_json("report.json", doc, "report");
  ctx.out << "exhaust: sup estimate " << run.sup_estimate << ", verdict " << to_string(sup.verdict)
          << ", bounded solution indicated: " << (bounded.indicated ? "yes" : "no") << "\n";
  return kOk;
}

int cmd_majorant(Context& ctx) {
  const Geometry geo = build_geometry(ctx.cfg.section("geometry"));
  const std::size_t dim = geo.grid->dim();
  const std::optional<Density> density = build_density(ctx.cfg, dim, geo.mask);
  if (!density) throw ConfigError("[phi] the majorant needs a density p");
  const Phi base = build_base_phi(ctx.cfg, dim, geo.mask);
  const MajorantPhi maj = build_concave_majorant(base, density_field(*density, geo.mask));
  const MajorantReport& r = maj.report();

  const Section ex = ctx.cfg.section("experiment");
  std::vector<Site> sites;
  if (const Value* v = ex.find("probes")) {
    for (const Point& x : parse_points(*v, dim)) {
      const auto idx = geo.grid->locate(x);
      if (!idx || !geo.mask->is_active(*idx)) throw ConfigError("[experiment] probe is not an active lattice point");
      sites.push_back({*idx, geo.grid->point(*idx)});
    }
  } else {
    sites.push_back(maj.sites().front());
  }
  Table t{{"probe", "t", "phi", "phi1"}, {}};
  for (std::size_t k = 0; k < sites.size(); ++k)
    for (double tv : maj.t_grid())
      t.rows.push_back({static_cast<double>(k + 1), tv, base(sites[k], tv), maj.phi()(sites[k], tv)});
  ctx.manifest.write_table("majorant.csv", t, "table");
  ctx.manifest.write_json("report.json",
                          {{"command", "majorant"},
                           {"phi", base.description()},
                           {"domination_margin", r.domination_margin},
                           {"concavity_defect", r.concavity_defect},
                           {"constant_c", r.constant_c},
                           {"zero_at_origin", r.zero_at_origin},
                           {"monotone_correction", r.monotone_correction},
                           {"sites", r.sites},
                           {"c1", maj.c1()},
                           {"delta_family_size", maj.delta_family().size()}},
                          "report");
  ctx.out << "majorant: domination margin " << r.domination_margin << ", concavity defect " << r.concavity_defect
          << ", C = " << r.constant_c << "\n";
  return kOk;
}

int cmd_blowup(Context& ctx) {
  const Geometry geo = build_geometry(ctx.cfg.section("geometry"));
  const std::size_t dim = geo.grid->dim();
  const CoefficientSet coeffs = build_coefficients(ctx.cfg.section("operator"), dim);
  const AssembledOperator op = assemble(geo.mask, coeffs, build_scheme(ctx.cfg.section("operator")));
  const Phi phi = build_phi(ctx.cfg, dim, geo.mask);
  const Section ex = ctx.cfg.section("experiment");
  const std::vector<double> m_values = ex.at("m_values").as_numbers();
  const std::vector<Point> probes = probes_or_origin(ex, "probes", dim);
  const BlowupSweep sweep = blowup_sweep(op, phi, m_values, probes, build_solver_params(ctx.cfg.section("solver")));
  ctx.manifest.write_table("sweep.csv", sweep_table(sweep), "table");
  json doc = {{"command", "blowup"}, {"phi", phi.description()}, {"sweep", to_json(sweep, dim)}};
  flag_dimension(doc, dim);
  ctx.manifest.write_json("report.json", doc, "report");
  if (sweep.failure) {
    ctx.err << "blowup: " << *sweep.failure << "\n";
    return kNonConvergence;
  }
  ctx.out << "blowup: " << to_string(sweep.verdict) << " (last-decade increment " << sweep.last_decade_increment
          << ")\n";
  return kOk;
}

MaskPtr thin_set_mask(const Section& ex, const std::shared_ptr<const Grid>& grid) {
  if (!ex.has("thin_set")) return nullptr;
  const auto fn = spatial_function(ex.required_string("thin_set"), grid->dim());
  return mask_from_predicate(grid, [&](const Point& x) { return fn(x) > 0; });
}

int cmd_potential(Context& ctx) {
  const Section geo_s = ctx.cfg.section("geometry");
  const Section ex = ctx.cfg.section("experiment");
  json doc = {{"command", "potential"}};
  std::string summary;
  if (has_truncations(geo_s)) {
    const TruncationFamily family = build_truncations(geo_s);
    const std::size_t dim = family.grid->dim();
    const std::optional<Density> density = build_density(ctx.cfg, dim, family.masks.back());
    if (!density) throw ConfigError("[phi] the potential diagnostic needs a density p");
    const PotentialDiagnostic diag =
        green_potential_diagnostic(family, build_coefficients(ctx.cfg.section("operator"), dim), *density,
                                   thin_set_mask(ex, family.grid), probes_or_origin(ex, "probes", dim),
                                   build_experiment_params(ctx.cfg));
    ctx.manifest.write_table("potential.csv", potential_table(diag), "table");
    doc["diagnostic"] = to_json(diag, dim);
    flag_dimension(doc, dim);
    summary += "potential: " + to_string(diag.verdict);
  }
  if (ctx.cfg.has_section("kato")) {
    const Section ks = ctx.cfg.section("kato");
    const Geometry geo = build_geometry(ks);
    const std::optional<Density> density = build_density(ctx.cfg, geo.grid->dim(), geo.mask);
    const Field p = density_field(density.value_or(constant_density(1.0)), geo.mask);
    Table t{{"alpha", "estimate"}, {}};
    for (double alpha : ks.at("alpha").as_numbers()) t.rows.push_back({alpha, kato_norm_estimate(p, alpha, *geo.mask)});
    ctx.manifest.write_table("kato.csv", t, "table");
    doc["kato"] = t.rows;
    summary += std::string(summary.empty() ? "" : "; ") + "kato: " + std::to_string(t.rows.size()) + " radii";
  }
  if (summary.empty()) throw ConfigError("potential needs [geometry] truncation_radii or a [kato] section");
  ctx.manifest.write_json("report.json", doc, "report");
  ctx.out << summary << "\n";
  return kOk;
}

int cmd_checks(Context& ctx) {
  const Geometry geo = build_geometry(ctx.cfg.section("geometry"));
  const std::size_t dim = geo.grid->dim();
  const Section ex = ctx.cfg.section("experiment");
  const double t_max = ex.number("t_max", 4.0);
  const long long nodes = ex.integer("t_nodes", 65);
  const long long extra = ex.integer("random_t", 16);
  if (!(t_max > 0) || nodes < 3 || extra < 0) throw ConfigError("[experiment] needs t_max > 0, t_nodes >= 3");
  std::vector<double> t_grid;
  for (long long j = 0; j < nodes; ++j) t_grid.push_back(t_max * static_cast<double>(j) / static_cast<double>(nodes - 1));
  std::mt19937_64 rng(ctx.seed);
  std::uniform_real_distribution<double> dist(0.0, t_max);
  for (long long j = 0; j < extra; ++j) t_grid.push_back(dist(rng));
  std::sort(t_grid.begin(), t_grid.end());
  t_grid.erase(std::unique(t_grid.begin(), t_grid.end()), t_grid.end());

  const Phi phi = build_phi(ctx.cfg, dim, geo.mask);
  const std::optional<Density> density = build_density(ctx.cfg, dim, geo.mask);
  const HypothesisReport hyp = check_hypotheses(phi, sites_of(*geo.mask), t_grid, density);
  std::vector<std::string> failed;
  const std::pair<const char*, const HypothesisResult*> all[] = {
      {"SH1", &hyp.sh1}, {"H1", &hyp.h1}, {"H2", &hyp.h2}, {"H3", &hyp.h3}, {"H4", &hyp.h4}};
  for (const auto& [name, res] : all)
    if (res->assessed && !res->pass) failed.emplace_back(name);

  const CoefficientSet coeffs = build_coefficients(ctx.cfg.section("operator"), dim);
  const EllipticityReport ell = check_ellipticity(coeffs, *geo.mask);
  json op_doc = {{"ellipticity",
                  {{"pass", ell.pass},
                   {"min_eigenvalue", ell.min_eigenvalue},
                   {"min_condition_ratio", ell.min_condition_ratio},
                   {"conditioning_warning", ell.conditioning_warning},
                   {"message", ell.message}}}};
  bool operator_ok = ell.pass;
  if (ell.pass) {
    SchemeOptions scheme = build_scheme(ctx.cfg.section("operator"));
    scheme.require_m_matrix = false;
    const MMatrixReport mm = check_m_matrix(assemble(geo.mask, coeffs, scheme));
    op_doc["m_matrix"] = {{"pass", mm.pass},
                          {"positive_diagonal", mm.positive_diagonal},
                          {"nonpositive_offdiagonal", mm.nonpositive_offdiagonal},
                          {"diagonally_dominant", mm.diagonally_dominant},
                          {"chained_dominance", mm.chained_dominance},
                          {"message", mm.message},
                          {"suggestion", mm.suggestion}};
    operator_ok = mm.pass;
  }
  const bool pass = failed.empty() && operator_ok;
  ctx.manifest.write_json("checks.json",
                          {{"command", "checks"},
                           {"phi", phi.description()},
                           {"claims", to_json(phi.claims())},
                           {"hypotheses", to_json(hyp, dim)},
                           {"failed", failed},
                           {"failed_claims", hyp.failed_claims(phi.claims())},
                           {"t_samples", t_grid.size()},
                           {"operator", op_doc},
                           {"pass", pass},
                           {"dim", dim}},
                          "report");
  ctx.out << "checks: " << (pass ? "pass" : "FAIL");
  for (const auto& f : failed) ctx.out << " " << f;
  if (!operator_ok) ctx.out << " operator";
  ctx.out << "\n";
  return pass ? kOk : kHypothesisFailure;
}

int cmd_dichotomy(Context& ctx) {
  const Section geo_s = ctx.cfg.section("geometry");
  const Section ex = ctx.cfg.section("experiment");
  DichotomySetup setup;
  setup.name = ex.string("name", "dichotomy");
  setup.family = build_truncations(geo_s);
  const std::size_t dim = setup.family.grid->dim();
  setup.coeffs = build_coefficients(ctx.cfg.section("operator"), dim);
  setup.phi = build_phi(ctx.cfg, dim, setup.family.masks.back());
  setup.c = ex.number("c", 1.0);
  setup.density = build_density(ctx.cfg, dim, setup.family.masks.back());
  if (!setup.density) setup.density = setup.phi.density();
  setup.sup_params = sup_params(ex);
  setup.params = build_experiment_params(ctx.cfg);
  setup.potential_probes = probes_or_origin(ex, "probes", dim);
  setup.thin_set = thin_set_mask(ex, setup.family.grid);
  if (ctx.cfg.has_section("sweep")) {
    const Section sw = ctx.cfg.section("sweep");
    const Geometry sg = build_geometry(sw);
    setup.sweep_domain = sg.mask;
    if (sg.grid->dim() != dim) setup.sweep_coeffs = CoefficientSet::laplacian(sg.grid->dim());
    setup.m_values = sw.at("m_values").as_numbers();
    setup.sweep_probes = probes_or_origin(sw, "probes", sg.grid->dim());
  }
  ctx.log("running dichotomy '" + setup.name + "'");
  const DichotomyReport rep = dichotomy_report(setup);

  json doc = {{"command", "dichotomy"},
              {"name", rep.name},
              {"phi", setup.phi.description()},
              {"table",
               {{"bounded_solution_indicated", rep.bounded_indicated},
                {"large_solution_indicated", rep.large_indicated},
                {"hypotheses_ok", rep.hypotheses_ok},
                {"hypotheses_violated", rep.violated},
                {"contradiction", rep.contradiction}}},
              {"hypotheses", to_json(rep.hypotheses, dim)},
              {"exhaustion", exhaustion_json(rep.exhaustion)},
              {"sup_identity", to_json(rep.sup_identity)},
              {"bounded", to_json(rep.bounded)}};
  flag_dimension(doc, dim);
  ctx.manifest.write_table("levels.csv", exhaustion_levels_table(rep.exhaustion), "table");
  if (setup.sweep_domain) {
    doc["sweep"] = to_json(rep.sweep, setup.sweep_domain->grid().dim());
    ctx.manifest.write_table("sweep.csv", sweep_table(rep.sweep), "table");
  }
  if (!rep.potential.values.empty()) {
    doc["potential"] = to_json(rep.potential, dim);
    ctx.manifest.write_table("potential.csv", potential_table(rep.potential), "table");
  }
  ctx.manifest.write_json("dichotomy.json", doc, "report");
  ctx.out << "dichotomy " << rep.name << ": bounded " << (rep.bounded_indicated ? "yes" : "no") << ", large "
          << (rep.large_indicated ? "yes" : "no");
  if (!rep.hypotheses_ok) {
    ctx.out << " [hypotheses violated:";
    for (const auto& v : rep.violated) ctx.out << " " << v;
    ctx.out << "]";
  }
  if (rep.contradiction) ctx.out << " [CONTRADICTION]";
  ctx.out << "\n";
  return kOk;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"solve",     "exhaust", "majorant", "blowup",
                                                 "potential", "checks",  "dichotomy"};
  return names;
}

int run_command(const RunOptions& options, std::ostream& out, std::ostream& err) {
  try {
    return run_command(options, Config::load(options.config_path.string()), out, err);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  }
}

int run_command(const RunOptions& options, const Config& cfg, std::ostream& out, std::ostream& err) {
  const auto& names = command_names();
  if (std::find(names.begin(), names.end(), options.command) == names.end()) {
    err << "unknown command '" << options.command << "'\n";
    return kConfigError;
  }
  std::optional<Manifest> manifest;
  int code = kOk;
  std::string message = "ok";
  try {
    const Section output = cfg.section("output");
    const std::filesystem::path dir =
        options.out_dir ? *options.out_dir : std::filesystem::path(output.string("dir", "sublin_out"));
    const unsigned long long seed =
        options.seed ? *options.seed
                     : static_cast<unsigned long long>(cfg.section("experiment").integer(
                           "seed", static_cast<long long>(kDefaultSeed)));
    manifest.emplace(dir, options.command, cfg.text(), seed);
    std::set<std::string> formats = {"csv", "json"};
    if (const Value* f = output.find("formats")) {
      const auto list = f->as_strings();
      formats = std::set<std::string>(list.begin(), list.end());
      for (const auto& name : formats)
        if (name != "csv" && name != "json" && name != "bin" && name != "mask")
          throw ConfigError("[output] unknown format '" + name + "'");
    }
    Context ctx{cfg, *manifest, seed, options.verbose, out, err, formats};
    if (options.command == "solve") code = cmd_solve(ctx);
    else if (options.command == "exhaust") code = cmd_exhaust(ctx);
    else if (options.command == "majorant") code = cmd_majorant(ctx);
    else if (options.command == "blowup") code = cmd_blowup(ctx);
    else if (options.command == "potential") code = cmd_potential(ctx);
    else if (options.command == "checks") code = cmd_checks(ctx);
    else code = cmd_dichotomy(ctx);
    if (code != kOk) message = "completed with exit code " + std::to_string(code);
  } catch (const HypothesisError& e) {
    code = kHypothesisFailure;
    message = std::string("hypothesis check failed: ") + e.what();
  } catch (const NumericalError& e) {
    code = kNonConvergence;
    message = std::string("numerical failure: ") + e.what();
  } catch (const ConfigError& e) {
    code = kConfigError;
    message = std::string("config error: ") + e.what();
  } catch (const PreconditionError& e) {
    code = kConfigError;
    message = std::string("invalid input: ") + e.what();
  } catch (const ExprSyntaxError& e) {
    code = kConfigError;
    message = std::string("expression error: ") + e.what();
  } catch (const ExprDomainError& e) {
    code = kConfigError;
    message = std::string("expression domain error: ") + e.what();
  } catch (const std::filesystem::filesystem_error& e) {
    code = kConfigError;
    message = std::string("file error: ") + e.what();
  }
  if (code != kOk && message.rfind("completed", 0) != 0) err << message << "\n";
  if (manifest) {
    manifest->set_status(code, message);
    manifest->finish();
  }
  return code;
}

}  // namespace sublin::cli
