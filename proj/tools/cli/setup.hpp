#pragma once

// Builds library objects from a parsed run configuration.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cli/config.hpp"
#include "cli/expr.hpp"
#include "sublin/elliptic_operator.hpp"
#include "sublin/experiments.hpp"
#include "sublin/geometry.hpp"
#include "sublin/nonlinearity.hpp"
#include "sublin/solver.hpp"

namespace sublin::cli {

/// Variable names visible to expressions: x1..xd, r, and optionally t and p.
std::vector<std::string> expression_variables(std::size_t dim, bool with_t, bool with_p = false);

/// Spatial expression evaluated at a point (slots x1..xd, r).
std::function<double(const Point&)> spatial_function(const std::string& text, std::size_t dim);

struct Geometry {
  std::shared_ptr<const Grid> grid;
  MaskPtr mask;
};

/// dim, shape, bounds and an optional mask expression (interior where > 0)
/// read from `section`.
Geometry build_geometry(const Section& section);
TruncationFamily build_truncations(const Section& geometry);
bool has_truncations(const Section& geometry);
/// Cube truncations when `truncation_radii` is set, else build_exhaustion of
/// the geometry mask with `levels` levels.
ExhaustionSequence build_exhaustion_sequence(const Section& geometry);

CoefficientSet build_coefficients(const Section& section, std::size_t dim);
SchemeOptions build_scheme(const Section& section);
SemilinearParams build_solver_params(const Section& section);
ExperimentParams build_experiment_params(const Config& cfg);

/// Density p from [phi] p (expression) or p_csv (field CSV on `mask`).
std::optional<Density> build_density(const Config& cfg, std::size_t dim, const MaskPtr& mask);

/// Nonlinearity from [phi]; with `majorant = true` the built concave majorant
/// on `mask` replaces the base family.
Phi build_phi(const Config& cfg, std::size_t dim, const MaskPtr& mask);
/// The base family, never wrapped.
Phi build_base_phi(const Config& cfg, std::size_t dim, const MaskPtr& mask);

HypothesisFlags parse_claims(const std::vector<std::string>& names);

std::vector<Point> parse_points(const Value& v, std::size_t dim);

std::filesystem::path resolve_path(const Config& cfg, const std::string& path);

}  // namespace sublin::cli
