#pragma once

// Nonlinearities phi(x, t) >= 0 with their claimed structural hypotheses,
// sampling-based hypothesis checks, and the mollifier construction of a
// concave majorant phi_1 >= phi.

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sublin/field.hpp"
#include "sublin/quadrature.hpp"

namespace sublin {

/// Where phi is evaluated: the flat grid index (for tabulated and field-backed
/// data) and the coordinates (for expression-backed data).
struct Site {
  std::size_t index = 0;
  Point x{0.0, 0.0, 0.0};
};

std::vector<Site> sites_of(const DomainMask& mask);

/// Claimed hypotheses. SH1: phi <= p (t+1). H1: phi(., t) locally Kato.
/// H2: continuous nondecreasing in t. H3: phi = 0 for t <= 0. H4: concave in t.
struct HypothesisFlags {
  bool sh1 = false;
  bool h1 = false;
  bool h2 = false;
  bool h3 = false;
  bool h4 = false;
};

using Density = std::function<double(const Site&)>;
using Profile = std::function<double(double)>;

Density constant_density(double value);
Density density_from_field(const Field& p);
Density density_from_function(std::function<double(const Point&)> fn);

Profile power_profile(double gamma);
/// t -> min(t, 1).
Profile unit_cap_profile();

enum class PhiKind { zero, product, affine, tabulated, general, majorant };

class Phi {
 public:
  using Kernel = std::function<double(const Site&, double)>;

  static Phi zero();
  /// p(x) psi(t).
  static Phi product(Density p, Profile psi, std::string description, HypothesisFlags claims);
  /// p(x) t^gamma; claims follow from gamma.
  static Phi power(Density p, double gamma);
  /// p(x) min(t, 1).
  static Phi unit_cap(Density p);
  /// p(x) (slope t + offset) for t > 0.
  static Phi affine(Density p, double slope, double offset);
  /// Piecewise-linear in t on a sorted grid starting at 0, one row per flat
  /// grid index (rows for inactive points may be empty); linear extrapolation
  /// past the last node.
  static Phi tabulated(std::vector<double> t_grid, std::vector<std::vector<double>> rows, HypothesisFlags claims);
  static Phi general(Kernel kernel, std::string description, HypothesisFlags claims,
                     std::optional<Density> density = std::nullopt);
  /// Concave majorant family; claims SH1 (with `density`), H2, H3, H4.
  static Phi majorant(Kernel kernel, std::string description, Density density, bool h1);

  PhiKind kind() const { return kind_; }
  const std::string& description() const { return description_; }
  const HypothesisFlags& claims() const { return claims_; }
  /// The density p of product/affine/majorant families, if any.
  const std::optional<Density>& density() const { return density_; }
  /// Exponent of the power family.
  std::optional<double> exponent() const { return exponent_; }

  /// phi(x, t); 0 for t < 0. Throws NumericalError on a non-finite value.
  double operator()(const Site& site, double t) const;
  /// The family's value without the t < 0 extension or finiteness check.
  double raw(const Site& site, double t) const { return kernel_(site, t); }

  Phi with_claims(HypothesisFlags claims) const;

 private:
  Phi(PhiKind kind, Kernel kernel, std::string description, HypothesisFlags claims,
      std::optional<Density> density);

  PhiKind kind_;
  Kernel kernel_;
  std::string description_;
  HypothesisFlags claims_;
  std::optional<Density> density_;
  std::optional<double> exponent_;
};

struct Witness {
  Site site;
  double t = 0.0;
  double value = 0.0;
};

struct HypothesisResult {
  bool assessed = true;
  bool pass = true;
  std::optional<Witness> witness;
  std::string note;
};

struct HypothesisReport {
  HypothesisResult sh1;
  HypothesisResult h1;
  HypothesisResult h2;
  HypothesisResult h3;
  HypothesisResult h4;
  /// sup of phi / (p (t+1)) over the samples with p > 0 (infinite when phi > 0 where p = 0).
  double sh1_multiplier = 0.0;

  /// Names of claimed hypotheses whose check failed.
  std::vector<std::string> failed_claims(const HypothesisFlags& claims) const;
};

/// Sampling checks on sites x t_grid (sorted, >= 3 nodes, t >= 0). SH1 uses
/// `density` when given, else the family's own density; without either it is
/// not assessed. H1 is never assessed by sampling.
HypothesisReport check_hypotheses(const Phi& phi, const std::vector<Site>& sites, const std::vector<double>& t_grid,
                                  std::optional<Density> density = std::nullopt);

/// integral_0^1 phi(x, delta s) eta(s) ds with the 64-node Gauss rule.
double mollified_at_zero(const Phi& phi, const Site& site, double delta, const Mollifier& eta = standard_mollifier());

/// (phi_x * eta_delta)(t) = integral_{-1}^{1} phi(x, t - delta s) eta(s) ds.
double mollified(const Phi& phi, const Site& site, double t, double delta, const Mollifier& eta = standard_mollifier());

/// Default delta grid 2^-k, k = 0..12.
std::vector<double> default_delta_grid();
/// Default table grid: 257 uniform nodes on [0, 2] (t = 1 is a node).
std::vector<double> default_majorant_t_grid();

struct MajorantReport {
  double domination_margin = 0.0;
  double concavity_defect = 0.0;
  double constant_c = 0.0;
  bool zero_at_origin = true;
  double monotone_correction = 0.0;
  std::size_t sites = 0;
};

/// phi_1(x, t) = 2 p t + psi(x, min(t, 1)) for t >= 0, 0 for t < 0, where
/// psi(x, t) = min over the delta family of (2 c1 / delta) p t + 2 M_delta(x)
/// and M_delta = mollified_at_zero. The delta family is the requested grid
/// extended by halving down to 2^-60; psi(x, 0) = 0.
class MajorantPhi {
 public:
  const Phi& phi() const { return phi_; }
  const Phi& base() const { return *base_; }
  const std::vector<double>& delta_family() const;
  const std::vector<double>& t_grid() const;
  const std::vector<Site>& sites() const;
  double c1() const;
  double constant_c() const { return report_.constant_c; }
  const MajorantReport& report() const { return report_; }

  /// psi(x, t) at a built site.
  double psi(const Site& site, double t) const;
  /// psi_delta(x, t) for any delta in (0, 1].
  double psi_delta(const Site& site, double t, double delta) const;
  /// Tabulated psi(x_k, t_j).
  double psi_table(std::size_t site_slot, std::size_t t_slot) const;

  struct Data;

 private:
  friend MajorantPhi build_concave_majorant(const Phi&, const Field&, const Mollifier&, std::vector<double>,
                                            std::vector<double>);
  MajorantPhi() = default;

  std::shared_ptr<const Phi> base_;
  std::shared_ptr<Data> data_;
  Phi phi_ = Phi::zero();
  MajorantReport report_;
};

/// Throws HypothesisError when SH1 fails for (phi, p) on the sampled lattice
/// and NumericalError when concavity or monotonicity fail beyond tolerance.
MajorantPhi build_concave_majorant(const Phi& phi, const Field& p, const Mollifier& eta = standard_mollifier(),
                                   std::vector<double> delta_grid = default_delta_grid(),
                                   std::vector<double> t_grid = default_majorant_t_grid());

}  // namespace sublin
