#include "sublin/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "sublin/error.hpp"

namespace sublin {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kMollifierNodes = 64;
// Dyadic grading toward s = 0, where phi(x, delta s) may behave like s^gamma.
constexpr std::size_t kGradedNodes = 24;
constexpr int kGradedLevels = 52;
constexpr double kSmallestDelta = 0x1p-60;

std::string format_witness(const Site& s, double t) {
  std::ostringstream out;
  out << "x = (" << s.x[0] << ", " << s.x[1] << ", " << s.x[2] << "), t = " << t;
  return out.str();
}

}  // namespace

std::vector<Site> sites_of(const DomainMask& mask) {
  std::vector<Site> sites;
  sites.reserve(mask.interior().size() + mask.boundary().size());
  std::vector<std::size_t> active(mask.interior().begin(), mask.interior().end());
  active.insert(active.end(), mask.boundary().begin(), mask.boundary().end());
  std::sort(active.begin(), active.end());
  for (std::size_t i : active) sites.push_back({i, mask.grid().point(i)});
  return sites;
}

Density constant_density(double value) {
  return [value](const Site&) { return value; };
}

Density density_from_field(const Field& p) {
  auto values = std::make_shared<std::vector<double>>(p.values().begin(), p.values().end());
  return [values](const Site& s) {
    if (s.index >= values->size() || !std::isfinite((*values)[s.index]))
      throw PreconditionError("density is not defined at " + format_witness(s, 0.0));
    return (*values)[s.index];
  };
}

Density density_from_function(std::function<double(const Point&)> fn) {
  return [fn = std::move(fn)](const Site& s) { return fn(s.x); };
}

Profile power_profile(double gamma) {
  if (!(gamma > 0)) throw PreconditionError("power exponent must be positive");
  return [gamma](double t) { return t > 0 ? std::pow(t, gamma) : 0.0; };
}

Profile unit_cap_profile() {
  return [](double t) { return std::clamp(t, 0.0, 1.0); };
}

Phi::Phi(PhiKind kind, Kernel kernel, std::string description, HypothesisFlags claims,
         std::optional<Density> density)
    : kind_(kind), kernel_(std::move(kernel)), description_(std::move(description)), claims_(claims),
      density_(std::move(density)) {}

Phi Phi::zero() {
  return Phi(PhiKind::zero, [](const Site&, double) { return 0.0; }, "0", {true, true, true, true, true},
             constant_density(0.0));
}

Phi Phi::product(Density p, Profile psi, std::string description, HypothesisFlags claims) {
  Kernel k = [p, psi = std::move(psi)](const Site& s, double t) { return p(s) * psi(t); };
  return Phi(PhiKind::product, std::move(k), std::move(description), claims, std::move(p));
}

Phi Phi::power(Density p, double gamma) {
  const bool sublinear = gamma <= 1.0;
  std::ostringstream name;
  name << "p*t^" << gamma;
  Phi phi = product(std::move(p), power_profile(gamma), name.str(), {sublinear, true, true, true, sublinear});
  phi.exponent_ = gamma;
  return phi;
}

Phi Phi::unit_cap(Density p) {
  return product(std::move(p), unit_cap_profile(), "p*min(t,1)", {true, true, true, true, true});
}

Phi Phi::affine(Density p, double slope, double offset) {
  if (slope < 0 || offset < 0) throw PreconditionError("affine phi needs nonnegative slope and offset");
  Kernel k = [p, slope, offset](const Site& s, double t) { return t > 0 ? p(s) * (slope * t + offset) : 0.0; };
  std::ostringstream name;
  name << "p*(" << slope << "*t+" << offset << ")";
  const bool sh1 = slope <= 1.0 && offset <= 1.0;
  return Phi(PhiKind::affine, std::move(k), name.str(), {sh1, true, offset == 0.0, true, true}, std::move(p));
}

Phi Phi::tabulated(std::vector<double> t_grid, std::vector<std::vector<double>> rows, HypothesisFlags claims) {
  if (t_grid.size() < 2) throw PreconditionError("tabulated phi needs at least two t nodes");
  if (t_grid.front() != 0.0) throw PreconditionError("tabulated phi must start at t = 0");
  for (std::size_t j = 1; j < t_grid.size(); ++j)
    if (!(t_grid[j] > t_grid[j - 1])) throw PreconditionError("tabulated t grid must be strictly increasing");
  for (const auto& row : rows)
    if (!row.empty() && row.size() != t_grid.size()) throw PreconditionError("tabulated row length mismatch");
  auto grid = std::make_shared<const std::vector<double>>(std::move(t_grid));
  auto table = std::make_shared<const std::vector<std::vector<double>>>(std::move(rows));
  Kernel k = [grid, table](const Site& s, double t) {
    if (s.index >= table->size() || (*table)[s.index].empty())
      throw PreconditionError("tabulated phi has no row for " + format_witness(s, t));
    const auto& row = (*table)[s.index];
    const auto& g = *grid;
    if (t <= 0) return row.front();
    auto it = std::upper_bound(g.begin(), g.end(), t);
    std::size_t j = static_cast<std::size_t>(it - g.begin());
    j = std::clamp<std::size_t>(j, 1, g.size() - 1);
    const double w = (t - g[j - 1]) / (g[j] - g[j - 1]);
    return row[j - 1] + w * (row[j] - row[j - 1]);
  };
  return Phi(PhiKind::tabulated, std::move(k), "tabulated", claims, std::nullopt);
}

Phi Phi::general(Kernel kernel, std::string description, HypothesisFlags claims, std::optional<Density> density) {
  return Phi(PhiKind::general, std::move(kernel), std::move(description), claims, std::move(density));
}

Phi Phi::majorant(Kernel kernel, std::string description, Density density, bool h1) {
  return Phi(PhiKind::majorant, std::move(kernel), std::move(description), {true, h1, true, true, true},
             std::move(density));
}

double Phi::operator()(const Site& site, double t) const {
  if (t < 0) return 0.0;
  const double v = kernel_(site, t);
  if (!std::isfinite(v))
    throw NumericalError("phi (" + description_ + ") is not finite at " + format_witness(site, t));
  return v;
}

Phi Phi::with_claims(HypothesisFlags claims) const {
  Phi copy = *this;
  copy.claims_ = claims;
  return copy;
}

std::vector<std::string> HypothesisReport::failed_claims(const HypothesisFlags& claims) const {
  std::vector<std::string> out;
  auto add = [&](bool claimed, const HypothesisResult& r, const char* name) {
    if (claimed && r.assessed && !r.pass) out.emplace_back(name);
  };
  add(claims.sh1, sh1, "SH1");
  add(claims.h1, h1, "H1");
  add(claims.h2, h2, "H2");
  add(claims.h3, h3, "H3");
  add(claims.h4, h4, "H4");
  return out;
}

HypothesisReport check_hypotheses(const Phi& phi, const std::vector<Site>& sites, const std::vector<double>& t_grid,
                                  std::optional<Density> density) {
  if (t_grid.size() < 3) throw PreconditionError("hypothesis checks need at least three t nodes");
  for (std::size_t j = 1; j < t_grid.size(); ++j)
    if (!(t_grid[j] > t_grid[j - 1])) throw PreconditionError("t grid must be strictly increasing");
  if (t_grid.front() < 0) throw PreconditionError("t grid must be nonnegative");

  HypothesisReport report;
  const std::optional<Density>& p = density ? density : phi.density();
  report.sh1.assessed = p.has_value();
  if (!p) report.sh1.note = "no density p available";
  report.h1.assessed = false;
  report.h1.note = "local Kato membership is not decided by sampling; see the Kato estimator";

  double worst_h2 = 0.0;
  double worst_h4 = 0.0;
  std::vector<double> values(t_grid.size());
  for (const Site& site : sites) {
    for (std::size_t j = 0; j < t_grid.size(); ++j) values[j] = phi(site, t_grid[j]);

    const double at_zero = phi.raw(site, 0.0);
    if (!(std::abs(at_zero) <= 1e-12) && report.h3.pass) {
      report.h3.pass = false;
      report.h3.witness = Witness{site, 0.0, at_zero};
    }

    if (p) {
      const double pv = (*p)(site);
      for (std::size_t j = 0; j < t_grid.size(); ++j) {
        double ratio;
        if (pv > 0) {
          ratio = values[j] / (pv * (t_grid[j] + 1.0));
        } else {
          ratio = values[j] > 0 ? kInf : 0.0;
        }
        if (ratio > report.sh1_multiplier) {
          report.sh1_multiplier = ratio;
          if (ratio > 1.0 + 1e-12) report.sh1.witness = Witness{site, t_grid[j], values[j]};
        }
      }
    }

    for (std::size_t j = 0; j < t_grid.size(); ++j) {
      if (values[j] < 0 && report.h2.pass) {
        report.h2.pass = false;
        report.h2.witness = Witness{site, t_grid[j], values[j]};
        report.h2.note = "negative value";
      }
      if (j == 0) continue;
      const double drop = values[j - 1] - values[j];
      if (drop > 1e-12 * std::max(1.0, std::abs(values[j - 1])) && drop > worst_h2) {
        worst_h2 = drop;
        report.h2.pass = false;
        report.h2.witness = Witness{site, t_grid[j], values[j]};
        report.h2.note = "decreasing between consecutive t nodes";
      }
    }

    for (std::size_t j = 2; j < t_grid.size(); ++j) {
      const double s0 = (values[j - 1] - values[j - 2]) / (t_grid[j - 1] - t_grid[j - 2]);
      const double s1 = (values[j] - values[j - 1]) / (t_grid[j] - t_grid[j - 1]);
      const double rise = s1 - s0;
      if (rise > 1e-9 * std::max(1.0, std::abs(s0)) && rise > worst_h4) {
        worst_h4 = rise;
        report.h4.pass = false;
        report.h4.witness = Witness{site, t_grid[j - 1], values[j - 1]};
        report.h4.note = "slope increases across this node";
      }
    }
  }
  if (p) report.sh1.pass = report.sh1_multiplier <= 1.0 + 1e-12;
  return report;
}

double mollified_at_zero(const Phi& phi, const Site& site, double delta, const Mollifier& eta) {
  if (!(delta > 0 && delta <= 1)) throw PreconditionError("mollifier scale must lie in (0, 1]");
  auto f = [&](double s) { return phi(site, delta * s) * eta(s); };
  double v = gauss_rule(kMollifierNodes).integrate(f, 0.5, 1.0);
  const GaussRule& graded = gauss_rule(kGradedNodes);
  double hi = 0.5;
  for (int j = 1; j < kGradedLevels; ++j, hi *= 0.5) v += graded.integrate(f, 0.5 * hi, hi);
  v += graded.integrate(f, 0.0, hi);
  if (!std::isfinite(v)) throw NumericalError("mollifier quadrature produced a non-finite value");
  return v;
}

double mollified(const Phi& phi, const Site& site, double t, double delta, const Mollifier& eta) {
  if (!(delta > 0 && delta <= 1)) throw PreconditionError("mollifier scale must lie in (0, 1]");
  const GaussRule& rule = gauss_rule(kMollifierNodes);
  auto f = [&](double s) { return phi(site, t - delta * s) * eta(s); };
  return rule.integrate(f, -1.0, 0.0) + rule.integrate(f, 0.0, 1.0);
}

std::vector<double> default_delta_grid() {
  std::vector<double> g;
  for (int k = 0; k <= 12; ++k) g.push_back(std::ldexp(1.0, -k));
  return g;
}

std::vector<double> default_majorant_t_grid() {
  std::vector<double> g(257);
  for (std::size_t j = 0; j < g.size(); ++j) g[j] = 2.0 * static_cast<double>(j) / 256.0;
  return g;
}

struct MajorantPhi::Data {
  std::vector<double> deltas;
  std::vector<double> t_grid;
  std::vector<Site> sites;
  std::vector<std::ptrdiff_t> slot_of_index;
  std::vector<double> density;
  /// mollified_at_zero per site and delta.
  std::vector<std::vector<double>> moments;
  std::vector<std::vector<double>> psi;
  double c1 = 0.0;

  std::size_t slot(const Site& s) const {
    if (s.index >= slot_of_index.size() || slot_of_index[s.index] < 0)
      throw PreconditionError("majorant was not built at " + format_witness(s, 0.0));
    return static_cast<std::size_t>(slot_of_index[s.index]);
  }

  double psi_at(std::size_t k, double t) const {
    if (t <= 0) return 0.0;
    const double slope = 2.0 * c1 * density[k] * t;
    const auto& m = moments[k];
    double best = kInf;
    for (std::size_t i = 0; i < deltas.size(); ++i) {
      const double linear = slope / deltas[i];
      if (linear >= best) break;
      best = std::min(best, linear + 2.0 * m[i]);
    }
    return best;
  }

  double phi1_at(std::size_t k, double t) const {
    if (t <= 0) return 0.0;
    return 2.0 * density[k] * t + psi_at(k, std::min(t, 1.0));
  }
};

const std::vector<double>& MajorantPhi::delta_family() const { return data_->deltas; }
const std::vector<double>& MajorantPhi::t_grid() const { return data_->t_grid; }
const std::vector<Site>& MajorantPhi::sites() const { return data_->sites; }
double MajorantPhi::c1() const { return data_->c1; }

double MajorantPhi::psi(const Site& site, double t) const { return data_->psi_at(data_->slot(site), t); }

double MajorantPhi::psi_delta(const Site& site, double t, double delta) const {
  const std::size_t k = data_->slot(site);
  return 2.0 * data_->c1 / delta * data_->density[k] * t + 2.0 * mollified_at_zero(*base_, site, delta);
}

double MajorantPhi::psi_table(std::size_t site_slot, std::size_t t_slot) const {
  return data_->psi.at(site_slot).at(t_slot);
}

MajorantPhi build_concave_majorant(const Phi& phi, const Field& p, const Mollifier& eta,
                                   std::vector<double> delta_grid, std::vector<double> t_grid) {
  if (delta_grid.empty()) throw PreconditionError("delta grid is empty");
  for (double d : delta_grid)
    if (!(d > 0 && d <= 1)) throw PreconditionError("delta grid must lie in (0, 1]");
  if (t_grid.size() < 3 || t_grid.front() != 0.0)
    throw PreconditionError("majorant t grid must start at 0 and have at least three nodes");

  const std::vector<Site> sites = sites_of(p.mask());
  const Density density = density_from_field(p);
  for (const Site& s : sites)
    if (density(s) < 0) throw PreconditionError("density p must be nonnegative");

  const HypothesisReport sh1 = check_hypotheses(phi, sites, t_grid, density);
  if (!sh1.sh1.pass) {
    std::ostringstream msg;
    msg << "SH1 fails for the given density: multiplier " << sh1.sh1_multiplier;
    if (sh1.sh1.witness) msg << " at " << format_witness(sh1.sh1.witness->site, sh1.sh1.witness->t);
    throw HypothesisError(msg.str());
  }

  auto data = std::make_shared<MajorantPhi::Data>();
  std::sort(delta_grid.begin(), delta_grid.end(), std::greater<>());
  delta_grid.erase(std::unique(delta_grid.begin(), delta_grid.end()), delta_grid.end());
  while (delta_grid.back() * 0.5 >= kSmallestDelta) delta_grid.push_back(delta_grid.back() * 0.5);
  data->deltas = std::move(delta_grid);
  data->t_grid = std::move(t_grid);
  data->sites = sites;
  data->c1 = eta.c1();
  data->slot_of_index.assign(p.grid().size(), -1);
  // For p(x) psi(t) the moments factor as p(x) times those of psi, so they are
  // computed once at the site with the largest p and rescaled.
  std::vector<double> reference_moments;
  double reference_p = 0.0;
  if (phi.kind() == PhiKind::product && phi.density()) {
    const Site* best = nullptr;
    for (const Site& s : sites) {
      const double v = (*phi.density())(s);
      if (v > reference_p) {
        reference_p = v;
        best = &s;
      }
    }
    if (best)
      for (double d : data->deltas) reference_moments.push_back(mollified_at_zero(phi, *best, d, eta));
  }
  for (std::size_t k = 0; k < sites.size(); ++k) {
    data->slot_of_index[sites[k].index] = static_cast<std::ptrdiff_t>(k);
    data->density.push_back(density(sites[k]));
    std::vector<double> m;
    m.reserve(data->deltas.size());
    if (!reference_moments.empty()) {
      const double scale = (*phi.density())(sites[k]) / reference_p;
      for (double r : reference_moments) m.push_back(r * scale);
    } else {
      for (double d : data->deltas) m.push_back(mollified_at_zero(phi, sites[k], d, eta));
    }
    data->moments.push_back(std::move(m));
  }

  MajorantReport report;
  report.sites = sites.size();
  report.domination_margin = kInf;
  report.constant_c = 2.0;
  const auto& tg = data->t_grid;
  const std::size_t nt = tg.size();
  bool uniform = true;
  for (std::size_t j = 1; j < nt; ++j)
    uniform = uniform && std::abs((tg[j] - tg[j - 1]) - (tg[1] - tg[0])) <= 1e-12 * tg.back();

  std::vector<double> phi1(nt);
  for (std::size_t k = 0; k < sites.size(); ++k) {
    std::vector<double> row(nt);
    for (std::size_t j = 0; j < nt; ++j) row[j] = data->psi_at(k, tg[j]);
    for (std::size_t j = 1; j < nt; ++j) {
      if (row[j] < row[j - 1]) {
        const double gap = row[j - 1] - row[j];
        if (gap > 1e-12) throw NumericalError("majorant psi decreases in t beyond rounding at " +
                                              format_witness(sites[k], tg[j]));
        report.monotone_correction = std::max(report.monotone_correction, gap);
        row[j] = row[j - 1];
      }
    }
    const double pk = data->density[k];
    for (std::size_t j = 0; j < nt; ++j) {
      const double t = tg[j];
      phi1[j] = t <= 0 ? 0.0 : 2.0 * pk * t + (t <= 1.0 ? row[j] : data->psi_at(k, 1.0));
      report.domination_margin = std::min(report.domination_margin, phi1[j] - phi(sites[k], t));
      if (pk > 0) report.constant_c = std::max(report.constant_c, phi1[j] / (pk * (t + 1.0)));
    }
    if (tg[0] == 0.0 && phi1[0] != 0.0) report.zero_at_origin = false;

    double defect = 0.0;
    for (std::size_t i = 0; i < nt; ++i) {
      for (std::size_t j = i + 2; j < nt; j += uniform ? 2 : 1) {
        const double mid_value = uniform ? phi1[(i + j) / 2] : data->phi1_at(k, 0.5 * (tg[i] + tg[j]));
        defect = std::min(defect, mid_value - 0.5 * (phi1[i] + phi1[j]));
      }
    }
    report.concavity_defect = std::min(report.concavity_defect, defect);
    data->psi.push_back(std::move(row));
  }
  if (report.concavity_defect < -1e-9)
    throw NumericalError("majorant fails midpoint concavity by " + std::to_string(-report.concavity_defect) +
                         "; refine the delta grid");

  MajorantPhi out;
  out.base_ = std::make_shared<const Phi>(phi);
  out.data_ = data;
  out.report_ = report;
  std::shared_ptr<const MajorantPhi::Data> shared = data;
  Phi::Kernel kernel = [shared](const Site& s, double t) { return shared->phi1_at(shared->slot(s), t); };
  const double scale = report.constant_c;
  Density p1 = [shared, scale](const Site& s) { return scale * shared->density[shared->slot(s)]; };
  out.phi_ = Phi::majorant(std::move(kernel), "majorant of " + phi.description(), std::move(p1), phi.claims().h1);
  return out;
}

}  // namespace sublin
