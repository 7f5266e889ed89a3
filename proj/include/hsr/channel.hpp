#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "hsr/random.hpp"
#include "hsr/scenario.hpp"
#include "hsr/statfun.hpp"

namespace hsr {

/// Log-distance path loss in dB: pathloss_a + 10 * gamma * log10(d).
inline double path_loss(const Scenario& sc, double d) {
  if (!(d > 0.0)) throw DomainError("path_loss: distance must be positive");
  return sc.pathloss_a + 10.0 * sc.pathloss_gamma * std::log10(d);
}

/// Mean and shadowing deviation of one transmitter-antenna link, in dB units.
struct LinkStat {
  double mu;     // dBm
  double sigma;  // dB
};

/// Transmit power of one RAU: the whole cell budget under selection, an equal
/// share under blanket transmission.
inline double rau_tx_power(const Scenario& sc) {
  if (sc.scheme == Scheme::DasBlanket) return sc.tx_power - 10.0 * std::log10(double(sc.n_raus));
  return sc.tx_power;
}

/// Link from RAU n (1-based) of `cell` to antenna i when the front antenna is
/// at front_x.
inline LinkStat link_stat(const Scenario& sc, double front_x, int n, AntennaId i, Cell cell) {
  if (n < 1 || n > sc.n_raus) throw DomainError("link_stat: RAU index out of range");
  const auto raus = rau_positions(sc, cell);
  const double d = link_distance(antenna_x(sc, front_x, i), raus[static_cast<std::size_t>(n - 1)]);
  return {rau_tx_power(sc) - path_loss(sc, d), sc.sigma(cell)};
}

/// Link from the cell's (master) BS antenna, used by traditional cells.
inline LinkStat bs_link_stat(const Scenario& sc, double front_x, AntennaId i, Cell cell) {
  const double d = link_distance(antenna_x(sc, front_x, i), bs_position(sc, cell));
  return {sc.tx_power - path_loss(sc, d), sc.sigma(cell)};
}

inline std::vector<LinkStat> rau_link_stats(const Scenario& sc, double front_x, AntennaId i,
                                            Cell cell) {
  std::vector<LinkStat> out;
  out.reserve(static_cast<std::size_t>(sc.n_raus));
  for (int n = 1; n <= sc.n_raus; ++n) out.push_back(link_stat(sc, front_x, n, i, cell));
  return out;
}

/// RSS law of one antenna/cell pair. MaxOfGaussians models the maximum of
/// independent Gaussian components (RAU selection by instantaneous RSS).
struct RssDistribution {
  enum class Kind { MaxOfGaussians, SingleGaussian };

  Kind kind = Kind::SingleGaussian;
  std::vector<LinkStat> components;

  static RssDistribution single(LinkStat s) { return {Kind::SingleGaussian, {s}}; }
  static RssDistribution max_of(std::vector<LinkStat> s) {
    if (s.empty()) throw DomainError("RssDistribution: no components");
    return {Kind::MaxOfGaussians, std::move(s)};
  }

  [[nodiscard]] double min_mu() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& c : components) m = std::min(m, c.mu);
    return m;
  }
  [[nodiscard]] double max_mu() const {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& c : components) m = std::max(m, c.mu);
    return m;
  }
  [[nodiscard]] double max_sigma() const {
    double m = 0.0;
    for (const auto& c : components) m = std::max(m, c.sigma);
    return m;
  }
};

// Truncation of the RSS axis used by every integral over r.
inline constexpr double kSupportSigmas = 10.0;

struct Support {
  double lower;
  double upper;
};

inline Support support(const RssDistribution& dist) {
  const double s = kSupportSigmas * dist.max_sigma();
  return {dist.min_mu() - s, dist.max_mu() + s};
}

inline Support support_union(std::initializer_list<Support> parts) {
  Support out{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const auto& p : parts) {
    out.lower = std::min(out.lower, p.lower);
    out.upper = std::max(out.upper, p.upper);
  }
  return out;
}

/// Pr{R <= r}: product of the component normal CDFs.
inline double cdf(const RssDistribution& dist, double r) {
  statfun::require_finite(r, "cdf");
  double p = 1.0;
  for (const auto& c : dist.components) p *= statfun::std_normal_cdf((r - c.mu) / c.sigma);
  return p;
}

/// Pr{R > r}. For one component the upper tail keeps full relative precision.
inline double ccdf(const RssDistribution& dist, double r) {
  if (dist.components.size() == 1) {
    const auto& c = dist.components.front();
    return statfun::q_function((r - c.mu) / c.sigma);
  }
  return 1.0 - cdf(dist, r);
}

/// Density of R: sum over components of the component density times the
/// CDFs of all the others.
inline double pdf(const RssDistribution& dist, double r) {
  statfun::require_finite(r, "pdf");
  const auto& comps = dist.components;
  if (comps.size() == 1) return statfun::normal_pdf(r, comps[0].mu, comps[0].sigma);
  double total = 0.0;
  for (std::size_t n = 0; n < comps.size(); ++n) {
    double term = statfun::normal_pdf(r, comps[n].mu, comps[n].sigma);
    for (std::size_t j = 0; j < comps.size() && term > 0.0; ++j) {
      if (j != n) term *= statfun::std_normal_cdf((r - comps[j].mu) / comps[j].sigma);
    }
    total += term;
  }
  return total;
}

/// One independent draw of R.
inline double sample_rss(const RssDistribution& dist, RandomStream& rng) {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& c : dist.components) best = std::max(best, c.mu + c.sigma * rng.normal());
  return best;
}

inline RssDistribution blanket_distribution(std::span<const LinkStat> raus) {
  std::vector<double> mus;
  std::vector<double> sigmas;
  for (const auto& l : raus) {
    mus.push_back(l.mu);
    sigmas.push_back(l.sigma);
  }
  const auto g = statfun::lognormal_sum_approx(mus, sigmas);
  return RssDistribution::single({g.mu_db, g.sigma_db});
}

/// Effective RSS law seen by antenna i from `cell` under the scenario's scheme.
inline RssDistribution rss_distribution(const Scenario& sc, double front_x, AntennaId i, Cell cell) {
  switch (sc.scheme) {
    case Scheme::Traditional:
      return RssDistribution::single(bs_link_stat(sc, front_x, i, cell));
    case Scheme::DasBlanket:
      return blanket_distribution(rau_link_stats(sc, front_x, i, cell));
    case Scheme::Proposed:
    case Scheme::DasSingle:
      break;
  }
  auto links = rau_link_stats(sc, front_x, i, cell);
  if (sc.selection == RauSelection::MeanPathloss) {
    auto best = std::max_element(links.begin(), links.end(),
                                 [](const LinkStat& a, const LinkStat& b) { return a.mu < b.mu; });
    return RssDistribution::single(*best);
  }
  return RssDistribution::max_of(std::move(links));
}

/// Link whose RSS enters the handover condition: under RAU selection the
/// serving cell's last RAU and the target cell's first RAU; otherwise the
/// cell's effective RSS.
inline RssDistribution handover_distribution(const Scenario& sc, double front_x, AntennaId i,
                                             Cell cell) {
  if (uses_rau_selection(sc.scheme)) {
    const int n = cell == Cell::Serving ? sc.n_raus : 1;
    return RssDistribution::single(link_stat(sc, front_x, n, i, cell));
  }
  return rss_distribution(sc, front_x, i, cell);
}

// ---------------------------------------------------------------------------
// Monte Carlo link sampling

/// Mean link budgets of one antenna/cell pair at one position, precomputed so
/// repeated trials only draw shadowing.
struct CellLinks {
  std::vector<LinkStat> links;  // per RAU (DAS schemes) or the BS link
  std::size_t handover_index = 0;
  std::size_t strongest_mean_index = 0;
};

inline CellLinks cell_links(const Scenario& sc, double front_x, AntennaId i, Cell cell) {
  CellLinks out;
  if (sc.scheme == Scheme::Traditional) {
    out.links = {bs_link_stat(sc, front_x, i, cell)};
    return out;
  }
  out.links = rau_link_stats(sc, front_x, i, cell);
  out.handover_index = cell == Cell::Serving ? out.links.size() - 1 : 0;
  for (std::size_t k = 1; k < out.links.size(); ++k) {
    if (out.links[k].mu > out.links[out.strongest_mean_index].mu) out.strongest_mean_index = k;
  }
  return out;
}

struct CellSample {
  double rss;       // effective RSS of the cell at the antenna, dBm
  double handover;  // RSS entering the handover condition, dBm
};

/// Draws independent shadowing for every link of the cell (always in RAU
/// order) and combines it per the scheme: max for selection, linear power
/// sum for blanket, the single link for traditional cells.
inline CellSample draw_cell(const Scenario& sc, const CellLinks& cl, RandomStream& rng) {
  if (cl.links.size() == 1) {
    const double v = cl.links[0].mu + cl.links[0].sigma * rng.normal();
    return {v, v};
  }
  double best = -std::numeric_limits<double>::infinity();
  double handover = 0.0;
  double chosen = 0.0;
  double linear_sum = 0.0;
  const bool blanket = sc.scheme == Scheme::DasBlanket;
  for (std::size_t k = 0; k < cl.links.size(); ++k) {
    const double v = cl.links[k].mu + cl.links[k].sigma * rng.normal();
    if (k == cl.handover_index) handover = v;
    if (k == cl.strongest_mean_index) chosen = v;
    best = std::max(best, v);
    if (blanket) linear_sum += std::pow(10.0, 0.1 * v);
  }
  if (blanket) {
    const double total = 10.0 * std::log10(linear_sum);
    return {total, total};
  }
  return {sc.selection == RauSelection::MeanPathloss ? chosen : best, handover};
}

}  // namespace hsr
