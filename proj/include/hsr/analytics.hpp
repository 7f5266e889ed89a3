#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "hsr/channel.hpp"
#include "hsr/scenario.hpp"
#include "hsr/statfun.hpp"

namespace hsr {

// Where the printed closed forms disagree with the event they define, the
// metrics are available both as printed (PaperLiteral) and as re-derived
// from the event definition (Rederived, the default).
enum class MetricMode { PaperLiteral, Rederived };

inline std::string_view to_string(MetricMode m) {
  return m == MetricMode::PaperLiteral ? "paper" : "rederived";
}

class NonConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A conditional probability; undefined when the conditioning event has
/// (numerically) zero probability, in which case value is NaN.
struct ConditionalProbability {
  double value = std::numeric_limits<double>::quiet_NaN();
  bool defined = false;
};

// Below this trigger probability the failure conditional is not reported.
inline constexpr double kMinConditioningProbability = 1e-12;

namespace detail {

inline statfun::Quadrature relative_quadrature() {
  statfun::Quadrature q;
  q.absolute_tolerance = 1e-300;
  q.relative_tolerance = 1e-10;
  return q;
}

inline double checked_integral(const statfun::IntegrationResult& r, const char* what) {
  if (!r.converged) {
    throw NonConvergenceError(std::string(what) + ": quadrature did not converge (error estimate " +
                              std::to_string(r.error_estimate) + ")");
  }
  return r.value;
}

inline double clamp01(double p) { return std::clamp(p, 0.0, 1.0); }

}  // namespace detail

/// Pr{R_TC - R_SC > H} by integrating Pr{R_TC > r + H} against the serving
/// density over the truncated RSS axis. Valid for any pair of laws.
inline double trigger_prob_integral(const RssDistribution& serving, const RssDistribution& target,
                                    double hysteresis,
                                    const statfun::Quadrature& q = detail::relative_quadrature()) {
  const Support s = support(serving);
  const Support t = support(target);
  const Support range = support_union({s, {t.lower - hysteresis, t.upper - hysteresis}});
  auto integrand = [&](double r) { return ccdf(target, r + hysteresis) * pdf(serving, r); };
  return detail::clamp01(detail::checked_integral(
      statfun::integrate(integrand, range.lower, range.upper, q, 32), "trigger_prob"));
}

/// Trigger probability with two Gaussian handover links: the difference of
/// independent Gaussians is Gaussian.
inline double trigger_prob_closed_form(const LinkStat& serving, const LinkStat& target,
                                       double hysteresis) {
  const double spread = std::hypot(serving.sigma, target.sigma);
  return statfun::q_function((hysteresis - (target.mu - serving.mu)) / spread);
}

/// Probability that antenna i satisfies the handover condition when the front
/// antenna is at front_x. Closed form under RAU selection, quadrature else.
inline double trigger_prob(const Scenario& sc, double front_x, AntennaId i) {
  if (uses_rau_selection(sc.scheme)) {
    return trigger_prob_closed_form(link_stat(sc, front_x, sc.n_raus, i, Cell::Serving),
                                    link_stat(sc, front_x, 1, i, Cell::Target), sc.hysteresis);
  }
  return trigger_prob_integral(handover_distribution(sc, front_x, i, Cell::Serving),
                               handover_distribution(sc, front_x, i, Cell::Target), sc.hysteresis);
}

/// Occurrence masses over the grid. Rederived: probability that the first
/// trigger happens at grid index k with independent positions.
/// PaperLiteral: P_trig(x_k) * dx * sum_{j<k} P_trig(x_j); not a
/// probability mass, kept for figure comparison.
inline std::vector<double> occurrence_from_trigger(const std::vector<double>& trig, double step,
                                                   MetricMode mode) {
  std::vector<double> out(trig.size(), 0.0);
  if (mode == MetricMode::Rederived) {
    double survive = 1.0;
    for (std::size_t k = 0; k < trig.size(); ++k) {
      out[k] = trig[k] * survive;
      survive *= 1.0 - trig[k];
    }
  } else {
    double cumulative = 0.0;
    for (std::size_t k = 0; k < trig.size(); ++k) {
      out[k] = trig[k] * step * cumulative;
      cumulative += trig[k];
    }
  }
  return out;
}

inline std::vector<double> occurrence_prob(const Scenario& sc, const PositionGrid& grid,
                                           AntennaId i, MetricMode mode) {
  std::vector<double> trig;
  trig.reserve(grid.size());
  for (double x : grid.positions) trig.push_back(trigger_prob(sc, x, i));
  return occurrence_from_trigger(trig, grid.step(), mode);
}

/// Pr{R_TC < T | R_TC - R_SC > H} for antenna i. Rederived integrates the
/// serving CDF at r - H; PaperLiteral integrates its complement as printed.
inline ConditionalProbability failure_prob(const Scenario& sc, double front_x, AntennaId i,
                                           MetricMode mode = MetricMode::Rederived) {
  const auto serving = handover_distribution(sc, front_x, i, Cell::Serving);
  const auto target = handover_distribution(sc, front_x, i, Cell::Target);
  const double h = sc.hysteresis;
  const double p_trig = uses_rau_selection(sc.scheme)
                            ? trigger_prob_closed_form(serving.components[0],
                                                       target.components[0], h)
                            : trigger_prob_integral(serving, target, h);
  if (!(p_trig >= kMinConditioningProbability)) return {};

  const Support t = support(target);
  const Support s = support(serving);
  const double lower = std::min(t.lower, s.lower + h);
  const double upper = std::min(sc.threshold, std::max(t.upper, s.upper + h));
  if (!(upper > lower)) return {0.0, true};

  auto integrand = [&](double r) {
    const double below = mode == MetricMode::Rederived ? cdf(serving, r - h) : ccdf(serving, r - h);
    return below * pdf(target, r);
  };
  statfun::Quadrature q = detail::relative_quadrature();
  // Resolve the numerator well below the size of the conditioning event.
  q.absolute_tolerance = 1e-10 * p_trig;
  const double joint =
      detail::checked_integral(statfun::integrate(integrand, lower, upper, q, 32), "failure_prob");
  return {detail::clamp01(joint / p_trig), true};
}

/// Per-antenna interruption: every cell's RSS below T. Rederived multiplies
/// the independent cells; PaperLiteral takes the minimum as printed.
inline double interruption_prob_antenna(const Scenario& sc, double front_x, AntennaId i,
                                        MetricMode mode = MetricMode::Rederived) {
  const double serving = cdf(rss_distribution(sc, front_x, i, Cell::Serving), sc.threshold);
  const double target = cdf(rss_distribution(sc, front_x, i, Cell::Target), sc.threshold);
  return mode == MetricMode::Rederived ? serving * target : std::min(serving, target);
}

/// Interruption of the train: all of the scheme's antennas are interrupted.
inline double interruption_prob(const Scenario& sc, double front_x,
                                 MetricMode mode = MetricMode::Rederived) {
  double p = interruption_prob_antenna(sc, front_x, AntennaId::Front, mode);
  if (has_rear_antenna(sc.scheme)) p *= interruption_prob_antenna(sc, front_x, AntennaId::Rear, mode);
  return p;
}

/// E[max] of independent RSS laws (all components pooled), by quadrature of
/// r * pdf over the truncated support.
inline double mean_of_max(const std::vector<RssDistribution>& laws) {
  RssDistribution pooled;
  pooled.kind = RssDistribution::Kind::MaxOfGaussians;
  for (const auto& l : laws) {
    pooled.components.insert(pooled.components.end(), l.components.begin(), l.components.end());
  }
  if (pooled.components.empty()) throw DomainError("mean_of_max: no components");
  if (pooled.components.size() == 1) return pooled.components[0].mu;
  const Support s = support(pooled);
  statfun::Quadrature q;
  q.absolute_tolerance = 1e-9;
  const auto r = statfun::integrate([&](double v) { return v * pdf(pooled, v); }, s.lower, s.upper,
                                    q, 32);
  return detail::checked_integral(r, "mean_of_max");
}

/// Mean RSS of antenna i from its best cell.
inline double mean_best_cell_rss(const Scenario& sc, double front_x, AntennaId i) {
  return mean_of_max({rss_distribution(sc, front_x, i, Cell::Serving),
                      rss_distribution(sc, front_x, i, Cell::Target)});
}

/// Mean RSS of the best cell over all of the scheme's antennas.
inline double mean_best_rss(const Scenario& sc, double front_x) {
  std::vector<RssDistribution> laws;
  for (Cell c : kCells) laws.push_back(rss_distribution(sc, front_x, AntennaId::Front, c));
  if (has_rear_antenna(sc.scheme)) {
    for (Cell c : kCells) laws.push_back(rss_distribution(sc, front_x, AntennaId::Rear, c));
  }
  return mean_of_max(laws);
}

}  // namespace hsr
