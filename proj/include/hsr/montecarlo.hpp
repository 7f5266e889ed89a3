#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "hsr/channel.hpp"
#include "hsr/parallel.hpp"
#include "hsr/protocol.hpp"
#include "hsr/random.hpp"
#include "hsr/scenario.hpp"

namespace hsr {

enum class Metric { Trigger, Occurrence, Failure, Interruption, MeanRss, CombinedRss };

inline std::string_view to_string(Metric m) {
  switch (m) {
    case Metric::Trigger: return "trigger";
    case Metric::Occurrence: return "occurrence";
    case Metric::Failure: return "failure";
    case Metric::Interruption: return "interruption";
    case Metric::MeanRss: return "mean_rss";
    case Metric::CombinedRss: return "combined_rss";
  }
  return "?";
}

inline constexpr double kZ95 = 1.959963984540054;

/// Monte Carlo estimate of one metric at one position. `antenna` is empty for
/// train-level metrics. For Failure, `trials` counts the triggering draws the
/// conditional estimate is based on; with none, `defined` is false.
struct SweepEstimate {
  double position = 0.0;
  Metric metric = Metric::Trigger;
  std::optional<AntennaId> antenna;
  double value = 0.0;
  std::uint64_t trials = 0;
  double half_width_95 = 0.0;
  bool defined = true;

  [[nodiscard]] double standard_error() const { return half_width_95 / kZ95; }
};

inline double binomial_half_width(double p, std::uint64_t n) {
  if (n == 0) return 0.0;
  return kZ95 * std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

inline SweepEstimate proportion(double x, Metric m, std::optional<AntennaId> a,
                                std::uint64_t hits, std::uint64_t n) {
  if (n == 0) return {x, m, a, std::nan(""), 0, 0.0, false};
  const double p = static_cast<double>(hits) / static_cast<double>(n);
  return {x, m, a, p, n, binomial_half_width(p, n), true};
}

namespace detail {

// Running mean and variance in trial order (Welford).
struct Moments {
  std::uint64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double v) {
    ++n;
    const double d = v - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (v - mean);
  }
  [[nodiscard]] SweepEstimate estimate(double x, Metric m, std::optional<AntennaId> a) const {
    const double var = n > 1 ? m2 / static_cast<double>(n - 1) : 0.0;
    return {x, m, a, mean, n, kZ95 * std::sqrt(var / static_cast<double>(n)), true};
  }
};

inline double power_sum_db(double a_db, double b_db) {
  const double hi = std::max(a_db, b_db);
  return hi + 10.0 * std::log10(1.0 + std::pow(10.0, 0.1 * (std::min(a_db, b_db) - hi)));
}

}  // namespace detail

/// Relative-frequency estimates at every grid position with fresh shadowing
/// per (trial, position). Rows for one position are contiguous and in the
/// order: trigger, failure, interruption per antenna (front, rear), train
/// interruption, mean best-cell RSS per antenna, train best RSS, and for two
/// antennas the combined (linear power sum) RSS. Deterministic in the seed and
/// independent of the parallelism.
inline std::vector<SweepEstimate> estimate_pointwise(const Scenario& sc, const PositionGrid& grid,
                                                     std::uint64_t trials, const SeedPolicy& seed,
                                                     Parallelism par = {}) {
  sc.validate();
  if (trials < 1) throw DomainError("estimate_pointwise: trials must be >= 1");
  const bool two = has_rear_antenna(sc.scheme);
  std::vector<std::vector<SweepEstimate>> per_position(grid.size());

  parallel_for(grid.size(), par, [&](std::size_t k) {
    const double x = grid[k];
    const PositionLinks links = position_links(sc, x);
    std::uint64_t trig[2] = {0, 0};
    std::uint64_t fail[2] = {0, 0};
    std::uint64_t down[2] = {0, 0};
    std::uint64_t down_train = 0;
    detail::Moments rss[2];
    detail::Moments rss_train;
    detail::Moments rss_combined;

    for (std::uint64_t t = 0; t < trials; ++t) {
      RandomStream rng = seed.stream(t, k);
      const PositionSample s = draw_position(sc, links, rng);
      bool all_down = true;
      double best_train = -std::numeric_limits<double>::infinity();
      double best_antenna[2] = {0.0, 0.0};
      for (int a = 0; a < (two ? 2 : 1); ++a) {
        const CellSample* cells = a == 0 ? s.front : s.rear;
        if (cells[1].handover - cells[0].handover > sc.hysteresis) {
          ++trig[a];
          if (cells[1].handover < sc.threshold) ++fail[a];
        }
        const double best = std::max(cells[0].rss, cells[1].rss);
        best_antenna[a] = best;
        if (best < sc.threshold) {
          ++down[a];
        } else {
          all_down = false;
        }
        rss[a].add(best);
        best_train = std::max(best_train, best);
      }
      if (all_down) ++down_train;
      rss_train.add(best_train);
      if (two) rss_combined.add(detail::power_sum_db(best_antenna[0], best_antenna[1]));
    }

    auto& out = per_position[k];
    for (int a = 0; a < (two ? 2 : 1); ++a) {
      const AntennaId id = a == 0 ? AntennaId::Front : AntennaId::Rear;
      out.push_back(proportion(x, Metric::Trigger, id, trig[a], trials));
      out.push_back(proportion(x, Metric::Failure, id, fail[a], trig[a]));
      out.push_back(proportion(x, Metric::Interruption, id, down[a], trials));
    }
    out.push_back(proportion(x, Metric::Interruption, std::nullopt, down_train, trials));
    out.push_back(rss[0].estimate(x, Metric::MeanRss, AntennaId::Front));
    if (two) out.push_back(rss[1].estimate(x, Metric::MeanRss, AntennaId::Rear));
    out.push_back(rss_train.estimate(x, Metric::MeanRss, std::nullopt));
    if (two) out.push_back(rss_combined.estimate(x, Metric::CombinedRss, std::nullopt));
  });

  std::vector<SweepEstimate> rows;
  for (auto& v : per_position) rows.insert(rows.end(), v.begin(), v.end());
  return rows;
}

/// The estimates of one metric (and antenna) in position order.
inline std::vector<SweepEstimate> select(const std::vector<SweepEstimate>& rows, Metric m,
                                         std::optional<AntennaId> a) {
  std::vector<SweepEstimate> out;
  for (const auto& r : rows) {
    if (r.metric == m && r.antenna == a) out.push_back(r);
  }
  return out;
}

struct FirstCrossingEstimate {
  std::vector<double> positions;
  std::vector<std::uint64_t> counts;
  std::uint64_t trials = 0;
  std::uint64_t no_trigger = 0;

  [[nodiscard]] double mass(std::size_t k) const {
    return static_cast<double>(counts[k]) / static_cast<double>(trials);
  }
  [[nodiscard]] double no_trigger_fraction() const {
    return static_cast<double>(no_trigger) / static_cast<double>(trials);
  }
  [[nodiscard]] std::vector<SweepEstimate> to_estimates(AntennaId a) const {
    std::vector<SweepEstimate> out;
    for (std::size_t k = 0; k < positions.size(); ++k) {
      out.push_back(proportion(positions[k], Metric::Occurrence, a, counts[k], trials));
    }
    return out;
  }
};

/// Per trial, walks the grid with independent shadowing at each position and
/// records where the handover condition first holds for antenna i.
inline FirstCrossingEstimate estimate_first_crossing(const Scenario& sc, const PositionGrid& grid,
                                                     std::uint64_t trials, const SeedPolicy& seed,
                                                     AntennaId i, Parallelism par = {}) {
  sc.validate();
  if (trials < 1) throw DomainError("estimate_first_crossing: trials must be >= 1");
  if (i == AntennaId::Rear && !has_rear_antenna(sc.scheme)) {
    throw DomainError("estimate_first_crossing: scheme has no rear antenna");
  }
  // Only the links entering the handover condition are drawn.
  std::vector<std::pair<CellLinks, CellLinks>> links;
  links.reserve(grid.size());
  for (double x : grid.positions) {
    auto serving = cell_links(sc, x, i, Cell::Serving);
    auto target = cell_links(sc, x, i, Cell::Target);
    if (uses_rau_selection(sc.scheme)) {
      serving = CellLinks{{serving.links[serving.handover_index]}, 0, 0};
      target = CellLinks{{target.links[target.handover_index]}, 0, 0};
    }
    links.emplace_back(std::move(serving), std::move(target));
  }

  const std::size_t chunks = std::min<std::uint64_t>(trials, 64);
  std::vector<std::vector<std::uint64_t>> chunk_counts(chunks,
                                                       std::vector<std::uint64_t>(grid.size(), 0));
  std::vector<std::uint64_t> chunk_misses(chunks, 0);
  parallel_for(chunks, par, [&](std::size_t c) {
    const std::uint64_t begin = trials * c / chunks;
    const std::uint64_t end = trials * (c + 1) / chunks;
    for (std::uint64_t t = begin; t < end; ++t) {
      bool hit = false;
      for (std::size_t k = 0; k < grid.size() && !hit; ++k) {
        RandomStream rng = seed.stream(t, k);
        const double srv = draw_cell(sc, links[k].first, rng).handover;
        const double tgt = draw_cell(sc, links[k].second, rng).handover;
        if (tgt - srv > sc.hysteresis) {
          ++chunk_counts[c][k];
          hit = true;
        }
      }
      if (!hit) ++chunk_misses[c];
    }
  });

  FirstCrossingEstimate est;
  est.positions = grid.positions;
  est.counts.assign(grid.size(), 0);
  est.trials = trials;
  for (std::size_t c = 0; c < chunks; ++c) {
    for (std::size_t k = 0; k < grid.size(); ++k) est.counts[k] += chunk_counts[c][k];
    est.no_trigger += chunk_misses[c];
  }
  return est;
}

struct AntennaProtocolStats {
  std::uint64_t attempts = 0;
  std::uint64_t failures = 0;
  std::vector<std::uint64_t> attempts_at;   // per grid position
  std::vector<std::uint64_t> failures_at;   // per grid position
  std::vector<std::uint64_t> handover_at;   // successful attachments per position
  std::uint64_t crossings_with_failure = 0;

  [[nodiscard]] double failure_rate() const {
    return attempts ? static_cast<double>(failures) / static_cast<double>(attempts) : std::nan("");
  }
  [[nodiscard]] std::size_t modal_attempt_bin() const {
    std::size_t best = 0;
    for (std::size_t k = 1; k < attempts_at.size(); ++k) {
      if (attempts_at[k] > attempts_at[best]) best = k;
    }
    return best;
  }
};

struct ProtocolStatistics {
  std::uint64_t trials = 0;
  std::uint64_t completed = 0;
  std::uint64_t violations = 0;
  AntennaProtocolStats front;
  AntennaProtocolStats rear;
  std::vector<double> interruption_length;  // per trial, trial order

  [[nodiscard]] double mean_interruption_length() const {
    double s = 0.0;
    for (double v : interruption_length) s += v;
    return interruption_length.empty() ? 0.0 : s / static_cast<double>(interruption_length.size());
  }
};

/// Runs `trials` seeded crossings and aggregates outcomes in trial order.
inline ProtocolStatistics estimate_protocol(const Scenario& sc, const PositionGrid& grid,
                                            std::uint64_t trials, const SeedPolicy& seed,
                                            Parallelism par = {}) {
  sc.validate();
  if (trials < 1) throw DomainError("estimate_protocol: trials must be >= 1");
  const auto links = grid_links(sc, grid);
  std::vector<std::optional<CrossingOutcome>> outcomes(trials);
  parallel_for(trials, par, [&](std::size_t t) {
    try {
      outcomes[t] = run_crossing(sc, grid, links, seed, t).outcome;
    } catch (const ProtocolViolation&) {
      outcomes[t].reset();
    }
  });

  ProtocolStatistics stats;
  stats.trials = trials;
  for (auto* a : {&stats.front, &stats.rear}) {
    a->attempts_at.assign(grid.size(), 0);
    a->failures_at.assign(grid.size(), 0);
    a->handover_at.assign(grid.size(), 0);
  }
  for (const auto& o : outcomes) {
    if (!o) {
      ++stats.violations;
      continue;
    }
    if (o->completed()) ++stats.completed;
    stats.interruption_length.push_back(o->interruption_length());
    auto tally = [&](AntennaProtocolStats& a, const std::vector<HandoverAttempt>& attempts,
                     bool failed) {
      for (const auto& at : attempts) {
        ++a.attempts;
        ++a.attempts_at[at.position_index];
        if (at.failed) {
          ++a.failures;
          ++a.failures_at[at.position_index];
        } else {
          ++a.handover_at[at.position_index];
        }
      }
      if (failed) ++a.crossings_with_failure;
    };
    tally(stats.front, o->front_attempts, o->front_failed);
    tally(stats.rear, o->rear_attempts, o->rear_failed);
  }
  return stats;
}

}  // namespace hsr
