#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hsr/analytics.hpp"
#include "hsr/config.hpp"
#include "hsr/montecarlo.hpp"
#include "hsr/parallel.hpp"
#include "hsr/result_table.hpp"

namespace hsr {

enum class Figure { Rss, Trigger, Occurrence, Failure, Interruption };

inline constexpr std::array<Figure, 5> kAllFigures = {Figure::Rss, Figure::Trigger,
                                                      Figure::Occurrence, Figure::Failure,
                                                      Figure::Interruption};

inline std::string_view to_string(Figure f) {
  switch (f) {
    case Figure::Rss: return "rss";
    case Figure::Trigger: return "trigger";
    case Figure::Occurrence: return "occurrence";
    case Figure::Failure: return "failure";
    case Figure::Interruption: return "interruption";
  }
  return "?";
}

inline std::string figure_file_name(Figure f) {
  const int number = 3 + static_cast<int>(f);
  return "fig" + std::to_string(number) + "_" + std::string(to_string(f)) + ".csv";
}

inline std::optional<Figure> parse_figure(std::string_view name) {
  for (Figure f : kAllFigures) {
    const std::string number = "fig" + std::to_string(3 + static_cast<int>(f));
    if (name == to_string(f) || name == number) return f;
  }
  return std::nullopt;
}

/// Monte Carlo results of one scheme, shared by all figure tables.
struct SchemeSimulation {
  Scheme scheme = Scheme::Proposed;
  std::vector<SweepEstimate> pointwise;
  std::optional<FirstCrossingEstimate> first_crossing;
};

inline SchemeSimulation simulate_scheme(const RunConfig& cfg, Scheme scheme, bool pointwise,
                                        bool first_crossing, Parallelism par) {
  const Scenario sc = cfg.scenario.with_scheme(scheme);
  const PositionGrid grid = PositionGrid::for_scenario(sc);
  const SeedPolicy seed{cfg.master_seed};
  SchemeSimulation sim;
  sim.scheme = scheme;
  if (pointwise) sim.pointwise = estimate_pointwise(sc, grid, cfg.trials, seed, par);
  if (first_crossing) {
    sim.first_crossing = estimate_first_crossing(sc, grid, cfg.trials, seed, AntennaId::Front, par);
  }
  return sim;
}

inline std::vector<std::pair<std::string, std::string>> provenance(const RunConfig& cfg,
                                                                   std::string_view what) {
  return {{"figure", std::string(what)},
          {"seed", std::to_string(cfg.master_seed)},
          {"trials", std::to_string(cfg.trials)},
          {"mode", std::string(to_string(cfg.mode))},
          {"config_hash", config_hash(cfg)},
          {"version", std::string(kToolVersion)}};
}

/// Builds one figure table from precomputed simulations. Analytic columns are
/// tagged with the metric mode; `_mc_hw` columns are 95% half-widths.
inline ResultTable build_figure(const RunConfig& cfg, Figure fig,
                                const std::vector<SchemeSimulation>& sims) {
  const PositionGrid grid = PositionGrid::for_scenario(cfg.scenario);
  const std::string mode_tag = "_analytic_" + std::string(to_string(cfg.mode));
  ResultTable t;
  t.provenance = provenance(cfg, figure_file_name(fig));
  t.header.push_back("x_m");

  // Column blocks: values[k] holds the column for grid position k.
  std::vector<std::vector<double>> columns;
  auto add = [&](std::string name, std::vector<double> values) {
    t.header.push_back(std::move(name));
    columns.push_back(std::move(values));
  };
  auto mc_columns = [&](const std::string& prefix, const std::vector<SweepEstimate>& est) {
    std::vector<double> v;
    std::vector<double> hw;
    for (const auto& e : est) {
      v.push_back(e.defined ? e.value : std::nan(""));
      hw.push_back(e.defined ? e.half_width_95 : std::nan(""));
    }
    add(prefix + "_mc", std::move(v));
    add(prefix + "_mc_hw", std::move(hw));
  };

  for (const auto& sim : sims) {
    const Scenario sc = cfg.scenario.with_scheme(sim.scheme);
    const std::string name(to_string(sim.scheme));
    const bool two = has_rear_antenna(sim.scheme);
    auto analytic = [&](auto&& fn) {
      std::vector<double> v;
      for (double x : grid.positions) v.push_back(fn(x));
      return v;
    };
    switch (fig) {
      case Figure::Rss: {
        add(name + mode_tag, analytic([&](double x) { return mean_best_rss(sc, x); }));
        mc_columns(name, select(sim.pointwise, Metric::MeanRss, std::nullopt));
        add(name + "_front_analytic",
            analytic([&](double x) { return mean_best_cell_rss(sc, x, AntennaId::Front); }));
        std::vector<double> front_mc;
        for (const auto& e : select(sim.pointwise, Metric::MeanRss, AntennaId::Front)) {
          front_mc.push_back(e.value);
        }
        add(name + "_front_mc", std::move(front_mc));
        if (two) {
          add(name + "_rear_analytic",
              analytic([&](double x) { return mean_best_cell_rss(sc, x, AntennaId::Rear); }));
          std::vector<double> rear_mc;
          std::vector<double> combined_mc;
          for (const auto& e : select(sim.pointwise, Metric::MeanRss, AntennaId::Rear)) {
            rear_mc.push_back(e.value);
          }
          for (const auto& e : select(sim.pointwise, Metric::CombinedRss, std::nullopt)) {
            combined_mc.push_back(e.value);
          }
          add(name + "_rear_mc", std::move(rear_mc));
          add(name + "_combined_mc", std::move(combined_mc));
        }
        break;
      }
      case Figure::Trigger:
        add(name + mode_tag,
            analytic([&](double x) { return trigger_prob(sc, x, AntennaId::Front); }));
        mc_columns(name, select(sim.pointwise, Metric::Trigger, AntennaId::Front));
        break;
      case Figure::Occurrence:
        add(name + mode_tag, occurrence_prob(sc, grid, AntennaId::Front, cfg.mode));
        mc_columns(name, sim.first_crossing->to_estimates(AntennaId::Front));
        break;
      case Figure::Failure: {
        add(name + mode_tag, analytic([&](double x) {
              return failure_prob(sc, x, AntennaId::Front, cfg.mode).value;
            }));
        const auto est = select(sim.pointwise, Metric::Failure, AntennaId::Front);
        mc_columns(name, est);
        std::vector<double> n;
        for (const auto& e : est) n.push_back(static_cast<double>(e.trials));
        add(name + "_mc_n", std::move(n));
        break;
      }
      case Figure::Interruption:
        add(name + mode_tag, analytic([&](double x) { return interruption_prob(sc, x, cfg.mode); }));
        mc_columns(name, select(sim.pointwise, Metric::Interruption, std::nullopt));
        break;
    }
  }

  for (std::size_t k = 0; k < grid.size(); ++k) {
    std::vector<double> row{grid[k]};
    for (const auto& c : columns) row.push_back(c[k]);
    t.add_row(std::move(row));
  }
  return t;
}

inline ResultTable run_figure(const RunConfig& cfg, Figure fig, Parallelism par = {}) {
  cfg.validate();
  cfg.scenario.validate();
  std::vector<SchemeSimulation> sims;
  for (Scheme s : cfg.schemes) {
    sims.push_back(simulate_scheme(cfg, s, fig != Figure::Occurrence, fig == Figure::Occurrence, par));
  }
  return build_figure(cfg, fig, sims);
}

// ---------------------------------------------------------------------------
// Scheme comparison

struct CheckResult {
  enum class Status { Pass, Fail, Inconclusive };

  std::string name;
  Status status = Status::Pass;
  std::size_t checked = 0;
  std::size_t violations = 0;
  std::size_t inconclusive = 0;
  std::string detail;
};

inline std::string_view to_string(CheckResult::Status s) {
  switch (s) {
    case CheckResult::Status::Pass: return "pass";
    case CheckResult::Status::Fail: return "fail";
    case CheckResult::Status::Inconclusive: return "inconclusive";
  }
  return "?";
}

namespace detail {

class CheckBuilder {
 public:
  explicit CheckBuilder(std::string name) { result_.name = std::move(name); }

  void check(bool ok, const std::string& where) {
    ++result_.checked;
    if (!ok) violate(where);
  }
  void violate(const std::string& where) {
    ++result_.violations;
    if (first_.empty()) first_ = where;
  }
  // MC ordering a <= b: a violation whose 95% intervals overlap is
  // inconclusive rather than a failure.
  void check_mc_le(const SweepEstimate& a, const SweepEstimate& b, double slack,
                   const std::string& where) {
    ++result_.checked;
    if (!a.defined || !b.defined || a.value <= b.value + slack) return;
    if (a.value - a.half_width_95 <= b.value + b.half_width_95 + slack) {
      ++result_.inconclusive;
    } else {
      violate(where);
    }
  }
  void note(std::string text) { notes_ += (notes_.empty() ? "" : "; ") + std::move(text); }

  CheckResult finish() {
    if (result_.violations > 0) {
      result_.status = CheckResult::Status::Fail;
    } else if (result_.inconclusive > 0) {
      result_.status = CheckResult::Status::Inconclusive;
    }
    result_.detail = notes_;
    if (!first_.empty()) {
      result_.detail += (result_.detail.empty() ? "" : "; ") + std::string("first violation: ") + first_;
    }
    return result_;
  }

 private:
  CheckResult result_;
  std::string first_;
  std::string notes_;
};

inline std::string at(double x) {
  return "x=" + format_number(x);
}

inline const SchemeSimulation* find_sim(const std::vector<SchemeSimulation>& sims, Scheme s) {
  for (const auto& sim : sims) {
    if (sim.scheme == s) return &sim;
  }
  return nullptr;
}

/// First grid position where the curve reaches 0.5, by linear interpolation.
inline std::optional<double> half_crossing(const PositionGrid& grid, const std::vector<double>& p) {
  for (std::size_t k = 1; k < p.size(); ++k) {
    if (p[k - 1] < 0.5 && p[k] >= 0.5) {
      return grid[k - 1] + (0.5 - p[k - 1]) / (p[k] - p[k - 1]) * (grid[k] - grid[k - 1]);
    }
  }
  return std::nullopt;
}

}  // namespace detail

struct ComparisonReport {
  std::vector<std::pair<Figure, ResultTable>> tables;
  std::vector<CheckResult> checks;

  [[nodiscard]] int exit_status() const {
    for (const auto& c : checks) {
      if (c.status == CheckResult::Status::Fail) return 1;
    }
    return 0;
  }
};

/// Ordering assertions between schemes on analytic (mode of the config) and
/// Monte Carlo values. Checks needing a scheme that was not run are omitted.
inline std::vector<CheckResult> scheme_checks(const RunConfig& cfg,
                                              const std::vector<SchemeSimulation>& sims) {
  using detail::at;
  const Scenario& base = cfg.scenario;
  const PositionGrid grid = PositionGrid::for_scenario(base);
  const double mid = base.ds / 2.0;
  const Scheme P = Scheme::Proposed;
  std::vector<CheckResult> out;
  const auto* prop = detail::find_sim(sims, P);

  {
    // Trigger curves reach 0.5 just past the midpoint (shifted by H).
    detail::CheckBuilder b("trigger_crossing");
    std::optional<double> cross_p;
    std::optional<double> cross_b;
    for (const auto& sim : sims) {
      const Scenario sc = base.with_scheme(sim.scheme);
      std::vector<double> p;
      for (double x : grid.positions) p.push_back(trigger_prob(sc, x, AntennaId::Front));
      const auto c = detail::half_crossing(grid, p);
      b.check(c && *c >= mid && *c <= mid + 200.0,
              std::string(to_string(sim.scheme)) + " crossing " + (c ? at(*c) : "none"));
      if (c) b.note(std::string(to_string(sim.scheme)) + "@" + format_number(*c));
      if (sim.scheme == P) cross_p = c;
      if (sim.scheme == Scheme::DasBlanket) cross_b = c;
    }
    if (cross_p && cross_b) {
      b.check(std::abs(*cross_p - *cross_b) <= 100.0, "proposed vs das_b crossings");
    }
    out.push_back(b.finish());
  }

  if (prop) {
    const Scenario sp = base.with_scheme(P);
    const auto* trad = detail::find_sim(sims, Scheme::Traditional);
    const auto* single = detail::find_sim(sims, Scheme::DasSingle);

    if (trad || single) {
      detail::CheckBuilder b("failure_ordering");
      const auto p_mc = select(prop->pointwise, Metric::Failure, AntennaId::Front);
      for (std::size_t k = 0; k < grid.size(); ++k) {
        const double x = grid[k];
        if (x < mid - 300.0 || x > mid + 300.0) continue;
        const auto fp = failure_prob(sp, x, AntennaId::Front, cfg.mode);
        if (trad) {
          const auto ft = failure_prob(base.with_scheme(Scheme::Traditional), x, AntennaId::Front,
                                       cfg.mode);
          if (fp.defined && ft.defined) b.check(fp.value <= ft.value + 1e-12, "vs traditional " + at(x));
          b.check_mc_le(p_mc[k], select(trad->pointwise, Metric::Failure, AntennaId::Front)[k], 0.0,
                        "mc vs traditional " + at(x));
        }
        if (single) {
          const auto fs =
              failure_prob(base.with_scheme(Scheme::DasSingle), x, AntennaId::Front, cfg.mode);
          if (fp.defined && fs.defined) {
            b.check(std::abs(fp.value - fs.value) <= 0.02, "vs das_s " + at(x));
          }
          const auto s_mc = select(single->pointwise, Metric::Failure, AntennaId::Front)[k];
          b.check_mc_le(p_mc[k], s_mc, 0.02, "mc vs das_s " + at(x));
          b.check_mc_le(s_mc, p_mc[k], 0.02, "mc das_s vs proposed " + at(x));
        }
      }
      out.push_back(b.finish());
    }

    std::vector<const SchemeSimulation*> others;
    for (const auto& sim : sims) {
      if (sim.scheme != P) others.push_back(&sim);
    }
    if (!others.empty()) {
      detail::CheckBuilder b("interruption_ordering");
      const auto p_mc = select(prop->pointwise, Metric::Interruption, std::nullopt);
      std::size_t skipped = 0;
      for (std::size_t k = 0; k < grid.size(); ++k) {
        const double x = grid[k];
        const double ip = interruption_prob(sp, x, cfg.mode);
        std::vector<double> io;
        for (const auto* o : others) io.push_back(interruption_prob(base.with_scheme(o->scheme), x, cfg.mode));
        const bool negligible =
            ip < 1e-6 && std::all_of(io.begin(), io.end(), [](double v) { return v < 1e-6; });
        if (negligible) {
          ++skipped;
          continue;
        }
        for (std::size_t j = 0; j < others.size(); ++j) {
          const std::string who(to_string(others[j]->scheme));
          b.check(ip <= io[j] + 1e-12, "vs " + who + " " + at(x));
          b.check_mc_le(p_mc[k], select(others[j]->pointwise, Metric::Interruption, std::nullopt)[k],
                        0.0, "mc vs " + who + " " + at(x));
        }
      }
      b.note("skipped " + std::to_string(skipped) + " negligible positions");
      out.push_back(b.finish());
    }

    if (single || trad) {
      detail::CheckBuilder b("rss_ordering");
      const auto p_mc = select(prop->pointwise, Metric::MeanRss, std::nullopt);
      std::size_t trad_wins = 0;
      for (std::size_t k = 0; k < grid.size(); ++k) {
        const double x = grid[k];
        const double rp = mean_best_rss(sp, x);
        if (single) {
          const double rs = mean_best_rss(base.with_scheme(Scheme::DasSingle), x);
          b.check(rp >= rs - 1e-9, "vs das_s " + at(x));
          const auto s_mc = select(single->pointwise, Metric::MeanRss, std::nullopt)[k];
          b.check_mc_le(s_mc, p_mc[k], 0.0, "mc vs das_s " + at(x));
        }
        if (trad) {
          const double rt = mean_best_rss(base.with_scheme(Scheme::Traditional), x);
          if (rt > rp) {
            ++trad_wins;
            const bool near_end = x <= 0.1 * base.ds || x >= 0.9 * base.ds;
            b.check(near_end, "traditional above proposed away from the cell ends " + at(x));
          }
        }
      }
      if (trad) {
        const double share = 1.0 - static_cast<double>(trad_wins) / static_cast<double>(grid.size());
        b.check(share >= 0.9, "proposed >= traditional at " + format_number(100.0 * share) +
                                  "% of positions (need 90%)");
        b.note("proposed >= traditional at " + format_number(100.0 * share) + "% of positions");
      }
      out.push_back(b.finish());
    }
  }

  {
    detail::CheckBuilder b("interruption_mode_inequality");
    for (const auto& sim : sims) {
      const Scenario sc = base.with_scheme(sim.scheme);
      for (double x : grid.positions) {
        for (AntennaId a : {AntennaId::Front, AntennaId::Rear}) {
          if (a == AntennaId::Rear && !has_rear_antenna(sim.scheme)) continue;
          b.check(interruption_prob_antenna(sc, x, a, MetricMode::Rederived) <=
                      interruption_prob_antenna(sc, x, a, MetricMode::PaperLiteral),
                  std::string(to_string(sim.scheme)) + " " + at(x));
        }
      }
    }
    out.push_back(b.finish());
  }
  return out;
}

/// Runs all five figures for the configured schemes and evaluates the
/// ordering assertions.
inline ComparisonReport compare_schemes(const RunConfig& cfg, Parallelism par = {}) {
  cfg.validate();
  cfg.scenario.validate();
  std::vector<SchemeSimulation> sims;
  for (Scheme s : cfg.schemes) sims.push_back(simulate_scheme(cfg, s, true, true, par));
  ComparisonReport report;
  for (Figure f : kAllFigures) report.tables.emplace_back(f, build_figure(cfg, f, sims));
  report.checks = scheme_checks(cfg, sims);
  return report;
}

inline std::string summary_csv(const RunConfig& cfg, const std::vector<CheckResult>& checks) {
  std::string out = "# provenance:";
  for (const auto& [k, v] : provenance(cfg, "summary.csv")) out += " " + k + "=" + v;
  out += "\ncheck,status,checked,violations,inconclusive,detail\n";
  for (const auto& c : checks) {
    std::string detail = c.detail;
    std::replace(detail.begin(), detail.end(), ',', ' ');
    out += c.name + "," + std::string(to_string(c.status)) + "," + std::to_string(c.checked) + "," +
           std::to_string(c.violations) + "," + std::to_string(c.inconclusive) + "," + detail + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Analytic-vs-Monte-Carlo oracle suite

/// Compares every analytic metric (Rederived) against its Monte Carlo
/// estimate. Probabilities must agree within z binomial standard errors
/// (computed from the analytic value) plus one count, where z is the
/// Bonferroni bound for a 1% family-wise false-alarm rate over the grid;
/// occurrence masses within 0.01 per bin. Blanket transmission uses an
/// approximate RSS law, so its tolerance adds the 0.03 CDF accuracy of that
/// approximation.
inline std::vector<CheckResult> validate_oracles(const RunConfig& cfg, Parallelism par = {}) {
  cfg.validate();
  cfg.scenario.validate();
  std::vector<CheckResult> out;
  const PositionGrid grid = PositionGrid::for_scenario(cfg.scenario);
  const double z =
      statfun::std_normal_quantile(1.0 - 0.01 / (2.0 * static_cast<double>(grid.size())));
  for (Scheme s : cfg.schemes) {
    const Scenario sc = cfg.scenario.with_scheme(s);
    const auto sim = simulate_scheme(cfg, s, true, true, par);
    const std::string name(to_string(s));
    const double extra = s == Scheme::DasBlanket ? 0.03 : 0.0;
    auto within = [&](double analytic, const SweepEstimate& e) {
      const double n = static_cast<double>(e.trials);
      const double se = std::sqrt(std::max(analytic * (1.0 - analytic), 0.0) / n);
      return std::abs(e.value - analytic) <= z * se + 1.0 / n + extra;
    };
    auto max_dev = [](double cur, double a, double b) { return std::max(cur, std::abs(a - b)); };

    {
      detail::CheckBuilder b(name + ".trigger");
      double dev = 0.0;
      const auto mc = select(sim.pointwise, Metric::Trigger, AntennaId::Front);
      for (std::size_t k = 0; k < grid.size(); ++k) {
        const double p = trigger_prob(sc, grid[k], AntennaId::Front);
        dev = max_dev(dev, p, mc[k].value);
        b.check(within(p, mc[k]), detail::at(grid[k]));
      }
      b.note("max |mc - analytic| " + format_number(dev));
      out.push_back(b.finish());
    }
    {
      detail::CheckBuilder b(name + ".failure");
      double dev = 0.0;
      const auto mc = select(sim.pointwise, Metric::Failure, AntennaId::Front);
      for (std::size_t k = 0; k < grid.size(); ++k) {
        const auto f = failure_prob(sc, grid[k], AntennaId::Front);
        if (!f.defined || !mc[k].defined) continue;
        dev = max_dev(dev, f.value, mc[k].value);
        b.check(within(f.value, mc[k]), detail::at(grid[k]));
      }
      b.note("max |mc - analytic| " + format_number(dev));
      out.push_back(b.finish());
    }
    {
      detail::CheckBuilder b(name + ".interruption");
      double dev = 0.0;
      const auto mc = select(sim.pointwise, Metric::Interruption, std::nullopt);
      for (std::size_t k = 0; k < grid.size(); ++k) {
        const double p = interruption_prob(sc, grid[k]);
        dev = max_dev(dev, p, mc[k].value);
        b.check(within(p, mc[k]), detail::at(grid[k]));
      }
      b.note("max |mc - analytic| " + format_number(dev));
      out.push_back(b.finish());
    }
    {
      detail::CheckBuilder b(name + ".occurrence");
      double dev = 0.0;
      const auto occ = occurrence_prob(sc, grid, AntennaId::Front, MetricMode::Rederived);
      for (std::size_t k = 0; k < grid.size(); ++k) {
        const double m = sim.first_crossing->mass(k);
        dev = max_dev(dev, occ[k], m);
        b.check(std::abs(occ[k] - m) <= 0.01 + extra, detail::at(grid[k]));
      }
      b.note("max |mc - analytic| " + format_number(dev));
      out.push_back(b.finish());
    }
  }
  return out;
}

}  // namespace hsr
