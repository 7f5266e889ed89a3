#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "hsr/analytics.hpp"

using namespace hsr;

namespace {

double phi(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// Mean RSS of a selection-scheme link from the link budget, for oracles.
double mean_rss(double antenna_x, double rau_x) {
  return 86.0 - 31.5 - 35.0 * std::log10(std::hypot(antenna_x - rau_x, 60.0));
}

}  // namespace

TEST(TriggerProb, SymmetricPointMatchesPairedDrawOracle) {
  std::mt19937_64 gen(1);
  std::normal_distribution<double> z(0.0, 4.0);
  const double ms = mean_rss(1500, 1125);
  const double mt = mean_rss(1500, 1875);
  int hits = 0;
  const int n = 1000000;
  for (int k = 0; k < n; ++k) hits += (mt + z(gen)) - (ms + z(gen)) > 2.0;
  const double p = trigger_prob(Scenario{}, 1500.0, AntennaId::Front);
  EXPECT_NEAR(p, static_cast<double>(hits) / n, 0.001);
  EXPECT_NEAR(p, 1.0 - phi(2.0 / std::sqrt(32.0)), 1e-12);
  EXPECT_NEAR(p, 0.3618, 0.001);
}

TEST(TriggerProb, FarPointMatchesPairedDrawOracle) {
  std::mt19937_64 gen(2);
  std::normal_distribution<double> z(0.0, 4.0);
  const double ms = mean_rss(2250, 1125);
  const double mt = mean_rss(2250, 1875);
  int hits = 0;
  const int n = 1000000;
  for (int k = 0; k < n; ++k) hits += (mt + z(gen)) - (ms + z(gen)) > 2.0;
  const double p = trigger_prob(Scenario{}, 2250.0, AntennaId::Front);
  EXPECT_NEAR(p, static_cast<double>(hits) / n, 0.001);
  EXPECT_NEAR(p, 0.9949, 0.001);
}

TEST(TriggerProb, ZeroHysteresisAtSymmetryIsHalf) {
  Scenario sc;
  sc.hysteresis = 0.0;
  EXPECT_NEAR(trigger_prob(sc, 1500.0, AntennaId::Front), 0.5, 1e-9);
}

TEST(TriggerProb, GeneralIntegralAgreesWithClosedForm) {
  const Scenario sc;
  for (AntennaId a : {AntennaId::Front, AntennaId::Rear}) {
    for (double x = 0; x <= 3000; x += 50) {
      const auto s = handover_distribution(sc, x, a, Cell::Serving);
      const auto t = handover_distribution(sc, x, a, Cell::Target);
      EXPECT_NEAR(trigger_prob_integral(s, t, sc.hysteresis),
                  trigger_prob_closed_form(s.components[0], t.components[0], sc.hysteresis), 1e-4)
          << "x=" << x;
    }
  }
}

TEST(TriggerProb, TraditionalMatchesGaussianDifference) {
  // Two single Gaussians: the integral path must reduce to the closed form.
  const Scenario sc = Scenario{}.with_scheme(Scheme::Traditional);
  for (double x : {900.0, 1500.0, 1800.0}) {
    const auto s = bs_link_stat(sc, x, AntennaId::Front, Cell::Serving);
    const auto t = bs_link_stat(sc, x, AntennaId::Front, Cell::Target);
    const double expected = 1.0 - phi((2.0 - (t.mu - s.mu)) / std::sqrt(32.0));
    EXPECT_NEAR(trigger_prob(sc, x, AntennaId::Front), expected, 1e-6);
  }
}

TEST(TriggerProb, MonotoneBetweenBoundaryRaus) {
  const Scenario sc;
  double prev = 0.0;
  for (double x = 1125; x <= 1875; x += 10) {
    const double p = trigger_prob(sc, x, AntennaId::Front);
    EXPECT_GE(p, prev - 1e-15);
    prev = p;
  }
}

TEST(TriggerProb, DecreasesWithHysteresis) {
  for (Scheme s : kAllSchemes) {
    Scenario lo = Scenario{}.with_scheme(s);
    Scenario hi = lo;
    hi.hysteresis = 5.0;
    for (double x = 1000; x <= 2000; x += 100) {
      EXPECT_LE(trigger_prob(hi, x, AntennaId::Front), trigger_prob(lo, x, AntennaId::Front) + 1e-12);
    }
  }
}

TEST(OccurrenceProb, DegenerateTriggerProfiles) {
  const std::vector<double> first{1.0, 0.3, 0.7};
  auto r = occurrence_from_trigger(first, 10.0, MetricMode::Rederived);
  EXPECT_EQ(r, (std::vector<double>{1.0, 0.0, 0.0}));
  const std::vector<double> none(5, 0.0);
  for (MetricMode m : {MetricMode::Rederived, MetricMode::PaperLiteral}) {
    for (double v : occurrence_from_trigger(none, 10.0, m)) EXPECT_EQ(v, 0.0);
  }
}

TEST(OccurrenceProb, ModesFollowTheirDefinitions) {
  const std::vector<double> p{0.1, 0.2, 0.4, 0.5};
  const auto red = occurrence_from_trigger(p, 10.0, MetricMode::Rederived);
  const auto lit = occurrence_from_trigger(p, 10.0, MetricMode::PaperLiteral);
  EXPECT_NEAR(red[2], 0.4 * 0.9 * 0.8, 1e-15);
  EXPECT_NEAR(lit[2], 0.4 * 10.0 * (0.1 + 0.2), 1e-15);
  EXPECT_EQ(lit[0], 0.0);
}

TEST(OccurrenceProb, MassesNonNegativeAndSubNormalised) {
  for (Scheme s : kAllSchemes) {
    const Scenario sc = Scenario{}.with_scheme(s);
    const auto occ = occurrence_prob(sc, PositionGrid::for_scenario(sc), AntennaId::Front,
                                     MetricMode::Rederived);
    double total = 0.0;
    for (double v : occ) {
      EXPECT_GE(v, 0.0);
      total += v;
    }
    EXPECT_LE(total, 1.0 + 1e-12);
  }
}

TEST(FailureProb, ThresholdAtSupportEdges) {
  Scenario sc;
  const double x = 1600.0;
  const auto t = handover_distribution(sc, x, AntennaId::Front, Cell::Target).components[0];
  sc.threshold = t.mu - 20 * t.sigma;
  EXPECT_NEAR(failure_prob(sc, x, AntennaId::Front).value, 0.0, 1e-10);
  sc.threshold = t.mu + 20 * t.sigma;
  EXPECT_NEAR(failure_prob(sc, x, AntennaId::Front).value, 1.0, 1e-6);
}

TEST(FailureProb, MatchesConditionalMonteCarlo) {
  const double x = 1600.0;
  const double ms = mean_rss(x, 1125);
  const double mt = mean_rss(x, 1875);
  std::mt19937_64 gen(3);
  std::normal_distribution<double> z(0.0, 4.0);
  long trig = 0;
  long fail = 0;
  for (int k = 0; k < 1000000; ++k) {
    const double rs = ms + z(gen);
    const double rt = mt + z(gen);
    if (rt - rs > 2.0) {
      ++trig;
      fail += rt < -30.0;
    }
  }
  const auto f = failure_prob(Scenario{}, x, AntennaId::Front);
  ASSERT_TRUE(f.defined);
  EXPECT_NEAR(f.value, static_cast<double>(fail) / trig, 0.005);
}

TEST(FailureProb, UndefinedWhenTriggerImpossible) {
  const Scenario sc = Scenario{}.with_scheme(Scheme::Traditional);
  const auto f = failure_prob(sc, 0.0, AntennaId::Front);
  EXPECT_FALSE(f.defined);
  EXPECT_TRUE(std::isnan(f.value));
}

TEST(FailureProb, BothModesInUnitInterval) {
  for (Scheme s : kAllSchemes) {
    const Scenario sc = Scenario{}.with_scheme(s);
    for (double x = 0; x <= 3000; x += 100) {
      for (MetricMode m : {MetricMode::Rederived, MetricMode::PaperLiteral}) {
        const auto f = failure_prob(sc, x, AntennaId::Front, m);
        if (!f.defined) continue;
        EXPECT_GE(f.value, 0.0);
        EXPECT_LE(f.value, 1.0);
      }
    }
  }
}

TEST(InterruptionProb, AboveServingRauIsNegligible) {
  const Scenario sc;
  const auto best = rss_distribution(sc, 375.0, AntennaId::Front, Cell::Serving).max_mu();
  EXPECT_NEAR(best, -7.74, 0.01);
  EXPECT_LT(interruption_prob_antenna(sc, 375.0, AntennaId::Front, MetricMode::Rederived), 1e-7);
  EXPECT_LT(interruption_prob_antenna(sc, 375.0, AntennaId::Front, MetricMode::PaperLiteral), 1e-7);
}

TEST(InterruptionProb, ProductAnnihilation) {
  Scenario sc;
  sc.threshold = -1e6;
  EXPECT_EQ(interruption_prob(sc, 1500.0), 0.0);
}

TEST(InterruptionProb, RederivedNeverExceedsPaperLiteral) {
  for (Scheme s : kAllSchemes) {
    const Scenario sc = Scenario{}.with_scheme(s);
    for (double x = 0; x <= 3000; x += 10) {
      for (AntennaId a : {AntennaId::Front, AntennaId::Rear}) {
        EXPECT_LE(interruption_prob_antenna(sc, x, a, MetricMode::Rederived),
                  interruption_prob_antenna(sc, x, a, MetricMode::PaperLiteral));
      }
    }
  }
}

TEST(InterruptionProb, SingleAntennaSchemeUsesFrontOnly) {
  const Scenario sc = Scenario{}.with_scheme(Scheme::DasSingle);
  for (double x : {0.0, 1500.0, 2900.0}) {
    EXPECT_EQ(interruption_prob(sc, x), interruption_prob_antenna(sc, x, AntennaId::Front));
  }
}

TEST(InterruptionProb, MatchesMonteCarloAtMidpoint) {
  // Both antennas, both cells, four RAUs each; interruption when every
  // per-antenna best-cell RSS is below T.
  std::mt19937_64 gen(4);
  std::normal_distribution<double> z(0.0, 4.0);
  const double raus[] = {-1125, -375, 375, 1125, 1875, 2625, 3375, 4125};
  long down = 0;
  const int n = 100000;
  for (int k = 0; k < n; ++k) {
    bool all_down = true;
    for (double ax : {1500.0, 1300.0}) {
      double best = -HUGE_VAL;
      for (double r : raus) best = std::max(best, mean_rss(ax, r) + z(gen));
      all_down &= best < -30.0;
    }
    down += all_down;
  }
  EXPECT_NEAR(interruption_prob(Scenario{}, 1500.0), static_cast<double>(down) / n, 0.01);
}

TEST(Analytics, NonConvergenceIsRaised) {
  statfun::IntegrationResult r{0.5, 1.0, 100, false};
  EXPECT_THROW(detail::checked_integral(r, "test"), NonConvergenceError);
}

TEST(MeanRss, TraditionalAbeamOfBs) {
  const Scenario sc = Scenario{}.with_scheme(Scheme::Traditional);
  // Serving BS abeam at 100 m: the target cell adds almost nothing at x = 0.
  EXPECT_NEAR(mean_best_cell_rss(sc, 0.0, AntennaId::Front), -15.5, 0.1);
}

TEST(MeanRss, TwoAntennasDominateOne) {
  const Scenario p;
  const Scenario d = p.with_scheme(Scheme::DasSingle);
  for (double x = 0; x <= 3000; x += 50) EXPECT_GE(mean_best_rss(p, x), mean_best_rss(d, x) - 1e-9);
}
