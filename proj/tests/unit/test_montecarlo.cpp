#include <gtest/gtest.h>

#include <cmath>

#include "hsr/analytics.hpp"
#include "hsr/montecarlo.hpp"

using namespace hsr;

TEST(SeedPolicy, KeysAreStableAndDistinct) {
  const SeedPolicy s{20160101};
  EXPECT_EQ(s.key(0, 0), SeedPolicy{20160101}.key(0, 0));
  EXPECT_NE(s.key(0, 1), s.key(1, 0));
  EXPECT_NE(s.key(0, 0), SeedPolicy{20160102}.key(0, 0));
  RandomStream a = s.stream(3, 4);
  RandomStream b = s.stream(3, 4);
  for (int k = 0; k < 10; ++k) EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(RandomStream, NormalMoments) {
  RandomStream r(11);
  double sum = 0.0;
  double sq = 0.0;
  const int n = 400000;
  for (int k = 0; k < n; ++k) {
    const double z = r.normal();
    sum += z;
    sq += z * z;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.01);
  EXPECT_NEAR(sq / n, 1.0, 0.01);
}

TEST(EstimatePointwise, DegenerateShadowingGivesStepFunctions) {
  Scenario sc;
  sc.shadow_sigma = 1e-9;
  const PositionGrid grid = PositionGrid::for_scenario(sc);
  const auto rows = estimate_pointwise(sc, grid, 1, SeedPolicy{});
  const auto trig = select(rows, Metric::Trigger, AntennaId::Front);
  const auto down = select(rows, Metric::Interruption, std::nullopt);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    EXPECT_EQ(trig[k].value, std::round(trigger_prob(sc, grid[k], AntennaId::Front)));
    EXPECT_EQ(down[k].value, std::round(interruption_prob(sc, grid[k])));
  }
}

TEST(EstimatePointwise, TriggerAtMidpointMatchesClosedForm) {
  const Scenario sc;
  const PositionGrid grid(std::vector<double>{1500.0});
  const auto e = select(estimate_pointwise(sc, grid, 1000000, SeedPolicy{}), Metric::Trigger,
                        AntennaId::Front)[0];
  EXPECT_NEAR(e.value, 0.3618, 0.0015);
  EXPECT_NEAR(e.half_width_95, kZ95 * std::sqrt(e.value * (1 - e.value) / 1e6), 1e-12);
}

TEST(EstimatePointwise, HalfWidthScalesAsInverseRoot) {
  const Scenario sc;
  const PositionGrid grid(std::vector<double>{1500.0});
  const auto a = select(estimate_pointwise(sc, grid, 20000, SeedPolicy{}), Metric::Trigger,
                        AntennaId::Front)[0];
  const auto b = select(estimate_pointwise(sc, grid, 80000, SeedPolicy{}), Metric::Trigger,
                        AntennaId::Front)[0];
  EXPECT_NEAR(a.half_width_95 / b.half_width_95, 2.0, 0.4);
}

TEST(EstimatePointwise, FailureUndefinedWithoutTriggers) {
  const Scenario sc = Scenario{}.with_scheme(Scheme::Traditional);
  const PositionGrid grid(std::vector<double>{0.0});
  const auto f = select(estimate_pointwise(sc, grid, 1000, SeedPolicy{}), Metric::Failure,
                        AntennaId::Front)[0];
  EXPECT_FALSE(f.defined);
  EXPECT_EQ(f.trials, 0u);
}

TEST(EstimatePointwise, AgreesWithAnalyticsWithinThreeStandardErrors) {
  const Scenario sc;
  const PositionGrid grid(std::vector<double>{600.0, 1450.0, 1550.0, 1650.0, 2400.0});
  const auto rows = estimate_pointwise(sc, grid, 100000, SeedPolicy{5});
  const auto trig = select(rows, Metric::Trigger, AntennaId::Front);
  const auto rear = select(rows, Metric::Trigger, AntennaId::Rear);
  const auto down = select(rows, Metric::Interruption, std::nullopt);
  auto se = [](double p, double n) { return std::sqrt(p * (1 - p) / n); };
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double p = trigger_prob(sc, grid[k], AntennaId::Front);
    EXPECT_LE(std::abs(trig[k].value - p), 3 * se(p, 1e5) + 1e-5) << grid[k];
    const double pr = trigger_prob(sc, grid[k], AntennaId::Rear);
    EXPECT_LE(std::abs(rear[k].value - pr), 3 * se(pr, 1e5) + 1e-5) << grid[k];
    const double pi = interruption_prob(sc, grid[k]);
    EXPECT_LE(std::abs(down[k].value - pi), 3 * se(pi, 1e5) + 1e-5) << grid[k];
  }
}

TEST(EstimatePointwise, IndependentOfParallelism) {
  const Scenario sc = Scenario{}.with_scheme(Scheme::DasBlanket);
  const PositionGrid grid(3000, 100);
  const auto a = estimate_pointwise(sc, grid, 500, SeedPolicy{3}, Parallelism{1});
  const auto b = estimate_pointwise(sc, grid, 500, SeedPolicy{3}, Parallelism{5});
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    const bool both_nan = std::isnan(a[k].value) && std::isnan(b[k].value);
    EXPECT_TRUE(both_nan || a[k].value == b[k].value) << k;
    EXPECT_EQ(a[k].half_width_95, b[k].half_width_95);
    EXPECT_EQ(a[k].trials, b[k].trials);
  }
}

TEST(EstimatePointwise, TwoAntennaRssDominatesSingleSampleWise) {
  // Shared seeds give both schemes the same front-antenna draws.
  const PositionGrid grid(3000, 100);
  const auto p = select(estimate_pointwise(Scenario{}, grid, 2000, SeedPolicy{}), Metric::MeanRss,
                        std::nullopt);
  const auto d = select(
      estimate_pointwise(Scenario{}.with_scheme(Scheme::DasSingle), grid, 2000, SeedPolicy{}),
      Metric::MeanRss, std::nullopt);
  for (std::size_t k = 0; k < grid.size(); ++k) EXPECT_GE(p[k].value, d[k].value - 1e-9);
}

TEST(EstimateFirstCrossing, DegenerateCases) {
  Scenario sc;
  sc.hysteresis = 1e6;
  const PositionGrid grid(3000, 100);
  const auto none = estimate_first_crossing(sc, grid, 200, SeedPolicy{}, AntennaId::Front);
  EXPECT_EQ(none.no_trigger_fraction(), 1.0);
  for (std::size_t k = 0; k < grid.size(); ++k) EXPECT_EQ(none.mass(k), 0.0);

  Scenario always;
  always.hysteresis = 0.0;
  always.shadow_sigma = 1e-9;
  const PositionGrid late(std::vector<double>{2000.0, 2100.0});
  const auto first = estimate_first_crossing(always, late, 200, SeedPolicy{}, AntennaId::Front);
  EXPECT_EQ(first.mass(0), 1.0);
  EXPECT_EQ(first.mass(1), 0.0);
}

TEST(EstimateFirstCrossing, MatchesRederivedOccurrence) {
  const Scenario sc;
  const PositionGrid grid = PositionGrid::for_scenario(sc);
  const auto mc = estimate_first_crossing(sc, grid, 100000, SeedPolicy{8}, AntennaId::Front);
  const auto occ = occurrence_prob(sc, grid, AntennaId::Front, MetricMode::Rederived);
  double total = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    EXPECT_NEAR(mc.mass(k), occ[k], 0.01) << grid[k];
    total += mc.mass(k);
  }
  EXPECT_NEAR(total + mc.no_trigger_fraction(), 1.0, 1e-12);
}

TEST(EstimateProtocol, NoThresholdNoInterruption) {
  Scenario sc;
  sc.threshold = -1e6;
  const auto st = estimate_protocol(sc, PositionGrid::for_scenario(sc), 200, SeedPolicy{});
  EXPECT_EQ(st.violations, 0u);
  for (double len : st.interruption_length) EXPECT_EQ(len, 0.0);
  EXPECT_EQ(st.front.failures, 0u);
}

TEST(EstimateProtocol, DegenerateShadowingGivesPointMass) {
  Scenario sc;
  sc.shadow_sigma = 1e-9;
  const PositionGrid grid = PositionGrid::for_scenario(sc);
  const auto st = estimate_protocol(sc, grid, 100, SeedPolicy{});
  std::size_t occupied = 0;
  for (auto c : st.front.handover_at) occupied += c > 0;
  EXPECT_EQ(occupied, 1u);
  EXPECT_EQ(st.completed, 100u);
}

TEST(EstimateProtocol, ModalBinFailureRateMatchesAnalytics) {
  const Scenario sc;
  const PositionGrid grid = PositionGrid::for_scenario(sc);
  const auto st = estimate_protocol(sc, grid, 10000, SeedPolicy{});
  EXPECT_EQ(st.violations, 0u);
  const std::size_t k = st.front.modal_attempt_bin();
  ASSERT_GT(st.front.attempts_at[k], 0u);
  const double rate =
      static_cast<double>(st.front.failures_at[k]) / static_cast<double>(st.front.attempts_at[k]);
  const auto f = failure_prob(sc, grid[k], AntennaId::Front);
  ASSERT_TRUE(f.defined);
  EXPECT_NEAR(rate, f.value, 0.02) << "modal bin x=" << grid[k];
}

TEST(EstimateProtocol, IndependentOfParallelism) {
  const Scenario sc;
  const PositionGrid grid = PositionGrid::for_scenario(sc);
  const auto a = estimate_protocol(sc, grid, 300, SeedPolicy{4}, Parallelism{1});
  const auto b = estimate_protocol(sc, grid, 300, SeedPolicy{4}, Parallelism{6});
  EXPECT_EQ(a.interruption_length, b.interruption_length);
  EXPECT_EQ(a.front.attempts_at, b.front.attempts_at);
  EXPECT_EQ(a.rear.failures_at, b.rear.failures_at);
}
