#include <gtest/gtest.h>

#include <cmath>
#include <string>

#include "hsr/config.hpp"
#include "hsr/result_table.hpp"

using namespace hsr;

namespace {

std::string error_key(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "<none>";
}

}  // namespace

TEST(ParseConfig, EmptyDocumentGivesDefaults) {
  const RunConfig cfg = parse_config("");
  EXPECT_EQ(cfg.scenario.ds, 3000.0);
  EXPECT_EQ(cfg.scenario.dr, 750.0);
  EXPECT_EQ(cfg.scenario.hysteresis, 2.0);
  EXPECT_EQ(cfg.scenario.threshold, -30.0);
  EXPECT_EQ(cfg.scenario.measurement_step, 10.0);
  EXPECT_EQ(cfg.trials, 1000u);
  EXPECT_EQ(cfg.master_seed, 20160101u);
  EXPECT_EQ(cfg.mode, MetricMode::Rederived);
  EXPECT_EQ(cfg.schemes.size(), 4u);
}

TEST(ParseConfig, SectionsCommentsAndWhitespace) {
  const RunConfig cfg = parse_config(
      "# scenario\n"
      "[geometry]\n"
      "  ds = 2000   ; metres\n"
      "\n"
      "[radio]\n"
      "hysteresis=3.5\n"
      "threshold = -45 # dBm\n"
      "[run]\n"
      "trials = 250\n"
      "master_seed = 7\n"
      "mode = paper\n"
      "schemes = proposed, traditional\n"
      "output_dir = out dir\n");
  EXPECT_EQ(cfg.scenario.ds, 2000.0);
  EXPECT_EQ(cfg.scenario.dr, 500.0);
  EXPECT_EQ(cfg.scenario.hysteresis, 3.5);
  EXPECT_EQ(cfg.scenario.threshold, -45.0);
  EXPECT_EQ(cfg.trials, 250u);
  EXPECT_EQ(cfg.master_seed, 7u);
  EXPECT_EQ(cfg.mode, MetricMode::PaperLiteral);
  EXPECT_EQ(cfg.schemes, (std::vector<Scheme>{Scheme::Proposed, Scheme::Traditional}));
  EXPECT_EQ(cfg.output_dir, "out dir");
}

TEST(ParseConfig, RauCountDerivesSpacing) {
  EXPECT_EQ(parse_config("n_raus = 8\n").scenario.dr, 375.0);
  EXPECT_EQ(parse_config("n_raus = 8\ndr = 300\n").scenario.dr, 300.0);
}

TEST(ParseConfig, OptionalKeys) {
  const RunConfig cfg = parse_config(
      "shadow_sigma_target = 6\nselection = mean-pathloss\nscheme = das_b\ngrid_step = 25\n");
  EXPECT_EQ(cfg.scenario.sigma(Cell::Target), 6.0);
  EXPECT_EQ(cfg.scenario.sigma(Cell::Serving), 4.0);
  EXPECT_EQ(cfg.scenario.selection, RauSelection::MeanPathloss);
  EXPECT_EQ(cfg.scenario.scheme, Scheme::DasBlanket);
  EXPECT_EQ(cfg.scenario.measurement_step, 25.0);
}

TEST(ParseConfig, ErrorsNameTheKey) {
  EXPECT_EQ(error_key("hysteresis = -1\n"), "hysteresis");
  EXPECT_EQ(error_key("ds = 0\n"), "ds");
  EXPECT_EQ(error_key("dr = 5000\n"), "dr");
  EXPECT_EQ(error_key("shadow_sigma = 0\n"), "shadow_sigma");
  EXPECT_EQ(error_key("speed = fast\n"), "speed");
  EXPECT_EQ(error_key("n_raus = 2.5\n"), "n_raus");
  EXPECT_EQ(error_key("trials = -3\n"), "trials");
  EXPECT_EQ(error_key("trials = 0\n"), "trials");
  EXPECT_EQ(error_key("mode = literal\n"), "mode");
  EXPECT_EQ(error_key("schemes = proposed,bogus\n"), "schemes");
  EXPECT_EQ(error_key("selection = best\n"), "selection");
  EXPECT_EQ(error_key("colour = blue\n"), "colour");
  EXPECT_EQ(error_key("ds = 3000\nds = 3000\n"), "ds");
  try {
    parse_config("hysteresis = -1\n");
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("hysteresis"), std::string::npos);
  }
}

TEST(ParseConfig, MalformedLinesRejected) {
  EXPECT_THROW(parse_config("just words\n"), ConfigError);
  EXPECT_THROW(parse_config("[unterminated\n"), ConfigError);
}

TEST(ConfigHash, StableAndSensitive) {
  const RunConfig a = parse_config("");
  const RunConfig b = parse_config("# only a comment\n[run]\n");
  EXPECT_EQ(config_hash(a), config_hash(b));
  EXPECT_EQ(config_hash(a).size(), 16u);
  EXPECT_NE(config_hash(a), config_hash(parse_config("hysteresis = 2.5\n")));
  EXPECT_NE(config_hash(a), config_hash(parse_config("schemes = proposed\n")));
  // Run controls live in their own provenance fields.
  EXPECT_EQ(config_hash(a), config_hash(parse_config("trials = 5\nmaster_seed = 3\n")));
}

TEST(ResultTable, CsvRoundTrip) {
  ResultTable t;
  t.provenance = {{"figure", "fig4_trigger.csv"}, {"seed", "1"}};
  t.header = {"x_m", "a", "b"};
  t.add_row({0.0, 0.123456789, std::nan("")});
  t.add_row({10.0, -1e-7, 1234567.0});
  const std::string csv = write_csv(t);
  EXPECT_EQ(csv,
            "# provenance: figure=fig4_trigger.csv seed=1\n"
            "x_m,a,b\n"
            "0,0.123457,nan\n"
            "10,-1e-07,1.23457e+06\n");
  const ResultTable back = read_csv(csv);
  EXPECT_EQ(back, t);
  EXPECT_EQ(back.provenance_value("seed"), "1");
  EXPECT_EQ(back.column("b"), 2u);
  EXPECT_TRUE(std::isnan(back.column_values("b")[0]));
  EXPECT_EQ(write_csv(back), csv);
}

TEST(ResultTable, RejectsBadInput) {
  ResultTable t;
  t.header = {"x_m"};
  EXPECT_THROW(t.add_row({1.0, 2.0}), std::logic_error);
  EXPECT_THROW(read_csv("a,b\n1\n"), std::runtime_error);
  EXPECT_THROW(read_csv("a\nxyz\n"), std::runtime_error);
  EXPECT_EQ(format_number(-0.0), "0");
  EXPECT_THROW(static_cast<void>(t.column("nope")), std::out_of_range);
}
