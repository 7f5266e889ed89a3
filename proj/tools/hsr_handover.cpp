// Command-line front end: figure reproduction, scheme comparison, the
// analytic-vs-Monte-Carlo oracle suite and protocol traces.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "hsr/hsr.hpp"

namespace {

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> trials;
  std::optional<std::string> mode;
  std::optional<std::string> schemes;
  std::optional<std::string> out;
  std::string figure = "trigger";
  std::string scheme = "proposed";
  std::uint64_t trial = 0;
  unsigned threads = 0;
};

constexpr const char* kUnits =
    "Config keys (key = value, '#' comments, [sections] allowed):\n"
    "  ds, dr, d0, du, train_length [m]; speed [m/s]; n_raus; grid_step [m]\n"
    "  tx_power [dBm]; threshold [dBm]; hysteresis [dB]; shadow_sigma,\n"
    "  shadow_sigma_serving, shadow_sigma_target [dB]; pathloss_a [dB];\n"
    "  pathloss_gamma [exponent, 10*gamma dB/decade]; noise_density [dBm/Hz]\n"
    "  selection = max-rss|mean-pathloss; trials; master_seed;\n"
    "  mode = paper|rederived; schemes = list or all; output_dir\n"
    "Exit codes: 0 ok, 1 assertion failure, 2 config error, 3 non-convergence.";

hsr::RunConfig load(const Options& o) {
  std::string text;
  if (!o.config_path.empty()) {
    std::ifstream in(o.config_path);
    if (!in) throw hsr::ConfigError("config", "cannot read '" + o.config_path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  hsr::RunConfig cfg = hsr::parse_config(text);
  if (o.seed) cfg.master_seed = *o.seed;
  if (o.trials) {
    if (*o.trials < 1) throw hsr::ConfigError("trials", "must be >= 1");
    cfg.trials = *o.trials;
  }
  if (o.mode) cfg.mode = hsr::parse_mode(*o.mode);
  if (o.schemes) cfg.schemes = hsr::parse_schemes(*o.schemes);
  if (o.out) cfg.output_dir = *o.out;
  cfg.validate();
  return cfg;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  f << content;
  if (!f) throw std::runtime_error("cannot write " + path.string());
  std::cout << "wrote " << path.string() << '\n';
}

int print_checks(const std::vector<hsr::CheckResult>& checks) {
  int status = 0;
  for (const auto& c : checks) {
    std::printf("%-34s %-12s checked=%zu violations=%zu inconclusive=%zu %s\n", c.name.c_str(),
                std::string(hsr::to_string(c.status)).c_str(), c.checked, c.violations,
                c.inconclusive, c.detail.c_str());
    if (c.status == hsr::CheckResult::Status::Fail) status = 1;
  }
  return status;
}

int cmd_run(const Options& o) {
  const auto cfg = load(o);
  const auto fig = hsr::parse_figure(o.figure);
  if (!fig) throw hsr::ConfigError("figure", "unknown figure '" + o.figure + "'");
  const auto table = hsr::run_figure(cfg, *fig, hsr::Parallelism{o.threads});
  std::filesystem::create_directories(cfg.output_dir);
  write_file(std::filesystem::path(cfg.output_dir) / hsr::figure_file_name(*fig),
             hsr::write_csv(table));
  return 0;
}

int cmd_compare(const Options& o) {
  const auto cfg = load(o);
  const auto report = hsr::compare_schemes(cfg, hsr::Parallelism{o.threads});
  const std::filesystem::path dir(cfg.output_dir);
  std::filesystem::create_directories(dir);
  for (const auto& [fig, table] : report.tables) {
    write_file(dir / hsr::figure_file_name(fig), hsr::write_csv(table));
  }
  write_file(dir / "summary.csv", hsr::summary_csv(cfg, report.checks));
  print_checks(report.checks);
  return report.exit_status();
}

int cmd_validate(const Options& o) {
  const auto cfg = load(o);
  return print_checks(hsr::validate_oracles(cfg, hsr::Parallelism{o.threads}));
}

int cmd_trace(const Options& o) {
  const auto cfg = load(o);
  const auto scheme = hsr::parse_scheme(o.scheme);
  if (!scheme) throw hsr::ConfigError("scheme", "unknown scheme '" + o.scheme + "'");
  const hsr::Scenario sc = cfg.scenario.with_scheme(*scheme);
  const auto result = hsr::run_crossing(sc, hsr::PositionGrid::for_scenario(sc),
                                        hsr::SeedPolicy{cfg.master_seed}, o.trial);
  const std::string text = hsr::format_trace(result.trace);
  if (o.out) {
    std::filesystem::create_directories(*o.out);
    write_file(std::filesystem::path(*o.out) / "trace.tsv", text);
  } else {
    std::cout << text;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"High-speed-rail handover analysis with DAS cells and two train antennas"};
  app.footer(kUnits);
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config_path, "Configuration file")->check(CLI::ExistingFile);
    sub->add_option("--seed", o.seed, "Master seed (u64)");
    sub->add_option("--trials", o.trials, "Monte Carlo trials");
    sub->add_option("--mode", o.mode, "Metric mode")->check(CLI::IsMember({"paper", "rederived"}));
    sub->add_option("--schemes", o.schemes, "Comma list of proposed,das_b,das_s,traditional or all");
    sub->add_option("--out", o.out, "Output directory");
    sub->add_option("--threads", o.threads, "Worker threads (0 = all cores)");
  };

  auto* run = app.add_subcommand("run", "Reproduce one figure as CSV");
  common(run);
  run->add_option("--figure", o.figure, "rss|trigger|occurrence|failure|interruption (or fig3..fig7)");
  auto* compare = app.add_subcommand("compare", "All figures plus scheme-ordering assertions");
  common(compare);
  auto* validate = app.add_subcommand("validate", "Analytic vs Monte Carlo oracle suite");
  common(validate);
  auto* trace = app.add_subcommand("trace", "Emit one protocol trace (TSV)");
  common(trace);
  trace->add_option("--scheme", o.scheme, "Scheme of the crossing");
  trace->add_option("--trial", o.trial, "Trial index of the seeded substream");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run) return cmd_run(o);
    if (*compare) return cmd_compare(o);
    if (*validate) return cmd_validate(o);
    return cmd_trace(o);
  } catch (const hsr::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const hsr::DomainError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const hsr::NonConvergenceError& e) {
    std::cerr << "numeric non-convergence: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
