// leadsel: run seeded leader-selection campaigns and write summary tables.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "leadsel/campaign.hpp"
#include "leadsel/error.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kOutputError = 1;
constexpr int kConfigError = 2;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Seeded leader-selection campaigns over a signalized intersection."};
  app.set_version_flag("--version", "leadsel 0.1.0");

  std::optional<std::string> config_path, runs, seed, variant, volume, m, cr, out, threads;
  bool events = false;
  bool quiet = false;
  app.add_option("--config", config_path, "key=value config file");
  app.add_option("--runs", runs, "runs per matrix cell");
  app.add_option("--seed", seed, "root seed");
  app.add_option("--variant", variant, "basic|optimized (comma list allowed)");
  app.add_option("--volume", volume, "medium|dense (comma list allowed)");
  app.add_option("--m", m, "Nakagami m: 1|2|3 (comma list allowed)");
  app.add_option("--cr", cr, "communication range: 100..500 step 100 (comma list allowed)");
  app.add_option("--out", out, "output directory");
  app.add_option("--threads", threads, "worker threads");
  app.add_flag("--events", events, "write events-<run>.jsonl and snapshots-<run>.jsonl");
  app.add_flag("--quiet", quiet, "do not print the summary table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  leadsel::Config cfg;
  try {
    if (config_path) cfg = leadsel::load_config(*config_path);
    const std::pair<const char*, const std::optional<std::string>*> overrides[] = {
        {"runs", &runs}, {"seed", &seed}, {"variant", &variant}, {"volume", &volume},
        {"m", &m},       {"cr", &cr},     {"out", &out},         {"threads", &threads}};
    for (const auto& [key, value] : overrides) {
      if (*value) leadsel::apply_setting(cfg, key, **value);
    }
    if (events) cfg.campaign.events = true;
    if (quiet) cfg.campaign.quiet = true;
    cfg.validate();
  } catch (const leadsel::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n" << "Run with --help for usage.\n";
    return kConfigError;
  }

  try {
    const auto result = leadsel::run_and_write(cfg);
    if (!cfg.campaign.quiet) leadsel::print_summary_table(std::cout, result);
  } catch (const leadsel::OutputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kOutputError;
  }
  return kOk;
}
