#include <CLI11.hpp>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "tvlab/errors.hpp"
#include "tvlab/experiments.hpp"

namespace {

struct Command {
  const char* name;
  const char* help;
};

constexpr Command kCommands[] = {
    {"norm-rate", "L2 distance ||f_n - f_inf|| along n and its log-log slope"},
    {"tv-rate", "TV(I2(f_n), I2(f_inf)) along n, ratio tables and slope"},
    {"optimality", "TV(I2((1+c) f_inf), I2(f_inf)) as a function of c"},
    {"spectrum", "Galerkin spectrum of f_inf and the (H) verdict"},
    {"tail", "small-ball exponent of the Malliavin derivative norm"},
    {"cross-validate", "path-route Z_n against kernel-route I2(f_n) and Z_inf"},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Second-chaos TV-rate laboratory"};
  app.set_version_flag("--version", std::string("tvlab ") + TVLAB_VERSION);
  app.require_subcommand(1);

  std::string config_path;
  // Every config key is also a flag of the same name.
  std::map<std::string, std::optional<std::string>> overrides;
  for (const auto& [key, value] : tvlab::ExperimentConfig{}.entries()) overrides[key];
  overrides["out"];
  overrides["dump_dir"];
  overrides["gnuplot"];

  for (const auto& c : kCommands) {
    auto* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("--config", config_path, "key = value configuration file");
    for (auto& [key, slot] : overrides)
      sub->add_option("--" + key, slot, "override '" + key + "'");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    tvlab::ExperimentConfig cfg;
    if (!config_path.empty()) tvlab::apply_config_file(cfg, config_path);
    for (const auto& [key, slot] : overrides)
      if (slot) cfg.set(key, *slot);
    const auto result = tvlab::run_command(command, cfg);
    std::cout << tvlab::summary(result);
    return result.exit_code;
  } catch (const tvlab::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const tvlab::ToleranceError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return tvlab::kExitNumerical;
  } catch (const tvlab::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return tvlab::kExitNumerical;
  } catch (const tvlab::InsufficientTailHits& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return tvlab::kExitNumerical;
  }
}
