// wnn: graphon neural network experiments from the command line.
//
//   wnn <command> [--config FILE] [--set key=value]... [--out DIR] [--seed N] [--jobs N]
//
// Commands: verify-propositions, bounds, consensus, spectra, train.
// Exit codes: 0 success, 1 a check failed, 2 configuration error.

#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "wnn/config.hpp"
#include "wnn/experiments.hpp"

namespace {

using Command = std::function<int(const wnn::Config&, const wnn::experiments::RunOptions&, std::ostream&)>;

struct Flags {
  std::string config;
  std::vector<std::string> overrides;
  std::string out;
  std::uint64_t seed = 0;
  unsigned jobs = 1;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graphon neural networks: sampling, spectra, transferability bounds and consensus training"};
  app.require_subcommand(1);

  const std::vector<std::tuple<std::string, std::string, Command>> commands{
      {"verify-propositions", "Check the sampling-error and eigenvalue-perturbation propositions",
       wnn::experiments::cmd_verify_propositions},
      {"bounds", "Evaluate the approximation, transfer and convolution bounds on a smooth graphon",
       wnn::experiments::cmd_bounds},
      {"consensus", "Consensus transfer sweep over F, K or L", wnn::experiments::cmd_consensus},
      {"spectra", "Graphon and induced spectra across sizes", wnn::experiments::cmd_spectra},
      {"train", "Single consensus training run", wnn::experiments::cmd_train},
  };

  Flags flags;
  std::map<CLI::App*, Command> handlers;
  for (const auto& [name, help, fn] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", flags.config, "Configuration file (key = value lines)");
    sub->add_option("--set", flags.overrides, "Override one key, key=value (repeatable)");
    sub->add_option("--out", flags.out, "Output directory (default $WNN_OUT_DIR or ./wnn-out)");
    sub->add_option("--seed", flags.seed, "Base seed");
    sub->add_option("--jobs", flags.jobs, "Worker threads")->check(CLI::PositiveNumber);
    handlers[sub] = fn;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  CLI::App* chosen = app.get_subcommands().front();
  try {
    wnn::Config cfg = flags.config.empty() ? wnn::Config{} : wnn::Config::from_file(flags.config);
    for (const auto& kv : flags.overrides) cfg.apply_override(kv);

    wnn::experiments::RunOptions run;
    if (!flags.out.empty()) {
      run.out = flags.out;
    } else if (cfg.has("run.out")) {
      run.out = cfg.get_string("run.out", "");
    } else if (const char* env = std::getenv("WNN_OUT_DIR"); env && *env) {
      run.out = env;
    }
    run.seed = chosen->count("--seed") ? flags.seed : cfg.get_uint("run.seed", 0);
    run.jobs = chosen->count("--jobs") ? flags.jobs : static_cast<unsigned>(cfg.get_uint("run.jobs", 1));
    if (run.jobs < 1) throw wnn::ConfigError("run.jobs must be positive");
    cfg.check_known({"run"}, {"run.out", "run.seed", "run.jobs"});

    return handlers.at(chosen)(cfg, run, std::cout);
  } catch (const wnn::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const wnn::NotLipschitz& e) {
    std::cerr << "refused: " << e.what() << "\n";
    return 2;
  } catch (const wnn::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
