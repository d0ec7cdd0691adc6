// fattail: runs one experiment and writes CSV files plus manifest.json.
//
//   fattail fig3 --model student --nu 3 --M 1e6 --seed 42
//   fattail price-vanilla --model gaussian --T 0.03
//   fattail maturity-scan --config scan.cfg --threads 4

#include <fstream>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "fattail/cli.hpp"
#include "fattail/error.hpp"

namespace {

// Flag names double as config-file keys.
const std::vector<std::pair<std::string, std::string>> flags = {
    {"model", "model; gaussian, student, qgaussian, tld, mwd or all"},
    {"param-set", "hf (high-frequency) or daily"},
    {"nu", "Student-t degrees of freedom"},
    {"q", "q-Gaussian index"},
    {"alpha", "TLD stability index"},
    {"lambda", "TLD cutoff"},
    {"c", "modified Weibull exponent"},
    {"M", "sample or path count; comma list allowed for fig9"},
    {"N", "steps; comma list for clt/mclt"},
    {"dt", "time step"},
    {"B", "support bound of non-Gaussian draws"},
    {"seed", "master seed"},
    {"threads", "worker cap, 0 = all cores"},
    {"resamples", "bootstrap resamples"},
    {"kind", "maturity-scan contract: vanilla or knock-out"},
    {"T", "maturities, comma list"},
    {"X", "strike"},
    {"U", "knock-out barrier"},
    {"r", "risk-free rate"},
    {"sigma", "volatility"},
    {"S0", "spot"},
    {"mu", "drift (fig4)"},
    {"out", "output directory"},
};

}  // namespace

int main(int argc, char** argv) {
  namespace cli = fattail::cli;

  CLI::App app{"Fat-tailed return models: sampling, dynamics and option pricing experiments"};
  std::string experiment;
  std::string config_path;
  bool paper_scale = false;
  app.add_option("experiment", experiment, "experiment id")
      ->required()
      ->check(CLI::IsMember(cli::experiments()));
  app.add_option("--config", config_path, "key = value settings file; flags override it")
      ->check(CLI::ExistingFile);
  app.add_flag("--paper-scale", paper_scale, "use the paper's sample sizes");

  std::vector<std::string> values(flags.size());
  for (std::size_t i = 0; i < flags.size(); ++i)
    app.add_option("--" + flags[i].first, values[i], flags[i].second);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    cli::RunConfig config = cli::default_paper_config(experiment);
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw fattail::ConfigError("cannot read " + config_path);
      cli::apply_config_file(config, in, config_path);
    }
    for (std::size_t i = 0; i < flags.size(); ++i) {
      if (app.count("--" + flags[i].first) == 0) continue;
      try {
        cli::apply_setting(config, flags[i].first, values[i]);
      } catch (const fattail::Error& e) {
        throw fattail::ConfigError(std::string("--") + e.what());
      }
    }
    if (paper_scale) config.paper_scale = true;

    std::string command = "fattail";
    for (int i = 1; i < argc; ++i) command += std::string(" ") + argv[i];
    config.command_line = command;

    return cli::run(config, std::cout, std::cerr).exit_code;
  } catch (const fattail::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const fattail::ParameterDomainError& e) {
    std::cerr << "parameter error: " << e.what() << '\n';
    return 2;
  }
}
