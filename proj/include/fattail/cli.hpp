#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fattail::cli {

enum class ParamSet { high_frequency, daily };

/// Everything one experiment run needs. Built from the experiment defaults,
/// then a config file, then explicit flags, in that order.
struct RunConfig {
  std::string experiment;
  ParamSet param_set = ParamSet::high_frequency;
  std::string model = "all";  // gaussian, student, qgaussian, tld, mwd or all
  std::optional<double> nu;
  std::optional<double> q;
  std::optional<double> alpha;
  std::optional<double> lambda;
  std::optional<double> c;

  std::vector<std::uint64_t> m_list;
  bool m_overridden = false;  // set by an explicit M; paper-scale then leaves M alone
  std::vector<std::size_t> n_list;
  double dt = 1e-3;
  double bound = 30.0;
  std::uint64_t seed = 42;
  unsigned threads = 0;
  bool paper_scale = false;
  std::size_t resamples = 2000;

  std::string kind = "vanilla";  // maturity-scan only: vanilla or knock-out
  std::vector<double> maturities;
  double strike = 150.0;
  double barrier = 152.0;
  double rate = 0.01;
  double spot = 150.0;
  double sigma = 0.1;
  double drift = 0.01;  // fig4 only

  std::filesystem::path out_dir;
  std::string command_line;
};

/// Experiment ids accepted by run().
const std::vector<std::string>& experiments();

/// Reference parameters for `experiment`; throws ConfigError for unknown ids.
RunConfig default_paper_config(const std::string& experiment);

/// Applies one `key = value` setting. Keys are the long flag names without
/// dashes (nu, M, T, S0, param-set, ...). Throws ConfigError.
void apply_setting(RunConfig& config, const std::string& key, const std::string& value);

/// Reads `key = value` lines ('#' starts a comment). Errors name the source
/// and line number.
void apply_config_file(RunConfig& config, std::istream& in, const std::string& source_name);

/// Default output directory: $FATTAIL_OUT_DIR/<experiment>, or
/// fattail_out/<experiment> when the variable is unset.
std::filesystem::path default_out_dir(const std::string& experiment);

struct RunResult {
  int exit_code = 0;
  std::vector<std::string> files;
};

/// Runs the experiment, writes its CSV files and manifest.json into
/// config.out_dir and prints a short summary to `log`. Errors are reported
/// on `err` and mapped to exit codes: 2 configuration or parameter domain,
/// 3 numerical failure.
RunResult run(const RunConfig& config, std::ostream& log, std::ostream& err);

/// Column layout of every CSV file the CLI can emit, keyed by file name.
const std::map<std::string, std::vector<std::string>>& output_schemas();

/// Checks a run directory against manifest.json and output_schemas().
/// Returns one message per problem; empty means valid.
std::vector<std::string> validate_outputs(const std::filesystem::path& dir);

}  // namespace fattail::cli
