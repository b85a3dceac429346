#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "knapbid/dataio.hpp"
#include "knapbid/simulator.hpp"
#include "knapbid/strategies.hpp"
#include "knapbid/types.hpp"

namespace knapbid {

/// One strategy request: a name plus numeric parameters, as written on the
/// command line ("osla=epsilon:0.01" or just "pacing").
struct StrategySpec {
  std::string name;
  std::map<std::string, double> params;

  std::string label() const;
};

/// Parses "name" or "name=key:value,key:value".
StrategySpec parse_strategy_spec(const std::string& text);

/// Instantiates a policy. Known strategies: linear (lambda), osla
/// (epsilon, defaulting to `default_epsilon`), primal, pacing (step,
/// mu_cap). Throws ConfigError for unknown names or bad parameters.
std::unique_ptr<BidPolicy> make_policy(const StrategySpec& spec,
                                       double default_epsilon);

struct ExperimentConfig {
  std::string data_path; // processed CSV
  std::string spec_path; // synthetic-spec file (alternative source)
  std::vector<StrategySpec> strategies;
  std::vector<double> fractions;
  double epsilon = 0.01;
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  std::string out_dir = ".";
  bool markdown = false;
  bool reveal_losing_price = false;
  std::string baseline;
};

/// Loads the configured dataset (file or synthetic spec).
std::vector<Impression> load_dataset(const ExperimentConfig& config);

/// "1/2,1/4,0.125" -> {0.5, 0.25, 0.125}
std::vector<double> parse_fractions(const std::string& text);

struct BenchmarkRow {
  double fraction = 0.0;
  double budget = 0.0;
  double bundle_value = 0.0;
  double pct_total_value = 0.0;
  std::size_t bundle_clicks = 0;
  double pct_total_clicks = 0.0;
  double lambda_star = 0.0;
};

struct RunRow {
  std::string strategy;
  double fraction = 0.0;
  std::uint64_t seed = 0;
  double value = 0.0;
  double pct_benchmark = 0.0;
  std::size_t clicks = 0;
  double pct_benchmark_clicks = 0.0;
  double spend = 0.0;
  std::size_t wins = 0;
  double lambda_hat = 0.0; // NaN when not applicable
  double lambda_star = 0.0;
  bool exceeds_benchmark = false;
};

struct RunSummaryRow {
  std::string strategy;
  double fraction = 0.0;
  double value_mean = 0.0;
  double value_std = 0.0;
  double pct_mean = 0.0;
  double pct_std = 0.0;
  double clicks_mean = 0.0;
  double pct_clicks_mean = 0.0;
  double lambda_hat_mean = 0.0; // NaN when not applicable
  double lambda_star = 0.0;
};

struct RunReport {
  std::vector<RunRow> rows;
  std::vector<RunSummaryRow> summary;
  std::vector<std::string> warnings;
};

struct CompareRow {
  double fraction = 0.0;
  std::string strategy;
  double pct_benchmark_mean = 0.0;
  double ratio_vs_baseline_pct = 0.0;
};

/// Offline optimal-bundle benchmark per budget fraction.
std::vector<BenchmarkRow> cmd_benchmark(const ExperimentConfig& config,
                                        const std::vector<Impression>& ads);

/// Simulates every (strategy, fraction, seed) cell on a seed-permuted
/// stream and reports per-seed rows plus per-cell mean/stddev, with
/// percentages computed against the same offline benchmark cmd_benchmark
/// uses.
RunReport cmd_run(const ExperimentConfig& config,
                  const std::vector<Impression>& ads);

/// cmd_run plus performance ratios of each strategy against the configured
/// baseline strategy (by mean value, per fraction).
std::vector<CompareRow> cmd_compare(const ExperimentConfig& config,
                                    const std::vector<Impression>& ads,
                                    RunReport* run_report = nullptr);

/// Generates a synthetic stream from a spec file and writes it as
/// processed CSV.
void cmd_generate(const std::string& spec_path, const std::string& out_path);

void write_benchmark_report(const std::vector<BenchmarkRow>& rows,
                            const ExperimentConfig& config);
void write_run_report(const RunReport& report,
                      const ExperimentConfig& config);
void write_compare_report(const std::vector<CompareRow>& rows,
                          const ExperimentConfig& config);

} // namespace knapbid
