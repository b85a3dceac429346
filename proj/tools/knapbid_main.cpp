#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "knapbid/experiment.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitSimulation = 4;

struct CliOptions {
  knapbid::ExperimentConfig config;
  std::vector<std::string> strategy_texts;
  std::string fractions_text = "1/2,1/4,1/8,1/16";
  std::vector<std::uint64_t> seeds;
  std::string format = "csv";
  std::string generate_out = "synthetic.csv";
};

void add_common_options(CLI::App* cmd, CliOptions& opts) {
  cmd->set_config("--config", "",
                  "Read options from a key=value config file; command-line "
                  "flags win on conflict");
  cmd->add_option("--data", opts.config.data_path,
                  "Processed impression CSV (id,value,paying_price,clicked)");
  cmd->add_option("--spec", opts.config.spec_path,
                  "Synthetic stream spec (key=value file)");
  cmd->add_option("--fractions", opts.fractions_text,
                  "Budget fractions, e.g. 1/2,1/4,1/8,1/16")
      ->capture_default_str();
  cmd->add_option("--out", opts.config.out_dir, "Report output directory")
      ->capture_default_str();
  cmd->add_option("--format", opts.format, "Report format: csv or md")
      ->check(CLI::IsMember({"csv", "md"}))
      ->capture_default_str();
}

void add_run_options(CLI::App* cmd, CliOptions& opts) {
  cmd->add_option("--strategy", opts.strategy_texts,
                  "Strategy spec, repeatable: linear=lambda:2.0, "
                  "osla=epsilon:0.01, primal, pacing=step:0.001");
  cmd->add_option("--epsilon", opts.config.epsilon,
                  "Default training fraction for osla")
      ->capture_default_str();
  cmd->add_option("--seeds", opts.seeds, "Simulation seeds")
      ->delimiter(',');
  cmd->add_flag("--reveal-losing-price", opts.config.reveal_losing_price,
                "Reveal the paying price of lost auctions to policies");
}

void finalize(CliOptions& opts) {
  opts.config.fractions = knapbid::parse_fractions(opts.fractions_text);
  if (!opts.seeds.empty()) opts.config.seeds = opts.seeds;
  opts.config.markdown = opts.format == "md";
  for (const auto& text : opts.strategy_texts) {
    opts.config.strategies.push_back(knapbid::parse_strategy_spec(text));
  }
}

void print_warnings(const knapbid::RunReport& report) {
  for (const auto& warning : report.warnings) {
    std::cerr << "warning: " << warning << "\n";
  }
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Second-price knapsack bidding toolkit"};
  app.require_subcommand(1);

  CliOptions opts;

  auto* generate = app.add_subcommand(
      "generate", "Generate a synthetic impression stream as processed CSV");
  generate->add_option("--spec", opts.config.spec_path, "Synthetic spec file")
      ->required();
  generate->add_option("--out", opts.generate_out, "Output CSV path")
      ->capture_default_str();

  auto* benchmark = app.add_subcommand(
      "benchmark", "Offline optimal-bundle benchmark per budget fraction");
  add_common_options(benchmark, opts);

  auto* run = app.add_subcommand(
      "run", "Simulate bidding strategies against the offline benchmark");
  add_common_options(run, opts);
  add_run_options(run, opts);

  auto* compare = app.add_subcommand(
      "compare", "Run strategies and report ratios against a baseline");
  add_common_options(compare, opts);
  add_run_options(compare, opts);
  compare->add_option("--baseline", opts.config.baseline,
                      "Baseline strategy name for performance ratios")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    finalize(opts);
    if (generate->parsed()) {
      knapbid::cmd_generate(opts.config.spec_path, opts.generate_out);
      std::cout << "wrote " << opts.generate_out << "\n";
      return kExitOk;
    }
    const auto ads = knapbid::load_dataset(opts.config);
    if (benchmark->parsed()) {
      const auto rows = knapbid::cmd_benchmark(opts.config, ads);
      knapbid::write_benchmark_report(rows, opts.config);
      std::cout << "wrote benchmark report for " << rows.size()
                << " fractions to " << opts.config.out_dir << "\n";
    } else if (run->parsed()) {
      const auto report = knapbid::cmd_run(opts.config, ads);
      print_warnings(report);
      knapbid::write_run_report(report, opts.config);
      std::cout << "wrote run report (" << report.rows.size() << " rows) to "
                << opts.config.out_dir << "\n";
    } else if (compare->parsed()) {
      knapbid::RunReport report;
      const auto rows = knapbid::cmd_compare(opts.config, ads, &report);
      print_warnings(report);
      knapbid::write_run_report(report, opts.config);
      knapbid::write_compare_report(rows, opts.config);
      std::cout << "wrote comparison report (" << rows.size() << " rows) to "
                << opts.config.out_dir << "\n";
    }
  } catch (const knapbid::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const knapbid::SimulationError& e) {
    std::cerr << "simulation error: " << e.what() << "\n";
    return kExitSimulation;
  } catch (const knapbid::ParseError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitOk;
}
