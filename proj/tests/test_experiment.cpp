#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "knapbid/experiment.hpp"
#include "knapbid/knapsack.hpp"
#include "knapbid/rng.hpp"

using namespace knapbid;

namespace {

std::filesystem::path temp_dir(const std::string& name) {
  const auto dir =
      std::filesystem::temp_directory_path() / "knapbid_experiment" / name;
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<Impression> small_dataset(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Impression> ads;
  for (std::size_t i = 0; i < n; ++i) {
    Impression imp;
    imp.id = std::to_string(i);
    imp.value = 0.5 + 5.0 * rng.uniform();
    imp.paying_price = 0.5 + 3.0 * rng.uniform();
    imp.clicked = rng.uniform() < 0.1;
    ads.push_back(imp);
  }
  return ads;
}

} // namespace

TEST_CASE("strategy specs parse names and parameters") {
  const auto bare = parse_strategy_spec("primal");
  CHECK(bare.name == "primal");
  CHECK(bare.params.empty());

  const auto osla = parse_strategy_spec("osla=epsilon:0.02");
  CHECK(osla.name == "osla");
  CHECK(osla.params.at("epsilon") == doctest::Approx(0.02));

  const auto pacing = parse_strategy_spec("pacing=step:0.001,mu_cap:10");
  CHECK(pacing.params.size() == 2);

  CHECK_THROWS_AS(parse_strategy_spec("linear=lambda=2"), ConfigError);
  CHECK_THROWS_AS(parse_strategy_spec("osla=epsilon:abc"), ConfigError);
}

TEST_CASE("make_policy validates strategy names and parameters") {
  CHECK(make_policy(parse_strategy_spec("linear=lambda:2"), 0.01) != nullptr);
  CHECK(make_policy(parse_strategy_spec("osla"), 0.01) != nullptr);
  CHECK(make_policy(parse_strategy_spec("primal"), 0.01) != nullptr);
  CHECK(make_policy(parse_strategy_spec("pacing=step:0.01"), 0.01) != nullptr);
  CHECK_THROWS_AS(make_policy(parse_strategy_spec("linear"), 0.01),
                  ConfigError);
  CHECK_THROWS_AS(make_policy(parse_strategy_spec("mystery"), 0.01),
                  ConfigError);
  CHECK_THROWS_AS(make_policy(parse_strategy_spec("primal=foo:1"), 0.01),
                  ConfigError);
}

TEST_CASE("fractions parse rationals and decimals") {
  const auto fractions = parse_fractions("1/2,1/4,0.125");
  REQUIRE(fractions.size() == 3);
  CHECK(fractions[0] == doctest::Approx(0.5));
  CHECK(fractions[1] == doctest::Approx(0.25));
  CHECK(fractions[2] == doctest::Approx(0.125));
  CHECK_THROWS_AS(parse_fractions("1/0"), ConfigError);
  CHECK_THROWS_AS(parse_fractions("abc"), ConfigError);
}

TEST_CASE("cmd_benchmark covers the full-budget and monotone cases") {
  const auto ads = small_dataset(60, 11);
  ExperimentConfig config;
  config.fractions = {1.0, 0.5, 0.25, 0.125, 0.0625};
  const auto rows = cmd_benchmark(config, ads);
  REQUIRE(rows.size() == 5);
  CHECK(rows[0].pct_total_value == doctest::Approx(100.0));
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i].bundle_value <= rows[i - 1].bundle_value + 1e-9);
  }
}

TEST_CASE("cmd_benchmark bundle is near the exact optimum on small data") {
  const auto ads = small_dataset(10, 5);
  ExperimentConfig config;
  config.fractions = {0.5};
  const auto rows = cmd_benchmark(config, ads);
  const Budget budget = budget_fraction(ads, 0.5);
  const auto exact = solve_integer_exact(ads, budget);
  double v_max = 0.0;
  for (const auto& ad : ads) v_max = std::max(v_max, ad.value);
  CHECK(rows[0].bundle_value >= exact.objective - v_max - 1e-9);
  CHECK(rows[0].bundle_value <= exact.objective + 1e-9);
}

TEST_CASE("cmd_run produces one row per strategy-fraction-seed cell") {
  const auto ads = small_dataset(80, 21);
  ExperimentConfig config;
  config.strategies = {parse_strategy_spec("linear=lambda:1.0"),
                       parse_strategy_spec("pacing")};
  config.fractions = {0.5, 0.25};
  config.seeds = {1, 2, 3};
  const auto report = cmd_run(config, ads);
  CHECK(report.rows.size() == 2 * 2 * 3);
  CHECK(report.summary.size() == 2 * 2);
  for (const auto& row : report.rows) {
    CHECK(std::isfinite(row.pct_benchmark));
    CHECK(row.spend <= budget_fraction(ads, row.fraction).total + 1e-9);
  }
}

TEST_CASE("cmd_run records the learned and offline thresholds for osla") {
  const auto ads = small_dataset(400, 33);
  ExperimentConfig config;
  config.strategies = {parse_strategy_spec("osla=epsilon:0.1")};
  config.fractions = {0.25};
  config.seeds = {1, 2};
  config.reveal_losing_price = true;
  const auto report = cmd_run(config, ads);
  for (const auto& row : report.rows) {
    CHECK(std::isfinite(row.lambda_hat));
    CHECK(row.lambda_star > 0.0);
  }
  CHECK(std::isfinite(report.summary[0].lambda_hat_mean));
}

TEST_CASE("run percentages are measured against the cmd_benchmark bundle") {
  const auto ads = small_dataset(120, 88);
  ExperimentConfig config;
  config.strategies = {parse_strategy_spec("linear=lambda:1.2")};
  config.fractions = {0.25};
  config.seeds = {3};
  const auto bench_rows = cmd_benchmark(config, ads);
  const auto report = cmd_run(config, ads);
  REQUIRE(report.rows.size() == 1);
  const auto& row = report.rows[0];
  CHECK(row.pct_benchmark ==
        doctest::Approx(100.0 * row.value / bench_rows[0].bundle_value));
  CHECK(row.lambda_star == bench_rows[0].lambda_star);
}

TEST_CASE("cmd_run is reproducible for identical seeds") {
  const auto ads = small_dataset(100, 44);
  ExperimentConfig config;
  config.strategies = {parse_strategy_spec("primal"),
                       parse_strategy_spec("pacing")};
  config.fractions = {0.25};
  config.seeds = {7, 8};
  const auto a = cmd_run(config, ads);
  const auto b = cmd_run(config, ads);
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].value == b.rows[i].value);
    CHECK(a.rows[i].spend == b.rows[i].spend);
    CHECK(a.rows[i].wins == b.rows[i].wins);
  }
}

TEST_CASE("empty datasets yield zero rows without division errors") {
  ExperimentConfig config;
  config.strategies = {parse_strategy_spec("pacing"),
                       parse_strategy_spec("primal")};
  config.fractions = {0.5};
  config.seeds = {1};
  const std::vector<Impression> empty;
  const auto report = cmd_run(config, empty);
  for (const auto& row : report.rows) {
    CHECK(row.value == 0.0);
    CHECK(row.pct_benchmark == 0.0);
    CHECK(std::isfinite(row.pct_benchmark));
  }
}

TEST_CASE("cmd_compare reports 100 percent against itself") {
  const auto ads = small_dataset(60, 55);
  ExperimentConfig config;
  config.strategies = {parse_strategy_spec("pacing")};
  config.fractions = {0.5};
  config.seeds = {1, 2};
  config.baseline = "pacing";
  const auto rows = cmd_compare(config, ads);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].ratio_vs_baseline_pct == doctest::Approx(100.0));
}

TEST_CASE("cmd_compare rejects unknown baselines") {
  const auto ads = small_dataset(10, 55);
  ExperimentConfig config;
  config.strategies = {parse_strategy_spec("pacing")};
  config.fractions = {0.5};
  config.baseline = "osla";
  CHECK_THROWS_AS(cmd_compare(config, ads), ConfigError);
}

TEST_CASE("cmd_generate writes deterministic processed CSV") {
  const auto dir = temp_dir("generate");
  const auto spec_path = dir / "spec.cfg";
  {
    std::ofstream spec(spec_path);
    spec << "n=100\n"
            "value_dist=lognormal(0,1)\n"
            "price_dist=lognormal(1,0.5)\n"
            "correlation=0.2\n"
            "seed=5\n";
  }
  const auto out_a = dir / "a.csv";
  const auto out_b = dir / "b.csv";
  cmd_generate(spec_path.string(), out_a.string());
  cmd_generate(spec_path.string(), out_b.string());
  const std::string a = slurp(out_a);
  CHECK(a == slurp(out_b));
  CHECK(std::count(a.begin(), a.end(), '\n') == 101); // header + 100 rows
}

TEST_CASE("report writers emit byte-identical files on identical runs") {
  const auto ads = small_dataset(50, 66);
  ExperimentConfig config;
  config.strategies = {parse_strategy_spec("linear=lambda:1.5"),
                       parse_strategy_spec("osla=epsilon:0.1")};
  config.fractions = {0.5, 0.25};
  config.seeds = {1, 2};
  config.baseline = "linear";
  config.markdown = true;

  config.out_dir = temp_dir("reports_a").string();
  RunReport report_a;
  const auto rows_a = cmd_compare(config, ads, &report_a);
  write_run_report(report_a, config);
  write_compare_report(rows_a, config);
  write_benchmark_report(cmd_benchmark(config, ads), config);

  const auto dir_a = config.out_dir;
  config.out_dir = temp_dir("reports_b").string();
  RunReport report_b;
  const auto rows_b = cmd_compare(config, ads, &report_b);
  write_run_report(report_b, config);
  write_compare_report(rows_b, config);
  write_benchmark_report(cmd_benchmark(config, ads), config);

  for (const char* file : {"run.csv", "run_summary.csv", "compare.csv",
                           "benchmark.csv", "run_summary.md"}) {
    CHECK(slurp(std::filesystem::path(dir_a) / file) ==
          slurp(std::filesystem::path(config.out_dir) / file));
  }
}

TEST_CASE("run config validation") {
  const auto ads = small_dataset(10, 77);
  ExperimentConfig config;
  config.fractions = {0.5};
  CHECK_THROWS_AS(cmd_run(config, ads), ConfigError); // no strategies
  config.strategies = {parse_strategy_spec("pacing")};
  config.fractions = {};
  CHECK_THROWS_AS(cmd_run(config, ads), ConfigError); // no fractions
  config.fractions = {2.0};
  CHECK_THROWS_AS(cmd_run(config, ads), ConfigError); // fraction > 1
  config.fractions = {0.5};
  config.seeds = {};
  CHECK_THROWS_AS(cmd_run(config, ads), ConfigError); // no seeds
}
