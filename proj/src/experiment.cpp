#include "knapbid/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

namespace knapbid {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt(double x) {
  if (std::isnan(x)) return "";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

double pct(double x, double denom) { return denom > 0.0 ? 100.0 * x / denom : 0.0; }

double mean_of(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double stddev_of(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean_of(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

std::ofstream open_out(const ExperimentConfig& config,
                       const std::string& file) {
  std::filesystem::create_directories(config.out_dir);
  const auto path = std::filesystem::path(config.out_dir) / file;
  std::ofstream out(path);
  if (!out) throw Error("cannot open report file: " + path.string());
  return out;
}

void require_run_config(const ExperimentConfig& config) {
  if (config.strategies.empty()) {
    throw ConfigError("at least one --strategy is required");
  }
  if (config.fractions.empty()) {
    throw ConfigError("at least one budget fraction is required");
  }
  if (config.seeds.empty()) {
    throw ConfigError("at least one seed is required");
  }
  for (double f : config.fractions) {
    if (!(f > 0.0 && f <= 1.0)) {
      throw ConfigError("budget fractions must lie in (0, 1]");
    }
  }
}

} // namespace

std::string StrategySpec::label() const {
  if (params.empty()) return name;
  std::string out = name + "(";
  bool first = true;
  for (const auto& [key, value] : params) {
    if (!first) out += ",";
    first = false;
    out += key + "=" + fmt(value);
  }
  return out + ")";
}

StrategySpec parse_strategy_spec(const std::string& text) {
  StrategySpec spec;
  const auto eq = text.find('=');
  if (eq == std::string::npos) {
    spec.name = text;
    return spec;
  }
  spec.name = text.substr(0, eq);
  std::stringstream rest(text.substr(eq + 1));
  std::string item;
  while (std::getline(rest, item, ',')) {
    if (item.empty()) continue;
    const auto colon = item.find(':');
    if (colon == std::string::npos) {
      throw ConfigError("strategy parameter needs key:value syntax: " + item);
    }
    try {
      spec.params[item.substr(0, colon)] = std::stod(item.substr(colon + 1));
    } catch (const std::exception&) {
      throw ConfigError("bad numeric strategy parameter: " + item);
    }
  }
  return spec;
}

std::unique_ptr<BidPolicy> make_policy(const StrategySpec& spec,
                                       double default_epsilon) {
  auto param = [&](const std::string& key,
                   double fallback) {
    auto it = spec.params.find(key);
    return it == spec.params.end() ? fallback : it->second;
  };
  auto check_keys = [&](std::initializer_list<const char*> allowed) {
    for (const auto& [key, _] : spec.params) {
      if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) {
            return key == a;
          }) == allowed.end()) {
        throw ConfigError("strategy '" + spec.name + "' has no parameter '" +
                          key + "'");
      }
    }
  };
  if (spec.name == "linear") {
    check_keys({"lambda"});
    const auto it = spec.params.find("lambda");
    if (it == spec.params.end()) {
      throw ConfigError("strategy 'linear' needs lambda, e.g. "
                        "linear=lambda:2.0");
    }
    return std::make_unique<LinearBidPolicy>(it->second);
  }
  if (spec.name == "osla") {
    check_keys({"epsilon"});
    return std::make_unique<OslaPolicy>(param("epsilon", default_epsilon));
  }
  if (spec.name == "primal") {
    check_keys({});
    return std::make_unique<PrimalRandomizedPolicy>();
  }
  if (spec.name == "pacing") {
    check_keys({"step", "mu_cap"});
    AdaptivePacingPolicy::Params params;
    if (spec.params.count("step")) params.step = spec.params.at("step");
    params.mu_cap = param("mu_cap", 1e6);
    return std::make_unique<AdaptivePacingPolicy>(params);
  }
  throw ConfigError("unknown strategy: " + spec.name);
}

std::vector<Impression> load_dataset(const ExperimentConfig& config) {
  if (!config.data_path.empty() && !config.spec_path.empty()) {
    throw ConfigError("--data and --spec are mutually exclusive");
  }
  if (!config.data_path.empty()) {
    return parse_impressions(config.data_path, LogFormat::processed)
        .impressions;
  }
  if (!config.spec_path.empty()) {
    return generate_synthetic(parse_synthetic_spec(config.spec_path));
  }
  throw ConfigError("a dataset is required (--data or --spec)");
}

std::vector<double> parse_fractions(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      const auto slash = item.find('/');
      if (slash != std::string::npos) {
        const double num = std::stod(item.substr(0, slash));
        const double den = std::stod(item.substr(slash + 1));
        if (den == 0.0) throw ConfigError("fraction denominator is zero");
        out.push_back(num / den);
      } else {
        out.push_back(std::stod(item));
      }
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception&) {
      throw ConfigError("bad fraction: " + item);
    }
  }
  return out;
}

std::vector<BenchmarkRow> cmd_benchmark(const ExperimentConfig& config,
                                        const std::vector<Impression>& ads) {
  if (config.fractions.empty()) {
    throw ConfigError("at least one budget fraction is required");
  }
  double total_value = 0.0;
  std::size_t total_clicks = 0;
  for (const auto& ad : ads) {
    total_value += ad.value;
    if (ad.clicked.value_or(false)) ++total_clicks;
  }
  std::vector<BenchmarkRow> rows;
  for (double fraction : config.fractions) {
    const Budget budget = budget_fraction(ads, fraction);
    const OfflineBenchmark bench = offline_benchmark(ads, budget);
    BenchmarkRow row;
    row.fraction = fraction;
    row.budget = budget.total;
    row.bundle_value = bench.optimal_value;
    row.pct_total_value = pct(bench.optimal_value, total_value);
    row.bundle_clicks = bench.optimal_clicks;
    row.pct_total_clicks =
        pct(static_cast<double>(bench.optimal_clicks),
            static_cast<double>(total_clicks));
    row.lambda_star = bench.lambda_star;
    rows.push_back(row);
  }
  return rows;
}

RunReport cmd_run(const ExperimentConfig& config,
                  const std::vector<Impression>& ads) {
  require_run_config(config);
  double b_max = 0.0;
  for (const auto& ad : ads) b_max = std::max(b_max, ad.paying_price);

  SimulateOptions options;
  options.reveal_losing_price = config.reveal_losing_price;

  RunReport report;
  for (double fraction : config.fractions) {
    const Budget budget = budget_fraction(ads, fraction);
    const OfflineBenchmark bench = offline_benchmark(ads, budget);
    for (const auto& strategy : config.strategies) {
      std::vector<double> values, pcts, clicks, pct_clicks, lambda_hats;
      bool warned = false;
      for (std::uint64_t seed : config.seeds) {
        auto policy = make_policy(strategy, config.epsilon);
        if (auto* osla = dynamic_cast<OslaPolicy*>(policy.get())) {
          osla->set_price_bound_hint(b_max);
        }
        const auto stream = permute_stream(ads, seed);
        const SimulationResult sim =
            simulate(*policy, stream, budget, seed, options);

        RunRow row;
        row.strategy = strategy.label();
        row.fraction = fraction;
        row.seed = seed;
        row.value = sim.total_value;
        row.pct_benchmark = pct(sim.total_value, bench.optimal_value);
        row.clicks = sim.clicks;
        row.pct_benchmark_clicks =
            pct(static_cast<double>(sim.clicks),
                static_cast<double>(bench.optimal_clicks));
        row.spend = sim.total_spend;
        row.wins = sim.wins;
        row.lambda_hat = kNaN;
        row.lambda_star = bench.lambda_star;
        row.exceeds_benchmark = row.pct_benchmark > 100.0;
        if (auto* osla = dynamic_cast<OslaPolicy*>(policy.get())) {
          row.lambda_hat = osla->learned_lambda().value_or(kNaN);
          if (osla->feasibility_warning() && !warned) {
            warned = true;
            report.warnings.push_back(
                strategy.label() + " fraction " + fmt(fraction) +
                ": budget below the one-shot learning feasibility bound "
                "(training may be unreliable)");
          }
        }
        report.rows.push_back(row);

        values.push_back(row.value);
        pcts.push_back(row.pct_benchmark);
        clicks.push_back(static_cast<double>(row.clicks));
        pct_clicks.push_back(row.pct_benchmark_clicks);
        if (!std::isnan(row.lambda_hat)) lambda_hats.push_back(row.lambda_hat);
      }
      RunSummaryRow sum;
      sum.strategy = strategy.label();
      sum.fraction = fraction;
      sum.value_mean = mean_of(values);
      sum.value_std = stddev_of(values);
      sum.pct_mean = mean_of(pcts);
      sum.pct_std = stddev_of(pcts);
      sum.clicks_mean = mean_of(clicks);
      sum.pct_clicks_mean = mean_of(pct_clicks);
      sum.lambda_hat_mean =
          lambda_hats.empty() ? kNaN : mean_of(lambda_hats);
      sum.lambda_star = bench.lambda_star;
      report.summary.push_back(sum);
    }
  }
  return report;
}

std::vector<CompareRow> cmd_compare(const ExperimentConfig& config,
                                    const std::vector<Impression>& ads,
                                    RunReport* run_report) {
  if (config.baseline.empty()) {
    throw ConfigError("--baseline is required for compare");
  }
  const auto matches = [&](const StrategySpec& s) {
    return s.label() == config.baseline || s.name == config.baseline;
  };
  if (std::find_if(config.strategies.begin(), config.strategies.end(),
                   matches) == config.strategies.end()) {
    throw ConfigError("baseline '" + config.baseline +
                      "' is not in the strategy list");
  }
  const RunReport report = cmd_run(config, ads);
  std::vector<CompareRow> rows;
  for (double fraction : config.fractions) {
    double baseline_value = 0.0;
    for (const auto& sum : report.summary) {
      if (sum.fraction == fraction) {
        for (const auto& s : config.strategies) {
          if (matches(s) && s.label() == sum.strategy) {
            baseline_value = sum.value_mean;
          }
        }
      }
    }
    for (const auto& sum : report.summary) {
      if (sum.fraction != fraction) continue;
      CompareRow row;
      row.fraction = fraction;
      row.strategy = sum.strategy;
      row.pct_benchmark_mean = sum.pct_mean;
      row.ratio_vs_baseline_pct = pct(sum.value_mean, baseline_value);
      rows.push_back(row);
    }
  }
  if (run_report) *run_report = report;
  return rows;
}

void cmd_generate(const std::string& spec_path, const std::string& out_path) {
  const SyntheticSpec spec = parse_synthetic_spec(spec_path);
  write_processed_csv(generate_synthetic(spec), out_path);
}

void write_benchmark_report(const std::vector<BenchmarkRow>& rows,
                            const ExperimentConfig& config) {
  auto csv = open_out(config, "benchmark.csv");
  csv << "fraction,budget,bundle_value,pct_total_value,bundle_clicks,"
         "pct_total_clicks,lambda_star\n";
  for (const auto& r : rows) {
    csv << fmt(r.fraction) << ',' << fmt(r.budget) << ','
        << fmt(r.bundle_value) << ',' << fmt(r.pct_total_value) << ','
        << r.bundle_clicks << ',' << fmt(r.pct_total_clicks) << ','
        << fmt(r.lambda_star) << '\n';
  }
  if (!config.markdown) return;
  auto md = open_out(config, "benchmark.md");
  md << "| Fraction | Bundle value | % of total value | Bundle clicks | % of "
        "total clicks | lambda* |\n";
  md << "|---|---|---|---|---|---|\n";
  for (const auto& r : rows) {
    md << "| " << fmt(r.fraction) << " | " << fmt(r.bundle_value) << " | "
       << fmt(r.pct_total_value) << "% | " << r.bundle_clicks << " | "
       << fmt(r.pct_total_clicks) << "% | " << fmt(r.lambda_star) << " |\n";
  }
}

void write_run_report(const RunReport& report,
                      const ExperimentConfig& config) {
  auto csv = open_out(config, "run.csv");
  csv << "strategy,fraction,seed,value,pct_benchmark,clicks,"
         "pct_benchmark_clicks,spend,wins,lambda_hat,lambda_star,"
         "exceeds_benchmark\n";
  for (const auto& r : report.rows) {
    csv << r.strategy << ',' << fmt(r.fraction) << ',' << r.seed << ','
        << fmt(r.value) << ',' << fmt(r.pct_benchmark) << ',' << r.clicks
        << ',' << fmt(r.pct_benchmark_clicks) << ',' << fmt(r.spend) << ','
        << r.wins << ',' << fmt(r.lambda_hat) << ',' << fmt(r.lambda_star)
        << ',' << (r.exceeds_benchmark ? 1 : 0) << '\n';
  }
  auto sum = open_out(config, "run_summary.csv");
  sum << "strategy,fraction,value_mean,value_std,pct_mean,pct_std,"
         "clicks_mean,pct_clicks_mean,lambda_hat_mean,lambda_star\n";
  for (const auto& r : report.summary) {
    sum << r.strategy << ',' << fmt(r.fraction) << ',' << fmt(r.value_mean)
        << ',' << fmt(r.value_std) << ',' << fmt(r.pct_mean) << ','
        << fmt(r.pct_std) << ',' << fmt(r.clicks_mean) << ','
        << fmt(r.pct_clicks_mean) << ',' << fmt(r.lambda_hat_mean) << ','
        << fmt(r.lambda_star) << '\n';
  }
  if (!config.markdown) return;
  auto md = open_out(config, "run_summary.md");
  md << "| Strategy | Fraction | Value | % of optimal bundle | lambda^ | "
        "lambda* |\n";
  md << "|---|---|---|---|---|---|\n";
  for (const auto& r : report.summary) {
    md << "| " << r.strategy << " | " << fmt(r.fraction) << " | "
       << fmt(r.value_mean) << " | " << fmt(r.pct_mean) << "% | "
       << fmt(r.lambda_hat_mean) << " | " << fmt(r.lambda_star) << " |\n";
  }
}

void write_compare_report(const std::vector<CompareRow>& rows,
                          const ExperimentConfig& config) {
  auto csv = open_out(config, "compare.csv");
  csv << "fraction,strategy,pct_benchmark_mean,ratio_vs_baseline_pct\n";
  for (const auto& r : rows) {
    csv << fmt(r.fraction) << ',' << r.strategy << ','
        << fmt(r.pct_benchmark_mean) << ',' << fmt(r.ratio_vs_baseline_pct)
        << '\n';
  }
  if (!config.markdown) return;
  auto md = open_out(config, "compare.md");
  md << "| Fraction | Strategy | % of optimal bundle | Ratio vs baseline "
        "|\n";
  md << "|---|---|---|---|\n";
  for (const auto& r : rows) {
    md << "| " << fmt(r.fraction) << " | " << r.strategy << " | "
       << fmt(r.pct_benchmark_mean) << "% | " << fmt(r.ratio_vs_baseline_pct)
       << "% |\n";
  }
}

} // namespace knapbid
