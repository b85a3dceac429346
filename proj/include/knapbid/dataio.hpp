#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "knapbid/types.hpp"

namespace knapbid {

/// Marginal distribution for synthetic values/prices.
struct Distribution {
  enum class Kind { uniform, lognormal };
  Kind kind = Kind::uniform;
  double a = 0.0; // uniform: lo,  lognormal: mu
  double b = 1.0; // uniform: hi,  lognormal: sigma
};

/// Logistic link from impression value to click probability.
struct ClickModel {
  double intercept = -10.0;
  double slope = 0.0;

  double probability(double value) const;
};

/// Recipe for a synthetic impression stream. Values and prices are coupled
/// through a Gaussian copula targeting the given Spearman rank correlation.
struct SyntheticSpec {
  std::size_t n = 0;
  Distribution value_dist;
  Distribution price_dist;
  double correlation = 0.0; // rank correlation in [-1, 1]
  ClickModel click_model;
  std::uint64_t seed = 0;
};

/// Table-4-style dataset summary.
struct DatasetSummary {
  std::size_t impressions = 0;
  std::size_t clicks = 0;
  double total_cost = 0.0;
  double ctr = 0.0;
  std::optional<double> ecpc; // empty when there are no clicks
};

/// Draws `spec.n` impressions; deterministic under the spec seed.
std::vector<Impression> generate_synthetic(const SyntheticSpec& spec);

/// Parses `key=value` lines into a SyntheticSpec. Distributions are written
/// uniform(lo,hi) or lognormal(mu,sigma); click model keys are
/// click_intercept / click_slope.
SyntheticSpec parse_synthetic_spec(const std::string& path);

enum class LogFormat { processed, raw_log };

struct RawLogOptions {
  /// Path to a one-value-per-line sidecar aligned with the raw rows;
  /// required for raw logs since values are not part of the exchange log.
  std::string value_sidecar;
  /// When non-empty, keep only rows whose advertiser id column matches.
  std::string advertiser_filter;
};

struct ParseResult {
  std::vector<Impression> impressions;
  std::size_t dropped = 0;  // malformed / missing mandatory fields
  std::size_t filtered = 0; // excluded by the advertiser filter
};

/// Reads an impression log.
///  - processed: CSV with header id,value,paying_price,clicked
///  - raw_log:   24 tab-separated columns; paying price at column 21,
///               advertiser id at column 23, bid id at column 1
/// Malformed rows are dropped and tallied; more than 10% failures aborts.
ParseResult parse_impressions(const std::string& path, LogFormat format,
                              const RawLogOptions& raw_options = {});

/// Writes the processed CSV format (the canonical input format).
void write_processed_csv(const std::vector<Impression>& ads,
                         const std::string& path);

/// Experiment budget: fraction of the total historical spend of the
/// dataset. Fraction must lie in (0, 1].
Budget budget_fraction(const std::vector<Impression>& ads, double fraction);

DatasetSummary summarize(const std::vector<Impression>& ads);

} // namespace knapbid
