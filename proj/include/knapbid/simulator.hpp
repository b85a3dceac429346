#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "knapbid/strategies.hpp"
#include "knapbid/types.hpp"

namespace knapbid {

/// One per-step entry of a simulation trace, exportable as CSV.
struct TraceRow {
  std::size_t step = 0; // 1-based
  double value = 0.0;
  double paying_price = 0.0;
  double bid = 0.0;
  bool won = false;
  double paid = 0.0;
  double remaining_budget = 0.0;
};

/// Aggregates of one simulation run.
struct SimulationResult {
  double total_value = 0.0;
  double total_spend = 0.0;
  std::size_t wins = 0;
  std::size_t clicks = 0;
  std::vector<TraceRow> trace; // filled only when requested
  std::uint64_t seed = 0;
};

struct SimulateOptions {
  /// When set, the paying price of lost auctions is appended to the
  /// policy-visible history as well (won prices are always visible).
  bool reveal_losing_price = false;
  bool record_trace = false;
};

/// Resolves one second-price auction: the bid wins iff it is at least the
/// paying price (ties win), and the winner pays exactly the paying price.
AuctionOutcome run_auction(double bid, const Impression& impression);

/// Uniformly random permutation of the stream (Fisher-Yates over a seeded
/// generator). Value/price pairs travel together.
std::vector<Impression> permute_stream(std::vector<Impression> ads,
                                       std::uint64_t seed);

/// Runs the sequential bidding loop: for each arrival the policy produces a
/// bid (clamped to the remaining budget as a final safety), the auction is
/// resolved, budget and history are updated, and the outcome is fed back to
/// the policy. `seed` seeds the policy's internal randomness.
SimulationResult simulate(BidPolicy& policy,
                          const std::vector<Impression>& stream,
                          const Budget& budget, std::uint64_t seed,
                          const SimulateOptions& options = {});

/// Offline optimum used as the benchmark "optimal bundle": value, clicks
/// and threshold of the fully-selected ads of the fractional solution
/// (the marginal ad is excluded, so the bundle is integral).
struct OfflineBenchmark {
  double optimal_value = 0.0;
  double lambda_star = 0.0;
  std::size_t optimal_clicks = 0;
  double bundle_spend = 0.0;
};

OfflineBenchmark offline_benchmark(const std::vector<Impression>& ads,
                                   const Budget& budget);

/// Writes the per-step trace as CSV (step,value,paying_price,bid,won,paid,
/// remaining_budget).
void write_trace_csv(const SimulationResult& result, const std::string& path);

} // namespace knapbid
