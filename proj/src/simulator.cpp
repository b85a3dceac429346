#include "knapbid/simulator.hpp"

#include <algorithm>
#include <fstream>

#include "knapbid/knapsack.hpp"
#include "knapbid/rng.hpp"

namespace knapbid {

AuctionOutcome run_auction(double bid, const Impression& impression) {
  AuctionOutcome out;
  out.won = bid >= impression.paying_price;
  if (out.won) {
    out.paid = impression.paying_price;
    out.value_collected = impression.value;
    out.clicked = impression.clicked;
  }
  return out;
}

std::vector<Impression> permute_stream(std::vector<Impression> ads,
                                       std::uint64_t seed) {
  Rng rng(seed);
  for (std::size_t i = ads.size(); i > 1; --i) {
    const std::size_t j = rng.uniform_below(i);
    std::swap(ads[i - 1], ads[j]);
  }
  return ads;
}

SimulationResult simulate(BidPolicy& policy,
                          const std::vector<Impression>& stream,
                          const Budget& budget, std::uint64_t seed,
                          const SimulateOptions& options) {
  SimulationResult result;
  result.seed = seed;
  policy.begin(budget.total, stream.size(), seed);

  std::vector<AuctionRecord> history;
  history.reserve(stream.size());
  if (options.record_trace) result.trace.reserve(stream.size());

  double remaining = budget.total;
  for (std::size_t t = 1; t <= stream.size(); ++t) {
    const Impression& imp = stream[t - 1];
    BidContext ctx;
    ctx.value = imp.value;
    ctx.remaining_budget = remaining;
    ctx.time_index = t;
    ctx.horizon = stream.size();
    ctx.history = std::span<const AuctionRecord>(history);

    double bid = 0.0;
    try {
      bid = policy.bid(ctx);
    } catch (const std::exception& e) {
      throw SimulationError("policy failed at step " + std::to_string(t) +
                            ": " + e.what());
    }
    // Final safety clamp; policies are expected to clamp themselves.
    bid = std::max(0.0, std::min(bid, remaining));

    const AuctionOutcome outcome = run_auction(bid, imp);
    remaining -= outcome.paid;
    result.total_spend += outcome.paid;
    result.total_value += outcome.value_collected;
    if (outcome.won) {
      ++result.wins;
      if (outcome.clicked.value_or(false)) ++result.clicks;
    }

    std::optional<double> price_seen;
    if (outcome.won || options.reveal_losing_price) {
      price_seen = imp.paying_price;
    }
    history.push_back(
        AuctionRecord{imp.value, price_seen, outcome.won, outcome.paid});
    try {
      policy.observe(ctx, outcome, price_seen);
    } catch (const std::exception& e) {
      throw SimulationError("policy observe failed at step " +
                            std::to_string(t) + ": " + e.what());
    }

    if (options.record_trace) {
      result.trace.push_back(TraceRow{t, imp.value, imp.paying_price, bid,
                                      outcome.won, outcome.paid, remaining});
    }
  }
  return result;
}

OfflineBenchmark offline_benchmark(const std::vector<Impression>& ads,
                                   const Budget& budget) {
  const FractionalSelection lp = solve_fractional(ads, budget);
  OfflineBenchmark out;
  out.lambda_star = lp.lambda_star;
  for (const auto& ad : ads) {
    if (lp.fraction_of(ad.id) == 1.0) {
      out.optimal_value += ad.value;
      out.bundle_spend += ad.paying_price;
      if (ad.clicked.value_or(false)) ++out.optimal_clicks;
    }
  }
  return out;
}

void write_trace_csv(const SimulationResult& result, const std::string& path) {
  std::ofstream file(path);
  if (!file) throw Error("cannot open trace file for writing: " + path);
  file << "step,value,paying_price,bid,won,paid,remaining_budget\n";
  char line[256];
  for (const auto& row : result.trace) {
    std::snprintf(line, sizeof(line), "%zu,%.12g,%.12g,%.12g,%d,%.12g,%.12g\n",
                  row.step, row.value, row.paying_price, row.bid,
                  row.won ? 1 : 0, row.paid, row.remaining_budget);
    file << line;
  }
}

} // namespace knapbid
