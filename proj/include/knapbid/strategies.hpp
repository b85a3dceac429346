#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "knapbid/rng.hpp"
#include "knapbid/types.hpp"

namespace knapbid {

/// Result of one resolved auction, as seen by the bidder.
struct AuctionOutcome {
  bool won = false;
  double paid = 0.0;
  double value_collected = 0.0;
  std::optional<bool> clicked;
};

/// One entry of the bidder-visible history. `paying_price` is present when
/// the auction was won, or when the simulator was configured to reveal
/// losing prices.
struct AuctionRecord {
  double value = 0.0;
  std::optional<double> paying_price;
  bool won = false;
  double paid = 0.0;
};

/// Everything a policy may look at when producing a bid.
struct BidContext {
  double value = 0.0;            // v_t
  double remaining_budget = 0.0; // B_t
  std::size_t time_index = 1;    // t, 1-based
  std::size_t horizon = 0;       // N
  std::span<const AuctionRecord> history;
};

/// Interface shared by every bidding policy. A policy instance carries
/// per-run mutable state; `begin` resets it for a fresh simulation.
class BidPolicy {
public:
  virtual ~BidPolicy() = default;

  virtual void begin(double total_budget, std::size_t horizon,
                     std::uint64_t seed) {
    (void)total_budget;
    (void)horizon;
    (void)seed;
  }

  virtual double bid(const BidContext& ctx) = 0;

  /// Feedback after the auction resolves. `paying_price` is the market
  /// price when known to the bidder (always on a win, on a loss only if
  /// the platform reveals it).
  virtual void observe(const BidContext& ctx, const AuctionOutcome& outcome,
                       std::optional<double> paying_price) {
    (void)ctx;
    (void)outcome;
    (void)paying_price;
  }
};

/// Scaled linear bid: min(value / lambda, remaining budget).
double linear_bid(double lambda, const BidContext& ctx);

/// Bids value/lambda (budget-clamped) with a fixed threshold lambda > 0.
/// Under the second-price rule this wins exactly the ads whose
/// value-to-price ratio exceeds lambda, prices unseen.
class LinearBidPolicy : public BidPolicy {
public:
  explicit LinearBidPolicy(double lambda);

  double bid(const BidContext& ctx) override;
  double lambda() const { return lambda_; }

private:
  double lambda_;
};

/// Deterministic selection rule g(v_t, b, B_t, H_t): the underlying online
/// knapsack algorithm selects the ad iff g evaluated at the true price is
/// <= 0. g must be continuous and increasing in the price argument, with
/// g(0) <= 0 and g eventually positive. `closed_form`, when provided,
/// returns sup{b : g <= 0} directly and skips the bisection.
struct DeterministicSelector {
  std::function<double(double price, const BidContext&)> g;
  std::function<double(const BidContext&)> closed_form;
};

/// Probabilistic selection rule p(v_t, b, B_t, H_t): the underlying
/// algorithm selects the ad with probability p at the true price. p must be
/// right-continuous and decreasing in the price argument, with limits 1 at
/// 0+ and 0 at infinity.
struct ProbabilisticSelector {
  std::function<double(double price, const BidContext&)> p;
};

/// Upper end of the bid search bracket: max(remaining budget,
/// 10 x largest price seen in the history).
double bid_cap_estimate(const BidContext& ctx);

/// Turns a deterministic selection rule into a bid: bid the largest price
/// at which the rule would still select. Winning at the unknown true price
/// then coincides exactly with offline selection.
double adapt_deterministic(const DeterministicSelector& selector,
                           const BidContext& ctx);

/// Turns a probabilistic selection rule into a randomized bid via CDF
/// inversion of F(b) = 1 - p(b) at the given uniform draw. The win
/// probability at any true price b equals p(b).
double adapt_probabilistic(const ProbabilisticSelector& selector,
                           const BidContext& ctx, double uniform_draw);

/// BidPolicy wrapper over a DeterministicSelector.
class DeterministicAdapterPolicy : public BidPolicy {
public:
  explicit DeterministicAdapterPolicy(DeterministicSelector selector)
      : selector_(std::move(selector)) {}

  double bid(const BidContext& ctx) override {
    return adapt_deterministic(selector_, ctx);
  }

private:
  DeterministicSelector selector_;
};

/// BidPolicy wrapper over a ProbabilisticSelector; draws one uniform per
/// arrival from its seeded generator.
class ProbabilisticAdapterPolicy : public BidPolicy {
public:
  explicit ProbabilisticAdapterPolicy(ProbabilisticSelector selector)
      : selector_(std::move(selector)), rng_(0) {}

  void begin(double total_budget, std::size_t horizon,
             std::uint64_t seed) override;
  double bid(const BidContext& ctx) override;

private:
  ProbabilisticSelector selector_;
  Rng rng_;
};

/// Budget required for the one-shot learning feasibility condition
/// B >= 6 b_max log(n/eps) / eps^3.
double osla_required_budget(double b_max, double n, double epsilon);

/// One-shot learning: observe the first epsilon fraction of arrivals
/// (bidding value, capped by an epsilon x B training allowance), fit the
/// dual threshold on the recorded impressions with budget
/// (1-eps) x eps x B, then bid value/lambda for the remainder.
class OslaPolicy : public BidPolicy {
public:
  enum class Phase { training, bidding };

  explicit OslaPolicy(double epsilon);

  /// Optional price-scale hint used only by the warn-only feasibility
  /// check at begin().
  void set_price_bound_hint(double b_max) { price_bound_hint_ = b_max; }

  void begin(double total_budget, std::size_t horizon,
             std::uint64_t seed) override;
  double bid(const BidContext& ctx) override;
  void observe(const BidContext& ctx, const AuctionOutcome& outcome,
               std::optional<double> paying_price) override;

  double epsilon() const { return epsilon_; }
  Phase phase() const { return fitted_ ? Phase::bidding : Phase::training; }
  /// Fitted threshold; empty before the transition or when training was
  /// degenerate. A value of 0 means the fit budget was ample (bid budget).
  std::optional<double> learned_lambda() const { return learned_lambda_; }
  /// True when no training impression with a positive price was observed;
  /// the policy then bids 0 for the rest of the run.
  bool degenerate() const { return fitted_ && !learned_lambda_.has_value(); }
  /// True when begin() found B below the feasibility bound (needs a price
  /// hint). Warn-only: the empirical protocol violates the bound as well.
  bool feasibility_warning() const { return feasibility_warning_; }
  double training_spend() const { return training_spend_; }
  double training_allowance() const { return training_allowance_; }

private:
  void fit();

  double epsilon_;
  std::optional<double> price_bound_hint_;

  double total_budget_ = 0.0;
  std::size_t horizon_ = 0;
  std::size_t training_size_ = 0;
  double training_allowance_ = 0.0;
  double training_spend_ = 0.0;
  double fit_budget_ = 0.0;
  bool feasibility_warning_ = false;
  std::vector<Impression> observed_;
  bool fitted_ = false;
  std::optional<double> learned_lambda_;
};

/// Primal randomized policy: at each arrival solves the budget-scaled
/// fractional selection over the observed ads with the current ad's price
/// as a free variable, reads the current ad's fraction as a selection
/// probability, and inverts that CDF at a uniform draw.
class PrimalRandomizedPolicy : public BidPolicy {
public:
  PrimalRandomizedPolicy() = default;

  void begin(double total_budget, std::size_t horizon,
             std::uint64_t seed) override;
  double bid(const BidContext& ctx) override;
  void observe(const BidContext& ctx, const AuctionOutcome& outcome,
               std::optional<double> paying_price) override;

  /// Fraction the scaled fractional solve assigns to the current ad when
  /// its price is hypothetically `price`. Non-increasing in `price`.
  double selection_fraction(const BidContext& ctx, double price) const;

  /// CDF inversion at a fixed draw: min(B_t, sup{b : x_tilde(b) >= 1-u}).
  double bid_for_draw(const BidContext& ctx, double uniform_draw) const;

private:
  struct Entry {
    double value = 0.0;
    double price = 0.0;
    std::size_t arrival = 0; // 0-based arrival index, tie-break key
  };

  static bool entry_before(const Entry& a, const Entry& b);

  double total_budget_ = 0.0;
  std::size_t horizon_ = 0;
  Rng rng_{0};
  std::vector<Entry> ranked_;      // observed priced ads, ratio order
  std::vector<double> prefix_cost_; // prefix sums over ranked_
  double max_observed_price_ = 0.0;
};

/// Adaptive pacing baseline: bids value/(1+mu) and walks the multiplier by
/// dual descent against a per-period spend target of B/N.
class AdaptivePacingPolicy : public BidPolicy {
public:
  struct Params {
    std::optional<double> step; // default 1/sqrt(N)
    double mu_cap = 1e6;
  };

  AdaptivePacingPolicy() = default;
  explicit AdaptivePacingPolicy(Params params) : params_(params) {}

  void begin(double total_budget, std::size_t horizon,
             std::uint64_t seed) override;
  double bid(const BidContext& ctx) override;
  void observe(const BidContext& ctx, const AuctionOutcome& outcome,
               std::optional<double> paying_price) override;

  double mu() const { return mu_; }
  double step() const { return step_; }
  double target_rate() const { return target_rate_; }

private:
  Params params_;
  double mu_ = 0.0;
  double step_ = 0.0;
  double target_rate_ = 0.0;
};

} // namespace knapbid
