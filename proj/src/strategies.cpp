#include "knapbid/strategies.hpp"

#include <algorithm>
#include <cmath>

#include "knapbid/knapsack.hpp"

namespace knapbid {
namespace {

constexpr int kBisectionIters = 60;

std::string arrival_id(std::size_t arrival) {
  // Zero-padded so lexicographic id order equals arrival order.
  std::string digits = std::to_string(arrival);
  return std::string(12 - std::min<std::size_t>(12, digits.size()), '0') +
         digits;
}

} // namespace

double linear_bid(double lambda, const BidContext& ctx) {
  const double bid = ctx.value / lambda;
  return std::max(0.0, std::min(bid, ctx.remaining_budget));
}

LinearBidPolicy::LinearBidPolicy(double lambda) : lambda_(lambda) {
  if (!(lambda > 0.0)) {
    throw ConfigError("LinearBidPolicy: lambda must be positive");
  }
}

double LinearBidPolicy::bid(const BidContext& ctx) {
  return linear_bid(lambda_, ctx);
}

double bid_cap_estimate(const BidContext& ctx) {
  double max_price = 0.0;
  for (const auto& rec : ctx.history) {
    if (rec.paying_price && *rec.paying_price > max_price) {
      max_price = *rec.paying_price;
    }
  }
  return std::max(ctx.remaining_budget, 10.0 * max_price);
}

double adapt_deterministic(const DeterministicSelector& selector,
                           const BidContext& ctx) {
  if (selector.closed_form) {
    return selector.closed_form(ctx);
  }
  const double at_zero = selector.g(0.0, ctx);
  if (!(at_zero <= 0.0)) {
    throw SelectorContractError(
        "adapt_deterministic: selector rejects a zero price (g(0) > 0)");
  }
  const double cap = bid_cap_estimate(ctx);
  if (cap <= 0.0) return 0.0;
  if (selector.g(cap, ctx) <= 0.0) {
    // Still selecting at the top of the bracket; the supremum is truncated
    // there. A conforming g turns positive eventually, but possibly beyond
    // any price this auction can reach.
    return cap;
  }
  double lo = 0.0;
  double hi = cap;
  for (int i = 0; i < kBisectionIters; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (selector.g(mid, ctx) <= 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  // lo is the largest probed price still selected, so g(bid) <= 0 holds.
  return lo;
}

double adapt_probabilistic(const ProbabilisticSelector& selector,
                           const BidContext& ctx, double uniform_draw) {
  const double cap = bid_cap_estimate(ctx);
  if (cap <= 0.0) return 0.0;
  // F(b) = 1 - p(b); bid sup{b : F(b) <= u}, i.e. sup{b : p(b) >= 1 - u}.
  const double target = 1.0 - uniform_draw;
  const double p_low = selector.p(0.0, ctx);
  const double p_high = selector.p(cap, ctx);
  if (p_low < p_high - 1e-12) {
    throw SelectorContractError(
        "adapt_probabilistic: p increases across the bracket");
  }
  if (p_high >= target) return cap;
  if (p_low < target) return 0.0;
  double lo = 0.0;
  double hi = cap;
  double p_lo = p_low;
  for (int i = 0; i < kBisectionIters; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double p_mid = selector.p(mid, ctx);
    if (p_mid > p_lo + 1e-12) {
      throw SelectorContractError(
          "adapt_probabilistic: p not decreasing at probe point");
    }
    if (p_mid >= target) {
      lo = mid;
      p_lo = p_mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

void ProbabilisticAdapterPolicy::begin(double, std::size_t,
                                       std::uint64_t seed) {
  rng_ = Rng(seed);
}

double ProbabilisticAdapterPolicy::bid(const BidContext& ctx) {
  return adapt_probabilistic(selector_, ctx, rng_.uniform());
}

double osla_required_budget(double b_max, double n, double epsilon) {
  return 6.0 * b_max * std::log(n / epsilon) /
         (epsilon * epsilon * epsilon);
}

OslaPolicy::OslaPolicy(double epsilon) : epsilon_(epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw ConfigError("OslaPolicy: epsilon must lie in (0,1)");
  }
}

void OslaPolicy::begin(double total_budget, std::size_t horizon,
                       std::uint64_t) {
  total_budget_ = total_budget;
  horizon_ = horizon;
  training_size_ = static_cast<std::size_t>(
      std::floor(epsilon_ * static_cast<double>(horizon) + kMoneyTol));
  training_allowance_ = epsilon_ * total_budget;
  training_spend_ = 0.0;
  fit_budget_ = (1.0 - epsilon_) * epsilon_ * total_budget;
  observed_.clear();
  fitted_ = false;
  learned_lambda_.reset();
  feasibility_warning_ =
      price_bound_hint_.has_value() &&
      total_budget < osla_required_budget(*price_bound_hint_,
                                          static_cast<double>(horizon),
                                          epsilon_);
}

double OslaPolicy::bid(const BidContext& ctx) {
  if (ctx.time_index <= training_size_) {
    const double allowance_left =
        std::max(0.0, training_allowance_ - training_spend_);
    return std::min({ctx.value, allowance_left, ctx.remaining_budget});
  }
  if (!fitted_) fit();
  if (!learned_lambda_.has_value()) return 0.0; // degenerate training
  if (*learned_lambda_ == 0.0) {
    // Ample fit budget: every observed ad was affordable, so stay greedy.
    return ctx.remaining_budget;
  }
  return linear_bid(*learned_lambda_, ctx);
}

void OslaPolicy::observe(const BidContext& ctx, const AuctionOutcome& outcome,
                         std::optional<double> paying_price) {
  if (ctx.time_index > training_size_) return;
  training_spend_ += outcome.paid;
  if (paying_price.has_value()) {
    observed_.push_back(Impression{arrival_id(observed_.size()), ctx.value,
                                   *paying_price, std::nullopt});
  }
}

void OslaPolicy::fit() {
  fitted_ = true;
  bool any_positive_price = false;
  for (const auto& imp : observed_) {
    if (imp.paying_price > 0.0) {
      any_positive_price = true;
      break;
    }
  }
  if (!any_positive_price) return; // lambda undefined, stay degenerate
  const FractionalSelection lp =
      solve_fractional(observed_, Budget(fit_budget_));
  learned_lambda_ = lp.lambda_star;
}

bool PrimalRandomizedPolicy::entry_before(const Entry& a, const Entry& b) {
  const int c = compare_ratio(a.value, a.price, b.value, b.price);
  if (c != 0) return c > 0;
  return a.arrival < b.arrival;
}

void PrimalRandomizedPolicy::begin(double total_budget, std::size_t horizon,
                                   std::uint64_t seed) {
  total_budget_ = total_budget;
  horizon_ = horizon;
  rng_ = Rng(seed);
  ranked_.clear();
  prefix_cost_.assign(1, 0.0);
  max_observed_price_ = 0.0;
}

double PrimalRandomizedPolicy::selection_fraction(const BidContext& ctx,
                                                  double price) const {
  const double scale = horizon_ == 0
                           ? 1.0
                           : static_cast<double>(ctx.time_index) /
                                 static_cast<double>(horizon_);
  const double scaled_budget = scale * total_budget_;
  const Entry current{ctx.value, price, ctx.time_index - 1};
  // Ads ranked ahead of the current one are filled first.
  const auto pos = std::lower_bound(ranked_.begin(), ranked_.end(), current,
                                    entry_before);
  const double cost_ahead =
      prefix_cost_[static_cast<std::size_t>(pos - ranked_.begin())];
  if (price == 0.0) return 1.0;
  const double remaining = scaled_budget - cost_ahead;
  if (remaining <= 0.0) return 0.0;
  return std::min(1.0, remaining / price);
}

double PrimalRandomizedPolicy::bid_for_draw(const BidContext& ctx,
                                            double uniform_draw) const {
  const double target = 1.0 - uniform_draw; // select iff x_tilde(b) >= 1-u
  const double cap =
      std::max(ctx.remaining_budget, 10.0 * max_observed_price_);
  if (cap <= 0.0) return 0.0;
  if (selection_fraction(ctx, cap) >= target) {
    return std::min(ctx.remaining_budget, cap);
  }
  double lo = 0.0;
  double hi = cap;
  for (int i = 0; i < kBisectionIters; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (selection_fraction(ctx, mid) >= target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return std::min(ctx.remaining_budget, lo);
}

double PrimalRandomizedPolicy::bid(const BidContext& ctx) {
  return bid_for_draw(ctx, rng_.uniform());
}

void PrimalRandomizedPolicy::observe(const BidContext& ctx,
                                     const AuctionOutcome&,
                                     std::optional<double> paying_price) {
  if (!paying_price.has_value()) return;
  const Entry entry{ctx.value, *paying_price, ctx.time_index - 1};
  const auto pos =
      std::upper_bound(ranked_.begin(), ranked_.end(), entry, entry_before);
  ranked_.insert(pos, entry);
  prefix_cost_.resize(ranked_.size() + 1);
  prefix_cost_[0] = 0.0;
  for (std::size_t i = 0; i < ranked_.size(); ++i) {
    prefix_cost_[i + 1] = prefix_cost_[i] + ranked_[i].price;
  }
  max_observed_price_ = std::max(max_observed_price_, entry.price);
}

void AdaptivePacingPolicy::begin(double total_budget, std::size_t horizon,
                                 std::uint64_t) {
  mu_ = 0.0;
  step_ = params_.step.value_or(
      horizon > 0 ? 1.0 / std::sqrt(static_cast<double>(horizon)) : 1.0);
  target_rate_ =
      horizon > 0 ? total_budget / static_cast<double>(horizon) : 0.0;
}

double AdaptivePacingPolicy::bid(const BidContext& ctx) {
  return std::max(0.0,
                  std::min(ctx.value / (1.0 + mu_), ctx.remaining_budget));
}

void AdaptivePacingPolicy::observe(const BidContext&,
                                   const AuctionOutcome& outcome,
                                   std::optional<double>) {
  mu_ = std::clamp(mu_ - step_ * (target_rate_ - outcome.paid), 0.0,
                   params_.mu_cap);
}

} // namespace knapbid
