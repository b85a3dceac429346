#include "knapbid/knapsack.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

namespace knapbid {
namespace {

constexpr std::size_t kEnumerationCap = 25;   // 2^25 subsets at most
constexpr std::size_t kDpCellCap = 50'000'000; // n * (capacity+1) bound

bool prices_integral(const std::vector<Impression>& ads) {
  for (const auto& ad : ads) {
    if (std::abs(ad.paying_price - std::round(ad.paying_price)) > kMoneyTol) {
      return false;
    }
  }
  return true;
}

IntegerSolution solve_by_enumeration(const std::vector<Impression>& ranked,
                                     double budget) {
  const std::size_t n = ranked.size();
  const std::uint32_t full = static_cast<std::uint32_t>(1u << n);
  double best_value = 0.0;
  std::uint32_t best_mask = 0;
  for (std::uint32_t mask = 0; mask < full; ++mask) {
    double cost = 0.0;
    double value = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) {
        cost += ranked[i].paying_price;
        value += ranked[i].value;
      }
    }
    if (cost <= budget + kMoneyTol && value > best_value) {
      best_value = value;
      best_mask = mask;
    }
  }
  IntegerSolution out;
  out.objective = best_value;
  for (std::size_t i = 0; i < n; ++i) {
    if (best_mask & (1u << i)) out.selected_ids.push_back(ranked[i].id);
  }
  return out;
}

IntegerSolution solve_by_dp(const std::vector<Impression>& ranked,
                            double budget) {
  const std::size_t n = ranked.size();
  const std::size_t capacity =
      static_cast<std::size_t>(std::floor(budget + kMoneyTol));
  std::vector<double> best(capacity + 1, 0.0);
  // taken[i * (capacity+1) + w] records whether item i is taken at weight w.
  std::vector<char> taken(n * (capacity + 1), 0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto weight =
        static_cast<std::size_t>(std::llround(ranked[i].paying_price));
    const double value = ranked[i].value;
    char* row = taken.data() + i * (capacity + 1);
    if (weight == 0) {
      // Free items are always worth taking (value >= 0).
      for (std::size_t w = 0; w <= capacity; ++w) {
        best[w] += value;
        row[w] = 1;
      }
      continue;
    }
    for (std::size_t w = capacity + 1; w-- > weight;) {
      const double candidate = best[w - weight] + value;
      if (candidate > best[w]) {
        best[w] = candidate;
        row[w] = 1;
      }
    }
  }
  IntegerSolution out;
  out.objective = best[capacity];
  std::size_t w = capacity;
  std::vector<std::size_t> picked;
  for (std::size_t i = n; i-- > 0;) {
    if (taken[i * (capacity + 1) + w]) {
      picked.push_back(i);
      w -= static_cast<std::size_t>(std::llround(ranked[i].paying_price));
    }
  }
  std::reverse(picked.begin(), picked.end());
  for (std::size_t i : picked) out.selected_ids.push_back(ranked[i].id);
  return out;
}

} // namespace

std::vector<Impression> rank_by_ratio(std::vector<Impression> ads) {
  std::stable_sort(ads.begin(), ads.end(), ratio_order_before);
  return ads;
}

FractionalSelection solve_fractional(const std::vector<Impression>& ads,
                                     const Budget& budget) {
  const std::vector<Impression> ranked = rank_by_ratio(ads);
  FractionalSelection out;
  out.fractions.reserve(ranked.size());
  double remaining = budget.total;
  bool exhausted = false;
  for (const auto& ad : ranked) {
    if (exhausted) {
      out.fractions.emplace(ad.id, 0.0);
      continue;
    }
    if (ad.paying_price == 0.0) {
      out.fractions.emplace(ad.id, 1.0);
      out.objective += ad.value;
      continue;
    }
    if (ad.paying_price <= remaining + kMoneyTol) {
      out.fractions.emplace(ad.id, 1.0);
      out.objective += ad.value;
      out.spend += ad.paying_price;
      remaining -= ad.paying_price;
      continue;
    }
    // First ad that does not fully fit: the marginal ad.
    const double fraction = std::max(remaining, 0.0) / ad.paying_price;
    out.fractions.emplace(ad.id, fraction);
    out.objective += fraction * ad.value;
    out.spend += fraction * ad.paying_price;
    out.marginal_id = ad.id;
    out.lambda_star = ad.value / ad.paying_price;
    remaining = 0.0;
    exhausted = true;
  }
  return out;
}

IntegerSolution solve_integer_exact(const std::vector<Impression>& ads,
                                    const Budget& budget) {
  const std::vector<Impression> ranked = rank_by_ratio(ads);
  if (prices_integral(ranked)) {
    const std::size_t capacity =
        static_cast<std::size_t>(std::floor(budget.total + kMoneyTol));
    if (ranked.size() * (capacity + 1) <= kDpCellCap) {
      return solve_by_dp(ranked, budget.total);
    }
  }
  if (ranked.size() <= kEnumerationCap) {
    return solve_by_enumeration(ranked, budget.total);
  }
  throw InstanceTooLargeError(
      "solve_integer_exact: instance exceeds oracle bounds (" +
      std::to_string(ranked.size()) + " ads, non-integral or large budget)");
}

GapBound gap_bound_check(const std::vector<Impression>& ads,
                         const Budget& budget) {
  const FractionalSelection lp = solve_fractional(ads, budget);
  if (!lp.marginal_id.has_value()) {
    return GapBound{0.0, 0.0, true};
  }
  const Impression* marginal = nullptr;
  for (const auto& ad : ads) {
    if (ad.id == *lp.marginal_id) {
      marginal = &ad;
      break;
    }
  }
  const double x_j = lp.fraction_of(*lp.marginal_id);
  const double reduced = budget.total - marginal->paying_price * x_j;
  const double z_full = solve_integer_exact(ads, budget).objective;
  const double z_reduced =
      solve_integer_exact(ads, Budget(std::max(reduced, 0.0))).objective;
  GapBound out;
  out.lhs = z_full - z_reduced;
  out.rhs = marginal->value;
  out.holds = out.lhs <= out.rhs + kMoneyTol;
  return out;
}

} // namespace knapbid
