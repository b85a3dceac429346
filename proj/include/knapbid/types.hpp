#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace knapbid {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Exact oracle refused the instance (too many ads / non-integral prices).
class InstanceTooLargeError : public Error {
public:
  using Error::Error;
};

/// A selector handed to an adapter violates its monotonicity/limit contract.
class SelectorContractError : public Error {
public:
  using Error::Error;
};

/// Input file could not be parsed.
class ParseError : public Error {
public:
  using Error::Error;
};

/// Invalid synthetic-stream or experiment configuration.
class ConfigError : public Error {
public:
  using Error::Error;
};

/// A policy failed mid-simulation; message carries the step index.
class SimulationError : public Error {
public:
  using Error::Error;
};

/// One ad opportunity: the value we assign to winning it and the
/// second-price amount we would pay if we win.
struct Impression {
  std::string id;
  double value = 0.0;        // eKPI-style value, >= 0
  double paying_price = 0.0; // currency units, >= 0
  std::optional<bool> clicked;
};

/// Total budget for a campaign / simulation run.
struct Budget {
  double total = 0.0;

  Budget() = default;
  explicit Budget(double t) : total(t) {
    if (!(t >= 0.0)) {
      throw ConfigError("Budget.total must be non-negative");
    }
  }
};

/// Solution of the fractional (LP-relaxed) selection problem.
///
/// At most one id carries a fraction strictly inside (0,1); `lambda_star`
/// is the value-to-price ratio of the marginal ad (0 when the budget is
/// ample), and every ad with ratio strictly above/below the threshold is
/// fully selected / rejected.
struct FractionalSelection {
  std::unordered_map<std::string, double> fractions;
  double lambda_star = 0.0;
  std::optional<std::string> marginal_id;
  double objective = 0.0;
  double spend = 0.0;

  double fraction_of(const std::string& id) const {
    auto it = fractions.find(id);
    return it == fractions.end() ? 0.0 : it->second;
  }
};

/// Absolute tolerance for budget/objective comparisons on desk-scale
/// (magnitude <= 1e6) monetary quantities.
inline constexpr double kMoneyTol = 1e-9;

/// Compares value/price ratios without dividing, treating price == 0 as
/// infinite ratio. Returns <0, 0, >0 like a three-way comparison of
/// (va/ba) vs (vb/bb).
inline int compare_ratio(double va, double ba, double vb, double bb) {
  const bool inf_a = ba == 0.0;
  const bool inf_b = bb == 0.0;
  if (inf_a || inf_b) {
    if (inf_a && inf_b) return 0;
    return inf_a ? 1 : -1;
  }
  const double lhs = va * bb;
  const double rhs = vb * ba;
  if (lhs > rhs) return 1;
  if (lhs < rhs) return -1;
  return 0;
}

/// Ordering used everywhere a ratio ranking is needed: descending ratio,
/// ties broken by ascending id so results are deterministic.
inline bool ratio_order_before(const Impression& a, const Impression& b) {
  const int c = compare_ratio(a.value, a.paying_price, b.value, b.paying_price);
  if (c != 0) return c > 0;
  return a.id < b.id;
}

} // namespace knapbid
