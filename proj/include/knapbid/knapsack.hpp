#pragma once

#include <cstddef>
#include <vector>

#include "knapbid/types.hpp"

namespace knapbid {

/// Exact 0/1 selection produced by the integer oracle.
struct IntegerSolution {
  std::vector<std::string> selected_ids; // in ratio-rank order
  double objective = 0.0;
};

/// Result of checking the IP gap bound Z_IP(B) - Z_IP(B - b_j x*_j) <= v_j
/// at the marginal ad j of the fractional solution.
struct GapBound {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = true;
};

/// Sorts ads by value/price ratio, descending. Zero-price ads come first
/// (infinite ratio); ties break by ascending id.
std::vector<Impression> rank_by_ratio(std::vector<Impression> ads);

/// Greedy fractional knapsack solve. Fills ads in ratio order until the
/// budget runs out; the first ad that does not fully fit becomes the
/// marginal ad and its ratio becomes lambda_star. With ample budget all
/// fractions are 1 and lambda_star is 0.
FractionalSelection solve_fractional(const std::vector<Impression>& ads,
                                     const Budget& budget);

/// Exact integer knapsack oracle for small instances. Uses dynamic
/// programming when prices are integral (and the table is small enough),
/// otherwise subset enumeration up to 25 ads. Throws InstanceTooLargeError
/// beyond those bounds.
IntegerSolution solve_integer_exact(const std::vector<Impression>& ads,
                                    const Budget& budget);

/// Evaluates the gap bound at the marginal ad of solve_fractional:
/// lhs = Z_IP(B) - Z_IP(B - b_j x*_j), rhs = v_j. Returns (0, 0, true)
/// when there is no marginal ad (ample budget).
GapBound gap_bound_check(const std::vector<Impression>& ads,
                         const Budget& budget);

} // namespace knapbid
