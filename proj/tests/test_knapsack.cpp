#include <doctest.h>

#include <algorithm>

#include "knapbid/knapsack.hpp"
#include "knapbid/rng.hpp"
#include "oracles.hpp"

using namespace knapbid;

namespace {

Impression imp(std::string id, double value, double price) {
  return Impression{std::move(id), value, price, std::nullopt};
}

} // namespace

TEST_CASE("rank_by_ratio orders by descending value/price") {
  const auto ranked = rank_by_ratio(
      {imp("a", 6, 2), imp("b", 1, 1), imp("c", 4, 2)});
  REQUIRE(ranked.size() == 3);
  CHECK(ranked[0].id == "a"); // 3.0
  CHECK(ranked[1].id == "c"); // 2.0
  CHECK(ranked[2].id == "b"); // 1.0
}

TEST_CASE("rank_by_ratio on empty input") {
  CHECK(rank_by_ratio({}).empty());
}

TEST_CASE("rank_by_ratio puts zero-price ads first") {
  const auto ranked = rank_by_ratio({imp("x", 9, 3), imp("y", 3, 0)});
  CHECK(ranked[0].id == "y");
  CHECK(ranked[1].id == "x");
}

TEST_CASE("rank_by_ratio breaks ratio ties by ascending id") {
  const auto ranked = rank_by_ratio(
      {imp("d", 4, 2), imp("b", 2, 1), imp("a", 6, 3)});
  CHECK(ranked[0].id == "a");
  CHECK(ranked[1].id == "b");
  CHECK(ranked[2].id == "d");
}

TEST_CASE("solve_fractional on the three-ad reference instance") {
  const std::vector<Impression> ads = {imp("a", 6, 2), imp("b", 4, 2),
                                       imp("c", 1, 1)};
  const auto lp = solve_fractional(ads, Budget(3));
  CHECK(lp.fraction_of("a") == doctest::Approx(1.0));
  CHECK(lp.fraction_of("b") == doctest::Approx(0.5));
  CHECK(lp.fraction_of("c") == doctest::Approx(0.0));
  CHECK(lp.lambda_star == doctest::Approx(2.0));
  CHECK(lp.objective == doctest::Approx(8.0));
  CHECK(lp.spend == doctest::Approx(3.0));
  REQUIRE(lp.marginal_id.has_value());
  CHECK(*lp.marginal_id == "b");
  // Independent enumeration route to the LP optimum.
  CHECK(lp.objective == doctest::Approx(oracle::lp_best(ads, 3)));
}

TEST_CASE("solve_fractional with ample budget selects everything") {
  const std::vector<Impression> ads = {imp("a", 6, 2), imp("b", 4, 2),
                                       imp("c", 1, 1)};
  const auto lp = solve_fractional(ads, Budget(100));
  CHECK(lp.lambda_star == 0.0);
  CHECK_FALSE(lp.marginal_id.has_value());
  CHECK(lp.objective == doctest::Approx(11.0));
  for (const auto& ad : ads) CHECK(lp.fraction_of(ad.id) == 1.0);
}

TEST_CASE("solve_fractional single-item fractional fill") {
  const auto lp = solve_fractional({imp("only", 5, 10)}, Budget(4));
  CHECK(lp.fraction_of("only") == doctest::Approx(0.4));
  CHECK(lp.objective == doctest::Approx(2.0));
  CHECK(lp.lambda_star == doctest::Approx(0.5));
  CHECK(lp.objective ==
        doctest::Approx(oracle::lp_best({imp("only", 5, 10)}, 4)));
}

TEST_CASE("solve_fractional zero-price ads selected even at zero budget") {
  const auto lp =
      solve_fractional({imp("free", 3, 0), imp("paid", 9, 3)}, Budget(0));
  CHECK(lp.fraction_of("free") == 1.0);
  CHECK(lp.fraction_of("paid") == 0.0);
  CHECK(lp.spend == doctest::Approx(0.0));
}

TEST_CASE("solve_integer_exact small reference instance") {
  const std::vector<Impression> ads = {imp("a", 6, 2), imp("b", 4, 2),
                                       imp("c", 1, 1)};
  const auto sol = solve_integer_exact(ads, Budget(3));
  CHECK(sol.objective == doctest::Approx(7.0));
  REQUIRE(sol.selected_ids.size() == 2);
  CHECK(std::count(sol.selected_ids.begin(), sol.selected_ids.end(), "a") ==
        1);
  CHECK(std::count(sol.selected_ids.begin(), sol.selected_ids.end(), "c") ==
        1);
  CHECK(sol.objective == doctest::Approx(oracle::integer_best(ads, 3)));
}

TEST_CASE("solve_integer_exact with zero budget") {
  const auto sol = solve_integer_exact({imp("a", 6, 2)}, Budget(0));
  CHECK(sol.objective == 0.0);
  CHECK(sol.selected_ids.empty());
}

TEST_CASE("solve_integer_exact with symmetric unit items") {
  std::vector<Impression> ads;
  for (int i = 0; i < 5; ++i) ads.push_back(imp("u" + std::to_string(i), 1, 1));
  const auto sol = solve_integer_exact(ads, Budget(3));
  CHECK(sol.objective == doctest::Approx(3.0));
  CHECK(sol.selected_ids.size() == 3);
}

TEST_CASE("solve_integer_exact enumeration path for non-integral prices") {
  const std::vector<Impression> ads = {imp("a", 3, 1.5), imp("b", 4, 2.5),
                                       imp("c", 5, 3.5)};
  const auto sol = solve_integer_exact(ads, Budget(4.0));
  CHECK(sol.objective == doctest::Approx(oracle::integer_best(ads, 4.0)));
}

TEST_CASE("solve_integer_exact rejects oversized instances") {
  std::vector<Impression> ads;
  for (int i = 0; i < 30; ++i) {
    ads.push_back(imp("n" + std::to_string(i), 1.0, 0.5 + 0.001 * i));
  }
  CHECK_THROWS_AS(solve_integer_exact(ads, Budget(5)),
                  InstanceTooLargeError);
}

TEST_CASE("gap_bound_check on the reference instance") {
  const std::vector<Impression> ads = {imp("a", 6, 2), imp("b", 4, 2),
                                       imp("c", 1, 1)};
  const auto gap = gap_bound_check(ads, Budget(3));
  // Z_IP(3) - Z_IP(3 - 2*0.5) = 7 - 6 = 1, against v_j = 4.
  CHECK(gap.lhs == doctest::Approx(1.0));
  CHECK(gap.rhs == doctest::Approx(4.0));
  CHECK(gap.holds);
}

TEST_CASE("gap_bound_check with ample budget") {
  const auto gap = gap_bound_check({imp("a", 6, 2)}, Budget(10));
  CHECK(gap.lhs == 0.0);
  CHECK(gap.rhs == 0.0);
  CHECK(gap.holds);
}

TEST_CASE("gap bound holds on randomized small instances") {
  Rng rng(20240601);
  for (int trial = 0; trial < 200; ++trial) {
    const auto inst = oracle::random_instance(rng, 12, 0, 15, 60);
    const auto gap = gap_bound_check(inst.ads, inst.budget);
    CHECK(gap.holds);
  }
}

TEST_CASE("LP dominates IP and both solvers match the oracles") {
  Rng rng(777);
  for (int trial = 0; trial < 150; ++trial) {
    const auto inst = oracle::random_instance(rng, 14, 1, 30, 120);
    const auto lp = solve_fractional(inst.ads, inst.budget);
    const auto ip = solve_integer_exact(inst.ads, inst.budget);
    CHECK(ip.objective ==
          doctest::Approx(oracle::integer_best(inst.ads, inst.budget.total)));
    CHECK(lp.objective ==
          doctest::Approx(oracle::lp_best(inst.ads, inst.budget.total)));
    CHECK(lp.objective >= ip.objective - 1e-9);
  }
}

TEST_CASE("fractional solutions have the dual threshold structure") {
  Rng rng(991);
  for (int trial = 0; trial < 200; ++trial) {
    const auto inst = oracle::random_instance(rng, 14, 0, 25, 100);
    const auto lp = solve_fractional(inst.ads, inst.budget);
    std::size_t interior = 0;
    double spend = 0.0;
    for (const auto& ad : inst.ads) {
      const double x = lp.fraction_of(ad.id);
      REQUIRE(x >= 0.0);
      REQUIRE(x <= 1.0);
      if (x > 0.0 && x < 1.0) ++interior;
      spend += x * ad.paying_price;
      if (ad.paying_price == 0.0) {
        CHECK(x == 1.0); // infinite ratio, always selected
        continue;
      }
      const double ratio = ad.value / ad.paying_price;
      if (ratio > lp.lambda_star + 1e-9) CHECK(x == 1.0);
      if (ratio < lp.lambda_star - 1e-9) CHECK(x == 0.0);
    }
    CHECK(interior <= 1);
    CHECK(spend <= inst.budget.total + 1e-9);
    CHECK(spend == doctest::Approx(lp.spend));
  }
}

TEST_CASE("objectives are monotone in the budget") {
  Rng rng(31337);
  for (int trial = 0; trial < 60; ++trial) {
    const auto inst = oracle::random_instance(rng, 10, 1, 20, 80);
    double prev_lp = -1.0;
    double prev_ip = -1.0;
    for (double b = 0.0; b <= inst.budget.total; b += 7.0) {
      const double z_lp = solve_fractional(inst.ads, Budget(b)).objective;
      const double z_ip = solve_integer_exact(inst.ads, Budget(b)).objective;
      CHECK(z_lp >= prev_lp - 1e-9);
      CHECK(z_ip >= prev_ip - 1e-9);
      prev_lp = z_lp;
      prev_ip = z_ip;
    }
  }
}

TEST_CASE("identical inputs give bit-identical solutions") {
  Rng rng(5150);
  const auto inst = oracle::random_instance(rng, 12, 1, 25, 90);
  const auto a = solve_fractional(inst.ads, inst.budget);
  const auto b = solve_fractional(inst.ads, inst.budget);
  CHECK(a.objective == b.objective);
  CHECK(a.spend == b.spend);
  CHECK(a.lambda_star == b.lambda_star);
  CHECK(a.fractions == b.fractions);
  const auto ia = solve_integer_exact(inst.ads, inst.budget);
  const auto ib = solve_integer_exact(inst.ads, inst.budget);
  CHECK(ia.objective == ib.objective);
  CHECK(ia.selected_ids == ib.selected_ids);
}
