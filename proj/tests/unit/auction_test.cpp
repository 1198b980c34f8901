#include <gtest/gtest.h>

#include "mmwave/auction.hpp"
#include "test_support.hpp"

using namespace mmwave;
using testing_support::dp_optimum;
using testing_support::random_instance;

TEST(CentralAuction, SingleClientTakesBetterRelay) {
  AsymmetricInstance inst(1, {{{0, 7.0}}}, {3.0});
  const auto r = solve_centralized(inst, {0.1});
  EXPECT_EQ(r.assignment[0], std::optional<std::size_t>(0));
  EXPECT_DOUBLE_EQ(r.prices.prices[0], 7.0 - 3.0 + 0.1);
  EXPECT_EQ(r.stats.bids, 1u);
}

TEST(CentralAuction, ContestedRelayGoesToLargerGain) {
  // Both clients want relay 0; client 1 gains more from it.
  AsymmetricInstance inst(1, {{{0, 6.0}}, {{0, 9.0}}}, {5.0, 2.0});
  const auto r = solve_centralized(inst, {0.01});
  EXPECT_EQ(r.assignment[1], std::optional<std::size_t>(0));
  EXPECT_EQ(r.assignment[0], std::optional<std::size_t>(inst.virtual_object(0)));
  EXPECT_GE(r.stats.evictions, 0u);
}

TEST(CentralAuction, WithinMEpsilonOfOptimum) {
  for (std::uint64_t seed = 1; seed <= 150; ++seed) {
    const auto inst = random_instance(seed);
    for (double eps : {0.01, 0.1, 0.5}) {
      const auto r = solve_centralized(inst, {eps});
      ASSERT_NO_THROW(inst.validate(r.assignment));
      const double opt = dp_optimum(inst);
      const double got = inst.objective(r.assignment);
      EXPECT_LE(got, opt + 1e-9) << seed;
      EXPECT_GE(got, opt - static_cast<double>(inst.num_clients()) * eps - 1e-9) << seed;
      const auto cs = check_eps_cs(inst, r.assignment, r.prices, eps);
      EXPECT_TRUE(cs.ok) << seed << " " << cs.detail;
    }
  }
}

TEST(CentralAuction, ExactOnIntegerBenefits) {
  for (std::uint64_t seed = 1; seed <= 150; ++seed) {
    const auto inst = random_instance(seed, {.integer = true});
    const double eps = 0.99 / static_cast<double>(inst.num_clients());
    const auto r = solve_centralized(inst, {eps});
    EXPECT_EQ(inst.objective(r.assignment), dp_optimum(inst)) << seed;
  }
}

TEST(CentralAuction, BidCountWithinBound) {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto inst = random_instance(seed);
    const double eps = 0.1;
    const auto r = solve_centralized(inst, {eps});
    const double n = static_cast<double>(inst.num_objects());
    const double bound = static_cast<double>(inst.num_clients()) * n * n * std::ceil(inst.delta() / eps);
    EXPECT_LE(static_cast<double>(r.stats.bids), std::max(bound, n)) << seed;
  }
}

TEST(CentralAuction, IterationLimit) {
  const auto inst = random_instance(3, {.max_clients = 20, .max_relays = 10, .arc_probability = 0.9});
  AuctionConfig cfg{1e-4};
  cfg.max_iterations = 2;
  EXPECT_THROW(solve_centralized(inst, cfg), IterationLimitError);
}

TEST(CentralAuction, RejectsBadEpsilon) {
  AsymmetricInstance inst(0, {{}}, {1.0});
  EXPECT_THROW(solve_centralized(inst, {0.0}), DomainError);
  EXPECT_THROW(solve_centralized(inst, {-1.0}), DomainError);
  EXPECT_THROW(solve_centralized(inst, {std::nan("")}), DomainError);
}

TEST(CentralAuction, TraceRecordsEveryBid) {
  const auto inst = random_instance(9);
  AuctionConfig cfg{0.1};
  cfg.record_trace = true;
  const auto r = solve_centralized(inst, cfg);
  std::size_t bids = 0;
  for (const auto& row : r.trace) bids += row.action == "bid";
  EXPECT_EQ(bids, r.stats.bids);
}

TEST(EpsCs, DetectsEachCondition) {
  AsymmetricInstance inst(1, {{{0, 7.0}}, {{0, 6.0}}}, {3.0, 2.0});
  ObjectAssignment y{0, inst.virtual_object(1)};
  PriceState ps;
  ps.prices = {4.0, 0.0, 0.0};
  ps.profits = {3.0, 2.0};
  EXPECT_TRUE(check_eps_cs(inst, y, ps, 0.1).ok);

  auto low = ps;
  low.profits[1] = 1.0;  // client 1 could take relay 0 with profit 2
  auto r = check_eps_cs(inst, y, low, 0.1);
  EXPECT_FALSE(r.ok);

  auto unequal = ps;
  unequal.profits[0] = 3.5;
  r = check_eps_cs(inst, y, unequal, 0.1);
  EXPECT_FALSE(r.ok);
  EXPECT_EQ(r.condition, 2);

  // Unassigned virtual object of client 0 priced above lambda.
  auto stale = ps;
  stale.prices[1] = 1.0;
  r = check_eps_cs(inst, y, stale, 0.1);
  EXPECT_FALSE(r.ok);
  EXPECT_EQ(r.condition, 3);
}
