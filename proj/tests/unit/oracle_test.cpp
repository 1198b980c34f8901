#include <gtest/gtest.h>

#include "mmwave/auction.hpp"
#include "mmwave/benefits.hpp"
#include "mmwave/min_cost_flow.hpp"
#include "mmwave/oracle.hpp"
#include "test_support.hpp"

using namespace mmwave;
using testing_support::dp_optimum;
using testing_support::random_instance;

TEST(MinCostFlow, PicksCheaperPath) {
  MinCostFlow<double> g(4);
  g.add_arc(0, 1, 1, 1.0);
  g.add_arc(0, 2, 1, 3.0);
  g.add_arc(1, 3, 1, 1.0);
  g.add_arc(2, 3, 1, 0.0);
  auto r = g.solve(0, 3, 1);
  EXPECT_EQ(r.flow, 1);
  EXPECT_DOUBLE_EQ(r.cost, 2.0);
  r = g.solve(0, 3, 5);
  EXPECT_EQ(r.flow, 1);
  EXPECT_DOUBLE_EQ(r.cost, 3.0);
}

TEST(MinCostFlow, ReroutesThroughResidualArc) {
  // The greedy first path 0-1-2-3 must be undone to send two units.
  MinCostFlow<std::int64_t> g(4);
  g.add_arc(0, 1, 1, 1);
  g.add_arc(0, 2, 1, 5);
  g.add_arc(1, 2, 1, 1);
  g.add_arc(1, 3, 1, 5);
  g.add_arc(2, 3, 1, 1);
  const auto r = g.solve(0, 3, 2);
  EXPECT_EQ(r.flow, 2);
  EXPECT_EQ(r.cost, 12);
}

TEST(MinCostFlow, NegativeCosts) {
  MinCostFlow<double> g(3);
  g.add_arc(0, 1, 1, -4.0);
  g.add_arc(1, 2, 1, 1.0);
  g.add_arc(0, 2, 1, -1.0);
  const auto r = g.solve(0, 2, 2);
  EXPECT_EQ(r.flow, 2);
  EXPECT_DOUBLE_EQ(r.cost, -4.0);
}

TEST(Oracle, McfMatchesDpAndExhaustive) {
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    const auto inst = random_instance(seed, {.max_clients = 10, .max_relays = 6});
    const auto mcf = solve_exact_mcf(inst);
    const auto ex = solve_exhaustive(inst);
    EXPECT_NO_THROW(inst.validate(mcf.assignment));
    EXPECT_EQ(mcf.objective, ex.objective) << seed;
    EXPECT_NEAR(mcf.objective, dp_optimum(inst), 1e-9) << seed;
  }
}

TEST(Oracle, McfOnLargerInstances) {
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    const auto inst = random_instance(seed, {.max_clients = 30, .max_relays = 14, .arc_probability = 0.5});
    EXPECT_NEAR(solve_exact_mcf(inst).objective, dp_optimum(inst), 1e-9) << seed;
  }
}

TEST(Oracle, DualsSatisfyComplementarySlackness) {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto inst = random_instance(seed);
    FlowNetwork net(inst);
    net.solve();
    const auto y = net.assignment();
    const auto cs = check_eps_cs(inst, y, net.duals(), 1e-9);
    EXPECT_TRUE(cs.ok) << seed << " " << cs.detail;
  }
}

TEST(Oracle, FlowConservation) {
  const auto inst = random_instance(17);
  FlowNetwork net(inst);
  net.solve();
  EXPECT_EQ(net.net_outflow(), net.supplies());
}

TEST(Oracle, ExhaustiveRefusesLargeInstances) {
  std::vector<std::vector<ObjectArc>> arcs(11);
  AsymmetricInstance inst(0, arcs, std::vector<double>(11, 1.0));
  EXPECT_THROW(solve_exhaustive(inst), SizeError);
  EXPECT_NO_THROW(solve_exact_mcf(inst));
}

TEST(Baselines, RssiUsesBestApAndRandomStaysEligible) {
  auto topo = TopologyInstance::from_radius({{1, 0}, {6, 0}, {9, 0}}, {}, {{0, 0}, {10, 0}}, 7.0);
  const auto b = build_benefits(RadioParams::table_one(), topo);
  const auto s = baseline_rssi(b, topo);
  ASSERT_EQ(s.direct.size(), 3u);
  EXPECT_EQ(s.direct[0].ap, 0u);
  EXPECT_EQ(s.direct[1].ap, 1u);
  EXPECT_EQ(s.direct[2].ap, 1u);
  Rng rng(5);
  for (int t = 0; t < 50; ++t) {
    const auto r = baseline_random(b, topo, rng);
    EXPECT_NO_THROW((void)client_benefits(b, r));
    EXPECT_LE(total_throughput(b, r), total_throughput(b, s));
  }
}
