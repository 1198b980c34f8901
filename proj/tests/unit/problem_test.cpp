#include <gtest/gtest.h>

#include "mmwave/benefits.hpp"
#include "mmwave/problem.hpp"
#include "mmwave/rng.hpp"

using namespace mmwave;

namespace {

// Two APs 10 m apart; client 0 near AP 0, client 1 between the APs, one
// relay close to AP 1.
TopologyInstance small_topology() {
  return TopologyInstance::from_radius({{1, 0}, {5, 1}}, {{8, 0}}, {{0, 0}, {10, 0}}, 6.0);
}

}  // namespace

TEST(Benefits, RelayedIsBottleneckOfBothHops) {
  const auto p = RadioParams::table_one();
  const auto topo = small_topology();
  const auto b = build_benefits(p, topo);
  const double hop1 = rate(p, distance(topo.clients[1], topo.relays[0]));
  const double hop2 = rate(p, distance(topo.relays[0], topo.aps[1]));
  EXPECT_DOUBLE_EQ(*b.relayed(1, 0, 1), std::min(hop1, hop2));
  EXPECT_FALSE(b.direct(0, 1).has_value());
  EXPECT_FALSE(b.relayed(0, 0, 1).has_value());
}

TEST(Benefits, BlockedLinkHasZeroRate) {
  auto topo = small_topology();
  topo.blocked_links.insert(Link(client_ref(0), ap_ref(0)));
  const auto b = build_benefits(RadioParams::table_one(), topo);
  EXPECT_EQ(*b.direct(0, 0), 0.0);
}

TEST(Benefits, CoincidentNodes) {
  auto topo = TopologyInstance::from_radius({{0, 0}}, {}, {{0, 0}}, 6.0);
  EXPECT_THROW(build_benefits(RadioParams::table_one(), topo), DomainError);
}

TEST(Benefits, SettersRejectBadRates) {
  BenefitTable t(1, 1, 1);
  EXPECT_THROW(t.set_direct(0, 0, -1.0), DomainError);
  EXPECT_THROW(t.set_direct(0, 0, std::nan("")), DomainError);
  EXPECT_THROW(t.set_direct(1, 0, 1.0), DomainError);
}

TEST(Feasibility, NamesViolatedConstraint) {
  BenefitTable t(2, 1, 1);
  t.set_direct(0, 0, 5);
  t.set_direct(1, 0, 4);
  t.set_client_relay(0, 0, 9);
  t.set_client_relay(1, 0, 9);
  t.set_relay_ap(0, 0, 7);

  Assignment twice{{{0, 0}}, {{0, 0, 0}}};
  try {
    (void)client_benefits(t, twice);
    FAIL();
  } catch (const FeasibilityError& e) {
    EXPECT_NE(std::string(e.what()).find("client constraint"), std::string::npos);
  }
  Assignment shared{{}, {{0, 0, 0}, {1, 0, 0}}};
  try {
    (void)client_benefits(t, shared);
    FAIL();
  } catch (const FeasibilityError& e) {
    EXPECT_NE(std::string(e.what()).find("relay constraint"), std::string::npos);
  }
  Assignment missing{{{0, 0}}, {}};
  EXPECT_THROW((void)client_benefits(t, missing), FeasibilityError);
  Assignment ineligible{{{0, 0}, {1, 1}}, {}};
  try {
    (void)client_benefits(t, ineligible);
    FAIL();
  } catch (const FeasibilityError& e) {
    EXPECT_NE(std::string(e.what()).find("domain constraint"), std::string::npos);
  }
  Assignment ok{{{1, 0}}, {{0, 0, 0}}};
  EXPECT_DOUBLE_EQ(total_throughput(t, ok), 4.0 + 7.0);
}

TEST(Transformation, KeepsOnlyStrictlyImprovingRelays) {
  BenefitTable t(2, 2, 1);
  t.set_direct(0, 0, 5);
  t.set_direct(1, 0, 5);
  t.set_relay_ap(0, 0, 5);  // relayed = 5: no improvement
  t.set_relay_ap(1, 0, 8);
  t.set_client_relay(0, 0, 9);
  t.set_client_relay(0, 1, 6);
  t.set_client_relay(1, 1, 4);  // relayed = 4 < direct
  TopologyInstance topo;
  topo.clients.resize(2);
  topo.relays.resize(2);
  topo.aps.resize(1);
  topo.client_aps = {{0}, {0}};
  topo.client_relays = {{0, 1}, {1}};
  topo.relay_aps = {{0}, {0}};
  const auto inst = build_asymmetric(t, topo);
  ASSERT_EQ(inst.arcs(0).size(), 2u);
  EXPECT_EQ(inst.arcs(0)[0].object, 1u);
  EXPECT_EQ(inst.arcs(0)[0].beta, 6.0);
  EXPECT_EQ(inst.arcs(0)[1].object, inst.virtual_object(0));
  ASSERT_EQ(inst.arcs(1).size(), 1u);
  EXPECT_EQ(inst.clients_of(inst.virtual_object(1)).size(), 1u);
  EXPECT_EQ(inst.num_objects(), 4u);
  EXPECT_DOUBLE_EQ(inst.delta(), 1.0);
  EXPECT_DOUBLE_EQ(inst.sentinel(), 60.0);
}

TEST(Transformation, BestApTiesGoToLowestIndex) {
  BenefitTable t(1, 0, 3);
  t.set_direct(0, 0, 3);
  t.set_direct(0, 1, 7);
  t.set_direct(0, 2, 7);
  TopologyInstance topo;
  topo.clients.resize(1);
  topo.aps.resize(3);
  topo.client_aps = {{0, 1, 2}};
  topo.client_relays = {{}};
  EXPECT_EQ(best_ap_sets(t, topo).client[0], 1u);
}

TEST(Transformation, IntegerScalingAppliesFilterAfterRounding) {
  BenefitTable t(1, 1, 1);
  t.set_direct(0, 0, 5.001e9);
  t.set_client_relay(0, 0, 9e9);
  t.set_relay_ap(0, 0, 5.004e9);
  TopologyInstance topo;
  topo.clients.resize(1);
  topo.relays.resize(1);
  topo.aps.resize(1);
  topo.client_aps = {{0}};
  topo.client_relays = {{0}};
  topo.relay_aps = {{0}};
  EXPECT_EQ(build_asymmetric(t, topo, {1e9, std::nullopt}).arcs(0).size(), 2u);
  const auto rounded = build_asymmetric(t, topo, {1e9, 2});
  EXPECT_EQ(rounded.arcs(0).size(), 1u);
  EXPECT_EQ(rounded.direct_beta(0), 500.0);
}

TEST(Instance, RejectsNonImprovingArc) {
  EXPECT_THROW(AsymmetricInstance(1, {{{0, 2.0}}}, {3.0}), InstanceError);
  EXPECT_THROW(AsymmetricInstance(1, {{{1, 5.0}}}, {3.0}), InstanceError);
  EXPECT_THROW(AsymmetricInstance(1, {{{0, 5.0}, {0, 6.0}}}, {3.0}), InstanceError);
}

TEST(Instance, ValidateAndObjective) {
  AsymmetricInstance inst(1, {{{0, 9.0}}, {{0, 8.0}}}, {5.0, 4.0});
  EXPECT_DOUBLE_EQ(inst.objective({0, inst.virtual_object(1)}), 13.0);
  EXPECT_THROW(inst.validate({0, 0}), FeasibilityError);
  EXPECT_THROW(inst.validate({inst.virtual_object(1), inst.virtual_object(1)}), FeasibilityError);
  EXPECT_THROW(inst.validate({0, std::nullopt}), FeasibilityError);
  EXPECT_NO_THROW(inst.validate({0, std::nullopt}, true));
}

TEST(Recovery, VirtualObjectsMapToBestAp) {
  const auto p = RadioParams::table_one();
  const auto topo = small_topology();
  const auto b = build_benefits(p, topo);
  const auto inst = build_asymmetric(b, topo);
  ObjectAssignment y{inst.virtual_object(0), inst.virtual_object(1)};
  auto s = recover_assignment(inst, y);
  ASSERT_EQ(s.direct.size(), 2u);
  EXPECT_EQ(s.direct[0].ap, 0u);
  if (inst.beta(1, 0)) {
    y[1] = 0;
    s = recover_assignment(inst, y);
    ASSERT_EQ(s.relayed.size(), 1u);
    EXPECT_EQ(s.relayed[0], (RelayTriple{1, 0, 1}));
    EXPECT_DOUBLE_EQ(total_throughput(b, s), inst.objective(y) * 1.0);
  }
}

TEST(LoadBalance, MeanAndStandardError) {
  std::vector<Assignment> samples{
      {{{0, 0}, {1, 1}}, {}},
      {{{0, 0}, {1, 0}}, {}},
  };
  const auto lb = check_load_balance(samples, 2);
  EXPECT_DOUBLE_EQ(lb.mean[0], 1.5);
  EXPECT_DOUBLE_EQ(lb.mean[1], 0.5);
  EXPECT_DOUBLE_EQ(lb.stderr_of_mean[0], 0.5);
  EXPECT_THROW(check_load_balance({}, 2), DomainError);
}
