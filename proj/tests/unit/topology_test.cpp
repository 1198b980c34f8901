#include <gtest/gtest.h>

#include "mmwave/topology.hpp"

using namespace mmwave;

TEST(NodeRef, TextRoundTrip) {
  for (const auto* text : {"c0", "r12", "a3"}) EXPECT_EQ(NodeRef::parse(text).str(), text);
  EXPECT_EQ(NodeRef::parse("r7"), relay_ref(7));
}

TEST(NodeRef, MalformedNamesAreRejected) {
  for (const auto* text : {"", "c", "x1", "c1a", "c-1", "a 2"}) {
    EXPECT_THROW(NodeRef::parse(text), FormatError) << text;
  }
}

TEST(Link, EndpointsAreUnordered) {
  EXPECT_EQ(Link(ap_ref(0), client_ref(2)), Link(client_ref(2), ap_ref(0)));
}

TEST(Topology, RadiusEligibility) {
  auto t = TopologyInstance::from_radius({{1, 0}, {9, 0}}, {{5, 0}}, {{0, 0}, {10, 0}}, 5.0);
  EXPECT_EQ(t.client_aps[0], (std::vector<std::size_t>{0}));
  EXPECT_EQ(t.client_aps[1], (std::vector<std::size_t>{1}));
  EXPECT_EQ(t.client_relays[0], (std::vector<std::size_t>{0}));
  EXPECT_EQ(t.client_relays[1], (std::vector<std::size_t>{0}));
  EXPECT_EQ(t.relay_aps[0], (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(t.clients_of_ap(1), (std::vector<std::size_t>{1}));
  EXPECT_EQ(t.clients_of_relay(0), (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(t.relays_of_ap(0), (std::vector<std::size_t>{0}));
  EXPECT_NO_THROW(t.validate());
}

TEST(Topology, MoreRelaysThanClients) {
  auto t = TopologyInstance::from_radius({{1, 0}}, {{2, 0}, {3, 0}}, {{0, 0}}, 5.0);
  EXPECT_THROW(t.validate(), InstanceError);
}

TEST(Topology, ClientWithoutAp) {
  auto t = TopologyInstance::from_radius({{1, 0}, {50, 0}}, {}, {{0, 0}}, 5.0);
  EXPECT_THROW(t.validate(), InstanceError);
}

TEST(Topology, UnsortedEligibility) {
  auto t = TopologyInstance::from_radius({{1, 0}}, {}, {{0, 0}, {2, 0}}, 5.0);
  t.client_aps[0] = {1, 0};
  EXPECT_THROW(t.validate(), InstanceError);
  t.client_aps[0] = {0, 0};
  EXPECT_THROW(t.validate(), InstanceError);
}

TEST(Topology, BlockedLinkMustExist) {
  auto t = TopologyInstance::from_radius({{1, 0}}, {}, {{0, 0}}, 5.0);
  t.blocked_links.insert(Link(client_ref(0), ap_ref(0)));
  EXPECT_NO_THROW(t.validate());
  EXPECT_TRUE(t.is_blocked(ap_ref(0), client_ref(0)));
  t.blocked_links.insert(Link(client_ref(3), ap_ref(0)));
  EXPECT_THROW(t.validate(), InstanceError);
}
