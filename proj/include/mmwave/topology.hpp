#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <compare>
#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mmwave/errors.hpp"

namespace mmwave {

struct Point {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point&, const Point&) = default;
};

inline double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

enum class NodeKind { client, relay, ap };

/// Identifies one node of a topology; textual form is "c3", "r1" or "a0".
struct NodeRef {
  NodeKind kind = NodeKind::client;
  std::size_t id = 0;

  friend auto operator<=>(const NodeRef&, const NodeRef&) = default;

  [[nodiscard]] std::string str() const {
    const char prefix = kind == NodeKind::client ? 'c' : kind == NodeKind::relay ? 'r' : 'a';
    return prefix + std::to_string(id);
  }

  static NodeRef parse(const std::string& text) {
    if (text.size() < 2) throw FormatError("bad node reference '" + text + "'");
    NodeRef ref;
    switch (text[0]) {
      case 'c': ref.kind = NodeKind::client; break;
      case 'r': ref.kind = NodeKind::relay; break;
      case 'a': ref.kind = NodeKind::ap; break;
      default: throw FormatError("bad node reference '" + text + "'");
    }
    const auto digits = std::string_view(text).substr(1);
    std::size_t value = 0;
    const auto [end, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
    if (ec != std::errc{} || end != digits.data() + digits.size()) {
      throw FormatError("bad node reference '" + text + "'");
    }
    ref.id = value;
    return ref;
  }
};

inline NodeRef client_ref(std::size_t i) { return {NodeKind::client, i}; }
inline NodeRef relay_ref(std::size_t j) { return {NodeKind::relay, j}; }
inline NodeRef ap_ref(std::size_t k) { return {NodeKind::ap, k}; }

/// Undirected link; endpoints are stored in sorted order.
struct Link {
  NodeRef a;
  NodeRef b;

  Link() = default;
  Link(NodeRef x, NodeRef y) : a(std::min(x, y)), b(std::max(x, y)) {}

  friend auto operator<=>(const Link&, const Link&) = default;
};

/// Node positions and connectivity of one network snapshot.
///
/// Eligibility is stored once per direction that the model needs:
/// K(i) (client -> APs), N(i) (client -> relays) and K(j) (relay -> APs).
/// The reverse sets M(k), M(j), N(k) are derived, which keeps the two views
/// consistent by construction.
class TopologyInstance {
 public:
  std::vector<Point> clients;
  std::vector<Point> relays;
  std::vector<Point> aps;

  std::vector<std::vector<std::size_t>> client_aps;     // K(i)
  std::vector<std::vector<std::size_t>> client_relays;  // N(i)
  std::vector<std::vector<std::size_t>> relay_aps;      // K(j)

  std::set<Link> blocked_links;

  [[nodiscard]] std::size_t num_clients() const { return clients.size(); }
  [[nodiscard]] std::size_t num_relays() const { return relays.size(); }
  [[nodiscard]] std::size_t num_aps() const { return aps.size(); }

  /// Eligibility "within radius of each other" for every client-AP,
  /// client-relay and relay-AP pair.
  static TopologyInstance from_radius(std::vector<Point> clients, std::vector<Point> relays,
                                      std::vector<Point> aps, double radius) {
    TopologyInstance t;
    t.clients = std::move(clients);
    t.relays = std::move(relays);
    t.aps = std::move(aps);
    t.assign_radius_eligibility(radius);
    return t;
  }

  void assign_radius_eligibility(double radius) {
    client_aps.assign(clients.size(), {});
    client_relays.assign(clients.size(), {});
    relay_aps.assign(relays.size(), {});
    for (std::size_t i = 0; i < clients.size(); ++i) {
      for (std::size_t k = 0; k < aps.size(); ++k) {
        if (distance(clients[i], aps[k]) <= radius) client_aps[i].push_back(k);
      }
      for (std::size_t j = 0; j < relays.size(); ++j) {
        if (distance(clients[i], relays[j]) <= radius) client_relays[i].push_back(j);
      }
    }
    for (std::size_t j = 0; j < relays.size(); ++j) {
      for (std::size_t k = 0; k < aps.size(); ++k) {
        if (distance(relays[j], aps[k]) <= radius) relay_aps[j].push_back(k);
      }
    }
  }

  [[nodiscard]] std::vector<std::size_t> clients_of_ap(std::size_t k) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < client_aps.size(); ++i) {
      if (std::ranges::binary_search(client_aps[i], k)) out.push_back(i);
    }
    return out;
  }

  [[nodiscard]] std::vector<std::size_t> clients_of_relay(std::size_t j) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < client_relays.size(); ++i) {
      if (std::ranges::binary_search(client_relays[i], j)) out.push_back(i);
    }
    return out;
  }

  [[nodiscard]] std::vector<std::size_t> relays_of_ap(std::size_t k) const {
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < relay_aps.size(); ++j) {
      if (std::ranges::binary_search(relay_aps[j], k)) out.push_back(j);
    }
    return out;
  }

  [[nodiscard]] bool is_blocked(NodeRef x, NodeRef y) const {
    return blocked_links.contains(Link{x, y});
  }

  [[nodiscard]] Point position(NodeRef ref) const {
    const auto& v = ref.kind == NodeKind::client ? clients
                    : ref.kind == NodeKind::relay ? relays
                                                  : aps;
    if (ref.id >= v.size()) throw InstanceError("unknown node " + ref.str());
    return v[ref.id];
  }

  [[nodiscard]] bool contains(NodeRef ref) const {
    const auto n = ref.kind == NodeKind::client ? clients.size()
                   : ref.kind == NodeKind::relay ? relays.size()
                                                 : aps.size();
    return ref.id < n;
  }

  /// Throws InstanceError on the first violated structural invariant.
  void validate() const {
    if (relays.size() > clients.size()) {
      throw InstanceError("more relays (" + std::to_string(relays.size()) + ") than clients (" +
                          std::to_string(clients.size()) + ")");
    }
    if (client_aps.size() != clients.size() || client_relays.size() != clients.size() ||
        relay_aps.size() != relays.size()) {
      throw InstanceError("eligibility tables do not match node counts");
    }
    auto check_points = [](const std::vector<Point>& pts, const char* what) {
      for (const auto& p : pts) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
          throw InstanceError(std::string("non-finite ") + what + " position");
        }
      }
    };
    check_points(clients, "client");
    check_points(relays, "relay");
    check_points(aps, "AP");
    auto check_set = [](const std::vector<std::size_t>& s, std::size_t bound, const std::string& who) {
      if (!std::ranges::is_sorted(s) || std::ranges::adjacent_find(s) != s.end()) {
        throw InstanceError("eligibility set of " + who + " must be sorted and unique");
      }
      if (!s.empty() && s.back() >= bound) {
        throw InstanceError("eligibility set of " + who + " references an unknown node");
      }
    };
    for (std::size_t i = 0; i < clients.size(); ++i) {
      if (client_aps[i].empty()) {
        throw InstanceError("client " + std::to_string(i) + " cannot reach any AP");
      }
      check_set(client_aps[i], aps.size(), "client " + std::to_string(i));
      check_set(client_relays[i], relays.size(), "client " + std::to_string(i));
    }
    for (std::size_t j = 0; j < relays.size(); ++j) {
      if (relay_aps[j].empty()) {
        throw InstanceError("relay " + std::to_string(j) + " cannot reach any AP");
      }
      check_set(relay_aps[j], aps.size(), "relay " + std::to_string(j));
    }
    for (const auto& link : blocked_links) {
      if (!contains(link.a) || !contains(link.b)) {
        throw InstanceError("blocked link references unknown node");
      }
    }
  }
};

}  // namespace mmwave
