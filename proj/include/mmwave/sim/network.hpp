#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <vector>

#include "mmwave/benefits.hpp"
#include "mmwave/errors.hpp"
#include "mmwave/problem.hpp"
#include "mmwave/radio.hpp"
#include "mmwave/topology.hpp"

namespace mmwave::sim {

/// The clients/objects instance over the nodes active right now, plus the
/// mapping from compact indices back to stable node ids.
struct InstanceView {
  AsymmetricInstance inst;
  std::vector<std::size_t> client_ids;
  std::vector<std::size_t> relay_ids;
  std::map<std::size_t, std::size_t> client_index;  // stable -> compact
  std::map<std::size_t, std::size_t> relay_index;

  /// Relay benefits of client `ci` keyed by stable relay id.
  [[nodiscard]] std::map<std::size_t, double> relay_betas(std::size_t ci) const {
    std::map<std::size_t, double> out;
    for (const auto& arc : inst.arcs(ci)) {
      if (!inst.is_virtual(arc.object)) out.emplace(relay_ids[arc.object], arc.beta);
    }
    return out;
  }
};

/// Every node that may ever take part in a run, with activity flags and
/// link blockages.
///
/// Built either from a fixed clients/objects instance (no geometry, so no
/// blockages) or from a topology plus radio model, in which case link rates
/// are evaluated once and blocked links read as rate 0.
class NetworkModel {
 public:
  static NetworkModel fixed(AsymmetricInstance inst) {
    NetworkModel n;
    n.num_clients_ = inst.num_clients();
    n.num_relays_ = inst.num_relays();
    n.fixed_ = std::move(inst);
    n.client_active_.assign(n.num_clients_, true);
    n.relay_active_.assign(n.num_relays_, true);
    return n;
  }

  static NetworkModel from_topology(const RadioParams& radio, TopologyInstance topo,
                                    BenefitScaling scaling) {
    topo.validate();
    NetworkModel n;
    n.num_clients_ = topo.num_clients();
    n.num_relays_ = topo.num_relays();
    for (const auto& link : topo.blocked_links) n.blockage_[link] += 1;
    topo.blocked_links.clear();
    n.rates_ = build_benefits(radio, topo);
    n.topo_ = std::move(topo);
    n.scaling_ = scaling;
    n.client_active_.assign(n.num_clients_, true);
    n.relay_active_.assign(n.num_relays_, true);
    return n;
  }

  [[nodiscard]] std::size_t num_clients() const { return num_clients_; }
  [[nodiscard]] std::size_t num_relays() const { return num_relays_; }
  [[nodiscard]] std::size_t num_aps() const { return topo_ ? topo_->num_aps() : 0; }
  [[nodiscard]] bool has_geometry() const { return topo_.has_value(); }
  [[nodiscard]] const TopologyInstance* topology() const { return topo_ ? &*topo_ : nullptr; }

  [[nodiscard]] bool client_active(std::size_t i) const { return client_active_.at(i); }
  [[nodiscard]] bool relay_active(std::size_t j) const { return relay_active_.at(j); }
  void set_client_active(std::size_t i, bool on) { client_active_.at(i) = on; }
  void set_relay_active(std::size_t j, bool on) { relay_active_.at(j) = on; }

  [[nodiscard]] bool contains(NodeRef ref) const {
    switch (ref.kind) {
      case NodeKind::client: return ref.id < num_clients_;
      case NodeKind::relay: return ref.id < num_relays_;
      case NodeKind::ap: return ref.id < num_aps();
    }
    return false;
  }

  /// Blockages nest: a link stays blocked until every blockage on it ended.
  void block(const Link& link) {
    require_geometry();
    blockage_[link] += 1;
  }
  void unblock(const Link& link) {
    auto it = blockage_.find(link);
    if (it == blockage_.end()) return;
    if (--it->second == 0) blockage_.erase(it);
  }
  [[nodiscard]] bool is_blocked(const Link& link) const { return blockage_.contains(link); }

  /// Every eligible link of the full topology, in sorted order.
  [[nodiscard]] std::vector<Link> eligible_links() const {
    std::vector<Link> out;
    if (!topo_) return out;
    for (std::size_t i = 0; i < topo_->num_clients(); ++i) {
      for (auto k : topo_->client_aps[i]) out.emplace_back(client_ref(i), ap_ref(k));
      for (auto j : topo_->client_relays[i]) out.emplace_back(client_ref(i), relay_ref(j));
    }
    for (std::size_t j = 0; j < topo_->num_relays(); ++j) {
      for (auto k : topo_->relay_aps[j]) out.emplace_back(relay_ref(j), ap_ref(k));
    }
    std::ranges::sort(out);
    return out;
  }

  [[nodiscard]] InstanceView view() const {
    InstanceView v;
    for (std::size_t i = 0; i < num_clients_; ++i) {
      if (client_active_[i]) {
        v.client_index[i] = v.client_ids.size();
        v.client_ids.push_back(i);
      }
    }
    for (std::size_t j = 0; j < num_relays_; ++j) {
      if (relay_active_[j]) {
        v.relay_index[j] = v.relay_ids.size();
        v.relay_ids.push_back(j);
      }
    }
    return topo_ ? topology_view(std::move(v)) : fixed_view(std::move(v));
  }

 private:
  void require_geometry() const {
    if (!topo_) throw ScenarioError("blockage needs a topology-based network");
  }

  InstanceView fixed_view(InstanceView v) const {
    const auto& src = *fixed_;
    std::vector<std::vector<ObjectArc>> arcs(v.client_ids.size());
    std::vector<double> direct(v.client_ids.size());
    for (std::size_t ci = 0; ci < v.client_ids.size(); ++ci) {
      const auto i = v.client_ids[ci];
      direct[ci] = src.direct_beta(i);
      for (const auto& arc : src.arcs(i)) {
        if (src.is_virtual(arc.object)) continue;
        auto it = v.relay_index.find(arc.object);
        if (it != v.relay_index.end()) arcs[ci].push_back({it->second, arc.beta});
      }
    }
    v.inst = AsymmetricInstance(v.relay_ids.size(), std::move(arcs), std::move(direct));
    if (src.client_best_ap.size() == src.num_clients() && src.relay_best_ap.size() == src.num_relays()) {
      for (auto i : v.client_ids) v.inst.client_best_ap.push_back(src.client_best_ap[i]);
      for (auto j : v.relay_ids) v.inst.relay_best_ap.push_back(src.relay_best_ap[j]);
    }
    return v;
  }

  [[nodiscard]] double link_rate(NodeRef x, NodeRef y, double r) const {
    return blockage_.contains(Link{x, y}) ? 0.0 : r;
  }

  InstanceView topology_view(InstanceView v) const {
    const auto& t = *topo_;
    auto argmax = [](const std::vector<std::size_t>& candidates, auto&& value) {
      std::size_t best = candidates.front();
      double best_value = value(best);
      for (auto k : candidates) {
        const double x = value(k);
        if (x > best_value) {
          best = k;
          best_value = x;
        }
      }
      return std::pair{best, best_value};
    };
    std::vector<std::size_t> relay_best(num_relays_, 0);
    std::vector<double> relay_uplink(num_relays_, 0.0);
    for (auto j : v.relay_ids) {
      const auto [k, r] = argmax(t.relay_aps[j], [&](std::size_t k) {
        return link_rate(relay_ref(j), ap_ref(k), *rates_.relay_ap(j, k));
      });
      relay_best[j] = k;
      relay_uplink[j] = r;
    }
    std::vector<std::vector<ObjectArc>> arcs(v.client_ids.size());
    std::vector<double> direct(v.client_ids.size());
    for (std::size_t ci = 0; ci < v.client_ids.size(); ++ci) {
      const auto i = v.client_ids[ci];
      const auto [k, r] = argmax(t.client_aps[i], [&](std::size_t k) {
        return link_rate(client_ref(i), ap_ref(k), *rates_.direct(i, k));
      });
      v.inst.client_best_ap.push_back(k);
      direct[ci] = scaling_.apply(r);
      for (auto j : t.client_relays[i]) {
        auto it = v.relay_index.find(j);
        if (it == v.relay_index.end()) continue;
        const double hop = link_rate(client_ref(i), relay_ref(j), *rates_.client_relay(i, j));
        const double b = scaling_.apply(std::min(hop, relay_uplink[j]));
        if (b > direct[ci]) arcs[ci].push_back({it->second, b});
      }
    }
    auto best_clients = std::move(v.inst.client_best_ap);
    v.inst = AsymmetricInstance(v.relay_ids.size(), std::move(arcs), std::move(direct));
    v.inst.client_best_ap = std::move(best_clients);
    for (auto j : v.relay_ids) v.inst.relay_best_ap.push_back(relay_best[j]);
    return v;
  }

  std::size_t num_clients_ = 0;
  std::size_t num_relays_ = 0;
  std::optional<AsymmetricInstance> fixed_;
  std::optional<TopologyInstance> topo_;
  BenefitTable rates_;
  BenefitScaling scaling_;
  std::vector<bool> client_active_;
  std::vector<bool> relay_active_;
  std::map<Link, int> blockage_;
};

}  // namespace mmwave::sim
