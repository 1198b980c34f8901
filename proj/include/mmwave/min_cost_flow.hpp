#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <queue>
#include <vector>

#include "mmwave/errors.hpp"

namespace mmwave {

/// Min-cost flow by successive shortest paths with Johnson potentials.
///
/// Arc costs may be negative as long as the initial network has no negative
/// cycle; potentials are seeded with Bellman-Ford and then maintained by
/// Dijkstra on reduced costs.
template <typename Cost>
class MinCostFlow {
 public:
  using Flow = std::int64_t;

  struct Arc {
    std::size_t from;
    std::size_t to;
    Flow capacity;
    Flow flow;
    Cost cost;
  };

  explicit MinCostFlow(std::size_t num_nodes) : adjacency_(num_nodes), potential_(num_nodes, Cost{}) {}

  /// Returns the id of the forward arc; its residual twin is id ^ 1.
  std::size_t add_arc(std::size_t from, std::size_t to, Flow capacity, Cost cost) {
    const std::size_t id = arcs_.size();
    arcs_.push_back({from, to, capacity, 0, cost});
    arcs_.push_back({to, from, 0, 0, -cost});
    adjacency_.at(from).push_back(id);
    adjacency_.at(to).push_back(id + 1);
    return id;
  }

  struct Result {
    Flow flow = 0;
    Cost cost{};
  };

  /// Sends up to `limit` units from source to sink at minimum cost.
  Result solve(std::size_t source, std::size_t sink, Flow limit) {
    Result result;
    seed_potentials(source);
    const std::size_t n = adjacency_.size();
    std::vector<Cost> dist(n);
    std::vector<std::size_t> via(n);
    std::vector<bool> reached(n);
    while (result.flow < limit) {
      if (!dijkstra(source, dist, via, reached) || !reached[sink]) break;
      Cost far{};
      for (std::size_t v = 0; v < n; ++v) {
        if (reached[v]) far = std::max(far, dist[v]);
      }
      for (std::size_t v = 0; v < n; ++v) potential_[v] += reached[v] ? dist[v] : far;

      Flow push = limit - result.flow;
      for (std::size_t v = sink; v != source; v = arcs_[via[v]].from) {
        push = std::min(push, residual(via[v]));
      }
      for (std::size_t v = sink; v != source; v = arcs_[via[v]].from) {
        arcs_[via[v]].flow += push;
        arcs_[via[v] ^ 1].flow -= push;
        result.cost += static_cast<Cost>(push) * arcs_[via[v]].cost;
      }
      result.flow += push;
    }
    return result;
  }

  [[nodiscard]] const Arc& arc(std::size_t id) const { return arcs_.at(id); }
  [[nodiscard]] std::size_t num_nodes() const { return adjacency_.size(); }

  [[nodiscard]] Flow residual(std::size_t id) const { return arcs_[id].capacity - arcs_[id].flow; }

  /// Potentials phi with phi[v] <= phi[u] + cost(u,v) on every residual arc,
  /// recomputed by Bellman-Ford from scratch (all nodes start at 0). Exists
  /// exactly when the current flow is optimal for its value.
  [[nodiscard]] std::vector<Cost> residual_potentials() const {
    std::vector<Cost> phi(adjacency_.size(), Cost{});
    for (std::size_t round = 0; round <= adjacency_.size(); ++round) {
      bool changed = false;
      for (std::size_t id = 0; id < arcs_.size(); ++id) {
        if (residual(id) <= 0) continue;
        const auto& a = arcs_[id];
        if (phi[a.from] + a.cost < phi[a.to]) {
          phi[a.to] = phi[a.from] + a.cost;
          changed = true;
        }
      }
      if (!changed) return phi;
    }
    throw InstanceError("residual network has a negative cycle");
  }

 private:
  void seed_potentials(std::size_t source) {
    // Bellman-Ford over arcs with residual capacity; unreachable nodes keep 0.
    const std::size_t n = adjacency_.size();
    std::vector<Cost> dist(n, Cost{});
    std::vector<bool> known(n, false);
    known[source] = true;
    for (std::size_t round = 0; round < n; ++round) {
      bool changed = false;
      for (std::size_t id = 0; id < arcs_.size(); ++id) {
        const auto& a = arcs_[id];
        if (residual(id) <= 0 || !known[a.from]) continue;
        const Cost cand = dist[a.from] + a.cost;
        if (!known[a.to] || cand < dist[a.to]) {
          dist[a.to] = cand;
          known[a.to] = true;
          changed = true;
        }
      }
      if (!changed) break;
    }
    Cost far{};
    for (std::size_t v = 0; v < n; ++v) {
      if (known[v]) far = std::max(far, dist[v]);
    }
    for (std::size_t v = 0; v < n; ++v) potential_[v] = known[v] ? dist[v] : far;
  }

  bool dijkstra(std::size_t source, std::vector<Cost>& dist, std::vector<std::size_t>& via,
                std::vector<bool>& reached) {
    const std::size_t n = adjacency_.size();
    std::fill(reached.begin(), reached.end(), false);
    std::vector<bool> done(n, false);
    using Entry = std::pair<Cost, std::size_t>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
    dist[source] = Cost{};
    reached[source] = true;
    heap.push({Cost{}, source});
    while (!heap.empty()) {
      const auto [d, u] = heap.top();
      heap.pop();
      if (done[u]) continue;
      done[u] = true;
      for (auto id : adjacency_[u]) {
        if (residual(id) <= 0) continue;
        const auto& a = arcs_[id];
        // Reduced costs are non-negative up to rounding; clamp the noise.
        const Cost reduced = std::max(Cost{}, a.cost + potential_[u] - potential_[a.to]);
        const Cost cand = d + reduced;
        if (done[a.to]) continue;
        if (!reached[a.to] || cand < dist[a.to]) {
          dist[a.to] = cand;
          via[a.to] = id;
          reached[a.to] = true;
          heap.push({cand, a.to});
        }
      }
    }
    return reached[source];
  }

  std::vector<Arc> arcs_;
  std::vector<std::vector<std::size_t>> adjacency_;
  std::vector<Cost> potential_;
};

}  // namespace mmwave
