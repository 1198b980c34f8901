#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "mmwave/auction.hpp"
#include "mmwave/benefits.hpp"
#include "mmwave/errors.hpp"
#include "mmwave/min_cost_flow.hpp"
#include "mmwave/problem.hpp"
#include "mmwave/rng.hpp"
#include "mmwave/topology.hpp"

namespace mmwave {

/// Min-cost-flow form of the clients/objects problem: client arcs cost
/// -beta, a supersource s feeds every object through zero-cost arcs and
/// supplies Q - M units; every client supplies one unit and every object
/// absorbs one.
///
/// Supplies are realised with an extra root node (root -> client, root -> s)
/// and demands with a sink (object -> sink), so the flow problem becomes a
/// single-source single-sink one.
class FlowNetwork {
 public:
  explicit FlowNetwork(const AsymmetricInstance& inst)
      : inst_(&inst),
        m_(inst.num_clients()),
        q_(inst.num_objects()),
        graph_(m_ + q_ + 3) {
    const auto extra = static_cast<std::int64_t>(q_ - m_);
    client_arcs_.resize(m_);
    for (std::size_t i = 0; i < m_; ++i) {
      graph_.add_arc(root(), client_node(i), 1, 0.0);
      // Uncapacitated as in the model (the client supply caps it at 1); a
      // finite cap would leave the duals slack on assigned pairs.
      for (const auto& arc : inst.arcs(i)) {
        client_arcs_[i].push_back(
            graph_.add_arc(client_node(i), object_node(arc.object), unbounded(), -arc.beta));
      }
    }
    graph_.add_arc(root(), supersource(), extra, 0.0);
    for (std::size_t q = 0; q < q_; ++q) {
      supersource_arcs_.push_back(graph_.add_arc(supersource(), object_node(q), unbounded(), 0.0));
      graph_.add_arc(object_node(q), sink(), 1, 0.0);
    }
  }

  // More than can ever flow through one arc, so these arcs never saturate.
  [[nodiscard]] std::int64_t unbounded() const { return static_cast<std::int64_t>(q_) + 1; }

  [[nodiscard]] std::size_t client_node(std::size_t i) const { return i; }
  [[nodiscard]] std::size_t object_node(std::size_t q) const { return m_ + q; }
  [[nodiscard]] std::size_t supersource() const { return m_ + q_; }
  [[nodiscard]] std::size_t root() const { return m_ + q_ + 1; }
  [[nodiscard]] std::size_t sink() const { return m_ + q_ + 2; }

  /// Net supply of each model node: +1 per client, Q - M at s, -1 per object.
  [[nodiscard]] std::vector<std::int64_t> supplies() const {
    std::vector<std::int64_t> b(m_ + q_ + 1, 0);
    for (std::size_t i = 0; i < m_; ++i) b[client_node(i)] = 1;
    for (std::size_t q = 0; q < q_; ++q) b[object_node(q)] = -1;
    b[supersource()] = static_cast<std::int64_t>(q_ - m_);
    return b;
  }

  MinCostFlow<double>::Result solve() {
    return graph_.solve(root(), sink(), static_cast<std::int64_t>(q_));
  }

  /// Outflow minus inflow of every model node, counting only model arcs.
  [[nodiscard]] std::vector<std::int64_t> net_outflow() const {
    std::vector<std::int64_t> net(m_ + q_ + 1, 0);
    for (std::size_t i = 0; i < m_; ++i) {
      for (auto id : client_arcs_[i]) {
        const auto& a = graph_.arc(id);
        net[a.from] += a.flow;
        net[a.to] -= a.flow;
      }
    }
    for (auto id : supersource_arcs_) {
      const auto& a = graph_.arc(id);
      net[a.from] += a.flow;
      net[a.to] -= a.flow;
    }
    return net;
  }

  [[nodiscard]] std::int64_t client_arc_flow(std::size_t i, std::size_t k) const {
    return graph_.arc(client_arcs_.at(i).at(k)).flow;
  }

  [[nodiscard]] ObjectAssignment assignment() const {
    ObjectAssignment y(m_);
    const auto arcs = [&](std::size_t i) { return inst_->arcs(i); };
    for (std::size_t i = 0; i < m_; ++i) {
      for (std::size_t k = 0; k < client_arcs_[i].size(); ++k) {
        if (client_arc_flow(i, k) > 0) y[i] = arcs(i)[k].object;
      }
    }
    return y;
  }

  /// Optimal duals read off residual potentials: lambda = 0,
  /// p_q = phi_s - phi_q, pi_i = phi_i - phi_s.
  [[nodiscard]] PriceState duals() const {
    const auto phi = graph_.residual_potentials();
    PriceState ps;
    ps.lambda = 0.0;
    ps.prices.resize(q_);
    ps.profits.resize(m_);
    for (std::size_t q = 0; q < q_; ++q) ps.prices[q] = phi[supersource()] - phi[object_node(q)];
    for (std::size_t i = 0; i < m_; ++i) ps.profits[i] = phi[client_node(i)] - phi[supersource()];
    return ps;
  }

 private:
  const AsymmetricInstance* inst_;
  std::size_t m_;
  std::size_t q_;
  MinCostFlow<double> graph_;
  std::vector<std::vector<std::size_t>> client_arcs_;
  std::vector<std::size_t> supersource_arcs_;
};

struct ExactSolution {
  ObjectAssignment assignment;
  double objective = 0.0;
};

/// Exact optimum through the min-cost-flow formulation.
inline ExactSolution solve_exact_mcf(const AsymmetricInstance& inst) {
  FlowNetwork net(inst);
  const auto result = net.solve();
  if (result.flow != static_cast<std::int64_t>(inst.num_objects())) {
    throw InstanceError("flow network is infeasible");
  }
  ExactSolution out;
  out.assignment = net.assignment();
  out.objective = inst.objective(out.assignment);
  return out;
}

/// Exact optimum by enumerating every injective client -> object map.
/// Desk scale only: refuses instances with more than 10 clients or 6 relays.
inline ExactSolution solve_exhaustive(const AsymmetricInstance& inst) {
  if (inst.num_clients() > 10 || inst.num_relays() > 6) {
    throw SizeError("exhaustive search is limited to 10 clients and 6 relays (got " +
                    std::to_string(inst.num_clients()) + " and " + std::to_string(inst.num_relays()) +
                    ")");
  }
  const std::size_t m = inst.num_clients();
  ExactSolution best;
  best.objective = -std::numeric_limits<double>::infinity();
  ObjectAssignment current(m);
  std::vector<bool> taken(inst.num_relays(), false);

  auto search = [&](auto&& self, std::size_t i, double partial) -> void {
    if (i == m) {
      if (partial > best.objective) {
        best.objective = partial;
        best.assignment = current;
      }
      return;
    }
    for (const auto& arc : inst.arcs(i)) {
      const bool real = !inst.is_virtual(arc.object);
      if (real && taken[arc.object]) continue;
      if (real) taken[arc.object] = true;
      current[i] = arc.object;
      self(self, i + 1, partial + arc.beta);
      if (real) taken[arc.object] = false;
    }
    current[i].reset();
  };
  search(search, 0, 0.0);
  if (m == 0) best.objective = 0.0;
  return best;
}

/// Strongest-signal association: every client goes straight to its best
/// AP in K(i), relays unused. Ties go to the lowest AP index.
inline Assignment baseline_rssi(const BenefitTable& benefits, const TopologyInstance& topo) {
  const auto best = best_ap_sets(benefits, topo);
  Assignment s;
  for (std::size_t i = 0; i < topo.num_clients(); ++i) s.direct.push_back({i, best.client[i]});
  return s;
}

/// Random association: every client picks an AP of K(i) uniformly.
inline Assignment baseline_random(const BenefitTable& /*benefits*/, const TopologyInstance& topo, Rng& rng) {
  Assignment s;
  for (std::size_t i = 0; i < topo.num_clients(); ++i) {
    const auto& candidates = topo.client_aps.at(i);
    if (candidates.empty()) throw InstanceError("client " + std::to_string(i) + " has an empty AP set");
    s.direct.push_back({i, candidates[rng.index(candidates.size())]});
  }
  return s;
}

}  // namespace mmwave
