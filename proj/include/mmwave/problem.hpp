#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mmwave/benefits.hpp"
#include "mmwave/errors.hpp"
#include "mmwave/radio.hpp"
#include "mmwave/topology.hpp"

namespace mmwave {

struct DirectPair {
  std::size_t client = 0;
  std::size_t ap = 0;
  friend auto operator<=>(const DirectPair&, const DirectPair&) = default;
};

struct RelayTriple {
  std::size_t client = 0;
  std::size_t relay = 0;
  std::size_t ap = 0;
  friend auto operator<=>(const RelayTriple&, const RelayTriple&) = default;
};

/// A solution of the joint association/relaying problem: client-AP pairs
/// plus client-relay-AP triples.
struct Assignment {
  std::vector<DirectPair> direct;
  std::vector<RelayTriple> relayed;

  void normalize() {
    std::ranges::sort(direct);
    std::ranges::sort(relayed);
  }

  friend bool operator==(const Assignment&, const Assignment&) = default;
};

/// Per-client benefit of `s`; throws FeasibilityError naming the violated
/// constraint (one link per client, one client per relay, eligible links only).
inline std::vector<double> client_benefits(const BenefitTable& benefits, const Assignment& s) {
  const std::size_t m = benefits.num_clients();
  std::vector<std::optional<double>> per_client(m);
  std::vector<bool> relay_used(benefits.num_relays(), false);
  auto claim = [&](std::size_t i, double value) {
    if (i >= m) throw FeasibilityError("assignment references unknown client " + std::to_string(i));
    if (per_client[i]) {
      throw FeasibilityError("client constraint violated: client " + std::to_string(i) +
                             " is served more than once");
    }
    per_client[i] = value;
  };
  for (const auto& [i, k] : s.direct) {
    const auto a = i < m && k < benefits.num_aps() ? benefits.direct(i, k) : std::nullopt;
    if (!a) {
      throw FeasibilityError("domain constraint violated: pair (" + std::to_string(i) + "," +
                             std::to_string(k) + ") is not eligible");
    }
    claim(i, *a);
  }
  for (const auto& [i, j, k] : s.relayed) {
    const bool in_range = i < m && j < benefits.num_relays() && k < benefits.num_aps();
    const auto a = in_range ? benefits.relayed(i, j, k) : std::nullopt;
    if (!a) {
      throw FeasibilityError("domain constraint violated: triple (" + std::to_string(i) + "," +
                             std::to_string(j) + "," + std::to_string(k) + ") is not eligible");
    }
    if (relay_used[j]) {
      throw FeasibilityError("relay constraint violated: relay " + std::to_string(j) +
                             " assists more than one client");
    }
    relay_used[j] = true;
    claim(i, *a);
  }
  std::vector<double> out(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (!per_client[i]) {
      throw FeasibilityError("client constraint violated: client " + std::to_string(i) +
                             " is not served");
    }
    out[i] = *per_client[i];
  }
  return out;
}

/// Total throughput u of a feasible assignment, summed in client order.
inline double total_throughput(const BenefitTable& benefits, const Assignment& s) {
  double total = 0.0;
  for (double v : client_benefits(benefits, s)) total += v;
  return total;
}

struct BestAps {
  std::vector<std::size_t> client;  // k_i*
  std::vector<std::size_t> relay;   // k_j*
};

/// Rate-maximizing AP of every client and relay; ties go to the lowest index.
inline BestAps best_ap_sets(const BenefitTable& benefits, const TopologyInstance& topo) {
  auto argmax = [](const std::vector<std::size_t>& candidates, auto&& value, const std::string& who) {
    if (candidates.empty()) throw InstanceError(who + " has an empty AP set");
    std::size_t best = candidates.front();
    double best_value = value(best);
    for (auto k : candidates) {
      const double v = value(k);
      if (v > best_value || (v == best_value && k < best)) {
        best = k;
        best_value = v;
      }
    }
    return best;
  };
  BestAps out;
  out.client.resize(topo.num_clients());
  out.relay.resize(topo.num_relays());
  for (std::size_t i = 0; i < topo.num_clients(); ++i) {
    out.client[i] = argmax(topo.client_aps.at(i), [&](std::size_t k) { return *benefits.direct(i, k); },
                           "client " + std::to_string(i));
  }
  for (std::size_t j = 0; j < topo.num_relays(); ++j) {
    out.relay[j] = argmax(topo.relay_aps.at(j), [&](std::size_t k) { return *benefits.relay_ap(j, k); },
                          "relay " + std::to_string(j));
  }
  return out;
}

/// How rates in bits/s map to auction benefit units.
struct BenefitScaling {
  double unit_bps = 1.0;
  std::optional<int> integer_digits;

  [[nodiscard]] double apply(double bps) const {
    const double v = bps / unit_bps;
    return integer_digits ? scale_to_integer(v, *integer_digits) : v;
  }
};

struct ObjectArc {
  std::size_t object = 0;
  double beta = 0.0;
};

/// Client -> object map for the clients/objects problem; nullopt = unassigned.
using ObjectAssignment = std::vector<std::optional<std::size_t>>;

/// Clients/objects asymmetric assignment instance.
///
/// Objects 0..N-1 are the real relays, object N+i is the virtual relay that
/// stands for client i's direct link to its best AP. Only client i may take
/// object N+i.
class AsymmetricInstance {
 public:
  AsymmetricInstance() = default;

  /// `relay_arcs[i]` lists (relay, beta) pairs of N*(i); `direct_beta[i]` is
  /// the benefit of the virtual object. Every relay arc must strictly beat
  /// the client's direct benefit.
  AsymmetricInstance(std::size_t num_relays, std::vector<std::vector<ObjectArc>> relay_arcs,
                     std::vector<double> direct_beta)
      : num_relays_(num_relays) {
    const std::size_t m = direct_beta.size();
    if (relay_arcs.size() != m) throw InstanceError("arc table and direct benefits disagree in size");
    arcs_.resize(m);
    object_clients_.assign(num_relays + m, {});
    for (std::size_t i = 0; i < m; ++i) {
      auto& row = relay_arcs[i];
      std::ranges::sort(row, {}, &ObjectArc::object);
      if (!std::isfinite(direct_beta[i]) || direct_beta[i] < 0) {
        throw InstanceError("direct benefit of client " + std::to_string(i) + " is invalid");
      }
      for (std::size_t a = 0; a < row.size(); ++a) {
        const auto& arc = row[a];
        if (arc.object >= num_relays) throw InstanceError("relay arc references unknown relay");
        if (a > 0 && row[a - 1].object == arc.object) throw InstanceError("duplicate relay arc");
        if (!std::isfinite(arc.beta) || !(arc.beta > direct_beta[i])) {
          throw InstanceError("relay arc (" + std::to_string(i) + "," + std::to_string(arc.object) +
                              ") does not improve on the direct link");
        }
        arcs_[i].push_back(arc);
        object_clients_[arc.object].push_back(i);
      }
      arcs_[i].push_back({num_relays + i, direct_beta[i]});
      object_clients_[num_relays + i].push_back(i);
    }
    for (const auto& row : arcs_) {
      for (const auto& arc : row) {
        max_beta_ = std::max(max_beta_, arc.beta);
        min_beta_ = std::min(min_beta_, arc.beta);
      }
    }
    if (m == 0) max_beta_ = min_beta_ = 0.0;
  }

  [[nodiscard]] std::size_t num_clients() const { return arcs_.size(); }
  [[nodiscard]] std::size_t num_relays() const { return num_relays_; }
  [[nodiscard]] std::size_t num_objects() const { return num_relays_ + arcs_.size(); }

  [[nodiscard]] std::size_t virtual_object(std::size_t i) const { return num_relays_ + i; }
  [[nodiscard]] bool is_virtual(std::size_t q) const { return q >= num_relays_; }

  /// Q(i) with benefits, sorted by object; the virtual object is last.
  [[nodiscard]] std::span<const ObjectArc> arcs(std::size_t i) const { return arcs_.at(i); }

  /// M(q), sorted.
  [[nodiscard]] std::span<const std::size_t> clients_of(std::size_t q) const {
    return object_clients_.at(q);
  }

  [[nodiscard]] std::optional<double> beta(std::size_t i, std::size_t q) const {
    if (i >= arcs_.size()) return std::nullopt;
    const auto& row = arcs_[i];
    auto it = std::ranges::lower_bound(row, q, {}, &ObjectArc::object);
    if (it == row.end() || it->object != q) return std::nullopt;
    return it->beta;
  }

  [[nodiscard]] double direct_beta(std::size_t i) const { return arcs_.at(i).back().beta; }

  [[nodiscard]] double max_beta() const { return max_beta_; }
  [[nodiscard]] double min_beta() const { return min_beta_; }
  /// Benefit spread max beta - min beta over all eligible pairs.
  [[nodiscard]] double delta() const { return max_beta_ - min_beta_; }

  /// Finite stand-in for +/- infinity in bids and joining-relay prices.
  [[nodiscard]] double sentinel() const { return 10.0 * std::max(max_beta_, 1.0); }

  /// Best AP of client i (k_i*) and of relay j (k_j*); empty for instances
  /// built directly from a benefit table.
  std::vector<std::size_t> client_best_ap;
  std::vector<std::size_t> relay_best_ap;

  /// Throws FeasibilityError unless every client holds one eligible object
  /// and no object is held twice. With `allow_partial`, unassigned clients
  /// are accepted.
  void validate(const ObjectAssignment& y, bool allow_partial = false) const {
    if (y.size() != num_clients()) throw FeasibilityError("assignment size does not match clients");
    std::vector<bool> taken(num_objects(), false);
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (!y[i]) {
        if (allow_partial) continue;
        throw FeasibilityError("client " + std::to_string(i) + " is not assigned");
      }
      const auto q = *y[i];
      if (!beta(i, q)) {
        throw FeasibilityError("pair (" + std::to_string(i) + "," + std::to_string(q) +
                               ") is not eligible");
      }
      if (taken[q]) throw FeasibilityError("object " + std::to_string(q) + " assigned twice");
      taken[q] = true;
    }
  }

  /// Sum of beta over assigned pairs, in client order.
  [[nodiscard]] double objective(const ObjectAssignment& y) const {
    validate(y);
    double total = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) total += *beta(i, *y[i]);
    return total;
  }

 private:
  std::size_t num_relays_ = 0;
  std::vector<std::vector<ObjectArc>> arcs_;
  std::vector<std::vector<std::size_t>> object_clients_;
  double max_beta_ = -std::numeric_limits<double>::infinity();
  double min_beta_ = std::numeric_limits<double>::infinity();
};

/// Transformation to the clients/objects domain: picks k_i* and k_j*,
/// keeps relays that strictly beat the best direct link (N*(i)) and appends
/// one virtual object per client.
inline AsymmetricInstance build_asymmetric(const BenefitTable& benefits, const TopologyInstance& topo,
                                           const BenefitScaling& scaling = {}) {
  const auto best = best_ap_sets(benefits, topo);
  const std::size_t m = topo.num_clients();
  std::vector<std::vector<ObjectArc>> relay_arcs(m);
  std::vector<double> direct(m);
  for (std::size_t i = 0; i < m; ++i) {
    direct[i] = scaling.apply(*benefits.direct(i, best.client[i]));
    for (auto j : topo.client_relays.at(i)) {
      const double b = scaling.apply(*benefits.relayed(i, j, best.relay[j]));
      if (b > direct[i]) relay_arcs[i].push_back({j, b});
    }
  }
  AsymmetricInstance inst(topo.num_relays(), std::move(relay_arcs), std::move(direct));
  inst.client_best_ap = best.client;
  inst.relay_best_ap = best.relay;
  return inst;
}

/// Maps a feasible clients/objects solution back to pairs and triples.
inline Assignment recover_assignment(const AsymmetricInstance& inst, const ObjectAssignment& y) {
  inst.validate(y);
  if (inst.client_best_ap.size() != inst.num_clients() ||
      inst.relay_best_ap.size() != inst.num_relays()) {
    throw InstanceError("instance carries no best-AP metadata");
  }
  Assignment s;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const auto q = *y[i];
    if (inst.is_virtual(q)) {
      s.direct.push_back({i, inst.client_best_ap[i]});
    } else {
      s.relayed.push_back({i, q, inst.relay_best_ap[q]});
    }
  }
  return s;
}

/// Number of connections (direct + relayed) landing on each AP.
inline std::vector<std::size_t> ap_connection_counts(const Assignment& s, std::size_t num_aps) {
  std::vector<std::size_t> counts(num_aps, 0);
  for (const auto& p : s.direct) counts.at(p.ap) += 1;
  for (const auto& t : s.relayed) counts.at(t.ap) += 1;
  return counts;
}

struct LoadBalance {
  std::vector<double> mean;
  std::vector<double> stderr_of_mean;
};

/// Empirical per-AP mean connection count over sampled assignments.
inline LoadBalance check_load_balance(std::span<const Assignment> samples, std::size_t num_aps) {
  if (samples.empty()) throw DomainError("load-balance check needs at least one sample");
  const auto n = static_cast<double>(samples.size());
  LoadBalance out{std::vector<double>(num_aps, 0.0), std::vector<double>(num_aps, 0.0)};
  std::vector<double> sum_sq(num_aps, 0.0);
  for (const auto& s : samples) {
    const auto counts = ap_connection_counts(s, num_aps);
    for (std::size_t k = 0; k < num_aps; ++k) {
      out.mean[k] += static_cast<double>(counts[k]);
      sum_sq[k] += static_cast<double>(counts[k] * counts[k]);
    }
  }
  for (std::size_t k = 0; k < num_aps; ++k) {
    out.mean[k] /= n;
    if (samples.size() > 1) {
      const double var = (sum_sq[k] - n * out.mean[k] * out.mean[k]) / (n - 1.0);
      out.stderr_of_mean[k] = std::sqrt(std::max(var, 0.0) / n);
    }
  }
  return out;
}

}  // namespace mmwave
