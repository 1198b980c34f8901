#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "mmwave/errors.hpp"
#include "mmwave/radio.hpp"
#include "mmwave/topology.hpp"

namespace mmwave {

/// Throughput benefits in bits/s: a(i,k) for direct association and
/// a(i,j,k) = min(R(d_ij), R(d_jk)) for a relayed path.
///
/// Link rates are stored densely; ineligible pairs hold a negative marker
/// and read back as std::nullopt.
class BenefitTable {
 public:
  BenefitTable() = default;
  BenefitTable(std::size_t clients, std::size_t relays, std::size_t aps)
      : clients_(clients),
        relays_(relays),
        aps_(aps),
        client_ap_(clients * aps, kIneligible),
        client_relay_(clients * relays, kIneligible),
        relay_ap_(relays * aps, kIneligible) {}

  [[nodiscard]] std::size_t num_clients() const { return clients_; }
  [[nodiscard]] std::size_t num_relays() const { return relays_; }
  [[nodiscard]] std::size_t num_aps() const { return aps_; }

  [[nodiscard]] std::optional<double> direct(std::size_t i, std::size_t k) const {
    return read(client_ap_, i * aps_ + k);
  }

  [[nodiscard]] std::optional<double> client_relay(std::size_t i, std::size_t j) const {
    return read(client_relay_, i * relays_ + j);
  }

  [[nodiscard]] std::optional<double> relay_ap(std::size_t j, std::size_t k) const {
    return read(relay_ap_, j * aps_ + k);
  }

  /// a(i,j,k); nullopt unless both hops are eligible.
  [[nodiscard]] std::optional<double> relayed(std::size_t i, std::size_t j, std::size_t k) const {
    const auto first = client_relay(i, j);
    const auto second = relay_ap(j, k);
    if (!first || !second) return std::nullopt;
    return std::min(*first, *second);
  }

  void set_direct(std::size_t i, std::size_t k, double r) { write(client_ap_, i * aps_ + k, r); }
  void set_client_relay(std::size_t i, std::size_t j, double r) {
    write(client_relay_, i * relays_ + j, r);
  }
  void set_relay_ap(std::size_t j, std::size_t k, double r) { write(relay_ap_, j * aps_ + k, r); }

 private:
  static constexpr double kIneligible = -1.0;

  static std::optional<double> read(const std::vector<double>& v, std::size_t at) {
    if (at >= v.size() || v[at] < 0) return std::nullopt;
    return v[at];
  }

  static void write(std::vector<double>& v, std::size_t at, double r) {
    if (at >= v.size()) throw DomainError("benefit index out of range");
    if (!(r >= 0) || !std::isfinite(r)) throw DomainError("rates must be finite and >= 0");
    v[at] = r;
  }

  std::size_t clients_ = 0;
  std::size_t relays_ = 0;
  std::size_t aps_ = 0;
  std::vector<double> client_ap_;
  std::vector<double> client_relay_;
  std::vector<double> relay_ap_;
};

/// Evaluates the rate model on every eligible link of `topo`. Blocked links
/// carry rate 0. Coincident endpoints raise DomainError.
inline BenefitTable build_benefits(const RadioParams& params, const TopologyInstance& topo) {
  params.validate();
  BenefitTable table(topo.num_clients(), topo.num_relays(), topo.num_aps());
  auto link_rate = [&](NodeRef x, NodeRef y) {
    const double d = distance(topo.position(x), topo.position(y));
    if (!(d > 0)) throw DomainError("coincident nodes " + x.str() + " and " + y.str());
    if (topo.is_blocked(x, y)) return 0.0;
    return rate(params, d);
  };
  for (std::size_t i = 0; i < topo.num_clients(); ++i) {
    for (auto k : topo.client_aps.at(i)) table.set_direct(i, k, link_rate(client_ref(i), ap_ref(k)));
    for (auto j : topo.client_relays.at(i)) {
      table.set_client_relay(i, j, link_rate(client_ref(i), relay_ref(j)));
    }
  }
  for (std::size_t j = 0; j < topo.num_relays(); ++j) {
    for (auto k : topo.relay_aps.at(j)) table.set_relay_ap(j, k, link_rate(relay_ref(j), ap_ref(k)));
  }
  return table;
}

}  // namespace mmwave
