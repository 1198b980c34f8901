#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "mmwave/problem.hpp"
#include "mmwave/rng.hpp"

namespace testing_support {

struct RandomShape {
  std::size_t max_clients = 20;
  std::size_t max_relays = 10;
  double arc_probability = 0.4;
  bool integer = false;
};

/// Random clients/objects instance; relay arcs strictly beat the direct link.
inline mmwave::AsymmetricInstance random_instance(std::uint64_t seed, const RandomShape& shape = {}) {
  mmwave::Rng rng(seed);
  const std::size_t m = 1 + rng.index(shape.max_clients);
  const std::size_t n = rng.index(std::min(shape.max_relays, m) + 1);
  std::vector<std::vector<mmwave::ObjectArc>> arcs(m);
  std::vector<double> direct(m);
  for (std::size_t i = 0; i < m; ++i) {
    direct[i] = shape.integer ? static_cast<double>(rng.uniform_int(1, 50)) : rng.uniform(1.0, 5.0);
    for (std::size_t j = 0; j < n; ++j) {
      if (!rng.bernoulli(shape.arc_probability)) continue;
      const double b = shape.integer ? direct[i] + static_cast<double>(rng.uniform_int(1, 50))
                                     : direct[i] + rng.uniform(0.01, 5.0);
      arcs[i].push_back({j, b});
    }
  }
  return mmwave::AsymmetricInstance(n, std::move(arcs), std::move(direct));
}

/// Optimum by dynamic programming over (client, set of used relays).
/// Independent of the library solvers; needs at most ~16 relays.
inline double dp_optimum(const mmwave::AsymmetricInstance& inst) {
  const std::size_t n = inst.num_relays();
  const std::size_t states = std::size_t{1} << n;
  const double neg = -std::numeric_limits<double>::infinity();
  std::vector<double> best(states, neg);
  best[0] = 0.0;
  for (std::size_t i = 0; i < inst.num_clients(); ++i) {
    std::vector<double> next(states, neg);
    for (std::size_t mask = 0; mask < states; ++mask) {
      if (best[mask] == neg) continue;
      for (const auto& arc : inst.arcs(i)) {
        if (inst.is_virtual(arc.object)) {
          next[mask] = std::max(next[mask], best[mask] + arc.beta);
        } else if (!(mask >> arc.object & 1U)) {
          const auto m2 = mask | (std::size_t{1} << arc.object);
          next[m2] = std::max(next[m2], best[mask] + arc.beta);
        }
      }
    }
    best = std::move(next);
  }
  return *std::ranges::max_element(best);
}

}  // namespace testing_support
