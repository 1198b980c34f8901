#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "mmwave/errors.hpp"
#include "mmwave/problem.hpp"

namespace mmwave {

/// Dual variables of the min-cost-flow formulation: object prices p,
/// client profits pi and the supersource price lambda.
struct PriceState {
  std::vector<double> prices;
  std::vector<double> profits;
  double lambda = 0.0;
};

struct AuctionConfig {
  double epsilon = 0.1;
  std::size_t max_iterations = 50'000'000;
  bool record_trace = false;

  void validate() const {
    if (!(epsilon > 0) || !std::isfinite(epsilon)) throw DomainError("epsilon must be > 0");
  }
};

struct AuctionTraceRow {
  std::size_t iteration = 0;
  std::string actor;
  std::string action;
  std::size_t object = 0;
  double old_price = 0.0;
  double new_price = 0.0;
};

struct AuctionStats {
  std::size_t bids = 0;
  std::size_t evictions = 0;
  std::size_t reverse_steps = 0;
  [[nodiscard]] std::size_t iterations() const { return bids + reverse_steps; }
};

/// Assignment plus prices, the state both auction phases operate on.
struct AuctionState {
  ObjectAssignment assignment;
  PriceState prices;
};

struct EpsCsReport {
  bool ok = true;
  int condition = 0;  // 1: pi + p >= beta - eps, 2: equality on assigned pairs, 3: unassigned prices
  std::size_t client = 0;
  std::size_t object = 0;
  std::string detail;
};

namespace detail {

inline double eps_cs_tolerance(const AsymmetricInstance& inst) {
  return 1e-9 * std::max(1.0, std::abs(inst.max_beta()));
}

struct BestTwo {
  std::size_t object = 0;
  double best = 0.0;
  double second = 0.0;
};

/// Best and second-best value of beta - price over Q(i); the second value is
/// -sentinel when Q(i) is a singleton. Ties go to the lowest object index.
template <typename PriceOf>
BestTwo best_two_objects(const AsymmetricInstance& inst, std::size_t i, PriceOf&& price_of) {
  BestTwo r;
  bool have_best = false;
  bool have_second = false;
  for (const auto& arc : inst.arcs(i)) {
    const double v = arc.beta - price_of(arc.object);
    if (!have_best || v > r.best) {
      if (have_best) {
        r.second = r.best;
        have_second = true;
      }
      r.best = v;
      r.object = arc.object;
      have_best = true;
    } else if (!have_second || v > r.second) {
      r.second = v;
      have_second = true;
    }
  }
  if (!have_second) r.second = -inst.sentinel();
  return r;
}

inline std::vector<std::optional<std::size_t>> holders(const AsymmetricInstance& inst,
                                                       const ObjectAssignment& y) {
  std::vector<std::optional<std::size_t>> h(inst.num_objects());
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i]) h.at(*y[i]) = i;
  }
  return h;
}

}  // namespace detail

/// Checks the three epsilon-complementary-slackness conditions and reports the
/// first violation with its witness.
inline EpsCsReport check_eps_cs(const AsymmetricInstance& inst, const ObjectAssignment& s,
                                const PriceState& ps, double epsilon) {
  const double tol = detail::eps_cs_tolerance(inst);
  EpsCsReport r;
  auto fail = [&](int cond, std::size_t i, std::size_t q, std::string what) {
    r.ok = false;
    r.condition = cond;
    r.client = i;
    r.object = q;
    r.detail = std::move(what);
    return r;
  };
  if (s.size() != inst.num_clients() || ps.profits.size() != inst.num_clients() ||
      ps.prices.size() != inst.num_objects()) {
    return fail(0, 0, 0, "state sizes do not match the instance");
  }
  for (std::size_t i = 0; i < inst.num_clients(); ++i) {
    for (const auto& arc : inst.arcs(i)) {
      if (ps.profits[i] + ps.prices[arc.object] < arc.beta - epsilon - tol) {
        return fail(1, i, arc.object, "pi + p < beta - eps");
      }
    }
  }
  std::vector<bool> assigned(inst.num_objects(), false);
  double min_assigned = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!s[i]) continue;
    const auto q = *s[i];
    const auto b = inst.beta(i, q);
    if (!b) return fail(2, i, q, "assigned pair is not eligible");
    if (std::abs(ps.profits[i] + ps.prices[q] - *b) > tol) {
      return fail(2, i, q, "pi + p != beta on an assigned pair");
    }
    assigned[q] = true;
    min_assigned = std::min(min_assigned, ps.prices[q]);
  }
  for (std::size_t q = 0; q < inst.num_objects(); ++q) {
    if (!assigned[q] && ps.prices[q] > min_assigned + tol) {
      return fail(3, 0, q, "unassigned object priced above the minimum assigned price");
    }
  }
  return r;
}

/// Zero prices, empty assignment and pi_i = max_q beta(i,q): the starting
/// point of the forward auction.
inline AuctionState initial_auction_state(const AsymmetricInstance& inst) {
  AuctionState st;
  st.assignment.assign(inst.num_clients(), std::nullopt);
  st.prices.prices.assign(inst.num_objects(), 0.0);
  st.prices.profits.resize(inst.num_clients());
  for (std::size_t i = 0; i < inst.num_clients(); ++i) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& arc : inst.arcs(i)) best = std::max(best, arc.beta);
    st.prices.profits[i] = best;
  }
  return st;
}

/// Forward auction: unassigned clients, served FIFO in index order, bid
/// p + u - omega + eps on their best object until every client is assigned.
inline void solve_forward(const AsymmetricInstance& inst, AuctionState& st, const AuctionConfig& cfg,
                          AuctionStats& stats, std::vector<AuctionTraceRow>* trace = nullptr) {
  cfg.validate();
  auto& prices = st.prices.prices;
  auto holder = detail::holders(inst, st.assignment);
  std::deque<std::size_t> queue;
  for (std::size_t i = 0; i < inst.num_clients(); ++i) {
    if (!st.assignment[i]) queue.push_back(i);
  }
  while (!queue.empty()) {
    if (stats.iterations() >= cfg.max_iterations) {
      throw IterationLimitError("forward auction exceeded " + std::to_string(cfg.max_iterations) +
                                " iterations");
    }
    const std::size_t i = queue.front();
    queue.pop_front();
    const auto top = detail::best_two_objects(inst, i, [&](std::size_t q) { return prices[q]; });
    const std::size_t q = top.object;
    const double old_price = prices[q];
    const double bid = old_price + top.best - top.second + cfg.epsilon;
    if (holder[q]) {
      const std::size_t evicted = *holder[q];
      st.assignment[evicted].reset();
      queue.push_back(evicted);
      ++stats.evictions;
      if (trace) {
        trace->push_back({stats.iterations(), "c" + std::to_string(evicted), "evicted", q, old_price, bid});
      }
    }
    prices[q] = bid;
    holder[q] = i;
    st.assignment[i] = q;
    st.prices.profits[i] = *inst.beta(i, q) - bid;
    ++stats.bids;
    if (trace) trace->push_back({stats.iterations(), "c" + std::to_string(i), "bid", q, old_price, bid});
  }
}

/// Reverse auction with lambda fixed at the minimum assigned price: every
/// unassigned object priced above lambda lowers its price to attract its
/// best client, until all unassigned prices are <= lambda.
inline void solve_reverse(const AsymmetricInstance& inst, AuctionState& st, const AuctionConfig& cfg,
                          AuctionStats& stats, std::vector<AuctionTraceRow>* trace = nullptr) {
  cfg.validate();
  inst.validate(st.assignment);
  auto& prices = st.prices.prices;
  auto& profits = st.prices.profits;
  auto holder = detail::holders(inst, st.assignment);

  double lambda = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < inst.num_clients(); ++i) lambda = std::min(lambda, prices[*st.assignment[i]]);
  if (inst.num_clients() == 0) lambda = 0.0;
  st.prices.lambda = lambda;

  std::deque<std::size_t> queue;
  for (std::size_t q = 0; q < inst.num_objects(); ++q) {
    if (!holder[q] && prices[q] > lambda) queue.push_back(q);
  }
  const double sentinel = inst.sentinel();
  while (!queue.empty()) {
    const std::size_t q = queue.front();
    queue.pop_front();
    if (holder[q] || prices[q] <= lambda) continue;
    if (stats.iterations() >= cfg.max_iterations) {
      throw IterationLimitError("reverse auction exceeded " + std::to_string(cfg.max_iterations) +
                                " iterations");
    }
    ++stats.reverse_steps;
    const double old_price = prices[q];

    std::optional<std::size_t> best_client;
    double gamma = 0.0;
    double omega = -sentinel;
    for (auto i : inst.clients_of(q)) {
      const double margin = *inst.beta(i, q) - profits[i];
      if (!best_client || margin > gamma) {
        if (best_client) omega = std::max(omega, gamma);
        best_client = i;
        gamma = margin;
      } else {
        omega = std::max(omega, margin);
      }
    }

    if (!best_client || lambda >= gamma - cfg.epsilon) {
      prices[q] = lambda;
      if (trace) trace->push_back({stats.iterations(), "o" + std::to_string(q), "reset", q, old_price, lambda});
      continue;
    }
    const std::size_t i = *best_client;
    const double new_price = gamma - std::min(gamma - lambda, gamma - omega + cfg.epsilon);
    const std::size_t previous = *st.assignment[i];
    holder[previous].reset();
    holder[q] = i;
    st.assignment[i] = q;
    prices[q] = new_price;
    profits[i] = *inst.beta(i, q) - new_price;
    if (prices[previous] > lambda) queue.push_back(previous);
    if (trace) trace->push_back({stats.iterations(), "o" + std::to_string(q), "attract", q, old_price, new_price});
  }
  // Report a dual-feasible supersource price (lambda <= p_q for every q).
  for (double p : prices) st.prices.lambda = std::min(st.prices.lambda, p);
}

struct CentralizedResult {
  ObjectAssignment assignment;
  PriceState prices;
  AuctionStats stats;
  std::vector<AuctionTraceRow> trace;
};

/// Forward then reverse auction from zero prices.
inline CentralizedResult solve_centralized(const AsymmetricInstance& inst, const AuctionConfig& cfg) {
  cfg.validate();
  CentralizedResult out;
  auto st = initial_auction_state(inst);
  auto* trace = cfg.record_trace ? &out.trace : nullptr;
  solve_forward(inst, st, cfg, out.stats, trace);
  solve_reverse(inst, st, cfg, out.stats, trace);
  out.assignment = std::move(st.assignment);
  out.prices = std::move(st.prices);
  return out;
}

}  // namespace mmwave
