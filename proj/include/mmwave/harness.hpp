#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "mmwave/auction.hpp"
#include "mmwave/benefits.hpp"
#include "mmwave/errors.hpp"
#include "mmwave/oracle.hpp"
#include "mmwave/problem.hpp"
#include "mmwave/radio.hpp"
#include "mmwave/rng.hpp"
#include "mmwave/sim/simulator.hpp"
#include "mmwave/topology.hpp"

namespace mmwave {

enum class ApLayout { line, grid };

struct GeneratorSpec {
  std::size_t num_aps = 4;
  std::size_t clients_per_ap = 5;
  std::size_t num_relays = 10;
  double snr_target_db = 10.0;
  double ap_spacing_factor = 1.1;
  ApLayout layout = ApLayout::line;

  [[nodiscard]] std::size_t num_clients() const { return num_aps * clients_per_ap; }

  void validate() const {
    if (num_aps < 1) throw SpecError("num_aps must be >= 1");
    if (clients_per_ap < 1) throw SpecError("clients_per_ap must be >= 1");
    if (num_relays > num_clients()) {
      throw SpecError("num_relays (" + std::to_string(num_relays) + ") exceeds the number of clients (" +
                      std::to_string(num_clients()) + ")");
    }
    if (!(ap_spacing_factor > 0) || !std::isfinite(ap_spacing_factor)) {
      throw SpecError("ap_spacing_factor must be > 0");
    }
  }
};

inline Point uniform_in_disk(Rng& rng, Point centre, double radius) {
  const double rho = radius * std::sqrt(rng.uniform());
  const double theta = 2.0 * std::numbers::pi * rng.uniform();
  return {centre.x + rho * std::cos(theta), centre.y + rho * std::sin(theta)};
}

inline std::vector<Point> ap_positions(const GeneratorSpec& spec, double radius) {
  const double spacing = spec.ap_spacing_factor * radius;
  std::vector<Point> aps;
  if (spec.layout == ApLayout::line) {
    for (std::size_t k = 0; k < spec.num_aps; ++k) aps.push_back({static_cast<double>(k) * spacing, 0.0});
  } else {
    const auto cols = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(spec.num_aps))));
    for (std::size_t k = 0; k < spec.num_aps; ++k) {
      aps.push_back({static_cast<double>(k % cols) * spacing, static_cast<double>(k / cols) * spacing});
    }
  }
  return aps;
}

/// Random topology: APs spaced ap_spacing_factor * r apart, where r is the
/// distance at which the SNR falls to the target. Client i is drawn
/// uniformly in the disk of AP i mod K; each relay in the disk of an AP
/// chosen uniformly. Links are eligible within distance r.
inline TopologyInstance generate_topology(const RadioParams& radio, const GeneratorSpec& spec,
                                          std::uint64_t seed) {
  spec.validate();
  radio.validate();
  const double r = cell_radius(radio, spec.snr_target_db);
  const auto aps = ap_positions(spec, r);
  Rng rng(seed);
  std::vector<Point> clients;
  std::vector<Point> relays;
  for (std::size_t i = 0; i < spec.num_clients(); ++i) {
    clients.push_back(uniform_in_disk(rng, aps[i % spec.num_aps], r));
  }
  for (std::size_t j = 0; j < spec.num_relays; ++j) {
    relays.push_back(uniform_in_disk(rng, aps[rng.index(spec.num_aps)], r));
  }
  auto topo = TopologyInstance::from_radius(std::move(clients), std::move(relays), aps, r);
  topo.validate();
  return topo;
}

// ---- dynamic scenarios ------------------------------------------------------

struct RandomBlockage {
  double probability = 0.0;
  sim::TimeMs duration_ms = 10;
};

/// A simulate run: network, protocol options and timed events.
struct ScenarioSpec {
  RadioParams radio = RadioParams::table_one();
  std::optional<GeneratorSpec> generator;
  std::optional<TopologyInstance> topology;
  std::vector<NodeRef> initially_inactive;
  double epsilon = 0.1;
  std::size_t horizon_slots = 0;
  sim::TimeMs slot_ms = 10;
  std::vector<sim::ScenarioEvent> events;
  std::optional<RandomBlockage> random_blockage;
  std::uint64_t seed = 1;
  sim::TimeMs latency_min_ms = 1;
  sim::TimeMs latency_max_ms = 5;
  bool broadcast_prices = false;
  bool reverse_auction = false;
  BenefitScaling scaling{1e9, std::nullopt};
};

struct PreparedSimulation {
  TopologyInstance topology;
  sim::NetworkModel model;
  sim::SimConfig config;
  std::vector<sim::ScenarioEvent> events;
};

inline PreparedSimulation prepare_simulation(const ScenarioSpec& spec) {
  if (spec.generator.has_value() == spec.topology.has_value()) {
    throw ScenarioError("scenario needs exactly one of 'generator' and 'topology'");
  }
  PreparedSimulation out{spec.topology ? *spec.topology
                                       : generate_topology(spec.radio, *spec.generator, derive_seed(spec.seed, 0x7090)),
                         {}, {}, spec.events};
  out.model = sim::NetworkModel::from_topology(spec.radio, out.topology, spec.scaling);
  for (const auto& ref : spec.initially_inactive) {
    if (!out.model.contains(ref) || ref.kind == NodeKind::ap) {
      throw ScenarioError("initially_inactive references unknown node " + ref.str());
    }
    if (ref.kind == NodeKind::client) out.model.set_client_active(ref.id, false);
    if (ref.kind == NodeKind::relay) out.model.set_relay_active(ref.id, false);
  }
  auto& c = out.config;
  c.epsilon = spec.epsilon;
  c.latency_min_ms = spec.latency_min_ms;
  c.latency_max_ms = spec.latency_max_ms;
  c.broadcast_prices = spec.broadcast_prices;
  c.reverse_auction = spec.reverse_auction;
  c.seed = spec.seed;
  c.slot_ms = spec.slot_ms;
  c.horizon_slots = spec.horizon_slots;
  if (spec.random_blockage) {
    auto extra = sim::random_blockage_events(out.model, spec.random_blockage->probability,
                                             spec.random_blockage->duration_ms, spec.horizon_slots, spec.slot_ms,
                                             spec.seed);
    out.events.insert(out.events.end(), extra.begin(), extra.end());
  }
  std::ranges::stable_sort(out.events, {}, &sim::ScenarioEvent::time);
  return out;
}

// ---- Monte-Carlo experiments -----------------------------------------------

enum class Policy { auction, optm, rssi, rand, central };

inline const char* to_string(Policy p) {
  switch (p) {
    case Policy::auction: return "AUCTION";
    case Policy::optm: return "OPTM";
    case Policy::rssi: return "RSSI";
    case Policy::rand: return "RAND";
    case Policy::central: return "CENTRAL";
  }
  return "?";
}

inline Policy parse_policy(const std::string& s) {
  for (auto p : {Policy::auction, Policy::optm, Policy::rssi, Policy::rand, Policy::central}) {
    if (s == to_string(p)) return p;
  }
  throw SpecError("unknown policy '" + s + "' (expected AUCTION, OPTM, RSSI, RAND or CENTRAL)");
}

/// Sweep over AP count, clients per AP, relay count and epsilon, with
/// `repetitions` random topologies per grid point. Topologies are shared
/// across epsilon values.
struct ExperimentSpec {
  RadioParams radio = RadioParams::table_one();
  GeneratorSpec generator;
  std::vector<std::size_t> num_aps;         // empty: generator value
  std::vector<std::size_t> clients_per_ap;  // empty: generator value
  std::vector<std::size_t> num_relays;      // empty: generator value
  std::vector<double> epsilons{0.1};
  std::size_t repetitions = 100;
  std::vector<Policy> policies{Policy::auction, Policy::optm, Policy::rssi, Policy::rand};
  std::uint64_t seed = 1;
  BenefitScaling scaling{1e9, std::nullopt};
  sim::TimeMs latency_min_ms = 1;
  sim::TimeMs latency_max_ms = 5;
  bool broadcast_prices = false;
  std::size_t threads = 1;

  void validate() const {
    if (repetitions < 1) throw SpecError("repetitions must be >= 1");
    if (epsilons.empty()) throw SpecError("epsilon list is empty");
    for (double e : epsilons) {
      if (!(e > 0) || !std::isfinite(e)) throw SpecError("epsilon values must be > 0");
    }
    if (policies.empty()) throw SpecError("policy list is empty");
    for (auto k : num_aps) {
      if (k < 1) throw SpecError("num_aps values must be >= 1");
    }
    if (!(scaling.unit_bps > 0)) throw SpecError("benefit_unit_bps must be > 0");
  }
};

struct MetricsRow {
  std::size_t experiment = 0;
  std::size_t repetition = 0;
  std::size_t num_aps = 0;
  std::size_t num_clients = 0;
  std::size_t num_relays = 0;
  double epsilon = 0.0;
  Policy policy = Policy::auction;
  bool ok = true;
  std::string error;
  double objective = 0.0;      // benefit units
  double objective_bps = 0.0;
  double gap_to_oracle = 0.0;  // benefit units, oracle minus this policy
  std::size_t iterations = 0;
  std::size_t accepted_bids = 0;
  std::size_t messages = 0;
  std::vector<std::size_t> ap_counts;
  double wall_ms = 0.0;  // kept out of the deterministic metrics file
};

struct SummaryRow {
  std::size_t num_aps = 0;
  std::size_t num_clients = 0;
  std::size_t num_relays = 0;
  double epsilon = 0.0;
  Policy policy = Policy::auction;
  std::size_t runs = 0;
  std::size_t failed = 0;
  double mean_objective = 0.0;
  double stderr_objective = 0.0;
  double mean_iterations = 0.0;
  double stderr_iterations = 0.0;
  double max_gap = 0.0;        // Delta_max over runs
  double gap_bound = 0.0;      // M * epsilon
};

struct ExperimentResult {
  std::vector<MetricsRow> rows;
  std::vector<SummaryRow> summary;
};

namespace detail {

struct GridPoint {
  std::size_t num_aps;
  std::size_t clients_per_ap;
  std::size_t num_relays;
};

inline std::vector<GridPoint> grid_points(const ExperimentSpec& spec) {
  const auto pick = [](const std::vector<std::size_t>& v, std::size_t fallback) {
    return v.empty() ? std::vector<std::size_t>{fallback} : v;
  };
  std::vector<GridPoint> out;
  for (auto k : pick(spec.num_aps, spec.generator.num_aps)) {
    for (auto c : pick(spec.clients_per_ap, spec.generator.clients_per_ap)) {
      for (auto n : pick(spec.num_relays, spec.generator.num_relays)) out.push_back({k, c, n});
    }
  }
  return out;
}

inline double units_objective(const BenefitTable& benefits, const BenefitScaling& scaling, const Assignment& s) {
  double total = 0.0;
  for (double b : client_benefits(benefits, s)) total += scaling.apply(b);
  return total;
}

template <typename F>
double timed_ms(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

/// One topology, every policy and epsilon.
inline std::vector<MetricsRow> run_one(const ExperimentSpec& spec, const GridPoint& point, std::size_t experiment,
                                       std::size_t rep) {
  GeneratorSpec gen = spec.generator;
  gen.num_aps = point.num_aps;
  gen.clients_per_ap = point.clients_per_ap;
  gen.num_relays = point.num_relays;
  const std::uint64_t topo_seed = derive_seed(spec.seed, point.num_aps, point.clients_per_ap, point.num_relays, rep);

  MetricsRow base;
  base.experiment = experiment;
  base.repetition = rep;
  base.num_aps = gen.num_aps;
  base.num_clients = gen.num_clients();
  base.num_relays = gen.num_relays;

  std::vector<MetricsRow> rows;
  auto fail_all = [&](const Error& e) {
    for (double eps : spec.epsilons) {
      for (auto p : spec.policies) {
        MetricsRow r = base;
        r.epsilon = eps;
        r.policy = p;
        r.ok = false;
        r.error = e.kind() + ": " + e.what();
        rows.push_back(r);
      }
    }
    return rows;
  };

  TopologyInstance topo;
  BenefitTable benefits;
  AsymmetricInstance inst;
  std::optional<ExactSolution> oracle;
  double oracle_ms = 0.0;
  try {
    topo = generate_topology(spec.radio, gen, topo_seed);
    benefits = build_benefits(spec.radio, topo);
    inst = build_asymmetric(benefits, topo, spec.scaling);
    oracle_ms = timed_ms([&] { oracle = solve_exact_mcf(inst); });
  } catch (const Error& e) {
    return fail_all(e);
  }

  const Assignment rssi = baseline_rssi(benefits, topo);
  Rng rand_rng(derive_seed(topo_seed, 0x4a4d));
  const Assignment random = baseline_random(benefits, topo, rand_rng);

  for (std::size_t e = 0; e < spec.epsilons.size(); ++e) {
    const double eps = spec.epsilons[e];
    for (auto policy : spec.policies) {
      MetricsRow r = base;
      r.epsilon = eps;
      r.policy = policy;
      try {
        Assignment s;
        switch (policy) {
          case Policy::optm:
            s = recover_assignment(inst, oracle->assignment);
            r.wall_ms = oracle_ms;
            break;
          case Policy::rssi:
            s = rssi;
            break;
          case Policy::rand:
            s = random;
            break;
          case Policy::central: {
            AuctionConfig cfg;
            cfg.epsilon = eps;
            CentralizedResult res;
            r.wall_ms = timed_ms([&] { res = solve_centralized(inst, cfg); });
            s = recover_assignment(inst, res.assignment);
            r.iterations = res.stats.iterations();
            r.accepted_bids = res.stats.bids;
            break;
          }
          case Policy::auction: {
            sim::SimConfig cfg;
            cfg.epsilon = eps;
            cfg.seed = derive_seed(topo_seed, 0x1a7);  // same latencies for every epsilon
            cfg.latency_min_ms = spec.latency_min_ms;
            cfg.latency_max_ms = spec.latency_max_ms;
            cfg.broadcast_prices = spec.broadcast_prices;
            cfg.record_trace = false;
            cfg.oracle_at_quiescence = false;
            sim::SimResult res;
            r.wall_ms = timed_ms([&] { res = sim::run_static(inst, cfg); });
            s = recover_assignment(inst, res.assignment);
            r.iterations = res.stats.bids_sent;
            r.accepted_bids = res.stats.bids_accepted;
            r.messages = res.stats.messages_sent;
            break;
          }
        }
        s.normalize();
        r.objective_bps = total_throughput(benefits, s);
        r.objective = units_objective(benefits, spec.scaling, s);
        r.gap_to_oracle = oracle->objective - r.objective;
        r.ap_counts = ap_connection_counts(s, topo.num_aps());
      } catch (const Error& err) {
        r.ok = false;
        r.error = err.kind() + ": " + err.what();
      }
      rows.push_back(std::move(r));
    }
  }
  return rows;
}

inline std::pair<double, double> mean_and_stderr(const std::vector<double>& v) {
  if (v.empty()) return {0.0, 0.0};
  const auto n = static_cast<double>(v.size());
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= n;
  if (v.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

}  // namespace detail

/// Per (grid point, epsilon, policy) aggregates, in first-appearance order.
inline std::vector<SummaryRow> summarize(const std::vector<MetricsRow>& rows) {
  using Key = std::tuple<std::size_t, std::size_t, std::size_t, double, int>;
  std::map<Key, std::size_t> index;
  std::vector<SummaryRow> out;
  std::vector<std::vector<double>> objectives;
  std::vector<std::vector<double>> iterations;
  for (const auto& r : rows) {
    const Key key{r.num_aps, r.num_clients, r.num_relays, r.epsilon, static_cast<int>(r.policy)};
    auto [it, inserted] = index.emplace(key, out.size());
    if (inserted) {
      SummaryRow s;
      s.num_aps = r.num_aps;
      s.num_clients = r.num_clients;
      s.num_relays = r.num_relays;
      s.epsilon = r.epsilon;
      s.policy = r.policy;
      s.gap_bound = static_cast<double>(r.num_clients) * r.epsilon;
      out.push_back(s);
      objectives.emplace_back();
      iterations.emplace_back();
    }
    auto& s = out[it->second];
    ++s.runs;
    if (!r.ok) {
      ++s.failed;
      continue;
    }
    objectives[it->second].push_back(r.objective);
    iterations[it->second].push_back(static_cast<double>(r.iterations));
    s.max_gap = std::max(s.max_gap, r.gap_to_oracle);
  }
  for (std::size_t k = 0; k < out.size(); ++k) {
    std::tie(out[k].mean_objective, out[k].stderr_objective) = detail::mean_and_stderr(objectives[k]);
    std::tie(out[k].mean_iterations, out[k].stderr_iterations) = detail::mean_and_stderr(iterations[k]);
  }
  return out;
}

/// Runs every (grid point, repetition) task, optionally on several threads.
/// Results are collected per task index, so the output does not depend on
/// scheduling.
inline ExperimentResult run_experiments(const ExperimentSpec& spec) {
  spec.validate();
  const auto points = detail::grid_points(spec);
  for (const auto& p : points) {
    GeneratorSpec g = spec.generator;
    g.num_aps = p.num_aps;
    g.clients_per_ap = p.clients_per_ap;
    g.num_relays = p.num_relays;
    g.validate();
  }
  const std::size_t tasks = points.size() * spec.repetitions;
  std::vector<std::vector<MetricsRow>> per_task(tasks);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t t = next++; t < tasks; t = next++) {
      per_task[t] = detail::run_one(spec, points[t / spec.repetitions], t, t % spec.repetitions);
    }
  };
  const std::size_t n_threads = std::clamp<std::size_t>(spec.threads, 1, std::max<std::size_t>(tasks, 1));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t k = 0; k < n_threads; ++k) pool.emplace_back(worker);
  }
  ExperimentResult out;
  for (auto& rows : per_task) {
    for (auto& r : rows) out.rows.push_back(std::move(r));
  }
  out.summary = summarize(out.rows);
  return out;
}

}  // namespace mmwave
