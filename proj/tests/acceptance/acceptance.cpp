// Acceptance suite: one PASS/FAIL line per criterion; exit status 1 if any fails.

#include <CLI11.hpp>

#include <bit>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "mmwave/harness.hpp"
#include "mmwave/io.hpp"
#include "mmwave/oracle.hpp"
#include "mmwave/sim/simulator.hpp"

using namespace mmwave;

namespace {

constexpr double kTol = 1e-9;

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct RandomCase {
  GeneratorSpec gen;
  AsymmetricInstance inst;
};

// Random K, clients per AP and relay count within the given limits.
RandomCase random_case(std::uint64_t stream, std::uint64_t seed, std::size_t max_clients, std::size_t max_aps,
                       std::size_t max_relays, std::optional<int> digits) {
  Rng rng(derive_seed(stream, seed));
  GeneratorSpec g;
  g.num_aps = 1 + rng.index(max_aps);
  g.clients_per_ap = 1 + rng.index(max_clients / g.num_aps);
  g.num_relays = rng.index(std::min(max_relays, g.num_clients()) + 1);
  const auto radio = RadioParams::table_one();
  const auto topo = generate_topology(radio, g, derive_seed(stream, seed, 1));
  return {g, build_asymmetric(build_benefits(radio, topo), topo, {1e9, digits})};
}

sim::SimConfig static_config(double eps, std::uint64_t seed, bool broadcast = false) {
  sim::SimConfig cfg;
  cfg.epsilon = eps;
  cfg.seed = seed;
  cfg.broadcast_prices = broadcast;
  cfg.record_trace = false;
  return cfg;
}

double bid_bound(const AsymmetricInstance& inst, double eps, bool broadcast) {
  const double n = static_cast<double>(inst.num_relays());
  const double m = broadcast ? 1.0 : static_cast<double>(inst.num_clients());
  return m * n * n * std::ceil(inst.delta() / eps);
}

// Shared between criteria 1-3.
struct BidRecord {
  std::string label;
  std::size_t accepted = 0;
  double bound = 0.0;
};
std::vector<BidRecord> g_bids;
std::vector<BidRecord> g_broadcast_bids;

void record_bids(const std::string& label, const AsymmetricInstance& inst, double eps) {
  const auto plain = sim::run_static(inst, static_config(eps, 1));
  g_bids.push_back({label, plain.stats.bids_accepted, bid_bound(inst, eps, false)});
  const auto bc = sim::run_static(inst, static_config(eps, 1, true));
  g_broadcast_bids.push_back({label, bc.stats.bids_accepted, bid_bound(inst, eps, true)});
}

Outcome criterion1() {
  std::size_t mismatches = 0;
  std::string first;
  for (std::uint64_t s = 1; s <= 200; ++s) {
    const auto c = random_case(0xc1, s, 20, 5, 10, 2);
    const double eps = 1.0 / static_cast<double>(c.inst.num_clients() + 1);
    const double oracle = solve_exact_mcf(c.inst).objective;
    for (bool reverse : {false, true}) {
      auto cfg = static_config(eps, s);
      cfg.reverse_auction = reverse;
      const auto r = sim::run_static(c.inst, cfg);
      if (r.objective != oracle || !r.quiescent) {
        if (mismatches++ == 0) {
          first = "seed " + std::to_string(s) + ": " + io::fmt(r.objective) + " vs " + io::fmt(oracle);
        }
      }
    }
    record_bids("c1 seed " + std::to_string(s), c.inst, eps);
  }
  return {mismatches == 0, "400 runs, " + std::to_string(mismatches) + " differ from the oracle" +
                               (first.empty() ? "" : " (" + first + ")")};
}

// Quiescent points of the dynamic runs in criterion 2.
struct DynamicTally {
  std::size_t points = 0;
  std::size_t violations = 0;
  double worst = 0.0;

  void add(const sim::SimResult& r, double eps) {
    for (const auto& q : r.quiescent_points) {
      if (!q.oracle_objective) continue;
      ++points;
      const double bound = static_cast<double>(q.num_clients) * eps;
      worst = std::max(worst, q.gap() / std::max(bound, 1e-300));
      if (q.gap() > bound + kTol) ++violations;
    }
  }
  std::string str() const {
    return std::to_string(violations) + "/" + std::to_string(points) + " over, worst " + io::fmt(worst);
  }
};

ScenarioSpec join_scenario(std::uint64_t seed, bool reverse) {
  ScenarioSpec s;
  s.generator = GeneratorSpec{5, 12, 30};
  for (std::size_t i = 50; i < 60; ++i) s.initially_inactive.push_back(client_ref(i));
  for (std::size_t j = 25; j < 30; ++j) s.initially_inactive.push_back(relay_ref(j));
  s.epsilon = 0.1;
  s.horizon_slots = 500;
  s.slot_ms = 10;
  s.seed = seed;
  s.reverse_auction = reverse;
  for (std::size_t i = 50; i < 60; ++i) {
    s.events.push_back({220 * s.slot_ms, sim::EventType::client_join, client_ref(i), {}, 0});
  }
  for (std::size_t j = 25; j < 30; ++j) {
    s.events.push_back({400 * s.slot_ms, sim::EventType::relay_join, relay_ref(j), {}, 0});
  }
  return s;
}

sim::SimResult run_scenario(const ScenarioSpec& spec, bool trace = false) {
  auto p = prepare_simulation(spec);
  p.config.record_trace = trace;
  return sim::run_dynamic(std::move(p.model), p.config, std::move(p.events));
}

Outcome criterion2() {
  std::size_t violations = 0;
  double worst = 0.0;
  for (std::uint64_t s = 1; s <= 200; ++s) {
    const auto c = random_case(0xc2, s, 20, 5, 10, std::nullopt);
    const double eps = 0.1;
    const auto r = sim::run_static(c.inst, static_config(eps, s));
    const double gap = solve_exact_mcf(c.inst).objective - r.objective;
    const double bound = static_cast<double>(c.inst.num_clients()) * eps;
    worst = std::max(worst, gap / bound);
    if (gap > bound + kTol || gap < -kTol) ++violations;
    record_bids("c2 seed " + std::to_string(s), c.inst, eps);
  }
  // Join scenario with and without random blockage. The bound is checked on the variant with the
  // reverse step; the forward-only variant can strand a priced relay and is reported for comparison.
  DynamicTally with_reverse;
  DynamicTally forward_only;
  for (std::uint64_t s = 1; s <= 5; ++s) {
    for (bool blockage : {false, true}) {
      for (bool reverse : {false, true}) {
        auto spec = join_scenario(100 + s, reverse);
        if (blockage) spec.random_blockage = RandomBlockage{0.1, 10};
        (reverse ? with_reverse : forward_only).add(run_scenario(spec), spec.epsilon);
      }
    }
  }
  const bool pass = violations == 0 && with_reverse.violations == 0 && with_reverse.points > 0;
  return {pass, "static: " + std::to_string(violations) + "/200 over M*eps, worst gap/(M*eps) " + io::fmt(worst) +
                    "; dynamic quiescent points, forward_reverse " + with_reverse.str() + "; forward " +
                    forward_only.str() + " (informational)"};
}

Outcome criterion3() {
  auto check = [](const std::vector<BidRecord>& v, std::string& out) {
    std::size_t bad = 0;
    double worst = 0.0;
    for (const auto& b : v) {
      if (b.bound > 0) worst = std::max(worst, static_cast<double>(b.accepted) / b.bound);
      if (static_cast<double>(b.accepted) > b.bound) {
        if (bad++ == 0) out += " first violation " + b.label + ";";
      }
    }
    out += " " + std::to_string(bad) + "/" + std::to_string(v.size()) + " over, max ratio " + io::fmt(worst) + ";";
    return bad == 0;
  };
  std::string detail = "M*N^2*ceil(D/eps):";
  const bool plain = check(g_bids, detail);
  detail += " broadcast N^2*ceil(D/eps):";
  const bool bc = check(g_broadcast_bids, detail);
  return {plain && bc && !g_bids.empty(), detail};
}

Outcome criterion4() {
  std::size_t diff = 0;
  for (std::uint64_t s = 1; s <= 100; ++s) {
    const auto c = random_case(0xc4, s, 8, 4, 4, std::nullopt);
    const double a = solve_exact_mcf(c.inst).objective;
    const double b = solve_exhaustive(c.inst).objective;
    if (std::bit_cast<std::uint64_t>(a) != std::bit_cast<std::uint64_t>(b)) ++diff;
  }
  return {diff == 0, std::to_string(diff) + "/100 instances differ"};
}

Outcome criterion5() {
  std::size_t bad = 0;
  std::string first;
  for (std::uint64_t s = 1; s <= 100; ++s) {
    const auto c = random_case(0xc5, s, 20, 5, 10, std::nullopt);
    for (bool reverse : {false, true}) {
      auto cfg = static_config(0.1, s);
      cfg.reverse_auction = reverse;
      const auto r = sim::run_static(c.inst, cfg);
      const auto& q = r.quiescent_points.back();
      if (!r.quiescent || !q.eps_cs.ok || !q.consistent) {
        if (bad++ == 0) first = " (seed " + std::to_string(s) + ": " + q.eps_cs.detail + ")";
      }
    }
  }
  return {bad == 0, std::to_string(bad) + "/200 runs violate eps-CS" + first};
}

Outcome criterion6() {
  const auto radio = RadioParams::table_one();
  GeneratorSpec g{4, 5, 10};
  std::vector<Assignment> samples;
  for (std::uint64_t s = 1; s <= 1000; ++s) {
    const auto topo = generate_topology(radio, g, derive_seed(0xc6, s));
    const auto inst = build_asymmetric(build_benefits(radio, topo), topo, {1e9, std::nullopt});
    samples.push_back(recover_assignment(inst, solve_exact_mcf(inst).assignment));
  }
  const auto lb = check_load_balance(samples, 4);
  bool pass = true;
  std::string detail = "per-AP mean (SE):";
  for (std::size_t k = 0; k < 4; ++k) {
    const double z = (lb.mean[k] - 5.0) / lb.stderr_of_mean[k];
    pass = pass && std::abs(z) <= 3.0;
    detail += " " + io::fmt(std::round(lb.mean[k] * 1000) / 1000) + " (" +
              io::fmt(std::round(lb.stderr_of_mean[k] * 1000) / 1000) + ", z " + io::fmt(std::round(z * 100) / 100) +
              ")";
  }
  return {pass, detail};
}

Outcome criterion7(const std::filesystem::path& out) {
  ExperimentSpec spec;
  spec.generator = GeneratorSpec{4, 5, 10};
  spec.epsilons = {0.05, 0.1, 0.5, 1.0};
  spec.repetitions = 50;
  spec.policies = {Policy::auction, Policy::optm, Policy::rssi, Policy::rand, Policy::central};
  spec.seed = 7;
  const auto res = run_experiments(spec);
  io::write_file(out / "criterion7_summary.csv", io::summary_csv(res.summary));
  std::map<std::pair<double, Policy>, SummaryRow> by;
  for (const auto& s : res.summary) by[{s.epsilon, s.policy}] = s;
  bool order = true;
  bool iters = true;
  bool bound = true;
  bool within_eps = true;
  bool failures = false;
  double prev_iters = std::numeric_limits<double>::infinity();
  std::string detail;
  for (double eps : spec.epsilons) {
    const auto& a = by.at({eps, Policy::auction});
    const auto& o = by.at({eps, Policy::optm});
    const auto& r = by.at({eps, Policy::rssi});
    const auto& n = by.at({eps, Policy::rand});
    failures = failures || a.failed || o.failed || r.failed || n.failed;
    order = order && a.mean_objective >= r.mean_objective && r.mean_objective >= n.mean_objective &&
            a.mean_objective >= o.mean_objective - a.gap_bound;
    iters = iters && a.mean_iterations <= prev_iters;
    prev_iters = a.mean_iterations;
    bound = bound && a.max_gap <= a.gap_bound + kTol;
    within_eps = within_eps && a.max_gap <= eps + kTol;
    detail += " eps " + io::fmt(eps) + ": AUCTION " + io::fmt(std::round(a.mean_objective * 1000) / 1000) +
              " OPTM " + io::fmt(std::round(o.mean_objective * 1000) / 1000) + " RSSI " +
              io::fmt(std::round(r.mean_objective * 1000) / 1000) + " RAND " +
              io::fmt(std::round(n.mean_objective * 1000) / 1000) + " iters " +
              io::fmt(std::round(a.mean_iterations * 100) / 100) + " D_max " +
              io::fmt(std::round(a.max_gap * 1e6) / 1e6) + ";";
  }
  detail += std::string(" ordering ") + (order ? "ok" : "violated") + ", iterations " +
            (iters ? "non-increasing" : "not monotone") + ", D_max<=M*eps " + (bound ? "yes" : "no") +
            ", D_max<=eps " + (within_eps ? "yes" : "no");
  return {order && iters && bound && !failures, detail};
}

Outcome criterion8() {
  const sim::TimeMs first_event = 220 * 10;
  std::size_t fewer = 0;
  std::size_t not_recovered = 0;
  std::size_t bids_fwd = 0;
  std::size_t bids_rev = 0;
  for (std::uint64_t s = 1; s <= 50; ++s) {
    std::size_t post[2] = {0, 0};
    for (int v = 0; v < 2; ++v) {
      const auto spec = join_scenario(s, v == 1);
      const auto r = run_scenario(spec);
      for (const auto& q : r.quiescent_points) {
        if (q.time >= first_event) post[v] += q.interval.bids_sent;
      }
      const auto& last = r.quiescent_points.back();
      if (!last.oracle_objective || last.time < 400 * 10 ||
          last.gap() > static_cast<double>(last.num_clients) * spec.epsilon + kTol) {
        ++not_recovered;
      }
    }
    bids_fwd += post[0];
    bids_rev += post[1];
    if (post[1] < post[0]) ++fewer;
  }
  const bool pass = not_recovered == 0 && fewer * 10 >= 50 * 8;
  return {pass, "forward+reverse used fewer post-event bids on " + std::to_string(fewer) +
                    "/50 seeds (total " + std::to_string(bids_rev) + " vs " + std::to_string(bids_fwd) + "); " +
                    std::to_string(not_recovered) + "/100 runs failed to recover within M*eps"};
}

Outcome criterion9(const std::filesystem::path& out) {
  auto spec = join_scenario(3, true);
  spec.random_blockage = RandomBlockage{0.1, 10};
  std::vector<std::string> traces;
  for (int k = 0; k < 2; ++k) {
    const auto r = run_scenario(spec, true);
    const auto path = out / ("determinism_trace_" + std::to_string(k) + ".csv");
    io::write_file(path, io::trace_csv(r.trace) + io::quiescent_csv({{"forward_reverse", &r}}, spec.epsilon));
    traces.push_back(io::read_file(path));
  }
  ExperimentSpec exp;
  exp.generator = GeneratorSpec{3, 4, 5};
  exp.epsilons = {0.1, 0.5};
  exp.repetitions = 6;
  exp.policies = {Policy::auction, Policy::optm, Policy::rssi, Policy::rand, Policy::central};
  std::vector<std::string> metrics;
  for (std::size_t threads : {1, 3}) {
    exp.threads = threads;
    const auto path = out / ("determinism_metrics_" + std::to_string(threads) + ".csv");
    io::write_file(path, io::metrics_csv(run_experiments(exp).rows));
    metrics.push_back(io::read_file(path));
  }
  const bool same_trace = traces[0] == traces[1] && !traces[0].empty();
  const bool same_metrics = metrics[0] == metrics[1];
  return {same_trace && same_metrics, std::string("trace ") + (same_trace ? "identical" : "differs") + " (" +
                                          std::to_string(traces[0].size()) + " bytes), metrics " +
                                          (same_metrics ? "identical" : "differ")};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  std::string out_dir = "acceptance_artifacts";
  app.add_option("--out", out_dir, "directory for artifacts");
  CLI11_PARSE(app, argc, argv);
  const std::filesystem::path out(out_dir);
  std::filesystem::create_directories(out);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1 integer benefits: distributed equals oracle", criterion1},
      {"2 float benefits: gap within M*eps", criterion2},
      {"3 accepted bid bound", criterion3},
      {"4 min-cost-flow equals exhaustive search", criterion4},
      {"5 eps-CS at quiescence", criterion5},
      {"6 load balance", criterion6},
      {"7 policy comparison and eps sweep", [&] { return criterion7(out); }},
      {"8 dynamic join scenario", criterion8},
      {"9 determinism", [&] { return criterion9(out); }},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s criterion %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
