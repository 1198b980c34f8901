// Command-line front end: generate, solve, simulate, sweep, plotdata.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mmwave/auction.hpp"
#include "mmwave/benefits.hpp"
#include "mmwave/harness.hpp"
#include "mmwave/io.hpp"
#include "mmwave/oracle.hpp"
#include "mmwave/plotdata.hpp"
#include "mmwave/problem.hpp"
#include "mmwave/sim/simulator.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace mmwave;

namespace {

void write_json(const fs::path& path, const json& j) { io::write_file(path, j.dump(2) + "\n"); }

json load_json(const fs::path& path) { return io::parse_json(io::read_file(path), path.string()); }

RadioParams load_radio(const std::string& path) {
  if (path.empty()) return RadioParams::table_one();
  return io::radio_from_json(load_json(path));
}

int cmd_generate(const std::string& config, const std::string& radio_path, GeneratorSpec gen, std::uint64_t seed,
                 const std::string& out) {
  const RadioParams radio = load_radio(radio_path);
  if (!config.empty()) {
    const json j = load_json(config);
    io::check_version(j, "generator config");
    gen = io::generator_from_json(j.value("generator", json::object()));
    seed = j.value("seed", seed);
  }
  const auto topo = generate_topology(radio, gen, seed);
  json doc = io::to_json(topo, cell_radius(radio, gen.snr_target_db));
  doc["generator"] = io::to_json(gen);
  doc["seed"] = seed;
  if (out.empty()) {
    std::cout << doc.dump(2) << "\n";
  } else {
    write_json(out, doc);
  }
  return 0;
}

struct SolveOptions {
  std::string topology;
  std::string radio;
  std::string policy = "OPTM";
  double epsilon = 0.1;
  std::uint64_t seed = 1;
  double unit_bps = 1e9;
  int integer_digits = -1;
  std::string out_dir = "solve_out";
  bool trace = false;
};

int cmd_solve(const SolveOptions& o) {
  const RadioParams radio = load_radio(o.radio);
  const auto topo = io::topology_from_json(load_json(o.topology), cell_radius(radio, 10.0));
  const BenefitScaling scaling{o.unit_bps, o.integer_digits >= 0 ? std::optional(o.integer_digits) : std::nullopt};
  const auto benefits = build_benefits(radio, topo);
  const auto inst = build_asymmetric(benefits, topo, scaling);

  json summary;
  summary["schema_version"] = io::kSchemaVersion;
  summary["policy"] = o.policy;
  summary["epsilon"] = o.epsilon;
  Assignment s;
  if (o.policy == "OPTM" || o.policy == "EXHAUSTIVE") {
    const auto sol = o.policy == "OPTM" ? solve_exact_mcf(inst) : solve_exhaustive(inst);
    s = recover_assignment(inst, sol.assignment);
  } else if (o.policy == "CENTRAL") {
    AuctionConfig cfg;
    cfg.epsilon = o.epsilon;
    cfg.record_trace = o.trace;
    const auto res = solve_centralized(inst, cfg);
    s = recover_assignment(inst, res.assignment);
    summary["iterations"] = res.stats.iterations();
    summary["bids"] = res.stats.bids;
    summary["reverse_steps"] = res.stats.reverse_steps;
    summary["eps_cs"] = check_eps_cs(inst, res.assignment, res.prices, o.epsilon).ok;
    if (o.trace) io::write_file(fs::path(o.out_dir) / "trace.csv", io::central_trace_csv(res.trace));
  } else if (o.policy == "AUCTION") {
    sim::SimConfig cfg;
    cfg.epsilon = o.epsilon;
    cfg.seed = o.seed;
    cfg.record_trace = o.trace;
    const auto res = sim::run_static(inst, cfg);
    s = recover_assignment(inst, res.assignment);
    summary["stats"] = io::to_json(res.stats);
    summary["eps_cs"] = res.quiescent_points.back().eps_cs.ok;
    if (o.trace) io::write_file(fs::path(o.out_dir) / "trace.csv", io::trace_csv(res.trace));
  } else if (o.policy == "RSSI") {
    s = baseline_rssi(benefits, topo);
  } else if (o.policy == "RAND") {
    Rng rng(o.seed);
    s = baseline_random(benefits, topo, rng);
  } else {
    throw SpecError("unknown policy '" + o.policy + "' (expected OPTM, EXHAUSTIVE, CENTRAL, AUCTION, RSSI or RAND)");
  }
  s.normalize();
  const double bps = total_throughput(benefits, s);
  summary["objective_bps"] = bps;
  summary["objective"] = detail::units_objective(benefits, scaling, s);
  summary["oracle_objective"] = solve_exact_mcf(inst).objective;
  summary["num_clients"] = topo.num_clients();
  summary["num_relays"] = topo.num_relays();
  summary["num_aps"] = topo.num_aps();
  write_json(fs::path(o.out_dir) / "assignment.json", io::to_json(s, bps));
  io::write_file(fs::path(o.out_dir) / "assignment.csv", io::assignment_csv(s));
  write_json(fs::path(o.out_dir) / "solve.json", summary);
  std::cout << summary.dump() << "\n";
  return 0;
}

int cmd_simulate(const std::string& scenario_path, const std::string& variant, std::optional<std::uint64_t> seed,
                 bool no_trace, const std::string& out_dir) {
  auto spec = io::scenario_from_json(load_json(scenario_path));
  if (seed) spec.seed = *seed;
  std::vector<std::pair<std::string, bool>> variants;
  if (variant == "scenario") {
    variants.emplace_back(spec.reverse_auction ? "forward_reverse" : "forward", spec.reverse_auction);
  } else if (variant == "forward") {
    variants.emplace_back("forward", false);
  } else if (variant == "forward_reverse") {
    variants.emplace_back("forward_reverse", true);
  } else if (variant == "both") {
    variants.emplace_back("forward", false);
    variants.emplace_back("forward_reverse", true);
  } else {
    throw SpecError("variant must be scenario, forward, forward_reverse or both");
  }
  std::vector<sim::SimResult> results;
  for (const auto& [name, reverse] : variants) {
    spec.reverse_auction = reverse;
    auto prep = prepare_simulation(spec);
    prep.config.record_trace = !no_trace;
    results.push_back(sim::run_dynamic(std::move(prep.model), prep.config, std::move(prep.events)));
  }
  std::vector<std::pair<std::string, const sim::SimResult*>> runs;
  json summary;
  summary["schema_version"] = io::kSchemaVersion;
  summary["epsilon"] = spec.epsilon;
  summary["seed"] = spec.seed;
  for (std::size_t k = 0; k < results.size(); ++k) {
    const auto& name = variants[k].first;
    const auto& res = results[k];
    runs.emplace_back(name, &res);
    if (!no_trace) {
      const auto file = variants.size() == 1 ? std::string("trace.csv") : "trace_" + name + ".csv";
      io::write_file(fs::path(out_dir) / file, io::trace_csv(res.trace));
    }
    double worst_gap = 0.0;
    bool all_eps_cs = true;
    for (const auto& q : res.quiescent_points) {
      worst_gap = std::max(worst_gap, q.gap() / std::max(1.0, static_cast<double>(q.num_clients) * spec.epsilon));
      all_eps_cs = all_eps_cs && q.eps_cs.ok;
    }
    summary["variants"][name] = {{"stats", io::to_json(res.stats)},
                                 {"final_objective", res.objective},
                                 {"quiescent_at_end", res.quiescent},
                                 {"quiescent_points", res.quiescent_points.size()},
                                 {"worst_gap_over_m_eps", worst_gap},
                                 {"eps_cs_at_all_quiescent_points", all_eps_cs}};
  }
  io::write_file(fs::path(out_dir) / "timeseries.csv", io::series_csv(runs));
  io::write_file(fs::path(out_dir) / "quiescent.csv", io::quiescent_csv(runs, spec.epsilon));
  write_json(fs::path(out_dir) / "simulate.json", summary);
  std::cout << summary.dump() << "\n";
  return 0;
}

int cmd_sweep(const std::string& spec_path, std::optional<std::size_t> threads, std::optional<std::uint64_t> seed,
              std::optional<std::size_t> reps, const std::string& out_dir) {
  auto spec = io::experiment_from_json(load_json(spec_path));
  if (threads) spec.threads = *threads;
  if (seed) spec.seed = *seed;
  if (reps) spec.repetitions = *reps;
  const auto result = run_experiments(spec);
  io::write_file(fs::path(out_dir) / "metrics.csv", io::metrics_csv(result.rows));
  io::write_file(fs::path(out_dir) / "summary.csv", io::summary_csv(result.summary));
  io::write_file(fs::path(out_dir) / "timings.csv", io::timings_csv(result.rows));
  std::size_t failed = 0;
  double delta_max = 0.0;
  double delta_ratio = 0.0;
  for (const auto& r : result.rows) {
    if (!r.ok) {
      ++failed;
      continue;
    }
    if (r.policy == Policy::auction) {
      delta_max = std::max(delta_max, r.gap_to_oracle);
      delta_ratio = std::max(delta_ratio, r.gap_to_oracle / (static_cast<double>(r.num_clients) * r.epsilon));
    }
  }
  json summary = {{"schema_version", io::kSchemaVersion},
                  {"runs", result.rows.size()},
                  {"failed", failed},
                  {"delta_max", delta_max},
                  {"delta_max_over_m_eps", delta_ratio}};
  std::cout << summary.dump() << "\n";
  return 0;
}

int cmd_plotdata(const std::string& kind, const std::string& input, const std::string& out) {
  const auto table = io::CsvTable::parse(io::read_file(input));
  const auto csv = emit_plotdata(kind, table);
  if (out.empty()) {
    std::cout << csv;
  } else {
    io::write_file(out, csv);
  }
  return 0;
}

void print_error(const std::string& kind, const std::string& message) {
  std::cerr << json{{"error", kind}, {"message", message}}.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint client association and relay selection for mmWave networks"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("generate", "Sample a random topology");
  std::string gen_config, gen_radio, gen_out;
  GeneratorSpec gen_spec;
  std::uint64_t gen_seed = 1;
  std::string gen_layout = "line";
  gen->add_option("--config", gen_config, "Generator JSON file");
  gen->add_option("--radio", gen_radio, "Radio parameter JSON file");
  gen->add_option("--aps", gen_spec.num_aps, "Number of APs");
  gen->add_option("--clients-per-ap", gen_spec.clients_per_ap, "Clients per AP");
  gen->add_option("--relays", gen_spec.num_relays, "Number of relays");
  gen->add_option("--snr-db", gen_spec.snr_target_db, "SNR defining the cell radius");
  gen->add_option("--spacing", gen_spec.ap_spacing_factor, "AP spacing in cell radii");
  gen->add_option("--layout", gen_layout, "line or grid")->check(CLI::IsMember({"line", "grid"}));
  gen->add_option("--seed", gen_seed, "Random seed");
  gen->add_option("-o,--out", gen_out, "Output topology JSON (stdout if omitted)");

  auto* solve = app.add_subcommand("solve", "Solve one topology with a policy");
  SolveOptions so;
  solve->add_option("--topology", so.topology, "Topology JSON file")->required();
  solve->add_option("--radio", so.radio, "Radio parameter JSON file");
  solve->add_option("--policy", so.policy, "OPTM, EXHAUSTIVE, CENTRAL, AUCTION, RSSI or RAND");
  solve->add_option("--epsilon", so.epsilon, "Auction epsilon");
  solve->add_option("--seed", so.seed, "Random seed");
  solve->add_option("--benefit-unit", so.unit_bps, "Bits/s per benefit unit");
  solve->add_option("--integer-digits", so.integer_digits, "Round benefits to integers after scaling by 10^d");
  solve->add_option("-o,--out-dir", so.out_dir, "Output directory");
  solve->add_flag("--trace", so.trace, "Write the iteration trace");

  auto* simulate = app.add_subcommand("simulate", "Run a dynamic scenario");
  std::string scenario, variant = "scenario", sim_out = "simulate_out";
  std::optional<std::uint64_t> sim_seed;
  bool no_trace = false;
  simulate->add_option("--scenario", scenario, "Scenario JSON file")->required();
  simulate->add_option("--variant", variant, "scenario, forward, forward_reverse or both");
  simulate->add_option("--seed", sim_seed, "Override the scenario seed");
  simulate->add_flag("--no-trace", no_trace, "Skip the event trace");
  simulate->add_option("-o,--out-dir", sim_out, "Output directory");

  auto* sweep = app.add_subcommand("sweep", "Monte-Carlo experiment sweep");
  std::string sweep_spec, sweep_out = "sweep_out";
  std::optional<std::size_t> threads, reps;
  std::optional<std::uint64_t> sweep_seed;
  sweep->add_option("--spec", sweep_spec, "Experiment JSON file")->required();
  sweep->add_option("--threads", threads, "Worker threads");
  sweep->add_option("--seed", sweep_seed, "Override the experiment seed");
  sweep->add_option("--repetitions", reps, "Override the repetition count");
  sweep->add_option("-o,--out-dir", sweep_out, "Output directory");

  auto* plot = app.add_subcommand("plotdata", "Emit figure data from sweep or simulate output");
  std::string kind, input, plot_out;
  plot->add_option("--kind", kind, "Figure kind")->required();
  plot->add_option("--input", input, "metrics.csv, timeseries.csv or timings.csv")->required();
  plot->add_option("-o,--out", plot_out, "Output CSV (stdout if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::Error& e) {
    print_error("usage_error", e.what());
    return 64;
  }

  try {
    if (*gen) {
      gen_spec.layout = gen_layout == "grid" ? ApLayout::grid : ApLayout::line;
      return cmd_generate(gen_config, gen_radio, gen_spec, gen_seed, gen_out);
    }
    if (*solve) return cmd_solve(so);
    if (*simulate) return cmd_simulate(scenario, variant, sim_seed, no_trace, sim_out);
    if (*sweep) return cmd_sweep(sweep_spec, threads, sweep_seed, reps, sweep_out);
    if (*plot) return cmd_plotdata(kind, input, plot_out);
  } catch (const Error& e) {
    print_error(e.kind(), e.what());
    return 2;
  } catch (const std::exception& e) {
    print_error("internal_error", e.what());
    return 1;
  }
  return 0;
}
