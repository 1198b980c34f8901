#pragma once

#include <charconv>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mmwave/auction.hpp"
#include "mmwave/errors.hpp"
#include "mmwave/harness.hpp"
#include "mmwave/problem.hpp"
#include "mmwave/radio.hpp"
#include "mmwave/sim/simulator.hpp"
#include "mmwave/topology.hpp"

namespace mmwave::io {

using nlohmann::json;

inline constexpr int kSchemaVersion = 1;

// ---- text helpers -----------------------------------------------------------

/// Shortest decimal text that reads back to the same double.
inline std::string fmt(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw FormatError("cannot format number");
  return {buf, end};
}

inline std::string fmt(std::size_t v) { return std::to_string(v); }

/// CSV cells never need quoting: separators inside text become ';'.
inline std::string cell(std::string s) {
  for (auto& ch : s) {
    if (ch == ',' || ch == '\n' || ch == '\r') ch = ';';
  }
  return s;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  out << text;
}

class CsvWriter {
 public:
  explicit CsvWriter(const std::vector<std::string>& header) : width_(header.size()) {
    text_ << "# schema_version: " << kSchemaVersion << "\n";
    row(header);
  }

  void row(const std::vector<std::string>& cells) {
    if (cells.size() != width_) throw FormatError("CSV row width does not match the header");
    for (std::size_t k = 0; k < cells.size(); ++k) {
      if (k) text_ << ',';
      text_ << cells[k];
    }
    text_ << '\n';
  }

  [[nodiscard]] std::string str() const { return text_.str(); }

 private:
  std::size_t width_;
  std::ostringstream text_;
};

/// A CSV file as written by CsvWriter: '#' comment lines, then a header.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  [[nodiscard]] std::optional<std::size_t> find(const std::string& name) const {
    for (std::size_t k = 0; k < header.size(); ++k) {
      if (header[k] == name) return k;
    }
    return std::nullopt;
  }

  [[nodiscard]] std::size_t column(const std::string& name) const {
    if (auto k = find(name)) return *k;
    throw FormatError("CSV has no column '" + name + "'");
  }

  static CsvTable parse(const std::string& text) {
    CsvTable t;
    std::istringstream in(text);
    std::string line;
    std::optional<int> version;
    bool have_header = false;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      if (line[0] == '#') {
        const std::string key = "# schema_version:";
        if (line.rfind(key, 0) == 0) version = std::stoi(line.substr(key.size()));
        continue;
      }
      std::vector<std::string> cells;
      std::string c;
      std::istringstream ls(line);
      while (std::getline(ls, c, ',')) cells.push_back(c);
      if (line.back() == ',') cells.emplace_back();
      if (!have_header) {
        t.header = std::move(cells);
        have_header = true;
        continue;
      }
      if (cells.size() != t.header.size()) throw FormatError("CSV row width does not match the header");
      t.rows.push_back(std::move(cells));
    }
    if (!version) throw FormatError("CSV lacks a schema_version line");
    if (*version != kSchemaVersion) {
      throw FormatError("unsupported CSV schema_version " + std::to_string(*version));
    }
    if (!have_header) throw FormatError("CSV has no header");
    return t;
  }
};

inline double to_double(const std::string& s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) throw FormatError("bad number '" + s + "'");
  return v;
}

// ---- JSON helpers -----------------------------------------------------------

inline json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError(what + " is not valid JSON: " + e.what());
  }
}

inline void check_version(const json& j, const std::string& what) {
  if (!j.is_object()) throw FormatError(what + " must be a JSON object");
  if (!j.contains("schema_version")) throw FormatError(what + " lacks schema_version");
  if (j.at("schema_version") != kSchemaVersion) {
    throw FormatError(what + ": unsupported schema_version " + j.at("schema_version").dump());
  }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("field '") + key + "': " + e.what());
  }
}

template <typename T>
T get_req(const json& j, const char* key, const std::string& what) {
  if (!j.contains(key)) throw FormatError(what + " lacks field '" + key + "'");
  return get_or<T>(j, key, T{});
}

// ---- radio ------------------------------------------------------------------

inline json to_json(const RadioParams& p) {
  return {{"bandwidth_hz", p.bandwidth_hz},
          {"tx_power_w", p.tx_power_w},
          {"gain_tx", p.gain_tx},
          {"gain_rx", p.gain_rx},
          {"wavelength_m", p.wavelength_m},
          {"ref_distance_m", p.ref_distance_m},
          {"pathloss_exponent", p.pathloss_exponent},
          {"noise_w_per_hz", p.noise_w_per_hz},
          {"interference_w_per_hz", p.interference_w_per_hz}};
}

/// Missing fields keep their default values; noise may be given in dBm/MHz.
inline RadioParams radio_from_json(const json& j) {
  RadioParams p = RadioParams::table_one();
  if (!j.is_object()) throw FormatError("radio must be a JSON object");
  p.bandwidth_hz = get_or(j, "bandwidth_hz", p.bandwidth_hz);
  p.tx_power_w = get_or(j, "tx_power_w", p.tx_power_w);
  p.gain_tx = get_or(j, "gain_tx", p.gain_tx);
  p.gain_rx = get_or(j, "gain_rx", p.gain_rx);
  p.wavelength_m = get_or(j, "wavelength_m", p.wavelength_m);
  p.ref_distance_m = get_or(j, "ref_distance_m", p.ref_distance_m);
  p.pathloss_exponent = get_or(j, "pathloss_exponent", p.pathloss_exponent);
  if (j.contains("noise_dbm_per_mhz")) {
    p.noise_w_per_hz = RadioParams::dbm_per_mhz_to_w_per_hz(get_req<double>(j, "noise_dbm_per_mhz", "radio"));
  }
  p.noise_w_per_hz = get_or(j, "noise_w_per_hz", p.noise_w_per_hz);
  p.interference_w_per_hz = get_or(j, "interference_w_per_hz", p.interference_w_per_hz);
  p.validate();
  return p;
}

// ---- topology -----------------------------------------------------------------

inline json points_to_json(const std::vector<Point>& pts) {
  json a = json::array();
  for (const auto& p : pts) a.push_back({p.x, p.y});
  return a;
}

inline std::vector<Point> points_from_json(const json& j, const std::string& what) {
  if (!j.is_array()) throw FormatError(what + " must be an array of [x, y]");
  std::vector<Point> out;
  for (const auto& p : j) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
      throw FormatError(what + " entries must be [x, y]");
    }
    out.push_back({p[0].get<double>(), p[1].get<double>()});
  }
  return out;
}

inline json to_json(const TopologyInstance& t, std::optional<double> radius = std::nullopt) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "topology";
  j["clients"] = points_to_json(t.clients);
  j["relays"] = points_to_json(t.relays);
  j["aps"] = points_to_json(t.aps);
  if (radius) j["radius_m"] = *radius;
  j["eligibility"] = {{"client_aps", t.client_aps}, {"client_relays", t.client_relays}, {"relay_aps", t.relay_aps}};
  json blocked = json::array();
  for (const auto& l : t.blocked_links) blocked.push_back({l.a.str(), l.b.str()});
  j["blocked_links"] = blocked;
  return j;
}

inline Link link_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_string() || !j[1].is_string()) {
    throw FormatError("a link must be a pair of node names such as [\"c0\", \"a1\"]");
  }
  return Link{NodeRef::parse(j[0].get<std::string>()), NodeRef::parse(j[1].get<std::string>())};
}

/// Eligibility comes from the "eligibility" object when present, otherwise
/// from "radius_m" (or `default_radius`).
inline TopologyInstance topology_from_json(const json& j, std::optional<double> default_radius = std::nullopt) {
  check_version(j, "topology");
  TopologyInstance t;
  t.clients = points_from_json(j.value("clients", json::array()), "clients");
  t.relays = points_from_json(j.value("relays", json::array()), "relays");
  t.aps = points_from_json(j.value("aps", json::array()), "aps");
  if (j.contains("eligibility")) {
    const auto& e = j.at("eligibility");
    try {
      t.client_aps = e.at("client_aps").get<std::vector<std::vector<std::size_t>>>();
      t.client_relays = e.at("client_relays").get<std::vector<std::vector<std::size_t>>>();
      t.relay_aps = e.at("relay_aps").get<std::vector<std::vector<std::size_t>>>();
    } catch (const json::exception& ex) {
      throw FormatError(std::string("bad eligibility: ") + ex.what());
    }
  } else {
    const auto radius = j.contains("radius_m") ? std::optional(get_req<double>(j, "radius_m", "topology"))
                                               : default_radius;
    if (!radius) throw FormatError("topology needs 'eligibility' or 'radius_m'");
    t.assign_radius_eligibility(*radius);
  }
  if (j.contains("blocked_links")) {
    for (const auto& l : j.at("blocked_links")) t.blocked_links.insert(link_from_json(l));
  }
  t.validate();
  return t;
}

// ---- assignments --------------------------------------------------------------

inline json to_json(const Assignment& s, std::optional<double> objective_bps = std::nullopt) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "assignment";
  json d = json::array();
  for (const auto& p : s.direct) d.push_back({{"client", p.client}, {"ap", p.ap}});
  json r = json::array();
  for (const auto& t : s.relayed) r.push_back({{"client", t.client}, {"relay", t.relay}, {"ap", t.ap}});
  j["direct"] = d;
  j["relayed"] = r;
  if (objective_bps) j["objective_bps"] = *objective_bps;
  return j;
}

inline Assignment assignment_from_json(const json& j) {
  check_version(j, "assignment");
  Assignment s;
  try {
    for (const auto& p : j.value("direct", json::array())) {
      s.direct.push_back({p.at("client").get<std::size_t>(), p.at("ap").get<std::size_t>()});
    }
    for (const auto& t : j.value("relayed", json::array())) {
      s.relayed.push_back(
          {t.at("client").get<std::size_t>(), t.at("relay").get<std::size_t>(), t.at("ap").get<std::size_t>()});
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad assignment: ") + e.what());
  }
  return s;
}

/// One row per client: client, mode (direct|relayed), relay or empty, ap.
inline std::string assignment_csv(Assignment s) {
  s.normalize();
  std::map<std::size_t, std::vector<std::string>> by_client;
  for (const auto& p : s.direct) by_client[p.client] = {fmt(p.client), "direct", "", fmt(p.ap)};
  for (const auto& t : s.relayed) by_client[t.client] = {fmt(t.client), "relayed", fmt(t.relay), fmt(t.ap)};
  CsvWriter w({"client", "mode", "relay", "ap"});
  for (const auto& [i, row] : by_client) w.row(row);
  return w.str();
}

inline Assignment assignment_from_csv(const std::string& text) {
  const auto t = CsvTable::parse(text);
  const auto ci = t.column("client"), mi = t.column("mode"), ri = t.column("relay"), ai = t.column("ap");
  Assignment s;
  for (const auto& row : t.rows) {
    const auto client = static_cast<std::size_t>(to_double(row[ci]));
    const auto ap = static_cast<std::size_t>(to_double(row[ai]));
    if (row[mi] == "direct") {
      s.direct.push_back({client, ap});
    } else if (row[mi] == "relayed") {
      s.relayed.push_back({client, static_cast<std::size_t>(to_double(row[ri])), ap});
    } else {
      throw FormatError("unknown mode '" + row[mi] + "'");
    }
  }
  return s;
}

// ---- generator, scenario, experiment -------------------------------------------

inline json to_json(const GeneratorSpec& g) {
  return {{"num_aps", g.num_aps},
          {"clients_per_ap", g.clients_per_ap},
          {"num_relays", g.num_relays},
          {"snr_target_db", g.snr_target_db},
          {"ap_spacing_factor", g.ap_spacing_factor},
          {"layout", g.layout == ApLayout::line ? "line" : "grid"}};
}

inline GeneratorSpec generator_from_json(const json& j) {
  if (!j.is_object()) throw FormatError("generator must be a JSON object");
  GeneratorSpec g;
  g.num_aps = get_or(j, "num_aps", g.num_aps);
  g.clients_per_ap = get_or(j, "clients_per_ap", g.clients_per_ap);
  g.num_relays = get_or(j, "num_relays", g.num_relays);
  g.snr_target_db = get_or(j, "snr_target_db", g.snr_target_db);
  g.ap_spacing_factor = get_or(j, "ap_spacing_factor", g.ap_spacing_factor);
  const auto layout = get_or<std::string>(j, "layout", "line");
  if (layout == "line") {
    g.layout = ApLayout::line;
  } else if (layout == "grid") {
    g.layout = ApLayout::grid;
  } else {
    throw FormatError("layout must be 'line' or 'grid'");
  }
  g.validate();
  return g;
}

inline std::pair<sim::TimeMs, sim::TimeMs> latency_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2) throw FormatError("latency_ms must be [min, max]");
  return {j[0].get<sim::TimeMs>(), j[1].get<sim::TimeMs>()};
}

inline BenefitScaling scaling_from_json(const json& j) {
  BenefitScaling s{1e9, std::nullopt};
  s.unit_bps = get_or(j, "benefit_unit_bps", s.unit_bps);
  if (!(s.unit_bps > 0)) throw FormatError("benefit_unit_bps must be > 0");
  if (j.contains("integer_scale_digits") && !j.at("integer_scale_digits").is_null()) {
    s.integer_digits = get_req<int>(j, "integer_scale_digits", "spec");
  }
  return s;
}

/// Events: {"slot": 220, "type": "client_join", "node": "c50"} or
/// {"slot": 10, "type": "blockage", "link": ["c0", "a0"], "duration_ms": 10}.
/// "time_ms" may replace "slot".
inline ScenarioSpec scenario_from_json(const json& j) {
  check_version(j, "scenario");
  ScenarioSpec s;
  if (j.contains("radio")) s.radio = radio_from_json(j.at("radio"));
  if (j.contains("generator")) s.generator = generator_from_json(j.at("generator"));
  if (j.contains("topology")) {
    const double r = cell_radius(s.radio, s.generator ? s.generator->snr_target_db : 10.0);
    s.topology = topology_from_json(j.at("topology"), r);
  }
  for (const auto& n : j.value("initially_inactive", json::array())) {
    s.initially_inactive.push_back(NodeRef::parse(n.get<std::string>()));
  }
  s.epsilon = get_or(j, "epsilon", s.epsilon);
  s.horizon_slots = get_or(j, "horizon_T_slots", s.horizon_slots);
  s.slot_ms = get_or(j, "slot_ms", s.slot_ms);
  s.seed = get_or(j, "seed", s.seed);
  if (j.contains("latency_ms")) std::tie(s.latency_min_ms, s.latency_max_ms) = latency_from_json(j.at("latency_ms"));
  s.broadcast_prices = get_or(j, "broadcast_prices", s.broadcast_prices);
  s.reverse_auction = get_or(j, "reverse_auction", s.reverse_auction);
  s.scaling = scaling_from_json(j);
  if (j.contains("random_blockage")) {
    const auto& b = j.at("random_blockage");
    s.random_blockage = RandomBlockage{get_req<double>(b, "probability", "random_blockage"),
                                       get_or<sim::TimeMs>(b, "duration_ms", 10)};
  }
  for (const auto& e : j.value("events", json::array())) {
    sim::ScenarioEvent ev;
    ev.type = sim::parse_event_type(get_req<std::string>(e, "type", "event"));
    if (e.contains("time_ms")) {
      ev.time = get_req<sim::TimeMs>(e, "time_ms", "event");
    } else {
      ev.time = get_req<sim::TimeMs>(e, "slot", "event") * s.slot_ms;
    }
    if (ev.type == sim::EventType::blockage) {
      ev.link = link_from_json(e.value("link", json()));
      ev.duration_ms = get_req<sim::TimeMs>(e, "duration_ms", "blockage event");
    } else {
      ev.node = NodeRef::parse(get_req<std::string>(e, "node", "event"));
    }
    s.events.push_back(ev);
  }
  return s;
}

inline ExperimentSpec experiment_from_json(const json& j) {
  check_version(j, "experiment");
  ExperimentSpec s;
  if (j.contains("radio")) s.radio = radio_from_json(j.at("radio"));
  if (j.contains("generator")) s.generator = generator_from_json(j.at("generator"));
  s.num_aps = get_or(j, "num_aps", s.num_aps);
  s.clients_per_ap = get_or(j, "clients_per_ap", s.clients_per_ap);
  s.num_relays = get_or(j, "num_relays", s.num_relays);
  s.epsilons = get_or(j, "epsilons", s.epsilons);
  s.repetitions = get_or(j, "repetitions", s.repetitions);
  if (j.contains("policies")) {
    s.policies.clear();
    for (const auto& p : j.at("policies")) s.policies.push_back(parse_policy(p.get<std::string>()));
  }
  s.seed = get_or(j, "seed", s.seed);
  s.scaling = scaling_from_json(j);
  if (j.contains("latency_ms")) std::tie(s.latency_min_ms, s.latency_max_ms) = latency_from_json(j.at("latency_ms"));
  s.broadcast_prices = get_or(j, "broadcast_prices", s.broadcast_prices);
  s.threads = get_or(j, "threads", s.threads);
  s.validate();
  return s;
}

// ---- run outputs ------------------------------------------------------------------

inline std::string join_counts(const std::vector<std::size_t>& v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k) s += ';';
    s += std::to_string(v[k]);
  }
  return s;
}

/// Deterministic per-run metrics (no wall-clock columns).
inline std::string metrics_csv(const std::vector<MetricsRow>& rows) {
  CsvWriter w({"experiment", "repetition", "num_aps", "num_clients", "num_relays", "epsilon", "policy", "status",
               "objective", "objective_bps", "gap_to_oracle", "iterations", "accepted_bids", "messages",
               "ap_counts", "error"});
  for (const auto& r : rows) {
    w.row({fmt(r.experiment), fmt(r.repetition), fmt(r.num_aps), fmt(r.num_clients), fmt(r.num_relays),
           fmt(r.epsilon), to_string(r.policy), r.ok ? "ok" : "failed", fmt(r.objective), fmt(r.objective_bps),
           fmt(r.gap_to_oracle), fmt(r.iterations), fmt(r.accepted_bids), fmt(r.messages), join_counts(r.ap_counts),
           cell(r.error)});
  }
  return w.str();
}

inline std::string timings_csv(const std::vector<MetricsRow>& rows) {
  CsvWriter w({"experiment", "num_clients", "num_relays", "epsilon", "policy", "wall_ms"});
  for (const auto& r : rows) {
    if (r.policy != Policy::auction && r.policy != Policy::optm && r.policy != Policy::central) continue;
    w.row({fmt(r.experiment), fmt(r.num_clients), fmt(r.num_relays), fmt(r.epsilon), to_string(r.policy),
           fmt(r.wall_ms)});
  }
  return w.str();
}

inline std::string summary_csv(const std::vector<SummaryRow>& rows) {
  CsvWriter w({"num_aps", "num_clients", "num_relays", "epsilon", "policy", "runs", "failed", "mean_objective",
               "stderr_objective", "mean_iterations", "stderr_iterations", "max_gap", "gap_bound"});
  for (const auto& s : rows) {
    w.row({fmt(s.num_aps), fmt(s.num_clients), fmt(s.num_relays), fmt(s.epsilon), to_string(s.policy), fmt(s.runs),
           fmt(s.failed), fmt(s.mean_objective), fmt(s.stderr_objective), fmt(s.mean_iterations),
           fmt(s.stderr_iterations), fmt(s.max_gap), fmt(s.gap_bound)});
  }
  return w.str();
}

inline std::string trace_csv(const std::vector<sim::TraceRow>& rows) {
  CsvWriter w({"time_ms", "actor_kind", "actor_id", "event", "object", "bid_or_price", "objective_if_quiescent"});
  for (const auto& r : rows) {
    w.row({std::to_string(r.time), r.actor_kind, fmt(r.actor_id), cell(r.event), cell(r.object), fmt(r.value),
           r.objective ? fmt(*r.objective) : ""});
  }
  return w.str();
}

inline std::string central_trace_csv(const std::vector<AuctionTraceRow>& rows) {
  CsvWriter w({"iteration", "actor", "action", "object", "old_price", "new_price"});
  for (const auto& r : rows) {
    w.row({fmt(r.iteration), r.actor, r.action, fmt(r.object), fmt(r.old_price), fmt(r.new_price)});
  }
  return w.str();
}

/// Long format: one block of slot rows per variant.
inline std::string series_csv(const std::vector<std::pair<std::string, const sim::SimResult*>>& runs) {
  CsvWriter w({"variant", "slot", "time_ms", "num_clients", "num_relays", "objective", "oracle_objective",
               "direct_objective"});
  for (const auto& [name, res] : runs) {
    for (const auto& r : res->series) {
      w.row({name, fmt(r.slot), std::to_string(r.time), fmt(r.num_clients), fmt(r.num_relays), fmt(r.objective),
             r.oracle_objective ? fmt(*r.oracle_objective) : "", fmt(r.direct_objective)});
    }
  }
  return w.str();
}

inline std::string quiescent_csv(const std::vector<std::pair<std::string, const sim::SimResult*>>& runs,
                                 double epsilon) {
  CsvWriter w({"variant", "time_ms", "triggers", "num_clients", "num_relays", "objective", "oracle_objective", "gap",
               "gap_bound", "eps_cs", "consistent", "bids_sent", "bids_accepted", "reverse_steps", "messages"});
  for (const auto& [name, res] : runs) {
    for (const auto& q : res->quiescent_points) {
      w.row({name, std::to_string(q.time), cell(q.triggers), fmt(q.num_clients), fmt(q.num_relays),
             fmt(q.objective), q.oracle_objective ? fmt(*q.oracle_objective) : "", fmt(q.gap()),
             fmt(static_cast<double>(q.num_clients) * epsilon), q.eps_cs.ok ? "ok" : cell(q.eps_cs.detail),
             q.consistent ? "yes" : "no", fmt(q.interval.bids_sent), fmt(q.interval.bids_accepted),
             fmt(q.interval.reverse_steps), fmt(q.interval.messages_sent)});
    }
  }
  return w.str();
}

inline json to_json(const sim::SimStats& s) {
  return {{"bids_sent", s.bids_sent},
          {"bids_accepted", s.bids_accepted},
          {"bids_rejected", s.bids_rejected},
          {"evictions", s.evictions},
          {"surveys", s.surveys},
          {"reverse_steps", s.reverse_steps},
          {"offers", s.offers},
          {"offers_accepted", s.offers_accepted},
          {"offers_declined", s.offers_declined},
          {"price_updates", s.price_updates},
          {"messages_sent", s.messages_sent},
          {"messages_dropped", s.messages_dropped},
          {"protocol_errors", s.protocol_errors},
          {"staleness_violations", s.staleness_violations},
          {"events_processed", s.events_processed}};
}

}  // namespace mmwave::io
