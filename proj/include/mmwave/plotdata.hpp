#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "mmwave/errors.hpp"
#include "mmwave/io.hpp"

namespace mmwave {

inline const std::vector<std::string>& plot_kinds() {
  static const std::vector<std::string> kinds{"objective_vs_clients", "objective_vs_aps", "iters_vs_clients",
                                              "iters_vs_relays",      "iters_vs_eps",     "gap_vs_eps",
                                              "dynamic_timeseries",   "cpu_cdf"};
  return kinds;
}

namespace detail {

inline std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? ", " : "") + v[k];
  return s.empty() ? "(none)" : s;
}

/// Sweep dimensions that take more than one value in the metrics table.
inline std::vector<std::string> varying_dimensions(const io::CsvTable& t) {
  std::vector<std::string> out;
  for (const char* dim : {"num_aps", "num_clients", "num_relays", "epsilon"}) {
    const auto col = t.find(dim);
    if (!col) continue;
    std::set<std::string> values;
    for (const auto& row : t.rows) values.insert(row[*col]);
    if (values.size() > 1) out.push_back(dim);
  }
  return out;
}

inline void require_nonempty(const io::CsvTable& t, const std::string& what) {
  if (t.rows.empty()) throw DimensionError(what + " table is empty");
}

inline void require_dimension(const io::CsvTable& t, const std::string& dim) {
  const auto dims = varying_dimensions(t);
  if (std::ranges::find(dims, dim) == dims.end()) {
    throw DimensionError("metrics do not vary '" + dim + "'; available dimensions: " + join(dims));
  }
}

/// Mean/stderr of `value` per (x, policy) over successful runs.
inline std::string grouped(const io::CsvTable& t, const std::string& x, const std::string& value,
                           const std::set<std::string>& policies) {
  require_nonempty(t, "metrics");
  require_dimension(t, x);
  const auto xc = t.column(x), pc = t.column("policy"), vc = t.column(value), sc = t.column("status");
  std::map<std::pair<double, std::string>, std::vector<double>> groups;
  for (const auto& row : t.rows) {
    if (row[sc] != "ok") continue;
    if (!policies.empty() && !policies.contains(row[pc])) continue;
    groups[{io::to_double(row[xc]), row[pc]}].push_back(io::to_double(row[vc]));
  }
  if (groups.empty()) throw DimensionError("no successful runs with a '" + value + "' series");
  io::CsvWriter w({x, "policy", "mean_" + value, "stderr_" + value, "runs"});
  for (const auto& [key, v] : groups) {
    const auto [mean, se] = mean_and_stderr(v);
    w.row({io::fmt(key.first), key.second, io::fmt(mean), io::fmt(se), io::fmt(v.size())});
  }
  return w.str();
}

inline std::string gap_vs_eps(const io::CsvTable& t) {
  require_nonempty(t, "metrics");
  require_dimension(t, "epsilon");
  const auto ec = t.column("epsilon"), pc = t.column("policy"), gc = t.column("gap_to_oracle"),
             mc = t.column("num_clients"), sc = t.column("status");
  std::map<double, std::vector<double>> gaps;
  std::map<double, double> worst_ratio;
  for (const auto& row : t.rows) {
    if (row[sc] != "ok" || row[pc] != "AUCTION") continue;
    const double eps = io::to_double(row[ec]);
    const double gap = io::to_double(row[gc]);
    gaps[eps].push_back(gap);
    worst_ratio[eps] = std::max(worst_ratio[eps], gap / (io::to_double(row[mc]) * eps));
  }
  if (gaps.empty()) throw DimensionError("no successful AUCTION runs in the metrics");
  io::CsvWriter w({"epsilon", "mean_gap", "max_gap", "max_gap_over_m_eps", "runs"});
  for (const auto& [eps, v] : gaps) {
    w.row({io::fmt(eps), io::fmt(mean_and_stderr(v).first), io::fmt(*std::ranges::max_element(v)),
           io::fmt(worst_ratio[eps]), io::fmt(v.size())});
  }
  return w.str();
}

/// Series table (long format) pivoted to one objective column per variant.
inline std::string dynamic_timeseries(const io::CsvTable& t) {
  require_nonempty(t, "time-series");
  if (!t.find("slot") || !t.find("variant")) {
    throw DimensionError("input is not a time series (needs 'slot' and 'variant'); available columns: " +
                         join(t.header));
  }
  const auto vc = t.column("variant"), sc = t.column("slot"), tc = t.column("time_ms"), oc = t.column("objective"),
             rc = t.column("oracle_objective"), dc = t.column("direct_objective");
  std::vector<std::string> variants;
  std::map<double, std::map<std::string, std::string>> by_slot;
  std::map<double, std::pair<std::string, std::string>> ref;
  std::map<double, std::string> times;
  for (const auto& row : t.rows) {
    if (std::ranges::find(variants, row[vc]) == variants.end()) variants.push_back(row[vc]);
    const double slot = io::to_double(row[sc]);
    by_slot[slot][row[vc]] = row[oc];
    times.emplace(slot, row[tc]);
    ref.emplace(slot, std::pair{row[rc], row[dc]});
  }
  std::vector<std::string> header{"slot", "time_ms"};
  for (const auto& v : variants) header.push_back("objective_" + v);
  header.push_back("oracle_objective");
  header.push_back("direct_objective");
  io::CsvWriter w(header);
  for (const auto& [slot, cols] : by_slot) {
    std::vector<std::string> row{io::fmt(slot), times[slot]};
    for (const auto& v : variants) row.push_back(cols.contains(v) ? cols.at(v) : "");
    row.push_back(ref[slot].first);
    row.push_back(ref[slot].second);
    w.row(row);
  }
  return w.str();
}

inline std::string cpu_cdf(const io::CsvTable& t) {
  require_nonempty(t, "timings");
  if (!t.find("wall_ms") || !t.find("policy")) {
    throw DimensionError("input is not a timings table; available columns: " + join(t.header));
  }
  const auto pc = t.column("policy"), wc = t.column("wall_ms");
  std::map<std::string, std::vector<double>> by_policy;
  for (const auto& row : t.rows) by_policy[row[pc]].push_back(io::to_double(row[wc]));
  io::CsvWriter w({"policy", "wall_ms", "cdf"});
  for (auto& [p, v] : by_policy) {
    std::ranges::sort(v);
    for (std::size_t k = 0; k < v.size(); ++k) {
      w.row({p, io::fmt(v[k]), io::fmt(static_cast<double>(k + 1) / static_cast<double>(v.size()))});
    }
  }
  return w.str();
}

}  // namespace detail

/// CSV for one figure kind. `input` is the metrics table, or the series
/// table for dynamic_timeseries, or the timings table for cpu_cdf.
inline std::string emit_plotdata(const std::string& kind, const io::CsvTable& input) {
  using detail::grouped;
  static const std::set<std::string> iterative{"AUCTION", "CENTRAL"};
  if (kind == "objective_vs_clients") return grouped(input, "num_clients", "objective", {});
  if (kind == "objective_vs_aps") return grouped(input, "num_aps", "objective", {});
  if (kind == "iters_vs_clients") return grouped(input, "num_clients", "iterations", iterative);
  if (kind == "iters_vs_relays") return grouped(input, "num_relays", "iterations", iterative);
  if (kind == "iters_vs_eps") return grouped(input, "epsilon", "iterations", iterative);
  if (kind == "gap_vs_eps") return detail::gap_vs_eps(input);
  if (kind == "dynamic_timeseries") return detail::dynamic_timeseries(input);
  if (kind == "cpu_cdf") return detail::cpu_cdf(input);
  throw SpecError("unknown plot kind '" + kind + "'; expected one of " + detail::join(plot_kinds()));
}

}  // namespace mmwave
