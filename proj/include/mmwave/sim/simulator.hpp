#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mmwave/auction.hpp"
#include "mmwave/errors.hpp"
#include "mmwave/oracle.hpp"
#include "mmwave/problem.hpp"
#include "mmwave/rng.hpp"
#include "mmwave/sim/agents.hpp"
#include "mmwave/sim/event_queue.hpp"
#include "mmwave/sim/messages.hpp"
#include "mmwave/sim/network.hpp"

namespace mmwave::sim {

enum class EventType { client_join, client_leave, relay_join, relay_leave, blockage };

inline const char* to_string(EventType t) {
  switch (t) {
    case EventType::client_join: return "client_join";
    case EventType::client_leave: return "client_leave";
    case EventType::relay_join: return "relay_join";
    case EventType::relay_leave: return "relay_leave";
    case EventType::blockage: return "blockage";
  }
  return "?";
}

inline EventType parse_event_type(const std::string& s) {
  for (auto t : {EventType::client_join, EventType::client_leave, EventType::relay_join,
                 EventType::relay_leave, EventType::blockage}) {
    if (s == to_string(t)) return t;
  }
  throw ScenarioError("unknown event type '" + s + "'");
}

struct ScenarioEvent {
  TimeMs time = 0;
  EventType type = EventType::client_join;
  NodeRef node;           // join/leave
  Link link;              // blockage
  TimeMs duration_ms = 0; // blockage

  [[nodiscard]] std::string describe() const {
    if (type == EventType::blockage) {
      return std::string(to_string(type)) + " " + link.a.str() + "-" + link.b.str();
    }
    return std::string(to_string(type)) + " " + node.str();
  }
};

struct SimConfig {
  double epsilon = 0.1;
  TimeMs latency_min_ms = 1;
  TimeMs latency_max_ms = 5;
  bool broadcast_prices = false;
  bool reverse_auction = false;
  std::uint64_t seed = 0;
  TimeMs slot_ms = 10;
  std::size_t horizon_slots = 0;  // 0: run until quiescent with no events left
  std::size_t max_events = 50'000'000;
  bool record_trace = true;
  bool oracle_at_quiescence = true;
  bool oracle_in_series = true;
  bool check_staleness = false;

  void validate() const {
    if (!(epsilon > 0) || !std::isfinite(epsilon)) throw DomainError("epsilon must be > 0");
    if (latency_min_ms < 1 || latency_max_ms < latency_min_ms) {
      throw DomainError("latency range must satisfy 1 <= min <= max");
    }
    if (slot_ms < 1) throw DomainError("slot length must be >= 1 ms");
  }
};

struct SimStats {
  std::size_t bids_sent = 0;
  std::size_t bids_accepted = 0;
  std::size_t bids_rejected = 0;
  std::size_t evictions = 0;
  std::size_t surveys = 0;
  std::size_t reverse_steps = 0;
  std::size_t offers = 0;
  std::size_t offers_accepted = 0;
  std::size_t offers_declined = 0;
  std::size_t price_updates = 0;
  std::size_t messages_sent = 0;
  std::size_t messages_dropped = 0;
  std::size_t protocol_errors = 0;
  std::size_t staleness_violations = 0;
  std::size_t events_processed = 0;

  friend SimStats operator-(SimStats a, const SimStats& b) {
    a.bids_sent -= b.bids_sent;
    a.bids_accepted -= b.bids_accepted;
    a.bids_rejected -= b.bids_rejected;
    a.evictions -= b.evictions;
    a.surveys -= b.surveys;
    a.reverse_steps -= b.reverse_steps;
    a.offers -= b.offers;
    a.offers_accepted -= b.offers_accepted;
    a.offers_declined -= b.offers_declined;
    a.price_updates -= b.price_updates;
    a.messages_sent -= b.messages_sent;
    a.messages_dropped -= b.messages_dropped;
    a.protocol_errors -= b.protocol_errors;
    a.staleness_violations -= b.staleness_violations;
    a.events_processed -= b.events_processed;
    return a;
  }
};

struct TraceRow {
  TimeMs time = 0;
  std::string actor_kind;
  std::size_t actor_id = 0;
  std::string event;
  std::string object;
  double value = 0.0;
  std::optional<double> objective;
};

/// State at a moment where no message is in flight and no client may bid.
struct QuiescentPoint {
  TimeMs time = 0;
  std::string triggers;  // scenario events since the previous quiescent point
  std::size_t num_clients = 0;
  std::size_t num_relays = 0;
  double delta = 0.0;  // benefit spread of the current instance
  double objective = 0.0;
  std::optional<double> oracle_objective;
  bool consistent = true;  // client and relay views of every link agree
  EpsCsReport eps_cs;
  SimStats interval;  // activity since the previous quiescent point

  [[nodiscard]] double gap() const { return oracle_objective ? *oracle_objective - objective : 0.0; }
};

struct SeriesRow {
  std::size_t slot = 0;
  TimeMs time = 0;
  std::size_t num_clients = 0;
  std::size_t num_relays = 0;
  double objective = 0.0;
  std::optional<double> oracle_objective;
  double direct_objective = 0.0;  // every client on its best AP
};

struct SimResult {
  InstanceView view;  // instance at the end of the run
  ObjectAssignment assignment;
  PriceState prices;
  double objective = 0.0;
  bool quiescent = false;
  TimeMs end_time = 0;
  SimStats stats;
  std::vector<TraceRow> trace;
  std::vector<QuiescentPoint> quiescent_points;
  std::vector<SeriesRow> series;
};

/// Discrete-event execution of the distributed auction: clients run the
/// bidding protocol, relays resolve bids (and, with `reverse_auction`, lower
/// their price through surveys when unassigned).
class Simulator {
 public:
  Simulator(NetworkModel model, SimConfig cfg, std::vector<ScenarioEvent> events = {})
      : model_(std::move(model)),
        cfg_(cfg),
        events_(std::move(events)),
        latency_(cfg.latency_min_ms, cfg.latency_max_ms, derive_seed(cfg.seed, 0x1a7e)) {
    cfg_.validate();
    validate_events();
  }

  SimResult run() {
    start();
    const std::optional<TimeMs> horizon =
        cfg_.horizon_slots > 0 ? std::optional<TimeMs>(static_cast<TimeMs>(cfg_.horizon_slots) * cfg_.slot_ms)
                               : std::nullopt;
    while (true) {
      if (in_flight_ == 0 && dirty_) record_quiescence();
      if (queue_.empty()) break;
      if (horizon && queue_.top().time > *horizon) break;
      emit_series_until(queue_.top().time);
      auto e = queue_.pop();
      now_ = e.time;
      if (++stats_.events_processed > cfg_.max_events) {
        throw IterationLimitError("simulation exceeded " + std::to_string(cfg_.max_events) + " events");
      }
      handle(e.payload);
      if (cfg_.check_staleness) check_staleness();
    }
    if (horizon) {
      emit_series_until(*horizon);
      now_ = std::max(now_, *horizon);
    }
    SimResult out;
    const auto snap = snapshot();
    out.view = view_;
    out.assignment = snap.assignment;
    out.prices = snap.prices;
    out.objective = snap.objective;
    out.quiescent = in_flight_ == 0;
    out.end_time = now_;
    out.stats = stats_;
    out.trace = std::move(trace_);
    out.quiescent_points = std::move(quiescent_);
    out.series = std::move(series_);
    return out;
  }

 private:
  struct Pending {
    enum class Kind { message, poll, scenario, blockage_end } kind = Kind::message;
    Message msg;
    std::size_t index = 0;
    Link link;
  };

  struct Snapshot {
    ObjectAssignment assignment;
    PriceState prices;
    double objective = 0.0;
    bool consistent = true;
  };

  // ---- setup ------------------------------------------------------------

  void validate_events() {
    std::vector<bool> client_on(model_.num_clients());
    std::vector<bool> relay_on(model_.num_relays());
    for (std::size_t i = 0; i < client_on.size(); ++i) client_on[i] = model_.client_active(i);
    for (std::size_t j = 0; j < relay_on.size(); ++j) relay_on[j] = model_.relay_active(j);
    std::vector<std::size_t> order(events_.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::ranges::stable_sort(order, {}, [&](std::size_t k) { return events_[k].time; });
    const auto links = model_.eligible_links();
    for (auto k : order) {
      const auto& ev = events_[k];
      const std::string where = "event " + std::to_string(k) + " (" + ev.describe() + ")";
      if (ev.time < 0) throw ScenarioError(where + ": negative time");
      if (ev.type == EventType::blockage) {
        if (!model_.has_geometry()) throw ScenarioError(where + ": blockage needs a topology");
        if (!std::ranges::binary_search(links, ev.link)) throw ScenarioError(where + ": unknown link");
        if (ev.duration_ms < 1) throw ScenarioError(where + ": duration must be >= 1 ms");
        continue;
      }
      if (!model_.contains(ev.node) || ev.node.kind == NodeKind::ap) {
        throw ScenarioError(where + ": unknown node " + ev.node.str());
      }
      const bool joining = ev.type == EventType::client_join || ev.type == EventType::relay_join;
      const bool is_client = ev.type == EventType::client_join || ev.type == EventType::client_leave;
      if (is_client != (ev.node.kind == NodeKind::client)) throw ScenarioError(where + ": wrong node kind");
      auto&& on = is_client ? client_on[ev.node.id] : relay_on[ev.node.id];
      if (joining == static_cast<bool>(on)) {
        throw ScenarioError(where + (joining ? ": node is already active" : ": node is not active"));
      }
      on = joining;
    }
  }

  void start() {
    clients_.assign(model_.num_clients(), {});
    relays_.assign(model_.num_relays(), {});
    poll_scheduled_.assign(model_.num_relays(), false);
    for (std::size_t j = 0; j < relays_.size(); ++j) relays_[j].id = j;
    rebuild();
    for (std::size_t i = 0; i < clients_.size(); ++i) {
      clients_[i].id = i;
      if (model_.client_active(i)) load_view(clients_[i]);
    }
    note("sim", 0, "start", "", 0.0);
    dirty_ = true;
    for (std::size_t k = 0; k < events_.size(); ++k) {
      Pending p;
      p.kind = Pending::Kind::scenario;
      p.index = k;
      queue_.push(events_[k].time, Phase::scenario, p);
    }
    for (std::size_t i = 0; i < clients_.size(); ++i) {
      if (!model_.client_active(i)) continue;
      Effects fx;
      client_try_bid(clients_[i], params(), fx);
      dispatch(client_ref(i), fx);
    }
  }

  [[nodiscard]] AgentParams params() const { return {cfg_.epsilon, view_.inst.sentinel()}; }

  void rebuild() {
    view_ = model_.view();
    series_oracle_.reset();
    neighbours_.assign(model_.num_relays(), {});
    for (std::size_t r = 0; r < view_.relay_ids.size(); ++r) {
      auto& list = neighbours_[view_.relay_ids[r]];
      for (auto ci : view_.inst.clients_of(r)) list.push_back(view_.client_ids[ci]);
    }
  }

  void load_view(ClientAgent& c) const {
    const auto ci = view_.client_index.at(c.id);
    c.direct_beta = view_.inst.direct_beta(ci);
    c.relay_beta = view_.relay_betas(ci);
  }

  // ---- messaging ----------------------------------------------------------

  void note(const std::string& kind, std::size_t id, const std::string& event, const std::string& object,
            double value, std::optional<double> objective = std::nullopt) {
    if (!cfg_.record_trace) return;
    trace_.push_back({now_, kind, id, event, object, value, objective});
  }

  void send(Message m) {
    m.send_time = now_;
    m.delivery_time = latency_.delivery_time(m.sender, m.receiver, now_);
    ++stats_.messages_sent;
    switch (m.kind) {
      case MessageKind::bid: ++stats_.bids_sent; break;
      case MessageKind::price_update: ++stats_.price_updates; break;
      case MessageKind::offer: ++stats_.offers; break;
      default: break;
    }
    Pending p;
    p.kind = Pending::Kind::message;
    p.msg = m;
    ++in_flight_;
    queue_.push(m.delivery_time, Phase::delivery, std::move(p));
  }

  void dispatch(NodeRef actor, const Effects& fx) {
    const std::string kind = actor.kind == NodeKind::client ? "client" : "relay";
    for (const auto& n : fx.notes) {
      if (n.event == "accept") ++stats_.bids_accepted;
      if (n.event == "evict") ++stats_.evictions;
      if (n.event == "offer_accepted") ++stats_.offers_accepted;
      if (n.event == "offer_declined") ++stats_.offers_declined;
      note(kind, actor.id, n.event, n.object, n.value);
    }
    if (fx.protocol_error) ++stats_.protocol_errors;
    for (const auto& m : fx.messages) send(m);
  }

  void schedule_poll(std::size_t j) {
    if (poll_scheduled_[j]) return;
    poll_scheduled_[j] = true;
    Pending p;
    p.kind = Pending::Kind::poll;
    p.index = j;
    ++in_flight_;
    queue_.push(now_, Phase::relay_poll, std::move(p));
  }

  // ---- event handling -----------------------------------------------------

  void handle(const Pending& e) {
    switch (e.kind) {
      case Pending::Kind::message:
        --in_flight_;
        deliver(e.msg);
        break;
      case Pending::Kind::poll:
        --in_flight_;
        poll_scheduled_[e.index] = false;
        poll(e.index);
        break;
      case Pending::Kind::scenario:
        apply_scenario(events_[e.index]);
        break;
      case Pending::Kind::blockage_end:
        model_.unblock(e.link);
        note("sim", 0, "blockage_end", e.link.a.str() + "-" + e.link.b.str(), 0.0);
        add_trigger("blockage_end " + e.link.a.str() + "-" + e.link.b.str());
        refresh_views();
        break;
    }
  }

  void deliver(const Message& m) {
    const std::size_t to = m.receiver.id;
    if (m.receiver.kind == NodeKind::client) {
      if (!model_.client_active(to)) {
        ++stats_.messages_dropped;
        return;
      }
      if (m.sender.kind == NodeKind::relay) discover(clients_[to], m.sender.id, m.value);
      dispatch(m.receiver, client_step(clients_[to], m, params()));
      return;
    }
    if (!model_.relay_active(to)) {
      ++stats_.messages_dropped;
      return;
    }
    auto& r = relays_[to];
    switch (m.kind) {
      case MessageKind::bid:
        r.inbox.push_back({m.sender.id, m.value});
        schedule_poll(to);
        break;
      case MessageKind::depart_notice:
      case MessageKind::offer_decline: {
        const std::size_t c = m.sender.id;
        // A decline is stale once a bid from the same client confirmed the
        // offer or is waiting for the poll; FIFO links deliver such a bid
        // before the decline.
        if (m.kind == MessageKind::offer_decline &&
            (!(r.holder == c && r.offered) || std::ranges::any_of(r.inbox, [&](const Bid& b) { return b.client == c; }))) {
          break;
        }
        std::erase_if(r.inbox, [&](const Bid& b) { return b.client == c; });
        if (r.holder == c) {
          r.holder.reset();
          r.offered = false;
          note("relay", to, "released", "c" + std::to_string(c), r.price);
          if (cfg_.reverse_auction) schedule_poll(to);
        }
        break;
      }
      case MessageKind::survey_reply:
        if (r.survey && r.survey->id == m.survey_id && r.survey->awaiting.erase(m.sender.id) > 0) {
          r.survey->replies[m.sender.id] = m.reply;
          if (r.survey->awaiting.empty()) complete_survey(to);
        }
        break;
      default:
        ++stats_.protocol_errors;
        note("relay", to, "protocol_error", m.sender.str(), 0.0);
        break;
    }
  }

  /// First contact with a relay that joined: the client measures its link
  /// and takes the price the relay announced in that message.
  void discover(ClientAgent& c, std::size_t j, double announced_price) const {
    if (c.knows(j) || !model_.relay_active(j)) return;
    auto r = view_.relay_index.find(j);
    if (r == view_.relay_index.end()) return;
    if (auto b = view_.inst.beta(view_.client_index.at(c.id), r->second)) {
      c.relay_beta[j] = *b;
      c.local_prices[j] = announced_price;
    }
  }

  void poll(std::size_t j) {
    auto& r = relays_[j];
    if (!model_.relay_active(j)) return;
    if (!r.inbox.empty()) {
      const auto bids = std::move(r.inbox);
      r.inbox.clear();
      const auto fx = relay_step(r, bids, params(), neighbours_[j], cfg_.broadcast_prices);
      const bool accepted = std::ranges::any_of(fx.notes, [](const TraceNote& n) { return n.event == "accept"; });
      stats_.bids_rejected += bids.size() - (accepted ? 1 : 0);
      dispatch(relay_ref(j), fx);
    }
    maybe_survey(j);
  }

  void maybe_survey(std::size_t j) {
    auto& r = relays_[j];
    if (!cfg_.reverse_auction || r.holder || r.price == 0.0 || r.survey) return;
    ++stats_.surveys;
    dispatch(relay_ref(j), relay_begin_survey(r, neighbours_[j], ++survey_counter_));
    if (r.survey->awaiting.empty()) complete_survey(j);
  }

  void complete_survey(std::size_t j) {
    auto& r = relays_[j];
    const auto replies = std::move(r.survey->replies);
    r.survey.reset();
    if (r.holder) {
      note("relay", j, "survey_abandoned", "", r.price);
      return;
    }
    ++stats_.reverse_steps;
    dispatch(relay_ref(j), relay_reverse_step(r, replies, params(), neighbours_[j]));
  }

  void add_trigger(const std::string& what) {
    if (!triggers_.empty()) triggers_ += ";";
    triggers_ += what;
    dirty_ = true;
  }

  void apply_scenario(const ScenarioEvent& ev) {
    note("sim", 0, to_string(ev.type),
         ev.type == EventType::blockage ? ev.link.a.str() + "-" + ev.link.b.str() : ev.node.str(), 0.0);
    add_trigger(ev.describe());
    const std::size_t id = ev.node.id;
    switch (ev.type) {
      case EventType::client_join: {
        model_.set_client_active(id, true);
        rebuild();
        clients_[id] = ClientAgent{};
        clients_[id].id = id;
        load_view(clients_[id]);
        Effects fx;
        client_try_bid(clients_[id], params(), fx);
        dispatch(client_ref(id), fx);
        break;
      }
      case EventType::client_leave: {
        auto& c = clients_[id];
        Effects fx;
        if (c.relay) fx.messages.push_back(detail::to_relay(MessageKind::depart_notice, id, *c.relay));
        if (c.pending && c.pending != c.relay) {
          fx.messages.push_back(detail::to_relay(MessageKind::depart_notice, id, *c.pending));
        }
        dispatch(client_ref(id), fx);
        c = ClientAgent{};
        c.id = id;
        model_.set_client_active(id, false);
        rebuild();
        for (std::size_t j = 0; j < relays_.size(); ++j) {
          auto& r = relays_[j];
          if (!r.survey) continue;
          r.survey->replies.erase(id);
          if (r.survey->awaiting.erase(id) > 0 && r.survey->awaiting.empty()) complete_survey(j);
        }
        break;
      }
      case EventType::relay_join: {
        model_.set_relay_active(id, true);
        rebuild();
        relays_[id] = RelayAgent{};
        relays_[id].id = id;
        relays_[id].price = cfg_.reverse_auction ? view_.inst.sentinel() : 0.0;
        if (cfg_.reverse_auction) {
          // Clients discover the relay through its survey.
          schedule_poll(id);
          break;
        }
        for (auto i : neighbours_[id]) {
          auto& c = clients_[i];
          c.relay_beta[id] = *view_.inst.beta(view_.client_index.at(i), view_.relay_index.at(id));
          c.local_prices.erase(id);
          Effects fx;
          client_try_bid(c, params(), fx);
          dispatch(client_ref(i), fx);
        }
        break;
      }
      case EventType::relay_leave: {
        Effects fx;
        for (std::size_t i = 0; i < clients_.size(); ++i) {
          if (model_.client_active(i) && clients_[i].knows(id)) {
            fx.messages.push_back(detail::to_client(MessageKind::depart_notice, id, i));
          }
        }
        dispatch(relay_ref(id), fx);
        relays_[id] = RelayAgent{};
        relays_[id].id = id;
        model_.set_relay_active(id, false);
        rebuild();
        break;
      }
      case EventType::blockage: {
        model_.block(ev.link);
        Pending p;
        p.kind = Pending::Kind::blockage_end;
        p.link = ev.link;
        queue_.push(now_ + ev.duration_ms, Phase::scenario, std::move(p));
        refresh_views();
        break;
      }
    }
  }

  /// Link rates changed: every client takes its new benefits. A client on a
  /// relay falls back to its best AP when its own path changed or any of its
  /// options improved; then normal bidding resumes.
  void refresh_views() {
    rebuild();
    for (auto i : view_.client_ids) {
      auto& c = clients_[i];
      const auto ci = view_.client_index.at(i);
      const double direct = view_.inst.direct_beta(ci);
      auto betas = view_.relay_betas(ci);
      if (c.relay) {
        const std::size_t j = *c.relay;
        bool changed = direct != c.direct_beta || !betas.contains(j) || betas.at(j) != c.relay_beta.at(j);
        for (const auto& [r, b] : betas) {
          auto old = c.relay_beta.find(r);
          if (old == c.relay_beta.end() || b > old->second) changed = true;
        }
        if (changed) {
          Effects fx;
          client_fall_back(c, fx, true);
          dispatch(client_ref(i), fx);
        }
      }
      c.direct_beta = direct;
      c.relay_beta = std::move(betas);
      // Reverse steps lower prices, so a remembered price of a relay that
      // was out of view may be too high; start over from 0 as at init.
      if (cfg_.reverse_auction) std::erase_if(c.local_prices, [&](const auto& kv) { return !c.knows(kv.first); });
      Effects fx;
      client_try_bid(c, params(), fx);
      dispatch(client_ref(i), fx);
    }
  }

  // ---- measurement --------------------------------------------------------

  [[nodiscard]] Snapshot snapshot() const {
    Snapshot s;
    const auto& inst = view_.inst;
    s.assignment.resize(inst.num_clients());
    s.prices.prices.assign(inst.num_objects(), 0.0);
    s.prices.profits.resize(inst.num_clients());
    for (std::size_t r = 0; r < view_.relay_ids.size(); ++r) {
      const auto& agent = relays_[view_.relay_ids[r]];
      s.prices.prices[r] = agent.price;
      if (agent.holder) {
        const auto h = *agent.holder;
        if (!model_.client_active(h) || clients_[h].relay != view_.relay_ids[r]) s.consistent = false;
      }
    }
    for (std::size_t ci = 0; ci < inst.num_clients(); ++ci) {
      const auto i = view_.client_ids[ci];
      const auto& c = clients_[i];
      std::size_t q = inst.virtual_object(ci);
      if (c.relay) {
        auto it = view_.relay_index.find(*c.relay);
        if (it != view_.relay_index.end() && relays_[*c.relay].holder == i && inst.beta(ci, it->second)) {
          q = it->second;
        } else {
          s.consistent = false;
        }
      }
      s.assignment[ci] = q;
      const double b = *inst.beta(ci, q);
      s.prices.profits[ci] = b - s.prices.prices[q];
      s.objective += b;
    }
    return s;
  }

  void record_quiescence() {
    dirty_ = false;
    const auto snap = snapshot();
    QuiescentPoint qp;
    qp.time = now_;
    qp.triggers = std::move(triggers_);
    triggers_.clear();
    qp.num_clients = view_.inst.num_clients();
    qp.num_relays = view_.inst.num_relays();
    qp.delta = view_.inst.delta();
    qp.objective = snap.objective;
    qp.consistent = snap.consistent;
    qp.eps_cs = check_eps_cs(view_.inst, snap.assignment, snap.prices, cfg_.epsilon);
    if (cfg_.oracle_at_quiescence) qp.oracle_objective = solve_exact_mcf(view_.inst).objective;
    qp.interval = stats_ - stats_at_quiescence_;
    stats_at_quiescence_ = stats_;
    note("sim", 0, "quiescent", "", qp.gap(), snap.objective);
    quiescent_.push_back(std::move(qp));
  }

  void emit_series_until(TimeMs t) {
    if (cfg_.horizon_slots == 0) return;
    while (next_slot_ <= cfg_.horizon_slots && static_cast<TimeMs>(next_slot_) * cfg_.slot_ms <= t) {
      SeriesRow row;
      row.slot = next_slot_;
      row.time = static_cast<TimeMs>(next_slot_) * cfg_.slot_ms;
      row.num_clients = view_.inst.num_clients();
      row.num_relays = view_.inst.num_relays();
      row.objective = snapshot().objective;
      for (std::size_t ci = 0; ci < view_.inst.num_clients(); ++ci) row.direct_objective += view_.inst.direct_beta(ci);
      if (cfg_.oracle_in_series) {
        if (!series_oracle_) series_oracle_ = solve_exact_mcf(view_.inst).objective;
        row.oracle_objective = series_oracle_;
      }
      series_.push_back(row);
      ++next_slot_;
    }
  }

  void check_staleness() {
    for (auto i : view_.client_ids) {
      for (const auto& [j, p] : clients_[i].local_prices) {
        if (!model_.relay_active(j)) continue;
        if (p > relays_[j].price + 1e-9 * std::max(1.0, std::abs(p))) ++stats_.staleness_violations;
      }
    }
  }

  NetworkModel model_;
  SimConfig cfg_;
  std::vector<ScenarioEvent> events_;
  LatencyModel latency_;
  EventQueue<Pending> queue_;
  InstanceView view_;
  std::vector<std::vector<std::size_t>> neighbours_;  // M(j) by stable relay id
  std::vector<ClientAgent> clients_;
  std::vector<RelayAgent> relays_;
  std::vector<bool> poll_scheduled_;
  std::size_t in_flight_ = 0;
  std::uint64_t survey_counter_ = 0;
  TimeMs now_ = 0;
  bool dirty_ = false;
  std::string triggers_;
  SimStats stats_;
  SimStats stats_at_quiescence_;
  std::vector<TraceRow> trace_;
  std::vector<QuiescentPoint> quiescent_;
  std::vector<SeriesRow> series_;
  std::size_t next_slot_ = 0;
  std::optional<double> series_oracle_;
};

/// Static run of the bidding protocol on a fixed instance.
inline SimResult run_static(const AsymmetricInstance& inst, SimConfig cfg) {
  return Simulator(NetworkModel::fixed(inst), cfg).run();
}

/// Dynamic run over `model` driven by timed scenario events.
inline SimResult run_dynamic(NetworkModel model, SimConfig cfg, std::vector<ScenarioEvent> events) {
  return Simulator(std::move(model), cfg, std::move(events)).run();
}

/// Random blockage process: at every slot, with probability `probability`,
/// one eligible link chosen uniformly is blocked for `duration_ms`.
inline std::vector<ScenarioEvent> random_blockage_events(const NetworkModel& model, double probability,
                                                         TimeMs duration_ms, std::size_t horizon_slots,
                                                         TimeMs slot_ms, std::uint64_t seed) {
  if (!(probability >= 0.0 && probability <= 1.0)) throw ScenarioError("blockage probability must be in [0,1]");
  std::vector<ScenarioEvent> out;
  const auto links = model.eligible_links();
  if (links.empty() || probability == 0.0) return out;
  Rng rng(derive_seed(seed, 0xb10c));
  for (std::size_t s = 1; s <= horizon_slots; ++s) {
    if (!rng.bernoulli(probability)) continue;
    ScenarioEvent ev;
    ev.time = static_cast<TimeMs>(s) * slot_ms;
    ev.type = EventType::blockage;
    ev.link = links[rng.index(links.size())];
    ev.duration_ms = duration_ms;
    out.push_back(ev);
  }
  return out;
}

}  // namespace mmwave::sim
