#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "mmwave/sim/messages.hpp"

namespace mmwave::sim {

struct AgentParams {
  double epsilon = 0.1;
  double sentinel = 100.0;  // stands for infinity in omega and joining prices
};

struct Effects {
  std::vector<Message> messages;
  std::vector<TraceNote> notes;
  bool protocol_error = false;
};

namespace detail {

inline Message to_relay(MessageKind kind, std::size_t client, std::size_t relay, double value = 0.0) {
  Message m;
  m.kind = kind;
  m.sender = client_ref(client);
  m.receiver = relay_ref(relay);
  m.value = value;
  return m;
}

inline Message to_client(MessageKind kind, std::size_t relay, std::size_t client, double value = 0.0) {
  Message m;
  m.kind = kind;
  m.sender = relay_ref(relay);
  m.receiver = client_ref(client);
  m.value = value;
  return m;
}

inline std::string relay_name(std::size_t j) { return "r" + std::to_string(j); }

// Acceptance threshold with a little slack so that a bid of exactly
// price + eps is not lost to rounding.
inline bool raises_by_eps(double bid, double price, double epsilon) {
  return bid - price >= epsilon - 1e-12 * std::max(1.0, std::abs(bid));
}

}  // namespace detail

/// Client-side state of the distributed auction.
///
/// The client knows its own benefits (direct to k_i* and through each relay
/// of N*(i)) and a local, possibly stale, price for every relay.
struct ClientAgent {
  std::size_t id = 0;
  double direct_beta = 0.0;
  std::map<std::size_t, double> relay_beta;
  std::map<std::size_t, double> local_prices;
  std::optional<std::size_t> relay;    // nullopt: on the virtual object (k_i*)
  std::optional<std::size_t> pending;  // awaiting a response from this relay

  [[nodiscard]] double local_price(std::size_t j) const {
    auto it = local_prices.find(j);
    return it == local_prices.end() ? 0.0 : it->second;
  }

  [[nodiscard]] bool knows(std::size_t j) const { return relay_beta.contains(j); }

  /// beta(i,q_i) - P_i[q_i] for the current object.
  [[nodiscard]] double current_profit() const {
    if (relay) {
      auto it = relay_beta.find(*relay);
      if (it != relay_beta.end()) return it->second - local_price(*relay);
    }
    return direct_beta;
  }

  [[nodiscard]] double current_beta() const {
    if (relay) {
      auto it = relay_beta.find(*relay);
      if (it != relay_beta.end()) return it->second;
    }
    return direct_beta;
  }

  [[nodiscard]] double current_price() const { return relay ? local_price(*relay) : 0.0; }
};

namespace detail {

// Whether relay j is within eps of the client's best option at local prices.
inline bool within_eps_of_best(const ClientAgent& c, std::size_t j, double epsilon) {
  double best = c.direct_beta;
  for (const auto& [k, beta] : c.relay_beta) {
    if (k != j) best = std::max(best, beta - c.local_price(k));
  }
  const double v = c.relay_beta.at(j) - c.local_price(j);
  return v >= best - epsilon - 1e-12 * std::max(1.0, std::abs(best));
}

}  // namespace detail

/// Bidding rule: a client sitting on its virtual object with no bid in
/// flight bids when some relay's locally priced value strictly beats the
/// direct link. The bid is P_i[q] + u - omega + eps on the best relay q.
inline void client_try_bid(ClientAgent& c, const AgentParams& params, Effects& fx) {
  if (c.pending || c.relay) return;
  std::optional<std::size_t> best;
  double u = c.direct_beta;
  for (const auto& [j, beta] : c.relay_beta) {
    const double v = beta - c.local_price(j);
    if (v > u) {
      u = v;
      best = j;
    }
  }
  if (!best) return;
  // Second best over Q(i) without the chosen relay; the virtual object is
  // always a candidate, so omega is finite here.
  double omega = c.direct_beta;
  for (const auto& [j, beta] : c.relay_beta) {
    if (j != *best) omega = std::max(omega, beta - c.local_price(j));
  }
  const double bid = c.local_price(*best) + u - omega + params.epsilon;
  c.pending = *best;
  fx.messages.push_back(detail::to_relay(MessageKind::bid, c.id, *best, bid));
  fx.notes.push_back({"bid", detail::relay_name(*best), bid});
}

inline void client_fall_back(ClientAgent& c, Effects& fx, bool notify_relay) {
  if (!c.relay) return;
  if (notify_relay) fx.messages.push_back(detail::to_relay(MessageKind::depart_notice, c.id, *c.relay));
  fx.notes.push_back({"fallback", detail::relay_name(*c.relay), c.direct_beta});
  c.relay.reset();
}

/// Handles one delivered message and re-evaluates the bidding rule.
inline Effects client_step(ClientAgent& c, const Message& msg, const AgentParams& params) {
  Effects fx;
  const std::size_t j = msg.sender.id;
  if (msg.sender.kind != NodeKind::relay) {
    fx.protocol_error = true;
    fx.notes.push_back({"protocol_error", msg.sender.str(), 0.0});
    return fx;
  }
  switch (msg.kind) {
    case MessageKind::response: {
      if (msg.verdict) {
        if (c.pending == j && c.knows(j) && !c.relay) {
          c.pending.reset();
          c.local_prices[j] = msg.value;
          if (detail::within_eps_of_best(c, j, params.epsilon)) {
            c.relay = j;
            fx.notes.push_back({"connected", detail::relay_name(j), msg.value});
          } else {
            // Benefits changed while the bid was in flight.
            fx.messages.push_back(detail::to_relay(MessageKind::depart_notice, c.id, j));
            fx.notes.push_back({"release_unprofitable", detail::relay_name(j), msg.value});
          }
        } else {
          // Unexpected win (stale bid to a relay we no longer want): release it.
          if (c.pending == j) c.pending.reset();
          if (c.knows(j)) c.local_prices[j] = msg.value;
          fx.messages.push_back(detail::to_relay(MessageKind::depart_notice, c.id, j));
          fx.notes.push_back({"release_unexpected", detail::relay_name(j), msg.value});
        }
      } else {
        if (c.knows(j)) c.local_prices[j] = msg.value;
        if (c.pending == j) {
          c.pending.reset();
          fx.notes.push_back({"rejected", detail::relay_name(j), msg.value});
        }
        if (c.relay == j) {
          fx.notes.push_back({"evicted", detail::relay_name(j), msg.value});
          c.relay.reset();
        }
      }
      break;
    }
    case MessageKind::price_update:
      if (c.knows(j)) c.local_prices[j] = msg.value;
      break;
    case MessageKind::survey: {
      Message reply = detail::to_relay(MessageKind::survey_reply, c.id, j);
      reply.survey_id = msg.survey_id;
      reply.reply.eligible = c.knows(j) && c.relay != j;
      reply.reply.beta_relay = c.knows(j) ? c.relay_beta.at(j) : 0.0;
      reply.reply.beta_current = c.current_beta();
      reply.reply.price_current = c.current_price();
      fx.messages.push_back(reply);
      break;
    }
    case MessageKind::offer: {
      const bool usable = c.knows(j) && !c.pending && c.relay != j;
      if (usable && c.relay_beta.at(j) - msg.value >= c.current_profit()) {
        if (c.relay) fx.messages.push_back(detail::to_relay(MessageKind::depart_notice, c.id, *c.relay));
        c.relay = j;
        c.local_prices[j] = msg.value;
        fx.notes.push_back({"offer_accepted", detail::relay_name(j), msg.value});
      } else if (c.relay == j) {
        c.local_prices[j] = msg.value;
      } else {
        fx.messages.push_back(detail::to_relay(MessageKind::offer_decline, c.id, j));
        fx.notes.push_back({"offer_declined", detail::relay_name(j), msg.value});
      }
      break;
    }
    case MessageKind::depart_notice: {
      // The relay left the network.
      if (c.relay == j) client_fall_back(c, fx, false);
      if (c.pending == j) c.pending.reset();
      c.relay_beta.erase(j);
      c.local_prices.erase(j);
      break;
    }
    default:
      fx.protocol_error = true;
      fx.notes.push_back({"protocol_error", msg.sender.str(), 0.0});
      return fx;
  }
  client_try_bid(c, params, fx);
  return fx;
}

/// A survey round in progress at a relay.
struct Survey {
  std::uint64_t id = 0;
  std::set<std::size_t> awaiting;
  std::map<std::size_t, SurveyReply> replies;
};

struct Bid {
  std::size_t client = 0;
  double value = 0.0;
};

/// Relay-side (object-side) state of the distributed auction.
struct RelayAgent {
  std::size_t id = 0;
  double price = 0.0;
  std::optional<std::size_t> holder;
  bool offered = false;  // holder came from an offer that no bid has confirmed
  std::vector<Bid> inbox;
  std::optional<Survey> survey;
};

/// Resolves the bids gathered in one delivery instant: the highest bid
/// (lowest client index on ties) wins if it raises the price by at least eps.
/// With `broadcast`, the new price also goes to every other client of M(j).
inline Effects relay_step(RelayAgent& r, std::span<const Bid> bids, const AgentParams& params,
                          std::span<const std::size_t> neighbours = {}, bool broadcast = false) {
  Effects fx;
  if (bids.empty()) return fx;
  const Bid* best = &bids.front();
  for (const auto& b : bids) {
    if (b.value > best->value || (b.value == best->value && b.client < best->client)) best = &b;
  }
  std::set<std::size_t> told;
  if (detail::raises_by_eps(best->value, r.price, params.epsilon)) {
    const double old_price = r.price;
    r.price = best->value;
    const auto previous = r.holder;
    r.holder = best->client;
    r.offered = false;
    fx.notes.push_back({"accept", "c" + std::to_string(best->client), r.price});
    for (const auto& b : bids) {
      if (&b == best || told.contains(b.client)) continue;
      Message no = detail::to_client(MessageKind::response, r.id, b.client, r.price);
      fx.messages.push_back(no);
      told.insert(b.client);
    }
    if (previous && *previous != best->client && !told.contains(*previous)) {
      fx.messages.push_back(detail::to_client(MessageKind::response, r.id, *previous, r.price));
      fx.notes.push_back({"evict", "c" + std::to_string(*previous), r.price});
      told.insert(*previous);
    }
    Message yes = detail::to_client(MessageKind::response, r.id, best->client, r.price);
    yes.verdict = true;
    fx.messages.push_back(yes);
    told.insert(best->client);
    if (broadcast && r.price != old_price) {
      for (auto i : neighbours) {
        if (!told.contains(i)) {
          fx.messages.push_back(detail::to_client(MessageKind::price_update, r.id, i, r.price));
        }
      }
    }
  } else {
    for (const auto& b : bids) {
      if (told.insert(b.client).second) {
        fx.messages.push_back(detail::to_client(MessageKind::response, r.id, b.client, r.price));
      }
    }
    fx.notes.push_back({"reject", "c" + std::to_string(best->client), r.price});
  }
  return fx;
}

/// Starts a survey of M(j); each request carries the current price.
/// Returns no messages when M(j) is empty; the caller then completes the
/// survey immediately.
inline Effects relay_begin_survey(RelayAgent& r, std::span<const std::size_t> neighbours,
                                  std::uint64_t survey_id) {
  Effects fx;
  Survey s;
  s.id = survey_id;
  for (auto i : neighbours) {
    s.awaiting.insert(i);
    Message m = detail::to_client(MessageKind::survey, r.id, i, r.price);
    m.survey_id = survey_id;
    fx.messages.push_back(m);
  }
  fx.notes.push_back({"survey", "", r.price});
  r.survey = std::move(s);
  return fx;
}

/// Reverse step of an unassigned relay once all survey replies are in:
/// among clients whose margin beta(i,j) - (beta(i,q_i) - P_i[q_i]) is at
/// least eps, attract the best one at price
/// gamma - min(gamma - lambda, gamma - omega + eps); with no attractive client
/// the price drops to lambda. The new price is sent to the other neighbours.
inline Effects relay_reverse_step(RelayAgent& r, const std::map<std::size_t, SurveyReply>& replies,
                                  const AgentParams& params, std::span<const std::size_t> neighbours,
                                  double lambda = 0.0) {
  Effects fx;
  std::optional<std::size_t> best;
  double gamma = 0.0;
  double omega = -params.sentinel;
  for (const auto& [i, rep] : replies) {
    if (!rep.eligible) continue;
    const double margin = rep.margin();
    if (margin < params.epsilon) continue;
    if (!best || margin > gamma) {
      if (best) omega = std::max(omega, gamma);
      best = i;
      gamma = margin;
    } else {
      omega = std::max(omega, margin);
    }
  }
  const double old_price = r.price;
  if (!best || lambda >= gamma - params.epsilon) {
    r.price = lambda;
    fx.notes.push_back({"price_reset", "", r.price});
  } else {
    r.price = gamma - std::min(gamma - lambda, gamma - omega + params.epsilon);
    r.holder = *best;
    r.offered = true;
    fx.messages.push_back(detail::to_client(MessageKind::offer, r.id, *best, r.price));
    fx.notes.push_back({"offer", "c" + std::to_string(*best), r.price});
  }
  if (r.price != old_price) {
    for (auto i : neighbours) {
      if (r.holder == i) continue;
      fx.messages.push_back(detail::to_client(MessageKind::price_update, r.id, i, r.price));
    }
  }
  return fx;
}

}  // namespace mmwave::sim
