#pragma once

#include <cstdint>
#include <string>

#include "mmwave/topology.hpp"

namespace mmwave::sim {

using TimeMs = std::int64_t;

enum class MessageKind {
  bid,            // client -> relay, value = bid
  response,       // relay -> client, verdict yes/no, value = current price
  survey,         // relay -> client, value = current price
  survey_reply,   // client -> relay, carries SurveyReply
  depart_notice,  // either direction: sender no longer attached / leaving
  price_update,   // relay -> client, value = current price
  offer,          // relay -> client, reverse-auction assignment at price value
  offer_decline,  // client -> relay, the offer was refused
};

inline const char* to_string(MessageKind k) {
  switch (k) {
    case MessageKind::bid: return "BID";
    case MessageKind::response: return "RESPONSE";
    case MessageKind::survey: return "SURVEY";
    case MessageKind::survey_reply: return "SURVEY_REPLY";
    case MessageKind::depart_notice: return "DEPART_NOTICE";
    case MessageKind::price_update: return "PRICE_UPDATE";
    case MessageKind::offer: return "OFFER";
    case MessageKind::offer_decline: return "OFFER_DECLINE";
  }
  return "?";
}

/// (beta(i,j), beta(i,q_i), P_i[q_i]) as reported to a surveying relay.
struct SurveyReply {
  bool eligible = false;
  double beta_relay = 0.0;
  double beta_current = 0.0;
  double price_current = 0.0;

  [[nodiscard]] double margin() const { return beta_relay - (beta_current - price_current); }
};

struct Message {
  MessageKind kind = MessageKind::bid;
  NodeRef sender;
  NodeRef receiver;
  double value = 0.0;
  bool verdict = false;
  std::uint64_t survey_id = 0;
  SurveyReply reply;
  TimeMs send_time = 0;
  TimeMs delivery_time = 0;
};

/// Something an agent did that is worth a trace line.
struct TraceNote {
  std::string event;
  std::string object;
  double value = 0.0;
};

}  // namespace mmwave::sim
