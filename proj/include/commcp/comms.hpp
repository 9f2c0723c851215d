#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "commcp/conformal.hpp"
#include "commcp/scene.hpp"

namespace commcp {

struct Request {
  int from_agent = 0;
  std::string question_id;
  std::vector<Descriptor> targets;
};

struct NamedPos {
  std::string name;
  Cell position;
  bool operator==(const NamedPos&) const = default;
};

struct Message {
  int from_agent = 0;
  int to_agent = 0;
  std::string question_id;
  std::vector<NamedPos> relevants;
  std::vector<NamedPos> targets_seen;
  std::string rendered;
};

struct AnswerShare {
  int from_agent = 0;
  int to_agent = 0;
  std::string question_id;
  int label = 0;
};

// Broadcast by a question's owner once it is solved so responders drop the
// request; an extension beyond the three base payload kinds.
struct SolvedNotice {
  int from_agent = 0;
  std::string question_id;
};

using PayloadBody = std::variant<Request, Message, AnswerShare, SolvedNotice>;

const char* payload_kind(const PayloadBody& body);
int payload_to_agent(const PayloadBody& body);  // -1 for broadcasts

struct BusConfig {
  double msg_rate = 1.0;  // payloads per second per sender, FIFO
};

struct Delivery {
  double enqueue_time = 0.0;
  double delivery_time = 0.0;
  std::uint64_t seq = 0;
  int from = 0;
  int to = 0;
  PayloadBody body;
};

// Sender-side serialization at msg_rate with zero propagation delay. Each
// payload occupies 1/msg_rate seconds of its sender's channel; broadcasts
// occupy one slot and fan out copies at the same delivery time.
class MessageBus {
 public:
  MessageBus(BusConfig cfg, int n_agents);

  // Returns the delivery time. to = -1 broadcasts to every other agent.
  double enqueue(int from, int to, PayloadBody body, double sim_time);

  // All payloads addressed to `agent` with delivery_time <= sim_time, ordered
  // by (delivery_time, seq); removed from the bus.
  std::vector<Delivery> drain(int agent, double sim_time);

  std::size_t in_flight() const;
  std::uint64_t total_enqueued() const { return next_seq_; }

 private:
  BusConfig cfg_;
  std::vector<double> channel_free_;            // per-sender channel time
  std::vector<std::deque<Delivery>> mailboxes;  // per recipient, (time, seq) sorted
  std::uint64_t next_seq_ = 0;
};

// Instantiates the fixed message template, dropping clauses whose set is
// empty. Returns nullopt when both sets are empty.
std::optional<Message> generate_message(const FilterResult& filtered,
                                        const std::map<std::string, NamedPos>& positions,
                                        const Request& request, int sender);

std::string render_message(const std::vector<NamedPos>& relevants,
                           const std::vector<NamedPos>& targets_seen,
                           const std::string& target_text);

struct ParsedMessage {
  std::vector<std::string> relevant_names;
  std::string target_text;
  std::vector<NamedPos> targets_seen;
};

// Inverse of render_message over the template grammar. Throws ParseError when
// the string does not match the template.
ParsedMessage parse_rendered_message(const std::string& rendered);

}  // namespace commcp
