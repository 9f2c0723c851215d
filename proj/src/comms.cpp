#include "commcp/comms.hpp"

#include <algorithm>
#include <charconv>

namespace commcp {

const char* payload_kind(const PayloadBody& body) {
  switch (body.index()) {
    case 0: return "request";
    case 1: return "message";
    case 2: return "answer_share";
    case 3: return "solved_notice";
  }
  return "?";
}

int payload_to_agent(const PayloadBody& body) {
  if (const auto* m = std::get_if<Message>(&body)) return m->to_agent;
  if (const auto* a = std::get_if<AnswerShare>(&body)) return a->to_agent;
  return -1;
}

MessageBus::MessageBus(BusConfig cfg, int n_agents) : cfg_(cfg) {
  if (cfg_.msg_rate <= 0.0) throw ConfigError("msg_rate must be positive");
  channel_free_.assign(static_cast<std::size_t>(n_agents), 0.0);
  mailboxes.resize(static_cast<std::size_t>(n_agents));
}

double MessageBus::enqueue(int from, int to, PayloadBody body, double sim_time) {
  double start = std::max(sim_time, channel_free_[static_cast<std::size_t>(from)]);
  double delivery = start + 1.0 / cfg_.msg_rate;
  channel_free_[static_cast<std::size_t>(from)] = delivery;

  Delivery d;
  d.enqueue_time = sim_time;
  d.delivery_time = delivery;
  d.seq = next_seq_++;
  d.from = from;
  d.body = std::move(body);

  auto push_to = [&](int recipient) {
    Delivery copy = d;
    copy.to = recipient;
    auto& box = mailboxes[static_cast<std::size_t>(recipient)];
    // deliveries from one sender arrive in order, but interleaved senders can
    // complete out of enqueue order when rates differ mid-episode
    auto it = std::upper_bound(box.begin(), box.end(), copy, [](const Delivery& a, const Delivery& b) {
      return a.delivery_time != b.delivery_time ? a.delivery_time < b.delivery_time : a.seq < b.seq;
    });
    box.insert(it, std::move(copy));
  };

  if (to < 0) {
    for (int r = 0; r < static_cast<int>(mailboxes.size()); ++r) {
      if (r != from) push_to(r);
    }
  } else {
    push_to(to);
  }
  return delivery;
}

std::vector<Delivery> MessageBus::drain(int agent, double sim_time) {
  auto& box = mailboxes[static_cast<std::size_t>(agent)];
  std::vector<Delivery> out;
  while (!box.empty() && box.front().delivery_time <= sim_time) {
    out.push_back(std::move(box.front()));
    box.pop_front();
  }
  return out;
}

std::size_t MessageBus::in_flight() const {
  std::size_t n = 0;
  for (const auto& box : mailboxes) n += box.size();
  return n;
}

namespace {

constexpr const char* kSeePrefix = "I see ";
constexpr const char* kRelevantJoint = " that may be relevant to your target ";
constexpr const char* kClauseJoint = ", and ";
constexpr const char* kTargetJoint = " may be your target at ";

std::string join_names(const std::vector<NamedPos>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += ", ";
    out += items[i].name;
  }
  return out;
}

std::string join_positions(const std::vector<NamedPos>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += ", ";
    out += "(" + std::to_string(items[i].position.x) + ", " +
           std::to_string(items[i].position.y) + ")";
  }
  return out;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    std::size_t comma = text.find(", ", pos);
    if (comma == std::string::npos) {
      out.push_back(text.substr(pos));
      return out;
    }
    out.push_back(text.substr(pos, comma - pos));
    pos = comma + 2;
  }
}

std::vector<Cell> parse_positions(const std::string& text) {
  std::vector<Cell> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t open = text.find('(', pos);
    std::size_t comma = text.find(", ", open);
    std::size_t close = text.find(')', open);
    if (open == std::string::npos || comma == std::string::npos || close == std::string::npos ||
        comma > close)
      throw ParseError("bad position list in message: " + text);
    Cell c;
    auto r1 = std::from_chars(text.data() + open + 1, text.data() + comma, c.x);
    auto r2 = std::from_chars(text.data() + comma + 2, text.data() + close, c.y);
    if (r1.ec != std::errc() || r2.ec != std::errc())
      throw ParseError("bad position in message: " + text);
    out.push_back(c);
    pos = close + 1;
  }
  return out;
}

}  // namespace

std::string render_message(const std::vector<NamedPos>& relevants,
                           const std::vector<NamedPos>& targets_seen,
                           const std::string& target_text) {
  std::string out;
  if (!relevants.empty()) {
    out += kSeePrefix;
    out += join_names(relevants);
    out += kRelevantJoint;
    out += target_text;
  }
  if (!targets_seen.empty()) {
    if (!relevants.empty()) out += kClauseJoint;
    out += join_names(targets_seen);
    out += kTargetJoint;
    out += join_positions(targets_seen);
  }
  return out;
}

ParsedMessage parse_rendered_message(const std::string& rendered) {
  ParsedMessage out;
  std::string rest = rendered;

  std::size_t tpos = rest.find(kTargetJoint);
  std::string target_clause_names;
  if (tpos != std::string::npos) {
    std::string positions = rest.substr(tpos + std::string(kTargetJoint).size());
    std::string left = rest.substr(0, tpos);
    std::size_t joint = left.rfind(kClauseJoint);
    if (joint != std::string::npos && left.find(kRelevantJoint) != std::string::npos &&
        left.find(kRelevantJoint) < joint) {
      target_clause_names = left.substr(joint + std::string(kClauseJoint).size());
      rest = left.substr(0, joint);
    } else {
      target_clause_names = left;
      rest.clear();
    }
    auto names = split_list(target_clause_names);
    auto cells = parse_positions(positions);
    if (names.size() != cells.size())
      throw ParseError("message target names and positions disagree: " + rendered);
    for (std::size_t i = 0; i < names.size(); ++i)
      out.targets_seen.push_back({names[i], cells[i]});
  }

  if (!rest.empty()) {
    if (rest.rfind(kSeePrefix, 0) != 0) throw ParseError("message does not match template: " + rendered);
    std::size_t rpos = rest.find(kRelevantJoint);
    if (rpos == std::string::npos)
      throw ParseError("message does not match template: " + rendered);
    out.relevant_names = split_list(rest.substr(std::string(kSeePrefix).size(),
                                                rpos - std::string(kSeePrefix).size()));
    out.target_text = rest.substr(rpos + std::string(kRelevantJoint).size());
  }

  if (out.relevant_names.empty() && out.targets_seen.empty())
    throw ParseError("message has no content: " + rendered);
  return out;
}

std::optional<Message> generate_message(const FilterResult& filtered,
                                        const std::map<std::string, NamedPos>& positions,
                                        const Request& request, int sender) {
  if (filtered.targets.empty() && filtered.relevants.empty()) return std::nullopt;

  Message msg;
  msg.from_agent = sender;
  msg.to_agent = request.from_agent;
  msg.question_id = request.question_id;
  for (const auto& id : filtered.relevants) msg.relevants.push_back(positions.at(id));
  for (const auto& id : filtered.targets) msg.targets_seen.push_back(positions.at(id));
  msg.rendered =
      render_message(msg.relevants, msg.targets_seen, descriptor_list_text(request.targets));
  return msg;
}

}  // namespace commcp
