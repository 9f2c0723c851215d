#include "commcp/tasks.hpp"

#include <algorithm>
#include <set>

namespace commcp {

const char* qtype_name(QType t) {
  switch (t) {
    case QType::Location: return "Location";
    case QType::Identification: return "Identification";
    case QType::Counting: return "Counting";
    case QType::Existence: return "Existence";
    case QType::State: return "State";
  }
  return "?";
}

std::optional<QType> qtype_from_name(const std::string& s) {
  if (s == "Location") return QType::Location;
  if (s == "Identification") return QType::Identification;
  if (s == "Counting") return QType::Counting;
  if (s == "Existence") return QType::Existence;
  if (s == "State") return QType::State;
  return std::nullopt;
}

int label_index(char label) {
  if (label < 'A' || label > 'D') throw ValidationError(std::string("bad choice label: ") + label);
  return label - 'A';
}

const Question* QuestionSet::by_id(const std::string& id) const {
  for (const auto& q : questions) {
    if (q.id == id) return &q;
  }
  return nullptr;
}

std::vector<const Question*> QuestionSet::assigned_to(int agent) const {
  std::vector<const Question*> out;
  for (const auto& q : questions) {
    if (q.assignee == agent) out.push_back(&q);
  }
  return out;
}

QuestionSet assign(std::vector<Question> questions, int n_agents) {
  if (n_agents < 1) throw AssignmentError("need at least one agent");
  if (questions.empty() || questions.size() % static_cast<std::size_t>(n_agents) != 0)
    throw AssignmentError("question count not divisible by agent count");
  std::vector<int> counts(n_agents, 0);
  std::set<std::string> ids;
  for (const auto& q : questions) {
    if (q.assignee < 0 || q.assignee >= n_agents)
      throw AssignmentError("assignee out of range on question " + q.id);
    if (!ids.insert(q.id).second) throw AssignmentError("duplicate question id " + q.id);
    ++counts[q.assignee];
  }
  int per_agent = static_cast<int>(questions.size()) / n_agents;
  for (int a = 0; a < n_agents; ++a) {
    if (counts[a] != per_agent)
      throw AssignmentError("agent " + std::to_string(a) + " assigned " +
                            std::to_string(counts[a]) + " questions, expected " +
                            std::to_string(per_agent));
  }
  QuestionSet qs;
  qs.questions = std::move(questions);
  qs.n_agents = n_agents;
  qs.per_agent = per_agent;
  return qs;
}

std::map<std::string, Outcome> grade(const std::vector<AnswerRecord>& records,
                                     const QuestionSet& qset) {
  std::map<std::string, Outcome> out;
  for (const auto& q : qset.questions) out[q.id] = Outcome::Unanswered;
  std::set<std::string> seen;
  for (const auto& rec : records) {
    const Question* q = qset.by_id(rec.question_id);
    if (q == nullptr) throw ValidationError("record for unknown question " + rec.question_id);
    if (!seen.insert(rec.question_id).second)
      throw DuplicateAnswerError("second record for question " + rec.question_id);
    out[rec.question_id] = rec.label == q->truth ? Outcome::Correct : Outcome::Incorrect;
  }
  return out;
}

double success_rate(const std::map<std::string, Outcome>& outcomes) {
  if (outcomes.empty()) return 0.0;
  std::size_t correct = 0;
  for (const auto& [id, o] : outcomes) {
    if (o == Outcome::Correct) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(outcomes.size());
}

}  // namespace commcp
