#pragma once

#include <map>
#include <string>
#include <vector>

#include "commcp/scene.hpp"

namespace commcp {

enum class QType { Location, Identification, Counting, Existence, State };

const char* qtype_name(QType t);
std::optional<QType> qtype_from_name(const std::string& s);

inline char label_of(int choice_index) { return static_cast<char>('A' + choice_index); }
int label_index(char label);  // throws ValidationError on anything outside A..D

struct Question {
  std::string id;
  QType qtype = QType::Location;
  std::string text;
  std::vector<std::string> choices;  // 2 or 4 entries, labeled A..
  int truth = 0;                     // index into choices
  std::vector<Descriptor> targets;
  int assignee = 0;
};

struct QuestionSet {
  std::vector<Question> questions;
  int n_agents = 0;
  int per_agent = 0;

  const Question* by_id(const std::string& id) const;
  std::vector<const Question*> assigned_to(int agent) const;
};

enum class Via { Self, Shared };

struct AnswerRecord {
  std::string question_id;
  int answered_by = 0;
  Via via = Via::Self;
  int label = 0;
  double sim_time = 0.0;
};

enum class Outcome { Correct, Incorrect, Unanswered };

// Groups and validates pre-assigned questions. Throws AssignmentError when
// the count does not divide evenly or an assignee is out of range.
QuestionSet assign(std::vector<Question> questions, int n_agents);

// question id -> outcome; unanswered iff no record. Throws
// DuplicateAnswerError on a second record for the same question.
std::map<std::string, Outcome> grade(const std::vector<AnswerRecord>& records,
                                     const QuestionSet& qset);

double success_rate(const std::map<std::string, Outcome>& outcomes);

}  // namespace commcp
