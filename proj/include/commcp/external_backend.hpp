#pragma once

#include <map>
#include <string>
#include <vector>

#include "commcp/oracle.hpp"

namespace commcp {

// Wire contract for the external reasoning endpoint: POST /complete with
// {system, user, max_tokens}; the reply carries the generated text plus the
// probability of each candidate first token.
struct CompletionRequest {
  std::string system;
  std::string user;
  int max_tokens = 64;
};

struct CompletionResponse {
  std::string text;
  std::map<std::string, double> first_token_probs;
};

class TextCompletionClient {
 public:
  TextCompletionClient(std::string host, int port, int max_inflight);
  virtual ~TextCompletionClient();

  // Blocking; at most max_inflight requests are outstanding at a time.
  // Throws ExternalBackendError on transport or protocol failure.
  virtual CompletionResponse complete(const CompletionRequest& req);

 protected:
  TextCompletionClient() = default;  // for test doubles

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Prompt wording lives in versioned fixture files, one per template, with
// {Request}/{Observed}/{Analysis}/{question}/{choices} placeholders.
struct PromptTemplates {
  std::string perception_user;
  std::string relevance_analysis_system;
  std::string relevance_analysis_user;
  std::string relevance_letter_system;
  std::string relevance_letter_user;
  std::string answer_letter_system;
  std::string answer_letter_user;
  std::string answer_relevance_user;

  static const PromptTemplates& load(const std::string& dir);
};

std::string substitute(std::string text, const std::map<std::string, std::string>& vars);

OptionProbPair external_relevance_options(const ObjectInstance& observed,
                                          const std::vector<Descriptor>& request_targets,
                                          const OracleConfig& cfg);

AnswerJudgment external_answer_judgment(const Question& question, const Observation& observation,
                                        const OracleConfig& cfg);

}  // namespace commcp
