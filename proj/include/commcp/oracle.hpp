#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "commcp/scene.hpp"
#include "commcp/tasks.hpp"

namespace commcp {

enum class Option { A, B, C, D };

inline char option_letter(Option o) { return static_cast<char>('A' + static_cast<int>(o)); }
Option option_from_letter(char c);

// Option semantics are fixed: A = the requested target itself, B = strongly
// co-located with it, C = unrelated, D = a common house feature.
struct OptionProbPair {
  std::string object_id;
  Option option = Option::C;
  double prob = 0.0;
};

struct AnswerJudgment {
  std::vector<double> dist;  // over the question's own choice labels, sums to 1
  double relevance = 0.0;    // probability the current view suffices to answer
};

enum class OracleMode { Simulated, External };

class TextCompletionClient;  // external-adapter path, see external_backend.cpp

struct OracleConfig {
  OracleMode mode = OracleMode::Simulated;
  double sigma_noise = 0.0;  // miscalibration magnitude
  double beta = 0.0;         // confidence temperature; 0 means default_beta()
  std::uint64_t seed = 0;

  // External mode only.
  std::string endpoint_host = "127.0.0.1";
  int endpoint_port = 0;
  std::string prompts_dir;
  int max_inflight = 1;
  std::shared_ptr<TextCompletionClient> client;  // injected; built from host/port when null

  double effective_beta() const;
};

// Noiseless confidence of the emitted option: exp(b)/(exp(b)+3). The default
// beta is chosen so this equals 0.95.
double noiseless_base_confidence(double beta);
double default_beta();

// Ground-truth relevance rule: A on identity match, B on room co-location or
// an affinity-table relation, D for common house features, C otherwise.
Option ground_truth_option(const ObjectInstance& observed, const std::vector<Descriptor>& targets,
                           const GridScene& scene);

OptionProbPair relevance_options(const ObjectInstance& observed,
                                 const std::vector<Descriptor>& request_targets,
                                 const GridScene& scene, const OracleConfig& cfg);

AnswerJudgment answer_judgment(const Question& question, const Observation& observation,
                               const GridScene& scene, const OracleConfig& cfg);

// Frontier score feeding the no-communication semantic value, in [0, v_max].
double local_semantic_value(const Question& question, Cell frontier,
                            const Observation& observation, const GridScene& scene,
                            const OracleConfig& cfg);

constexpr double kSvMax = 3.0;
constexpr double kRelevanceHigh = 0.9;
constexpr double kRelevanceLow = 0.1;
constexpr double kGammaFloor = 0.05;

}  // namespace commcp
