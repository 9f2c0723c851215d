#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "commcp/agent.hpp"
#include "commcp/scenario.hpp"

namespace commcp {

enum class Policy { CommCP, MMFBE, MMEuC, NoCP, ComControl, NoAnswerSharing };

const char* policy_name(Policy p);
std::optional<Policy> policy_from_name(const std::string& s);
PolicyFlags flags_for(Policy p);

struct EpisodeConfig {
  Policy policy = Policy::CommCP;
  std::uint64_t seed = 0;
  double sigma_noise = 0.0;
  double beta = 0.0;  // 0 -> oracle default
  CpThresholds thresholds{0.0, 0.0};
  double epsilon2 = 0.4;
  SimParams params;
  double msg_rate = 1.0;
  double t_max = 0.0;  // 0 -> 4 * perimeter * cell traversal time
  bool dump_sv = false;
};

struct EpisodeResult {
  std::string scenario_id;
  std::string policy;
  std::uint64_t seed = 0;
  std::map<std::string, Outcome> outcomes;
  std::vector<AnswerRecord> records;
  double t_max = 0.0;
  double total_sim_time = 0.0;
  double ntc = 0.0;  // total_sim_time / t_max
  double sr = 0.0;   // correct / total questions
  int n_questions = 0;
  int messages_sent = 0;
  int payloads_sent = 0;
  int answer_shares_sent = 0;
  std::size_t in_flight_at_end = 0;
  double scene_area_m2 = 0.0;
  bool com_control_cardinality_ok = true;
  std::string log;  // line-delimited structured records
};

double default_t_max(const GridScene& scene, const SimParams& params);

EpisodeResult run_episode(const Scenario& scenario, const EpisodeConfig& cfg);

}  // namespace commcp
