#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "commcp/comms.hpp"
#include "commcp/explore.hpp"
#include "commcp/oracle.hpp"
#include "commcp/tasks.hpp"

namespace commcp {

struct ConfidenceConfig {
  double epsilon2 = 0.4;  // answer accepted when dist(L) * relevance > 1 - epsilon2
};

struct SimParams {
  double fov_deg = 90.0;
  int range = 8;
  double tau1 = 1.0;
  double tau2 = 10.0;
  double smooth_sigma = 2.0;
  double speed_mps = 1.0;
};

// What the policy variants toggle in the pipeline.
struct PolicyFlags {
  bool use_sv = true;         // semantic value layers (off -> pure frontier walk)
  bool use_comms = true;      // requests, messages, shares, notices
  bool bypass_cp = false;     // pass every A/B pair regardless of score
  bool com_control = false;   // cardinality-matched random message content
  bool share_answers = true;  // emit answers for other agents' questions
};

// Some(L) iff exactly one label satisfies dist(L) * relevance > 1 - epsilon2.
std::optional<int> confidence_check(const AnswerJudgment& judgment, double epsilon2);

struct OutPayload {
  int to = -1;  // -1 broadcasts
  PayloadBody body;
};

struct SolveEvent {
  std::string question_id;
  int label = 0;
  Via via = Via::Self;
  int by = 0;
};

struct RespondEvent {
  std::string question_id;
  int cp_targets = 0;
  int cp_relevants = 0;
  int sent_targets = 0;
  int sent_relevants = 0;
};

struct StepResult {
  std::vector<OutPayload> outbox;
  std::vector<SolveEvent> solves;
  std::vector<RespondEvent> responses;
  bool moved = false;
  bool done = false;
  bool exploration_exhausted = false;
  std::optional<Cell> goal;
};

class Agent {
 public:
  Agent(int id, Pose start, const GridScene& scene, const QuestionSet& qset, OracleConfig oracle,
        CpThresholds thresholds, ConfidenceConfig confidence, SimParams params, PolicyFlags flags,
        std::uint64_t rng_seed);

  // One lockstep tick: observe, answer, handle inbox, respond to requests,
  // plan, move one cell. Deterministic given (state, inbox, seed).
  StepResult step(const std::vector<Delivery>& inbox, double sim_time);

  bool stopped() const { return unsolved_.empty(); }
  int id() const { return id_; }
  const Pose& pose() const { return pose_; }
  const OccupancyMap& occupancy() const { return occupancy_; }
  const std::vector<AnswerRecord>& records() const { return records_; }
  const std::vector<double>& fused_sv() const { return fused_; }
  std::optional<Cell> goal() const { return goal_; }

 private:
  void solve(const Question& q, int label, Via via, int by, double sim_time, StepResult& result);
  void respond_to_requests(const Observation& obs, StepResult& result);
  void plan_and_move(const Observation& obs, StepResult& result);

  int id_;
  Pose pose_;
  const GridScene& scene_;
  const QuestionSet& qset_;
  OracleConfig oracle_;
  CpThresholds thresholds_;
  ConfidenceConfig confidence_;
  SimParams params_;
  PolicyFlags flags_;
  Rng rng_;

  OccupancyMap occupancy_;
  SemanticValueMap svmap_;
  std::vector<double> fused_;
  std::vector<const Question*> own_questions_;
  std::set<std::string> unsolved_;
  std::vector<AnswerRecord> records_;
  std::set<std::string> shared_by_me_;
  std::set<std::string> known_solved_;
  std::map<std::string, Request> registered_requests_;
  std::map<std::string, std::set<std::string>> evaluated_for_request_;
  std::map<std::string, std::vector<Message>> stored_messages_;
  std::optional<Cell> goal_;
  std::vector<Cell> path_;
  bool first_step_ = true;
};

}  // namespace commcp
