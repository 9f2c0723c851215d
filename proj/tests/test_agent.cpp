#include <doctest.h>

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "commcp/agent.hpp"
#include "commcp/episode.hpp"

using namespace commcp;
using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<json> log_records(const std::string& log) {
  std::vector<json> out;
  std::stringstream ss(log);
  std::string line;
  while (std::getline(ss, line)) {
    if (!line.empty()) out.push_back(json::parse(line));
  }
  return out;
}

}  // namespace

TEST_CASE("confidence check") {
  SUBCASE("unique passing label") {
    AnswerJudgment j;
    j.dist = {0.9, 0.04, 0.03, 0.03};
    j.relevance = 0.95;
    auto got = confidence_check(j, 0.2);  // 0.855 > 0.8, unique
    REQUIRE(got.has_value());
    CHECK(*got == 0);
  }
  SUBCASE("uniform distribution never passes") {
    AnswerJudgment j;
    j.dist = {0.25, 0.25, 0.25, 0.25};
    j.relevance = 1.0;
    CHECK(!confidence_check(j, 0.2).has_value());
  }
  SUBCASE("two passing labels violate uniqueness") {
    AnswerJudgment j;
    j.dist = {0.5, 0.45, 0.04, 0.01};
    j.relevance = 1.0;
    CHECK(!confidence_check(j, 0.6).has_value());  // both 0.5 and 0.45 exceed 0.4
  }
  SUBCASE("agreement with a direct scan on random judgments") {
    Rng rng(17);
    for (int trial = 0; trial < 10000; ++trial) {
      std::size_t k = rng.next_bool(0.5) ? 2 : 4;
      AnswerJudgment j;
      double sum = 0.0;
      for (std::size_t i = 0; i < k; ++i) {
        j.dist.push_back(rng.next_u01());
        sum += j.dist.back();
      }
      for (double& v : j.dist) v /= sum;
      j.relevance = rng.next_u01();
      double eps2 = 0.01 + 0.98 * rng.next_u01();

      int passing = 0;
      int last = -1;
      for (std::size_t L = 0; L < k; ++L) {
        if (j.dist[L] * j.relevance > 1.0 - eps2) {
          ++passing;
          last = static_cast<int>(L);
        }
      }
      auto got = confidence_check(j, eps2);
      if (passing == 1) {
        REQUIRE(got.has_value());
        CHECK(*got == last);
      } else {
        CHECK(!got.has_value());
      }
    }
  }
}

TEST_CASE("handoff fixture reproduces the hand-traced exchange") {
  Scenario s = load_scenario(read_file(std::string(COMMCP_FIXTURES_DIR) + "/handoff.json"));

  EpisodeConfig cfg;
  cfg.policy = Policy::CommCP;
  cfg.seed = 5;
  cfg.sigma_noise = 0.0;
  cfg.thresholds = {0.9, 0.9};
  cfg.epsilon2 = 0.1;  // 0.855 < 0.9: nobody can answer, isolating the message path
  cfg.params.fov_deg = 360.0;
  cfg.params.range = 8;

  EpisodeResult result = run_episode(s, cfg);
  auto records = log_records(result.log);

  // both agents broadcast their request in the first tick
  std::vector<json> requests;
  std::vector<json> messages;
  std::vector<json> shares;
  std::map<double, std::map<int, json>> ticks;  // t -> agent -> record
  for (const auto& r : records) {
    if (r["record"] == "payload" && r["kind"] == "request") requests.push_back(r);
    if (r["record"] == "payload" && r["kind"] == "message") messages.push_back(r);
    if (r["record"] == "payload" && r["kind"] == "answer_share") shares.push_back(r);
    if (r["record"] == "tick") {
      for (const auto& aj : r["agents"]) ticks[r["t"].get<double>()][aj["id"].get<int>()] = aj;
    }
  }

  REQUIRE(requests.size() == 2);
  CHECK(requests[0]["t"] == 0.0);
  CHECK(requests[1]["t"] == 0.0);
  CHECK(requests[0]["delivery"] == 1.0);

  // agent 1 first sees the cushion two moves in; the calibrated pair passes
  // and the message serializes for one second
  REQUIRE(!messages.empty());
  const json& msg = messages[0];
  CHECK(msg["from"] == 1);
  CHECK(msg["to"] == 0);
  CHECK(msg["t"] == 2.0);
  CHECK(msg["delivery"] == 3.0);
  CHECK(msg["body"]["rendered"] == "red bear cushion may be your target at (12, 1)");
  CHECK(msg["body"]["targets_seen"].size() == 1);
  CHECK(msg["body"]["relevants"].empty());
  // only that one message ever leaves agent 1
  int from1 = 0;
  for (const auto& m : messages) {
    if (m["from"] == 1) ++from1;
  }
  CHECK(from1 == 1);

  // the confidence gate blocks every answer at epsilon2 = 0.1
  CHECK(shares.empty());
  CHECK(result.records.empty());
  CHECK(result.sr == 0.0);

  // agent 1 marches east toward its own target's side
  CHECK(ticks[0.0][1]["pos"] == json({9, 2}));
  CHECK(ticks[1.0][1]["pos"] == json({10, 2}));
  CHECK(ticks[2.0][1]["pos"] == json({11, 2}));

  // agent 0 was committed to the leftmost frontier and switches to the
  // frontier nearest the messaged position the moment the message lands
  CHECK(ticks[2.0][0]["goal"] == json({11, 2}));
  CHECK(ticks[3.0][0]["goal"] == json({12, 2}));
}

TEST_CASE("answer share is accepted and stops the agent") {
  Scenario s = load_scenario(read_file(std::string(COMMCP_FIXTURES_DIR) + "/handoff.json"));
  QuestionSet& qs = s.questions;

  OracleConfig oracle;
  oracle.seed = 1;
  Agent agent(0, s.starts[0], s.scene, qs, oracle, {0.9, 0.9}, ConfidenceConfig{0.4},
              SimParams{}, PolicyFlags{}, 7);

  CHECK(!agent.stopped());
  Delivery d;
  d.delivery_time = 1.0;
  d.from = 1;
  d.to = 0;
  d.body = AnswerShare{1, 0, "q0", 1};
  StepResult r = agent.step({d}, 1.0);

  REQUIRE(r.solves.size() == 1);
  CHECK(r.solves[0].via == Via::Shared);
  CHECK(r.solves[0].label == 1);
  CHECK(agent.stopped());
  CHECK(r.done);
  REQUIRE(agent.records().size() == 1);
  CHECK(agent.records()[0].via == Via::Shared);
  CHECK(agent.records()[0].answered_by == 1);

  // done: nothing further moves or is emitted
  StepResult r2 = agent.step({}, 2.0);
  CHECK(r2.done);
  CHECK(!r2.moved);
  CHECK(r2.outbox.empty());

  // a duplicate share for the same question is ignored
  StepResult r3 = agent.step({d}, 3.0);
  CHECK(r3.solves.empty());
  CHECK(agent.records().size() == 1);
}

TEST_CASE("questions never leave solved and unsolved shrinks monotonically") {
  Scenario s = load_scenario(read_file(std::string(COMMCP_FIXTURES_DIR) + "/house_small.json"));
  EpisodeConfig cfg;
  cfg.policy = Policy::CommCP;
  cfg.seed = 11;
  cfg.sigma_noise = 0.1;
  cfg.thresholds = {0.8, 0.8};
  EpisodeResult result = run_episode(s, cfg);

  std::set<std::string> solved;
  for (const auto& r : log_records(result.log)) {
    if (r["record"] == "solve") {
      CHECK(solved.insert(r["q"].get<std::string>()).second);  // never re-solved
    }
  }
  CHECK(solved.size() == result.records.size());
}
