#include "commcp/episode.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

namespace commcp {

using nlohmann::ordered_json;

const char* policy_name(Policy p) {
  switch (p) {
    case Policy::CommCP: return "commcp";
    case Policy::MMFBE: return "mmfbe";
    case Policy::MMEuC: return "mmeuc";
    case Policy::NoCP: return "no_cp";
    case Policy::ComControl: return "com_control";
    case Policy::NoAnswerSharing: return "no_answer_sharing";
  }
  return "?";
}

std::optional<Policy> policy_from_name(const std::string& s) {
  if (s == "commcp") return Policy::CommCP;
  if (s == "mmfbe") return Policy::MMFBE;
  if (s == "mmeuc") return Policy::MMEuC;
  if (s == "no_cp") return Policy::NoCP;
  if (s == "com_control") return Policy::ComControl;
  if (s == "no_answer_sharing") return Policy::NoAnswerSharing;
  return std::nullopt;
}

PolicyFlags flags_for(Policy p) {
  PolicyFlags f;
  switch (p) {
    case Policy::CommCP: break;
    case Policy::MMFBE:
      f.use_sv = false;
      f.use_comms = false;
      break;
    case Policy::MMEuC: f.use_comms = false; break;
    case Policy::NoCP: f.bypass_cp = true; break;
    case Policy::ComControl: f.com_control = true; break;
    case Policy::NoAnswerSharing: f.share_answers = false; break;
  }
  return f;
}

double default_t_max(const GridScene& scene, const SimParams& params) {
  double traversal = scene.cell_size / params.speed_mps;
  return 4.0 * 2.0 * (scene.width + scene.height) * traversal;
}

namespace {

ordered_json payload_json(const PayloadBody& body) {
  ordered_json j;
  if (const auto* req = std::get_if<Request>(&body)) {
    j["question"] = req->question_id;
    j["targets"] = descriptor_list_text(req->targets);
  } else if (const auto* msg = std::get_if<Message>(&body)) {
    j["question"] = msg->question_id;
    ordered_json rel = ordered_json::array();
    for (const auto& r : msg->relevants) rel.push_back({r.name, r.position.x, r.position.y});
    ordered_json tgt = ordered_json::array();
    for (const auto& t : msg->targets_seen) tgt.push_back({t.name, t.position.x, t.position.y});
    j["relevants"] = rel;
    j["targets_seen"] = tgt;
    j["rendered"] = msg->rendered;
  } else if (const auto* share = std::get_if<AnswerShare>(&body)) {
    j["question"] = share->question_id;
    j["label"] = std::string(1, label_of(share->label));
  } else if (const auto* notice = std::get_if<SolvedNotice>(&body)) {
    j["question"] = notice->question_id;
  }
  return j;
}

std::vector<Pose> draw_starts(const Scenario& scenario, std::uint64_t seed) {
  if (!scenario.starts.empty()) return scenario.starts;
  std::vector<Cell> free;
  for (int y = 0; y < scenario.scene.height; ++y) {
    for (int x = 0; x < scenario.scene.width; ++x) {
      if (scenario.scene.is_free({x, y})) free.push_back({x, y});
    }
  }
  Rng rng(HashKey(seed).add("starts").add(scenario.scene.name).value());
  std::vector<Pose> out;
  std::vector<Cell> pool = free;
  for (int a = 0; a < scenario.questions.n_agents; ++a) {
    if (pool.empty()) pool = free;  // more agents than free cells is degenerate
    std::size_t i = rng.next_below(pool.size());
    Pose p;
    p.position = pool[i];
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(i));
    p.heading = static_cast<Heading>(rng.next_below(4));
    out.push_back(p);
  }
  return out;
}

}  // namespace

EpisodeResult run_episode(const Scenario& scenario, const EpisodeConfig& cfg) {
  const GridScene& scene = scenario.scene;
  const QuestionSet& qset = scenario.questions;
  if (qset.n_agents < 1) throw ScenarioError("scenario has no agents");

  EpisodeResult out;
  out.scenario_id = scene.name;
  out.policy = policy_name(cfg.policy);
  out.seed = cfg.seed;
  out.n_questions = static_cast<int>(qset.questions.size());
  out.scene_area_m2 = scene.area_m2();
  out.t_max = cfg.t_max > 0.0 ? cfg.t_max : default_t_max(scene, cfg.params);

  OracleConfig oracle;
  oracle.mode = OracleMode::Simulated;
  oracle.sigma_noise = cfg.sigma_noise;
  oracle.beta = cfg.beta;
  oracle.seed = cfg.seed;

  PolicyFlags flags = flags_for(cfg.policy);
  std::vector<Pose> starts = draw_starts(scenario, cfg.seed);

  std::vector<Agent> agents;
  agents.reserve(static_cast<std::size_t>(qset.n_agents));
  for (int a = 0; a < qset.n_agents; ++a) {
    agents.emplace_back(a, starts[static_cast<std::size_t>(a)], scene, qset, oracle,
                        cfg.thresholds, ConfidenceConfig{cfg.epsilon2}, cfg.params, flags,
                        HashKey(cfg.seed).add("agent").add(a).value());
  }

  MessageBus bus(BusConfig{cfg.msg_rate}, qset.n_agents);

  std::string log;
  log.reserve(1 << 16);
  auto emit = [&log](const ordered_json& j) {
    log += j.dump();
    log += '\n';
  };

  {
    ordered_json header;
    header["record"] = "header";
    header["scenario"] = scene.name;
    header["policy"] = out.policy;
    header["seed"] = cfg.seed;
    header["n_agents"] = qset.n_agents;
    header["t_max"] = out.t_max;
    header["msg_rate"] = cfg.msg_rate;
    header["sigma_noise"] = cfg.sigma_noise;
    header["epsilon2"] = cfg.epsilon2;
    header["thresholds"] = {{"A", cfg.thresholds.a}, {"B", cfg.thresholds.b}};
    ordered_json sj = ordered_json::array();
    for (const Pose& p : starts) sj.push_back({p.position.x, p.position.y, heading_name(p.heading)});
    header["starts"] = sj;
    emit(header);
  }

  const double dt = scene.cell_size / cfg.params.speed_mps;
  double last_solve_time = 0.0;
  int solved_total = 0;

  for (int tick = 0;; ++tick) {
    double t = tick * dt;
    if (t >= out.t_max) break;

    bool all_stopped = true;
    for (const Agent& a : agents) all_stopped &= a.stopped();
    if (all_stopped) break;

    std::vector<std::vector<Delivery>> inboxes;
    inboxes.reserve(agents.size());
    for (Agent& a : agents) inboxes.push_back(bus.drain(a.id(), t));

    std::vector<StepResult> results;
    results.reserve(agents.size());
    for (std::size_t i = 0; i < agents.size(); ++i)
      results.push_back(agents[i].step(inboxes[i], t));

    // commit outboxes at the tick barrier in agent-index order
    for (std::size_t i = 0; i < agents.size(); ++i) {
      for (OutPayload& p : results[i].outbox) {
        PayloadBody body = std::move(p.body);
        const char* kind = payload_kind(body);
        if (std::holds_alternative<Message>(body)) ++out.messages_sent;
        if (std::holds_alternative<AnswerShare>(body)) ++out.answer_shares_sent;
        ++out.payloads_sent;
        ordered_json jp;
        jp["record"] = "payload";
        jp["t"] = t;
        jp["kind"] = kind;
        jp["from"] = static_cast<int>(i);
        jp["to"] = p.to;
        jp["body"] = payload_json(body);
        jp["delivery"] = bus.enqueue(static_cast<int>(i), p.to, std::move(body), t);
        emit(jp);
      }
      for (const SolveEvent& s : results[i].solves) {
        const Question* q = qset.by_id(s.question_id);
        ordered_json js;
        js["record"] = "solve";
        js["t"] = t;
        js["q"] = s.question_id;
        js["agent"] = static_cast<int>(i);
        js["by"] = s.by;
        js["via"] = s.via == Via::Self ? "Self" : "Shared";
        js["label"] = std::string(1, label_of(s.label));
        js["correct"] = q != nullptr && q->truth == s.label;
        emit(js);
        last_solve_time = t;
        ++solved_total;
      }
      for (const RespondEvent& r : results[i].responses) {
        if (r.sent_targets + r.sent_relevants != r.cp_targets + r.cp_relevants)
          out.com_control_cardinality_ok = false;
        ordered_json jr;
        jr["record"] = "respond";
        jr["t"] = t;
        jr["agent"] = static_cast<int>(i);
        jr["q"] = r.question_id;
        jr["cp"] = {r.cp_targets, r.cp_relevants};
        jr["sent"] = {r.sent_targets, r.sent_relevants};
        emit(jr);
      }
    }

    ordered_json jt;
    jt["record"] = "tick";
    jt["t"] = t;
    ordered_json ja = ordered_json::array();
    for (const Agent& a : agents) {
      ordered_json aj;
      aj["id"] = a.id();
      aj["pos"] = {a.pose().position.x, a.pose().position.y};
      aj["heading"] = heading_name(a.pose().heading);
      if (a.goal())
        aj["goal"] = {a.goal()->x, a.goal()->y};
      else
        aj["goal"] = nullptr;
      aj["done"] = a.stopped();
      ja.push_back(aj);
    }
    jt["agents"] = ja;
    emit(jt);

    if (cfg.dump_sv) {
      for (const Agent& a : agents) {
        ordered_json jv;
        jv["record"] = "sv";
        jv["t"] = t;
        jv["agent"] = a.id();
        jv["fused"] = a.fused_sv();
        emit(jv);
      }
    }
  }

  for (Agent& a : agents) {
    for (const AnswerRecord& r : a.records()) out.records.push_back(r);
  }
  std::stable_sort(out.records.begin(), out.records.end(),
                   [](const AnswerRecord& a, const AnswerRecord& b) {
                     return a.sim_time != b.sim_time ? a.sim_time < b.sim_time
                                                     : a.question_id < b.question_id;
                   });
  out.outcomes = grade(out.records, qset);
  out.sr = success_rate(out.outcomes);

  bool all_answered = solved_total == out.n_questions;
  out.total_sim_time = all_answered ? last_solve_time : out.t_max;
  out.ntc = out.t_max > 0.0 ? out.total_sim_time / out.t_max : 0.0;
  out.in_flight_at_end = bus.in_flight();

  ordered_json je;
  je["record"] = "end";
  je["total_sim_time"] = out.total_sim_time;
  je["ntc"] = out.ntc;
  je["sr"] = out.sr;
  je["messages_sent"] = out.messages_sent;
  je["payloads_sent"] = out.payloads_sent;
  je["answer_shares_sent"] = out.answer_shares_sent;
  je["in_flight"] = out.in_flight_at_end;
  emit(je);
  out.log = std::move(log);
  return out;
}

}  // namespace commcp
