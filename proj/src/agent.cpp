#include "commcp/agent.hpp"

#include <algorithm>

namespace commcp {

std::optional<int> confidence_check(const AnswerJudgment& judgment, double epsilon2) {
  std::optional<int> found;
  for (std::size_t L = 0; L < judgment.dist.size(); ++L) {
    if (judgment.dist[L] * judgment.relevance > 1.0 - epsilon2) {
      if (found) return std::nullopt;  // uniqueness violated
      found = static_cast<int>(L);
    }
  }
  return found;
}

namespace {

bool any_target_visible(const Question& q, const Observation& obs) {
  for (const auto& obj : obs.visible_objects) {
    for (const auto& d : q.targets) {
      if (matches(obj, d)) return true;
    }
  }
  return false;
}

std::string display_name(const ObjectInstance& obj) {
  auto color = obj.attributes.find("color");
  return color == obj.attributes.end() ? obj.name : color->second + " " + obj.name;
}

Heading heading_towards(Cell from, Cell to) {
  if (to.x > from.x) return Heading::East;
  if (to.x < from.x) return Heading::West;
  if (to.y > from.y) return Heading::South;
  return Heading::North;
}

Heading rotate_cw(Heading h) {
  switch (h) {
    case Heading::North: return Heading::East;
    case Heading::East: return Heading::South;
    case Heading::South: return Heading::West;
    case Heading::West: return Heading::North;
  }
  return Heading::North;
}

}  // namespace

Agent::Agent(int id, Pose start, const GridScene& scene, const QuestionSet& qset,
             OracleConfig oracle, CpThresholds thresholds, ConfidenceConfig confidence,
             SimParams params, PolicyFlags flags, std::uint64_t rng_seed)
    : id_(id),
      pose_(start),
      scene_(scene),
      qset_(qset),
      oracle_(oracle),
      thresholds_(thresholds),
      confidence_(confidence),
      params_(params),
      flags_(flags),
      rng_(rng_seed),
      occupancy_(scene.width, scene.height),
      svmap_(scene.width, scene.height),
      fused_(static_cast<std::size_t>(scene.width) * scene.height, 0.0) {
  for (const Question& q : qset_.questions) {
    if (q.assignee == id_) {
      own_questions_.push_back(&q);
      unsolved_.insert(q.id);
    }
  }
}

void Agent::solve(const Question& q, int label, Via via, int by, double sim_time,
                  StepResult& result) {
  unsolved_.erase(q.id);
  svmap_.remove_layer(q.id);
  stored_messages_.erase(q.id);
  records_.push_back({q.id, by, via, label, sim_time});
  result.solves.push_back({q.id, label, via, by});
  if (flags_.use_comms) result.outbox.push_back({-1, SolvedNotice{id_, q.id}});
}

StepResult Agent::step(const std::vector<Delivery>& inbox, double sim_time) {
  StepResult result;

  // (0) one-time request broadcast for every assigned question
  if (first_step_) {
    first_step_ = false;
    if (flags_.use_comms) {
      for (const Question* q : own_questions_)
        result.outbox.push_back({-1, Request{id_, q->id, q->targets}});
    }
  }

  // (1) observe
  Observation obs = observe(scene_, pose_, params_.fov_deg, params_.range);
  occupancy_.update(obs.revealed_cells, scene_);

  // (2) self-answer own questions; offer answers for others' when their
  // target is actually in view (bounds oracle traffic)
  for (const Question* q : own_questions_) {
    if (!unsolved_.count(q->id)) continue;
    AnswerJudgment j = answer_judgment(*q, obs, scene_, oracle_);
    if (auto label = confidence_check(j, confidence_.epsilon2))
      solve(*q, *label, Via::Self, id_, sim_time, result);
  }
  if (flags_.use_comms && flags_.share_answers) {
    for (const Question& q : qset_.questions) {
      if (q.assignee == id_ || known_solved_.count(q.id) || shared_by_me_.count(q.id)) continue;
      if (!any_target_visible(q, obs)) continue;
      AnswerJudgment j = answer_judgment(q, obs, scene_, oracle_);
      if (auto label = confidence_check(j, confidence_.epsilon2)) {
        result.outbox.push_back({q.assignee, AnswerShare{id_, q.assignee, q.id, *label}});
        shared_by_me_.insert(q.id);
      }
    }
  }

  // (3) inbox
  for (const Delivery& d : inbox) {
    if (const auto* share = std::get_if<AnswerShare>(&d.body)) {
      const Question* q = qset_.by_id(share->question_id);
      if (q != nullptr && q->assignee == id_ && unsolved_.count(q->id))
        solve(*q, share->label, Via::Shared, share->from_agent, sim_time, result);
    } else if (const auto* msg = std::get_if<Message>(&d.body)) {
      if (unsolved_.count(msg->question_id)) stored_messages_[msg->question_id].push_back(*msg);
    } else if (const auto* req = std::get_if<Request>(&d.body)) {
      if (!known_solved_.count(req->question_id)) registered_requests_[req->question_id] = *req;
    } else if (const auto* notice = std::get_if<SolvedNotice>(&d.body)) {
      known_solved_.insert(notice->question_id);
      registered_requests_.erase(notice->question_id);
      evaluated_for_request_.erase(notice->question_id);
    }
  }

  // (4) respond to registered requests
  if (flags_.use_comms) respond_to_requests(obs, result);

  // (5)+(6) plan and move
  if (stopped()) {
    result.done = true;
    goal_.reset();
    path_.clear();
    std::fill(fused_.begin(), fused_.end(), 0.0);
  } else {
    plan_and_move(obs, result);
  }
  result.goal = goal_;
  return result;
}

void Agent::respond_to_requests(const Observation& obs, StepResult& result) {
  for (auto& [qid, req] : registered_requests_) {
    auto& evaluated = evaluated_for_request_[qid];
    std::vector<const ObjectInstance*> fresh;
    for (const auto& obj : obs.visible_objects) {
      if (evaluated.insert(obj.id).second) fresh.push_back(&obj);
    }
    if (fresh.empty()) continue;

    std::vector<OptionProbPair> pairs;
    pairs.reserve(fresh.size());
    std::map<std::string, NamedPos> positions;
    for (const ObjectInstance* obj : fresh) {
      pairs.push_back(relevance_options(*obj, req.targets, scene_, oracle_));
      positions[obj->id] = {display_name(*obj), obj->position};
    }

    FilterResult cp;
    if (flags_.bypass_cp) {
      for (const auto& p : pairs) {
        if (p.option == Option::A) cp.targets.push_back(p.object_id);
        if (p.option == Option::B) cp.relevants.push_back(p.object_id);
      }
    } else {
      cp = filter_pairs(pairs, thresholds_.a, thresholds_.b);
    }

    FilterResult sent = cp;
    if (flags_.com_control) {
      // same payload size as the calibrated filter, content drawn blind
      std::vector<std::string> pool;
      for (const ObjectInstance* obj : fresh) pool.push_back(obj->id);
      sent.targets.clear();
      sent.relevants.clear();
      for (std::size_t k = 0; k < cp.targets.size() && !pool.empty(); ++k) {
        std::size_t i = rng_.next_below(pool.size());
        sent.targets.push_back(pool[i]);
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(i));
      }
      for (std::size_t k = 0; k < cp.relevants.size() && !pool.empty(); ++k) {
        std::size_t i = rng_.next_below(pool.size());
        sent.relevants.push_back(pool[i]);
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(i));
      }
    }

    if (auto msg = generate_message(sent, positions, req, id_)) {
      result.outbox.push_back({req.from_agent, std::move(*msg)});
      result.responses.push_back({qid, static_cast<int>(cp.targets.size()),
                                  static_cast<int>(cp.relevants.size()),
                                  static_cast<int>(sent.targets.size()),
                                  static_cast<int>(sent.relevants.size())});
    }
  }
}

void Agent::plan_and_move(const Observation& obs, StepResult& result) {
  std::vector<FrontierPoint> frontiers = detect_frontiers(occupancy_);
  if (frontiers.empty()) {
    result.exploration_exhausted = true;
    goal_.reset();
    path_.clear();
    return;
  }

  const std::size_t grid = static_cast<std::size_t>(scene_.width) * scene_.height;

  // Layers are rebuilt every tick: the no-communication prior is recomputed
  // for the current frontiers and stored messages are re-projected onto them.
  // A message position stops contributing once its cell has been seen.
  svmap_.clear();
  std::vector<const std::vector<double>*> layers;
  for (const Question* q : own_questions_) {
    if (!unsolved_.count(q->id)) continue;
    auto& layer = svmap_.layer(q->id);
    layer.assign(grid, 0.0);
    if (flags_.use_sv) {
      for (const FrontierPoint& f : frontiers) {
        layer[scene_.index(f.position)] =
            local_semantic_value(*q, f.position, obs, scene_, oracle_);
      }
      auto stored = stored_messages_.find(q->id);
      if (stored != stored_messages_.end()) {
        std::vector<Message> still_active;
        for (const Message& m : stored->second) {
          Message active = m;
          auto already_seen = [&](const NamedPos& p) {
            return occupancy_.in_bounds(p.position) &&
                   occupancy_.at(p.position) != CellState::Unknown;
          };
          std::erase_if(active.relevants, already_seen);
          std::erase_if(active.targets_seen, already_seen);
          if (active.relevants.empty() && active.targets_seen.empty()) continue;
          apply_message(svmap_, active, q->id, params_.tau1, params_.tau2, frontiers);
          still_active.push_back(m);
        }
        stored->second = std::move(still_active);
      }
    }
    layers.push_back(&svmap_.layer(q->id));
  }

  std::fill(fused_.begin(), fused_.end(), 0.0);
  if (!layers.empty()) {
    for (std::size_t i = 0; i < grid; ++i) {
      double sum = 0.0;
      for (const auto* layer : layers) sum += (*layer)[i];
      fused_[i] = sum / static_cast<double>(layers.size());
    }
  }
  std::vector<double> smoothed = smooth(fused_, scene_.width, scene_.height, params_.smooth_sigma);

  bool any_positive = false;
  for (const FrontierPoint& f : frontiers) {
    if (smoothed[scene_.index(f.position)] > 0.0) {
      any_positive = true;
      break;
    }
  }

  // Goal choice: argmax over frontiers when any value is positive; otherwise
  // keep the committed goal while it survives, else draw a random frontier.
  std::vector<FrontierPoint> candidates = frontiers;
  if (any_positive) {
    std::stable_sort(candidates.begin(), candidates.end(),
                     [&](const FrontierPoint& a, const FrontierPoint& b) {
                       return smoothed[scene_.index(a.position)] >
                              smoothed[scene_.index(b.position)];
                     });
  } else {
    bool keep = false;
    if (goal_) {
      auto it = std::find_if(frontiers.begin(), frontiers.end(),
                             [&](const FrontierPoint& f) { return f.position == *goal_; });
      keep = it != frontiers.end();
    }
    if (keep) {
      candidates.clear();
      candidates.push_back({*goal_});
      for (const FrontierPoint& f : frontiers) {
        if (f.position != *goal_) candidates.push_back(f);
      }
    } else {
      std::size_t pick = rng_.next_below(candidates.size());
      std::rotate(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(pick),
                  candidates.end());
    }
  }

  goal_.reset();
  path_.clear();
  for (const FrontierPoint& f : candidates) {
    try {
      path_ = plan_path(occupancy_, pose_.position, f.position);
      goal_ = f.position;
      break;
    } catch (const UnreachableError&) {
      continue;
    }
  }
  if (!goal_) {
    result.exploration_exhausted = true;
    return;
  }

  if (path_.size() >= 2) {
    Cell next = path_[1];
    pose_.heading = heading_towards(pose_.position, next);
    pose_.position = next;
    result.moved = true;
  } else {
    // standing on the goal frontier: spin to sweep the unknown side
    pose_.heading = rotate_cw(pose_.heading);
  }
}

}  // namespace commcp
