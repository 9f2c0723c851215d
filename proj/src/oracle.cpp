#include "commcp/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "commcp/affinity.hpp"
#include "commcp/external_backend.hpp"
#include "commcp/rng.hpp"

namespace commcp {

Option option_from_letter(char c) {
  if (c < 'A' || c > 'D') throw ValidationError(std::string("bad option letter: ") + c);
  return static_cast<Option>(c - 'A');
}

double default_beta() {
  // exp(b) / (exp(b) + 3) == 0.95
  static const double b = std::log(57.0);
  return b;
}

double OracleConfig::effective_beta() const { return beta > 0.0 ? beta : default_beta(); }

double noiseless_base_confidence(double beta) {
  double e = std::exp(beta);
  return e / (e + 3.0);
}

Option ground_truth_option(const ObjectInstance& observed, const std::vector<Descriptor>& targets,
                           const GridScene& scene) {
  for (const auto& d : targets) {
    if (matches(observed, d)) return Option::A;
  }
  for (const auto& d : targets) {
    for (const ObjectInstance* inst : scene.matching_objects(d)) {
      if (inst->id != observed.id && inst->room_id == observed.room_id) return Option::B;
    }
    if (affinity_related(observed.name, d.name)) return Option::B;
  }
  if (is_common_feature(observed.name)) return Option::D;
  return Option::C;
}

namespace {

std::string targets_key(const std::vector<Descriptor>& targets) {
  std::string key;
  for (const auto& d : targets) {
    key += d.name;
    key += '\x1f';
    for (const auto& [k, v] : d.attributes) {
      key += k;
      key += '=';
      key += v;
      key += '\x1f';
    }
    key += '\x1e';
  }
  return key;
}

// Option scores are the ground-truth indicator plus sigma-scaled unit noise.
// The noise draws do not depend on sigma, so the emission flip rate grows
// monotonically with it sample by sample.
std::array<double, 4> option_scores(const ObjectInstance& observed,
                                    const std::vector<Descriptor>& targets,
                                    const GridScene& scene, const OracleConfig& cfg,
                                    Option truth) {
  std::array<double, 4> s{};
  for (int o = 0; o < 4; ++o) {
    double g = hash_gauss(HashKey(cfg.seed)
                              .add("relopt")
                              .add(scene.name)
                              .add(observed.id)
                              .add(targets_key(targets))
                              .add(o)
                              .value());
    s[o] = (o == static_cast<int>(truth) ? 1.0 : 0.0) + cfg.sigma_noise * g;
  }
  return s;
}

}  // namespace

OptionProbPair relevance_options(const ObjectInstance& observed,
                                 const std::vector<Descriptor>& request_targets,
                                 const GridScene& scene, const OracleConfig& cfg) {
  if (cfg.mode == OracleMode::External)
    return external_relevance_options(observed, request_targets, cfg);

  Option truth = ground_truth_option(observed, request_targets, scene);
  auto scores = option_scores(observed, request_targets, scene, cfg, truth);

  int emitted = 0;
  for (int o = 1; o < 4; ++o) {
    if (scores[o] > scores[emitted]) emitted = o;
  }
  // Softmax confidence in the winning option; a narrow win means a low score,
  // which is what the conformal filter keys on.
  double beta = cfg.effective_beta();
  double zmax = scores[emitted];
  double denom = 0.0;
  for (double v : scores) denom += std::exp(beta * (v - zmax));
  double prob = std::clamp(1.0 / denom, 0.0, 1.0);
  return OptionProbPair{observed.id, static_cast<Option>(emitted), prob};
}

AnswerJudgment answer_judgment(const Question& question, const Observation& observation,
                               const GridScene& scene, const OracleConfig& cfg) {
  if (cfg.mode == OracleMode::External) return external_answer_judgment(question, observation, cfg);

  bool target_visible = false;
  for (const auto& obj : observation.visible_objects) {
    for (const auto& d : question.targets) {
      if (matches(obj, d)) {
        target_visible = true;
        break;
      }
    }
    if (target_visible) break;
  }

  HashKey base(cfg.seed);
  base.add("ans")
      .add(scene.name)
      .add(question.id)
      .add(observation.pose.position.x)
      .add(observation.pose.position.y)
      .add(static_cast<int>(observation.pose.heading));

  std::size_t k = question.choices.size();
  AnswerJudgment j;
  j.dist.assign(k, 0.0);

  double g_rel = hash_gauss(HashKey(base).add("rel").value());
  if (!target_visible) {
    j.relevance = std::clamp(kRelevanceLow + cfg.sigma_noise * g_rel, 0.0, 1.0);
    std::fill(j.dist.begin(), j.dist.end(), 1.0 / static_cast<double>(k));
    return j;
  }

  j.relevance = std::clamp(kRelevanceHigh + cfg.sigma_noise * g_rel, 0.0, 1.0);
  std::size_t peak = 0;
  double best = -1e300;
  for (std::size_t L = 0; L < k; ++L) {
    double g = hash_gauss(HashKey(base).add("label").add(static_cast<int>(L)).value());
    double s = (static_cast<int>(L) == question.truth ? 1.0 : 0.0) + cfg.sigma_noise * g;
    if (s > best) {
      best = s;
      peak = L;
    }
  }
  double g_gamma = hash_gauss(HashKey(base).add("gamma").value());
  double gamma = std::min(kGammaFloor + cfg.sigma_noise * std::abs(g_gamma), 0.75);
  for (std::size_t L = 0; L < k; ++L)
    j.dist[L] = L == peak ? 1.0 - gamma : gamma / static_cast<double>(k - 1);
  return j;
}

double local_semantic_value(const Question& question, Cell frontier,
                            const Observation& observation, const GridScene& scene,
                            const OracleConfig& cfg) {
  (void)observation;  // the simulated prior depends on the map, not the view
  int room = scene.in_bounds(frontier) ? scene.room_index_at(frontier) : -1;
  if (room < 0) return 0.0;

  double base = 0.0;
  for (const auto& d : question.targets) {
    for (const ObjectInstance* inst : scene.matching_objects(d)) {
      int tr = scene.room_index_at(inst->position);
      if (tr == room) {
        base = kSvMax;
      } else if (base < kSvMax / 2.0 && scene.rooms_adjacent(room, tr)) {
        base = kSvMax / 2.0;
      }
    }
  }
  double g = hash_gauss(HashKey(cfg.seed)
                            .add("sv")
                            .add(scene.name)
                            .add(question.id)
                            .add(frontier.x)
                            .add(frontier.y)
                            .value());
  return std::clamp(base + cfg.sigma_noise * (kSvMax / 2.0) * g, 0.0, kSvMax);
}

}  // namespace commcp
