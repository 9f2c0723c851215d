#include "commcp/bench.hpp"

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

namespace commcp {

CalibrationDraws generate_calibration(const std::vector<Scenario>& scenarios, int pairs,
                                      const OracleConfig& oracle) {
  if (scenarios.empty()) throw ConfigError("calibration needs at least one scenario");
  CalibrationDraws out;
  out.set_a.option_class = Option::A;
  out.set_b.option_class = Option::B;
  for (const Scenario& s : scenarios) {
    out.set_a.provenance.push_back(s.scene.name);
    out.set_b.provenance.push_back(s.scene.name);
  }

  Rng rng(HashKey(oracle.seed).add("calibration").value());
  int collected = 0;
  int attempts = 0;
  const int max_attempts = pairs * 64 + 256;
  while (collected < pairs && attempts++ < max_attempts) {
    const Scenario& s = scenarios[static_cast<std::size_t>(attempts) % scenarios.size()];
    if (s.scene.objects.empty() || s.questions.questions.empty()) continue;
    const ObjectInstance& observed =
        s.scene.objects[rng.next_below(s.scene.objects.size())];
    const Question& q = s.questions.questions[rng.next_below(s.questions.questions.size())];

    // distinct draw per (attempt) so repeated pairs stay exchangeable
    OracleConfig cfg = oracle;
    cfg.seed = HashKey(oracle.seed).add("calib_draw").add(attempts).value();
    OptionProbPair pair = relevance_options(observed, q.targets, s.scene, cfg);
    if (pair.option != Option::A && pair.option != Option::B) continue;

    Option truth = ground_truth_option(observed, q.targets, s.scene);
    CalibrationSample sample{pair.option, pair.prob, truth};
    if (pair.option == Option::A) {
      out.samples_a.push_back(sample);
      out.set_a.scores.push_back(pair.prob);
    } else {
      out.samples_b.push_back(sample);
      out.set_b.scores.push_back(pair.prob);
    }
    ++collected;
  }
  return out;
}

CpThresholds thresholds_at_quantiles(const CalibrationDraws& draws, double quantile_a,
                                     double quantile_b) {
  CpThresholds t;
  t.a = conformal_threshold(draws.set_a, 1.0 - quantile_a, CpDirection::PaperUpper);
  t.b = conformal_threshold(draws.set_b, 1.0 - quantile_b, CpDirection::PaperUpper);
  return t;
}

CalibrationArtifact make_artifact(const CalibrationDraws& draws, double epsilon1,
                                  CpDirection direction) {
  CalibrationArtifact art;
  art.set_a = draws.set_a;
  art.set_b = draws.set_b;
  art.epsilon1 = epsilon1;
  art.direction = direction;
  art.threshold_a = conformal_threshold(draws.set_a, epsilon1, direction);
  art.threshold_b = conformal_threshold(draws.set_b, epsilon1, direction);
  return art;
}

std::vector<EpisodeResult> SuiteResult::by_policy(Policy p) const {
  std::vector<EpisodeResult> out;
  for (std::size_t i = 0; i < metas.size(); ++i) {
    if (metas[i].policy == p) out.push_back(episodes[i]);
  }
  return out;
}

std::vector<EpisodeResult> SuiteResult::by_policy_rate(Policy p, double rate) const {
  std::vector<EpisodeResult> out;
  for (std::size_t i = 0; i < metas.size(); ++i) {
    if (metas[i].policy == p && metas[i].msg_rate == rate) out.push_back(episodes[i]);
  }
  return out;
}

std::vector<EpisodeResult> SuiteResult::by_policy_agents(Policy p, int agents) const {
  std::vector<EpisodeResult> out;
  for (std::size_t i = 0; i < metas.size(); ++i) {
    if (metas[i].policy == p && metas[i].n_agents == agents) out.push_back(episodes[i]);
  }
  return out;
}

namespace {

struct Job {
  const Scenario* scenario;
  SuiteEpisodeMeta meta;
  EpisodeConfig cfg;
};

CpThresholds suite_thresholds(const SuiteConfig& cfg) {
  std::vector<Scenario> calib;
  for (int i = 0; i < 6; ++i) {
    GenConfig g;
    g.seed = HashKey(cfg.master_seed).add("calib_scn").add(i).value();
    g.size_class = cfg.size_class;
    g.n_agents = 2;
    calib.push_back(generate_scenario(g));
  }
  OracleConfig oracle;
  oracle.sigma_noise = cfg.sigma_noise;
  oracle.seed = HashKey(cfg.master_seed).add("calib_oracle").value();
  CalibrationDraws draws = generate_calibration(calib, 600, oracle);
  return thresholds_at_quantiles(draws, cfg.quantile_a, cfg.quantile_b);
}

}  // namespace

SuiteResult run_suite(const SuiteConfig& cfg) {
  SuiteResult result;
  result.config = cfg;
  result.thresholds = suite_thresholds(cfg);

  std::vector<Policy> policies;
  std::vector<double> rates = {1.0};
  std::vector<int> agent_variants = {cfg.n_agents};
  std::vector<int> size_classes = {cfg.size_class};

  if (cfg.name == "comm") {
    policies = {Policy::CommCP, Policy::MMFBE, Policy::MMEuC, Policy::ComControl,
                Policy::NoAnswerSharing};
  } else if (cfg.name == "cp") {
    policies = {Policy::CommCP, Policy::NoCP};
  } else if (cfg.name == "latency") {
    policies = {Policy::CommCP};
    rates = {0.25, 0.5, 1.0, 2.0, 4.0};
  } else if (cfg.name == "size") {
    policies = {Policy::CommCP, Policy::MMFBE};
    size_classes = {1, 2, 3};
  } else if (cfg.name == "scale3") {
    policies = {Policy::CommCP, Policy::MMFBE};
    agent_variants = {2, 3};
  } else {
    throw ConfigError("unknown suite: " + cfg.name);
  }

  // scenarios: one batch per (size class, agent variant)
  std::map<std::pair<int, int>, std::vector<Scenario>> scenario_sets;
  for (int sc : size_classes) {
    for (int na : agent_variants) {
      std::vector<Scenario>& set = scenario_sets[{sc, na}];
      for (int i = 0; i < cfg.n_scenarios; ++i) {
        GenConfig g;
        g.seed = HashKey(cfg.master_seed).add("scn").add(sc).add(i).value();
        g.size_class = sc;
        g.n_agents = na;
        set.push_back(generate_scenario(g));
      }
    }
  }

  std::vector<Job> jobs;
  for (int sc : size_classes) {
    for (int na : agent_variants) {
      const auto& set = scenario_sets[{sc, na}];
      for (int i = 0; i < cfg.n_scenarios; ++i) {
        for (int s = 0; s < cfg.seeds_per_scenario; ++s) {
          std::uint64_t seed = HashKey(cfg.master_seed).add("ep").add(sc).add(i).add(s).value();
          for (Policy p : policies) {
            for (double rate : rates) {
              Job job;
              job.scenario = &set[static_cast<std::size_t>(i)];
              job.meta = {job.scenario->scene.name, p, seed, rate, na, sc};
              job.cfg.policy = p;
              job.cfg.seed = seed;
              job.cfg.sigma_noise = cfg.sigma_noise;
              job.cfg.thresholds = result.thresholds;
              job.cfg.epsilon2 = cfg.epsilon2;
              job.cfg.params = cfg.params;
              job.cfg.msg_rate = rate;
              jobs.push_back(std::move(job));
            }
          }
        }
      }
    }
  }

  result.metas.reserve(jobs.size());
  for (const Job& j : jobs) result.metas.push_back(j.meta);
  result.episodes.resize(jobs.size());

  int threads = std::max(1, cfg.threads);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    while (true) {
      std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) break;
      result.episodes[i] = run_episode(*jobs[i].scenario, jobs[i].cfg);
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return result;
}

std::string episodes_csv(const SuiteResult& result) {
  std::ostringstream out;
  out << "scenario,policy,seed,msg_rate,n_agents,size_class,sr,ntc,ntc_to_sr06,"
         "messages_sent,payloads_sent,answer_shares_sent,total_sim_time\n";
  out.precision(6);
  out << std::fixed;
  for (std::size_t i = 0; i < result.episodes.size(); ++i) {
    const auto& m = result.metas[i];
    const auto& e = result.episodes[i];
    out << m.scenario_id << ',' << policy_name(m.policy) << ',' << m.seed << ',' << m.msg_rate
        << ',' << m.n_agents << ',' << m.size_class << ',' << e.sr << ',' << e.ntc << ','
        << ntc_to_reach_sr(e, 0.6) << ',' << e.messages_sent << ',' << e.payloads_sent << ','
        << e.answer_shares_sent << ',' << e.total_sim_time << '\n';
  }
  return out.str();
}

void write_suite_outputs(const SuiteResult& result, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  fs::create_directories(out_dir + "/logs");

  std::ofstream(out_dir + "/episodes.csv") << episodes_csv(result);
  std::ofstream(out_dir + "/curves.csv") << curves_csv(compute_curves(result.episodes));

  if (result.config.name == "size") {
    std::ofstream(out_dir + "/advantage.csv") << advantage_csv(size_advantage(result.episodes));
  }

  for (std::size_t i = 0; i < result.episodes.size(); ++i) {
    const auto& m = result.metas[i];
    std::ostringstream name;
    name << out_dir << "/logs/" << m.scenario_id << '_' << policy_name(m.policy) << "_a"
         << m.n_agents << "_r" << m.msg_rate << "_s" << m.seed << ".jsonl";
    std::ofstream(name.str()) << result.episodes[i].log;
  }
}

}  // namespace commcp
