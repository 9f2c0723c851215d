#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "commcp/bench.hpp"

using namespace commcp;

namespace {

namespace fs = std::filesystem;

std::vector<Scenario> load_scenario_dir(const std::string& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<Scenario> out;
  for (const auto& f : files) out.push_back(load_scenario_file(f.string()));
  if (out.empty()) throw ScenarioError("no scenario files in " + dir);
  return out;
}

int cmd_run(const std::string& scenario_path, const std::string& policy_str, std::uint64_t seed,
            bool eps1_given, double eps1, double eps2, double tau1, double tau2, double msg_rate,
            double tmax, double fov, int range, double smooth_sigma, double noise,
            const std::string& calib_path, const std::string& out_dir, bool dump_sv) {
  Scenario scenario = load_scenario_file(scenario_path);
  auto policy = policy_from_name(policy_str);
  if (!policy) throw ConfigError("unknown policy: " + policy_str);

  EpisodeConfig cfg;
  cfg.policy = *policy;
  cfg.seed = seed;
  cfg.sigma_noise = noise;
  cfg.epsilon2 = eps2;
  cfg.params.tau1 = tau1;
  cfg.params.tau2 = tau2;
  cfg.params.fov_deg = fov;
  cfg.params.range = range;
  cfg.params.smooth_sigma = smooth_sigma;
  cfg.msg_rate = msg_rate;
  cfg.t_max = tmax;
  cfg.dump_sv = dump_sv;

  if (!calib_path.empty()) {
    CalibrationArtifact art = read_artifact(calib_path);
    cfg.thresholds = {art.threshold_a, art.threshold_b};
  } else {
    // self-calibrate on synthesized scenes with the episode's oracle noise
    std::vector<Scenario> calib;
    for (int i = 0; i < 4; ++i) {
      GenConfig g;
      g.seed = HashKey(seed).add("selfcal").add(i).value();
      g.size_class = 2;
      calib.push_back(generate_scenario(g));
    }
    OracleConfig oracle;
    oracle.sigma_noise = noise;
    oracle.seed = HashKey(seed).add("selfcal_oracle").value();
    CalibrationDraws draws = generate_calibration(calib, 400, oracle);
    // default operating points are the 0.6/0.82 quantiles; an explicit --eps1
    // applies a uniform 1-eps1 quantile to both classes instead
    cfg.thresholds = eps1_given ? thresholds_at_quantiles(draws, 1.0 - eps1, 1.0 - eps1)
                                : thresholds_at_quantiles(draws, 0.6, 0.82);
  }

  EpisodeResult result = run_episode(scenario, cfg);

  fs::create_directories(out_dir);
  std::ofstream(out_dir + "/episode.jsonl") << result.log;

  std::cout << "scenario " << result.scenario_id << " policy " << result.policy << " seed "
            << result.seed << "\n"
            << "sr " << result.sr << " ntc " << result.ntc << " total_sim_time "
            << result.total_sim_time << "s of " << result.t_max << "s\n"
            << "messages " << result.messages_sent << " payloads " << result.payloads_sent
            << "\nlog: " << out_dir << "/episode.jsonl\n";
  return 0;
}

int cmd_calibrate(const std::string& scenarios_dir, int pairs, double eps1,
                  const std::string& direction_str, double noise, std::uint64_t seed,
                  const std::string& out_file) {
  auto direction = direction_from_name(direction_str);
  if (!direction) throw ConfigError("unknown direction: " + direction_str);
  std::vector<Scenario> scenarios = load_scenario_dir(scenarios_dir);
  OracleConfig oracle;
  oracle.sigma_noise = noise;
  oracle.seed = seed;
  CalibrationDraws draws = generate_calibration(scenarios, pairs, oracle);
  CalibrationArtifact art = make_artifact(draws, eps1, *direction);
  write_artifact(art, out_file);
  std::cout << "calibration: |Z_A| = " << art.set_a.scores.size()
            << ", |Z_B| = " << art.set_b.scores.size() << ", thresholds A " << art.threshold_a
            << " B " << art.threshold_b << " -> " << out_file << "\n";
  return 0;
}

int cmd_bench(const std::string& suite, int scenarios, int seeds, double noise,
              std::uint64_t master_seed, int threads, const std::string& out_dir) {
  SuiteConfig cfg;
  cfg.name = suite;
  cfg.n_scenarios = scenarios;
  cfg.seeds_per_scenario = seeds;
  if (noise >= 0.0) cfg.sigma_noise = noise;
  if (suite == "cp") cfg.sigma_noise = noise >= 0.0 ? noise : 0.35;
  cfg.master_seed = master_seed;
  cfg.threads = threads;
  SuiteResult result = run_suite(cfg);
  write_suite_outputs(result, out_dir);
  std::cout << "suite " << suite << ": " << result.episodes.size() << " episodes -> " << out_dir
            << "\n";
  for (const auto& curve : compute_curves(result.episodes)) {
    std::cout << "  " << curve.policy << " final SR " << curve.points.back().sr_mean << "\n";
  }
  return 0;
}

int cmd_gen(std::uint64_t seed, int size_class, int agents, int questions,
            const std::string& out_file) {
  GenConfig cfg;
  cfg.seed = seed;
  cfg.size_class = size_class;
  cfg.n_agents = agents;
  cfg.n_questions = questions;
  Scenario scenario = generate_scenario(cfg);
  std::ofstream(out_file) << serialize_scenario(scenario);
  std::cout << "scenario " << scenario.scene.name << " (" << scenario.scene.width << "x"
            << scenario.scene.height << ", " << scenario.scene.rooms.size() << " rooms, "
            << scenario.scene.objects.size() << " objects) -> " << out_file << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multi-agent embodied question answering simulator"};
  app.require_subcommand(1);

  // run
  std::string scenario_path, policy = "commcp", calib_path, out_dir = "out";
  std::uint64_t seed = 0;
  double eps1 = 0.05, eps2 = 0.4, tau1 = 1.0, tau2 = 10.0, msg_rate = 1.0, tmax = 0.0;
  double fov = 90.0, smooth_sigma = 2.0, noise = 0.0;
  int range = 8;
  bool dump_sv = false;
  auto* run = app.add_subcommand("run", "run one episode");
  run->add_option("--scenario", scenario_path, "scenario file")->required();
  run->add_option("--policy", policy, "commcp|mmfbe|mmeuc|no_cp|com_control|no_answer_sharing");
  run->add_option("--seed", seed, "episode seed");
  run->add_option("--eps1", eps1, "miscoverage rate for self-calibration");
  run->add_option("--eps2", eps2, "confidence check threshold");
  run->add_option("--tau1", tau1, "relevant-object temperature");
  run->add_option("--tau2", tau2, "target-object temperature");
  run->add_option("--msg-rate", msg_rate, "payloads per second per sender");
  run->add_option("--tmax", tmax, "time horizon in seconds (0 = auto)");
  run->add_option("--sigma", smooth_sigma, "gaussian smoothing sigma in cells");
  run->add_option("--fov", fov, "field of view in degrees");
  run->add_option("--range", range, "sensor range in cells");
  run->add_option("--noise", noise, "oracle miscalibration sigma");
  run->add_option("--calib", calib_path, "calibration artifact file");
  run->add_option("--out", out_dir, "output directory");
  run->add_flag("--dump-sv", dump_sv, "dump fused SV maps per tick into the log");

  // calibrate
  std::string scenarios_dir, direction = "PaperUpper", calib_out = "calibration.json";
  int pairs = 400;
  auto* calibrate = app.add_subcommand("calibrate", "build calibration sets and thresholds");
  calibrate->add_option("--scenarios", scenarios_dir, "directory of scenario files")->required();
  calibrate->add_option("--pairs", pairs, "number of (observed, target) pairs");
  calibrate->add_option("--eps1", eps1, "miscoverage rate");
  calibrate->add_option("--direction", direction, "PaperUpper|StandardLower");
  calibrate->add_option("--noise", noise, "oracle miscalibration sigma");
  calibrate->add_option("--seed", seed, "sampling seed");
  calibrate->add_option("--out", calib_out, "artifact file")->required();

  // bench
  std::string suite = "comm", bench_out = "bench_out";
  int n_scenarios = 30, seeds = 1, threads = 1;
  double bench_noise = -1.0;
  std::uint64_t master_seed = 1;
  auto* bench = app.add_subcommand("bench", "run an experiment suite");
  bench->add_option("--suite", suite, "comm|cp|latency|size|scale3")->required();
  bench->add_option("--scenarios", n_scenarios, "scenarios per condition");
  bench->add_option("--seeds", seeds, "seeds per scenario");
  bench->add_option("--noise", bench_noise, "oracle sigma (default per suite)");
  bench->add_option("--master-seed", master_seed, "suite master seed");
  bench->add_option("--threads", threads, "parallel episode workers");
  bench->add_option("--out", bench_out, "output directory");

  // gen
  int size_class = 1, agents = 2, questions = 6;
  std::string gen_out = "scenario.json";
  auto* gen = app.add_subcommand("gen", "synthesize a scenario file");
  gen->add_option("--seed", seed, "generator seed");
  gen->add_option("--size-class", size_class, "1 | 2 | 3")->check(CLI::Range(1, 3));
  gen->add_option("--agents", agents, "number of agents");
  gen->add_option("--questions", questions, "number of questions");
  gen->add_option("--out", gen_out, "output file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed())
      return cmd_run(scenario_path, policy, seed, run->count("--eps1") > 0, eps1, eps2, tau1,
                     tau2, msg_rate, tmax, fov, range, smooth_sigma, noise, calib_path, out_dir,
                     dump_sv);
    if (calibrate->parsed())
      return cmd_calibrate(scenarios_dir, pairs, eps1, direction, noise, seed, calib_out);
    if (bench->parsed())
      return cmd_bench(suite, n_scenarios, seeds, bench_noise, master_seed, threads, bench_out);
    if (gen->parsed()) return cmd_gen(seed, size_class, agents, questions, gen_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
