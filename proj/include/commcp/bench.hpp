#pragma once

#include <string>
#include <vector>

#include "commcp/conformal.hpp"
#include "commcp/episode.hpp"
#include "commcp/metrics.hpp"
#include "commcp/scenario_gen.hpp"

namespace commcp {

struct CalibrationDraws {
  std::vector<CalibrationSample> samples_a;
  std::vector<CalibrationSample> samples_b;
  CalibrationSet set_a;
  CalibrationSet set_b;
};

// Samples (observed object, question targets) pairs across the scenarios,
// runs the relevance oracle on each, and collects emitted A/B pairs tagged
// with their ground-truth option.
CalibrationDraws generate_calibration(const std::vector<Scenario>& scenarios, int pairs,
                                      const OracleConfig& oracle);

// Operating thresholds from fixed quantile levels over calibration scores
// (PaperUpper at 1 - quantile miscoverage).
CpThresholds thresholds_at_quantiles(const CalibrationDraws& draws, double quantile_a,
                                     double quantile_b);

CalibrationArtifact make_artifact(const CalibrationDraws& draws, double epsilon1,
                                  CpDirection direction);

// ---------------------------------------------------------------------------
// Experiment suites

struct SuiteConfig {
  std::string name = "comm";  // comm | cp | latency | size | scale3
  int n_scenarios = 30;
  int seeds_per_scenario = 1;
  double sigma_noise = 0.15;
  int size_class = 2;
  int n_agents = 2;
  std::uint64_t master_seed = 1;
  int threads = 1;
  double quantile_a = 0.6;
  double quantile_b = 0.82;
  double epsilon2 = 0.4;
  SimParams params;
};

struct SuiteEpisodeMeta {
  std::string scenario_id;
  Policy policy = Policy::CommCP;
  std::uint64_t seed = 0;
  double msg_rate = 1.0;
  int n_agents = 2;
  int size_class = 0;
};

struct SuiteResult {
  SuiteConfig config;
  std::vector<SuiteEpisodeMeta> metas;
  std::vector<EpisodeResult> episodes;  // parallel to metas
  CpThresholds thresholds;

  std::vector<EpisodeResult> by_policy(Policy p) const;
  std::vector<EpisodeResult> by_policy_rate(Policy p, double rate) const;
  std::vector<EpisodeResult> by_policy_agents(Policy p, int agents) const;
};

// Runs a named suite with freshly generated scenarios and a calibration pass
// at the suite's noise level. Episodes execute in `threads` workers; results
// are ordered by job index regardless of the thread count.
SuiteResult run_suite(const SuiteConfig& cfg);

// Writes curves.csv, episodes.csv, advantage.csv (when applicable) and
// per-episode logs under out_dir.
void write_suite_outputs(const SuiteResult& result, const std::string& out_dir);

std::string episodes_csv(const SuiteResult& result);

}  // namespace commcp
