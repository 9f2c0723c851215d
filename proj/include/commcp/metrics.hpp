#pragma once

#include <string>
#include <vector>

#include "commcp/episode.hpp"

namespace commcp {

// Fixed NTC checkpoint grid {0.1, ..., 1.0}.
const std::vector<double>& ntc_checkpoints();

// Cumulative success rate from the episode's answer timestamps.
double sr_at_ntc(const EpisodeResult& result, double ntc);

// Normalized time at which the running SR first reaches `target`; 1.0 when
// the episode never gets there.
double ntc_to_reach_sr(const EpisodeResult& result, double target_sr);

struct CurvePoint {
  double ntc = 0.0;
  double sr_mean = 0.0;
  double sr_std = 0.0;
  int n = 0;
};

struct SrNtcCurve {
  std::string policy;
  std::vector<CurvePoint> points;
};

// One curve per policy present in the results, checkpoint grid as above.
std::vector<SrNtcCurve> compute_curves(const std::vector<EpisodeResult>& results);

// CSV columns: policy,ntc,sr_mean,sr_std,n
std::string curves_csv(const std::vector<SrNtcCurve>& curves);

// Scene area classes from Fig-style thresholds: 1 below 150 m2, 2 below
// 250 m2, 3 otherwise.
int size_class_of(double area_m2);

struct AdvantageRow {
  int size_class = 0;
  double mean = 0.0;  // mean over paired episodes of ntc_commcp - ntc_mmfbe
  double stddev = 0.0;
  int n = 0;
};

// Pairs commcp and mmfbe episodes by (scenario, seed). Throws
// InsufficientDataError when fewer than two size classes are represented.
std::vector<AdvantageRow> size_advantage(const std::vector<EpisodeResult>& results);

std::string advantage_csv(const std::vector<AdvantageRow>& rows);

// One-sided Wilcoxon signed-rank p-value for H1: median(x - y) < 0, normal
// approximation with midranks and tie correction, zero differences dropped.
double wilcoxon_less_p(const std::vector<double>& x, const std::vector<double>& y);

double mean_of(const std::vector<double>& xs);
double stddev_of(const std::vector<double>& xs);  // sample std, 0 for n < 2

}  // namespace commcp
