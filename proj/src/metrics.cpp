#include "commcp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace commcp {

const std::vector<double>& ntc_checkpoints() {
  static const std::vector<double> cps = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  return cps;
}

double sr_at_ntc(const EpisodeResult& result, double ntc) {
  double t = ntc * result.t_max;
  int correct = 0;
  for (const AnswerRecord& r : result.records) {
    if (r.sim_time <= t + 1e-12) {
      auto it = result.outcomes.find(r.question_id);
      if (it != result.outcomes.end() && it->second == Outcome::Correct) ++correct;
    }
  }
  return result.n_questions > 0 ? static_cast<double>(correct) / result.n_questions : 0.0;
}

double ntc_to_reach_sr(const EpisodeResult& result, double target_sr) {
  if (result.n_questions <= 0) return 1.0;
  int needed = static_cast<int>(std::ceil(target_sr * result.n_questions - 1e-9));
  int correct = 0;
  for (const AnswerRecord& r : result.records) {  // records sorted by time
    auto it = result.outcomes.find(r.question_id);
    if (it != result.outcomes.end() && it->second == Outcome::Correct) {
      ++correct;
      if (correct >= needed) return std::min(1.0, r.sim_time / result.t_max);
    }
  }
  return 1.0;
}

std::vector<SrNtcCurve> compute_curves(const std::vector<EpisodeResult>& results) {
  std::map<std::string, std::vector<const EpisodeResult*>> by_policy;
  for (const auto& r : results) by_policy[r.policy].push_back(&r);

  std::vector<SrNtcCurve> out;
  for (const auto& [policy, eps] : by_policy) {
    SrNtcCurve curve;
    curve.policy = policy;
    for (double cp : ntc_checkpoints()) {
      std::vector<double> srs;
      srs.reserve(eps.size());
      for (const EpisodeResult* r : eps) srs.push_back(sr_at_ntc(*r, cp));
      curve.points.push_back({cp, mean_of(srs), stddev_of(srs), static_cast<int>(srs.size())});
    }
    out.push_back(std::move(curve));
  }
  return out;
}

namespace {

std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(6);
  ss << std::fixed << v;
  return ss.str();
}

}  // namespace

std::string curves_csv(const std::vector<SrNtcCurve>& curves) {
  std::string out = "policy,ntc,sr_mean,sr_std,n\n";
  for (const auto& c : curves) {
    for (const auto& p : c.points) {
      out += c.policy + "," + fmt(p.ntc) + "," + fmt(p.sr_mean) + "," + fmt(p.sr_std) + "," +
             std::to_string(p.n) + "\n";
    }
  }
  return out;
}

int size_class_of(double area_m2) {
  if (area_m2 < 150.0) return 1;
  if (area_m2 < 250.0) return 2;
  return 3;
}

std::vector<AdvantageRow> size_advantage(const std::vector<EpisodeResult>& results) {
  std::map<std::pair<std::string, std::uint64_t>, std::pair<const EpisodeResult*, const EpisodeResult*>>
      paired;
  for (const auto& r : results) {
    auto key = std::make_pair(r.scenario_id, r.seed);
    if (r.policy == "commcp") paired[key].first = &r;
    if (r.policy == "mmfbe") paired[key].second = &r;
  }

  std::map<int, std::vector<double>> diffs;
  for (const auto& [key, pr] : paired) {
    if (pr.first == nullptr || pr.second == nullptr) continue;
    diffs[size_class_of(pr.first->scene_area_m2)].push_back(pr.first->ntc - pr.second->ntc);
  }
  if (diffs.size() < 2)
    throw InsufficientDataError("size advantage needs at least two size classes");

  std::vector<AdvantageRow> out;
  for (const auto& [cls, ds] : diffs)
    out.push_back({cls, mean_of(ds), stddev_of(ds), static_cast<int>(ds.size())});
  return out;
}

std::string advantage_csv(const std::vector<AdvantageRow>& rows) {
  std::string out = "size_class,advantage_mean,advantage_std,n\n";
  for (const auto& r : rows) {
    out += std::to_string(r.size_class) + "," + fmt(r.mean) + "," + fmt(r.stddev) + "," +
           std::to_string(r.n) + "\n";
  }
  return out;
}

double wilcoxon_less_p(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw ConfigError("wilcoxon needs paired samples");
  std::vector<double> d;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double v = x[i] - y[i];
    if (v != 0.0) d.push_back(v);
  }
  std::size_t n = d.size();
  if (n == 0) return 0.5;

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return std::abs(d[a]) < std::abs(d[b]); });

  std::vector<double> rank(n, 0.0);
  double tie_correction = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && std::abs(d[order[j + 1]]) == std::abs(d[order[i]])) ++j;
    double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    double t = static_cast<double>(j - i + 1);
    tie_correction += (t * t * t - t);
    for (std::size_t k = i; k <= j; ++k) rank[order[k]] = avg;
    i = j + 1;
  }

  double w_plus = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (d[k] > 0.0) w_plus += rank[k];
  }
  double dn = static_cast<double>(n);
  double mean = dn * (dn + 1.0) / 4.0;
  double var = dn * (dn + 1.0) * (2.0 * dn + 1.0) / 24.0 - tie_correction / 48.0;
  if (var <= 0.0) return w_plus < mean ? 0.0 : (w_plus > mean ? 1.0 : 0.5);
  double z = (w_plus - mean) / std::sqrt(var);
  return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

double mean_of(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  double s = 0.0;
  for (double v : xs) s += v;
  return s / static_cast<double>(xs.size());
}

double stddev_of(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  double m = mean_of(xs);
  double s = 0.0;
  for (double v : xs) s += (v - m) * (v - m);
  return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

}  // namespace commcp
