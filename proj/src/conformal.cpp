#include "commcp/conformal.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace commcp {

const char* direction_name(CpDirection d) {
  return d == CpDirection::PaperUpper ? "PaperUpper" : "StandardLower";
}

std::optional<CpDirection> direction_from_name(const std::string& s) {
  if (s == "PaperUpper") return CpDirection::PaperUpper;
  if (s == "StandardLower") return CpDirection::StandardLower;
  return std::nullopt;
}

double conformal_threshold(const CalibrationSet& cal, double epsilon1, CpDirection direction) {
  if (cal.scores.empty()) throw EmptyCalibrationError("calibration set is empty");
  std::vector<double> sorted = cal.scores;
  std::sort(sorted.begin(), sorted.end());
  std::size_t n = sorted.size();
  double q = direction == CpDirection::PaperUpper ? 1.0 - epsilon1 : epsilon1;
  auto rank = static_cast<long long>(std::ceil(static_cast<double>(n + 1) * q));
  rank = std::clamp(rank, 1LL, static_cast<long long>(n));
  return sorted[static_cast<std::size_t>(rank - 1)];
}

FilterResult filter_pairs(const std::vector<OptionProbPair>& pairs, double thres_a,
                          double thres_b) {
  FilterResult out;
  for (const auto& p : pairs) {
    if (p.option == Option::A && p.prob >= thres_a) out.targets.push_back(p.object_id);
    if (p.option == Option::B && p.prob >= thres_b) out.relevants.push_back(p.object_id);
  }
  return out;
}

double empirical_coverage(const std::vector<CalibrationSample>& test_samples,
                          const CpThresholds& thresholds, CpDirection direction) {
  (void)direction;  // inclusion is score >= threshold either way
  if (test_samples.empty()) throw EmptyCalibrationError("no test samples for coverage");
  std::size_t covered = 0;
  for (const auto& s : test_samples) {
    if (s.option == s.true_option && s.prob >= thresholds.for_option(s.option)) ++covered;
  }
  return static_cast<double>(covered) / static_cast<double>(test_samples.size());
}

namespace {

nlohmann::ordered_json set_to_json(const CalibrationSet& set, double epsilon1,
                                   CpDirection direction, double threshold) {
  return {{"option_class", std::string(1, option_letter(set.option_class))},
          {"epsilon1", epsilon1},
          {"direction", direction_name(direction)},
          {"scores", set.scores},
          {"threshold", threshold},
          {"provenance", set.provenance}};
}

CalibrationSet set_from_json(const nlohmann::ordered_json& j, double* threshold) {
  CalibrationSet set;
  std::string cls = j.at("option_class").get<std::string>();
  set.option_class = option_from_letter(cls.at(0));
  set.scores = j.at("scores").get<std::vector<double>>();
  if (j.contains("provenance")) set.provenance = j.at("provenance").get<std::vector<std::string>>();
  *threshold = j.at("threshold").get<double>();
  return set;
}

}  // namespace

std::string artifact_to_json(const CalibrationArtifact& art) {
  nlohmann::ordered_json doc;
  doc["version"] = 1;
  doc["sets"] = {set_to_json(art.set_a, art.epsilon1, art.direction, art.threshold_a),
                 set_to_json(art.set_b, art.epsilon1, art.direction, art.threshold_b)};
  return doc.dump(2) + "\n";
}

CalibrationArtifact artifact_from_json(const std::string& text) {
  CalibrationArtifact art;
  try {
    auto doc = nlohmann::ordered_json::parse(text);
    bool have_a = false, have_b = false;
    for (const auto& sj : doc.at("sets")) {
      double threshold = 0.0;
      CalibrationSet set = set_from_json(sj, &threshold);
      art.epsilon1 = sj.at("epsilon1").get<double>();
      auto dir = direction_from_name(sj.at("direction").get<std::string>());
      if (!dir) throw ParseError("unknown direction in calibration artifact");
      art.direction = *dir;
      if (set.option_class == Option::A) {
        art.set_a = std::move(set);
        art.threshold_a = threshold;
        have_a = true;
      } else {
        art.set_b = std::move(set);
        art.threshold_b = threshold;
        have_b = true;
      }
    }
    if (!have_a || !have_b) throw ParseError("calibration artifact needs both A and B sets");
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad calibration artifact: ") + e.what());
  }
  return art;
}

void write_artifact(const CalibrationArtifact& art, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write calibration artifact: " + path);
  out << artifact_to_json(art);
}

CalibrationArtifact read_artifact(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read calibration artifact: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return artifact_from_json(ss.str());
}

}  // namespace commcp
