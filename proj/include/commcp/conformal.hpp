#pragma once

#include <optional>
#include <string>
#include <vector>

#include "commcp/oracle.hpp"

namespace commcp {

// One labeled draw from the reasoning backend: the emitted option (only A/B
// pairs are collected), its confidence, and the ground-truth option.
struct CalibrationSample {
  Option option = Option::A;
  double prob = 0.0;
  Option true_option = Option::A;
};

struct CalibrationSet {
  Option option_class = Option::A;
  std::vector<double> scores;
  std::vector<std::string> provenance;  // scenario names the scores came from
};

enum class CpDirection { PaperUpper, StandardLower };

const char* direction_name(CpDirection d);
std::optional<CpDirection> direction_from_name(const std::string& s);

struct CpThresholds {
  double a = 0.0;
  double b = 0.0;
  double for_option(Option o) const { return o == Option::A ? a : b; }
};

struct CpConfig {
  double epsilon1 = 0.05;
  CpDirection direction = CpDirection::PaperUpper;
  std::optional<CpThresholds> overrides;  // fixed operating points, skip calibration
};

// Order statistic at the conformal rank ceil((n+1)q) clamped to [1, n] over
// ascending scores, with q = 1-eps1 for PaperUpper and q = eps1 for
// StandardLower. Throws EmptyCalibrationError on an empty set.
double conformal_threshold(const CalibrationSet& cal, double epsilon1, CpDirection direction);

struct FilterResult {
  std::vector<std::string> targets;    // option A survivors, input order
  std::vector<std::string> relevants;  // option B survivors, input order
};

// Keeps A pairs with prob >= thres_a and B pairs with prob >= thres_b;
// C and D pairs are always dropped.
FilterResult filter_pairs(const std::vector<OptionProbPair>& pairs, double thres_a,
                          double thres_b);

// Fraction of samples whose true option's pair survives filtering, i.e. the
// emitted option equals the ground truth and its score clears the threshold.
double empirical_coverage(const std::vector<CalibrationSample>& test_samples,
                          const CpThresholds& thresholds, CpDirection direction);

// Calibration artifact file: both per-class blocks in one JSON document.
struct CalibrationArtifact {
  CalibrationSet set_a;
  CalibrationSet set_b;
  double epsilon1 = 0.05;
  CpDirection direction = CpDirection::PaperUpper;
  double threshold_a = 0.0;
  double threshold_b = 0.0;
};

std::string artifact_to_json(const CalibrationArtifact& art);
CalibrationArtifact artifact_from_json(const std::string& text);
void write_artifact(const CalibrationArtifact& art, const std::string& path);
CalibrationArtifact read_artifact(const std::string& path);

}  // namespace commcp
