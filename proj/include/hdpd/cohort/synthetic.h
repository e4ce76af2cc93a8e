#ifndef HDPD_COHORT_SYNTHETIC_H_
#define HDPD_COHORT_SYNTHETIC_H_

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hdpd/cohort/cohort.h"
#include "hdpd/cohort/disease_rules.h"
#include "json.hpp"

namespace hdpd::cohort {

// Generative description of one biomarker. Each participant carries a slow
// shared health factor g_t, a fast shared factor z_t and a per-feature
// component u_t, all AR(1); the standardised true value is
//   s = loading * g + fast_loading * z + sqrt(1 - loading^2 - fast_loading^2) * u
//       + drift * t,
// and the observation is
//   mean + sd * (s + nonlinearity * tanh(s) + noise_sd * eps).
// Binary features threshold s at the (1 - mean) normal quantile; categorical
// features cut s into equiprobable bins.
struct SyntheticFeature {
  std::string name;
  FeatureKind kind = FeatureKind::kContinuous;
  std::vector<std::string> levels;
  std::string unit;
  std::optional<RiskDirection> risk_direction;
  double mean = 0.0;
  double sd = 1.0;
  double loading = 0.0;
  double fast_loading = 0.0;
  double persistence = 0.8;
  double noise_sd = 0.3;
  double nonlinearity = 0.0;
  double drift_per_year = 0.0;
  double missing_rate = 0.0;
  int decimals = 2;
};

// Absorbing onset with yearly hazard logistic(intercept + sum_j c_j * s_j)
// over designated features. After onset the marker feature is placed on the
// positive side of `marker` (a threshold clause of the disease rule); before
// onset it is clamped to the negative side, so rule-based labels follow the
// planted onset.
struct PlantedDisease {
  std::string disease;
  ThresholdClause marker;
  // Label with the longitudinal decline rule on the marker feature instead of
  // the single-visit threshold (marker.op must then be kLess).
  bool longitudinal = false;
  double onset_shift_sd = 1.0;
  double intercept = -4.0;
  std::map<std::string, double> coefficients;
};

// A random subset of participants whose designated features are pulled toward
// the healthy side (opposite the sign of their onset coefficient) by
// `strength` sd, ramping in over `ramp_years` from `start_year_index` on.
struct InterventionSpec {
  double fraction = 0.3;
  int start_year_index = 2;
  double strength = 1.0;
  double ramp_years = 2.0;
};

struct SyntheticConfig {
  int n_participants = 2000;
  int n_years = 6;
  int start_year = 2005;
  std::uint64_t seed = 1;
  double attendance = 0.9;
  double latent_persistence = 0.95;
  double fast_persistence = 0.5;
  std::vector<SyntheticFeature> features;
  std::vector<PlantedDisease> diseases;
  InterventionSpec intervention;

  void Validate() const;
};

struct SyntheticCohort {
  Cohort cohort;
  std::set<std::string> intervened;
  // Planted onset state per record (aligned with cohort.records()), per disease.
  std::map<std::string, std::vector<int>> planted_onset;
  // Disease rules matching the planted markers.
  std::vector<DiseaseRule> rules;
};

// Biomarker panel with planted diabetes (marker HbA1c) and CKD (marker eGFR).
SyntheticConfig DefaultSyntheticConfig();

SyntheticCohort GenerateSynthetic(const SyntheticConfig& config);

nlohmann::json SyntheticConfigToJson(const SyntheticConfig& config);
SyntheticConfig SyntheticConfigFromJson(const nlohmann::json& j);

}  // namespace hdpd::cohort

#endif  // HDPD_COHORT_SYNTHETIC_H_
