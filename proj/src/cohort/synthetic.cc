#include "hdpd/cohort/synthetic.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include <boost/math/distributions/normal.hpp>

#include "hdpd/common/error.h"

namespace hdpd::cohort {
namespace {

double NormalQuantile(double p) {
  return boost::math::quantile(boost::math::normal(), p);
}

double RoundTo(double v, int decimals) {
  const double scale = std::pow(10.0, decimals);
  return std::round(v * scale) / scale;
}

double Logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

SyntheticFeature Continuous(std::string name, std::string unit, double mean, double sd,
                            double loading, double fast_loading,
                            std::optional<RiskDirection> risk, int decimals = 1) {
  SyntheticFeature f;
  f.name = std::move(name);
  f.unit = std::move(unit);
  f.mean = mean;
  f.sd = sd;
  f.loading = loading;
  f.fast_loading = fast_loading;
  f.risk_direction = risk;
  f.decimals = decimals;
  f.missing_rate = 0.02;
  f.noise_sd = 0.1;
  f.persistence = 0.4;
  return f;
}

}  // namespace

void SyntheticConfig::Validate() const {
  if (n_participants < 1 || n_years < 1) {
    throw InvalidArgument("synthetic cohort needs >= 1 participant and year");
  }
  for (const double rho : {latent_persistence, fast_persistence}) {
    if (!(rho >= 0.0 && rho < 1.0)) throw InvalidArgument("latent persistence must lie in [0, 1)");
  }
  if (!(attendance > 0.0 && attendance <= 1.0)) {
    throw InvalidArgument("attendance must lie in (0, 1]");
  }
  if (!(intervention.fraction >= 0.0 && intervention.fraction <= 1.0)) {
    throw InvalidArgument("intervention fraction must lie in [0, 1]");
  }
  auto find = [&](const std::string& name) -> const SyntheticFeature* {
    for (const auto& f : features) {
      if (f.name == name) return &f;
    }
    return nullptr;
  };
  for (const auto& f : features) {
    if (f.loading * f.loading + f.fast_loading * f.fast_loading > 1.0) {
      throw InvalidArgument("squared loadings of '" + f.name + "' exceed 1");
    }
    if (f.kind == FeatureKind::kCategorical && f.levels.empty()) {
      throw InvalidArgument("categorical feature '" + f.name + "' has no levels");
    }
    if (f.kind == FeatureKind::kBinary && !(f.mean > 0.0 && f.mean < 1.0)) {
      throw InvalidArgument("binary feature '" + f.name +
                            "' needs a prevalence (mean) in (0, 1)");
    }
  }
  for (const auto& d : diseases) {
    const auto* marker = find(d.marker.feature);
    if (!marker || marker->kind != FeatureKind::kContinuous) {
      throw InvalidArgument("disease '" + d.disease +
                            "' needs a continuous marker feature");
    }
    if (d.longitudinal && d.marker.op != Comparator::kLess) {
      throw InvalidArgument("longitudinal marker of '" + d.disease +
                            "' must use the < comparator");
    }
    if (d.coefficients.empty() || d.coefficients.size() > 4) {
      throw InvalidArgument("disease '" + d.disease +
                            "' needs 1 to 4 designated features");
    }
    for (const auto& [name, _] : d.coefficients) {
      const auto* f = find(name);
      if (!f || f->kind != FeatureKind::kContinuous) {
        throw InvalidArgument("designated feature '" + name +
                              "' missing or not continuous");
      }
    }
  }
}

SyntheticConfig DefaultSyntheticConfig() {
  using enum RiskDirection;
  SyntheticConfig c;
  // The slow factor carries long-term risk; the fast factor makes related
  // biomarkers move together from one visit to the next.
  c.features = {
      Continuous("eGFR", "mL/min/1.73m2", 78.0, 12.0, -0.55, -0.5, kLowIsRisk),
      Continuous("glucose", "mg/dL", 95.0, 10.0, 0.6, 0.55, kHighIsRisk),
      Continuous("BMI", "kg/m2", 23.0, 3.5, 0.6, 0.5, kHighIsRisk),
      Continuous("SBP", "mmHg", 125.0, 15.0, 0.55, 0.55, kHighIsRisk, 0),
      Continuous("TG", "mg/dL", 110.0, 45.0, 0.55, 0.55, kHighIsRisk, 0),
      Continuous("HDL", "mg/dL", 60.0, 14.0, -0.5, -0.55, kLowIsRisk, 0),
      Continuous("uric_acid", "mg/dL", 5.2, 1.3, 0.5, 0.5, kHighIsRisk),
      Continuous("ALT", "U/L", 22.0, 10.0, 0.45, 0.5, kHighIsRisk, 0),
      Continuous("hemoglobin", "g/dL", 14.0, 1.4, 0.0, 0.3, std::nullopt),
      Continuous("HbA1c", "%", 5.5, 0.3, 0.6, 0.55, kHighIsRisk),
  };
  c.features[4].nonlinearity = 0.3;
  c.features[7].missing_rate = 0.30;

  SyntheticFeature smoking;
  smoking.name = "smoking";
  smoking.kind = FeatureKind::kBinary;
  smoking.mean = 0.25;
  smoking.loading = 0.2;
  smoking.persistence = 0.95;
  smoking.missing_rate = 0.02;
  c.features.push_back(smoking);

  SyntheticFeature exercise;
  exercise.name = "exercise";
  exercise.kind = FeatureKind::kCategorical;
  exercise.levels = {"low", "mid", "high"};
  exercise.loading = -0.3;
  exercise.persistence = 0.9;
  exercise.missing_rate = 0.02;
  c.features.push_back(exercise);

  PlantedDisease diabetes;
  diabetes.disease = "diabetes";
  diabetes.marker = {"HbA1c", Comparator::kGreaterEqual, 6.5};
  diabetes.onset_shift_sd = 1.0;
  diabetes.intercept = -4.2;
  diabetes.coefficients = {{"glucose", 1.7}, {"BMI", 1.2}, {"TG", 0.9}};

  PlantedDisease ckd;
  ckd.disease = "ckd";
  ckd.marker = {"eGFR", Comparator::kLess, 60.0};
  ckd.longitudinal = true;
  ckd.onset_shift_sd = 0.5;
  ckd.intercept = -4.5;
  ckd.coefficients = {{"eGFR", -1.6}, {"uric_acid", 0.9}, {"SBP", 0.8}};

  c.diseases = {diabetes, ckd};
  return c;
}

SyntheticCohort GenerateSynthetic(const SyntheticConfig& config) {
  config.Validate();
  const auto& fspec = config.features;
  const std::size_t nf = fspec.size();

  Schema schema;
  for (const auto& f : fspec) {
    schema.features.push_back({f.name, f.kind, f.levels, f.unit, f.risk_direction});
  }
  SyntheticCohort out{Cohort(schema), {}, {}, {}};

  // Resolve disease wiring to feature indices.
  struct Wired {
    std::size_t marker;
    std::vector<std::pair<std::size_t, double>> coefficients;
  };
  std::vector<Wired> wired;
  // Per feature: direction toward health under intervention (sum of -sign(c)).
  std::vector<double> healthy_push(nf, 0.0);
  for (const auto& d : config.diseases) {
    Wired w{*schema.IndexOf(d.marker.feature), {}};
    for (const auto& [name, coef] : d.coefficients) {
      const std::size_t idx = *schema.IndexOf(name);
      w.coefficients.emplace_back(idx, coef);
      healthy_push[idx] = coef > 0 ? -1.0 : 1.0;
    }
    wired.push_back(std::move(w));
    out.planted_onset[d.disease] = {};
    if (d.longitudinal) {
      out.rules.push_back({d.disease, {},
                           LongitudinalRule{d.marker.feature, d.marker.cutoff, 2, true, 3}});
    } else {
      out.rules.push_back({d.disease, {d.marker}, std::nullopt});
    }
  }

  // Cut points for discrete features.
  std::vector<std::vector<double>> cuts(nf);
  for (std::size_t j = 0; j < nf; ++j) {
    if (fspec[j].kind == FeatureKind::kBinary) {
      cuts[j] = {NormalQuantile(1.0 - fspec[j].mean)};
    } else if (fspec[j].kind == FeatureKind::kCategorical) {
      const auto levels = fspec[j].levels.size();
      for (std::size_t l = 1; l < levels; ++l) {
        cuts[j].push_back(NormalQuantile(static_cast<double>(l) / levels));
      }
    }
  }

  const int width = std::max(5, static_cast<int>(std::to_string(config.n_participants).size()));
  const double rho = config.latent_persistence;
  const double rho_fast = config.fast_persistence;
  for (int p = 0; p < config.n_participants; ++p) {
    // Independent stream per participant: output does not depend on the
    // order in which participants are generated.
    std::seed_seq seq{static_cast<std::uint32_t>(config.seed),
                      static_cast<std::uint32_t>(config.seed >> 32),
                      static_cast<std::uint32_t>(p)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);

    std::string digits = std::to_string(p + 1);
    const std::string participant =
        "P" + std::string(static_cast<std::size_t>(width) - std::min<std::size_t>(digits.size(), width), '0') + digits;
    const bool intervened = uniform(rng) < config.intervention.fraction;
    if (intervened) out.intervened.insert(participant);

    double g = normal(rng);
    double z = normal(rng);
    std::vector<double> u(nf);
    for (auto& v : u) v = normal(rng);
    std::vector<bool> diseased(config.diseases.size(), false);
    std::vector<double> s(nf);

    for (int t = 0; t < config.n_years; ++t) {
      if (t > 0) {
        g = rho * g + std::sqrt(1.0 - rho * rho) * normal(rng);
        z = rho_fast * z + std::sqrt(1.0 - rho_fast * rho_fast) * normal(rng);
        for (std::size_t j = 0; j < nf; ++j) {
          const double a = fspec[j].persistence;
          u[j] = a * u[j] + std::sqrt(1.0 - a * a) * normal(rng);
        }
      }
      double ramp = 0.0;
      if (intervened && t >= config.intervention.start_year_index) {
        ramp = std::min(1.0, (t - config.intervention.start_year_index + 1) /
                                 std::max(1.0, config.intervention.ramp_years));
      }
      for (std::size_t j = 0; j < nf; ++j) {
        const double a = fspec[j].loading;
        const double b = fspec[j].fast_loading;
        s[j] = a * g + b * z + std::sqrt(std::max(0.0, 1.0 - a * a - b * b)) * u[j] +
               fspec[j].drift_per_year * t +
               healthy_push[j] * config.intervention.strength * ramp;
      }
      for (std::size_t d = 0; d < wired.size(); ++d) {
        if (diseased[d]) continue;
        double eta = config.diseases[d].intercept;
        for (const auto& [idx, coef] : wired[d].coefficients) eta += coef * s[idx];
        diseased[d] = uniform(rng) < Logistic(eta);
      }

      // Draw every random number regardless of attendance so that the
      // attendance pattern does not shift later draws.
      const bool attended = t == 0 || uniform(rng) < config.attendance;
      Record record{participant, config.start_year + t, std::vector<std::optional<double>>(nf)};
      for (std::size_t j = 0; j < nf; ++j) {
        const auto& f = fspec[j];
        const double noise = normal(rng);
        const bool missing = uniform(rng) < f.missing_rate;
        double value = 0.0;
        switch (f.kind) {
          case FeatureKind::kContinuous:
            value = RoundTo(f.mean + f.sd * (s[j] + f.nonlinearity * std::tanh(s[j]) +
                                             f.noise_sd * noise),
                            f.decimals);
            break;
          case FeatureKind::kBinary:
            value = s[j] > cuts[j][0] ? 1.0 : 0.0;
            break;
          case FeatureKind::kCategorical:
            value = static_cast<double>(
                std::upper_bound(cuts[j].begin(), cuts[j].end(), s[j]) - cuts[j].begin());
            break;
        }
        if (!missing) record.values[j] = value;
      }
      for (std::size_t d = 0; d < wired.size(); ++d) {
        const auto& marker = config.diseases[d].marker;
        const auto& mf = fspec[wired[d].marker];
        const double step = std::pow(10.0, -mf.decimals);
        const double excess = std::abs(normal(rng)) * mf.sd * config.diseases[d].onset_shift_sd;
        auto& cell = record.values[wired[d].marker];
        const bool high_side = marker.op == Comparator::kGreaterEqual ||
                               marker.op == Comparator::kGreater;
        if (diseased[d]) {
          // Onset always leaves an observed marker.
          const double v = high_side ? marker.cutoff + step + excess
                                     : marker.cutoff - step - excess;
          cell = RoundTo(v, mf.decimals);
        } else if (cell) {
          cell = high_side ? std::min(*cell, marker.cutoff - step)
                           : std::max(*cell, marker.cutoff);
          cell = RoundTo(*cell, mf.decimals);
        }
      }
      if (!attended) continue;
      for (std::size_t d = 0; d < wired.size(); ++d) {
        out.planted_onset[config.diseases[d].disease].push_back(diseased[d] ? 1 : 0);
      }
      out.cohort.AddRecord(std::move(record));
    }
  }
  return out;
}

nlohmann::json SyntheticConfigToJson(const SyntheticConfig& c) {
  nlohmann::json features = nlohmann::json::array();
  for (const auto& f : c.features) {
    nlohmann::json j = {{"name", f.name},
                        {"kind", ToString(f.kind)},
                        {"mean", f.mean},
                        {"sd", f.sd},
                        {"loading", f.loading},
                        {"fast_loading", f.fast_loading},
                        {"persistence", f.persistence},
                        {"noise_sd", f.noise_sd},
                        {"nonlinearity", f.nonlinearity},
                        {"drift_per_year", f.drift_per_year},
                        {"missing_rate", f.missing_rate},
                        {"decimals", f.decimals}};
    if (!f.levels.empty()) j["levels"] = f.levels;
    if (!f.unit.empty()) j["unit"] = f.unit;
    if (f.risk_direction) j["risk_direction"] = ToString(*f.risk_direction);
    features.push_back(std::move(j));
  }
  nlohmann::json diseases = nlohmann::json::array();
  for (const auto& d : c.diseases) {
    diseases.push_back({{"disease", d.disease},
                        {"marker",
                         {{"feature", d.marker.feature},
                          {"op", ToString(d.marker.op)},
                          {"cutoff", d.marker.cutoff}}},
                        {"longitudinal", d.longitudinal},
                        {"onset_shift_sd", d.onset_shift_sd},
                        {"intercept", d.intercept},
                        {"coefficients", d.coefficients}});
  }
  return {{"n_participants", c.n_participants},
          {"n_years", c.n_years},
          {"start_year", c.start_year},
          {"seed", c.seed},
          {"attendance", c.attendance},
          {"latent_persistence", c.latent_persistence},
          {"fast_persistence", c.fast_persistence},
          {"features", features},
          {"diseases", diseases},
          {"intervention",
           {{"fraction", c.intervention.fraction},
            {"start_year_index", c.intervention.start_year_index},
            {"strength", c.intervention.strength},
            {"ramp_years", c.intervention.ramp_years}}}};
}

SyntheticConfig SyntheticConfigFromJson(const nlohmann::json& j) {
  SyntheticConfig c = DefaultSyntheticConfig();
  try {
    c.n_participants = j.value("n_participants", c.n_participants);
    c.n_years = j.value("n_years", c.n_years);
    c.start_year = j.value("start_year", c.start_year);
    c.seed = j.value("seed", c.seed);
    c.attendance = j.value("attendance", c.attendance);
    c.latent_persistence = j.value("latent_persistence", c.latent_persistence);
    c.fast_persistence = j.value("fast_persistence", c.fast_persistence);
    if (j.contains("features")) {
      c.features.clear();
      for (const auto& f : j.at("features")) {
        SyntheticFeature sf;
        sf.name = f.at("name").get<std::string>();
        sf.kind = ParseFeatureKind(f.value("kind", "continuous"));
        sf.levels = f.value("levels", std::vector<std::string>{});
        sf.unit = f.value("unit", "");
        if (f.contains("risk_direction")) {
          sf.risk_direction = ParseRiskDirection(f.at("risk_direction").get<std::string>());
        }
        sf.mean = f.value("mean", 0.0);
        sf.sd = f.value("sd", 1.0);
        sf.loading = f.value("loading", 0.0);
        sf.fast_loading = f.value("fast_loading", 0.0);
        sf.persistence = f.value("persistence", 0.8);
        sf.noise_sd = f.value("noise_sd", 0.3);
        sf.nonlinearity = f.value("nonlinearity", 0.0);
        sf.drift_per_year = f.value("drift_per_year", 0.0);
        sf.missing_rate = f.value("missing_rate", 0.0);
        sf.decimals = f.value("decimals", 2);
        c.features.push_back(std::move(sf));
      }
    }
    if (j.contains("diseases")) {
      c.diseases.clear();
      for (const auto& d : j.at("diseases")) {
        PlantedDisease pd;
        pd.disease = d.at("disease").get<std::string>();
        const auto& m = d.at("marker");
        pd.marker = {m.at("feature").get<std::string>(),
                     ParseComparator(m.at("op").get<std::string>()),
                     m.at("cutoff").get<double>()};
        pd.longitudinal = d.value("longitudinal", false);
        pd.onset_shift_sd = d.value("onset_shift_sd", 1.0);
        pd.intercept = d.value("intercept", -4.0);
        pd.coefficients = d.at("coefficients").get<std::map<std::string, double>>();
        c.diseases.push_back(std::move(pd));
      }
    }
    if (j.contains("intervention")) {
      const auto& iv = j.at("intervention");
      c.intervention.fraction = iv.value("fraction", c.intervention.fraction);
      c.intervention.start_year_index =
          iv.value("start_year_index", c.intervention.start_year_index);
      c.intervention.strength = iv.value("strength", c.intervention.strength);
      c.intervention.ramp_years = iv.value("ramp_years", c.intervention.ramp_years);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("synthetic config: ") + e.what());
  }
  c.Validate();
  return c;
}

}  // namespace hdpd::cohort
