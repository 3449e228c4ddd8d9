#pragma once

// Per-skill duration samplers resolved from a ModelConfig, one day's scenario
// and the whole-period parameters.

#include <algorithm>
#include <string>
#include <vector>

#include "ccsim/core/rng.hpp"
#include "ccsim/estimators/kaplan_meier.hpp"
#include "ccsim/scenario.hpp"
#include "ccsim/sim/model_config.hpp"
#include "ccsim/sim/parameters.hpp"

namespace ccsim::sim {

inline constexpr std::size_t kMinDaySamples = 5;

struct HandlingSampler {
  enum class Kind : std::uint8_t { kEmpirical, kExponential, kConstant };
  Kind kind = Kind::kConstant;
  std::vector<double> samples;  // kEmpirical
  double mean = 0.0;            // kExponential mean, kConstant value
  double added = 0.0;           // wrap-up folded into every draw

  double draw(RandomStream& rng) const {
    switch (kind) {
      case Kind::kEmpirical: return samples[rng.index(samples.size())] + added;
      case Kind::kExponential: return rng.exponential(mean) + added;
      case Kind::kConstant: break;
    }
    return mean + added;
  }
};

struct PatienceSampler {
  enum class Kind : std::uint8_t { kEmpirical, kExponential, kInfinite };
  Kind kind = Kind::kInfinite;
  estimators::SurvivalEstimate km;  // kEmpirical
  double mean = 0.0;                // kExponential

  // Inverse-CDF draw from the KM step function; the tail mass left after the
  // last event time maps to a caller who never abandons.
  double draw(RandomStream& rng) const {
    switch (kind) {
      case Kind::kEmpirical: {
        const double u = rng.uniform();
        const double threshold = 1.0 - u;  // want first i with S_i < 1 - u
        const auto it = std::upper_bound(km.survival.begin(), km.survival.end(), threshold,
                                         [](double thr, double s) { return s < thr; });
        if (it == km.survival.end()) return kInfinity;
        return km.event_times[static_cast<std::size_t>(it - km.survival.begin())];
      }
      case Kind::kExponential: return rng.exponential(mean);
      case Kind::kInfinite: break;
    }
    return kInfinity;
  }
};

struct ResolvedSamplers {
  std::vector<HandlingSampler> handling;  // [skill]
  std::vector<PatienceSampler> patience;  // [skill]
  std::vector<std::string> warnings;
};

// Handling-time model of one skill for one day.
//   Empirical + AHT per day Yes: the day's sample (yearly one below kMinDaySamples)
//   Empirical + No:              the yearly sample
//   Exp + Yes / No / Fit:        exponential with the day mean / yearly mean / fitted daily AHT
// Wrap-up = Yes adds the scenario's mean wrap-up time to every draw. Skills
// without arrivals that day get a placeholder and are never sampled.
inline HandlingSampler resolve_handling(const ModelConfig& cfg, const DayScenario& day, std::size_t skill,
                                        const SkillParameters* params, std::vector<std::string>& warnings) {
  HandlingSampler h;
  h.added = cfg.wrapup ? day.wrapup_mean : 0.0;
  const std::string& name = day.skills[skill];
  auto yearly_samples = [&]() -> const std::vector<double>& {
    if (!params || params->ht_samples_year.empty()) {
      throw DataError("skill " + name + ": parameters lack field 'ht_samples_year'");
    }
    return params->ht_samples_year;
  };
  auto yearly_mean = [&] {
    if (!params || !(params->ht_mean_year > 0.0)) throw DataError("skill " + name + ": parameters lack field 'ht_mean_year'");
    return params->ht_mean_year;
  };
  const std::vector<double>* day_samples =
      skill < day.ht_samples_day.size() ? &day.ht_samples_day[skill] : nullptr;
  if (cfg.ht == HandlingMode::kEmpirical) {
    h.kind = HandlingSampler::Kind::kEmpirical;
    if (cfg.aht_per_day == AhtPerDay::kYes) {
      if (day_samples && day_samples->size() >= kMinDaySamples) {
        h.samples = *day_samples;
      } else {
        warnings.push_back("skill " + name + ": fewer than 5 handling times on " + day.date.iso() +
                           ", using the yearly sample");
        h.samples = yearly_samples();
      }
    } else {
      h.samples = yearly_samples();
    }
    return h;
  }
  h.kind = HandlingSampler::Kind::kExponential;
  switch (cfg.aht_per_day) {
    case AhtPerDay::kYes:
      if (skill < day.ht_mean_day.size() && day.ht_mean_day[skill] > 0.0) {
        h.mean = day.ht_mean_day[skill];
      } else {
        warnings.push_back("skill " + name + ": no day AHT on " + day.date.iso() + ", using the yearly mean");
        h.mean = yearly_mean();
      }
      break;
    case AhtPerDay::kNo: h.mean = yearly_mean(); break;
    case AhtPerDay::kFit:
      if (skill >= day.ht_fitted_day.size() || !day.ht_fitted_day[skill]) {
        throw DataError("scenario " + day.date.iso() + ": skill " + name + " lacks field 'ht_fitted_day'");
      }
      h.mean = *day.ht_fitted_day[skill];
      break;
  }
  return h;
}

inline PatienceSampler resolve_patience(const ModelConfig& cfg, const std::string& skill, const SkillParameters* params,
                                        std::vector<std::string>& warnings) {
  PatienceSampler p;
  if (cfg.patience == PatienceMode::kExponential && params && params->patience_mean) {
    p.kind = PatienceSampler::Kind::kExponential;
    p.mean = *params->patience_mean;
    return p;
  }
  if (!params || !params->patience_km) {
    warnings.push_back("skill " + skill + ": no abandonments observed, patience taken as infinite");
    return p;
  }
  if (cfg.patience == PatienceMode::kExponential) {
    throw DataError("skill " + skill + ": parameters lack field 'patience_mean'");
  }
  p.kind = PatienceSampler::Kind::kEmpirical;
  p.km = *params->patience_km;
  return p;
}

inline ResolvedSamplers resolve_samplers(const ModelConfig& cfg, const DayScenario& day, const ModelParameters& params) {
  ResolvedSamplers out;
  for (std::size_t k = 0; k < day.skills.size(); ++k) {
    const SkillParameters* sp = params.find(day.skills[k]);
    std::int64_t arrivals = 0;
    for (int c : day.arrival_counts[k]) arrivals += c;
    if (arrivals == 0) {
      out.handling.emplace_back();
      out.patience.emplace_back();
      continue;
    }
    out.handling.push_back(resolve_handling(cfg, day, k, sp, out.warnings));
    out.patience.push_back(resolve_patience(cfg, day.skills[k], sp, out.warnings));
  }
  return out;
}

// One handling-time draw (seconds, wrap-up included when configured).
inline double sample_handling_time(const ModelConfig& cfg, const DayScenario& day, std::size_t skill,
                                   const ModelParameters& params, RandomStream& rng) {
  std::vector<std::string> warnings;
  return resolve_handling(cfg, day, skill, params.find(day.skills[skill]), warnings).draw(rng);
}

inline double sample_patience(const ModelConfig& cfg, const std::string& skill, const ModelParameters& params,
                              RandomStream& rng) {
  std::vector<std::string> warnings;
  return resolve_patience(cfg, skill, params.find(skill), warnings).draw(rng);
}

}  // namespace ccsim::sim
