#pragma once

// Whole-period, per-skill inputs the simulator needs beyond one day's
// scenario: the yearly handling-time sample and the patience estimates.

#include <optional>
#include <string>
#include <vector>

#include "ccsim/estimators/kaplan_meier.hpp"
#include "ccsim/scenario.hpp"

namespace ccsim::sim {

struct SkillParameters {
  std::string skill;
  std::vector<double> ht_samples_year;
  double ht_mean_year = 0.0;
  std::optional<estimators::SurvivalEstimate> patience_km;  // absent when no caller ever abandoned
  std::optional<double> patience_mean;                      // KM-derived mean for the Exp patience axis
  bool patience_mean_truncated = false;
};

struct ModelParameters {
  std::vector<SkillParameters> skills;
  double wrapup_mean = 0.0;

  const SkillParameters* find(const std::string& skill) const {
    for (const auto& s : skills) {
      if (s.skill == skill) return &s;
    }
    return nullptr;
  }
};

inline Json to_json(const ModelParameters& p) {
  Json j;
  j["wrapup_mean"] = p.wrapup_mean;
  Json skills = Json::array();
  for (const auto& s : p.skills) {
    Json sj;
    sj["skill"] = s.skill;
    sj["ht_mean_year"] = s.ht_mean_year;
    sj["ht_samples_year"] = s.ht_samples_year;
    sj["patience_km"] = s.patience_km ? estimators::to_json(*s.patience_km) : Json(nullptr);
    sj["patience_mean"] = s.patience_mean ? Json(*s.patience_mean) : Json(nullptr);
    sj["patience_mean_truncated"] = s.patience_mean_truncated;
    skills.push_back(std::move(sj));
  }
  j["skills"] = skills;
  return j;
}

inline ModelParameters parameters_from_json(const Json& j) {
  ModelParameters p;
  p.wrapup_mean = j.value("wrapup_mean", 0.0);
  if (!j.contains("skills")) throw DataError("parameters missing field 'skills'");
  for (const auto& sj : j.at("skills")) {
    SkillParameters s;
    s.skill = sj.at("skill").get<std::string>();
    s.ht_samples_year = sj.value("ht_samples_year", std::vector<double>{});
    s.ht_mean_year = sj.value("ht_mean_year", 0.0);
    if (sj.contains("patience_km") && !sj["patience_km"].is_null()) {
      s.patience_km = estimators::survival_from_json(sj["patience_km"]);
    }
    if (sj.contains("patience_mean") && !sj["patience_mean"].is_null()) s.patience_mean = sj["patience_mean"].get<double>();
    s.patience_mean_truncated = sj.value("patience_mean_truncated", false);
    p.skills.push_back(std::move(s));
  }
  return p;
}

}  // namespace ccsim::sim
