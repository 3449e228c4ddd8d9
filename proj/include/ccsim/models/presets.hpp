#pragma once

// The nine model presets, in table order.

#include <array>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "ccsim/core/csv.hpp"
#include "ccsim/core/error.hpp"
#include "ccsim/sim/model_config.hpp"

namespace ccsim::models {

using sim::AhtPerDay;
using sim::ArrivalMode;
using sim::HandlingMode;
using sim::ModelConfig;
using sim::PatienceMode;

struct ModelPreset {
  std::string name;
  ModelConfig config;
};

inline const std::vector<ModelPreset>& all_presets() {
  constexpr auto I = ArrivalMode::kIdentical;
  constexpr auto P = ArrivalMode::kIpp;
  constexpr auto E = HandlingMode::kEmpirical;
  constexpr auto X = HandlingMode::kExponential;
  constexpr auto pe = PatienceMode::kEmpirical;
  constexpr auto px = PatienceMode::kExponential;
  static const std::vector<ModelPreset> presets = {
      {"Empirical Model", {I, E, AhtPerDay::kYes, true, pe, true}},
      {"Arrival Model", {P, E, AhtPerDay::kYes, true, pe, true}},
      {"Daily HT Model", {P, X, AhtPerDay::kYes, true, pe, true}},
      {"Fitted HT Model", {P, X, AhtPerDay::kFit, true, pe, true}},
      {"Yearly HT Model", {P, E, AhtPerDay::kNo, true, pe, true}},
      {"Patience Model", {P, E, AhtPerDay::kYes, true, px, true}},
      {"HT & Patience Model", {P, X, AhtPerDay::kYes, true, px, true}},
      {"Breaks Model", {P, E, AhtPerDay::kYes, true, pe, false}},
      {"Wrap-up Model", {P, E, AhtPerDay::kYes, false, pe, true}},
  };
  return presets;
}

inline std::string preset_names() {
  std::string out;
  for (const auto& p : all_presets()) {
    if (!out.empty()) out += ", ";
    out += "'" + p.name + "'";
  }
  return out;
}

// Matches ignoring case, spacing and punctuation, with or without the
// trailing "Model": "daily ht", "DailyHT", "HT&Patience" all resolve.
inline const ModelPreset* find_preset(std::string_view name) {
  auto key = [](std::string_view s) {
    std::string k = csv::normalize_key(s);
    if (k.size() > 5 && k.ends_with("model")) k.resize(k.size() - 5);
    return k;
  };
  const std::string wanted = key(name);
  for (const auto& p : all_presets()) {
    if (key(p.name) == wanted) return &p;
  }
  return nullptr;
}

inline ModelConfig preset(std::string_view name) {
  if (const auto* p = find_preset(name)) return p->config;
  throw ConfigError("unknown model '" + std::string(name) + "'; valid presets: " + preset_names());
}

// A preset name, or a path to a JSON file with one key per axis.
inline ModelPreset resolve_model(const std::string& name_or_path) {
  if (const auto* p = find_preset(name_or_path)) return *p;
  std::ifstream in(name_or_path);
  if (!in) throw ConfigError("unknown model '" + name_or_path + "' (not a preset and no such file); valid presets: " + preset_names());
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::exception& e) {
    throw ConfigError("model config " + name_or_path + ": " + e.what());
  }
  ModelPreset p;
  p.name = j.contains("name") ? j["name"].get<std::string>() : name_or_path;
  p.config = sim::model_config_from_json(j);
  return p;
}

// "all", or a comma-separated list of preset names / config paths.
inline std::vector<ModelPreset> resolve_models(const std::string& spec) {
  if (csv::normalize_key(spec) == "all") return all_presets();
  std::vector<ModelPreset> out;
  std::size_t start = 0;
  while (start <= spec.size()) {
    const auto comma = spec.find(',', start);
    const auto item = csv::trim(std::string_view(spec).substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    if (!item.empty()) out.push_back(resolve_model(std::string(item)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (out.empty()) throw ConfigError("no models selected");
  return out;
}

}  // namespace ccsim::models
