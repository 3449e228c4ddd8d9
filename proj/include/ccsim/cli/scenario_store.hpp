#pragma once

// Scenario directories: one day-YYYY-MM-DD.json per day plus params.json.

#include <filesystem>
#include <string>
#include <vector>

#include "ccsim/cli/manifest.hpp"
#include "ccsim/scenario.hpp"
#include "ccsim/sim/parameters.hpp"

namespace ccsim::cli {

inline std::string day_file_name(const CivilDate& d) { return "day-" + d.iso() + ".json"; }

inline void write_scenario_dir(const std::filesystem::path& dir, const std::vector<DayScenario>& days,
                               const sim::ModelParameters& params) {
  std::filesystem::create_directories(dir);
  for (const auto& d : days) write_json(dir / day_file_name(d.date), to_json(d));
  write_json(dir / "params.json", sim::to_json(params));
}

inline Json load_json(const std::filesystem::path& p) {
  const auto text = read_file(p);
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    throw DataError(p.string() + ": " + e.what());
  }
}

inline DayScenario load_scenario(const std::filesystem::path& p) {
  try {
    return scenario_from_json(load_json(p));
  } catch (const Json::exception& e) {
    throw DataError(p.string() + ": " + e.what());
  }
}

inline sim::ModelParameters load_params(const std::filesystem::path& p) {
  try {
    return sim::parameters_from_json(load_json(p));
  } catch (const Json::exception& e) {
    throw DataError(p.string() + ": " + e.what());
  }
}

struct ScenarioSet {
  std::vector<DayScenario> days;  // date order
  sim::ModelParameters params;
};

inline ScenarioSet load_scenario_dir(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw DataError("scenario directory " + dir.string() + " does not exist");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    const auto name = e.path().filename().string();
    if (e.is_regular_file() && name.starts_with("day-") && name.ends_with(".json")) files.push_back(e.path());
  }
  if (files.empty()) throw DataError("no day-*.json files in " + dir.string());
  if (!fs::exists(dir / "params.json")) throw DataError("missing params.json in " + dir.string());
  std::sort(files.begin(), files.end());
  ScenarioSet out;
  for (const auto& f : files) out.days.push_back(load_scenario(f));
  out.params = load_params(dir / "params.json");
  return out;
}

}  // namespace ccsim::cli
