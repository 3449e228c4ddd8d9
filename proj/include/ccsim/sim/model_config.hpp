#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

#include "ccsim/core/csv.hpp"
#include "ccsim/core/error.hpp"
#include "ccsim/scenario.hpp"

namespace ccsim::sim {

enum class ArrivalMode : std::uint8_t { kIdentical, kIpp };
enum class HandlingMode : std::uint8_t { kEmpirical, kExponential };
enum class AhtPerDay : std::uint8_t { kYes, kNo, kFit };
enum class PatienceMode : std::uint8_t { kEmpirical, kExponential };

// The six modelling axes. Strings follow the model table: Identical/IPP,
// Empirical/Exp, Yes/No/Fit, Yes/No, Empirical/Exp, Yes/No.
struct ModelConfig {
  ArrivalMode arrival = ArrivalMode::kIpp;
  HandlingMode ht = HandlingMode::kEmpirical;
  AhtPerDay aht_per_day = AhtPerDay::kYes;
  bool wrapup = true;
  PatienceMode patience = PatienceMode::kEmpirical;
  bool breaks = true;

  // A fitted daily AHT only parameterises an exponential handling time.
  void validate() const {
    if (aht_per_day == AhtPerDay::kFit && ht != HandlingMode::kExponential) {
      throw ConfigError("model config: 'AHT per day = Fit' requires 'HT = Exp'");
    }
  }

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

inline std::string_view to_string(ArrivalMode m) { return m == ArrivalMode::kIdentical ? "Identical" : "IPP"; }
inline std::string_view to_string(HandlingMode m) { return m == HandlingMode::kEmpirical ? "Empirical" : "Exp"; }
inline std::string_view to_string(AhtPerDay m) {
  return m == AhtPerDay::kYes ? "Yes" : (m == AhtPerDay::kNo ? "No" : "Fit");
}
inline std::string_view to_string(PatienceMode m) { return m == PatienceMode::kEmpirical ? "Empirical" : "Exp"; }
inline std::string_view yes_no(bool b) { return b ? "Yes" : "No"; }

inline constexpr std::array<std::string_view, 6> kAxisNames = {"arrival", "ht", "aht_per_day", "wrapup", "patience",
                                                                "breaks"};

inline std::array<std::string, 6> axis_values(const ModelConfig& c) {
  return {std::string(to_string(c.arrival)), std::string(to_string(c.ht)),     std::string(to_string(c.aht_per_day)),
          std::string(yes_no(c.wrapup)),     std::string(to_string(c.patience)), std::string(yes_no(c.breaks))};
}

inline Json to_json(const ModelConfig& c) {
  Json j;
  const auto values = axis_values(c);
  for (std::size_t i = 0; i < kAxisNames.size(); ++i) j[std::string(kAxisNames[i])] = values[i];
  return j;
}

namespace detail {

inline std::string axis_key(std::string_view s) { return csv::normalize_key(s); }

[[noreturn]] inline void bad_axis(std::string_view axis, std::string_view value, std::string_view allowed) {
  throw ConfigError("model config: axis '" + std::string(axis) + "' got '" + std::string(value) + "', expected one of " +
                    std::string(allowed));
}

}  // namespace detail

// Reads one key per axis; values are case-insensitive and every axis is required.
inline ModelConfig model_config_from_json(const Json& j) {
  ModelConfig c;
  auto value_of = [&](std::string_view axis) -> std::string {
    for (const auto& [key, value] : j.items()) {
      if (detail::axis_key(key) == detail::axis_key(axis)) return value.get<std::string>();
    }
    throw ConfigError("model config: missing axis '" + std::string(axis) + "'");
  };
  auto yes_no_axis = [&](std::string_view axis) {
    const auto v = value_of(axis);
    const auto k = detail::axis_key(v);
    if (k == "yes") return true;
    if (k == "no") return false;
    detail::bad_axis(axis, v, "Yes, No");
  };
  {
    const auto v = value_of("arrival");
    const auto k = detail::axis_key(v);
    if (k == "identical") c.arrival = ArrivalMode::kIdentical;
    else if (k == "ipp") c.arrival = ArrivalMode::kIpp;
    else detail::bad_axis("arrival", v, "Identical, IPP");
  }
  {
    const auto v = value_of("ht");
    const auto k = detail::axis_key(v);
    if (k == "empirical") c.ht = HandlingMode::kEmpirical;
    else if (k == "exp" || k == "exponential") c.ht = HandlingMode::kExponential;
    else detail::bad_axis("ht", v, "Empirical, Exp");
  }
  {
    const auto v = value_of("aht_per_day");
    const auto k = detail::axis_key(v);
    if (k == "yes") c.aht_per_day = AhtPerDay::kYes;
    else if (k == "no") c.aht_per_day = AhtPerDay::kNo;
    else if (k == "fit") c.aht_per_day = AhtPerDay::kFit;
    else detail::bad_axis("aht_per_day", v, "Yes, No, Fit");
  }
  c.wrapup = yes_no_axis("wrapup");
  {
    const auto v = value_of("patience");
    const auto k = detail::axis_key(v);
    if (k == "empirical") c.patience = PatienceMode::kEmpirical;
    else if (k == "exp" || k == "exponential") c.patience = PatienceMode::kExponential;
    else detail::bad_axis("patience", v, "Empirical, Exp");
  }
  c.breaks = yes_no_axis("breaks");
  c.validate();
  return c;
}

}  // namespace ccsim::sim
