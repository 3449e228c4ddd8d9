// ccsim: analyze call-center logs, simulate days, validate models.
//
// Exit codes: 0 success, 1 usage error, 2 data or configuration error.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "ccsim/analysis/analyze.hpp"
#include "ccsim/cli/manifest.hpp"
#include "ccsim/cli/scenario_store.hpp"
#include "ccsim/models/presets.hpp"
#include "ccsim/sim/replicate.hpp"
#include "ccsim/synth/reality.hpp"
#include "ccsim/validate/validate.hpp"

namespace fs = std::filesystem;
using namespace ccsim;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

struct Globals {
  std::uint64_t seed = 1;
  unsigned threads = 0;
  std::string out_dir = ".";
  std::string format = "json";
};

unsigned thread_count(const Globals& g) { return g.threads ? g.threads : sim::default_threads(); }

fs::path prepare_out_dir(const Globals& g) {
  fs::path dir(g.out_dir);
  fs::create_directories(dir);
  return dir;
}

std::string pct_row(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

void write_csv(const fs::path& p, const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw DataError("cannot write " + p.string());
  for (const auto& r : rows) csv::write_row(out, r);
}

ingest::IngestConfig load_ingest_config(const std::string& path) {
  ingest::IngestConfig cfg;
  if (path.empty()) return cfg;
  const Json j = cli::load_json(path);
  try {
    cfg = j.get<ingest::IngestConfig>();
  } catch (const Json::exception& e) {
    throw ConfigError("ingest config " + path + ": " + e.what());
  }
  return cfg;
}

// ---------------------------------------------------------------- analyze

struct AnalyzeArgs {
  std::string calls;
  std::string activities;
  std::string config;
  std::string exclude;
  bool ks_jitter = false;
};

int run_analyze(const Globals& g, const AnalyzeArgs& a, const std::string& command) {
  const auto cfg = load_ingest_config(a.config);
  std::ifstream calls_in(a.calls);
  if (!calls_in) throw DataError("cannot open call log " + a.calls);
  auto calls = ingest::parse_call_log(calls_in, cfg);
  std::optional<ingest::ParseResult<ingest::ActivityRecord>> acts;
  if (!a.activities.empty()) {
    std::ifstream in(a.activities);
    if (!in) throw DataError("cannot open activity log " + a.activities);
    acts = ingest::parse_activity_log(in, cfg);
  }
  analysis::AnalyzeOptions opts;
  opts.ks_jitter = a.ks_jitter;
  opts.seed = g.seed;
  if (!a.exclude.empty()) {
    std::ifstream in(a.exclude);
    if (!in) throw DataError("cannot open exclusion calendar " + a.exclude);
    opts.excluded = ingest::parse_exclusion_calendar(in);
  }
  const auto bundle = analysis::analyze(calls, acts, cfg, opts);

  const auto dir = prepare_out_dir(g);
  cli::write_json(dir / "analysis.json", analysis::to_json(bundle));
  analysis::write_exports(bundle, dir);
  cli::write_scenario_dir(dir / "scenarios", bundle.scenarios, bundle.params);

  cli::RunManifest m;
  m.command = command;
  m.seed = g.seed;
  m.config = {{"ks_jitter", a.ks_jitter}};
  m.add_input(a.calls);
  if (!a.activities.empty()) m.add_input(a.activities);
  if (!a.config.empty()) m.add_input(a.config);
  if (!a.exclude.empty()) m.add_input(a.exclude);
  cli::write_manifest(dir, m);
  for (const auto& w : bundle.warnings) std::cerr << "warning: " << w << '\n';
  std::cout << "analyzed " << bundle.scenarios.size() << " days into " << dir.string() << '\n';
  return 0;
}

// ---------------------------------------------------------------- synth

int run_synth(const Globals& g, const std::string& spec_path) {
  const auto spec = synth::spec_from_json(cli::load_json(spec_path));
  const auto logs = synth::generate_reality(spec, g.seed);
  const auto dir = prepare_out_dir(g);
  {
    std::ofstream out(dir / "calls.csv", std::ios::binary);
    synth::write_call_log(out, logs.calls);
  }
  {
    std::ofstream out(dir / "activities.csv", std::ios::binary);
    synth::write_activity_log(out, logs.activities);
  }
  cli::write_json(dir / "ground_truth.json", synth::ground_truth(spec, g.seed, logs));
  cli::write_json(dir / "config.json", synth::ingest_config_for(spec));
  cli::RunManifest m;
  m.command = "synth";
  m.seed = g.seed;
  m.config = synth::to_json(spec);
  m.add_input(spec_path);
  cli::write_manifest(dir, m);
  std::cout << "wrote " << logs.calls.size() << " calls over " << spec.n_days << " days to " << dir.string() << '\n';
  return 0;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  std::string scenario;
  std::string params;
  std::string model = "Arrival Model";
  std::size_t reps = 1000;
  std::string out;
};

int run_simulate(const Globals& g, const SimulateArgs& a) {
  const std::string format = a.out.empty() ? g.format : a.out;
  const auto preset = models::resolve_model(a.model);
  const auto day = cli::load_scenario(a.scenario);
  const fs::path params_path = a.params.empty() ? fs::path(a.scenario).parent_path() / "params.json" : fs::path(a.params);
  const auto params = cli::load_params(params_path);

  sim::ReplicateOptions ro;
  ro.reps = a.reps;
  ro.seed = g.seed;
  ro.threads = thread_count(g);
  const auto result = sim::replicate(day, preset.config, params, ro);

  const auto dir = prepare_out_dir(g);
  if (format == "csv") {
    std::vector<std::vector<std::string>> rows{{"replication", "offered", "sl", "ab", "asa"}};
    for (std::size_t r = 0; r < result.runs.size(); ++r) {
      const auto& d = result.runs[r];
      rows.push_back({std::to_string(r), std::to_string(d.offered), pct_row(d.sl()), pct_row(d.ab()), pct_row(d.asa())});
    }
    write_csv(dir / "simulate.csv", rows);
  }
  Json j = sim::to_json(result);
  j["model"] = preset.name;
  j["date"] = day.date.iso();
  j["warnings"] = result.warnings;
  if (day.actual) j["actual"] = to_json(*day.actual);
  cli::write_json(dir / "simulate.json", j);

  cli::RunManifest m;
  m.command = "simulate";
  m.seed = g.seed;
  m.config = {{"model", preset.name}, {"model_config", sim::to_json(preset.config)}, {"reps", a.reps}, {"format", format}};
  m.add_input(a.scenario);
  m.add_input(params_path);
  cli::write_manifest(dir, m);
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
  std::cout << preset.name << ' ' << day.date.iso() << ": SL mean " << result.of(Metric::kSl).mean << " over "
            << result.runs.size() << " replications\n";
  return 0;
}

// ---------------------------------------------------------------- validate / decompose

struct ValidateArgs {
  std::string scenarios;
  std::string models = "all";
  std::size_t reps = 1000;
  std::string out = "report.json";
  bool decompose = false;
};

Json models_config(const std::vector<models::ModelPreset>& ps) {
  Json j = Json::array();
  for (const auto& p : ps) j.push_back({{"name", p.name}, {"config", sim::to_json(p.config)}});
  return j;
}

void write_table_csvs(const fs::path& dir, const std::vector<validate::ModelReport>& reports) {
  using validate::idx;
  std::vector<std::vector<std::string>> per1{{"Model", "MAE_SL", "MAE_Ab", "MAE_ASA", "I_alpha_SL", "I_alpha_Ab", "I_alpha_ASA"}};
  std::vector<std::vector<std::string>> variab{{"Model", "Variability of SL", "Variability of Ab", "Variability of ASA"}};
  std::vector<std::vector<std::string>> actual{{"Model", "P(SL > Q0.5 SL)", "P(Ab > Q0.5 Ab)", "P(ASA > Q0.5 ASA)"}};
  for (const auto& r : reports) {
    std::vector<std::string> p{r.model.name}, v{r.model.name}, a{r.model.name};
    for (Metric m : kAllMetrics) p.push_back(pct_row(r.report.of(m).mae));
    for (Metric m : kAllMetrics) p.push_back(pct_row(r.report.of(m).i_alpha));
    for (Metric m : kAllMetrics) {
      v.push_back(pct_row(r.report.of(m).variability));
      a.push_back(pct_row(r.report.of(m).above_median));
    }
    per1.push_back(p);
    variab.push_back(v);
    actual.push_back(a);
  }
  write_csv(dir / "per1.csv", per1);
  write_csv(dir / "variab.csv", variab);
  write_csv(dir / "actual.csv", actual);
}

void write_day_csv(const fs::path& dir, const std::vector<validate::ModelReport>& reports) {
  std::vector<std::vector<std::string>> rows{{"model", "date", "metric", "actual", "sim_mean", "sim_q025", "sim_q975"}};
  for (const auto& r : reports) {
    for (const auto& d : r.days) {
      for (Metric m : kAllMetrics) {
        const auto& s = d.of(m);
        rows.push_back({r.model.name, d.day.iso(), std::string(metric_name(m)), pct_row(d.actual_value(m)), pct_row(s.mean),
                        pct_row(s.q025), pct_row(s.q975)});
      }
    }
  }
  write_csv(dir / "days.csv", rows);
}

// Per-day samples behind the decomposition: measured S - X and noise E_S S(A2) - S(A).
void write_difference_csv(const fs::path& p, const std::vector<validate::ModelReport>& reports) {
  std::vector<std::vector<std::string>> rows{{"model", "date", "metric", "measured_difference", "noise_difference"}};
  for (const auto& r : reports) {
    if (!r.noise) continue;
    for (std::size_t i = 0; i < r.days.size(); ++i) {
      const auto& d = r.days[i];
      const auto noise = r.noise->days[i].difference();
      for (Metric m : kAllMetrics) {
        rows.push_back({r.model.name, d.day.iso(), std::string(metric_name(m)), pct_row(d.of(m).mean - d.actual_value(m)),
                        pct_row(noise[validate::idx(m)])});
      }
    }
  }
  write_csv(p, rows);
}

Json decomposition_json(const std::vector<validate::ModelReport>& reports) {
  Json out = Json::array();
  for (const auto& r : reports) {
    Json metrics;
    for (Metric m : kAllMetrics) {
      if (r.decomposition[validate::idx(m)]) metrics[std::string(metric_name(m))] = validate::to_json(*r.decomposition[validate::idx(m)]);
    }
    out.push_back({{"model", r.model.name}, {"days", r.days.size()}, {"metrics", metrics}});
  }
  return out;
}

int run_validate(const Globals& g, const ValidateArgs& a, bool decompose_only) {
  const auto set = cli::load_scenario_dir(a.scenarios);
  const auto ps = models::resolve_models(a.models);
  validate::ValidateOptions vo;
  vo.run.reps = a.reps;
  vo.run.seed = g.seed;
  vo.run.threads = thread_count(g);
  vo.decompose = decompose_only || a.decompose;
  const auto reports = validate::validate_models(set.days, ps, set.params, vo);

  const auto dir = prepare_out_dir(g);
  if (decompose_only) {
    cli::write_json(dir / "decompose.json", Json{{"reps", a.reps}, {"models", decomposition_json(reports)}});
    write_difference_csv(dir / "decompose_days.csv", reports);
  } else {
    Json j;
    j["reps"] = a.reps;
    j["days"] = set.days.size();
    Json rows = Json::array();
    for (const auto& r : reports) rows.push_back(validate::to_json(r));
    j["models"] = rows;
    cli::write_json(dir / a.out, j);
    write_table_csvs(dir, reports);
    write_day_csv(dir, reports);
    if (vo.decompose) write_difference_csv(dir / "decompose_days.csv", reports);
  }

  cli::RunManifest m;
  m.command = decompose_only ? "decompose" : "validate";
  m.seed = g.seed;
  m.config = {{"models", models_config(ps)}, {"reps", a.reps}, {"decompose", vo.decompose}, {"out", a.out}};
  m.add_input(a.scenarios);
  cli::write_manifest(dir, m);
  for (const auto& r : reports) {
    std::cout << r.model.name << ": MAE_SL " << r.report.of(Metric::kSl).mae;
    if (r.decomposition[0]) std::cout << ", corrected MAE_SL " << r.decomposition[0]->corrected.corrected_mae;
    std::cout << '\n';
    for (const auto& w : r.report.warnings) std::cerr << "warning: " << r.model.name << ": " << w << '\n';
  }
  return 0;
}

// ---------------------------------------------------------------- presets

int run_presets(const Globals& g) {
  if (g.format == "csv") {
    std::vector<std::string> header{"name"};
    for (auto k : sim::kAxisNames) header.emplace_back(k);
    csv::write_row(std::cout, header);
    for (const auto& p : models::all_presets()) {
      std::vector<std::string> row{p.name};
      for (auto& v : sim::axis_values(p.config)) row.push_back(v);
      csv::write_row(std::cout, row);
    }
    return 0;
  }
  Json j = Json::array();
  for (const auto& p : models::all_presets()) j.push_back({{"name", p.name}, {"config", sim::to_json(p.config)}});
  std::cout << j.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ccsim: call-center log analysis, simulation and model validation"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string(CCSIM_VERSION));

  Globals g;
  app.add_option("--seed", g.seed, "Root random seed")->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads (0 = all cores)")->capture_default_str();
  app.add_option("--out-dir", g.out_dir, "Output directory")->capture_default_str();
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();

  AnalyzeArgs aa;
  auto* analyze = app.add_subcommand("analyze", "Ingest call and activity logs, fit estimators, write scenarios");
  analyze->alias("fit");
  analyze->add_option("--calls", aa.calls, "Call log CSV")->required()->check(CLI::ExistingFile);
  analyze->add_option("--activities", aa.activities, "Agent activity log CSV")->check(CLI::ExistingFile);
  analyze->add_option("--config", aa.config, "Ingest config JSON")->envname("CCSIM_CONFIG")->check(CLI::ExistingFile);
  analyze->add_option("--exclude", aa.exclude, "Exclusion calendar (one ISO date per line)")->check(CLI::ExistingFile);
  analyze->add_flag("--ks-jitter", aa.ks_jitter, "Jitter arrival times within their second before KS tests");

  std::string synth_spec;
  auto* synth = app.add_subcommand("synth", "Generate synthetic call and activity logs with ground truth");
  synth->add_option("--spec", synth_spec, "Synthetic spec JSON")->required()->check(CLI::ExistingFile);

  SimulateArgs sa;
  auto* simulate = app.add_subcommand("simulate", "Replicate one scenario day under a model");
  simulate->add_option("--scenario", sa.scenario, "Day scenario JSON")->required()->check(CLI::ExistingFile);
  simulate->add_option("--params", sa.params, "Model parameters JSON (default: params.json beside the scenario)");
  simulate->add_option("--model", sa.model, "Preset name or model config JSON")->capture_default_str();
  simulate->add_option("--reps", sa.reps, "Replications")->check(CLI::PositiveNumber)->capture_default_str();
  simulate->add_option("--out", sa.out, "Output format, overrides --format")->check(CLI::IsMember({"json", "csv"}));

  ValidateArgs va;
  auto* validate = app.add_subcommand("validate", "Validate models against the actuals of a scenario directory");
  validate->add_option("--scenarios", va.scenarios, "Scenario directory")->required();
  validate->add_option("--models", va.models, "'all' or comma-separated presets / config files")->capture_default_str();
  validate->add_option("--reps", va.reps, "Replications per day")->check(CLI::PositiveNumber)->capture_default_str();
  validate->add_option("--out", va.out, "Report file name inside --out-dir")->capture_default_str();
  validate->add_flag("--decompose", va.decompose, "Also estimate noise and the corrected model error");

  ValidateArgs da;
  da.models = "Arrival Model";
  auto* decompose = app.add_subcommand("decompose", "Split the measured error into noise and model error");
  decompose->add_option("--scenarios", da.scenarios, "Scenario directory")->required();
  decompose->add_option("--models", da.models, "'all' or comma-separated presets / config files")->capture_default_str();
  decompose->add_option("--reps", da.reps, "Replications per day")->check(CLI::PositiveNumber)->capture_default_str();

  auto* presets = app.add_subcommand("presets", "List the model presets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (analyze->parsed()) return run_analyze(g, aa, "analyze");
    if (synth->parsed()) return run_synth(g, synth_spec);
    if (simulate->parsed()) return run_simulate(g, sa);
    if (validate->parsed()) return run_validate(g, va, false);
    if (decompose->parsed()) return run_validate(g, da, true);
    if (presets->parsed()) return run_presets(g);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const Json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}
