#pragma once

// RunManifest: what produced an output directory. Two runs with equal
// manifests write byte-identical files.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <string_view>
#include <vector>

#include "ccsim/core/error.hpp"
#include "ccsim/scenario.hpp"

#ifndef CCSIM_VERSION
#define CCSIM_VERSION "0.0.0"
#endif

namespace ccsim::cli {

inline constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;

inline std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h = kFnvOffset) noexcept {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw DataError("cannot open " + p.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct ManifestInput {
  std::string path;
  std::string digest;  // fnv1a64 of the file bytes, or of the sorted directory listing plus contents
};

struct RunManifest {
  std::string command;
  Json config;  // every option that affects the outputs
  std::uint64_t seed = 0;
  std::vector<ManifestInput> inputs;
  std::string version = CCSIM_VERSION;

  std::string config_digest() const { return hex64(fnv1a64(config.dump())); }

  void add_input(const std::filesystem::path& p) {
    namespace fs = std::filesystem;
    std::uint64_t h = kFnvOffset;
    if (fs::is_directory(p)) {
      std::vector<fs::path> files;
      for (const auto& e : fs::directory_iterator(p)) {
        if (e.is_regular_file()) files.push_back(e.path());
      }
      std::sort(files.begin(), files.end());
      for (const auto& f : files) {
        h = fnv1a64(f.filename().string(), h);
        h = fnv1a64(read_file(f), h);
      }
    } else {
      h = fnv1a64(read_file(p));
    }
    inputs.push_back({p.string(), hex64(h)});
  }
};

inline Json to_json(const RunManifest& m) {
  Json inputs = Json::array();
  for (const auto& i : m.inputs) inputs.push_back({{"path", i.path}, {"digest", i.digest}});
  return Json{{"command", m.command},
              {"config", m.config},
              {"config_digest", m.config_digest()},
              {"seed", m.seed},
              {"inputs", inputs},
              {"version", m.version}};
}

inline void write_text(const std::filesystem::path& p, std::string_view text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw DataError("cannot write " + p.string());
  out << text;
}

inline void write_json(const std::filesystem::path& p, const Json& j) { write_text(p, j.dump(2) + "\n"); }

inline void write_manifest(const std::filesystem::path& dir, const RunManifest& m) {
  write_json(dir / "manifest.json", to_json(m));
}

}  // namespace ccsim::cli
