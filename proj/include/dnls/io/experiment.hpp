#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>

#include "dnls/io/config.hpp"

namespace dnls::io {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumerical = 3;

struct ExperimentOutputs {
  // File name (relative to the output directory) to contents.
  std::map<std::string, std::string> files;
  // Snapshot files are streamed into this directory while the run progresses; empty if unused.
  std::filesystem::path snapshot_staging;
};

// Runs the single module entry point of cfg.kind(). Snapshots, when requested, are staged under
// `staging_root`. Throws the module's exceptions unchanged.
ExperimentOutputs execute(const ExperimentConfig& cfg, std::optional<std::uint64_t> seed,
                          const std::filesystem::path& staging_root);

struct RunRequest {
  ExperimentKind kind = ExperimentKind::Evolve;
  std::filesystem::path config;
  std::optional<std::filesystem::path> out;
  std::optional<std::uint64_t> seed;
};

// Full pipeline with exit codes: 0 success, 2 validation failure (nothing written),
// 3 numerical failure (diagnostic.json written to the output directory).
int run(const RunRequest& req, std::ostream& err);

}  // namespace dnls::io
