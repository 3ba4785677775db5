#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "unhap/config.hpp"
#include "unhap/experiments.hpp"

namespace unhap {

/// Each command writes under `out` and returns the artifact names listed in
/// out/manifest.txt.
std::vector<std::string> cmd_simulate(const RunConfig& cfg, const std::filesystem::path& out);
std::vector<std::string> cmd_fit(const RunConfig& cfg, const std::filesystem::path& out);
std::vector<std::string> cmd_score(const RunConfig& cfg, const std::filesystem::path& out);
std::vector<std::string> cmd_experiment(const std::string& name, const ExperimentOptions& opts,
                                        const std::filesystem::path& out);

}  // namespace unhap
