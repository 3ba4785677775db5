#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "unhap/evaluation.hpp"
#include "unhap/events.hpp"
#include "unhap/model.hpp"

namespace unhap::io {

namespace fs = std::filesystem;
using nlohmann::json;

/// Shortest round-trip decimal text for a double (17 significant digits).
std::string format_double(double v);

/// Header lines written as "# key=value" before the CSV header row.
struct Provenance {
    std::string config_sha256;
    std::uint64_t seed{0};
};

/// Event CSV: optional "# key=value" comment lines (horizon=<T> is read back),
/// then the header "type_id,time,mark,label" and one row per event. The label
/// column may be empty.
void write_events(const fs::path& path, const EventSequence& seq, const Provenance& prov);
/// Rows need not be sorted. `horizon` overrides the file's horizon comment;
/// one of the two must be present. Marks outside K are rejected when
/// `marks` is given.
EventSequence read_events(const fs::path& path, std::optional<double> horizon = std::nullopt,
                          const MarkModel* marks = nullptr);

json kernel_to_json(const KernelParams& kernel);
KernelParams kernel_from_json(const json& j);
json params_to_json(const ModelParams& params);
/// The mark model is resolved by name (built-in) unless `marks` is given.
ModelParams params_from_json(const json& j, std::shared_ptr<const MarkModel> marks = nullptr);

json metrics_to_json(const MetricsReport& report);
/// Flat "key value" lines, one metric per line.
std::string metrics_to_text(const MetricsReport& report);

std::string read_text(const fs::path& path);
/// Writes atomically enough for our purposes: throws on failure.
void write_text(const fs::path& path, std::string_view text);
json read_json(const fs::path& path);
void write_json(const fs::path& path, const json& j);

std::string sha256_hex(std::string_view data);
std::string sha256_file(const fs::path& path);

/// "<sha256>  <name>" lines for every listed file, in the given order,
/// written to <dir>/manifest.txt.
void write_manifest(const fs::path& dir, const std::vector<std::string>& files);

}  // namespace unhap::io
