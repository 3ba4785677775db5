#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "unhap/solver.hpp"

namespace unhap {

enum class Scale { Desk, Paper };
Scale parse_scale(std::string_view name);
std::string_view to_string(Scale scale);

/// A tidy table; every cell is already formatted.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::string to_csv() const;
    std::size_t column(std::string_view name) const;
    /// Rows whose named columns equal the given values.
    std::vector<const std::vector<std::string>*> select(
        const std::vector<std::pair<std::string, std::string>>& where) const;
};

struct ExperimentOptions {
    Scale scale{Scale::Desk};
    std::uint64_t seed{0};
    unsigned workers{0};
    /// Overrides for quick runs; the defaults follow the scale.
    std::optional<int> reps;
    std::optional<int> n_iter;
    std::function<void(const std::string&)> progress;
};

/// Deterministic tables keyed by file name, plus wall-clock tables that are
/// kept apart because they differ between runs.
struct ExperimentOutput {
    std::map<std::string, Table> tables;
    std::map<std::string, Table> timings;
};

const std::vector<std::string>& experiment_names();
ExperimentOutput run_experiment(std::string_view name, const ExperimentOptions& opts);

/// splitmix64-mixed seed for one sweep cell and repetition.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> keys);

double median(std::vector<double> v);
double quantile(std::vector<double> v, double q);

}  // namespace unhap
