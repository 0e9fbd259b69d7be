#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cubemorse/core.hpp"

namespace cubemorse::report {

struct GradeDimCount {
    GradeId grade = 0;
    unsigned dim = 0;
    std::uint64_t count = 0;
    bool operator==(const GradeDimCount&) const = default;
};

struct ConleySummary {
    std::uint64_t top_cubes = 0;
    std::uint64_t scc_count = 0;
    std::uint64_t first_round_cells = 0;
    std::uint64_t conley_cells = 0;
    unsigned tower_height = 0;
    std::vector<GradeDimCount> cells;
    /// (face ref, cell ref, coefficient) of the Conley boundary.
    std::vector<std::array<std::uint64_t, 3>> boundary;
    bool operator==(const ConleySummary&) const = default;
};

struct BenchSummary {
    unsigned repeat = 0;
    double mean_ms = 0;
    double stddev_ms = 0;
    std::vector<double> runs_ms;
    bool operator==(const BenchSummary&) const = default;
};

struct RunResult {
    std::string command;
    std::vector<std::string> args;
    std::uint64_t cell_count = 0;
    std::optional<std::vector<std::uint64_t>> betti;
    unsigned rounds = 0;
    std::vector<std::uint64_t> round_sizes;
    std::optional<ConleySummary> conley;
    std::map<std::string, bool> checks;
    std::map<std::string, std::uint64_t> counts;
    double timing_ms = 0;
    std::optional<BenchSummary> bench;
    bool operator==(const RunResult&) const = default;
};

nlohmann::json to_json(const RunResult& r);
RunResult from_json(const nlohmann::json& j);

/// Two-column `field,value` rows; nested objects use dotted field names and
/// arrays are written as compact JSON.
std::string to_csv(const RunResult& r);
RunResult from_csv(const std::string& text);

/// Human-readable summary.
std::string to_text(const RunResult& r);

/// Graded boundary of an explicit complex: cells, boundary pairs and
/// optional poset edges.
nlohmann::json complex_json(const ExplicitComplex& complex,
                            const std::vector<std::pair<GradeId, GradeId>>& poset_edges = {});

}  // namespace cubemorse::report
