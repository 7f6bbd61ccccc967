#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "stmd/cli/config.hpp"
#include "stmd/eval.hpp"

namespace stmd::cli {

// Axis names in column order.
const std::vector<std::string>& sweep_axis_names();

// Applies one axis value to a config. Throws ConfigError for unknown axes or
// values the config cannot represent.
void apply_axis(RunConfig& cfg, const std::string& axis, double value);

struct SweepCell {
    DetectorKind detector = DetectorKind::stmdnet;
    std::uint64_t seed = 0;
    std::vector<std::pair<std::string, double>> params;  // swept axes only
    RunConfig config;                                    // fully resolved
};

// Full factorial grid: axis values outermost (first axis slowest), then
// seeds, then detectors. Throws ConfigError when the grid exceeds the cell budget.
std::vector<SweepCell> expand_sweep(const RunConfig& cfg);

struct SweepRow {
    SweepCell cell;
    MetricsReport report;
};

// Renders the cell's sequence (with its rate factor) and evaluates its detector.
MetricsReport run_cell(const SweepCell& cell);

using SweepProgress = std::function<void(std::size_t done, std::size_t total, const SweepRow& row)>;

// Runs every cell on a pool of `threads` workers; rows keep expand_sweep order.
std::vector<SweepRow> run_sweep(const std::vector<SweepCell>& cells, std::size_t threads,
                                const SweepProgress& progress = {});

// Long format, one row per cell.
std::string format_sweep_csv(const std::vector<SweepRow>& rows);

}  // namespace stmd::cli
