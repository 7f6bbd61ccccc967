#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "stmd/detectors.hpp"
#include "stmd/eval.hpp"
#include "stmd/synthgen.hpp"

namespace stmd::cli {

struct RunSection {
    DetectorKind detector = DetectorKind::stmdnet;
    std::string input;       // frame directory; empty means render the synth section
    double threshold = 0.0;  // detect: minimum peak score written
    std::size_t rate_factor = 1;
};

// Values to sweep; an empty axis keeps the base config value.
struct SweepAxes {
    std::vector<double> velocity;     // px/frame along the path
    std::vector<double> target_size;  // square side, px
    std::vector<double> contrast;     // bg_mean - target luminance
    std::vector<double> rate_factor;
    std::vector<double> tau;          // estmd tau and dstmd delay_tau
    std::vector<double> g_L;
    std::vector<double> k;
    std::vector<double> alpha;
};

struct SweepSection {
    std::vector<DetectorKind> detectors{DetectorKind::estmd, DetectorKind::stmdnet};
    std::vector<std::uint64_t> seeds;  // empty: synth.seed only
    SweepAxes axes;
    std::size_t cell_budget = 500;
};

struct RunConfig {
    RunSection run;
    SynthConfig synth;
    PipelineConfig pipeline;
    MatchingConfig matching;
    SweepSection sweep;

    // Throws ConfigError naming the offending key.
    void validate() const;
};

using EnvLookup = std::function<std::optional<std::string>(const std::string& name)>;
EnvLookup process_env();

// Defaults, overlaid by the YAML text, overlaid by STMD_<SECTION>_<KEY>
// environment variables, then validated.
RunConfig parse_config(const std::string& yaml_text, const EnvLookup& env = process_env());
RunConfig load_config(const std::optional<std::filesystem::path>& path, const EnvLookup& env = process_env());

// Canonical YAML of every key; parse_config(dump_config(c)) == c.
std::string dump_config(const RunConfig& cfg);
// FNV-1a 64 of dump_config, 16 lowercase hex digits.
std::string config_hash(const RunConfig& cfg);

// Every leaf key path ("medulla.decay_g") with its environment variable name.
std::vector<std::pair<std::string, std::string>> env_override_names();

}  // namespace stmd::cli
