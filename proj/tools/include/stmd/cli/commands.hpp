#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "stmd/cli/config.hpp"
#include "stmd/cli/sweep.hpp"
#include "stmd/eval.hpp"

namespace stmd::cli {

namespace fs = std::filesystem;

struct SynthSummary {
    std::size_t frames = 0;
    fs::path frame_dir;
    fs::path track_file;
};

// <out>/frames/frame_NNNNNN.pgm, <out>/track.jsonl and <out>/config.yaml.
SynthSummary cmd_synth(const RunConfig& cfg, const fs::path& out_dir, std::ostream& log);

struct DetectSummary {
    std::size_t frames = 0;
    std::size_t detections = 0;
    std::size_t warmup_frames = 0;
    fs::path detections_file;
};

// Runs run.detector over run.input (or the rendered synth sequence) and
// writes <out>/detections.jsonl.
DetectSummary cmd_detect(const RunConfig& cfg, const fs::path& out_dir, std::ostream& log);

// Scores a detections file against a track file; writes <out>/report.txt
// and <out>/curve.csv.
MetricsReport cmd_eval(const fs::path& detections_file, const fs::path& track_file, const RunConfig& cfg,
                       const fs::path& out_dir, std::ostream& log);

// Writes <out>/sweep.csv.
std::vector<SweepRow> cmd_sweep(const RunConfig& cfg, const fs::path& out_dir, std::size_t threads,
                                std::ostream& log);

struct BenchEntry {
    std::string detector;
    double ms_per_frame = 0.0;
    OpCounts ops;
};

struct BenchReport {
    std::size_t height = 0;
    std::size_t width = 0;
    std::size_t frames = 0;
    std::vector<BenchEntry> entries;
    std::uint64_t dstmd_directional = 0;
    std::uint64_t stmdnet_locate = 0;
};

// Single-threaded timing over at least 210 frames (10 skipped). Always
// includes stmdnet and dstmd so the correlation ratio can be reported.
BenchReport cmd_bench(const RunConfig& cfg, const std::vector<DetectorKind>& detectors, const fs::path& out_dir,
                      std::ostream& log);
std::string format_bench(const BenchReport& report);

// Full command line: stmd <synth|detect|eval|sweep|bench> [options].
// Returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            const EnvLookup& env = process_env());

}  // namespace stmd::cli
