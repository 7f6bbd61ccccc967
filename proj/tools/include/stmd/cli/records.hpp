#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "stmd/eval.hpp"
#include "stmd/synthgen.hpp"

namespace stmd::cli {

// JSON lines. The first line of either file may be a header object with
// "header": true; all other lines are records.

struct TrackFile {
    std::optional<std::string> config_hash;
    std::optional<double> rate_hz;
    std::vector<TrackPoint> track;
};

// {"frame","x","y","vx","vy","heading_rad"} per line.
std::string encode_track(const TrackFile& file);
TrackFile parse_track(const std::string& text, const std::string& source);
TrackFile read_track(const std::filesystem::path& path);

struct DetectionsHeader {
    std::string detector;
    std::string config_hash;
    std::size_t warmup_frames = 0;
    std::size_t frames = 0;
    double threshold = 0.0;
};

struct DetectionsFile {
    DetectionsHeader header;
    std::vector<Detection> detections;
};

// {"frame","x","y","score","direction_deg"} per line; direction_deg is null
// for detectors without a direction output.
std::string encode_detection_line(const Detection& d);
std::string encode_detections_header(const DetectionsHeader& h);
DetectionsFile parse_detections(const std::string& text, const std::string& source);
DetectionsFile read_detections(const std::filesystem::path& path);

}  // namespace stmd::cli
