#include "stmd/cli/records.hpp"

#include <fstream>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>

#include "stmd/errors.hpp"

namespace stmd::cli {

using nlohmann::json;

namespace {

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Parsed non-empty lines with their 1-based line numbers.
std::vector<std::pair<std::size_t, json>> json_lines(const std::string& text, const std::string& source) {
    std::vector<std::pair<std::size_t, json>> out;
    std::istringstream in(text);
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            out.emplace_back(number, json::parse(line));
        } catch (const json::exception& e) {
            throw IoError(source + ":" + std::to_string(number) + ": invalid JSON (" + e.what() + ")");
        }
    }
    return out;
}

bool is_header(const json& j) { return j.is_object() && j.value("header", false); }

template <class T>
T field(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) throw IoError(where + ": missing field '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw IoError(where + ": field '" + key + "' has the wrong type");
    }
}

}  // namespace

std::string encode_track(const TrackFile& file) {
    std::string out;
    json header{{"header", true}, {"frames", file.track.size()}};
    if (file.config_hash) header["config_hash"] = *file.config_hash;
    if (file.rate_hz) header["rate_hz"] = *file.rate_hz;
    out += header.dump() + "\n";
    for (const TrackPoint& p : file.track) {
        json j{{"frame", p.frame_index}, {"x", p.center.x},   {"y", p.center.y},
               {"vx", p.velocity.x},     {"vy", p.velocity.y}, {"heading_rad", p.heading}};
        out += j.dump() + "\n";
    }
    return out;
}

TrackFile parse_track(const std::string& text, const std::string& source) {
    TrackFile file;
    for (const auto& [line, j] : json_lines(text, source)) {
        const std::string where = source + ":" + std::to_string(line);
        if (is_header(j)) {
            if (j.contains("config_hash")) file.config_hash = field<std::string>(j, "config_hash", where);
            if (j.contains("rate_hz")) file.rate_hz = field<double>(j, "rate_hz", where);
            continue;
        }
        TrackPoint p;
        p.frame_index = field<std::size_t>(j, "frame", where);
        p.center = {field<double>(j, "x", where), field<double>(j, "y", where)};
        p.velocity = {j.value("vx", 0.0), j.value("vy", 0.0)};
        p.heading = j.value("heading_rad", 0.0);
        if (p.frame_index != file.track.size()) {
            throw IoError(where + ": track frames must be consecutive from 0, expected frame " +
                          std::to_string(file.track.size()) + ", got " + std::to_string(p.frame_index));
        }
        file.track.push_back(p);
    }
    return file;
}

TrackFile read_track(const std::filesystem::path& path) { return parse_track(slurp(path), path.string()); }

std::string encode_detections_header(const DetectionsHeader& h) {
    json j{{"header", true},
           {"detector", h.detector},
           {"config_hash", h.config_hash},
           {"warmup_frames", h.warmup_frames},
           {"frames", h.frames},
           {"threshold", h.threshold}};
    return j.dump() + "\n";
}

std::string encode_detection_line(const Detection& d) {
    json j{{"frame", d.frame_index}, {"x", d.x}, {"y", d.y}, {"score", d.score}};
    if (d.direction) {
        j["direction_deg"] = *d.direction * 180.0 / std::numbers::pi;
    } else {
        j["direction_deg"] = nullptr;
    }
    return j.dump() + "\n";
}

DetectionsFile parse_detections(const std::string& text, const std::string& source) {
    DetectionsFile file;
    bool have_header = false;
    for (const auto& [line, j] : json_lines(text, source)) {
        const std::string where = source + ":" + std::to_string(line);
        if (is_header(j)) {
            file.header.detector = j.value("detector", std::string());
            file.header.config_hash = j.value("config_hash", std::string());
            file.header.warmup_frames = field<std::size_t>(j, "warmup_frames", where);
            file.header.frames = field<std::size_t>(j, "frames", where);
            file.header.threshold = j.value("threshold", 0.0);
            have_header = true;
            continue;
        }
        Detection d;
        d.frame_index = field<std::size_t>(j, "frame", where);
        d.x = field<double>(j, "x", where);
        d.y = field<double>(j, "y", where);
        d.score = field<double>(j, "score", where);
        if (j.contains("direction_deg") && !j.at("direction_deg").is_null()) {
            d.direction = field<double>(j, "direction_deg", where) * std::numbers::pi / 180.0;
        }
        file.detections.push_back(d);
    }
    if (!have_header) throw IoError(source + ": missing header line");
    return file;
}

DetectionsFile read_detections(const std::filesystem::path& path) {
    return parse_detections(slurp(path), path.string());
}

}  // namespace stmd::cli
