#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "stmd/grid.hpp"

namespace stmd {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
    friend bool operator==(const Vec2&, const Vec2&) = default;
};

enum class BackgroundTexture { stripes, filtered_noise };

struct LinearPath {
    Vec2 velocity{1.0, 0.0};     // px/frame
    std::optional<Vec2> start;   // defaults to centring the path in the frame
};

struct CircularPath {
    Vec2 center;
    double radius = 50.0;
    double angular_speed = 0.02;  // rad/frame
    double phase = 0.0;           // angle at frame 0
};

using TargetPath = std::variant<LinearPath, CircularPath>;

struct SynthConfig {
    std::size_t width = 470;
    std::size_t height = 310;
    std::size_t frames = 300;
    std::uint64_t seed = 1;
    Vec2 bg_velocity{1.0, 0.0};
    BackgroundTexture bg_texture = BackgroundTexture::stripes;
    double bg_mean_luminance = 0.7;
    double bg_contrast = 0.2;      // half-range of texture luminance around the mean
    double stripe_min_width = 8.0;
    double stripe_max_width = 40.0;
    double noise_scale = 32.0;     // coarsest octave spacing of filtered noise
    Vec2 target_size{5.0, 5.0};    // w x h pixels
    double target_luminance = 0.05;
    TargetPath target_path = LinearPath{};
    double base_rate_hz = 1000.0;  // label only

    void validate() const;
};

struct TrackPoint {
    std::size_t frame_index = 0;
    Vec2 center;    // pixel coordinates, pixel j spans [j - 0.5, j + 0.5]
    Vec2 velocity;  // px/frame
    double heading = 0.0;
    friend bool operator==(const TrackPoint&, const TrackPoint&) = default;
};

struct Sequence {
    std::vector<Grid2D> frames;
    std::vector<TrackPoint> track;
    double rate_hz = 0.0;
};

// Panned background texture, built once per sequence from the seed.
class BackgroundPanorama {
public:
    explicit BackgroundPanorama(const SynthConfig& cfg);
    // Background luminance at pixel (row, col) of frame n.
    double sample(double row, double col, std::size_t frame) const;

private:
    SynthConfig cfg_;
    std::size_t tex_width_ = 0;
    std::size_t tex_height_ = 0;
    std::vector<double> texture_;
};

// Ground truth for every frame; throws ConfigError naming the first frame
// where the target leaves the image.
std::vector<TrackPoint> compute_track(const SynthConfig& cfg);

Grid2D render_frame(const SynthConfig& cfg, const BackgroundPanorama& background, const TrackPoint& point);

Sequence generate_sequence(const SynthConfig& cfg);

// Keeps every factor-th frame and scales velocities by factor; the tail is
// truncated to floor(n / factor) frames.
Sequence downsample_rate(const Sequence& seq, std::size_t factor);
// Same result as downsample_rate(generate_sequence(cfg), factor) without
// rendering the dropped frames.
Sequence generate_downsampled(const SynthConfig& cfg, std::size_t factor);

}  // namespace stmd
