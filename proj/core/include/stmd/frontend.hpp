#pragma once

#include <cstddef>
#include <vector>

#include "stmd/grid.hpp"
#include "stmd/ring.hpp"

namespace stmd {

struct RetinaConfig {
    double sigma = 1.0;
    std::size_t radius = 2;
};

enum class LaminaMode { plain_diff, fractional };

struct LaminaConfig {
    LaminaMode mode = LaminaMode::fractional;
    double frac_order = 0.9;  // alpha in (0, 1]
    std::size_t memory = 10;  // K_mem, frames

    void validate() const;
    // Frames of history the filter reads.
    std::size_t history_depth() const noexcept { return mode == LaminaMode::plain_diff ? 2 : memory; }
};

// Grunwald-Letnikov weights: w_0 = 1, w_k = w_{k-1} (k - 1 - alpha) / k.
std::vector<double> fractional_weights(double alpha, std::size_t count);

template <class T>
BasicGrid<T> retina_smooth(const BasicGrid<T>& frame, const RetinaConfig& cfg);

// Temporal filter over the retina history with precomputed weights.
class Lamina {
public:
    explicit Lamina(const LaminaConfig& cfg);

    const LaminaConfig& config() const noexcept { return cfg_; }
    const std::vector<double>& weights() const noexcept { return weights_; }

    // Throws WarmupError when the ring is shallower than history_depth().
    Grid2D apply(const FrameRing& history) const;

private:
    LaminaConfig cfg_;
    std::vector<double> weights_;
};

Grid2D lamina_filter(const FrameRing& history, const LaminaConfig& cfg);

// Named tap point for the ON/OFF split.
inline OnOffSignals split_on_off(const Grid2D& lamina_out) { return rectify_pair(lamina_out); }

}  // namespace stmd
