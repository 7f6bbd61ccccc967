#pragma once

#include <cstddef>
#include <vector>

#include "stmd/direction.hpp"
#include "stmd/grid.hpp"
#include "stmd/ring.hpp"

namespace stmd {

struct PixelOffset {
    int dx = 0;  // columns
    int dy = 0;  // rows
    friend bool operator==(const PixelOffset&, const PixelOffset&) = default;
};

// Parameters for the HR, BL and HR/BL correlators.
struct EmdConfig {
    std::size_t delay_tau = 1;
    PixelOffset offset{-1, 0};
    std::size_t second_delay = 1;       // HR/BL only
    PixelOffset second_offset{1, 0};    // HR/BL only
    double division_guard = 1e-3;

    void validate() const;
};

struct DstmdConfig {
    std::size_t directions = 8;
    double alpha_sep = 2.0;
    std::size_t tau1 = 1;
    std::size_t tau3 = 4;
    std::size_t delay_tau = 4;

    void validate() const;
    std::size_t max_delay() const noexcept;
};

// O = I(z', t - tau) * I(z, t)
Grid2D hr_detect(const FrameRing& history, const EmdConfig& cfg);
// O = I(z, t) / (I(z', t - tau) + guard)
Grid2D bl_detect(const FrameRing& history, const EmdConfig& cfg);
// O = I(z', t - tau1) * I(z, t) / (I(z'', t - tau2) + guard)
Grid2D hrbl_detect(const FrameRing& history, const EmdConfig& cfg);

// O = ON(z, t) * OFF(z, t - tau)
Grid2D estmd_detect(const OnOffRing& history, std::size_t tau);

struct DstmdResult {
    std::vector<Grid2D> per_direction;  // index i <-> theta = 2 pi i / directions
    DirectionField preferred;           // argmax over theta
};

// Offset z' - z for direction index i, rounded to the nearest pixel.
PixelOffset dstmd_offset(const DstmdConfig& cfg, std::size_t direction);

// O(theta) = ON(z,t) OFF(z',t-tau3) [ON(z,t-tau1) + OFF(z',t-tau)],
// z' = z + alpha (cos theta, sin theta).
DstmdResult dstmd_detect(const OnOffRing& history, const DstmdConfig& cfg);

}  // namespace stmd
