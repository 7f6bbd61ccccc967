#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "stmd/grid.hpp"

namespace stmd {

// Per-pixel motion direction. Angles are in image coordinates: 0 points
// along +x (right), pi/2 along +y (down), wrapped to [0, 2 pi).
struct DirectionField {
    Grid2D angle;
    Grid2D magnitude;
    std::vector<std::uint8_t> defined;

    DirectionField() = default;
    DirectionField(std::size_t height, std::size_t width)
        : angle(height, width), magnitude(height, width), defined(height * width, 0) {}

    bool is_defined(std::size_t row, std::size_t col) const noexcept {
        return defined[row * angle.width() + col] != 0;
    }

    friend bool operator==(const DirectionField&, const DirectionField&) = default;
};

double wrap_angle(double radians) noexcept;

// Stage name -> operation count for one frame.
using OpCounts = std::map<std::string, std::uint64_t>;

namespace ops {
inline constexpr const char* locate_correlations = "locate_correlations";
inline constexpr const char* ldfc_divisions = "ldfc_divisions";
inline constexpr const char* directional_correlations = "directional_correlations";
inline constexpr const char* estmd_correlations = "estmd_correlations";
inline constexpr const char* emd_correlations = "emd_correlations";
inline constexpr const char* medulla_updates = "medulla_updates";
inline constexpr const char* feedback_subtractions = "feedback_subtractions";
}  // namespace ops

}  // namespace stmd
