#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>

#include "stmd/direction.hpp"
#include "stmd/grid.hpp"

namespace stmd {

struct DetectorOutput {
    Grid2D response;
    std::optional<DirectionField> directions;
};

// One stateful pipeline instance driven by a sequential frame loop.
class Detector {
public:
    virtual ~Detector() = default;

    virtual std::string name() const = 0;
    virtual DetectorOutput step(const Grid2D& frame) = 0;
    // Leading frames that are emitted as all-zero responses.
    virtual std::size_t warmup_frames() const = 0;
    virtual bool directional() const = 0;
    // Counters for the most recent step.
    virtual const OpCounts& last_ops() const = 0;
    virtual void reset() = 0;
};

}  // namespace stmd
